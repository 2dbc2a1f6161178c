//! Reduced closed paths, loops (their rotation classes) and primitive roots.
//!
//! Loops are canonicalized on the oriented-edge sequence. In a simple graph
//! no reduced closed path has length 1 or 2, so real work starts at 3.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::cyclic::{self, CapExceeded};
use crate::exact::Rational;
use crate::graph::Graph;
use crate::series::TruncatedSeries;

pub const DEFAULT_CLASS_CAP: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LoopError {
    #[error("loop enumeration exceeded the cap of {cap} classes")]
    CapExceeded { cap: usize },
    #[error("max_length must be at least 1")]
    ZeroLength,
    #[error("not a closed path: {0}")]
    NotClosedPath(String),
}

impl From<CapExceeded> for LoopError {
    fn from(e: CapExceeded) -> Self {
        LoopError::CapExceeded { cap: e.cap }
    }
}

/// `(v_0, ..., v_n)` with `v_0 = v_n`, `n ≥ 1`, consecutive vertices adjacent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedPath {
    vertices: Vec<usize>,
}

impl ClosedPath {
    pub fn new(g: &Graph, vertices: Vec<usize>) -> Result<Self, LoopError> {
        if vertices.len() < 2 {
            return Err(LoopError::NotClosedPath("fewer than two vertices".into()));
        }
        if vertices.first() != vertices.last() {
            return Err(LoopError::NotClosedPath("first and last vertex differ".into()));
        }
        for w in vertices.windows(2) {
            if w[0] >= g.vertex_count() || g.edge_index(w[0], w[1]).is_none() {
                return Err(LoopError::NotClosedPath(format!(
                    "{} and {} are not adjacent",
                    w[0], w[1]
                )));
            }
        }
        Ok(ClosedPath { vertices })
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn length(&self) -> usize {
        self.vertices.len() - 1
    }

    /// No backtracking (`v_{j-1} ≠ v_{j+1}`) and tail-less (`v_1 ≠ v_{n-1}`).
    pub fn is_reduced(&self) -> bool {
        let v = &self.vertices;
        let n = self.length();
        let no_backtracking = (1..n).all(|j| v[j - 1] != v[j + 1]);
        let tailless = n < 2 || v[1] != v[n - 1];
        no_backtracking && tailless
    }

    pub fn edge_sequence(&self, g: &Graph) -> Vec<usize> {
        self.vertices
            .windows(2)
            .map(|w| g.oriented_id(w[0], w[1]).expect("validated adjacency"))
            .collect()
    }
}

/// A loop: the rotation class of a reduced closed path.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LoopClass {
    edges: Vec<usize>,
    vertices: Vec<usize>,
    primitive_length: usize,
}

impl LoopClass {
    /// Builds the class from an admissible cyclic edge sequence of `g`.
    pub(crate) fn from_edges(g: &Graph, edges: &[usize]) -> Self {
        let edges = cyclic::canonical_rotation(edges);
        let primitive_length = cyclic::smallest_period(&edges);
        let mut vertices: Vec<usize> = edges.iter().map(|&e| g.oriented_edge(e).start).collect();
        vertices.push(vertices[0]);
        LoopClass {
            edges,
            vertices,
            primitive_length,
        }
    }

    /// The loop through a reduced closed path.
    pub fn from_path(g: &Graph, path: &ClosedPath) -> Result<Self, LoopError> {
        if !path.is_reduced() {
            return Err(LoopError::NotClosedPath("path is not reduced".into()));
        }
        Ok(LoopClass::from_edges(g, &path.edge_sequence(g)))
    }

    pub fn length(&self) -> usize {
        self.edges.len()
    }

    pub fn primitive_length(&self) -> usize {
        self.primitive_length
    }

    pub fn multiplicity(&self) -> usize {
        self.edges.len() / self.primitive_length
    }

    pub fn is_prime(&self) -> bool {
        self.multiplicity() == 1
    }

    /// Canonical oriented-edge sequence.
    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    /// Vertices of the canonical representative, `v_0 .. v_n` with `v_n = v_0`.
    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn primitive_root(&self) -> LoopClass {
        let p = self.primitive_length;
        LoopClass {
            edges: self.edges[..p].to_vec(),
            vertices: self.vertices[..=p].to_vec(),
            primitive_length: p,
        }
    }

    /// `c^k` for `k ≥ 1`.
    pub fn power(&self, k: usize) -> LoopClass {
        assert!(k >= 1, "loop powers start at 1");
        let n = self.edges.len();
        let edges: Vec<usize> = self.edges.iter().copied().cycle().take(n * k).collect();
        let mut vertices: Vec<usize> = self.vertices[..n].iter().copied().cycle().take(n * k).collect();
        vertices.push(vertices[0]);
        LoopClass {
            edges,
            vertices,
            primitive_length: self.primitive_length,
        }
    }

    /// The same loop traversed backwards.
    pub fn reversed(&self, g: &Graph) -> LoopClass {
        let edges: Vec<usize> = self.edges.iter().rev().map(|&e| e ^ 1).collect();
        LoopClass::from_edges(g, &edges)
    }
}

/// `(c_0, m)` with `c = c_0^m` and `c_0` prime.
pub fn primitive_decompose(c: &LoopClass) -> (LoopClass, usize) {
    (c.primitive_root(), c.multiplicity())
}

/// Successor lists of the reduced-path rule on oriented edges: after
/// `a -> b` the walk may continue to any `b -> c` with `c ≠ a`.
pub(crate) fn reduced_successors(g: &Graph) -> Vec<Vec<usize>> {
    (0..g.oriented_edge_count())
        .map(|id| {
            let e = g.oriented_edge(id);
            g.neighbors(e.target)
                .iter()
                .filter(|&&c| c != e.start)
                .map(|&c| g.oriented_id(e.target, c).expect("neighbor"))
                .collect()
        })
        .collect()
}

pub fn enumerate_loops(g: &Graph, max_length: usize) -> Result<Vec<LoopClass>, LoopError> {
    enumerate_loops_capped(g, max_length, DEFAULT_CLASS_CAP)
}

/// Every loop of length `≤ max_length`, ordered by length then canonical
/// edge sequence.
pub fn enumerate_loops_capped(
    g: &Graph,
    max_length: usize,
    cap: usize,
) -> Result<Vec<LoopClass>, LoopError> {
    if max_length == 0 {
        return Err(LoopError::ZeroLength);
    }
    let classes = cyclic::enumerate_cycles(&reduced_successors(g), max_length, cap)?;
    Ok(classes
        .into_iter()
        .map(|c| {
            let mut vertices: Vec<usize> =
                c.edges.iter().map(|&e| g.oriented_edge(e).start).collect();
            vertices.push(vertices[0]);
            LoopClass {
                edges: c.edges,
                vertices,
                primitive_length: c.period,
            }
        })
        .collect())
}

pub fn prime_loops_up_to(g: &Graph, max_length: usize) -> Result<Vec<LoopClass>, LoopError> {
    prime_loops_capped(g, max_length, DEFAULT_CLASS_CAP)
}

pub fn prime_loops_capped(
    g: &Graph,
    max_length: usize,
    cap: usize,
) -> Result<Vec<LoopClass>, LoopError> {
    Ok(enumerate_loops_capped(g, max_length, cap)?
        .into_iter()
        .filter(LoopClass::is_prime)
        .collect())
}

/// Number of prime loops of each length `0..=max_length`.
pub fn prime_counts(primes: &[LoopClass], max_length: usize) -> Vec<usize> {
    let mut counts = vec![0usize; max_length + 1];
    for p in primes.iter().filter(|p| p.length() <= max_length) {
        counts[p.length()] += 1;
    }
    counts
}

/// `∏_p (1 - u^{l(p)})^{-1}` up to `u^order` from prime counts per length,
/// expanding each `(1 - u^l)^{-N}` as `Σ_k C(N+k-1, k) u^{lk}`.
pub fn euler_product_from_counts(counts: &[usize], order: usize) -> TruncatedSeries {
    let mut acc = TruncatedSeries::one(order);
    for (l, &n) in counts.iter().enumerate().skip(1).take(order) {
        if n == 0 {
            continue;
        }
        let mut factor = vec![Rational::zero(); order + 1];
        let mut binom = BigInt::one();
        for k in 0..=order / l {
            factor[k * l] = Rational::from_integer(binom.clone());
            // C(n+k, k+1) = C(n+k-1, k) (n+k) / (k+1)
            binom = binom * BigInt::from(n + k) / BigInt::from(k + 1);
        }
        acc = &acc * &TruncatedSeries::new(order, factor);
    }
    acc
}

pub fn euler_product_series(g: &Graph, order: usize) -> Result<TruncatedSeries, LoopError> {
    euler_product_series_capped(g, order, DEFAULT_CLASS_CAP)
}

pub fn euler_product_series_capped(
    g: &Graph,
    order: usize,
    cap: usize,
) -> Result<TruncatedSeries, LoopError> {
    let primes = prime_loops_capped(g, order, cap)?;
    Ok(euler_product_from_counts(&prime_counts(&primes, order), order))
}

/// Row of the `loops` report.
#[derive(Debug, Clone, Serialize)]
pub struct LoopRecord {
    pub length: usize,
    pub primitive_length: usize,
    pub multiplicity: usize,
    pub canonical_vertices: Vec<usize>,
}

impl From<&LoopClass> for LoopRecord {
    fn from(c: &LoopClass) -> Self {
        LoopRecord {
            length: c.length(),
            primitive_length: c.primitive_length(),
            multiplicity: c.multiplicity(),
            canonical_vertices: c.vertices().to_vec(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;
    use proptest::prelude::*;

    #[test]
    fn c5_up_to_ten() {
        let g = Graph::cycle(5).unwrap();
        let loops = enumerate_loops(&g, 10).unwrap();
        let shape: Vec<(usize, usize)> = loops.iter().map(|c| (c.length(), c.multiplicity())).collect();
        assert_eq!(shape, vec![(5, 1), (5, 1), (10, 2), (10, 2)]);
        let (root, m) = primitive_decompose(&loops[2]);
        assert_eq!((root.length(), m), (5, 2));
        assert!(loops.contains(&root));
    }

    #[test]
    fn trees_have_no_loops() {
        assert!(enumerate_loops(&Graph::path(6), 12).unwrap().is_empty());
        assert!(enumerate_loops(&Graph::star(4), 12).unwrap().is_empty());
    }

    #[test]
    fn k4_triangles_and_squares() {
        let g = Graph::complete(4);
        let l3 = enumerate_loops(&g, 3).unwrap();
        assert_eq!(l3.len(), 8);
        assert!(l3.iter().all(|c| c.length() == 3 && c.is_prime()));
        let primes = prime_loops_up_to(&g, 4).unwrap();
        assert_eq!(prime_counts(&primes, 4), vec![0, 0, 0, 8, 6]);
    }

    #[test]
    fn short_primes() {
        assert!(prime_loops_up_to(&Graph::cycle(3).unwrap(), 2).unwrap().is_empty());
        let c3 = Graph::cycle(3).unwrap();
        let two = c3.disjoint_union(&c3);
        assert_eq!(prime_loops_up_to(&two, 3).unwrap().len(), 4);
    }

    #[test]
    fn zero_length_is_rejected() {
        assert_eq!(enumerate_loops(&Graph::complete(4), 0), Err(LoopError::ZeroLength));
    }

    #[test]
    fn cap_reports_resource_limit() {
        let err = enumerate_loops_capped(&Graph::complete(4), 8, 10).unwrap_err();
        assert_eq!(err, LoopError::CapExceeded { cap: 10 });
    }

    #[test]
    fn square_of_triangle_decomposes() {
        let g = Graph::cycle(3).unwrap();
        let tri = LoopClass::from_path(&g, &ClosedPath::new(&g, vec![0, 1, 2, 0]).unwrap()).unwrap();
        assert_eq!(primitive_decompose(&tri), (tri.clone(), 1));
        let sq = tri.power(2);
        assert_eq!(sq.length(), 6);
        assert_eq!(primitive_decompose(&sq), (tri, 2));
    }

    #[test]
    fn closed_path_validation() {
        let g = Graph::cycle(4).unwrap();
        assert!(ClosedPath::new(&g, vec![0, 2, 0]).is_err());
        assert!(ClosedPath::new(&g, vec![0, 1, 2]).is_err());
        let tail = ClosedPath::new(&g, vec![0, 1, 0]).unwrap();
        assert!(!tail.is_reduced());
        assert!(ClosedPath::new(&g, vec![0, 1, 2, 3, 0]).unwrap().is_reduced());
    }

    #[test]
    fn triangle_euler_series() {
        let s = euler_product_series(&Graph::cycle(3).unwrap(), 7).unwrap();
        let expected: Vec<_> = [1, 0, 0, 2, 0, 0, 3, 0].iter().map(|&x| int(x)).collect();
        assert_eq!(s.coeffs(), &expected[..]);
        assert_eq!(euler_product_series(&Graph::path(4), 5).unwrap(), TruncatedSeries::one(5));
    }

    #[test]
    fn loop_records_serialize() {
        let g = Graph::cycle(3).unwrap();
        let loops = enumerate_loops(&g, 3).unwrap();
        let json = serde_json::to_string(&LoopRecord::from(&loops[0])).unwrap();
        assert_eq!(
            json,
            r#"{"length":3,"primitive_length":3,"multiplicity":1,"canonical_vertices":[0,1,2,0]}"#
        );
    }

    fn small_graph() -> impl Strategy<Value = Graph> {
        (3usize..7).prop_flat_map(|n| {
            proptest::collection::btree_set((0..n, 0..n), 0..12).prop_map(move |pairs| {
                let edges: std::collections::BTreeSet<(usize, usize)> = pairs
                    .into_iter()
                    .filter(|(a, b)| a != b)
                    .map(|(a, b)| (a.min(b), a.max(b)))
                    .collect();
                Graph::new(n, edges).unwrap()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn reversal_pairs_prime_loops(g in small_graph()) {
            let primes = prime_loops_up_to(&g, 8).unwrap();
            for p in &primes {
                let r = p.reversed(&g);
                prop_assert_ne!(&r, p);
                prop_assert!(primes.contains(&r));
            }
            let counts = prime_counts(&primes, 8);
            prop_assert!(counts.iter().all(|c| c % 2 == 0));
        }

        #[test]
        fn canonical_form_ignores_rotation(g in small_graph(), shift in 0usize..16) {
            for c in enumerate_loops(&g, 7).unwrap() {
                let n = c.length();
                let s = shift % n;
                let rotated: Vec<usize> = c.vertices()[s..n].iter().chain(&c.vertices()[..=s]).copied().collect();
                let path = ClosedPath::new(&g, rotated).unwrap();
                prop_assert!(path.is_reduced());
                prop_assert_eq!(LoopClass::from_path(&g, &path).unwrap(), c.clone());
            }
        }

        #[test]
        fn powers_decompose_back(g in small_graph(), k in 1usize..=4) {
            for p in prime_loops_up_to(&g, 6).unwrap() {
                let c = p.power(k);
                prop_assert_eq!(c.length(), k * p.length());
                prop_assert_eq!(primitive_decompose(&c), (p.clone(), k));
            }
        }
    }
}
