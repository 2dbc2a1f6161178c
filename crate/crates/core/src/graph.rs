//! Finite simple undirected graphs and their oriented-edge doubling.
//!
//! Edges are stored sorted by `(min endpoint, max endpoint)`. Oriented edge
//! `2k` runs along edge `k` from the smaller to the larger endpoint and
//! `2k + 1` runs back, so `reverse(e) = e ^ 1`.

use std::collections::{BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("malformed graph document: {0}")]
    Malformed(String),
    #[error("edges[{index}]: self-loop at vertex {vertex}")]
    SelfLoop { index: usize, vertex: usize },
    #[error("edges[{index}]: duplicate edge {{{a}, {b}}}")]
    DuplicateEdge { index: usize, a: usize, b: usize },
    #[error("edges[{index}]: vertex {vertex} out of range (vertices = {vertex_count})")]
    VertexOutOfRange {
        index: usize,
        vertex: usize,
        vertex_count: usize,
    },
    #[error("cannot build {0}")]
    Construction(String),
}

/// On-disk form: `{"vertices": n, "edges": [[u, v], ...]}` with 0-based indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDoc {
    pub vertices: usize,
    pub edges: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct OrientedEdge {
    pub id: usize,
    pub start: usize,
    pub target: usize,
    pub reverse_id: usize,
    /// Index of the underlying undirected edge in [`Graph::edges`].
    pub underlying: usize,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicates and out-of-range
    /// endpoints. `index` in errors is the position in the input sequence.
    pub fn new<I>(vertex_count: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut seen = BTreeSet::new();
        for (index, (a, b)) in edges.into_iter().enumerate() {
            for vertex in [a, b] {
                if vertex >= vertex_count {
                    return Err(GraphError::VertexOutOfRange {
                        index,
                        vertex,
                        vertex_count,
                    });
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop { index, vertex: a });
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(GraphError::DuplicateEdge { index, a, b });
            }
        }
        let edges: Vec<(usize, usize)> = seen.into_iter().collect();
        let mut adjacency = vec![Vec::new(); vertex_count];
        for &(a, b) in &edges {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Graph {
            vertex_count,
            edges,
            adjacency,
        })
    }

    pub fn from_doc(doc: &GraphDoc) -> Result<Self, GraphError> {
        Graph::new(doc.vertices, doc.edges.iter().map(|e| (e[0], e[1])))
    }

    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let doc: GraphDoc =
            serde_json::from_str(text).map_err(|e| GraphError::Malformed(e.to_string()))?;
        Graph::from_doc(&doc)
    }

    pub fn to_doc(&self) -> GraphDoc {
        GraphDoc {
            vertices: self.vertex_count,
            edges: self.edges.iter().map(|&(a, b)| [a, b]).collect(),
        }
    }

    /// r0
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// r1
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        self.edges.binary_search(&(a.min(b), a.max(b))).ok()
    }

    /// Id of the oriented edge `a -> b`, if `{a, b}` is an edge.
    pub fn oriented_id(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_index(a, b)
            .map(|k| if a < b { 2 * k } else { 2 * k + 1 })
    }

    pub fn oriented_edge(&self, id: usize) -> OrientedEdge {
        let k = id / 2;
        let (lo, hi) = self.edges[k];
        let (start, target) = if id.is_multiple_of(2) { (lo, hi) } else { (hi, lo) };
        OrientedEdge {
            id,
            start,
            target,
            reverse_id: id ^ 1,
            underlying: k,
        }
    }

    pub fn oriented_edge_count(&self) -> usize {
        2 * self.edges.len()
    }

    pub fn oriented_edges(&self) -> Vec<OrientedEdge> {
        (0..self.oriented_edge_count())
            .map(|id| self.oriented_edge(id))
            .collect()
    }

    /// The common valency `q + 1` when every vertex has the same degree.
    /// The empty graph has no valency to report.
    pub fn regularity(&self) -> Option<usize> {
        let d = self.adjacency.first()?.len();
        self.adjacency.iter().all(|n| n.len() == d).then_some(d)
    }

    /// Branching number `q = valency - 1` of a regular graph with valency ≥ 1.
    pub fn branching(&self) -> Option<usize> {
        self.regularity().and_then(|d| d.checked_sub(1))
    }

    pub fn is_connected(&self) -> bool {
        if self.vertex_count <= 1 {
            return true;
        }
        let mut seen = vec![false; self.vertex_count];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut reached = 1;
        while let Some(v) = queue.pop_front() {
            for &w in &self.adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    reached += 1;
                    queue.push_back(w);
                }
            }
        }
        reached == self.vertex_count
    }

    /// Vertices of `other` are shifted past those of `self`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let shift = self.vertex_count;
        let edges = self
            .edges
            .iter()
            .copied()
            .chain(other.edges.iter().map(|&(a, b)| (a + shift, b + shift)));
        Graph::new(self.vertex_count + other.vertex_count, edges)
            .expect("union of valid graphs is valid")
    }

    /// Applies a vertex permutation: vertex `v` becomes `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Graph, GraphError> {
        if perm.len() != self.vertex_count {
            return Err(GraphError::Construction(
                "relabeling: permutation length differs from vertex count".into(),
            ));
        }
        Graph::new(
            self.vertex_count,
            self.edges.iter().map(|&(a, b)| (perm[a], perm[b])),
        )
    }

    pub fn is_forest(&self) -> bool {
        let components = self.component_count();
        self.edges.len() + components == self.vertex_count
    }

    fn component_count(&self) -> usize {
        let mut seen = vec![false; self.vertex_count];
        let mut count = 0;
        for s in 0..self.vertex_count {
            if seen[s] {
                continue;
            }
            count += 1;
            seen[s] = true;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &w in &self.adjacency[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        count
    }

    // Standard families.

    pub fn cycle(n: usize) -> Result<Graph, GraphError> {
        if n < 3 {
            return Err(GraphError::Construction(format!("cycle C{n}")));
        }
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    pub fn path(n: usize) -> Graph {
        Graph::new(n, (1..n).map(|i| (i - 1, i))).expect("path is simple")
    }

    pub fn complete(n: usize) -> Graph {
        let edges = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)));
        Graph::new(n, edges).expect("complete graph is simple")
    }

    pub fn complete_bipartite(a: usize, b: usize) -> Graph {
        let edges = (0..a).flat_map(|i| (0..b).map(move |j| (i, a + j)));
        Graph::new(a + b, edges).expect("complete bipartite graph is simple")
    }

    /// Star with one center and `leaves` leaves.
    pub fn star(leaves: usize) -> Graph {
        Graph::new(leaves + 1, (1..=leaves).map(|i| (0, i))).expect("star is simple")
    }

    pub fn petersen() -> Graph {
        let outer = (0..5).map(|i| (i, (i + 1) % 5));
        let spokes = (0..5).map(|i| (i, i + 5));
        let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
        Graph::new(10, outer.chain(spokes).chain(inner)).expect("Petersen graph is simple")
    }

    /// A connected simple `degree`-regular graph on `n` vertices drawn by the
    /// configuration model with rejection, deterministic in `seed`.
    pub fn random_regular(n: usize, degree: usize, seed: u64) -> Result<Graph, GraphError> {
        if degree >= n || !(n * degree).is_multiple_of(2) {
            return Err(GraphError::Construction(format!(
                "{degree}-regular graph on {n} vertices"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, degree)).collect();
        for _ in 0..100_000 {
            stubs.shuffle(&mut rng);
            let pairs: Vec<(usize, usize)> = stubs.chunks(2).map(|c| (c[0], c[1])).collect();
            if let Ok(g) = Graph::new(n, pairs) {
                if g.is_connected() {
                    return Ok(g);
                }
            }
        }
        Err(GraphError::Construction(format!(
            "{degree}-regular graph on {n} vertices (rejection sampling exhausted)"
        )))
    }
}
