//! Cyclic sequences over a transition system on oriented edges.
//!
//! A closed sequence `(e_1, ..., e_n)` is admissible when every transition
//! `e_i -> e_{i+1}` and the closing `e_n -> e_1` are allowed. Classes under
//! rotation are represented by their lexicographically minimal rotation,
//! which starts at the minimal edge id; the search anchors at that edge and
//! never steps below it.

use std::collections::VecDeque;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};

use rayon::prelude::*;

/// Lexicographically minimal rotation.
pub fn canonical_rotation<T: Ord + Clone>(seq: &[T]) -> Vec<T> {
    let n = seq.len();
    if n == 0 {
        return Vec::new();
    }
    let best = (0..n)
        .min_by(|&i, &j| {
            seq[i..]
                .iter()
                .chain(&seq[..i])
                .cmp(seq[j..].iter().chain(&seq[..j]))
        })
        .expect("nonempty");
    seq[best..].iter().chain(&seq[..best]).cloned().collect()
}

/// Smallest `p ≥ 1` with `seq` invariant under rotation by `p`; divides `len`.
pub fn smallest_period<T: PartialEq>(seq: &[T]) -> usize {
    let n = seq.len();
    (1..=n)
        .find(|&p| n.is_multiple_of(p) && (0..n).all(|i| seq[i] == seq[(i + p) % n]))
        .unwrap_or(n)
}

fn is_minimal_rotation(seq: &[usize]) -> bool {
    let n = seq.len();
    (1..n).filter(|&r| seq[r] == seq[0]).all(|r| {
        let rotated = seq[r..].iter().chain(&seq[..r]);
        seq.iter().cmp(rotated) != std::cmp::Ordering::Greater
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicClass {
    pub edges: Vec<usize>,
    pub period: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CapExceeded {
    pub cap: usize,
}

/// One class per rotation class of admissible closed sequences of length
/// `1..=max_len`, sorted by `(length, edges)`.
///
/// `successors[e]` lists the edges allowed after `e`.
pub fn enumerate_cycles(
    successors: &[Vec<usize>],
    max_len: usize,
    cap: usize,
) -> Result<Vec<CyclicClass>, CapExceeded> {
    let n = successors.len();
    let mut predecessors = vec![Vec::new(); n];
    for (e, succ) in successors.iter().enumerate() {
        for &f in succ {
            predecessors[f].push(e);
        }
    }
    let found = AtomicUsize::new(0);
    let aborted = AtomicBool::new(false);

    let per_anchor: Vec<Vec<CyclicClass>> = (0..n)
        .into_par_iter()
        .map(|anchor| {
            search_anchor(
                anchor,
                successors,
                &predecessors,
                max_len,
                cap,
                &found,
                &aborted,
            )
        })
        .collect();

    if aborted.load(Ordering::Relaxed) {
        return Err(CapExceeded { cap });
    }
    let mut all: Vec<CyclicClass> = per_anchor.into_iter().flatten().collect();
    all.sort_by(|a, b| a.edges.len().cmp(&b.edges.len()).then_with(|| a.edges.cmp(&b.edges)));
    Ok(all)
}

fn search_anchor(
    anchor: usize,
    successors: &[Vec<usize>],
    predecessors: &[Vec<usize>],
    max_len: usize,
    cap: usize,
    found: &AtomicUsize,
    aborted: &AtomicBool,
) -> Vec<CyclicClass> {
    // Transitions needed to get from e back to the anchor, staying >= anchor.
    let mut dist = vec![usize::MAX; successors.len()];
    dist[anchor] = 0;
    let mut queue = VecDeque::from([anchor]);
    while let Some(e) = queue.pop_front() {
        for &p in &predecessors[e] {
            if p > anchor && dist[p] == usize::MAX {
                dist[p] = dist[e] + 1;
                queue.push_back(p);
            }
        }
    }
    let closes = |e: usize| successors[e].contains(&anchor);

    let mut out = Vec::new();
    let mut path = vec![anchor];
    let mut cursor = vec![0usize];
    if closes(anchor) {
        out.push(CyclicClass {
            edges: vec![anchor],
            period: 1,
        });
    }
    while let Some(&e) = path.last() {
        if aborted.load(Ordering::Relaxed) {
            return Vec::new();
        }
        let top = cursor.len() - 1;
        let succ = &successors[e];
        if path.len() >= max_len || cursor[top] >= succ.len() {
            path.pop();
            cursor.pop();
            continue;
        }
        let next = succ[cursor[top]];
        cursor[top] += 1;
        if next < anchor {
            continue;
        }
        let k = path.len() + 1;
        let remaining = if next == anchor { 1 } else { dist[next] };
        if remaining == usize::MAX || k + remaining - 1 > max_len {
            continue;
        }
        path.push(next);
        cursor.push(0);
        if closes(next) && is_minimal_rotation(&path) {
            out.push(CyclicClass {
                period: smallest_period(&path),
                edges: path.clone(),
            });
            if found.fetch_add(1, Ordering::Relaxed) + 1 > cap {
                aborted.store(true, Ordering::Relaxed);
                return Vec::new();
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotations() {
        assert_eq!(canonical_rotation(&[3, 1, 2, 1, 1]), vec![1, 1, 3, 1, 2]);
        assert_eq!(smallest_period(&[1, 2, 1, 2]), 2);
        assert_eq!(smallest_period(&[1, 2, 1]), 3);
        assert!(is_minimal_rotation(&[0, 1, 0, 1]));
        assert!(!is_minimal_rotation(&[0, 2, 0, 1]));
    }

    #[test]
    fn single_directed_cycle() {
        // 0 -> 1 -> 2 -> 0
        let succ = vec![vec![1], vec![2], vec![0]];
        let classes = enumerate_cycles(&succ, 7, 100).unwrap();
        let lens: Vec<(usize, usize)> = classes.iter().map(|c| (c.edges.len(), c.period)).collect();
        assert_eq!(lens, vec![(3, 3), (6, 3)]);
    }

    #[test]
    fn two_loops_at_a_node() {
        // Words in {a, b} up to rotation: necklaces over a binary alphabet.
        let succ = vec![vec![0, 1], vec![0, 1]];
        let classes = enumerate_cycles(&succ, 4, 1000).unwrap();
        // binary necklaces of length 1..4: 2, 3, 4, 6
        let mut counts = [0usize; 5];
        for c in &classes {
            counts[c.edges.len()] += 1;
        }
        assert_eq!(&counts[1..], &[2, 3, 4, 6]);
    }

    #[test]
    fn cap_is_enforced() {
        let succ = vec![vec![0, 1], vec![0, 1]];
        assert_eq!(enumerate_cycles(&succ, 10, 5), Err(CapExceeded { cap: 5 }));
    }
}
