//! Brute-force oracles shared by the integration tests. They deliberately
//! avoid the library's search code: embeddings are checked by trying every
//! vertex permutation and packings by plain recursion.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use tpack::matching::UGraph;
use tpack::{Digraph, Pattern, VertexSet};

pub fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Some bijection pattern -> `set` maps every pattern arc onto a host arc.
pub fn naive_spans(g: &Digraph, set: &[usize], p: &Pattern) -> bool {
    if set.len() != p.order() {
        return false;
    }
    let r = p.order();
    permutations(set)
        .iter()
        .any(|img| (0..r).all(|i| (0..r).all(|j| i == j || !p.has_arc(i, j) || g.has_arc(img[i], img[j]))))
}

pub fn k_subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if items.len() < k {
        return vec![];
    }
    let mut out = Vec::new();
    for mut s in k_subsets(&items[1..], k - 1) {
        s.insert(0, items[0]);
        out.push(s);
    }
    out.extend(k_subsets(&items[1..], k));
    out
}

pub fn naive_count(g: &Digraph, p: &Pattern) -> u128 {
    let all: Vec<usize> = (0..g.order()).collect();
    k_subsets(&all, p.order()).iter().filter(|s| naive_spans(g, s, p)).count() as u128
}

/// Largest number of disjoint spanning `r`-sets, by recursion on the lowest
/// remaining vertex (left out, or placed in a set with higher vertices).
pub fn brute_max_packing(g: &Digraph, p: &Pattern) -> usize {
    fn go(g: &Digraph, p: &Pattern, remaining: &[usize]) -> usize {
        let r = p.order();
        if remaining.len() < r {
            return 0;
        }
        let v = remaining[0];
        let rest = &remaining[1..];
        let mut best = go(g, p, rest);
        for others in k_subsets(rest, r - 1) {
            let mut set = others.clone();
            set.insert(0, v);
            if naive_spans(g, &set, p) {
                let left: Vec<usize> = rest.iter().copied().filter(|u| !others.contains(u)).collect();
                best = best.max(1 + go(g, p, &left));
            }
        }
        best
    }
    let all: Vec<usize> = (0..g.order()).collect();
    go(g, p, &all)
}

/// Some `d` pairwise disjoint edges cover `x`.
pub fn brute_covering_matching_exists(g: &UGraph, d: usize, x: VertexSet) -> bool {
    let edges: Vec<(usize, usize)> = g.edges().collect();
    fn go(edges: &[(usize, usize)], from: usize, d: usize, used: VertexSet, x: VertexSet) -> bool {
        if d == 0 {
            return x.is_subset(used);
        }
        (from..edges.len()).any(|i| {
            let (u, v) = edges[i];
            !used.contains(u) && !used.contains(v) && go(edges, i + 1, d - 1, used.with(u).with(v), x)
        })
    }
    go(&edges, 0, d, VertexSet::EMPTY, x)
}

/// Random graph with minimum degree at least `d`: Bernoulli edges, then
/// random edges at deficient vertices.
pub fn random_ugraph_min_degree(n: usize, d: usize, rng: &mut ChaCha8Rng) -> UGraph {
    let p: f64 = rng.gen_range(0.0..1.0);
    let mut g = UGraph::new(n).unwrap();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(u, v).unwrap();
            }
        }
    }
    for v in 0..n {
        while g.degree(v) < d {
            let w = rng.gen_range(0..n);
            if w != v && !g.has_edge(v, w) {
                g.add_edge(v, w).unwrap();
            }
        }
    }
    g
}

pub fn random_subset(n: usize, k: usize, rng: &mut ChaCha8Rng) -> VertexSet {
    let mut set = VertexSet::EMPTY;
    while set.len() < k {
        set.insert(rng.gen_range(0..n));
    }
    set
}
