//! The layered hypergraph of a host/pattern pair: `J_i` holds the `i`-sets
//! spanning some `i`-vertex subtournament of `T`.

use std::collections::HashMap;

use serde::Serialize;

use crate::digraph::Digraph;
use crate::embed::{find_embedding, spanning_sets, Embedding};
use crate::error::{Error, Result};
use crate::pattern::Pattern;
use crate::solver::{maximum_set_packing, Packing};
use crate::vset::VertexSet;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Complex {
    pub n: usize,
    /// `layers[i]` is `J_i`, sorted by bitmask; `layers[0] = [∅]`.
    pub layers: Vec<Vec<VertexSet>>,
}

impl Complex {
    /// Top uniformity `k`.
    pub fn k(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn layer_sizes(&self) -> Vec<usize> {
        self.layers.iter().map(Vec::len).collect()
    }

    pub fn top(&self) -> &[VertexSet] {
        &self.layers[self.k()]
    }

    pub fn contains(&self, e: VertexSet) -> bool {
        self.layers.get(e.len()).is_some_and(|layer| layer.binary_search(&e).is_ok())
    }

    /// Every edge's one-smaller subsets are edges.
    pub fn is_downward_closed(&self) -> bool {
        self.layers.iter().skip(1).all(|layer| layer.iter().all(|&e| e.iter().all(|v| self.contains(e.without(v)))))
    }

    /// `d(e)` for every edge of `J_i`: the number of `J_{i+1}` edges containing it.
    fn up_degrees(&self, i: usize) -> HashMap<VertexSet, usize> {
        let mut deg: HashMap<VertexSet, usize> = HashMap::new();
        for &f in &self.layers[i + 1] {
            for v in f {
                *deg.entry(f.without(v)).or_default() += 1;
            }
        }
        deg
    }

    pub fn degree(&self, e: VertexSet) -> usize {
        match self.layers.get(e.len() + 1) {
            Some(up) => up.iter().filter(|f| e.is_subset(**f)).count(),
            None => 0,
        }
    }
}

/// Builds `J_0, ..., J_r` for the pattern `t` of order `r`.
pub fn build_complex(g: &Digraph, t: &Pattern) -> Complex {
    let r = t.order();
    let mut layers = vec![vec![VertexSet::EMPTY]];
    for i in 1..=r {
        let mut layer: Vec<VertexSet> =
            t.subpatterns(i).iter().flat_map(|sub| spanning_sets(g, sub, g.vertices())).collect();
        layer.sort_unstable();
        layer.dedup();
        layers.push(layer);
    }
    Complex { n: g.order(), layers }
}

/// `(δ_0, ..., δ_{k-1})`; an empty layer has minimum degree 0 by convention.
pub fn degree_sequence(j: &Complex) -> Vec<usize> {
    (0..j.k())
        .map(|i| {
            let deg = j.up_degrees(i);
            j.layers[i].iter().map(|e| deg.get(e).copied().unwrap_or(0)).min().unwrap_or(0)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KmCheck {
    pub holds: bool,
    pub failing_layer: Option<usize>,
    pub degrees: Vec<usize>,
    /// `required[0] = n`, `required[i] = (1 - i/k - ε) n`.
    pub required: Vec<f64>,
}

/// Componentwise `δ(J) >= (n, (1 - 1/k - ε) n, ..., (1/k - ε) n)`.
pub fn check_km_hypothesis(j: &Complex, eps: f64) -> KmCheck {
    let k = j.k();
    let n = j.n as f64;
    let degrees = degree_sequence(j);
    let required: Vec<f64> = (0..k).map(|i| if i == 0 { n } else { (1.0 - i as f64 / k as f64 - eps) * n }).collect();
    let failing_layer = degrees.iter().zip(&required).position(|(&d, &req)| (d as f64) < req - 1e-9);
    KmCheck { holds: failing_layer.is_none(), failing_layer, degrees, required }
}

/// Top-layer edges with more than `j` vertices in `s`.
pub fn restricted_deficit(complex: &Complex, s: VertexSet, j: usize) -> Result<usize> {
    let k = complex.k();
    if j == 0 || j >= k {
        return Err(Error::domain(format!("need 1 <= j <= k - 1 (j = {j}, k = {k})")));
    }
    Ok(complex.top().iter().filter(|e| e.intersection(s).len() > j).count())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchingMode {
    /// First-fit over edges in bitmask order; maximal.
    Greedy,
    /// Maximum, via the exact packing search.
    Exact,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TopMatching {
    pub edges: Vec<VertexSet>,
    /// True for greedy runs and for exact runs that finished within budget.
    pub complete: bool,
}

pub fn top_layer_matching(j: &Complex, mode: MatchingMode, budget: u64) -> TopMatching {
    match mode {
        MatchingMode::Greedy => {
            let mut used = VertexSet::EMPTY;
            let mut edges = Vec::new();
            for &e in j.top() {
                if e.is_disjoint(used) {
                    used = used.union(e);
                    edges.push(e);
                }
            }
            TopMatching { edges, complete: true }
        }
        MatchingMode::Exact => {
            let (edges, complete, _) = maximum_set_packing(VertexSet::full(j.n), j.top(), j.k(), budget);
            TopMatching { edges, complete }
        }
    }
}

/// Converts a top-layer matching into the corresponding `T`-packing.
pub fn matching_to_packing(g: &Digraph, t: &Pattern, edges: &[VertexSet]) -> Result<Packing> {
    let mut packing = Packing::new(g.order());
    for &e in edges {
        let image =
            find_embedding(g, t, e).ok_or_else(|| Error::domain(format!("edge {e:?} does not span {}", t.name())))?;
        packing.elements.push(Embedding { pattern: t.clone(), image });
    }
    Ok(packing)
}

pub fn packing_to_matching(packing: &Packing) -> Vec<VertexSet> {
    packing.elements.iter().map(Embedding::vertex_set).collect()
}
