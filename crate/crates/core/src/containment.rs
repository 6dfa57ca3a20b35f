//! γ-independence and α-containment of the three-class extremal digraph `Ex(n)`.

use rand::seq::SliceRandom;
use serde::Serialize;

use crate::constructions::ex_class_sizes;
use crate::digraph::{Digraph, Vertex};
use crate::error::{Error, Result};
use crate::rng;
use crate::vset::VertexSet;

/// Largest order for which [`ContainmentMode::Exact`] is accepted.
pub const EXACT_CONTAINMENT_LIMIT: usize = 12;

/// `e(G[S]) <= gamma * order^2`.
///
/// `order` is the reference order in the `gamma n^2` bound. It is usually
/// `g.order()`, but callers working inside a subdigraph pass whichever order
/// their argument is phrased in.
pub fn is_gamma_independent(g: &Digraph, set: VertexSet, gamma: f64, order: usize) -> bool {
    g.arcs_within(set) as f64 <= gamma * (order * order) as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ContainmentMode {
    Exact,
    /// Seeded swap local search with restarts.
    Heuristic {
        restarts: usize,
        seed: u64,
    },
}

impl ContainmentMode {
    pub fn heuristic(seed: u64) -> Self {
        ContainmentMode::Heuristic { restarts: 32, seed }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExContainment {
    /// `deficit <= alpha n^2`.
    pub contains: bool,
    /// Arcs of `Ex(n)` missing from `G` under `classes`.
    pub deficit: usize,
    /// Best class assignment found; `classes[i]` plays `A_{i+1}`.
    pub classes: [VertexSet; 3],
    /// True when `deficit` is the global minimum.
    pub exact: bool,
}

/// Arcs of `Ex(n)` (complete inside classes, `A_i -> A_{i+1}` cyclically)
/// that are missing from `g` under the given classes.
pub fn ex_deficit(g: &Digraph, classes: &[VertexSet; 3]) -> usize {
    let mut missing = 0;
    for i in 0..3 {
        let a = classes[i];
        let next = classes[(i + 1) % 3];
        let inside = a.len() * a.len().saturating_sub(1);
        missing += inside - g.arcs_within(a);
        let forward: usize = a.iter().map(|v| g.out_degree_in(v, next)).sum();
        missing += a.len() * next.len() - forward;
    }
    missing
}

/// Does `g` α-contain `Ex(n)`? Searches over assignments of `V(G)` to the
/// three classes with the class sizes of `Ex(n)`.
///
/// Heuristic mode can miss a good assignment (false negative) but its
/// witness is always a real assignment, so `contains == true` is never wrong.
pub fn alpha_contains_ex(g: &Digraph, alpha: f64, mode: ContainmentMode) -> Result<ExContainment> {
    let n = g.order();
    if n < 3 {
        return Err(Error::domain("Ex(n) needs n >= 3"));
    }
    let sizes = ex_class_sizes(n, 0)?;
    let threshold = alpha * (n * n) as f64;
    let (deficit, classes, exact) = match mode {
        ContainmentMode::Exact => {
            if n > EXACT_CONTAINMENT_LIMIT {
                return Err(Error::Refused(format!(
                    "exact Ex(n) containment is limited to n <= {EXACT_CONTAINMENT_LIMIT} (got {n}); use heuristic mode"
                )));
            }
            let (d, c) = exact_min_deficit(g, sizes);
            (d, c, true)
        }
        ContainmentMode::Heuristic { restarts, seed } => {
            let (d, c) = local_search_min_deficit(g, sizes, restarts.max(1), seed);
            (d, c, false)
        }
    };
    Ok(ExContainment { contains: deficit as f64 <= threshold, deficit, classes, exact })
}

/// Arcs `Ex` requires between `u` (class `cu`) and `v` (class `cv`) that `g` lacks.
#[inline]
fn pair_missing(g: &Digraph, u: Vertex, cu: usize, v: Vertex, cv: usize) -> usize {
    if cu == cv {
        (!g.has_arc(u, v)) as usize + (!g.has_arc(v, u)) as usize
    } else if (cu + 1) % 3 == cv {
        (!g.has_arc(u, v)) as usize
    } else {
        (!g.has_arc(v, u)) as usize
    }
}

fn exact_min_deficit(g: &Digraph, sizes: [usize; 3]) -> (usize, [VertexSet; 3]) {
    struct Search<'a> {
        g: &'a Digraph,
        label: Vec<usize>,
        left: [usize; 3],
        best: usize,
        best_label: Vec<usize>,
    }
    impl Search<'_> {
        fn go(&mut self, v: Vertex, deficit: usize) {
            if deficit >= self.best {
                return;
            }
            if v == self.g.order() {
                self.best = deficit;
                self.best_label = self.label.clone();
                return;
            }
            for c in 0..3 {
                if self.left[c] == 0 {
                    continue;
                }
                let add: usize = (0..v).map(|u| pair_missing(self.g, u, self.label[u], v, c)).sum();
                self.left[c] -= 1;
                self.label[v] = c;
                self.go(v + 1, deficit + add);
                self.left[c] += 1;
            }
        }
    }
    let n = g.order();
    let mut s = Search { g, label: vec![0; n], left: sizes, best: usize::MAX, best_label: vec![] };
    s.go(0, 0);
    (s.best, classes_of(&s.best_label))
}

fn classes_of(label: &[usize]) -> [VertexSet; 3] {
    let mut classes = [VertexSet::EMPTY; 3];
    for (v, &c) in label.iter().enumerate() {
        classes[c].insert(v);
    }
    classes
}

fn local_search_min_deficit(g: &Digraph, sizes: [usize; 3], restarts: usize, seed: u64) -> (usize, [VertexSet; 3]) {
    let n = g.order();
    let mut rng = rng::seeded(seed);
    let mut best: Option<(usize, Vec<usize>)> = None;
    for _ in 0..restarts {
        let mut label: Vec<usize> = (0..3).flat_map(|c| std::iter::repeat_n(c, sizes[c])).collect();
        label.shuffle(&mut rng);
        let mut deficit = ex_deficit(g, &classes_of(&label));
        // first-improvement swaps between vertices of different classes
        loop {
            let mut improved = false;
            for u in 0..n {
                for v in u + 1..n {
                    if label[u] == label[v] {
                        continue;
                    }
                    let before = vertex_cost(g, &label, u) + vertex_cost(g, &label, v)
                        - pair_missing(g, u, label[u], v, label[v]);
                    label.swap(u, v);
                    let after = vertex_cost(g, &label, u) + vertex_cost(g, &label, v)
                        - pair_missing(g, u, label[u], v, label[v]);
                    if after < before {
                        deficit = deficit - before + after;
                        improved = true;
                    } else {
                        label.swap(u, v);
                    }
                }
            }
            if !improved {
                break;
            }
        }
        debug_assert_eq!(deficit, ex_deficit(g, &classes_of(&label)));
        if best.as_ref().is_none_or(|(d, _)| deficit < *d) {
            best = Some((deficit, label));
        }
        if best.as_ref().is_some_and(|(d, _)| *d == 0) {
            break;
        }
    }
    let (d, label) = best.expect("at least one restart");
    (d, classes_of(&label))
}

fn vertex_cost(g: &Digraph, label: &[usize], v: Vertex) -> usize {
    (0..g.order()).filter(|&u| u != v).map(|u| pair_missing(g, v, label[v], u, label[u])).sum()
}
