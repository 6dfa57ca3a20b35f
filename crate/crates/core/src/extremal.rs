//! Perfect `C_3`-packings of hosts close to `Ex(n)` with `δ^0 >= 2n/3 - 1`.
//!
//! The procedure relocates internally bad vertices, removes at most one
//! `C_3` to align the class sizes mod 3, covers externally bad vertices and
//! balances the classes with `C_3`s inside single classes, and finishes on
//! the tripartite remainder with the exact solver.

use serde::Serialize;

use crate::classify::{externally_excellent, internally_excellent};
use crate::containment::{alpha_contains_ex, ContainmentMode, EXACT_CONTAINMENT_LIMIT};
use crate::digraph::{Digraph, Vertex};
use crate::embed::{find_embedding, Embedding};
use crate::error::{Error, Result};
use crate::pattern::{Pattern, Tournament};
use crate::solver::{find_perfect_packing_within, verify_packing, Packing, Verdict, DEFAULT_BUDGET};
use crate::vset::VertexSet;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtremalConfig {
    pub alpha: f64,
    /// Excellence parameter `γ`; vertices are relocated when internally
    /// `γ`-bad and covered early when externally `2γ`-bad.
    pub gamma: f64,
    /// Witness partition for the containment; recomputed when absent.
    pub classes: Option<[VertexSet; 3]>,
    pub seed: u64,
    pub budget: u64,
}

impl ExtremalConfig {
    pub fn new(alpha: f64) -> Self {
        ExtremalConfig { alpha, gamma: 0.25, classes: None, seed: 0, budget: DEFAULT_BUDGET }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Relocation {
    pub vertex: Vertex,
    pub from: usize,
    pub to: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtremalOutcome {
    pub packing: Packing,
    pub initial_classes: [VertexSet; 3],
    pub relocated: Vec<Relocation>,
    pub parity: Option<Embedding>,
    pub covering: Vec<Embedding>,
    pub balancing: Vec<Embedding>,
    /// Size of each class handed to the tripartite solver.
    pub final_class_size: usize,
}

fn c3() -> Pattern {
    Tournament::cyclic_triangle().into_pattern()
}

fn stage_failed(stage: &'static str, diagnostics: String) -> Error {
    Error::StageFailed { stage, diagnostics }
}

/// Lowest-index `C_3` inside `allowed` that contains `x` (when given).
fn c3_through(g: &Digraph, x: Option<Vertex>, allowed: VertexSet) -> Option<Embedding> {
    let pattern = c3();
    let (anchor, rest) = match x {
        Some(x) => (VertexSet::singleton(x), allowed.without(x)),
        None => (VertexSet::EMPTY, allowed),
    };
    let need = 3 - anchor.len();
    crate::vset::subsets_of_size(rest, need).find_map(|s| {
        find_embedding(g, &pattern, s.union(anchor)).map(|image| Embedding { pattern: pattern.clone(), image })
    })
}

/// Class maximising `min(d^+(x, A_j), d^-(x, A_j))`, lowest index on ties.
fn home_class(g: &Digraph, x: Vertex, classes: &[VertexSet; 3]) -> usize {
    (0..3)
        .max_by_key(|&j| {
            let a = classes[j].without(x);
            (g.out_degree_in(x, a).min(g.in_degree_in(x, a)), std::cmp::Reverse(j))
        })
        .expect("three classes")
}

pub fn extremal_c3_pack(g: &Digraph, config: &ExtremalConfig) -> Result<ExtremalOutcome> {
    let n = g.order();
    if n == 0 || !n.is_multiple_of(3) {
        return Err(Error::domain(format!("order {n} is not a positive multiple of 3")));
    }
    let semi = g.min_semidegree()?;
    if 3 * semi + 3 < 2 * n {
        return Err(Error::domain(format!("δ^0 = {semi} is below 2n/3 - 1")));
    }
    let initial = match config.classes {
        Some(classes) => {
            let total = classes.iter().fold(VertexSet::EMPTY, |acc, &c| acc.union(c));
            let sizes: usize = classes.iter().map(|c| c.len()).sum();
            if total != g.vertices() || sizes != n {
                return Err(Error::domain("witness classes must partition the vertex set"));
            }
            let deficit = crate::containment::ex_deficit(g, &classes);
            if deficit as f64 > config.alpha * (n * n) as f64 + 1e-9 {
                return Err(Error::domain(format!("witness misses {deficit} arcs of Ex(n), above α n^2")));
            }
            classes
        }
        None => {
            let mode = if n <= EXACT_CONTAINMENT_LIMIT {
                ContainmentMode::Exact
            } else {
                ContainmentMode::heuristic(config.seed)
            };
            let found = alpha_contains_ex(g, config.alpha, mode)?;
            if !found.contains {
                return Err(Error::domain(format!("no α-containment of Ex(n) found (best deficit {})", found.deficit)));
            }
            found.classes
        }
    };

    let gamma = config.gamma;
    let mut classes = initial;

    let bad: Vec<(Vertex, usize)> = (0..3)
        .flat_map(|i| initial[i].iter().map(move |x| (x, i)))
        .filter(|&(x, i)| !internally_excellent(g, x, initial[i], gamma))
        .collect();
    let mut relocated = Vec::new();
    for (x, from) in bad {
        let to = home_class(g, x, &initial);
        if to != from {
            classes[from].remove(x);
            classes[to].insert(x);
            relocated.push(Relocation { vertex: x, from, to });
        }
    }

    let mut alive = g.vertices();
    let remove = |classes: &mut [VertexSet; 3], alive: &mut VertexSet, e: &Embedding| {
        let s = e.vertex_set();
        *alive = alive.difference(s);
        for c in classes.iter_mut() {
            *c = c.difference(s);
        }
    };

    let residues = |classes: &[VertexSet; 3]| classes.map(|c| c.len() % 3);
    let parity = if residues(&classes).iter().all(|&r| r == residues(&classes)[0]) {
        None
    } else {
        let pattern = c3();
        let found = crate::vset::subsets_of_size(alive, 3).find_map(|s| {
            let after = classes.map(|c| (c.len() - c.intersection(s).len()) % 3);
            if after.iter().any(|&r| r != after[0]) {
                return None;
            }
            find_embedding(g, &pattern, s).map(|image| Embedding { pattern: pattern.clone(), image })
        });
        let Some(e) = found else {
            return Err(stage_failed("parity", format!("no C3 aligns class sizes {:?}", classes.map(|c| c.len()))));
        };
        remove(&mut classes, &mut alive, &e);
        Some(e)
    };

    let mut covering = Vec::new();
    let ext_bad: Vec<(Vertex, usize)> = (0..3)
        .flat_map(|i| classes[i].iter().map(move |x| (x, i)))
        .filter(|&(x, i)| !externally_excellent(g, x, &classes, i, 2.0 * gamma))
        .collect();
    for (x, i) in ext_bad {
        if !alive.contains(x) {
            continue;
        }
        let Some(e) = c3_through(g, Some(x), classes[i]) else {
            return Err(stage_failed("cover", format!("externally bad vertex {x} lies on no C3 inside its class")));
        };
        remove(&mut classes, &mut alive, &e);
        covering.push(e);
    }

    let mut balancing = Vec::new();
    loop {
        let sizes = classes.map(|c| c.len());
        let min = *sizes.iter().min().expect("three classes");
        let (big, &max) = sizes.iter().enumerate().max_by_key(|&(j, &s)| (s, std::cmp::Reverse(j))).expect("three");
        if max == min {
            break;
        }
        let Some(e) = c3_through(g, None, classes[big]) else {
            return Err(stage_failed("balance", format!("class {big} of size {max} spans no C3")));
        };
        remove(&mut classes, &mut alive, &e);
        balancing.push(e);
    }

    let final_class_size = classes[0].len();
    let tripartite = (0..3).try_fold(Digraph::empty(n)?, |acc, i| {
        let j = (i + 1) % 3;
        acc.union(&g.arcs_from_to(classes[i], classes[j]))?.union(&g.arcs_from_to(classes[j], classes[i]))
    })?;
    let mut packing = Packing::new(n);
    packing.elements.extend(parity.iter().cloned());
    packing.elements.extend(covering.iter().cloned());
    packing.elements.extend(balancing.iter().cloned());
    if !alive.is_empty() {
        let out = find_perfect_packing_within(&tripartite, &c3(), alive, config.budget)?;
        match out.verdict {
            Verdict::Found => packing.elements.extend(out.packing.expect("found").elements),
            Verdict::ExhaustedNone => {
                return Err(stage_failed(
                    "final",
                    format!("tripartite remainder with classes of size {final_class_size} has no C3-packing"),
                ))
            }
            Verdict::BudgetExceeded => {
                return Err(stage_failed("final", "tripartite search exceeded its node budget".into()))
            }
        }
    }
    if !verify_packing(g, &[c3()], &packing, true) {
        return Err(Error::InvariantViolation("assembled C3-packing failed verification".into()));
    }
    Ok(ExtremalOutcome { packing, initial_classes: initial, relocated, parity, covering, balancing, final_class_size })
}
