//! Exact-cover search for perfect, maximum and family packings.
//!
//! Candidates are the `r`-sets spanning a pattern, stored as bitmasks and
//! indexed by their lowest vertex. The search always branches on the
//! lowest-index undecided vertex and tries its candidates in ascending mask
//! order, so verdicts and witnesses are deterministic.

use std::time::{Duration, Instant};

use serde::{Serialize, Serializer};

use crate::digraph::Digraph;
use crate::embed::{find_embedding, spanning_sets, Embedding};
use crate::error::{Error, Result};
use crate::pattern::Pattern;
use crate::vset::VertexSet;

/// Default node budget for every search in the crate.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Found,
    /// The whole search tree was traversed without finding a packing.
    ExhaustedNone,
    /// The node budget ran out first; nothing is known.
    BudgetExceeded,
}

/// Vertex-disjoint embeddings into a host of order `n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Packing {
    pub n: usize,
    pub elements: Vec<Embedding>,
}

impl Packing {
    pub fn new(n: usize) -> Self {
        Packing { n, elements: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn covered(&self) -> VertexSet {
        self.elements.iter().fold(VertexSet::EMPTY, |acc, e| acc.union(e.vertex_set()))
    }

    pub fn is_perfect(&self) -> bool {
        self.covered() == VertexSet::full(self.n)
    }

    /// Elements whose pattern has the same arc set as `pattern`.
    pub fn count_of(&self, pattern: &Pattern) -> usize {
        self.elements.iter().filter(|e| e.pattern.same_digraph(pattern)).count()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveOutcome {
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub packing: Option<Packing>,
    pub nodes: u64,
    #[serde(rename = "time", serialize_with = "as_seconds")]
    pub elapsed: Duration,
}

impl SolveOutcome {
    pub fn found(&self) -> bool {
        self.verdict == Verdict::Found
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MaxPackingOutcome {
    pub packing: Packing,
    /// True when the search finished, so the packing is maximum.
    pub exact: bool,
    pub nodes: u64,
    #[serde(rename = "time", serialize_with = "as_seconds")]
    pub elapsed: Duration,
}

pub(crate) fn as_seconds<S: Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

/// Result of a search over an explicit set system.
#[derive(Clone, Debug)]
pub struct CoverOutcome {
    pub verdict: Verdict,
    pub sets: Option<Vec<VertexSet>>,
    pub nodes: u64,
}

struct Search {
    ground: u64,
    r: usize,
    by_low: Vec<Vec<u64>>,
    by_vertex: Vec<Vec<u64>>,
    budget: u64,
    nodes: u64,
    aborted: bool,
    stack: Vec<u64>,
    best: Vec<u64>,
}

impl Search {
    fn new(ground: VertexSet, candidates: &[VertexSet], r: usize, budget: u64) -> Self {
        let mut by_low = vec![Vec::new(); 64];
        let mut by_vertex = vec![Vec::new(); 64];
        let mut sorted: Vec<u64> =
            candidates.iter().filter(|c| c.len() == r && c.is_subset(ground)).map(|c| c.bits()).collect();
        sorted.sort_unstable();
        sorted.dedup();
        for c in sorted {
            by_low[c.trailing_zeros() as usize].push(c);
            for v in VertexSet(c) {
                by_vertex[v].push(c);
            }
        }
        Search {
            ground: ground.bits(),
            r,
            by_low,
            by_vertex,
            budget,
            nodes: 0,
            aborted: false,
            stack: Vec::new(),
            best: Vec::new(),
        }
    }

    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.aborted = true;
        }
        !self.aborted
    }

    fn has_available(&self, v: usize, decided: u64) -> bool {
        self.by_vertex[v].iter().any(|&c| c & decided == 0)
    }

    fn perfect(&mut self, covered: u64) -> bool {
        if !self.tick() {
            return false;
        }
        let uncovered = self.ground & !covered;
        if uncovered == 0 {
            return true;
        }
        if VertexSet(uncovered).iter().any(|v| !self.has_available(v, covered)) {
            return false;
        }
        let u = uncovered.trailing_zeros() as usize;
        for i in 0..self.by_low[u].len() {
            let c = self.by_low[u][i];
            if c & covered != 0 {
                continue;
            }
            self.stack.push(c);
            if self.perfect(covered | c) {
                return true;
            }
            self.stack.pop();
            if self.aborted {
                return false;
            }
        }
        false
    }

    /// `decided` holds covered vertices and vertices chosen to stay uncovered.
    fn maximum(&mut self, decided: u64) {
        if !self.tick() {
            return;
        }
        if self.stack.len() > self.best.len() {
            self.best = self.stack.clone();
        }
        let open = self.ground & !decided;
        let coverable: u64 =
            VertexSet(open).iter().filter(|&v| self.has_available(v, decided)).fold(0, |m, v| m | 1 << v);
        if self.stack.len() + coverable.count_ones() as usize / self.r <= self.best.len() {
            return;
        }
        let decided = decided | (open & !coverable);
        let u = coverable.trailing_zeros() as usize;
        for i in 0..self.by_low[u].len() {
            let c = self.by_low[u][i];
            if c & decided != 0 {
                continue;
            }
            self.stack.push(c);
            self.maximum(decided | c);
            self.stack.pop();
            if self.aborted {
                return;
            }
        }
        self.maximum(decided | 1 << u);
    }
}

/// Partition `ground` into members of `candidates` (all of size `r`).
pub fn perfect_set_cover(ground: VertexSet, candidates: &[VertexSet], r: usize, budget: u64) -> Result<CoverOutcome> {
    if r == 0 || !ground.len().is_multiple_of(r) {
        return Err(Error::domain(format!("{} vertices cannot be split into {r}-sets", ground.len())));
    }
    let mut s = Search::new(ground, candidates, r, budget);
    let ok = s.perfect(0);
    let verdict = if ok {
        Verdict::Found
    } else if s.aborted {
        Verdict::BudgetExceeded
    } else {
        Verdict::ExhaustedNone
    };
    let sets = ok.then(|| s.stack.iter().map(|&c| VertexSet(c)).collect());
    Ok(CoverOutcome { verdict, sets, nodes: s.nodes })
}

/// Maximum number of pairwise disjoint members of `candidates` inside
/// `ground`. Returns the sets, whether the search completed, and the node count.
pub fn maximum_set_packing(
    ground: VertexSet,
    candidates: &[VertexSet],
    r: usize,
    budget: u64,
) -> (Vec<VertexSet>, bool, u64) {
    if r == 0 {
        return (Vec::new(), true, 0);
    }
    let mut s = Search::new(ground, candidates, r, budget);
    s.maximum(0);
    (s.best.iter().map(|&c| VertexSet(c)).collect(), !s.aborted, s.nodes)
}

/// Family candidates: each spanning `r`-set once, tagged with the first
/// family member (in the given order) it spans.
fn family_candidates(g: &Digraph, family: &[Pattern], ground: VertexSet) -> Result<(usize, Vec<VertexSet>)> {
    let r = match family.first() {
        Some(p) => p.order(),
        None => return Err(Error::domain("empty pattern family")),
    };
    if family.iter().any(|p| p.order() != r) {
        return Err(Error::domain("family members have different orders"));
    }
    let mut all: Vec<VertexSet> = family.iter().flat_map(|p| spanning_sets(g, p, ground)).collect();
    all.sort_unstable();
    all.dedup();
    Ok((r, all))
}

fn embed_sets(g: &Digraph, family: &[Pattern], sets: &[VertexSet]) -> Result<Packing> {
    let mut packing = Packing::new(g.order());
    for &set in sets {
        let (pattern, image) = family
            .iter()
            .find_map(|p| find_embedding(g, p, set).map(|img| (p.clone(), img)))
            .ok_or_else(|| Error::InvariantViolation(format!("candidate {set:?} spans no family member")))?;
        packing.elements.push(Embedding { pattern, image });
    }
    Ok(packing)
}

/// Perfect packing of `G[ground]` by members of `family`.
pub fn find_perfect_family_packing_within(
    g: &Digraph,
    family: &[Pattern],
    ground: VertexSet,
    budget: u64,
) -> Result<SolveOutcome> {
    let start = Instant::now();
    let (r, candidates) = family_candidates(g, family, ground)?;
    if !ground.len().is_multiple_of(r) {
        return Err(Error::domain(format!("pattern order {r} does not divide {}", ground.len())));
    }
    let out = perfect_set_cover(ground, &candidates, r, budget)?;
    let packing = match &out.sets {
        Some(sets) => Some(embed_sets(g, family, sets)?),
        None => None,
    };
    Ok(SolveOutcome { verdict: out.verdict, packing, nodes: out.nodes, elapsed: start.elapsed() })
}

pub fn find_perfect_family_packing(g: &Digraph, family: &[Pattern], budget: u64) -> Result<SolveOutcome> {
    find_perfect_family_packing_within(g, family, g.vertices(), budget)
}

pub fn find_perfect_packing(g: &Digraph, pattern: &Pattern, budget: u64) -> Result<SolveOutcome> {
    find_perfect_family_packing(g, std::slice::from_ref(pattern), budget)
}

pub fn find_perfect_packing_within(
    g: &Digraph,
    pattern: &Pattern,
    ground: VertexSet,
    budget: u64,
) -> Result<SolveOutcome> {
    find_perfect_family_packing_within(g, std::slice::from_ref(pattern), ground, budget)
}

/// Maximum-cardinality packing; `exact` is false if the budget ran out.
pub fn find_max_packing(g: &Digraph, pattern: &Pattern, budget: u64) -> Result<MaxPackingOutcome> {
    let start = Instant::now();
    let family = std::slice::from_ref(pattern);
    let candidates = spanning_sets(g, pattern, g.vertices());
    let (sets, exact, nodes) = maximum_set_packing(g.vertices(), &candidates, pattern.order(), budget);
    let packing = embed_sets(g, family, &sets)?;
    Ok(MaxPackingOutcome { packing, exact, nodes, elapsed: start.elapsed() })
}

/// Elements pairwise disjoint, each a valid embedding of some member of
/// `family`, and covering `V(G)` when `perfect` is requested.
pub fn verify_packing(g: &Digraph, family: &[Pattern], packing: &Packing, perfect: bool) -> bool {
    if packing.n != g.order() {
        return false;
    }
    let mut seen = VertexSet::EMPTY;
    for e in &packing.elements {
        if !family.iter().any(|p| p.same_digraph(&e.pattern)) || !e.is_valid_in(g) {
            return false;
        }
        let vs = e.vertex_set();
        if !vs.is_disjoint(seen) {
            return false;
        }
        seen = seen.union(vs);
    }
    !perfect || seen == g.vertices()
}
