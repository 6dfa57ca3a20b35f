//! Threshold sweeps, tightness checks and report persistence.
//!
//! A sweep generates instances (exhaustively or from seeded generators),
//! solves each one with the exact solver (or the `T_3` swap algorithm where
//! it applies), re-verifies every failure on a relabelled copy, and
//! assembles a [`SweepReport`]. Instances are generated from per-index
//! seeds and merged in index order, so a report depends only on its
//! parameters.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Serialize;

use crate::constructions::{
    make_ex, make_k3minus_example, make_near_independent_extremal, make_source_counterexample,
    make_total_degree_extremal, random_digraph_disjunctive, random_digraph_min_semidegree,
    random_digraph_min_total_degree,
};
use crate::digraph::{Digraph, DigraphBuilder, Vertex};
use crate::error::{Error, Result};
use crate::pattern::{all_tournaments, pattern_by_name, Pattern, Tournament};
use crate::rng::{derive_seed, seeded};
use crate::solver::{
    as_seconds, find_perfect_family_packing, find_perfect_packing, verify_packing, Verdict, DEFAULT_BUDGET,
};
use crate::t3::t3_pack;
use crate::vset::{subsets_of_size, VertexSet};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Upper bound on the instances an exhaustive request may enumerate.
pub const EXHAUSTIVE_LIMIT: usize = 5_000_000;

/// Digraphs on 6 vertices with `δ^0 >= 4`, i.e. loopless partial injections
/// on six points read as missing-arc sets.
pub const SEMIDEGREE_6_4_COUNT: usize = 6600;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    Exhaustive,
    Random,
}

/// The degree condition a sweep samples from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Statement {
    /// `δ^0 >= (1 - 1/r) n`, packing a given `r`-tournament.
    Semidegree,
    /// `d^+ >= (1 - 1/r) n` or `d^- >= (1 - 1/r) n` at every vertex, packing `T_r`.
    Conjecture14,
    /// `δ >= (2 - 1/r) n - 1`, packing the complete digraph `K_r`.
    TotalDegreeKr,
    /// `δ >= (3n - 3)/2`, packing `C_3`.
    Wang,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Label {
    #[serde(rename = "consistent with theorem")]
    ConsistentWithTheorem,
    #[serde(rename = "below theorem's range")]
    BelowTheoremRange,
    #[serde(rename = "counterexample (below n0)")]
    CounterexampleBelowN0,
    #[serde(rename = "counterexample")]
    Counterexample,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepParams {
    pub statement: Statement,
    pub r: usize,
    pub pattern: String,
    pub n: usize,
    pub threshold: usize,
    pub mode: SweepMode,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub index: usize,
    pub edge_list: String,
    pub verdict: Verdict,
    pub nodes: u64,
    /// A second solver run on a randomly relabelled copy also found nothing.
    pub reverified: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub schema_version: u32,
    pub params: SweepParams,
    pub examined: usize,
    pub packed: usize,
    pub budget_exceeded: usize,
    /// Instances where the `T_3` swap algorithm gave up and the exact solver decided.
    pub fast_path_fallbacks: usize,
    pub counterexamples: Vec<Counterexample>,
    pub label: Label,
    #[serde(serialize_with = "as_seconds")]
    pub wall_time: Duration,
}

impl SweepReport {
    pub fn has_counterexample(&self) -> bool {
        !self.counterexamples.is_empty()
    }

    /// JSON without the wall time; equal for equal parameters.
    pub fn canonical_json(&self) -> String {
        let mut value = serde_json::to_value(self).expect("report serializes");
        if let Some(map) = value.as_object_mut() {
            map.remove("wall_time");
        }
        serde_json::to_string_pretty(&value).expect("value serializes")
    }

    /// Writes the report to `out` and each counterexample next to it as
    /// `<stem>.cex-<index>.txt`; returns the counterexample paths.
    pub fn write(&self, out: &Path) -> Result<Vec<PathBuf>> {
        let json = serde_json::to_string_pretty(self).expect("report serializes");
        fs::write(out, json)?;
        let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("report");
        let dir = out.parent().unwrap_or(Path::new("."));
        let mut paths = Vec::new();
        for cex in &self.counterexamples {
            let path = dir.join(format!("{stem}.cex-{}.txt", cex.index));
            fs::write(&path, &cex.edge_list)?;
            paths.push(path);
        }
        Ok(paths)
    }
}

/// Loads a persisted counterexample and re-solves it.
pub fn replay_counterexample(path: impl AsRef<Path>, pattern: &Pattern) -> Result<Verdict> {
    let g = Digraph::load(path)?;
    Ok(find_perfect_packing(&g, pattern, DEFAULT_BUDGET)?.verdict)
}

enum Outcome {
    Packed { fallback: bool },
    Budget,
    Failed { verdict: Verdict, nodes: u64, g: Digraph, fallback: bool },
}

struct Sweep {
    params: SweepParams,
    pattern: Pattern,
    t3_fast_path: bool,
    all_n: bool,
}

impl Sweep {
    fn solve(&self, g: &Digraph) -> Result<Outcome> {
        let mut fallback = false;
        if self.t3_fast_path {
            match t3_pack(g) {
                Ok(out) if verify_packing(g, std::slice::from_ref(&self.pattern), &out.packing, true) => {
                    return Ok(Outcome::Packed { fallback });
                }
                _ => fallback = true,
            }
        }
        let out = find_perfect_packing(g, &self.pattern, DEFAULT_BUDGET)?;
        Ok(match out.verdict {
            Verdict::Found => Outcome::Packed { fallback },
            Verdict::BudgetExceeded => Outcome::Budget,
            Verdict::ExhaustedNone => {
                Outcome::Failed { verdict: out.verdict, nodes: out.nodes, g: g.clone(), fallback }
            }
        })
    }

    fn reverify(&self, g: &Digraph, index: usize) -> Result<bool> {
        let mut perm: Vec<Vertex> = (0..g.order()).collect();
        perm.shuffle(&mut seeded(derive_seed(self.params.seed ^ 0x5eed_cafe, index as u64)));
        let h = g.permuted(&perm)?;
        Ok(find_perfect_packing(&h, &self.pattern, DEFAULT_BUDGET)?.verdict == Verdict::ExhaustedNone)
    }

    fn run(&self, count: usize, instance: impl Fn(usize) -> Result<Digraph> + Sync) -> Result<SweepReport> {
        let start = Instant::now();
        let outcomes: Vec<Outcome> =
            (0..count).into_par_iter().map(|i| instance(i).and_then(|g| self.solve(&g))).collect::<Result<_>>()?;
        let mut report = SweepReport {
            schema_version: REPORT_SCHEMA_VERSION,
            params: self.params.clone(),
            examined: outcomes.len(),
            packed: 0,
            budget_exceeded: 0,
            fast_path_fallbacks: 0,
            counterexamples: Vec::new(),
            label: Label::ConsistentWithTheorem,
            wall_time: Duration::ZERO,
        };
        for (index, outcome) in outcomes.into_iter().enumerate() {
            match outcome {
                Outcome::Packed { fallback } => {
                    report.packed += 1;
                    report.fast_path_fallbacks += usize::from(fallback);
                }
                Outcome::Budget => report.budget_exceeded += 1,
                Outcome::Failed { verdict, nodes, g, fallback } => {
                    report.fast_path_fallbacks += usize::from(fallback);
                    let reverified = self.reverify(&g, index)?;
                    report.counterexamples.push(Counterexample {
                        index,
                        edge_list: g.to_edge_list(),
                        verdict,
                        nodes,
                        reverified,
                    });
                }
            }
        }
        report.label = match (report.has_counterexample(), self.all_n) {
            (false, true) => Label::ConsistentWithTheorem,
            (false, false) => Label::BelowTheoremRange,
            (true, true) => Label::Counterexample,
            (true, false) => Label::CounterexampleBelowN0,
        };
        report.wall_time = start.elapsed();
        Ok(report)
    }
}

fn check_divides(r: usize, n: usize) -> Result<()> {
    if r < 2 || n == 0 || !n.is_multiple_of(r) {
        return Err(Error::domain(format!("need r >= 2 and r | n (r = {r}, n = {n})")));
    }
    Ok(())
}

/// `ceil((1 - 1/r) n)`.
pub fn semidegree_threshold(r: usize, n: usize) -> usize {
    ((r - 1) * n).div_ceil(r)
}

/// `ceil((2 - 1/r) n) - 1`.
pub fn total_degree_kr_threshold(r: usize, n: usize) -> usize {
    ((2 * r - 1) * n).div_ceil(r) - 1
}

/// `ceil((3n - 3)/2)`.
pub fn wang_threshold(n: usize) -> usize {
    (3 * n).saturating_sub(3).div_ceil(2)
}

/// Every digraph on `n` vertices whose complement has maximum out- and
/// indegree at most `n - 1 - threshold`, for deficiency 0 or 1.
pub fn enumerate_min_semidegree(n: usize, threshold: usize) -> Result<Vec<Digraph>> {
    if n == 0 || threshold > n - 1 {
        return Err(Error::domain(format!("threshold {threshold} infeasible on {n} vertices")));
    }
    let deficiency = n - 1 - threshold;
    if deficiency > 1 {
        return Err(Error::Refused(format!(
            "exhaustive mode enumerates missing-arc complements and needs n - 1 - threshold <= 1 (got {deficiency}); use random mode"
        )));
    }
    let complete = Digraph::complete(n)?;
    if deficiency == 0 {
        return Ok(vec![complete]);
    }
    let mut out = Vec::new();
    let mut image: Vec<Option<Vertex>> = vec![None; n];
    partial_injections(n, 0, VertexSet::EMPTY, &mut image, &mut |image| {
        if out.len() >= EXHAUSTIVE_LIMIT {
            return false;
        }
        let mut b = DigraphBuilder::from_digraph(&complete);
        for (u, v) in image.iter().enumerate() {
            if let Some(v) = *v {
                b.remove_arc(u, v);
            }
        }
        out.push(b.build());
        true
    });
    if out.len() >= EXHAUSTIVE_LIMIT {
        return Err(Error::Refused(format!("more than {EXHAUSTIVE_LIMIT} instances")));
    }
    Ok(out)
}

fn partial_injections(
    n: usize,
    u: usize,
    used: VertexSet,
    image: &mut Vec<Option<Vertex>>,
    emit: &mut dyn FnMut(&[Option<Vertex>]) -> bool,
) -> bool {
    if u == n {
        return emit(image);
    }
    image[u] = None;
    if !partial_injections(n, u + 1, used, image, emit) {
        return false;
    }
    for v in VertexSet::full(n).difference(used).without(u) {
        image[u] = Some(v);
        if !partial_injections(n, u + 1, used.with(v), image, emit) {
            return false;
        }
    }
    image[u] = None;
    true
}

/// Every arc-minimal witness of the disjunctive condition: each vertex picks
/// a side and exactly `threshold` neighbours on it. Any digraph meeting the
/// condition contains one of these, so packing them all settles the class.
pub fn enumerate_disjunctive_witnesses(n: usize, threshold: usize) -> Result<Vec<Digraph>> {
    if n == 0 || threshold > n - 1 {
        return Err(Error::domain(format!("threshold {threshold} infeasible on {n} vertices")));
    }
    let per_vertex = 2 * crate::vset::binomial(n - 1, threshold);
    let total = per_vertex.checked_pow(n as u32).unwrap_or(u128::MAX);
    if total > EXHAUSTIVE_LIMIT as u128 {
        return Err(Error::Refused(format!(
            "{total} side/neighbourhood choices exceed the exhaustive limit of {EXHAUSTIVE_LIMIT}; use random mode"
        )));
    }
    let choices: Vec<Vec<(bool, VertexSet)>> = (0..n)
        .map(|v| {
            let others = VertexSet::full(n).without(v);
            let sets: Vec<VertexSet> = subsets_of_size(others, threshold).collect();
            [true, false].iter().flat_map(|&out| sets.iter().map(move |&s| (out, s))).collect()
        })
        .collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut stack = vec![(0usize, Digraph::empty(n)?)];
    while let Some((v, g)) = stack.pop() {
        if v == n {
            if seen.insert(g.clone()) {
                out.push(g);
            }
            continue;
        }
        for &(is_out, s) in choices[v].iter().rev() {
            let mut b = DigraphBuilder::from_digraph(&g);
            for w in s {
                if is_out {
                    b.add_arc(v, w)?;
                } else {
                    b.add_arc(w, v)?;
                }
            }
            stack.push((v + 1, b.build()));
        }
    }
    Ok(out)
}

/// Random or exhaustive sweep over `δ^0 >= ceil((1 - 1/r) n)` for the
/// `r`-vertex tournament named `pattern`.
pub fn sweep_semidegree(
    r: usize,
    pattern: &str,
    n: usize,
    mode: SweepMode,
    samples: usize,
    seed: u64,
) -> Result<SweepReport> {
    check_divides(r, n)?;
    let t = pattern_by_name(pattern)?;
    if t.order() != r || !t.is_complete_underlying() || t.needs_double_edges() {
        return Err(Error::domain(format!("pattern {pattern} is not a tournament on {r} vertices")));
    }
    let threshold = semidegree_threshold(r, n);
    let all_n = r == 3 && t.same_digraph(Tournament::transitive(3)?.pattern());
    let sweep = Sweep {
        params: SweepParams {
            statement: Statement::Semidegree,
            r,
            pattern: pattern.to_string(),
            n,
            threshold,
            mode,
            samples,
            seed,
        },
        pattern: t,
        t3_fast_path: false,
        all_n,
    };
    match mode {
        SweepMode::Exhaustive => {
            let instances = enumerate_min_semidegree(n, threshold)?;
            sweep.run(instances.len(), |i| Ok(instances[i].clone()))
        }
        SweepMode::Random => {
            sweep.run(samples, |i| random_digraph_min_semidegree(n, threshold, derive_seed(seed, i as u64)))
        }
    }
}

/// Sweep over the per-vertex "outdegree or indegree at least
/// `(1 - 1/r) n`" condition for `T_r`; `r = 3` tries the swap algorithm first.
pub fn sweep_conjecture_1_4(r: usize, n: usize, mode: SweepMode, samples: usize, seed: u64) -> Result<SweepReport> {
    check_divides(r, n)?;
    let threshold = semidegree_threshold(r, n);
    let tr = Tournament::transitive(r)?;
    let sweep = Sweep {
        params: SweepParams {
            statement: Statement::Conjecture14,
            r,
            pattern: tr.name().to_string(),
            n,
            threshold,
            mode,
            samples,
            seed,
        },
        pattern: tr.into_pattern(),
        t3_fast_path: r == 3,
        all_n: r == 3,
    };
    match mode {
        SweepMode::Exhaustive => {
            let instances = enumerate_disjunctive_witnesses(n, threshold)?;
            sweep.run(instances.len(), |i| Ok(instances[i].clone()))
        }
        SweepMode::Random => {
            sweep.run(samples, |i| random_digraph_disjunctive(n, threshold, derive_seed(seed, i as u64)))
        }
    }
}

/// Sampled digraphs with `δ >= (2 - 1/r) n - 1`, packed with `K_r`. Only
/// double edges can host a `K_r`, so the solver runs on the double-edge
/// subdigraph.
pub fn sweep_total_degree_kr(r: usize, n: usize, samples: usize, seed: u64) -> Result<SweepReport> {
    check_divides(r, n)?;
    let threshold = total_degree_kr_threshold(r, n);
    let kr = Pattern::complete(r)?;
    let sweep = Sweep {
        params: SweepParams {
            statement: Statement::TotalDegreeKr,
            r,
            pattern: kr.name().to_string(),
            n,
            threshold,
            mode: SweepMode::Random,
            samples,
            seed,
        },
        pattern: kr,
        t3_fast_path: false,
        all_n: true,
    };
    sweep.run(samples, |i| {
        let g = random_digraph_min_total_degree(n, threshold, derive_seed(seed, i as u64))?;
        double_edge_subdigraph(&g)
    })
}

/// Arcs `uv` with `vu` also present.
pub fn double_edge_subdigraph(g: &Digraph) -> Result<Digraph> {
    Digraph::from_arcs(g.order(), g.arcs().filter(|&(u, v)| g.has_arc(v, u)))
}

/// Sampled digraphs with `δ >= ceil((3n - 3)/2)`, packed with `C_3`.
pub fn sweep_wang(n: usize, samples: usize, seed: u64) -> Result<SweepReport> {
    check_divides(3, n)?;
    let threshold = wang_threshold(n);
    let c3 = Tournament::cyclic_triangle();
    let sweep = Sweep {
        params: SweepParams {
            statement: Statement::Wang,
            r: 3,
            pattern: c3.name().to_string(),
            n,
            threshold,
            mode: SweepMode::Random,
            samples,
            seed,
        },
        pattern: c3.into_pattern(),
        t3_fast_path: false,
        all_n: true,
    };
    sweep.run(samples, |i| random_digraph_min_total_degree(n, threshold, derive_seed(seed, i as u64)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TightnessCheck {
    pub construction: String,
    pub property: String,
    pub expected: String,
    pub observed: String,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TightnessReport {
    pub r: usize,
    pub n: usize,
    pub checks: Vec<TightnessCheck>,
}

impl TightnessReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }
}

fn value_check(construction: &str, property: &str, expected: usize, observed: usize) -> TightnessCheck {
    TightnessCheck {
        construction: construction.into(),
        property: property.into(),
        expected: expected.to_string(),
        observed: observed.to_string(),
        holds: expected == observed,
    }
}

fn packing_check(construction: &str, g: &Digraph, family: &[Pattern], expect_packable: bool) -> Result<TightnessCheck> {
    let names: Vec<&str> = family.iter().map(Pattern::name).collect();
    let verdict = find_perfect_family_packing(g, family, DEFAULT_BUDGET)?.verdict;
    let wanted = if expect_packable { Verdict::Found } else { Verdict::ExhaustedNone };
    Ok(TightnessCheck {
        construction: construction.into(),
        property: format!("perfect {{{}}}-packing", names.join(",")),
        expected: serde_json::to_value(wanted).expect("verdict").as_str().unwrap_or_default().to_string(),
        observed: serde_json::to_value(verdict).expect("verdict").as_str().unwrap_or_default().to_string(),
        holds: verdict == wanted,
    })
}

/// Builds each extremal construction that exists at `(r, n)` and checks its
/// advertised degree values and packing non-existence with the exact solver.
pub fn tightness_suite(r: usize, n: usize) -> Result<TightnessReport> {
    check_divides(r, n)?;
    let mut checks = Vec::new();

    let gp = make_near_independent_extremal(n, r)?;
    checks.push(value_check("near-independent G'", "min semidegree", (r - 1) * n / r - 1, gp.min_semidegree()?));
    for t in all_tournaments(r)? {
        checks.push(packing_check("near-independent G'", &gp, std::slice::from_ref(t.pattern()), false)?);
    }

    let g1 = make_total_degree_extremal(n, r)?;
    checks.push(value_check("total-degree G1", "min total degree", (2 * r - 1) * n / r - 2, g1.total_min_degree()?));
    checks.push(packing_check("total-degree G1", &g1, &[Pattern::complete(r)?], false)?);

    if r == 3 {
        let c3 = Tournament::cyclic_triangle().into_pattern();
        let t3 = Tournament::transitive(3)?.into_pattern();
        let (ex1, _) = make_ex(n, 1)?;
        checks.push(value_check("Ex_1(n)", "min semidegree", 2 * n / 3 - 2, ex1.min_semidegree()?));
        checks.push(packing_check("Ex_1(n)", &ex1, std::slice::from_ref(&c3), false)?);
        checks.push(packing_check("Ex_1(n)", &ex1, &[t3, c3.clone()], true)?);

        let src = make_source_counterexample(n)?;
        checks.push(value_check("source counterexample", "min outdegree", n - 2, src.min_out_degree()?));
        checks.push(packing_check("source counterexample", &src, std::slice::from_ref(&c3), false)?);

        if n >= 3 && (n - 3).is_multiple_of(2) {
            let m = (n - 3) / 2;
            if m > 0 && m.is_multiple_of(6) {
                let k = make_k3minus_example(m)?;
                checks.push(value_check("K3-minus example", "min semidegree", (3 * n - 5) / 4, k.min_semidegree()?));
                checks.push(packing_check("K3-minus example", &k, &[Pattern::complete_minus(3)?], false)?);
            }
        }
    }
    Ok(TightnessReport { r, n, checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds() {
        assert_eq!(semidegree_threshold(3, 6), 4);
        assert_eq!(semidegree_threshold(4, 12), 9);
        assert_eq!(total_degree_kr_threshold(3, 6), 9);
        assert_eq!(wang_threshold(6), 8);
        assert_eq!(wang_threshold(9), 12);
    }

    #[test]
    fn exhaustive_count_is_frozen() {
        let all = enumerate_min_semidegree(6, 4).unwrap();
        assert_eq!(all.len(), SEMIDEGREE_6_4_COUNT);
        assert!(all.iter().all(|g| g.min_semidegree().unwrap() >= 4));
        assert_eq!(all.iter().collect::<HashSet<_>>().len(), all.len());
        assert!(matches!(enumerate_min_semidegree(9, 6), Err(Error::Refused(_))));
    }

    #[test]
    fn witnesses_meet_condition() {
        let all = enumerate_disjunctive_witnesses(4, 3).unwrap();
        assert!(all.iter().all(|g| g.vertices().iter().all(|v| g.out_degree(v) >= 3 || g.in_degree(v) >= 3)));
        assert!(enumerate_disjunctive_witnesses(12, 8).is_err());
    }

    #[test]
    fn small_random_sweep_is_deterministic() {
        let a = sweep_wang(6, 20, 5).unwrap();
        let b = sweep_wang(6, 20, 5).unwrap();
        assert_eq!(a.canonical_json(), b.canonical_json());
        assert_eq!(a.examined, 20);
        assert_eq!(a.packed + a.budget_exceeded + a.counterexamples.len(), a.examined);
        assert_eq!(a.label, Label::ConsistentWithTheorem);
    }

    #[test]
    fn tightness_at_three_six() {
        let report = tightness_suite(3, 6).unwrap();
        assert!(report.all_hold(), "{report:#?}");
    }
}
