//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line; the process exits non-zero
//! if any criterion fails or overruns its time limit.

mod common;

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tpack::absorb::{absorb, build_absorbing_family, count_connectors, sample_subset, AbsorberConfig};
use tpack::complex::{
    build_complex, check_km_hypothesis, matching_to_packing, packing_to_matching, top_layer_matching, MatchingMode,
};
use tpack::constructions::{
    make_ex, make_k3minus_example, make_near_independent_extremal, make_source_counterexample, near_independent_set,
    random_digraph, random_digraph_cond_4_1, random_digraph_min_semidegree,
};
use tpack::extremal::{extremal_c3_pack, ExtremalConfig};
use tpack::harness::{sweep_semidegree, sweep_total_degree_kr, sweep_wang, SweepMode};
use tpack::matching::{
    d_matching_covering, is_matching, matching_or_certificate, matching_or_certificate_digraph, validate_certificate,
    validate_certificate_digraph, MatchCertificate, UGraph,
};
use tpack::pattern::all_tournaments;
use tpack::solver::{find_max_packing, find_perfect_packing, verify_packing, DEFAULT_BUDGET};
use tpack::t3::t3_pack;
use tpack::turan::count_copies;
use tpack::vset::binomial;
use tpack::{spans_copy, Digraph, Error, Pattern, Tournament, Verdict, VertexSet};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e(err: Error) -> String {
    err.to_string()
}

fn t3() -> Pattern {
    Tournament::transitive(3).unwrap().into_pattern()
}

fn c3() -> Pattern {
    Tournament::cyclic_triangle().into_pattern()
}

fn criterion_1() -> Check {
    for n in [9, 15, 21] {
        let (g, _) = make_ex(n, 1).map_err(e)?;
        let d = g.min_semidegree().map_err(e)?;
        ensure(d == 2 * n / 3 - 2, || format!("Ex_1({n}) has δ^0 = {d}"))?;
    }
    for (r, n) in [(3, 6), (3, 9), (4, 8)] {
        let g = make_near_independent_extremal(n, r).map_err(e)?;
        let d = g.min_semidegree().map_err(e)?;
        ensure(d == (r - 1) * n / r - 1, || format!("G'({n},{r}) has δ^0 = {d}"))?;
    }
    let k = make_k3minus_example(6).map_err(e)?;
    let n = k.order();
    let d = k.min_semidegree().map_err(e)?;
    ensure(4 * d == 3 * n - 5, || format!("K3-minus example (n = {n}) has δ^0 = {d}"))?;
    Ok("Ex_1 at 9/15/21, G' at (3,6)/(3,9)/(4,8), K3-minus at m = 6".into())
}

fn no_packing(name: &str, g: &Digraph, p: &Pattern) -> Result<Duration, String> {
    let start = Instant::now();
    let out = find_perfect_packing(g, p, DEFAULT_BUDGET).map_err(e)?;
    let took = start.elapsed();
    ensure(out.verdict == Verdict::ExhaustedNone, || format!("{name}: verdict {:?}", out.verdict))?;
    ensure(took < Duration::from_secs(60), || format!("{name}: {took:?} over 60 s"))?;
    Ok(took)
}

fn criterion_2() -> Check {
    let mut slowest = Duration::ZERO;
    let (ex1, _) = make_ex(9, 1).map_err(e)?;
    slowest = slowest.max(no_packing("Ex_1(9) / C3", &ex1, &c3())?);
    let gp = make_near_independent_extremal(6, 3).map_err(e)?;
    slowest = slowest.max(no_packing("G'(6,3) / T3", &gp, &t3())?);
    slowest = slowest.max(no_packing("G'(6,3) / C3", &gp, &c3())?);
    let src = make_source_counterexample(6).map_err(e)?;
    slowest = slowest.max(no_packing("source(6) / C3", &src, &c3())?);
    let k = make_k3minus_example(6).map_err(e)?;
    slowest = slowest.max(no_packing("K3-minus(6)", &k, &Pattern::complete_minus(3).map_err(e)?)?);
    Ok(format!("5 non-existence proofs, slowest {:.2}s", slowest.as_secs_f64()))
}

fn criterion_3() -> Check {
    let report = sweep_semidegree(3, "t3", 6, SweepMode::Exhaustive, 0, 0).map_err(e)?;
    ensure(report.examined == tpack::harness::SEMIDEGREE_6_4_COUNT, || format!("examined {}", report.examined))?;
    ensure(report.counterexamples.is_empty() && report.budget_exceeded == 0, || {
        format!("{} counterexamples", report.counterexamples.len())
    })?;
    let mut swaps = 0;
    for n in [6, 9, 12] {
        for i in 0..1000u64 {
            let seed = (n as u64) << 32 | i;
            let g = random_digraph_cond_4_1(n, seed).map_err(e)?;
            let out = t3_pack(&g).map_err(|err| format!("n = {n}, seed {seed}: {err}"))?;
            swaps += out.trace.steps.len();
            ensure(verify_packing(&g, &[t3()], &out.packing, true), || {
                format!("n = {n}, seed {seed}: invalid packing")
            })?;
            if n <= 9 {
                let exact = find_perfect_packing(&g, &t3(), DEFAULT_BUDGET).map_err(e)?;
                ensure(exact.verdict == Verdict::Found, || {
                    format!("n = {n}, seed {seed}: solver says {:?}", exact.verdict)
                })?;
            }
        }
    }
    Ok(format!("exhaustive 6600 clean; 3000 random instances packed ({swaps} swaps)"))
}

fn criterion_4() -> Check {
    let mut paths = Vec::new();
    for n in [9, 15] {
        let (g, _) = make_ex(n, 0).map_err(e)?;
        let exact = find_perfect_packing(&g, &c3(), DEFAULT_BUDGET).map_err(e)?;
        ensure(exact.verdict == Verdict::Found, || format!("solver finds no C3-packing of Ex({n})"))?;
        match extremal_c3_pack(&g, &ExtremalConfig::new(0.05)) {
            Ok(out) => {
                ensure(verify_packing(&g, &[c3()], &out.packing, true), || format!("Ex({n}): invalid packing"))?;
                paths.push(format!("Ex({n}) staged"));
            }
            Err(Error::StageFailed { stage, .. }) => paths.push(format!("Ex({n}) {stage} failed, solver fallback")),
            Err(other) => return Err(format!("Ex({n}): {other}")),
        }
    }
    Ok(paths.join(", "))
}

fn criterion_5() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..500 {
        let n = rng.gen_range(3..=7);
        let p = rng.gen_range(0.2..0.95);
        let g = random_digraph(n, p, rng.gen()).map_err(e)?;
        let pattern = if i % 2 == 0 { t3() } else { c3() };
        let max = find_max_packing(&g, &pattern, DEFAULT_BUDGET).map_err(e)?;
        let brute = common::brute_max_packing(&g, &pattern);
        ensure(max.exact && max.packing.len() == brute, || {
            format!("instance {i}: solver {} vs brute force {brute}", max.packing.len())
        })?;
        ensure(verify_packing(&g, std::slice::from_ref(&pattern), &max.packing, false), || {
            format!("instance {i}: invalid")
        })?;
        ensure(count_copies(&g, &pattern) == common::naive_count(&g, &pattern), || format!("instance {i}: count"))?;
        let all: Vec<usize> = (0..n).collect();
        for set in common::k_subsets(&all, 3) {
            let vs: VertexSet = set.iter().collect();
            let fast = spans_copy(&g, vs, &pattern).map_err(e)?.is_some();
            ensure(fast == common::naive_spans(&g, &set, &pattern), || format!("instance {i}: spans {set:?}"))?;
        }
    }
    Ok("500 instances agree with brute force".into())
}

fn criterion_6() -> Check {
    let t = t3();
    let delta = ((1.0 - 1.0 / 3.0 - 0.05) * 12.0f64).ceil() as usize;
    for seed in 0..200 {
        let g = random_digraph_min_semidegree(12, delta, seed).map_err(e)?;
        let j = build_complex(&g, &t);
        let km = check_km_hypothesis(&j, 0.15);
        ensure(km.holds, || format!("seed {seed}: layer {:?} fails ({:?})", km.failing_layer, km.degrees))?;
        ensure(j.is_downward_closed(), || format!("seed {seed}: not downward closed"))?;
        let m = top_layer_matching(&j, MatchingMode::Greedy, 0);
        let packing = matching_to_packing(&g, &t, &m.edges).map_err(e)?;
        ensure(verify_packing(&g, std::slice::from_ref(&t), &packing, false), || {
            format!("seed {seed}: invalid packing")
        })?;
        ensure(packing_to_matching(&packing) == m.edges, || format!("seed {seed}: round trip differs"))?;
    }
    Ok(format!("200 hosts with δ^0 >= {delta}"))
}

fn criterion_7() -> Check {
    let mut cases = 0;
    for r in 3..=5 {
        for n in r + 1..=12 {
            let g = Digraph::complete(n).map_err(e)?;
            for t in all_tournaments(r).map_err(e)? {
                let c = count_connectors(&g, t.pattern(), 0, 1, u64::MAX).map_err(e)?;
                let want = binomial(n - 2, r - 1) as u64;
                ensure(c.count == want, || format!("K_{n}, {}: {} != {want}", t.name(), c.count))?;
                cases += 1;
            }
        }
    }
    let gp = make_near_independent_extremal(6, 3).map_err(e)?;
    let (x, y) = {
        let s = near_independent_set(6, 3).to_vec();
        (s[0], s[1])
    };
    ensure(!gp.has_arc(x, y) && !gp.has_arc(y, x), || "x, y not independent".into())?;
    let fast = count_connectors(&gp, &t3(), x, y, u64::MAX).map_err(e)?.count;
    let rest: Vec<usize> = (0..6).filter(|&v| v != x && v != y).collect();
    let brute = common::k_subsets(&rest, 2)
        .into_iter()
        .filter(|s| {
            let with = |v: usize| [s[0], s[1], v];
            common::naive_spans(&gp, &with(x), &t3()) && common::naive_spans(&gp, &with(y), &t3())
        })
        .count() as u64;
    ensure(fast == 3 && brute == 3, || format!("G'(6,3): fast {fast}, brute {brute}"))?;
    Ok(format!("{cases} complete-digraph counts exact; G'(6,3) count 3"))
}

fn criterion_8() -> Check {
    let g = Digraph::complete(60).map_err(e)?;
    let xi = 0.3;
    let config = AbsorberConfig { absorber_size: Some(6), ..AbsorberConfig::new(xi, 8) };
    let family = build_absorbing_family(&g, &c3(), &config).map_err(e)?;
    ensure(family.check_invariants(&g, xi).map_err(e)?, || "family invariants fail".into())?;
    let pool = g.vertices().difference(family.union);
    for i in 0..20u64 {
        let k = [3, 6, 9][i as usize % 3];
        let w = sample_subset(pool, k, 100 + i).map_err(e)?;
        let packing = absorb(&g, &family, w).map_err(|err| format!("W #{i} (|W| = {k}): {err}"))?;
        ensure(verify_packing(&g, &[c3()], &packing, false), || format!("W #{i}: invalid packing"))?;
        ensure(packing.covered() == family.union.union(w), || format!("W #{i}: wrong coverage"))?;
    }
    Ok(format!("{} absorbers, |M| = {}, 20 W's absorbed", family.absorbers.len(), family.union.len()))
}

fn criterion_9() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut cross_checked = 0;
    for i in 0..1000 {
        let n = rng.gen_range(2..=12);
        let d = rng.gen_range(1..=n / 2);
        let g = common::random_ugraph_min_degree(n, d, &mut rng);
        let x = common::random_subset(n, d, &mut rng);
        let m = d_matching_covering(&g, d, x).map_err(|err| format!("instance {i}: {err}"))?;
        let covered = m.edges.iter().fold(VertexSet::EMPTY, |acc, &(u, v)| acc.with(u).with(v));
        ensure(m.edges.len() == d && is_matching(&g, &m.edges) && x.is_subset(covered), || {
            format!("instance {i}: bad covering matching")
        })?;
        if n <= 8 {
            ensure(common::brute_covering_matching_exists(&g, d, x), || format!("instance {i}: oracle disagrees"))?;
            cross_checked += 1;
        }
    }
    let mut kinds = [0usize; 3];
    let mut tally = |cert: &MatchCertificate| match cert {
        MatchCertificate::PerfectMatching { .. } => kinds[0] += 1,
        MatchCertificate::IndependentSet { .. } => kinds[1] += 1,
        MatchCertificate::ClosePartition { .. } => kinds[2] += 1,
    };
    for i in 0..1000 {
        let n = 2 * rng.gen_range(2..=8);
        let gamma = [0.0, 0.05, 0.1, 1.0 / 6.0, 0.25][i % 5];
        let need = ((0.5 - gamma) * n as f64 - 1e-9).ceil().max(0.0) as usize;
        let g = structured_or_random(n, need, &mut rng);
        let cert = matching_or_certificate(&g, gamma).map_err(|err| format!("graph {i}: {err}"))?;
        ensure(validate_certificate(&g, &cert), || format!("graph {i}: certificate {cert:?} invalid"))?;
        tally(&cert);
        let dg = orient_by_sides(&g, &mut rng);
        let dcert = matching_or_certificate_digraph(&dg, gamma).map_err(|err| format!("digraph {i}: {err}"))?;
        ensure(validate_certificate_digraph(&dg, &dcert), || format!("digraph {i}: certificate invalid"))?;
    }
    let triangles = UGraph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).map_err(e)?;
    let cert = matching_or_certificate(&triangles, 1.0 / 6.0).map_err(e)?;
    ensure(matches!(cert, MatchCertificate::ClosePartition { cross: 0, .. }), || format!("two triangles: {cert:?}"))?;
    Ok(format!(
        "1000 coverings ({cross_checked} brute-forced); certificates matching/independent/close = {}/{}/{}",
        kinds[0], kinds[1], kinds[2]
    ))
}

/// Each vertex picks "out" or "in" and every edge gets the arcs its
/// endpoints ask for, so each vertex keeps its full degree on its side.
fn orient_by_sides(g: &UGraph, rng: &mut ChaCha8Rng) -> Digraph {
    let out_side: Vec<bool> = (0..g.order()).map(|_| rng.gen_bool(0.5)).collect();
    let mut arcs = Vec::new();
    for (u, v) in g.edges() {
        if out_side[u] || !out_side[v] {
            arcs.push((u, v));
        }
        if !out_side[u] || out_side[v] {
            arcs.push((v, u));
        }
    }
    Digraph::from_arcs(g.order(), arcs).unwrap()
}

/// Mixes random graphs with two near-extremal shapes (two cliques, a
/// complete bipartite graph) so that every certificate kind occurs.
fn structured_or_random(n: usize, need: usize, rng: &mut ChaCha8Rng) -> UGraph {
    let half = n / 2;
    let mut g = match rng.gen_range(0..3) {
        0 => UGraph::from_edges(
            n,
            (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).filter(|&(u, v)| (u < half) == (v < half)),
        )
        .unwrap(),
        1 => UGraph::from_edges(n, (0..half).flat_map(|u| (half..n).map(move |v| (u, v)))).unwrap(),
        _ => return common::random_ugraph_min_degree(n, need, rng),
    };
    for v in 0..n {
        while g.degree(v) < need {
            let w = rng.gen_range(0..n);
            if w != v && !g.has_edge(v, w) {
                g.add_edge(v, w).unwrap();
            }
        }
    }
    g
}

fn criterion_10() -> Check {
    let mut runs = Vec::new();
    for n in [6, 9] {
        let report = sweep_total_degree_kr(3, n, 200, 12).map_err(e)?;
        runs.push(report);
    }
    for n in [6, 9] {
        runs.push(sweep_wang(n, 200, 122).map_err(e)?);
    }
    for r in &runs {
        ensure(r.examined == 200 && r.counterexamples.is_empty() && r.budget_exceeded == 0, || {
            format!("{:?} at n = {}: {} counterexamples", r.params.statement, r.params.n, r.counterexamples.len())
        })?;
    }
    Ok("K3 total degree at n = 6, 9 and C3 at n = 6, 9: 800 instances, no counterexamples".into())
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn() -> Check,
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "extremal degree values", limit: Duration::from_secs(1), run: criterion_1 },
        Criterion { id: 2, name: "tightness by exhaustive search", limit: Duration::from_secs(300), run: criterion_2 },
        Criterion {
            id: 3,
            name: "T3-packings under the out-or-in-degree condition",
            limit: Duration::from_secs(600),
            run: criterion_3,
        },
        Criterion { id: 4, name: "C3-packings of Ex(n)", limit: Duration::from_secs(60), run: criterion_4 },
        Criterion { id: 5, name: "oracle equivalence", limit: Duration::from_secs(300), run: criterion_5 },
        Criterion { id: 6, name: "complex properties", limit: Duration::from_secs(120), run: criterion_6 },
        Criterion { id: 7, name: "connector counting", limit: Duration::from_secs(60), run: criterion_7 },
        Criterion { id: 8, name: "absorbing behaviour", limit: Duration::from_secs(300), run: criterion_8 },
        Criterion { id: 9, name: "matching certificates", limit: Duration::from_secs(300), run: criterion_9 },
        Criterion { id: 10, name: "total-degree thresholds", limit: Duration::from_secs(300), run: criterion_10 },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let result = (c.run)();
        let took = start.elapsed();
        let (ok, detail) = match result {
            Ok(detail) if took <= c.limit => (true, detail),
            Ok(detail) => (false, format!("{detail}; over the {}s limit", c.limit.as_secs())),
            Err(msg) => (false, msg),
        };
        failed += usize::from(!ok);
        println!(
            "criterion {:>2} {} {} ({:.2}s, limit {}s): {}",
            c.id,
            if ok { "PASS" } else { "FAIL" },
            c.name,
            took.as_secs_f64(),
            c.limit.as_secs(),
            detail
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
