//! Connectors and absorbing sets.
//!
//! A set `S` is `T`-absorbing for an `r`-set `Q` when both `G[S]` and
//! `G[S ∪ Q]` have perfect `T`-packings. [`build_absorbing_family`] samples
//! candidate sets, keeps the verified absorbers, drops overlaps and truncates
//! to `|M| <= ξ n`; [`absorb`] then swallows a leftover set `W`.

use rand::seq::{index, SliceRandom};
use rayon::prelude::*;
use serde::Serialize;

use crate::digraph::{Digraph, Vertex};
use crate::embed::{find_embedding, grow_cliques, spanning_sets};
use crate::error::{Error, Result};
use crate::pattern::{Pattern, Tournament};
use crate::rng::{self, derive_seed, Rng};
use crate::solver::{find_perfect_packing_within, Packing, Verdict, DEFAULT_BUDGET};
use crate::vset::{Combinations, VertexSet};

fn packable(g: &Digraph, t: &Pattern, ground: VertexSet) -> Result<bool> {
    if !ground.len().is_multiple_of(t.order()) {
        return Ok(false);
    }
    let out = find_perfect_packing_within(g, t, ground, DEFAULT_BUDGET)?;
    match out.verdict {
        Verdict::Found => Ok(true),
        Verdict::ExhaustedNone => Ok(false),
        Verdict::BudgetExceeded => Err(Error::Refused(format!("packing search on {ground:?} exceeded its budget"))),
    }
}

/// Both `G[S]` and `G[S ∪ Q]` contain perfect `T`-packings.
pub fn is_absorbing(g: &Digraph, t: &Pattern, s: VertexSet, q: VertexSet) -> Result<bool> {
    if !s.is_disjoint(q) {
        return Err(Error::domain("absorbing set and absorbed set overlap"));
    }
    let r = t.order();
    if !s.len().is_multiple_of(r) || !q.len().is_multiple_of(r) {
        return Ok(false);
    }
    Ok(packable(g, t, s)? && packable(g, t, s.union(q))?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConnectorCount {
    pub count: u64,
    pub cap_hit: bool,
    /// The first few connectors found, in enumeration order.
    pub samples: Vec<VertexSet>,
}

const KEPT_SAMPLES: usize = 8;

fn check_pair(g: &Digraph, x: Vertex, y: Vertex) -> Result<()> {
    if x == y {
        return Err(Error::domain("connector endpoints must be distinct"));
    }
    if x >= g.order() || y >= g.order() {
        return Err(Error::domain("connector endpoint out of range"));
    }
    Ok(())
}

/// `(r-1)`-sets `X ⊆ V \ {x, y}` such that `X ∪ {x}` and `X ∪ {y}` both span
/// `T`, counted exactly up to `cap`.
pub fn count_connectors(g: &Digraph, t: &Pattern, x: Vertex, y: Vertex, cap: u64) -> Result<ConnectorCount> {
    check_pair(g, x, y)?;
    let k = t.order() - 1;
    let mut result = ConnectorCount { count: 0, cap_hit: false, samples: Vec::new() };
    let mut visit = |set: VertexSet| {
        if result.cap_hit {
            return;
        }
        if spans_with(g, t, set, x) && spans_with(g, t, set, y) {
            result.count += 1;
            if result.samples.len() < KEPT_SAMPLES {
                result.samples.push(set);
            }
            if result.count >= cap {
                result.cap_hit = true;
            }
        }
    };
    let free = g.vertices().without(x).without(y);
    if t.is_complete_underlying() {
        let adj: Vec<VertexSet> = g.vertices().iter().map(|v| g.neighbours(v)).collect();
        let cand = free.intersection(g.neighbours(x)).intersection(g.neighbours(y));
        grow_cliques(&adj, k, VertexSet::EMPTY, cand, &mut visit);
    } else {
        for set in crate::vset::subsets_of_size(free, k) {
            visit(set);
        }
    }
    Ok(result)
}

fn spans_with(g: &Digraph, t: &Pattern, set: VertexSet, v: Vertex) -> bool {
    find_embedding(g, t, set.with(v)).is_some()
}

/// Fraction of uniformly sampled `(r-1)`-sets of `V \ {x, y}` that are connectors.
pub fn estimate_connector_density(
    g: &Digraph,
    t: &Pattern,
    x: Vertex,
    y: Vertex,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    check_pair(g, x, y)?;
    let free = g.vertices().without(x).without(y).to_vec();
    let k = t.order() - 1;
    if free.len() < k || samples == 0 {
        return Ok(0.0);
    }
    let mut rng = rng::seeded(seed);
    let hits = (0..samples)
        .filter(|_| {
            let set = random_subset(&free, k, &mut rng);
            spans_with(g, t, set, x) && spans_with(g, t, set, y)
        })
        .count();
    Ok(hits as f64 / samples as f64)
}

/// The six vertices split into two vertex-disjoint `C_3`s (10 splits tried).
pub fn splits_into_two_c3(g: &Digraph, six: VertexSet) -> bool {
    let c3 = Tournament::cyclic_triangle();
    let vs = six.to_vec();
    if vs.len() != 6 {
        return false;
    }
    let first = vs[0];
    Combinations::new(5, 2).any(|idx| {
        let a: VertexSet = [first, vs[1 + idx[0]], vs[1 + idx[1]]].iter().collect();
        find_embedding(g, &c3, a).is_some() && find_embedding(g, &c3, six.difference(a)).is_some()
    })
}

/// 5-sets `X ⊆ V \ {x, y}` such that `X ∪ {x}` and `X ∪ {y}` both split into two `C_3`s.
pub fn count_connectors_2c3(g: &Digraph, x: Vertex, y: Vertex, cap: u64) -> Result<ConnectorCount> {
    check_pair(g, x, y)?;
    if g.order() < 7 {
        return Err(Error::domain("2C3 connectors need n >= 7"));
    }
    let mut result = ConnectorCount { count: 0, cap_hit: false, samples: Vec::new() };
    for set in crate::vset::subsets_of_size(g.vertices().without(x).without(y), 5) {
        if splits_into_two_c3(g, set.with(x)) && splits_into_two_c3(g, set.with(y)) {
            result.count += 1;
            if result.samples.len() < KEPT_SAMPLES {
                result.samples.push(set);
            }
            if result.count >= cap {
                result.cap_hit = true;
                break;
            }
        }
    }
    Ok(result)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AbsorberConfig {
    pub xi: f64,
    /// Probe `r`-sets tried per candidate.
    pub probes: usize,
    /// Uniform candidate sets sampled.
    pub candidates: usize,
    /// Absorber size, a multiple of `r`; `None` means `2 r^2`.
    pub absorber_size: Option<usize>,
    /// Probes a candidate must absorb to be kept.
    pub min_hits: usize,
    /// Build structured absorbers when sampling leaves spare capacity.
    pub structured_fallback: bool,
    pub seed: u64,
}

impl AbsorberConfig {
    pub fn new(xi: f64, seed: u64) -> Self {
        AbsorberConfig {
            xi,
            probes: 4,
            candidates: 64,
            absorber_size: None,
            min_hits: 1,
            structured_fallback: true,
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AbsorberOrigin {
    Sampled,
    Structured,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Absorber {
    pub set: VertexSet,
    pub origin: AbsorberOrigin,
    /// Probe sets this absorber was verified to absorb.
    pub absorbs: Vec<VertexSet>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyStats {
    pub sampled: usize,
    pub absorbing: usize,
    pub after_overlap_drop: usize,
    pub structured: usize,
    pub capacity: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbsorberFamily {
    pub pattern: Pattern,
    pub absorber_size: usize,
    pub absorbers: Vec<Absorber>,
    /// `M`, the union of the absorbers.
    pub union: VertexSet,
    pub stats: FamilyStats,
}

impl AbsorberFamily {
    pub fn sets(&self) -> Vec<VertexSet> {
        self.absorbers.iter().map(|a| a.set).collect()
    }

    /// Pairwise disjoint, `|M| <= ξ n` and `G[M]` perfectly packable.
    pub fn check_invariants(&self, g: &Digraph, xi: f64) -> Result<bool> {
        let mut seen = VertexSet::EMPTY;
        for a in &self.absorbers {
            if !a.set.is_disjoint(seen) {
                return Ok(false);
            }
            seen = seen.union(a.set);
        }
        Ok(seen == self.union
            && self.union.len() as f64 <= xi * g.order() as f64 + 1e-9
            && packable(g, &self.pattern, self.union)?)
    }
}

fn random_subset(pool: &[Vertex], k: usize, rng: &mut Rng) -> VertexSet {
    index::sample(rng, pool.len(), k).iter().map(|i| pool[i]).collect()
}

/// Desk-scale absorbing family: uniform candidate sets verified against
/// random probes, overlaps dropped greedily in sampling order, truncated to
/// `|M| <= ξ n`. With `structured_fallback`, spare capacity is filled by
/// absorbers assembled from a copy `Y` of `T` and connector sets
/// `X_1, ..., X_r` for fresh probes.
pub fn build_absorbing_family(g: &Digraph, t: &Pattern, config: &AbsorberConfig) -> Result<AbsorberFamily> {
    let n = g.order();
    let r = t.order();
    if 4 * r * r > n {
        return Err(Error::domain(format!("need r^2 <= n/4 (r = {r}, n = {n})")));
    }
    let size = config.absorber_size.unwrap_or(2 * r * r);
    if size == 0 || !size.is_multiple_of(r) || size + r > n {
        return Err(Error::domain(format!("absorber size {size} must be a positive multiple of {r} below n - r")));
    }
    let capacity = ((config.xi * n as f64 + 1e-9).floor() as usize) / size;
    let all = g.vertices().to_vec();

    let mut rng = rng::seeded(config.seed);
    let candidates: Vec<VertexSet> = (0..config.candidates).map(|_| random_subset(&all, size, &mut rng)).collect();
    let verified: Vec<Result<Vec<VertexSet>>> = candidates
        .par_iter()
        .enumerate()
        .map(|(i, &set)| {
            let mut probe_rng = rng::seeded(derive_seed(config.seed, i as u64));
            let pool = g.vertices().difference(set).to_vec();
            if !packable(g, t, set)? {
                return Ok(Vec::new());
            }
            let mut hits = Vec::new();
            for _ in 0..config.probes {
                let q = random_subset(&pool, r, &mut probe_rng);
                if packable(g, t, set.union(q))? {
                    hits.push(q);
                }
            }
            Ok(hits)
        })
        .collect();

    let mut absorbing = 0;
    let mut absorbers: Vec<Absorber> = Vec::new();
    let mut union = VertexSet::EMPTY;
    for (set, hits) in candidates.iter().zip(verified) {
        let hits = hits?;
        if hits.len() < config.min_hits.max(1) {
            continue;
        }
        absorbing += 1;
        if set.is_disjoint(union) {
            union = union.union(*set);
            absorbers.push(Absorber { set: *set, origin: AbsorberOrigin::Sampled, absorbs: hits });
        }
    }
    let after_overlap_drop = absorbers.len();
    absorbers.truncate(capacity);
    union = absorbers.iter().fold(VertexSet::EMPTY, |acc, a| acc.union(a.set));

    let mut structured = 0;
    if config.structured_fallback && size == 2 * r * r {
        let mut attempts = 0;
        while absorbers.len() < capacity && attempts < 4 * capacity.max(1) {
            attempts += 1;
            let pool = g.vertices().difference(union).to_vec();
            if pool.len() < size + r {
                break;
            }
            let q = random_subset(&pool, r, &mut rng);
            if let Some(set) = structured_absorber(g, t, q, union, &mut rng)? {
                union = union.union(set);
                absorbers.push(Absorber { set, origin: AbsorberOrigin::Structured, absorbs: vec![q] });
                structured += 1;
            }
        }
    }

    let stats = FamilyStats { sampled: candidates.len(), absorbing, after_overlap_drop, structured, capacity };
    if absorbers.is_empty() {
        return Err(Error::FamilyEmpty { diagnostics: format!("{stats:?}") });
    }
    Ok(AbsorberFamily { pattern: t.clone(), absorber_size: size, absorbers, union, stats })
}

/// A `2r^2`-set absorbing `q`, disjoint from `avoid`: a copy `Y` of `T`
/// paired vertex by vertex with `q`, plus for each pair `(x_i, y_i)` a
/// `(2r-1)`-set `X_i` such that `X_i + x_i` and `X_i + y_i` both have perfect
/// `T`-packings.
pub fn structured_absorber(
    g: &Digraph,
    t: &Pattern,
    q: VertexSet,
    avoid: VertexSet,
    rng: &mut Rng,
) -> Result<Option<VertexSet>> {
    let r = t.order();
    let mut used = avoid.union(q);
    let copies = spanning_sets(g, t, g.vertices().difference(used));
    let Some(&y) = copies.choose(rng) else {
        return Ok(None);
    };
    used = used.union(y);
    let mut set = y;
    for (xi, yi) in q.iter().zip(y.iter()) {
        let Some(x_set) = pair_connector(g, t, xi, yi, used, rng)? else {
            return Ok(None);
        };
        used = used.union(x_set);
        set = set.union(x_set);
    }
    debug_assert_eq!(set.len(), 2 * r * r);
    Ok(is_absorbing(g, t, set, q)?.then_some(set))
}

const CONNECTOR_TRIES: usize = 256;

/// A `(2r-1)`-set `X` avoiding `used` with `G[X + x]` and `G[X + y]`
/// perfectly packable: an `(r-1)`-connector plus a disjoint copy of `T`, or
/// failing that a directly sampled set.
fn pair_connector(
    g: &Digraph,
    t: &Pattern,
    x: Vertex,
    y: Vertex,
    used: VertexSet,
    rng: &mut Rng,
) -> Result<Option<VertexSet>> {
    let r = t.order();
    let free = g.vertices().difference(used);
    let adj: Vec<VertexSet> = g.vertices().iter().map(|v| g.neighbours(v)).collect();
    let mut connectors = Vec::new();
    let cand = free.intersection(g.neighbours(x)).intersection(g.neighbours(y));
    grow_cliques(&adj, r - 1, VertexSet::EMPTY, cand, &mut |set| {
        if spans_with(g, t, set, x) && spans_with(g, t, set, y) {
            connectors.push(set);
        }
    });
    connectors.shuffle(rng);
    for &c in connectors.iter().take(CONNECTOR_TRIES) {
        if let Some(&extra) = spanning_sets(g, t, free.difference(c)).choose(rng) {
            return Ok(Some(c.union(extra)));
        }
    }
    let pool = free.to_vec();
    if pool.len() < 2 * r - 1 {
        return Ok(None);
    }
    for _ in 0..CONNECTOR_TRIES {
        let set = random_subset(&pool, 2 * r - 1, rng);
        if packable(g, t, set.with(x))? && packable(g, t, set.with(y))? {
            return Ok(Some(set));
        }
    }
    Ok(None)
}

/// Maximum bipartite matching by augmenting paths; `adj[i]` lists the right
/// vertices available to left vertex `i`.
fn bipartite_matching(adj: &[Vec<usize>], right: usize) -> Vec<Option<usize>> {
    fn augment(i: usize, adj: &[Vec<usize>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for &j in &adj[i] {
            if seen[j] {
                continue;
            }
            seen[j] = true;
            if owner[j].is_none_or(|k| augment(k, adj, seen, owner)) {
                owner[j] = Some(i);
                return true;
            }
        }
        false
    }
    let mut owner = vec![None; right];
    for i in 0..adj.len() {
        augment(i, adj, &mut vec![false; right], &mut owner);
    }
    let mut assigned = vec![None; adj.len()];
    for (j, o) in owner.iter().enumerate() {
        if let Some(i) = o {
            assigned[*i] = Some(j);
        }
    }
    assigned
}

/// Perfect `T`-packing of `G[M ∪ W]`: `W` is cut into consecutive `r`-sets
/// (in vertex order), each assigned to its own absorber by bipartite
/// matching; untouched absorbers are packed on their own.
pub fn absorb(g: &Digraph, family: &AbsorberFamily, w: VertexSet) -> Result<Packing> {
    let t = &family.pattern;
    let r = t.order();
    if !w.is_disjoint(family.union) {
        return Err(Error::domain("W meets the absorbing set M"));
    }
    if !w.len().is_multiple_of(r) {
        return Err(Error::domain(format!("|W| = {} is not divisible by {r}", w.len())));
    }
    let wv = w.to_vec();
    let parts: Vec<VertexSet> = wv.chunks(r).map(|c| c.iter().collect()).collect();
    let sets = family.sets();
    let mut adj = Vec::with_capacity(parts.len());
    for &q in &parts {
        let mut row = Vec::new();
        for (j, &s) in sets.iter().enumerate() {
            if is_absorbing(g, t, s, q)? {
                row.push(j);
            }
        }
        adj.push(row);
    }
    let assignment = bipartite_matching(&adj, sets.len());
    let assigned = assignment.iter().filter(|a| a.is_some()).count();
    if assigned < parts.len() {
        return Err(Error::AssignmentFailed { assigned, needed: parts.len() });
    }
    let mut ground_of: Vec<VertexSet> = sets.clone();
    for (q, a) in parts.iter().zip(&assignment) {
        let j = a.expect("all parts assigned");
        ground_of[j] = ground_of[j].union(*q);
    }
    let mut packing = Packing::new(g.order());
    for ground in ground_of {
        let out = find_perfect_packing_within(g, t, ground, DEFAULT_BUDGET)?;
        let part = out.packing.ok_or_else(|| {
            Error::InvariantViolation(format!("verified absorber {ground:?} lost its packing ({:?})", out.verdict))
        })?;
        packing.elements.extend(part.elements);
    }
    Ok(packing)
}

/// Uniform random `k`-subset of `pool`; exposed for callers drawing `W`.
pub fn sample_subset(pool: VertexSet, k: usize, seed: u64) -> Result<VertexSet> {
    let vs = pool.to_vec();
    if k > vs.len() {
        return Err(Error::domain(format!("cannot draw {k} vertices from {}", vs.len())));
    }
    Ok(random_subset(&vs, k, &mut rng::seeded(seed)))
}
