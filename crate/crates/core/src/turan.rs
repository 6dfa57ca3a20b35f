//! Turán-type dichotomies: enough arcs force `K_r`; a `T`-free digraph of
//! large minimum semidegree has a large independent set.

use serde::Serialize;

use crate::digraph::{Digraph, Vertex};
use crate::embed::{find_embedding, grow_cliques, spanning_sets, Embedding};
use crate::error::{Error, Result};
use crate::pattern::{Pattern, Tournament};
use crate::vset::{binomial, VertexSet};

/// Floating-point slack for comparing exact counts against real-valued bounds.
const EPS: f64 = 1e-9;

/// Either a copy of the pattern or an independent set with its promised size.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TuranCertificate {
    Copy { embedding: Embedding },
    IndependentSet { set: VertexSet, guaranteed: f64 },
}

/// Candidate sets for the two vertices `a, b` of the chosen arc `ab in E(T)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CandidateSets {
    pub a: VertexSet,
    pub b: VertexSet,
}

/// `e(G) > (1 - 1/(r-1)) n^2/2 + C(n, 2)`, compared in integers.
pub fn density_condition(g: &Digraph, r: usize) -> bool {
    let (n, e) = (g.order() as u128, g.arc_count() as u128);
    let r = r as u128;
    2 * (r - 1) * e > (r - 2) * n * n + (r - 1) * n * n.saturating_sub(1)
}

/// An `r`-set carrying double edges on every pair, found by clique search on
/// the graph of double edges.
pub fn find_kr_from_density(g: &Digraph, r: usize) -> Result<VertexSet> {
    if r < 2 {
        return Err(Error::domain("r must be at least 2"));
    }
    if !density_condition(g, r) {
        return Err(Error::precondition(format!(
            "e(G) = {} does not exceed (1 - 1/(r-1)) n^2/2 + C(n,2) for n = {}, r = {r}",
            g.arc_count(),
            g.order()
        )));
    }
    find_double_clique(g, r, g.vertices())
        .ok_or_else(|| Error::InvariantViolation(format!("no K_{r} despite the density bound")))
}

/// Lowest `r`-clique of double edges inside `allowed`, if any.
pub fn find_double_clique(g: &Digraph, r: usize, allowed: VertexSet) -> Option<VertexSet> {
    let adj: Vec<VertexSet> = g.vertices().iter().map(|v| g.double_neighbours(v)).collect();
    let mut found = None;
    grow_cliques(&adj, r, VertexSet::EMPTY, allowed, &mut |set| {
        found.get_or_insert(set);
    });
    found
}

/// Number of `r`-sets spanning a copy of `pattern`.
pub fn count_copies(g: &Digraph, pattern: &Pattern) -> u128 {
    if pattern.order() > g.order() {
        return 0;
    }
    if g.arc_count() == g.order() * (g.order() - 1) {
        return binomial(g.order(), pattern.order());
    }
    spanning_sets(g, pattern, g.vertices()).len() as u128
}

fn semidegree_threshold(n: usize, r: usize, alpha: f64) -> f64 {
    (1.0 - 1.0 / (r - 1) as f64 - alpha) * n as f64
}

/// Vertices `v` that can play pattern vertex `role` against the placed
/// vertices `placed[i] = image of others[i]`.
fn candidates(g: &Digraph, t: &Pattern, role: Vertex, others: &[Vertex], placed: &[Vertex]) -> VertexSet {
    let mut set = g.vertices();
    for (&o, &x) in others.iter().zip(placed) {
        if t.has_arc(role, o) {
            set = set.intersection(g.in_set(x));
        }
        if t.has_arc(o, role) {
            set = set.intersection(g.out_set(x));
        }
    }
    set
}

/// Trace of [`independent_or_copy`] for inspection.
#[derive(Clone, Debug, Serialize)]
pub struct IndependentTrace {
    pub arc: (Vertex, Vertex),
    pub partial: Vec<Vertex>,
    pub candidates: CandidateSets,
}

/// Builds a copy of `T - {a, b}` by lowest-index search, where `ab` is the
/// lexicographically least arc of `T`, and computes candidate sets `A`, `B`.
/// An arc from `A` to `B` or a `K_r` inside `A \ B` gives a copy of `T`;
/// otherwise `A ∩ B` is returned as an independent set of size at least
/// `(1/(r-1) - 2 r^2 alpha) n`.
pub fn independent_or_copy(g: &Digraph, t: &Tournament, alpha: f64) -> Result<(TuranCertificate, IndependentTrace)> {
    let (n, r) = (g.order(), t.order());
    if r < 3 {
        return Err(Error::domain("tournament order must be at least 3"));
    }
    let need = semidegree_threshold(n, r, alpha);
    if n == 0 || (g.min_semidegree()? as f64) < need - EPS {
        return Err(Error::domain(format!("minimum semidegree below (1 - 1/(r-1) - alpha) n = {need:.3}")));
    }
    let (a, b) = t.digraph().arcs().next().expect("tournaments on >= 2 vertices have arcs");
    let others: Vec<Vertex> = (0..r).filter(|&v| v != a && v != b).collect();
    let sub = induced_pattern(t, &others)?;
    let placed = find_embedding(g, &sub, g.vertices())
        .ok_or_else(|| Error::InvariantViolation("could not build the partial copy T''".into()))?;
    let cand_a = candidates(g, t, a, &others, &placed);
    let cand_b = candidates(g, t, b, &others, &placed);
    let trace =
        IndependentTrace { arc: (a, b), partial: placed.clone(), candidates: CandidateSets { a: cand_a, b: cand_b } };

    let assemble = |va: Vertex, vb: Vertex| {
        let mut image = vec![0; r];
        for (&o, &x) in others.iter().zip(&placed) {
            image[o] = x;
        }
        image[a] = va;
        image[b] = vb;
        Embedding { pattern: t.pattern().clone(), image }
    };
    for u in cand_a {
        if let Some(w) = g.out_set(u).intersection(cand_b).first() {
            return Ok((TuranCertificate::Copy { embedding: assemble(u, w) }, trace));
        }
    }

    let a_only = cand_a.difference(cand_b);
    if !a_only.is_empty() && a_only.len() as f64 >= 2.0 * ((r - 1) * (r - 1)) as f64 * alpha * n as f64 - EPS {
        let clique = find_double_clique(g, r, a_only)
            .ok_or_else(|| Error::InvariantViolation(format!("A \\ B has {} vertices but no K_{r}", a_only.len())))?;
        let image = clique.to_vec();
        let embedding = Embedding { pattern: t.pattern().clone(), image };
        debug_assert!(embedding.is_valid_in(g));
        return Ok((TuranCertificate::Copy { embedding }, trace));
    }

    let set = cand_a.intersection(cand_b);
    let guaranteed = (1.0 / (r - 1) as f64 - 2.0 * (r * r) as f64 * alpha) * n as f64;
    if (set.len() as f64) < guaranteed - EPS {
        return Err(Error::InvariantViolation(format!(
            "independent set of size {} is below the guaranteed {guaranteed:.3}",
            set.len()
        )));
    }
    Ok((TuranCertificate::IndependentSet { set, guaranteed }, trace))
}

fn induced_pattern(t: &Pattern, vertices: &[Vertex]) -> Result<Pattern> {
    let (sub, _) = t.digraph().induced(vertices.iter().collect());
    Pattern::new(format!("{}-sub", t.name()), sub)
}

/// A transitive tournament `x_1 .. x_k` (arcs `x_i -> x_j` for `i < j`)
/// together with a turning point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConsistentTransitive {
    pub vertices: Vec<Vertex>,
    pub turning_point: usize,
}

impl ConsistentTransitive {
    /// Outdegree at least `threshold` for positions `<= s`, indegree for the rest.
    pub fn is_consistent(&self, g: &Digraph, threshold: f64) -> bool {
        let k = self.vertices.len();
        let transitive = (0..k).all(|i| (i + 1..k).all(|j| g.has_arc(self.vertices[i], self.vertices[j])));
        transitive
            && self.turning_point <= k
            && self.vertices.iter().enumerate().all(|(i, &x)| {
                if i < self.turning_point {
                    g.out_degree(x) as f64 >= threshold - EPS
                } else {
                    g.in_degree(x) as f64 >= threshold - EPS
                }
            })
    }

    /// `⋂_{i <= s} N^+(x_i) ∩ ⋂_{i > s} N^-(x_i)`.
    pub fn common_neighbourhood(&self, g: &Digraph) -> VertexSet {
        self.vertices.iter().enumerate().fold(g.vertices(), |acc, (i, &x)| {
            acc.intersection(if i < self.turning_point { g.out_set(x) } else { g.in_set(x) })
        })
    }
}

/// Greedy construction of a consistent `T_{r-2}` (each new vertex is the
/// lowest-index vertex of the common neighbourhood, inserted at the turning
/// point), then either a `T_r` through an arc of `N` or `N` as an independent
/// set of size at least `(1/(r-1) - r alpha) n`. The intermediate tournaments
/// are returned in build order.
pub fn consistent_or_independent(
    g: &Digraph,
    r: usize,
    alpha: f64,
) -> Result<(TuranCertificate, Vec<ConsistentTransitive>)> {
    let n = g.order();
    if r < 3 {
        return Err(Error::domain("r must be at least 3"));
    }
    if n == 0 {
        return Err(Error::domain("empty digraph"));
    }
    let theta = semidegree_threshold(n, r, alpha);
    let strong_out = |x: Vertex| g.out_degree(x) as f64 >= theta - EPS;
    if let Some(bad) = g.vertices().iter().find(|&x| !strong_out(x) && (g.in_degree(x) as f64) < theta - EPS) {
        return Err(Error::domain(format!("vertex {bad} has outdegree and indegree below {theta:.3}")));
    }

    let mut current = ConsistentTransitive { vertices: vec![], turning_point: 0 };
    let mut history = Vec::new();
    while current.vertices.len() < r - 2 {
        let x = current.common_neighbourhood(g).first().ok_or_else(|| {
            Error::InvariantViolation(format!(
                "empty common neighbourhood while extending a consistent T_{}",
                current.vertices.len()
            ))
        })?;
        let s = current.turning_point;
        current.vertices.insert(s, x);
        if strong_out(x) {
            current.turning_point = s + 1;
        }
        debug_assert!(current.is_consistent(g, theta));
        history.push(current.clone());
    }

    let big_n = current.common_neighbourhood(g);
    let transitive = Tournament::transitive(r)?;
    for x in big_n {
        if let Some(y) = g.out_set(x).intersection(big_n).first() {
            let s = current.turning_point;
            let mut image = current.vertices.clone();
            image.insert(s, y);
            image.insert(s, x);
            let embedding = Embedding { pattern: transitive.pattern().clone(), image };
            return Ok((TuranCertificate::Copy { embedding }, history));
        }
    }
    let guaranteed = (1.0 / (r - 1) as f64 - r as f64 * alpha) * n as f64;
    if (big_n.len() as f64) < guaranteed - EPS {
        return Err(Error::InvariantViolation(format!(
            "N has {} vertices, below the guaranteed {guaranteed:.3}",
            big_n.len()
        )));
    }
    Ok((TuranCertificate::IndependentSet { set: big_n, guaranteed }, history))
}
