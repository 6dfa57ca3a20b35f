//! Matchings in graphs and digraphs with certificates: `d`-matchings covering
//! a prescribed set, and the perfect-matching / independent-set /
//! close-to-`2K_{n/2}` trichotomy.

use std::collections::VecDeque;

use serde::Serialize;

use crate::digraph::{Digraph, Vertex, MAX_ORDER};
use crate::error::{Error, Result};
use crate::vset::VertexSet;

/// Simple undirected graph on at most 64 vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UGraph {
    n: usize,
    adj: Vec<VertexSet>,
}

pub type Edge = (Vertex, Vertex);

impl UGraph {
    pub fn new(n: usize) -> Result<Self> {
        if n > MAX_ORDER {
            return Err(Error::TooLarge(n));
        }
        Ok(UGraph { n, adj: vec![VertexSet::EMPTY; n] })
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut g = UGraph::new(n)?;
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Result<Self> {
        UGraph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
    }

    /// `uv` is an edge iff `uv` or `vu` is an arc.
    pub fn underlying(g: &Digraph) -> Self {
        let adj = g.vertices().iter().map(|v| g.neighbours(v)).collect();
        UGraph { n: g.order(), adj }
    }

    pub fn add_edge(&mut self, u: Vertex, v: Vertex) -> Result<()> {
        if u == v || u >= self.n || v >= self.n {
            return Err(Error::domain(format!("invalid edge {u}-{v} on {} vertices", self.n)));
        }
        self.adj[u].insert(v);
        self.adj[v].insert(u);
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.n)
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.adj[u].contains(v)
    }

    pub fn neighbours(&self, v: Vertex) -> VertexSet {
        self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn min_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).min().unwrap_or(0)
    }

    /// Edges `(u, v)` with `u < v`, lexicographic.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (0..self.n).flat_map(move |u| self.adj[u].iter().filter(move |&v| v > u).map(move |v| (u, v)))
    }

    pub fn edges_within(&self, s: VertexSet) -> usize {
        s.iter().map(|v| self.adj[v].intersection(s).len()).sum::<usize>() / 2
    }

    pub fn edges_between(&self, a: VertexSet, b: VertexSet) -> usize {
        a.iter().map(|v| self.adj[v].intersection(b).len()).sum()
    }
}

const NONE: usize = usize::MAX;

/// Maximum matching by Edmonds' blossom algorithm; `mate[v]` or `None`.
pub fn maximum_matching(g: &UGraph) -> Vec<Option<Vertex>> {
    let n = g.n;
    let mut mate = vec![NONE; n];
    for v in 0..n {
        if mate[v] == NONE {
            if let Some(u) = g.adj[v].iter().find(|&u| mate[u] == NONE) {
                mate[v] = u;
                mate[u] = v;
            }
        }
    }
    for root in 0..n {
        if mate[root] != NONE {
            continue;
        }
        let mut p = vec![NONE; n];
        if let Some(mut v) = augmenting_path(g, root, &mate, &mut p) {
            while v != NONE {
                let pv = p[v];
                let next = mate[pv];
                mate[v] = pv;
                mate[pv] = v;
                v = next;
            }
        }
    }
    mate.into_iter().map(|m| (m != NONE).then_some(m)).collect()
}

fn augmenting_path(g: &UGraph, root: usize, mate: &[usize], p: &mut [usize]) -> Option<usize> {
    let n = g.n;
    let mut used = vec![false; n];
    let mut base: Vec<usize> = (0..n).collect();
    let mut queue = VecDeque::from([root]);
    used[root] = true;
    while let Some(v) = queue.pop_front() {
        for to in g.adj[v] {
            if base[v] == base[to] || mate[v] == to {
                continue;
            }
            if to == root || (mate[to] != NONE && p[mate[to]] != NONE) {
                let cur = lca(v, to, &base, p, mate);
                let mut blossom = vec![false; n];
                mark_path(v, cur, to, &mut blossom, &base, p, mate);
                mark_path(to, cur, v, &mut blossom, &base, p, mate);
                for i in 0..n {
                    if blossom[base[i]] {
                        base[i] = cur;
                        if !used[i] {
                            used[i] = true;
                            queue.push_back(i);
                        }
                    }
                }
            } else if p[to] == NONE {
                p[to] = v;
                if mate[to] == NONE {
                    return Some(to);
                }
                used[mate[to]] = true;
                queue.push_back(mate[to]);
            }
        }
    }
    None
}

fn lca(mut a: usize, mut b: usize, base: &[usize], p: &[usize], mate: &[usize]) -> usize {
    let mut seen = vec![false; base.len()];
    loop {
        a = base[a];
        seen[a] = true;
        if mate[a] == NONE {
            break;
        }
        a = p[mate[a]];
    }
    loop {
        b = base[b];
        if seen[b] {
            return b;
        }
        b = p[mate[b]];
    }
}

fn mark_path(
    mut v: usize,
    b: usize,
    mut child: usize,
    blossom: &mut [bool],
    base: &[usize],
    p: &mut [usize],
    mate: &[usize],
) {
    while base[v] != b {
        blossom[base[v]] = true;
        blossom[base[mate[v]]] = true;
        p[v] = child;
        child = mate[v];
        v = p[mate[v]];
    }
}

fn mate_to_edges(mate: &[Option<Vertex>]) -> Vec<Edge> {
    mate.iter().enumerate().filter_map(|(u, m)| m.filter(|&v| u < v).map(|v| (u, v))).collect()
}

/// Greedy maximal matching over lexicographically ordered edges.
pub fn greedy_maximal_matching(g: &UGraph) -> Vec<Edge> {
    let mut used = VertexSet::EMPTY;
    let mut out = Vec::new();
    for (u, v) in g.edges() {
        if !used.contains(u) && !used.contains(v) {
            used = used.with(u).with(v);
            out.push((u, v));
        }
    }
    out
}

fn covered(edges: &[Edge]) -> VertexSet {
    edges.iter().fold(VertexSet::EMPTY, |acc, &(u, v)| acc.with(u).with(v))
}

/// Pairwise disjoint edges of `g`.
pub fn is_matching(g: &UGraph, edges: &[Edge]) -> bool {
    let mut seen = VertexSet::EMPTY;
    edges.iter().all(|&(u, v)| {
        let ok = u < g.n && v < g.n && g.has_edge(u, v) && !seen.contains(u) && !seen.contains(v);
        seen = seen.with(u).with(v);
        ok
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverRule {
    /// Add `xy` for a free neighbour `y`, drop an edge outside `X`.
    FreeNeighbour,
    /// Replace `wz` (`w in X`, `z` outside) by `xw`.
    StealFromMixed,
    /// Replace `wz` (both outside `X`) by `xw` or `xz`.
    StealFromOutside,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverStep {
    pub rule: CoverRule,
    pub removed: Edge,
    pub added: Edge,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoveringMatching {
    pub edges: Vec<Edge>,
    pub steps: Vec<CoverStep>,
}

fn norm((u, v): Edge) -> Edge {
    (u.min(v), u.max(v))
}

/// A `d`-matching covering `X`, by the exchange argument: start from the
/// first `d` edges (lexicographically) of a maximum matching and apply
/// covering swaps to the lowest uncovered vertex of `X` until none is left.
pub fn d_matching_covering(g: &UGraph, d: usize, x: VertexSet) -> Result<CoveringMatching> {
    let n = g.n;
    if x.len() != d || !x.is_subset(g.vertices()) {
        return Err(Error::domain(format!("X must be a {d}-subset of the vertex set")));
    }
    if n < 2 * d {
        return Err(Error::domain(format!("need n >= 2d (n = {n}, d = {d})")));
    }
    if g.min_degree() < d {
        return Err(Error::domain(format!("minimum degree {} below d = {d}", g.min_degree())));
    }
    let mut m = mate_to_edges(&maximum_matching(g));
    if m.len() < d {
        return Err(Error::InvariantViolation(format!("maximum matching has only {} edges", m.len())));
    }
    m.truncate(d);
    let mut steps = Vec::new();
    loop {
        let cov = covered(&m);
        let Some(xv) = x.difference(cov).first() else { break };
        let outside = |(a, b): Edge| !x.contains(a) && !x.contains(b);
        let step = if let Some(y) = g.adj[xv].difference(cov).first() {
            let i = m
                .iter()
                .position(|&e| outside(e))
                .ok_or_else(|| Error::InvariantViolation("no matching edge outside X to drop".into()))?;
            Some((i, norm((xv, y)), CoverRule::FreeNeighbour))
        } else if let Some((i, w)) = m.iter().enumerate().find_map(|(i, &(a, b))| {
            let w = if x.contains(a) && !x.contains(b) {
                a
            } else if x.contains(b) && !x.contains(a) {
                b
            } else {
                return None;
            };
            g.has_edge(xv, w).then_some((i, w))
        }) {
            Some((i, norm((xv, w)), CoverRule::StealFromMixed))
        } else {
            m.iter().enumerate().find_map(|(i, &(a, b))| {
                if !outside((a, b)) {
                    return None;
                }
                [a, b].into_iter().find(|&w| g.has_edge(xv, w)).map(|w| (i, norm((xv, w)), CoverRule::StealFromOutside))
            })
        };
        let Some((i, added, rule)) = step else {
            return Err(Error::InvariantViolation(format!("no covering swap applies to vertex {xv}")));
        };
        let removed = m[i];
        m[i] = added;
        steps.push(CoverStep { rule, removed, added });
    }
    m.sort_unstable();
    Ok(CoveringMatching { edges: m, steps })
}

/// Digraph version: every vertex needs `d^+ >= d` or `d^- >= d`; the
/// matching is found in the underlying graph and lifted to arcs.
pub fn d_matching_covering_digraph(g: &Digraph, d: usize, x: VertexSet) -> Result<Vec<Edge>> {
    if let Some(v) = g.vertices().iter().find(|&v| g.out_degree(v) < d && g.in_degree(v) < d) {
        return Err(Error::domain(format!("vertex {v} has outdegree and indegree below {d}")));
    }
    let m = d_matching_covering(&UGraph::underlying(g), d, x)?;
    Ok(lift(g, &m.edges))
}

fn lift(g: &Digraph, edges: &[Edge]) -> Vec<Edge> {
    edges.iter().map(|&(u, v)| if g.has_arc(u, v) { (u, v) } else { (v, u) }).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MatchCertificate {
    PerfectMatching {
        edges: Vec<Edge>,
    },
    /// `core` spans no edges; `set` is `core` padded to `ceil(n/2)` vertices.
    IndependentSet {
        core: VertexSet,
        set: VertexSet,
        gamma_prime: f64,
    },
    /// `|a| = floor(n/2)`, `|b| = ceil(n/2)`, `cross` edges between them.
    ClosePartition {
        a: VertexSet,
        b: VertexSet,
        cross: usize,
        gamma_prime: f64,
    },
}

/// `SN(v)`: partners in `m` of the neighbours of `v`.
fn second_neighbourhood(g: &UGraph, partner: &[Option<Vertex>], v: Vertex) -> VertexSet {
    g.adj[v].iter().filter_map(|w| partner[w]).collect()
}

fn partners(n: usize, m: &[Edge]) -> Vec<Option<Vertex>> {
    let mut p = vec![None; n];
    for &(u, v) in m {
        p[u] = Some(v);
        p[v] = Some(u);
    }
    p
}

fn extend_maximal(g: &UGraph, m: &mut Vec<Edge>) {
    let mut used = covered(m);
    for (u, v) in g.edges() {
        if !used.contains(u) && !used.contains(v) {
            used = used.with(u).with(v);
            m.push((u, v));
        }
    }
}

fn pad(core: VertexSet, target: usize, n: usize) -> VertexSet {
    let mut set = core;
    for v in 0..n {
        if set.len() >= target {
            break;
        }
        set.insert(v);
    }
    set
}

fn balance(mut a: VertexSet, mut b: VertexSet, n: usize) -> (VertexSet, VertexSet) {
    let rest = VertexSet::full(n).difference(a.union(b));
    for v in rest {
        if a.len() < n / 2 {
            a.insert(v);
        } else {
            b.insert(v);
        }
    }
    while a.len() > n / 2 {
        let v = a.iter().last().expect("nonempty");
        a.remove(v);
        b.insert(v);
    }
    while b.len() > n - n / 2 {
        let v = b.iter().last().expect("nonempty");
        b.remove(v);
        a.insert(v);
    }
    (a, b)
}

/// Runs the augmentation argument to a certificate. `gamma_prime` is
/// recorded in non-matching certificates.
fn trichotomy(g: &UGraph, gamma_prime: f64) -> MatchCertificate {
    let n = g.n;
    let mut m = greedy_maximal_matching(g);
    loop {
        let cov = covered(&m);
        let free = g.vertices().difference(cov);
        let mut it = free.iter();
        let (Some(x), Some(y)) = (it.next(), it.next()) else {
            m.sort_unstable();
            return MatchCertificate::PerfectMatching { edges: m };
        };
        let partner = partners(n, &m);
        let snx = second_neighbourhood(g, &partner, x);
        let sny = second_neighbourhood(g, &partner, y);
        let augmenting = snx.iter().find_map(|z| g.adj[z].intersection(sny).first().map(|z2| (z, z2)));
        if let Some((z, z2)) = augmenting {
            if partner[z] == Some(z2) {
                m.retain(|&e| e != norm((z, z2)));
                m.push(norm((x, z2)));
                m.push(norm((y, z)));
            } else {
                let w = partner[z].expect("z is matched");
                let w2 = partner[z2].expect("z' is matched");
                m.retain(|&e| e != norm((w, z)) && e != norm((w2, z2)));
                m.extend([norm((x, w)), norm((y, w2)), norm((z, z2))]);
            }
            extend_maximal(g, &mut m);
            continue;
        }
        let both = snx.intersection(sny);
        if !both.is_empty() {
            let set = pad(both, n.div_ceil(2), n);
            return MatchCertificate::IndependentSet { core: both, set, gamma_prime };
        }
        let (a, b) = balance(snx, sny, n);
        let cross = g.edges_between(a, b);
        return MatchCertificate::ClosePartition { a, b, cross, gamma_prime };
    }
}

/// Perfect matching, `3γ`-independent set of size `n/2`, or a partition
/// `3γ`-close to `2K_{n/2}`; requires `n` even and `δ >= (1/2 - γ) n`.
pub fn matching_or_certificate(g: &UGraph, gamma: f64) -> Result<MatchCertificate> {
    let n = g.n;
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::domain(format!("order {n} must be positive and even")));
    }
    let need = (0.5 - gamma) * n as f64;
    if (g.min_degree() as f64) < need - 1e-9 {
        return Err(Error::domain(format!("minimum degree {} below (1/2 - γ) n = {need:.3}", g.min_degree())));
    }
    Ok(trichotomy(g, 3.0 * gamma))
}

/// Digraph version with the per-vertex condition `d^+ >= (1/2 - γ) n` or
/// `d^- >= (1/2 - γ) n` and constants `6γ`; matching edges are lifted to arcs.
pub fn matching_or_certificate_digraph(g: &Digraph, gamma: f64) -> Result<MatchCertificate> {
    let n = g.order();
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::domain(format!("order {n} must be positive and even")));
    }
    let need = (0.5 - gamma) * n as f64;
    if let Some(v) =
        g.vertices().iter().find(|&v| (g.out_degree(v) as f64) < need - 1e-9 && (g.in_degree(v) as f64) < need - 1e-9)
    {
        return Err(Error::domain(format!("vertex {v} has outdegree and indegree below {need:.3}")));
    }
    Ok(match trichotomy(&UGraph::underlying(g), 6.0 * gamma) {
        MatchCertificate::PerfectMatching { edges } => MatchCertificate::PerfectMatching { edges: lift(g, &edges) },
        MatchCertificate::ClosePartition { a, b, gamma_prime, .. } => {
            let cross = g.arcs_between(a, b) + g.arcs_between(b, a);
            MatchCertificate::ClosePartition { a, b, cross, gamma_prime }
        }
        other => other,
    })
}

/// Checks a certificate against `g`: coverage, zero edges in the core with
/// the padded size and edge bound, or partition sizes and the cross bound.
pub fn validate_certificate(g: &UGraph, cert: &MatchCertificate) -> bool {
    let n = g.n;
    let limit = |gp: f64| gp * (n * n) as f64 + 1e-9;
    match cert {
        MatchCertificate::PerfectMatching { edges } => is_matching(g, edges) && covered(edges) == g.vertices(),
        MatchCertificate::IndependentSet { core, set, gamma_prime } => {
            g.edges_within(*core) == 0
                && core.is_subset(*set)
                && set.len() >= n.div_ceil(2)
                && g.edges_within(*set) as f64 <= limit(*gamma_prime)
        }
        MatchCertificate::ClosePartition { a, b, cross, gamma_prime } => {
            a.is_disjoint(*b)
                && a.union(*b) == g.vertices()
                && a.len() == n / 2
                && b.len() == n.div_ceil(2)
                && *cross == g.edges_between(*a, *b)
                && *cross as f64 <= limit(*gamma_prime)
        }
    }
}

/// Digraph counterpart of [`validate_certificate`]; edges become arcs.
pub fn validate_certificate_digraph(g: &Digraph, cert: &MatchCertificate) -> bool {
    let n = g.order();
    let limit = |gp: f64| gp * (n * n) as f64 + 1e-9;
    match cert {
        MatchCertificate::PerfectMatching { edges } => {
            edges.iter().all(|&(u, v)| u < n && v < n && g.has_arc(u, v))
                && is_matching(&UGraph::underlying(g), &edges.iter().map(|&e| norm(e)).collect::<Vec<_>>())
                && covered(edges) == g.vertices()
        }
        MatchCertificate::IndependentSet { core, set, gamma_prime } => {
            g.arcs_within(*core) == 0
                && core.is_subset(*set)
                && set.len() >= n.div_ceil(2)
                && g.arcs_within(*set) as f64 <= limit(*gamma_prime)
        }
        MatchCertificate::ClosePartition { a, b, cross, gamma_prime } => {
            a.is_disjoint(*b)
                && a.union(*b) == g.vertices()
                && a.len() == n / 2
                && b.len() == n.div_ceil(2)
                && *cross == g.arcs_between(*a, *b) + g.arcs_between(*b, *a)
                && *cross as f64 <= limit(*gamma_prime)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_triangles() -> UGraph {
        UGraph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap()
    }

    #[test]
    fn blossom_on_odd_cycle_plus_tail() {
        // a 5-cycle with a pendant edge has a perfect matching only through the blossom
        let g = UGraph::from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 5)]).unwrap();
        let m = mate_to_edges(&maximum_matching(&g));
        assert_eq!(m.len(), 3);
        assert!(is_matching(&g, &m));
    }

    #[test]
    fn covering_in_complete_graph() {
        let g = UGraph::complete(6).unwrap();
        let x: VertexSet = [1, 3, 5].iter().collect();
        let m = d_matching_covering(&g, 3, x).unwrap();
        assert_eq!(m.edges.len(), 3);
        assert!(x.is_subset(covered(&m.edges)));
    }

    #[test]
    fn covering_a_star_centre() {
        let g = UGraph::from_edges(6, (1..6).map(|v| (0, v))).unwrap();
        let m = d_matching_covering(&g, 1, VertexSet::singleton(0)).unwrap();
        assert_eq!(m.edges.len(), 1);
        assert_eq!(m.edges[0].0, 0);
    }

    #[test]
    fn forced_outside_drop() {
        let g = UGraph::from_edges(6, [(0, 1), (2, 3), (0, 2), (1, 3), (4, 5), (4, 0), (5, 1)]).unwrap();
        let x: VertexSet = [4, 5].iter().collect();
        let m = d_matching_covering(&g, 2, x).unwrap();
        assert!(is_matching(&g, &m.edges));
        assert!(x.is_subset(covered(&m.edges)));
        assert_eq!(m.steps.first().map(|s| s.rule), Some(CoverRule::FreeNeighbour));
    }

    #[test]
    fn trichotomy_examples() {
        let k6 = UGraph::complete(6).unwrap();
        let cert = matching_or_certificate(&k6, 0.0).unwrap();
        assert!(matches!(cert, MatchCertificate::PerfectMatching { .. }));
        assert!(validate_certificate(&k6, &cert));

        let g = two_triangles();
        let cert = matching_or_certificate(&g, 1.0 / 6.0).unwrap();
        assert!(matches!(cert, MatchCertificate::ClosePartition { cross: 0, .. }), "{cert:?}");
        assert!(validate_certificate(&g, &cert));

        let k33 = UGraph::from_edges(6, (0..3).flat_map(|u| (3..6).map(move |v| (u, v)))).unwrap();
        let cert = matching_or_certificate(&k33, 0.0).unwrap();
        assert!(matches!(cert, MatchCertificate::PerfectMatching { .. }));
        assert!(validate_certificate(&k33, &cert));
    }

    #[test]
    fn digraph_lifting() {
        let tri = [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)];
        let g = Digraph::from_arcs(6, tri.iter().flat_map(|&(u, v)| [(u, v), (v, u)])).unwrap();
        let cert = matching_or_certificate_digraph(&g, 1.0 / 6.0).unwrap();
        assert!(matches!(cert, MatchCertificate::ClosePartition { cross: 0, .. }));
        assert!(validate_certificate_digraph(&g, &cert));
        let m = d_matching_covering_digraph(&g, 1, VertexSet::singleton(4)).unwrap();
        assert!(m.iter().all(|&(u, v)| g.has_arc(u, v)));
    }

    #[test]
    fn preconditions() {
        let g = two_triangles();
        assert!(matching_or_certificate(&g, 0.0).is_err());
        assert!(d_matching_covering(&g, 3, VertexSet::from_range(0..3)).is_err());
    }
}
