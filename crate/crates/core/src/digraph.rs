//! Loopless digraphs with at most one arc per ordered pair.
//!
//! Vertices are dense indices `0..n` with `n <= 64`; each vertex keeps an
//! out-row and an in-row as bitmasks so neighbourhood intersections are a
//! single `&`.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::vset::VertexSet;

pub type Vertex = usize;

pub const MAX_ORDER: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Digraph {
    n: usize,
    out: Vec<u64>,
    inn: Vec<u64>,
}

impl std::fmt::Debug for Digraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Digraph").field("n", &self.n).field("arcs", &self.arcs().collect::<Vec<_>>()).finish()
    }
}

/// Mutable staging area for a [`Digraph`].
#[derive(Clone, Debug)]
pub struct DigraphBuilder {
    g: Digraph,
}

impl DigraphBuilder {
    pub fn new(n: usize) -> Result<Self> {
        if n > MAX_ORDER {
            return Err(Error::TooLarge(n));
        }
        Ok(DigraphBuilder { g: Digraph { n, out: vec![0; n], inn: vec![0; n] } })
    }

    pub fn from_digraph(g: &Digraph) -> Self {
        DigraphBuilder { g: g.clone() }
    }

    pub fn order(&self) -> usize {
        self.g.n
    }

    /// Adds `u -> v`. Adding an arc twice is a no-op; loops are rejected.
    pub fn add_arc(&mut self, u: Vertex, v: Vertex) -> Result<&mut Self> {
        self.check(u, v)?;
        self.g.out[u] |= 1 << v;
        self.g.inn[v] |= 1 << u;
        Ok(self)
    }

    pub fn remove_arc(&mut self, u: Vertex, v: Vertex) -> &mut Self {
        if u < self.g.n && v < self.g.n {
            self.g.out[u] &= !(1 << v);
            self.g.inn[v] &= !(1 << u);
        }
        self
    }

    /// Adds both `u -> v` and `v -> u`.
    pub fn add_double(&mut self, u: Vertex, v: Vertex) -> Result<&mut Self> {
        self.add_arc(u, v)?;
        self.add_arc(v, u)
    }

    pub fn has_arc(&self, u: Vertex, v: Vertex) -> bool {
        self.g.has_arc(u, v)
    }

    /// Read access to the digraph under construction.
    pub fn peek(&self) -> &Digraph {
        &self.g
    }

    pub fn build(self) -> Digraph {
        self.g
    }

    fn check(&self, u: Vertex, v: Vertex) -> Result<()> {
        if u >= self.g.n || v >= self.g.n {
            return Err(Error::domain(format!("arc ({u},{v}) outside 0..{}", self.g.n)));
        }
        if u == v {
            return Err(Error::domain(format!("loop at vertex {u}")));
        }
        Ok(())
    }
}

impl Digraph {
    pub fn empty(n: usize) -> Result<Self> {
        Ok(DigraphBuilder::new(n)?.build())
    }

    /// Complete digraph: every ordered pair of distinct vertices is an arc.
    pub fn complete(n: usize) -> Result<Self> {
        let mut b = DigraphBuilder::new(n)?;
        for u in 0..n {
            for v in 0..n {
                if u != v {
                    b.add_arc(u, v)?;
                }
            }
        }
        Ok(b.build())
    }

    pub fn from_arcs<I>(n: usize, arcs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut b = DigraphBuilder::new(n)?;
        for (u, v) in arcs {
            b.add_arc(u, v)?;
        }
        Ok(b.build())
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.n)
    }

    #[inline]
    pub fn has_arc(&self, u: Vertex, v: Vertex) -> bool {
        u < self.n && v < self.n && self.out[u] >> v & 1 == 1
    }

    #[inline]
    pub fn out_set(&self, v: Vertex) -> VertexSet {
        VertexSet(self.out[v])
    }

    #[inline]
    pub fn in_set(&self, v: Vertex) -> VertexSet {
        VertexSet(self.inn[v])
    }

    /// Vertices joined to `v` by an arc in either direction.
    #[inline]
    pub fn neighbours(&self, v: Vertex) -> VertexSet {
        VertexSet(self.out[v] | self.inn[v])
    }

    /// Vertices joined to `v` by arcs in both directions.
    #[inline]
    pub fn double_neighbours(&self, v: Vertex) -> VertexSet {
        VertexSet(self.out[v] & self.inn[v])
    }

    #[inline]
    pub fn out_degree(&self, v: Vertex) -> usize {
        self.out[v].count_ones() as usize
    }

    #[inline]
    pub fn in_degree(&self, v: Vertex) -> usize {
        self.inn[v].count_ones() as usize
    }

    /// `d(v) = d+(v) + d-(v)`; a double edge counts twice.
    #[inline]
    pub fn degree(&self, v: Vertex) -> usize {
        self.out_degree(v) + self.in_degree(v)
    }

    /// Number of arcs from `v` into `set`.
    #[inline]
    pub fn out_degree_in(&self, v: Vertex, set: VertexSet) -> usize {
        (self.out[v] & set.0).count_ones() as usize
    }

    /// Number of arcs from `set` into `v`.
    #[inline]
    pub fn in_degree_in(&self, v: Vertex, set: VertexSet) -> usize {
        (self.inn[v] & set.0).count_ones() as usize
    }

    pub fn arc_count(&self) -> usize {
        self.out.iter().map(|r| r.count_ones() as usize).sum()
    }

    /// Arcs in lexicographic order of `(tail, head)`.
    pub fn arcs(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        (0..self.n).flat_map(move |u| VertexSet(self.out[u]).iter().map(move |v| (u, v)))
    }

    /// `e(G[S])`.
    pub fn arcs_within(&self, set: VertexSet) -> usize {
        set.iter().map(|v| self.out_degree_in(v, set)).sum()
    }

    /// Arcs with one endpoint in `a` and the other in `b` (either direction).
    pub fn arcs_between(&self, a: VertexSet, b: VertexSet) -> usize {
        a.iter().map(|v| self.out_degree_in(v, b) + self.in_degree_in(v, b)).sum()
    }

    /// `delta^0(G)`: minimum over vertices of `min(d+, d-)`.
    pub fn min_semidegree(&self) -> Result<usize> {
        self.min_over(|v| self.out_degree(v).min(self.in_degree(v)))
    }

    /// `delta(G)`: minimum over vertices of `d+ + d-`.
    pub fn total_min_degree(&self) -> Result<usize> {
        self.min_over(|v| self.degree(v))
    }

    pub fn min_out_degree(&self) -> Result<usize> {
        self.min_over(|v| self.out_degree(v))
    }

    pub fn min_in_degree(&self) -> Result<usize> {
        self.min_over(|v| self.in_degree(v))
    }

    fn min_over(&self, f: impl Fn(Vertex) -> usize) -> Result<usize> {
        (0..self.n).map(f).min().ok_or_else(|| Error::domain("digraph has no vertices"))
    }

    /// `G[X]` relabelled to `0..|X|`; the returned vector maps new indices back.
    pub fn induced(&self, set: VertexSet) -> (Digraph, Vec<Vertex>) {
        let map = set.to_vec();
        let mut pos = [usize::MAX; MAX_ORDER];
        for (i, &v) in map.iter().enumerate() {
            pos[v] = i;
        }
        let k = map.len();
        let mut out = vec![0u64; k];
        let mut inn = vec![0u64; k];
        for (i, &u) in map.iter().enumerate() {
            for v in VertexSet(self.out[u] & set.0) {
                out[i] |= 1 << pos[v];
                inn[pos[v]] |= 1 << i;
            }
        }
        (Digraph { n: k, out, inn }, map)
    }

    /// The spanning subdigraph keeping only arcs of `self` inside `set`.
    pub fn restrict(&self, set: VertexSet) -> Digraph {
        let mut g = self.clone();
        for v in 0..self.n {
            if set.contains(v) {
                g.out[v] &= set.0;
                g.inn[v] &= set.0;
            } else {
                g.out[v] = 0;
                g.inn[v] = 0;
            }
        }
        g
    }

    /// `G[X,Y]`: arcs of `G` from `X` to `Y`, on the full vertex set.
    pub fn arcs_from_to(&self, from: VertexSet, to: VertexSet) -> Digraph {
        let mut g = Digraph { n: self.n, out: vec![0; self.n], inn: vec![0; self.n] };
        for u in from {
            let row = self.out[u] & to.0;
            g.out[u] = row;
            for v in VertexSet(row) {
                g.inn[v] |= 1 << u;
            }
        }
        g
    }

    /// `G ∪ H` on a common vertex set.
    pub fn union(&self, other: &Digraph) -> Result<Digraph> {
        self.same_order(other)?;
        Ok(Digraph {
            n: self.n,
            out: self.out.iter().zip(&other.out).map(|(a, b)| a | b).collect(),
            inn: self.inn.iter().zip(&other.inn).map(|(a, b)| a | b).collect(),
        })
    }

    /// `G - H`: arcs of `G` not in `H`.
    pub fn difference(&self, other: &Digraph) -> Result<Digraph> {
        self.same_order(other)?;
        Ok(Digraph {
            n: self.n,
            out: self.out.iter().zip(&other.out).map(|(a, b)| a & !b).collect(),
            inn: self.inn.iter().zip(&other.inn).map(|(a, b)| a & !b).collect(),
        })
    }

    fn same_order(&self, other: &Digraph) -> Result<()> {
        if self.n != other.n {
            return Err(Error::domain(format!("orders differ: {} vs {}", self.n, other.n)));
        }
        Ok(())
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn permuted(&self, perm: &[Vertex]) -> Result<Digraph> {
        let mut seen = VertexSet::EMPTY;
        for &p in perm {
            if p >= self.n || seen.contains(p) {
                return Err(Error::domain("not a permutation"));
            }
            seen.insert(p);
        }
        if perm.len() != self.n {
            return Err(Error::domain("permutation length differs from order"));
        }
        Digraph::from_arcs(self.n, self.arcs().map(|(u, v)| (perm[u], perm[v])))
    }

    /// The digraph with every arc reversed.
    pub fn reversed(&self) -> Digraph {
        Digraph { n: self.n, out: self.inn.clone(), inn: self.out.clone() }
    }

    /// Edge-list text: first line `n`, then one `u v` line per arc.
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("{}\n", self.n);
        for (u, v) in self.arcs() {
            let _ = writeln!(s, "{u} {v}");
        }
        s
    }

    /// Parses the edge-list format. Duplicate arcs and loops are errors;
    /// blank lines and `#` comments are skipped.
    pub fn parse_edge_list(text: &str) -> Result<Digraph> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (first_line, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "missing vertex count".into() })?;
        let n: usize = header
            .parse()
            .map_err(|_| Error::Parse { line: first_line, msg: format!("expected vertex count, found `{header}`") })?;
        let mut b = DigraphBuilder::new(n)?;
        for (line, l) in lines {
            let mut it = l.split_whitespace();
            let parse = |tok: Option<&str>| -> Result<Vertex> {
                let tok = tok.ok_or(Error::Parse { line, msg: "expected `u v`".into() })?;
                tok.parse().map_err(|_| Error::Parse { line, msg: format!("bad vertex `{tok}`") })
            };
            let u = parse(it.next())?;
            let v = parse(it.next())?;
            if it.next().is_some() {
                return Err(Error::Parse { line, msg: "trailing tokens".into() });
            }
            if u == v {
                return Err(Error::Parse { line, msg: format!("loop at {u}") });
            }
            if u >= n || v >= n {
                return Err(Error::Parse { line, msg: format!("vertex out of range 0..{n}") });
            }
            if b.has_arc(u, v) {
                return Err(Error::Parse { line, msg: format!("duplicate arc {u} {v}") });
            }
            b.add_arc(u, v)?;
        }
        Ok(b.build())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Digraph> {
        Digraph::parse_edge_list(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_edge_list())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle3() -> Digraph {
        Digraph::from_arcs(3, [(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    #[test]
    fn degrees_of_small_digraphs() {
        let k5 = Digraph::complete(5).unwrap();
        assert_eq!(k5.min_semidegree().unwrap(), 4);
        assert_eq!(k5.total_min_degree().unwrap(), 8);
        assert_eq!(k5.arc_count(), 20);
        let c3 = cycle3();
        assert_eq!(c3.min_semidegree().unwrap(), 1);
        assert_eq!(c3.total_min_degree().unwrap(), 2);
    }

    #[test]
    fn empty_order_is_domain_error() {
        let g = Digraph::empty(0).unwrap();
        assert!(matches!(g.min_semidegree(), Err(Error::Domain(_))));
        assert!(matches!(g.total_min_degree(), Err(Error::Domain(_))));
    }

    #[test]
    fn loops_and_oversize_rejected() {
        assert!(Digraph::from_arcs(3, [(1, 1)]).is_err());
        assert!(matches!(Digraph::empty(65), Err(Error::TooLarge(65))));
    }

    #[test]
    fn induced_relabels() {
        let g = Digraph::complete(5).unwrap();
        let (h, map) = g.induced([1, 3, 4].iter().collect());
        assert_eq!(map, vec![1, 3, 4]);
        assert_eq!(h.order(), 3);
        assert_eq!(h.arc_count(), 6);
    }

    #[test]
    fn edge_list_round_trip_and_errors() {
        let g = cycle3();
        let text = g.to_edge_list();
        assert_eq!(text, "3\n0 1\n1 2\n2 0\n");
        assert_eq!(Digraph::parse_edge_list(&text).unwrap(), g);
        assert!(matches!(Digraph::parse_edge_list("3\n0 1\n0 1\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(Digraph::parse_edge_list("3\n2 2\n"), Err(Error::Parse { line: 2, .. })));
        assert!(Digraph::parse_edge_list("3\n0 5\n").is_err());
        assert!(Digraph::parse_edge_list("").is_err());
    }

    #[test]
    fn cross_and_set_operations() {
        let g = Digraph::complete(4).unwrap();
        let a: VertexSet = [0, 1].iter().collect();
        let b: VertexSet = [2, 3].iter().collect();
        let h = g.arcs_from_to(a, b);
        assert_eq!(h.arc_count(), 4);
        assert!(h.has_arc(0, 2) && !h.has_arc(2, 0));
        assert_eq!(g.arcs_between(a, b), 8);
        assert_eq!(g.difference(&h).unwrap().arc_count(), 8);
        assert_eq!(g.difference(&h).unwrap().union(&h).unwrap(), g);
        assert_eq!(g.arcs_within(a), 2);
    }
}
