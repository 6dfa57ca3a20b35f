//! Small pattern digraphs: tournaments (`T_r`, `C_3`, ...), complete digraphs
//! `K_r` and `K_r^-`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Serialize, Serializer};

use crate::digraph::{Digraph, Vertex};
use crate::error::{Error, Result};
use crate::vset::{Combinations, VertexSet};

/// Largest pattern order accepted anywhere in the crate.
pub const MAX_PATTERN_ORDER: usize = 8;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Pattern {
    name: String,
    g: Digraph,
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pattern({}: {:?})", self.name, self.g.arcs().collect::<Vec<_>>())
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl Serialize for Pattern {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.name)
    }
}

impl Pattern {
    pub fn new(name: impl Into<String>, g: Digraph) -> Result<Self> {
        if g.order() == 0 || g.order() > MAX_PATTERN_ORDER {
            return Err(Error::domain(format!("pattern order {} outside 1..={MAX_PATTERN_ORDER}", g.order())));
        }
        Ok(Pattern { name: name.into(), g })
    }

    /// Complete digraph `K_r` (double edge on every pair).
    pub fn complete(r: usize) -> Result<Self> {
        Pattern::new(format!("k{r}"), Digraph::complete(r)?)
    }

    /// `K_r^-`: the complete digraph minus the arc `1 -> 0`.
    pub fn complete_minus(r: usize) -> Result<Self> {
        if r < 2 {
            return Err(Error::domain("K_r^- needs r >= 2"));
        }
        let g = Digraph::complete(r)?;
        let missing = Digraph::from_arcs(r, [(1, 0)])?;
        Pattern::new(format!("k{r}-"), g.difference(&missing)?)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.g.order()
    }

    pub fn digraph(&self) -> &Digraph {
        &self.g
    }

    pub fn has_arc(&self, u: Vertex, v: Vertex) -> bool {
        self.g.has_arc(u, v)
    }

    /// True when every pair of pattern vertices is joined by at least one arc.
    pub fn is_complete_underlying(&self) -> bool {
        let r = self.order();
        (0..r).all(|v| self.g.neighbours(v).len() == r - 1)
    }

    /// True when every pair carries arcs in both directions.
    pub fn needs_double_edges(&self) -> bool {
        let r = self.order();
        (0..r).all(|v| self.g.double_neighbours(v).len() == r - 1)
    }

    /// Same arc set, ignoring names.
    pub fn same_digraph(&self, other: &Pattern) -> bool {
        self.g == other.g
    }

    /// Canonical adjacency code: the lexicographically smallest arc bitmask over
    /// all relabellings. Brute force over `r!` permutations.
    pub fn canonical_code(&self) -> u64 {
        canonical_code(&self.g)
    }

    pub fn is_isomorphic(&self, other: &Pattern) -> bool {
        self.order() == other.order()
            && self.g.arc_count() == other.g.arc_count()
            && self.canonical_code() == other.canonical_code()
    }

    /// Induced subpatterns on every `i`-subset of vertices, one per isomorphism class.
    pub fn subpatterns(&self, i: usize) -> Vec<Pattern> {
        let mut seen: BTreeMap<u64, Pattern> = BTreeMap::new();
        for idx in Combinations::new(self.order(), i) {
            let set: VertexSet = idx.iter().collect();
            let (h, _) = self.g.induced(set);
            if h.order() == 0 {
                continue;
            }
            seen.entry(canonical_code(&h))
                .or_insert_with(|| Pattern { name: format!("{}[{:?}]", self.name, idx), g: h });
        }
        seen.into_values().collect()
    }
}

fn canonical_code(g: &Digraph) -> u64 {
    let r = g.order();
    let mut perm: Vec<usize> = (0..r).collect();
    let mut best = u64::MAX;
    loop {
        let mut code = 0u64;
        for (u, v) in g.arcs() {
            code |= 1 << (perm[u] * r + perm[v]);
        }
        best = best.min(code);
        if !next_permutation(&mut perm) {
            break;
        }
    }
    best
}

/// Advances to the next lexicographic permutation; false after the last one.
pub(crate) fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// A pattern with exactly one arc between every pair of vertices.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Tournament(Pattern);

impl Tournament {
    pub fn new(name: impl Into<String>, g: Digraph) -> Result<Self> {
        let r = g.order();
        for u in 0..r {
            for v in u + 1..r {
                if g.has_arc(u, v) == g.has_arc(v, u) {
                    return Err(Error::domain(format!("not a tournament: pair ({u},{v}) must carry exactly one arc")));
                }
            }
        }
        Ok(Tournament(Pattern::new(name, g)?))
    }

    /// `T_r`: arc `i -> j` iff `i < j`, so vertex `i` (0-based) has indegree `i`.
    pub fn transitive(r: usize) -> Result<Self> {
        let arcs = (0..r).flat_map(|i| (i + 1..r).map(move |j| (i, j)));
        Tournament::new(format!("t{r}"), Digraph::from_arcs(r, arcs)?)
    }

    /// The cyclic triangle `0 -> 1 -> 2 -> 0`.
    pub fn cyclic_triangle() -> Self {
        Tournament::new("c3", Digraph::from_arcs(3, [(0, 1), (1, 2), (2, 0)]).unwrap()).unwrap()
    }

    /// Resolves `t3`, `c3`, `t<r>` or `tour:<file>`.
    pub fn by_name(name: &str) -> Result<Self> {
        let name = name.trim();
        if let Some(path) = name.strip_prefix("tour:") {
            return Tournament::load(path);
        }
        match name.to_ascii_lowercase().as_str() {
            "c3" => Ok(Tournament::cyclic_triangle()),
            s if s.starts_with('t') => {
                let r: usize = s[1..].parse().map_err(|_| Error::domain(format!("unknown tournament `{name}`")))?;
                if r == 0 || r > MAX_PATTERN_ORDER {
                    return Err(Error::domain(format!("T_{r} outside supported orders")));
                }
                Tournament::transitive(r)
            }
            _ => Err(Error::domain(format!("unknown tournament `{name}`"))),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let g = Digraph::load(path.as_ref())?;
        Tournament::new(format!("tour:{}", path.as_ref().display()), g)
    }

    pub fn pattern(&self) -> &Pattern {
        &self.0
    }

    pub fn into_pattern(self) -> Pattern {
        self.0
    }

    pub fn order(&self) -> usize {
        self.0.order()
    }

    pub fn name(&self) -> &str {
        self.0.name()
    }

    pub fn is_transitive(&self) -> bool {
        let r = self.order();
        let mut outs: Vec<usize> = (0..r).map(|v| self.0.g.out_degree(v)).collect();
        outs.sort_unstable();
        outs.iter().enumerate().all(|(i, &d)| d == i)
    }

    pub fn is_cyclic_triangle(&self) -> bool {
        self.order() == 3 && !self.is_transitive()
    }

    /// True when every vertex has an in-neighbour (no source vertex).
    pub fn has_no_source(&self) -> bool {
        (0..self.order()).all(|v| self.0.g.in_degree(v) > 0)
    }
}

impl std::ops::Deref for Tournament {
    type Target = Pattern;
    fn deref(&self) -> &Pattern {
        &self.0
    }
}

impl AsRef<Pattern> for Tournament {
    fn as_ref(&self) -> &Pattern {
        &self.0
    }
}

impl AsRef<Pattern> for Pattern {
    fn as_ref(&self) -> &Pattern {
        self
    }
}

/// Resolves a pattern name: any tournament name plus `k<r>` and `k<r>-`.
pub fn pattern_by_name(name: &str) -> Result<Pattern> {
    let s = name.trim().to_ascii_lowercase();
    if let Some(rest) = s.strip_prefix('k') {
        let (digits, minus) = match rest.strip_suffix('-') {
            Some(d) => (d, true),
            None => match rest.strip_suffix("minus") {
                Some(d) => (d, true),
                None => (rest, false),
            },
        };
        let r: usize = digits.parse().map_err(|_| Error::domain(format!("unknown pattern `{name}`")))?;
        if r == 0 || r > MAX_PATTERN_ORDER {
            return Err(Error::domain(format!("K_{r} outside supported orders")));
        }
        return if minus { Pattern::complete_minus(r) } else { Pattern::complete(r) };
    }
    Tournament::by_name(name).map(Tournament::into_pattern)
}

/// Every tournament on `r` vertices up to isomorphism, ordered by canonical code.
pub fn all_tournaments(r: usize) -> Result<Vec<Tournament>> {
    if r == 0 || r > 6 {
        return Err(Error::Refused(format!("enumerating all tournaments of order {r} (limit 6)")));
    }
    let pairs: Vec<(usize, usize)> = (0..r).flat_map(|i| (i + 1..r).map(move |j| (i, j))).collect();
    let mut classes: BTreeMap<u64, Digraph> = BTreeMap::new();
    for mask in 0u64..1 << pairs.len() {
        let arcs = pairs.iter().enumerate().map(|(k, &(i, j))| if mask >> k & 1 == 1 { (j, i) } else { (i, j) });
        let g = Digraph::from_arcs(r, arcs)?;
        classes.entry(canonical_code(&g)).or_insert(g);
    }
    classes.into_values().enumerate().map(|(k, g)| Tournament::new(format!("tour{r}.{k}"), g)).collect()
}
