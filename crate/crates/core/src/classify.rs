//! Vertex classifications relative to a partition `A_1, ..., A_s, B`.
//!
//! All flags are computed against the classes as passed in, so callers that
//! move vertices between classes reclassify against the current classes.

use serde::Serialize;

use crate::digraph::{Digraph, Vertex};
use crate::error::{Error, Result};
use crate::vset::VertexSet;

const EPS: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassPartition {
    pub classes: Vec<VertexSet>,
    /// Possibly empty.
    pub b: VertexSet,
}

impl ClassPartition {
    pub fn new(classes: Vec<VertexSet>, b: VertexSet) -> Self {
        ClassPartition { classes, b }
    }

    /// Index of the class holding `v`, `None` for `B` or unassigned vertices.
    pub fn class_of(&self, v: Vertex) -> Option<usize> {
        self.classes.iter().position(|c| c.contains(v))
    }

    /// Pairwise disjoint and covering `0..n`.
    pub fn covers(&self, n: usize) -> bool {
        let mut seen = VertexSet::EMPTY;
        for &c in self.classes.iter().chain(std::iter::once(&self.b)) {
            if !c.is_disjoint(seen) {
                return false;
            }
            seen = seen.union(c);
        }
        seen == VertexSet::full(n)
    }
}

/// Flags of one vertex; per-class vectors are indexed by class and are
/// `false` at the vertex's own class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VertexFlags {
    pub vertex: Vertex,
    pub class: Option<usize>,
    /// `(δ, i)`-bad for its own class `i`; false for vertices of `B`.
    pub bad: bool,
    pub exceptional: Vec<bool>,
    pub acceptable: Vec<bool>,
    pub excellent: Vec<bool>,
    /// `(δ, B)`-excellent; `None` for vertices of `B`.
    pub b_excellent: Option<bool>,
    /// Present only for three-class partitions with empty `B`.
    pub internally_excellent: Option<bool>,
    pub externally_excellent: Option<bool>,
}

impl VertexFlags {
    pub fn good(&self) -> bool {
        self.class.is_some() && !self.bad
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VertexClassification {
    pub delta: f64,
    pub n: usize,
    pub flags: Vec<VertexFlags>,
}

impl VertexClassification {
    pub fn bad_vertices(&self, class: usize) -> VertexSet {
        self.flags.iter().filter(|f| f.class == Some(class) && f.bad).map(|f| f.vertex).collect()
    }

    pub fn exceptional_vertices(&self, class: usize) -> VertexSet {
        self.flags.iter().filter(|f| f.exceptional[class]).map(|f| f.vertex).collect()
    }

    pub fn internally_bad(&self) -> VertexSet {
        self.flags.iter().filter(|f| f.internally_excellent == Some(false)).map(|f| f.vertex).collect()
    }

    pub fn externally_bad(&self) -> VertexSet {
        self.flags.iter().filter(|f| f.externally_excellent == Some(false)).map(|f| f.vertex).collect()
    }
}

/// Sends at least `(1-δ)|to|` arcs into `to` and receives at least
/// `(1-δ)|from|` from `from`, with `x` itself excluded from both counts.
fn sends_and_receives(g: &Digraph, x: Vertex, to: VertexSet, from: VertexSet, delta: f64) -> bool {
    let to = to.without(x);
    let from = from.without(x);
    g.out_degree_in(x, to) as f64 >= (1.0 - delta) * to.len() as f64 - EPS
        && g.in_degree_in(x, from) as f64 >= (1.0 - delta) * from.len() as f64 - EPS
}

/// Internal excellence in class `i`: `(1-δ)(|A_i| - 1)` both ways inside `A_i`.
pub fn internally_excellent(g: &Digraph, x: Vertex, class: VertexSet, delta: f64) -> bool {
    sends_and_receives(g, x, class, class, delta)
}

/// External excellence for `x in A_i`: out to `A_{i+1}`, in from `A_{i-1}`.
pub fn externally_excellent(g: &Digraph, x: Vertex, classes: &[VertexSet; 3], i: usize, delta: f64) -> bool {
    sends_and_receives(g, x, classes[(i + 1) % 3], classes[(i + 2) % 3], delta)
}

pub fn classify_vertices(g: &Digraph, partition: &ClassPartition, delta: f64) -> Result<VertexClassification> {
    let n = g.order();
    if !partition.covers(n) {
        return Err(Error::domain("classes and B must partition the vertex set"));
    }
    let dn = delta * n as f64;
    let s = partition.classes.len();
    let three =
        (s == 3 && partition.b.is_empty()).then(|| [partition.classes[0], partition.classes[1], partition.classes[2]]);
    let flags = (0..n)
        .map(|x| {
            let class = partition.class_of(x);
            let bad = class.is_some_and(|i| {
                let a = partition.classes[i];
                g.out_degree_in(x, a) as f64 >= dn - EPS || g.in_degree_in(x, a) as f64 >= dn - EPS
            });
            let mut exceptional = vec![false; s];
            let mut acceptable = vec![false; s];
            let mut excellent = vec![false; s];
            for (i, &a) in partition.classes.iter().enumerate() {
                if a.contains(x) {
                    continue;
                }
                let (dout, din) = (g.out_degree_in(x, a) as f64, g.in_degree_in(x, a) as f64);
                exceptional[i] = dout <= dn + EPS && din <= dn + EPS;
                acceptable[i] = !exceptional[i];
                let need = a.len() as f64 - dn;
                excellent[i] = dout >= need - EPS && din >= need - EPS;
            }
            let b = partition.b;
            let b_excellent = (!b.contains(x)).then(|| {
                let need = b.len() as f64 - dn;
                g.out_degree_in(x, b) as f64 >= need - EPS && g.in_degree_in(x, b) as f64 >= need - EPS
            });
            let (internally_excellent, externally_excellent) = match (three, class) {
                (Some(cls), Some(i)) => {
                    (Some(internally_excellent(g, x, cls[i], delta)), Some(externally_excellent(g, x, &cls, i, delta)))
                }
                _ => (None, None),
            };
            VertexFlags {
                vertex: x,
                class,
                bad,
                exceptional,
                acceptable,
                excellent,
                b_excellent,
                internally_excellent,
                externally_excellent,
            }
        })
        .collect();
    Ok(VertexClassification { delta, n, flags })
}
