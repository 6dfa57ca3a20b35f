//! Subdigraph embeddings of patterns into host digraphs.
//!
//! Containment is not induced: an embedding only requires every pattern arc
//! to land on a host arc.

use serde::Serialize;

use crate::digraph::{Digraph, Vertex};
use crate::error::{Error, Result};
use crate::pattern::Pattern;
use crate::vset::VertexSet;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Embedding {
    pub pattern: Pattern,
    /// `image[i]` is the host vertex playing pattern vertex `i`.
    pub image: Vec<Vertex>,
}

impl Embedding {
    pub fn vertex_set(&self) -> VertexSet {
        self.image.iter().collect()
    }

    /// Injective, and every pattern arc maps onto a host arc.
    pub fn is_valid_in(&self, g: &Digraph) -> bool {
        let r = self.pattern.order();
        self.image.len() == r
            && self.image.iter().all(|&v| v < g.order())
            && self.vertex_set().len() == r
            && self.pattern.digraph().arcs().all(|(a, b)| g.has_arc(self.image[a], self.image[b]))
    }
}

/// Depth-first embedding search.
///
/// Pattern vertices are placed in index order; host candidates are tried in
/// ascending order after filtering by arcs to already placed vertices and by
/// the pattern's degree signature inside `allowed`. `visit` returns `false` to
/// stop the search.
pub(crate) fn search_embeddings(
    g: &Digraph,
    pattern: &Pattern,
    allowed: VertexSet,
    visit: &mut dyn FnMut(&[Vertex]) -> bool,
) {
    let p = pattern.digraph();
    let r = p.order();
    // host vertices eligible for each pattern vertex by degree signature
    let mut eligible = vec![VertexSet::EMPTY; r];
    for (i, slot) in eligible.iter_mut().enumerate() {
        let (need_out, need_in) = (p.out_degree(i), p.in_degree(i));
        *slot = allowed
            .iter()
            .filter(|&v| g.out_degree_in(v, allowed) >= need_out && g.in_degree_in(v, allowed) >= need_in)
            .collect();
    }
    let mut image = vec![0; r];
    dfs(g, p, &eligible, 0, VertexSet::EMPTY, &mut image, visit);
}

fn dfs(
    g: &Digraph,
    p: &Digraph,
    eligible: &[VertexSet],
    i: usize,
    used: VertexSet,
    image: &mut Vec<Vertex>,
    visit: &mut dyn FnMut(&[Vertex]) -> bool,
) -> bool {
    if i == p.order() {
        return visit(image);
    }
    let mut cand = eligible[i].difference(used);
    for (j, &w) in image[..i].iter().enumerate() {
        if p.has_arc(j, i) {
            cand = cand.intersection(g.out_set(w));
        }
        if p.has_arc(i, j) {
            cand = cand.intersection(g.in_set(w));
        }
    }
    for v in cand {
        image[i] = v;
        if !dfs(g, p, eligible, i + 1, used.with(v), image, visit) {
            return false;
        }
    }
    true
}

/// First embedding (in the search order above) whose image lies in `allowed`.
pub fn find_embedding(g: &Digraph, pattern: &Pattern, allowed: VertexSet) -> Option<Vec<Vertex>> {
    let mut found = None;
    search_embeddings(g, pattern, allowed, &mut |img| {
        found = Some(img.to_vec());
        false
    });
    found
}

/// Does the `r`-set `set` span a copy of `pattern` in `g`?
pub fn spans_copy(g: &Digraph, set: VertexSet, pattern: &Pattern) -> Result<Option<Embedding>> {
    if set.len() != pattern.order() {
        return Err(Error::domain(format!("vertex set has {} vertices, pattern has {}", set.len(), pattern.order())));
    }
    if !set.is_subset(g.vertices()) {
        return Err(Error::domain("vertex set not contained in the host"));
    }
    Ok(find_embedding(g, pattern, set).map(|image| Embedding { pattern: pattern.clone(), image }))
}

/// Every vertex set in `allowed` spanning a copy of `pattern`, sorted and
/// deduplicated. Sets are grown as cliques of the host's underlying graph
/// when the pattern's underlying graph is complete, which prunes most of the
/// `C(n, r)` candidates on sparse hosts.
pub fn spanning_sets(g: &Digraph, pattern: &Pattern, allowed: VertexSet) -> Vec<VertexSet> {
    let r = pattern.order();
    let mut out = Vec::new();
    if pattern.is_complete_underlying() {
        let adj: Vec<VertexSet> = (0..g.order())
            .map(|v| if pattern.needs_double_edges() { g.double_neighbours(v) } else { g.neighbours(v) })
            .collect();
        grow_cliques(&adj, r, VertexSet::EMPTY, allowed, &mut |set| {
            if find_embedding(g, pattern, set).is_some() {
                out.push(set);
            }
        });
    } else {
        for set in crate::vset::subsets_of_size(allowed, r) {
            if find_embedding(g, pattern, set).is_some() {
                out.push(set);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Enumerates `k`-cliques of an undirected adjacency (given as bitmasks) whose
/// vertices lie in `cand`, each exactly once.
pub(crate) fn grow_cliques(
    adj: &[VertexSet],
    k: usize,
    current: VertexSet,
    cand: VertexSet,
    emit: &mut dyn FnMut(VertexSet),
) {
    if current.len() == k {
        emit(current);
        return;
    }
    if current.len() + cand.len() < k {
        return;
    }
    let mut rest = cand;
    while let Some(v) = rest.first() {
        rest.remove(v);
        grow_cliques(adj, k, current.with(v), rest.intersection(adj[v]), emit);
        if current.len() + rest.len() < k {
            break;
        }
    }
}
