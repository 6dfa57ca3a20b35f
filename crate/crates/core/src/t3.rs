//! Perfect `T_3`-packings under the out-or-in-degree condition: every vertex has
//! `d^+ >= 2n/3` or `d^- >= 2n/3`.
//!
//! The pipeline removes arcs greedily while the degree condition survives, packs the
//! underlying graph with triangles (each triangle spans `T_3` or `C_3`), and
//! then trades `C_3` elements for `T_3` elements one at a time.

use serde::Serialize;

use crate::constructions::{cond_4_1_threshold, satisfies_cond_4_1};
use crate::digraph::{Digraph, DigraphBuilder, Vertex};
use crate::embed::{find_embedding, Embedding};
use crate::error::{Error, Result};
use crate::pattern::{Pattern, Tournament};
use crate::solver::{find_perfect_family_packing, Packing, Verdict, DEFAULT_BUDGET};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SwapRule {
    /// The `C_3` triple also spans `T_3`.
    InPlace,
    /// An element receives at least 7 arcs from the triple.
    ExchangeOut,
    /// An element sends at least 7 arcs to the triple.
    ExchangeIn,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SwapStep {
    pub rule: SwapRule,
    pub removed: Vec<Embedding>,
    pub inserted: Vec<Embedding>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SwapTrace {
    pub steps: Vec<SwapStep>,
}

#[derive(Clone, Debug, Serialize)]
pub struct T3Outcome {
    pub packing: Packing,
    pub trace: SwapTrace,
    /// Arcs of the locally minimal subdigraph the swaps ran on.
    pub minimized_arcs: usize,
}

fn t3() -> Pattern {
    Tournament::transitive(3).expect("T_3").into_pattern()
}

fn c3() -> Pattern {
    Tournament::cyclic_triangle().into_pattern()
}

fn check_cond_4_1(g: &Digraph) -> Result<()> {
    if g.order() == 0 || !satisfies_cond_4_1(g) {
        let t = cond_4_1_threshold(g.order());
        let bad = g.vertices().iter().find(|&v| g.out_degree(v) < t && g.in_degree(v) < t);
        return Err(Error::domain(format!(
            "degree condition fails: vertex {bad:?} has neither outdegree nor indegree >= {t}"
        )));
    }
    Ok(())
}

/// Greedy arc removal preserving the degree condition, scanning arcs in lexicographic order
/// until a full pass removes nothing. No single arc of the result can be
/// removed without breaking the degree condition.
pub fn minimize_edges_4_1(g: &Digraph) -> Result<Digraph> {
    check_cond_4_1(g)?;
    let t = cond_4_1_threshold(g.order());
    let mut b = DigraphBuilder::from_digraph(g);
    loop {
        let mut changed = false;
        let arcs: Vec<(Vertex, Vertex)> = b.peek().arcs().collect();
        for (u, v) in arcs {
            let h = b.peek();
            let u_ok = h.out_degree(u) > t || h.in_degree(u) >= t;
            let v_ok = h.in_degree(v) > t || h.out_degree(v) >= t;
            if u_ok && v_ok {
                b.remove_arc(u, v);
                changed = true;
            }
        }
        if !changed {
            return Ok(b.build());
        }
    }
}

/// No arc of `g` can be removed while keeping the degree condition.
pub fn is_locally_minimal_4_1(g: &Digraph) -> bool {
    let t = cond_4_1_threshold(g.order());
    g.arcs().all(|(u, v)| {
        let u_ok = g.out_degree(u) > t || g.in_degree(u) >= t;
        let v_ok = g.in_degree(v) > t || g.out_degree(v) >= t;
        !(u_ok && v_ok)
    })
}

/// One improving move on the `C_3` element at `idx`, or `None` if no rule applies.
pub fn swap_c3(g: &Digraph, packing: &Packing, idx: usize) -> Result<Option<(Packing, SwapStep)>> {
    let c3 = c3();
    let element =
        packing.elements.get(idx).ok_or_else(|| Error::domain(format!("element index {idx} out of range")))?;
    if !element.pattern.same_digraph(&c3) {
        return Err(Error::domain(format!("element {idx} is not a C3")));
    }
    let t3 = t3();
    let triple = element.vertex_set();

    if let Some(image) = find_embedding(g, &t3, triple) {
        let inserted = Embedding { pattern: t3, image };
        let mut next = packing.clone();
        next.elements[idx] = inserted.clone();
        let step = SwapStep { rule: SwapRule::InPlace, removed: vec![element.clone()], inserted: vec![inserted] };
        return Ok(Some((next, step)));
    }

    for outward in [true, false] {
        let Some((j, first, second)) = exchange(g, packing, idx, outward) else {
            continue;
        };
        let removed = vec![element.clone(), packing.elements[j].clone()];
        let mut next = packing.clone();
        next.elements[idx] = first.clone();
        next.elements[j] = second.clone();
        let rule = if outward { SwapRule::ExchangeOut } else { SwapRule::ExchangeIn };
        return Ok(Some((next, SwapStep { rule, removed, inserted: vec![first, second] })));
    }
    Ok(None)
}

/// The exchange of two elements into two `T_3`s. With `outward`, an element
/// `T` receiving at least 7 arcs from the triple, a triple vertex `x` sending
/// to all of `V(T)`, and a common out-neighbour `w in V(T)` of the other two
/// give `T_3`s on `{y, z, w}` and `{x} + V(T) - w`. The inward case mirrors it.
fn exchange(g: &Digraph, packing: &Packing, idx: usize, outward: bool) -> Option<(usize, Embedding, Embedding)> {
    let triple = packing.elements[idx].vertex_set();
    let toward = |x: Vertex| if outward { g.out_set(x) } else { g.in_set(x) };
    let t3 = t3();
    for (j, other) in packing.elements.iter().enumerate() {
        if j == idx {
            continue;
        }
        let target = other.vertex_set();
        let arcs: usize = triple.iter().map(|x| toward(x).intersection(target).len()).sum();
        if arcs < 7 {
            continue;
        }
        for x in triple {
            if toward(x).intersection(target) != target {
                continue;
            }
            let rest = triple.without(x);
            let common = rest.iter().fold(target, |acc, y| acc.intersection(toward(y)));
            let Some(w) = common.first() else { continue };
            let a = rest.with(w);
            let b = target.without(w).with(x);
            let (Some(ia), Some(ib)) = (find_embedding(g, &t3, a), find_embedding(g, &t3, b)) else {
                continue;
            };
            return Some((
                j,
                Embedding { pattern: t3.clone(), image: ia },
                Embedding { pattern: t3.clone(), image: ib },
            ));
        }
    }
    None
}

/// Perfect `T_3`-packing of a digraph meeting the degree condition on `3m` vertices.
pub fn t3_pack(g: &Digraph) -> Result<T3Outcome> {
    let n = g.order();
    if n == 0 || !n.is_multiple_of(3) {
        return Err(Error::domain(format!("order {n} is not a positive multiple of 3")));
    }
    let h = minimize_edges_4_1(g)?;
    let family = [t3(), c3()];
    let seed = find_perfect_family_packing(&h, &family, DEFAULT_BUDGET)?;
    let mut packing = match seed.verdict {
        Verdict::Found => seed.packing.expect("found verdict carries a packing"),
        Verdict::ExhaustedNone => {
            return Err(Error::InvariantViolation(
                "underlying graph of a digraph meeting the degree condition has no perfect triangle packing".into(),
            ))
        }
        Verdict::BudgetExceeded => {
            return Err(Error::Refused("triangle packing search exceeded its node budget".into()))
        }
    };
    let c3 = c3();
    let mut trace = SwapTrace::default();
    while let Some(idx) = packing.elements.iter().position(|e| e.pattern.same_digraph(&c3)) {
        match swap_c3(&h, &packing, idx)? {
            Some((next, step)) => {
                packing = next;
                trace.steps.push(step);
            }
            None => return Err(Error::SwapNotFound { index: idx }),
        }
    }
    packing.n = n;
    debug_assert!(packing.elements.iter().all(|e| e.is_valid_in(g)));
    Ok(T3Outcome { packing, trace, minimized_arcs: h.arc_count() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::make_near_independent_extremal;
    use crate::solver::verify_packing;

    #[test]
    fn minimizing_the_complete_triangle() {
        let g = Digraph::complete(3).unwrap();
        let h = minimize_edges_4_1(&g).unwrap();
        assert_eq!(h.arcs().collect::<Vec<_>>(), vec![(1, 0), (1, 2), (2, 0), (2, 1)]);
        assert!(is_locally_minimal_4_1(&h));
        assert_eq!(minimize_edges_4_1(&h).unwrap(), h);
    }

    #[test]
    fn complete_six() {
        let g = Digraph::complete(6).unwrap();
        let h = minimize_edges_4_1(&g).unwrap();
        assert!(satisfies_cond_4_1(&h) && is_locally_minimal_4_1(&h));
        let out = t3_pack(&g).unwrap();
        assert!(verify_packing(&g, &[t3()], &out.packing, true));
    }

    #[test]
    fn near_independent_extremal_fails_cond() {
        let g = make_near_independent_extremal(6, 3).unwrap();
        assert!(matches!(t3_pack(&g), Err(Error::Domain(_))));
    }

    #[test]
    fn exchange_with_full_arcs() {
        let mut arcs = vec![(0, 1), (1, 2), (2, 0), (3, 4), (3, 5), (4, 5)];
        for u in 0..3 {
            for v in 3..6 {
                arcs.push((u, v));
            }
        }
        let g = Digraph::from_arcs(6, arcs).unwrap();
        let packing = Packing {
            n: 6,
            elements: vec![
                Embedding { pattern: c3(), image: vec![0, 1, 2] },
                Embedding { pattern: t3(), image: vec![3, 4, 5] },
            ],
        };
        let (next, step) = swap_c3(&g, &packing, 0).unwrap().unwrap();
        assert_eq!(step.rule, SwapRule::ExchangeOut);
        assert_eq!(next.count_of(&t3()), 2);
        assert!(verify_packing(&g, &[t3()], &next, true));
    }

    #[test]
    fn in_place_replacement() {
        let g = Digraph::from_arcs(3, [(0, 1), (1, 2), (2, 0), (1, 0)]).unwrap();
        let packing = Packing { n: 3, elements: vec![Embedding { pattern: c3(), image: vec![0, 1, 2] }] };
        let (next, step) = swap_c3(&g, &packing, 0).unwrap().unwrap();
        assert_eq!(step.rule, SwapRule::InPlace);
        assert_eq!(next.elements[0].image, vec![1, 2, 0]);
    }

    #[test]
    fn lone_cycle_has_no_move() {
        let g = Digraph::from_arcs(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        let packing = Packing { n: 3, elements: vec![Embedding { pattern: c3(), image: vec![0, 1, 2] }] };
        assert!(swap_c3(&g, &packing, 0).unwrap().is_none());
        assert!(swap_c3(&g, &packing, 1).is_err());
    }
}
