//! Extremal digraphs, counterexamples and seeded random instances.

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::Serialize;

use crate::digraph::{Digraph, DigraphBuilder, Vertex, MAX_ORDER};
use crate::error::{Error, Result};
use crate::rng::{self, Rng};
use crate::vset::VertexSet;

/// The classes of `Ex_c(n)`, laid out consecutively: `A_1 = {0..}`, then `A_2`, then `A_3`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExPartition {
    pub classes: [VertexSet; 3],
    pub c: usize,
}

impl ExPartition {
    pub fn sizes(&self) -> [usize; 3] {
        self.classes.map(VertexSet::len)
    }
}

/// Class sizes `(a_1 - c, a_2 + c, a_3)` where `(a_1, a_2, a_3)` is the
/// lexicographically least triple with `floor(n/3) <= a_1 <= a_2 <= a_3 <= ceil(n/3)`
/// summing to `n`.
pub fn ex_class_sizes(n: usize, c: usize) -> Result<[usize; 3]> {
    let lo = n / 3;
    let (a1, a2, a3) = match n % 3 {
        0 => (lo, lo, lo),
        1 => (lo, lo, lo + 1),
        _ => (lo, lo + 1, lo + 1),
    };
    if c > a1 {
        return Err(Error::domain(format!("shift c = {c} exceeds the first class size {a1}")));
    }
    Ok([a1 - c, a2 + c, a3])
}

/// `Ex_c(n)`: complete digraphs inside the three classes and every arc
/// `A_i -> A_{i+1}` (indices mod 3).
pub fn make_ex(n: usize, c: usize) -> Result<(Digraph, ExPartition)> {
    if n < 3 {
        return Err(Error::domain("Ex_c(n) needs n >= 3"));
    }
    check_order(n)?;
    let sizes = ex_class_sizes(n, c)?;
    let mut classes = [VertexSet::EMPTY; 3];
    let mut start = 0;
    for (class, size) in classes.iter_mut().zip(sizes) {
        *class = VertexSet::from_range(start..start + size);
        start += size;
    }
    let mut b = DigraphBuilder::new(n)?;
    for i in 0..3 {
        let next = classes[(i + 1) % 3];
        for u in classes[i] {
            for v in classes[i].without(u).union(next) {
                b.add_arc(u, v)?;
            }
        }
    }
    Ok((b.build(), ExPartition { classes, c }))
}

/// The vertex set `{0, ..., n/r}` whose internal arcs
/// [`make_near_independent_extremal`] removes.
pub fn near_independent_set(n: usize, r: usize) -> VertexSet {
    VertexSet::from_range(0..n / r + 1)
}

/// The complete digraph on `n` vertices with every arc inside
/// [`near_independent_set`] removed. Its minimum semidegree is `(1 - 1/r) n - 1`.
pub fn make_near_independent_extremal(n: usize, r: usize) -> Result<Digraph> {
    if r < 2 || n == 0 || !n.is_multiple_of(r) {
        return Err(Error::domain(format!("need r >= 2 and r | n (n = {n}, r = {r})")));
    }
    if n / r + 1 > n {
        return Err(Error::domain("distinguished set larger than the vertex set"));
    }
    check_order(n)?;
    let s = near_independent_set(n, r);
    let mut b = DigraphBuilder::from_digraph(&Digraph::complete(n)?);
    for u in s {
        for v in s.without(u) {
            b.remove_arc(u, v);
        }
    }
    Ok(b.build())
}

/// The complete digraph on `{0, ..., n-2}` plus the source `n - 1`, which
/// sends an arc to every other vertex and receives none.
pub fn make_source_counterexample(n: usize) -> Result<Digraph> {
    if n < 2 {
        return Err(Error::domain("source counterexample needs n >= 2"));
    }
    check_order(n)?;
    let mut b = DigraphBuilder::from_digraph(&Digraph::complete(n)?);
    for v in 0..n - 1 {
        b.remove_arc(v, n - 1);
    }
    Ok(b.build())
}

/// The source vertex of [`make_source_counterexample`].
pub fn source_vertex(n: usize) -> Vertex {
    n - 1
}

/// Sizes and layout of the `K_3^-` example: `V_1 = {0..=m}`, `V_2 = {m+1..=2m+2}`.
pub fn k3minus_classes(m: usize) -> (VertexSet, VertexSet) {
    (VertexSet::from_range(0..m + 1), VertexSet::from_range(m + 1..2 * m + 3))
}

/// Two complete digraphs on `m + 1` and `m + 2` vertices joined by a
/// near-regular bipartite tournament, for `6 | m`. The `i`-th vertex of `V_1`
/// beats the `(m + 2) / 2` vertices of `V_2` with indices `i, i+1, ...`
/// (mod `m + 2`) and loses to the rest.
pub fn make_k3minus_example(m: usize) -> Result<Digraph> {
    if m == 0 || !m.is_multiple_of(6) {
        return Err(Error::domain(format!("need m > 0 with 6 | m (got {m})")));
    }
    let n = 2 * m + 3;
    check_order(n)?;
    let (v1, v2) = k3minus_classes(m);
    let mut b = DigraphBuilder::new(n)?;
    for part in [v1, v2] {
        for u in part {
            for v in part.without(u) {
                b.add_arc(u, v)?;
            }
        }
    }
    let width = m + 2;
    let beats = width.div_ceil(2);
    for i in 0..=m {
        for j in 0..width {
            let w = m + 1 + j;
            if (j + width - i % width) % width < beats {
                b.add_arc(i, w)?;
            } else {
                b.add_arc(w, i)?;
            }
        }
    }
    Ok(b.build())
}

/// Tightness example for the total-degree threshold: a transitive tournament
/// on `A = {0..=n/r}`, a complete digraph on the remaining vertices, and
/// double edges between the two parts. Minimum total degree `(2 - 1/r) n - 2`.
pub fn make_total_degree_extremal(n: usize, r: usize) -> Result<Digraph> {
    if r < 2 || n == 0 || !n.is_multiple_of(r) {
        return Err(Error::domain(format!("need r >= 2 and r | n (n = {n}, r = {r})")));
    }
    check_order(n)?;
    let a = n / r + 1;
    let mut b = DigraphBuilder::new(n)?;
    for u in 0..n {
        for v in 0..n {
            if u == v {
                continue;
            }
            let keep = match (u < a, v < a) {
                (true, true) => u < v,
                _ => true,
            };
            if keep {
                b.add_arc(u, v)?;
            }
        }
    }
    Ok(b.build())
}

/// The directed cycle `0 -> 1 -> ... -> n-1 -> 0`.
pub fn directed_cycle(n: usize) -> Result<Digraph> {
    if n < 2 {
        return Err(Error::domain("a directed cycle needs n >= 2"));
    }
    Digraph::from_arcs(n, (0..n).map(|i| (i, (i + 1) % n)))
}

/// Each ordered pair independently present with probability `p`.
pub fn random_digraph(n: usize, p: f64, seed: u64) -> Result<Digraph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("probability {p} outside [0, 1]")));
    }
    check_order(n)?;
    let mut rng = rng::seeded(seed);
    Ok(bernoulli(n, p, &mut rng)?.build())
}

/// Random digraph with `delta^0 >= delta_min`: a sparse Bernoulli digraph
/// repaired by adding random out-arcs, then in-arcs, at deficient vertices.
/// The sparse start leaves many vertices sitting exactly at the bound.
pub fn random_digraph_min_semidegree(n: usize, delta_min: usize, seed: u64) -> Result<Digraph> {
    check_order(n)?;
    if n == 0 || delta_min > n - 1 {
        return Err(Error::domain(format!("minimum semidegree {delta_min} infeasible on {n} vertices")));
    }
    let mut rng = rng::seeded(seed);
    let p = rng.gen::<f64>() * delta_min as f64 / (n - 1).max(1) as f64;
    let mut b = bernoulli(n, p, &mut rng)?;
    for v in 0..n {
        raise_out(&mut b, v, delta_min, &mut rng)?;
    }
    for v in 0..n {
        raise_in(&mut b, v, delta_min, &mut rng)?;
    }
    Ok(b.build())
}

/// Random digraph in which every vertex has `d^+ >= threshold` or `d^- >= threshold`.
/// Each vertex is assigned a side at random and repaired on that side if it
/// meets neither bound.
pub fn random_digraph_disjunctive(n: usize, threshold: usize, seed: u64) -> Result<Digraph> {
    check_order(n)?;
    if n == 0 || threshold > n - 1 {
        return Err(Error::domain(format!("degree threshold {threshold} infeasible on {n} vertices")));
    }
    let mut rng = rng::seeded(seed);
    let p = rng.gen::<f64>() * threshold as f64 / (n - 1).max(1) as f64;
    let mut b = bernoulli(n, p, &mut rng)?;
    let mut order: Vec<Vertex> = (0..n).collect();
    order.shuffle(&mut rng);
    for v in order {
        let g = b.peek();
        if g.out_degree(v) >= threshold || g.in_degree(v) >= threshold {
            continue;
        }
        if rng.gen_bool(0.5) {
            raise_out(&mut b, v, threshold, &mut rng)?;
        } else {
            raise_in(&mut b, v, threshold, &mut rng)?;
        }
    }
    Ok(b.build())
}

/// `ceil(2n/3)`: the degree bound of the out-or-in-degree condition.
pub fn cond_4_1_threshold(n: usize) -> usize {
    (2 * n).div_ceil(3)
}

/// Every vertex has `d^+ >= 2n/3` or `d^- >= 2n/3`.
pub fn satisfies_cond_4_1(g: &Digraph) -> bool {
    let t = cond_4_1_threshold(g.order());
    g.vertices().iter().all(|v| g.out_degree(v) >= t || g.in_degree(v) >= t)
}

/// Random digraph meeting the out-or-in-degree condition.
pub fn random_digraph_cond_4_1(n: usize, seed: u64) -> Result<Digraph> {
    random_digraph_disjunctive(n, cond_4_1_threshold(n), seed)
}

/// Random digraph with minimum total degree `d^+ + d^- >= degree_min`.
/// Deficient vertices gain random incident arcs in either direction.
pub fn random_digraph_min_total_degree(n: usize, degree_min: usize, seed: u64) -> Result<Digraph> {
    check_order(n)?;
    if n == 0 || degree_min > 2 * (n - 1) {
        return Err(Error::domain(format!("total degree {degree_min} infeasible on {n} vertices")));
    }
    let mut rng = rng::seeded(seed);
    let p = rng.gen::<f64>() * degree_min as f64 / (2 * (n - 1)).max(1) as f64;
    let mut b = bernoulli(n, p, &mut rng)?;
    for v in 0..n {
        let g = b.peek();
        let deficit = degree_min.saturating_sub(g.degree(v));
        if deficit == 0 {
            continue;
        }
        let mut missing: Vec<(Vertex, Vertex)> =
            (0..n).filter(|&u| u != v).flat_map(|u| [(v, u), (u, v)]).filter(|&(a, c)| !g.has_arc(a, c)).collect();
        missing.shuffle(&mut rng);
        for &(a, c) in missing.iter().take(deficit) {
            b.add_arc(a, c)?;
        }
    }
    Ok(b.build())
}

fn check_order(n: usize) -> Result<()> {
    if n > MAX_ORDER {
        return Err(Error::TooLarge(n));
    }
    Ok(())
}

fn bernoulli(n: usize, p: f64, rng: &mut Rng) -> Result<DigraphBuilder> {
    let mut b = DigraphBuilder::new(n)?;
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.gen_bool(p) {
                b.add_arc(u, v)?;
            }
        }
    }
    Ok(b)
}

fn raise_out(b: &mut DigraphBuilder, v: Vertex, target: usize, rng: &mut Rng) -> Result<()> {
    let g = b.peek();
    let have = g.out_degree(v);
    if have >= target {
        return Ok(());
    }
    let mut missing: Vec<Vertex> = g.vertices().difference(g.out_set(v)).without(v).to_vec();
    missing.shuffle(rng);
    for &u in missing.iter().take(target - have) {
        b.add_arc(v, u)?;
    }
    Ok(())
}

fn raise_in(b: &mut DigraphBuilder, v: Vertex, target: usize, rng: &mut Rng) -> Result<()> {
    let g = b.peek();
    let have = g.in_degree(v);
    if have >= target {
        return Ok(());
    }
    let mut missing: Vec<Vertex> = g.vertices().difference(g.in_set(v)).without(v).to_vec();
    missing.shuffle(rng);
    for &u in missing.iter().take(target - have) {
        b.add_arc(u, v)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ex1_9_semidegree() {
        let (g, p) = make_ex(9, 1).unwrap();
        assert_eq!(p.sizes(), [2, 4, 3]);
        assert_eq!(g.min_semidegree().unwrap(), 4);
    }

    #[test]
    fn ex_3_is_the_directed_triangle() {
        let (g, _) = make_ex(3, 0).unwrap();
        assert_eq!(g, directed_cycle(3).unwrap());
    }

    #[test]
    fn ex9_has_45_arcs_and_regular_degrees() {
        let (g, _) = make_ex(9, 0).unwrap();
        assert_eq!(g.arc_count(), 45);
        assert_eq!(g.total_min_degree().unwrap(), 10);
        assert!(g.vertices().iter().all(|v| g.out_degree(v) == 5 && g.in_degree(v) == 5));
    }

    #[test]
    fn ex_semidegree_for_multiples_of_three() {
        for n in (3..=30).step_by(3) {
            let (g, _) = make_ex(n, 0).unwrap();
            assert_eq!(g.min_semidegree().unwrap(), (2 * n).div_ceil(3) - 1, "n = {n}");
        }
    }

    #[test]
    fn shift_too_large() {
        assert!(matches!(make_ex(9, 4), Err(Error::Domain(_))));
    }

    #[test]
    fn non_divisible_class_sizes() {
        assert_eq!(ex_class_sizes(10, 0).unwrap(), [3, 3, 4]);
        assert_eq!(ex_class_sizes(11, 0).unwrap(), [3, 4, 4]);
    }

    #[test]
    fn near_independent_extremal() {
        let g = make_near_independent_extremal(6, 3).unwrap();
        assert_eq!(g.min_semidegree().unwrap(), 3);
        assert_eq!(g.arcs_within(near_independent_set(6, 3)), 0);
        assert_eq!(near_independent_set(6, 3).len(), 3);
        assert!(make_near_independent_extremal(7, 3).is_err());
    }

    #[test]
    fn source_counterexample_degrees() {
        let g = make_source_counterexample(6).unwrap();
        assert_eq!(g.min_out_degree().unwrap(), 4);
        assert_eq!(g.in_degree(source_vertex(6)), 0);
    }

    #[test]
    fn k3minus_example_m6() {
        let g = make_k3minus_example(6).unwrap();
        assert_eq!(g.order(), 15);
        assert_eq!(g.min_semidegree().unwrap(), 10);
        let (v1, v2) = k3minus_classes(6);
        assert_eq!((v1.len(), v2.len()), (7, 8));
        // a bipartite tournament between the classes
        for u in v1 {
            for w in v2 {
                assert!(g.has_arc(u, w) != g.has_arc(w, u));
            }
        }
        assert!(make_k3minus_example(4).is_err());
    }

    #[test]
    fn total_degree_extremal() {
        for (n, r) in [(6, 3), (9, 3), (8, 4)] {
            let g = make_total_degree_extremal(n, r).unwrap();
            assert_eq!(g.total_min_degree().unwrap(), 2 * n - n / r - 2);
        }
    }

    #[test]
    fn random_generators_meet_their_conditions() {
        for seed in 0..50 {
            let g = random_digraph_min_semidegree(6, 4, seed).unwrap();
            assert!(g.min_semidegree().unwrap() >= 4);
            let g = random_digraph_cond_4_1(9, seed).unwrap();
            assert!(g.vertices().iter().all(|v| g.out_degree(v) >= 6 || g.in_degree(v) >= 6));
            let g = random_digraph_min_total_degree(9, 12, seed).unwrap();
            assert!(g.total_min_degree().unwrap() >= 12);
        }
    }

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(
            random_digraph_min_semidegree(12, 7, 99).unwrap(),
            random_digraph_min_semidegree(12, 7, 99).unwrap()
        );
        assert_eq!(random_digraph_cond_4_1(9, 7).unwrap(), random_digraph_cond_4_1(9, 7).unwrap());
    }

    #[test]
    fn infeasible_parameters() {
        assert!(random_digraph_min_semidegree(5, 5, 0).is_err());
        assert!(random_digraph_min_total_degree(5, 9, 0).is_err());
    }
}
