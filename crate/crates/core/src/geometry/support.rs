//! The support polytope of the estimate and the iterated Markov-expansion
//! sets that approach it.

use super::{Polytope, Sample};
use crate::error::Result;
use crate::graph::{self, Graph, MarkovStatement};
use crate::scalar::Scalar;

/// Support polytope: intersection over the maximal cliques of the preimages
/// of the projected sample hull. Contains the sample hull.
pub fn support_polytope<S: Scalar>(g: &Graph, x: &Sample<S>) -> Polytope<S> {
    assert_eq!(g.d(), x.d(), "graph and sample dimension must agree");
    let d = g.d();
    let hull = Polytope::from_points(d, x.points.clone());
    let bbox = hull.bounding_box();
    let cliques = graph::maximal_cliques(g);
    let mut pieces = Vec::with_capacity(cliques.len());
    for c in &cliques.cliques {
        if c.len() == d {
            pieces.push(hull.clone());
            continue;
        }
        let proj = hull.project(c).expect("clique coordinates valid");
        let free_bounds: Vec<(S, S)> = (1..=d)
            .filter(|v| !c.contains(v))
            .map(|v| bbox[v - 1].clone())
            .collect();
        pieces.push(proj.extrude_preimage(d, c, &free_bounds));
    }
    let refs: Vec<&Polytope<S>> = pieces.iter().collect();
    Polytope::intersect(&refs)
}

/// One Markov-expansion step: the set of points mixing two elements of `p`
/// that agree on the separator coordinates,
/// realized as the intersection of the two coordinate-projection preimages.
pub fn markov_expand<S: Scalar>(p: &Polytope<S>, stmt: &MarkovStatement) -> Polytope<S> {
    let d = p.dim();
    let mut a_s: Vec<usize> = stmt.a.iter().chain(&stmt.s).copied().collect();
    a_s.sort_unstable();
    let mut b_s: Vec<usize> = stmt.b.iter().chain(&stmt.s).copied().collect();
    b_s.sort_unstable();
    debug_assert_eq!(a_s.len() + b_s.len() - stmt.s.len() * 2 + stmt.s.len(), d);
    if p.is_empty() {
        return Polytope::empty(d);
    }
    let bbox = p.bounding_box();
    let lift = |coords: &[usize]| -> Polytope<S> {
        let proj = p.project(coords).expect("statement coordinates valid");
        let free_bounds: Vec<(S, S)> = (1..=d)
            .filter(|v| !coords.contains(v))
            .map(|v| bbox[v - 1].clone())
            .collect();
        proj.extrude_preimage(d, coords, &free_bounds)
    };
    let pa = lift(&a_s);
    let pb = lift(&b_s);
    Polytope::intersect(&[&pa, &pb])
}

/// Result of iterating the Markov expansion from the sample hull.
#[derive(Clone, Debug)]
pub struct DsetResult<S> {
    /// `steps[i]` is the i-th set; `steps[0]` is the sample hull.
    pub steps: Vec<Polytope<S>>,
    /// Smallest index `s` with `steps[s] = steps[s+1]`, when reached.
    pub stabilized_at: Option<usize>,
    /// Ambient volume per step.
    pub volumes: Vec<S>,
    pub max_iter_reached: bool,
}

/// Iterates the Markov expansion `D -> conv(∪ expand(D, stmt))` until the
/// sequence stabilizes (exact polytope equality) or `max_iter` is reached.
/// Every step is verified to stay inside the support polytope.
pub fn dset_sequence<S: Scalar>(
    g: &Graph,
    x: &Sample<S>,
    max_iter: usize,
) -> Result<DsetResult<S>> {
    let d = g.d();
    let hull = Polytope::from_points(d, x.points.clone());
    let support = support_polytope(g, x);
    let statements = graph::markov_statements(g, 16)?;
    let mut steps = vec![hull];
    let mut volumes = vec![steps[0].volume()];
    if statements.is_empty() {
        return Ok(DsetResult { steps, stabilized_at: Some(0), volumes, max_iter_reached: false });
    }
    let mut stabilized_at = None;
    for i in 0..max_iter {
        let current = steps.last().unwrap();
        let mut points: Vec<Vec<S>> = Vec::new();
        for stmt in &statements {
            let expanded = markov_expand(current, stmt);
            points.extend(expanded.vertices().iter().cloned());
        }
        let next = Polytope::from_points(d, points);
        for v in next.vertices() {
            assert!(support.contains(v), "expansion step escaped the support polytope");
        }
        let stable = next.equal(current);
        if !stable {
            volumes.push(next.volume());
            steps.push(next);
        }
        if stable {
            stabilized_at = Some(i);
            break;
        }
    }
    let max_iter_reached = stabilized_at.is_none();
    Ok(DsetResult { steps, stabilized_at, volumes, max_iter_reached })
}
