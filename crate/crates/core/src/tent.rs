//! Tent functions: least concave majorants of site/height pairs, their
//! regular subdivisions, and evaluation.
//!
//! A tent is piecewise affine on the hull of its sites and minus infinity
//! outside. Its affine pieces are the upper facets of the lifted point hull;
//! a pole is active when the tent touches it.

use crate::error::{Error, Result};
use crate::geometry::{AffineChart, Polytope};
use crate::linalg::dot;
use crate::scalar::Scalar;

/// Affine function `x ↦ grad·x + offset` on the tent's site space.
#[derive(Clone, Debug)]
pub struct AffinePiece<S> {
    pub grad: Vec<S>,
    pub offset: S,
}

impl<S: Scalar> AffinePiece<S> {
    pub fn eval(&self, x: &[S]) -> S {
        dot(&self.grad, x) + self.offset.clone()
    }
}

/// One linearity region of a tent: the cell polytope, the affine function
/// active on it, and the indices of the sites whose lifted points lie on the
/// corresponding upper facet.
#[derive(Clone, Debug)]
pub struct TentCell<S> {
    pub polytope: Polytope<S>,
    pub piece: AffinePiece<S>,
    pub sites: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct TentFunction<S> {
    sites: Vec<Vec<S>>,
    heights: Vec<S>,
    domain: Polytope<S>,
    cells: Vec<TentCell<S>>,
    active: Vec<bool>,
}

/// Regular subdivision induced by a tent: the linearity regions tile the
/// domain.
#[derive(Clone, Debug)]
pub struct Subdivision<S> {
    pub domain: Polytope<S>,
    pub cells: Vec<TentCell<S>>,
}

/// Builds the tent over the given sites and heights: the upper hull of the
/// lifted points. Duplicate sites are allowed; only the highest pole at a
/// location can be active.
pub fn build_tent<S: Scalar>(sites: Vec<Vec<S>>, heights: Vec<S>) -> Result<TentFunction<S>> {
    if sites.is_empty() {
        return Err(Error::InvalidInput("tent needs at least one site".into()));
    }
    if sites.len() != heights.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} sites vs {} heights",
            sites.len(),
            heights.len()
        )));
    }
    let k = sites[0].len();
    if sites.iter().any(|s| s.len() != k) {
        return Err(Error::DimensionMismatch("sites of unequal dimension".into()));
    }
    let domain = Polytope::from_points(k, sites.clone());
    // Work in the domain's affine chart so lower-dimensional site
    // configurations are handled in reduced coordinates.
    let mut sorted_sites = domain.vertices().to_vec();
    // Chart needs a spanning set; domain vertices span the hull.
    let chart = AffineChart::build(k, &sorted_sites);
    let kd = chart.k;
    let local: Vec<Vec<S>> = sites.iter().map(|s| chart.to_local(s)).collect();
    let lifted: Vec<Vec<S>> = local
        .iter()
        .zip(&heights)
        .map(|(t, h)| {
            let mut v = t.clone();
            v.push(h.clone());
            v
        })
        .collect();
    let hull = Polytope::from_points(kd + 1, lifted);
    let mut cells: Vec<TentCell<S>> = Vec::new();
    let mut add_cell = |grad_t: Vec<S>, off_t: S, site_idx: Vec<usize>| {
        let (grad, offset) = chart.lift_affine(&grad_t, &off_t);
        let cell_pts: Vec<Vec<S>> = site_idx.iter().map(|&i| sites[i].clone()).collect();
        let polytope = Polytope::from_points(k, cell_pts);
        cells.push(TentCell { polytope, piece: AffinePiece { grad, offset }, sites: site_idx });
    };
    if hull.affine_dim() == kd + 1 {
        for h in hull.inequalities() {
            let a_last = h.a[kd].clone();
            if a_last.sign3() <= 0 {
                continue;
            }
            // Facet a·(t, y) ≤ b with positive last coefficient: the roof
            // y = (b - a_t·t)/a_last over this facet's projection.
            let grad_t: Vec<S> = (0..kd).map(|i| -h.a[i].clone() / a_last.clone()).collect();
            let off_t = h.b.clone() / a_last.clone();
            let tight: Vec<usize> = (0..sites.len())
                .filter(|&i| {
                    let mut v = local[i].clone();
                    v.push(heights[i].clone());
                    h.eval(&v).approx_zero()
                })
                .collect();
            add_cell(grad_t, off_t, tight);
        }
    } else {
        // The lifted hull is the graph of an affine function: a single cell
        // covering the whole domain. Exactly one hull equation involves the
        // height coordinate.
        let eq = hull
            .equations()
            .iter()
            .find(|e| !e.a[kd].approx_zero())
            .expect("lifted hull projects onto a full-dimensional domain");
        let a_last = eq.a[kd].clone();
        let grad_t: Vec<S> = (0..kd).map(|i| -eq.a[i].clone() / a_last.clone()).collect();
        let off_t = eq.b.clone() / a_last.clone();
        add_cell(grad_t, off_t, (0..sites.len()).collect());
    }
    sorted_sites.clear();
    // Active poles: the tent touches the pole height exactly.
    let min_over = |x: &[S]| -> S {
        let mut it = cells.iter().map(|c| c.piece.eval(x));
        let first = it.next().expect("at least one cell");
        it.fold(first, |acc, v| if v < acc { v } else { acc })
    };
    let active: Vec<bool> =
        sites.iter().zip(&heights).map(|(s, h)| min_over(s).approx_eq(h)).collect();
    Ok(TentFunction { sites, heights, domain, cells, active })
}

impl<S: Scalar> TentFunction<S> {
    pub fn sites(&self) -> &[Vec<S>] {
        &self.sites
    }

    pub fn heights(&self) -> &[S] {
        &self.heights
    }

    pub fn domain(&self) -> &Polytope<S> {
        &self.domain
    }

    pub fn cells(&self) -> &[TentCell<S>] {
        &self.cells
    }

    pub fn active(&self) -> &[bool] {
        &self.active
    }

    /// Tent value: `None` encodes minus infinity outside the domain.
    pub fn eval(&self, x: &[S]) -> Option<S> {
        if !self.domain.contains(x) {
            return None;
        }
        let mut best: Option<S> = None;
        for c in &self.cells {
            let v = c.piece.eval(x);
            best = Some(match best {
                Some(b) if b < v => b,
                _ => v,
            });
        }
        best
    }

    /// The induced regular subdivision of the (full-dimensional) domain.
    pub fn regular_subdivision(&self) -> Result<Subdivision<S>> {
        if self.domain.affine_dim() < self.domain.dim() {
            return Err(Error::DegenerateDomain);
        }
        Ok(Subdivision { domain: self.domain.clone(), cells: self.cells.clone() })
    }
}

impl<S: Scalar> Subdivision<S> {
    /// Index of a cell containing `x`, favoring exact containment.
    pub fn locate(&self, x: &[S]) -> Option<usize> {
        (0..self.cells.len()).find(|&i| self.cells[i].polytope.contains(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat_from_decimal_str, Rat};

    fn r(v: i64) -> Rat {
        Rat::from_integer(v.into())
    }

    fn tent1d(heights: &[i64]) -> TentFunction<Rat> {
        build_tent(
            (0..heights.len()).map(|i| vec![r(i as i64)]).collect(),
            heights.iter().map(|&h| r(h)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn peaked_tent() {
        let t = tent1d(&[0, 2, 0]);
        assert_eq!(t.cells().len(), 2);
        assert_eq!(t.active(), &[true, true, true]);
        assert_eq!(t.eval(&[rat_from_decimal_str("0.5").unwrap()]), Some(r(1)));
        assert_eq!(t.eval(&[r(1)]), Some(r(2)));
        assert_eq!(t.eval(&[r(3)]), None);
        let cells: Vec<_> = t.cells().iter().map(|c| c.polytope.vertices().to_vec()).collect();
        assert_eq!(cells.len(), 2);
    }

    #[test]
    fn flat_tent_single_cell() {
        let t = tent1d(&[0, 0, 0]);
        assert_eq!(t.cells().len(), 1);
        // Middle pole touches the flat roof (degenerate but supporting).
        assert_eq!(t.active(), &[true, true, true]);
        assert_eq!(t.eval(&[r(2)]), Some(r(0)));
        let sub = t.regular_subdivision().unwrap();
        assert_eq!(sub.cells.len(), 1);
        assert!(sub.cells[0].polytope.equal(t.domain()));
    }

    #[test]
    fn inactive_pole() {
        // Heights (0,0,1): single facet from (0,0) to (2,1); the middle pole
        // sits strictly below the roof.
        let t = tent1d(&[0, 0, 1]);
        assert_eq!(t.cells().len(), 1);
        assert_eq!(t.active(), &[true, false, true]);
        assert_eq!(t.eval(&[r(1)]), Some(rat_from_decimal_str("0.5").unwrap()));
    }

    #[test]
    fn raising_inactive_pole_below_roof_changes_nothing() {
        let t = build_tent(
            vec![vec![r(0)], vec![r(1)], vec![r(2)]],
            vec![r(0), r(0), r(1)],
        )
        .unwrap();
        let t2 = build_tent(
            vec![vec![r(0)], vec![r(1)], vec![r(2)]],
            vec![r(0), Rat::new(2.into(), 5.into()), r(1)],
        )
        .unwrap();
        for q in 0..=20 {
            let x = vec![Rat::new(q.into(), 10.into())];
            assert_eq!(t.eval(&x), t2.eval(&x));
        }
    }

    #[test]
    fn degenerate_domain_rejected_but_eval_works() {
        // Sites on a line in the plane: eval in reduced coordinates.
        let t = build_tent(
            vec![vec![r(0), r(0)], vec![r(1), r(1)], vec![r(2), r(2)]],
            vec![r(0), r(1), r(0)],
        )
        .unwrap();
        assert!(matches!(t.regular_subdivision(), Err(Error::DegenerateDomain)));
        assert_eq!(t.eval(&[r(1), r(1)]), Some(r(1)));
        assert_eq!(t.eval(&[r(1), r(0)]), None);
    }

    #[test]
    fn duplicate_sites_keep_highest_pole() {
        let t = build_tent(
            vec![vec![r(0)], vec![r(1)], vec![r(1)], vec![r(2)]],
            vec![r(0), r(1), r(2), r(0)],
        )
        .unwrap();
        assert_eq!(t.eval(&[r(1)]), Some(r(2)));
        assert_eq!(t.active(), &[true, false, true, true]);
    }

    #[test]
    fn planar_subdivision_tiles_domain() {
        // Random heights over a grid of planar points: cells tile the hull.
        let mut pts = Vec::new();
        let mut hts = Vec::new();
        let mut state = 1234567u64;
        for i in 0..5i64 {
            for j in 0..4i64 {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                pts.push(vec![r(i), r(j)]);
                hts.push(Rat::new(((state >> 40) as i64 % 17).into(), 4.into()));
            }
        }
        let t = build_tent(pts, hts).unwrap();
        let sub = t.regular_subdivision().unwrap();
        let total: Rat = sub
            .cells
            .iter()
            .map(|c| c.polytope.volume())
            .fold(r(0), |a, b| a + b);
        assert_eq!(total, t.domain().volume());
        // Concavity at random interior pairs.
        let mut state = 42u64;
        let mut rnd = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            Rat::new(((state >> 40) as i64 % 120).into(), 30.into())
        };
        for _ in 0..50 {
            let x = vec![rnd(), rnd() * Rat::new(3.into(), 4.into())];
            let y = vec![rnd(), rnd() * Rat::new(3.into(), 4.into())];
            let (Some(fx), Some(fy)) = (t.eval(&x), t.eval(&y)) else { continue };
            let mid: Vec<Rat> =
                x.iter().zip(&y).map(|(a, b)| (a.clone() + b.clone()) / r(2)).collect();
            let fm = t.eval(&mid).unwrap();
            assert!(fm.clone() + fm >= fx + fy);
        }
    }
}
