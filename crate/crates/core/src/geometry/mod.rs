//! Exact dual-representation polytopes and the constructions on them.
//!
//! A [`Polytope`] always carries both representations in canonical form:
//! extreme vertices (sorted), facet inequalities within the affine hull, and
//! affine-hull equations. All constructions are exact over rationals; the same
//! code runs over `f64` with tolerance-based predicates inside the optimizer.

pub mod dd;
mod support;

pub use dd::Halfspace;
pub use support::{dset_sequence, markov_expand, support_polytope, DsetResult};

use crate::error::{Error, Result};
use crate::linalg::{self, dot, vec_sub, Mat};
use crate::scalar::Scalar;
use dd::CutState;

#[derive(Clone, Debug)]
pub struct Polytope<S> {
    dim: usize,
    affine_dim: usize,
    vertices: Vec<Vec<S>>,
    inequalities: Vec<Halfspace<S>>,
    equations: Vec<Halfspace<S>>,
}

/// Weighted sample: `n` points with positive weights summing to one.
#[derive(Clone, Debug)]
pub struct Sample<S> {
    pub points: Vec<Vec<S>>,
    pub weights: Vec<S>,
}

impl<S: Scalar> Sample<S> {
    pub fn new(points: Vec<Vec<S>>, weights: Vec<S>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInput("sample must contain at least one point".into()));
        }
        let d = points[0].len();
        if points.iter().any(|p| p.len() != d) {
            return Err(Error::DimensionMismatch("sample points of unequal dimension".into()));
        }
        if weights.len() != points.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} weights for {} points",
                weights.len(),
                points.len()
            )));
        }
        if weights.iter().any(|w| !w.is_positive()) {
            return Err(Error::InvalidInput("weights must be positive".into()));
        }
        let total = weights.iter().fold(S::zero(), |a, w| a + w.clone());
        let dev = total - S::one();
        let ok = if S::EXACT { dev.is_zero() } else { dev.abs() < S::from_f64(1e-9) };
        if !ok {
            return Err(Error::InvalidInput("weights must sum to 1".into()));
        }
        Ok(Sample { points, weights })
    }

    pub fn uniform(points: Vec<Vec<S>>) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(Error::InvalidInput("sample must contain at least one point".into()));
        }
        let w = S::one() / S::from_int(n as i64);
        Sample::new(points, vec![w; n])
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn d(&self) -> usize {
        self.points[0].len()
    }

    /// Merges coincident points, summing their weights.
    pub fn merged_duplicates(&self) -> Self {
        let mut points: Vec<Vec<S>> = Vec::new();
        let mut weights: Vec<S> = Vec::new();
        'outer: for (p, w) in self.points.iter().zip(&self.weights) {
            for (q, wq) in points.iter().zip(weights.iter_mut()) {
                if p.iter().zip(q).all(|(a, b)| a.approx_eq(b)) {
                    *wq = wq.clone() + w.clone();
                    continue 'outer;
                }
            }
            points.push(p.clone());
            weights.push(w.clone());
        }
        Sample { points, weights }
    }

    /// Projection of all points onto the (sorted, 1-based) coordinates.
    pub fn project_points(&self, coords: &[usize]) -> Vec<Vec<S>> {
        self.points.iter().map(|p| coords.iter().map(|&c| p[c - 1].clone()).collect()).collect()
    }
}

pub(crate) fn lex_cmp<S: Scalar>(a: &[S], b: &[S]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y) {
            Some(std::cmp::Ordering::Equal) => continue,
            Some(o) => return o,
            None => return std::cmp::Ordering::Equal,
        }
    }
    std::cmp::Ordering::Equal
}

/// Affine coordinate chart for the hull of a point set: a base point plus an
/// independent set of directions taken from the points themselves, with the
/// left-inverse map for local coordinates.
#[derive(Clone, Debug)]
pub struct AffineChart<S> {
    pub base: Vec<S>,
    /// Local dimension (affine dimension of the point set).
    pub k: usize,
    /// dim x k matrix whose columns are the basis directions.
    u: Mat<S>,
    /// k x dim left inverse: `t = w (x - base)`.
    w: Mat<S>,
}

impl<S: Scalar> AffineChart<S> {
    /// Builds the chart from a nonempty, deduplicated, sorted point set.
    pub fn build(dim: usize, pts: &[Vec<S>]) -> Self {
        let base = pts[0].clone();
        let mut ech: Vec<(usize, Vec<S>)> = Vec::new();
        let mut dirs: Vec<Vec<S>> = Vec::new();
        for p in &pts[1..] {
            let mut v = vec_sub(p, &base);
            for (piv, row) in &ech {
                if !v[*piv].approx_zero() {
                    let f = v[*piv].clone() / row[*piv].clone();
                    for j in 0..dim {
                        v[j] = v[j].clone() - f.clone() * row[j].clone();
                    }
                    v[*piv] = S::zero();
                }
            }
            if let Some(piv) = v.iter().position(|x| !x.approx_zero()) {
                dirs.push(vec_sub(p, &base));
                ech.push((piv, v));
            }
        }
        let k = dirs.len();
        if k == 0 {
            return AffineChart { base, k, u: Mat::zeros(dim, 0), w: Mat::zeros(0, dim) };
        }
        let u = Mat::from_rows(dirs.clone()).transpose();
        let gram_inv = linalg::invert(&u.transpose().matmul(&u)).expect("Gram invertible");
        let w = gram_inv.matmul(&u.transpose());
        AffineChart { base, k, u, w }
    }

    /// Null-space directions of the chart span (normals of the affine hull).
    pub fn hull_normals(&self, dim: usize) -> Vec<Vec<S>> {
        if self.k == dim {
            return vec![];
        }
        if self.k == 0 {
            return (0..dim)
                .map(|i| {
                    let mut e = vec![S::zero(); dim];
                    e[i] = S::one();
                    e
                })
                .collect();
        }
        linalg::null_space(&self.u.transpose())
    }

    pub fn to_local(&self, x: &[S]) -> Vec<S> {
        self.w.matvec(&vec_sub(x, &self.base))
    }

    pub fn to_ambient(&self, t: &[S]) -> Vec<S> {
        let mut x = self.base.clone();
        for i in 0..self.k {
            for j in 0..x.len() {
                x[j] = x[j].clone() + self.u[(j, i)].clone() * t[i].clone();
            }
        }
        x
    }

    /// Rewrites the affine function `t ↦ grad·t + off` on local coordinates as
    /// an ambient affine function of `x`.
    pub fn lift_affine(&self, grad: &[S], off: &S) -> (Vec<S>, S) {
        let a = self.w.transpose().matvec(grad);
        let b = off.clone() - dot(&a, &self.base);
        (a, b)
    }
}

/// Canonical scaling of a halfspace: integer-coprime coefficients in exact
/// mode, unit normal in float mode. Equations additionally get a sign rule
/// (first nonzero coefficient positive).
fn canonicalize_halfspace<S: Scalar>(h: &Halfspace<S>, equation: bool) -> Halfspace<S> {
    let mut a = h.a.clone();
    let mut b = h.b.clone();
    S::normalize_halfspace(&mut a, &mut b);
    if equation {
        if let Some(first) = a.iter().find(|v| !v.approx_zero()) {
            if first.is_negative() {
                for v in a.iter_mut() {
                    *v = -v.clone();
                }
                b = -b;
            }
        }
    }
    Halfspace { a, b }
}

impl<S: Scalar> Polytope<S> {
    pub fn empty(dim: usize) -> Self {
        Polytope { dim, affine_dim: 0, vertices: vec![], inequalities: vec![], equations: vec![] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn affine_dim(&self) -> usize {
        self.affine_dim
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_full_dimensional(&self) -> bool {
        !self.is_empty() && self.affine_dim == self.dim
    }

    pub fn vertices(&self) -> &[Vec<S>] {
        &self.vertices
    }

    pub fn inequalities(&self) -> &[Halfspace<S>] {
        &self.inequalities
    }

    pub fn equations(&self) -> &[Halfspace<S>] {
        &self.equations
    }

    pub fn contains(&self, x: &[S]) -> bool {
        !self.is_empty()
            && x.len() == self.dim
            && self.equations.iter().all(|h| h.eval(x).approx_zero())
            && self.inequalities.iter().all(|h| h.eval(x).sign3() >= 0)
    }

    pub fn bounding_box(&self) -> Vec<(S, S)> {
        assert!(!self.is_empty());
        (0..self.dim)
            .map(|i| {
                let mut lo = self.vertices[0][i].clone();
                let mut hi = lo.clone();
                for v in &self.vertices[1..] {
                    if v[i] < lo {
                        lo = v[i].clone();
                    }
                    if v[i] > hi {
                        hi = v[i].clone();
                    }
                }
                (lo, hi)
            })
            .collect()
    }

    /// Converts coordinates to f64, recomputing canonical structure.
    pub fn to_f64(&self) -> Polytope<f64> {
        if self.is_empty() {
            return Polytope::empty(self.dim);
        }
        let pts: Vec<Vec<f64>> =
            self.vertices.iter().map(|v| v.iter().map(|x| x.to_f64()).collect()).collect();
        Polytope::from_points(self.dim, pts)
    }

    /// Rank of the facet normals tight at `x`: the codimension (within the
    /// affine hull being full-dimensional) of the minimal face containing `x`.
    pub fn tight_rank_at(&self, x: &[S]) -> usize {
        let rows: Vec<Vec<S>> = self
            .inequalities
            .iter()
            .filter(|h| h.eval(x).approx_zero())
            .map(|h| h.a.clone())
            .collect();
        linalg::rank_of_rows(&rows)
    }

    /// Convex hull of a point set: canonical dual representation with extreme
    /// points only. Exact over rationals.
    pub fn from_points(dim: usize, points: Vec<Vec<S>>) -> Self {
        assert!(points.iter().all(|p| p.len() == dim), "point dimension mismatch");
        // Dedupe + sort for determinism.
        let mut pts: Vec<Vec<S>> = Vec::new();
        'outer: for p in points {
            for q in &pts {
                if p.iter().zip(q.iter()).all(|(a, b)| a.approx_eq(b)) {
                    continue 'outer;
                }
            }
            pts.push(p);
        }
        pts.sort_by(|a, b| lex_cmp(a, b));
        if pts.is_empty() {
            return Polytope::empty(dim);
        }
        let chart = AffineChart::build(dim, &pts);
        let p0 = chart.base.clone();
        let k = chart.k;
        // Affine hull equations: null space of the direction span.
        let equations: Vec<Halfspace<S>> = chart
            .hull_normals(dim)
            .into_iter()
            .map(|n| {
                let b = dot(&n, &p0);
                canonicalize_halfspace(&Halfspace { a: n, b }, true)
            })
            .collect();
        if k == 0 {
            return Polytope { dim, affine_dim: 0, vertices: pts, inequalities: vec![], equations };
        }
        let coords: Vec<Vec<S>> = pts.iter().map(|p| chart.to_local(p)).collect();
        // Interior point: barycenter of the affine-basis simplex {0, e_1..e_k}.
        let c = vec![S::one() / S::from_int((k + 1) as i64); k];
        // The simplex conv{0, e_i} contains a ball of radius 1/(k(k+1)) around
        // c, so the polar fits in a box of size k(k+1); use a 2x margin.
        let m = S::from_int(2 * (k * (k + 1)) as i64);
        let mut polar = CutState::from_box(&vec![(-m.clone(), m.clone()); k]);
        for t in &coords {
            let q = vec_sub(t, &c);
            if q.iter().all(|x| x.approx_zero()) {
                continue;
            }
            polar.cut(Halfspace { a: q, b: S::one() });
            debug_assert!(!polar.is_empty());
        }
        // Facets in affine coordinates: y·t ≤ 1 + y·c, normalized.
        let mut t_facets: Vec<Halfspace<S>> = Vec::new();
        'fac: for y in &polar.points {
            let h = canonicalize_halfspace(
                &Halfspace { a: y.clone(), b: S::one() + dot(y, &c) },
                false,
            );
            for e in &t_facets {
                if e.a.iter().zip(&h.a).all(|(x, z)| x.approx_eq(z)) && e.b.approx_eq(&h.b) {
                    continue 'fac;
                }
            }
            t_facets.push(h);
        }
        // Extreme points: tight facet normals of full rank k.
        let mut vertices = Vec::new();
        for (p, t) in pts.iter().zip(&coords) {
            let tight: Vec<Vec<S>> = t_facets
                .iter()
                .filter(|h| h.eval(t).approx_zero())
                .map(|h| h.a.clone())
                .collect();
            if linalg::rank_of_rows(&tight) == k {
                vertices.push(p.clone());
            }
        }
        vertices.sort_by(|a, b| lex_cmp(a, b));
        // Map facets to ambient coordinates: a_x = W^T y, b_x = rhs + a_x·p0.
        let mut inequalities: Vec<Halfspace<S>> = t_facets
            .iter()
            .map(|h| {
                let a_x = chart.w.transpose().matvec(&h.a);
                let b_x = h.b.clone() + dot(&a_x, &p0);
                canonicalize_halfspace(&Halfspace { a: a_x, b: b_x }, false)
            })
            .collect();
        inequalities.sort_by(|x, y| lex_cmp(&x.a, &y.a).then(x.b.partial_cmp(&y.b).unwrap()));
        Polytope { dim, affine_dim: k, vertices, inequalities, equations }
    }

    /// Vertex enumeration of `{x : ineqs, eqs}` intersected with a bounding
    /// box, canonicalized through [`Polytope::from_points`].
    pub fn from_halfspaces(
        dim: usize,
        ineqs: &[Halfspace<S>],
        eqs: &[Halfspace<S>],
        bbox: &[(S, S)],
    ) -> Self {
        assert_eq!(bbox.len(), dim);
        if bbox.iter().any(|(lo, hi)| lo > hi) {
            return Polytope::empty(dim);
        }
        // The box is part of the constraint system, not just a seed for the
        // vertex enumeration.
        let mut ineqs: Vec<Halfspace<S>> = ineqs.to_vec();
        for (i, (lo, hi)) in bbox.iter().enumerate() {
            let mut a = vec![S::zero(); dim];
            a[i] = -S::one();
            ineqs.push(Halfspace { a: a.clone(), b: -lo.clone() });
            let mut a = vec![S::zero(); dim];
            a[i] = S::one();
            ineqs.push(Halfspace { a, b: hi.clone() });
        }
        let ineqs = &ineqs[..];
        // Reduce by the equations to a coordinate patch.
        let (p0, basis): (Vec<S>, Vec<Vec<S>>) = if eqs.is_empty() {
            (
                vec![S::zero(); dim],
                (0..dim)
                    .map(|i| {
                        let mut e = vec![S::zero(); dim];
                        e[i] = S::one();
                        e
                    })
                    .collect(),
            )
        } else {
            let a = Mat::from_rows(eqs.iter().map(|h| h.a.clone()).collect());
            let b: Vec<S> = eqs.iter().map(|h| h.b.clone()).collect();
            match linalg::solve(&a, &b) {
                Some(p0) => (p0, linalg::null_space(&a)),
                None => return Polytope::empty(dim),
            }
        };
        let k = basis.len();
        if k == 0 {
            let ok = ineqs.iter().all(|h| h.eval(&p0).sign3() >= 0)
                && p0.iter().enumerate().all(|(i, x)| {
                    *x >= bbox[i].0.clone() - S::tol() && *x <= bbox[i].1.clone() + S::tol()
                });
            return if ok { Polytope::from_points(dim, vec![p0]) } else { Polytope::empty(dim) };
        }
        let n = Mat::from_rows(basis).transpose(); // dim x k
        let gram_inv = linalg::invert(&n.transpose().matmul(&n)).expect("basis Gram");
        let w = gram_inv.matmul(&n.transpose()); // k x dim, t = w (x - p0)
        // Interval arithmetic for the t-space box.
        let mut tbox = Vec::with_capacity(k);
        for i in 0..k {
            let mut lo = S::zero();
            let mut hi = S::zero();
            for j in 0..dim {
                let c = w[(i, j)].clone();
                if c.is_zero() {
                    continue;
                }
                let r1 = c.clone() * (bbox[j].0.clone() - p0[j].clone());
                let r2 = c.clone() * (bbox[j].1.clone() - p0[j].clone());
                if r1 <= r2 {
                    lo = lo + r1;
                    hi = hi + r2;
                } else {
                    lo = lo + r2;
                    hi = hi + r1;
                }
            }
            tbox.push((lo - S::one(), hi + S::one()));
        }
        let mut state = CutState::from_box(&tbox);
        // Inequalities transformed to t-space: a·(p0 + N t) ≤ b.
        for h in ineqs {
            let at: Vec<S> = (0..k)
                .map(|i| {
                    (0..dim).fold(S::zero(), |acc, j| acc + h.a[j].clone() * n[(j, i)].clone())
                })
                .collect();
            let bt = h.b.clone() - dot(&h.a, &p0);
            if at.iter().all(|x| x.approx_zero()) {
                if bt.sign3() < 0 {
                    return Polytope::empty(dim);
                }
                continue;
            }
            state.cut(Halfspace { a: at, b: bt });
            if state.is_empty() {
                return Polytope::empty(dim);
            }
        }
        // Also keep the box bounds of the original ambient space: callers pass
        // a box that is part of the constraint system.
        let points: Vec<Vec<S>> = state
            .points
            .iter()
            .map(|t| {
                let mut x = p0.clone();
                for i in 0..k {
                    for j in 0..dim {
                        x[j] = x[j].clone() + n[(j, i)].clone() * t[i].clone();
                    }
                }
                x
            })
            .collect();
        Polytope::from_points(dim, points)
    }

    /// Projection onto the given (1-based, sorted) coordinate subset.
    pub fn project(&self, coords: &[usize]) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::EmptyCoordinateSet);
        }
        if coords.iter().any(|&c| c < 1 || c > self.dim) {
            return Err(Error::DimensionMismatch(format!(
                "projection coordinates {:?} out of range 1..={}",
                coords, self.dim
            )));
        }
        let pts: Vec<Vec<S>> = self
            .vertices
            .iter()
            .map(|v| coords.iter().map(|&c| v[c - 1].clone()).collect())
            .collect();
        Ok(Polytope::from_points(coords.len(), pts))
    }

    /// Preimage of a polytope living on the coordinates `coords` of an
    /// ambient d-dimensional space, bounded by `free_bounds` on the remaining
    /// coordinates (given in increasing coordinate order).
    pub fn extrude_preimage(
        &self,
        ambient_dim: usize,
        coords: &[usize],
        free_bounds: &[(S, S)],
    ) -> Self {
        assert_eq!(self.dim, coords.len());
        let free: Vec<usize> = (1..=ambient_dim).filter(|c| !coords.contains(c)).collect();
        assert_eq!(free.len(), free_bounds.len());
        let lift = |h: &Halfspace<S>| -> Halfspace<S> {
            let mut a = vec![S::zero(); ambient_dim];
            for (i, &c) in coords.iter().enumerate() {
                a[c - 1] = h.a[i].clone();
            }
            Halfspace { a, b: h.b.clone() }
        };
        let ineqs: Vec<Halfspace<S>> = self.inequalities.iter().map(lift).collect();
        let eqs: Vec<Halfspace<S>> = self.equations.iter().map(lift).collect();
        let own_box = self.bounding_box();
        let mut bbox = vec![(S::zero(), S::zero()); ambient_dim];
        for (i, &c) in coords.iter().enumerate() {
            bbox[c - 1] = own_box[i].clone();
        }
        for (i, &c) in free.iter().enumerate() {
            bbox[c - 1] = free_bounds[i].clone();
        }
        Polytope::from_halfspaces(ambient_dim, &ineqs, &eqs, &bbox)
    }

    /// Intersection of polytopes in a common ambient space. An empty
    /// intersection is a valid empty polytope, not an error.
    pub fn intersect(ps: &[&Polytope<S>]) -> Self {
        assert!(!ps.is_empty());
        let dim = ps[0].dim;
        assert!(ps.iter().all(|p| p.dim == dim), "ambient dimension mismatch");
        if ps.iter().any(|p| p.is_empty()) {
            return Polytope::empty(dim);
        }
        let mut bbox = ps[0].bounding_box();
        for p in &ps[1..] {
            for (acc, cur) in bbox.iter_mut().zip(p.bounding_box()) {
                if cur.0 > acc.0 {
                    acc.0 = cur.0;
                }
                if cur.1 < acc.1 {
                    acc.1 = cur.1;
                }
            }
        }
        if bbox.iter().any(|(lo, hi)| lo > hi) {
            return Polytope::empty(dim);
        }
        let ineqs: Vec<Halfspace<S>> =
            ps.iter().flat_map(|p| p.inequalities.iter().cloned()).collect();
        let eqs: Vec<Halfspace<S>> = ps.iter().flat_map(|p| p.equations.iter().cloned()).collect();
        Polytope::from_halfspaces(dim, &ineqs, &eqs, &bbox)
    }

    /// Exact equality of canonical vertex sets.
    pub fn equal(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.vertices.len() == other.vertices.len()
            && self
                .vertices
                .iter()
                .zip(&other.vertices)
                .all(|(a, b)| a.iter().zip(b).all(|(x, y)| x.approx_eq(y)))
    }

    /// Lexicographic triangulation: cones from the smallest vertex over the
    /// recursively triangulated facets not containing it. Deterministic.
    pub fn triangulate(&self) -> Vec<Vec<Vec<S>>> {
        if self.is_empty() {
            return vec![];
        }
        let k = self.affine_dim;
        if self.vertices.len() == k + 1 {
            return vec![self.vertices.clone()];
        }
        let apex = &self.vertices[0];
        let mut out = Vec::new();
        for h in &self.inequalities {
            if h.eval(apex).approx_zero() {
                continue;
            }
            let facet_pts: Vec<Vec<S>> = self
                .vertices
                .iter()
                .filter(|v| h.eval(v).approx_zero())
                .cloned()
                .collect();
            let facet = Polytope::from_points(self.dim, facet_pts);
            for sub in facet.triangulate() {
                let mut simplex = Vec::with_capacity(sub.len() + 1);
                simplex.push(apex.clone());
                simplex.extend(sub);
                out.push(simplex);
            }
        }
        out
    }

    /// Ambient-dimension Lebesgue volume: exact triangulation sum for
    /// full-dimensional polytopes, zero for lower-dimensional ones.
    pub fn volume(&self) -> S {
        if self.is_empty() || self.affine_dim < self.dim {
            return S::zero();
        }
        let mut total = S::zero();
        for simplex in self.triangulate() {
            total = total + simplex_volume(&simplex);
        }
        total
    }
}

/// Volume of a full-dimensional simplex given as `k+1` points.
pub fn simplex_volume<S: Scalar>(simplex: &[Vec<S>]) -> S {
    let k = simplex.len() - 1;
    let rows: Vec<Vec<S>> = (1..=k).map(|i| vec_sub(&simplex[i], &simplex[0])).collect();
    let det = determinant(&Mat::from_rows(rows));
    let mut fact = S::one();
    for i in 2..=k {
        fact = fact * S::from_int(i as i64);
    }
    det.abs() / fact
}

/// Determinant by fraction-free-ish Gaussian elimination (exact over
/// rationals).
pub fn determinant<S: Scalar>(m: &Mat<S>) -> S {
    let n = m.rows;
    assert_eq!(n, m.cols);
    let mut a = m.clone();
    let mut det = S::one();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[(r, col)].approx_zero());
        let Some(piv) = piv else { return S::zero() };
        if piv != col {
            for j in 0..n {
                let tmp = a[(piv, j)].clone();
                a[(piv, j)] = a[(col, j)].clone();
                a[(col, j)] = tmp;
            }
            det = -det;
        }
        let d = a[(col, col)].clone();
        det = det * d.clone();
        for r in col + 1..n {
            let f = a[(r, col)].clone() / d.clone();
            if f.is_zero() {
                continue;
            }
            for j in col..n {
                a[(r, j)] = a[(r, j)].clone() - f.clone() * a[(col, j)].clone();
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat_from_decimal_str, Rat};

    fn r(v: i64) -> Rat {
        Rat::from_integer(v.into())
    }

    fn rv(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&x| r(x)).collect()
    }

    fn rq(s: &str) -> Rat {
        rat_from_decimal_str(s).unwrap()
    }

    #[test]
    fn hull_drops_interior_points() {
        let p = Polytope::from_points(
            2,
            vec![
                rv(&[0, 0]),
                rv(&[1, 0]),
                rv(&[0, 1]),
                vec![rq("1/4"), rq("1/4")],
            ],
        );
        assert_eq!(p.vertices().len(), 3);
        assert_eq!(p.affine_dim(), 2);
        assert_eq!(p.inequalities().len(), 3);
        assert!(p.contains(&[rq("1/4"), rq("1/4")]));
        assert!(!p.contains(&rv(&[1, 1])));
    }

    #[test]
    fn hull_single_point_and_segment() {
        let p = Polytope::from_points(3, vec![rv(&[1, 2, 3])]);
        assert_eq!(p.affine_dim(), 0);
        assert_eq!(p.vertices().len(), 1);
        assert_eq!(p.equations().len(), 3);
        assert!(p.contains(&rv(&[1, 2, 3])));

        let seg = Polytope::from_points(2, vec![rv(&[0, 0]), rv(&[2, 2]), rv(&[1, 1])]);
        assert_eq!(seg.affine_dim(), 1);
        assert_eq!(seg.vertices().len(), 2);
        assert_eq!(seg.equations().len(), 1);
        assert!(seg.contains(&rv(&[1, 1])));
        assert!(!seg.contains(&rv(&[1, 0])));
    }

    #[test]
    fn projection_examples() {
        let cube = Polytope::from_points(
            3,
            (0..8).map(|i| rv(&[i & 1, (i >> 1) & 1, (i >> 2) & 1])).collect(),
        );
        let sq = cube.project(&[1, 2]).unwrap();
        assert_eq!(sq.vertices().len(), 4);
        assert_eq!(sq.volume(), r(1));

        let tri = Polytope::from_points(3, vec![rv(&[0, 1, 2]), rv(&[1, 5, 4]), rv(&[2, 3, 5])]);
        let p12 = tri.project(&[1, 2]).unwrap();
        let expect =
            Polytope::from_points(2, vec![rv(&[0, 1]), rv(&[1, 5]), rv(&[2, 3])]);
        assert!(p12.equal(&expect));

        let idp = cube.project(&[1, 2, 3]).unwrap();
        assert!(idp.equal(&cube));

        assert!(matches!(cube.project(&[]), Err(crate::error::Error::EmptyCoordinateSet)));
    }

    #[test]
    fn extrusion_examples() {
        let interval = Polytope::from_points(1, vec![rv(&[0]), rv(&[1])]);
        let square = interval.extrude_preimage(2, &[1], &[(r(0), r(1))]);
        assert_eq!(square.vertices().len(), 4);
        assert_eq!(square.volume(), r(1));

        // Full-coordinate extrusion is the identity.
        let tri = Polytope::from_points(2, vec![rv(&[0, 0]), rv(&[1, 0]), rv(&[0, 1])]);
        let same = tri.extrude_preimage(2, &[1, 2], &[]);
        assert!(same.equal(&tri));
    }

    #[test]
    fn intersection_examples() {
        let sq1 = Polytope::from_points(
            2,
            vec![rv(&[0, 0]), rv(&[1, 0]), rv(&[0, 1]), rv(&[1, 1])],
        );
        let sq2 = Polytope::from_points(
            2,
            vec![
                vec![rq("1/2"), r(0)],
                vec![rq("3/2"), r(0)],
                vec![rq("1/2"), r(1)],
                vec![rq("3/2"), r(1)],
            ],
        );
        let inter = Polytope::intersect(&[&sq1, &sq2]);
        assert_eq!(inter.vertices().len(), 4);
        assert_eq!(inter.volume(), rq("1/2"));

        // Idempotence.
        let again = Polytope::intersect(&[&sq1, &sq1]);
        assert!(again.equal(&sq1));

        // Disjoint: a valid empty polytope.
        let far = Polytope::from_points(2, vec![rv(&[5, 5]), rv(&[6, 5]), rv(&[5, 6])]);
        let empty = Polytope::intersect(&[&sq1, &far]);
        assert!(empty.is_empty());
        assert_eq!(empty.volume(), r(0));
    }

    #[test]
    fn two_prisms_intersection_has_five_vertices() {
        // Three sample points in R^3; the path graph 1-2-3 has cliques {1,2}
        // and {2,3}; the support region is the intersection of the two prisms
        // and has five vertices, two of them new.
        let pts = vec![rv(&[0, 1, 2]), rv(&[1, 5, 4]), rv(&[2, 3, 5])];
        let hull = Polytope::from_points(3, pts.clone());
        let bbox = hull.bounding_box();
        let p12 = hull.project(&[1, 2]).unwrap().extrude_preimage(3, &[1, 2], &[bbox[2].clone()]);
        let p23 = hull.project(&[2, 3]).unwrap().extrude_preimage(3, &[2, 3], &[bbox[0].clone()]);
        let s = Polytope::intersect(&[&p12, &p23]);
        let mut expected = pts;
        expected.push(rv(&[2, 3, 3]));
        expected.push(vec![rq("1/2"), r(3), r(5)]);
        let expect = Polytope::from_points(3, expected);
        assert!(s.equal(&expect));
        assert_eq!(s.vertices().len(), 5);
        // Contains the sample hull.
        for v in hull.vertices() {
            assert!(s.contains(v));
        }
    }

    #[test]
    fn volume_examples() {
        let cube = Polytope::from_points(
            3,
            (0..8).map(|i| rv(&[i & 1, (i >> 1) & 1, (i >> 2) & 1])).collect(),
        );
        assert_eq!(cube.volume(), r(1));

        for d in 1..=4usize {
            let mut pts = vec![vec![r(0); d]];
            for i in 0..d {
                let mut e = vec![r(0); d];
                e[i] = r(1);
                pts.push(e);
            }
            let simplex = Polytope::from_points(d, pts);
            let mut fact = r(1);
            for i in 2..=d as i64 {
                fact = fact * r(i);
            }
            assert_eq!(simplex.volume(), r(1) / fact);
        }

        // Lower-dimensional: zero ambient volume.
        let seg = Polytope::from_points(2, vec![rv(&[0, 0]), rv(&[1, 1])]);
        assert_eq!(seg.volume(), r(0));
    }

    #[test]
    fn volume_invariant_under_permutation() {
        let pts = vec![rv(&[0, 0, 0]), rv(&[2, 0, 0]), rv(&[0, 3, 0]), rv(&[0, 0, 4]), rv(&[2, 3, 4])];
        let p = Polytope::from_points(3, pts.clone());
        // Permute coordinates (x,y,z) -> (z,x,y): unimodular.
        let perm: Vec<Vec<Rat>> =
            pts.iter().map(|v| vec![v[2].clone(), v[0].clone(), v[1].clone()]).collect();
        let q = Polytope::from_points(3, perm);
        assert_eq!(p.volume(), q.volume());
        // Vertex order does not matter.
        let mut rev = pts;
        rev.reverse();
        let p2 = Polytope::from_points(3, rev);
        assert_eq!(p.volume(), p2.volume());
    }

    #[test]
    fn h_to_v_round_trip_random_rationals() {
        // V -> H -> V reproduces the same vertex set on random rational
        // polytopes up to dimension 4.
        let mut state = 7u64;
        let mut rnd = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 33) as i64
        };
        for trial in 0..200 {
            let d = 1 + (trial % 4) as usize;
            let n = d + 1 + (rnd() % 6) as usize;
            let pts: Vec<Vec<Rat>> = (0..n)
                .map(|_| {
                    (0..d)
                        .map(|_| Rat::new((rnd() % 41 - 20).into(), (1 + rnd() % 4).into()))
                        .collect()
                })
                .collect();
            let p = Polytope::from_points(d, pts);
            if p.is_empty() {
                continue;
            }
            let q = Polytope::from_halfspaces(
                d,
                p.inequalities(),
                p.equations(),
                &p.bounding_box(),
            );
            assert!(p.equal(&q), "round trip failed on trial {}", trial);
        }
    }

    #[test]
    fn float_mode_hull_and_volume() {
        let p = Polytope::from_points(
            2,
            vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![0.25, 0.25]],
        );
        assert_eq!(p.vertices().len(), 3);
        assert!((p.volume() - 0.5).abs() < 1e-12);
        let c = Polytope::from_points(2, vec![vec![0.0, 0.0], vec![1.0, 1.0]]);
        assert_eq!(c.affine_dim(), 1);
    }
}
