//! Small dense linear algebra over a generic scalar.
//!
//! Everything here targets desk-scale matrices (dimension at most a dozen or
//! so), so plain Gaussian elimination with clone-heavy arithmetic is fine even
//! over big rationals.

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Mat<S> {
    pub rows: usize,
    pub cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)].clone();
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)].clone() + a.clone() * other[(k, j)].clone();
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.clone() + b.clone()).collect();
        Mat { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.clone() - b.clone()).collect();
        Mat { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, s: &S) -> Self {
        let data = self.data.iter().map(|a| a.clone() * s.clone()).collect();
        Mat { rows: self.rows, cols: self.cols, data }
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows)
                .all(|i| (0..i).all(|j| self[(i, j)].approx_eq(&self[(j, i)])))
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut out = Self::zeros(rows.len(), cols.len());
        for (ii, &i) in rows.iter().enumerate() {
            for (jj, &j) in cols.iter().enumerate() {
                out[(ii, jj)] = self[(i, j)].clone();
            }
        }
        out
    }

    /// Writes `block` into the positions `rows` x `cols` (additively).
    pub fn add_block(&mut self, rows: &[usize], cols: &[usize], block: &Self) {
        for (ii, &i) in rows.iter().enumerate() {
            for (jj, &j) in cols.iter().enumerate() {
                self[(i, j)] = self[(i, j)].clone() + block[(ii, jj)].clone();
            }
        }
    }
}

impl<S> std::ops::Index<(usize, usize)> for Mat<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> std::ops::IndexMut<(usize, usize)> for Mat<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

pub fn vec_sub<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

pub fn vec_add<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
}

pub fn vec_scale<S: Scalar>(a: &[S], s: &S) -> Vec<S> {
    a.iter().map(|x| x.clone() * s.clone()).collect()
}

/// Row echelon form with partial pivoting (largest magnitude via `to_f64`).
/// Returns the echelon matrix together with the pivot column per step.
fn echelon<S: Scalar>(m: &Mat<S>) -> (Mat<S>, Vec<(usize, usize)>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..a.cols {
        if row == a.rows {
            break;
        }
        let mut best: Option<(usize, f64)> = None;
        for r in row..a.rows {
            let v = &a[(r, col)];
            if !v.approx_zero() {
                let mag = v.to_f64().abs();
                if best.map_or(true, |(_, bm)| mag > bm) {
                    best = Some((r, mag));
                }
            }
        }
        let Some((prow, _)) = best else { continue };
        if prow != row {
            for c in 0..a.cols {
                let tmp = a[(prow, c)].clone();
                a[(prow, c)] = a[(row, c)].clone();
                a[(row, c)] = tmp;
            }
        }
        let inv = S::one() / a[(row, col)].clone();
        for r in row + 1..a.rows {
            let f = a[(r, col)].clone() * inv.clone();
            if f.is_zero() {
                continue;
            }
            for c in col..a.cols {
                a[(r, c)] = a[(r, c)].clone() - f.clone() * a[(row, c)].clone();
            }
            a[(r, col)] = S::zero();
        }
        pivots.push((row, col));
        row += 1;
    }
    (a, pivots)
}

pub fn rank<S: Scalar>(m: &Mat<S>) -> usize {
    echelon(m).1.len()
}

/// Rank of the span of a set of vectors (as rows).
pub fn rank_of_rows<S: Scalar>(rows: &[Vec<S>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    rank(&Mat::from_rows(rows.to_vec()))
}

/// Solves `A x = b`; `None` when inconsistent. Free variables are set to zero.
pub fn solve<S: Scalar>(a: &Mat<S>, b: &[S]) -> Option<Vec<S>> {
    assert_eq!(a.rows, b.len());
    let mut aug = Mat::zeros(a.rows, a.cols + 1);
    for i in 0..a.rows {
        for j in 0..a.cols {
            aug[(i, j)] = a[(i, j)].clone();
        }
        aug[(i, a.cols)] = b[i].clone();
    }
    let (e, pivots) = echelon(&aug);
    // Inconsistency: pivot in the augmented column.
    if pivots.iter().any(|&(_, c)| c == a.cols) {
        return None;
    }
    let mut x = vec![S::zero(); a.cols];
    for &(r, c) in pivots.iter().rev() {
        let mut acc = e[(r, a.cols)].clone();
        for j in c + 1..a.cols {
            acc = acc - e[(r, j)].clone() * x[j].clone();
        }
        x[c] = acc / e[(r, c)].clone();
    }
    Some(x)
}

pub fn invert<S: Scalar>(a: &Mat<S>) -> Option<Mat<S>> {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    let mut aug = Mat::zeros(n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            aug[(i, j)] = a[(i, j)].clone();
        }
        aug[(i, n + i)] = S::one();
    }
    let (e, pivots) = echelon(&aug);
    if pivots.len() < n || pivots.iter().any(|&(_, c)| c >= n) {
        return None;
    }
    // Back substitution to reduced form.
    let mut e = e;
    for k in (0..n).rev() {
        let (r, c) = pivots[k];
        let inv = S::one() / e[(r, c)].clone();
        for j in 0..2 * n {
            e[(r, j)] = e[(r, j)].clone() * inv.clone();
        }
        for up in 0..r {
            let f = e[(up, c)].clone();
            if f.is_zero() {
                continue;
            }
            for j in 0..2 * n {
                e[(up, j)] = e[(up, j)].clone() - f.clone() * e[(r, j)].clone();
            }
        }
    }
    let mut out = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = e[(i, n + j)].clone();
        }
    }
    Some(out)
}

/// Basis of the null space `{x : A x = 0}`.
pub fn null_space<S: Scalar>(a: &Mat<S>) -> Vec<Vec<S>> {
    let (e, pivots) = echelon(a);
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let free_cols: Vec<usize> = (0..a.cols).filter(|c| !pivot_cols.contains(c)).collect();
    let mut basis = Vec::new();
    for &fc in &free_cols {
        let mut x = vec![S::zero(); a.cols];
        x[fc] = S::one();
        for (k, &(r, c)) in pivots.iter().enumerate().rev() {
            let _ = k;
            let mut acc = S::zero();
            for j in c + 1..a.cols {
                acc = acc + e[(r, j)].clone() * x[j].clone();
            }
            x[c] = -acc / e[(r, c)].clone();
        }
        basis.push(x);
    }
    basis
}

/// Moore-Penrose pseudoinverse of a symmetric matrix.
///
/// Exact scalars go through a rank factorization `A = B C`, giving
/// `A^+ = C^T (C C^T)^{-1} (B^T B)^{-1} B^T` with no approximation. Floats use
/// the symmetric eigendecomposition with eigenvalues below `1e-10` zeroed.
pub fn sym_pseudoinverse<S: Scalar>(a: &Mat<S>) -> Mat<S> {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    if n == 0 {
        return Mat::zeros(0, 0);
    }
    if let Some(inv) = invert(a) {
        return inv;
    }
    if S::EXACT {
        let (e, pivots) = echelon(a);
        let r = pivots.len();
        if r == 0 {
            return Mat::zeros(n, n);
        }
        let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
        let b = a.submatrix(&(0..n).collect::<Vec<_>>(), &pivot_cols);
        let mut c = Mat::zeros(r, n);
        for i in 0..r {
            for j in 0..n {
                c[(i, j)] = e[(i, j)].clone();
            }
        }
        let cct = c.matmul(&c.transpose());
        let btb = b.transpose().matmul(&b);
        let left = invert(&cct).expect("C C^T invertible for rank factorization");
        let right = invert(&btb).expect("B^T B invertible for rank factorization");
        c.transpose().matmul(&left).matmul(&right).matmul(&b.transpose())
    } else {
        let af: Mat<f64> =
            Mat::from_rows((0..n).map(|i| a.row(i).iter().map(|x| x.to_f64()).collect()).collect());
        let (vals, vecs) = jacobi_eigen(&af);
        let mut out = Mat::<f64>::zeros(n, n);
        for k in 0..n {
            if vals[k].abs() <= 1e-10 {
                continue;
            }
            let w = 1.0 / vals[k];
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] += w * vecs[(i, k)] * vecs[(j, k)];
                }
            }
        }
        Mat::from_rows(
            (0..n).map(|i| out.row(i).iter().map(|x| S::from_f64(*x)).collect()).collect(),
        )
    }
}

/// Jacobi eigendecomposition of a symmetric f64 matrix. Returns eigenvalues
/// and the matrix of eigenvectors (columns).
pub fn jacobi_eigen(a: &Mat<f64>) -> (Vec<f64>, Mat<f64>) {
    let n = a.rows;
    let mut m = a.clone();
    let mut v = Mat::<f64>::identity(n);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += m[(i, j)] * m[(i, j)];
            }
        }
        if off.sqrt() < 1e-14 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[(p, q)].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * m[(p, q)]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| m[(i, i)]).collect(), v)
}

/// Exact positive-semidefiniteness test for a symmetric matrix over an exact
/// scalar: pivoted LDL^T, requiring nonnegative pivots and zero rows wherever
/// a diagonal pivot vanishes.
pub fn psd_certificate_exact<S: Scalar>(a: &Mat<S>) -> bool {
    assert!(S::EXACT);
    let n = a.rows;
    let mut m = a.clone();
    let mut active: Vec<usize> = (0..n).collect();
    while !active.is_empty() {
        // Pick the largest diagonal entry among active indices.
        let mut best: Option<(usize, f64)> = None;
        for (pos, &i) in active.iter().enumerate() {
            let v = m[(i, i)].to_f64();
            if best.map_or(true, |(_, bv)| v > bv) {
                best = Some((pos, v));
            }
        }
        let (pos, _) = best.unwrap();
        let i = active[pos];
        let d = m[(i, i)].clone();
        if d.is_negative() {
            return false;
        }
        if d.is_zero() {
            // All remaining diagonal entries are <= 0; they must be exactly
            // zero with zero off-diagonals.
            for &r in &active {
                if m[(r, r)].is_negative() {
                    return false;
                }
                for &c in &active {
                    if !m[(r, c)].is_zero() {
                        return false;
                    }
                }
            }
            return true;
        }
        active.remove(pos);
        // Schur complement step on the remaining indices.
        for &r in &active {
            let f = m[(r, i)].clone() / d.clone();
            if f.is_zero() {
                continue;
            }
            for &c in &active {
                m[(r, c)] = m[(r, c)].clone() - f.clone() * m[(i, c)].clone();
            }
        }
    }
    true
}

/// PSD test in the appropriate mode: exact LDL^T, or minimum eigenvalue down
/// to `-1e-8` for floats.
pub fn is_psd<S: Scalar>(a: &Mat<S>) -> bool {
    if a.rows == 0 {
        return true;
    }
    if S::EXACT {
        psd_certificate_exact(a)
    } else {
        let af: Mat<f64> = Mat::from_rows(
            (0..a.rows).map(|i| a.row(i).iter().map(|x| x.to_f64()).collect()).collect(),
        );
        let (vals, _) = jacobi_eigen(&af);
        vals.into_iter().all(|v| v >= -1e-8)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rat;
    use num_traits::Zero;

    fn rm(rows: &[&[i64]]) -> Mat<Rat> {
        Mat::from_rows(
            rows.iter().map(|r| r.iter().map(|&v| Rat::from_integer(v.into())).collect()).collect(),
        )
    }

    #[test]
    fn rank_and_solve() {
        let a = rm(&[&[1, 2], &[2, 4]]);
        assert_eq!(rank(&a), 1);
        let b = rm(&[&[1, 0], &[1, 1]]);
        assert_eq!(rank(&b), 2);
        let x = solve(&b, &[Rat::from_integer(3.into()), Rat::from_integer(5.into())]).unwrap();
        assert_eq!(x[0], Rat::from_integer(3.into()));
        assert_eq!(x[1], Rat::from_integer(2.into()));
    }

    #[test]
    fn inverse_exact() {
        let a = rm(&[&[2, 1], &[1, 1]]);
        let inv = invert(&a).unwrap();
        let prod = a.matmul(&inv);
        assert_eq!(prod, Mat::identity(2));
        assert!(invert(&rm(&[&[1, 2], &[2, 4]])).is_none());
    }

    #[test]
    fn pseudoinverse_rank_deficient_exact() {
        // a = [[1,1],[1,1]], a+ = [[1/4,1/4],[1/4,1/4]]
        let a = rm(&[&[1, 1], &[1, 1]]);
        let p = sym_pseudoinverse(&a);
        let q = Rat::new(1.into(), 4.into());
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(p[(i, j)], q);
            }
        }
        // Penrose identities
        let apa = a.matmul(&p).matmul(&a);
        assert_eq!(apa, a);
    }

    #[test]
    fn psd_checks() {
        assert!(is_psd(&rm(&[&[2, -1], &[-1, 2]])));
        assert!(!is_psd(&rm(&[&[1, 2], &[2, 1]])));
        assert!(is_psd(&rm(&[&[0, 0], &[0, 0]])));
        assert!(!is_psd(&rm(&[&[0, 1], &[1, 0]])));
        let f = Mat::<f64>::from_rows(vec![vec![2.0, -1.0], vec![-1.0, 2.0]]);
        assert!(is_psd(&f));
    }

    #[test]
    fn jacobi_eigenvalues() {
        let a = Mat::<f64>::from_rows(vec![vec![2.0, 1.0], vec![1.0, 2.0]]);
        let (mut vals, _) = jacobi_eigen(&a);
        vals.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert!((vals[0] - 1.0).abs() < 1e-12);
        assert!((vals[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn null_space_basis() {
        let a = rm(&[&[1, 1, 0], &[0, 0, 1]]);
        let ns = null_space(&a);
        assert_eq!(ns.len(), 1);
        let v = &ns[0];
        assert_eq!(v[0].clone() + v[1].clone(), Rat::from_integer(0.into()));
        assert!(v[2].is_zero());
    }
}
