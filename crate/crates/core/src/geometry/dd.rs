//! Incremental vertex enumeration: cut a polytope, maintained as a vertex set
//! with per-vertex tight-constraint bookkeeping, by one halfspace at a time.

use crate::linalg::{dot, vec_sub};
use crate::scalar::Scalar;

/// Halfspace `a·x ≤ b` (or hyperplane `a·x = b` when used as an equation).
#[derive(Clone, Debug, PartialEq)]
pub struct Halfspace<S> {
    pub a: Vec<S>,
    pub b: S,
}

impl<S: Scalar> Halfspace<S> {
    pub fn eval(&self, x: &[S]) -> S {
        self.b.clone() - dot(&self.a, x)
    }
}

/// Vertex set of an intersection of halfspaces, built by cutting an initial
/// box. `tight[i]` lists the indices of processed constraints active at
/// `points[i]`.
pub struct CutState<S> {
    pub dim: usize,
    pub points: Vec<Vec<S>>,
    pub tight: Vec<Vec<usize>>,
    pub constraints: Vec<Halfspace<S>>,
}

impl<S: Scalar> CutState<S> {
    /// Starts from the axis-aligned box with the given per-coordinate bounds.
    pub fn from_box(bounds: &[(S, S)]) -> Self {
        let dim = bounds.len();
        let mut constraints = Vec::with_capacity(2 * dim);
        for (i, (lo, hi)) in bounds.iter().enumerate() {
            let mut a = vec![S::zero(); dim];
            a[i] = -S::one();
            constraints.push(Halfspace { a, b: -lo.clone() });
            let mut a = vec![S::zero(); dim];
            a[i] = S::one();
            constraints.push(Halfspace { a, b: hi.clone() });
        }
        let mut points = Vec::with_capacity(1 << dim.min(20));
        let mut tight = Vec::new();
        for corner in 0u64..(1 << dim) {
            let mut p = Vec::with_capacity(dim);
            let mut t = Vec::with_capacity(dim);
            for i in 0..dim {
                if corner >> i & 1 == 0 {
                    p.push(bounds[i].0.clone());
                    t.push(2 * i);
                } else {
                    p.push(bounds[i].1.clone());
                    t.push(2 * i + 1);
                }
            }
            points.push(p);
            tight.push(t);
        }
        CutState { dim, points, tight, constraints }
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn recompute_tight(&self, p: &[S]) -> Vec<usize> {
        self.constraints
            .iter()
            .enumerate()
            .filter(|(_, h)| h.eval(p).approx_zero())
            .map(|(i, _)| i)
            .collect()
    }

    /// Combinatorial adjacency: u and w are adjacent iff no other current
    /// point is tight on every constraint they are both tight on.
    fn adjacent(&self, u: usize, w: usize) -> bool {
        let common: Vec<usize> =
            self.tight[u].iter().filter(|i| self.tight[w].contains(i)).copied().collect();
        if common.len() + 1 < self.dim {
            return false;
        }
        for v in 0..self.points.len() {
            if v == u || v == w {
                continue;
            }
            if common.iter().all(|c| self.tight[v].contains(c)) {
                return false;
            }
        }
        true
    }

    /// Cuts by `h`, keeping `{x : h.a·x ≤ h.b}`.
    pub fn cut(&mut self, h: Halfspace<S>) {
        assert_eq!(h.a.len(), self.dim);
        let idx = self.constraints.len();
        self.constraints.push(h);
        let h = self.constraints[idx].clone();
        let vals: Vec<S> = self.points.iter().map(|p| h.eval(p)).collect();
        let signs: Vec<i32> = vals.iter().map(|v| v.sign3()).collect();
        if signs.iter().all(|&s| s >= 0) {
            for (i, &s) in signs.iter().enumerate() {
                if s == 0 {
                    self.tight[i].push(idx);
                }
            }
            return;
        }
        let mut new_points = Vec::new();
        for u in 0..self.points.len() {
            if signs[u] <= 0 {
                continue;
            }
            for w in 0..self.points.len() {
                if signs[w] >= 0 || !self.adjacent(u, w) {
                    continue;
                }
                // val_u > 0 > val_w; crossing point at lambda in (0,1).
                let lambda = vals[u].clone() / (vals[u].clone() - vals[w].clone());
                let dir = vec_sub(&self.points[w], &self.points[u]);
                let p: Vec<S> = self.points[u]
                    .iter()
                    .zip(&dir)
                    .map(|(x, d)| x.clone() + lambda.clone() * d.clone())
                    .collect();
                new_points.push(p);
            }
        }
        let mut points = Vec::new();
        let mut tight = Vec::new();
        for i in 0..self.points.len() {
            if signs[i] > 0 {
                points.push(self.points[i].clone());
                tight.push(self.tight[i].clone());
            } else if signs[i] == 0 {
                points.push(self.points[i].clone());
                let mut t = self.tight[i].clone();
                t.push(idx);
                tight.push(t);
            }
        }
        'outer: for p in new_points {
            for q in &points {
                if p.iter().zip(q.iter()).all(|(x, y)| x.approx_eq(y)) {
                    continue 'outer;
                }
            }
            let t = self.recompute_tight(&p);
            points.push(p);
            tight.push(t);
        }
        self.points = points;
        self.tight = tight;
    }
}
