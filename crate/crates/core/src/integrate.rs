//! Closed-form integration of exponentials of affine functions over
//! simplices, and the finite-dimensional objective with subgradients.
//!
//! The integral of `exp(l)` over a simplex with vertex values `y_0..y_k`
//! equals `k! vol(Δ)` times the divided difference of `exp` at the values.
//! Divided differences of `exp` cancel catastrophically for clustered values,
//! so short spans are evaluated by a Taylor series around the mean value
//! (complete homogeneous symmetric polynomials), and the classical recurrence
//! is only used across spans wide enough to be stable.

use crate::error::{Error, Result};
use crate::geometry::{determinant, Polytope, Sample};
use crate::graph::{self, Graph};
use crate::linalg::{vec_sub, Mat};
use crate::refine::{refine_subdivisions, RefinedComplex};
use crate::scalar::{Rat, Scalar};
use crate::tent::{build_tent, TentFunction};
use rayon::prelude::*;

/// Divided difference of `exp` at the given values (repeats allowed).
pub fn exp_divided_difference(values: &[f64]) -> f64 {
    assert!(!values.is_empty());
    let mut z = values.to_vec();
    z.sort_by(f64::total_cmp);
    dd_table(&z)
}

const SERIES_SPAN: f64 = 1.0;

fn dd_table(z: &[f64]) -> f64 {
    let n = z.len();
    if z[n - 1] - z[0] <= SERIES_SPAN {
        return dd_series(z);
    }
    let mut t = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        t[i][i] = z[i].exp();
    }
    for span in 1..n {
        for i in 0..n - span {
            let j = i + span;
            t[i][j] = if z[j] - z[i] <= SERIES_SPAN {
                dd_series(&z[i..=j])
            } else {
                (t[i + 1][j] - t[i][j - 1]) / (z[j] - z[i])
            };
        }
    }
    t[0][n - 1]
}

/// Series evaluation around the mean: `[z_0..z_k]exp = e^m Σ_j h_j(z-m)/(j+k)!`
/// with `h_j` the complete homogeneous symmetric polynomials.
fn dd_series(z: &[f64]) -> f64 {
    let k = z.len() - 1;
    let mean = z.iter().sum::<f64>() / z.len() as f64;
    let w: Vec<f64> = z.iter().map(|v| v - mean).collect();
    let s = w.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    const JMAX: usize = 60;
    let mut h = vec![0.0f64; JMAX + 1];
    h[0] = 1.0;
    // h_j(S ∪ {w}) = h_j(S) + w·h_{j-1}(S ∪ {w}): ascending j uses the
    // already-updated h_{j-1}.
    for &wi in &w {
        for j in 1..=JMAX {
            h[j] += wi * h[j - 1];
        }
    }
    let mut kfact = 1.0f64;
    for i in 2..=k {
        kfact *= i as f64;
    }
    let mut acc = 0.0f64;
    let mut fact = kfact; // (j+k)! running, starting at k!
    let mut sj = 1.0f64; // s^j
    let mut jfact = 1.0f64; // j!
    for j in 0..=JMAX {
        if j > 0 {
            fact *= (j + k) as f64;
            sj *= s;
            jfact *= j as f64;
        }
        acc += h[j] / fact;
        // Tail bound: |h_j| ≤ C(k+j, j) s^j, so |term| ≤ s^j/(j! k!).
        if j > 2 && sj / (jfact * kfact) < 1e-19 {
            break;
        }
    }
    acc * mean.exp()
}

fn simplex_det(vertices: &[Vec<f64>]) -> f64 {
    let k = vertices.len() - 1;
    if k == 0 {
        return 1.0;
    }
    let rows: Vec<Vec<f64>> = (1..=k).map(|i| vec_sub(&vertices[i], &vertices[0])).collect();
    determinant(&Mat::from_rows(rows))
}

/// Exact value of `∫_Δ exp(l)` where `l` is the affine interpolant of the
/// vertex values on the simplex.
pub fn exp_integral_simplex(vertices: &[Vec<f64>], values: &[f64]) -> Result<f64> {
    let k = vertices.len() - 1;
    if values.len() != k + 1 {
        return Err(Error::DimensionMismatch(format!(
            "{} values for a {}-simplex",
            values.len(),
            k
        )));
    }
    if vertices.iter().any(|v| v.len() != k) {
        return Err(Error::DimensionMismatch("simplex must be full-dimensional".into()));
    }
    let det = simplex_det(vertices).abs();
    if det == 0.0 {
        return Err(Error::DegenerateSimplex);
    }
    Ok(det * exp_divided_difference(values))
}

/// `∫_Δ λ_j exp(l)` with `λ_j` the j-th barycentric coordinate: the divided
/// difference gains a repeated value at index j.
pub fn exp_moment_simplex(vertices: &[Vec<f64>], values: &[f64], j: usize) -> Result<f64> {
    let k = vertices.len() - 1;
    if values.len() != k + 1 || j > k {
        return Err(Error::DimensionMismatch("moment index out of range".into()));
    }
    let det = simplex_det(vertices).abs();
    if det == 0.0 {
        return Err(Error::DegenerateSimplex);
    }
    let mut vals = values.to_vec();
    vals.push(values[j]);
    Ok(det * exp_divided_difference(&vals))
}

/// All `k+1` moments of a simplex at once.
fn moments(vertices: &[Vec<f64>], values: &[f64]) -> Vec<f64> {
    let det = simplex_det(vertices).abs();
    (0..values.len())
        .map(|j| {
            let mut vals = values.to_vec();
            vals.push(values[j]);
            det * exp_divided_difference(&vals)
        })
        .collect()
}

/// Integral of the exponential of the summed tents over the support: builds
/// the refined complex and sums the per-simplex closed forms.
pub fn total_integral(
    cliques: &[Vec<usize>],
    tents: &[TentFunction<f64>],
    support: &Polytope<f64>,
) -> Result<(f64, RefinedComplex<f64>)> {
    let rc = refine_subdivisions(cliques, tents, support)?;
    let contributions: Vec<f64> = rc
        .simplices
        .par_iter()
        .map(|s| {
            let values: Vec<f64> = s.links.iter().map(|l| l.value).collect();
            simplex_det(&s.vertices).abs() * exp_divided_difference(&values)
        })
        .collect();
    Ok((contributions.iter().sum(), rc))
}

/// The optimization problem over clique heights for a fixed graph and sample:
/// cached projected sites, float support, and weights. Heights are laid out
/// clique-major: `y[c*n + i]` is the height of sample `i` on clique `c`.
#[derive(Clone, Debug)]
pub struct CliqueProblem {
    pub cliques: Vec<Vec<usize>>,
    pub n: usize,
    pub dim: usize,
    pub weights: Vec<f64>,
    /// Projected sample per clique (n sites each).
    pub sites: Vec<Vec<Vec<f64>>>,
    pub support: Polytope<f64>,
}

/// One objective evaluation: value, subgradient, the integral, and the
/// refined complex it was computed on.
pub struct ObjectiveEval {
    pub tau: f64,
    pub subgradient: Vec<f64>,
    pub integral: f64,
    pub complex: RefinedComplex<f64>,
}

impl CliqueProblem {
    /// Sets the problem up from an exact sample: the support polytope is
    /// computed exactly, then converted to floats once.
    pub fn new(g: &Graph, sample: &Sample<Rat>) -> Result<Self> {
        let support_exact = crate::geometry::support_polytope(g, sample);
        if !support_exact.is_full_dimensional() {
            return Err(Error::DegenerateSupport);
        }
        let cliques = graph::maximal_cliques(g).cliques;
        let sample_f = Sample {
            points: sample
                .points
                .iter()
                .map(|p| p.iter().map(|x| x.to_f64()).collect())
                .collect::<Vec<Vec<f64>>>(),
            weights: sample.weights.iter().map(|w| w.to_f64()).collect::<Vec<f64>>(),
        };
        let sites = cliques.iter().map(|c| sample_f.project_points(c)).collect();
        Ok(CliqueProblem {
            cliques,
            n: sample.n(),
            dim: g.d(),
            weights: sample_f.weights,
            sites,
            support: support_exact.to_f64(),
        })
    }

    pub fn var_count(&self) -> usize {
        self.cliques.len() * self.n
    }

    pub fn tents(&self, y: &[f64]) -> Result<Vec<TentFunction<f64>>> {
        assert_eq!(y.len(), self.var_count());
        self.cliques
            .iter()
            .enumerate()
            .map(|(c, _)| {
                build_tent(self.sites[c].clone(), y[c * self.n..(c + 1) * self.n].to_vec())
            })
            .collect()
    }

    /// Objective `τ(y) = Σ_i Σ_C w_i y_C^(i) - ∫ exp(Σ_C h_C)` and a
    /// subgradient. At non-differentiable points the subgradient is the one
    /// selected by the deterministic triangulation.
    pub fn objective(&self, y: &[f64]) -> Result<ObjectiveEval> {
        let tents = self.tents(y)?;
        let (integral, complex) = total_integral(&self.cliques, &tents, &self.support)?;
        let linear: f64 = (0..self.cliques.len())
            .map(|c| {
                (0..self.n).map(|i| self.weights[i] * y[c * self.n + i]).sum::<f64>()
            })
            .sum();
        let tau = linear - integral;
        // d/dy of the integral, accumulated per simplex from the barycentric
        // linkage of each vertex.
        let per_simplex: Vec<Vec<(usize, f64)>> = complex
            .simplices
            .par_iter()
            .map(|s| {
                let values: Vec<f64> = s.links.iter().map(|l| l.value).collect();
                let ms = moments(&s.vertices, &values);
                let mut contrib: Vec<(usize, f64)> = Vec::new();
                for (link, m) in s.links.iter().zip(ms) {
                    for (c, cw) in link.clique_weights.iter().enumerate() {
                        for (site, w) in cw {
                            contrib.push((c * self.n + site, w * m));
                        }
                    }
                }
                contrib
            })
            .collect();
        let mut dintegral = vec![0.0f64; self.var_count()];
        for contrib in per_simplex {
            for (idx, v) in contrib {
                dintegral[idx] += v;
            }
        }
        let subgradient: Vec<f64> = (0..self.var_count())
            .map(|idx| self.weights[idx % self.n] - dintegral[idx])
            .collect();
        Ok(ObjectiveEval { tau, subgradient, integral, complex })
    }
}
