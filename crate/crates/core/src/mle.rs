//! The maximum-likelihood driver: precondition checks, quasi-Newton
//! optimization of the clique-height objective, product fast path for
//! disconnected graphs, and density evaluation.

use crate::bfgs::{self, BfgsOptions};
use crate::error::{Error, Result};
use crate::geometry::{support_polytope, Polytope, Sample};
use crate::graph::{self, Graph};
use crate::integrate::CliqueProblem;
use crate::scalar::{Rat, Scalar};
use crate::tent::{build_tent, TentFunction};
use rand::{Rng, SeedableRng};

/// Sample-size precondition: existence and uniqueness of the estimate is
/// guaranteed (for chordal graphs, almost surely) once the sample exceeds the
/// largest clique by one. For non-chordal graphs the bound from a chordal
/// cover is reported.
#[derive(Clone, Debug)]
pub struct SampleSizeReport {
    pub n: usize,
    pub required: usize,
    pub pass: bool,
    pub chordal: bool,
    /// Largest clique of the heuristic chordal cover (non-chordal input only).
    pub cover_max_clique: Option<usize>,
    /// Sample size required under the cover bound.
    pub cover_required: Option<usize>,
}

pub fn check_sample_size(g: &Graph, n: usize) -> SampleSizeReport {
    let cliques = graph::maximal_cliques(g);
    let required = cliques.max_clique_size() + 1;
    let (chordal, _) = graph::is_chordal(g);
    let (cover_max_clique, cover_required) = if chordal {
        (None, None)
    } else {
        let cover = graph::chordal_cover(g);
        let m = graph::maximal_cliques(&cover).max_clique_size();
        (Some(m), Some(m + 1))
    };
    SampleSizeReport { n, required, pass: n >= required, chordal, cover_max_clique, cover_required }
}

#[derive(Clone, Debug)]
pub enum InitStrategy {
    /// Symmetric feasible start: every height is `-log vol(support) / t`.
    Uniform,
    /// Uniform start plus seeded noise, for uniqueness probes.
    PerturbedUniform { seed: u64, scale: f64 },
}

#[derive(Clone, Debug)]
pub struct FitOptions {
    pub gtol: f64,
    pub max_iter: usize,
    /// Merge coincident sample points, summing weights, at ingestion.
    pub merge_duplicates: bool,
    /// Solve disconnected graphs component by component and multiply.
    pub product_path: bool,
    pub init: InitStrategy,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            gtol: 1e-6,
            max_iter: 10_000,
            merge_duplicates: false,
            product_path: true,
            init: InitStrategy::Uniform,
        }
    }
}

/// Fitted estimate: per-clique heights of the tent functions whose
/// exponential product is the density.
#[derive(Clone, Debug)]
pub struct MleResult {
    pub graph: Graph,
    pub cliques: Vec<Vec<usize>>,
    pub sample: Vec<Vec<Rat>>,
    pub weights: Vec<Rat>,
    /// Heights per clique (post-rescale: the density integrates to one).
    pub heights: Vec<Vec<f64>>,
    /// Shift applied to the first clique's heights to normalize.
    pub rescale_shift: f64,
    /// Final objective value.
    pub tau: f64,
    /// Weighted log-likelihood of the fitted density.
    pub loglik: f64,
    pub integral_pre_rescale: f64,
    /// Integral recomputed after the rescale.
    pub integral: f64,
    pub converged: bool,
    pub iterations: usize,
    pub final_subgrad_norm: f64,
    pub support: Polytope<Rat>,
    pub tent_pole_count: usize,
    /// Vertices of the refined subdivision (the tent pole locations).
    pub tent_poles: Vec<Vec<f64>>,
    /// Component results when the graph was solved component-wise.
    pub components: Vec<MleResult>,
}

/// Rebuildable density evaluator: the tents of a fitted result.
pub struct DensityEvaluator {
    pub cliques: Vec<Vec<usize>>,
    pub tents: Vec<TentFunction<f64>>,
}

impl DensityEvaluator {
    /// Log-density, `None` outside the support.
    pub fn log_density(&self, x: &[f64]) -> Option<f64> {
        let mut total = 0.0;
        for (c, tent) in self.cliques.iter().zip(&self.tents) {
            let xc: Vec<f64> = c.iter().map(|&v| x[v - 1]).collect();
            total += tent.eval(&xc)?;
        }
        Some(total)
    }

    /// Density value; zero outside the support.
    pub fn density(&self, x: &[f64]) -> f64 {
        self.log_density(x).map_or(0.0, f64::exp)
    }
}

impl MleResult {
    pub fn evaluator(&self) -> DensityEvaluator {
        let tents = self
            .cliques
            .iter()
            .zip(&self.heights)
            .map(|(c, y)| {
                let sites: Vec<Vec<f64>> = self
                    .sample
                    .iter()
                    .map(|p| c.iter().map(|&v| p[v - 1].to_f64()).collect())
                    .collect();
                build_tent(sites, y.clone()).expect("stored heights valid")
            })
            .collect();
        DensityEvaluator { cliques: self.cliques.clone(), tents }
    }
}

/// Weighted log-likelihood of a density under a sample; negative infinity
/// when any sample point has zero density.
pub fn loglik(eval: &DensityEvaluator, points: &[Vec<f64>], weights: &[f64]) -> f64 {
    let mut total = 0.0;
    for (p, w) in points.iter().zip(weights) {
        match eval.log_density(p) {
            Some(l) => total += w * l,
            None => return f64::NEG_INFINITY,
        }
    }
    total
}

/// Maximizes the clique-height objective and returns the fitted density.
pub fn fit(g: &Graph, sample: &Sample<Rat>, opts: &FitOptions) -> Result<MleResult> {
    if g.d() != sample.d() {
        return Err(Error::DimensionMismatch(format!(
            "graph on {} vertices, sample in dimension {}",
            g.d(),
            sample.d()
        )));
    }
    let sample =
        if opts.merge_duplicates { sample.merged_duplicates() } else { sample.clone() };
    let report = check_sample_size(g, sample.n());
    if !report.pass {
        return Err(Error::InsufficientSample { n: sample.n(), required: report.required });
    }
    let components = graph::connected_components(g);
    if components.len() > 1 && opts.product_path {
        fit_product(g, &sample, opts, &components)
    } else {
        fit_connected(g, &sample, opts)
    }
}

fn fit_connected(g: &Graph, sample: &Sample<Rat>, opts: &FitOptions) -> Result<MleResult> {
    let problem = CliqueProblem::new(g, sample)?;
    let support_exact = support_polytope(g, sample);
    let t = problem.cliques.len();
    let n = problem.n;
    let log_uniform = -support_exact.volume().to_f64().ln();
    let mut y0 = vec![log_uniform / t as f64; t * n];
    if let InitStrategy::PerturbedUniform { seed, scale } = opts.init {
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        for v in y0.iter_mut() {
            *v += scale * (rng.gen::<f64>() * 2.0 - 1.0);
        }
    }
    let bopts = BfgsOptions {
        gtol: opts.gtol,
        max_iter: opts.max_iter,
        ..Default::default()
    };
    let res = bfgs::minimize(
        |y| {
            let ev = problem.objective(y).expect("objective evaluation");
            (-ev.tau, ev.subgradient.iter().map(|v| -v).collect())
        },
        y0,
        &bopts,
    );
    // Normalize exactly: shift one clique's heights by -log of the integral.
    let pre = problem.objective(&res.x)?;
    let shift = pre.integral.ln();
    let mut y = res.x.clone();
    for i in 0..n {
        y[i] -= shift;
    }
    let post = problem.objective(&y)?;
    let heights: Vec<Vec<f64>> = (0..t).map(|c| y[c * n..(c + 1) * n].to_vec()).collect();
    let result = MleResult {
        graph: g.clone(),
        cliques: problem.cliques.clone(),
        sample: sample.points.clone(),
        weights: sample.weights.clone(),
        heights,
        rescale_shift: -shift,
        tau: post.tau,
        loglik: 0.0,
        integral_pre_rescale: pre.integral,
        integral: post.integral,
        converged: res.converged,
        iterations: res.iterations,
        final_subgrad_norm: res.grad_sup_norm,
        support: support_exact,
        tent_pole_count: post.complex.vertex_pool.len(),
        tent_poles: post.complex.vertex_pool.clone(),
        components: vec![],
    };
    let eval = result.evaluator();
    let pts_f: Vec<Vec<f64>> =
        sample.points.iter().map(|p| p.iter().map(|x| x.to_f64()).collect()).collect();
    let w_f: Vec<f64> = sample.weights.iter().map(|w| w.to_f64()).collect();
    let ll = loglik(&eval, &pts_f, &w_f);
    Ok(MleResult { loglik: ll, ..result })
}

/// Disconnected graphs: the estimate is the product of the per-component
/// estimates of the projected samples.
fn fit_product(
    g: &Graph,
    sample: &Sample<Rat>,
    opts: &FitOptions,
    components: &[Vec<usize>],
) -> Result<MleResult> {
    let mut sub_results = Vec::with_capacity(components.len());
    for verts in components {
        let (sub, _) = graph::induced_subgraph(g, verts);
        let pts = sample.project_points(verts);
        let sub_sample = Sample::new(pts, sample.weights.clone())?;
        sub_results.push(fit_connected(&sub, &sub_sample, opts)?);
    }
    // Reassemble: map each component clique back to original labels and find
    // it in the canonical clique order of the full graph.
    let cliques = graph::maximal_cliques(g).cliques;
    let n = sample.n();
    let mut heights = vec![Vec::new(); cliques.len()];
    for (verts, sub) in components.iter().zip(&sub_results) {
        for (ci, c) in sub.cliques.iter().enumerate() {
            let mapped: Vec<usize> = c.iter().map(|&v| verts[v - 1]).collect();
            let pos = cliques
                .iter()
                .position(|cl| cl == &mapped)
                .expect("component clique is a clique of the full graph");
            heights[pos] = sub.heights[ci].clone();
        }
    }
    let support_exact = support_polytope(g, sample);
    let linear: f64 = heights
        .iter()
        .map(|h| h.iter().zip(&sample.weights).map(|(y, w)| w.to_f64() * y).sum::<f64>())
        .sum();
    let integral: f64 = sub_results.iter().map(|r| r.integral).product();
    let integral_pre: f64 = sub_results.iter().map(|r| r.integral_pre_rescale).product();
    let loglik: f64 = sub_results.iter().map(|r| r.loglik).sum();
    // Tent poles of a product structure: concatenation over components.
    let pole_count: usize = sub_results.iter().map(|r| r.tent_pole_count).product();
    let mut tent_poles: Vec<Vec<f64>> = Vec::new();
    if pole_count <= 50_000 {
        tent_poles.push(vec![0.0; g.d()]);
        for (verts, sub) in components.iter().zip(&sub_results) {
            let mut next = Vec::with_capacity(tent_poles.len() * sub.tent_poles.len());
            for base in &tent_poles {
                for pole in &sub.tent_poles {
                    let mut v = base.clone();
                    for (i, &orig) in verts.iter().enumerate() {
                        v[orig - 1] = pole[i];
                    }
                    next.push(v);
                }
            }
            tent_poles = next;
        }
    }
    Ok(MleResult {
        graph: g.clone(),
        cliques,
        sample: sample.points.clone(),
        weights: sample.weights.clone(),
        heights,
        rescale_shift: sub_results.iter().map(|r| r.rescale_shift).sum(),
        tau: linear - integral,
        loglik,
        integral_pre_rescale: integral_pre,
        integral,
        converged: sub_results.iter().all(|r| r.converged),
        iterations: sub_results.iter().map(|r| r.iterations).sum(),
        final_subgrad_norm: sub_results
            .iter()
            .map(|r| r.final_subgrad_norm)
            .fold(0.0, f64::max),
        support: support_exact,
        tent_pole_count: pole_count,
        tent_poles,
        components: sub_results,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(v: i64) -> Rat {
        Rat::from_integer(v.into())
    }

    #[test]
    fn sample_size_report() {
        let path = Graph::new(3, &[(1, 2), (2, 3)]).unwrap();
        let rep = check_sample_size(&path, 3);
        assert!(rep.pass && rep.chordal);
        assert_eq!(rep.required, 3);

        let k3 = Graph::new(3, &[(1, 2), (1, 3), (2, 3)]).unwrap();
        let rep = check_sample_size(&k3, 3);
        assert!(!rep.pass);
        assert_eq!(rep.required, 4);

        let c4 = Graph::new(4, &[(1, 2), (2, 3), (3, 4), (1, 4)]).unwrap();
        let rep = check_sample_size(&c4, 4);
        assert!(!rep.chordal);
        assert_eq!(rep.cover_max_clique, Some(3));
        assert_eq!(rep.cover_required, Some(4));
        assert!(rep.pass);
    }

    #[test]
    fn uniform_on_simplex_is_stationary() {
        // Complete graph, n = d+1 generic points: constant heights equal to
        // -log vol give a vanishing subgradient exactly.
        let g = Graph::new(2, &[(1, 2)]).unwrap();
        let pts = vec![
            vec![r(0), r(0)],
            vec![r(3), r(1)],
            vec![r(1), r(2)],
        ];
        let sample = Sample::uniform(pts).unwrap();
        let problem = CliqueProblem::new(&g, &sample).unwrap();
        let vol = support_polytope(&g, &sample).volume().to_f64();
        let y = vec![-vol.ln(); 3];
        let ev = problem.objective(&y).unwrap();
        let gn = ev.subgradient.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        assert!(gn < 1e-12, "subgradient sup-norm {}", gn);
        assert!((ev.integral - 1.0).abs() < 1e-12);

        let fitted = fit(&g, &sample, &FitOptions::default()).unwrap();
        assert!(fitted.converged);
        assert!((fitted.loglik + vol.ln()).abs() < 1e-9);
        assert!((fitted.integral - 1.0).abs() < 1e-9);
    }

    #[test]
    fn insufficient_sample_rejected() {
        let g = Graph::new(2, &[]).unwrap();
        let sample = Sample::uniform(vec![vec![r(0), r(0)]]).unwrap();
        assert!(matches!(
            fit(&g, &sample, &FitOptions::default()),
            Err(Error::InsufficientSample { .. })
        ));
    }

    #[test]
    fn degenerate_support_rejected() {
        let g = Graph::new(2, &[(1, 2)]).unwrap();
        // Collinear points: the hull is one-dimensional.
        let sample = Sample::uniform(vec![
            vec![r(0), r(0)],
            vec![r(1), r(1)],
            vec![r(2), r(2)],
        ])
        .unwrap();
        assert!(matches!(
            fit(&g, &sample, &FitOptions::default()),
            Err(Error::DegenerateSupport)
        ));
    }

    #[test]
    fn small_path_graph_fit_normalizes() {
        let g = Graph::new(2, &[(1, 2)]).unwrap();
        let pts = vec![
            vec![r(0), r(0)],
            vec![r(2), r(0)],
            vec![r(0), r(2)],
            vec![r(2), r(2)],
            vec![r(1), r(1)],
        ];
        let sample = Sample::uniform(pts).unwrap();
        let fitted = fit(&g, &sample, &FitOptions::default()).unwrap();
        assert!(fitted.converged);
        assert!((fitted.integral_pre_rescale - 1.0).abs() < 1e-3);
        assert!((fitted.integral - 1.0).abs() < 1e-9);
        // Log-likelihood recomputed from the density matches.
        let eval = fitted.evaluator();
        let pts_f: Vec<Vec<f64>> =
            fitted.sample.iter().map(|p| p.iter().map(|x| x.to_f64()).collect()).collect();
        let w: Vec<f64> = fitted.weights.iter().map(|x| x.to_f64()).collect();
        let ll = loglik(&eval, &pts_f, &w);
        assert!((ll - fitted.loglik).abs() < 1e-8);
        // The fitted objective dominates the uniform-density objective.
        assert!(fitted.loglik >= -fitted.support.volume().to_f64().ln() - 1e-9);
    }

    #[test]
    fn product_path_equals_sum_of_components() {
        let g = Graph::new(2, &[]).unwrap();
        let pts = vec![
            vec![r(0), r(1)],
            vec![r(1), r(3)],
            vec![r(2), r(0)],
            vec![r(3), r(2)],
        ];
        let sample = Sample::uniform(pts).unwrap();
        let fitted = fit(&g, &sample, &FitOptions::default()).unwrap();
        assert_eq!(fitted.components.len(), 2);
        let sum: f64 = fitted.components.iter().map(|c| c.loglik).sum();
        assert!((fitted.loglik - sum).abs() < 1e-12);
        assert!((fitted.integral - 1.0).abs() < 1e-9);
        // Density outside the support is zero.
        let eval = fitted.evaluator();
        assert_eq!(eval.density(&[10.0, 10.0]), 0.0);
        // Positive at all sample points.
        for p in &pts_f(&fitted) {
            assert!(eval.density(p) > 0.0);
        }
    }

    fn pts_f(res: &MleResult) -> Vec<Vec<f64>> {
        res.sample.iter().map(|p| p.iter().map(|x| x.to_f64()).collect()).collect()
    }
}
