//! Quasi-Newton minimization (BFGS, inverse-Hessian form) with Armijo
//! backtracking, for the nonsmooth concave objective: subgradients stand in
//! for gradients where the function has kinks, and the history is reset when
//! the line search fails.

#[derive(Clone, Debug)]
pub struct BfgsOptions {
    /// Stop when the sup-norm of the (sub)gradient drops below this.
    pub gtol: f64,
    pub max_iter: usize,
    /// Relative objective-change threshold for the stall test.
    pub ftol_rel: f64,
    /// Number of consecutive stalled iterations that counts as converged.
    pub stall_iters: usize,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        BfgsOptions { gtol: 1e-6, max_iter: 10_000, ftol_rel: 1e-10, stall_iters: 5 }
    }
}

#[derive(Clone, Debug)]
pub struct BfgsResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub grad: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub grad_sup_norm: f64,
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |a, x| a.max(x.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimizes `f` starting from `x0`. The callback returns the value and a
/// (sub)gradient.
pub fn minimize<F>(mut func: F, x0: Vec<f64>, opts: &BfgsOptions) -> BfgsResult
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let n = x0.len();
    let mut x = x0;
    let (mut fx, mut g) = func(&x);
    // Inverse Hessian approximation, dense row-major.
    let mut h: Vec<f64> = identity(n);
    let mut stalled = 0usize;
    let mut iterations = 0usize;
    let mut just_reset = true;
    let c1 = 1e-4;
    while iterations < opts.max_iter {
        let gn = sup_norm(&g);
        if gn < opts.gtol {
            return BfgsResult { grad_sup_norm: gn, x, f: fx, grad: g, iterations, converged: true };
        }
        let mut p = neg_matvec(&h, &g, n);
        if dot(&p, &g) >= 0.0 {
            // Not a descent direction: restart from steepest descent.
            h = identity(n);
            p = g.iter().map(|v| -v).collect();
            just_reset = true;
        }
        let slope = dot(&p, &g);
        let mut alpha = 1.0f64;
        let mut accepted: Option<(Vec<f64>, f64, Vec<f64>)> = None;
        for _ in 0..40 {
            let xt: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a + alpha * b).collect();
            let (ft, gt) = func(&xt);
            if ft <= fx + c1 * alpha * slope {
                accepted = Some((xt, ft, gt));
                break;
            }
            alpha *= 0.5;
        }
        let Some((xt, ft, gt)) = accepted else {
            if just_reset {
                // Even steepest descent makes no progress: a kink floor.
                let gn = sup_norm(&g);
                return BfgsResult {
                    grad_sup_norm: gn,
                    x,
                    f: fx,
                    grad: g,
                    iterations,
                    converged: gn < opts.gtol,
                };
            }
            // Nonsmoothness mitigation: drop the quasi-Newton history.
            h = identity(n);
            just_reset = true;
            continue;
        };
        just_reset = false;
        iterations += 1;
        let s: Vec<f64> = xt.iter().zip(&x).map(|(a, b)| a - b).collect();
        let yv: Vec<f64> = gt.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &yv);
        if sy > 1e-12 * sup_norm(&s) * sup_norm(&yv) {
            bfgs_update(&mut h, &s, &yv, sy, n);
        }
        let df = (fx - ft).abs();
        if df <= opts.ftol_rel * fx.abs().max(1.0) {
            stalled += 1;
        } else {
            stalled = 0;
        }
        x = xt;
        fx = ft;
        g = gt;
        if stalled >= opts.stall_iters {
            let gn = sup_norm(&g);
            return BfgsResult { grad_sup_norm: gn, x, f: fx, grad: g, iterations, converged: true };
        }
    }
    let gn = sup_norm(&g);
    let converged = gn < opts.gtol;
    BfgsResult { grad_sup_norm: gn, x, f: fx, grad: g, iterations, converged }
}

fn identity(n: usize) -> Vec<f64> {
    let mut h = vec![0.0; n * n];
    for i in 0..n {
        h[i * n + i] = 1.0;
    }
    h
}

fn neg_matvec(h: &[f64], g: &[f64], n: usize) -> Vec<f64> {
    (0..n).map(|i| -(0..n).map(|j| h[i * n + j] * g[j]).sum::<f64>()).collect()
}

/// H ← (I - ρ s yᵀ) H (I - ρ y sᵀ) + ρ s sᵀ with ρ = 1/(sᵀy).
fn bfgs_update(h: &mut [f64], s: &[f64], y: &[f64], sy: f64, n: usize) {
    let rho = 1.0 / sy;
    let hy: Vec<f64> = (0..n).map(|i| (0..n).map(|j| h[i * n + j] * y[j]).sum()).collect();
    let yhy = dot(y, &hy);
    for i in 0..n {
        for j in 0..n {
            h[i * n + j] += -rho * (s[i] * hy[j] + hy[i] * s[j])
                + rho * rho * yhy * s[i] * s[j]
                + rho * s[i] * s[j];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let res = minimize(
            |x| {
                let f = (x[0] - 3.0).powi(2) + 10.0 * (x[1] + 1.0).powi(2);
                (f, vec![2.0 * (x[0] - 3.0), 20.0 * (x[1] + 1.0)])
            },
            vec![0.0, 0.0],
            &BfgsOptions { gtol: 1e-10, ..Default::default() },
        );
        assert!(res.converged);
        assert!((res.x[0] - 3.0).abs() < 1e-8);
        assert!((res.x[1] + 1.0).abs() < 1e-8);
    }

    #[test]
    fn rosenbrock() {
        let res = minimize(
            |x| {
                let a = 1.0 - x[0];
                let b = x[1] - x[0] * x[0];
                let f = a * a + 100.0 * b * b;
                (f, vec![-2.0 * a - 400.0 * x[0] * b, 200.0 * b])
            },
            vec![-1.2, 1.0],
            &BfgsOptions { gtol: 1e-8, ..Default::default() },
        );
        assert!((res.x[0] - 1.0).abs() < 1e-5);
        assert!((res.x[1] - 1.0).abs() < 1e-5);
    }

    #[test]
    fn nonsmooth_abs() {
        // f(x) = |x| + (y-1)^2 has a kink along x = 0.
        let res = minimize(
            |x| {
                let f = x[0].abs() + (x[1] - 1.0).powi(2);
                (f, vec![x[0].signum(), 2.0 * (x[1] - 1.0)])
            },
            vec![2.0, -4.0],
            &BfgsOptions::default(),
        );
        assert!(res.x[0].abs() < 1e-6 || res.f < 1e-5);
        assert!((res.x[1] - 1.0).abs() < 1e-4);
    }
}
