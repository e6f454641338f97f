//! Numerical RU search over diagonal phase unitaries.
//!
//! Each operator is `sqrt(p_i) diag(e^{i θ_{i,w(a)}})`, constant on Hamming
//! weight classes. The weights live on the simplex through
//! `p_i = z_i² / Σ z²` and `θ_{i,0} = 0` fixes the gauge. We minimize
//! `Σ_{w<w'} |Σ_i p_i e^{i(θ_{i,w} - θ_{i,w'})} - γ^{(w-w')²}|²` by
//! Levenberg-Marquardt from seeded random starts.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::schur::{class_pairs, SchurMatrix};
use super::KrausSet;
use crate::error::{Error, Result};
use crate::numerics::{hamming_weight, ComplexMatrix, C64};

#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    pub restarts: usize,
    pub seed: u64,
    pub max_iterations: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            restarts: 32,
            seed: 0x5eed,
            max_iterations: 2000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PhaseRuSolution {
    pub set: KrausSet,
    /// Euclidean norm of the class-pair coefficient mismatch.
    pub residual: f64,
    /// Index of the start that converged.
    pub start: usize,
}

struct Problem {
    n_ops: usize,
    classes: usize,
    pairs: Vec<(usize, usize)>,
    targets: Vec<f64>,
}

impl Problem {
    fn n_params(&self) -> usize {
        self.n_ops * self.classes
    }

    fn theta(&self, x: &[f64], i: usize, w: usize) -> f64 {
        if w == 0 {
            0.0
        } else {
            x[self.n_ops + i * (self.classes - 1) + w - 1]
        }
    }

    fn theta_index(&self, i: usize, w: usize) -> Option<usize> {
        (w > 0).then(|| self.n_ops + i * (self.classes - 1) + w - 1)
    }

    fn weights(&self, x: &[f64]) -> Vec<f64> {
        let s: f64 = x[..self.n_ops].iter().map(|z| z * z).sum();
        x[..self.n_ops].iter().map(|z| z * z / s).collect()
    }

    /// Residual vector (real and imaginary parts interleaved) and Jacobian.
    fn evaluate(&self, x: &[f64], with_jacobian: bool) -> (DVector<f64>, Option<DMatrix<f64>>) {
        let m = self.pairs.len();
        let q = self.weights(x);
        let s: f64 = x[..self.n_ops].iter().map(|z| z * z).sum();
        let mut r = DVector::zeros(2 * m);
        let mut jac = with_jacobian.then(|| DMatrix::zeros(2 * m, self.n_params()));
        for (k, (&(w, w2), &target)) in self.pairs.iter().zip(&self.targets).enumerate() {
            let phases: Vec<C64> = (0..self.n_ops)
                .map(|i| C64::from_polar(1.0, self.theta(x, i, w) - self.theta(x, i, w2)))
                .collect();
            let mean: C64 = q.iter().zip(&phases).map(|(qi, e)| e * qi).sum();
            let res = mean - C64::new(target, 0.0);
            r[2 * k] = res.re;
            r[2 * k + 1] = res.im;
            if let Some(j) = jac.as_mut() {
                for i in 0..self.n_ops {
                    let dz = (phases[i] - mean) * (2.0 * x[i] / s);
                    j[(2 * k, i)] = dz.re;
                    j[(2 * k + 1, i)] = dz.im;
                    let dt = C64::i() * phases[i] * q[i];
                    if let Some(col) = self.theta_index(i, w) {
                        j[(2 * k, col)] += dt.re;
                        j[(2 * k + 1, col)] += dt.im;
                    }
                    if let Some(col) = self.theta_index(i, w2) {
                        j[(2 * k, col)] -= dt.re;
                        j[(2 * k + 1, col)] -= dt.im;
                    }
                }
            }
        }
        (r, jac)
    }

    fn levenberg_marquardt(&self, mut x: Vec<f64>, tol: f64, max_iter: usize) -> (Vec<f64>, f64) {
        let mut lambda = 1e-3;
        let (mut r, _) = self.evaluate(&x, false);
        let mut cost = r.norm_squared();
        for _ in 0..max_iter {
            if cost.sqrt() <= tol * 1e-3 {
                break;
            }
            let (_, j) = self.evaluate(&x, true);
            let j = j.expect("jacobian requested");
            let jt = j.transpose();
            let a = &jt * &j;
            let g = &jt * &r;
            let mut improved = false;
            while lambda < 1e12 {
                let mut damped = a.clone();
                for d in 0..damped.nrows() {
                    damped[(d, d)] += lambda * (1.0 + a[(d, d)]);
                }
                let Some(chol) = damped.cholesky() else {
                    lambda *= 4.0;
                    continue;
                };
                let step = chol.solve(&(-&g));
                let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
                let (rt, _) = self.evaluate(&trial, false);
                let ct = rt.norm_squared();
                if ct < cost && ct.is_finite() {
                    x = trial;
                    r = rt;
                    cost = ct;
                    lambda = (lambda / 3.0).max(1e-15);
                    improved = true;
                    break;
                }
                lambda *= 4.0;
            }
            if !improved {
                break;
            }
        }
        (x, cost.sqrt())
    }
}

fn phase_operator(problem: &Problem, x: &[f64], i: usize, n_qubits: usize) -> ComplexMatrix {
    let d: Vec<C64> = (0..1usize << n_qubits)
        .map(|a| C64::from_polar(1.0, problem.theta(x, i, hamming_weight(a))))
        .collect();
    ComplexMatrix::from_diag(&d)
}

/// Finds `n_ops` weighted diagonal phase unitaries reproducing the Schur
/// channel, trying `opts.restarts` seeded starts and returning the first
/// that reaches `tol`.
pub fn search_phase_ru(
    schur: &SchurMatrix,
    n_ops: usize,
    tol: f64,
    opts: SearchOptions,
) -> Result<PhaseRuSolution> {
    let n = schur.n_qubits();
    if n_ops == 0 {
        return Err(Error::InvalidArgument("need at least one operator".into()));
    }
    let pairs = class_pairs(n);
    let targets: Vec<f64> = pairs
        .iter()
        .map(|&(w, w2)| schur.class_coefficient(w, w2))
        .collect();

    // Identity channel: one operator suffices.
    let trivial = targets
        .iter()
        .map(|t| (t - 1.0).powi(2))
        .sum::<f64>()
        .sqrt();
    if trivial <= tol {
        let set = KrausSet::from_weighted_unitaries(vec![(
            "U1".into(),
            1.0,
            ComplexMatrix::identity(1 << n),
        )])?;
        return Ok(PhaseRuSolution {
            set,
            residual: trivial,
            start: 0,
        });
    }

    let problem = Problem {
        n_ops,
        classes: n + 1,
        pairs,
        targets,
    };
    let mut best = f64::INFINITY;
    for start in 0..opts.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(start as u64));
        let x0: Vec<f64> = (0..problem.n_params())
            .map(|k| {
                if k < n_ops {
                    rng.random_range(0.5..1.5)
                } else {
                    rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)
                }
            })
            .collect();
        let (x, residual) = problem.levenberg_marquardt(x0, tol, opts.max_iterations);
        best = best.min(residual);
        if residual <= tol {
            let p = problem.weights(&x);
            let items = (0..n_ops)
                .map(|i| {
                    (
                        format!("U{}", i + 1),
                        p[i],
                        phase_operator(&problem, &x, i, n),
                    )
                })
                .collect();
            return Ok(PhaseRuSolution {
                set: KrausSet::from_weighted_unitaries(items)?,
                residual,
                start,
            });
        }
    }
    Err(Error::SearchFailed {
        best_residual: best,
        tolerance: tol,
    })
}
