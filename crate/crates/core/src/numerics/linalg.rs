//! SVD-backed helpers: trace norm, numerical rank, minimum-norm solves and
//! orthonormal completion.

use nalgebra::DMatrix;

use super::matrix::{ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Relative threshold used when no explicit rank tolerance is supplied.
pub const DEFAULT_RELATIVE_RANK_TOL: f64 = 1e-10;

/// Relative residual accepted by [`min_norm_solve`].
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-10;

fn to_na(a: &ComplexMatrix) -> DMatrix<C64> {
    DMatrix::from_fn(a.rows(), a.cols(), |i, j| a[(i, j)])
}

fn from_na(m: &DMatrix<C64>) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Thin singular value decomposition `A = U diag(s) V†`.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    /// `V†`, one right singular vector (conjugated) per row.
    pub v_adjoint: ComplexMatrix,
}

impl Svd {
    pub fn new(a: &ComplexMatrix) -> Self {
        let svd = to_na(a).svd(true, true);
        Svd {
            u: from_na(svd.u.as_ref().expect("U requested")),
            singular_values: svd.singular_values.iter().copied().collect(),
            v_adjoint: from_na(svd.v_t.as_ref().expect("V^T requested")),
        }
    }

    pub fn max_singular_value(&self) -> f64 {
        self.singular_values.iter().copied().fold(0.0, f64::max)
    }

    fn cutoff(&self, tol: Option<f64>) -> f64 {
        tol.unwrap_or(DEFAULT_RELATIVE_RANK_TOL * self.max_singular_value())
    }

    pub fn rank(&self, tol: Option<f64>) -> usize {
        let cut = self.cutoff(tol);
        self.singular_values.iter().filter(|&&s| s > cut).count()
    }

    /// Orthonormal basis of the row space (right singular vectors with
    /// singular value above the cutoff).
    pub fn row_space(&self, tol: Option<f64>) -> Vec<Vec<C64>> {
        let cut = self.cutoff(tol);
        self.singular_values
            .iter()
            .enumerate()
            .filter(|(_, &s)| s > cut)
            .map(|(k, _)| self.v_adjoint.row(k).iter().map(|z| z.conj()).collect())
            .collect()
    }
}

pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = to_na(a).singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// `tr sqrt(A†A)`, the sum of singular values.
pub fn trace_norm(a: &ComplexMatrix) -> Result<f64> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    Ok(singular_values(a).iter().sum())
}

/// Number of singular values above `tol`; `None` means
/// `1e-10 * sigma_max`.
pub fn numeric_rank(a: &ComplexMatrix, tol: Option<f64>) -> usize {
    Svd::new(a).rank(tol)
}

/// Result of a minimum-norm least-squares solve.
#[derive(Debug, Clone, PartialEq)]
pub struct MinNormSolution {
    pub x: Vec<C64>,
    /// Euclidean norm of `A x - b`.
    pub residual: f64,
}

/// Options for [`min_norm_solve_with`].
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Absolute singular value cutoff; `None` uses the relative default.
    pub rank_tol: Option<f64>,
    /// The solve fails when `residual > residual_tol * |rhs|`.
    pub residual_tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            rank_tol: None,
            residual_tol: DEFAULT_RESIDUAL_TOL,
        }
    }
}

pub fn min_norm_solve(coeffs: &ComplexMatrix, rhs: &[C64]) -> Result<MinNormSolution> {
    min_norm_solve_with(coeffs, rhs, SolveOptions::default())
}

/// Pseudo-inverse solve `x = A⁺ b`.
pub fn min_norm_solve_with(
    coeffs: &ComplexMatrix,
    rhs: &[C64],
    opts: SolveOptions,
) -> Result<MinNormSolution> {
    if coeffs.rows() != rhs.len() {
        return Err(Error::DimensionMismatch {
            expected: format!("rhs of length {}", coeffs.rows()),
            found: format!("length {}", rhs.len()),
        });
    }
    let svd = Svd::new(coeffs);
    let cut = svd.cutoff(opts.rank_tol);
    let mut x = vec![ZERO; coeffs.cols()];
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s <= cut {
            continue;
        }
        // (u_k† b) / s_k
        let proj: C64 = (0..coeffs.rows())
            .map(|i| svd.u[(i, k)].conj() * rhs[i])
            .sum::<C64>()
            / s;
        for (j, xj) in x.iter_mut().enumerate() {
            *xj += svd.v_adjoint[(k, j)].conj() * proj;
        }
    }
    let residual = residual_norm(coeffs, &x, rhs);
    let rhs_norm = rhs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let tolerance = opts.residual_tol * rhs_norm;
    if residual > tolerance {
        return Err(Error::RankDeficientInconsistent {
            residual,
            tolerance,
        });
    }
    Ok(MinNormSolution { x, residual })
}

pub fn residual_norm(a: &ComplexMatrix, x: &[C64], b: &[C64]) -> f64 {
    (0..a.rows())
        .map(|i| {
            let ax: C64 = a.row(i).iter().zip(x).map(|(p, q)| p * q).sum();
            (ax - b[i]).norm_sqr()
        })
        .sum::<f64>()
        .sqrt()
}

/// Orthonormal basis of `{x : A x = 0}`.
pub fn null_space(a: &ComplexMatrix, tol: Option<f64>) -> Vec<Vec<C64>> {
    let range = Svd::new(a).row_space(tol);
    complete_orthonormal(&range, a.cols())[range.len()..].to_vec()
}

fn dot(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Extends an orthonormal family in `C^n` to a full orthonormal basis.
/// The input vectors come first, unchanged. Candidates are the standard
/// basis vectors, picked greedily by largest orthogonal residual.
pub fn complete_orthonormal(basis: &[Vec<C64>], n: usize) -> Vec<Vec<C64>> {
    let mut out: Vec<Vec<C64>> = basis.to_vec();
    let mut used = vec![false; n];
    while out.len() < n {
        let mut best: Option<(usize, Vec<C64>, f64)> = None;
        for (i, _) in used.iter().enumerate().filter(|(_, &u)| !u) {
            let mut v = vec![ZERO; n];
            v[i] = C64::new(1.0, 0.0);
            // two passes of modified Gram-Schmidt
            for _ in 0..2 {
                for q in &out {
                    let p = dot(q, &v);
                    for (vk, qk) in v.iter_mut().zip(q) {
                        *vk -= p * qk;
                    }
                }
            }
            let r = norm(&v);
            if best.as_ref().is_none_or(|b| r > b.2 + 1e-12) {
                best = Some((i, v, r));
            }
        }
        let (i, v, r) = best.expect("candidate available while basis incomplete");
        used[i] = true;
        out.push(v.into_iter().map(|z| z / r).collect());
    }
    out
}

/// Eigen-decomposition of a Hermitian matrix: ascending eigenvalues and
/// the matching eigenvectors as columns.
pub fn hermitian_eigen(a: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let sym = (to_na(a) + to_na(&a.adjoint())) * C64::new(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..a.rows()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors =
        ComplexMatrix::from_fn(a.rows(), a.rows(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Principal square root of a positive semidefinite Hermitian matrix;
/// small negative eigenvalues are clamped to zero.
pub fn psd_sqrt(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (values, vectors) = hermitian_eigen(a)?;
    let roots: Vec<f64> = values.iter().map(|&l| l.max(0.0).sqrt()).collect();
    let d = ComplexMatrix::from_real_diag(&roots);
    Ok(&(&vectors * &d) * &vectors.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::matrix::ONE;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn trace_norm_examples() {
        assert!((trace_norm(&ComplexMatrix::identity(4)).unwrap() - 4.0).abs() < 1e-14);
        let d = ComplexMatrix::from_real_diag(&[1.0, 0.0, 0.0, -1.0]);
        assert!((trace_norm(&d).unwrap() - 2.0).abs() < 1e-14);
        assert!((trace_norm(&d.scale_real(0.3)).unwrap() - 0.6).abs() < 1e-14);
        assert!(matches!(
            trace_norm(&ComplexMatrix::zeros(2, 3)),
            Err(Error::NotSquare { rows: 2, cols: 3 })
        ));
    }

    #[test]
    fn rank_of_all_ones() {
        let ones = ComplexMatrix::from_fn(8, 8, |_, _| ONE);
        assert_eq!(numeric_rank(&ones, None), 1);
        assert_eq!(numeric_rank(&ComplexMatrix::identity(5), None), 5);
    }

    #[test]
    fn identity_system() {
        let sol = min_norm_solve(&ComplexMatrix::identity(3), &[ONE, c(0.0), c(0.0)]).unwrap();
        assert_eq!(sol.x.len(), 3);
        assert!((sol.x[0] - ONE).norm() < 1e-15);
        assert!(sol.x[1].norm() < 1e-15 && sol.x[2].norm() < 1e-15);
        assert!(sol.residual < 1e-15);
    }

    #[test]
    fn underdetermined_picks_min_norm() {
        // x + y = 2 -> (1, 1)
        let a = ComplexMatrix::from_real_rows(&[vec![1.0, 1.0]]).unwrap();
        let sol = min_norm_solve(&a, &[c(2.0)]).unwrap();
        assert!((sol.x[0] - c(1.0)).norm() < 1e-14);
        assert!((sol.x[1] - c(1.0)).norm() < 1e-14);
    }

    #[test]
    fn inconsistent_system_is_reported() {
        let a = ComplexMatrix::from_real_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let err = min_norm_solve(&a, &[c(1.0), c(2.0)]).unwrap_err();
        assert!(matches!(err, Error::RankDeficientInconsistent { .. }));
        assert!(min_norm_solve(&a, &[c(1.0)]).is_err());
    }

    #[test]
    fn completion_is_orthonormal() {
        let s = 0.5f64.sqrt();
        let basis = vec![vec![c(s), c(s), c(0.0)]];
        let full = complete_orthonormal(&basis, 3);
        assert_eq!(full.len(), 3);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot(&full[i], &full[j]) - c(expect)).norm() < 1e-14);
            }
        }
        let a = ComplexMatrix::from_real_rows(&[vec![1.0, 1.0, 0.0]]).unwrap();
        let ns = null_space(&a, None);
        assert_eq!(ns.len(), 2);
    }

    #[test]
    fn psd_sqrt_squares_back() {
        let a = ComplexMatrix::new(
            2,
            2,
            vec![c(2.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0), c(2.0)],
        )
        .unwrap();
        let r = psd_sqrt(&a).unwrap();
        assert!((&r * &r).max_abs_diff(&a) < 1e-12);
    }
}
