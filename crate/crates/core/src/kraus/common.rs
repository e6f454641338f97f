//! Two qubits sharing one bath: the vacuum/odd/even triple and the
//! four-operator sign-pattern RU mixture.

use super::{KrausSet, FEASIBILITY_TOL};
use crate::bath::DephasingCoefficients;
use crate::error::{Error, Result};
use crate::numerics::{hamming_weight, min_norm_solve, ComplexMatrix, C64};

/// Eigenvalues of the collective `S_z = ½ Σ σ_z` on `n` qubits, in binary
/// counting order (`|0…0⟩` has `s = n/2`).
pub fn collective_levels(n: usize) -> Vec<f64> {
    (0..1usize << n)
        .map(|a| (n as f64 - 2.0 * hamming_weight(a) as f64) / 2.0)
        .collect()
}

/// Deterministic diagonal unitary `diag(e^{-i Re φ s_a²})` carrying the
/// phase of the common-bath channel; the remainder is a real Schur product.
pub fn collective_phase(n: usize, coeffs: &DephasingCoefficients) -> ComplexMatrix {
    let re_phi = coeffs.phi_total.re;
    let d: Vec<C64> = collective_levels(n)
        .into_iter()
        .map(|s| C64::from_polar(1.0, -re_phi * s * s))
        .collect();
    ComplexMatrix::from_diag(&d)
}

/// Vacuum, odd and even Kraus operators for two qubits in a common bath.
pub fn build_common_nonru(coeffs: &DephasingCoefficients) -> KrausSet {
    let one = C64::new(1.0, 0.0);
    let l1 = coeffs.l1;
    let vacuum = ComplexMatrix::from_diag(&[l1, one, one, l1]);
    let odd = ComplexMatrix::from_real_diag(&[1.0, 0.0, 0.0, -1.0]).scale_real(coeffs.l2);
    let even = ComplexMatrix::from_real_diag(&[1.0, 0.0, 0.0, 1.0]).scale_real(coeffs.l3);
    KrausSet::new(
        vec![
            ("vacuum".into(), vacuum),
            ("odd".into(), odd),
            ("even".into(), even),
        ],
        None,
    )
    .expect("fixed 4x4 operators")
}

/// Diagonals of the four RU sign patterns, in ansatz order.
pub fn common_sign_patterns() -> [[f64; 4]; 4] {
    [
        [1.0, 1.0, 1.0, 1.0],
        [-1.0, 1.0, 1.0, 1.0],
        [1.0, 1.0, 1.0, -1.0],
        [1.0, -1.0, -1.0, 1.0],
    ]
}

/// Solves the four weight constraints
/// `x1+x2+x3+x4 = 1, x2 = x3, x1 - x4 = γ, x1 - 2x2 + x4 = γ⁴`.
/// The solution is returned as is, negative entries included.
pub fn common_ru_weights(gamma: f64) -> Result<[f64; 4]> {
    let a = ComplexMatrix::from_real_rows(&[
        vec![1.0, 1.0, 1.0, 1.0],
        vec![0.0, 1.0, -1.0, 0.0],
        vec![1.0, 0.0, 0.0, -1.0],
        vec![1.0, -2.0, 0.0, 1.0],
    ])?;
    let rhs = [1.0, 0.0, gamma, gamma.powi(4)].map(|x| C64::new(x, 0.0));
    let sol = min_norm_solve(&a, &rhs)?;
    Ok([sol.x[0].re, sol.x[1].re, sol.x[2].re, sol.x[3].re])
}

/// Closed-form weights for the two-qubit ansatz, evaluated with
/// `l1 -> |l1|`. Kept as a regression reference only: at `t = 0` they give
/// `(3/4, 1/4, 1/4, -1/4)` rather than the identity channel.
pub fn closed_form_weights(coeffs: &DephasingCoefficients) -> [f64; 4] {
    let l1 = coeffs.gamma;
    let d = coeffs.l3 * coeffs.l3 - coeffs.l2 * coeffs.l2;
    let x1 = (1.0 + 2.0 * l1 + d) / 4.0;
    let x2 = (1.0 - d) / 4.0;
    let x4 = (1.0 - 2.0 * l1 + d) / 4.0;
    [x1, x2, x2, x4]
}

/// Sign-pattern RU mixture plus the diagonal phase that turns it into the
/// full common-bath channel.
#[derive(Debug, Clone, PartialEq)]
pub struct CommonRu {
    /// `K_j = sqrt(x_j) B_j` with real ±1 diagonals `B_j`.
    pub mixture: KrausSet,
    /// `diag(u, 1, 1, u)` with `u = l1 / |l1|`.
    pub phase: ComplexMatrix,
}

impl CommonRu {
    /// `P K_j` for every op; still RU since `P B_j` is unitary.
    pub fn composed(&self) -> KrausSet {
        self.mixture
            .premultiply(&self.phase)
            .expect("phase and mixture share dimension 4")
    }

    pub fn weights(&self) -> &[f64] {
        self.mixture.weights().expect("RU mixture carries weights")
    }
}

/// RU decomposition of the two-qubit common-bath channel.
///
/// Fails with [`Error::InfeasibleWeights`] when the solved weights leave the
/// simplex, which happens for `γ` above the real root of `γ³ + γ² + γ = 1`.
pub fn build_common_ru(coeffs: &DephasingCoefficients) -> Result<CommonRu> {
    let x = common_ru_weights(coeffs.gamma)?;
    if x.iter().any(|&w| w < -FEASIBILITY_TOL) {
        return Err(Error::InfeasibleWeights {
            weights: x.to_vec(),
        });
    }
    let items = common_sign_patterns()
        .iter()
        .zip(x)
        .enumerate()
        .map(|(j, (signs, w))| {
            (
                format!("K{}", j + 1),
                w,
                ComplexMatrix::from_real_diag(signs),
            )
        })
        .collect();
    Ok(CommonRu {
        mixture: KrausSet::from_weighted_unitaries(items)?,
        phase: collective_phase(2, coeffs),
    })
}
