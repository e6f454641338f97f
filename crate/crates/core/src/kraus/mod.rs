//! Kraus decompositions of dephasing channels and the tools to compare them.

mod common;
mod individual;
mod schur;
mod search;

pub use common::{
    build_common_nonru, build_common_ru, closed_form_weights, collective_levels, collective_phase,
    common_ru_weights, common_sign_patterns, CommonRu,
};
pub use individual::{build_individual_tensor, build_single_qubit_parity, ProductDephasing};
pub use schur::{
    build_schur_matrix, class_pairs, ru_sign_basis, ru_weights, solve_ru_weights, SchurMatrix,
    SignBasis,
};
pub use search::{search_phase_ru, PhaseRuSolution, SearchOptions};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, DensityMatrix, C64};

/// Weights below this are treated as absent when checking the RU form.
pub const NEGLIGIBLE_WEIGHT: f64 = 1e-14;
/// Solved weights below `-FEASIBILITY_TOL` make a decomposition infeasible.
pub const FEASIBILITY_TOL: f64 = 1e-12;

/// Anything that maps operators to operators linearly.
pub trait Channel {
    fn dim(&self) -> usize;
    fn apply_matrix(&self, x: &ComplexMatrix) -> Result<ComplexMatrix>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct KrausOp {
    pub label: String,
    pub matrix: ComplexMatrix,
}

/// Ordered, labeled Kraus operators with optional RU weights.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    dim: usize,
    ops: Vec<KrausOp>,
    weights: Option<Vec<f64>>,
}

impl KrausSet {
    pub fn new(ops: Vec<(String, ComplexMatrix)>, weights: Option<Vec<f64>>) -> Result<Self> {
        let dim = match ops.first() {
            Some((_, m)) => m.rows(),
            None => return Err(Error::InvalidArgument("empty Kraus set".into())),
        };
        for (label, m) in &ops {
            if !m.is_square() {
                return Err(Error::NotSquare {
                    rows: m.rows(),
                    cols: m.cols(),
                });
            }
            if m.rows() != dim {
                return Err(Error::DimensionMismatch {
                    expected: format!("dimension {dim}"),
                    found: format!("dimension {} for {label}", m.rows()),
                });
            }
        }
        if let Some(w) = &weights {
            if w.len() != ops.len() {
                return Err(Error::DimensionMismatch {
                    expected: format!("{} weights", ops.len()),
                    found: format!("{} weights", w.len()),
                });
            }
        }
        Ok(Self {
            dim,
            ops: ops
                .into_iter()
                .map(|(label, matrix)| KrausOp { label, matrix })
                .collect(),
            weights,
        })
    }

    /// RU-form set `K_i = sqrt(w_i) U_i`. Weights within
    /// [`FEASIBILITY_TOL`] of zero are set to zero.
    pub fn from_weighted_unitaries(items: Vec<(String, f64, ComplexMatrix)>) -> Result<Self> {
        let mut ops = Vec::with_capacity(items.len());
        let mut weights = Vec::with_capacity(items.len());
        for (label, w, u) in items {
            if w < -FEASIBILITY_TOL {
                return Err(Error::InfeasibleWeights { weights: vec![w] });
            }
            // round-off around zero would otherwise become sqrt-sized noise
            let w = if w <= FEASIBILITY_TOL { 0.0 } else { w };
            ops.push((label, u.scale_real(w.sqrt())));
            weights.push(w);
        }
        Self::new(ops, Some(weights))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn ops(&self) -> &[KrausOp] {
        &self.ops
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.ops.iter().map(|op| op.label.as_str())
    }

    /// `max |Σ K†K - I|`.
    pub fn completeness_defect(&self) -> f64 {
        let mut sum = ComplexMatrix::zeros(self.dim, self.dim);
        for op in &self.ops {
            sum = &sum + &(&op.matrix.adjoint() * &op.matrix);
        }
        sum.max_abs_diff(&ComplexMatrix::identity(self.dim))
    }

    /// Largest unitarity defect of `K_i / sqrt(w_i)` over ops with
    /// non-negligible weight; `None` when the set carries no weights.
    pub fn ru_defect(&self) -> Option<f64> {
        let weights = self.weights.as_ref()?;
        let mut worst: f64 = 0.0;
        for (op, &w) in self.ops.iter().zip(weights) {
            if w < NEGLIGIBLE_WEIGHT {
                continue;
            }
            worst = worst.max(op.matrix.scale_real(1.0 / w.sqrt()).unitarity_defect());
        }
        let sum: f64 = weights.iter().sum();
        Some(worst.max((sum - 1.0).abs()))
    }

    /// Unit-modulus part `K_i / sqrt(w_i)` of an RU op.
    pub fn unitary_part(&self, i: usize) -> Option<ComplexMatrix> {
        let w = *self.weights.as_ref()?.get(i)?;
        if w < NEGLIGIBLE_WEIGHT {
            return None;
        }
        Some(self.ops[i].matrix.scale_real(1.0 / w.sqrt()))
    }

    /// Left-multiplies every op by `u`, keeping labels and weights.
    pub fn premultiply(&self, u: &ComplexMatrix) -> Result<Self> {
        let ops = self
            .ops
            .iter()
            .map(|op| Ok((op.label.clone(), u.matmul(&op.matrix)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(ops, self.weights.clone())
    }
}

impl Channel for KrausSet {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply_matrix(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        check_dim(self.dim, x)?;
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for op in &self.ops {
            out = &out + &op.matrix.sandwich(x)?;
        }
        Ok(out)
    }
}

/// `Σ_i w_i U_i X U_i†` with weights of any sign. Used to evaluate candidate
/// weight vectors that are not valid probability distributions.
#[derive(Debug, Clone)]
pub struct SignedMixture {
    pub weights: Vec<f64>,
    pub unitaries: Vec<ComplexMatrix>,
}

impl Channel for SignedMixture {
    fn dim(&self) -> usize {
        self.unitaries.first().map_or(0, ComplexMatrix::rows)
    }

    fn apply_matrix(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        check_dim(self.dim(), x)?;
        let mut out = ComplexMatrix::zeros(x.rows(), x.cols());
        for (w, u) in self.weights.iter().zip(&self.unitaries) {
            out = &out + &u.sandwich(x)?.scale_real(*w);
        }
        Ok(out)
    }
}

/// `P C(X) P†` for a fixed unitary `P`.
#[derive(Debug, Clone)]
pub struct Conjugated<'a, C: Channel> {
    pub unitary: ComplexMatrix,
    pub inner: &'a C,
}

impl<C: Channel> Channel for Conjugated<'_, C> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn apply_matrix(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.unitary.sandwich(&self.inner.apply_matrix(x)?)
    }
}

fn check_dim(dim: usize, x: &ComplexMatrix) -> Result<()> {
    if x.rows() != dim || x.cols() != dim {
        return Err(Error::DimensionMismatch {
            expected: format!("{dim}x{dim}"),
            found: format!("{}x{}", x.rows(), x.cols()),
        });
    }
    Ok(())
}

/// `Σ K ρ K†`.
pub fn apply_channel(set: &KrausSet, rho: &DensityMatrix) -> Result<DensityMatrix> {
    Ok(DensityMatrix::from_matrix_unchecked(
        set.apply_matrix(rho.matrix())?,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Equivalence {
    pub equal: bool,
    pub max_deviation: f64,
}

/// Compares two channels on every matrix unit `|i><j|`.
pub fn decomposition_equivalence(a: &dyn Channel, b: &dyn Channel, tol: f64) -> Equivalence {
    if a.dim() != b.dim() {
        return Equivalence {
            equal: false,
            max_deviation: f64::INFINITY,
        };
    }
    let d = a.dim();
    let mut worst: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let mut unit = ComplexMatrix::zeros(d, d);
            unit[(i, j)] = C64::new(1.0, 0.0);
            let dev = match (a.apply_matrix(&unit), b.apply_matrix(&unit)) {
                (Ok(x), Ok(y)) => x.max_abs_diff(&y),
                _ => f64::INFINITY,
            };
            worst = worst.max(dev);
        }
    }
    Equivalence {
        equal: worst <= tol,
        max_deviation: worst,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::PureState;

    #[test]
    fn identity_set_leaves_state_alone() {
        let set = KrausSet::new(vec![("id".into(), ComplexMatrix::identity(4))], None).unwrap();
        let psi = PureState::normalized(vec![
            C64::new(0.3, 0.1),
            C64::new(-0.2, 0.0),
            C64::new(0.0, 0.9),
            C64::new(0.4, -0.4),
        ])
        .unwrap();
        let rho = psi.to_density();
        let out = apply_channel(&set, &rho).unwrap();
        assert!(out.matrix().max_abs_diff(rho.matrix()) < 1e-15);
        assert!(matches!(
            apply_channel(&set, &DensityMatrix::maximally_mixed(2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn equivalence_of_set_with_itself() {
        let z = ComplexMatrix::from_real_diag(&[1.0, -1.0]);
        let set = KrausSet::from_weighted_unitaries(vec![
            ("a".into(), 0.25, ComplexMatrix::identity(2)),
            ("b".into(), 0.75, z),
        ])
        .unwrap();
        let eq = decomposition_equivalence(&set, &set, 1e-12);
        assert!(eq.equal);
        assert_eq!(eq.max_deviation, 0.0);
        assert!(set.completeness_defect() < 1e-15);
        assert!(set.ru_defect().unwrap() < 1e-15);
    }

    #[test]
    fn rejects_mixed_dimensions() {
        let r = KrausSet::new(
            vec![
                ("a".into(), ComplexMatrix::identity(2)),
                ("b".into(), ComplexMatrix::identity(3)),
            ],
            None,
        );
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
        assert!(KrausSet::new(vec![], None).is_err());
    }
}
