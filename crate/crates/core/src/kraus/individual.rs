use super::{Channel, KrausSet};
use crate::bath::BathSpec;
use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;

/// Independent dephasing of each qubit: `ρ_ab` is multiplied by the
/// coherence factor of every qubit on which `a` and `b` differ. The first
/// factor belongs to the most significant qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductDephasing {
    pub factors: Vec<f64>,
}

impl ProductDephasing {
    pub fn from_baths(baths: &[&BathSpec], t: f64) -> Self {
        ProductDephasing {
            factors: baths.iter().map(|b| b.coherence_factor(t, 1.0)).collect(),
        }
    }
}

impl Channel for ProductDephasing {
    fn dim(&self) -> usize {
        1 << self.factors.len()
    }

    fn apply_matrix(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let d = self.dim();
        if x.rows() != d || x.cols() != d {
            return Err(Error::DimensionMismatch {
                expected: format!("{d}x{d}"),
                found: crate::error::dims(x.rows(), x.cols()),
            });
        }
        let n = self.factors.len();
        Ok(ComplexMatrix::from_fn(d, d, |a, b| {
            let diff = a ^ b;
            let f: f64 = (0..n)
                .filter(|q| diff >> (n - 1 - q) & 1 == 1)
                .map(|q| self.factors[q])
                .product();
            x[(a, b)] * f
        }))
    }
}

/// Odd/even parity pair for one qubit coupled through `σ_z`:
/// `K_odd = sqrt(Σ_odd) σ_z`, `K_even = sqrt(Σ_even) I`.
pub fn build_single_qubit_parity(spec: &BathSpec, t: f64) -> KrausSet {
    let (even, odd) = spec.parity_weights(t);
    KrausSet::from_weighted_unitaries(vec![
        (
            "odd".into(),
            odd,
            ComplexMatrix::from_real_diag(&[1.0, -1.0]),
        ),
        ("even".into(), even, ComplexMatrix::identity(2)),
    ])
    .expect("parity weights are nonnegative")
}

/// All `∏ len` tensor products of per-qubit Kraus operators, first qubit as
/// the most significant factor. Labels join the factor labels with `_`;
/// weights multiply when every factor carries them.
pub fn build_individual_tensor(per_qubit: &[KrausSet]) -> Result<KrausSet> {
    let first = per_qubit
        .first()
        .ok_or_else(|| Error::InvalidArgument("need at least one qubit".into()))?;
    if let Some(bad) = per_qubit.iter().find(|s| s.dim() != 2) {
        return Err(Error::DimensionMismatch {
            expected: "single-qubit sets (dimension 2)".into(),
            found: format!("dimension {}", bad.dim()),
        });
    }
    let weighted = per_qubit.iter().all(|s| s.weights().is_some());

    let mut ops: Vec<(String, ComplexMatrix, f64)> = first
        .ops()
        .iter()
        .enumerate()
        .map(|(i, op)| {
            let w = first.weights().map_or(1.0, |w| w[i]);
            (op.label.clone(), op.matrix.clone(), w)
        })
        .collect();
    for set in &per_qubit[1..] {
        let mut next = Vec::with_capacity(ops.len() * set.len());
        for (label, m, w) in &ops {
            for (j, op) in set.ops().iter().enumerate() {
                let wj = set.weights().map_or(1.0, |ws| ws[j]);
                next.push((format!("{label}_{}", op.label), m.kron(&op.matrix), w * wj));
            }
        }
        ops = next;
    }
    let weights = weighted.then(|| ops.iter().map(|o| o.2).collect());
    KrausSet::new(ops.into_iter().map(|(l, m, _)| (l, m)).collect(), weights)
}
