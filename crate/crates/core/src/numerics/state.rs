use super::linalg::{hermitian_eigen, psd_sqrt, trace_norm};
use super::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};
use rand_distr::StandardNormal;

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const EIGEN_TOL: f64 = 1e-10;
pub const NORM_TOL: f64 = 1e-12;

/// Normalized pure state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let n2: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if amplitudes.is_empty() || (n2 - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidArgument(format!(
                "state must be normalized (squared norm {n2})"
            )));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales any nonzero finite vector to unit norm.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let n = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidArgument(
                "cannot normalize a zero or non-finite vector".into(),
            ));
        }
        Ok(Self {
            amplitudes: amplitudes.into_iter().map(|z| z / n).collect(),
        })
    }

    /// Computational basis state `|index>` in dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim);
        let mut a = vec![C64::new(0.0, 0.0); dim];
        a[index] = C64::new(1.0, 0.0);
        Self { amplitudes: a }
    }

    /// Haar-random state: normalized vector of i.i.d. complex Gaussians.
    pub fn haar<R: rand::Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        assert!(dim > 0);
        loop {
            let a: Vec<C64> = (0..dim)
                .map(|_| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    C64::new(re, im)
                })
                .collect();
            if let Ok(s) = Self::normalized(a) {
                return s;
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn to_density(&self) -> DensityMatrix {
        let a = &self.amplitudes;
        DensityMatrix::from_matrix_unchecked(ComplexMatrix::from_fn(a.len(), a.len(), |i, j| {
            a[i] * a[j].conj()
        }))
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        let herm = matrix.hermiticity_defect();
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidArgument(format!(
                "density matrix not Hermitian ({herm:e})"
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidArgument(format!(
                "density matrix trace {tr} != 1"
            )));
        }
        let (eig, _) = hermitian_eigen(&matrix)?;
        if eig.first().is_some_and(|&l| l < -EIGEN_TOL) {
            return Err(Error::InvalidArgument(format!(
                "density matrix has negative eigenvalue {}",
                eig[0]
            )));
        }
        Ok(Self { matrix })
    }

    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }
}

/// `<psi| rho |psi>`.
pub fn fidelity(target: &PureState, state: &DensityMatrix) -> Result<f64> {
    if target.dim() != state.dim() {
        return Err(Error::DimensionMismatch {
            expected: format!("dimension {}", target.dim()),
            found: format!("dimension {}", state.dim()),
        });
    }
    let a = target.amplitudes();
    let m = state.matrix();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..a.len() {
        for j in 0..a.len() {
            acc += a[i].conj() * m[(i, j)] * a[j];
        }
    }
    Ok(acc.re)
}

/// Uhlmann fidelity `(tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`, used when the
/// reference state is mixed.
pub fn fidelity_mixed(reference: &DensityMatrix, state: &DensityMatrix) -> Result<f64> {
    if reference.dim() != state.dim() {
        return Err(Error::DimensionMismatch {
            expected: format!("dimension {}", reference.dim()),
            found: format!("dimension {}", state.dim()),
        });
    }
    let a = psd_sqrt(reference.matrix())?;
    let b = psd_sqrt(state.matrix())?;
    let tn = trace_norm(&(&a * &b))?;
    Ok(tn * tn)
}
