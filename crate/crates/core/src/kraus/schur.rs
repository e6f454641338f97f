//! N-qubit common-bath dephasing as a Schur product, and its RU
//! decomposition over ±1 diagonal operators that are constant on
//! Hamming-weight classes.

use super::{Channel, KrausSet, FEASIBILITY_TOL};
use crate::error::{Error, Result};
use crate::numerics::{hamming_weight, min_norm_solve, numeric_rank, ComplexMatrix, C64};

const VERIFY_TOL: f64 = 1e-10;

/// `C(N)` with entries `γ^{(w(i) - w(j))²}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchurMatrix {
    n_qubits: usize,
    gamma: f64,
    matrix: ComplexMatrix,
}

impl SchurMatrix {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Coefficient between weight classes `w` and `w2`.
    pub fn class_coefficient(&self, w: usize, w2: usize) -> f64 {
        let d = w.abs_diff(w2) as i32;
        self.gamma.powi(d * d)
    }

    pub fn rank(&self) -> usize {
        numeric_rank(&self.matrix, None)
    }
}

impl Channel for SchurMatrix {
    fn dim(&self) -> usize {
        self.matrix.rows()
    }

    fn apply_matrix(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.matrix.schur(x)
    }
}

pub fn build_schur_matrix(n: usize, gamma: f64) -> Result<SchurMatrix> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one qubit".into()));
    }
    if n > 16 {
        return Err(Error::InvalidArgument(format!(
            "{n} qubits is beyond dense storage"
        )));
    }
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "gamma must lie in (0, 1], got {gamma}"
        )));
    }
    let dim = 1usize << n;
    let matrix = ComplexMatrix::from_fn(dim, dim, |i, j| {
        let d = hamming_weight(i).abs_diff(hamming_weight(j)) as i32;
        C64::new(gamma.powi(d * d), 0.0)
    });
    Ok(SchurMatrix {
        n_qubits: n,
        gamma,
        matrix,
    })
}

/// Weight-class pairs `(w, w')`, `w < w'`, ordered by separation and then
/// by `w`: `(0,1), (1,2), …, (0,2), (1,3), …, (0,n)`.
pub fn class_pairs(n: usize) -> Vec<(usize, usize)> {
    (1..=n)
        .flat_map(|d| (0..=n - d).map(move |w| (w, w + d)))
        .collect()
}

/// Class-sign vectors `s: {0..n} -> ±1`, one per RU operator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignBasis {
    n_qubits: usize,
    vectors: Vec<Vec<i8>>,
}

impl SignBasis {
    pub fn new(n_qubits: usize, vectors: Vec<Vec<i8>>) -> Result<Self> {
        if vectors
            .iter()
            .any(|v| v.len() != n_qubits + 1 || v.iter().any(|&s| s != 1 && s != -1))
        {
            return Err(Error::InvalidArgument(format!(
                "sign vectors must have {} entries of ±1",
                n_qubits + 1
            )));
        }
        Ok(Self { n_qubits, vectors })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn vectors(&self) -> &[Vec<i8>] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// `1 + n(n+1)/2`.
    pub fn required_len(n: usize) -> usize {
        1 + n * (n + 1) / 2
    }

    /// Diagonal of operator `i` over the `2^n` computational basis states.
    pub fn diagonal(&self, i: usize) -> Vec<f64> {
        (0..1usize << self.n_qubits)
            .map(|a| f64::from(self.vectors[i][hamming_weight(a)]))
            .collect()
    }

    pub fn operator(&self, i: usize) -> ComplexMatrix {
        ComplexMatrix::from_real_diag(&self.diagonal(i))
    }

    /// Rows: a trace row of ones, then `s_i(w) s_i(w')` for every class pair
    /// in [`class_pairs`] order. One column per sign vector.
    pub fn system_matrix(&self) -> Vec<Vec<i32>> {
        let mut rows = vec![vec![1; self.vectors.len()]];
        for (w, w2) in class_pairs(self.n_qubits) {
            rows.push(
                self.vectors
                    .iter()
                    .map(|s| i32::from(s[w]) * i32::from(s[w2]))
                    .collect(),
            );
        }
        rows
    }
}

fn flip_vector(n: usize, flipped: &[usize]) -> Vec<i8> {
    let mut v = vec![1i8; n + 1];
    for &w in flipped {
        v[w] = -1;
    }
    v
}

fn column(n: usize, s: &[i8]) -> Vec<f64> {
    std::iter::once(1.0)
        .chain(
            class_pairs(n)
                .into_iter()
                .map(|(w, w2)| f64::from(s[w] * s[w2])),
        )
        .collect()
}

/// Chooses `1 + n(n+1)/2` class-sign vectors with an invertible pair-product
/// system.
///
/// Candidates are tried in a fixed order: all-plus, single-class flips,
/// contiguous runs of flipped classes by length, then every remaining subset.
/// A candidate is kept when it raises the rank. For three qubits this yields
/// the all-plus operator, the four single flips and the flips of classes
/// {0,1} and {1,2}. A single qubit gets `(I, σ_z)`.
pub fn ru_sign_basis(n: usize) -> Result<SignBasis> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one qubit".into()));
    }
    if n == 1 {
        return SignBasis::new(1, vec![vec![1, 1], vec![1, -1]]);
    }
    let classes = n + 1;
    let target = SignBasis::required_len(n);

    let mut candidates: Vec<Vec<usize>> = vec![vec![]];
    for len in 1..classes {
        for start in 0..=classes - len {
            candidates.push((start..start + len).collect());
        }
    }
    for mask in 1u64..(1u64 << classes) - 1 {
        candidates.push((0..classes).filter(|w| mask >> w & 1 == 1).collect());
    }

    let mut chosen: Vec<Vec<i8>> = Vec::new();
    let mut ortho: Vec<Vec<f64>> = Vec::new();
    for flipped in candidates {
        let s = flip_vector(n, &flipped);
        let mut v = column(n, &s);
        let norm0 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        for _ in 0..2 {
            for q in &ortho {
                let p: f64 = q.iter().zip(&v).map(|(a, b)| a * b).sum();
                for (vk, qk) in v.iter_mut().zip(q) {
                    *vk -= p * qk;
                }
            }
        }
        let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if r > 1e-8 * norm0 {
            ortho.push(v.into_iter().map(|x| x / r).collect());
            chosen.push(s);
            if chosen.len() == target {
                return SignBasis::new(n, chosen);
            }
        }
    }
    Err(Error::BasisSearchFailed { n_qubits: n })
}

/// Solves the sign-basis weight system against `schur`, returning the raw
/// weight vector (entries may be negative).
pub fn ru_weights(basis: &SignBasis, schur: &SchurMatrix) -> Result<Vec<f64>> {
    let n = basis.n_qubits();
    if n != schur.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} qubits", schur.n_qubits()),
            found: format!("{n} qubits"),
        });
    }
    let rows: Vec<Vec<f64>> = basis
        .system_matrix()
        .into_iter()
        .map(|r| r.into_iter().map(f64::from).collect())
        .collect();
    let a = ComplexMatrix::from_real_rows(&rows)?;
    let expected = SignBasis::required_len(n);
    let rank = numeric_rank(&a, None);
    if basis.len() != expected || rank < expected {
        return Err(Error::SingularSystem { rank, expected });
    }
    let rhs: Vec<C64> = std::iter::once(1.0)
        .chain(
            class_pairs(n)
                .into_iter()
                .map(|(w, w2)| schur.class_coefficient(w, w2)),
        )
        .map(|x| C64::new(x, 0.0))
        .collect();
    let sol = min_norm_solve(&a, &rhs)?;
    let c: Vec<f64> = sol.x.iter().map(|z| z.re).collect();

    // Σ c_i B_i(a,a) B_i(b,b) must reproduce every Schur entry.
    let diags: Vec<Vec<f64>> = (0..basis.len()).map(|i| basis.diagonal(i)).collect();
    let dim = 1usize << n;
    let mut worst: f64 = 0.0;
    for x in 0..dim {
        for y in 0..dim {
            let v: f64 = c.iter().zip(&diags).map(|(ci, d)| ci * d[x] * d[y]).sum();
            worst = worst.max((v - schur.matrix()[(x, y)].re).abs());
        }
    }
    if worst > VERIFY_TOL {
        return Err(Error::VerificationFailed {
            max_deviation: worst,
        });
    }
    Ok(c)
}

/// RU Kraus set `K_i = sqrt(c_i) B_i` for the Schur channel.
pub fn solve_ru_weights(basis: &SignBasis, schur: &SchurMatrix) -> Result<KrausSet> {
    let c = ru_weights(basis, schur)?;
    if c.iter().any(|&x| x < -FEASIBILITY_TOL) {
        return Err(Error::InfeasibleWeights { weights: c });
    }
    KrausSet::from_weighted_unitaries(
        c.iter()
            .enumerate()
            .map(|(i, &w)| (format!("K{}", i + 1), w, basis.operator(i)))
            .collect(),
    )
}
