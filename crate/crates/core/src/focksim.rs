//! Brute-force oracle: qubits coupled to one truncated bosonic mode.
//!
//! Joint basis index is `a * cutoff + m` (system index `a` outer, photon
//! number `m` inner). The evolution is block diagonal over the eigenvalues
//! of the coupled system operator.

use serde::Serialize;

use crate::bath::Mode;
use crate::error::{Error, Result};
use crate::kraus::{collective_levels, KrausSet};
use crate::numerics::{
    complete_orthonormal, hermitian_eigen, min_norm_solve_with, null_space, trace_norm,
    ComplexMatrix, DensityMatrix, SolveOptions, C64, ZERO,
};

/// Default number of Fock-family operators kept in the basis solve.
pub const DEFAULT_CUTOFF_M: usize = 30;
/// Residual above which the measurement-basis solve is rejected.
pub const BASIS_RESIDUAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct FockConfig {
    cutoff: usize,
    mode: Mode,
    times: Vec<f64>,
}

impl FockConfig {
    pub fn new(cutoff: usize, mode: Mode, times: Vec<f64>) -> Result<Self> {
        if cutoff < 2 {
            return Err(Error::InvalidArgument(format!("cutoff {cutoff} < 2")));
        }
        if !(mode.omega.is_finite() && mode.g.is_finite() && mode.g >= 0.0) {
            return Err(Error::InvalidArgument(format!("bad mode {mode:?}")));
        }
        if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(Error::InvalidArgument(
                "times must be finite and >= 0".into(),
            ));
        }
        if times.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidArgument("times must be ascending".into()));
        }
        Ok(FockConfig {
            cutoff,
            mode,
            times,
        })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }
}

/// Diagonal coupled operator on the qubits (its eigenvalues in basis order).
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingSpec {
    n_qubits: usize,
    operator: Vec<f64>,
}

impl CouplingSpec {
    pub fn new(n_qubits: usize, operator: Vec<f64>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > 12 {
            return Err(Error::InvalidArgument(format!(
                "n_qubits {n_qubits} outside 1..=12"
            )));
        }
        if operator.len() != 1 << n_qubits {
            return Err(Error::DimensionMismatch {
                expected: format!("{} eigenvalues", 1usize << n_qubits),
                found: format!("{}", operator.len()),
            });
        }
        if operator.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidArgument(
                "coupling entries must be finite".into(),
            ));
        }
        if operator.iter().all(|&s| s == operator[0]) {
            return Err(Error::InvalidArgument(
                "coupling needs two distinct eigenvalues".into(),
            ));
        }
        Ok(CouplingSpec { n_qubits, operator })
    }

    /// Collective `S_z` of `n` qubits sharing the mode.
    pub fn common_bath(n: usize) -> Result<Self> {
        Self::new(n, collective_levels(n))
    }

    /// One qubit coupled through `σ_z`.
    pub fn single_qubit() -> Self {
        CouplingSpec {
            n_qubits: 1,
            operator: vec![1.0, -1.0],
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.operator.len()
    }

    pub fn operator(&self) -> &[f64] {
        &self.operator
    }

    fn max_level(&self) -> f64 {
        self.operator.iter().fold(0.0_f64, |m, s| m.max(s.abs()))
    }
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for k in 1..n {
        out[k] = out[k - 1] + (k as f64).ln();
    }
    out
}

fn check_cutoff(cfg: &FockConfig, coup: &CouplingSpec, t: f64) -> Result<C64> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "time {t} must be finite and >= 0"
        )));
    }
    let g = cfg.mode.displacement(t);
    let d = (coup.max_level() * g.norm()).powi(2);
    if d > cfg.cutoff as f64 / 4.0 {
        return Err(Error::CutoffTooSmall {
            cutoff: cfg.cutoff,
            displacement: d,
        });
    }
    Ok(g)
}

/// `e^{-iφ s²} exp(-i s G b†) exp(-i s G* b)` on the truncated mode.
fn block(s: f64, g: C64, phi: C64, lf: &[f64]) -> ComplexMatrix {
    let dim = lf.len();
    let up = C64::new(0.0, -s) * g;
    let down = C64::new(0.0, -s) * g.conj();
    // <m| exp(c b†) |n> = c^k sqrt(m!/n!) / k!, k = m - n
    let ladder = |c: C64, hi: usize, lo: usize| -> C64 {
        let k = hi - lo;
        if k == 0 {
            return C64::new(1.0, 0.0);
        }
        if c == ZERO {
            return ZERO;
        }
        c.powu(k as u32) * (0.5 * (lf[hi] - lf[lo]) - lf[k]).exp()
    };
    let e_plus = ComplexMatrix::from_fn(
        dim,
        dim,
        |m, n| if m >= n { ladder(up, m, n) } else { ZERO },
    );
    let e_minus = ComplexMatrix::from_fn(
        dim,
        dim,
        |n, m| if m >= n { ladder(down, m, n) } else { ZERO },
    );
    (&e_plus * &e_minus).scale((C64::new(0.0, -s * s) * phi).exp())
}

/// Distinct levels with their blocks, and each system index's block.
fn blocks(
    cfg: &FockConfig,
    coup: &CouplingSpec,
    t: f64,
) -> Result<(Vec<ComplexMatrix>, Vec<usize>)> {
    let g = check_cutoff(cfg, coup, t)?;
    let phi = cfg.mode.phase(t);
    let lf = ln_factorials(cfg.cutoff);
    let mut levels: Vec<f64> = Vec::new();
    let mut out = Vec::new();
    let mut index = Vec::with_capacity(coup.dim());
    for &s in &coup.operator {
        let k = match levels.iter().position(|&l| l == s) {
            Some(k) => k,
            None => {
                levels.push(s);
                out.push(block(s, g, phi, &lf));
                levels.len() - 1
            }
        };
        index.push(k);
    }
    Ok((out, index))
}

/// Full joint unitary (dimension `2^N · cutoff`).
pub fn total_unitary(cfg: &FockConfig, coup: &CouplingSpec, t: f64) -> Result<ComplexMatrix> {
    let (bl, index) = blocks(cfg, coup, t)?;
    let m = cfg.cutoff;
    let dim = coup.dim() * m;
    let mut u = ComplexMatrix::zeros(dim, dim);
    for (a, &k) in index.iter().enumerate() {
        for i in 0..m {
            for j in 0..m {
                u[(a * m + i, a * m + j)] = bl[k][(i, j)];
            }
        }
    }
    Ok(u)
}

/// Number of leading columns of [`total_unitary`] per block whose truncation
/// loss is negligible: photon number `n` with
/// `n + |sG|² + 7 |sG| sqrt(2n+1) + 7 <= cutoff`.
pub fn safe_columns(cfg: &FockConfig, coup: &CouplingSpec, t: f64) -> usize {
    let c = coup.max_level() * cfg.mode.displacement(t).norm();
    let m = cfg.cutoff as f64;
    (0..cfg.cutoff)
        .take_while(|&n| {
            let n = n as f64;
            n + c * c + 7.0 * c * (2.0 * n + 1.0).sqrt() + 7.0 <= m
        })
        .count()
}

/// `L′_m = <m| U |0>`, read from the joint evolution.
pub fn kraus_from_projection(
    cfg: &FockConfig,
    coup: &CouplingSpec,
    t: f64,
    m: usize,
) -> Result<ComplexMatrix> {
    if m >= cfg.cutoff {
        return Err(Error::InvalidArgument(format!(
            "photon number {m} not below cutoff {}",
            cfg.cutoff
        )));
    }
    Ok(fock_family(cfg, coup, t, m + 1)?
        .pop()
        .expect("family has m+1 entries"))
}

/// `L′_0 … L′_{count-1}`.
pub fn fock_family(
    cfg: &FockConfig,
    coup: &CouplingSpec,
    t: f64,
    count: usize,
) -> Result<Vec<ComplexMatrix>> {
    if count > cfg.cutoff {
        return Err(Error::InvalidArgument(format!(
            "{count} family members requested with cutoff {}",
            cfg.cutoff
        )));
    }
    let (bl, index) = blocks(cfg, coup, t)?;
    Ok((0..count)
        .map(|m| {
            let d: Vec<C64> = index.iter().map(|&k| bl[k][(m, 0)]).collect();
            ComplexMatrix::from_diag(&d)
        })
        .collect())
}

/// Closed form `diag_s e^{-iφ s²} (-i s G)^m / sqrt(m!)` with complex `φ`,
/// whose imaginary part already supplies the `e^{-|sG|²/2}` envelope.
pub fn analytic_fock_kraus(mode: &Mode, coup: &CouplingSpec, t: f64, m: usize) -> ComplexMatrix {
    let g = mode.displacement(t);
    let phi = mode.phase(t);
    let ln_fact: f64 = (1..=m).map(|k| (k as f64).ln()).sum();
    let d: Vec<C64> = coup
        .operator
        .iter()
        .map(|&s| {
            let c = C64::new(0.0, -s) * g;
            let power = if m == 0 {
                C64::new(1.0, 0.0)
            } else {
                c.powu(m as u32)
            };
            (C64::new(0.0, -s * s) * phi).exp() * power * (-0.5 * ln_fact).exp()
        })
        .collect();
    ComplexMatrix::from_diag(&d)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceNormRow {
    pub t: f64,
    pub m: usize,
    pub norm: f64,
}

/// `||L′_m(t)||_1` for every configured time and every `m < cutoff`.
pub fn trace_norm_table(cfg: &FockConfig, coup: &CouplingSpec) -> Result<Vec<TraceNormRow>> {
    let mut rows = Vec::with_capacity(cfg.times.len() * cfg.cutoff);
    for &t in &cfg.times {
        for (m, l) in fock_family(cfg, coup, t, cfg.cutoff)?.iter().enumerate() {
            rows.push(TraceNormRow {
                t,
                m,
                norm: trace_norm(l)?,
            });
        }
    }
    Ok(rows)
}

/// Outcome of the measurement-basis solve.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementBasis {
    /// `n_target × cutoff_m`; row `n` expands `K_n` over the Fock family.
    pub v: ComplexMatrix,
    /// Largest per-operator residual `|A v_n - k_n|`.
    pub residual: f64,
    /// `max |V V† - I|`.
    pub gram_deviation: f64,
    /// Orthonormal basis of the first `cutoff_m` Fock states; the first
    /// `n_target` vectors are `|ψ_n> = Σ_m V*_{n,m} |m>`.
    pub states: Vec<Vec<C64>>,
}

impl MeasurementBasis {
    pub fn n_target(&self) -> usize {
        self.v.rows()
    }
}

/// Expresses diagonal target Kraus operators as `K_n = Σ_m V_{n,m} L′_m`.
///
/// Each row is the minimum-norm solution plus a null-space component of the
/// family's diagonal system, chosen so that the rows come out orthonormal.
pub fn solve_measurement_basis(
    target: &KrausSet,
    family: &[ComplexMatrix],
    cutoff_m: usize,
) -> Result<MeasurementBasis> {
    if cutoff_m == 0 || family.len() < cutoff_m {
        return Err(Error::InvalidArgument(format!(
            "cutoff_m {cutoff_m} needs 1..={} family members",
            family.len()
        )));
    }
    let dim = target.dim();
    if let Some(bad) = family[..cutoff_m]
        .iter()
        .find(|l| l.rows() != dim || !l.is_square())
    {
        return Err(Error::DimensionMismatch {
            expected: format!("{dim}x{dim} family"),
            found: crate::error::dims(bad.rows(), bad.cols()),
        });
    }
    if target.ops().iter().any(|op| !op.matrix.is_diagonal(1e-12)) {
        return Err(Error::InvalidArgument(
            "target operators must be diagonal".into(),
        ));
    }
    let n_target = target.len();
    let a = ComplexMatrix::from_fn(dim, cutoff_m, |i, m| family[m][(i, i)]);

    let opts = SolveOptions {
        rank_tol: None,
        residual_tol: f64::INFINITY,
    };
    let mut x = ComplexMatrix::zeros(cutoff_m, n_target);
    let mut residual: f64 = 0.0;
    for (n, op) in target.ops().iter().enumerate() {
        let sol = min_norm_solve_with(&a, &op.matrix.diag(), opts)?;
        residual = residual.max(sol.residual);
        for (m, v) in sol.x.into_iter().enumerate() {
            x[(m, n)] = v;
        }
    }
    if residual > BASIS_RESIDUAL_TOL {
        return Err(Error::RankDeficientInconsistent {
            residual,
            tolerance: BASIS_RESIDUAL_TOL,
        });
    }

    // Rows of V = Xᵀ are orthonormal iff X†X = I. The min-norm part gives
    // X0†X0; the remainder I - X0†X0 = Y†Y is supplied from null(A).
    let deficit = &ComplexMatrix::identity(n_target) - &(&x.adjoint() * &x);
    let (values, vectors) = hermitian_eigen(&deficit)?;
    let null = null_space(&a, None);
    let mut chosen: Vec<Vec<C64>> = Vec::new();
    let mut spare = null.iter();
    for (k, &lambda) in values.iter().enumerate().rev() {
        if lambda <= 1e-10 {
            break;
        }
        // embed the eigenvector into C^cutoff_m and project onto null(A)
        let e: Vec<C64> = (0..cutoff_m)
            .map(|m| if m < n_target { vectors[(m, k)] } else { ZERO })
            .collect();
        let mut w = vec![ZERO; cutoff_m];
        for q in &null {
            let p: C64 = q.iter().zip(&e).map(|(a, b)| a.conj() * b).sum();
            for (wi, qi) in w.iter_mut().zip(q) {
                *wi += p * qi;
            }
        }
        let mut w = orthonormalize_against(w, &chosen);
        while w.is_none() {
            let Some(q) = spare.next() else { break };
            w = orthonormalize_against(q.clone(), &chosen);
        }
        let Some(w) = w else { break };
        let y = lambda.sqrt();
        for m in 0..cutoff_m {
            for n in 0..n_target {
                x[(m, n)] += w[m] * vectors[(n, k)].conj() * y;
            }
        }
        chosen.push(w);
    }

    let v = x.transpose();
    let gram_deviation = (&v * &v.adjoint()).max_abs_diff(&ComplexMatrix::identity(n_target));
    let rows: Vec<Vec<C64>> = (0..n_target.min(cutoff_m))
        .map(|n| v.row(n).iter().map(|z| z.conj()).collect())
        .collect();
    let states = if gram_deviation < 1e-6 {
        complete_orthonormal(&rows, cutoff_m)
    } else {
        rows
    };
    Ok(MeasurementBasis {
        v,
        residual,
        gram_deviation,
        states,
    })
}

fn orthonormalize_against(mut v: Vec<C64>, basis: &[Vec<C64>]) -> Option<Vec<C64>> {
    for _ in 0..2 {
        for q in basis {
            let p: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= p * qi;
            }
        }
    }
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    (n > 1e-6).then(|| v.into_iter().map(|z| z / n).collect())
}

/// `U (ρ ⊗ |0><0|) U†` on the joint space.
pub fn joint_state(
    cfg: &FockConfig,
    coup: &CouplingSpec,
    t: f64,
    rho: &DensityMatrix,
) -> Result<ComplexMatrix> {
    let ds = coup.dim();
    if rho.dim() != ds {
        return Err(Error::DimensionMismatch {
            expected: format!("{ds}-dimensional state"),
            found: format!("{}", rho.dim()),
        });
    }
    let u = total_unitary(cfg, coup, t)?;
    let m = cfg.cutoff;
    let dim = ds * m;
    // only the columns |a, 0> of U see the initial state
    let cols: Vec<Vec<C64>> = (0..ds)
        .map(|a| (0..dim).map(|i| u[(i, a * m)]).collect())
        .collect();
    let r = rho.matrix();
    let mut out = ComplexMatrix::zeros(dim, dim);
    for a in 0..ds {
        for b in 0..ds {
            let w = r[(a, b)];
            if w == ZERO {
                continue;
            }
            for (i, ui) in cols[a].iter().enumerate() {
                if *ui == ZERO {
                    continue;
                }
                let wi = w * ui;
                for (j, uj) in cols[b].iter().enumerate() {
                    out[(i, j)] += wi * uj.conj();
                }
            }
        }
    }
    Ok(out)
}

/// `tr_E[ρ (I ⊗ M)]` for a diagonal environment weight `M`.
pub fn trace_environment_weighted(
    joint: &ComplexMatrix,
    ds: usize,
    weight: &[f64],
) -> ComplexMatrix {
    let m = weight.len();
    ComplexMatrix::from_fn(ds, ds, |a, b| {
        (0..m)
            .filter(|&k| weight[k] != 0.0)
            .map(|k| joint[(a * m + k, b * m + k)] * weight[k])
            .sum()
    })
}

/// `tr_E` of a joint state.
pub fn trace_environment(joint: &ComplexMatrix, ds: usize, cutoff: usize) -> ComplexMatrix {
    trace_environment_weighted(joint, ds, &vec![1.0; cutoff])
}

/// `tr_S` of a joint state.
pub fn trace_system(joint: &ComplexMatrix, ds: usize, cutoff: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(cutoff, cutoff, |i, j| {
        (0..ds)
            .map(|a| joint[(a * cutoff + i, a * cutoff + j)])
            .sum()
    })
}

/// Qubit state after the joint evolution, environment traced out.
pub fn reduced_system_state(
    cfg: &FockConfig,
    coup: &CouplingSpec,
    t: f64,
    rho: &DensityMatrix,
) -> Result<ComplexMatrix> {
    Ok(trace_environment(
        &joint_state(cfg, coup, t, rho)?,
        coup.dim(),
        cfg.cutoff,
    ))
}

/// Mode state after the joint evolution, qubits traced out.
pub fn environment_state(
    cfg: &FockConfig,
    coup: &CouplingSpec,
    t: f64,
    rho: &DensityMatrix,
) -> Result<ComplexMatrix> {
    Ok(trace_system(
        &joint_state(cfg, coup, t, rho)?,
        coup.dim(),
        cfg.cutoff,
    ))
}

/// `<ψ_n| ρ_E |ψ_n>` for the solved basis, extended by `|m>` for
/// `m >= cutoff_m` so that the outcomes cover the whole truncated mode.
pub fn basis_outcome_probabilities(basis: &MeasurementBasis, env: &ComplexMatrix) -> Vec<f64> {
    let m_total = env.rows();
    let mut out: Vec<f64> = basis
        .states
        .iter()
        .map(|psi| {
            let mut p = ZERO;
            for (i, a) in psi.iter().enumerate().take(m_total) {
                for (j, b) in psi.iter().enumerate().take(m_total) {
                    p += a.conj() * env[(i, j)] * b;
                }
            }
            p.re
        })
        .collect();
    let used = basis.states.first().map_or(0, Vec::len);
    out.extend((used..m_total).map(|m| env[(m, m)].re));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParityVariant {
    /// Vacuum, odd, even.
    SplitVacuum,
    /// Odd, even (vacuum counted as even).
    TwoOutcome,
}

/// Diagonal parity projectors on the truncated mode, as 0/1 weights.
pub fn parity_projectors(cutoff: usize, variant: ParityVariant) -> Vec<(String, Vec<f64>)> {
    let pick = |f: &dyn Fn(usize) -> bool| -> Vec<f64> {
        (0..cutoff).map(|m| if f(m) { 1.0 } else { 0.0 }).collect()
    };
    let odd = ("odd".to_string(), pick(&|m| m % 2 == 1));
    match variant {
        ParityVariant::SplitVacuum => vec![
            ("vacuum".into(), pick(&|m| m == 0)),
            odd,
            ("even".into(), pick(&|m| m > 0 && m % 2 == 0)),
        ],
        ParityVariant::TwoOutcome => vec![odd, ("even".into(), pick(&|m| m % 2 == 0))],
    }
}

/// [`parity_projectors`] as matrices.
pub fn parity_measurement_operators(
    cutoff: usize,
    variant: ParityVariant,
) -> Vec<(String, ComplexMatrix)> {
    parity_projectors(cutoff, variant)
        .into_iter()
        .map(|(l, d)| (l, ComplexMatrix::from_real_diag(&d)))
        .collect()
}

/// Unnormalized conditional qubit states `tr_E[U ρ U† (I ⊗ M_i)]` with
/// their probabilities.
pub fn branch_states(
    cfg: &FockConfig,
    coup: &CouplingSpec,
    t: f64,
    rho: &DensityMatrix,
    variant: ParityVariant,
) -> Result<Vec<(String, f64, ComplexMatrix)>> {
    let joint = joint_state(cfg, coup, t, rho)?;
    Ok(parity_projectors(cfg.cutoff, variant)
        .into_iter()
        .map(|(label, w)| {
            let s = trace_environment_weighted(&joint, coup.dim(), &w);
            (label, s.trace().re, s)
        })
        .collect())
}
