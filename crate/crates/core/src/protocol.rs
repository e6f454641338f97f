//! Environment measurement followed by outcome-conditioned unitary restoration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bath::BathSpec;
use crate::error::{Error, Result};
use crate::kraus::{
    build_common_nonru, build_common_ru, build_individual_tensor, build_schur_matrix,
    build_single_qubit_parity, collective_phase, common_sign_patterns, ru_sign_basis,
    search_phase_ru, solve_ru_weights, KrausSet, SearchOptions, SignBasis,
};
use crate::numerics::{fidelity, fidelity_mixed, ComplexMatrix, DensityMatrix, PureState};

/// Branches below this probability have no well-defined post state.
pub const NEGLIGIBLE_PROBABILITY: f64 = 1e-14;
/// Minimum branch fidelity counted as a successful restoration.
pub const SUCCESS_TOL: f64 = 1e-9;
/// Residual accepted from the phase search fallback.
pub const SEARCH_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    CommonBath,
    IndividualBaths,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "nonRU_parity")]
    NonRuParity,
    #[serde(rename = "RU_basis")]
    RuBasis,
    #[serde(rename = "tensor_parity")]
    TensorParity,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::NonRuParity => "nonRU_parity",
            Scheme::RuBasis => "RU_basis",
            Scheme::TensorParity => "tensor_parity",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl InitialState {
    pub fn dim(&self) -> usize {
        match self {
            InitialState::Pure(p) => p.dim(),
            InitialState::Mixed(r) => r.dim(),
        }
    }

    pub fn density(&self) -> DensityMatrix {
        match self {
            InitialState::Pure(p) => p.to_density(),
            InitialState::Mixed(r) => r.clone(),
        }
    }

    fn fidelity_with(&self, state: &DensityMatrix) -> Result<f64> {
        match self {
            InitialState::Pure(p) => fidelity(p, state),
            InitialState::Mixed(r) => fidelity_mixed(r, state),
        }
    }
}

/// One shared bath, or one bath per qubit.
#[derive(Debug, Clone, PartialEq)]
pub enum BathModel {
    Shared(BathSpec),
    PerQubit(Vec<BathSpec>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    model: Model,
    n_qubits: usize,
    scheme: Scheme,
    initial_state: InitialState,
    bath: BathModel,
    t: f64,
}

impl Scenario {
    pub fn new(
        model: Model,
        n_qubits: usize,
        scheme: Scheme,
        initial_state: InitialState,
        bath: BathModel,
        t: f64,
    ) -> Result<Self> {
        if n_qubits == 0 || n_qubits > 10 {
            return Err(Error::InvalidArgument(format!(
                "n_qubits {n_qubits} outside 1..=10"
            )));
        }
        if !t.is_finite() || t < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "time {t} must be finite and >= 0"
            )));
        }
        let compatible = matches!(
            (model, scheme),
            (Model::CommonBath, Scheme::NonRuParity)
                | (Model::CommonBath, Scheme::RuBasis)
                | (Model::IndividualBaths, Scheme::TensorParity)
        );
        if !compatible {
            return Err(Error::InvalidArgument(format!(
                "scheme {} does not apply to model {model:?}",
                scheme.name()
            )));
        }
        match (&bath, model) {
            (BathModel::PerQubit(_), Model::CommonBath) => {
                return Err(Error::InvalidArgument(
                    "common bath takes a single spec".into(),
                ))
            }
            (BathModel::PerQubit(list), _) if list.len() != n_qubits => {
                return Err(Error::DimensionMismatch {
                    expected: format!("{n_qubits} per-qubit baths"),
                    found: format!("{}", list.len()),
                })
            }
            _ => {}
        }
        if initial_state.dim() != 1 << n_qubits {
            return Err(Error::DimensionMismatch {
                expected: format!("{}-dimensional state", 1usize << n_qubits),
                found: format!("{}", initial_state.dim()),
            });
        }
        Ok(Scenario {
            model,
            n_qubits,
            scheme,
            initial_state,
            bath,
            t,
        })
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn initial_state(&self) -> &InitialState {
        &self.initial_state
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    fn bath_for(&self, qubit: usize) -> &BathSpec {
        match &self.bath {
            BathModel::Shared(b) => b,
            BathModel::PerQubit(list) => &list[qubit],
        }
    }
}

/// Branch operators of the scheme together with how to undo each branch.
#[derive(Debug, Clone, PartialEq)]
pub struct RestorationPlan {
    /// Outcome-independent unitary applied before the outcome unitary.
    pub frame: Option<ComplexMatrix>,
    pub outcomes: Vec<(String, ComplexMatrix)>,
}

impl RestorationPlan {
    /// `R_i F` for outcome `i`.
    pub fn combined(&self, i: usize) -> ComplexMatrix {
        let r = &self.outcomes[i].1;
        match &self.frame {
            Some(f) => r * f,
            None => r.clone(),
        }
    }
}

/// Measurement branches and their restorations.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeSetup {
    pub branches: KrausSet,
    pub plan: RestorationPlan,
    /// Set when the RU weights came from the phase search.
    pub search_residual: Option<f64>,
}

fn sign_diag(signs: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_real_diag(signs)
}

/// Builds the branch operators and restoration plan for a scenario.
pub fn scheme_setup(scenario: &Scenario) -> Result<SchemeSetup> {
    let n = scenario.n_qubits;
    let t = scenario.t;
    match scenario.scheme {
        Scheme::NonRuParity => {
            if n != 2 {
                return Err(Error::SchemeUnavailable(format!(
                    "nonRU_parity is defined for two qubits, got {n}"
                )));
            }
            let branches = build_common_nonru(&scenario.bath_for(0).coefficients(t));
            let plan = RestorationPlan {
                frame: None,
                outcomes: vec![
                    ("vacuum".into(), ComplexMatrix::identity(4)),
                    ("odd".into(), sign_diag(&[1.0, 1.0, 1.0, -1.0])),
                    ("even".into(), ComplexMatrix::identity(4)),
                ],
            };
            Ok(SchemeSetup {
                branches,
                plan,
                search_residual: None,
            })
        }
        Scheme::RuBasis => ru_basis_setup(scenario),
        Scheme::TensorParity => {
            let per: Vec<KrausSet> = (0..n)
                .map(|q| build_single_qubit_parity(scenario.bath_for(q), t))
                .collect();
            let branches = build_individual_tensor(&per)?;
            let outcomes = branches
                .labels()
                .map(|label| {
                    let u = label
                        .split('_')
                        .map(|p| match p {
                            "odd" => sign_diag(&[1.0, -1.0]),
                            _ => ComplexMatrix::identity(2),
                        })
                        .reduce(|a, b| a.kron(&b))
                        .expect("at least one qubit");
                    (label.to_string(), u)
                })
                .collect();
            Ok(SchemeSetup {
                branches,
                plan: RestorationPlan {
                    frame: None,
                    outcomes,
                },
                search_residual: None,
            })
        }
    }
}

fn ru_basis_setup(scenario: &Scenario) -> Result<SchemeSetup> {
    let n = scenario.n_qubits;
    let coeffs = scenario.bath_for(0).coefficients(scenario.t);
    let phase = collective_phase(n, &coeffs);
    let frame = Some(phase.adjoint());

    // sign mixture with its ±1 patterns (kept even for zero-weight ops)
    let signs: Result<(KrausSet, Vec<ComplexMatrix>)> = if n == 2 {
        build_common_ru(&coeffs).map(|ru| {
            let b = common_sign_patterns()
                .iter()
                .map(|d| sign_diag(d))
                .collect();
            (ru.mixture, b)
        })
    } else {
        ru_sign_basis(n).and_then(|basis| {
            let schur = build_schur_matrix(n, coeffs.gamma)?;
            let b = (0..basis.len()).map(|i| basis.operator(i)).collect();
            Ok((solve_ru_weights(&basis, &schur)?, b))
        })
    };
    match signs {
        Ok((mixture, patterns)) => {
            // K_i = P sqrt(x_i) B_i, undone by P† then B_i
            let outcomes = mixture.labels().map(String::from).zip(patterns).collect();
            Ok(SchemeSetup {
                branches: mixture.premultiply(&phase)?,
                plan: RestorationPlan { frame, outcomes },
                search_residual: None,
            })
        }
        Err(Error::InfeasibleWeights { weights }) => {
            let schur = build_schur_matrix(n, coeffs.gamma)?;
            let n_ops = SignBasis::required_len(n);
            let sol = search_phase_ru(&schur, n_ops, SEARCH_TOL, SearchOptions::default())
                .map_err(|e| {
                    Error::SchemeUnavailable(format!(
                        "sign weights infeasible ({weights:?}) and phase search failed: {e}"
                    ))
                })?;
            let outcomes = (0..sol.set.len())
                .map(|i| {
                    let u = sol
                        .set
                        .unitary_part(i)
                        .map_or_else(|| ComplexMatrix::identity(1 << n), |u| u.adjoint());
                    (sol.set.ops()[i].label.clone(), u)
                })
                .collect();
            Ok(SchemeSetup {
                branches: sol.set.premultiply(&phase)?,
                plan: RestorationPlan { frame, outcomes },
                search_residual: Some(sol.residual),
            })
        }
        Err(e) => Err(e),
    }
}

pub fn restoration_plan(scenario: &Scenario) -> Result<RestorationPlan> {
    Ok(scheme_setup(scenario)?.plan)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchReport {
    pub label: String,
    pub probability: f64,
    /// `None` for negligible branches.
    pub post_state: Option<DensityMatrix>,
    pub restored_state: Option<DensityMatrix>,
    pub fidelity: Option<f64>,
}

impl BranchReport {
    pub fn is_negligible(&self) -> bool {
        self.post_state.is_none()
    }
}

pub fn enumerate_branches(scenario: &Scenario) -> Result<Vec<BranchReport>> {
    let setup = scheme_setup(scenario)?;
    branches_from_setup(scenario, &setup)
}

fn branches_from_setup(scenario: &Scenario, setup: &SchemeSetup) -> Result<Vec<BranchReport>> {
    let rho = scenario.initial_state.density();
    let mut out = Vec::with_capacity(setup.branches.len());
    for (i, op) in setup.branches.ops().iter().enumerate() {
        let unnorm = op.matrix.sandwich(rho.matrix())?;
        let p = unnorm.trace().re;
        if p < NEGLIGIBLE_PROBABILITY {
            out.push(BranchReport {
                label: op.label.clone(),
                probability: p,
                post_state: None,
                restored_state: None,
                fidelity: None,
            });
            continue;
        }
        let post = unnorm.scale_real(1.0 / p);
        let restored = setup.plan.combined(i).sandwich(&post)?;
        let restored = DensityMatrix::from_matrix_unchecked(restored);
        let f = scenario.initial_state.fidelity_with(&restored)?;
        out.push(BranchReport {
            label: op.label.clone(),
            probability: p,
            post_state: Some(DensityMatrix::from_matrix_unchecked(post)),
            restored_state: Some(restored),
            fidelity: Some(f),
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolSummary {
    pub branches: Vec<BranchReport>,
    pub probability_sum: f64,
    /// `Σ p_i F_i` over non-negligible branches, renormalized by their mass.
    pub average_fidelity: f64,
    pub min_fidelity: f64,
    pub success: bool,
    pub search_residual: Option<f64>,
}

pub fn run_protocol(scenario: &Scenario) -> Result<ProtocolSummary> {
    let setup = scheme_setup(scenario)?;
    let branches = branches_from_setup(scenario, &setup)?;
    let probability_sum = branches.iter().map(|b| b.probability).sum();
    let (mut mass, mut acc, mut min) = (0.0, 0.0, f64::INFINITY);
    for b in &branches {
        if let Some(f) = b.fidelity {
            mass += b.probability;
            acc += b.probability * f;
            min = min.min(f);
        }
    }
    Ok(ProtocolSummary {
        probability_sum,
        average_fidelity: acc / mass,
        min_fidelity: min,
        success: min >= 1.0 - SUCCESS_TOL,
        search_residual: setup.search_residual,
        branches,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledOutcome {
    pub label: String,
    pub count: u64,
    pub frequency: f64,
    pub probability: f64,
    /// `sqrt(p (1 - p) / shots)` from the exact probability.
    pub standard_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleReport {
    pub seed: u64,
    pub shots: u64,
    pub outcomes: Vec<SampledOutcome>,
    pub mean_fidelity: f64,
}

/// Draws `shots` outcomes from the exact branch distribution.
pub fn sample_run(scenario: &Scenario, seed: u64, shots: u64) -> Result<SampleReport> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be >= 1".into()));
    }
    let branches = enumerate_branches(scenario)?;
    let probs: Vec<f64> = branches.iter().map(|b| b.probability.max(0.0)).collect();
    let total: f64 = probs.iter().sum();
    let mut cdf = Vec::with_capacity(probs.len());
    let mut run = 0.0;
    for p in &probs {
        run += p / total;
        cdf.push(run);
    }
    let last_support = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; branches.len()];
    let mut fid_sum = 0.0;
    for _ in 0..shots {
        let u: f64 = rng.random();
        let k = cdf
            .iter()
            .position(|&c| u < c && c > 0.0)
            .unwrap_or(last_support);
        let k = if probs[k] > 0.0 { k } else { last_support };
        counts[k] += 1;
        fid_sum += branches[k].fidelity.unwrap_or(0.0);
    }
    let n = shots as f64;
    let outcomes = branches
        .iter()
        .zip(&counts)
        .map(|(b, &c)| {
            let p = b.probability.max(0.0);
            SampledOutcome {
                label: b.label.clone(),
                count: c,
                frequency: c as f64 / n,
                probability: b.probability,
                standard_error: (p * (1.0 - p).max(0.0) / n).sqrt(),
            }
        })
        .collect();
    Ok(SampleReport {
        seed,
        shots,
        outcomes,
        mean_fidelity: fid_sum / n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::Mode;
    use crate::numerics::C64;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn spec() -> BathSpec {
        BathSpec::new(vec![Mode::new(0.8, 0.6), Mode::new(1.9, 0.3)]).unwrap()
    }

    fn phi(alpha: f64) -> PureState {
        let b = (1.0 - alpha * alpha).sqrt();
        PureState::new(vec![c(alpha), c(0.0), c(0.0), c(b)]).unwrap()
    }

    fn common(scheme: Scheme, state: PureState, t: f64) -> Scenario {
        let n = state.dim().trailing_zeros() as usize;
        Scenario::new(
            Model::CommonBath,
            n,
            scheme,
            InitialState::Pure(state),
            BathModel::Shared(spec()),
            t,
        )
        .unwrap()
    }

    #[test]
    fn scenario_validation() {
        let s = InitialState::Pure(phi(0.6));
        let bath = BathModel::Shared(spec());
        assert!(Scenario::new(
            Model::CommonBath,
            2,
            Scheme::TensorParity,
            s.clone(),
            bath.clone(),
            1.0
        )
        .is_err());
        assert!(Scenario::new(
            Model::IndividualBaths,
            2,
            Scheme::RuBasis,
            s.clone(),
            bath.clone(),
            1.0
        )
        .is_err());
        assert!(Scenario::new(
            Model::CommonBath,
            3,
            Scheme::RuBasis,
            s.clone(),
            bath.clone(),
            1.0
        )
        .is_err());
        assert!(Scenario::new(
            Model::IndividualBaths,
            2,
            Scheme::TensorParity,
            s.clone(),
            BathModel::PerQubit(vec![spec()]),
            1.0
        )
        .is_err());
        assert!(Scenario::new(Model::CommonBath, 2, Scheme::NonRuParity, s, bath, -1.0).is_err());
    }

    #[test]
    fn nonru_plan() {
        let plan = restoration_plan(&common(Scheme::NonRuParity, phi(0.5), 1.0)).unwrap();
        assert!(plan.frame.is_none());
        assert_eq!(plan.outcomes[0].1, ComplexMatrix::identity(4));
        assert_eq!(
            plan.outcomes[1].1,
            ComplexMatrix::from_real_diag(&[1.0, 1.0, 1.0, -1.0])
        );
        assert_eq!(plan.outcomes[2].1, ComplexMatrix::identity(4));
    }

    #[test]
    fn tensor_single_qubit_odd_is_sigma_z() {
        let s = Scenario::new(
            Model::IndividualBaths,
            1,
            Scheme::TensorParity,
            InitialState::Pure(PureState::normalized(vec![c(1.0), c(1.0)]).unwrap()),
            BathModel::Shared(spec()),
            1.0,
        )
        .unwrap();
        let plan = restoration_plan(&s).unwrap();
        assert_eq!(plan.outcomes[0].0, "odd");
        assert_eq!(
            plan.outcomes[0].1,
            ComplexMatrix::from_real_diag(&[1.0, -1.0])
        );
        assert_eq!(plan.outcomes[1].1, ComplexMatrix::identity(2));
    }

    #[test]
    fn ru_basis_plan_uses_sign_involutions() {
        // pick t with γ ≈ 0.3
        let bath = BathSpec::single(1.0, 1.0).unwrap();
        let t = (1..400)
            .map(|k| k as f64 * 0.01)
            .min_by(|a, b| {
                let ga = (bath.coefficients(*a).gamma - 0.3).abs();
                let gb = (bath.coefficients(*b).gamma - 0.3).abs();
                ga.total_cmp(&gb)
            })
            .unwrap();
        assert!((bath.coefficients(t).gamma - 0.3).abs() < 0.01);
        let s = Scenario::new(
            Model::CommonBath,
            2,
            Scheme::RuBasis,
            InitialState::Pure(phi(0.3)),
            BathModel::Shared(bath),
            t,
        )
        .unwrap();
        let plan = restoration_plan(&s).unwrap();
        let patterns = crate::kraus::common_sign_patterns();
        for ((_, u), d) in plan.outcomes.iter().zip(patterns) {
            assert!(u.max_abs_diff(&ComplexMatrix::from_real_diag(&d)) < 1e-15);
            assert!((u * u).max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
        }
        assert!(run_protocol(&s).unwrap().success);
    }

    #[test]
    fn singlet_is_decoherence_free() {
        let psi = PureState::normalized(vec![c(0.0), c(1.0), c(-1.0), c(0.0)]).unwrap();
        let summary = run_protocol(&common(Scheme::NonRuParity, psi, 2.0)).unwrap();
        let live: Vec<_> = summary
            .branches
            .iter()
            .filter(|b| !b.is_negligible())
            .collect();
        assert_eq!(live.len(), 1);
        assert_eq!(live[0].label, "vacuum");
        assert!((live[0].probability - 1.0).abs() < 1e-12);
        assert!(summary.success);
    }

    #[test]
    fn phi_family_branch_probabilities() {
        let t = 1.7;
        let coeffs = spec().coefficients(t);
        for alpha in [0.1, 0.5, 0.9] {
            let summary = run_protocol(&common(Scheme::NonRuParity, phi(alpha), t)).unwrap();
            let expect = [
                coeffs.l1.norm_sqr(),
                coeffs.l2 * coeffs.l2,
                coeffs.l3 * coeffs.l3,
            ];
            for (b, p) in summary.branches.iter().zip(expect) {
                assert!((b.probability - p).abs() < 1e-12);
                assert!((b.fidelity.unwrap() - 1.0).abs() < 1e-12);
            }
            assert!((summary.probability_sum - 1.0).abs() < 1e-12);
            assert!(summary.success);
        }
    }

    #[test]
    fn witness_state_fails_nonru() {
        let psi = PureState::normalized(vec![c(1.0), c(1.0), c(0.0), c(0.0)]).unwrap();
        let summary = run_protocol(&common(Scheme::NonRuParity, psi, 2.0)).unwrap();
        let odd = &summary.branches[1];
        assert!((odd.fidelity.unwrap() - 0.5).abs() < 1e-12);
        let post = odd.post_state.as_ref().unwrap().matrix();
        assert!((post[(0, 0)] - c(1.0)).norm() < 1e-12);
        assert!(summary.average_fidelity < 1.0);
        assert!(!summary.success);
    }

    #[test]
    fn tensor_probabilities_factorize() {
        let baths = vec![
            BathSpec::single(0.7, 0.5).unwrap(),
            BathSpec::single(1.4, 0.9).unwrap(),
        ];
        let t = 1.3;
        let psi = PureState::normalized(vec![
            c(0.3),
            C64::new(0.1, 0.5),
            c(-0.4),
            C64::new(0.2, 0.2),
        ])
        .unwrap();
        let s = Scenario::new(
            Model::IndividualBaths,
            2,
            Scheme::TensorParity,
            InitialState::Pure(psi),
            BathModel::PerQubit(baths.clone()),
            t,
        )
        .unwrap();
        let summary = run_protocol(&s).unwrap();
        let (e1, o1) = baths[0].parity_weights(t);
        let (e2, o2) = baths[1].parity_weights(t);
        let expect = [o1 * o2, o1 * e2, e1 * o2, e1 * e2];
        for (b, p) in summary.branches.iter().zip(expect) {
            assert!((b.probability - p).abs() < 1e-12);
        }
        assert!(summary.success);
        let plan = restoration_plan(&s).unwrap();
        for (_, u) in &plan.outcomes {
            assert!((u * u).max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
        }
    }

    #[test]
    fn ru_basis_three_qubits() {
        let bath = BathSpec::single(1.0, 1.0).unwrap();
        let t = 3.0;
        assert!(bath.coefficients(t).gamma < 0.3);
        let amps = (0..8)
            .map(|k| C64::new(0.1 * k as f64 + 0.05, 0.3 - 0.07 * k as f64))
            .collect();
        let s = Scenario::new(
            Model::CommonBath,
            3,
            Scheme::RuBasis,
            InitialState::Pure(PureState::normalized(amps).unwrap()),
            BathModel::Shared(bath),
            t,
        )
        .unwrap();
        let summary = run_protocol(&s).unwrap();
        assert!(summary.search_residual.is_none());
        assert!((summary.probability_sum - 1.0).abs() < 1e-10);
        assert!(summary.success, "min fidelity {}", summary.min_fidelity);
    }

    #[test]
    fn ru_basis_falls_back_to_search() {
        // γ close to 1: sign weights infeasible
        let bath = BathSpec::single(1.0, 0.2).unwrap();
        let t = 1.0;
        assert!(bath.coefficients(t).gamma > 0.6);
        let psi = PureState::normalized(vec![c(0.5), C64::new(0.0, 0.5), c(0.5), c(-0.5)]).unwrap();
        let s = common(Scheme::RuBasis, psi, t);
        let s = Scenario {
            bath: BathModel::Shared(bath),
            ..s
        };
        let summary = run_protocol(&s).unwrap();
        assert!(summary.search_residual.unwrap() <= SEARCH_TOL);
        assert!(summary.success, "min fidelity {}", summary.min_fidelity);
    }

    #[test]
    fn mixed_state_uses_general_fidelity() {
        let rho = DensityMatrix::new(ComplexMatrix::from_real_diag(&[0.5, 0.0, 0.0, 0.5])).unwrap();
        let s = Scenario::new(
            Model::CommonBath,
            2,
            Scheme::NonRuParity,
            InitialState::Mixed(rho),
            BathModel::Shared(spec()),
            1.0,
        )
        .unwrap();
        let summary = run_protocol(&s).unwrap();
        assert!((summary.min_fidelity - 1.0).abs() < 1e-9);
    }

    #[test]
    fn sampling_is_seeded() {
        let s = common(Scheme::NonRuParity, phi(0.6), 1.5);
        let a = sample_run(&s, 42, 1000).unwrap();
        let b = sample_run(&s, 42, 1000).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.outcomes.iter().map(|o| o.count).sum::<u64>(), 1000);
        let one = sample_run(&s, 7, 1).unwrap();
        assert_eq!(one.outcomes.iter().filter(|o| o.count == 1).count(), 1);
        assert!(sample_run(&s, 7, 0).is_err());
    }
}
