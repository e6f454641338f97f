//! Command implementations behind the `dephase` binary.
//!
//! Every command returns a JSON report, zero or more CSV tables and an exit
//! code; nothing here touches the filesystem except [`write_outputs`].

pub mod config;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::bath::DephasingCoefficients;
use crate::error::Error;
use crate::focksim::{
    basis_outcome_probabilities, environment_state, fock_family, reduced_system_state,
    solve_measurement_basis, trace_norm_table, CouplingSpec, FockConfig, BASIS_RESIDUAL_TOL,
};
use crate::kraus::{
    build_common_nonru, build_common_ru, build_individual_tensor, build_schur_matrix,
    build_single_qubit_parity, collective_phase, common_ru_weights, decomposition_equivalence,
    ru_sign_basis, ru_weights, solve_ru_weights, Channel, Conjugated, KrausSet, ProductDephasing,
    FEASIBILITY_TOL,
};
use crate::numerics::{ComplexMatrix, DensityMatrix, PureState};
use crate::protocol::{run_protocol, sample_run, InitialState, Model, Scenario};

pub use config::{ConfigError, RunConfig};

pub const FORMAT_VERSION: u32 = 1;

pub mod exit {
    pub const OK: i32 = 0;
    pub const OTHER: i32 = 1;
    pub const SCHEMA: i32 = 2;
    pub const INFEASIBLE: i32 = 3;
    pub const CUTOFF: i32 = 4;
    pub const BASIS_RESIDUAL: i32 = 5;
    pub const SCHEME_UNAVAILABLE: i32 = 6;
    pub const CHECK_FAILED: i32 = 7;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Coefficients,
    Decompose,
    Fock,
    Basis,
    Restore,
}

impl Command {
    pub const ALL: [Command; 5] = [
        Command::Coefficients,
        Command::Decompose,
        Command::Fock,
        Command::Basis,
        Command::Restore,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Coefficients => "coefficients",
            Command::Decompose => "decompose",
            Command::Fock => "fock",
            Command::Basis => "basis",
            Command::Restore => "restore",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command {s:?}"))
    }
}

/// CSV table with a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: &str, header: &[&'static str]) -> Self {
        Table {
            name: name.into(),
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    /// RFC 4180 text (CRLF line endings).
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub report: Value,
    pub tables: Vec<Table>,
    pub exit_code: i32,
}

impl CommandOutput {
    pub fn report_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.report).expect("json values serialize");
        s.push('\n');
        s
    }
}

/// Shortest round-trip decimal.
fn num(x: f64) -> String {
    // no negative zero in tables
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:?}")
}

fn matrix_json(m: &ComplexMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array(m.row(i).iter().map(|z| json!([z.re, z.im])).collect()))
            .collect(),
    )
}

fn ops_json(set: &KrausSet) -> Value {
    Value::Array(
        set.ops()
            .iter()
            .enumerate()
            .map(|(i, op)| {
                json!({
                    "label": op.label,
                    "weight": set.weights().map(|w| w[i]),
                    "matrix": matrix_json(&op.matrix),
                })
            })
            .collect(),
    )
}

/// Failure inside a command, with the exit code it maps to.
struct Failure {
    code: i32,
    kind: &'static str,
    message: String,
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure {
            code: exit::SCHEMA,
            kind: "ConfigError",
            message: e.0,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, kind) = match &e {
            Error::InfeasibleWeights { .. } => (exit::INFEASIBLE, "InfeasibleWeights"),
            Error::CutoffTooSmall { .. } => (exit::CUTOFF, "CutoffTooSmall"),
            Error::RankDeficientInconsistent { .. } => {
                (exit::BASIS_RESIDUAL, "RankDeficientInconsistent")
            }
            Error::SchemeUnavailable(_) => (exit::SCHEME_UNAVAILABLE, "SchemeUnavailable"),
            _ => (exit::OTHER, "Error"),
        };
        Failure {
            code,
            kind,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<(Value, Vec<Table>, bool), Failure>;

/// Runs `cmd`. `seed_override` replaces the config seed when given.
pub fn run_command(cmd: Command, cfg: &RunConfig, seed_override: Option<u64>) -> CommandOutput {
    let seed = seed_override.or(cfg.seed).unwrap_or(0);
    let result = match cmd {
        Command::Coefficients => cmd_coefficients(cfg),
        Command::Decompose => cmd_decompose(cfg),
        Command::Fock => cmd_fock(cfg, seed),
        Command::Basis => cmd_basis(cfg),
        Command::Restore => cmd_restore(cfg, seed),
    };
    finish(cmd, seed, result)
}

/// Output for a config that failed to parse.
pub fn config_failure(cmd: Command, err: &ConfigError) -> CommandOutput {
    finish(cmd, 0, Err(Failure::from(err.clone())))
}

fn finish(cmd: Command, seed: u64, result: Outcome) -> CommandOutput {
    match result {
        Ok((body, tables, passed)) => {
            let mut report = json!({
                "format_version": FORMAT_VERSION,
                "command": cmd.name(),
                "seed": seed,
                "checks_passed": passed,
            });
            if let (Value::Object(r), Value::Object(b)) = (&mut report, body) {
                r.extend(b);
            }
            let exit_code = match report.get("infeasible").and_then(Value::as_bool) {
                Some(true) => exit::INFEASIBLE,
                _ if passed => exit::OK,
                _ => exit::CHECK_FAILED,
            };
            CommandOutput {
                report,
                tables,
                exit_code,
            }
        }
        Err(f) => CommandOutput {
            report: json!({
                "format_version": FORMAT_VERSION,
                "command": cmd.name(),
                "error": {"kind": f.kind, "message": f.message},
            }),
            tables: Vec::new(),
            exit_code: f.code,
        },
    }
}

/// Writes `report.json` and every table as `<name>.csv` into `dir`.
pub fn write_outputs(dir: &Path, out: &CommandOutput) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for t in &out.tables {
        std::fs::write(dir.join(format!("{}.csv", t.name)), t.to_csv())?;
    }
    std::fs::write(dir.join("report.json"), out.report_text())
}

fn cmd_coefficients(cfg: &RunConfig) -> Outcome {
    let bath = cfg.shared_bath()?;
    let times = cfg.require_times()?;
    let mut table = Table::new(
        "coefficients",
        &["t", "re_l1", "im_l1", "l2", "l3", "gamma", "completeness"],
    );
    let (mut worst_sum, mut worst_cross) = (0.0_f64, 0.0_f64);
    for &t in times {
        let c = bath.coefficients(t);
        let sum = c.l1.norm_sqr() + c.l2 * c.l2 + c.l3 * c.l3;
        worst_sum = worst_sum.max((sum - 1.0).abs());
        worst_cross = worst_cross.max(c.cross_family_defect().abs());
        table.rows.push(
            [t, c.l1.re, c.l1.im, c.l2, c.l3, c.gamma, sum]
                .into_iter()
                .map(num)
                .collect(),
        );
    }
    let tol = cfg.tolerances.algebraic;
    let passed = worst_sum <= tol && worst_cross <= tol;
    Ok((
        json!({
            "rows": times.len(),
            "max_completeness_defect": worst_sum,
            "max_cross_family_defect": worst_cross,
        }),
        vec![table],
        passed,
    ))
}

/// Coefficient points to decompose: explicit gammas or the bath on `times`.
fn decompose_points(cfg: &RunConfig) -> Result<Vec<(Value, DephasingCoefficients)>, Failure> {
    if let Some(gammas) = &cfg.gammas {
        return gammas
            .iter()
            .map(|&g| {
                Ok((
                    json!({"gamma": g}),
                    DephasingCoefficients::from_gamma(g, 0.0)?,
                ))
            })
            .collect();
    }
    let bath = cfg.shared_bath()?;
    Ok(cfg
        .require_times()?
        .iter()
        .map(|&t| (json!({"t": t}), bath.coefficients(t)))
        .collect())
}

fn common_system_rows() -> Vec<Vec<i32>> {
    vec![
        vec![1, 1, 1, 1],
        vec![0, 1, -1, 0],
        vec![1, 0, 0, -1],
        vec![1, -2, 0, 1],
    ]
}

fn cmd_decompose(cfg: &RunConfig) -> Outcome {
    let n = cfg.n_qubits;
    let tol = cfg.tolerances.algebraic;
    let mut table = Table::new("weights", &["point", "t", "gamma", "label", "weight"]);
    let mut points = Vec::new();
    let mut any_infeasible = false;
    let mut passed = true;

    if cfg.model == Model::IndividualBaths {
        let baths = match cfg.bath_model()? {
            crate::protocol::BathModel::Shared(b) => vec![b; n],
            crate::protocol::BathModel::PerQubit(l) => l,
        };
        let refs: Vec<_> = baths.iter().collect();
        for (p, &t) in cfg.require_times()?.iter().enumerate() {
            let sets: Vec<_> = baths
                .iter()
                .map(|b| build_single_qubit_parity(b, t))
                .collect();
            let set = build_individual_tensor(&sets)?;
            let eq = decomposition_equivalence(&set, &ProductDephasing::from_baths(&refs, t), tol);
            let completeness = set.completeness_defect();
            passed &= eq.equal && completeness <= tol;
            for (i, op) in set.ops().iter().enumerate() {
                let w = set.weights().expect("parity sets carry weights")[i];
                table.rows.push(vec![
                    p.to_string(),
                    num(t),
                    String::new(),
                    op.label.clone(),
                    num(w),
                ]);
            }
            points.push(json!({
                "t": t,
                "feasible": true,
                "ops": ops_json(&set),
                "equivalence_residual": eq.max_deviation,
                "completeness_defect": completeness,
            }));
        }
        return Ok((
            json!({"n_qubits": n, "model": "individual_baths", "points": points}),
            vec![table],
            passed,
        ));
    }

    let system_matrix = if n == 2 {
        common_system_rows()
    } else {
        ru_sign_basis(n)?.system_matrix()
    };
    for (p, (key, coeffs)) in decompose_points(cfg)?.into_iter().enumerate() {
        let t_text = key
            .get("t")
            .and_then(Value::as_f64)
            .map(num)
            .unwrap_or_default();
        let phase = collective_phase(n, &coeffs);
        let (raw, built, reference): (Vec<f64>, Option<KrausSet>, Box<dyn Channel>) = if n == 2 {
            let raw = common_ru_weights(coeffs.gamma)?.to_vec();
            let built = match build_common_ru(&coeffs) {
                Ok(ru) => Some(ru.composed()),
                Err(Error::InfeasibleWeights { .. }) => None,
                Err(e) => return Err(e.into()),
            };
            (raw, built, Box::new(build_common_nonru(&coeffs)))
        } else {
            let basis = ru_sign_basis(n)?;
            let schur = build_schur_matrix(n, coeffs.gamma)?;
            let raw = ru_weights(&basis, &schur)?;
            let built = match solve_ru_weights(&basis, &schur) {
                Ok(set) => Some(set.premultiply(&phase)?),
                Err(Error::InfeasibleWeights { .. }) => None,
                Err(e) => return Err(e.into()),
            };
            let reference = Conjugated {
                unitary: phase.clone(),
                inner: &schur,
            };
            // materialize the reference so it outlives `schur`
            let d = 1usize << n;
            let mut images = Vec::with_capacity(d * d);
            for i in 0..d {
                for j in 0..d {
                    let mut unit = ComplexMatrix::zeros(d, d);
                    unit[(i, j)] = crate::numerics::ONE;
                    images.push(reference.apply_matrix(&unit)?);
                }
            }
            (raw, built, Box::new(Tabulated { dim: d, images }))
        };
        let feasible = raw.iter().all(|&w| w >= -FEASIBILITY_TOL);
        any_infeasible |= !feasible;
        let mut point = key;
        let obj = point.as_object_mut().expect("point key is an object");
        obj.insert("gamma".into(), json!(coeffs.gamma));
        obj.insert("feasible".into(), json!(feasible));
        obj.insert("weights".into(), json!(raw));
        match &built {
            Some(set) => {
                let eq = decomposition_equivalence(set, reference.as_ref(), tol);
                let completeness = set.completeness_defect();
                passed &= eq.equal && completeness <= tol;
                obj.insert("ops".into(), ops_json(set));
                obj.insert("equivalence_residual".into(), json!(eq.max_deviation));
                obj.insert("completeness_defect".into(), json!(completeness));
                for (i, op) in set.ops().iter().enumerate() {
                    let w = set.weights().map_or(f64::NAN, |w| w[i]);
                    table.rows.push(vec![
                        p.to_string(),
                        t_text.clone(),
                        num(coeffs.gamma),
                        op.label.clone(),
                        num(w),
                    ]);
                }
            }
            None => {
                for (i, w) in raw.iter().enumerate() {
                    table.rows.push(vec![
                        p.to_string(),
                        t_text.clone(),
                        num(coeffs.gamma),
                        format!("K{}", i + 1),
                        num(*w),
                    ]);
                }
            }
        }
        points.push(point);
    }
    Ok((
        json!({
            "n_qubits": n,
            "model": "common_bath",
            "system_matrix": system_matrix,
            "infeasible": any_infeasible,
            "points": points,
        }),
        vec![table],
        passed && !any_infeasible,
    ))
}

/// Channel stored as its images of the matrix units.
struct Tabulated {
    dim: usize,
    images: Vec<ComplexMatrix>,
}

impl Channel for Tabulated {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply_matrix(&self, x: &ComplexMatrix) -> crate::Result<ComplexMatrix> {
        let d = self.dim;
        let mut out = ComplexMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                let c = x[(i, j)];
                if c != crate::numerics::ZERO {
                    out = &out + &self.images[i * d + j].scale(c);
                }
            }
        }
        Ok(out)
    }
}

/// Single mode and coupling for the Fock-space commands.
fn fock_setup(cfg: &RunConfig) -> Result<(FockConfig, CouplingSpec), Failure> {
    let bath = cfg.shared_bath()?;
    let [mode] = bath.modes() else {
        return Err(ConfigError("the Fock-space oracle takes a single-mode bath".into()).into());
    };
    let coup = match cfg.model {
        Model::CommonBath => CouplingSpec::common_bath(cfg.n_qubits)?,
        Model::IndividualBaths if cfg.n_qubits == 1 => CouplingSpec::single_qubit(),
        Model::IndividualBaths => {
            return Err(ConfigError("individual_baths Fock runs take n_qubits = 1".into()).into())
        }
    };
    Ok((
        FockConfig::new(cfg.cutoff, *mode, cfg.require_times()?.to_vec())?,
        coup,
    ))
}

/// Analytic channel the oracle is compared against.
fn analytic_channel(cfg: &RunConfig, t: f64) -> Result<Box<dyn Channel>, Failure> {
    let bath = cfg.shared_bath()?;
    let n = cfg.n_qubits;
    Ok(match cfg.model {
        Model::IndividualBaths => Box::new(build_single_qubit_parity(bath, t)),
        Model::CommonBath if n == 2 => Box::new(build_common_nonru(&bath.coefficients(t))),
        Model::CommonBath => {
            let coeffs = bath.coefficients(t);
            let basis = ru_sign_basis(n)?;
            let schur = build_schur_matrix(n, coeffs.gamma)?;
            let phase = collective_phase(n, &coeffs);
            // sign-basis weights may be negative; the signed sum is still the channel
            let w = ru_weights(&basis, &schur)?;
            Box::new(crate::kraus::SignedMixture {
                weights: w,
                unitaries: (0..basis.len())
                    .map(|i| &phase * &basis.operator(i))
                    .collect(),
            })
        }
    })
}

/// Number of random states per time point in the oracle comparison.
const ORACLE_STATES: usize = 20;

fn cmd_fock(cfg: &RunConfig, seed: u64) -> Outcome {
    let (fcfg, coup) = fock_setup(cfg)?;
    let rows = trace_norm_table(&fcfg, &coup)?;
    let mut table = Table::new("trace_norms", &["t", "m", "norm"]);
    let mut above = 0.0_f64;
    for r in &rows {
        if r.m > cfg.cutoff_m {
            above = above.max(r.norm);
        }
        table
            .rows
            .push(vec![num(r.t), r.m.to_string(), num(r.norm)]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut residuals = Vec::with_capacity(fcfg.times().len());
    for &t in fcfg.times() {
        let reference = analytic_channel(cfg, t)?;
        let mut worst = 0.0_f64;
        for _ in 0..ORACLE_STATES {
            let rho = PureState::haar(coup.dim(), &mut rng).to_density();
            let oracle = reduced_system_state(&fcfg, &coup, t, &rho)?;
            worst = worst.max(oracle.max_abs_diff(&reference.apply_matrix(rho.matrix())?));
        }
        residuals.push(worst);
    }
    let max_res = residuals.iter().cloned().fold(0.0, f64::max);
    let passed = max_res <= cfg.tolerances.oracle;
    Ok((
        json!({
            "cutoff": cfg.cutoff,
            "cutoff_m": cfg.cutoff_m,
            "max_equivalence_residual": max_res,
            "equivalence_residuals": residuals,
            "max_norm_above_cutoff_m": above,
        }),
        vec![table],
        passed,
    ))
}

fn cmd_basis(cfg: &RunConfig) -> Outcome {
    let (fcfg, coup) = fock_setup(cfg)?;
    if cfg.model != Model::CommonBath {
        return Err(ConfigError("basis runs on the common_bath model".into()).into());
    }
    let n = cfg.n_qubits;
    let bath = cfg.shared_bath()?;
    let rho = match &cfg.state {
        Some(_) => cfg.initial_state()?.to_density(),
        None => DensityMatrix::maximally_mixed(1 << n),
    };
    let mut v_table = Table::new("basis", &["t", "n", "m", "re", "im"]);
    let mut p_table = Table::new("outcome_probabilities", &["t", "n", "probability"]);
    let mut points = Vec::new();
    let mut passed = true;
    for &t in fcfg.times() {
        let coeffs = bath.coefficients(t);
        let target = if n == 2 {
            build_common_ru(&coeffs)?.composed()
        } else {
            let schur = build_schur_matrix(n, coeffs.gamma)?;
            solve_ru_weights(&ru_sign_basis(n)?, &schur)?
                .premultiply(&collective_phase(n, &coeffs))?
        };
        let family = fock_family(&fcfg, &coup, t, cfg.cutoff_m)?;
        let basis = solve_measurement_basis(&target, &family, cfg.cutoff_m)?;
        let env = environment_state(&fcfg, &coup, t, &rho)?;
        let probs = basis_outcome_probabilities(&basis, &env);
        let k = basis.n_target();
        let tail = probs[k..].iter().fold(0.0_f64, |m, p| m.max(p.abs()));
        let total: f64 = probs.iter().sum();
        passed &= basis.residual <= BASIS_RESIDUAL_TOL
            && basis.gram_deviation <= BASIS_RESIDUAL_TOL
            && tail < BASIS_RESIDUAL_TOL
            && (total - 1.0).abs() <= BASIS_RESIDUAL_TOL;
        for i in 0..basis.v.rows() {
            for m in 0..basis.v.cols() {
                let z = basis.v[(i, m)];
                v_table.rows.push(vec![
                    num(t),
                    i.to_string(),
                    m.to_string(),
                    num(z.re),
                    num(z.im),
                ]);
            }
        }
        for (i, p) in probs.iter().enumerate() {
            p_table.rows.push(vec![num(t), i.to_string(), num(*p)]);
        }
        points.push(json!({
            "t": t,
            "gamma": coeffs.gamma,
            "labels": target.labels().collect::<Vec<_>>(),
            "residual": basis.residual,
            "gram_deviation": basis.gram_deviation,
            "max_tail_probability": tail,
            "probability_sum": total,
            "v": matrix_json(&basis.v),
        }));
    }
    Ok((
        json!({"cutoff": cfg.cutoff, "cutoff_m": cfg.cutoff_m, "points": points}),
        vec![v_table, p_table],
        passed,
    ))
}

fn cmd_restore(cfg: &RunConfig, seed: u64) -> Outcome {
    let state = cfg.initial_state()?;
    let bath = cfg.bath_model()?;
    let scheme = cfg.scheme_or_default();
    let mut b_table = Table::new("branches", &["t", "label", "probability", "fidelity"]);
    let mut s_table = Table::new(
        "samples",
        &[
            "t",
            "label",
            "count",
            "frequency",
            "probability",
            "standard_error",
        ],
    );
    let mut points = Vec::new();
    let mut passed = true;
    for &t in cfg.require_times()? {
        let scenario = Scenario::new(
            cfg.model,
            cfg.n_qubits,
            scheme,
            InitialState::Pure(state.clone()),
            bath.clone(),
            t,
        )
        .map_err(|e| Failure::from(ConfigError(e.to_string())))?;
        let summary = run_protocol(&scenario)?;
        passed &= summary.success && (summary.probability_sum - 1.0).abs() <= 1e-10;
        let branches: Vec<Value> = summary
            .branches
            .iter()
            .map(|b| {
                b_table.rows.push(vec![
                    num(t),
                    b.label.clone(),
                    num(b.probability),
                    b.fidelity.map(num).unwrap_or_default(),
                ]);
                json!({"label": b.label, "probability": b.probability, "fidelity": b.fidelity})
            })
            .collect();
        let mut point = json!({
            "t": t,
            "branches": branches,
            "probability_sum": summary.probability_sum,
            "average_fidelity": summary.average_fidelity,
            "min_fidelity": summary.min_fidelity,
            "success": summary.success,
            "search_residual": summary.search_residual,
        });
        if let Some(shots) = cfg.shots {
            let sample = sample_run(&scenario, seed, shots)?;
            for o in &sample.outcomes {
                s_table.rows.push(vec![
                    num(t),
                    o.label.clone(),
                    o.count.to_string(),
                    num(o.frequency),
                    num(o.probability),
                    num(o.standard_error),
                ]);
            }
            point["sample"] = serde_json::to_value(&sample).expect("sample report serializes");
        }
        points.push(point);
    }
    let mut tables = vec![b_table];
    if cfg.shots.is_some() {
        tables.push(s_table);
    }
    Ok((
        json!({"scheme": scheme.name(), "n_qubits": cfg.n_qubits, "points": points}),
        tables,
        passed,
    ))
}
