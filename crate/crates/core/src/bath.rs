//! Bosonic bath model: the time-dependent scalars every dephasing channel in
//! this crate is built from.
//!
//! A bath is a finite list of modes `(omega_k, g_k)` starting in the vacuum.
//! Coupling a qubit operator with eigenvalue `s` to mode `k` displaces the
//! mode by `-i s G_k(t)` with
//!
//! ```text
//! G_k(t)   = ∫_0^t g_k e^{i omega_k u} du
//! φ_k'(t)  = -i g_k e^{-i omega_k t} G_k(t),   φ_k(0) = 0
//! ```
//!
//! `φ_k` is complex: its imaginary part equals `-|G_k|^2 / 2` and carries the
//! vacuum-overlap decay. All channel coefficients depend on the bath only
//! through `Σ_k |G_k(t)|^2` and `Σ_k φ_k(t)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::C64;

/// Below this `|omega t|` the removable singularities use series limits.
pub const SMALL_ARGUMENT: f64 = 1e-8;

const QUAD_TARGET: f64 = 1e-12;
const QUAD_ACCEPT: f64 = 1e-9;
const QUAD_MAX_PANELS: usize = 512;

/// One bosonic mode: angular frequency and coupling strength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Mode {
    pub omega: f64,
    pub g: f64,
}

impl Mode {
    pub fn new(omega: f64, g: f64) -> Self {
        Mode { omega, g }
    }

    /// `G(t)`, written as `g t [sinc(x) + i (1 - cos x)/x]` with `x = omega t`
    /// so that small `x` does not cancel.
    pub fn displacement(&self, t: f64) -> C64 {
        let x = self.omega * t;
        let (re, im) = if x.abs() < SMALL_ARGUMENT {
            (1.0, x / 2.0)
        } else {
            let h = (x / 2.0).sin();
            (x.sin() / x, 2.0 * h * h / x)
        };
        C64::new(re, im) * (self.g * t)
    }

    /// `φ(t)` from integrating its defining ODE in closed form:
    /// `-(g²/ω) t + (g²/ω²) sin ωt - i (g²/ω²)(1 - cos ωt)`.
    pub fn phase(&self, t: f64) -> C64 {
        let x = self.omega * t;
        let g2t2 = self.g * self.g * t * t;
        // (sin x - x)/x^2 and 2 sin^2(x/2)/x^2
        let (re, im) = if x.abs() < SMALL_ARGUMENT {
            (-x / 6.0, 0.5)
        } else if x.abs() < 1e-3 {
            let x3 = x * x * x;
            (-x / 6.0 + x3 / 120.0 - x3 * x * x / 5040.0, half_sinc_sq(x))
        } else {
            ((x.sin() - x) / (x * x), half_sinc_sq(x))
        };
        C64::new(g2t2 * re, -g2t2 * im)
    }

    /// `∫_0^t dt' ∫_0^{t'} g² e^{-i ω (t' - s)} ds`, which equals `i φ(t)`.
    pub fn decay_exponent(&self, t: f64) -> C64 {
        C64::i() * self.phase(t)
    }
}

/// `2 sin²(x/2) / x²`.
fn half_sinc_sq(x: f64) -> f64 {
    let h = (x / 2.0).sin();
    2.0 * h * h / (x * x)
}

/// Discrete mode list describing the environment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BathSpecRaw", into = "BathSpecRaw")]
pub struct BathSpec {
    modes: Vec<Mode>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BathSpecRaw {
    modes: Vec<Mode>,
}

impl TryFrom<BathSpecRaw> for BathSpec {
    type Error = Error;

    fn try_from(raw: BathSpecRaw) -> Result<Self> {
        BathSpec::new(raw.modes)
    }
}

impl From<BathSpec> for BathSpecRaw {
    fn from(spec: BathSpec) -> Self {
        BathSpecRaw { modes: spec.modes }
    }
}

impl BathSpec {
    pub fn new(modes: Vec<Mode>) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::InvalidArgument(
                "bath needs at least one mode".into(),
            ));
        }
        for (k, m) in modes.iter().enumerate() {
            if !m.omega.is_finite() || !m.g.is_finite() || m.g < 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "mode {k}: need finite omega and g >= 0, got ({}, {})",
                    m.omega, m.g
                )));
            }
        }
        Ok(Self { modes })
    }

    pub fn single(omega: f64, g: f64) -> Result<Self> {
        Self::new(vec![Mode::new(omega, g)])
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    /// `G_k(t)`.
    pub fn displacement_amplitude(&self, k: usize, t: f64) -> C64 {
        self.modes[k].displacement(t)
    }

    /// `φ_k(t)`.
    pub fn mode_phase(&self, k: usize, t: f64) -> C64 {
        self.modes[k].phase(t)
    }

    /// `α(t1, s) = Σ_k g_k² e^{-i ω_k (t1 - s)}`.
    pub fn correlation(&self, t1: f64, s: f64) -> C64 {
        self.modes
            .iter()
            .map(|m| C64::from_polar(m.g * m.g, -m.omega * (t1 - s)))
            .sum()
    }

    /// `Σ_k |G_k(t)|²`.
    pub fn g_total(&self, t: f64) -> f64 {
        self.modes
            .iter()
            .map(|m| m.displacement(t).norm_sqr())
            .sum()
    }

    /// `Σ_k φ_k(t)`.
    pub fn phi_total(&self, t: f64) -> C64 {
        self.modes.iter().map(|m| m.phase(t)).sum()
    }

    /// `l1(t) = exp(-∫_0^t dt' ∫_0^{t'} α(t', s) ds)` from the per-mode closed
    /// forms.
    pub fn vacuum_coefficient(&self, t: f64) -> C64 {
        let exponent: C64 = self.modes.iter().map(|m| m.decay_exponent(t)).sum();
        (-exponent).exp()
    }

    /// Same quantity by nested Gauss-Legendre quadrature of the correlation
    /// function, with panel doubling until successive estimates agree.
    pub fn vacuum_coefficient_quadrature(&self, t: f64) -> Result<C64> {
        if t == 0.0 {
            return Ok(C64::new(1.0, 0.0));
        }
        let mut panels = 2;
        let mut prev = self.nested_correlation_integral(t, panels);
        loop {
            panels *= 2;
            let next = self.nested_correlation_integral(t, panels);
            let change = (next - prev).norm();
            let scale = next.norm().max(1.0);
            if change <= QUAD_TARGET * scale {
                return Ok((-next).exp());
            }
            if panels >= QUAD_MAX_PANELS {
                if change <= QUAD_ACCEPT * scale {
                    return Ok((-next).exp());
                }
                return Err(Error::QuadratureNotConverged {
                    last_change: change,
                });
            }
            prev = next;
        }
    }

    fn nested_correlation_integral(&self, t: f64, panels: usize) -> C64 {
        gauss_legendre(0.0, t, panels, |t1| {
            gauss_legendre(0.0, t1, panels, |s| self.correlation(t1, s))
        })
    }

    /// `(l2, l3)`: roots of the total odd-parity and nonzero even-parity
    /// photon-number weights, `e^{-g} sinh g` and `e^{-g}(cosh g - 1)` with
    /// `g = Σ_k |G_k|²`.
    pub fn parity_coefficients(&self, t: f64) -> (f64, f64) {
        parity_roots(self.g_total(t))
    }

    /// Single-step coherence factor `e^{-2 g scale²}` where `scale` is half
    /// the eigenvalue spacing of the coupled operator (1 for `σ_z`, 1/2 for
    /// the collective `S_z`).
    pub fn coherence_factor(&self, t: f64, coupling_scale: f64) -> f64 {
        (-2.0 * self.g_total(t) * coupling_scale * coupling_scale).exp()
    }

    /// `(Σ_even, Σ_odd)` photon-number parity weights for a `σ_z`-coupled
    /// qubit; the vacuum is counted as even.
    pub fn parity_weights(&self, t: f64) -> (f64, f64) {
        let g = self.g_total(t);
        // e^{-g} cosh g and e^{-g} sinh g
        let e2 = (-2.0 * g).exp();
        ((1.0 + e2) / 2.0, -(-2.0 * g).exp_m1() / 2.0)
    }

    pub fn coefficients(&self, t: f64) -> DephasingCoefficients {
        let l1 = self.vacuum_coefficient(t);
        let g_total = self.g_total(t);
        let (l2, l3) = parity_roots(g_total);
        DephasingCoefficients {
            t,
            l1,
            l2,
            l3,
            gamma: l1.norm(),
            phi_total: self.phi_total(t),
            g_total,
        }
    }
}

fn parity_roots(g: f64) -> (f64, f64) {
    // e^{-g} sinh g = (1 - e^{-2g})/2 ; e^{-g}(cosh g - 1) = (1 - e^{-g})^2 / 2
    let l2 = (-(-2.0 * g).exp_m1() / 2.0).sqrt();
    let l3 = -(-g).exp_m1() / std::f64::consts::SQRT_2;
    (l2, l3)
}

const GL_NODES: [f64; 5] = [
    0.0,
    -0.538_469_310_105_683_1,
    0.538_469_310_105_683_1,
    -0.906_179_845_938_664,
    0.906_179_845_938_664,
];
const GL_WEIGHTS: [f64; 5] = [
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
    0.236_926_885_056_189_1,
];

/// Composite 5-point Gauss-Legendre rule on `panels` equal panels.
pub(crate) fn gauss_legendre(a: f64, b: f64, panels: usize, f: impl Fn(f64) -> C64) -> C64 {
    let h = (b - a) / panels as f64;
    let mut acc = C64::new(0.0, 0.0);
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
            acc += f(mid + 0.5 * h * x) * w;
        }
    }
    acc * (0.5 * h)
}

/// Time-indexed scalars parameterizing the common-bath channels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DephasingCoefficients {
    pub t: f64,
    /// Vacuum-branch amplitude.
    pub l1: C64,
    /// Odd-branch weight root.
    pub l2: f64,
    /// Even (nonzero) branch weight root.
    pub l3: f64,
    /// `|l1|`.
    pub gamma: f64,
    pub phi_total: C64,
    pub g_total: f64,
}

impl DephasingCoefficients {
    /// Coefficients of a common bath with coherence factor `gamma = |l1|` and
    /// vacuum-amplitude phase `arg l1 = phase`, without reference to a mode
    /// list. `t` is left at zero.
    pub fn from_gamma(gamma: f64, phase: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "gamma must lie in (0, 1], got {gamma}"
            )));
        }
        let g_total = -2.0 * gamma.ln();
        let (l2, l3) = parity_roots(g_total);
        Ok(DephasingCoefficients {
            t: 0.0,
            l1: C64::from_polar(gamma, phase),
            l2,
            l3,
            gamma,
            phi_total: C64::new(-phase, gamma.ln()),
            g_total,
        })
    }

    /// `|l1|² + l2² + l3² - 1`.
    pub fn completeness_defect(&self) -> f64 {
        self.l1.norm_sqr() + self.l2 * self.l2 + self.l3 * self.l3 - 1.0
    }

    /// `(l3² - l2²) - (|l1|⁴ - |l1|²)`.
    pub fn cross_family_defect(&self) -> f64 {
        let a = self.l1.norm_sqr();
        (self.l3 * self.l3 - self.l2 * self.l2) - (a * a - a)
    }

    /// Unit-modulus phase of `l1`.
    pub fn l1_phase(&self) -> C64 {
        if self.gamma > 0.0 {
            self.l1 / self.gamma
        } else {
            C64::new(1.0, 0.0)
        }
    }
}
