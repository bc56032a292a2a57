//! Gamma-based constants, generalized Bessel functions `J_nu^(eta)` and the
//! flat-point main terms `H_{a,b,1}`, `H_{a,b,2}`.
//!
//! The generalized Bessel function is
//!
//! ```text
//! J_nu^(eta)(x) = 2 / (sqrt(pi) Gamma(nu + 1 - 1/eta)) * (x/2)^(eta nu / 2)
//!                 * int_0^1 (1 - t^eta)^(nu - 1/eta) cos(x t) dt
//! ```
//!
//! which for `eta = 2` is Poisson's integral for the classical `J_nu`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::compensated::{frac_of_product, NeumaierSum};
use crate::error::{domain, usage, Result};
use crate::lattice_count::BodyParams;
use crate::quad::{self, JacobiPair};

pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesselParams {
    pub eta: f64,
    pub nu: f64,
}

impl BesselParams {
    pub fn new(eta: f64, nu: f64) -> Result<Self> {
        if !(eta.is_finite() && nu.is_finite()) || eta < 1.0 {
            return Err(domain(format!("generalized Bessel needs finite eta >= 1, got eta = {eta}")));
        }
        // (1 - t^eta)^(nu - 1/eta) must be integrable at t = 1
        if nu <= 1.0 / eta - 1.0 {
            return Err(domain(format!(
                "generalized Bessel needs nu > 1/eta - 1, got nu = {nu}, eta = {eta}"
            )));
        }
        Ok(Self { eta, nu })
    }

    /// The Bessel series in `n` converges absolutely only for `nu > 1/eta`.
    pub fn require_series_convergence(&self) -> Result<()> {
        if self.beta() <= 0.0 {
            return Err(domain(format!(
                "Bessel series needs nu > 1/eta, got nu = {}, eta = {}",
                self.nu, self.eta
            )));
        }
        Ok(())
    }

    /// Exponent of `(1 - t^eta)` in the integral representation.
    pub fn beta(&self) -> f64 {
        self.nu - 1.0 / self.eta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesConfig {
    /// Truncation point of the infinite `n`-sums.
    pub n_max: usize,
    /// Absolute tolerance of the oscillatory quadrature.
    pub quad_tol: f64,
    /// Bessel arguments above this use the asymptotic form.
    pub asym_threshold: f64,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        Self { n_max: 200, quad_tol: 1e-12, asym_threshold: 20.0 }
    }
}

impl SeriesConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.quad_tol > 0.0) {
            return Err(usage(format!("quad_tol must be positive, got {}", self.quad_tol)));
        }
        if !(self.asym_threshold > 0.0) {
            return Err(usage(format!("asym_threshold must be positive, got {}", self.asym_threshold)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MainTermParams {
    pub a: f64,
    pub b: f64,
}

impl MainTermParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || !(a >= b && b >= 2.0) {
            return Err(domain(format!("main terms need a >= b >= 2, got a = {a}, b = {b}")));
        }
        Ok(Self { a, b })
    }

    pub fn for_body(p: &BodyParams) -> Result<Self> {
        Self::new(p.a(), p.k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MainTermKind {
    First,
    Second,
}

impl TryFrom<u8> for MainTermKind {
    type Error = crate::Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            1 => Ok(MainTermKind::First),
            2 => Ok(MainTermKind::Second),
            other => Err(usage(format!("main term kind must be 1 or 2, got {other}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Exact,
    Asymptotic,
}

/// Area of the unit Lamé disc `|u|^k + |v|^k <= 1`.
pub fn lame_area(k: f64) -> Result<f64> {
    if !k.is_finite() || k <= 0.0 {
        return Err(domain(format!("Lamé area needs finite k > 0, got {k}")));
    }
    let g1 = gamma(1.0 / k);
    Ok(2.0 * g1 * g1 / (k * gamma(2.0 / k)))
}

/// Volume of `|u1|^(mk) + (|u2|^k + |u3|^k)^m <= 1`.
pub fn body_volume(p: &BodyParams) -> Result<f64> {
    let ak = lame_area(p.k)?;
    let a = p.a();
    Ok(ak * 2.0 * gamma(1.0 + 2.0 / a) * gamma(1.0 / a) / (a * gamma(1.0 + 3.0 / a)))
}

/// Evaluator for one `J_nu^(eta)`; holds the end-panel quadrature rule.
#[derive(Debug, Clone)]
pub struct GenBessel {
    params: BesselParams,
    beta: f64,
    norm: f64,
    end_rule: JacobiPair,
}

impl GenBessel {
    pub fn new(params: BesselParams) -> Self {
        let beta = params.beta();
        Self {
            params,
            beta,
            norm: 2.0 / (PI.sqrt() * gamma(params.nu + 1.0 - 1.0 / params.eta)),
            end_rule: JacobiPair::new(beta),
        }
    }

    pub fn params(&self) -> BesselParams {
        self.params
    }

    fn prefactor(&self, x: f64) -> f64 {
        self.norm * (0.5 * x).powf(0.5 * self.params.eta * self.params.nu)
    }

    /// `int_0^1 (1 - t^eta)^beta cos(x t) dt`, split at the zeros of
    /// `cos(x t)`; the last panel carries the endpoint behaviour as a
    /// Gauss–Jacobi weight.
    fn cosine_integral(&self, x: f64, tol: f64) -> f64 {
        let eta = self.params.eta;
        let beta = self.beta;
        let f = |t: f64| {
            let g = -(eta * t.ln()).exp_m1();
            if g <= 0.0 { 0.0 } else { g.powf(beta) * (x * t).cos() }
        };
        let smooth = |t: f64| {
            let ratio = if t >= 1.0 { eta } else { -(eta * t.ln()).exp_m1() / (1.0 - t) };
            ratio.powf(beta) * (x * t).cos()
        };
        let mut cuts = vec![0.0];
        let mut j = 0.0;
        loop {
            let z = (j + 0.5) * PI / x;
            if z >= 1.0 {
                break;
            }
            cuts.push(z);
            j += 1.0;
        }
        // a sliver next to t = 1 would put the endpoint singularity just
        // outside a Kronrod panel; fold it into the Jacobi panel
        if cuts.len() > 2 && 1.0 - cuts[cuts.len() - 1] < 0.5 * PI / x {
            cuts.pop();
        }
        let last = *cuts.last().unwrap();
        let end_start = if last < 0.5 { 0.5 } else { last };
        if last < 0.5 {
            cuts.push(0.5);
        }
        let panels = cuts.len();
        let per = tol / panels as f64;
        let mut acc = NeumaierSum::new();
        for w in cuts.windows(2) {
            acc.add(quad::integrate(&f, w[0], w[1], per));
        }
        acc.add(self.end_rule.integrate(&smooth, end_start, 1.0, per));
        acc.sum()
    }

    /// `J_nu^(eta)(x)` by quadrature, to absolute accuracy about `quad_tol`.
    pub fn eval_quadrature(&self, x: f64, quad_tol: f64) -> f64 {
        let pre = self.prefactor(x);
        pre * self.cosine_integral(x, quad_tol / pre.max(1e-300))
    }

    /// Leading asymptotic term
    /// `(2/sqrt(pi)) (x/2)^(eta nu/2) eta^beta x^(-1-beta) sin(x - pi beta/2)`.
    pub fn eval_asymptotic(&self, x: f64) -> f64 {
        self.asymptotic_with_turns(x, x / TAU)
    }

    /// As [`eval_asymptotic`](Self::eval_asymptotic), with the oscillation
    /// phase supplied as `x / (2 pi)` (only its fractional part matters).
    pub fn asymptotic_with_turns(&self, x: f64, turns: f64) -> f64 {
        let t = turns - turns.floor();
        self.envelope(x) * (TAU * t - 0.5 * PI * self.beta).sin()
    }

    fn envelope(&self, x: f64) -> f64 {
        let b = self.beta;
        2.0 / PI.sqrt()
            * (0.5 * x).powf(0.5 * self.params.eta * self.params.nu)
            * self.params.eta.powf(b)
            * x.powf(-1.0 - b)
    }

    pub fn eval(&self, x: f64, cfg: &SeriesConfig) -> f64 {
        if x > cfg.asym_threshold {
            self.eval_asymptotic(x)
        } else {
            self.eval_quadrature(x, cfg.quad_tol)
        }
    }
}

/// `J_nu^(eta)(x)` by quadrature at any `x > 0`.
pub fn gen_bessel(bp: BesselParams, x: f64, cfg: &SeriesConfig) -> Result<f64> {
    let bp = BesselParams::new(bp.eta, bp.nu)?;
    cfg.validate()?;
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(format!("generalized Bessel needs finite x > 0, got {x}")));
    }
    Ok(GenBessel::new(bp).eval_quadrature(x, cfg.quad_tol))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: f64,
    /// Bound on the omitted tail `sum_{n > n_max}`, from the asymptotic
    /// envelope of the terms.
    pub tail_bound: f64,
}

/// `psi_nu^(eta)(x) = 2 sqrt(pi) Gamma(nu + 1 - 1/eta)
///  sum_n (x/(pi n))^(eta nu/2) J_nu^(eta)(2 pi n x)`, truncated at `n_max`.
pub fn psi_eta_series(bp: BesselParams, x: f64, cfg: &SeriesConfig) -> Result<SeriesValue> {
    let bp = BesselParams::new(bp.eta, bp.nu)?;
    bp.require_series_convergence()?;
    cfg.validate()?;
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(format!("psi series needs finite x > 0, got {x}")));
    }
    let j = GenBessel::new(bp);
    Ok(psi_with(&j, x, cfg))
}

fn psi_with(j: &GenBessel, x: f64, cfg: &SeriesConfig) -> SeriesValue {
    let bp = j.params();
    let beta = j.beta;
    let half_power = 0.5 * bp.eta * bp.nu;
    let c = 2.0 * PI.sqrt() * gamma(1.0 + beta);
    let mut acc = NeumaierSum::new();
    for n in 1..=cfg.n_max {
        let nf = n as f64;
        let y = TAU * nf * x;
        let jv = if y > cfg.asym_threshold {
            j.asymptotic_with_turns(y, frac_of_product(nf, x))
        } else {
            j.eval_quadrature(y, cfg.quad_tol)
        };
        acc.add(c * (x / (PI * nf)).powf(half_power) * jv);
    }
    let envelope = 4.0 * gamma(1.0 + beta) * bp.eta.powf(beta) * x.powf(bp.eta * bp.nu)
        * (TAU * x).powf(-1.0 - beta);
    let tail = if cfg.n_max == 0 {
        envelope * (1.0 + 1.0 / beta)
    } else {
        envelope * (cfg.n_max as f64).powf(-beta) / beta
    };
    SeriesValue { value: acc.sum(), tail_bound: tail }
}

/// `C_1(a, b)`, amplitude of the first main term.
pub fn amplitude_first(p: MainTermParams) -> f64 {
    let ab = lame_area(p.b).expect("b >= 2");
    ab * (2.0 / PI) * (p.a / TAU).powf(2.0 / p.a) * gamma(1.0 + 2.0 / p.a)
}

/// `C_2(a, b)`, amplitude of the second main term.
pub fn amplitude_second(p: MainTermParams) -> f64 {
    let (a, b) = (p.a, p.b);
    16.0 / PI * a.powf(1.0 / a) * b.powf(1.0 / b) / TAU.powf(1.0 / a + 1.0 / b)
        * gamma(1.0 + 1.0 / a)
        * gamma(1.0 + 1.0 / b)
}

/// Sine series `sum_{n <= n_max} n^(-s) sin(2 pi n x - shift)`.
fn sine_series(x: f64, s: f64, shift: f64, n_max: usize) -> f64 {
    let mut acc = NeumaierSum::new();
    for n in 1..=n_max {
        let nf = n as f64;
        acc.add(nf.powf(-s) * (TAU * frac_of_product(nf, x) - shift).sin());
    }
    acc.sum()
}

/// `H_{a,b,1}(x)` or `H_{a,b,2}(x)`.
///
/// `Exact` evaluates the Bessel-series definitions; `Asymptotic` returns the
/// truncated sine series without the `O(x)` remainder.
pub fn main_term(p: MainTermParams, x: f64, kind: MainTermKind, mode: Mode, cfg: &SeriesConfig) -> Result<f64> {
    let p = MainTermParams::new(p.a, p.b)?;
    cfg.validate()?;
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(format!("main term needs finite x > 0, got {x}")));
    }
    let (a, b) = (p.a, p.b);
    Ok(match (kind, mode) {
        (MainTermKind::First, Mode::Asymptotic) => {
            amplitude_first(p) * x.powf(2.0 - 2.0 / a) * sine_series(x, 1.0 + 2.0 / a, PI / a, cfg.n_max)
        }
        (MainTermKind::Second, Mode::Asymptotic) => {
            let e = 1.0 / a + 1.0 / b;
            amplitude_second(p) * x.powf(2.0 - e) * sine_series(x, 1.0 + e, 0.5 * PI * e, cfg.n_max)
        }
        (MainTermKind::First, Mode::Exact) => {
            let j = GenBessel::new(BesselParams::new(a, 3.0 / a)?);
            lame_area(b)? * psi_with(&j, x, cfg).value
        }
        (MainTermKind::Second, Mode::Exact) => second_exact(a, b, x, cfg)?,
    })
}

/// `8x int_0^1 t^(a-1) (1 - t^a)^(1/a - 1) psi_{2/b}^(b)(x t) dt`, integrated
/// term by term in the Bessel series.
fn second_exact(a: f64, b: f64, x: f64, cfg: &SeriesConfig) -> Result<f64> {
    let j = GenBessel::new(BesselParams::new(b, 2.0 / b)?);
    let end_rule = JacobiPair::new(1.0 / a - 1.0);
    let c = 2.0 * PI.sqrt() * gamma(1.0 + 1.0 / b);
    let expo = 1.0 / a - 1.0;
    let bessel = |y: f64| if y > cfg.asym_threshold { j.eval_asymptotic(y) } else { j.eval_quadrature(y, cfg.quad_tol) };
    let mut total = NeumaierSum::new();
    for n in 1..=cfg.n_max {
        let nf = n as f64;
        let freq = TAU * nf * x;
        let coef = c * x / (PI * nf);
        // t^(a-1) * (x t / (pi n)) = coef/c * t^a; coef already carries x/(pi n).
        let f = |t: f64| {
            let g = -(a * t.ln()).exp_m1();
            if g <= 0.0 || t <= 0.0 { 0.0 } else { t.powf(a) * g.powf(expo) * bessel(freq * t) }
        };
        let smooth = |t: f64| {
            let ratio = if t >= 1.0 { a } else { -(a * t.ln()).exp_m1() / (1.0 - t) };
            t.powf(a) * ratio.powf(expo) * bessel(freq * t)
        };
        let half = 1.0 / (2.0 * nf * x);
        let offset = 1.0 / (4.0 * b * nf * x);
        let mut cuts = vec![0.0];
        let mut z = offset;
        while z < 1.0 {
            if z > 0.0 {
                cuts.push(z);
            }
            z += half;
        }
        if cuts.len() > 2 && 1.0 - cuts[cuts.len() - 1] < 0.5 * half {
            cuts.pop();
        }
        let last = *cuts.last().unwrap();
        let end_start = if last < 0.5 { 0.5 } else { last };
        if last < 0.5 {
            cuts.push(0.5);
        }
        let per = cfg.quad_tol / (cuts.len() as f64 * coef.abs().max(1.0));
        let mut acc = NeumaierSum::new();
        for w in cuts.windows(2) {
            acc.add(quad::integrate(&f, w[0], w[1], per));
        }
        acc.add(end_rule.integrate(&smooth, end_start, 1.0, per));
        total.add(coef * acc.sum());
    }
    Ok(8.0 * x * total.sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lame_area_values() {
        assert!((lame_area(2.0).unwrap() - PI).abs() < 1e-14);
        let a3 = lame_area(3.0).unwrap();
        assert!((a3 - 3.5332).abs() < 1e-4, "{a3}");
        assert!((lame_area(1e6).unwrap() - 4.0).abs() < 1e-4);
        assert!(lame_area(f64::INFINITY).is_err());
        assert!(lame_area(f64::NAN).is_err());
        assert!(lame_area(0.0).is_err());
    }

    #[test]
    fn bessel_params_reject_nonintegrable_order() {
        assert!(BesselParams::new(2.0, -0.5).is_err());
        assert!(BesselParams::new(3.0, -0.7).is_err());
        assert!(BesselParams::new(2.0, 0.5).is_ok());
        let cfg = SeriesConfig::default();
        assert!(psi_eta_series(BesselParams::new(2.0, 0.5).unwrap(), 1.3, &cfg).is_err());
        assert!(psi_eta_series(BesselParams::new(3.0, 0.3).unwrap(), 1.3, &cfg).is_err());
        assert!(BesselParams::new(0.5, 3.0).is_err());
        assert!(BesselParams::new(2.0, 0.51).is_ok());
    }

    #[test]
    fn kind_from_integer() {
        assert_eq!(MainTermKind::try_from(1).unwrap(), MainTermKind::First);
        assert_eq!(MainTermKind::try_from(2).unwrap(), MainTermKind::Second);
        assert!(matches!(MainTermKind::try_from(3), Err(crate::Error::Usage(_))));
    }

    #[test]
    fn first_amplitude_for_the_disc() {
        let c = amplitude_first(MainTermParams::new(2.0, 2.0).unwrap());
        assert!((c - 2.0 / PI).abs() < 1e-14);
    }

    #[test]
    fn main_term_preconditions() {
        let cfg = SeriesConfig::default();
        assert!(MainTermParams::new(3.0, 4.0).is_err());
        assert!(MainTermParams::new(1.5, 1.5).is_err());
        let p = MainTermParams::new(4.0, 4.0).unwrap();
        assert!(main_term(p, 0.0, MainTermKind::First, Mode::Asymptotic, &cfg).is_err());
    }

    #[test]
    fn psi_series_empty_sum() {
        let cfg = SeriesConfig { n_max: 0, ..Default::default() };
        let v = psi_eta_series(BesselParams::new(6.0, 0.5).unwrap(), 3.3, &cfg).unwrap();
        assert_eq!(v.value, 0.0);
        assert!(v.tail_bound.is_finite() && v.tail_bound > 0.0);
    }

    fn exact_minus_asymptotic(p: MainTermParams, kind: MainTermKind, x: f64, cfg: &SeriesConfig) -> f64 {
        let e = main_term(p, x, kind, Mode::Exact, cfg).unwrap();
        let s = main_term(p, x, kind, Mode::Asymptotic, cfg).unwrap();
        e - s
    }

    #[test]
    fn first_exact_differs_from_asymptotic_by_order_x() {
        // sweep maximum is 0.064 at x = 20, falling with x
        let p = MainTermParams::new(4.0, 4.0).unwrap();
        let cfg = SeriesConfig { asym_threshold: 2000.0, ..Default::default() };
        for &x in &[20.0, 47.5, 110.0, 200.0] {
            let d = exact_minus_asymptotic(p, MainTermKind::First, x, &cfg);
            assert!(d != 0.0 && (d / x).abs() <= 0.25, "x={x}: {d}");
        }
    }

    #[test]
    fn first_exact_is_stable_in_the_switch_threshold() {
        let p = MainTermParams::new(4.0, 4.0).unwrap();
        let at = |th: f64| {
            let cfg = SeriesConfig { asym_threshold: th, ..Default::default() };
            main_term(p, 20.0, MainTermKind::First, Mode::Exact, &cfg).unwrap()
        };
        let (lo, hi) = (at(2000.0), at(4000.0));
        assert!((lo - hi).abs() < 0.05, "{lo} {hi}");
    }

    #[test]
    fn second_exact_differs_from_asymptotic_by_order_x() {
        // sweep over x in [5, 40] gave at most 0.15 (a = b = 4) and 0.14 (a = 6, b = 3)
        let cfg = SeriesConfig { n_max: 30, ..Default::default() };
        for &(a, b) in &[(4.0, 4.0), (6.0, 3.0)] {
            let p = MainTermParams::new(a, b).unwrap();
            for &x in &[5.0, 12.5] {
                let d = exact_minus_asymptotic(p, MainTermKind::Second, x, &cfg);
                assert!(d != 0.0 && (d / x).abs() <= 0.5, "a={a} b={b} x={x}: {d}");
            }
        }
    }

    #[test]
    fn gen_bessel_at_resonant_argument() {
        // x = 120 pi puts every cut on a cosine zero, with a half-width last panel
        let bp = BesselParams::new(4.0, 0.75).unwrap();
        let x = 120.0 * PI;
        let q = gen_bessel(bp, x, &SeriesConfig::default()).unwrap();
        let a = GenBessel::new(bp).eval_asymptotic(x);
        assert!((q - a).abs() < 0.01, "{q} {a}");
    }
}
