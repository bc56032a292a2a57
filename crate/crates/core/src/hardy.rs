//! Dyadic decomposition of the Lamé-disc fractional-part sum `Delta_k(W)`,
//! the transformed exponential sums obtained from it by the van der Corput
//! B-process, and the truncated Hardy identity they combine into.
//!
//! The range `(W/2)^(1/k) < n <= W^(1/k)` is cut at
//! `N_j = W^(1/k) (1 + 2^(-jq))^(-1/k)`, `q = k/(k-1)`, which are exactly the
//! points where the phase `-h (W - u^k)^(1/k)` has derivative `h 2^j`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::compensated::{frac_of_product, ComplexSum};
use crate::error::{domain, usage, Result};
use crate::lattice_count::{delta_k, ScalarPolicy};
use crate::vaaler::{VaalerApprox, VaalerKind};

/// How the Vaaler order `H_j` is chosen on each dyadic interval.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub enum OrderRule {
    /// `H_j = ceil(W^(1/4))` on every interval.
    #[default]
    QuarterPower,
    /// The same order on every interval.
    Constant(u32),
    /// One order per interval, `H_0, ..., H_{J-1}`.
    PerLevel(Vec<u32>),
    /// `H_j = floor(2^(-j (18k-11)/(25k-25)) W^(13/(25k))) + 1`, the
    /// balancing choice used when the disc is summed over a third coordinate.
    Balanced,
}

impl std::str::FromStr for OrderRule {
    type Err = crate::error::Error;

    /// `quarter`, `balanced`, an integer `H`, or a comma-separated list of
    /// per-level orders.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quarter" => Ok(OrderRule::QuarterPower),
            "balanced" => Ok(OrderRule::Balanced),
            _ if s.contains(',') => s
                .split(',')
                .map(|t| t.trim().parse::<u32>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map(OrderRule::PerLevel)
                .map_err(|_| usage(format!("bad per-level order list `{s}`"))),
            _ => s.parse::<u32>().map(OrderRule::Constant).map_err(|_| usage(format!("unknown order rule `{s}`"))),
        }
    }
}

impl OrderRule {
    fn order(&self, j: usize, k: f64, w: f64) -> Result<u32> {
        let h = match self {
            OrderRule::QuarterPower => w.powf(0.25).ceil() as u32,
            OrderRule::Constant(h) => *h,
            OrderRule::PerLevel(v) => *v
                .get(j)
                .ok_or_else(|| usage(format!("order rule lists {} levels, level {j} requested", v.len())))?,
            OrderRule::Balanced => {
                let e = (18.0 * k - 11.0) / (25.0 * k - 25.0);
                ((2f64.powf(-(j as f64) * e) * w.powf(13.0 / (25.0 * k))).floor() as u32 + 1).max(2)
            }
        };
        if h < 2 {
            return Err(usage(format!("Vaaler order on level {j} must exceed 1, got {h}")));
        }
        if h as f64 > w {
            return Err(usage(format!("Vaaler order {h} on level {j} exceeds W = {w}")));
        }
        Ok(h)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DyadicScheme {
    pub w: f64,
    pub k: f64,
    /// `q = k / (k - 1)`.
    pub q: f64,
    pub lambda: f64,
    pub c0: f64,
    /// Number of intervals `J`.
    pub depth: usize,
    /// `N_0, ..., N_J`.
    pub breakpoints: Vec<f64>,
    /// `H_0, ..., H_{J-1}`.
    pub orders: Vec<u32>,
    /// `(W^(1/k) - N_J) / W^(lambda/k)`.
    pub tail_constant: f64,
}

/// Builds the breakpoints and interval orders for `Delta_k(W)`.
pub fn build_scheme(k: f64, w: f64, lambda: f64, c0: f64, rule: &OrderRule) -> Result<DyadicScheme> {
    if !(k > 2.0) || !k.is_finite() {
        return Err(domain(format!("dyadic scheme needs k > 2, got {k}")));
    }
    if !(0.0..1.0).contains(&lambda) {
        return Err(domain(format!("lambda must lie in [0, 1), got {lambda}")));
    }
    if !(c0 >= 1.0) || !c0.is_finite() {
        return Err(domain(format!("c0 must be >= 1, got {c0}")));
    }
    if !(w > 0.0) || !w.is_finite() {
        return Err(domain(format!("W must be finite and positive, got {w}")));
    }
    let q = k / (k - 1.0);
    let depth_f = (((w / c0).powf((1.0 - lambda) / k)).ln() / (q * 2f64.ln())).ceil() + 1.0;
    if !(depth_f >= 1.0) {
        return Err(domain(format!("W = {w} is too small for a dyadic scheme (J = {depth_f})")));
    }
    let depth = depth_f as usize;
    let root = w.powf(1.0 / k);
    let breakpoints: Vec<f64> = (0..=depth)
        .map(|j| root * (1.0 + 2f64.powf(-(j as f64) * q)).powf(-1.0 / k))
        .collect();
    let orders = (0..depth).map(|j| rule.order(j, k, w)).collect::<Result<Vec<_>>>()?;
    let tail_constant = (root - breakpoints[depth]) / w.powf(lambda / k);
    Ok(DyadicScheme { w, k, q, lambda, c0, depth, breakpoints, orders, tail_constant })
}

impl DyadicScheme {
    fn check_level(&self, j: usize) -> Result<()> {
        if j >= self.depth {
            return Err(usage(format!("level {j} out of range 0..{}", self.depth)));
        }
        Ok(())
    }

    /// Integers `n` with `N_j < n <= N_{j+1}`.
    pub fn lattice_range(&self, j: usize) -> std::ops::RangeInclusive<u64> {
        let lo = self.breakpoints[j].floor() as u64 + 1;
        let hi = self.breakpoints[j + 1].floor() as u64;
        lo..=hi
    }

    pub fn lattice_len(&self, j: usize) -> u64 {
        let r = self.lattice_range(j);
        (r.end() + 1).saturating_sub(*r.start())
    }

    /// `(N_{j+1} - N_j) / (2^(-jq) W^(1/k))` for each level.
    pub fn interval_length_ratios(&self) -> Vec<f64> {
        let root = self.w.powf(1.0 / self.k);
        (0..self.depth)
            .map(|j| (self.breakpoints[j + 1] - self.breakpoints[j]) / (2f64.powf(-(j as f64) * self.q) * root))
            .collect()
    }

    fn vaaler(&self, j: usize, kind: VaalerKind) -> VaalerApprox {
        VaalerApprox::new(self.orders[j], kind).expect("orders validated")
    }
}

/// `gamma_{h,H_j} sum_{N_j < n <= N_{j+1}} e(-h (W - n^k)^(1/k))`.
pub fn direct_exp_sum(s: &DyadicScheme, j: usize, h: u32, kind: VaalerKind) -> Result<Complex64> {
    s.check_level(j)?;
    if h == 0 || h >= s.orders[j] {
        return Err(usage(format!("harmonic h must satisfy 0 < h < {}, got {h}", s.orders[j])));
    }
    let gamma = s.vaaler(j, kind).coeff(h);
    Ok(gamma * raw_exp_sum(s, j, h))
}

fn raw_exp_sum(s: &DyadicScheme, j: usize, h: u32) -> Complex64 {
    let mut acc = ComplexSum::new();
    for n in s.lattice_range(j) {
        let wn = (s.w - (n as f64).powf(s.k)).max(0.0).powf(1.0 / s.k);
        let t = -frac_of_product(h as f64, wn);
        let (sn, cs) = (2.0 * PI * t).sin_cos();
        acc.add(cs, sn);
    }
    let (re, im) = acc.value();
    Complex64::new(re, im)
}

/// Left side of the transformation: `sum_{0<h<H_j} gamma_h sum_n e(-h (W - n^k)^(1/k))`.
pub fn direct_level_sum(s: &DyadicScheme, j: usize, kind: VaalerKind) -> Result<Complex64> {
    s.check_level(j)?;
    let v = s.vaaler(j, kind);
    let mut acc = ComplexSum::new();
    for h in 1..s.orders[j] {
        let z = v.coeff(h) * raw_exp_sum(s, j, h);
        acc.add(z.re, z.im);
    }
    let (re, im) = acc.value();
    Ok(Complex64::new(re, im))
}

/// Whether the endpoint terms `l = 2^j h` and `l = 2^(j+1) h` of the inner
/// sum carry weight 1/2.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum EndpointWeight {
    #[default]
    Half,
    Full,
}

/// The transformed sum for level `j`:
///
/// ```text
/// W^(1/(2k)) / sqrt(k-1) * sum_{0<h<H_j} gamma_h h
///     sum_{l = 2^j h}^{2^(j+1) h} (h l)^(q/2-1) (h^q + l^q)^(-1+1/(2q))
///     e(W^(1/k) (h^q + l^q)^(1/q) - 1/8)
/// ```
pub fn hardy_partial_sum(s: &DyadicScheme, j: usize, kind: VaalerKind, ends: EndpointWeight) -> Result<Complex64> {
    s.check_level(j)?;
    let v = s.vaaler(j, kind);
    let q = s.q;
    let root = s.w.powf(1.0 / s.k);
    let scale = s.w.powf(0.5 / s.k) / (s.k - 1.0).sqrt();
    let pow2 = 1u64 << j;
    let mut acc = ComplexSum::new();
    for h in 1..s.orders[j] {
        let hf = h as f64;
        let gh = v.coeff(h) * hf;
        let hq = hf.powf(q);
        let (lo, hi) = (pow2 * h as u64, 2 * pow2 * h as u64);
        for l in lo..=hi {
            let lf = l as f64;
            let lq = lf.powf(q);
            let amp = gh * (hf * lf).powf(0.5 * q - 1.0) * (hq + lq).powf(-1.0 + 0.5 / q);
            let weight = if ends == EndpointWeight::Half && (l == lo || l == hi) { 0.5 } else { 1.0 };
            let turns = frac_of_product(root, (hq + lq).powf(1.0 / q)) - 0.125;
            let (sn, cs) = (2.0 * PI * turns).sin_cos();
            acc.add(weight * amp * cs, weight * amp * sn);
        }
    }
    let (re, im) = acc.value();
    Ok(scale * Complex64::new(re, im))
}

/// `|LHS - RHS|` of the transformation at level `j`; the right side is the
/// complex conjugate of [`hardy_partial_sum`].
pub fn transform_check(s: &DyadicScheme, j: usize, kind: VaalerKind) -> Result<f64> {
    let lhs = direct_level_sum(s, j, kind)?;
    let rhs = hardy_partial_sum(s, j, kind, EndpointWeight::Half)?.conj();
    Ok((lhs - rhs).norm())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformReport {
    pub k: f64,
    pub w: f64,
    pub depth: usize,
    /// `max_{j, gamma} |LHS - RHS|`.
    pub max_diff: f64,
    /// `max_diff / (log W)^2`.
    pub ratio: f64,
    /// Per level: `(j, |diff| for alpha, |diff| for beta)`.
    pub levels: Vec<(usize, f64, f64)>,
}

pub fn transform_report(s: &DyadicScheme) -> Result<TransformReport> {
    let mut levels = Vec::with_capacity(s.depth);
    let mut max_diff: f64 = 0.0;
    for j in 0..s.depth {
        let a = transform_check(s, j, VaalerKind::Alpha)?;
        let b = transform_check(s, j, VaalerKind::Beta)?;
        max_diff = max_diff.max(a).max(b);
        levels.push((j, a, b));
    }
    let lw = s.w.ln();
    Ok(TransformReport { k: s.k, w: s.w, depth: s.depth, max_diff, ratio: max_diff / (lw * lw), levels })
}

/// Which real projection of a complex transformed sum enters the identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PartSelector {
    Real,
    Imag,
    NegImag,
}

impl PartSelector {
    pub fn apply(self, z: Complex64) -> f64 {
        match self {
            PartSelector::Real => z.re,
            PartSelector::Imag => z.im,
            PartSelector::NegImag => -z.im,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Selectors {
    pub alpha: PartSelector,
    pub beta: PartSelector,
}

impl Default for Selectors {
    /// The sums carry the phase `e(+W^(1/k) ...)`, the conjugate of the
    /// direct sums, so the sine part enters with a minus sign.
    fn default() -> Self {
        Selectors { alpha: PartSelector::NegImag, beta: PartSelector::Real }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardyEvaluation {
    pub k: f64,
    pub w: f64,
    pub lambda: f64,
    pub depth: usize,
    /// `sum_j sel_alpha(Sigma^(alpha)_j)`.
    pub main: f64,
    /// `sum_j sel_beta(Sigma^(beta)_j)`.
    pub majorant: f64,
    /// `sum_j #(]N_j, N_{j+1}] cap Z) / H_j`.
    pub lattice_term: f64,
    /// `W^(lambda/k) + (log W)^3`.
    pub tail_term: f64,
    /// `Delta_k(W)` summed directly.
    pub direct: f64,
    /// `max(0, (|direct - main| - majorant - lattice_term) / tail_term)`.
    pub c_emp: f64,
}

pub fn theorem2_check(k: f64, w: f64, lambda: f64, rule: &OrderRule, sel: Selectors) -> Result<HardyEvaluation> {
    let s = build_scheme(k, w, lambda, 1.0, rule)?;
    evaluate_scheme(&s, sel, EndpointWeight::Half)
}

pub fn evaluate_scheme(s: &DyadicScheme, sel: Selectors, ends: EndpointWeight) -> Result<HardyEvaluation> {
    let mut main = 0.0;
    let mut majorant = 0.0;
    let mut lattice_term = 0.0;
    for j in 0..s.depth {
        main += sel.alpha.apply(hardy_partial_sum(s, j, VaalerKind::Alpha, ends)?);
        majorant += sel.beta.apply(hardy_partial_sum(s, j, VaalerKind::Beta, ends)?);
        lattice_term += s.lattice_len(j) as f64 / s.orders[j] as f64;
    }
    let lw = s.w.ln();
    let tail_term = s.w.powf(s.lambda / s.k) + lw * lw * lw;
    let direct = delta_k(s.k, s.w, &ScalarPolicy::auto(&[s.k]))?.value;
    let c_emp = (((direct - main).abs() - majorant - lattice_term) / tail_term).max(0.0);
    Ok(HardyEvaluation { k: s.k, w: s.w, lambda: s.lambda, depth: s.depth, main, majorant, lattice_term, tail_term, direct, c_emp })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scheme_examples() {
        let s = build_scheme(3.0, 1000.0, 0.0, 1.0, &OrderRule::default()).unwrap();
        assert_eq!(s.q, 1.5);
        assert_eq!(s.depth, 4);
        assert!((s.breakpoints[0] - 500f64.cbrt()).abs() < 1e-12);
        assert_eq!(s.orders, vec![6; 4]);
        for w in s.breakpoints.windows(2) {
            assert!(w[0] < w[1]);
        }
    }

    #[test]
    fn order_rule_parsing() {
        assert_eq!("quarter".parse::<OrderRule>().unwrap(), OrderRule::QuarterPower);
        assert_eq!("balanced".parse::<OrderRule>().unwrap(), OrderRule::Balanced);
        assert_eq!("7".parse::<OrderRule>().unwrap(), OrderRule::Constant(7));
        assert_eq!("3, 4,5".parse::<OrderRule>().unwrap(), OrderRule::PerLevel(vec![3, 4, 5]));
        assert!("x".parse::<OrderRule>().is_err());
        assert!("3,x".parse::<OrderRule>().is_err());
    }

    #[test]
    fn scheme_refusals() {
        assert!(build_scheme(2.0, 1000.0, 0.0, 1.0, &OrderRule::default()).is_err());
        assert!(build_scheme(3.0, 1000.0, 1.0, 1.0, &OrderRule::default()).is_err());
        assert!(build_scheme(3.0, 1000.0, 0.0, 0.5, &OrderRule::default()).is_err());
        assert!(build_scheme(3.0, 0.5, 0.0, 1.0, &OrderRule::default()).is_err());
        assert!(build_scheme(3.0, 1000.0, 0.0, 1.0, &OrderRule::Constant(1)).is_err());
        assert!(build_scheme(3.0, 1000.0, 0.0, 1.0, &OrderRule::Constant(2000)).is_err());
        assert!(build_scheme(3.0, 1000.0, 0.0, 1.0, &OrderRule::PerLevel(vec![3, 3])).is_err());
    }

    #[test]
    fn doubling_w_scales_breakpoints() {
        let a = build_scheme(3.0, 1e4, 0.0, 1.0, &OrderRule::Constant(4)).unwrap();
        let b = build_scheme(3.0, 2e4, 0.0, 1.0, &OrderRule::Constant(4)).unwrap();
        let f = 2f64.powf(1.0 / 3.0);
        for (x, y) in a.breakpoints.iter().zip(&b.breakpoints) {
            assert!((y / x - f).abs() < 1e-14);
        }
    }

    #[test]
    fn minimal_partial_sum_closed_form() {
        let s = build_scheme(3.0, 1000.0, 0.0, 1.0, &OrderRule::Constant(2)).unwrap();
        let got = hardy_partial_sum(&s, 0, VaalerKind::Beta, EndpointWeight::Half).unwrap();
        let q = 1.5f64;
        let g = 0.25; // beta_{1,2}
        let root = 10.0f64;
        let term = |l: f64| {
            let amp = 0.5 * g * l.powf(q / 2.0 - 1.0) * (1.0 + l.powf(q)).powf(-1.0 + 0.5 / q);
            let ph = 2.0 * PI * (root * (1.0 + l.powf(q)).powf(1.0 / q) - 0.125);
            Complex64::new(amp * ph.cos(), amp * ph.sin())
        };
        let want = 1000f64.powf(1.0 / 6.0) / 2f64.sqrt() * (term(1.0) + term(2.0));
        assert!((got - want).norm() < 1e-12, "{got} vs {want}");
    }

    #[test]
    fn exp_sum_bounds_and_edge_cases() {
        let s = build_scheme(3.0, 1e4, 0.0, 1.0, &OrderRule::default()).unwrap();
        for j in 0..s.depth {
            for h in 1..s.orders[j] {
                let z = direct_exp_sum(&s, j, h, VaalerKind::Beta).unwrap();
                let g = VaalerApprox::new(s.orders[j], VaalerKind::Beta).unwrap().coeff(h);
                assert!(z.norm() <= g * s.lattice_len(j) as f64 + 1e-12);
                if s.lattice_len(j) == 0 {
                    assert_eq!(z, Complex64::new(0.0, 0.0));
                }
            }
        }
        assert!(direct_exp_sum(&s, 0, 0, VaalerKind::Alpha).is_err());
        assert!(direct_exp_sum(&s, s.depth, 1, VaalerKind::Alpha).is_err());
    }

    #[test]
    fn larger_orders_shrink_lattice_term() {
        let mut last = f64::INFINITY;
        for h in [2u32, 4, 8, 16] {
            let e = theorem2_check(3.0, 1e4, 0.47, &OrderRule::Constant(h), Selectors::default()).unwrap();
            assert!(e.lattice_term < last);
            last = e.lattice_term;
        }
    }
}
