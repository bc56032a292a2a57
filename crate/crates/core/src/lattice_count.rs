//! Exact lattice-point counts for Lamé discs `|n2|^k + |n3|^k <= W` and the
//! bodies `|n1|^(mk) + (|n2|^k + |n3|^k)^m <= x^(mk)`, together with the
//! fractional-part sums that describe the disc discrepancy.
//!
//! With integral exponents every comparison is done on exact integers
//! (`x` is expanded exactly from its binary representation). Otherwise
//! comparisons are made in `f64` and any point whose defining inequality is
//! decided by less than `guard_eps` (relative) is reported as ambiguous.

use std::cmp::Ordering;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::compensated::{pow_gap, NeumaierSum};
use crate::error::{domain, usage, Error, Result};
use crate::exact::{checked_pow, floor_pow, floor_u128, half_power_cmp, integral_exponent, iroot_floor, power_table};
use crate::special_fn::{gamma, lame_area, SeriesConfig};
use crate::vaaler::sawtooth;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BodyParams {
    pub m: f64,
    pub k: f64,
    /// Set for parameters outside `m > 1, k > 2`, admitted only for oracle
    /// comparisons (e.g. the ball `m = 1, k = 2`).
    pub relaxed: bool,
}

impl BodyParams {
    pub fn new(m: f64, k: f64) -> Result<Self> {
        if !(m.is_finite() && k.is_finite()) || !(m > 1.0 && k > 2.0) {
            return Err(domain(format!("body needs m > 1 and k > 2, got m = {m}, k = {k}")));
        }
        Ok(Self { m, k, relaxed: false })
    }

    pub fn relaxed(m: f64, k: f64) -> Result<Self> {
        if !(m.is_finite() && k.is_finite()) || !(m >= 1.0 && k >= 2.0) {
            return Err(domain(format!("relaxed body needs m >= 1 and k >= 2, got m = {m}, k = {k}")));
        }
        Ok(Self { m, k, relaxed: !(m > 1.0 && k > 2.0) })
    }

    /// The exponent `a = mk` of the distinguished coordinate.
    pub fn a(&self) -> f64 {
        self.m * self.k
    }

    /// Both exponents are integers, so counts can be made exactly.
    pub fn exact_mode(&self) -> bool {
        self.int_exponents().is_some()
    }

    pub fn int_exponents(&self) -> Option<(u32, u32)> {
        let m = integral_exponent(self.m)?;
        let k = integral_exponent(self.k)?;
        integral_exponent(self.a())?;
        Some((m, k))
    }

    /// Checks the range in which the asymptotic formula for the count holds:
    /// `m > 1`, `k > 2`, `mk >= 7/3`.
    pub fn require_asymptotic_range(&self) -> Result<()> {
        if self.relaxed {
            return Err(domain("relaxed body parameters are for oracle tests only"));
        }
        if 3.0 * self.a() < 7.0 {
            return Err(domain(format!("asymptotic formula needs mk >= 7/3, got mk = {}", self.a())));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PolicyMode {
    ExactInteger,
    GuardedFloat,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalarPolicy {
    pub mode: PolicyMode,
    /// Relative half-width of the ambiguity band in float comparisons.
    pub guard_eps: f64,
}

pub const DEFAULT_GUARD_EPS: f64 = 1e-9;

impl ScalarPolicy {
    pub fn exact() -> Self {
        Self { mode: PolicyMode::ExactInteger, guard_eps: DEFAULT_GUARD_EPS }
    }

    pub fn guarded(guard_eps: f64) -> Self {
        Self { mode: PolicyMode::GuardedFloat, guard_eps }
    }

    /// Exact when every exponent is integral, guarded float otherwise.
    pub fn auto(exponents: &[f64]) -> Self {
        if exponents.iter().all(|&e| integral_exponent(e).is_some()) {
            Self::exact()
        } else {
            Self::guarded(DEFAULT_GUARD_EPS)
        }
    }

    pub fn for_body(p: &BodyParams) -> Self {
        Self::auto(&[p.m, p.k, p.a()])
    }

    fn check(&self, exponents: &[f64]) -> Result<bool> {
        match self.mode {
            PolicyMode::ExactInteger => {
                if exponents.iter().any(|&e| integral_exponent(e).is_none()) {
                    return Err(usage(format!("exact-integer policy needs integral exponents, got {exponents:?}")));
                }
                Ok(true)
            }
            PolicyMode::GuardedFloat => {
                if !(self.guard_eps > 0.0) {
                    return Err(usage(format!("guard_eps must be positive, got {}", self.guard_eps)));
                }
                Ok(false)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountResult {
    pub count: u64,
    /// Points whose membership fell inside the guard band; must be zero for
    /// the count to be trusted.
    pub ambiguous: u64,
}

impl CountResult {
    pub fn exact(count: u64) -> Self {
        Self { count, ambiguous: 0 }
    }

    /// The count, or an error if any point was ambiguous.
    pub fn certain(self) -> Result<u64> {
        if self.ambiguous > 0 {
            Err(Error::Ambiguous { count: self.ambiguous })
        } else {
            Ok(self.count)
        }
    }
}

impl std::ops::Add for CountResult {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { count: self.count + o.count, ambiguous: self.ambiguous + o.ambiguous }
    }
}

/// A float-valued sum together with the number of undecidable terms.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Flagged {
    pub value: f64,
    pub ambiguous: u64,
}

impl Flagged {
    pub fn certain(self) -> Result<f64> {
        if self.ambiguous > 0 {
            Err(Error::Ambiguous { count: self.ambiguous })
        } else {
            Ok(self.value)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CountMethod {
    Sliced,
    BruteForce,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IkMode {
    /// The finite expression from Euler's summation formula.
    Sum,
    /// The truncated sine series, without its `O(1)` remainder.
    Series,
}

fn check_w(w: f64) -> Result<()> {
    if !w.is_finite() || w < 0.0 {
        return Err(domain(format!("disc parameter must be finite and >= 0, got {w}")));
    }
    Ok(())
}

/// `L_k(w)` for integer `k` and integer bound `w`.
///
/// Walks `n2 = 0, 1, ...` while the top of each column only moves down.
pub fn lame_count_int(k: u32, w: u128) -> Result<u64> {
    let r = iroot_floor(w, k);
    let pw = power_table(r, k)?;
    let mut top = r as usize;
    let mut total: u64 = 0;
    for n2 in 0..=r as usize {
        while pw[n2] + pw[top] > w {
            top -= 1;
        }
        let column = 2 * top as u64 + 1;
        total += if n2 == 0 { column } else { 2 * column };
    }
    Ok(total)
}

#[derive(Clone, Copy, PartialEq)]
enum Verdict {
    Inside,
    Outside,
    Ambiguous,
}

fn classify(slack: f64, tol: f64) -> Verdict {
    if slack > tol {
        Verdict::Inside
    } else if slack < -tol {
        Verdict::Outside
    } else {
        Verdict::Ambiguous
    }
}

/// Membership of `(n2, n3)` in the guarded-float Lamé disc. Points in the
/// guard band are settled exactly when `2k` is an integer.
fn lame_verdict(k: f64, w: f64, tol: f64, n2: f64, n3: f64) -> (Verdict, f64) {
    let s = w - n2.powf(k) - n3.powf(k);
    let v = classify(s, tol);
    if v != Verdict::Ambiguous {
        return (v, s);
    }
    match half_power_cmp(k, n2 as u64, n3 as u64, w) {
        Some(Ordering::Greater) => (Verdict::Outside, s),
        Some(_) => (Verdict::Inside, s),
        None => (Verdict::Ambiguous, s),
    }
}

/// Guarded-float `L_k(w)`. Unresolved boundary points are counted by the
/// sign of the computed slack and tallied separately.
fn lame_count_float(k: f64, w: f64, eps: f64) -> CountResult {
    let tol = eps * w.max(1.0);
    let verdict = |n2: f64, n3: f64| lame_verdict(k, w, tol, n2, n3).0;
    let mut r = w.powf(1.0 / k).floor();
    while verdict(r + 1.0, 0.0) != Verdict::Outside {
        r += 1.0;
    }
    while r > 0.0 && verdict(r, 0.0) == Verdict::Outside {
        r -= 1.0;
    }
    let mut res = CountResult::default();
    if verdict(0.0, 0.0) == Verdict::Outside {
        return res;
    }
    let mut top = r;
    let mut n2 = 0.0;
    while n2 <= r {
        while top > 0.0 && verdict(n2, top) == Verdict::Outside {
            top -= 1.0;
        }
        let mult = if n2 == 0.0 { 1 } else { 2 };
        if verdict(n2, top) == Verdict::Outside {
            n2 += 1.0;
            continue;
        }
        let mut column = 2 * top as u64 + 1;
        // walk down through the unresolved band at the top of the column
        let mut n3 = top;
        loop {
            let (v, s) = lame_verdict(k, w, tol, n2, n3);
            if v != Verdict::Ambiguous {
                break;
            }
            let m3 = if n3 == 0.0 { 1 } else { 2 };
            res.ambiguous += mult * m3;
            if s < 0.0 {
                column -= m3;
            }
            if n3 == 0.0 {
                break;
            }
            n3 -= 1.0;
        }
        res.count += mult * column;
        n2 += 1.0;
    }
    res
}

/// Number of lattice points with `|n2|^k + |n3|^k <= w`.
pub fn lame_count(k: f64, w: f64, policy: &ScalarPolicy) -> Result<CountResult> {
    check_w(w)?;
    if !(k > 0.0) || !k.is_finite() {
        return Err(domain(format!("Lamé exponent must be finite and positive, got {k}")));
    }
    if policy.check(&[k])? {
        let ki = integral_exponent(k).expect("checked");
        Ok(CountResult::exact(lame_count_int(ki, floor_u128(w)?)?))
    } else {
        Ok(lame_count_float(k, w, policy.guard_eps))
    }
}

/// `Delta_k(w) = sum_{(w/2)^(1/k) < n <= w^(1/k)} psi((w - n^k)^(1/k))`.
pub fn delta_k(k: f64, w: f64, policy: &ScalarPolicy) -> Result<Flagged> {
    check_w(w)?;
    if w == 0.0 {
        return Ok(Flagged::default());
    }
    let exact = policy.check(&[k])?;
    let mut acc = NeumaierSum::new();
    let mut ambiguous = 0;
    let nmax = w.powf(1.0 / k).floor() as u64 + 1;
    let mut n = (0.5 * w).powf(1.0 / k).floor().max(0.0) as u64;
    while n <= nmax {
        let nf = n as f64;
        let nk = nf.powf(k);
        // (w/2)^(1/k) < n  <=>  2 n^k > w ;  n <= w^(1/k)  <=>  n^k <= w
        // (w/2)^(1/k) < n <= w^(1/k)  <=>  w < 2 n^k and n^k <= w; for integral
        // n^k both compare exactly against floor(w).
        let in_range = if exact {
            let p = checked_pow(n as u128, integral_exponent(k).unwrap())?;
            let wf = floor_u128(w)?;
            2 * p > wf && p <= wf
        } else {
            // n^k > w/2 and n^k <= w, each settled exactly when possible
            let tol = policy.guard_eps * w.max(1.0);
            let lower = match classify(nk - 0.5 * w, tol) {
                Verdict::Ambiguous => half_power_cmp(k, n, 0, 0.5 * w).map(|o| o == Ordering::Greater),
                v => Some(v == Verdict::Inside),
            };
            let upper = match classify(w - nk, tol) {
                Verdict::Ambiguous => half_power_cmp(k, n, 0, w).map(|o| o != Ordering::Greater),
                v => Some(v == Verdict::Inside),
            };
            if lower.is_none() || upper.is_none() {
                ambiguous += 1;
            }
            lower.unwrap_or(2.0 * nk > w) && upper.unwrap_or(nk <= w)
        };
        if !in_range {
            n += 1;
            continue;
        }
        let d = w - nk;
        let root = d.powf(1.0 / k);
        let value = if exact {
            let ki = integral_exponent(k).unwrap();
            let dint = floor_u128(d)?;
            let c = iroot_floor(dint, ki);
            if d.fract() == 0.0 && checked_pow(c, ki)? == dint {
                -0.5
            } else {
                let f = (root - c as f64).clamp(0.0, 1.0 - f64::EPSILON);
                f - 0.5
            }
        } else {
            let near = root.round();
            if (root - near).abs() <= policy.guard_eps * root.max(1.0) {
                // the root sits at a jump of psi: n^k + c^k against w decides the side
                match half_power_cmp(k, n, near as u64, w) {
                    Some(Ordering::Equal) => -0.5,
                    Some(Ordering::Less) => (root - near).max(0.0) - 0.5,
                    Some(Ordering::Greater) => 0.5 - (near - root).max(0.0),
                    None => {
                        ambiguous += 1;
                        sawtooth(root)
                    }
                }
            } else {
                sawtooth(root)
            }
        };
        acc.add(value);
        n += 1;
    }
    Ok(Flagged { value: acc.sum(), ambiguous })
}

/// `I_k(w)`.
///
/// `Sum`: `(1/2) sum_{|n|^k <= w} (w - |n|^k)^(1/k) - (a_k/4) w^(2/k)`.
/// `Series`: `(1/pi) (k/2pi)^(1/k) Gamma(1+1/k) w^(1/k - 1/k^2)
///            sum_{j <= n_max} j^(-1-1/k) sin(2 pi j w^(1/k) - pi/(2k))`.
pub fn i_k(k: f64, w: f64, policy: &ScalarPolicy, cfg: &SeriesConfig, mode: IkMode) -> Result<f64> {
    if !(w > 0.0) || !w.is_finite() {
        return Err(domain(format!("I_k needs finite w > 0, got {w}")));
    }
    let ak = lame_area(k)?;
    match mode {
        IkMode::Sum => {
            let exact = policy.check(&[k])?;
            let r = if exact {
                iroot_floor(floor_u128(w)?, integral_exponent(k).unwrap()) as u64
            } else {
                let mut r = w.powf(1.0 / k).floor();
                while (r + 1.0).powf(k) <= w {
                    r += 1.0;
                }
                while r > 0.0 && r.powf(k) > w {
                    r -= 1.0;
                }
                r as u64
            };
            let mut acc = NeumaierSum::new();
            acc.add(0.5 * w.powf(1.0 / k));
            for n in 1..=r {
                let d = (w - (n as f64).powf(k)).max(0.0);
                acc.add(d.powf(1.0 / k));
            }
            acc.add(-0.25 * ak * w.powf(2.0 / k));
            Ok(acc.sum())
        }
        IkMode::Series => {
            let root = w.powf(1.0 / k);
            let amp = (k / (2.0 * PI)).powf(1.0 / k) * gamma(1.0 + 1.0 / k) * w.powf(1.0 / k - 1.0 / (k * k)) / PI;
            let mut acc = NeumaierSum::new();
            for j in 1..=cfg.n_max {
                let jf = j as f64;
                let turns = crate::compensated::frac_of_product(jf, root);
                acc.add(jf.powf(-1.0 - 1.0 / k) * (2.0 * PI * turns - PI / (2.0 * k)).sin());
            }
            Ok(amp * acc.sum())
        }
    }
}

/// `L_k(w) - a_k w^(2/k) - 8 I_k(w) + 8 Delta_k(w)`, which stays bounded in `w`.
pub fn slice_identity_residual(k: f64, w: f64, policy: &ScalarPolicy) -> Result<f64> {
    if !(w > 0.0) {
        return Err(domain(format!("slice identity needs w > 0, got {w}")));
    }
    let l = lame_count(k, w, policy)?.certain()? as f64;
    let ik = i_k(k, w, policy, &SeriesConfig::default(), IkMode::Sum)?;
    let dk = delta_k(k, w, policy)?.certain()?;
    Ok(l - lame_area(k)? * w.powf(2.0 / k) - 8.0 * ik + 8.0 * dk)
}

fn check_x(x: f64) -> Result<()> {
    if !x.is_finite() || x < 0.0 {
        return Err(domain(format!("dilation x must be finite and >= 0, got {x}")));
    }
    Ok(())
}

/// `A_{m,k}(x)`, the number of integer triples in `x B_{m,k}`.
pub fn count_a(p: &BodyParams, x: f64, policy: &ScalarPolicy, method: CountMethod) -> Result<CountResult> {
    check_x(x)?;
    let exact = policy.check(&[p.m, p.k, p.a()])?;
    match (exact, method) {
        (true, CountMethod::Sliced) => count_sliced_exact(p, x),
        (true, CountMethod::BruteForce) => count_brute_exact(p, x),
        (false, CountMethod::Sliced) => Ok(count_sliced_float(p, x, policy.guard_eps)),
        (false, CountMethod::BruteForce) => Ok(count_brute_float(p, x, policy.guard_eps)),
    }
}

fn count_sliced_exact(p: &BodyParams, x: f64) -> Result<CountResult> {
    let (m, k) = p.int_exponents().expect("checked");
    let a = m * k;
    let t = floor_pow(x, a)?;
    let xmax = iroot_floor(t, a);
    let pa = power_table(xmax, a)?;
    let slices: Vec<u64> = (0..=xmax as usize)
        .into_par_iter()
        .map(|n1| {
            let w = iroot_floor(t - pa[n1], m);
            lame_count_int(k, w).map(|l| if n1 == 0 { l } else { 2 * l })
        })
        .collect::<Result<_>>()?;
    Ok(CountResult::exact(slices.iter().sum()))
}

fn count_brute_exact(p: &BodyParams, x: f64) -> Result<CountResult> {
    let (m, k) = p.int_exponents().expect("checked");
    let a = m * k;
    let t = floor_pow(x, a)?;
    let r = x.floor() as i64;
    let mut count = 0u64;
    for n1 in -r..=r {
        let q1 = checked_pow(n1.unsigned_abs() as u128, a)?;
        for n2 in -r..=r {
            let q2 = checked_pow(n2.unsigned_abs() as u128, k)?;
            for n3 in -r..=r {
                let q3 = checked_pow(n3.unsigned_abs() as u128, k)?;
                let Some(inner) = (q2 + q3).checked_pow(m) else { continue };
                if q1.checked_add(inner).is_some_and(|s| s <= t) {
                    count += 1;
                }
            }
        }
    }
    Ok(CountResult::exact(count))
}

fn count_sliced_float(p: &BodyParams, x: f64, eps: f64) -> CountResult {
    let a = p.a();
    let r = x.floor() as u64;
    let slices: Vec<CountResult> = (0..=r)
        .into_par_iter()
        .map(|n1| {
            let w = pow_gap(x, n1 as f64, a).max(0.0).powf(1.0 / p.m);
            let c = lame_count_float(p.k, w, eps);
            if n1 == 0 { c } else { c + c }
        })
        .collect();
    slices.into_iter().fold(CountResult::default(), |s, c| s + c)
}

fn count_brute_float(p: &BodyParams, x: f64, eps: f64) -> CountResult {
    let a = p.a();
    let t = x.powf(a);
    let tol = eps * t.max(1.0);
    let r = x.floor() as i64;
    let mut res = CountResult::default();
    for n1 in -r..=r {
        for n2 in -r..=r {
            for n3 in -r..=r {
                let lhs = (n1.abs() as f64).powf(a)
                    + ((n2.abs() as f64).powf(p.k) + (n3.abs() as f64).powf(p.k)).powf(p.m);
                let s = t - lhs;
                match classify(s, tol) {
                    Verdict::Inside => res.count += 1,
                    Verdict::Outside => {}
                    Verdict::Ambiguous => {
                        res.ambiguous += 1;
                        if s >= 0.0 {
                            res.count += 1;
                        }
                    }
                }
            }
        }
    }
    res
}

/// `r_{m,k}(n)`: the number of integer triples with
/// `|n1|^(mk) + (|n2|^k + |n3|^k)^m = n`.
pub fn r_count(p: &BodyParams, n: u128) -> Result<u64> {
    let (m, k) = p
        .int_exponents()
        .ok_or_else(|| usage(format!("r_count needs integral exponents, got m = {}, k = {}", p.m, p.k)))?;
    let a = m * k;
    let mut total = 0u64;
    for n1 in 0..=iroot_floor(n, a) {
        let rest = n - checked_pow(n1, a)?;
        let s = iroot_floor(rest, m);
        if checked_pow(s, m)? != rest {
            continue;
        }
        let mut reps = 0u64;
        for n2 in 0..=iroot_floor(s, k) {
            let left = s - checked_pow(n2, k)?;
            let n3 = iroot_floor(left, k);
            if checked_pow(n3, k)? == left {
                reps += if n2 == 0 { 1 } else { 2 } * if n3 == 0 { 1 } else { 2 };
            }
        }
        total += if n1 == 0 { reps } else { 2 * reps };
    }
    Ok(total)
}

/// `S(x) = sum ((x^(mk) - |n3|^(mk))^(1/m) - |n2|^k)^(1/k)` over integer pairs
/// with `|n2|^(mk) + |n3|^(mk) <= x^(mk)`.
///
/// Rows are evaluated in parallel and added in ascending `n3` order, so the
/// result does not depend on the number of workers.
pub fn s_sum(p: &BodyParams, x: f64, policy: &ScalarPolicy) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(format!("S(x) needs finite x > 0, got {x}")));
    }
    let exact = policy.check(&[p.m, p.k, p.a()])?;
    let a = p.a();
    let (m, k) = (p.m, p.k);
    // exact bound on |n2| per row, from integer comparisons
    let bounds: Option<(u128, Vec<u128>)> = if exact {
        let ai = integral_exponent(a).unwrap();
        let t = floor_pow(x, ai)?;
        let r = iroot_floor(t, ai);
        Some((t, power_table(r, ai)?))
    } else {
        None
    };
    let r = x.floor() as u64;
    let rows: Vec<f64> = (0..=r)
        .into_par_iter()
        .map(|n3| {
            let gap = pow_gap(x, n3 as f64, a).max(0.0);
            let v = gap.powf(1.0 / m);
            let n2max = match &bounds {
                Some((t, pa)) => {
                    if n3 as usize >= pa.len() {
                        return 0.0;
                    }
                    iroot_floor(t - pa[n3 as usize], integral_exponent(a).unwrap()) as u64
                }
                None => {
                    let mut q = v.powf(1.0 / k).floor();
                    while q > 0.0 && q.powf(k) > v {
                        q -= 1.0;
                    }
                    q as u64
                }
            };
            let mut acc = NeumaierSum::new();
            acc.add(v.powf(1.0 / k));
            for n2 in 1..=n2max {
                let d = (v - (n2 as f64).powf(k)).max(0.0);
                acc.add(2.0 * d.powf(1.0 / k));
            }
            let row = acc.sum();
            if n3 == 0 { row } else { 2.0 * row }
        })
        .collect();
    Ok(crate::compensated::sum(rows))
}
