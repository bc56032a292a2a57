//! Discrepancy of `A_{m,k}(x)` against the volume and the two flat-point
//! main terms, the remainder-exponent classifier, and power-law fits over
//! sweeps.

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, usage, Error, Result};
use crate::lattice_count::{count_a, s_sum, BodyParams, CountMethod, ScalarPolicy};
use crate::special_fn::{amplitude_first, amplitude_second, body_volume, main_term, MainTermKind, MainTermParams, Mode, SeriesConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyRecord {
    pub x: f64,
    #[serde(rename = "A")]
    pub a: u64,
    pub vol_term: f64,
    #[serde(rename = "H1")]
    pub h1: f64,
    #[serde(rename = "H2")]
    pub h2: f64,
    /// `A - vol_term`.
    #[serde(rename = "P")]
    pub p: f64,
    /// `P - H1 - H2`.
    #[serde(rename = "R")]
    pub r: f64,
    /// Bound on the part of `H1 + H2` lost by truncating the sine series.
    pub h_tail_bound: f64,
}

impl DiscrepancyRecord {
    pub fn from_parts(x: f64, a: u64, vol_term: f64, h1: f64, h2: f64, h_tail_bound: f64) -> Self {
        let p = a as f64 - vol_term;
        let r = p - h1 - h2;
        Self { x, a, vol_term, h1, h2, p, r, h_tail_bound }
    }
}

/// Truncation bound `C_1 x^(2-2/a) (a/2) N^(-2/a) + C_2 x^(2-e) N^(-e) / e`,
/// `e = 1/a + 1/b`.
fn main_term_tail(mp: MainTermParams, x: f64, n_max: usize) -> f64 {
    if n_max == 0 {
        return f64::INFINITY;
    }
    let n = n_max as f64;
    let (a, b) = (mp.a, mp.b);
    let e = 1.0 / a + 1.0 / b;
    amplitude_first(mp) * x.powf(2.0 - 2.0 / a) * 0.5 * a * n.powf(-2.0 / a)
        + amplitude_second(mp) * x.powf(2.0 - e) * n.powf(-e) / e
}

pub fn discrepancy_record(p: &BodyParams, x: f64, policy: &ScalarPolicy, cfg: &SeriesConfig) -> Result<DiscrepancyRecord> {
    p.require_asymptotic_range()?;
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(format!("discrepancy needs finite x > 0, got {x}")));
    }
    let a = count_a(p, x, policy, CountMethod::Sliced)?.certain()?;
    let vol = body_volume(p)?;
    let mp = MainTermParams::for_body(p)?;
    let h1 = main_term(mp, x, MainTermKind::First, Mode::Asymptotic, cfg)?;
    let h2 = main_term(mp, x, MainTermKind::Second, Mode::Asymptotic, cfg)?;
    Ok(DiscrepancyRecord::from_parts(x, a, vol * x * x * x, h1, h2, main_term_tail(mp, x, cfg.n_max)))
}

/// Rows for each `x` of a strictly increasing positive grid, in grid order.
pub fn sweep(p: &BodyParams, grid: &[f64], policy: &ScalarPolicy, cfg: &SeriesConfig) -> Result<Vec<DiscrepancyRecord>> {
    validate_grid(grid)?;
    grid.par_iter()
        .map(|&x| discrepancy_record(p, x, policy, cfg).map_err(|e| Error::Row { x, source: Box::new(e) }))
        .collect()
}

pub fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(usage("grid is empty"));
    }
    if let Some(&x) = grid.iter().find(|x| !(**x > 0.0) || !x.is_finite()) {
        return Err(usage(format!("grid points must be finite and positive, got {x}")));
    }
    if let Some(w) = grid.windows(2).find(|w| w[1] <= w[0]) {
        return Err(usage(format!("grid must be strictly increasing, got {} then {}", w[0], w[1])));
    }
    Ok(())
}

/// `S(x) - vol x^3 / 2 - H1 / 2 - H2 / 4`.
pub fn proposition_check(p: &BodyParams, x: f64, policy: &ScalarPolicy, cfg: &SeriesConfig) -> Result<f64> {
    p.require_asymptotic_range()?;
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(format!("proposition check needs finite x > 0, got {x}")));
    }
    let s = s_sum(p, x, policy)?;
    let vol = body_volume(p)?;
    let mp = MainTermParams::for_body(p)?;
    let h1 = main_term(mp, x, MainTermKind::First, Mode::Asymptotic, cfg)?;
    let h2 = main_term(mp, x, MainTermKind::Second, Mode::Asymptotic, cfg)?;
    Ok(s - 0.5 * vol * x * x * x - 0.5 * h1 - 0.25 * h2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentVerdict {
    pub case_id: u8,
    pub exponent: f64,
    pub log_power: f64,
}

fn rational(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite")
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// The predicted order of the remainder `R_{m,k}(x)`: `x^exponent (log x)^log_power`.
///
/// Case boundaries are compared exactly on the binary values of `m`, `k`.
pub fn classify_exponent(p: &BodyParams) -> Result<ExponentVerdict> {
    let (m, k) = (p.m, p.k);
    if !(m > 1.0 && k > 2.0) || p.relaxed {
        return Err(domain(format!("classifier needs m > 1 and k > 2, got m = {m}, k = {k}")));
    }
    let (mr, kr) = (rational(m), rational(k));
    let mk = &mr * &kr;
    if mk < ratio(7, 3) {
        return Err(domain(format!("classifier needs mk >= 7/3, got mk = {}", m * k)));
    }
    let k_small = kr < ratio(5875, 779);
    let mk_small = mk < ratio(6550, 779);
    let m_small = mr < ratio(262, 235);
    let a = m * k;
    let verdict = if k_small && mk_small {
        ExponentVerdict { case_id: 1, exponent: 37.0 / 25.0, log_power: 0.0 }
    } else if !mk_small && !m_small {
        ExponentVerdict {
            case_id: 2,
            exponent: 339.0 / 208.0 - 131.0 / (104.0 * a),
            log_power: (18627.0 * a - 20614.0) / (8320.0 * a),
        }
    } else if !k_small && m_small {
        ExponentVerdict {
            case_id: 3,
            exponent: 339.0 / 208.0 - 235.0 / (208.0 * k),
            log_power: 18627.0 / 8320.0 * (1.0 - 1.0 / k),
        }
    } else {
        unreachable!("the three cases cover m > 1, k > 2")
    };
    Ok(verdict)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Field {
    P,
    R,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub used: usize,
    /// Rows dropped because `|field| < 1e-9`.
    pub dropped: usize,
}

pub const MIN_FIT_ROWS: usize = 10;
const ZERO_CUTOFF: f64 = 1e-9;

/// Least-squares slope of `log|y|` against `log x`.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<FitResult> {
    if points.len() < MIN_FIT_ROWS {
        return Err(usage(format!("power-law fit needs at least {MIN_FIT_ROWS} rows, got {}", points.len())));
    }
    let (lo, hi) = points.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &(x, _)| (lo.min(x), hi.max(x)));
    if !(lo > 0.0) || hi / lo < 10.0 {
        return Err(usage(format!("power-law fit needs x spanning a decade, got [{lo}, {hi}]")));
    }
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, y)| y.abs() >= ZERO_CUTOFF)
        .map(|&(x, y)| (x.ln(), y.abs().ln()))
        .collect();
    let dropped = points.len() - usable.len();
    if usable.len() < MIN_FIT_ROWS {
        return Err(usage(format!("only {} usable rows after dropping {dropped} zero crossings", usable.len())));
    }
    let n = usable.len() as f64;
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / n;
    let my = usable.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = usable.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let slope = sxy / sxx;
    Ok(FitResult { slope, intercept: my - slope * mx, used: usable.len(), dropped })
}

pub fn fit_exponent(records: &[DiscrepancyRecord], field: Field) -> Result<FitResult> {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .map(|r| (r.x, match field {
            Field::P => r.p,
            Field::R => r.r,
        }))
        .collect();
    fit_power_law(&pts)
}

pub fn rms(values: impl IntoIterator<Item = f64>) -> f64 {
    let (s, n) = values.into_iter().fold((0.0, 0usize), |(s, n), v| (s + v * v, n + 1));
    (s / n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classifier_examples() {
        let v = classify_exponent(&BodyParams::new(1.5, 3.0).unwrap()).unwrap();
        assert_eq!(v.case_id, 1);
        assert_eq!(v.exponent, 1.48);
        assert_eq!(v.log_power, 0.0);
        let v = classify_exponent(&BodyParams::new(1.2, 8.0).unwrap()).unwrap();
        assert_eq!(v.case_id, 2);
        assert!((v.exponent - (339.0 / 208.0 - 131.0 / 998.4)).abs() < 1e-15);
        let v = classify_exponent(&BodyParams::new(1.05, 8.0).unwrap()).unwrap();
        assert_eq!(v.case_id, 3);
        assert!((v.exponent - (339.0 / 208.0 - 235.0 / 1664.0)).abs() < 1e-15);
        assert!((v.log_power - 18627.0 / 8320.0 * 7.0 / 8.0).abs() < 1e-15);
    }

    #[test]
    fn classifier_rejects_outside_range() {
        assert!(classify_exponent(&BodyParams::new(1.05, 2.1).unwrap()).is_err()); // mk < 7/3
        assert!(classify_exponent(&BodyParams::relaxed(1.0, 3.0).unwrap()).is_err());
    }

    #[test]
    fn grid_validation() {
        assert!(validate_grid(&[1.0, 2.0, 3.0]).is_ok());
        assert!(matches!(validate_grid(&[3.0, 2.0]), Err(Error::Usage(_))));
        assert!(validate_grid(&[1.0, 1.0]).is_err());
        assert!(validate_grid(&[0.0, 1.0]).is_err());
        assert!(validate_grid(&[]).is_err());
    }

    #[test]
    fn record_identities() {
        let p = BodyParams::new(2.0, 3.0).unwrap();
        let r = discrepancy_record(&p, 2.0, &ScalarPolicy::exact(), &SeriesConfig::default()).unwrap();
        assert_eq!(r.a, 33);
        assert_eq!(r.p, 33.0 - r.vol_term);
        assert_eq!(r.r, r.p - r.h1 - r.h2);
        assert!((r.r + r.h1 + r.h2 + r.vol_term - 33.0).abs() < 1e-12);
        assert!(discrepancy_record(&p, 0.0, &ScalarPolicy::exact(), &SeriesConfig::default()).is_err());
    }

    #[test]
    fn fit_exact_power_law() {
        let pts: Vec<(f64, f64)> = (0..20).map(|i| {
            let x = 10f64.powf(1.0 + i as f64 / 10.0);
            (x, x.powf(1.5))
        }).collect();
        let f = fit_power_law(&pts).unwrap();
        assert!((f.slope - 1.5).abs() < 1e-9);
        assert_eq!(f.dropped, 0);
    }

    #[test]
    fn fit_drops_zero_crossings_and_uses_magnitudes() {
        let mut pts: Vec<(f64, f64)> = (0..20).map(|i| {
            let x = 10f64.powf(1.0 + i as f64 / 10.0);
            let s = if i % 2 == 0 { 1.0 } else { -1.0 };
            (x, s * 3.0 * x * x)
        }).collect();
        pts[4].1 = 0.0;
        pts[7].1 = 1e-12;
        let f = fit_power_law(&pts).unwrap();
        assert_eq!(f.dropped, 2);
        assert_eq!(f.used, 18);
        assert!((f.slope - 2.0).abs() < 1e-9);
    }

    #[test]
    fn fit_refusals() {
        let short: Vec<(f64, f64)> = (1..9).map(|i| (i as f64 * 10.0, 1.0)).collect();
        assert!(fit_power_law(&short).is_err());
        let narrow: Vec<(f64, f64)> = (0..12).map(|i| (10.0 + i as f64, 1.0)).collect();
        assert!(fit_power_law(&narrow).is_err());
        let zeros: Vec<(f64, f64)> = (0..12).map(|i| (10f64.powf(i as f64 / 5.0), 0.0)).collect();
        assert!(fit_power_law(&zeros).is_err());
    }
}
