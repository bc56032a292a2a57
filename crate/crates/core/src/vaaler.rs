//! Vaaler's trigonometric approximation of the sawtooth `psi(w) = w - [w] - 1/2`.
//!
//! For an integer `H > 1`,
//!
//! ```text
//! psi_H(w)  = - sum_{0<h<H} alpha_{h,H} sin(2 pi h w),   alpha_{h,H} = rho(h/H) / (pi h)
//! psi*_H(w) =   sum_{0<h<H} beta_{h,H}  cos(2 pi h w),   beta_{h,H}  = (1/H) (1 - h/H)
//! ```
//!
//! with `rho(xi) = pi xi (1 - xi) cot(pi xi) + xi`, and
//! `|psi(w) - psi_H(w)| <= psi*_H(w) + 1/(2H)` for every real `w`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::compensated::{frac_of_product, NeumaierSum};
use crate::error::{domain, usage, Result};

/// Centered fractional part, in `[-1/2, 1/2)`.
pub fn sawtooth(w: f64) -> f64 {
    let f = w - w.floor();
    // w - floor(w) rounds up to 1.0 for tiny negative w
    if f >= 1.0 { -0.5 } else { f - 0.5 }
}

/// `1 - z cot z` for small `z`, from its Taylor series.
fn one_minus_z_cot_z(z: f64) -> f64 {
    let z2 = z * z;
    z2 * (1.0 / 3.0 + z2 * (1.0 / 45.0 + z2 * (2.0 / 945.0 + z2 * (1.0 / 4725.0))))
}

const ENDPOINT_BAND: f64 = 1e-3;

pub fn rho(xi: f64) -> Result<f64> {
    if !(xi > 0.0 && xi < 1.0) {
        return Err(domain(format!("rho needs 0 < xi < 1, got {xi}")));
    }
    Ok(if xi < ENDPOINT_BAND {
        (1.0 - xi) * (1.0 - one_minus_z_cot_z(PI * xi)) + xi
    } else if xi >= 0.5 {
        // cot(pi xi) = -cot(pi eta), and eta = 1 - xi is exact here
        let z = PI * (1.0 - xi);
        if z < PI * ENDPOINT_BAND {
            xi * one_minus_z_cot_z(z)
        } else {
            xi * (1.0 - z / z.tan())
        }
    } else {
        PI * xi * (1.0 - xi) / (PI * xi).tan() + xi
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VaalerKind {
    /// `alpha` coefficients: the sine polynomial `psi_H`.
    Alpha,
    /// `beta` coefficients: the cosine majorant `psi*_H`.
    Beta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VaalerApprox {
    order: u32,
    kind: VaalerKind,
    coeffs: Vec<f64>,
}

impl VaalerApprox {
    pub fn new(order: u32, kind: VaalerKind) -> Result<Self> {
        if order < 2 {
            return Err(usage(format!("Vaaler order must be at least 2, got {order}")));
        }
        let hf = order as f64;
        let coeffs = (1..order)
            .map(|h| {
                let h = h as f64;
                match kind {
                    VaalerKind::Alpha => rho(h / hf).expect("h/H in (0,1)") / (PI * h),
                    VaalerKind::Beta => (1.0 - h / hf) / hf,
                }
            })
            .collect();
        Ok(Self { order, kind, coeffs })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn kind(&self) -> VaalerKind {
        self.kind
    }

    /// Coefficients for `h = 1, ..., H - 1`.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of harmonic `h` (`1 <= h < H`).
    pub fn coeff(&self, h: u32) -> f64 {
        self.coeffs[(h - 1) as usize]
    }

    pub fn eval(&self, w: f64) -> f64 {
        let mut acc = NeumaierSum::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            let turns = frac_of_product((i + 1) as f64, w);
            match self.kind {
                VaalerKind::Alpha => acc.add(-c * (TAU * turns).sin()),
                VaalerKind::Beta => acc.add(c * (TAU * turns).cos()),
            }
        }
        acc.sum()
    }
}

pub fn build_vaaler(order: u32, kind: VaalerKind) -> Result<VaalerApprox> {
    VaalerApprox::new(order, kind)
}

pub fn vaaler_eval(v: &VaalerApprox, w: f64) -> f64 {
    v.eval(w)
}

/// Outcome of checking the two-sided bound on a sample of points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub order: u32,
    pub samples: usize,
    pub violations: usize,
    /// Largest value of `|psi - psi_H| - psi*_H - 1/(2H)` seen.
    pub worst_excess: f64,
}

/// Checks `|psi(w) - psi_H(w)| <= psi*_H(w) + 1/(2H) + slack` at each `w`.
pub fn check_bound(order: u32, points: &[f64], slack: f64) -> Result<BoundCheck> {
    let alpha = VaalerApprox::new(order, VaalerKind::Alpha)?;
    let beta = VaalerApprox::new(order, VaalerKind::Beta)?;
    let half_inv = 0.5 / order as f64;
    let mut violations = 0;
    let mut worst = f64::NEG_INFINITY;
    for &w in points {
        let excess = (sawtooth(w) - alpha.eval(w)).abs() - beta.eval(w) - half_inv;
        worst = worst.max(excess);
        if excess > slack {
            violations += 1;
        }
    }
    Ok(BoundCheck { order, samples: points.len(), violations, worst_excess: worst })
}
