//! Error-free transformations and compensated accumulation.
//!
//! Phases such as `W^(1/k) * (h^q + l^q)^(1/q)` grow to a few times `10^5`
//! before they are reduced modulo one, so the rounding error of the product is
//! carried separately and folded back in after the integer part is removed.

use std::f64::consts::TAU;

/// `a + b = s + e` exactly.
#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// `a * b = p + e` exactly (barring overflow).
#[inline]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

/// Fractional part of `a * b` in `[0, 1)`, with the product's rounding error
/// restored after the integer part has been removed.
#[inline]
pub fn frac_of_product(a: f64, b: f64) -> f64 {
    let (p, e) = two_prod(a, b);
    let r = (p - p.floor()) + e;
    r - r.floor()
}

/// `e(t) = exp(2 pi i t)` for a phase already reduced to a small range.
#[inline]
pub fn unit_phase(t: f64) -> (f64, f64) {
    let (s, c) = (TAU * t).sin_cos();
    (c, s)
}

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct NeumaierSum {
    s: f64,
    c: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.s + x;
        if self.s.abs() >= x.abs() {
            self.c += (self.s - t) + x;
        } else {
            self.c += (x - t) + self.s;
        }
        self.s = t;
    }

    pub fn sum(&self) -> f64 {
        self.s + self.c
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of a sequence, in iteration order.
pub fn sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<NeumaierSum>().sum()
}

/// Compensated complex accumulator.
#[derive(Debug, Default, Clone, Copy)]
pub struct ComplexSum {
    re: NeumaierSum,
    im: NeumaierSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, re: f64, im: f64) {
        self.re.add(re);
        self.im.add(im);
    }

    pub fn value(&self) -> (f64, f64) {
        (self.re.sum(), self.im.sum())
    }
}

/// `x^a - n^a` for `0 <= n <= x`, accurate in relative terms even when `n`
/// is close to `x`.
pub fn pow_gap(x: f64, n: f64, a: f64) -> f64 {
    debug_assert!(n >= 0.0 && n <= x);
    if n == 0.0 {
        return x.powf(a);
    }
    let rel = (n - x) / x;
    -x.powf(a) * (a * rel.ln_1p()).exp_m1()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_recovers_cancelled_terms() {
        let xs = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(sum(xs), 2.0);
    }

    #[test]
    fn frac_of_product_keeps_low_bits() {
        // 0.1 * 3e5 has a representation error that naive floor() discards.
        let a = 0.1;
        let b = 3.0e5;
        let f = frac_of_product(a, b);
        assert!(f < 1e-10 || f > 1.0 - 1e-10);
        let f = frac_of_product(1.25, 3.0);
        assert_eq!(f, 0.75);
    }

    #[test]
    fn pow_gap_near_equal_arguments() {
        let x = 1000.0;
        let n = 999.0;
        let exact = 1000f64.powi(6) - 999f64.powi(6);
        let got = pow_gap(x, n, 6.0);
        assert!((got - exact).abs() / exact < 1e-13);
        assert_eq!(pow_gap(2.0, 0.0, 3.0), 8.0);
        assert_eq!(pow_gap(2.0, 2.0, 3.0), 0.0);
    }
}
