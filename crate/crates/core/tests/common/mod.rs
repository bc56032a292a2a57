//! Independent reference implementations used by the integration tests.
//! None of these call into the library's numerics.

#![allow(dead_code)]

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Triple loop over the cube `[-x, x]^3` with integer exponents `m`, `k`.
/// `|u1|^(mk) + (|u2|^k + |u3|^k)^m <= x^(mk)` for integer `x`.
pub fn brute_count(m: u32, k: u32, x: u64) -> u64 {
    let mk = m * k;
    let rhs = (x as u128).pow(mk);
    let r = x as i64;
    let mut count = 0;
    for u1 in -r..=r {
        let a = (u1.unsigned_abs() as u128).pow(mk);
        for u2 in -r..=r {
            let b = (u2.unsigned_abs() as u128).pow(k);
            for u3 in -r..=r {
                let c = (u3.unsigned_abs() as u128).pow(k);
                if a + (b + c).pow(m) <= rhs {
                    count += 1;
                }
            }
        }
    }
    count
}

/// Points of the Lamé disc `|u|^k + |v|^k <= w` by a square loop.
pub fn brute_lame(k: u32, w: u64) -> u64 {
    let mut r = 0u64;
    while (r + 1).pow(k) <= w {
        r += 1;
    }
    let r = r as i64;
    let mut count = 0;
    for u in -r..=r {
        for v in -r..=r {
            if u.unsigned_abs().pow(k) + v.unsigned_abs().pow(k) <= w {
                count += 1;
            }
        }
    }
    count
}

pub fn psi(w: f64) -> f64 {
    w - w.floor() - 0.5
}

/// Lanczos gamma (g = 7, n = 9), kept separate from the library's gamma.
pub fn gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut a = C[0];
    let t = x + G + 0.5;
    for (i, c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

/// Classical `J_nu(x)` for `nu` in {1/2, 1, 3/2}: the power series for
/// `x <= 12`, closed forms for the half-integer orders and the libm
/// routine for `nu = 1` beyond that.
pub fn bessel_j(nu: f64, x: f64) -> f64 {
    if x <= 12.0 {
        let h = 0.5 * x;
        let mut term = h.powf(nu) / gamma(nu + 1.0);
        let mut sum = term;
        for j in 1..200 {
            let jf = j as f64;
            term *= -h * h / (jf * (jf + nu));
            sum += term;
            if term.abs() < 1e-18 * sum.abs().max(1e-300) {
                break;
            }
        }
        return sum;
    }
    let s = (2.0 / (PI * x)).sqrt();
    if nu == 0.5 {
        s * x.sin()
    } else if nu == 1.5 {
        s * (x.sin() / x - x.cos())
    } else if nu == 1.0 {
        libm::j1(x)
    } else {
        panic!("no reference for nu = {nu}")
    }
}

/// Monte-Carlo volume of `|u1|^(mk) + (|u2|^k + |u3|^k)^m <= 1`.
pub fn mc_volume(m: f64, k: f64, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0usize;
    for _ in 0..samples {
        let u1: f64 = rng.random();
        let u2: f64 = rng.random();
        let u3: f64 = rng.random();
        if u1.powf(m * k) + (u2.powf(k) + u3.powf(k)).powf(m) <= 1.0 {
            hits += 1;
        }
    }
    8.0 * hits as f64 / samples as f64
}

/// Composite Simpson rule on `n` (even) panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Lamé-disc area `|u|^k + |v|^k <= 1` by Simpson's rule after the
/// substitution `u = 1 - s^2`, which removes the endpoint root singularity.
pub fn lame_area_quadrature(k: f64) -> f64 {
    let f = |s: f64| {
        let u = 1.0 - s * s;
        (1.0 - u.powf(k)).max(0.0).powf(1.0 / k) * 2.0 * s
    };
    4.0 * simpson(f, 0.0, 1.0, 20_000)
}

/// Volume of the body by nested quadrature: for each `u1`, the slice is a
/// Lamé disc of radius `(1 - u1^(mk))^(1/(mk))`.
pub fn volume_quadrature(m: f64, k: f64) -> f64 {
    let disc = lame_area_quadrature(k);
    let a = m * k;
    let f = |s: f64| {
        let u = 1.0 - s * s;
        (1.0 - u.powf(a)).max(0.0).powf(2.0 / a) * 2.0 * s
    };
    2.0 * disc * simpson(f, 0.0, 1.0, 20_000)
}

/// `S(x)` for integer exponents by a plain double loop.
pub fn s_sum_loop(m: f64, k: f64, x: f64) -> f64 {
    let a = m * k;
    let r = x.floor() as i64;
    let mut s = 0.0;
    for n3 in -r..=r {
        for n2 in -r..=r {
            let t3 = (n3.abs() as f64).powf(a);
            let t2 = (n2.abs() as f64).powf(a);
            if t2 + t3 <= x.powf(a) {
                let v = (x.powf(a) - t3).powf(1.0 / m) - (n2.abs() as f64).powf(k);
                s += v.max(0.0).powf(1.0 / k);
            }
        }
    }
    s
}

/// Transformed sum at level `j`, written as a literal double loop in the
/// natural order with plain `exp(i theta)` and no compensated arithmetic.
pub fn naive_hardy_sum(k: f64, w: f64, j: usize, order: u32, coeff: impl Fn(u32) -> f64) -> (f64, f64) {
    let q = k / (k - 1.0);
    let root = w.powf(1.0 / k);
    let scale = w.powf(1.0 / (2.0 * k)) / (k - 1.0).sqrt();
    let (mut re, mut im) = (0.0, 0.0);
    for h in 1..order {
        let hf = h as f64;
        let lo = (1u64 << j) * h as u64;
        let hi = 2 * lo;
        for l in lo..=hi {
            let lf = l as f64;
            let wgt = if l == lo || l == hi { 0.5 } else { 1.0 };
            let amp = coeff(h) * hf * (hf * lf).powf(q / 2.0 - 1.0) * (hf.powf(q) + lf.powf(q)).powf(-1.0 + 1.0 / (2.0 * q));
            let theta = 2.0 * PI * (root * (hf.powf(q) + lf.powf(q)).powf(1.0 / q) - 0.125);
            re += wgt * amp * theta.cos();
            im += wgt * amp * theta.sin();
        }
    }
    (scale * re, scale * im)
}

/// Vaaler coefficients from their closed forms.
pub fn alpha_coeff(h: u32, order: u32) -> f64 {
    let xi = h as f64 / order as f64;
    let rho = PI * xi * (1.0 - xi) / (PI * xi).tan() + xi;
    rho / (PI * h as f64)
}

pub fn beta_coeff(h: u32, order: u32) -> f64 {
    (1.0 - h as f64 / order as f64) / order as f64
}
