//! Quadrature rules: adaptive Gauss–Kronrod on smooth panels and
//! Gauss–Jacobi for panels ending in an algebraic endpoint singularity.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::compensated::NeumaierSum;

// Kronrod 15-point abscissae (non-negative half) and weights, with the
// embedded 7-point Gauss weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const MAX_DEPTH: u32 = 48;

/// One 15-point Kronrod evaluation: `(kronrod, |kronrod - gauss|, int |f|)`.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    let mut abs = WGK[7] * fc.abs();
    for i in 0..7 {
        let dx = h * XGK[i];
        let (f1, f2) = (f(c - dx), f(c + dx));
        k += WGK[i] * (f1 + f2);
        abs += WGK[i] * (f1.abs() + f2.abs());
        if i % 2 == 1 {
            g += WG[i / 2] * (f1 + f2);
        }
    }
    (k * h, ((k - g) * h).abs(), abs * h.abs())
}

/// Adaptive Gauss–Kronrod integration of `f` over `[a, b]` to absolute
/// tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let mut acc = NeumaierSum::new();
    let whole = gk15(f, a, b);
    adapt(f, a, b, whole, tol, 0, &mut acc);
    acc.sum()
}

/// Relative error level below which a panel is treated as noise-limited.
const NOISE_LEVEL: f64 = 1e-9;

fn adapt<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    (v, err, abs): (f64, f64, f64),
    tol: f64,
    depth: u32,
    acc: &mut NeumaierSum,
) {
    let floor = 50.0 * f64::EPSILON * abs;
    if err <= tol.max(floor) || depth >= MAX_DEPTH || (b - a).abs() < 1e-15 * (a.abs() + b.abs()) {
        acc.add(v);
        return;
    }
    let m = 0.5 * (a + b);
    let left = gk15(f, a, m);
    let right = gk15(f, m, b);
    // rounding in f itself (e.g. cos of a large argument) stops the error
    // estimate from shrinking; once halving no longer pays, take the halves
    if err <= NOISE_LEVEL * abs && left.1 + right.1 > 0.75 * err {
        acc.add(left.0);
        acc.add(right.0);
        return;
    }
    adapt(f, a, m, left, 0.5 * tol, depth + 1, acc);
    adapt(f, m, b, right, 0.5 * tol, depth + 1, acc);
}

/// Gauss–Jacobi rule for `int_{-1}^{1} (1 - x)^alpha g(x) dx`.
#[derive(Debug, Clone)]
pub struct GaussJacobi {
    pub alpha: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussJacobi {
    /// Builds the `n`-point rule by the Golub–Welsch eigenvalue method.
    pub fn new(n: usize, alpha: f64) -> Self {
        assert!(n >= 1 && alpha > -1.0);
        let beta = 0.0;
        let ab = alpha + beta;
        let mut m = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            let fi = i as f64;
            let diag = if i == 0 {
                (beta - alpha) / (ab + 2.0)
            } else {
                (beta * beta - alpha * alpha) / ((2.0 * fi + ab) * (2.0 * fi + ab + 2.0))
            };
            m[(i, i)] = diag;
            if i + 1 < n {
                let j = fi + 1.0;
                let num = 4.0 * j * (j + alpha) * (j + beta) * (j + ab);
                let t = 2.0 * j + ab;
                let den = t * t * (t + 1.0) * (t - 1.0);
                let off = (num / den).sqrt();
                m[(i, i + 1)] = off;
                m[(i + 1, i)] = off;
            }
        }
        let mu0 = 2f64.powf(ab + 1.0) * libm::tgamma(alpha + 1.0) * libm::tgamma(beta + 1.0)
            / libm::tgamma(ab + 2.0);
        let eig = SymmetricEigen::new(m);
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let v0 = eig.eigenvectors[(0, i)];
                (eig.eigenvalues[i], mu0 * v0 * v0)
            })
            .collect();
        pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
        let (nodes, weights) = pairs.into_iter().unzip();
        Self { alpha, nodes, weights }
    }

    /// `int_{a}^{b} (b - t)^alpha g(t) dt`.
    pub fn apply<F: Fn(f64) -> f64>(&self, g: &F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let scale = half.powf(self.alpha + 1.0);
        let mut acc = NeumaierSum::new();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc.add(w * g(a + (x + 1.0) * half));
        }
        scale * acc.sum()
    }
}

/// A pair of Gauss–Jacobi rules of different order, used to estimate the
/// error on the singular end panel.
#[derive(Debug, Clone)]
pub struct JacobiPair {
    low: GaussJacobi,
    high: GaussJacobi,
}

impl JacobiPair {
    pub fn new(alpha: f64) -> Self {
        Self {
            low: GaussJacobi::new(24, alpha),
            high: GaussJacobi::new(40, alpha),
        }
    }

    pub fn alpha(&self) -> f64 {
        self.high.alpha
    }

    /// `int_a^b (b - t)^alpha g(t) dt` with `g` smooth near `b`. The panel is
    /// shrunk toward `b` (the remainder going to Gauss–Kronrod on the weighted
    /// integrand) until both rule orders agree to `tol`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, g: &F, a: f64, b: f64, tol: f64) -> f64 {
        let alpha = self.alpha();
        let mut acc = NeumaierSum::new();
        let mut lo = a;
        for _ in 0..60 {
            let hi_val = self.high.apply(g, lo, b);
            let lo_val = self.low.apply(g, lo, b);
            if (hi_val - lo_val).abs() <= tol || b - lo < 1e-14 {
                acc.add(hi_val);
                return acc.sum();
            }
            let mid = 0.5 * (lo + b);
            let weighted = |t: f64| (b - t).powf(alpha) * g(t);
            acc.add(integrate(&weighted, lo, mid, 0.5 * tol));
            lo = mid;
        }
        acc.add(self.high.apply(g, lo, b));
        acc.sum()
    }
}
