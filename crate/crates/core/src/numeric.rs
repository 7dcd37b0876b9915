//! Adaptive Gauss–Kronrod quadrature and a complex Gamma function.

use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_208_292_207,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];
/// 10-point Gauss weights at XGK[1], XGK[3], …, XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

/// Values that can be integrated: reals and complexes.
pub trait Scalar: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync {
    fn zero() -> Self;
    fn magnitude(self) -> f64;
    fn finite(self) -> bool;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
    fn finite(self) -> bool {
        self.is_finite()
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
    fn finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-10, rel_tol: 1e-10, max_intervals: 2000 }
    }
}

impl QuadOptions {
    pub fn abs(abs_tol: f64) -> Self {
        Self { abs_tol, rel_tol: 0.0, ..Self::default() }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Quad<T> {
    pub value: T,
    pub error: f64,
    pub evals: usize,
}

fn gk21<T: Scalar>(f: &mut impl FnMut(f64) -> T, a: f64, b: f64) -> (T, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[10];
    let mut gauss = T::zero();
    for k in 0..10 {
        let x = h * XGK[k];
        let s = f(c - x) + f(c + x);
        kron = kron + s * WGK[k];
        if k % 2 == 1 {
            gauss = gauss + s * WG[k / 2];
        }
    }
    let kron = kron * h;
    let gauss = gauss * h;
    (kron, (kron - gauss).magnitude())
}

struct Piece<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Piece<T> {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl<T> Eq for Piece<T> {}
impl<T> PartialOrd for Piece<T> {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl<T> Ord for Piece<T> {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&o.error)
    }
}

/// Globally adaptive GK21 on [a, b] with optional interior breakpoints.
pub fn integrate_with<T: Scalar>(
    mut f: impl FnMut(f64) -> T,
    points: &[f64],
    opts: QuadOptions,
) -> Result<Quad<T>> {
    let mut heap = BinaryHeap::new();
    let mut evals = 0;
    for w in points.windows(2) {
        if w[1] > w[0] {
            let (value, error) = gk21(&mut f, w[0], w[1]);
            evals += 21;
            heap.push(Piece { a: w[0], b: w[1], value, error });
        }
    }
    loop {
        let total = heap.iter().fold(T::zero(), |acc, p| acc + p.value);
        let err: f64 = heap.iter().map(|p| p.error).sum();
        if !total.finite() {
            return Err(Error::Quadrature("non-finite integrand".into()));
        }
        let tol = opts.abs_tol.max(opts.rel_tol * total.magnitude());
        if err <= tol {
            return Ok(Quad { value: total, error: err, evals });
        }
        if heap.len() >= opts.max_intervals {
            return Err(Error::Quadrature(format!("error estimate {err:.3e} above tolerance {tol:.3e}")));
        }
        let worst = heap.pop().expect("nonempty");
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            return Err(Error::Quadrature("interval underflow".into()));
        }
        for (a, b) in [(worst.a, m), (m, worst.b)] {
            let (value, error) = gk21(&mut f, a, b);
            evals += 21;
            heap.push(Piece { a, b, value, error });
        }
    }
}

pub fn integrate<T: Scalar>(f: impl FnMut(f64) -> T, a: f64, b: f64, opts: QuadOptions) -> Result<Quad<T>> {
    integrate_with(f, &[a, b], opts)
}

/// ∫_a^∞ f via x = a + u/(1−u).
pub fn integrate_to_inf<T: Scalar>(mut f: impl FnMut(f64) -> T, a: f64, opts: QuadOptions) -> Result<Quad<T>> {
    integrate(
        move |u: f64| {
            if u >= 1.0 {
                return T::zero();
            }
            let d = 1.0 - u;
            let v = f(a + u / d);
            if v.finite() {
                v * (1.0 / (d * d))
            } else {
                T::zero()
            }
        },
        0.0,
        1.0,
        opts,
    )
}

const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_923_517,
    -59.597_960_355_475_491_248,
    14.136_097_974_741_747_174,
    -0.491_913_816_097_620_199_78,
    0.339_946_499_848_118_886_99e-4,
    0.465_236_289_270_485_756_65e-4,
    -0.983_744_753_048_795_646_77e-4,
    0.158_088_703_224_912_488_84e-3,
    -0.210_264_441_724_104_883_19e-3,
    0.217_439_618_115_212_643_20e-3,
    -0.164_318_106_536_763_890_22e-3,
    0.844_182_239_838_527_432_93e-4,
    -0.261_908_384_015_814_086_70e-4,
    0.368_991_826_595_316_227_04e-5,
];

/// ln sin(πz), stable for large |Im z|.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let w = z * PI;
    let i = Complex64::i();
    let ln_2i = Complex64::new(2f64.ln(), PI / 2.0);
    if w.im.abs() < 20.0 {
        return w.sin().ln();
    }
    if w.im > 0.0 {
        -i * w + ((i * w * 2.0).exp() - 1.0).ln() - ln_2i
    } else {
        i * w + (1.0 - (-i * w * 2.0).exp()).ln() - ln_2i
    }
}

/// A logarithm of Γ(z) (branch unspecified; exp of it is Γ(z)).
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        return Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - ln_gamma(1.0 - z);
    }
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (k, &c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

pub fn gamma(z: Complex64) -> Complex64 {
    ln_gamma(z).exp()
}

/// Distance from `z` to the nearest pole of Γ.
pub fn gamma_pole_distance(z: Complex64) -> f64 {
    let n = z.re.round().min(0.0);
    Complex64::new(z.re - n, z.im).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn polynomials_are_exact() {
        let q = integrate(|x: f64| x.powi(5) - 2.0 * x, 0.0, 2.0, QuadOptions::default()).unwrap();
        assert_relative_eq!(q.value, 64.0 / 6.0 - 4.0, max_relative = 1e-14);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let q = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, QuadOptions::abs(1e-9)).unwrap();
        assert!((q.value - 2.0).abs() < 1e-8);
    }

    #[test]
    fn semi_infinite() {
        let q = integrate_to_inf(|x: f64| (-x).exp(), 0.0, QuadOptions::default()).unwrap();
        assert_relative_eq!(q.value, 1.0, max_relative = 1e-10);
        let q = integrate_to_inf(|x: f64| 1.0 / (1.0 + x * x), 0.0, QuadOptions::default()).unwrap();
        assert_relative_eq!(q.value, PI / 2.0, max_relative = 1e-10);
    }

    #[test]
    fn complex_integrand() {
        let q = integrate(|x: f64| c(0.0, x).exp(), 0.0, PI, QuadOptions::default()).unwrap();
        assert!((q.value - c(0.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn gamma_integers_and_half() {
        let mut f = 1.0;
        for n in 1..20 {
            assert_relative_eq!(gamma(c(n as f64, 0.0)).re, f, max_relative = 1e-13);
            f *= n as f64;
        }
        assert_relative_eq!(gamma(c(0.5, 0.0)).re, PI.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn gamma_matches_statrs_on_real_axis() {
        for k in 0..200 {
            let x = -9.75 + 0.137 * k as f64;
            if (x - x.round()).abs() < 1e-3 && x <= 0.0 {
                continue;
            }
            let g = gamma(c(x, 0.0));
            assert_relative_eq!(g.re, statrs::function::gamma::gamma(x), max_relative = 1e-12);
            assert!(g.im.abs() <= 1e-12 * g.re.abs());
        }
    }

    #[test]
    fn gamma_on_imaginary_axis() {
        let g = gamma(c(0.0, 1.0));
        assert_relative_eq!(g.norm_sqr(), PI / PI.sinh(), max_relative = 1e-13);
        for y in [0.3, 2.0, 7.5, 30.0] {
            // |Γ(iy)|² = π/(y sinh πy)
            assert_relative_eq!(gamma(c(0.0, y)).norm_sqr(), PI / (y * (PI * y).sinh()), max_relative = 1e-11);
        }
    }

    #[test]
    fn reflection_and_duplication() {
        let zs = [c(0.3, 0.7), c(-2.4, 1.1), c(5.5, -3.0), c(0.1, 12.0), c(-7.2, -0.4), c(20.0, 25.0)];
        for z in zs {
            let lhs = ln_gamma(z) + ln_gamma(1.0 - z);
            let rhs = c(PI, 0.0) / (z * PI).sin();
            assert!((lhs.exp() - rhs).norm() <= 1e-10 * rhs.norm(), "reflection at {z}");
            let dup = ln_gamma(z) + ln_gamma(z + 0.5);
            let want = (1.0 - 2.0 * z) * 2f64.ln() + 0.5 * PI.ln() + ln_gamma(2.0 * z);
            let d = (dup - want).exp();
            assert!((d - 1.0).norm() < 1e-10, "duplication at {z}: {d}");
        }
    }

    #[test]
    fn recurrence_over_a_grid() {
        for a in -20..=20 {
            for b in -20..=20 {
                let z = c(a as f64 * 1.3 + 0.05, b as f64 * 1.7);
                let r = (ln_gamma(z + 1.0) - ln_gamma(z) - z.ln()).exp();
                assert!((r - 1.0).norm() < 1e-12, "{z}: {r}");
            }
        }
    }

    #[test]
    fn pole_distance() {
        assert!(gamma_pole_distance(c(-2.0 + 1e-9, 0.0)) < 1e-8);
        assert!(gamma_pole_distance(c(1e-10, 0.0)) < 1e-8);
        assert!(gamma_pole_distance(c(-2.5, 0.0)) > 0.4);
    }
}
