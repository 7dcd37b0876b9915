//! Spherical-function numerics: c-functions, the Θ majorant, rank-one spherical
//! functions and their transforms.
//!
//! Rank-one conventions: 𝔞 ≅ ℝ with α(H) = t and 𝔞*_ℂ ≅ ℂ with λ ↦ λα, so that
//! ρ = ½ for SL2(ℝ) and ρ = 1 for SL2(ℂ). The SL2(ℝ) c-function is normalised
//! by c(−i/2) = 1.

use std::f64::consts::{FRAC_1_PI, PI, SQRT_2};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{gamma_pole_distance, integrate, integrate_with, ln_gamma, QuadOptions};
use crate::rng;
use crate::root_core::{dotf, RootSystem, DEFAULT_CAP};
use crate::subsystems::standard_subsystem;

const I: Complex64 = Complex64::new(0.0, 1.0);
const POLE_GUARD: f64 = 1e-8;

/// A spectral parameter in fundamental-weight coordinates.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralParam {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl SpectralParam {
    pub fn new(re: Vec<f64>, im: Vec<f64>) -> Result<Self> {
        if re.len() != im.len() || re.iter().chain(&im).any(|x| !x.is_finite()) {
            return Err(Error::Invalid("spectral parameter must be finite with matching lengths".into()));
        }
        Ok(Self { re, im })
    }

    pub fn real(re: Vec<f64>) -> Self {
        let im = vec![0.0; re.len()];
        Self { re, im }
    }

    /// Coordinates 2⟨v, α_i⟩/⟨α_i, α_i⟩ of an ambient vector.
    pub fn from_ambient(rs: &RootSystem, v: &[Complex64]) -> Self {
        let (re, im) = rs
            .simple_roots()
            .into_iter()
            .map(|i| {
                let a = rs.root_f64(i);
                let n2 = dotf(a, a);
                let p: Complex64 = v.iter().zip(a).map(|(x, y)| x * y).sum();
                let c = p * (2.0 / n2);
                (c.re, c.im)
            })
            .unzip();
        Self { re, im }
    }

    pub fn ambient(&self, rs: &RootSystem) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); rs.ambient_dim()];
        for (k, w) in rs.fundamental_weights().iter().enumerate() {
            let c = Complex64::new(self.re[k], self.im[k]);
            for (x, y) in v.iter_mut().zip(crate::exact::to_f64(w)) {
                *x += c * y;
            }
        }
        v
    }

    /// ⟨λ, β⟩ for every root β, in root order.
    pub fn pairings(&self, rs: &RootSystem) -> Vec<Complex64> {
        let v = self.ambient(rs);
        (0..rs.num_roots())
            .map(|i| v.iter().zip(rs.root_f64(i)).map(|(x, y)| x * y).sum())
            .collect()
    }

    pub fn pairing(&self, rs: &RootSystem, root: usize) -> Complex64 {
        let v = self.ambient(rs);
        v.iter().zip(rs.root_f64(root)).map(|(x, y)| x * y).sum()
    }

    /// Euclidean norm of Im λ in the ambient space.
    pub fn im_norm(&self, rs: &RootSystem) -> f64 {
        self.ambient(rs).iter().map(|z| z.im * z.im).sum::<f64>().sqrt()
    }

    pub fn norm(&self, rs: &RootSystem) -> f64 {
        self.ambient(rs).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MajorantParams {
    pub a: f64,
    pub kappa: f64,
    pub c: f64,
}

impl Default for MajorantParams {
    fn default() -> Self {
        Self { a: 1.0, kappa: 0.2, c: 10.0 }
    }
}

impl MajorantParams {
    pub fn new(a: f64, kappa: f64, c: f64) -> Result<Self> {
        if !(a > 0.0 && kappa > 0.0 && c > 0.0) {
            return Err(Error::Invalid("majorant parameters must be positive".into()));
        }
        Ok(Self { a, kappa, c })
    }
}

/// Evenly spaced axis `min..=max` with `count` points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, count: usize) -> Self {
        Self { min, max, count }
    }
    pub fn point(v: f64) -> Self {
        Self { min: v, max: v, count: 1 }
    }
    pub fn values(&self) -> Vec<f64> {
        match self.count {
            0 => vec![],
            1 => vec![self.min],
            n => (0..n).map(|k| self.min + (self.max - self.min) * k as f64 / (n - 1) as f64).collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// c-functions

fn ln_rgamma(z: Complex64) -> Option<Complex64> {
    (gamma_pole_distance(z) > 1e-14).then(|| -ln_gamma(z))
}

/// c_α(s) = 2^{−s}Γ(s) / (Γ(½(½m+1+s)) Γ(½(½m+m₂+s))).
pub fn c_alpha(s: Complex64, m: f64, m2: f64) -> Result<Complex64> {
    if gamma_pole_distance(s) < POLE_GUARD {
        return Err(Error::PoleProximity { s: format!("{s}") });
    }
    let a = 0.5 * (0.5 * m + 1.0 + s);
    let b = 0.5 * (0.5 * m + m2 + s);
    match (ln_rgamma(a), ln_rgamma(b)) {
        (Some(la), Some(lb)) => Ok((-s * std::f64::consts::LN_2 + ln_gamma(s) + la + lb).exp()),
        _ => Ok(Complex64::new(0.0, 0.0)),
    }
}

/// c(λ) = ∏_{α>0} c_α(i⟨λ,α⟩/⟨α,α⟩) with unit global constant.
pub fn c_fn(rs: &RootSystem, lambda: &SpectralParam) -> Result<Complex64> {
    let p = lambda.pairings(rs);
    let mut acc = Complex64::new(1.0, 0.0);
    for a in 0..rs.num_positive() {
        let n2 = dotf(rs.root_f64(a), rs.root_f64(a));
        let s = I * p[a] / n2;
        acc *= c_alpha(s, rs.multiplicity(a) as f64, rs.multiplicity2(a) as f64)?;
    }
    Ok(acc)
}

/// |c(λ)|⁻².
pub fn plancherel_density(rs: &RootSystem, lambda: &SpectralParam) -> Result<f64> {
    Ok(c_fn(rs, lambda)?.norm_sqr().recip())
}

/// Harish-Chandra c-function of SL2(ℝ): Γ(iλ)/(√π Γ(½+iλ)).
pub fn c_sl2r(lambda: Complex64) -> Result<Complex64> {
    Ok(SQRT_2 * c_alpha(I * lambda, 1.0, 0.0)?)
}

// ---------------------------------------------------------------------------
// Θ majorant

/// min(|α(H)|+1, |⟨λ,α⟩|⁻¹+1) from the two scalars.
pub fn f_alpha_raw(alpha_h: f64, pairing: f64) -> f64 {
    let a = alpha_h.abs() + 1.0;
    if pairing == 0.0 {
        a
    } else {
        a.min(pairing.abs().recip() + 1.0)
    }
}

pub fn f_alpha(rs: &RootSystem, h: &[f64], lambda: &SpectralParam, alpha: usize) -> f64 {
    f_alpha_raw(dotf(rs.root_f64(alpha), h), lambda.pairing(rs, alpha).norm())
}

fn theta_sum(rs: &RootSystem, nodes: &[usize], h: &[f64], lambda: &SpectralParam) -> f64 {
    let p: Vec<f64> = lambda.pairings(rs).iter().map(|z| z.norm()).collect();
    let roots: Vec<usize> = standard_subsystem(rs, nodes).positive(rs);
    let ah: Vec<f64> = roots.iter().map(|&a| dotf(rs.root_f64(a), h)).collect();
    // ⟨wλ, α⟩ = ⟨λ, w⁻¹α⟩; summing over w⁻¹ instead of w leaves the sum unchanged.
    rs.enumerate_generated(nodes)
        .iter()
        .map(|w| roots.iter().zip(&ah).map(|(&a, &x)| f_alpha_raw(x, p[w.act(a)])).product::<f64>())
        .sum()
}

/// Θ(H, λ) = Σ_{w∈W} ∏_{α>0} f_α(H, wλ).
pub fn theta_majorant(rs: &RootSystem, h: &[f64], lambda: &SpectralParam) -> Result<f64> {
    let order = rs.weyl_order();
    if order > DEFAULT_CAP as u128 {
        return Err(Error::EnumerationCap { order, cap: DEFAULT_CAP });
    }
    Ok(theta_sum(rs, &(0..rs.rank()).collect::<Vec<_>>(), h, lambda))
}

/// Θ_L for the standard Levi on `nodes`.
pub fn theta_majorant_l(rs: &RootSystem, nodes: &[usize], h: &[f64], lambda: &SpectralParam) -> Result<f64> {
    if nodes.iter().any(|&j| j >= rs.rank()) {
        return Err(Error::Invalid(format!("node out of range for rank {}", rs.rank())));
    }
    if rs.parabolic_order(nodes) > DEFAULT_CAP as u128 {
        return Err(Error::EnumerationCap { order: rs.parabolic_order(nodes), cap: DEFAULT_CAP });
    }
    Ok(theta_sum(rs, nodes, h, lambda))
}

/// Rank-one Θ(t, λ) = 2 min(t+1, |λ|⁻¹+1).
pub fn theta_rank1(t: f64, lambda: Complex64) -> f64 {
    2.0 * f_alpha_raw(t, lambda.norm())
}

// ---------------------------------------------------------------------------
// Rank-one spherical functions

/// SL2(ℂ): sin(λt)/(λ sinh t).
pub fn spherical_sl2c(lambda: Complex64, t: f64) -> Complex64 {
    if t == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let sinc = if lambda.norm() < 1e-8 {
        let x = lambda * t;
        t * (1.0 - x * x / 6.0)
    } else {
        (lambda * t).sin() / lambda
    };
    sinc / t.sinh()
}

fn sl2r_small_t(lambda: Complex64, t: f64) -> Complex64 {
    // Taylor expansion from φ'' + coth(t)φ' = −(λ² + ¼)φ.
    let e = lambda * lambda + 0.25;
    1.0 - e * (t * t / 4.0) + e * (e + 1.0 / 3.0) * (t.powi(4) / 64.0)
}

// Absolute floor at the natural scale e^{−t/2} so zeros of φ do not stall refinement.
fn sl2r_quad_opts(t: f64) -> QuadOptions {
    QuadOptions { abs_tol: 1e-12 * (1.0 + t) * (-0.5 * t).exp(), rel_tol: 1e-12, max_intervals: 4000 }
}

fn check_sl2r_args(lambda: Complex64, t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Invalid(format!("t must be finite and non-negative, got {t}")));
    }
    if lambda.im.abs() >= 0.5 || !lambda.re.is_finite() {
        return Err(Error::Invalid(format!("|Im λ| must be below 1/2, got {lambda}")));
    }
    Ok(())
}

/// SL2(ℝ) spherical function by quadrature over K:
/// (1/π) ∫_0^π (e^{−t} + 2 sinh t · sin²(ψ/2))^{−½−iλ} dψ.
pub fn spherical_sl2r(lambda: Complex64, t: f64) -> Result<Complex64> {
    check_sl2r_args(lambda, t)?;
    if t < 1e-4 {
        return Ok(sl2r_small_t(lambda, t));
    }
    let e = (-t).exp();
    let sh2 = 2.0 * t.sinh();
    let expo = -0.5 - I * lambda;
    // Geometric breakpoints resolve the peak of width ~e^{−t} at ψ = 0.
    let mut pts = vec![0.0];
    let mut x = 2.0 * e;
    while x < PI {
        pts.push(x);
        x *= 4.0;
    }
    pts.push(PI);
    let q = integrate_with(
        |psi: f64| {
            let s = (0.5 * psi).sin();
            let base = e + sh2 * s * s;
            (expo * base.ln()).exp()
        },
        &pts,
        sl2r_quad_opts(t),
    )?;
    Ok(q.value * FRAC_1_PI)
}

/// Mehler–Dirichlet form (2/π) ∫_0^t cos(λs) / √(2(cosh t − cosh s)) ds,
/// after s = t − v².
pub fn spherical_sl2r_mehler(lambda: Complex64, t: f64) -> Result<Complex64> {
    check_sl2r_args(lambda, t)?;
    if t < 1e-4 {
        return Ok(sl2r_small_t(lambda, t));
    }
    let q = integrate(
        |v: f64| {
            let v2 = v * v;
            let den = ((t - 0.5 * v2).sinh() * (0.5 * v2).sinh()).sqrt();
            (lambda * (t - v2)).cos() * (v / den)
        },
        0.0,
        t.sqrt(),
        sl2r_quad_opts(t),
    )?;
    Ok(q.value * (2.0 / PI))
}

fn hyp_series(lambda: Complex64, x: f64) -> Complex64 {
    // ₂F₁(½, ½−iλ; 1−iλ; x)
    let b = 0.5 - I * lambda;
    let c = 1.0 - I * lambda;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for k in 0..400 {
        let k = k as f64;
        term *= (0.5 + k) * (b + k) / ((c + k) * (k + 1.0)) * x;
        sum += term;
        if term.norm() < 1e-17 * sum.norm() {
            break;
        }
    }
    sum
}

/// Convergent Harish-Chandra expansion c(λ)Φ_λ + c(−λ)Φ_{−λ}; valid for t ≥ 1
/// and λ away from 0.
pub fn spherical_sl2r_series(lambda: Complex64, t: f64) -> Result<Complex64> {
    check_sl2r_args(lambda, t)?;
    if t < 1.0 || lambda.norm() < 1e-3 {
        return Err(Error::Invalid("series needs t ≥ 1 and |λ| ≥ 1e-3".into()));
    }
    let x = (-2.0 * t).exp();
    let a = c_sl2r(lambda)? * ((I * lambda - 0.5) * t).exp() * hyp_series(lambda, x);
    let b = c_sl2r(-lambda)? * ((-I * lambda - 0.5) * t).exp() * hyp_series(-lambda, x);
    Ok(a + b)
}

/// Fastest accurate evaluator: the series where it converges well, else quadrature.
pub fn spherical_sl2r_fast(lambda: Complex64, t: f64) -> Result<Complex64> {
    if t >= 1.0 && lambda.norm() >= 1e-3 {
        spherical_sl2r_series(lambda, t)
    } else {
        spherical_sl2r(lambda, t)
    }
}

/// Monte Carlo over K for SL_n(ℝ), n ∈ {2, 3}: φ_λ(e^H) = E_k[e^{(iλ+ρ)(H(k e^H))}]
/// with G = NAK. `lambda` and `h` are trace-zero diagonal coordinates.
pub fn spherical_mc(n: usize, lambda: &[Complex64], h: &[f64], samples: u64, seed: u64) -> Result<(Complex64, f64)> {
    if !(2..=3).contains(&n) || lambda.len() != n || h.len() != n {
        return Err(Error::Invalid("spherical_mc needs n ∈ {2,3} and length-n vectors".into()));
    }
    if samples == 0 {
        return Err(Error::Invalid("at least one sample required".into()));
    }
    let rho: Vec<f64> = (0..n).map(|i| 0.5 * (n as f64 - 1.0) - i as f64).collect();
    let expo: Vec<Complex64> = lambda.iter().zip(&rho).map(|(l, r)| I * l + r).collect();
    let einv = nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(n, h.iter().map(|x| (-x).exp())));
    let parts = rng::par_blocks(samples, seed, |r, count| {
        let mut s = Complex64::new(0.0, 0.0);
        let mut s2 = 0.0;
        for _ in 0..count {
            let k = rng::haar_orthogonal(n, r);
            // (k e^H)⁻¹ = e^{−H} kᵀ = Q R, so the A-part of k e^H is diag(R)⁻¹.
            let rr = (&einv * k.transpose()).qr().r();
            let x: Complex64 = (0..n).map(|i| -expo[i] * rr[(i, i)].abs().ln()).sum::<Complex64>().exp();
            s += x;
            s2 += x.norm_sqr();
        }
        (s, s2)
    });
    let (s, s2) = parts.into_iter().fold((Complex64::new(0.0, 0.0), 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let nf = samples as f64;
    let mean = s / nf;
    let var = if samples > 1 { ((s2 / nf - mean.norm_sqr()) * nf / (nf - 1.0)).max(0.0) } else { 0.0 };
    Ok((mean, (var / nf).sqrt()))
}

// ---------------------------------------------------------------------------
// Bound verification

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Rank1Group {
    Sl2r,
    Sl2c,
}

impl Rank1Group {
    pub fn rho(self) -> f64 {
        match self {
            Rank1Group::Sl2r => 0.5,
            Rank1Group::Sl2c => 1.0,
        }
    }
    pub fn spherical(self, lambda: Complex64, t: f64) -> Result<Complex64> {
        match self {
            Rank1Group::Sl2r => spherical_sl2r(lambda, t),
            Rank1Group::Sl2c => Ok(spherical_sl2c(lambda, t)),
        }
    }
}

impl std::str::FromStr for Rank1Group {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sl2r" => Ok(Rank1Group::Sl2r),
            "sl2c" => Ok(Rank1Group::Sl2c),
            _ => Err(Error::Invalid(format!("unknown group {s}; expected sl2r or sl2c"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectralGrid {
    pub re: Axis,
    pub im: Axis,
    pub t: Axis,
}

impl SpectralGrid {
    pub fn points(&self) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::new();
        for &a in &self.re.values() {
            for &b in &self.im.values() {
                for &t in &self.t.values() {
                    out.push((a, b, t));
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub group: Rank1Group,
    pub params: MajorantParams,
    pub grid: SpectralGrid,
    pub points: usize,
    pub sup_ratio: f64,
    /// (Re λ, Im λ, t) at the supremum.
    pub argmax_point: [f64; 3],
    pub pass: bool,
}

/// (1+|λ|)^a Θ(t,λ) e^{−ρt + |Im λ| t}.
pub fn rank1_majorant(group: Rank1Group, lambda: Complex64, t: f64, a: f64) -> f64 {
    (1.0 + lambda.norm()).powf(a) * theta_rank1(t, lambda) * (-group.rho() * t + lambda.im.abs() * t).exp()
}

fn sup_over<F>(pts: &[(f64, f64, f64)], f: F) -> Result<(f64, [f64; 3])>
where
    F: Fn(f64, f64, f64) -> Result<f64> + Sync,
{
    let vals: Vec<f64> = pts.par_iter().map(|&(a, b, t)| f(a, b, t)).collect::<Result<_>>()?;
    let (k, v) = vals
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (k, &v)| if v > acc.1 { (k, v) } else { acc });
    let p = pts[k];
    Ok((v, [p.0, p.1, p.2]))
}

/// sup |φ_λ(e^t)| / majorant over the grid.
pub fn verify_sph_bound(group: Rank1Group, grid: &SpectralGrid, params: MajorantParams) -> Result<BoundReport> {
    let pts = grid.points();
    if pts.is_empty() {
        return Err(Error::Invalid("empty grid".into()));
    }
    if pts.iter().any(|p| p.1.abs() > params.kappa) {
        return Err(Error::Invalid(format!("grid leaves the tube |Im λ| ≤ {}", params.kappa)));
    }
    let (sup, arg) = sup_over(&pts, |a, b, t| {
        let l = Complex64::new(a, b);
        Ok(group.spherical(l, t)?.norm() / rank1_majorant(group, l, t, params.a))
    })?;
    Ok(BoundReport { group, params, grid: *grid, points: pts.len(), sup_ratio: sup, argmax_point: arg, pass: sup <= params.c })
}

/// SL2(ℂ) complex-group bound 2e^{−t}(t+1)/(1+t|λ|) for real λ.
pub fn cx_bound(lambda: f64, t: f64) -> f64 {
    2.0 * (-t).exp() * (t + 1.0) / (1.0 + t * lambda.abs())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CxReport {
    pub lambda: Axis,
    pub t: Axis,
    pub sup_ratio: f64,
    pub argmax_point: [f64; 2],
    /// Infimum over the stationary subgrid tλ ≤ 1.
    pub inf_ratio_stationary: f64,
    pub argmin_point: [f64; 2],
    pub lower: f64,
    pub upper: f64,
    pub pass: bool,
}

pub fn verify_cx_bound(lambda: Axis, t: Axis, lower: f64, upper: f64) -> Result<CxReport> {
    let mut sup = (f64::NEG_INFINITY, [0.0; 2]);
    let mut inf = (f64::INFINITY, [0.0; 2]);
    for &l in &lambda.values() {
        for &s in &t.values() {
            let r = spherical_sl2c(Complex64::new(l, 0.0), s).norm() / cx_bound(l, s);
            if r > sup.0 {
                sup = (r, [l, s]);
            }
            if s * l.abs() <= 1.0 && r < inf.0 {
                inf = (r, [l, s]);
            }
        }
    }
    if !sup.0.is_finite() {
        return Err(Error::Invalid("empty grid".into()));
    }
    let pass = sup.0 <= upper && inf.0 >= lower;
    Ok(CxReport {
        lambda,
        t,
        sup_ratio: sup.0,
        argmax_point: sup.1,
        inf_ratio_stationary: inf.0,
        argmin_point: inf.1,
        lower,
        upper,
        pass,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub radius: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// Constants derived from the case split: f/g ∈ [1, max(2, 1+R)].
    pub lower: f64,
    pub upper: f64,
    pub pass: bool,
}

/// (|α(H)|+1)/(|α(H)⟨λ,α⟩|+1).
pub fn g_alpha_raw(alpha_h: f64, pairing: f64) -> f64 {
    (alpha_h.abs() + 1.0) / (alpha_h.abs() * pairing.abs() + 1.0)
}

/// Scans f_α/g_α over |α(H)| ∈ `h` and |⟨λ,α⟩| ∈ [0, R).
pub fn majorant_equivalence(h: Axis, pairing_count: usize, radius: f64) -> Result<EquivalenceReport> {
    if radius <= 0.0 || pairing_count < 2 {
        return Err(Error::Invalid("need R > 0 and at least two pairing samples".into()));
    }
    let ys = Axis::new(0.0, radius * (1.0 - 1e-9), pairing_count).values();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &x in &h.values() {
        for &y in &ys {
            let r = f_alpha_raw(x, y) / g_alpha_raw(x, y);
            lo = lo.min(r);
            hi = hi.max(r);
        }
    }
    let lower = 1.0;
    let upper = 2.0f64.max(1.0 + radius);
    let eps = 1e-12;
    Ok(EquivalenceReport { radius, min_ratio: lo, max_ratio: hi, lower, upper, pass: lo >= lower - eps && hi <= upper + eps })
}

// ---------------------------------------------------------------------------
// Rank-one transforms and the time-averaged lower bound

/// ∫ k(h) φ_{−λ}(e^h) sinh(h) dh for a profile k supported on [a, b] ⊂ [0, ∞).
pub fn hc_transform_profile(lambda: Complex64, profile: impl Fn(f64) -> f64, a: f64, b: f64) -> Result<Complex64> {
    if !(0.0 <= a && a < b) {
        return Err(Error::Invalid("profile support must satisfy 0 ≤ a < b".into()));
    }
    let mut err = None;
    let q = integrate(
        |h: f64| match spherical_sl2r_fast(-lambda, h) {
            Ok(p) => p * (profile(h) * h.sinh()),
            Err(e) => {
                err.get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        },
        a,
        b,
        QuadOptions { abs_tol: 0.0, rel_tol: 1e-10, max_intervals: 200 },
    )?;
    match err {
        Some(e) => Err(e),
        None => Ok(q.value),
    }
}

/// Transform of the indicator of the shell K exp([t−ε0, t+ε0]) K in SL2(ℝ).
pub fn hc_transform_shell(lambda: Complex64, t: f64, eps0: f64) -> Result<Complex64> {
    if !(t > eps0 && eps0 > 0.0) {
        return Err(Error::Invalid("need t > ε0 > 0".into()));
    }
    hc_transform_profile(lambda, |_| 1.0, t - eps0, t + eps0)
}

/// B̂(λ) = ∫_{−ε0}^{ε0} e^{(½−iλ)u} du.
pub fn ball_transform(lambda: Complex64, eps0: f64) -> Complex64 {
    let z = 0.5 - I * lambda;
    if z.norm() < 1e-12 {
        return Complex64::new(2.0 * eps0, 0.0);
    }
    ((z * eps0).exp() - (-z * eps0).exp()) / z
}

/// Leading term ½[c(−λ)B̂(λ)e^{−iλt} + c(λ)B̂(−λ)e^{iλt}] of e^{−t/2}·1̂_{S_t}(λ).
pub fn shell_expansion(lambda: Complex64, t: f64, eps0: f64) -> Result<Complex64> {
    let a = c_sl2r(-lambda)? * ball_transform(lambda, eps0) * (-I * lambda * t).exp();
    let b = c_sl2r(lambda)? * ball_transform(-lambda, eps0) * (I * lambda * t).exp();
    Ok(0.5 * (a + b))
}

/// Diagonal part D(λ) = ¼(|c(−λ)B̂(λ)|² + |c(λ)B̂(−λ)|²).
pub fn diagonal_term(lambda: f64, eps0: f64) -> Result<f64> {
    let l = Complex64::new(lambda, 0.0);
    let a = (c_sl2r(-l)? * ball_transform(l, eps0)).norm_sqr();
    let b = (c_sl2r(l)? * ball_transform(-l, eps0)).norm_sqr();
    Ok(0.25 * (a + b))
}

/// (1/τ) ∫_τ^{2τ} e^{−t} |1̂_{S_t}(λ)|² dt.
pub fn time_average(lambda: f64, tau: f64, eps0: f64) -> Result<f64> {
    let l = Complex64::new(lambda, 0.0);
    let mut err = None;
    let q = integrate(
        |t: f64| match hc_transform_shell(l, t, eps0) {
            Ok(v) => (-t).exp() * v.norm_sqr(),
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        },
        tau,
        2.0 * tau,
        QuadOptions { abs_tol: 0.0, rel_tol: 1e-9, max_intervals: 2000 },
    )?;
    match err {
        Some(e) => Err(e),
        None => Ok(q.value / tau),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TimeAveragePoint {
    pub lambda: f64,
    pub tau: f64,
    pub average: f64,
    pub diagonal: f64,
    pub off_diagonal: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LowerBoundReport {
    pub eps0: f64,
    pub points: Vec<TimeAveragePoint>,
    pub min_average: f64,
    pub threshold: f64,
    /// max_λ |E(τ,λ)|·τ for each τ, in τ order.
    pub scaled_off_diagonal: Vec<f64>,
    pub off_diagonal_spread: f64,
    pub spread_limit: f64,
    /// Re 1̂_B(λ) / (½ vol B) minimised over the λ grid.
    pub ball_margin: f64,
    pub pass: bool,
}

/// 1̂_B(λ) for B = K exp([0, ε0]) K.
pub fn hc_transform_ball(lambda: Complex64, eps0: f64) -> Result<Complex64> {
    hc_transform_profile(lambda, |_| 1.0, 0.0, eps0)
}

pub fn time_average_lower_bound(lambdas: &[f64], taus: &[f64], eps0: f64, threshold: f64) -> Result<LowerBoundReport> {
    if lambdas.is_empty() || taus.is_empty() || lambdas.iter().any(|&l| l <= 0.0) {
        return Err(Error::Invalid("Ω must be a nonempty grid of positive λ".into()));
    }
    let pairs: Vec<(f64, f64)> = taus.iter().flat_map(|&t| lambdas.iter().map(move |&l| (l, t))).collect();
    let points: Vec<TimeAveragePoint> = pairs
        .par_iter()
        .map(|&(lambda, tau)| {
            let average = time_average(lambda, tau, eps0)?;
            let diagonal = diagonal_term(lambda, eps0)?;
            Ok(TimeAveragePoint { lambda, tau, average, diagonal, off_diagonal: average - diagonal })
        })
        .collect::<Result<_>>()?;
    let min_average = points.iter().map(|p| p.average).fold(f64::INFINITY, f64::min);
    let scaled: Vec<f64> = taus
        .iter()
        .map(|&tau| {
            points
                .iter()
                .filter(|p| p.tau == tau)
                .map(|p| p.off_diagonal.abs() * tau)
                .fold(0.0, f64::max)
        })
        .collect();
    let hi = scaled.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = scaled.iter().cloned().fold(f64::INFINITY, f64::min);
    let spread = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    let vol = eps0.cosh() - 1.0;
    let mut ball_margin = f64::INFINITY;
    for &l in lambdas {
        let b = hc_transform_ball(Complex64::new(l, 0.0), eps0)?;
        ball_margin = ball_margin.min(b.re / (0.5 * vol));
    }
    let spread_limit = 3.0;
    let pass = min_average > threshold && spread < spread_limit && ball_margin > 1.0;
    Ok(LowerBoundReport {
        eps0,
        points,
        min_average,
        threshold,
        scaled_off_diagonal: scaled,
        off_diagonal_spread: spread,
        spread_limit,
        ball_margin,
        pass,
    })
}

// ---------------------------------------------------------------------------
// Gangolli–Varadarajan main term

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GvTerm {
    pub t: f64,
    pub exact: [f64; 2],
    pub main: [f64; 2],
    pub residual: f64,
}

/// θ(t, λ) = c(λ)e^{iλt} + c(−λ)e^{−iλt}.
pub fn theta_main(lambda: Complex64, t: f64) -> Result<Complex64> {
    Ok(c_sl2r(lambda)? * (I * lambda * t).exp() + c_sl2r(-lambda)? * (-I * lambda * t).exp())
}

/// Exact φ by quadrature against e^{−t/2}θ(t, λ).
pub fn gv_main_term_rank1(lambda: Complex64, t: f64) -> Result<GvTerm> {
    if lambda.norm() < 1e-3 {
        return Err(Error::Invalid("λ must stay 1e-3 away from 0".into()));
    }
    let exact = spherical_sl2r(lambda, t)?;
    let main = (-0.5 * t).exp() * theta_main(lambda, t)?;
    Ok(GvTerm { t, exact: [exact.re, exact.im], main: [main.re, main.im], residual: (exact - main).norm() })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GvDecayReport {
    pub lambda: f64,
    pub rate: f64,
    pub terms: Vec<GvTerm>,
    /// residual(t)·e^{rate·t}.
    pub scaled: Vec<f64>,
    pub pass: bool,
}

/// Passes when residual(t)·e^{rate·t} never exceeds its value at the first t.
pub fn gv_decay(lambda: f64, ts: &[f64], rate: f64) -> Result<GvDecayReport> {
    if ts.is_empty() {
        return Err(Error::Invalid("empty t grid".into()));
    }
    let terms: Vec<GvTerm> = ts
        .par_iter()
        .map(|&t| gv_main_term_rank1(Complex64::new(lambda, 0.0), t))
        .collect::<Result<_>>()?;
    let scaled: Vec<f64> = terms.iter().map(|g| g.residual * (rate * g.t).exp()).collect();
    let pass = scaled.iter().all(|&s| s <= scaled[0] * (1.0 + 1e-9));
    Ok(GvDecayReport { lambda, rate, terms, scaled, pass })
}

// ---------------------------------------------------------------------------
// Disk choice around a spectral parameter

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiskChoice {
    pub tau: f64,
    pub sigma: f64,
    pub k: usize,
    pub c: f64,
    /// Largest admissible s for the given κ, κ'.
    pub s_max: f64,
    pub certificate_points: usize,
    /// min over sampled z and roots of |⟨λ+zρ, α⟩| / s.
    pub min_margin: f64,
    pub max_im: f64,
    pub certified: bool,
}

/// Radius multiplier C ∈ [1, σ] keeping λ + zρ, |z| = Cs, away from every root
/// hyperplane by s and inside the tube of radius κ.
pub fn disk_choice(rs: &RootSystem, lambda: &SpectralParam, s: f64, kappa: f64, kappa_prime: f64) -> Result<DiskChoice> {
    if !(0.0 < kappa_prime && kappa_prime < kappa) || !(s > 0.0) {
        return Err(Error::Invalid("need 0 < κ' < κ and s > 0".into()));
    }
    if lambda.im_norm(rs) >= kappa_prime {
        return Err(Error::Invalid("Im λ must lie inside the κ' tube".into()));
    }
    let rho = rs.rho_f64();
    let npos = rs.num_positive();
    let rho_pair: Vec<f64> = (0..npos).map(|a| dotf(&rho, rs.root_f64(a)).abs()).collect();
    let need = rho_pair.iter().map(|&p| (2.0 / p).max(p + 1.0)).fold(1.0, f64::max);
    let tau = need * (1.0 + 1e-6);
    let sigma = tau.powi(2 * npos as i32 + 2);
    let rho_norm = dotf(&rho, &rho).sqrt();
    let s_max = (kappa - kappa_prime) / (sigma * rho_norm);
    if s >= s_max {
        return Err(Error::Invalid(format!("s = {s} exceeds the admissible bound {s_max:.3e}")));
    }
    let pairs: Vec<f64> = lambda.pairings(rs)[..npos].iter().map(|z| z.norm()).collect();
    let k = (0..=npos)
        .find(|&k| {
            let lo = tau.powi(2 * k as i32) * s;
            let hi = tau.powi(2 * k as i32 + 2) * s;
            pairs.iter().all(|&p| p <= lo || p >= hi)
        })
        .ok_or_else(|| Error::Invalid("no empty interval: pigeonhole count violated".into()))?;
    let c = tau.powi(2 * k as i32 + 1);
    let lam = lambda.ambient(rs);
    let points = 64;
    let mut min_margin = f64::INFINITY;
    let mut max_im: f64 = 0.0;
    for j in 0..points {
        let z = Complex64::from_polar(c * s, 2.0 * PI * j as f64 / points as f64);
        let v: Vec<Complex64> = lam.iter().zip(&rho).map(|(l, r)| l + z * r).collect();
        max_im = max_im.max(v.iter().map(|x| x.im * x.im).sum::<f64>().sqrt());
        for a in 0..npos {
            let p: Complex64 = v.iter().zip(rs.root_f64(a)).map(|(x, y)| x * y).sum();
            min_margin = min_margin.min(p.norm() / s);
        }
    }
    let certified = min_margin >= 1.0 && max_im < kappa;
    Ok(DiskChoice { tau, sigma, k, c, s_max, certificate_points: points, min_margin, max_im, certified })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::root_core::CartanType;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn c_alpha_sl2r_specialisation() {
        // Duplication turns the general formula into Γ(s)/(√(2π) Γ(s+½)).
        for &s in &[c(0.3, 1.2), c(1.5, -0.7), c(0.0, 4.0)] {
            let direct = crate::numeric::gamma(s) / ((2.0 * PI).sqrt() * crate::numeric::gamma(s + 0.5));
            assert_relative_eq!(c_alpha(s, 1.0, 0.0).unwrap().re, direct.re, max_relative = 1e-11);
            assert_relative_eq!(c_alpha(s, 1.0, 0.0).unwrap().im, direct.im, max_relative = 1e-11, epsilon = 1e-14);
        }
        assert_relative_eq!(c_sl2r(c(0.0, -0.5)).unwrap().re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn c_alpha_rejects_pole() {
        assert!(matches!(c_alpha(c(1e-10, 0.0), 1.0, 0.0), Err(Error::PoleProximity { .. })));
        assert!(matches!(c_alpha(c(-2.0, 1e-9), 1.0, 0.0), Err(Error::PoleProximity { .. })));
    }

    #[test]
    fn sl2c_density() {
        // m = 2: c_α(s) = 1/(s√π)·2^{-s}Γ(s)·… reduces to |c|⁻² = π|s|².
        for &y in &[0.1, 1.0, 7.0] {
            let v = c_alpha(c(0.0, y), 2.0, 0.0).unwrap().norm_sqr().recip();
            assert_relative_eq!(v, PI * y * y, max_relative = 1e-10);
        }
    }

    #[test]
    fn density_small_and_large() {
        let slope = |m: f64, s1: f64, s2: f64| {
            let d = |s: f64| c_alpha(c(0.0, s), m, 0.0).unwrap().norm_sqr().recip();
            (d(s2).ln() - d(s1).ln()) / (s2.ln() - s1.ln())
        };
        assert!((slope(1.0, 1e-4, 1e-2) - 2.0).abs() < 0.01);
        for m in [1.0, 2.0, 4.0] {
            for s in [10.0, 100.0, 1000.0] {
                let d = c_alpha(c(0.0, s), m, 0.0).unwrap().norm_sqr().recip();
                let r = d / s.powf(m);
                assert!(r > 0.01 && r < 10.0, "m={m} s={s} r={r}");
            }
        }
    }

    #[test]
    fn plancherel_weyl_invariant_a2() {
        let rs = RootSystem::split(CartanType::A, 2).unwrap();
        let lam = SpectralParam::real(vec![0.7, 1.9]);
        let d0 = plancherel_density(&rs, &lam).unwrap();
        for w in rs.weyl_enumerate(100).unwrap() {
            let v: Vec<Complex64> = rs.apply_word_f64(&w.word, &lam.ambient(&rs).iter().map(|z| z.re).collect::<Vec<_>>())
                .into_iter()
                .map(|x| c(x, 0.0))
                .collect();
            let lw = SpectralParam::from_ambient(&rs, &v);
            assert_relative_eq!(plancherel_density(&rs, &lw).unwrap(), d0, max_relative = 1e-10);
        }
        assert!(d0 > 0.0);
    }

    #[test]
    fn spectral_param_round_trip() {
        let rs = RootSystem::split(CartanType::B, 3).unwrap();
        let lam = SpectralParam::new(vec![0.5, -1.0, 2.0], vec![0.1, 0.0, -0.05]).unwrap();
        let back = SpectralParam::from_ambient(&rs, &lam.ambient(&rs));
        for k in 0..3 {
            assert_relative_eq!(back.re[k], lam.re[k], epsilon = 1e-12);
            assert_relative_eq!(back.im[k], lam.im[k], epsilon = 1e-12);
        }
    }

    #[test]
    fn theta_basic_values() {
        let rs = RootSystem::split(CartanType::A, 1).unwrap();
        let h = vec![1.5, -1.5]; // α(H) = 3
        for &x in &[0.0, 0.1, 0.5, 2.0] {
            let th = theta_majorant(&rs, &h, &SpectralParam::real(vec![x])).unwrap();
            assert_relative_eq!(th, theta_rank1(3.0, c(x, 0.0)), epsilon = 1e-12);
        }
        let a3 = RootSystem::split(CartanType::A, 3).unwrap();
        let th = theta_majorant(&a3, &[0.0; 4], &SpectralParam::real(vec![0.3, 1.0, 2.0])).unwrap();
        assert_relative_eq!(th, 24.0);
    }

    #[test]
    fn theta_levi_full_and_empty() {
        let rs = RootSystem::split(CartanType::B, 2).unwrap();
        let h = [2.0, 0.5];
        let lam = SpectralParam::real(vec![0.2, 0.9]);
        assert_relative_eq!(
            theta_majorant_l(&rs, &[0, 1], &h, &lam).unwrap(),
            theta_majorant(&rs, &h, &lam).unwrap()
        );
        assert_relative_eq!(theta_majorant_l(&rs, &[], &h, &lam).unwrap(), 1.0);
    }

    #[test]
    fn sl2c_values() {
        assert_relative_eq!(spherical_sl2c(c(1.0, 0.0), 1.0).re, 1f64.sin() / 1f64.sinh(), epsilon = 1e-15);
        assert_relative_eq!(spherical_sl2c(c(0.0, 0.0), 2.0).re, 2.0 / 2f64.sinh(), epsilon = 1e-15);
        assert_relative_eq!(spherical_sl2c(c(1e-9, 0.0), 2.0).re, 2.0 / 2f64.sinh(), epsilon = 1e-14);
        assert_eq!(spherical_sl2c(c(3.0, 0.1), 0.0), c(1.0, 0.0));
    }

    #[test]
    fn sl2r_reference_value() {
        let v = spherical_sl2r(c(0.7, 0.0), 1.3).unwrap();
        assert!((v.re - 0.7287905798036616).abs() < 1e-12);
        assert!(v.im.abs() < 1e-12);
    }

    #[test]
    fn sl2r_three_evaluators_agree() {
        for &l in &[c(0.0, 0.0), c(0.4, 0.0), c(2.5, 0.1), c(7.0, -0.2)] {
            for &t in &[1e-5, 0.3, 1.0, 4.0, 12.0, 25.0] {
                let a = spherical_sl2r(l, t).unwrap();
                let b = spherical_sl2r_mehler(l, t).unwrap();
                let scale = (-0.5 * t).exp() * (1.0 + t);
                assert!((a - b).norm() < 1e-11 * scale, "λ={l} t={t}: {a} vs {b}");
                if t >= 1.0 && l.norm() > 1e-3 {
                    let s = spherical_sl2r_series(l, t).unwrap();
                    assert!((a - s).norm() < 1e-11 * scale, "series λ={l} t={t}");
                }
            }
        }
    }

    #[test]
    fn sl2r_even_in_lambda() {
        for &l in &[0.3, 1.7, 4.0] {
            let a = spherical_sl2r(c(l, 0.0), 3.0).unwrap();
            let b = spherical_sl2r(c(-l, 0.0), 3.0).unwrap();
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn mc_matches_quadrature_sl2() {
        let (est, se) = spherical_mc(2, &[c(0.8, 0.0), c(-0.8, 0.0)], &[0.75, -0.75], 20000, 5).unwrap();
        let exact = spherical_sl2r(c(0.8, 0.0), 1.5).unwrap();
        assert!((est - exact).norm() <= 4.0 * se + 1e-12, "{est} vs {exact} ± {se}");
        let (one, se0) = spherical_mc(3, &[c(1.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)], &[0.0; 3], 100, 1).unwrap();
        assert_relative_eq!(one.re, 1.0, epsilon = 1e-12);
        assert!(se0 < 1e-12);
    }

    #[test]
    fn cx_bound_is_two_sided_on_stationary_grid() {
        let r = verify_cx_bound(Axis::new(0.0, 20.0, 41), Axis::new(0.1, 20.0, 41), 0.1, 10.0).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.inf_ratio_stationary >= 0.3 && r.inf_ratio_stationary <= 3.0);
    }

    #[test]
    fn majorant_equivalence_constants() {
        let r = majorant_equivalence(Axis::new(0.0, 50.0, 101), 101, 5.0).unwrap();
        assert!(r.pass);
        assert_relative_eq!(r.min_ratio, 1.0);
        assert!(r.max_ratio <= 6.0);
        let z = majorant_equivalence(Axis::new(0.0, 50.0, 11), 2, 1e-12).unwrap();
        assert!(z.pass);
    }

    #[test]
    fn shell_transform_matches_expansion() {
        for &l in &[1.0, 2.0] {
            let lam = c(l, 0.0);
            let t: f64 = 20.0;
            let lhs = (-0.5 * t).exp() * hc_transform_shell(lam, t, 0.1).unwrap();
            let rhs = shell_expansion(lam, t, 0.1).unwrap();
            assert!((lhs - rhs).norm() < 1e-3 * 0.1f64.powi(2), "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn shell_transform_linear_in_eps_at_zero() {
        let t = 5.0;
        let a = hc_transform_shell(c(0.0, 0.0), t, 0.02).unwrap();
        let b = hc_transform_shell(c(0.0, 0.0), t, 0.01).unwrap();
        assert!(a.re > 0.0 && a.im.abs() < 1e-12);
        assert!((a.re / b.re - 2.0).abs() < 1e-3);
    }

    #[test]
    fn gv_residual_small_and_decaying() {
        let g = gv_main_term_rank1(c(2.0, 0.0), 10.0).unwrap();
        let ex = c(g.exact[0], g.exact[1]);
        assert!(g.residual < 1e-3 * ex.norm());
        let a = gv_main_term_rank1(c(2.0, 0.0), 5.0).unwrap().residual;
        assert!(a / g.residual >= (0.5f64 * 5.0 * 0.9).exp());
        assert!(theta_main(c(1.3, 0.0), 4.0).unwrap().im.abs() < 1e-13);
    }

    #[test]
    fn disk_choice_cases() {
        let rs = RootSystem::split(CartanType::A, 2).unwrap();
        let s = 1e-6;
        let zero = disk_choice(&rs, &SpectralParam::real(vec![0.0, 0.0]), s, 0.2, 0.1).unwrap();
        assert_eq!(zero.k, 0);
        assert!(zero.certified);
        let far = disk_choice(&rs, &SpectralParam::real(vec![1.0, 2.0]), s, 0.2, 0.1).unwrap();
        assert_eq!(far.k, 0);
        assert!(far.certified);
        // λ on the hyperplane ⟨λ, α₁⟩ = 0 with the other pairings at the k = 0 scale.
        let wall = SpectralParam::real(vec![0.0, 3.0 * s]);
        let d = disk_choice(&rs, &wall, s, 0.2, 0.1).unwrap();
        assert!(d.k >= 1 && d.certified && d.c <= d.sigma, "{d:?}");
        assert!(disk_choice(&rs, &wall, 1.0, 0.2, 0.1).is_err());
    }
}
