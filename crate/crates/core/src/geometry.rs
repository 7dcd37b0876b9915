//! Monte Carlo geometry of SL_n(ℝ) and the support polytope.
//!
//! 𝔞 is the trace-zero diagonal, identified with the sum-zero subspace of ℝⁿ,
//! which is exactly the ambient model of A_{n−1}. The inner product is the
//! trace form (Euclidean on diagonals); the Killing form is 2n times it.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{self, Q, QVec};
use crate::exponent::log_exponent_k;
use crate::numeric::{integrate_with, QuadOptions};
use crate::rng::{haar_orthogonal, par_blocks};
use crate::root_core::{dotf, CartanType, RootSystem};
use crate::semidense::levi_of_nodes;

pub const DEFAULT_EPS0: f64 = 0.1;
/// Interior guard band for ball membership.
pub const GUARD: f64 = 1e-9;
pub const MIN_ACCEPTANCE: f64 = 1e-4;

pub fn t_min(eps0: f64) -> f64 {
    20.0 * eps0
}

/// Root system of SL_n(ℝ).
pub fn sl_root_system(n: usize) -> Result<RootSystem> {
    if n < 2 {
        return Err(Error::Invalid("SL_n needs n ≥ 2".into()));
    }
    RootSystem::split(CartanType::A, n - 1)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupPoint {
    m: DMatrix<f64>,
}

impl GroupPoint {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() || m.iter().any(|x| !x.is_finite()) {
            return Err(Error::Invalid("group point must be a finite square matrix".into()));
        }
        let d = m.determinant();
        if (d - 1.0).abs() > 1e-8 {
            return Err(Error::Invalid(format!("determinant {d} is not 1")));
        }
        Ok(Self { m })
    }

    fn raw(m: DMatrix<f64>) -> Self {
        Self { m }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn n(&self) -> usize {
        self.m.nrows()
    }

    pub fn mul(&self, o: &GroupPoint) -> GroupPoint {
        Self::raw(&self.m * &o.m)
    }

    pub fn inverse(&self) -> Result<GroupPoint> {
        self.m.clone().try_inverse().map(Self::raw).ok_or(Error::Singular)
    }

    pub fn exp_diag(h: &[f64]) -> GroupPoint {
        Self::raw(DMatrix::from_diagonal(&DVector::from_iterator(h.len(), h.iter().map(|x| x.exp()))))
    }

    /// Gaussian matrix rescaled into SL_n.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> GroupPoint {
        let mut m = crate::rng::gaussian_matrix(n, rng);
        let mut d = m.determinant();
        if d < 0.0 {
            m.row_mut(0).neg_mut();
            d = -d;
        }
        Self::raw(m * d.powf(-1.0 / n as f64))
    }
}

/// κ(g): logarithms of the singular values, in decreasing order.
pub fn cartan_projection(g: &GroupPoint) -> Result<Vec<f64>> {
    cartan_of(&g.m)
}

fn cartan_of(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    if sv.iter().any(|s| !(s.is_finite() && *s > 1e-300)) {
        return Err(Error::Singular);
    }
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv.iter().map(|s| s.ln()).collect())
}

/// J(H) = ∏_{α>0} sinh(α(H))^{m_α} sinh(2α(H))^{m_{2α}}.
pub fn radial_density(rs: &RootSystem, h: &[f64]) -> f64 {
    (0..rs.num_positive())
        .map(|a| {
            let x = dotf(rs.root_f64(a), h);
            x.sinh().powi(rs.multiplicity(a) as i32) * (2.0 * x).sinh().powi(rs.multiplicity2(a) as i32)
        })
        .product()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShellSpec {
    pub n: usize,
    pub h0: Vec<f64>,
    pub eps0: f64,
    pub t: f64,
}

impl ShellSpec {
    pub fn new(h0: Vec<f64>, eps0: f64, t: f64) -> Result<Self> {
        let n = h0.len();
        let rs = sl_root_system(n)?;
        if h0.iter().sum::<f64>().abs() > 1e-12 || h0.windows(2).any(|p| p[0] < p[1]) || h0.iter().all(|x| *x == 0.0) {
            return Err(Error::Invalid("H0 must be nonzero, trace-zero and non-increasing".into()));
        }
        if !(eps0 > 0.0 && t > 0.0) {
            return Err(Error::Invalid("ε0 and t must be positive".into()));
        }
        let spec = Self { n, h0, eps0, t };
        let wall = spec.wall_distance(&rs);
        if wall <= eps0 {
            return Err(Error::Invalid(format!(
                "B(tH0, ε0) crosses a wall not containing H0: distance {wall} ≤ ε0 = {eps0}; take t ≥ {}",
                t_min(eps0)
            )));
        }
        Ok(spec)
    }

    /// Shell around the fundamental coweight at `node` (0-based).
    pub fn extremal(n: usize, node: usize, eps0: f64, t: f64) -> Result<Self> {
        let rs = sl_root_system(n)?;
        let h0 = exact::to_f64(rs.fundamental_coweights().get(node).ok_or(Error::Invalid(format!("no node {node}")))?);
        Self::new(h0, eps0, t)
    }

    pub fn center(&self) -> Vec<f64> {
        self.h0.iter().map(|x| x * self.t).collect()
    }

    /// Distance from tH0 to the nearest wall not containing H0. Walls through
    /// H0 are harmless: the part of the ball beyond them is folded back by κ.
    fn wall_distance(&self, rs: &RootSystem) -> f64 {
        let c = self.center();
        (0..rs.num_positive())
            .map(|a| {
                let r = rs.root_f64(a);
                dotf(r, &c) / dotf(r, r).sqrt()
            })
            .filter(|d| *d > 1e-12)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, kappa: &[f64]) -> bool {
        let d2: f64 = kappa.iter().zip(self.center()).map(|(a, b)| (a - b).powi(2)).sum();
        d2.sqrt() < self.eps0 - GUARD
    }
}

/// Haar sampler on S_t = K exp(B(tH0, ε0)) K.
pub struct ShellSampler {
    pub spec: ShellSpec,
    rs: RootSystem,
    basis: Vec<Vec<f64>>,
    j_max: f64,
}

impl ShellSampler {
    pub fn new(spec: ShellSpec) -> Result<Self> {
        let rs = sl_root_system(spec.n)?;
        let c = spec.center();
        let j_max = (0..rs.num_positive())
            .map(|a| {
                let r = rs.root_f64(a);
                (dotf(r, &c).abs() + spec.eps0 * dotf(r, r).sqrt()).sinh()
            })
            .product();
        // Orthonormal basis of the sum-zero hyperplane.
        let n = spec.n;
        let mut basis: Vec<Vec<f64>> = Vec::new();
        for k in 1..n {
            let mut v = vec![0.0; n];
            for x in v.iter_mut().take(k) {
                *x = 1.0;
            }
            v[k] = -(k as f64);
            let norm = dotf(&v, &v).sqrt();
            basis.push(v.iter().map(|x| x / norm).collect());
        }
        Ok(Self { spec, rs, basis, j_max })
    }

    pub fn root_system(&self) -> &RootSystem {
        &self.rs
    }

    /// H ∝ |J| on the ball, by rejection; returns the number of proposals used.
    pub fn sample_h<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(Vec<f64>, u64)> {
        let d = self.basis.len();
        let c = self.spec.center();
        let limit = (10.0 / MIN_ACCEPTANCE) as u64;
        for tries in 1..=limit {
            let g: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
            let gn = dotf(&g, &g).sqrt();
            let rad = self.spec.eps0 * rng.random::<f64>().powf(1.0 / d as f64);
            let mut h = c.clone();
            for (gi, b) in g.iter().zip(&self.basis) {
                for (x, bj) in h.iter_mut().zip(b) {
                    *x += rad * gi / gn * bj;
                }
            }
            if rng.random::<f64>() * self.j_max < radial_density(&self.rs, &h).abs() {
                return Ok((h, tries));
            }
        }
        Err(Error::RejectionRate { rate: 0.0 })
    }

    /// Returns (k₁, H); the full point is k₁ e^H k₂ with an independent Haar k₂.
    fn sample_parts<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(DMatrix<f64>, Vec<f64>, u64)> {
        let k1 = haar_orthogonal(self.spec.n, rng);
        let (h, tries) = self.sample_h(rng)?;
        Ok((k1, h, tries))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<GroupPoint> {
        let (k1, h, _) = self.sample_parts(rng)?;
        let k2 = haar_orthogonal(self.spec.n, rng);
        Ok(GroupPoint::raw(k1 * GroupPoint::exp_diag(&h).m * k2))
    }
}

pub fn sample_shell<R: Rng + ?Sized>(spec: &ShellSpec, rng: &mut R) -> Result<GroupPoint> {
    ShellSampler::new(spec.clone())?.sample(rng)
}

// ---------------------------------------------------------------------------
// Support polytope

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SupportPolytope {
    pub label: String,
    pub h0: QVec,
    /// H0 − w0H0.
    pub apex: QVec,
    pub vertices: Vec<QVec>,
    /// ℓ_j as ambient vectors, one per simple root; ℓ_j(apex) = 1.
    pub functionals: Vec<QVec>,
    /// Indices j whose face {ℓ_j = 1} ∩ P is a genuine facet.
    pub facets: Vec<usize>,
}

/// P = Conv(W.(H0 − w0H0)) ∩ 𝔞̄₊. For dominant H, H ∈ tP iff
/// ⟨ω_j, H⟩ ≤ t⟨ω_j, H0 − w0H0⟩ for every fundamental coweight ω_j.
pub fn support_polytope(rs: &RootSystem, h0: &[Q]) -> Result<SupportPolytope> {
    if !rs.is_dominant(h0) {
        return Err(Error::NotDominant);
    }
    if exact::is_zero(h0) {
        return Err(Error::Invalid("H0 must be nonzero".into()));
    }
    let r = rs.rank();
    let w0 = rs.longest_element();
    let apex = exact::sub(h0, &rs.apply(&w0, h0));
    let cow = rs.fundamental_coweights();
    let functionals: Vec<QVec> = cow
        .iter()
        .map(|w| {
            let d = exact::dot(w, &apex);
            exact::scale(d.recip(), w)
        })
        .collect();
    // Coordinates c with H = Σ c_i ω_i; α_i(H) = c_i, ℓ_j(H) = Σ c_i ℓ_j(ω_i).
    let lmat: Vec<Vec<Q>> = functionals.iter().map(|l| cow.iter().map(|w| exact::dot(l, w)).collect()).collect();
    let mut vertices: Vec<QVec> = Vec::new();
    let mut coords: Vec<QVec> = Vec::new();
    for mask in 0u32..(1 << (2 * r)) {
        if mask.count_ones() as usize != r {
            continue;
        }
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for k in 0..2 * r {
            if mask & (1 << k) == 0 {
                continue;
            }
            if k < r {
                rows.push(exact::unit(r, k));
                rhs.push(exact::q(0));
            } else {
                rows.push(lmat[k - r].clone());
                rhs.push(exact::q(1));
            }
        }
        let Some(inv) = exact::inverse(&rows) else { continue };
        let c: QVec = inv.iter().map(|row| exact::dot(row, &rhs)).collect();
        let feasible = c.iter().all(|x| !x.is_negative())
            && lmat.iter().all(|row| exact::dot(row, &c) <= exact::q(1));
        if feasible && !coords.contains(&c) {
            let mut v = exact::zero(rs.ambient_dim());
            for (ci, w) in c.iter().zip(cow) {
                v = exact::add(&v, &exact::scale(*ci, w));
            }
            coords.push(c);
            vertices.push(v);
        }
    }
    let facets = (0..r)
        .filter(|&j| {
            coords.iter().filter(|c| exact::dot(&lmat[j], c) == exact::q(1)).count() >= r
        })
        .collect();
    Ok(SupportPolytope { label: rs.label(), h0: h0.to_vec(), apex, vertices, functionals, facets })
}

use num_traits::Signed;

/// ‖H‖_P for dominant H.
pub fn polytopal_norm(p: &SupportPolytope, h: &[f64]) -> f64 {
    p.functionals
        .iter()
        .map(|l| dotf(&exact::to_f64(l), h))
        .fold(0.0, f64::max)
}

/// ρ(v) − 2ρ(H0) at each nonzero vertex (where ‖v‖_P = 1).
pub fn vertex_exponents(rs: &RootSystem, p: &SupportPolytope) -> Vec<(QVec, Q)> {
    let rho = rs.rho();
    let two_rho_h0 = exact::dot(&rho, &p.h0) * exact::q(2);
    p.vertices
        .iter()
        .filter(|v| !exact::is_zero(v))
        .map(|v| (v.clone(), exact::dot(&rho, v) - two_rho_h0))
        .collect()
}

// ---------------------------------------------------------------------------
// Monte Carlo volumes

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntersectionReport {
    pub n: usize,
    pub t: f64,
    pub eps0: f64,
    pub h0: Vec<f64>,
    pub h: Vec<f64>,
    pub samples: u64,
    pub seed: u64,
    pub hits: u64,
    pub ratio: f64,
    pub stderr: f64,
    pub acceptance: f64,
    pub norm_p: f64,
    pub rho_h: f64,
    /// None when the Levi of H0 is not semi-dense.
    pub k: Option<usize>,
    pub bound_quotient: Option<f64>,
}

fn levi_k(rs: &RootSystem, h0: &[f64]) -> Option<usize> {
    let removed: Vec<usize> = rs.simple_roots().into_iter().filter(|&a| dotf(rs.root_f64(a), h0) > 1e-12).collect();
    log_exponent_k(rs, &levi_of_nodes(rs, &removed)).ok().map(|k| k.k)
}

fn h0_exact(rs: &RootSystem, h0: &[f64]) -> Option<QVec> {
    // Recover H0 as a rational combination of coweights when its coordinates are.
    let cow = rs.fundamental_coweights();
    let mut v = exact::zero(rs.ambient_dim());
    for (a, w) in rs.simple_roots().into_iter().zip(cow) {
        let c = dotf(rs.root_f64(a), h0);
        let q = Q::approximate_float(c)?;
        if (exact::to_f64(&[q])[0] - c).abs() > 1e-12 {
            return None;
        }
        v = exact::add(&v, &exact::scale(q, w));
    }
    Some(v)
}

/// vol(e^H S_t ∩ S_t)/vol(S_t) = P[κ(e^{−H}g) ∈ B(tH0, ε0)] for g uniform on S_t.
pub fn mc_intersection_ratio(spec: &ShellSpec, h: &[f64], samples: u64, seed: u64) -> Result<IntersectionReport> {
    if h.len() != spec.n {
        return Err(Error::Invalid("H has the wrong dimension".into()));
    }
    let sampler = ShellSampler::new(spec.clone())?;
    let rs = sampler.root_system();
    let e_minus_h = GroupPoint::exp_diag(&h.iter().map(|x| -x).collect::<Vec<_>>()).m;
    let parts = par_blocks(samples, seed, |rng, count| -> Result<(u64, u64)> {
        let (mut hits, mut tries) = (0, 0);
        for _ in 0..count {
            let (k1, hh, tr) = sampler.sample_parts(rng)?;
            tries += tr;
            let m = &e_minus_h * k1 * GroupPoint::exp_diag(&hh).m;
            if spec.contains(&cartan_of(&m)?) {
                hits += 1;
            }
        }
        Ok((hits, tries))
    });
    let (mut hits, mut tries) = (0u64, 0u64);
    for p in parts {
        let (a, b) = p?;
        hits += a;
        tries += b;
    }
    let acceptance = if tries == 0 { 1.0 } else { samples as f64 / tries as f64 };
    if acceptance < MIN_ACCEPTANCE {
        return Err(Error::RejectionRate { rate: acceptance });
    }
    let ratio = hits as f64 / samples as f64;
    let stderr = (ratio * (1.0 - ratio) / samples as f64).sqrt();
    let rho_h = dotf(&rs.rho_f64(), h);
    let (hd, _) = rs.dominant_f64(h);
    let norm_p = match h0_exact(rs, &spec.h0).map(|q| support_polytope(rs, &q)) {
        Some(Ok(p)) => polytopal_norm(&p, &hd),
        _ => f64::NAN,
    };
    let k = levi_k(rs, &spec.h0);
    let bound_quotient = k.map(|k| ratio / (spec.t.ln().powi(k as i32) * (-rho_h).exp()));
    Ok(IntersectionReport {
        n: spec.n,
        t: spec.t,
        eps0: spec.eps0,
        h0: spec.h0.clone(),
        h: h.to_vec(),
        samples,
        seed,
        hits,
        ratio,
        stderr,
        acceptance,
        norm_p,
        rho_h,
        k,
        bound_quotient,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnkerPoint {
    pub h: Vec<f64>,
    pub ratio: f64,
    pub stderr: f64,
    /// e^{−ρ(H)} ∏_{α>0} (1 + α(H)).
    pub bound: f64,
    pub quotient: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnkerReport {
    pub t: f64,
    pub points: Vec<AnkerPoint>,
    pub c_max: f64,
    pub c_limit: f64,
    pub pass: bool,
}

/// Constant allowed in the polynomial-loss upper bound.
pub const ANKER_C: f64 = 1.0;

pub fn anker_upper_check(spec: &ShellSpec, h_grid: &[Vec<f64>], samples: u64, seed: u64) -> Result<AnkerReport> {
    let rs = sl_root_system(spec.n)?;
    let mut points = Vec::new();
    for h in h_grid {
        let rep = mc_intersection_ratio(spec, h, samples, seed)?;
        let (hd, _) = rs.dominant_f64(h);
        let poly: f64 = (0..rs.num_positive()).map(|a| 1.0 + dotf(rs.root_f64(a), &hd)).product();
        let bound = (-rep.rho_h).exp() * poly;
        points.push(AnkerPoint { h: h.clone(), ratio: rep.ratio, stderr: rep.stderr, bound, quotient: rep.ratio / bound });
    }
    let c_max = points.iter().map(|p| p.quotient).fold(0.0, f64::max);
    let pass = points.iter().all(|p| p.ratio <= ANKER_C * p.bound + 3.0 * p.stderr);
    Ok(AnkerReport { t: spec.t, points, c_max, c_limit: ANKER_C, pass })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RayReport {
    pub scales: Vec<f64>,
    pub ratios: Vec<f64>,
    pub stderrs: Vec<f64>,
    /// Soft check: non-increasing within 3 standard errors.
    pub monotone: bool,
}

pub fn ray_monotonicity(spec: &ShellSpec, h1: &[f64], scales: &[f64], samples: u64, seed: u64) -> Result<RayReport> {
    let mut ratios = Vec::new();
    let mut stderrs = Vec::new();
    for &s in scales {
        let h: Vec<f64> = h1.iter().map(|x| x * s).collect();
        let rep = mc_intersection_ratio(spec, &h, samples, seed)?;
        ratios.push(rep.ratio);
        stderrs.push(rep.stderr);
    }
    let monotone = (1..ratios.len()).all(|i| ratios[i] <= ratios[i - 1] + 3.0 * (stderrs[i] + stderrs[i - 1]));
    Ok(RayReport { scales: scales.to_vec(), ratios, stderrs, monotone })
}

// ---------------------------------------------------------------------------
// Triangle inequality and κ(g⁻¹)

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TriangleReport {
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    pub violations: u64,
    pub pass: bool,
}

/// κ(g⁻¹h) ∈ Conv(W.(κ(g⁻¹m) + κ(m⁻¹h))).
pub fn triangle_holds(rs: &RootSystem, g: &GroupPoint, h: &GroupPoint, m: &GroupPoint) -> Result<bool> {
    let gi = g.inverse()?;
    let mi = m.inverse()?;
    let lhs = cartan_projection(&gi.mul(h))?;
    let a = cartan_projection(&gi.mul(m))?;
    let b = cartan_projection(&mi.mul(h))?;
    let y: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
    rs.conv_dominance_f64(&lhs, &y, 1e-6)
}

pub fn triangle_check(n: usize, trials: u64, seed: u64) -> Result<TriangleReport> {
    if !(2..=3).contains(&n) {
        return Err(Error::Invalid("triangle_check supports n ∈ {2, 3}".into()));
    }
    let rs = sl_root_system(n)?;
    let counts = par_blocks(trials, seed, |rng, count| -> Result<u64> {
        let mut bad = 0;
        for _ in 0..count {
            let g = GroupPoint::random(n, rng);
            let h = GroupPoint::random(n, rng);
            let m = GroupPoint::random(n, rng);
            if !triangle_holds(&rs, &g, &h, &m)? {
                bad += 1;
            }
        }
        Ok(bad)
    });
    let violations = counts.into_iter().sum::<Result<u64>>()?;
    Ok(TriangleReport { n, trials, seed, violations, pass: violations == 0 })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InverseReport {
    pub n: usize,
    pub trials: u64,
    pub max_error: f64,
    pub pass: bool,
}

/// κ(g⁻¹) = −w0 κ(g), to 10⁻⁶.
pub fn inverse_check(n: usize, trials: u64, seed: u64) -> Result<InverseReport> {
    let rs = sl_root_system(n)?;
    let w0 = rs.longest_element().word;
    let errs = par_blocks(trials, seed, |rng, count| -> Result<f64> {
        let mut worst: f64 = 0.0;
        for _ in 0..count {
            let g = GroupPoint::random(n, rng);
            let k = cartan_projection(&g)?;
            let ki = cartan_projection(&g.inverse()?)?;
            let pred: Vec<f64> = rs.apply_word_f64(&w0, &k).iter().map(|x| -x).collect();
            worst = worst.max(ki.iter().zip(&pred).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
        }
        Ok(worst)
    });
    let max_error = errs.into_iter().try_fold(0.0f64, |a, e| e.map(|e| a.max(e)))?;
    Ok(InverseReport { n, trials, max_error, pass: max_error <= 1e-6 })
}

// ---------------------------------------------------------------------------
// Polytope integral

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BrionPoint {
    pub tau: f64,
    pub value: f64,
    pub per_tau: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BrionReport {
    pub label: String,
    pub theta: f64,
    pub points: Vec<BrionPoint>,
    pub spread: f64,
    /// (vertex, ρ(v) − 2ρ(H0)) at the nonzero vertices.
    pub vertex_exponents: Vec<(Vec<f64>, f64)>,
    pub pass: bool,
}

pub const DEFAULT_TAUS: [f64; 5] = [4.0, 8.0, 16.0, 32.0, 64.0];

/// ∫_{P_{2τ}} exp(2θ ρ(H − 2‖H‖_P H0)) dH, rank ≤ 2, Lebesgue measure of the trace form.
pub fn polytope_integral(rs: &RootSystem, p: &SupportPolytope, theta: f64, tau: f64) -> Result<f64> {
    let r = rs.rank();
    if r > 2 {
        return Err(Error::Invalid("polytope integral is limited to rank ≤ 2".into()));
    }
    let cow: Vec<Vec<f64>> = rs.fundamental_coweights().iter().map(|w| exact::to_f64(w)).collect();
    let ls: Vec<Vec<f64>> = p.functionals.iter().map(|l| exact::to_f64(l)).collect();
    let rho = rs.rho_f64();
    let rho_h0 = dotf(&rho, &exact::to_f64(&p.h0));
    // Everything in coweight coordinates c.
    let a: Vec<Vec<f64>> = ls.iter().map(|l| cow.iter().map(|w| dotf(l, w)).collect()).collect();
    let rc: Vec<f64> = cow.iter().map(|w| dotf(&rho, w)).collect();
    let gram: Vec<f64> = cow.iter().flat_map(|u| cow.iter().map(move |v| dotf(u, v))).collect();
    let jac = if r == 1 { gram[0].sqrt() } else { (gram[0] * gram[3] - gram[1] * gram[2]).sqrt() };
    let big = 2.0 * tau;
    let f = |c: &[f64]| {
        let norm = a.iter().map(|row| dotf(row, c)).fold(0.0, f64::max);
        (2.0 * theta * (dotf(&rc, c) - 2.0 * norm * rho_h0)).exp()
    };
    let opts = QuadOptions { abs_tol: 1e-300, rel_tol: 1e-10, max_intervals: 4000 };
    let c1_max = a.iter().map(|row| big / row[0]).fold(f64::INFINITY, f64::min);
    let value = if r == 1 {
        integrate_with(|c: f64| f(&[c]), &[0.0, c1_max], opts)?.value
    } else {
        let mut outer_pts: Vec<f64> = vec![0.0, c1_max];
        for v in &p.vertices {
            let c = exact::to_f64(&vertex_coords(rs, v));
            if c[0] > 0.0 && c[0] * big < c1_max {
                outer_pts.push(c[0] * big);
            }
        }
        outer_pts.sort_by(f64::total_cmp);
        outer_pts.dedup();
        let mut err = None;
        let q = integrate_with(
            |c1: f64| {
                let top = a.iter().map(|row| (big - row[0] * c1) / row[1]).fold(f64::INFINITY, f64::min).max(0.0);
                let mut pts = vec![0.0, top];
                // Ridge ℓ₁ = ℓ₂.
                let d = a[0][1] - a[1][1];
                if d.abs() > 1e-300 {
                    let c2 = (a[1][0] - a[0][0]) * c1 / d;
                    if c2 > 0.0 && c2 < top {
                        pts.push(c2);
                    }
                }
                pts.sort_by(f64::total_cmp);
                match integrate_with(|c2: f64| f(&[c1, c2]), &pts, opts) {
                    Ok(q) => q.value,
                    Err(e) => {
                        err.get_or_insert(e);
                        0.0
                    }
                }
            },
            &outer_pts,
            opts,
        )?;
        if let Some(e) = err {
            return Err(e);
        }
        q.value
    };
    Ok(value * jac)
}

fn vertex_coords(rs: &RootSystem, v: &[Q]) -> QVec {
    rs.simple_roots().into_iter().map(|a| exact::dot(rs.root(a), v)).collect()
}

pub fn brion_consequence_check(rs: &RootSystem, h0: &[Q], theta: f64, taus: &[f64]) -> Result<BrionReport> {
    if !(theta > 0.0 && theta <= 0.5) {
        return Err(Error::Invalid("θ must lie in (0, 1/2]".into()));
    }
    let p = support_polytope(rs, h0)?;
    let mut points = Vec::new();
    for &tau in taus {
        let value = polytope_integral(rs, &p, theta, tau)?;
        points.push(BrionPoint { tau, value, per_tau: value / tau });
    }
    let hi = points.iter().map(|x| x.per_tau).fold(f64::NEG_INFINITY, f64::max);
    let lo = points.iter().map(|x| x.per_tau).fold(f64::INFINITY, f64::min);
    let spread = hi / lo;
    let vertex_exponents = vertex_exponents(rs, &p)
        .into_iter()
        .map(|(v, e)| (exact::to_f64(&v), exact::to_f64(&[e])[0]))
        .collect();
    Ok(BrionReport { label: rs.label(), theta, points, spread, vertex_exponents, pass: spread < 3.0 && lo > 0.0 })
}
