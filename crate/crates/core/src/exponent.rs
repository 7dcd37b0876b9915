//! Barycentric exponent calculus.
//!
//! For σ ∈ S_r and 0 ≤ i ≤ r, Φ_{σ,i} is the standard subsystem on
//! Δ ∖ {α_{σ(1)}, …, α_{σ(i)}}. For a standard subsystem Φ_M and w ∈ W:
//!
//! * n(i) = |(Φ⁺∖Φ⁺_M) ∩ w(Φ_{σ,i−1} ∖ Φ_{σ,i})|, 1 ≤ i ≤ r
//! * s(i) = |Φ⁺_{σ,i−1}| − |Φ⁺_{σ,i}| − 2n(i)
//! * S(i) = |Φ⁺_{σ,i}| − 2|(Φ⁺∖Φ⁺_M) ∩ wΦ_{σ,i}|, 0 ≤ i ≤ r
//!
//! so that S(0) = 2|Φ⁺_M| − |Φ⁺|, S(r) = 0 and S(i) + s(i) = S(i−1).
//! Tight indices are those with S(i) + r = i. Two counts are kept:
//! `e` over 1 ≤ i ≤ l and `e_sharp` over 0 ≤ i ≤ l−1; the latter is the number
//! of logarithms the inductive integration actually produces.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::harmonic::{plancherel_density, theta_majorant, SpectralParam};
use crate::numeric::{integrate, integrate_with, QuadOptions};
use crate::root_core::{dotf, RootSystem, WeylElement};
use crate::subsystems::{standard_subsystem, RootSet, SubsystemMask};

pub const MAX_TABLE_RANK: usize = 5;

/// Region of 𝔞*₊ where x_{σ(1)} > … > x_{σ(r)} and exactly `l` coordinates exceed t⁻¹.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BarycentricCell {
    pub sigma: Vec<usize>,
    pub l: usize,
}

impl BarycentricCell {
    pub fn new(sigma: Vec<usize>, l: usize) -> Result<Self> {
        check_perm(&sigma)?;
        if l > sigma.len() {
            return Err(Error::Invalid(format!("l = {l} exceeds rank {}", sigma.len())));
        }
        Ok(Self { sigma, l })
    }

    /// Membership for a point given in fundamental-weight coordinates.
    pub fn contains(&self, x: &[f64], t: f64) -> bool {
        let ordered = self.sigma.windows(2).all(|p| x[p[0]] > x[p[1]]);
        let big = self.sigma.iter().filter(|&&j| x[j] > t.recip()).count();
        ordered && big == self.l && self.sigma[..self.l].iter().all(|&j| x[j] > t.recip())
    }
}

fn check_perm(sigma: &[usize]) -> Result<()> {
    let mut seen = vec![false; sigma.len()];
    for &j in sigma {
        if j >= sigma.len() || std::mem::replace(&mut seen[j], true) {
            return Err(Error::Invalid(format!("{sigma:?} is not a permutation")));
        }
    }
    Ok(())
}

/// Φ_{σ,i}.
pub fn phi_sigma_i(rs: &RootSystem, sigma: &[usize], i: usize) -> Result<SubsystemMask> {
    check_perm(sigma)?;
    if sigma.len() != rs.rank() || i > rs.rank() {
        return Err(Error::Invalid(format!("need a permutation of 0..{} and i ≤ rank", rs.rank())));
    }
    let removed = &sigma[..i];
    let keep: Vec<usize> = (0..rs.rank()).filter(|j| !removed.contains(j)).collect();
    Ok(standard_subsystem(rs, &keep))
}

/// All permutations of 0..n in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for j in 0..used.len() {
            if !used[j] {
                used[j] = true;
                cur.push(j);
                go(cur, used, out);
                cur.pop();
                used[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExponentRow {
    pub sigma: Vec<usize>,
    pub w_index: usize,
    pub w_word: Vec<u8>,
    /// n(i) at position i−1.
    pub n: Vec<i64>,
    /// s(i) at position i−1.
    pub s: Vec<i64>,
    /// S(i) at position i, 0 ≤ i ≤ r.
    pub big_s: Vec<i64>,
    /// e(l) = #{1 ≤ i ≤ l : S(i)+r = i}.
    pub e: Vec<usize>,
    /// #{0 ≤ i ≤ l−1 : S(i)+r = i}.
    pub e_sharp: Vec<usize>,
    /// |Φ_M ∩ wΦ_{σ,i}|, counted independently for the S-relation check.
    pub m_cap: Vec<i64>,
    /// |Φ_{σ,i}|.
    pub phi_size: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExponentTable {
    pub label: String,
    pub rank: usize,
    pub m_label: String,
    pub m_positive: usize,
    pub rows: Vec<ExponentRow>,
}

fn weyl_for_table(rs: &RootSystem) -> Result<Vec<WeylElement>> {
    if rs.rank() > MAX_TABLE_RANK {
        return Err(Error::EnumerationCap { order: rs.weyl_order(), cap: 0 });
    }
    rs.weyl_enumerate(crate::root_core::DEFAULT_CAP)
}

pub fn exponent_table(rs: &RootSystem, m: &SubsystemMask) -> Result<ExponentTable> {
    let r = rs.rank();
    let nr = rs.num_roots();
    let weyl = weyl_for_table(rs)?;
    let positive = RootSet::from_indices(nr, 0..rs.num_positive());
    let outside = positive.difference(&m.members);
    let perms = permutations(r);
    // Φ_{σ,i} depends only on the removed node set.
    let mut cache: HashMap<u32, RootSet> = HashMap::new();
    let mut chains: Vec<Vec<RootSet>> = Vec::with_capacity(perms.len());
    for sigma in &perms {
        let mut chain = Vec::with_capacity(r + 1);
        let mut mask = 0u32;
        for i in 0..=r {
            if i > 0 {
                mask |= 1 << sigma[i - 1];
            }
            let set = cache
                .entry(mask)
                .or_insert_with(|| {
                    let keep: Vec<usize> = (0..r).filter(|j| mask & (1 << j) == 0).collect();
                    standard_subsystem(rs, &keep).members
                })
                .clone();
            chain.push(set);
        }
        chains.push(chain);
    }
    let (positive, outside) = (&positive, &outside);
    let rows: Vec<ExponentRow> = weyl
        .par_iter()
        .enumerate()
        .flat_map_iter(|(wi, w)| {
            perms.iter().zip(&chains).map(move |(sigma, chain)| {
                let wchain: Vec<RootSet> = chain.iter().map(|s| s.permuted(&w.root_perm)).collect();
                let pos_len: Vec<i64> = chain.iter().map(|s| s.intersection_len(&positive) as i64).collect();
                let big_s: Vec<i64> = (0..=r)
                    .map(|i| pos_len[i] - 2 * outside.intersection_len(&wchain[i]) as i64)
                    .collect();
                let n: Vec<i64> = (1..=r)
                    .map(|i| outside.intersection_len(&wchain[i - 1].difference(&wchain[i])) as i64)
                    .collect();
                let s: Vec<i64> = (1..=r).map(|i| pos_len[i - 1] - pos_len[i] - 2 * n[i - 1]).collect();
                let tight: Vec<bool> = (0..=r).map(|i| big_s[i] + r as i64 == i as i64).collect();
                let e = (0..=r).map(|l| (1..=l).filter(|&i| tight[i]).count()).collect();
                let e_sharp = (0..=r).map(|l| (0..l).filter(|&i| tight[i]).count()).collect();
                ExponentRow {
                    sigma: sigma.clone(),
                    w_index: wi,
                    w_word: w.word.clone(),
                    n,
                    s,
                    big_s,
                    e,
                    e_sharp,
                    m_cap: wchain.iter().map(|x| x.intersection_len(&m.members) as i64).collect(),
                    phi_size: chain.iter().map(|x| x.len() as i64).collect(),
                }
            })
        })
        .collect();
    Ok(ExponentTable {
        label: rs.label(),
        rank: r,
        m_label: crate::semidense::generators_label(m),
        m_positive: m.positive(rs).len(),
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub sigma: Vec<usize>,
    pub i: usize,
    pub w_index: usize,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    pub rows: usize,
    pub checks: usize,
    pub violations: Vec<Violation>,
    pub pass: bool,
}

/// S(i) + s(i) = S(i−1) and 2S(i) = 2|Φ_M ∩ wΦ_{σ,i}| − |Φ_{σ,i}|, plus the
/// boundary values S(0) = 2|Φ⁺_M| − |Φ⁺| and S(r) = 0.
pub fn check_s_identities(tbl: &ExponentTable) -> IdentityReport {
    let r = tbl.rank;
    let mut violations = Vec::new();
    let mut checks = 0;
    let total_pos = tbl.rows.first().map(|x| x.phi_size[0] / 2).unwrap_or(0);
    for row in &tbl.rows {
        let mut flag = |i: usize, detail: String| {
            violations.push(Violation { sigma: row.sigma.clone(), i, w_index: row.w_index, detail })
        };
        for i in 1..=r {
            checks += 1;
            if row.big_s[i] + row.s[i - 1] != row.big_s[i - 1] {
                flag(i, format!("S({i}) + s({i}) = {} ≠ S({}) = {}", row.big_s[i] + row.s[i - 1], i - 1, row.big_s[i - 1]));
            }
        }
        for i in 0..=r {
            checks += 1;
            if 2 * row.big_s[i] != 2 * row.m_cap[i] - row.phi_size[i] {
                flag(i, format!("2S({i}) = {} but 2|Φ_M ∩ wΦ| − |Φ| = {}", 2 * row.big_s[i], 2 * row.m_cap[i] - row.phi_size[i]));
            }
        }
        checks += 2;
        if row.big_s[0] != 2 * tbl.m_positive as i64 - total_pos {
            flag(0, format!("S(0) = {}", row.big_s[0]));
        }
        if row.big_s[r] != 0 {
            flag(r, format!("S(r) = {}", row.big_s[r]));
        }
    }
    let pass = violations.is_empty();
    IdentityReport { rows: tbl.rows.len(), checks, violations, pass }
}

/// S(i) + r ≥ i for every (σ, i, w).
pub fn check_s_lower_bound(tbl: &ExponentTable) -> IdentityReport {
    let r = tbl.rank as i64;
    let mut violations = Vec::new();
    let mut checks = 0;
    for row in &tbl.rows {
        for (i, &s) in row.big_s.iter().enumerate() {
            checks += 1;
            if s + r < i as i64 {
                violations.push(Violation {
                    sigma: row.sigma.clone(),
                    i,
                    w_index: row.w_index,
                    detail: format!("S({i}) + r = {} < {i}", s + r),
                });
            }
        }
    }
    let pass = violations.is_empty();
    IdentityReport { rows: tbl.rows.len(), checks, violations, pass }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LogExponent {
    /// max e(σ, l, w) with tight indices counted over 1..=l.
    pub k: usize,
    /// max with tight indices counted over 0..l.
    pub k_sharp: usize,
    pub argmax: (Vec<usize>, usize, usize),
    pub argmax_sharp: (Vec<usize>, usize, usize),
}

/// k = max over (σ, l, w) of e(σ, l, w). Rejects non-semi-dense M.
pub fn log_exponent_k(rs: &RootSystem, m: &SubsystemMask) -> Result<LogExponent> {
    let tbl = exponent_table(rs, m)?;
    log_exponent_from_table(&tbl)
}

pub fn log_exponent_from_table(tbl: &ExponentTable) -> Result<LogExponent> {
    if let Some(v) = check_s_lower_bound(tbl).violations.into_iter().next() {
        return Err(Error::NotSemidense { sigma: v.sigma, i: v.i, w: v.w_index });
    }
    let mut best = (0, (vec![], 0, 0));
    let mut sharp = (0, (vec![], 0, 0));
    for row in &tbl.rows {
        for l in 0..=tbl.rank {
            if row.e[l] > best.0 || best.1 .0.is_empty() {
                best = (row.e[l], (row.sigma.clone(), l, row.w_index));
            }
            if row.e_sharp[l] > sharp.0 || sharp.1 .0.is_empty() {
                sharp = (row.e_sharp[l], (row.sigma.clone(), l, row.w_index));
            }
        }
    }
    Ok(LogExponent { k: best.0, k_sharp: sharp.0, argmax: best.1, argmax_sharp: sharp.1 })
}

// ---------------------------------------------------------------------------
// I-integrals

/// Smallest N making every axis integrable with margin: r + max|s| + 2.
pub fn default_n(r: usize, s: &[i64]) -> f64 {
    (r as i64 + s.iter().map(|x| x.abs()).max().unwrap_or(0) + 2) as f64
}

fn quad_tol(l: usize) -> f64 {
    if l <= 2 {
        1e-8
    } else {
        1e-6
    }
}

fn softplus(u: f64) -> f64 {
    if u > 30.0 {
        u + (-u).exp()
    } else {
        u.exp().ln_1p()
    }
}

/// ∫_{y₁>…>y_l>1/t} (1+y₁)^{−N} ∏ y_i^{s_i} dy, with I = 1 for l = 0.
///
/// Evaluated in y = e^u; the innermost axis is integrated in closed form and
/// the rest by nested adaptive Gauss–Kronrod.
pub fn i_integral(s: &[i64], t: f64, n: f64) -> Result<f64> {
    let l = s.len();
    if l == 0 {
        return Ok(1.0);
    }
    if !(t > 1.0) {
        return Err(Error::Invalid("t must exceed 1".into()));
    }
    let growth: f64 = s.iter().map(|&x| (x + 1).max(0) as f64).sum();
    let decay = n - growth;
    if decay <= 0.0 {
        return Err(Error::Invalid(format!("N = {n} too small for exponents {s:?}")));
    }
    let lo = -t.ln();
    let hi = (60.0 / decay).max(1.0) + 1.0;
    let a: Vec<f64> = s.iter().map(|&x| (x + 1) as f64).collect();
    let inner = QuadOptions { abs_tol: 1e-300, rel_tol: 1e-11, max_intervals: 2000 };

    // g(k, v) = ∫_{lo}^{v} e^{a_k u} g(k+1, u) du, with g(l, ·) = 1.
    fn g(a: &[f64], k: usize, v: f64, lo: f64, opts: QuadOptions) -> Result<f64> {
        if k == a.len() - 1 {
            let ak = a[k];
            return Ok(if ak == 0.0 { v - lo } else { ((ak * v).exp() - (ak * lo).exp()) / ak });
        }
        if v <= lo {
            return Ok(0.0);
        }
        let mut err = None;
        let q = integrate(
            |u: f64| match g(a, k + 1, u, lo, opts) {
                Ok(x) => (a[k] * u).exp() * x,
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            },
            lo,
            v,
            opts,
        )?;
        err.map_or(Ok(q.value), Err)
    }

    let outer = QuadOptions { abs_tol: quad_tol(l), rel_tol: 1e-9, max_intervals: 4000 };
    let mut err = None;
    let pts = [lo, lo.max(0.0).min(hi), hi];
    let q = integrate_with(
        |u: f64| {
            let w = (-n * softplus(u)).exp();
            let rest = if l == 1 { Ok(1.0) } else { g(&a, 1, u, lo, inner) };
            match rest {
                Ok(x) => w * (a[0] * u).exp() * x,
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            }
        },
        &pts,
        outer,
    )?;
    err.map_or(Ok(q.value), Err)
}

pub fn i_integral_cell(tbl: &ExponentTable, row: &ExponentRow, l: usize, t: f64, n: Option<f64>) -> Result<f64> {
    let s = &row.s[..l];
    i_integral(s, t, n.unwrap_or_else(|| default_n(tbl.rank, &row.s)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PowerKPoint {
    pub t: f64,
    pub max_ratio: f64,
    pub argmax: (Vec<usize>, usize, usize),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PowerKReport {
    pub sharp: bool,
    pub triples: usize,
    pub points: Vec<PowerKPoint>,
    /// (max − min)/min over t of the per-t maximum.
    pub variation: f64,
    pub zero_e_max: f64,
    pub bounded: bool,
}

/// t^{−S(l)+l−r} I_l(t) / (log t)^{e} over all (σ, l, w) and the t grid.
/// `sharp` selects the count of tight indices over 0..l instead of 1..=l.
pub fn verify_power_k(rs: &RootSystem, m: &SubsystemMask, t_grid: &[f64], sharp: bool) -> Result<PowerKReport> {
    if rs.rank() > 3 {
        return Err(Error::Invalid("verify_power_k is limited to rank ≤ 3".into()));
    }
    let tbl = exponent_table(rs, m)?;
    log_exponent_from_table(&tbl)?;
    let r = tbl.rank as i32;
    let mut jobs = Vec::new();
    for ri in 0..tbl.rows.len() {
        for l in 0..=tbl.rank {
            jobs.push((ri, l));
        }
    }
    let mut points = Vec::new();
    let mut zero_e_max: f64 = 0.0;
    for &t in t_grid {
        let vals: Vec<(f64, usize)> = jobs
            .par_iter()
            .map(|&(ri, l)| {
                let row = &tbl.rows[ri];
                let e = if sharp { row.e_sharp[l] } else { row.e[l] };
                let i = i_integral_cell(&tbl, row, l, t, None)?;
                let lhs = t.powi(-row.big_s[l] as i32 + l as i32 - r) * i;
                Ok((lhs / t.ln().powi(e as i32), e))
            })
            .collect::<Result<_>>()?;
        let (k, best) = vals.iter().enumerate().fold((0, f64::NEG_INFINITY), |a, (k, v)| if v.0 > a.1 { (k, v.0) } else { a });
        zero_e_max = vals.iter().filter(|v| v.1 == 0).map(|v| v.0).fold(zero_e_max, f64::max);
        let (ri, l) = jobs[k];
        points.push(PowerKPoint { t, max_ratio: best, argmax: (tbl.rows[ri].sigma.clone(), l, tbl.rows[ri].w_index) });
    }
    let hi = points.iter().map(|p| p.max_ratio).fold(f64::NEG_INFINITY, f64::max);
    let lo = points.iter().map(|p| p.max_ratio).fold(f64::INFINITY, f64::min);
    Ok(PowerKReport {
        sharp,
        triples: jobs.len(),
        variation: (hi - lo) / lo,
        bounded: hi.is_finite(),
        zero_e_max,
        points,
    })
}

// ---------------------------------------------------------------------------
// Elementary spectral integral

/// ∫_{x>0} (1+‖x‖)^{−N} Θ(tH0, λ(x))² Θ(H, λ(x)) |c(λ(x))|⁻² dx, rank ≤ 2,
/// with λ(x) = Σ x_i ϖ_i. Quadrature runs in x = e^u with breakpoints at
/// u = −log t and along u₁ = u₂, which are the walls of the cells T_{σ,l}.
pub fn spectral_integral(rs: &RootSystem, h0: &[f64], t: f64, h: &[f64], n: f64) -> Result<f64> {
    let r = rs.rank();
    if r > 2 {
        return Err(Error::Invalid("spectral_integral is limited to rank ≤ 2".into()));
    }
    if !(t > 1.0) {
        return Err(Error::Invalid("t must exceed 1".into()));
    }
    let th0: Vec<f64> = h0.iter().map(|x| x * t).collect();
    let d: f64 = (0..rs.num_positive()).map(|a| (rs.multiplicity(a) + rs.multiplicity2(a)) as f64).sum();
    let decay = n - d - r as f64;
    if decay <= 0.0 {
        return Err(Error::Invalid(format!("N = {n} too small; need N > {}", d + r as f64)));
    }
    let wall = -t.ln();
    let lo = wall - 12.0;
    let hi = (60.0 / decay).max(2.0);
    let integrand = |x: &[f64]| -> Result<f64> {
        let lam = SpectralParam::real(x.to_vec());
        let norm = lam.norm(rs);
        let a = theta_majorant(rs, &th0, &lam)?;
        let b = theta_majorant(rs, h, &lam)?;
        // |c|⁻² vanishes where c has its pole on real λ.
        let dens = match plancherel_density(rs, &lam) {
            Err(Error::PoleProximity { .. }) => return Ok(0.0),
            d => d?,
        };
        Ok((1.0 + norm).powf(-n) * a * a * b * dens)
    };
    let opts = QuadOptions { abs_tol: 1e-300, rel_tol: 1e-7, max_intervals: 4000 };
    let mut err = None;
    let sorted = |mut p: Vec<f64>| {
        p.sort_by(f64::total_cmp);
        p.dedup();
        p
    };
    let outer_pts = sorted(vec![lo, wall, 0.0, hi]);
    let q = if r == 1 {
        integrate_with(
            |u: f64| match integrand(&[u.exp()]) {
                Ok(v) => v * u.exp(),
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            },
            &outer_pts,
            opts,
        )?
    } else {
        let inner_opts = QuadOptions { rel_tol: 1e-8, ..opts };
        integrate_with(
            |u1: f64| {
                let pts = sorted(vec![lo, wall, u1, 0.0, hi]);
                let inner = integrate_with(
                    |u2: f64| match integrand(&[u1.exp(), u2.exp()]) {
                        Ok(v) => v * (u1 + u2).exp(),
                        Err(_) => 0.0,
                    },
                    &pts,
                    inner_opts,
                );
                match inner {
                    Ok(q) => q.value,
                    Err(e) => {
                        err.get_or_insert(e);
                        0.0
                    }
                }
            },
            &outer_pts,
            opts,
        )?
    };
    err.map_or(Ok(q.value), Err)
}

/// N used by the spectral integral: comfortably above |Φ⁺| + r.
pub fn default_spectral_n(rs: &RootSystem) -> f64 {
    (2 * rs.num_positive() + rs.rank() + 4) as f64
}

/// |⟨λ(x), α⟩| / x_{σ(i)} ranges between these constants on T_σ for
/// α ∈ Φ⁺_{σ,i−1} ∖ Φ_{σ,i}: the smallest nonzero pairing ⟨ϖ_j, α⟩ and the
/// sum of all pairings.
pub fn rootsize_constants(rs: &RootSystem, sigma: &[usize], i: usize, alpha: usize) -> (f64, f64) {
    let pairs: Vec<f64> = sigma[i - 1..]
        .iter()
        .map(|&j| dotf(&crate::exact::to_f64(&rs.fundamental_weights()[j]), rs.root_f64(alpha)))
        .collect();
    (pairs[0], pairs.iter().sum())
}
