//! Semi-dense root subsystems: Φ₀ is semi-dense when
//! |Ψ ∩ Φ₀| + rank Ψ ≥ |Ψ|/2 for every semistandard Ψ. Conjugating Φ₀
//! through its W-orbit reduces the check to standard Ψ.

use std::collections::{BTreeSet, HashSet};

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{self, q, qf, Q, QVec};
use crate::root_core::{CartanType, E6Model, Form, RootSystem, DEFAULT_CAP};
use crate::subsystems::{
    classify_type, is_semistandard, normals_of, orthogonal_subsystem, set_orbit, set_rank, standard_subsystem,
    type_string, Generators, RootSet, SubsystemMask,
};

/// Extremal fundamental coweights (0-based nodes).
pub fn extremal_coweights(rs: &RootSystem) -> Result<Vec<usize>> {
    let full = RootSet::full(rs.num_roots());
    if classify_type(rs, &full)?.len() != 1 {
        return Err(Error::Reducible);
    }
    let n = rs.rank();
    Ok(match (rs.cartan(), n) {
        (CartanType::A, 1) => vec![0],
        (CartanType::A, _) => vec![0, n - 1],
        (CartanType::B | CartanType::C | CartanType::D, _) => vec![0],
        (CartanType::E, 6) => vec![0, 5],
        (CartanType::E, 7) => vec![6],
        (CartanType::E, _) => vec![7],
        (CartanType::F, _) => vec![0, 3],
        (CartanType::G, _) => vec![0, 1],
    })
}

/// Roots vanishing on a dominant `h0`.
pub fn centralizer_subsystem(rs: &RootSystem, h0: &[Q]) -> Result<SubsystemMask> {
    if !rs.is_dominant(h0) {
        return Err(Error::NotDominant);
    }
    Ok(orthogonal_subsystem(rs, &[h0.to_vec()]))
}

/// The standard subsystem complementary to a set of nodes.
pub fn levi_of_nodes(rs: &RootSystem, removed: &[usize]) -> SubsystemMask {
    let keep: Vec<usize> = (0..rs.rank()).filter(|i| !removed.contains(i)).collect();
    standard_subsystem(rs, &keep)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    /// `w` as a word in simple reflections (0-based), with wΦ₀ the tested set.
    pub w_word: Vec<u8>,
    /// Normal vector of wΦ₀ when Φ₀ has corank one.
    pub normal: Option<Vec<i64>>,
    /// Ψ as the simple nodes generating it.
    pub psi_nodes: Vec<usize>,
    pub psi_size: usize,
    pub psi_rank: usize,
    pub intersection: usize,
    /// |Ψ ∩ wΦ₀| + rank Ψ.
    pub lhs: i64,
    /// |Ψ|/2 as a (numerator, denominator) pair.
    pub rhs: (i64, i64),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SemidenseVerdict {
    pub holds: bool,
    pub witness: Option<Witness>,
    /// Size of the orbit of Φ₀'s normal vector (corank one) or of Φ₀.
    pub orbit_size: usize,
    pub psi_count: usize,
    /// min over all pairs of 2(|Ψ ∩ wΦ₀| + rank Ψ) − |Ψ|.
    pub min_slack: i64,
    /// The pair attaining the minimum slack.
    pub tightest: Witness,
}

fn half(n: usize) -> (i64, i64) {
    let r: Q = qf(n as i64, 2);
    (*r.numer(), *r.denom())
}

struct Conjugates {
    items: Vec<OrbitItem>,
    /// Orbit length of the generating object (normal vector or root set).
    orbit_len: usize,
}

struct OrbitItem {
    set: RootSet,
    word: Vec<u8>,
    normal: Option<Vec<i64>>,
}

/// Conjugates of Φ₀: by the orbit of its normal in corank one, otherwise
/// by set BFS.
fn conjugates(rs: &RootSystem, phi0: &RootSet, cap: usize) -> Result<Conjugates> {
    let rk = set_rank(rs, phi0);
    if rk + 1 == rs.rank() {
        let normals = normals_of(rs, phi0);
        debug_assert_eq!(normals.len(), 1);
        let orbit = rs.weyl_orbit(&normals[0], cap)?;
        let orbit_len = orbit.len();
        let mut seen: HashSet<Vec<i64>> = HashSet::new();
        let mut out = Vec::new();
        for p in orbit {
            let line = exact::primitive_line(&p.vector);
            if !seen.insert(line.clone()) {
                continue;
            }
            let set = RootSet::from_indices(
                rs.num_roots(),
                (0..rs.num_roots()).filter(|&i| exact::dot(&p.vector, rs.root(i)).is_zero()),
            );
            out.push(OrbitItem { set, word: p.word, normal: Some(line) });
        }
        Ok(Conjugates { items: out, orbit_len })
    } else {
        let items: Vec<OrbitItem> =
            set_orbit(rs, phi0, cap)?.into_iter().map(|(set, word)| OrbitItem { set, word, normal: None }).collect();
        Ok(Conjugates { orbit_len: items.len(), items })
    }
}

struct Psi {
    nodes: Vec<usize>,
    set: RootSet,
}

fn standard_psis(rs: &RootSystem) -> Vec<Psi> {
    let r = rs.rank();
    (0u32..1 << r)
        .map(|bits| {
            let nodes: Vec<usize> = (0..r).filter(|i| bits >> i & 1 == 1).collect();
            let set = standard_subsystem(rs, &nodes).members;
            Psi { nodes, set }
        })
        .collect()
}

fn witness(item: &OrbitItem, psi: &Psi, inter: usize) -> Witness {
    let rank = psi.nodes.len();
    Witness {
        w_word: item.word.clone(),
        normal: item.normal.clone(),
        psi_nodes: psi.nodes.clone(),
        psi_size: psi.set.len(),
        psi_rank: rank,
        intersection: inter,
        lhs: (inter + rank) as i64,
        rhs: half(psi.set.len()),
    }
}

pub fn check_semidense(rs: &RootSystem, phi0: &SubsystemMask) -> Result<SemidenseVerdict> {
    check_semidense_capped(rs, phi0, DEFAULT_CAP)
}

pub fn check_semidense_capped(rs: &RootSystem, phi0: &SubsystemMask, cap: usize) -> Result<SemidenseVerdict> {
    if !is_semistandard(rs, &phi0.members) {
        return Err(Error::Invalid("Φ₀ is not semistandard".into()));
    }
    let conj = conjugates(rs, &phi0.members, cap)?;
    let orbit = &conj.items;
    let psis = standard_psis(rs);
    // Per conjugate: (slack, psi index) of the tightest pair; ties keep the
    // earliest Ψ so the merge is deterministic.
    let best: Vec<(i64, usize, usize)> = orbit
        .par_iter()
        .map(|item| {
            psis.iter()
                .enumerate()
                .map(|(k, psi)| {
                    let inter = psi.set.intersection_len(&item.set);
                    (2 * (inter + psi.nodes.len()) as i64 - psi.set.len() as i64, k, inter)
                })
                .min_by_key(|&(slack, k, _)| (slack, k))
                .expect("at least the empty Ψ")
        })
        .collect();
    let (oi, &(slack, k, inter)) =
        best.iter().enumerate().min_by_key(|(oi, b)| (b.0, *oi, b.1)).expect("nonempty orbit");
    let tightest = witness(&orbit[oi], &psis[k], inter);
    let holds = slack >= 0;
    Ok(SemidenseVerdict {
        holds,
        witness: (!holds).then(|| tightest.clone()),
        orbit_size: conj.orbit_len,
        psi_count: psis.len(),
        min_slack: slack,
        tightest,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanRow {
    pub label: String,
    pub node: usize,
    pub phi0_type: String,
    pub roots: usize,
    pub phi0_roots: usize,
    /// |Φ₀| + rank Φ ≥ |Φ|/2, the Ψ = Φ instance.
    pub base_inequality: bool,
    pub holds: bool,
    pub orbit_size: usize,
    pub min_slack: i64,
}

/// Every extremal subsystem of A2..An, B2..Bn, C3..Cn, D4..Dn.
pub fn scan_extremal_classical(max_rank: usize) -> Result<Vec<ScanRow>> {
    let mut jobs = Vec::new();
    for n in 2..=max_rank {
        jobs.push((CartanType::A, n));
        jobs.push((CartanType::B, n));
        if n >= 3 {
            jobs.push((CartanType::C, n));
        }
        if n >= 4 {
            jobs.push((CartanType::D, n));
        }
    }
    jobs.sort();
    let mut rows = Vec::new();
    for (t, n) in jobs {
        let rs = RootSystem::split(t, n)?;
        for node in extremal_coweights(&rs)? {
            rows.push(scan_row(&rs, node)?);
        }
    }
    Ok(rows)
}

pub fn scan_row(rs: &RootSystem, node: usize) -> Result<ScanRow> {
    let phi0 = levi_of_nodes(rs, &[node]);
    let v = check_semidense(rs, &phi0)?;
    Ok(ScanRow {
        label: rs.label(),
        node,
        phi0_type: type_string(&classify_type(rs, &phi0.members)?),
        roots: rs.num_roots(),
        phi0_roots: phi0.len(),
        base_inequality: 2 * (phi0.len() + rs.rank()) >= rs.num_roots(),
        holds: v.holds,
        orbit_size: v.orbit_size,
        min_slack: v.min_slack,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ExceptionalEntry {
    pub system: String,
    pub phi0_type: String,
    pub removed_node: usize,
    /// "psi=phi" or "witness".
    pub method: String,
    pub intersection: usize,
    pub psi_rank: usize,
    pub psi_size: usize,
    /// Whether the inequality fails at the tested pair.
    pub fails: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExceptionalReport {
    pub entries: Vec<ExceptionalEntry>,
    /// Full standard-Ψ verdicts for the cases that survive Ψ = Φ.
    pub full_checks: Vec<(String, String, bool, i64)>,
}

fn psi_phi_entry(rs: &RootSystem, node: usize) -> Result<ExceptionalEntry> {
    let phi0 = levi_of_nodes(rs, &[node]);
    let n = rs.num_roots();
    Ok(ExceptionalEntry {
        system: rs.label(),
        phi0_type: type_string(&classify_type(rs, &phi0.members)?),
        removed_node: node,
        method: "psi=phi".into(),
        intersection: phi0.len(),
        psi_rank: rs.rank(),
        psi_size: n,
        fails: 2 * (phi0.len() + rs.rank()) < n,
    })
}

/// Evaluates a fixed (wΦ₀, Ψ) pair: wΦ₀ given by its normal, Ψ by the roots
/// generating it.
pub fn witness_pair(rs: &RootSystem, normal: &[Q], psi_gens: &[QVec]) -> (usize, usize, usize) {
    let w_phi0 = orthogonal_subsystem(rs, &[normal.to_vec()]).members;
    let psi = crate::subsystems::span_subsystem(rs, psi_gens);
    (psi.members.intersection_len(&w_phi0), psi.rank, psi.len())
}

fn vec8(entries: &[(usize, i64)]) -> QVec {
    let mut v = exact::zero(8);
    for &(i, c) in entries {
        v[i] = q(c);
    }
    v
}

fn witness_entry(rs: &RootSystem, node: usize, normal: &[Q], psi: &[QVec]) -> Result<ExceptionalEntry> {
    let phi0 = levi_of_nodes(rs, &[node]);
    let (inter, rank, size) = witness_pair(rs, normal, psi);
    Ok(ExceptionalEntry {
        system: rs.label(),
        phi0_type: type_string(&classify_type(rs, &phi0.members)?),
        removed_node: node,
        method: "witness".into(),
        intersection: inter,
        psi_rank: rank,
        psi_size: size,
        fails: 2 * (inter + rank) < size,
    })
}

/// G2 and F4 at Ψ = Φ; E8 and E6 at Ψ = Φ for all maximal Φ₀ except the
/// survivors, and at explicit witnesses for those.
pub fn verify_exceptional_failures() -> Result<ExceptionalReport> {
    let mut entries = Vec::new();
    let mut full_checks = Vec::new();
    for (t, n) in [(CartanType::G, 2), (CartanType::F, 4)] {
        let rs = RootSystem::split(t, n)?;
        for node in 0..n {
            entries.push(psi_phi_entry(&rs, node)?);
        }
    }

    let e8 = RootSystem::split(CartanType::E, 8)?;
    for node in 0..7 {
        entries.push(psi_phi_entry(&e8, node)?);
    }
    // Φ₀ = E7 ⊥ e1−e8; w swaps e3 and e8, so wΦ₀ ⊥ e1−e3; Ψ = ⟨e1−e2, e2−e3⟩.
    entries.push(witness_entry(
        &e8,
        7,
        &vec8(&[(0, 1), (2, -1)]),
        &[vec8(&[(0, 1), (1, -1)]), vec8(&[(1, 1), (2, -1)])],
    )?);

    let e6 = RootSystem::with_e6_model(CartanType::E, 6, Form::Split, E6Model::InE8)?;
    for node in [2, 3, 4] {
        entries.push(psi_phi_entry(&e6, node)?);
    }
    // D5 (Bourbaki node 6 removed, i.e. e3−e4): Φ₀ ⊥ e1+e2−3e3+e8. The
    // swap of e3 and e6 sends it to e1+e2−3e6+e8; Ψ = ⟨e6+e7, −½Σe_i⟩.
    let half_sum: QVec = vec![qf(-1, 2); 8];
    entries.push(witness_entry(
        &e6,
        5,
        &vec8(&[(0, 1), (1, 1), (5, -3), (7, 1)]),
        &[vec8(&[(5, 1), (6, 1)]), half_sum],
    )?);

    let e6r9 = RootSystem::with_e6_model(CartanType::E, 6, Form::Split, E6Model::TripleA2)?;
    // A5 (node 2, e2−e3, removed): Φ₀ ⊥ e1−e3; the swap of e1 and e2 gives
    // e2−e3; Ψ = ⟨e2−e3, γ⟩.
    let mut n9 = exact::zero(9);
    n9[1] = q(1);
    n9[2] = q(-1);
    let gamma = e6r9.root(3).clone();
    entries.push(witness_entry(&e6r9, 1, &n9, &[n9.clone(), gamma])?);

    for (rs, node) in [(&e8, 7usize), (&e6, 5), (&e6, 0), (&e6r9, 1)] {
        let phi0 = levi_of_nodes(rs, &[node]);
        let v = check_semidense(rs, &phi0)?;
        full_checks.push((
            format!("{}{}", rs.label(), if rs.ambient_dim() == 9 { "(R9)" } else { "" }),
            type_string(&classify_type(rs, &phi0.members)?),
            v.holds,
            v.min_slack,
        ));
    }
    Ok(ExceptionalReport { entries, full_checks })
}

#[derive(Clone, Debug, Serialize)]
pub struct BadHyperplanes {
    /// Primitive integer directions of the lines w'(H0 − wH0).
    pub lines: Vec<Vec<i64>>,
    pub coroot_lines: Vec<Vec<i64>>,
    /// Lines not spanned by a coroot.
    pub extra: Vec<Vec<i64>>,
    pub contains_coroots: bool,
}

/// Lines ⋃_w W·ℝ(H0 − wH0). Directions are normalised to primitive
/// integer vectors in the ambient coordinates (denominators cleared).
pub fn bad_hyperplanes(rs: &RootSystem, h0: &[Q]) -> Result<BadHyperplanes> {
    if !rs.is_dominant(h0) || exact::is_zero(h0) {
        return Err(Error::NotDominant);
    }
    let orbit = rs.weyl_orbit(h0, DEFAULT_CAP)?;
    let mut reps: BTreeSet<QVec> = BTreeSet::new();
    for p in &orbit {
        let d = exact::sub(h0, &p.vector);
        if !exact::is_zero(&d) {
            reps.insert(rs.dominant_representative(&d).0);
        }
    }
    let mut lines: BTreeSet<Vec<i64>> = BTreeSet::new();
    for d in &reps {
        for p in rs.weyl_orbit(d, DEFAULT_CAP)? {
            lines.insert(exact::primitive_line(&p.vector));
        }
    }
    let coroot_lines: BTreeSet<Vec<i64>> = (0..rs.num_positive()).map(|i| exact::primitive_line(rs.root(i))).collect();
    let extra: Vec<Vec<i64>> = lines.difference(&coroot_lines).cloned().collect();
    Ok(BadHyperplanes {
        contains_coroots: coroot_lines.is_subset(&lines),
        lines: lines.into_iter().collect(),
        coroot_lines: coroot_lines.into_iter().collect(),
        extra,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct WeylTableRow {
    pub label: String,
    pub node: usize,
    pub weyl: u128,
    pub weyl_m: u128,
    pub cosets: u128,
    pub roots: usize,
    pub roots_m: usize,
    pub positive_outside: usize,
    /// |W/W_M| = |Φ⁺ ∖ Φ_M⁺| + 1.
    pub coset_identity: bool,
}

pub fn weyl_table_row(rs: &RootSystem, node: usize) -> WeylTableRow {
    let keep: Vec<usize> = (0..rs.rank()).filter(|&i| i != node).collect();
    let weyl = rs.weyl_order();
    let weyl_m = rs.parabolic_order(&keep);
    let roots_m = standard_subsystem(rs, &keep).len();
    let outside = rs.num_positive() - roots_m / 2;
    WeylTableRow {
        label: rs.label(),
        node,
        weyl,
        weyl_m,
        cosets: weyl / weyl_m,
        roots: rs.num_roots(),
        roots_m,
        positive_outside: outside,
        coset_identity: weyl / weyl_m == outside as u128 + 1,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WeylTableCheck {
    pub row: WeylTableRow,
    /// Reference |W|, |W_M|, |W/W_M|, |Φ|, |Φ_M|, |Φ⁺ ∖ Φ⁺_M|.
    pub expected: [u128; 6],
    pub matches: bool,
}

fn factorial(n: u128) -> u128 {
    (1..=n).product()
}

/// Reference values for the extremal Levi of each type; classical rows at rank `n`.
pub fn weyl_reference(t: CartanType, n: usize) -> Option<(usize, [u128; 6])> {
    let m = n as u128;
    let p2 = |k: u128| 1u128 << k;
    Some(match (t, n) {
        (CartanType::A, _) => (0, [factorial(m + 1), factorial(m), m + 1, m * (m + 1), (m - 1) * m, m]),
        (CartanType::B | CartanType::C, _) => {
            (0, [p2(m) * factorial(m), p2(m - 1) * factorial(m - 1), 2 * m, 2 * m * m, 2 * (m - 1) * (m - 1), 2 * m - 1])
        }
        (CartanType::D, _) => (
            0,
            [p2(m - 1) * factorial(m), p2(m - 2) * factorial(m - 1), 2 * m, 2 * m * (m - 1), 2 * (m - 1) * (m - 2), 2 * m - 2],
        ),
        (CartanType::E, 6) => (0, [51840, 1920, 27, 72, 40, 16]),
        (CartanType::E, 7) => (6, [2903040, 51840, 56, 126, 72, 27]),
        (CartanType::E, 8) => (7, [696729600, 2903040, 240, 240, 126, 57]),
        (CartanType::F, 4) => (0, [1152, 48, 24, 48, 18, 15]),
        (CartanType::G, 2) => (0, [12, 2, 6, 12, 2, 5]),
        _ => return None,
    })
}

/// The nine-row table: A–D at `classical_rank` (D needs ≥ 4) and the exceptional types.
pub fn weyl_table(classical_rank: usize) -> Result<Vec<WeylTableCheck>> {
    if classical_rank < 4 {
        return Err(Error::Invalid("classical rank must be at least 4".into()));
    }
    let types = [
        (CartanType::A, classical_rank),
        (CartanType::B, classical_rank),
        (CartanType::C, classical_rank),
        (CartanType::D, classical_rank),
        (CartanType::E, 6),
        (CartanType::E, 7),
        (CartanType::E, 8),
        (CartanType::F, 4),
        (CartanType::G, 2),
    ];
    types
        .into_iter()
        .map(|(t, n)| {
            let rs = RootSystem::split(t, n)?;
            let (node, expected) = weyl_reference(t, n).ok_or(Error::InvalidType { label: t.letter(), rank: n })?;
            let row = weyl_table_row(&rs, node);
            let got = [row.weyl, row.weyl_m, row.cosets, row.roots as u128, row.roots_m as u128, row.positive_outside as u128];
            Ok(WeylTableCheck { matches: got == expected, row, expected })
        })
        .collect()
}

/// Standard Φ₀ spanned by a node list, as the CLI takes it.
pub fn phi0_from_nodes(rs: &RootSystem, nodes: &[usize]) -> SubsystemMask {
    standard_subsystem(rs, nodes)
}

pub fn generators_label(m: &SubsystemMask) -> String {
    match &m.generators {
        Generators::Simple(n) => format!("nodes {:?}", n.iter().map(|i| i + 1).collect::<Vec<_>>()),
        Generators::Normals(_) => "normals".into(),
        Generators::Span(_) => "span".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::qvec;
    use CartanType::*;

    #[test]
    fn extremal_nodes() {
        assert_eq!(extremal_coweights(&RootSystem::split(A, 3).unwrap()).unwrap(), vec![0, 2]);
        assert_eq!(extremal_coweights(&RootSystem::split(E, 8).unwrap()).unwrap(), vec![7]);
        assert_eq!(extremal_coweights(&RootSystem::split(B, 4).unwrap()).unwrap(), vec![0]);
        let a1 = qvec(&[1, -1, 0, 0]);
        let a1b = qvec(&[0, 0, 1, -1]);
        let red = RootSystem::from_simple_roots(A, 4, vec![a1, a1b]).unwrap();
        assert_eq!(extremal_coweights(&red).unwrap_err(), Error::Reducible);
    }

    #[test]
    fn centralizer_examples() {
        let b3 = RootSystem::split(B, 3).unwrap();
        assert!(centralizer_subsystem(&b3, b3.rho().as_slice()).unwrap().is_empty());
        assert_eq!(centralizer_subsystem(&b3, &exact::zero(3)).unwrap().len(), 18);
        let e7 = RootSystem::split(E, 7).unwrap();
        let m = centralizer_subsystem(&e7, &e7.fundamental_coweights()[6]).unwrap();
        assert_eq!(type_string(&classify_type(&e7, &m.members).unwrap()), "E6");
        assert_eq!(centralizer_subsystem(&b3, &qvec(&[-1, 0, 0])).unwrap_err(), Error::NotDominant);
    }

    #[test]
    fn b3_middle_node_fails_at_full_psi() {
        let b3 = RootSystem::split(B, 3).unwrap();
        let phi0 = standard_subsystem(&b3, &[0, 2]);
        let v = check_semidense(&b3, &phi0).unwrap();
        assert!(!v.holds);
        let w = v.witness.unwrap();
        assert_eq!(w.psi_nodes, vec![0, 1, 2]);
        assert_eq!((w.intersection, w.psi_rank, w.lhs, w.rhs), (4, 3, 7, (9, 1)));
    }

    #[test]
    fn g2_a1_fails() {
        let g2 = RootSystem::split(G, 2).unwrap();
        for node in 0..2 {
            let v = check_semidense(&g2, &standard_subsystem(&g2, &[node])).unwrap();
            assert!(!v.holds);
            let w = v.witness.unwrap();
            assert_eq!((w.lhs, w.rhs, w.psi_size), (4, (6, 1), 12));
        }
    }

    #[test]
    fn small_extremal_scan() {
        for row in scan_extremal_classical(4).unwrap() {
            assert!(row.holds && row.base_inequality, "{row:?}");
        }
    }

    #[test]
    fn d4_base_inequality() {
        let d4 = RootSystem::split(D, 4).unwrap();
        let row = scan_row(&d4, 0).unwrap();
        assert_eq!((row.roots, row.phi0_roots), (24, 12));
    }

    #[test]
    fn verdict_invariant_under_conjugation() {
        let b3 = RootSystem::split(B, 3).unwrap();
        let phi0 = standard_subsystem(&b3, &[0, 2]);
        let base = check_semidense(&b3, &phi0).unwrap();
        for w in b3.weyl_enumerate(DEFAULT_CAP).unwrap().iter().take(20) {
            let moved = phi0.members.permuted(&w.root_perm);
            let m = SubsystemMask { rank: phi0.rank, members: moved, generators: Generators::Span(vec![]) };
            let v = check_semidense(&b3, &m).unwrap();
            assert_eq!((v.holds, v.min_slack, v.orbit_size), (base.holds, base.min_slack, base.orbit_size));
        }
    }

    #[test]
    fn rejects_non_semistandard() {
        let a2 = RootSystem::split(A, 2).unwrap();
        let m = SubsystemMask {
            members: RootSet::from_indices(6, [0, 1, 3, 4]),
            generators: Generators::Span(vec![]),
            rank: 2,
        };
        assert!(matches!(check_semidense(&a2, &m), Err(Error::Invalid(_))));
    }

    #[test]
    fn bad_hyperplanes_type_a_is_coroots() {
        for (t, n) in [(A, 3), (B, 3), (C, 3), (G, 2)] {
            let rs = RootSystem::split(t, n).unwrap();
            let node = extremal_coweights(&rs).unwrap()[0];
            let bh = bad_hyperplanes(&rs, &rs.fundamental_coweights()[node]).unwrap();
            assert!(bh.contains_coroots);
            assert!(bh.extra.is_empty(), "{t}{n}: {:?}", bh.extra);
        }
    }

    #[test]
    fn bad_hyperplanes_d4_adds_coweight_orbit() {
        let d4 = RootSystem::split(D, 4).unwrap();
        let h0 = d4.fundamental_coweights()[0].clone();
        let bh = bad_hyperplanes(&d4, &h0).unwrap();
        let orbit: BTreeSet<Vec<i64>> =
            d4.weyl_orbit(&h0, DEFAULT_CAP).unwrap().iter().map(|p| exact::primitive_line(&p.vector)).collect();
        let extra: BTreeSet<Vec<i64>> = bh.extra.iter().cloned().collect();
        assert_eq!(extra, orbit);
    }

    #[test]
    fn weyl_rows_small() {
        let a3 = RootSystem::split(A, 3).unwrap();
        let r = weyl_table_row(&a3, 0);
        assert_eq!((r.weyl, r.weyl_m, r.cosets, r.roots, r.roots_m, r.positive_outside), (24, 6, 4, 12, 6, 3));
        assert!(r.coset_identity);
        let d4 = weyl_table_row(&RootSystem::split(D, 4).unwrap(), 0);
        assert!(!d4.coset_identity);
    }

    #[test]
    fn reference_formulas_small_ranks() {
        for n in 4..7 {
            for t in [A, B, C, D] {
                let rs = RootSystem::split(t, n).unwrap();
                let (node, e) = weyl_reference(t, n).unwrap();
                let r = weyl_table_row(&rs, node);
                assert_eq!([r.weyl, r.weyl_m, r.cosets, r.roots as u128, r.roots_m as u128, r.positive_outside as u128], e);
            }
        }
    }
}
