//! Standard and semistandard root subsystems, Levi data and type
//! identification.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::{self, q, QVec};
use crate::root_core::{canonical_type, CartanType, RootSystem, WeylElement};

/// Fixed-size bitset over root indices.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootSet {
    words: Vec<u64>,
    n: usize,
}

impl RootSet {
    pub fn empty(n: usize) -> Self {
        Self { words: vec![0; n.div_ceil(64)], n }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for i in 0..n {
            s.insert(i);
        }
        s
    }

    pub fn from_indices(n: usize, idx: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(n);
        for i in idx {
            s.insert(i);
        }
        s
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&i| self.contains(i))
    }

    fn zip(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Self {
        Self { words: self.words.iter().zip(&other.words).map(|(&a, &b)| f(a, b)).collect(), n: self.n }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a & b)
    }

    pub fn union(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a | b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a & !b)
    }

    pub fn intersection_len(&self, other: &Self) -> usize {
        self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// Image under a root permutation.
    pub fn permuted(&self, perm: &[u16]) -> Self {
        let mut out = Self::empty(self.n);
        for i in self.iter() {
            out.insert(perm[i] as usize);
        }
        out
    }
}

impl fmt::Debug for RootSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// How a subsystem was specified.
#[derive(Clone, Debug, PartialEq)]
pub enum Generators {
    Simple(Vec<usize>),
    Normals(Vec<QVec>),
    Span(Vec<QVec>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubsystemMask {
    pub members: RootSet,
    pub generators: Generators,
    pub rank: usize,
}

impl SubsystemMask {
    pub fn len(&self) -> usize {
        self.members.len()
    }
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
    pub fn contains(&self, i: usize) -> bool {
        self.members.contains(i)
    }
    pub fn positive(&self, rs: &RootSystem) -> Vec<usize> {
        self.members.iter().filter(|&i| rs.is_positive(i)).collect()
    }
}

fn mask(rs: &RootSystem, members: RootSet, generators: Generators) -> SubsystemMask {
    let rank = set_rank(rs, &members);
    SubsystemMask { members, generators, rank }
}

/// Dimension of the span of the roots in `set`.
pub fn set_rank(rs: &RootSystem, set: &RootSet) -> usize {
    let rows: Vec<QVec> = set.iter().filter(|&i| rs.is_positive(i)).map(|i| rs.root(i).clone()).collect();
    exact::rank(&rows)
}

/// Roots in the linear span of `vectors`, by the vanishing of the Gram
/// determinant of `vectors ∪ {β}`. `vectors` must be independent.
fn in_span(rs: &RootSystem, vectors: &[QVec]) -> RootSet {
    let mut out = RootSet::empty(rs.num_roots());
    if vectors.is_empty() {
        return out;
    }
    for i in 0..rs.num_positive() {
        let mut rows = vectors.to_vec();
        rows.push(rs.root(i).clone());
        if exact::gram_det(&rows).is_zero() {
            out.insert(i);
            out.insert(rs.negative_of(i));
        }
    }
    out
}

pub fn standard_subsystem(rs: &RootSystem, nodes: &[usize]) -> SubsystemMask {
    let vecs: Vec<QVec> = nodes.iter().map(|&i| rs.root(i).clone()).collect();
    let members = in_span(rs, &vecs);
    SubsystemMask { members, generators: Generators::Simple(nodes.to_vec()), rank: nodes.len() }
}

pub fn orthogonal_subsystem(rs: &RootSystem, normals: &[QVec]) -> SubsystemMask {
    let members = RootSet::from_indices(
        rs.num_roots(),
        (0..rs.num_roots()).filter(|&i| normals.iter().all(|n| exact::dot(n, rs.root(i)).is_zero())),
    );
    mask(rs, members, Generators::Normals(normals.to_vec()))
}

/// Roots lying in the span of arbitrary vectors.
pub fn span_subsystem(rs: &RootSystem, vectors: &[QVec]) -> SubsystemMask {
    let basis = exact::row_echelon(vectors.to_vec());
    let members = in_span(rs, &basis);
    mask(rs, members, Generators::Span(vectors.to_vec()))
}

/// The span closure of a root set: the roots in the span of its members.
pub fn span_closure(rs: &RootSystem, set: &RootSet) -> RootSet {
    let rows: Vec<QVec> = set.iter().map(|i| rs.root(i).clone()).collect();
    in_span(rs, &exact::row_echelon(rows))
}

/// A root set is semistandard when it equals Φ ∩ (its own span).
pub fn is_semistandard(rs: &RootSystem, set: &RootSet) -> bool {
    span_closure(rs, set) == *set
}

/// Basis of the orthogonal complement of the span of `set` inside the
/// root span.
pub fn normals_of(rs: &RootSystem, set: &RootSet) -> Vec<QVec> {
    let mut rows: Vec<QVec> = set.iter().filter(|&i| rs.is_positive(i)).map(|i| rs.root(i).clone()).collect();
    rows.extend(rs.orthogonal_complement().iter().cloned());
    exact::nullspace(&exact::row_echelon(rows), rs.ambient_dim())
}

/// (Φ_I⁺, Φ⁺ ∖ Φ_I⁺) with Φ_I⁺ = {α > 0 : wα < 0 for some w ∈ W_I}.
pub fn levi_split(rs: &RootSystem, nodes: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut inside = Vec::new();
    let mut outside = Vec::new();
    for a in 0..rs.num_positive() {
        let mut seen = HashSet::from([a]);
        let mut queue = VecDeque::from([a]);
        let mut flips = false;
        while let Some(b) = queue.pop_front() {
            if !rs.is_positive(b) {
                flips = true;
                break;
            }
            for &j in nodes {
                let c = rs.simple_perm(j)[b] as usize;
                if seen.insert(c) {
                    queue.push_back(c);
                }
            }
        }
        if flips {
            inside.push(a)
        } else {
            outside.push(a)
        }
    }
    (inside, outside)
}

/// `w ∈ W_I` via wΦ⁺ ⊆ (Φ⁺ ∖ Φ_I⁺) ∪ Φ_I.
pub fn in_wi(rs: &RootSystem, nodes: &[usize], w: &WeylElement) -> bool {
    let phi_i = standard_subsystem(rs, nodes).members;
    (0..rs.num_positive()).all(|a| {
        let b = w.act(a);
        (rs.is_positive(b) && !phi_i.contains(b)) || phi_i.contains(b)
    })
}

/// One irreducible component of a subsystem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Component {
    pub cartan: CartanType,
    pub rank: usize,
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.cartan, self.rank)
    }
}

pub fn type_string(components: &[Component]) -> String {
    if components.is_empty() {
        return "empty".into();
    }
    components.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("x")
}

/// Simple roots of the subsystem: the members of Φ⁺ ∩ set that are not a
/// sum of two such members.
pub fn subsystem_base(rs: &RootSystem, set: &RootSet) -> Vec<usize> {
    let pos: Vec<usize> = set.iter().filter(|&i| rs.is_positive(i)).collect();
    pos.iter()
        .copied()
        .filter(|&a| {
            !pos.iter().any(|&b| {
                b != a && {
                    let d = exact::sub(rs.root(a), rs.root(b));
                    rs.index_of(&d).is_some_and(|k| rs.is_positive(k) && set.contains(k))
                }
            })
        })
        .collect()
}

/// Irreducible components of a subsystem, read off the Dynkin diagram of
/// its base. Sorted by (letter, rank).
pub fn classify_type(rs: &RootSystem, set: &RootSet) -> Result<Vec<Component>> {
    let base = subsystem_base(rs, set);
    let n = base.len();
    let a = |i: usize, j: usize| -> i64 {
        let x = rs.root(base[i]);
        let y = rs.root(base[j]);
        (q(2) * exact::dot(x, y) / exact::dot(y, y)).to_integer()
    };
    let mut comp = vec![usize::MAX; n];
    let mut out = Vec::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let mut nodes = vec![start];
        comp[start] = start;
        let mut k = 0;
        while k < nodes.len() {
            let i = nodes[k];
            for j in 0..n {
                if comp[j] == usize::MAX && a(i, j) != 0 {
                    comp[j] = start;
                    nodes.push(j);
                }
            }
            k += 1;
        }
        out.push(identify(&nodes, &a, |i| exact::dot(rs.root(base[i]), rs.root(base[i])))?);
    }
    out.sort();
    Ok(out)
}

fn identify(nodes: &[usize], a: &dyn Fn(usize, usize) -> i64, norm: impl Fn(usize) -> crate::Q) -> Result<Component> {
    use CartanType::*;
    let n = nodes.len();
    let mut edges = Vec::new();
    for (x, &i) in nodes.iter().enumerate() {
        for &j in &nodes[x + 1..] {
            let p = a(i, j) * a(j, i);
            if p != 0 {
                edges.push((i, j, p));
            }
        }
    }
    if edges.len() != n - 1 || edges.iter().any(|e| e.2 > 3) {
        return Err(Error::NotFiniteType);
    }
    let degree = |v: usize| edges.iter().filter(|e| e.0 == v || e.1 == v).count();
    let multi: Vec<_> = edges.iter().filter(|e| e.2 > 1).collect();
    let branch: Vec<usize> = nodes.iter().copied().filter(|&v| degree(v) >= 3).collect();
    let done = |t, r| {
        let (t, r) = canonical_type(t, r);
        Ok(Component { cartan: t, rank: r })
    };
    if nodes.iter().any(|&v| degree(v) > 3) || branch.len() > 1 || multi.len() > 1 || (!multi.is_empty() && !branch.is_empty()) {
        return Err(Error::NotFiniteType);
    }
    if let Some(&&(i, j, p)) = multi.first() {
        if p == 3 {
            return if n == 2 { done(G, 2) } else { Err(Error::NotFiniteType) };
        }
        if n == 2 {
            return done(B, 2);
        }
        let (end, other) = if degree(i) == 1 {
            (i, j)
        } else if degree(j) == 1 {
            (j, i)
        } else {
            return if n == 4 { done(F, 4) } else { Err(Error::NotFiniteType) };
        };
        // B_n ends in a short root, C_n in a long one.
        return if norm(end) < norm(other) { done(B, n) } else { done(C, n) };
    }
    let Some(&c) = branch.first() else {
        return done(A, n);
    };
    let mut arms: Vec<usize> = Vec::new();
    for &(i, j, _) in edges.iter().filter(|e| e.0 == c || e.1 == c) {
        let mut prev = c;
        let mut cur = if i == c { j } else { i };
        let mut len = 1;
        loop {
            let next = edges
                .iter()
                .find(|e| (e.0 == cur && e.1 != prev) || (e.1 == cur && e.0 != prev))
                .map(|e| if e.0 == cur { e.1 } else { e.0 });
            match next {
                Some(nx) => {
                    prev = cur;
                    cur = nx;
                    len += 1;
                }
                None => break,
            }
        }
        arms.push(len);
    }
    arms.sort();
    match (arms[0], arms[1], arms[2]) {
        (1, 1, k) => done(D, k + 3),
        (1, 2, 2) => done(E, 6),
        (1, 2, 3) => done(E, 7),
        (1, 2, 4) => done(E, 8),
        _ => Err(Error::NotFiniteType),
    }
}

/// W-orbit of a root set under the simple reflections, each with a word.
pub fn set_orbit(rs: &RootSystem, set: &RootSet, cap: usize) -> Result<Vec<(RootSet, Vec<u8>)>> {
    let mut seen: HashSet<RootSet> = HashSet::from([set.clone()]);
    let mut out = vec![(set.clone(), Vec::new())];
    let mut head = 0;
    while head < out.len() {
        for j in 0..rs.rank() {
            let next = out[head].0.permuted(rs.simple_perm(j));
            if !seen.contains(&next) {
                if out.len() >= cap {
                    return Err(Error::OrbitCap { cap });
                }
                seen.insert(next.clone());
                let mut word = vec![j as u8];
                word.extend_from_slice(&out[head].1);
                out.push((next, word));
            }
        }
        head += 1;
    }
    Ok(out)
}

/// Counts of a subsystem split by type, for reports.
pub fn describe(rs: &RootSystem, set: &RootSet) -> BTreeMap<&'static str, String> {
    let mut m = BTreeMap::new();
    m.insert("size", set.len().to_string());
    m.insert("rank", set_rank(rs, set).to_string());
    m.insert("type", classify_type(rs, set).map(|c| type_string(&c)).unwrap_or_else(|e| e.to_string()));
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{qvec, unit};
    use crate::root_core::DEFAULT_CAP;
    use CartanType::*;

    fn comps(v: &[(CartanType, usize)]) -> Vec<Component> {
        v.iter().map(|&(cartan, rank)| Component { cartan, rank }).collect()
    }

    #[test]
    fn bitset_ops() {
        let a = RootSet::from_indices(130, [0, 64, 129]);
        let b = RootSet::from_indices(130, [64, 3]);
        assert_eq!(a.len(), 3);
        assert_eq!(a.intersection(&b).iter().collect::<Vec<_>>(), vec![64]);
        assert_eq!(a.union(&b).len(), 4);
        assert_eq!(a.difference(&b).len(), 2);
        assert_eq!(a.intersection_len(&b), 1);
        assert!(RootSet::from_indices(130, [64]).is_subset(&a));
    }

    #[test]
    fn standard_extremes() {
        let rs = RootSystem::split(B, 3).unwrap();
        assert!(standard_subsystem(&rs, &[]).is_empty());
        assert_eq!(standard_subsystem(&rs, &[0, 1, 2]).len(), 18);
    }

    #[test]
    fn e6_inside_e7_is_orthogonal_to_e1_plus_e8() {
        let rs = RootSystem::split(E, 7).unwrap();
        let std = standard_subsystem(&rs, &[0, 1, 2, 3, 4, 5]);
        let mut n = unit(8, 0);
        n[7] = q(1);
        let orth = orthogonal_subsystem(&rs, &[n]);
        assert_eq!(std.members, orth.members);
        assert_eq!(std.len(), 72);
        assert_eq!(classify_type(&rs, &std.members).unwrap(), comps(&[(E, 6)]));
    }

    #[test]
    fn orthogonal_examples() {
        let a4 = RootSystem::split(A, 4).unwrap();
        assert_eq!(orthogonal_subsystem(&a4, &[exact::zero(5)]).len(), 20);
        let m = orthogonal_subsystem(&a4, &[unit(5, 2)]);
        assert_eq!(classify_type(&a4, &m.members).unwrap(), comps(&[(A, 3)]));
        let d5 = RootSystem::split(D, 5).unwrap();
        let m = orthogonal_subsystem(&d5, &[unit(5, 0)]);
        assert_eq!(classify_type(&d5, &m.members).unwrap(), comps(&[(D, 4)]));
        let d4 = orthogonal_subsystem(&RootSystem::split(D, 4).unwrap(), &[unit(4, 1)]);
        assert_eq!(d4.len(), 12); // D3 = A3
    }

    #[test]
    fn levi_examples() {
        let b3 = RootSystem::split(B, 3).unwrap();
        let (inside, outside) = levi_split(&b3, &[1, 2]);
        assert_eq!((inside.len(), outside.len()), (4, 5));
        let (inside, outside) = levi_split(&b3, &[0, 1, 2]);
        assert_eq!((inside.len(), outside.len()), (9, 0));
        let a2 = RootSystem::split(A, 2).unwrap();
        let (inside, outside) = levi_split(&a2, &[0]);
        assert_eq!(inside, vec![0]);
        assert_eq!(outside, vec![1, 2]);
    }

    #[test]
    fn levi_agrees_with_span() {
        for (t, n) in [(B, 3), (C, 3), (G, 2), (A, 4), (D, 4), (F, 4)] {
            let rs = RootSystem::split(t, n).unwrap();
            for bits in 0u32..1 << n {
                let nodes: Vec<usize> = (0..n).filter(|i| bits >> i & 1 == 1).collect();
                let (inside, _) = levi_split(&rs, &nodes);
                let span = standard_subsystem(&rs, &nodes);
                assert_eq!(inside, span.positive(&rs));
            }
        }
    }

    #[test]
    fn in_wi_matches_generated_subgroup() {
        for (t, n) in [(A, 3), (B, 3), (C, 3), (G, 2), (A, 2)] {
            let rs = RootSystem::split(t, n).unwrap();
            let all = rs.weyl_enumerate(DEFAULT_CAP).unwrap();
            for bits in 0u32..1 << n {
                let nodes: Vec<usize> = (0..n).filter(|i| bits >> i & 1 == 1).collect();
                let sub: HashSet<_> = rs.enumerate_generated(&nodes).into_iter().collect();
                for w in &all {
                    assert_eq!(in_wi(&rs, &nodes, w), sub.contains(w));
                }
            }
        }
        let a2 = RootSystem::split(A, 2).unwrap();
        assert!(in_wi(&a2, &[], &a2.identity()));
        assert!(!in_wi(&a2, &[], &a2.element_from_word(&[0])));
    }

    #[test]
    fn classify_examples() {
        let b3 = RootSystem::split(B, 3).unwrap();
        let mid = standard_subsystem(&b3, &[0, 2]);
        assert_eq!(classify_type(&b3, &mid.members).unwrap(), comps(&[(A, 1), (A, 1)]));
        let b5 = RootSystem::split(B, 5).unwrap();
        assert_eq!(classify_type(&b5, &standard_subsystem(&b5, &[1, 2, 3, 4]).members).unwrap(), comps(&[(B, 4)]));
        let c4 = RootSystem::split(C, 4).unwrap();
        assert_eq!(classify_type(&c4, &standard_subsystem(&c4, &[1, 2, 3]).members).unwrap(), comps(&[(C, 3)]));
        assert_eq!(classify_type(&c4, &standard_subsystem(&c4, &[2, 3]).members).unwrap(), comps(&[(B, 2)]));
        let f4 = RootSystem::split(F, 4).unwrap();
        assert_eq!(classify_type(&f4, &standard_subsystem(&f4, &[1, 2, 3]).members).unwrap(), comps(&[(C, 3)]));
        assert_eq!(classify_type(&f4, &standard_subsystem(&f4, &[0, 1, 2]).members).unwrap(), comps(&[(B, 3)]));
        for (t, n) in [(E, 8), (E, 7), (E, 6), (F, 4), (G, 2), (D, 6), (B, 4), (C, 5), (A, 5)] {
            let rs = RootSystem::split(t, n).unwrap();
            assert_eq!(classify_type(&rs, &RootSet::full(rs.num_roots())).unwrap(), comps(&[(t, n)]));
        }
        let e8 = RootSystem::split(E, 8).unwrap();
        let d = standard_subsystem(&e8, &[0, 1, 2, 3, 4, 5, 7]);
        assert_eq!(classify_type(&e8, &d.members).unwrap(), comps(&[(A, 1), (E, 6)]));
    }

    #[test]
    fn standard_equals_orthogonal_to_complement() {
        for (t, n) in [(A, 3), (B, 3), (C, 4), (D, 4), (F, 4), (G, 2)] {
            let rs = RootSystem::split(t, n).unwrap();
            for bits in 0u32..1 << n {
                let nodes: Vec<usize> = (0..n).filter(|i| bits >> i & 1 == 1).collect();
                let std = standard_subsystem(&rs, &nodes);
                let normals = normals_of(&rs, &std.members);
                let mut orth = orthogonal_subsystem(&rs, &normals);
                if nodes.is_empty() {
                    // no normals would mean "everything"; the complement of ∅ is the whole root span
                    orth = orthogonal_subsystem(&rs, &rs.fundamental_coweights().to_vec());
                }
                assert_eq!(std.members, orth.members, "{t}{n} {nodes:?}");
                assert_eq!(std.len() % 2, 0);
                assert_eq!(std.rank, set_rank(&rs, &std.members));
            }
        }
    }

    #[test]
    fn span_and_semistandard() {
        let b3 = RootSystem::split(B, 3).unwrap();
        let s = span_subsystem(&b3, &[qvec(&[1, 0, 0]), qvec(&[0, 1, 0])]);
        assert_eq!(s.len(), 8);
        assert!(is_semistandard(&b3, &s.members));
        let a1 = RootSet::from_indices(b3.num_roots(), [0, b3.negative_of(0)]);
        assert!(is_semistandard(&b3, &a1));
    }

    #[test]
    fn set_orbit_of_a1_is_root_lines() {
        let b2 = RootSystem::split(B, 2).unwrap();
        let a1 = RootSet::from_indices(b2.num_roots(), [0, b2.negative_of(0)]);
        let orbit = set_orbit(&b2, &a1, DEFAULT_CAP).unwrap();
        assert_eq!(orbit.len(), 2); // the two long-root lines
        for (s, w) in &orbit {
            assert_eq!(&a1.permuted(&b2.element_from_word(w).root_perm), s);
        }
    }

    #[test]
    fn type_strings() {
        assert_eq!(type_string(&comps(&[(A, 1), (A, 1)])), "A1xA1");
        assert_eq!(type_string(&[]), "empty");
    }
}
