//! Reduced root systems in their standard Euclidean models, with exact
//! rational coordinates, Weyl-group actions and dominance tests.
//!
//! Nodes are numbered from 0 in Bourbaki order, so Bourbaki's α₁ is node 0.

use std::cmp::Reverse;
use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, q, qf, Q, QVec};

pub const DEFAULT_CAP: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CartanType {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl CartanType {
    pub fn from_char(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'A' => Some(Self::A),
            'B' => Some(Self::B),
            'C' => Some(Self::C),
            'D' => Some(Self::D),
            'E' => Some(Self::E),
            'F' => Some(Self::F),
            'G' => Some(Self::G),
            _ => None,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Self::A => 'A',
            Self::B => 'B',
            Self::C => 'C',
            Self::D => 'D',
            Self::E => 'E',
            Self::F => 'F',
            Self::G => 'G',
        }
    }

    pub fn is_valid(self, rank: usize) -> bool {
        match self {
            Self::A => rank >= 1,
            Self::B => rank >= 2,
            Self::C => rank >= 3,
            Self::D => rank >= 4,
            Self::E => (6..=8).contains(&rank),
            Self::F => rank == 4,
            Self::G => rank == 2,
        }
    }

    pub fn root_count(self, n: usize) -> usize {
        match self {
            Self::A => n * (n + 1),
            Self::B | Self::C => 2 * n * n,
            Self::D => 2 * n * (n - 1),
            Self::E => match n {
                6 => 72,
                7 => 126,
                _ => 240,
            },
            Self::F => 48,
            Self::G => 12,
        }
    }
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Canonical name of a connected Dynkin diagram, folding the low-rank
/// coincidences B1 = A1, C1 = A1, C2 = B2, D2 = A1×A1 (not connected), D3 = A3.
pub fn canonical_type(t: CartanType, n: usize) -> (CartanType, usize) {
    match (t, n) {
        (CartanType::B, 1) | (CartanType::C, 1) => (CartanType::A, 1),
        (CartanType::C, 2) => (CartanType::B, 2),
        (CartanType::D, 3) => (CartanType::A, 3),
        _ => (t, n),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Form {
    #[default]
    Split,
    Complex,
}

/// Which Euclidean model realises E6.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum E6Model {
    /// The first six Bourbaki nodes of the E8 model in ℝ⁸.
    #[default]
    InE8,
    /// Three copies of A2 in ℝ⁹ glued by the (2/3,−1/3,−1/3) vectors.
    TripleA2,
}

/// A Weyl group element. Equality and hashing use the root permutation only;
/// the word is one witness among many.
#[derive(Clone, Debug)]
pub struct WeylElement {
    /// Simple-reflection indices; `[i, j]` means `s_i s_j`.
    pub word: Vec<u8>,
    /// `root_perm[k]` is the index of `w(root k)`.
    pub root_perm: Vec<u16>,
}

impl PartialEq for WeylElement {
    fn eq(&self, other: &Self) -> bool {
        self.root_perm == other.root_perm
    }
}
impl Eq for WeylElement {}

impl std::hash::Hash for WeylElement {
    fn hash<H: std::hash::Hasher>(&self, h: &mut H) {
        self.root_perm.hash(h)
    }
}

impl WeylElement {
    pub fn is_identity(&self) -> bool {
        self.root_perm.iter().enumerate().all(|(i, &p)| p as usize == i)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &WeylElement) -> WeylElement {
        let mut word = self.word.clone();
        word.extend_from_slice(&other.word);
        let root_perm = other.root_perm.iter().map(|&i| self.root_perm[i as usize]).collect();
        WeylElement { word, root_perm }
    }

    pub fn inverse(&self) -> WeylElement {
        let mut root_perm = vec![0u16; self.root_perm.len()];
        for (i, &p) in self.root_perm.iter().enumerate() {
            root_perm[p as usize] = i as u16;
        }
        WeylElement { word: self.word.iter().rev().copied().collect(), root_perm }
    }

    pub fn act(&self, root: usize) -> usize {
        self.root_perm[root] as usize
    }

    pub fn length(&self, rs: &RootSystem) -> usize {
        (0..rs.num_positive()).filter(|&i| !rs.is_positive(self.act(i))).count()
    }
}

#[derive(Clone, Debug)]
pub struct OrbitPoint {
    pub vector: QVec,
    /// Word `w` with `vector = w · seed`.
    pub word: Vec<u8>,
}

#[derive(Clone, Debug)]
pub struct RootSystem {
    cartan: CartanType,
    rank: usize,
    dim: usize,
    e6_model: Option<E6Model>,
    roots: Vec<QVec>,
    roots_f64: Vec<Vec<f64>>,
    npos: usize,
    coords: Vec<Vec<i64>>,
    mult: Vec<u32>,
    mult2: Vec<u32>,
    index: HashMap<QVec, usize>,
    simple_perms: Vec<Vec<u16>>,
    coweights: Vec<QVec>,
    weights: Vec<QVec>,
    /// Basis of the orthogonal complement of the root span.
    orth: Vec<QVec>,
}

fn e(dim: usize, entries: &[(usize, Q)]) -> QVec {
    let mut v = exact::zero(dim);
    for &(i, c) in entries {
        v[i] += c;
    }
    v
}

fn diff(dim: usize, i: usize, j: usize) -> QVec {
    e(dim, &[(i, q(1)), (j, q(-1))])
}

fn model(t: CartanType, n: usize, e6: E6Model) -> (usize, Vec<QVec>) {
    use CartanType::*;
    let half = qf(1, 2);
    match t {
        A => (n + 1, (0..n).map(|i| diff(n + 1, i, i + 1)).collect()),
        B | C | D => {
            let mut s: Vec<QVec> = (0..n - 1).map(|i| diff(n, i, i + 1)).collect();
            s.push(match t {
                B => e(n, &[(n - 1, q(1))]),
                C => e(n, &[(n - 1, q(2))]),
                _ => e(n, &[(n - 2, q(1)), (n - 1, q(1))]),
            });
            (n, s)
        }
        G => (3, vec![diff(3, 0, 1), e(3, &[(0, q(-2)), (1, q(1)), (2, q(1))])]),
        F => (
            4,
            vec![
                diff(4, 1, 2),
                diff(4, 2, 3),
                e(4, &[(3, q(1))]),
                e(4, &[(0, half), (1, -half), (2, -half), (3, -half)]),
            ],
        ),
        E if n == 7 => {
            let a2: QVec = (0..8).map(|k| if k < 4 { half } else { -half }).collect();
            let mut s = vec![diff(8, 2, 1), a2];
            for k in 2..7 {
                s.push(diff(8, k + 1, k));
            }
            (8, s)
        }
        E if n == 6 && e6 == E6Model::TripleA2 => {
            let third = qf(1, 3);
            let gamma: QVec = [1, -2, 1, -2, 1, 1, -2, 1, 1].iter().map(|&c| third * c).collect();
            (
                9,
                vec![diff(9, 4, 5), diff(9, 1, 2), diff(9, 3, 4), gamma, diff(9, 6, 7), diff(9, 7, 8)],
            )
        }
        E => {
            let mhalf: QVec = vec![-half; 8];
            let e8 = vec![
                mhalf,
                diff(8, 5, 6),
                e(8, &[(5, q(1)), (6, q(1))]),
                diff(8, 4, 5),
                diff(8, 3, 4),
                diff(8, 2, 3),
                diff(8, 1, 2),
                diff(8, 0, 1),
            ];
            (8, e8[..n].to_vec())
        }
    }
}

impl RootSystem {
    pub fn new(t: CartanType, rank: usize, form: Form) -> Result<Self> {
        Self::with_e6_model(t, rank, form, E6Model::default())
    }

    pub fn split(t: CartanType, rank: usize) -> Result<Self> {
        Self::new(t, rank, Form::Split)
    }

    pub fn with_e6_model(t: CartanType, rank: usize, form: Form, e6: E6Model) -> Result<Self> {
        if !t.is_valid(rank) {
            return Err(Error::InvalidType { label: t.letter(), rank });
        }
        let (dim, simple) = model(t, rank, e6);
        let mut rs = Self::from_simple_roots(t, dim, simple)?;
        if t == CartanType::E && rank == 6 {
            rs.e6_model = Some(e6);
        }
        if form == Form::Complex {
            rs.mult = vec![2; rs.npos];
        }
        Ok(rs)
    }

    /// Builds the root system generated by the given simple roots (listed in
    /// Bourbaki order) by closing them under the simple reflections.
    pub fn from_simple_roots(cartan: CartanType, dim: usize, simple: Vec<QVec>) -> Result<Self> {
        let r = simple.len();
        if exact::gram_det(&simple).is_zero() {
            return Err(Error::Invalid("simple roots are linearly dependent".into()));
        }
        let reflect = |v: &QVec, a: &QVec| -> QVec {
            let c = q(2) * exact::dot(v, a) / exact::dot(a, a);
            exact::sub(v, &exact::scale(c, a))
        };
        let mut seen: HashSet<QVec> = simple.iter().cloned().collect();
        let mut queue: VecDeque<QVec> = simple.iter().cloned().collect();
        while let Some(v) = queue.pop_front() {
            for a in &simple {
                let u = reflect(&v, a);
                if seen.insert(u.clone()) {
                    queue.push_back(u);
                }
            }
            if seen.len() > 100_000 {
                return Err(Error::Invalid("simple roots do not generate a finite root system".into()));
            }
        }
        let gram: Vec<QVec> = simple.iter().map(|a| simple.iter().map(|b| exact::dot(a, b)).collect()).collect();
        let ginv = exact::inverse(&gram).ok_or(Error::Singular)?;
        let coords_of = |v: &QVec| -> Result<Vec<i64>> {
            let pair: Vec<Q> = simple.iter().map(|a| exact::dot(v, a)).collect();
            (0..r)
                .map(|k| {
                    let c: Q = (0..r).map(|j| ginv[k][j] * pair[j]).sum();
                    if c.is_integer() {
                        Ok(c.to_integer())
                    } else {
                        Err(Error::Invalid("root is not an integral combination of simple roots".into()))
                    }
                })
                .collect()
        };
        let mut pos: Vec<(Vec<i64>, QVec)> = Vec::new();
        for v in &seen {
            let c = coords_of(v)?;
            if c.iter().all(|&x| x >= 0) {
                pos.push((c, v.clone()));
            } else if !c.iter().all(|&x| x <= 0) {
                return Err(Error::Invalid("root with mixed-sign coordinates".into()));
            }
        }
        pos.sort_by_key(|(c, _)| (c.iter().sum::<i64>(), Reverse(c.clone())));
        let npos = pos.len();
        if 2 * npos != seen.len() {
            return Err(Error::Invalid("root set is not closed under negation".into()));
        }
        let mut roots: Vec<QVec> = pos.iter().map(|(_, v)| v.clone()).collect();
        let mut coords: Vec<Vec<i64>> = pos.iter().map(|(c, _)| c.clone()).collect();
        for k in 0..npos {
            roots.push(exact::neg(&roots[k]));
            coords.push(coords[k].iter().map(|x| -x).collect());
        }
        for (k, s) in simple.iter().enumerate() {
            if &roots[k] != s {
                return Err(Error::Invalid("simple roots are not a base".into()));
            }
        }
        let index: HashMap<QVec, usize> = roots.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
        let simple_perms = (0..r)
            .map(|j| roots.iter().map(|v| index[&reflect(v, &simple[j])] as u16).collect())
            .collect();
        let coweights: Vec<QVec> = (0..r)
            .map(|i| {
                (0..r).fold(exact::zero(dim), |acc, k| exact::add(&acc, &exact::scale(ginv[i][k], &simple[k])))
            })
            .collect();
        let weights = (0..r)
            .map(|i| exact::scale(exact::dot(&simple[i], &simple[i]) / q(2), &coweights[i]))
            .collect();
        let orth = exact::nullspace(&simple, dim);
        let roots_f64 = roots.iter().map(|v| exact::to_f64(v)).collect();
        Ok(Self {
            cartan,
            rank: r,
            dim,
            e6_model: None,
            roots,
            roots_f64,
            npos,
            coords,
            mult: vec![1; npos],
            mult2: vec![0; npos],
            index,
            simple_perms,
            coweights,
            weights,
            orth,
        })
    }

    /// Replaces the multiplicities of the positive roots (negatives share
    /// them). Values are not checked against the real-form classification.
    pub fn with_multiplicities(mut self, mult: Vec<u32>, mult2: Vec<u32>) -> Result<Self> {
        if mult.len() != self.npos || mult2.len() != self.npos || mult.contains(&0) {
            return Err(Error::Invalid("one positive multiplicity per positive root required".into()));
        }
        self.mult = mult;
        self.mult2 = mult2;
        Ok(self)
    }

    pub fn cartan(&self) -> CartanType {
        self.cartan
    }
    pub fn rank(&self) -> usize {
        self.rank
    }
    pub fn ambient_dim(&self) -> usize {
        self.dim
    }
    pub fn e6_model(&self) -> Option<E6Model> {
        self.e6_model
    }
    pub fn label(&self) -> String {
        format!("{}{}", self.cartan, self.rank)
    }
    pub fn roots(&self) -> &[QVec] {
        &self.roots
    }
    pub fn root(&self, i: usize) -> &QVec {
        &self.roots[i]
    }
    pub fn root_f64(&self, i: usize) -> &[f64] {
        &self.roots_f64[i]
    }
    pub fn num_roots(&self) -> usize {
        self.roots.len()
    }
    pub fn num_positive(&self) -> usize {
        self.npos
    }
    pub fn is_positive(&self, i: usize) -> bool {
        i < self.npos
    }
    pub fn negative_of(&self, i: usize) -> usize {
        (i + self.npos) % (2 * self.npos)
    }
    /// Simple roots occupy indices `0..rank`.
    pub fn simple_roots(&self) -> Vec<usize> {
        (0..self.rank).collect()
    }
    pub fn simple_coords(&self, i: usize) -> &[i64] {
        &self.coords[i]
    }
    pub fn height(&self, i: usize) -> i64 {
        self.coords[i].iter().sum()
    }
    pub fn multiplicity(&self, i: usize) -> u32 {
        self.mult[i % self.npos]
    }
    pub fn multiplicity2(&self, i: usize) -> u32 {
        self.mult2[i % self.npos]
    }
    pub fn index_of(&self, v: &[Q]) -> Option<usize> {
        self.index.get(v).copied()
    }
    pub fn simple_perm(&self, j: usize) -> &[u16] {
        &self.simple_perms[j]
    }
    pub fn fundamental_coweights(&self) -> &[QVec] {
        &self.coweights
    }
    pub fn fundamental_weights(&self) -> &[QVec] {
        &self.weights
    }
    pub fn norm2(&self, i: usize) -> Q {
        exact::dot(&self.roots[i], &self.roots[i])
    }

    /// ρ = ½ Σ_{α>0} (m_α + 2 m_{2α}) α.
    pub fn rho(&self) -> QVec {
        let mut acc = exact::zero(self.dim);
        for i in 0..self.npos {
            let m = q((self.mult[i] + 2 * self.mult2[i]) as i64);
            acc = exact::add(&acc, &exact::scale(m, &self.roots[i]));
        }
        exact::scale(qf(1, 2), &acc)
    }

    pub fn rho_f64(&self) -> Vec<f64> {
        exact::to_f64(&self.rho())
    }

    /// `v − 2⟨v,α⟩/⟨α,α⟩ · α`.
    pub fn reflect(&self, alpha: usize, v: &[Q]) -> QVec {
        let a = &self.roots[alpha];
        let c = q(2) * exact::dot(v, a) / exact::dot(a, a);
        exact::sub(v, &exact::scale(c, a))
    }

    pub fn reflect_f64(&self, alpha: usize, v: &[f64]) -> Vec<f64> {
        let a = &self.roots_f64[alpha];
        let c = 2.0 * dotf(v, a) / dotf(a, a);
        v.iter().zip(a).map(|(x, y)| x - c * y).collect()
    }

    pub fn reflection_perm(&self, alpha: usize) -> Vec<u16> {
        self.roots.iter().map(|v| self.index[&self.reflect(alpha, v)] as u16).collect()
    }

    pub fn identity(&self) -> WeylElement {
        WeylElement { word: Vec::new(), root_perm: (0..self.num_roots() as u16).collect() }
    }

    pub fn element_from_word(&self, word: &[u8]) -> WeylElement {
        let mut perm: Vec<u16> = (0..self.num_roots() as u16).collect();
        for &j in word.iter().rev() {
            let s = &self.simple_perms[j as usize];
            for p in perm.iter_mut() {
                *p = s[*p as usize];
            }
        }
        WeylElement { word: word.to_vec(), root_perm: perm }
    }

    /// The reflection in an arbitrary root, as a Weyl element (word found by
    /// conjugating to a simple root).
    pub fn reflection_element(&self, alpha: usize) -> WeylElement {
        let pos = if self.is_positive(alpha) { alpha } else { self.negative_of(alpha) };
        // Walk down in height: s_j β with ⟨β, α_j⟩ > 0 lowers the height.
        let mut beta = pos;
        let mut path = Vec::new();
        while beta >= self.rank {
            let j = (0..self.rank)
                .find(|&j| exact::dot(&self.roots[beta], &self.roots[j]).is_positive())
                .expect("non-simple positive root has a descent");
            path.push(j as u8);
            beta = self.simple_perms[j][beta] as usize;
        }
        // s_α = u s_β u⁻¹ with u = s_{path[0]} … s_{path[k-1]}.
        let mut word: Vec<u8> = path.clone();
        word.push(beta as u8);
        word.extend(path.iter().rev());
        self.element_from_word(&word)
    }

    pub fn apply_word(&self, word: &[u8], v: &[Q]) -> QVec {
        let mut out = v.to_vec();
        for &j in word.iter().rev() {
            out = self.reflect(j as usize, &out);
        }
        out
    }

    pub fn apply_word_f64(&self, word: &[u8], v: &[f64]) -> Vec<f64> {
        let mut out = v.to_vec();
        for &j in word.iter().rev() {
            out = self.reflect_f64(j as usize, &out);
        }
        out
    }

    pub fn apply(&self, w: &WeylElement, v: &[Q]) -> QVec {
        self.apply_word(&w.word, v)
    }

    /// BFS closure of `{v}` under the simple reflections, each point with a
    /// generating word.
    pub fn weyl_orbit(&self, v: &[Q], cap: usize) -> Result<Vec<OrbitPoint>> {
        self.orbit_under(v, &(0..self.rank).collect::<Vec<_>>(), cap)
    }

    /// Orbit of `v` under the parabolic subgroup generated by `nodes`.
    pub fn orbit_under(&self, v: &[Q], nodes: &[usize], cap: usize) -> Result<Vec<OrbitPoint>> {
        let mut seen: HashSet<QVec> = HashSet::new();
        seen.insert(v.to_vec());
        let mut out = vec![OrbitPoint { vector: v.to_vec(), word: Vec::new() }];
        let mut head = 0;
        while head < out.len() {
            for &j in nodes {
                let u = self.reflect(j, &out[head].vector);
                if !seen.contains(&u) {
                    if out.len() >= cap {
                        return Err(Error::OrbitCap { cap });
                    }
                    seen.insert(u.clone());
                    let mut word = vec![j as u8];
                    word.extend_from_slice(&out[head].word);
                    out.push(OrbitPoint { vector: u, word });
                }
            }
            head += 1;
        }
        Ok(out)
    }

    /// |W| by a stabiliser chain: |W_I| = |W_I · ϖ_i^∨| · |W_{I∖{i}}|, where
    /// at each step the node with the smallest orbit is used.
    pub fn weyl_order(&self) -> u128 {
        self.parabolic_order(&(0..self.rank).collect::<Vec<_>>())
    }

    pub fn parabolic_order(&self, nodes: &[usize]) -> u128 {
        let mut nodes = nodes.to_vec();
        let mut order: u128 = 1;
        while !nodes.is_empty() {
            let mut best: Option<(usize, usize)> = None;
            for (pos, &i) in nodes.iter().enumerate() {
                let cap = best.map_or(DEFAULT_CAP, |(_, s)| s);
                if let Ok(orbit) = self.orbit_under(&self.coweights[i], &nodes, cap) {
                    if best.is_none_or(|(_, s)| orbit.len() < s) {
                        best = Some((pos, orbit.len()));
                    }
                }
            }
            let (pos, size) = best.expect("some coweight orbit fits under the cap");
            order *= size as u128;
            nodes.remove(pos);
        }
        order
    }

    /// All elements of W as root permutations.
    pub fn weyl_enumerate(&self, cap: usize) -> Result<Vec<WeylElement>> {
        let order = self.weyl_order();
        if order > cap as u128 {
            return Err(Error::EnumerationCap { order, cap });
        }
        Ok(self.enumerate_generated(&(0..self.rank).collect::<Vec<_>>()))
    }

    /// Elements of the subgroup generated by the given simple reflections.
    pub fn enumerate_generated(&self, nodes: &[usize]) -> Vec<WeylElement> {
        let id = self.identity();
        let mut seen: HashSet<Vec<u16>> = HashSet::new();
        seen.insert(id.root_perm.clone());
        let mut out = vec![id];
        let mut head = 0;
        while head < out.len() {
            for &j in nodes {
                let s = &self.simple_perms[j];
                let perm: Vec<u16> = out[head].root_perm.iter().map(|&p| s[p as usize]).collect();
                if seen.insert(perm.clone()) {
                    let mut word = vec![j as u8];
                    word.extend_from_slice(&out[head].word);
                    out.push(WeylElement { word, root_perm: perm });
                }
            }
            head += 1;
        }
        out
    }

    pub fn is_dominant(&self, h: &[Q]) -> bool {
        (0..self.rank).all(|j| !exact::dot(h, &self.roots[j]).is_negative())
    }

    pub fn is_dominant_f64(&self, h: &[f64], tol: f64) -> bool {
        (0..self.rank).all(|j| dotf(h, &self.roots_f64[j]) >= -tol)
    }

    /// (H⁺, w) with H⁺ = wH dominant.
    pub fn dominant_representative(&self, h: &[Q]) -> (QVec, WeylElement) {
        let mut cur = h.to_vec();
        let mut steps: Vec<u8> = Vec::new();
        while let Some(j) = (0..self.rank).find(|&j| exact::dot(&cur, &self.roots[j]).is_negative()) {
            cur = self.reflect(j, &cur);
            steps.push(j as u8);
        }
        steps.reverse();
        let w = self.element_from_word(&steps);
        (cur, w)
    }

    /// Floating-point dominant representative and its word.
    pub fn dominant_f64(&self, h: &[f64]) -> (Vec<f64>, Vec<u8>) {
        let mut cur = h.to_vec();
        let mut steps: Vec<u8> = Vec::new();
        let scale = h.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        let tol = 1e-13 * scale;
        while let Some(j) = (0..self.rank).find(|&j| dotf(&cur, &self.roots_f64[j]) < -tol) {
            cur = self.reflect_f64(j, &cur);
            steps.push(j as u8);
            if steps.len() > 10_000 {
                break;
            }
        }
        steps.reverse();
        (cur, steps)
    }

    /// `H ∈ Conv(W·Y)` for dominant `Y`, by ⟨Y − H⁺, ϖ_j⟩ ≥ 0 for all j.
    pub fn conv_dominance(&self, h: &[Q], y: &[Q]) -> Result<bool> {
        if !self.is_dominant(y) {
            return Err(Error::NotDominant);
        }
        let (hp, _) = self.dominant_representative(h);
        let d = exact::sub(y, &hp);
        if self.orth.iter().any(|n| !exact::dot(n, &d).is_zero()) {
            return Ok(false);
        }
        Ok(self.weights.iter().all(|wt| !exact::dot(&d, wt).is_negative()))
    }

    pub fn conv_dominance_f64(&self, h: &[f64], y: &[f64], tol: f64) -> Result<bool> {
        if !self.is_dominant_f64(y, tol) {
            return Err(Error::NotDominant);
        }
        let (hp, _) = self.dominant_f64(h);
        let d: Vec<f64> = y.iter().zip(&hp).map(|(a, b)| a - b).collect();
        for n in &self.orth {
            let nf = exact::to_f64(n);
            if dotf(&nf, &d).abs() > tol * (1.0 + dotf(&nf, &nf).sqrt()) {
                return Ok(false);
            }
        }
        Ok(self.weights.iter().all(|wt| dotf(&d, &exact::to_f64(wt)) >= -tol))
    }

    /// The element mapping Φ⁺ onto −Φ⁺.
    pub fn longest_element(&self) -> WeylElement {
        let mut minus_rho = exact::zero(self.dim);
        for i in 0..self.npos {
            minus_rho = exact::sub(&minus_rho, &self.roots[i]);
        }
        self.dominant_representative(&minus_rho).1
    }

    /// Orthogonal complement of the root span inside the ambient space.
    pub fn orthogonal_complement(&self) -> &[QVec] {
        &self.orth
    }

    /// Checks the structural invariants: negation closure, independence of
    /// the simple roots, integrality and sign of simple coordinates, and that
    /// every reflection permutes the roots.
    pub fn validate(&self) -> std::result::Result<(), String> {
        for (i, v) in self.roots.iter().enumerate() {
            if self.index_of(&exact::neg(v)) != Some(self.negative_of(i)) {
                return Err(format!("root {i} has no negative at the expected index"));
            }
        }
        let simple: Vec<QVec> = self.roots[..self.rank].to_vec();
        if exact::gram_det(&simple).is_zero() {
            return Err("simple roots dependent".into());
        }
        for i in 0..self.npos {
            let recon = self.coords[i]
                .iter()
                .enumerate()
                .fold(exact::zero(self.dim), |acc, (k, &c)| exact::add(&acc, &exact::scale(q(c), &simple[k])));
            if recon != self.roots[i] || self.coords[i].iter().any(|&c| c < 0) {
                return Err(format!("positive root {i} is not a nonnegative combination"));
            }
        }
        for a in 0..self.num_roots() {
            let mut hit = vec![false; self.num_roots()];
            for v in &self.roots {
                match self.index_of(&self.reflect(a, v)) {
                    Some(k) if !hit[k] => hit[k] = true,
                    _ => return Err(format!("reflection in root {a} does not permute the roots")),
                }
            }
        }
        if self.num_roots() != self.cartan.root_count(self.rank) {
            return Err(format!("{} roots, expected {}", self.num_roots(), self.cartan.root_count(self.rank)));
        }
        Ok(())
    }
}

pub fn dotf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::qvec;
    use CartanType::*;

    fn all_types() -> Vec<(CartanType, usize)> {
        vec![(A, 1), (A, 2), (A, 3), (A, 5), (B, 2), (B, 3), (B, 4), (C, 3), (C, 4), (D, 4), (D, 5), (E, 6), (E, 7), (E, 8), (F, 4), (G, 2)]
    }

    #[test]
    fn invariants_hold_for_every_model() {
        for (t, n) in all_types() {
            let rs = RootSystem::split(t, n).unwrap();
            rs.validate().unwrap_or_else(|e| panic!("{t}{n}: {e}"));
        }
        let e6 = RootSystem::with_e6_model(E, 6, Form::Split, E6Model::TripleA2).unwrap();
        e6.validate().unwrap();
        assert_eq!(e6.ambient_dim(), 9);
    }

    #[test]
    fn counts_from_examples() {
        let a2 = RootSystem::split(A, 2).unwrap();
        assert_eq!((a2.num_roots(), a2.num_positive()), (6, 3));
        assert_eq!(RootSystem::split(G, 2).unwrap().num_roots(), 12);
        assert_eq!(RootSystem::split(E, 7).unwrap().num_roots(), 126);
    }

    #[test]
    fn invalid_pairs_are_rejected() {
        for (t, n) in [(B, 1), (C, 2), (D, 3), (E, 5), (E, 9), (F, 3), (G, 3), (A, 0)] {
            assert_eq!(RootSystem::split(t, n).unwrap_err(), Error::InvalidType { label: t.letter(), rank: n });
        }
    }

    #[test]
    fn complex_form_doubles_multiplicities() {
        let rs = RootSystem::new(A, 2, Form::Complex).unwrap();
        assert!((0..rs.num_roots()).all(|i| rs.multiplicity(i) == 2));
        assert_eq!(rs.rho(), exact::scale(q(2), &RootSystem::split(A, 2).unwrap().rho()));
    }

    /// Cartan matrices of the models match the Bourbaki diagrams.
    #[test]
    fn bourbaki_labelling() {
        let cartan = |rs: &RootSystem| -> Vec<Vec<i64>> {
            (0..rs.rank())
                .map(|i| {
                    (0..rs.rank())
                        .map(|j| (q(2) * exact::dot(rs.root(i), rs.root(j)) / rs.norm2(j)).to_integer())
                        .collect()
                })
                .collect()
        };
        let e8 = cartan(&RootSystem::split(E, 8).unwrap());
        let edges: Vec<(usize, usize)> = vec![(0, 2), (2, 3), (1, 3), (3, 4), (4, 5), (5, 6), (6, 7)];
        for i in 0..8 {
            for j in 0..8 {
                let expect = if i == j {
                    2
                } else if edges.contains(&(i, j)) || edges.contains(&(j, i)) {
                    -1
                } else {
                    0
                };
                assert_eq!(e8[i][j], expect, "E8 entry {i},{j}");
            }
        }
        for model in [E6Model::InE8, E6Model::TripleA2] {
            let c = cartan(&RootSystem::with_e6_model(E, 6, Form::Split, model).unwrap());
            assert_eq!(c[0][2], -1);
            assert_eq!(c[1][3], -1);
            assert_eq!(c[4][5], -1);
            assert_eq!(c[1][2], 0);
        }
        let e7 = cartan(&RootSystem::split(E, 7).unwrap());
        assert_eq!((e7[1][3], e7[0][2], e7[5][6], e7[1][2]), (-1, -1, -1, 0));
        let f4 = cartan(&RootSystem::split(F, 4).unwrap());
        assert_eq!((f4[1][2], f4[2][1]), (-2, -1));
        let g2 = cartan(&RootSystem::split(G, 2).unwrap());
        assert_eq!((g2[0][1], g2[1][0]), (-1, -3));
        let b3 = cartan(&RootSystem::split(B, 3).unwrap());
        assert_eq!((b3[1][2], b3[2][1]), (-2, -1));
        let c3 = cartan(&RootSystem::split(C, 3).unwrap());
        assert_eq!((c3[1][2], c3[2][1]), (-1, -2));
    }

    #[test]
    fn reflect_negates_its_root() {
        let a1 = RootSystem::split(A, 1).unwrap();
        assert_eq!(a1.reflect(0, a1.root(0)), exact::neg(a1.root(0)));
    }

    #[test]
    fn reflection_fixes_other_coweights() {
        let a2 = RootSystem::split(A, 2).unwrap();
        let cw = a2.fundamental_coweights();
        let v = exact::add(&cw[0], &exact::scale(q(3), &cw[1]));
        let r = a2.reflect(0, &v);
        // only the α1-coordinate changes sign
        assert_eq!(exact::dot(&r, a2.root(0)), -exact::dot(&v, a2.root(0)));
        assert_eq!(exact::dot(&r, a2.root(1)) - exact::dot(&v, a2.root(1)), exact::dot(&v, a2.root(0)));
        let moved = exact::sub(&r, &v);
        assert_eq!(moved, exact::scale(-exact::dot(&v, a2.root(0)), a2.root(0)));
    }

    #[test]
    fn dual_bases() {
        for (t, n) in all_types() {
            let rs = RootSystem::split(t, n).unwrap();
            for i in 0..n {
                for j in 0..n {
                    let d = exact::dot(&rs.fundamental_coweights()[i], rs.root(j));
                    assert_eq!(d, if i == j { q(1) } else { q(0) });
                    let coroot = exact::scale(q(2) / rs.norm2(j), rs.root(j));
                    let d2 = exact::dot(&rs.fundamental_weights()[i], &coroot);
                    assert_eq!(d2, if i == j { q(1) } else { q(0) });
                }
            }
        }
    }

    #[test]
    fn orbit_examples() {
        let e7 = RootSystem::split(E, 7).unwrap();
        let mut v = exact::zero(8);
        v[0] = q(1);
        v[7] = q(1);
        let orbit = e7.weyl_orbit(&v, DEFAULT_CAP).unwrap();
        assert_eq!(orbit.len(), 56);
        for p in &orbit {
            assert_eq!(e7.apply_word(&p.word, &v), p.vector);
        }
        let b3 = RootSystem::split(B, 3).unwrap();
        let o = b3.weyl_orbit(&qvec(&[1, 0, 0]), DEFAULT_CAP).unwrap();
        let mut got: Vec<QVec> = o.into_iter().map(|p| p.vector).collect();
        got.sort();
        let mut want = Vec::new();
        for i in 0..3 {
            for s in [1, -1] {
                let mut u = exact::zero(3);
                u[i] = q(s);
                want.push(u);
            }
        }
        want.sort();
        assert_eq!(got, want);
        assert_eq!(b3.weyl_orbit(&exact::zero(3), DEFAULT_CAP).unwrap().len(), 1);
        assert_eq!(e7.weyl_orbit(&v, 10).unwrap_err(), Error::OrbitCap { cap: 10 });
    }

    #[test]
    fn weyl_orders() {
        let expect = [((A, 3), 24u128), ((B, 3), 48), ((C, 3), 48), ((D, 4), 192), ((G, 2), 12), ((F, 4), 1152), ((E, 6), 51840), ((E, 7), 2903040)];
        for ((t, n), o) in expect {
            assert_eq!(RootSystem::split(t, n).unwrap().weyl_order(), o, "{t}{n}");
        }
    }

    #[test]
    fn enumeration_matches_order() {
        for (t, n) in [(A, 1), (A, 2), (B, 2), (A, 3), (B, 3), (C, 3), (G, 2), (B, 4), (D, 4), (F, 4)] {
            let rs = RootSystem::split(t, n).unwrap();
            let els = rs.weyl_enumerate(DEFAULT_CAP).unwrap();
            assert_eq!(els.len() as u128, rs.weyl_order(), "{t}{n}");
            let set: HashSet<_> = els.iter().cloned().collect();
            assert_eq!(set.len(), els.len());
            for w in &els {
                assert_eq!(rs.element_from_word(&w.word), *w);
            }
        }
        assert_eq!(RootSystem::split(A, 2).unwrap().weyl_enumerate(DEFAULT_CAP).unwrap().len(), 6);
        assert_eq!(RootSystem::split(B, 2).unwrap().weyl_enumerate(DEFAULT_CAP).unwrap().len(), 8);
        let a1 = RootSystem::split(A, 1).unwrap().weyl_enumerate(DEFAULT_CAP).unwrap();
        assert_eq!(a1.len(), 2);
        assert!(a1[0].is_identity() && !a1[1].is_identity());
        assert!(matches!(RootSystem::split(E, 7).unwrap().weyl_enumerate(1000), Err(Error::EnumerationCap { .. })));
    }

    #[test]
    fn weyl_elements_preserve_inner_products() {
        for (t, n) in [(A, 3), (B, 3), (G, 2), (F, 4)] {
            let rs = RootSystem::split(t, n).unwrap();
            for w in rs.weyl_enumerate(DEFAULT_CAP).unwrap() {
                for i in 0..rs.num_roots() {
                    assert_eq!(&rs.apply(&w, rs.root(i)), rs.root(w.act(i)));
                }
                for i in 0..rs.rank() {
                    for j in 0..rs.rank() {
                        let a = rs.root(w.act(i));
                        let b = rs.root(w.act(j));
                        assert_eq!(exact::dot(a, b), exact::dot(rs.root(i), rs.root(j)));
                    }
                }
            }
        }
    }

    #[test]
    fn dominant_representative_examples() {
        let a1 = RootSystem::split(A, 1).unwrap();
        let coroot = a1.root(0).clone();
        let (hp, w) = a1.dominant_representative(&exact::neg(&coroot));
        assert_eq!(hp, coroot);
        assert_eq!(w, a1.element_from_word(&[0]));
        let (hp, w) = a1.dominant_representative(&coroot);
        assert_eq!(hp, coroot);
        assert!(w.is_identity());
    }

    #[test]
    fn longest_element_negates_positive_roots() {
        for (t, n) in all_types() {
            let rs = RootSystem::split(t, n).unwrap();
            let w0 = rs.longest_element();
            assert!((0..rs.num_positive()).all(|i| !rs.is_positive(w0.act(i))), "{t}{n}");
            assert_eq!(w0.length(&rs), rs.num_positive());
        }
    }

    #[test]
    fn reflection_elements_match_reflections() {
        let rs = RootSystem::split(F, 4).unwrap();
        for a in 0..rs.num_roots() {
            assert_eq!(rs.reflection_element(a).root_perm, rs.reflection_perm(a));
        }
    }

    #[test]
    fn conv_dominance_basics() {
        let a1 = RootSystem::split(A, 1).unwrap();
        let y = qvec(&[2, -2]);
        assert!(a1.conv_dominance(&y, &y).unwrap());
        assert!(a1.conv_dominance(&qvec(&[-1, 1]), &y).unwrap());
        assert!(!a1.conv_dominance(&qvec(&[3, -3]), &y).unwrap());
        assert!(!a1.conv_dominance(&qvec(&[1, 0]), &y).unwrap());
        assert_eq!(a1.conv_dominance(&y, &qvec(&[-1, 1])).unwrap_err(), Error::NotDominant);
    }
}
