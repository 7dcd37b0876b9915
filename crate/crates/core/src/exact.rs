//! Small exact linear-algebra kit over the rationals.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

pub type Q = Ratio<i64>;
pub type QVec = Vec<Q>;

pub fn q(n: i64) -> Q {
    Q::from_integer(n)
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

pub fn qvec(xs: &[i64]) -> QVec {
    xs.iter().map(|&x| q(x)).collect()
}

pub fn zero(n: usize) -> QVec {
    vec![Q::zero(); n]
}

pub fn unit(n: usize, i: usize) -> QVec {
    let mut v = zero(n);
    v[i] = Q::one();
    v
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

pub fn add(a: &[Q], b: &[Q]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Q], b: &[Q]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(c: Q, a: &[Q]) -> QVec {
    a.iter().map(|x| c * x).collect()
}

pub fn neg(a: &[Q]) -> QVec {
    a.iter().map(|x| -x).collect()
}

pub fn is_zero(a: &[Q]) -> bool {
    a.iter().all(|x| x.is_zero())
}

pub fn to_f64(a: &[Q]) -> Vec<f64> {
    a.iter().map(|x| *x.numer() as f64 / *x.denom() as f64).collect()
}

/// Determinant by Gaussian elimination with exact pivots.
pub fn det(mut m: Vec<QVec>) -> Q {
    let n = m.len();
    let mut d = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        let piv = m[c][c];
        d *= piv;
        for r in c + 1..n {
            if m[r][c].is_zero() {
                continue;
            }
            let f = m[r][c] / piv;
            for k in c..n {
                let v = m[c][k];
                m[r][k] -= f * v;
            }
        }
    }
    d
}

/// det(M Mᵀ) for the rows of M; zero exactly when the rows are dependent.
pub fn gram_det(rows: &[QVec]) -> Q {
    let g: Vec<QVec> = rows
        .iter()
        .map(|a| rows.iter().map(|b| dot(a, b)).collect())
        .collect();
    det(g)
}

pub fn rank(rows: &[QVec]) -> usize {
    row_echelon(rows.to_vec()).len()
}

/// Nonzero rows of a reduced row-echelon form.
pub fn row_echelon(mut m: Vec<QVec>) -> Vec<QVec> {
    if m.is_empty() {
        return m;
    }
    let cols = m[0].len();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(p, r);
        let piv = m[r][c];
        for k in 0..cols {
            m[r][k] /= piv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c];
                for k in 0..cols {
                    let v = m[r][k];
                    m[i][k] -= f * v;
                }
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    m
}

/// Inverse of a square matrix, or None when singular.
pub fn inverse(m: &[QVec]) -> Option<Vec<QVec>> {
    let n = m.len();
    let mut a: Vec<QVec> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend(unit(n, i));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(p, c);
        let piv = a[c][c];
        for k in 0..2 * n {
            a[c][k] /= piv;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c];
                for k in 0..2 * n {
                    let v = a[c][k];
                    a[r][k] -= f * v;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Basis of {x : ⟨row, x⟩ = 0 for every row}.
pub fn nullspace(rows: &[QVec], dim: usize) -> Vec<QVec> {
    let ech = row_echelon(rows.to_vec());
    let mut pivots = Vec::new();
    for row in &ech {
        let c = row.iter().position(|x| !x.is_zero()).expect("nonzero row");
        pivots.push(c);
    }
    let mut out = Vec::new();
    for free in (0..dim).filter(|c| !pivots.contains(c)) {
        let mut v = unit(dim, free);
        for (row, &p) in ech.iter().zip(&pivots) {
            v[p] = -row[free];
        }
        out.push(v);
    }
    out
}

/// Primitive integer direction of a line, sign-normalised so the first
/// nonzero entry is positive.
pub fn primitive_line(v: &[Q]) -> Vec<i64> {
    let l = v.iter().fold(1i64, |acc, x| acc.lcm(x.denom()));
    let mut ints: Vec<i64> = v.iter().map(|x| (x * l).to_integer()).collect();
    let g = ints.iter().fold(0i64, |acc, x| acc.gcd(x));
    if g > 1 {
        for x in &mut ints {
            *x /= g;
        }
    }
    if let Some(first) = ints.iter().find(|x| **x != 0) {
        if first.is_negative() {
            for x in &mut ints {
                *x = -*x;
            }
        }
    }
    ints
}
