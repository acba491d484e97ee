//! Dense exact-rational linear algebra: rank, solve, nullspace, minimum-norm
//! solutions, and equality-constrained quadratic minimization. These are the
//! oracles behind every certified resistance/capacitance/kernel value, so
//! they stay deliberately simple: Gaussian elimination over `BigRational`
//! with partial pivoting by nonzero choice.

use num_traits::{One, Zero};

use crate::{Int, Rat};

pub type RatMat = Vec<Vec<Rat>>;

pub fn zeros(r: usize, c: usize) -> RatMat {
    vec![vec![Rat::zero(); c]; r]
}

pub fn identity(n: usize) -> RatMat {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Rat::one();
    }
    m
}

pub fn transpose(m: &RatMat) -> RatMat {
    if m.is_empty() {
        return Vec::new();
    }
    let (r, c) = (m.len(), m[0].len());
    let mut t = zeros(c, r);
    for i in 0..r {
        for j in 0..c {
            t[j][i] = m[i][j].clone();
        }
    }
    t
}

pub fn mat_mul(a: &RatMat, b: &RatMat) -> RatMat {
    let r = a.len();
    let inner = if r > 0 { a[0].len() } else { 0 };
    let c = if b.is_empty() { 0 } else { b[0].len() };
    let mut out = zeros(r, c);
    for i in 0..r {
        for (k, aik) in a[i].iter().enumerate().take(inner) {
            if aik.is_zero() {
                continue;
            }
            for j in 0..c {
                if !b[k][j].is_zero() {
                    out[i][j] += aik * &b[k][j];
                }
            }
        }
    }
    out
}

pub fn mat_vec(a: &RatMat, x: &[Rat]) -> Vec<Rat> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(x)
                .filter(|(r, _)| !r.is_zero())
                .map(|(r, v)| r * v)
                .sum()
        })
        .collect()
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Row echelon form in place; returns pivot column indices.
fn echelonize(m: &mut RatMat) -> Vec<usize> {
    let rows = m.len();
    let cols = if rows > 0 { m[0].len() } else { 0 };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        // pick the entry with the smallest numerator/denominator footprint
        // among nonzeros to slow coefficient growth
        let mut best: Option<usize> = None;
        for (i, row) in m.iter().enumerate().take(rows).skip(r) {
            if !row[c].is_zero() {
                best = match best {
                    None => Some(i),
                    Some(b) => {
                        if complexity(&m[b][c]) > complexity(&row[c]) {
                            Some(i)
                        } else {
                            Some(b)
                        }
                    }
                };
            }
        }
        let Some(p) = best else { continue };
        m.swap(r, p);
        let inv = m[r][c].clone();
        for j in c..cols {
            m[r][j] = &m[r][j] / &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let sub = &f * &m[r][j];
                    m[i][j] = &m[i][j] - &sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

fn complexity(x: &Rat) -> usize {
    x.numer().bits() as usize + x.denom().bits() as usize
}

pub fn rank(m: &RatMat) -> usize {
    let mut copy = m.clone();
    echelonize(&mut copy).len()
}

/// Solves `A x = b`; returns any solution or `None` when inconsistent.
pub fn solve(a: &RatMat, b: &[Rat]) -> Option<Vec<Rat>> {
    let rows = a.len();
    let cols = if rows > 0 { a[0].len() } else { 0 };
    if rows == 0 {
        return Some(vec![Rat::zero(); cols]);
    }
    let mut aug: RatMat = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = echelonize(&mut aug);
    // inconsistent iff a pivot lands in the augmented column
    if pivots.last().map_or(false, |&c| c == cols) {
        return None;
    }
    let mut x = vec![Rat::zero(); cols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[r][cols].clone();
    }
    Some(x)
}

/// Basis of the right nullspace, as columns.
pub fn nullspace(a: &RatMat) -> Vec<Vec<Rat>> {
    let rows = a.len();
    let cols = if rows > 0 { a[0].len() } else { 0 };
    if rows == 0 {
        return (0..cols)
            .map(|j| {
                let mut v = vec![Rat::zero(); cols];
                v[j] = Rat::one();
                v
            })
            .collect();
    }
    let mut m = a.clone();
    let pivots = echelonize(&mut m);
    let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![Rat::zero(); cols];
        v[free] = Rat::one();
        for (r, &c) in pivots.iter().enumerate() {
            v[c] = -m[r][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Exact determinant by fraction-free (Bareiss) elimination on integers.
pub fn det_bigint(m: &[Vec<Int>]) -> Int {
    let n = m.len();
    if n == 0 {
        return Int::one();
    }
    debug_assert!(m.iter().all(|r| r.len() == n));
    let mut a: Vec<Vec<Int>> = m.to_vec();
    let mut sign = 1i64;
    let mut prev = Int::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return Int::zero();
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = num / &prev;
            }
        }
        prev = a[k][k].clone();
        for row in a.iter_mut().skip(k + 1) {
            row[k] = Int::zero();
        }
    }
    let d = a[n - 1][n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

pub fn det_rational(m: &RatMat) -> Rat {
    let n = m.len();
    if n == 0 {
        return Rat::one();
    }
    let mut a = m.clone();
    let mut det = Rat::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return Rat::zero();
        };
        if p != k {
            a.swap(k, p);
            det = -det;
        }
        det *= a[k][k].clone();
        let inv = a[k][k].clone();
        for j in k..n {
            a[k][j] = &a[k][j] / &inv;
        }
        for i in k + 1..n {
            if !a[i][k].is_zero() {
                let f = a[i][k].clone();
                for j in k..n {
                    let sub = &f * &a[k][j];
                    a[i][j] = &a[i][j] - &sub;
                }
            }
        }
    }
    det
}

/// Result of an exact constrained quadratic minimization.
pub struct QuadraticMinimum {
    pub value: Rat,
    pub point: Vec<Rat>,
}

/// Minimizes `x^T M x` over the affine set `{x : C x = e}` with `M`
/// positive semidefinite. Returns `None` when the constraints are
/// infeasible. The minimum is always attained (least-squares structure).
pub fn minimize_quadratic_on_affine(
    m: &RatMat,
    c: &RatMat,
    e: &[Rat],
) -> Option<QuadraticMinimum> {
    let x0 = solve(c, e)?;
    let null = nullspace(c);
    if null.is_empty() {
        let value = dot(&x0, &mat_vec(m, &x0));
        return Some(QuadraticMinimum { value, point: x0 });
    }
    let n = x0.len();
    let k = null.len();
    // columns of N are the nullspace basis
    let mut nt_m_n = zeros(k, k);
    let mut rhs = vec![Rat::zero(); k];
    let m_cols: Vec<Vec<Rat>> = null.iter().map(|col| mat_vec(m, col)).collect();
    let m_x0 = mat_vec(m, &x0);
    for i in 0..k {
        for j in 0..k {
            nt_m_n[i][j] = dot(&null[i], &m_cols[j]);
        }
        rhs[i] = -dot(&null[i], &m_x0);
    }
    // consistent because M is PSD: rhs lies in im(N^T M N)
    let z = solve(&nt_m_n, &rhs).expect("normal equations of a PSD quadratic are consistent");
    let mut x = x0;
    for (j, col) in null.iter().enumerate() {
        if z[j].is_zero() {
            continue;
        }
        for i in 0..n {
            x[i] += &z[j] * &col[i];
        }
    }
    let value = dot(&x, &mat_vec(m, &x));
    Some(QuadraticMinimum { value, point: x })
}

/// Minimum-norm solution of `A x = b` (the pseudoinverse applied to `b`),
/// or `None` when `b` is outside the image of `A`.
pub fn min_norm_solution(a: &RatMat, b: &[Rat]) -> Option<Vec<Rat>> {
    let cols = if a.is_empty() { 0 } else { a[0].len() };
    let q = minimize_quadratic_on_affine(&identity(cols), a, b)?;
    Some(q.point)
}
