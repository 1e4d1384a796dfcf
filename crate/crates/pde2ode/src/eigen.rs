//! Dense nonsymmetric eigenvalue solver: balancing, Hessenberg reduction,
//! shifted QR iteration for eigenvalues, and inverse iteration for
//! eigenvectors. Sized for matrices up to a few hundred rows.

use num::complex::Complex64 as C64;
use rand::Rng;

use crate::error::{Error, Result};

type CMat = Vec<Vec<C64>>;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Parlett–Reinsch balancing: diagonal similarity scaling by powers of two
/// to equalize row and column norms.
fn balance(a: &mut Vec<Vec<f64>>) {
    let n = a.len();
    let radix = 2.0f64;
    loop {
        let mut done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut col = 0.0;
            for j in 0..n {
                if j != i {
                    col += a[j][i].abs();
                    r += a[i][j].abs();
                }
            }
            if col == 0.0 || r == 0.0 {
                continue;
            }
            let mut f = 1.0;
            let mut cc = col;
            let s = col + r;
            while cc < r / radix {
                f *= radix;
                cc *= radix * radix;
            }
            while cc > r * radix {
                f /= radix;
                cc /= radix * radix;
            }
            if (col + r) / f < 0.95 * s {
                done = false;
                for j in 0..n {
                    a[i][j] /= f;
                }
                for j in 0..n {
                    a[j][i] *= f;
                }
            }
        }
        if done {
            break;
        }
    }
}

/// Householder reduction to upper Hessenberg form (in place, real).
fn hessenberg(a: &mut Vec<Vec<f64>>) {
    let n = a.len();
    for k in 0..n.saturating_sub(2) {
        let mut alpha = 0.0;
        for i in (k + 1)..n {
            alpha += a[i][k] * a[i][k];
        }
        alpha = alpha.sqrt();
        if alpha == 0.0 {
            continue;
        }
        if a[k + 1][k] > 0.0 {
            alpha = -alpha;
        }
        let mut v: Vec<f64> = vec![0.0; n];
        v[k + 1] = a[k + 1][k] - alpha;
        for i in (k + 2)..n {
            v[i] = a[i][k];
        }
        let vtv: f64 = v.iter().map(|x| x * x).sum();
        if vtv == 0.0 {
            continue;
        }
        // A <- (I - 2vv^T/v^Tv) A (I - 2vv^T/v^Tv)
        for j in 0..n {
            let dot: f64 = (k + 1..n).map(|i| v[i] * a[i][j]).sum();
            let s = 2.0 * dot / vtv;
            for i in (k + 1)..n {
                a[i][j] -= s * v[i];
            }
        }
        for i in 0..n {
            let dot: f64 = (k + 1..n).map(|j| a[i][j] * v[j]).sum();
            let s = 2.0 * dot / vtv;
            for j in (k + 1)..n {
                a[i][j] -= s * v[j];
            }
        }
        for i in (k + 2)..n {
            a[i][k] = 0.0;
        }
    }
}

/// Eigenvalues of a Hessenberg matrix by complex single-shift QR with
/// Wilkinson shifts and deflation.
fn hessenberg_eigenvalues(h0: &[Vec<f64>], max_iter: usize) -> Result<Vec<C64>> {
    let n = h0.len();
    let mut h: CMat = h0
        .iter()
        .map(|row| row.iter().map(|&x| c(x)).collect())
        .collect();
    let mut eigs: Vec<C64> = Vec::with_capacity(n);
    let mut hi = n; // active block is 0..hi
    let mut iters = 0usize;
    let eps = f64::EPSILON;
    while hi > 0 {
        if hi == 1 {
            eigs.push(h[0][0]);
            hi = 0;
            continue;
        }
        // deflate tiny subdiagonals
        let mut deflated = false;
        for i in (1..hi).rev() {
            let s = h[i - 1][i - 1].norm() + h[i][i].norm();
            let s = if s == 0.0 { 1.0 } else { s };
            if h[i][i - 1].norm() <= eps * s {
                h[i][i - 1] = c(0.0);
                if i == hi - 1 {
                    eigs.push(h[hi - 1][hi - 1]);
                    hi -= 1;
                    deflated = true;
                }
                break;
            }
        }
        if deflated {
            continue;
        }
        iters += 1;
        if iters > max_iter {
            return Err(Error::EigenFail);
        }
        // Wilkinson shift from the trailing 2x2 block
        let a = h[hi - 2][hi - 2];
        let b = h[hi - 2][hi - 1];
        let cc = h[hi - 1][hi - 2];
        let d = h[hi - 1][hi - 1];
        let tr = a + d;
        let det = a * d - b * cc;
        let disc = (tr * tr - c(4.0) * det).sqrt();
        let l1 = (tr + disc) * c(0.5);
        let l2 = (tr - disc) * c(0.5);
        let shift = if (l1 - d).norm() < (l2 - d).norm() { l1 } else { l2 };
        // occasional exceptional shift to break symmetry cycles
        let shift = if iters % 31 == 0 {
            shift + c(h[hi - 1][hi - 2].norm())
        } else {
            shift
        };
        // explicit QR step via Givens rotations on the active block
        let m = hi;
        for i in 0..m {
            h[i][i] -= shift;
        }
        let mut rots: Vec<(C64, C64)> = Vec::with_capacity(m - 1);
        for i in 0..(m - 1) {
            let x = h[i][i];
            let y = h[i + 1][i];
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (cs, sn) = if r == 0.0 {
                (c(1.0), c(0.0))
            } else {
                (x.conj() / c(r), y.conj() / c(r))
            };
            for j in i..m {
                let hi_j = h[i][j];
                let hk_j = h[i + 1][j];
                h[i][j] = cs * hi_j + sn * hk_j;
                h[i + 1][j] = -sn.conj() * hi_j + cs.conj() * hk_j;
            }
            rots.push((cs, sn));
        }
        for (i, (cs, sn)) in rots.iter().enumerate() {
            for r in 0..(i + 2).min(m) {
                let a0 = h[r][i];
                let a1 = h[r][i + 1];
                h[r][i] = a0 * cs.conj() + a1 * sn.conj();
                h[r][i + 1] = -a0 * *sn + a1 * *cs;
            }
        }
        for i in 0..m {
            h[i][i] += shift;
        }
    }
    eigs.reverse();
    Ok(eigs)
}

/// All eigenvalues of a real square matrix.
pub fn eigenvalues(a: &[Vec<f64>]) -> Result<Vec<C64>> {
    let n = a.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut w = a.to_vec();
    balance(&mut w);
    hessenberg(&mut w);
    hessenberg_eigenvalues(&w, 100 * n.max(10))
}

/// Solve (A - λI) x = b by complex LU with partial pivoting; returns None if
/// the factorization hits an exactly zero pivot.
fn solve_shifted(a: &[Vec<f64>], lambda: C64, b: &[C64]) -> Option<Vec<C64>> {
    let n = a.len();
    let mut m: CMat = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| c(a[i][j]) - if i == j { lambda } else { c(0.0) })
                .collect()
        })
        .collect();
    let mut x: Vec<C64> = b.to_vec();
    for k in 0..n {
        let (piv, mag) = (k..n)
            .map(|i| (i, m[i][k].norm()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if mag == 0.0 {
            return None;
        }
        m.swap(k, piv);
        x.swap(k, piv);
        for i in (k + 1)..n {
            let f = m[i][k] / m[k][k];
            for j in k..n {
                let v = m[k][j];
                m[i][j] -= f * v;
            }
            let xv = x[k];
            x[i] -= f * xv;
        }
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        for j in (i + 1)..n {
            s -= m[i][j] * x[j];
        }
        x[i] = s / m[i][i];
    }
    Some(x)
}

fn normalize(v: &mut [C64]) {
    let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        for z in v.iter_mut() {
            *z /= c(norm);
        }
    }
}

/// Eigenvector for a computed eigenvalue by inverse iteration on the
/// original matrix; the shift is perturbed off the exact eigenvalue so the
/// shifted system stays (barely) nonsingular.
pub fn eigenvector(a: &[Vec<f64>], lambda: C64, rng: &mut impl Rng) -> Vec<C64> {
    let n = a.len();
    let scale: f64 = a
        .iter()
        .flat_map(|r| r.iter())
        .map(|x| x.abs())
        .fold(0.0, f64::max)
        .max(1.0);
    let mut v: Vec<C64> = (0..n)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    normalize(&mut v);
    let mut eps = 1e-12 * scale;
    for _ in 0..8 {
        let shifted = lambda + C64::new(eps, eps);
        match solve_shifted(a, shifted, &v) {
            Some(mut w) => {
                normalize(&mut w);
                v = w;
            }
            None => {
                eps *= 16.0;
                continue;
            }
        }
    }
    v
}
