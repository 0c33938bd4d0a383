//! Small dense helpers and sparse iterative solvers.

use crate::error::{Error, Result};

/// Largest asymmetry |m_ij − m_ji| of a row-major square matrix.
pub fn asymmetry(m: &[f64], n: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            worst = worst.max((m[i * n + j] - m[j * n + i]).abs());
        }
    }
    worst
}

/// Eigenvalues of a symmetric matrix in ascending order.
///
/// Closed forms for n ≤ 3, cyclic Jacobi rotations otherwise.
pub fn sym_eigenvalues(m: &[f64], n: usize) -> Vec<f64> {
    let mut e = match n {
        0 => Vec::new(),
        1 => vec![m[0]],
        2 => {
            let (a, b, d) = (m[0], 0.5 * (m[1] + m[2]), m[3]);
            let mean = 0.5 * (a + d);
            let rad = (0.5 * (a - d)).hypot(b);
            vec![mean - rad, mean + rad]
        }
        3 => eig3(m),
        _ => jacobi_eigenvalues(m, n),
    };
    e.sort_by(f64::total_cmp);
    e
}

fn eig3(m: &[f64]) -> Vec<f64> {
    let a = |i: usize, j: usize| 0.5 * (m[i * 3 + j] + m[j * 3 + i]);
    let p1 = a(0, 1).powi(2) + a(0, 2).powi(2) + a(1, 2).powi(2);
    let q = (a(0, 0) + a(1, 1) + a(2, 2)) / 3.0;
    let scale = m.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    if p1 <= 1e-30 * scale * scale {
        return vec![a(0, 0), a(1, 1), a(2, 2)];
    }
    let p2 = (a(0, 0) - q).powi(2) + (a(1, 1) - q).powi(2) + (a(2, 2) - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    let b = |i: usize, j: usize| (a(i, j) - if i == j { q } else { 0.0 }) / p;
    let det_b = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1)) - b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0))
        + b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
    let r = (0.5 * det_b).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let e1 = q + 2.0 * p * phi.cos();
    let e3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
    let e2 = 3.0 * q - e1 - e3;
    vec![e1, e2, e3]
}

fn jacobi_eigenvalues(m: &[f64], n: usize) -> Vec<f64> {
    let mut a: Vec<f64> = (0..n * n).map(|k| 0.5 * (m[k] + m[(k % n) * n + k / n])).collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j].powi(2))
            .sum();
        let total: f64 = a.iter().map(|v| v * v).sum();
        if off <= 1e-30 * total.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i * n + i]).collect()
}

/// Determinant of a small square matrix by partial-pivot elimination.
pub fn det(m: &[f64], n: usize) -> f64 {
    match n {
        1 => m[0],
        2 => m[0] * m[3] - m[1] * m[2],
        3 => {
            m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6])
                + m[2] * (m[3] * m[7] - m[4] * m[6])
        }
        _ => {
            let mut a = m.to_vec();
            let mut d = 1.0;
            for c in 0..n {
                let piv = (c..n)
                    .max_by(|&i, &j| a[i * n + c].abs().total_cmp(&a[j * n + c].abs()))
                    .unwrap();
                if a[piv * n + c] == 0.0 {
                    return 0.0;
                }
                if piv != c {
                    for k in 0..n {
                        a.swap(piv * n + k, c * n + k);
                    }
                    d = -d;
                }
                d *= a[c * n + c];
                for r in c + 1..n {
                    let f = a[r * n + c] / a[c * n + c];
                    for k in c..n {
                        a[r * n + k] -= f * a[c * n + k];
                    }
                }
            }
            d
        }
    }
}

/// Spectral norm of a symmetric matrix.
pub fn sym_norm(m: &[f64], n: usize) -> f64 {
    sym_eigenvalues(m, n).iter().fold(0.0, |s, e| s.max(e.abs()))
}

/// Compressed sparse row matrix.
#[derive(Clone, Debug)]
pub struct Csr {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl Csr {
    /// Builds from (row, col, value) triplets, summing duplicates.
    pub fn from_triplets(n: usize, mut t: Vec<(usize, usize, f64)>) -> Self {
        t.sort_by_key(|a| (a.0, a.1));
        let mut row_ptr = vec![0; n + 1];
        let mut cols = Vec::with_capacity(t.len());
        let mut vals: Vec<f64> = Vec::with_capacity(t.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in t {
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Csr { n, row_ptr, cols, vals }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            let mut s = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.vals[k] * x[self.cols[k]];
            }
            y[i] = s;
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                (self.row_ptr[i]..self.row_ptr[i + 1])
                    .find(|&k| self.cols[k] == i)
                    .map_or(0.0, |k| self.vals[k])
            })
            .collect()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        (self.row_ptr[i]..self.row_ptr[i + 1])
            .find(|&k| self.cols[k] == j)
            .map_or(0.0, |k| self.vals[k])
    }

    /// Largest |a_ij − a_ji| relative to max |a_ij|.
    pub fn relative_asymmetry(&self) -> f64 {
        let scale = self.vals.iter().fold(0.0f64, |s, v| s.max(v.abs()));
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.cols[k];
                worst = worst.max((self.vals[k] - self.get(j, i)).abs());
            }
        }
        worst / scale.max(f64::MIN_POSITIVE)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Jacobi-preconditioned conjugate gradients for symmetric positive definite `a`.
/// `x` holds the initial guess and receives the solution.
pub fn pcg(a: &Csr, b: &[f64], x: &mut [f64], rtol: f64, max_iter: usize) -> Result<usize> {
    let n = a.n();
    let dinv: Vec<f64> = a.diagonal().iter().map(|d| 1.0 / d).collect();
    let mut r = vec![0.0; n];
    a.matvec(x, &mut r);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    let bnorm = norm(b).max(f64::MIN_POSITIVE);
    if norm(&r) <= rtol * bnorm {
        return Ok(0);
    }
    let mut z: Vec<f64> = r.iter().zip(&dinv).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for it in 1..=max_iter {
        a.matvec(&p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if norm(&r) <= rtol * bnorm {
            return Ok(it);
        }
        for i in 0..n {
            z[i] = r[i] * dinv[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::NotConverged {
        iterations: max_iter,
        detail: format!("conjugate gradients, residual {:.3e}", norm(&r) / bnorm),
    })
}

/// Jacobi-preconditioned BiCGSTAB for general nonsingular `a`.
pub fn bicgstab(a: &Csr, b: &[f64], x: &mut [f64], rtol: f64, max_iter: usize) -> Result<usize> {
    let n = a.n();
    let dinv: Vec<f64> = a.diagonal().iter().map(|d| 1.0 / d).collect();
    let mut r = vec![0.0; n];
    a.matvec(x, &mut r);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    let bnorm = norm(b).max(f64::MIN_POSITIVE);
    if norm(&r) <= rtol * bnorm {
        return Ok(0);
    }
    let r0 = r.clone();
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut t = vec![0.0; n];
    for it in 1..=max_iter {
        let rho_new = dot(&r0, &r);
        if rho_new == 0.0 {
            break;
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
            y[i] = p[i] * dinv[i];
        }
        a.matvec(&y, &mut v);
        alpha = rho / dot(&r0, &v);
        for i in 0..n {
            s[i] = r[i] - alpha * v[i];
        }
        if norm(&s) <= rtol * bnorm {
            for i in 0..n {
                x[i] += alpha * y[i];
            }
            return Ok(it);
        }
        for i in 0..n {
            z[i] = s[i] * dinv[i];
        }
        a.matvec(&z, &mut t);
        omega = dot(&t, &s) / dot(&t, &t);
        for i in 0..n {
            x[i] += alpha * y[i] + omega * z[i];
            r[i] = s[i] - omega * t[i];
        }
        if norm(&r) <= rtol * bnorm {
            return Ok(it);
        }
        if omega == 0.0 {
            break;
        }
    }
    Err(Error::NotConverged {
        iterations: max_iter,
        detail: format!("BiCGSTAB, residual {:.3e}", norm(&r) / bnorm),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms_match_jacobi() {
        let m3 = [2.0, -1.0, 0.5, -1.0, 3.0, 0.25, 0.5, 0.25, -1.0];
        let a = sym_eigenvalues(&m3, 3);
        let mut b = jacobi_eigenvalues(&m3, 3);
        b.sort_by(f64::total_cmp);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
        let m2 = [1.0, 0.3, 0.3, -2.0];
        let a = sym_eigenvalues(&m2, 2);
        let mut b = jacobi_eigenvalues(&m2, 2);
        b.sort_by(f64::total_cmp);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
        let e = sym_eigenvalues(&[2.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 2.0], 3);
        assert_eq!(e, vec![2.0, 2.0, 2.0]);
        let prod: f64 = sym_eigenvalues(&m3, 3).iter().product();
        assert!((det(&m3, 3) - prod).abs() < 1e-12);
    }

    #[test]
    fn jacobi_four_by_four() {
        let m = [
            4.0, 1.0, 0.0, 0.5, 1.0, 3.0, 0.2, 0.0, 0.0, 0.2, 2.0, 0.1, 0.5, 0.0, 0.1, 1.0,
        ];
        let e = sym_eigenvalues(&m, 4);
        let tr: f64 = e.iter().sum();
        assert!((tr - 10.0).abs() < 1e-12);
        let prod: f64 = e.iter().product();
        assert!((prod - det(&m, 4)).abs() < 1e-10);
    }

    fn laplace_1d(n: usize) -> Csr {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i > 0 {
                t.push((i, i - 1, -1.0));
            }
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
            }
        }
        Csr::from_triplets(n, t)
    }

    #[test]
    fn solvers_agree() {
        let a = laplace_1d(50);
        let b: Vec<f64> = (0..50).map(|i| (i as f64 * 0.1).sin()).collect();
        let mut x1 = vec![0.0; 50];
        let mut x2 = vec![0.0; 50];
        pcg(&a, &b, &mut x1, 1e-12, 1000).unwrap();
        bicgstab(&a, &b, &mut x2, 1e-12, 1000).unwrap();
        let mut ax = vec![0.0; 50];
        a.matvec(&x1, &mut ax);
        for i in 0..50 {
            assert!((ax[i] - b[i]).abs() < 1e-9);
            assert!((x1[i] - x2[i]).abs() < 1e-8);
        }
        assert_eq!(a.relative_asymmetry(), 0.0);
    }
}
