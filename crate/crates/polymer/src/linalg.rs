//! Small dense numerical kernels: a QL eigensolver for symmetric
//! tridiagonal matrices, a pivoted solver for complex tridiagonal systems,
//! Gauss-Legendre nodes, and Bessel functions of integer order.

use crate::{Error, Result};
use num_complex::Complex64;

/// Eigenvalues (ascending) and eigenvectors of a symmetric tridiagonal
/// matrix via the implicit QL algorithm. `vectors[j]` is the normalized
/// eigenvector of `values[j]`.
pub fn tridiag_eigen(diag: &[f64], off: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = diag.len();
    assert_eq!(off.len(), n.saturating_sub(1), "off-diagonal length");
    if n == 0 {
        return (Vec::new(), Vec::new());
    }
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    // z starts as the identity; columns accumulate the rotations.
    let mut z = vec![0.0f64; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }
    for l in 0..n {
        let mut iter = 0;
        loop {
            // look for a negligible off-diagonal element
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter <= 50, "QL failed to converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0f64;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    f = z[k * n + i + 1];
                    z[k * n + i + 1] = s * z[k * n + i] + c * f;
                    z[k * n + i] = c * z[k * n + i] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    // sort ascending, carrying the vectors along
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap());
    let values: Vec<f64> = order.iter().map(|&j| d[j]).collect();
    let vectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&j| (0..n).map(|k| z[k * n + j]).collect())
        .collect();
    (values, vectors)
}

/// Solves a complex tridiagonal system `A x = rhs` by LU with partial
/// pivoting (one extra superdiagonal of fill-in).
pub fn solve_tridiag_complex(
    diag: &[Complex64],
    lower: &[Complex64],
    upper: &[Complex64],
    rhs: &[Complex64],
) -> Result<Vec<Complex64>> {
    let n = diag.len();
    assert_eq!(lower.len(), n.saturating_sub(1));
    assert_eq!(upper.len(), n.saturating_sub(1));
    assert_eq!(rhs.len(), n);
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut d = diag.to_vec();
    let mut u1: Vec<Complex64> = upper.to_vec();
    u1.push(Complex64::ZERO);
    let mut u2 = vec![Complex64::ZERO; n];
    let mut x = rhs.to_vec();
    let mut low = lower.to_vec();
    low.push(Complex64::ZERO);
    for i in 0..n - 1 {
        // pivot between rows i and i+1
        if low[i].norm() > d[i].norm() {
            std::mem::swap(&mut d[i], &mut low[i]);
            let tmp = u1[i];
            u1[i] = d[i + 1];
            d[i + 1] = tmp;
            // row i inherits the fill-in slot from what was row i+1
            if i + 1 < n - 1 {
                u2[i] = u1[i + 1];
                u1[i + 1] = Complex64::ZERO;
            }
            x.swap(i, i + 1);
        }
        if d[i].norm() == 0.0 {
            return Err(Error::SingularSystem(i));
        }
        let m = low[i] / d[i];
        d[i + 1] -= m * u1[i];
        if i + 1 < n - 1 {
            u1[i + 1] -= m * u2[i];
        }
        let xi = x[i];
        x[i + 1] -= m * xi;
    }
    if d[n - 1].norm() == 0.0 {
        return Err(Error::SingularSystem(n - 1));
    }
    x[n - 1] /= d[n - 1];
    if n >= 2 {
        x[n - 2] = (x[n - 2] - u1[n - 2] * x[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        x[i] = (x[i] - u1[i] * x[i + 1] - u2[i] * x[i + 2]) / d[i];
    }
    Ok(x)
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Newton from the Chebyshev-like initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j as f64 + 1.0) * x * p1 - j as f64 * p2) / (j as f64 + 1.0);
            }
            pp = n as f64 * (x * p0 - p1) / (x * x - 1.0);
            let dx = p0 / pp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `J_0(x), ..., J_kmax(x)` by Miller's downward recurrence.
pub fn bessel_j_sequence(x: f64, kmax: usize) -> Vec<f64> {
    if x == 0.0 {
        let mut out = vec![0.0; kmax + 1];
        out[0] = 1.0;
        return out;
    }
    let start = kmax + 16 + (x.abs() as usize) + ((x.abs()).sqrt() as usize) * 4;
    let mut jp = 0.0f64;
    let mut j = 1e-300f64;
    let mut out = vec![0.0; kmax + 1];
    let mut norm = 0.0f64;
    for k in (0..start).rev() {
        let jm = 2.0 * (k as f64 + 1.0) / x * j - jp;
        jp = j;
        j = jm;
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp *= 1e-250;
            norm *= 1e-250;
            for v in out.iter_mut() {
                *v *= 1e-250;
            }
        }
        if k <= kmax {
            out[k] = j;
        }
        if k % 2 == 0 {
            norm += if k == 0 { j } else { 2.0 * j };
        }
    }
    for v in out.iter_mut() {
        *v /= norm;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ql_free_chain_eigenpairs() {
        // tridiag(-1, 0, -1): E_j = -2 cos(j pi / (n+1)), psi_j(k) ~ sin(j k pi/(n+1))
        let n = 40;
        let diag = vec![0.0; n];
        let off = vec![-1.0; n - 1];
        let (vals, vecs) = tridiag_eigen(&diag, &off);
        for j in 1..=n {
            let expect = -2.0 * (j as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos();
            assert!((vals[j - 1] - expect).abs() < 1e-12, "eigenvalue {j}");
        }
        for j in 0..n {
            let v = &vecs[j];
            let mut res = 0.0f64;
            for k in 0..n {
                let mut h = 0.0;
                if k > 0 {
                    h -= v[k - 1];
                }
                if k + 1 < n {
                    h -= v[k + 1];
                }
                res += (h - vals[j] * v[k]).powi(2);
            }
            assert!(res.sqrt() < 1e-12, "residual for vector {j}");
            let norm: f64 = v.iter().map(|x| x * x).sum();
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn tridiag_solver_matches_direct() {
        let n = 64;
        let mut diag = Vec::new();
        let mut lower = Vec::new();
        let mut upper = Vec::new();
        for i in 0..n {
            diag.push(Complex64::new((i as f64 * 0.37).sin() * 0.1, 0.02));
            if i + 1 < n {
                lower.push(Complex64::new(-1.0, 0.0));
                upper.push(Complex64::new(-1.0, 0.0));
            }
        }
        let mut rhs = vec![Complex64::ZERO; n];
        rhs[n / 2] = Complex64::new(1.0, 0.0);
        let x = solve_tridiag_complex(&diag, &lower, &upper, &rhs).unwrap();
        for i in 0..n {
            let mut ax = diag[i] * x[i];
            if i > 0 {
                ax += lower[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                ax += upper[i] * x[i + 1];
            }
            assert!((ax - rhs[i]).norm() < 1e-12, "residual at {i}");
        }
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(12);
        // exact for degree <= 23: check x^10 and x^16 over [-1, 1]
        let i10: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(10)).sum();
        assert!((i10 - 2.0 / 11.0).abs() < 1e-14);
        let i16: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(16)).sum();
        assert!((i16 - 2.0 / 17.0).abs() < 1e-14);
    }

    #[test]
    fn bessel_values() {
        let j = bessel_j_sequence(1.0, 4);
        assert!((j[0] - 0.7651976865579666).abs() < 1e-13);
        assert!((j[1] - 0.44005058574493355).abs() < 1e-13);
        assert!((j[2] - 0.11490348493190048).abs() < 1e-13);
        let j = bessel_j_sequence(20.0, 25);
        assert!((j[0] - 0.16702466434058315).abs() < 1e-12);
        assert!((j[5] - 0.15116976798239498).abs() < 1e-12);
        // sum rule J0 + 2 sum J_2k = 1
        let j = bessel_j_sequence(13.7, 60);
        let mut s = j[0];
        for k in (2..=60).step_by(2) {
            s += 2.0 * j[k];
        }
        assert!((s - 1.0).abs() < 1e-12);
    }
}
