//! Eigenvalues of a real square matrix: Householder reduction to upper
//! Hessenberg form, then single-shift QR iteration in complex arithmetic with
//! Wilkinson shifts and deflation.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Reduces `a` to upper Hessenberg form by Householder similarity
/// transformations.
pub(crate) fn hessenberg(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let mut h = a.clone();
    for k in 0..n.saturating_sub(2) {
        let alpha: f64 = (k + 1..n)
            .map(|i| h[(i, k)] * h[(i, k)])
            .sum::<f64>()
            .sqrt();
        if alpha == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let beta = if x0 >= 0.0 { -alpha } else { alpha };
        let mut v: Vec<f64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        v[0] -= beta;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // H <- P H P with P = I - 2 v v^T / (v^T v) acting on rows/cols k+1..n.
        for j in 0..n {
            let dot: f64 = (k + 1..n).zip(&v).map(|(i, vi)| vi * h[(i, j)]).sum();
            let f = 2.0 * dot / vnorm2;
            for (i, vi) in (k + 1..n).zip(&v) {
                h[(i, j)] -= f * vi;
            }
        }
        for i in 0..n {
            let dot: f64 = (k + 1..n).zip(&v).map(|(j, vj)| vj * h[(i, j)]).sum();
            let f = 2.0 * dot / vnorm2;
            for (j, vj) in (k + 1..n).zip(&v) {
                h[(i, j)] -= f * vj;
            }
        }
        h[(k + 1, k)] = beta;
        for i in k + 2..n {
            h[(i, k)] = 0.0;
        }
    }
    h
}

/// All eigenvalues (with multiplicity) of the square matrix `a`.
///
/// A subdiagonal entry is set to zero once it is below
/// `deflation_tol * (|h_kk| + |h_{k+1,k+1}|)` (or below `deflation_tol` times
/// the window norm when both diagonal entries vanish). Fails after
/// `iters_per_dim * n` QR sweeps.
pub(crate) fn eigenvalues(
    a: &DMatrix<f64>,
    deflation_tol: f64,
    iters_per_dim: usize,
) -> Result<Vec<Complex64>> {
    let n = a.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let hr = hessenberg(a);
    let mut h: Vec<Vec<Complex64>> = (0..n)
        .map(|i| (0..n).map(|j| Complex64::new(hr[(i, j)], 0.0)).collect())
        .collect();

    let cap = iters_per_dim * n.max(1);
    let mut total = 0usize;
    let mut since_deflation = 0usize;
    let mut eigs = Vec::with_capacity(n);
    let mut hi = n - 1;

    loop {
        if hi == 0 {
            eigs.push(h[0][0]);
            break;
        }
        // Locate the start of the active unreduced block.
        let mut lo = hi;
        while lo > 0 {
            let sub = h[lo][lo - 1].norm();
            let mut scale = h[lo - 1][lo - 1].norm() + h[lo][lo].norm();
            if scale == 0.0 {
                scale = window_norm(&h, lo - 1, hi);
            }
            if sub <= deflation_tol * scale {
                h[lo][lo - 1] = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eigs.push(h[hi][hi]);
            hi -= 1;
            since_deflation = 0;
            continue;
        }

        total += 1;
        since_deflation += 1;
        if total > cap {
            return Err(Error::Numerical(format!(
                "QR iteration did not converge within {cap} sweeps ({} of {n} eigenvalues found)",
                eigs.len()
            )));
        }

        let mu = if since_deflation % 11 == 10 {
            // Exceptional shift to break cycles.
            h[hi][hi] + 0.75 * h[hi][hi - 1].re.abs()
        } else {
            wilkinson_shift(h[hi - 1][hi - 1], h[hi - 1][hi], h[hi][hi - 1], h[hi][hi])
        };
        qr_sweep(&mut h, lo, hi, mu);
    }
    Ok(eigs)
}

fn window_norm(h: &[Vec<Complex64>], lo: usize, hi: usize) -> f64 {
    let mut s = 0.0;
    for row in h.iter().take(hi + 1).skip(lo) {
        for v in row.iter().take(hi + 1).skip(lo) {
            s += v.norm_sqr();
        }
    }
    s.sqrt()
}

/// Eigenvalue of `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half_tr = (a + d) * 0.5;
    let disc = ((a - d) * 0.5).powi(2) + b * c;
    let root = disc.sqrt();
    let l1 = half_tr + root;
    let l2 = half_tr - root;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// One explicit shifted QR step `H - mu I = QR`, `H <- RQ + mu I` on the
/// window `lo..=hi`, using Givens rotations.
fn qr_sweep(h: &mut [Vec<Complex64>], lo: usize, hi: usize, mu: Complex64) {
    for k in lo..=hi {
        h[k][k] -= mu;
    }
    let mut rotations = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let (c, s) = givens(h[k][k], h[k + 1][k]);
        for j in k..=hi {
            let x = h[k][j];
            let y = h[k + 1][j];
            h[k][j] = x * c + s * y;
            h[k + 1][j] = -s.conj() * x + y * c;
        }
        rotations.push((c, s));
    }
    for (offset, &(c, s)) in rotations.iter().enumerate() {
        let k = lo + offset;
        let rows = (k + 2).min(hi);
        for row in h.iter_mut().take(rows + 1).skip(lo) {
            let x = row[k];
            let y = row[k + 1];
            row[k] = x * c + y * s.conj();
            row[k + 1] = -x * s + y * c;
        }
    }
    for k in lo..=hi {
        h[k][k] += mu;
    }
}

/// `(c, s)` with real `c` such that `[[c, s], [-conj(s), c]] (a, b)^T = (r, 0)^T`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let an = a.norm();
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if an == 0.0 {
        return (0.0, Complex64::new(1.0, 0.0));
    }
    let r = an.hypot(bn);
    (an / r, (a / an) * b.conj() / r)
}
