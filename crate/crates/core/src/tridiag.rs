//! Eigenvalues of real symmetric tridiagonal matrices by Sturm-count
//! bisection.

use crate::error::{Error, Result};

/// Number of eigenvalues strictly below `lambda`.
///
/// Counts negative pivots of the LDLᵀ factorization of `T − λI`; a zero
/// pivot is nudged to a tiny negative value.
pub fn sturm_count(diag: &[f64], offdiag: &[f64], lambda: f64) -> usize {
    let tiny = f64::MIN_POSITIVE.sqrt();
    let mut count = 0;
    let mut d = diag[0] - lambda;
    if d == 0.0 {
        d = -tiny;
    }
    if d < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        let e = offdiag[i - 1];
        d = (diag[i] - lambda) - e * e / d;
        if d == 0.0 {
            d = -tiny;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// All eigenvalues in ascending order.
pub fn tridiag_eigs(diag: &[f64], offdiag: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 {
        return Err(Error::InvalidArgument("empty diagonal".into()));
    }
    if offdiag.len() + 1 != n {
        return Err(Error::InvalidArgument(format!(
            "off-diagonal has length {}, expected {}",
            offdiag.len(),
            n - 1
        )));
    }
    if diag.iter().chain(offdiag).any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite matrix entry".into()));
    }

    // Gershgorin enclosure.
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { offdiag[i - 1].abs() } else { 0.0 }
            + if i + 1 < n { offdiag[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    let radius = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    lo -= 1e-12 * radius;
    hi += 1e-12 * radius;

    let mut eigs = Vec::with_capacity(n);
    for k in 0..n {
        // k-th eigenvalue: smallest λ with count(λ) > k.
        let (mut a, mut b) = (lo, hi);
        if let Some(&prev) = eigs.last() {
            a = a.max(prev);
        }
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if sturm_count(diag, offdiag, mid) > k {
                b = mid;
            } else {
                a = mid;
            }
        }
        eigs.push(0.5 * (a + b));
    }
    Ok(eigs)
}
