//! Reference computations that share no code with the library: closed
//! forms for small periods, dense operator truncations and pointwise
//! interpolation.
#![allow(dead_code)]

use num_complex::Complex64;
use std::f64::consts::PI;

fn alpha(a: f64, n: usize, j: i64) -> f64 {
    2.0 * a * (2.0 * PI * j as f64 / n as f64).cos()
}

/// The two candidate values `2(p ∓ s)/d` of the explicit small-period
/// formulas at `z`, with `s` the principal root of the radicand.
fn phi_candidates(n: usize, a: f64, z: Complex64) -> [Complex64; 2] {
    let one = Complex64::new(1.0, 0.0);
    let (p, d, r) = match n {
        1 => {
            let w = z - a;
            (w, one, w * w - 1.0)
        }
        2 => {
            let u = z * z - a * a;
            (u, z - a, u * (u - 1.0))
        }
        3 => {
            let g = (2.0 * z * z - (a + 1.0) * z - (a * a - a + 1.0))
                * (2.0 * z * z - (a - 1.0) * z - (a * a + a + 1.0));
            (
                4.0 * z * z * z - (3.0 * a * a + 1.0) * z - a * a * a + a,
                4.0 * z * z - 2.0 * a * z - 2.0 * a * a - 1.0,
                (2.0 * z + a + 1.0) * (2.0 * z + a - 1.0) * g,
            )
        }
        4 => (
            2.0 * z * z * z - (2.0 * a * a + 1.0) * z + a,
            2.0 * z * z - (2.0 * a * a + 1.0),
            (z * z - a * a - 1.0) * (2.0 * z * z - 2.0 * a * z - 1.0) * (2.0 * z * z + 2.0 * a * z - 1.0),
        ),
        _ => panic!("no closed form for N = {}", n),
    };
    let s = r.sqrt();
    [(p - s) * 2.0 / d, (p + s) * 2.0 / d]
}

/// Explicit Stieltjes transform for N = 1..4 at `Im z > 0`.
///
/// The branch is fixed by continuation: start high on the vertical line
/// through `z`, where `zφ → 1` singles out one root, and follow the root
/// nearest the previous value down to `z`. The upper half-plane holds no
/// branch points, so the continuation is unique.
pub fn phi_case(n: usize, a: f64, z: Complex64) -> Complex64 {
    assert!(z.im > 0.0);
    let top = 1e4f64.max(10.0 * z.im);
    let start = Complex64::new(z.re, top);
    let c = phi_candidates(n, a, start);
    let mut cur = if (c[0] * start - 1.0).norm() < (c[1] * start - 1.0).norm() { c[0] } else { c[1] };
    let steps = 4000;
    let (l0, l1) = (top.ln(), z.im.ln());
    for i in 1..=steps {
        let im = (l0 + (l1 - l0) * i as f64 / steps as f64).exp();
        let c = phi_candidates(n, a, Complex64::new(z.re, im));
        cur = if (c[0] - cur).norm() < (c[1] - cur).norm() { c[0] } else { c[1] };
    }
    cur
}

/// Center entries `[r00, r01, r11]` of `(zI − A)^{-1}` for the
/// `(2M+1)`-site truncation of the two-sided operator with diagonal
/// `a cos(2πj/N)` and off-diagonal `1/2`, by the Thomas algorithm.
pub fn truncated_resolvent(a: f64, n: usize, z: Complex64, m: usize) -> [Complex64; 3] {
    let size = 2 * m + 1;
    let diag: Vec<Complex64> = (0..size).map(|i| z - 0.5 * alpha(a, n, i as i64 - m as i64)).collect();
    let off = Complex64::new(-0.5, 0.0);
    let solve = |rhs_index: usize| -> Vec<Complex64> {
        let mut c = vec![Complex64::new(0.0, 0.0); size];
        let mut d = vec![Complex64::new(0.0, 0.0); size];
        let mut rhs = vec![Complex64::new(0.0, 0.0); size];
        rhs[rhs_index] = Complex64::new(1.0, 0.0);
        c[0] = off / diag[0];
        d[0] = rhs[0] / diag[0];
        for i in 1..size {
            let den = diag[i] - off * c[i - 1];
            c[i] = off / den;
            d[i] = (rhs[i] - off * d[i - 1]) / den;
        }
        let mut x = vec![Complex64::new(0.0, 0.0); size];
        x[size - 1] = d[size - 1];
        for i in (0..size - 1).rev() {
            x[i] = d[i] - c[i] * x[i + 1];
        }
        x
    };
    let col0 = solve(m);
    let col1 = solve(m + 1);
    [col0[m], col0[m + 1], col1[m + 1]]
}

/// `((J)^k)_{00}` for the one-sided operator with diagonal `α_n / 2` and
/// off-diagonal `1/2`, for `k = 0..=k_max`.
pub fn operator_moments(a: f64, n: usize, k_max: usize) -> Vec<f64> {
    let size = k_max + 2;
    let mut v = vec![0.0; size];
    v[0] = 1.0;
    let mut out = vec![1.0];
    for _ in 0..k_max {
        let mut next = vec![0.0; size];
        for i in 0..size {
            let mut s = 0.5 * alpha(a, n, i as i64) * v[i];
            if i > 0 {
                s += 0.5 * v[i - 1];
            }
            if i + 1 < size {
                s += 0.5 * v[i + 1];
            }
            next[i] = s;
        }
        v = next;
        out.push(v[0]);
    }
    out
}

/// `P_n(x)` by the scalar recurrence, written out independently.
pub fn p_scalar(a: f64, n_period: usize, n: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..n {
        let next = (2.0 * x - alpha(a, n_period, k as i64)) * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Monomial coefficients of the degree-`deg` polynomial through the
/// values of `f` at `count` Chebyshev-spaced points (least squares via
/// normal equations on a well-conditioned small system).
pub fn interpolate<F: Fn(f64) -> f64>(f: F, deg: usize, count: usize) -> Vec<f64> {
    let xs: Vec<f64> = (0..count).map(|i| ((2 * i + 1) as f64 * PI / (2 * count) as f64).cos()).collect();
    let cols = deg + 1;
    let mut ata = vec![vec![0.0; cols]; cols];
    let mut atb = vec![0.0; cols];
    for &x in &xs {
        let row: Vec<f64> = (0..cols).map(|j| x.powi(j as i32)).collect();
        let y = f(x);
        for i in 0..cols {
            atb[i] += row[i] * y;
            for j in 0..cols {
                ata[i][j] += row[i] * row[j];
            }
        }
    }
    // Gaussian elimination with partial pivoting.
    for col in 0..cols {
        let piv = (col..cols).max_by(|&i, &j| ata[i][col].abs().total_cmp(&ata[j][col].abs())).unwrap();
        ata.swap(col, piv);
        atb.swap(col, piv);
        for r in col + 1..cols {
            let f = ata[r][col] / ata[col][col];
            for c in col..cols {
                ata[r][c] -= f * ata[col][c];
            }
            atb[r] -= f * atb[col];
        }
    }
    let mut coef = vec![0.0; cols];
    for r in (0..cols).rev() {
        let s: f64 = (r + 1..cols).map(|c| ata[r][c] * coef[c]).sum();
        coef[r] = (atb[r] - s) / ata[r][r];
    }
    coef
}

/// Complex grid of 25 points with the given imaginary parts spread over
/// the rows.
pub fn complex_grid() -> Vec<Complex64> {
    let re = [-2.0, -1.0, 0.0, 1.0, 2.0];
    let im = [0.25, 0.25, 0.5, 0.5, 1.0];
    let mut out = Vec::new();
    for (i, &v) in im.iter().enumerate() {
        for &u in &re {
            out.push(Complex64::new(u + 0.1 * i as f64, v));
        }
    }
    out
}
