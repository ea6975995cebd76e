//! Zeros of `P_N`, `P_{N-1}`, `P*_N` and the turning points where
//! `g_N(x)² = 1`.
//!
//! The zeros come from the tridiagonal matrices `T`, `T⁺`, `T⁻` (off-diagonal
//! 1, diagonal `α_j`) whose eigenvalues are twice the zeros. The turning
//! points are where the one-period Floquet multiplier equals `±1`: twice
//! them are the eigenvalues of the periodic and antiperiodic N×N Jacobi
//! matrices. Each gap `(ξ_{2k}, ξ_{2k+1})` contains `y_k`, and it closes
//! into a double root exactly when `(-1)^{N-k} g_N(y_k) = 1` with
//! `g_N'(y_k) = 0`.

use crate::error::{Error, Result};
use crate::recurrence::{self, evaluate, RecurrenceSpec};
use crate::scalar::Jet;
use crate::tridiag::tridiag_eigs;

/// Default tolerance on `|g_N| − 1` at a candidate tangency.
pub const DOUBLE_ROOT_TOL: f64 = 1e-10;

/// `b = 1 + |a|` for `|a| ≥ 1`, else `2`; every zero and turning point lies
/// in `(-b, b)`.
pub fn support_bound(a: f64) -> f64 {
    if a.abs() >= 1.0 {
        1.0 + a.abs()
    } else {
        2.0
    }
}

/// Sorted zeros of `P_N` (`x`), `P_{N-1}` (`y`) and `P*_N` (`z`).
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSets {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
}

fn half_eigs(diag: &[f64]) -> Result<Vec<f64>> {
    if diag.is_empty() {
        return Ok(Vec::new());
    }
    let off = vec![1.0; diag.len() - 1];
    Ok(tridiag_eigs(diag, &off)?.into_iter().map(|e| 0.5 * e).collect())
}

/// Spectrum of `T⁺` (diagonal `α_0..α_{N-2}`), unscaled.
pub fn t_plus_eigs(spec: &RecurrenceSpec) -> Result<Vec<f64>> {
    let n = spec.period();
    let diag = &spec.alpha()[..n - 1];
    Ok(half_eigs(diag)?.into_iter().map(|e| 2.0 * e).collect())
}

/// Spectrum of `T⁻` (diagonal `α_1..α_{N-1}`), unscaled.
pub fn t_minus_eigs(spec: &RecurrenceSpec) -> Result<Vec<f64>> {
    let diag = &spec.alpha()[1..];
    Ok(half_eigs(diag)?.into_iter().map(|e| 2.0 * e).collect())
}

pub fn zero_sets(spec: &RecurrenceSpec) -> Result<ZeroSets> {
    let n = spec.period();
    let alpha = spec.alpha();
    let x = half_eigs(alpha)?;
    let y = half_eigs(&alpha[..n - 1])?;
    let z = half_eigs(&alpha[1..])?;

    let check = |roots: &[f64], value: &dyn Fn(f64) -> Jet, what: &str| -> Result<()> {
        for &r in roots {
            let v = value(r);
            let scale = v.d1.abs().max(1.0);
            if v.value.abs() > 1e-8 * scale {
                return Err(Error::Internal(format!(
                    "{} residual {:e} at {} exceeds tolerance",
                    what, v.value, r
                )));
            }
        }
        Ok(())
    };
    check(&x, &|r| evaluate(spec, n, Jet::variable(r)).p, "P_N")?;
    check(&y, &|r| evaluate(spec, n, Jet::variable(r)).p_prev, "P_{N-1}")?;
    check(&z, &|r| evaluate(spec, n, Jet::variable(r)).p_star, "P*_N")?;
    Ok(ZeroSets { x, y, z })
}

/// Turning points `ξ_1 ≤ … ≤ ξ_{2N}` and the bands `(ξ_{2k-1}, ξ_{2k})`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandStructure {
    /// All 2N roots of `g_N² = 1`, double roots listed twice.
    pub xi: Vec<f64>,
    /// 1-based `k` with `ξ_{2k} = ξ_{2k+1}` (tangency between bands k and k+1).
    pub double_roots: Vec<usize>,
    pub b: f64,
}

impl BandStructure {
    pub fn band_count(&self) -> usize {
        self.xi.len() / 2
    }

    /// Band `i` (0-based) as `(ξ_{2i+1}, ξ_{2i+2})`.
    pub fn band(&self, i: usize) -> (f64, f64) {
        (self.xi[2 * i], self.xi[2 * i + 1])
    }

    pub fn bands(&self) -> Vec<(f64, f64)> {
        (0..self.band_count()).map(|i| self.band(i)).collect()
    }

    /// 0-based index of the open band containing `x`.
    pub fn band_containing(&self, x: f64) -> Option<usize> {
        (0..self.band_count()).find(|&i| {
            let (lo, hi) = self.band(i);
            lo < x && x < hi
        })
    }

    /// The double root closest to `x` when within `tol`.
    pub fn double_root_near(&self, x: f64, tol: f64) -> Option<f64> {
        self.double_roots
            .iter()
            .map(|&k| self.xi[2 * k - 1])
            .find(|&d| (d - x).abs() <= tol)
    }

    pub fn is_left_double(&self, i: usize) -> bool {
        i > 0 && self.double_roots.contains(&i)
    }

    pub fn is_right_double(&self, i: usize) -> bool {
        self.double_roots.contains(&(i + 1))
    }

    /// Bands glued across double roots, i.e. the connected components of
    /// the closed support.
    pub fn merged_intervals(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::new();
        for i in 0..self.band_count() {
            let (lo, hi) = self.band(i);
            if self.is_left_double(i) {
                if let Some(last) = out.last_mut() {
                    last.1 = hi;
                    continue;
                }
            }
            out.push((lo, hi));
        }
        out
    }
}

fn sign(n: usize, k: usize) -> f64 {
    if (n - k) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Eigenvalues (halved) of the N×N Jacobi matrix with diagonal `α` and
/// corner entries `sigma`, i.e. Bloch multiplier `sigma` over one period.
fn floquet_eigs(alpha: &[f64], sigma: f64) -> Vec<f64> {
    let n = alpha.len();
    let mut m = nalgebra::DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        m[(i, i)] += alpha[i];
        let j = (i + 1) % n;
        let c = if i + 1 < n { 1.0 } else { sigma };
        m[(i, j)] += c;
        m[(j, i)] += c;
    }
    m.symmetric_eigenvalues().iter().map(|e| 0.5 * e).collect()
}

/// Up to two Newton steps, each kept only if it lowers the residual.
fn polish(f: impl Fn(f64) -> Jet, mut x: f64) -> f64 {
    for _ in 0..2 {
        let v = f(x);
        if v.value == 0.0 || v.d1 == 0.0 {
            break;
        }
        let cand = x - v.value / v.d1;
        if !cand.is_finite() || (cand - x).abs() > 1e-8 * x.abs().max(1.0) {
            break;
        }
        if f(cand).value.abs() >= v.value.abs() {
            break;
        }
        x = cand;
    }
    x
}

/// Turning points with the default tangency tolerance.
pub fn turning_points(spec: &RecurrenceSpec) -> Result<BandStructure> {
    turning_points_with(spec, DOUBLE_ROOT_TOL)
}

pub fn turning_points_with(spec: &RecurrenceSpec, double_root_tol: f64) -> Result<BandStructure> {
    let a = spec.a();
    let n = spec.period();
    if a == 0.0 {
        return Ok(chebyshev_bands(n));
    }
    if a < 0.0 {
        let m = turning_points_with(&spec.mirrored(), double_root_tol)?;
        let xi = m.xi.iter().rev().map(|v| -v).collect();
        let mut double_roots: Vec<usize> = m.double_roots.iter().map(|&k| n - k).collect();
        double_roots.sort_unstable();
        return Ok(BandStructure { xi, double_roots, b: m.b });
    }
    let b = support_bound(a);
    if n == 1 {
        return Ok(BandStructure { xi: vec![a - 1.0, a + 1.0], double_roots: Vec::new(), b });
    }

    let g = |x: f64| recurrence::discriminant_value(spec, Jet::variable(x));

    // g_N = ±1 exactly where the Floquet multiplier is ±1, i.e. at half the
    // eigenvalues of the periodic (+) and antiperiodic (−) N×N matrices.
    let mut xi = floquet_eigs(spec.alpha(), 1.0);
    xi.extend(floquet_eigs(spec.alpha(), -1.0));
    xi.sort_by(|u, v| u.total_cmp(v));
    if xi.len() != 2 * n {
        return Err(Error::Internal(format!("found {} turning points, expected {}", xi.len(), 2 * n)));
    }

    let mut double_roots = Vec::new();
    for k in 1..n {
        let (lo, hi) = (xi[2 * k - 1], xi[2 * k]);
        let mid = 0.5 * (lo + hi);
        let excess = sign(n, k) * g(mid).value - 1.0;
        if hi - lo < 1e-6 && excess.abs() < double_root_tol {
            let t = extremum_near(&g, mid);
            xi[2 * k - 1] = t;
            xi[2 * k] = t;
            double_roots.push(k);
        }
    }
    for (j, x) in xi.iter_mut().enumerate() {
        let pair = double_roots.iter().any(|&k| j == 2 * k - 1 || j == 2 * k);
        if !pair {
            let target = if g(*x).value > 0.0 { 1.0 } else { -1.0 };
            *x = polish(|t| g(t) - Jet::from(target), *x);
        }
    }
    if n % 2 == 0 {
        // Shifting by N/2 flips the sign of every α_j, so for even N
        // g_N(−x) = g_N(x) and the turning points come in ± pairs.
        for j in 0..n {
            let m = 0.5 * (xi[2 * n - 1 - j] - xi[j]);
            xi[j] = 0.0 - m;
            xi[2 * n - 1 - j] = m;
        }
    }
    let bands = BandStructure { xi, double_roots, b };
    validate(spec, &bands)?;
    Ok(bands)
}

/// Critical point of `g_N` near a tangency, by Newton on `g'`.
fn extremum_near(g: &impl Fn(f64) -> Jet, start: f64) -> f64 {
    let mut x = start;
    for _ in 0..4 {
        let v = g(x);
        if v.d2 == 0.0 {
            break;
        }
        let step = v.d1 / v.d2;
        if !step.is_finite() {
            break;
        }
        x -= step;
    }
    if (x - start).abs() < 1e-6 * start.abs().max(1.0) {
        x
    } else {
        start
    }
}

fn chebyshev_bands(n: usize) -> BandStructure {
    // cos(jπ/N) written as sin((N − 2j)π/2N) so that the middle node is 0.
    let c = |j: usize| ((n as f64 - 2.0 * j as f64) * std::f64::consts::PI / (2.0 * n as f64)).sin();
    let mut xi = Vec::with_capacity(2 * n);
    for k in 1..=n {
        xi.push(c(n - k + 1));
        xi.push(c(n - k));
    }
    BandStructure { xi, double_roots: (1..n).collect(), b: 2.0 }
}

fn validate(spec: &RecurrenceSpec, bands: &BandStructure) -> Result<()> {
    let n = spec.period();
    if bands.xi.len() != 2 * n {
        return Err(Error::Internal(format!(
            "found {} turning points, expected {}",
            bands.xi.len(),
            2 * n
        )));
    }
    for w in bands.xi.windows(2) {
        if w[1] < w[0] {
            return Err(Error::Internal(format!("turning points out of order: {:?}", bands.xi)));
        }
    }
    for i in 0..n {
        let (lo, hi) = bands.band(i);
        if !(lo < hi) {
            return Err(Error::Internal(format!("empty band {} = ({}, {})", i + 1, lo, hi)));
        }
    }
    for &x in &bands.xi {
        let v = recurrence::discriminant_value(spec, Jet::variable(x));
        let g = v.value;
        // Absolute 1e-9 plus the residual a few ulps of x can produce.
        let tol = 1e-9 + 64.0 * f64::EPSILON * x.abs().max(1.0) * (2.0 * g * v.d1).abs();
        if (g * g - 1.0).abs() > tol {
            return Err(Error::Internal(format!("g_N({})² − 1 = {:e}", x, g * g - 1.0)));
        }
        if x.abs() >= bands.b {
            return Err(Error::Internal(format!("turning point {} outside (−b, b)", x)));
        }
    }
    Ok(())
}

/// Evidence for the common-eigenvalue pattern of `T⁺` and `T⁻`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjectureReport {
    pub common_eigenvalue_found: bool,
    pub value: Option<f64>,
    pub min_gap: f64,
}

/// Threshold below which two eigenvalues count as shared.
pub const COMMON_EIGENVALUE_TOL: f64 = 1e-10;

pub fn conjecture_scan(spec: &RecurrenceSpec) -> Result<ConjectureReport> {
    if spec.a() <= 0.0 {
        return Err(Error::InvalidArgument("conjecture scan needs a > 0".into()));
    }
    let plus = t_plus_eigs(spec)?;
    let minus = t_minus_eigs(spec)?;
    let mut best = (f64::INFINITY, None);
    for &p in &plus {
        for &m in &minus {
            let d = (p - m).abs();
            if d < best.0 {
                best = (d, Some(0.5 * (p + m)));
            }
        }
    }
    let found = best.0 < COMMON_EIGENVALUE_TOL;
    Ok(ConjectureReport {
        common_eigenvalue_found: found,
        value: if found { best.1 } else { None },
        min_gap: best.0,
    })
}
