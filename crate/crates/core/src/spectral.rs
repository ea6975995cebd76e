//! Stieltjes transform, resolvent of the two-sided Jacobi matrix and the
//! 2×2 matrix of spectral densities.
//!
//! The square root `√(g_N² − 1)` is always taken as
//! `2^{N−1} Π_j (z − ξ_j)^{1/2}` with the principal branch per factor. The
//! product is analytic off the bands, behaves like `g_N(z)` at infinity and
//! on band `k` takes the boundary value `+i(−1)^{N−k}√(1 − g_N²)` from
//! above.
//!
//! The two-sided matrix `A` has diagonal `α_j/2` (`j ∈ ℤ`, even in `j`) and
//! off-diagonal `1/2`; the resolvent entries refer to `e_0` and `e_1`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::bands::{self, BandStructure, ZeroSets};
use crate::error::{Error, Result};
use crate::measure::{self, node_in, Factored};
use crate::quadrature::Node;
use crate::recurrence::{evaluate, RecurrenceSpec};

/// `|P_{N−1}(z)|` below which the conjugate form of φ is always used.
pub const SMALL_DENOMINATOR: f64 = 1e-8;

/// Offset used for the limit of φ at a massless real zero of `P_{N−1}`.
const LIMIT_OFFSET: f64 = 1e-7;

/// Denominators below this magnitude trigger a continued-fraction retry.
const CF_TINY: f64 = 1e-280;

/// `√(g_N(z)² − 1)` as a product of principal square roots.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchedSqrt {
    xi: Vec<f64>,
    lead: f64,
}

impl BranchedSqrt {
    pub fn new(bands: &BandStructure) -> Self {
        let n = bands.band_count();
        BranchedSqrt { xi: bands.xi.clone(), lead: 2f64.powi(n as i32 - 1) }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.xi.iter().fold(Complex64::new(self.lead, 0.0), |acc, &x| acc * (z - x).sqrt())
    }
}

/// Values of the recurrence quantities at a complex point.
#[derive(Debug, Clone, Copy)]
struct Local {
    p_n: Complex64,
    p_n1: Complex64,
    p_star_n: Complex64,
    g: Complex64,
    sqrt: Complex64,
}

/// Closed-form Stieltjes transform and resolvent for one spec.
#[derive(Debug, Clone)]
pub struct ClosedForm {
    spec: RecurrenceSpec,
    bands: BandStructure,
    zeros: ZeroSets,
    masses: Vec<(f64, f64)>,
    sqrt: BranchedSqrt,
}

/// Entries of `(zI − A)^{-1}` at `(0,0)`, `(0,1)`, `(1,1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolventEntries {
    pub r00: Complex64,
    pub r01: Complex64,
    pub r11: Complex64,
    /// Largest relative gap between the φ-based entries and the forms
    /// `P*_N / (2√)` and `P_{N−1} / √`.
    pub simplified_residual: f64,
}

impl ClosedForm {
    pub fn new(spec: &RecurrenceSpec) -> Result<Self> {
        let bands = bands::turning_points(spec)?;
        let zeros = bands::zero_sets(spec)?;
        let masses = measure::masses(spec, &zeros);
        let sqrt = BranchedSqrt::new(&bands);
        Ok(ClosedForm { spec: spec.clone(), bands, zeros, masses, sqrt })
    }

    pub fn spec(&self) -> &RecurrenceSpec {
        &self.spec
    }

    pub fn bands(&self) -> &BandStructure {
        &self.bands
    }

    pub fn zeros(&self) -> &ZeroSets {
        &self.zeros
    }

    pub fn branched_sqrt(&self) -> &BranchedSqrt {
        &self.sqrt
    }

    fn local(&self, z: Complex64) -> Local {
        let n = self.spec.period();
        let v = evaluate(&self.spec, n, z);
        let g = (v.p - v.p_star_prev * 0.5) * 0.5;
        Local { p_n: v.p, p_n1: v.p_prev, p_star_n: v.p_star, g, sqrt: self.sqrt.eval(z) }
    }

    /// `φ(z) = 2[P_N − g_N − √(g_N² − 1)] / P_{N−1}`.
    pub fn phi(&self, z: Complex64) -> Result<Complex64> {
        if z.im == 0.0 {
            for &(y, m) in &self.masses {
                if (z.re - y).abs() <= 1e-12 * y.abs().max(1.0) {
                    if m > 0.0 {
                        return Err(Error::Pole { x: z.re, mass: m });
                    }
                    return self.phi_real_limit(y);
                }
            }
        }
        Ok(self.phi_unchecked(z))
    }

    fn phi_unchecked(&self, z: Complex64) -> Complex64 {
        let l = self.local(z);
        let u = l.p_n - l.g;
        // (u − √)(u + √) = P_{N−1} P*_N / 2, so both forms agree; take the
        // one whose bracket does not cancel.
        if l.p_n1.norm() < SMALL_DENOMINATOR || (u + l.sqrt).norm() >= (u - l.sqrt).norm() {
            l.p_star_n / (u + l.sqrt)
        } else {
            (u - l.sqrt) * 2.0 / l.p_n1
        }
    }

    /// Average of the two one-sided values next to a massless real zero
    /// of `P_{N−1}`.
    fn phi_real_limit(&self, y: f64) -> Result<Complex64> {
        let l = self.phi_unchecked(Complex64::new(y - LIMIT_OFFSET, 0.0));
        let r = self.phi_unchecked(Complex64::new(y + LIMIT_OFFSET, 0.0));
        Ok((l + r) * 0.5)
    }

    /// Relative residual of the quadratic satisfied by φ (N ≤ 2) or of the
    /// one-period continued-fraction map (N ≥ 3).
    pub fn quadratic_residual(&self, z: Complex64) -> Result<f64> {
        if z.im == 0.0 {
            return Err(Error::InvalidArgument("quadratic residual needs Im z ≠ 0".into()));
        }
        let phi = self.phi(z)?;
        let a = self.spec.a();
        match self.spec.period() {
            1 => {
                let terms = [phi * phi, -(z - a) * phi * 4.0, Complex64::new(4.0, 0.0)];
                Ok(relative(&terms))
            }
            2 => {
                let terms = [(z - a) * phi * phi, -(z * z - a * a) * phi * 4.0, (z + a) * 4.0];
                Ok(relative(&terms))
            }
            _ => {
                let mapped = period_map(&self.spec, z, phi)?;
                Ok((mapped - phi).norm() / phi.norm().max(f64::MIN_POSITIVE))
            }
        }
    }

    /// Resolvent entries from φ, checked against the simplified forms.
    pub fn resolvent(&self, z: Complex64) -> Result<ResolventEntries> {
        if z.im == 0.0 {
            return Err(Error::InvalidArgument("resolvent needs Im z ≠ 0".into()));
        }
        let a = self.spec.a();
        let phi = self.phi(z)?;
        let w = (z - a) * phi;
        let den = Complex64::new(2.0, 0.0) - w;
        let one_minus = Complex64::new(1.0, 0.0) - w;
        let r00 = phi / den;
        let r01 = -one_minus * 2.0 / den;
        let r11 = -(one_minus / den) * 4.0 / phi;

        let l = self.local(z);
        let s00 = l.p_star_n / (l.sqrt * 2.0);
        let s11 = l.p_n1 / l.sqrt;
        let rel = |u: Complex64, v: Complex64| (u - v).norm() / u.norm().max(v.norm()).max(1e-300);
        let simplified_residual = rel(r00, s00).max(rel(r11, s11));
        Ok(ResolventEntries { r00, r01, r11, simplified_residual })
    }

    /// `|2/φ − (z − a) − 2√/P*_N|`, relative.
    pub fn simplified_identity_residual(&self, z: Complex64) -> Result<f64> {
        let phi = self.phi(z)?;
        let l = self.local(z);
        let lhs = Complex64::new(2.0, 0.0) / phi - (z - self.spec.a());
        let rhs = l.sqrt * 2.0 / l.p_star_n;
        Ok((lhs - rhs).norm() / lhs.norm().max(rhs.norm()).max(1e-300))
    }
}

fn relative(terms: &[Complex64]) -> f64 {
    let sum: Complex64 = terms.iter().sum();
    let scale = terms.iter().map(|t| t.norm()).fold(f64::MIN_POSITIVE, f64::max);
    sum.norm() / scale
}

/// One period of the continued fraction with tail `φ/2`:
/// `2 / (2z − α_0 − 1/(2z − α_1 − … 1/(2z − α_{N−1} − φ/2)))`.
pub fn period_map(spec: &RecurrenceSpec, z: Complex64, phi: Complex64) -> Result<Complex64> {
    let n = spec.period();
    let mut t = phi * 0.5;
    for j in (1..n).rev() {
        let d = z * 2.0 - spec.alpha_at(j) - t;
        if d.norm() < CF_TINY {
            return Err(Error::NearZeroDenominator { depth: j });
        }
        t = d.inv();
    }
    let d = z * 2.0 - spec.alpha_at(0) - t;
    if d.norm() < CF_TINY {
        return Err(Error::NearZeroDenominator { depth: 0 });
    }
    Ok(Complex64::new(2.0, 0.0) / d)
}

/// Closed-form φ for a single point.
pub fn phi_closed(spec: &RecurrenceSpec, z: Complex64) -> Result<Complex64> {
    ClosedForm::new(spec)?.phi(z)
}

/// Truncated continued fraction `2/(2z − α_0 −) 1/(2z − α_1 −) …` of the
/// given depth, evaluated from the bottom with tail 0. A near-zero partial
/// denominator restarts the evaluation one level deeper.
pub fn phi_cf(spec: &RecurrenceSpec, z: Complex64, depth: usize) -> Result<Complex64> {
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    const RETRIES: usize = 8;
    'attempt: for d in depth..depth + RETRIES {
        let mut t = Complex64::new(0.0, 0.0);
        for j in (1..d).rev() {
            let den = z * 2.0 - spec.alpha_at(j) - t;
            if den.norm() < CF_TINY {
                continue 'attempt;
            }
            t = den.inv();
        }
        let den = z * 2.0 - spec.alpha_at(0) - t;
        if den.norm() < CF_TINY {
            continue 'attempt;
        }
        return Ok(Complex64::new(2.0, 0.0) / den);
    }
    Err(Error::NearZeroDenominator { depth: depth + RETRIES - 1 })
}

/// Relative residual of [`ClosedForm::quadratic_residual`] for one point.
pub fn quadratic_residual(spec: &RecurrenceSpec, z: Complex64) -> Result<f64> {
    ClosedForm::new(spec)?.quadratic_residual(z)
}

/// Resolvent entries for one point.
pub fn resolvent_entries(spec: &RecurrenceSpec, z: Complex64) -> Result<ResolventEntries> {
    ClosedForm::new(spec)?.resolvent(z)
}

/// Densities of `dμ00`, `dμ01`, `dμ11` on the bands:
///
/// ```text
/// d00 = |P*_N| / (2π√(1 − g_N²)),  d01 = (x − a) d00,
/// d11 = |P_{N−1}| / (π√(1 − g_N²))
/// ```
///
/// evaluated in factored form through the zeros `z_k`, `y_k` and `ξ_j`.
#[derive(Debug, Clone)]
pub struct SpectralDensities {
    spec: RecurrenceSpec,
    bands: BandStructure,
    d00: Factored,
    d11: Factored,
}

/// Which density to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Entry {
    D00,
    D01,
    D11,
}

impl SpectralDensities {
    pub fn new(spec: &RecurrenceSpec) -> Result<Self> {
        let bands = bands::turning_points(spec)?;
        let zeros = bands::zero_sets(spec)?;
        let d00 = Factored::new(&bands, -1, &zeros.z, 2, 1.0 / PI);
        let d11 = Factored::new(&bands, -1, &zeros.y, 2, 1.0 / PI);
        Ok(SpectralDensities { spec: spec.clone(), bands, d00, d11 })
    }

    pub fn bands(&self) -> &BandStructure {
        &self.bands
    }

    /// Value at a quadrature node of band `band` (0-based).
    pub fn at(&self, entry: Entry, band: usize, node: Node) -> f64 {
        match entry {
            Entry::D00 => self.d00.eval(band, node),
            Entry::D11 => self.d11.eval(band, node),
            Entry::D01 => (node.x - self.spec.a()) * self.d00.eval(band, node),
        }
    }

    fn locate(&self, x: f64) -> Result<(usize, Node)> {
        let band = self.bands.band_containing(x).ok_or(Error::OutsideBands { x })?;
        Ok((band, node_in(&self.bands, band, x)))
    }

    pub fn eval(&self, entry: Entry, x: f64) -> Result<f64> {
        let (band, node) = self.locate(x)?;
        Ok(self.at(entry, band, node))
    }

    pub fn d00(&self, x: f64) -> Result<f64> {
        self.eval(Entry::D00, x)
    }

    pub fn d01(&self, x: f64) -> Result<f64> {
        self.eval(Entry::D01, x)
    }

    pub fn d11(&self, x: f64) -> Result<f64> {
        self.eval(Entry::D11, x)
    }

    /// The three densities straight from the recurrence values.
    pub fn direct(&self, x: f64) -> Result<[f64; 3]> {
        self.locate(x)?;
        let n = self.spec.period();
        let v = evaluate(&self.spec, n, x);
        let g = (v.p - 0.5 * v.p_star_prev) * 0.5;
        let root = (1.0 - g * g).abs().sqrt();
        let d00 = v.p_star.abs() / (2.0 * PI * root);
        let d11 = v.p_prev.abs() / (PI * root);
        Ok([d00, (x - self.spec.a()) * d00, d11])
    }

    /// `∫ f(x) · d_entry(x) dx` over all bands, for each requested entry.
    pub fn integrate<F>(&self, entries: &[Entry], f: F, opts: &crate::quadrature::QuadOptions) -> Result<Vec<f64>>
    where
        F: Fn(f64) -> f64,
    {
        let mut total = vec![0.0; entries.len()];
        for band in 0..self.bands.band_count() {
            let (lo, hi) = self.bands.band(band);
            let v = crate::quadrature::tanh_sinh_vec(
                |node, out| {
                    let fx = f(node.x);
                    for (o, &e) in out.iter_mut().zip(entries) {
                        *o = fx * self.at(e, band, node);
                    }
                },
                lo,
                hi,
                entries.len(),
                opts,
            )?;
            for (t, x) in total.iter_mut().zip(v) {
                *t += x;
            }
        }
        Ok(total)
    }
}

/// Plemelj jump `(S(x − iε) − S(x + iε)) / (2πi)` extrapolated to `ε → 0`.
///
/// Uses `ε ∈ {1e-4, 1e-5, 1e-6}` and two rounds of Richardson elimination
/// (error terms of order `ε` and `ε²`). Fails when successive differences
/// of the raw values grow instead of shrinking, which means rounding or a
/// nearby singularity dominates the smallest `ε`.
pub fn plemelj_extract<S>(s: S, x: f64) -> Result<f64>
where
    S: Fn(Complex64) -> Result<Complex64>,
{
    let jump = |eps: f64| -> Result<f64> {
        let below = s(Complex64::new(x, -eps))?;
        let above = s(Complex64::new(x, eps))?;
        Ok(((below - above) / Complex64::new(0.0, 2.0 * PI)).re)
    };
    let f = [jump(1e-4)?, jump(1e-5)?, jump(1e-6)?];
    let d1 = f[1] - f[0];
    let d2 = f[2] - f[1];
    let flat = 1e-12 * f[2].abs().max(1.0);
    if d2.abs() > flat && d2.abs() > d1.abs() {
        return Err(Error::Extrapolation(format!(
            "jump values {:e}, {:e}, {:e} do not converge",
            f[0], f[1], f[2]
        )));
    }
    let r1 = (10.0 * f[1] - f[0]) / 9.0;
    let r2 = (10.0 * f[2] - f[1]) / 9.0;
    Ok((100.0 * r2 - r1) / 99.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn spec(a: f64, n: usize) -> RecurrenceSpec {
        RecurrenceSpec::new(a, n).unwrap()
    }

    #[test]
    fn single_band_matches_closed_form() {
        let a = 0.9;
        let cf = ClosedForm::new(&spec(a, 1)).unwrap();
        for z in [c(0.3, 0.5), c(-2.0, 1.0), c(2.0, 0.25)] {
            let w = z - a;
            let want = w * 2.0 - (w - 1.0).sqrt() * (w + 1.0).sqrt() * 2.0;
            let got = cf.phi(z).unwrap();
            assert!((got - want).norm() < 1e-12);
            assert!(got.im < 0.0);
        }
        let big = c(0.0, 1e6);
        assert!((cf.phi(big).unwrap() * big - 1.0).norm() < 1e-6);
    }

    #[test]
    fn sqrt_squares_to_discriminant() {
        for n in 1..=6 {
            let s = spec(0.9, n);
            let cf = ClosedForm::new(&s).unwrap();
            for z in [c(0.3, 0.5), c(-1.7, 0.25), c(1.1, -1.0)] {
                let r = cf.branched_sqrt().eval(z);
                let g = crate::recurrence::discriminant_value(&s, z);
                let want = g * g - 1.0;
                assert!((r * r - want).norm() < 1e-10 * want.norm().max(1.0));
            }
        }
    }

    #[test]
    fn upper_boundary_values_follow_band_parity() {
        for n in 1..=5 {
            let s = spec(0.9, n);
            let cf = ClosedForm::new(&s).unwrap();
            for k in 1..=n {
                let (lo, hi) = cf.bands().band(k - 1);
                let x = 0.5 * (lo + hi);
                let r = cf.branched_sqrt().eval(c(x, 1e-14));
                let g = crate::recurrence::discriminant_value(&s, x);
                let sign = if (n - k) % 2 == 0 { 1.0 } else { -1.0 };
                let want = c(0.0, sign * (1.0 - g * g).sqrt());
                assert!((r - want).norm() < 1e-9, "N={} k={}: {} vs {}", n, k, r, want);
            }
        }
    }

    #[test]
    fn herglotz_sign_and_continued_fraction() {
        for n in 1..=5 {
            let s = spec(0.9, n);
            let cf = ClosedForm::new(&s).unwrap();
            for z in [c(0.5, 0.5), c(-1.0, 0.25), c(2.0, 1.0)] {
                let p = cf.phi(z).unwrap();
                assert!(p.im < 0.0);
                let q = phi_cf(&s, z, 400).unwrap();
                assert!((p - q).norm() < 1e-8, "N={} z={}: {} vs {}", n, z, p, q);
            }
        }
    }

    #[test]
    fn quadratic_and_fixed_point_residuals() {
        assert!(quadratic_residual(&spec(0.9, 1), c(1.0, 1.0)).unwrap() < 1e-12);
        assert!(quadratic_residual(&spec(0.5, 2), c(0.0, 2.0)).unwrap() < 1e-12);
        assert!(quadratic_residual(&spec(0.9, 5), c(1.0, 0.3)).unwrap() < 1e-10);
    }

    #[test]
    fn single_band_resolvent() {
        let a = 0.9;
        let z = c(0.4, 0.6);
        let r = resolvent_entries(&spec(a, 1), z).unwrap();
        let cf = ClosedForm::new(&spec(a, 1)).unwrap();
        let root = cf.branched_sqrt().eval(z);
        assert!((r.r00 - root.inv()).norm() < 1e-12);
        assert!((r.r11 - root.inv()).norm() < 1e-12);
        assert!((r.r01 - ((z - a) / root - 1.0)).norm() < 1e-12);
        assert!(r.simplified_residual < 1e-12);
    }

    #[test]
    fn pole_and_removable_points() {
        let a = 0.9;
        let cf = ClosedForm::new(&spec(a, 3)).unwrap();
        let y = cf.zeros().y.clone();
        // y_2 carries mass, y_1 does not.
        assert!(matches!(cf.phi(c(y[1], 0.0)), Err(Error::Pole { .. })));
        assert!(cf.phi(c(y[0], 0.0)).unwrap().is_finite());
        // Conjugate form near a massless zero agrees with the direct one.
        let z = c(y[0], 1e-3);
        let l = cf.local(z);
        let direct = (l.p_n - l.g - l.sqrt) * 2.0 / l.p_n1;
        let conj = l.p_star_n / (l.p_n - l.g + l.sqrt);
        assert!((direct - conj).norm() < 1e-9 * direct.norm());
    }

    #[test]
    fn densities_factored_match_direct() {
        for n in 1..=6 {
            for &a in &[0.5, 0.9, 1.5] {
                let d = SpectralDensities::new(&spec(a, n)).unwrap();
                for band in 0..n {
                    let (lo, hi) = d.bands().band(band);
                    for t in [0.2, 0.5, 0.7] {
                        let x = lo + t * (hi - lo);
                        let direct = d.direct(x).unwrap();
                        let f = [d.d00(x).unwrap(), d.d01(x).unwrap(), d.d11(x).unwrap()];
                        for (u, v) in f.iter().zip(direct) {
                            assert!((u - v).abs() < 1e-9 * v.abs().max(1.0), "N={} a={} x={}", n, a, x);
                        }
                        assert!(f[0] > 0.0 && f[2] > 0.0);
                        assert!(f[0] * f[2] - f[1] * f[1] >= -1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn plemelj_recovers_semicircle() {
        let cf = ClosedForm::new(&spec(0.0, 1)).unwrap();
        for &x in &[-0.6, 0.0, 0.45] {
            let got = plemelj_extract(|z| cf.phi(z), x).unwrap();
            let want = 2.0 / PI * (1.0 - x * x).sqrt();
            assert!((got - want).abs() < 1e-9, "{} vs {}", got, want);
        }
    }

    #[test]
    fn plemelj_reports_divergent_jumps() {
        // A pole on the axis: the jump grows like 1/ε.
        let r = plemelj_extract(|z| Ok(1.0 / (z - 0.3)), 0.3);
        assert!(matches!(r, Err(Error::Extrapolation(_))));
    }
}
