//! The orthogonality measure `dμ = w(x) dx + Σ m_k δ_{y_k}`.
//!
//! The weight `w = 2√|1 − g_N²| / (π |P_{N−1}|)` is evaluated in factored
//! form: with `g_N² − 1 = 4^{N−1} Π (x − ξ_j)` and
//! `P_{N−1} = 2^{N−1} Π (x − y_k)`,
//!
//! ```text
//! w(x) = (2/π) · √Π|x − ξ_j| / Π|x − y_k|
//! ```
//!
//! Factors at coincident points (a double turning point sitting on `y_k`,
//! or a simple turning point equal to `y_k`) are merged before evaluation,
//! and the two factors of the current band's endpoints use the exact
//! endpoint distances carried by the quadrature node.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::bands::{self, BandStructure, ZeroSets};
use crate::error::{Error, Result};
use crate::quadrature::{tanh_sinh_vec, Node, QuadOptions};
use crate::recurrence::{self, RecurrenceSpec};

/// Masses below this relative threshold of `1 - |P_N(y_k)|` are zero.
pub const MASS_BOUNDARY_TOL: f64 = 1e-12;

/// Largest degree accepted by [`OrthogonalityMeasure::gram_matrix`].
pub const MAX_GRAM_DEGREE: usize = 24;

/// Points closer than this (relative) are treated as one factor site.
const SITE_TOL: f64 = 1e-10;

/// Offset for the one-sided limit of the weight at a double turning point.
const DOUBLE_ROOT_OFFSET: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
struct Site {
    pos: f64,
    /// Exponent times two.
    twice_exp: i32,
}

/// `scale · Π_sites |x − pos|^{exp}` with band endpoints resolved from the
/// node's exact distances.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Factored {
    scale: f64,
    sites: Vec<Site>,
    /// Site index of each `ξ_j`.
    site_of_xi: Vec<usize>,
}

impl Factored {
    /// `xi_twice_exp` is applied to every turning point and `root_twice_exp`
    /// to every entry of `roots`.
    pub(crate) fn new(bands: &BandStructure, xi_twice_exp: i32, roots: &[f64], root_twice_exp: i32, scale: f64) -> Self {
        let mut sites: Vec<Site> = Vec::new();
        let mut site_of_xi: Vec<usize> = Vec::with_capacity(bands.xi.len());
        for (j, &x) in bands.xi.iter().enumerate() {
            // A double root is listed twice; the second copy joins the first.
            let joins = j % 2 == 0 && j > 0 && bands.double_roots.contains(&(j / 2));
            if joins {
                let idx: usize = *site_of_xi.last().expect("previous turning point");
                sites[idx].twice_exp += xi_twice_exp;
                site_of_xi.push(idx);
            } else {
                sites.push(Site { pos: x, twice_exp: xi_twice_exp });
                site_of_xi.push(sites.len() - 1);
            }
        }
        for &r in roots {
            let near = sites
                .iter()
                .position(|s| (s.pos - r).abs() <= SITE_TOL * s.pos.abs().max(1.0));
            match near {
                Some(i) => sites[i].twice_exp += root_twice_exp,
                None => sites.push(Site { pos: r, twice_exp: root_twice_exp }),
            }
        }
        Factored { scale, sites, site_of_xi }
    }

    /// Value at a node inside band `band` (0-based).
    pub(crate) fn eval(&self, band: usize, node: Node) -> f64 {
        let lo_site = self.site_of_xi[2 * band];
        let hi_site = self.site_of_xi[2 * band + 1];
        let mut v = self.scale;
        for (i, s) in self.sites.iter().enumerate() {
            if s.twice_exp == 0 {
                continue;
            }
            let d = if i == lo_site {
                node.from_lo
            } else if i == hi_site {
                node.from_hi
            } else {
                (node.x - s.pos).abs()
            };
            v *= if s.twice_exp % 2 == 0 {
                d.powi(s.twice_exp / 2)
            } else {
                d.sqrt().powi(s.twice_exp)
            };
        }
        v
    }
}

/// Node for a point `x` of band `band`.
pub(crate) fn node_in(bands: &BandStructure, band: usize, x: f64) -> Node {
    let (lo, hi) = bands.band(band);
    Node { x, from_lo: x - lo, from_hi: hi - x }
}

/// Weight on the bands plus point masses at the zeros of `P_{N−1}`.
#[derive(Debug, Clone)]
pub struct OrthogonalityMeasure {
    spec: RecurrenceSpec,
    bands: BandStructure,
    zeros: ZeroSets,
    masses: Vec<(f64, f64)>,
    weight: Factored,
    options: QuadOptions,
}

/// `(y_k, m_k)` for every zero of `P_{N−1}`: `m_k = 0` if `|P_N(y_k)| ≥ 1`,
/// otherwise `4√|g_N(y_k)² − 1| / |P'_{N−1}(y_k)|`.
pub fn masses(spec: &RecurrenceSpec, zeros: &ZeroSets) -> Vec<(f64, f64)> {
    let n = spec.period();
    zeros
        .y
        .iter()
        .map(|&y| {
            let p = recurrence::eval_p(spec, n, y);
            if p.abs() >= 1.0 - MASS_BOUNDARY_TOL {
                return (y, 0.0);
            }
            let g = recurrence::discriminant_value(spec, y);
            let d = recurrence::eval_p_deriv(spec, n - 1, y);
            (y, 4.0 * (g * g - 1.0).abs().sqrt() / d.abs())
        })
        .collect()
}

/// Tanh-sinh integral of `f` over `(lo, hi)` with default options.
pub fn integrate_band<F: Fn(Node) -> f64>(f: F, lo: f64, hi: f64) -> Result<f64> {
    crate::quadrature::tanh_sinh(f, lo, hi)
}

impl OrthogonalityMeasure {
    pub fn new(spec: &RecurrenceSpec) -> Result<Self> {
        let bands = bands::turning_points(spec)?;
        let zeros = bands::zero_sets(spec)?;
        let masses = masses(spec, &zeros);
        let weight = Factored::new(&bands, 1, &zeros.y, -2, 2.0 / PI);
        Ok(OrthogonalityMeasure {
            spec: spec.clone(),
            bands,
            zeros,
            masses,
            weight,
            options: QuadOptions::default(),
        })
    }

    pub fn with_options(mut self, options: QuadOptions) -> Self {
        self.options = options;
        self
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

    pub fn masses(&self) -> &[(f64, f64)] {
        &self.masses
    }

    pub fn options(&self) -> &QuadOptions {
        &self.options
    }

    /// Weight at a quadrature node of band `band`.
    pub fn weight_at(&self, band: usize, node: Node) -> f64 {
        self.weight.eval(band, node)
    }

    /// `w(x)` for `x` inside a band. At a double turning point the removable
    /// singularity is filled by averaging the one-sided values at `x ± 1e-7`.
    pub fn weight(&self, x: f64) -> Result<f64> {
        if let Some(d) = self.bands.double_root_near(x, 1e-12) {
            let l = self.weight_open(d - DOUBLE_ROOT_OFFSET)?;
            let r = self.weight_open(d + DOUBLE_ROOT_OFFSET)?;
            return Ok(0.5 * (l + r));
        }
        self.weight_open(x)
    }

    fn weight_open(&self, x: f64) -> Result<f64> {
        let band = self.bands.band_containing(x).ok_or(Error::OutsideBands { x })?;
        Ok(self.weight.eval(band, node_in(&self.bands, band, x)))
    }

    /// `2√|1 − g_N²| / (π|P_{N−1}|)` straight from the recurrence.
    pub fn weight_direct(&self, x: f64) -> Result<f64> {
        if self.bands.band_containing(x).is_none() {
            return Err(Error::OutsideBands { x });
        }
        let n = self.spec.period();
        let g = recurrence::discriminant_value(&self.spec, x);
        let p = recurrence::eval_p(&self.spec, n - 1, x);
        if p == 0.0 {
            return Err(Error::Pole { x, mass: 0.0 });
        }
        Ok(2.0 * (1.0 - g * g).abs().sqrt() / (PI * p.abs()))
    }

    /// Per-band integrals of the vector-valued `f · w`, summed in band order.
    pub fn integrate_continuous_vec<F>(&self, f: F, dim: usize) -> Result<Vec<f64>>
    where
        F: Fn(Node, &mut [f64]) + Sync,
    {
        let per_band: Vec<Result<Vec<f64>>> = (0..self.bands.band_count())
            .into_par_iter()
            .map(|i| {
                let (lo, hi) = self.bands.band(i);
                tanh_sinh_vec(
                    |node, out| {
                        f(node, out);
                        let w = self.weight.eval(i, node);
                        out.iter_mut().for_each(|v| *v *= w);
                    },
                    lo,
                    hi,
                    dim,
                    &self.options,
                )
            })
            .collect();
        let mut total = vec![0.0; dim];
        for r in per_band {
            for (t, v) in total.iter_mut().zip(r?) {
                *t += v;
            }
        }
        Ok(total)
    }

    /// `∫ f dμ`, optionally without the point masses.
    pub fn integrate_vec<F>(&self, f: F, dim: usize, include_masses: bool) -> Result<Vec<f64>>
    where
        F: Fn(f64, &mut [f64]) + Sync,
    {
        let mut total = self.integrate_continuous_vec(|node, out| f(node.x, out), dim)?;
        if include_masses {
            let mut buf = vec![0.0; dim];
            for &(y, m) in &self.masses {
                if m > 0.0 {
                    buf.iter_mut().for_each(|b| *b = 0.0);
                    f(y, &mut buf);
                    for (t, b) in total.iter_mut().zip(&buf) {
                        *t += m * b;
                    }
                }
            }
        }
        Ok(total)
    }

    pub fn integrate<F: Fn(f64) -> f64 + Sync>(&self, f: F) -> Result<f64> {
        Ok(self.integrate_vec(|x, out| out[0] = f(x), 1, true)?[0])
    }

    /// `Σ_bands ∫ w`.
    pub fn continuous_mass(&self) -> Result<f64> {
        Ok(self.integrate_continuous_vec(|_, out| out[0] = 1.0, 1)?[0])
    }

    pub fn discrete_mass(&self) -> f64 {
        self.masses.iter().map(|(_, m)| m).sum()
    }

    /// `∫ dμ`, which is 1 for a probability measure.
    pub fn total_mass(&self) -> Result<f64> {
        Ok(self.continuous_mass()? + self.discrete_mass())
    }

    /// `∫ x^k dμ` for `k = 0..=k_max`.
    pub fn moments(&self, k_max: usize) -> Result<Vec<f64>> {
        self.integrate_vec(
            |x, out| {
                let mut p = 1.0;
                for o in out.iter_mut() {
                    *o = p;
                    p *= x;
                }
            },
            k_max + 1,
            true,
        )
    }

    /// `G[m][n] = ∫ P_m P_n dμ` for `m, n ≤ max_deg`.
    pub fn gram_matrix(&self, max_deg: usize, include_masses: bool) -> Result<Vec<Vec<f64>>> {
        if max_deg > MAX_GRAM_DEGREE {
            return Err(Error::InvalidArgument(format!(
                "max degree {} exceeds {}",
                max_deg, MAX_GRAM_DEGREE
            )));
        }
        let d = max_deg + 1;
        let dim = d * (d + 1) / 2;
        let spec = &self.spec;
        let flat = self.integrate_vec(
            |x, out| {
                let p = poly_values(spec, max_deg, x);
                let mut idx = 0;
                for m in 0..d {
                    for n in m..d {
                        out[idx] = p[m] * p[n];
                        idx += 1;
                    }
                }
            },
            dim,
            include_masses,
        )?;
        let mut g = vec![vec![0.0; d]; d];
        let mut idx = 0;
        for m in 0..d {
            for n in m..d {
                g[m][n] = flat[idx];
                g[n][m] = flat[idx];
                idx += 1;
            }
        }
        Ok(g)
    }

    /// `∫ dμ(x) / (z − x)` by quadrature, for `Im z ≠ 0`.
    pub fn stieltjes(&self, z: Complex64) -> Result<Complex64> {
        if z.im == 0.0 {
            return Err(Error::InvalidArgument("Stieltjes transform needs Im z ≠ 0".into()));
        }
        let v = self.integrate_vec(
            |x, out| {
                let r = (z - x).inv();
                out[0] = r.re;
                out[1] = r.im;
            },
            2,
            true,
        )?;
        Ok(Complex64::new(v[0], v[1]))
    }
}

/// `P_0(x), …, P_n(x)`.
pub fn poly_values(spec: &RecurrenceSpec, n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let (mut prev, mut cur) = (0.0, 1.0);
    out.push(cur);
    for k in 0..n {
        let next = (2.0 * x - spec.alpha_at(k)) * cur - prev;
        prev = cur;
        cur = next;
        out.push(cur);
    }
    out
}

/// Max |off-diagonal| and min diagonal of a Gram matrix.
pub fn gram_summary(g: &[Vec<f64>]) -> (f64, f64) {
    let mut off = 0.0f64;
    let mut diag = f64::INFINITY;
    for (m, row) in g.iter().enumerate() {
        for (n, &v) in row.iter().enumerate() {
            if m == n {
                diag = diag.min(v);
            } else {
                off = off.max(v.abs());
            }
        }
    }
    (off, diag)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn measure(a: f64, n: usize) -> OrthogonalityMeasure {
        OrthogonalityMeasure::new(&RecurrenceSpec::new(a, n).unwrap()).unwrap()
    }

    #[test]
    fn single_band_weight_is_a_shifted_semicircle() {
        let a = 0.9;
        let m = measure(a, 1);
        for &x in &[0.0, 0.5, 1.2, 1.85] {
            let want = 2.0 / PI * (1.0 - (x - a) * (x - a)).sqrt();
            assert!((m.weight(x).unwrap() - want).abs() < 1e-14);
        }
        assert!(m.weight(2.0).is_err());
        assert!(m.masses().is_empty());
    }

    #[test]
    fn two_band_weight_closed_form() {
        let a: f64 = 0.9;
        let m = measure(a, 2);
        for &x in &[-1.3, -1.0, 0.95, 1.2] {
            let want = 2.0 / PI * ((x + a).abs() / (x - a).abs() * (a * a + 1.0 - x * x)).sqrt();
            let got = m.weight(x).unwrap();
            assert!((got - want).abs() < 1e-12 * want.max(1.0), "x={} {} vs {}", x, got, want);
        }
        assert_eq!(m.masses().len(), 1);
        assert_eq!(m.masses()[0].1, 0.0);
    }

    #[test]
    fn factored_and_direct_weights_agree() {
        for n in 1..=7 {
            for &a in &[0.5, 0.9, 1.5, -0.7] {
                let m = measure(a, n);
                for i in 0..m.bands().band_count() {
                    let (lo, hi) = m.bands().band(i);
                    for t in [0.1, 0.37, 0.5, 0.81] {
                        let x = lo + t * (hi - lo);
                        let f = m.weight(x).unwrap();
                        let d = m.weight_direct(x).unwrap();
                        assert!(f > 0.0);
                        assert!((f - d).abs() < 1e-9 * d.max(1.0), "N={} a={} x={}: {} vs {}", n, a, x, f, d);
                    }
                }
            }
        }
    }

    #[test]
    fn removable_singularity_at_double_root() {
        let m = measure(0.9, 4);
        let w0 = m.weight(0.0).unwrap();
        let l = m.weight(-1e-6).unwrap();
        let r = m.weight(1e-6).unwrap();
        assert!(w0.is_finite() && w0 > 0.0);
        assert!((w0 - 0.5 * (l + r)).abs() < 1e-9);
    }

    #[test]
    fn period_three_masses() {
        let a: f64 = 0.9;
        let m = measure(a, 3);
        let ms = m.masses();
        assert_eq!(ms[0].1, 0.0);
        assert!((ms[1].1 - a / (a * a + 4.0 / 9.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn total_mass_is_one() {
        for n in 1..=6 {
            for &a in &[0.5, 0.9, 1.5] {
                let t = measure(a, n).total_mass().unwrap();
                assert!((t - 1.0).abs() < 1e-9, "N={} a={} total {}", n, a, t);
            }
        }
    }

    #[test]
    fn gram_rejects_large_degree() {
        assert!(measure(0.5, 2).gram_matrix(25, true).is_err());
    }

    #[test]
    fn chebyshev_gram_is_identity() {
        let g = measure(0.0, 1).gram_matrix(3, true).unwrap();
        for (i, row) in g.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((v - want).abs() < 1e-12);
            }
        }
    }
}
