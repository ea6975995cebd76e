//! The polynomial families `P_n` and `P*_n` and the discriminant `g_N`.
//!
//! Both families obey
//!
//! ```text
//! 2x Y_n = Y_{n+1} + α_n Y_n + Y_{n-1},    α_n = 2a cos(2πn/N)
//! ```
//!
//! with `P_{-1} = 0, P_0 = 1` and `P*_{-1} = -2, P*_0 = 0`. The
//! discriminant is `g_N = (P_N - P*_{N-1}/2) / 2`, half the trace of the
//! N-step transfer matrix.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::exact;
use crate::poly::{Coeff, Poly};
use crate::scalar::Scalar;

/// Coupling `a` and period `N`, with the derived coefficients `α_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceSpec {
    a: f64,
    period: usize,
    alpha: Vec<f64>,
    a_exact: BigRational,
}

impl RecurrenceSpec {
    /// Builds the spec from a double. The exact backing uses the binary
    /// value of `a`, which is always a rational for finite input.
    pub fn new(a: f64, period: usize) -> Result<Self> {
        let a_exact = exact::rational_from_f64(a).ok_or(Error::NonRational(a))?;
        Self::build(a, a_exact, period)
    }

    /// Builds the spec from an exact rational coupling such as `9/10`.
    pub fn from_rational(a: BigRational, period: usize) -> Result<Self> {
        use num_traits::ToPrimitive;
        let af = a
            .to_f64()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Error::InvalidArgument("coupling is not representable".into()))?;
        Self::build(af, a, period)
    }

    fn build(a: f64, a_exact: BigRational, period: usize) -> Result<Self> {
        if period == 0 {
            return Err(Error::InvalidArgument("period N must be at least 1".into()));
        }
        if !a.is_finite() {
            return Err(Error::NonRational(a));
        }
        let alpha = (0..period).map(|j| alpha_value(a, j, period)).collect();
        Ok(RecurrenceSpec { a, period, alpha, a_exact })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn a_exact(&self) -> &BigRational {
        &self.a_exact
    }

    pub fn period(&self) -> usize {
        self.period
    }

    /// `α_0, …, α_{N-1}`.
    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    /// `α_n` for any `n ≥ 0` (periodic extension).
    pub fn alpha_at(&self, n: usize) -> f64 {
        self.alpha[n % self.period]
    }

    /// The same period with the coupling negated.
    pub fn mirrored(&self) -> Self {
        RecurrenceSpec {
            a: -self.a,
            period: self.period,
            alpha: self.alpha.iter().map(|v| -v).collect(),
            a_exact: -self.a_exact.clone(),
        }
    }

    /// Rational coefficients `α_j` for the exact backing.
    pub fn exact_alpha(&self) -> ExactAlpha {
        let values = (0..self.period)
            .map(|j| &self.a_exact * exact::two_cos_rational(j, self.period))
            .collect();
        ExactAlpha { values, exact_cosines: exact::is_exact_period(self.period) }
    }
}

fn alpha_value(a: f64, j: usize, period: usize) -> f64 {
    match exact::two_cos_integer(j, period) {
        Some(c) => a * c as f64,
        None => {
            // Fold so that α_j = α_{N-j} holds bit for bit.
            let r = j % period;
            let r = r.min(period - r);
            2.0 * a * (2.0 * std::f64::consts::PI * r as f64 / period as f64).cos()
        }
    }
}

/// Rational coefficients used by the exact backing.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactAlpha {
    pub values: Vec<BigRational>,
    /// `false` when the cosines were rationalized (period not in {1,2,3,4,6}).
    pub exact_cosines: bool,
}

/// `(P_k, P*_k)` for `k = 0..=n_max` from an arbitrary periodic coefficient
/// sequence.
pub fn build_polys_from<T: Coeff>(alpha: &[T], n_max: usize) -> Vec<(Poly<T>, Poly<T>)> {
    assert!(!alpha.is_empty(), "coefficient sequence must be nonempty");
    let two = T::one() + T::one();
    let mut out = Vec::with_capacity(n_max + 1);
    let mut p_prev = Poly::<T>::zero();
    let mut p = Poly::constant(T::one());
    let mut s_prev = Poly::constant(-two.clone());
    let mut s = Poly::<T>::zero();
    out.push((p.clone(), s.clone()));
    for n in 0..n_max {
        let factor = Poly::linear(-alpha[n % alpha.len()].clone(), two.clone());
        let p_next = &(&factor * &p) - &p_prev;
        let s_next = &(&factor * &s) - &s_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        s_prev = std::mem::replace(&mut s, s_next);
        out.push((p.clone(), s.clone()));
    }
    out
}

/// Exact-rational `(P_k, P*_k)` for `k = 0..=n_max`.
pub fn build_polys_exact(spec: &RecurrenceSpec, n_max: usize) -> Vec<(Poly<BigRational>, Poly<BigRational>)> {
    build_polys_from(&spec.exact_alpha().values, n_max)
}

/// Floating `(P_k, P*_k)` for `k = 0..=n_max`.
pub fn build_polys_f64(spec: &RecurrenceSpec, n_max: usize) -> Vec<(Poly<f64>, Poly<f64>)> {
    build_polys_from(spec.alpha(), n_max)
}

/// Values of both families at index `n` and `n - 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecurrenceValues<T> {
    pub p: T,
    pub p_prev: T,
    pub p_star: T,
    pub p_star_prev: T,
}

/// Forward recurrence up to index `n` at the point `x`.
pub fn evaluate<T: Scalar>(spec: &RecurrenceSpec, n: usize, x: T) -> RecurrenceValues<T> {
    let two_x = x + x;
    let mut p_prev = T::from(0.0);
    let mut p = T::from(1.0);
    let mut s_prev = T::from(-2.0);
    let mut s = T::from(0.0);
    for k in 0..n {
        let f = two_x - T::from(spec.alpha_at(k));
        let p_next = f * p - p_prev;
        let s_next = f * s - s_prev;
        p_prev = p;
        p = p_next;
        s_prev = s;
        s = s_next;
    }
    RecurrenceValues { p, p_prev, p_star: s, p_star_prev: s_prev }
}

pub fn eval_p(spec: &RecurrenceSpec, n: usize, x: f64) -> f64 {
    evaluate(spec, n, x).p
}

pub fn eval_p_star(spec: &RecurrenceSpec, n: usize, x: f64) -> f64 {
    evaluate(spec, n, x).p_star
}

/// `P'_n(x)` through the differentiated recurrence.
pub fn eval_p_deriv(spec: &RecurrenceSpec, n: usize, x: f64) -> f64 {
    let mut d_prev = 0.0;
    let mut d = 0.0;
    let mut p_prev = 0.0;
    let mut p = 1.0;
    for k in 0..n {
        let f = 2.0 * x - spec.alpha_at(k);
        let d_next = 2.0 * p + f * d - d_prev;
        let p_next = f * p - p_prev;
        d_prev = d;
        d = d_next;
        p_prev = p;
        p = p_next;
    }
    d
}

pub fn eval_p_star_deriv(spec: &RecurrenceSpec, n: usize, x: f64) -> f64 {
    evaluate(spec, n, crate::scalar::Jet::variable(x)).p_star.d1
}

/// `g_N(x)` evaluated by forward recurrence.
pub fn discriminant_value<T: Scalar>(spec: &RecurrenceSpec, x: T) -> T {
    let v = evaluate(spec, spec.period(), x);
    (v.p - v.p_star_prev * T::from(0.5)) * T::from(0.5)
}

/// `P_n(x; a)` versus `(-1)^n P_n(-x; -a)`; true within 1e-12 relative.
pub fn symmetry_check(spec: &RecurrenceSpec, n: usize, x: f64) -> bool {
    let lhs = eval_p(&spec.mirrored(), n, x);
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let rhs = sign * eval_p(spec, n, -x);
    (lhs - rhs).abs() <= 1e-12 * lhs.abs().max(rhs.abs()).max(1.0)
}

/// The discriminant `g_N` as a polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct Discriminant {
    pub exact: Poly<BigRational>,
    pub g: Poly<f64>,
    pub g_prime: Poly<f64>,
}

impl Discriminant {
    pub fn eval(&self, x: f64) -> f64 {
        self.g.eval(&x)
    }
}

/// Builds `g_N = (P_N − P*_{N−1}/2)/2` exactly and confirms that
/// `P_{2N−1} / (2 P_{N−1})` divides without remainder to the same result.
pub fn discriminant(spec: &RecurrenceSpec) -> Result<Discriminant> {
    let n = spec.period();
    let polys = build_polys_exact(spec, 2 * n - 1);
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let g = (&polys[n].0 - &polys[n - 1].1.scale(&half)).scale(&half);

    let denom = polys[n - 1].0.scale(&BigRational::from_integer(BigInt::from(2)));
    let (quot, rem) = polys[2 * n - 1].0.div_rem(&denom);
    if !rem.is_zero() {
        return Err(Error::Internal(format!("P_{{2N-1}} / 2P_{{N-1}} leaves remainder {:?}", rem)));
    }
    if quot != g {
        return Err(Error::Internal("two expressions for g_N disagree".into()));
    }
    let gf = g.to_f64();
    let g_prime = gf.derivative();
    Ok(Discriminant { exact: g, g: gf, g_prime })
}

/// Half the trace of the product of the N one-step transfer matrices
/// `[[2x − α_n, −1], [1, 0]]`.
pub fn transfer_trace(spec: &RecurrenceSpec, x: f64) -> f64 {
    let mut m = [[1.0, 0.0], [0.0, 1.0]];
    for n in 0..spec.period() {
        let f = 2.0 * x - spec.alpha_at(n);
        // step * m with step = [[f, -1], [1, 0]]
        m = [
            [f * m[0][0] - m[1][0], f * m[0][1] - m[1][1]],
            [m[0][0], m[0][1]],
        ];
    }
    0.5 * (m[0][0] + m[1][1])
}

/// Chebyshev `U_j(t)` for `j ≥ -2`, with `U_{-1} = 0` and `U_{-2} = -1`.
pub fn chebyshev_u<T: Scalar>(j: i64, t: T) -> T {
    assert!(j >= -2, "U_j is defined here for j >= -2");
    if j == -2 {
        return T::from(-1.0);
    }
    let mut prev = T::from(0.0);
    let mut cur = T::from(1.0);
    if j == -1 {
        return prev;
    }
    for _ in 0..j {
        let next = (t + t) * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Both sides of a shift identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// A-priori estimate of the floating-point error in `lhs − rhs`: the
    /// forward recurrence over `k + jN` steps plus the error in `g_N`
    /// propagated through `U_{j−1}` and `U_{j−2}`.
    pub rounding: f64,
}

impl ShiftCheck {
    /// Mixed tolerance `max(1e-10, 1e-13·|lhs|)`.
    pub fn tolerance(&self) -> f64 {
        (1e-13 * self.lhs.abs()).max(1e-10)
    }

    /// The mixed tolerance, widened to a multiple of the rounding estimate
    /// where that is larger (long periods, points near band edges).
    pub fn conditioned_tolerance(&self) -> f64 {
        self.tolerance().max(32.0 * self.rounding)
    }

    pub fn holds(&self) -> bool {
        (self.lhs - self.rhs).abs() <= self.tolerance()
    }
}

fn shift_check(spec: &RecurrenceSpec, k: usize, j: usize, x: f64, star: bool) -> ShiftCheck {
    assert!(j >= 1, "j must be at least 1");
    let n = spec.period();
    let pick = |m: usize| {
        let v = evaluate(spec, m, x);
        if star {
            v.p_star
        } else {
            v.p
        }
    };
    let g = discriminant_value(spec, crate::scalar::Jet::variable(x));
    let gj = crate::scalar::Jet::variable(g.value);
    let u1 = chebyshev_u(j as i64 - 1, gj);
    let u2 = chebyshev_u(j as i64 - 2, gj);
    let (lhs, near, far) = (pick(k + j * n), pick(k + n), pick(k));
    let (t1, t2) = (near * u1.value, far * u2.value);
    let eps = f64::EPSILON;
    let dg = 64.0 * eps * x.abs().max(1.0) * g.d1.abs() + eps * g.value.abs();
    let rounding = eps * (k + j * n) as f64 * (lhs.abs() + t1.abs() + t2.abs())
        + dg * (near.abs() * u1.d1.abs() + far.abs() * u2.d1.abs());
    ShiftCheck { lhs, rhs: t1 - t2, rounding }
}

/// `P_{k+jN}` against `P_{k+N} U_{j−1}(g_N) − P_k U_{j−2}(g_N)`.
pub fn chebyshev_shift(spec: &RecurrenceSpec, k: usize, j: usize, x: f64) -> ShiftCheck {
    shift_check(spec, k, j, x, false)
}

/// Numerator analogue: `P*_{k+jN}` against `P*_{k+N} U_{j−1} − P*_k U_{j−2}`.
pub fn chebyshev_shift_star(spec: &RecurrenceSpec, k: usize, j: usize, x: f64) -> ShiftCheck {
    shift_check(spec, k, j, x, true)
}

pub fn chebyshev_shift_check(spec: &RecurrenceSpec, k: usize, j: usize, x: f64) -> bool {
    chebyshev_shift(spec, k, j, x).holds()
}

pub fn chebyshev_shift_star_check(spec: &RecurrenceSpec, k: usize, j: usize, x: f64) -> bool {
    chebyshev_shift_star(spec, k, j, x).holds()
}

/// `θ`, `ρ`, `φ` such that `P_{k+jN}/P_k = ρ sin(jθ + φ) / sin θ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioAsymptotics {
    pub theta: f64,
    pub rho: f64,
    pub phase: f64,
}

impl RatioAsymptotics {
    pub fn predict(&self, j: usize) -> f64 {
        self.rho * (j as f64 * self.theta + self.phase).sin() / self.theta.sin()
    }

    /// Amplitude `ρ / sin θ` of the predicted ratio.
    pub fn amplitude(&self) -> f64 {
        self.rho / self.theta.sin()
    }
}

pub fn ratio_asymptotics(spec: &RecurrenceSpec, k: usize, x: f64) -> Result<RatioAsymptotics> {
    let g = discriminant_value(spec, x);
    if !(g.abs() < 1.0) {
        return Err(Error::OutsideBands { x });
    }
    let pk = eval_p(spec, k, x);
    if pk == 0.0 {
        return Err(Error::InvalidArgument(format!("P_{}({}) vanishes, ratio undefined", k, x)));
    }
    let theta = g.acos();
    let c = eval_p(spec, k + spec.period(), x) / pk - theta.cos();
    let s = theta.sin();
    let rho = c.hypot(s);
    let phase = s.atan2(c).rem_euclid(2.0 * std::f64::consts::PI);
    Ok(RatioAsymptotics { theta, rho, phase })
}

/// `P_m(x) / P_k(x)` with the pair renormalized as it grows, so that large
/// `m` does not overflow.
pub fn scaled_ratio(spec: &RecurrenceSpec, k: usize, m: usize, x: f64) -> f64 {
    let mut p_prev = 0.0f64;
    let mut p = 1.0f64;
    let mut log_scale = 0.0f64;
    let mut at_k = (1.0, 0.0);
    let mut at_m = (1.0, 0.0);
    for n in 0..k.max(m) {
        let f = 2.0 * x - spec.alpha_at(n);
        let next = f * p - p_prev;
        p_prev = p;
        p = next;
        let big = p.abs().max(p_prev.abs());
        if big > 1e100 {
            p /= big;
            p_prev /= big;
            log_scale += big.ln();
        }
        if n + 1 == k {
            at_k = (p, log_scale);
        }
        if n + 1 == m {
            at_m = (p, log_scale);
        }
    }
    at_m.0 / at_k.0 * (at_m.1 - at_k.1).exp()
}

/// `P_N = P*_{N+1}/2` and the Wronskian are exact polynomial identities;
/// this helper returns the Wronskian `P_{n+1}P*_n − P_n P*_{n+1}` exactly.
pub fn wronskian_exact(
    polys: &[(Poly<BigRational>, Poly<BigRational>)],
    n: usize,
) -> Poly<BigRational> {
    let (p, s) = &polys[n];
    let (p1, s1) = &polys[n + 1];
    &(p1 * s) - &(p * s1)
}
