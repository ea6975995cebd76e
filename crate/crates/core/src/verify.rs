//! Exact checks of the generating function `P(t) = Σ P_n(x) tⁿ` and the
//! identities around it.
//!
//! With `D(t) = t^{2N} − 2g_N tᴺ + 1` the generating function is
//! `P(t) = F(t) / D(t)` where `F` has degree `2N − 2` and coefficients
//!
//! ```text
//! F_k = P_k                  0 ≤ k ≤ N − 1
//! F_k = P_k − 2g_N P_{k−N}   N ≤ k ≤ 2N − 2
//! ```
//!
//! `D(t)` is the determinant of the N×N system obtained by substituting
//! `t → t qʲ` into `Q(t)P(t) + a t [P(tq) + P(t/q)] = 1`, `q = e^{2πi/N}`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::recurrence::{self, build_polys_exact, RecurrenceSpec};
use crate::series::TruncatedSeries;

type Q = BigRational;

fn int(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

/// Outcome of an exact coefficientwise comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityReport {
    pub holds: bool,
    /// First coefficient index (power of `t`, or polynomial index) that
    /// failed.
    pub first_failure: Option<usize>,
}

impl IdentityReport {
    fn from_first_failure(first_failure: Option<usize>) -> Self {
        IdentityReport { holds: first_failure.is_none(), first_failure }
    }
}

/// `P_0 + P_1 t + … + P_order t^order` in exact arithmetic.
pub fn generating_series(spec: &RecurrenceSpec, order: usize) -> TruncatedSeries<Q> {
    let polys = build_polys_exact(spec, order);
    TruncatedSeries::new(polys.into_iter().map(|(p, _)| p).collect(), order)
}

/// `t^{2N} − 2 g_N tᴺ + 1`.
pub fn denominator(spec: &RecurrenceSpec, order: usize) -> Result<TruncatedSeries<Q>> {
    let n = spec.period();
    let g = recurrence::discriminant(spec)?.exact;
    let mut d = TruncatedSeries::term(Poly::constant(Q::one()), 0, order);
    d = &d + &TruncatedSeries::term(g.scale(&int(-2)), n, order);
    d = &d + &TruncatedSeries::term(Poly::constant(Q::one()), 2 * n, order);
    Ok(d)
}

/// `F_k` from the two-branch formula, `k ≤ 2N − 2`.
pub fn numerator_formula(spec: &RecurrenceSpec) -> Result<Vec<Poly<Q>>> {
    let n = spec.period();
    let g = recurrence::discriminant(spec)?.exact;
    let polys = build_polys_exact(spec, 2 * n);
    Ok((0..=(2 * n).saturating_sub(2))
        .map(|k| {
            if k < n {
                polys[k].0.clone()
            } else {
                &polys[k].0 - &(&g * &polys[k - n].0).scale(&int(2))
            }
        })
        .collect())
}

/// `D(t)·P(t)` truncated at `order`.
fn numerator_series(spec: &RecurrenceSpec, order: usize) -> Result<TruncatedSeries<Q>> {
    Ok(&denominator(spec, order)? * &generating_series(spec, order))
}

/// `D(t) P(t) = F(t)` coefficientwise through `t^order`.
///
/// Coefficients `2N − 1 … order` of `D·P` must vanish, lower ones must equal
/// `Σ_{k≤2N−2} P_k t^k − 2g_N Σ_{k≤N−2} P_k t^{k+N}`.
pub fn genfun_identity(spec: &RecurrenceSpec, order: usize) -> Result<IdentityReport> {
    let n = spec.period();
    if order < 2 * n {
        return Err(Error::InvalidArgument(format!("order {} is below 2N = {}", order, 2 * n)));
    }
    let lhs = numerator_series(spec, order)?;
    let polys = build_polys_exact(spec, order);
    let g = recurrence::discriminant(spec)?.exact;
    let mut rhs = TruncatedSeries::new(polys[..=2 * n - 2].iter().map(|(p, _)| p.clone()).collect(), order);
    if n >= 2 {
        let low = TruncatedSeries::new(polys[..=n - 2].iter().map(|(p, _)| p.clone()).collect(), order);
        rhs = &rhs - &low.scale(&g.scale(&int(2))).shift(n);
    }
    let diff = &lhs - &rhs;
    Ok(IdentityReport::from_first_failure(diff.support().first().copied()))
}

/// Numerator coefficients extracted from `D·P` agree with the two-branch
/// formula for `F_k`.
pub fn numerator_agreement(spec: &RecurrenceSpec) -> Result<IdentityReport> {
    let n = spec.period();
    let order = 2 * n;
    let lhs = numerator_series(spec, order)?;
    let formula = numerator_formula(spec)?;
    let first = (0..=order).find(|&k| {
        let want = formula.get(k).cloned().unwrap_or_else(Poly::zero);
        lhs.coeff(k) != &want
    });
    Ok(IdentityReport::from_first_failure(first))
}

/// `P_k − 2g_N P_{k−N} + P_{k−2N} = 0` for `2N − 1 ≤ k ≤ k_max`, with
/// `P_{−1} = 0`.
pub fn tail_recursion_check(spec: &RecurrenceSpec, k_max: usize) -> Result<IdentityReport> {
    let n = spec.period();
    if k_max + 1 < 2 * n {
        return Err(Error::InvalidArgument(format!("k_max {} is below 2N − 1", k_max)));
    }
    let g = recurrence::discriminant(spec)?.exact;
    let polys = build_polys_exact(spec, k_max);
    let first = (2 * n - 1..=k_max).find(|&k| {
        let back2 = if k >= 2 * n { polys[k - 2 * n].0.clone() } else { Poly::zero() };
        let r = &(&polys[k].0 - &(&g * &polys[k - n].0).scale(&int(2))) + &back2;
        !r.is_zero()
    });
    Ok(IdentityReport::from_first_failure(first))
}

/// `P_{n+1}P*_n − P_n P*_{n+1} = −2` for all `n ≤ n_max`.
pub fn wronskian_check(spec: &RecurrenceSpec, n_max: usize) -> IdentityReport {
    let polys = build_polys_exact(spec, n_max + 1);
    let target = Poly::constant(int(-2));
    let first = (0..=n_max).find(|&n| recurrence::wronskian_exact(&polys, n) != target);
    IdentityReport::from_first_failure(first)
}

/// `P_N = P*_{N+1} / 2` exactly.
pub fn shift_identity(spec: &RecurrenceSpec) -> bool {
    let n = spec.period();
    let polys = build_polys_exact(spec, n + 1);
    polys[n].0 == polys[n + 1].1.scale(&Q::new(BigInt::one(), BigInt::from(2)))
}

/// `2 g_N P_{N−1} = P_{2N−1}` exactly.
pub fn discriminant_product(spec: &RecurrenceSpec) -> Result<bool> {
    let n = spec.period();
    let g = recurrence::discriminant(spec)?.exact;
    let polys = build_polys_exact(spec, 2 * n - 1);
    Ok((&g * &polys[n - 1].0).scale(&int(2)) == polys[2 * n - 1].0)
}

/// `8 P_N P*_{N−1} = 8 P_{N−1} P*_N − 16` exactly; this is the reduction
/// behind the simplified resolvent forms.
pub fn resolvent_reduction(spec: &RecurrenceSpec) -> bool {
    let n = spec.period();
    let polys = build_polys_exact(spec, n);
    let lhs = (&polys[n].0 * &polys[n - 1].1).scale(&int(8));
    let rhs = &(&polys[n - 1].0 * &polys[n].1).scale(&int(8)) - &Poly::constant(int(16));
    lhs == rhs
}

/// Largest relative coefficient residual of
/// `Q(t)P(t) + a t [P(tq) + P(t/q)] − 1` through `t^order` at the point `x`.
pub fn functional_equation(spec: &RecurrenceSpec, order: usize, x: f64) -> Result<f64> {
    if order < 4 {
        return Err(Error::InvalidArgument("functional equation needs order ≥ 4".into()));
    }
    let n = spec.period();
    let a = spec.a();
    let q = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / n as f64);
    let p = crate::measure::poly_values(spec, order, x);
    let mut worst = 0.0f64;
    for k in 0..=order {
        // Coefficient of t^k in each term.
        let mut terms: Vec<Complex64> = Vec::with_capacity(5);
        terms.push(Complex64::new(p[k], 0.0));
        if k >= 1 {
            terms.push(Complex64::new(-2.0 * x * p[k - 1], 0.0));
            let j = (k - 1) as i32;
            terms.push(q.powi(j) * (a * p[k - 1]));
            terms.push(q.powi(-j) * (a * p[k - 1]));
        }
        if k >= 2 {
            terms.push(Complex64::new(p[k - 2], 0.0));
        }
        let target = if k == 0 { 1.0 } else { 0.0 };
        let sum: Complex64 = terms.iter().sum::<Complex64>() - target;
        let scale = terms.iter().map(|t| t.norm()).fold(1.0, f64::max);
        worst = worst.max(sum.norm() / scale);
    }
    Ok(worst)
}

/// Sparse polynomial in `t`, `x` and `q` (with `q^N = 1`), keyed by
/// `(deg_t, deg_x, exp_q)`.
type Tri = BTreeMap<(usize, usize, usize), Q>;

fn tri_add_term(m: &mut Tri, key: (usize, usize, usize), c: Q) {
    if c.is_zero() {
        return;
    }
    let e = m.entry(key).or_insert_with(Q::zero);
    *e += c;
    if e.is_zero() {
        m.remove(&key);
    }
}

fn tri_mul(u: &Tri, v: &Tri, n: usize) -> Tri {
    let mut out = Tri::new();
    for (&(t1, x1, q1), c1) in u {
        for (&(t2, x2, q2), c2) in v {
            tri_add_term(&mut out, (t1 + t2, x1 + x2, (q1 + q2) % n), c1 * c2);
        }
    }
    out
}

fn cyclotomic(n: usize) -> Result<Poly<Q>> {
    let c = |v: &[i64]| Poly::new(v.iter().map(|&k| int(k)).collect());
    match n {
        1 => Ok(c(&[-1, 1])),
        2 => Ok(c(&[1, 1])),
        3 => Ok(c(&[1, 1, 1])),
        4 => Ok(c(&[1, 0, 1])),
        _ => Err(Error::InvalidArgument("determinant check is limited to N ≤ 4".into())),
    }
}

fn permutations(n: usize) -> Vec<(Vec<usize>, bool)> {
    // Heap's algorithm; the flag is the parity (true = even).
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    let mut c = vec![0; n];
    let mut even = true;
    out.push((p.clone(), even));
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                p.swap(0, i);
            } else {
                p.swap(c[i], i);
            }
            even = !even;
            out.push((p.clone(), even));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// Coefficients of `det M(t)` as polynomials in `x`, indexed by the power
/// of `t`, after reducing `q` modulo the cyclotomic polynomial. Each entry
/// must be free of `q` once reduced.
pub fn det_m(spec: &RecurrenceSpec) -> Result<Vec<Poly<Q>>> {
    let n = spec.period();
    let phi = cyclotomic(n)?;
    let a = spec.a_exact().clone();
    let mut m = vec![vec![Tri::new(); n]; n];
    for (j, row) in m.iter_mut().enumerate() {
        // Q(t qʲ) = t² q^{2j} − 2x t qʲ + 1
        tri_add_term(&mut row[j], (2, 0, (2 * j) % n), Q::one());
        tri_add_term(&mut row[j], (1, 1, j % n), int(-2));
        tri_add_term(&mut row[j], (0, 0, 0), Q::one());
        // a t qʲ [P(t q^{j+1}) + P(t q^{j−1})]
        tri_add_term(&mut row[(j + 1) % n], (1, 0, j % n), a.clone());
        tri_add_term(&mut row[(j + n - 1) % n], (1, 0, j % n), a.clone());
    }
    let mut det = Tri::new();
    for (perm, even) in permutations(n) {
        let mut term = Tri::new();
        tri_add_term(&mut term, (0, 0, 0), if even { Q::one() } else { int(-1) });
        for (i, &j) in perm.iter().enumerate() {
            term = tri_mul(&term, &m[i][j], n);
            if term.is_empty() {
                break;
            }
        }
        for (k, c) in term {
            tri_add_term(&mut det, k, c);
        }
    }

    // Group by (t, x) and reduce the q-polynomial.
    let mut grouped: BTreeMap<(usize, usize), Vec<Q>> = BTreeMap::new();
    for ((t, x, e), c) in det {
        let v = grouped.entry((t, x)).or_insert_with(|| vec![Q::zero(); n]);
        v[e] += c;
    }
    let t_max = grouped.keys().map(|k| k.0).max().unwrap_or(0);
    let mut out: Vec<Vec<Q>> = vec![Vec::new(); t_max + 1];
    for ((t, x), qc) in grouped {
        let (_, r) = Poly::new(qc).div_rem(&phi);
        if r.degree().unwrap_or(0) > 0 {
            return Err(Error::Internal(format!("det M coefficient of t^{} x^{} depends on q", t, x)));
        }
        let v = &mut out[t];
        if v.len() <= x {
            v.resize(x + 1, Q::zero());
        }
        v[x] = r.coeff(0);
    }
    Ok(out.into_iter().map(Poly::new).collect())
}

/// `det M(t) = t^{2N} − 2 g_N tᴺ + 1`.
pub fn det_identity(spec: &RecurrenceSpec) -> Result<IdentityReport> {
    let n = spec.period();
    let got = det_m(spec)?;
    let want = denominator(spec, 2 * n)?;
    let first = (0..=(2 * n).max(got.len().saturating_sub(1))).find(|&k| {
        let g = got.get(k).cloned().unwrap_or_else(Poly::zero);
        let w = if k <= 2 * n { want.coeff(k).clone() } else { Poly::zero() };
        g != w
    });
    Ok(IdentityReport::from_first_failure(first))
}
