//! Rational values of the recurrence coefficients.
//!
//! `2cos(2πj/N)` is an integer for N ∈ {1, 2, 3, 4, 6}. For every other
//! period the cosine is irrational and we substitute a rational
//! approximation accurate to well below 1e-30; evenness in `j` is kept
//! exactly so that every algebraic identity of the recurrence still holds
//! with zero residual.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Periods whose cosines are all rational.
pub const EXACT_PERIODS: [usize; 5] = [1, 2, 3, 4, 6];

// 100 digits of π after the decimal point.
const PI_DIGITS: &str = "31415926535897932384626433832795028841971693993751058209749445923078164062862089986280348253421170679";

const WORK_DIGITS: u32 = 80;
const KEEP_DIGITS: u32 = 45;

pub fn is_exact_period(n: usize) -> bool {
    EXACT_PERIODS.contains(&n)
}

/// `2cos(2πj/n)` when it is an integer.
pub fn two_cos_integer(j: usize, n: usize) -> Option<i64> {
    if !is_exact_period(n) {
        return None;
    }
    // For these periods 2cos takes values in {±2, ±1, 0}.
    let r = j % n;
    let v = 2.0 * (2.0 * std::f64::consts::PI * r as f64 / n as f64).cos();
    Some(v.round() as i64)
}

/// Rational value of `2cos(2πj/n)`: exact for the periods in
/// [`EXACT_PERIODS`], otherwise rounded to 45 decimal digits.
pub fn two_cos_rational(j: usize, n: usize) -> BigRational {
    if let Some(v) = two_cos_integer(j, n) {
        return BigRational::from_integer(BigInt::from(v));
    }
    let r = j % n;
    // Fold onto [0, π] so that j and n - j give identical rationals.
    let r = r.min(n - r);
    let scale = BigInt::from(10u32).pow(WORK_DIGITS);
    let pi = pi_fixed(WORK_DIGITS);
    let theta = (pi * BigInt::from(2 * r)).div_floor(&BigInt::from(n));
    let c = cos_fixed(&theta, &scale);
    let keep = BigInt::from(10u32).pow(KEEP_DIGITS);
    let drop = BigInt::from(10u32).pow(WORK_DIGITS - KEEP_DIGITS);
    // Round half away from zero to KEEP_DIGITS.
    let twice = c * BigInt::from(2);
    let (q, rem) = twice.div_rem(&drop);
    let half = drop.clone() / BigInt::from(2);
    let rounded = if rem.abs() >= half {
        q + rem.signum()
    } else {
        q
    };
    BigRational::new(rounded, keep)
}

/// π scaled by `10^digits`, truncated.
fn pi_fixed(digits: u32) -> BigInt {
    let take = (digits as usize + 1).min(PI_DIGITS.len());
    let mut v: BigInt = PI_DIGITS[..take].parse().expect("static digits");
    for _ in take..=digits as usize {
        v *= 10;
    }
    v
}

/// Taylor series of cos in fixed point: both `theta` and the result are
/// scaled by `scale`. Accurate for |theta| ≤ 2π.
fn cos_fixed(theta: &BigInt, scale: &BigInt) -> BigInt {
    let theta2 = (theta * theta) / scale;
    let mut term = scale.clone();
    let mut sum = scale.clone();
    let mut k: u64 = 0;
    loop {
        k += 1;
        term = -(term * &theta2) / scale;
        term /= BigInt::from((2 * k - 1) * (2 * k));
        if term.is_zero() {
            break;
        }
        sum += &term;
    }
    sum
}

/// Parses a decimal literal (`-0.9`, `1.25e-3`, `7/8`) into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all = format!("{}{}", int_part, frac_part);
    let mut num: BigInt = if all.is_empty() { BigInt::zero() } else { all.parse().ok()? };
    if neg {
        num = -num;
    }
    let exp10 = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    Some(if exp10 >= 0 {
        BigRational::from_integer(num * ten.pow(exp10 as u32))
    } else {
        BigRational::new(num, ten.pow((-exp10) as u32))
    })
}

/// Exact rational value of a finite double.
pub fn rational_from_f64(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}
