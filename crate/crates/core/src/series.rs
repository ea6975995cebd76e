//! Power series in `t` truncated at a fixed order, with polynomial
//! coefficients in `x`.

use std::ops::{Add, Mul, Sub};

use crate::poly::{Coeff, Poly};

/// `Σ_{k ≤ order} c_k(x) t^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries<T: Coeff> {
    coeffs: Vec<Poly<T>>,
    order: usize,
}

impl<T: Coeff> TruncatedSeries<T> {
    /// Coefficients beyond `order` are dropped; missing ones are zero.
    pub fn new(mut coeffs: Vec<Poly<T>>, order: usize) -> Self {
        coeffs.resize(order + 1, Poly::zero());
        TruncatedSeries { coeffs, order }
    }

    pub fn zero(order: usize) -> Self {
        Self::new(Vec::new(), order)
    }

    /// `c · t^k` as a series.
    pub fn term(c: Poly<T>, k: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[Poly<T>] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &Poly<T> {
        &self.coeffs[k]
    }

    /// Multiplies by `t^k`.
    pub fn shift(&self, k: usize) -> Self {
        let mut out = Self::zero(self.order);
        for i in 0..=self.order {
            if i + k > self.order {
                break;
            }
            out.coeffs[i + k] = self.coeffs[i].clone();
        }
        out
    }

    /// Multiplies every coefficient by the polynomial `p`.
    pub fn scale(&self, p: &Poly<T>) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * p).collect(), self.order)
    }

    /// Indices of nonzero coefficients.
    pub fn support(&self) -> Vec<usize> {
        (0..=self.order).filter(|&k| !self.coeffs[k].is_zero()).collect()
    }
}

impl<T: Coeff> Add for &TruncatedSeries<T> {
    type Output = TruncatedSeries<T>;
    fn add(self, o: &TruncatedSeries<T>) -> TruncatedSeries<T> {
        let order = self.order.min(o.order);
        TruncatedSeries::new((0..=order).map(|k| &self.coeffs[k] + &o.coeffs[k]).collect(), order)
    }
}

impl<T: Coeff> Sub for &TruncatedSeries<T> {
    type Output = TruncatedSeries<T>;
    fn sub(self, o: &TruncatedSeries<T>) -> TruncatedSeries<T> {
        let order = self.order.min(o.order);
        TruncatedSeries::new((0..=order).map(|k| &self.coeffs[k] - &o.coeffs[k]).collect(), order)
    }
}

impl<T: Coeff> Mul for &TruncatedSeries<T> {
    type Output = TruncatedSeries<T>;
    fn mul(self, o: &TruncatedSeries<T>) -> TruncatedSeries<T> {
        let order = self.order.min(o.order);
        let mut out = vec![Poly::zero(); order + 1];
        for i in 0..=order {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=order - i {
                if o.coeffs[j].is_zero() {
                    continue;
                }
                out[i + j] = &out[i + j] + &(&self.coeffs[i] * &o.coeffs[j]);
            }
        }
        TruncatedSeries::new(out, order)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: i64) -> Poly<i64> {
        Poly::constant(v)
    }

    #[test]
    fn geometric_series_times_one_minus_t() {
        let order = 6;
        let geo = TruncatedSeries::new((0..=order).map(|_| c(1)).collect(), order);
        let one_minus_t = TruncatedSeries::new(vec![c(1), c(-1)], order);
        let prod = &geo * &one_minus_t;
        assert_eq!(prod.support(), vec![0]);
        assert_eq!(prod.coeff(0), &c(1));
    }

    #[test]
    fn truncation_is_consistent() {
        let s = TruncatedSeries::new(vec![c(1), c(2), c(3), c(4)], 2);
        assert_eq!(s.coeffs().len(), 3);
        let sq = &s * &s;
        // (1 + 2t + 3t²)² = 1 + 4t + 10t² + …
        assert_eq!(sq.coeffs(), &[c(1), c(4), c(10)]);
        assert_eq!(s.shift(2).coeffs(), &[c(0), c(0), c(1)]);
        let x = Poly::linear(0, 1);
        assert_eq!(s.scale(&x).coeff(1), &Poly::linear(0, 2));
        assert_eq!((&s - &s).support(), Vec::<usize>::new());
        assert_eq!(TruncatedSeries::term(c(5), 1, 2).support(), vec![1]);
    }
}
