//! Number types the forward recurrence can run on.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

pub trait Scalar:
    Copy
    + Debug
    + From<f64>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Magnitude used for rescaling and tolerance checks.
    fn magnitude(&self) -> f64;
}

impl Scalar for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Second-order forward-mode jet: value with first and second derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    /// The independent variable at `x`.
    pub fn variable(x: f64) -> Self {
        Jet { value: x, d1: 1.0, d2: 0.0 }
    }
}

impl From<f64> for Jet {
    fn from(c: f64) -> Self {
        Jet { value: c, d1: 0.0, d2: 0.0 }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet { value: self.value + o.value, d1: self.d1 + o.d1, d2: self.d2 + o.d2 }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        Jet { value: self.value - o.value, d1: self.d1 - o.d1, d2: self.d2 - o.d2 }
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        Jet {
            value: self.value * o.value,
            d1: self.d1 * o.value + self.value * o.d1,
            d2: self.d2 * o.value + 2.0 * self.d1 * o.d1 + self.value * o.d2,
        }
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, o: Jet) -> Jet {
        let inv = 1.0 / o.value;
        let r1 = -o.d1 * inv * inv;
        let r2 = (2.0 * o.d1 * o.d1 * inv - o.d2) * inv * inv;
        self * Jet { value: inv, d1: r1, d2: r2 }
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet { value: -self.value, d1: -self.d1, d2: -self.d2 }
    }
}

impl Scalar for Jet {
    fn magnitude(&self) -> f64 {
        self.value.abs()
    }
}
