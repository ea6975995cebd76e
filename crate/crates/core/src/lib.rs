//! Orthogonal polynomials generated by a three-term recurrence whose
//! diagonal coefficients `α_j = 2a cos(2πj/N)` repeat with period `N`.
//!
//! The crate covers the whole analytic chain: polynomial construction in
//! exact and floating arithmetic ([`recurrence`]), zeros and band edges
//! ([`bands`]), the orthogonality measure ([`measure`]), the Stieltjes
//! transform and the spectral densities of the two-sided Jacobi operator
//! ([`spectral`]), and exact series checks of the generating function
//! ([`verify`]).

pub mod bands;
pub mod error;
pub mod exact;
pub mod measure;
pub mod poly;
pub mod quadrature;
pub mod recurrence;
pub mod scalar;
pub mod series;
pub mod spectral;
pub mod suite;
pub mod tridiag;
pub mod verify;

pub use error::{Error, Result};
pub use poly::Poly;
pub use recurrence::RecurrenceSpec;
