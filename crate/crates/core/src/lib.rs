//! Inverses of quadratic permutation polynomials over `Z_N`.
//!
//! * [`modmath`]: factorization, linear congruences, Catalan numbers.
//! * [`polyring`]: constant-free polynomials mod `N` and zero polynomials.
//! * [`inversion`]: the degree criterion, the `D`/`U`/`e` system and
//!   enumeration of all least-degree inverses.
//! * [`oracle`]: brute-force checks used to validate everything above.
//! * [`lte`]: the LTE interleaver table fixture and block permutation.

pub mod exec;
pub mod inversion;
pub mod lte;
pub mod matrix;
pub mod modmath;
pub mod oracle;
pub mod polyring;

pub use exec::Execution;
pub use inversion::{invert_qpp, InverseSolution, InversionError, Qpp, QppViolation};
pub use modmath::Modulus;
pub use polyring::PolyModN;
