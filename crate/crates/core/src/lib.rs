//! Numerical kernels for Dirichlet L-functions, their critical-line zeros,
//! pair-correlation statistics of those zeros, and prime sums in arithmetic
//! progressions.

pub mod arith;
pub mod characters;
pub mod checks;
pub mod conjectures;
pub mod cyclotomic;
pub mod explicit;
pub mod lfunc;
pub mod paircorr;
pub mod quad;
pub mod report;
pub mod sieve;
pub mod special;
pub mod store;
pub mod zeros;
