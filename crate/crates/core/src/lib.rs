//! Exact and p-adic evaluation of `f(n) = Σ_k C(n,k)^{-1}`, congruence
//! verifiers, prime scanners and a p-definability analyzer.

pub mod binomial;
pub mod cli;
pub mod definability;
pub mod error;
pub mod fsum;
pub mod modarith;
pub mod padic;
pub mod primes;
pub mod scan;
pub mod verify;

pub use error::{Error, Result};
pub use padic::{PadicIntegerSpec, PadicValue, Rational};
