//! Prime elements, prime ideals and gap constructions in imaginary quadratic fields.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod class_numbers;
pub mod error;
pub mod field;
pub mod growth;
pub mod ideal;
pub mod ideals;
pub mod int;
pub mod covering;
pub mod norm_sieve;
pub mod numeric;
pub mod primes;
pub mod randsel;
pub mod smooth;
pub mod weights;

pub use error::Error;
pub use field::{Basis, FieldDesc, QuadInt};
pub use ideal::IdealRec;
pub use ideals::{PrimeIdealRec, PrimeKey, SplitKind};
pub use int::Int;
