//! Type (1) constacyclic codes of length `4p^s` over Galois rings.

pub mod codes;
pub mod distances;
pub mod error;
pub mod galois_ring;
mod poly;
pub mod quotient_ring;

pub use error::{Error, Result};
pub use galois_ring::{GaloisRing, GrElement, TeichDigits, UnitKind, UnitProfile};
pub use quotient_ring::{DigitExpansion, ExpansionWitness, GuardWitness, Mode, QrElement, QuotientCtx};
