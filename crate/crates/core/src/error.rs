use thiserror::Error;

use crate::quotient_ring::GuardWitness;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid ring parameters: {0}")]
    InvalidParameters(String),
    #[error("invalid modulus polynomial: {0}")]
    InvalidModulus(String),
    #[error("modulus polynomial is reducible modulo {p}")]
    ReducibleModulus { p: u64 },
    #[error("operand does not belong to this context: {0}")]
    ContextMismatch(String),
    #[error("element is not a unit")]
    NotUnit,
    #[error("unit is not of Type (1)")]
    NotType1,
    #[error("unit is not of Type (0)")]
    NotType0,
    #[error("element is not a nonzero Teichmüller representative")]
    NotTeichmuller,
    #[error("lambda is a square; the chain-ring construction requires a non-square Type (1) unit")]
    SquareLambda,
    #[error("Type (1) chain construction needs a >= 2 (got a = {0})")]
    CharacteristicTooSmall(u32),
    #[error("locality guard failed: {0}")]
    GuardFailure(GuardWitness),
    #[error("operation needs a chain-mode quotient context")]
    NotChainMode,
    #[error("element is not invertible in the quotient ring")]
    NotInvertible,
    #[error("exponent {i} out of range 0..={max}")]
    ExponentOutOfRange { i: usize, max: usize },
    #[error("code has {size} codewords, over the enumeration budget of {budget}")]
    BudgetExceeded { size: String, budget: u64 },
    #[error("units disagree on the Teichmüller digit xi_0")]
    Xi0Mismatch,
    #[error("operation needs an odd prime p")]
    EvenCharacteristic,
    #[error("delta squared does not equal lambda")]
    NotSquareRoot,
    #[error("lemma check failed: {0}")]
    LemmaViolation(String),
}
