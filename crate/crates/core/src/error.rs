use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("valuation undefined for exact zero")]
    ExactZero,

    #[error("precision exhausted")]
    PrecisionExhausted,

    #[error("division by zero")]
    DivisionByZero,

    #[error("p-adic operands have different primes ({0} and {1})")]
    PrimeMismatch(u64, u64),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("not a p-adic integer")]
    NotPadicInteger,

    #[error("sparse form requires p=2")]
    SparseRequiresTwo,

    #[error("invalid p-adic integer description: {0}")]
    InvalidSpec(String),

    #[error("binomial domain error: k={k} exceeds n={n}")]
    BinomialDomain { n: u64, k: u64 },

    #[error("n={n} exceeds the exact-mode cap {cap}; use modular engine")]
    ExactCapExceeded { n: u64, cap: u64 },

    #[error("n={n} exceeds the modular engine cap {cap}")]
    ModularCapExceeded { n: u64, cap: u64 },

    #[error("range end {hi} exceeds the scan ceiling {ceiling}")]
    ScanCeilingExceeded { hi: u64, ceiling: u64 },

    #[error("{0} is a Wieferich prime above 3511; no desk-scale statement applies")]
    LargeWieferich(u64),

    #[error("engine disagreement: {0}")]
    EngineDisagreement(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("checkpoint file: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Cap errors are reported with partial output rather than as hard failures.
    pub fn is_cap_exceeded(&self) -> bool {
        matches!(self, Error::ExactCapExceeded { .. } | Error::ModularCapExceeded { .. } | Error::ScanCeilingExceeded { .. })
    }
}
