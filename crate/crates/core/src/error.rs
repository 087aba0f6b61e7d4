use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate register prefix `{0}`")]
    DuplicatePrefix(String),

    #[error("invalid register group `{prefix}` with {count} qubits")]
    InvalidGroup { prefix: String, count: usize },

    #[error("label `{0}` is not in the register")]
    UnknownLabel(String),

    #[error("label `{0}` appears in both registers")]
    LabelCollision(String),

    #[error("control and target are both `{0}`")]
    IdenticalLabels(String),

    #[error("register mismatch: {0}")]
    RegisterMismatch(String),

    #[error("register of {qubits} qubits exceeds the cap of {cap}")]
    SizeCap { qubits: usize, cap: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("qubit `{0}` is not in a definite basis state")]
    NotDefinite(String),

    #[error("ancilla `{label}` has |1> probability {probability:e}")]
    AncillaNotReset { label: String, probability: f64 },

    #[error("post-selection succeeded with probability zero")]
    ZeroProbability,

    #[error("unsupported input: {0}")]
    UnsupportedInput(String),

    #[error("verification failed: {0}")]
    VerificationFailed(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
