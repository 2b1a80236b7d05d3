use qforms_core::Error as EngineError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {invariant}: {witness}")]
    Validation { invariant: String, witness: String },
    #[error("engine error: {0}")]
    Engine(EngineError),
}

impl CliError {
    pub fn parse(msg: impl Into<String>) -> Self {
        CliError::Parse(msg.into())
    }

    pub fn validation(invariant: impl Into<String>, witness: impl Into<String>) -> Self {
        CliError::Validation {
            invariant: invariant.into(),
            witness: witness.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation { .. } => 2,
            CliError::Engine(_) => 3,
            CliError::Parse(_) => 4,
        }
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        let invariant = match &e {
            EngineError::JacobiFailure(_) => "Jacobi identity",
            EngineError::NotAnAction { .. } => "action",
            EngineError::NotHomological(_) => "homological",
            EngineError::NotClosed(_) => "subcomplex closure",
            EngineError::NotMorphic(_) => "morphic",
            EngineError::InvalidGroupoid(_) => "groupoid axioms",
            EngineError::WeightNotPreserved(_) => "weight preservation",
            EngineError::NotNormalized(_) => "normalization",
            EngineError::DegreeMismatch(_) => "degree bookkeeping",
            EngineError::InvalidTable(_) => "generator table",
            _ => return CliError::Engine(e),
        };
        CliError::validation(invariant, e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
