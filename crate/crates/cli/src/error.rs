use sawtm::analysis::AnalysisError;
use sawtm::exact::ExactError;
use sawtm::tm::{ProblemError, TmError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error("{path}: {source}")]
    Malformed { path: String, source: ExactError },
    #[error("not enough terms: {0}")]
    InsufficientTerms(AnalysisError),
    #[error(transparent)]
    Analysis(AnalysisError),
    #[error("enumeration failed: {0}")]
    Enumeration(ExactError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Invalid(String),
    #[error("{0} self-test check(s) failed")]
    SelfTest(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Problem(_) => 3,
            CliError::Malformed { .. } => 4,
            CliError::InsufficientTerms(_) => 5,
            CliError::Analysis(_) => 6,
            CliError::Enumeration(_) => 7,
            CliError::Io(_) => 8,
            CliError::SelfTest(_) => 9,
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::TooFewTerms { .. } | AnalysisError::TooFewApproximants(_) => CliError::InsufficientTerms(e),
            e => CliError::Analysis(e),
        }
    }
}

impl From<ExactError> for CliError {
    fn from(e: ExactError) -> Self {
        match e {
            ExactError::Io(e) => CliError::Io(e),
            ExactError::Tm(TmError::Problem(e)) => CliError::Problem(e),
            e => CliError::Enumeration(e),
        }
    }
}

impl From<TmError> for CliError {
    fn from(e: TmError) -> Self {
        ExactError::Tm(e).into()
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}
