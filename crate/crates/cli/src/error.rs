use atg::brg::BrgError;
use atg::countdown::{CountdownError, CrossError};
use atg::pipeline::PipelineError;

/// Exit code 1 for bad input, 2 when a well-formed input exceeds a
/// resource limit or reaches a state the strategies do not cover.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Resource(String),
    /// A completed check that came out negative; `output` is still printed.
    #[error("{message}")]
    Failed { output: String, message: String },
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Input(_) | CliError::Failed { .. } => 1,
            CliError::Resource(_) => 2,
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        let msg = e.to_string();
        match e {
            PipelineError::Invalid(_)
            | PipelineError::State(_)
            | PipelineError::Brg(BrgError::InitialState(_))
            | PipelineError::NonPositiveEpsilon
            | PipelineError::RegionOutsideS => CliError::Input(msg),
            _ => CliError::Resource(msg),
        }
    }
}

impl From<CountdownError> for CliError {
    fn from(e: CountdownError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<CrossError> for CliError {
    fn from(e: CrossError) -> Self {
        match e {
            CrossError::Countdown(e) => e.into(),
            CrossError::Pipeline(e) => e.into(),
        }
    }
}
