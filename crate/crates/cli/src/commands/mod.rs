pub mod galerkin;
pub mod memreport;
pub mod mergebench;
pub mod square;

use crate::CliError;

fn internal(e: impl std::error::Error + Send + Sync + 'static) -> CliError {
    CliError::Usage(anyhow::Error::new(e))
}
