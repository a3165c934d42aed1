use thiserror::Error;

#[derive(Debug, Error)]
pub enum LtrError {
    #[error(transparent)]
    Core(#[from] expexp_core::Error),

    #[error("training diverged at epoch {epoch}, query `{query}`: loss {loss}\n{diagnostics}")]
    Divergence {
        epoch: usize,
        query: String,
        loss: f64,
        diagnostics: String,
    },

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("checkpoint error: {0}")]
    Checkpoint(String),
}

pub type Result<T> = std::result::Result<T, LtrError>;
