use thiserror::Error;

/// Errors raised by the evaluators and bound routines.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum PcfError {
    #[error("pole of {function} at {arg}")]
    Pole { function: &'static str, arg: String },

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("phase {phase} outside the sector of validity {sector}")]
    PhaseOutOfSector { phase: f64, sector: &'static str },

    #[error("z too small relative to |a|: sigma = {sigma}")]
    SigmaTooLarge { sigma: f64 },

    #[error("point lies outside every bound region")]
    OutsideRegion,

    #[error("no convergence: {0}")]
    Convergence(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("self-check failed: {0}")]
    SelfCheck(String),
}

impl PcfError {
    /// True for errors caused by bad input rather than numerical trouble.
    pub fn is_invalid_input(&self) -> bool {
        matches!(
            self,
            PcfError::Pole { .. }
                | PcfError::Domain(_)
                | PcfError::Precondition(_)
                | PcfError::PhaseOutOfSector { .. }
                | PcfError::SigmaTooLarge { .. }
                | PcfError::OutsideRegion
                | PcfError::Unsupported(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, PcfError>;
