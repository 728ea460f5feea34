use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} = {value} is outside [{lo}, {hi}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("{what} is not finite ({value})")]
    NonFinite { what: &'static str, value: f64 },

    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("no active meta-expert this round")]
    NoActiveExpert,

    #[error("cost vector l1 norm {norm} exceeds configured bound {bound}")]
    CostNormExceeded { norm: f64, bound: f64 },

    #[error("sink node {sink} is unreachable from the source")]
    SinkUnreachable { sink: usize },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("protocol error: {0}")]
    Protocol(String),

    #[error("numeric invariant violated: {0}")]
    Invariant(String),

    #[error("round {round}: {source}")]
    AtRound {
        round: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("missing column `{0}`")]
    MissingColumn(String),

    #[error("row {row}, column `{column}`: cannot parse `{value}`")]
    ParseCell {
        row: usize,
        column: String,
        value: String,
    },

    #[error("data error: {0}")]
    Data(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn at_round(self, round: usize) -> Self {
        match self {
            // keep the innermost round index
            e @ Error::AtRound { .. } => e,
            e => Error::AtRound {
                round,
                source: Box::new(e),
            },
        }
    }

    /// Strips any round annotation.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtRound { source, .. } => source.root(),
            e => e,
        }
    }

    /// True for failures of internal numeric invariants, as opposed to bad
    /// input data or configuration.
    pub fn is_invariant(&self) -> bool {
        matches!(self.root(), Error::Invariant(_))
    }

    pub fn is_data(&self) -> bool {
        matches!(
            self.root(),
            Error::MissingColumn(_)
                | Error::ParseCell { .. }
                | Error::Data(_)
                | Error::Csv(_)
                | Error::Io(_)
        )
    }
}

pub(crate) fn check_unit(what: &'static str, value: f64) -> Result<f64> {
    if !value.is_finite() {
        return Err(Error::NonFinite { what, value });
    }
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::OutOfRange {
            what,
            value,
            lo: 0.0,
            hi: 1.0,
        });
    }
    Ok(value)
}

pub(crate) fn check_dim(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch {
            what,
            expected,
            found,
        });
    }
    Ok(())
}
