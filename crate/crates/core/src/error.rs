use std::fmt;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{name} = {value} is out of range: expected {expected}")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("expected shortfall is undefined: {0}")]
    UndefinedEs(String),

    #[error("{0} is undefined")]
    Undefined(&'static str),

    #[error("loss sample is empty")]
    EmptySample,

    #[error("loss sample contains a non-finite value at position {0}")]
    NonFinite(usize),

    #[error("no observations above the {level} quantile in a sample of {n}")]
    InsufficientTail { level: f64, n: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error(
        "omega solver found no sign change on [{lo}, {hi}]: f(lo) = {f_lo:e}, f(hi) = {f_hi:e}"
    )]
    NoSignChange {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("invalid panel input:\n{0}")]
    Panel(Diagnostics),

    #[error("total market value is zero on {0}")]
    ZeroMarketValue(chrono::NaiveDate),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Coarse classification used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Numeric,
    Data,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Domain { .. } | Error::Config(_) => ErrorKind::Usage,
            Error::UndefinedEs(_) | Error::Undefined(_) | Error::NoSignChange { .. } => {
                ErrorKind::Numeric
            }
            Error::EmptySample
            | Error::NonFinite(_)
            | Error::InsufficientTail { .. }
            | Error::InsufficientData(_)
            | Error::Panel(_)
            | Error::ZeroMarketValue(_)
            | Error::Io(_)
            | Error::Csv(_) => ErrorKind::Data,
        }
    }

    pub(crate) fn domain(name: &'static str, value: f64, expected: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            expected,
        }
    }
}

/// Line-numbered rejections collected while reading an input file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics(pub Vec<(u64, String)>);

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (line, msg)) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "  line {line}: {msg}")?;
        }
        Ok(())
    }
}

/// Checks `0 < p < 1`.
/// ES levels may be 0, where `ES_0 = E[Y]`.
pub(crate) fn check_es_level(name: &'static str, p: f64) -> Result<()> {
    if (0.0..1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::domain(name, p, "a level in [0, 1)"))
    }
}

pub(crate) fn check_open_unit(name: &'static str, p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(name, p, "a probability in (0, 1)"))
    }
}
