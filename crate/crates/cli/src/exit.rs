use std::fmt;

/// Failures raised by the command layer itself.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Validation(String),
    Io(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Validation(m) | Failure::Io(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for Failure {}

pub const OK: u8 = 0;
pub const USAGE: u8 = 1;
pub const VALIDATION: u8 = 2;
pub const IO: u8 = 3;

/// Exit code for an error: 1 usage, 2 validation, 3 I/O or network.
pub fn code_for(err: &anyhow::Error) -> u8 {
    use siex_core::Error as E;
    for cause in err.chain() {
        if let Some(f) = cause.downcast_ref::<Failure>() {
            return match f {
                Failure::Usage(_) => USAGE,
                Failure::Validation(_) => VALIDATION,
                Failure::Io(_) => IO,
            };
        }
        if let Some(e) = cause.downcast_ref::<E>() {
            return match e {
                E::InvalidArgument(_) => USAGE,
                E::Io { .. } | E::Generation(_) | E::Locked(_) => IO,
                _ => VALIDATION,
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return IO;
        }
    }
    USAGE
}
