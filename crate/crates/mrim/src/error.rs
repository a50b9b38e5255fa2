use std::fmt;

/// Failure categories, each with its own process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Usage,
    Input,
    Infeasible,
    CapExceeded,
}

impl Kind {
    pub fn exit_code(self) -> i32 {
        match self {
            Kind::Usage => 2,
            Kind::Input => 3,
            Kind::Infeasible => 4,
            Kind::CapExceeded => 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub kind: Kind,
    pub message: String,
}

impl Failure {
    pub fn new(kind: Kind, message: impl Into<String>) -> Self {
        Failure {
            kind,
            message: message.into(),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Failure::new(Kind::Usage, message)
    }

    pub fn input(message: impl Into<String>) -> Self {
        Failure::new(Kind::Input, message)
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Failure {}

impl From<mrim_core::Error> for Failure {
    fn from(e: mrim_core::Error) -> Self {
        use mrim_core::Error as E;
        let kind = match e {
            E::InvalidBudget { .. } | E::InfeasibleSchedule(_) | E::NoValidRoot => Kind::Infeasible,
            E::EnumerationCap { .. } | E::SearchSpaceTooLarge { .. } => Kind::CapExceeded,
            E::InvalidParameter(_) => Kind::Usage,
            E::InvalidProbability { .. } | E::MissingProbability { .. } | E::NodeOutOfRange { .. } | E::EmptyStore => {
                Kind::Input
            }
        };
        Failure::new(kind, e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::input(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Failure>;
