use std::fmt;

/// Failure classes, each with its own exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Config,
    Io,
    Numeric,
}

impl Kind {
    pub fn exit_code(self) -> i32 {
        match self {
            Kind::Config => 2,
            Kind::Io => 3,
            Kind::Numeric => 4,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Kind::Config => "config",
            Kind::Io => "io",
            Kind::Numeric => "numeric",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub kind: Kind,
    pub msg: String,
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        Self { kind: Kind::Config, msg: msg.into() }
    }

    pub fn io(msg: impl Into<String>) -> Self {
        Self { kind: Kind::Io, msg: msg.into() }
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Self { kind: Kind::Numeric, msg: msg.into() }
    }

    /// Adds context in front of the message.
    pub fn context(mut self, what: impl fmt::Display) -> Self {
        self.msg = format!("{what}: {}", self.msg);
        self
    }
}

/// One machine-parsable line: `error kind=<kind> msg="<message>"`.
impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let flat = self.msg.replace('\\', "\\\\").replace('"', "\\\"").replace('\n', " ");
        write!(f, "error kind={} msg=\"{}\"", self.kind.name(), flat)
    }
}

impl std::error::Error for CliError {}

impl From<mmtomo::Error> for CliError {
    fn from(e: mmtomo::Error) -> Self {
        use mmtomo::Error as E;
        let kind = match &e {
            E::Io(_) | E::SizeMismatch { .. } => Kind::Io,
            E::InvalidConfig(_)
            | E::InvalidArgument(_)
            | E::Parse { .. }
            | E::OutOfBounds { .. }
            | E::Allocation(_)
            | E::Dimension { .. } => Kind::Config,
            E::Divergence { .. }
            | E::Simulation(_)
            | E::DegenerateInput(_)
            | E::WindowClipped { .. }
            | E::Assembly { .. }
            | E::IllConditioned { .. } => Kind::Numeric,
        };
        Self { kind, msg: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_line_format() {
        let e = CliError::config("bad \"x\"\nsecond");
        assert_eq!(e.to_string(), r#"error kind=config msg="bad \"x\" second""#);
        assert_eq!(CliError::from(mmtomo::Error::IllConditioned { condition: 1e20 }).kind.exit_code(), 4);
    }
}
