use serde_json::json;

/// Exit code 1 for bad input, 2 for numerical failure.
#[derive(Debug)]
pub enum CliError {
    Validation { source: &'static str, message: String },
    Numerical { source: &'static str, message: String },
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn validation(source: &'static str, message: impl Into<String>) -> Self {
        CliError::Validation {
            source,
            message: message.into(),
        }
    }

    pub fn numerical(source: &'static str, message: impl Into<String>) -> Self {
        CliError::Numerical {
            source,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation { .. } => 1,
            CliError::Numerical { .. } => 2,
        }
    }

    pub fn to_json(&self) -> String {
        let (kind, source, message) = match self {
            CliError::Validation { source, message } => ("validation", source, message),
            CliError::Numerical { source, message } => ("numerical", source, message),
        };
        json!({
            "error": {
                "kind": kind,
                "source": source,
                "message": message,
                "exit_code": self.exit_code(),
            }
        })
        .to_string()
    }
}

impl From<mlfrac::Error> for CliError {
    fn from(e: mlfrac::Error) -> Self {
        if e.is_validation() {
            CliError::validation(e.kind(), e.to_string())
        } else {
            CliError::numerical(e.kind(), e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::validation("io", e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::validation("csv", e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::validation("json", e.to_string())
    }
}
