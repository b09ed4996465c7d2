use std::fmt;

use serde::{Deserialize, Serialize};

/// Every diagnostic the document loader can emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticCode {
    /// Malformed JSON.
    Syntax,
    /// A field the schema does not define.
    UnknownField,
    /// Missing field or wrong JSON type.
    Schema,
    UnsupportedVersion,
    DuplicateId,
    /// Invalid state list (fewer than two states, repeated labels, empty id).
    InvalidVariable,
    /// A parent refers to no declared variable.
    UnknownVariable,
    /// A question has both or neither of `cpt` and `dg`, or a `dg` list of
    /// the wrong length.
    Parameterization,
    /// CPT rows of the wrong count or width, or negative entries.
    InvalidCpt,
    InfeasibleParameters,
    /// `dg` on a question that is not binary.
    NonBinaryQuestion,
    OptionsMismatch,
    EvaluationShape,
    InvalidThreshold,
    InvalidMaxQuestions,
    InvalidRisk,
    /// A structural rule of the network (cycle, row normalisation,
    /// question/skill placement).
    Network,
}

impl DiagnosticCode {
    pub const ALL: [DiagnosticCode; 17] = [
        DiagnosticCode::Syntax,
        DiagnosticCode::UnknownField,
        DiagnosticCode::Schema,
        DiagnosticCode::UnsupportedVersion,
        DiagnosticCode::DuplicateId,
        DiagnosticCode::InvalidVariable,
        DiagnosticCode::UnknownVariable,
        DiagnosticCode::Parameterization,
        DiagnosticCode::InvalidCpt,
        DiagnosticCode::InfeasibleParameters,
        DiagnosticCode::NonBinaryQuestion,
        DiagnosticCode::OptionsMismatch,
        DiagnosticCode::EvaluationShape,
        DiagnosticCode::InvalidThreshold,
        DiagnosticCode::InvalidMaxQuestions,
        DiagnosticCode::InvalidRisk,
        DiagnosticCode::Network,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticCode::Syntax => "syntax",
            DiagnosticCode::UnknownField => "unknown_field",
            DiagnosticCode::Schema => "schema",
            DiagnosticCode::UnsupportedVersion => "unsupported_version",
            DiagnosticCode::DuplicateId => "duplicate_id",
            DiagnosticCode::InvalidVariable => "invalid_variable",
            DiagnosticCode::UnknownVariable => "unknown_variable",
            DiagnosticCode::Parameterization => "parameterization",
            DiagnosticCode::InvalidCpt => "invalid_cpt",
            DiagnosticCode::InfeasibleParameters => "infeasible_parameters",
            DiagnosticCode::NonBinaryQuestion => "non_binary_question",
            DiagnosticCode::OptionsMismatch => "options_mismatch",
            DiagnosticCode::EvaluationShape => "evaluation_shape",
            DiagnosticCode::InvalidThreshold => "invalid_threshold",
            DiagnosticCode::InvalidMaxQuestions => "invalid_max_questions",
            DiagnosticCode::InvalidRisk => "invalid_risk",
            DiagnosticCode::Network => "network",
        }
    }
}

impl fmt::Display for DiagnosticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub code: DiagnosticCode,
    /// JSON path of the offending value, e.g. `questions[2].dg`; `.` for
    /// the document root.
    pub path: String,
    /// 1-based position, known for syntax and schema errors.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
    pub message: String,
}

impl Diagnostic {
    pub fn new(code: DiagnosticCode, path: impl Into<String>, message: impl Into<String>) -> Self {
        Self { code, path: path.into(), line: None, column: None, message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.path)?;
        if let (Some(l), Some(c)) = (self.line, self.column) {
            write!(f, " (line {l}, column {c})")?;
        }
        write!(f, ": [{}] {}", self.code, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Diagnostics(pub Vec<Diagnostic>);

impl Diagnostics {
    pub fn iter(&self) -> impl Iterator<Item = &Diagnostic> {
        self.0.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn has(&self, code: DiagnosticCode) -> bool {
        self.0.iter().any(|d| d.code == code)
    }

    pub(crate) fn push(&mut self, code: DiagnosticCode, path: impl Into<String>, msg: impl Into<String>) {
        self.0.push(Diagnostic::new(code, path, msg));
    }
}

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl std::error::Error for Diagnostics {}
