use std::fmt;

use thiserror::Error;

use crate::theory::{Atom, LawId};

/// Location of a token in a source file. Lines and columns are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SourceSpan {
    pub file: Option<String>,
    pub line: usize,
    pub column: usize,
}

impl SourceSpan {
    pub fn new(line: usize, column: usize) -> Self {
        SourceSpan {
            file: None,
            line,
            column,
        }
    }

    pub fn with_file(mut self, file: impl Into<String>) -> Self {
        self.file = Some(file.into());
        self
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.file {
            Some(file) => write!(f, "{}:{}:{}", file, self.line, self.column),
            None => write!(f, "{}:{}", self.line, self.column),
        }
    }
}

/// Which head mass overflowed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MassKind {
    Statistical,
    Normative,
}

impl fmt::Display for MassKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MassKind::Statistical => f.write_str("statistical"),
            MassKind::Normative => f.write_str("normative"),
        }
    }
}

fn at(span: &Option<SourceSpan>) -> String {
    match span {
        Some(s) => format!(" at {}", s),
        None => String::new(),
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at {span}: {message}")]
    Syntax { span: SourceSpan, message: String },

    #[error("{kind} head mass of law {law} exceeds 1{}", at(span))]
    ProbabilitySum {
        law: LawId,
        kind: MassKind,
        span: Option<SourceSpan>,
    },

    #[error("probability {value} of `{atom}` in law {law} is out of range{}", at(span))]
    ProbabilityRange {
        law: LawId,
        atom: Atom,
        value: String,
        span: Option<SourceSpan>,
    },

    #[error("atom `{atom}` occurs twice in the head of law {law}{}", at(span))]
    DuplicateHeadAtom {
        law: LawId,
        atom: Atom,
        span: Option<SourceSpan>,
    },

    #[error("law {law} has an empty head")]
    EmptyHead { law: LawId },

    #[error("illegal step {index} (law {law}): {reason}")]
    IllegalStep { index: usize, law: LawId, reason: String },

    #[error("story is incomplete: law(s) {applicable:?} are still applicable")]
    IncompleteStory { applicable: Vec<LawId> },

    #[error("no branch has leaf {{{}}}", join(leaf))]
    NoSuchBranch { leaf: Vec<Atom> },

    #[error("{count} branches share leaf {{{}}}; give the story explicitly", join(leaf))]
    AmbiguousBranch { leaf: Vec<Atom>, count: usize },

    #[error("conditioning event has probability zero")]
    ConditionImpossible,

    #[error("branch is not a valid story of the theory: {reason}")]
    InvalidBranch { reason: String },

    #[error("`{atom}` does not hold in the leaf of the story")]
    CEnotInLeaf { atom: Atom },

    #[error("`{atom}` does not hold in the actual world")]
    CEnotInWorld { atom: Atom },

    #[error("no law has `{atom}` in its head")]
    NoLawForC { atom: Atom },

    #[error("`{atom}` occurs in the heads of laws {laws:?}; a unique law is required")]
    MultipleLawsForC { atom: Atom, laws: Vec<LawId> },

    #[error("strict norm on `{atom}` in law {law}; this definition needs norms strictly inside (0,1)")]
    StrictNormForbidden { law: LawId, atom: Atom },

    #[error("variable `{variable}` has governing probability exactly 1/2 and no typical value")]
    AmbiguousTypicality { variable: Atom },

    #[error("derived variables form a cycle through `{variable}`")]
    CyclicDependency { variable: Atom },

    #[error("unknown variable `{variable}`{}", at(span))]
    UnknownVariable { variable: Atom, span: Option<SourceSpan> },

    #[error("variable `{variable}` is declared twice{}", at(span))]
    DuplicateVariable { variable: Atom, span: Option<SourceSpan> },

    #[error("context does not assign `{variable}`")]
    IncompleteContext { variable: Atom },
}

fn join(atoms: &[Atom]) -> String {
    atoms.iter().map(|a| a.as_str()).collect::<Vec<_>>().join(", ")
}

impl Error {
    pub(crate) fn syntax(span: SourceSpan, message: impl Into<String>) -> Self {
        Error::Syntax {
            span,
            message: message.into(),
        }
    }

    /// Source location, when the error came out of a parser.
    pub fn span(&self) -> Option<&SourceSpan> {
        match self {
            Error::Syntax { span, .. } => Some(span),
            Error::ProbabilitySum { span, .. }
            | Error::ProbabilityRange { span, .. }
            | Error::DuplicateHeadAtom { span, .. }
            | Error::UnknownVariable { span, .. }
            | Error::DuplicateVariable { span, .. } => span.as_ref(),
            _ => None,
        }
    }

    /// Short stable name of the variant, used in diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::Syntax { .. } => "SyntaxError",
            Error::ProbabilitySum { .. } => "ProbabilitySumError",
            Error::ProbabilityRange { .. } => "ProbabilityRangeError",
            Error::DuplicateHeadAtom { .. } => "DuplicateHeadAtom",
            Error::EmptyHead { .. } => "EmptyHead",
            Error::IllegalStep { .. } => "IllegalStep",
            Error::IncompleteStory { .. } => "IncompleteStory",
            Error::NoSuchBranch { .. } => "NoSuchBranch",
            Error::AmbiguousBranch { .. } => "AmbiguousBranch",
            Error::ConditionImpossible => "ConditionImpossible",
            Error::InvalidBranch { .. } => "InvalidBranch",
            Error::CEnotInLeaf { .. } => "CEnotInLeaf",
            Error::CEnotInWorld { .. } => "CEnotInWorld",
            Error::NoLawForC { .. } => "NoLawForC",
            Error::MultipleLawsForC { .. } => "MultipleLawsForC",
            Error::StrictNormForbidden { .. } => "StrictNormForbidden",
            Error::AmbiguousTypicality { .. } => "AmbiguousTypicality",
            Error::CyclicDependency { .. } => "CyclicDependency",
            Error::UnknownVariable { .. } => "UnknownVariable",
            Error::DuplicateVariable { .. } => "DuplicateVariable",
            Error::IncompleteContext { .. } => "IncompleteContext",
        }
    }

    pub(crate) fn attach_span(self, span: SourceSpan) -> Self {
        match self {
            Error::ProbabilitySum { law, kind, .. } => Error::ProbabilitySum {
                law,
                kind,
                span: Some(span),
            },
            Error::ProbabilityRange { law, atom, value, .. } => Error::ProbabilityRange {
                law,
                atom,
                value,
                span: Some(span),
            },
            Error::DuplicateHeadAtom { law, atom, .. } => Error::DuplicateHeadAtom {
                law,
                atom,
                span: Some(span),
            },
            other => other,
        }
    }

    pub(crate) fn with_file(self, file: &str) -> Self {
        match self {
            Error::Syntax { span, message } => Error::Syntax {
                span: span.with_file(file),
                message,
            },
            Error::ProbabilitySum {
                law,
                kind,
                span: Some(s),
            } => Error::ProbabilitySum {
                law,
                kind,
                span: Some(s.with_file(file)),
            },
            Error::DuplicateHeadAtom {
                law,
                atom,
                span: Some(s),
            } => Error::DuplicateHeadAtom {
                law,
                atom,
                span: Some(s.with_file(file)),
            },
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
