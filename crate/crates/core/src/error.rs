use thiserror::Error;

/// The judgment being decided when an error was raised.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Judgment {
    CompCtx,
    LfCtx,
    Schema,
    LfKind,
    LfType,
    LfTerm,
    LfParam,
    LfSubst,
    CtxType,
    CtxObj,
    Comp,
    Recursor,
    Reduction,
    Substitution,
    Syntax,
}

impl Judgment {
    pub fn tag(self) -> &'static str {
        match self {
            Judgment::CompCtx => "|- Gamma",
            Judgment::LfCtx => "Gamma |- Psi : ctx",
            Judgment::Schema => "Gamma |- Psi : tm_ctx",
            Judgment::LfKind => "Gamma; Psi |- K : kind",
            Judgment::LfType => "Gamma; Psi |- A : K",
            Judgment::LfTerm => "Gamma; Psi |- M : A",
            Judgment::LfParam => "Gamma; Psi |-# M : A",
            Judgment::LfSubst => "Gamma; Psi |- sigma : Phi",
            Judgment::CtxType => "Gamma |- T",
            Judgment::CtxObj => "Gamma |- C : T",
            Judgment::Comp => "Gamma |- t : tau",
            Judgment::Recursor => "Gamma |- rec : tau",
            Judgment::Reduction => "whnf",
            Judgment::Substitution => "substitution",
            Judgment::Syntax => "syntax",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TypeErrorKind {
    UnboundCompVar,
    UnboundLfVar,
    UnknownCtxVar,
    NotAFunction,
    DomainMismatch,
    TypeMismatch,
    UnboxNotBox,
    NotAParameter,
    NotAPrefix,
    EntryTypeMismatch,
    IllKinded,
    IllKindedDecl,
    CtxMismatch,
    UniverseError,
    BadInvariantShape,
    SchemaViolation,
    NotNeutral,
    CannotInfer,
}

/// A rejected judgment, with pretty-printed expected and actual forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeError {
    pub kind: TypeErrorKind,
    pub judgment: Judgment,
    pub message: String,
    pub expected: Option<String>,
    pub actual: Option<String>,
}

impl TypeError {
    pub fn new(kind: TypeErrorKind, judgment: Judgment, message: impl Into<String>) -> TypeError {
        TypeError { kind, judgment, message: message.into(), expected: None, actual: None }
    }

    pub fn expected(mut self, e: impl Into<String>) -> TypeError {
        self.expected = Some(e.into());
        self
    }

    pub fn actual(mut self, a: impl Into<String>) -> TypeError {
        self.actual = Some(a.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("{}: {}", .0.judgment.tag(), .0.message)]
    Type(Box<TypeError>),
    #[error("reduction exceeded the step budget of {0}")]
    FuelExhausted(u64),
    #[error("stuck term: {0}")]
    StuckTerm(String),
    #[error("recursor cannot dispatch on {0}")]
    DispatchFailure(String),
    #[error("LF variable {0} is outside the substitution domain")]
    IllScoped(usize),
    #[error("lookup failed: {0}")]
    LookupFailure(String),
    #[error("truncation failed: {0}")]
    TruncFailure(String),
    #[error("ill-sorted substitution: {0}")]
    IllSorted(String),
}

impl KernelError {
    /// Errors that indicate resource exhaustion or a kernel invariant breach
    /// rather than a user-facing type error.
    pub fn is_internal(&self) -> bool {
        !matches!(self, KernelError::Type(_))
    }

    pub fn type_error(&self) -> Option<&TypeError> {
        match self {
            KernelError::Type(e) => Some(e),
            _ => None,
        }
    }

    pub fn kind(&self) -> Option<TypeErrorKind> {
        self.type_error().map(|e| e.kind)
    }
}

impl From<TypeError> for KernelError {
    fn from(e: TypeError) -> KernelError {
        KernelError::Type(Box::new(e))
    }
}

pub type Result<T, E = KernelError> = std::result::Result<T, E>;
