use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything that can go wrong while building markets, evaluating stability
/// predicates, constructing witnesses, generating instances or parsing files.
///
/// Sets inside messages are rendered with agent labels, e.g. `{w1 w2}`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("duplicate agent label `{0}`")]
    DuplicateLabel(String),

    #[error("missing choice entry for {agent}: {detail}")]
    MissingChoiceEntry { agent: String, detail: String },

    #[error("invalid choice for {agent}: C({subset}) = {chosen} is not a subset of its argument")]
    InvalidChoice {
        agent: String,
        subset: String,
        chosen: String,
    },

    #[error("invalid preference list for {agent}: {reason}")]
    InvalidPreference { agent: String, reason: String },

    #[error(
        "choice function of {agent} is not substitutable: {element} is chosen from {larger} but not from {smaller}"
    )]
    SubstitutabilityViolation {
        agent: String,
        larger: String,
        smaller: String,
        element: String,
    },

    #[error("choice function of {agent} is not consistent: C({larger}) differs from C({smaller})")]
    ConsistencyViolation {
        agent: String,
        larger: String,
        smaller: String,
    },

    #[error("unknown agent `{0}`")]
    UnknownAgent(String),

    #[error("worker {worker} is matched to more than one firm in a many-to-one market")]
    ManyToOneCapacityViolation { worker: String },

    #[error("{what}: size {size} exceeds the configured cap {cap}")]
    SizeLimitExceeded {
        what: &'static str,
        size: u64,
        cap: u64,
    },

    #[error("expected the empty set or a singleton")]
    NotSingleton,

    #[error("coalition must be nonempty")]
    EmptyCoalition,

    #[error("domination compares two different matchings")]
    IdenticalMatchings,

    #[error("({firm}, {worker}) does not block the matching")]
    NotABlockingPair { firm: String, worker: String },

    #[error("the set of hired workers must be nonempty")]
    EmptyT,

    #[error("the set of hired workers is not contained in the firm's desire set")]
    TNotInDesireSet,

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("internal consistency error: {0}")]
    Internal(String),

    #[error("generator gave up on {agent} after {attempts} attempts")]
    RetriesExhausted { agent: String, attempts: u32 },

    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),

    #[error("syntax error at line {line}, column {col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
}
