use thiserror::Error;

use crate::sul::NonDeterminismReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid symbol name {0:?}")]
    InvalidSymbol(String),
    #[error("symbol name {0:?} is reserved")]
    ReservedSymbol(String),
    #[error("symbol {0:?} declared twice")]
    DuplicateSymbol(String),
    #[error("unknown symbol {0:?}")]
    UnknownSymbol(String),
    #[error("alphabet has no inputs")]
    EmptyAlphabet,
    #[error("operation needs a closed alphabet (with wait/quiet/lambda/err)")]
    NotClosed,
    #[error("input {0} is outside the machine's input alphabet")]
    InputDomain(u16),

    #[error("unknown state {0:?}")]
    UnknownState(String),
    #[error("state {0:?} declared twice")]
    DuplicateState(String),
    #[error("state {state:?} has two transitions on {symbol:?}")]
    DuplicateTransition { state: String, symbol: String },
    #[error("state {state:?} has outputs {first:?} and {second:?}: at most one pending callback per state")]
    OutputNondeterminism {
        state: String,
        first: String,
        second: String,
    },
    #[error("mealy machine is missing a transition from {state:?} on {input:?}")]
    IncompleteMachine { state: String, input: String },
    #[error("machines have different alphabets")]
    AlphabetMismatch,
    #[error("machine is not minimal: states {0} and {1} are equivalent")]
    NotMinimal(usize, usize),
    #[error("state {0} is entered by an err transition but is not an err sink")]
    ErrSinkViolation(usize),
    #[error("not a closure-shaped machine: {0}")]
    MalformedClosure(String),

    #[error("non-deterministic behaviour observed:\n{0}")]
    NonDeterminism(Box<NonDeterminismReport>),
    #[error("equivalence query cap of {cap} exceeded (hypothesis has {states} states)")]
    EqCapExceeded { cap: usize, states: usize },
    #[error("state-bound check needs {words} words, above the budget of {budget}")]
    QueryBudget { words: u128, budget: u128 },
    #[error("no minimal machine with the requested size after {attempts} attempts (seed {seed})")]
    GeneratorExhausted { seed: u64, attempts: usize },

    #[error("invalid refinement: {0}")]
    Refinement(String),
    #[error("invalid learning purpose: {0}")]
    Purpose(String),
    #[error("invalid model: {0}")]
    Model(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
