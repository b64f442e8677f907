use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("boundary mismatch: {0}")]
    BoundaryMismatch(String),
    #[error("backend mismatch: {0}")]
    BackendMismatch(String),
    #[error("duplicate element `{0}`")]
    DuplicateElement(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("not a topology: {0}")]
    NotATopology(String),
    #[error("map is not continuous: {0}")]
    NotContinuous(String),
    #[error("map is not total: {0}")]
    NotTotal(String),
    #[error("not a cover: {0}")]
    NotACover(String),
    #[error("shear map is not invertible: {0}")]
    ShearNotIso(String),
    #[error("multiplication is not associative: {0}")]
    NotAssociative(String),
    #[error("not a section: {0}")]
    NotASection(String),
    #[error("not constant on fibres: {0}")]
    NotFibrewiseConstant(String),
    #[error("not composable: {0}")]
    NotComposable(String),
    #[error("middle groupoids differ: {0}")]
    MiddleMismatch(String),
    #[error("not a bibundle functor: {0}")]
    NotABibundleFunctor(String),
    #[error("not a bibundle equivalence: {0}")]
    NotAnEquivalence(String),
    #[error("not a bibundle actor: {0}")]
    NotAnActor(String),
    #[error("action is not basic ({0})")]
    NotBasic(String),
    #[error("invalid structure: {0}")]
    Invalid(String),
    #[error("order map is not monotone: {0}")]
    NotMonotone(String),
    #[error("enumeration budget exceeded: {needed} instances, budget {budget}")]
    BudgetExceeded { needed: usize, budget: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
