use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("instance needs at least one location")]
    NoLocations,
    #[error("instance needs at least one miller")]
    NoMillers,
    #[error("instance needs at least one baker")]
    NoBakers,
    #[error("baker {baker} has an empty range")]
    EmptyRange { baker: usize },
    #[error("baker {baker} names location {location}, but there are only {num_locations}")]
    UnknownLocation { baker: usize, location: usize, num_locations: usize },
    #[error("duplicate location name {0:?}")]
    DuplicateLocation(String),
    #[error("expected {expected} location names, got {got}")]
    LocationCount { expected: usize, got: usize },
    #[error("no baker with id {0}")]
    InvalidBaker(usize),
    #[error("no miller with id {0}")]
    InvalidMiller(usize),
    #[error("profile has {got} {agents} entries, instance has {expected}")]
    ProfileLength { agents: &'static str, expected: usize, got: usize },
    #[error("baker {baker} placed at location {location} outside her range")]
    OutsideRange { baker: usize, location: usize },
    #[error("miller {miller} placed at unknown location {location}")]
    MillerLocation { miller: usize, location: usize },
    #[error("weights must be positive ({agents} {index} has weight 0)")]
    ZeroWeight { agents: &'static str, index: usize },
    #[error("expected {expected} {agents} weights, got {got}")]
    WeightCount { agents: &'static str, expected: usize, got: usize },
    #[error("location set must not be empty")]
    EmptyLocationSet,
    #[error("k = {k} must lie in 1..={max}")]
    KOutOfRange { k: usize, max: usize },
    #[error("set {0} of the coverage problem is empty")]
    EmptySet(usize),
    #[error("coverage problem has no sets")]
    NoSets,
    #[error("unknown figure {0:?}")]
    UnknownFigure(String),
    #[error("family parameter {name} must be at least 1")]
    FamilyParameter { name: &'static str },
    #[error("oracle refuses: {required} profiles exceed the budget of {budget}")]
    BudgetExceeded { required: u128, budget: u128 },
    #[error("flow network cannot carry the required value {required} (max {achieved})")]
    Infeasible { required: u64, achieved: u64 },
    #[error("flow does not place baker {0} at exactly one location")]
    UnplacedBaker(usize),
    #[error("scripted step {step}: no {kind} matches the move {from} -> {to}")]
    ScriptNoAgent { step: usize, kind: &'static str, from: usize, to: usize },
    #[error("scripted step {step}: {kind} {agent} moving {from} -> {to} is not improving ({before} -> {after})")]
    ScriptNotImproving {
        step: usize,
        kind: &'static str,
        agent: usize,
        from: usize,
        to: usize,
        before: String,
        after: String,
    },
    #[error("dynamics step budget must be at least 1")]
    ZeroBudget,
}
