use crate::rational::Rational;
use thiserror::Error;

/// Errors raised by constructors and operations.
///
/// Every variant is an input/precondition failure; the numerical core never
/// fails once its inputs validate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("sample space must contain at least one atom")]
    EmptySpace,

    #[error("atom {atom} out of range for a space of {atom_count} atoms")]
    AtomOutOfRange { atom: usize, atom_count: usize },

    #[error("blocks do not form a partition: {reason}")]
    NotAPartition { reason: String },

    #[error("mismatched atom counts: {left} vs {right}")]
    SpaceMismatch { left: usize, right: usize },

    #[error("weights must sum to 1, got {sum}")]
    WeightSum { sum: Rational },

    #[error("negative weight {weight} at atom {atom}")]
    NegativeWeight { atom: usize, weight: Rational },

    #[error("a measure must carry at least one weight")]
    EmptyMeasure,

    #[error("measure family must be nonempty")]
    EmptyFamily,

    #[error("a random variable must carry at least one value")]
    EmptyVariable,

    #[error("need at least {needed} sample variables, got {got}")]
    NotEnoughSamples { needed: usize, got: usize },

    #[error("negation of -inf is undefined (atom {atom})")]
    NegateNegInf { atom: usize },

    #[error("scaling -inf by a negative constant is undefined (atom {atom})")]
    ScaleNegInf { atom: usize },

    #[error("not absolutely continuous on S: the block containing atom {atom} carries theta-mass but no phi-mass")]
    NotAbsolutelyContinuous { atom: usize },

    #[error("not integrable: value is -inf at charged atom {atom}")]
    NotIntegrable { atom: usize },

    #[error("pasting set is not measurable in the universal completion")]
    PasteSetNotMeasurable,

    #[error("pasting set leaves the support intersection at atom {atom}")]
    PasteSetOutsideSupports { atom: usize },

    #[error("stabilisation budget {budget} is below the family size {family_len}")]
    BudgetTooSmall { budget: usize, family_len: usize },

    #[error("member {member} of the dominating sub-family is not in the ambient family")]
    NotASubfamily { member: usize },

    #[error("supports of sub-family members {left} and {right} overlap at atom {atom}")]
    SupportsNotDisjoint { left: usize, right: usize, atom: usize },

    #[error("family member {member} is not measurable up to null sets: atoms {atom_a} and {atom_b} share a charged block but carry different values")]
    NotMeasurableAlmostSurely {
        member: usize,
        atom_a: usize,
        atom_b: usize,
    },

    #[error("inconsistent family: members {left} and {right} disagree at charged atom {atom} inside their common support")]
    InconsistentFamily { left: usize, right: usize, atom: usize },

    #[error("filtration level {level} does not refine the previous level")]
    FiltrationNotRefining { level: usize },

    #[error("process has {got} variables but the filtration has {expected} levels")]
    ProcessLengthMismatch { got: usize, expected: usize },

    #[error("process variable at level {level} is not adapted: atoms {atom_a} and {atom_b} share a block but carry different values at charged atoms")]
    NotAdapted {
        level: usize,
        atom_a: usize,
        atom_b: usize,
    },

    #[error("exponent must be at least 1, got {p}")]
    ExponentBelowOne { p: Rational },
}

pub type Result<T> = std::result::Result<T, Error>;
