//! Diagonal and finite-section self-adjoint operators.

pub mod classify;
pub mod sequence;
pub mod truncation;

pub use classify::{
    classify_diagonal, split_positive_compact, tail_infimum, Basis, Certificate, Classification,
    NegativePart, PositiveCompactSplit, Verdict, WindowInfimum, DEFAULT_EPSILON,
};
pub use sequence::{EigenvalueSequence, Generator, KnownLimit, RadialTerms, TailBehavior, Witness};
pub use truncation::{
    apply_finite_rank, basis_weyl_probe, negative_count_profile, BasisProbe, CountProfile,
    CountTrend, FiniteRankPerturbation, HermitianTruncation, Spectrum,
};
