//! Essential-positivity verdicts for diagonal operators.
//!
//! A diagonal operator is essentially positive exactly when
//! `liminf λ_n ≥ 0`. With a generator the tail is known in closed form and the
//! verdict is certified; with finite data only a doubling window schedule is
//! available and verdicts are marked heuristic.

use serde::Serialize;

use super::sequence::{EigenvalueSequence, TailBehavior};
use crate::error::{check_tolerance, Error, Result};

pub const DEFAULT_EPSILON: f64 = 1e-8;

/// Successive tail infima closer than this count as stabilized.
pub const STABILIZATION_TOL: f64 = 1e-6;

/// Largest exponent probed when searching for witness indices `2^k`.
const WITNESS_MAX_EXPONENT: u32 = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Positive,
    EssentiallyPositiveOnly,
    NotEssentiallyPositive,
    Inconclusive,
}

impl Verdict {
    /// `Some(true)` for either essentially-positive verdict.
    pub fn essentially_positive(&self) -> Option<bool> {
        match self {
            Verdict::Positive | Verdict::EssentiallyPositiveOnly => Some(true),
            Verdict::NotEssentiallyPositive => Some(false),
            Verdict::Inconclusive => None,
        }
    }

    pub fn is_certified(&self) -> bool {
        !matches!(self, Verdict::Inconclusive)
    }
}

/// Where the evidence for a verdict comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    /// Closed-form generator of the whole sequence.
    Generator,
    /// Stored values only.
    FiniteData,
    /// Range of a Hardy-space symbol.
    SymbolRange,
    /// Boundary limit of the Berezin transform estimated numerically.
    BoundaryLimit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WindowInfimum {
    pub start: usize,
    pub infimum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// Every stored value is `≥ -ε`.
    NonnegativeScan {
        checked: usize,
        min_value: f64,
        limit: Option<f64>,
    },
    /// Values `< -ε` occur only before `split_index`.
    SplitIndex {
        split_index: usize,
        min_value: f64,
        tail_infima: Vec<WindowInfimum>,
        limit: Option<f64>,
    },
    /// `λ_n ≤ bound < 0` along an infinite index rule.
    NegativeSubsequence {
        rule: String,
        indices: Vec<usize>,
        bound: f64,
    },
    /// Tail infima agree across the doubling schedule and are `≤ -ε`.
    StabilizedTail { windows: Vec<WindowInfimum> },
    /// Essential range of a real symbol on the circle.
    EssentialRange {
        lower: f64,
        upper: f64,
        sampled_only: bool,
        note: String,
    },
    Undetermined {
        reason: String,
        windows: Vec<WindowInfimum>,
        limit: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub certificate: Certificate,
    pub tolerance: f64,
    pub basis: Basis,
    /// Finite-data verdicts are labelled heuristic.
    pub heuristic: bool,
}

impl Classification {
    /// Re-derive the certificate's claims from `seq` alone.
    pub fn recheck(&self, seq: &EigenvalueSequence) -> bool {
        let eps = self.tolerance;
        let vals = seq.values();
        match &self.certificate {
            Certificate::NonnegativeScan { checked, min_value, .. } => {
                *checked <= vals.len()
                    && *min_value >= -eps
                    && vals[..*checked].iter().all(|&v| v >= -eps)
            }
            Certificate::SplitIndex { split_index, .. } => {
                *split_index <= vals.len()
                    && vals[*split_index..].iter().all(|&v| v >= -eps)
                    && (*split_index == 0 || vals[*split_index - 1] < -eps)
            }
            Certificate::NegativeSubsequence { indices, bound, .. } => {
                !indices.is_empty()
                    && *bound < 0.0
                    && indices
                        .iter()
                        .all(|&n| seq.value(n).is_some_and(|v| v <= *bound))
            }
            Certificate::StabilizedTail { windows } => {
                windows.len() >= 3
                    && windows.iter().all(|w| {
                        tail_infimum(seq, w.start).is_ok_and(|inf| inf == w.infimum && inf <= -eps)
                    })
                    && windows
                        .windows(2)
                        .all(|p| (p[0].infimum - p[1].infimum).abs() <= STABILIZATION_TOL)
            }
            Certificate::EssentialRange { .. } => false,
            Certificate::Undetermined { .. } => true,
        }
    }
}

/// `inf { λ_n : window_start ≤ n < len }` by sequential scan.
pub fn tail_infimum(seq: &EigenvalueSequence, window_start: usize) -> Result<f64> {
    let vals = seq.values();
    if window_start >= vals.len() {
        return Err(Error::WindowBeyondSequence {
            start: window_start,
            last: vals.len().checked_sub(1),
        });
    }
    Ok(vals[window_start..].iter().fold(f64::INFINITY, |m, &v| m.min(v)))
}

/// Window starts `N, 2N, 4N` with `4N = len / 2`.
pub fn doubling_windows(len: usize) -> Option<[usize; 3]> {
    let n = len / 8;
    (n >= 1).then_some([n, 2 * n, 4 * n])
}

fn window_infima(seq: &EigenvalueSequence) -> Option<Vec<WindowInfimum>> {
    let starts = doubling_windows(seq.len())?;
    Some(
        starts
            .iter()
            .map(|&start| WindowInfimum {
                start,
                infimum: tail_infimum(seq, start).expect("window inside sequence"),
            })
            .collect(),
    )
}

fn split_index(vals: &[f64], eps: f64) -> usize {
    vals.iter().rposition(|&v| v < -eps).map_or(0, |i| i + 1)
}

fn min_value(vals: &[f64]) -> f64 {
    vals.iter().fold(f64::INFINITY, |m, &v| m.min(v))
}

/// Sign of a tail value relative to the tolerance band.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum TailSign {
    Nonnegative,
    Negative,
    Undecided,
}

/// Inexact values inside `[-ε, ε]` are undecided; exact values are taken at face value.
pub(crate) fn tail_sign(value: f64, exact: bool, eps: f64) -> TailSign {
    if value > eps || (exact && value >= 0.0) {
        TailSign::Nonnegative
    } else if value < -eps || (exact && value < 0.0) {
        TailSign::Negative
    } else {
        TailSign::Undecided
    }
}

/// Essential-positivity verdict for the diagonal operator `diag(λ)`.
pub fn classify_diagonal(seq: &EigenvalueSequence, eps: f64) -> Result<Classification> {
    check_tolerance(eps)?;
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    match seq.tail() {
        Some(tail) => Ok(classify_with_tail(seq, tail, eps)),
        None => Ok(classify_finite(seq, eps)),
    }
}

fn classify_with_tail(seq: &EigenvalueSequence, tail: TailBehavior, eps: f64) -> Classification {
    let vals = seq.values();
    let min = min_value(vals);
    let (liminf, exact) = match tail {
        TailBehavior::Converges { limit, exact } => (limit, exact),
        // attained along the witness rule, which the generator evaluates exactly
        TailBehavior::Oscillates { liminf, .. } => (liminf, true),
    };
    let done = |verdict, certificate| Classification {
        verdict,
        certificate,
        tolerance: eps,
        basis: Basis::Generator,
        heuristic: false,
    };
    match tail_sign(liminf, exact, eps) {
        TailSign::Nonnegative => {
            if min >= -eps {
                done(
                    Verdict::Positive,
                    Certificate::NonnegativeScan {
                        checked: vals.len(),
                        min_value: min,
                        limit: tail.limit(),
                    },
                )
            } else {
                let split = split_index(vals, eps);
                let tail_infima = if split < vals.len() {
                    vec![WindowInfimum {
                        start: split,
                        infimum: tail_infimum(seq, split).expect("split inside sequence"),
                    }]
                } else {
                    Vec::new()
                };
                done(
                    Verdict::EssentiallyPositiveOnly,
                    Certificate::SplitIndex {
                        split_index: split,
                        min_value: min,
                        tail_infima,
                        limit: tail.limit(),
                    },
                )
            }
        }
        TailSign::Negative => match negative_witness(seq, tail) {
            Some(cert) => done(Verdict::NotEssentiallyPositive, cert),
            None => done(
                Verdict::Inconclusive,
                Certificate::Undetermined {
                    reason: format!(
                        "liminf {liminf} < 0 but no witness index 2^k, k ≤ {WITNESS_MAX_EXPONENT}, reaches liminf/2"
                    ),
                    windows: Vec::new(),
                    limit: tail.limit(),
                },
            ),
        },
        TailSign::Undecided => done(
            Verdict::Inconclusive,
            Certificate::Undetermined {
                reason: format!(
                    "limit {liminf} lies within ±{eps} and is a sum of several terms; sign not decidable"
                ),
                windows: Vec::new(),
                limit: tail.limit(),
            },
        ),
    }
}

fn negative_witness(seq: &EigenvalueSequence, tail: TailBehavior) -> Option<Certificate> {
    match tail {
        TailBehavior::Oscillates {
            liminf, witness, ..
        } => {
            let indices: Vec<usize> = witness
                .indices_below(1usize << WITNESS_MAX_EXPONENT)
                .into_iter()
                .filter(|&n| seq.value(n).is_some_and(|v| v <= liminf))
                .collect();
            (!indices.is_empty()).then(|| Certificate::NegativeSubsequence {
                rule: format!("{} (all but finitely many)", witness.rule()),
                indices,
                bound: liminf,
            })
        }
        TailBehavior::Converges { limit, .. } => {
            let bound = 0.5 * limit;
            let indices: Vec<usize> = (0..=WITNESS_MAX_EXPONENT)
                .map(|k| 1usize << k)
                .filter(|&n| seq.value(n).is_some_and(|v| v <= bound))
                .collect();
            (!indices.is_empty()).then(|| Certificate::NegativeSubsequence {
                rule: format!("limit {limit} < 0, so λ_n ≤ limit/2 for all large n"),
                indices,
                bound,
            })
        }
    }
}

fn classify_finite(seq: &EigenvalueSequence, eps: f64) -> Classification {
    let vals = seq.values();
    let min = min_value(vals);
    let done = |verdict, certificate| Classification {
        verdict,
        certificate,
        tolerance: eps,
        basis: Basis::FiniteData,
        heuristic: true,
    };
    if min >= -eps {
        return done(
            Verdict::Positive,
            Certificate::NonnegativeScan {
                checked: vals.len(),
                min_value: min,
                limit: None,
            },
        );
    }
    let Some(windows) = window_infima(seq) else {
        return done(
            Verdict::Inconclusive,
            Certificate::Undetermined {
                reason: "fewer than 8 stored values: no doubling window schedule".into(),
                windows: Vec::new(),
                limit: None,
            },
        );
    };
    if windows.iter().all(|w| w.infimum >= -eps) {
        return done(
            Verdict::EssentiallyPositiveOnly,
            Certificate::SplitIndex {
                split_index: split_index(vals, eps),
                min_value: min,
                tail_infima: windows,
                limit: None,
            },
        );
    }
    let stabilized = windows
        .windows(2)
        .all(|p| (p[0].infimum - p[1].infimum).abs() <= STABILIZATION_TOL);
    if stabilized && windows.iter().all(|w| w.infimum <= -eps) {
        return done(
            Verdict::NotEssentiallyPositive,
            Certificate::StabilizedTail { windows },
        );
    }
    done(
        Verdict::Inconclusive,
        Certificate::Undetermined {
            reason: "tail infima neither all ≥ -ε nor stabilized below -ε".into(),
            windows,
            limit: None,
        },
    )
}

/// Whether `λ⁻ = min(λ, 0)` tends to zero, i.e. whether `T⁻` is compact.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum NegativePart {
    Compact { basis: Basis },
    NotCompact { certificate: Certificate },
    Undetermined { reason: String },
}

/// `λ = λ⁺ + λ⁻` with `λ⁺ = max(λ, 0) ≥ 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositiveCompactSplit {
    pub positive: EigenvalueSequence,
    pub negative: EigenvalueSequence,
    pub negative_part: NegativePart,
}

pub fn split_positive_compact(seq: &EigenvalueSequence) -> Result<PositiveCompactSplit> {
    let positive: Vec<f64> = seq.values().iter().map(|&v| v.max(0.0)).collect();
    let negative: Vec<f64> = seq
        .values()
        .iter()
        .zip(&positive)
        .map(|(&v, &p)| v - p)
        .collect();
    let negative_part = if seq.is_empty() {
        NegativePart::Undetermined {
            reason: "empty sequence".into(),
        }
    } else {
        // λ⁻ → 0 exactly when liminf λ ≥ 0
        let c = classify_diagonal(seq, DEFAULT_EPSILON)?;
        match c.verdict {
            Verdict::Positive | Verdict::EssentiallyPositiveOnly => {
                NegativePart::Compact { basis: c.basis }
            }
            Verdict::NotEssentiallyPositive => NegativePart::NotCompact {
                certificate: c.certificate,
            },
            Verdict::Inconclusive => NegativePart::Undetermined {
                reason: "negative part not decidable from the available data".into(),
            },
        }
    };
    Ok(PositiveCompactSplit {
        positive: EigenvalueSequence::from_values(positive)?,
        negative: EigenvalueSequence::from_values(negative)?,
        negative_part,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::sequence::{Generator, RadialTerms};
    use crate::density::{Atom, SignedPiece};

    fn identity(len: usize) -> EigenvalueSequence {
        EigenvalueSequence::from_generator(
            Generator::EventuallyConstant {
                head: vec![],
                tail: 1.0,
            },
            len,
        )
        .unwrap()
    }

    fn lacunary(len: usize) -> EigenvalueSequence {
        EigenvalueSequence::from_generator(Generator::Lacunary, len).unwrap()
    }

    fn negative_atom(len: usize) -> EigenvalueSequence {
        EigenvalueSequence::from_generator(
            Generator::Radial(RadialTerms {
                poly: vec![],
                pieces: vec![SignedPiece {
                    lo: 0.0,
                    hi: 1.0,
                    sign: 1.0,
                }],
                atoms: vec![Atom::new(-1.0, 0.5).unwrap()],
            }),
            len,
        )
        .unwrap()
    }

    #[test]
    fn tail_infimum_examples() {
        assert_eq!(tail_infimum(&identity(10), 0).unwrap(), 1.0);
        let lac = lacunary(100);
        for w in [0, 5, 33, 64] {
            assert_eq!(tail_infimum(&lac, w).unwrap(), -1.0);
        }
        // monotone tail: infimum at the window start
        let atom = negative_atom(40);
        let expected = -22.0 * 2f64.powi(-21);
        let got = tail_infimum(&atom, 10).unwrap();
        assert!(((got - expected) / expected).abs() < 1e-14, "{got} vs {expected}");
    }

    #[test]
    fn tail_infimum_rejects_empty_window() {
        let e = tail_infimum(&identity(4), 4).unwrap_err();
        assert!(matches!(e, Error::WindowBeyondSequence { start: 4, last: Some(3) }));
    }

    #[test]
    fn classify_examples() {
        let c = classify_diagonal(&identity(64), DEFAULT_EPSILON).unwrap();
        assert_eq!(c.verdict, Verdict::Positive);

        let lac = lacunary(64);
        let c = classify_diagonal(&lac, DEFAULT_EPSILON).unwrap();
        assert_eq!(c.verdict, Verdict::NotEssentiallyPositive);
        match &c.certificate {
            Certificate::NegativeSubsequence { indices, bound, .. } => {
                assert_eq!(*bound, -1.0);
                assert_eq!(&indices[..4], &[1, 2, 4, 8]);
            }
            other => panic!("unexpected certificate {other:?}"),
        }
        assert!(c.recheck(&lac));

        let atom = negative_atom(64);
        let c = classify_diagonal(&atom, DEFAULT_EPSILON).unwrap();
        assert_eq!(c.verdict, Verdict::EssentiallyPositiveOnly);
        assert!(c.recheck(&atom));
    }

    #[test]
    fn rejects_bad_tolerance() {
        for eps in [0.0, -1.0, f64::NAN] {
            assert!(matches!(
                classify_diagonal(&identity(4), eps),
                Err(Error::InvalidTolerance(_))
            ));
        }
    }

    #[test]
    fn finite_data_schedule() {
        // decaying negative values, no generator
        let vals: Vec<f64> = (0..256).map(|n| -1.0 / (1.0 + n as f64).powi(8)).collect();
        let s = EigenvalueSequence::from_values(vals).unwrap();
        let c = classify_diagonal(&s, 1e-8).unwrap();
        assert_eq!(c.verdict, Verdict::EssentiallyPositiveOnly);
        assert!(c.heuristic);
        assert!(c.recheck(&s));

        let vals: Vec<f64> = (0..256).map(|n| if n % 3 == 0 { -0.5 } else { 1.0 }).collect();
        let s = EigenvalueSequence::from_values(vals).unwrap();
        let c = classify_diagonal(&s, 1e-8).unwrap();
        assert_eq!(c.verdict, Verdict::NotEssentiallyPositive);
        assert!(c.heuristic);
        assert!(c.recheck(&s));

        // tail infima drifting towards zero: not stabilized
        let vals: Vec<f64> = (0..256).map(|n| -1.0 / (n as f64 + 1.0)).collect();
        let s = EigenvalueSequence::from_values(vals).unwrap();
        assert_eq!(classify_diagonal(&s, 1e-8).unwrap().verdict, Verdict::Inconclusive);
    }

    #[test]
    fn near_zero_inexact_limit_is_inconclusive() {
        let terms = RadialTerms {
            poly: vec![1.0, -2.0, 1.0],
            pieces: vec![SignedPiece {
                lo: 0.0,
                hi: 1.0,
                sign: 1.0,
            }],
            atoms: vec![],
        };
        let s = EigenvalueSequence::from_generator(Generator::Radial(terms), 100).unwrap();
        assert_eq!(classify_diagonal(&s, 1e-8).unwrap().verdict, Verdict::Inconclusive);
    }

    #[test]
    fn split_examples() {
        let s = EigenvalueSequence::from_values(vec![-1.0, 2.0, -3.0]).unwrap();
        let p = split_positive_compact(&s).unwrap();
        assert_eq!(p.positive.values(), &[0.0, 2.0, 0.0]);
        assert_eq!(p.negative.values(), &[-1.0, 0.0, -3.0]);

        let p = split_positive_compact(&identity(16)).unwrap();
        assert!(p.positive.values().iter().all(|&v| v == 1.0));
        assert!(p.negative.values().iter().all(|&v| v == 0.0));
        assert!(matches!(p.negative_part, NegativePart::Compact { .. }));

        let lac = lacunary(64);
        let p = split_positive_compact(&lac).unwrap();
        assert!(p.positive.values().iter().all(|&v| v == 0.0));
        assert_eq!(p.negative.values(), lac.values());
        assert!(matches!(p.negative_part, NegativePart::NotCompact { .. }));
    }
}
