//! Berezin transforms of diagonal operators on the Bergman space, difference
//! coefficients and their Cesàro/Abel means, and the radial classification
//! pipeline.
//!
//! For a diagonal operator with eigenvalues `λ_n`, the Berezin transform at
//! `|z|² = t` is `(1-t)² Σ (n+1) λ_n tⁿ`.

use serde::Serialize;

use crate::carleson::{carleson_report_depth, CarlesonReport, GRID_DEPTH};
use crate::error::{check_tolerance, Error, Result};
use crate::quadrature::{integrate, Tolerance};
use crate::radial::{eigenvalue_sequence, RadialProfileMeasure};
use crate::spectra::classify::{classify_diagonal, Basis, Certificate, Classification, Verdict};
use crate::spectra::{EigenvalueSequence, Generator, TailBehavior};
use crate::sum::NeumaierSum;

pub const SERIES_TOL: f64 = 1e-10;
/// Hard cap on series length.
pub const MAX_TERMS: usize = 200_000_000;
/// Beyond this the quadrature oracle is not attempted.
pub const QUADRATURE_T_MAX: f64 = 0.999;
pub const QUADRATURE_TOL: f64 = 1e-8;
/// Powers `tⁿ` are recomputed directly this often to stop drift.
const POWER_REFRESH: usize = 256;
const TAIL_CHECK_STRIDE: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Terms {
    /// Smallest `N` with tail bound `≤ tol`.
    Auto,
    /// Sum `n = 0..=N`.
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesOptions {
    pub tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        Self {
            tol: SERIES_TOL,
            max_terms: MAX_TERMS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: f64,
    /// Bound on the neglected tail.
    pub tail_bound: f64,
    /// Highest index summed.
    pub last_index: usize,
}

fn check_t(t: f64) -> Result<()> {
    if (0.0..1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::Domain(format!("t = {t} outside [0, 1)")))
    }
}

/// Terms available and the `|λ_n|` bound covering everything past them.
fn series_reach(seq: &EigenvalueSequence, opts: &SeriesOptions) -> Result<(usize, f64)> {
    let sup = seq.sup_bound().ok_or_else(|| {
        Error::UnboundedTail("no bound on |λ_n| beyond the stored values".into())
    })?;
    let available = if seq.is_unbounded_in_length() {
        opts.max_terms
    } else {
        seq.len()
    };
    if available == 0 {
        return Err(Error::EmptySequence);
    }
    Ok((available, sup))
}

/// Shared driver for `(1-t)^p Σ c_n tⁿ` with a caller-supplied tail bound.
fn power_series<C, B>(
    coeff: C,
    tail: B,
    t: f64,
    prefactor: f64,
    terms: Terms,
    available: usize,
    tol: f64,
) -> SeriesValue
where
    C: Fn(usize) -> f64,
    B: Fn(usize, f64) -> f64,
{
    let last_allowed = match terms {
        Terms::Auto => available - 1,
        Terms::Fixed(n) => n.min(available - 1),
    };
    let mut acc = NeumaierSum::new();
    let mut power = 1.0;
    let ln_t = (-(1.0 - t)).ln_1p();
    let mut n = 0;
    loop {
        if n > 0 && n % POWER_REFRESH == 0 {
            power = (n as f64 * ln_t).exp();
        }
        acc.add(coeff(n) * power);
        power *= t;
        // power = t^{n+1}; the tail is only checked every few terms
        let last = n >= last_allowed || power == 0.0;
        if last || (terms == Terms::Auto && n % TAIL_CHECK_STRIDE == 0) {
            let bound = if power == 0.0 { 0.0 } else { tail(n, power) };
            if last || bound <= tol {
                return SeriesValue {
                    value: prefactor * acc.value(),
                    tail_bound: bound,
                    last_index: n,
                };
            }
        }
        n += 1;
    }
}

/// `(1-t)² Σ_{n≤N} (n+1) λ_n tⁿ`, tail bound `sup|λ| t^{N+1}((N+1)(1-t)+1)`.
pub fn berezin_series(
    seq: &EigenvalueSequence,
    t: f64,
    terms: Terms,
    opts: &SeriesOptions,
) -> Result<SeriesValue> {
    check_t(t)?;
    let (available, sup) = series_reach(seq, opts)?;
    let gen = seq.generator();
    let vals = seq.values();
    let lambda = |n: usize| match gen {
        Some(g) if n >= vals.len() => g.eval(n),
        _ => vals[n],
    };
    let one_minus = 1.0 - t;
    Ok(power_series(
        |n| (n as f64 + 1.0) * lambda(n),
        |n, tn1| sup * tn1 * ((n as f64 + 1.0) * one_minus + 1.0),
        t,
        one_minus * one_minus,
        terms,
        available,
        opts.tol,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BerezinSource {
    Series,
    DiskQuadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BerezinSample {
    pub t: f64,
    pub value: f64,
    pub tail_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BerezinProfile {
    pub samples: Vec<BerezinSample>,
    pub source: BerezinSource,
}

impl BerezinProfile {
    /// Series evaluation at strictly increasing `ts`.
    pub fn from_series(seq: &EigenvalueSequence, ts: &[f64], opts: &SeriesOptions) -> Result<Self> {
        if ts.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("t values must be strictly increasing".into()));
        }
        let samples = ts
            .iter()
            .map(|&t| {
                let s = berezin_series(seq, t, Terms::Auto, opts)?;
                Ok(BerezinSample {
                    t,
                    value: s.value,
                    tail_bound: s.tail_bound,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            samples,
            source: BerezinSource::Series,
        })
    }

    /// Quadrature evaluation; the error estimate goes in `tail_bound`.
    pub fn from_quadrature(m: &RadialProfileMeasure, ts: &[f64]) -> Result<Self> {
        if ts.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("t values must be strictly increasing".into()));
        }
        let samples = ts
            .iter()
            .map(|&t| {
                let q = berezin_disk_quadrature(m, t)?;
                Ok(BerezinSample {
                    t,
                    value: q.value,
                    tail_bound: q.error,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            samples,
            source: BerezinSource::DiskQuadrature,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureValue {
    pub value: f64,
    pub error: f64,
}

/// `(1/π) ∫_0^π |1 - ρ e^{iθ}|^{-4} dθ` by quadrature.
fn angular_mean(rho: f64) -> Result<QuadratureValue> {
    if rho == 0.0 {
        return Ok(QuadratureValue {
            value: 1.0,
            error: 0.0,
        });
    }
    let gap = 1.0 - rho;
    let breaks: Vec<f64> = (0..12)
        .map(|j| gap * 2f64.powi(j))
        .filter(|&x| x < std::f64::consts::PI)
        .collect();
    let r = integrate(
        |theta| {
            // |1 - ρe^{iθ}|² without cancellation near θ = 0
            let h = (0.5 * theta).sin();
            let d = gap * gap + 4.0 * rho * h * h;
            1.0 / (d * d)
        },
        0.0,
        std::f64::consts::PI,
        &breaks,
        Tolerance::relative(1e-12),
        2000,
    )?;
    Ok(QuadratureValue {
        value: r.value / std::f64::consts::PI,
        error: r.error / std::f64::consts::PI,
    })
}

/// `(1-t)² ∫_𝔻 |1 - √t w̄|^{-4} dμ(w)` by radial × angular quadrature.
///
/// Independent of the eigenvalue formula: the disk measure is `2r dm(r)` in
/// the radius, and the kernel is averaged over the circle numerically.
pub fn berezin_disk_quadrature(m: &RadialProfileMeasure, t: f64) -> Result<QuadratureValue> {
    berezin_disk_quadrature_tol(m, t, QUADRATURE_TOL)
}

/// [`berezin_disk_quadrature`] with relative tolerance `rel_tol` on the radial integral.
pub fn berezin_disk_quadrature_tol(
    m: &RadialProfileMeasure,
    t: f64,
    rel_tol: f64,
) -> Result<QuadratureValue> {
    check_t(t)?;
    check_tolerance(rel_tol)?;
    if t > QUADRATURE_T_MAX {
        return Err(Error::Domain(format!(
            "quadrature oracle limited to t ≤ {QUADRATURE_T_MAX}; use the series"
        )));
    }
    let s = t.sqrt();
    let prefactor = (1.0 - t) * (1.0 - t);
    let radial = integrate(
        |r| {
            let f = m.density(r);
            if f == 0.0 {
                return 0.0;
            }
            let a = angular_mean(s * r).map_or(f64::NAN, |q| q.value);
            2.0 * r * f * a
        },
        0.0,
        1.0,
        &m.breakpoints(),
        Tolerance {
            abs: 1e-10,
            rel: rel_tol,
        },
        4000,
    )?;
    let mut value = NeumaierSum::new();
    value.add(radial.value);
    let mut error = radial.error;
    for a in m.atoms() {
        let q = angular_mean(s * a.radius)?;
        value.add(2.0 * a.radius * a.mass * q.value);
        error += (2.0 * a.radius * a.mass * q.error).abs();
    }
    Ok(QuadratureValue {
        value: prefactor * value.value(),
        error: prefactor * error,
    })
}

/// `|a_n| ≤ constant + slope · n` for every `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AffineBound {
    pub constant: f64,
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DifferenceCoefficients {
    /// `a_0 = λ_0`, `a_n = (n+1)λ_n - nλ_{n-1}`.
    pub a: Vec<f64>,
    /// `max |a_n|` over stored values.
    pub sup_abs: f64,
    /// Global bound, from the generator or from a bound on `|λ_n|`.
    pub bound: Option<AffineBound>,
    #[serde(skip)]
    generator: Option<Generator>,
}

impl DifferenceCoefficients {
    pub fn generator(&self) -> Option<&Generator> {
        self.generator.as_ref()
    }

    /// `a_n` from storage or the generator.
    pub fn value(&self, n: usize) -> Option<f64> {
        self.a.get(n).copied().or_else(|| {
            self.generator.as_ref().map(|g| {
                let prev = if n == 0 { 0.0 } else { g.eval(n - 1) };
                (n as f64 + 1.0) * g.eval(n) - n as f64 * prev
            })
        })
    }
}

pub fn difference_coeffs(seq: &EigenvalueSequence) -> Result<DifferenceCoefficients> {
    let lam = seq.values();
    if lam.is_empty() {
        return Err(Error::EmptySequence);
    }
    let a: Vec<f64> = (0..lam.len())
        .map(|n| {
            if n == 0 {
                lam[0]
            } else {
                (n as f64 + 1.0) * lam[n] - n as f64 * lam[n - 1]
            }
        })
        .collect();
    let sup_abs = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    // |a_n| ≤ (2n+1) sup|λ| always
    let bound = match seq.generator() {
        Some(g) => {
            let (constant, slope) = g.difference_bound();
            Some(AffineBound { constant, slope })
        }
        None => seq.sup_bound().map(|s| AffineBound {
            constant: s,
            slope: 2.0 * s,
        }),
    };
    Ok(DifferenceCoefficients {
        a,
        sup_abs,
        bound,
        generator: seq.generator().cloned(),
    })
}

/// The two terms of `a_n = -n²(m_{2n-2} - m_{2n}) + (2n+1) m_{2n}` in disk
/// moments, with the difference of moments taken against `(1-r²) dm`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegralTerms {
    /// `n² (m_{2n-2} - m_{2n})`.
    pub first: f64,
    /// `(2n+1) m_{2n}`.
    pub second: f64,
}

impl IntegralTerms {
    pub fn a_n(&self) -> f64 {
        self.second - self.first
    }
}

pub fn a_n_terms(m: &RadialProfileMeasure, n: u64) -> Result<IntegralTerms> {
    if n == 0 {
        return Err(Error::InvalidArgument("integral form needs n ≥ 1".into()));
    }
    let nf = n as f64;
    let diff = 2.0 * m.weighted().moment(2 * n - 1)?;
    let m2n = m.disk_moment(n)?.value;
    Ok(IntegralTerms {
        first: nf * nf * diff,
        second: (2.0 * nf + 1.0) * m2n,
    })
}

pub fn a_n_integral_form(m: &RadialProfileMeasure, n: u64) -> Result<f64> {
    Ok(a_n_terms(m, n)?.a_n())
}

/// `(a_0 + … + a_n)/(n+1)`.
pub fn cesaro_means(a: &DifferenceCoefficients) -> Vec<f64> {
    let mut acc = NeumaierSum::new();
    a.a.iter()
        .enumerate()
        .map(|(n, &v)| {
            acc.add(v);
            acc.value() / (n as f64 + 1.0)
        })
        .collect()
}

/// `(1-t) Σ a_n tⁿ`, tail bound from the affine bound on `|a_n|`.
pub fn abel_mean(
    a: &DifferenceCoefficients,
    t: f64,
    terms: Terms,
    opts: &SeriesOptions,
) -> Result<SeriesValue> {
    check_t(t)?;
    let bound = a
        .bound
        .ok_or_else(|| Error::UnboundedTail("difference coefficients have no bound".into()))?;
    let available = if a.generator.is_some() {
        opts.max_terms
    } else {
        a.a.len()
    };
    let one_minus = 1.0 - t;
    let coeff = |n: usize| a.value(n).expect("index within reach");
    Ok(power_series(
        coeff,
        |n, tn1| {
            let n1 = n as f64 + 1.0;
            bound.constant * tn1 + bound.slope * tn1 * (n1 * one_minus + t) / one_minus
        },
        t,
        one_minus,
        terms,
        available,
        opts.tol,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitStatus {
    Certified,
    Stabilized,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AbelPoint {
    pub k: i32,
    pub t: f64,
    pub value: f64,
    pub tail_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaPoint {
    pub n: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryLimit {
    pub value: Option<f64>,
    pub status: LimitStatus,
    /// The closed-form limit carries no cancellation error.
    pub exact: bool,
    pub abel: Vec<AbelPoint>,
    pub lambda: Vec<LambdaPoint>,
    pub note: String,
}

pub const LIMIT_AGREEMENT: f64 = 1e-4;
pub const SCHEDULE_K: std::ops::RangeInclusive<i32> = 3..=20;

/// `lim λ_n`, from a generator when possible, else from matched dyadic
/// schedules `t_k = 1 - 2^{-k}` (Abel means) and `n = 2^k`.
pub fn boundary_limit(seq: &EigenvalueSequence, opts: &SeriesOptions) -> Result<BoundaryLimit> {
    if let Some(TailBehavior::Converges { limit, exact }) = seq.tail() {
        return Ok(BoundaryLimit {
            value: Some(limit),
            status: LimitStatus::Certified,
            exact,
            abel: Vec::new(),
            lambda: Vec::new(),
            note: "closed-form limit of the eigenvalue generator".into(),
        });
    }
    let a = difference_coeffs(seq)?;
    let mut abel = Vec::new();
    let mut lambda = Vec::new();
    for k in SCHEDULE_K {
        let t = 1.0 - 2f64.powi(-k);
        if a.bound.is_some() {
            let s = abel_mean(&a, t, Terms::Auto, opts)?;
            if s.tail_bound <= opts.tol {
                abel.push(AbelPoint {
                    k,
                    t,
                    value: s.value,
                    tail_bound: s.tail_bound,
                });
            }
        }
        let n = 1usize << k;
        if let Some(v) = seq.value(n) {
            lambda.push(LambdaPoint { n, value: v });
        }
    }
    let settled = |xs: &[f64]| xs.len() >= 2 && (xs[xs.len() - 1] - xs[xs.len() - 2]).abs() <= LIMIT_AGREEMENT;
    let av: Vec<f64> = abel.iter().map(|p| p.value).collect();
    let lv: Vec<f64> = lambda.iter().map(|p| p.value).collect();
    let (status, value, note) = if settled(&av) && settled(&lv) {
        let (x, y) = (av[av.len() - 1], lv[lv.len() - 1]);
        if (x - y).abs() <= LIMIT_AGREEMENT {
            (LimitStatus::Stabilized, Some(x), "Abel means and λ_{2^k} agree".to_string())
        } else {
            (
                LimitStatus::Inconclusive,
                None,
                format!("Abel means settle at {x} but λ_{{2^k}} settle at {y}: no limit"),
            )
        }
    } else if settled(&av) {
        (
            LimitStatus::Inconclusive,
            None,
            "Abel means settle but λ_{2^k} do not: λ_n has no limit along the schedule".into(),
        )
    } else {
        (
            LimitStatus::Inconclusive,
            None,
            "schedules did not settle within the available terms".into(),
        )
    };
    Ok(BoundaryLimit {
        value,
        status,
        exact: false,
        abel,
        lambda,
        note,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialOptions {
    /// Stored eigenvalues `λ_0 … λ_{terms-1}`.
    pub terms: usize,
    /// `N` for the moment-ratio Carleson test.
    pub carleson_n: usize,
    /// Berezin samples at `t = 1 - 2^{-k}`, `k = 1..=evidence_depth`.
    pub evidence_depth: i32,
    /// Dyadic depth of the supremum criterion.
    pub grid_depth: i32,
    pub series: SeriesOptions,
}

impl Default for RadialOptions {
    fn default() -> Self {
        Self {
            terms: 10_001,
            carleson_n: 1024,
            evidence_depth: 12,
            grid_depth: GRID_DEPTH,
            series: SeriesOptions::default(),
        }
    }
}

/// Recorded `f̃` near the boundary; a necessary condition, never a verdict source.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BerezinEvidence {
    pub samples: Vec<BerezinSample>,
    /// Smallest sampled value at the three deepest levels.
    pub liminf_estimate: f64,
    pub necessary_condition_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialClassification {
    pub classification: Classification,
    pub boundary_limit: BoundaryLimit,
    pub carleson: CarlesonReport,
    pub berezin: BerezinEvidence,
}

/// The radial characterization: with `|μ|` Carleson and `L = lim λ_n`
/// existing, `T_μ` is essentially positive iff `L ≥ 0`.
pub fn classify_radial(
    m: &RadialProfileMeasure,
    eps: f64,
    opts: &RadialOptions,
) -> Result<RadialClassification> {
    check_tolerance(eps)?;
    let carleson = carleson_report_depth(&m.total_variation(), 0.0, opts.carleson_n, opts.grid_depth)?;
    if !carleson.is_carleson {
        return Err(Error::HypothesisNotMet(format!(
            "|μ| is not Carleson: moment ratios {:?} grow without bound",
            carleson
                .moment_ratio
                .checkpoints
                .iter()
                .map(|p| p.ratio)
                .collect::<Vec<_>>()
        )));
    }
    let seq = eigenvalue_sequence(m, opts.terms)?;
    let boundary = boundary_limit(&seq, &opts.series)?;
    let classification = match boundary.status {
        // the diagonal classifier applies the same sign rule to the closed-form limit
        LimitStatus::Certified => classify_diagonal(&seq, eps)?,
        LimitStatus::Stabilized => {
            let l = boundary.value.expect("stabilized limit has a value");
            let finite = classify_diagonal(&seq, eps)?;
            let from_limit = if l > eps {
                Some(true)
            } else if l < -eps {
                Some(false)
            } else {
                None
            };
            match (from_limit, finite.verdict.essentially_positive()) {
                (Some(x), Some(y)) if x == y => Classification {
                    basis: Basis::BoundaryLimit,
                    heuristic: true,
                    ..finite
                },
                _ => undetermined(
                    eps,
                    format!("boundary limit {l} and finite-data tail infima do not agree on a sign"),
                    boundary.value,
                ),
            }
        }
        LimitStatus::Inconclusive => undetermined(eps, boundary.note.clone(), None),
    };
    let berezin = berezin_evidence(&seq, eps, opts)?;
    Ok(RadialClassification {
        classification,
        boundary_limit: boundary,
        carleson,
        berezin,
    })
}

fn undetermined(eps: f64, reason: String, limit: Option<f64>) -> Classification {
    Classification {
        verdict: Verdict::Inconclusive,
        certificate: Certificate::Undetermined {
            reason,
            windows: Vec::new(),
            limit,
        },
        tolerance: eps,
        basis: Basis::BoundaryLimit,
        heuristic: true,
    }
}

fn berezin_evidence(
    seq: &EigenvalueSequence,
    eps: f64,
    opts: &RadialOptions,
) -> Result<BerezinEvidence> {
    let ts: Vec<f64> = (1..=opts.evidence_depth)
        .map(|k| 1.0 - 2f64.powi(-k))
        .collect();
    let samples = match BerezinProfile::from_series(seq, &ts, &opts.series) {
        Ok(p) => p.samples,
        Err(Error::UnboundedTail(_)) => Vec::new(),
        Err(e) => return Err(e),
    };
    let deepest = &samples[samples.len().saturating_sub(3)..];
    let liminf_estimate = deepest.iter().map(|s| s.value).fold(f64::INFINITY, f64::min);
    Ok(BerezinEvidence {
        necessary_condition_holds: liminf_estimate >= -eps,
        liminf_estimate,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::Atom;
    use crate::radial::{lacunary_operator, zhao_zheng_symbol};
    use proptest::prelude::*;

    fn opts() -> SeriesOptions {
        SeriesOptions::default()
    }

    fn identity() -> EigenvalueSequence {
        eigenvalue_sequence(&RadialProfileMeasure::lebesgue(), 16).unwrap()
    }

    #[test]
    fn identity_normalization() {
        for t in [0.0, 0.3, 0.5, 0.9, 0.99, 0.999] {
            let s = berezin_series(&identity(), t, Terms::Auto, &opts()).unwrap();
            assert!((s.value - 1.0).abs() <= s.tail_bound + 1e-12, "t={t}: {}", s.value);
            assert!(s.tail_bound <= 1e-10);
        }
    }

    #[test]
    fn lacunary_series() {
        let lac = lacunary_operator(16).unwrap();
        assert_eq!(berezin_series(&lac, 0.0, Terms::Auto, &opts()).unwrap().value, 0.0);
        let s = berezin_series(&lac, 0.5, Terms::Auto, &opts()).unwrap();
        // oracle: -(1/4) Σ_k (2^k + 1) 2^{-2^k}
        let oracle: f64 = -0.25
            * (0..12)
                .map(|k| {
                    let n = 2f64.powi(k);
                    (n + 1.0) * 0.5f64.powf(n)
                })
                .sum::<f64>();
        assert!((s.value - oracle).abs() < 1e-12, "{} vs {oracle}", s.value);
        assert!((s.value + 0.524).abs() < 1e-3);
    }

    #[test]
    fn rejects_t_at_one() {
        assert!(matches!(
            berezin_series(&identity(), 1.0, Terms::Auto, &opts()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn finite_data_without_bound_is_rejected() {
        let s = EigenvalueSequence::from_values(vec![1.0; 10]).unwrap();
        assert!(matches!(
            berezin_series(&s, 0.5, Terms::Auto, &opts()),
            Err(Error::UnboundedTail(_))
        ));
    }

    #[test]
    fn quadrature_examples() {
        let q = berezin_disk_quadrature(&RadialProfileMeasure::lebesgue(), 0.5).unwrap();
        assert!((q.value - 1.0).abs() < 1e-8);
        let q = berezin_disk_quadrature(&RadialProfileMeasure::polynomial(&[0.0, 1.0]).unwrap(), 0.0).unwrap();
        assert!((q.value - 2.0 / 3.0).abs() < 1e-8);
        let a = RadialProfileMeasure::new(vec![], vec![Atom::new(1.0, 0.5).unwrap()]).unwrap();
        assert!((berezin_disk_quadrature(&a, 0.0).unwrap().value - 1.0).abs() < 1e-8);
        assert!(berezin_disk_quadrature(&a, 0.9995).is_err());
    }

    #[test]
    fn angular_mean_closed_form() {
        for rho in [0.1f64, 0.5, 0.9, 0.99, 0.999] {
            let want = (1.0 + rho * rho) / (1.0 - rho * rho).powi(3);
            let got = angular_mean(rho).unwrap().value;
            assert!(((got - want) / want).abs() < 1e-11, "ρ={rho}");
        }
    }

    #[test]
    fn difference_examples() {
        let d = difference_coeffs(&identity()).unwrap();
        assert!(d.a.iter().all(|&v| v == 1.0));
        let zz = eigenvalue_sequence(&zhao_zheng_symbol(0.0, 0.0).unwrap(), 4).unwrap();
        let d = difference_coeffs(&zz).unwrap();
        assert!((d.a[0] - 0.5).abs() < 1e-15 && (d.a[1] - 5.0 / 6.0).abs() < 1e-15);
        let d = difference_coeffs(&lacunary_operator(4).unwrap()).unwrap();
        assert_eq!(d.a, vec![0.0, -2.0, -1.0, 3.0]);
    }

    #[test]
    fn integral_form_examples() {
        let leb = RadialProfileMeasure::lebesgue();
        for n in 1..50 {
            assert!((a_n_integral_form(&leb, n).unwrap() - 1.0).abs() < 1e-12);
        }
        let t = a_n_terms(&leb, 3).unwrap();
        assert!((t.first - 0.75).abs() < 1e-15 && (t.second - 1.75).abs() < 1e-15);
        // λ_n = (n+1)/(n+2) for f = r²: a_1 = 5/6
        let r2 = RadialProfileMeasure::polynomial(&[0.0, 0.0, 1.0]).unwrap();
        assert!((a_n_integral_form(&r2, 1).unwrap() - 5.0 / 6.0).abs() < 1e-12);
        // λ_n = 2(n+1)/(2n+3) for f = r: a_1 = 2·4/5 - 2/3
        let r = RadialProfileMeasure::polynomial(&[0.0, 1.0]).unwrap();
        assert!((a_n_integral_form(&r, 1).unwrap() - 14.0 / 15.0).abs() < 1e-12);
    }

    #[test]
    fn cesaro_examples() {
        let zz = eigenvalue_sequence(&zhao_zheng_symbol(0.0, 0.0).unwrap(), 200).unwrap();
        let means = cesaro_means(&difference_coeffs(&zz).unwrap());
        for (n, m) in means.iter().enumerate() {
            assert!((m - (n as f64 + 1.0) / (n as f64 + 2.0)).abs() < 1e-12);
        }
        let lac = lacunary_operator(1000).unwrap();
        assert_eq!(cesaro_means(&difference_coeffs(&lac).unwrap()), lac.values());
    }

    #[test]
    fn abel_examples() {
        let a = difference_coeffs(&identity()).unwrap();
        assert!((abel_mean(&a, 0.9, Terms::Auto, &opts()).unwrap().value - 1.0).abs() < 1e-9);
        let lac = lacunary_operator(16).unwrap();
        let ab = abel_mean(&difference_coeffs(&lac).unwrap(), 0.5, Terms::Auto, &opts()).unwrap();
        let se = berezin_series(&lac, 0.5, Terms::Auto, &opts()).unwrap();
        assert!((ab.value - se.value).abs() <= ab.tail_bound + se.tail_bound + 1e-12);
        let zz = eigenvalue_sequence(&zhao_zheng_symbol(-2.0, 1.0).unwrap(), 16).unwrap();
        let v = abel_mean(&difference_coeffs(&zz).unwrap(), 0.99, Terms::Auto, &opts()).unwrap();
        assert!(v.value.abs() < 0.02, "{}", v.value);
    }

    #[test]
    fn boundary_limit_examples() {
        let b = boundary_limit(&identity(), &opts()).unwrap();
        assert_eq!((b.value, b.status), (Some(1.0), LimitStatus::Certified));
        let zz = eigenvalue_sequence(&zhao_zheng_symbol(0.7, -0.2).unwrap(), 16).unwrap();
        let b = boundary_limit(&zz, &opts()).unwrap();
        assert!((b.value.unwrap() - 1.5).abs() < 1e-15);
        let b = boundary_limit(&lacunary_operator(16).unwrap(), &opts()).unwrap();
        assert_eq!(b.status, LimitStatus::Inconclusive);
        assert!(b.abel.last().unwrap().value.abs() < 1e-3);
    }

    #[test]
    fn finite_data_limit_stabilizes() {
        // λ_n = 1/2 + 1/(n+1)², stored only
        let vals: Vec<f64> = (0..(1 << 16)).map(|n| 0.5 + 1.0 / (n as f64 + 1.0).powi(2)).collect();
        let s = EigenvalueSequence::from_values(vals).unwrap().with_sup_bound(1.5);
        let b = boundary_limit(&s, &opts()).unwrap();
        assert_eq!(b.status, LimitStatus::Stabilized, "{}", b.note);
        assert!((b.value.unwrap() - 0.5).abs() < 1e-3);
    }

    #[test]
    fn classify_radial_examples() {
        let o = RadialOptions::default();
        let c = classify_radial(&RadialProfileMeasure::lebesgue(), 1e-8, &o).unwrap();
        assert_eq!(c.classification.verdict, Verdict::Positive);
        assert_eq!(c.boundary_limit.value, Some(1.0));
        let c = classify_radial(&zhao_zheng_symbol(0.0, -0.5).unwrap(), 1e-8, &o).unwrap();
        assert_eq!(c.classification.verdict, Verdict::Positive);
        let a = RadialProfileMeasure::new(vec![], vec![Atom::new(-1.0, 0.5).unwrap()]).unwrap();
        let c = classify_radial(&a, 1e-8, &o).unwrap();
        assert_eq!(c.classification.verdict, Verdict::EssentiallyPositiveOnly);
        assert_eq!(c.boundary_limit.value, Some(0.0));
        let c = classify_radial(&zhao_zheng_symbol(-2.0, 1.0).unwrap(), 1e-8, &o).unwrap();
        assert_eq!(c.classification.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn classify_radial_rejects_non_carleson() {
        let e = RadialProfileMeasure::zero()
            .with_edges(vec![crate::density::EdgeTerm::new(1.0, -0.5).unwrap()])
            .unwrap();
        assert!(matches!(
            classify_radial(&e, 1e-8, &RadialOptions::default()),
            Err(Error::HypothesisNotMet(_))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn telescoping(vals in proptest::collection::vec(-5.0f64..5.0, 1..2000)) {
            let s = EigenvalueSequence::from_values(vals.clone()).unwrap();
            let means = cesaro_means(&difference_coeffs(&s).unwrap());
            for (m, v) in means.iter().zip(&vals) {
                prop_assert!((m - v).abs() <= 1e-12);
            }
        }

        #[test]
        fn abel_matches_series(
            vals in proptest::collection::vec(-1.0f64..1.0, 64),
            tail in -1.0f64..1.0,
            ti in 0usize..3,
        ) {
            let t = [0.5, 0.9, 0.99][ti];
            let s = EigenvalueSequence::from_generator(
                Generator::EventuallyConstant { head: vals, tail }, 64).unwrap();
            let a = abel_mean(&difference_coeffs(&s).unwrap(), t, Terms::Auto, &opts()).unwrap();
            let b = berezin_series(&s, t, Terms::Auto, &opts()).unwrap();
            prop_assert!((a.value - b.value).abs() <= a.tail_bound + b.tail_bound + 1e-11);
        }

        #[test]
        fn nonnegative_measures_have_nonnegative_berezin(
            c in proptest::collection::vec(0.0f64..2.0, 1..5),
            mass in 0.0f64..1.0,
            radius in 0.0f64..0.99,
            t in 0.0f64..0.999,
        ) {
            let m = RadialProfileMeasure::new(c, vec![Atom::new(mass, radius).unwrap()]).unwrap();
            let s = eigenvalue_sequence(&m, 8).unwrap();
            let v = berezin_series(&s, t, Terms::Auto, &opts()).unwrap();
            prop_assert!(v.value >= -v.tail_bound);
        }
    }
}
