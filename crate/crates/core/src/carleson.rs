//! Carleson conditions for radial measures.
//!
//! Two quantities are reported side by side: the annulus quotient
//! `sup_r (1-r²)^{-(2+α)} ν([r, 1))` on a dyadic grid, and the monomial
//! embedding ratio `sup_n m_{2n} / w_n(α)`. For radial measures the second is
//! exactly the norm of the diagonal embedding and decides the pipeline.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::radial::RadialProfileMeasure;

/// Deepest dyadic level: `1 - r = 2^-40`.
pub const GRID_DEPTH: i32 = 40;
const REFINE_POINTS: usize = 8;
const REFINE_ROUNDS: usize = 3;
/// Growth over the last grid points (or moment checkpoints) that counts as divergence.
pub const DIVERGENCE_FACTOR: f64 = 1.5;

fn require_nonnegative(m: &RadialProfileMeasure) -> Result<()> {
    if m.is_nonnegative() {
        Ok(())
    } else {
        Err(Error::NegativeComponent)
    }
}

/// `ν([r, 1))` for a nonnegative measure.
pub fn annulus_mass(m: &RadialProfileMeasure, r: f64) -> Result<f64> {
    require_nonnegative(m)?;
    m.tail_mass(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridValue {
    pub r: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionSup {
    pub alpha: f64,
    /// Largest value found; meaningful as a constant only when not diverging.
    pub sup: f64,
    pub argmax_r: f64,
    pub diverging: bool,
    /// Values at `r_k = 1 - 2^{-k}`, `k = 0..=40`.
    pub dyadic: Vec<GridValue>,
}

fn one_minus_r_sq(r: f64) -> f64 {
    (1.0 - r) * (1.0 + r)
}

fn dyadic_grid(depth: i32) -> Vec<f64> {
    (0..=depth).map(|k| 1.0 - 2f64.powi(-k)).collect()
}

/// Sup of `q(r)` over the dyadic grid, atom radii and local refinements.
fn grid_sup<F: Fn(f64) -> Result<f64>>(
    q: F,
    extra: &[f64],
    depth: i32,
) -> Result<(f64, f64, Vec<GridValue>)> {
    let dyadic: Vec<GridValue> = dyadic_grid(depth)
        .into_iter()
        .map(|r| Ok(GridValue { r, value: q(r)? }))
        .collect::<Result<_>>()?;
    let mut points: Vec<GridValue> = dyadic.clone();
    for &r in extra {
        points.push(GridValue { r, value: q(r)? });
    }
    points.sort_by(|a, b| a.r.total_cmp(&b.r));
    for _ in 0..REFINE_ROUNDS {
        let (i, _) = points
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.value.total_cmp(&b.1.value).then(b.0.cmp(&a.0)))
            .expect("grid is nonempty");
        let lo = points[i.saturating_sub(1)].r;
        let hi = points[(i + 1).min(points.len() - 1)].r;
        if hi <= lo {
            break;
        }
        for j in 1..=REFINE_POINTS {
            let r = lo + (hi - lo) * j as f64 / (REFINE_POINTS + 1) as f64;
            points.push(GridValue { r, value: q(r)? });
        }
        points.sort_by(|a, b| a.r.total_cmp(&b.r));
    }
    let best = points
        .iter()
        .copied()
        .fold(GridValue { r: 0.0, value: 0.0 }, |m, p| if p.value > m.value { p } else { m });
    Ok((best.value, best.r, dyadic))
}

/// Last five dyadic values increasing, with overall growth `≥ 1.5`.
fn dyadic_diverging(dyadic: &[GridValue]) -> bool {
    let tail = &dyadic[dyadic.len() - 5..];
    tail.windows(2).all(|w| w[1].value >= w[0].value)
        && tail[0].value > 0.0
        && tail[4].value / tail[0].value >= DIVERGENCE_FACTOR
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > -1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("weight exponent {alpha} must exceed -1")))
    }
}

/// `sup_r (1-r²)^{-(2+α)} ν([r, 1))`.
pub fn tail_mass_criterion_sup(m: &RadialProfileMeasure, alpha: f64) -> Result<CriterionSup> {
    tail_mass_criterion_sup_depth(m, alpha, GRID_DEPTH)
}

/// [`tail_mass_criterion_sup`] on the grid `1 - 2^{-k}`, `k = 0..=depth`.
pub fn tail_mass_criterion_sup_depth(
    m: &RadialProfileMeasure,
    alpha: f64,
    depth: i32,
) -> Result<CriterionSup> {
    require_nonnegative(m)?;
    check_alpha(alpha)?;
    if !(4..=60).contains(&depth) {
        return Err(Error::InvalidArgument(format!("grid depth {depth} outside 4..=60")));
    }
    let radii: Vec<f64> = m.atoms().iter().map(|a| a.radius).collect();
    let (sup, argmax_r, dyadic) = grid_sup(
        |r| Ok(m.tail_mass(r)?.max(0.0) / one_minus_r_sq(r).powf(2.0 + alpha)),
        &radii,
        depth,
    )?;
    Ok(CriterionSup {
        alpha,
        sup,
        argmax_r,
        diverging: dyadic_diverging(&dyadic),
        dyadic,
    })
}

/// `w_n(α) = ∫_0^1 2r^{2n+1}(1-r²)^α dr` for `n = 0..=n_max`.
pub fn weight_moments(alpha: f64, n_max: usize) -> Vec<f64> {
    let mut w = Vec::with_capacity(n_max + 1);
    let mut v = 1.0 / (alpha + 1.0);
    w.push(v);
    for n in 1..=n_max {
        let nf = n as f64;
        v *= nf / (nf + alpha + 1.0);
        w.push(v);
    }
    w
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioPoint {
    pub n: usize,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentRatio {
    pub alpha: f64,
    pub n_max: usize,
    /// `max_{n ≤ n_max} m_{2n} / w_n(α)`.
    pub sup: f64,
    pub argmax_n: usize,
    pub diverging: bool,
    /// Ratios at `n_max/16`, `n_max/4`, `n_max`.
    pub checkpoints: Vec<RatioPoint>,
    /// Bound valid for every `n` (α = 0 with a closed-form measure).
    pub global_bound: Option<f64>,
}

/// `sup_{n ≤ N} m_{2n} / w_n(α)`, the monomial embedding constant of `A²_α` into `L²(ν)`.
pub fn moment_ratio_sup(m: &RadialProfileMeasure, alpha: f64, n_max: usize) -> Result<MomentRatio> {
    require_nonnegative(m)?;
    check_alpha(alpha)?;
    if n_max < 16 {
        return Err(Error::InvalidArgument("moment ratio needs N ≥ 16".into()));
    }
    let w = weight_moments(alpha, n_max);
    let ratios: Vec<f64> = (0..=n_max)
        .map(|n| Ok(m.disk_moment(n as u64)?.value / w[n]))
        .collect::<Result<_>>()?;
    let (argmax_n, sup) = ratios
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |b, (n, v)| if v > b.1 { (n, v) } else { b });
    let checkpoints: Vec<RatioPoint> = [n_max / 16, n_max / 4, n_max]
        .iter()
        .map(|&n| RatioPoint { n, ratio: ratios[n] })
        .collect();
    let diverging = checkpoints[0].ratio > 0.0
        && checkpoints
            .windows(2)
            .all(|p| p[1].ratio >= DIVERGENCE_FACTOR * p[0].ratio);
    let global_bound = (alpha == 0.0 && m.is_closed_form())
        .then(|| m.sup_bound())
        .flatten();
    Ok(MomentRatio {
        alpha,
        n_max,
        sup: sup.max(0.0),
        argmax_n,
        diverging,
        checkpoints,
        global_bound,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CarlesonReport {
    pub alpha: f64,
    pub tail_mass_criterion: CriterionSup,
    pub moment_ratio: MomentRatio,
    /// Decided by the moment ratio.
    pub is_carleson: bool,
    pub criteria_agree: bool,
}

/// Both criteria for a nonnegative measure (pass `|μ|` for signed ones).
pub fn carleson_report(m: &RadialProfileMeasure, alpha: f64, n_max: usize) -> Result<CarlesonReport> {
    carleson_report_depth(m, alpha, n_max, GRID_DEPTH)
}

pub fn carleson_report_depth(
    m: &RadialProfileMeasure,
    alpha: f64,
    n_max: usize,
    depth: i32,
) -> Result<CarlesonReport> {
    let tail_mass_criterion = tail_mass_criterion_sup_depth(m, alpha, depth)?;
    let moment_ratio = moment_ratio_sup(m, alpha, n_max)?;
    Ok(CarlesonReport {
        alpha,
        is_carleson: !moment_ratio.diverging,
        criteria_agree: tail_mass_criterion.diverging == moment_ratio.diverging,
        tail_mass_criterion,
        moment_ratio,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointwiseComparison {
    pub r: f64,
    /// `(1-r²)^{-3} ∫_r^1 (1-s²) dν`.
    pub weighted: f64,
    /// `(1-r²)^{-2} ν([r, 1))`.
    pub unweighted: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedImplication {
    pub grid: Vec<PointwiseComparison>,
    pub max_violation: f64,
    pub pointwise_holds: bool,
    /// `sup_n (n+1)(n+2) ∫ |w|^{2n}(1-|w|²) dν`.
    pub weighted_ratio_sup: f64,
    /// `sup_n (n+1) m_{2n}`.
    pub unweighted_ratio_sup: f64,
    /// `K` with `weighted ≤ K · unweighted` for every measure.
    pub majorization_constant: f64,
    pub ratio_bound_holds: bool,
    /// Whether `weighted ≤ unweighted` happens to hold; it fails for atoms near the boundary.
    pub ratio_dominated: bool,
}

/// `max_{n ≤ N} min_{j ≤ n} (n+1)(n+2)/(j+1) · sup_ρ ρ^{n-j}(1-ρ)`.
///
/// Dominating `ρ^n(1-ρ)` by one monomial `c ρ^j` bounds each weighted ratio by
/// the unweighted constant times this factor.
pub fn majorization_constant(n_max: usize) -> f64 {
    let peak = |k: usize| {
        // sup_ρ ρ^k (1-ρ) = k^k / (k+1)^{k+1}
        if k == 0 {
            1.0
        } else {
            let k = k as f64;
            (k * (k / (k + 1.0)).ln()).exp() / (k + 1.0)
        }
    };
    (0..=n_max)
        .map(|n| {
            let scale = (n as f64 + 1.0) * (n as f64 + 2.0);
            (0..=n)
                .map(|j| scale * peak(n - j) / (j as f64 + 1.0))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

pub fn weighted_implication_check(m: &RadialProfileMeasure, n_max: usize) -> Result<WeightedImplication> {
    require_nonnegative(m)?;
    let w = m.weighted();
    let mut radii: Vec<f64> = dyadic_grid(GRID_DEPTH);
    radii.extend(m.atoms().iter().map(|a| a.radius));
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    let mut grid = Vec::with_capacity(radii.len());
    let mut max_violation: f64 = 0.0;
    for r in radii {
        let d = one_minus_r_sq(r);
        let weighted = w.tail_mass(r)? / (d * d * d);
        let unweighted = m.tail_mass(r)? / (d * d);
        let excess = weighted - unweighted;
        if excess > 1e-12 * unweighted.abs() + f64::MIN_POSITIVE {
            return Err(Error::Consistency(format!(
                "weighted annulus quotient {weighted} exceeds unweighted {unweighted} at r = {r}"
            )));
        }
        max_violation = max_violation.max(excess / unweighted.abs().max(f64::MIN_POSITIVE));
        grid.push(PointwiseComparison {
            r,
            weighted,
            unweighted,
        });
    }
    // weighted edge terms split into mixed-sign parts of a nonnegative density
    let w_abs = if w.is_nonnegative() { w } else { w.total_variation() };
    let weighted_ratio_sup = moment_ratio_sup(&w_abs, 1.0, n_max)?.sup;
    let unweighted_ratio_sup = moment_ratio_sup(m, 0.0, n_max)?.sup;
    let k = majorization_constant(n_max);
    let slack = 1e-12 * unweighted_ratio_sup.abs() + f64::MIN_POSITIVE;
    Ok(WeightedImplication {
        grid,
        max_violation: max_violation.max(0.0),
        pointwise_holds: true,
        weighted_ratio_sup,
        unweighted_ratio_sup,
        majorization_constant: k,
        ratio_bound_holds: weighted_ratio_sup <= k * unweighted_ratio_sup * (1.0 + 1e-12) + slack,
        ratio_dominated: weighted_ratio_sup <= unweighted_ratio_sup + slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{Atom, EdgeTerm};
    use crate::radial::{disk_to_profile, DiskRadial};

    fn atom(mass: f64, r: f64) -> RadialProfileMeasure {
        RadialProfileMeasure::new(vec![], vec![Atom::new(mass, r).unwrap()]).unwrap()
    }

    #[test]
    fn annulus_examples() {
        let leb = RadialProfileMeasure::lebesgue();
        assert!((annulus_mass(&leb, 0.5).unwrap() - 0.5).abs() < 1e-15);
        let a = atom(1.0, 0.9);
        assert_eq!(annulus_mass(&a, 0.5).unwrap(), 1.0);
        assert_eq!(annulus_mass(&a, 0.95).unwrap(), 0.0);
        let r = RadialProfileMeasure::polynomial(&[0.0, 1.0]).unwrap();
        assert!((annulus_mass(&r, 0.5).unwrap() - 0.375).abs() < 1e-15);
        assert_eq!(annulus_mass(&atom(-1.0, 0.5), 0.1).unwrap_err(), Error::NegativeComponent);
    }

    #[test]
    fn tail_mass_criterion_examples() {
        let c = tail_mass_criterion_sup(&atom(1.0, 0.5), 0.0).unwrap();
        assert!((c.sup - 16.0 / 9.0).abs() < 1e-12, "{}", c.sup);
        assert!(!c.diverging);
        assert!(tail_mass_criterion_sup(&RadialProfileMeasure::lebesgue(), 0.0).unwrap().diverging);
        let z = tail_mass_criterion_sup(&RadialProfileMeasure::zero(), 0.0).unwrap();
        assert_eq!(z.sup, 0.0);
        assert!(!z.diverging);
    }

    #[test]
    fn moment_ratio_examples() {
        let r = moment_ratio_sup(&RadialProfileMeasure::lebesgue(), 0.0, 1024).unwrap();
        assert!((r.sup - 1.0).abs() < 1e-12);
        assert!(!r.diverging);
        let circle = disk_to_profile(&DiskRadial::CircleMass { mass: 1.0, radius: 0.5 }).unwrap();
        let r = moment_ratio_sup(&circle, 0.0, 64).unwrap();
        assert!((r.sup - 1.0).abs() < 1e-15);
        assert_eq!(r.argmax_n, 0);
        let edge = RadialProfileMeasure::zero()
            .with_edges(vec![EdgeTerm::new(1.0, -0.5).unwrap()])
            .unwrap();
        let r = moment_ratio_sup(&edge, 0.0, 1024).unwrap();
        assert!(r.diverging);
        assert_eq!(r.global_bound, None);
    }

    #[test]
    fn weight_moment_closed_forms() {
        let w0 = weight_moments(0.0, 10);
        let w1 = weight_moments(1.0, 10);
        for n in 0..=10 {
            let nf = n as f64;
            assert!((w0[n] - 1.0 / (nf + 1.0)).abs() < 1e-16);
            assert!((w1[n] - 1.0 / ((nf + 1.0) * (nf + 2.0))).abs() < 1e-16);
        }
    }

    #[test]
    fn moment_ratio_equals_lambda_sup() {
        let m = RadialProfileMeasure::new(vec![0.3, 0.0, 1.2], vec![Atom::new(0.4, 0.95).unwrap()]).unwrap();
        let seq = crate::radial::eigenvalue_sequence(&m, 257).unwrap();
        let lam_sup = seq.values().iter().copied().fold(0.0, f64::max);
        let r = moment_ratio_sup(&m, 0.0, 256).unwrap();
        assert!((r.sup - lam_sup).abs() <= 1e-12 * lam_sup);
    }

    #[test]
    fn weighted_implication_examples() {
        for m in [RadialProfileMeasure::lebesgue(), atom(1.0, 0.5)] {
            let w = weighted_implication_check(&m, 256).unwrap();
            assert!(w.pointwise_holds && w.ratio_bound_holds);
        }
        // strict at the atom for r below it
        let w = weighted_implication_check(&atom(1.0, 0.5), 64).unwrap();
        let below = w.grid.iter().find(|p| p.r == 0.0).unwrap();
        assert!(below.weighted < below.unweighted);
    }

    #[test]
    fn boundary_atom_breaks_plain_domination() {
        // circle mass at |w|² = 0.9: weighted ratio beats the unweighted one
        let m = disk_to_profile(&DiskRadial::CircleMass { mass: 1.0, radius: 0.9f64.sqrt() }).unwrap();
        let w = weighted_implication_check(&m, 256).unwrap();
        assert!(!w.ratio_dominated);
        assert!(w.ratio_bound_holds);
        assert!(w.weighted_ratio_sup > 1.4 * w.unweighted_ratio_sup);
    }

    #[test]
    fn majorization_constant_value() {
        assert_eq!(majorization_constant(0), 2.0);
        let k = majorization_constant(1024);
        assert!((2.0..2.0 + 1e-12).contains(&k), "{k}");
    }

    #[test]
    fn lebesgue_first_term() {
        let m = RadialProfileMeasure::lebesgue();
        for n in 1..=1000u64 {
            let d = 2.0 * m.weighted().moment(2 * n - 1).unwrap();
            let nf = n as f64;
            let want = 4.0 * nf * nf / (4.0 * nf * nf + 4.0 * nf);
            assert!((nf * nf * d - want).abs() < 1e-12);
        }
    }
}
