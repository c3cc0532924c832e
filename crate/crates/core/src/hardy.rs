//! Toeplitz operators on the Hardy space with real symbols on the circle.
//!
//! For a real symbol the operator is positive, essentially positive, and has
//! symbol `≥ 0` almost everywhere all at once, so the verdict only depends on
//! the essential infimum of the symbol.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{check_tolerance, Error, Result};
use crate::spectra::classify::{Basis, Certificate, Classification, Verdict};
use crate::spectra::HermitianTruncation;

pub const MAX_BAND: usize = 1024;
pub const REALITY_TOL: f64 = 1e-12;
pub const DFT_AGREEMENT_TOL: f64 = 1e-10;
pub const HULL_TOL: f64 = 1e-8;
const EXTREMUM_TOL: f64 = 1e-12;

/// Real function on the unit circle, given by Fourier coefficients
/// `f_k`, `|k| ≤ K`, and optionally by uniform samples `f(e^{2πij/M})`.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleSymbol {
    /// `f_k` for `k = 0..=K`; negative indices are the conjugates.
    coeffs: Vec<Complex64>,
    samples: Option<Vec<f64>>,
    /// Coefficients came from the samples rather than from the caller.
    sampled_only: bool,
}

fn coefficient(map: &BTreeMap<i64, Complex64>, k: i64) -> Complex64 {
    map.get(&k).copied().unwrap_or_default()
}

fn band_of(map: &BTreeMap<i64, Complex64>) -> Result<usize> {
    let band = map.keys().map(|k| k.unsigned_abs() as usize).max().unwrap_or(0);
    if band > MAX_BAND {
        return Err(Error::InvalidArgument(format!("band {band} exceeds {MAX_BAND}")));
    }
    Ok(band)
}

/// `(1/M) Σ_j f_j e^{-2πijk/M}` for `k = 0..=band`.
fn dft(samples: &[f64], band: usize) -> Vec<Complex64> {
    let m = samples.len() as f64;
    (0..=band)
        .map(|k| {
            let mut re = crate::sum::NeumaierSum::new();
            let mut im = crate::sum::NeumaierSum::new();
            for (j, &v) in samples.iter().enumerate() {
                // reduce jk mod M before scaling so angles stay small
                let phase = -2.0 * PI * ((j * k) % samples.len()) as f64 / m;
                re.add(v * phase.cos());
                im.add(v * phase.sin());
            }
            Complex64::new(re.value() / m, im.value() / m)
        })
        .collect()
}

impl CircleSymbol {
    /// Rejects coefficient sets with `f_{-k} ≠ conj(f_k)` beyond [`REALITY_TOL`].
    pub fn from_fourier(map: &BTreeMap<i64, Complex64>) -> Result<Self> {
        if map.values().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidArgument("non-finite Fourier coefficient".into()));
        }
        let band = band_of(map)?;
        for k in 0..=band as i64 {
            let (p, q) = (coefficient(map, k), coefficient(map, -k));
            let gap = (q - p.conj()).norm();
            if gap > REALITY_TOL {
                return Err(Error::NonRealSymbol(format!(
                    "f_{{-{k}}} = {q} is not the conjugate of f_{k} = {p} (gap {gap:e})"
                )));
            }
        }
        let coeffs = (0..=band as i64)
            .map(|k| {
                let p = coefficient(map, k);
                if k == 0 {
                    Complex64::new(p.re, 0.0)
                } else {
                    p
                }
            })
            .collect();
        Ok(Self {
            coeffs,
            samples: None,
            sampled_only: false,
        })
    }

    /// Real coefficients `f_k = f_{-k} = c_k`: `c_0 + 2 Σ c_k cos kθ`.
    pub fn from_real_cosine(c: &[f64]) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (k, &v) in c.iter().enumerate() {
            map.insert(k as i64, Complex64::new(v, 0.0));
            map.insert(-(k as i64), Complex64::new(v, 0.0));
        }
        Self::from_fourier(&map)
    }

    /// Projects arbitrary coefficients onto real symbols: `(f_k + conj(f_{-k}))/2`.
    pub fn symmetrized(map: &BTreeMap<i64, Complex64>) -> Result<Self> {
        let band = band_of(map)? as i64;
        let sym = (-band..=band)
            .map(|k| (k, 0.5 * (coefficient(map, k) + coefficient(map, -k).conj())))
            .collect();
        Self::from_fourier(&sym)
    }

    /// Samples at `θ_j = 2πj/M`; coefficients for `|k| ≤ M/4` come from the DFT.
    pub fn from_samples(samples: Vec<f64>) -> Result<Self> {
        if samples.len() < 4 {
            return Err(Error::InvalidArgument("need at least 4 samples".into()));
        }
        if let Some((i, &v)) = samples.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index: i, value: v });
        }
        let band = (samples.len() / 4).min(MAX_BAND);
        Ok(Self {
            coeffs: dft(&samples, band),
            samples: Some(samples),
            sampled_only: true,
        })
    }

    /// Attach samples, checking that their DFT reproduces the coefficients.
    pub fn with_samples(mut self, samples: Vec<f64>) -> Result<Self> {
        let band = self.band();
        if 4 * band > samples.len() {
            return Err(Error::InvalidArgument(format!(
                "{} samples cannot resolve band {band} (need M ≥ 4K)",
                samples.len()
            )));
        }
        let got = dft(&samples, band);
        for (k, (g, f)) in got.iter().zip(&self.coeffs).enumerate() {
            if (g - f).norm() > DFT_AGREEMENT_TOL {
                return Err(Error::Consistency(format!(
                    "sample DFT gives f_{k} = {g}, coefficients say {f}"
                )));
            }
        }
        self.samples = Some(samples);
        Ok(self)
    }

    pub fn band(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `f_k` for any integer `k` (zero outside the band).
    pub fn coefficient(&self, k: i64) -> Complex64 {
        match self.coeffs.get(k.unsigned_abs() as usize) {
            Some(&z) if k >= 0 => z,
            Some(&z) => z.conj(),
            None => Complex64::default(),
        }
    }

    pub fn samples(&self) -> Option<&[f64]> {
        self.samples.as_deref()
    }

    pub fn is_sampled_only(&self) -> bool {
        self.sampled_only
    }

    /// `f(e^{iθ}) = f_0 + 2 Σ_{k≥1} Re(f_k e^{ikθ})`.
    pub fn eval(&self, theta: f64) -> f64 {
        let mut acc = crate::sum::NeumaierSum::new();
        acc.add(self.coeffs[0].re);
        for (k, f) in self.coeffs.iter().enumerate().skip(1) {
            let (s, c) = (k as f64 * theta).sin_cos();
            acc.add(2.0 * (f.re * c - f.im * s));
        }
        acc.value()
    }

    /// `df/dθ`.
    pub fn derivative(&self, theta: f64) -> f64 {
        let mut acc = crate::sum::NeumaierSum::new();
        for (k, f) in self.coeffs.iter().enumerate().skip(1) {
            let kf = k as f64;
            let (s, c) = (kf * theta).sin_cos();
            acc.add(-2.0 * kf * (f.re * s + f.im * c));
        }
        acc.value()
    }
}

/// One real value per line; blank lines and `#` comments are skipped.
pub fn parse_samples(text: &str) -> Result<Vec<f64>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| {
            let l = l.trim();
            !l.is_empty() && !l.starts_with('#')
        })
        .map(|(i, l)| {
            let l = l.trim().trim_end_matches(',');
            l.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::InvalidArgument(format!("line {}: not a finite number: {l:?}", i + 1)))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EssentialRangeEstimate {
    pub lower: f64,
    pub upper: f64,
    pub grid_size: usize,
    pub sampled_only: bool,
    pub method: String,
}

fn refine_extremum(s: &CircleSymbol, mut a: f64, mut b: f64) -> Option<f64> {
    let (mut da, db) = (s.derivative(a), s.derivative(b));
    if da == 0.0 {
        return Some(a);
    }
    if db == 0.0 {
        return Some(b);
    }
    if da.signum() == db.signum() {
        return None;
    }
    while b - a > EXTREMUM_TOL {
        let mid = 0.5 * (a + b);
        let dm = s.derivative(mid);
        if dm == 0.0 {
            return Some(mid);
        }
        if dm.signum() == da.signum() {
            a = mid;
            da = dm;
        } else {
            b = mid;
        }
    }
    Some(0.5 * (a + b))
}

/// `[ess inf f, ess sup f]`: grid of `grid_size ≥ 8K` points, each discrete
/// extremum polished by bisection on `f'`. Sampled-only symbols report the
/// sample extremes.
pub fn essential_range_bounds(s: &CircleSymbol, grid_size: usize) -> Result<EssentialRangeEstimate> {
    if s.sampled_only {
        let v = s.samples.as_ref().expect("sampled symbol keeps its samples");
        let lower = v.iter().copied().fold(f64::INFINITY, f64::min);
        let upper = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        return Ok(EssentialRangeEstimate {
            lower,
            upper,
            grid_size: v.len(),
            sampled_only: true,
            method: "sample quantiles at levels 0 and 1; null sets are invisible at sampling resolution"
                .into(),
        });
    }
    let k = s.band();
    if grid_size < 8 * k || grid_size < 8 {
        return Err(Error::InvalidArgument(format!(
            "grid of {grid_size} points is too coarse for band {k} (need ≥ 8K and ≥ 8)"
        )));
    }
    if k == 0 {
        let c = s.coeffs[0].re;
        return Ok(EssentialRangeEstimate {
            lower: c,
            upper: c,
            grid_size,
            sampled_only: false,
            method: "constant symbol".into(),
        });
    }
    let h = 2.0 * PI / grid_size as f64;
    let vals: Vec<f64> = (0..grid_size).map(|j| s.eval(j as f64 * h)).collect();
    let mut lower = f64::INFINITY;
    let mut upper = f64::NEG_INFINITY;
    for j in 0..grid_size {
        let prev = vals[(j + grid_size - 1) % grid_size];
        let next = vals[(j + 1) % grid_size];
        let v = vals[j];
        lower = lower.min(v);
        upper = upper.max(v);
        let is_min = v <= prev && v <= next;
        let is_max = v >= prev && v >= next;
        if is_min || is_max {
            let theta = j as f64 * h;
            if let Some(x) = refine_extremum(s, theta - h, theta + h) {
                let fx = s.eval(x);
                lower = lower.min(fx);
                upper = upper.max(fx);
            }
        }
    }
    Ok(EssentialRangeEstimate {
        lower,
        upper,
        grid_size,
        sampled_only: false,
        method: format!(
            "trigonometric polynomial on {grid_size} points, extrema refined by bisection on f' to {EXTREMUM_TOL:e}"
        ),
    })
}

/// Grid used by [`classify_hardy`].
pub fn default_grid(s: &CircleSymbol) -> usize {
    (16 * s.band()).max(256)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HardyClassification {
    pub classification: Classification,
    pub range: EssentialRangeEstimate,
}

/// Positive iff `ess inf f ≥ -ε`, otherwise not essentially positive; the
/// intermediate verdict cannot occur for real Hardy symbols.
pub fn classify_hardy(s: &CircleSymbol, eps: f64) -> Result<HardyClassification> {
    check_tolerance(eps)?;
    let range = essential_range_bounds(s, default_grid(s))?;
    let verdict = if range.lower >= -eps {
        Verdict::Positive
    } else {
        Verdict::NotEssentiallyPositive
    };
    let mut note = "for real symbols, T_f ≥ 0, T_f essentially positive, and f ≥ 0 a.e. are \
                    equivalent, so only two verdicts are possible"
        .to_string();
    if range.sampled_only {
        note.push_str("; verdict holds up to sampling resolution");
    }
    Ok(HardyClassification {
        classification: Classification {
            verdict,
            certificate: Certificate::EssentialRange {
                lower: range.lower,
                upper: range.upper,
                sampled_only: range.sampled_only,
                note,
            },
            tolerance: eps,
            basis: Basis::SymbolRange,
            heuristic: range.sampled_only,
        },
        range,
    })
}

/// `(T_N)_{jk} = f_{j-k}`, `0 ≤ j, k < N`.
pub fn toeplitz_truncation(s: &CircleSymbol, n: usize) -> Result<HermitianTruncation> {
    if n == 0 {
        return Err(Error::InvalidArgument("truncation size must be at least 1".into()));
    }
    Ok(HermitianTruncation::from_fn(n, |j, k| {
        s.coefficient(j as i64 - k as i64)
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HullEntry {
    pub n: usize,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    /// `min_eigenvalue - lower`.
    pub gap_lower: f64,
    /// `upper - max_eigenvalue`.
    pub gap_upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HullReport {
    pub lower: f64,
    pub upper: f64,
    pub entries: Vec<HullEntry>,
    /// Extremes move outward as `N` grows (nested sections interlace).
    pub monotone: bool,
    /// Convergence of the extremes to the hull is observed, not asserted.
    pub label: &'static str,
}

/// Every truncation eigenvalue must lie in `[lower, upper] ± 1e-8`.
pub fn hull_cross_check(s: &CircleSymbol, sizes: &[usize]) -> Result<HullReport> {
    let range = essential_range_bounds(s, default_grid(s))?;
    let mut entries = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let spec = toeplitz_truncation(s, n)?.eigen()?;
        let (lo, hi) = (spec.min().unwrap_or(0.0), spec.max().unwrap_or(0.0));
        if lo < range.lower - HULL_TOL || hi > range.upper + HULL_TOL {
            return Err(Error::Consistency(format!(
                "T_{n} has eigenvalues in [{lo}, {hi}], outside the range [{}, {}]",
                range.lower, range.upper
            )));
        }
        entries.push(HullEntry {
            n,
            min_eigenvalue: lo,
            max_eigenvalue: hi,
            gap_lower: lo - range.lower,
            gap_upper: range.upper - hi,
        });
    }
    let mut order: Vec<usize> = (0..entries.len()).collect();
    order.sort_by_key(|&i| entries[i].n);
    let monotone = order.windows(2).all(|w| {
        let (a, b) = (&entries[w[0]], &entries[w[1]]);
        b.min_eigenvalue <= a.min_eigenvalue + HULL_TOL && b.max_eigenvalue >= a.max_eigenvalue - HULL_TOL
    });
    Ok(HullReport {
        lower: range.lower,
        upper: range.upper,
        entries,
        monotone,
        label: "heuristic",
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn one() -> CircleSymbol {
        CircleSymbol::from_real_cosine(&[1.0]).unwrap()
    }
    fn cos() -> CircleSymbol {
        CircleSymbol::from_real_cosine(&[0.0, 0.5]).unwrap()
    }
    fn one_plus_cos() -> CircleSymbol {
        CircleSymbol::from_real_cosine(&[1.0, 0.5]).unwrap()
    }

    #[test]
    fn range_examples() {
        let r = essential_range_bounds(&one(), 8).unwrap();
        assert_eq!((r.lower, r.upper), (1.0, 1.0));
        let r = essential_range_bounds(&cos(), 64).unwrap();
        assert!((r.lower + 1.0).abs() < 1e-12 && (r.upper - 1.0).abs() < 1e-12);
        let r = essential_range_bounds(&one_plus_cos(), 64).unwrap();
        assert!(r.lower.abs() < 1e-12 && (r.upper - 2.0).abs() < 1e-12);
        assert!(essential_range_bounds(&cos(), 4).is_err());
    }

    #[test]
    fn off_grid_extremum_is_found() {
        // cos(θ - 0.3): extrema at 0.3 and 0.3 + π, between grid nodes
        let mut map = BTreeMap::new();
        map.insert(1, Complex64::from_polar(0.5, -0.3));
        map.insert(-1, Complex64::from_polar(0.5, 0.3));
        let s = CircleSymbol::from_fourier(&map).unwrap();
        let r = essential_range_bounds(&s, 8).unwrap();
        assert!((r.lower + 1.0).abs() < 1e-12 && (r.upper - 1.0).abs() < 1e-12);
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_hardy(&one(), 1e-8).unwrap().classification.verdict, Verdict::Positive);
        assert_eq!(
            classify_hardy(&cos(), 1e-8).unwrap().classification.verdict,
            Verdict::NotEssentiallyPositive
        );
        assert_eq!(
            classify_hardy(&one_plus_cos(), 1e-8).unwrap().classification.verdict,
            Verdict::Positive
        );
    }

    #[test]
    fn non_real_rejected() {
        let mut map = BTreeMap::new();
        map.insert(1, Complex64::new(0.5, 0.0));
        map.insert(-1, Complex64::new(0.25, 0.0));
        assert!(matches!(CircleSymbol::from_fourier(&map), Err(Error::NonRealSymbol(_))));
        let mut map = BTreeMap::new();
        map.insert(0, Complex64::new(1.0, 0.5));
        assert!(matches!(CircleSymbol::from_fourier(&map), Err(Error::NonRealSymbol(_))));
    }

    #[test]
    fn truncation_examples() {
        let t = toeplitz_truncation(&one(), 3).unwrap();
        for j in 0..3 {
            for k in 0..3 {
                assert_eq!(t.get(j, k).re, if j == k { 1.0 } else { 0.0 });
            }
        }
        let t = toeplitz_truncation(&cos(), 3).unwrap();
        assert_eq!(t.get(0, 1).re, 0.5);
        assert_eq!(t.get(0, 2).re, 0.0);
        assert_eq!(t.get(1, 1).re, 0.0);
        let e = toeplitz_truncation(&one_plus_cos(), 2).unwrap().eigen().unwrap();
        assert!((e.values[0] - 0.5).abs() < 1e-15 && (e.values[1] - 1.5).abs() < 1e-15);
    }

    #[test]
    fn tridiagonal_spectrum() {
        let e = toeplitz_truncation(&cos(), 9).unwrap().eigen().unwrap();
        let mut want: Vec<f64> = (1..=9).map(|k| (k as f64 * PI / 10.0).cos()).collect();
        want.sort_by(f64::total_cmp);
        for (g, w) in e.values.iter().zip(&want) {
            assert!((g - w).abs() < 1e-12);
        }
        let h = hull_cross_check(&one_plus_cos(), &[9]).unwrap();
        assert!(h.entries[0].min_eigenvalue >= 0.0);
    }

    #[test]
    fn hull_report_is_monotone() {
        let s = CircleSymbol::from_real_cosine(&[0.2, -0.3, 0.1, 0.25]).unwrap();
        let h = hull_cross_check(&s, &[4, 8, 16, 32, 64]).unwrap();
        assert!(h.monotone);
        assert!(h.entries.iter().all(|e| e.gap_lower >= -HULL_TOL && e.gap_upper >= -HULL_TOL));
    }

    #[test]
    fn samples_roundtrip() {
        let m = 64;
        let samples: Vec<f64> = (0..m).map(|j| 1.0 + (2.0 * PI * j as f64 / m as f64).cos()).collect();
        let s = one_plus_cos().with_samples(samples.clone()).unwrap();
        assert!(s.samples().is_some());
        let only = CircleSymbol::from_samples(samples).unwrap();
        assert!((only.coefficient(1).re - 0.5).abs() < 1e-12);
        assert!((only.coefficient(0).re - 1.0).abs() < 1e-12);
        let c = classify_hardy(&only, 1e-8).unwrap();
        assert!(c.classification.heuristic);
        let bad: Vec<f64> = (0..m).map(|j| (2.0 * PI * j as f64 / m as f64).cos()).collect();
        assert!(matches!(one_plus_cos().with_samples(bad), Err(Error::Consistency(_))));
    }

    #[test]
    fn sample_text_parsing() {
        assert_eq!(parse_samples("1\n# c\n\n-2.5e0\n").unwrap(), vec![1.0, -2.5]);
        assert!(parse_samples("1\nx\n").is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn symmetrized_is_real(
            coeffs in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..8),
        ) {
            let band = coeffs.len() as i64 - 1;
            let mut map = BTreeMap::new();
            // independent values at ±k
            for (i, &(a, b)) in coeffs.iter().enumerate() {
                map.insert(i as i64, Complex64::new(a, b));
                map.insert(i as i64 - band - 1, Complex64::new(b, -a));
            }
            let s = CircleSymbol::symmetrized(&map).unwrap();
            for k in 0..=band {
                prop_assert!((s.coefficient(-k) - s.coefficient(k).conj()).norm() <= REALITY_TOL);
            }
        }

        #[test]
        fn range_matches_dense_grid(c in proptest::collection::vec(-1.0f64..1.0, 1..6)) {
            let s = CircleSymbol::from_real_cosine(&c).unwrap();
            let r = essential_range_bounds(&s, default_grid(&s)).unwrap();
            let dense: Vec<f64> = (0..20000).map(|j| s.eval(2.0 * PI * j as f64 / 20000.0)).collect();
            let lo = dense.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = dense.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(r.lower <= lo + 1e-12 && r.lower >= lo - 1e-5);
            prop_assert!(r.upper >= hi - 1e-12 && r.upper <= hi + 1e-5);
        }
    }
}
