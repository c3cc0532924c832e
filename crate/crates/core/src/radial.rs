//! Radial measures on the disk and the diagonal of their Bergman-space
//! Toeplitz operators.
//!
//! A measure is stored in profile form: a signed measure `dm(r)` on `[0, 1)`
//! with `λ_n = 2(n+1) ∫ r^{2n+1} dm(r)`. The density is a sum of a polynomial,
//! boundary terms `c(1-r)^β` and an optional tabulated part, plus point masses.
//! Disk-convention inputs go through [`disk_to_profile`].

use serde::Serialize;

use crate::density::{
    horner, poly_mass_to_one, poly_moment_on, sign_change_roots, sign_pieces, taylor_at_one,
    times_one_minus_square, trim, Atom, EdgeTerm, SampledDensity, SignedPiece, MAX_POLY_DEGREE,
};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, Tolerance};
use crate::spectra::{EigenvalueSequence, Generator, RadialTerms};
use crate::sum::NeumaierSum;

/// Relative tolerance for moments that need quadrature.
pub const MOMENT_QUAD_TOL: f64 = 1e-10;
const MOMENT_QUAD_INTERVALS: usize = 4000;

/// How the stored components make up the density.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum DensityForm {
    /// `p(r) + Σ edges + sampled(r)·(1-r²)^w`.
    Plain,
    /// `sign_i · p(r)` on each piece; no other components.
    Pieces { pieces: Vec<SignedPiece> },
    /// Pointwise modulus of the plain sum.
    Modulus,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialProfileMeasure {
    poly: Vec<f64>,
    edges: Vec<EdgeTerm>,
    sampled: Option<SampledDensity>,
    /// Power of `(1-r²)` multiplying the tabulated part.
    sampled_weight: u32,
    atoms: Vec<Atom>,
    form: DensityForm,
}

fn check_atoms(mut atoms: Vec<Atom>) -> Result<Vec<Atom>> {
    atoms.sort_by(|a, b| a.radius.total_cmp(&b.radius));
    if let Some(w) = atoms.windows(2).find(|w| w[0].radius == w[1].radius) {
        return Err(Error::InvalidMeasure(format!(
            "duplicate atom radius {}",
            w[0].radius
        )));
    }
    Ok(atoms)
}

fn check_poly(poly: Vec<f64>) -> Result<Vec<f64>> {
    if let Some((i, &v)) = poly.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFinite { index: i, value: v });
    }
    let poly = trim(poly);
    if poly.len() > MAX_POLY_DEGREE + 1 {
        return Err(Error::InvalidMeasure(format!(
            "polynomial degree {} exceeds {MAX_POLY_DEGREE}",
            poly.len() - 1
        )));
    }
    Ok(poly)
}

/// `(1-r)^β (1-r²) = 2(1-r)^{β+1} - (1-r)^{β+2}`.
fn weighted_edges(edges: &[EdgeTerm]) -> Vec<EdgeTerm> {
    edges
        .iter()
        .flat_map(|e| {
            [
                EdgeTerm {
                    coeff: 2.0 * e.coeff,
                    exponent: e.exponent + 1.0,
                },
                EdgeTerm {
                    coeff: -e.coeff,
                    exponent: e.exponent + 2.0,
                },
            ]
        })
        .collect()
}

impl RadialProfileMeasure {
    /// Polynomial density `Σ c_j r^j` plus atoms.
    pub fn new(poly: Vec<f64>, atoms: Vec<Atom>) -> Result<Self> {
        Ok(Self {
            poly: check_poly(poly)?,
            edges: Vec::new(),
            sampled: None,
            sampled_weight: 0,
            atoms: check_atoms(atoms)?,
            form: DensityForm::Plain,
        })
    }

    pub fn polynomial(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.to_vec(), Vec::new())
    }

    pub fn zero() -> Self {
        Self::new(Vec::new(), Vec::new()).expect("empty measure is valid")
    }

    /// `dm = dr`, the profile of normalized area measure.
    pub fn lebesgue() -> Self {
        Self::polynomial(&[1.0]).expect("constant density is valid")
    }

    pub fn with_edges(mut self, edges: Vec<EdgeTerm>) -> Result<Self> {
        self.require_plain()?;
        self.edges.extend(edges);
        Ok(self)
    }

    pub fn with_sampled(mut self, sampled: SampledDensity) -> Result<Self> {
        self.require_plain()?;
        if self.sampled.is_some() {
            return Err(Error::InvalidMeasure("only one sampled density per measure".into()));
        }
        self.sampled = Some(sampled);
        Ok(self)
    }

    fn require_plain(&self) -> Result<()> {
        match self.form {
            DensityForm::Plain => Ok(()),
            _ => Err(Error::InvalidArgument(
                "operation needs a measure in plain (signed) form".into(),
            )),
        }
    }

    pub fn poly(&self) -> &[f64] {
        &self.poly
    }

    pub fn edges(&self) -> &[EdgeTerm] {
        &self.edges
    }

    pub fn sampled(&self) -> Option<&SampledDensity> {
        self.sampled.as_ref()
    }

    /// Sorted by radius.
    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn form(&self) -> &DensityForm {
        &self.form
    }

    /// Polynomial and atoms only: moments are closed form.
    pub fn is_closed_form(&self) -> bool {
        self.edges.is_empty() && self.sampled.is_none() && self.form != DensityForm::Modulus
    }

    fn plain_density(&self, r: f64) -> f64 {
        let mut v = horner(&self.poly, r);
        for e in &self.edges {
            v += e.eval(r);
        }
        if let Some(s) = &self.sampled {
            v += s.eval(r) * (1.0 - r * r).powi(self.sampled_weight as i32);
        }
        v
    }

    /// Density of the absolutely continuous part at `r ∈ [0, 1)`.
    pub fn density(&self, r: f64) -> f64 {
        match &self.form {
            DensityForm::Plain => self.plain_density(r),
            DensityForm::Pieces { pieces } => {
                let sign = pieces
                    .iter()
                    .find(|p| r <= p.hi)
                    .or(pieces.last())
                    .map_or(1.0, |p| p.sign);
                sign * horner(&self.poly, r)
            }
            DensityForm::Modulus => self.plain_density(r).abs(),
        }
    }

    /// Points where the density may have kinks or peaks, for quadrature.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = (1..=40).map(|k| 1.0 - 2f64.powi(-k)).collect();
        if let Some(s) = &self.sampled {
            b.extend_from_slice(s.grid());
        }
        if self.edges.is_empty() && self.sampled.is_none() {
            b.extend(sign_change_roots(&self.poly));
        }
        if let DensityForm::Pieces { pieces } = &self.form {
            b.extend(pieces.iter().map(|p| p.hi));
        }
        b.extend(self.atoms.iter().map(|a| a.radius));
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    fn quad_density_moment(&self, k: u64, lo: f64, f: impl Fn(f64) -> f64) -> Result<f64> {
        let kf = k as f64;
        let res = integrate(
            |r| if r == 0.0 && k > 0 { 0.0 } else { r.powf(kf) * f(r) },
            lo,
            1.0,
            &self.breakpoints(),
            Tolerance {
                abs: 1e-300,
                rel: MOMENT_QUAD_TOL,
            },
            MOMENT_QUAD_INTERVALS,
        )?;
        Ok(res.value)
    }

    /// `∫_0^1 r^k f(r) dr` for the absolutely continuous part.
    fn density_moment(&self, k: u64) -> Result<f64> {
        let mut acc = NeumaierSum::new();
        match &self.form {
            DensityForm::Plain => {
                acc.add(poly_moment_on(&self.poly, k, 0.0, 1.0));
                for e in &self.edges {
                    acc.add(e.moment(k));
                }
                if let Some(s) = &self.sampled {
                    let w = self.sampled_weight as i32;
                    acc.add(self.quad_density_moment(k, 0.0, |r| {
                        s.eval(r) * (1.0 - r * r).powi(w)
                    })?);
                }
            }
            DensityForm::Pieces { pieces } => {
                for p in pieces {
                    acc.add(p.sign * poly_moment_on(&self.poly, k, p.lo, p.hi));
                }
            }
            DensityForm::Modulus => {
                acc.add(self.quad_density_moment(k, 0.0, |r| self.plain_density(r).abs())?);
            }
        }
        Ok(acc.value())
    }

    /// `∫_0^1 r^k dm(r)`.
    pub fn moment(&self, k: u64) -> Result<f64> {
        let mut acc = NeumaierSum::new();
        acc.add(self.density_moment(k)?);
        for a in &self.atoms {
            acc.add(a.mass * a.radius.powf(k as f64));
        }
        Ok(acc.value())
    }

    /// `m_{2n} = ∫_𝔻 |w|^{2n} dμ = 2 ∫ r^{2n+1} dm(r)`.
    pub fn disk_moment(&self, n: u64) -> Result<DiskMoment> {
        Ok(DiskMoment {
            order: 2 * n,
            value: 2.0 * self.moment(2 * n + 1)?,
        })
    }

    /// Signed mass of `[r, 1)`.
    pub fn tail_mass(&self, r: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::Domain(format!("radius {r} outside [0, 1)")));
        }
        let mut acc = NeumaierSum::new();
        match &self.form {
            DensityForm::Plain => {
                acc.add(poly_mass_to_one(&taylor_at_one(&self.poly), r));
                for e in &self.edges {
                    acc.add(e.mass_to_one(r));
                }
                if let Some(s) = &self.sampled {
                    let w = self.sampled_weight as i32;
                    acc.add(self.quad_density_moment(0, r, |x| s.eval(x) * (1.0 - x * x).powi(w))?);
                }
            }
            DensityForm::Pieces { pieces } => {
                let taylor = taylor_at_one(&self.poly);
                for p in pieces.iter().filter(|p| p.hi > r) {
                    let lo = p.lo.max(r);
                    let mass = if p.hi >= 1.0 {
                        poly_mass_to_one(&taylor, lo)
                    } else {
                        poly_moment_on(&self.poly, 0, lo, p.hi)
                    };
                    acc.add(p.sign * mass);
                }
            }
            DensityForm::Modulus => {
                acc.add(self.quad_density_moment(0, r, |x| self.plain_density(x).abs())?);
            }
        }
        for a in self.atoms.iter().filter(|a| a.radius >= r) {
            acc.add(a.mass);
        }
        Ok(acc.value())
    }

    /// The total variation `|μ|`: pointwise modulus of the density plus `|m_i|`.
    pub fn total_variation(&self) -> Self {
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom {
                mass: a.mass.abs(),
                radius: a.radius,
            })
            .collect();
        let form = match &self.form {
            DensityForm::Pieces { pieces } => DensityForm::Pieces {
                pieces: pieces.clone(),
            },
            DensityForm::Modulus => DensityForm::Modulus,
            DensityForm::Plain if self.edges.is_empty() && self.sampled.is_none() => {
                DensityForm::Pieces {
                    pieces: sign_pieces(&self.poly),
                }
            }
            DensityForm::Plain
                if self.poly.is_empty()
                    && self.sampled.is_none()
                    && (self.edges.iter().all(|e| e.coeff >= 0.0)
                        || self.edges.iter().all(|e| e.coeff <= 0.0)) =>
            {
                // a single-signed sum of boundary terms stays closed form
                return Self {
                    edges: self
                        .edges
                        .iter()
                        .map(|e| EdgeTerm {
                            coeff: e.coeff.abs(),
                            exponent: e.exponent,
                        })
                        .collect(),
                    atoms,
                    ..self.clone()
                };
            }
            DensityForm::Plain => DensityForm::Modulus,
        };
        Self {
            atoms,
            form,
            ..self.clone()
        }
    }

    /// `(1-r²) dm(r)`.
    pub fn weighted(&self) -> Self {
        Self {
            poly: times_one_minus_square(&self.poly),
            edges: weighted_edges(&self.edges),
            sampled: self.sampled.clone(),
            sampled_weight: self.sampled_weight + u32::from(self.sampled.is_some()),
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    mass: a.mass * (1.0 - a.radius * a.radius),
                    radius: a.radius,
                })
                .collect(),
            form: self.form.clone(),
        }
    }

    /// Checked componentwise: a mixed-sign sum that happens to be nonnegative
    /// reports `false`; its total variation reports `true`.
    pub fn is_nonnegative(&self) -> bool {
        let atoms = self.atoms.iter().all(|a| a.mass >= 0.0);
        let density = match &self.form {
            DensityForm::Pieces { .. } | DensityForm::Modulus => true,
            DensityForm::Plain => {
                sign_pieces(&self.poly).iter().all(|p| p.sign > 0.0)
                    && self.edges.iter().all(|e| e.coeff >= 0.0)
                    && self.sampled.as_ref().is_none_or(|s| s.is_nonnegative())
            }
        };
        atoms && density
    }

    /// `α·self + β·other`; both must be in plain form.
    pub fn linear_combination(&self, alpha: f64, other: &Self, beta: f64) -> Result<Self> {
        self.require_plain()?;
        other.require_plain()?;
        if self.sampled.is_some() && other.sampled.is_some() {
            return Err(Error::InvalidArgument(
                "cannot combine two sampled densities".into(),
            ));
        }
        let n = self.poly.len().max(other.poly.len());
        let poly = (0..n)
            .map(|j| {
                alpha * self.poly.get(j).copied().unwrap_or(0.0)
                    + beta * other.poly.get(j).copied().unwrap_or(0.0)
            })
            .collect();
        let mut atoms: Vec<Atom> = Vec::new();
        for (a, s) in self
            .atoms
            .iter()
            .map(|a| (a, alpha))
            .chain(other.atoms.iter().map(|a| (a, beta)))
        {
            match atoms.iter_mut().find(|b| b.radius == a.radius) {
                Some(b) => b.mass += s * a.mass,
                None => atoms.push(Atom {
                    mass: s * a.mass,
                    radius: a.radius,
                }),
            }
        }
        let scale_edges = |es: &[EdgeTerm], s: f64| {
            es.iter()
                .map(|e| EdgeTerm {
                    coeff: s * e.coeff,
                    exponent: e.exponent,
                })
                .collect::<Vec<_>>()
        };
        let mut edges = scale_edges(&self.edges, alpha);
        edges.extend(scale_edges(&other.edges, beta));
        let (sampled, weight) = match (&self.sampled, &other.sampled) {
            (Some(s), None) => (Some(scale_sampled(s, alpha)?), self.sampled_weight),
            (None, Some(s)) => (Some(scale_sampled(s, beta)?), other.sampled_weight),
            _ => (None, 0),
        };
        Ok(Self {
            poly: check_poly(poly)?,
            edges,
            sampled,
            sampled_weight: weight,
            atoms: check_atoms(atoms)?,
            form: DensityForm::Plain,
        })
    }

    fn generator(&self) -> Option<Generator> {
        if !self.is_closed_form() {
            return None;
        }
        let pieces = match &self.form {
            DensityForm::Pieces { pieces } => pieces.clone(),
            _ => vec![SignedPiece {
                lo: 0.0,
                hi: 1.0,
                sign: 1.0,
            }],
        };
        Some(Generator::Radial(RadialTerms {
            poly: self.poly.clone(),
            pieces,
            atoms: self.atoms.clone(),
        }))
    }

    /// `sup_n |λ_n|` bound when the density is bounded.
    pub fn sup_bound(&self) -> Option<f64> {
        let mut b: f64 = self.poly.iter().map(|c| c.abs()).sum();
        for e in &self.edges {
            if e.coeff != 0.0 && e.exponent < 0.0 {
                return None;
            }
            b += e.coeff.abs();
        }
        if let Some(s) = &self.sampled {
            b += s.sup_abs();
        }
        Some(
            b + self
                .atoms
                .iter()
                .map(|a| a.mass.abs() * a.eigenvalue_envelope())
                .sum::<f64>(),
        )
    }
}

fn scale_sampled(s: &SampledDensity, k: f64) -> Result<SampledDensity> {
    SampledDensity::new(s.grid().to_vec(), s.values().iter().map(|v| k * v).collect())
}

/// Even disk moment `m_{2n} = ∫_𝔻 |w|^{2n} dμ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiskMoment {
    pub order: u64,
    pub value: f64,
}

/// `λ_n = 2(n+1) ∫ r^{2n+1} dm(r)` for `n < len`. Closed-form measures get a
/// generator; others carry a sup bound when their density is bounded.
pub fn eigenvalue_sequence(m: &RadialProfileMeasure, len: usize) -> Result<EigenvalueSequence> {
    if len == 0 {
        return Err(Error::InvalidArgument("sequence length must be at least 1".into()));
    }
    if let Some(g) = m.generator() {
        return EigenvalueSequence::from_generator(g, len);
    }
    let values = (0..len)
        .map(|n| Ok(2.0 * (n as f64 + 1.0) * m.moment(2 * n as u64 + 1)?))
        .collect::<Result<Vec<f64>>>()?;
    let seq = EigenvalueSequence::from_values(values)?;
    Ok(match m.sup_bound() {
        Some(b) => seq.with_sup_bound(b),
        None => seq,
    })
}

/// Density `r² + a r + b`.
pub fn zhao_zheng_symbol(a: f64, b: f64) -> Result<RadialProfileMeasure> {
    RadialProfileMeasure::polynomial(&[b, a, 1.0])
}

/// `λ_n = -1` for `n ∈ {1, 2, 4, …}`, `0` otherwise.
pub fn lacunary_operator(len: usize) -> Result<EigenvalueSequence> {
    EigenvalueSequence::from_generator(Generator::Lacunary, len)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Boundedness {
    /// `max |λ_n|` over stored values.
    pub sup_stored: f64,
    /// Known limit of `λ_n`, if any.
    pub limit: Option<f64>,
    /// `max(sup_stored, |limit|)`: the supremum when the tail approaches its limit monotonically.
    pub sup: f64,
    /// Bound valid at every index, when known.
    pub rigorous_bound: Option<f64>,
}

pub fn boundedness_check(seq: &EigenvalueSequence) -> Boundedness {
    let sup_stored = seq.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let limit = seq
        .tail()
        .and_then(|t| t.limit())
        .or(seq.known_limit().map(|k| k.value));
    Boundedness {
        sup_stored,
        limit,
        sup: limit.map_or(sup_stored, |l| sup_stored.max(l.abs())),
        rigorous_bound: seq.sup_bound(),
    }
}

/// Radial data in disk convention (normalized area measure `dA`).
#[derive(Debug, Clone, PartialEq)]
pub enum DiskRadial {
    /// `f(|w|) dA(w)` with `f(r) = Σ c_j r^j`.
    Density(Vec<f64>),
    /// Total mass `mass` spread uniformly on the circle `|w| = radius > 0`.
    CircleMass { mass: f64, radius: f64 },
}

/// Profile measure with the same Toeplitz operator.
///
/// A density keeps its coefficients; a circle mass `c` at `r₀` becomes a
/// profile atom `c/(2r₀)`. A mass at the centre has no profile form: use
/// [`center_mass_sequence`].
pub fn disk_to_profile(d: &DiskRadial) -> Result<RadialProfileMeasure> {
    match d {
        DiskRadial::Density(c) => RadialProfileMeasure::polynomial(c),
        DiskRadial::CircleMass { mass, radius } => {
            if *radius == 0.0 {
                return Err(Error::Domain(
                    "circle mass at radius 0: use the centre-mass sequence instead".into(),
                ));
            }
            let atom = Atom::new(mass / (2.0 * radius), *radius)?;
            RadialProfileMeasure::new(Vec::new(), vec![atom])
        }
    }
}

/// `c δ_0` on the disk: `m_{2n} = c δ_{n,0}`, so `λ = (c, 0, 0, …)`.
pub fn center_mass_sequence(c: f64, len: usize) -> Result<EigenvalueSequence> {
    EigenvalueSequence::from_generator(
        Generator::EventuallyConstant {
            head: vec![c],
            tail: 0.0,
        },
        len,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn moment_examples() {
        assert!(close(RadialProfileMeasure::lebesgue().moment(3).unwrap(), 0.25, 1e-15));
        let m = RadialProfileMeasure::polynomial(&[1.0, -2.0, 1.0]).unwrap();
        assert!(close(m.moment(1).unwrap(), 1.0 / 12.0, 1e-14));
        let a = RadialProfileMeasure::new(vec![], vec![Atom::new(-1.0, 0.5).unwrap()]).unwrap();
        assert_eq!(a.moment(5).unwrap(), -1.0 / 32.0);
    }

    #[test]
    fn eigenvalue_examples() {
        let s = eigenvalue_sequence(&RadialProfileMeasure::polynomial(&[0.0, 1.0]).unwrap(), 4).unwrap();
        assert!(close(s.values()[0], 2.0 / 3.0, 1e-15));
        assert!(close(s.values()[1], 0.8, 1e-15));
        let a = RadialProfileMeasure::new(vec![], vec![Atom::new(-1.0, 0.5).unwrap()]).unwrap();
        let s = eigenvalue_sequence(&a, 3).unwrap();
        assert_eq!(s.values(), &[-1.0, -0.5, -3.0 / 16.0]);
    }

    #[test]
    fn zhao_zheng_closed_form() {
        for &(a, b) in &[(0.0, 0.0), (-2.0, 1.0), (0.0, -0.5), (1.3, -0.7)] {
            let s = eigenvalue_sequence(&zhao_zheng_symbol(a, b).unwrap(), 50).unwrap();
            for (n, &v) in s.values().iter().enumerate() {
                let n = n as f64;
                let want = (n + 1.0) / (n + 2.0) + 2.0 * a * (n + 1.0) / (2.0 * n + 3.0) + b;
                assert!((v - want).abs() < 1e-14, "a={a} b={b} n={n}");
            }
        }
        let s = eigenvalue_sequence(&zhao_zheng_symbol(0.0, -0.5).unwrap(), 1).unwrap();
        assert!(s.values()[0].abs() < 1e-15);
        let far = s.value(1_000_000).unwrap();
        let s = eigenvalue_sequence(&zhao_zheng_symbol(-2.0, 1.0).unwrap(), 1).unwrap();
        assert!(s.value(1_000_000).unwrap().abs() < 1e-5);
        assert!((far - 0.5).abs() < 1e-5);
    }

    #[test]
    fn lacunary_values() {
        let s = lacunary_operator(8).unwrap();
        assert_eq!(s.values()[0], 0.0);
        assert_eq!(s.values()[4], -1.0);
        assert_eq!(s.values()[6], 0.0);
    }

    #[test]
    fn boundedness_examples() {
        let one = eigenvalue_sequence(&RadialProfileMeasure::lebesgue(), 100).unwrap();
        assert_eq!(boundedness_check(&one).sup, 1.0);
        assert_eq!(boundedness_check(&lacunary_operator(100).unwrap()).sup, 1.0);
        let r = eigenvalue_sequence(&RadialProfileMeasure::polynomial(&[0.0, 1.0]).unwrap(), 100).unwrap();
        let b = boundedness_check(&r);
        assert!(b.sup_stored < 1.0);
        assert_eq!(b.sup, 1.0);
    }

    #[test]
    fn disk_conversion() {
        let m = disk_to_profile(&DiskRadial::Density(vec![1.0])).unwrap();
        assert_eq!(m, RadialProfileMeasure::lebesgue());
        let m = disk_to_profile(&DiskRadial::CircleMass {
            mass: 1.0,
            radius: 0.5,
        })
        .unwrap();
        assert_eq!(m.atoms(), &[Atom::new(1.0, 0.5).unwrap()]);
        let m = disk_to_profile(&DiskRadial::Density(vec![0.0, 0.0, 1.0])).unwrap();
        let s = eigenvalue_sequence(&m, 10).unwrap();
        for (n, v) in s.values().iter().enumerate() {
            assert!(close(*v, (n as f64 + 1.0) / (n as f64 + 2.0), 1e-15));
        }
        assert!(disk_to_profile(&DiskRadial::CircleMass {
            mass: 1.0,
            radius: 0.0
        })
        .is_err());
        assert_eq!(center_mass_sequence(2.0, 3).unwrap().values(), &[2.0, 0.0, 0.0]);
    }

    #[test]
    fn circle_mass_matches_disk_moments() {
        // circle mass c at r0: m_{2n} = c r0^{2n}
        let (c, r0) = (0.7, 0.83);
        let m = disk_to_profile(&DiskRadial::CircleMass { mass: c, radius: r0 }).unwrap();
        let s = eigenvalue_sequence(&m, 201).unwrap();
        for n in 0..=200 {
            let want = (n as f64 + 1.0) * c * r0.powi(2 * n as i32);
            assert!((s.values()[n] - want).abs() <= 1e-10 * want.max(1e-300) + 1e-300);
        }
    }

    #[test]
    fn rejects_bad_measures() {
        assert!(RadialProfileMeasure::new(vec![], vec![Atom::new(1.0, 0.3).unwrap(), Atom::new(2.0, 0.3).unwrap()]).is_err());
        assert!(Atom::new(1.0, 1.0).is_err());
        assert!(RadialProfileMeasure::polynomial(&vec![1.0; 66]).is_err());
        assert!(RadialProfileMeasure::polynomial(&[f64::INFINITY]).is_err());
    }

    #[test]
    fn total_variation_of_polynomial_is_exact() {
        // |2r - 1|: ∫ r |2r-1| dr = 1/4
        let m = RadialProfileMeasure::polynomial(&[-1.0, 2.0]).unwrap();
        let tv = m.total_variation();
        assert!(close(tv.moment(1).unwrap(), 0.25, 1e-12));
        assert!(tv.is_nonnegative());
        assert!(!m.is_nonnegative());
        // pointwise modulus by quadrature agrees
        let mixed = m.clone().with_edges(vec![EdgeTerm::new(0.0, 0.5).unwrap()]).unwrap();
        let tvq = mixed.total_variation();
        assert_eq!(tvq.form(), &DensityForm::Modulus);
        assert!(close(tvq.moment(1).unwrap(), 0.25, 1e-10));
    }

    #[test]
    fn sampled_density_moment() {
        let grid: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
        let vals = grid.iter().map(|x| 1.0 - x).collect();
        let m = RadialProfileMeasure::zero()
            .with_sampled(SampledDensity::new(grid, vals).unwrap())
            .unwrap();
        // ∫ r^3 (1 - r) dr = 1/20
        assert!(close(m.moment(3).unwrap(), 0.05, 1e-10));
        let s = eigenvalue_sequence(&m, 10).unwrap();
        assert!(s.generator().is_none());
        assert_eq!(s.sup_bound(), Some(1.0));
    }

    #[test]
    fn weighted_moments() {
        // (1 - r²) against r^k: 1/(k+1) - 1/(k+3)
        let w = RadialProfileMeasure::lebesgue().weighted();
        assert!(close(w.moment(4).unwrap(), 1.0 / 5.0 - 1.0 / 7.0, 1e-14));
        let e = RadialProfileMeasure::zero()
            .with_edges(vec![EdgeTerm::new(1.0, -0.5).unwrap()])
            .unwrap();
        let direct = integrate(
            |r| r * r * (1.0 - r).powf(-0.5) * (1.0 - r * r),
            0.0,
            1.0,
            &[],
            Tolerance::relative(1e-12),
            2000,
        )
        .unwrap()
        .value;
        assert!(close(e.weighted().moment(2).unwrap(), direct, 1e-10));
    }

    #[test]
    fn tail_mass_near_one() {
        // ∫_r^1 (1-x)² dx = (1-r)³/3 at 1 - r = 2^-30
        let m = RadialProfileMeasure::polynomial(&[1.0, -2.0, 1.0]).unwrap();
        let u = 2f64.powi(-30);
        let got = m.total_variation().tail_mass(1.0 - u).unwrap();
        assert!(close(got, u * u * u / 3.0, 1e-10), "{got}");
    }

    proptest! {
        #[test]
        fn linearity(
            c1 in proptest::collection::vec(-2.0f64..2.0, 1..5),
            c2 in proptest::collection::vec(-2.0f64..2.0, 1..5),
            alpha in -3.0f64..3.0,
            beta in -3.0f64..3.0,
            mass in -1.0f64..1.0,
            radius in 0.0f64..0.99,
        ) {
            let m1 = RadialProfileMeasure::new(c1, vec![Atom::new(mass, radius).unwrap()]).unwrap();
            let m2 = RadialProfileMeasure::polynomial(&c2).unwrap();
            let comb = m1.linear_combination(alpha, &m2, beta).unwrap();
            let s = eigenvalue_sequence(&comb, 60).unwrap();
            let s1 = eigenvalue_sequence(&m1, 60).unwrap();
            let s2 = eigenvalue_sequence(&m2, 60).unwrap();
            for n in 0..60 {
                let want = alpha * s1.values()[n] + beta * s2.values()[n];
                let scale = alpha.abs() * s1.values()[n].abs() + beta.abs() * s2.values()[n].abs();
                prop_assert!((s.values()[n] - want).abs() <= 1e-12 * scale.max(1.0));
            }
        }

        #[test]
        fn nonnegative_measures_give_nonnegative_diagonal(
            roots in proptest::collection::vec(-1.0f64..2.0, 0..3),
            lead in 0.1f64..3.0,
            masses in proptest::collection::vec((0.0f64..2.0, 0.0f64..0.999), 0..3),
        ) {
            // lead · Π (r - ρ)² ≥ 0
            let mut poly = vec![lead];
            for rho in roots {
                for _ in 0..2 {
                    let mut next = vec![0.0; poly.len() + 1];
                    for (j, &c) in poly.iter().enumerate() {
                        next[j] -= rho * c;
                        next[j + 1] += c;
                    }
                    poly = next;
                }
            }
            let mut atoms: Vec<Atom> = Vec::new();
            for (m, r) in masses {
                if atoms.iter().all(|a| a.radius != r) {
                    atoms.push(Atom::new(m, r).unwrap());
                }
            }
            let m = RadialProfileMeasure::new(poly, atoms).unwrap();
            let s = eigenvalue_sequence(&m, 300).unwrap();
            prop_assert!(s.values().iter().all(|&v| v >= -1e-12));
        }

        #[test]
        fn limit_is_coefficient_sum(
            c in proptest::collection::vec(-2.0f64..2.0, 1..6),
            mass in -1.0f64..1.0,
            radius in 0.0f64..0.99,
        ) {
            let m = RadialProfileMeasure::new(c.clone(), vec![Atom::new(mass, radius).unwrap()]).unwrap();
            let s = eigenvalue_sequence(&m, 1).unwrap();
            let sum: f64 = c.iter().sum();
            prop_assert!((s.value(100_000).unwrap() - sum).abs() <= 1e-4);
        }
    }
}
