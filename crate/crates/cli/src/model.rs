//! Turning parsed specs into library objects.

use std::collections::BTreeMap;
use std::path::Path;

use esspos_core::density::{Atom, EdgeTerm};
use esspos_core::hardy::{parse_samples, CircleSymbol};
use esspos_core::radial::RadialProfileMeasure;
use esspos_core::spectra::{EigenvalueSequence, Generator};
use num_complex::Complex64;

use crate::parse::{DiagonalItem, HardyItem, Payload, RadialItem, SymbolSpec};

#[derive(Debug, Clone)]
pub enum Operator {
    Radial(RadialProfileMeasure),
    Diagonal(Generator),
    Hardy(CircleSymbol),
}

impl Operator {
    /// Relative sample paths are resolved against `base_dir`.
    pub fn build(spec: &SymbolSpec, base_dir: &Path) -> esspos_core::Result<Self> {
        match &spec.payload {
            Payload::Radial(items) => radial(items).map(Operator::Radial),
            Payload::Diagonal(items) => Ok(Operator::Diagonal(diagonal(items))),
            Payload::Hardy(items) => hardy(items, base_dir).map(Operator::Hardy),
        }
    }

    /// `λ_0 … λ_{len-1}` for the Bergman-space kinds.
    pub fn sequence(&self, len: usize) -> esspos_core::Result<Option<EigenvalueSequence>> {
        match self {
            Operator::Radial(m) => esspos_core::radial::eigenvalue_sequence(m, len).map(Some),
            Operator::Diagonal(g) => EigenvalueSequence::from_generator(g.clone(), len).map(Some),
            Operator::Hardy(_) => Ok(None),
        }
    }
}

fn add_poly(acc: &mut Vec<f64>, c: &[f64]) {
    if acc.len() < c.len() {
        acc.resize(c.len(), 0.0);
    }
    for (a, &v) in acc.iter_mut().zip(c) {
        *a += v;
    }
}

fn radial(items: &[RadialItem]) -> esspos_core::Result<RadialProfileMeasure> {
    let mut poly = Vec::new();
    let mut atoms = Vec::new();
    let mut edges = Vec::new();
    for item in items {
        match *item {
            RadialItem::Poly(ref c) => add_poly(&mut poly, c),
            RadialItem::Zz { a, b } => add_poly(&mut poly, &[b, a, 1.0]),
            RadialItem::Atom { mass, radius } => atoms.push(Atom::new(mass, radius)?),
            RadialItem::Edge { coeff, exponent } => edges.push(EdgeTerm::new(coeff, exponent)?),
        }
    }
    let m = RadialProfileMeasure::new(poly, atoms)?;
    if edges.is_empty() {
        Ok(m)
    } else {
        m.with_edges(edges)
    }
}

/// Lists concatenate into the head. Alone they repeat their last value
/// forever; with `lacunary` they overwrite its leading entries.
fn diagonal(items: &[DiagonalItem]) -> Generator {
    let mut head = Vec::new();
    let mut lacunary = false;
    for item in items {
        match item {
            DiagonalItem::List(v) => head.extend_from_slice(v),
            DiagonalItem::Lacunary => lacunary = true,
        }
    }
    if lacunary {
        if head.is_empty() {
            Generator::Lacunary
        } else {
            Generator::Altered {
                base: Box::new(Generator::Lacunary),
                entries: head.into_iter().enumerate().collect(),
            }
        }
    } else {
        let tail = *head.last().expect("the grammar requires a nonempty list");
        Generator::EventuallyConstant { head, tail }
    }
}

fn hardy(items: &[HardyItem], base_dir: &Path) -> esspos_core::Result<CircleSymbol> {
    let mut map: BTreeMap<i64, Complex64> = BTreeMap::new();
    let mut samples = None;
    for item in items {
        match item {
            HardyItem::Fourier(terms) => {
                for &(k, v) in terms {
                    map.insert(k, Complex64::new(v, 0.0));
                }
            }
            HardyItem::Samples(p) => {
                let path = base_dir.join(p);
                let text = std::fs::read_to_string(&path).map_err(|e| {
                    esspos_core::Error::InvalidArgument(format!("cannot read {}: {e}", path.display()))
                })?;
                samples = Some(parse_samples(&text)?);
            }
        }
    }
    // conjugate-symmetric completion of one-sided coefficients
    let given: Vec<(i64, Complex64)> = map.iter().map(|(&k, &v)| (k, v)).collect();
    for (k, v) in given {
        map.entry(-k).or_insert(v.conj());
    }
    let has_fourier = items.iter().any(|i| matches!(i, HardyItem::Fourier(_)));
    match (has_fourier, samples) {
        (true, Some(s)) => CircleSymbol::from_fourier(&map)?.with_samples(s),
        (true, None) => CircleSymbol::from_fourier(&map),
        (false, Some(s)) => CircleSymbol::from_samples(s),
        (false, None) => unreachable!("the grammar requires at least one item"),
    }
}
