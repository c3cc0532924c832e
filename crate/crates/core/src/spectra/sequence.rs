use std::collections::BTreeMap;

use serde::Serialize;

use crate::density::{poly_moment_on, Atom, SignedPiece};
use crate::error::{Error, Result};

/// Closed-form polynomial-plus-atoms description of a radial eigenvalue
/// sequence `λ_n = 2(n+1) ∫ r^{2n+1} dμ(r)`.
///
/// The density is `sign_i · p(r)` on each piece `[lo_i, hi_i]`; a plain
/// polynomial density is a single positive piece on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialTerms {
    pub poly: Vec<f64>,
    pub pieces: Vec<SignedPiece>,
    pub atoms: Vec<Atom>,
}

impl RadialTerms {
    pub fn eval(&self, n: usize) -> f64 {
        2.0 * (n as f64 + 1.0) * self.profile_moment(2 * n as u64 + 1)
    }

    /// `∫ r^k dμ(r)`.
    pub fn profile_moment(&self, k: u64) -> f64 {
        let mut acc = crate::sum::NeumaierSum::new();
        if self.poly.iter().any(|&c| c != 0.0) {
            for p in &self.pieces {
                acc.add(p.sign * poly_moment_on(&self.poly, k, p.lo, p.hi));
            }
        }
        for a in &self.atoms {
            acc.add(a.mass * a.radius.powf(k as f64));
        }
        acc.value()
    }

    fn last_sign(&self) -> f64 {
        self.pieces.last().map_or(1.0, |p| p.sign)
    }

    /// `λ_n → ±Σ c_j = |f|(1⁻)` with sign from the piece touching 1; atoms vanish.
    pub fn limit(&self) -> (f64, bool) {
        let nonzero = self.poly.iter().filter(|&&c| c != 0.0).count();
        let value = self.last_sign() * crate::sum::compensated_sum(self.poly.iter().copied());
        // one term cannot cancel
        (value, nonzero <= 1)
    }

    fn abs_coeff_sum(&self) -> f64 {
        self.poly.iter().map(|c| c.abs()).sum()
    }

    pub fn rigorous_sup(&self) -> f64 {
        // 2(n+1)/(2n+2+j) ≤ 1 for every monomial
        self.abs_coeff_sum()
            + self
                .atoms
                .iter()
                .map(|a| a.mass.abs() * a.eigenvalue_envelope())
                .sum::<f64>()
    }

    /// Constant `A` with `|a_n| ≤ A` for all `n`, from the two-term integral
    /// decomposition of `a_n` applied to `|μ|`.
    pub fn difference_bound(&self) -> f64 {
        let poly = 3.0 * self.abs_coeff_sum();
        let atoms: f64 = self
            .atoms
            .iter()
            .map(|a| {
                let r = a.radius;
                if r == 0.0 {
                    // only a_0 = λ_0 = 0 sees it
                    return 0.0;
                }
                let lr = r.ln();
                let first = |n: f64| 2.0 * n * n * r.powf(2.0 * n - 1.0) * (1.0 - r * r);
                let second = |n: f64| 2.0 * (2.0 * n + 1.0) * r.powf(2.0 * n + 1.0);
                let s1 = discrete_max(first, -1.0 / lr, 1.0);
                let s2 = discrete_max(second, (-1.0 / lr - 1.0) / 2.0, 0.0);
                a.mass.abs() * (s1 + s2)
            })
            .sum();
        poly + atoms
    }
}

/// Max of a log-concave `g` over integers `≥ min_n`, given its real maximiser.
fn discrete_max<F: Fn(f64) -> f64>(g: F, star: f64, min_n: f64) -> f64 {
    let s = star.max(min_n);
    g(s.floor().max(min_n)).max(g(s.ceil()))
}

/// Subsequence rule witnessing persistent negativity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    /// `n = 2^k`, `k ≥ 0`.
    PowersOfTwo,
}

impl Witness {
    pub fn rule(&self) -> &'static str {
        match self {
            Witness::PowersOfTwo => "n = 2^k, k >= 0",
        }
    }

    /// Witness indices `< bound`.
    pub fn indices_below(&self, bound: usize) -> Vec<usize> {
        match self {
            Witness::PowersOfTwo => (0..usize::BITS)
                .map(|k| 1usize << k)
                .take_while(|&n| n < bound)
                .collect(),
        }
    }
}

/// What a generator knows about `λ_n` as `n → ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailBehavior {
    /// `λ_n → limit`. `exact` means the value carries no cancellation error.
    Converges { limit: f64, exact: bool },
    /// No limit; `liminf` is attained along `witness`.
    Oscillates {
        liminf: f64,
        limsup: f64,
        witness: Witness,
    },
}

impl TailBehavior {
    pub fn liminf(&self) -> f64 {
        match *self {
            TailBehavior::Converges { limit, .. } => limit,
            TailBehavior::Oscillates { liminf, .. } => liminf,
        }
    }

    pub fn limit(&self) -> Option<f64> {
        match *self {
            TailBehavior::Converges { limit, .. } => Some(limit),
            TailBehavior::Oscillates { .. } => None,
        }
    }
}

/// Closed-form descriptor that evaluates `λ_n` at any index.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    Radial(RadialTerms),
    /// `-1` at `n ∈ {1, 2, 4, 8, …}`, `0` elsewhere.
    Lacunary,
    /// `head[n]` for `n < head.len()`, `tail` afterwards.
    EventuallyConstant { head: Vec<f64>, tail: f64 },
    /// `base` with finitely many entries replaced.
    Altered {
        base: Box<Generator>,
        entries: BTreeMap<usize, f64>,
    },
}

impl Generator {
    pub fn eval(&self, n: usize) -> f64 {
        match self {
            Generator::Radial(t) => t.eval(n),
            Generator::Lacunary => {
                if n.is_power_of_two() {
                    -1.0
                } else {
                    0.0
                }
            }
            Generator::EventuallyConstant { head, tail } => head.get(n).copied().unwrap_or(*tail),
            Generator::Altered { base, entries } => {
                entries.get(&n).copied().unwrap_or_else(|| base.eval(n))
            }
        }
    }

    pub fn tail(&self) -> TailBehavior {
        match self {
            Generator::Radial(t) => {
                let (limit, exact) = t.limit();
                TailBehavior::Converges { limit, exact }
            }
            Generator::Lacunary => TailBehavior::Oscillates {
                liminf: -1.0,
                limsup: 0.0,
                witness: Witness::PowersOfTwo,
            },
            Generator::EventuallyConstant { tail, .. } => TailBehavior::Converges {
                limit: *tail,
                exact: true,
            },
            Generator::Altered { base, .. } => base.tail(),
        }
    }

    /// A bound on `sup_n |λ_n|` valid for every index.
    pub fn rigorous_sup(&self) -> f64 {
        match self {
            Generator::Radial(t) => t.rigorous_sup(),
            Generator::Lacunary => 1.0,
            Generator::EventuallyConstant { head, tail } => {
                head.iter().fold(tail.abs(), |m, v| m.max(v.abs()))
            }
            Generator::Altered { base, entries } => entries
                .values()
                .fold(base.rigorous_sup(), |m, v| m.max(v.abs())),
        }
    }

    /// `(A, B)` with `|a_n| ≤ A + B n` for the difference coefficients
    /// `a_n = (n+1)λ_n − nλ_{n−1}`.
    pub fn difference_bound(&self) -> (f64, f64) {
        match self {
            Generator::Radial(t) => (t.difference_bound(), 0.0),
            Generator::EventuallyConstant { head, tail } => {
                // a_n = tail once n > head.len()
                let s = self.rigorous_sup();
                let mut a = tail.abs();
                for n in 0..=head.len() {
                    let prev = if n == 0 { 0.0 } else { self.eval(n - 1) };
                    a = a.max(((n as f64 + 1.0) * self.eval(n) - n as f64 * prev).abs());
                }
                (a.max(s), 0.0)
            }
            Generator::Altered { base, entries } => {
                let (a, b) = base.difference_bound();
                // changing λ_m by Δ moves a_m and a_{m+1} by (m+1)|Δ| each
                let extra: f64 = entries
                    .iter()
                    .map(|(&m, &v)| (m as f64 + 2.0) * (v - base.eval(m)).abs())
                    .sum();
                (a + extra, b)
            }
            Generator::Lacunary => {
                let s = self.rigorous_sup();
                (s, 2.0 * s)
            }
        }
    }

    /// Short provenance tag for reports.
    pub fn describe(&self) -> String {
        match self {
            Generator::Radial(t) => format!(
                "radial: polynomial degree {}, {} sign piece(s), {} atom(s)",
                t.poly.len().saturating_sub(1),
                t.pieces.len(),
                t.atoms.len()
            ),
            Generator::Lacunary => "lacunary: -1 at powers of two".into(),
            Generator::EventuallyConstant { head, tail } => {
                format!("explicit list of {} entries, then constant {tail}", head.len())
            }
            Generator::Altered { base, entries } => {
                format!("{} with {} altered entries", base.describe(), entries.len())
            }
        }
    }
}

/// Limit value with a provenance note.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KnownLimit {
    pub value: f64,
    pub note: String,
}

/// Diagonal `λ_0, λ_1, …` of a self-adjoint diagonal operator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenvalueSequence {
    values: Vec<f64>,
    generator: Option<Generator>,
    known_limit: Option<KnownLimit>,
    sup_bound: Option<f64>,
}

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        Some((index, &value)) => Err(Error::NonFinite { index, value }),
        None => Ok(()),
    }
}

impl EigenvalueSequence {
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        check_finite(&values)?;
        Ok(Self {
            values,
            generator: None,
            known_limit: None,
            sup_bound: None,
        })
    }

    /// Stores `λ_0 … λ_{len-1}` evaluated from `generator`.
    pub fn from_generator(generator: Generator, len: usize) -> Result<Self> {
        let values: Vec<f64> = (0..len).map(|n| generator.eval(n)).collect();
        check_finite(&values)?;
        let known_limit = generator.tail().limit().map(|value| KnownLimit {
            value,
            note: format!("closed form from generator ({})", generator.describe()),
        });
        Ok(Self {
            values,
            generator: Some(generator),
            known_limit,
            sup_bound: None,
        })
    }

    /// Pairs precomputed values with a generator, checking agreement to 1e-12 relative.
    pub fn with_generator(values: Vec<f64>, generator: Generator) -> Result<Self> {
        check_finite(&values)?;
        for (n, &v) in values.iter().enumerate() {
            let g = generator.eval(n);
            if (v - g).abs() > 1e-12 * v.abs().max(g.abs()) + f64::MIN_POSITIVE {
                return Err(Error::GeneratorMismatch {
                    index: n,
                    stored: v,
                    generated: g,
                });
            }
        }
        let mut s = Self::from_values(values)?;
        s.known_limit = generator.tail().limit().map(|value| KnownLimit {
            value,
            note: format!("closed form from generator ({})", generator.describe()),
        });
        s.generator = Some(generator);
        Ok(s)
    }

    pub fn with_known_limit(mut self, value: f64, note: impl Into<String>) -> Self {
        self.known_limit = Some(KnownLimit {
            value,
            note: note.into(),
        });
        self
    }

    /// Attach an a-priori bound on `sup_n |λ_n|` over all indices.
    pub fn with_sup_bound(mut self, bound: f64) -> Self {
        self.sup_bound = Some(bound);
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn generator(&self) -> Option<&Generator> {
        self.generator.as_ref()
    }

    pub fn known_limit(&self) -> Option<&KnownLimit> {
        self.known_limit.as_ref()
    }

    pub fn tail(&self) -> Option<TailBehavior> {
        self.generator.as_ref().map(Generator::tail)
    }

    /// `λ_n`, from storage or the generator.
    pub fn value(&self, n: usize) -> Option<f64> {
        self.values
            .get(n)
            .copied()
            .or_else(|| self.generator.as_ref().map(|g| g.eval(n)))
    }

    /// Can `λ_n` be produced for every `n`?
    pub fn is_unbounded_in_length(&self) -> bool {
        self.generator.is_some()
    }

    /// Bound on `|λ_n|` over all `n`, if one is known.
    pub fn sup_bound(&self) -> Option<f64> {
        match (&self.generator, self.sup_bound) {
            (Some(g), Some(b)) => Some(g.rigorous_sup().min(b)),
            (Some(g), None) => Some(g.rigorous_sup()),
            (None, b) => b,
        }
    }

    /// Replace finitely many entries; the generator (if any) is wrapped so the
    /// alteration is visible at every index.
    pub fn altered(&self, entries: &BTreeMap<usize, f64>) -> Result<Self> {
        let mut values = self.values.clone();
        for (&n, &v) in entries {
            if !v.is_finite() {
                return Err(Error::NonFinite { index: n, value: v });
            }
            if n < values.len() {
                values[n] = v;
            }
        }
        let generator = self.generator.clone().map(|g| Generator::Altered {
            base: Box::new(g),
            entries: entries.clone(),
        });
        if generator.is_none() && entries.keys().any(|&n| n >= self.values.len()) {
            return Err(Error::InvalidArgument(
                "cannot alter entries beyond the stored range without a generator".into(),
            ));
        }
        Ok(Self {
            values,
            generator,
            known_limit: self.known_limit.clone(),
            sup_bound: self.sup_bound.map(|b| entries.values().fold(b, |m, v| m.max(v.abs()))),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lacunary_indices() {
        let g = Generator::Lacunary;
        assert_eq!(g.eval(0), 0.0);
        assert_eq!(g.eval(1), -1.0);
        assert_eq!(g.eval(4), -1.0);
        assert_eq!(g.eval(6), 0.0);
        assert_eq!(Witness::PowersOfTwo.indices_below(20), vec![1, 2, 4, 8, 16]);
    }

    #[test]
    fn mismatched_generator_rejected() {
        let e = EigenvalueSequence::with_generator(vec![0.0, -1.0, 0.5], Generator::Lacunary)
            .unwrap_err();
        assert!(matches!(e, Error::GeneratorMismatch { index: 2, .. }));
    }

    #[test]
    fn non_finite_rejected() {
        assert!(EigenvalueSequence::from_values(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn altered_generator_sees_changes() {
        let s = EigenvalueSequence::from_generator(Generator::Lacunary, 8).unwrap();
        let mut e = BTreeMap::new();
        e.insert(4, 3.0);
        e.insert(100, 7.0);
        let t = s.altered(&e).unwrap();
        assert_eq!(t.values()[4], 3.0);
        assert_eq!(t.value(100), Some(7.0));
        assert_eq!(t.value(64), Some(-1.0));
    }

    #[test]
    fn difference_bound_dominates_radial_atoms() {
        let terms = RadialTerms {
            poly: vec![0.5, -1.0],
            pieces: vec![SignedPiece {
                lo: 0.0,
                hi: 1.0,
                sign: 1.0,
            }],
            atoms: vec![Atom::new(-2.0, 0.95).unwrap()],
        };
        let g = Generator::Radial(terms);
        let (a, b) = g.difference_bound();
        assert_eq!(b, 0.0);
        let mut prev = 0.0;
        for n in 0..5000 {
            let l = g.eval(n);
            let an = (n as f64 + 1.0) * l - n as f64 * prev;
            assert!(an.abs() <= a * (1.0 + 1e-12), "n={n} a_n={an} bound={a}");
            prev = l;
        }
    }
}
