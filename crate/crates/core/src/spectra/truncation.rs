//! Finite sections of self-adjoint operators and dense Hermitian eigensolves.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use super::sequence::EigenvalueSequence;
use crate::error::{check_tolerance, Error, Result};

/// Per-pair residual bound `‖Tv − λv‖ ≤ RESIDUAL_TOL · ‖T‖`.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// `N × N` Hermitian matrix; the upper triangle is stored once, row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianTruncation {
    dim: usize,
    upper: Vec<Complex64>,
}

fn packed_index(dim: usize, j: usize, k: usize) -> usize {
    debug_assert!(j <= k && k < dim);
    // row j starts after Σ_{i<j} (dim - i) entries
    j * dim - j * j.saturating_sub(1) / 2 + (k - j)
}

impl HermitianTruncation {
    /// Builds from `entry(j, k)` for `j ≤ k`; diagonal imaginary parts are dropped.
    pub fn from_fn<F: Fn(usize, usize) -> Complex64>(dim: usize, entry: F) -> Self {
        let mut upper = Vec::with_capacity(dim * (dim + 1) / 2);
        for j in 0..dim {
            upper.push(Complex64::new(entry(j, j).re, 0.0));
            for k in j + 1..dim {
                upper.push(entry(j, k));
            }
        }
        Self { dim, upper }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        Self::from_fn(values.len(), |j, k| {
            if j == k {
                Complex64::new(values[j], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, j: usize, k: usize) -> Complex64 {
        if j <= k {
            self.upper[packed_index(self.dim, j, k)]
        } else {
            self.upper[packed_index(self.dim, k, j)].conj()
        }
    }

    pub fn is_real(&self) -> bool {
        self.upper.iter().all(|z| z.im == 0.0)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.dim, self.dim, |j, k| self.get(j, k))
    }

    fn to_dense_real(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |j, k| self.get(j, k).re)
    }

    /// Eigenvalues in ascending order, each pair checked against [`RESIDUAL_TOL`].
    pub fn eigen(&self) -> Result<Spectrum> {
        if self.dim == 0 {
            return Ok(Spectrum {
                values: Vec::new(),
                max_residual: 0.0,
            });
        }
        let (values, max_residual, norm) = if self.is_real() {
            let a = self.to_dense_real();
            let eig = SymmetricEigen::try_new(a.clone(), f64::EPSILON, 0)
                .ok_or_else(|| Error::Eigensolve("symmetric QR iteration did not converge".into()))?;
            let mut worst: f64 = 0.0;
            for (i, &lam) in eig.eigenvalues.iter().enumerate() {
                let v: DVector<f64> = eig.eigenvectors.column(i).into_owned();
                worst = worst.max((&a * &v - &v * lam).norm());
            }
            let norm = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            (eig.eigenvalues.iter().copied().collect::<Vec<_>>(), worst, norm)
        } else {
            let a = self.to_dense();
            let eig = SymmetricEigen::try_new(a.clone(), f64::EPSILON, 0)
                .ok_or_else(|| Error::Eigensolve("Hermitian QR iteration did not converge".into()))?;
            let mut worst: f64 = 0.0;
            for (i, &lam) in eig.eigenvalues.iter().enumerate() {
                let v: DVector<Complex64> = eig.eigenvectors.column(i).into_owned();
                let r = &a * &v - &v * Complex64::new(lam, 0.0);
                worst = worst.max(r.norm());
            }
            let norm = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            (eig.eigenvalues.iter().copied().collect::<Vec<_>>(), worst, norm)
        };
        if max_residual > RESIDUAL_TOL * norm && max_residual > f64::MIN_POSITIVE {
            return Err(Error::Eigensolve(format!(
                "residual {max_residual:e} exceeds {RESIDUAL_TOL:e}·‖T‖ = {:e}",
                RESIDUAL_TOL * norm
            )));
        }
        let mut values = values;
        values.sort_by(f64::total_cmp);
        Ok(Spectrum {
            values,
            max_residual,
        })
    }
}

/// Eigenvalues of a truncation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    /// Ascending.
    pub values: Vec<f64>,
    pub max_residual: f64,
}

impl Spectrum {
    pub fn count_at_most(&self, threshold: f64) -> usize {
        self.values.partition_point(|&v| v <= threshold)
    }

    pub fn min(&self) -> Option<f64> {
        self.values.first().copied()
    }

    pub fn max(&self) -> Option<f64> {
        self.values.last().copied()
    }
}

/// `K = Σ w_i u_i u_i*`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteRankPerturbation {
    vectors: Vec<Vec<Complex64>>,
    weights: Vec<f64>,
}

impl FiniteRankPerturbation {
    pub fn new(vectors: Vec<Vec<Complex64>>, weights: Vec<f64>) -> Result<Self> {
        if vectors.len() != weights.len() {
            return Err(Error::InvalidArgument(format!(
                "{} vectors but {} weights",
                vectors.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite())
            || vectors.iter().flatten().any(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::InvalidArgument("non-finite perturbation data".into()));
        }
        Ok(Self { vectors, weights })
    }

    pub fn zero() -> Self {
        Self {
            vectors: Vec::new(),
            weights: Vec::new(),
        }
    }

    /// Real vectors, for convenience.
    pub fn real(vectors: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        let vectors = vectors
            .into_iter()
            .map(|v| v.into_iter().map(|x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::new(vectors, weights)
    }

    pub fn rank_bound(&self) -> usize {
        self.weights.iter().filter(|&&w| w != 0.0).count()
    }

    pub fn vectors(&self) -> &[Vec<Complex64>] {
        &self.vectors
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// `T + K` on the leading `N × N` block.
pub fn apply_finite_rank(
    t: &HermitianTruncation,
    k: &FiniteRankPerturbation,
) -> Result<HermitianTruncation> {
    let n = t.dim();
    if let Some(short) = k.vectors.iter().find(|v| v.len() < n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: short.len(),
        });
    }
    Ok(HermitianTruncation::from_fn(n, |j, l| {
        let mut z = t.get(j, l);
        for (u, &w) in k.vectors.iter().zip(&k.weights) {
            z += u[j] * u[l].conj() * w;
        }
        z
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CountTrend {
    Stable,
    Growing,
    Mixed,
}

/// Counts of eigenvalues `≤ -ε` across increasing truncation sizes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountProfile {
    pub sizes: Vec<usize>,
    pub counts: Vec<usize>,
    pub trend: CountTrend,
    /// Always `"heuristic"`: finite sections cannot certify essential spectra.
    pub label: &'static str,
}

pub fn negative_count_profile<F>(builder: F, eps: f64, sizes: &[usize]) -> Result<CountProfile>
where
    F: Fn(usize) -> Result<HermitianTruncation>,
{
    check_tolerance(eps)?;
    if sizes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("sizes must be strictly increasing".into()));
    }
    let mut counts = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let t = builder(n)?;
        if t.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: t.dim(),
            });
        }
        counts.push(t.eigen()?.count_at_most(-eps));
    }
    let trend = if counts.windows(2).all(|w| w[0] == w[1]) {
        CountTrend::Stable
    } else if counts.windows(2).all(|w| w[1] >= w[0]) {
        CountTrend::Growing
    } else {
        CountTrend::Mixed
    };
    Ok(CountProfile {
        sizes: sizes.to_vec(),
        counts,
        trend,
        label: "heuristic",
    })
}

/// Anything with a canonical-basis diagonal `⟨T e_n, e_n⟩`.
pub trait BasisProbe {
    fn basis_diagonal(&self) -> Result<EigenvalueSequence>;
}

impl BasisProbe for HermitianTruncation {
    fn basis_diagonal(&self) -> Result<EigenvalueSequence> {
        EigenvalueSequence::from_values((0..self.dim).map(|n| self.get(n, n).re).collect())
    }
}

impl BasisProbe for EigenvalueSequence {
    fn basis_diagonal(&self) -> Result<EigenvalueSequence> {
        Ok(self.clone())
    }
}

/// `⟨T e_n, e_n⟩` along the canonical basis.
pub fn basis_weyl_probe<T: BasisProbe + ?Sized>(t: &T) -> Result<EigenvalueSequence> {
    t.basis_diagonal()
}
