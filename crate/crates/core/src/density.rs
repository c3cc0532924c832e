//! Building blocks of radial profile measures on `[0, 1)`.

use serde::Serialize;

use crate::error::{Error, Result};

pub const MAX_POLY_DEGREE: usize = 64;

const ROOT_TOL: f64 = 1e-12;

/// Horner evaluation of `Σ c_j x^j`.
pub fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

pub fn derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(j, &c)| j as f64 * c)
        .collect()
}

/// Coefficients of `p(x) · (1 - x²)`.
pub fn times_one_minus_square(coeffs: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; coeffs.len() + 2];
    for (j, &c) in coeffs.iter().enumerate() {
        out[j] += c;
        out[j + 2] -= c;
    }
    trim(out)
}

/// Coefficients `d` with `p(x) = Σ d_j (1 - x)^j`.
pub fn taylor_at_one(coeffs: &[f64]) -> Vec<f64> {
    // x = 1 - u, expand x^i = Σ_j C(i, j) (-u)^j
    let n = coeffs.len();
    let mut d = vec![0.0; n];
    for (i, &c) in coeffs.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let mut binom = 1.0;
        for (j, dj) in d.iter_mut().enumerate().take(i + 1) {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            *dj += c * binom * sign;
            binom = binom * (i - j) as f64 / (j + 1) as f64;
        }
    }
    d
}

pub(crate) fn trim(mut coeffs: Vec<f64>) -> Vec<f64> {
    while coeffs.last() == Some(&0.0) {
        coeffs.pop();
    }
    coeffs
}

/// `1 - r^p` without cancellation when `r` is close to 1.
pub fn one_minus_pow(r: f64, p: f64) -> f64 {
    if r <= 0.0 {
        return 1.0;
    }
    -(p * (-(1.0 - r)).ln_1p()).exp_m1()
}

/// `∫_lo^hi x^k p(x) dx` for `0 ≤ lo ≤ hi ≤ 1`.
pub fn poly_moment_on(coeffs: &[f64], k: u64, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    let mut acc = crate::sum::NeumaierSum::new();
    for (j, &c) in coeffs.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let p = (k + j as u64 + 1) as f64;
        let span = if hi == 1.0 {
            one_minus_pow(lo, p)
        } else {
            hi.powf(p) - lo.powf(p)
        };
        acc.add(c * span / p);
    }
    acc.value()
}

/// `∫_r^1 p(x) dx` evaluated through the expansion about 1, so that densities
/// vanishing at the boundary keep full relative accuracy as `r → 1`.
pub fn poly_mass_to_one(taylor: &[f64], r: f64) -> f64 {
    let u = 1.0 - r;
    let mut acc = crate::sum::NeumaierSum::new();
    let mut upow = u;
    for (j, &d) in taylor.iter().enumerate() {
        acc.add(d * upow / (j + 1) as f64);
        upow *= u;
    }
    acc.value()
}

/// Interior points of `[0, 1]` where `p` changes sign, ascending.
pub fn sign_change_roots(coeffs: &[f64]) -> Vec<f64> {
    let coeffs = trim(coeffs.to_vec());
    roots_rec(&coeffs)
}

fn roots_rec(coeffs: &[f64]) -> Vec<f64> {
    match coeffs.len() {
        0 | 1 => Vec::new(),
        2 => {
            let x = -coeffs[0] / coeffs[1];
            if x > 0.0 && x < 1.0 {
                vec![x]
            } else {
                Vec::new()
            }
        }
        _ => {
            // p is monotone between consecutive extrema.
            let mut edges = vec![0.0];
            edges.extend(roots_rec(&trim(derivative(coeffs))));
            edges.push(1.0);
            let mut roots = Vec::new();
            for w in edges.windows(2) {
                if let Some(x) = bisect_sign_change(coeffs, w[0], w[1]) {
                    if x > 0.0 && x < 1.0 && roots.last().is_none_or(|&last: &f64| x - last > ROOT_TOL) {
                        roots.push(x);
                    }
                }
            }
            roots
        }
    }
}

fn bisect_sign_change(coeffs: &[f64], mut lo: f64, mut hi: f64) -> Option<f64> {
    let flo = horner(coeffs, lo);
    let fhi = horner(coeffs, hi);
    if flo == 0.0 || fhi == 0.0 || flo.signum() == fhi.signum() {
        return None;
    }
    for _ in 0..200 {
        if hi - lo <= ROOT_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = horner(coeffs, mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// A maximal interval on which a polynomial density keeps one sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignedPiece {
    pub lo: f64,
    pub hi: f64,
    pub sign: f64,
}

/// Pieces of `[0, 1]` on which `p` has constant sign.
pub fn sign_pieces(coeffs: &[f64]) -> Vec<SignedPiece> {
    let mut edges = vec![0.0];
    edges.extend(sign_change_roots(coeffs));
    edges.push(1.0);
    edges
        .windows(2)
        .map(|w| {
            let v = horner(coeffs, 0.5 * (w[0] + w[1]));
            SignedPiece {
                lo: w[0],
                hi: w[1],
                sign: if v < 0.0 { -1.0 } else { 1.0 },
            }
        })
        .collect()
}

/// Point mass on the circle of radius `radius` in profile convention.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Atom {
    pub mass: f64,
    pub radius: f64,
}

impl Atom {
    pub fn new(mass: f64, radius: f64) -> Result<Self> {
        if !mass.is_finite() {
            return Err(Error::InvalidMeasure(format!("atom mass {mass} is not finite")));
        }
        if !(0.0..1.0).contains(&radius) {
            return Err(Error::InvalidMeasure(format!(
                "atom radius {radius} outside [0, 1)"
            )));
        }
        Ok(Self { mass, radius })
    }

    /// `sup_{n ≥ 0} 2(n+1) r^{2n+1}`.
    pub fn eigenvalue_envelope(&self) -> f64 {
        let r = self.radius;
        if r == 0.0 {
            return 0.0;
        }
        // log-concave in n; maximiser of ln(n+1) + (2n+1) ln r
        let star = (-1.0 / (2.0 * r.ln()) - 1.0).max(0.0);
        let g = |n: f64| 2.0 * (n + 1.0) * r.powf(2.0 * n + 1.0);
        g(star.floor()).max(g(star.ceil()))
    }
}

/// Density `coeff · (1 - r)^exponent`, exponent > -1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdgeTerm {
    pub coeff: f64,
    pub exponent: f64,
}

impl EdgeTerm {
    pub fn new(coeff: f64, exponent: f64) -> Result<Self> {
        if !coeff.is_finite() || !exponent.is_finite() || exponent <= -1.0 {
            return Err(Error::InvalidMeasure(format!(
                "edge term {coeff}·(1-r)^{exponent} needs a finite coefficient and exponent > -1"
            )));
        }
        Ok(Self { coeff, exponent })
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.coeff * (1.0 - r).powf(self.exponent)
    }

    /// `∫_0^1 r^k (1-r)^β dr = B(k+1, β+1)`, by the product recurrence.
    pub fn moment(&self, k: u64) -> f64 {
        let b = self.exponent;
        let mut v = 1.0 / (b + 1.0);
        for i in 1..=k {
            let i = i as f64;
            v *= i / (i + b + 1.0);
        }
        self.coeff * v
    }

    pub fn mass_to_one(&self, r: f64) -> f64 {
        self.coeff * (1.0 - r).powf(self.exponent + 1.0) / (self.exponent + 1.0)
    }
}

/// Tabulated density on a grid of `[0, 1]`, interpolated by monotone cubic
/// Hermite splines (Fritsch–Carlson) and clamped outside the grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledDensity {
    grid: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl SampledDensity {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() < 2 || grid.len() != values.len() {
            return Err(Error::InvalidMeasure(
                "sampled density needs at least two (grid, value) pairs".into(),
            ));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) || grid[0] < 0.0 || grid[grid.len() - 1] > 1.0 {
            return Err(Error::InvalidMeasure(
                "sampled density grid must be strictly increasing inside [0, 1]".into(),
            ));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index: i, value: *v });
        }
        let slopes = fritsch_carlson(&grid, &values);
        Ok(Self {
            grid,
            values,
            slopes,
        })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn eval(&self, r: f64) -> f64 {
        let n = self.grid.len();
        if r <= self.grid[0] {
            return self.values[0];
        }
        if r >= self.grid[n - 1] {
            return self.values[n - 1];
        }
        let i = self.grid.partition_point(|&g| g <= r) - 1;
        let (x0, x1) = (self.grid[i], self.grid[i + 1]);
        let h = x1 - x0;
        let s = (r - x0) / h;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.slopes[i], self.slopes[i + 1]);
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * y0
            + (s3 - 2.0 * s2 + s) * h * m0
            + (-2.0 * s3 + 3.0 * s2) * y1
            + (s3 - s2) * h * m1
    }

    pub fn is_nonnegative(&self) -> bool {
        // monotone interpolation never overshoots the data
        self.values.iter().all(|&v| v >= 0.0)
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

fn fritsch_carlson(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / (x[i + 1] - x[i])).collect();
    let mut m = vec![0.0; n];
    m[0] = delta[0];
    m[n - 1] = delta[n - 2];
    for i in 1..n - 1 {
        m[i] = if delta[i - 1] * delta[i] <= 0.0 {
            0.0
        } else {
            0.5 * (delta[i - 1] + delta[i])
        };
    }
    for i in 0..n - 1 {
        if delta[i] == 0.0 {
            m[i] = 0.0;
            m[i + 1] = 0.0;
            continue;
        }
        let a = m[i] / delta[i];
        let b = m[i + 1] / delta[i];
        let s = a * a + b * b;
        if s > 9.0 {
            let tau = 3.0 / s.sqrt();
            m[i] = tau * a * delta[i];
            m[i + 1] = tau * b * delta[i];
        }
    }
    m
}
