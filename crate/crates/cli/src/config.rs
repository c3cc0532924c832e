//! `key = value` settings files.

use std::path::Path;

use esspos_core::berezin::{MAX_TERMS, QUADRATURE_TOL, SERIES_TOL};
use esspos_core::carleson::GRID_DEPTH;
use esspos_core::spectra::DEFAULT_EPSILON;
use serde::Serialize;

/// Effective numerical settings, echoed in every report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Settings {
    pub epsilon: f64,
    pub series_tol: f64,
    pub quadrature_tol: f64,
    pub max_terms: usize,
    pub grid_depth: i32,
    /// Stored eigenvalues per sequence.
    pub terms: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            epsilon: DEFAULT_EPSILON,
            series_tol: SERIES_TOL,
            quadrature_tol: QUADRATURE_TOL,
            max_terms: MAX_TERMS,
            grid_depth: GRID_DEPTH,
            terms: 10_001,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("config line {line}: {message}")]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

fn positive(v: f64) -> Result<f64, String> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(format!("{v} must be finite and positive"))
    }
}

impl Settings {
    /// Applies each `key = value` line on top of `self`.
    pub fn apply_text(mut self, text: &str) -> Result<Self, ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| ConfigError { line: i + 1, message };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, found {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            let float = || {
                value
                    .parse::<f64>()
                    .map_err(|_| format!("{key}: {value:?} is not a number"))
                    .and_then(positive)
            };
            let count = || {
                value
                    .parse::<usize>()
                    .map_err(|_| format!("{key}: {value:?} is not a nonnegative integer"))
            };
            let res = match key {
                "epsilon" => float().map(|v| self.epsilon = v),
                "series_tol" => float().map(|v| self.series_tol = v),
                "quadrature_tol" => float().map(|v| self.quadrature_tol = v),
                "max_terms" => count().map(|v| self.max_terms = v),
                "terms" => count().map(|v| self.terms = v),
                "grid_depth" => value
                    .parse::<i32>()
                    .map_err(|_| format!("grid_depth: {value:?} is not an integer"))
                    .map(|v| self.grid_depth = v),
                other => Err(format!("unknown key {other:?}")),
            };
            res.map_err(err)?;
        }
        Ok(self)
    }

    pub fn load(self, path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            line: 0,
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        self.apply_text(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn applies_keys() {
        let s = Settings::default()
            .apply_text("# tolerances\nepsilon = 1e-6\n\nmax_terms=5000 # cap\ngrid_depth = 30\n")
            .unwrap();
        assert_eq!(s.epsilon, 1e-6);
        assert_eq!(s.max_terms, 5000);
        assert_eq!(s.grid_depth, 30);
        assert_eq!(s.series_tol, SERIES_TOL);
    }

    #[test]
    fn reports_bad_lines() {
        let e = Settings::default().apply_text("epsilon = 1\nwhat = 2\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(Settings::default().apply_text("epsilon = -1").is_err());
        assert!(Settings::default().apply_text("epsilon").is_err());
        assert!(Settings::default().apply_text("terms = 1.5").is_err());
    }
}
