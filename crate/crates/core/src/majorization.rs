//! Majorization predicates with margin diagnostics, and unitarily invariant norms.
//!
//! Every check sorts both vectors non-increasingly, zero-pads the shorter one
//! (by default) and reports the per-prefix margin `partial_k(y) − partial_k(x)`.
//! A check passes iff `min_margin ≥ −tol·(1 + max_k |partial_k(y)|)`; strong
//! majorization additionally requires `|Σx − Σy|` within the same bound.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::SortedSpectrum;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// `x ≺_w y`: prefix sums.
    Weak,
    /// `x ≺ y`: prefix sums plus equal totals.
    Strong,
    /// `x ≺_{w,log} y`: prefix products of nonnegative entries.
    WeakLog,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(pass: bool) -> Self {
        if pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

/// How vectors of different lengths are compared.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Padding {
    /// Append zeros to the shorter vector.
    #[default]
    Zeros,
    /// Reject mismatched lengths with a dimension error.
    Reject,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MajorizationReport {
    pub mode: Mode,
    pub x_sorted: SortedSpectrum,
    pub y_sorted: SortedSpectrum,
    /// `margins[k-1]` = k-th partial sum (or product) of `y` minus that of `x`.
    pub margins: Vec<f64>,
    /// `|Σx − Σy|`, strong mode only.
    pub sum_gap: Option<f64>,
    pub min_margin: f64,
    pub verdict: Verdict,
    /// Absolute tolerance the verdict was judged against.
    pub tolerance_used: f64,
}

impl MajorizationReport {
    /// 1-based prefix length at which the margin is smallest (first on ties).
    pub fn worst_k(&self) -> usize {
        let mut best = 0;
        for (i, &m) in self.margins.iter().enumerate() {
            if m < self.margins[best] {
                best = i;
            }
        }
        best + 1
    }

    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }
}

/// Sorts a copy of `x` in non-increasing order.
pub fn sort_desc(x: &[f64]) -> Result<SortedSpectrum> {
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("vector entries must be finite".into()));
    }
    SortedSpectrum::from_unsorted(x.to_vec())
}

/// Running sums `Σ_{i≤k} s_i` for k = 1..n, accumulated left to right.
pub fn partial_sums(s: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    s.iter()
        .map(|&v| {
            acc += v;
            acc
        })
        .collect()
}

fn partial_products(s: &[f64]) -> Vec<f64> {
    let positive = s.iter().all(|&v| v > 1e-300);
    if positive {
        let mut log_acc = 0.0;
        s.iter()
            .map(|&v| {
                log_acc += v.ln();
                log_acc.exp()
            })
            .collect()
    } else {
        let mut acc = 1.0;
        s.iter()
            .map(|&v| {
                acc *= v;
                acc
            })
            .collect()
    }
}

fn aligned(x: &[f64], y: &[f64], padding: Padding) -> Result<(SortedSpectrum, SortedSpectrum)> {
    let xs = sort_desc(x)?;
    let ys = sort_desc(y)?;
    if xs.is_empty() && ys.is_empty() {
        return Err(Error::Dimension("cannot compare empty vectors".into()));
    }
    if xs.len() != ys.len() && padding == Padding::Reject {
        return Err(Error::Dimension(format!("vector lengths differ: {} vs {}", xs.len(), ys.len())));
    }
    let n = xs.len().max(ys.len());
    Ok((xs.padded(n), ys.padded(n)))
}

/// General entry point: compare `x` against `y` in the given mode.
pub fn compare(mode: Mode, x: &[f64], y: &[f64], tol: f64, padding: Padding) -> Result<MajorizationReport> {
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::Usage(format!("tolerance must be nonnegative, got {tol}")));
    }
    if mode == Mode::WeakLog {
        if let Some(v) = x.iter().chain(y).find(|&&v| v < 0.0) {
            return Err(Error::Domain(format!("log-majorization needs nonnegative entries, found {v}")));
        }
    }
    let (xs, ys) = aligned(x, y, padding)?;
    let (px, py) = match mode {
        Mode::WeakLog => (partial_products(xs.values()), partial_products(ys.values())),
        Mode::Weak | Mode::Strong => (partial_sums(xs.values()), partial_sums(ys.values())),
    };
    let margins: Vec<f64> = py.iter().zip(&px).map(|(b, a)| b - a).collect();
    let min_margin = margins.iter().copied().fold(f64::INFINITY, f64::min);
    let tolerance_used = tol * (1.0 + py.iter().map(|v| v.abs()).fold(0.0, f64::max));
    let sum_gap = (mode == Mode::Strong).then(|| (px[px.len() - 1] - py[py.len() - 1]).abs());
    let pass = min_margin >= -tolerance_used && sum_gap.is_none_or(|g| g <= tolerance_used);
    Ok(MajorizationReport {
        mode,
        x_sorted: xs,
        y_sorted: ys,
        margins,
        sum_gap,
        min_margin,
        verdict: Verdict::from_bool(pass),
        tolerance_used,
    })
}

/// `x ≺_w y`.
pub fn check_weak_majorization(x: &[f64], y: &[f64], tol: f64) -> Result<MajorizationReport> {
    compare(Mode::Weak, x, y, tol, Padding::Zeros)
}

/// `x ≺ y`.
pub fn check_majorization(x: &[f64], y: &[f64], tol: f64) -> Result<MajorizationReport> {
    compare(Mode::Strong, x, y, tol, Padding::Zeros)
}

/// `x ≺_{w,log} y` for nonnegative vectors. Prefix products are formed as
/// exponentials of log-sums when every entry exceeds `1e-300`, directly
/// otherwise; margins are reported in product space.
pub fn check_weak_log_majorization(x: &[f64], y: &[f64], tol: f64) -> Result<MajorizationReport> {
    compare(Mode::WeakLog, x, y, tol, Padding::Zeros)
}

/// Sum of the `k` largest entries (the Ky Fan k-norm when `s` holds singular values).
pub fn ky_fan_norm(s: &SortedSpectrum, k: usize) -> Result<f64> {
    if k == 0 || k > s.len() {
        return Err(Error::Usage(format!("Ky Fan index {k} outside 1..={}", s.len())));
    }
    Ok(partial_sums(&s.values()[..k])[k - 1])
}

/// Schatten p-norm `(Σ s_i^p)^{1/p}`; `p = f64::INFINITY` gives the largest entry.
pub fn schatten_norm(s: &SortedSpectrum, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::Usage(format!("Schatten exponent must be at least 1, got {p}")));
    }
    let top = s.values().iter().map(|v| v.abs()).fold(0.0, f64::max);
    if p == f64::INFINITY {
        return Ok(top);
    }
    if p == 1.0 {
        return Ok(s.values().iter().map(|v| v.abs()).sum());
    }
    if top == 0.0 {
        return Ok(0.0);
    }
    let sum: f64 = s.values().iter().map(|v| (v.abs() / top).powf(p)).sum();
    Ok(top * sum.powf(1.0 / p))
}
