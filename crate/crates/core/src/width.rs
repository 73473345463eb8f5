//! Per-sample upper bounds on the restricted support function
//! f(H, S) = sup { <H, W> : W in S, ||W||_F = 1 } for each condition set,
//! and Monte Carlo estimation of the Gaussian mesh width omega(S).
//!
//! Bounds follow the same pattern for every kind: a linear "budget" built
//! from the spectrum of H buys the removal of the c smallest tail terms,
//! where c is the largest integer whose removal the budget still affords;
//! the remaining energy, minus the squared budget spread over the free
//! coordinates, bounds f(H, S)^2. If no c is affordable the bound falls
//! back to ||H||_F (plain Cauchy-Schwarz). Spectra here are indexed
//! increasingly ("i-th smallest"), via the reversed view over descending
//! storage.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::matrix_ops::{
    is_symmetric, sorted_svd, sorted_symmetric_eigen, svec_len, SYMMETRY_TOL,
};
use crate::measurements::{gaussian_matrix, gue_sample};
use crate::rng::{derive_seed, rng_from_seed};
use crate::thresholds::ThresholdKind;
use crate::{Error, Result};

/// Cut selection: scanning from `cmax` down, the largest c in
/// [0, cmax] with budget(c) >= (total - c) * tail[c-1] (tail is increasing;
/// the c = 0 condition is budget >= 0). Returns (c, remaining budget).
fn largest_admissible_cut(budget0: f64, tail: &[f64], cmax: usize, total: usize) -> Option<(usize, f64)> {
    let mut prefix = vec![0.0; tail.len() + 1];
    for (i, &t) in tail.iter().enumerate() {
        prefix[i + 1] = prefix[i] + t;
    }
    for c in (0..=cmax.min(tail.len())).rev() {
        let budget = budget0 - prefix[c];
        let rhs = if c >= 1 { (total - c) as f64 * tail[c - 1] } else { 0.0 };
        if budget >= rhs {
            return Some((c, budget));
        }
    }
    None
}

fn sum_sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

fn increasing_singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let (_, mut s, _) = sorted_svd(m);
    s.reverse();
    s
}

fn increasing_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let (mut vals, _) = sorted_symmetric_eigen(m);
    vals.reverse();
    vals
}

fn round_rank(beta: f64, n: usize) -> usize {
    (beta * n as f64).round() as usize
}

/// Per-sample upper bound on f(H, S_kind) at rank fraction beta.
/// Supported kinds: Strong, Sectional, Weak (Gaussian H) and PsdWeak,
/// PsdStrong (symmetric H). The bound never exceeds ||H||_F.
pub fn sample_bound(kind: ThresholdKind, h: &DMatrix<f64>, beta: f64) -> Result<f64> {
    let n = h.nrows();
    if h.ncols() != n {
        return Err(Error::ShapeMismatch(format!(
            "sample_bound needs a square matrix, got {}x{}",
            n,
            h.ncols()
        )));
    }
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::Domain(format!("beta {beta} outside [0, 1]")));
    }
    let r = round_rank(beta, n);
    let frob = h.norm();
    match kind {
        ThresholdKind::Strong => {
            let s = increasing_singular_values(h);
            let top_r: f64 = s[n - r..].iter().sum();
            let all: f64 = s.iter().sum();
            let budget0 = all - 2.0 * top_r; // h^T z
            match largest_admissible_cut(budget0, &s, n - r, n) {
                Some((c, budget)) => {
                    let rem = sum_sq(&s[c..]) - budget * budget / (n - c) as f64;
                    Ok(rem.max(0.0).sqrt())
                }
                None => Ok(frob),
            }
        }
        ThresholdKind::Sectional => {
            let h1 = increasing_singular_values(&h.view((0, 0), (r, r)).into_owned());
            let h2 = increasing_singular_values(&h.view((r, r), (n - r, n - r)).into_owned());
            let budget0 = h2.iter().sum::<f64>() - h1.iter().sum::<f64>();
            match largest_admissible_cut(budget0, &h2, n - r, n) {
                Some((c, budget)) => {
                    let rem = frob * frob - sum_sq(&h2[..c]) - budget * budget / (n - c) as f64;
                    Ok(rem.max(0.0).sqrt())
                }
                None => Ok(frob),
            }
        }
        ThresholdKind::Weak => {
            let diag_sum: f64 = (0..r).map(|i| h[(i, i)]).sum();
            let h2 = increasing_singular_values(&h.view((r, r), (n - r, n - r)).into_owned());
            let budget0 = diag_sum + h2.iter().sum::<f64>();
            match largest_admissible_cut(budget0, &h2, n - r, n) {
                Some((c, budget)) => {
                    let rem = frob * frob - sum_sq(&h2[..c]) - budget * budget / (n - c) as f64;
                    Ok(rem.max(0.0).sqrt())
                }
                None => Ok(frob),
            }
        }
        ThresholdKind::PsdWeak => {
            if !is_symmetric(h, SYMMETRY_TOL) {
                return Err(Error::NotSymmetric("PSD width sample".into()));
            }
            let diag_sum: f64 = (0..r).map(|i| h[(i, i)]).sum();
            let h2 = increasing_eigenvalues(&h.view((r, r), (n - r, n - r)).into_owned());
            let budget0 = diag_sum + h2.iter().sum::<f64>();
            match largest_admissible_cut(budget0, &h2, n - r, n) {
                Some((c, budget)) => {
                    let rem = frob * frob - sum_sq(&h2[..c]) - budget * budget / (n - c) as f64;
                    Ok(rem.max(0.0).sqrt())
                }
                None => Ok(frob),
            }
        }
        ThresholdKind::PsdStrong => {
            if !is_symmetric(h, SYMMETRY_TOL) {
                return Err(Error::NotSymmetric("PSD width sample".into()));
            }
            let ev = increasing_eigenvalues(h);
            let pos: Vec<f64> = ev.iter().copied().filter(|&l| l > 0.0).collect();
            let neg_count = ev.iter().filter(|&&l| l < 0.0).count();
            if neg_count < r {
                return Ok(frob);
            }
            // magnitudes of the r most negative eigenvalues, increasing
            let h2: Vec<f64> = ev[..r].iter().rev().map(|&l| -l).collect();
            let budget0 = pos.iter().sum::<f64>() - h2.iter().sum::<f64>();
            let t = pos.len() + r;
            match largest_admissible_cut(budget0, &pos, pos.len(), t) {
                Some((c, budget)) => {
                    let rem = sum_sq(&pos) + sum_sq(&h2) - sum_sq(&pos[..c])
                        - budget * budget / (t - c) as f64;
                    Ok(rem.max(0.0).sqrt())
                }
                None => Ok(frob),
            }
        }
        other => Err(Error::Domain(format!(
            "sample_bound is defined for strong/sectional/weak/psd-weak/psd-strong, not {}",
            other.name()
        ))),
    }
}

/// Monte Carlo width estimate for one (kind, n, beta).
#[derive(Debug, Clone, PartialEq)]
pub struct WidthEstimate {
    pub kind: ThresholdKind,
    pub n: usize,
    pub beta: f64,
    pub samples: usize,
    /// Mean per-sample bound; for PSD kinds this is E[B] / sqrt(2), the
    /// width in svec coordinates.
    pub mean_bound: f64,
    pub std_err: f64,
}

impl WidthEstimate {
    /// Ambient coordinate dimension the width squares against.
    pub fn ambient_dim(&self) -> usize {
        if self.kind.is_psd() {
            svec_len(self.n)
        } else {
            self.n * self.n
        }
    }

    /// Sampling rate the escape condition omega^2 < m implies:
    /// mean_bound^2 over the ambient dimension.
    pub fn mu_implied(&self) -> f64 {
        self.mean_bound * self.mean_bound / self.ambient_dim() as f64
    }
}

/// Estimate omega(S_kind) by averaging per-sample bounds over iid H
/// (Gaussian for the general kinds, GUE for the PSD kinds). Per-sample
/// seeds are derived up front, so the aggregate is deterministic for a
/// fixed (seed, samples) pair regardless of worker count.
pub fn estimate_width(
    kind: ThresholdKind,
    n: usize,
    beta: f64,
    samples: usize,
    seed: u64,
) -> Result<WidthEstimate> {
    if samples < 2 {
        return Err(Error::Domain("need at least 2 width samples".into()));
    }
    let psd = kind.is_psd();
    let bounds: Vec<f64> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let s = derive_seed(seed, &[i]);
            let h = if psd {
                gue_sample(n, s)
            } else {
                gaussian_matrix(n, n, &mut rng_from_seed(s))
            };
            let b = sample_bound(kind, &h, beta)?;
            Ok(if psd { b / std::f64::consts::SQRT_2 } else { b })
        })
        .collect::<Result<_>>()?;
    let mean = bounds.iter().sum::<f64>() / samples as f64;
    let var = bounds.iter().map(|b| (b - mean) * (b - mean)).sum::<f64>() / (samples - 1) as f64;
    Ok(WidthEstimate {
        kind,
        n,
        beta,
        samples,
        mean_bound: mean,
        std_err: (var / samples as f64).sqrt(),
    })
}

/// CSV schema: `kind,n,beta,samples,mean_bound,std_err,mu_implied`.
pub fn width_to_csv(estimates: &[WidthEstimate]) -> String {
    let mut out = String::from("kind,n,beta,samples,mean_bound,std_err,mu_implied\n");
    for e in estimates {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            e.kind.name(),
            e.n,
            e.beta,
            e.samples,
            e.mean_bound,
            e.std_err,
            e.mu_implied()
        ));
    }
    out
}

/// Parse [`width_to_csv`] output (the derived mu_implied column is
/// recomputed, not stored).
pub fn width_from_csv(text: &str) -> Result<Vec<WidthEstimate>> {
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("kind,") {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 7 {
            return Err(Error::CsvParse(format!("expected 7 fields: {line}")));
        }
        let kind = ThresholdKind::parse(f[0])
            .ok_or_else(|| Error::CsvParse(format!("unknown kind {}", f[0])))?;
        let usize_of = |s: &str| -> Result<usize> {
            s.parse().map_err(|_| Error::CsvParse(format!("bad count {s}")))
        };
        let num = |s: &str| -> Result<f64> {
            s.parse().map_err(|_| Error::CsvParse(format!("bad float {s}")))
        };
        out.push(WidthEstimate {
            kind,
            n: usize_of(f[1])?,
            beta: num(f[2])?,
            samples: usize_of(f[3])?,
            mean_bound: num(f[4])?,
            std_err: num(f[5])?,
        });
    }
    Ok(out)
}
