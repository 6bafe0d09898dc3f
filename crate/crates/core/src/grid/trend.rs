//! Finite-scale trend classification: a functional evaluated along a
//! refinement or radius ladder, summarised as plateau / divergent /
//! inconclusive.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::{self, Exec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrendConfig {
    /// Pairwise relative spread allowed among the last three values.
    pub plateau_rel: f64,
    /// Minimum log-log slope over the last three points for divergence.
    pub slope_min: f64,
    /// Minimum last/first ratio for divergence.
    pub growth_factor: f64,
}

impl Default for TrendConfig {
    fn default() -> Self {
        TrendConfig { plateau_rel: 0.05, slope_min: 0.1, growth_factor: 10.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Plateau,
    Divergent,
    Inconclusive,
}

/// `values[i] = None` marks overflow (a non-finite or non-integrable
/// evaluation); it serialises as JSON `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendReport {
    pub params: Vec<f64>,
    pub values: Vec<Option<f64>>,
    pub verdict: Verdict,
    /// Least-squares slope of log value against log parameter over the last
    /// three points; `None` when one of them overflowed.
    pub slope: Option<f64>,
}

impl TrendReport {
    pub fn last(&self) -> Option<f64> {
        self.values.last().copied().flatten()
    }

    pub fn has_overflow(&self) -> bool {
        self.values.iter().any(Option::is_none)
    }

    /// Classifies precomputed values.
    pub fn classify(params: Vec<f64>, values: Vec<Option<f64>>, cfg: &TrendConfig) -> Result<Self> {
        check_params(&params)?;
        if params.len() != values.len() {
            return Err(Error::InvalidInput("params and values differ in length".into()));
        }
        let values: Vec<Option<f64>> = values.into_iter().map(|v| v.filter(|x| x.is_finite())).collect();
        let n = values.len();
        let tail = &values[n - 3..];
        let tail_params = &params[n - 3..];

        if values.iter().any(Option::is_none) {
            return Ok(TrendReport { params, values, verdict: Verdict::Divergent, slope: None });
        }
        let v: Vec<f64> = tail.iter().map(|x| x.unwrap()).collect();
        let slope = log_slope(tail_params, &v);
        let plateau = (0..3).all(|i| {
            (i + 1..3).all(|j| {
                let (a, b) = (v[i], v[j]);
                let scale = a.abs().max(b.abs());
                scale == 0.0 || (a - b).abs() < cfg.plateau_rel * scale
            })
        });
        let first = values[0].unwrap();
        let last = v[2];
        let verdict = if plateau {
            Verdict::Plateau
        } else if slope > cfg.slope_min && last > cfg.growth_factor * first {
            Verdict::Divergent
        } else {
            Verdict::Inconclusive
        };
        Ok(TrendReport { params, values, verdict, slope: Some(slope) })
    }
}

fn check_params(params: &[f64]) -> Result<()> {
    if params.len() < 4 {
        return Err(Error::InvalidInput("a trend needs at least 4 parameters".into()));
    }
    if params.windows(2).any(|w| !(w[1] > w[0])) || params[0] <= 0.0 {
        return Err(Error::InvalidInput("trend parameters must be positive and strictly increasing".into()));
    }
    Ok(())
}

/// Least-squares slope of `ln v` against `ln p`. Nonpositive values make the
/// log meaningless; a run of zeros has slope 0.
fn log_slope(p: &[f64], v: &[f64]) -> f64 {
    if v.iter().any(|&x| x <= 0.0) {
        return if v.iter().all(|&x| x == v[0]) { 0.0 } else { f64::NAN };
    }
    let xs: Vec<f64> = p.iter().map(|x| x.ln()).collect();
    let ys: Vec<f64> = v.iter().map(|x| x.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Evaluates `eval` at each parameter (in parallel when enabled) and
/// classifies the result. Failed evaluations count as overflow.
pub fn divergence_probe<F>(params: &[f64], eval: F, cfg: &TrendConfig) -> Result<TrendReport>
where
    F: Fn(f64) -> Result<f64> + Sync + Send,
{
    divergence_probe_with(Exec::default(), params, eval, cfg)
}

pub fn divergence_probe_with<F>(exec: Exec, params: &[f64], eval: F, cfg: &TrendConfig) -> Result<TrendReport>
where
    F: Fn(f64) -> Result<f64> + Sync + Send,
{
    check_params(params)?;
    let values = par::map_indices(exec, params.len(), |i| eval(params[i]).ok().filter(|v| v.is_finite()));
    TrendReport::classify(params.to_vec(), values, cfg)
}

/// Refinement depths `lo..=hi` as trend parameters.
pub fn depth_ladder(lo: u32, hi: u32) -> Vec<f64> {
    (lo..=hi).map(f64::from).collect()
}

/// Radii `2^lo, ..., 2^hi`.
pub fn radius_ladder(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|m| 2f64.powi(m)).collect()
}
