//! The uncentered Hardy–Littlewood maximal operator restricted to the grid
//! domain, taken over grid-aligned windows.
//!
//! `maximal_naive` enumerates every window and serves as the oracle.
//! `maximal_fast` splits the grid recursively; windows crossing a split are
//! handled with convex hulls of the prefix-sum points, because the best
//! window average from a fixed left end is a tangent slope.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::par::{self, Exec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum WindowFamily {
    #[default]
    All,
    Dyadic,
}

/// Below this many cells a subproblem of the fast algorithm is not split
/// across threads.
const PAR_CUTOFF: usize = 1 << 12;

/// Prefix sums of `|f|·width`.
fn abs_prefix(f: &GridFunction) -> Vec<f64> {
    let w = f.width();
    let mut p = Vec::with_capacity(f.n() + 1);
    p.push(0.0);
    let mut acc = 0.0;
    for v in f.values() {
        acc += v.abs() * w;
        p.push(acc);
    }
    p
}

#[inline]
fn window_avg(p: &[f64], width: f64, l: usize, r: usize) -> f64 {
    (p[r + 1] - p[l]) / ((r - l + 1) as f64 * width)
}

fn with_values(f: &GridFunction, values: Vec<f64>) -> GridFunction {
    GridFunction::new(f.domain(), f.depth(), values).expect("maximal values are finite")
}

pub fn maximal_naive(f: &GridFunction, family: WindowFamily) -> GridFunction {
    maximal_naive_with(Exec::default(), f, family)
}

pub fn maximal_naive_with(exec: Exec, f: &GridFunction, family: WindowFamily) -> GridFunction {
    let out = match family {
        WindowFamily::All => naive_all(exec, f),
        WindowFamily::Dyadic => dyadic(f),
    };
    with_values(f, out)
}

fn naive_all(exec: Exec, f: &GridFunction) -> Vec<f64> {
    let n = f.n();
    let width = f.width();
    let p = abs_prefix(f);
    let chunks = if matches!(exec, Exec::Parallel) { n.min(64) } else { 1 };
    let per = n.div_ceil(chunks);
    let partial = par::map_indices(exec, chunks, |c| {
        let mut out: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
        let mut suffix = vec![0.0; n];
        for l in (c * per)..((c + 1) * per).min(n) {
            // suffix[i] = max_{r >= i} avg(l..=r)
            let mut best = f64::NEG_INFINITY;
            for r in (l..n).rev() {
                let a = if r == l { f.values()[l].abs() } else { window_avg(&p, width, l, r) };
                best = best.max(a);
                suffix[r] = best;
            }
            for i in l..n {
                if suffix[i] > out[i] {
                    out[i] = suffix[i];
                }
            }
        }
        out
    });
    let mut out = partial[0].clone();
    for part in &partial[1..] {
        for (o, v) in out.iter_mut().zip(part) {
            *o = o.max(*v);
        }
    }
    out
}

fn dyadic(f: &GridFunction) -> Vec<f64> {
    let n = f.n();
    let width = f.width();
    let p = abs_prefix(f);
    let mut out: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
    let mut len = 2;
    while len <= n {
        for start in (0..n).step_by(len) {
            let a = window_avg(&p, width, start, start + len - 1);
            for o in &mut out[start..start + len] {
                *o = o.max(a);
            }
        }
        len *= 2;
    }
    out
}

/// Dyadic maximal function over the union of the grids shifted by 0, 1/3
/// and 2/3 of the block length (alternating direction by level). Blocks may
/// stick out of the domain; outside it `f` counts as zero while the average
/// is still taken over the full block.
pub fn maximal_shifted_dyadic(f: &GridFunction) -> GridFunction {
    let n = f.n() as i64;
    let width = f.width();
    let p = abs_prefix(f);
    let psum = |a: i64, b: i64| -> f64 {
        // integral over cells [a, b) clipped to the domain
        let a = a.clamp(0, n) as usize;
        let b = b.clamp(0, n) as usize;
        p[b] - p[a]
    };
    let mut out: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
    for third in 0..3i64 {
        let mut len = 1i64;
        let mut level = 0;
        while len <= 4 * n {
            let sign = if level % 2 == 0 { 1 } else { -1 };
            let offset = (sign * ((third * len + 1) / 3)).rem_euclid(len);
            let mut start = offset - len;
            while start < n {
                let end = start + len;
                if end > 0 {
                    let a = psum(start, end) / (len as f64 * width);
                    for i in start.max(0)..end.min(n) {
                        let o = &mut out[i as usize];
                        *o = o.max(a);
                    }
                }
                start = end;
            }
            len *= 2;
            level += 1;
        }
    }
    with_values(f, out)
}

pub fn maximal_fast(f: &GridFunction) -> GridFunction {
    maximal_fast_with(Exec::default(), f)
}

pub fn maximal_fast_with(exec: Exec, f: &GridFunction) -> GridFunction {
    let p = abs_prefix(f);
    let mut out: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
    solve(exec, &p, f.width(), 0, &mut out);
    with_values(f, out)
}

/// Fills `out` (covering cells `base..base+out.len()`) with the maximum over
/// windows inside that range, given that `out` starts as `|f|`.
fn solve(exec: Exec, p: &[f64], width: f64, base: usize, out: &mut [f64]) {
    let len = out.len();
    if len <= 1 {
        return;
    }
    let half = len / 2;
    let mid = base + half;
    let crossing = crossing_maxima(p, width, base, mid, base + len);
    {
        let (left, right) = out.split_at_mut(half);
        if len >= PAR_CUTOFF {
            par::join(exec, || solve(exec, p, width, base, left), || solve(exec, p, width, mid, right));
        } else {
            solve(exec, p, width, base, left);
            solve(exec, p, width, mid, right);
        }
    }
    for (o, c) in out.iter_mut().zip(crossing) {
        *o = o.max(c);
    }
}

#[inline]
fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// For cells in `[lo, hi)`, the best average over windows `[l, r]` with
/// `lo <= l < mid <= r < hi` that contain the cell.
fn crossing_maxima(p: &[f64], width: f64, lo: usize, mid: usize, hi: usize) -> Vec<f64> {
    let pt = |k: usize| (k as f64, p[k]);

    // right-end points k = r + 1 in (mid, hi]; upper hull
    let mut upper: Vec<usize> = Vec::with_capacity(hi - mid);
    for k in (mid + 1)..=hi {
        while upper.len() >= 2 && cross(pt(upper[upper.len() - 2]), pt(upper[upper.len() - 1]), pt(k)) >= 0.0 {
            upper.pop();
        }
        upper.push(k);
    }
    // left-end points k = l in [lo, mid); lower hull
    let mut lower: Vec<usize> = Vec::with_capacity(mid - lo);
    for k in lo..mid {
        while lower.len() >= 2 && cross(pt(lower[lower.len() - 2]), pt(lower[lower.len() - 1]), pt(k)) <= 0.0 {
            lower.pop();
        }
        lower.push(k);
    }

    let mut out = vec![0.0; hi - lo];

    // g(l) = max_r avg(l, r); the slope from (l, P[l]) along the upper hull
    // is unimodal, so the tangent point is found by binary search
    let mut run = f64::NEG_INFINITY;
    for l in lo..mid {
        let q = pt(l);
        let (mut a, mut b) = (0usize, upper.len() - 1);
        while a < b {
            let m = (a + b) / 2;
            if cross(q, pt(upper[m]), pt(upper[m + 1])) >= 0.0 {
                a = m + 1;
            } else {
                b = m;
            }
        }
        let k = upper[a];
        let mut g = f64::NEG_INFINITY;
        for kk in k.saturating_sub(2).max(mid + 1)..=(k + 2).min(hi) {
            g = g.max(window_avg(p, width, l, kk - 1));
        }
        run = run.max(g);
        out[l - lo] = run;
    }

    // h(r) = max_l avg(l, r); tangent from (r+1, P[r+1]) to the lower hull
    let mut run = f64::NEG_INFINITY;
    for r in (mid..hi).rev() {
        let q = pt(r + 1);
        let (mut a, mut b) = (0usize, lower.len() - 1);
        while a < b {
            let m = (a + b) / 2;
            // move right while the next hull point gives a larger slope to q
            if cross(pt(lower[m]), pt(lower[m + 1]), q) > 0.0 {
                a = m + 1;
            } else {
                b = m;
            }
        }
        let k = lower[a];
        let mut h = f64::NEG_INFINITY;
        for kk in k.saturating_sub(2).max(lo)..=(k + 2).min(mid - 1) {
            h = h.max(window_avg(p, width, kk, r));
        }
        run = run.max(h);
        out[r - lo] = run;
    }
    out
}

/// `M^k f` by repeated application of [`maximal_fast`].
pub fn maximal_iterate(f: &GridFunction, k: usize) -> Result<GridFunction> {
    if k == 0 {
        return Err(Error::InvalidInput("maximal_iterate needs k >= 1".into()));
    }
    let mut g = maximal_fast(f);
    for _ in 1..k {
        g = maximal_fast(&g);
    }
    Ok(g)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub p: f64,
    pub weight_id: String,
    pub lower_bound: f64,
    pub bound: f64,
    pub trials: usize,
    pub seed: u64,
}

/// Range of the log-uniform test values, `exp(±LOG_SPREAD)`.
const LOG_SPREAD: f64 = 6.907_755_278_982_137; // ln 1000

fn random_test_function(f: &GridFunction, seed: u64, trial: usize) -> GridFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    let values = (0..f.n()).map(|_| rng.gen_range(-LOG_SPREAD..LOG_SPREAD).exp()).collect();
    GridFunction::new(f.domain(), f.depth(), values).expect("finite test values")
}

fn spikes(w: &GridFunction) -> Vec<GridFunction> {
    let n = w.n();
    let mut idx = vec![0, n / 2, n - 1];
    idx.dedup();
    idx.into_iter()
        .map(|i| {
            let mut v = vec![0.0; n];
            v[i] = 1.0;
            GridFunction::new(w.domain(), w.depth(), v).expect("finite spike")
        })
        .collect()
}

pub fn check_positive(w: &GridFunction) -> Result<()> {
    match w.values().iter().position(|&v| !(v > 0.0)) {
        Some(index) => Err(Error::NonPositiveWeight { index }),
        None => Ok(()),
    }
}

/// Empirical lower bound for `‖M‖` on `L^p_w`, with `B = 2·lower_bound`.
pub fn op_norm_estimate(w: &GridFunction, p: f64, trials: usize, seed: u64) -> Result<NormEstimate> {
    op_norm_estimate_with(Exec::default(), w, p, trials, seed)
}

pub fn op_norm_estimate_with(exec: Exec, w: &GridFunction, p: f64, trials: usize, seed: u64) -> Result<NormEstimate> {
    if !(p > 1.0) {
        return Err(Error::InvalidInput(format!("operator norm needs p > 1, got {p}")));
    }
    check_positive(w)?;
    let pd = p / (p - 1.0);
    let ratio = |g: &GridFunction| -> f64 {
        let mg = maximal_fast(g);
        let num = mg.weighted_lp_norm(w, p).expect("same grid");
        let den = g.weighted_lp_norm(w, p).expect("same grid");
        if den > 0.0 {
            num / den
        } else {
            1.0
        }
    };
    let mut probes = vec![GridFunction::constant(w.domain(), w.depth(), 1.0)?, w.map(|v| v.powf(1.0 - pd))?];
    probes.extend(spikes(w));
    let probe_best = probes.iter().map(&ratio).fold(1.0f64, f64::max);
    let trial_best =
        par::map_indices(exec, trials, |t| ratio(&random_test_function(w, seed, t))).into_iter().fold(1.0f64, f64::max);
    // Mg >= g cellwise, so every ratio is at least 1 up to rounding
    let lower_bound = probe_best.max(trial_best);
    Ok(NormEstimate { p, weight_id: w.fingerprint(), lower_bound, bound: 2.0 * lower_bound, trials, seed })
}

/// Empirical lower bound for `‖M‖` on weak `L^p` of the grid domain.
pub fn op_norm_estimate_weak(template: &GridFunction, p: f64, trials: usize, seed: u64) -> Result<NormEstimate> {
    if !(p > 1.0) {
        return Err(Error::InvalidInput(format!("operator norm needs p > 1, got {p}")));
    }
    let ratio = |g: &GridFunction| -> f64 {
        let den = g.weak_lp_quasinorm(p);
        if den > 0.0 {
            maximal_fast(g).weak_lp_quasinorm(p) / den
        } else {
            1.0
        }
    };
    let mut probes = vec![GridFunction::constant(template.domain(), template.depth(), 1.0)?];
    probes.extend(spikes(template));
    let probe_best = probes.iter().map(&ratio).fold(1.0f64, f64::max);
    let trial_best = par::map_indices(Exec::default(), trials, |t| ratio(&random_test_function(template, seed, t)))
        .into_iter()
        .fold(1.0f64, f64::max);
    let lower_bound = probe_best.max(trial_best);
    Ok(NormEstimate {
        p,
        weight_id: format!("weak-lp:{}", template.fingerprint()),
        lower_bound,
        bound: 2.0 * lower_bound,
        trials,
        seed,
    })
}
