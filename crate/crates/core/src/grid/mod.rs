//! Dyadic piecewise-constant functions on an interval.
//!
//! A [`GridFunction`] stores cell averages: sampling a [`ClosedForm`] yields
//! the exact average of the represented function over each cell, so every
//! integral functional of the grid equals the continuum value on unions of
//! cells.

mod closed_form;
mod levels;
pub mod quadrature;
mod trend;

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use closed_form::ClosedForm;
pub use levels::weak_lp_quasinorm_closed_form;
pub use trend::{
    depth_ladder, divergence_probe, divergence_probe_with, radius_ladder, TrendConfig, TrendReport, Verdict,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub left: f64,
    pub right: f64,
}

impl Interval {
    pub fn new(left: f64, right: f64) -> Result<Self> {
        if !(left.is_finite() && right.is_finite() && left < right) {
            return Err(Error::InvalidInput(format!("bad interval [{left}, {right}]")));
        }
        Ok(Interval { left, right })
    }

    pub(crate) const fn new_unchecked(left: f64, right: f64) -> Self {
        Interval { left, right }
    }

    /// `[-r, r]`.
    pub fn symmetric(r: f64) -> Result<Self> {
        Interval::new(-r, r)
    }

    pub fn length(&self) -> f64 {
        self.right - self.left
    }
}

/// Neumaier-compensated sum.
pub(crate) fn compensated_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    sum + c
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid", into = "RawGrid")]
pub struct GridFunction {
    domain: Interval,
    depth: u32,
    values: Vec<f64>,
    prefix: Option<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct RawGrid {
    domain: Interval,
    depth: u32,
    values: Vec<f64>,
}

impl TryFrom<RawGrid> for GridFunction {
    type Error = Error;
    fn try_from(raw: RawGrid) -> Result<Self> {
        GridFunction::new(raw.domain, raw.depth, raw.values)
    }
}

impl From<GridFunction> for RawGrid {
    fn from(g: GridFunction) -> Self {
        RawGrid { domain: g.domain, depth: g.depth, values: g.values }
    }
}

impl GridFunction {
    pub fn new(domain: Interval, depth: u32, values: Vec<f64>) -> Result<Self> {
        if depth > 40 || values.len() != 1usize << depth {
            return Err(Error::InvalidInput(format!(
                "depth {depth} needs {} values, got {}",
                1u64 << depth.min(63),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("value at cell {i} is not finite")));
        }
        Ok(GridFunction { domain, depth, values, prefix: None })
    }

    /// Depth inferred from the number of values, which must be a power of two.
    pub fn from_values(domain: Interval, values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::InvalidInput(format!("{n} cells is not a power of two")));
        }
        GridFunction::new(domain, n.trailing_zeros(), values)
    }

    pub fn constant(domain: Interval, depth: u32, c: f64) -> Result<Self> {
        GridFunction::new(domain, depth, vec![c; 1usize << depth])
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }
    pub fn depth(&self) -> u32 {
        self.depth
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
    pub fn n(&self) -> usize {
        self.values.len()
    }
    pub fn width(&self) -> f64 {
        self.domain.length() / self.n() as f64
    }

    pub fn cell(&self, i: usize) -> (f64, f64) {
        let w = self.width();
        let left = self.domain.left + i as f64 * w;
        let right = if i + 1 == self.n() { self.domain.right } else { self.domain.left + (i + 1) as f64 * w };
        (left, right)
    }

    pub fn center(&self, i: usize) -> f64 {
        let (l, r) = self.cell(i);
        0.5 * (l + r)
    }

    /// Index of the cell containing `x` (right-closed at the last cell).
    pub fn cell_of(&self, x: f64) -> Option<usize> {
        if x < self.domain.left || x > self.domain.right {
            return None;
        }
        let i = ((x - self.domain.left) / self.width()).floor() as usize;
        Some(i.min(self.n() - 1))
    }

    /// Running sums of `value·width`, `prefix[0] = 0`.
    pub fn prefix_sums(&self) -> Vec<f64> {
        if let Some(p) = &self.prefix {
            return p.clone();
        }
        let w = self.width();
        let mut p = Vec::with_capacity(self.n() + 1);
        p.push(0.0);
        let mut acc = 0.0;
        for v in &self.values {
            acc += v * w;
            p.push(acc);
        }
        p
    }

    pub fn with_prefix(mut self) -> Self {
        if self.prefix.is_none() {
            self.prefix = Some(self.prefix_sums());
        }
        self
    }

    pub fn prefix(&self) -> Option<&[f64]> {
        self.prefix.as_deref()
    }

    /// Splits every cell in two equal-valued halves.
    pub fn refine(&self) -> Self {
        let values = self.values.iter().flat_map(|&v| [v, v]).collect();
        GridFunction { domain: self.domain, depth: self.depth + 1, values, prefix: None }
    }

    pub fn abs(&self) -> Self {
        self.map_unchecked(f64::abs)
    }

    pub(crate) fn map_unchecked(&self, f: impl Fn(f64) -> f64) -> Self {
        GridFunction {
            domain: self.domain,
            depth: self.depth,
            values: self.values.iter().map(|&v| f(v)).collect(),
            prefix: None,
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        GridFunction::new(self.domain, self.depth, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn check_same_grid(&self, other: &GridFunction) -> Result<()> {
        if self.depth != other.depth || self.domain != other.domain {
            return Err(Error::DepthMismatch);
        }
        Ok(())
    }

    pub fn zip(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        GridFunction::new(self.domain, self.depth, values)
    }

    pub fn integral(&self) -> f64 {
        compensated_sum(self.values.iter().copied()) * self.width()
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `(Σ|v|^p·width)^{1/p}`; `p = ∞` gives `max |v|`.
    pub fn lp_norm(&self, p: f64) -> f64 {
        if p == f64::INFINITY {
            return self.values.iter().fold(0.0, |m, v| m.max(v.abs()));
        }
        let s = compensated_sum(self.values.iter().map(|v| v.abs().powf(p))) * self.width();
        s.powf(1.0 / p)
    }

    pub fn weighted_lp_norm(&self, w: &GridFunction, p: f64) -> Result<f64> {
        self.check_same_grid(w)?;
        let s = compensated_sum(self.values.iter().zip(&w.values).map(|(f, w)| f.abs().powf(p) * w)) * self.width();
        Ok(s.powf(1.0 / p))
    }

    /// `sup_t t·|{|f| > t}|^{1/p}`, attained as `t` increases to a cell value.
    pub fn weak_lp_quasinorm(&self, p: f64) -> f64 {
        let mut a: Vec<f64> = self.values.iter().map(|v| v.abs()).collect();
        a.sort_by(|x, y| y.total_cmp(x));
        let w = self.width();
        let mut best = 0.0f64;
        let mut i = 0;
        while i < a.len() {
            let v = a[i];
            let mut j = i;
            while j < a.len() && a[j] == v {
                j += 1;
            }
            // {|f| >= v} has j cells
            best = best.max(v * (j as f64 * w).powf(1.0 / p));
            i = j;
        }
        best
    }

    /// Stable identifier: domain, depth and an FNV-1a hash of the values.
    pub fn fingerprint(&self) -> String {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for v in &self.values {
            for b in v.to_bits().to_le_bytes() {
                h ^= u64::from(b);
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        }
        format!("grid[{},{}]@{}:{h:016x}", self.domain.left, self.domain.right, self.depth)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(self.n() * 48 + 64);
        let _ = writeln!(s, "# domain={},{} depth={}", self.domain.left, self.domain.right, self.depth);
        for (i, v) in self.values.iter().enumerate() {
            let (l, r) = self.cell(i);
            let _ = writeln!(s, "{i},{l},{r},{v}");
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty grid file".into()))?;
        let header = header.trim().strip_prefix('#').ok_or_else(|| Error::Parse("missing '#' header".into()))?.trim();
        let mut domain = None;
        let mut depth = None;
        for field in header.split_whitespace() {
            if let Some(d) = field.strip_prefix("domain=") {
                let (l, r) = d.split_once(',').ok_or_else(|| Error::Parse(format!("bad domain {d}")))?;
                domain = Some(Interval::new(parse_f64(l)?, parse_f64(r)?)?);
            } else if let Some(k) = field.strip_prefix("depth=") {
                depth = Some(k.parse::<u32>().map_err(|e| Error::Parse(format!("bad depth {k}: {e}")))?);
            }
        }
        let domain = domain.ok_or_else(|| Error::Parse("header lacks domain".into()))?;
        let depth = depth.ok_or_else(|| Error::Parse("header lacks depth".into()))?;
        let mut values = Vec::new();
        for (row, line) in lines.enumerate() {
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols.len() != 4 {
                return Err(Error::Parse(format!("row {row}: expected 4 columns")));
            }
            let idx: usize = cols[0].parse().map_err(|e| Error::Parse(format!("row {row}: {e}")))?;
            if idx != row {
                return Err(Error::Parse(format!("row {row}: cell index {idx} out of order")));
            }
            values.push(parse_f64(cols[3])?);
        }
        GridFunction::new(domain, depth, values)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        GridFunction::from_csv(&std::fs::read_to_string(path)?)
    }
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("bad number {s:?}: {e}")))
}

/// Exact cell averages of `cf` on the dyadic grid of `domain`.
pub fn sample(cf: &ClosedForm, domain: Interval, depth: u32) -> Result<GridFunction> {
    let values = cf.cell_averages(domain, depth)?;
    GridFunction::new(domain, depth, values)
}

/// `‖cf‖_{L^p(domain)}` from the exact integral of `cf^p`.
pub fn lp_norm_closed_form(cf: &ClosedForm, domain: Interval, p: f64) -> Result<f64> {
    let integrand = if p == 1.0 { cf.clone() } else { cf.clone().pow(p) };
    let v = integrand.integral(domain)?.powf(1.0 / p);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NotInLp { p })
    }
}

/// L^p norm of `cf` along a refinement ladder: the grid at each depth holds
/// the exact cell averages of `|cf|^p`, so a non-integrable power shows up
/// as an overflowing cell.
pub fn lp_refinement_trend(
    cf: &ClosedForm,
    domain: Interval,
    p: f64,
    depths: &[f64],
    cfg: &TrendConfig,
) -> Result<TrendReport> {
    let powered = if p == 1.0 { cf.clone() } else { cf.clone().pow(p) };
    divergence_probe(
        depths,
        |k| {
            let g = sample(&powered, domain, k as u32)?;
            Ok(g.integral().powf(1.0 / p))
        },
        cfg,
    )
}

/// L^p norm of `cf` over `[-R, R]` along a radius ladder.
pub fn lp_radius_trend(cf: &ClosedForm, p: f64, radii: &[f64], cfg: &TrendConfig) -> Result<TrendReport> {
    divergence_probe(radii, |r| lp_norm_closed_form(cf, Interval::symmetric(r)?, p), cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Interval {
        Interval::new(0.0, 1.0).unwrap()
    }

    fn half_indicator(depth: u32) -> GridFunction {
        sample(&ClosedForm::constant(1.0).restrict(Interval::new(0.0, 0.5).unwrap()), unit(), depth).unwrap()
    }

    #[test]
    fn norms_of_simple_functions() {
        let one = GridFunction::constant(unit(), 5, 1.0).unwrap();
        for p in [0.5, 1.0, 2.0, 7.0, f64::INFINITY] {
            assert!((one.lp_norm(p) - 1.0).abs() < 1e-15);
        }
        let chi = half_indicator(4);
        assert!((chi.lp_norm(2.0) - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((chi.weak_lp_quasinorm(2.0) - 0.5f64.sqrt()).abs() < 1e-15);
        let c = GridFunction::constant(unit(), 3, 3.5).unwrap();
        assert_eq!(c.weak_lp_quasinorm(1.7), 3.5);
    }

    #[test]
    fn weighted_norm_reduces_and_checks_grid() {
        let f = half_indicator(4);
        let one = GridFunction::constant(unit(), 4, 1.0).unwrap();
        assert!((f.weighted_lp_norm(&one, 3.0).unwrap() - f.lp_norm(3.0)).abs() < 1e-15);
        let coarse = GridFunction::constant(unit(), 3, 1.0).unwrap();
        assert!(matches!(f.weighted_lp_norm(&coarse, 2.0), Err(Error::DepthMismatch)));
    }

    #[test]
    fn csv_roundtrip() {
        let d = Interval::new(-1.5, 2.0).unwrap();
        let f = sample(&ClosedForm::abs_power(0.1, 0.5), d, 5).unwrap();
        let text = f.to_csv();
        assert!(text.starts_with("# domain=-1.5,2 depth=5\n0,-1.5,"));
        assert_eq!(GridFunction::from_csv(&text).unwrap(), f);
    }

    #[test]
    fn prefix_matches_values() {
        let f = sample(&ClosedForm::abs_power(0.3, -0.5), unit(), 6).unwrap().with_prefix();
        let p = f.prefix().unwrap();
        for i in 0..f.n() {
            assert!((p[i + 1] - p[i] - f.values()[i] * f.width()).abs() < 1e-14);
        }
    }

    #[test]
    fn example1_lp_trends() {
        let cfg = TrendConfig::default();
        let f = ClosedForm::example1();
        let depths = depth_ladder(8, 16);
        let l1 = lp_refinement_trend(&f, unit(), 1.0, &depths, &cfg).unwrap();
        assert_eq!(l1.verdict, Verdict::Plateau);
        assert!((l1.last().unwrap() - 1.0 / 2f64.ln()).abs() < 1e-9);
        for p in [1.1, 1.5] {
            let t = lp_refinement_trend(&f, unit(), p, &depths, &cfg).unwrap();
            assert_eq!(t.verdict, Verdict::Divergent, "p = {p}");
        }
    }
}
