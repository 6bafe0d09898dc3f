//! The circle side: Szegő test, outer functions, and weighted Hardy-space
//! membership.
//!
//! Circle data is sampled on `2^m` points `θ_j = 2π(j + o)/2^m`, with the
//! offset `o` either `0` or `1/2`. Weights vanishing at a boundary point
//! (such as `|1 − e^{iθ}|^a`) are sampled at midpoints, `o = 1/2`, so that
//! no sample hits the zero.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::majorant::{Evidence, MembershipClass, MembershipReport, MembershipVerdict};
use crate::maximal::WindowFamily;
use crate::par::{self, Exec};
use crate::weights::{conjugate, ApReport};

/// Samples below this count as underflow in the Szegő test.
pub const SZEGO_FLOOR: f64 = 1e-150;
/// Tail energy of the log-coefficients below which an outer function is
/// considered resolved.
pub const TAIL_ENERGY_TOL: f64 = 1e-12;
/// Analytic-defect threshold for accepting `f·h` as analytic.
pub const DEFECT_TOL: f64 = 1e-3;
/// Defect above which `f·h` is treated as far from analytic.
pub const DEFECT_REJECT: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Offset {
    Grid,
    Midpoint,
}

impl Offset {
    fn shift(self) -> f64 {
        match self {
            Offset::Grid => 0.0,
            Offset::Midpoint => 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleGrid<T> {
    m: u32,
    offset: Offset,
    values: Vec<T>,
}

impl<T> CircleGrid<T> {
    pub fn new(offset: Offset, values: Vec<T>) -> Result<Self> {
        let n = values.len();
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::InvalidInput(format!("circle sample count must be a power of two >= 2, got {n}")));
        }
        Ok(CircleGrid { m: n.trailing_zeros(), offset, values })
    }
    pub fn m(&self) -> u32 {
        self.m
    }
    pub fn n(&self) -> usize {
        self.values.len()
    }
    pub fn offset(&self) -> Offset {
        self.offset
    }
    pub fn values(&self) -> &[T] {
        &self.values
    }
    pub fn theta(&self, j: usize) -> f64 {
        theta(self.n(), self.offset, j)
    }
}

fn theta(n: usize, offset: Offset, j: usize) -> f64 {
    2.0 * PI * (j as f64 + offset.shift()) / n as f64
}

impl CircleGrid<f64> {
    pub fn to_complex(&self) -> CircleGrid<Complex64> {
        CircleGrid {
            m: self.m,
            offset: self.offset,
            values: self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }
}

impl CircleGrid<Complex64> {
    /// Real parts, provided every imaginary part vanishes.
    pub fn to_real(&self) -> Result<CircleGrid<f64>> {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(j, z)| {
                if z.im == 0.0 {
                    Ok(z.re)
                } else {
                    Err(Error::InvalidInput(format!("sample {j} has a nonzero imaginary part")))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CircleGrid { m: self.m, offset: self.offset, values })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,theta,value_re,value_im\n");
        for (j, z) in self.values.iter().enumerate() {
            let _ = writeln!(out, "{j},{:e},{:e},{:e}", self.theta(j), z.re, z.im);
        }
        out
    }

    /// Parses `j,theta,value_re,value_im` rows; the offset is read off `θ_0`.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (line_no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (line_no == 0 && line.starts_with('j')) {
                continue;
            }
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols.len() != 4 {
                return Err(Error::Parse(format!("line {}: expected 4 columns", line_no + 1)));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|e| Error::Parse(format!("line {}: {e}", line_no + 1)));
            let j: usize = cols[0].parse().map_err(|e| Error::Parse(format!("line {}: {e}", line_no + 1)))?;
            if j != rows.len() {
                return Err(Error::Parse(format!("line {}: expected index {}", line_no + 1, rows.len())));
            }
            rows.push((num(cols[1])?, Complex64::new(num(cols[2])?, num(cols[3])?)));
        }
        let n = rows.len();
        if n < 2 {
            return Err(Error::Parse("need at least two samples".into()));
        }
        let step = 2.0 * PI / n as f64;
        let offset = if rows[0].0.abs() < 1e-9 * step { Offset::Grid } else { Offset::Midpoint };
        for (j, (t, _)) in rows.iter().enumerate() {
            if (t - theta(n, offset, j)).abs() > 1e-9 * step.max(1.0) {
                return Err(Error::Parse(format!("row {j}: theta {t} is off the uniform grid")));
            }
        }
        CircleGrid::new(offset, rows.into_iter().map(|(_, z)| z).collect())
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        Self::from_csv(&std::fs::read_to_string(path)?)
    }
}

/// Closed-form functions on the circle, written in `z = e^{iθ}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CircleFunction {
    Constant {
        c: f64,
    },
    /// `z^k`, `k` of either sign.
    Monomial {
        k: i64,
    },
    /// `(1 − z)^a`, principal branch.
    OneMinusZ {
        a: f64,
    },
    /// `Σ c_k z^k` over nonnegative `k`.
    Polynomial {
        coeffs: Vec<(f64, f64)>,
    },
}

impl CircleFunction {
    pub fn eval(&self, t: f64) -> Complex64 {
        let z = Complex64::from_polar(1.0, t);
        match self {
            CircleFunction::Constant { c } => Complex64::new(*c, 0.0),
            CircleFunction::Monomial { k } => Complex64::from_polar(1.0, *k as f64 * t),
            CircleFunction::OneMinusZ { a } => (Complex64::new(1.0, 0.0) - z).powf(*a),
            CircleFunction::Polynomial { coeffs } => {
                let mut acc = Complex64::new(0.0, 0.0);
                for &(re, im) in coeffs.iter().rev() {
                    acc = acc * z + Complex64::new(re, im);
                }
                acc
            }
        }
    }

    pub fn sample(&self, m: u32, offset: Offset) -> Result<CircleGrid<Complex64>> {
        let n = 1usize << m;
        CircleGrid::new(offset, (0..n).map(|j| self.eval(theta(n, offset, j))).collect())
    }
}

/// Closed-form positive weights on the circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CircleWeight {
    Constant {
        c: f64,
    },
    /// `2 − 2cos θ = |1 − e^{iθ}|²`.
    TwoMinusTwoCos,
    /// `|1 − e^{iθ}|^a`.
    AbsOneMinusZ {
        a: f64,
    },
    /// `exp(Σ a_k cos kθ + b_k sin kθ)`, `k = 1, 2, ...`.
    ExpTrig {
        cos: Vec<f64>,
        sin: Vec<f64>,
    },
    Product {
        a: Box<CircleWeight>,
        b: Box<CircleWeight>,
    },
}

impl CircleWeight {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            CircleWeight::Constant { c } => *c,
            CircleWeight::TwoMinusTwoCos => 2.0 - 2.0 * t.cos(),
            CircleWeight::AbsOneMinusZ { a } => (2.0 * (t / 2.0).sin().abs()).powf(*a),
            CircleWeight::ExpTrig { cos, sin } => {
                let mut s = 0.0;
                for (k, c) in cos.iter().enumerate() {
                    s += c * ((k + 1) as f64 * t).cos();
                }
                for (k, b) in sin.iter().enumerate() {
                    s += b * ((k + 1) as f64 * t).sin();
                }
                s.exp()
            }
            CircleWeight::Product { a, b } => a.eval(t) * b.eval(t),
        }
    }

    pub fn sample(&self, m: u32, offset: Offset) -> Result<CircleGrid<f64>> {
        let n = 1usize << m;
        CircleGrid::new(offset, (0..n).map(|j| self.eval(theta(n, offset, j))).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SzegoReport {
    pub log_mean: f64,
    pub in_szego_class: bool,
    /// `mean(w)·exp(−mean log w)`, finite for `A_∞` weights.
    pub a_infty_gap: f64,
}

pub fn szego_test(w: &CircleGrid<f64>) -> Result<SzegoReport> {
    if let Some(index) = w.values.iter().position(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::NonPositiveSample { index });
    }
    let n = w.n() as f64;
    let log_mean = crate::grid::compensated_sum(w.values.iter().map(|v| v.ln())) / n;
    let mean = crate::grid::compensated_sum(w.values.iter().copied()) / n;
    let underflow = w.values.iter().any(|&v| v < SZEGO_FLOOR);
    Ok(SzegoReport {
        log_mean,
        in_szego_class: !underflow && log_mean.is_finite(),
        a_infty_gap: mean * (-log_mean).exp(),
    })
}

/// Fourier coefficients `c_k`, `k = 0..n`, of the sampled function, with the
/// sampling offset folded in so that `f(θ_j) = Σ_k c_k e^{ikθ_j}` where
/// indices above `n/2` stand for `k − n`.
fn coefficients(values: &[Complex64], offset: Offset) -> Vec<Complex64> {
    let n = values.len();
    let mut buf = values.to_vec();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    for (k, c) in buf.iter_mut().enumerate() {
        let k = signed_index(k, n) as f64;
        *c *= Complex64::from_polar(scale, -k * 2.0 * PI * offset.shift() / n as f64);
    }
    buf
}

fn synthesize(coeffs: &[Complex64], offset: Offset) -> Vec<Complex64> {
    let n = coeffs.len();
    let mut buf: Vec<Complex64> = coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| c * Complex64::from_polar(1.0, signed_index(k, n) as f64 * 2.0 * PI * offset.shift() / n as f64))
        .collect();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    buf
}

/// Index `k` in `0..n` read as a frequency in `(−n/2, n/2]`.
fn signed_index(k: usize, n: usize) -> i64 {
    if k > n / 2 {
        k as i64 - n as i64
    } else {
        k as i64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OuterFunction {
    pub p0: f64,
    pub boundary_modulus: CircleGrid<f64>,
    pub boundary: CircleGrid<Complex64>,
    /// Coefficients of `log h` at indices `0..=n/2`.
    pub analytic_coeffs: Vec<Complex64>,
    pub origin_value: Complex64,
    /// Energy of the log-coefficients with `|k| ≥ n/4`.
    pub tail_energy: f64,
    pub resolved: bool,
}

/// The outer function `h` with `|h|^{p0} = w` on the boundary: the
/// coefficients of `(1/p0) log w` are projected onto nonnegative indices
/// (index `0` kept, positive indices doubled) and exponentiated.
pub fn outer_from_weight(w: &CircleGrid<f64>, p0: f64) -> Result<OuterFunction> {
    if !(p0 > 0.0) {
        return Err(Error::InvalidInput(format!("p0 must be positive, got {p0}")));
    }
    let sz = szego_test(w).map_err(|_| Error::SzegoFailed)?;
    if !sz.in_szego_class {
        return Err(Error::SzegoFailed);
    }
    let n = w.n();
    let logs: Vec<Complex64> = w.values.iter().map(|v| Complex64::new(v.ln() / p0, 0.0)).collect();
    let c = coefficients(&logs, w.offset);
    let tail_energy: f64 = c
        .iter()
        .enumerate()
        .filter(|(k, _)| signed_index(*k, n).unsigned_abs() as usize >= n / 4)
        .map(|(_, z)| z.norm_sqr())
        .sum();
    let mut g = vec![Complex64::new(0.0, 0.0); n];
    g[0] = Complex64::new(c[0].re, 0.0);
    for k in 1..n / 2 {
        g[k] = 2.0 * c[k];
    }
    g[n / 2] = c[n / 2];
    let log_h = synthesize(&g, w.offset);
    let boundary: Vec<Complex64> = log_h.iter().map(|z| z.exp()).collect();
    let modulus: Vec<f64> = boundary.iter().map(|z| z.norm()).collect();
    Ok(OuterFunction {
        p0,
        boundary_modulus: CircleGrid::new(w.offset, modulus)?,
        boundary: CircleGrid::new(w.offset, boundary)?,
        analytic_coeffs: g[..=n / 2].to_vec(),
        origin_value: Complex64::new(g[0].re.exp(), 0.0),
        tail_energy,
        resolved: tail_energy < TAIL_ENERGY_TOL,
    })
}

/// Share of the energy of `f` carried by negative frequencies (the Nyquist
/// term counts as neither sign).
pub fn analytic_defect(f: &CircleGrid<Complex64>) -> f64 {
    let n = f.n();
    let c = coefficients(&f.values, f.offset);
    let (mut neg, mut total) = (0.0, 0.0);
    for (k, z) in c.iter().enumerate() {
        let e = z.norm_sqr();
        total += e;
        if signed_index(k, n) < 0 {
            neg += e;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        neg / total
    }
}

/// Riemann sum of `|f|^{p0} w` over the circle, normalised by `2π`.
fn circle_weighted_power(f: &CircleGrid<Complex64>, w: &CircleGrid<f64>, p0: f64) -> f64 {
    let n = f.n() as f64;
    crate::grid::compensated_sum(f.values.iter().zip(&w.values).map(|(z, v)| z.norm().powf(p0) * v)) / n
}

/// Membership of `f` in `H^{p0}_w`: `f·h` must be analytic (small defect) at
/// `m` and `m + 1`, and `∫|f|^{p0} w` must be stable between the two.
pub fn weighted_hp_membership(
    f: &CircleFunction,
    w: &CircleWeight,
    p0: f64,
    m: u32,
    rel_tol: f64,
) -> Result<MembershipReport> {
    let id = serde_json::to_string(&(f, w)).unwrap_or_default();
    let mut report = MembershipReport::new(id, MembershipClass::WeightedHardy { p0 }, MembershipVerdict::Inconclusive);
    report.scales = vec![f64::from(m), f64::from(m + 1)];
    let mut defects = Vec::new();
    let mut powers = Vec::new();
    for level in [m, m + 1] {
        let ws = w.sample(level, Offset::Midpoint)?;
        let fs = f.sample(level, Offset::Midpoint)?;
        let h = outer_from_weight(&ws, p0)?;
        let fh: Vec<Complex64> = fs.values.iter().zip(h.boundary.values()).map(|(a, b)| a * b).collect();
        let defect = analytic_defect(&CircleGrid::new(Offset::Midpoint, fh)?);
        let power = circle_weighted_power(&fs, &ws, p0);
        report.evidence.push(Evidence::number(format!("analytic defect of f*h at m = {level}"), defect));
        report.evidence.push(Evidence::number(format!("mean |f|^p0 w at m = {level}"), power));
        report.evidence.push(Evidence::number(format!("|h(0)| at m = {level}"), h.origin_value.norm()));
        defects.push(defect);
        powers.push(power);
    }
    let stable = powers.iter().all(|v| v.is_finite()) && (powers[1] / powers[0] - 1.0).abs() <= rel_tol;
    report.evidence.push(Evidence::check("weighted norm stable under m -> m+1", stable));
    report.verdict = if defects.iter().all(|&d| d < DEFECT_TOL) && stable {
        MembershipVerdict::CertifiedYes
    } else if defects.iter().all(|&d| d > DEFECT_REJECT) {
        MembershipVerdict::CertifiedNoAtScale
    } else {
        MembershipVerdict::Inconclusive
    };
    Ok(report)
}

/// `[w]_{A_p}` over all arcs of the circle: windows of at most `n` cells on
/// the doubled, wrapped grid.
pub fn circle_ap_constant(w: &CircleGrid<f64>, p: f64) -> Result<ApReport> {
    circle_ap_constant_with(Exec::default(), w, p)
}

pub fn circle_ap_constant_with(exec: Exec, w: &CircleGrid<f64>, p: f64) -> Result<ApReport> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidInput(format!("A_p needs finite p >= 1, got {p}")));
    }
    if let Some(index) = w.values.iter().position(|v| !(*v > 0.0)) {
        return Err(Error::NonPositiveSample { index });
    }
    let n = w.n();
    let doubled: Vec<f64> = w.values.iter().chain(&w.values).copied().collect();
    let prefix = |v: &[f64]| {
        let mut out = Vec::with_capacity(v.len() + 1);
        out.push(0.0);
        for x in v {
            out.push(out.last().unwrap() + x);
        }
        out
    };
    let pw = prefix(&doubled);
    let ps = (p > 1.0).then(|| prefix(&doubled.iter().map(|v| v.powf(1.0 - conjugate(p))).collect::<Vec<_>>()));
    let best = par::map_indices(exec, n, |l| {
        let mut best = (f64::NEG_INFINITY, l, l);
        let mut min = f64::INFINITY;
        for r in l..l + n {
            let len = (r - l + 1) as f64;
            let aw = (pw[r + 1] - pw[l]) / len;
            let v = match &ps {
                None => {
                    min = min.min(doubled[r]);
                    aw / min
                }
                Some(ps) => aw * ((ps[r + 1] - ps[l]) / len).powf(p - 1.0),
            };
            if v > best.0 {
                best = (v, l, r);
            }
        }
        best
    })
    .into_iter()
    .fold((f64::NEG_INFINITY, 0, 0), |a, b| if b.0 > a.0 { b } else { a });
    let formula = if p == 1.0 { "avg(w)/min(w) over arcs" } else { "avg(w)*avg(w^(1-p'))^(p-1) over arcs" };
    Ok(ApReport {
        p,
        constant: best.0.max(1.0),
        worst_window: (best.1, best.2),
        family: WindowFamily::All,
        formula: formula.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn szego_of_classical_weights() {
        let one = CircleWeight::Constant { c: 1.0 }.sample(8, Offset::Grid).unwrap();
        let r = szego_test(&one).unwrap();
        assert_eq!(r.log_mean, 0.0);
        assert!((r.a_infty_gap - 1.0).abs() < 1e-15);

        let w = CircleWeight::TwoMinusTwoCos.sample(14, Offset::Midpoint).unwrap();
        let r = szego_test(&w).unwrap();
        // the midpoint product of |1 - z| is exactly 2, so log_mean = ln 4 / n
        assert!((r.log_mean - 4f64.ln() / w.n() as f64).abs() < 1e-12);
        assert!((r.a_infty_gap - 2.0).abs() < 1e-3);

        let mut v = vec![1.0; 16];
        v[3] = 1e-300;
        assert!(!szego_test(&CircleGrid::new(Offset::Grid, v).unwrap()).unwrap().in_szego_class);
        assert!(matches!(
            szego_test(&CircleGrid::new(Offset::Grid, vec![1.0, 0.0]).unwrap()),
            Err(Error::NonPositiveSample { index: 1 })
        ));
    }

    #[test]
    fn outer_of_two_minus_two_cos() {
        let w = CircleWeight::TwoMinusTwoCos.sample(12, Offset::Midpoint).unwrap();
        let h = outer_from_weight(&w, 2.0).unwrap();
        for j in 0..w.n() {
            let t = w.theta(j);
            let want = (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, t)).norm();
            assert!((h.boundary_modulus.values()[j] / want - 1.0).abs() < 1e-6);
        }
        assert!((h.origin_value.re - 2f64.powf(1.0 / w.n() as f64)).abs() < 1e-12);
    }

    #[test]
    fn outer_of_smooth_weight_is_analytic() {
        let w = CircleWeight::ExpTrig { cos: vec![0.3, -0.2], sin: vec![0.1] };
        let ws = w.sample(8, Offset::Grid).unwrap();
        let h = outer_from_weight(&ws, 1.5).unwrap();
        assert!(h.resolved);
        assert!(analytic_defect(&h.boundary) < 1e-20);
        // exp(1/p0 * (a1 cos + ...)) has h(0) = 1 since the log has zero mean
        assert!((h.origin_value.re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn defect_of_monomials() {
        let p = CircleFunction::Monomial { k: 1 }.sample(6, Offset::Grid).unwrap();
        let q = CircleFunction::Monomial { k: -1 }.sample(6, Offset::Grid).unwrap();
        assert!(analytic_defect(&p) < 1e-28);
        assert!((analytic_defect(&q) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn membership_verdicts() {
        let one = CircleWeight::Constant { c: 1.0 };
        let yes = weighted_hp_membership(&CircleFunction::Constant { c: 1.0 }, &one, 2.0, 8, 0.05).unwrap();
        assert_eq!(yes.verdict, MembershipVerdict::CertifiedYes);
        let no = weighted_hp_membership(&CircleFunction::Monomial { k: -1 }, &one, 2.0, 8, 0.05).unwrap();
        assert_eq!(no.verdict, MembershipVerdict::CertifiedNoAtScale);
    }

    #[test]
    fn csv_round_trip() {
        let f = CircleFunction::OneMinusZ { a: 0.5 }.sample(5, Offset::Midpoint).unwrap();
        let back = CircleGrid::from_csv(&f.to_csv()).unwrap();
        assert_eq!(back.offset(), Offset::Midpoint);
        for (a, b) in f.values().iter().zip(back.values()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn circle_ap_of_constant_and_power() {
        let one = CircleWeight::Constant { c: 3.0 }.sample(6, Offset::Grid).unwrap();
        assert!((circle_ap_constant(&one, 2.0).unwrap().constant - 1.0).abs() < 1e-12);
        let w = CircleWeight::AbsOneMinusZ { a: 0.5 }.sample(8, Offset::Midpoint).unwrap();
        let c = circle_ap_constant(&w, 2.0).unwrap().constant;
        assert!(c > 1.0 && c < 3.0, "{c}");
    }

    #[test]
    fn singular_function_in_weighted_hardy_space() {
        let f = CircleFunction::OneMinusZ { a: -0.25 };
        let w = CircleWeight::AbsOneMinusZ { a: 1.0 };
        let rep = weighted_hp_membership(&f, &w, 2.0, 12, 0.05).unwrap();
        assert_eq!(rep.verdict, MembershipVerdict::CertifiedYes, "{:#?}", rep.evidence);
    }
}
