//! `A_p` constants, reverse Hölder exponents and the pointwise weight
//! algebra (duals, powers, factor products, max/min, truncation).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{divergence_probe, sample, ClosedForm, GridFunction, Interval, TrendConfig, TrendReport};
use crate::maximal::{check_positive, WindowFamily};
use crate::par::{self, Exec};

/// A grid function with strictly positive cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridFunction", into = "GridFunction")]
pub struct Weight(GridFunction);

impl TryFrom<GridFunction> for Weight {
    type Error = Error;
    fn try_from(g: GridFunction) -> Result<Self> {
        Weight::new(g)
    }
}

impl From<Weight> for GridFunction {
    fn from(w: Weight) -> Self {
        w.0
    }
}

impl Weight {
    pub fn new(g: GridFunction) -> Result<Self> {
        check_positive(&g)?;
        Ok(Weight(g))
    }

    pub fn from_closed_form(cf: &ClosedForm, domain: Interval, depth: u32) -> Result<Self> {
        Weight::new(sample(cf, domain, depth)?)
    }

    pub fn constant(domain: Interval, depth: u32, c: f64) -> Result<Self> {
        Weight::new(GridFunction::constant(domain, depth, c)?)
    }

    pub fn grid(&self) -> &GridFunction {
        &self.0
    }

    pub fn into_grid(self) -> GridFunction {
        self.0
    }

    pub fn values(&self) -> &[f64] {
        self.0.values()
    }

    fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Weight::new(self.0.map(f)?)
    }
}

impl AsRef<GridFunction> for Weight {
    fn as_ref(&self) -> &GridFunction {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApReport {
    pub p: f64,
    pub constant: f64,
    /// Inclusive cell range `[l, r]`.
    pub worst_window: (usize, usize),
    pub family: WindowFamily,
    pub formula: String,
}

/// `p'` for `p > 1`.
pub fn conjugate(p: f64) -> f64 {
    p / (p - 1.0)
}

fn prefix(values: &[f64], width: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len() + 1);
    out.push(0.0);
    let mut acc = 0.0;
    for v in values {
        acc += v * width;
        out.push(acc);
    }
    out
}

/// Data for the per-window `A_p` value. For `p > 1` the window value is
/// `avg(w)·avg(σ)^{p−1}`; for `p = 1` it is `avg(w)/min(w)`. Single-cell
/// windows are 1 by definition, which is their exact value.
struct ApScan<'a> {
    p: f64,
    width: f64,
    w: &'a [f64],
    pw: Vec<f64>,
    ps: Option<Vec<f64>>,
}

impl ApScan<'_> {
    fn value(&self, l: usize, r: usize, min_w: f64) -> f64 {
        if l == r {
            return 1.0;
        }
        let len = (r - l + 1) as f64 * self.width;
        let aw = (self.pw[r + 1] - self.pw[l]) / len;
        match &self.ps {
            Some(ps) => aw * ((ps[r + 1] - ps[l]) / len).powf(self.p - 1.0),
            None => aw / min_w,
        }
    }

    fn value_at(&self, l: usize, r: usize) -> f64 {
        let m = self.w[l..=r].iter().copied().fold(f64::INFINITY, f64::min);
        self.value(l, r, m)
    }

    fn formula(&self) -> &'static str {
        if self.ps.is_some() {
            "avg(w) * avg(w^(1-p'))^(p-1)"
        } else {
            "avg(w) / min(w)"
        }
    }
}

/// Larger value wins; ties go to the lexicographically smallest window.
fn better(a: (f64, usize, usize), b: (f64, usize, usize)) -> (f64, usize, usize) {
    match a.0.total_cmp(&b.0) {
        std::cmp::Ordering::Greater => a,
        std::cmp::Ordering::Less => b,
        std::cmp::Ordering::Equal => {
            if (a.1, a.2) <= (b.1, b.2) {
                a
            } else {
                b
            }
        }
    }
}

fn scan(exec: Exec, s: &ApScan, family: WindowFamily) -> (f64, usize, usize) {
    let n = s.w.len();
    match family {
        WindowFamily::All => {
            let chunks = if matches!(exec, Exec::Parallel) { n.min(256) } else { 1 };
            let per = n.div_ceil(chunks);
            par::map_indices(exec, chunks, |c| {
                let mut best = (f64::NEG_INFINITY, 0, 0);
                for l in (c * per)..((c + 1) * per).min(n) {
                    let mut m = f64::INFINITY;
                    for r in l..n {
                        m = m.min(s.w[r]);
                        best = better(best, (s.value(l, r, m), l, r));
                    }
                }
                best
            })
            .into_iter()
            .fold((f64::NEG_INFINITY, 0, 0), better)
        }
        WindowFamily::Dyadic => {
            let mut best = (f64::NEG_INFINITY, 0, 0);
            let mut mins: Vec<f64> = s.w.to_vec();
            let mut len = 1;
            while len <= n {
                for (b, &m) in mins.iter().enumerate() {
                    let l = b * len;
                    best = better(best, (s.value(l, l + len - 1, m), l, l + len - 1));
                }
                mins = mins.chunks(2).map(|c| c.iter().copied().fold(f64::INFINITY, f64::min)).collect();
                len *= 2;
            }
            best
        }
    }
}

fn ap_from_values(exec: Exec, w: &[f64], sigma: Option<&[f64]>, width: f64, p: f64, family: WindowFamily) -> ApReport {
    let s = ApScan { p, width, w, pw: prefix(w, width), ps: sigma.map(|v| prefix(v, width)) };
    let (constant, l, r) = scan(exec, &s, family);
    ApReport { p, constant, worst_window: (l, r), family, formula: s.formula().to_string() }
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidInput(format!("A_p needs finite p >= 1, got {p}")));
    }
    Ok(())
}

pub fn ap_constant(w: &Weight, p: f64, family: WindowFamily) -> Result<ApReport> {
    ap_constant_with(Exec::default(), w, p, family)
}

pub fn ap_constant_with(exec: Exec, w: &Weight, p: f64, family: WindowFamily) -> Result<ApReport> {
    check_p(p)?;
    let g = w.grid();
    let sigma: Option<Vec<f64>> = (p > 1.0).then(|| g.values().iter().map(|v| v.powf(1.0 - conjugate(p))).collect());
    Ok(ap_from_values(exec, g.values(), sigma.as_deref(), g.width(), p, family))
}

/// Re-evaluates the per-window formula of `report` on its worst window.
pub fn ap_window_value(w: &Weight, p: f64, window: (usize, usize)) -> Result<f64> {
    check_p(p)?;
    let g = w.grid();
    let (l, r) = window;
    if l > r || r >= g.n() {
        return Err(Error::InvalidInput(format!("window [{l}, {r}] outside the grid")));
    }
    let sigma: Option<Vec<f64>> = (p > 1.0).then(|| g.values().iter().map(|v| v.powf(1.0 - conjugate(p))).collect());
    let s = ApScan {
        p,
        width: g.width(),
        w: g.values(),
        pw: prefix(g.values(), g.width()),
        ps: sigma.as_deref().map(|v| prefix(v, g.width())),
    };
    Ok(s.value_at(l, r))
}

/// `A_p` constant of a closed-form weight where both `w` and its dual are
/// sampled as exact cell averages of the continuum functions. A dual that
/// is not locally integrable fails with `NonIntegrableCell`.
pub fn ap_constant_sampled(
    cf: &ClosedForm,
    domain: Interval,
    depth: u32,
    p: f64,
    family: WindowFamily,
) -> Result<ApReport> {
    check_p(p)?;
    let w = Weight::from_closed_form(cf, domain, depth)?;
    let sigma = if p > 1.0 {
        let s = sample(&cf.clone().pow(1.0 - conjugate(p)), domain, depth)?;
        check_positive(&s)?;
        Some(s.into_values())
    } else {
        None
    };
    let g = w.grid();
    Ok(ap_from_values(Exec::default(), g.values(), sigma.as_deref(), g.width(), p, family))
}

/// `A_p` constant of a closed-form weight along a refinement ladder.
pub fn ap_refinement_trend(
    cf: &ClosedForm,
    domain: Interval,
    p: f64,
    family: WindowFamily,
    depths: &[f64],
    cfg: &TrendConfig,
) -> Result<TrendReport> {
    divergence_probe(depths, |k| Ok(ap_constant_sampled(cf, domain, k as u32, p, family)?.constant), cfg)
}

pub fn dual_weight(w: &Weight, p: f64) -> Result<Weight> {
    if !(p > 1.0) {
        return Err(Error::InvalidInput(format!("dual weight needs p > 1, got {p}")));
    }
    let e = 1.0 - conjugate(p);
    w.map(|v| v.powf(e))
}

pub fn power_weight(w: &Weight, s: f64) -> Result<Weight> {
    if !(s > 0.0) {
        return Err(Error::InvalidInput(format!("power needs s > 0, got {s}")));
    }
    w.map(|v| v.powf(s))
}

/// `u·v^{1−p}`.
pub fn factor_product(u: &Weight, v: &Weight, p: f64) -> Result<Weight> {
    if !(p > 1.0) {
        return Err(Error::InvalidInput(format!("factor product needs p > 1, got {p}")));
    }
    Weight::new(u.grid().zip(v.grid(), |a, b| a * b.powf(1.0 - p))?)
}

pub fn combine_max(u: &Weight, v: &Weight) -> Result<Weight> {
    Weight::new(u.grid().zip(v.grid(), f64::max)?)
}

pub fn combine_min(u: &Weight, v: &Weight) -> Result<Weight> {
    Weight::new(u.grid().zip(v.grid(), f64::min)?)
}

pub fn truncate(w: &Weight, lambda: f64) -> Result<Weight> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidInput(format!("truncation level must be positive, got {lambda}")));
    }
    w.map(|v| v.max(lambda))
}

pub const RH_CONSTANT: f64 = 2.0;
const RH_LADDER_LEN: usize = 18;

/// `s_j = 1 + 16·2^{−j}`, `j = 0..=17`; the last step has `s − 1 ≈ 1.2e−4`.
pub fn exponent_ladder() -> Vec<f64> {
    (0..RH_LADDER_LEN).map(|j| 1.0 + 16.0 * 0.5f64.powi(j as i32)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RHReport {
    pub s: f64,
    pub rh_constant: f64,
    pub satisfied: bool,
    pub worst_window: (usize, usize),
    /// `(s, max ratio)` for every exponent tested, in test order.
    pub trace: Vec<(f64, f64)>,
}

/// `max_I (avg_I w^s)^{1/s} / avg_I w` with its window.
pub fn rh_ratio(w: &Weight, s: f64, family: WindowFamily) -> (f64, usize, usize) {
    rh_ratio_with(Exec::default(), w, s, family)
}

fn rh_ratio_with(exec: Exec, w: &Weight, s: f64, family: WindowFamily) -> (f64, usize, usize) {
    let g = w.grid();
    // the ratio is scale invariant; normalising keeps w^s from overflowing
    let top = g.max_value();
    let v: Vec<f64> = g.values().iter().map(|x| x / top).collect();
    let vs: Vec<f64> = v.iter().map(|x| x.powf(s)).collect();
    let width = g.width();
    let (p1, ps) = (prefix(&v, width), prefix(&vs, width));
    let value = |l: usize, r: usize| -> f64 {
        if l == r {
            return 1.0;
        }
        let len = (r - l + 1) as f64 * width;
        ((ps[r + 1] - ps[l]) / len).powf(1.0 / s) / ((p1[r + 1] - p1[l]) / len)
    };
    let n = v.len();
    match family {
        WindowFamily::All => {
            let chunks = if matches!(exec, Exec::Parallel) { n.min(256) } else { 1 };
            let per = n.div_ceil(chunks);
            par::map_indices(exec, chunks, |c| {
                let mut best = (f64::NEG_INFINITY, 0, 0);
                for l in (c * per)..((c + 1) * per).min(n) {
                    for r in l..n {
                        best = better(best, (value(l, r), l, r));
                    }
                }
                best
            })
            .into_iter()
            .fold((f64::NEG_INFINITY, 0, 0), better)
        }
        WindowFamily::Dyadic => {
            let mut best = (f64::NEG_INFINITY, 0, 0);
            let mut len = 1;
            while len <= n {
                for l in (0..n).step_by(len) {
                    best = better(best, (value(l, l + len - 1), l, l + len - 1));
                }
                len *= 2;
            }
            best
        }
    }
}

/// Largest ladder exponent `s` with `(avg w^s)^{1/s} ≤ 2·avg w` on every
/// window, located by bisection over the ladder. Failure is monotone in `s`
/// (Hölder); the returned exponent and `1.01·s` are re-tested and recorded in
/// the trace.
pub fn reverse_holder_exponent(w: &Weight, family: WindowFamily) -> Result<RHReport> {
    let ladder = exponent_ladder();
    let mut trace = Vec::new();
    let test = |j: usize, trace: &mut Vec<(f64, f64)>| {
        let (ratio, l, r) = rh_ratio(w, ladder[j], family);
        trace.push((ladder[j], ratio));
        (ratio <= RH_CONSTANT, (l, r))
    };
    let last = ladder.len() - 1;
    let (ok_last, _) = test(last, &mut trace);
    if !ok_last {
        return Err(Error::NoExponentFound);
    }
    let j = if test(0, &mut trace).0 {
        0
    } else {
        // invariant: ladder[lo] fails, ladder[hi] passes
        let (mut lo, mut hi) = (0, last);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if test(mid, &mut trace).0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };
    let s = ladder[j];
    let (satisfied, window) = test(j, &mut trace);
    let bumped = s * 1.01;
    let (ratio, _, _) = rh_ratio(w, bumped, family);
    trace.push((bumped, ratio));
    Ok(RHReport { s, rh_constant: RH_CONSTANT, satisfied, worst_window: window, trace })
}

/// Where the weight whose exponent is improved comes from.
pub enum WeightSource<'a> {
    /// Grid data; one refinement step is compared against the grid coarsened
    /// by averaging cell pairs.
    Grid(&'a Weight),
    /// A closed form sampled at `depth` and `depth + 1`.
    ClosedForm { cf: &'a ClosedForm, domain: Interval, depth: u32 },
}

/// Acceptance factor in `[w^s]_{A_p} ≤ 4·[w]_{A_p}^s`.
pub const SELF_IMPROVE_FACTOR: f64 = 4.0;

/// Largest ladder exponent `s` such that `w^s` still has a stable `A_p`
/// constant over one refinement step, bounded by `4·[w]_{A_p}^s`.
pub fn self_improve_exponent(source: WeightSource, p: f64) -> Result<f64> {
    let cfg = TrendConfig::default();
    let stable = |a: f64, b: f64| (a - b).abs() < cfg.plateau_rel * a.max(b);
    match source {
        WeightSource::Grid(w) => {
            if w.grid().depth() == 0 {
                return Err(Error::InvalidInput("need at least two cells".into()));
            }
            let base = ap_constant(w, p, WindowFamily::All)?.constant;
            let coarse = Weight::new(coarsen(w.grid()))?;
            for s in exponent_ladder() {
                let fine = ap_constant(&power_weight(w, s)?, p, WindowFamily::All)?.constant;
                let rough = ap_constant(&power_weight(&coarse, s)?, p, WindowFamily::All)?.constant;
                if fine.is_finite() && stable(fine, rough) && fine <= SELF_IMPROVE_FACTOR * base.powf(s) {
                    return Ok(s);
                }
            }
            Err(Error::NoExponentFound)
        }
        WeightSource::ClosedForm { cf, domain, depth } => {
            let base = ap_constant_sampled(cf, domain, depth, p, WindowFamily::All)?.constant;
            for s in exponent_ladder() {
                let ws = cf.clone().pow(s);
                let at = |k| ap_constant_sampled(&ws, domain, k, p, WindowFamily::All).map(|r| r.constant);
                if let (Ok(a), Ok(b)) = (at(depth), at(depth + 1)) {
                    if a.is_finite() && b.is_finite() && stable(a, b) && b <= SELF_IMPROVE_FACTOR * base.powf(s) {
                        return Ok(s);
                    }
                }
            }
            Err(Error::NoExponentFound)
        }
    }
}

/// Averages adjacent cell pairs.
pub fn coarsen(g: &GridFunction) -> GridFunction {
    let v: Vec<f64> = g.values().chunks(2).map(|c| 0.5 * (c[0] + c[1])).collect();
    GridFunction::new(g.domain(), g.depth() - 1, v).expect("averages of finite values")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym() -> Interval {
        Interval::new(-1.0, 1.0).unwrap()
    }

    #[test]
    fn constant_weight_has_constant_one() {
        let w = Weight::constant(sym(), 6, 3.0).unwrap();
        for p in [1.0, 1.5, 2.0, 5.0] {
            for fam in [WindowFamily::All, WindowFamily::Dyadic] {
                let r = ap_constant(&w, p, fam).unwrap();
                assert!((r.constant - 1.0).abs() < 1e-12, "{p} {fam:?}: {}", r.constant);
            }
        }
    }

    #[test]
    fn symmetric_window_of_sqrt_weight() {
        // [-t, t] windows give (2/3)·2 = 4/3 exactly for |x|^{1/2}
        let cf = ClosedForm::abs_power(0.0, 0.5);
        let r = ap_constant_sampled(&cf, sym(), 8, 2.0, WindowFamily::All).unwrap();
        let w = Weight::from_closed_form(&cf, sym(), 8).unwrap();
        let sigma = sample(&cf.clone().pow(-1.0), sym(), 8).unwrap();
        let n = w.grid().n();
        let (l, rr) = (n / 2 - 16, n / 2 + 15);
        let avg = |g: &GridFunction| g.values()[l..=rr].iter().sum::<f64>() / (rr - l + 1) as f64;
        assert!((avg(w.grid()) * avg(&sigma) - 4.0 / 3.0).abs() < 1e-9);
        assert!(r.constant >= 4.0 / 3.0 - 1e-12);
    }

    #[test]
    fn worst_window_reproduces_constant() {
        let w = Weight::from_closed_form(&ClosedForm::abs_power(0.3, -0.4), sym(), 7).unwrap();
        for p in [1.0, 2.0, 3.5] {
            let r = ap_constant(&w, p, WindowFamily::All).unwrap();
            assert_eq!(ap_window_value(&w, p, r.worst_window).unwrap(), r.constant);
        }
    }

    #[test]
    fn duality_identity() {
        let w = Weight::from_closed_form(&ClosedForm::abs_power(0.1, 0.6), sym(), 7).unwrap();
        let p = 3.0;
        let a = ap_constant(&w, p, WindowFamily::All).unwrap().constant;
        let b = ap_constant(&dual_weight(&w, p).unwrap(), conjugate(p), WindowFamily::All).unwrap().constant;
        assert!((b - a.powf(conjugate(p) - 1.0)).abs() < 1e-9 * b);
    }

    #[test]
    fn reverse_holder_of_constant_tops_the_ladder() {
        let w = Weight::constant(sym(), 5, 2.0).unwrap();
        let r = reverse_holder_exponent(&w, WindowFamily::All).unwrap();
        assert_eq!(r.s, 17.0);
        assert!(r.satisfied);
    }

    #[test]
    fn reverse_holder_anchored_sqrt_windows() {
        // on [0, t]: (avg w^s)^{1/s} / avg w = (3/2)(2/(s+2))^{1/s} < 3/2
        for s in [1.5f64, 3.0, 9.0] {
            let v: f64 = 1.5 * (2.0 / (s + 2.0)).powf(1.0 / s);
            assert!(v < 1.5);
        }
        let w =
            Weight::from_closed_form(&ClosedForm::abs_power(0.0, 0.5), Interval::new(0.0, 1.0).unwrap(), 9).unwrap();
        let r = reverse_holder_exponent(&w, WindowFamily::All).unwrap();
        assert!(r.satisfied && r.s > 1.0);
    }

    #[test]
    fn self_improvement_of_power_weights() {
        let s = self_improve_exponent(
            WeightSource::ClosedForm { cf: &ClosedForm::abs_power(0.0, 0.4), domain: sym(), depth: 9 },
            2.0,
        )
        .unwrap();
        assert!(s >= 1.25 && s * 0.4 < 1.0, "s = {s}");
        let s = self_improve_exponent(
            WeightSource::ClosedForm { cf: &ClosedForm::abs_power(0.0, 0.9), domain: sym(), depth: 9 },
            2.0,
        )
        .unwrap();
        assert!(s > 1.0 && s * 0.9 < 1.0, "s = {s}");
    }

    #[test]
    fn algebra_checks() {
        let u = Weight::from_closed_form(&ClosedForm::abs_power(0.0, -0.25), sym(), 6).unwrap();
        let v = Weight::from_closed_form(&ClosedForm::abs_power(0.5, -0.25), sym(), 6).unwrap();
        assert_eq!(combine_max(&u, &u).unwrap(), u);
        assert_eq!(combine_min(&u, &u).unwrap(), u);
        let t = truncate(&u, 1.0).unwrap();
        assert!(t.values().iter().zip(u.values()).all(|(a, b)| a >= b && *a >= 1.0));
        assert!(factor_product(&u, &Weight::constant(sym(), 5, 1.0).unwrap(), 2.0).is_err());
        let one = Weight::constant(sym(), 6, 1.0).unwrap();
        assert_eq!(factor_product(&u, &one, 2.0).unwrap(), u);
        let (hi, lo) = (combine_max(&u, &v).unwrap(), combine_min(&u, &v).unwrap());
        assert!(hi.values().iter().zip(lo.values()).all(|(a, b)| a >= b));
    }
}
