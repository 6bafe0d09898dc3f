//! The Rubio de Francia series `R_K f = Σ_{k≤K} M^k|f| / (2B)^k` with its
//! three contracts checked, and the factorisation pipelines built on it.

use serde::{Deserialize, Serialize};

use super::{CertificateSummary, Construction, MajorantCertificate, CHECK_TOL};
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::maximal::{maximal_fast, op_norm_estimate, WindowFamily};
use crate::weights::{ap_constant, conjugate, dual_weight, factor_product, ApReport, Weight};

pub const K_MAX: usize = 64;
const B_RETRIES: usize = 3;

#[derive(Debug, Clone)]
pub enum RdfSpace {
    Weighted { p: f64, w: Weight },
    Weak { p: f64 },
}

impl RdfSpace {
    fn norm(&self, g: &GridFunction) -> Result<f64> {
        match self {
            RdfSpace::Weighted { p, w } => g.weighted_lp_norm(w.grid(), *p),
            RdfSpace::Weak { p } => Ok(g.weak_lp_quasinorm(*p)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RdfContracts {
    /// `|f| ≤ R_K f` cell-wise.
    pub pointwise_ok: bool,
    pub norm_f: f64,
    pub norm_r: f64,
    /// `‖R_K f‖ ≤ 2(1+tol)‖f‖`.
    pub norm_ok: bool,
    /// `max_i M(R_K f)_i / R_K f_i`.
    pub max_ratio: f64,
    /// `M(R_K f) ≤ 2B(1+tol)·R_K f`.
    pub maximal_ok: bool,
    /// `(2B)^{−K}·‖M^{K+1}f‖_∞`.
    pub tail: f64,
    /// Largest observed `‖M^{k+1}f‖ / ‖M^k f‖`.
    pub step_ratio: f64,
}

impl RdfContracts {
    pub fn all_ok(&self) -> bool {
        self.pointwise_ok && self.norm_ok && self.maximal_ok
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RdfOutcome {
    pub certificate: MajorantCertificate,
    pub k: usize,
    pub b: f64,
    pub tol: f64,
    pub contracts: RdfContracts,
}

/// Builds `R_K f`, raising `K` until the tail bound
/// `(2B)^{−K}·‖M^{K+1}f‖_∞ ≤ tol·min R_K f` holds (or `K = 64`).
pub fn rubio_de_francia(f: &GridFunction, space: &RdfSpace, b: f64, k: usize, tol: f64) -> Result<RdfOutcome> {
    if f.values().iter().all(|&v| v == 0.0) {
        return Err(Error::InvalidInput("the Rubio de Francia series needs f ≢ 0".into()));
    }
    if !(b >= 1.0) || k == 0 || !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("need B >= 1, K >= 1, tol > 0 (got {b}, {k}, {tol})")));
    }
    let two_b = 2.0 * b;
    let mut terms = vec![f.abs()];
    while terms.len() < k + 2 {
        let next = maximal_fast(terms.last().unwrap());
        terms.push(next);
    }
    let mut k = k;
    let sum_to = |terms: &[GridFunction], k: usize| -> Vec<f64> {
        let mut r = vec![0.0; f.n()];
        for (j, t) in terms.iter().take(k + 1).enumerate() {
            let scale = two_b.powi(-(j as i32));
            for (acc, v) in r.iter_mut().zip(t.values()) {
                *acc += v * scale;
            }
        }
        r
    };
    let (r_values, tail) = loop {
        let r = sum_to(&terms, k);
        let min_r = r.iter().copied().fold(f64::INFINITY, f64::min);
        let tail = two_b.powi(-(k as i32)) * terms[k + 1].max_value();
        if tail <= tol * min_r {
            break (r, tail);
        }
        if k >= K_MAX {
            return Err(Error::TailNotSmall { k_max: K_MAX });
        }
        k += 1;
        let next = maximal_fast(terms.last().unwrap());
        terms.push(next);
    };

    let mut step_ratio = 1.0f64;
    for pair in terms.windows(2) {
        let (a, c) = (space.norm(&pair[0])?, space.norm(&pair[1])?);
        if a > 0.0 {
            step_ratio = step_ratio.max(c / a);
        }
    }
    if step_ratio > b {
        return Err(Error::BTooSmall { observed: step_ratio, bound: b });
    }

    let rk = GridFunction::new(f.domain(), f.depth(), r_values)?;
    let pointwise_ok = rk.values().iter().zip(f.values()).all(|(r, v)| *r >= v.abs());
    let norm_f = space.norm(f)?;
    let norm_r = space.norm(&rk)?;
    let norm_ok = norm_r <= 2.0 * norm_f * (1.0 + tol);
    let mr = maximal_fast(&rk);
    let max_ratio = mr.values().iter().zip(rk.values()).map(|(m, r)| m / r).fold(0.0, f64::max);
    let maximal_ok = max_ratio <= two_b * (1.0 + tol) * (1.0 + CHECK_TOL);
    let contracts = RdfContracts { pointwise_ok, norm_f, norm_r, norm_ok, max_ratio, maximal_ok, tail, step_ratio };
    let certificate = MajorantCertificate::new(f, 1.0, rk, Construction::RubioDeFrancia { b, k })?;
    Ok(RdfOutcome { certificate, k, b, tol, contracts })
}

/// [`rubio_de_francia`] that doubles `B` (up to three times) whenever an
/// observed step ratio exceeds it.
pub fn rubio_de_francia_auto(f: &GridFunction, space: &RdfSpace, b: f64, k: usize, tol: f64) -> Result<RdfOutcome> {
    let mut b = b;
    for attempt in 0..=B_RETRIES {
        match rubio_de_francia(f, space, b, k, tol) {
            Err(Error::BTooSmall { observed, .. }) if attempt < B_RETRIES => b = (2.0 * b).max(observed),
            other => return other,
        }
    }
    unreachable!("the last attempt returns")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalApCertificate {
    pub v: Weight,
    pub ap_report: ApReport,
    /// `∫|f|^p w^{1−p} u`.
    pub lhs: f64,
    /// `∫|f| u`.
    pub rhs: f64,
    /// `|f|^p w^{1−p} u ≤ |f| u` on every cell.
    pub cellwise_ok: bool,
}

/// `v = u·w^{1−p}` from an `A_1` majorant `w ≥ |f|` and an `A_1` weight `u`,
/// with `∫|f|^p v ≤ ∫|f| u`.
pub fn global_ap_certificate(
    f: &GridFunction,
    cert_w: &MajorantCertificate,
    u: &Weight,
    p: f64,
) -> Result<GlobalApCertificate> {
    if cert_w.r != 1.0 {
        return Err(Error::InvalidInput(format!("need a certificate with r = 1, got {}", cert_w.r)));
    }
    let v = factor_product(u, &cert_w.w, p)?;
    let ap_report = ap_constant(&v, p, WindowFamily::All)?;
    let width = f.width();
    let mut cellwise_ok = true;
    let (mut lhs, mut rhs) = (Vec::with_capacity(f.n()), Vec::with_capacity(f.n()));
    for ((fv, vv), uv) in f.values().iter().zip(v.values()).zip(u.values()) {
        let a = fv.abs().powf(p) * vv;
        let b = fv.abs() * uv;
        cellwise_ok &= a <= b * (1.0 + CHECK_TOL);
        lhs.push(a);
        rhs.push(b);
    }
    let lhs = crate::grid::compensated_sum(lhs) * width;
    let rhs = crate::grid::compensated_sum(rhs) * width;
    Ok(GlobalApCertificate { v, ap_report, lhs, rhs, cellwise_ok })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossTransfer {
    pub q: f64,
    pub v: Weight,
    pub ap_report: ApReport,
    /// `∫|f|^q v`.
    pub lq_power: f64,
    /// `∫|f| u`.
    pub bound: f64,
    pub bound_ok: bool,
    pub majorant: CertificateSummary,
    pub majorant_contracts: RdfContracts,
    pub dual: CertificateSummary,
    pub dual_contracts: RdfContracts,
}

/// Moves `f ∈ L^p_w` (`w ∈ A_p`) to `f ∈ L^q_v` with `v = u·W^{1−q} ∈ A_q`:
/// `W = R f` in `L^p_w` majorises `|f|`, `u = R 1` in `L^{p'}_σ` pairs with
/// `f`, and `∫|f|^q v ≤ ∫|f| u`.
pub fn cross_exponent_transfer(
    f: &GridFunction,
    p: f64,
    w: &Weight,
    q: f64,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<CrossTransfer> {
    if !(p > 1.0 && q > 1.0) {
        return Err(Error::InvalidInput(format!("need p, q > 1, got {p}, {q}")));
    }
    let b = op_norm_estimate(w.grid(), p, trials, seed)?.bound;
    let big = rubio_de_francia_auto(f, &RdfSpace::Weighted { p, w: w.clone() }, b, 1, tol)?;
    let pd = conjugate(p);
    let sigma = dual_weight(w, p)?;
    let b_dual = op_norm_estimate(sigma.grid(), pd, trials, seed)?.bound;
    let one = GridFunction::constant(f.domain(), f.depth(), 1.0)?;
    let dual = rubio_de_francia_auto(&one, &RdfSpace::Weighted { p: pd, w: sigma }, b_dual, 1, tol)?;
    let v = factor_product(&dual.certificate.w, &big.certificate.w, q)?;
    let ap_report = ap_constant(&v, q, WindowFamily::All)?;
    let lq_power = f.weighted_lp_norm(v.grid(), q)?.powf(q);
    let bound = f.weighted_lp_norm(dual.certificate.w.grid(), 1.0)?;
    Ok(CrossTransfer {
        q,
        v,
        ap_report,
        lq_power,
        bound,
        bound_ok: lq_power <= bound * (1.0 + 1e-9),
        majorant: big.certificate.summary(),
        majorant_contracts: big.contracts,
        dual: dual.certificate.summary(),
        dual_contracts: dual.contracts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{sample, ClosedForm, Interval};

    fn unit() -> Interval {
        Interval::new(0.0, 1.0).unwrap()
    }

    #[test]
    fn constant_series_sums_to_two() {
        let f = GridFunction::constant(unit(), 5, 1.0).unwrap();
        let space = RdfSpace::Weighted { p: 2.0, w: Weight::constant(unit(), 5, 1.0).unwrap() };
        let out = rubio_de_francia(&f, &space, 1.0, 20, 1e-5).unwrap();
        assert!(out.certificate.w.values().iter().all(|&v| (v - 2.0).abs() < 1e-5));
        assert!(out.contracts.all_ok());
    }

    #[test]
    fn indicator_contracts() {
        let f = sample(&ClosedForm::constant(1.0).restrict(Interval::new(0.0, 0.5).unwrap()), unit(), 8).unwrap();
        let w = Weight::constant(unit(), 8, 1.0).unwrap();
        let b = op_norm_estimate(w.grid(), 2.0, 20, 1).unwrap().bound;
        let out = rubio_de_francia_auto(&f, &RdfSpace::Weighted { p: 2.0, w }, b, 1, 0.05).unwrap();
        assert!(out.contracts.all_ok(), "{:?}", out.contracts);
        assert!(out.k <= 20);
    }

    #[test]
    fn cross_transfer_on_indicator() {
        let f = sample(&ClosedForm::constant(1.0).restrict(Interval::new(0.0, 0.5).unwrap()), unit(), 7).unwrap();
        let w = Weight::constant(unit(), 7, 1.0).unwrap();
        let t = cross_exponent_transfer(&f, 2.0, &w, 3.0, 10, 5, 0.05).unwrap();
        assert!(t.bound_ok);
        assert!(t.ap_report.constant.is_finite());
    }
}
