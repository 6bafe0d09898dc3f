//! `A_1` majorants and the membership certificates built from them.
//!
//! A [`MajorantCertificate`] records a weight `w` with `|f|^r ≤ w` cell-wise
//! together with its `A_1` report, so that both facts can be re-checked from
//! stored data. Constructions: Coifman–Rochberg `(Mf)^δ`, the Rubio de
//! Francia series, truncations, and the maximal function of an `A_∞`
//! weight.

mod classify;
mod global;
mod rdf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridFunction, TrendReport, Verdict};
use crate::maximal::{maximal_fast, WindowFamily};
use crate::weights::{ap_constant, power_weight, reverse_holder_exponent, ApReport, Weight};

pub use classify::{classify_local, LocalConfig, LocalSource};
pub use global::{
    candidate_l1_fixtures, global_a1_test, global_grid, global_maxmin_pipeline, l1_growth_check, radial_average,
    weak_lp_counterexample, GlobalA1Config, GlobalPipelineReport, L1FixtureRow, L1GrowthReport, MaxMinConfig,
    WeakCounterexampleReport,
};
pub use rdf::{
    cross_exponent_transfer, global_ap_certificate, rubio_de_francia, rubio_de_francia_auto, CrossTransfer,
    GlobalApCertificate, RdfContracts, RdfOutcome, RdfSpace,
};

/// Relative slack for cell-wise inequality checks.
pub const CHECK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Construction {
    CoifmanRochberg { delta: f64, power: Option<f64> },
    RubioDeFrancia { b: f64, k: usize },
    Truncation { lambda: f64 },
    Product { factor: f64 },
    MaximalOfWeight { s: f64 },
    External,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MajorantCertificate {
    pub target: String,
    pub r: f64,
    pub w: Weight,
    pub domination_margin: f64,
    pub a1_report: ApReport,
    pub trace: Construction,
}

/// The certificate without its weight values, for reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateSummary {
    pub target: String,
    pub r: f64,
    pub weight_id: String,
    pub domination_margin: f64,
    pub a1_report: ApReport,
    pub trace: Construction,
}

impl MajorantCertificate {
    /// Builds a certificate for `|f|^r ≤ w`. Values of `w` that fall short of
    /// `|f_i|^r` by rounding only are raised to it; a genuine shortfall is an
    /// error.
    pub fn new(target: &GridFunction, r: f64, w: GridFunction, trace: Construction) -> Result<Self> {
        target.check_same_grid(&w)?;
        let mut values = w.into_values();
        for (i, (v, f)) in values.iter_mut().zip(target.values()).enumerate() {
            let need = f.abs().powf(r);
            if *v < need {
                if *v < need * (1.0 - CHECK_TOL) {
                    return Err(Error::CheckFailed(format!("majorant misses cell {i}: {v} < |f|^r = {need}")));
                }
                *v = need;
            }
        }
        let w = Weight::new(GridFunction::new(target.domain(), target.depth(), values)?)?;
        let domination_margin = margin(target, r, &w);
        let a1_report = ap_constant(&w, 1.0, WindowFamily::All)?;
        Ok(MajorantCertificate { target: target.fingerprint(), r, w, domination_margin, a1_report, trace })
    }

    /// Re-checks domination and the stored `A_1` report against `f`.
    pub fn verify(&self, f: &GridFunction) -> Result<()> {
        if f.fingerprint() != self.target {
            return Err(Error::CheckFailed("certificate belongs to a different function".into()));
        }
        let m = margin(f, self.r, &self.w);
        if m < 0.0 || (m - self.domination_margin).abs() > CHECK_TOL * m.abs().max(1.0) {
            return Err(Error::CheckFailed(format!("domination margin {m} vs stored {}", self.domination_margin)));
        }
        let a1 = ap_constant(&self.w, 1.0, WindowFamily::All)?;
        if (a1.constant - self.a1_report.constant).abs() > CHECK_TOL * a1.constant {
            return Err(Error::CheckFailed(format!(
                "A_1 constant {} vs stored {}",
                a1.constant, self.a1_report.constant
            )));
        }
        Ok(())
    }

    pub fn summary(&self) -> CertificateSummary {
        CertificateSummary {
            target: self.target.clone(),
            r: self.r,
            weight_id: self.w.grid().fingerprint(),
            domination_margin: self.domination_margin,
            a1_report: self.a1_report.clone(),
            trace: self.trace.clone(),
        }
    }
}

fn margin(f: &GridFunction, r: f64, w: &Weight) -> f64 {
    w.values().iter().zip(f.values()).map(|(w, f)| w - f.abs().powf(r)).fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MembershipClass {
    Lp {
        p: f64,
    },
    /// `⋃_{p>r} L^p`.
    UnionLp {
        r: f64,
    },
    /// `M^r_{A_1}`.
    MA1r {
        r: f64,
    },
    /// `⋃_{w∈A_{p0/r}} L^{p0}_w`.
    UnionWeightedLp {
        p0: f64,
        q0: f64,
    },
    MF,
    MAp {
        p: f64,
    },
    MAinfty,
    UnionWeakLp,
    UnionL1A1,
    WeightedHardy {
        p0: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MembershipVerdict {
    CertifiedYes,
    CertifiedNoAtScale,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    Trend { label: String, trend: TrendReport },
    Certificate { certificate: CertificateSummary },
    Ap { label: String, report: ApReport },
    Number { label: String, value: f64 },
    Check { label: String, passed: bool },
}

impl Evidence {
    pub fn trend(label: impl Into<String>, trend: TrendReport) -> Self {
        Evidence::Trend { label: label.into(), trend }
    }
    pub fn number(label: impl Into<String>, value: f64) -> Self {
        Evidence::Number { label: label.into(), value }
    }
    pub fn check(label: impl Into<String>, passed: bool) -> Self {
        Evidence::Check { label: label.into(), passed }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub function_id: String,
    pub class: MembershipClass,
    pub verdict: MembershipVerdict,
    pub evidence: Vec<Evidence>,
    pub scales: Vec<f64>,
    pub seeds: Vec<u64>,
    pub notes: Vec<String>,
}

impl MembershipReport {
    pub fn new(function_id: impl Into<String>, class: MembershipClass, verdict: MembershipVerdict) -> Self {
        MembershipReport {
            function_id: function_id.into(),
            class,
            verdict,
            evidence: Vec::new(),
            scales: Vec::new(),
            seeds: Vec::new(),
            notes: Vec::new(),
        }
    }
}

/// Verdict of a set of trends for a "finite" claim: all plateau → yes, any
/// divergent → no at scale, otherwise inconclusive.
pub fn verdict_from_trends<'a>(trends: impl IntoIterator<Item = &'a TrendReport>) -> MembershipVerdict {
    let mut all_plateau = true;
    for t in trends {
        match t.verdict {
            Verdict::Divergent => return MembershipVerdict::CertifiedNoAtScale,
            Verdict::Plateau => {}
            Verdict::Inconclusive => all_plateau = false,
        }
    }
    if all_plateau {
        MembershipVerdict::CertifiedYes
    } else {
        MembershipVerdict::Inconclusive
    }
}

fn zero_function(f: &GridFunction) -> bool {
    f.values().iter().all(|&v| v == 0.0)
}

/// `w = (Mf)^δ`, an `A_1` majorant of `|f|^δ`.
pub fn coifman_rochberg(f: &GridFunction, delta: f64) -> Result<MajorantCertificate> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::DeltaOutOfRange(delta));
    }
    if zero_function(f) {
        return MajorantCertificate::new(
            f,
            delta,
            GridFunction::constant(f.domain(), f.depth(), 1.0)?,
            Construction::External,
        );
    }
    let mf = maximal_fast(f);
    let w = mf.map(|v| v.powf(delta))?;
    MajorantCertificate::new(f, delta, w, Construction::CoifmanRochberg { delta, power: None })
}

/// `|f|^r ≤ M(|f|^p)^{r/p}`, given evidence that `f ∈ L^p`.
pub fn local_majorant(f: &GridFunction, r: f64, p: f64, lp_evidence: &TrendReport) -> Result<MajorantCertificate> {
    if !(r > 0.0 && p > r) {
        return Err(Error::InvalidInput(format!("local majorant needs p > r > 0, got r = {r}, p = {p}")));
    }
    if lp_evidence.verdict != Verdict::Plateau {
        return Err(Error::NotInLp { p });
    }
    if zero_function(f) {
        return MajorantCertificate::new(
            f,
            r,
            GridFunction::constant(f.domain(), f.depth(), 1.0)?,
            Construction::External,
        );
    }
    let delta = r / p;
    let g = f.map(|v| v.abs().powf(p))?;
    let w = maximal_fast(&g).map(|v| v.powf(delta))?;
    MajorantCertificate::new(f, r, w, Construction::CoifmanRochberg { delta, power: Some(p) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedWitness {
    pub sigma: Weight,
    pub q0: f64,
    /// `∫|f|^{p0}·σ`.
    pub lhs: f64,
    /// `∫w`.
    pub rhs: f64,
    pub bound_ok: bool,
    pub ap_report: ApReport,
}

/// `σ = w^{1−q0}` with `q0 = p0/r`: `f ∈ L^{p0}_σ` with `∫|f|^{p0}σ ≤ ∫w`.
pub fn weighted_membership_from_majorant(
    f: &GridFunction,
    cert: &MajorantCertificate,
    p0: f64,
) -> Result<WeightedWitness> {
    let q0 = p0 / cert.r;
    if !(q0 > 1.0) {
        return Err(Error::InvalidInput(format!("need p0 > r, got p0 = {p0}, r = {}", cert.r)));
    }
    let sigma = cert.w.grid().map(|v| v.powf(1.0 - q0)).and_then(Weight::new)?;
    let lhs = f.weighted_lp_norm(sigma.grid(), p0)?.powf(p0);
    let rhs = cert.w.grid().integral();
    let ap_report = ap_constant(&sigma, q0, WindowFamily::All)?;
    Ok(WeightedWitness { sigma, q0, lhs, rhs, bound_ok: lhs <= rhs * (1.0 + 1e-9), ap_report })
}

/// `M w` as an `A_1` majorant of an `A_∞` weight `w`, gated on a satisfied
/// reverse Hölder exponent `s`, with the sandwich
/// `M w ≤ (M w^s)^{1/s} ≤ 2 M w` checked cell-wise.
pub fn ainfty_to_a1(w: &Weight) -> Result<MajorantCertificate> {
    let rh = reverse_holder_exponent(w, WindowFamily::All).map_err(|e| Error::RHFailed(e.to_string()))?;
    if !rh.satisfied {
        return Err(Error::RHFailed(format!("reverse Hölder fails at s = {}", rh.s)));
    }
    let s = rh.s;
    let mw = maximal_fast(w.grid());
    let ws = power_weight(w, s)?;
    let mws = maximal_fast(ws.grid());
    for (i, (&a, &b)) in mw.values().iter().zip(mws.values()).enumerate() {
        let root = b.powf(1.0 / s);
        if a > root * (1.0 + 1e-9) {
            return Err(Error::RHFailed(format!("Jensen side fails at cell {i}")));
        }
        if root > 2.0 * a * (1.0 + 1e-9) {
            return Err(Error::RHFailed(format!("reverse Hölder side fails at cell {i}")));
        }
    }
    MajorantCertificate::new(w.grid(), 1.0, mw, Construction::MaximalOfWeight { s })
}

/// From a certificate `|f|^r ≤ w` (with `r ≥ 1`), the majorant
/// `[w]_{A_1}·w` of `(Mf)^r`, through the chain
/// `(Mf)^r ≤ M(|f|^r) ≤ M w ≤ [w]_{A_1} w`.
pub fn majorant_maximal_transfer(f: &GridFunction, cert: &MajorantCertificate) -> Result<MajorantCertificate> {
    let r = cert.r;
    if r < 1.0 {
        return Err(Error::InvalidInput(format!("transfer needs r >= 1, got {r}")));
    }
    let mf = maximal_fast(f);
    let fr = f.map(|v| v.abs().powf(r))?;
    let mfr = maximal_fast(&fr);
    let mw = maximal_fast(cert.w.grid());
    let c = cert.a1_report.constant;
    let le = |a: f64, b: f64| a <= b * (1.0 + CHECK_TOL);
    for i in 0..f.n() {
        let links = [
            (le(mf.values()[i].powf(r), mfr.values()[i]), "(Mf)^r <= M(|f|^r)"),
            (le(mfr.values()[i], mw.values()[i]), "M(|f|^r) <= Mw"),
            (le(mw.values()[i], c * cert.w.values()[i]), "Mw <= [w]_A1 w"),
        ];
        if let Some((_, link)) = links.iter().find(|(ok, _)| !ok) {
            return Err(Error::ChainBroken { cell: i, link: (*link).to_string() });
        }
    }
    let w = cert.w.grid().map(|v| c * v)?;
    MajorantCertificate::new(&mf, r, w, Construction::Product { factor: c })
}

/// The exponent ladder used by the local classifier, `r·{1.01, 1.1, 1.5, 2, 4}`.
pub fn p_ladder(r: f64) -> Vec<f64> {
    [1.01, 1.1, 1.5, 2.0, 4.0].iter().map(|m| r * m).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{sample, ClosedForm, Interval};

    fn unit() -> Interval {
        Interval::new(0.0, 1.0).unwrap()
    }

    fn half_indicator(depth: u32) -> GridFunction {
        sample(&ClosedForm::constant(1.0).restrict(Interval::new(0.0, 0.5).unwrap()), unit(), depth).unwrap()
    }

    #[test]
    fn cr_of_constant_is_one() {
        let f = GridFunction::constant(unit(), 6, 1.0).unwrap();
        let c = coifman_rochberg(&f, 0.5).unwrap();
        assert!(c.w.values().iter().all(|&v| (v - 1.0).abs() < 1e-15));
        assert!((c.a1_report.constant - 1.0).abs() < 1e-12);
        c.verify(&f).unwrap();
        assert!(matches!(coifman_rochberg(&f, 1.0), Err(Error::DeltaOutOfRange(_))));
    }

    #[test]
    fn cr_ordering_on_indicator() {
        let f = half_indicator(9);
        let half = coifman_rochberg(&f, 0.5).unwrap();
        let full = ap_constant(&Weight::new(maximal_fast(&f)).unwrap(), 1.0, WindowFamily::All).unwrap();
        assert!(half.a1_report.constant < full.constant);
        assert!(half.domination_margin >= 0.0);
    }

    #[test]
    fn weighted_witness_equality_for_constants() {
        let f = GridFunction::constant(unit(), 5, 1.0).unwrap();
        let plateau = TrendReport::classify(vec![1.0, 2.0, 3.0, 4.0], vec![Some(1.0); 4], &Default::default()).unwrap();
        let cert = local_majorant(&f, 1.0, 2.0, &plateau).unwrap();
        let wit = weighted_membership_from_majorant(&f, &cert, 2.0).unwrap();
        assert!(wit.bound_ok);
        assert!((wit.lhs - wit.rhs).abs() < 1e-12);
    }

    #[test]
    fn transfer_chain_on_indicator() {
        let f = half_indicator(8);
        let plateau = TrendReport::classify(vec![1.0, 2.0, 3.0, 4.0], vec![Some(1.0); 4], &Default::default()).unwrap();
        let cert = local_majorant(&f, 1.0, 2.0, &plateau).unwrap();
        let moved = majorant_maximal_transfer(&f, &cert).unwrap();
        assert!((moved.a1_report.constant - cert.a1_report.constant).abs() < 1e-12 * cert.a1_report.constant);
    }

    #[test]
    fn ainfty_majorant_of_sqrt_weight() {
        let w =
            Weight::from_closed_form(&ClosedForm::abs_power(0.0, 0.5), Interval::new(-1.0, 1.0).unwrap(), 8).unwrap();
        let c = ainfty_to_a1(&w).unwrap();
        assert!(c.domination_margin >= 0.0);
        assert!(c.a1_report.constant.is_finite());
    }
}
