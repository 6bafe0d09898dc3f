//! Local classification on a bounded interval `Q`.
//!
//! Runs `L^p` trends along the exponent ladder `r·{1.01, 1.1, 1.5, 2, 4}`. On
//! the first plateau it emits three consistent reports: the `L^p` witness,
//! the majorant `M(|f|^p)^{r/p}`, and the weighted witness built from that
//! majorant. If every ladder point diverges, all three classes are refuted
//! at scale.

use serde::{Deserialize, Serialize};

use super::global::closed_form_id;
use super::{
    local_majorant, p_ladder, weighted_membership_from_majorant, Evidence, MembershipClass, MembershipReport,
    MembershipVerdict,
};
use crate::error::{Error, Result};
use crate::grid::{
    depth_ladder, divergence_probe, lp_refinement_trend, sample, ClosedForm, GridFunction, Interval, TrendConfig,
    TrendReport, Verdict,
};
use crate::maximal::maximal_fast;
use crate::weights::coarsen;

#[derive(Debug, Clone, Copy)]
pub enum LocalSource<'a> {
    ClosedForm(&'a ClosedForm),
    Grid(&'a GridFunction),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LocalConfig {
    pub r: f64,
    /// Refinement depths for closed-form sources.
    pub depths: Vec<f64>,
    /// Number of coarsening steps used as the ladder for grid sources.
    pub grid_levels: u32,
    pub certificate_depth: u32,
    pub trend: TrendConfig,
}

impl Default for LocalConfig {
    fn default() -> Self {
        LocalConfig {
            r: 1.0,
            depths: depth_ladder(8, 14),
            grid_levels: 5,
            certificate_depth: 10,
            trend: TrendConfig::default(),
        }
    }
}

struct Probe<'a> {
    source: LocalSource<'a>,
    q: Interval,
    cfg: &'a LocalConfig,
}

impl Probe<'_> {
    fn id(&self) -> String {
        match self.source {
            LocalSource::ClosedForm(cf) => closed_form_id(cf),
            LocalSource::Grid(g) => g.fingerprint(),
        }
    }

    fn scales(&self) -> Vec<f64> {
        match self.source {
            LocalSource::ClosedForm(_) => self.cfg.depths.clone(),
            LocalSource::Grid(g) => self.grid_depths(g),
        }
    }

    fn grid_depths(&self, g: &GridFunction) -> Vec<f64> {
        let lo = g.depth().saturating_sub(self.cfg.grid_levels);
        depth_ladder(lo, g.depth())
    }

    /// The grid at depth `k`: exact averages for closed forms, coarsened
    /// data for grid sources.
    fn grid_at(&self, k: u32) -> Result<GridFunction> {
        match self.source {
            LocalSource::ClosedForm(cf) => sample(cf, self.q, k),
            LocalSource::Grid(g) => {
                let mut h = g.clone();
                while h.depth() > k {
                    h = coarsen(&h);
                }
                Ok(h)
            }
        }
    }

    fn lp_trend(&self, p: f64) -> Result<TrendReport> {
        match self.source {
            LocalSource::ClosedForm(cf) => lp_refinement_trend(cf, self.q, p, &self.cfg.depths, &self.cfg.trend),
            LocalSource::Grid(g) => {
                divergence_probe(&self.grid_depths(g), |k| Ok(self.grid_at(k as u32)?.lp_norm(p)), &self.cfg.trend)
            }
        }
    }

    /// `M f` at the cell containing the point three quarters along `Q`.
    fn maximal_trend(&self) -> Result<TrendReport> {
        let x = self.q.left + 0.75 * self.q.length();
        divergence_probe(
            &self.scales(),
            |k| {
                let g = self.grid_at(k as u32)?;
                let i = g.cell_of(x).ok_or_else(|| Error::InvalidInput("probe point outside Q".into()))?;
                Ok(maximal_fast(&g).values()[i])
            },
            &self.cfg.trend,
        )
    }

    fn certificate_grid(&self) -> Result<GridFunction> {
        match self.source {
            LocalSource::ClosedForm(cf) => sample(cf, self.q, self.cfg.certificate_depth),
            LocalSource::Grid(g) => Ok(g.clone()),
        }
    }
}

/// Membership reports for `L^r`, `M_F`, `⋃_{p>r} L^p`, `M^r_{A_1}` and
/// `⋃_{w∈A_{p0/r}} L^{p0}_w` on `Q`.
pub fn classify_local(source: LocalSource, q: Interval, p0: f64, cfg: &LocalConfig) -> Result<Vec<MembershipReport>> {
    let r = cfg.r;
    if !(r > 0.0) || !(p0 > r) {
        return Err(Error::InvalidInput(format!("need p0 > r > 0, got p0 = {p0}, r = {r}")));
    }
    if let LocalSource::Grid(g) = source {
        if g.domain() != q {
            return Err(Error::InvalidInput("grid source must live on Q".into()));
        }
    }
    let probe = Probe { source, q, cfg };
    let id = probe.id();
    let q0 = p0 / r;
    let classes = [
        MembershipClass::Lp { p: r },
        MembershipClass::MF,
        MembershipClass::UnionLp { r },
        MembershipClass::MA1r { r },
        MembershipClass::UnionWeightedLp { p0, q0 },
    ];
    let mut reports: Vec<MembershipReport> =
        classes.iter().map(|c| MembershipReport::new(id.clone(), c.clone(), MembershipVerdict::Inconclusive)).collect();
    for rep in &mut reports {
        rep.scales = probe.scales();
    }

    let zero = probe.certificate_grid()?.values().iter().all(|&v| v == 0.0);
    if zero {
        for rep in &mut reports {
            rep.verdict = MembershipVerdict::CertifiedYes;
            rep.notes.push("f ≡ 0 is majorised by w ≡ 1".into());
        }
        return Ok(reports);
    }

    let lr = probe.lp_trend(r)?;
    reports[0].verdict = super::verdict_from_trends([&lr]);
    reports[0].evidence.push(Evidence::trend(format!("L^{r} norm"), lr));

    let l1 = if r == 1.0 { reports[0].evidence[0].clone() } else { Evidence::trend("L^1 norm", probe.lp_trend(1.0)?) };
    let l1_plateau = matches!(&l1, Evidence::Trend { trend, .. } if trend.verdict == Verdict::Plateau);
    reports[1].evidence.push(l1);
    if l1_plateau {
        reports[1].verdict = MembershipVerdict::CertifiedYes;
        reports[1].notes.push("integrable on Q, so M f is finite almost everywhere".into());
    } else {
        let mf = probe.maximal_trend()?;
        reports[1].verdict = super::verdict_from_trends([&mf]);
        reports[1].evidence.push(Evidence::trend("M f at 3/4 of Q", mf));
    }

    let mut all_divergent = true;
    let mut found = None;
    for p in p_ladder(r) {
        let t = probe.lp_trend(p)?;
        all_divergent &= t.verdict == Verdict::Divergent;
        let plateau = t.verdict == Verdict::Plateau;
        reports[2].evidence.push(Evidence::trend(format!("L^{p} norm"), t.clone()));
        if plateau {
            found = Some((p, t));
            break;
        }
    }

    match found {
        Some((p, evidence)) => {
            reports[2].verdict = MembershipVerdict::CertifiedYes;
            reports[2].notes.push(format!("first plateau at p = {p}"));

            let f = probe.certificate_grid()?;
            let cert = local_majorant(&f, r, p, &evidence)?;
            let levels: Vec<u32> = match source {
                LocalSource::ClosedForm(_) => {
                    (cfg.certificate_depth.saturating_sub(3)..=cfg.certificate_depth).collect()
                }
                LocalSource::Grid(g) => probe.grid_depths(g).iter().map(|&k| k as u32).collect(),
            };
            let params: Vec<f64> = levels.iter().map(|&k| f64::from(k)).collect();
            let a1 = divergence_probe(
                &params,
                |k| Ok(local_majorant(&probe.grid_at(k as u32)?, r, p, &evidence)?.a1_report.constant),
                &cfg.trend,
            )?;
            reports[3].verdict = super::verdict_from_trends([&a1]);
            reports[3].evidence.push(Evidence::Certificate { certificate: cert.summary() });
            reports[3].evidence.push(Evidence::trend("A_1 constant of M(|f|^p)^(r/p)", a1));

            let witness = weighted_membership_from_majorant(&f, &cert, p0)?;
            reports[4].verdict =
                if witness.bound_ok { MembershipVerdict::CertifiedYes } else { MembershipVerdict::Inconclusive };
            reports[4].evidence.push(Evidence::number("weighted L^p0 power", witness.lhs));
            reports[4].evidence.push(Evidence::number("integral of majorant", witness.rhs));
            reports[4]
                .evidence
                .push(Evidence::Ap { label: format!("A_{q0} constant of sigma"), report: witness.ap_report });
            reports[4].evidence.push(Evidence::check("bound", witness.bound_ok));
        }
        None if all_divergent => {
            for rep in &mut reports[2..] {
                rep.verdict = MembershipVerdict::CertifiedNoAtScale;
                rep.notes.push("every ladder exponent diverges".into());
            }
        }
        None => {}
    }
    Ok(reports)
}
