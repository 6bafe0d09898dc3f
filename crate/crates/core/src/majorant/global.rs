//! Global (whole-line) tests, phrased as trends over `[-R, R]`.

use serde::{Deserialize, Serialize};

use super::{
    global_ap_certificate, local_majorant, p_ladder, Construction, Evidence, MajorantCertificate, MembershipClass,
    MembershipReport, MembershipVerdict,
};
use crate::error::{Error, Result};
use crate::grid::{
    divergence_probe, lp_radius_trend, radius_ladder, sample, weak_lp_quasinorm_closed_form, ClosedForm, GridFunction,
    Interval, TrendConfig, TrendReport, Verdict,
};
use crate::maximal::{maximal_fast, WindowFamily};
use crate::weights::{ap_constant, Weight};

pub(crate) fn closed_form_id(cf: &ClosedForm) -> String {
    serde_json::to_string(cf).unwrap_or_else(|_| "closed-form".into())
}

/// `(1/2r)·∫_{-r}^{r} |f|^s`.
pub fn radial_average(cf: &ClosedForm, s: f64, r: f64) -> Result<f64> {
    let g = if s == 1.0 { cf.clone() } else { cf.clone().pow(s) };
    let v = g.integral(Interval::symmetric(r)?)? / (2.0 * r);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NotInLp { p: s })
    }
}

/// Depth whose cells on `[-r, r]` have the given width.
fn depth_for(r: f64, width: f64) -> u32 {
    (2.0 * r / width).log2().round().max(0.0) as u32
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GlobalA1Config {
    pub s_ladder: Vec<f64>,
    pub radii: Vec<f64>,
    pub cell_width: f64,
    pub probe_points: Vec<f64>,
    /// Depth of the grid on `[-R_0, R_0]` that carries the certificate.
    pub certificate_depth: u32,
    pub trend: TrendConfig,
}

impl Default for GlobalA1Config {
    fn default() -> Self {
        GlobalA1Config {
            s_ladder: vec![1.25, 1.5, 2.0, 4.0],
            radii: radius_ladder(3, 10),
            cell_width: 1.0 / 16.0,
            probe_points: vec![0.5, 2.0],
            certificate_depth: 10,
            trend: TrendConfig::default(),
        }
    }
}

/// `M_{A_1}(ℝ)` through "some `s > 1` with `|f|^s ∈ M_F`": for each ladder
/// `s` the grid probe `max_x M(|f|^s)(x)` over the fixed probe points and the
/// radial probe `sup_{r ≤ R} avg_{[-r,r]} |f|^s` are followed along `R`.
pub fn global_a1_test(cf: &ClosedForm, cfg: &GlobalA1Config) -> Result<MembershipReport> {
    if cfg.s_ladder.is_empty() || cfg.radii.is_empty() {
        return Err(Error::InvalidInput("global A_1 test needs non-empty ladders".into()));
    }
    if cfg.s_ladder.iter().any(|&s| !(s > 1.0)) {
        return Err(Error::InvalidInput("every ladder s must exceed 1".into()));
    }
    let mut report =
        MembershipReport::new(closed_form_id(cf), MembershipClass::MA1r { r: 1.0 }, MembershipVerdict::Inconclusive);
    report.scales = cfg.radii.clone();
    let mut all_divergent = true;
    let mut accepted = None;
    for &s in &cfg.s_ladder {
        let grid = divergence_probe(
            &cfg.radii,
            |r| {
                let domain = Interval::symmetric(r)?;
                let g = sample(&cf.clone().pow(s), domain, depth_for(r, cfg.cell_width))?;
                let m = maximal_fast(&g);
                let mut best = 0.0f64;
                for &x in &cfg.probe_points {
                    let i = g
                        .cell_of(x)
                        .ok_or_else(|| Error::InvalidInput(format!("probe point {x} is outside [-{r}, {r}]")))?;
                    best = best.max(m.values()[i]);
                }
                Ok(best)
            },
            &cfg.trend,
        )?;
        let averages: Vec<Option<f64>> = cfg.radii.iter().map(|&r| radial_average(cf, s, r).ok()).collect();
        let mut running = Some(0.0f64);
        let sup: Vec<Option<f64>> = averages
            .iter()
            .map(|a| {
                running = match (running, a) {
                    (Some(m), Some(a)) => Some(m.max(*a)),
                    _ => None,
                };
                running
            })
            .collect();
        let radial = TrendReport::classify(cfg.radii.clone(), sup, &cfg.trend)?;
        let both_plateau = grid.verdict == Verdict::Plateau && radial.verdict == Verdict::Plateau;
        let divergent = grid.verdict == Verdict::Divergent || radial.verdict == Verdict::Divergent;
        all_divergent &= divergent;
        if both_plateau && accepted.is_none() {
            accepted = Some((s, radial.clone()));
        }
        report.evidence.push(Evidence::trend(format!("grid M(|f|^s) at s = {s}"), grid));
        report.evidence.push(Evidence::trend(format!("radial sup-average at s = {s}"), radial));
    }
    if let Some((s, evidence)) = accepted {
        let domain = Interval::symmetric(cfg.radii[0])?;
        let f = sample(cf, domain, cfg.certificate_depth)?;
        let cert = local_majorant(&f, 1.0, s, &evidence)?;
        report.evidence.push(Evidence::Certificate { certificate: cert.summary() });
        report.notes.push(format!("accepted s = {s}; certificate M(|f|^s)^(1/s) on [-{0}, {0}]", cfg.radii[0]));
        report.verdict = MembershipVerdict::CertifiedYes;
    } else if all_divergent {
        report.verdict = MembershipVerdict::CertifiedNoAtScale;
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MaxMinConfig {
    pub radii: Vec<f64>,
    /// Cell width of the fine grids, used up to `fine_limit`.
    pub cell_width: f64,
    pub fine_limit: f64,
    /// Depth of the coarse grid on `[-R, R]` at every radius.
    pub coarse_depth: u32,
    pub trend: TrendConfig,
}

impl Default for MaxMinConfig {
    fn default() -> Self {
        MaxMinConfig {
            radii: radius_ladder(3, 18),
            cell_width: 1.0 / 16.0,
            fine_limit: 256.0,
            coarse_depth: 12,
            trend: TrendConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalPipelineReport {
    pub radii: Vec<f64>,
    pub margins: Vec<f64>,
    pub cellwise_ok: bool,
    pub a1_w: TrendReport,
    pub a1_u: TrendReport,
    pub a2_v: TrendReport,
    /// `∫ f·u` on the coarse grids, for reference.
    pub fu_grid: Vec<f64>,
    /// `∫ f·u` from exact integrals over a longer radius ladder.
    pub fu_exact: TrendReport,
    pub passed: bool,
}

struct MaxMinGrid {
    margin: f64,
    cellwise_ok: bool,
    a1_w: f64,
    a1_u: f64,
    a2_v: f64,
    fu: f64,
}

fn maxmin_grid(f_cf: &ClosedForm, w_cf: &ClosedForm, u_cf: &ClosedForm, r: f64, depth: u32) -> Result<MaxMinGrid> {
    let domain = Interval::symmetric(r)?;
    let f = sample(f_cf, domain, depth)?;
    let w = sample(w_cf, domain, depth)?;
    let u = Weight::from_closed_form(u_cf, domain, depth)?;
    let cert = MajorantCertificate::new(&f, 1.0, w, Construction::Truncation { lambda: 1.0 })?;
    let gac = global_ap_certificate(&f, &cert, &u, 2.0)?;
    Ok(MaxMinGrid {
        margin: cert.domination_margin,
        cellwise_ok: gac.cellwise_ok && cert.domination_margin >= 0.0,
        a1_w: cert.a1_report.constant,
        a1_u: ap_constant(&u, 1.0, WindowFamily::All)?.constant,
        a2_v: gac.ap_report.constant,
        fu: gac.rhs,
    })
}

/// The max/min pair: `f = max(|x|^{-1/4}, |x|^{-1/2})`, its majorant
/// `w = max(|x|^{-1/2}, 1)`, `u = min(|x|^{-0.8}, 1)` and `v = u·w^{-1} ∈ A_2`.
///
/// The `A_p` constants of `u` and `v` approach their suprema like
/// `R^{-0.2}`, and the extreme windows of `w` are tiny, so each radius is
/// examined on two grids: a fixed-width grid on `[-min(R, fine_limit), ..]`
/// and a fixed-depth grid on `[-R, R]`. Cells hold exact averages, so both
/// give exact window values and their maximum is a lower bound for the
/// supremum over all windows in `[-R, R]`.
pub fn global_maxmin_pipeline(cfg: &MaxMinConfig) -> Result<GlobalPipelineReport> {
    let f_cf = ClosedForm::abs_power(0.0, -0.25).max(ClosedForm::abs_power(0.0, -0.5));
    let w_cf = ClosedForm::abs_power(0.0, -0.5).truncate(1.0);
    let u_cf = ClosedForm::abs_power(0.0, -0.8).min(ClosedForm::constant(1.0));
    let mut margins = Vec::new();
    let mut cellwise_ok = true;
    let (mut a1_w, mut a1_u, mut a2_v, mut fu_grid) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    let mut fine: Option<(f64, MaxMinGrid)> = None;
    for &r in &cfg.radii {
        let rf = r.min(cfg.fine_limit);
        if fine.as_ref().map(|(at, _)| *at) != Some(rf) {
            fine = Some((rf, maxmin_grid(&f_cf, &w_cf, &u_cf, rf, depth_for(rf, cfg.cell_width))?));
        }
        let fg = &fine.as_ref().unwrap().1;
        let cg = maxmin_grid(&f_cf, &w_cf, &u_cf, r, cfg.coarse_depth)?;
        margins.push(fg.margin.min(cg.margin));
        cellwise_ok &= fg.cellwise_ok && cg.cellwise_ok;
        a1_w.push(Some(fg.a1_w.max(cg.a1_w)));
        a1_u.push(Some(fg.a1_u.max(cg.a1_u)));
        a2_v.push(Some(fg.a2_v.max(cg.a2_v)));
        fu_grid.push(cg.fu);
    }
    let a1_w = TrendReport::classify(cfg.radii.clone(), a1_w, &cfg.trend)?;
    let a1_u = TrendReport::classify(cfg.radii.clone(), a1_u, &cfg.trend)?;
    let a2_v = TrendReport::classify(cfg.radii.clone(), a2_v, &cfg.trend)?;
    // The tail of f·u decays like |x|^{-1.05}, so its plateau only shows on a
    // much longer ladder than the grids can reach.
    let fu_cf = f_cf.times(u_cf);
    let fu_exact = divergence_probe(&radius_ladder(3, 30), |r| fu_cf.integral(Interval::symmetric(r)?), &cfg.trend)?;
    let passed = cellwise_ok && [&a1_w, &a1_u, &a2_v, &fu_exact].iter().all(|t| t.verdict == Verdict::Plateau);
    Ok(GlobalPipelineReport {
        radii: cfg.radii.clone(),
        margins,
        cellwise_ok,
        a1_w,
        a1_u,
        a2_v,
        fu_grid,
        fu_exact,
        passed,
    })
}

/// Power weights `|x|^a`, `a ∈ {0, 1/4, 1/2, 1, 2}`: all in `A_∞`, none integrable.
pub fn candidate_l1_fixtures() -> Vec<(String, ClosedForm)> {
    [0.0, 0.25, 0.5, 1.0, 2.0]
        .iter()
        .map(|&a| {
            let cf = if a == 0.0 { ClosedForm::constant(1.0) } else { ClosedForm::abs_power(0.0, a) };
            (format!("|x|^{a}"), cf)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct L1FixtureRow {
    pub id: String,
    /// `[w]_{A_4}` over `[-R, R]` (scale invariant, so a plateau).
    pub a4: TrendReport,
    pub integrals: Vec<f64>,
    pub min_ratio: f64,
    pub grows: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct L1GrowthReport {
    pub radii: Vec<f64>,
    pub rows: Vec<L1FixtureRow>,
    /// Every `A_∞`-plateau fixture at least doubles its integral per doubling of `R`.
    pub all_fail_l1: bool,
}

/// No `A_∞` weight is integrable on the line: `∫_{-2R}^{2R} w ≥ 2∫_{-R}^{R} w`
/// along the ladder for each fixture.
pub fn l1_growth_check(radii: &[f64], depth: u32, cfg: &TrendConfig) -> Result<L1GrowthReport> {
    let mut rows = Vec::new();
    for (id, cf) in candidate_l1_fixtures() {
        let mut a4 = Vec::new();
        let mut integrals = Vec::new();
        for &r in radii {
            let domain = Interval::symmetric(r)?;
            a4.push(Some(
                ap_constant(&Weight::from_closed_form(&cf, domain, depth)?, 4.0, WindowFamily::All)?.constant,
            ));
            integrals.push(cf.integral(domain)?);
        }
        let a4 = TrendReport::classify(radii.to_vec(), a4, cfg)?;
        let min_ratio = integrals.windows(2).map(|w| w[1] / w[0]).fold(f64::INFINITY, f64::min);
        let grows = min_ratio >= 2.0 * (1.0 - 1e-12);
        rows.push(L1FixtureRow { id, a4, integrals, min_ratio, grows });
    }
    let all_fail_l1 = rows.iter().filter(|r| r.a4.verdict == Verdict::Plateau).all(|r| r.grows);
    Ok(L1GrowthReport { radii: radii.to_vec(), rows, all_fail_l1 })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakCounterexampleReport {
    pub weak_radii: Vec<f64>,
    /// `‖|x|^{-1/2}‖_{L^{2,∞}([-R,R])}`.
    pub weak_values: Vec<f64>,
    pub weak_ok: bool,
    pub lp_trends: Vec<(f64, TrendReport)>,
    pub lp_all_divergent: bool,
    /// Weak-`L^p` trends of `max(|x|^{-1/4}, |x|^{-1/2})`.
    pub maxpower_weak: Vec<(f64, TrendReport)>,
    pub maxpower_all_divergent: bool,
}

/// `|x|^{-1/2} ∈ L^{2,∞} ∖ ⋃_p L^p` on the line, and the max-power function
/// outside every weak `L^p`.
pub fn weak_lp_counterexample(cfg: &TrendConfig) -> Result<WeakCounterexampleReport> {
    let f = ClosedForm::abs_power(0.0, -0.5);
    let weak_radii = vec![2f64.powi(6), 2f64.powi(10), 2f64.powi(20)];
    let weak_values = weak_radii
        .iter()
        .map(|&r| weak_lp_quasinorm_closed_form(&f, Interval::symmetric(r)?, 2.0))
        .collect::<Result<Vec<_>>>()?;
    let weak_ok = weak_values.iter().all(|v| (v / 2f64.sqrt() - 1.0).abs() <= 0.02);
    let ladder = p_ladder(1.0);
    let radii = radius_ladder(3, 30);
    let lp_trends =
        ladder.iter().map(|&p| Ok((p, lp_radius_trend(&f, p, &radii, cfg)?))).collect::<Result<Vec<_>>>()?;
    let lp_all_divergent = lp_trends.iter().all(|(_, t)| t.verdict == Verdict::Divergent);
    let maxpower = ClosedForm::abs_power(0.0, -0.25).max(ClosedForm::abs_power(0.0, -0.5));
    let weak_ladder = radius_ladder(3, 20);
    let maxpower_weak = ladder
        .iter()
        .map(|&p| {
            let t = divergence_probe(
                &weak_ladder,
                |r| weak_lp_quasinorm_closed_form(&maxpower, Interval::symmetric(r)?, p),
                cfg,
            )?;
            Ok((p, t))
        })
        .collect::<Result<Vec<_>>>()?;
    let maxpower_all_divergent = maxpower_weak.iter().all(|(_, t)| t.verdict == Verdict::Divergent);
    Ok(WeakCounterexampleReport {
        weak_radii,
        weak_values,
        weak_ok,
        lp_trends,
        lp_all_divergent,
        maxpower_weak,
        maxpower_all_divergent,
    })
}

/// Cell values of `f` on `[-R, R]` at fixed cell width, for callers that
/// need the grid the global tests use.
pub fn global_grid(cf: &ClosedForm, r: f64, cell_width: f64) -> Result<GridFunction> {
    sample(cf, Interval::symmetric(r)?, depth_for(r, cell_width))
}
