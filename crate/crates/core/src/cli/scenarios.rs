//! Named reproduction scenarios. Each one is deterministic given its
//! settings (seed and trial count included) and returns its checks together
//! with the tables and plots to write.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use super::config::Settings;
use super::output::{num, Plot, Series, Table};
use crate::error::{Error, Result};
use crate::grid::{
    depth_ladder, lp_refinement_trend, radius_ladder, sample, ClosedForm, GridFunction, Interval, TrendConfig, Verdict,
};
use crate::hardy::{
    analytic_defect, circle_ap_constant, outer_from_weight, szego_test, weighted_hp_membership, CircleFunction,
    CircleWeight, Offset,
};
use crate::majorant::{
    classify_local, coifman_rochberg, global_a1_test, global_maxmin_pipeline, l1_growth_check, radial_average,
    rubio_de_francia, weak_lp_counterexample, GlobalA1Config, LocalConfig, LocalSource, MaxMinConfig,
    MembershipVerdict, RdfSpace,
};
use crate::maximal::{maximal_fast, maximal_iterate, maximal_naive, maximal_shifted_dyadic, op_norm_estimate};
use crate::weights::{ap_constant, ap_refinement_trend, Weight};
use crate::WindowFamily;

pub const SCENARIOS: [&str; 9] = [
    "example1",
    "power-weight",
    "spike",
    "global-maxmin",
    "global-power",
    "weak-counterexample",
    "constant-one",
    "hardy-outer",
    "hardy-membership",
];

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub id: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub name: String,
    pub criteria: Vec<u32>,
    pub parameters: Value,
    pub checks: Vec<CheckResult>,
    pub details: Value,
    pub tables: Vec<(String, Table)>,
    pub plots: Vec<Plot>,
}

impl ScenarioOutcome {
    fn new(name: &str, criteria: &[u32], parameters: Value) -> Self {
        ScenarioOutcome {
            name: name.to_string(),
            criteria: criteria.to_vec(),
            parameters,
            checks: Vec::new(),
            details: json!({}),
            tables: Vec::new(),
            plots: Vec::new(),
        }
    }

    fn check(&mut self, id: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(CheckResult { id: id.to_string(), passed, detail: detail.into() });
    }

    fn detail(&mut self, key: &str, value: impl Serialize) {
        self.details[key] = serde_json::to_value(value).unwrap_or(Value::Null);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed_ids(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.id.as_str()).collect()
    }

    pub fn report(&self) -> Value {
        json!({
            "scenario": self.name,
            "criteria": self.criteria,
            "parameters": self.parameters,
            "passed": self.passed(),
            "checks": self.checks,
            "details": self.details,
        })
    }
}

pub fn run_scenario(name: &str, s: &Settings) -> Result<ScenarioOutcome> {
    match name {
        "example1" => example1(),
        "power-weight" => power_weight(),
        "spike" => spike(s),
        "global-maxmin" => global_maxmin(),
        "global-power" => global_power(),
        "weak-counterexample" => weak_counterexample(),
        "constant-one" => constant_one(s),
        "hardy-outer" => hardy_outer(s),
        "hardy-membership" => hardy_membership(s),
        other => Err(Error::UnknownScenario(other.to_string())),
    }
}

fn verdict_name(v: MembershipVerdict) -> &'static str {
    match v {
        MembershipVerdict::CertifiedYes => "certified-yes",
        MembershipVerdict::CertifiedNoAtScale => "certified-no-at-scale",
        MembershipVerdict::Inconclusive => "inconclusive",
    }
}

fn example1() -> Result<ScenarioOutcome> {
    let q = Interval::new(0.0, 1.0)?;
    let depths = depth_ladder(8, 16);
    let mut o = ScenarioOutcome::new("example1", &[7], json!({"interval": [0.0, 1.0], "depths": depths, "p0": 2.0}));
    let cf = ClosedForm::example1();
    let cfg = TrendConfig::default();

    let integral = sample(&cf, q, 16)?.integral();
    let want = 1.0 / std::f64::consts::LN_2;
    o.check("l1-integral", (integral - want).abs() < 1e-3, format!("{integral} vs {want}"));

    let mut trends = Vec::new();
    for p in [1.0, 1.1, 1.5] {
        let t = lp_refinement_trend(&cf, q, p, &depths, &cfg)?;
        let expected = if p == 1.0 { Verdict::Plateau } else { Verdict::Divergent };
        o.check(&format!("lp-trend-{p}"), t.verdict == expected, format!("{:?}", t.verdict));
        trends.push((format!("L^{p}"), t));
    }

    let reports = classify_local(LocalSource::ClosedForm(&cf), q, 2.0, &LocalConfig::default())?;
    use MembershipVerdict::*;
    let expected = [CertifiedYes, CertifiedYes, CertifiedNoAtScale, CertifiedNoAtScale, CertifiedNoAtScale];
    let labels = ["L1", "MF", "union-Lp", "MA1", "union-L2w"];
    for ((rep, want), label) in reports.iter().zip(expected).zip(labels) {
        o.check(&format!("classify-{label}"), rep.verdict == want, verdict_name(rep.verdict));
    }

    o.detail("l1_integral", integral);
    o.detail("trends", trends.iter().map(|(n, t)| (n.clone(), t.clone())).collect::<Vec<_>>());
    o.detail("classification", &reports);
    let refs: Vec<(String, &crate::grid::TrendReport)> = trends.iter().map(|(n, t)| (n.clone(), t)).collect();
    o.tables.push(("lp_trends.csv".into(), Table::from_trends(&refs)));
    o.plots.push(Plot {
        file: "lp_trends.svg".into(),
        title: "example1: L^p norms along refinement".into(),
        x_label: "depth".into(),
        log_x: false,
        log_y: true,
        series: trends.iter().map(|(n, t)| Series::from_trend(n.clone(), t)).collect(),
    });
    let f16 = sample(&cf, q, 12)?;
    o.tables.push(("example1_depth12.csv".into(), grid_table(&f16)));
    Ok(o)
}

fn grid_table(g: &GridFunction) -> Table {
    let mut t = Table::new(&["cell", "left", "right", "value"]);
    for i in 0..g.n() {
        let (a, b) = g.cell(i);
        t.push(vec![i.to_string(), num(a), num(b), num(g.values()[i])]);
    }
    t
}

fn power_weight() -> Result<ScenarioOutcome> {
    let depths = depth_ladder(8, 14);
    let alphas = [-1.0, -0.5, 0.5, 1.0];
    let mut o = ScenarioOutcome::new("power-weight", &[3], json!({"alphas": alphas, "p": 2.0, "depths": depths}));
    let domain = Interval::new(-1.0, 1.0)?;
    let mut trends = Vec::new();
    for a in alphas {
        let t = ap_refinement_trend(
            &ClosedForm::abs_power(0.0, a),
            domain,
            2.0,
            WindowFamily::All,
            &depths,
            &TrendConfig::default(),
        )?;
        let expected = if a.abs() < 1.0 { Verdict::Plateau } else { Verdict::Divergent };
        o.check(
            &format!("a2-trend-alpha-{a}"),
            t.verdict == expected,
            format!("{:?}, last = {:?}", t.verdict, t.last()),
        );
        trends.push((format!("alpha={a}"), t));
    }
    o.detail("trends", &trends);
    let refs: Vec<(String, &crate::grid::TrendReport)> = trends.iter().map(|(n, t)| (n.clone(), t)).collect();
    o.tables.push(("a2_trends.csv".into(), Table::from_trends(&refs)));
    o.plots.push(Plot {
        file: "a2_trends.svg".into(),
        title: "[|x|^alpha]_A2 along refinement".into(),
        x_label: "depth".into(),
        log_x: false,
        log_y: false,
        series: trends.iter().map(|(n, t)| Series::from_trend(n.clone(), t)).collect(),
    });
    Ok(o)
}

fn random_grid(rng: &mut ChaCha8Rng, depth: u32) -> Result<GridFunction> {
    let n = 1usize << depth;
    let values = (0..n).map(|_| rng.gen_range(0.0..1.0f64).powi(3) * 10.0).collect();
    GridFunction::new(Interval::new(0.0, 1.0)?, depth, values)
}

fn spike(s: &Settings) -> Result<ScenarioOutcome> {
    let mut o = ScenarioOutcome::new("spike", &[1], json!({"seed": s.seed, "random_functions": 200, "max_depth": 10}));
    let unit = Interval::new(0.0, 1.0)?;
    let mut values = vec![0.0; 8];
    values[0] = 1.0;
    let f = GridFunction::new(unit, 3, values)?;
    let mf = maximal_fast(&f);
    let exact = mf.values().iter().enumerate().all(|(d, v)| *v == 1.0 / (d as f64 + 1.0));
    o.check("spike-profile", exact, format!("{:?}", mf.values()));
    let m2 = maximal_iterate(&f, 2)?;
    let ge = m2.values().iter().zip(mf.values()).all(|(a, b)| *a >= *b);
    let strict = m2.values().iter().zip(mf.values()).any(|(a, b)| *a > *b);
    o.check("iterate-grows", ge && strict, format!("{:?}", m2.values()));

    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let mut worst_rel = 0.0f64;
    let mut worst_third = 0.0f64;
    for i in 0..200 {
        let g = random_grid(&mut rng, 1 + (i % 10) as u32)?;
        let fast = maximal_fast(&g);
        let naive = maximal_naive(&g, WindowFamily::All);
        for (a, b) in fast.values().iter().zip(naive.values()) {
            worst_rel = worst_rel.max((a - b).abs() / b.abs().max(f64::MIN_POSITIVE));
        }
        let third = maximal_shifted_dyadic(&g);
        for (a, b) in naive.values().iter().zip(third.values()) {
            if *b > 0.0 {
                worst_third = worst_third.max(a / b);
            }
        }
    }
    o.check("fast-equals-naive", worst_rel <= 1e-12, format!("worst relative gap {worst_rel:e}"));
    o.check("one-third-trick", worst_third <= 3.0, format!("worst M/M_shifted = {worst_third}"));

    let one = GridFunction::constant(unit, 10, 1.0)?;
    let est = op_norm_estimate(&one, 2.0, 100, s.seed)?;
    o.check("norm-estimate-at-least-one", est.lower_bound >= 1.0, format!("lower bound {}", est.lower_bound));
    o.detail("spike_maximal", mf.values());
    o.detail("spike_maximal_2", m2.values());
    o.detail("worst_relative_gap", worst_rel);
    o.detail("worst_shifted_ratio", worst_third);
    o.detail("norm_estimate", &est);
    let mut t = Table::new(&["cell", "f", "Mf", "M2f"]);
    for i in 0..8 {
        t.push(vec![i.to_string(), num(f.values()[i]), num(mf.values()[i]), num(m2.values()[i])]);
    }
    o.tables.push(("spike.csv".into(), t));
    o.plots.push(Plot {
        file: "spike.svg".into(),
        title: "spike and its maximal functions".into(),
        x_label: "cell".into(),
        log_x: false,
        log_y: false,
        series: [("f", &f), ("Mf", &mf), ("M2f", &m2)]
            .iter()
            .map(|(n, g)| Series {
                name: n.to_string(),
                points: g.values().iter().enumerate().map(|(i, v)| (i as f64, *v)).collect(),
            })
            .collect(),
    });
    Ok(o)
}

fn maxpower() -> ClosedForm {
    ClosedForm::abs_power(0.0, -0.25).max(ClosedForm::abs_power(0.0, -0.5))
}

fn global_maxmin() -> Result<ScenarioOutcome> {
    let cfg = MaxMinConfig::default();
    let mut o = ScenarioOutcome::new(
        "global-maxmin",
        &[8],
        json!({"radii": cfg.radii, "cell_width": cfg.cell_width, "fine_limit": cfg.fine_limit, "coarse_depth": cfg.coarse_depth, "p": 2.0}),
    );
    let rep = global_maxmin_pipeline(&cfg)?;
    o.check(
        "domination",
        rep.margins.iter().all(|m| *m >= 0.0),
        format!("min margin {}", rep.margins.iter().copied().fold(f64::INFINITY, f64::min)),
    );
    o.check("cellwise-inequality", rep.cellwise_ok, "");
    for (id, t) in [
        ("a1-w-plateau", &rep.a1_w),
        ("a1-u-plateau", &rep.a1_u),
        ("a2-v-plateau", &rep.a2_v),
        ("fu-plateau", &rep.fu_exact),
    ] {
        o.check(id, t.verdict == Verdict::Plateau, format!("{:?}, last = {:?}", t.verdict, t.last()));
    }
    let a1 = global_a1_test(&maxpower(), &GlobalA1Config::default())?;
    o.check("maxpower-in-MA1", a1.verdict == MembershipVerdict::CertifiedYes, verdict_name(a1.verdict));
    let refs =
        vec![("[w]_A1".to_string(), &rep.a1_w), ("[u]_A1".to_string(), &rep.a1_u), ("[v]_A2".to_string(), &rep.a2_v)];
    o.tables.push(("constants.csv".into(), Table::from_trends(&refs)));
    o.tables.push(("fu_integral.csv".into(), Table::from_trends(&[("int f*u".to_string(), &rep.fu_exact)])));
    o.plots.push(Plot {
        file: "constants.svg".into(),
        title: "max/min example: weight constants over [-R, R]".into(),
        x_label: "R".into(),
        log_x: true,
        log_y: false,
        series: refs.iter().map(|(n, t)| Series::from_trend(n.clone(), t)).collect(),
    });
    o.detail("pipeline", &rep);
    o.detail("global_a1", &a1);
    Ok(o)
}

fn global_power() -> Result<ScenarioOutcome> {
    let cfg = GlobalA1Config::default();
    let probe_radii = [1.0, 4.0, 64.0, 1024.0];
    let mut o = ScenarioOutcome::new(
        "global-power",
        &[9],
        json!({"s_ladder": cfg.s_ladder, "radii": cfg.radii, "probe_radii": probe_radii}),
    );
    let f = ClosedForm::abs_power(0.0, 0.5);
    let mut worst = 0.0f64;
    let mut t = Table::new(&["s", "r", "radial_average", "closed_form"]);
    for &s in &cfg.s_ladder {
        for r in probe_radii {
            let got = radial_average(&f, s, r)?;
            let want = r.powf(s / 2.0) / (s / 2.0 + 1.0);
            worst = worst.max((got / want - 1.0).abs());
            t.push(vec![num(s), num(r), num(got), num(want)]);
        }
    }
    o.check("radial-closed-form", worst <= 1e-6, format!("worst relative error {worst:e}"));
    let rep = global_a1_test(&f, &cfg)?;
    o.check("not-in-MA1", rep.verdict == MembershipVerdict::CertifiedNoAtScale, verdict_name(rep.verdict));
    let all_div = rep.evidence.iter().all(|e| match e {
        crate::majorant::Evidence::Trend { trend, .. } => trend.verdict == Verdict::Divergent,
        _ => true,
    });
    o.check("every-s-divergent", all_div, "");
    o.tables.push(("radial.csv".into(), t));
    o.plots.push(Plot {
        file: "radial.svg".into(),
        title: "sup-averages of |x|^(s/2) over [-r, r]".into(),
        x_label: "R".into(),
        log_x: true,
        log_y: true,
        series: rep
            .evidence
            .iter()
            .filter_map(|e| match e {
                crate::majorant::Evidence::Trend { label, trend } if label.starts_with("radial") => {
                    Some(Series::from_trend(label.clone(), trend))
                }
                _ => None,
            })
            .collect(),
    });
    o.detail("report", &rep);
    Ok(o)
}

fn weak_counterexample() -> Result<ScenarioOutcome> {
    let cfg = TrendConfig::default();
    let l1_radii = radius_ladder(3, 8);
    let mut o = ScenarioOutcome::new("weak-counterexample", &[8], json!({"l1_radii": l1_radii, "l1_depth": 8}));
    let rep = weak_lp_counterexample(&cfg)?;
    o.check("weak-l2-norm", rep.weak_ok, format!("{:?}", rep.weak_values));
    o.check("not-in-any-lp", rep.lp_all_divergent, "");
    o.check("maxpower-not-weak-lp", rep.maxpower_all_divergent, "");
    let l1 = l1_growth_check(&l1_radii, 8, &cfg)?;
    o.check(
        "ainfty-not-integrable",
        l1.all_fail_l1,
        format!("{:?}", l1.rows.iter().map(|r| r.min_ratio).collect::<Vec<_>>()),
    );
    let one = global_a1_test(&ClosedForm::constant(1.0), &GlobalA1Config::default())?;
    o.check("one-in-MA1", one.verdict == MembershipVerdict::CertifiedYes, verdict_name(one.verdict));
    let refs: Vec<(String, &crate::grid::TrendReport)> =
        rep.lp_trends.iter().map(|(p, t)| (format!("L^{p}"), t)).collect();
    o.tables.push(("lp_radius_trends.csv".into(), Table::from_trends(&refs)));
    let mut t = Table::new(&["fixture", "min_ratio", "grows"]);
    for r in &l1.rows {
        t.push(vec![r.id.clone(), num(r.min_ratio), r.grows.to_string()]);
    }
    o.tables.push(("l1_growth.csv".into(), t));
    o.plots.push(Plot {
        file: "maxpower_weak.svg".into(),
        title: "weak L^p quasinorms of max(|x|^-1/4, |x|^-1/2)".into(),
        x_label: "R".into(),
        log_x: true,
        log_y: true,
        series: rep.maxpower_weak.iter().map(|(p, t)| Series::from_trend(format!("p={p}"), t)).collect(),
    });
    o.detail("weak", &rep);
    o.detail("l1_growth", &l1);
    o.detail("constant_one", &one);
    Ok(o)
}

fn constant_one(s: &Settings) -> Result<ScenarioOutcome> {
    let depth = s.depth.clamp(3, 12);
    let mut o = ScenarioOutcome::new("constant-one", &[], json!({"depth": depth}));
    let unit = Interval::new(0.0, 1.0)?;
    let f = GridFunction::constant(unit, depth, 1.0)?;
    let w = Weight::constant(unit, depth, 1.0)?;
    for p in [1.0, 2.0, 3.0] {
        let c = ap_constant(&w, p, WindowFamily::All)?.constant;
        o.check(&format!("ap-{p}"), (c - 1.0).abs() < 1e-12, num(c));
    }
    let mf = maximal_fast(&f);
    o.check("maximal", mf.values().iter().all(|v| (v - 1.0).abs() < 1e-15), "");
    let cr = coifman_rochberg(&f, 0.5)?;
    let cr_a1 = ap_constant(&cr.w, 1.0, WindowFamily::All)?.constant;
    o.check("cr-certificate", cr.verify(&f).is_ok() && (cr_a1 - 1.0).abs() < 1e-12, num(cr_a1));
    let rdf = rubio_de_francia(&f, &RdfSpace::Weighted { p: 2.0, w }, 1.0, 20, 1e-5)?;
    let sum_ok = rdf.certificate.w.values().iter().all(|v| (v - 2.0).abs() < 1e-5);
    o.check("rdf-sum-two", sum_ok && rdf.contracts.all_ok(), format!("K = {}", rdf.k));
    let reports = classify_local(LocalSource::Grid(&f), unit, 2.0, &LocalConfig::default())?;
    o.check("classify-all-yes", reports.iter().all(|r| r.verdict == MembershipVerdict::CertifiedYes), "");
    o.detail("rdf_contracts", &rdf.contracts);
    o.detail("classification", &reports);
    Ok(o)
}

fn random_log_weight(rng: &mut ChaCha8Rng, terms: usize) -> CircleWeight {
    let mut coef = |k: usize| rng.gen_range(-0.5..0.5) / k as f64;
    let cos = (1..=terms).map(&mut coef).collect();
    let sin = (1..=terms).map(&mut coef).collect();
    CircleWeight::ExpTrig { cos, sin }
}

fn hardy_outer(s: &Settings) -> Result<ScenarioOutcome> {
    let mut o = ScenarioOutcome::new("hardy-outer", &[10], json!({"seed": s.seed, "random_weights": 50, "m": 12}));
    let w = CircleWeight::TwoMinusTwoCos.sample(12, Offset::Midpoint)?;
    let h = outer_from_weight(&w, 2.0)?;
    let mut worst = 0.0f64;
    for j in 0..w.n() {
        let want = (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, w.theta(j))).norm();
        worst = worst.max((h.boundary_modulus.values()[j] / want - 1.0).abs());
    }
    o.check("two-minus-two-cos-modulus", worst <= 1e-6, format!("worst relative error {worst:e}"));

    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let mut worst_gm = 0.0f64;
    let mut worst_inv = 0.0f64;
    let mut worst_mul = 0.0f64;
    for _ in 0..50 {
        let p0 = rng.gen_range(0.5..4.0);
        let w1 = random_log_weight(&mut rng, 8).sample(10, Offset::Grid)?;
        let w2 = random_log_weight(&mut rng, 8).sample(10, Offset::Grid)?;
        let h1 = outer_from_weight(&w1, p0)?;
        let gm = szego_test(&w1)?.log_mean.exp();
        worst_gm = worst_gm.max((h1.origin_value.norm().powf(p0) / gm - 1.0).abs());
        let again = crate::hardy::CircleGrid::new(
            Offset::Grid,
            h1.boundary_modulus.values().iter().map(|v| v.powf(p0)).collect(),
        )?;
        let h1b = outer_from_weight(&again, p0)?;
        for (a, b) in h1.boundary_modulus.values().iter().zip(h1b.boundary_modulus.values()) {
            worst_inv = worst_inv.max((a / b - 1.0).abs());
        }
        let prod = crate::hardy::CircleGrid::new(
            Offset::Grid,
            w1.values().iter().zip(w2.values()).map(|(a, b)| a * b).collect(),
        )?;
        let h2 = outer_from_weight(&w2, p0)?;
        let h12 = outer_from_weight(&prod, p0)?;
        for ((a, b), c) in
            h1.boundary_modulus.values().iter().zip(h2.boundary_modulus.values()).zip(h12.boundary_modulus.values())
        {
            worst_mul = worst_mul.max((a * b / c - 1.0).abs());
        }
    }
    o.check("geometric-mean-identity", worst_gm <= 1e-9, format!("{worst_gm:e}"));
    o.check("involution", worst_inv <= 1e-6, format!("{worst_inv:e}"));
    o.check("multiplicativity", worst_mul <= 1e-6, format!("{worst_mul:e}"));

    let ms = [6u32, 7, 8, 9, 10];
    let candidates: Vec<(String, CircleWeight)> = vec![
        ("|1-z|^-0.5".into(), CircleWeight::AbsOneMinusZ { a: -0.5 }),
        ("|1-z|^0.5".into(), CircleWeight::AbsOneMinusZ { a: 0.5 }),
        ("2-2cos".into(), CircleWeight::TwoMinusTwoCos),
        ("smooth".into(), random_log_weight(&mut rng, 4)),
    ];
    let mut t = Table::new(&["weight", "m", "A2", "log_mean", "in_szego"]);
    let mut szego_ok = true;
    let mut plateaus = 0;
    for (name, cw) in &candidates {
        let mut values = Vec::new();
        let mut last_szego = None;
        for &m in &ms {
            let ws = cw.sample(m, Offset::Midpoint)?;
            let c = circle_ap_constant(&ws, 2.0)?.constant;
            let sz = szego_test(&ws)?;
            t.push(vec![name.clone(), m.to_string(), num(c), num(sz.log_mean), sz.in_szego_class.to_string()]);
            values.push(Some(c));
            last_szego = Some(sz);
        }
        let trend = crate::grid::TrendReport::classify(
            ms.iter().map(|&m| f64::from(m)).collect(),
            values,
            &TrendConfig::default(),
        )?;
        if trend.verdict == Verdict::Plateau {
            plateaus += 1;
            szego_ok &= last_szego.is_some_and(|s| s.in_szego_class);
        }
    }
    o.check("ap-plateau-implies-szego", szego_ok && plateaus > 0, format!("{plateaus} plateau weights"));
    o.tables.push(("circle_weights.csv".into(), t));
    o.tables.push(("outer_two_minus_two_cos.csv".into(), {
        let mut t = Table::new(&["j", "theta", "modulus", "h_re", "h_im"]);
        for j in (0..h.boundary.n()).step_by(16) {
            let z = h.boundary.values()[j];
            t.push(vec![j.to_string(), num(w.theta(j)), num(h.boundary_modulus.values()[j]), num(z.re), num(z.im)]);
        }
        t
    }));
    o.plots.push(Plot {
        file: "outer_modulus.svg".into(),
        title: "|h| for w = 2 - 2cos(theta)".into(),
        x_label: "theta".into(),
        log_x: false,
        log_y: false,
        series: vec![Series {
            name: "|h|".into(),
            points: (0..h.boundary.n()).step_by(16).map(|j| (w.theta(j), h.boundary_modulus.values()[j])).collect(),
        }],
    });
    o.detail("origin_value_two_minus_two_cos", h.origin_value.re);
    o.detail("tail_energy_two_minus_two_cos", h.tail_energy);
    Ok(o)
}

fn hardy_membership(s: &Settings) -> Result<ScenarioOutcome> {
    let mut o = ScenarioOutcome::new("hardy-membership", &[10], json!({"seed": s.seed, "m": 12, "p0": 2.0}));
    let cases = [
        (
            "one",
            CircleFunction::Constant { c: 1.0 },
            CircleWeight::Constant { c: 1.0 },
            MembershipVerdict::CertifiedYes,
        ),
        (
            "singular-power",
            CircleFunction::OneMinusZ { a: -0.25 },
            CircleWeight::AbsOneMinusZ { a: 1.0 },
            MembershipVerdict::CertifiedYes,
        ),
        (
            "anti-analytic",
            CircleFunction::Monomial { k: -1 },
            CircleWeight::Constant { c: 1.0 },
            MembershipVerdict::CertifiedNoAtScale,
        ),
    ];
    let mut reports = Vec::new();
    for (id, f, w, want) in cases {
        let rep = weighted_hp_membership(&f, &w, 2.0, 12, 0.05)?;
        o.check(&format!("membership-{id}"), rep.verdict == want, verdict_name(rep.verdict));
        reports.push(rep);
    }
    let anti = analytic_defect(&CircleFunction::Monomial { k: -1 }.sample(12, Offset::Midpoint)?);
    o.check("anti-analytic-defect", anti > 0.99, num(anti));
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let coeffs = (0..6).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let d = analytic_defect(&CircleFunction::Polynomial { coeffs }.sample(12, Offset::Midpoint)?);
        worst = worst.max(d);
    }
    o.check("analytic-defect", worst < 1e-6, format!("{worst:e}"));
    let mut t = Table::new(&["fixture", "verdict"]);
    for r in &reports {
        t.push(vec![r.function_id.replace(',', ";"), verdict_name(r.verdict).into()]);
    }
    o.tables.push(("membership.csv".into(), t));
    o.detail("reports", &reports);
    o.detail("anti_analytic_defect", anti);
    o.detail("worst_polynomial_defect", worst);
    Ok(o)
}
