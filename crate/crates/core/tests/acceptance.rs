//! Acceptance criteria 1-11, one PASS/FAIL line each.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use weightlab::cli::config::Settings;
use weightlab::cli::scenarios::{run_scenario, ScenarioOutcome};
use weightlab::grid::{depth_ladder, sample, ClosedForm, GridFunction, Interval, TrendConfig, TrendReport, Verdict};
use weightlab::majorant::{coifman_rochberg, rubio_de_francia_auto, RdfSpace};
use weightlab::maximal::{maximal_fast, maximal_naive, op_norm_estimate};
use weightlab::weights::{
    ap_constant, ap_refinement_trend, combine_max, combine_min, conjugate, dual_weight, factor_product, power_weight,
};
use weightlab::{Weight, WindowFamily};

const SEED: u64 = 20240611;
const SLACK: f64 = 1e-12;

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, Box<dyn Fn() -> Outcome>);

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn random_grid(rng: &mut ChaCha8Rng, depth: u32, signed: bool) -> GridFunction {
    let n = 1usize << depth;
    let values = (0..n)
        .map(|_| {
            let v = rng.gen_range(-4.0..4.0f64).exp();
            if signed && rng.gen_bool(0.5) {
                -v
            } else {
                v
            }
        })
        .collect();
    GridFunction::new(Interval::new(0.0, 1.0).unwrap(), depth, values).unwrap()
}

fn random_weight(rng: &mut ChaCha8Rng, depth: u32) -> Weight {
    Weight::new(random_grid(rng, depth, false)).unwrap()
}

fn scenario(name: &str, ids: &[&str]) -> Outcome {
    let o: ScenarioOutcome = run_scenario(name, &Settings::default()).map_err(|e| format!("{name}: {e}"))?;
    let failed: Vec<String> = o
        .checks
        .iter()
        .filter(|c| (ids.is_empty() || ids.contains(&c.id.as_str())) && !c.passed)
        .map(|c| format!("{} ({})", c.id, c.detail))
        .collect();
    if failed.is_empty() {
        Ok(format!("{name}: {} checks", o.checks.len()))
    } else {
        Err(failed.join("; "))
    }
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    for i in 0..200 {
        let f = random_grid(&mut rng, 1 + i % 10, true);
        let (a, b) = (maximal_fast(&f), maximal_naive(&f, WindowFamily::All));
        for (x, y) in a.values().iter().zip(b.values()) {
            worst = worst.max(rel(*x, *y));
        }
    }
    let big = random_grid(&mut rng, 16, true);
    let t = Instant::now();
    let _ = maximal_fast(&big);
    let elapsed = t.elapsed();
    if worst <= 1e-12 && elapsed < Duration::from_secs(5) {
        Ok(format!("worst gap {worst:e}, N=2^16 in {:.3}s", elapsed.as_secs_f64()))
    } else {
        Err(format!("worst gap {worst:e}, N=2^16 in {:.3}s", elapsed.as_secs_f64()))
    }
}

fn duality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let w = random_weight(&mut rng, 3 + i % 6);
        for p in [4.0 / 3.0, 2.0, 3.0] {
            let pp = conjugate(p);
            for fam in [WindowFamily::All, WindowFamily::Dyadic] {
                let lhs = ap_constant(&dual_weight(&w, p).unwrap(), pp, fam).unwrap().constant;
                let rhs = ap_constant(&w, p, fam).unwrap().constant.powf(pp - 1.0);
                worst = worst.max(rel(lhs, rhs));
            }
        }
    }
    if worst <= 1e-9 {
        Ok(format!("worst relative gap {worst:e}"))
    } else {
        Err(format!("worst relative gap {worst:e}"))
    }
}

fn power_weights() -> Outcome {
    let domain = Interval::new(-1.0, 1.0).unwrap();
    let depths = depth_ladder(8, 14);
    let mut lines = Vec::new();
    let mut ok = true;
    for (alpha, want) in
        [(-0.5, Verdict::Plateau), (0.5, Verdict::Plateau), (-1.0, Verdict::Divergent), (1.0, Verdict::Divergent)]
    {
        let t = ap_refinement_trend(
            &ClosedForm::abs_power(0.0, alpha),
            domain,
            2.0,
            WindowFamily::All,
            &depths,
            &TrendConfig::default(),
        )
        .map_err(|e| e.to_string())?;
        ok &= t.verdict == want;
        lines.push(format!("alpha={alpha}: {:?}", t.verdict));
    }
    if ok {
        Ok(lines.join(", "))
    } else {
        Err(lines.join(", "))
    }
}

fn weight_algebra() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
    let mut violations = Vec::new();
    let le = |a: f64, b: f64| a <= b * (1.0 + SLACK);
    for i in 0..200 {
        let depth = 2 + i % 7;
        let u = coifman_rochberg(&random_grid(&mut rng, depth, true), 0.5).unwrap().w;
        let v = coifman_rochberg(&random_grid(&mut rng, depth, true), 0.5).unwrap().w;
        let s = rng.gen_range(0.0..1.0f64).max(1e-3);
        let p = rng.gen_range(1.0..5.0f64);
        let a1 = |w: &Weight| ap_constant(w, 1.0, WindowFamily::All).unwrap().constant;
        let ap = |w: &Weight, p: f64| ap_constant(w, p, WindowFamily::All).unwrap().constant;
        let (cu, cv) = (a1(&u), a1(&v));
        if !le(ap(&power_weight(&u, s).unwrap(), p), ap(&u, p).powf(s)) {
            violations.push(format!("power #{i}"));
        }
        if !le(ap(&factor_product(&u, &v, p).unwrap(), p), cu * cv.powf(p - 1.0)) {
            violations.push(format!("factor #{i}"));
        }
        if !le(a1(&combine_max(&u, &v).unwrap()), 2.0 * cu.max(cv)) {
            violations.push(format!("max #{i}"));
        }
        if !le(a1(&combine_min(&u, &v).unwrap()), cu.max(cv)) {
            violations.push(format!("min #{i}"));
        }
    }
    if violations.is_empty() {
        Ok("200 pairs, 0 violations".into())
    } else {
        Err(violations.join(", "))
    }
}

/// Random closed forms with finite grid maxima: a max of a few power atoms
/// with exponents above -1 and a positive floor.
fn random_closed_form(rng: &mut ChaCha8Rng) -> ClosedForm {
    let mut cf = ClosedForm::constant(rng.gen_range(0.05..1.0));
    for _ in 0..rng.gen_range(1..4) {
        let atom =
            ClosedForm::power_log(rng.gen_range(0.2..3.0), rng.gen_range(-1.0..1.0), rng.gen_range(-0.9..2.0), 0.0);
        cf = cf.max(atom);
    }
    cf
}

fn coifman_rochberg_plateau() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 5);
    let domain = Interval::new(-1.0, 1.0).unwrap();
    let depths = depth_ladder(8, 12);
    let mut bad = Vec::new();
    let mut worst_var = 0.0f64;
    for i in 0..50 {
        let cf = random_closed_form(&mut rng);
        let values = depths
            .iter()
            .map(|&k| {
                let f = sample(&cf, domain, k as u32).ok()?;
                let w = coifman_rochberg(&f, 0.5).ok()?.w;
                Some(ap_constant(&w, 1.0, WindowFamily::All).ok()?.constant)
            })
            .collect::<Vec<_>>();
        let t = TrendReport::classify(depths.clone(), values.clone(), &TrendConfig::default())
            .map_err(|e| e.to_string())?;
        let last: Vec<f64> = values.iter().rev().take(3).flatten().copied().collect();
        let var = if last.len() == 3 {
            let (lo, hi) = last.iter().fold((f64::INFINITY, 0.0f64), |(l, h), v| (l.min(*v), h.max(*v)));
            (hi - lo) / lo
        } else {
            f64::INFINITY
        };
        worst_var = worst_var.max(var);
        if t.verdict != Verdict::Plateau || var >= 0.1 {
            bad.push(format!("#{i} {:?} var={var:.3}", t.verdict));
        }
    }
    if bad.is_empty() {
        Ok(format!("50 functions, worst last-3 variation {:.2}%", 100.0 * worst_var))
    } else {
        Err(bad.join(", "))
    }
}

fn rubio_de_francia_contracts() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 6);
    let domain = Interval::new(-1.0, 1.0).unwrap();
    let depth = 10;
    let (mut conclusive, mut broken) = (0, Vec::new());
    for i in 0..50 {
        let p = rng.gen_range(1.5..3.0f64);
        let alpha = rng.gen_range(-0.4..0.4f64);
        let x0 = rng.gen_range(-0.5..0.5f64);
        let cf = ClosedForm::abs_power(x0, alpha);
        let trend =
            ap_refinement_trend(&cf, domain, p, WindowFamily::All, &depth_ladder(6, 10), &TrendConfig::default())
                .map_err(|e| e.to_string())?;
        if trend.verdict != Verdict::Plateau {
            broken.push(format!("#{i} weight has no A_p plateau"));
            continue;
        }
        let w = Weight::from_closed_form(&cf, domain, depth).map_err(|e| e.to_string())?;
        let f = random_grid(&mut rng, depth, true);
        let f = GridFunction::new(domain, depth, f.into_values()).unwrap();
        let b = op_norm_estimate(w.grid(), p, 20, SEED + i as u64).map_err(|e| e.to_string())?.bound;
        match rubio_de_francia_auto(&f, &RdfSpace::Weighted { p, w }, b, 8, 0.05) {
            Ok(out) if out.contracts.all_ok() && out.k <= 64 => conclusive += 1,
            Ok(out) => broken.push(format!("#{i} contracts {:?}", out.contracts)),
            Err(_) => {}
        }
    }
    if broken.is_empty() && conclusive >= 45 {
        Ok(format!("{conclusive}/50 conclusive, 0 contract violations"))
    } else {
        Err(format!("{conclusive}/50 conclusive; {}", broken.join(", ")))
    }
}

fn refinement_and_scaling() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 11);
    let mut violations = Vec::new();
    for i in 0..500 {
        let depth = 1 + i % 10;
        let f = random_grid(&mut rng, depth as u32, true);
        let w = random_grid(&mut rng, depth as u32, false);
        let p = [1.0, 1.5, 2.0, 3.0][i % 4];
        let r = f.refine();
        let checks = [
            (r.integral() - f.integral()).abs() <= SLACK * f.lp_norm(1.0),
            rel(r.lp_norm(p), f.lp_norm(p)) <= SLACK,
            rel(r.weighted_lp_norm(&w.refine(), p).unwrap(), f.weighted_lp_norm(&w, p).unwrap()) <= SLACK,
            rel(r.weak_lp_quasinorm(p), f.weak_lp_quasinorm(p)) <= SLACK,
        ];
        if checks.iter().any(|ok| !ok) {
            violations.push(format!("refine #{i}"));
        }
        let base = maximal_fast(&f);
        let two = 2f64.powi(rng.gen_range(-30..30));
        let c = rng.gen_range(-100.0..100.0f64);
        let exact = maximal_fast(&f.map(|v| -two * v).unwrap());
        let scaled = maximal_fast(&f.map(|v| c * v).unwrap());
        let exact_ok = exact.values().iter().zip(base.values()).all(|(a, b)| *a == two * b);
        let scaled_ok = scaled.values().iter().zip(base.values()).all(|(a, b)| rel(*a, c.abs() * b) <= SLACK);
        if !(exact_ok && scaled_ok) {
            violations.push(format!("scale #{i}"));
        }
    }
    if violations.is_empty() {
        Ok("500 cases, 0 violations".into())
    } else {
        Err(violations.join(", "))
    }
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        (1, "maximal oracle equivalence and speed", Box::new(oracle_equivalence)),
        (2, "A_p duality identity", Box::new(duality)),
        (3, "power weights", Box::new(power_weights)),
        (4, "weight algebra inequalities", Box::new(weight_algebra)),
        (5, "Coifman-Rochberg plateau", Box::new(coifman_rochberg_plateau)),
        (6, "Rubio de Francia contracts", Box::new(rubio_de_francia_contracts)),
        (7, "example1 consistency", Box::new(|| scenario("example1", &[]))),
        (
            8,
            "global strict-inclusion witnesses",
            Box::new(|| {
                let a = scenario("weak-counterexample", &[])?;
                let b = scenario("global-maxmin", &[])?;
                Ok(format!("{a}; {b}"))
            }),
        ),
        (9, "global power example", Box::new(|| scenario("global-power", &[]))),
        (
            10,
            "Hardy suite",
            Box::new(|| {
                let a = scenario("hardy-outer", &[])?;
                let b = scenario("hardy-membership", &[])?;
                Ok(format!("{a}; {b}"))
            }),
        ),
        (11, "refinement exactness and scaling", Box::new(refinement_and_scaling)),
    ];
    let mut failed = 0;
    for (id, name, run) in criteria {
        let t = Instant::now();
        let outcome = run();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("PASS {id:>2} {name} [{secs:.1}s]: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL {id:>2} {name} [{secs:.1}s]: {msg}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
