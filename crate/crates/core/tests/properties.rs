//! Property tests for the structural laws each module promises.

use proptest::prelude::*;

use weightlab::grid::{sample, ClosedForm, GridFunction, Interval};
use weightlab::hardy::{outer_from_weight, szego_test, CircleGrid, Offset};
use weightlab::majorant::{coifman_rochberg, weighted_membership_from_majorant, CHECK_TOL};
use weightlab::maximal::{maximal_fast, maximal_naive, maximal_shifted_dyadic};
use weightlab::weights::{ap_constant, combine_max, combine_min, conjugate, dual_weight, factor_product, power_weight};
use weightlab::{Weight, WindowFamily};

fn le(a: f64, b: f64) -> bool {
    a <= b + CHECK_TOL * b.abs().max(a.abs())
}

/// Cell averages of combinators come from adaptive quadrature (relative
/// tolerance 1e-10) while single atoms use antiderivatives.
const QUAD_SLACK: f64 = 1e-9;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn grid_of(values: Vec<f64>) -> GridFunction {
    GridFunction::from_values(Interval::new(-1.0, 3.0).unwrap(), values).unwrap()
}

/// Grids of 2^1..2^7 cells with signed values.
fn signed_grid() -> impl Strategy<Value = GridFunction> {
    (1u32..=7).prop_flat_map(|k| prop::collection::vec(-10.0..10.0f64, 1usize << k)).prop_map(grid_of)
}

/// Positive grids spanning a few orders of magnitude.
fn weight() -> impl Strategy<Value = Weight> {
    (1u32..=6)
        .prop_flat_map(|k| prop::collection::vec(-3.0..3.0f64, 1usize << k))
        .prop_map(|logs| Weight::new(grid_of(logs.into_iter().map(f64::exp).collect())).unwrap())
}

fn grid_pair() -> impl Strategy<Value = (GridFunction, GridFunction)> {
    (1u32..=7)
        .prop_flat_map(|k| {
            let n = 1usize << k;
            (prop::collection::vec(-10.0..10.0f64, n), prop::collection::vec(-10.0..10.0f64, n))
        })
        .prop_map(|(a, b)| (grid_of(a), grid_of(b)))
}

fn exponent() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.0), Just(4.0 / 3.0), Just(2.0), Just(3.0), 1.0..6.0f64]
}

/// An A_1 weight built the Coifman–Rochberg way from a random function.
fn a1_weight(f: &GridFunction) -> Weight {
    coifman_rochberg(f, 0.5).unwrap().w
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn refinement_is_exact((f, g) in grid_pair(), p in exponent()) {
        let r = f.refine();
        prop_assert!((r.integral() - f.integral()).abs() <= 1e-12 * f.lp_norm(1.0).max(1.0));
        prop_assert!(close(r.lp_norm(p), f.lp_norm(p), 1e-12));
        prop_assert!(close(r.weak_lp_quasinorm(p), f.weak_lp_quasinorm(p), 1e-12));
        let w = g.map(f64::exp).unwrap();
        let lhs = r.weighted_lp_norm(&w.refine(), p).unwrap();
        prop_assert!(close(lhs, f.weighted_lp_norm(&w, p).unwrap(), 1e-12));
    }

    #[test]
    fn holder_inequality((f, g) in grid_pair(), p in 1.05..8.0f64) {
        let fg = f.zip(&g, |a, b| (a * b).abs()).unwrap();
        prop_assert!(le(fg.integral(), f.lp_norm(p) * g.lp_norm(conjugate(p))));
    }

    #[test]
    fn weak_norm_below_strong(f in signed_grid(), p in exponent()) {
        prop_assert!(le(f.weak_lp_quasinorm(p), f.lp_norm(p)));
    }

    #[test]
    fn sampling_is_monotone(a in -0.9..2.0f64, b in -0.9..2.0f64, x0 in -1.0..1.0f64, c in 0.0..3.0f64, k in 2u32..8) {
        let q = Interval::new(-1.0, 1.0).unwrap();
        let lo = ClosedForm::abs_power(x0, a);
        let hi = lo.clone().max(ClosedForm::abs_power(0.0, b)).max(ClosedForm::constant(c));
        let (s1, s2) = (sample(&lo, q, k).unwrap(), sample(&hi, q, k).unwrap());
        for (u, v) in s1.values().iter().zip(s2.values()) {
            prop_assert!(*u <= *v * (1.0 + QUAD_SLACK), "{} > {}", u, v);
        }
    }

    #[test]
    fn maximal_dominates_and_orders_families(f in signed_grid()) {
        let all = maximal_naive(&f, WindowFamily::All);
        let dy = maximal_naive(&f, WindowFamily::Dyadic);
        let shifted = maximal_shifted_dyadic(&f);
        for i in 0..f.n() {
            prop_assert!(all.values()[i] >= f.values()[i].abs());
            prop_assert!(dy.values()[i] <= all.values()[i]);
            prop_assert!(le(all.values()[i], 3.0 * shifted.values()[i]));
        }
    }

    #[test]
    fn fast_matches_naive(f in signed_grid()) {
        let a = maximal_fast(&f);
        let b = maximal_naive(&f, WindowFamily::All);
        for (x, y) in a.values().iter().zip(b.values()) {
            prop_assert!(close(*x, *y, 1e-12) || x == y);
        }
    }

    #[test]
    fn maximal_is_sublinear((f, g) in grid_pair()) {
        let s = maximal_fast(&f.zip(&g, |a, b| a + b).unwrap());
        let (mf, mg) = (maximal_fast(&f), maximal_fast(&g));
        for i in 0..f.n() {
            prop_assert!(le(s.values()[i], mf.values()[i] + mg.values()[i]));
        }
    }

    #[test]
    fn maximal_scales(f in signed_grid(), e in -20i32..20, c in -50.0..50.0f64) {
        let two = 2f64.powi(e);
        let scaled = maximal_fast(&f.map(|v| -two * v).unwrap());
        let base = maximal_fast(&f);
        for (a, b) in scaled.values().iter().zip(base.values()) {
            prop_assert_eq!(*a, two * b);
        }
        let scaled = maximal_fast(&f.map(|v| c * v).unwrap());
        for (a, b) in scaled.values().iter().zip(base.values()) {
            prop_assert!(close(*a, c.abs() * b, 1e-12) || (*a == 0.0 && *b == 0.0));
        }
    }

    #[test]
    fn ap_constant_at_least_one_and_monotone(w in weight(), p in 1.0..4.0f64, dq in 0.0..3.0f64, dyadic in any::<bool>()) {
        let fam = if dyadic { WindowFamily::Dyadic } else { WindowFamily::All };
        let cp = ap_constant(&w, p, fam).unwrap().constant;
        let cq = ap_constant(&w, p + dq, fam).unwrap().constant;
        prop_assert!(cp >= 1.0 - CHECK_TOL);
        prop_assert!(le(cq, cp));
    }

    #[test]
    fn duality_identity(w in weight(), p in prop_oneof![Just(4.0 / 3.0), Just(2.0), Just(3.0), 1.1..5.0f64]) {
        let pp = conjugate(p);
        let lhs = ap_constant(&dual_weight(&w, p).unwrap(), pp, WindowFamily::All).unwrap().constant;
        let rhs = ap_constant(&w, p, WindowFamily::All).unwrap().constant.powf(pp - 1.0);
        prop_assert!(close(lhs, rhs, 1e-9), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn ap_is_scale_invariant(w in weight(), p in exponent(), c in 1e-3..1e3f64) {
        let cw = Weight::new(w.grid().map(|v| c * v).unwrap()).unwrap();
        let a = ap_constant(&w, p, WindowFamily::All).unwrap().constant;
        let b = ap_constant(&cw, p, WindowFamily::All).unwrap().constant;
        prop_assert!(close(a, b, 1e-12));
    }

    #[test]
    fn powers_contract_ap(w in weight(), s in 0.01..=1.0f64, p in exponent()) {
        let ws = ap_constant(&power_weight(&w, s).unwrap(), p, WindowFamily::All).unwrap().constant;
        let c = ap_constant(&w, p, WindowFamily::All).unwrap().constant;
        prop_assert!(le(ws, c.powf(s)));
    }

    #[test]
    fn a1_pair_algebra((f, g) in grid_pair(), p in 1.0..4.0f64) {
        let (u, v) = (a1_weight(&f), a1_weight(&g));
        let cu = ap_constant(&u, 1.0, WindowFamily::All).unwrap().constant;
        let cv = ap_constant(&v, 1.0, WindowFamily::All).unwrap().constant;
        let prod = ap_constant(&factor_product(&u, &v, p).unwrap(), p, WindowFamily::All).unwrap().constant;
        prop_assert!(le(prod, cu * cv.powf(p - 1.0)));
        let mx = ap_constant(&combine_max(&u, &v).unwrap(), 1.0, WindowFamily::All).unwrap().constant;
        let mn = ap_constant(&combine_min(&u, &v).unwrap(), 1.0, WindowFamily::All).unwrap().constant;
        prop_assert!(le(mx, 2.0 * cu.max(cv)));
        prop_assert!(le(mn, cu.max(cv)));
    }

    #[test]
    fn certificates_verify_and_nest(f in signed_grid(), delta in 0.05..0.95f64, p in 1.0..5.0f64) {
        prop_assume!(f.values().iter().any(|v| *v != 0.0));
        let cert = coifman_rochberg(&f, delta).unwrap();
        prop_assert!(cert.verify(&f).is_ok());
        prop_assert!(cert.domination_margin >= 0.0);
        let a1 = ap_constant(&cert.w, 1.0, WindowFamily::All).unwrap().constant;
        let ap = ap_constant(&cert.w, p, WindowFamily::All).unwrap().constant;
        prop_assert!(le(ap, a1));
    }

    #[test]
    fn weighted_bound_is_forced(f in signed_grid(), p0 in 1.1..4.0f64) {
        prop_assume!(f.values().iter().any(|v| *v != 0.0));
        let cert = coifman_rochberg(&f, 0.5).unwrap();
        let wit = weighted_membership_from_majorant(&f, &cert, p0).unwrap();
        prop_assert!(wit.bound_ok);
        prop_assert!(le(wit.lhs, wit.rhs));
    }

    #[test]
    fn jensen_link_for_squares(f in signed_grid()) {
        let mf = maximal_fast(&f);
        let mf2 = maximal_fast(&f.map(|v| v * v).unwrap());
        for (a, b) in mf.values().iter().zip(mf2.values()) {
            prop_assert!(le(a * a, *b));
        }
    }
}

fn smooth_log_weight(m: u32, cos: &[f64], sin: &[f64]) -> CircleGrid<f64> {
    weightlab::hardy::CircleWeight::ExpTrig { cos: cos.to_vec(), sin: sin.to_vec() }.sample(m, Offset::Grid).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn outer_geometric_mean_and_multiplicativity(
        a in prop::collection::vec(-0.3..0.3f64, 1..6),
        b in prop::collection::vec(-0.3..0.3f64, 1..6),
        c in prop::collection::vec(-0.3..0.3f64, 1..6),
        p0 in 0.5..4.0f64,
    ) {
        let w1 = smooth_log_weight(9, &a, &b);
        let w2 = smooth_log_weight(9, &c, &a);
        let h1 = outer_from_weight(&w1, p0).unwrap();
        let gm = szego_test(&w1).unwrap().log_mean.exp();
        prop_assert!(close(h1.origin_value.norm().powf(p0), gm, 1e-9));
        let h2 = outer_from_weight(&w2, p0).unwrap();
        let prod = CircleGrid::new(Offset::Grid, w1.values().iter().zip(w2.values()).map(|(x, y)| x * y).collect()).unwrap();
        let h12 = outer_from_weight(&prod, p0).unwrap();
        for j in 0..prod.n() {
            let lhs = h1.boundary_modulus.values()[j] * h2.boundary_modulus.values()[j];
            prop_assert!(close(lhs, h12.boundary_modulus.values()[j], 1e-6));
        }
    }
}
