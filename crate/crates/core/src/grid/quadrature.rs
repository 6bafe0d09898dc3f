//! Adaptive Gauss–Kronrod quadrature with geometric refinement toward
//! endpoint singularities.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

pub const DEFAULT_REL_TOL: f64 = 1e-10;
const MAX_SEGMENTS: usize = 4000;
const MAX_GEOMETRIC_LEVELS: usize = 1000;

/// One 15-point Kronrod panel: (kronrod estimate, |kronrod - gauss|).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

#[derive(PartialEq)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Globally adaptive bisection on a smooth (or mildly kinked) integrand.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (v, e) = gk15(f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value: v, err: e });
    let mut total = v;
    let mut err = e;
    let mut segments = 1;
    while err > rel_tol * total.abs().max(f64::MIN_POSITIVE) && err > 1e-300 {
        if segments >= MAX_SEGMENTS {
            return Err(Error::QuadratureFailed { left: a, right: b });
        }
        let s = heap.pop().expect("non-empty heap");
        let m = 0.5 * (s.a + s.b);
        if m <= s.a || m >= s.b {
            // cannot bisect further in floating point
            heap.push(s);
            break;
        }
        let (v1, e1) = gk15(f, s.a, m);
        let (v2, e2) = gk15(f, m, s.b);
        total += v1 + v2 - s.value;
        err += e1 + e2 - s.err;
        heap.push(Segment { a: s.a, b: m, value: v1, err: e1 });
        heap.push(Segment { a: m, b: s.b, value: v2, err: e2 });
        segments += 1;
    }
    // re-sum to shed accumulated update error
    let total: f64 = heap.iter().map(|s| s.value).sum();
    if !total.is_finite() {
        return Err(Error::QuadratureFailed { left: a, right: b });
    }
    Ok(total)
}

/// Integrates over `[a, b]` where the integrand may blow up at `a`
/// (`singular_at_a`) and/or at `b`. Pieces shrink geometrically toward the
/// singular end until their contribution is negligible.
pub fn integrate_singular<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    singular_at_a: bool,
    singular_at_b: bool,
    rel_tol: f64,
) -> Result<f64> {
    match (singular_at_a, singular_at_b) {
        (false, false) => integrate(f, a, b, rel_tol),
        (true, true) => {
            let m = 0.5 * (a + b);
            Ok(integrate_singular(f, a, m, true, false, rel_tol)? + integrate_singular(f, m, b, false, true, rel_tol)?)
        }
        (true, false) => geometric(f, a, b, rel_tol, resolution(a)),
        (false, true) => {
            let g = |t: f64| f(a + b - t);
            geometric(&g, a, b, rel_tol, resolution(b))
        }
    }
}

/// Distance to `x` below which `t - x` loses too many digits to be trusted;
/// the remaining tail is extrapolated from there.
fn resolution(x: f64) -> f64 {
    1e7 * f64::EPSILON * x.abs()
}

fn geometric<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64, resolution: f64) -> Result<f64> {
    let len = b - a;
    let mut hi = b;
    let mut total = 0.0;
    let mut small_streak = 0;
    let mut last: Option<(f64, f64)> = None;
    for _ in 0..MAX_GEOMETRIC_LEVELS {
        let lo = a + 0.5 * (hi - a);
        if lo <= a || lo >= hi || hi - a < resolution {
            return tail_extrapolate(total, last, a, b);
        }
        let piece = match integrate(f, lo, hi, rel_tol) {
            Ok(v) => v,
            Err(_) if hi - a < 1e-6 * len => return tail_extrapolate(total, last, a, b),
            Err(e) => return Err(e),
        };
        total += piece;
        if piece.abs() <= 0.1 * rel_tol * total.abs() {
            small_streak += 1;
            if small_streak >= 3 {
                return Ok(total);
            }
        } else {
            small_streak = 0;
        }
        last = Some((last.map_or(f64::NAN, |l| l.1), piece));
        hi = lo;
        if (hi - a) < len * 1e-300 {
            break;
        }
    }
    tail_extrapolate(total, last, a, b)
}

/// Adds the geometric tail `piece·r/(1−r)` implied by the ratio of the last
/// two halving pieces, when they shrink.
fn tail_extrapolate(total: f64, last: Option<(f64, f64)>, a: f64, b: f64) -> Result<f64> {
    match last {
        Some((prev, piece)) if prev.is_finite() && prev != 0.0 => {
            let r = piece / prev;
            if r > 0.0 && r < 0.99 {
                Ok(total + piece * r / (1.0 - r))
            } else {
                Err(Error::QuadratureFailed { left: a, right: b })
            }
        }
        _ => Err(Error::QuadratureFailed { left: a, right: b }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(&|x: f64| x * x * x - 2.0 * x, 0.0, 2.0, 1e-12).unwrap();
        assert!((v - 0.0).abs() < 1e-12);
        let v = integrate(&|x: f64| x.powi(6), -1.0, 1.0, 1e-12).unwrap();
        assert!((v - 2.0 / 7.0).abs() < 1e-14);
    }

    #[test]
    fn sqrt_singularity() {
        let v = integrate_singular(&|x: f64| x.powf(-0.5), 0.0, 1.0, true, false, 1e-10).unwrap();
        assert!((v - 2.0).abs() < 1e-8, "{v}");
        let v = integrate_singular(&|x: f64| (1.0 - x).powf(-0.5), 0.0, 1.0, false, true, 1e-10).unwrap();
        assert!((v - 2.0).abs() < 1e-8, "{v}");
    }

    #[test]
    fn log_power_singularity() {
        // ∫_0^{1/2} x^{-1/2} |log x| dx = sqrt(2) (2 + log 2)
        let f = |x: f64| x.powf(-0.5) * x.ln().abs();
        let v = integrate_singular(&f, 0.0, 0.5, true, false, 1e-11).unwrap();
        let exact = 2f64.sqrt() * (2.0 + 2f64.ln());
        assert!((v - exact).abs() < 1e-8 * exact, "{v} vs {exact}");
    }
}
