//! One-dimensional minimization and inversion primitives.
//!
//! Golden-section search only needs unimodality, which is what the convex
//! inner problems of the transformation solvers provide; brackets for
//! unconstrained inner problems are grown geometrically until a secant
//! slope change proves the minimum is interior.

use crate::error::{HcbError, Result};
use crate::num::Real;

const INV_GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Golden-section minimum of `f` on [lo, hi]. Returns (argmin, min).
pub fn golden_min<R: Real>(f: impl Fn(R) -> R, lo: R, hi: R, iters: usize) -> (R, R) {
    let ratio = R::of(INV_GOLDEN);
    let (mut a, mut b) = (lo, hi);
    if a > b {
        std::mem::swap(&mut a, &mut b);
    }
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = f(x2);
        }
        if b - a <= R::epsilon() * (a.abs() + b.abs() + R::one()) {
            break;
        }
    }
    let xm = (a + b) * R::half();
    let fm = f(xm);
    if fm <= f1 && fm <= f2 {
        (xm, fm)
    } else if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Dense grid scan followed by golden-section refinement around the argmin.
/// Sound whenever `f` is unimodal; for multimodal `f` the grid resolution
/// is the caller's accuracy contract.
pub fn grid_then_golden<R: Real>(
    f: impl Fn(R) -> R,
    lo: R,
    hi: R,
    grid: usize,
    iters: usize,
) -> (R, R) {
    debug_assert!(grid >= 2);
    if !(hi > lo) {
        let v = f(lo);
        return (lo, v);
    }
    let step = (hi - lo) / R::of(grid as f64);
    let mut best_i = 0usize;
    let mut best = f(lo);
    for i in 1..=grid {
        let x = lo + step * R::of(i as f64);
        let v = f(x);
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let a = if best_i == 0 { lo } else { lo + step * R::of((best_i - 1) as f64) };
    let b = if best_i == grid { hi } else { lo + step * R::of((best_i + 1) as f64) };
    let (x, v) = golden_min(&f, a, b, iters);
    if v <= best {
        (x, v)
    } else {
        (lo + step * R::of(best_i as f64), best)
    }
}

/// Expand a symmetric bracket around `center` by doubling until the
/// three-point pattern f(lo) > f(mid) < f(hi) certifies an interior
/// minimum, then golden-refine. The doubling is capped at 2^40 times the
/// initial half-width.
pub fn expanding_golden_min<R: Real>(
    f: impl Fn(R) -> R,
    center: R,
    init_half_width: R,
    iters: usize,
) -> Result<(R, R)> {
    let mut w = init_half_width;
    let fc = f(center);
    for _ in 0..=40 {
        let (lo, hi) = (center - w, center + w);
        let (flo, fhi) = (f(lo), f(hi));
        if flo >= fc && fhi >= fc {
            let (x, v) = golden_min(&f, lo, hi, iters);
            return Ok((x, v.min(fc)));
        }
        w = w + w;
    }
    Err(HcbError::BracketExpansionFailed {
        lo: (center - w).to_f64().unwrap_or(f64::NEG_INFINITY),
        hi: (center + w).to_f64().unwrap_or(f64::INFINITY),
    })
}

/// Invert a nondecreasing function by bisection: returns x in [lo, hi]
/// with f(x) ~= target. 80 iterations halve the interval to ~1e-24 of its
/// original width, beyond double-precision resolution on [0, 1].
pub fn bisect_nondecreasing<R: Real>(
    f: impl Fn(R) -> R,
    target: R,
    lo: R,
    hi: R,
    iters: usize,
) -> R {
    let (mut a, mut b) = (lo, hi);
    if f(a) >= target {
        return a;
    }
    if f(b) <= target {
        return b;
    }
    for _ in 0..iters {
        let m = (a + b) * R::half();
        if f(m) < target {
            a = m;
        } else {
            b = m;
        }
    }
    (a + b) * R::half()
}
