//! Adaptive Simpson quadrature by interval halving.

/// Default absolute tolerance for [`adaptive_simpson`].
pub const DEFAULT_QUAD_TOLERANCE: f64 = 1e-10;

const MAX_DEPTH: u32 = 60;

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
///
/// `f` must be smooth on the open interval; callers split at known kinks.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    refine(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

/// Integrates piecewise, splitting `[a, b]` at every point of `breaks` inside it.
pub fn adaptive_simpson_split<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: f64,
) -> f64 {
    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&p| p > a && p < b).collect();
    cuts.sort_by(f64::total_cmp);
    let mut total = 0.0;
    let mut lo = a;
    let pieces = cuts.len() + 1;
    for hi in cuts.into_iter().chain(std::iter::once(b)) {
        // One-sided limits at the cut: nudge the endpoint evaluations inward.
        let g = |t: f64| {
            let t = if t == lo {
                lo + (hi - lo) * 1e-15
            } else if t == hi {
                hi - (hi - lo) * 1e-15
            } else {
                t
            };
            f(t)
        };
        total += adaptive_simpson(&g, lo, hi, tol / pieces as f64);
        lo = hi;
    }
    total
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}
