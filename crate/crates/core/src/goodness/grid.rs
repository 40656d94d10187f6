use rayon::prelude::*;
use serde::Serialize;

use super::{GoodnessParams, WeightDomain};
use crate::cost::CostSpec;
use crate::error::{input, Result};
use crate::numeric::{Scalar, DEFAULT_TOLERANCE};

pub const DEFAULT_GRID_DENSITY: usize = 512;

/// Relative margin a later grid point must beat to replace the current worst.
const TIE_MARGIN: f64 = 1e-12;

const DOMAIN_CONVENTION: &str = "x in {0} u [w_min, W], w in [w_min, w_max], x + w <= W";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    Good1Lower,
    Good1Upper,
    Good2Lower,
    Good2Upper,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub x: f64,
    /// Absent for the load-only condition.
    pub w: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridInfo {
    pub density: usize,
    pub x_points: usize,
    pub w_points: usize,
    pub pairs: usize,
    pub convention: &'static str,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GoodnessReport {
    pub satisfied: bool,
    /// Largest signed violation, normalized by the cost at the compared load.
    pub worst_violation: f64,
    pub witness: Witness,
    pub condition: Condition,
    pub used_shortcut: bool,
    pub tolerance: f64,
    pub grid: GridInfo,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GoodnessFit {
    pub params: GoodnessParams<f64>,
    /// Grid points skipped because the normalizing cost was zero.
    pub excluded: usize,
    pub grid: GridInfo,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum XiObjective {
    #[default]
    Alpha,
    Beta,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct XiScan {
    pub xi: f64,
    pub fit: GoodnessFit,
    pub objective: XiObjective,
    /// `(xi, objective value)` for every candidate, in input order.
    pub evaluated: Vec<(f64, f64)>,
}

struct Grid {
    xs: Vec<f64>,
    ws: Vec<f64>,
    info: GridInfo,
}

fn geometric(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if lo == hi || n < 2 {
        return vec![lo];
    }
    let ratio = (hi / lo).ln() / (n - 1) as f64;
    let mut pts: Vec<f64> = (0..n).map(|k| lo * (ratio * k as f64).exp()).collect();
    pts[n - 1] = hi;
    pts
}

fn sorted_unique(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn build_grid(cost: &CostSpec, domain: &WeightDomain, density: usize) -> Result<Grid> {
    if density < 2 {
        return input("grid density must be at least 2");
    }
    let WeightDomain {
        w_min,
        w_max,
        total,
    } = *domain;
    let breaks: Vec<f64> = cost.breakpoints().iter().map(Scalar::to_f64).collect();
    let inside = |lo: f64, hi: f64| breaks.iter().copied().filter(move |&b| b >= lo && b <= hi);

    let mut xs = vec![0.0];
    xs.extend(geometric(w_min, total, density));
    xs.extend(inside(w_min, total));
    for edge in [total - w_max, total - w_min] {
        if edge >= w_min {
            xs.push(edge);
        }
    }
    let xs = sorted_unique(xs);

    let mut ws = geometric(w_min, w_max, density);
    ws.extend(inside(w_min, w_max));
    let ws = sorted_unique(ws);

    let pairs = xs
        .iter()
        .map(|&x| ws.iter().filter(|&&w| fits(x, w, total)).count())
        .sum();
    let info = GridInfo {
        density,
        x_points: xs.len(),
        w_points: ws.len(),
        pairs,
        convention: DOMAIN_CONVENTION,
    };
    Ok(Grid { xs, ws, info })
}

fn fits(x: f64, w: f64, total: f64) -> bool {
    x + w <= total * (1.0 + 1e-12)
}

fn finite(v: f64, what: &str, at: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        input(format!("{what} is not finite at {at}"))
    }
}

/// Integral of the cost over an interval of the given width.
struct Average {
    integral: f64,
    width: f64,
}

impl Average {
    /// `avg / by`, formed as `∫ / (width·by)` so constants give exactly 1.
    fn per(&self, by: f64) -> f64 {
        self.integral / (self.width * by)
    }
}

/// Quantities of the pair condition at one `(x, w)`.
struct PairPoint {
    avg: Average,
    end: f64,
    alone: f64,
}

fn pair_point(cost: &CostSpec, x: f64, w: f64) -> Result<PairPoint> {
    // The width actually integrated, which differs from `w` by rounding.
    let top = x + w;
    let end = finite(cost.evaluate(&top)?, "cost", top)?;
    let alone = finite(cost.evaluate(&w)?, "cost", w)?;
    let integral = finite(cost.integrate(&x, &top)?, "integral", x)?;
    let avg = Average {
        integral,
        width: top - x,
    };
    Ok(PairPoint { avg, end, alone })
}

/// Quantities of the load condition at one `x ≥ w_min`.
struct LoadPoint {
    avg: Average,
    at: f64,
    low: f64,
    high: f64,
}

fn load_point(cost: &CostSpec, w_min: f64, x: f64) -> Result<LoadPoint> {
    let at = finite(cost.evaluate(&x)?, "cost", x)?;
    let integral = finite(cost.integrate(&0.0, &x)?, "integral", x)?;
    let (low, high) = cost.range_extrema(&w_min, &x)?;
    Ok(LoadPoint {
        avg: Average { integral, width: x },
        at,
        low,
        high,
    })
}

fn scale_of(reference: f64, others: &[f64]) -> f64 {
    if reference > 0.0 {
        return reference;
    }
    let m = others.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if m > 0.0 {
        m
    } else {
        1.0
    }
}

#[derive(Clone, Copy)]
struct Worst {
    violation: f64,
    witness: Witness,
    condition: Condition,
}

impl Worst {
    fn absorb(&mut self, other: Worst) {
        if other.violation > self.violation + TIE_MARGIN * self.violation.abs().max(1.0) {
            *self = other;
        }
    }
}

fn worst_of(items: impl IntoIterator<Item = Worst>) -> Option<Worst> {
    let mut it = items.into_iter();
    let mut worst = it.next()?;
    for w in it {
        worst.absorb(w);
    }
    Some(worst)
}

/// Verifies both goodness conditions on a geometric-plus-breakpoint grid.
///
/// With `increasing_shortcut` set and the cost nondecreasing on `[0, W]`, the
/// load condition is checked in its simplified form
/// `β1·c(x) ≤ avg ≤ (β2 − ξ)·c(x)`.
pub fn check_goodness(
    cost: &CostSpec,
    params: &GoodnessParams<f64>,
    domain: &WeightDomain,
    grid_density: usize,
    increasing_shortcut: bool,
) -> Result<GoodnessReport> {
    cost.validate()?;
    params.validate()?;
    let grid = build_grid(cost, domain, grid_density)?;
    let shortcut = increasing_shortcut && cost.is_nondecreasing(domain.total).holds();
    let GoodnessParams {
        alpha1,
        alpha2,
        beta1,
        beta2,
        xi,
    } = *params;

    let rows: Vec<Result<Option<Worst>>> = grid
        .xs
        .par_iter()
        .map(|&x| {
            let mut row = Vec::new();
            for &w in grid.ws.iter().filter(|&&w| fits(x, w, domain.total)) {
                let p = pair_point(cost, x, w)?;
                let scale = scale_of(p.end, &[p.avg.per(1.0), p.alone]);
                let avg = p.avg.per(scale);
                let witness = Witness { x, w: Some(w) };
                row.push(Worst {
                    violation: (alpha1 * p.end - xi * p.alone) / scale - avg,
                    witness,
                    condition: Condition::Good1Lower,
                });
                row.push(Worst {
                    violation: avg - (alpha2 * p.end - xi * p.alone) / scale,
                    witness,
                    condition: Condition::Good1Upper,
                });
            }
            if x >= domain.w_min {
                let p = load_point(cost, domain.w_min, x)?;
                let (low, high) = if shortcut {
                    (0.0, p.at)
                } else {
                    (p.low, p.high)
                };
                let scale = scale_of(p.at, &[p.avg.per(1.0), p.low, p.high]);
                let avg = p.avg.per(scale);
                let witness = Witness { x, w: None };
                row.push(Worst {
                    violation: (beta1 * p.at - xi * low) / scale - avg,
                    witness,
                    condition: Condition::Good2Lower,
                });
                row.push(Worst {
                    violation: avg - (beta2 * p.at - xi * high) / scale,
                    witness,
                    condition: Condition::Good2Upper,
                });
            }
            Ok(worst_of(row))
        })
        .collect();

    let mut rows_ok = Vec::with_capacity(rows.len());
    for r in rows {
        rows_ok.extend(r?);
    }
    let worst = worst_of(rows_ok).expect("grid always holds x = w_min");
    Ok(GoodnessReport {
        satisfied: worst.violation <= DEFAULT_TOLERANCE,
        worst_violation: worst.violation,
        witness: worst.witness,
        condition: worst.condition,
        used_shortcut: shortcut,
        tolerance: DEFAULT_TOLERANCE,
        grid: grid.info,
    })
}

#[derive(Clone, Copy)]
struct Span {
    lo: f64,
    hi: f64,
}

impl Span {
    const EMPTY: Span = Span {
        lo: f64::INFINITY,
        hi: f64::NEG_INFINITY,
    };

    fn merge(self, other: Span) -> Span {
        Span {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    fn is_empty(&self) -> bool {
        self.lo > self.hi
    }
}

/// Tightest goodness parameters for a fixed slack `xi` on the grid.
///
/// Points whose normalizing cost vanishes are skipped and counted in
/// [`GoodnessFit::excluded`]. The load condition ignores `x = 0`.
pub fn fit_goodness(
    cost: &CostSpec,
    xi: f64,
    domain: &WeightDomain,
    grid_density: usize,
) -> Result<GoodnessFit> {
    cost.validate()?;
    if !(xi >= 0.0 && xi.is_finite()) {
        return input(format!("slack xi must be finite and nonnegative, got {xi}"));
    }
    let grid = build_grid(cost, domain, grid_density)?;

    let rows: Vec<Result<(Span, Span, Span, usize)>> = grid
        .xs
        .par_iter()
        .map(|&x| {
            let mut alpha = Span::EMPTY;
            let mut beta1 = Span::EMPTY;
            let mut beta2 = Span::EMPTY;
            let mut excluded = 0;
            for &w in grid.ws.iter().filter(|&&w| fits(x, w, domain.total)) {
                let p = pair_point(cost, x, w)?;
                if p.end <= 0.0 {
                    excluded += 1;
                    continue;
                }
                let r = p.avg.per(p.end) + xi * p.alone / p.end;
                alpha = alpha.merge(Span { lo: r, hi: r });
            }
            if x >= domain.w_min {
                let p = load_point(cost, domain.w_min, x)?;
                if p.at <= 0.0 {
                    excluded += 1;
                } else {
                    let avg = p.avg.per(p.at);
                    let lo = avg + xi * p.low / p.at;
                    let hi = avg + xi * p.high / p.at;
                    beta1 = beta1.merge(Span { lo, hi: lo });
                    beta2 = beta2.merge(Span { lo: hi, hi });
                }
            }
            Ok((alpha, beta1, beta2, excluded))
        })
        .collect();

    let (mut alpha, mut beta1, mut beta2, mut excluded) =
        (Span::EMPTY, Span::EMPTY, Span::EMPTY, 0);
    for r in rows {
        let (a, b1, b2, e) = r?;
        alpha = alpha.merge(a);
        beta1 = beta1.merge(b1);
        beta2 = beta2.merge(b2);
        excluded += e;
    }
    if alpha.is_empty() || beta1.is_empty() {
        return input(format!(
            "cost {cost} vanishes on the whole grid; nothing to fit"
        ));
    }
    let params = GoodnessParams {
        alpha1: alpha.lo,
        alpha2: alpha.hi,
        beta1: beta1.lo,
        beta2: beta2.hi,
        xi,
    };
    Ok(GoodnessFit {
        params,
        excluded,
        grid: grid.info,
    })
}

/// Fits at every candidate slack and keeps the one minimizing the objective.
///
/// Ties keep the earliest candidate.
pub fn scan_xi(
    cost: &CostSpec,
    domain: &WeightDomain,
    xi_grid: &[f64],
    objective: XiObjective,
    grid_density: usize,
) -> Result<XiScan> {
    if xi_grid.is_empty() {
        return input("xi grid is empty");
    }
    let mut evaluated = Vec::with_capacity(xi_grid.len());
    let mut best: Option<(f64, GoodnessFit, f64)> = None;
    for &xi in xi_grid {
        let fit = fit_goodness(cost, xi, domain, grid_density)?;
        let p = &fit.params;
        let value = match objective {
            XiObjective::Alpha => p.alpha2 / p.alpha1,
            XiObjective::Beta => p.beta2 / p.beta1,
        };
        evaluated.push((xi, value));
        let better = best
            .as_ref()
            .is_none_or(|(_, _, v)| value < v - TIE_MARGIN * v.abs().max(1.0));
        if better {
            best = Some((xi, fit, value));
        }
    }
    let (xi, fit, _) = best.expect("xi grid is nonempty");
    Ok(XiScan {
        xi,
        fit,
        objective,
        evaluated,
    })
}
