//! Catalog of resource cost functions.
//!
//! Every variant has a closed-form value and integral. Polynomial and
//! piecewise-linear data evaluate exactly over [`Q`]; square roots and
//! logarithms require the float backend.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{input, ForgeError, Result};
use crate::numeric::{format_q, q_string, q_string_vec, transcendental, Scalar, Q};
use crate::quadrature::{adaptive_simpson_split, DEFAULT_QUAD_TOLERANCE};

/// Points used by grid fallbacks (range extrema, monotonicity) besides breakpoints.
pub const FALLBACK_GRID_POINTS: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConcaveKind {
    /// `scale·√x + offset`
    Sqrt,
    /// `scale·ln(1+x) + offset`
    Log1p,
    /// `scale·x + offset`
    Affine,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Breakpoint {
    #[serde(with = "q_string")]
    pub x: Q,
    #[serde(with = "q_string")]
    pub y: Q,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConicalTerm {
    #[serde(with = "q_string")]
    pub coeff: Q,
    pub cost: CostSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CostSpec {
    Constant {
        #[serde(with = "q_string")]
        value: Q,
    },
    Monomial {
        degree: u32,
        #[serde(with = "q_string")]
        coeff: Q,
    },
    /// `Σ coeffs[k]·x^k`
    Polynomial {
        #[serde(with = "q_string_vec")]
        coeffs: Vec<Q>,
    },
    /// Concave, nondecreasing, starting at `x = 0`; extended past the last
    /// breakpoint with the last slope.
    PiecewiseLinear {
        points: Vec<Breakpoint>,
    },
    #[serde(rename = "concave")]
    ConcaveAnalytic {
        #[serde(rename = "fn")]
        kind: ConcaveKind,
        #[serde(with = "q_string")]
        scale: Q,
        #[serde(with = "q_string", default = "Q::zero")]
        offset: Q,
    },
    /// `a/x` on `[1, ∞)`, the constant `cap·a` on `[0, 1)`.
    #[serde(rename = "fairshare")]
    FairShare {
        #[serde(with = "q_string")]
        a: Q,
        #[serde(with = "q_string", default = "Q::one")]
        cap: Q,
    },
    Conical {
        terms: Vec<ConicalTerm>,
    },
}

/// Outcome of a monotonicity test on `[0, W]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Monotonicity {
    Nondecreasing,
    /// `x < y` with `c(x) > c(y)`.
    Decreasing {
        x: f64,
        y: f64,
    },
}

impl Monotonicity {
    pub fn holds(&self) -> bool {
        matches!(self, Monotonicity::Nondecreasing)
    }
}

impl CostSpec {
    pub fn constant(value: Q) -> Self {
        CostSpec::Constant { value }
    }

    pub fn monomial(degree: u32, coeff: Q) -> Self {
        CostSpec::Monomial { degree, coeff }
    }

    pub fn polynomial(coeffs: Vec<Q>) -> Self {
        CostSpec::Polynomial { coeffs }
    }

    pub fn concave(kind: ConcaveKind, scale: Q, offset: Q) -> Self {
        CostSpec::ConcaveAnalytic {
            kind,
            scale,
            offset,
        }
    }

    pub fn fair_share(a: Q, cap: Q) -> Self {
        CostSpec::FairShare { a, cap }
    }

    pub fn conical(terms: Vec<(Q, CostSpec)>) -> Self {
        CostSpec::Conical {
            terms: terms
                .into_iter()
                .map(|(coeff, cost)| ConicalTerm { coeff, cost })
                .collect(),
        }
    }

    pub fn piecewise_linear(points: Vec<(Q, Q)>) -> Self {
        CostSpec::PiecewiseLinear {
            points: points
                .into_iter()
                .map(|(x, y)| Breakpoint { x, y })
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let nonneg = |q: &Q, what: &str| -> Result<()> {
            if q.is_negative() {
                input(format!("{what} must be nonnegative, got {}", format_q(q)))
            } else {
                Ok(())
            }
        };
        match self {
            CostSpec::Constant { value } => nonneg(value, "constant cost"),
            CostSpec::Monomial { degree, coeff } => {
                if *degree == 0 {
                    return input("monomial degree must be at least 1");
                }
                nonneg(coeff, "monomial coefficient")
            }
            CostSpec::Polynomial { coeffs } => {
                if coeffs.is_empty() {
                    return input("polynomial needs at least one coefficient");
                }
                coeffs
                    .iter()
                    .try_for_each(|c| nonneg(c, "polynomial coefficient"))
            }
            CostSpec::PiecewiseLinear { points } => validate_piecewise(points),
            CostSpec::ConcaveAnalytic { scale, offset, .. } => {
                nonneg(scale, "concave scale")?;
                nonneg(offset, "concave offset")
            }
            CostSpec::FairShare { a, cap } => {
                if !a.is_positive() {
                    return input("fair-share base cost must be positive");
                }
                if *cap < Q::one() {
                    return input("fair-share cap must be at least 1");
                }
                Ok(())
            }
            CostSpec::Conical { terms } => {
                if terms.is_empty() {
                    return input("conical combination needs at least one term");
                }
                terms.iter().try_for_each(|t| {
                    nonneg(&t.coeff, "conical coefficient")?;
                    t.cost.validate()
                })
            }
        }
    }

    pub fn evaluate<S: Scalar>(&self, x: &S) -> Result<S> {
        if *x < S::zero() {
            return input(format!("cost evaluated at negative load {x}"));
        }
        Ok(match self {
            CostSpec::Constant { value } => S::from_q(value),
            CostSpec::Monomial { degree, coeff } => S::from_q(coeff) * x.powu(*degree),
            CostSpec::Polynomial { coeffs } => {
                // Horner
                coeffs
                    .iter()
                    .rev()
                    .fold(S::zero(), |acc, c| acc * x.clone() + S::from_q(c))
            }
            CostSpec::PiecewiseLinear { points } => {
                let (i, slope) = piecewise_segment(points, x);
                S::from_q(&points[i].y) + slope * (x.clone() - S::from_q(&points[i].x))
            }
            CostSpec::ConcaveAnalytic {
                kind,
                scale,
                offset,
            } => {
                let base = match kind {
                    ConcaveKind::Sqrt => transcendental(x, "sqrt cost", f64::sqrt)?,
                    ConcaveKind::Log1p => transcendental(x, "log1p cost", f64::ln_1p)?,
                    ConcaveKind::Affine => x.clone(),
                };
                S::from_q(scale) * base + S::from_q(offset)
            }
            CostSpec::FairShare { a, cap } => {
                if *x < S::one() {
                    S::from_q(cap) * S::from_q(a)
                } else {
                    S::from_q(a) / x.clone()
                }
            }
            CostSpec::Conical { terms } => {
                let mut acc = S::zero();
                for t in terms {
                    acc = acc + S::from_q(&t.coeff) * t.cost.evaluate(x)?;
                }
                acc
            }
        })
    }

    /// Closed-form `∫_lo^hi c(t) dt`.
    pub fn integrate<S: Scalar>(&self, lo: &S, hi: &S) -> Result<S> {
        if *lo < S::zero() {
            return input(format!("integration bound {lo} is negative"));
        }
        if lo > hi {
            return input(format!("integration bounds reversed: {lo} > {hi}"));
        }
        let width = hi.clone() - lo.clone();
        Ok(match self {
            CostSpec::Constant { value } => S::from_q(value) * width,
            CostSpec::Monomial { degree, coeff } => {
                S::from_q(coeff) * monomial_integral(*degree, lo, hi)
            }
            CostSpec::Polynomial { coeffs } => {
                let mut acc = S::zero();
                for (k, c) in coeffs.iter().enumerate() {
                    if !c.is_zero() {
                        acc = acc + S::from_q(c) * monomial_integral(k as u32, lo, hi);
                    }
                }
                acc
            }
            CostSpec::PiecewiseLinear { points } => piecewise_integral(self, points, lo, hi)?,
            CostSpec::ConcaveAnalytic {
                kind,
                scale,
                offset,
            } => {
                let base = match kind {
                    ConcaveKind::Affine => {
                        width.clone() * (lo.clone() + hi.clone()) / S::from_i64(2)
                    }
                    ConcaveKind::Sqrt => {
                        let (sa, sb) = (
                            transcendental(lo, "sqrt integral", f64::sqrt)?,
                            transcendental(hi, "sqrt integral", f64::sqrt)?,
                        );
                        if sa.clone() + sb.clone() == S::zero() {
                            S::zero()
                        } else {
                            // b^{3/2} - a^{3/2} = (b - a)(a + √(ab) + b) / (√a + √b)
                            S::ratio(2, 3)
                                * width.clone()
                                * (lo.clone() + sa.clone() * sb.clone() + hi.clone())
                                / (sa + sb)
                        }
                    }
                    ConcaveKind::Log1p => {
                        let one = S::one();
                        let ln_hi = transcendental(hi, "log1p integral", f64::ln_1p)?;
                        let rel = width.clone() / (one.clone() + lo.clone());
                        let ln_ratio = transcendental(&rel, "log1p integral", f64::ln_1p)?;
                        width.clone() * (ln_hi - one.clone()) + (one + lo.clone()) * ln_ratio
                    }
                };
                S::from_q(scale) * base + S::from_q(offset) * width
            }
            CostSpec::FairShare { a, cap } => {
                let one = S::one();
                let mut acc = S::zero();
                if *lo < one {
                    let top = if *hi < one { hi.clone() } else { one.clone() };
                    acc = acc + S::from_q(cap) * S::from_q(a) * (top - lo.clone());
                }
                if *hi > one {
                    let bottom = if *lo > one { lo.clone() } else { one };
                    let rel = (hi.clone() - bottom.clone()) / bottom;
                    let ln = transcendental(&rel, "fair-share integral", f64::ln_1p)?;
                    acc = acc + S::from_q(a) * ln;
                }
                acc
            }
            CostSpec::Conical { terms } => {
                let mut acc = S::zero();
                for t in terms {
                    acc = acc + S::from_q(&t.coeff) * t.cost.integrate(lo, hi)?;
                }
                acc
            }
        })
    }

    /// Numerical integral by adaptive Simpson, split at breakpoints.
    pub fn integrate_numerically(&self, lo: f64, hi: f64, tol: f64) -> Result<f64> {
        if lo < 0.0 || lo > hi {
            return input(format!("bad integration interval [{lo}, {hi}]"));
        }
        // Surface evaluation errors before quadrature swallows them.
        self.evaluate(&lo)?;
        let breaks: Vec<f64> = self.breakpoints().iter().map(|q| q.to_f64()).collect();
        let f = |t: f64| self.evaluate(&t).unwrap_or(f64::NAN);
        Ok(adaptive_simpson_split(&f, lo, hi, &breaks, tol))
    }

    pub fn integrate_numerically_default(&self, lo: f64, hi: f64) -> Result<f64> {
        self.integrate_numerically(lo, hi, DEFAULT_QUAD_TOLERANCE)
    }

    /// Points where the function has a kink or jump.
    pub fn breakpoints(&self) -> Vec<Q> {
        let mut out = match self {
            CostSpec::PiecewiseLinear { points } => points.iter().map(|p| p.x.clone()).collect(),
            CostSpec::FairShare { .. } => vec![Q::one()],
            CostSpec::Conical { terms } => {
                terms.iter().flat_map(|t| t.cost.breakpoints()).collect()
            }
            _ => Vec::new(),
        };
        out.sort();
        out.dedup();
        out
    }

    /// True when nondecreasing is guaranteed by the variant's construction.
    pub fn is_structurally_nondecreasing(&self) -> bool {
        match self {
            CostSpec::FairShare { .. } => false,
            CostSpec::Conical { terms } => terms
                .iter()
                .all(|t| t.coeff.is_zero() || t.cost.is_structurally_nondecreasing()),
            _ => true,
        }
    }

    /// True for the nondecreasing concave catalog members.
    pub fn is_concave(&self) -> bool {
        match self {
            CostSpec::Constant { .. }
            | CostSpec::PiecewiseLinear { .. }
            | CostSpec::ConcaveAnalytic { .. } => true,
            CostSpec::Monomial { degree, .. } => *degree == 1,
            CostSpec::Polynomial { coeffs } => coeffs.len() <= 2,
            CostSpec::FairShare { .. } => false,
            CostSpec::Conical { terms } => terms.iter().all(|t| t.cost.is_concave()),
        }
    }

    /// Nondecreasing test on `[0, total]`, with a witness pair on failure.
    pub fn is_nondecreasing(&self, total: f64) -> Monotonicity {
        if self.is_structurally_nondecreasing() {
            return Monotonicity::Nondecreasing;
        }
        if let CostSpec::FairShare { cap, .. } = self {
            if total > 1.0 {
                return Monotonicity::Decreasing {
                    x: 1.0,
                    y: total.min(2.0),
                };
            }
            if total == 1.0 && *cap > Q::one() {
                return Monotonicity::Decreasing { x: 0.5, y: 1.0 };
            }
            return Monotonicity::Nondecreasing;
        }
        let grid = fallback_grid(self, 0.0, total);
        let values: Vec<f64> = grid
            .iter()
            .map(|x| self.evaluate(x).unwrap_or(f64::NAN))
            .collect();
        for k in 1..grid.len() {
            let (a, b) = (values[k - 1], values[k]);
            if a > b + 1e-12 * b.abs().max(1.0) {
                return Monotonicity::Decreasing {
                    x: grid[k - 1],
                    y: grid[k],
                };
            }
        }
        Monotonicity::Nondecreasing
    }

    /// `(min, max)` of the cost over `[w_min, x]`.
    pub fn range_extrema<S: Scalar>(&self, w_min: &S, x: &S) -> Result<(S, S)> {
        if *w_min <= S::zero() || w_min > x {
            return input(format!("empty or nonpositive range [{w_min}, {x}]"));
        }
        if self.is_structurally_nondecreasing() {
            return Ok((self.evaluate(w_min)?, self.evaluate(x)?));
        }
        if let CostSpec::FairShare { a, cap } = self {
            let one = S::one();
            let high = S::from_q(cap) * S::from_q(a);
            return Ok(if *x < one {
                (high.clone(), high)
            } else if *w_min >= one {
                (self.evaluate(x)?, self.evaluate(w_min)?)
            } else {
                (self.evaluate(x)?, high)
            });
        }
        let steps = FALLBACK_GRID_POINTS as i64;
        let span = x.clone() - w_min.clone();
        let mut points: Vec<S> = (0..=steps)
            .map(|k| w_min.clone() + span.clone() * S::ratio(k, steps))
            .collect();
        for b in self.breakpoints() {
            let b = S::from_q(&b);
            if b >= *w_min && b <= *x {
                points.push(b);
            }
        }
        let mut lo: Option<S> = None;
        let mut hi: Option<S> = None;
        for p in &points {
            let v = self.evaluate(p)?;
            if lo.as_ref().is_none_or(|l| v < *l) {
                lo = Some(v.clone());
            }
            if hi.as_ref().is_none_or(|h| v > *h) {
                hi = Some(v);
            }
        }
        Ok((lo.expect("grid is nonempty"), hi.expect("grid is nonempty")))
    }

    /// The same function multiplied by `k ≥ 0`, folded into the variant's data.
    pub fn scaled_by(&self, k: &Q) -> CostSpec {
        match self {
            CostSpec::Constant { value } => CostSpec::Constant { value: value * k },
            CostSpec::Monomial { degree, coeff } => CostSpec::Monomial {
                degree: *degree,
                coeff: coeff * k,
            },
            CostSpec::Polynomial { coeffs } => CostSpec::Polynomial {
                coeffs: coeffs.iter().map(|c| c * k).collect(),
            },
            CostSpec::PiecewiseLinear { points } => CostSpec::PiecewiseLinear {
                points: points
                    .iter()
                    .map(|p| Breakpoint {
                        x: p.x.clone(),
                        y: &p.y * k,
                    })
                    .collect(),
            },
            CostSpec::ConcaveAnalytic {
                kind,
                scale,
                offset,
            } => CostSpec::ConcaveAnalytic {
                kind: *kind,
                scale: scale * k,
                offset: offset * k,
            },
            CostSpec::FairShare { a, cap } => CostSpec::FairShare {
                a: a * k,
                cap: cap.clone(),
            },
            CostSpec::Conical { terms } => CostSpec::Conical {
                terms: terms
                    .iter()
                    .map(|t| ConicalTerm {
                        coeff: &t.coeff * k,
                        cost: t.cost.clone(),
                    })
                    .collect(),
            },
        }
    }

    /// Flattens conical combinations and polynomials into single-term atoms
    /// (constants, monomials, concave members, fair-share) with coefficients
    /// folded in. Zero atoms are dropped.
    pub fn atoms(&self) -> Vec<CostSpec> {
        match self {
            CostSpec::Polynomial { coeffs } => coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| {
                    if k == 0 {
                        CostSpec::Constant { value: c.clone() }
                    } else {
                        CostSpec::Monomial {
                            degree: k as u32,
                            coeff: c.clone(),
                        }
                    }
                })
                .collect(),
            CostSpec::Conical { terms } => terms
                .iter()
                .filter(|t| !t.coeff.is_zero())
                .flat_map(|t| t.cost.atoms().into_iter().map(|a| a.scaled_by(&t.coeff)))
                .collect(),
            other if other.is_zero_function() => Vec::new(),
            other => vec![other.clone()],
        }
    }

    fn is_zero_function(&self) -> bool {
        match self {
            CostSpec::Constant { value } => value.is_zero(),
            CostSpec::Monomial { coeff, .. } => coeff.is_zero(),
            CostSpec::ConcaveAnalytic { scale, offset, .. } => scale.is_zero() && offset.is_zero(),
            CostSpec::PiecewiseLinear { points } => points.iter().all(|p| p.y.is_zero()),
            _ => false,
        }
    }

    /// Whether evaluation and integration are exact over rationals.
    pub fn is_exact(&self) -> bool {
        match self {
            CostSpec::ConcaveAnalytic { kind, .. } => *kind == ConcaveKind::Affine,
            CostSpec::FairShare { .. } => false,
            CostSpec::Conical { terms } => terms.iter().all(|t| t.cost.is_exact()),
            _ => true,
        }
    }
}

impl fmt::Display for CostSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CostSpec::Constant { value } => write!(f, "{}", format_q(value)),
            CostSpec::Monomial { degree, coeff } => write!(f, "{}·x^{degree}", format_q(coeff)),
            CostSpec::Polynomial { coeffs } => {
                let parts: Vec<String> = coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, c)| format!("{}·x^{k}", format_q(c)))
                    .collect();
                write!(f, "poly[{}]", parts.join(" + "))
            }
            CostSpec::PiecewiseLinear { points } => {
                let parts: Vec<String> = points
                    .iter()
                    .map(|p| format!("({},{})", format_q(&p.x), format_q(&p.y)))
                    .collect();
                write!(f, "pl[{}]", parts.join(" "))
            }
            CostSpec::ConcaveAnalytic {
                kind,
                scale,
                offset,
            } => {
                let name = match kind {
                    ConcaveKind::Sqrt => "sqrt(x)",
                    ConcaveKind::Log1p => "ln(1+x)",
                    ConcaveKind::Affine => "x",
                };
                write!(f, "{}·{name} + {}", format_q(scale), format_q(offset))
            }
            CostSpec::FairShare { a, cap } => {
                write!(f, "fairshare(a={}, cap={})", format_q(a), format_q(cap))
            }
            CostSpec::Conical { terms } => {
                let parts: Vec<String> = terms
                    .iter()
                    .map(|t| format!("{}·({})", format_q(&t.coeff), t.cost))
                    .collect();
                write!(f, "{}", parts.join(" + "))
            }
        }
    }
}

/// `∫_lo^hi t^k dt` in the cancellation-free form `(hi-lo)·Σ hi^j lo^(k-j) / (k+1)`.
fn monomial_integral<S: Scalar>(k: u32, lo: &S, hi: &S) -> S {
    let mut sum = S::zero();
    for j in 0..=k {
        sum = sum + hi.powu(j) * lo.powu(k - j);
    }
    (hi.clone() - lo.clone()) * sum / S::from_i64(k as i64 + 1)
}

fn validate_piecewise(points: &[Breakpoint]) -> Result<()> {
    let Some(first) = points.first() else {
        return input("piecewise-linear cost needs at least one breakpoint");
    };
    if !first.x.is_zero() {
        return input("piecewise-linear cost must start at x = 0");
    }
    if points.iter().any(|p| p.y.is_negative()) {
        return input("piecewise-linear values must be nonnegative");
    }
    let mut prev_slope: Option<Q> = None;
    for w in points.windows(2) {
        if w[1].x <= w[0].x {
            return input("piecewise-linear breakpoints must be strictly increasing");
        }
        let slope = (&w[1].y - &w[0].y) / (&w[1].x - &w[0].x);
        if slope.is_negative() {
            return input("piecewise-linear slopes must be nonnegative");
        }
        if prev_slope.as_ref().is_some_and(|p| slope > *p) {
            return input("piecewise-linear slopes must be nonincreasing (concavity)");
        }
        prev_slope = Some(slope);
    }
    Ok(())
}

/// Index of the segment containing `x` and its slope.
fn piecewise_segment<S: Scalar>(points: &[Breakpoint], x: &S) -> (usize, S) {
    let idx = points
        .iter()
        .rposition(|p| S::from_q(&p.x) <= *x)
        .unwrap_or(0);
    let slope_of = |i: usize| -> S {
        S::from_q(&((&points[i + 1].y - &points[i].y) / (&points[i + 1].x - &points[i].x)))
    };
    let slope = if idx + 1 < points.len() {
        slope_of(idx)
    } else if points.len() >= 2 {
        slope_of(points.len() - 2)
    } else {
        S::zero()
    };
    (idx, slope)
}

fn piecewise_integral<S: Scalar>(
    cost: &CostSpec,
    points: &[Breakpoint],
    lo: &S,
    hi: &S,
) -> Result<S> {
    let mut cuts: Vec<S> = vec![lo.clone()];
    for p in points {
        let x = S::from_q(&p.x);
        if x > *lo && x < *hi {
            cuts.push(x);
        }
    }
    cuts.push(hi.clone());
    let mut acc = S::zero();
    for w in cuts.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        // linear on [a, b]: trapezoid is exact
        acc = acc
            + (b.clone() - a.clone()) * (cost.evaluate(a)? + cost.evaluate(b)?) / S::from_i64(2);
    }
    Ok(acc)
}

fn fallback_grid(cost: &CostSpec, lo: f64, hi: f64) -> Vec<f64> {
    let n = FALLBACK_GRID_POINTS;
    let mut pts: Vec<f64> = (0..=n)
        .map(|k| lo + (hi - lo) * k as f64 / n as f64)
        .collect();
    for b in cost.breakpoints() {
        let b = b.to_f64();
        if b >= lo && b <= hi {
            pts.push(b);
            // left limit at a jump
            let left = b - (hi - lo).max(1.0) * 1e-9;
            if left >= lo {
                pts.push(left);
            }
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// Errors from a cost spec that was expected to be atomic.
pub(crate) fn not_atomic(cost: &CostSpec) -> ForgeError {
    ForgeError::Input(format!(
        "cost `{cost}` is a combination; decompose the game into single-term resources first"
    ))
}
