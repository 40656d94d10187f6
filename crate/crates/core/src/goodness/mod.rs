//! Goodness parameters of cost functions.
//!
//! A cost `c` is `(α1, α2, β1, β2)`-good with slack `ξ ≥ 0` when, for every
//! reachable load `x ∈ {0} ∪ [w_min, W]` and weight `w ∈ [w_min, w_max]`,
//!
//! ```text
//! α1·c(x+w) − ξ·c(w)  ≤  (1/w)∫_x^{x+w} c  ≤  α2·c(x+w) − ξ·c(w)
//! ```
//!
//! and, for `x ∈ [w_min, W]`,
//!
//! ```text
//! β1·c(x) − ξ·c_min(x)  ≤  (1/x)∫_0^x c  ≤  β2·c(x) − ξ·c_max(x)
//! ```
//!
//! with `c_min`/`c_max` the extrema of `c` over `[w_min, x]`. This module holds
//! the closed-form parameters of the catalog families and a grid-based
//! checker/fitter for arbitrary catalog costs.

mod grid;

use serde::Serialize;

use crate::error::{input, Result};
use crate::game::Game;
use crate::numeric::{le_tol, transcendental, Scalar};

pub use grid::{
    check_goodness, fit_goodness, scan_xi, Condition, GoodnessFit, GoodnessReport, GridInfo,
    Witness, XiObjective, XiScan, DEFAULT_GRID_DENSITY,
};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GoodnessParams<S = f64> {
    pub alpha1: S,
    pub alpha2: S,
    pub beta1: S,
    pub beta2: S,
    pub xi: S,
}

impl<S: Scalar> GoodnessParams<S> {
    pub fn new(alpha1: S, alpha2: S, beta1: S, beta2: S, xi: S) -> Result<Self> {
        let p = GoodnessParams {
            alpha1,
            alpha2,
            beta1,
            beta2,
            xi,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let zero = S::zero();
        if self.alpha1 <= zero || self.alpha2 <= zero || self.beta1 <= zero || self.beta2 <= zero {
            return input(format!("goodness parameters must be positive: {self:?}"));
        }
        if self.xi < zero {
            return input("goodness slack xi must be nonnegative");
        }
        if self.alpha1 > self.alpha2 || self.beta1 > self.beta2 {
            return input(format!("goodness parameters out of order: {self:?}"));
        }
        Ok(())
    }

    pub fn to_f64(&self) -> GoodnessParams<f64> {
        GoodnessParams {
            alpha1: self.alpha1.to_f64(),
            alpha2: self.alpha2.to_f64(),
            beta1: self.beta1.to_f64(),
            beta2: self.beta2.to_f64(),
            xi: self.xi.to_f64(),
        }
    }
}

/// Weight domain of a game: `0 < w_min ≤ w_max ≤ W`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WeightDomain {
    pub w_min: f64,
    pub w_max: f64,
    pub total: f64,
}

impl WeightDomain {
    pub fn new(w_min: f64, w_max: f64, total: f64) -> Result<Self> {
        if !(w_min > 0.0 && w_min <= w_max && w_max <= total && total.is_finite()) {
            return input(format!(
                "weight domain needs 0 < w_min <= w_max <= W, got ({w_min}, {w_max}, {total})"
            ));
        }
        Ok(WeightDomain {
            w_min,
            w_max,
            total,
        })
    }

    pub fn of_game(game: &Game) -> Self {
        WeightDomain {
            w_min: game.w_min().to_f64(),
            w_max: game.w_max().to_f64(),
            total: game.total_weight().to_f64(),
        }
    }
}

fn check_range<S: Scalar>(mu: &S, lo: S, hi: S, what: &str) -> Result<()> {
    let tol = S::tolerance(1e-12);
    if !(le_tol(&lo, mu, &tol) && le_tol(mu, &hi, &tol)) {
        return input(format!("{what}: mu = {mu} outside [{lo}, {hi}]"));
    }
    Ok(())
}

/// `x^d` is `(μ, 1, 1/(d+1), μ)`-good with `ξ = μ − 1/(d+1)` for `μ ∈ [1/(d+1), 1/d]`.
pub fn monomial_goodness<S: Scalar>(degree: u32, mu: S) -> Result<GoodnessParams<S>> {
    if degree == 0 {
        return input("monomial degree must be at least 1");
    }
    let d = degree as i64;
    let base = S::ratio(1, d + 1);
    check_range(&mu, base.clone(), S::ratio(1, d), "monomial goodness")?;
    Ok(GoodnessParams {
        alpha1: mu.clone(),
        alpha2: S::one(),
        beta1: base.clone(),
        beta2: mu.clone(),
        xi: mu - base,
    })
}

/// Constants are `(1, 1, 1, 1)`-good with `ξ = 0`.
pub fn constant_goodness<S: Scalar>() -> GoodnessParams<S> {
    GoodnessParams {
        alpha1: S::one(),
        alpha2: S::one(),
        beta1: S::one(),
        beta2: S::one(),
        xi: S::zero(),
    }
}

/// Nondecreasing concave costs are `(μ, μ+1/2, 1/2, μ+1/2)`-good with
/// `ξ = μ − 1/2` for `μ ∈ [1/2, 1]`.
pub fn concave_goodness<S: Scalar>(mu: S) -> Result<GoodnessParams<S>> {
    let half = S::ratio(1, 2);
    check_range(&mu, half.clone(), S::one(), "concave goodness")?;
    Ok(GoodnessParams {
        alpha1: mu.clone(),
        alpha2: mu.clone() + half.clone(),
        beta1: half.clone(),
        beta2: mu.clone() + half.clone(),
        xi: mu - half,
    })
}

/// Fair-share cost `1/x` capped at `cap` on `[0, 1)`, with `w_min = 1`:
/// `α1 = 1`, `α2 = max((1 + 1/w_max)·ln(1 + w_max), ln w_max + cap)`,
/// `β1 = cap`, `β2 = ln W + cap`, `ξ = 0`.
pub fn fairshare_goodness<S: Scalar>(cap: &S, w_max: &S, total: &S) -> Result<GoodnessParams<S>> {
    let one = S::one();
    if *cap < one {
        return input(format!("fair-share cap must be at least 1, got {cap}"));
    }
    if *w_max < one {
        return input(format!(
            "fair-share parameters assume w_min = 1; w_max = {w_max} is below 1 (rescale weights)"
        ));
    }
    if total < w_max {
        return input(format!("total weight {total} is below w_max = {w_max}"));
    }
    let shared = (one.clone() + one.clone() / w_max.clone())
        * transcendental(w_max, "fair-share alpha2", f64::ln_1p)?;
    let alone = transcendental(w_max, "fair-share alpha2", f64::ln)? + cap.clone();
    let alpha2 = if shared > alone { shared } else { alone };
    Ok(GoodnessParams {
        alpha1: one,
        alpha2,
        beta1: cap.clone(),
        beta2: transcendental(total, "fair-share beta2", f64::ln)? + cap.clone(),
        xi: S::zero(),
    })
}

/// Average-to-endpoint ratio of the capped fair-share cost:
/// `(1 + x/w)·ln(1 + w/x)` for `x ≥ 1`, `ln w + cap` for `x = 0`.
pub fn fairshare_ratio(w: f64, x: f64, cap: f64) -> Result<f64> {
    if w < 1.0 {
        return input(format!("fair-share ratio needs w >= 1, got {w}"));
    }
    if x == 0.0 {
        return Ok(w.ln() + cap);
    }
    if x < 1.0 {
        return input(format!("fair-share ratio needs x = 0 or x >= 1, got {x}"));
    }
    Ok((1.0 + x / w) * (w / x).ln_1p())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{q_int, q_ratio, Q};

    #[test]
    fn monomial_lemma_values() {
        let p = monomial_goodness(2, q_ratio(1, 2)).unwrap();
        assert_eq!(
            p,
            GoodnessParams {
                alpha1: q_ratio(1, 2),
                alpha2: q_int(1),
                beta1: q_ratio(1, 3),
                beta2: q_ratio(1, 2),
                xi: q_ratio(1, 6)
            }
        );
        let p = monomial_goodness(1, q_ratio(1, 2)).unwrap();
        assert_eq!(
            (p.alpha1, p.beta1, p.beta2, p.xi),
            (q_ratio(1, 2), q_ratio(1, 2), q_ratio(1, 2), q_int(0))
        );
        let p = monomial_goodness(3, q_ratio(1, 4)).unwrap();
        assert_eq!(
            (p.alpha1, p.alpha2, p.beta1, p.beta2),
            (q_ratio(1, 4), q_int(1), q_ratio(1, 4), q_ratio(1, 4))
        );
        assert!(monomial_goodness(2, q_ratio(3, 5)).is_err());
        assert!(monomial_goodness(2, q_ratio(1, 4)).is_err());
        assert!(monomial_goodness(0, q_int(1)).is_err());
    }

    #[test]
    fn constant_and_concave_lemma_values() {
        let c: GoodnessParams<Q> = constant_goodness();
        assert_eq!(
            (c.alpha1, c.alpha2, c.beta1, c.beta2, c.xi),
            (q_int(1), q_int(1), q_int(1), q_int(1), q_int(0))
        );
        let p = concave_goodness(q_ratio(1, 2)).unwrap();
        assert_eq!(
            (p.alpha1, p.alpha2, p.beta1, p.beta2),
            (q_ratio(1, 2), q_int(1), q_ratio(1, 2), q_int(1))
        );
        let p = concave_goodness(q_int(1)).unwrap();
        assert_eq!(
            (p.alpha1, p.alpha2, p.beta1, p.beta2),
            (q_int(1), q_ratio(3, 2), q_ratio(1, 2), q_ratio(3, 2))
        );
        assert!(concave_goodness(q_ratio(2, 5)).is_err());
    }

    #[test]
    fn fairshare_lemma_values() {
        let p = fairshare_goodness(&1.0, &1.0, &1.0).unwrap();
        assert!((p.alpha2 - 2.0 * 2f64.ln()).abs() < 1e-15);
        assert!((p.alpha2 - 1.386).abs() < 1e-3);
        let p = fairshare_goodness(&1.0, &10.0, &50.0).unwrap();
        assert!((p.alpha2 - (10f64.ln() + 1.0)).abs() < 1e-15);
        assert!((p.alpha2 - 3.303).abs() < 1e-3);
        assert!((p.beta2 - (50f64.ln() + 1.0)).abs() < 1e-15);
        assert!((p.beta2 - 4.912).abs() < 1e-3);
        assert_eq!((p.alpha1, p.beta1, p.xi), (1.0, 1.0, 0.0));
        assert!(fairshare_goodness(&1.0, &0.5, &3.0).is_err());
        assert!(fairshare_goodness(&0.5, &1.0, &3.0).is_err());
        assert!(fairshare_goodness(&q_int(1), &q_int(1), &q_int(2)).is_err());
    }

    #[test]
    fn fairshare_ratio_values() {
        assert_eq!(fairshare_ratio(1.0, 0.0, 1.0).unwrap(), 1.0);
        assert!((fairshare_ratio(1.0, 1.0, 1.0).unwrap() - 2.0 * 2f64.ln()).abs() < 1e-15);
        assert!((fairshare_ratio(2.0, 1.0, 1.0).unwrap() - 1.5 * 3f64.ln()).abs() < 1e-15);
        assert!((fairshare_ratio(2.0, 1.0, 1.0).unwrap() - 1.648).abs() < 1e-3);
        assert!(fairshare_ratio(0.5, 1.0, 1.0).is_err());
        assert!(fairshare_ratio(2.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(GoodnessParams::new(1.0, 0.5, 1.0, 1.0, 0.0).is_err());
        assert!(GoodnessParams::new(1.0, 1.0, 1.0, 1.0, -0.1).is_err());
        assert!(GoodnessParams::new(0.0, 1.0, 1.0, 1.0, 0.0).is_err());
        assert!(WeightDomain::new(2.0, 1.0, 3.0).is_err());
        assert!(WeightDomain::new(1.0, 2.0, 3.0).is_ok());
    }
}
