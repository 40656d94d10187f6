//! Composition of per-resource goodness into game-level (α, β) bounds, the
//! parametric trade-off curves of the cost families, and the catalog rule that
//! assigns goodness parameters to each resource.

use std::fmt;
use std::str::FromStr;

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::cost::CostSpec;
use crate::error::{input, ForgeError, Result};
use crate::game::{Game, Resource};
use crate::goodness::{
    concave_goodness, constant_goodness, fairshare_goodness, monomial_goodness, GoodnessParams,
};
use crate::numeric::{le_tol, transcendental, Scalar};
use crate::potential::PotentialConfig;

/// `(max_e α2/α1, max_e (β2/α1) / min_e (β1/α1))`.
pub fn compose<S: Scalar>(params: &[GoodnessParams<S>]) -> Result<(S, S)> {
    let Some(first) = params.first() else {
        return input("cannot compose an empty parameter list");
    };
    for p in params {
        p.validate()?;
    }
    let ratio = |p: &GoodnessParams<S>, num: &S| num.clone() / p.alpha1.clone();
    let mut alpha = ratio(first, &first.alpha2);
    let mut upper = ratio(first, &first.beta2);
    let mut lower = ratio(first, &first.beta1);
    for p in &params[1..] {
        let a = ratio(p, &p.alpha2);
        if a > alpha {
            alpha = a;
        }
        let u = ratio(p, &p.beta2);
        if u > upper {
            upper = u;
        }
        let l = ratio(p, &p.beta1);
        if l < lower {
            lower = l;
        }
    }
    Ok((alpha, upper / lower))
}

/// Replaces every conical or polynomial resource by one resource per term.
///
/// Term `j` of resource `e` becomes resource `e#j`, and every strategy using
/// `e` uses all of its terms, so all player costs are unchanged. Terms that
/// vanish identically are dropped.
pub fn gadget_decompose(game: &Game) -> Result<Game> {
    let mut resources = Vec::new();
    let mut replacement: Vec<Vec<usize>> = Vec::with_capacity(game.n_resources());
    for r in game.resources() {
        let composite = matches!(
            r.cost,
            CostSpec::Conical { .. } | CostSpec::Polynomial { .. }
        );
        if !composite {
            replacement.push(vec![resources.len()]);
            resources.push(r.clone());
            continue;
        }
        let mut ids = Vec::new();
        for (j, atom) in r.cost.atoms().into_iter().enumerate() {
            ids.push(resources.len());
            resources.push(Resource {
                id: format!("{}#{j}", r.id),
                cost: atom,
            });
        }
        replacement.push(ids);
    }
    let strategies = game
        .all_strategies()
        .iter()
        .map(|set| {
            set.iter()
                .map(|s| {
                    s.iter()
                        .flat_map(|&e| replacement[e].iter().copied())
                        .collect()
                })
                .collect()
        })
        .collect();
    game.with_resources(resources, strategies)
}

/// Cost families with a closed-form trade-off curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// Polynomials of degree at most `d` with nonnegative coefficients.
    Poly { d: u32 },
    /// Nondecreasing concave costs.
    Concave,
    /// Conical combinations of polynomials of degree at most `d` and concave costs.
    Mixed { d: u32 },
    /// Fair cost sharing with unit minimum weight.
    #[serde(rename = "fairshare")]
    FairShare,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Poly { .. } => "poly",
            Family::Concave => "concave",
            Family::Mixed { .. } => "mixed",
            Family::FairShare => "fairshare",
        }
    }

    /// Builds a family from its name and the degree used by polynomial families.
    pub fn parse(name: &str, d: Option<u32>) -> Result<Family> {
        let need_d =
            || d.ok_or_else(|| ForgeError::Input(format!("family `{name}` needs a degree")));
        Ok(match name {
            "poly" => Family::Poly { d: need_d()? },
            "concave" => Family::Concave,
            "mixed" => Family::Mixed { d: need_d()? },
            "fairshare" | "fair_share" => Family::FairShare,
            other => return input(format!("unknown family `{other}`")),
        })
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Poly { d } => write!(f, "poly(d={d})"),
            Family::Mixed { d } => write!(f, "mixed(d={d})"),
            other => f.write_str(other.name()),
        }
    }
}

impl FromStr for Family {
    type Err = ForgeError;

    /// Accepts `poly:2`, `mixed:3`, `concave`, `fairshare`.
    fn from_str(s: &str) -> Result<Family> {
        match s.split_once(':') {
            Some((name, d)) => {
                let d = d
                    .parse()
                    .map_err(|_| ForgeError::Input(format!("bad degree in `{s}`")))?;
                Family::parse(name, Some(d))
            }
            None => Family::parse(s, None),
        }
    }
}

fn in_range<S: Scalar>(lambda: &S, lo: S, hi: S, what: &str) -> Result<()> {
    let tol = S::tolerance(1e-12);
    if !(le_tol(&lo, lambda, &tol) && le_tol(lambda, &hi, &tol)) {
        return input(format!("{what}: lambda = {lambda} outside [{lo}, {hi}]"));
    }
    Ok(())
}

fn check_degree(d: u32) -> Result<()> {
    if d == 0 {
        return input("degree must be at least 1");
    }
    Ok(())
}

/// Monomial parameters of degree `k` inside a degree-`d` family at `lambda`:
/// `μ = 1/(k+1)` below the top degree, `μ = 1/λ` at it.
fn poly_rule<S: Scalar>(k: u32, d: u32, lambda: &S) -> Result<GoodnessParams<S>> {
    if k < d {
        monomial_goodness(k, S::ratio(1, k as i64 + 1))
    } else {
        monomial_goodness(k, S::one() / lambda.clone())
    }
}

fn poly_params<S: Scalar>(d: u32, lambda: &S) -> Result<Vec<GoodnessParams<S>>> {
    let mut out = vec![constant_goodness()];
    for k in 1..=d {
        out.push(poly_rule(k, d, lambda)?);
    }
    Ok(out)
}

fn concave_mu<S: Scalar>(lambda: &S) -> S {
    S::one() / (S::from_i64(2) * (lambda.clone() - S::one()))
}

fn mixed_concave_mu<S: Scalar>(d: u32, lambda: &S) -> S {
    S::from_i64(d as i64 + 1) / (S::from_i64(2) * lambda.clone())
}

/// `(λ, (d+1)/λ)` for `λ ∈ [d, d+1]`.
pub fn poly_curve<S: Scalar>(d: u32, lambda: &S) -> Result<(S, S)> {
    check_degree(d)?;
    in_range(
        lambda,
        S::from_i64(d as i64),
        S::from_i64(d as i64 + 1),
        "polynomial curve",
    )?;
    Ok((lambda.clone(), S::from_i64(d as i64 + 1) / lambda.clone()))
}

/// `(λ, λ/(λ−1))` for `λ ∈ [3/2, 2]`.
pub fn concave_curve<S: Scalar>(lambda: &S) -> Result<(S, S)> {
    in_range(lambda, S::ratio(3, 2), S::from_i64(2), "concave curve")?;
    Ok((lambda.clone(), lambda.clone() / (lambda.clone() - S::one())))
}

/// `(λ, 1 + (d+1)/λ)` for `λ ∈ [d, d+1]` and `d ≥ 2`.
///
/// Degree 1 falls back to the concave curve, since affine costs are concave.
pub fn mixed_curve<S: Scalar>(d: u32, lambda: &S) -> Result<(S, S)> {
    check_degree(d)?;
    if d == 1 {
        log::warn!("mixed curve with d = 1 uses the concave curve");
        return concave_curve(lambda);
    }
    in_range(
        lambda,
        S::from_i64(d as i64),
        S::from_i64(d as i64 + 1),
        "mixed curve",
    )?;
    let closed = (
        lambda.clone(),
        S::one() + S::from_i64(d as i64 + 1) / lambda.clone(),
    );
    let mut parts = poly_params(d, lambda)?;
    parts.push(concave_goodness(mixed_concave_mu(d, lambda))?);
    let composed = compose(&parts)?;
    let tol = S::tolerance(1e-12);
    let close = |a: &S, b: &S| le_tol(a, b, &tol) && le_tol(b, a, &tol);
    assert!(
        close(&composed.0, &closed.0) && close(&composed.1, &closed.1),
        "mixed curve {closed:?} disagrees with composition {composed:?}"
    );
    Ok(closed)
}

/// `(max((1 + 1/w_max)·ln(1 + w_max), ln w_max + λ), 1 + ln W/λ)` for `λ ≥ 1`.
pub fn fairshare_curve(lambda: f64, w_max: f64, total: f64) -> Result<(f64, f64)> {
    if !(lambda >= 1.0 && lambda.is_finite()) {
        return input(format!("fair-share curve needs lambda >= 1, got {lambda}"));
    }
    if !(1.0 <= w_max && w_max <= total && total.is_finite()) {
        return input(format!(
            "fair-share curve needs 1 <= w_max <= W, got ({w_max}, {total})"
        ));
    }
    let p = fairshare_goodness(&lambda, &w_max, &total)?;
    Ok((p.alpha2, 1.0 + total.ln() / lambda))
}

/// Smallest factor of the earlier fair-sharing existence result: `log₂(e·(1 + w_max))`.
pub fn chen_roughgarden_threshold(w_max: f64) -> f64 {
    (std::f64::consts::E * (1.0 + w_max)).log2()
}

/// `(f, 1 + 2·log₂(1 + W)/f)` for `f ≥ 2·log₂(e·(1 + w_max))`.
pub fn chen_roughgarden_reference(w_max: f64, total: f64, f: f64) -> Result<(f64, f64)> {
    let floor = 2.0 * chen_roughgarden_threshold(w_max);
    if !(f >= floor * (1.0 - 1e-12)) {
        return input(format!("reference curve needs f >= {floor}, got {f}"));
    }
    Ok((f, 1.0 + 2.0 * (1.0 + total).log2() / f))
}

/// A family curve together with the game data it depends on.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundCurve {
    pub family: Family,
    /// `(w_max, W)`, needed by the fair-share curve only.
    pub weights: Option<(f64, f64)>,
    pub lambda_range: (f64, f64),
}

impl BoundCurve {
    pub fn new(family: Family, weights: Option<(f64, f64)>) -> Result<BoundCurve> {
        let lambda_range = match family {
            Family::Poly { d } => {
                check_degree(d)?;
                (d as f64, d as f64 + 1.0)
            }
            Family::Mixed { d } if d >= 2 => (d as f64, d as f64 + 1.0),
            Family::Mixed { d } => {
                check_degree(d)?;
                (1.5, 2.0)
            }
            Family::Concave => (1.5, 2.0),
            Family::FairShare => {
                let Some((w_max, total)) = weights else {
                    return input("fair-share curve needs (w_max, W)");
                };
                fairshare_curve(1.0, w_max, total)?;
                (1.0, (2.0 * total.ln()).max(2.0))
            }
        };
        Ok(BoundCurve {
            family,
            weights,
            lambda_range,
        })
    }

    pub fn with_range(mut self, lo: f64, hi: f64) -> Result<BoundCurve> {
        if !(lo <= hi) {
            return input(format!("empty lambda range [{lo}, {hi}]"));
        }
        self.at(lo)?;
        self.at(hi)?;
        self.lambda_range = (lo, hi);
        Ok(self)
    }

    pub fn at(&self, lambda: f64) -> Result<(f64, f64)> {
        match self.family {
            Family::Poly { d } => poly_curve(d, &lambda),
            Family::Concave => concave_curve(&lambda),
            Family::Mixed { d } => mixed_curve(d, &lambda),
            Family::FairShare => {
                let (w_max, total) = self.weights.expect("checked at construction");
                fairshare_curve(lambda, w_max, total)
            }
        }
    }

    /// `(λ, α, β)` at `points` evenly spaced values of `λ` (at least two).
    pub fn sample(&self, points: usize) -> Result<Vec<(f64, f64, f64)>> {
        let points = points.max(2);
        let (lo, hi) = self.lambda_range;
        (0..points)
            .map(|k| {
                let lambda = if k + 1 == points {
                    hi
                } else {
                    lo + (hi - lo) * k as f64 / (points - 1) as f64
                };
                self.at(lambda).map(|(a, b)| (lambda, a, b))
            })
            .collect()
    }
}

/// Rule choosing goodness parameters for each resource of a game.
pub trait ParamAssignment<S: Scalar> {
    fn params_for(&self, game: &Game, cost: &CostSpec) -> Result<GoodnessParams<S>>;

    fn config(&self, game: &Game) -> Result<PotentialConfig<S>> {
        let params = game
            .resources()
            .iter()
            .map(|r| self.params_for(game, &r.cost))
            .collect::<Result<Vec<_>>>()?;
        PotentialConfig::new(game, params)
    }
}

/// The closed-form goodness parameters behind each family's curve.
#[derive(Clone, Debug, PartialEq)]
pub struct CatalogAssignment<S> {
    pub family: Family,
    pub lambda: S,
}

impl<S: Scalar> CatalogAssignment<S> {
    pub fn new(family: Family, lambda: S) -> Result<Self> {
        claimed_curve_check(family, &lambda)?;
        Ok(CatalogAssignment { family, lambda })
    }
}

fn claimed_curve_check<S: Scalar>(family: Family, lambda: &S) -> Result<()> {
    match family {
        Family::Poly { d } => poly_curve(d, lambda).map(|_| ()),
        Family::Concave => concave_curve(lambda).map(|_| ()),
        Family::Mixed { d } => mixed_curve(d, lambda).map(|_| ()),
        Family::FairShare => {
            if *lambda < S::one() {
                return input(format!(
                    "fair-share lambda must be at least 1, got {lambda}"
                ));
            }
            Ok(())
        }
    }
}

fn is_concave_member(cost: &CostSpec) -> bool {
    matches!(
        cost,
        CostSpec::PiecewiseLinear { .. }
            | CostSpec::ConcaveAnalytic { .. }
            | CostSpec::Monomial { degree: 1, .. }
    )
}

impl<S: Scalar> ParamAssignment<S> for CatalogAssignment<S> {
    fn params_for(&self, game: &Game, cost: &CostSpec) -> Result<GoodnessParams<S>> {
        let outside = || ForgeError::NotInFamily {
            cost: cost.to_string(),
            family: self.family.to_string(),
        };
        if matches!(cost, CostSpec::Conical { .. } | CostSpec::Polynomial { .. }) {
            return Err(crate::cost::not_atomic(cost));
        }
        match (self.family, cost) {
            (Family::FairShare, CostSpec::FairShare { cap, .. }) => {
                if game.w_min() < crate::numeric::Q::one() {
                    return input("fair-share parameters need w_min >= 1; rescale the weights");
                }
                fairshare_goodness(
                    &S::from_q(cap),
                    &S::from_q(&game.w_max()),
                    &S::from_q(&game.total_weight()),
                )
            }
            (Family::FairShare, _) => Err(outside()),
            (_, CostSpec::Constant { .. }) => Ok(constant_goodness()),
            (Family::Poly { d } | Family::Mixed { d }, CostSpec::Monomial { degree, .. })
                if *degree <= d =>
            {
                poly_rule(*degree, d, &self.lambda)
            }
            (Family::Concave, c) if is_concave_member(c) => {
                concave_goodness(concave_mu(&self.lambda))
            }
            (Family::Mixed { d }, c) if is_concave_member(c) => {
                if d == 1 {
                    concave_goodness(concave_mu(&self.lambda))
                } else {
                    concave_goodness(mixed_concave_mu(d, &self.lambda))
                }
            }
            _ => Err(outside()),
        }
    }
}

/// The family's curve at `lambda`, using the game's weights for fair sharing.
pub fn claimed_bounds<S: Scalar>(family: Family, lambda: &S, game: &Game) -> Result<(S, S)> {
    match family {
        Family::Poly { d } => poly_curve(d, lambda),
        Family::Concave => concave_curve(lambda),
        Family::Mixed { d } => mixed_curve(d, lambda),
        Family::FairShare => {
            let w_max = S::from_q(&game.w_max());
            let total = S::from_q(&game.total_weight());
            let p = fairshare_goodness(lambda, &w_max, &total)?;
            let beta =
                S::one() + transcendental(&total, "fair-share beta", f64::ln)? / lambda.clone();
            Ok((p.alpha2, beta))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::ConcaveKind;
    use crate::game::fixtures::{resources, unit_players, weighted_players};
    use crate::game::ProfileIter;
    use crate::numeric::{q_int, q_ratio, Q};

    #[test]
    fn compose_examples() {
        let lambda = q_int(2);
        let parts: Vec<GoodnessParams<Q>> = (0..=2)
            .map(|k| {
                if k == 0 {
                    Ok(constant_goodness())
                } else {
                    poly_rule(k, 2, &lambda)
                }
            })
            .collect::<Result<_>>()
            .unwrap();
        assert_eq!(compose(&parts).unwrap(), (q_int(2), q_ratio(3, 2)));
        assert_eq!(
            compose(&[concave_goodness(q_int(1)).unwrap()]).unwrap(),
            (q_ratio(3, 2), q_int(3))
        );
        assert_eq!(
            compose::<Q>(&[constant_goodness()]).unwrap(),
            (q_int(1), q_int(1))
        );
        assert!(compose::<Q>(&[]).is_err());
    }

    #[test]
    fn curve_examples() {
        assert_eq!(poly_curve(3, &q_int(3)).unwrap(), (q_int(3), q_ratio(4, 3)));
        assert_eq!(poly_curve(3, &q_int(4)).unwrap(), (q_int(4), q_int(1)));
        assert_eq!(
            poly_curve(2, &q_ratio(5, 2)).unwrap(),
            (q_ratio(5, 2), q_ratio(6, 5))
        );
        assert!(poly_curve(2, &q_int(4)).is_err());
        assert_eq!(
            concave_curve(&q_ratio(3, 2)).unwrap(),
            (q_ratio(3, 2), q_int(3))
        );
        assert_eq!(concave_curve(&q_int(2)).unwrap(), (q_int(2), q_int(2)));
        assert_eq!(
            concave_curve(&q_ratio(7, 4)).unwrap(),
            (q_ratio(7, 4), q_ratio(7, 3))
        );
        assert_eq!(
            mixed_curve(2, &q_int(2)).unwrap(),
            (q_int(2), q_ratio(5, 2))
        );
        assert_eq!(mixed_curve(2, &q_int(3)).unwrap(), (q_int(3), q_int(2)));
        assert_eq!(
            mixed_curve(4, &q_ratio(9, 2)).unwrap(),
            (q_ratio(9, 2), q_int(1) + q_ratio(10, 9))
        );
        assert_eq!(mixed_curve(1, &q_int(2)).unwrap(), (q_int(2), q_int(2)));
    }

    #[test]
    fn fairshare_curve_examples() {
        let (a, b) = fairshare_curve(1.0, 1.0, std::f64::consts::E).unwrap();
        assert!((a - 2.0 * 2f64.ln()).abs() < 1e-15 && (b - 2.0).abs() < 1e-15);
        let w = 37.0f64;
        assert!((fairshare_curve(w.ln(), 2.0, w).unwrap().1 - 2.0).abs() < 1e-15);
        let (a, b) = fairshare_curve(1.0, 10.0, 50.0).unwrap();
        assert!((a - 3.303).abs() < 1e-3 && (b - 4.912).abs() < 1e-3);
        assert!(fairshare_curve(0.5, 1.0, 2.0).is_err());
    }

    #[test]
    fn reference_curve_examples() {
        let t = chen_roughgarden_threshold(10.0);
        assert!((t - 4.902).abs() < 1e-3);
        let (a, _) = fairshare_curve(1.0, 10.0, 50.0).unwrap();
        assert!(a < t);
        let (f, b) = chen_roughgarden_reference(10.0, 50.0, 2.0 * t).unwrap();
        assert!((f - 9.804).abs() < 1e-3 && (b - 2.157).abs() < 1e-3, "{b}");
        assert!(chen_roughgarden_reference(10.0, 50.0, t).is_err());
    }

    #[test]
    fn decomposition_preserves_costs() {
        let two_terms = CostSpec::polynomial(vec![q_int(0), q_int(2), q_int(3)]);
        let mixed = CostSpec::conical(vec![
            (
                q_int(1),
                CostSpec::concave(ConcaveKind::Affine, q_int(1), q_int(1)),
            ),
            (q_int(1), CostSpec::monomial(2, q_int(1))),
        ]);
        let g = Game::new(
            weighted_players(&[q_int(1), q_ratio(3, 2)]),
            resources(vec![two_terms, mixed, CostSpec::constant(q_int(4))]),
            vec![vec![vec![0, 2], vec![1]], vec![vec![0, 1], vec![2]]],
        )
        .unwrap();
        let split = gadget_decompose(&g).unwrap();
        let ids: Vec<&str> = split.resources().iter().map(|r| r.id.as_str()).collect();
        assert_eq!(ids, ["e0#0", "e0#1", "e1#0", "e1#1", "e2"]);
        for p in ProfileIter::new(&g) {
            for i in 0..2 {
                assert_eq!(
                    g.player_cost::<Q>(&p, i).unwrap(),
                    split.player_cost::<Q>(&p, i).unwrap()
                );
            }
            assert_eq!(
                g.social_cost::<Q>(&p).unwrap(),
                split.social_cost::<Q>(&p).unwrap()
            );
        }
        let plain = Game::new(
            unit_players(1),
            resources(vec![CostSpec::constant(q_int(1))]),
            vec![vec![vec![0]]],
        )
        .unwrap();
        assert_eq!(gadget_decompose(&plain).unwrap(), plain);
    }

    #[test]
    fn catalog_assignment_matches_curves() {
        let g = Game::new(
            unit_players(2),
            resources(vec![
                CostSpec::constant(q_int(1)),
                CostSpec::monomial(1, q_int(2)),
                CostSpec::monomial(2, q_int(1)),
            ]),
            vec![vec![vec![0, 1, 2]]; 2],
        )
        .unwrap();
        let lambda = q_ratio(5, 2);
        let cfg = CatalogAssignment::new(Family::Poly { d: 2 }, lambda.clone())
            .unwrap()
            .config(&g)
            .unwrap();
        assert_eq!(
            compose(cfg.params()).unwrap(),
            poly_curve(2, &lambda).unwrap()
        );
        let err = CatalogAssignment::new(Family::Poly { d: 1 }, q_int(1))
            .unwrap()
            .config(&g);
        assert!(matches!(err, Err(ForgeError::NotInFamily { .. })));

        let poly = Game::new(
            unit_players(1),
            resources(vec![CostSpec::polynomial(vec![q_int(1), q_int(1)])]),
            vec![vec![vec![0]]],
        )
        .unwrap();
        assert!(CatalogAssignment::new(Family::Poly { d: 1 }, q_int(1))
            .unwrap()
            .config(&poly)
            .is_err());
    }

    #[test]
    fn concave_catalog_composes_to_curve() {
        let g = Game::new(
            unit_players(1),
            resources(vec![
                CostSpec::constant(q_int(1)),
                CostSpec::monomial(1, q_int(1)),
                CostSpec::concave(ConcaveKind::Affine, q_int(1), q_int(2)),
            ]),
            vec![vec![vec![0, 1, 2]]],
        )
        .unwrap();
        for lambda in [q_ratio(3, 2), q_ratio(7, 4), q_int(2)] {
            let cfg = CatalogAssignment::new(Family::Concave, lambda.clone())
                .unwrap()
                .config(&g)
                .unwrap();
            assert_eq!(
                compose(cfg.params()).unwrap(),
                concave_curve(&lambda).unwrap()
            );
        }
    }

    #[test]
    fn family_parsing() {
        assert_eq!("poly:3".parse::<Family>().unwrap(), Family::Poly { d: 3 });
        assert_eq!("fairshare".parse::<Family>().unwrap(), Family::FairShare);
        assert!("poly".parse::<Family>().is_err());
        assert!("cubic".parse::<Family>().is_err());
        assert_eq!(Family::Mixed { d: 2 }.to_string(), "mixed(d=2)");
    }

    #[test]
    fn curve_sampling() {
        let c = BoundCurve::new(Family::Poly { d: 2 }, None).unwrap();
        let pts = c.sample(3).unwrap();
        assert_eq!(pts, vec![(2.0, 2.0, 1.5), (2.5, 2.5, 1.2), (3.0, 3.0, 1.0)]);
        assert!(BoundCurve::new(Family::FairShare, None).is_err());
        let f = BoundCurve::new(Family::FairShare, Some((2.0, 10.0))).unwrap();
        assert_eq!(f.lambda_range.0, 1.0);
        assert!(c.with_range(2.0, 3.5).is_err());
    }
}
