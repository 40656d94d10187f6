//! The approximate potential `Φ(s) = Σ_e φ_e(N_e(s)) / α1_e` with
//! `φ_e(I) = ∫_0^{w_I} c_e + ξ_e·Σ_{i∈I} w_i·c_e(w_i)`, its two per-resource
//! sandwich conditions, minimization, and (α, β)-certification.

use std::collections::HashMap;

use serde::Serialize;

use crate::cost::CostSpec;
use crate::error::{input, ForgeError, Result};
use crate::game::{
    analysis::{approx_factor_with, optimum_with},
    CostTable, Game, Masks, Profile, ProfileIter, Settings,
};
use crate::goodness::GoodnessParams;
use crate::numeric::{le_tol, Extended, Scalar};

/// Strict-decrease margin for descent in float mode.
pub const DESCENT_EPSILON: f64 = 1e-12;

/// Zero-denominator tuples kept verbatim in a [`Lemma1Report`].
const MAX_REPORTED_ZEROS: usize = 32;

/// Per-resource goodness parameters driving the potential.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialConfig<S> {
    params: Vec<GoodnessParams<S>>,
}

impl<S: Scalar> PotentialConfig<S> {
    pub fn new(game: &Game, params: Vec<GoodnessParams<S>>) -> Result<Self> {
        if params.len() != game.n_resources() {
            return input(format!(
                "potential config covers {} resources, game has {}",
                params.len(),
                game.n_resources()
            ));
        }
        for (p, r) in params.iter().zip(game.resources()) {
            p.validate()
                .map_err(|e| ForgeError::Input(format!("resource `{}`: {e}", r.id)))?;
        }
        Ok(PotentialConfig { params })
    }

    pub fn uniform(game: &Game, params: GoodnessParams<S>) -> Result<Self> {
        Self::new(game, vec![params; game.n_resources()])
    }

    pub fn params(&self) -> &[GoodnessParams<S>] {
        &self.params
    }

    pub fn resource(&self, e: usize) -> &GoodnessParams<S> {
        &self.params[e]
    }
}

/// `φ_e(I)` for the players with the given weights; zero on the empty set.
pub fn phi_e<S: Scalar>(cost: &CostSpec, weights: &[S], xi: &S) -> Result<S> {
    if weights.iter().any(|w| *w <= S::zero()) {
        return input("player weights must be positive");
    }
    let mut total = S::zero();
    let mut solo = S::zero();
    for w in weights {
        total = total + w.clone();
        solo = solo + w.clone() * cost.evaluate(w)?;
    }
    Ok(cost.integrate(&S::zero(), &total)? + xi.clone() * solo)
}

/// `Φ(s)`.
pub fn potential<S: Scalar>(
    game: &Game,
    profile: &Profile,
    config: &PotentialConfig<S>,
) -> Result<S> {
    game.validate_profile(profile)?;
    check_cover(game, config)?;
    PotentialTable::new(game, config)?.value(&Masks::of(game, profile))
}

fn check_cover<S>(game: &Game, config: &PotentialConfig<S>) -> Result<()> {
    if config.params.len() != game.n_resources() {
        return input("potential config does not match the game's resources");
    }
    Ok(())
}

/// Memoized `φ_e(N)/α1_e` keyed by resource and player set.
pub struct PotentialTable<'g, S: Scalar> {
    game: &'g Game,
    config: &'g PotentialConfig<S>,
    weights: Vec<S>,
    memo: Vec<HashMap<u64, S>>,
}

impl<'g, S: Scalar> PotentialTable<'g, S> {
    pub fn new(game: &'g Game, config: &'g PotentialConfig<S>) -> Result<Self> {
        check_cover(game, config)?;
        // The cost table enforces the player-set width limit.
        let weights = CostTable::<S>::new(game)?.weights().to_vec();
        Ok(PotentialTable {
            game,
            config,
            weights,
            memo: vec![HashMap::new(); game.n_resources()],
        })
    }

    fn members(&self, mask: u64) -> Vec<S> {
        let mut out = Vec::with_capacity(mask.count_ones() as usize);
        let mut m = mask;
        while m != 0 {
            out.push(self.weights[m.trailing_zeros() as usize].clone());
            m &= m - 1;
        }
        out
    }

    /// `φ_e(N)/α1_e`.
    pub fn term(&mut self, e: usize, mask: u64) -> Result<S> {
        if mask == 0 {
            return Ok(S::zero());
        }
        if let Some(v) = self.memo[e].get(&mask) {
            return Ok(v.clone());
        }
        let p = &self.config.params[e];
        let phi = phi_e(&self.game.resources()[e].cost, &self.members(mask), &p.xi)?;
        let v = phi / p.alpha1.clone();
        self.memo[e].insert(mask, v.clone());
        Ok(v)
    }

    pub fn value(&mut self, masks: &Masks) -> Result<S> {
        let mut acc = S::zero();
        for (e, &m) in masks.0.iter().enumerate() {
            acc = acc + self.term(e, m)?;
        }
        Ok(acc)
    }

    /// `Φ(s′_i, s_{−i}) − Φ(s)` for player `i` switching to strategy `alt`.
    pub fn deviation_delta(
        &mut self,
        masks: &Masks,
        profile: &Profile,
        player: usize,
        alt: usize,
    ) -> Result<S> {
        let bit = 1u64 << player;
        let game = self.game;
        let from = &game.strategies(player)[profile.choice(player)];
        let to = &game.strategies(player)[alt];
        let mut delta = S::zero();
        for &e in to.iter().filter(|e| from.binary_search(e).is_err()) {
            let m = masks.get(e);
            delta = delta + self.term(e, m | bit)? - self.term(e, m)?;
        }
        for &e in from.iter().filter(|e| to.binary_search(e).is_err()) {
            let m = masks.get(e);
            delta = delta + self.term(e, m & !bit)? - self.term(e, m)?;
        }
        Ok(delta)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Lemma1Condition {
    /// `α1 ≤ (φ(I∪{i}) − φ(I)) / (w_i·c(w_I + w_i))`
    MarginalLower,
    /// `(φ(I∪{i}) − φ(I)) / (w_i·c(w_I + w_i)) ≤ α2`
    MarginalUpper,
    /// `β1 ≤ φ(I) / (w_I·c(w_I))`
    TotalLower,
    /// `φ(I) / (w_I·c(w_I)) ≤ β2`
    TotalUpper,
}

/// A `(resource, player, set)` tuple; `player` is absent for the total condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Lemma1Tuple {
    pub resource: String,
    pub player: Option<usize>,
    pub set: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lemma1Violation {
    pub tuple: Lemma1Tuple,
    pub condition: Lemma1Condition,
    /// Signed gap between the ratio and the violated bound.
    pub amount: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lemma1Report {
    pub passed: bool,
    /// Worst gap over all tuples; negative when every bound holds with room.
    pub worst_gap: f64,
    pub worst: Option<Lemma1Violation>,
    pub violations: usize,
    pub marginal_tuples: usize,
    pub total_tuples: usize,
    /// Range of the marginal ratio over all tuples with a positive denominator.
    pub marginal_range: Option<(f64, f64)>,
    pub total_range: Option<(f64, f64)>,
    pub zero_denominators: usize,
    pub zero_denominator_samples: Vec<Lemma1Tuple>,
}

fn set_of(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask >> i & 1 == 1).collect()
}

fn widen(range: &mut Option<(f64, f64)>, v: f64) {
    *range = Some(match *range {
        None => (v, v),
        Some((lo, hi)) => (lo.min(v), hi.max(v)),
    });
}

struct Lemma1Scan {
    report: Lemma1Report,
    tol: f64,
}

impl Lemma1Scan {
    fn record<S: Scalar>(
        &mut self,
        ratio: &S,
        params: (&S, &S),
        tuple: impl Fn() -> Lemma1Tuple,
        conds: (Lemma1Condition, Lemma1Condition),
    ) {
        let (lo, hi) = params;
        let tol = S::tolerance(self.tol);
        for (ok, gap, cond) in [
            (
                le_tol(lo, ratio, &tol),
                lo.to_f64() - ratio.to_f64(),
                conds.0,
            ),
            (
                le_tol(ratio, hi, &tol),
                ratio.to_f64() - hi.to_f64(),
                conds.1,
            ),
        ] {
            let r = &mut self.report;
            let replace = r.worst.is_none() || gap > r.worst_gap;
            if !ok {
                r.violations += 1;
                r.passed = false;
            }
            if replace {
                r.worst_gap = gap;
                r.worst = Some(Lemma1Violation {
                    tuple: tuple(),
                    condition: cond,
                    amount: gap,
                });
            }
        }
    }

    fn zero(&mut self, tuple: Lemma1Tuple) {
        self.report.zero_denominators += 1;
        if self.report.zero_denominator_samples.len() < MAX_REPORTED_ZEROS {
            self.report.zero_denominator_samples.push(tuple);
        }
    }
}

/// Checks both per-resource conditions over every player subset.
///
/// Tuples with a zero denominator are skipped and reported.
pub fn verify_lemma1_conditions<S: Scalar>(
    game: &Game,
    config: &PotentialConfig<S>,
    settings: &Settings,
) -> Result<Lemma1Report> {
    check_cover(game, config)?;
    let n = game.n_players();
    if n > settings.max_subset_players {
        return Err(ForgeError::Capacity {
            what: "player-subset enumeration",
            required: n as u128,
            cap: settings.max_subset_players as u128,
        });
    }
    let weights: Vec<S> = game
        .players()
        .iter()
        .map(|p| S::from_q(&p.weight))
        .collect();
    let full = 1u64 << n;
    let mut scan = Lemma1Scan {
        report: Lemma1Report {
            passed: true,
            worst_gap: f64::NEG_INFINITY,
            worst: None,
            violations: 0,
            marginal_tuples: 0,
            total_tuples: 0,
            marginal_range: None,
            total_range: None,
            zero_denominators: 0,
            zero_denominator_samples: Vec::new(),
        },
        tol: settings.tolerance,
    };

    for (e, resource) in game.resources().iter().enumerate() {
        let cost = &resource.cost;
        let p = config.resource(e);
        let mut phi = Vec::with_capacity(full as usize);
        let mut load = Vec::with_capacity(full as usize);
        for mask in 0..full {
            let members: Vec<S> = set_of(mask)
                .into_iter()
                .map(|i| weights[i].clone())
                .collect();
            load.push(members.iter().fold(S::zero(), |a, w| a + w.clone()));
            phi.push(phi_e(cost, &members, &p.xi)?);
        }
        let mut unit = HashMap::new();
        let mut cost_at = |mask: u64| -> Result<S> {
            if let Some(v) = unit.get(&mask) {
                return Ok(S::clone(v));
            }
            let v = cost.evaluate(&load[mask as usize])?;
            unit.insert(mask, v.clone());
            Ok(v)
        };

        for mask in 1..full {
            scan.report.total_tuples += 1;
            let tuple = || Lemma1Tuple {
                resource: resource.id.clone(),
                player: None,
                set: set_of(mask),
            };
            let denom = load[mask as usize].clone() * cost_at(mask)?;
            if denom <= S::zero() {
                scan.zero(tuple());
                continue;
            }
            let ratio = phi[mask as usize].clone() / denom;
            widen(&mut scan.report.total_range, ratio.to_f64());
            scan.record(
                &ratio,
                (&p.beta1, &p.beta2),
                tuple,
                (Lemma1Condition::TotalLower, Lemma1Condition::TotalUpper),
            );
        }

        for (i, w) in weights.iter().enumerate() {
            let bit = 1u64 << i;
            for mask in (0..full).filter(|m| m & bit == 0) {
                scan.report.marginal_tuples += 1;
                let tuple = || Lemma1Tuple {
                    resource: resource.id.clone(),
                    player: Some(i),
                    set: set_of(mask),
                };
                let denom = w.clone() * cost_at(mask | bit)?;
                if denom <= S::zero() {
                    scan.zero(tuple());
                    continue;
                }
                let ratio =
                    (phi[(mask | bit) as usize].clone() - phi[mask as usize].clone()) / denom;
                widen(&mut scan.report.marginal_range, ratio.to_f64());
                scan.record(
                    &ratio,
                    (&p.alpha1, &p.alpha2),
                    tuple,
                    (
                        Lemma1Condition::MarginalLower,
                        Lemma1Condition::MarginalUpper,
                    ),
                );
            }
        }
    }
    if scan.report.worst.is_none() {
        scan.report.worst_gap = 0.0;
    }
    Ok(scan.report)
}

/// Global minimizer of `Φ`; the lexicographically first one on ties.
pub fn minimize_potential_exhaustive<S: Scalar>(
    game: &Game,
    config: &PotentialConfig<S>,
    settings: &Settings,
) -> Result<(Profile, S)> {
    let mut table = PotentialTable::new(game, config)?;
    let mut best: Option<(Profile, S)> = None;
    for p in ProfileIter::capped(game, settings.max_profiles)? {
        let v = table.value(&Masks::of(game, &p))?;
        if best.as_ref().is_none_or(|(_, b)| v < *b) {
            best = Some((p, v));
        }
    }
    Ok(best.expect("at least one profile exists"))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveRule {
    #[default]
    BestImprovement,
    FirstImprovement,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DescentResult<S> {
    pub profile: Profile,
    pub potential: S,
    pub moves: usize,
}

/// Unilateral moves that strictly lower `Φ` until none remains.
///
/// In float mode a move must lower `Φ` by more than `DESCENT_EPSILON` relative
/// to `max(1, |Φ|)`. Best improvement takes the steepest move over all players;
/// ties go to the lowest player and strategy index.
pub fn potential_descent<S: Scalar>(
    game: &Game,
    config: &PotentialConfig<S>,
    start: &Profile,
    rule: MoveRule,
) -> Result<DescentResult<S>> {
    game.validate_profile(start)?;
    let mut table = PotentialTable::new(game, config)?;
    let mut profile = start.clone();
    let mut masks = Masks::of(game, &profile);
    let mut value = table.value(&masks)?;
    let mut moves = 0;
    loop {
        let scale = if value.abs() > S::one() {
            value.abs()
        } else {
            S::one()
        };
        let threshold = -(S::tolerance(DESCENT_EPSILON) * scale);
        let mut chosen: Option<(usize, usize, S)> = None;
        'players: for i in 0..game.n_players() {
            for alt in 0..game.strategies(i).len() {
                if alt == profile.choice(i) {
                    continue;
                }
                let delta = table.deviation_delta(&masks, &profile, i, alt)?;
                if delta >= threshold {
                    continue;
                }
                let better = chosen.as_ref().is_none_or(|(_, _, d)| delta < *d);
                if better {
                    chosen = Some((i, alt, delta));
                    if rule == MoveRule::FirstImprovement {
                        break 'players;
                    }
                }
            }
        }
        let Some((i, alt, _)) = chosen else { break };
        profile = profile.with_choice(i, alt);
        masks = Masks::of(game, &profile);
        value = table.value(&masks)?;
        moves += 1;
    }
    Ok(DescentResult {
        profile,
        potential: value,
        moves,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquilibriumCertificate<S> {
    pub profile: Profile,
    /// Tightest approximation factor of the profile.
    pub alpha: Extended<S>,
    /// `C(s) / OPT`; infinite when `OPT = 0 < C(s)`.
    pub beta: Extended<S>,
    pub social_cost: S,
    pub optimum: S,
    pub optimal_profile: Profile,
    pub deviations_checked: usize,
    pub passed: bool,
}

/// Checks `profile` against claimed `(alpha, beta)` by exhaustive evaluation.
pub fn certify<S: Scalar>(
    game: &Game,
    profile: &Profile,
    alpha: &Extended<S>,
    beta: &Extended<S>,
    settings: &Settings,
) -> Result<EquilibriumCertificate<S>> {
    game.validate_profile(profile)?;
    let mut table = CostTable::<S>::new(game)?;
    let (optimal_profile, optimum) = optimum_with(&mut table, settings)?;
    let (factor, deviations_checked) = approx_factor_with(&mut table, profile)?;
    let social_cost = table.social_cost(&Masks::of(game, profile))?;
    let ratio = if optimum > S::zero() {
        Extended::Finite(social_cost.clone() / optimum.clone())
    } else if social_cost > S::zero() {
        Extended::Infinite
    } else {
        Extended::Finite(S::one())
    };
    let tol = S::tolerance(settings.tolerance);
    let passed = factor.le_tol(alpha, &tol) && ratio.le_tol(beta, &tol);
    Ok(EquilibriumCertificate {
        profile: profile.clone(),
        alpha: factor,
        beta: ratio,
        social_cost,
        optimum,
        optimal_profile,
        deviations_checked,
        passed,
    })
}
