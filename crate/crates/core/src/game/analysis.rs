//! Exhaustive equilibrium quantities: optimum, approximation factor, α-PoS.

use std::collections::BTreeSet;

use num_traits::Zero;

use crate::error::{ForgeError, Result};
use crate::numeric::{Extended, Scalar, Q};

use super::{CostTable, Game, Masks, Profile, ProfileIter, Settings};

/// `OPT(G)` with its lexicographically first witness.
pub fn optimum<S: Scalar>(game: &Game, settings: &Settings) -> Result<(Profile, S)> {
    let mut table = CostTable::<S>::new(game)?;
    optimum_with(&mut table, settings)
}

pub(crate) fn optimum_with<S: Scalar>(
    table: &mut CostTable<'_, S>,
    settings: &Settings,
) -> Result<(Profile, S)> {
    let game = table.game();
    let mut best: Option<(Profile, S)> = None;
    for p in ProfileIter::capped(game, settings.max_profiles)? {
        let cost = table.social_cost(&Masks::of(game, &p))?;
        if best.as_ref().is_none_or(|(_, b)| cost < *b) {
            best = Some((p, cost));
        }
    }
    Ok(best.expect("at least one profile exists"))
}

/// Smallest `α` for which `profile` is an α-approximate equilibrium.
///
/// Zero-cost deviations from a positive cost give [`Extended::Infinite`].
pub fn approx_factor<S: Scalar>(game: &Game, profile: &Profile) -> Result<Extended<S>> {
    game.validate_profile(profile)?;
    let mut table = CostTable::<S>::new(game)?;
    Ok(approx_factor_with(&mut table, profile)?.0)
}

/// Returns the factor and the number of unilateral deviations inspected.
pub(crate) fn approx_factor_with<S: Scalar>(
    table: &mut CostTable<'_, S>,
    profile: &Profile,
) -> Result<(Extended<S>, usize)> {
    let game = table.game();
    let masks = Masks::of(game, profile);
    let mut factor = Extended::Finite(S::one());
    let mut checked = 0;
    for i in 0..game.n_players() {
        let current = table.player_cost(&masks, i, profile.choice(i))?;
        for alt in 0..game.strategies(i).len() {
            if alt == profile.choice(i) {
                continue;
            }
            checked += 1;
            if current.is_zero() {
                continue;
            }
            let deviation = table.player_cost(&masks, i, alt)?;
            let ratio = if deviation.is_zero() {
                Extended::Infinite
            } else {
                Extended::Finite(current.clone() / deviation)
            };
            factor = factor.max(ratio);
        }
    }
    Ok((factor, checked))
}

#[derive(Clone, Debug, PartialEq)]
pub struct PosResult<S> {
    /// `min_{s ∈ NE_α} C(s) / OPT`.
    pub ratio: S,
    pub best_equilibrium: Profile,
    pub equilibrium_cost: S,
    pub optimum: S,
    /// `|NE_α|` among enumerated profiles.
    pub equilibria: usize,
}

/// α-approximate price of stability by full enumeration.
pub fn pos_alpha<S: Scalar>(
    game: &Game,
    alpha: &Extended<S>,
    settings: &Settings,
) -> Result<PosResult<S>> {
    let mut table = CostTable::<S>::new(game)?;
    let (_, opt) = optimum_with(&mut table, settings)?;
    if opt.is_zero() {
        return Err(ForgeError::ZeroOptimum);
    }
    let tol = S::tolerance(settings.tolerance);
    let mut best: Option<(Profile, S)> = None;
    let mut equilibria = 0;
    for p in ProfileIter::new(game) {
        let (factor, _) = approx_factor_with(&mut table, &p)?;
        if !factor.le_tol(alpha, &tol) {
            continue;
        }
        equilibria += 1;
        let cost = table.social_cost(&Masks::of(game, &p))?;
        if best.as_ref().is_none_or(|(_, b)| cost < *b) {
            best = Some((p, cost));
        }
    }
    let (profile, cost) = best.ok_or_else(|| ForgeError::EmptyEquilibriumSet(alpha.to_string()))?;
    Ok(PosResult {
        ratio: cost.clone() / opt.clone(),
        best_equilibrium: profile,
        equilibrium_cost: cost,
        optimum: opt,
        equilibria,
    })
}

/// The set of subset sums of player weights, sorted.
pub fn reachable_loads(game: &Game, max_players: usize) -> Result<Vec<Q>> {
    if game.n_players() > max_players {
        return Err(ForgeError::Capacity {
            what: "subset-sum enumeration",
            required: game.n_players() as u128,
            cap: max_players as u128,
        });
    }
    let mut sums: BTreeSet<Q> = BTreeSet::from([Q::zero()]);
    for p in game.players() {
        let shifted: Vec<Q> = sums.iter().map(|s| s + &p.weight).collect();
        sums.extend(shifted);
    }
    Ok(sums.into_iter().collect())
}
