//! Memoized evaluation keyed by the set of players on a resource.
//!
//! Costs on resource `e` only depend on `N_e(s)`, so exhaustive routines cache
//! per-`(e, N_e)` values and never recompute a load twice.

use std::collections::HashMap;

use crate::error::{ForgeError, Result};
use crate::numeric::Scalar;

use super::{Game, Profile};

/// Largest player count representable in a `u64` player set.
pub const MAX_MASK_PLAYERS: usize = 64;

/// Per-resource player sets `N_e(s)` as bitmasks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Masks(pub Vec<u64>);

impl Masks {
    pub fn of(game: &Game, profile: &Profile) -> Masks {
        let mut masks = vec![0u64; game.n_resources()];
        for i in 0..game.n_players() {
            for &e in game.chosen(profile, i) {
                masks[e] |= 1 << i;
            }
        }
        Masks(masks)
    }

    pub fn get(&self, resource: usize) -> u64 {
        self.0[resource]
    }
}

pub struct CostTable<'g, S: Scalar> {
    game: &'g Game,
    weights: Vec<S>,
    // (c_e(x), x·c_e(x)) keyed by the user set
    memo: Vec<HashMap<u64, (S, S)>>,
}

impl<'g, S: Scalar> CostTable<'g, S> {
    pub fn new(game: &'g Game) -> Result<Self> {
        if game.n_players() > MAX_MASK_PLAYERS {
            return Err(ForgeError::Capacity {
                what: "player-set evaluation",
                required: game.n_players() as u128,
                cap: MAX_MASK_PLAYERS as u128,
            });
        }
        Ok(CostTable {
            game,
            weights: game
                .players()
                .iter()
                .map(|p| S::from_q(&p.weight))
                .collect(),
            memo: vec![HashMap::new(); game.n_resources()],
        })
    }

    pub fn game(&self) -> &'g Game {
        self.game
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    /// `w_I` for the player set `mask`.
    pub fn mask_weight(&self, mask: u64) -> S {
        let mut acc = S::zero();
        let mut m = mask;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            acc = acc + self.weights[i].clone();
            m &= m - 1;
        }
        acc
    }

    fn entry(&mut self, resource: usize, mask: u64) -> Result<&(S, S)> {
        if !self.memo[resource].contains_key(&mask) {
            let x = self.mask_weight(mask);
            let c = self.game.resources()[resource].cost.evaluate(&x)?;
            let contribution = x * c.clone();
            self.memo[resource].insert(mask, (c, contribution));
        }
        Ok(&self.memo[resource][&mask])
    }

    /// `c_e(w_I)`.
    pub fn unit_cost(&mut self, resource: usize, mask: u64) -> Result<S> {
        Ok(self.entry(resource, mask)?.0.clone())
    }

    /// `C_i` if player `i` plays strategy `strategy` against `masks`.
    pub fn player_cost(&mut self, masks: &Masks, player: usize, strategy: usize) -> Result<S> {
        let bit = 1u64 << player;
        let game = self.game;
        let mut acc = S::zero();
        for &e in &game.strategies(player)[strategy] {
            acc = acc + self.unit_cost(e, masks.get(e) | bit)?;
        }
        Ok(acc)
    }

    /// `C(s) = Σ_e x_e c_e(x_e)`.
    pub fn social_cost(&mut self, masks: &Masks) -> Result<S> {
        let mut acc = S::zero();
        for (e, &mask) in masks.0.iter().enumerate() {
            if mask != 0 {
                acc = acc + self.entry(e, mask)?.1.clone();
            }
        }
        Ok(acc)
    }
}
