//! Weighted congestion games: players, resources, explicit strategy sets.

pub(crate) mod analysis;
mod enumerate;
mod eval;

use std::collections::HashMap;
use std::fmt;

use indexmap::IndexMap;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::cost::CostSpec;
use crate::error::{input, Result};
use crate::numeric::{le_tol, q_string, Scalar, Q};

pub use analysis::{approx_factor, optimum, pos_alpha, reachable_loads, PosResult};
pub use enumerate::{profile_count, ProfileIter};
pub use eval::{CostTable, Masks};

/// JSON schema version written by [`Game::to_json`].
pub const GAME_FORMAT_VERSION: u32 = 1;

/// Enumeration caps and float tolerance shared by the exhaustive routines.
#[derive(Clone, Debug, PartialEq)]
pub struct Settings {
    /// Maximum number of profiles any exhaustive routine may visit.
    pub max_profiles: u128,
    /// Maximum number of players for routines that enumerate player subsets.
    pub max_subset_players: usize,
    /// Relative tolerance for float-mode comparisons (ignored in rational mode).
    pub tolerance: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            max_profiles: 2_000_000,
            max_subset_players: 16,
            tolerance: crate::numeric::DEFAULT_TOLERANCE,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Player {
    pub id: String,
    #[serde(with = "q_string")]
    pub weight: Q,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Resource {
    pub id: String,
    pub cost: CostSpec,
}

/// A strategy: sorted, deduplicated resource indices.
pub type Strategy = Vec<usize>;

/// One strategy index per player.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Profile(pub Vec<usize>);

impl Profile {
    pub fn choice(&self, player: usize) -> usize {
        self.0[player]
    }

    pub fn with_choice(&self, player: usize, strategy: usize) -> Profile {
        let mut next = self.0.clone();
        next[player] = strategy;
        Profile(next)
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Game {
    players: Vec<Player>,
    resources: Vec<Resource>,
    strategies: Vec<Vec<Strategy>>,
}

/// On-disk layout of a game instance.
#[derive(Serialize, Deserialize)]
struct GameFile {
    version: u32,
    players: Vec<Player>,
    resources: Vec<Resource>,
    strategies: IndexMap<String, Vec<Vec<String>>>,
}

impl Game {
    pub fn new(
        players: Vec<Player>,
        resources: Vec<Resource>,
        strategies: Vec<Vec<Strategy>>,
    ) -> Result<Game> {
        if players.is_empty() {
            return input("a game needs at least one player");
        }
        if strategies.len() != players.len() {
            return input(format!(
                "{} players but {} strategy sets",
                players.len(),
                strategies.len()
            ));
        }
        let mut seen = HashMap::new();
        for p in &players {
            if !p.weight.is_positive() {
                return input(format!("player `{}` has nonpositive weight", p.id));
            }
            if seen.insert(p.id.as_str(), ()).is_some() {
                return input(format!("duplicate player id `{}`", p.id));
            }
        }
        let mut seen = HashMap::new();
        for r in &resources {
            r.cost.validate()?;
            if seen.insert(r.id.as_str(), ()).is_some() {
                return input(format!("duplicate resource id `{}`", r.id));
            }
        }
        let mut normalized = Vec::with_capacity(strategies.len());
        for (i, set) in strategies.into_iter().enumerate() {
            if set.is_empty() {
                return input(format!("player `{}` has no strategies", players[i].id));
            }
            let mut cleaned = Vec::with_capacity(set.len());
            for mut s in set {
                if let Some(bad) = s.iter().find(|&&e| e >= resources.len()) {
                    return input(format!(
                        "player `{}` references unknown resource index {bad}",
                        players[i].id
                    ));
                }
                s.sort_unstable();
                s.dedup();
                cleaned.push(s);
            }
            normalized.push(cleaned);
        }
        Ok(Game {
            players,
            resources,
            strategies: normalized,
        })
    }

    pub fn players(&self) -> &[Player] {
        &self.players
    }

    pub fn resources(&self) -> &[Resource] {
        &self.resources
    }

    pub fn strategies(&self, player: usize) -> &[Strategy] {
        &self.strategies[player]
    }

    pub fn all_strategies(&self) -> &[Vec<Strategy>] {
        &self.strategies
    }

    pub fn n_players(&self) -> usize {
        self.players.len()
    }

    pub fn n_resources(&self) -> usize {
        self.resources.len()
    }

    pub fn weight(&self, player: usize) -> &Q {
        &self.players[player].weight
    }

    pub fn resource_index(&self, id: &str) -> Result<usize> {
        self.resources
            .iter()
            .position(|r| r.id == id)
            .ok_or_else(|| crate::error::ForgeError::Input(format!("unknown resource id `{id}`")))
    }

    pub fn w_min(&self) -> Q {
        self.players
            .iter()
            .map(|p| p.weight.clone())
            .min()
            .expect("nonempty")
    }

    pub fn w_max(&self) -> Q {
        self.players
            .iter()
            .map(|p| p.weight.clone())
            .max()
            .expect("nonempty")
    }

    /// `W`, the sum of all weights.
    pub fn total_weight(&self) -> Q {
        self.players
            .iter()
            .fold(Q::zero(), |acc, p| acc + &p.weight)
    }

    pub fn validate_profile(&self, profile: &Profile) -> Result<()> {
        if profile.0.len() != self.n_players() {
            return input(format!(
                "profile has {} entries for {} players",
                profile.0.len(),
                self.n_players()
            ));
        }
        for (i, &c) in profile.0.iter().enumerate() {
            if c >= self.strategies[i].len() {
                return input(format!(
                    "player `{}` has {} strategies, profile picks {c}",
                    self.players[i].id,
                    self.strategies[i].len()
                ));
            }
        }
        Ok(())
    }

    /// The strategy player `i` plays in `profile`.
    pub fn chosen(&self, profile: &Profile, player: usize) -> &Strategy {
        &self.strategies[player][profile.0[player]]
    }

    /// `x_e(s)`: total weight of players using resource `e`.
    pub fn load<S: Scalar>(&self, profile: &Profile, resource: usize) -> Result<S> {
        self.validate_profile(profile)?;
        if resource >= self.n_resources() {
            return input(format!("unknown resource index {resource}"));
        }
        Ok(self.load_unchecked(profile, resource))
    }

    pub fn load_by_id<S: Scalar>(&self, profile: &Profile, resource: &str) -> Result<S> {
        self.load(profile, self.resource_index(resource)?)
    }

    fn load_unchecked<S: Scalar>(&self, profile: &Profile, resource: usize) -> S {
        (0..self.n_players())
            .filter(|&i| self.chosen(profile, i).binary_search(&resource).is_ok())
            .fold(S::zero(), |acc, i| acc + S::from_q(self.weight(i)))
    }

    fn loads<S: Scalar>(&self, profile: &Profile) -> Vec<S> {
        let mut loads = vec![S::zero(); self.n_resources()];
        for i in 0..self.n_players() {
            let w = S::from_q(self.weight(i));
            for &e in self.chosen(profile, i) {
                loads[e] = loads[e].clone() + w.clone();
            }
        }
        loads
    }

    /// `C_i(s) = Σ_{e ∈ s_i} c_e(x_e(s))`.
    pub fn player_cost<S: Scalar>(&self, profile: &Profile, player: usize) -> Result<S> {
        self.validate_profile(profile)?;
        if player >= self.n_players() {
            return input(format!("unknown player index {player}"));
        }
        let loads = self.loads::<S>(profile);
        let mut acc = S::zero();
        for &e in self.chosen(profile, player) {
            acc = acc + self.resources[e].cost.evaluate(&loads[e])?;
        }
        Ok(acc)
    }

    /// `C(s) = Σ_e x_e c_e(x_e)`, cross-checked against `Σ_i w_i C_i(s)`.
    pub fn social_cost<S: Scalar>(&self, profile: &Profile) -> Result<S> {
        self.validate_profile(profile)?;
        let loads = self.loads::<S>(profile);
        let mut unit = Vec::with_capacity(loads.len());
        let mut by_resource = S::zero();
        for (e, x) in loads.iter().enumerate() {
            let c = if x.is_zero() {
                S::zero()
            } else {
                self.resources[e].cost.evaluate(x)?
            };
            by_resource = by_resource + x.clone() * c.clone();
            unit.push(c);
        }
        let by_player = (0..self.n_players()).fold(S::zero(), |acc, i| {
            let ci = self
                .chosen(profile, i)
                .iter()
                .fold(S::zero(), |a, &e| a + unit[e].clone());
            acc + S::from_q(self.weight(i)) * ci
        });
        let tol = S::tolerance(1e-9);
        debug_assert!(
            le_tol(&by_player, &by_resource, &tol) && le_tol(&by_resource, &by_player, &tol),
            "social cost formulas disagree: {by_resource} vs {by_player}"
        );
        Ok(by_resource)
    }

    /// Copy of the game with every fair-share cost's cap replaced by `cap`.
    pub fn with_fairshare_cap(&self, cap: &Q) -> Game {
        fn recap(c: &CostSpec, cap: &Q) -> CostSpec {
            match c {
                CostSpec::FairShare { a, .. } => CostSpec::FairShare {
                    a: a.clone(),
                    cap: cap.clone(),
                },
                CostSpec::Conical { terms } => CostSpec::Conical {
                    terms: terms
                        .iter()
                        .map(|t| crate::cost::ConicalTerm {
                            coeff: t.coeff.clone(),
                            cost: recap(&t.cost, cap),
                        })
                        .collect(),
                },
                other => other.clone(),
            }
        }
        let mut g = self.clone();
        for r in &mut g.resources {
            r.cost = recap(&r.cost, cap);
        }
        g
    }

    /// Replaces the resource list, keeping players and strategies.
    pub(crate) fn with_resources(
        &self,
        resources: Vec<Resource>,
        strategies: Vec<Vec<Strategy>>,
    ) -> Result<Game> {
        Game::new(self.players.clone(), resources, strategies)
    }

    pub fn from_json(text: &str) -> Result<Game> {
        let file: GameFile = serde_json::from_str(text)?;
        if file.version != GAME_FORMAT_VERSION {
            return input(format!("unsupported game format version {}", file.version));
        }
        let resource_ids: HashMap<&str, usize> = file
            .resources
            .iter()
            .enumerate()
            .map(|(k, r)| (r.id.as_str(), k))
            .collect();
        for pid in file.strategies.keys() {
            if !file.players.iter().any(|p| &p.id == pid) {
                return input(format!("strategies given for unknown player `{pid}`"));
            }
        }
        let mut strategies = Vec::with_capacity(file.players.len());
        for p in &file.players {
            let Some(sets) = file.strategies.get(&p.id) else {
                return input(format!("player `{}` has no strategy entry", p.id));
            };
            let mut parsed = Vec::with_capacity(sets.len());
            for set in sets {
                let mut s = Vec::with_capacity(set.len());
                for rid in set {
                    match resource_ids.get(rid.as_str()) {
                        Some(&k) => s.push(k),
                        None => {
                            return input(format!(
                                "player `{}` uses unknown resource `{rid}`",
                                p.id
                            ))
                        }
                    }
                }
                parsed.push(s);
            }
            strategies.push(parsed);
        }
        Game::new(file.players, file.resources, strategies)
    }

    pub fn to_json(&self) -> Result<String> {
        let strategies = self
            .players
            .iter()
            .zip(&self.strategies)
            .map(|(p, sets)| {
                let named = sets
                    .iter()
                    .map(|s| s.iter().map(|&e| self.resources[e].id.clone()).collect())
                    .collect();
                (p.id.clone(), named)
            })
            .collect();
        let file = GameFile {
            version: GAME_FORMAT_VERSION,
            players: self.players.clone(),
            resources: self.resources.clone(),
            strategies,
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    /// True when every cost evaluates and integrates exactly over rationals.
    pub fn is_exact(&self) -> bool {
        self.resources.iter().all(|r| r.cost.is_exact())
    }
}
