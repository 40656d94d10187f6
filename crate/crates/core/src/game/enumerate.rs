use crate::error::{ForgeError, Result};

use super::{Game, Profile};

/// `Π |S_i|`, failing when it exceeds `cap`.
pub fn profile_count(game: &Game, cap: u128) -> Result<u128> {
    let mut count: u128 = 1;
    for set in game.all_strategies() {
        count = count.saturating_mul(set.len() as u128);
        if count > cap {
            return Err(ForgeError::Capacity {
                what: "profile enumeration",
                required: game
                    .all_strategies()
                    .iter()
                    .fold(1u128, |a, s| a.saturating_mul(s.len() as u128)),
                cap,
            });
        }
    }
    Ok(count)
}

/// All profiles in lexicographic order of their index vectors.
pub struct ProfileIter {
    sizes: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl ProfileIter {
    pub fn new(game: &Game) -> Self {
        let sizes: Vec<usize> = game.all_strategies().iter().map(Vec::len).collect();
        ProfileIter {
            next: Some(vec![0; sizes.len()]),
            sizes,
        }
    }

    /// Like [`ProfileIter::new`] but checks the enumeration cap first.
    pub fn capped(game: &Game, cap: u128) -> Result<Self> {
        profile_count(game, cap)?;
        Ok(Self::new(game))
    }
}

impl Iterator for ProfileIter {
    type Item = Profile;

    fn next(&mut self) -> Option<Profile> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut pos = succ.len();
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            succ[pos] += 1;
            if succ[pos] < self.sizes[pos] {
                self.next = Some(succ);
                break;
            }
            succ[pos] = 0;
        }
        Some(Profile(current))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::CostSpec;
    use crate::game::fixtures::parallel_links;
    use crate::numeric::q_int;

    #[test]
    fn enumerates_in_lexicographic_order() {
        let g = parallel_links(2, 3, CostSpec::constant(q_int(1)));
        let all: Vec<Profile> = ProfileIter::new(&g).collect();
        assert_eq!(all.len(), 9);
        assert_eq!(all[0], Profile(vec![0, 0]));
        assert_eq!(all[1], Profile(vec![0, 1]));
        assert_eq!(all[8], Profile(vec![2, 2]));
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn cap_is_enforced() {
        let g = parallel_links(3, 4, CostSpec::constant(q_int(1)));
        assert_eq!(profile_count(&g, 64).unwrap(), 64);
        match profile_count(&g, 63) {
            Err(ForgeError::Capacity { cap, required, .. }) => {
                assert_eq!(cap, 63);
                assert_eq!(required, 64);
            }
            other => panic!("expected capacity error, got {other:?}"),
        }
    }
}
