use num::Zero;

use crate::coalition::Coalition;
use crate::error::{Error, Result};
use crate::game::{PlayerSet, WorthOracle};
use crate::rational::Rational;

/// `{pattern} → value`: applies to `S` when every positive literal is in `S`
/// and no negative literal is.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub pos: Coalition,
    pub neg: Coalition,
    pub value: Rational,
}

impl Rule {
    pub fn applies_to(&self, s: Coalition) -> bool {
        self.pos.is_subset_of(s) && self.neg.is_disjoint(s)
    }
}

/// Marginal-contribution net. Worth of `S` is the sum of the values of the
/// rules that apply to it, zero if none does.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct McNet {
    players: PlayerSet,
    rules: Vec<Rule>,
}

impl McNet {
    pub fn new(players: PlayerSet, rules: Vec<Rule>) -> Result<Self> {
        let grand = players.grand();
        for (k, r) in rules.iter().enumerate() {
            if !r.pos.union(r.neg).is_subset_of(grand) {
                return Err(Error::InvalidGame(format!("rule {k} mentions an unknown player")));
            }
            if !r.pos.is_disjoint(r.neg) {
                return Err(Error::InvalidGame(format!(
                    "rule {k} uses a player both positively and negatively"
                )));
            }
            // an always-firing rule would silently shift every worth, v(∅) included
            if r.pos.is_empty() && r.neg.is_empty() {
                return Err(Error::InvalidGame(format!("rule {k} has an empty pattern")));
            }
        }
        Ok(McNet { players, rules })
    }

    pub fn players(&self) -> &PlayerSet {
        &self.players
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }
}

impl WorthOracle for McNet {
    fn player_count(&self) -> usize {
        self.players.len()
    }

    fn worth(&self, s: Coalition) -> Rational {
        // ∅ is pinned to zero even when purely negative rules would fire on it
        if s.is_empty() {
            return Rational::zero();
        }
        self.rules
            .iter()
            .filter(|r| r.applies_to(s))
            .fold(Rational::zero(), |acc, r| acc + &r.value)
    }
}
