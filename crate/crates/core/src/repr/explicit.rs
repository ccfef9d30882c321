use num::Zero;

use crate::coalition::Coalition;
use crate::error::{Error, Result};
use crate::game::{PlayerSet, WorthOracle};
use crate::rational::Rational;

/// Player cap for fully tabulated games.
pub const EXPLICIT_MAX_PLAYERS: usize = 20;

/// A game given by its full table of `2^n` worths, indexed by coalition mask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitGame {
    players: PlayerSet,
    worths: Vec<Rational>,
}

impl ExplicitGame {
    pub fn new(players: PlayerSet, worths: Vec<Rational>) -> Result<Self> {
        let n = players.len();
        if n > EXPLICIT_MAX_PLAYERS {
            return Err(Error::TooManyPlayers {
                players: n,
                limit: EXPLICIT_MAX_PLAYERS,
            });
        }
        if worths.len() != 1 << n {
            return Err(Error::InvalidGame(format!(
                "worth table has {} entries, expected {}",
                worths.len(),
                1u64 << n
            )));
        }
        if !worths[0].is_zero() {
            return Err(Error::InvalidGame("the empty coalition must have worth 0".into()));
        }
        Ok(ExplicitGame { players, worths })
    }

    pub fn from_fn(players: PlayerSet, f: impl Fn(Coalition) -> Rational) -> Result<Self> {
        let n = players.len();
        if n > EXPLICIT_MAX_PLAYERS {
            return Err(Error::TooManyPlayers {
                players: n,
                limit: EXPLICIT_MAX_PLAYERS,
            });
        }
        let worths = (0..1u64 << n)
            .map(|bits| {
                if bits == 0 {
                    Rational::zero()
                } else {
                    f(Coalition::from_bits(bits))
                }
            })
            .collect();
        Self::new(players, worths)
    }

    pub fn players(&self) -> &PlayerSet {
        &self.players
    }

    pub fn table(&self) -> &[Rational] {
        &self.worths
    }
}

impl WorthOracle for ExplicitGame {
    fn player_count(&self) -> usize {
        self.players.len()
    }

    fn worth(&self, s: Coalition) -> Rational {
        self.worths[s.bits() as usize].clone()
    }
}
