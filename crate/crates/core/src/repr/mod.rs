//! Concrete compact representations and the translations between them.

mod explicit;
mod format;
mod graph;
mod mcnet;

pub use explicit::{ExplicitGame, EXPLICIT_MAX_PLAYERS};
pub use format::{parse_game_json, parse_payoff_json, payoff_to_json, GameFile};
pub use graph::{Edge, GraphGame};
pub use mcnet::{McNet, Rule};

use crate::coalition::Coalition;
use crate::error::{Error, Result};
use crate::game::{PlayerSet, WorthOracle};
use crate::rational::Rational;

/// A game in one of the supported representations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Game {
    Graph(GraphGame),
    McNet(McNet),
    Explicit(ExplicitGame),
}

impl Game {
    pub fn players(&self) -> &PlayerSet {
        match self {
            Game::Graph(g) => g.players(),
            Game::McNet(m) => m.players(),
            Game::Explicit(e) => e.players(),
        }
    }

    pub fn as_graph(&self) -> Option<&GraphGame> {
        match self {
            Game::Graph(g) => Some(g),
            _ => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Game::Graph(_) => "graph",
            Game::McNet(_) => "mcnet",
            Game::Explicit(_) => "explicit",
        }
    }
}

impl WorthOracle for Game {
    fn player_count(&self) -> usize {
        self.players().len()
    }

    fn worth(&self, s: Coalition) -> Rational {
        match self {
            Game::Graph(g) => g.worth(s),
            Game::McNet(m) => m.worth(s),
            Game::Explicit(e) => e.worth(s),
        }
    }
}

impl From<GraphGame> for Game {
    fn from(g: GraphGame) -> Self {
        Game::Graph(g)
    }
}

impl From<McNet> for Game {
    fn from(m: McNet) -> Self {
        Game::McNet(m)
    }
}

impl From<ExplicitGame> for Game {
    fn from(e: ExplicitGame) -> Self {
        Game::Explicit(e)
    }
}

/// One rule `{i ∧ j} → w(e)` per edge.
pub fn gg_to_mcn(g: &GraphGame) -> McNet {
    let rules = g
        .edges()
        .iter()
        .map(|e| Rule {
            pos: e.endpoints(),
            neg: Coalition::EMPTY,
            value: e.weight.clone(),
        })
        .collect();
    McNet::new(g.players().clone(), rules).expect("edge rules are always well formed")
}

/// Tabulates any oracle. Fails for more than [`EXPLICIT_MAX_PLAYERS`] players.
pub fn to_explicit<G: WorthOracle + ?Sized>(game: &G, players: &PlayerSet) -> Result<ExplicitGame> {
    if game.player_count() != players.len() {
        return Err(Error::DimensionMismatch {
            expected: game.player_count(),
            got: players.len(),
        });
    }
    ExplicitGame::from_fn(players.clone(), |s| game.worth(s))
}
