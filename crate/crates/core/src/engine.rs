//! Maximum excess over a coalition family, by exhaustive enumeration or by
//! tree-decomposition dynamic programming on graph games.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coalition::{Coalition, CoalitionFamily};
use crate::error::{Error, Result};
use crate::game::{check_enumerable, excess, PayoffVector, WorthOracle};
use crate::rational::Rational;
use crate::repr::{Game, GraphGame};
use crate::treewidth::{decompose, max_excess_constrained, ConstraintHandling, Method, TreeDecomposition};

/// Width bound under which `Auto` picks the dynamic program.
pub const AUTO_DP_MAX_WIDTH: usize = 8;

/// Families smaller than this are scanned on the calling thread.
const PARALLEL_THRESHOLD: u64 = 1 << 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    #[default]
    Auto,
    Enumerate,
    TreewidthDp,
}

/// Highest value first; among equal values the smaller coalition wins.
fn better(a: &(Rational, Coalition), b: &(Rational, Coalition)) -> bool {
    a.0 > b.0 || (a.0 == b.0 && a.1 < b.1)
}

fn pick(a: Option<(Rational, Coalition)>, b: Option<(Rational, Coalition)>) -> Option<(Rational, Coalition)> {
    match (a, b) {
        (Some(a), Some(b)) => Some(if better(&b, &a) { b } else { a }),
        (a, None) => a,
        (None, b) => b,
    }
}

/// Exhaustive maximum of `e(S, x)` over `family`; `None` when it is empty.
pub fn enumerate_max_excess<G: WorthOracle + ?Sized>(
    game: &G,
    x: &PayoffVector,
    family: &CoalitionFamily,
) -> Result<Option<(Rational, Coalition)>> {
    check_enumerable(game.player_count())?;
    let Some(size) = family.size() else {
        return Err(Error::TooManyPlayers {
            players: family.free().len(),
            limit: 63,
        });
    };
    let eval = |k: u64| {
        let s = family.nth(k);
        Some((excess(game, s, x), s))
    };
    if size < PARALLEL_THRESHOLD {
        Ok((0..size).map(eval).fold(None, pick))
    } else {
        Ok((0..size).into_par_iter().map(eval).reduce(|| None, pick))
    }
}

enum Kind<'a> {
    Enumerate,
    Dp { graph: &'a GraphGame, td: TreeDecomposition },
}

/// A game paired with a resolved engine; reused across many queries.
pub struct Maximizer<'a> {
    game: &'a Game,
    kind: Kind<'a>,
}

impl<'a> Maximizer<'a> {
    pub fn new(game: &'a Game, engine: Engine) -> Result<Self> {
        let kind = match engine {
            Engine::Enumerate => Kind::Enumerate,
            Engine::TreewidthDp => {
                let graph = game.as_graph().ok_or_else(|| {
                    Error::EngineUnsupported(format!("treewidth-dp needs a graph game, got {}", game.kind()))
                })?;
                Kind::Dp {
                    graph,
                    td: decompose(graph, Method::MinFill)?,
                }
            }
            Engine::Auto => match game.as_graph() {
                Some(graph) => {
                    let td = decompose(graph, Method::MinFill)?;
                    if td.width() <= AUTO_DP_MAX_WIDTH {
                        Kind::Dp { graph, td }
                    } else {
                        Kind::Enumerate
                    }
                }
                None => Kind::Enumerate,
            },
        };
        Ok(Maximizer { game, kind })
    }

    pub fn game(&self) -> &'a Game {
        self.game
    }

    /// The engine actually used after resolving `Auto`.
    pub fn engine(&self) -> Engine {
        match self.kind {
            Kind::Enumerate => Engine::Enumerate,
            Kind::Dp { .. } => Engine::TreewidthDp,
        }
    }

    /// `max { e(S, x) : include ⊆ S, S ∩ exclude = ∅ }` with a maximizer, or
    /// `None` if no coalition qualifies.
    pub fn max_excess(&self, x: &PayoffVector, include: Coalition, exclude: Coalition) -> Result<Option<(Rational, Coalition)>> {
        let n = self.game.players().len();
        x.check_dimension(n)?;
        let family = CoalitionFamily::new(n, include, exclude);
        if family.is_empty() {
            return Ok(None);
        }
        match &self.kind {
            Kind::Enumerate => enumerate_max_excess(self.game, x, &family),
            Kind::Dp { graph, td } => {
                max_excess_constrained(graph, x, include, exclude, td, ConstraintHandling::HardState).map(Some)
            }
        }
    }

    /// `s_{i,j}(x) = max_{S ∈ I_{i,j}} e(S, x)`.
    pub fn surplus(&self, i: usize, j: usize, x: &PayoffVector) -> Result<Rational> {
        let n = self.game.players().len();
        if i == j || i >= n || j >= n {
            return Err(Error::BadCoalition(format!("surplus needs two distinct players, got {i} and {j}")));
        }
        let (value, _) = self
            .max_excess(x, Coalition::singleton(i), Coalition::singleton(j))?
            .expect("I_{i,j} always contains {i}");
        Ok(value)
    }
}

/// `s_{i,j}(x)` with the given engine.
pub fn surplus(game: &Game, i: usize, j: usize, x: &PayoffVector, engine: Engine) -> Result<Rational> {
    Maximizer::new(game, engine)?.surplus(i, j, x)
}
