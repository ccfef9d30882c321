//! Players, payoff vectors and the representation-independent quantities
//! (worth, excess, imputation tests).

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};

use num::Zero;
use serde::{Deserialize, Serialize};

use crate::coalition::{Coalition, MAX_PLAYERS};
use crate::error::{Error, Result};
use crate::rational::{format_rational, Rational};

/// Default cap on the player count for exhaustive `2^n` enumeration.
pub const DEFAULT_ENUMERATION_CAP: usize = 30;

static ENUMERATION_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_ENUMERATION_CAP);

/// Largest `n` for which exhaustive enumeration engines will run.
pub fn enumeration_cap() -> usize {
    ENUMERATION_CAP.load(Ordering::Relaxed)
}

/// Overrides the enumeration cap process-wide (the CLI's `--force` and
/// `COALKIT_MAX_PLAYERS`).
pub fn set_enumeration_cap(cap: usize) {
    ENUMERATION_CAP.store(cap.min(MAX_PLAYERS), Ordering::Relaxed);
}

pub(crate) fn check_enumerable(n: usize) -> Result<()> {
    let limit = enumeration_cap();
    if n > limit {
        Err(Error::TooManyPlayers { players: n, limit })
    } else {
        Ok(())
    }
}

/// Ordered, uniquely named players. Index `i` is the position in the list.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct PlayerSet {
    names: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl PlayerSet {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::InvalidGame("a game needs at least one player".into()));
        }
        if names.len() > MAX_PLAYERS {
            return Err(Error::TooManyPlayers {
                players: names.len(),
                limit: MAX_PLAYERS,
            });
        }
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() || name.contains(',') {
                return Err(Error::InvalidGame(format!(
                    "player name {name:?} must be non-empty and contain no comma"
                )));
            }
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::InvalidGame(format!("duplicate player {name:?}")));
            }
        }
        Ok(PlayerSet { names, index })
    }

    /// Players named `p0, p1, ...`.
    pub fn numbered(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| format!("p{i}")))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn grand(&self) -> Coalition {
        Coalition::grand(self.len())
    }

    pub fn coalition_of<'a>(&self, names: impl IntoIterator<Item = &'a str>) -> Result<Coalition> {
        names.into_iter().try_fold(Coalition::EMPTY, |acc, name| {
            let name = name.trim();
            self.index_of(name)
                .map(|i| acc.with(i))
                .ok_or_else(|| Error::BadCoalition(format!("unknown player {name:?}")))
        })
    }

    /// Parses a comma-separated member list; `""` is the empty coalition.
    pub fn parse_coalition(&self, text: &str) -> Result<Coalition> {
        if text.trim().is_empty() {
            return Ok(Coalition::EMPTY);
        }
        self.coalition_of(text.split(','))
    }

    pub fn member_names(&self, s: Coalition) -> Vec<&str> {
        s.iter().map(|i| self.name(i)).collect()
    }

    /// Canonical comma-joined member list, in player order.
    pub fn format_coalition(&self, s: Coalition) -> String {
        self.member_names(s).join(",")
    }
}

impl TryFrom<Vec<String>> for PlayerSet {
    type Error = Error;

    fn try_from(names: Vec<String>) -> Result<Self> {
        PlayerSet::new(names)
    }
}

impl From<PlayerSet> for Vec<String> {
    fn from(p: PlayerSet) -> Self {
        p.names
    }
}

impl fmt::Debug for PlayerSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.names).finish()
    }
}

/// A player-indexed rational vector `x`.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct PayoffVector(Vec<Rational>);

impl PayoffVector {
    pub fn new(values: Vec<Rational>) -> Self {
        PayoffVector(values)
    }

    pub fn zeros(n: usize) -> Self {
        PayoffVector(vec![Rational::zero(); n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[Rational] {
        &self.0
    }

    pub fn get(&self, i: usize) -> &Rational {
        &self.0[i]
    }

    pub fn set(&mut self, i: usize, value: Rational) {
        self.0[i] = value;
    }

    /// `x(S) = Σ_{i∈S} x_i`.
    pub fn sum_over(&self, s: Coalition) -> Rational {
        s.iter().fold(Rational::zero(), |acc, i| acc + &self.0[i])
    }

    pub fn total(&self) -> Rational {
        self.0.iter().fold(Rational::zero(), |acc, v| acc + v)
    }

    pub fn check_dimension(&self, n: usize) -> Result<()> {
        if self.len() == n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: n,
                got: self.len(),
            })
        }
    }
}

impl From<Vec<Rational>> for PayoffVector {
    fn from(v: Vec<Rational>) -> Self {
        PayoffVector(v)
    }
}

/// A deterministic, total worth function over the coalitions of `n` players.
pub trait WorthOracle: Sync {
    fn player_count(&self) -> usize;

    fn worth(&self, s: Coalition) -> Rational;
}

impl<F> WorthOracle for (usize, F)
where
    F: Fn(Coalition) -> Rational + Sync,
{
    fn player_count(&self) -> usize {
        self.0
    }

    fn worth(&self, s: Coalition) -> Rational {
        (self.1)(s)
    }
}

/// `e(S, x) = v(S) − x(S)`.
pub fn excess<G: WorthOracle + ?Sized>(game: &G, s: Coalition, x: &PayoffVector) -> Rational {
    game.worth(s) - x.sum_over(s)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ImputationIssue {
    Inefficient { total: Rational, grand_worth: Rational },
    BelowStandalone { player: usize, payoff: Rational, standalone: Rational },
}

/// Outcome of an imputation test, listing every violated condition.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ImputationReport {
    pub issues: Vec<ImputationIssue>,
}

impl ImputationReport {
    pub fn is_imputation(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn describe(&self, players: Option<&PlayerSet>) -> String {
        let name = |i: usize| match players {
            Some(p) => p.name(i).to_string(),
            None => format!("#{i}"),
        };
        self.issues
            .iter()
            .map(|issue| match issue {
                ImputationIssue::Inefficient { total, grand_worth } => format!(
                    "inefficient: x(N) = {} but v(N) = {}",
                    format_rational(total),
                    format_rational(grand_worth)
                ),
                ImputationIssue::BelowStandalone {
                    player,
                    payoff,
                    standalone,
                } => format!(
                    "not individually rational: x_{} = {} < v({{{}}}) = {}",
                    name(*player),
                    format_rational(payoff),
                    name(*player),
                    format_rational(standalone)
                ),
            })
            .collect::<Vec<_>>()
            .join("; ")
    }
}

/// Checks efficiency `x(N) = v(N)` and individual rationality `x_i ≥ v({i})`.
pub fn check_imputation<G: WorthOracle + ?Sized>(game: &G, x: &PayoffVector) -> Result<ImputationReport> {
    let n = game.player_count();
    x.check_dimension(n)?;
    let mut issues = Vec::new();
    let total = x.total();
    let grand_worth = game.worth(Coalition::grand(n));
    if total != grand_worth {
        issues.push(ImputationIssue::Inefficient { total, grand_worth });
    }
    for i in 0..n {
        let standalone = game.worth(Coalition::singleton(i));
        if x.get(i) < &standalone {
            issues.push(ImputationIssue::BelowStandalone {
                player: i,
                payoff: x.get(i).clone(),
                standalone,
            });
        }
    }
    Ok(ImputationReport { issues })
}

pub fn is_imputation<G: WorthOracle + ?Sized>(game: &G, x: &PayoffVector) -> Result<bool> {
    Ok(check_imputation(game, x)?.is_imputation())
}
