//! JSON game and payoff files.
//!
//! ```json
//! {"players": ["a", "b"],
//!  "repr": {"type": "graph", "edges": [["a", "b", "2"]]}}
//! ```
//!
//! `repr` may also be `{"type": "mcnet", "rules": [{"pos": [...], "neg": [...], "value": "5"}]}`
//! or `{"type": "explicit", "worths": {"a,b": "20", ...}}`. Every number is a
//! rational string `"p"` or `"p/q"`; worths are rationals, never floats.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{ExplicitGame, Game, GraphGame, McNet, Rule};
use crate::coalition::Coalition;
use crate::error::{Error, Result};
use crate::game::{PayoffVector, PlayerSet, WorthOracle};
use crate::rational::{format_rational, parse_rational, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameFile {
    pub players: Vec<String>,
    pub repr: ReprFile,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum ReprFile {
    Graph { edges: Vec<(String, String, String)> },
    Mcnet { rules: Vec<RuleFile> },
    Explicit { worths: BTreeMap<String, String> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleFile {
    #[serde(default)]
    pub pos: Vec<String>,
    #[serde(default)]
    pub neg: Vec<String>,
    pub value: String,
}

fn player(players: &PlayerSet, name: &str) -> Result<usize> {
    players
        .index_of(name)
        .ok_or_else(|| Error::Parse(format!("unknown player {name:?}")))
}

fn names_to_coalition(players: &PlayerSet, names: &[String]) -> Result<Coalition> {
    names.iter().try_fold(Coalition::EMPTY, |acc, name| {
        let i = player(players, name)?;
        if acc.contains(i) {
            return Err(Error::Parse(format!("player {name:?} listed twice in one pattern")));
        }
        Ok(acc.with(i))
    })
}

impl GameFile {
    pub fn into_game(self) -> Result<Game> {
        let players = PlayerSet::new(self.players)?;
        match self.repr {
            ReprFile::Graph { edges } => {
                let edges = edges
                    .iter()
                    .map(|(a, b, w)| Ok((player(&players, a)?, player(&players, b)?, parse_rational(w)?)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Game::Graph(GraphGame::new(players, edges)?))
            }
            ReprFile::Mcnet { rules } => {
                let rules = rules
                    .iter()
                    .map(|r| {
                        Ok(Rule {
                            pos: names_to_coalition(&players, &r.pos)?,
                            neg: names_to_coalition(&players, &r.neg)?,
                            value: parse_rational(&r.value)?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Game::McNet(McNet::new(players, rules)?))
            }
            ReprFile::Explicit { worths } => {
                let n = players.len();
                if n > super::EXPLICIT_MAX_PLAYERS {
                    return Err(Error::TooManyPlayers {
                        players: n,
                        limit: super::EXPLICIT_MAX_PLAYERS,
                    });
                }
                let mut table: Vec<Option<Rational>> = vec![None; 1 << n];
                for (key, value) in &worths {
                    let s = if key.trim().is_empty() {
                        Coalition::EMPTY
                    } else {
                        let names: Vec<String> = key.split(',').map(|k| k.trim().to_string()).collect();
                        names_to_coalition(&players, &names)?
                    };
                    let slot = &mut table[s.bits() as usize];
                    if slot.is_some() {
                        return Err(Error::Parse(format!("coalition {key:?} listed twice")));
                    }
                    *slot = Some(parse_rational(value)?);
                }
                table[0].get_or_insert_with(|| Rational::from_integer(0.into()));
                let table = table
                    .into_iter()
                    .enumerate()
                    .map(|(bits, w)| {
                        w.ok_or_else(|| {
                            Error::Parse(format!(
                                "worth table incomplete: missing {{{}}}",
                                players.format_coalition(Coalition::from_bits(bits as u64))
                            ))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Game::Explicit(ExplicitGame::new(players, table)?))
            }
        }
    }

    /// Canonical file form: edges sorted, explicit tables listing every
    /// non-empty coalition with members in player order.
    pub fn from_game(game: &Game) -> GameFile {
        let players = game.players();
        let names = |s: Coalition| -> Vec<String> {
            players.member_names(s).into_iter().map(str::to_string).collect()
        };
        let repr = match game {
            Game::Graph(g) => ReprFile::Graph {
                edges: g
                    .edges()
                    .iter()
                    .map(|e| {
                        (
                            players.name(e.a).to_string(),
                            players.name(e.b).to_string(),
                            format_rational(&e.weight),
                        )
                    })
                    .collect(),
            },
            Game::McNet(m) => ReprFile::Mcnet {
                rules: m
                    .rules()
                    .iter()
                    .map(|r| RuleFile {
                        pos: names(r.pos),
                        neg: names(r.neg),
                        value: format_rational(&r.value),
                    })
                    .collect(),
            },
            Game::Explicit(e) => ReprFile::Explicit {
                worths: players
                    .grand()
                    .subsets()
                    .skip(1)
                    .map(|s| (players.format_coalition(s), format_rational(&e.worth(s))))
                    .collect(),
            },
        };
        GameFile {
            players: players.names().to_vec(),
            repr,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("game files always serialize")
    }
}

/// Parses a game file. Syntax errors carry the line and column.
pub fn parse_game_json(text: &str) -> Result<Game> {
    let file: GameFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.into_game()
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PayoffFile {
    ByName(BTreeMap<String, String>),
    Ordered(Vec<String>),
}

/// Payoff files are either `{"a": "4", "b": "14", ...}` covering every
/// player, or a list of rational strings in player order.
pub fn parse_payoff_json(text: &str, players: &PlayerSet) -> Result<PayoffVector> {
    let file: PayoffFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let values = match file {
        PayoffFile::Ordered(list) => {
            if list.len() != players.len() {
                return Err(Error::DimensionMismatch {
                    expected: players.len(),
                    got: list.len(),
                });
            }
            list.iter().map(|v| parse_rational(v)).collect::<Result<Vec<_>>>()?
        }
        PayoffFile::ByName(map) => {
            let mut values = vec![None; players.len()];
            for (name, v) in &map {
                values[player(players, name)?] = Some(parse_rational(v)?);
            }
            values
                .into_iter()
                .enumerate()
                .map(|(i, v)| v.ok_or_else(|| Error::Parse(format!("no payoff for player {:?}", players.name(i)))))
                .collect::<Result<Vec<_>>>()?
        }
    };
    Ok(PayoffVector::new(values))
}

/// `{"a": "4", ...}` keyed by player name.
pub fn payoff_to_json(x: &PayoffVector, players: &PlayerSet) -> serde_json::Value {
    let map: serde_json::Map<String, serde_json::Value> = x
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| (players.name(i).to_string(), serde_json::Value::String(format_rational(v))))
        .collect();
    serde_json::Value::Object(map)
}
