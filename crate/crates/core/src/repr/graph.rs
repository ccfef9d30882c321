use num::Zero;

use crate::coalition::Coalition;
use crate::error::{Error, Result};
use crate::game::{PlayerSet, WorthOracle};
use crate::rational::Rational;

/// An undirected weighted edge with `a < b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub weight: Rational,
}

impl Edge {
    pub fn endpoints(&self) -> Coalition {
        Coalition::singleton(self.a).with(self.b)
    }
}

/// Graph game: `v(S)` is the total weight of the edges with both endpoints
/// in `S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphGame {
    players: PlayerSet,
    edges: Vec<Edge>,
}

impl GraphGame {
    /// Builds a graph game; endpoint pairs are canonicalized and sorted.
    /// Self-loops, unknown players and duplicate unordered pairs are rejected.
    pub fn new(players: PlayerSet, edges: impl IntoIterator<Item = (usize, usize, Rational)>) -> Result<Self> {
        let n = players.len();
        let mut list = Vec::new();
        for (i, j, weight) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidGame(format!("edge ({i}, {j}) names a player outside 0..{n}")));
            }
            if i == j {
                return Err(Error::InvalidGame(format!(
                    "self-loop on player {:?}",
                    players.name(i)
                )));
            }
            let (a, b) = if i < j { (i, j) } else { (j, i) };
            list.push(Edge { a, b, weight });
        }
        list.sort_by_key(|e| (e.a, e.b));
        if let Some(w) = list.windows(2).find(|w| (w[0].a, w[0].b) == (w[1].a, w[1].b)) {
            return Err(Error::InvalidGame(format!(
                "duplicate edge {{{}, {}}}",
                players.name(w[0].a),
                players.name(w[0].b)
            )));
        }
        Ok(GraphGame { players, edges: list })
    }

    pub fn players(&self) -> &PlayerSet {
        &self.players
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_weight(&self, i: usize, j: usize) -> Option<&Rational> {
        let key = if i < j { (i, j) } else { (j, i) };
        self.edges
            .binary_search_by_key(&key, |e| (e.a, e.b))
            .ok()
            .map(|k| &self.edges[k].weight)
    }

    /// Neighbour mask of every player.
    pub fn adjacency(&self) -> Vec<Coalition> {
        let mut adj = vec![Coalition::EMPTY; self.players.len()];
        for e in &self.edges {
            adj[e.a].insert(e.b);
            adj[e.b].insert(e.a);
        }
        adj
    }

    pub fn degree(&self, i: usize) -> usize {
        self.edges.iter().filter(|e| e.a == i || e.b == i).count()
    }
}

impl WorthOracle for GraphGame {
    fn player_count(&self) -> usize {
        self.players.len()
    }

    fn worth(&self, s: Coalition) -> Rational {
        self.edges
            .iter()
            .filter(|e| s.contains(e.a) && s.contains(e.b))
            .fold(Rational::zero(), |acc, e| acc + &e.weight)
    }
}
