//! Tree decompositions of graph-game graphs and bag dynamic programming for
//! constrained maximum excess.

mod dp;

use serde::{Deserialize, Serialize};

use crate::coalition::Coalition;
use crate::error::{Error, Result};
use crate::repr::GraphGame;

pub use dp::{max_excess_constrained, ConstraintHandling};

/// Largest graph for which `exact-small` runs its `O(2^n · n²)` search.
pub const EXACT_MAX_VERTICES: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    MinDegree,
    MinFill,
    ExactSmall,
}

/// A rooted tree of bags over player indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub bags: Vec<Coalition>,
    /// `parent[root]` is `None`.
    pub parent: Vec<Option<usize>>,
    pub root: usize,
}

impl TreeDecomposition {
    pub fn width(&self) -> usize {
        self.bags.iter().map(|b| b.len()).max().unwrap_or(0).saturating_sub(1)
    }

    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut children = vec![Vec::new(); self.bags.len()];
        for (node, p) in self.parent.iter().enumerate() {
            if let Some(p) = p {
                children[*p].push(node);
            }
        }
        children
    }

    /// Nodes ordered so that every node comes before its parent.
    pub fn postorder(&self) -> Vec<usize> {
        let children = self.children();
        let mut order = Vec::with_capacity(self.bags.len());
        let mut stack = vec![(self.root, false)];
        while let Some((node, expanded)) = stack.pop() {
            if expanded {
                order.push(node);
            } else {
                stack.push((node, true));
                for &c in children[node].iter().rev() {
                    stack.push((c, false));
                }
            }
        }
        order
    }

    /// The same decomposition rooted at `node`.
    pub fn rerooted(&self, node: usize) -> TreeDecomposition {
        let mut parent = self.parent.clone();
        let mut prev = None;
        let mut cur = Some(node);
        while let Some(c) = cur {
            let next = parent[c];
            parent[c] = prev;
            prev = Some(c);
            cur = next;
        }
        TreeDecomposition {
            bags: self.bags.clone(),
            parent,
            root: node,
        }
    }

    /// Checks the tree structure and the three decomposition conditions
    /// against the graph with adjacency lists `adj`.
    pub fn validate(&self, adj: &[Coalition]) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidDecomposition(msg));
        let k = self.bags.len();
        if k == 0 || self.parent.len() != k || self.root >= k {
            return bad("malformed tree arrays".into());
        }
        if self.parent[self.root].is_some() {
            return bad("root has a parent".into());
        }
        if self.postorder().len() != k {
            return bad("parent array does not form a single tree".into());
        }
        let n = adj.len();
        let all = Coalition::grand(n);
        let covered = self.bags.iter().fold(Coalition::EMPTY, |acc, b| acc.union(*b));
        if covered != all {
            return bad(format!("vertices {:?} are not covered", all.difference(covered)));
        }
        for (u, nbrs) in adj.iter().enumerate() {
            for v in nbrs.iter().filter(|&v| v > u) {
                let e = Coalition::from_players([u, v]);
                if !self.bags.iter().any(|b| e.is_subset_of(*b)) {
                    return bad(format!("edge ({u}, {v}) lies in no bag"));
                }
            }
        }
        for v in 0..n {
            let tops = (0..k)
                .filter(|&b| self.bags[b].contains(v) && self.parent[b].is_none_or(|p| !self.bags[p].contains(v)))
                .count();
            if tops != 1 {
                return bad(format!("bags containing vertex {v} are not connected"));
            }
        }
        Ok(())
    }
}

fn eliminate(adj: &mut [Coalition], v: usize) -> Coalition {
    let nbrs = adj[v];
    for u in nbrs.iter() {
        adj[u] = adj[u].union(nbrs).without(u).without(v);
    }
    adj[v] = Coalition::EMPTY;
    nbrs
}

fn fill_in(adj: &[Coalition], v: usize) -> usize {
    let nbrs = adj[v];
    nbrs.iter().map(|u| nbrs.without(u).difference(adj[u]).len()).sum::<usize>() / 2
}

fn greedy_order(adj: &[Coalition], method: Method) -> Vec<usize> {
    let n = adj.len();
    let mut g = adj.to_vec();
    let mut remaining = Coalition::grand(n);
    let mut order = Vec::with_capacity(n);
    while !remaining.is_empty() {
        let v = remaining
            .iter()
            .min_by_key(|&v| match method {
                Method::MinFill => (fill_in(&g, v), g[v].len()),
                _ => (g[v].len(), 0),
            })
            .expect("non-empty");
        eliminate(&mut g, v);
        remaining = remaining.without(v);
        order.push(v);
    }
    order
}

/// Exact elimination order by dynamic programming over vertex subsets.
fn exact_order(adj: &[Coalition]) -> Vec<usize> {
    let n = adj.len();
    let full = 1usize << n;
    // vertices outside S ∪ {v} reachable from v through S
    let q = |s: usize, v: usize| -> usize {
        let s = Coalition::from_bits(s as u64);
        let mut seen = Coalition::singleton(v);
        let mut frontier = Coalition::singleton(v);
        let mut out = Coalition::EMPTY;
        while !frontier.is_empty() {
            let mut next = Coalition::EMPTY;
            for u in frontier.iter() {
                let nb = adj[u].difference(seen);
                out = out.union(nb.difference(s));
                next = next.union(nb.intersection(s));
                seen = seen.union(nb);
            }
            frontier = next;
        }
        out.len()
    };
    let mut tw = vec![usize::MAX; full];
    let mut choice = vec![0usize; full];
    tw[0] = 0;
    for s in 1..full {
        for v in Coalition::from_bits(s as u64).iter() {
            let rest = s & !(1 << v);
            let val = tw[rest].max(q(rest, v));
            if val < tw[s] {
                tw[s] = val;
                choice[s] = v;
            }
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut s = full - 1;
    while s != 0 {
        let v = choice[s];
        order.push(v);
        s &= !(1 << v);
    }
    order.reverse();
    order
}

/// Builds the decomposition induced by eliminating vertices in `order`.
pub fn from_elimination_order(adj: &[Coalition], order: &[usize]) -> TreeDecomposition {
    let n = adj.len();
    let mut g = adj.to_vec();
    let mut position = vec![0; n];
    for (p, &v) in order.iter().enumerate() {
        position[v] = p;
    }
    let mut bags = Vec::with_capacity(n);
    let mut higher = Vec::with_capacity(n);
    for &v in order {
        let nbrs = eliminate(&mut g, v);
        bags.push(nbrs.with(v));
        higher.push(nbrs.iter().min_by_key(|&u| position[u]));
    }
    let mut parent: Vec<Option<usize>> = higher.iter().map(|h| h.map(|u| position[u])).collect();
    let roots: Vec<usize> = (0..n).filter(|&b| parent[b].is_none()).collect();
    let root = *roots.last().expect("at least one vertex");
    for &r in &roots {
        if r != root {
            parent[r] = Some(root);
        }
    }
    TreeDecomposition { bags, parent, root }
}

pub fn decompose_adjacency(adj: &[Coalition], method: Method) -> Result<TreeDecomposition> {
    let order = match method {
        Method::ExactSmall => {
            if adj.len() > EXACT_MAX_VERTICES {
                return Err(Error::TooLargeForExact(adj.len()));
            }
            exact_order(adj)
        }
        _ => greedy_order(adj, method),
    };
    let td = from_elimination_order(adj, &order);
    td.validate(adj)?;
    Ok(td)
}

pub fn decompose(g: &GraphGame, method: Method) -> Result<TreeDecomposition> {
    decompose_adjacency(&g.adjacency(), method)
}
