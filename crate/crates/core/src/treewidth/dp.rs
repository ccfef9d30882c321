use num::{Signed, Zero};

use super::TreeDecomposition;
use crate::coalition::Coalition;
use crate::error::{Error, Result};
use crate::game::PayoffVector;
use crate::rational::Rational;
use crate::repr::GraphGame;

/// How `include` / `exclude` are enforced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ConstraintHandling {
    /// Bag states violating the constraints are discarded.
    #[default]
    HardState,
    /// Unconstrained maximization after replacing the payoffs of constrained
    /// players by node weights `−1 − deg(i)·B` (forced in) and
    /// `1 + deg(j)·B` (forced out), `B` the largest absolute edge weight.
    WeightTrick,
}

/// `max { Σ_{e⊆S} w(e) − x(S) : include ⊆ S, S ∩ exclude = ∅ }` together with
/// a maximizing coalition.
pub fn max_excess_constrained(
    g: &GraphGame,
    x: &PayoffVector,
    include: Coalition,
    exclude: Coalition,
    td: &TreeDecomposition,
    handling: ConstraintHandling,
) -> Result<(Rational, Coalition)> {
    let n = g.players().len();
    x.check_dimension(n)?;
    if !include.is_disjoint(exclude) {
        return Err(Error::BadCoalition("include and exclude overlap".into()));
    }
    let all = Coalition::grand(n);
    if !include.union(exclude).is_subset_of(all) {
        return Err(Error::BadCoalition("constraint mentions unknown players".into()));
    }
    td.validate(&g.adjacency())?;
    match handling {
        ConstraintHandling::HardState => Ok(run(g, x.values(), include, exclude, td)),
        ConstraintHandling::WeightTrick => {
            let big = g
                .edges()
                .iter()
                .map(|e| e.weight.abs())
                .max()
                .unwrap_or_else(Rational::zero);
            let one = Rational::from_integer(1.into());
            let mut cost = x.values().to_vec();
            let mut offset = Rational::zero();
            for i in include.iter() {
                cost[i] = -&one - Rational::from_integer(g.degree(i).into()) * &big;
                offset += &cost[i] - x.get(i);
            }
            for j in exclude.iter() {
                cost[j] = &one + Rational::from_integer(g.degree(j).into()) * &big;
            }
            let (score, s) = run(g, &cost, Coalition::EMPTY, Coalition::EMPTY, td);
            debug_assert!(include.is_subset_of(s) && s.is_disjoint(exclude));
            Ok((score + offset, s))
        }
    }
}

struct Child {
    node: usize,
    /// Positions (within the child's bag) of the separator members.
    sep: Coalition,
    best: Vec<Option<(Rational, u64)>>,
}

fn run(g: &GraphGame, cost: &[Rational], include: Coalition, exclude: Coalition, td: &TreeDecomposition) -> (Rational, Coalition) {
    let k = td.bags.len();
    let top_of = |s: Coalition| -> usize {
        (0..k)
            .find(|&b| s.is_subset_of(td.bags[b]) && td.parent[b].is_none_or(|p| !s.is_subset_of(td.bags[p])))
            .expect("valid decomposition covers every vertex and edge")
    };
    let n = cost.len();
    let mut owned_vertices = vec![Vec::new(); k];
    for v in 0..n {
        owned_vertices[top_of(Coalition::singleton(v))].push(v);
    }
    let mut owned_edges = vec![Vec::new(); k];
    for e in g.edges() {
        owned_edges[top_of(Coalition::from_players([e.a, e.b]))].push(e);
    }

    let children = td.children();
    let mut tables: Vec<Option<Vec<Option<Rational>>>> = vec![None; k];
    let mut child_info: Vec<Vec<Child>> = (0..k).map(|_| Vec::new()).collect();

    for node in td.postorder() {
        let bag = td.bags[node];
        let size = bag.len();
        let mut table: Vec<Option<Rational>> = vec![None; 1 << size];
        let forced = bag.extract(include.intersection(bag));
        let banned = bag.extract(exclude.intersection(bag));

        for &c in &children[node] {
            let child_bag = td.bags[c];
            let sep_players = child_bag.intersection(bag);
            let sep_in_child = Coalition::from_bits(child_bag.extract(sep_players));
            let sep_in_parent = Coalition::from_bits(bag.extract(sep_players));
            let child_table = tables[c].take().expect("children are processed first");
            let mut best: Vec<Option<(Rational, u64)>> = vec![None; 1 << sep_players.len()];
            for (cmask, val) in child_table.iter().enumerate() {
                let Some(val) = val else { continue };
                let key = sep_in_child.extract(Coalition::from_bits(cmask as u64)) as usize;
                if best[key].as_ref().is_none_or(|(b, _)| val > b) {
                    best[key] = Some((val.clone(), cmask as u64));
                }
            }
            child_info[node].push(Child {
                node: c,
                sep: sep_in_parent,
                best,
            });
        }

        for (mask, slot) in table.iter_mut().enumerate() {
            let m = mask as u64;
            if m & forced != forced || m & banned != 0 {
                continue;
            }
            let chosen = bag.deposit(m);
            let mut value = Rational::zero();
            for &v in &owned_vertices[node] {
                if chosen.contains(v) {
                    value -= &cost[v];
                }
            }
            for e in &owned_edges[node] {
                if chosen.contains(e.a) && chosen.contains(e.b) {
                    value += &e.weight;
                }
            }
            let mut feasible = true;
            for child in &child_info[node] {
                let key = child.sep.extract(Coalition::from_bits(m)) as usize;
                match &child.best[key] {
                    Some((v, _)) => value += v,
                    None => {
                        feasible = false;
                        break;
                    }
                }
            }
            if feasible {
                *slot = Some(value);
            }
        }
        tables[node] = Some(table);
    }

    let root_table = tables[td.root].take().expect("root processed last");
    let (root_mask, value) = root_table
        .iter()
        .enumerate()
        .filter_map(|(m, v)| v.as_ref().map(|v| (m as u64, v)))
        .fold(None::<(u64, &Rational)>, |acc, (m, v)| match acc {
            Some((_, bv)) if bv >= v => acc,
            _ => Some((m, v)),
        })
        .expect("disjoint include/exclude always admit a coalition");
    let value = value.clone();

    let mut coalition = Coalition::EMPTY;
    let mut stack = vec![(td.root, root_mask)];
    while let Some((node, mask)) = stack.pop() {
        coalition = coalition.union(td.bags[node].deposit(mask));
        for child in &child_info[node] {
            let key = child.sep.extract(Coalition::from_bits(mask)) as usize;
            let (_, cmask) = child.best[key].as_ref().expect("traceback follows feasible states");
            stack.push((child.node, *cmask));
        }
    }
    (value, coalition)
}
