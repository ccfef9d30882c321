use num::{One, Signed, Zero};
use rayon::prelude::*;

use super::kernel::require_imputation;
use crate::coalition::{Coalition, CoalitionFamily};
use crate::error::{Error, Result};
use crate::game::{check_enumerable, excess, PayoffVector, WorthOracle};
use crate::lp::{open_feasible, open_iis_indices, ConstraintTag, LinConstraint, LinSystem, OpenOutcome};
use crate::rational::Rational;
use crate::repr::Game;

/// An objection `(y, S)` of `i` against `j`: `y` pays the members of `S`,
/// listed in increasing player order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Objection {
    pub i: usize,
    pub j: usize,
    pub coalition: Coalition,
    pub y: Vec<Rational>,
}

impl Objection {
    pub fn entries(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.coalition.iter().zip(&self.y)
    }

    pub fn payoff_of(&self, k: usize) -> Option<&Rational> {
        self.entries().find(|(p, _)| *p == k).map(|(_, v)| v)
    }
}

/// One condition of the objection system `W(i, j, S)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ObjectionConstraint {
    /// `y(S) = v(S)`.
    Budget,
    /// `y_k > x_k`.
    Improve(usize),
    /// `v(T) < y(T ∩ S) + x(T ∖ S)`, i.e. `T` is no counterobjection.
    Counter(Coalition),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ObjectionOutcome {
    Justified(Objection),
    /// The listed conditions alone already have no common solution.
    Countered { witness: Vec<ObjectionConstraint> },
}

impl ObjectionOutcome {
    pub fn is_justified(&self) -> bool {
        matches!(self, ObjectionOutcome::Justified(_))
    }
}

/// Checks conditions (1)–(3) of a justified objection directly, enumerating
/// every `T ∈ I_{j,i}`.
pub fn verify_objection<G: WorthOracle + ?Sized>(game: &G, x: &PayoffVector, obj: &Objection) -> bool {
    let n = game.player_count();
    let s = obj.coalition;
    if !s.contains(obj.i) || s.contains(obj.j) || obj.y.len() != s.len() || !s.is_subset_of(Coalition::grand(n)) {
        return false;
    }
    let y_total = obj.y.iter().fold(Rational::zero(), |acc, v| acc + v);
    if y_total != game.worth(s) || obj.entries().any(|(k, v)| v <= x.get(k)) {
        return false;
    }
    CoalitionFamily::containing_excluding(n, obj.j, obj.i).iter().all(|t| {
        let offered = obj
            .entries()
            .filter(|(k, _)| t.contains(*k))
            .fold(x.sum_over(t.difference(s)), |acc, (_, v)| acc + v);
        game.worth(t) < offered
    })
}

/// Every `T ∈ I_{j,i}` with `e(T, x) ≥ 0`, smallest first.
fn counter_candidates<G: WorthOracle + ?Sized>(game: &G, x: &PayoffVector, i: usize, j: usize) -> Result<Vec<(Coalition, Rational)>> {
    let n = game.player_count();
    check_enumerable(n)?;
    let mut out: Vec<(Coalition, Rational)> = CoalitionFamily::containing_excluding(n, j, i)
        .iter()
        .map(|t| (t, excess(game, t, x)))
        .filter(|(_, e)| !e.is_negative())
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

fn decide<G: WorthOracle + ?Sized>(
    game: &G,
    x: &PayoffVector,
    i: usize,
    j: usize,
    s: Coalition,
    counters: &[(Coalition, Rational)],
) -> ObjectionOutcome {
    if !excess(game, s, x).is_positive() {
        let mut witness = vec![ObjectionConstraint::Budget];
        witness.extend(s.iter().map(ObjectionConstraint::Improve));
        return ObjectionOutcome::Countered { witness };
    }
    if let Some((t, _)) = counters.iter().find(|(t, _)| t.is_disjoint(s)) {
        return ObjectionOutcome::Countered {
            witness: vec![ObjectionConstraint::Counter(*t)],
        };
    }
    // counters with zero excess are met by any y with y_k > x_k
    let relevant: Vec<(Coalition, Rational)> = counters.iter().filter(|(_, e)| e.is_positive()).cloned().collect();

    let members: Vec<usize> = s.iter().collect();
    let dim = members.len();
    let row = |t: Coalition| -> Vec<Rational> {
        members
            .iter()
            .map(|&k| if t.contains(k) { Rational::one() } else { Rational::zero() })
            .collect()
    };
    let mut labels = vec![ObjectionConstraint::Budget];
    let mut sys = LinSystem::new(dim);
    sys.push(LinConstraint::eq(row(s), game.worth(s), ConstraintTag::Custom("budget".into())));
    for (pos, &k) in members.iter().enumerate() {
        let mut coeffs = vec![Rational::zero(); dim];
        coeffs[pos] = Rational::one();
        sys.push(LinConstraint::ge(coeffs, x.get(k).clone(), ConstraintTag::Custom(format!("improve {k}"))));
        labels.push(ObjectionConstraint::Improve(k));
    }

    loop {
        let strict: Vec<usize> = (1..sys.len()).collect();
        match open_feasible(&sys, &strict).expect("no strict equalities") {
            OpenOutcome::Empty => {
                let keep = open_iis_indices(&sys, &strict, |k| k == 0).expect("system is empty");
                let witness = keep.iter().map(|&k| labels[k]).collect();
                return ObjectionOutcome::Countered { witness };
            }
            OpenOutcome::Witness { point, .. } => {
                // y(T∩S) − (e(T,x) + x(T∩S)) is the margin of condition (3)
                let tightest = relevant
                    .iter()
                    .map(|(t, e)| {
                        let lhs = members
                            .iter()
                            .zip(&point)
                            .filter(|(k, _)| t.contains(**k))
                            .fold(Rational::zero(), |acc, (_, v)| acc + v);
                        (lhs - e - x.sum_over(t.intersection(s)), *t)
                    })
                    .min_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
                match tightest {
                    Some((margin, t)) if !margin.is_positive() => {
                        let e = &relevant.iter().find(|(c, _)| *c == t).expect("listed").1;
                        let rhs = e + x.sum_over(t.intersection(s));
                        assert!(!labels.contains(&ObjectionConstraint::Counter(t)), "cut already present");
                        sys.push(LinConstraint::ge(row(t), rhs, ConstraintTag::Coalition(t)));
                        labels.push(ObjectionConstraint::Counter(t));
                    }
                    _ => {
                        let obj = Objection {
                            i,
                            j,
                            coalition: s,
                            y: point,
                        };
                        assert!(verify_objection(game, x, &obj), "objection failed re-verification");
                        return ObjectionOutcome::Justified(obj);
                    }
                }
            }
        }
    }
}

/// Decides whether `i` has a justified objection against `j` through `S`.
pub fn justified_objection_exists<G: WorthOracle + ?Sized>(
    game: &G,
    x: &PayoffVector,
    i: usize,
    j: usize,
    s: Coalition,
) -> Result<ObjectionOutcome> {
    let n = game.player_count();
    x.check_dimension(n)?;
    if i >= n || j >= n || i == j {
        return Err(Error::BadCoalition(format!("players {i} and {j} must be distinct and in range")));
    }
    if !s.contains(i) || s.contains(j) || !s.is_subset_of(Coalition::grand(n)) {
        return Err(Error::BadCoalition(format!("S = {s:?} must contain {i} and not {j}")));
    }
    let counters = counter_candidates(game, x, i, j)?;
    Ok(decide(game, x, i, j, s, &counters))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BsOptions {
    /// Report one justified objection for every ordered pair that has one,
    /// not just the first.
    pub all_objections: bool,
    /// Keep the counter-witness of every objection that turned out not to be
    /// justified.
    pub witnesses: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounteredObjection {
    pub i: usize,
    pub j: usize,
    pub coalition: Coalition,
    pub witness: Vec<ObjectionConstraint>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BsVerdict {
    pub member: bool,
    /// First justified objection, pairs `(i, j)` in lexicographic order and
    /// coalitions smallest first.
    pub justified: Option<Objection>,
    /// With `all_objections`, the first justified objection of each pair.
    pub objections: Vec<Objection>,
    /// With `witnesses`, why each examined objection is not justified.
    pub countered: Vec<CounteredObjection>,
}

struct PairResult {
    justified: Option<Objection>,
    countered: Vec<CounteredObjection>,
}

fn examine_pair(game: &Game, x: &PayoffVector, i: usize, j: usize, options: &BsOptions) -> Result<PairResult> {
    let n = game.players().len();
    let mut result = PairResult {
        justified: None,
        countered: Vec::new(),
    };
    // T = {j} counterobjects to everything when x_j = v({j})
    if *x.get(j) == game.worth(Coalition::singleton(j)) {
        return Ok(result);
    }
    let counters = counter_candidates(game, x, i, j)?;
    let mut objections: Vec<Coalition> = CoalitionFamily::containing_excluding(n, i, j)
        .iter()
        .filter(|&s| excess(game, s, x).is_positive())
        .collect();
    objections.sort();
    for s in objections {
        match decide(game, x, i, j, s, &counters) {
            ObjectionOutcome::Justified(obj) => {
                result.justified = Some(obj);
                return Ok(result);
            }
            ObjectionOutcome::Countered { witness } => {
                if options.witnesses {
                    result.countered.push(CounteredObjection {
                        i,
                        j,
                        coalition: s,
                        witness,
                    });
                }
            }
        }
    }
    Ok(result)
}

pub fn bargaining_set_check(game: &Game, x: &PayoffVector) -> Result<BsVerdict> {
    bargaining_set_check_with(game, x, &BsOptions::default())
}

/// `x ∈ BS(G)` iff no player has a justified objection against another.
pub fn bargaining_set_check_with(game: &Game, x: &PayoffVector, options: &BsOptions) -> Result<BsVerdict> {
    require_imputation(game, x)?;
    let n = game.players().len();
    check_enumerable(n)?;
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let results: Vec<PairResult> = pairs
        .par_iter()
        .map(|&(i, j)| examine_pair(game, x, i, j, options))
        .collect::<Result<_>>()?;

    let mut verdict = BsVerdict {
        member: true,
        justified: None,
        objections: Vec::new(),
        countered: Vec::new(),
    };
    for r in results {
        verdict.countered.extend(r.countered);
        if let Some(obj) = r.justified {
            verdict.member = false;
            if verdict.justified.is_none() {
                verdict.justified = Some(obj.clone());
            }
            if options.all_objections {
                verdict.objections.push(obj);
            } else {
                break;
            }
        }
    }
    Ok(verdict)
}
