//! Graph-game instances from the kernel and bargaining-set hardness
//! reductions, their designated imputations, brute-force SAT/QBF oracles, and
//! self-checks of the weight lemmas.
//!
//! Players are named `alpha_i` (variables), `c_j` (clauses),
//! `lit_i_j_pos` / `lit_i_j_neg` (variable `i` occurring in clause `j`),
//! `chall` and `sat`, all 1-based.

mod formula;

use std::collections::BTreeMap;

use num::{Signed, Zero};

pub use formula::{
    normalize_qbf, parse_dimacs, parse_qdimacs, qbf_valid, sat_lexmax, Cnf3, Lit, Nqbf2Forall, Qbf2, BRUTE_FORCE_MAX_VARS,
};

use crate::coalition::Coalition;
use crate::engine::{Engine, Maximizer};
use crate::error::{Error, Result};
use crate::game::{PayoffVector, PlayerSet};
use crate::rational::{int, pow2, Rational};
use crate::repr::{Game, GraphGame};

/// A generated instance and the imputation its theorem talks about.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gadget {
    pub game: GraphGame,
    pub payoff: PayoffVector,
    /// Number of variables (kernel) or universal variables (bargaining set).
    pub n: usize,
    /// Number of clauses.
    pub m: usize,
    pub penalty_edges: Vec<(usize, usize)>,
    pub chall: usize,
    pub sat: usize,
}

impl Gadget {
    pub fn normalizer_weight(&self) -> Rational {
        self.game
            .edge_weight(self.chall, self.sat)
            .expect("normalizer edge present")
            .clone()
    }

    /// `D = max { v(S) : {chall, sat} ⊄ S }`.
    pub fn max_worth_avoiding_normalizer(&self) -> Result<Rational> {
        let game = Game::Graph(self.game.clone());
        let max = Maximizer::new(&game, Engine::Auto)?;
        let zero = PayoffVector::zeros(self.game.players().len());
        let mut best: Option<Rational> = None;
        for banned in [self.chall, self.sat] {
            let (v, _) = max
                .max_excess(&zero, Coalition::EMPTY, Coalition::singleton(banned))?
                .expect("non-empty family");
            best = Some(match best {
                Some(b) if b >= v => b,
                _ => v,
            });
        }
        Ok(best.expect("two families examined"))
    }
}

#[derive(Default)]
struct Builder {
    names: Vec<String>,
    index: BTreeMap<String, usize>,
    edges: BTreeMap<(usize, usize), Rational>,
    penalties: Vec<(usize, usize)>,
}

impl Builder {
    fn player(&mut self, name: String) -> usize {
        let k = self.names.len();
        self.index.insert(name.clone(), k);
        self.names.push(name);
        k
    }

    fn id(&self, name: &str) -> usize {
        self.index[name]
    }

    fn edge(&mut self, a: usize, b: usize, w: Rational) {
        let key = (a.min(b), a.max(b));
        assert!(self.edges.insert(key, w).is_none(), "parallel edge {key:?}");
    }

    /// Penalty edges may be generated more than once; keep one copy.
    fn penalty(&mut self, a: usize, b: usize, w: &Rational) {
        let key = (a.min(b), a.max(b));
        if !self.edges.contains_key(&key) {
            self.edges.insert(key, w.clone());
            self.penalties.push(key);
        }
    }

    fn finish(mut self, chall: usize, sat: usize, grand: Rational, payoff: Vec<(usize, Rational)>, n: usize, m: usize) -> Result<Gadget> {
        let others = self.edges.values().fold(Rational::zero(), |acc, w| acc + w);
        self.edge(chall, sat, grand - others);
        let players = PlayerSet::new(self.names)?;
        let count = players.len();
        let game = GraphGame::new(players, self.edges.into_iter().map(|((a, b), w)| (a, b, w)))?;
        let mut x = PayoffVector::zeros(count);
        for (k, v) in payoff {
            x.set(k, v);
        }
        self.penalties.sort();
        Ok(Gadget {
            game,
            payoff: x,
            n,
            m,
            penalty_edges: self.penalties,
            chall,
            sat,
        })
    }
}

fn lit_name(lit: Lit, clause: usize) -> String {
    format!("lit_{}_{}_{}", lit.var, clause, if lit.positive { "pos" } else { "neg" })
}

/// `K(φ)`: `x` (everything to `sat`) is in the kernel iff `α_1` is true in
/// the lexicographically maximum satisfying assignment of a satisfiable `φ`.
pub fn build_kernel_gadget(phi: &Cnf3) -> Result<Gadget> {
    if !phi.clauses().iter().any(|c| c.len() >= 2) {
        return Err(Error::MalformedCnf("the kernel gadget needs a clause with at least two literals".into()));
    }
    let n = phi.num_vars();
    let m = phi.clauses().len();
    let mut b = Builder::default();
    for i in 1..=n {
        b.player(format!("alpha_{i}"));
    }
    for j in 1..=m {
        b.player(format!("c_{j}"));
    }
    for (j, clause) in phi.clauses().iter().enumerate() {
        for &lit in clause {
            b.player(lit_name(lit, j + 1));
        }
    }
    let chall = b.player("chall".into());
    let sat = b.player("sat".into());

    let clause_weight = pow2((n + 3) as u32);
    for (j, clause) in phi.clauses().iter().enumerate() {
        let c = b.id(&format!("c_{}", j + 1));
        for &lit in clause {
            let l = b.id(&lit_name(lit, j + 1));
            b.edge(c, l, clause_weight.clone());
        }
    }
    for i in 1..=n {
        let a = b.id(&format!("alpha_{i}"));
        b.edge(chall, a, pow2(i as u32));
        b.edge(sat, a, if i == 1 { int(3) } else { pow2(i as u32) });
    }

    let penalty = -pow2((m + n + 7) as u32);
    let occurrences: Vec<(Lit, usize, usize)> = phi
        .clauses()
        .iter()
        .enumerate()
        .flat_map(|(j, c)| c.iter().map(move |&l| (l, j + 1)))
        .map(|(l, j)| (l, j, b.id(&lit_name(l, j))))
        .collect();
    for &(l1, j1, p1) in &occurrences {
        for &(l2, j2, p2) in &occurrences {
            if p1 >= p2 {
                continue;
            }
            let same_clause = j1 == j2;
            let opposite = l1.var == l2.var && l1.positive != l2.positive;
            if same_clause || opposite {
                b.penalty(p1, p2, &penalty);
            }
        }
        if !l1.positive {
            let a = b.id(&format!("alpha_{}", l1.var));
            b.penalty(a, p1, &penalty);
        }
    }

    b.finish(chall, sat, int(1), vec![(sat, int(1))], n, m)
}

/// `BS(Φ)`: `x` (`m` to `sat`, `n − 1` to `chall`) is in the bargaining set
/// iff `Φ` is valid. Literal players are named after the global variable
/// number of the formula.
pub fn build_bs_gadget(phi: &Nqbf2Forall) -> Result<Gadget> {
    let q = phi.qbf();
    let n = q.universal.len();
    if n == 0 {
        return Err(Error::MalformedQbf("the bargaining-set gadget needs a universal variable".into()));
    }
    let m = q.matrix.clauses().len();
    let mut b = Builder::default();
    for j in 1..=m {
        b.player(format!("c_{j}"));
    }
    for (j, clause) in q.matrix.clauses().iter().enumerate() {
        for &lit in clause {
            b.player(lit_name(lit, j + 1));
        }
    }
    let chall = b.player("chall".into());
    let sat = b.player("sat".into());

    let penalty = -int(m as i64 + 1);
    for (j, clause) in q.matrix.clauses().iter().enumerate() {
        let c = b.id(&format!("c_{}", j + 1));
        for &lit in clause {
            let l = b.id(&lit_name(lit, j + 1));
            b.edge(c, l, int(1));
            if q.is_universal(lit.var) {
                b.edge(chall, l, int(1));
            }
        }
    }
    let occurrences: Vec<(Lit, usize, usize)> = q
        .matrix
        .clauses()
        .iter()
        .enumerate()
        .flat_map(|(j, c)| c.iter().map(move |&l| (l, j + 1)))
        .map(|(l, j)| (l, j, b.id(&lit_name(l, j))))
        .collect();
    for &(l1, j1, p1) in &occurrences {
        for &(l2, j2, p2) in &occurrences {
            if p1 >= p2 {
                continue;
            }
            let opposite = l1.var == l2.var && l1.positive != l2.positive;
            if j1 == j2 || opposite {
                b.penalty(p1, p2, &penalty);
            }
        }
        if !q.is_universal(l1.var) {
            b.penalty(chall, p1, &penalty);
        }
    }
    for j in 1..=m {
        let c = b.id(&format!("c_{j}"));
        b.penalty(chall, c, &penalty);
    }

    let grand = int((n + m) as i64 - 1);
    b.finish(chall, sat, grand, vec![(sat, int(m as i64)), (chall, int(n as i64 - 1))], n, m)
}

/// Outcome of the weight-lemma self-checks on a generated gadget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaReport {
    pub d: Rational,
    pub normalizer: Rational,
    pub checks: Vec<(&'static str, bool)>,
}

impl LemmaReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }
}

fn penalties_dominated(g: &Gadget, d: &Rational) -> bool {
    g.penalty_edges.iter().all(|&(a, b)| {
        let w = g.game.edge_weight(a, b).expect("penalty edge present");
        (d + w).is_negative()
    })
}

/// `w({chall,sat}) ≥ D + 1` and `D + w(e) < 0` for every penalty edge.
pub fn check_kernel_lemma(g: &Gadget) -> Result<LemmaReport> {
    let d = g.max_worth_avoiding_normalizer()?;
    let normalizer = g.normalizer_weight();
    let checks = vec![
        ("normalizer exceeds D", normalizer >= &d + int(1)),
        ("penalties dominate D", penalties_dominated(g, &d)),
    ];
    Ok(LemmaReport { d, normalizer, checks })
}

/// `D ≤ m`, `w({chall,sat}) > 2m`, `D + w(e) < 0` per penalty edge and
/// `m ≥ 2n`.
pub fn check_bs_lemma(g: &Gadget) -> Result<LemmaReport> {
    let d = g.max_worth_avoiding_normalizer()?;
    let normalizer = g.normalizer_weight();
    let m = int(g.m as i64);
    let checks = vec![
        ("D at most m", d <= m),
        ("normalizer exceeds 2m", normalizer > &m * int(2)),
        ("penalties dominate D", penalties_dominated(g, &d)),
        ("m at least 2n", g.m >= 2 * g.n),
    ];
    Ok(LemmaReport { d, normalizer, checks })
}
