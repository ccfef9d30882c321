//! Independent oracles and random instance generators shared by the
//! integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use num::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use coalkit::game::{excess, PayoffVector, PlayerSet, WorthOracle};
use coalkit::lp::{solve, ConstraintTag, LinConstraint, LinSystem, LpOutcome, Relation, Sense};
use coalkit::rational::{frac, int};
use coalkit::repr::{ExplicitGame, Game, GraphGame};
use coalkit::{Coalition, Rational};

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// Fourier–Motzkin

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rel {
    Ge,
    Le,
    Eq,
    Gt,
    Lt,
}

/// `a · x  rel  b` over the rationals.
#[derive(Clone, Debug)]
pub struct Row {
    pub a: Vec<Rational>,
    pub rel: Rel,
    pub b: Rational,
}

/// `a · x ≥ b` (or `>` when `strict`), scaled so the first non-zero
/// coefficient has magnitude one.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Half {
    a: Vec<Rational>,
    b: Rational,
    strict: bool,
}

impl Half {
    fn normalized(mut self) -> Half {
        if let Some(lead) = self.a.iter().find(|c| !c.is_zero()).map(|c| c.abs()) {
            for c in &mut self.a {
                *c /= &lead;
            }
            self.b /= &lead;
        }
        self
    }
}

fn halves(rows: &[Row]) -> Vec<Half> {
    let neg = |v: &[Rational]| v.iter().map(|c| -c).collect::<Vec<_>>();
    let mut out = Vec::new();
    for r in rows {
        let ge = Half { a: r.a.clone(), b: r.b.clone(), strict: false };
        let le = Half { a: neg(&r.a), b: -&r.b, strict: false };
        match r.rel {
            Rel::Ge => out.push(ge),
            Rel::Le => out.push(le),
            Rel::Eq => {
                out.push(ge);
                out.push(le);
            }
            Rel::Gt => out.push(Half { strict: true, ..ge }),
            Rel::Lt => out.push(Half { strict: true, ..le }),
        }
    }
    out
}

/// Feasibility by Fourier–Motzkin elimination, strict rows included.
pub fn fm_feasible(dim: usize, rows: &[Row]) -> bool {
    let mut set: BTreeSet<Half> = halves(rows).into_iter().map(Half::normalized).collect();
    let mut remaining: Vec<usize> = (0..dim).collect();
    while !remaining.is_empty() {
        // eliminate the variable with the fewest generated pairs
        let (pos_in_remaining, &k) = remaining
            .iter()
            .enumerate()
            .min_by_key(|(_, &k)| {
                let p = set.iter().filter(|h| h.a[k].is_positive()).count();
                let n = set.iter().filter(|h| h.a[k].is_negative()).count();
                p * n
            })
            .unwrap();
        remaining.remove(pos_in_remaining);
        let (mut pos, mut neg, mut keep) = (Vec::new(), Vec::new(), BTreeSet::new());
        for h in set {
            if h.a[k].is_positive() {
                pos.push(h);
            } else if h.a[k].is_negative() {
                neg.push(h);
            } else {
                keep.insert(h);
            }
        }
        for p in &pos {
            for q in &neg {
                let (cp, cq) = (-&q.a[k], p.a[k].clone());
                let a: Vec<Rational> = p.a.iter().zip(&q.a).map(|(x, y)| x * &cp + y * &cq).collect();
                let b = &p.b * &cp + &q.b * &cq;
                keep.insert(Half { a, b, strict: p.strict || q.strict }.normalized());
            }
        }
        set = keep;
    }
    set.iter().all(|h| if h.strict { h.b.is_negative() } else { !h.b.is_positive() })
}

pub fn row_of(c: &LinConstraint) -> Row {
    let rel = match c.relation {
        Relation::Ge => Rel::Ge,
        Relation::Le => Rel::Le,
        Relation::Eq => Rel::Eq,
    };
    Row { a: c.coeffs.clone(), rel, b: c.rhs.clone() }
}

pub fn fm_system_feasible(sys: &LinSystem) -> bool {
    let rows: Vec<Row> = sys.constraints.iter().map(row_of).collect();
    fm_feasible(sys.dim, &rows)
}

/// Feasibility with the constraints in `strict` holding strictly.
pub fn fm_open_feasible(sys: &LinSystem, strict: &[usize]) -> bool {
    let rows: Vec<Row> = sys
        .constraints
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let mut r = row_of(c);
            if strict.contains(&k) {
                r.rel = match r.rel {
                    Rel::Ge => Rel::Gt,
                    Rel::Le => Rel::Lt,
                    other => other,
                };
            }
            r
        })
        .collect();
    fm_feasible(sys.dim, &rows)
}

// ---------------------------------------------------------------------------
// Brute-force solution concepts

pub fn bf_max_excess<G: WorthOracle + ?Sized>(
    game: &G,
    x: &PayoffVector,
    include: Coalition,
    exclude: Coalition,
) -> Option<Rational> {
    Coalition::grand(game.player_count())
        .subsets()
        .filter(|s| include.is_subset_of(*s) && s.is_disjoint(exclude))
        .map(|s| excess(game, s, x))
        .max()
}

pub fn bf_surplus<G: WorthOracle + ?Sized>(game: &G, i: usize, j: usize, x: &PayoffVector) -> Rational {
    bf_max_excess(game, x, Coalition::singleton(i), Coalition::singleton(j)).expect("{i} qualifies")
}

pub fn bf_is_imputation<G: WorthOracle + ?Sized>(game: &G, x: &PayoffVector) -> bool {
    let n = game.player_count();
    x.total() == game.worth(Coalition::grand(n)) && (0..n).all(|i| x.get(i) >= &game.worth(Coalition::singleton(i)))
}

pub fn bf_in_core<G: WorthOracle + ?Sized>(game: &G, x: &PayoffVector) -> bool {
    let n = game.player_count();
    x.total() == game.worth(Coalition::grand(n))
        && Coalition::grand(n).subsets().all(|s| !excess(game, s, x).is_positive())
}

pub fn bf_in_kernel<G: WorthOracle + ?Sized>(game: &G, x: &PayoffVector) -> bool {
    let n = game.player_count();
    bf_is_imputation(game, x)
        && (0..n).all(|i| {
            (0..n).filter(|&j| j != i).all(|j| {
                bf_surplus(game, i, j, x) <= bf_surplus(game, j, i, x) || *x.get(j) == game.worth(Coalition::singleton(j))
            })
        })
}

// ---------------------------------------------------------------------------
// Nucleolus by sequential linear programs

fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&k| !m[k][c].is_zero()) else { continue };
        m.swap(r, p);
        for k in 0..m.len() {
            if k != r && !m[k][c].is_zero() {
                let f = &m[k][c] / &m[r][c];
                let pivot = m[r].clone();
                for (dst, src) in m[k].iter_mut().zip(&pivot) {
                    *dst -= &f * src;
                }
            }
        }
        r += 1;
    }
    r
}

fn indicator(n: usize, s: Coalition) -> Vec<Rational> {
    (0..n).map(|i| if s.contains(i) { Rational::one() } else { Rational::zero() }).collect()
}

/// The nucleolus, or `None` when the imputation set is empty. Variables are
/// `x_0 … x_{n-1}` followed by the excess level `t`.
pub fn nucleolus<G: WorthOracle + ?Sized>(game: &G) -> Option<PayoffVector> {
    let n = game.player_count();
    let grand = Coalition::grand(n);
    let tag = || ConstraintTag::Custom("nucleolus".into());
    let lift = |s: Coalition, t: Rational| {
        let mut a = indicator(n, s);
        a.push(t);
        a
    };
    let mut base = LinSystem::new(n + 1);
    base.push(LinConstraint::eq(lift(grand, Rational::zero()), game.worth(grand), tag()));
    for i in 0..n {
        base.push(LinConstraint::ge(lift(Coalition::singleton(i), Rational::zero()), game.worth(Coalition::singleton(i)), tag()));
    }
    if !coalkit::lp::is_feasible(&base) {
        return None;
    }
    let mut fixed: Vec<Vec<Rational>> = vec![indicator(n, grand)];
    let mut active: Vec<Coalition> = grand.subsets().filter(|s| !s.is_empty() && *s != grand).collect();
    let mut objective = vec![Rational::zero(); n];
    objective.push(Rational::one());
    while rank(&fixed) < n && !active.is_empty() {
        let mut sys = base.clone();
        for &s in &active {
            sys.push(LinConstraint::ge(lift(s, Rational::one()), game.worth(s), tag()));
        }
        let (point, t) = match solve(&sys, Some((&objective, Sense::Min))) {
            LpOutcome::Feasible { point, value } => (point, value.unwrap()),
            other => panic!("nucleolus LP: {other:?}"),
        };
        let mut at_level = sys.clone();
        let mut pin = vec![Rational::zero(); n];
        pin.push(Rational::one());
        at_level.push(LinConstraint::eq(pin, t.clone(), tag()));
        let x = PayoffVector::new(point[..n].to_vec());
        let mut newly = Vec::new();
        for &s in &active {
            if excess(game, s, &x) != t {
                continue;
            }
            // fixed iff e(S, ·) cannot drop below t on the optimal face
            let obj = lift(s, Rational::zero());
            match solve(&at_level, Some((&obj, Sense::Max))) {
                LpOutcome::Feasible { value, .. } if game.worth(s) - value.as_ref().unwrap() == t => newly.push(s),
                LpOutcome::Feasible { .. } => {}
                other => panic!("nucleolus face LP: {other:?}"),
            }
        }
        assert!(!newly.is_empty(), "some coalition is always fixed");
        for s in newly {
            base.push(LinConstraint::eq(lift(s, Rational::zero()), game.worth(s) - &t, tag()));
            fixed.push(indicator(n, s));
            active.retain(|&a| a != s);
        }
    }
    match solve(&base, None) {
        LpOutcome::Feasible { point, .. } => Some(PayoffVector::new(point[..n].to_vec())),
        other => panic!("nucleolus point: {other:?}"),
    }
}

// ---------------------------------------------------------------------------
// Random instances

pub fn random_rational(rng: &mut ChaCha8Rng, lo: i64, hi: i64, den: i64) -> Rational {
    frac(rng.gen_range(lo * den..=hi * den), den)
}

/// Explicit game with integer worths; `spread` bounds `v(S) / |S|`.
pub fn random_explicit(rng: &mut ChaCha8Rng, n: usize, spread: i64) -> Game {
    let players = PlayerSet::numbered(n).unwrap();
    let table: Vec<Rational> = (0..1u64 << n)
        .map(|bits| {
            let k = bits.count_ones() as i64;
            if k == 0 {
                int(0)
            } else {
                int(rng.gen_range(0..=spread * k))
            }
        })
        .collect();
    Game::Explicit(ExplicitGame::new(players, table).unwrap())
}

/// Graph game where each pair is an edge with probability `density`.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, density: f64, lo: i64, hi: i64, den: i64) -> GraphGame {
    let players = PlayerSet::numbered(n).unwrap();
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(density) {
                edges.push((a, b, random_rational(rng, lo, hi, den)));
            }
        }
    }
    GraphGame::new(players, edges).unwrap()
}

pub fn random_payoff(rng: &mut ChaCha8Rng, n: usize, lo: i64, hi: i64, den: i64) -> PayoffVector {
    PayoffVector::new((0..n).map(|_| random_rational(rng, lo, hi, den)).collect())
}

/// Random linear system with small integer coefficients.
pub fn random_system(rng: &mut ChaCha8Rng, dim: usize, rows: usize) -> LinSystem {
    let mut sys = LinSystem::new(dim);
    for k in 0..rows {
        let coeffs: Vec<Rational> = (0..dim).map(|_| int(rng.gen_range(-3..=3))).collect();
        let rel = match rng.gen_range(0..10) {
            0 => Relation::Eq,
            1..=5 => Relation::Ge,
            _ => Relation::Le,
        };
        let rhs = int(rng.gen_range(-6..=6));
        sys.push(LinConstraint::new(coeffs, rel, rhs, ConstraintTag::Custom(format!("r{k}"))));
    }
    sys
}
