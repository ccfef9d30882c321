//! The eight acceptance criteria. Runs without the libtest harness so that
//! each criterion prints exactly one PASS/FAIL line.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use num::Signed;
use rand::seq::SliceRandom;
use rand::Rng;

use coalkit::coalition::CoalitionFamily;
use coalkit::concepts::{
    bargaining_set_check, bargaining_set_check_with, core_check, core_nonempty, kernel_check, verify_objection,
    BsOptions, CoreMode, CoreNonEmptiness,
};
use coalkit::engine::{enumerate_max_excess, surplus, Engine, Maximizer};
use coalkit::gadgets::{
    build_bs_gadget, build_kernel_gadget, check_bs_lemma, check_kernel_lemma, qbf_valid, sat_lexmax, Cnf3, Gadget,
    Nqbf2Forall, Qbf2,
};
use coalkit::game::{PayoffVector, WorthOracle};
use coalkit::lp::{extract_iis_indices, farkas_certificate, is_farkas_certificate, is_feasible, open_feasible, open_iis_indices, solve, LpOutcome, Relation};
use coalkit::rational::int;
use coalkit::repr::{parse_game_json, Game};
use coalkit::treewidth::{decompose, max_excess_constrained, ConstraintHandling, Method};
use coalkit::Coalition;

use common::*;

fn fixture_game(name: &str) -> Game {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    parse_game_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn payoff(v: &[i64]) -> PayoffVector {
    PayoffVector::new(v.iter().map(|&k| int(k)).collect())
}

fn set(players: &[usize]) -> Coalition {
    Coalition::from_players(players.iter().copied())
}

fn worked_examples() -> String {
    let fig1 = fixture_game("fig1.json");
    let p = fig1.players().clone();
    assert_eq!(fig1.worth(p.parse_coalition("a,b").unwrap()), int(2));
    assert_eq!(fig1.worth(p.parse_coalition("a,b,d").unwrap()), int(4));

    let ex2 = fixture_game("example2.json");
    let worths: Vec<_> = [set(&[0]), set(&[1]), set(&[0, 1])].iter().map(|&s| ex2.worth(s)).collect();
    assert_eq!(worths, vec![int(3), int(2), int(7)]);

    let g42 = fixture_game("example3_v42.json");
    let g45 = fixture_game("example3_v45.json");
    match core_nonempty(&g42, CoreMode::ConstraintGeneration, Engine::Auto).unwrap() {
        CoreNonEmptiness::Empty(cert) => {
            let listed: Vec<Coalition> = cert.coalitions.iter().map(|(s, _)| *s).collect();
            assert_eq!(listed, vec![set(&[0, 1]), set(&[0, 2]), set(&[1, 2])]);
        }
        other => panic!("three-player game core reported {other:?}"),
    }
    assert!(core_check(&g45, &payoff(&[5, 15, 25]), Engine::Auto).unwrap().member);

    let x = payoff(&[4, 14, 24]);
    assert!(kernel_check(&g42, &x, Engine::Auto).unwrap().is_member());
    for i in 0..3 {
        for j in (0..3).filter(|&j| j != i) {
            assert_eq!(surplus(&g42, i, j, &x, Engine::Auto).unwrap(), int(2), "s_{i}{j}");
        }
    }
    let bad = payoff(&[8, 10, 24]);
    let options = BsOptions {
        all_objections: true,
        witnesses: false,
    };
    let v = bargaining_set_check_with(&g42, &bad, &options).unwrap();
    assert!(!v.member);
    let c_against_a = v.objections.iter().find(|o| o.i == 2 && o.j == 0).expect("c objects against a");
    assert!(verify_objection(&g42, &bad, c_against_a));
    assert!(bargaining_set_check(&g42, &x).unwrap().member);
    "graph, MC-net and explicit-game worths, verdicts and witnesses reproduced exactly".into()
}

fn certificate_theorem() -> String {
    let mut rng = rng(2);
    let mut found = 0;
    let mut fm_crosschecked = 0;
    let mut largest = 0;
    while found < 100 {
        let n = rng.gen_range(2..=8);
        let game = if found % 2 == 0 {
            random_explicit(&mut rng, n, 10)
        } else {
            Game::Graph(random_graph(&mut rng, n, 0.5, -10, 10, 2))
        };
        let mode = if found % 4 < 2 { CoreMode::ConstraintGeneration } else { CoreMode::FullLp };
        let verdict = core_nonempty(&game, mode, Engine::Auto).unwrap();
        if n <= 4 {
            let sys = full_core_system(&game);
            assert_eq!(fm_system_feasible(&sys), matches!(verdict, CoreNonEmptiness::NonEmpty(_)));
            fm_crosschecked += 1;
        }
        let CoreNonEmptiness::Empty(cert) = verdict else { continue };
        assert!(cert.coalitions.len() <= n, "certificate of size {} for n = {n}", cert.coalitions.len());
        assert!(cert.verify(&game));
        assert!(!fm_system_feasible(&cert.system(n)));
        for (s, w) in &cert.coalitions {
            assert_eq!(w, &game.worth(*s));
        }
        largest = largest.max(cert.coalitions.len());
        found += 1;
    }
    format!("100 empty cores certified (largest certificate {largest}), {fm_crosschecked} verdicts cross-checked by Fourier-Motzkin")
}

fn full_core_system(game: &Game) -> coalkit::lp::LinSystem {
    use coalkit::lp::{ConstraintTag, LinConstraint, LinSystem};
    let n = game.player_count();
    let mut sys = LinSystem::new(n);
    for s in Coalition::grand(n).subsets().skip(1) {
        sys.push(LinConstraint::over_coalition(n, s, Relation::Ge, game.worth(s), ConstraintTag::Coalition(s)));
    }
    sys.push(LinConstraint::over_coalition(
        n,
        Coalition::grand(n),
        Relation::Le,
        game.worth(Coalition::grand(n)),
        ConstraintTag::Efficiency,
    ));
    sys
}

fn phi_hat() -> Cnf3 {
    Cnf3::from_ints(3, &[&[1, -2, 3], &[-1, 2, 3]]).unwrap()
}

fn fig3() -> Nqbf2Forall {
    Nqbf2Forall::new(Qbf2::new(vec![1], vec![2, 3, 4], Cnf3::from_ints(4, &[&[1, -2], &[-1, 2], &[2, 3, -4]]).unwrap()).unwrap()).unwrap()
}

fn kernel_players(phi: &Cnf3) -> usize {
    phi.num_vars() + phi.clauses().len() + phi.clauses().iter().map(Vec::len).sum::<usize>() + 2
}

/// φ̂ followed by satisfiable formulas, half with `α_1` true in the
/// lexicographically maximum model and half with it false.
fn kernel_formulas(count: usize) -> Vec<Cnf3> {
    let mut rng = rng(3);
    let mut out = vec![phi_hat()];
    let (mut yes, mut no) = (0, 0);
    let half = (count - 1) / 2;
    while out.len() < count {
        let n = rng.gen_range(2..=4);
        let m = rng.gen_range(1..=3);
        let clauses: Vec<Vec<i64>> = (0..m)
            .map(|_| {
                let size = rng.gen_range(1..=3.min(n));
                let mut vars: Vec<i64> = (1..=n as i64).collect();
                vars.shuffle(&mut rng);
                vars[..size].iter().map(|&v| if rng.gen_bool(0.5) { v } else { -v }).collect()
            })
            .collect();
        let refs: Vec<&[i64]> = clauses.iter().map(Vec::as_slice).collect();
        let phi = Cnf3::from_ints(n, &refs).unwrap();
        if !phi.clauses().iter().any(|c| c.len() >= 2) || kernel_players(&phi) > 16 || out.contains(&phi) {
            continue;
        }
        let Some(model) = sat_lexmax(&phi).unwrap() else { continue };
        let slot = if model[0] { &mut yes } else { &mut no };
        if *slot < half + (count - 1) % 2 {
            *slot += 1;
            out.push(phi);
        }
    }
    out
}

fn kernel_gadgets() -> String {
    let formulas = kernel_formulas(25);
    let mut members = 0;
    assert_eq!(formulas[0], phi_hat());
    for phi in &formulas {
        assert!(kernel_players(phi) <= 16);
        let g = build_kernel_gadget(phi).unwrap();
        let expected = sat_lexmax(phi).unwrap().expect("satisfiable")[0];
        let game = Game::Graph(g.game.clone());
        let got = kernel_check(&game, &g.payoff, Engine::Auto).unwrap().is_member();
        assert_eq!(got, expected, "{}", phi.to_dimacs());
        members += usize::from(got);
    }
    format!("25 formulas agree with the lex-max oracle ({members} members, {} non-members)", 25 - members)
}

/// The twin-form Φ̂ of fig3.qdimacs followed by twin-form instances over `∀x1 ∃x2 x3 x4` whose
/// gadgets have at most 12 players: `(x1 ∨ ¬x2)(¬x1 ∨ x2)` plus extra
/// clauses over the existential variables.
fn bs_instances() -> Vec<Nqbf2Forall> {
    let mut rng = rng(4);
    let mut out = vec![fig3()];
    let mut seen: BTreeSet<Vec<Vec<i64>>> = BTreeSet::new();
    seen.insert(vec![vec![2, 3, -4]]);
    let (mut valid, mut invalid) = (1, 0);
    while out.len() < 10 {
        let lit = |rng: &mut rand_chacha::ChaCha8Rng, v: i64| if rng.gen_bool(0.5) { v } else { -v };
        let extra: Vec<Vec<i64>> = match rng.gen_range(0..4) {
            0 => vec![],
            1 | 2 => {
                let size = rng.gen_range(1..=3);
                let mut vars = vec![2, 3, 4];
                vars.shuffle(&mut rng);
                vec![vars[..size].iter().map(|&v| lit(&mut rng, v)).collect()]
            }
            _ => {
                let (a, b) = (rng.gen_range(2..=4), rng.gen_range(2..=4));
                vec![vec![lit(&mut rng, a)], vec![lit(&mut rng, b)]]
            }
        };
        if !seen.insert(extra.clone()) {
            continue;
        }
        let mut clauses: Vec<Vec<i64>> = vec![vec![1, -2], vec![-1, 2]];
        clauses.extend(extra);
        let refs: Vec<&[i64]> = clauses.iter().map(Vec::as_slice).collect();
        let Ok(matrix) = Cnf3::from_ints(4, &refs) else { continue };
        let phi = Nqbf2Forall::new(Qbf2::new(vec![1], vec![2, 3, 4], matrix).unwrap()).unwrap();
        let slot = if qbf_valid(phi.qbf()).unwrap() { &mut valid } else { &mut invalid };
        if *slot < 5 {
            *slot += 1;
            out.push(phi);
        }
    }
    out
}

fn bs_gadgets() -> String {
    let instances = bs_instances();
    let mut invalid = 0;
    for phi in &instances {
        let g = build_bs_gadget(phi).unwrap();
        assert!(g.game.players().len() <= 12);
        let game = Game::Graph(g.game.clone());
        let valid = qbf_valid(phi.qbf()).unwrap();
        let verdict = bargaining_set_check(&game, &g.payoff).unwrap();
        assert_eq!(verdict.member, valid, "{}", phi.qbf().to_qdimacs());
        if !valid {
            invalid += 1;
            let all = BsOptions {
                all_objections: true,
                witnesses: false,
            };
            let v = bargaining_set_check_with(&game, &g.payoff, &all).unwrap();
            let obj = v
                .objections
                .iter()
                .find(|o| o.i == g.chall && o.j == g.sat)
                .expect("chall has a justified objection against sat");
            assert!(verify_objection(&game, &g.payoff, obj));
        }
    }
    assert!(invalid >= 3);
    format!("10 instances agree with QBF validity ({invalid} invalid, each with chall objecting against sat)")
}

fn dp_oracle() -> String {
    let mut rng = rng(5);
    let mut widest = 0;
    for k in 0..200 {
        let n = rng.gen_range(2..=14);
        let density = rng.gen_range(0.15..0.5);
        let den = rng.gen_range(1..=4);
        let g = random_graph(&mut rng, n, density, -10, 10, den);
        let x = random_payoff(&mut rng, n, -5, 5, den);
        let (mut include, mut exclude) = (Coalition::EMPTY, Coalition::EMPTY);
        for i in 0..n {
            match rng.gen_range(0..10) {
                0 | 1 => include.insert(i),
                2 | 3 => exclude.insert(i),
                _ => {}
            }
        }
        let game = Game::Graph(g.clone());
        let truth = bf_max_excess(&game, &x, include, exclude).unwrap();
        let dp = Maximizer::new(&game, Engine::TreewidthDp).unwrap();
        let (value, s) = dp.max_excess(&x, include, exclude).unwrap().unwrap();
        assert_eq!(value, truth, "game {k}");
        assert!(include.is_subset_of(s) && s.is_disjoint(exclude));
        assert_eq!(coalkit::excess(&game, s, &x), value);
        let (enum_value, _) = enumerate_max_excess(&game, &x, &CoalitionFamily::new(n, include, exclude)).unwrap().unwrap();
        assert_eq!(enum_value, truth);
        let td = decompose(&g, Method::MinFill).unwrap();
        widest = widest.max(td.width());
        let (trick, _) = max_excess_constrained(&g, &x, include, exclude, &td, ConstraintHandling::WeightTrick).unwrap();
        assert_eq!(trick, truth);
        if n >= 2 {
            let i = rng.gen_range(0..n);
            let j = (i + rng.gen_range(1..n)) % n;
            assert_eq!(surplus(&game, i, j, &x, Engine::TreewidthDp).unwrap(), bf_surplus(&game, i, j, &x));
        }
    }
    format!("200 games: DP equals enumeration exactly (widest decomposition {widest})")
}

fn containment() -> String {
    let mut rng = rng(6);
    let (mut core_points, mut kernel_points) = (0, 0);
    for _ in 0..100 {
        let n = rng.gen_range(2..=6);
        let game = random_explicit(&mut rng, n, 6);
        // raise v(N) often enough that many cores are non-empty
        let game = match game {
            Game::Explicit(e) => {
                let mut table = e.table().to_vec();
                *table.last_mut().unwrap() += int(rng.gen_range(0..=8 * n as i64));
                Game::Explicit(coalkit::repr::ExplicitGame::new(e.players().clone(), table).unwrap())
            }
            _ => unreachable!(),
        };
        if let CoreNonEmptiness::NonEmpty(x) = core_nonempty(&game, CoreMode::ConstraintGeneration, Engine::Auto).unwrap() {
            assert!(bf_in_core(&game, &x));
            assert!(bargaining_set_check(&game, &x).unwrap().member, "core point outside BS");
            core_points += 1;
        }
        if let Some(x) = nucleolus(&game) {
            assert!(bf_in_kernel(&game, &x), "nucleolus must lie in the kernel");
            assert!(kernel_check(&game, &x, Engine::Auto).unwrap().is_member());
            assert!(bargaining_set_check(&game, &x).unwrap().member, "kernel point outside BS");
            kernel_points += 1;
            if bf_in_core(&game, &x) {
                core_points += 1;
            }
        }
    }
    assert!(core_points > 0 && kernel_points > 0);
    format!("{core_points} core points and {kernel_points} kernel points all in the bargaining set")
}

/// `max { v(S) : {chall, sat} ⊄ S }` by enumeration.
fn d_by_enumeration(g: &Gadget) -> coalkit::Rational {
    let zero = PayoffVector::zeros(g.game.players().len());
    let a = bf_max_excess(&g.game, &zero, Coalition::EMPTY, Coalition::singleton(g.chall)).unwrap();
    let b = bf_max_excess(&g.game, &zero, Coalition::EMPTY, Coalition::singleton(g.sat)).unwrap();
    a.max(b)
}

fn gadget_lemmas() -> String {
    let mut kernel = 0;
    let mut formulas = kernel_formulas(25);
    let mut rng = rng(7);
    while formulas.len() < 45 {
        let n = rng.gen_range(2..=5);
        let m = rng.gen_range(2..=4);
        let clauses: Vec<Vec<i64>> = (0..m)
            .map(|_| {
                let mut vars: Vec<i64> = (1..=n as i64).collect();
                vars.shuffle(&mut rng);
                let size = rng.gen_range(2..=3.min(n));
                vars[..size].iter().map(|&v| if rng.gen_bool(0.5) { v } else { -v }).collect()
            })
            .collect();
        let refs: Vec<&[i64]> = clauses.iter().map(Vec::as_slice).collect();
        let phi = Cnf3::from_ints(n, &refs).unwrap();
        if kernel_players(&phi) <= 18 {
            formulas.push(phi);
        }
    }
    for phi in &formulas {
        let g = build_kernel_gadget(phi).unwrap();
        let d = d_by_enumeration(&g);
        let w = g.normalizer_weight();
        assert!(w >= &d + int(1), "w({{chall,sat}}) = {w} < D + 1 = {}", &d + int(1));
        for &(a, b) in &g.penalty_edges {
            assert!((&d + g.game.edge_weight(a, b).unwrap()).is_negative());
        }
        let report = check_kernel_lemma(&g).unwrap();
        assert_eq!(report.d, d);
        assert!(report.all_hold());
        kernel += 1;
    }
    let mut bs = 0;
    for phi in bs_instances() {
        let g = build_bs_gadget(&phi).unwrap();
        let d = d_by_enumeration(&g);
        let m = int(g.m as i64);
        assert!(d <= m);
        assert!(g.normalizer_weight() > &m * int(2));
        assert!(g.m >= 2 * g.n);
        let report = check_bs_lemma(&g).unwrap();
        assert_eq!(report.d, d);
        assert!(report.all_hold());
        bs += 1;
    }
    format!("{kernel} kernel gadgets and {bs} bargaining-set gadgets satisfy the weight lemmas")
}

fn lp_engine() -> String {
    let mut rng = rng(8);
    let (mut infeasible, mut open_empty) = (0, 0);
    for k in 0..500 {
        let dim = rng.gen_range(1..=4);
        let rows = rng.gen_range(1..=8);
        let sys = random_system(&mut rng, dim, rows);
        let truth = fm_system_feasible(&sys);
        assert_eq!(is_feasible(&sys), truth, "system {k}: {sys:?}");
        if truth {
            match solve(&sys, None) {
                LpOutcome::Feasible { point, .. } => assert!(sys.satisfied_by(&point)),
                other => panic!("system {k}: {other:?}"),
            }
        } else {
            infeasible += 1;
            let lambda = farkas_certificate(&sys).expect("infeasible systems have a Farkas certificate");
            assert!(is_farkas_certificate(&sys, &lambda));
            let iis = extract_iis_indices(&sys, |_| false).unwrap();
            assert!(iis.len() <= dim + 1, "Helly bound: {} > {}", iis.len(), dim + 1);
            assert!(!fm_system_feasible(&sys.subsystem(&iis)));
            for drop in 0..iis.len() {
                let rest: Vec<usize> = iis.iter().enumerate().filter(|&(p, _)| p != drop).map(|(_, &c)| c).collect();
                assert!(fm_system_feasible(&sys.subsystem(&rest)), "system {k}: IIS not irreducible");
            }
        }

        let strict: Vec<usize> = (0..sys.len())
            .filter(|&c| sys.constraints[c].relation != Relation::Eq && rng.gen_bool(0.5))
            .collect();
        let open_truth = fm_open_feasible(&sys, &strict);
        let outcome = open_feasible(&sys, &strict).unwrap();
        assert_eq!(!outcome.is_empty(), open_truth, "open system {k}");
        if open_truth {
            continue;
        }
        open_empty += 1;
        let keep = open_iis_indices(&sys, &strict, |_| false).unwrap();
        let sub_strict = |idx: &[usize]| -> (coalkit::lp::LinSystem, Vec<usize>) {
            let sub = sys.subsystem(idx);
            let s = idx.iter().enumerate().filter(|(_, c)| strict.contains(c)).map(|(p, _)| p).collect();
            (sub, s)
        };
        let (sub, s) = sub_strict(&keep);
        assert!(!fm_open_feasible(&sub, &s));
        for drop in 0..keep.len() {
            let rest: Vec<usize> = keep.iter().enumerate().filter(|&(p, _)| p != drop).map(|(_, &c)| c).collect();
            let (sub, s) = sub_strict(&rest);
            assert!(fm_open_feasible(&sub, &s), "open system {k}: subsystem not irreducible");
        }
    }
    assert!(infeasible > 0 && open_empty > 0);
    format!("500 systems match Fourier-Motzkin ({infeasible} infeasible, {open_empty} empty with strict rows); IIS irreducible within the Helly bound")
}

type Criterion = (&'static str, Option<Duration>, fn() -> String);

fn main() {
    let criteria: [Criterion; 8] = [
        ("worked examples", Some(Duration::from_secs(1)), worked_examples),
        ("emptiness certificates", Some(Duration::from_secs(30)), certificate_theorem),
        ("kernel gadget end-to-end", Some(Duration::from_secs(600)), kernel_gadgets),
        ("bargaining-set gadget end-to-end", Some(Duration::from_secs(1800)), bs_gadgets),
        ("treewidth DP equals enumeration", Some(Duration::from_secs(300)), dp_oracle),
        ("containment laws", Some(Duration::from_secs(600)), containment),
        ("gadget weight lemmas", None, gadget_lemmas),
        ("LP engine against Fourier-Motzkin", Some(Duration::from_secs(120)), lp_engine),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|v| v.parse().ok());
    let mut failed = 0;
    for (k, (name, limit, run)) in criteria.iter().enumerate() {
        let number = k + 1;
        if only.is_some_and(|o| o != number) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run));
        let elapsed = start.elapsed();
        let line = match outcome {
            Ok(detail) => match limit {
                Some(limit) if elapsed > *limit => Err(format!("{detail}; took {elapsed:.2?}, limit {limit:?}")),
                _ => Ok(detail),
            },
            Err(panic) => Err(panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into())),
        };
        match line {
            Ok(detail) => println!("PASS {number} {name}: {detail} [{elapsed:.2?}]"),
            Err(reason) => {
                failed += 1;
                println!("FAIL {number} {name}: {reason} [{elapsed:.2?}]");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
