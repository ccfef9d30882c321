use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use coalkit::coalition::MAX_PLAYERS;
use coalkit::concepts::{
    bargaining_set_check_with, core_check, core_nonempty, kernel_check, BsOptions, CoreMode, CoreNonEmptiness,
    KernelVerdict, Objection,
};
use coalkit::engine::Engine;
use coalkit::gadgets::{
    build_bs_gadget, build_kernel_gadget, check_bs_lemma, check_kernel_lemma, normalize_qbf, parse_dimacs,
    parse_qdimacs, qbf_valid, sat_lexmax, Gadget, LemmaReport, Nqbf2Forall, BRUTE_FORCE_MAX_VARS,
};
use coalkit::game::set_enumeration_cap;
use coalkit::rational::format_rational;
use coalkit::repr::{parse_game_json, parse_payoff_json, payoff_to_json, GameFile};
use coalkit::treewidth::{decompose, Method};
use coalkit::{Coalition, Error, Game, PlayerSet, Rational};

/// Exact core, kernel and bargaining-set procedures for compact coalitional
/// games. Results are JSON lines on stdout, a summary on stderr.
#[derive(Parser)]
#[command(name = "coalkit", version, about)]
struct Cli {
    /// Worker threads for parallel enumeration (never changes a verdict).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Allow exhaustive enumeration up to 64 players.
    #[arg(long, global = true)]
    force: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Worth of a coalition given as a comma-separated member list.
    Eval { game: PathBuf, coalition: String },
    /// Membership of a payoff vector in a solution concept.
    Check {
        concept: Concept,
        game: PathBuf,
        payoff: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        engine: EngineArg,
        /// Report one justified objection per ordered pair (bs only).
        #[arg(long)]
        all_objections: bool,
    },
    /// Decide whether the core is non-empty.
    CoreNonempty {
        game: PathBuf,
        #[arg(long, value_enum, default_value = "constraint-generation")]
        mode: ModeArg,
        #[arg(long, value_enum, default_value = "auto")]
        engine: EngineArg,
        /// Include the emptiness certificate with coalition worths.
        #[arg(long)]
        certificate: bool,
    },
    /// Build a reduction instance from a DIMACS (kernel) or QDIMACS (bs) file.
    Gadget {
        kind: GadgetKind,
        formula: PathBuf,
        /// Output prefix; writes PREFIX.game.json and PREFIX.payoff.json.
        #[arg(long)]
        out: PathBuf,
        /// Rewrite a general forall-exists 2QBF into twin form first.
        #[arg(long)]
        normalize: bool,
    },
    /// Treewidth upper bound (or exact value) of a graph game.
    Treewidth {
        game: PathBuf,
        #[arg(long, value_enum, default_value = "min-fill")]
        method: MethodArg,
        /// Include the bags and parent links of the decomposition.
        #[arg(long)]
        dump: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Concept {
    Core,
    Kernel,
    Bs,
}

#[derive(Clone, Copy, ValueEnum)]
enum GadgetKind {
    Kernel,
    Bs,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Auto,
    Enumerate,
    TreewidthDp,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Engine {
        match e {
            EngineArg::Auto => Engine::Auto,
            EngineArg::Enumerate => Engine::Enumerate,
            EngineArg::TreewidthDp => Engine::TreewidthDp,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    FullLp,
    ConstraintGeneration,
}

impl From<ModeArg> for CoreMode {
    fn from(m: ModeArg) -> CoreMode {
        match m {
            ModeArg::FullLp => CoreMode::FullLp,
            ModeArg::ConstraintGeneration => CoreMode::ConstraintGeneration,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    MinDegree,
    MinFill,
    ExactSmall,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::MinDegree => Method::MinDegree,
            MethodArg::MinFill => Method::MinFill,
            MethodArg::ExactSmall => Method::ExactSmall,
        }
    }
}

/// Input problems exit with 2, engine limits with 3.
enum Failure {
    Input(String),
    Engine(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::EngineUnsupported(_) | Error::TooManyPlayers { .. } | Error::TooLargeForExact(_) => {
                Failure::Engine(e.to_string())
            }
            _ => Failure::Input(e.to_string()),
        }
    }
}

type CmdResult = Result<(Value, String), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_game(path: &Path) -> Result<Game, Failure> {
    parse_game_json(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn digest(game: &Game) -> String {
    hex::encode(Sha256::digest(GameFile::from_game(game).to_json().as_bytes()))
}

fn rat(r: &Rational) -> Value {
    Value::String(format_rational(r))
}

fn names(players: &PlayerSet, s: Coalition) -> Value {
    json!(players.member_names(s))
}

fn objection_json(players: &PlayerSet, obj: &Objection) -> Value {
    let y: serde_json::Map<String, Value> = obj.entries().map(|(k, v)| (players.name(k).to_string(), rat(v))).collect();
    json!({
        "i": players.name(obj.i),
        "j": players.name(obj.j),
        "coalition": names(players, obj.coalition),
        "y": y,
    })
}

fn cmd_eval(game: &Path, coalition: &str) -> CmdResult {
    let g = load_game(game)?;
    let s = g.players().parse_coalition(coalition)?;
    let worth = coalkit::WorthOracle::worth(&g, s);
    let summary = format!("v({{{}}}) = {}", g.players().format_coalition(s), format_rational(&worth));
    Ok((
        json!({
            "game_digest": digest(&g),
            "coalition": names(g.players(), s),
            "worth": rat(&worth),
        }),
        summary,
    ))
}

fn cmd_check(concept: Concept, game: &Path, payoff: &Path, engine: Engine, all_objections: bool) -> CmdResult {
    let g = load_game(game)?;
    let players = g.players().clone();
    let x = parse_payoff_json(&read(payoff)?, &players)?;
    let mut report = json!({ "game_digest": digest(&g), "payoff": payoff_to_json(&x, &players) });
    let summary = match concept {
        Concept::Core => {
            report["concept"] = json!("core");
            let v = core_check(&g, &x, engine)?;
            report["member"] = json!(v.member);
            report["blocking"] = match &v.blocking {
                Some((s, deficit)) => json!({ "coalition": names(&players, *s), "deficit": rat(deficit) }),
                None => Value::Null,
            };
            report["overpaid"] = v.overpaid.as_ref().map_or(Value::Null, rat);
            match &v.blocking {
                Some((s, d)) => format!("core: not a member, {{{}}} blocks by {}", players.format_coalition(*s), format_rational(d)),
                None if v.member => "core: member".to_string(),
                None => "core: not a member, x(N) exceeds v(N)".to_string(),
            }
        }
        Concept::Kernel => {
            report["concept"] = json!("kernel");
            match kernel_check(&g, &x, engine)? {
                KernelVerdict::Member => {
                    report["member"] = json!(true);
                    report["violated"] = Value::Null;
                    "kernel: member".to_string()
                }
                KernelVerdict::Violated { i, j, s_ij, s_ji } => {
                    report["member"] = json!(false);
                    report["violated"] = json!({
                        "i": players.name(i),
                        "j": players.name(j),
                        "s_ij": rat(&s_ij),
                        "s_ji": rat(&s_ji),
                    });
                    format!(
                        "kernel: not a member, {} outweighs {} ({} > {}) and x_{} exceeds v({{{}}})",
                        players.name(i),
                        players.name(j),
                        format_rational(&s_ij),
                        format_rational(&s_ji),
                        players.name(j),
                        players.name(j)
                    )
                }
            }
        }
        Concept::Bs => {
            report["concept"] = json!("bs");
            if engine == Engine::TreewidthDp {
                return Err(Failure::Engine("the bargaining-set check always enumerates".into()));
            }
            let options = BsOptions {
                all_objections,
                witnesses: false,
            };
            let v = bargaining_set_check_with(&g, &x, &options)?;
            report["member"] = json!(v.member);
            report["objection"] = v.justified.as_ref().map_or(Value::Null, |o| objection_json(&players, o));
            if all_objections {
                report["objections"] = Value::Array(v.objections.iter().map(|o| objection_json(&players, o)).collect());
            }
            match &v.justified {
                Some(o) => format!(
                    "bs: not a member, {} objects against {} via {{{}}}",
                    players.name(o.i),
                    players.name(o.j),
                    players.format_coalition(o.coalition)
                ),
                None => "bs: member".to_string(),
            }
        }
    };
    Ok((report, summary))
}

fn cmd_core_nonempty(game: &Path, mode: CoreMode, engine: Engine, certificate: bool) -> CmdResult {
    let g = load_game(game)?;
    let players = g.players().clone();
    let mut report = json!({ "game_digest": digest(&g) });
    let summary = match core_nonempty(&g, mode, engine)? {
        CoreNonEmptiness::NonEmpty(x) => {
            report["nonempty"] = json!(true);
            report["core_point"] = payoff_to_json(&x, &players);
            "core is non-empty".to_string()
        }
        CoreNonEmptiness::Empty(cert) => {
            report["nonempty"] = json!(false);
            report["certificate_size"] = json!(cert.coalitions.len());
            if certificate {
                report["certificate"] = json!({
                    "coalitions": cert
                        .coalitions
                        .iter()
                        .map(|(s, w)| json!({ "coalition": names(&players, *s), "worth": rat(w) }))
                        .collect::<Vec<_>>(),
                    "grand_worth": rat(&cert.grand_worth),
                });
            }
            format!("core is empty, certified by {} coalitions", cert.coalitions.len())
        }
    };
    Ok((report, summary))
}

fn lemma_json(r: &LemmaReport) -> Value {
    let checks: serde_json::Map<String, Value> = r.checks.iter().map(|(k, ok)| (k.to_string(), json!(ok))).collect();
    json!({ "d": rat(&r.d), "normalizer": rat(&r.normalizer), "checks": checks, "all_hold": r.all_hold() })
}

fn write_gadget(g: &Gadget, out: &Path) -> Result<(PathBuf, PathBuf), Failure> {
    let base = out.to_string_lossy();
    let game_path = PathBuf::from(format!("{base}.game.json"));
    let payoff_path = PathBuf::from(format!("{base}.payoff.json"));
    let game = Game::Graph(g.game.clone());
    write(&game_path, &GameFile::from_game(&game).to_json())?;
    write(&payoff_path, &payoff_to_json(&g.payoff, g.game.players()).to_string())?;
    Ok((game_path, payoff_path))
}

fn cmd_gadget(kind: GadgetKind, formula: &Path, out: &Path, normalize: bool) -> CmdResult {
    let text = read(formula)?;
    let (gadget, lemma, expected) = match kind {
        GadgetKind::Kernel => {
            let phi = parse_dimacs(&text)?;
            let g = build_kernel_gadget(&phi)?;
            let expected = if phi.num_vars() <= BRUTE_FORCE_MAX_VARS {
                match sat_lexmax(&phi)? {
                    Some(model) => json!({ "satisfiable": true, "alpha1_in_lexmax": model[0], "member": model[0] }),
                    None => json!({ "satisfiable": false }),
                }
            } else {
                Value::Null
            };
            let lemma = check_kernel_lemma(&g)?;
            (g, lemma, expected)
        }
        GadgetKind::Bs => {
            let q = parse_qdimacs(&text)?;
            let phi = if normalize { normalize_qbf(&q) } else { Nqbf2Forall::new(q)? };
            let g = build_bs_gadget(&phi)?;
            let expected = if phi.qbf().matrix.num_vars() <= BRUTE_FORCE_MAX_VARS {
                let valid = qbf_valid(phi.qbf())?;
                json!({ "valid": valid, "member": valid })
            } else {
                Value::Null
            };
            let lemma = check_bs_lemma(&g)?;
            (g, lemma, expected)
        }
    };
    let (game_path, payoff_path) = write_gadget(&gadget, out)?;
    let players = gadget.game.players().len();
    let report = json!({
        "kind": match kind { GadgetKind::Kernel => "kernel", GadgetKind::Bs => "bs" },
        "game_digest": digest(&Game::Graph(gadget.game.clone())),
        "game_file": game_path.display().to_string(),
        "payoff_file": payoff_path.display().to_string(),
        "players": players,
        "n": gadget.n,
        "m": gadget.m,
        "expected": expected,
        "lemma": lemma_json(&lemma),
    });
    let summary = format!("wrote {players}-player game to {}", game_path.display());
    Ok((report, summary))
}

fn cmd_treewidth(game: &Path, method: Method, dump: bool) -> CmdResult {
    let g = load_game(game)?;
    let graph = g
        .as_graph()
        .ok_or_else(|| Failure::Engine(format!("treewidth needs a graph game, got {}", g.kind())))?;
    let td = decompose(graph, method)?;
    let players = g.players();
    let mut report = json!({ "game_digest": digest(&g), "width": td.width() });
    if dump {
        report["decomposition"] = json!({
            "bags": td.bags.iter().map(|b| names(players, *b)).collect::<Vec<_>>(),
            "parent": td.parent,
            "root": td.root,
        });
    }
    Ok((report, format!("width {} with {} bags", td.width(), td.bags.len())))
}

fn configure(cli: &Cli) -> Result<(), Failure> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Failure::Input(format!("--jobs: {e}")))?;
    }
    if cli.force {
        set_enumeration_cap(MAX_PLAYERS);
    } else if let Ok(cap) = std::env::var("COALKIT_MAX_PLAYERS") {
        let cap = cap
            .trim()
            .parse::<usize>()
            .map_err(|_| Failure::Input(format!("COALKIT_MAX_PLAYERS must be an integer, got {cap:?}")))?;
        set_enumeration_cap(cap);
    }
    Ok(())
}

fn run(cli: &Cli) -> CmdResult {
    configure(cli)?;
    match &cli.command {
        Command::Eval { game, coalition } => cmd_eval(game, coalition),
        Command::Check {
            concept,
            game,
            payoff,
            engine,
            all_objections,
        } => cmd_check(*concept, game, payoff, (*engine).into(), *all_objections),
        Command::CoreNonempty {
            game,
            mode,
            engine,
            certificate,
        } => cmd_core_nonempty(game, (*mode).into(), (*engine).into(), *certificate),
        Command::Gadget {
            kind,
            formula,
            out,
            normalize,
        } => cmd_gadget(*kind, formula, out, *normalize),
        Command::Treewidth { game, method, dump } => cmd_treewidth(game, (*method).into(), *dump),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Eval { .. } => "eval",
        Command::Check { .. } => "check",
        Command::CoreNonempty { .. } => "core-nonempty",
        Command::Gadget { .. } => "gadget",
        Command::Treewidth { .. } => "treewidth",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let outcome = run(&cli);
    let wall_us = start.elapsed().as_micros() as u64;
    let command = command_name(&cli.command);
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let (mut report, summary, code) = match outcome {
        Ok((report, summary)) => (report, summary, 0),
        Err(Failure::Input(msg)) => (json!({ "error": "input", "message": msg }), format!("error: {msg}"), 2),
        Err(Failure::Engine(msg)) => (
            json!({ "error": "engine-unsupported", "message": msg }),
            format!("error: {msg}"),
            3,
        ),
    };
    report["command"] = json!(command);
    report["args"] = json!(argv);
    report["wall_us"] = json!(wall_us);
    println!("{report}");
    eprintln!("{command}: {summary}");
    ExitCode::from(code)
}
