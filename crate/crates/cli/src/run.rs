//! Command dispatch.
//!
//! Every subcommand reads a game document (except `fixtures`), runs one
//! library operation, and prints a single JSON report on standard output.
//! Exit codes: 0 the verdict holds or a solution was produced, 1 the
//! verdict fails, 2 no verdict either way (no convergence, unsupported
//! shape, inconclusive certificate), 3 the input was unusable. The report
//! is printed in every case, including input errors.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use dyngame_core::equilibrium::belief_based::check_belief_based;
use dyngame_core::equilibrium::br_eps::EpsSchedule;
use dyngame_core::equilibrium::enumerate::{enumerate_bne_small, EnumerateError, PAYOFF_DEDUP};
use dyngame_core::equilibrium::se::verify_se_canonical;
use dyngame_core::equilibrium::solve::{
    solve_k_based_bne, solve_k_based_se, SolveError, SolverConfig,
};
use dyngame_core::equilibrium::transfer::{transfer_bne_via_usi, TransferError};
use dyngame_core::equilibrium::verify_bne;
use dyngame_core::equilibrium::wpbe::check_wpbe;
use dyngame_core::fixtures::{build_example, run_fixture, standard_suite};
use dyngame_core::game::GameSpec;
use dyngame_core::info_state::{check_msi, check_usi, SamplerConfig};
use dyngame_core::num::{TOL_MODEL, TOL_SOLVER, TOL_WITNESS};

use crate::report::{
    digest_input, ReportBuilder, EXIT_FAILS, EXIT_INCONCLUSIVE, EXIT_INPUT, EXIT_OK,
};
use crate::textfmt::{parse_gamespec, GameDocument, ParseError, Pos};

#[derive(Parser)]
#[command(
    name = "dyngame",
    version,
    about = "Analyze finite dynamic games with compressed information",
    max_term_width = 100
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Args)]
pub struct CommonArgs {
    /// RNG seed for sampled checks
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Drift or gap tolerance, by command
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Floor schedule a,r,n with points a*r^k for k < n
    #[arg(long, value_name = "A,R,N", value_parser = parse_eps_geom, global = true)]
    pub eps_geom: Option<EpsGeom>,
    /// Sampled strategy profiles per test
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Per-action probability floor of sampled strategies
    #[arg(long, global = true)]
    pub mix_floor: Option<f64>,
    /// Leave volatile fields (timestamp, wall time) out of the report
    #[arg(long, global = true)]
    pub no_timestamp: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct EpsGeom {
    pub first: f64,
    pub ratio: f64,
    pub count: usize,
}

fn parse_eps_geom(s: &str) -> Result<EpsGeom, String> {
    let parts: Vec<&str> = s.split(',').collect();
    let [a, r, n] = parts[..] else {
        return Err("expected three comma-separated values a,r,n".to_string());
    };
    Ok(EpsGeom {
        first: a.trim().parse().map_err(|_| format!("bad first point `{a}`"))?,
        ratio: r.trim().parse().map_err(|_| format!("bad ratio `{r}`"))?,
        count: n.trim().parse().map_err(|_| format!("bad count `{n}`"))?,
    })
}

#[derive(Subcommand)]
pub enum Command {
    /// Parse a document and re-validate the model
    Validate {
        input: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Sampled mutual sufficiency of the document's summary maps
    CheckMsi {
        input: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Sampled unilateral sufficiency of one player's summary map
    CheckUsi {
        input: PathBuf,
        /// Player name, a letter A, B, .. by position, or a 0-based index
        #[arg(long)]
        player: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Equilibrium over the document's summaries, certified on full histories
    SolveBne {
        input: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Deviation gaps of a named strategy profile
    VerifyBne {
        input: PathBuf,
        /// Strategy section name; may be left out when there is exactly one
        #[arg(long)]
        strategy: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Equilibrium surviving vanishing trembles, over the document's summaries
    SolveSe {
        input: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Tremble certificate of a named strategy profile
    VerifySe {
        input: PathBuf,
        /// Strategy section name; may be left out when there is exactly one
        #[arg(long)]
        strategy: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Carry a named equilibrium onto the document's summaries
    TransferUsi {
        input: PathBuf,
        /// Strategy section name; may be left out when there is exactly one
        #[arg(long)]
        strategy: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// All equilibrium payoff vectors of a small game
    EnumerateBne {
        input: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Bayes consistency and sequential rationality of a named assessment
    CheckWpbe {
        input: PathBuf,
        /// Strategy section name; may be left out when there is exactly one
        #[arg(long)]
        strategy: Option<String>,
        /// Belief section name; may be left out when there is exactly one
        #[arg(long)]
        belief: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Whether a named profile factors through (shared belief, private code)
    CheckBeliefBased {
        input: PathBuf,
        /// Strategy section name; may be left out when there is exactly one
        #[arg(long)]
        strategy: Option<String>,
        /// Split section name; may be left out when there is exactly one
        #[arg(long)]
        split: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Replay the built-in examples against their frozen claims
    Fixtures {
        /// Run every fixture (the default when no names are given)
        #[arg(long)]
        all: bool,
        /// Fixture names to run
        names: Vec<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::CheckMsi { .. } => "check-msi",
            Command::CheckUsi { .. } => "check-usi",
            Command::SolveBne { .. } => "solve-bne",
            Command::VerifyBne { .. } => "verify-bne",
            Command::SolveSe { .. } => "solve-se",
            Command::VerifySe { .. } => "verify-se",
            Command::TransferUsi { .. } => "transfer-usi",
            Command::EnumerateBne { .. } => "enumerate-bne",
            Command::CheckWpbe { .. } => "check-wpbe",
            Command::CheckBeliefBased { .. } => "check-belief-based",
            Command::Fixtures { .. } => "fixtures",
        }
    }

    fn common(&self) -> &CommonArgs {
        match self {
            Command::Validate { common, .. }
            | Command::CheckMsi { common, .. }
            | Command::CheckUsi { common, .. }
            | Command::SolveBne { common, .. }
            | Command::VerifyBne { common, .. }
            | Command::SolveSe { common, .. }
            | Command::VerifySe { common, .. }
            | Command::TransferUsi { common, .. }
            | Command::EnumerateBne { common, .. }
            | Command::CheckWpbe { common, .. }
            | Command::CheckBeliefBased { common, .. }
            | Command::Fixtures { common, .. } => common,
        }
    }
}

/// The whole verdict of one invocation.
type Outcome = (String, i32, Value);

fn input_error(msg: impl Into<String>) -> Outcome {
    ("input-error".to_string(), EXIT_INPUT, json!({ "error": msg.into() }))
}

/// Process entry point: parse argv, run, print the report, return the code.
pub fn main_entry() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    EXIT_OK
                }
                _ => {
                    eprintln!("{e}");
                    let b = ReportBuilder::new("(argv)", 1, true);
                    let (verdict, code, payload) = input_error(e.to_string());
                    println!("{}", b.finish(verdict, code, payload).to_json());
                    code
                }
            };
        }
    };
    execute(cli.command)
}

pub fn execute(command: Command) -> i32 {
    let common = command.common().clone();
    let threads = match effective_threads() {
        Ok(t) => t,
        Err(msg) => {
            let b = ReportBuilder::new(command.name(), 1, !common.no_timestamp);
            let (verdict, code, payload) = input_error(msg);
            println!("{}", b.finish(verdict, code, payload).to_json());
            return code;
        }
    };
    let mut b = ReportBuilder::new(command.name(), threads, !common.no_timestamp);
    if let Some(seed) = common.seed {
        b.seed(seed);
    }
    let (verdict, code, payload) = dispatch(&command, &common, &mut b);
    println!("{}", b.finish(verdict, code, payload).to_json());
    code
}

/// Parallelism cap; the analyses themselves are single-threaded, so this
/// only validates and records the requested budget.
fn effective_threads() -> Result<usize, String> {
    match std::env::var("DYNGAME_THREADS") {
        Err(std::env::VarError::NotPresent) => Ok(1),
        Err(e) => Err(format!("DYNGAME_THREADS: {e}")),
        Ok(v) => match v.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(format!("DYNGAME_THREADS must be a positive integer, got `{v}`")),
        },
    }
}

fn dispatch(command: &Command, common: &CommonArgs, b: &mut ReportBuilder) -> Outcome {
    match command {
        Command::Validate { input, .. } => cmd_validate(input, b),
        Command::CheckMsi { input, .. } => cmd_check_msi(input, common, b),
        Command::CheckUsi { input, player, .. } => cmd_check_usi(input, player, common, b),
        Command::SolveBne { input, .. } => cmd_solve(input, common, b, false),
        Command::VerifyBne { input, strategy, .. } => cmd_verify_bne(input, strategy, common, b),
        Command::SolveSe { input, .. } => cmd_solve(input, common, b, true),
        Command::VerifySe { input, strategy, .. } => cmd_verify_se(input, strategy, common, b),
        Command::TransferUsi { input, strategy, .. } => {
            cmd_transfer_usi(input, strategy, common, b)
        }
        Command::EnumerateBne { input, .. } => cmd_enumerate(input, b),
        Command::CheckWpbe { input, strategy, belief, .. } => {
            cmd_check_wpbe(input, strategy, belief, b)
        }
        Command::CheckBeliefBased { input, strategy, split, .. } => {
            cmd_check_belief_based(input, strategy, split, common, b)
        }
        Command::Fixtures { names, .. } => cmd_fixtures(names, b),
    }
}

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

fn parse_error_payload(e: &ParseError) -> Value {
    let pos: Option<Pos> = match e {
        ParseError::Syntax { pos, .. } | ParseError::Semantic { pos, .. } => Some(*pos),
        ParseError::Validation(_) => None,
    };
    match pos {
        Some(p) if p.line > 0 => {
            json!({ "error": e.to_string(), "line": p.line, "column": p.col })
        }
        _ => json!({ "error": e.to_string() }),
    }
}

fn load_doc(path: &Path, b: &mut ReportBuilder) -> Result<GameDocument, Outcome> {
    let digest = digest_input(path)
        .map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    b.input(digest);
    let text = std::fs::read_to_string(path)
        .map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    parse_gamespec(&text).map_err(|e| {
        ("input-error".to_string(), EXIT_INPUT, parse_error_payload(&e))
    })
}

fn sampler_config(common: &CommonArgs) -> SamplerConfig {
    let mut cfg = SamplerConfig::default();
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(m) = common.samples {
        cfg.samples = m;
    }
    if let Some(f) = common.mix_floor {
        cfg.mix_floor = f;
    }
    if let Some(t) = common.tol {
        cfg.tol = t;
    }
    cfg
}

fn schedule_from(common: &CommonArgs) -> Result<EpsSchedule, Outcome> {
    match common.eps_geom {
        None => Ok(EpsSchedule::standard()),
        Some(g) => EpsSchedule::geometric(g.first, g.ratio, g.count)
            .map_err(|e| input_error(e.to_string())),
    }
}

fn solver_config(common: &CommonArgs) -> Result<SolverConfig, Outcome> {
    let mut cfg = SolverConfig::default();
    cfg.schedule = schedule_from(common)?;
    if let Some(t) = common.tol {
        cfg.tol = t;
    }
    Ok(cfg)
}

fn resolve_player(game: &GameSpec, arg: &str) -> Result<usize, Outcome> {
    let names = &game.def().players;
    if let Some(i) = names.iter().position(|p| p == arg) {
        return Ok(i);
    }
    let lower = arg.to_lowercase();
    if let Some(i) = names.iter().position(|p| p.to_lowercase() == lower) {
        return Ok(i);
    }
    if let [c] = arg.chars().collect::<Vec<_>>()[..] {
        if c.is_ascii_alphabetic() {
            let i = (c.to_ascii_uppercase() as u8 - b'A') as usize;
            if i < names.len() {
                return Ok(i);
            }
        }
    }
    if let Ok(i) = arg.parse::<usize>() {
        if i < names.len() {
            return Ok(i);
        }
    }
    Err(input_error(format!("no player `{arg}`; players are {}", names.join(", "))))
}

/// Resolve a named section, defaulting to the only one when unambiguous.
fn pick<'a, V>(
    map: &'a BTreeMap<String, V>,
    flag: &Option<String>,
    what: &str,
) -> Result<(&'a str, &'a V), Outcome> {
    match flag {
        Some(name) => map
            .get_key_value(name.as_str())
            .map(|(k, v)| (k.as_str(), v))
            .ok_or_else(|| {
                input_error(format!(
                    "no {what} section named `{name}`; document has: {}",
                    keys_or_none(map)
                ))
            }),
        None => {
            if map.len() == 1 {
                let (k, v) = map.iter().next().expect("nonempty");
                Ok((k.as_str(), v))
            } else {
                Err(input_error(format!(
                    "pass --{what} to pick one of: {}",
                    keys_or_none(map)
                )))
            }
        }
    }
}

fn keys_or_none<V>(map: &BTreeMap<String, V>) -> String {
    if map.is_empty() {
        "(none)".to_string()
    } else {
        map.keys().cloned().collect::<Vec<_>>().join(", ")
    }
}

fn require_compressions(
    doc: &GameDocument,
) -> Result<&dyngame_core::game::CompressionProfile, Outcome> {
    doc.compressions
        .as_ref()
        .ok_or_else(|| input_error("document has no [compression] sections"))
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("payload serialization")
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

fn cmd_validate(input: &Path, b: &mut ReportBuilder) -> Outcome {
    b.tolerance("model", TOL_MODEL);
    let doc = match load_doc(input, b) {
        Ok(doc) => doc,
        Err(out) => return ("invalid".to_string(), out.1, out.2),
    };
    let def = doc.game.def();
    let payload = json!({
        "players": def.players,
        "horizon": def.horizon,
        "compressions": doc.compressions.is_some(),
        "strategies": doc.strategies.keys().collect::<Vec<_>>(),
        "beliefs": doc.beliefs.keys().collect::<Vec<_>>(),
        "splits": doc.splits.keys().collect::<Vec<_>>(),
    });
    ("valid".to_string(), EXIT_OK, payload)
}

fn cmd_check_msi(input: &Path, common: &CommonArgs, b: &mut ReportBuilder) -> Outcome {
    let doc = match load_doc(input, b) {
        Ok(doc) => doc,
        Err(out) => return out,
    };
    let comps = match require_compressions(&doc) {
        Ok(c) => c,
        Err(out) => return out,
    };
    let cfg = sampler_config(common);
    b.seed(cfg.seed);
    b.tolerance("witness", cfg.tol);
    match check_msi(&doc.game, comps, &cfg) {
        Ok(r) => {
            let code = if r.verdict.holds() { EXIT_OK } else { EXIT_FAILS };
            (r.verdict.to_string(), code, to_value(&r))
        }
        Err(e) => input_error(e.to_string()),
    }
}

fn cmd_check_usi(
    input: &Path,
    player: &str,
    common: &CommonArgs,
    b: &mut ReportBuilder,
) -> Outcome {
    let doc = match load_doc(input, b) {
        Ok(doc) => doc,
        Err(out) => return out,
    };
    let comps = match require_compressions(&doc) {
        Ok(c) => c,
        Err(out) => return out,
    };
    let i = match resolve_player(&doc.game, player) {
        Ok(i) => i,
        Err(out) => return out,
    };
    let cfg = sampler_config(common);
    b.seed(cfg.seed);
    b.tolerance("witness", cfg.tol);
    match check_usi(&doc.game, comps, i, &cfg) {
        Ok(r) => {
            let code = if r.verdict.holds() { EXIT_OK } else { EXIT_FAILS };
            let mut payload = to_value(&r);
            payload["player"] = json!(doc.game.player_name(i));
            (r.verdict.to_string(), code, payload)
        }
        Err(e) => input_error(e.to_string()),
    }
}

fn solve_outcome(e: SolveError) -> Outcome {
    match e {
        SolveError::NoConvergence { .. } => {
            ("no-convergence".to_string(), EXIT_INCONCLUSIVE, json!({ "error": e.to_string() }))
        }
        SolveError::NotEquilibrium(report) => (
            "not-equilibrium".to_string(),
            EXIT_INCONCLUSIVE,
            json!({ "error": "candidate failed the deviation check", "report": to_value(&report) }),
        ),
        other => input_error(other.to_string()),
    }
}

fn cmd_solve(input: &Path, common: &CommonArgs, b: &mut ReportBuilder, trembles: bool) -> Outcome {
    let doc = match load_doc(input, b) {
        Ok(doc) => doc,
        Err(out) => return out,
    };
    let comps = match require_compressions(&doc) {
        Ok(c) => c,
        Err(out) => return out,
    };
    let cfg = match solver_config(common) {
        Ok(cfg) => cfg,
        Err(out) => return out,
    };
    b.tolerance("solver", cfg.tol);
    b.tolerance("tie", cfg.tie_tol);
    if trembles {
        match solve_k_based_se(&doc.game, comps, &cfg) {
            Ok(sol) => {
                if sol.se.verdict.holds() {
                    ("solved".to_string(), EXIT_OK, to_value(&sol))
                } else {
                    ("tremble-inconclusive".to_string(), EXIT_INCONCLUSIVE, to_value(&sol))
                }
            }
            Err(e) => solve_outcome(e),
        }
    } else {
        match solve_k_based_bne(&doc.game, comps, &cfg) {
            Ok(sol) => ("solved".to_string(), EXIT_OK, to_value(&sol)),
            Err(e) => solve_outcome(e),
        }
    }
}

fn cmd_verify_bne(
    input: &Path,
    strategy: &Option<String>,
    common: &CommonArgs,
    b: &mut ReportBuilder,
) -> Outcome {
    let doc = match load_doc(input, b) {
        Ok(doc) => doc,
        Err(out) => return out,
    };
    let (name, profile) = match pick(&doc.strategies, strategy, "strategy") {
        Ok(p) => p,
        Err(out) => return out,
    };
    let tol = common.tol.unwrap_or(TOL_SOLVER);
    b.tolerance("solver", tol);
    match verify_bne(&doc.game, profile, tol) {
        Ok(r) => {
            let (verdict, code) = if r.is_equilibrium {
                ("equilibrium", EXIT_OK)
            } else {
                ("not-equilibrium", EXIT_FAILS)
            };
            let mut payload = to_value(&r);
            payload["strategy"] = json!(name);
            (verdict.to_string(), code, payload)
        }
        Err(e) => input_error(e.to_string()),
    }
}

fn cmd_verify_se(
    input: &Path,
    strategy: &Option<String>,
    common: &CommonArgs,
    b: &mut ReportBuilder,
) -> Outcome {
    let doc = match load_doc(input, b) {
        Ok(doc) => doc,
        Err(out) => return out,
    };
    let (name, profile) = match pick(&doc.strategies, strategy, "strategy") {
        Ok(p) => p,
        Err(out) => return out,
    };
    let schedule = match schedule_from(common) {
        Ok(s) => s,
        Err(out) => return out,
    };
    match verify_se_canonical(&doc.game, profile, &schedule) {
        Ok(r) => {
            let (verdict, code) = if r.verdict.holds() {
                ("canonical", EXIT_OK)
            } else {
                ("inconclusive", EXIT_INCONCLUSIVE)
            };
            let mut payload = to_value(&r);
            payload["strategy"] = json!(name);
            (verdict.to_string(), code, payload)
        }
        Err(e) => input_error(e.to_string()),
    }
}

fn cmd_transfer_usi(
    input: &Path,
    strategy: &Option<String>,
    common: &CommonArgs,
    b: &mut ReportBuilder,
) -> Outcome {
    let doc = match load_doc(input, b) {
        Ok(doc) => doc,
        Err(out) => return out,
    };
    let comps = match require_compressions(&doc) {
        Ok(c) => c,
        Err(out) => return out,
    };
    let (name, profile) = match pick(&doc.strategies, strategy, "strategy") {
        Ok(p) => p,
        Err(out) => return out,
    };
    let cfg = sampler_config(common);
    let tol = common.tol.unwrap_or(TOL_SOLVER);
    b.seed(cfg.seed);
    b.tolerance("witness", cfg.tol);
    b.tolerance("solver", tol);
    match transfer_bne_via_usi(&doc.game, comps, profile, &cfg, tol) {
        Ok(out) => {
            let payload = json!({
                "strategy": name,
                "summaries": to_value(&out.strategies),
                "report": to_value(&out.report),
            });
            if out.report.is_equilibrium {
                ("transferred".to_string(), EXIT_OK, payload)
            } else {
                ("not-equilibrium".to_string(), EXIT_FAILS, payload)
            }
        }
        Err(TransferError::NotUnilaterallySufficient { player, deviation, witness }) => (
            "not-unilaterally-sufficient".to_string(),
            EXIT_FAILS,
            json!({
                "player": doc.game.player_name(player),
                "deviation": deviation,
                "witness": witness.map(|w| to_value(&w)),
            }),
        ),
        Err(TransferError::Cond(e)) => input_error(e.to_string()),
    }
}

fn cmd_enumerate(input: &Path, b: &mut ReportBuilder) -> Outcome {
    let doc = match load_doc(input, b) {
        Ok(doc) => doc,
        Err(out) => return out,
    };
    b.tolerance("payoff-dedup", PAYOFF_DEDUP);
    b.tolerance("solver", TOL_SOLVER);
    match enumerate_bne_small(&doc.game) {
        Ok(e) => ("enumerated".to_string(), EXIT_OK, to_value(&e)),
        Err(e @ EnumerateError::UnsupportedShape(_)) | Err(e @ EnumerateError::TooLarge(_)) => {
            ("unsupported".to_string(), EXIT_INCONCLUSIVE, json!({ "error": e.to_string() }))
        }
        Err(e) => input_error(e.to_string()),
    }
}

fn cmd_check_wpbe(
    input: &Path,
    strategy: &Option<String>,
    belief: &Option<String>,
    b: &mut ReportBuilder,
) -> Outcome {
    let doc = match load_doc(input, b) {
        Ok(doc) => doc,
        Err(out) => return out,
    };
    let (s_name, profile) = match pick(&doc.strategies, strategy, "strategy") {
        Ok(p) => p,
        Err(out) => return out,
    };
    let (b_name, beliefs) = match pick(&doc.beliefs, belief, "belief") {
        Ok(p) => p,
        Err(out) => return out,
    };
    let assessment = dyngame_core::equilibrium::wpbe::Assessment {
        profile: profile.clone(),
        beliefs: beliefs.clone(),
    };
    match check_wpbe(&doc.game, &assessment) {
        Ok(r) => {
            b.tolerance("witness", r.tol);
            let (verdict, code) =
                if r.accepted { ("accepted", EXIT_OK) } else { ("rejected", EXIT_FAILS) };
            let mut payload = to_value(&r);
            payload["strategy"] = json!(s_name);
            payload["belief"] = json!(b_name);
            (verdict.to_string(), code, payload)
        }
        Err(e) => input_error(e.to_string()),
    }
}

fn cmd_check_belief_based(
    input: &Path,
    strategy: &Option<String>,
    split: &Option<String>,
    common: &CommonArgs,
    b: &mut ReportBuilder,
) -> Outcome {
    let doc = match load_doc(input, b) {
        Ok(doc) => doc,
        Err(out) => return out,
    };
    let (s_name, profile) = match pick(&doc.strategies, strategy, "strategy") {
        Ok(p) => p,
        Err(out) => return out,
    };
    let (c_name, codes) = match pick(&doc.splits, split, "split") {
        Ok(p) => p,
        Err(out) => return out,
    };
    let tol = common.tol.unwrap_or(TOL_SOLVER);
    b.tolerance("row", tol);
    match check_belief_based(&doc.game, codes, profile, tol) {
        Ok(r) => {
            let (verdict, code) = if r.representable {
                ("belief-based", EXIT_OK)
            } else {
                ("not-belief-based", EXIT_FAILS)
            };
            let mut payload = to_value(&r);
            payload["strategy"] = json!(s_name);
            payload["split"] = json!(c_name);
            (verdict.to_string(), code, payload)
        }
        Err(e) => input_error(e.to_string()),
    }
}

fn cmd_fixtures(names: &[String], b: &mut ReportBuilder) -> Outcome {
    b.tolerance("witness", TOL_WITNESS);
    b.tolerance("solver", TOL_SOLVER);
    let mut fixtures = Vec::new();
    for req in standard_suite() {
        match build_example(&req) {
            Ok(fx) => fixtures.push(fx),
            Err(e) => return input_error(format!("building {req:?}: {e}")),
        }
    }
    if let Some(unknown) = names.iter().find(|n| !fixtures.iter().any(|f| f.name == **n)) {
        let known: Vec<&str> = fixtures.iter().map(|f| f.name.as_str()).collect();
        return input_error(format!("no fixture `{unknown}`; known: {}", known.join(", ")));
    }
    let mut rows = Vec::new();
    let mut failed = 0usize;
    for fx in &fixtures {
        if !names.is_empty() && !names.iter().any(|n| *n == fx.name) {
            continue;
        }
        let run = run_fixture(fx);
        let ok = run.all_passed();
        if !ok {
            failed += 1;
        }
        let checks: Vec<Value> = run
            .outcomes
            .iter()
            .map(|o| {
                json!({
                    "label": o.label,
                    "basis": format!("{:?}", o.basis).to_lowercase(),
                    "passed": o.passed,
                    "detail": o.detail,
                })
            })
            .collect();
        rows.push(json!({ "name": run.name, "passed": ok, "checks": checks }));
    }
    let payload = json!({ "fixtures": rows, "failed": failed });
    if failed == 0 {
        ("all-passed".to_string(), EXIT_OK, payload)
    } else {
        ("failures".to_string(), EXIT_FAILS, payload)
    }
}
