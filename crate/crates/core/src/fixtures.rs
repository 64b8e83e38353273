//! Ready-made games with known analysis results.
//!
//! Three hand-built games come with closed-form equilibrium values frozen
//! into [`Expectation`]s; four seeded random families carry verdicts that
//! hold by construction. Every fixture is deterministic: building the same
//! request twice yields identical tables.

use crate::equilibrium::belief_based::{check_belief_based, CommonInfoSplit};
use crate::equilibrium::enumerate::enumerate_bne_small;
use crate::equilibrium::expand_k_profile;
use crate::equilibrium::solve::{solve_k_based_bne, KBneSolution, SolverConfig};
use crate::equilibrium::wpbe::{check_wpbe, Assessment};
use crate::game::{
    identity_compression, validate_game, Compression, CompressionError, CompressionProfile,
    GameDef, GameSpec, InitialEntry, KernelEntry, StrategyProfile, ValidationReport,
    DEFAULT_SUPPORT_CAP,
};
use crate::info_state::{check_msi, check_usi, SamplerConfig, Verdict};
use crate::num::{compensated_sum, max_abs_diff, TOL_SOLVER, TOL_WITNESS};
use crate::space::{Space, TupleCodec};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error(transparent)]
    Invalid(#[from] ValidationReport),
    #[error(transparent)]
    Compression(#[from] CompressionError),
}

/// Where an expected value comes from.
///
/// `Analytic` values were derived by hand for the specific game; tampering
/// with the game or the solver should break them. `Construction` values hold
/// because of how the game or summary was assembled (e.g. a full-history
/// summary is always unilaterally sufficient). `Computed` values freeze a
/// convention of this codebase, such as the solver's tie-breaking rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    Analytic,
    Construction,
    Computed,
}

/// A single checkable claim about a fixture.
#[derive(Clone, Debug, PartialEq)]
pub enum Check {
    /// `check_msi` returns a holds verdict.
    MsiHolds,
    /// `check_usi` for `player` returns a holds verdict.
    UsiHolds { player: usize },
    /// `check_usi` for `player` returns a fails verdict.
    UsiFails { player: usize },
    /// `solve_k_based_bne` succeeds and its payoff vector matches.
    SolvedKBnePayoffs { payoffs: Vec<f64> },
    /// Specific rows of the solved summary-based profile.
    SolvedKBneRows { player: usize, stage: usize, rows: Vec<(usize, Vec<f64>)> },
    /// Every listed payoff vector appears in the enumerated equilibrium set.
    EnumeratedPayoffsInclude { payoffs: Vec<Vec<f64>> },
    /// The fixture's named assessment passes `check_wpbe` with this payoff.
    AssessmentAccepted { payoffs: Vec<f64> },
    /// The solved equilibrium is not playable with strategies that read only
    /// the common-information belief plus private information.
    SolvedKBneNotBeliefBased,
}

/// One expected result with its tolerance and provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct Expectation {
    pub label: String,
    pub basis: Basis,
    pub tol: f64,
    pub check: Check,
}

impl Expectation {
    fn new(label: &str, basis: Basis, tol: f64, check: Check) -> Self {
        Expectation { label: label.to_string(), basis, tol, check }
    }
}

/// Stateless observed-action game: one reward table per stage, drawn once
/// from the seed. Every player observes the joint action; the summary keeps
/// only the most recent one.
#[derive(Clone, Debug, PartialEq)]
pub struct RepeatedParams {
    pub stages: usize,
    /// One action count per player, shared by all stages.
    pub action_counts: Vec<usize>,
    pub seed: u64,
}

impl RepeatedParams {
    pub fn standard(seed: u64) -> Self {
        RepeatedParams { stages: 3, action_counts: vec![2, 2], seed }
    }
}

/// Fully observable Markov game: everyone sees the state and all actions;
/// the summary keeps only the current state.
#[derive(Clone, Debug, PartialEq)]
pub struct MaskinTiroleParams {
    pub stages: usize,
    pub state_count: usize,
    pub action_counts: Vec<usize>,
    pub seed: u64,
}

impl MaskinTiroleParams {
    pub fn standard(seed: u64) -> Self {
        MaskinTiroleParams { stages: 3, state_count: 2, action_counts: vec![2, 2], seed }
    }
}

/// Common/private information game whose common-information belief is
/// strategy-independent by construction: the next state is drawn from the
/// joint action alone, and each private signal is drawn from the new state.
/// The summary pairs the belief (a function of the last joint action) with
/// the player's current private signal.
#[derive(Clone, Debug, PartialEq)]
pub struct NayyarParams {
    pub stages: usize,
    pub players: usize,
    pub state_count: usize,
    pub private_count: usize,
    pub action_count: usize,
    pub seed: u64,
}

impl NayyarParams {
    pub fn standard(seed: u64) -> Self {
        NayyarParams {
            stages: 2,
            players: 2,
            state_count: 2,
            private_count: 2,
            action_count: 2,
            seed,
        }
    }
}

/// Local-state game with public noisy observations: player `i` has a local
/// state `x_t^i`; each stage draws `(x_{t+1}^i, y_t^i)` from a per-player
/// kernel at `(x_t^i, u_t)`, and everyone observes `(y_t, u_t)` plus their
/// own next local state. The summary keeps `(y_{1:t-1}, u_{1:t-1}, x_t^i)`,
/// dropping the player's own past local states.
#[derive(Clone, Debug, PartialEq)]
pub struct OuyangParams {
    pub stages: usize,
    /// Local state count per player.
    pub local_counts: Vec<usize>,
    /// Public observation alphabet per player.
    pub obs_counts: Vec<usize>,
    /// `action_counts[t-1][i]` for stage `t`.
    pub action_counts: Vec<Vec<usize>>,
    pub seed: u64,
}

impl OuyangParams {
    /// Two players, two stages, binary local states, actions, observations.
    pub fn standard(seed: u64) -> Self {
        OuyangParams {
            stages: 2,
            local_counts: vec![2, 2],
            obs_counts: vec![2, 2],
            action_counts: vec![vec![2, 2], vec![2, 2]],
            seed,
        }
    }

    /// Smallest interesting instance: player 0 has a binary local state but
    /// no stage-1 action and no public signal; player 1 acts at both stages.
    /// Small enough for full equilibrium enumeration, yet the summary
    /// genuinely compresses player 0's history.
    pub fn mini(seed: u64) -> Self {
        OuyangParams {
            stages: 2,
            local_counts: vec![2, 1],
            obs_counts: vec![1, 1],
            action_counts: vec![vec![1, 2], vec![2, 2]],
            seed,
        }
    }
}

/// Which fixture to build.
#[derive(Clone, Debug, PartialEq)]
pub enum FixtureRequest {
    /// Two-stage stateless leader/follower game; the constant summary for
    /// the follower is mutually but not unilaterally sufficient.
    Example1,
    /// Two-stage matching game with private types; used for the
    /// belief-system (weak PBE) analysis.
    Example2,
    /// Three-stage zero-sum signaling game with a unique mixed equilibrium
    /// parameterized by the signaling cost `c`, `0 < c < 1/3`.
    Example3 { c: f64 },
    Repeated(RepeatedParams),
    MaskinTirole(MaskinTiroleParams),
    Nayyar(NayyarParams),
    Ouyang(OuyangParams),
}

/// A built game, its summary maps, and the frozen claims about it.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: String,
    pub request: FixtureRequest,
    pub game: GameSpec,
    pub compressions: CompressionProfile,
    /// Common/private split of each history, for the belief-based
    /// representability check. Only set where a canonical split exists.
    pub split: Option<CommonInfoSplit>,
    /// A hand-built assessment (profile plus belief system) whose acceptance
    /// is part of the fixture's claims.
    pub assessment: Option<Assessment>,
    pub expectations: Vec<Expectation>,
}

/// Build the requested fixture. Fails on out-of-range parameters or if the
/// assembled tables do not validate.
pub fn build_example(request: &FixtureRequest) -> Result<Fixture, FixtureError> {
    match request {
        FixtureRequest::Example1 => example1(),
        FixtureRequest::Example2 => example2(),
        FixtureRequest::Example3 { c } => example3(*c),
        FixtureRequest::Repeated(p) => repeated(p),
        FixtureRequest::MaskinTirole(p) => maskin_tirole(p),
        FixtureRequest::Nayyar(p) => nayyar(p),
        FixtureRequest::Ouyang(p) => ouyang(p),
    }
}

/// The default fixture set exercised by `fixtures --all`.
pub fn standard_suite() -> Vec<FixtureRequest> {
    vec![
        FixtureRequest::Example1,
        FixtureRequest::Example2,
        FixtureRequest::Example3 { c: 0.2 },
        FixtureRequest::Repeated(RepeatedParams::standard(11)),
        FixtureRequest::MaskinTirole(MaskinTiroleParams::standard(12)),
        FixtureRequest::Nayyar(NayyarParams::standard(13)),
        FixtureRequest::Ouyang(OuyangParams::standard(14)),
    ]
}

// ---------------------------------------------------------------------------
// Replaying expectations
// ---------------------------------------------------------------------------

/// Result of replaying one expectation against the built game.
#[derive(Clone, Debug)]
pub struct ExpectationOutcome {
    pub label: String,
    pub basis: Basis,
    pub passed: bool,
    /// What was observed: a verdict, a gap, or an error message.
    pub detail: String,
}

/// All outcomes for one fixture, in declaration order.
#[derive(Clone, Debug)]
pub struct FixtureRun {
    pub name: String,
    pub outcomes: Vec<ExpectationOutcome>,
}

impl FixtureRun {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }
}

/// The solver runs once per fixture even when several claims consume it.
struct SolveOnce<'a> {
    game: &'a GameSpec,
    comps: &'a CompressionProfile,
    cell: Option<Result<KBneSolution, String>>,
}

impl<'a> SolveOnce<'a> {
    fn get(&mut self) -> &Result<KBneSolution, String> {
        if self.cell.is_none() {
            self.cell = Some(
                solve_k_based_bne(self.game, self.comps, &SolverConfig::default())
                    .map_err(|e| e.to_string()),
            );
        }
        self.cell.as_ref().expect("just filled")
    }
}

fn payoff_line(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|v| format!("{v:.6}")).collect();
    format!("({})", parts.join(", "))
}

/// Replay every expectation through the public operations. Failures never
/// abort the run: an operational error becomes a failed outcome carrying the
/// error text.
pub fn run_fixture(fixture: &Fixture) -> FixtureRun {
    let game = &fixture.game;
    let comps = &fixture.compressions;
    let sampler = SamplerConfig::default();
    let mut solved = SolveOnce { game, comps, cell: None };
    let mut outcomes = Vec::with_capacity(fixture.expectations.len());
    for exp in &fixture.expectations {
        let (passed, detail) = match &exp.check {
            Check::MsiHolds => match check_msi(game, comps, &sampler) {
                Ok(r) => (r.verdict.holds(), format!("verdict: {}", r.verdict)),
                Err(e) => (false, e.to_string()),
            },
            Check::UsiHolds { player } => match check_usi(game, comps, *player, &sampler) {
                Ok(r) => (r.verdict.holds(), format!("verdict: {}", r.verdict)),
                Err(e) => (false, e.to_string()),
            },
            Check::UsiFails { player } => match check_usi(game, comps, *player, &sampler) {
                Ok(r) => (r.verdict == Verdict::Fails, format!("verdict: {}", r.verdict)),
                Err(e) => (false, e.to_string()),
            },
            Check::SolvedKBnePayoffs { payoffs } => match solved.get() {
                Ok(sol) => {
                    let diff = max_abs_diff(&sol.payoffs, payoffs);
                    (diff <= exp.tol, format!("payoffs {}, off by {diff:.3e}", payoff_line(&sol.payoffs)))
                }
                Err(e) => (false, e.clone()),
            },
            Check::SolvedKBneRows { player, stage, rows } => match solved.get() {
                Ok(sol) => {
                    let table = &sol.strategies[*player].tables[*stage - 1];
                    let mut worst = 0.0f64;
                    for (k, want) in rows {
                        worst = worst.max(max_abs_diff(&table[*k], want));
                    }
                    (worst <= exp.tol, format!("rows off by {worst:.3e}"))
                }
                Err(e) => (false, e.clone()),
            },
            Check::EnumeratedPayoffsInclude { payoffs } => match enumerate_bne_small(game) {
                Ok(en) => {
                    let missing: Vec<&Vec<f64>> = payoffs
                        .iter()
                        .filter(|want| {
                            !en.payoffs.iter().any(|got| max_abs_diff(got, want) <= exp.tol)
                        })
                        .collect();
                    if missing.is_empty() {
                        (true, format!("{} payoff vectors found", en.payoffs.len()))
                    } else {
                        (false, format!("missing payoff {}", payoff_line(missing[0])))
                    }
                }
                Err(e) => (false, e.to_string()),
            },
            Check::AssessmentAccepted { payoffs } => match &fixture.assessment {
                Some(assessment) => match check_wpbe(game, assessment) {
                    Ok(r) => {
                        let diff = max_abs_diff(&r.payoffs, payoffs);
                        (
                            r.accepted && diff <= exp.tol,
                            format!(
                                "accepted: {}, payoffs {}, off by {diff:.3e}",
                                r.accepted,
                                payoff_line(&r.payoffs)
                            ),
                        )
                    }
                    Err(e) => (false, e.to_string()),
                },
                None => (false, "fixture carries no assessment".to_string()),
            },
            Check::SolvedKBneNotBeliefBased => match (&fixture.split, solved.get()) {
                (Some(split), Ok(sol)) => {
                    let profile = expand_k_profile(game, comps, &sol.strategies);
                    match check_belief_based(game, split, &profile, exp.tol) {
                        Ok(r) => (
                            !r.representable,
                            match &r.witness {
                                Some(w) => format!(
                                    "row gap {:.3e} at player {} stage {}",
                                    w.gap, w.player, w.t
                                ),
                                None => "representable".to_string(),
                            },
                        ),
                        Err(e) => (false, e.to_string()),
                    }
                }
                (None, _) => (false, "fixture carries no history split".to_string()),
                (_, Err(e)) => (false, e.clone()),
            },
        };
        outcomes.push(ExpectationOutcome {
            label: exp.label.clone(),
            basis: exp.basis,
            passed,
            detail,
        });
    }
    FixtureRun { name: fixture.name.clone(), outcomes }
}

// ---------------------------------------------------------------------------
// Hand-built games
// ---------------------------------------------------------------------------

fn pm_labels() -> Vec<String> {
    vec!["-1".to_string(), "+1".to_string()]
}

fn det(next_state: usize, increments: Vec<usize>, rewards: Vec<f64>) -> Vec<KernelEntry> {
    vec![KernelEntry { next_state, increments, rewards, prob: 1.0 }]
}

/// Labels for a product space in codec order (first component slowest).
fn product_labels(parts: &[&[String]]) -> Vec<String> {
    let mut out = vec![String::new()];
    for (pi, part) in parts.iter().enumerate() {
        let mut next = Vec::with_capacity(out.len() * part.len());
        for prefix in &out {
            for l in part.iter() {
                if pi == 0 {
                    next.push(l.clone());
                } else {
                    next.push(format!("{prefix},{l}"));
                }
            }
        }
        out = next;
    }
    out.into_iter().map(|s| format!("({s})")).collect()
}

/// Alice moves at stage 1 (`u ∈ {0,1}`, publicly observed, rewards `(u,-u)`),
/// Bob moves at stage 2 (`u ∈ {-1,+1}`, rewards `(u,0)`). Alice's summary is
/// her full history; Bob's is constant.
fn example1() -> Result<Fixture, FixtureError> {
    let zero_one = vec!["0".to_string(), "1".to_string()];
    let def = GameDef {
        players: vec!["alice".to_string(), "bob".to_string()],
        horizon: 2,
        states: (1..=3).map(|t| Space::singleton(format!("x[{t}]"))).collect(),
        actions: vec![
            vec![
                Space::new("u[1] alice", zero_one.clone()),
                Space::singleton("u[1] bob"),
            ],
            vec![
                Space::singleton("u[2] alice"),
                Space::new("u[2] bob", pm_labels()),
            ],
        ],
        increments: vec![
            vec![
                Space::new("z[1] alice", zero_one.clone()),
                Space::new("z[1] bob", zero_one),
            ],
            vec![
                Space::new("z[2] alice", pm_labels()),
                Space::new("z[2] bob", pm_labels()),
            ],
        ],
        initial_infos: vec![Space::singleton("h[1] alice"), Space::singleton("h[1] bob")],
        recall: vec![vec![vec![0, 1], vec![0, 0]], vec![vec![0, 0], vec![0, 1]]],
        initial_law: vec![InitialEntry { state: 0, infos: vec![0, 0], prob: 1.0 }],
        kernels: vec![
            vec![vec![
                det(0, vec![0, 0], vec![0.0, 0.0]),
                det(0, vec![1, 1], vec![1.0, -1.0]),
            ]],
            vec![vec![
                det(0, vec![0, 0], vec![-1.0, 0.0]),
                det(0, vec![1, 1], vec![1.0, 0.0]),
            ]],
        ],
        support_cap: DEFAULT_SUPPORT_CAP,
    };
    let game = validate_game(def)?;
    let bob_constant = Compression {
        player: 1,
        spaces: (1..=3).map(|t| Space::singleton(format!("k[{t}] bob"))).collect(),
        init_map: vec![0],
        updates: vec![vec![vec![0, 0]], vec![vec![0, 0]]],
    };
    let compressions = CompressionProfile {
        compressions: vec![identity_compression(&game, 0), bob_constant],
    };
    compressions.validate(&game)?;
    let expectations = vec![
        Expectation::new("mutual sufficiency holds", Basis::Analytic, TOL_WITNESS, Check::MsiHolds),
        Expectation::new(
            "full-history summary is unilaterally sufficient (alice)",
            Basis::Construction,
            TOL_WITNESS,
            Check::UsiHolds { player: 0 },
        ),
        Expectation::new(
            "constant summary is not unilaterally sufficient (bob)",
            Basis::Analytic,
            TOL_WITNESS,
            Check::UsiFails { player: 1 },
        ),
        Expectation::new(
            "summary-based equilibrium payoff",
            Basis::Analytic,
            TOL_SOLVER,
            Check::SolvedKBnePayoffs { payoffs: vec![2.0, -1.0] },
        ),
        Expectation::new(
            "solver picks action 1 for alice",
            Basis::Computed,
            TOL_SOLVER,
            Check::SolvedKBneRows { player: 0, stage: 1, rows: vec![(0, vec![0.0, 1.0])] },
        ),
        Expectation::new(
            "solver picks action +1 for bob",
            Basis::Computed,
            TOL_SOLVER,
            Check::SolvedKBneRows { player: 1, stage: 2, rows: vec![(0, vec![0.0, 1.0])] },
        ),
        Expectation::new(
            "full equilibrium payoff set contains both known equilibria",
            Basis::Analytic,
            TOL_SOLVER,
            Check::EnumeratedPayoffsInclude { payoffs: vec![vec![2.0, -1.0], vec![1.0, 0.0]] },
        ),
    ];
    Ok(Fixture {
        name: "example1".to_string(),
        request: FixtureRequest::Example1,
        game,
        compressions,
        split: None,
        assessment: None,
        expectations,
    })
}

/// Bob moves at stage 1 knowing his type; both move simultaneously at
/// stage 2. Types are independent fair coins; actions are public. Alice's
/// summary drops her own type at stage 2; Bob keeps everything.
fn example2() -> Result<Fixture, FixtureError> {
    let three = vec!["-1".to_string(), "0".to_string(), "+1".to_string()];
    let pair_labels = product_labels(&[&three, &three]);
    let x1_labels = product_labels(&[&pm_labels(), &pm_labels()]);
    let val = |idx: usize| idx as i32 - 1; // three-action index -> value

    let mut initial_law = Vec::new();
    for a in 0..2 {
        for b in 0..2 {
            initial_law.push(InitialEntry { state: a * 2 + b, infos: vec![a, b], prob: 0.25 });
        }
    }

    // Stage 1: only Bob's binary action matters; the next state is his type.
    // State index is alice_type * 2 + bob_type.
    let mut k1 = Vec::new();
    for x in 0..4 {
        let b = x % 2;
        let mut row = Vec::new();
        for u in 0..2 {
            let ra = if u == 0 { -1.0 } else { 0.0 };
            let rb = if u == 0 { 0.2 } else { 0.0 };
            row.push(det(b, vec![u, u], vec![ra, rb]));
        }
        k1.push(row);
    }

    // Stage 2: both pick from {-1,0,+1}; rewards depend on (state, actions).
    let mut k2 = Vec::new();
    for x2 in 0..2 {
        let x2v = 2 * x2 as i32 - 1;
        let mut row = Vec::new();
        for ju in 0..9 {
            let ua = ju / 3;
            let ub = ju % 3;
            let ra = if val(ua) == x2v || val(ua) == 0 { 1.0 } else { 0.0 };
            let rb = if ua == ub { -1.0 } else { 0.0 };
            row.push(det(0, vec![ju, ju], vec![ra, rb]));
        }
        k2.push(row);
    }

    let def = GameDef {
        players: vec!["alice".to_string(), "bob".to_string()],
        horizon: 2,
        states: vec![
            Space::new("x[1]", x1_labels),
            Space::new("x[2]", pm_labels()),
            Space::singleton("x[3]"),
        ],
        actions: vec![
            vec![Space::singleton("u[1] alice"), Space::new("u[1] bob", pm_labels())],
            vec![
                Space::new("u[2] alice", three.clone()),
                Space::new("u[2] bob", three.clone()),
            ],
        ],
        increments: vec![
            vec![
                Space::new("z[1] alice", pm_labels()),
                Space::new("z[1] bob", pm_labels()),
            ],
            vec![
                Space::new("z[2] alice", pair_labels.clone()),
                Space::new("z[2] bob", pair_labels),
            ],
        ],
        initial_infos: vec![
            Space::new("h[1] alice", pm_labels()),
            Space::new("h[1] bob", pm_labels()),
        ],
        recall: vec![
            vec![vec![0, 0], vec![0, 1]],
            vec![vec![0, 0, 0, 1, 1, 1, 2, 2, 2], vec![0, 1, 2, 0, 1, 2, 0, 1, 2]],
        ],
        initial_law,
        kernels: vec![k1, k2],
        support_cap: DEFAULT_SUPPORT_CAP,
    };
    let game = validate_game(def)?;
    let alice = Compression {
        player: 0,
        spaces: vec![
            Space::new("k[1] alice", pm_labels()),
            Space::new("k[2] alice", pm_labels()),
            Space::singleton("k[3] alice"),
        ],
        init_map: vec![0, 1],
        updates: vec![vec![vec![0, 1], vec![0, 1]], vec![vec![0; 9], vec![0; 9]]],
    };
    let compressions = CompressionProfile {
        compressions: vec![alice, identity_compression(&game, 1)],
    };
    compressions.validate(&game)?;
    let expectations = vec![
        Expectation::new(
            "type-dropping summary is unilaterally sufficient (alice)",
            Basis::Analytic,
            TOL_WITNESS,
            Check::UsiHolds { player: 0 },
        ),
        Expectation::new(
            "full-history summary is unilaterally sufficient (bob)",
            Basis::Construction,
            TOL_WITNESS,
            Check::UsiHolds { player: 1 },
        ),
        Expectation::new(
            "named assessment is a weak PBE with payoff (1, 0)",
            Basis::Analytic,
            TOL_SOLVER,
            Check::AssessmentAccepted { payoffs: vec![1.0, 0.0] },
        ),
    ];
    let assessment = example2_assessment(&game);
    Ok(Fixture {
        name: "example2".to_string(),
        request: FixtureRequest::Example2,
        game,
        compressions,
        split: None,
        assessment: Some(assessment),
        expectations,
    })
}

/// Distribution with the given mass at the given indices, zero elsewhere.
fn sparse(dim: usize, atoms: &[(usize, f64)]) -> Vec<f64> {
    let mut out = vec![0.0; dim];
    for &(idx, p) in atoms {
        out[idx] = p;
    }
    out
}

/// The hand-built weak PBE of the matching game. Bob always plays +1; Alice
/// answers +1 with the safe 0 but punishes -1 by mixing 2/3 on Bob's type
/// (which she pins to her own type via an off-path belief) and 1/3 on 0.
/// That threat costs Bob 1/3 in expectation, more than the 0.2 he would
/// collect from -1, so the path stays at (+1, 0, -1) with payoff (1, 0).
fn example2_assessment(game: &GameSpec) -> Assessment {
    let mut profile = StrategyProfile::uniform(game);
    // Alice's stage-2 histories are type * 2 + bob's action.
    profile.strategies[0].tables[1] = vec![
        vec![2.0 / 3.0, 1.0 / 3.0, 0.0],
        vec![0.0, 1.0, 0.0],
        vec![0.0, 1.0 / 3.0, 2.0 / 3.0],
        vec![0.0, 1.0, 0.0],
    ];
    // Bob plays +1 at stage 1 and -1 at stage 2, whatever he knows.
    profile.strategies[1].tables[0] = vec![vec![0.0, 1.0], vec![0.0, 1.0]];
    profile.strategies[1].tables[1] = vec![vec![1.0, 0.0, 0.0]; 4];

    // Belief atoms are (state, other player's history), later index fastest.
    // Stage 1: the state is the type pair a*2+b and histories are types, so
    // each player spreads 1/2 over the other's two types.
    let mut alice_t1 = Vec::new();
    for a in 0..2 {
        alice_t1.push(sparse(8, &[(4 * a, 0.5), (4 * a + 3, 0.5)]));
    }
    let mut bob_t1 = Vec::new();
    for b in 0..2 {
        bob_t1.push(sparse(8, &[(2 * b, 0.5), (2 * b + 5, 0.5)]));
    }
    // Stage 2: the state is Bob's type. On path (after +1) Alice still puts
    // 1/2 on each; off path she points at her own type. Bob knows the state
    // and spreads 1/2 over Alice's types.
    let mut alice_t2 = Vec::new();
    for a in 0..2 {
        for u in 0..2 {
            alice_t2.push(if u == 1 {
                sparse(8, &[(1, 0.5), (7, 0.5)])
            } else {
                sparse(8, &[(6 * a, 1.0)])
            });
        }
    }
    let mut bob_t2 = Vec::new();
    for b in 0..2 {
        for u in 0..2 {
            bob_t2.push(sparse(8, &[(4 * b + u, 0.5), (4 * b + 2 + u, 0.5)]));
        }
    }
    Assessment {
        profile,
        beliefs: vec![vec![alice_t1, alice_t2], vec![bob_t1, bob_t2]],
    }
}

/// Alice privately sees a fair coin `x1` and picks `u1 ∈ {-1,+1}`, publicly
/// observed, paying `c` for `+1`; the product `x2 = x1 * u1` is hidden. Bob
/// then guesses via U/D; matching pays him nothing and Alice 1. A final
/// action-free stage pays Alice 1 more when `x2 = +1` was matched with `U`.
/// Zero-sum; the unique equilibrium mixes both sides.
fn example3(c: f64) -> Result<Fixture, FixtureError> {
    if !(c > 0.0 && c < 1.0 / 3.0) {
        return Err(FixtureError::BadParameter(format!(
            "signaling cost must sit strictly between 0 and 1/3, got {c}"
        )));
    }
    let ud = vec!["U".to_string(), "D".to_string()];

    // Stage 1: x2 = x1 * u1 in value terms; +1 costs Alice c.
    let mut k1 = Vec::new();
    for x in 0..2usize {
        let mut row = Vec::new();
        for a in 0..2usize {
            let x2 = if a == x { 1 } else { 0 };
            let ra = if a == 1 { c } else { 0.0 };
            row.push(det(x2, vec![a, a], vec![ra, -ra]));
        }
        k1.push(row);
    }
    // Stage 2: Bob matches the hidden state; U on +1 also arms the bonus.
    let mut k2 = Vec::new();
    for x2 in 0..2usize {
        let mut row = Vec::new();
        for u in 0..2usize {
            let matched = (x2 == 1 && u == 0) || (x2 == 0 && u == 1);
            let r = if matched { 1.0 } else { 0.0 };
            let x3 = usize::from(x2 == 1 && u == 0);
            row.push(det(x3, vec![u, u], vec![r, -r]));
        }
        k2.push(row);
    }
    // Stage 3: action-free bonus payout.
    let k3 = (0..2usize)
        .map(|x3| vec![det(0, vec![0, 0], vec![x3 as f64, -(x3 as f64)])])
        .collect();

    let def = GameDef {
        players: vec!["alice".to_string(), "bob".to_string()],
        horizon: 3,
        states: vec![
            Space::new("x[1]", pm_labels()),
            Space::new("x[2]", pm_labels()),
            Space::new("x[3]", vec!["0".to_string(), "1".to_string()]),
            Space::singleton("x[4]"),
        ],
        actions: vec![
            vec![Space::new("u[1] alice", pm_labels()), Space::singleton("u[1] bob")],
            vec![Space::singleton("u[2] alice"), Space::new("u[2] bob", ud.clone())],
            vec![Space::singleton("u[3] alice"), Space::singleton("u[3] bob")],
        ],
        increments: vec![
            vec![
                Space::new("z[1] alice", pm_labels()),
                Space::new("z[1] bob", pm_labels()),
            ],
            vec![Space::new("z[2] alice", ud.clone()), Space::new("z[2] bob", ud)],
            vec![Space::singleton("z[3] alice"), Space::singleton("z[3] bob")],
        ],
        initial_infos: vec![
            Space::new("h[1] alice", pm_labels()),
            Space::singleton("h[1] bob"),
        ],
        recall: vec![
            vec![vec![0, 1], vec![0, 0]],
            vec![vec![0, 0], vec![0, 1]],
            vec![vec![0], vec![0]],
        ],
        initial_law: vec![
            InitialEntry { state: 0, infos: vec![0, 0], prob: 0.5 },
            InitialEntry { state: 1, infos: vec![1, 0], prob: 0.5 },
        ],
        kernels: vec![k1, k2, k3],
        support_cap: DEFAULT_SUPPORT_CAP,
    };
    let game = validate_game(def)?;
    let compressions = CompressionProfile::identity(&game);
    compressions.validate(&game)?;

    let third = 1.0 / 3.0;
    let value = c / 2.0 + 2.0 / 3.0;
    let expectations = vec![
        Expectation::new(
            "full-history summaries are mutually sufficient",
            Basis::Construction,
            TOL_WITNESS,
            Check::MsiHolds,
        ),
        Expectation::new(
            "full-history summary is unilaterally sufficient (alice)",
            Basis::Construction,
            TOL_WITNESS,
            Check::UsiHolds { player: 0 },
        ),
        Expectation::new(
            "full-history summary is unilaterally sufficient (bob)",
            Basis::Construction,
            TOL_WITNESS,
            Check::UsiHolds { player: 1 },
        ),
        Expectation::new(
            "alice mixes 1/3 on the matching action at both types",
            Basis::Analytic,
            TOL_SOLVER,
            Check::SolvedKBneRows {
                player: 0,
                stage: 1,
                rows: vec![
                    (0, vec![third, 2.0 * third]),
                    (1, vec![2.0 * third, third]),
                ],
            },
        ),
        Expectation::new(
            "bob shades U by the signaling cost",
            Basis::Analytic,
            TOL_SOLVER,
            Check::SolvedKBneRows {
                player: 1,
                stage: 2,
                rows: vec![
                    (0, vec![third + c, 2.0 * third - c]),
                    (1, vec![third - c, 2.0 * third + c]),
                ],
            },
        ),
        Expectation::new(
            "equilibrium value c/2 + 2/3",
            Basis::Analytic,
            TOL_SOLVER,
            Check::SolvedKBnePayoffs { payoffs: vec![value, -value] },
        ),
        Expectation::new(
            "enumeration finds the unique equilibrium payoff",
            Basis::Analytic,
            TOL_SOLVER,
            Check::EnumeratedPayoffsInclude { payoffs: vec![vec![value, -value]] },
        ),
        Expectation::new(
            "equilibrium is not playable on common belief plus private info",
            Basis::Analytic,
            TOL_SOLVER,
            Check::SolvedKBneNotBeliefBased,
        ),
    ];
    let split = example3_split(&game);
    Ok(Fixture {
        name: format!("example3(c={c})"),
        request: FixtureRequest::Example3 { c },
        game,
        compressions,
        split: Some(split),
        assessment: None,
        expectations,
    })
}

/// Common/private split of the signaling game: Alice's action record is
/// common, her type (equivalently the product state) is private; Bob holds
/// nothing private.
fn example3_split(game: &GameSpec) -> CommonInfoSplit {
    let mut codes = vec![Vec::new(), Vec::new()];
    // Stage 1: nothing common; Alice's type is private.
    codes[0].push((0..game.history_count(0, 1)).map(|h| (0, h)).collect());
    codes[1].push(vec![(0, 0)]);
    // Stage 2: Alice's public action is common; her private remainder is
    // the product state it induced.
    codes[0].push(
        (0..game.history_count(0, 2))
            .map(|h| {
                let (ty, u1) = (h / 2, h % 2);
                (u1, usize::from(ty == u1))
            })
            .collect(),
    );
    codes[1].push((0..game.history_count(1, 2)).map(|h| (h, 0)).collect());
    // Stage 3: both actions are common; Alice's type stays private.
    codes[0].push((0..game.history_count(0, 3)).map(|h| (h % 4, h / 4)).collect());
    codes[1].push((0..game.history_count(1, 3)).map(|h| (h, 0)).collect());
    CommonInfoSplit { codes }
}

// ---------------------------------------------------------------------------
// Seeded random families
// ---------------------------------------------------------------------------

fn rand_reward<R: Rng>(rng: &mut R) -> f64 {
    rng.gen_range(-1.0..=1.0)
}

/// Random distribution with full support; sums to one exactly.
fn rand_dist<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total = compensated_sum(w.iter().copied());
    for v in w.iter_mut() {
        *v /= total;
    }
    let head = compensated_sum(w[..n - 1].iter().copied());
    w[n - 1] = 1.0 - head;
    w
}

fn repeated(p: &RepeatedParams) -> Result<Fixture, FixtureError> {
    if p.stages == 0 || p.action_counts.is_empty() || p.action_counts.contains(&0) {
        return Err(FixtureError::BadParameter(
            "need at least one stage and nonempty action sets".to_string(),
        ));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(p.seed);
    let n = p.action_counts.len();
    let horizon = p.stages;
    let act_spaces: Vec<Space> = (0..n)
        .map(|i| Space::numbered(format!("u p{i}"), p.action_counts[i]))
        .collect();
    let act_labels: Vec<Vec<String>> = act_spaces.iter().map(|s| s.labels.clone()).collect();
    let joint_labels =
        product_labels(&act_labels.iter().map(|l| l.as_slice()).collect::<Vec<_>>());
    let codec = TupleCodec::new(p.action_counts.clone());
    let ju_n = codec.len();

    let mut kernels = Vec::with_capacity(horizon);
    for _t in 1..=horizon {
        let rows = (0..ju_n)
            .map(|ju| {
                let rewards: Vec<f64> = (0..n).map(|_| rand_reward(&mut rng)).collect();
                det(0, vec![ju; n], rewards)
            })
            .collect::<Vec<_>>();
        kernels.push(vec![rows]);
    }

    let def = GameDef {
        players: (0..n).map(|i| format!("p{i}")).collect(),
        horizon,
        states: (1..=horizon + 1).map(|t| Space::singleton(format!("x[{t}]"))).collect(),
        actions: (1..=horizon)
            .map(|t| {
                (0..n)
                    .map(|i| {
                        Space::numbered(format!("u[{t}] p{i}"), p.action_counts[i])
                    })
                    .collect()
            })
            .collect(),
        increments: (1..=horizon)
            .map(|t| {
                (0..n)
                    .map(|i| Space::new(format!("z[{t}] p{i}"), joint_labels.clone()))
                    .collect()
            })
            .collect(),
        initial_infos: (0..n).map(|i| Space::singleton(format!("h[1] p{i}"))).collect(),
        recall: (1..=horizon)
            .map(|_| {
                (0..n)
                    .map(|i| (0..ju_n).map(|z| codec.component(z, i)).collect())
                    .collect()
            })
            .collect(),
        initial_law: vec![InitialEntry { state: 0, infos: vec![0; n], prob: 1.0 }],
        kernels,
        support_cap: DEFAULT_SUPPORT_CAP,
    };
    let game = validate_game(def)?;

    // Summary: the most recent joint action (constant at time 1).
    let compressions = CompressionProfile {
        compressions: (0..n)
            .map(|i| {
                let mut spaces = vec![Space::singleton(format!("k[1] p{i}"))];
                for t in 2..=horizon + 1 {
                    spaces.push(Space::new(format!("k[{t}] p{i}"), joint_labels.clone()));
                }
                let updates = (1..=horizon)
                    .map(|t| {
                        let kn = if t == 1 { 1 } else { ju_n };
                        (0..kn).map(|_| (0..ju_n).collect()).collect()
                    })
                    .collect();
                Compression { player: i, spaces, init_map: vec![0], updates }
            })
            .collect(),
    };
    compressions.validate(&game)?;
    let expectations = vec![Expectation::new(
        "last-action summary is mutually sufficient",
        Basis::Analytic,
        TOL_WITNESS,
        Check::MsiHolds,
    )];
    Ok(Fixture {
        name: format!("repeated(T={},seed={})", p.stages, p.seed),
        request: FixtureRequest::Repeated(p.clone()),
        game,
        compressions,
        split: None,
        assessment: None,
        expectations,
    })
}

fn maskin_tirole(p: &MaskinTiroleParams) -> Result<Fixture, FixtureError> {
    if p.stages == 0 || p.state_count == 0 || p.action_counts.is_empty() || p.action_counts.contains(&0)
    {
        return Err(FixtureError::BadParameter(
            "need at least one stage, one state, and nonempty action sets".to_string(),
        ));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(p.seed);
    let n = p.action_counts.len();
    let horizon = p.stages;
    let m = p.state_count;
    let codec = TupleCodec::new(p.action_counts.clone());
    let ju_n = codec.len();

    let state_labels: Vec<String> = (0..m).map(|x| x.to_string()).collect();
    let act_labels: Vec<Vec<String>> = (0..n)
        .map(|i| (0..p.action_counts[i]).map(|u| u.to_string()).collect())
        .collect();
    let mut z_parts: Vec<&[String]> = vec![&state_labels];
    z_parts.extend(act_labels.iter().map(|l| l.as_slice()));
    let z_labels = product_labels(&z_parts);

    let mut kernels = Vec::with_capacity(horizon);
    for _t in 1..=horizon {
        let mut per_state = Vec::with_capacity(m);
        for _x in 0..m {
            let mut per_action = Vec::with_capacity(ju_n);
            for ju in 0..ju_n {
                let rewards: Vec<f64> = (0..n).map(|_| rand_reward(&mut rng)).collect();
                let next = rand_dist(m, &mut rng);
                let entries = (0..m)
                    .map(|x2| KernelEntry {
                        next_state: x2,
                        increments: vec![x2 * ju_n + ju; n],
                        rewards: rewards.clone(),
                        prob: next[x2],
                    })
                    .collect();
                per_action.push(entries);
            }
            per_state.push(per_action);
        }
        kernels.push(per_state);
    }

    let x1 = rand_dist(m, &mut rng);
    let def = GameDef {
        players: (0..n).map(|i| format!("p{i}")).collect(),
        horizon,
        states: (1..=horizon + 1)
            .map(|t| Space::new(format!("x[{t}]"), state_labels.clone()))
            .collect(),
        actions: (1..=horizon)
            .map(|t| {
                (0..n)
                    .map(|i| Space::numbered(format!("u[{t}] p{i}"), p.action_counts[i]))
                    .collect()
            })
            .collect(),
        increments: (1..=horizon)
            .map(|t| {
                (0..n)
                    .map(|i| Space::new(format!("z[{t}] p{i}"), z_labels.clone()))
                    .collect()
            })
            .collect(),
        initial_infos: (0..n)
            .map(|i| Space::new(format!("h[1] p{i}"), state_labels.clone()))
            .collect(),
        recall: (1..=horizon)
            .map(|_| {
                (0..n)
                    .map(|i| {
                        (0..m * ju_n).map(|z| codec.component(z % ju_n, i)).collect()
                    })
                    .collect()
            })
            .collect(),
        initial_law: (0..m)
            .map(|x| InitialEntry { state: x, infos: vec![x; n], prob: x1[x] })
            .collect(),
        kernels,
        support_cap: DEFAULT_SUPPORT_CAP,
    };
    let game = validate_game(def)?;

    // Summary: the current state.
    let compressions = CompressionProfile {
        compressions: (0..n)
            .map(|i| Compression {
                player: i,
                spaces: (1..=horizon + 1)
                    .map(|t| Space::new(format!("k[{t}] p{i}"), state_labels.clone()))
                    .collect(),
                init_map: (0..m).collect(),
                updates: (1..=horizon)
                    .map(|_| (0..m).map(|_| (0..m * ju_n).map(|z| z / ju_n).collect()).collect())
                    .collect(),
            })
            .collect(),
    };
    compressions.validate(&game)?;
    let expectations = vec![Expectation::new(
        "current-state summary is mutually sufficient",
        Basis::Analytic,
        TOL_WITNESS,
        Check::MsiHolds,
    )];
    Ok(Fixture {
        name: format!("maskin_tirole(T={},seed={})", p.stages, p.seed),
        request: FixtureRequest::MaskinTirole(p.clone()),
        game,
        compressions,
        split: None,
        assessment: None,
        expectations,
    })
}

fn nayyar(p: &NayyarParams) -> Result<Fixture, FixtureError> {
    if p.stages == 0
        || p.players == 0
        || p.state_count == 0
        || p.private_count == 0
        || p.action_count == 0
    {
        return Err(FixtureError::BadParameter("all counts must be positive".to_string()));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(p.seed);
    let n = p.players;
    let horizon = p.stages;
    let nx = p.state_count;
    let nl = p.private_count;
    let codec = TupleCodec::new(vec![p.action_count; n]);
    let ju_n = codec.len();

    // Strategy-independent common belief by construction: the next state
    // depends only on the joint action, and private signals only on the new
    // state. p0/q0 seed the initial law; pt[t-1][ju], qt[t-1][i][x'] drive
    // stage t.
    let p0 = rand_dist(nx, &mut rng);
    let q0: Vec<Vec<f64>> = (0..nx).map(|_| rand_dist(nl, &mut rng)).collect();
    let pt: Vec<Vec<Vec<f64>>> = (0..horizon)
        .map(|_| (0..ju_n).map(|_| rand_dist(nx, &mut rng)).collect())
        .collect();
    let qt: Vec<Vec<Vec<Vec<f64>>>> = (0..horizon)
        .map(|_| {
            (0..n)
                .map(|_| (0..nx).map(|_| rand_dist(nl, &mut rng)).collect())
                .collect()
        })
        .collect();
    let rewards: Vec<Vec<Vec<Vec<f64>>>> = (0..horizon)
        .map(|_| {
            (0..nx)
                .map(|_| {
                    (0..ju_n)
                        .map(|_| (0..n).map(|_| rand_reward(&mut rng)).collect())
                        .collect()
                })
                .collect()
        })
        .collect();

    let private_codec = TupleCodec::new(vec![nl; n]);
    let mut kernels = Vec::with_capacity(horizon);
    for t in 1..=horizon {
        let mut per_state = Vec::with_capacity(nx);
        for x in 0..nx {
            let mut per_action = Vec::with_capacity(ju_n);
            for ju in 0..ju_n {
                let mut entries = Vec::new();
                for x2 in 0..nx {
                    for lp in private_codec.iter() {
                        let ls = private_codec.decode(lp);
                        let mut prob = pt[t - 1][ju][x2];
                        for i in 0..n {
                            prob *= qt[t - 1][i][x2][ls[i]];
                        }
                        entries.push(KernelEntry {
                            next_state: x2,
                            increments: (0..n).map(|i| ju * nl + ls[i]).collect(),
                            rewards: rewards[t - 1][x][ju].clone(),
                            prob,
                        });
                    }
                }
                per_action.push(entries);
            }
            per_state.push(per_action);
        }
        kernels.push(per_state);
    }

    let mut initial_law = Vec::new();
    for x in 0..nx {
        for lp in private_codec.iter() {
            let ls = private_codec.decode(lp);
            let mut prob = p0[x];
            for &l in &ls {
                prob *= q0[x][l];
            }
            initial_law.push(InitialEntry { state: x, infos: ls, prob });
        }
    }

    let l_labels: Vec<String> = (0..nl).map(|l| l.to_string()).collect();
    let ju_labels: Vec<String> = {
        let per: Vec<Vec<String>> = (0..n)
            .map(|_| (0..p.action_count).map(|u| u.to_string()).collect())
            .collect();
        product_labels(&per.iter().map(|v| v.as_slice()).collect::<Vec<_>>())
    };
    let z_labels = product_labels(&[&ju_labels, &l_labels]);

    let def = GameDef {
        players: (0..n).map(|i| format!("p{i}")).collect(),
        horizon,
        states: (1..=horizon + 1)
            .map(|t| Space::numbered(format!("x[{t}]"), nx))
            .collect(),
        actions: (1..=horizon)
            .map(|t| {
                (0..n)
                    .map(|i| Space::numbered(format!("u[{t}] p{i}"), p.action_count))
                    .collect()
            })
            .collect(),
        increments: (1..=horizon)
            .map(|t| {
                (0..n)
                    .map(|i| Space::new(format!("z[{t}] p{i}"), z_labels.clone()))
                    .collect()
            })
            .collect(),
        initial_infos: (0..n)
            .map(|i| Space::new(format!("h[1] p{i}"), l_labels.clone()))
            .collect(),
        recall: (1..=horizon)
            .map(|_| {
                (0..n)
                    .map(|i| {
                        (0..ju_n * nl).map(|z| codec.component(z / nl, i)).collect()
                    })
                    .collect()
            })
            .collect(),
        initial_law,
        kernels,
        support_cap: DEFAULT_SUPPORT_CAP,
    };
    let game = validate_game(def)?;

    // Beliefs over (state, all private signals) given common information,
    // computed in closed form and deduplicated into classes per time.
    let belief_dim = nx * private_codec.len();
    let prior: Vec<f64> = {
        let mut v = Vec::with_capacity(belief_dim);
        for x in 0..nx {
            for lp in private_codec.iter() {
                let ls = private_codec.decode(lp);
                let mut pr = p0[x];
                for &l in &ls {
                    pr *= q0[x][l];
                }
                v.push(pr);
            }
        }
        v
    };
    // classes[time-1]: distinct belief vectors; class_of[time-1][ju] maps the
    // last joint action to a class (time 1 has the single prior class).
    let mut classes: Vec<Vec<Vec<f64>>> = vec![vec![prior]];
    let mut class_of: Vec<Vec<usize>> = vec![vec![0]];
    for t in 1..=horizon {
        let mut time_classes: Vec<Vec<f64>> = Vec::new();
        let mut map = Vec::with_capacity(ju_n);
        for ju in 0..ju_n {
            let mut v = Vec::with_capacity(belief_dim);
            for x2 in 0..nx {
                for lp in private_codec.iter() {
                    let ls = private_codec.decode(lp);
                    let mut pr = pt[t - 1][ju][x2];
                    for i in 0..n {
                        pr *= qt[t - 1][i][x2][ls[i]];
                    }
                    v.push(pr);
                }
            }
            let found = time_classes.iter().position(|c| {
                c.iter().zip(&v).all(|(a, b)| (a - b).abs() <= 1e-9)
            });
            let idx = match found {
                Some(idx) => idx,
                None => {
                    time_classes.push(v);
                    time_classes.len() - 1
                }
            };
            map.push(idx);
        }
        classes.push(time_classes);
        class_of.push(map);
    }

    let compressions = CompressionProfile {
        compressions: (0..n)
            .map(|i| {
                let spaces: Vec<Space> = (1..=horizon + 1)
                    .map(|time| {
                        let nc = classes[time - 1].len();
                        let labels = (0..nc)
                            .flat_map(|c| (0..nl).map(move |l| format!("b{c},l{l}")))
                            .collect();
                        Space::new(format!("k[{time}] p{i}"), labels)
                    })
                    .collect();
                let updates = (1..=horizon)
                    .map(|t| {
                        let kn = classes[t - 1].len() * nl;
                        (0..kn)
                            .map(|_| {
                                (0..ju_n * nl)
                                    .map(|z| {
                                        let ju = z / nl;
                                        let l2 = z % nl;
                                        class_of[t][ju] * nl + l2
                                    })
                                    .collect()
                            })
                            .collect()
                    })
                    .collect();
                Compression {
                    player: i,
                    spaces,
                    init_map: (0..nl).collect(),
                    updates,
                }
            })
            .collect(),
    };
    compressions.validate(&game)?;
    let expectations = vec![Expectation::new(
        "belief-plus-private summary is mutually sufficient",
        Basis::Construction,
        TOL_WITNESS,
        Check::MsiHolds,
    )];
    Ok(Fixture {
        name: format!("nayyar(T={},seed={})", p.stages, p.seed),
        request: FixtureRequest::Nayyar(p.clone()),
        game,
        compressions,
        split: None,
        assessment: None,
        expectations,
    })
}

fn ouyang(p: &OuyangParams) -> Result<Fixture, FixtureError> {
    let n = p.local_counts.len();
    if p.stages == 0 || n == 0 {
        return Err(FixtureError::BadParameter("need at least one stage and one player".to_string()));
    }
    if p.obs_counts.len() != n
        || p.action_counts.len() != p.stages
        || p.action_counts.iter().any(|row| row.len() != n)
        || p.local_counts.contains(&0)
        || p.obs_counts.contains(&0)
        || p.action_counts.iter().flatten().any(|&c| c == 0)
    {
        return Err(FixtureError::BadParameter(
            "per-player local/observation counts and per-stage action counts must be consistent and positive"
                .to_string(),
        ));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(p.seed);
    let horizon = p.stages;
    let state_codec = TupleCodec::new(p.local_counts.clone());
    let obs_codec = TupleCodec::new(p.obs_counts.clone());
    let nx = state_codec.len();
    let ny = obs_codec.len();
    let act_codecs: Vec<TupleCodec> = (0..horizon)
        .map(|ti| TupleCodec::new(p.action_counts[ti].clone()))
        .collect();

    // Per-player stage kernels over (next local state, own public signal),
    // indexed [t-1][i][x_i][ju]; rewards indexed [t-1][x][ju][i].
    let q: Vec<Vec<Vec<Vec<Vec<f64>>>>> = (0..horizon)
        .map(|ti| {
            (0..n)
                .map(|i| {
                    (0..p.local_counts[i])
                        .map(|_| {
                            (0..act_codecs[ti].len())
                                .map(|_| rand_dist(p.local_counts[i] * p.obs_counts[i], &mut rng))
                                .collect()
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let rewards: Vec<Vec<Vec<Vec<f64>>>> = (0..horizon)
        .map(|ti| {
            (0..nx)
                .map(|_| {
                    (0..act_codecs[ti].len())
                        .map(|_| (0..n).map(|_| rand_reward(&mut rng)).collect())
                        .collect()
                })
                .collect()
        })
        .collect();
    let init: Vec<Vec<f64>> = (0..n).map(|i| rand_dist(p.local_counts[i], &mut rng)).collect();

    // Build kernels: combine the per-player draws into joint outcomes.
    let mut kernels = Vec::with_capacity(horizon);
    for t in 1..=horizon {
        let ju_n = act_codecs[t - 1].len();
        let mut per_state = Vec::with_capacity(nx);
        for x in 0..nx {
            let xs = state_codec.decode(x);
            let mut per_action = Vec::with_capacity(ju_n);
            for ju in 0..ju_n {
                // Iterate the product of per-player (x', y) outcomes.
                let pair_codec = TupleCodec::new(
                    (0..n).map(|i| p.local_counts[i] * p.obs_counts[i]).collect(),
                );
                let mut entries = Vec::with_capacity(pair_codec.len());
                for combo in pair_codec.iter() {
                    let pairs = pair_codec.decode(combo);
                    let mut prob = 1.0;
                    let mut next_parts = vec![0usize; n];
                    let mut y_parts = vec![0usize; n];
                    for i in 0..n {
                        prob *= q[t - 1][i][xs[i]][ju][pairs[i]];
                        next_parts[i] = pairs[i] / p.obs_counts[i];
                        y_parts[i] = pairs[i] % p.obs_counts[i];
                    }
                    let y_joint = obs_codec.encode(&y_parts);
                    let increments = (0..n)
                        .map(|i| (y_joint * ju_n + ju) * p.local_counts[i] + next_parts[i])
                        .collect();
                    entries.push(KernelEntry {
                        next_state: state_codec.encode(&next_parts),
                        increments,
                        rewards: rewards[t - 1][x][ju].clone(),
                        prob,
                    });
                }
                per_action.push(entries);
            }
            per_state.push(per_action);
        }
        kernels.push(per_state);
    }

    let mut initial_law = Vec::new();
    for x in 0..nx {
        let xs = state_codec.decode(x);
        let mut prob = 1.0;
        for i in 0..n {
            prob *= init[i][xs[i]];
        }
        initial_law.push(InitialEntry { state: x, infos: xs, prob });
    }

    let def = GameDef {
        players: (0..n).map(|i| format!("p{i}")).collect(),
        horizon,
        states: (1..=horizon + 1)
            .map(|t| Space::numbered(format!("x[{t}]"), nx))
            .collect(),
        actions: (1..=horizon)
            .map(|t| {
                (0..n)
                    .map(|i| Space::numbered(format!("u[{t}] p{i}"), p.action_counts[t - 1][i]))
                    .collect()
            })
            .collect(),
        increments: (1..=horizon)
            .map(|t| {
                let ju_n = act_codecs[t - 1].len();
                (0..n)
                    .map(|i| {
                        Space::numbered(
                            format!("z[{t}] p{i}"),
                            ny * ju_n * p.local_counts[i],
                        )
                    })
                    .collect()
            })
            .collect(),
        initial_infos: (0..n)
            .map(|i| Space::numbered(format!("h[1] p{i}"), p.local_counts[i]))
            .collect(),
        recall: (1..=horizon)
            .map(|t| {
                let ju_n = act_codecs[t - 1].len();
                (0..n)
                    .map(|i| {
                        (0..ny * ju_n * p.local_counts[i])
                            .map(|z| {
                                let ju = (z / p.local_counts[i]) % ju_n;
                                act_codecs[t - 1].component(ju, i)
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect(),
        initial_law,
        kernels,
        support_cap: DEFAULT_SUPPORT_CAP,
    };
    let game = validate_game(def)?;

    // Summary: public record (y, u) so far plus the current local state.
    // k_t is coded with the codec [ny*nu_1, ..., ny*nu_{t-1}, locals[i]].
    let compressions = CompressionProfile {
        compressions: (0..n)
            .map(|i| {
                let k_codec = |time: usize| -> TupleCodec {
                    let mut sizes: Vec<usize> =
                        (1..time).map(|s| ny * act_codecs[s - 1].len()).collect();
                    sizes.push(p.local_counts[i]);
                    TupleCodec::new(sizes)
                };
                let spaces: Vec<Space> = (1..=horizon + 1)
                    .map(|time| Space::numbered(format!("k[{time}] p{i}"), k_codec(time).len()))
                    .collect();
                let updates = (1..=horizon)
                    .map(|t| {
                        let ju_n = act_codecs[t - 1].len();
                        let now = k_codec(t);
                        let next = k_codec(t + 1);
                        (0..now.len())
                            .map(|k| {
                                let parts = now.decode(k);
                                let record = &parts[..parts.len() - 1];
                                (0..ny * ju_n * p.local_counts[i])
                                    .map(|z| {
                                        let x2 = z % p.local_counts[i];
                                        let w = z / p.local_counts[i]; // y * ju_n + ju
                                        let mut np = record.to_vec();
                                        np.push(w);
                                        np.push(x2);
                                        next.encode(&np)
                                    })
                                    .collect()
                            })
                            .collect()
                    })
                    .collect();
                Compression {
                    player: i,
                    spaces,
                    init_map: (0..p.local_counts[i]).collect(),
                    updates,
                }
            })
            .collect(),
    };
    compressions.validate(&game)?;
    let mut expectations = vec![Expectation::new(
        "public-record-plus-local-state summary is mutually sufficient",
        Basis::Analytic,
        TOL_WITNESS,
        Check::MsiHolds,
    )];
    for i in 0..n {
        expectations.push(Expectation::new(
            &format!("summary is unilaterally sufficient (p{i})"),
            Basis::Analytic,
            TOL_WITNESS,
            Check::UsiHolds { player: i },
        ));
    }
    Ok(Fixture {
        name: format!("ouyang(T={},seed={})", p.stages, p.seed),
        request: FixtureRequest::Ouyang(p.clone()),
        game,
        compressions,
        split: None,
        assessment: None,
        expectations,
    })
}

// ---------------------------------------------------------------------------
// Random instances for property tests
// ---------------------------------------------------------------------------

/// Small random two-player game: every action set has 1-2 actions, states
/// have up to 3 values, and each increment is (own action, common signal).
/// Rewards vary per kernel outcome. Always validates.
pub fn random_small_game<R: Rng>(rng: &mut R) -> GameDef {
    let n = 2;
    let horizon = rng.gen_range(1..=3);
    let state_sizes: Vec<usize> = (0..=horizon).map(|_| rng.gen_range(1..=3)).collect();
    let action_sizes: Vec<Vec<usize>> = (0..horizon)
        .map(|_| (0..n).map(|_| rng.gen_range(1..=2)).collect())
        .collect();
    let info_sizes: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=2)).collect();
    let obs = rng.gen_range(1..=2); // common signal alphabet

    let mut kernels = Vec::with_capacity(horizon);
    for t in 1..=horizon {
        let codec = TupleCodec::new(action_sizes[t - 1].clone());
        let mut per_state = Vec::with_capacity(state_sizes[t - 1]);
        for _x in 0..state_sizes[t - 1] {
            let mut per_action = Vec::with_capacity(codec.len());
            for ju in codec.iter() {
                let us = codec.decode(ju);
                let dist = rand_dist(state_sizes[t] * obs, rng);
                let entries = (0..state_sizes[t] * obs)
                    .map(|o| {
                        let x2 = o / obs;
                        let y = o % obs;
                        KernelEntry {
                            next_state: x2,
                            increments: (0..n).map(|i| us[i] * obs + y).collect(),
                            rewards: (0..n).map(|_| rand_reward(rng)).collect(),
                            prob: dist[o],
                        }
                    })
                    .collect();
                per_action.push(entries);
            }
            per_state.push(per_action);
        }
        kernels.push(per_state);
    }

    let info_codec = TupleCodec::new(info_sizes.clone());
    let joint_init = rand_dist(state_sizes[0] * info_codec.len(), rng);
    let initial_law = (0..state_sizes[0] * info_codec.len())
        .map(|o| InitialEntry {
            state: o / info_codec.len(),
            infos: info_codec.decode(o % info_codec.len()),
            prob: joint_init[o],
        })
        .collect();

    GameDef {
        players: (0..n).map(|i| format!("p{i}")).collect(),
        horizon,
        states: (1..=horizon + 1)
            .map(|t| Space::numbered(format!("x[{t}]"), state_sizes[t - 1]))
            .collect(),
        actions: (1..=horizon)
            .map(|t| {
                (0..n)
                    .map(|i| Space::numbered(format!("u[{t}] p{i}"), action_sizes[t - 1][i]))
                    .collect()
            })
            .collect(),
        increments: (1..=horizon)
            .map(|t| {
                (0..n)
                    .map(|i| {
                        Space::numbered(format!("z[{t}] p{i}"), action_sizes[t - 1][i] * obs)
                    })
                    .collect()
            })
            .collect(),
        initial_infos: (0..n)
            .map(|i| Space::numbered(format!("h[1] p{i}"), info_sizes[i]))
            .collect(),
        recall: (1..=horizon)
            .map(|t| {
                (0..n)
                    .map(|i| {
                        (0..action_sizes[t - 1][i] * obs).map(|z| z / obs).collect()
                    })
                    .collect()
            })
            .collect(),
        initial_law,
        kernels,
        support_cap: DEFAULT_SUPPORT_CAP,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{compute_payoffs, StrategyProfile};

    #[test]
    fn standard_suite_builds_and_validates() {
        for req in standard_suite() {
            let fx = build_example(&req).unwrap();
            assert!(!fx.expectations.is_empty(), "{} has no expectations", fx.name);
            fx.compressions.validate(&fx.game).unwrap();
        }
    }

    #[test]
    fn standard_suite_expectations_replay_clean() {
        for req in standard_suite() {
            let fx = build_example(&req).unwrap();
            let run = run_fixture(&fx);
            for o in &run.outcomes {
                assert!(o.passed, "{}: {} ({})", run.name, o.label, o.detail);
            }
            assert!(run.all_passed());
        }
    }

    /// A wrong claim must come back as a failed outcome, not a panic.
    #[test]
    fn tampered_claim_fails_without_aborting() {
        let mut fx = build_example(&FixtureRequest::Example1).unwrap();
        fx.expectations = vec![Expectation::new(
            "deliberately wrong payoff",
            Basis::Analytic,
            TOL_SOLVER,
            Check::SolvedKBnePayoffs { payoffs: vec![0.0, 0.0] },
        )];
        let run = run_fixture(&fx);
        assert!(!run.all_passed());
        assert!(run.outcomes[0].detail.contains("off by"), "{}", run.outcomes[0].detail);
    }

    #[test]
    fn signaling_cost_outside_range_is_rejected() {
        for c in [0.0, 1.0 / 3.0, 0.4, -0.1] {
            assert!(matches!(
                build_example(&FixtureRequest::Example3 { c }),
                Err(FixtureError::BadParameter(_))
            ));
        }
    }

    #[test]
    fn fixtures_are_deterministic() {
        let a = build_example(&FixtureRequest::Ouyang(OuyangParams::standard(5))).unwrap();
        let b = build_example(&FixtureRequest::Ouyang(OuyangParams::standard(5))).unwrap();
        assert_eq!(a.game.def(), b.game.def());
        assert_eq!(a.compressions, b.compressions);
    }

    #[test]
    fn random_small_games_validate() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for _ in 0..40 {
            let def = random_small_game(&mut rng);
            let game = validate_game(def).unwrap();
            let payoffs = compute_payoffs(&game, &StrategyProfile::uniform(&game)).unwrap();
            for p in payoffs.total {
                assert!(p.abs() <= game.horizon() as f64 + 1e-12);
            }
        }
    }
}
