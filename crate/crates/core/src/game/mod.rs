//! Game model: finite dynamic games with asymmetric information.
//!
//! A game runs over stages `t = 1..=T`. At stage `t` the system sits in a
//! state `x_t`, every player `i` picks an action `u_t^i` based on their
//! private history, and a stage kernel draws `(x_{t+1}, z_t, r_t)`: the next
//! state, one observation increment `z_t^i` per player, and one bounded
//! reward per player. Player `i`'s history at time `t` is
//! `h_t^i = (h_1^i, z_1^i, ..., z_{t-1}^i)`; perfect recall is enforced by a
//! declared projection from each increment space onto the acting player's
//! action space.
//!
//! [`GameDef`] is the raw, fully public description; [`validate_game`]
//! checks it and produces a [`GameSpec`] with precomputed history and joint
//! tuple codecs. All other operations take a `GameSpec`.

mod compression;
mod conditional;
mod forward;
mod history;
mod monte_carlo;
mod strategy;

pub use compression::{identity_compression, Compression, CompressionError, CompressionProfile};
pub use conditional::{conditional_table, CondError, CondRow, ConditionalTable, RowStatus, Var};
pub use forward::{
    compute_payoffs, forward_distribution, stage_law, DistTable, ForwardError, JointDistribution,
    JointEntry, Payoffs, StageAtom,
};
pub use history::{history_extend, history_prefix, History};
pub use monte_carlo::{monte_carlo_payoff, McPayoff};
pub use strategy::{BehavioralStrategy, KStrategy, StrategyError, StrategyProfile};

use crate::num::{compensated_sum, TOL_MODEL};
use crate::space::{Space, TupleCodec};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default cap on the number of entries any enumerated support may hold.
pub const DEFAULT_SUPPORT_CAP: usize = 10_000_000;

/// One atom of the initial law: a state, one initial-information value per
/// player, and its probability.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialEntry {
    pub state: usize,
    pub infos: Vec<usize>,
    pub prob: f64,
}

/// One outcome of a stage kernel row: next state, one increment per player,
/// one reward per player, and the outcome probability.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelEntry {
    pub next_state: usize,
    pub increments: Vec<usize>,
    pub rewards: Vec<f64>,
    pub prob: f64,
}

/// Raw description of a game; validated into a [`GameSpec`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameDef {
    pub players: Vec<String>,
    /// Number of stages `T`.
    pub horizon: usize,
    /// State spaces for times `1..=T+1` (length `T+1`).
    pub states: Vec<Space>,
    /// Action spaces, `actions[t-1][i]` for stage `t`.
    pub actions: Vec<Vec<Space>>,
    /// Increment spaces, `increments[t-1][i]` for stage `t`.
    pub increments: Vec<Vec<Space>>,
    /// Initial private information spaces, one per player.
    pub initial_infos: Vec<Space>,
    /// Declared perfect-recall projections: `recall[t-1][i][z] = u` says
    /// increment `z` reports action `u`. Kernel rows must respect it.
    pub recall: Vec<Vec<Vec<usize>>>,
    /// Initial joint law over `(x_1, h_1^1, ..., h_1^n)`.
    pub initial_law: Vec<InitialEntry>,
    /// `kernels[t-1][x][joint_u]` lists the outcomes of stage `t`.
    pub kernels: Vec<Vec<Vec<Vec<KernelEntry>>>>,
    /// Enumeration guard for forward supports and conditional tables.
    pub support_cap: usize,
}

/// A single validation defect; a report carries all of them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Defect {
    /// Shape or index problem described in plain text.
    Structure(String),
    /// A kernel row's probabilities are negative or do not sum to one.
    NonStochasticKernel { t: usize, state: usize, action: usize, sum: f64 },
    /// The initial law is not a probability distribution.
    NonStochasticInitialLaw { sum: f64 },
    /// A reward leaves the `[-1, 1]` band.
    RewardOutOfRange { t: usize, player: usize, state: usize, action: usize, value: f64 },
    /// A kernel outcome's increment reports a different action than the one
    /// actually taken, breaking the declared recall projection.
    PerfectRecallViolation { t: usize, player: usize, state: usize, action: usize, increment: usize },
}

impl std::fmt::Display for Defect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Defect::Structure(msg) => write!(f, "structure: {msg}"),
            Defect::NonStochasticKernel { t, state, action, sum } => write!(
                f,
                "kernel row (t={t}, x={state}, u={action}) sums to {sum}, not 1"
            ),
            Defect::NonStochasticInitialLaw { sum } => {
                write!(f, "initial law sums to {sum}, not 1")
            }
            Defect::RewardOutOfRange { t, player, state, action, value } => write!(
                f,
                "reward {value} for player {player} at (t={t}, x={state}, u={action}) is outside [-1, 1]"
            ),
            Defect::PerfectRecallViolation { t, player, state, action, increment } => write!(
                f,
                "increment {increment} for player {player} at (t={t}, x={state}, u={action}) does not report the action taken"
            ),
        }
    }
}

/// All defects found by [`validate_game`].
#[derive(Clone, Debug, Error)]
#[error("invalid game: {}", self.defects.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
pub struct ValidationReport {
    pub defects: Vec<Defect>,
}

/// A validated game with precomputed codecs.
#[derive(Clone, Debug)]
pub struct GameSpec {
    def: GameDef,
    /// `hist[i][time-1]` encodes `H_time^i` for `time = 1..=T+1`.
    hist: Vec<Vec<TupleCodec>>,
    /// Joint action codec per stage.
    act: Vec<TupleCodec>,
    /// Joint increment codec per stage.
    inc: Vec<TupleCodec>,
}

impl GameSpec {
    pub fn def(&self) -> &GameDef {
        &self.def
    }

    pub fn num_players(&self) -> usize {
        self.def.players.len()
    }

    pub fn players(&self) -> &[String] {
        &self.def.players
    }

    pub fn player_name(&self, i: usize) -> &str {
        &self.def.players[i]
    }

    pub fn player_index(&self, name: &str) -> Option<usize> {
        self.def.players.iter().position(|p| p == name)
    }

    /// Number of stages `T`.
    pub fn horizon(&self) -> usize {
        self.def.horizon
    }

    /// State space at `time` in `1..=T+1`.
    pub fn state_space(&self, time: usize) -> &Space {
        &self.def.states[time - 1]
    }

    /// Action space of player `i` at stage `t` in `1..=T`.
    pub fn action_space(&self, t: usize, i: usize) -> &Space {
        &self.def.actions[t - 1][i]
    }

    /// Increment space of player `i` at stage `t` in `1..=T`.
    pub fn increment_space(&self, t: usize, i: usize) -> &Space {
        &self.def.increments[t - 1][i]
    }

    pub fn initial_info_space(&self, i: usize) -> &Space {
        &self.def.initial_infos[i]
    }

    /// Codec for player `i`'s histories at `time` in `1..=T+1`.
    pub fn history_codec(&self, i: usize, time: usize) -> &TupleCodec {
        &self.hist[i][time - 1]
    }

    /// Number of histories of player `i` at `time`.
    pub fn history_count(&self, i: usize, time: usize) -> usize {
        self.hist[i][time - 1].len()
    }

    /// Joint action codec for stage `t`.
    pub fn joint_action_codec(&self, t: usize) -> &TupleCodec {
        &self.act[t - 1]
    }

    /// Joint increment codec for stage `t`.
    pub fn joint_increment_codec(&self, t: usize) -> &TupleCodec {
        &self.inc[t - 1]
    }

    /// Outcomes of the stage-`t` kernel at `(x, joint_u)`.
    pub fn kernel_entries(&self, t: usize, x: usize, joint_u: usize) -> &[KernelEntry] {
        &self.def.kernels[t - 1][x][joint_u]
    }

    pub fn initial_law(&self) -> &[InitialEntry] {
        &self.def.initial_law
    }

    /// Action reported by increment `z` of player `i` at stage `t`.
    pub fn recall_action(&self, t: usize, i: usize, z: usize) -> usize {
        self.def.recall[t - 1][i][z]
    }

    pub fn support_cap(&self) -> usize {
        self.def.support_cap
    }

    /// Largest action-set size over all stages and players.
    pub fn max_action_count(&self) -> usize {
        self.def
            .actions
            .iter()
            .flat_map(|row| row.iter().map(Space::len))
            .max()
            .unwrap_or(1)
    }

    /// Render a history of player `i` at `time` for diagnostics.
    pub fn history_label(&self, i: usize, time: usize, index: usize) -> String {
        let parts = self.hist[i][time - 1].decode(index);
        let mut out = Vec::with_capacity(parts.len());
        out.push(self.def.initial_infos[i].label(parts[0]).to_string());
        for (s, &z) in parts.iter().skip(1).enumerate() {
            out.push(self.def.increments[s][i].label(z).to_string());
        }
        format!("({})", out.join(","))
    }
}

/// Check a raw description and build the validated game.
pub fn validate_game(def: GameDef) -> Result<GameSpec, ValidationReport> {
    let mut defects = Vec::new();
    let n = def.players.len();
    let horizon = def.horizon;

    if n == 0 {
        defects.push(Defect::Structure("no players".into()));
    }
    if horizon == 0 {
        defects.push(Defect::Structure("horizon must be at least 1".into()));
    }
    {
        let mut names = def.players.clone();
        names.sort();
        names.dedup();
        if names.len() != n {
            defects.push(Defect::Structure("duplicate player names".into()));
        }
    }
    if def.states.len() != horizon + 1 {
        defects.push(Defect::Structure(format!(
            "expected {} state spaces (times 1..=T+1), found {}",
            horizon + 1,
            def.states.len()
        )));
    }
    for (what, spaces) in [("actions", &def.actions), ("increments", &def.increments)] {
        if spaces.len() != horizon {
            defects.push(Defect::Structure(format!(
                "expected {horizon} stage rows of {what}, found {}",
                spaces.len()
            )));
        } else if let Some(t) = spaces.iter().position(|row| row.len() != n) {
            defects.push(Defect::Structure(format!(
                "{what} at stage {} must list one space per player",
                t + 1
            )));
        }
    }
    if def.initial_infos.len() != n {
        defects.push(Defect::Structure("initial information spaces must list one per player".into()));
    }
    for sp in def
        .states
        .iter()
        .chain(def.initial_infos.iter())
        .chain(def.actions.iter().flatten())
        .chain(def.increments.iter().flatten())
    {
        if !sp.well_formed() {
            defects.push(Defect::Structure(format!(
                "space {} is empty or has duplicate labels",
                sp.name
            )));
        }
    }
    if !defects.is_empty() {
        return Err(ValidationReport { defects });
    }

    // Recall projections: shape and range.
    if def.recall.len() != horizon {
        defects.push(Defect::Structure("recall projections must cover every stage".into()));
    } else {
        for (ti, row) in def.recall.iter().enumerate() {
            if row.len() != n {
                defects.push(Defect::Structure(format!(
                    "recall at stage {} must list one projection per player",
                    ti + 1
                )));
                continue;
            }
            for (i, proj) in row.iter().enumerate() {
                let zn = def.increments[ti][i].len();
                let un = def.actions[ti][i].len();
                if proj.len() != zn || proj.iter().any(|&u| u >= un) {
                    defects.push(Defect::Structure(format!(
                        "recall projection for player {i} at stage {} must map all {zn} increments into {un} actions",
                        ti + 1
                    )));
                }
            }
        }
    }

    // Initial law.
    if def.initial_law.is_empty() {
        defects.push(Defect::Structure("initial law is empty".into()));
    }
    let mut init_ok = true;
    for e in &def.initial_law {
        if e.state >= def.states[0].len()
            || e.infos.len() != n
            || e.infos.iter().enumerate().any(|(i, &h)| h >= def.initial_infos[i].len())
        {
            defects.push(Defect::Structure("initial-law entry indexes out of range".into()));
            init_ok = false;
        }
        if e.prob < -TOL_MODEL || e.prob > 1.0 + TOL_MODEL {
            defects.push(Defect::Structure(format!(
                "initial-law probability {} outside [0, 1]",
                e.prob
            )));
            init_ok = false;
        }
    }
    if init_ok {
        let sum = compensated_sum(def.initial_law.iter().map(|e| e.prob));
        if (sum - 1.0).abs() > TOL_MODEL {
            defects.push(Defect::NonStochasticInitialLaw { sum });
        }
    }

    // Kernels.
    if def.kernels.len() != horizon {
        defects.push(Defect::Structure("kernels must cover every stage".into()));
    } else {
        for t in 1..=horizon {
            let stage = &def.kernels[t - 1];
            let xs = def.states[t - 1].len();
            let joint: usize = def.actions[t - 1].iter().map(Space::len).product();
            if stage.len() != xs || stage.iter().any(|row| row.len() != joint) {
                defects.push(Defect::Structure(format!(
                    "kernel at stage {t} must have one row per (state, joint action)"
                )));
                continue;
            }
            for x in 0..xs {
                for u in 0..joint {
                    let entries = &stage[x][u];
                    if entries.is_empty() {
                        defects.push(Defect::NonStochasticKernel { t, state: x, action: u, sum: 0.0 });
                        continue;
                    }
                    let mut row_ok = true;
                    for e in entries {
                        if e.next_state >= def.states[t].len()
                            || e.increments.len() != n
                            || e.rewards.len() != n
                            || e
                                .increments
                                .iter()
                                .enumerate()
                                .any(|(i, &z)| z >= def.increments[t - 1][i].len())
                        {
                            defects.push(Defect::Structure(format!(
                                "kernel outcome at (t={t}, x={x}, u={u}) indexes out of range"
                            )));
                            row_ok = false;
                            continue;
                        }
                        if e.prob < -TOL_MODEL || e.prob > 1.0 + TOL_MODEL {
                            row_ok = false;
                        }
                        for (i, &r) in e.rewards.iter().enumerate() {
                            if !(-1.0 - TOL_MODEL..=1.0 + TOL_MODEL).contains(&r) {
                                defects.push(Defect::RewardOutOfRange {
                                    t,
                                    player: i,
                                    state: x,
                                    action: u,
                                    value: r,
                                });
                            }
                        }
                    }
                    let sum = compensated_sum(entries.iter().map(|e| e.prob));
                    if !row_ok || (sum - 1.0).abs() > TOL_MODEL {
                        defects.push(Defect::NonStochasticKernel { t, state: x, action: u, sum });
                    }
                }
            }
        }
    }

    // Perfect recall: positive-probability outcomes must report the action
    // taken through the declared projection.
    if defects.is_empty() {
        for t in 1..=horizon {
            let act_codec = TupleCodec::new(def.actions[t - 1].iter().map(Space::len).collect());
            for (x, row) in def.kernels[t - 1].iter().enumerate() {
                for (u_joint, entries) in row.iter().enumerate() {
                    let u = act_codec.decode(u_joint);
                    for e in entries {
                        if e.prob <= TOL_MODEL {
                            continue;
                        }
                        for i in 0..n {
                            if def.recall[t - 1][i][e.increments[i]] != u[i] {
                                defects.push(Defect::PerfectRecallViolation {
                                    t,
                                    player: i,
                                    state: x,
                                    action: u_joint,
                                    increment: e.increments[i],
                                });
                            }
                        }
                    }
                }
            }
        }
    }

    if !defects.is_empty() {
        return Err(ValidationReport { defects });
    }

    // Precompute codecs.
    let mut hist = Vec::with_capacity(n);
    for i in 0..n {
        let mut per_time = Vec::with_capacity(horizon + 1);
        for time in 1..=(horizon + 1) {
            let mut sizes = vec![def.initial_infos[i].len()];
            for s in 1..time {
                sizes.push(def.increments[s - 1][i].len());
            }
            per_time.push(TupleCodec::new(sizes));
        }
        hist.push(per_time);
    }
    let act = (1..=horizon)
        .map(|t| TupleCodec::new(def.actions[t - 1].iter().map(Space::len).collect()))
        .collect();
    let inc = (1..=horizon)
        .map(|t| TupleCodec::new(def.increments[t - 1].iter().map(Space::len).collect()))
        .collect();

    Ok(GameSpec { def, hist, act, inc })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn fixture_games_validate() {
        let fx = fixtures::build_example(&fixtures::FixtureRequest::Example1).unwrap();
        assert_eq!(fx.game.num_players(), 2);
        assert_eq!(fx.game.horizon(), 2);
    }

    #[test]
    fn bad_kernel_row_is_reported() {
        let fx = fixtures::build_example(&fixtures::FixtureRequest::Example1).unwrap();
        let mut def = fx.game.def().clone();
        def.kernels[0][0][0][0].prob = 0.25;
        let err = validate_game(def).unwrap_err();
        assert!(err
            .defects
            .iter()
            .any(|d| matches!(d, Defect::NonStochasticKernel { t: 1, .. })));
    }

    #[test]
    fn out_of_band_reward_is_reported() {
        let fx = fixtures::build_example(&fixtures::FixtureRequest::Example1).unwrap();
        let mut def = fx.game.def().clone();
        def.kernels[0][0][0][0].rewards[0] = 1.5;
        let err = validate_game(def).unwrap_err();
        assert!(err
            .defects
            .iter()
            .any(|d| matches!(d, Defect::RewardOutOfRange { value, .. } if *value == 1.5)));
    }

    #[test]
    fn recall_violation_is_reported() {
        let fx = fixtures::build_example(&fixtures::FixtureRequest::Example1).unwrap();
        let mut def = fx.game.def().clone();
        // Point the first player's recall projection at the wrong action.
        def.recall[0][0] = def.recall[0][0].iter().map(|&u| 1 - u).collect();
        let err = validate_game(def).unwrap_err();
        assert!(err
            .defects
            .iter()
            .any(|d| matches!(d, Defect::PerfectRecallViolation { player: 0, .. })));
    }
}
