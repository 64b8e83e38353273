//! Conditional probability tables over stage variables.
//!
//! Many of the structural checks in this crate reduce to questions of the
//! form "what is the law of some stage variables given some others, and does
//! it depend on the strategy profile?". This module answers the first half:
//! it builds the exact conditional table of target variables given
//! conditioning variables at one stage, flagging conditioning cells that
//! carry zero probability (conditionals are undefined there).

use super::compression::CompressionProfile;
use super::forward::{forward_distribution, stage_law, ForwardError};
use super::history::history_extend;
use super::strategy::StrategyProfile;
use super::GameSpec;
use crate::num::TOL_MODEL;
use crate::space::TupleCodec;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A stage variable. `State`/`History`/`Compressed` live at a time in
/// `{t, t+1}` for a stage-`t` table; `Action`/`Increment`/`Reward` belong to
/// stage `t` itself.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Var {
    State { time: usize },
    History { player: usize, time: usize },
    Compressed { player: usize, time: usize },
    Action { player: usize },
    Increment { player: usize },
    Reward { player: usize },
}

#[derive(Clone, Debug, PartialEq, Error, Serialize, Deserialize)]
pub enum CondError {
    #[error("conditional table shape problem: {0}")]
    Shape(String),
    #[error(transparent)]
    Forward(#[from] ForwardError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum RowStatus {
    /// The conditioning cell has positive probability `mass`.
    Admissible { mass: f64 },
    /// The conditioning cell never occurs; no conditional is defined.
    Inadmissible,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CondRow {
    /// One value per conditioning variable.
    pub given: Vec<usize>,
    pub status: RowStatus,
    /// Conditional probabilities indexed by the target tuple codec; empty
    /// when the row is inadmissible.
    pub probs: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionalTable {
    pub stage: usize,
    pub targets: Vec<Var>,
    pub givens: Vec<Var>,
    pub target_sizes: Vec<usize>,
    pub given_sizes: Vec<usize>,
    /// For each `Reward` variable (in targets-then-givens order), the sorted
    /// distinct values its index refers to.
    pub reward_domains: Vec<Vec<f64>>,
    pub rows: Vec<CondRow>,
}

struct VarReader {
    size: usize,
    kind: ReaderKind,
}

enum ReaderKind {
    StateNow,
    StateNext,
    HistNow(usize),
    HistNext(usize),
    CompNow(usize, Vec<usize>),
    CompNext(usize, Vec<usize>),
    Action(usize),
    Increment(usize),
    Reward(usize, Vec<f64>),
}

fn reward_domain(game: &GameSpec, t: usize, i: usize) -> Vec<f64> {
    let mut vals: Vec<f64> = Vec::new();
    let xs = game.state_space(t).len();
    let un = game.joint_action_codec(t).len();
    for x in 0..xs {
        for u in 0..un {
            for e in game.kernel_entries(t, x, u) {
                let r = e.rewards[i];
                if !vals.iter().any(|&v| (v - r).abs() <= TOL_MODEL) {
                    vals.push(r);
                }
            }
        }
    }
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals
}

fn build_reader(
    game: &GameSpec,
    comps: Option<&CompressionProfile>,
    t: usize,
    var: &Var,
    reward_domains: &mut Vec<Vec<f64>>,
) -> Result<VarReader, CondError> {
    let n = game.num_players();
    let check_player = |i: usize| -> Result<(), CondError> {
        if i >= n {
            Err(CondError::Shape(format!("no player {i}")))
        } else {
            Ok(())
        }
    };
    match *var {
        Var::State { time } if time == t => {
            Ok(VarReader { size: game.state_space(t).len(), kind: ReaderKind::StateNow })
        }
        Var::State { time } if time == t + 1 => {
            Ok(VarReader { size: game.state_space(t + 1).len(), kind: ReaderKind::StateNext })
        }
        Var::State { time } => Err(CondError::Shape(format!(
            "state at time {time} is not visible from stage {t}"
        ))),
        Var::History { player, time } if time == t || time == t + 1 => {
            check_player(player)?;
            let kind =
                if time == t { ReaderKind::HistNow(player) } else { ReaderKind::HistNext(player) };
            Ok(VarReader { size: game.history_count(player, time), kind })
        }
        Var::History { time, .. } => Err(CondError::Shape(format!(
            "history at time {time} is not visible from stage {t}"
        ))),
        Var::Compressed { player, time } if time == t || time == t + 1 => {
            check_player(player)?;
            let comp = comps
                .ok_or_else(|| {
                    CondError::Shape("compressed variables need a compression profile".into())
                })?
                .get(player);
            let map = comp.history_map(game)[time - 1].clone();
            let size = comp.space(time).len();
            let kind = if time == t {
                ReaderKind::CompNow(player, map)
            } else {
                ReaderKind::CompNext(player, map)
            };
            Ok(VarReader { size, kind })
        }
        Var::Compressed { time, .. } => Err(CondError::Shape(format!(
            "compressed state at time {time} is not visible from stage {t}"
        ))),
        Var::Action { player } => {
            check_player(player)?;
            Ok(VarReader {
                size: game.action_space(t, player).len(),
                kind: ReaderKind::Action(player),
            })
        }
        Var::Increment { player } => {
            check_player(player)?;
            Ok(VarReader {
                size: game.increment_space(t, player).len(),
                kind: ReaderKind::Increment(player),
            })
        }
        Var::Reward { player } => {
            check_player(player)?;
            let dom = reward_domain(game, t, player);
            reward_domains.push(dom.clone());
            Ok(VarReader { size: dom.len(), kind: ReaderKind::Reward(player, dom) })
        }
    }
}

/// Exact conditional table of `targets` given `givens` at stage `t` under
/// `profile`. Compression variables require `comps`.
pub fn conditional_table(
    game: &GameSpec,
    profile: &StrategyProfile,
    comps: Option<&CompressionProfile>,
    t: usize,
    targets: &[Var],
    givens: &[Var],
) -> Result<ConditionalTable, CondError> {
    if t == 0 || t > game.horizon() {
        return Err(CondError::Shape(format!("stage {t} outside 1..={}", game.horizon())));
    }
    if targets.is_empty() {
        return Err(CondError::Shape("need at least one target variable".into()));
    }
    let mut reward_domains = Vec::new();
    let target_readers: Vec<VarReader> = targets
        .iter()
        .map(|v| build_reader(game, comps, t, v, &mut reward_domains))
        .collect::<Result<_, _>>()?;
    let given_readers: Vec<VarReader> = givens
        .iter()
        .map(|v| build_reader(game, comps, t, v, &mut reward_domains))
        .collect::<Result<_, _>>()?;

    let target_sizes: Vec<usize> = target_readers.iter().map(|r| r.size).collect();
    let given_sizes: Vec<usize> = given_readers.iter().map(|r| r.size).collect();
    let target_codec = TupleCodec::new(target_sizes.clone());
    let given_codec = TupleCodec::new(given_sizes.clone());
    if target_codec.len().saturating_mul(given_codec.len()) > game.support_cap() {
        return Err(CondError::Forward(ForwardError::SupportTooLarge {
            time: t,
            size: target_codec.len().saturating_mul(given_codec.len()),
            cap: game.support_cap(),
        }));
    }

    let dist = forward_distribution(game, profile)?;
    let atoms = stage_law(game, profile, dist.at(t))?;

    let act = game.joint_action_codec(t);
    let inc = game.joint_increment_codec(t);
    let read = |kind: &ReaderKind, a: &super::forward::StageAtom| -> usize {
        match kind {
            ReaderKind::StateNow => a.state,
            ReaderKind::StateNext => a.next_state,
            ReaderKind::HistNow(i) => a.hists[*i],
            ReaderKind::HistNext(i) => {
                history_extend(game, *i, t, a.hists[*i], inc.component(a.joint_increment, *i))
            }
            ReaderKind::CompNow(i, map) => map[a.hists[*i]],
            ReaderKind::CompNext(i, map) => {
                map[history_extend(game, *i, t, a.hists[*i], inc.component(a.joint_increment, *i))]
            }
            ReaderKind::Action(i) => act.component(a.joint_action, *i),
            ReaderKind::Increment(i) => inc.component(a.joint_increment, *i),
            ReaderKind::Reward(i, dom) => {
                let r = a.rewards[*i];
                dom.iter()
                    .position(|&v| (v - r).abs() <= TOL_MODEL)
                    .expect("reward value must be in its enumerated domain")
            }
        }
    };

    let mut joint = vec![vec![0.0f64; target_codec.len()]; given_codec.len()];
    let mut mass = vec![0.0f64; given_codec.len()];
    for a in &atoms {
        let gi: Vec<usize> = given_readers.iter().map(|r| read(&r.kind, a)).collect();
        let ti: Vec<usize> = target_readers.iter().map(|r| read(&r.kind, a)).collect();
        let g = given_codec.encode(&gi);
        joint[g][target_codec.encode(&ti)] += a.prob;
        mass[g] += a.prob;
    }

    let rows = (0..given_codec.len())
        .map(|g| {
            if mass[g] > 0.0 {
                CondRow {
                    given: given_codec.decode(g),
                    status: RowStatus::Admissible { mass: mass[g] },
                    probs: joint[g].iter().map(|&p| p / mass[g]).collect(),
                }
            } else {
                CondRow { given: given_codec.decode(g), status: RowStatus::Inadmissible, probs: Vec::new() }
            }
        })
        .collect();

    Ok(ConditionalTable {
        stage: t,
        targets: targets.to_vec(),
        givens: givens.to_vec(),
        target_sizes,
        given_sizes,
        reward_domains,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::num::compensated_sum;

    #[test]
    fn admissible_rows_are_distributions() {
        let fx = fixtures::build_example(&fixtures::FixtureRequest::Example1).unwrap();
        let profile = StrategyProfile::uniform(&fx.game);
        let table = conditional_table(
            &fx.game,
            &profile,
            Some(&fx.compressions),
            1,
            &[Var::State { time: 2 }, Var::Increment { player: 0 }],
            &[Var::History { player: 0, time: 1 }, Var::Action { player: 0 }],
        )
        .unwrap();
        let mut seen_admissible = false;
        for row in &table.rows {
            match row.status {
                RowStatus::Admissible { mass } => {
                    seen_admissible = true;
                    assert!(mass > 0.0);
                    let sum = compensated_sum(row.probs.iter().copied());
                    assert!((sum - 1.0).abs() < 1e-9);
                }
                RowStatus::Inadmissible => assert!(row.probs.is_empty()),
            }
        }
        assert!(seen_admissible);
    }

    #[test]
    fn reward_variables_get_enumerated_domains() {
        let fx = fixtures::build_example(&fixtures::FixtureRequest::Example1).unwrap();
        let profile = StrategyProfile::uniform(&fx.game);
        let table = conditional_table(
            &fx.game,
            &profile,
            None,
            2,
            &[Var::Reward { player: 0 }],
            &[Var::State { time: 2 }],
        )
        .unwrap();
        assert_eq!(table.reward_domains.len(), 1);
        assert!(!table.reward_domains[0].is_empty());
        assert!(table.reward_domains[0].windows(2).all(|w| w[0] < w[1]));
    }
}
