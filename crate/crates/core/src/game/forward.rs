//! Exact forward pass: joint laws over states and private histories.

use super::history::history_extend;
use super::strategy::StrategyProfile;
use super::GameSpec;
use crate::num::compensated_sum;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Error, Serialize, Deserialize)]
pub enum ForwardError {
    #[error("support at time {time} exceeds the cap ({size} > {cap})")]
    SupportTooLarge { time: usize, size: usize, cap: usize },
}

/// One atom of the joint law at a fixed time: state, one private history per
/// player, probability.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointEntry {
    pub state: usize,
    pub hists: Vec<usize>,
    pub prob: f64,
}

/// The joint law at one time, atoms sorted by `(state, hists)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistTable {
    pub time: usize,
    pub entries: Vec<JointEntry>,
}

impl DistTable {
    pub fn total_mass(&self) -> f64 {
        compensated_sum(self.entries.iter().map(|e| e.prob))
    }
}

/// Joint laws for all times `1..=T+1` under one strategy profile.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    pub tables: Vec<DistTable>,
}

impl JointDistribution {
    /// Table at `time` in `1..=T+1`.
    pub fn at(&self, time: usize) -> &DistTable {
        &self.tables[time - 1]
    }
}

/// One atom of the stage-`t` transition law: everything that happens in one
/// stage, with its joint probability.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageAtom {
    pub t: usize,
    pub state: usize,
    pub hists: Vec<usize>,
    pub joint_action: usize,
    pub next_state: usize,
    pub joint_increment: usize,
    pub rewards: Vec<f64>,
    pub prob: f64,
}

/// Expected rewards under a profile: totals and per-stage terms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Payoffs {
    pub total: Vec<f64>,
    /// `per_stage[t-1][i]` is player `i`'s expected stage-`t` reward.
    pub per_stage: Vec<Vec<f64>>,
}

fn initial_table(game: &GameSpec) -> DistTable {
    let mut acc: BTreeMap<(usize, Vec<usize>), f64> = BTreeMap::new();
    for e in game.initial_law() {
        if e.prob > 0.0 {
            *acc.entry((e.state, e.infos.clone())).or_insert(0.0) += e.prob;
        }
    }
    DistTable {
        time: 1,
        entries: acc
            .into_iter()
            .map(|((state, hists), prob)| JointEntry { state, hists, prob })
            .collect(),
    }
}

/// Expand one timestep: the joint law over `(x_t, h_t, u_t, x_{t+1}, z_t)`
/// implied by `table` (which must sit at some stage `t <= T`) and `profile`.
pub fn stage_law(
    game: &GameSpec,
    profile: &StrategyProfile,
    table: &DistTable,
) -> Result<Vec<StageAtom>, ForwardError> {
    let t = table.time;
    debug_assert!(t <= game.horizon());
    let n = game.num_players();
    let act = game.joint_action_codec(t);
    let inc = game.joint_increment_codec(t);
    let mut atoms = Vec::new();
    for entry in &table.entries {
        for ju in 0..act.len() {
            let mut g = entry.prob;
            for i in 0..n {
                g *= profile.get(i).prob(t, entry.hists[i], act.component(ju, i));
                if g == 0.0 {
                    break;
                }
            }
            if g == 0.0 {
                continue;
            }
            for out in game.kernel_entries(t, entry.state, ju) {
                let p = g * out.prob;
                if p == 0.0 {
                    continue;
                }
                atoms.push(StageAtom {
                    t,
                    state: entry.state,
                    hists: entry.hists.clone(),
                    joint_action: ju,
                    next_state: out.next_state,
                    joint_increment: inc.encode(&out.increments),
                    rewards: out.rewards.clone(),
                    prob: p,
                });
                if atoms.len() > game.support_cap() {
                    return Err(ForwardError::SupportTooLarge {
                        time: t,
                        size: atoms.len(),
                        cap: game.support_cap(),
                    });
                }
            }
        }
    }
    Ok(atoms)
}

/// Aggregate stage atoms into the next time's table and the per-player
/// expected stage rewards.
fn advance(
    game: &GameSpec,
    atoms: &[StageAtom],
    t: usize,
) -> Result<(DistTable, Vec<f64>), ForwardError> {
    let n = game.num_players();
    let inc = game.joint_increment_codec(t);
    let mut acc: BTreeMap<(usize, Vec<usize>), f64> = BTreeMap::new();
    let mut reward_terms: Vec<Vec<f64>> = vec![Vec::new(); n];
    for a in atoms {
        let hists: Vec<usize> = (0..n)
            .map(|i| history_extend(game, i, t, a.hists[i], inc.component(a.joint_increment, i)))
            .collect();
        *acc.entry((a.next_state, hists)).or_insert(0.0) += a.prob;
        if acc.len() > game.support_cap() {
            return Err(ForwardError::SupportTooLarge {
                time: t + 1,
                size: acc.len(),
                cap: game.support_cap(),
            });
        }
        for i in 0..n {
            reward_terms[i].push(a.prob * a.rewards[i]);
        }
    }
    let table = DistTable {
        time: t + 1,
        entries: acc
            .into_iter()
            .filter(|&(_, p)| p > 0.0)
            .map(|((state, hists), prob)| JointEntry { state, hists, prob })
            .collect(),
    };
    let rewards = reward_terms.into_iter().map(|ts| compensated_sum(ts.into_iter())).collect();
    Ok((table, rewards))
}

/// Exact joint laws at all times `1..=T+1` under `profile`.
pub fn forward_distribution(
    game: &GameSpec,
    profile: &StrategyProfile,
) -> Result<JointDistribution, ForwardError> {
    let mut tables = vec![initial_table(game)];
    for t in 1..=game.horizon() {
        let atoms = stage_law(game, profile, &tables[t - 1])?;
        let (next, _) = advance(game, &atoms, t)?;
        tables.push(next);
    }
    Ok(JointDistribution { tables })
}

/// Exact expected rewards under `profile`, total and per stage.
pub fn compute_payoffs(game: &GameSpec, profile: &StrategyProfile) -> Result<Payoffs, ForwardError> {
    let n = game.num_players();
    let mut table = initial_table(game);
    let mut per_stage = Vec::with_capacity(game.horizon());
    for t in 1..=game.horizon() {
        let atoms = stage_law(game, profile, &table)?;
        let (next, rewards) = advance(game, &atoms, t)?;
        per_stage.push(rewards);
        table = next;
    }
    let total = (0..n)
        .map(|i| compensated_sum(per_stage.iter().map(|r| r[i])))
        .collect();
    Ok(Payoffs { total, per_stage })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::num::TOL_MODEL;

    #[test]
    fn tables_stay_normalized() {
        let fx = fixtures::build_example(&fixtures::FixtureRequest::Example1).unwrap();
        let profile = StrategyProfile::uniform(&fx.game);
        let dist = forward_distribution(&fx.game, &profile).unwrap();
        assert_eq!(dist.tables.len(), fx.game.horizon() + 1);
        for table in &dist.tables {
            assert!((table.total_mass() - 1.0).abs() < TOL_MODEL);
            assert!(table.entries.windows(2).all(|w| {
                (w[0].state, &w[0].hists) < (w[1].state, &w[1].hists)
            }));
        }
    }

    #[test]
    fn payoffs_are_bounded_by_horizon() {
        let fx = fixtures::build_example(&fixtures::FixtureRequest::Example1).unwrap();
        let profile = StrategyProfile::uniform(&fx.game);
        let p = compute_payoffs(&fx.game, &profile).unwrap();
        for &v in &p.total {
            assert!(v.abs() <= fx.game.horizon() as f64 + TOL_MODEL);
        }
    }
}
