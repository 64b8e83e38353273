//! Equilibrium tooling on full histories and on summaries.
//!
//! The base primitive is [`history_mdp`]: against fixed opponents, one
//! player's decision problem is an exact finite MDP whose states are the
//! player's own histories. Best responses, equilibrium verification, and the
//! sequential-rationality checks all reduce to it. On top of that sit the
//! floor-constrained best-response programs over summaries ([`br_eps`]), the
//! fixed-point solver ([`solve`]), canonical-tremble sequential-equilibrium
//! verification ([`se`]), strategy transfer through unilateral sufficiency
//! ([`transfer`]), exhaustive equilibrium enumeration for small two-player
//! games ([`enumerate`]), belief-system assessments ([`wpbe`]), and
//! belief-based representability ([`belief_based`]).

pub mod belief_based;
pub mod br_eps;
pub mod enumerate;
mod linalg;
pub mod se;
pub mod solve;
pub mod transfer;
pub mod wpbe;

use crate::game::{
    compute_payoffs, conditional_table, BehavioralStrategy, CompressionProfile, CondError,
    GameSpec, KStrategy, RowStatus, StrategyProfile, Var,
};
use crate::mdp::{backward_induction, MdpSpec};
use crate::num::compensated_sum;
use serde::{Deserialize, Serialize};

/// One player's exact decision problem against fixed opponents: an MDP over
/// the player's own histories. Histories that are unreachable under every
/// own strategy are marked phantom; their rows spread uniformly over the
/// own-tree extensions and pay zero, keeping the tables total without
/// affecting reachable values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistoryMdp {
    pub player: usize,
    pub mdp: MdpSpec,
    /// `phantom[t-1][h]` for `t = 1..=horizon`.
    pub phantom: Vec<Vec<bool>>,
}

/// Build the history MDP of `player` against the other players' strategies
/// in `opponents` (the player's own slot is ignored).
pub fn history_mdp(
    game: &GameSpec,
    player: usize,
    opponents: &StrategyProfile,
) -> Result<HistoryMdp, CondError> {
    if player >= game.num_players() {
        return Err(CondError::Shape(format!("no player {player}")));
    }
    let reference = opponents.with(player, BehavioralStrategy::uniform(game, player));
    let horizon = game.horizon();

    let mut transitions = Vec::with_capacity(horizon);
    let mut rewards = Vec::with_capacity(horizon);
    let mut phantom = Vec::with_capacity(horizon);
    for t in 1..=horizon {
        let hn = game.history_count(player, t);
        let hn_next = game.history_count(player, t + 1);
        let un = game.action_space(t, player).len();
        let zn = game.increment_space(t, player).len();
        let table = conditional_table(
            game,
            &reference,
            None,
            t,
            &[Var::Increment { player }, Var::Reward { player }],
            &[Var::History { player, time: t }, Var::Action { player }],
        )?;
        let dom = &table.reward_domains[0];
        let rn = dom.len();
        let mut trans_t = vec![vec![vec![0.0f64; hn_next]; un]; hn];
        let mut rew_t = vec![vec![0.0f64; un]; hn];
        let mut seen = vec![false; hn];
        for row in &table.rows {
            let (h, u) = (row.given[0], row.given[1]);
            match row.status {
                RowStatus::Inadmissible => continue,
                RowStatus::Admissible { .. } => {}
            }
            seen[h] = true;
            for z in 0..zn {
                let mut pz = 0.0;
                let mut er = 0.0;
                for r in 0..rn {
                    let p = row.probs[z * rn + r];
                    pz += p;
                    er += p * dom[r];
                }
                trans_t[h][u][h * zn + z] += pz;
                rew_t[h][u] += er;
            }
        }
        for h in 0..hn {
            if !seen[h] {
                for u in 0..un {
                    for z in 0..zn {
                        trans_t[h][u][h * zn + z] = 1.0 / zn as f64;
                    }
                }
            }
        }
        phantom.push(seen.iter().map(|&s| !s).collect());
        transitions.push(trans_t);
        rewards.push(rew_t);
    }

    let mut initial = vec![0.0f64; game.history_count(player, 1)];
    for e in game.initial_law() {
        initial[e.infos[player]] += e.prob;
    }

    let mdp = MdpSpec {
        horizon,
        state_counts: (1..=horizon + 1).map(|t| game.history_count(player, t)).collect(),
        action_counts: (1..=horizon).map(|t| game.action_space(t, player).len()).collect(),
        initial,
        transitions,
        rewards,
    };
    Ok(HistoryMdp { player, mdp, phantom })
}

/// Action values of `player` when everyone (the player included) follows
/// `profile`: `q[t-1][h][u]` is the expected remaining total reward after
/// taking `u` at `(t, h)` and reverting to the profile afterwards.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistoryQ {
    pub player: usize,
    pub q: Vec<Vec<Vec<f64>>>,
    /// `values[time-1][h]` for times `1..=horizon+1`.
    pub values: Vec<Vec<f64>>,
    pub phantom: Vec<Vec<bool>>,
}

pub fn history_policy_q(
    game: &GameSpec,
    player: usize,
    profile: &StrategyProfile,
) -> Result<HistoryQ, CondError> {
    let hm = history_mdp(game, player, profile)?;
    let own = profile.get(player);
    let horizon = game.horizon();
    let mut values = vec![Vec::new(); horizon + 1];
    values[horizon] = vec![0.0; hm.mdp.state_counts[horizon]];
    let mut q = vec![Vec::new(); horizon];
    for t in (1..=horizon).rev() {
        let hn = hm.mdp.state_counts[t - 1];
        let un = hm.mdp.action_counts[t - 1];
        let mut qt = vec![vec![0.0f64; un]; hn];
        let mut vt = vec![0.0f64; hn];
        for h in 0..hn {
            for u in 0..un {
                let cont = compensated_sum(
                    hm.mdp.transitions[t - 1][h][u]
                        .iter()
                        .zip(&values[t])
                        .map(|(&p, &v)| p * v),
                );
                qt[h][u] = hm.mdp.rewards[t - 1][h][u] + cont;
            }
            vt[h] =
                compensated_sum(own.row(t, h).iter().zip(&qt[h]).map(|(&p, &qv)| p * qv));
        }
        values[t - 1] = vt;
        q[t - 1] = qt;
    }
    Ok(HistoryQ { player, q, values, phantom: hm.phantom })
}

/// Optimal expected total reward of `player` against the others, over all
/// full-history behavioral strategies.
pub fn best_response_value(
    game: &GameSpec,
    player: usize,
    opponents: &StrategyProfile,
) -> Result<f64, CondError> {
    let hm = history_mdp(game, player, opponents)?;
    let sol = backward_induction(&hm.mdp);
    Ok(sol.initial_value(&hm.mdp))
}

/// Equilibrium verification result: realized payoffs, per-player best
/// responses over all full-history strategies, and the deviation gaps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub payoffs: Vec<f64>,
    pub best_responses: Vec<f64>,
    /// `gaps[i] = best_responses[i] - payoffs[i]` (nonnegative up to noise).
    pub gaps: Vec<f64>,
    pub max_gap: f64,
    pub tol: f64,
    pub is_equilibrium: bool,
}

/// Check that no player can gain more than `tol` by deviating to any
/// full-history behavioral strategy.
pub fn verify_bne(
    game: &GameSpec,
    profile: &StrategyProfile,
    tol: f64,
) -> Result<EquilibriumReport, CondError> {
    let payoffs = compute_payoffs(game, profile)?.total;
    let mut best_responses = Vec::with_capacity(game.num_players());
    for i in 0..game.num_players() {
        best_responses.push(best_response_value(game, i, profile)?);
    }
    let gaps: Vec<f64> =
        best_responses.iter().zip(&payoffs).map(|(&b, &j)| b - j).collect();
    let max_gap = gaps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(EquilibriumReport { payoffs, best_responses, gaps, max_gap, tol, is_equilibrium: max_gap <= tol })
}

/// Expand a summary-based profile onto full histories.
pub fn expand_k_profile(
    game: &GameSpec,
    comps: &CompressionProfile,
    strategies: &[KStrategy],
) -> StrategyProfile {
    let mut profile = StrategyProfile::uniform(game);
    for s in strategies {
        profile = profile.with(s.player, s.expand(game, comps.get(s.player)));
    }
    profile
}

/// [`verify_bne`] for a summary-based profile. Deviations still range over
/// all full-history strategies.
pub fn verify_k_bne(
    game: &GameSpec,
    comps: &CompressionProfile,
    strategies: &[KStrategy],
    tol: f64,
) -> Result<EquilibriumReport, CondError> {
    verify_bne(game, &expand_k_profile(game, comps, strategies), tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{build_example, random_small_game, FixtureRequest};
    use crate::game::validate_game;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn best_response_dominates_uniform_play() {
        let mut rng = ChaCha20Rng::seed_from_u64(17);
        for _ in 0..15 {
            let game = validate_game(random_small_game(&mut rng)).unwrap();
            let profile = StrategyProfile::uniform(&game);
            let payoffs = compute_payoffs(&game, &profile).unwrap().total;
            for i in 0..game.num_players() {
                let br = best_response_value(&game, i, &profile).unwrap();
                assert!(br >= payoffs[i] - 1e-9, "br {br} below payoff {}", payoffs[i]);
            }
        }
    }

    #[test]
    fn known_equilibrium_verifies_and_defection_breaks() {
        // In the leader/follower game, alice playing 1 and bob rewarding it
        // is an equilibrium; alice playing 0 against the same bob is not.
        let fx = build_example(&FixtureRequest::Example1).unwrap();
        let game = &fx.game;
        let mut alice = BehavioralStrategy::uniform(game, 0);
        alice.tables[0][0] = vec![0.0, 1.0];
        let mut bob = BehavioralStrategy::uniform(game, 1);
        bob.tables[1] = vec![vec![0.0, 1.0], vec![0.0, 1.0]];
        let profile = StrategyProfile::uniform(game).with(0, alice).with(1, bob);
        let report = verify_bne(game, &profile, 1e-9).unwrap();
        assert!(report.is_equilibrium);
        assert_eq!(report.payoffs, vec![2.0, -1.0]);

        let mut lazy = BehavioralStrategy::uniform(game, 0);
        lazy.tables[0][0] = vec![1.0, 0.0];
        let bad = profile.with(0, lazy);
        let report = verify_bne(game, &bad, 1e-9).unwrap();
        assert!(!report.is_equilibrium);
        assert!((report.gaps[0] - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn policy_q_matches_payoff_at_the_root() {
        let mut rng = ChaCha20Rng::seed_from_u64(23);
        for _ in 0..10 {
            let game = validate_game(random_small_game(&mut rng)).unwrap();
            let profile = StrategyProfile::uniform(&game);
            let payoffs = compute_payoffs(&game, &profile).unwrap().total;
            for i in 0..game.num_players() {
                let hq = history_policy_q(&game, i, &profile).unwrap();
                let mut total = 0.0;
                for e in game.initial_law() {
                    total += e.prob * hq.values[0][e.infos[i]];
                }
                // Initial entries can repeat an info value; values coincide.
                assert!((total - payoffs[i]).abs() <= 1e-9);
            }
        }
    }
}
