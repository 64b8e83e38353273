//! Assessments: a strategy profile paired with a belief system.
//!
//! Each player carries, at every own history, a distribution over the
//! current state and the other players' histories. The checker enforces two
//! things. Beliefs must agree with Bayes' rule at histories the profile
//! reaches (off-path beliefs are unconstrained beyond being distributions).
//! And play must be sequentially rational: from every history, given its
//! belief, no own continuation strategy beats following the profile, where
//! continuation values propagate the current belief forward through the
//! kernels and the others' strategies rather than consulting the belief
//! system again downstream.

use crate::game::{
    compute_payoffs, conditional_table, CondError, GameSpec, RowStatus, StrategyProfile, Var,
};
use crate::num::{compensated_sum, TOL_WITNESS};
use serde::{Deserialize, Serialize};

/// Belief index codec: state first, then the other players' histories in
/// player order, later components fastest.
pub fn belief_dims(game: &GameSpec, player: usize, t: usize) -> Vec<usize> {
    let mut dims = vec![game.state_space(t).len()];
    for j in 0..game.num_players() {
        if j != player {
            dims.push(game.history_count(j, t));
        }
    }
    dims
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assessment {
    pub profile: StrategyProfile,
    /// `beliefs[i][t-1][h]`: distribution over (state, others' histories)
    /// in the [`belief_dims`] encoding.
    pub beliefs: Vec<Vec<Vec<Vec<f64>>>>,
}

impl Assessment {
    /// Shape and stochasticity of the belief system.
    pub fn validate(&self, game: &GameSpec) -> Result<(), CondError> {
        let n = game.num_players();
        if self.beliefs.len() != n {
            return Err(CondError::Shape(format!(
                "assessment declares beliefs for {} players, game has {n}",
                self.beliefs.len()
            )));
        }
        for i in 0..n {
            self.profile
                .get(i)
                .validate(game)
                .map_err(|e| CondError::Shape(e.to_string()))?;
            if self.beliefs[i].len() != game.horizon() {
                return Err(CondError::Shape(format!(
                    "player {i} beliefs cover {} stages, horizon is {}",
                    self.beliefs[i].len(),
                    game.horizon()
                )));
            }
            for t in 1..=game.horizon() {
                let rows = &self.beliefs[i][t - 1];
                let hn = game.history_count(i, t);
                if rows.len() != hn {
                    return Err(CondError::Shape(format!(
                        "player {i} declares {} belief rows at stage {t}, need {hn}",
                        rows.len()
                    )));
                }
                let dim: usize = belief_dims(game, i, t).iter().product();
                for (h, row) in rows.iter().enumerate() {
                    if row.len() != dim {
                        return Err(CondError::Shape(format!(
                            "player {i} belief at stage {t}, history {h} has length {}, need {dim}",
                            row.len()
                        )));
                    }
                    if row.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
                        return Err(CondError::Shape(format!(
                            "player {i} belief at stage {t}, history {h} has invalid entries"
                        )));
                    }
                    let sum: f64 = row.iter().sum();
                    if (sum - 1.0).abs() > TOL_WITNESS {
                        return Err(CondError::Shape(format!(
                            "player {i} belief at stage {t}, history {h} sums to {sum}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WpbeViolation {
    pub player: usize,
    pub t: usize,
    pub history: usize,
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WpbeReport {
    /// Bayes' rule along the path of play.
    pub consistent: bool,
    pub consistency_gap: f64,
    pub consistency_witness: Option<WpbeViolation>,
    /// No history admits a profitable own continuation under its belief.
    pub rational: bool,
    pub rationality_gap: f64,
    pub rationality_witness: Option<WpbeViolation>,
    pub accepted: bool,
    pub payoffs: Vec<f64>,
    pub tol: f64,
}

/// Expected values of one subtree under a fixed starting belief: following
/// the profile, and under the best own continuation.
fn subtree_values(
    game: &GameSpec,
    profile: &StrategyProfile,
    player: usize,
    t: usize,
    history: usize,
    belief: &[f64],
) -> (f64, f64) {
    if t > game.horizon() {
        return (0.0, 0.0);
    }
    let others: Vec<usize> =
        (0..game.num_players()).filter(|&j| j != player).collect();
    let dims = belief_dims(game, player, t);
    let xs = dims[0];
    let env_n: usize = dims.iter().skip(1).product();
    let un = game.action_space(t, player).len();
    let zn = game.increment_space(t, player).len();
    let next_dims = if t < game.horizon() {
        belief_dims(game, player, t + 1)
    } else {
        vec![1]
    };
    let next_env: usize = next_dims.iter().skip(1).product();
    let next_xs = next_dims[0];
    let jcodec = game.joint_action_codec(t);

    let mut q_played = vec![0.0f64; un];
    let mut q_best = vec![0.0f64; un];
    for u in 0..un {
        let mut reward = 0.0f64;
        let mut next_raw = vec![vec![0.0f64; next_xs * next_env]; zn];
        for x in 0..xs {
            for env in 0..env_n {
                let w0 = belief[x * env_n + env];
                if w0 == 0.0 {
                    continue;
                }
                // Decode the other players' histories from the env index.
                let mut rem = env;
                let mut hs = vec![0usize; game.num_players()];
                for pos in (1..dims.len()).rev() {
                    hs[others[pos - 1]] = rem % dims[pos];
                    rem /= dims[pos];
                }
                hs[player] = history;
                // Others draw actions from the profile at their believed
                // histories; our action is forced to `u`.
                for ju in 0..jcodec.len() {
                    let us = jcodec.decode(ju);
                    if us[player] != u {
                        continue;
                    }
                    let mut w = w0;
                    for &j in &others {
                        w *= profile.get(j).prob(t, hs[j], us[j]);
                        if w == 0.0 {
                            break;
                        }
                    }
                    if w == 0.0 {
                        continue;
                    }
                    for entry in game.kernel_entries(t, x, ju) {
                        let we = w * entry.prob;
                        if we == 0.0 {
                            continue;
                        }
                        reward += we * entry.rewards[player];
                        if t < game.horizon() {
                            let z = entry.increments[player];
                            let mut env2 = 0usize;
                            for (pos, &j) in others.iter().enumerate() {
                                let zj = entry.increments[j];
                                let hj =
                                    hs[j] * game.increment_space(t, j).len() + zj;
                                env2 = env2 * next_dims[pos + 1] + hj;
                            }
                            next_raw[z][entry.next_state * next_env + env2] += we;
                        }
                    }
                }
            }
        }
        let mut cont_played = 0.0f64;
        let mut cont_best = 0.0f64;
        if t < game.horizon() {
            for (z, raw) in next_raw.iter().enumerate() {
                let mass: f64 = raw.iter().sum();
                if mass <= 0.0 {
                    continue;
                }
                let mu: Vec<f64> = raw.iter().map(|&v| v / mass).collect();
                let (vp, vb) = subtree_values(
                    game,
                    profile,
                    player,
                    t + 1,
                    history * zn + z,
                    &mu,
                );
                cont_played += mass * vp;
                cont_best += mass * vb;
            }
        }
        q_played[u] = reward + cont_played;
        q_best[u] = reward + cont_best;
    }
    let own = profile.get(player);
    let v_played = compensated_sum(
        own.row(t, history).iter().zip(&q_played).map(|(&p, &q)| p * q),
    );
    let v_best = q_best.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (v_played, v_best)
}

/// Check an assessment: Bayes' rule on the path of play, and sequential
/// rationality at every history under the declared beliefs.
pub fn check_wpbe(game: &GameSpec, assessment: &Assessment) -> Result<WpbeReport, CondError> {
    assessment.validate(game)?;
    let profile = &assessment.profile;
    let tol = TOL_WITNESS;

    let mut consistency_gap = 0.0f64;
    let mut consistency_witness = None;
    for i in 0..game.num_players() {
        for t in 1..=game.horizon() {
            let mut targets = vec![Var::State { time: t }];
            for j in 0..game.num_players() {
                if j != i {
                    targets.push(Var::History { player: j, time: t });
                }
            }
            let table = conditional_table(
                game,
                profile,
                None,
                t,
                &targets,
                &[Var::History { player: i, time: t }],
            )?;
            for row in &table.rows {
                if matches!(row.status, RowStatus::Inadmissible) {
                    continue;
                }
                let h = row.given[0];
                let declared = &assessment.beliefs[i][t - 1][h];
                let gap = row
                    .probs
                    .iter()
                    .zip(declared)
                    .map(|(&a, &b)| (a - b).abs())
                    .fold(0.0f64, f64::max);
                if gap > consistency_gap {
                    consistency_gap = gap;
                    consistency_witness =
                        Some(WpbeViolation { player: i, t, history: h, gap });
                }
            }
        }
    }
    let consistent = consistency_gap <= tol;

    let mut rationality_gap = 0.0f64;
    let mut rationality_witness = None;
    for i in 0..game.num_players() {
        for t in 1..=game.horizon() {
            for h in 0..game.history_count(i, t) {
                let belief = &assessment.beliefs[i][t - 1][h];
                let (v_played, v_best) =
                    subtree_values(game, profile, i, t, h, belief);
                let gap = v_best - v_played;
                if gap > rationality_gap {
                    rationality_gap = gap;
                    rationality_witness =
                        Some(WpbeViolation { player: i, t, history: h, gap });
                }
            }
        }
    }
    let rational = rationality_gap <= tol;

    let payoffs = compute_payoffs(game, profile)?.total;
    Ok(WpbeReport {
        consistent,
        consistency_gap,
        consistency_witness: if consistent { None } else { consistency_witness },
        rational,
        rationality_gap,
        rationality_witness: if rational { None } else { rationality_witness },
        accepted: consistent && rational,
        payoffs,
        tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{build_example, FixtureRequest};

    /// In the leader/follower game, alice playing 1 with bob rewarding it is
    /// sequentially rational under the (trivial) correct beliefs.
    #[test]
    fn correct_assessment_is_accepted() {
        let fx = build_example(&FixtureRequest::Example1).unwrap();
        let game = &fx.game;
        let mut profile = StrategyProfile::uniform(game);
        profile.strategies[0].tables[0][0] = vec![0.0, 1.0];
        profile.strategies[1].tables[1] = vec![vec![0.0, 1.0], vec![0.0, 1.0]];
        // Stage-1 beliefs are trivial; stage-2 beliefs are point masses on
        // the partner's actual history.
        let beliefs = correct_beliefs(game, &profile);
        let report = check_wpbe(game, &Assessment { profile, beliefs }).unwrap();
        assert!(report.accepted, "{report:?}");
        assert_eq!(report.payoffs, vec![2.0, -1.0]);
    }

    #[test]
    fn wrong_on_path_belief_is_rejected() {
        let fx = build_example(&FixtureRequest::Example1).unwrap();
        let game = &fx.game;
        let mut profile = StrategyProfile::uniform(game);
        profile.strategies[0].tables[0][0] = vec![0.0, 1.0];
        profile.strategies[1].tables[1] = vec![vec![0.0, 1.0], vec![0.0, 1.0]];
        let mut beliefs = correct_beliefs(game, &profile);
        // Bob's belief after seeing alice play 1 pretends she played 0.
        beliefs[1][1][1] = vec![1.0, 0.0];
        let report = check_wpbe(game, &Assessment { profile, beliefs }).unwrap();
        assert!(!report.consistent);
        assert!(!report.accepted);
        let w = report.consistency_witness.unwrap();
        assert_eq!((w.player, w.t, w.history), (1, 2, 1));
    }

    #[test]
    fn irrational_play_is_rejected_even_with_bayes_beliefs() {
        let fx = build_example(&FixtureRequest::Example1).unwrap();
        let game = &fx.game;
        // Alice plays 0 although bob rewards 1 regardless of history.
        let mut profile = StrategyProfile::uniform(game);
        profile.strategies[0].tables[0][0] = vec![1.0, 0.0];
        profile.strategies[1].tables[1] = vec![vec![0.0, 1.0], vec![0.0, 1.0]];
        let beliefs = correct_beliefs(game, &profile);
        let report = check_wpbe(game, &Assessment { profile, beliefs }).unwrap();
        assert!(report.consistent);
        assert!(!report.rational);
        let w = report.rationality_witness.unwrap();
        assert_eq!((w.player, w.t), (0, 1));
        assert!((w.gap - 1.0).abs() <= 1e-9);
    }

    /// Bayes beliefs where defined, uniform elsewhere.
    fn correct_beliefs(
        game: &GameSpec,
        profile: &StrategyProfile,
    ) -> Vec<Vec<Vec<Vec<f64>>>> {
        let mut out = Vec::new();
        for i in 0..game.num_players() {
            let mut per_stage = Vec::new();
            for t in 1..=game.horizon() {
                let dim: usize = belief_dims(game, i, t).iter().product();
                let mut rows =
                    vec![vec![1.0 / dim as f64; dim]; game.history_count(i, t)];
                let mut targets = vec![Var::State { time: t }];
                for j in 0..game.num_players() {
                    if j != i {
                        targets.push(Var::History { player: j, time: t });
                    }
                }
                let table = conditional_table(
                    game,
                    profile,
                    None,
                    t,
                    &targets,
                    &[Var::History { player: i, time: t }],
                )
                .unwrap();
                for row in &table.rows {
                    if !matches!(row.status, RowStatus::Inadmissible) {
                        rows[row.given[0]] = row.probs.clone();
                    }
                }
                per_stage.push(rows);
            }
            out.push(per_stage);
        }
        out
    }
}
