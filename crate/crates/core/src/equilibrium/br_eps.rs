//! Best response over summaries with a floor constraint.
//!
//! Against fixed summary-based opponents, a player's summary is first
//! re-certified as an information state; the certified transition and reward
//! tables then drive an exact backward recursion. Maximization runs over the
//! floored simplex (every action gets probability at least `eps`), whose
//! optimum is attained at a vertex: floor mass everywhere plus the bulk on
//! one maximizing action.

use super::expand_k_profile;
use crate::game::{CompressionProfile, CondError, GameSpec, KStrategy};
use crate::info_state::{check_information_state, InfoStateWitness};
use crate::num::{argmax_set, compensated_sum, TOL_WITNESS};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BrError {
    #[error(transparent)]
    Cond(#[from] CondError),
    #[error("floor {eps} is infeasible for {actions} actions")]
    FloorInfeasible { eps: f64, actions: usize },
    #[error(
        "summary is not an information state against these opponents \
         (player {}, stage {}, drift {:.3e})",
        .0.player, .0.t, .0.deviation
    )]
    NotInformationState(Box<InfoStateWitness>),
}

/// Decreasing floor schedule used by the solver and the tremble verifier.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsSchedule {
    pub points: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("bad floor schedule: {0}")]
pub struct BadSchedule(pub String);

impl EpsSchedule {
    /// Thirteen points `0.1 * 2^-n`, n = 0..=12.
    pub fn standard() -> Self {
        EpsSchedule { points: (0..=12).map(|n| 0.1 * 0.5f64.powi(n)).collect() }
    }

    pub fn geometric(first: f64, ratio: f64, count: usize) -> Result<Self, BadSchedule> {
        if !(first > 0.0 && first.is_finite()) {
            return Err(BadSchedule(format!("first point {first} must be positive")));
        }
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(BadSchedule(format!("ratio {ratio} must lie in (0, 1)")));
        }
        if count == 0 {
            return Err(BadSchedule("need at least one point".into()));
        }
        let points = (0..count).map(|n| first * ratio.powi(n as i32)).collect();
        Ok(EpsSchedule { points })
    }

    /// Every point must keep the floored simplex nonempty for every action
    /// set in the game, and the schedule must strictly decrease.
    pub fn validate_for(&self, game: &GameSpec) -> Result<(), BadSchedule> {
        if self.points.is_empty() {
            return Err(BadSchedule("empty schedule".into()));
        }
        for w in self.points.windows(2) {
            if !(w[1] < w[0]) {
                return Err(BadSchedule(format!(
                    "points must strictly decrease, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        let first = self.points[0];
        if !(first.is_finite() && first > 0.0) {
            return Err(BadSchedule(format!("first point {first} must be positive")));
        }
        for t in 1..=game.horizon() {
            for i in 0..game.num_players() {
                let n = game.action_space(t, i).len();
                if first * n as f64 > 1.0 + 1e-12 {
                    return Err(BadSchedule(format!(
                        "floor {first} infeasible for {n} actions",
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Output of the floored best-response recursion for one player.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BrTables {
    pub player: usize,
    pub eps: f64,
    /// `q[t-1][k][u]`: action value with floored-optimal continuation.
    pub q: Vec<Vec<Vec<f64>>>,
    /// `v[t-1][k]`: floored-simplex optimum of the `q` row.
    pub v: Vec<Vec<f64>>,
    /// Maximizing actions of each `q` row (ties at the tolerance used).
    pub argmax: Vec<Vec<Vec<usize>>>,
    /// `selection[t-1][k]`: the lexicographically smallest optimal vertex of
    /// the floored simplex (floor everywhere, bulk on the last maximizer).
    pub selection: Vec<Vec<Vec<f64>>>,
    pub reachable: Vec<Vec<bool>>,
    /// Expected optimal total reward from the initial law.
    pub value: f64,
}

/// Run the floored best-response recursion for `player` against the other
/// players' summary strategies in `profile_k` (the player's own entry, if
/// present, is ignored). `eps = 0` gives the unconstrained best response.
pub fn best_response_dp_eps(
    game: &GameSpec,
    comps: &CompressionProfile,
    player: usize,
    profile_k: &[KStrategy],
    eps: f64,
    tie_tol: f64,
) -> Result<BrTables, BrError> {
    let horizon = game.horizon();
    for t in 1..=horizon {
        let n = game.action_space(t, player).len();
        if eps < 0.0 || eps * n as f64 > 1.0 + 1e-12 {
            return Err(BrError::FloorInfeasible { eps, actions: n });
        }
    }
    let expanded = expand_k_profile(game, comps, profile_k);
    let check =
        check_information_state(game, comps, player, &expanded, &[player], TOL_WITNESS)?;
    let tables = match (check.witness, check.tables) {
        (None, Some(tables)) => tables,
        (witness, _) => {
            return Err(BrError::NotInformationState(Box::new(witness.expect(
                "a failed information-state check reports its witness",
            ))));
        }
    };

    let comp = comps.get(player);
    let mut q = vec![Vec::new(); horizon];
    let mut v = vec![Vec::new(); horizon];
    let mut argmax = vec![Vec::new(); horizon];
    let mut selection = vec![Vec::new(); horizon];
    for t in (1..=horizon).rev() {
        let kn = comp.space(t).len();
        let un = game.action_space(t, player).len();
        let mut qt = vec![vec![0.0f64; un]; kn];
        let mut vt = vec![0.0f64; kn];
        let mut at = vec![Vec::new(); kn];
        let mut st = vec![vec![0.0f64; un]; kn];
        for k in 0..kn {
            for u in 0..un {
                let mut val = tables.rewards[0][t - 1][k][u];
                if t < horizon {
                    val += compensated_sum(
                        tables.transitions[t - 1][k][u]
                            .iter()
                            .zip(&v[t])
                            .map(|(&p, &vk)| p * vk),
                    );
                }
                qt[k][u] = val;
            }
            let maxers = argmax_set(&qt[k], tie_tol);
            let top = qt[k][maxers[0]];
            let sum: f64 = compensated_sum(qt[k].iter().copied());
            vt[k] = eps * sum + (1.0 - un as f64 * eps) * top;
            let mut row = vec![eps; un];
            row[*maxers.last().expect("nonempty action set")] =
                1.0 - (un - 1) as f64 * eps;
            at[k] = maxers;
            st[k] = row;
        }
        q[t - 1] = qt;
        v[t - 1] = vt;
        argmax[t - 1] = at;
        selection[t - 1] = st;
    }

    let map = &comp.history_map(game)[0];
    let mut value = 0.0;
    for e in game.initial_law() {
        value += e.prob * v[0][map[e.infos[player]]];
    }
    Ok(BrTables {
        player,
        eps,
        q,
        v,
        argmax,
        selection,
        reachable: tables.reachable,
        value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{best_response_value, history_mdp};
    use crate::fixtures::{build_example, FixtureRequest};
    use crate::game::StrategyProfile;
    use crate::mdp::backward_induction;

    #[test]
    fn standard_schedule_is_valid_and_decreasing() {
        let fx = build_example(&FixtureRequest::Example1).unwrap();
        let sched = EpsSchedule::standard();
        assert_eq!(sched.points.len(), 13);
        assert!((sched.points[0] - 0.1).abs() < 1e-15);
        sched.validate_for(&fx.game).unwrap();
        assert!(EpsSchedule::geometric(0.1, 1.5, 4).is_err());
        assert!(EpsSchedule::geometric(0.0, 0.5, 4).is_err());
    }

    #[test]
    fn floored_value_and_selection_match_hand_computation() {
        let fx = build_example(&FixtureRequest::Example1).unwrap();
        let game = &fx.game;
        // Bob rewards action 1 deterministically.
        let mut bob = KStrategy::uniform(game, fx.compressions.get(1), 1);
        bob.tables[1][0] = vec![0.0, 1.0];
        let eps = 0.05;
        let br = best_response_dp_eps(game, &fx.compressions, 0, &[bob], eps, 1e-9).unwrap();
        // Stage 2 pays alice nothing she controls; stage 1 rows are [1, 2]
        // against this bob, so the floored optimum is 2 - eps.
        assert!((br.q[0][0][0] - 1.0).abs() <= 1e-9);
        assert!((br.q[0][0][1] - 2.0).abs() <= 1e-9);
        assert!((br.value - (2.0 - eps)).abs() <= 1e-9);
        assert_eq!(br.argmax[0][0], vec![1]);
        assert_eq!(br.selection[0][0], vec![eps, 1.0 - eps]);
    }

    #[test]
    fn tied_rows_select_the_last_maximizer() {
        let fx = build_example(&FixtureRequest::Example1).unwrap();
        let game = &fx.game;
        let alice = KStrategy::uniform(game, fx.compressions.get(0), 0);
        let eps = 0.025;
        // Bob's stage-2 rewards are identically zero, so both actions tie;
        // his value is the stage-1 hit from alice's fair coin.
        let br = best_response_dp_eps(game, &fx.compressions, 1, &[alice], eps, 1e-9).unwrap();
        for k in 0..fx.compressions.get(1).space(2).len() {
            assert_eq!(br.argmax[1][k], vec![0, 1]);
            assert_eq!(br.selection[1][k], vec![eps, 1.0 - eps]);
        }
        assert!((br.value + 0.5).abs() <= 1e-12);
    }

    #[test]
    fn zero_floor_matches_full_history_best_response() {
        let fx = build_example(&FixtureRequest::Example1).unwrap();
        let game = &fx.game;
        let mut bob = KStrategy::uniform(game, fx.compressions.get(1), 1);
        bob.tables[1][0] = vec![0.3, 0.7];
        let profile = StrategyProfile::uniform(game)
            .with(1, bob.expand(game, fx.compressions.get(1)));
        let br = best_response_dp_eps(game, &fx.compressions, 0, &[bob], 0.0, 1e-9).unwrap();
        let exact = best_response_value(game, 0, &profile).unwrap();
        assert!((br.value - exact).abs() <= 1e-9);
        let hm = history_mdp(game, 0, &profile).unwrap();
        let sol = backward_induction(&hm.mdp);
        assert!((br.value - sol.initial_value(&hm.mdp)).abs() <= 1e-9);
    }

    #[test]
    fn infeasible_floor_is_rejected() {
        let fx = build_example(&FixtureRequest::Example1).unwrap();
        let bob = KStrategy::uniform(&fx.game, fx.compressions.get(1), 1);
        let err =
            best_response_dp_eps(&fx.game, &fx.compressions, 0, &[bob], 0.6, 1e-9).unwrap_err();
        assert!(matches!(err, BrError::FloorInfeasible { .. }));
    }
}
