//! Sequential-equilibrium certificates from canonical trembles.
//!
//! A candidate profile is perturbed toward uniform along a decreasing floor
//! schedule. Under each trembled profile every history is in play, so every
//! player has well-defined action values everywhere; if the candidate is
//! sequentially rational in the limit, its regret at each history shrinks
//! linearly with the tremble. The verifier checks that shrinkage on the tail
//! of the schedule. A pass certifies the profile; a fail is reported as
//! inconclusive, never as a refutation, since a fixed linear allowance can
//! only witness convergence, not rule it out.

use super::br_eps::EpsSchedule;
use super::history_policy_q;
use crate::game::{BehavioralStrategy, CondError, GameSpec, StrategyProfile};
use crate::num::compensated_sum;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Regret allowance per unit of tremble.
pub const MARGIN_SLOPE: f64 = 16.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeVerdict {
    Canonical,
    Inconclusive,
}

impl SeVerdict {
    pub fn holds(self) -> bool {
        self == SeVerdict::Canonical
    }
}

impl fmt::Display for SeVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeVerdict::Canonical => write!(f, "SE (canonical trembles)"),
            SeVerdict::Inconclusive => write!(f, "inconclusive"),
        }
    }
}

/// Worst regret at one tremble size, against its linear allowance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SePoint {
    pub eps: f64,
    pub max_margin: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeWitness {
    pub player: usize,
    pub t: usize,
    pub history: usize,
    pub eps: f64,
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeReport {
    pub verdict: SeVerdict,
    pub points: Vec<SePoint>,
    /// The history with the largest allowance excess, when any point failed.
    pub witness: Option<SeWitness>,
}

/// Mix every player `eps` of the way toward uniform.
pub fn canonical_tremble(game: &GameSpec, profile: &StrategyProfile, eps: f64) -> StrategyProfile {
    StrategyProfile {
        strategies: profile
            .strategies
            .iter()
            .enumerate()
            .map(|(i, s)| s.mix(&BehavioralStrategy::uniform(game, i), eps))
            .collect(),
    }
}

/// Certify `profile` as sequentially rational under canonical trembles,
/// using the last four points of `schedule` (or fewer if it is shorter).
pub fn verify_se_canonical(
    game: &GameSpec,
    profile: &StrategyProfile,
    schedule: &EpsSchedule,
) -> Result<SeReport, CondError> {
    let tail_start = schedule.points.len().saturating_sub(4);
    let mut points = Vec::new();
    let mut witness: Option<SeWitness> = None;
    let mut worst_excess = 0.0f64;
    let mut ok = true;
    for &eps in &schedule.points[tail_start..] {
        let trembled = canonical_tremble(game, profile, eps);
        let bound = MARGIN_SLOPE * eps + 1e-9;
        let mut max_margin = 0.0f64;
        for i in 0..game.num_players() {
            let hq = history_policy_q(game, i, &trembled)?;
            for t in 1..=game.horizon() {
                for h in 0..game.history_count(i, t) {
                    if hq.phantom[t - 1][h] {
                        continue;
                    }
                    let row = &hq.q[t - 1][h];
                    let best = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    let played = compensated_sum(
                        profile.get(i).row(t, h).iter().zip(row).map(|(&p, &q)| p * q),
                    );
                    let margin = best - played;
                    max_margin = max_margin.max(margin);
                    if margin > bound && margin - bound > worst_excess {
                        worst_excess = margin - bound;
                        witness = Some(SeWitness { player: i, t, history: h, eps, margin });
                    }
                }
            }
        }
        if max_margin > bound {
            ok = false;
        }
        points.push(SePoint { eps, max_margin, bound });
    }
    let verdict = if ok { SeVerdict::Canonical } else { SeVerdict::Inconclusive };
    Ok(SeReport { verdict, points, witness: if ok { None } else { witness } })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{build_example, FixtureRequest};
    use crate::game::StrategyProfile;

    #[test]
    fn threat_backed_play_is_certified_and_hollow_play_is_not() {
        let fx = build_example(&FixtureRequest::Example1).unwrap();
        let game = &fx.game;
        let sched = EpsSchedule::standard();

        // Alice plays 1, bob rewards it: regret vanishes everywhere.
        let mut profile = StrategyProfile::uniform(game);
        profile.strategies[0].tables[0][0] = vec![0.0, 1.0];
        profile.strategies[1].tables[1] = vec![vec![0.0, 1.0], vec![0.0, 1.0]];
        let report = verify_se_canonical(game, &profile, &sched).unwrap();
        assert!(report.verdict.holds());
        assert_eq!(report.verdict.to_string(), "SE (canonical trembles)");

        // Alice plays 0 against the same bob: her stage-1 regret is near 1
        // at every tremble, so no linear allowance covers it.
        let mut lazy = profile.clone();
        lazy.strategies[0].tables[0][0] = vec![1.0, 0.0];
        let report = verify_se_canonical(game, &lazy, &sched).unwrap();
        assert!(!report.verdict.holds());
        assert_eq!(report.verdict.to_string(), "inconclusive");
        let w = report.witness.unwrap();
        assert_eq!((w.player, w.t), (0, 1));
    }
}
