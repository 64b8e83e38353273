//! Monte Carlo payoff estimation by trajectory simulation.

use super::history::history_extend;
use super::strategy::StrategyProfile;
use super::GameSpec;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Sample means and standard errors of the per-player total rewards.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McPayoff {
    pub episodes: usize,
    pub mean: Vec<f64>,
    /// Standard error of each mean (sample std dev / sqrt(episodes)).
    pub std_error: Vec<f64>,
}

fn sample_index<R: Rng>(probs: impl Iterator<Item = f64>, rng: &mut R) -> usize {
    let mut target = rng.gen_range(0.0..1.0f64);
    let mut last = 0;
    for (i, p) in probs.enumerate() {
        last = i;
        if target < p {
            return i;
        }
        target -= p;
    }
    // Rounding can leave a sliver of target mass; charge it to the last atom.
    last
}

/// Estimate expected total rewards under `profile` from `episodes` sampled
/// trajectories.
pub fn monte_carlo_payoff<R: Rng>(
    game: &GameSpec,
    profile: &StrategyProfile,
    episodes: usize,
    rng: &mut R,
) -> McPayoff {
    let n = game.num_players();
    let mut sum = vec![0.0f64; n];
    let mut sumsq = vec![0.0f64; n];
    for _ in 0..episodes {
        let init = &game.initial_law()[sample_index(game.initial_law().iter().map(|e| e.prob), rng)];
        let mut state = init.state;
        let mut hists = init.infos.clone();
        let mut totals = vec![0.0f64; n];
        for t in 1..=game.horizon() {
            let act = game.joint_action_codec(t);
            let joint_u = act.encode(
                &(0..n)
                    .map(|i| sample_index(profile.get(i).row(t, hists[i]).iter().copied(), rng))
                    .collect::<Vec<_>>(),
            );
            let outcomes = game.kernel_entries(t, state, joint_u);
            let out = &outcomes[sample_index(outcomes.iter().map(|e| e.prob), rng)];
            for i in 0..n {
                totals[i] += out.rewards[i];
                hists[i] = history_extend(game, i, t, hists[i], out.increments[i]);
            }
            state = out.next_state;
        }
        for i in 0..n {
            sum[i] += totals[i];
            sumsq[i] += totals[i] * totals[i];
        }
    }
    let m = episodes as f64;
    let mean: Vec<f64> = sum.iter().map(|s| s / m).collect();
    let std_error = (0..n)
        .map(|i| {
            if episodes < 2 {
                return f64::INFINITY;
            }
            let var = (sumsq[i] - m * mean[i] * mean[i]).max(0.0) / (m - 1.0);
            (var / m).sqrt()
        })
        .collect();
    McPayoff { episodes, mean, std_error }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::game::compute_payoffs;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn estimate_tracks_exact_payoff() {
        let fx = fixtures::build_example(&fixtures::FixtureRequest::Example1).unwrap();
        let profile = StrategyProfile::uniform(&fx.game);
        let exact = compute_payoffs(&fx.game, &profile).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let est = monte_carlo_payoff(&fx.game, &profile, 20_000, &mut rng);
        for i in 0..fx.game.num_players() {
            let band = 4.0 * est.std_error[i] + 1e-9;
            assert!(
                (est.mean[i] - exact.total[i]).abs() <= band,
                "player {i}: est {} vs exact {} (band {band})",
                est.mean[i],
                exact.total[i]
            );
        }
    }
}
