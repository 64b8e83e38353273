//! Behavioral strategies on private histories and on compressed states.

use super::compression::Compression;
use super::GameSpec;
use crate::num::{compensated_sum, is_distribution, TOL_MODEL};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Error, Serialize, Deserialize)]
pub enum StrategyError {
    #[error("strategy shape mismatch: {0}")]
    Shape(String),
    #[error("strategy row (player {player}, t={t}, index {index}) sums to {sum}, not 1")]
    NotDistribution { player: usize, t: usize, index: usize, sum: f64 },
}

/// A behavioral strategy of one player: `tables[t-1][h][u]` is the
/// probability of action `u` at stage `t` given private history `h`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BehavioralStrategy {
    pub player: usize,
    pub tables: Vec<Vec<Vec<f64>>>,
}

impl BehavioralStrategy {
    pub fn uniform(game: &GameSpec, player: usize) -> Self {
        let tables = (1..=game.horizon())
            .map(|t| {
                let un = game.action_space(t, player).len();
                vec![vec![1.0 / un as f64; un]; game.history_count(player, t)]
            })
            .collect();
        BehavioralStrategy { player, tables }
    }

    /// Fully mixed random strategy. Every action keeps probability at least
    /// `min(floor, 1/(2|U|))`; the slack is spread by exponential weights.
    pub fn sample_mixed<R: Rng>(game: &GameSpec, player: usize, floor: f64, rng: &mut R) -> Self {
        let tables = (1..=game.horizon())
            .map(|t| {
                let un = game.action_space(t, player).len();
                (0..game.history_count(player, t))
                    .map(|_| sample_mixed_row(un, floor, rng))
                    .collect()
            })
            .collect();
        BehavioralStrategy { player, tables }
    }

    pub fn prob(&self, t: usize, h: usize, u: usize) -> f64 {
        self.tables[t - 1][h][u]
    }

    pub fn row(&self, t: usize, h: usize) -> &[f64] {
        &self.tables[t - 1][h]
    }

    pub fn validate(&self, game: &GameSpec) -> Result<(), StrategyError> {
        let i = self.player;
        if i >= game.num_players() || self.tables.len() != game.horizon() {
            return Err(StrategyError::Shape(format!(
                "player {i} strategy must cover stages 1..={}",
                game.horizon()
            )));
        }
        for t in 1..=game.horizon() {
            let rows = &self.tables[t - 1];
            let un = game.action_space(t, i).len();
            if rows.len() != game.history_count(i, t) || rows.iter().any(|r| r.len() != un) {
                return Err(StrategyError::Shape(format!(
                    "player {i} stage {t} table must be {} rows of {un}",
                    game.history_count(i, t)
                )));
            }
            for (h, row) in rows.iter().enumerate() {
                if !is_distribution(row, TOL_MODEL) {
                    let sum = compensated_sum(row.iter().copied());
                    return Err(StrategyError::NotDistribution { player: i, t, index: h, sum });
                }
            }
        }
        Ok(())
    }

    /// Pointwise mixture `(1-w)*self + w*other`, row by row.
    pub fn mix(&self, other: &BehavioralStrategy, w: f64) -> BehavioralStrategy {
        debug_assert_eq!(self.player, other.player);
        let tables = self
            .tables
            .iter()
            .zip(&other.tables)
            .map(|(a, b)| {
                a.iter()
                    .zip(b)
                    .map(|(ra, rb)| {
                        ra.iter().zip(rb).map(|(&pa, &pb)| (1.0 - w) * pa + w * pb).collect()
                    })
                    .collect()
            })
            .collect();
        BehavioralStrategy { player: self.player, tables }
    }
}

/// A profile: one behavioral strategy per player, in player order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyProfile {
    pub strategies: Vec<BehavioralStrategy>,
}

impl StrategyProfile {
    pub fn uniform(game: &GameSpec) -> Self {
        StrategyProfile {
            strategies: (0..game.num_players())
                .map(|i| BehavioralStrategy::uniform(game, i))
                .collect(),
        }
    }

    pub fn get(&self, i: usize) -> &BehavioralStrategy {
        &self.strategies[i]
    }

    pub fn validate(&self, game: &GameSpec) -> Result<(), StrategyError> {
        if self.strategies.len() != game.num_players() {
            return Err(StrategyError::Shape("profile must cover every player".into()));
        }
        for (i, s) in self.strategies.iter().enumerate() {
            if s.player != i {
                return Err(StrategyError::Shape(format!(
                    "profile slot {i} holds a strategy for player {}",
                    s.player
                )));
            }
            s.validate(game)?;
        }
        Ok(())
    }

    /// Replace player `i`'s strategy.
    pub fn with(&self, i: usize, s: BehavioralStrategy) -> StrategyProfile {
        let mut out = self.clone();
        out.strategies[i] = s;
        out
    }
}

/// A strategy on compressed states: `tables[t-1][k][u]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KStrategy {
    pub player: usize,
    pub tables: Vec<Vec<Vec<f64>>>,
}

impl KStrategy {
    pub fn uniform(game: &GameSpec, comp: &Compression, player: usize) -> Self {
        let tables = (1..=game.horizon())
            .map(|t| {
                let un = game.action_space(t, player).len();
                vec![vec![1.0 / un as f64; un]; comp.space(t).len()]
            })
            .collect();
        KStrategy { player, tables }
    }

    pub fn sample_mixed<R: Rng>(
        game: &GameSpec,
        comp: &Compression,
        player: usize,
        floor: f64,
        rng: &mut R,
    ) -> Self {
        let tables = (1..=game.horizon())
            .map(|t| {
                let un = game.action_space(t, player).len();
                (0..comp.space(t).len()).map(|_| sample_mixed_row(un, floor, rng)).collect()
            })
            .collect();
        KStrategy { player, tables }
    }

    pub fn prob(&self, t: usize, k: usize, u: usize) -> f64 {
        self.tables[t - 1][k][u]
    }

    pub fn row(&self, t: usize, k: usize) -> &[f64] {
        &self.tables[t - 1][k]
    }

    pub fn validate(&self, game: &GameSpec, comp: &Compression) -> Result<(), StrategyError> {
        let i = self.player;
        if self.tables.len() != game.horizon() {
            return Err(StrategyError::Shape(format!(
                "player {i} compressed strategy must cover stages 1..={}",
                game.horizon()
            )));
        }
        for t in 1..=game.horizon() {
            let rows = &self.tables[t - 1];
            let un = game.action_space(t, i).len();
            if rows.len() != comp.space(t).len() || rows.iter().any(|r| r.len() != un) {
                return Err(StrategyError::Shape(format!(
                    "player {i} stage {t} compressed table must be {} rows of {un}",
                    comp.space(t).len()
                )));
            }
            for (k, row) in rows.iter().enumerate() {
                if !is_distribution(row, TOL_MODEL) {
                    let sum = compensated_sum(row.iter().copied());
                    return Err(StrategyError::NotDistribution { player: i, t, index: k, sum });
                }
            }
        }
        Ok(())
    }

    /// Expand to a behavioral strategy: play `self` at the compressed image
    /// of each private history.
    pub fn expand(&self, game: &GameSpec, comp: &Compression) -> BehavioralStrategy {
        let i = self.player;
        let tables = (1..=game.horizon())
            .map(|t| {
                (0..game.history_count(i, t))
                    .map(|h| {
                        let k = comp.compress_history(game, i, t, h).expect(
                            "compression must cover every reachable history of its player",
                        );
                        self.tables[t - 1][k].clone()
                    })
                    .collect()
            })
            .collect();
        BehavioralStrategy { player: i, tables }
    }

    pub fn mix(&self, other: &KStrategy, w: f64) -> KStrategy {
        debug_assert_eq!(self.player, other.player);
        let tables = self
            .tables
            .iter()
            .zip(&other.tables)
            .map(|(a, b)| {
                a.iter()
                    .zip(b)
                    .map(|(ra, rb)| {
                        ra.iter().zip(rb).map(|(&pa, &pb)| (1.0 - w) * pa + w * pb).collect()
                    })
                    .collect()
            })
            .collect();
        KStrategy { player: self.player, tables }
    }
}

/// One fully mixed row: floor mass on every action, exponential weights on
/// the rest. The floor is clipped to `1/(2n)` so it always fits.
fn sample_mixed_row<R: Rng>(n: usize, floor: f64, rng: &mut R) -> Vec<f64> {
    let f = floor.min(0.5 / n as f64);
    let mut w: Vec<f64> = (0..n).map(|_| -(rng.gen_range(1e-12..1.0f64)).ln()).collect();
    let total: f64 = w.iter().sum();
    let slack = 1.0 - f * n as f64;
    for v in &mut w {
        *v = f + slack * (*v / total);
    }
    // Exact renormalization so model-tolerance checks hold downstream.
    let sum: f64 = compensated_sum(w.iter().copied());
    for v in &mut w {
        *v /= sum;
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn uniform_profile_validates() {
        let fx = fixtures::build_example(&fixtures::FixtureRequest::Example1).unwrap();
        StrategyProfile::uniform(&fx.game).validate(&fx.game).unwrap();
    }

    #[test]
    fn sampled_strategies_are_fully_mixed() {
        let fx = fixtures::build_example(&fixtures::FixtureRequest::Example1).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        for i in 0..fx.game.num_players() {
            let s = BehavioralStrategy::sample_mixed(&fx.game, i, 0.05, &mut rng);
            s.validate(&fx.game).unwrap();
            for table in &s.tables {
                for row in table {
                    assert!(row.iter().all(|&p| p >= 0.04));
                }
            }
        }
    }

    #[test]
    fn mix_interpolates_rows() {
        let fx = fixtures::build_example(&fixtures::FixtureRequest::Example1).unwrap();
        let g = &fx.game;
        let a = BehavioralStrategy::uniform(g, 0);
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let b = BehavioralStrategy::sample_mixed(g, 0, 0.1, &mut rng);
        let m = a.mix(&b, 0.25);
        m.validate(g).unwrap();
        let want = 0.75 * a.prob(1, 0, 0) + 0.25 * b.prob(1, 0, 0);
        assert!((m.prob(1, 0, 0) - want).abs() < 1e-15);
    }
}
