//! History compressions: recursively updated summaries of private histories.
//!
//! A compression for player `i` fixes summary spaces `K_t^i` and two maps:
//! the seed `k_1 = init(h_1)` and per-stage updates
//! `k_{t+1} = update_t(k_t, z_t)`. Because the update only reads the old
//! summary and the new increment, the summary of any history is computable
//! online.

use super::history::history_extend;
use super::GameSpec;
use crate::space::Space;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Error, Serialize, Deserialize)]
pub enum CompressionError {
    #[error("compression shape mismatch: {0}")]
    Shape(String),
    #[error("compression for player {player} does not cover index {index} at time {time}")]
    DomainMiss { player: usize, time: usize, index: usize },
}

/// A recursively updated compression of one player's private histories.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Compression {
    pub player: usize,
    /// Summary spaces `K_t` for times `1..=T+1`.
    pub spaces: Vec<Space>,
    /// Seed map on initial information: `init_map[h_1] = k_1`.
    pub init_map: Vec<usize>,
    /// Stage updates: `updates[t-1][k][z] = k'` for `t = 1..=T`.
    pub updates: Vec<Vec<Vec<usize>>>,
}

impl Compression {
    /// Summary space at `time` in `1..=T+1`.
    pub fn space(&self, time: usize) -> &Space {
        &self.spaces[time - 1]
    }

    pub fn validate(&self, game: &GameSpec) -> Result<(), CompressionError> {
        let i = self.player;
        let horizon = game.horizon();
        if i >= game.num_players() {
            return Err(CompressionError::Shape(format!("no player {i}")));
        }
        if self.spaces.len() != horizon + 1 {
            return Err(CompressionError::Shape(format!(
                "player {i} compression must declare summary spaces for times 1..={}",
                horizon + 1
            )));
        }
        if let Some(sp) = self.spaces.iter().find(|sp| !sp.well_formed()) {
            return Err(CompressionError::Shape(format!(
                "summary space {} is empty or has duplicate labels",
                sp.name
            )));
        }
        let h1 = game.initial_info_space(i).len();
        if self.init_map.len() != h1 {
            return Err(CompressionError::Shape(format!(
                "player {i} seed map must cover all {h1} initial values"
            )));
        }
        if self.init_map.iter().any(|&k| k >= self.spaces[0].len()) {
            return Err(CompressionError::Shape(format!("player {i} seed map leaves its space")));
        }
        if self.updates.len() != horizon {
            return Err(CompressionError::Shape(format!(
                "player {i} compression must declare updates for stages 1..={horizon}"
            )));
        }
        for t in 1..=horizon {
            let rows = &self.updates[t - 1];
            let kn = self.spaces[t - 1].len();
            let zn = game.increment_space(t, i).len();
            let kn_next = self.spaces[t].len();
            if rows.len() != kn || rows.iter().any(|r| r.len() != zn) {
                return Err(CompressionError::Shape(format!(
                    "player {i} stage {t} update must be {kn} rows of {zn}"
                )));
            }
            if rows.iter().flatten().any(|&k| k >= kn_next) {
                return Err(CompressionError::Shape(format!(
                    "player {i} stage {t} update leaves its space"
                )));
            }
        }
        Ok(())
    }

    /// Summary of player `i`'s history `index` at `time`, computed by
    /// seeding on the initial value and folding the updates.
    pub fn compress_history(
        &self,
        game: &GameSpec,
        i: usize,
        time: usize,
        index: usize,
    ) -> Result<usize, CompressionError> {
        debug_assert_eq!(i, self.player);
        let tuple = game.history_codec(i, time).decode(index);
        let mut k = *self
            .init_map
            .get(tuple[0])
            .ok_or(CompressionError::DomainMiss { player: i, time: 1, index: tuple[0] })?;
        for (s, &z) in tuple.iter().skip(1).enumerate() {
            k = *self.updates[s]
                .get(k)
                .and_then(|row| row.get(z))
                .ok_or(CompressionError::DomainMiss { player: i, time: s + 1, index: z })?;
        }
        Ok(k)
    }

    /// Precompute the full history-to-summary map: `out[time-1][h] = k` for
    /// `time = 1..=T+1`.
    pub fn history_map(&self, game: &GameSpec) -> Vec<Vec<usize>> {
        let i = self.player;
        let horizon = game.horizon();
        let mut out: Vec<Vec<usize>> = Vec::with_capacity(horizon + 1);
        out.push(self.init_map.clone());
        for t in 1..=horizon {
            let prev = &out[t - 1];
            let zn = game.increment_space(t, i).len();
            // Histories at time t+1 extend those at time t; the codec makes
            // the extension index h * |Z_t| + z, so a flat fill works.
            let mut next = vec![0usize; game.history_count(i, t + 1)];
            for (h, &k) in prev.iter().enumerate() {
                for z in 0..zn {
                    next[history_extend(game, i, t, h, z)] = self.updates[t - 1][k][z];
                }
            }
            out.push(next);
        }
        out
    }
}

/// One compression per player, in player order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompressionProfile {
    pub compressions: Vec<Compression>,
}

impl CompressionProfile {
    pub fn identity(game: &GameSpec) -> Self {
        CompressionProfile {
            compressions: (0..game.num_players()).map(|i| identity_compression(game, i)).collect(),
        }
    }

    pub fn get(&self, i: usize) -> &Compression {
        &self.compressions[i]
    }

    pub fn validate(&self, game: &GameSpec) -> Result<(), CompressionError> {
        if self.compressions.len() != game.num_players() {
            return Err(CompressionError::Shape("profile must cover every player".into()));
        }
        for (i, c) in self.compressions.iter().enumerate() {
            if c.player != i {
                return Err(CompressionError::Shape(format!(
                    "profile slot {i} holds a compression for player {}",
                    c.player
                )));
            }
            c.validate(game)?;
        }
        Ok(())
    }
}

/// The compression that keeps the full history: `K_t = H_t`.
pub fn identity_compression(game: &GameSpec, i: usize) -> Compression {
    let horizon = game.horizon();
    let spaces = (1..=(horizon + 1))
        .map(|time| {
            Space::numbered(
                format!("full_{}_{time}", game.player_name(i)),
                game.history_count(i, time),
            )
        })
        .collect();
    let init_map = (0..game.initial_info_space(i).len()).collect();
    let updates = (1..=horizon)
        .map(|t| {
            let zn = game.increment_space(t, i).len();
            (0..game.history_count(i, t))
                .map(|h| (0..zn).map(|z| history_extend(game, i, t, h, z)).collect())
                .collect()
        })
        .collect();
    Compression { player: i, spaces, init_map, updates }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn identity_maps_history_to_itself() {
        let fx = fixtures::build_example(&fixtures::FixtureRequest::Example1).unwrap();
        let g = &fx.game;
        for i in 0..g.num_players() {
            let c = identity_compression(g, i);
            c.validate(g).unwrap();
            let map = c.history_map(g);
            for time in 1..=(g.horizon() + 1) {
                for h in 0..g.history_count(i, time) {
                    assert_eq!(map[time - 1][h], h);
                    assert_eq!(c.compress_history(g, i, time, h).unwrap(), h);
                }
            }
        }
    }

    #[test]
    fn history_map_agrees_with_fold() {
        let fx = fixtures::build_example(&fixtures::FixtureRequest::Example1).unwrap();
        let g = &fx.game;
        for (i, c) in fx.compressions.compressions.iter().enumerate() {
            let map = c.history_map(g);
            for time in 1..=(g.horizon() + 1) {
                for h in 0..g.history_count(i, time) {
                    assert_eq!(map[time - 1][h], c.compress_history(g, i, time, h).unwrap());
                }
            }
        }
    }
}
