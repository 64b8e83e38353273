//! Private-history values and index helpers.
//!
//! A history of player `i` at time `t` is the tuple
//! `(h_1^i, z_1^i, ..., z_{t-1}^i)`. Codecs on [`GameSpec`] map these tuples
//! to dense indices; this module adds a small value type for building and
//! slicing them.

use super::GameSpec;

/// A decoded private history: initial information plus the increments seen
/// so far. The time it lives at is `1 + incs.len()`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct History {
    pub init: usize,
    pub incs: Vec<usize>,
}

impl History {
    pub fn initial(init: usize) -> Self {
        History { init, incs: Vec::new() }
    }

    /// Time this history lives at (1-based).
    pub fn time(&self) -> usize {
        1 + self.incs.len()
    }

    /// Extend by one increment, moving to the next time.
    pub fn append(&self, z: usize) -> Self {
        let mut incs = self.incs.clone();
        incs.push(z);
        History { init: self.init, incs }
    }

    /// Dense index of this history for player `i`.
    pub fn encode(&self, game: &GameSpec, i: usize) -> usize {
        let codec = game.history_codec(i, self.time());
        let mut tuple = Vec::with_capacity(1 + self.incs.len());
        tuple.push(self.init);
        tuple.extend_from_slice(&self.incs);
        codec.encode(&tuple)
    }

    /// Decode player `i`'s history index at `time`.
    pub fn decode(game: &GameSpec, i: usize, time: usize, index: usize) -> Self {
        let tuple = game.history_codec(i, time).decode(index);
        History { init: tuple[0], incs: tuple[1..].to_vec() }
    }
}

/// Index of the time-`s` prefix of player `i`'s history `index` at `time`.
/// Requires `1 <= s <= time`.
pub fn history_prefix(game: &GameSpec, i: usize, time: usize, index: usize, s: usize) -> usize {
    debug_assert!(1 <= s && s <= time);
    let tuple = game.history_codec(i, time).decode(index);
    game.history_codec(i, s).encode(&tuple[..s])
}

/// Index of history `index` at `time` extended by increment `z` (the
/// stage-`time` increment), producing a time-`time+1` history index.
pub fn history_extend(game: &GameSpec, i: usize, time: usize, index: usize, z: usize) -> usize {
    let mut tuple = game.history_codec(i, time).decode(index);
    tuple.push(z);
    game.history_codec(i, time + 1).encode(&tuple)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn prefix_and_extend_are_inverse() {
        let fx = fixtures::build_example(&fixtures::FixtureRequest::Example1).unwrap();
        let g = &fx.game;
        for i in 0..g.num_players() {
            for h in 0..g.history_count(i, 2) {
                let p = history_prefix(g, i, 2, h, 1);
                let tuple = g.history_codec(i, 2).decode(h);
                assert_eq!(history_extend(g, i, 1, p, tuple[1]), h);
            }
        }
    }

    #[test]
    fn value_type_round_trips() {
        let fx = fixtures::build_example(&fixtures::FixtureRequest::Example1).unwrap();
        let g = &fx.game;
        for h in 0..g.history_count(0, 3) {
            let v = History::decode(g, 0, 3, h);
            assert_eq!(v.time(), 3);
            assert_eq!(v.encode(g, 0), h);
        }
    }
}
