//! Representability of a profile on a common-information belief plus
//! private information.
//!
//! A split declares, per player and stage, how each private history
//! decomposes into a code shared by everyone and a private remainder. The
//! shared belief at a common code is the profile-induced posterior over the
//! state and all players' private codes. A profile is representable when
//! every player's mixed action is a function of that belief and the own
//! private code alone: two histories carrying equal beliefs and equal
//! private information must prescribe the same row.

use crate::game::{forward_distribution, ForwardError, GameSpec, StrategyProfile};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// Per-player decomposition of histories into (common, private) codes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommonInfoSplit {
    /// `codes[i][t-1][h] = (common, private)` for history `h` of player `i`
    /// at stage `t`.
    pub codes: Vec<Vec<Vec<(usize, usize)>>>,
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum SplitError {
    #[error("common-information split shape problem: {0}")]
    Shape(String),
    #[error(
        "histories ({history_a}, {history_b}) of players ({player_a}, {player_b}) \
         co-occur at stage {t} but declare common codes {common_a} != {common_b}"
    )]
    NotCommon {
        t: usize,
        player_a: usize,
        history_a: usize,
        common_a: usize,
        player_b: usize,
        history_b: usize,
        common_b: usize,
    },
    #[error(transparent)]
    Forward(#[from] ForwardError),
}

impl CommonInfoSplit {
    /// The declared common part must actually be common: in every jointly
    /// reachable configuration (under any strategy, so checked at full
    /// support), all players' histories carry the same common code.
    pub fn validate(&self, game: &GameSpec) -> Result<(), SplitError> {
        let n = game.num_players();
        if self.codes.len() != n {
            return Err(SplitError::Shape(format!(
                "split declares {} players, game has {n}",
                self.codes.len()
            )));
        }
        for i in 0..n {
            if self.codes[i].len() != game.horizon() {
                return Err(SplitError::Shape(format!(
                    "player {i} split covers {} stages, horizon is {}",
                    self.codes[i].len(),
                    game.horizon()
                )));
            }
            for t in 1..=game.horizon() {
                let hn = game.history_count(i, t);
                if self.codes[i][t - 1].len() != hn {
                    return Err(SplitError::Shape(format!(
                        "player {i} split has {} rows at stage {t}, need {hn}",
                        self.codes[i][t - 1].len()
                    )));
                }
            }
        }
        let full = forward_distribution(game, &StrategyProfile::uniform(game))?;
        for t in 1..=game.horizon() {
            for entry in &full.at(t).entries {
                if entry.prob <= 0.0 {
                    continue;
                }
                let c0 = self.codes[0][t - 1][entry.hists[0]].0;
                for i in 1..n {
                    let ci = self.codes[i][t - 1][entry.hists[i]].0;
                    if ci != c0 {
                        return Err(SplitError::NotCommon {
                            t,
                            player_a: 0,
                            history_a: entry.hists[0],
                            common_a: c0,
                            player_b: i,
                            history_b: entry.hists[i],
                            common_b: ci,
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeliefBasedWitness {
    pub player: usize,
    pub t: usize,
    pub history_a: usize,
    pub common_a: usize,
    pub history_b: usize,
    pub common_b: usize,
    pub private: usize,
    /// Largest row difference inside the offending group.
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeliefBasedReport {
    pub representable: bool,
    pub witness: Option<BeliefBasedWitness>,
    /// Distinct on-path belief classes found per stage.
    pub classes: Vec<usize>,
    pub tol: f64,
}

/// Check whether `profile` factors through (shared belief, private code).
///
/// Beliefs are computed along the profile; histories whose common code the
/// profile never reaches are unconstrained, as are histories no strategy
/// reaches at all.
pub fn check_belief_based(
    game: &GameSpec,
    split: &CommonInfoSplit,
    profile: &StrategyProfile,
    tol: f64,
) -> Result<BeliefBasedReport, SplitError> {
    split.validate(game)?;
    let n = game.num_players();
    let dist = forward_distribution(game, profile)?;
    let full = forward_distribution(game, &StrategyProfile::uniform(game))?;

    let mut witness: Option<BeliefBasedWitness> = None;
    let mut worst = tol;
    let mut classes = Vec::with_capacity(game.horizon());
    for t in 1..=game.horizon() {
        // Private code ranges; the belief lives on (state, private tuple).
        let pdims: Vec<usize> = (0..n)
            .map(|i| {
                1 + self_codes(split, i, t)
                    .iter()
                    .map(|&(_, l)| l)
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let env: usize = pdims.iter().product();
        let dim = game.state_space(t).len() * env;

        let mut raw: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        for entry in &dist.at(t).entries {
            if entry.prob <= 0.0 {
                continue;
            }
            let c = split.codes[0][t - 1][entry.hists[0]].0;
            let mut idx = entry.state;
            for i in 0..n {
                idx = idx * pdims[i] + split.codes[i][t - 1][entry.hists[i]].1;
            }
            raw.entry(c).or_insert_with(|| vec![0.0; dim])[idx] += entry.prob;
        }
        // Normalized beliefs, grouped into classes equal within `tol`.
        let mut class_reps: Vec<Vec<f64>> = Vec::new();
        let mut class_of: BTreeMap<usize, usize> = BTreeMap::new();
        for (&c, row) in &raw {
            let mass: f64 = row.iter().sum();
            if mass <= 0.0 {
                continue;
            }
            let belief: Vec<f64> = row.iter().map(|&v| v / mass).collect();
            let found = class_reps.iter().position(|rep| {
                rep.iter()
                    .zip(&belief)
                    .all(|(&a, &b)| (a - b).abs() <= tol)
            });
            let id = match found {
                Some(id) => id,
                None => {
                    class_reps.push(belief);
                    class_reps.len() - 1
                }
            };
            class_of.insert(c, id);
        }
        classes.push(class_reps.len());

        // A history is in play if some strategy reaches it.
        let mut alive: Vec<Vec<bool>> =
            (0..n).map(|i| vec![false; game.history_count(i, t)]).collect();
        for entry in &full.at(t).entries {
            if entry.prob > 0.0 {
                for i in 0..n {
                    alive[i][entry.hists[i]] = true;
                }
            }
        }
        for i in 0..n {
            let mut groups: BTreeMap<(usize, usize), (usize, usize)> = BTreeMap::new();
            for h in 0..game.history_count(i, t) {
                if !alive[i][h] {
                    continue;
                }
                let (c, l) = split.codes[i][t - 1][h];
                let Some(&class) = class_of.get(&c) else {
                    continue;
                };
                match groups.get(&(class, l)) {
                    None => {
                        groups.insert((class, l), (h, c));
                    }
                    Some(&(h0, c0)) => {
                        let gap = (0..game.action_space(t, i).len())
                            .map(|u| {
                                (profile.get(i).prob(t, h0, u)
                                    - profile.get(i).prob(t, h, u))
                                .abs()
                            })
                            .fold(0.0f64, f64::max);
                        if gap > worst {
                            worst = gap;
                            witness = Some(BeliefBasedWitness {
                                player: i,
                                t,
                                history_a: h0,
                                common_a: c0,
                                history_b: h,
                                common_b: c,
                                private: l,
                                gap,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(BeliefBasedReport { representable: witness.is_none(), witness, classes, tol })
}

fn self_codes<'a>(split: &'a CommonInfoSplit, i: usize, t: usize) -> &'a [(usize, usize)] {
    &split.codes[i][t - 1]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::verify_bne;
    use crate::fixtures::{build_example, FixtureRequest};

    fn closed_form_profile(game: &GameSpec, c: f64) -> StrategyProfile {
        let third = 1.0 / 3.0;
        let mut profile = StrategyProfile::uniform(game);
        profile.strategies[0].tables[0] = vec![
            vec![third, 2.0 * third],
            vec![2.0 * third, third],
        ];
        profile.strategies[1].tables[1] = vec![
            vec![third + c, 2.0 * third - c],
            vec![third - c, 2.0 * third + c],
        ];
        profile
    }

    /// The equilibrium makes the signal uninformative, so both of Bob's
    /// stage-2 histories carry one belief yet prescribe different rows.
    #[test]
    fn signaling_equilibrium_is_not_representable() {
        let c = 0.2;
        let fx = build_example(&FixtureRequest::Example3 { c }).unwrap();
        let split = fx.split.clone().unwrap();
        let profile = closed_form_profile(&fx.game, c);
        let report = check_belief_based(&fx.game, &split, &profile, 1e-9).unwrap();
        assert!(!report.representable);
        let w = report.witness.unwrap();
        assert_eq!((w.player, w.t), (1, 2));
        assert!((w.gap - 2.0 * c).abs() <= 1e-9, "{w:?}");
    }

    /// Forcing Bob's rows equal restores representability but breaks the
    /// equilibrium property.
    #[test]
    fn flattened_response_is_representable_but_not_an_equilibrium() {
        let c = 0.2;
        let fx = build_example(&FixtureRequest::Example3 { c }).unwrap();
        let split = fx.split.clone().unwrap();
        let mut profile = closed_form_profile(&fx.game, c);
        let third = 1.0 / 3.0;
        profile.strategies[1].tables[1] =
            vec![vec![third, 2.0 * third], vec![third, 2.0 * third]];
        let report = check_belief_based(&fx.game, &split, &profile, 1e-9).unwrap();
        assert!(report.representable, "{:?}", report.witness);
        let eq = verify_bne(&fx.game, &profile, 1e-6).unwrap();
        assert!(!eq.is_equilibrium);
    }

    /// An asymmetric signal separates the two posteriors over the product
    /// state, so differing rows at different common codes are fine.
    #[test]
    fn separated_beliefs_make_any_rows_representable() {
        let c = 0.2;
        let fx = build_example(&FixtureRequest::Example3 { c }).unwrap();
        let split = fx.split.clone().unwrap();
        let mut profile = closed_form_profile(&fx.game, c);
        profile.strategies[0].tables[0] =
            vec![vec![0.9, 0.1], vec![0.2, 0.8]];
        let report = check_belief_based(&fx.game, &split, &profile, 1e-9).unwrap();
        assert!(report.representable, "{:?}", report.witness);
        assert_eq!(report.classes[1], 2);
    }

    #[test]
    fn disagreeing_common_codes_are_rejected() {
        let c = 0.2;
        let fx = build_example(&FixtureRequest::Example3 { c }).unwrap();
        let mut split = fx.split.clone().unwrap();
        // Bob pretends nothing is common at stage 2.
        split.codes[1][1] = vec![(0, 0), (0, 0)];
        let err = split.validate(&fx.game).unwrap_err();
        assert!(matches!(err, SplitError::NotCommon { t: 2, .. }), "{err:?}");
    }
}
