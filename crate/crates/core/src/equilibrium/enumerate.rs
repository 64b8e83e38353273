//! Exhaustive equilibrium enumeration for small two-player games.
//!
//! Strategies are written as realization plans: one weight per (history,
//! action) pair of a player, tied together by flow constraints along the
//! player's own history tree. Total payoffs are then bilinear in the two
//! plans, with nature's probabilities folded into the coefficient matrices.
//! For a fixed support pattern (the allowed actions at every information
//! set of both players), equilibrium splits into two decoupled linear
//! problems: the opponent's plan must make all supported actions of a
//! player equally good and no excluded action better, and vice versa. Each
//! problem's solution set is a polytope whose vertices are enumerated;
//! every combination is a candidate equilibrium, re-verified against all
//! full-history deviations before being reported.

use super::linalg::{vertices, Polytope};
use super::verify_bne;
use crate::game::{
    BehavioralStrategy, CondError, GameSpec, StrategyProfile,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Cap on per-player free behavioral parameters (actions minus one, summed
/// over live information sets).
pub const MAX_BEHAVIORAL_PARAMS: usize = 8;

/// Cap on the number of support patterns examined.
pub const MAX_PATTERNS: f64 = 1e7;

#[derive(Debug, Error)]
pub enum EnumerateError {
    #[error("enumeration handles exactly two players, this game has {0}")]
    UnsupportedShape(usize),
    #[error("too large to enumerate: {0}")]
    TooLarge(String),
    #[error(transparent)]
    Cond(#[from] CondError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnumeratedEquilibrium {
    pub payoffs: Vec<f64>,
    pub profile: StrategyProfile,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Enumeration {
    /// One verified witness per distinct payoff vector.
    pub equilibria: Vec<EnumeratedEquilibrium>,
    /// Distinct equilibrium payoff vectors, merged at `1e-6`.
    pub payoffs: Vec<Vec<f64>>,
    pub patterns_examined: u64,
}

/// Payoff vectors closer than this (in the max norm) count as one.
pub const PAYOFF_DEDUP: f64 = 1e-6;

/// One player's own history tree, restricted to histories nature can reach.
struct Side {
    player: usize,
    /// Live information sets `(t, h)` in increasing `(t, h)` order.
    infosets: Vec<(usize, usize)>,
    /// Reverse lookup: `iset_of[t-1][h]`.
    iset_of: Vec<Vec<Option<usize>>>,
    /// Action count per information set.
    actions: Vec<usize>,
    /// Sequence ids per information set and action.
    seq_id: Vec<Vec<usize>>,
    seq_count: usize,
    /// Parent sequence of each information set (`None` at t = 1).
    parent: Vec<Option<usize>>,
    /// Child information sets of each sequence.
    children: Vec<Vec<usize>>,
    params: usize,
}

fn build_side(game: &GameSpec, player: usize, seen: &[Vec<bool>]) -> Side {
    let horizon = game.horizon();
    let mut infosets = Vec::new();
    let mut iset_of = Vec::with_capacity(horizon);
    for t in 1..=horizon {
        let mut row = vec![None; game.history_count(player, t)];
        for (h, &alive) in seen[t - 1].iter().enumerate() {
            if alive {
                row[h] = Some(infosets.len());
                infosets.push((t, h));
            }
        }
        iset_of.push(row);
    }
    let actions: Vec<usize> =
        infosets.iter().map(|&(t, _)| game.action_space(t, player).len()).collect();
    let mut seq_id = Vec::with_capacity(infosets.len());
    let mut seq_count = 0usize;
    for &un in &actions {
        seq_id.push((seq_count..seq_count + un).collect::<Vec<_>>());
        seq_count += un;
    }
    let parent: Vec<Option<usize>> = infosets
        .iter()
        .map(|&(t, h)| {
            if t == 1 {
                return None;
            }
            let zn = game.increment_space(t - 1, player).len();
            let (hp, z) = (h / zn, h % zn);
            let a = game.recall_action(t - 1, player, z);
            let ip = iset_of[t - 2][hp].expect("live history has a live prefix");
            Some(seq_id[ip][a])
        })
        .collect();
    let mut children = vec![Vec::new(); seq_count];
    for (i, &(t, _h)) in infosets.iter().enumerate() {
        if t == 1 {
            continue;
        }
        children[parent[i].unwrap()].push(i);
    }
    let params = infosets
        .iter()
        .zip(&actions)
        .map(|(_, &un)| un - 1)
        .sum();
    Side {
        player,
        infosets,
        iset_of,
        actions,
        seq_id,
        seq_count,
        parent,
        children,
        params,
    }
}

/// Nature-only forward walk: per-stage payoff coefficients on sequence
/// pairs, and which histories are alive at all.
struct WalkOutput {
    seen: [Vec<Vec<bool>>; 2],
    /// `coeff[j][s1][s2]`: player j's reward mass on the sequence pair.
    coeff: [Vec<Vec<f64>>; 2],
}

fn walk(game: &GameSpec, sides_hint: Option<(&Side, &Side)>) -> Result<WalkOutput, EnumerateError> {
    let horizon = game.horizon();
    let mut seen: [Vec<Vec<bool>>; 2] = [
        (1..=horizon).map(|t| vec![false; game.history_count(0, t)]).collect(),
        (1..=horizon).map(|t| vec![false; game.history_count(1, t)]).collect(),
    ];
    // Without sides yet (first pass) only the seen flags are produced.
    let mut coeff: [Vec<Vec<f64>>; 2] = match sides_hint {
        Some((a, b)) => [
            vec![vec![0.0; b.seq_count]; a.seq_count],
            vec![vec![0.0; b.seq_count]; a.seq_count],
        ],
        None => [Vec::new(), Vec::new()],
    };

    let mut w = vec![
        0.0f64;
        game.state_space(1).len()
            * game.history_count(0, 1)
            * game.history_count(1, 1)
    ];
    let (hn0, hn1) = (game.history_count(0, 1), game.history_count(1, 1));
    for e in game.initial_law() {
        w[(e.state * hn0 + e.infos[0]) * hn1 + e.infos[1]] += e.prob;
    }
    for t in 1..=horizon {
        let xs = game.state_space(t).len();
        let hn0 = game.history_count(0, t);
        let hn1 = game.history_count(1, t);
        let xs2 = game.state_space(t + 1).len();
        let hn0n = game.history_count(0, t + 1);
        let hn1n = game.history_count(1, t + 1);
        let cells = xs2 as f64 * hn0n as f64 * hn1n as f64;
        if cells > game.support_cap() as f64 {
            return Err(EnumerateError::TooLarge(format!(
                "stage {} joint support would need {cells:.0} cells",
                t + 1
            )));
        }
        let zn0 = game.increment_space(t, 0).len();
        let zn1 = game.increment_space(t, 1).len();
        let jcodec = game.joint_action_codec(t);
        let mut next = vec![0.0f64; xs2 * hn0n * hn1n];
        for x in 0..xs {
            for h0 in 0..hn0 {
                for h1 in 0..hn1 {
                    let mass = w[(x * hn0 + h0) * hn1 + h1];
                    if mass == 0.0 {
                        continue;
                    }
                    seen[0][t - 1][h0] = true;
                    seen[1][t - 1][h1] = true;
                    for ju in 0..jcodec.len() {
                        let us = jcodec.decode(ju);
                        for entry in game.kernel_entries(t, x, ju) {
                            let p = mass * entry.prob;
                            if p == 0.0 {
                                continue;
                            }
                            if let Some((s0, s1)) = sides_hint {
                                let i0 = s0.iset_of[t - 1][h0].unwrap();
                                let i1 = s1.iset_of[t - 1][h1].unwrap();
                                let q0 = s0.seq_id[i0][us[0]];
                                let q1 = s1.seq_id[i1][us[1]];
                                coeff[0][q0][q1] += p * entry.rewards[0];
                                coeff[1][q0][q1] += p * entry.rewards[1];
                            }
                            if t < horizon {
                                let h0n = h0 * zn0 + entry.increments[0];
                                let h1n = h1 * zn1 + entry.increments[1];
                                next[(entry.next_state * hn0n + h0n) * hn1n + h1n] += p;
                            }
                        }
                    }
                }
            }
        }
        w = next;
    }
    Ok(WalkOutput { seen, coeff })
}

/// Supports per information set, indexed like `Side::infosets`.
type SidePattern = Vec<Vec<usize>>;

/// Build and solve one side's linear problem: find the opponent plans that
/// make `own`'s pattern optimal, returning each solution vertex with the
/// own player's total payoff it induces.
///
/// `coeff[s_own][s_opp]` carries own rewards; own continuation values are
/// eliminated bottom-up: each information set's value functional is its
/// first supported action's, and the remaining supported actions contribute
/// indifference equations. Excluded actions contribute slack inequalities.
fn side_solutions(
    own: &Side,
    opp: &Side,
    coeff: &[Vec<f64>],
    sup_own: &SidePattern,
    sup_opp: &SidePattern,
) -> Vec<(Vec<f64>, f64)> {
    let nv = opp.seq_count;
    // Value functionals and action rows over the opponent's plan variables.
    let mut vrow: Vec<Vec<f64>> = vec![Vec::new(); own.infosets.len()];
    let mut qrow: Vec<Vec<Vec<f64>>> = vec![Vec::new(); own.infosets.len()];
    for i in (0..own.infosets.len()).rev() {
        let un = own.actions[i];
        let mut rows = Vec::with_capacity(un);
        for u in 0..un {
            let mut row = coeff[own.seq_id[i][u]].clone();
            for &child in &own.children[own.seq_id[i][u]] {
                for (r, c) in row.iter_mut().zip(&vrow[child]) {
                    *r += c;
                }
            }
            rows.push(row);
        }
        vrow[i] = rows[sup_own[i][0]].clone();
        qrow[i] = rows;
    }

    let mut p = Polytope::default();
    // Opponent plan structure: roots sum to one, flows conserve, excluded
    // sequences vanish, allowed sequences stay nonnegative.
    for (j, &(t, _)) in opp.infosets.iter().enumerate() {
        let mut row = vec![0.0; nv];
        for u in 0..opp.actions[j] {
            row[opp.seq_id[j][u]] = 1.0;
        }
        if t == 1 {
            p.eq_a.push(row);
            p.eq_b.push(1.0);
        } else {
            row[opp.parent[j].unwrap()] -= 1.0;
            p.eq_a.push(row);
            p.eq_b.push(0.0);
        }
        for u in 0..opp.actions[j] {
            let mut row = vec![0.0; nv];
            row[opp.seq_id[j][u]] = 1.0;
            if sup_opp[j].contains(&u) {
                p.ineq_a.push(row);
                p.ineq_b.push(0.0);
            } else {
                p.eq_a.push(row);
                p.eq_b.push(0.0);
            }
        }
    }
    // Own optimality: supported actions tie, excluded actions trail.
    for i in 0..own.infosets.len() {
        let base = sup_own[i][0];
        for &u in &sup_own[i][1..] {
            let row: Vec<f64> = qrow[i][u]
                .iter()
                .zip(&qrow[i][base])
                .map(|(&a, &b)| a - b)
                .collect();
            p.eq_a.push(row);
            p.eq_b.push(0.0);
        }
        for u in 0..own.actions[i] {
            if sup_own[i].contains(&u) {
                continue;
            }
            let row: Vec<f64> = vrow[i]
                .iter()
                .zip(&qrow[i][u])
                .map(|(&v, &q)| v - q)
                .collect();
            p.ineq_a.push(row);
            p.ineq_b.push(0.0);
        }
    }

    let Some(vs) = vertices(&p, 1e-9, 1e-9) else {
        return Vec::new();
    };
    vs.into_iter()
        .map(|y| {
            let mut total = 0.0;
            for (i, &(t, _)) in own.infosets.iter().enumerate() {
                if t == 1 {
                    total += vrow[i].iter().zip(&y).map(|(&c, &yv)| c * yv).sum::<f64>();
                }
            }
            (y, total)
        })
        .collect()
}

/// Behavioral strategy from a realization plan: normalize within each live
/// information set, spread over the pattern where the plan is silent, and
/// spread uniformly where nature never goes.
fn plan_to_behavioral(
    game: &GameSpec,
    side: &Side,
    sup: &SidePattern,
    y: &[f64],
) -> BehavioralStrategy {
    let mut s = BehavioralStrategy::uniform(game, side.player);
    for (i, &(t, h)) in side.infosets.iter().enumerate() {
        let un = side.actions[i];
        let mass: f64 = (0..un).map(|u| y[side.seq_id[i][u]].max(0.0)).sum();
        let row = &mut s.tables[t - 1][h];
        if mass > 1e-9 {
            for u in 0..un {
                row[u] = y[side.seq_id[i][u]].max(0.0) / mass;
            }
        } else {
            for u in 0..un {
                row[u] = 0.0;
            }
            for &u in &sup[i] {
                row[u] = 1.0 / sup[i].len() as f64;
            }
        }
    }
    s
}

/// Odometer over nonempty action subsets at every live information set of
/// both players. Masks start at the full set and count down, so the
/// all-actions pattern comes first.
struct Patterns {
    sizes: Vec<usize>,
    masks: Vec<usize>,
    started: bool,
}

impl Patterns {
    fn new(sizes: Vec<usize>) -> Self {
        let masks = sizes.iter().map(|&un| (1usize << un) - 1).collect();
        Patterns { sizes, masks, started: false }
    }

    fn count(&self) -> f64 {
        self.sizes.iter().map(|&un| ((1usize << un) - 1) as f64).product()
    }

    fn next(&mut self) -> Option<&[usize]> {
        if !self.started {
            self.started = true;
            return Some(&self.masks);
        }
        for pos in (0..self.masks.len()).rev() {
            if self.masks[pos] > 1 {
                self.masks[pos] -= 1;
                for p in pos + 1..self.masks.len() {
                    self.masks[p] = (1usize << self.sizes[p]) - 1;
                }
                return Some(&self.masks);
            }
            self.masks[pos] = (1usize << self.sizes[pos]) - 1;
        }
        None
    }
}

fn mask_to_support(mask: usize, un: usize) -> Vec<usize> {
    (0..un).filter(|u| mask & (1 << u) != 0).collect()
}

/// Enumerate all equilibrium payoff vectors of a two-player game, with one
/// verified witness profile per distinct vector.
pub fn enumerate_bne_small(game: &GameSpec) -> Result<Enumeration, EnumerateError> {
    if game.num_players() != 2 {
        return Err(EnumerateError::UnsupportedShape(game.num_players()));
    }
    let first = walk(game, None)?;
    let side0 = build_side(game, 0, &first.seen[0]);
    let side1 = build_side(game, 1, &first.seen[1]);
    for side in [&side0, &side1] {
        if side.params > MAX_BEHAVIORAL_PARAMS {
            return Err(EnumerateError::TooLarge(format!(
                "player {} has {} behavioral parameters, cap is {}",
                side.player, side.params, MAX_BEHAVIORAL_PARAMS
            )));
        }
    }
    let WalkOutput { coeff, .. } = walk(game, Some((&side0, &side1)))?;
    // Side B solves over player 0's plan; its coefficient view is transposed.
    let coeff1t: Vec<Vec<f64>> = (0..side1.seq_count)
        .map(|s1| (0..side0.seq_count).map(|s0| coeff[1][s0][s1]).collect())
        .collect();

    let sizes: Vec<usize> =
        side0.actions.iter().chain(&side1.actions).copied().collect();
    let mut patterns = Patterns::new(sizes);
    if patterns.count() > MAX_PATTERNS {
        return Err(EnumerateError::TooLarge(format!(
            "{:.0} support patterns exceed the cap of {:.0}",
            patterns.count(),
            MAX_PATTERNS
        )));
    }

    let n0 = side0.infosets.len();
    let mut out = Enumeration {
        equilibria: Vec::new(),
        payoffs: Vec::new(),
        patterns_examined: 0,
    };
    while let Some(masks) = patterns.next() {
        out.patterns_examined += 1;
        let sup0: SidePattern = (0..n0)
            .map(|i| mask_to_support(masks[i], side0.actions[i]))
            .collect();
        let sup1: SidePattern = (0..side1.infosets.len())
            .map(|j| mask_to_support(masks[n0 + j], side1.actions[j]))
            .collect();
        let a_solutions = side_solutions(&side0, &side1, &coeff[0], &sup0, &sup1);
        if a_solutions.is_empty() {
            continue;
        }
        let b_solutions = side_solutions(&side1, &side0, &coeff1t, &sup1, &sup0);
        for (y1, j2) in &b_solutions {
            for (y2, j1) in &a_solutions {
                let payoffs = vec![*j1, *j2];
                if out
                    .payoffs
                    .iter()
                    .any(|p| p.iter().zip(&payoffs).all(|(&a, &b)| (a - b).abs() <= PAYOFF_DEDUP))
                {
                    continue;
                }
                let profile = StrategyProfile {
                    strategies: vec![
                        plan_to_behavioral(game, &side0, &sup0, y1),
                        plan_to_behavioral(game, &side1, &sup1, y2),
                    ],
                };
                let report = verify_bne(game, &profile, 1e-7)?;
                if !report.is_equilibrium {
                    continue;
                }
                out.payoffs.push(payoffs.clone());
                out.equilibria.push(EnumeratedEquilibrium { payoffs, profile });
            }
        }
    }
    let mut order: Vec<usize> = (0..out.payoffs.len()).collect();
    order.sort_by(|&a, &b| out.payoffs[a].partial_cmp(&out.payoffs[b]).unwrap());
    out.payoffs = order.iter().map(|&i| out.payoffs[i].clone()).collect();
    out.equilibria = order.iter().map(|&i| out.equilibria[i].clone()).collect();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{build_example, FixtureRequest};
    use crate::game::compute_payoffs;

    fn contains(payoffs: &[Vec<f64>], target: &[f64], tol: f64) -> bool {
        payoffs
            .iter()
            .any(|p| p.iter().zip(target).all(|(&a, &b)| (a - b).abs() <= tol))
    }

    #[test]
    fn leader_follower_has_both_payoff_vectors() {
        let fx = build_example(&FixtureRequest::Example1).unwrap();
        let found = enumerate_bne_small(&fx.game).unwrap();
        assert!(contains(&found.payoffs, &[2.0, -1.0], 1e-9));
        assert!(contains(&found.payoffs, &[1.0, 0.0], 1e-9));
        for eq in &found.equilibria {
            let j = compute_payoffs(&fx.game, &eq.profile).unwrap().total;
            assert!(j.iter().zip(&eq.payoffs).all(|(&a, &b)| (a - b).abs() <= 1e-9));
        }
    }

    #[test]
    fn signaling_game_has_a_unique_equilibrium_payoff() {
        for c in [0.1, 0.2] {
            let fx =
                build_example(&FixtureRequest::Example3 { c }).unwrap();
            let found = enumerate_bne_small(&fx.game).unwrap();
            assert_eq!(found.payoffs.len(), 1, "c={c}: {:?}", found.payoffs);
            let expect = c / 2.0 + 2.0 / 3.0;
            assert!((found.payoffs[0][0] - expect).abs() <= 1e-9);
            assert!((found.payoffs[0][1] + expect).abs() <= 1e-9);
        }
    }
}
