//! Replacing full-history strategies with summary-based ones.
//!
//! When a player's summary is unilaterally sufficient, the player can mimic
//! any full-history strategy with the summary strategy that plays the
//! history strategy's action mix conditioned on the summary. The swap leaves
//! every player's payoff unchanged against every opposing profile, so
//! swapping players one at a time carries an equilibrium on full histories
//! to an equilibrium on summaries. The chain is re-verified at the end
//! rather than trusted.

use super::br_eps::EpsSchedule;
use super::se::{canonical_tremble, verify_se_canonical, SeReport};
use super::{expand_k_profile, verify_bne, EquilibriumReport};
use crate::game::{
    conditional_table, CompressionProfile, CondError, GameSpec, KStrategy, RowStatus,
    StrategyProfile, Var,
};
use crate::info_state::{check_usi, SamplerConfig, UsiWitness};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TransferError {
    #[error(transparent)]
    Cond(#[from] CondError),
    #[error("player {player}'s summary is not unilaterally sufficient (deviation {deviation})")]
    NotUnilaterallySufficient {
        player: usize,
        deviation: f64,
        witness: Option<Box<UsiWitness>>,
    },
}

/// The summary strategy that mimics `profile`'s strategy for `player`:
/// at each summary, play the profile's action mix averaged over the
/// histories behind that summary. The average is taken under the player's
/// own strategy with everyone else fully mixed, so it only reflects own
/// play; summaries no own strategy can reach get uniform rows.
pub fn usi_replace(
    game: &GameSpec,
    comps: &CompressionProfile,
    player: usize,
    profile: &StrategyProfile,
) -> Result<KStrategy, CondError> {
    let own = profile.get(player);
    let reference = StrategyProfile::uniform(game).with(player, own.clone());
    let comp = comps.get(player);
    let mut tables = Vec::with_capacity(game.horizon());
    for t in 1..=game.horizon() {
        let kn = comp.space(t).len();
        let un = game.action_space(t, player).len();
        let table = conditional_table(
            game,
            &reference,
            Some(comps),
            t,
            &[Var::History { player, time: t }],
            &[Var::Compressed { player, time: t }],
        )?;
        let mut rows = vec![vec![1.0 / un as f64; un]; kn];
        for trow in &table.rows {
            if matches!(trow.status, RowStatus::Inadmissible) {
                continue;
            }
            let k = trow.given[0];
            let mut mix = vec![0.0f64; un];
            for (h, &ph) in trow.probs.iter().enumerate() {
                if ph == 0.0 {
                    continue;
                }
                for (u, m) in mix.iter_mut().enumerate() {
                    *m += ph * own.prob(t, h, u);
                }
            }
            rows[k] = mix;
        }
        tables.push(rows);
    }
    Ok(KStrategy { player, tables })
}

#[derive(Clone, Debug)]
pub struct TransferOutcome {
    pub strategies: Vec<KStrategy>,
    /// The fully swapped profile, expanded back onto histories.
    pub profile: StrategyProfile,
    pub report: EquilibriumReport,
}

fn require_usi(
    game: &GameSpec,
    comps: &CompressionProfile,
    sampler: &SamplerConfig,
) -> Result<(), TransferError> {
    for i in 0..game.num_players() {
        let rep = check_usi(game, comps, i, sampler)?;
        if !rep.verdict.holds() {
            return Err(TransferError::NotUnilaterallySufficient {
                player: i,
                deviation: rep.deviation,
                witness: rep.witness.map(Box::new),
            });
        }
    }
    Ok(())
}

fn replace_chain(
    game: &GameSpec,
    comps: &CompressionProfile,
    profile: &StrategyProfile,
) -> Result<Vec<KStrategy>, CondError> {
    let mut current = profile.clone();
    let mut out = Vec::with_capacity(game.num_players());
    for i in 0..game.num_players() {
        let rho = usi_replace(game, comps, i, &current)?;
        current = current.with(i, rho.expand(game, comps.get(i)));
        out.push(rho);
    }
    Ok(out)
}

/// Carry an equilibrium on full histories to summaries, one player at a
/// time, gated on every player's summary being unilaterally sufficient.
/// The result is certified against all full-history deviations.
pub fn transfer_bne_via_usi(
    game: &GameSpec,
    comps: &CompressionProfile,
    profile: &StrategyProfile,
    sampler: &SamplerConfig,
    tol: f64,
) -> Result<TransferOutcome, TransferError> {
    require_usi(game, comps, sampler)?;
    let strategies = replace_chain(game, comps, profile)?;
    let expanded = expand_k_profile(game, comps, &strategies);
    let report = verify_bne(game, &expanded, tol)?;
    Ok(TransferOutcome { strategies, profile: expanded, report })
}

#[derive(Clone, Debug)]
pub struct TransferSeOutcome {
    pub strategies: Vec<KStrategy>,
    pub profile: StrategyProfile,
    pub report: EquilibriumReport,
    pub se: SeReport,
}

/// Sequential variant: transfer the trembled profiles at the last two floor
/// points, extrapolate the summary strategies to floor zero, and certify
/// the result both as an equilibrium and under canonical trembles.
pub fn transfer_se_via_usi(
    game: &GameSpec,
    comps: &CompressionProfile,
    profile: &StrategyProfile,
    schedule: &EpsSchedule,
    sampler: &SamplerConfig,
    tol: f64,
) -> Result<TransferSeOutcome, TransferError> {
    require_usi(game, comps, sampler)?;
    let n = schedule.points.len();
    let (eps_prev, eps_last) = if n >= 2 {
        (schedule.points[n - 2], schedule.points[n - 1])
    } else {
        (schedule.points[0], schedule.points[0])
    };
    let at_prev = replace_chain(game, comps, &canonical_tremble(game, profile, eps_prev))?;
    let at_last = if eps_last == eps_prev {
        at_prev.clone()
    } else {
        replace_chain(game, comps, &canonical_tremble(game, profile, eps_last))?
    };
    let strategies: Vec<KStrategy> = at_last
        .iter()
        .zip(&at_prev)
        .map(|(a, b)| {
            let mut out = a.clone();
            for (ti, tbl) in out.tables.iter_mut().enumerate() {
                for (k, row) in tbl.iter_mut().enumerate() {
                    for (u, m) in row.iter_mut().enumerate() {
                        *m = (2.0 * a.tables[ti][k][u] - b.tables[ti][k][u]).max(0.0);
                    }
                    let sum: f64 = row.iter().sum();
                    for m in row.iter_mut() {
                        *m /= sum;
                    }
                }
            }
            out
        })
        .collect();
    let expanded = expand_k_profile(game, comps, &strategies);
    let report = verify_bne(game, &expanded, tol)?;
    let se = verify_se_canonical(game, &expanded, schedule)?;
    Ok(TransferSeOutcome { strategies, profile: expanded, report, se })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{build_example, FixtureRequest};
    use crate::game::compute_payoffs;
    use crate::num::TOL_SOLVER;

    #[test]
    fn mimicking_preserves_payoffs_player_by_player() {
        // Decentralized-control game: both summaries are unilaterally
        // sufficient, so each swap must leave all payoffs unchanged.
        let fx = build_example(&FixtureRequest::Ouyang(
            crate::fixtures::OuyangParams::standard(31),
        ))
        .unwrap();
        let game = &fx.game;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(7);
        let profile = StrategyProfile {
            strategies: (0..game.num_players())
                .map(|i| {
                    crate::game::BehavioralStrategy::sample_mixed(game, i, 0.1, &mut rng)
                })
                .collect(),
        };
        let base = compute_payoffs(game, &profile).unwrap().total;
        let mut current = profile.clone();
        for i in 0..game.num_players() {
            let rho = usi_replace(game, &fx.compressions, i, &current).unwrap();
            current = current.with(i, rho.expand(game, fx.compressions.get(i)));
            let now = compute_payoffs(game, &current).unwrap().total;
            for (a, b) in now.iter().zip(&base) {
                assert!((a - b).abs() <= 1e-9, "payoff drifted: {now:?} vs {base:?}");
            }
        }
    }

    #[test]
    fn transfer_rejects_an_insufficient_summary() {
        // The leader/follower fixture erases bob's summary entirely, which
        // fails unilateral sufficiency for bob.
        let fx = build_example(&FixtureRequest::Example1).unwrap();
        let sampler = SamplerConfig { samples: 4, ..SamplerConfig::default() };
        let err = transfer_bne_via_usi(
            &fx.game,
            &fx.compressions,
            &StrategyProfile::uniform(&fx.game),
            &sampler,
            TOL_SOLVER,
        )
        .unwrap_err();
        match err {
            TransferError::NotUnilaterallySufficient { player, .. } => assert_eq!(player, 1),
            other => panic!("unexpected error {other:?}"),
        }
    }
}
