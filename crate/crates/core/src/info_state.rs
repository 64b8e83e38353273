//! Sufficiency checks for history compressions.
//!
//! A player's summary is an *information state* against a fixed strategy
//! choice of the others if the summary plus the current action predicts both
//! the next summary and the expected reward, no matter which full history
//! produced the summary and no matter how the player themself plays. The
//! checks here come in three strengths:
//!
//! - [`check_information_state`]: exact check against one fixed opponent
//!   profile, optionally for several players' rewards at once; on success it
//!   returns the induced transition and reward tables.
//! - [`check_msi`]: every player's summary must stay an information state
//!   when the others play any strategy measurable in *their* summaries. The
//!   opponent space is infinite, so it is probed with seeded fully mixed
//!   samples; "holds" verdicts are reported as sampled.
//! - [`check_usi`]: one player's summary must split the conditional law of
//!   the whole system, `Pr(x_t, h_t | k_t^i)`, into an own-history factor
//!   that only the player's own strategy moves and an environment factor
//!   that only the others move. Again probed with seeded samples.
//!
//! Admissibility convention: conditioning cells with zero probability under
//! the sampled fully mixed profiles are skipped. Such cells are unreachable
//! under *every* strategy, so no requirement applies to them. Joint cells
//! that never co-occur (for example a summary paired with a history it never
//! produces) simply carry probability zero inside the tables.

use crate::game::{
    conditional_table, BehavioralStrategy, CompressionProfile, CondError, CondRow, GameSpec,
    KStrategy, RowStatus, StrategyProfile, Var,
};
use crate::num::{max_abs_diff, TOL_WITNESS};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Sampling plan for the strategy-quantified checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    /// Sampled strategy profiles per player and test.
    pub samples: usize,
    /// Per-action probability floor of the sampled strategies.
    pub mix_floor: f64,
    pub seed: u64,
    /// Maximum tolerated drift between conditionals that must agree.
    pub tol: f64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig { samples: 20, mix_floor: 0.05, seed: 0, tol: TOL_WITNESS }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    /// Exactly verified against the given opponents.
    Holds,
    /// No violation across all sampled strategy profiles.
    HoldsSampled,
    /// A concrete violation was found; see the witness.
    Fails,
}

impl Verdict {
    pub fn holds(self) -> bool {
        matches!(self, Verdict::Holds | Verdict::HoldsSampled)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Holds => write!(f, "holds"),
            Verdict::HoldsSampled => write!(f, "holds (sampled)"),
            Verdict::Fails => write!(f, "fails"),
        }
    }
}

/// Which conditional drifted across histories with the same summary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DriftKind {
    /// Distribution of the next summary.
    Transition,
    /// Expected stage reward of `player`.
    Reward { player: usize },
}

/// Two histories with the same summary whose conditionals disagree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InfoStateWitness {
    pub player: usize,
    pub t: usize,
    pub kind: DriftKind,
    pub summary: usize,
    pub action: usize,
    pub history_a: usize,
    pub history_b: usize,
    /// Conditional at `history_a` (a distribution, or a single expectation).
    pub value_a: Vec<f64>,
    pub value_b: Vec<f64>,
    pub deviation: f64,
}

impl InfoStateWitness {
    pub fn describe(&self, game: &GameSpec) -> String {
        let what = match self.kind {
            DriftKind::Transition => "next-summary distribution".to_string(),
            DriftKind::Reward { player } => {
                format!("expected reward of {}", game.player_name(player))
            }
        };
        format!(
            "stage {}: histories {} and {} of {} share summary {} but under action {} their {} differs by {:.3e}",
            self.t,
            game.history_label(self.player, self.t, self.history_a),
            game.history_label(self.player, self.t, self.history_b),
            game.player_name(self.player),
            self.summary,
            self.action,
            what,
            self.deviation,
        )
    }
}

/// Summary-level transition and reward tables induced by a profile under
/// which the summary is an information state. Rows at unreachable summaries
/// are filled with uniform transitions and zero rewards so that dynamic
/// programs stay total; `reachable` marks which rows are genuine.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InducedTables {
    pub player: usize,
    pub payoff_players: Vec<usize>,
    /// `reachable[t-1][k]` for `t = 1..=T`.
    pub reachable: Vec<Vec<bool>>,
    /// `transitions[t-1][k][u]` is a distribution over summaries at `t+1`,
    /// for `t = 1..T` (empty when the horizon is 1).
    pub transitions: Vec<Vec<Vec<Vec<f64>>>>,
    /// `rewards[j][t-1][k][u]` is the expected stage-`t` reward of
    /// `payoff_players[j]`.
    pub rewards: Vec<Vec<Vec<Vec<f64>>>>,
}

/// Result of the exact single-profile check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InfoStateCheck {
    pub player: usize,
    pub payoff_players: Vec<usize>,
    pub verdict: Verdict,
    /// Largest drift seen between conditionals that must agree.
    pub deviation: f64,
    pub witness: Option<InfoStateWitness>,
    pub tables: Option<InducedTables>,
}

fn admissible(row: &CondRow) -> bool {
    matches!(row.status, RowStatus::Admissible { .. })
}

/// Exact check that `player`'s summary is an information state for the
/// rewards of `payoff_players` when the others play `opponents`. The
/// player's own slot in `opponents` is ignored: conditionals given an own
/// history never depend on the own strategy, so one fully mixed reference
/// covers every own strategy that reaches the history.
pub fn check_information_state(
    game: &GameSpec,
    comps: &CompressionProfile,
    player: usize,
    opponents: &StrategyProfile,
    payoff_players: &[usize],
    tol: f64,
) -> Result<InfoStateCheck, CondError> {
    if player >= game.num_players() {
        return Err(CondError::Shape(format!("no player {player}")));
    }
    if payoff_players.is_empty() {
        return Err(CondError::Shape("need at least one payoff player".into()));
    }
    let reference = opponents.with(player, BehavioralStrategy::uniform(game, player));
    let comp = comps.get(player);
    let maps = comp.history_map(game);
    let horizon = game.horizon();

    let fail = |deviation: f64, witness: InfoStateWitness| InfoStateCheck {
        player,
        payoff_players: payoff_players.to_vec(),
        verdict: Verdict::Fails,
        deviation,
        witness: Some(witness),
        tables: None,
    };

    let mut deviation = 0.0f64;
    let mut reachable = Vec::with_capacity(horizon);
    let mut transitions = Vec::new();
    let mut rewards: Vec<Vec<Vec<Vec<f64>>>> = vec![Vec::new(); payoff_players.len()];

    for t in 1..=horizon {
        let kn = comp.space(t).len();
        let un = game.action_space(t, player).len();
        let map = &maps[t - 1];
        let mut reach = vec![false; kn];

        for (jp, &j) in payoff_players.iter().enumerate() {
            let table = conditional_table(
                game,
                &reference,
                Some(comps),
                t,
                &[Var::Reward { player: j }],
                &[Var::History { player, time: t }, Var::Action { player }],
            )?;
            let dom = &table.reward_domains[0];
            let mut rep: Vec<Vec<Option<(usize, f64)>>> = vec![vec![None; un]; kn];
            let mut tab = vec![vec![0.0f64; un]; kn];
            for row in &table.rows {
                if !admissible(row) {
                    continue;
                }
                let (h, u) = (row.given[0], row.given[1]);
                let k = map[h];
                reach[k] = true;
                let e: f64 = row.probs.iter().zip(dom).map(|(p, v)| p * v).sum();
                match rep[k][u] {
                    None => {
                        rep[k][u] = Some((h, e));
                        tab[k][u] = e;
                    }
                    Some((h0, e0)) => {
                        let d = (e - e0).abs();
                        deviation = deviation.max(d);
                        if d > tol {
                            return Ok(fail(
                                deviation,
                                InfoStateWitness {
                                    player,
                                    t,
                                    kind: DriftKind::Reward { player: j },
                                    summary: k,
                                    action: u,
                                    history_a: h0,
                                    history_b: h,
                                    value_a: vec![e0],
                                    value_b: vec![e],
                                    deviation: d,
                                },
                            ));
                        }
                    }
                }
            }
            rewards[jp].push(tab);
        }

        if t < horizon {
            let table = conditional_table(
                game,
                &reference,
                Some(comps),
                t,
                &[Var::Compressed { player, time: t + 1 }],
                &[Var::History { player, time: t }, Var::Action { player }],
            )?;
            let kn_next = comp.space(t + 1).len();
            let mut rep: Vec<Vec<Option<usize>>> = vec![vec![None; un]; kn];
            let mut tab = vec![vec![vec![1.0 / kn_next as f64; kn_next]; un]; kn];
            for row in &table.rows {
                if !admissible(row) {
                    continue;
                }
                let (h, u) = (row.given[0], row.given[1]);
                let k = map[h];
                match rep[k][u] {
                    None => {
                        rep[k][u] = Some(h);
                        tab[k][u] = row.probs.clone();
                    }
                    Some(h0) => {
                        let d = max_abs_diff(&tab[k][u], &row.probs);
                        deviation = deviation.max(d);
                        if d > tol {
                            return Ok(fail(
                                deviation,
                                InfoStateWitness {
                                    player,
                                    t,
                                    kind: DriftKind::Transition,
                                    summary: k,
                                    action: u,
                                    history_a: h0,
                                    history_b: h,
                                    value_a: tab[k][u].clone(),
                                    value_b: row.probs.clone(),
                                    deviation: d,
                                },
                            ));
                        }
                    }
                }
            }
            transitions.push(tab);
        }
        reachable.push(reach);
    }

    Ok(InfoStateCheck {
        player,
        payoff_players: payoff_players.to_vec(),
        verdict: Verdict::Holds,
        deviation,
        witness: None,
        tables: Some(InducedTables {
            player,
            payoff_players: payoff_players.to_vec(),
            reachable,
            transitions,
            rewards,
        }),
    })
}

/// SplitMix-style finalizer; keeps per-sample streams independent of the
/// order in which checks run.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn sample_rng(seed: u64, player: usize, test: u64, sample: usize) -> ChaCha20Rng {
    let z = seed
        ^ mix64(0x5B1C_E523 ^ (player as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
        ^ mix64(test.wrapping_mul(0xD1B5_4A32_D192_ED03).wrapping_add(sample as u64));
    ChaCha20Rng::seed_from_u64(mix64(z))
}

/// Opponent draw for one sample: fully mixed summary-measurable strategies
/// for everyone except `player`, expanded onto full histories.
fn sampled_k_opponents(
    game: &GameSpec,
    comps: &CompressionProfile,
    player: usize,
    floor: f64,
    rng: &mut ChaCha20Rng,
) -> (StrategyProfile, Vec<KStrategy>) {
    let mut profile = StrategyProfile::uniform(game);
    let mut drawn = Vec::new();
    for j in 0..game.num_players() {
        if j == player {
            continue;
        }
        let k = KStrategy::sample_mixed(game, comps.get(j), j, floor, rng);
        profile = profile.with(j, k.expand(game, comps.get(j)));
        drawn.push(k);
    }
    (profile, drawn)
}

/// Failing sample of the mutual check: the drawn opponent strategies (in
/// player order, the checked player omitted) and the exact drift.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MsiWitness {
    pub sample: usize,
    pub opponents: Vec<KStrategy>,
    pub inner: InfoStateWitness,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MsiReport {
    pub verdict: Verdict,
    pub config: SamplerConfig,
    pub deviation: f64,
    pub witness: Option<MsiWitness>,
}

/// Mutual sufficiency: for every player, the summary must remain an
/// information state whenever the others play summary-measurable strategies.
/// Probes `config.samples` fully mixed draws per player.
pub fn check_msi(
    game: &GameSpec,
    comps: &CompressionProfile,
    config: &SamplerConfig,
) -> Result<MsiReport, CondError> {
    let mut deviation = 0.0f64;
    for i in 0..game.num_players() {
        for s in 0..config.samples {
            let mut rng = sample_rng(config.seed, i, 1, s);
            let (profile, drawn) =
                sampled_k_opponents(game, comps, i, config.mix_floor, &mut rng);
            let check = check_information_state(game, comps, i, &profile, &[i], config.tol)?;
            deviation = deviation.max(check.deviation);
            if let Some(inner) = check.witness {
                return Ok(MsiReport {
                    verdict: Verdict::Fails,
                    config: config.clone(),
                    deviation,
                    witness: Some(MsiWitness { sample: s, opponents: drawn, inner }),
                });
            }
        }
    }
    Ok(MsiReport {
        verdict: Verdict::HoldsSampled,
        config: config.clone(),
        deviation,
        witness: None,
    })
}

/// Two conditioning cells (history and sample index each) with the same
/// summary whose system beliefs disagree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeliefWitness {
    pub player: usize,
    pub t: usize,
    pub summary: usize,
    pub sample_a: usize,
    pub history_a: usize,
    pub sample_b: usize,
    pub history_b: usize,
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeliefReport {
    pub verdict: Verdict,
    pub config: SamplerConfig,
    pub deviation: f64,
    pub witness: Option<BeliefWitness>,
}

/// Sufficient condition for mutual sufficiency: each player's belief over
/// the state and the others' summaries, given the full own history, must be
/// one fixed function of the own summary, independent of the (sampled,
/// summary-measurable) opponent strategies.
pub fn check_msi_belief_condition(
    game: &GameSpec,
    comps: &CompressionProfile,
    config: &SamplerConfig,
) -> Result<BeliefReport, CondError> {
    let n = game.num_players();
    let mut deviation = 0.0f64;
    for i in 0..n {
        let comp = comps.get(i);
        let maps = comp.history_map(game);
        let mut targets = vec![Var::State { time: 0 }];
        for j in 0..n {
            if j != i {
                targets.push(Var::Compressed { player: j, time: 0 });
            }
        }
        for t in 1..=game.horizon() {
            for v in targets.iter_mut() {
                match v {
                    Var::State { time } => *time = t,
                    Var::Compressed { time, .. } => *time = t,
                    _ => unreachable!(),
                }
            }
            // rep[k] = (sample, history, belief) from the first admissible cell.
            let mut rep: Vec<Option<(usize, usize, Vec<f64>)>> = vec![None; comp.space(t).len()];
            for s in 0..config.samples {
                let mut rng = sample_rng(config.seed, i, 2, s);
                let (profile, _) =
                    sampled_k_opponents(game, comps, i, config.mix_floor, &mut rng);
                let reference = profile.with(i, BehavioralStrategy::uniform(game, i));
                let table = conditional_table(
                    game,
                    &reference,
                    Some(comps),
                    t,
                    &targets,
                    &[Var::History { player: i, time: t }],
                )?;
                for row in &table.rows {
                    if !admissible(row) {
                        continue;
                    }
                    let h = row.given[0];
                    let k = maps[t - 1][h];
                    match &rep[k] {
                        None => rep[k] = Some((s, h, row.probs.clone())),
                        Some((s0, h0, probs0)) => {
                            let d = max_abs_diff(probs0, &row.probs);
                            deviation = deviation.max(d);
                            if d > config.tol {
                                return Ok(BeliefReport {
                                    verdict: Verdict::Fails,
                                    config: config.clone(),
                                    deviation,
                                    witness: Some(BeliefWitness {
                                        player: i,
                                        t,
                                        summary: k,
                                        sample_a: *s0,
                                        history_a: *h0,
                                        sample_b: s,
                                        history_b: h,
                                        deviation: d,
                                    }),
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(BeliefReport {
        verdict: Verdict::HoldsSampled,
        config: config.clone(),
        deviation,
        witness: None,
    })
}

/// How a unilateral-sufficiency probe failed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum UsiFailure {
    /// The joint law given the summary is not a product at this cell.
    Factorization { sample: usize, own: usize, env: usize },
    /// The own-history factor moved although only the others' strategies
    /// changed between the two samples.
    OwnFactorDrifts { sample_a: usize, sample_b: usize, own: usize },
    /// The environment factor moved although only the player's own strategy
    /// changed between the two samples.
    EnvironmentFactorDrifts { sample_a: usize, sample_b: usize, env: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UsiWitness {
    pub player: usize,
    pub t: usize,
    pub summary: usize,
    pub failure: UsiFailure,
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UsiReport {
    pub player: usize,
    pub verdict: Verdict,
    pub config: SamplerConfig,
    pub deviation: f64,
    pub witness: Option<UsiWitness>,
}

/// Unilateral sufficiency of `player`'s summary: conditioned on the summary,
/// the full system law must factor into (own history) x (state and others'
/// histories), with the own factor driven only by the own strategy and the
/// environment factor only by the others'. Three sampled probes:
/// factorization per profile, own-factor invariance under opponent changes,
/// and environment-factor invariance under own changes. All probes use fully
/// mixed behavioral strategies on full histories.
pub fn check_usi(
    game: &GameSpec,
    comps: &CompressionProfile,
    player: usize,
    config: &SamplerConfig,
) -> Result<UsiReport, CondError> {
    let n = game.num_players();
    if player >= n {
        return Err(CondError::Shape(format!("no player {player}")));
    }
    let comp = comps.get(player);
    let mut deviation = 0.0f64;

    let mixed_profile = |test: u64, sample: usize,
                         base_own: Option<&BehavioralStrategy>,
                         base_env: Option<&StrategyProfile>|
     -> StrategyProfile {
        let mut rng = sample_rng(config.seed, player, test, sample);
        let mut profile = match base_env {
            Some(p) => p.clone(),
            None => StrategyProfile::uniform(game),
        };
        if base_env.is_none() {
            for j in 0..n {
                if j != player {
                    let s = BehavioralStrategy::sample_mixed(game, j, config.mix_floor, &mut rng);
                    profile = profile.with(j, s);
                }
            }
        }
        match base_own {
            Some(s) => profile = profile.with(player, s.clone()),
            None => {
                let s = BehavioralStrategy::sample_mixed(game, player, config.mix_floor, &mut rng);
                profile = profile.with(player, s);
            }
        }
        profile
    };

    // Fixed counterparts for the invariance probes, drawn once.
    let base_own = {
        let mut rng = sample_rng(config.seed, player, 3, usize::MAX);
        BehavioralStrategy::sample_mixed(game, player, config.mix_floor, &mut rng)
    };
    let base_env = {
        let mut rng = sample_rng(config.seed, player, 4, usize::MAX);
        let mut profile = StrategyProfile::uniform(game);
        for j in 0..n {
            if j != player {
                let s = BehavioralStrategy::sample_mixed(game, j, config.mix_floor, &mut rng);
                profile = profile.with(j, s);
            }
        }
        profile
    };

    for t in 1..=game.horizon() {
        let kn = comp.space(t).len();
        let own_n = game.history_count(player, t);
        let mut env_vars: Vec<Var> = vec![Var::State { time: t }];
        for j in 0..n {
            if j != player {
                env_vars.push(Var::History { player: j, time: t });
            }
        }

        // Probe 1: product structure under jointly varying strategies.
        let mut joint_targets = vec![Var::History { player, time: t }];
        joint_targets.extend(env_vars.iter().cloned());
        for s in 0..config.samples {
            let profile = mixed_profile(5, s, None, None);
            let table = conditional_table(
                game,
                &profile,
                Some(comps),
                t,
                &joint_targets,
                &[Var::Compressed { player, time: t }],
            )?;
            let env_n = table.target_sizes[1..].iter().product::<usize>();
            for row in &table.rows {
                if !admissible(row) {
                    continue;
                }
                let k = row.given[0];
                let mut own_marg = vec![0.0f64; own_n];
                let mut env_marg = vec![0.0f64; env_n];
                for own in 0..own_n {
                    for env in 0..env_n {
                        let p = row.probs[own * env_n + env];
                        own_marg[own] += p;
                        env_marg[env] += p;
                    }
                }
                for own in 0..own_n {
                    for env in 0..env_n {
                        let d = (row.probs[own * env_n + env] - own_marg[own] * env_marg[env])
                            .abs();
                        deviation = deviation.max(d);
                        if d > config.tol {
                            return Ok(UsiReport {
                                player,
                                verdict: Verdict::Fails,
                                config: config.clone(),
                                deviation,
                                witness: Some(UsiWitness {
                                    player,
                                    t,
                                    summary: k,
                                    failure: UsiFailure::Factorization { sample: s, own, env },
                                    deviation: d,
                                }),
                            });
                        }
                    }
                }
            }
        }

        // Probe 2: own-history factor must ignore opponent changes.
        let mut rep_own: Vec<Option<(usize, Vec<f64>)>> = vec![None; kn];
        for s in 0..config.samples {
            let profile = mixed_profile(6, s, Some(&base_own), None);
            let table = conditional_table(
                game,
                &profile,
                Some(comps),
                t,
                &[Var::History { player, time: t }],
                &[Var::Compressed { player, time: t }],
            )?;
            for row in &table.rows {
                if !admissible(row) {
                    continue;
                }
                let k = row.given[0];
                match &rep_own[k] {
                    None => rep_own[k] = Some((s, row.probs.clone())),
                    Some((s0, probs0)) => {
                        let d = max_abs_diff(probs0, &row.probs);
                        deviation = deviation.max(d);
                        if d > config.tol {
                            let own = worst_index(probs0, &row.probs);
                            return Ok(UsiReport {
                                player,
                                verdict: Verdict::Fails,
                                config: config.clone(),
                                deviation,
                                witness: Some(UsiWitness {
                                    player,
                                    t,
                                    summary: k,
                                    failure: UsiFailure::OwnFactorDrifts {
                                        sample_a: *s0,
                                        sample_b: s,
                                        own,
                                    },
                                    deviation: d,
                                }),
                            });
                        }
                    }
                }
            }
        }

        // Probe 3: environment factor must ignore own changes.
        let mut rep_env: Vec<Option<(usize, Vec<f64>)>> = vec![None; kn];
        for s in 0..config.samples {
            let profile = mixed_profile(7, s, None, Some(&base_env));
            let table = conditional_table(
                game,
                &profile,
                Some(comps),
                t,
                &env_vars,
                &[Var::Compressed { player, time: t }],
            )?;
            for row in &table.rows {
                if !admissible(row) {
                    continue;
                }
                let k = row.given[0];
                match &rep_env[k] {
                    None => rep_env[k] = Some((s, row.probs.clone())),
                    Some((s0, probs0)) => {
                        let d = max_abs_diff(probs0, &row.probs);
                        deviation = deviation.max(d);
                        if d > config.tol {
                            let env = worst_index(probs0, &row.probs);
                            return Ok(UsiReport {
                                player,
                                verdict: Verdict::Fails,
                                config: config.clone(),
                                deviation,
                                witness: Some(UsiWitness {
                                    player,
                                    t,
                                    summary: k,
                                    failure: UsiFailure::EnvironmentFactorDrifts {
                                        sample_a: *s0,
                                        sample_b: s,
                                        env,
                                    },
                                    deviation: d,
                                }),
                            });
                        }
                    }
                }
            }
        }
    }

    Ok(UsiReport {
        player,
        verdict: Verdict::HoldsSampled,
        config: config.clone(),
        deviation,
        witness: None,
    })
}

fn worst_index(a: &[f64], b: &[f64]) -> usize {
    let mut best = 0;
    let mut bd = -1.0f64;
    for (i, (x, y)) in a.iter().zip(b).enumerate() {
        let d = (x - y).abs();
        if d > bd {
            bd = d;
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{build_example, FixtureRequest};

    fn quick_config() -> SamplerConfig {
        SamplerConfig { samples: 4, ..SamplerConfig::default() }
    }

    #[test]
    fn leader_follower_summaries_are_mutually_sufficient() {
        let fx = build_example(&FixtureRequest::Example1).unwrap();
        let report = check_msi(&fx.game, &fx.compressions, &quick_config()).unwrap();
        assert_eq!(report.verdict, Verdict::HoldsSampled);
        assert!(report.deviation <= 1e-9);
    }

    #[test]
    fn constant_follower_summary_is_not_unilaterally_sufficient() {
        let fx = build_example(&FixtureRequest::Example1).unwrap();
        let alice = check_usi(&fx.game, &fx.compressions, 0, &quick_config()).unwrap();
        assert_eq!(alice.verdict, Verdict::HoldsSampled);
        let bob = check_usi(&fx.game, &fx.compressions, 1, &quick_config()).unwrap();
        assert_eq!(bob.verdict, Verdict::Fails);
        let w = bob.witness.expect("failure must come with a witness");
        assert_eq!(w.t, 2);
    }

    #[test]
    fn induced_tables_cover_reachable_rows() {
        let fx = build_example(&FixtureRequest::Example1).unwrap();
        let profile = StrategyProfile::uniform(&fx.game);
        let check = check_information_state(&fx.game, &fx.compressions, 1, &profile, &[1], 1e-9)
            .unwrap();
        assert_eq!(check.verdict, Verdict::Holds);
        let tables = check.tables.unwrap();
        // Bob's summary is constant; his stage-2 reward is 0 either way.
        assert!(tables.reachable[1][0]);
        assert!(tables.rewards[0][1][0].iter().all(|&r| r.abs() <= 1e-12));
        // Transition from the stage-1 summary is well defined.
        assert!((tables.transitions[0][0][0][0] - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn belief_condition_holds_for_state_summary_game() {
        let fx = build_example(&FixtureRequest::MaskinTirole(
            crate::fixtures::MaskinTiroleParams::standard(2),
        ))
        .unwrap();
        let report =
            check_msi_belief_condition(&fx.game, &fx.compressions, &quick_config()).unwrap();
        assert_eq!(report.verdict, Verdict::HoldsSampled);
    }
}
