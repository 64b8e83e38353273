//! Finite-horizon MDPs: backward induction, policy evaluation, and
//! state-space reduction by information-state maps.
//!
//! The solvers in [`crate::equilibrium`] repeatedly reduce one player's view
//! of the game to an MDP over summaries and solve it; this module owns that
//! single-agent core. Everything is dense and exact.

use crate::num::{argmax_first, compensated_sum, is_distribution, TOL_MODEL};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A finite-horizon MDP. Stages run `t = 1..=horizon`; states live at times
/// `1..=horizon+1` (the terminal value is zero).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MdpSpec {
    pub horizon: usize,
    /// `state_counts[time-1]` for times `1..=horizon+1`.
    pub state_counts: Vec<usize>,
    /// `action_counts[t-1]` for stages `1..=horizon`.
    pub action_counts: Vec<usize>,
    /// Initial distribution over time-1 states.
    pub initial: Vec<f64>,
    /// `transitions[t-1][x][u][x']`, rows stochastic.
    pub transitions: Vec<Vec<Vec<Vec<f64>>>>,
    /// `rewards[t-1][x][u]`.
    pub rewards: Vec<Vec<Vec<f64>>>,
}

#[derive(Clone, Debug, PartialEq, Error, Serialize, Deserialize)]
pub enum MdpError {
    #[error("mdp shape mismatch: {0}")]
    Shape(String),
    #[error("mdp row (t={t}, x={x}, u={u}) sums to {sum}, not 1")]
    NotStochastic { t: usize, x: usize, u: usize, sum: f64 },
}

impl MdpSpec {
    pub fn validate(&self) -> Result<(), MdpError> {
        let t_n = self.horizon;
        if self.state_counts.len() != t_n + 1
            || self.action_counts.len() != t_n
            || self.transitions.len() != t_n
            || self.rewards.len() != t_n
        {
            return Err(MdpError::Shape("stage vectors must match the horizon".into()));
        }
        if self.initial.len() != self.state_counts[0] || !is_distribution(&self.initial, TOL_MODEL)
        {
            return Err(MdpError::Shape("initial law must be a distribution over time-1 states".into()));
        }
        for t in 1..=t_n {
            let (xs, us, xs_next) =
                (self.state_counts[t - 1], self.action_counts[t - 1], self.state_counts[t]);
            let (trans, rew) = (&self.transitions[t - 1], &self.rewards[t - 1]);
            if trans.len() != xs || rew.len() != xs {
                return Err(MdpError::Shape(format!("stage {t} tables must have {xs} states")));
            }
            for x in 0..xs {
                if trans[x].len() != us || rew[x].len() != us {
                    return Err(MdpError::Shape(format!(
                        "stage {t} state {x} must have {us} actions"
                    )));
                }
                for u in 0..us {
                    let row = &trans[x][u];
                    if row.len() != xs_next {
                        return Err(MdpError::Shape(format!(
                            "stage {t} row (x={x}, u={u}) must have {xs_next} successors"
                        )));
                    }
                    if !is_distribution(row, TOL_MODEL) {
                        let sum = compensated_sum(row.iter().copied());
                        return Err(MdpError::NotStochastic { t, x, u, sum });
                    }
                }
            }
        }
        Ok(())
    }
}

/// A stochastic Markov policy: `rows[t-1][x][u]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MdpPolicy {
    pub rows: Vec<Vec<Vec<f64>>>,
}

impl MdpPolicy {
    pub fn deterministic(mdp: &MdpSpec, choices: &[Vec<usize>]) -> Self {
        let rows = (1..=mdp.horizon)
            .map(|t| {
                let us = mdp.action_counts[t - 1];
                choices[t - 1]
                    .iter()
                    .map(|&u| {
                        let mut row = vec![0.0; us];
                        row[u] = 1.0;
                        row
                    })
                    .collect()
            })
            .collect();
        MdpPolicy { rows }
    }

    pub fn uniform(mdp: &MdpSpec) -> Self {
        let rows = (1..=mdp.horizon)
            .map(|t| {
                let us = mdp.action_counts[t - 1];
                vec![vec![1.0 / us as f64; us]; mdp.state_counts[t - 1]]
            })
            .collect();
        MdpPolicy { rows }
    }
}

/// Output of [`backward_induction`]: optimal values, action values, and the
/// greedy policy that picks the first maximizing action at every state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DpSolution {
    /// `values[time-1][x]` for times `1..=horizon+1` (terminal row is zero).
    pub values: Vec<Vec<f64>>,
    /// `q[t-1][x][u]`.
    pub q: Vec<Vec<Vec<f64>>>,
    /// `greedy[t-1][x]` is the first argmax action.
    pub greedy: Vec<Vec<usize>>,
}

impl DpSolution {
    /// Expected optimal total reward from the initial distribution.
    pub fn initial_value(&self, mdp: &MdpSpec) -> f64 {
        compensated_sum(mdp.initial.iter().zip(&self.values[0]).map(|(&p, &v)| p * v))
    }
}

/// Exact dynamic programming over the full horizon.
pub fn backward_induction(mdp: &MdpSpec) -> DpSolution {
    let t_n = mdp.horizon;
    let mut values = vec![Vec::new(); t_n + 1];
    values[t_n] = vec![0.0; mdp.state_counts[t_n]];
    let mut q = vec![Vec::new(); t_n];
    let mut greedy = vec![Vec::new(); t_n];
    for t in (1..=t_n).rev() {
        let xs = mdp.state_counts[t - 1];
        let us = mdp.action_counts[t - 1];
        let mut vt = vec![0.0; xs];
        let mut qt = vec![vec![0.0; us]; xs];
        let mut gt = vec![0usize; xs];
        for x in 0..xs {
            for u in 0..us {
                let cont = compensated_sum(
                    mdp.transitions[t - 1][x][u]
                        .iter()
                        .zip(&values[t])
                        .map(|(&p, &v)| p * v),
                );
                qt[x][u] = mdp.rewards[t - 1][x][u] + cont;
            }
            let best = argmax_first(&qt[x]);
            gt[x] = best;
            vt[x] = qt[x][best];
        }
        values[t - 1] = vt;
        q[t - 1] = qt;
        greedy[t - 1] = gt;
    }
    DpSolution { values, q, greedy }
}

/// Values of a fixed stochastic policy at every `(time, state)`, plus the
/// expected total from the initial distribution.
pub fn evaluate(mdp: &MdpSpec, policy: &MdpPolicy) -> (Vec<Vec<f64>>, f64) {
    let t_n = mdp.horizon;
    let mut values = vec![Vec::new(); t_n + 1];
    values[t_n] = vec![0.0; mdp.state_counts[t_n]];
    for t in (1..=t_n).rev() {
        let xs = mdp.state_counts[t - 1];
        let us = mdp.action_counts[t - 1];
        let mut vt = vec![0.0; xs];
        for x in 0..xs {
            let mut total = 0.0;
            for u in 0..us {
                let pu = policy.rows[t - 1][x][u];
                if pu == 0.0 {
                    continue;
                }
                let cont = compensated_sum(
                    mdp.transitions[t - 1][x][u]
                        .iter()
                        .zip(&values[t])
                        .map(|(&p, &v)| p * v),
                );
                total += pu * (mdp.rewards[t - 1][x][u] + cont);
            }
            vt[x] = total;
        }
        values[t - 1] = vt;
    }
    let total =
        compensated_sum(mdp.initial.iter().zip(&values[0]).map(|(&p, &v)| p * v));
    (values, total)
}

/// State occupancies `mu[time-1][x]` under a policy, times `1..=horizon+1`.
pub fn occupancies(mdp: &MdpSpec, policy: &MdpPolicy) -> Vec<Vec<f64>> {
    let t_n = mdp.horizon;
    let mut mu = vec![mdp.initial.clone()];
    for t in 1..=t_n {
        let mut next = vec![0.0; mdp.state_counts[t]];
        for x in 0..mdp.state_counts[t - 1] {
            let m = mu[t - 1][x];
            if m == 0.0 {
                continue;
            }
            for u in 0..mdp.action_counts[t - 1] {
                let w = m * policy.rows[t - 1][x][u];
                if w == 0.0 {
                    continue;
                }
                for (xn, &p) in mdp.transitions[t - 1][x][u].iter().enumerate() {
                    next[xn] += w * p;
                }
            }
        }
        mu.push(next);
    }
    mu
}

/// A surjective relabeling of states into classes, per time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InfoStateMap {
    /// `class_counts[time-1]` for times `1..=horizon+1`.
    pub class_counts: Vec<usize>,
    /// `maps[time-1][x]` is the class of state `x`.
    pub maps: Vec<Vec<usize>>,
}

/// Which table broke the reduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReductionDefectKind {
    Reward,
    Transition,
}

/// Two states mapped to one class disagree on reward or pushed-forward
/// transition, so the map is not an information state.
#[derive(Clone, Debug, PartialEq, Error, Serialize, Deserialize)]
#[error("states {x_a} and {x_b} at t={t} share a class but differ on {kind:?} under action {action}")]
pub struct NotAnInformationState {
    pub t: usize,
    pub x_a: usize,
    pub x_b: usize,
    pub action: usize,
    pub kind: ReductionDefectKind,
}

/// Collapse states by `map`, checking that rewards and class-level
/// transitions agree across each class (tolerance `1e-12`).
pub fn reduce_by_info_state(
    mdp: &MdpSpec,
    map: &InfoStateMap,
) -> Result<MdpSpec, NotAnInformationState> {
    let t_n = mdp.horizon;
    assert_eq!(map.maps.len(), t_n + 1, "map must cover times 1..=horizon+1");
    // Representative state per class and time.
    let reps: Vec<Vec<Option<usize>>> = (0..=t_n)
        .map(|ti| {
            let mut rep = vec![None; map.class_counts[ti]];
            for (x, &k) in map.maps[ti].iter().enumerate() {
                rep[k].get_or_insert(x);
            }
            rep
        })
        .collect();

    // Class-level pushforward of one state's transition row.
    let push = |t: usize, x: usize, u: usize| -> Vec<f64> {
        let mut row = vec![0.0; map.class_counts[t]];
        for (xn, &p) in mdp.transitions[t - 1][x][u].iter().enumerate() {
            row[map.maps[t][xn]] += p;
        }
        row
    };

    for t in 1..=t_n {
        for x in 0..mdp.state_counts[t - 1] {
            let k = map.maps[t - 1][x];
            let rep = reps[t - 1][k].unwrap();
            if rep == x {
                continue;
            }
            for u in 0..mdp.action_counts[t - 1] {
                if (mdp.rewards[t - 1][x][u] - mdp.rewards[t - 1][rep][u]).abs() > TOL_MODEL {
                    return Err(NotAnInformationState {
                        t,
                        x_a: rep,
                        x_b: x,
                        action: u,
                        kind: ReductionDefectKind::Reward,
                    });
                }
                let (a, b) = (push(t, rep, u), push(t, x, u));
                if a.iter().zip(&b).any(|(&pa, &pb)| (pa - pb).abs() > TOL_MODEL) {
                    return Err(NotAnInformationState {
                        t,
                        x_a: rep,
                        x_b: x,
                        action: u,
                        kind: ReductionDefectKind::Transition,
                    });
                }
            }
        }
    }

    let state_counts = map.class_counts.clone();
    let mut initial = vec![0.0; state_counts[0]];
    for (x, &p) in mdp.initial.iter().enumerate() {
        initial[map.maps[0][x]] += p;
    }
    let mut transitions = Vec::with_capacity(t_n);
    let mut rewards = Vec::with_capacity(t_n);
    for t in 1..=t_n {
        let us = mdp.action_counts[t - 1];
        let mut tr = Vec::with_capacity(state_counts[t - 1]);
        let mut rw = Vec::with_capacity(state_counts[t - 1]);
        for k in 0..state_counts[t - 1] {
            let rep = reps[t - 1][k]
                .unwrap_or_else(|| panic!("class {k} at time {t} has no state mapped to it"));
            tr.push((0..us).map(|u| push(t, rep, u)).collect::<Vec<_>>());
            rw.push((0..us).map(|u| mdp.rewards[t - 1][rep][u]).collect::<Vec<_>>());
        }
        transitions.push(tr);
        rewards.push(rw);
    }
    Ok(MdpSpec {
        horizon: t_n,
        state_counts,
        action_counts: mdp.action_counts.clone(),
        initial,
        transitions,
        rewards,
    })
}

/// Project a full-state policy onto classes by occupancy weighting. Classes
/// never reached under the policy get the uniform row.
pub fn associate_strategy(mdp: &MdpSpec, map: &InfoStateMap, policy: &MdpPolicy) -> MdpPolicy {
    let mu = occupancies(mdp, policy);
    let rows = (1..=mdp.horizon)
        .map(|t| {
            let us = mdp.action_counts[t - 1];
            let mut num = vec![vec![0.0; us]; map.class_counts[t - 1]];
            let mut den = vec![0.0; map.class_counts[t - 1]];
            for x in 0..mdp.state_counts[t - 1] {
                let k = map.maps[t - 1][x];
                den[k] += mu[t - 1][x];
                for u in 0..us {
                    num[k][u] += mu[t - 1][x] * policy.rows[t - 1][x][u];
                }
            }
            num.into_iter()
                .zip(den)
                .map(|(row, d)| {
                    if d > 0.0 {
                        row.into_iter().map(|v| v / d).collect()
                    } else {
                        vec![1.0 / us as f64; us]
                    }
                })
                .collect()
        })
        .collect();
    MdpPolicy { rows }
}

/// Lift a class policy back to full states.
pub fn expand_policy(map: &InfoStateMap, reduced: &MdpPolicy, mdp: &MdpSpec) -> MdpPolicy {
    let rows = (1..=mdp.horizon)
        .map(|t| {
            (0..mdp.state_counts[t - 1])
                .map(|x| reduced.rows[t - 1][map.maps[t - 1][x]].clone())
                .collect()
        })
        .collect();
    MdpPolicy { rows }
}

/// A known-good reduction instance for oracle tests: a base MDP, a blown-up
/// copy where every state is split into labeled duplicates, and the map that
/// collapses the duplicates again.
#[derive(Clone, Debug)]
pub struct DuplicatedInstance {
    pub base: MdpSpec,
    pub full: MdpSpec,
    pub map: InfoStateMap,
}

/// Generate a random base MDP and duplicate its states. Successor mass into
/// a class is split across that class's duplicates by weights that depend on
/// source state and action, so the full MDP is genuinely bigger but still
/// collapses exactly.
pub fn synth_duplicated<R: Rng>(rng: &mut R) -> DuplicatedInstance {
    let horizon = rng.gen_range(2..=4usize);
    let base_counts: Vec<usize> = (0..=horizon).map(|_| rng.gen_range(2..=4usize)).collect();
    let action_counts: Vec<usize> = (0..horizon).map(|_| rng.gen_range(2..=3usize)).collect();

    let rand_dist = |rng: &mut R, n: usize| -> Vec<f64> {
        let mut w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0f64)).collect();
        let s: f64 = w.iter().sum();
        for v in &mut w {
            *v /= s;
        }
        w
    };

    let initial = rand_dist(rng, base_counts[0]);
    let mut transitions = Vec::new();
    let mut rewards = Vec::new();
    for t in 1..=horizon {
        let mut tr = Vec::new();
        let mut rw = Vec::new();
        for _ in 0..base_counts[t - 1] {
            tr.push((0..action_counts[t - 1]).map(|_| rand_dist(rng, base_counts[t])).collect::<Vec<_>>());
            rw.push((0..action_counts[t - 1]).map(|_| rng.gen_range(-1.0..1.0f64)).collect::<Vec<_>>());
        }
        transitions.push(tr);
        rewards.push(rw);
    }
    let base = MdpSpec {
        horizon,
        state_counts: base_counts.clone(),
        action_counts: action_counts.clone(),
        initial,
        transitions,
        rewards,
    };

    // Duplicate: state x at time ti gets copies (x, 0..dup[ti][x]).
    let dups: Vec<Vec<usize>> = (0..=horizon)
        .map(|ti| (0..base_counts[ti]).map(|_| rng.gen_range(1..=3usize)).collect())
        .collect();
    let offsets: Vec<Vec<usize>> = dups
        .iter()
        .map(|d| {
            let mut off = vec![0usize];
            for &c in d {
                off.push(off.last().unwrap() + c);
            }
            off
        })
        .collect();
    let full_counts: Vec<usize> = offsets.iter().map(|off| *off.last().unwrap()).collect();
    let maps: Vec<Vec<usize>> = (0..=horizon)
        .map(|ti| {
            let mut m = Vec::with_capacity(full_counts[ti]);
            for (x, &c) in dups[ti].iter().enumerate() {
                m.extend(std::iter::repeat(x).take(c));
            }
            m
        })
        .collect();

    let mut full_initial = vec![0.0; full_counts[0]];
    for (x, &p) in base.initial.iter().enumerate() {
        let split = rand_dist(rng, dups[0][x]);
        for (j, &w) in split.iter().enumerate() {
            full_initial[offsets[0][x] + j] = p * w;
        }
    }
    let mut full_transitions = Vec::new();
    let mut full_rewards = Vec::new();
    for t in 1..=horizon {
        let us = action_counts[t - 1];
        let mut tr = Vec::with_capacity(full_counts[t - 1]);
        let mut rw = Vec::with_capacity(full_counts[t - 1]);
        for x in 0..base_counts[t - 1] {
            for _ in 0..dups[t - 1][x] {
                let mut rows = Vec::with_capacity(us);
                for u in 0..us {
                    let mut row = vec![0.0; full_counts[t]];
                    for (xn, &p) in base.transitions[t - 1][x][u].iter().enumerate() {
                        // Per-(copy, action) split keeps copies distinguishable
                        // while class totals match the base row exactly.
                        let split = rand_dist(rng, dups[t][xn]);
                        for (j, &w) in split.iter().enumerate() {
                            row[offsets[t][xn] + j] = p * w;
                        }
                    }
                    rows.push(row);
                }
                tr.push(rows);
                rw.push(base.rewards[t - 1][x].clone());
            }
        }
        full_transitions.push(tr);
        full_rewards.push(rw);
    }
    let full = MdpSpec {
        horizon,
        state_counts: full_counts,
        action_counts,
        initial: full_initial,
        transitions: full_transitions,
        rewards: full_rewards,
    };
    let map = InfoStateMap { class_counts: base_counts, maps };
    DuplicatedInstance { base, full, map }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn tiny() -> MdpSpec {
        // Two states, two actions, horizon 2; action 1 in state 0 pays now
        // but strands you in state 1 where everything pays -0.5.
        MdpSpec {
            horizon: 2,
            state_counts: vec![2, 2, 1],
            action_counts: vec![2, 2],
            initial: vec![1.0, 0.0],
            transitions: vec![
                vec![
                    vec![vec![1.0, 0.0], vec![0.0, 1.0]],
                    vec![vec![0.0, 1.0], vec![0.0, 1.0]],
                ],
                vec![
                    vec![vec![1.0], vec![1.0]],
                    vec![vec![1.0], vec![1.0]],
                ],
            ],
            rewards: vec![
                vec![vec![0.0, 0.6], vec![-0.5, -0.5]],
                vec![vec![0.0, 1.0], vec![-0.5, -0.5]],
            ],
        }
    }

    #[test]
    fn backward_induction_prefers_patience() {
        let mdp = tiny();
        mdp.validate().unwrap();
        let sol = backward_induction(&mdp);
        // Waiting (action 0) keeps state 0 and earns 1.0 at stage 2; the
        // greedy 0.6 now is followed by -0.5.
        assert_eq!(sol.greedy[0][0], 0);
        assert!((sol.initial_value(&mdp) - 1.0).abs() < 1e-12);
        let (_, eval_total) = evaluate(&mdp, &MdpPolicy::deterministic(&mdp, &sol.greedy));
        assert!((eval_total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn greedy_breaks_ties_on_first_argmax() {
        let mut mdp = tiny();
        mdp.rewards[1][0] = vec![1.0, 1.0];
        let sol = backward_induction(&mdp);
        assert_eq!(sol.greedy[1][0], 0);
    }

    #[test]
    fn duplicated_instances_reduce_to_their_base() {
        let mut rng = ChaCha20Rng::seed_from_u64(42);
        for _ in 0..10 {
            let inst = synth_duplicated(&mut rng);
            inst.full.validate().unwrap();
            inst.base.validate().unwrap();
            let reduced = reduce_by_info_state(&inst.full, &inst.map).unwrap();
            let a = backward_induction(&reduced).initial_value(&reduced);
            let b = backward_induction(&inst.base).initial_value(&inst.base);
            let c = backward_induction(&inst.full).initial_value(&inst.full);
            assert!((a - b).abs() < 1e-9);
            assert!((a - c).abs() < 1e-9);
        }
    }

    #[test]
    fn broken_reward_is_detected() {
        let mut rng = ChaCha20Rng::seed_from_u64(43);
        let inst = synth_duplicated(&mut rng);
        let mut full = inst.full.clone();
        // Find a duplicated class and perturb one copy's reward.
        let (t, x_perturb) = (1..=inst.full.horizon)
            .flat_map(|t| {
                let m = &inst.map.maps[t - 1];
                m.iter()
                    .enumerate()
                    .filter(move |&(x, &k)| m.iter().position(|&k2| k2 == k).unwrap() != x)
                    .map(move |(x, _)| (t, x))
            })
            .next()
            .expect("generator should produce at least one duplicate");
        full.rewards[t - 1][x_perturb][0] += 0.25;
        let err = reduce_by_info_state(&full, &inst.map).unwrap_err();
        assert_eq!(err.kind, ReductionDefectKind::Reward);
        assert_eq!(err.t, t);
    }

    #[test]
    fn associate_strategy_weights_by_occupancy() {
        let mut rng = ChaCha20Rng::seed_from_u64(44);
        let inst = synth_duplicated(&mut rng);
        let policy = MdpPolicy::uniform(&inst.full);
        let assoc = associate_strategy(&inst.full, &inst.map, &policy);
        // Uniform over copies collapses to uniform over classes.
        for t in 1..=inst.full.horizon {
            for row in &assoc.rows[t - 1] {
                let us = inst.full.action_counts[t - 1] as f64;
                assert!(row.iter().all(|&p| (p - 1.0 / us).abs() < 1e-12));
            }
        }
        // And evaluating the expanded associate in the full MDP matches the
        // reduced evaluation exactly.
        let reduced = reduce_by_info_state(&inst.full, &inst.map).unwrap();
        let (_, v_red) = evaluate(&reduced, &assoc);
        let (_, v_full) = evaluate(&inst.full, &expand_policy(&inst.map, &assoc, &inst.full));
        assert!((v_red - v_full).abs() < 1e-12);
    }
}
