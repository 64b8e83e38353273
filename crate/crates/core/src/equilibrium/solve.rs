//! Summary-based equilibrium solving.
//!
//! For each floor in a decreasing schedule, the solver finds a profile of
//! summary strategies that is a fixed point of the floored best response:
//! every action carrying more than floor mass must be a maximizer of that
//! player's action values. Pure fixed points fall out of a damped vertex
//! iteration; mixed ones are located from averaged iterates and polished by
//! Newton on the indifference system, with exhaustive support-pattern
//! enumeration as a last resort. The last two floor solutions are
//! extrapolated to floor zero and the result is certified against all
//! full-history deviations. Failures are reported, never papered over.

use super::br_eps::{best_response_dp_eps, BadSchedule, BrError, EpsSchedule};
use super::linalg::solve_square;
use super::se::{verify_se_canonical, SeReport};
use super::{expand_k_profile, verify_k_bne, EquilibriumReport};
use crate::game::{CompressionProfile, CondError, GameSpec, KStrategy};
use crate::info_state::check_information_state;
use crate::num::{compensated_sum, max_abs_diff, TOL_SOLVER, TOL_WITNESS};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error(transparent)]
    Br(#[from] BrError),
    #[error(transparent)]
    Cond(#[from] CondError),
    #[error(transparent)]
    Schedule(#[from] BadSchedule),
    #[error("no fixed point found at floor {eps}: {detail}")]
    NoConvergence { eps: f64, detail: String },
    #[error("candidate failed verification: deviation gap {}", .0.max_gap)]
    NotEquilibrium(Box<EquilibriumReport>),
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub schedule: EpsSchedule,
    /// Step size of the vertex iteration.
    pub damping: f64,
    /// Vertex iteration budget per floor point.
    pub max_iters: usize,
    /// Tie tolerance for maximizer sets.
    pub tie_tol: f64,
    /// Deviation-gap tolerance of the final certificate.
    pub tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            schedule: EpsSchedule::standard(),
            damping: 0.5,
            max_iters: 80,
            tie_tol: TOL_WITNESS,
            tol: TOL_SOLVER,
        }
    }
}

/// Which method settled one floor point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FloorStep {
    pub eps: f64,
    pub method: String,
    pub iters: usize,
}

/// One retained fixed point along the floor schedule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FloorPoint {
    pub step: FloorStep,
    pub strategies: Vec<KStrategy>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KBneSolution {
    pub strategies: Vec<KStrategy>,
    pub payoffs: Vec<f64>,
    pub report: EquilibriumReport,
    pub trace: Vec<FloorStep>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KSeSolution {
    pub strategies: Vec<KStrategy>,
    pub payoffs: Vec<f64>,
    pub report: EquilibriumReport,
    pub se: SeReport,
    pub trace: Vec<FloorStep>,
}

/// Support pattern: the allowed actions per reachable row, per player.
type Pattern = Vec<Vec<Vec<Vec<usize>>>>;

struct RowVar {
    player: usize,
    t: usize,
    k: usize,
    support: Vec<usize>,
}

/// On-policy action values over summaries: everyone follows `strategies`,
/// `q[i][t-1][k][u]` is player i's expected remaining reward after forcing
/// `u` at `(t, k)`.
fn on_policy_q(
    game: &GameSpec,
    comps: &CompressionProfile,
    strategies: &[KStrategy],
) -> Result<Vec<Vec<Vec<Vec<f64>>>>, BrError> {
    let expanded = expand_k_profile(game, comps, strategies);
    let horizon = game.horizon();
    let mut out = Vec::with_capacity(strategies.len());
    for (i, own) in strategies.iter().enumerate() {
        let check =
            check_information_state(game, comps, i, &expanded, &[i], TOL_WITNESS)?;
        let tables = match (check.witness, check.tables) {
            (None, Some(tables)) => tables,
            (witness, _) => {
                return Err(BrError::NotInformationState(Box::new(witness.expect(
                    "a failed information-state check reports its witness",
                ))));
            }
        };
        let mut q = vec![Vec::new(); horizon];
        let mut v: Vec<f64> = Vec::new();
        for t in (1..=horizon).rev() {
            let kn = comps.get(i).space(t).len();
            let un = game.action_space(t, i).len();
            let mut qt = vec![vec![0.0f64; un]; kn];
            let mut vt = vec![0.0f64; kn];
            for k in 0..kn {
                for u in 0..un {
                    let mut val = tables.rewards[0][t - 1][k][u];
                    if t < horizon {
                        val += compensated_sum(
                            tables.transitions[t - 1][k][u]
                                .iter()
                                .zip(&v)
                                .map(|(&p, &vk)| p * vk),
                        );
                    }
                    qt[k][u] = val;
                }
                vt[k] = compensated_sum(
                    own.tables[t - 1][k].iter().zip(&qt[k]).map(|(&p, &qv)| p * qv),
                );
            }
            v = vt;
            q[t - 1] = qt;
        }
        out.push(q);
    }
    Ok(out)
}

fn selections(
    game: &GameSpec,
    comps: &CompressionProfile,
    cur: &[KStrategy],
    eps: f64,
    tie_tol: f64,
) -> Result<Vec<KStrategy>, BrError> {
    let mut out = Vec::with_capacity(cur.len());
    for i in 0..cur.len() {
        let br = best_response_dp_eps(game, comps, i, cur, eps, tie_tol)?;
        out.push(KStrategy { player: i, tables: br.selection });
    }
    Ok(out)
}

fn profile_diff(a: &[KStrategy], b: &[KStrategy]) -> f64 {
    let mut worst = 0.0f64;
    for (sa, sb) in a.iter().zip(b) {
        for (ta, tb) in sa.tables.iter().zip(&sb.tables) {
            for (ra, rb) in ta.iter().zip(tb) {
                worst = worst.max(max_abs_diff(ra, rb));
            }
        }
    }
    worst
}

/// The floored fixed-point property: every action above floor mass is a
/// maximizer of the player's current action-value row.
fn is_floored_fixed_point(
    game: &GameSpec,
    comps: &CompressionProfile,
    strategies: &[KStrategy],
    reach: &[Vec<Vec<bool>>],
    eps: f64,
    tie_tol: f64,
) -> Result<bool, BrError> {
    for i in 0..strategies.len() {
        let br = best_response_dp_eps(game, comps, i, strategies, eps, tie_tol)?;
        for t in 1..=game.horizon() {
            for (k, row) in strategies[i].tables[t - 1].iter().enumerate() {
                if !reach[i][t - 1][k] {
                    continue;
                }
                for (u, &p) in row.iter().enumerate() {
                    if p < eps - 1e-9 {
                        return Ok(false);
                    }
                    if p > eps + 1e-9 && !br.argmax[t - 1][k].contains(&u) {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

fn pattern_of(strategies: &[KStrategy], reach: &[Vec<Vec<bool>>], eps: f64) -> Pattern {
    strategies
        .iter()
        .enumerate()
        .map(|(i, s)| {
            s.tables
                .iter()
                .enumerate()
                .map(|(ti, tbl)| {
                    tbl.iter()
                        .enumerate()
                        .map(|(k, row)| {
                            if !reach[i][ti][k] {
                                return Vec::new();
                            }
                            let excess: Vec<f64> =
                                row.iter().map(|&p| p - eps).collect();
                            let top = excess.iter().copied().fold(0.0f64, f64::max);
                            if top <= 1e-9 {
                                (0..row.len()).collect()
                            } else {
                                let sup: Vec<usize> = (0..row.len())
                                    .filter(|&u| excess[u] > 0.25 * top)
                                    .collect();
                                sup
                            }
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

fn vars_of_pattern(game: &GameSpec, pattern: &Pattern) -> Vec<RowVar> {
    let mut rows = Vec::new();
    for (i, per_t) in pattern.iter().enumerate() {
        for (ti, per_k) in per_t.iter().enumerate() {
            let t = ti + 1;
            for (k, support) in per_k.iter().enumerate() {
                if support.len() >= 2 {
                    rows.push(RowVar { player: i, t, k, support: support.clone() });
                }
            }
        }
    }
    let _ = game;
    rows
}

/// Fill strategy rows from the free variables: off-support entries sit at
/// the floor, the last support action absorbs the remaining mass.
fn apply_vars(
    template: &[KStrategy],
    pattern: &Pattern,
    rows: &[RowVar],
    x: &[f64],
    eps: f64,
) -> Vec<KStrategy> {
    let mut out = template.to_vec();
    // First pin every patterned row to its support shape.
    for (i, per_t) in pattern.iter().enumerate() {
        for (ti, per_k) in per_t.iter().enumerate() {
            for (k, support) in per_k.iter().enumerate() {
                if support.is_empty() {
                    continue;
                }
                let un = out[i].tables[ti][k].len();
                let bulk = 1.0 - eps * (un - support.len()) as f64;
                let row = &mut out[i].tables[ti][k];
                for u in 0..un {
                    row[u] = eps;
                }
                if support.len() == 1 {
                    row[support[0]] = bulk;
                } else {
                    let share = bulk / support.len() as f64;
                    for &u in support {
                        row[u] = share;
                    }
                }
            }
        }
    }
    let mut pos = 0;
    for rv in rows {
        let un = out[rv.player].tables[rv.t - 1][rv.k].len();
        let bulk = 1.0 - eps * (un - rv.support.len()) as f64;
        let mut used = 0.0;
        for j in 0..rv.support.len() - 1 {
            out[rv.player].tables[rv.t - 1][rv.k][rv.support[j]] = x[pos + j];
            used += x[pos + j];
        }
        out[rv.player].tables[rv.t - 1][rv.k][*rv.support.last().unwrap()] = bulk - used;
        pos += rv.support.len() - 1;
    }
    out
}

fn vars_from_strategies(strategies: &[KStrategy], rows: &[RowVar]) -> Vec<f64> {
    let mut x = Vec::new();
    for rv in rows {
        for j in 0..rv.support.len() - 1 {
            x.push(strategies[rv.player].tables[rv.t - 1][rv.k][rv.support[j]]);
        }
    }
    x
}

/// Indifference residuals: within each patterned row, all support actions
/// must share the same on-policy value.
fn residuals(
    game: &GameSpec,
    comps: &CompressionProfile,
    strategies: &[KStrategy],
    rows: &[RowVar],
) -> Result<Vec<f64>, BrError> {
    let q = on_policy_q(game, comps, strategies)?;
    let mut f = Vec::new();
    for rv in rows {
        let row = &q[rv.player][rv.t - 1][rv.k];
        let base = row[*rv.support.last().unwrap()];
        for j in 0..rv.support.len() - 1 {
            f.push(row[rv.support[j]] - base);
        }
    }
    Ok(f)
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, &x| m.max(x.abs()))
}

/// Newton on the indifference system with a finite-difference Jacobian.
/// Returns the polished strategies, or `None` when the iteration leaves the
/// feasible region, stalls, or hits a singular Jacobian.
fn newton_polish(
    game: &GameSpec,
    comps: &CompressionProfile,
    template: &[KStrategy],
    pattern: &Pattern,
    start: &[KStrategy],
    eps: f64,
) -> Result<Option<Vec<KStrategy>>, BrError> {
    let rows = vars_of_pattern(game, pattern);
    if rows.is_empty() {
        // Fully pinned pattern: nothing to solve.
        return Ok(Some(apply_vars(template, pattern, &rows, &[], eps)));
    }
    let mut x = vars_from_strategies(start, &rows);
    let nv = x.len();
    let feasible = |x: &[f64]| {
        let mut pos = 0;
        for rv in &rows {
            let un = template[rv.player].tables[rv.t - 1][rv.k].len();
            let bulk = 1.0 - eps * (un - rv.support.len()) as f64;
            let mut used = 0.0;
            for j in 0..rv.support.len() - 1 {
                let m = x[pos + j];
                if m < eps - 1e-9 || m > 1.0 {
                    return false;
                }
                used += m;
            }
            if bulk - used < eps - 1e-9 {
                return false;
            }
            pos += rv.support.len() - 1;
        }
        true
    };
    if !feasible(&x) {
        return Ok(None);
    }
    let eval = |x: &[f64]| -> Result<Vec<f64>, BrError> {
        residuals(game, comps, &apply_vars(template, pattern, &rows, x, eps), &rows)
    };
    let mut f = eval(&x)?;
    let mut best = inf_norm(&f);
    let mut stalled = 0;
    for _ in 0..40 {
        if best <= 1e-12 {
            return Ok(Some(apply_vars(template, pattern, &rows, &x, eps)));
        }
        let h = 1e-7;
        let mut jac = vec![vec![0.0f64; nv]; f.len()];
        for c in 0..nv {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[c] += h;
            xm[c] -= h;
            let fp = eval(&xp)?;
            let fm = eval(&xm)?;
            for r in 0..f.len() {
                jac[r][c] = (fp[r] - fm[r]) / (2.0 * h);
            }
        }
        let Some(step) = solve_square(jac, f.clone()) else {
            return Ok(None);
        };
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial: Vec<f64> =
                x.iter().zip(&step).map(|(&xi, &si)| xi - scale * si).collect();
            if feasible(&trial) {
                let ft = eval(&trial)?;
                let nt = inf_norm(&ft);
                if nt < best || scale < 1e-4 {
                    x = trial;
                    f = ft;
                    if nt < best {
                        best = nt;
                        stalled = 0;
                    } else {
                        stalled += 1;
                    }
                    accepted = true;
                    break;
                }
            }
            scale *= 0.5;
        }
        if !accepted || stalled >= 8 {
            return Ok(None);
        }
    }
    if best <= 1e-12 {
        return Ok(Some(apply_vars(template, pattern, &rows, &x, eps)));
    }
    Ok(None)
}

/// All nonempty action subsets per reachable row, combined product-wise.
/// Patterns are emitted by an odometer over rows, each counting through
/// subset bitmasks in increasing order starting from the full set.
struct PatternOdometer {
    shape: Vec<(usize, usize, usize, usize)>,
    masks: Vec<usize>,
    started: bool,
}

impl PatternOdometer {
    fn new(game: &GameSpec, reach: &[Vec<Vec<bool>>], players: usize) -> Self {
        let mut shape = Vec::new();
        for i in 0..players {
            for t in 1..=game.horizon() {
                let un = game.action_space(t, i).len();
                for (k, &r) in reach[i][t - 1].iter().enumerate() {
                    if r {
                        shape.push((i, t, k, un));
                    }
                }
            }
        }
        let masks = shape.iter().map(|&(_, _, _, un)| (1usize << un) - 1).collect();
        PatternOdometer { shape, masks, started: false }
    }

    fn count(&self) -> f64 {
        self.shape
            .iter()
            .map(|&(_, _, _, un)| ((1usize << un) - 1) as f64)
            .product()
    }

    fn next(&mut self) -> Option<Vec<usize>> {
        if !self.started {
            self.started = true;
            return Some(self.masks.clone());
        }
        for pos in (0..self.masks.len()).rev() {
            if self.masks[pos] > 1 {
                self.masks[pos] -= 1;
                for p in pos + 1..self.masks.len() {
                    self.masks[p] = (1usize << self.shape[p].3) - 1;
                }
                return Some(self.masks.clone());
            }
            self.masks[pos] = (1usize << self.shape[pos].3) - 1;
        }
        None
    }

    fn to_pattern(
        &self,
        game: &GameSpec,
        comps: &CompressionProfile,
        players: usize,
        masks: &[usize],
    ) -> Pattern {
        let mut pattern: Pattern = (0..players)
            .map(|i| {
                (1..=game.horizon())
                    .map(|t| vec![Vec::new(); comps.get(i).space(t).len()])
                    .collect()
            })
            .collect();
        for (pos, &(i, t, k, un)) in self.shape.iter().enumerate() {
            let sup: Vec<usize> = (0..un).filter(|u| masks[pos] & (1 << u) != 0).collect();
            pattern[i][t - 1][k] = sup;
        }
        pattern
    }
}

fn solve_floor(
    game: &GameSpec,
    comps: &CompressionProfile,
    cfg: &SolverConfig,
    eps: f64,
    warm: &[KStrategy],
    reach: &[Vec<Vec<bool>>],
    newton_hint: bool,
) -> Result<(Vec<KStrategy>, FloorStep), SolveError> {
    let players = game.num_players();
    let template: Vec<KStrategy> =
        (0..players).map(|i| KStrategy::uniform(game, comps.get(i), i)).collect();

    // When the previous floor point needed Newton, its pattern almost
    // always carries over; polishing the warm start first skips the vertex
    // iteration that cannot settle on a mixed point anyway.
    if newton_hint {
        let pattern = pattern_of(warm, reach, eps);
        let rows = vars_of_pattern(game, &pattern);
        let start =
            apply_vars(&template, &pattern, &rows, &vars_from_strategies(warm, &rows), eps);
        if let Some(polished) =
            newton_polish(game, comps, &template, &pattern, &start, eps)?
        {
            if is_floored_fixed_point(game, comps, &polished, reach, eps, cfg.tie_tol)? {
                return Ok((polished, FloorStep { eps, method: "newton".into(), iters: 0 }));
            }
        }
    }

    // Vertex iteration with a fixed-point probe each round.
    let mut cur = warm.to_vec();
    let mut avg = cur.clone();
    let mut averaged = 1usize;
    for iter in 0..cfg.max_iters {
        let sel = selections(game, comps, &cur, eps, cfg.tie_tol)?;
        let probe = selections(game, comps, &sel, eps, cfg.tie_tol)?;
        if profile_diff(&probe, &sel) <= 1e-12 {
            return Ok((sel, FloorStep { eps, method: "vertex".into(), iters: iter + 1 }));
        }
        for (c, s) in cur.iter_mut().zip(&sel) {
            *c = c.mix(s, cfg.damping);
        }
        if iter >= 20 {
            averaged += 1;
            let w = 1.0 / averaged as f64;
            for (a, c) in avg.iter_mut().zip(&cur) {
                *a = a.mix(c, w);
            }
        } else {
            avg = cur.clone();
        }
    }

    // Newton from the averaged iterate's support pattern, starting at the
    // averaged masses and falling back to the pattern's equal-share center
    // when the averages are infeasible for this floor.
    let pattern = pattern_of(&avg, reach, eps);
    let rows = vars_of_pattern(game, &pattern);
    let from_avg =
        apply_vars(&template, &pattern, &rows, &vars_from_strategies(&avg, &rows), eps);
    let center = apply_vars(&template, &pattern, &[], &[], eps);
    for cand in [from_avg, center] {
        if let Some(polished) =
            newton_polish(game, comps, &template, &pattern, &cand, eps)?
        {
            if is_floored_fixed_point(game, comps, &polished, reach, eps, cfg.tie_tol)? {
                return Ok((
                    polished,
                    FloorStep { eps, method: "newton".into(), iters: cfg.max_iters },
                ));
            }
        }
    }

    // Exhaustive support patterns, full supports first.
    let mut odo = PatternOdometer::new(game, reach, players);
    if odo.count() > 20_000.0 {
        return Err(SolveError::NoConvergence {
            eps,
            detail: format!(
                "no fixed point from iteration or Newton, and {} support patterns \
                 exceed the enumeration budget",
                odo.count()
            ),
        });
    }
    while let Some(masks) = odo.next() {
        let pattern = odo.to_pattern(game, comps, players, &masks);
        let center = apply_vars(&template, &pattern, &[], &[], eps);
        if let Some(polished) =
            newton_polish(game, comps, &template, &pattern, &center, eps)?
        {
            if is_floored_fixed_point(game, comps, &polished, reach, eps, cfg.tie_tol)? {
                return Ok((
                    polished,
                    FloorStep { eps, method: "enumeration".into(), iters: cfg.max_iters },
                ));
            }
        }
    }
    Err(SolveError::NoConvergence { eps, detail: "all support patterns exhausted".into() })
}

/// Supports at floor `eps`: actions carrying more than floor mass.
fn floor_support(s: &KStrategy, eps: f64) -> Vec<Vec<Vec<usize>>> {
    s.tables
        .iter()
        .map(|tbl| {
            tbl.iter()
                .map(|row| {
                    (0..row.len()).filter(|&u| row[u] > eps + 1e-9).collect()
                })
                .collect()
        })
        .collect()
}

/// Walk the whole schedule and keep the fixed point retained at each floor.
/// [`solve_k_based_bne`] extrapolates the last two of these to floor zero;
/// the path itself is what homotopy diagnostics and floored-rationality
/// checks want, so it is exposed directly.
pub fn solve_floor_path(
    game: &GameSpec,
    comps: &CompressionProfile,
    cfg: &SolverConfig,
) -> Result<Vec<FloorPoint>, SolveError> {
    cfg.schedule.validate_for(game)?;
    let players = game.num_players();
    let mut cur: Vec<KStrategy> =
        (0..players).map(|i| KStrategy::uniform(game, comps.get(i), i)).collect();
    // Reachability is the same at every positive floor: all strategies are
    // fully mixed, so only nature can exclude a summary.
    let reach: Vec<Vec<Vec<bool>>> = (0..players)
        .map(|i| {
            best_response_dp_eps(game, comps, i, &cur, cfg.schedule.points[0], cfg.tie_tol)
                .map(|br| br.reachable)
        })
        .collect::<Result<_, _>>()?;

    let mut path: Vec<FloorPoint> = Vec::with_capacity(cfg.schedule.points.len());
    for &eps in &cfg.schedule.points {
        let hint = path.last().is_some_and(|p| p.step.method != "vertex");
        let (solved, step) = solve_floor(game, comps, cfg, eps, &cur, &reach, hint)?;
        cur = solved.clone();
        path.push(FloorPoint { step, strategies: solved });
    }
    Ok(path)
}

/// Solve for a summary-based equilibrium and certify it against every
/// full-history deviation.
pub fn solve_k_based_bne(
    game: &GameSpec,
    comps: &CompressionProfile,
    cfg: &SolverConfig,
) -> Result<KBneSolution, SolveError> {
    let path = solve_floor_path(game, comps, cfg)?;

    // Extrapolate the last two floor points to floor zero. Floor-pinned
    // masses vanish exactly under the halving schedule; interior masses lose
    // their first-order floor dependence.
    let n = cfg.schedule.points.len();
    let last = &path[n - 1].strategies;
    let strategies: Vec<KStrategy> = if n >= 2 {
        let prev = &path[n - 2].strategies;
        let eps_last = cfg.schedule.points[n - 1];
        let same_pattern = last
            .iter()
            .zip(prev)
            .all(|(a, b)| {
                floor_support(a, eps_last) == floor_support(b, cfg.schedule.points[n - 2])
            });
        last.iter()
            .zip(prev)
            .map(|(a, b)| {
                let mut out = a.clone();
                for (ti, tbl) in out.tables.iter_mut().enumerate() {
                    for (k, row) in tbl.iter_mut().enumerate() {
                        if same_pattern {
                            for (u, m) in row.iter_mut().enumerate() {
                                *m = (2.0 * a.tables[ti][k][u] - b.tables[ti][k][u]).max(0.0);
                            }
                        } else {
                            for m in row.iter_mut() {
                                if *m <= eps_last + 1e-9 {
                                    *m = 0.0;
                                }
                            }
                        }
                        let sum: f64 = row.iter().sum();
                        for m in row.iter_mut() {
                            *m /= sum;
                        }
                    }
                }
                out
            })
            .collect()
    } else {
        last.clone()
    };

    let report = verify_k_bne(game, comps, &strategies, cfg.tol)?;
    if !report.is_equilibrium {
        return Err(SolveError::NotEquilibrium(Box::new(report)));
    }
    let trace = path.into_iter().map(|p| p.step).collect();
    Ok(KBneSolution { payoffs: report.payoffs.clone(), strategies, report, trace })
}

/// [`solve_k_based_bne`] plus the canonical-tremble sequential certificate.
pub fn solve_k_based_se(
    game: &GameSpec,
    comps: &CompressionProfile,
    cfg: &SolverConfig,
) -> Result<KSeSolution, SolveError> {
    let bne = solve_k_based_bne(game, comps, cfg)?;
    let profile = expand_k_profile(game, comps, &bne.strategies);
    let se = verify_se_canonical(game, &profile, &cfg.schedule)?;
    Ok(KSeSolution {
        strategies: bne.strategies,
        payoffs: bne.payoffs,
        report: bne.report,
        se,
        trace: bne.trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{build_example, FixtureRequest};

    #[test]
    fn leader_follower_solution_is_the_strict_equilibrium() {
        let fx = build_example(&FixtureRequest::Example1).unwrap();
        let sol = solve_k_based_bne(&fx.game, &fx.compressions, &SolverConfig::default())
            .unwrap();
        assert!(sol.report.is_equilibrium);
        assert!((sol.payoffs[0] - 2.0).abs() <= 1e-6);
        assert!((sol.payoffs[1] + 1.0).abs() <= 1e-6);
        assert!(max_abs_diff(&sol.strategies[0].tables[0][0], &[0.0, 1.0]) <= 1e-9);
        assert!(max_abs_diff(&sol.strategies[1].tables[1][0], &[0.0, 1.0]) <= 1e-9);
        assert_eq!(sol.trace.len(), 13);
    }

    #[test]
    fn signaling_solution_is_the_interior_equilibrium() {
        let c = 0.2;
        let fx = build_example(&FixtureRequest::Example3 { c }).unwrap();
        let sol = solve_k_based_bne(&fx.game, &fx.compressions, &SolverConfig::default())
            .unwrap();
        assert!(sol.report.is_equilibrium);
        assert!((sol.payoffs[0] - (c / 2.0 + 2.0 / 3.0)).abs() <= 1e-6);
        let a = &sol.strategies[0].tables[0];
        assert!(max_abs_diff(&a[0], &[1.0 / 3.0, 2.0 / 3.0]) <= 1e-6);
        assert!(max_abs_diff(&a[1], &[2.0 / 3.0, 1.0 / 3.0]) <= 1e-6);
        let b = &sol.strategies[1].tables[1];
        assert!(max_abs_diff(&b[0], &[1.0 / 3.0 + c, 2.0 / 3.0 - c]) <= 1e-6);
        assert!(max_abs_diff(&b[1], &[1.0 / 3.0 - c, 2.0 / 3.0 + c]) <= 1e-6);
    }
}
