//! Finite-horizon dynamic games with asymmetric information.
//!
//! The crate models finite games in which every player keeps perfect recall
//! of their own observations, and studies *compression maps* that replace a
//! player's full private history with a smaller sequentially-updated summary.
//! Around that core it provides:
//!
//! - exact forward enumeration of the joint law of state and histories,
//!   payoff evaluation, conditional tables, and Monte Carlo cross-checks
//!   ([`game`]);
//! - finite-horizon MDP machinery: backward induction, information-state
//!   reduction, and the occupancy-weighted associated strategy ([`mdp`]);
//! - checkers for the information-state property of a compression against
//!   fixed or sampled opponent strategies, for the mutual variant where every
//!   player's summary stays valid against compression-based opponents, and
//!   for the stronger unilateral variant that factorizes the conditional law
//!   of the full system given the summary ([`info_state`]);
//! - equilibrium tooling: best responses, equilibrium verification,
//!   floor-constrained best-response dynamic programs, fixed-point solving on
//!   compressed strategies, canonical-tremble sequential-equilibrium checks,
//!   strategy transfer through the unilateral factorization, exhaustive
//!   equilibrium enumeration for small two-player games, weak perfect
//!   Bayesian assessments, and belief-based strategy checks ([`equilibrium`]);
//! - a library of concrete fixture games with analytically known behavior
//!   ([`fixtures`]);
//! - a text format for game documents and a JSON analysis report
//!   ([`textfmt`], [`report`]).
//!
//! All arithmetic is plain `f64` built from rational inputs; comparisons use
//! the centralized tolerances in [`num`].

pub mod equilibrium;
pub mod fixtures;
pub mod game;
pub mod info_state;
pub mod mdp;
pub mod num;
pub mod space;
