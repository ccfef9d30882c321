//! Exact decision procedures for transferable-utility coalitional games in
//! compact form: core, kernel and bargaining-set membership, core emptiness
//! certificates, treewidth dynamic programming for graph games, and the
//! reduction gadgets used as a validation corpus.

pub mod coalition;
pub mod concepts;
pub mod engine;
pub mod error;
pub mod gadgets;
pub mod game;
pub mod lp;
pub mod rational;
pub mod repr;
pub mod treewidth;

pub use coalition::{Coalition, CoalitionFamily};
pub use error::{Error, Result};
pub use game::{check_imputation, excess, is_imputation, PayoffVector, PlayerSet, WorthOracle};
pub use rational::Rational;
pub use repr::Game;
