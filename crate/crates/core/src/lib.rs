//! Values for coalitional games with externalities.
//!
//! A game in partition-function form assigns a value to every embedded
//! coalition `(S, P)`. This crate computes the classical Shapley value, the
//! externality-free and McQuillin extensions, the value obtained by
//! decomposing a game into constant-coalition basis games, and marginal
//! contributions under several weighting schemes. The [`axioms`] module checks
//! Efficiency, Symmetry, Linearity and Null-player on concrete instances.
//!
//! All arithmetic is exact (`BigRational`).

pub mod axioms;
pub mod cli;
pub mod error;
pub mod game;
pub mod marginality;
pub mod partitions;
pub mod rational;
pub mod values;

pub use error::{Error, Result};
pub use game::{
    lift_characteristic, linear_combine, parse_game, serialize_game, CharacteristicGame, Game,
    ParseMode, ValueVector,
};
pub use marginality::{MarginalVector, SchemeKind, WeightScheme};
pub use partitions::{
    AgentPermutation, Coalition, EmbeddedCoalition, Fragment, Partition, Target, MAX_AGENTS,
};
pub use rational::Rational;
pub use values::{BasisCoefficients, ExtendedMethod, PartitionWeighting};
