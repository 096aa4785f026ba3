//! Coherence checking and propagation for conditional events and compound
//! conditionals (conjunctions and iterated conditionals), in exact rational
//! arithmetic.
//!
//! The pieces, bottom up:
//!
//! - [`logic`]: events over a finite set of atoms, conditional events, constituents.
//! - [`crq`]: conditional random quantities built from conditional events.
//! - [`coherence`]: the coherence test and coherent extension.
//! - [`bounds`]: closed-form propagation rules.
//! - [`pvalid`]: p-consistency and p-entailment.

pub mod bounds;
pub mod coherence;
pub mod crq;
pub mod error;
pub mod logic;
pub mod lp;
pub mod parallel;
pub mod poly;
pub mod pvalid;
pub mod rational;
pub mod syntax;

pub use coherence::{check_coherence, check_coherence_with, extension_bounds, CheckOptions, CoherenceVerdict, ExtensionBounds, ExtensionOptions};
pub use crq::{Assessment, CompoundQuantity, Family};
pub use error::Error;
pub use logic::{ConditionalEvent, EventSpace, Formula};
pub use parallel::Strategy;
pub use rational::Rat;
