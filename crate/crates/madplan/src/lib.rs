//! Multi-agent knowledge domains over pointed Kripke models.
//!
//! The crate is organized bottom-up:
//!
//! * [`model`]: agents, fluent atoms, Kripke structures, knowledge
//!   formulas and their evaluation, frame classes and closures.
//! * [`transform`]: the small algebra of structure transformations
//!   (state/arc removal, replicas, unions, restriction) from which the
//!   update constructions are composed.
//! * [`lang`]: the `.mad` domain language: declarations, initial
//!   axioms, action laws, queries, and finite integer universes.
//! * [`transition`]: the successor function for announcement, sensing,
//!   and world-altering actions.
//! * [`initgen`]: bounded generation of initial models, observation
//!   partitions, and announcement chains.
//! * [`plan`]: query evaluation and bounded depth/breadth planners.

pub mod initgen;
pub mod lang;
pub mod model;
pub mod plan;
pub mod transform;
pub mod transition;
