//! Engine for a three-action desktop: a hierarchical scanning keyboard and a
//! quadrant pointer driven by `scroll`, `zoom_in` and `zoom_out`, plus signal
//! decoding, per-user profiles and a deterministic task simulator.

pub mod action;
pub mod dispatcher;
pub mod harness;
pub mod hierarchy;
pub mod keyboard;
pub mod pointer;
pub mod profile;
pub mod signal;
