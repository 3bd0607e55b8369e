//! Wind farm flow control at desk scale: a dynamic wake simulator driven by
//! synthetic turbulence boxes, a sector-based damage-equivalent-load (DEL)
//! surrogate pipeline, independent soft actor-critic training with a shaped
//! global reward, and a deterministic evaluation harness.
//!
//! The crate is organised around the data flow:
//!
//! * [`sim`] — turbulence boxes, frozen-turbulence inflow, Gaussian wake
//!   deficits with yaw deflection and meandering, rotor sensors, power.
//! * [`loads`] — sliding-window DEL features, the analytic DEL oracle, the
//!   neural surrogate trained against it, and rainflow counting.
//! * [`nn`] — small dense networks with exact backpropagation, an adaptive
//!   optimizer, and the squashed-Gaussian policy head.
//! * [`env`] — the per-turbine observation/action/reward interface with a
//!   lockstep zero-yaw baseline twin and vectorised parallel environments.
//! * [`sac`] — per-turbine soft actor-critic agents, shared replay, and the
//!   training loop.
//! * [`eval`] — frozen-policy rollouts, the static-yaw grid-search oracle,
//!   constraint-compliance summaries, and CSV/JSON export.
//! * [`cli`] — the `windsteer` binary's subcommands and run manifests.
//!
//! Runnable walkthroughs for each capability live in `examples/`.

pub mod cli;
pub mod config;
pub mod env;
pub mod error;
pub mod eval;
pub mod loads;
pub mod nn;
pub mod sac;
pub mod seed;
pub mod sim;

pub use config::Config;
pub use error::{Error, Result};
