//! Two-hop relay secrecy toolkit.
//!
//! A source reaches its destination through one of `n` relays while `m`
//! passive eavesdroppers listen. The message relay is drawn uniformly from
//! the `k` relays with the strongest bottleneck gain, and relays with weak
//! channels to the current receiver jam the eavesdroppers. The crate
//! provides:
//!
//! * [`model`]: system parameters, Rayleigh fading draws and SINR.
//! * [`protocol`]: one two-hop transmission and its outage classification.
//! * [`montecarlo`]: deterministic parallel estimation of outage
//!   probabilities and relay load balance.
//! * [`bounds`]: closed-form outage bounds, the admissible jamming
//!   threshold window and the tolerable eavesdropper count.
//! * [`config`], [`report`], [`svg`], [`cli`]: the command-line front end.

pub mod bounds;
pub mod cli;
pub mod config;
pub mod error;
pub mod model;
pub mod montecarlo;
pub mod protocol;
pub mod report;
pub mod svg;

pub use bounds::{feasibility, BoundsReport, Inapplicable};
pub use error::ParamError;
pub use model::{ChannelState, GainMatrix, SystemParams};
pub use montecarlo::{run_simulation, Interval, SimConfig, SimResult};
pub use protocol::{run_trial, TrialOutcome};
