//! Exact simulation of gamma-OU and bilateral-gamma-OU processes.
//!
//! The transition law over a step of length `dt` is the decayed previous
//! value plus an independent "remainder" draw. The remainder is sampled
//! exactly as an Erlang mixture with a Polya or binomial random index, or by
//! rejection from a signed mixture. Compound-Poisson samplers built on the
//! driving process are provided as references.

pub mod bench;
pub mod bgou;
pub mod error;
pub mod gou;
pub mod law;
pub mod moments;
pub mod path;
pub mod quad;
pub mod rng;
pub mod scenario;
pub mod sim;
pub mod special;
pub mod validation;

pub use error::{Error, Result};

/// Library version recorded in output metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use law::TransitionDensity;
pub use moments::Moments;
pub use path::{PathSkeleton, TimeGrid};
pub use rng::RngStream;
pub use scenario::{Algorithm, GridSpec, ProcessKind, ProcessSpec};
pub use sim::{fill_terminals, sample_paths, sample_terminals, Execution, PathBatch, PathSampler, SimOptions, Simulator};
