//! Dynamic TDD picocell system-level simulator.

pub mod campaign;
pub mod channel;
pub mod engine;
pub mod error;
pub mod linalg;
pub mod phy;
pub mod rng;
pub mod scheduler;
pub mod tddconf;
pub mod topology;
pub mod traffic;

pub use campaign::{execute_campaign, parse_campaign, CampaignConfig, Overrides};
pub use engine::{run, Engine, MetricsReport, ModelConfig, Network, RunSeeds, SimulationRun};
pub use error::{Error, Result};
pub use scheduler::{SchemeId, SchemeSpec};
pub use traffic::{Direction, TrafficConfig};
