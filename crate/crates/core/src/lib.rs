//! Trajectory mapping for small ballistic objects seen from a shaky camera:
//! box decoding, camera-motion compensation, quadratic track growth, a
//! seeded scenario simulator and the matching evaluation tools.
//!
//! ```
//! use trajmap::simulator::{generate, ScenarioConfig};
//! use trajmap::tracker::{track_sequence, TrackerConfig};
//!
//! let scenario = generate(&ScenarioConfig { n_pellets: 5, seed: 1, ..Default::default() }).unwrap();
//! let tracks = track_sequence(&scenario.frames, &scenario.ripple, &TrackerConfig::default()).unwrap();
//! assert_eq!(tracks.len(), 5);
//! ```

pub mod cli;
pub mod decode;
pub mod error;
pub mod evaluator;
pub mod geometry;
pub mod io;
pub mod pipeline;
pub mod polyfit;
pub mod rng;
pub mod simulator;
pub mod stabilizer;
pub mod tracker;

pub use error::{Error, Result};
pub use geometry::{BBox, Detection, Point, RipplePair};
pub use polyfit::Quadratic;
pub use tracker::{Tracker, TrackerConfig, Trajectory};
