//! Simulation and expansion certificates for the tent map with memory.
//!
//! The library studies the process `x_{n+1} = tau(alpha*x_n + (1-alpha)*x_{n-1})`
//! for the symmetric tent map `tau` through its two-dimensional lift
//! `G(x, y) = (y, tau(alpha*y + (1-alpha)*x))`:
//!
//! - [`map`]: the lift, orbits, region classification;
//! - [`linalg`]: branch derivative products, singular values, expansion
//!   thresholds;
//! - [`symbolic`]: words over the branch alphabet;
//! - [`geometry`]: exact convex-polygon images and itinerary sets;
//! - [`sequences`]: admissible symbol blocks and the absolutely-continuous
//!   invariant measure existence certificate for `alpha` below ~0.46;
//! - [`regimes`]: the deterministic regimes at and above `alpha = 1/2`
//!   (period-3 square, global attractor, period-2 segment);
//! - [`measure`]: orbit statistics, invariant-support and density histograms;
//! - [`thresholds`]: the consolidated table of critical `alpha` values.

pub mod error;
pub mod geometry;
pub mod linalg;
pub mod map;
pub mod measure;
pub mod regimes;
pub mod sequences;
pub mod symbolic;
pub mod thresholds;

pub use error::{Error, Result};
pub use map::{Alpha, Point2};
