//! Communication-aware safety radii for UAV collision avoidance, with the vehicle,
//! obstacle and broadcast-link models needed to simulate and check them.

pub mod channel;
pub mod controller;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod presets;
pub mod radius;
pub mod sim;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::Vec3;
