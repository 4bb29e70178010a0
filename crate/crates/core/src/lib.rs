pub mod analysis;
pub mod commands;
pub mod config;
pub mod error;
pub mod experiment;
pub mod fields;
pub mod force;
pub mod kinematics;
pub mod model;
pub mod output;
pub mod quadrature;

pub use error::{Error, Result};
pub use model::{PhysicalConstants, SolenoidSpec};
