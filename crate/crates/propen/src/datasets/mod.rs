//! Data generators and property oracles for the toy and airfoil experiments.

mod embed;
mod kde;
mod naca;
mod property;
mod toy;

pub use embed::{embed, Embedding};
pub use kde::{KdeModel, DEFAULT_BANDWIDTH};
pub use naca::{fit_naca_params, generate_naca, synthetic_lift_drag, thickness_half, NacaParams};
pub use property::AnalyticProperty;
pub use toy::{generate_toy, ToyConfig, ToyFamily};
