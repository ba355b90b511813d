//! Pencil generators: the heat-wave coupling, a distributed RLC line and
//! Weierstraß-form pencils with prescribed index.

mod heat_wave;
mod rlc;
mod weierstrass;

pub use heat_wave::{heat_wave_pencil, HeatWaveConfig, HeatWaveLayout};
pub use rlc::{rlc_pencil, RlcConfig, RlcPencil};
pub use weierstrass::{random_spec, weierstrass_pencil, WeierstrassSpec};
