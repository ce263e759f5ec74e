//! One module per subcommand. Each returns `Ok(true)` on success and
//! `Ok(false)` when a check or tolerance failed after its files were
//! written.

pub mod eval;
pub mod orbit;
pub mod params;
pub mod spectrum;
pub mod transform;
pub mod verify;
