//! Point configurations on planar compact sets and the potential-theoretic
//! quantities attached to them: discrete energies, Fekete and Leja points,
//! discrepancy certificates and the cyclotomic prime-product family.
//!
//! Every set in the catalog has a closed-form Green function, so the values
//! computed here can be checked against exact answers rather than against
//! another approximation.

pub mod audit;
pub mod discrepancy;
pub mod discrete_energy;
pub mod error;
pub mod integer_poly;
pub mod numerics;
pub mod point_generation;
pub mod report;
pub mod set_catalog;
pub mod test_functions;

pub use discrete_energy::PointConfiguration;
pub use error::{Error, Result};
pub use set_catalog::CompactSetModel;
