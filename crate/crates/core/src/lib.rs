//! Finite-menu screening mechanisms: the extended menu, exhaustiveness, extremality decisions
//! with verified decomposition certificates, the planar classifier, perturbation to extreme
//! menus, and applications to delegation and monopoly pricing.

pub mod applications;
pub mod cli_io;
pub mod corpus;
pub mod error;
pub mod exhaustiveness;
pub mod extremality;
pub mod model;
pub mod perturbation;
pub mod planar;
pub mod random;

pub use error::{CoreError, Result};
