pub mod algflow;
pub mod corpus;
pub mod duality;
pub mod error;
pub mod gfp;
pub mod lattice;
pub mod polymat;
pub mod report;
pub mod topflow;

pub use error::{Error, Result};
