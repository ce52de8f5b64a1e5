pub mod cat_o;
pub mod coxeter;
pub mod error;
pub mod momentgraph;
pub mod polylin;
pub mod rat;
pub mod suites;
pub mod zmod;

pub use error::{Error, Result};
