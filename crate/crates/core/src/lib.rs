pub mod certify;
pub mod cli;
pub mod discseq;
pub mod error;
pub mod exact;
pub mod family;
pub mod frobenius;
pub mod localval;
pub mod monodromy;
pub mod poly;
pub mod squareclass;
pub mod treegroup;

pub use error::{Error, Result};
