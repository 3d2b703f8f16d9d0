//! Cassaigne continued fractions, their S-adic words, and related measurements.

pub mod complexity;
pub mod directive;
pub mod error;
pub mod fixed;
pub mod linear;
pub mod lyapunov;
pub mod mcfa;
pub mod point;
pub mod rauzy;
pub mod subst;
pub mod words;

pub use directive::DirectiveWord;
pub use error::{Error, Result};
pub use linear::{IntMatrix3, RationalVector3};
pub use point::{FloatVector3, Point};
pub use subst::{Block, Substitution};
pub use words::WordPrefix;
