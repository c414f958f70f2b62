pub mod error;
pub mod formring;
pub mod rational;

pub use error::{Error, Result};
pub use rational::Rational;
pub mod bundles;
pub mod cli;
pub mod modforms;
pub mod qseries;
pub mod verifier;
