//! Modelling toolkit for cable-driven tensegrity legs with antagonistic
//! variable-stiffness joints.

pub mod analysis;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod leadscrew;
pub mod leg;
pub mod rotary;
pub mod rigdata;
pub mod springs;
pub mod statics;

pub use error::{Error, Result};
