//! File formats, generators and the command-line driver around
//! [`kcpp_core`].

pub mod cli;
pub mod format;
pub mod gen;

