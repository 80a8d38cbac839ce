//! File formats, parallel region sampling and the command-line front end
//! for [`incompat_core`].

pub mod cli;
pub mod csv;
pub mod format;
pub mod parallel;
