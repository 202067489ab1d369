//! File formats, instance generators and the command-line front end for
//! `bmgame-core`.

pub mod cli;
pub mod generate;
pub mod io;
