//! Output formats shared by the `mdp-bench` binary and its test suites.

pub mod output;
