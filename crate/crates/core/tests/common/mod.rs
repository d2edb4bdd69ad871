//! Checks shared by the integration suites and the acceptance gate.
#![allow(dead_code)]

pub mod automata;
pub mod enumerate;
pub mod paradigm;
pub mod props;
