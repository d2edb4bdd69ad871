//! Declarative phonological morphology over typed feature structures.

pub mod engine;
pub mod feature;
pub mod fsa;
pub mod grammar;
pub mod hebrew;
pub mod iop;
pub mod language;
pub mod oracle;
pub mod prosody;
pub mod syntax;
pub mod tonkawa;
