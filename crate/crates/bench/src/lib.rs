//! Fixtures shared by the benchmarks.

use dpm_core::language::Fragment;
use dpm_core::oracle::{compile_paradigm, Oracle};

/// A fragment together with its compiled oracle.
pub struct Fixture {
    pub fragment: Fragment,
    pub oracle: Oracle,
}

impl Fixture {
    pub fn hebrew() -> Self {
        Self::compile(Fragment::hebrew())
    }

    pub fn tonkawa() -> Self {
        Self::compile(Fragment::tonkawa())
    }

    fn compile(fragment: Fragment) -> Self {
        let (oracle, _) = compile_paradigm(&fragment, false).expect("built-in fragment compiles");
        Fixture { fragment, oracle }
    }
}
