use std::collections::BTreeSet;
use std::sync::OnceLock;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use dpm_core::language::{Analysis, Fragment};
use dpm_core::oracle::{
    self, compile_paradigm, parse_by_synthesis, parse_guided, CompileReport, GenerationMode, Oracle,
};

pub struct Compiled {
    pub fragment: Fragment,
    pub oracle: Oracle,
    pub report: CompileReport,
}

pub fn compiled(f: fn() -> Fragment) -> Compiled {
    let fragment = f();
    let (oracle, report) = compile_paradigm(&fragment, false).unwrap();
    Compiled {
        fragment,
        oracle,
        report,
    }
}

pub fn hebrew() -> &'static Compiled {
    static C: OnceLock<Compiled> = OnceLock::new();
    C.get_or_init(|| compiled(Fragment::hebrew))
}

pub fn tonkawa() -> &'static Compiled {
    static C: OnceLock<Compiled> = OnceLock::new();
    C.get_or_init(|| compiled(Fragment::tonkawa))
}

/// Roots outside the letter tree's named branches, drawn reproducibly.
pub fn unknown_roots(n: usize) -> Vec<String> {
    let consonants = [
        "'", "b", "d", "f", "g", "h", "k", "l", "m", "n", "p", "q", "r", "s", "t",
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut out = BTreeSet::new();
    while out.len() < n {
        let r: Vec<&str> = (0..3)
            .map(|_| *consonants.choose(&mut rng).unwrap())
            .collect();
        let root = r.join(".");
        if root != "g.m.r" && root != "g.d.r" {
            out.insert(root);
        }
    }
    out.into_iter().collect()
}

pub fn paradigm_surfaces(f: &Fragment, lexeme: &str) -> Vec<String> {
    let (rows, _) =
        oracle::generate(f, lexeme, &f.all_categories(), GenerationMode::Minimize).unwrap();
    rows.into_iter().map(|r| r.surface).collect()
}

pub fn analyses(f: &Fragment, lexeme: &str, cat: &str, sem: Option<&str>) -> BTreeSet<Analysis> {
    f.analyses(lexeme, &f.category(cat).unwrap(), sem)
        .into_iter()
        .collect()
}

pub fn assert_parse_equivalence(c: &Compiled, surfaces: &[String]) -> usize {
    let f = &c.fragment;
    let mut nonempty = 0;
    for s in surfaces {
        let guided = parse_guided(f, s, &c.oracle).unwrap();
        let synth = parse_by_synthesis(f, s).unwrap();
        assert_eq!(guided.analyses, synth.analyses, "{} {s}", f.language);
        nonempty += usize::from(!guided.analyses.is_empty());
    }
    nonempty
}

/// Every surface of the compiled paradigm realized with concrete roots: the
/// named letter-tree branches plus `unknown` roots that fall through to the
/// complement branches.
pub fn hebrew_test_surfaces(unknown: usize) -> Vec<String> {
    let h = hebrew();
    let mut roots = vec!["g.m.r".to_string(), "g.d.r".to_string()];
    roots.extend(unknown_roots(unknown));
    let mut surfaces = BTreeSet::new();
    for r in &roots {
        surfaces.extend(paradigm_surfaces(&h.fragment, r));
    }
    surfaces.into_iter().collect()
}
