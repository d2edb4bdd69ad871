use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::OnceLock;

use tempfile::TempDir;

fn dpm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dpm"))
        .args(args)
        .output()
        .expect("dpm runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

/// Compiled oracles, built once per test binary.
struct Oracles {
    _dir: TempDir,
    hebrew: PathBuf,
    tonkawa: PathBuf,
}

fn oracles() -> &'static Oracles {
    static O: OnceLock<Oracles> = OnceLock::new();
    O.get_or_init(|| {
        let dir = TempDir::new().unwrap();
        let hebrew = dir.path().join("hebrew.fsm.txt");
        let tonkawa = dir.path().join("tonkawa.fsm.txt");
        for (g, p) in [("hebrew", &hebrew), ("tonkawa", &tonkawa)] {
            let o = dpm(&["compile", "--grammar", g, "-o", p.to_str().unwrap()]);
            assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        }
        Oracles {
            _dir: dir,
            hebrew,
            tonkawa,
        }
    })
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_prints_surface_and_disharmony() {
    let o = dpm(&[
        "generate",
        "--grammar",
        "hebrew",
        "--root",
        "g,m,r",
        "--cat",
        "b1&third&pl&fut",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "jigmeru\t5477\tFINISH\n");
}

#[test]
fn generate_verbose_adds_labelled_lines() {
    let o = dpm(&[
        "generate",
        "--root",
        "g,m,r",
        "--cat",
        "b2&third&pl&fut",
        "--verbose",
    ]);
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("jigamru\t5525\tBE FINISHED"));
    assert!(lines.all(|l| l.starts_with('#')));
    assert!(out.contains("# marks\t01 01 01 10 01 01 01\n"));
}

#[test]
fn generate_tonkawa_flags() {
    let o = dpm(&[
        "generate",
        "--grammar",
        "tonkawa",
        "--stem",
        "CUT",
        "--flags",
        "progressive",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).split('\t').next(), Some("picnano'"));
    let o = dpm(&[
        "generate",
        "--grammar",
        "tonkawa",
        "--stem",
        "LICK",
        "--flags",
        "plural-object",
    ]);
    assert_eq!(stdout(&o).split('\t').next(), Some("wentalo'"));
    let o = dpm(&["generate", "--grammar", "tonkawa", "--stem", "CUT"]);
    assert_eq!(stdout(&o).split('\t').next(), Some("picno'"));
}

#[test]
fn generate_outside_the_affix_table_is_empty() {
    let o = dpm(&["generate", "--root", "g,m,r", "--cat", "b1&second&sg&past"]);
    assert_eq!(code(&o), 1);
    assert!(o.stdout.is_empty());
}

#[test]
fn input_errors_exit_2() {
    assert_eq!(
        code(&dpm(&["generate", "--root", "g,m,r", "--cat", "b1&&"])),
        2
    );
    assert_eq!(
        code(&dpm(&["generate", "--root", "g,m,r", "--cat", "b9"])),
        2
    );
    assert_eq!(
        code(&dpm(&["generate", "--root", "g,a,r", "--cat", "b1"])),
        2
    );
    assert_eq!(
        code(&dpm(&[
            "generate",
            "--grammar",
            "klingon",
            "--root",
            "g,m,r",
            "--cat",
            "b1"
        ])),
        2
    );
    assert_eq!(
        code(&dpm(&["parse", "jigmeru"])),
        2,
        "oracle mode needs --oracle"
    );
    assert_eq!(
        code(&dpm(&[
            "generate", "--root", "g,m,r", "--cat", "b1", "--mode", "oracle"
        ])),
        2
    );
    assert_eq!(code(&dpm(&["frobnicate"])), 2);
}

#[test]
fn parse_with_oracle() {
    let h = path(&oracles().hebrew);
    let o = dpm(&["parse", "jigamru", "--oracle", h]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "g.m.r\tb2 fut third pl\tBE FINISHED\n");
    let o = dpm(&["parse", "jismeru", "--oracle", h]);
    assert_eq!(stdout(&o), "s.m.r\tb1 fut third pl\tUNKNOWN\n");
    let o = dpm(&["parse", "jigmaru", "--oracle", h]);
    assert_eq!(code(&o), 1);
    let o = dpm(&["parse", "zzz", "--oracle", h]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown character"));
}

#[test]
fn parse_by_synthesis_needs_no_oracle() {
    let o = dpm(&["parse", "gamar", "--mode", "synthesis"]);
    assert_eq!(stdout(&o), "g.m.r\tb1 past third sg masc\tFINISH\n");
    let o = dpm(&["parse", "gomret", "--mode", "synthesis"]);
    assert_eq!(code(&o), 1);
    let o = dpm(&[
        "parse",
        "wepceno'",
        "--grammar",
        "tonkawa",
        "--mode",
        "synthesis",
    ]);
    assert_eq!(stdout(&o), "CUT\t+plobj -prog\n");
}

#[test]
fn foreign_oracle_exits_3() {
    let o = dpm(&["parse", "gamar", "--oracle", path(&oracles().tonkawa)]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("fingerprint"));
}

#[test]
fn compile_is_reproducible_and_reports_stats() {
    let dir = TempDir::new().unwrap();
    let again = dir.path().join("again.fsm.txt");
    let o = dpm(&["compile", "--grammar", "tonkawa", "-o", path(&again)]);
    assert_eq!(code(&o), 0);
    let stats = stdout(&o);
    assert!(stats.starts_with("cells\t6\nstates\t"), "{stats}");
    assert_eq!(
        fs::read(&again).unwrap(),
        fs::read(&oracles().tonkawa).unwrap()
    );
    let o = dpm(&["compile", "--grammar", "tonkawa"]);
    assert_eq!(o.stdout, fs::read(&oracles().tonkawa).unwrap());
    assert!(String::from_utf8_lossy(&o.stderr).contains("# cells\t6"));
}

#[test]
fn compile_rejects_abstract_tonkawa() {
    assert_eq!(
        code(&dpm(&[
            "compile",
            "--grammar",
            "tonkawa",
            "--abstract-lexicon"
        ])),
        2
    );
}

#[test]
fn paradigm_tables() {
    let o = dpm(&["paradigm", "--root", "g,m,r"]);
    let out = stdout(&o);
    let surfaces: Vec<&str> = out.lines().map(|l| l.split('\t').next().unwrap()).collect();
    assert_eq!(
        surfaces,
        ["gamar", "gamra", "gomeret", "gomrim", "gomer", "jigmeru", "jigamru"]
    );
    let o = dpm(&["paradigm", "--root", "q,q,q"]);
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 7);
    assert!(out.lines().all(|l| l.ends_with("\tUNKNOWN")));
    let o = dpm(&["paradigm", "--grammar", "tonkawa"]);
    assert_eq!(stdout(&o).lines().count(), 6);
}

#[test]
fn oracle_generation_matches_minimization() {
    let h = path(&oracles().hebrew);
    for root in ["g,m,r", "g,d,r", "k,t,b"] {
        let min = dpm(&["paradigm", "--root", root]);
        let orc = dpm(&[
            "paradigm", "--root", root, "--mode", "oracle", "--oracle", h,
        ]);
        assert_eq!(stdout(&min), stdout(&orc), "{root}");
    }
    let t = path(&oracles().tonkawa);
    let min = dpm(&["paradigm", "--grammar", "tonkawa"]);
    let orc = dpm(&[
        "paradigm",
        "--grammar",
        "tonkawa",
        "--mode",
        "oracle",
        "--oracle",
        t,
    ]);
    assert_eq!(stdout(&min), stdout(&orc));
}

#[test]
fn inspect_grammar_oracle_and_candidates() {
    let o = dpm(&["inspect"]);
    assert!(stdout(&o).starts_with("grammar\thebrew\nfingerprint\t"));
    let o = dpm(&["inspect", "--oracle", path(&oracles().hebrew)]);
    assert!(stdout(&o).contains("mode\tlexicon\n"));
    let o = dpm(&[
        "inspect",
        "--root",
        "g,m,r",
        "--cat",
        "b1&fut&third&pl&masc",
        "--dump",
    ]);
    let out = stdout(&o);
    let heads: Vec<&str> = out
        .lines()
        .filter(|l| l.contains('\t'))
        .map(|l| l.split('\t').next().unwrap())
        .collect();
    assert_eq!(heads, ["jigmeru", "jigomru", "jigomeru"]);
    assert!(out.contains("0 j onset unmarked +ini -fin"), "{out}");
}
