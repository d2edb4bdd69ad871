use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dpm_core::feature::LeafSet;
use dpm_core::iop::{self, Candidate};
use dpm_core::language::{Fragment, FragmentError, Language};
use dpm_core::oracle::{self, GenerationMode, Oracle, OracleError};
use dpm_core::prosody::Word;
use dpm_core::{engine::SolveOptions, tonkawa};

#[derive(Parser)]
#[command(
    name = "dpm",
    version,
    about = "Prosodic morphology with incremental optimization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// hebrew or tonkawa
    #[arg(long, default_value = "hebrew")]
    grammar: String,
    #[arg(short, long)]
    verbose: bool,
}

#[derive(Args, Clone, Default)]
struct Lexeme {
    /// Root letters, e.g. g,m,r (hebrew)
    #[arg(long)]
    root: Option<String>,
    /// Stem id, CUT or LICK (tonkawa)
    #[arg(long)]
    stem: Option<String>,
    /// Category expression, e.g. "b1 & fut & third & pl"
    #[arg(long)]
    cat: Option<String>,
    /// Tonkawa flags: comma-separated plobj, progressive (or none)
    #[arg(long)]
    flags: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenMode {
    Minimize,
    Greedy,
    Oracle,
}

#[derive(Clone, Copy, ValueEnum)]
enum ParseMode {
    Oracle,
    Synthesis,
}

#[derive(Subcommand)]
enum Command {
    /// Realize a lexeme in a category
    Generate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        lexeme: Lexeme,
        #[arg(long, value_enum, default_value = "minimize")]
        mode: GenMode,
        #[arg(long)]
        oracle: Option<PathBuf>,
    },
    /// Analyse a surface form
    Parse {
        surface: String,
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "oracle")]
        mode: ParseMode,
        #[arg(long)]
        oracle: Option<PathBuf>,
    },
    /// Compile the paradigm into a proof oracle
    Compile {
        #[command(flatten)]
        common: Common,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Leave the root letter tree out of the oracle
        #[arg(long)]
        abstract_lexicon: bool,
    },
    /// Print every derivable cell of a lexeme
    Paradigm {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        lexeme: Lexeme,
        #[arg(long, value_enum, default_value = "minimize")]
        mode: GenMode,
        #[arg(long)]
        oracle: Option<PathBuf>,
    },
    /// Show grammar or oracle details, or all candidates of a goal
    Inspect {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        lexeme: Lexeme,
        #[arg(long)]
        oracle: Option<PathBuf>,
        /// Print each candidate's positions
        #[arg(long)]
        dump: bool,
    },
}

enum Failure {
    NoResult,
    Input(String),
    Mismatch(String),
    Compile(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::NoResult => 1,
            Failure::Input(_) => 2,
            Failure::Mismatch(_) => 3,
            Failure::Compile(_) => 4,
        }
    }
}

impl From<FragmentError> for Failure {
    fn from(e: FragmentError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::FingerprintMismatch { .. } | OracleError::MissingFingerprint => {
                Failure::Mismatch(e.to_string())
            }
            other => Failure::Input(other.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::NoResult => {}
                Failure::Input(m) | Failure::Mismatch(m) | Failure::Compile(m) => {
                    eprintln!("dpm: {m}")
                }
            }
            ExitCode::from(f.code())
        }
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Generate {
            common,
            lexeme,
            mode,
            oracle,
        } => generate(&common, &lexeme, mode, oracle.as_deref()),
        Command::Parse {
            surface,
            common,
            mode,
            oracle,
        } => parse(&common, &surface, mode, oracle.as_deref()),
        Command::Compile {
            common,
            output,
            abstract_lexicon,
        } => compile(&common, output.as_deref(), abstract_lexicon),
        Command::Paradigm {
            common,
            lexeme,
            mode,
            oracle,
        } => paradigm(&common, &lexeme, mode, oracle.as_deref()),
        Command::Inspect {
            common,
            lexeme,
            oracle,
            dump,
        } => inspect(&common, &lexeme, oracle.as_deref(), dump),
    }
}

fn load(common: &Common) -> Result<Fragment, Failure> {
    let language: Language = common.grammar.parse()?;
    Ok(Fragment::load(language)?)
}

fn load_oracle(fragment: &Fragment, path: &Path) -> Result<Oracle, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok(Oracle::from_text(&text, &fragment.grammar)?)
}

fn lexeme_of(fragment: &Fragment, lexeme: &Lexeme) -> Result<Option<String>, Failure> {
    let given = match fragment.language {
        Language::Hebrew => lexeme.root.clone(),
        Language::Tonkawa => lexeme.stem.clone().or_else(|| lexeme.root.clone()),
    };
    if let Some(l) = &given {
        fragment.lexeme_term(l)?;
    }
    Ok(given)
}

/// The category from `--cat`, or for Tonkawa from `--flags` (flags not
/// listed are negated).
fn category_of(fragment: &Fragment, lexeme: &Lexeme) -> Result<Option<LeafSet>, Failure> {
    if let Some(c) = &lexeme.cat {
        return Ok(Some(fragment.category(c)?));
    }
    let Some(flags) = &lexeme.flags else {
        return Ok(None);
    };
    if fragment.language != Language::Tonkawa {
        return Err(Failure::Input("--flags only applies to tonkawa".into()));
    }
    let mut plobj = false;
    let mut prog = false;
    for f in flags.split(',').map(str::trim) {
        match f.to_ascii_lowercase().as_str() {
            "" | "none" => {}
            "plobj" | "plural-object" => plobj = true,
            "prog" | "progressive" => prog = true,
            other => return Err(Failure::Input(format!("unknown flag `{other}`"))),
        }
    }
    let expr = format!(
        "{}plobj & {}prog",
        if plobj { "" } else { "~" },
        if prog { "" } else { "~" }
    );
    Ok(Some(fragment.category(&expr)?))
}

fn gen_mode<'o>(mode: GenMode, oracle: Option<&'o Oracle>) -> Result<GenerationMode<'o>, Failure> {
    Ok(match mode {
        GenMode::Minimize => GenerationMode::Minimize,
        GenMode::Greedy => GenerationMode::Greedy,
        GenMode::Oracle => GenerationMode::Oracle(
            oracle.ok_or_else(|| Failure::Input("--mode oracle needs --oracle".into()))?,
        ),
    })
}

fn sem_suffix(sem: &Option<String>) -> String {
    sem.as_ref().map(|s| format!("\t{s}")).unwrap_or_default()
}

fn print_candidate(fragment: &Fragment, c: &Candidate) {
    println!(
        "# candidate\t{}\t{}\t{}\t{}{}",
        c.surface,
        iop::mark_string(&c.marks),
        c.disharmony(),
        fragment.describe(&c.category),
        sem_suffix(&c.sem)
    );
}

fn print_proof(fragment: &Fragment, c: &Candidate) {
    let ids: Vec<&str> = c
        .proof
        .iter()
        .map(|k| fragment.grammar.clause(k).id.as_str())
        .collect();
    println!("# proof\t{}", ids.join(" "));
}

fn generate(common: &Common, lexeme: &Lexeme, mode: GenMode, path: Option<&Path>) -> Outcome {
    let fragment = load(common)?;
    let lex = lexeme_of(&fragment, lexeme)?.ok_or_else(|| {
        Failure::Input("generate needs --root (hebrew) or --stem (tonkawa)".into())
    })?;
    let category = match (category_of(&fragment, lexeme)?, fragment.language) {
        (Some(c), _) => c,
        (None, Language::Tonkawa) => fragment.category("~plobj & ~prog")?,
        (None, Language::Hebrew) => return Err(Failure::Input("generate needs --cat".into())),
    };
    let oracle = path.map(|p| load_oracle(&fragment, p)).transpose()?;
    let (rows, apps) =
        oracle::generate(&fragment, &lex, &category, gen_mode(mode, oracle.as_ref())?)?;
    for r in &rows {
        println!(
            "{}\t{}{}",
            r.surface,
            r.candidate.disharmony(),
            sem_suffix(&r.sem)
        );
        if common.verbose {
            println!("# category\t{}", fragment.describe(&r.category));
            println!("# marks\t{}", iop::mark_string(&r.candidate.marks));
            print_proof(&fragment, &r.candidate);
        }
    }
    if common.verbose {
        println!("# clause_applications\t{apps}");
    }
    if rows.is_empty() {
        return Err(Failure::NoResult);
    }
    Ok(())
}

fn parse(common: &Common, surface: &str, mode: ParseMode, path: Option<&Path>) -> Outcome {
    let fragment = load(common)?;
    let outcome = match mode {
        ParseMode::Oracle => {
            let path = path.ok_or_else(|| {
                Failure::Input("parse needs --oracle unless --mode synthesis".into())
            })?;
            let oracle = load_oracle(&fragment, path)?;
            oracle::parse_guided(&fragment, surface, &oracle)?
        }
        ParseMode::Synthesis => oracle::parse_by_synthesis(&fragment, surface)?,
    };
    let mut grouped: BTreeMap<(String, Option<String>), LeafSet> = BTreeMap::new();
    let cat = fragment.cat_dim();
    let d = fragment.grammar.domain();
    for a in &outcome.analyses {
        let t = d
            .leaf_index(cat, &a.category)
            .expect("analysis tuples are category leaves");
        grouped
            .entry((a.lexeme.clone(), a.sem.clone()))
            .or_insert(LeafSet::EMPTY)
            .insert(t);
    }
    for ((lex, sem), set) in &grouped {
        println!("{lex}\t{}{}", fragment.describe(set), sem_suffix(sem));
    }
    if common.verbose {
        for c in &outcome.candidates {
            print_candidate(&fragment, c);
        }
        println!("# clause_applications\t{}", outcome.clause_applications);
    }
    if grouped.is_empty() {
        return Err(Failure::NoResult);
    }
    Ok(())
}

fn compile(common: &Common, output: Option<&Path>, abstract_lexicon: bool) -> Outcome {
    let fragment = load(common)?;
    let (oracle, report) =
        oracle::compile_paradigm(&fragment, abstract_lexicon).map_err(|e| match e {
            oracle::CompileError::Fragment(f) => Failure::from(f),
            other => Failure::Compile(other.to_string()),
        })?;
    let text = oracle.to_text(&fragment.grammar);
    let stats = [
        format!("cells\t{}", report.cells.len()),
        format!(
            "states\t{}\t{}\t{}",
            report.nfa_states, report.dfa_states, report.min_states
        ),
        format!("transitions\t{}", oracle.dfa.num_transitions()),
    ];
    match output {
        Some(p) => {
            fs::write(p, &text).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?;
            for s in &stats {
                println!("{s}");
            }
        }
        None => {
            print!("{text}");
            for s in &stats {
                eprintln!("# {s}");
            }
        }
    }
    if common.verbose {
        for c in &report.cells {
            println!(
                "# cell\t{}\t{}\t{}{}",
                c.optimum.surface,
                c.optimum.lexeme,
                fragment.tuple_name(c.tuple),
                sem_suffix(&c.optimum.sem)
            );
        }
        println!("# clause_applications\t{}", report.clause_applications);
    }
    Ok(())
}

fn paradigm(common: &Common, lexeme: &Lexeme, mode: GenMode, path: Option<&Path>) -> Outcome {
    let fragment = load(common)?;
    let lexemes: Vec<String> = match (lexeme_of(&fragment, lexeme)?, fragment.language) {
        (Some(l), _) => vec![l],
        (None, Language::Tonkawa) => tonkawa::STEMS
            .iter()
            .map(|(id, _)| id.to_string())
            .collect(),
        (None, Language::Hebrew) => return Err(Failure::Input("paradigm needs --root".into())),
    };
    let category = category_of(&fragment, lexeme)?.unwrap_or(fragment.all_categories());
    let oracle = path.map(|p| load_oracle(&fragment, p)).transpose()?;
    let mode = gen_mode(mode, oracle.as_ref())?;
    let mut any = false;
    for lex in &lexemes {
        let (rows, _) = oracle::generate(&fragment, lex, &category, mode)?;
        for r in &rows {
            any = true;
            println!(
                "{}\t{}\t{}{}",
                r.surface,
                r.lexeme,
                fragment.describe(&r.category),
                sem_suffix(&r.sem)
            );
            if common.verbose {
                println!(
                    "# marks\t{}\t{}",
                    iop::mark_string(&r.candidate.marks),
                    r.candidate.disharmony()
                );
            }
        }
    }
    if !any {
        return Err(Failure::NoResult);
    }
    Ok(())
}

fn inspect(common: &Common, lexeme: &Lexeme, path: Option<&Path>, dump: bool) -> Outcome {
    let fragment = load(common)?;
    let g = &fragment.grammar;
    if let Some(p) = path {
        let oracle = load_oracle(&fragment, p)?;
        println!("grammar\t{}", oracle.grammar);
        println!("mode\t{}", oracle.mode());
        println!("fingerprint\t{}", oracle.fingerprint);
        println!("states\t{}", oracle.dfa.num_states());
        println!("transitions\t{}", oracle.dfa.num_transitions());
        println!(
            "finals\t{}",
            oracle.dfa.finals.iter().filter(|f| **f).count()
        );
        return Ok(());
    }
    let lex = lexeme_of(&fragment, lexeme)?;
    let category = category_of(&fragment, lexeme)?;
    if lex.is_none() && category.is_none() {
        println!("grammar\t{}", g.name());
        println!("fingerprint\t{}", g.fingerprint());
        println!("clauses\t{}", g.clauses().len());
        if common.verbose {
            for c in g.clauses() {
                println!("# clause\t{}\t{}", c.id, c.line);
            }
        }
        return Ok(());
    }
    let category = category.unwrap_or(fragment.all_categories());
    let goal = fragment.generation_goal(lex.as_deref(), &category, false)?;
    let (cands, stats) = iop::candidates(g, fragment.inventory, &goal, &SolveOptions::recording());
    for c in &cands {
        println!(
            "{}\t{}\t{}\t{}{}",
            c.surface,
            iop::mark_string(&c.marks),
            c.disharmony(),
            fragment.describe(&c.category),
            sem_suffix(&c.sem)
        );
        if dump {
            print!("{}", dump_word(&fragment, &c.word));
        }
        if common.verbose {
            print_proof(&fragment, c);
        }
    }
    if common.verbose {
        println!("# clause_applications\t{}", stats.clause_applications);
    }
    if cands.is_empty() {
        return Err(Failure::NoResult);
    }
    Ok(())
}

fn dump_word(fragment: &Fragment, word: &Word) -> String {
    word.dump(fragment.grammar.domain(), fragment.inventory)
}
