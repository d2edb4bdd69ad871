//! Offline paradigm compilation into a proof oracle, oracle-guided solving
//! and the two parsers built on top of it.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use thiserror::Error;

use crate::engine::{ProofSequence, Solution, SolveOptions, SolveStats, Solver};
use crate::feature::LeafSet;
use crate::fsa::{self, Dfa, FsaError, Nfa};
use crate::grammar::{ClauseIndex, Grammar, Query};
use crate::iop::{self, Candidate};
use crate::language::{Analysis, Fragment, FragmentError};

/// One paradigm cell: a category tuple on one lexical branch.
#[derive(Clone, Debug)]
pub struct Cell {
    pub tuple: usize,
    pub branch: Vec<ClauseIndex>,
    pub optimum: Candidate,
}

#[derive(Clone, Debug, Default)]
pub struct CompileReport {
    pub cells: Vec<Cell>,
    pub tuples_tried: usize,
    pub nfa_states: usize,
    pub dfa_states: usize,
    pub min_states: usize,
    pub clause_applications: u64,
}

#[derive(Debug, Error)]
pub enum CompileError {
    #[error(transparent)]
    Fragment(#[from] FragmentError),
    #[error("cell {cell} has {} optimal candidates: {}", surfaces.len(), surfaces.join(", "))]
    NotSingleton { cell: String, surfaces: Vec<String> },
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error(transparent)]
    Fsa(#[from] FsaError),
    #[error("oracle file has no fingerprint header")]
    MissingFingerprint,
    #[error("oracle was compiled for grammar fingerprint {found}, loaded grammar is {expected}")]
    FingerprintMismatch { expected: String, found: String },
    #[error(transparent)]
    Fragment(#[from] FragmentError),
}

/// A compiled paradigm automaton bound to a grammar build.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Oracle {
    pub dfa: Dfa,
    pub fingerprint: String,
    pub grammar: String,
    pub abstract_lexicon: bool,
}

impl Oracle {
    pub fn mode(&self) -> &'static str {
        if self.abstract_lexicon {
            "abstract"
        } else {
            "lexicon"
        }
    }

    pub fn to_text(&self, grammar: &Grammar) -> String {
        self.dfa.to_text(
            &[
                ("fingerprint", &self.fingerprint),
                ("grammar", &self.grammar),
                ("mode", self.mode()),
            ],
            |s| grammar.clause(ClauseIndex(s)).id.clone(),
        )
    }

    /// Loads an oracle and checks it against the grammar build.
    pub fn from_text(text: &str, grammar: &Grammar) -> Result<Oracle, OracleError> {
        let headers = fsa::headers(text);
        let header = |k: &str| headers.iter().find(|(h, _)| h == k).map(|(_, v)| v.clone());
        let fingerprint = header("fingerprint").ok_or(OracleError::MissingFingerprint)?;
        if fingerprint != grammar.fingerprint() {
            return Err(OracleError::FingerprintMismatch {
                expected: grammar.fingerprint().to_string(),
                found: fingerprint,
            });
        }
        let (dfa, _) = Dfa::from_text(text, |s| grammar.clause_by_id(s).map(|c| c.0))?;
        Ok(Oracle {
            dfa,
            fingerprint,
            grammar: header("grammar").unwrap_or_else(|| grammar.name().to_string()),
            abstract_lexicon: header("mode").as_deref() == Some("abstract"),
        })
    }

    pub fn check(&self, grammar: &Grammar) -> Result<(), OracleError> {
        if self.fingerprint != grammar.fingerprint() {
            return Err(OracleError::FingerprintMismatch {
                expected: grammar.fingerprint().to_string(),
                found: self.fingerprint.clone(),
            });
        }
        Ok(())
    }
}

/// The optimal candidates of one category tuple, one per lexical branch.
pub fn cells_for_tuple(
    fragment: &Fragment,
    tuple: usize,
    abstract_lexicon: bool,
) -> Result<(Vec<Cell>, u64), CompileError> {
    let g = &fragment.grammar;
    let goal = fragment.generation_goal(None, &LeafSet::singleton(tuple), abstract_lexicon)?;
    let (cands, stats) = iop::candidates(g, fragment.inventory, &goal, &SolveOptions::recording());
    let mut branches: BTreeMap<Vec<ClauseIndex>, Vec<Candidate>> = BTreeMap::new();
    for c in cands {
        branches.entry(c.branch(g)).or_default().push(c);
    }
    let mut cells = Vec::new();
    for (branch, group) in branches {
        let mut best = iop::minimal(group);
        best.dedup_by(|a, b| a.proof == b.proof);
        if best.len() != 1 {
            let ids: Vec<&str> = branch.iter().map(|c| g.clause(*c).id.as_str()).collect();
            return Err(CompileError::NotSingleton {
                cell: format!("{} [{}]", fragment.tuple_name(tuple), ids.join(" ")),
                surfaces: best.iter().map(|c| c.surface.clone()).collect(),
            });
        }
        cells.push(Cell {
            tuple,
            branch,
            optimum: best.pop().unwrap(),
        });
    }
    Ok((cells, stats.clause_applications))
}

/// Generate-and-minimize for every category tuple with a free lexeme,
/// then union, determinize and minimize the optimal proofs.
pub fn compile_paradigm(
    fragment: &Fragment,
    abstract_lexicon: bool,
) -> Result<(Oracle, CompileReport), CompileError> {
    let tuples = fragment.tuples();
    let per_tuple: Vec<Result<(Vec<Cell>, u64), CompileError>> = tuples
        .par_iter()
        .map(|t| cells_for_tuple(fragment, *t, abstract_lexicon))
        .collect();
    let mut report = CompileReport {
        tuples_tried: tuples.len(),
        ..Default::default()
    };
    for r in per_tuple {
        let (cells, apps) = r?;
        report.cells.extend(cells);
        report.clause_applications += apps;
    }
    let chains: Vec<Nfa> = report
        .cells
        .iter()
        .map(|c| Nfa::linear(&c.optimum.proof.iter().map(|k| k.0).collect::<Vec<_>>()))
        .collect();
    let union = Nfa::union(&chains);
    let dfa = Dfa::determinize(&union);
    let min = dfa.minimize();
    report.nfa_states = union.num_states();
    report.dfa_states = dfa.num_states();
    report.min_states = min.num_states();
    let oracle = Oracle {
        dfa: min,
        fingerprint: fragment.grammar.fingerprint().to_string(),
        grammar: fragment.grammar.name().to_string(),
        abstract_lexicon,
    };
    Ok((oracle, report))
}

/// Solving where every clause selection must be licensed by the oracle and
/// solutions must end in an accepting state.
pub fn oracle_guided_solve(
    grammar: &Grammar,
    query: &Query,
    oracle: &Oracle,
) -> Result<(Vec<Solution>, SolveStats), OracleError> {
    oracle.check(grammar)?;
    let opts = SolveOptions::recording().with_oracle(&oracle.dfa);
    Ok(Solver::new(grammar).solve(query, &opts))
}

/// Parse results with the work spent finding them.
#[derive(Clone, Debug, Default)]
pub struct ParseOutcome {
    pub analyses: BTreeSet<Analysis>,
    pub candidates: Vec<Candidate>,
    pub clause_applications: u64,
}

/// Oracle-guided parsing. With an abstract-lexicon oracle, each analysis is
/// then checked against the root letter tree, which also supplies `sem`.
pub fn parse_guided(
    fragment: &Fragment,
    surface: &str,
    oracle: &Oracle,
) -> Result<ParseOutcome, OracleError> {
    let g = &fragment.grammar;
    let goal = fragment.parse_goal(surface, &fragment.all_categories(), oracle.abstract_lexicon)?;
    let (sols, stats) = oracle_guided_solve(g, &goal, oracle)?;
    let mut out = ParseOutcome {
        clause_applications: stats.clause_applications,
        ..Default::default()
    };
    for s in &sols {
        let Ok(c) = Candidate::from_solution(g, fragment.inventory, s) else {
            continue;
        };
        if oracle.abstract_lexicon {
            for t in c.category.iter() {
                let q = fragment.lexicon_goal(&c.lexeme, t)?;
                let (lex, st) = Solver::new(g).solve(&q, &SolveOptions::default());
                out.clause_applications += st.clause_applications;
                for l in &lex {
                    let sem = iop::read_sem(g, l);
                    out.analyses.extend(fragment.analyses(
                        &c.lexeme,
                        &LeafSet::singleton(t),
                        sem.as_deref(),
                    ));
                }
            }
        } else {
            out.analyses
                .extend(fragment.analyses(&c.lexeme, &c.category, c.sem.as_deref()));
        }
        out.candidates.push(c);
    }
    Ok(out)
}

/// Unguided parsing: every derivation of the surface, optimal or not.
pub fn parse_unguided(fragment: &Fragment, surface: &str) -> Result<ParseOutcome, FragmentError> {
    let g = &fragment.grammar;
    let goal = fragment.parse_goal(surface, &fragment.all_categories(), false)?;
    let (cands, stats) = iop::candidates(g, fragment.inventory, &goal, &SolveOptions::recording());
    let mut out = ParseOutcome {
        clause_applications: stats.clause_applications,
        ..Default::default()
    };
    for c in &cands {
        out.analyses
            .extend(fragment.analyses(&c.lexeme, &c.category, c.sem.as_deref()));
    }
    out.candidates = cands;
    Ok(out)
}

/// Analysis by synthesis: derive the surface, then regenerate the optimal
/// forms of each analysis and keep those whose optimum is the input.
pub fn parse_by_synthesis(
    fragment: &Fragment,
    surface: &str,
) -> Result<ParseOutcome, FragmentError> {
    let first = parse_unguided(fragment, surface)?;
    let g = &fragment.grammar;
    let mut out = ParseOutcome {
        clause_applications: first.clause_applications,
        ..Default::default()
    };
    let mut optima: HashMap<(String, usize), Vec<String>> = HashMap::new();
    for c in &first.candidates {
        let mut accepted = LeafSet::EMPTY;
        for t in c.category.iter() {
            let key = (c.lexeme.clone(), t);
            if !optima.contains_key(&key) {
                let goal =
                    fragment.generation_goal(Some(&c.lexeme), &LeafSet::singleton(t), false)?;
                let (best, st) = iop::generate_and_minimize(g, fragment.inventory, &goal);
                out.clause_applications += st.clause_applications;
                optima.insert(key.clone(), best.into_iter().map(|b| b.surface).collect());
            }
            if optima[&key].contains(&c.surface) {
                accepted.insert(t);
            }
        }
        if !accepted.is_empty() {
            out.analyses
                .extend(fragment.analyses(&c.lexeme, &accepted, c.sem.as_deref()));
            let mut kept = c.clone();
            kept.category = accepted;
            out.candidates.push(kept);
        }
    }
    Ok(out)
}

/// The recorded optimal proofs of a compile, grouped by tuple.
pub fn optimal_proofs(report: &CompileReport) -> BTreeMap<usize, BTreeSet<ProofSequence>> {
    let mut out: BTreeMap<usize, BTreeSet<ProofSequence>> = BTreeMap::new();
    for c in &report.cells {
        out.entry(c.tuple)
            .or_default()
            .insert(c.optimum.proof.clone());
    }
    out
}

/// How `generate` picks the optimal realization of each category tuple.
#[derive(Clone, Copy)]
pub enum GenerationMode<'o> {
    /// Collect all candidates, keep the least disharmonic.
    Minimize,
    /// Zero-first depth-first search, first solution.
    Greedy,
    /// Only derivations licensed by a compiled oracle.
    Oracle(&'o Oracle),
}

/// One output form with every category tuple that realizes it.
#[derive(Clone, Debug)]
pub struct Row {
    pub surface: String,
    pub lexeme: String,
    pub sem: Option<String>,
    pub category: LeafSet,
    pub candidate: Candidate,
}

/// Realizes a lexeme in every tuple of `category`, one tuple at a time,
/// merging tuples that share a form, lexeme and semantics. Rows are in
/// order of their first tuple.
pub fn generate(
    fragment: &Fragment,
    lexeme: &str,
    category: &LeafSet,
    mode: GenerationMode<'_>,
) -> Result<(Vec<Row>, u64), OracleError> {
    let g = &fragment.grammar;
    let abstract_lexicon = matches!(mode, GenerationMode::Oracle(o) if o.abstract_lexicon);
    if let GenerationMode::Oracle(o) = mode {
        o.check(g)?;
    }
    let tuples: Vec<usize> = category.iter().collect();
    let per_tuple: Vec<Result<(Vec<Candidate>, u64), OracleError>> = tuples
        .par_iter()
        .map(|t| {
            let goal = fragment.generation_goal(
                Some(lexeme),
                &LeafSet::singleton(*t),
                abstract_lexicon,
            )?;
            let inv = fragment.inventory;
            let (cands, apps) = match mode {
                GenerationMode::Minimize => {
                    let (c, s) = iop::generate_and_minimize(g, inv, &goal);
                    (c, s.clause_applications)
                }
                GenerationMode::Greedy => {
                    let (c, s) =
                        iop::greedy_iop(g, inv, &goal, crate::engine::ClauseOrder::ZeroFirst);
                    (c.into_iter().collect(), s.clause_applications)
                }
                GenerationMode::Oracle(o) => {
                    let (sols, s) = oracle_guided_solve(g, &goal, o)?;
                    let c = sols
                        .iter()
                        .filter_map(|x| Candidate::from_solution(g, inv, x).ok())
                        .collect();
                    (c, s.clause_applications)
                }
            };
            Ok((cands, apps))
        })
        .collect();
    let mut rows: Vec<Row> = Vec::new();
    let mut total = 0;
    for (t, r) in tuples.iter().zip(per_tuple) {
        let (cands, apps) = r?;
        total += apps;
        for c in cands {
            match rows
                .iter_mut()
                .find(|r| r.surface == c.surface && r.lexeme == c.lexeme && r.sem == c.sem)
            {
                Some(row) => row.category.insert(*t),
                None => rows.push(Row {
                    surface: c.surface.clone(),
                    lexeme: c.lexeme.clone(),
                    sem: c.sem.clone(),
                    category: LeafSet::singleton(*t),
                    candidate: c,
                }),
            }
        }
    }
    Ok((rows, total))
}
