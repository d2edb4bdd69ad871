//! The Incremental Optimization Principle: among the realizations of a goal,
//! prefer zero alternants as early as possible.

use std::cmp::Ordering;

use num_bigint::BigUint;

use crate::engine::{ClauseOrder, ProofSequence, Solution, SolveOptions, SolveStats, Solver};
use crate::feature::{LeafSet, NodeId, Store};
use crate::grammar::{ClauseIndex, Grammar, Query};
use crate::prosody::{Inventory, Mark, ReadError, Word};

/// Disharmony of a markedness vector: unmarked ↦ 01, marked ↦ 10, read as
/// one binary number. Panics on an empty vector.
pub fn disharmony(marks: &[Mark]) -> BigUint {
    assert!(!marks.is_empty(), "empty markedness vector");
    let mut bytes = Vec::with_capacity(marks.len().div_ceil(4));
    let mut acc = 0u8;
    for (i, m) in marks.iter().enumerate() {
        acc = (acc << 2) | if *m == Mark::Marked { 0b10 } else { 0b01 };
        if i % 4 == 3 {
            bytes.push(acc);
            acc = 0;
        }
    }
    let mut value = BigUint::from_bytes_be(&bytes);
    let rest = marks.len() % 4;
    if rest > 0 {
        value = (value << (2 * rest)) + BigUint::from(acc);
    }
    value
}

/// Orders markedness vectors as their disharmony values order: shorter
/// first, then lexicographically with unmarked < marked.
pub fn compare_marks(a: &[Mark], b: &[Mark]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

/// `01 01 10 ...`
pub fn mark_string(marks: &[Mark]) -> String {
    marks
        .iter()
        .map(|m| if *m == Mark::Marked { "10" } else { "01" })
        .collect::<Vec<_>>()
        .join(" ")
}

/// A realized word with everything needed to rank and report it.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub surface: String,
    pub marks: Vec<Mark>,
    pub category: LeafSet,
    pub sem: Option<String>,
    pub lexeme: String,
    pub proof: ProofSequence,
    pub word: Word,
}

impl Candidate {
    pub fn from_solution(
        grammar: &Grammar,
        inventory: &Inventory,
        solution: &Solution,
    ) -> Result<Candidate, ReadError> {
        let d = grammar.domain();
        let g = &solution.graph;
        let word = Word::read(g, solution.root)?;
        let marks = word.marks().ok_or(ReadError::NotAWord)?;
        let cat_f = d.feature("cat").ok_or(ReadError::Missing("cat"))?;
        let cat_dim = d.dimension("cat").ok_or(ReadError::Missing("cat"))?;
        let cat = g.get(solution.root, cat_f);
        let category = cat
            .and_then(|c| g.constraint(c, cat_dim))
            .unwrap_or(LeafSet::full(d.dim_size(cat_dim)));
        let sem = read_sem(grammar, solution);
        let lexeme = solution
            .binding("Lex")
            .map(|n| read_lexeme(g, inventory, n))
            .unwrap_or_default();
        Ok(Candidate {
            surface: inventory.surface(d, &word),
            marks,
            category,
            sem,
            lexeme,
            proof: solution.proof.clone(),
            word,
        })
    }

    pub fn disharmony(&self) -> BigUint {
        disharmony(&self.marks)
    }

    /// The clause choices that identify the lexical branch.
    pub fn branch(&self, grammar: &Grammar) -> Vec<ClauseIndex> {
        self.proof
            .iter()
            .filter(|c| grammar.is_branch_clause(*c))
            .collect()
    }
}

/// The `cat:sem` value of a solution, when resolved to one atom.
pub fn read_sem(grammar: &Grammar, solution: &Solution) -> Option<String> {
    let d = grammar.domain();
    let g = &solution.graph;
    let cat = g.get(solution.root, d.feature("cat")?)?;
    let dim = d.dimension("sem")?;
    let i = g.constraint(g.get(cat, d.feature("sem")?)?, dim)?.only()?;
    Some(d.leaf_name(dim, i).to_string())
}

/// A root letter list spelled `g.m.r`, or a lexeme leaf in upper case.
/// Underspecified letters print as `{...}`.
pub fn read_lexeme(g: &Store, inventory: &Inventory, node: NodeId) -> String {
    let d = g.domain();
    if let (Some(first), Some(rest)) = (d.feature("first"), d.feature("rest")) {
        if g.get(node, first).is_some() {
            let seg = d.dimension("seg").expect("seg dimension");
            let mut letters = Vec::new();
            let mut cur = Some(node);
            while let Some(n) = cur {
                let Some(f) = g.get(n, first) else { break };
                let set = g
                    .constraint(f, seg)
                    .unwrap_or(LeafSet::full(d.dim_size(seg)));
                letters.push(match set.only() {
                    Some(i) => {
                        let leaf = d.leaf_name(seg, i);
                        inventory
                            .segment(leaf)
                            .map_or(leaf, |s| s.spelling)
                            .to_string()
                    }
                    None => format!("{{{}}}", d.leaf_names(seg, &set).join(",")),
                });
                cur = g.get(n, rest);
            }
            return letters.join(".");
        }
    }
    if let Some(lex) = d.dimension("lex") {
        if let Some(i) = g.constraint(node, lex).and_then(|s| s.only()) {
            return d.leaf_name(lex, i).to_uppercase();
        }
    }
    String::new()
}

/// Every candidate of a goal, in canonical enumeration order.
pub fn candidates(
    grammar: &Grammar,
    inventory: &Inventory,
    query: &Query,
    opts: &SolveOptions<'_>,
) -> (Vec<Candidate>, SolveStats) {
    let (sols, stats) = Solver::new(grammar).solve(query, opts);
    let cands = sols
        .iter()
        .filter_map(|s| Candidate::from_solution(grammar, inventory, s).ok())
        .collect();
    (cands, stats)
}

/// The candidates of minimal disharmony, ties included, in enumeration order.
pub fn minimal(cands: Vec<Candidate>) -> Vec<Candidate> {
    let Some(best) = cands
        .iter()
        .map(|c| c.marks.clone())
        .min_by(|a, b| compare_marks(a, b))
    else {
        return Vec::new();
    };
    cands
        .into_iter()
        .filter(|c| compare_marks(&c.marks, &best) == Ordering::Equal)
        .collect()
}

/// Collects all candidates and keeps the least disharmonic ones.
pub fn generate_and_minimize(
    grammar: &Grammar,
    inventory: &Inventory,
    query: &Query,
) -> (Vec<Candidate>, SolveStats) {
    let (cands, stats) = candidates(grammar, inventory, query, &SolveOptions::recording());
    (minimal(cands), stats)
}

/// Depth-first search trying the zero alternant first at every X/∅
/// position; the first solution is the optimum. With
/// [`ClauseOrder::RealizeFirst`] the preference is mirrored (zeros as late
/// as possible).
pub fn greedy_iop(
    grammar: &Grammar,
    inventory: &Inventory,
    query: &Query,
    order: ClauseOrder,
) -> (Option<Candidate>, SolveStats) {
    let opts = SolveOptions::recording().with_order(order);
    let mut found = None;
    let stats = Solver::new(grammar).for_each(query, &opts, |s| {
        match Candidate::from_solution(grammar, inventory, &s) {
            Ok(c) => {
                found = Some(c);
                std::ops::ControlFlow::Break(())
            }
            Err(_) => std::ops::ControlFlow::Continue(()),
        }
    });
    (found, stats)
}
