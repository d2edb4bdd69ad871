//! Finite automata over clause indices: linear cell automata, union, subset
//! construction, Hopcroft minimization and an AT&T-style text format.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

use crate::engine::ProofOracle;
use crate::grammar::ClauseIndex;

pub type Symbol = u32;

/// Nondeterministic automaton without ε-transitions.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Nfa {
    pub start: usize,
    pub finals: BTreeSet<usize>,
    pub trans: Vec<BTreeMap<Symbol, BTreeSet<usize>>>,
}

impl Nfa {
    /// One non-final start state.
    pub fn new() -> Self {
        Nfa {
            start: 0,
            finals: BTreeSet::new(),
            trans: vec![BTreeMap::new()],
        }
    }

    pub fn add_state(&mut self) -> usize {
        self.trans.push(BTreeMap::new());
        self.trans.len() - 1
    }

    pub fn add_transition(&mut self, from: usize, symbol: Symbol, to: usize) {
        self.trans[from].entry(symbol).or_default().insert(to);
    }

    pub fn num_states(&self) -> usize {
        self.trans.len()
    }

    /// The chain accepting exactly `word`.
    pub fn linear(word: &[Symbol]) -> Self {
        let mut n = Nfa::new();
        let mut cur = n.start;
        for s in word {
            let next = n.add_state();
            n.add_transition(cur, *s, next);
            cur = next;
        }
        n.finals.insert(cur);
        n
    }

    /// An automaton for the union of the languages, through a fresh start
    /// state that copies every component start's outgoing transitions.
    pub fn union<'a>(parts: impl IntoIterator<Item = &'a Nfa>) -> Self {
        let mut u = Nfa::new();
        for p in parts {
            let offset = u.trans.len();
            for (q, edges) in p.trans.iter().enumerate() {
                let mut mapped = BTreeMap::new();
                for (s, tos) in edges {
                    mapped.insert(*s, tos.iter().map(|t| t + offset).collect::<BTreeSet<_>>());
                }
                u.trans.push(mapped);
                if p.finals.contains(&q) {
                    u.finals.insert(q + offset);
                }
            }
            let edges = p.trans[p.start].clone();
            for (s, tos) in edges {
                for t in tos {
                    u.add_transition(0, s, t + offset);
                }
            }
            if p.finals.contains(&p.start) {
                u.finals.insert(0);
            }
        }
        u
    }

    pub fn accepts(&self, word: &[Symbol]) -> bool {
        let mut cur: BTreeSet<usize> = [self.start].into();
        for s in word {
            cur = cur
                .iter()
                .filter_map(|q| self.trans[*q].get(s))
                .flat_map(|t| t.iter().copied())
                .collect();
            if cur.is_empty() {
                return false;
            }
        }
        cur.iter().any(|q| self.finals.contains(q))
    }

    pub fn alphabet(&self) -> BTreeSet<Symbol> {
        self.trans.iter().flat_map(|e| e.keys().copied()).collect()
    }
}

/// Deterministic automaton with a partial transition function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa {
    pub start: usize,
    pub finals: Vec<bool>,
    pub trans: Vec<BTreeMap<Symbol, usize>>,
}

impl Default for Dfa {
    fn default() -> Self {
        Dfa {
            start: 0,
            finals: vec![false],
            trans: vec![BTreeMap::new()],
        }
    }
}

impl Dfa {
    pub fn num_states(&self) -> usize {
        self.trans.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.trans.iter().map(BTreeMap::len).sum()
    }

    pub fn step(&self, state: usize, symbol: Symbol) -> Option<usize> {
        self.trans[state].get(&symbol).copied()
    }

    pub fn accepts(&self, word: &[Symbol]) -> bool {
        word.iter()
            .try_fold(self.start, |q, s| self.step(q, *s))
            .is_some_and(|q| self.finals[q])
    }

    pub fn alphabet(&self) -> BTreeSet<Symbol> {
        self.trans.iter().flat_map(|e| e.keys().copied()).collect()
    }

    /// Subset construction over the reachable subsets.
    pub fn determinize(nfa: &Nfa) -> Dfa {
        let start: BTreeSet<usize> = [nfa.start].into();
        let mut index: HashMap<BTreeSet<usize>, usize> = HashMap::new();
        let mut subsets = vec![start.clone()];
        index.insert(start, 0);
        let mut dfa = Dfa {
            start: 0,
            finals: Vec::new(),
            trans: Vec::new(),
        };
        let mut i = 0;
        while i < subsets.len() {
            let set = subsets[i].clone();
            dfa.finals.push(set.iter().any(|q| nfa.finals.contains(q)));
            let mut moves: BTreeMap<Symbol, BTreeSet<usize>> = BTreeMap::new();
            for q in &set {
                for (s, tos) in &nfa.trans[*q] {
                    moves.entry(*s).or_default().extend(tos);
                }
            }
            let mut edges = BTreeMap::new();
            for (s, target) in moves {
                let id = *index.entry(target.clone()).or_insert_with(|| {
                    subsets.push(target);
                    subsets.len() - 1
                });
                edges.insert(s, id);
            }
            dfa.trans.push(edges);
            i += 1;
        }
        dfa
    }

    /// Hopcroft partition refinement on the completed automaton, then
    /// removal of states that are unreachable or cannot reach a final state.
    /// The result is renumbered canonically.
    pub fn minimize(&self) -> Dfa {
        let trimmed = self.trim();
        let n = trimmed.num_states();
        let sink = n;
        let alphabet: Vec<Symbol> = trimmed.alphabet().into_iter().collect();
        let total = |q: usize, a: Symbol| -> usize {
            if q == sink {
                sink
            } else {
                trimmed.step(q, a).unwrap_or(sink)
            }
        };
        // inverse[a][q] = predecessors of q on a
        let mut inverse: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); n + 1]; alphabet.len()];
        for (ai, a) in alphabet.iter().enumerate() {
            for q in 0..=n {
                inverse[ai][total(q, *a)].push(q);
            }
        }
        let finals: Vec<usize> = (0..n).filter(|q| trimmed.finals[*q]).collect();
        let others: Vec<usize> = (0..=n)
            .filter(|q| *q == sink || !trimmed.finals[*q])
            .collect();
        let mut classes: Vec<Vec<usize>> = Vec::new();
        let mut class_of = vec![0usize; n + 1];
        for block in [finals, others] {
            if !block.is_empty() {
                for q in &block {
                    class_of[*q] = classes.len();
                }
                classes.push(block);
            }
        }
        let mut in_work = vec![true; classes.len()];
        let mut work: Vec<usize> = (0..classes.len()).collect();
        while let Some(splitter) = work.pop() {
            in_work[splitter] = false;
            for inv in &inverse {
                let mut hit: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
                for q in &classes[splitter] {
                    for p in &inv[*q] {
                        hit.entry(class_of[*p]).or_default().push(*p);
                    }
                }
                for (y, inside) in hit {
                    if inside.len() == classes[y].len() {
                        continue;
                    }
                    let inside: BTreeSet<usize> = inside.into_iter().collect();
                    let (keep, moved): (Vec<usize>, Vec<usize>) =
                        classes[y].iter().partition(|q| inside.contains(q));
                    let new = classes.len();
                    for q in &moved {
                        class_of[*q] = new;
                    }
                    classes[y] = keep;
                    classes.push(moved);
                    in_work.push(false);
                    if in_work[y] {
                        in_work[new] = true;
                        work.push(new);
                    } else {
                        let smaller = if classes[y].len() <= classes[new].len() {
                            y
                        } else {
                            new
                        };
                        in_work[smaller] = true;
                        work.push(smaller);
                    }
                }
            }
        }
        let sink_class = class_of[sink];
        let mut quotient = Dfa {
            start: class_of[trimmed.start],
            finals: vec![false; classes.len()],
            trans: vec![BTreeMap::new(); classes.len()],
        };
        for q in 0..n {
            let c = class_of[q];
            quotient.finals[c] = trimmed.finals[q];
            for (a, t) in &trimmed.trans[q] {
                let tc = class_of[*t];
                if tc != sink_class {
                    quotient.trans[c].insert(*a, tc);
                }
            }
        }
        if quotient.start == sink_class {
            return Dfa::default();
        }
        quotient.trim()
    }

    /// Keeps states on some path from the start to a final state and
    /// renumbers them in breadth-first order (symbols ascending).
    pub fn trim(&self) -> Dfa {
        let n = self.num_states();
        let mut reach = vec![false; n];
        let mut queue = VecDeque::from([self.start]);
        reach[self.start] = true;
        while let Some(q) = queue.pop_front() {
            for t in self.trans[q].values() {
                if !reach[*t] {
                    reach[*t] = true;
                    queue.push_back(*t);
                }
            }
        }
        let mut pred: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (q, edges) in self.trans.iter().enumerate() {
            for t in edges.values() {
                pred[*t].push(q);
            }
        }
        let mut coreach = vec![false; n];
        let mut stack: Vec<usize> = (0..n).filter(|q| self.finals[*q]).collect();
        for q in &stack {
            coreach[*q] = true;
        }
        while let Some(q) = stack.pop() {
            for p in &pred[q] {
                if !coreach[*p] {
                    coreach[*p] = true;
                    stack.push(*p);
                }
            }
        }
        if !coreach[self.start] {
            return Dfa::default();
        }
        let keep = |q: usize| reach[q] && coreach[q];
        let mut order = vec![usize::MAX; n];
        let mut out = Dfa {
            start: 0,
            finals: Vec::new(),
            trans: Vec::new(),
        };
        let mut queue = VecDeque::from([self.start]);
        order[self.start] = 0;
        let mut seq = vec![self.start];
        while let Some(q) = queue.pop_front() {
            for t in self.trans[q].values() {
                if keep(*t) && order[*t] == usize::MAX {
                    order[*t] = seq.len();
                    seq.push(*t);
                    queue.push_back(*t);
                }
            }
        }
        for q in &seq {
            out.finals.push(self.finals[*q]);
            out.trans.push(
                self.trans[*q]
                    .iter()
                    .filter(|(_, t)| keep(**t))
                    .map(|(a, t)| (*a, order[*t]))
                    .collect(),
            );
        }
        out
    }

    /// `src\tdst\tsymbol` lines, then one line per final state, after
    /// `# key value` header lines. The start state is 0.
    pub fn to_text(&self, headers: &[(&str, &str)], name: impl Fn(Symbol) -> String) -> String {
        let canon = if self.start == 0 {
            self.clone()
        } else {
            self.trim()
        };
        let mut out = String::new();
        for (k, v) in headers {
            writeln!(out, "# {k} {v}").unwrap();
        }
        for (q, edges) in canon.trans.iter().enumerate() {
            for (a, t) in edges {
                writeln!(out, "{q}\t{t}\t{}", name(*a)).unwrap();
            }
        }
        for (q, f) in canon.finals.iter().enumerate() {
            if *f {
                writeln!(out, "{q}").unwrap();
            }
        }
        out
    }

    /// Reads [`Dfa::to_text`] output; returns the automaton and its headers.
    pub fn from_text(
        text: &str,
        resolve: impl Fn(&str) -> Option<Symbol>,
    ) -> Result<(Dfa, Vec<(String, String)>), FsaError> {
        let mut headers = Vec::new();
        let mut edges: Vec<(usize, usize, Symbol)> = Vec::new();
        let mut finals = Vec::new();
        let mut max_state = 0;
        let state = |s: &str, line: usize| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| FsaError::Malformed { line })
        };
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let l = raw.trim_end_matches('\r');
            if l.trim().is_empty() {
                continue;
            }
            if let Some(h) = header_line(l) {
                headers.push(h);
                continue;
            }
            let fields: Vec<&str> = l.split('\t').collect();
            match fields.as_slice() {
                [q] => {
                    let q = state(q, line)?;
                    max_state = max_state.max(q);
                    finals.push(q);
                }
                [src, dst, sym] => {
                    let (s, d) = (state(src, line)?, state(dst, line)?);
                    let a = resolve(sym.trim()).ok_or_else(|| FsaError::UnknownSymbol {
                        line,
                        symbol: sym.trim().to_string(),
                    })?;
                    max_state = max_state.max(s).max(d);
                    edges.push((s, d, a));
                }
                _ => return Err(FsaError::Malformed { line }),
            }
        }
        let mut dfa = Dfa {
            start: 0,
            finals: vec![false; max_state + 1],
            trans: vec![BTreeMap::new(); max_state + 1],
        };
        for q in finals {
            dfa.finals[q] = true;
        }
        for (s, d, a) in edges {
            if let Some(old) = dfa.trans[s].insert(a, d) {
                if old != d {
                    return Err(FsaError::Nondeterministic { state: s });
                }
            }
        }
        Ok((dfa, headers))
    }

    /// Structural equality up to state renaming (both sides reachable).
    pub fn isomorphic(&self, other: &Dfa) -> bool {
        self.trim() == other.trim()
    }
}

fn header_line(line: &str) -> Option<(String, String)> {
    let h = line.strip_prefix('#')?.trim();
    let (k, v) = h.split_once(' ').unwrap_or((h, ""));
    Some((k.to_string(), v.trim().to_string()))
}

/// The `# key value` comment lines of an automaton file, without parsing
/// the transitions.
pub fn headers(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter_map(|l| header_line(l.trim_end_matches('\r')))
        .collect()
}

impl ProofOracle for Dfa {
    fn start(&self) -> usize {
        self.start
    }

    fn step(&self, state: usize, clause: ClauseIndex) -> Option<usize> {
        Dfa::step(self, state, clause.0)
    }

    fn accepts(&self, state: usize) -> bool {
        self.finals[state]
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FsaError {
    #[error("line {line}: malformed automaton line")]
    Malformed { line: usize },
    #[error("line {line}: unknown symbol `{symbol}`")]
    UnknownSymbol { line: usize, symbol: String },
    #[error("state {state} has two transitions on one symbol")]
    Nondeterministic { state: usize },
}
