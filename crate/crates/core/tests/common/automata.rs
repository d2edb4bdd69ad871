use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dpm_core::fsa::{Dfa, Nfa};

pub const MAX_LEN: usize = 12;

pub fn random_nfa(rng: &mut ChaCha8Rng) -> (Nfa, u32) {
    let states = rng.gen_range(1..=8);
    let symbols = rng.gen_range(1..=4);
    let mut nfa = Nfa::new();
    while nfa.num_states() < states {
        nfa.add_state();
    }
    let density = rng.gen_range(0.05..0.4);
    for from in 0..states {
        for sym in 0..symbols {
            for to in 0..states {
                if rng.gen_bool(density) {
                    nfa.add_transition(from, sym, to);
                }
            }
        }
        if rng.gen_bool(0.3) {
            nfa.finals.insert(from);
        }
    }
    (nfa, symbols)
}

/// Bit-parallel subset table for an NFA with at most 8 states.
pub struct NfaTable {
    next: Vec<[u8; 4]>,
    finals: u8,
    start: u8,
}

impl NfaTable {
    pub fn new(nfa: &Nfa) -> Self {
        let n = nfa.trans.len();
        let mut single = vec![[0u8; 4]; n];
        for (q, row) in nfa.trans.iter().enumerate() {
            for (sym, targets) in row {
                for t in targets {
                    single[q][*sym as usize] |= 1 << t;
                }
            }
        }
        let next = (0..256usize)
            .map(|mask| {
                let mut out = [0u8; 4];
                for (q, row) in single.iter().enumerate() {
                    if mask >> q & 1 == 1 {
                        for s in 0..4 {
                            out[s] |= row[s];
                        }
                    }
                }
                out
            })
            .collect();
        let finals = nfa.finals.iter().fold(0u8, |acc, q| acc | 1 << q);
        NfaTable {
            next,
            finals,
            start: 1 << nfa.start,
        }
    }
}

/// Dense transition table with an explicit dead state at index `len`.
pub fn dfa_table(dfa: &Dfa, symbols: u32) -> (Vec<[usize; 4]>, Vec<bool>) {
    let dead = dfa.num_states();
    let mut next = vec![[dead; 4]; dead + 1];
    for (q, row) in next.iter_mut().enumerate().take(dead) {
        for s in 0..symbols {
            if let Some(t) = dfa.step(q, s) {
                row[s as usize] = t;
            }
        }
    }
    let mut finals = dfa.finals.clone();
    finals.push(false);
    (next, finals)
}

pub struct Walk<'a> {
    nfa: &'a NfaTable,
    dfa: &'a (Vec<[usize; 4]>, Vec<bool>),
    min: &'a (Vec<[usize; 4]>, Vec<bool>),
    symbols: usize,
    word: Vec<u32>,
    visited: u64,
}

impl Walk<'_> {
    fn go(&mut self, n: u8, d: usize, m: usize) {
        self.visited += 1;
        let accept = n & self.nfa.finals != 0;
        assert_eq!(
            accept, self.dfa.1[d],
            "determinized automaton disagrees on {:?}",
            self.word
        );
        assert_eq!(
            accept, self.min.1[m],
            "minimized automaton disagrees on {:?}",
            self.word
        );
        if self.word.len() == MAX_LEN {
            return;
        }
        for s in 0..self.symbols {
            self.word.push(s as u32);
            self.go(
                self.nfa.next[n as usize][s],
                self.dfa.0[d][s],
                self.min.0[m][s],
            );
            self.word.pop();
        }
    }
}

/// Pairs of states with the same language, found by exploring the product
/// automaton from each pair (missing transitions go to a dead sink).
pub fn equivalent_pairs(dfa: &Dfa, symbols: u32) -> Vec<(usize, usize)> {
    let (next, finals) = dfa_table(dfa, symbols);
    let n = dfa.num_states();
    let mut out = Vec::new();
    for p in 0..n {
        for q in p + 1..n {
            let mut seen = std::collections::HashSet::new();
            let mut stack = vec![(p, q)];
            let mut distinct = false;
            while let Some((a, b)) = stack.pop() {
                if !seen.insert((a, b)) {
                    continue;
                }
                if finals[a] != finals[b] {
                    distinct = true;
                    break;
                }
                stack.extend(next[a].iter().copied().zip(next[b].iter().copied()));
            }
            if !distinct {
                out.push((p, q));
            }
        }
    }
    out
}

/// Determinizes and minimizes `count` seeded random NFAs and checks every
/// string up to [`MAX_LEN`] against all three automata. Returns the number
/// of strings walked.
pub fn check_random_automata(count: u64) -> u64 {
    let mut visited = 0;
    for seed in 0..count {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (nfa, symbols) = random_nfa(&mut rng);
        let dfa = Dfa::determinize(&nfa);
        let min = dfa.minimize();
        assert!(min.num_states() <= dfa.num_states().max(1), "seed {seed}");
        assert!(
            equivalent_pairs(&min, symbols).is_empty(),
            "seed {seed}: not minimal"
        );
        let table = NfaTable::new(&nfa);
        let d = dfa_table(&dfa, symbols);
        let m = dfa_table(&min, symbols);
        let mut walk = Walk {
            nfa: &table,
            dfa: &d,
            min: &m,
            symbols: symbols as usize,
            word: Vec::new(),
            visited: 0,
        };
        walk.go(table.start, dfa.start, min.start);
        visited += walk.visited;
        for _ in 0..50 {
            let len = rng.gen_range(0..=MAX_LEN);
            let w: Vec<u32> = (0..len).map(|_| rng.gen_range(0..symbols)).collect();
            assert_eq!(nfa.accepts(&w), min.accepts(&w), "seed {seed} on {w:?}");
            assert_eq!(dfa.accepts(&w), min.accepts(&w), "seed {seed} on {w:?}");
        }
    }
    visited
}
