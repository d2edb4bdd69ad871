//! An exhaustive enumerator that does not rely on the solver's search.
//! Each lexical template is expanded with every choice for its optional
//! vowel slots (absent, or any vowel), the resulting string is pinned
//! position by position and merely checked against the grammar. Marks are
//! computed from the template: realized slots are marked, everything else
//! is unmarked.

use std::collections::BTreeSet;

use dpm_core::engine::{SolveOptions, Solver};
use dpm_core::feature::LeafSet;
use dpm_core::iop::{self, compare_marks, Candidate};
use dpm_core::language::Fragment;
use dpm_core::prosody::{surface_goal, Mark, SurfaceSegment};

#[derive(Clone, Copy)]
pub enum Part {
    Fixed(&'static str),
    Slot,
}

pub type Realization = (Vec<&'static str>, Vec<Mark>);

pub fn expand(parts: &[Part], vowels: &[&'static str]) -> Vec<Realization> {
    let mut out: Vec<Realization> = vec![(Vec::new(), Vec::new())];
    for p in parts {
        let mut next = Vec::new();
        for (segs, marks) in &out {
            match p {
                Part::Fixed(s) => {
                    let mut a = segs.clone();
                    a.push(*s);
                    let mut m = marks.clone();
                    m.push(Mark::Unmarked);
                    next.push((a, m));
                }
                Part::Slot => {
                    next.push((segs.clone(), marks.clone()));
                    for v in vowels {
                        let mut a = segs.clone();
                        a.push(*v);
                        let mut m = marks.clone();
                        m.push(Mark::Marked);
                        next.push((a, m));
                    }
                }
            }
        }
        out = next;
    }
    out
}

pub fn vowels(f: &Fragment) -> Vec<&'static str> {
    f.inventory
        .segments
        .iter()
        .filter(|s| s.vowel)
        .map(|s| s.leaf)
        .collect()
}

pub fn hebrew_templates(root: [&'static str; 3]) -> Vec<Vec<Part>> {
    use Part::*;
    let prefixes: [&[&str]; 2] = [&[], &["i", "i"]];
    let suffixes: [&[&str]; 5] = [&[], &["a"], &["e", "t"], &["i", "m"], &["u"]];
    let mut out = Vec::new();
    for p in prefixes {
        for s in suffixes {
            let mut parts: Vec<Part> = p.iter().map(|x| Fixed(x)).collect();
            parts.extend([Fixed(root[0]), Slot, Fixed(root[1]), Slot, Fixed(root[2])]);
            parts.extend(s.iter().map(|x| Fixed(x)));
            out.push(parts);
        }
    }
    out
}

pub fn tonkawa_templates(stem: [&'static str; 3]) -> Vec<Vec<Part>> {
    use Part::*;
    let prefixes: [&[&str]; 2] = [&[], &["w", "e"]];
    let suffixes: [&[&str]; 2] = [&["o", "glottal"], &["n", "o", "glottal"]];
    let mut out = Vec::new();
    for p in prefixes {
        for s in suffixes {
            let mut parts: Vec<Part> = p.iter().map(|x| Fixed(x)).collect();
            parts.extend([
                Fixed(stem[0]),
                Slot,
                Fixed(stem[1]),
                Slot,
                Fixed(stem[2]),
                Slot,
            ]);
            parts.extend(s.iter().map(|x| Fixed(x)));
            out.push(parts);
        }
    }
    out
}

pub type CandidateSet = BTreeSet<(String, Vec<Mark>)>;

/// Candidate sets of every category tuple at once: each realization is
/// checked with the category left open and credited to every tuple its
/// solutions admit.
pub fn brute_force(f: &Fragment, lexeme: &str, templates: &[Vec<Part>]) -> Vec<CandidateSet> {
    let g = &f.grammar;
    let term = f.lexeme_term(lexeme).unwrap();
    let vowels = vowels(f);
    let solver = Solver::new(g);
    let mut out = vec![BTreeSet::new(); f.tuples().len()];
    for t in templates {
        for (segs, marks) in expand(t, &vowels) {
            let pinned: Vec<SurfaceSegment> = segs
                .iter()
                .map(|&leaf| SurfaceSegment { leaf, onset: None })
                .collect();
            let goal = format!("{} & verbform({term}, _)", surface_goal(&pinned));
            let q = g.query(&goal).unwrap();
            let (sols, _) = solver.solve(&q, &SolveOptions::default());
            for s in &sols {
                let c = Candidate::from_solution(g, f.inventory, s).unwrap();
                assert_eq!(
                    c.marks, marks,
                    "marks of {} disagree with its template",
                    c.surface
                );
                for tuple in c.category.iter() {
                    out[tuple].insert((c.surface.clone(), marks.clone()));
                }
            }
        }
    }
    out
}

pub fn minimal_surfaces(set: &CandidateSet) -> BTreeSet<String> {
    let Some(best) = set
        .iter()
        .map(|(_, m)| m)
        .min_by(|a, b| compare_marks(a, b))
    else {
        return BTreeSet::new();
    };
    set.iter()
        .filter(|(_, m)| compare_marks(m, best).is_eq())
        .map(|(s, _)| s.clone())
        .collect()
}

pub fn check_all_cells(f: &Fragment, lexemes: &[(&str, Vec<Vec<Part>>)]) -> usize {
    let mut nonempty = 0;
    for (lexeme, templates) in lexemes {
        let brute = brute_force(f, lexeme, templates);
        for t in f.tuples() {
            let cell = format!("{lexeme} {}", f.tuple_name(t));
            let goal = f
                .generation_goal(Some(lexeme), &LeafSet::singleton(t), false)
                .unwrap();
            let (cands, _) =
                iop::candidates(&f.grammar, f.inventory, &goal, &SolveOptions::default());
            let solved: CandidateSet = cands
                .iter()
                .map(|c| (c.surface.clone(), c.marks.clone()))
                .collect();
            assert_eq!(brute[t], solved, "candidate sets differ in {cell}");
            let best: BTreeSet<String> =
                iop::minimal(cands).into_iter().map(|c| c.surface).collect();
            assert_eq!(minimal_surfaces(&brute[t]), best, "optima differ in {cell}");
            nonempty += usize::from(!best.is_empty());
        }
    }
    nonempty
}
