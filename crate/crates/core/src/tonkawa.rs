//! The Tonkawa verb fragment: two stems with three alternating vowels each.

use crate::feature::{DomainError, TypeDomain};
use crate::grammar::{Grammar, GrammarBuilder, GrammarError};
use crate::prosody::{self, Inventory, Segment};

pub const STEMS: [(&str, &str); 2] = [("CUT", "cut"), ("LICK", "lick")];

/// Category leaves: plural object and progressive flags.
pub const CATEGORIES: [&str; 4] = [
    "-plobj.-prog",
    "+plobj.-prog",
    "-plobj.+prog",
    "+plobj.+prog",
];

pub static INVENTORY: Inventory = Inventory {
    segments: &[
        Segment::vowel("a", false, false, true, false),
        Segment::vowel("e", true, false, false, false),
        Segment::vowel("i", true, false, false, true),
        Segment::vowel("o", false, true, false, false),
        Segment::consonant("glottal", "'").with_aliases(&["?"]),
        Segment::consonant("c", "c"),
        Segment::consonant("l", "l"),
        Segment::consonant("n", "n"),
        Segment::consonant("p", "p"),
        Segment::consonant("t", "t"),
        Segment::consonant("w", "w"),
    ],
    glides: &[],
};

pub const SOURCE: &str = r#"verbform(Lex, Category) :=
   word & affixes(Lex) & cat:Category.

affixes(Lex) := stem(Lex, o(end)) & cat:(~plobj & ~prog).
affixes(Lex) := we(stem(Lex, o(end))) & cat:(plobj & ~prog).
affixes(Lex) := stem(Lex, n(o(end))) & cat:(prog & ~plobj).

stem(cut, S) := cut(S).
stem(lick, S) := lick(S).

cut(S) := obl(is(p), x_0(is(i), obl(is(c),
   x_0(is(e), obl(is(n), x_0(is(a), S)))))).
lick(S) := obl(is(n), x_0(is(e), obl(is(t),
   x_0(is(a), obl(is(l), x_0(is(e), S)))))).

we(More) := self:'+ini' & obl(is(w), obl(is(e), More)).
n(More) := obl(is(n), More).
o(More) := obl(is(o), obl(is(glottal) & self:'+fin', More)).
"#;

pub fn domain() -> Result<TypeDomain, DomainError> {
    let mut d = prosody::base_domain(&INVENTORY)?;
    let cat = d.add_dimension("cat", &CATEGORIES)?;
    d.define("plobj", cat, &["+plobj.-prog", "+plobj.+prog"])?;
    d.define("prog", cat, &["-plobj.+prog", "+plobj.+prog"])?;
    let lexemes: Vec<&str> = STEMS.iter().map(|(_, l)| *l).collect();
    d.add_dimension("lex", &lexemes)?;
    Ok(d)
}

pub fn grammar() -> Result<Grammar, GrammarError> {
    GrammarBuilder::new("tonkawa", domain()?)
        .module("prosody", prosody::SOURCE)
        .module("tonkawa", SOURCE)
        .alternation("x_0", 2, 1)
        .branch_relation("stem")
        .build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{SolveOptions, Solver};
    use crate::prosody::Word;

    fn surfaces(g: &Grammar, goal: &str) -> Vec<String> {
        let q = g.query(goal).unwrap();
        let (sols, _) = Solver::new(g).solve(&q, &SolveOptions::default());
        sols.iter()
            .map(|s| INVENTORY.surface(g.domain(), &Word::read(&s.graph, s.root).unwrap()))
            .collect()
    }

    #[test]
    fn first_candidate_in_zero_first_order_is_attested() {
        let g = grammar().unwrap();
        let first = |goal: &str| surfaces(&g, goal).into_iter().next();
        assert_eq!(
            first("verbform(cut, ~plobj & ~prog)").as_deref(),
            Some("picno'")
        );
        assert_eq!(
            first("verbform(cut, plobj & ~prog)").as_deref(),
            Some("wepceno'")
        );
        assert_eq!(
            first("verbform(cut, prog & ~plobj)").as_deref(),
            Some("picnano'")
        );
        assert_eq!(
            first("verbform(lick, ~plobj & ~prog)").as_deref(),
            Some("netlo'")
        );
        assert_eq!(
            first("verbform(lick, plobj & ~prog)").as_deref(),
            Some("wentalo'")
        );
        assert_eq!(
            first("verbform(lick, prog & ~plobj)").as_deref(),
            Some("netleno'")
        );
    }

    #[test]
    fn both_flags_have_no_affix_row() {
        let g = grammar().unwrap();
        assert!(surfaces(&g, "verbform(cut, plobj & prog)").is_empty());
    }

    #[test]
    fn glottal_reads_with_either_spelling() {
        let a = INVENTORY.read_surface("picno'").unwrap();
        let b = INVENTORY.read_surface("picno?").unwrap();
        assert_eq!(a, b);
    }
}
