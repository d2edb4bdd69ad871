//! The Modern Hebrew verb fragment.

use crate::feature::{DomainError, TypeDomain};
use crate::grammar::{Grammar, GrammarBuilder, GrammarError};
use crate::prosody::{self, Inventory, Segment};

pub const BINYANIM: [&str; 7] = ["b1", "b2", "b3", "b4", "b5", "b6", "b7"];
pub const TENSES: [&str; 4] = ["past", "pres", "fut", "infinitive"];
pub const PERSONS: [&str; 3] = ["first", "second", "third"];
pub const NUMBERS: [&str; 2] = ["sg", "pl"];
pub const GENDERS: [&str; 2] = ["masc", "fem"];

pub const SEMANTICS: [&str; 10] = [
    "FINISH",
    "BE FINISHED",
    "ENCLOSE",
    "BE ENCLOSED",
    "FENCE IN",
    "BE FENCED IN",
    "DEFINE",
    "BE DEFINED",
    "EXCEL",
    "UNKNOWN",
];

pub static INVENTORY: Inventory = Inventory {
    segments: &[
        Segment::vowel("a", false, false, true, false),
        Segment::vowel("e", true, false, false, false),
        Segment::vowel("i", true, false, false, true),
        Segment::vowel("o", false, true, false, false),
        Segment::vowel("u", false, true, false, true),
        Segment::consonant("glottal", "'"),
        Segment::consonant("b", "b"),
        Segment::consonant("d", "d"),
        Segment::consonant("f", "f"),
        Segment::consonant("g", "g"),
        Segment::consonant("h", "h"),
        Segment::consonant("k", "k"),
        Segment::consonant("l", "l"),
        Segment::consonant("m", "m"),
        Segment::consonant("n", "n"),
        Segment::consonant("p", "p"),
        Segment::consonant("q", "q"),
        Segment::consonant("r", "r"),
        Segment::consonant("s", "s"),
        Segment::consonant("t", "t"),
    ],
    glides: &[("i", "j")],
};

/// Verb stems, affixes and the root letter tree.
pub const SOURCE: &str = r#"catval::[sem:atomic].

prosodic_prespecification :=
   ( cat:((b2 & (~(past ; pres))) ; b3 ; b4) &
     self:onset
   ;
     cat:(~((b2 & (~(past ; pres))) ; b3 ; b4))
   ).

v1 := is(low) & cat:(past & b1 ; b7).
v1 := is(round & '-hi') &
        cat:(b1 & ~past).
% b2 future and infinitive take a low first stem vowel (ji.gam.ru).
v1 := is(low) & cat:(b2 & (fut ; infinitive)).
v2 := is(low).
v2 := is(front & '-hi').

'#'(More) := More & self:'+ini' &
   cat:(~fut & ~infinitive &
        ( b1 ; (~pres & (b3 ; b4)) )).

'#'(More) := More &
   self:'-ini' & left:self:'+fin' &
   ( cat:(sg & masc & third & past) &
       left:left:is(~front)
   ; cat:(sg & masc & third & pres) &
       left:left:is(front)
   ).

ji(More) := self:'+ini' &
   obl(is(i), obl(is(i), More)) &
   cat:(fut & third & ((sg & masc) ; pl) &
        (b1 ; b2)).

u(More) := obl(is(u) & self:'+fin', More) &
   left:left:is(~(vowel & ~front)) &
   cat:(pl & ((past & third)
         ; (fut & ~first))).

a(More) := obl(is(a) & self:'+fin', More) &
   left:left:is(~(vowel & ~front)) &
   cat:((past & third & sg & fem)
        ; (pres & sg & fem & b5)).

et(More) :=
   obl(is(e), obl(is(t) & self:'+fin', More)) &
   left:left:is(front) &
   cat:(pres & sg & fem & ~b5).

im(More) :=
   obl(is(i), obl(is(m) & self:'+fin', More)) &
   left:left:is(~(vowel & ~front)) &
   cat:(pres & pl & masc).

stem(C1, C2, C3, Suffixes) :=
   obl(is(C1), x_0(v1, obl(is(C2),
   x_0(v2, obl(is(C3), Suffixes))))).

affixes(Stem, '#'(end)) := '#'(Stem).
affixes(Stem, a(end)) := '#'(Stem).
affixes(Stem, et(end)) := '#'(Stem).
affixes(Stem, im(end)) := '#'(Stem).
affixes(Stem, u(end)) := ji(Stem).

verbform([C1 & consonant, C2 & consonant,
          C3 & consonant], Category) :=
   root_letter_tree([C1, C2, C3]) & word &
   affixes(prosodic_prespecification &
           stem(C1, C2, C3, Suffixes),
           Suffixes) & cat:Category.

% The same word without lexical access, for abstract paradigms.
abstract_verbform([C1 & consonant, C2 & consonant,
                   C3 & consonant], Category) :=
   word &
   affixes(prosodic_prespecification &
           stem(C1, C2, C3, Suffixes),
           Suffixes) & cat:Category.

root_letter_tree([g|Rest]) :=
   root_letter_tree_g(Rest).
root_letter_tree([~g|_]) :=
   cat:sem:'UNKNOWN'.

root_letter_tree_g([m|Rest]) :=
   root_letter_tree_gm(Rest).
root_letter_tree_g([d|Rest]) :=
   root_letter_tree_gd(Rest).
root_letter_tree_g([~m & ~d|_]) :=
   cat:sem:'UNKNOWN'.

root_letter_tree_gm([r]) :=
   cat:(b1 & sem:'FINISH'
       ; b2 & sem:'BE FINISHED').
root_letter_tree_gm([~r|_]) :=
   cat:sem:'UNKNOWN'.
root_letter_tree_gd([r]) :=
   cat:( b1 & sem:'ENCLOSE'
       ; b2 & sem:'BE ENCLOSED'
       ; b3 & sem:'FENCE IN'
       ; b4 & sem:'BE FENCED IN'
       ; b5 & sem:'DEFINE'
       ; b6 & sem:'BE DEFINED'
       ; b7 & sem:'EXCEL'
       ).
root_letter_tree_gd([~r|_]) :=
   cat:sem:'UNKNOWN'.
"#;

/// Relations whose clause choices select a lexical branch.
pub const BRANCH_RELATIONS: [&str; 4] = [
    "root_letter_tree",
    "root_letter_tree_g",
    "root_letter_tree_gm",
    "root_letter_tree_gd",
];

/// Category leaves are `binyan.tense.person.number.gender` tuples; the
/// feature values name the corresponding sets of tuples.
pub fn domain() -> Result<TypeDomain, DomainError> {
    let mut d = prosody::base_domain(&INVENTORY)?;
    let mut leaves = Vec::new();
    for b in BINYANIM {
        for t in TENSES {
            for p in PERSONS {
                for n in NUMBERS {
                    for g in GENDERS {
                        leaves.push(format!("{b}.{t}.{p}.{n}.{g}"));
                    }
                }
            }
        }
    }
    let refs: Vec<&str> = leaves.iter().map(String::as_str).collect();
    let cat = d.add_dimension("cat", &refs)?;
    let features: [&[&str]; 5] = [&BINYANIM, &TENSES, &PERSONS, &NUMBERS, &GENDERS];
    for (slot, values) in features.iter().enumerate() {
        for v in values.iter() {
            let members: Vec<&str> = leaves
                .iter()
                .filter(|l| l.split('.').nth(slot) == Some(*v))
                .map(String::as_str)
                .collect();
            d.define(v, cat, &members)?;
        }
    }
    d.add_dimension("sem", &SEMANTICS)?;
    Ok(d)
}

pub fn grammar() -> Result<Grammar, GrammarError> {
    let mut b = GrammarBuilder::new("hebrew", domain()?)
        .module("prosody", prosody::SOURCE)
        .module("hebrew", SOURCE)
        .alternation("x_0", 2, 1);
    for r in BRANCH_RELATIONS {
        b = b.branch_relation(r);
    }
    b.build()
}
