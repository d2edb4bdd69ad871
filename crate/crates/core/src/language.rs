//! A loaded grammar together with its inventory, category syntax and goal
//! builders.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::feature::{DimId, FeatureId, LeafSet, TypeConstraint};
use crate::grammar::{Grammar, GrammarError, Query, Term};
use crate::prosody::{self, Inventory, SpellingError};
use crate::{hebrew, tonkawa};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Language {
    Hebrew,
    Tonkawa,
}

impl Language {
    pub const ALL: [Language; 2] = [Language::Hebrew, Language::Tonkawa];

    pub fn name(self) -> &'static str {
        match self {
            Language::Hebrew => "hebrew",
            Language::Tonkawa => "tonkawa",
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Language {
    type Err = FragmentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "hebrew" => Ok(Language::Hebrew),
            "tonkawa" => Ok(Language::Tonkawa),
            _ => Err(FragmentError::UnknownGrammar(s.to_string())),
        }
    }
}

#[derive(Debug, Error)]
pub enum FragmentError {
    #[error("unknown grammar `{0}` (expected hebrew or tonkawa)")]
    UnknownGrammar(String),
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error("not a category expression: {0}")]
    Category(String),
    #[error("bad lexeme `{0}`: {1}")]
    Lexeme(String, String),
    #[error(transparent)]
    Spelling(#[from] SpellingError),
    #[error("the abstract lexicon is only defined for hebrew")]
    NoAbstractLexicon,
}

/// One lexical analysis: lexeme, category set and semantics.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Analysis {
    pub lexeme: String,
    pub category: String,
    pub sem: Option<String>,
}

pub struct Fragment {
    pub language: Language,
    pub grammar: Grammar,
    pub inventory: &'static Inventory,
    cat_dim: DimId,
    cat_feature: FeatureId,
}

impl fmt::Debug for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Fragment")
            .field("grammar", &self.grammar)
            .finish()
    }
}

impl Fragment {
    pub fn load(language: Language) -> Result<Self, FragmentError> {
        let (grammar, inventory) = match language {
            Language::Hebrew => (hebrew::grammar()?, &hebrew::INVENTORY),
            Language::Tonkawa => (tonkawa::grammar()?, &tonkawa::INVENTORY),
        };
        let d = grammar.domain();
        let cat_dim = d
            .dimension("cat")
            .expect("grammars declare a cat dimension");
        let cat_feature = d.feature("cat").expect("prosody declares cat");
        Ok(Fragment {
            language,
            grammar,
            inventory,
            cat_dim,
            cat_feature,
        })
    }

    pub fn hebrew() -> Self {
        Self::load(Language::Hebrew).expect("the Hebrew grammar builds")
    }

    pub fn tonkawa() -> Self {
        Self::load(Language::Tonkawa).expect("the Tonkawa grammar builds")
    }

    pub fn cat_dim(&self) -> DimId {
        self.cat_dim
    }

    pub fn all_categories(&self) -> LeafSet {
        LeafSet::full(self.grammar.domain().dim_size(self.cat_dim))
    }

    /// The individual category tuples, in leaf order.
    pub fn tuples(&self) -> Vec<usize> {
        (0..self.grammar.domain().dim_size(self.cat_dim)).collect()
    }

    pub fn tuple_name(&self, leaf: usize) -> &str {
        self.grammar.domain().leaf_name(self.cat_dim, leaf)
    }

    /// Parses a category expression such as `b1 & fut & ~first`.
    pub fn category(&self, src: &str) -> Result<LeafSet, FragmentError> {
        let c = self
            .grammar
            .type_formula(src)
            .map_err(|e| FragmentError::Category(format!("{src}: {e}")))?;
        if c.dim != self.cat_dim {
            return Err(FragmentError::Category(format!("{src}: not a category")));
        }
        if c.leaves.is_empty() {
            return Err(FragmentError::Category(format!(
                "{src}: denotes no category"
            )));
        }
        Ok(c.leaves)
    }

    /// Per-slot value lists (slots are the `.`-separated parts of the
    /// tuple names), omitting slots whose values are unrestricted; falls
    /// back to listing tuples when the set is not a product.
    pub fn describe(&self, set: &LeafSet) -> String {
        let d = self.grammar.domain();
        let names: Vec<Vec<&str>> = self
            .tuples()
            .iter()
            .map(|l| d.leaf_name(self.cat_dim, *l).split('.').collect())
            .collect();
        let members: Vec<&Vec<&str>> = set.iter().map(|l| &names[l]).collect();
        if members.is_empty() {
            return "none".to_string();
        }
        let slots = names[0].len();
        let mut values: Vec<Vec<&str>> = vec![Vec::new(); slots];
        let mut all: Vec<Vec<&str>> = vec![Vec::new(); slots];
        for (i, slot) in values.iter_mut().enumerate() {
            for n in &names {
                if !all[i].contains(&n[i]) {
                    all[i].push(n[i]);
                }
            }
            for m in &members {
                if !slot.contains(&m[i]) {
                    slot.push(m[i]);
                }
            }
        }
        let product: usize = values.iter().map(Vec::len).product();
        if product != members.len() {
            return members
                .iter()
                .map(|m| m.join("."))
                .collect::<Vec<_>>()
                .join(" ; ");
        }
        let parts: Vec<String> = values
            .iter()
            .zip(&all)
            .filter(|(v, a)| v.len() < a.len())
            .map(|(v, _)| v.join("|"))
            .collect();
        if parts.is_empty() {
            "any".to_string()
        } else {
            parts.join(" ")
        }
    }

    /// The term for a lexeme: a root letter list such as `g.m.r` for
    /// Hebrew, a stem id such as `CUT` for Tonkawa.
    pub fn lexeme_term(&self, lexeme: &str) -> Result<String, FragmentError> {
        let bad = |why: &str| FragmentError::Lexeme(lexeme.to_string(), why.to_string());
        match self.language {
            Language::Hebrew => {
                let letters: String = lexeme
                    .chars()
                    .filter(|c| !matches!(c, '.' | ',' | ' ' | '-'))
                    .collect();
                let segs = self
                    .inventory
                    .read_surface(&letters)
                    .map_err(|e| bad(&e.to_string()))?;
                if segs.len() != 3 {
                    return Err(bad("roots have three letters"));
                }
                let mut out = Vec::new();
                for s in segs {
                    if self.inventory.segment(s.leaf).is_none_or(|x| x.vowel) {
                        return Err(bad("root letters are consonants"));
                    }
                    out.push(prosody::quote(s.leaf));
                }
                Ok(format!("[{}]", out.join(",")))
            }
            Language::Tonkawa => tonkawa::STEMS
                .iter()
                .find(|(id, _)| id.eq_ignore_ascii_case(lexeme.trim()))
                .map(|(_, leaf)| leaf.to_string())
                .ok_or_else(|| bad("expected CUT or LICK")),
        }
    }

    fn entry(&self, abstract_lexicon: bool) -> Result<&'static str, FragmentError> {
        match (abstract_lexicon, self.language) {
            (false, _) => Ok("verbform"),
            (true, Language::Hebrew) => Ok("abstract_verbform"),
            (true, Language::Tonkawa) => Err(FragmentError::NoAbstractLexicon),
        }
    }

    fn with_category(&self, query: Query, category: &LeafSet) -> Query {
        if *category == self.all_categories() {
            return query;
        }
        let cat = Term::Feat(
            self.cat_feature,
            Box::new(Term::Type(TypeConstraint {
                dim: self.cat_dim,
                leaves: *category,
            })),
        );
        Query {
            term: Term::And(vec![cat, query.term]),
            var_names: query.var_names,
        }
    }

    /// `verbform(Lex, _)`, with the lexeme pinned if given and the category
    /// imposed before the derivation starts.
    pub fn generation_goal(
        &self,
        lexeme: Option<&str>,
        category: &LeafSet,
        abstract_lexicon: bool,
    ) -> Result<Query, FragmentError> {
        let lex = match lexeme {
            Some(l) => format!("Lex & {}", self.lexeme_term(l)?),
            None => "Lex".to_string(),
        };
        let q = self
            .grammar
            .query(&format!("{}({lex}, _)", self.entry(abstract_lexicon)?))?;
        Ok(self.with_category(q, category))
    }

    /// The surface pinned position by position, then `verbform(Lex, _)`.
    pub fn parse_goal(
        &self,
        surface: &str,
        category: &LeafSet,
        abstract_lexicon: bool,
    ) -> Result<Query, FragmentError> {
        let segs = self.inventory.read_surface(surface)?;
        let text = format!(
            "{} & {}(Lex, _)",
            prosody::surface_goal(&segs),
            self.entry(abstract_lexicon)?
        );
        Ok(self.with_category(self.grammar.query(&text)?, category))
    }

    /// The lexical-access step of abstract-lexicon parsing:
    /// `root_letter_tree(Letters)` for one category tuple.
    pub fn lexicon_goal(&self, lexeme: &str, tuple: usize) -> Result<Query, FragmentError> {
        if self.language != Language::Hebrew {
            return Err(FragmentError::NoAbstractLexicon);
        }
        let q = self
            .grammar
            .query(&format!("root_letter_tree({})", self.lexeme_term(lexeme)?))?;
        Ok(self.with_category(q, &LeafSet::singleton(tuple)))
    }

    /// Splits a candidate's category into one analysis per tuple.
    pub fn analyses(&self, lexeme: &str, category: &LeafSet, sem: Option<&str>) -> Vec<Analysis> {
        category
            .iter()
            .map(|t| Analysis {
                lexeme: lexeme.to_string(),
                category: self.tuple_name(t).to_string(),
                sem: sem.map(str::to_string),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn category_syntax() {
        let h = Fragment::hebrew();
        let c = h.category("b1 & past & third & sg & masc").unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(h.describe(&c), "b1 past third sg masc");
        let c = h.category("b2 & fut & third & pl").unwrap();
        assert_eq!(h.describe(&c), "b2 fut third pl");
        let c = h
            .category("b1 & (past ; pres) & sg & masc & third")
            .unwrap();
        assert_eq!(h.describe(&c), "b1 past|pres third sg masc");
        assert_eq!(h.describe(&h.all_categories()), "any");
        assert!(h.category("b1 & b2").is_err());
        assert!(h.category("vowel").is_err());
        assert!(h.category("b9").is_err());
        let t = Fragment::tonkawa();
        assert_eq!(
            t.describe(&t.category("plobj & ~prog").unwrap()),
            "+plobj -prog"
        );
    }

    #[test]
    fn lexemes() {
        let h = Fragment::hebrew();
        assert_eq!(h.lexeme_term("g.m.r").unwrap(), "[g,m,r]");
        assert_eq!(h.lexeme_term("gmr").unwrap(), "[g,m,r]");
        assert_eq!(h.lexeme_term("'.m.r").unwrap(), "[glottal,m,r]");
        assert!(h.lexeme_term("g.a.r").is_err());
        assert!(h.lexeme_term("g.m").is_err());
        let t = Fragment::tonkawa();
        assert_eq!(t.lexeme_term("cut").unwrap(), "cut");
        assert!(t.lexeme_term("RUN").is_err());
        assert!(t.generation_goal(None, &t.all_categories(), true).is_err());
    }

    #[test]
    fn language_names() {
        assert_eq!("Hebrew".parse::<Language>().unwrap(), Language::Hebrew);
        assert!("klingon".parse::<Language>().is_err());
    }
}
