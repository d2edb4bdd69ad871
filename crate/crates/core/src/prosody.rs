//! Segmental positions, concatenation, X/∅ alternation and the CV(C)
//! syllable canon shared by all grammars, plus readers that turn solved
//! feature graphs back into words.

use std::fmt;

use thiserror::Error;

use crate::feature::{DimId, DomainError, FeatureId, LeafSet, NodeId, Store, TypeDomain};

/// The shared prosody module.
pub const SOURCE: &str = r#"% Positions are phon nodes: self holds the segment bundle, left/right the
% neighbours, cat the word category and mark the markedness of realization.
phon::[self:bundle, left:phon, right:phon, cat:catval, mark:atomic].
bundle::[seg:segment, prom:atomic].
nelist::[first:segment, rest:list].

conc(Self, Segments) :=
   Self &
   right:(Segments & left:Self & cat:Cat) &
   cat:Cat &
   classify_position_in_word &
   constraints.

classify_position_in_word :=
   right:self:'-ini' & left:self:'-fin'.

x_0(_, Segments) := Segments.
x_0(X, Segments) := mark:marked &
   conc(X, Segments).

obl(X, Segments) := mark:unmarked &
   conc(X, Segments).

is(Segment) := self:seg:Segment.

% Nuclei are vowels. Onsets are consonants or glides and open onto a
% nucleus; codas close a nucleus.
syllabify :=
   ( self:(nucleus & seg:vowel)
   ; self:(onset & seg:(consonant ; '+hi')) & right:self:nucleus
   ; self:(coda & seg:consonant) & left:self:nucleus
   ).

shape :=
   ( self:(nucleus & seg:vowel) &
     left:self:onset
   ; self:(~nucleus) &
       ( self:onset & left:self:(~onset)
       ; self:coda & left:self:(~coda)
       )
   ).

constraints := syllabify & shape.

word := self:('+ini' & prom:up & onset).
end := left:self:('+fin' & ~onset) &
   self:'-fin'.
"#;

/// One phoneme of a grammar's inventory.
#[derive(Clone, Copy, Debug)]
pub struct Segment {
    /// Leaf name in the `seg` dimension.
    pub leaf: &'static str,
    /// Canonical spelling.
    pub spelling: &'static str,
    /// Extra spellings accepted on input.
    pub aliases: &'static [&'static str],
    pub vowel: bool,
    pub front: bool,
    pub round: bool,
    pub low: bool,
    pub high: bool,
}

type Pred<'a> = &'a dyn Fn(&Segment) -> bool;

impl Segment {
    pub const fn consonant(leaf: &'static str, spelling: &'static str) -> Self {
        Segment {
            leaf,
            spelling,
            aliases: &[],
            vowel: false,
            front: false,
            round: false,
            low: false,
            high: false,
        }
    }

    pub const fn vowel(
        leaf: &'static str,
        front: bool,
        round: bool,
        low: bool,
        high: bool,
    ) -> Self {
        Segment {
            leaf,
            spelling: leaf,
            aliases: &[],
            vowel: true,
            front,
            round,
            low,
            high,
        }
    }

    pub const fn with_aliases(mut self, aliases: &'static [&'static str]) -> Self {
        self.aliases = aliases;
        self
    }
}

/// A grammar's segment inventory and spelling conventions.
#[derive(Clone, Copy, Debug)]
pub struct Inventory {
    pub segments: &'static [Segment],
    /// High vowels realized as onsets are spelled as glides: `(leaf, spelling)`.
    pub glides: &'static [(&'static str, &'static str)],
}

/// How one input character constrains a position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceSegment {
    pub leaf: &'static str,
    /// `Some(true)`: must be an onset; `Some(false)`: must not be one.
    pub onset: Option<bool>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SpellingError {
    #[error("empty surface form")]
    Empty,
    #[error("unknown character `{ch}` at offset {offset}")]
    Unknown { ch: char, offset: usize },
}

impl Inventory {
    pub fn segment(&self, leaf: &str) -> Option<&Segment> {
        self.segments.iter().find(|s| s.leaf == leaf)
    }

    /// Adds the `seg` dimension and the phonological classes
    /// vowel, consonant, front, round, low, '+hi' and '-hi' (empty classes
    /// are left undeclared).
    pub fn declare(&self, domain: &mut TypeDomain) -> Result<DimId, DomainError> {
        let leaves: Vec<&str> = self.segments.iter().map(|s| s.leaf).collect();
        let dim = domain.add_dimension("seg", &leaves)?;
        let class = |pred: &dyn Fn(&Segment) -> bool| -> Vec<&str> {
            self.segments
                .iter()
                .filter(|s| pred(s))
                .map(|s| s.leaf)
                .collect()
        };
        let classes: [(&str, Pred); 7] = [
            ("vowel", &|s| s.vowel),
            ("consonant", &|s| !s.vowel),
            ("front", &|s| s.vowel && s.front),
            ("round", &|s| s.vowel && s.round),
            ("low", &|s| s.vowel && s.low),
            ("+hi", &|s| s.vowel && s.high),
            ("-hi", &|s| s.vowel && !s.high),
        ];
        for (name, pred) in classes {
            let members = class(pred);
            if !members.is_empty() {
                domain.define(name, dim, &members)?;
            }
        }
        Ok(dim)
    }

    /// Spells a position; underspecified segments print as `{a,b,...}`.
    pub fn spell(&self, domain: &TypeDomain, p: &Position) -> String {
        let seg = domain.dimension("seg").expect("seg dimension");
        match p.seg.only() {
            Some(i) => {
                let leaf = domain.leaf_name(seg, i);
                if p.role == Some(Role::Onset) {
                    if let Some((_, g)) = self.glides.iter().find(|(l, _)| *l == leaf) {
                        return g.to_string();
                    }
                }
                self.segment(leaf)
                    .map(|s| s.spelling)
                    .unwrap_or(leaf)
                    .to_string()
            }
            None => format!("{{{}}}", domain.leaf_names(seg, &p.seg).join(",")),
        }
    }

    pub fn surface(&self, domain: &TypeDomain, word: &Word) -> String {
        word.positions
            .iter()
            .map(|p| self.spell(domain, p))
            .collect()
    }

    /// Splits a spelled form into segments, longest spelling first.
    pub fn read_surface(&self, text: &str) -> Result<Vec<SurfaceSegment>, SpellingError> {
        let mut table: Vec<(&str, SurfaceSegment)> = Vec::new();
        for (leaf, g) in self.glides {
            let leaf = self.segment(leaf).map(|s| s.leaf).unwrap_or(leaf);
            table.push((
                g,
                SurfaceSegment {
                    leaf,
                    onset: Some(true),
                },
            ));
        }
        for s in self.segments {
            let glide = self.glides.iter().any(|(l, _)| *l == s.leaf);
            let onset = glide.then_some(false);
            table.push((
                s.spelling,
                SurfaceSegment {
                    leaf: s.leaf,
                    onset,
                },
            ));
            for a in s.aliases {
                table.push((
                    a,
                    SurfaceSegment {
                        leaf: s.leaf,
                        onset,
                    },
                ));
            }
        }
        table.sort_by_key(|(sp, _)| std::cmp::Reverse(sp.len()));
        let mut out = Vec::new();
        let mut rest = text.trim();
        if rest.is_empty() {
            return Err(SpellingError::Empty);
        }
        let start = rest.as_ptr() as usize;
        while !rest.is_empty() {
            match table.iter().find(|(sp, _)| rest.starts_with(sp)) {
                Some((sp, seg)) => {
                    out.push(seg.clone());
                    rest = &rest[sp.len()..];
                }
                None => {
                    return Err(SpellingError::Unknown {
                        ch: rest.chars().next().unwrap(),
                        offset: rest.as_ptr() as usize - start,
                    })
                }
            }
        }
        Ok(out)
    }
}

/// A goal pinning a word's segment string, for parsing.
pub fn surface_goal(segments: &[SurfaceSegment]) -> String {
    let mut goal = String::new();
    for (i, s) in segments.iter().enumerate() {
        let mut bundle = format!("seg:{}", quote(s.leaf));
        match s.onset {
            Some(true) => bundle.push_str(" & onset"),
            Some(false) => bundle.push_str(" & ~onset"),
            None => {}
        }
        if i == 0 {
            bundle.push_str(" & '+ini'");
        }
        // Every position but the last is pinned non-final, so the word
        // cannot end early and leave the rest of the string unparsed.
        if i + 1 == segments.len() {
            bundle.push_str(" & '+fin'");
        } else {
            bundle.push_str(" & '-fin'");
        }
        if i > 0 {
            goal.push_str(" & right:(");
        }
        goal.push_str(&format!("self:({bundle})"));
    }
    goal.push_str(&")".repeat(segments.len().saturating_sub(1)));
    goal
}

/// Quotes a name unless it lexes as a bare lowercase word.
pub fn quote(name: &str) -> String {
    let bare = name.chars().next().is_some_and(|c| c.is_ascii_lowercase())
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    if bare {
        name.to_string()
    } else {
        format!("'{name}'")
    }
}

/// The dimensions every grammar shares, with `seg` from the inventory.
pub fn base_domain(inventory: &Inventory) -> Result<TypeDomain, DomainError> {
    let mut d = TypeDomain::new();
    let sort = d.add_dimension(
        "sort",
        &[
            "phon", "bundle", "segment", "catval", "atomic", "nelist", "elist",
        ],
    )?;
    d.define("list", sort, &["nelist", "elist"])?;
    d.set_sort_dimension(sort);
    d.add_dimension("role", &["onset", "nucleus", "coda"])?;
    d.add_dimension("ini", &["+ini", "-ini"])?;
    d.add_dimension("fin", &["+fin", "-fin"])?;
    d.add_dimension("prom", &["up", "unset"])?;
    d.add_dimension("mark", &["marked", "unmarked"])?;
    inventory.declare(&mut d)?;
    Ok(d)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    Onset,
    Nucleus,
    Coda,
}

impl Role {
    pub fn name(self) -> &'static str {
        match self {
            Role::Onset => "onset",
            Role::Nucleus => "nucleus",
            Role::Coda => "coda",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mark {
    Unmarked,
    Marked,
}

impl Mark {
    pub fn name(self) -> &'static str {
        match self {
            Mark::Unmarked => "unmarked",
            Mark::Marked => "marked",
        }
    }
}

/// A realized position as read from a solution graph. `None` fields were
/// left unresolved by the derivation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Position {
    pub seg: LeafSet,
    pub role: Option<Role>,
    pub mark: Option<Mark>,
    pub ini: Option<bool>,
    pub fin: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Word {
    pub positions: Vec<Position>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReadError {
    #[error("domain lacks `{0}`")]
    Missing(&'static str),
    #[error("word start is not a position")]
    NotAWord,
}

struct Reader {
    self_: FeatureId,
    right: FeatureId,
    seg: FeatureId,
    mark: FeatureId,
    seg_dim: DimId,
    role_dim: DimId,
    mark_dim: DimId,
    ini_dim: DimId,
    fin_dim: DimId,
}

impl Reader {
    fn new(d: &TypeDomain) -> Result<Self, ReadError> {
        let f = |n: &'static str| d.feature(n).ok_or(ReadError::Missing(n));
        let dim = |n: &'static str| d.dimension(n).ok_or(ReadError::Missing(n));
        Ok(Reader {
            self_: f("self")?,
            right: f("right")?,
            seg: f("seg")?,
            mark: f("mark")?,
            seg_dim: dim("seg")?,
            role_dim: dim("role")?,
            mark_dim: dim("mark")?,
            ini_dim: dim("ini")?,
            fin_dim: dim("fin")?,
        })
    }
}

fn pick<T: Copy>(set: Option<LeafSet>, size: usize, values: &[T]) -> Option<T> {
    set.unwrap_or(LeafSet::full(size)).only().map(|i| values[i])
}

impl Word {
    /// Walks right from `start` while positions carry a markedness value;
    /// the `end` sentinel carries none.
    pub fn read(store: &Store, start: NodeId) -> Result<Word, ReadError> {
        let d = store.domain().clone();
        let r = Reader::new(&d)?;
        let mut positions = Vec::new();
        let mut cur = store.deref(start);
        while let Some(m) = store.get(cur, r.mark) {
            let bundle = store.get(cur, r.self_).ok_or(ReadError::NotAWord)?;
            let seg = store
                .get(bundle, r.seg)
                .and_then(|s| store.constraint(s, r.seg_dim))
                .unwrap_or(LeafSet::full(d.dim_size(r.seg_dim)));
            positions.push(Position {
                seg,
                role: pick(
                    store.constraint(bundle, r.role_dim),
                    3,
                    &[Role::Onset, Role::Nucleus, Role::Coda],
                ),
                mark: pick(
                    store.constraint(m, r.mark_dim),
                    2,
                    &[Mark::Marked, Mark::Unmarked],
                ),
                ini: pick(store.constraint(bundle, r.ini_dim), 2, &[true, false]),
                fin: pick(store.constraint(bundle, r.fin_dim), 2, &[true, false]),
            });
            match store.get(cur, r.right) {
                Some(next) if positions.len() <= store.len() => cur = next,
                _ => break,
            }
        }
        if positions.is_empty() {
            return Err(ReadError::NotAWord);
        }
        Ok(Word { positions })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn roles(&self) -> Vec<Option<Role>> {
        self.positions.iter().map(|p| p.role).collect()
    }

    /// The markedness vector; `None` if any position is unresolved.
    pub fn marks(&self) -> Option<Vec<Mark>> {
        self.positions.iter().map(|p| p.mark).collect()
    }

    /// One line per position: `index char role mark ±ini ±fin`.
    pub fn dump(&self, domain: &TypeDomain, inventory: &Inventory) -> String {
        let sign = |v: Option<bool>, name: &str| match v {
            Some(true) => format!("+{name}"),
            Some(false) => format!("-{name}"),
            None => format!("?{name}"),
        };
        self.positions
            .iter()
            .enumerate()
            .map(|(i, p)| {
                format!(
                    "{i} {} {} {} {} {}\n",
                    inventory.spell(domain, p),
                    p.role.map_or("?", Role::name),
                    p.mark.map_or("?", Mark::name),
                    sign(p.ini, "ini"),
                    sign(p.fin, "fin"),
                )
            })
            .collect()
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// True iff the role string is a sequence of onset-nucleus(-coda) syllables.
pub fn roles_regular(roles: &[Role]) -> bool {
    let mut i = 0;
    while i < roles.len() {
        if roles.get(i) != Some(&Role::Onset) || roles.get(i + 1) != Some(&Role::Nucleus) {
            return false;
        }
        i += 2;
        if roles.get(i) == Some(&Role::Coda) {
            i += 1;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{SolveOptions, Solver};
    use crate::grammar::{Grammar, GrammarBuilder};

    static TOY: Inventory = Inventory {
        segments: &[
            Segment::vowel("a", false, false, true, false),
            Segment::vowel("i", true, false, false, true),
            Segment::consonant("g", "g"),
            Segment::consonant("m", "m"),
            Segment::consonant("r", "r"),
        ],
        glides: &[("i", "j")],
    };

    fn grammar(extra: &str) -> Grammar {
        let mut d = base_domain(&TOY).unwrap();
        d.add_dimension("cat", &["any"]).unwrap();
        GrammarBuilder::new("toy", d)
            .module("prosody", SOURCE)
            .module("toy", extra)
            .alternation("x_0", 2, 1)
            .build()
            .unwrap()
    }

    fn words(g: &Grammar, goal: &str) -> Vec<Word> {
        let q = g.query(goal).unwrap();
        let (sols, _) = Solver::new(g).solve(&q, &SolveOptions::default());
        sols.iter()
            .map(|s| Word::read(&s.graph, s.root).unwrap())
            .collect()
    }

    fn surfaces(g: &Grammar, goal: &str) -> Vec<String> {
        words(g, goal)
            .iter()
            .map(|w| TOY.surface(g.domain(), w))
            .collect()
    }

    const GVMVR: &str =
        "w := word & obl(is(g), x_0(is(a), obl(is(m), x_0(is(a), obl(is(r), end))))).";

    #[test]
    fn alternation_and_syllable_canon() {
        let g = grammar(GVMVR);
        assert_eq!(surfaces(&g, "w"), vec!["gamar"]);
        let ws = words(&g, "w");
        assert_eq!(
            ws[0].marks().unwrap(),
            vec![
                Mark::Unmarked,
                Mark::Marked,
                Mark::Unmarked,
                Mark::Marked,
                Mark::Unmarked
            ]
        );
        assert_eq!(ws[0].positions[0].ini, Some(true));
        assert_eq!(ws[0].positions[0].role, Some(Role::Onset));
        assert_eq!(ws[0].positions[4].fin, Some(true));
        assert_eq!(ws[0].positions[4].role, Some(Role::Coda));
        assert!(ws[0].positions[1..].iter().all(|p| p.ini == Some(false)));
    }

    #[test]
    fn clusters_and_bare_consonants_fail() {
        let g = grammar(
            "gmar := word & obl(is(g), obl(is(m), obl(is(a), obl(is(r), end)))).\n\
             gamr := word & obl(is(g), obl(is(a), obl(is(m), obl(is(r), end)))).\n\
             g := word & obl(is(g), end).\n\
             empty := word & end.",
        );
        for goal in ["gmar", "gamr", "g"] {
            assert!(surfaces(&g, goal).is_empty(), "{goal}");
        }
        let q = g.query("empty").unwrap();
        let (sols, _) = Solver::new(&g).solve(&q, &SolveOptions::default());
        assert!(sols
            .iter()
            .all(|s| Word::read(&s.graph, s.root) == Err(ReadError::NotAWord)));
    }

    #[test]
    fn initial_high_vowel_is_an_onset_glide() {
        let g = grammar("w := word & obl(is(i), obl(is(i), obl(is(g), obl(is(a), end)))).");
        let ws = words(&g, "w");
        assert_eq!(ws.len(), 1);
        assert_eq!(TOY.surface(g.domain(), &ws[0]), "jiga");
        assert_eq!(
            ws[0].dump(g.domain(), &TOY),
            "0 j onset unmarked +ini -fin\n\
             1 i nucleus unmarked -ini -fin\n\
             2 g onset unmarked -ini -fin\n\
             3 a nucleus unmarked -ini +fin\n"
        );
    }

    #[test]
    fn left_and_right_are_inverse() {
        let g = grammar(GVMVR);
        let q = g.query("w").unwrap();
        let (sols, _) = Solver::new(&g).solve(&q, &SolveOptions::default());
        let s = &sols[0];
        let d = g.domain();
        let (l, r) = (d.feature("left").unwrap(), d.feature("right").unwrap());
        let mut cur = s.root;
        let mut forward = vec![cur];
        for _ in 0..4 {
            cur = s.graph.get(cur, r).unwrap();
            forward.push(cur);
        }
        let mut back = vec![cur];
        for _ in 0..4 {
            cur = s.graph.get(cur, l).unwrap();
            back.push(cur);
        }
        back.reverse();
        assert_eq!(forward, back);
    }

    #[test]
    fn role_scanner() {
        use Role::*;
        assert!(roles_regular(&[Onset, Nucleus, Coda, Onset, Nucleus]));
        assert!(roles_regular(&[]));
        assert!(!roles_regular(&[Onset, Onset, Nucleus]));
        assert!(!roles_regular(&[Onset, Nucleus, Coda, Coda]));
        assert!(!roles_regular(&[Nucleus]));
    }

    #[test]
    fn surface_reading() {
        let segs = TOY.read_surface("jigam").unwrap();
        assert_eq!(
            segs[0],
            SurfaceSegment {
                leaf: "i",
                onset: Some(true)
            }
        );
        assert_eq!(
            segs[1],
            SurfaceSegment {
                leaf: "i",
                onset: Some(false)
            }
        );
        assert_eq!(
            segs[2],
            SurfaceSegment {
                leaf: "g",
                onset: None
            }
        );
        assert_eq!(
            TOY.read_surface("gax"),
            Err(SpellingError::Unknown { ch: 'x', offset: 2 })
        );
        assert_eq!(TOY.read_surface(""), Err(SpellingError::Empty));
        assert_eq!(
            surface_goal(&segs[2..4]),
            "self:(seg:g & '+ini' & '-fin') & right:(self:(seg:a & '+fin'))"
        );
    }
}
