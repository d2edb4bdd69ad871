//! Compiled grammars: relations, indexed clauses and resolved terms.

use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::feature::{DomainError, FeatureId, TypeConstraint, TypeDomain, TypeExpr};
use crate::syntax::{self, Expr, Item, SyntaxError};

/// Position of a clause in the grammar's global clause table. Doubles as the
/// oracle alphabet symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClauseIndex(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelId(pub u32);

/// A resolved term.
#[derive(Clone, Debug, PartialEq)]
pub enum Term {
    Top,
    Type(TypeConstraint),
    Feat(FeatureId, Box<Term>),
    And(Vec<Term>),
    Or(Vec<Term>),
    Var(usize),
    Call(RelId, Vec<Term>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Param {
    /// `_`: the argument is never looked at.
    Ignore,
    /// A plain variable: bound to the (lazily evaluated) argument.
    Bind(usize),
    /// Any other head term: the argument is evaluated and unified with it.
    Pattern(Term),
}

#[derive(Clone, Debug)]
pub struct Clause {
    /// `module:relation/ordinal`
    pub id: String,
    pub relation: RelId,
    pub ordinal: usize,
    pub params: Vec<Param>,
    pub body: Term,
    pub var_names: Vec<String>,
    pub line: usize,
}

#[derive(Clone, Debug)]
pub struct Relation {
    pub name: String,
    pub arity: usize,
    pub clauses: Vec<ClauseIndex>,
}

#[derive(Debug, Error)]
pub enum GrammarError {
    #[error("module `{module}`: {source}")]
    Syntax { module: String, source: SyntaxError },
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("undeclared relation `{0}/{1}`")]
    UndeclaredRelation(String, usize),
    #[error("negation applied to a non-type term")]
    NegationOverNonType,
    #[error("list syntax needs the types `nelist`/`elist` and features `first`/`rest`")]
    NoListTypes,
    #[error(transparent)]
    Query(#[from] SyntaxError),
}

/// A goal compiled against a grammar; `var_names` index the query variables.
#[derive(Clone, Debug)]
pub struct Query {
    pub term: Term,
    pub var_names: Vec<String>,
}

pub struct GrammarBuilder {
    name: String,
    domain: TypeDomain,
    modules: Vec<(String, String)>,
    alternation: Option<(String, usize, usize)>,
    branch: Vec<String>,
}

impl GrammarBuilder {
    pub fn new(name: &str, domain: TypeDomain) -> Self {
        GrammarBuilder {
            name: name.to_string(),
            domain,
            modules: Vec::new(),
            alternation: None,
            branch: Vec::new(),
        }
    }

    pub fn module(mut self, name: &str, source: &str) -> Self {
        self.modules.push((name.to_string(), source.to_string()));
        self
    }

    /// Marks the X/∅ relation and the ordinal of its zero-alternant clause.
    pub fn alternation(mut self, relation: &str, arity: usize, zero_ordinal: usize) -> Self {
        self.alternation = Some((relation.to_string(), arity, zero_ordinal));
        self
    }

    /// Relations whose clause choices identify a lexical branch (e.g. the
    /// root letter tree); optimization is done per branch.
    pub fn branch_relation(mut self, name: &str) -> Self {
        self.branch.push(name.to_string());
        self
    }

    pub fn build(self) -> Result<Grammar, GrammarError> {
        let GrammarBuilder {
            name,
            mut domain,
            modules,
            alternation,
            branch,
        } = self;
        let mut clause_items = Vec::new();
        for (module, src) in &modules {
            let items = syntax::parse_module(src).map_err(|source| GrammarError::Syntax {
                module: module.clone(),
                source,
            })?;
            for item in items {
                match item {
                    Item::Appropriate { sort, features, .. } => {
                        for (f, v) in features {
                            domain.declare_appropriate(&sort, &f, &v)?;
                        }
                    }
                    Item::Clause {
                        name,
                        params,
                        body,
                        line,
                    } => clause_items.push((module.clone(), name, params, body, line)),
                }
            }
        }

        let mut relations: Vec<Relation> = Vec::new();
        let mut rel_index = HashMap::new();
        for (_, rname, params, _, _) in &clause_items {
            let key = (rname.clone(), params.len());
            if let Entry::Vacant(slot) = rel_index.entry(key) {
                slot.insert(RelId(relations.len() as u32));
                relations.push(Relation {
                    name: rname.clone(),
                    arity: params.len(),
                    clauses: vec![],
                });
            }
        }

        let mut clauses = Vec::new();
        for (module, rname, params, body, line) in clause_items {
            let rel = rel_index[&(rname.clone(), params.len())];
            let mut cx = Compiler {
                domain: &mut domain,
                rels: &rel_index,
                vars: Vec::new(),
                frozen: false,
            };
            let mut cparams = Vec::new();
            for p in &params {
                cparams.push(match p {
                    Expr::Anon => Param::Ignore,
                    Expr::Var(v) if !cx.vars.contains(v) => Param::Bind(cx.var(v)),
                    other => Param::Pattern(cx.term(other)?),
                });
            }
            let body = cx.term(&body)?;
            let var_names = cx.vars;
            let relation = &mut relations[rel.0 as usize];
            let ordinal = relation.clauses.len() + 1;
            let index = ClauseIndex(clauses.len() as u32);
            relation.clauses.push(index);
            clauses.push(Clause {
                id: format!("{module}:{rname}/{ordinal}"),
                relation: rel,
                ordinal,
                params: cparams,
                body,
                var_names,
                line,
            });
        }

        let alternation = match alternation {
            Some((r, arity, zero)) => {
                let rel = *rel_index
                    .get(&(r.clone(), arity))
                    .ok_or(GrammarError::UndeclaredRelation(r, arity))?;
                Some((rel, relations[rel.0 as usize].clauses[zero - 1]))
            }
            None => None,
        };
        let branch_relations = branch
            .iter()
            .map(|b| {
                relations
                    .iter()
                    .position(|r| &r.name == b)
                    .map(|i| RelId(i as u32))
                    .ok_or_else(|| GrammarError::UndeclaredRelation(b.clone(), 1))
            })
            .collect::<Result<Vec<_>, _>>()?;

        let mut hasher = Sha256::new();
        for c in &clauses {
            hasher.update(c.id.as_bytes());
            hasher.update(b"\n");
        }
        let digest = hasher.finalize();
        let fingerprint: String = digest.iter().take(16).map(|b| format!("{b:02x}")).collect();

        Ok(Grammar {
            name,
            domain: Arc::new(domain),
            relations,
            clauses,
            rel_index,
            alternation,
            branch_relations,
            fingerprint,
        })
    }
}

/// A compiled grammar. Immutable and shareable across threads.
pub struct Grammar {
    name: String,
    domain: Arc<TypeDomain>,
    relations: Vec<Relation>,
    clauses: Vec<Clause>,
    rel_index: HashMap<(String, usize), RelId>,
    alternation: Option<(RelId, ClauseIndex)>,
    branch_relations: Vec<RelId>,
    fingerprint: String,
}

impl fmt::Debug for Grammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grammar")
            .field("name", &self.name)
            .field("clauses", &self.clauses.len())
            .field("fingerprint", &self.fingerprint)
            .finish()
    }
}

impl Grammar {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> &Arc<TypeDomain> {
        &self.domain
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn clause(&self, i: ClauseIndex) -> &Clause {
        &self.clauses[i.0 as usize]
    }

    pub fn relation(&self, r: RelId) -> &Relation {
        &self.relations[r.0 as usize]
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn relation_id(&self, name: &str, arity: usize) -> Option<RelId> {
        self.rel_index.get(&(name.to_string(), arity)).copied()
    }

    pub fn clause_by_id(&self, id: &str) -> Option<ClauseIndex> {
        self.clauses
            .iter()
            .position(|c| c.id == id)
            .map(|i| ClauseIndex(i as u32))
    }

    pub fn alternation(&self) -> Option<(RelId, ClauseIndex)> {
        self.alternation
    }

    pub fn is_branch_clause(&self, c: ClauseIndex) -> bool {
        self.branch_relations.contains(&self.clause(c).relation)
    }

    /// Stable hash of the ordered clause id list.
    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn query(&self, src: &str) -> Result<Query, GrammarError> {
        let expr = syntax::parse_term(src)?;
        self.query_expr(&expr)
    }

    pub fn query_expr(&self, expr: &Expr) -> Result<Query, GrammarError> {
        let mut domain = (*self.domain).clone();
        let mut cx = Compiler {
            domain: &mut domain,
            rels: &self.rel_index,
            vars: Vec::new(),
            frozen: true,
        };
        let term = cx.term(expr)?;
        Ok(Query {
            term,
            var_names: cx.vars,
        })
    }

    /// Resolves a pure type formula such as `b1 & third & (sg ; pl)`.
    pub fn type_formula(&self, src: &str) -> Result<TypeConstraint, GrammarError> {
        let expr = syntax::parse_term(src)?;
        let t = to_type_expr(&expr).ok_or(GrammarError::NegationOverNonType)?;
        Ok(self.domain.resolve(&t)?)
    }
}

fn to_type_expr(e: &Expr) -> Option<TypeExpr> {
    Some(match e {
        Expr::Name(n) => TypeExpr::Atom(n.clone()),
        Expr::Not(a) => TypeExpr::not(to_type_expr(a)?),
        Expr::And(a, b) => TypeExpr::and(to_type_expr(a)?, to_type_expr(b)?),
        Expr::Or(a, b) => TypeExpr::or(to_type_expr(a)?, to_type_expr(b)?),
        _ => return None,
    })
}

struct Compiler<'a> {
    domain: &'a mut TypeDomain,
    rels: &'a HashMap<(String, usize), RelId>,
    vars: Vec<String>,
    /// Queries may not introduce features the grammar never declared.
    frozen: bool,
}

impl Compiler<'_> {
    fn feature(&mut self, name: &str) -> Result<FeatureId, GrammarError> {
        match self.domain.feature(name) {
            Some(f) => Ok(f),
            None if self.frozen => Err(GrammarError::UnknownFeature(name.to_string())),
            None => Ok(self.domain.declare_feature(name)),
        }
    }

    fn var(&mut self, v: &str) -> usize {
        match self.vars.iter().position(|x| x == v) {
            Some(i) => i,
            None => {
                self.vars.push(v.to_string());
                self.vars.len() - 1
            }
        }
    }

    fn is_relation_name(&self, e: &Expr) -> bool {
        match e {
            Expr::Name(n) => self.rels.contains_key(&(n.clone(), 0)),
            Expr::Not(a) => self.is_relation_name(a),
            Expr::And(a, b) | Expr::Or(a, b) => {
                self.is_relation_name(a) || self.is_relation_name(b)
            }
            _ => false,
        }
    }

    fn term(&mut self, e: &Expr) -> Result<Term, GrammarError> {
        if e.is_name_formula() && !self.is_relation_name(e) {
            let t = to_type_expr(e).expect("name formula");
            match self.domain.resolve(&t) {
                Ok(c) => return Ok(Term::Type(c)),
                Err(DomainError::MixedDimensions(..))
                    if matches!(e, Expr::And(..) | Expr::Or(..)) => {}
                Err(DomainError::MixedDimensions(..)) => {
                    return Err(GrammarError::NegationOverNonType)
                }
                Err(DomainError::UnknownType(n)) => return Err(GrammarError::UnknownName(n)),
                Err(other) => return Err(other.into()),
            }
        }
        Ok(match e {
            Expr::Name(n) => match self.rels.get(&(n.clone(), 0)) {
                Some(r) => Term::Call(*r, vec![]),
                None => return Err(GrammarError::UnknownName(n.clone())),
            },
            Expr::Var(v) => Term::Var(self.var(v)),
            Expr::Anon => Term::Top,
            Expr::Call(n, args) => {
                let r = *self
                    .rels
                    .get(&(n.clone(), args.len()))
                    .ok_or_else(|| GrammarError::UndeclaredRelation(n.clone(), args.len()))?;
                let args = args
                    .iter()
                    .map(|a| self.term(a))
                    .collect::<Result<_, _>>()?;
                Term::Call(r, args)
            }
            Expr::Feat(f, v) => {
                let f = self.feature(f)?;
                Term::Feat(f, Box::new(self.term(v)?))
            }
            Expr::Not(_) => return Err(GrammarError::NegationOverNonType),
            Expr::And(a, b) => {
                let mut parts = Vec::new();
                for t in [self.term(a)?, self.term(b)?] {
                    match t {
                        Term::And(xs) => parts.extend(xs),
                        t => parts.push(t),
                    }
                }
                Term::And(parts)
            }
            Expr::Or(a, b) => {
                let mut alts = Vec::new();
                for t in [self.term(a)?, self.term(b)?] {
                    match t {
                        Term::Or(xs) => alts.extend(xs),
                        t => alts.push(t),
                    }
                }
                Term::Or(alts)
            }
            Expr::List(items, tail) => {
                let nelist = self
                    .domain
                    .lookup("nelist")
                    .ok_or(GrammarError::NoListTypes)?;
                let elist = self
                    .domain
                    .lookup("elist")
                    .ok_or(GrammarError::NoListTypes)?;
                let first = self.feature("first")?;
                let rest = self.feature("rest")?;
                let mut acc = match tail {
                    Some(t) => self.term(t)?,
                    None => Term::Type(elist),
                };
                for item in items.iter().rev() {
                    let head = self.term(item)?;
                    acc = Term::And(vec![
                        Term::Type(nelist),
                        Term::Feat(first, Box::new(head)),
                        Term::Feat(rest, Box::new(acc)),
                    ]);
                }
                acc
            }
        })
    }
}
