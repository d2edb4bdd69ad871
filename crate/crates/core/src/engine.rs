//! Depth-first resolution over a compiled [`Grammar`].
//!
//! Terms are evaluated *at* a node: types narrow it, `f:T` evaluates `T` at
//! the value of `f`, variables unify, and a relation call selects one of the
//! relation's clauses and evaluates its body at the node (the call's result).
//! Call arguments are passed unevaluated and are evaluated on first use
//! (call-by-need), so an argument ignored by the selected clause costs
//! nothing and contributes no choice points. Goals run left to right; clause
//! alternatives are tried in the configured order with chronological
//! backtracking.

use std::fmt;
use std::ops::ControlFlow;
use std::rc::Rc;

use thiserror::Error;

use crate::feature::{Checkpoint, NodeId, Store};
use crate::grammar::{ClauseIndex, Grammar, Param, Query, Term};

/// Restricts clause selection during a proof.
pub trait ProofOracle: Sync {
    fn start(&self) -> usize;
    /// The state after using `clause` in `state`, if the transition exists.
    fn step(&self, state: usize, clause: ClauseIndex) -> Option<usize>;
    fn accepts(&self, state: usize) -> bool;
}

/// Order in which alternative clauses are tried.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ClauseOrder {
    /// Source order everywhere.
    #[default]
    Source,
    /// The zero-alternant clause of the X/∅ relation first.
    ZeroFirst,
    /// The zero-alternant clause of the X/∅ relation last.
    RealizeFirst,
}

#[derive(Clone, Copy, Default)]
pub struct SolveOptions<'o> {
    pub record_proofs: bool,
    pub oracle: Option<&'o dyn ProofOracle>,
    pub order: ClauseOrder,
}

impl<'o> SolveOptions<'o> {
    pub fn recording() -> Self {
        SolveOptions {
            record_proofs: true,
            ..Default::default()
        }
    }

    pub fn with_oracle(mut self, oracle: &'o dyn ProofOracle) -> Self {
        self.oracle = Some(oracle);
        self
    }

    pub fn with_order(mut self, order: ClauseOrder) -> Self {
        self.order = order;
        self
    }
}

/// The clause selections of one successful derivation, in order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProofSequence(pub Vec<ClauseIndex>);

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: unknown clause id `{id}`")]
pub struct UnknownClause {
    pub line: usize,
    pub id: String,
}

impl ProofSequence {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ClauseIndex> + '_ {
        self.0.iter().copied()
    }

    /// One clause id per line.
    pub fn to_text(&self, grammar: &Grammar) -> String {
        self.0
            .iter()
            .map(|c| format!("{}\n", grammar.clause(*c).id))
            .collect()
    }

    pub fn from_text(grammar: &Grammar, text: &str) -> Result<Self, UnknownClause> {
        text.lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                grammar.clause_by_id(l.trim()).ok_or_else(|| UnknownClause {
                    line: i + 1,
                    id: l.trim().to_string(),
                })
            })
            .collect::<Result<_, _>>()
            .map(ProofSequence)
    }
}

/// Permits exactly one recorded proof, step by step.
pub struct ScriptOracle<'p>(pub &'p ProofSequence);

impl ProofOracle for ScriptOracle<'_> {
    fn start(&self) -> usize {
        0
    }

    fn step(&self, state: usize, clause: ClauseIndex) -> Option<usize> {
        (self.0 .0.get(state) == Some(&clause)).then_some(state + 1)
    }

    fn accepts(&self, state: usize) -> bool {
        state == self.0.len()
    }
}

/// A solved goal, detached from the search store.
pub struct Solution {
    pub graph: Store,
    pub root: NodeId,
    pub bindings: Vec<(String, NodeId)>,
    pub proof: ProofSequence,
}

impl Solution {
    pub fn binding(&self, name: &str) -> Option<NodeId> {
        self.bindings
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| *v)
    }
}

impl fmt::Debug for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Solution")
            .field("root", &self.graph.render(self.root))
            .field("proof", &self.proof.0)
            .finish()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    /// Clause selections attempted, successful or not.
    pub clause_applications: u64,
    pub solutions: u64,
}

pub struct Solver<'g> {
    grammar: &'g Grammar,
}

impl<'g> Solver<'g> {
    pub fn new(grammar: &'g Grammar) -> Self {
        Solver { grammar }
    }

    pub fn grammar(&self) -> &'g Grammar {
        self.grammar
    }

    /// Streams solutions in canonical order; stop early with `Break`.
    pub fn for_each<F>(&self, query: &Query, opts: &SolveOptions<'_>, sink: F) -> SolveStats
    where
        F: FnMut(Solution) -> ControlFlow<()>,
    {
        let grammar: &Grammar = self.grammar;
        let orders = grammar
            .relations()
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut order = r.clauses.clone();
                if let Some((alt, zero)) = grammar.alternation() {
                    if alt.0 as usize == i {
                        order.retain(|c| *c != zero);
                        match opts.order {
                            ClauseOrder::Source => order = r.clauses.clone(),
                            ClauseOrder::ZeroFirst => order.insert(0, zero),
                            ClauseOrder::RealizeFirst => order.push(zero),
                        }
                    }
                }
                order
            })
            .collect();
        let mut store = Store::new(grammar.domain().clone());
        let root = store.fresh();
        let query_vars: Vec<NodeId> = query.var_names.iter().map(|_| store.fresh()).collect();
        let env = Rc::new(Env {
            vars: query_vars.iter().map(|n| Binding::Node(*n)).collect(),
        });
        let mut search = Search {
            grammar,
            store,
            thunks: Vec::new(),
            memo: Vec::new(),
            memo_trail: Vec::new(),
            orders,
            oracle: opts.oracle,
            record: opts.record_proofs,
            stats: SolveStats::default(),
            root,
            query_vars: query.var_names.iter().cloned().zip(query_vars).collect(),
            sink,
        };
        let start = opts.oracle.map(|o| o.start()).unwrap_or(0);
        let mark = search.mark();
        let goals = push(Goal::Eval(&query.term, env, root), None);
        let _ = search.run(goals, None, start);
        search.undo(mark);
        search.stats
    }

    pub fn solve(&self, query: &Query, opts: &SolveOptions<'_>) -> (Vec<Solution>, SolveStats) {
        let mut out = Vec::new();
        let stats = self.for_each(query, opts, |s| {
            out.push(s);
            ControlFlow::Continue(())
        });
        (out, stats)
    }

    pub fn first(&self, query: &Query, opts: &SolveOptions<'_>) -> (Option<Solution>, SolveStats) {
        let mut out = None;
        let stats = self.for_each(query, opts, |s| {
            out = Some(s);
            ControlFlow::Break(())
        });
        (out, stats)
    }
}

#[derive(Clone, Copy, Debug)]
enum Binding {
    Node(NodeId),
    Thunk(usize),
}

struct Env {
    vars: Vec<Binding>,
}

struct Thunk<'a> {
    term: &'a Term,
    env: Rc<Env>,
}

#[derive(Clone)]
enum Goal<'a> {
    Eval(&'a Term, Rc<Env>, NodeId),
    Force(Binding, NodeId),
}

struct Cell<'a> {
    goal: Goal<'a>,
    next: Goals<'a>,
}

type Goals<'a> = Option<Rc<Cell<'a>>>;

fn push<'a>(goal: Goal<'a>, next: Goals<'a>) -> Goals<'a> {
    Some(Rc::new(Cell { goal, next }))
}

struct ProofCell {
    clause: ClauseIndex,
    prev: Proof,
}

type Proof = Option<Rc<ProofCell>>;

struct Mark {
    store: Checkpoint,
    thunks: usize,
    memo_trail: usize,
}

struct Search<'a, 'o, F> {
    grammar: &'a Grammar,
    store: Store,
    thunks: Vec<Thunk<'a>>,
    memo: Vec<Option<NodeId>>,
    memo_trail: Vec<usize>,
    orders: Vec<Vec<ClauseIndex>>,
    oracle: Option<&'o dyn ProofOracle>,
    record: bool,
    stats: SolveStats,
    root: NodeId,
    query_vars: Vec<(String, NodeId)>,
    sink: F,
}

impl<'a, F> Search<'a, '_, F>
where
    F: FnMut(Solution) -> ControlFlow<()>,
{
    fn mark(&mut self) -> Mark {
        Mark {
            store: self.store.checkpoint(),
            thunks: self.thunks.len(),
            memo_trail: self.memo_trail.len(),
        }
    }

    fn undo(&mut self, mark: Mark) {
        self.store.rollback(mark.store);
        while self.memo_trail.len() > mark.memo_trail {
            let t = self.memo_trail.pop().unwrap();
            self.memo[t] = None;
        }
        self.thunks.truncate(mark.thunks);
        self.memo.truncate(mark.thunks);
    }

    fn bind_arg(&mut self, arg: &'a Term, env: &Rc<Env>) -> Binding {
        match arg {
            Term::Var(v) => env.vars[*v],
            Term::Top => Binding::Node(self.store.fresh()),
            _ => {
                self.thunks.push(Thunk {
                    term: arg,
                    env: env.clone(),
                });
                self.memo.push(None);
                Binding::Thunk(self.thunks.len() - 1)
            }
        }
    }

    fn activate(
        &mut self,
        clause: ClauseIndex,
        args: &[Binding],
        node: NodeId,
        rest: Goals<'a>,
    ) -> Goals<'a> {
        let grammar: &'a Grammar = self.grammar;
        let clause = grammar.clause(clause);
        let mut slots: Vec<Option<Binding>> = vec![None; clause.var_names.len()];
        for (i, p) in clause.params.iter().enumerate() {
            if let Param::Bind(v) = p {
                slots[*v] = Some(args[i]);
            }
        }
        let vars = slots
            .into_iter()
            .map(|s| s.unwrap_or_else(|| Binding::Node(self.store.fresh())))
            .collect();
        let env = Rc::new(Env { vars });
        let mut goals = push(Goal::Eval(&clause.body, env.clone(), node), rest);
        for (i, p) in clause.params.iter().enumerate().rev() {
            if let Param::Pattern(t) = p {
                let tmp = self.store.fresh();
                goals = push(Goal::Eval(t, env.clone(), tmp), goals);
                goals = push(Goal::Force(args[i], tmp), goals);
            }
        }
        goals
    }

    fn emit(&mut self, proof: &Proof, state: usize) -> ControlFlow<()> {
        if let Some(o) = self.oracle {
            if !o.accepts(state) {
                return ControlFlow::Continue(());
            }
        }
        let mut roots = vec![self.root];
        roots.extend(self.query_vars.iter().map(|(_, n)| *n));
        let (graph, images) = self.store.copy_out(&roots);
        let mut steps = Vec::new();
        let mut cur = proof.clone();
        while let Some(cell) = cur {
            steps.push(cell.clause);
            cur = cell.prev.clone();
        }
        steps.reverse();
        self.stats.solutions += 1;
        let bindings = self
            .query_vars
            .iter()
            .zip(images.iter().skip(1))
            .map(|((name, _), n)| (name.clone(), *n))
            .collect();
        (self.sink)(Solution {
            graph,
            root: images[0],
            bindings,
            proof: ProofSequence(steps),
        })
    }

    fn run(&mut self, mut goals: Goals<'a>, mut proof: Proof, mut state: usize) -> ControlFlow<()> {
        'outer: loop {
            let Some(cell) = goals else {
                return self.emit(&proof, state);
            };
            goals = cell.next.clone();
            match cell.goal.clone() {
                Goal::Force(Binding::Node(n), node) => {
                    if !self.store.unify(node, n) {
                        return ControlFlow::Continue(());
                    }
                }
                Goal::Force(Binding::Thunk(t), node) => match self.memo[t] {
                    Some(m) => {
                        if !self.store.unify(node, m) {
                            return ControlFlow::Continue(());
                        }
                    }
                    None => {
                        self.memo[t] = Some(node);
                        self.memo_trail.push(t);
                        let th = &self.thunks[t];
                        goals = push(Goal::Eval(th.term, th.env.clone(), node), goals);
                    }
                },
                Goal::Eval(term, env, node) => match term {
                    Term::Top => {}
                    Term::Type(c) => {
                        if !self.store.constrain(node, c.dim, c.leaves) {
                            return ControlFlow::Continue(());
                        }
                    }
                    Term::Feat(f, t) => match self.store.feature(node, *f) {
                        Some(v) => goals = push(Goal::Eval(t, env, v), goals),
                        None => return ControlFlow::Continue(()),
                    },
                    Term::And(ts) => {
                        for t in ts.iter().rev() {
                            goals = push(Goal::Eval(t, env.clone(), node), goals);
                        }
                    }
                    Term::Var(v) => goals = push(Goal::Force(env.vars[*v], node), goals),
                    Term::Or(alts) => {
                        let last = alts.len() - 1;
                        for (k, alt) in alts.iter().enumerate() {
                            let g = push(Goal::Eval(alt, env.clone(), node), goals.clone());
                            if k == last {
                                goals = g;
                                continue 'outer;
                            }
                            let mark = self.mark();
                            let r = self.run(g, proof.clone(), state);
                            self.undo(mark);
                            r?;
                        }
                    }
                    Term::Call(rel, args) => {
                        let bindings: Vec<Binding> =
                            args.iter().map(|a| self.bind_arg(a, &env)).collect();
                        let options: Vec<(ClauseIndex, usize)> = self.orders[rel.0 as usize]
                            .iter()
                            .filter_map(|&c| match self.oracle {
                                Some(o) => o.step(state, c).map(|s| (c, s)),
                                None => Some((c, state)),
                            })
                            .collect();
                        let Some(last) = options.len().checked_sub(1) else {
                            return ControlFlow::Continue(());
                        };
                        for (k, (c, next_state)) in options.into_iter().enumerate() {
                            self.stats.clause_applications += 1;
                            let next_proof = if self.record {
                                Some(Rc::new(ProofCell {
                                    clause: c,
                                    prev: proof.clone(),
                                }))
                            } else {
                                None
                            };
                            if k == last {
                                goals = self.activate(c, &bindings, node, goals);
                                proof = next_proof;
                                state = next_state;
                                continue 'outer;
                            }
                            let mark = self.mark();
                            let g = self.activate(c, &bindings, node, goals.clone());
                            let r = self.run(g, next_proof, next_state);
                            self.undo(mark);
                            r?;
                        }
                    }
                },
            }
        }
    }
}
