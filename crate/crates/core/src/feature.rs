//! Finite-domain typed feature terms.
//!
//! Every type dimension is a finite enumeration of leaves and every simplex
//! type name denotes a set of leaves in exactly one dimension, so conjunction,
//! disjunction and negation of types reduce to bitset operations. Feature
//! graphs live in a [`Store`] and are unified destructively; every mutation is
//! recorded on a trail so that a [`Checkpoint`] can be rolled back exactly.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Largest number of leaves a single dimension may hold.
pub const MAX_LEAVES: usize = 384;
const WORDS: usize = MAX_LEAVES / 64;

/// A subset of the leaves of one dimension.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LeafSet([u64; WORDS]);

impl LeafSet {
    pub const EMPTY: LeafSet = LeafSet([0; WORDS]);

    pub fn full(size: usize) -> Self {
        assert!(size <= MAX_LEAVES, "dimension too large");
        let mut set = Self::EMPTY;
        for i in 0..size {
            set.insert(i);
        }
        set
    }

    pub fn singleton(leaf: usize) -> Self {
        let mut set = Self::EMPTY;
        set.insert(leaf);
        set
    }

    pub fn from_leaves(leaves: impl IntoIterator<Item = usize>) -> Self {
        let mut set = Self::EMPTY;
        for leaf in leaves {
            set.insert(leaf);
        }
        set
    }

    pub fn insert(&mut self, leaf: usize) {
        self.0[leaf / 64] |= 1 << (leaf % 64);
    }

    pub fn contains(&self, leaf: usize) -> bool {
        leaf < MAX_LEAVES && self.0[leaf / 64] & (1 << (leaf % 64)) != 0
    }

    pub fn and(&self, other: &Self) -> Self {
        let mut out = *self;
        for (w, o) in out.0.iter_mut().zip(other.0.iter()) {
            *w &= o;
        }
        out
    }

    pub fn or(&self, other: &Self) -> Self {
        let mut out = *self;
        for (w, o) in out.0.iter_mut().zip(other.0.iter()) {
            *w |= o;
        }
        out
    }

    /// Complement relative to a dimension of `size` leaves.
    pub fn complement(&self, size: usize) -> Self {
        let full = Self::full(size);
        let mut out = full;
        for (w, o) in out.0.iter_mut().zip(self.0.iter()) {
            *w &= !o;
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|w| *w == 0)
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.and(other) == *self
    }

    /// The single leaf, if the set has exactly one.
    pub fn only(&self) -> Option<usize> {
        if self.len() == 1 {
            self.iter().next()
        } else {
            None
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..MAX_LEAVES).filter(move |i| self.contains(*i))
    }
}

impl fmt::Debug for LeafSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DimId(pub u16);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FeatureId(pub u16);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

/// A normalized type: a leaf subset of one dimension. The empty subset is ⊥.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TypeConstraint {
    pub dim: DimId,
    pub leaves: LeafSet,
}

impl TypeConstraint {
    pub fn is_bottom(&self) -> bool {
        self.leaves.is_empty()
    }
}

/// Boolean type expression over simplex type names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TypeExpr {
    Atom(String),
    Not(Box<TypeExpr>),
    And(Box<TypeExpr>, Box<TypeExpr>),
    Or(Box<TypeExpr>, Box<TypeExpr>),
}

impl TypeExpr {
    pub fn atom(name: &str) -> Self {
        TypeExpr::Atom(name.to_string())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: TypeExpr) -> Self {
        TypeExpr::Not(Box::new(e))
    }

    pub fn and(a: TypeExpr, b: TypeExpr) -> Self {
        TypeExpr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: TypeExpr, b: TypeExpr) -> Self {
        TypeExpr::Or(Box::new(a), Box::new(b))
    }

    fn atoms<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            TypeExpr::Atom(a) => out.push(a),
            TypeExpr::Not(e) => e.atoms(out),
            TypeExpr::And(a, b) | TypeExpr::Or(a, b) => {
                a.atoms(out);
                b.atoms(out);
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DomainError {
    #[error("unknown type `{0}`")]
    UnknownType(String),
    #[error("type expression mixes dimensions `{0}` and `{1}`")]
    MixedDimensions(String, String),
    #[error("duplicate leaf `{leaf}` in dimension `{dim}`")]
    DuplicateLeaf { dim: String, leaf: String },
    #[error("type name `{0}` is already declared")]
    DuplicateName(String),
    #[error("dimension `{0}` has more than {MAX_LEAVES} leaves")]
    TooManyLeaves(String),
    #[error("type `{0}` denotes no leaves")]
    EmptyType(String),
    #[error("unknown dimension `{0}`")]
    UnknownDimension(String),
    #[error("appropriateness declaration needs a sort dimension")]
    NoSortDimension,
}

#[derive(Clone, Debug)]
pub struct Dimension {
    pub name: String,
    pub leaves: Vec<String>,
}

#[derive(Clone, Copy, Debug)]
struct Appropriateness {
    bearer: LeafSet,
    value: LeafSet,
}

/// The declared type hierarchy: dimensions, simplex type names, features and
/// appropriateness conditions. Immutable once a grammar has been built.
#[derive(Clone, Debug, Default)]
pub struct TypeDomain {
    dims: Vec<Dimension>,
    names: HashMap<String, TypeConstraint>,
    features: Vec<String>,
    feature_index: HashMap<String, FeatureId>,
    approp: Vec<Option<Appropriateness>>,
    sort_dim: Option<DimId>,
}

impl TypeDomain {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a dimension; every leaf becomes a simplex type denoting itself.
    pub fn add_dimension(&mut self, name: &str, leaves: &[&str]) -> Result<DimId, DomainError> {
        if leaves.len() > MAX_LEAVES {
            return Err(DomainError::TooManyLeaves(name.to_string()));
        }
        let dim = DimId(self.dims.len() as u16);
        let mut seen = HashSet::new();
        for leaf in leaves {
            if !seen.insert(*leaf) {
                return Err(DomainError::DuplicateLeaf {
                    dim: name.to_string(),
                    leaf: leaf.to_string(),
                });
            }
        }
        for (i, leaf) in leaves.iter().enumerate() {
            self.insert_name(
                leaf,
                TypeConstraint {
                    dim,
                    leaves: LeafSet::singleton(i),
                },
            )?;
        }
        self.dims.push(Dimension {
            name: name.to_string(),
            leaves: leaves.iter().map(|s| s.to_string()).collect(),
        });
        Ok(dim)
    }

    /// Declares a named simplex type as a set of leaves of `dim`.
    pub fn define(&mut self, name: &str, dim: DimId, leaves: &[&str]) -> Result<(), DomainError> {
        let mut set = LeafSet::EMPTY;
        for leaf in leaves {
            let i = self
                .leaf_index(dim, leaf)
                .ok_or_else(|| DomainError::UnknownType(leaf.to_string()))?;
            set.insert(i);
        }
        self.define_set(name, TypeConstraint { dim, leaves: set })
    }

    pub fn define_set(
        &mut self,
        name: &str,
        constraint: TypeConstraint,
    ) -> Result<(), DomainError> {
        if constraint.is_bottom() {
            return Err(DomainError::EmptyType(name.to_string()));
        }
        self.insert_name(name, constraint)
    }

    fn insert_name(&mut self, name: &str, c: TypeConstraint) -> Result<(), DomainError> {
        if self.names.insert(name.to_string(), c).is_some() {
            return Err(DomainError::DuplicateName(name.to_string()));
        }
        Ok(())
    }

    pub fn set_sort_dimension(&mut self, dim: DimId) {
        self.sort_dim = Some(dim);
    }

    pub fn sort_dimension(&self) -> Option<DimId> {
        self.sort_dim
    }

    pub fn declare_feature(&mut self, name: &str) -> FeatureId {
        if let Some(id) = self.feature_index.get(name) {
            return *id;
        }
        let id = FeatureId(self.features.len() as u16);
        self.features.push(name.to_string());
        self.feature_index.insert(name.to_string(), id);
        self.approp.push(None);
        id
    }

    /// `bearer::[feature:value]`: the feature may only occur on nodes of the
    /// bearer sort and its value is of the value sort.
    pub fn declare_appropriate(
        &mut self,
        bearer: &str,
        feature: &str,
        value: &str,
    ) -> Result<FeatureId, DomainError> {
        let sort = self.sort_dim.ok_or(DomainError::NoSortDimension)?;
        let b = self.lookup_in(bearer, sort)?;
        let v = self.lookup_in(value, sort)?;
        let f = self.declare_feature(feature);
        let slot = &mut self.approp[f.0 as usize];
        *slot = Some(match *slot {
            None => Appropriateness {
                bearer: b,
                value: v,
            },
            Some(old) => Appropriateness {
                bearer: old.bearer.or(&b),
                value: old.value.or(&v),
            },
        });
        Ok(f)
    }

    fn lookup_in(&self, name: &str, dim: DimId) -> Result<LeafSet, DomainError> {
        match self.names.get(name) {
            Some(c) if c.dim == dim => Ok(c.leaves),
            Some(c) => Err(DomainError::MixedDimensions(
                self.dim_name(dim).to_string(),
                self.dim_name(c.dim).to_string(),
            )),
            None => Err(DomainError::UnknownType(name.to_string())),
        }
    }

    pub fn lookup(&self, name: &str) -> Option<TypeConstraint> {
        self.names.get(name).copied()
    }

    pub fn feature(&self, name: &str) -> Option<FeatureId> {
        self.feature_index.get(name).copied()
    }

    pub fn feature_name(&self, f: FeatureId) -> &str {
        &self.features[f.0 as usize]
    }

    pub fn dimension(&self, name: &str) -> Option<DimId> {
        self.dims
            .iter()
            .position(|d| d.name == name)
            .map(|i| DimId(i as u16))
    }

    pub fn dim_name(&self, dim: DimId) -> &str {
        &self.dims[dim.0 as usize].name
    }

    pub fn dim_size(&self, dim: DimId) -> usize {
        self.dims[dim.0 as usize].leaves.len()
    }

    pub fn leaf_name(&self, dim: DimId, leaf: usize) -> &str {
        &self.dims[dim.0 as usize].leaves[leaf]
    }

    pub fn leaf_index(&self, dim: DimId, leaf: &str) -> Option<usize> {
        self.dims[dim.0 as usize]
            .leaves
            .iter()
            .position(|l| l == leaf)
    }

    pub fn full(&self, dim: DimId) -> TypeConstraint {
        TypeConstraint {
            dim,
            leaves: LeafSet::full(self.dim_size(dim)),
        }
    }

    /// Normalizes a type expression to a leaf subset. ⊥ is a legal result.
    pub fn resolve(&self, expr: &TypeExpr) -> Result<TypeConstraint, DomainError> {
        let mut atoms = Vec::new();
        expr.atoms(&mut atoms);
        let mut dim: Option<DimId> = None;
        for a in atoms {
            let c = self
                .lookup(a)
                .ok_or_else(|| DomainError::UnknownType(a.to_string()))?;
            match dim {
                None => dim = Some(c.dim),
                Some(d) if d != c.dim => {
                    return Err(DomainError::MixedDimensions(
                        self.dim_name(d).to_string(),
                        self.dim_name(c.dim).to_string(),
                    ))
                }
                _ => {}
            }
        }
        let dim = dim.expect("type expression without atoms");
        let size = self.dim_size(dim);
        let leaves = self.eval(expr, size);
        Ok(TypeConstraint { dim, leaves })
    }

    fn eval(&self, expr: &TypeExpr, size: usize) -> LeafSet {
        match expr {
            TypeExpr::Atom(a) => self.names[a.as_str()].leaves,
            TypeExpr::Not(e) => self.eval(e, size).complement(size),
            TypeExpr::And(a, b) => self.eval(a, size).and(&self.eval(b, size)),
            TypeExpr::Or(a, b) => self.eval(a, size).or(&self.eval(b, size)),
        }
    }

    /// Leaf names of a set, in declaration order.
    pub fn leaf_names(&self, dim: DimId, set: &LeafSet) -> Vec<&str> {
        set.iter().map(|i| self.leaf_name(dim, i)).collect()
    }
}

/// One node of a feature graph.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Node {
    constraints: Vec<(DimId, LeafSet)>,
    features: Vec<(FeatureId, NodeId)>,
    forward: Option<NodeId>,
}

#[derive(Clone, Debug)]
enum TrailEntry {
    Forward(NodeId),
    Narrow {
        node: NodeId,
        index: usize,
        old: LeafSet,
    },
    AddConstraint(NodeId),
    AddFeature(NodeId),
}

/// A rollback point on a [`Store`]'s trail.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Checkpoint {
    trail_len: usize,
    nodes_len: usize,
    serial: u64,
}

/// Graph store with trail-based undo.
#[derive(Clone, Debug)]
pub struct Store {
    domain: Arc<TypeDomain>,
    nodes: Vec<Node>,
    trail: Vec<TrailEntry>,
    live: Vec<u64>,
    next_serial: u64,
}

impl Store {
    pub fn new(domain: Arc<TypeDomain>) -> Self {
        Store {
            domain,
            nodes: Vec::new(),
            trail: Vec::new(),
            live: Vec::new(),
            next_serial: 0,
        }
    }

    pub fn domain(&self) -> &Arc<TypeDomain> {
        &self.domain
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn fresh(&mut self) -> NodeId {
        self.nodes.push(Node::default());
        NodeId(self.nodes.len() as u32 - 1)
    }

    pub fn deref(&self, mut n: NodeId) -> NodeId {
        while let Some(next) = self.nodes[n.0 as usize].forward {
            n = next;
        }
        n
    }

    fn node(&self, n: NodeId) -> &Node {
        &self.nodes[n.0 as usize]
    }

    /// The constraint of a node in a dimension; `None` means unconstrained.
    pub fn constraint(&self, n: NodeId, dim: DimId) -> Option<LeafSet> {
        let n = self.deref(n);
        self.node(n)
            .constraints
            .iter()
            .find(|(d, _)| *d == dim)
            .map(|(_, s)| *s)
    }

    pub fn get(&self, n: NodeId, f: FeatureId) -> Option<NodeId> {
        let n = self.deref(n);
        self.node(n)
            .features
            .iter()
            .find(|(g, _)| *g == f)
            .map(|(_, v)| self.deref(*v))
    }

    pub fn features(&self, n: NodeId) -> Vec<(FeatureId, NodeId)> {
        let n = self.deref(n);
        self.node(n)
            .features
            .iter()
            .map(|(f, v)| (*f, self.deref(*v)))
            .collect()
    }

    pub fn constraints(&self, n: NodeId) -> Vec<(DimId, LeafSet)> {
        self.node(self.deref(n)).constraints.clone()
    }

    /// Follows a feature path without creating nodes.
    pub fn path(&self, n: NodeId, path: &[FeatureId]) -> Option<NodeId> {
        path.iter()
            .try_fold(self.deref(n), |cur, f| self.get(cur, *f))
    }

    /// Intersects the node's constraint in `dim` with `set`. Returns false on ⊥.
    pub fn constrain(&mut self, n: NodeId, dim: DimId, set: LeafSet) -> bool {
        let n = self.deref(n);
        let node = &mut self.nodes[n.0 as usize];
        match node.constraints.iter().position(|(d, _)| *d == dim) {
            Some(index) => {
                let old = node.constraints[index].1;
                let new = old.and(&set);
                if new == old {
                    return true;
                }
                if new.is_empty() {
                    return false;
                }
                node.constraints[index].1 = new;
                self.trail.push(TrailEntry::Narrow {
                    node: n,
                    index,
                    old,
                });
                true
            }
            None => {
                let full = LeafSet::full(self.domain.dim_size(dim));
                let new = full.and(&set);
                if new.is_empty() {
                    return false;
                }
                if new == full {
                    return true;
                }
                node.constraints.push((dim, new));
                self.trail.push(TrailEntry::AddConstraint(n));
                true
            }
        }
    }

    fn add_feature(&mut self, n: NodeId, f: FeatureId, value: NodeId) -> bool {
        if let (Some(sort), Some(a)) = (self.domain.sort_dim, self.domain.approp[f.0 as usize]) {
            if !self.constrain(n, sort, a.bearer) || !self.constrain(value, sort, a.value) {
                return false;
            }
        }
        self.nodes[n.0 as usize].features.push((f, value));
        self.trail.push(TrailEntry::AddFeature(n));
        true
    }

    /// The value of feature `f`, introducing a fresh node if absent. `None`
    /// when the feature is not appropriate for the node.
    pub fn feature(&mut self, n: NodeId, f: FeatureId) -> Option<NodeId> {
        let n = self.deref(n);
        if let Some(v) = self.get(n, f) {
            return Some(v);
        }
        let v = self.fresh();
        if self.add_feature(n, f, v) {
            Some(v)
        } else {
            None
        }
    }

    /// Destructive unification. On failure the graph is left partially
    /// merged; roll back to a checkpoint to undo.
    pub fn unify(&mut self, a: NodeId, b: NodeId) -> bool {
        let mut work = vec![(a, b)];
        while let Some((x, y)) = work.pop() {
            let x = self.deref(x);
            let y = self.deref(y);
            if x == y {
                continue;
            }
            self.nodes[x.0 as usize].forward = Some(y);
            self.trail.push(TrailEntry::Forward(x));
            let cons = self.nodes[x.0 as usize].constraints.clone();
            for (dim, set) in cons {
                if !self.constrain(y, dim, set) {
                    return false;
                }
            }
            let feats = self.nodes[x.0 as usize].features.clone();
            for (f, v) in feats {
                match self.get(y, f) {
                    Some(w) => work.push((v, w)),
                    None => {
                        if !self.add_feature(y, f, v) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    pub fn checkpoint(&mut self) -> Checkpoint {
        let serial = self.next_serial;
        self.next_serial += 1;
        self.live.push(serial);
        Checkpoint {
            trail_len: self.trail.len(),
            nodes_len: self.nodes.len(),
            serial,
        }
    }

    /// Undoes every mutation made since `cp` and invalidates `cp` together
    /// with all checkpoints issued after it.
    ///
    /// Panics on a checkpoint that was already rolled back or released.
    pub fn rollback(&mut self, cp: Checkpoint) {
        let pos = self
            .live
            .iter()
            .rposition(|s| *s == cp.serial)
            .unwrap_or_else(|| panic!("stale checkpoint #{}", cp.serial));
        self.live.truncate(pos);
        while self.trail.len() > cp.trail_len {
            match self.trail.pop().unwrap() {
                TrailEntry::Forward(n) => self.nodes[n.0 as usize].forward = None,
                TrailEntry::Narrow { node, index, old } => {
                    self.nodes[node.0 as usize].constraints[index].1 = old
                }
                TrailEntry::AddConstraint(n) => {
                    self.nodes[n.0 as usize].constraints.pop();
                }
                TrailEntry::AddFeature(n) => {
                    self.nodes[n.0 as usize].features.pop();
                }
            }
        }
        self.nodes.truncate(cp.nodes_len);
    }

    /// Drops a checkpoint (and later ones) while keeping the mutations.
    pub fn release(&mut self, cp: Checkpoint) {
        if let Some(pos) = self.live.iter().rposition(|s| *s == cp.serial) {
            self.live.truncate(pos);
        }
    }

    /// Raw node table, for structural comparison in tests.
    pub fn snapshot(&self) -> Vec<Node> {
        self.nodes.clone()
    }

    /// Copies the subgraph reachable from `roots` into a fresh store without
    /// forwarding links. Returns the store and the images of the roots.
    pub fn copy_out(&self, roots: &[NodeId]) -> (Store, Vec<NodeId>) {
        let mut out = Store::new(self.domain.clone());
        let mut map: HashMap<NodeId, NodeId> = HashMap::new();
        let mut queue = VecDeque::new();
        let mut image = |n: NodeId, out: &mut Store, queue: &mut VecDeque<NodeId>| -> NodeId {
            *map.entry(n).or_insert_with(|| {
                queue.push_back(n);
                out.fresh()
            })
        };
        let images: Vec<NodeId> = roots
            .iter()
            .map(|r| image(self.deref(*r), &mut out, &mut queue))
            .collect();
        while let Some(n) = queue.pop_front() {
            let target = image(n, &mut out, &mut queue);
            let constraints = self.node(n).constraints.clone();
            let features: Vec<_> = self
                .features(n)
                .into_iter()
                .map(|(f, v)| (f, image(v, &mut out, &mut queue)))
                .collect();
            let node = &mut out.nodes[target.0 as usize];
            node.constraints = constraints;
            node.features = features;
        }
        (out, images)
    }

    /// Graph isomorphism of the structures rooted at `a` (here) and `b` (in
    /// `other`). Terminates on cyclic graphs.
    pub fn isomorphic(&self, a: NodeId, other: &Store, b: NodeId) -> bool {
        let mut fwd: HashMap<NodeId, NodeId> = HashMap::new();
        let mut bwd: HashMap<NodeId, NodeId> = HashMap::new();
        let mut stack = vec![(self.deref(a), other.deref(b))];
        while let Some((x, y)) = stack.pop() {
            match (fwd.get(&x), bwd.get(&y)) {
                (Some(y2), Some(x2)) if *y2 == y && *x2 == x => continue,
                (None, None) => {}
                _ => return false,
            }
            fwd.insert(x, y);
            bwd.insert(y, x);
            let mut cx = self.node(x).constraints.clone();
            let mut cy = other.node(y).constraints.clone();
            cx.sort();
            cy.sort();
            if cx != cy {
                return false;
            }
            let mut fx = self.features(x);
            let mut fy = other.features(y);
            if fx.len() != fy.len() {
                return false;
            }
            fx.sort_by_key(|(f, _)| *f);
            fy.sort_by_key(|(f, _)| *f);
            for ((f1, v1), (f2, v2)) in fx.into_iter().zip(fy) {
                if f1 != f2 {
                    return false;
                }
                stack.push((v1, v2));
            }
        }
        true
    }

    /// Renders the structure rooted at `n`; shared nodes print as `#k`.
    pub fn render(&self, n: NodeId) -> String {
        let mut tags = HashMap::new();
        let mut out = String::new();
        self.render_into(self.deref(n), &mut tags, &mut out);
        out
    }

    fn render_into(&self, n: NodeId, tags: &mut HashMap<NodeId, usize>, out: &mut String) {
        if let Some(t) = tags.get(&n) {
            out.push_str(&format!("#{t}"));
            return;
        }
        let tag = tags.len();
        tags.insert(n, tag);
        out.push_str(&format!("#{tag}["));
        let mut first = true;
        for (dim, set) in &self.node(n).constraints {
            if !first {
                out.push(' ');
            }
            first = false;
            let names = self.domain.leaf_names(*dim, set);
            if names.len() <= 6 {
                out.push_str(&names.join("|"));
            } else {
                out.push_str(&format!("{}:{}", self.domain.dim_name(*dim), names.len()));
            }
        }
        for (f, v) in self.features(n) {
            if !first {
                out.push(' ');
            }
            first = false;
            out.push_str(self.domain.feature_name(f));
            out.push(':');
            self.render_into(v, tags, out);
        }
        out.push(']');
    }
}
