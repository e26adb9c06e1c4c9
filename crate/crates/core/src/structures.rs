//! Relational structures over small finite domains, and instances of the
//! constraint satisfaction problem whose constraint set is split into a
//! *base* part and a distinguished *alien* part.
//!
//! Domains are always `{0, …, d-1}`. A [`Relation`] is a duplicate-free set
//! of tuples of a fixed declared arity; a [`Structure`] names finitely many
//! relations over one domain; an [`Instance`] applies relations from two
//! structures (base and alien, sharing the domain) to a list of variables.
//! The number of alien-flagged constraints is the parameter most of the
//! algorithms in this crate branch on, so instances keep the flag on every
//! constraint rather than segregating the two constraint lists.
//!
//! All types here are plain immutable data: every mutation is expressed as
//! construction of a new value, and construction validates the invariants
//! (arity agreement, domain bounds, symbol resolution) so the solver and
//! rewrite modules can rely on them unchecked.

use std::collections::BTreeMap;
use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A single domain element. Domains are `0..d`, so values are plain indices.
pub type Value = usize;

/// Errors raised while building or evaluating the model types, and while
/// reading them from JSON documents.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("malformed document: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error("relation {symbol:?} declares arity {declared} but tuple {tuple:?} has {found} entries")]
    ArityMismatch {
        symbol: String,
        declared: usize,
        tuple: Vec<Value>,
        found: usize,
    },
    #[error("constraint {index} applies {symbol:?} (arity {declared}) to {found} arguments")]
    ScopeArityMismatch {
        index: usize,
        symbol: String,
        declared: usize,
        found: usize,
    },
    #[error("unknown relation symbol {symbol:?} in {side} structure")]
    UnknownSymbol { symbol: String, side: &'static str },
    #[error("value {value} outside domain 0..{domain}")]
    DomainBound { value: Value, domain: usize },
    #[error("duplicate relation symbol {0:?}")]
    DuplicateSymbol(String),
    #[error("duplicate variable name {0:?}")]
    DuplicateVariable(String),
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("variable index {index} out of range for {count} variables")]
    VariableIndex { index: usize, count: usize },
    #[error("domain must have at least one element")]
    EmptyDomain,
    #[error("base domain {base} and alien domain {alien} differ")]
    DomainMismatch { base: usize, alien: usize },
    #[error("assignment misses variable {0:?}")]
    UnassignedVariable(String),
    #[error("structure reference {0:?} cannot be resolved in this context")]
    UnresolvedReference(String),
}

/// A finite relation: a set of tuples over `{0, …, d-1}`, all of the same
/// declared arity. The arity is stored explicitly so empty relations of
/// different arities stay distinguishable.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Relation {
    arity: usize,
    tuples: std::collections::BTreeSet<Vec<Value>>,
}

impl Relation {
    /// Builds a relation from an iterator of tuples, deduplicating as a set.
    /// Fails if any tuple disagrees with the declared arity.
    pub fn new(
        arity: usize,
        tuples: impl IntoIterator<Item = Vec<Value>>,
    ) -> Result<Self, ModelError> {
        let mut set = std::collections::BTreeSet::new();
        for t in tuples {
            if t.len() != arity {
                return Err(ModelError::ArityMismatch {
                    symbol: String::new(),
                    declared: arity,
                    found: t.len(),
                    tuple: t,
                });
            }
            set.insert(t);
        }
        Ok(Relation { arity, tuples: set })
    }

    /// The empty relation of the given arity.
    pub fn empty(arity: usize) -> Self {
        Relation {
            arity,
            tuples: Default::default(),
        }
    }

    /// The full relation `{0,…,d-1}^arity`.
    pub fn full(arity: usize, domain: usize) -> Self {
        let mut tuples = std::collections::BTreeSet::new();
        for t in tuples_over(domain, arity) {
            tuples.insert(t);
        }
        Relation { arity, tuples }
    }

    /// The one-tuple relation `{t}`.
    pub fn singleton(tuple: Vec<Value>) -> Self {
        let arity = tuple.len();
        let mut tuples = std::collections::BTreeSet::new();
        tuples.insert(tuple);
        Relation { arity, tuples }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, tuple: &[Value]) -> bool {
        tuple.len() == self.arity && self.tuples.contains(tuple)
    }

    /// Iterates tuples in lexicographic order.
    pub fn tuples(&self) -> impl Iterator<Item = &[Value]> {
        self.tuples.iter().map(|t| t.as_slice())
    }

    /// Largest value mentioned by any tuple, if the relation is non-empty
    /// and has positive arity.
    pub fn max_value(&self) -> Option<Value> {
        self.tuples.iter().flat_map(|t| t.iter().copied()).max()
    }

    /// Whether the constant tuple `(v, …, v)` belongs to the relation.
    pub fn contains_constant(&self, v: Value) -> bool {
        self.tuples.contains(&vec![v; self.arity])
    }

    /// The complement `{0,…,d-1}^arity \ self`.
    pub fn complement(&self, domain: usize) -> Relation {
        let mut tuples = std::collections::BTreeSet::new();
        for t in tuples_over(domain, self.arity) {
            if !self.tuples.contains(&t) {
                tuples.insert(t);
            }
        }
        Relation {
            arity: self.arity,
            tuples,
        }
    }
}

impl fmt::Display for Relation {
    /// Writes a relation as `{(0,1), (1,0)}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, t) in self.tuples.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "(")?;
            for (j, v) in t.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{v}")?;
            }
            write!(f, ")")?;
        }
        write!(f, "}}")
    }
}

/// Enumerates `domain^arity` tuples in lexicographic order.
pub fn tuples_over(domain: usize, arity: usize) -> impl Iterator<Item = Vec<Value>> {
    let count = domain
        .checked_pow(arity as u32)
        .expect("tuple space fits in usize");
    (0..count).map(move |mut ix| {
        let mut t = vec![0; arity];
        for slot in t.iter_mut().rev() {
            *slot = ix % domain;
            ix /= domain;
        }
        t
    })
}

/// A named family of relations over one finite domain.
///
/// Symbol order is preserved from construction; it drives serialization,
/// constraint resolution diagnostics, and every deterministic enumeration
/// in the crate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Structure {
    domain_size: usize,
    relations: IndexMap<String, Relation>,
}

impl Structure {
    /// Builds a structure, checking that the domain is non-empty, symbols
    /// are unique, and every tuple value lies below the domain size.
    pub fn new(
        domain_size: usize,
        relations: impl IntoIterator<Item = (String, Relation)>,
    ) -> Result<Self, ModelError> {
        if domain_size == 0 {
            return Err(ModelError::EmptyDomain);
        }
        let mut map = IndexMap::new();
        for (symbol, rel) in relations {
            if let Some(v) = rel.max_value() {
                if v >= domain_size {
                    return Err(ModelError::DomainBound {
                        value: v,
                        domain: domain_size,
                    });
                }
            }
            if map.insert(symbol.clone(), rel).is_some() {
                return Err(ModelError::DuplicateSymbol(symbol));
            }
        }
        Ok(Structure {
            domain_size,
            relations: map,
        })
    }

    /// A structure over the given domain with no relations at all.
    pub fn without_relations(domain_size: usize) -> Self {
        Structure {
            domain_size: domain_size.max(1),
            relations: IndexMap::new(),
        }
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn relation(&self, symbol: &str) -> Option<&Relation> {
        self.relations.get(symbol)
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, &Relation)> {
        self.relations.iter().map(|(s, r)| (s.as_str(), r))
    }

    pub fn symbols(&self) -> impl Iterator<Item = &str> {
        self.relations.keys().map(|s| s.as_str())
    }

    pub fn relation_count(&self) -> usize {
        self.relations.len()
    }

    /// Disjoint union of two structures over the same domain. Shared symbol
    /// names are an error: the two signatures must not overlap.
    pub fn union(&self, other: &Structure) -> Result<Structure, ModelError> {
        if self.domain_size != other.domain_size {
            return Err(ModelError::DomainMismatch {
                base: self.domain_size,
                alien: other.domain_size,
            });
        }
        let mut map = self.relations.clone();
        for (symbol, rel) in &other.relations {
            if map.insert(symbol.clone(), rel.clone()).is_some() {
                return Err(ModelError::DuplicateSymbol(symbol.clone()));
            }
        }
        Ok(Structure {
            domain_size: self.domain_size,
            relations: map,
        })
    }

    /// Reads a structure from its JSON document form.
    pub fn parse(doc: &str) -> Result<Self, ModelError> {
        let wire: StructureDoc = serde_json::from_str(doc)?;
        wire.into_structure()
    }

    /// Serializes to the canonical JSON document form: insertion-ordered
    /// symbols, lexicographically sorted tuples.
    pub fn serialize(&self) -> String {
        serde_json::to_string(&StructureDoc::from_structure(self)).expect("structure serializes")
    }
}

/// The structure `{c_0, …, c_{d-1}}` of singleton unary relations, one per
/// domain element: `c_v = {(v)}`.
pub fn constants_structure(domain_size: usize) -> Structure {
    let relations = (0..domain_size).map(|v| (format!("c_{v}"), Relation::singleton(vec![v])));
    Structure::new(domain_size.max(1), relations).expect("constants are in bounds")
}

/// One applied constraint: a relation symbol, the variable indices it is
/// applied to, and whether it counts against the alien budget.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub symbol: String,
    pub scope: Vec<usize>,
    pub alien: bool,
}

impl Constraint {
    pub fn base(symbol: impl Into<String>, scope: Vec<usize>) -> Self {
        Constraint {
            symbol: symbol.into(),
            scope,
            alien: false,
        }
    }

    pub fn alien(symbol: impl Into<String>, scope: Vec<usize>) -> Self {
        Constraint {
            symbol: symbol.into(),
            scope,
            alien: true,
        }
    }
}

/// An instance of the hybrid satisfaction problem: variables, base
/// constraints over the base structure, and up to a few alien constraints
/// over the alien structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    base: Structure,
    alien: Structure,
    variables: Vec<String>,
    constraints: Vec<Constraint>,
}

impl Instance {
    /// Validates and builds an instance. Checks performed:
    ///
    /// * base and alien domains agree and signatures are disjoint,
    /// * variable names are unique,
    /// * every constraint symbol resolves in the structure its flag names,
    /// * every scope matches the relation's arity and indexes a variable.
    pub fn new(
        base: Structure,
        alien: Structure,
        variables: Vec<String>,
        constraints: Vec<Constraint>,
    ) -> Result<Self, ModelError> {
        base.union(&alien)?;
        let mut seen = std::collections::BTreeSet::new();
        for v in &variables {
            if !seen.insert(v.clone()) {
                return Err(ModelError::DuplicateVariable(v.clone()));
            }
        }
        for (index, c) in constraints.iter().enumerate() {
            let side = if c.alien { &alien } else { &base };
            let side_name = if c.alien { "alien" } else { "base" };
            let rel = side
                .relation(&c.symbol)
                .ok_or_else(|| ModelError::UnknownSymbol {
                    symbol: c.symbol.clone(),
                    side: side_name,
                })?;
            if rel.arity() != c.scope.len() {
                return Err(ModelError::ScopeArityMismatch {
                    index,
                    symbol: c.symbol.clone(),
                    declared: rel.arity(),
                    found: c.scope.len(),
                });
            }
            for &ix in &c.scope {
                if ix >= variables.len() {
                    return Err(ModelError::VariableIndex {
                        index: ix,
                        count: variables.len(),
                    });
                }
            }
        }
        Ok(Instance {
            base,
            alien,
            variables,
            constraints,
        })
    }

    pub fn base(&self) -> &Structure {
        &self.base
    }

    pub fn alien(&self) -> &Structure {
        &self.alien
    }

    pub fn domain_size(&self) -> usize {
        self.base.domain_size()
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Number of alien-flagged constraints: the parameter `#ac`.
    pub fn alien_count(&self) -> usize {
        self.constraints.iter().filter(|c| c.alien).count()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == name)
    }

    /// The relation a constraint applies, out of the structure its flag
    /// selects. Valid constraints always resolve; this is infallible on an
    /// instance built through [`Instance::new`].
    pub fn relation_of(&self, c: &Constraint) -> &Relation {
        let side = if c.alien { &self.alien } else { &self.base };
        side.relation(&c.symbol).expect("constraint was validated")
    }

    /// Evaluates a total assignment: true when every constraint's scope
    /// tuple belongs to its relation. Partial assignments are an error.
    pub fn evaluate(&self, a: &Assignment) -> Result<bool, ModelError> {
        let dense = self.dense_values(a)?;
        Ok(self.evaluate_dense(&dense))
    }

    /// Evaluation against values listed in variable declaration order.
    /// The workhorse behind [`Instance::evaluate`] and the solvers.
    pub fn evaluate_dense(&self, values: &[Value]) -> bool {
        self.constraints.iter().all(|c| {
            let tuple: Vec<Value> = c.scope.iter().map(|&ix| values[ix]).collect();
            self.relation_of(c).contains(&tuple)
        })
    }

    fn dense_values(&self, a: &Assignment) -> Result<Vec<Value>, ModelError> {
        self.variables
            .iter()
            .map(|v| {
                a.get(v)
                    .ok_or_else(|| ModelError::UnassignedVariable(v.clone()))
            })
            .collect()
    }

    /// Reads an instance from its JSON document form. `resolve` supplies
    /// the structure document for a string reference (typically a file
    /// loader); pass [`no_references`] to reject references outright.
    pub fn parse(
        doc: &str,
        resolve: impl Fn(&str) -> Result<String, ModelError>,
    ) -> Result<Self, ModelError> {
        let wire: InstanceDoc = serde_json::from_str(doc)?;
        wire.into_instance(&resolve)
    }

    /// Serializes to the canonical JSON document form with both structures
    /// inlined.
    pub fn serialize(&self) -> String {
        serde_json::to_string(&InstanceDoc::from_instance(self)).expect("instance serializes")
    }
}

/// Resolver for [`Instance::parse`] that refuses string references.
pub fn no_references(name: &str) -> Result<String, ModelError> {
    Err(ModelError::UnresolvedReference(name.to_string()))
}

/// A map from variable names to domain values. Witnesses returned by the
/// solvers are total; partial assignments only appear as inputs being built
/// up.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment {
    values: BTreeMap<String, Value>,
}

impl Assignment {
    pub fn new() -> Self {
        Assignment::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (String, Value)>) -> Self {
        Assignment {
            values: pairs.into_iter().collect(),
        }
    }

    /// Pairs up variable names with a dense value vector in declaration
    /// order. Panics if the lengths disagree; callers own that invariant.
    pub fn from_dense(variables: &[String], values: &[Value]) -> Self {
        assert_eq!(variables.len(), values.len());
        Assignment {
            values: variables.iter().cloned().zip(values.iter().copied()).collect(),
        }
    }

    pub fn get(&self, var: &str) -> Option<Value> {
        self.values.get(var).copied()
    }

    pub fn set(&mut self, var: impl Into<String>, value: Value) {
        self.values.insert(var.into(), value);
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Value)> {
        self.values.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

impl Serialize for Assignment {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.values.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Assignment {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(Assignment {
            values: BTreeMap::deserialize(d)?,
        })
    }
}

// ---------------------------------------------------------------------------
// JSON document forms.
//
// The wire types mirror the documents exactly; unknown keys are rejected so
// a typo like "aritey" fails loudly instead of being ignored.

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RelationDoc {
    arity: usize,
    tuples: Vec<Vec<Value>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct StructureDoc {
    domain: usize,
    relations: IndexMap<String, RelationDoc>,
}

impl StructureDoc {
    pub(crate) fn into_structure(self) -> Result<Structure, ModelError> {
        let mut rels = Vec::new();
        for (symbol, rd) in self.relations {
            for t in &rd.tuples {
                if t.len() != rd.arity {
                    return Err(ModelError::ArityMismatch {
                        symbol,
                        declared: rd.arity,
                        tuple: t.clone(),
                        found: t.len(),
                    });
                }
            }
            rels.push((symbol, Relation::new(rd.arity, rd.tuples)?));
        }
        Structure::new(self.domain, rels)
    }

    pub(crate) fn from_structure(s: &Structure) -> Self {
        StructureDoc {
            domain: s.domain_size,
            relations: s
                .relations
                .iter()
                .map(|(sym, r)| {
                    (
                        sym.clone(),
                        RelationDoc {
                            arity: r.arity(),
                            tuples: r.tuples().map(|t| t.to_vec()).collect(),
                        },
                    )
                })
                .collect(),
        }
    }
}

/// Inline structure object or string reference to one.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum StructureRef {
    Reference(String),
    Inline(StructureDoc),
}

impl StructureRef {
    fn resolve(
        self,
        resolve: &impl Fn(&str) -> Result<String, ModelError>,
    ) -> Result<Structure, ModelError> {
        match self {
            StructureRef::Inline(doc) => doc.into_structure(),
            StructureRef::Reference(name) => {
                let doc = resolve(&name)?;
                Structure::parse(&doc)
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct ConstraintDoc {
    pub(crate) rel: String,
    pub(crate) args: Vec<String>,
    #[serde(default)]
    pub(crate) alien: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    base: StructureRef,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alien: Option<StructureRef>,
    variables: Vec<String>,
    constraints: Vec<ConstraintDoc>,
}

impl InstanceDoc {
    fn into_instance(
        self,
        resolve: &impl Fn(&str) -> Result<String, ModelError>,
    ) -> Result<Instance, ModelError> {
        let base = self.base.resolve(resolve)?;
        let alien = match self.alien {
            Some(r) => r.resolve(resolve)?,
            None => Structure::without_relations(base.domain_size()),
        };
        let mut constraints = Vec::new();
        for cd in self.constraints {
            let scope = cd
                .args
                .iter()
                .map(|name| {
                    self.variables
                        .iter()
                        .position(|v| v == name)
                        .ok_or_else(|| ModelError::UnknownVariable(name.clone()))
                })
                .collect::<Result<Vec<_>, _>>()?;
            constraints.push(Constraint {
                symbol: cd.rel,
                scope,
                alien: cd.alien,
            });
        }
        Instance::new(base, alien, self.variables, constraints)
    }

    fn from_instance(inst: &Instance) -> Self {
        InstanceDoc {
            base: StructureRef::Inline(StructureDoc::from_structure(&inst.base)),
            alien: Some(StructureRef::Inline(StructureDoc::from_structure(
                &inst.alien,
            ))),
            variables: inst.variables.clone(),
            constraints: inst
                .constraints
                .iter()
                .map(|c| ConstraintDoc {
                    rel: c.symbol.clone(),
                    args: c.scope.iter().map(|&ix| inst.variables[ix].clone()).collect(),
                    alien: c.alien,
                })
                .collect(),
        }
    }
}

/// Picks a variable name not yet in `used`, starting from `stem` and
/// appending a counter as needed. Deterministic for reproducible rewrites.
pub(crate) fn fresh_name(used: &[String], stem: &str) -> String {
    if !used.iter().any(|u| u == stem) {
        return stem.to_string();
    }
    for i in 0.. {
        let candidate = format!("{stem}{i}");
        if !used.iter().any(|u| u == &candidate) {
            return candidate;
        }
    }
    unreachable!()
}

/// Picks a relation symbol not used by either structure, same scheme as
/// [`fresh_name`].
pub(crate) fn fresh_symbol(structures: &[&Structure], stem: &str) -> String {
    let taken = |name: &str| structures.iter().any(|s| s.relation(name).is_some());
    if !taken(stem) {
        return stem.to_string();
    }
    for i in 0.. {
        let candidate = format!("{stem}{i}");
        if !taken(&candidate) {
            return candidate;
        }
    }
    unreachable!()
}
