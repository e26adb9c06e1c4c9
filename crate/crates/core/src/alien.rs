//! The branching solver for instances with few alien constraints, and the
//! complexity classifier for Boolean base/alien language pairs.
//!
//! The solver rests on one observation: over a finite domain every alien
//! relation is a finite union of relations the base side can absorb (in the
//! worst case, one singleton per tuple, each a conjunction of constants).
//! Branching over which part of the union each alien constraint falls into
//! gives at most `b^k` leaf instances, `k` the alien-constraint count and
//! `b` the widest union, and each leaf is a plain base-language instance.
//!
//! The classifier reproduces the Boolean trichotomy for
//! `Alien(base, alien)`: fixed-parameter tractable when the base is
//! Schaefer, hard already at one alien constraint in the general case, and
//! a curious middle band (polynomial at one alien constraint, NP-hard at
//! two) when the base is 0- and 1-valid and the alien side pins both
//! constants. Two extra verdicts cover the degenerate ends: a jointly
//! tractable union, and a base that is already hard on its own.

use indexmap::IndexMap;
use serde::ser::SerializeMap;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{schaefer_flags, AlgebraError, OperationTable, SchaeferFlags};
use crate::reductions::{Atom, PpDefinition};
use crate::solvers::{
    solve_bruteforce, solve_schaefer, BruteForceOptions, SchaeferClass, SolveResult, SolverError,
};
use crate::structures::{
    fresh_symbol, Assignment, Constraint, Instance, ModelError, Relation, Structure, Value,
};

#[derive(Debug, Error)]
pub enum AlienError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("no decomposition supplied for alien relation {symbol:?}")]
    MissingDecomposition { symbol: String },
    #[error("decomposition names {symbol:?}, which is not an alien relation")]
    UnexpectedDecomposition { symbol: String },
    #[error("replacement for {symbol:?} has the wrong arity")]
    PartsArity { symbol: String },
    #[error("replacements for {symbol:?} do not union to the relation")]
    PartsUnion { symbol: String },
}

/// One way an alien constraint may be narrowed: a sub-relation, optionally
/// with a definition spelling out how the base side (extended with
/// constants) expresses it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Replacement {
    pub relation: Relation,
    pub definition: Option<PpDefinition>,
}

/// For every alien relation, a list of replacement relations whose union is
/// exactly the relation. Construction checks the union, so a value of this
/// type is always a faithful cover.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnionDecomposition {
    parts: IndexMap<String, Vec<Replacement>>,
}

impl UnionDecomposition {
    /// Validates a caller-supplied decomposition against the alien
    /// structure: every alien relation covered, arities right, unions
    /// exact. Coarser-than-singleton parts are welcome; they shrink the
    /// branching factor.
    pub fn new(
        alien: &Structure,
        parts: IndexMap<String, Vec<Replacement>>,
    ) -> Result<Self, AlienError> {
        for symbol in parts.keys() {
            if alien.relation(symbol).is_none() {
                return Err(AlienError::UnexpectedDecomposition {
                    symbol: symbol.clone(),
                });
            }
        }
        for (symbol, rel) in alien.relations() {
            let list = parts
                .get(symbol)
                .ok_or_else(|| AlienError::MissingDecomposition {
                    symbol: symbol.to_string(),
                })?;
            let mut union = std::collections::BTreeSet::new();
            for replacement in list {
                if replacement.relation.arity() != rel.arity() {
                    return Err(AlienError::PartsArity {
                        symbol: symbol.to_string(),
                    });
                }
                union.extend(replacement.relation.tuples().map(|t| t.to_vec()));
            }
            let target: std::collections::BTreeSet<Vec<Value>> =
                rel.tuples().map(|t| t.to_vec()).collect();
            if union != target {
                return Err(AlienError::PartsUnion {
                    symbol: symbol.to_string(),
                });
            }
        }
        Ok(UnionDecomposition { parts })
    }

    pub fn parts_of(&self, symbol: &str) -> Option<&[Replacement]> {
        self.parts.get(symbol).map(|v| v.as_slice())
    }

    pub fn parts(&self) -> impl Iterator<Item = (&str, &[Replacement])> {
        self.parts.iter().map(|(s, v)| (s.as_str(), v.as_slice()))
    }

    /// The branching factor `b`: the widest replacement list (at least 1,
    /// so leaf bounds stay meaningful when nothing is decomposed).
    pub fn branching(&self) -> usize {
        self.parts.values().map(Vec::len).max().unwrap_or(1).max(1)
    }
}

/// The default decomposition: each alien relation split into its single
/// tuples, each singleton carrying the definition that pins every position
/// to its constant (read over the base extended with the constant
/// relations `c_0, …, c_{d-1}`).
pub fn decompose_alien(
    alien: &Structure,
    base_domain: usize,
) -> Result<UnionDecomposition, AlienError> {
    if alien.domain_size() != base_domain {
        return Err(AlienError::Model(ModelError::DomainMismatch {
            base: base_domain,
            alien: alien.domain_size(),
        }));
    }
    let mut parts = IndexMap::new();
    for (symbol, rel) in alien.relations() {
        let list = rel
            .tuples()
            .map(|t| {
                let atoms = t
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| Atom::base(format!("c_{v}"), vec![i]))
                    .collect();
                Replacement {
                    relation: Relation::singleton(t.to_vec()),
                    definition: Some(PpDefinition::new(rel.arity(), 0, atoms)),
                }
            })
            .collect();
        parts.insert(symbol.to_string(), list);
    }
    UnionDecomposition::new(alien, parts)
}

/// How leaf instances of the branching search are decided.
///
/// With `Schaefer(class)` every leaf is handed to the polynomial solver
/// under that class claim. The claim must survive the decomposition:
/// min, max, majority, and minority are idempotent and so preserve the
/// singleton relations of the default decomposition, while validity at a
/// constant does not survive and belongs only on instances without alien
/// constraints.
#[derive(Clone, Copy, Debug)]
pub enum BaseSolver {
    Brute(BruteForceOptions),
    Schaefer(SchaeferClass),
}

impl BaseSolver {
    fn run(&self, inst: &Instance) -> Result<SolveResult, SolverError> {
        match self {
            BaseSolver::Brute(opts) => solve_bruteforce(inst, opts),
            BaseSolver::Schaefer(class) => solve_schaefer(inst, *class),
        }
    }
}

/// What the branching search did: the answer plus the instrumentation the
/// `b^k` bound is checked against.
#[derive(Clone, Debug)]
pub struct FptOutcome {
    pub result: SolveResult,
    /// Leaf instances actually solved; stops early on the first success.
    pub leaves: u64,
    /// The bound `b^k` the leaf count provably respects.
    pub leaf_bound: u64,
    pub branching: usize,
}

/// Branching search over alien constraints: depth level `i` replaces the
/// `i`-th alien constraint (declaration order) by each of its replacement
/// relations (decomposition order), and every leaf is a base-only instance
/// handed to `base_solver`. The witness comes from the first satisfiable
/// leaf in that deterministic order; it satisfies the original instance
/// because replacements are sub-relations.
pub fn solve_alien_fpt(
    inst: &Instance,
    dec: &UnionDecomposition,
    base_solver: &BaseSolver,
) -> Result<FptOutcome, AlienError> {
    let alien_positions: Vec<usize> = inst
        .constraints()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.alien)
        .map(|(i, _)| i)
        .collect();
    let k = alien_positions.len();

    // Extend the base structure with every replacement relation up front;
    // leaves then differ only in which symbols their constraints use.
    let mut extended = inst.base().clone();
    let mut part_symbols: IndexMap<String, Vec<String>> = IndexMap::new();
    for i in &alien_positions {
        let symbol = &inst.constraints()[*i].symbol;
        if part_symbols.contains_key(symbol) {
            continue;
        }
        let list = dec
            .parts_of(symbol)
            .ok_or_else(|| AlienError::MissingDecomposition {
                symbol: symbol.clone(),
            })?;
        let mut names = Vec::with_capacity(list.len());
        for (j, replacement) in list.iter().enumerate() {
            let name = fresh_symbol(&[&extended, inst.alien()], &format!("{symbol}#{j}"));
            let addition = Structure::new(
                inst.domain_size(),
                vec![(name.clone(), replacement.relation.clone())],
            )
            .map_err(AlienError::Model)?;
            extended = extended.union(&addition).map_err(AlienError::Model)?;
            names.push(name);
        }
        part_symbols.insert(symbol.clone(), names);
    }

    let mut search = BranchSearch {
        inst,
        extended: &extended,
        alien_positions: &alien_positions,
        part_symbols: &part_symbols,
        base_solver,
        choice: vec![0; k],
        leaves: 0,
    };
    let witness = search.run(0)?;
    let leaves = search.leaves;

    let branching = dec.branching();
    let leaf_bound = (branching as u64)
        .checked_pow(k as u32)
        .unwrap_or(u64::MAX);
    debug_assert!(leaves <= leaf_bound);

    let result = match witness {
        Some(w) => {
            debug_assert!(matches!(inst.evaluate(&w), Ok(true)));
            SolveResult::sat(w)
        }
        None => SolveResult::unsat(),
    };
    Ok(FptOutcome {
        result,
        leaves,
        leaf_bound,
        branching,
    })
}

struct BranchSearch<'a> {
    inst: &'a Instance,
    extended: &'a Structure,
    alien_positions: &'a [usize],
    part_symbols: &'a IndexMap<String, Vec<String>>,
    base_solver: &'a BaseSolver,
    choice: Vec<usize>,
    leaves: u64,
}

impl BranchSearch<'_> {
    fn run(&mut self, level: usize) -> Result<Option<Assignment>, AlienError> {
        if level == self.alien_positions.len() {
            self.leaves += 1;
            let leaf = self.leaf_instance()?;
            let result = self.base_solver.run(&leaf)?;
            return Ok(result.witness().cloned());
        }
        let symbol = &self.inst.constraints()[self.alien_positions[level]].symbol;
        let width = self.part_symbols[symbol].len();
        for j in 0..width {
            self.choice[level] = j;
            if let Some(w) = self.run(level + 1)? {
                return Ok(Some(w));
            }
        }
        Ok(None)
    }

    fn leaf_instance(&self) -> Result<Instance, AlienError> {
        let mut constraints: Vec<Constraint> = self.inst.constraints().to_vec();
        for (level, &ci) in self.alien_positions.iter().enumerate() {
            let symbol = &constraints[ci].symbol;
            let replacement = self.part_symbols[symbol][self.choice[level]].clone();
            constraints[ci] = Constraint::base(replacement, constraints[ci].scope.clone());
        }
        Ok(Instance::new(
            self.extended.clone(),
            Structure::without_relations(self.inst.domain_size()),
            self.inst.variables().to_vec(),
            constraints,
        )?)
    }
}

/// Satisfiability for the narrow regime where constants decide everything:
/// a base that is both 0- and 1-valid, every alien relation closed under
/// some constant operation, and at most one alien constraint. Under those
/// preconditions any solution can be collapsed to a constant one, so
/// trying each constant assignment is a complete polynomial procedure.
/// Outside the preconditions a `sat` answer is still correct, an `unsat`
/// answer is not meaningful.
pub fn solve_alien_by_constants(inst: &Instance) -> SolveResult {
    let n = inst.variables().len();
    for v in 0..inst.domain_size() {
        let values = vec![v; n];
        if inst.evaluate_dense(&values) {
            return SolveResult::sat(Assignment::from_dense(inst.variables(), &values));
        }
    }
    SolveResult::unsat()
}

/// The five outcomes of the Boolean classifier, ordered here from easiest
/// to hardest regime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BooleanVerdict {
    /// The union language is itself tractable; alien constraints add nothing.
    #[serde(rename = "TOTAL_P")]
    TotalP,
    /// The base is Schaefer: branching solves any number of alien
    /// constraints in `b^k · poly` time.
    #[serde(rename = "FPT")]
    Fpt,
    /// One alien constraint stays polynomial, two are already NP-hard.
    #[serde(rename = "NPH_AT_2_P_AT_1")]
    NphAt2PAt1,
    /// NP-hard from the first alien constraint on.
    #[serde(rename = "NPH_AT_1")]
    NphAt1,
    /// The base alone is NP-hard; the parameter cannot help.
    #[serde(rename = "BASE_HARD")]
    BaseHard,
}

impl std::fmt::Display for BooleanVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            BooleanVerdict::TotalP => "TOTAL_P",
            BooleanVerdict::Fpt => "FPT",
            BooleanVerdict::NphAt2PAt1 => "NPH_AT_2_P_AT_1",
            BooleanVerdict::NphAt1 => "NPH_AT_1",
            BooleanVerdict::BaseHard => "BASE_HARD",
        };
        f.write_str(name)
    }
}

/// A verdict together with everything the decision looked at, enough to
/// re-derive it by hand.
#[derive(Clone, Debug, Serialize)]
pub struct BooleanClassification {
    pub verdict: BooleanVerdict,
    pub base_flags: SchaeferFlags,
    pub union_flags: SchaeferFlags,
    /// Whether the base is invariant under the 0/1 flip.
    pub complement_invariant: bool,
    /// Whether the constant relations are definable from the base alone.
    pub c0_definable: bool,
    pub c1_definable: bool,
    /// Alien relation symbols `(r0, r1)` where `r0` holds constant 0 but
    /// not 1 and `r1` holds constant 1 but not 0, if such a pair exists.
    pub zero_one_pair: Option<(String, String)>,
    /// Whether every alien relation is closed under some constant
    /// operation.
    pub aliens_constant_closed: bool,
}

/// Classifies `Alien(base, alien)` for Boolean structures.
///
/// Decision order: a tractable union short-circuits to [`BooleanVerdict::TotalP`];
/// a base that is neither Schaefer nor valid at a constant is
/// [`BooleanVerdict::BaseHard`]; a Schaefer base gives [`BooleanVerdict::Fpt`];
/// then a base valid at both constants whose alien side pins a 0/1-pair
/// while every alien relation keeps some constant lands in the
/// [`BooleanVerdict::NphAt2PAt1`] band; everything else is hard at one
/// alien constraint.
pub fn classify_boolean(
    base: &Structure,
    alien: &Structure,
) -> Result<BooleanClassification, AlienError> {
    let union = base.union(alien)?;
    let base_flags = schaefer_flags(base)?;
    let union_flags = schaefer_flags(&union)?;

    let flip = OperationTable::unary(vec![1, 0]).expect("flip is well formed");
    let complement_invariant = flip.preserves_structure(base);
    let c0 = Relation::singleton(vec![0]);
    let c1 = Relation::singleton(vec![1]);
    let c0_definable = crate::algebra::ppdef_check(base, &c0)?.definable;
    let c1_definable = crate::algebra::ppdef_check(base, &c1)?.definable;

    let holds_only = |r: &Relation, v: Value| r.contains_constant(v) && !r.contains_constant(1 - v);
    let r0 = alien
        .relations()
        .find(|(_, r)| holds_only(r, 0))
        .map(|(s, _)| s.to_string());
    let r1 = alien
        .relations()
        .find(|(_, r)| holds_only(r, 1))
        .map(|(s, _)| s.to_string());
    let zero_one_pair = r0.zip(r1);

    let const0 = OperationTable::constant(2, 0);
    let const1 = OperationTable::constant(2, 1);
    let aliens_constant_closed = alien
        .relations()
        .all(|(_, r)| const0.preserves(r) || const1.preserves(r));

    let verdict = if union_flags.any() {
        BooleanVerdict::TotalP
    } else if !base_flags.any() {
        BooleanVerdict::BaseHard
    } else if base_flags.tractable_via_branching() {
        BooleanVerdict::Fpt
    } else if base_flags.zero_valid
        && base_flags.one_valid
        && zero_one_pair.is_some()
        && aliens_constant_closed
    {
        BooleanVerdict::NphAt2PAt1
    } else {
        BooleanVerdict::NphAt1
    };

    Ok(BooleanClassification {
        verdict,
        base_flags,
        union_flags,
        complement_invariant,
        c0_definable,
        c1_definable,
        zero_one_pair,
        aliens_constant_closed,
    })
}

/// How [`solve_alien_auto`] answered an instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Every constraint fits one tractable class; solved in one call.
    SchaeferDirect(SchaeferClass),
    /// Base-class branching over the default decomposition.
    SchaeferBranching(SchaeferClass),
    BruteForce,
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Strategy::SchaeferDirect(c) => write!(f, "schaefer_direct:{c}"),
            Strategy::SchaeferBranching(c) => write!(f, "schaefer_branching:{c}"),
            Strategy::BruteForce => f.write_str("brute_force"),
        }
    }
}

impl Serialize for Strategy {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug)]
pub struct AutoOutcome {
    pub result: SolveResult,
    pub strategy: Strategy,
}

impl Serialize for AutoOutcome {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(3))?;
        m.serialize_entry("strategy", &self.strategy)?;
        match self.result.witness() {
            Some(w) => {
                m.serialize_entry("status", "sat")?;
                m.serialize_entry("witness", w)?;
            }
            None => {
                m.serialize_entry("status", "unsat")?;
                m.serialize_entry("witness", &Option::<Assignment>::None)?;
            }
        }
        m.end()
    }
}

/// Always-exact dispatcher. On Boolean instances it tries, in order: one
/// tractable class covering base and alien together (single direct call),
/// a Schaefer base class that survives branching (the `b^k` search), and
/// exhaustive search as the fallback. Larger domains go straight to the
/// exhaustive search.
pub fn solve_alien_auto(inst: &Instance) -> Result<AutoOutcome, AlienError> {
    if inst.domain_size() != 2 {
        let result = solve_bruteforce(inst, &BruteForceOptions::default())?;
        return Ok(AutoOutcome {
            result,
            strategy: Strategy::BruteForce,
        });
    }

    let k = inst.alien_count();
    if k == 0 {
        let flags = schaefer_flags(inst.base())?;
        if let Some(class) = flags.classes().first().copied() {
            let result = solve_schaefer(inst, class)?;
            return Ok(AutoOutcome {
                result,
                strategy: Strategy::SchaeferDirect(class),
            });
        }
    } else {
        let union = inst.base().union(inst.alien())?;
        let union_flags = schaefer_flags(&union)?;
        if let Some(class) = union_flags.classes().first().copied() {
            let result = solve_schaefer(inst, class)?;
            return Ok(AutoOutcome {
                result,
                strategy: Strategy::SchaeferDirect(class),
            });
        }
        let base_flags = schaefer_flags(inst.base())?;
        let branchable = [
            SchaeferClass::Horn,
            SchaeferClass::AntiHorn,
            SchaeferClass::Bijunctive,
            SchaeferClass::Affine,
        ];
        if let Some(class) = branchable.into_iter().find(|&c| base_flags.has(c)) {
            let dec = decompose_alien(inst.alien(), inst.domain_size())?;
            let outcome = solve_alien_fpt(inst, &dec, &BaseSolver::Schaefer(class))?;
            return Ok(AutoOutcome {
                result: outcome.result,
                strategy: Strategy::SchaeferBranching(class),
            });
        }
    }

    let result = solve_bruteforce(inst, &BruteForceOptions::default())?;
    Ok(AutoOutcome {
        result,
        strategy: Strategy::BruteForce,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(arity: usize, tuples: &[&[Value]]) -> Relation {
        Relation::new(arity, tuples.iter().map(|t| t.to_vec())).unwrap()
    }

    fn structure(domain: usize, rels: Vec<(&str, Relation)>) -> Structure {
        Structure::new(domain, rels.into_iter().map(|(s, r)| (s.to_string(), r))).unwrap()
    }

    fn neq() -> Relation {
        rel(2, &[&[0, 1], &[1, 0]])
    }

    fn imp() -> Relation {
        rel(2, &[&[0, 0], &[0, 1], &[1, 1]])
    }

    fn link() -> Relation {
        // First two or last two coordinates equal.
        rel(
            3,
            &[
                &[0, 0, 0],
                &[0, 0, 1],
                &[0, 1, 1],
                &[1, 0, 0],
                &[1, 1, 0],
                &[1, 1, 1],
            ],
        )
    }

    fn one_in_three() -> Relation {
        rel(3, &[&[0, 0, 1], &[0, 1, 0], &[1, 0, 0]])
    }

    fn instance(
        base: Structure,
        alien: Structure,
        vars: &[&str],
        constraints: Vec<(&str, Vec<usize>, bool)>,
    ) -> Instance {
        Instance::new(
            base,
            alien,
            vars.iter().map(|v| v.to_string()).collect(),
            constraints
                .into_iter()
                .map(|(s, scope, alien)| Constraint {
                    symbol: s.to_string(),
                    scope,
                    alien,
                })
                .collect(),
        )
        .unwrap()
    }

    fn dense(inst: &Instance, res: &SolveResult) -> Vec<Value> {
        let w = res.witness().unwrap();
        inst.variables().iter().map(|v| w.get(v).unwrap()).collect()
    }

    #[test]
    fn default_decomposition_splits_tuple_by_tuple() {
        let alien = structure(2, vec![("neq", neq())]);
        let dec = decompose_alien(&alien, 2).unwrap();
        let parts = dec.parts_of("neq").unwrap();
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].relation, Relation::singleton(vec![0, 1]));
        assert_eq!(parts[1].relation, Relation::singleton(vec![1, 0]));
        assert_eq!(dec.branching(), 2);
        assert_eq!(
            parts[0].definition.as_ref().unwrap().atoms,
            vec![Atom::base("c_0", vec![0]), Atom::base("c_1", vec![1])]
        );
    }

    #[test]
    fn singleton_relations_stay_whole() {
        let alien = structure(2, vec![("pin", rel(1, &[&[1]]))]);
        let dec = decompose_alien(&alien, 2).unwrap();
        assert_eq!(dec.parts_of("pin").unwrap().len(), 1);
        assert_eq!(dec.branching(), 1);
    }

    #[test]
    fn decomposition_validation_requires_an_exact_union() {
        let alien = structure(2, vec![("neq", neq())]);
        let mut parts = IndexMap::new();
        parts.insert(
            "neq".to_string(),
            vec![Replacement {
                relation: Relation::singleton(vec![0, 1]),
                definition: None,
            }],
        );
        assert!(matches!(
            UnionDecomposition::new(&alien, parts),
            Err(AlienError::PartsUnion { symbol }) if symbol == "neq"
        ));
    }

    #[test]
    fn branching_solves_the_implication_disequality_mix() {
        let base = structure(2, vec![("imp", imp())]);
        let alien = structure(2, vec![("neq", neq())]);
        let inst = instance(
            base,
            alien,
            &["x", "y"],
            vec![("imp", vec![0, 1], false), ("neq", vec![0, 1], true)],
        );
        let dec = decompose_alien(inst.alien(), 2).unwrap();
        let out = solve_alien_fpt(&inst, &dec, &BaseSolver::Schaefer(SchaeferClass::Horn)).unwrap();
        assert_eq!(dense(&inst, &out.result), vec![0, 1]);
        assert!(out.leaves <= out.leaf_bound);
        assert_eq!(out.leaf_bound, 2);
    }

    #[test]
    fn branching_detects_unsat_and_visits_every_leaf() {
        let base = structure(2, vec![("imp", imp())]);
        let alien = structure(2, vec![("neq", neq())]);
        let inst = instance(
            base,
            alien,
            &["x", "y"],
            vec![
                ("imp", vec![0, 1], false),
                ("imp", vec![1, 0], false),
                ("neq", vec![0, 1], true),
            ],
        );
        let dec = decompose_alien(inst.alien(), 2).unwrap();
        let out = solve_alien_fpt(&inst, &dec, &BaseSolver::Schaefer(SchaeferClass::Horn)).unwrap();
        assert!(!out.result.is_sat());
        assert_eq!(out.leaves, 2);
    }

    #[test]
    fn no_alien_constraints_means_one_leaf() {
        let base = structure(2, vec![("imp", imp())]);
        let inst = instance(
            base,
            Structure::without_relations(2),
            &["x", "y"],
            vec![("imp", vec![0, 1], false)],
        );
        let dec = decompose_alien(inst.alien(), 2).unwrap();
        let out = solve_alien_fpt(&inst, &dec, &BaseSolver::Brute(Default::default())).unwrap();
        assert!(out.result.is_sat());
        assert_eq!(out.leaves, 1);
        assert_eq!(out.leaf_bound, 1);
    }

    #[test]
    fn branching_agrees_with_brute_force_on_a_mixed_fixture() {
        let base = structure(2, vec![("imp", imp())]);
        let alien = structure(2, vec![("oit", one_in_three())]);
        let inst = instance(
            base,
            alien,
            &["x", "y", "z"],
            vec![
                ("imp", vec![0, 1], false),
                ("imp", vec![1, 2], false),
                ("oit", vec![0, 1, 2], true),
            ],
        );
        let dec = decompose_alien(inst.alien(), 2).unwrap();
        let fpt = solve_alien_fpt(&inst, &dec, &BaseSolver::Schaefer(SchaeferClass::Horn)).unwrap();
        let brute = solve_bruteforce(&inst, &BruteForceOptions::default()).unwrap();
        assert_eq!(fpt.result.is_sat(), brute.is_sat());
        assert_eq!(fpt.result, brute);
    }

    #[test]
    fn classification_of_the_link_with_disequality() {
        let base = structure(2, vec![("link", link())]);
        let alien = structure(2, vec![("neq", neq())]);
        let report = classify_boolean(&base, &alien).unwrap();
        assert_eq!(report.verdict, BooleanVerdict::NphAt1);
        assert!(report.base_flags.zero_valid && report.base_flags.one_valid);
        assert!(!report.base_flags.tractable_via_branching());
        assert!(report.zero_one_pair.is_none());
        assert!(!report.aliens_constant_closed);
    }

    #[test]
    fn classification_of_the_link_with_both_constants() {
        let base = structure(2, vec![("link", link())]);
        let alien = structure(
            2,
            vec![("c_0", rel(1, &[&[0]])), ("c_1", rel(1, &[&[1]]))],
        );
        let report = classify_boolean(&base, &alien).unwrap();
        assert_eq!(report.verdict, BooleanVerdict::NphAt2PAt1);
        assert_eq!(
            report.zero_one_pair,
            Some(("c_0".to_string(), "c_1".to_string()))
        );
        assert!(report.aliens_constant_closed);
    }

    #[test]
    fn classification_of_a_horn_base_with_a_hard_union() {
        let base = structure(
            2,
            vec![
                ("imp", imp()),
                ("c_0", rel(1, &[&[0]])),
                ("c_1", rel(1, &[&[1]])),
            ],
        );
        let alien = structure(2, vec![("oit", one_in_three())]);
        let report = classify_boolean(&base, &alien).unwrap();
        assert_eq!(report.verdict, BooleanVerdict::Fpt);
        assert!(report.base_flags.horn);
    }

    #[test]
    fn classification_of_a_hard_base() {
        let base = structure(2, vec![("oit", one_in_three())]);
        let alien = structure(2, vec![("neq", neq())]);
        let report = classify_boolean(&base, &alien).unwrap();
        assert_eq!(report.verdict, BooleanVerdict::BaseHard);
        assert!(!report.base_flags.any());
    }

    #[test]
    fn classification_of_a_tractable_union() {
        let base = structure(2, vec![("imp", imp())]);
        let alien = structure(2, vec![("neq", neq())]);
        let report = classify_boolean(&base, &alien).unwrap();
        assert_eq!(report.verdict, BooleanVerdict::TotalP);
        assert!(report.union_flags.bijunctive);
    }

    #[test]
    fn verdicts_serialize_with_their_wire_names() {
        assert_eq!(
            serde_json::to_string(&BooleanVerdict::NphAt2PAt1).unwrap(),
            r#""NPH_AT_2_P_AT_1""#
        );
        assert_eq!(
            serde_json::to_string(&BooleanVerdict::TotalP).unwrap(),
            r#""TOTAL_P""#
        );
    }

    #[test]
    fn constant_strategy_matches_brute_force_in_its_regime() {
        let base = structure(2, vec![("link", link())]);
        let alien = structure(2, vec![("c_1", rel(1, &[&[1]]))]);
        let inst = instance(
            base.clone(),
            alien.clone(),
            &["x", "y", "z"],
            vec![("link", vec![0, 1, 2], false), ("c_1", vec![0], true)],
        );
        let by_constants = solve_alien_by_constants(&inst);
        let brute = solve_bruteforce(&inst, &BruteForceOptions::default()).unwrap();
        assert_eq!(by_constants.is_sat(), brute.is_sat());
        assert_eq!(dense(&inst, &by_constants), vec![1, 1, 1]);
    }

    #[test]
    fn constant_strategy_reports_unsat_on_an_empty_alien_relation() {
        let base = structure(2, vec![("link", link())]);
        let alien = structure(2, vec![("void", Relation::empty(1))]);
        let inst = instance(
            base,
            alien,
            &["x", "y", "z"],
            vec![("link", vec![0, 1, 2], false), ("void", vec![0], true)],
        );
        assert!(!solve_alien_by_constants(&inst).is_sat());
    }

    #[test]
    fn auto_uses_a_direct_class_without_aliens() {
        let base = structure(2, vec![("imp", imp())]);
        let inst = instance(
            base,
            Structure::without_relations(2),
            &["x", "y"],
            vec![("imp", vec![0, 1], false)],
        );
        let out = solve_alien_auto(&inst).unwrap();
        assert_eq!(out.strategy, Strategy::SchaeferDirect(SchaeferClass::ZeroValid));
        assert!(out.result.is_sat());
    }

    #[test]
    fn auto_branches_when_only_the_base_is_tractable() {
        let base = structure(2, vec![("imp", imp())]);
        let alien = structure(2, vec![("oit", one_in_three())]);
        let inst = instance(
            base,
            alien,
            &["x", "y", "z"],
            vec![
                ("imp", vec![0, 1], false),
                ("oit", vec![0, 1, 2], true),
            ],
        );
        let out = solve_alien_auto(&inst).unwrap();
        assert_eq!(out.strategy, Strategy::SchaeferBranching(SchaeferClass::Horn));
        let brute = solve_bruteforce(&inst, &BruteForceOptions::default()).unwrap();
        assert_eq!(out.result, brute);
    }

    #[test]
    fn auto_falls_back_to_exhaustive_search() {
        let base = structure(2, vec![("oit", one_in_three())]);
        let alien = structure(2, vec![("neq", neq())]);
        let inst = instance(
            base,
            alien,
            &["x", "y", "z"],
            vec![
                ("oit", vec![0, 1, 2], false),
                ("neq", vec![0, 1], true),
            ],
        );
        let out = solve_alien_auto(&inst).unwrap();
        assert_eq!(out.strategy, Strategy::BruteForce);
        assert!(out.result.is_sat());
    }

    #[test]
    fn auto_handles_larger_domains_exhaustively() {
        let base = structure(3, vec![("big", rel(1, &[&[2]]))]);
        let inst = instance(
            base,
            Structure::without_relations(3),
            &["x"],
            vec![("big", vec![0], false)],
        );
        let out = solve_alien_auto(&inst).unwrap();
        assert_eq!(out.strategy, Strategy::BruteForce);
        assert_eq!(dense(&inst, &out.result), vec![2]);
    }
}
