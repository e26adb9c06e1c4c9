//! Finitary operations on a domain, the preservation relation between
//! operations and relations, and the procedures built on top of it: class
//! flags for Boolean languages, endomorphism enumeration, cores, and a
//! primitive-positive definability check.
//!
//! An operation `f` preserves a relation `r` when applying `f`
//! coordinatewise to any tuples of `r` lands back in `r`; the operations
//! preserving every relation of a structure are its polymorphisms. What a
//! structure can express by existentially quantified conjunctions of atoms
//! is exactly what all of its polymorphisms preserve, which turns
//! definability questions into finite searches over operation tables. Those
//! searches are exponential in the domain and arity, so every entry point
//! that enumerates tables takes a hard budget and fails loudly instead of
//! running for hours.

use crate::solvers::SchaeferClass;
use crate::structures::{tuples_over, Relation, Structure, Value};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("operation table needs {expected} entries for arity {arity} over {domain} values, got {found}")]
    TableSize {
        domain: usize,
        arity: usize,
        expected: usize,
        found: usize,
    },
    #[error("operation value {value} outside domain 0..{domain}")]
    TableValue { value: Value, domain: usize },
    #[error("operations must have at least one argument")]
    ZeroArity,
    #[error("enumerating all {arity}-ary operations on {domain} values needs {size} tables, over the budget of {budget}")]
    SearchTooLarge { domain: usize, arity: usize, size: u128, budget: u128 },
    #[error("class flags require a two-element domain, got {domain}")]
    NotBoolean { domain: usize },
}

/// A finitary operation `{0,…,d-1}^k → {0,…,d-1}` stored as a dense value
/// table indexed by argument tuples in lexicographic order (first argument
/// most significant).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OperationTable {
    domain: usize,
    arity: usize,
    table: Vec<Value>,
}

impl OperationTable {
    pub fn new(domain: usize, arity: usize, table: Vec<Value>) -> Result<Self, AlgebraError> {
        if arity == 0 {
            return Err(AlgebraError::ZeroArity);
        }
        let expected = domain.pow(arity as u32);
        if table.len() != expected {
            return Err(AlgebraError::TableSize {
                domain,
                arity,
                expected,
                found: table.len(),
            });
        }
        if let Some(&value) = table.iter().find(|&&v| v >= domain) {
            return Err(AlgebraError::TableValue { value, domain });
        }
        Ok(OperationTable {
            domain,
            arity,
            table,
        })
    }

    pub fn from_fn(domain: usize, arity: usize, f: impl Fn(&[Value]) -> Value) -> Self {
        assert!(arity > 0);
        let table = tuples_over(domain, arity).map(|t| f(&t)).collect();
        OperationTable::new(domain, arity, table).expect("generated table is well formed")
    }

    /// The unary operation given by `map[x]`; the domain is `map.len()`.
    pub fn unary(map: Vec<Value>) -> Result<Self, AlgebraError> {
        let domain = map.len();
        OperationTable::new(domain, 1, map)
    }

    /// The unary operation that ignores its argument.
    pub fn constant(domain: usize, value: Value) -> Self {
        OperationTable::new(domain, 1, vec![value; domain]).expect("constant is in bounds")
    }

    pub fn projection(domain: usize, arity: usize, coord: usize) -> Self {
        assert!(coord < arity);
        OperationTable::from_fn(domain, arity, |args| args[coord])
    }

    /// Binary minimum on the Boolean domain.
    pub fn boolean_min() -> Self {
        OperationTable::from_fn(2, 2, |a| a[0].min(a[1]))
    }

    /// Binary maximum on the Boolean domain.
    pub fn boolean_max() -> Self {
        OperationTable::from_fn(2, 2, |a| a[0].max(a[1]))
    }

    /// Ternary majority on the Boolean domain.
    pub fn boolean_majority() -> Self {
        OperationTable::from_fn(2, 3, |a| {
            if a[0] + a[1] + a[2] >= 2 {
                1
            } else {
                0
            }
        })
    }

    /// Ternary minority `x ⊕ y ⊕ z` on the Boolean domain.
    pub fn boolean_minority() -> Self {
        OperationTable::from_fn(2, 3, |a| a[0] ^ a[1] ^ a[2])
    }

    pub fn domain_size(&self) -> usize {
        self.domain
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn values(&self) -> &[Value] {
        &self.table
    }

    pub fn apply(&self, args: &[Value]) -> Value {
        debug_assert_eq!(args.len(), self.arity);
        let mut ix = 0;
        for &a in args {
            ix = ix * self.domain + a;
        }
        self.table[ix]
    }

    pub fn is_idempotent(&self) -> bool {
        (0..self.domain).all(|x| self.apply(&vec![x; self.arity]) == x)
    }

    /// Whether applying the operation coordinatewise to every choice of
    /// `arity` tuples of `rel` (repetition allowed) stays inside `rel`.
    pub fn preserves(&self, rel: &Relation) -> bool {
        let tuples: Vec<&[Value]> = rel.tuples().collect();
        let m = tuples.len();
        if m == 0 {
            return true;
        }
        let mut selection = vec![0usize; self.arity];
        let mut args = vec![0; self.arity];
        loop {
            let image: Vec<Value> = (0..rel.arity())
                .map(|pos| {
                    for (slot, &ti) in args.iter_mut().zip(selection.iter()) {
                        *slot = tuples[ti][pos];
                    }
                    self.apply(&args)
                })
                .collect();
            if !rel.contains(&image) {
                return false;
            }
            // Advance the selection counter; done when it wraps around.
            let mut i = self.arity;
            loop {
                if i == 0 {
                    return true;
                }
                i -= 1;
                selection[i] += 1;
                if selection[i] < m {
                    break;
                }
                selection[i] = 0;
            }
        }
    }

    /// Whether the operation is a polymorphism: it preserves every relation
    /// of the structure.
    pub fn preserves_structure(&self, s: &Structure) -> bool {
        s.relations().all(|(_, r)| self.preserves(r))
    }
}

impl std::fmt::Display for OperationTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.table.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

/// Which of the six closure operations a Boolean structure is invariant
/// under. The four in [`SchaeferFlags::tractable_via_branching`] are the
/// ones whose class survives splitting relations into single tuples.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SchaeferFlags {
    pub zero_valid: bool,
    pub one_valid: bool,
    pub horn: bool,
    pub anti_horn: bool,
    pub bijunctive: bool,
    pub affine: bool,
}

impl SchaeferFlags {
    pub fn any(&self) -> bool {
        self.zero_valid
            || self.one_valid
            || self.horn
            || self.anti_horn
            || self.bijunctive
            || self.affine
    }

    /// Invariance under min, max, majority, or minority. These classes are
    /// closed under adding singleton unary relations, unlike validity at a
    /// constant.
    pub fn tractable_via_branching(&self) -> bool {
        self.horn || self.anti_horn || self.bijunctive || self.affine
    }

    pub fn has(&self, class: SchaeferClass) -> bool {
        match class {
            SchaeferClass::ZeroValid => self.zero_valid,
            SchaeferClass::OneValid => self.one_valid,
            SchaeferClass::Horn => self.horn,
            SchaeferClass::AntiHorn => self.anti_horn,
            SchaeferClass::Bijunctive => self.bijunctive,
            SchaeferClass::Affine => self.affine,
        }
    }

    /// The classes that hold, in the fixed order of [`SchaeferClass::ALL`].
    pub fn classes(&self) -> Vec<SchaeferClass> {
        SchaeferClass::ALL
            .into_iter()
            .filter(|&c| self.has(c))
            .collect()
    }
}

/// Tests a Boolean structure against all six closure operations. The empty
/// relation is invariant under everything and so never disturbs a flag.
pub fn schaefer_flags(s: &Structure) -> Result<SchaeferFlags, AlgebraError> {
    if s.domain_size() != 2 {
        return Err(AlgebraError::NotBoolean {
            domain: s.domain_size(),
        });
    }
    let test = |op: OperationTable| op.preserves_structure(s);
    Ok(SchaeferFlags {
        zero_valid: test(OperationTable::constant(2, 0)),
        one_valid: test(OperationTable::constant(2, 1)),
        horn: test(OperationTable::boolean_min()),
        anti_horn: test(OperationTable::boolean_max()),
        bijunctive: test(OperationTable::boolean_majority()),
        affine: test(OperationTable::boolean_minority()),
    })
}

// Enumerating all k-ary operation tables touches d^(d^k) candidates; cap
// the candidate count so callers get an error instead of a stalled process.
const TABLE_ENUM_BUDGET: u128 = 1 << 21;

/// All unary polymorphisms of the structure, in lexicographic table order.
/// The identity is always among them.
pub fn endomorphisms(s: &Structure) -> Result<Vec<OperationTable>, AlgebraError> {
    let d = s.domain_size();
    let size = (d as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
    if size > TABLE_ENUM_BUDGET {
        return Err(AlgebraError::SearchTooLarge {
            domain: d,
            arity: 1,
            size,
            budget: TABLE_ENUM_BUDGET,
        });
    }
    let mut found = Vec::new();
    for map in tuples_over(d, d) {
        let op = OperationTable::unary(map).expect("enumerated map is well formed");
        if op.preserves_structure(s) {
            found.push(op);
        }
    }
    Ok(found)
}

/// A structure's core: the substructure induced on the smallest image of
/// any endomorphism, with the image values renumbered to `0..range.len()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoreReport {
    /// The induced substructure, renumbered to a compact domain.
    pub core: Structure,
    /// The chosen endomorphism on the original domain.
    pub map: Vec<Value>,
    /// Sorted image of `map`; `range[i]` is the original value renamed `i`.
    pub range: Vec<Value>,
}

/// Computes the core by picking the endomorphism with the smallest image,
/// breaking ties by lexicographically least value table. A minimal-range
/// endomorphism acts bijectively on its image, so the image substructure
/// admits no further collapse.
pub fn compute_core(s: &Structure) -> Result<CoreReport, AlgebraError> {
    let endos = endomorphisms(s)?;
    let best = endos
        .iter()
        .min_by_key(|op| {
            let mut range: Vec<Value> = op.values().to_vec();
            range.sort_unstable();
            range.dedup();
            (range.len(), op.values().to_vec())
        })
        .expect("identity is always an endomorphism");

    let mut range: Vec<Value> = best.values().to_vec();
    range.sort_unstable();
    range.dedup();
    let rename = |v: Value| range.binary_search(&v).expect("value is in the image");

    let relations = s.relations().map(|(symbol, r)| {
        let image = r
            .tuples()
            .map(|t| t.iter().map(|&v| rename(best.apply(&[v]))).collect());
        (
            symbol.to_string(),
            Relation::new(r.arity(), image).expect("image tuples keep the arity"),
        )
    });
    let core = Structure::new(range.len(), relations).expect("renumbered image is in bounds");
    Ok(CoreReport {
        core,
        map: best.values().to_vec(),
        range,
    })
}

/// Outcome of [`ppdef_check`]. When the target is not definable, `violating`
/// holds a polymorphism of the structure that fails to preserve the target,
/// which certifies the negative answer.
#[derive(Clone, Debug)]
pub struct PpdefReport {
    pub definable: bool,
    pub witness_arity: usize,
    pub violating: Option<OperationTable>,
}

/// Decides whether `target` is definable from the structure's relations by
/// an existentially quantified conjunction of atoms (equality allowed).
///
/// Definability is equivalent to every polymorphism of the structure
/// preserving the target, and checking polymorphisms of arity equal to the
/// target's tuple count suffices, so the search is finite. Empty targets
/// are preserved by everything and report as definable. The enumeration is
/// capped; structures or targets that push `d^(d^t)` past the budget get
/// [`AlgebraError::SearchTooLarge`].
pub fn ppdef_check(s: &Structure, target: &Relation) -> Result<PpdefReport, AlgebraError> {
    let d = s.domain_size();
    let witness_arity = target.len().max(1);
    let table_size = (d as u128)
        .checked_pow(witness_arity as u32)
        .unwrap_or(u128::MAX);
    let size = if table_size > 64 {
        u128::MAX
    } else {
        (d as u128)
            .checked_pow(table_size as u32)
            .unwrap_or(u128::MAX)
    };
    if size > TABLE_ENUM_BUDGET {
        return Err(AlgebraError::SearchTooLarge {
            domain: d,
            arity: witness_arity,
            size,
            budget: TABLE_ENUM_BUDGET,
        });
    }

    for table in tuples_over(d, table_size as usize) {
        let op = OperationTable::new(d, witness_arity, table).expect("enumerated table fits");
        if op.preserves_structure(s) && !op.preserves(target) {
            return Ok(PpdefReport {
                definable: false,
                witness_arity,
                violating: Some(op),
            });
        }
    }
    Ok(PpdefReport {
        definable: true,
        witness_arity,
        violating: None,
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

    #[test]
    fn apply_uses_first_argument_as_most_significant() {
        let op = OperationTable::new(2, 2, vec![0, 1, 0, 1]).unwrap();
        // Table order: (0,0), (0,1), (1,0), (1,1).
        assert_eq!(op.apply(&[0, 1]), 1);
        assert_eq!(op.apply(&[1, 0]), 0);
    }

    #[test]
    fn named_boolean_operations_behave() {
        assert_eq!(OperationTable::boolean_min().apply(&[1, 0]), 0);
        assert_eq!(OperationTable::boolean_max().apply(&[1, 0]), 1);
        assert_eq!(OperationTable::boolean_majority().apply(&[1, 0, 1]), 1);
        assert_eq!(OperationTable::boolean_minority().apply(&[1, 0, 1]), 0);
        assert!(OperationTable::boolean_majority().is_idempotent());
        assert!(!OperationTable::constant(2, 0).is_idempotent());
    }

    #[test]
    fn preservation_on_the_two_clause() {
        let or2 = rel(2, &[&[0, 1], &[1, 0], &[1, 1]]);
        assert!(!OperationTable::boolean_min().preserves(&or2));
        assert!(OperationTable::boolean_max().preserves(&or2));
        assert!(OperationTable::boolean_majority().preserves(&or2));
        assert!(!OperationTable::boolean_minority().preserves(&or2));
    }

    #[test]
    fn everything_preserves_the_empty_relation() {
        let empty = Relation::empty(3);
        assert!(OperationTable::constant(2, 0).preserves(&empty));
        assert!(OperationTable::boolean_minority().preserves(&empty));
    }

    #[test]
    fn flags_for_the_two_equality_link() {
        // Tuples of "first two equal or last two equal".
        let link = rel(
            3,
            &[
                &[0, 0, 0],
                &[0, 0, 1],
                &[0, 1, 1],
                &[1, 0, 0],
                &[1, 1, 0],
                &[1, 1, 1],
            ],
        );
        let flags = schaefer_flags(&structure(2, vec![("link", link)])).unwrap();
        assert_eq!(
            flags,
            SchaeferFlags {
                zero_valid: true,
                one_valid: true,
                horn: false,
                anti_horn: false,
                bijunctive: false,
                affine: false,
            }
        );
        assert!(flags.any());
        assert!(!flags.tractable_via_branching());
    }

    #[test]
    fn flags_for_disequality() {
        let neq = rel(2, &[&[0, 1], &[1, 0]]);
        let flags = schaefer_flags(&structure(2, vec![("neq", neq)])).unwrap();
        assert_eq!(
            flags,
            SchaeferFlags {
                zero_valid: false,
                one_valid: false,
                horn: false,
                anti_horn: false,
                bijunctive: true,
                affine: true,
            }
        );
        assert_eq!(
            flags.classes(),
            vec![SchaeferClass::Bijunctive, SchaeferClass::Affine]
        );
    }

    #[test]
    fn flags_on_an_empty_structure_are_all_true() {
        let flags = schaefer_flags(&Structure::without_relations(2)).unwrap();
        assert!(flags.zero_valid && flags.one_valid && flags.horn);
        assert!(flags.anti_horn && flags.bijunctive && flags.affine);
    }

    #[test]
    fn endomorphisms_of_disequality_are_the_permutations() {
        let neq = rel(2, &[&[0, 1], &[1, 0]]);
        let endos = endomorphisms(&structure(2, vec![("neq", neq)])).unwrap();
        let tables: Vec<&[Value]> = endos.iter().map(|op| op.values()).collect();
        assert_eq!(tables, vec![&[0, 1][..], &[1, 0][..]]);
    }

    #[test]
    fn core_collapses_the_equality_link() {
        let link = rel(
            3,
            &[
                &[0, 0, 0],
                &[0, 0, 1],
                &[0, 1, 1],
                &[1, 0, 0],
                &[1, 1, 0],
                &[1, 1, 1],
            ],
        );
        let report = compute_core(&structure(2, vec![("link", link)])).unwrap();
        assert_eq!(report.map, vec![0, 0]);
        assert_eq!(report.range, vec![0]);
        assert_eq!(report.core.domain_size(), 1);
        assert_eq!(
            report.core.relation("link").unwrap(),
            &Relation::singleton(vec![0, 0, 0])
        );
    }

    #[test]
    fn core_of_a_rigid_structure_is_itself() {
        let neq = rel(2, &[&[0, 1], &[1, 0]]);
        let s = structure(2, vec![("neq", neq)]);
        let report = compute_core(&s).unwrap();
        assert_eq!(report.map, vec![0, 1]);
        assert_eq!(report.core, s);
    }

    #[test]
    fn equality_is_definable_from_nothing() {
        let eq = rel(2, &[&[0, 0], &[1, 1]]);
        let report = ppdef_check(&Structure::without_relations(2), &eq).unwrap();
        assert!(report.definable);
        assert_eq!(report.witness_arity, 2);
    }

    #[test]
    fn disequality_is_not_definable_from_nothing() {
        let neq = rel(2, &[&[0, 1], &[1, 0]]);
        let report = ppdef_check(&Structure::without_relations(2), &neq).unwrap();
        assert!(!report.definable);
        // The first counterexample in table order is the constant.
        assert_eq!(report.violating.unwrap().values(), &[0, 0, 0, 0]);
    }

    #[test]
    fn the_clause_is_not_definable_from_disequality() {
        let neq = rel(2, &[&[0, 1], &[1, 0]]);
        let or2 = rel(2, &[&[0, 1], &[1, 0], &[1, 1]]);
        let s = structure(2, vec![("neq", neq)]);
        let report = ppdef_check(&s, &or2).unwrap();
        assert!(!report.definable);
        let op = report.violating.unwrap();
        assert!(op.preserves_structure(&s));
        assert!(!op.preserves(&or2));
    }

    #[test]
    fn a_relation_defines_itself() {
        let or2 = rel(2, &[&[0, 1], &[1, 0], &[1, 1]]);
        let s = structure(2, vec![("or", or2.clone())]);
        assert!(ppdef_check(&s, &or2).unwrap().definable);
    }

    #[test]
    fn empty_targets_count_as_definable() {
        let s = Structure::without_relations(2);
        let report = ppdef_check(&s, &Relation::empty(2)).unwrap();
        assert!(report.definable);
        assert_eq!(report.witness_arity, 1);
    }

    #[test]
    fn oversized_searches_are_refused() {
        let big = rel(
            3,
            &[&[0, 0, 0], &[0, 1, 1], &[1, 0, 1], &[1, 1, 0], &[1, 1, 1]],
        );
        let err = ppdef_check(&Structure::without_relations(2), &big);
        assert!(matches!(err, Err(AlgebraError::SearchTooLarge { arity: 5, .. })));
    }

    #[test]
    fn flags_reject_larger_domains() {
        let s = Structure::without_relations(3);
        assert!(matches!(
            schaefer_flags(&s),
            Err(AlgebraError::NotBoolean { domain: 3 })
        ));
    }
}
