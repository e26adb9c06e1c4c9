//! Constraint satisfaction over finite domains where the constraint set is
//! split into a familiar *base* part and a small *alien* part.
//!
//! The crate provides the data model for such hybrid instances, exhaustive
//! and polynomial-time solvers, the clone-theoretic machinery (polymorphisms,
//! cores, primitive-positive definability checks) that powers complexity
//! classification, instance rewrites used by the hardness reductions, a
//! fixed-parameter branching solver keyed on the number of alien constraints,
//! and a separate toolkit for equality languages over an infinite domain.
//!
//! Start with [`structures`] for the data model and [`alien`] for the
//! branching solver and the Boolean complexity classifier. The `examples/`
//! directory of the crate walks through every major capability.

pub mod algebra;
pub mod alien;
pub mod cli;
pub mod equality;
pub mod reductions;
pub mod solvers;
pub mod structures;

pub use reductions::{Atom, PpDefinition, ReductionError};

pub use equality::{
    classify_equality, eq_compute_c, eq_definition_models, eq_solve_alien, eq_solve_horn_fpt,
    ground_equality, neq_witness_search, orbit_decompose, EqClassifyOptions, EqError,
    EqFptOutcome, EqInstance, EqLanguage, EqRelation, EqVerdict, KStatus, NeqPrecondition,
    NeqSearchOutcome, NeqWitness, SearchBounds,
};

pub use alien::{
    classify_boolean, decompose_alien, solve_alien_auto, solve_alien_by_constants,
    solve_alien_fpt, AlienError, AutoOutcome, BaseSolver, BooleanClassification, BooleanVerdict,
    FptOutcome, Replacement, Strategy, UnionDecomposition,
};
pub use algebra::{
    compute_core, endomorphisms, ppdef_check, schaefer_flags, AlgebraError, OperationTable,
    SchaeferFlags,
};
pub use solvers::{
    solve_bruteforce, solve_schaefer, BruteForceOptions, SchaeferClass, SolveResult, SolverError,
};
pub use structures::{
    constants_structure, Assignment, Constraint, Instance, ModelError, Relation, Structure, Value,
};
