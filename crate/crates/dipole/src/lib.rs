//! Qualitative spatial reasoning with dipoles: oriented segments in the plane.
//!
//! The crate implements two fine-grained dipole relation algebras — the
//! 72-relation calculus over general position plus collinearity, and its
//! 80-relation refinement that distinguishes parallel, anti-parallel and
//! positively/negatively rotated pairs — together with their oriented-point
//! quotients (20 and 28 relations). Composition and converse tables are not
//! shipped as opaque data: they are regenerated from a condensed geometric
//! semantics (a finite catalog of line-triple configurations and qualitative
//! carrier descriptions), cross-checked against direct classification of
//! realized coordinates, and then exercised by algebraic validators and a
//! path-consistency / scenario-search reasoner.
//!
//! Module map:
//! - [`geom`]: exact rational plane geometry, base-relation classification of
//!   concrete dipole pairs, seedable random dipoles.
//! - [`kernel`]: relation registries, bitset relation type, converse and
//!   composition table containers, non-associative-algebra axiom checks.
//! - [`condensed`]: the condensed semantics — configurations, qualitative
//!   carrier descriptions, symbolic classifiers, realization, and the table
//!   builder.
//! - [`quotient`]: quotients onto oriented-point calculi and the
//!   refinement-dropping map between the two dipole calculi.
//! - [`reason`]: constraint networks, algebraic closure, scenario search.
//! - [`interval`]: the embedding of Allen's interval algebra.
//! - [`props`]: cross-cutting validation drivers — oracle audits, weak- vs.
//!   strong-composition evidence, and the random scenario census comparing
//!   the two dipole calculi.

pub mod condensed;
pub mod geom;
pub mod interval;
pub mod kernel;
pub mod props;
pub mod quotient;
pub mod reason;

pub use condensed::tables::{build_tables, tables, TableSet, WitnessedTable};
pub use condensed::{realize_qcc, CondensedError, ConfigId, Qcc};
pub use geom::{
    dra_f_relation, dra_fp_relation, lr_classify, random_dipoles, Angle, Dipole, FName, FpName,
    GeomError, LrLetter, Point, Rational,
};
pub use interval::{allen_calculus, check_allen_embedding, AllenRel};
pub use kernel::{BaseIx, Calculus, KernelError, Registry, Relation};
pub use props::{
    affine_invariance_fuzz, audit_table, random_atomic_network, scenario_census,
    weak_composition_evidence, AffineFuzzOutcome, AuditReport, CensusOutcome,
    WeakCompositionEvidence,
};
pub use quotient::{
    check_homomorphism, drop_qualifier_mapping, op_mapping, opp_mapping, quotient_calculus,
    verify_quotient_composition, BaseRelMapping, HomMode, HomReport, QuotientCompositionReport,
    QuotientError,
};
pub use reason::{
    ClosureOutcome, ClosureStatus, ConstraintNetwork, ReasonError, ScenarioSearch, SearchMode,
};
