//! Quotients of dipole calculi and generic homomorphism checking.
//!
//! Identifying all dipoles that share a start point and direction turns a
//! dipole into an oriented point; the two dipole calculi collapse along that
//! congruence onto oriented-point calculi with 20 and 28 base relations. The
//! congruence itself is shipped as two mapping data files (one line per base
//! relation); [`quotient_calculus`] derives the induced identity, converse
//! and composition tables and rejects mappings whose converse would not be
//! well defined. [`check_homomorphism`] verifies, for any base-relation
//! mapping between two calculi, the lax / oplax / proper homomorphism laws,
//! which is also how the quotients and the qualifier-dropping map between the
//! two dipole calculi are validated.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::kernel::{BaseIx, Calculus, KernelError, Registry, Relation};

/// Mapping text for the 72-relation calculus onto oriented points.
pub const OP_MAPPING_TEXT: &str = include_str!("../data/dra_op_mapping.txt");
/// Mapping text for the 80-relation calculus onto oriented points.
pub const OPP_MAPPING_TEXT: &str = include_str!("../data/dra_opp_mapping.txt");

/// Errors from mapping parsing and quotient construction.
#[derive(Debug, Error)]
pub enum QuotientError {
    /// A structurally invalid mapping file.
    #[error("mapping parse error: {0}")]
    Parse(String),
    /// A `map` line names a relation that is not in the source registry.
    #[error("mapping source {0:?} is not a base relation of the source calculus")]
    UnknownSource(String),
    /// A source base relation never appears on a `map` line.
    #[error("mapping is not total: no target for source relation {0:?}")]
    NotTotal(String),
    /// A mapped target name does not exist in the target calculus.
    #[error("mapping target {0:?} is not a base relation of the target calculus")]
    UnknownTarget(String),
    /// The source converse does not descend to the merged relations.
    #[error(
        "converse is incompatible with the mapping: class {class:?} contains \
         {a:?} and {b:?}, whose converses fall into different classes \
         ({conv_a:?} vs {conv_b:?})"
    )]
    IncompatibleConverse {
        class: String,
        a: String,
        b: String,
        conv_a: String,
        conv_b: String,
    },
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// A total map from the base relations of a source calculus onto a set of
/// target relation names.
///
/// The target name set is exactly the set of names appearing as images, so
/// the map is surjective onto it by construction. Whether those names also
/// exist in some concrete target calculus is checked when the mapping is
/// used ([`check_homomorphism`]); [`quotient_calculus`] instead *builds* the
/// target calculus from them.
#[derive(Clone, Debug)]
pub struct BaseRelMapping {
    /// Distinct target names in canonical registry order.
    targets: Vec<String>,
    /// For each source base relation, the index of its target name.
    image: Vec<u32>,
}

impl BaseRelMapping {
    /// Parses `map <source> <target>` lines against a source registry.
    /// Blank lines and `#` comments are skipped. Every source base relation
    /// must be mapped exactly once.
    pub fn parse(source: &Registry, text: &str) -> Result<BaseRelMapping, QuotientError> {
        let mut assigned: Vec<Option<String>> = vec![None; source.len()];
        for (lno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 3 || toks[0] != "map" {
                return Err(QuotientError::Parse(format!(
                    "line {}: expected `map <source> <target>`, got {line:?}",
                    lno + 1
                )));
            }
            let src = source
                .lookup(toks[1])
                .map_err(|_| QuotientError::UnknownSource(toks[1].to_string()))?;
            let slot = &mut assigned[src.0 as usize];
            if slot.is_some() {
                return Err(QuotientError::Parse(format!(
                    "line {}: source relation {:?} mapped twice",
                    lno + 1,
                    toks[1]
                )));
            }
            *slot = Some(toks[2].to_string());
        }
        let names = assigned
            .into_iter()
            .enumerate()
            .map(|(i, t)| t.ok_or_else(|| QuotientError::NotTotal(source.name(BaseIx(i as u8)).to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_names(names))
    }

    /// Builds a mapping by applying `f` to every source base relation name.
    pub fn from_fn(source: &Registry, f: impl Fn(&str) -> String) -> BaseRelMapping {
        Self::from_names(source.names().map(f).collect())
    }

    /// `names[i]` is the target name of source base relation `i`.
    fn from_names(names: Vec<String>) -> BaseRelMapping {
        let mut targets: Vec<String> = names.clone();
        targets.sort();
        targets.dedup();
        crate::kernel::canonical_sort(&mut targets);
        let index: HashMap<&str, u32> = targets
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i as u32))
            .collect();
        let image = names.iter().map(|n| index[n.as_str()]).collect();
        BaseRelMapping { targets, image }
    }

    /// The distinct target names, canonically ordered.
    pub fn targets(&self) -> impl Iterator<Item = &str> {
        self.targets.iter().map(|s| s.as_str())
    }

    pub fn target_count(&self) -> usize {
        self.targets.len()
    }

    /// Target name of a source base relation.
    pub fn target_name(&self, b: BaseIx) -> &str {
        &self.targets[self.image[b.0 as usize] as usize]
    }

    /// Resolves every image name in a concrete target calculus.
    pub fn resolve(&self, target: &Calculus) -> Result<Vec<BaseIx>, QuotientError> {
        self.image
            .iter()
            .map(|&t| {
                let name = &self.targets[t as usize];
                target
                    .registry()
                    .lookup(name)
                    .map_err(|_| QuotientError::UnknownTarget(name.clone()))
            })
            .collect()
    }
}

/// Applies a resolved mapping to a source relation, yielding the image
/// relation in the target calculus.
pub(crate) fn image_rel(img: &[BaseIx], r: Relation) -> Relation {
    Relation::from_bases(r.iter().map(|b| img[b.0 as usize]))
}

/// Builds the quotient calculus induced by a base-relation mapping.
///
/// The target registry consists of the mapping's image names. Identity is
/// the image of the source identity; the converse of a target relation is
/// the (unique) image of the converses of its preimages; composition is
/// `comp(t1; t2) = ⋃ { m(comp(b1; b2)) : m(b1) = t1, m(b2) = t2 }`.
pub fn quotient_calculus(
    source: &Calculus,
    m: &BaseRelMapping,
    label: impl Into<String>,
) -> Result<Calculus, QuotientError> {
    let registry = Registry::new(m.targets.clone())?;
    let img: Vec<BaseIx> = m.resolve_in_registry(&registry)?;
    let n_t = registry.len();

    let identity = img[source.identity().0 as usize];

    // Converse descends iff all members of a class have converses in one class.
    let mut converse: Vec<Option<(BaseIx, BaseIx)>> = vec![None; n_t]; // (conv class, sample source)
    for b in source.registry().iter() {
        let t = img[b.0 as usize];
        let ct = img[source.converse_base(b).0 as usize];
        match converse[t.0 as usize] {
            None => converse[t.0 as usize] = Some((ct, b)),
            Some((prev, witness)) if prev != ct => {
                return Err(QuotientError::IncompatibleConverse {
                    class: registry.name(t).to_string(),
                    a: source.registry().name(witness).to_string(),
                    b: source.registry().name(b).to_string(),
                    conv_a: registry.name(prev).to_string(),
                    conv_b: registry.name(ct).to_string(),
                });
            }
            Some(_) => {}
        }
    }
    let converse: Vec<BaseIx> = converse
        .into_iter()
        .map(|v| v.expect("mapping is surjective onto its targets").0)
        .collect();

    let mut composition = vec![Relation::EMPTY; n_t * n_t];
    for b1 in source.registry().iter() {
        let t1 = img[b1.0 as usize];
        for b2 in source.registry().iter() {
            let t2 = img[b2.0 as usize];
            composition[t1.0 as usize * n_t + t2.0 as usize] |=
                image_rel(&img, source.compose_base(b1, b2));
        }
    }

    Ok(Calculus::new(label, registry, identity, converse, composition)?)
}

impl BaseRelMapping {
    /// Like [`BaseRelMapping::resolve`] but against a bare registry.
    fn resolve_in_registry(&self, registry: &Registry) -> Result<Vec<BaseIx>, QuotientError> {
        self.image
            .iter()
            .map(|&t| {
                let name = &self.targets[t as usize];
                registry
                    .lookup(name)
                    .map_err(|_| QuotientError::UnknownTarget(name.clone()))
            })
            .collect()
    }
}

/// Which homomorphism laws to demand of a base-relation mapping.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum HomMode {
    /// `h(a;b) ⊇ h(a);h(b)`
    Lax,
    /// `h(a;b) ⊆ h(a);h(b)`
    Oplax,
    /// `h(a;b) = h(a);h(b)`
    Proper,
}

impl fmt::Display for HomMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HomMode::Lax => "lax",
            HomMode::Oplax => "oplax",
            HomMode::Proper => "proper",
        })
    }
}

/// One failed homomorphism equation, with both sides rendered in target
/// names so it can be re-verified independently.
#[derive(Clone, Debug)]
pub struct HomCounterexample {
    /// Which law failed: "identity", "converse" or "composition".
    pub law: &'static str,
    pub detail: String,
}

/// Outcome of checking one mapping against the laws of one [`HomMode`].
#[derive(Clone, Debug)]
pub struct HomReport {
    pub mode: HomMode,
    pub identity_ok: bool,
    pub converse_ok: bool,
    pub composition_ok: bool,
    /// Number of base pairs whose composition equation was checked.
    pub pairs_checked: u64,
    /// Total number of failed equations.
    pub failure_count: u64,
    /// The first few failures (capped so reports stay printable).
    pub counterexamples: Vec<HomCounterexample>,
}

impl HomReport {
    const COUNTEREXAMPLE_CAP: usize = 16;

    pub fn holds(&self) -> bool {
        self.identity_ok && self.converse_ok && self.composition_ok
    }

    fn record(&mut self, law: &'static str, detail: String) {
        self.failure_count += 1;
        if self.counterexamples.len() < Self::COUNTEREXAMPLE_CAP {
            self.counterexamples.push(HomCounterexample { law, detail });
        }
    }
}

impl fmt::Display for HomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} homomorphism: identity {}, converse {}, composition {} ({} pairs, {} failures)",
            self.mode,
            if self.identity_ok { "ok" } else { "FAILED" },
            if self.converse_ok { "ok" } else { "FAILED" },
            if self.composition_ok { "ok" } else { "FAILED" },
            self.pairs_checked,
            self.failure_count,
        )?;
        for c in &self.counterexamples {
            writeln!(f, "  {}: {}", c.law, c.detail)?;
        }
        Ok(())
    }
}

/// Checks the identity, converse-commutation and composition laws of `mode`
/// for a base-relation mapping `h` from `source` into `target`, lifting `h`
/// to relation sets. Composition is checked over all source base pairs.
pub fn check_homomorphism(
    h: &BaseRelMapping,
    source: &Calculus,
    target: &Calculus,
    mode: HomMode,
) -> Result<HomReport, QuotientError> {
    let img = h.resolve(target)?;
    let mut report = HomReport {
        mode,
        identity_ok: true,
        converse_ok: true,
        composition_ok: true,
        pairs_checked: 0,
        failure_count: 0,
        counterexamples: Vec::new(),
    };

    // h(Δ) is atomic, so ≥, ≤ and = all collapse to equality with Δ_target.
    let id_image = img[source.identity().0 as usize];
    if id_image != target.identity() {
        report.identity_ok = false;
        report.record(
            "identity",
            format!(
                "h({}) = {} but the target identity is {}",
                source.registry().name(source.identity()),
                target.registry().name(id_image),
                target.registry().name(target.identity())
            ),
        );
    }

    for a in source.registry().iter() {
        let lhs = img[source.converse_base(a).0 as usize];
        let rhs = target.converse_base(img[a.0 as usize]);
        if lhs != rhs {
            report.converse_ok = false;
            report.record(
                "converse",
                format!(
                    "h(conv {}) = {} but conv(h {}) = {}",
                    source.registry().name(a),
                    target.registry().name(lhs),
                    source.registry().name(a),
                    target.registry().name(rhs)
                ),
            );
        }
    }

    for a in source.registry().iter() {
        for b in source.registry().iter() {
            report.pairs_checked += 1;
            let lhs = image_rel(&img, source.compose_base(a, b));
            let rhs = target.compose_base(img[a.0 as usize], img[b.0 as usize]);
            let ok = match mode {
                HomMode::Lax => rhs.is_subset_of(&lhs),
                HomMode::Oplax => lhs.is_subset_of(&rhs),
                HomMode::Proper => lhs == rhs,
            };
            if !ok {
                report.composition_ok = false;
                report.record(
                    "composition",
                    format!(
                        "h({} ; {}): image ({}) vs target composition ({})",
                        source.registry().name(a),
                        source.registry().name(b),
                        target.format_relation(lhs),
                        target.format_relation(rhs)
                    ),
                );
            }
        }
    }
    Ok(report)
}

/// Outcome of verifying the quotient composition equations of a mapping
/// against a quotient calculus, one equation per source base pair.
///
/// For each source pair `(b1, b2)` the equation is
/// `comp_T(q(b1); q(b2)) = ⋃ { q(comp_S(b1'; b2')) : q(b1') = q(b1),
/// q(b2') = q(b2) }` — composition of quotient relations is exactly the
/// image of composing their full preimage classes. Checked as two halves:
/// every pairwise image is contained in the quotient cell, and every member
/// of every quotient cell is witnessed by some preimage pair.
///
/// Note that the stronger pairwise form `q(comp_S(b1; b2)) =
/// comp_T(q(b1); q(b2))` is unsatisfiable for any surjection that merges
/// base relations while keeping the identity class a singleton: for
/// class-mates `x ≠ y`, `comp_T(q(conv x); q(y))` contains the quotient
/// identity (witnessed by the pair `(conv x; x)`), but `comp_S(conv x; y)`
/// cannot contain the source identity.
#[derive(Clone, Copy, Debug)]
pub struct QuotientCompositionReport {
    /// Number of source base pairs enumerated.
    pub pairs_checked: u64,
    /// Pairs whose composition image escapes the quotient cell.
    pub uncontained_pairs: u64,
    /// Quotient cells containing a relation no preimage pair witnesses.
    pub unwitnessed_cells: u64,
}

impl QuotientCompositionReport {
    pub fn holds(&self) -> bool {
        self.uncontained_pairs == 0 && self.unwitnessed_cells == 0
    }
}

/// Verifies the quotient composition equations of `m` between `source` and
/// the quotient calculus `target` (see [`QuotientCompositionReport`]).
pub fn verify_quotient_composition(
    source: &Calculus,
    m: &BaseRelMapping,
    target: &Calculus,
) -> Result<QuotientCompositionReport, QuotientError> {
    let img = m.resolve(target)?;
    let n_t = target.len();
    let mut witnessed = vec![Relation::EMPTY; n_t * n_t];
    let mut report = QuotientCompositionReport {
        pairs_checked: 0,
        uncontained_pairs: 0,
        unwitnessed_cells: 0,
    };
    for b1 in source.registry().iter() {
        let t1 = img[b1.0 as usize];
        for b2 in source.registry().iter() {
            let t2 = img[b2.0 as usize];
            report.pairs_checked += 1;
            let q_image = image_rel(&img, source.compose_base(b1, b2));
            if !q_image.is_subset_of(&target.compose_base(t1, t2)) {
                report.uncontained_pairs += 1;
            }
            witnessed[t1.0 as usize * n_t + t2.0 as usize] |= q_image;
        }
    }
    for t1 in target.registry().iter() {
        for t2 in target.registry().iter() {
            if witnessed[t1.0 as usize * n_t + t2.0 as usize] != target.compose_base(t1, t2) {
                report.unwitnessed_cells += 1;
            }
        }
    }
    Ok(report)
}

/// The refinement-dropping map from the 80-relation registry onto the
/// 72-relation names: strip the angle qualifier from the four split
/// relations, keep everything else. Surjective and oplax but not proper.
pub fn drop_qualifier_mapping(fp_registry: &Registry) -> BaseRelMapping {
    BaseRelMapping::from_fn(fp_registry, |name| {
        if name.len() == 5 {
            name[..4].to_string()
        } else {
            name.to_string()
        }
    })
}

/// The shipped oriented-point mapping for the 72-relation calculus.
pub fn op_mapping(f_registry: &Registry) -> Result<BaseRelMapping, QuotientError> {
    BaseRelMapping::parse(f_registry, OP_MAPPING_TEXT)
}

/// The shipped oriented-point mapping for the 80-relation calculus.
pub fn opp_mapping(fp_registry: &Registry) -> Result<BaseRelMapping, QuotientError> {
    BaseRelMapping::parse(fp_registry, OPP_MAPPING_TEXT)
}

/// Guards the known defect of earlier oriented-point tables: composing
/// SAMEright with RIGHTrightA must not yield LEFTrightP (two points a
/// quarter-turn apart cannot end up parallel). Returns whether the
/// generated table is clean.
pub fn opp_error_audit(opp: &Calculus) -> Result<bool, QuotientError> {
    let reg = opp.registry();
    let same_right = reg.lookup("SAMEright")?;
    let right_right_a = reg.lookup("RIGHTrightA")?;
    let left_right_p = reg.lookup("LEFTrightP")?;
    Ok(!opp.compose_base(same_right, right_right_a).contains(left_right_p))
}
