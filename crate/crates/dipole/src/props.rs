//! Cross-cutting validation drivers.
//!
//! Everything here exercises the generated tables from the outside: auditing
//! them against the exact geometric classifier, searching for counterexamples
//! to strong composition, fuzzing affine invariance of the classifier, and
//! running the random scenario census that compares algebraic closure in the
//! qualified calculus with its qualifier-free projection. All drivers are
//! seeded and replay identically for a given seed.

use rayon::prelude::*;

use crate::condensed::tables::{
    audit_f_witnesses, audit_fp_witnesses, audit_random_soundness, TableSet,
};
use crate::geom::{
    dra_f_relation, dra_fp_relation, lr_classify, AffineMap, Dipole, LrLetter, Point, Rational,
    SplitMix64,
};
use crate::kernel::{BaseIx, Calculus, KernelError, Relation};
use crate::quotient::drop_qualifier_mapping;
use crate::reason::ConstraintNetwork;

/// Per-trial stream separation for reproducible parallel sampling.
const STREAM_STEP: u64 = 0x9E37_79B9_7F4A_7C15;

/// Coordinate bound for the random triples drawn by [`audit_table`]. A tight
/// grid makes collinear and touching configurations common, which is where
/// table errors would hide.
const AUDIT_GRID: i64 = 8;

/// Outcome of auditing the generated tables against the exact classifier.
#[derive(Debug, Clone)]
pub struct AuditReport {
    /// Random dipole triples classified and checked against both tables.
    pub samples: usize,
    /// Stored witnesses re-realized and re-classified successfully.
    pub witnesses_audited: usize,
    /// Observed composition triples a table failed to license.
    pub soundness_violations: Vec<String>,
    /// Stored witnesses that no longer realize to their table cell.
    pub unwitnessed_entries: Vec<String>,
}

impl AuditReport {
    /// True when every check passed.
    pub fn clean(&self) -> bool {
        self.soundness_violations.is_empty() && self.unwitnessed_entries.is_empty()
    }
}

/// Re-realizes every stored witness of both tables and classifies `samples`
/// random dipole triples, checking that each observed `(r_AB, r_BC, r_AC)`
/// is licensed by both composition tables. Failures are collected in the
/// report instead of aborting the audit, and a rerun with the same seed
/// replays the same triples.
pub fn audit_table(ts: &TableSet, samples: usize, seed: u64) -> AuditReport {
    let mut report = AuditReport {
        samples,
        witnesses_audited: 0,
        soundness_violations: Vec::new(),
        unwitnessed_entries: Vec::new(),
    };
    match audit_f_witnesses(&ts.f) {
        Ok(n) => report.witnesses_audited += n,
        Err(e) => report.unwitnessed_entries.push(e.to_string()),
    }
    match audit_fp_witnesses(&ts.fp) {
        Ok(n) => report.witnesses_audited += n,
        Err(e) => report.unwitnessed_entries.push(e.to_string()),
    }
    if let Err(e) = audit_random_soundness(ts, seed, samples, AUDIT_GRID) {
        report.soundness_violations.push(e.to_string());
    }
    report
}

/// Evidence that the coarse composition table is weak rather than
/// extensional, gathered around the cell for `bfii ; lllb`.
///
/// The coarse cell licenses `llll`, but once the angle qualifier is tracked
/// only `llll+` survives: the qualified cell omits `llll-` entirely. The
/// anchor pair below realizes `llll-`, so by soundness of the qualified
/// table no middle dipole can realize `bfii` and `lllb` against it. The
/// bounded grid search corroborates that conclusion independently of the
/// tables by trying every admissible middle dipole with small rational
/// coordinates and finding none.
#[derive(Debug, Clone)]
pub struct WeakCompositionEvidence {
    /// The coarse cell for `bfii ; lllb` contains `llll`.
    pub f_cell_contains_llll: bool,
    /// The qualified cell contains `llll+`.
    pub fp_cell_contains_plus: bool,
    /// The qualified cell contains `llll-` (it must not).
    pub fp_cell_contains_minus: bool,
    /// Relation realized by the fixed anchor pair (expected `llll-`).
    pub anchor_relation: String,
    /// Candidate middle dipoles examined by the grid search.
    pub candidate_pairs: u64,
    /// Candidates realizing both `bfii` and `lllb` (expected none).
    pub witnesses_found: u64,
}

impl WeakCompositionEvidence {
    /// True when the gathered facts exhibit the weakness: the coarse cell
    /// over-approximates, the qualified cell excludes the `-` branch, and
    /// the search finds no witness for an anchor pair on that branch.
    pub fn demonstrates_weakness(&self) -> bool {
        self.f_cell_contains_llll
            && self.fp_cell_contains_plus
            && !self.fp_cell_contains_minus
            && self.anchor_relation == "llll-"
            && self.witnesses_found == 0
    }
}

/// Gathers [`WeakCompositionEvidence`] for the `bfii ; lllb` cell.
///
/// The anchor pair is `A = (0,0)->(1,0)` and `C = (-3,2)->(-2,1)`, which
/// realizes `llll-`. `bfii` pins every admissible middle dipole to start
/// behind `A` and end ahead of it on `A`'s carrier line, so the search
/// enumerates exactly the grid points classifying as `b` (starts) or `f`
/// (ends) against `A`; the grid holds every rational with denominator at
/// most 4 and absolute value at most 8 on each axis.
pub fn weak_composition_evidence(ts: &TableSet) -> Result<WeakCompositionEvidence, KernelError> {
    let f = &ts.f.calculus;
    let f_reg = f.registry();
    let f_cell = f.compose_base(f_reg.lookup("bfii")?, f_reg.lookup("lllb")?);
    let f_cell_contains_llll = f_cell.contains(f_reg.lookup("llll")?);

    let fp = &ts.fp.calculus;
    let fp_reg = fp.registry();
    let fp_cell = fp.compose_base(fp_reg.lookup("bfii")?, fp_reg.lookup("lllb")?);
    let fp_cell_contains_plus = fp_cell.contains(fp_reg.lookup("llll+")?);
    let fp_cell_contains_minus = fp_cell.contains(fp_reg.lookup("llll-")?);

    let a = Dipole::from_ints(0, 0, 1, 0);
    let c = Dipole::from_ints(-3, 2, -2, 1);
    let anchor_relation = dra_fp_relation(&a, &c).to_string();

    let mut axis = std::collections::BTreeSet::new();
    for den in 1..=4i128 {
        for num in -8 * den..=8 * den {
            axis.insert(Rational::new(num, den));
        }
    }

    let mut starts = Vec::new();
    let mut ends = Vec::new();
    for &x in &axis {
        for &y in &axis {
            let p = Point::new(x, y);
            match lr_classify(&a, &p) {
                LrLetter::B => starts.push(p),
                LrLetter::F => ends.push(p),
                _ => {}
            }
        }
    }

    let mut candidate_pairs = 0u64;
    let mut witnesses_found = 0u64;
    for s in &starts {
        for e in &ends {
            candidate_pairs += 1;
            let b = Dipole::new(*s, *e).expect("starts lie behind A, ends ahead of it");
            if dra_f_relation(&a, &b).to_string() == "bfii"
                && dra_f_relation(&b, &c).to_string() == "lllb"
            {
                witnesses_found += 1;
            }
        }
    }

    Ok(WeakCompositionEvidence {
        f_cell_contains_llll,
        fp_cell_contains_plus,
        fp_cell_contains_minus,
        anchor_relation,
        candidate_pairs,
        witnesses_found,
    })
}

/// Tallies from the random scenario census comparing algebraic closure in
/// the qualified calculus with its qualifier-free projection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CensusOutcome {
    /// Scenarios generated.
    pub trials: u64,
    /// Largest variable count a trial may draw.
    pub max_size: usize,
    /// Scenarios algebraically closed in the qualified calculus.
    pub fp_closed: u64,
    /// Scenarios whose qualifier-free projection is algebraically closed.
    pub f_closed: u64,
    /// Scenarios the projection accepts but the qualified calculus refutes.
    pub f_only: u64,
    /// Scenarios the qualified calculus accepts but the projection refutes.
    /// Dropping qualifiers only coarsens cells, so this must stay zero.
    pub fp_only: u64,
}

impl CensusOutcome {
    /// Fraction of projection-accepted scenarios that the qualified
    /// calculus refutes — the price of discarding the angle qualifier.
    pub fn f_only_ratio(&self) -> f64 {
        if self.f_closed == 0 {
            0.0
        } else {
            self.f_only as f64 / self.f_closed as f64
        }
    }
}

/// Builds a complete network over `vars` fresh variables with one uniformly
/// random atomic relation per unordered pair. The result is a syntactically
/// valid scenario; nothing guarantees it is consistent.
pub fn random_atomic_network<'c>(
    calc: &'c crate::kernel::Calculus,
    vars: usize,
    rng: &mut SplitMix64,
) -> ConstraintNetwork<'c> {
    let names = (0..vars).map(|i| format!("V{i}")).collect();
    let mut net = ConstraintNetwork::new(calc, names).expect("generated names are distinct");
    for i in 0..vars {
        for j in (i + 1)..vars {
            let base = BaseIx(rng.next_below(calc.len() as u64) as u8);
            net.constrain(i, j, Relation::singleton(base))
                .expect("pairs are off the diagonal");
        }
    }
    net
}

/// Runs `trials` random atomic scenarios of up to `max_size` variables in
/// the qualified calculus `fp` and tallies how the closure verdict changes
/// when the scenario is projected through the qualifier-dropping map into
/// the coarse calculus `f`. Each trial is seeded independently from `seed`,
/// so the outcome does not depend on thread scheduling.
///
/// Sizes are drawn uniformly from `1..=max_size`. One- and two-variable
/// scenarios are trivially closed in both calculi (every base relation is
/// realizable, so `id ⊆ r ; r⁻¹` holds atom by atom); they contribute a
/// stable baseline to the closed population, while the verdict differences
/// all come from sizes ≥ 3. Random atomic networks beyond a handful of
/// variables are almost never closed, so the closed population — and with
/// it the [`CensusOutcome::f_only_ratio`] denominator — would otherwise
/// shrink to a noisy remnant of triangles.
pub fn scenario_census(
    fp: &Calculus,
    f: &Calculus,
    max_size: usize,
    trials: u64,
    seed: u64,
) -> CensusOutcome {
    assert!(max_size >= 3, "a census needs the sizes where verdicts can differ");
    let drop = drop_qualifier_mapping(fp.registry());
    let (fp_closed, f_closed, f_only, fp_only) = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = SplitMix64::new(seed.wrapping_add(trial.wrapping_mul(STREAM_STEP)));
            let n = 1 + rng.next_below(max_size as u64) as usize;
            let net = random_atomic_network(fp, n, &mut rng);
            let fp_ok = net.is_closed();
            let f_ok = net
                .map_through(&drop, f)
                .expect("dropping qualifiers lands in the coarse registry")
                .is_closed();
            (
                u64::from(fp_ok),
                u64::from(f_ok),
                u64::from(f_ok && !fp_ok),
                u64::from(fp_ok && !f_ok),
            )
        })
        .reduce(
            || (0, 0, 0, 0),
            |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2, a.3 + b.3),
        );
    CensusOutcome {
        trials,
        max_size,
        fp_closed,
        f_closed,
        f_only,
        fp_only,
    }
}

/// Outcome of the affine-invariance fuzz run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineFuzzOutcome {
    /// Orientation-preserving maps drawn.
    pub maps_checked: u64,
    /// Dipole pairs whose qualified relation changed under the map.
    pub violations: u64,
    /// Description of the first violation, if any.
    pub first_violation: Option<String>,
}

/// Draws `maps` random orientation-preserving affine maps with small
/// rational entries, applies each to a random dipole pair, and checks that
/// the qualified relation is unchanged. Returns the tally; a healthy
/// classifier reports zero violations.
pub fn affine_invariance_fuzz(maps: u64, seed: u64) -> AffineFuzzOutcome {
    let results: Vec<Option<String>> = (0..maps)
        .into_par_iter()
        .map(|trial| {
            let mut rng = SplitMix64::new(seed.wrapping_add(trial.wrapping_mul(STREAM_STEP)));
            let map = random_orientation_preserving_map(&mut rng);
            let a = random_plane_dipole(&mut rng, 6);
            let b = random_plane_dipole(&mut rng, 6);
            let before = dra_fp_relation(&a, &b).to_string();
            let after = dra_fp_relation(&map.apply(&a), &map.apply(&b)).to_string();
            if before == after {
                None
            } else {
                Some(format!("map {map:?} turns a {before} pair into {after}"))
            }
        })
        .collect();
    let violations = results.iter().flatten().count() as u64;
    let first_violation = results.into_iter().flatten().next();
    AffineFuzzOutcome {
        maps_checked: maps,
        violations,
        first_violation,
    }
}

fn random_rational(rng: &mut SplitMix64) -> Rational {
    let num = rng.next_below(17) as i128 - 8;
    let den = rng.next_below(3) as i128 + 1;
    Rational::new(num, den)
}

fn random_orientation_preserving_map(rng: &mut SplitMix64) -> AffineMap {
    loop {
        let map = AffineMap {
            m: [
                [random_rational(rng), random_rational(rng)],
                [random_rational(rng), random_rational(rng)],
            ],
            t: [random_rational(rng), random_rational(rng)],
        };
        if map.is_orientation_preserving() {
            return map;
        }
    }
}

fn random_plane_dipole(rng: &mut SplitMix64, grid: i64) -> Dipole {
    let span = (2 * grid + 1) as u64;
    loop {
        let mut coord = || rng.next_below(span) as i64 - grid;
        let (sx, sy, ex, ey) = (coord(), coord(), coord(), coord());
        if let Ok(d) = Dipole::new(Point::from_ints(sx, sy), Point::from_ints(ex, ey)) {
            return d;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::condensed::tables::{tables, WitnessedTable};
    use crate::geom::random_dipoles;
    use crate::kernel::Calculus;
    use std::collections::BTreeMap;

    /// Every 41st witness: full audits run in the acceptance gate, the unit
    /// suite only checks the wiring.
    fn trimmed(ts: &TableSet) -> TableSet {
        let keep = |t: &WitnessedTable| WitnessedTable {
            calculus: t.calculus.clone(),
            witnesses: t
                .witnesses
                .iter()
                .step_by(41)
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
        };
        TableSet {
            f: keep(&ts.f),
            fp: keep(&ts.fp),
        }
    }

    #[test]
    fn sampled_audit_is_clean_and_replayable() {
        let ts = trimmed(tables());
        let first = audit_table(&ts, 300, 77);
        let second = audit_table(&ts, 300, 77);
        assert!(first.clean(), "{first:?}");
        assert!(first.witnesses_audited > 0);
        assert_eq!(first.samples, 300);
        assert_eq!(first.witnesses_audited, second.witnesses_audited);
        assert_eq!(first.soundness_violations, second.soundness_violations);
    }

    #[test]
    fn soundness_audit_flags_a_deleted_table_entry() {
        let ts = tables();
        let fp = &ts.fp.calculus;
        let reg = fp.registry();

        // The first triple the seeded audit draws; delete its entry from a
        // copy of the qualified table and rerun with the same seed.
        let seed = 0xA0D17;
        let d = random_dipoles(seed, 3, AUDIT_GRID);
        let ab = reg.lookup(&dra_fp_relation(&d[0], &d[1]).to_string()).unwrap();
        let bc = reg.lookup(&dra_fp_relation(&d[1], &d[2]).to_string()).unwrap();
        let ac = reg.lookup(&dra_fp_relation(&d[0], &d[2]).to_string()).unwrap();

        let n = fp.len();
        let mut composition: Vec<Relation> = (0..n * n)
            .map(|k| fp.compose_base(BaseIx((k / n) as u8), BaseIx((k % n) as u8)))
            .collect();
        let cell = &mut composition[ab.0 as usize * n + bc.0 as usize];
        assert!(cell.contains(ac), "healthy table licenses the triple");
        *cell = *cell - Relation::singleton(ac);
        let converse = (0..n).map(|i| fp.converse_base(BaseIx(i as u8))).collect();
        let corrupted = Calculus::new(fp.label(), reg.clone(), fp.identity(), converse, composition)
            .unwrap();

        let mutated = TableSet {
            f: WitnessedTable {
                calculus: ts.f.calculus.clone(),
                witnesses: BTreeMap::new(),
            },
            fp: WitnessedTable {
                calculus: corrupted,
                witnesses: BTreeMap::new(),
            },
        };
        let report = audit_table(&mutated, 10, seed);
        assert!(!report.clean());
        assert_eq!(report.soundness_violations.len(), 1);
        let message = &report.soundness_violations[0];
        assert!(message.contains("missing from"), "{message}");
        assert!(message.contains(reg.name(ac)), "{message}");
    }

    #[test]
    fn the_grid_search_finds_no_witness_for_the_minus_branch() {
        let evidence = weak_composition_evidence(tables()).unwrap();
        assert!(evidence.demonstrates_weakness(), "{evidence:?}");
        assert_eq!(evidence.anchor_relation, "llll-");
        assert!(evidence.candidate_pairs > 1_000);
    }

    #[test]
    fn random_networks_are_atomic_and_seed_stable() {
        let ts = tables();
        let mut rng = SplitMix64::new(5);
        let net = random_atomic_network(&ts.fp.calculus, 5, &mut rng);
        assert_eq!(net.len(), 5);
        assert!(net.is_atomic());

        let mut replay = SplitMix64::new(5);
        let again = random_atomic_network(&ts.fp.calculus, 5, &mut replay);
        assert!(net.same_facts(&again));
    }

    #[test]
    fn census_is_deterministic_and_projection_never_loses_closure() {
        let ts = tables();
        let first = scenario_census(&ts.fp.calculus, &ts.f.calculus, 6, 400, 2024);
        let second = scenario_census(&ts.fp.calculus, &ts.f.calculus, 6, 400, 2024);
        assert_eq!(first, second);
        assert_eq!(first.trials, 400);
        assert_eq!(first.fp_only, 0);
        assert!(first.f_closed >= first.fp_closed);
        assert!(first.f_only_ratio() <= 1.0);
    }

    #[test]
    fn an_empty_census_reports_nothing() {
        let ts = tables();
        let out = scenario_census(&ts.fp.calculus, &ts.f.calculus, 30, 0, 1);
        assert_eq!((out.fp_closed, out.f_closed, out.f_only, out.fp_only), (0, 0, 0, 0));
        assert_eq!(out.f_only_ratio(), 0.0);
    }

    #[test]
    fn the_qualified_classifier_is_affine_invariant_on_a_small_run() {
        let out = affine_invariance_fuzz(400, 31);
        assert_eq!(out.maps_checked, 400);
        assert_eq!(out.violations, 0, "{:?}", out.first_violation);
        assert_eq!(out, affine_invariance_fuzz(400, 31));
    }
}
