//! Cross-module property tests: serialization round-trips, laws of the
//! closure algorithm on random networks, and preservation of closure under
//! the quotient maps.

use dipole::geom::{dra_fp_relation, random_dipoles, SplitMix64};
use dipole::kernel::{read_tables, write_tables};
use dipole::{
    affine_invariance_fuzz, allen_calculus, drop_qualifier_mapping, op_mapping, opp_mapping,
    quotient_calculus, random_atomic_network, BaseIx, Calculus, ConstraintNetwork, Relation,
};
use proptest::prelude::*;

fn assert_round_trip(calc: &Calculus) {
    let text = write_tables(calc);
    let back = read_tables(&text).expect("serialized calculus parses");
    assert_eq!(back.label(), calc.label());
    assert_eq!(back.len(), calc.len());
    let names: Vec<&str> = calc.registry().names().collect();
    let back_names: Vec<&str> = back.registry().names().collect();
    assert_eq!(names, back_names);
    assert_eq!(back.identity(), calc.identity());
    for a in calc.registry().iter() {
        assert_eq!(back.converse_base(a), calc.converse_base(a));
        for b in calc.registry().iter() {
            assert_eq!(back.compose_base(a, b), calc.compose_base(a, b));
        }
    }
}

#[test]
fn every_calculus_serializes_and_reads_back() {
    let ts = dipole::tables();
    assert_round_trip(&ts.f.calculus);
    assert_round_trip(&ts.fp.calculus);
    assert_round_trip(&allen_calculus().unwrap());

    let op_m = op_mapping(ts.f.calculus.registry()).unwrap();
    assert_round_trip(&quotient_calculus(&ts.f.calculus, &op_m, "dra-op").unwrap());
    let opp_m = opp_mapping(ts.fp.calculus.registry()).unwrap();
    assert_round_trip(&quotient_calculus(&ts.fp.calculus, &opp_m, "dra-opp").unwrap());
}

#[test]
fn the_classifier_is_affine_invariant_over_two_thousand_maps() {
    let out = affine_invariance_fuzz(2000, 0xAFF1);
    assert_eq!(out.maps_checked, 2000);
    assert_eq!(out.violations, 0, "{:?}", out.first_violation);
}

/// A random network over `n` variables with cells drawn as small unions of
/// base relations (occasionally the universal relation).
fn random_network<'c>(calc: &'c Calculus, n: usize, rng: &mut SplitMix64) -> ConstraintNetwork<'c> {
    let names = (0..n).map(|i| format!("X{i}")).collect();
    let mut net = ConstraintNetwork::new(calc, names).unwrap();
    for i in 0..n {
        for j in (i + 1)..n {
            let rel = match rng.next_below(4) {
                0 => calc.universal(),
                k => {
                    let mut r = Relation::EMPTY;
                    for _ in 0..=k {
                        r = r | Relation::singleton(BaseIx(rng.next_below(calc.len() as u64) as u8));
                    }
                    r
                }
            };
            net.constrain(i, j, rel).unwrap();
        }
    }
    net
}

/// The same facts entered under a permuted variable order.
fn permuted<'c>(net: &ConstraintNetwork<'c>, rng: &mut SplitMix64) -> ConstraintNetwork<'c> {
    let mut names: Vec<String> = net.variables().map(str::to_string).collect();
    for i in (1..names.len()).rev() {
        names.swap(i, rng.next_below(i as u64 + 1) as usize);
    }
    let mut out = ConstraintNetwork::new(net.calculus(), names).unwrap();
    for i in 0..net.len() {
        for j in (i + 1)..net.len() {
            let vi: Vec<&str> = net.variables().collect();
            let a = out.variable_index(vi[i]).unwrap();
            let b = out.variable_index(vi[j]).unwrap();
            out.constrain(a, b, net.cell(i, j)).unwrap();
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn relation_formatting_round_trips(bits in any::<u128>()) {
        let ts = dipole::tables();
        for calc in [&ts.f.calculus, &ts.fp.calculus] {
            let mask = (1u128 << calc.len()) - 1;
            let rel = Relation::from_bits(bits & mask);
            if rel.is_empty() {
                continue;
            }
            let text = calc.format_relation(rel);
            prop_assert_eq!(calc.parse_relation(&text).unwrap(), rel);
        }
    }

    #[test]
    fn converse_distributes_over_composition_of_relations(
        a_bits in any::<u128>(),
        b_bits in any::<u128>(),
    ) {
        let ts = dipole::tables();
        for calc in [&ts.f.calculus, &ts.fp.calculus] {
            let mask = (1u128 << calc.len()) - 1;
            let a = Relation::from_bits(a_bits & mask);
            let b = Relation::from_bits(b_bits & mask);
            let lhs = calc.converse(calc.compose(a, b));
            let rhs = calc.compose(calc.converse(b), calc.converse(a));
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn closure_is_monotone_idempotent_and_order_independent(
        seed in any::<u64>(),
        n in 3usize..6,
    ) {
        let ts = dipole::tables();
        let mut rng = SplitMix64::new(seed);
        let net = random_network(&ts.fp.calculus, n, &mut rng);

        let out = net.algebraic_closure();
        for i in 0..n {
            for j in 0..n {
                prop_assert!(out.network.cell(i, j).is_subset_of(&net.cell(i, j)));
            }
        }
        if out.is_closed() {
            prop_assert!(out.network.is_closed());
            let again = out.network.algebraic_closure();
            prop_assert!(again.is_closed());
            prop_assert!(again.network.same_facts(&out.network));
        }

        let shuffled = permuted(&net, &mut rng);
        let other = shuffled.algebraic_closure();
        prop_assert_eq!(other.is_closed(), out.is_closed());
        if out.is_closed() {
            prop_assert!(other.network.same_facts(&out.network));
        }
    }

    #[test]
    fn geometric_scenarios_stay_closed_under_both_quotient_maps(
        seed in any::<u64>(),
        n in 3usize..7,
    ) {
        let ts = dipole::tables();
        let fp_calc = &ts.fp.calculus;
        let reg = fp_calc.registry();
        let dipoles = random_dipoles(seed, n, 9);
        let names = (0..n).map(|i| format!("D{i}")).collect();
        let mut net = ConstraintNetwork::new(fp_calc, names).unwrap();
        for i in 0..n {
            for j in (i + 1)..n {
                let name = dra_fp_relation(&dipoles[i], &dipoles[j]).to_string();
                net.constrain(i, j, Relation::singleton(reg.lookup(&name).unwrap())).unwrap();
            }
        }
        // Scenarios read off real configurations are licensed by the table.
        prop_assert!(net.is_closed());

        let drop = drop_qualifier_mapping(reg);
        prop_assert!(net.map_through(&drop, &ts.f.calculus).unwrap().is_closed());

        let opp_m = opp_mapping(reg).unwrap();
        let opp = quotient_calculus(fp_calc, &opp_m, "dra-opp").unwrap();
        prop_assert!(net.map_through(&opp_m, &opp).unwrap().is_closed());
    }

    #[test]
    fn closed_random_scenarios_stay_closed_when_qualifiers_drop(seed in any::<u64>()) {
        let ts = dipole::tables();
        let mut rng = SplitMix64::new(seed);
        let net = random_atomic_network(&ts.fp.calculus, 3, &mut rng);
        if net.is_closed() {
            let drop = drop_qualifier_mapping(ts.fp.calculus.registry());
            prop_assert!(net.map_through(&drop, &ts.f.calculus).unwrap().is_closed());
        }
    }
}
