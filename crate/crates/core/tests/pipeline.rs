mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use l2approx::bounds::{quotient_by_power, vd_lower_bound, vd_lower_bound_with};
use l2approx::chains::{abelian_stage, build_chain};
use l2approx::coset::{is_normal, todd_coxeter};
use l2approx::homology::{abelian_invariants, b1_mod_p};
use l2approx::rational::{integer, ratio};
use l2approx::schreier::rewrite_subgroup;
use l2approx::tower::{replay_ledger, run_tower, TowerConfig};
use l2approx::{parse_presentation, EnumerationLimits, Presentation, Word};

fn limits() -> EnumerationLimits {
    EnumerationLimits::default()
}

/// Taking the first stage of the first stage of F2 lands on the second
/// stage: P1 of a free group of rank 5 has index 32 in it.
#[test]
fn derived_steps_compose() {
    let f2 = Presentation::free(2);
    let c = build_chain(&f2, 2, 1, limits()).unwrap();
    let h = c.deepest().subgroup.simplified();
    assert_eq!(h.generator_count(), 5);
    let ch = build_chain(&h, 2, 1, limits()).unwrap();
    assert_eq!(ch.deepest().index(), 32);
    assert_eq!(ch.deepest().b1, 129);
    assert_eq!(c.deepest().index() * ch.deepest().index(), 128);
    let direct = build_chain(&f2, 2, 2, limits()).unwrap();
    assert_eq!(direct.deepest().b1, ch.deepest().b1);
}

#[test]
fn chain_checks_hold() {
    for (text, p, depth) in [
        ("<x,y|>", 2, 2),
        ("<x,y|[x,y]>", 3, 2),
        ("<x,y|x^2 y^2>", 2, 2),
        ("<a,b|a^4, b^2, (a b)^2>", 2, 3),
        ("<a1,b1,a2,b2|[a1,b1][a2,b2]>", 2, 1),
    ] {
        let c = build_chain(&parse_presentation(text).unwrap(), p, depth, limits()).unwrap();
        let checks = c.check();
        assert!(checks.all(), "{text}: {checks:?}");
        for s in &c.stages {
            assert!(s.subgroup.verify_rewriting(), "{text} depth {}", s.depth);
            assert!(is_normal(&c.presentation, &s.table, &s.subgroup.generator_words()));
        }
    }
}

#[test]
fn dihedral_chain_stabilizes_at_trivial() {
    let c = build_chain(&parse_presentation("<a,b|a^4, b^2, (a b)^2>").unwrap(), 2, 4, limits()).unwrap();
    assert_eq!(c.indices(), [1, 4, 8, 8, 8]);
    assert!(c.stabilized());
    assert_eq!(c.b1s(), [0; 5]);
}

#[test]
fn abelian_stages_of_z2() {
    let z2 = parse_presentation("<x,y|[x,y]>").unwrap();
    for e in 1..=3 {
        let s = abelian_stage(&z2, 2, e, limits()).unwrap();
        assert_eq!(s.index(), 1 << (2 * e));
        assert_eq!(s.b1, 2);
    }
}

#[test]
fn quotient_lowers_vd_bound() {
    let f2 = Presentation::free(2);
    let q = quotient_by_power(&f2, &Word::generator(0), 2, 2).unwrap();
    let before = vd_lower_bound(&f2, 2, 2, limits()).unwrap().certificate.value;
    let after = vd_lower_bound(&q, 2, 2, limits()).unwrap().certificate.value;
    assert_eq!(before, integer(1));
    assert_eq!(after, ratio(3, 4));
    let with = vd_lower_bound_with(&q, 2, 2, &[1, 2, 3], limits()).unwrap();
    assert!(with.certificate.value >= after);
    assert!(with.certificate.replay());
}

#[test]
fn tower_matches_golden() {
    let run = run_tower(TowerConfig::default()).unwrap();
    assert!(run.error.is_none());
    let golden = include_str!("golden/tower_default.jsonl");
    assert_eq!(run.jsonl(), golden);
    let replayed = replay_ledger(&Presentation::free(2), &run.state.ledger);
    assert_eq!(replayed.to_string(), run.state.presentation.to_string());
    assert_eq!(replayed.to_string(), "< x, y | x^4, y^8 >");
}

#[test]
fn schreier_identities_on_seeded_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (name, gens) in common::small_p_groups() {
        for d in 1..=3 {
            let case = common::random_case(&mut rng, d, 2, name, &gens);
            let j = case.table.index();
            let sub = rewrite_subgroup(&case.presentation, &case.table);
            assert_eq!(sub.generator_count(), (d - 1) * j + 1);
            assert_eq!(sub.relator_count(), 2 * j);
            assert!(sub.verify_rewriting());
            let tc = todd_coxeter(&case.presentation, &sub.generator_words(), limits()).unwrap();
            assert_eq!(tc.index(), j, "{name}");
        }
    }
}

fn small_word(d: usize) -> impl Strategy<Value = Word> {
    proptest::collection::vec((0..d, any::<bool>()), 0..6)
        .prop_map(|ls| Word::from_letters(ls.into_iter().map(|(g, inv)| l2approx::Letter::new(g, inv))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Adding relators to Z/4 x Z/4 keeps the index of every chain stage a
    /// power of p and the homology agreeing across both routes.
    #[test]
    fn finite_abelian_quotients(extra in proptest::collection::vec(small_word(2), 0..3)) {
        let base = parse_presentation("<x,y|x^4, y^4, [x,y]>").unwrap();
        let g = base.with_relators(extra);
        let c = build_chain(&g, 2, 2, limits()).unwrap();
        prop_assert!(c.check().all());
        prop_assert!(c.truncated.is_none());
        let inv = abelian_invariants(&g);
        prop_assert_eq!(inv.p_rank(2), b1_mod_p(&g, 2).unwrap());
        prop_assert_eq!(c.stages.get(1).map(|s| s.index()).unwrap_or(1), 1usize << inv.p_rank(2));
    }

    #[test]
    fn parse_display_round_trip(rels in proptest::collection::vec(small_word(3), 0..4)) {
        let names = ["a", "b", "c"];
        let g = Presentation::new(&names, rels).unwrap();
        let again = parse_presentation(&g.to_string()).unwrap();
        prop_assert_eq!(again.to_string(), g.to_string());
    }
}
