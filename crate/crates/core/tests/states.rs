use ea_core::catalog::{catalog_algebras, generate, GeneratorSpec};
use ea_core::classify::is_orthoalgebra;
use ea_core::states::{
    check_full_implies_orthoalgebra, clan_embedding, is_extreme, is_full, is_order_determining,
    state_polytope,
};
use ea_core::{EffectAlgebra, Rational};
use num_traits::{One, Zero};

fn gen(text: &str) -> EffectAlgebra {
    generate(&GeneratorSpec::parse(text).unwrap()).unwrap()
}

// Vertex counts, order-determination and fullness from an exact
// brute-force vertex search (every d-subset of tight constraints).
const EXPECTED: [(&str, usize, bool, bool); 11] = [
    ("boolean 2", 2, true, true),
    ("boolean 3", 3, true, true),
    ("boolean 4", 4, true, true),
    ("mvchain 3", 1, true, false),
    ("evenomp 4", 8, true, true),
    ("evenomp 6", 12, true, true),
    ("fano", 1, false, false),
    ("hsum (boolean 2) (boolean 2)", 4, true, true),
    ("hsum (boolean 2) (boolean 3)", 6, true, true),
    ("hsum (boolean 2) (mvchain 2)", 2, true, false),
    ("product (boolean 1) (mvchain 2)", 2, true, false),
];

#[test]
fn vertex_counts_match_oracle() {
    for (text, vertices, od, full) in EXPECTED {
        let e = gen(text);
        let p = state_polytope(&e);
        let s = &p.extreme_states;
        assert_eq!(s.len(), vertices, "{text}");
        assert_eq!(is_order_determining(&e, s).holds(), od, "{text}");
        assert_eq!(is_full(&e, s).holds(), full, "{text}");
        assert!(s.states.iter().all(|st| is_extreme(&e, st)), "{text}");
    }
}

#[test]
fn polytope_dimensions() {
    for (text, dim) in [
        ("fano", 0),
        ("mvchain 5", 0),
        ("boolean 3", 2),
        ("hsum (boolean 2) (boolean 2)", 2),
        ("evenomp 6", 5),
    ] {
        assert_eq!(state_polytope(&gen(text)).dimension, Some(dim), "{text}");
    }
}

#[test]
fn fano_state_is_one_third_on_atoms() {
    let e = gen("fano");
    let s = &state_polytope(&e).extreme_states.states[0];
    let third = Rational::new(1.into(), 3.into());
    for label in ["p1", "p2", "p7"] {
        assert_eq!(s.value(e.find(label).unwrap()), &third);
    }
}

#[test]
fn states_are_complemented_monotone_and_additive() {
    for (name, e) in catalog_algebras() {
        for s in &state_polytope(&e).extreme_states.states {
            for a in e.elements() {
                let v = s.value(a);
                assert!(*v >= Rational::zero() && *v <= Rational::one(), "{name}");
                assert_eq!(s.value(e.complement(a)), &(Rational::one() - v), "{name}");
                for b in e.elements() {
                    if let Some(c) = e.sum(a, b) {
                        assert_eq!(s.value(c), &(v + s.value(b)), "{name}");
                    }
                    if e.leq(a, b) {
                        assert!(v <= s.value(b), "{name}");
                    }
                }
            }
        }
    }
}

#[test]
fn clan_iso_iff_order_determining_over_catalog() {
    for (name, e) in catalog_algebras() {
        let states = state_polytope(&e).extreme_states;
        assert!(check_full_implies_orthoalgebra(&e), "{name}");
        if is_full(&e, &states).holds() {
            assert!(is_orthoalgebra(&e).holds(), "{name}");
        }
        let clan = clan_embedding(&e, &states).unwrap();
        let od = is_order_determining(&e, &states).holds();
        assert_eq!(clan.is_iso_onto_image, od, "{name}");
        if od {
            assert!(clan.is_injective && clan.clan_axioms_hold, "{name}");
        }
    }
}
