use ea_core::observables::sets::{
    dynkin_closure_small, for_each_pi_system, is_pi_system_small, sigma_closure_small, SetFamily,
};
use proptest::prelude::*;

// Number of π-systems (the empty family included) on n points, from two
// independent counters: filtering all families, and a backtracking search.
const PI_SYSTEMS: [usize; 5] = [2, 4, 14, 122, 4960];

#[test]
fn pi_system_counts() {
    for (n, &expected) in PI_SYSTEMS.iter().enumerate() {
        let mut count = 0;
        for_each_pi_system(n, |f| {
            assert!(is_pi_system_small(f));
            count += 1;
        });
        assert_eq!(count, expected, "n = {n}");
    }
}

#[test]
fn pi_systems_generate_equal_closures_up_to_four() {
    for n in 0..=4 {
        for_each_pi_system(n, |f| {
            assert_eq!(dynkin_closure_small(n, f), sigma_closure_small(n, f));
        });
    }
}

fn family(n: usize) -> impl Strategy<Value = u64> {
    let sets = 1u32 << n;
    proptest::collection::vec(0..sets, 0..8)
        .prop_map(|v| v.into_iter().fold(0u64, |b, s| b | 1 << s))
}

proptest! {
    #[test]
    fn pi_lambda_on_six_points(f in family(6)) {
        // Close under intersections to get a π-system.
        let mut pi = f;
        loop {
            let mut next = pi;
            for a in (0..64u32).filter(|a| pi >> a & 1 == 1) {
                for b in (0..64u32).filter(|b| pi >> b & 1 == 1) {
                    next |= 1 << (a & b);
                }
            }
            if next == pi { break; }
            pi = next;
        }
        prop_assert!(is_pi_system_small(pi));
        prop_assert_eq!(dynkin_closure_small(6, pi), sigma_closure_small(6, pi));
    }

    #[test]
    fn closures_are_nested_and_idempotent(f in family(5)) {
        let d = SetFamily::from_small(5, dynkin_closure_small(5, f));
        let s = SetFamily::from_small(5, sigma_closure_small(5, f));
        prop_assert!(d.is_dynkin());
        prop_assert!(s.is_sigma_algebra());
        prop_assert!(d.is_subfamily(&s));
        prop_assert!(SetFamily::from_small(5, f).is_subfamily(&d));
        prop_assert_eq!(d.dynkin_closure(), d.clone());
        // A Dynkin system that is also a π-system is a σ-algebra.
        prop_assert_eq!(d.is_pi_system(), d == s);
    }

    #[test]
    fn bitset_and_small_closures_agree(f in family(5)) {
        let fam = SetFamily::from_small(5, f);
        prop_assert_eq!(fam.dynkin_closure().to_small(), Some(dynkin_closure_small(5, f)));
        prop_assert_eq!(fam.sigma_closure().to_small(), Some(sigma_closure_small(5, f)));
    }
}
