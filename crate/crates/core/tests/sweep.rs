use std::collections::BTreeMap;

use ea_core::sweep::{sweep, SweepOptions};

fn counts(pairs: &[(&str, usize)]) -> BTreeMap<String, usize> {
    pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

// Flag counts from a naive oracle that checks each definition directly on
// every isomorphism class.
#[test]
fn sweep_up_to_six() {
    let r = sweep(&SweepOptions { max_size: 6, ..SweepOptions::default() }).unwrap();
    assert_eq!(r.algebras, 19);
    assert!(r.violations.is_empty(), "{:?}", r.violations);
    assert_eq!(
        r.flag_counts,
        counts(&[
            ("has_rdp", 7),
            ("has_rip", 18),
            ("is_homogeneous", 18),
            ("is_lattice", 18),
            ("is_oml", 3),
            ("is_omp", 3),
            ("is_orthoalgebra", 3),
        ])
    );
}

#[test]
fn sweep_up_to_eight() {
    let r = sweep(&SweepOptions { max_size: 8, ..SweepOptions::default() }).unwrap();
    assert_eq!(r.algebras, 73);
    assert!(r.violations.is_empty(), "{:?}", r.violations);
    assert_eq!(
        r.flag_counts,
        counts(&[
            ("has_rdp", 11),
            ("has_rip", 55),
            ("is_homogeneous", 55),
            ("is_lattice", 55),
            ("is_oml", 5),
            ("is_omp", 5),
            ("is_orthoalgebra", 5),
        ])
    );
    assert!(r.checked.values().all(|&n| n > 0));

    // Snapshot: no compatible pair fails strong compatibility at this size.
    assert_eq!(r.compatible_not_strongly, None);

    let nh = r.non_homogeneous.expect("a non-homogeneous algebra exists");
    assert_eq!(nh.size, 6);
    assert_eq!(
        nh.table,
        "e1 + e1 = e3; e1 + e2 = e4; e1 + e3 = 1; e2 + e2 = e3; e2 + e4 = 1"
    );
    assert_eq!(nh.elements, ["e1", "e2", "e2"]);
}

#[test]
fn sweep_is_deterministic() {
    let options = SweepOptions { max_size: 7, ..SweepOptions::default() };
    assert_eq!(sweep(&options).unwrap(), sweep(&options).unwrap());
}
