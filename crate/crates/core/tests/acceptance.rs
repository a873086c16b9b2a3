//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits nonzero if any fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use ea_core::catalog::catalog_algebras;
use ea_core::classify::{classify, has_rip, is_homogeneous, is_omp, is_orthoalgebra, Flag};
use ea_core::compat::{blocks, maximal_boolean_subortho, partitions_of_unity, DEFAULT_BUDGET};
use ea_core::observables::sets::{dynkin_closure_small, for_each_pi_system, sigma_closure_small, SetFamily};
use ea_core::observables::{
    is_question, is_sharp_observable, make_observable, observable_from_resolution,
    observables_with_spectrum_in, power, random_observable, spectral_resolution, uniqueness_check,
    verify_range_boolean,
};
use ea_core::states::{clan_embedding, is_order_determining, state_polytope};
use ea_core::sweep::{sweep, SweepOptions, SweepReport};
use ea_core::{generate, Element, GeneratorSpec, Rational};
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn gen(text: &str) -> ea_core::EffectAlgebra {
    generate(&GeneratorSpec::parse(text).unwrap()).unwrap()
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let took = start.elapsed();
    if took <= limit {
        Ok(())
    } else {
        Err(format!("took {took:?}, limit {limit:?}"))
    }
}

fn fano_blocks() -> Outcome {
    let start = Instant::now();
    let e = gen("fano");
    let bl = blocks(&e, DEFAULT_BUDGET).map_err(|err| err.to_string())?;
    let mb = maximal_boolean_subortho(&e).map_err(|err| err.to_string())?;
    if bl.len() != 7 || bl.iter().any(|b| b.len() != 8) {
        return Err(format!("{} blocks", bl.len()));
    }
    for b in &bl {
        let view = e.restrict(&b.members).map_err(|err| err.to_string())?;
        let c = classify(&view.algebra);
        if !c.get(Flag::HasRdp) || !ea_core::classify::is_boolean(&view.algebra) {
            return Err("a block is not a Boolean RDP algebra".into());
        }
    }
    let a: BTreeSet<Vec<usize>> = bl.iter().map(|b| b.members.ones().collect()).collect();
    let b: BTreeSet<Vec<usize>> = mb.iter().map(|b| b.members.ones().collect()).collect();
    if a != b {
        return Err("blocks differ from maximal Boolean sub-orthoalgebras".into());
    }
    within(start, Duration::from_secs(5))?;
    Ok(format!("7 blocks of 8 elements in {:?}", start.elapsed()))
}

fn rip_failure() -> Outcome {
    let start = Instant::now();
    let e = gen("evenomp 8");
    if !is_omp(&e).holds() {
        return Err("not an OMP".into());
    }
    let rip = has_rip(&e);
    let w: Vec<&str> = rip.witness().ok_or("RIP holds")?.iter().map(|&a| e.label(a)).collect();
    if w != ["{1,2}", "{1,3}", "{1,2,3,4}", "{1,2,3,5}"] {
        return Err(format!("witness {w:?}"));
    }
    within(start, Duration::from_secs(5))?;
    Ok(format!("witness {} in {:?}", w.join(" "), start.elapsed()))
}

fn structural_sweep(report: &SweepReport) -> Outcome {
    if !report.violations.is_empty() {
        return Err(format!("{} violations, first {:?}", report.violations.len(), report.violations[0]));
    }
    if let Some((p, _)) = report.checked.iter().find(|(_, &n)| n == 0) {
        return Err(format!("{p} never exercised"));
    }
    let checks: usize = report.checked.values().sum();
    Ok(format!("{} algebras up to size 8, {checks} checks, no violations", report.algebras))
}

fn observable_round_trip() -> Outcome {
    let start = Instant::now();
    let catalog = catalog_algebras();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let values: Vec<Rational> = (-6..=6).map(|k| q(k, 3)).collect();
    let rounds = 10_000;
    for i in 0..rounds {
        let (name, e) = &catalog[i % catalog.len()];
        let x = random_observable(e, &mut rng, &values);
        let sr = spectral_resolution(e, &x);
        let back = observable_from_resolution(e, &sr).map_err(|err| format!("{name}: {err}"))?;
        if back != x || spectral_resolution(e, &back) != sr {
            return Err(format!("{name}: round trip changed {}", x.display(e)));
        }
        if !uniqueness_check(e, &sr) {
            return Err(format!("{name}: uniqueness failed for {}", sr.display(e)));
        }
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!("{rounds} observables in {:?}", start.elapsed()))
}

fn question_equivalence() -> Outcome {
    let values = [q(0, 1), q(1, 2), q(1, 1), q(2, 1)];
    let mut total = 0;
    for (name, e) in catalog_algebras() {
        for x in observables_with_spectrum_in(&e, &values) {
            let by_spectrum = x.spectrum().iter().all(|t| t.is_zero() || t.is_one());
            let idempotent = power(&e, &x, 2) == x;
            match is_question(&e, &x) {
                Ok(v) if v == by_spectrum && v == idempotent => total += 1,
                other => return Err(format!("{name}: {} gives {other:?}", x.display(&e))),
            }
        }
    }
    Ok(format!("{total} observables, no discrepancies"))
}

/// Observables with distinct values on every partition of unity; the range
/// only depends on the partition.
fn partition_observables(e: &ea_core::EffectAlgebra) -> Vec<ea_core::observables::SimpleObservable> {
    partitions_of_unity(e, DEFAULT_BUDGET)
        .expect("catalog partitions fit the budget")
        .into_iter()
        .map(|parts| {
            make_observable(e, parts.into_iter().enumerate().map(|(i, a)| (q(i as i64, 1), a)))
                .expect("partition of unity")
        })
        .collect()
}

fn ranges_are_boolean() -> Outcome {
    let mut total = 0;
    for (name, e) in catalog_algebras() {
        if !is_orthoalgebra(&e).holds() {
            continue;
        }
        for x in partition_observables(&e) {
            if verify_range_boolean(&e, &x) != Ok(true) {
                return Err(format!("{name}: range of {} is not Boolean", x.display(&e)));
            }
            total += 1;
        }
    }
    Ok(format!("{total} observables on catalog orthoalgebras"))
}

fn sharp_observable_clauses() -> Outcome {
    let values = [q(0, 1), q(1, 2), q(1, 1)];
    let mut total = 0;
    for (name, e) in catalog_algebras() {
        if !is_homogeneous(&e).holds() {
            continue;
        }
        let observables = observables_with_spectrum_in(&e, &values)
            .into_iter()
            .chain(partition_observables(&e));
        for x in observables {
            is_sharp_observable(&e, &x).map_err(|err| format!("{name}: {err}"))?;
            total += 1;
        }
    }
    Ok(format!("{total} observables on homogeneous catalog algebras"))
}

fn pi_lambda() -> Outcome {
    let start = Instant::now();
    let mut count = 0usize;
    let mut bad = None;
    for n in 0..=5 {
        for_each_pi_system(n, |f| {
            count += 1;
            if bad.is_none() && dynkin_closure_small(n, f) != sigma_closure_small(n, f) {
                bad = Some((n, f));
            }
        });
    }
    if let Some((n, f)) = bad {
        return Err(format!("closures differ on {}", SetFamily::from_small(n, f)));
    }
    let g = SetFamily::from_points(4, &[&[1, 2], &[2, 3]]);
    if g.is_pi_system() || g.dynkin_closure() == g.sigma_closure() {
        return Err("separating example failed".into());
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!(
        "{count} π-systems in {:?}; {g} has Dynkin closure of {} sets, σ-closure of {}",
        start.elapsed(),
        g.dynkin_closure().len(),
        g.sigma_closure().len()
    ))
}

fn states() -> Outcome {
    for n in 2..=8 {
        let e = gen(&format!("mvchain {n}"));
        let s = state_polytope(&e).extreme_states;
        let expected: Vec<Rational> = (0..=n as i64).map(|k| q(k, n as i64)).collect();
        if s.len() != 1 || s.states[0].values() != expected.as_slice() {
            return Err(format!("mvchain {n}: {} states", s.len()));
        }
    }
    for n in 1..=4 {
        let e = gen(&format!("boolean {n}"));
        let s = state_polytope(&e).extreme_states;
        let atoms: Vec<Element> = (0..n).map(|i| Element(1 << i)).collect();
        let ok = s.len() == n
            && s.states.iter().all(|st| {
                atoms.iter().filter(|&&a| st.value(a).is_one()).count() == 1
                    && atoms.iter().all(|&a| st.value(a).is_zero() || st.value(a).is_one())
            });
        if !ok {
            return Err(format!("boolean {n}: {} extreme states", s.len()));
        }
    }
    let mut checked = 0;
    for (name, e) in catalog_algebras() {
        let s = state_polytope(&e).extreme_states;
        let clan = clan_embedding(&e, &s).map_err(|err| format!("{name}: {err}"))?;
        if clan.is_iso_onto_image != is_order_determining(&e, &s).holds() {
            return Err(format!("{name}: clan embedding disagrees with order determination"));
        }
        checked += 1;
    }
    Ok(format!("chains and Booleans exact; clan check on {checked} catalog algebras"))
}

fn compatibility_gap(report: &SweepReport) -> Outcome {
    match &report.compatible_not_strongly {
        None => Ok("no compatible pair fails strong compatibility up to size 8 (frozen snapshot)".into()),
        Some(f) => Err(format!("snapshot changed: algebra {} ({}) pair {:?}", f.algebra, f.table, f.elements)),
    }
}

fn main() -> ExitCode {
    let start = Instant::now();
    let report = sweep(&SweepOptions { max_size: 8, ..SweepOptions::default() });
    let sweep_time = start.elapsed();
    let report = match report {
        Ok(r) => r,
        Err(err) => {
            println!("sweep failed: {err}");
            return ExitCode::FAILURE;
        }
    };
    let criteria: Vec<Criterion> = vec![
        ("Fano blocks", Box::new(fano_blocks)),
        ("RIP failure in even-subset OMP", Box::new(rip_failure)),
        ("structural sweep", Box::new(|| structural_sweep(&report).map(|s| format!("{s} in {sweep_time:?}")))),
        ("observable round trip", Box::new(observable_round_trip)),
        ("questions are idempotent observables", Box::new(question_equivalence)),
        ("observable ranges are Boolean", Box::new(ranges_are_boolean)),
        ("sharp observable clauses agree", Box::new(sharp_observable_clauses)),
        ("π-λ on small universes", Box::new(pi_lambda)),
        ("states", Box::new(states)),
        ("compatibility gap", Box::new(|| compatibility_gap(&report))),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {detail}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
