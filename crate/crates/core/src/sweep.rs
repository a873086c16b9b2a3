//! Property sweep over every small effect algebra.
//!
//! Runs the structural implications and equivalences on each isomorphism
//! class up to a given size and collects violations (expected: none) along
//! with a few existence findings.

use std::collections::BTreeMap;

use num_traits::One;
use rayon::prelude::*;

use crate::algebra::{EffectAlgebra, Element};
use crate::catalog::{enumerate_small_with_cap, CatalogError};
use crate::classify::{
    central_elements, classify, is_homogeneous, is_omp, is_oml, is_orthoalgebra,
    orthoalgebraic_skeleton, sharp_closure_check, sharp_elements, ClassificationReport, Flag,
};
use crate::compat::{
    are_compatible, are_strongly_compatible, blocks, boolean_subalgebras, compatible_not_strongly,
    CompatContext,
};
use crate::states::{
    check_full_implies_orthoalgebra, clan_embedding, is_extreme, is_order_determining,
    state_polytope,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepOptions {
    pub max_size: usize,
    pub cap: usize,
    pub budget: u64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            max_size: 6,
            cap: crate::catalog::DEFAULT_ENUMERATION_CAP,
            budget: crate::compat::DEFAULT_BUDGET,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub property: String,
    /// Position of the algebra in the enumeration.
    pub algebra: usize,
    pub detail: String,
}

/// An algebra exhibiting something, with the elements involved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Finding {
    pub algebra: usize,
    pub size: usize,
    pub table: String,
    pub elements: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SweepReport {
    pub algebras: usize,
    pub count_by_size: BTreeMap<usize, usize>,
    /// How many algebras have each flag.
    pub flag_counts: BTreeMap<String, usize>,
    /// How many instances each property was checked on.
    pub checked: BTreeMap<String, usize>,
    pub violations: Vec<Violation>,
    /// First compatible pair that is not strongly compatible.
    pub compatible_not_strongly: Option<Finding>,
    /// First algebra that is not homogeneous.
    pub non_homogeneous: Option<Finding>,
}

/// `a + b = c` lines for `a ≤ b` in carrier order, skipping sums with 0.
pub fn sum_lines(e: &EffectAlgebra) -> Vec<String> {
    let mut lines = Vec::new();
    for a in e.elements().filter(|&a| a != e.zero()) {
        for b in e.elements().skip(a.0).filter(|&b| b != e.zero()) {
            if let Some(c) = e.sum(a, b) {
                lines.push(format!("{} + {} = {}", e.label(a), e.label(b), e.label(c)));
            }
        }
    }
    lines
}

fn finding(index: usize, e: &EffectAlgebra, elements: &[Element]) -> Finding {
    Finding {
        algebra: index,
        size: e.size(),
        table: sum_lines(e).join("; "),
        elements: elements.iter().map(|&x| e.label(x).to_string()).collect(),
    }
}

/// Results for one algebra.
#[derive(Default)]
struct Local {
    checked: Vec<&'static str>,
    violations: Vec<(String, String)>,
    report: Option<ClassificationReport>,
    compatible_not_strongly: Option<Vec<Element>>,
    non_homogeneous: Option<Vec<Element>>,
}

impl Local {
    fn check(&mut self, property: &'static str, ok: bool, detail: impl FnOnce() -> String) {
        self.checked.push(property);
        if !ok {
            self.violations.push((property.to_string(), detail()));
        }
    }
}

/// Every property on one algebra.
fn sweep_one(e: &EffectAlgebra, budget: u64) -> Local {
    let mut out = Local::default();
    let report = classify(e);
    for (p, c) in ClassificationReport::IMPLICATIONS {
        if report.get(p) {
            out.check(
                match (p, c) {
                    (Flag::HasRdp, Flag::HasRip) => "rdp => rip",
                    (Flag::HasRdp, Flag::IsHomogeneous) => "rdp => homogeneous",
                    (Flag::IsLattice, Flag::IsHomogeneous) => "lattice => homogeneous",
                    (Flag::IsOrthoalgebra, Flag::IsHomogeneous) => "orthoalgebra => homogeneous",
                    (Flag::IsOml, Flag::IsOmp) => "oml => omp",
                    (Flag::IsOmp, Flag::IsOrthoalgebra) => "omp => orthoalgebra",
                    _ => "oml => lattice",
                },
                report.get(c),
                || format!("{p} without {c}"),
            );
        }
    }
    let homogeneous = report.get(Flag::IsHomogeneous);
    let ortho = report.get(Flag::IsOrthoalgebra);
    let rip = report.get(Flag::HasRip);
    if !homogeneous {
        out.non_homogeneous = report.witness(Flag::IsHomogeneous).map(<[Element]>::to_vec);
    }

    if homogeneous {
        let closure = sharp_closure_check(e);
        out.check("homogeneous => sharp elements closed", closure.holds(), || {
            format!("witness {:?}", closure.witness())
        });
        let skeleton = orthoalgebraic_skeleton(e);
        out.check(
            "homogeneous => skeleton is a maximal sub-orthoalgebra",
            skeleton
                .as_ref()
                .is_ok_and(|s| e.restrict(&s.members).is_ok_and(|v| is_orthoalgebra(&v.algebra).holds())),
            || format!("{skeleton:?}"),
        );
        let bl = blocks(e, budget);
        out.check("homogeneous => blocks cover with RDP", bl.is_ok(), || format!("{bl:?}"));
    }

    let center = central_elements(e);
    out.check("center is Boolean", center.is_ok(), || format!("{center:?}"));
    if report.get(Flag::HasRdp) {
        let sh = sharp_elements(e);
        let same = matches!((&sh, &center), (Ok(s), Ok(c)) if s.members == c.members);
        out.check("rdp => sharp = central", same, || format!("{sh:?} vs {center:?}"));
    }
    if report.get(Flag::IsLattice) {
        let ok = sharp_elements(e).is_ok_and(|sh| {
            let sublattice = sh.elements().all(|a| {
                sh.elements()
                    .all(|b| e.join(a, b).is_some_and(|j| sh.contains(j)))
            });
            sublattice
                && e.restrict(&sh.members)
                    .is_ok_and(|v| is_oml(&v.algebra).holds())
        });
        out.check("lattice => sharp elements form an OML sublattice", ok, String::new);
    }

    let mut strong_not_compat = None;
    for a in e.elements() {
        for b in e.elements() {
            if are_strongly_compatible(e, a, b).is_some() && are_compatible(e, a, b).is_none() {
                strong_not_compat = Some((a, b));
            }
        }
    }
    out.check("strongly compatible => compatible", strong_not_compat.is_none(), || {
        format!("{strong_not_compat:?}")
    });
    out.compatible_not_strongly = compatible_not_strongly(e).map(|(a, b)| vec![a, b]);

    if ortho && rip {
        out.check("orthoalgebra + rip => omp", is_omp(e).holds(), String::new);
        match CompatContext::new(e, budget) {
            Ok(ctx) => {
                for a in e.elements() {
                    for b in e.elements().skip(a.0) {
                        let r = ctx.evaluate(a, b);
                        out.check("rip orthoalgebra: four compatibility clauses agree", r.agrees(), || {
                            format!("{} / {}: {r:?}", e.label(a), e.label(b))
                        });
                        if let Some(is_join) = r.sum_is_join {
                            out.check("rip orthoalgebra: defined sum is the join", is_join, || {
                                format!("{} + {}", e.label(a), e.label(b))
                            });
                        }
                    }
                }
            }
            Err(err) => out.check("rip orthoalgebra: four compatibility clauses agree", false, || {
                err.to_string()
            }),
        }
    }
    if ortho {
        for b in boolean_subalgebras(e) {
            for x in b.ones().map(Element) {
                for y in b.ones().map(Element) {
                    if e.is_summable(x, y) {
                        let d = are_compatible(e, x, y);
                        let ok = d.is_some_and(|d| d.c == e.zero()) && e.meet(x, y) == Some(e.zero());
                        out.check("boolean subalgebra: summable pairs split with c = 0", ok, || {
                            format!("{} + {}", e.label(x), e.label(y))
                        });
                    }
                }
            }
        }
    }

    out.check(
        "full states => orthoalgebra",
        check_full_implies_orthoalgebra(e),
        String::new,
    );
    let polytope = state_polytope(e);
    let states = &polytope.extreme_states;
    for s in &states.states {
        let ok = is_extreme(e, s)
            && e.elements().all(|a| {
                s.value(e.complement(a)) == &(crate::Rational::one() - s.value(a))
                    && e.upper_set(a).ones().all(|b| s.value(a) <= s.value(Element(b)))
            });
        out.check("extreme states are vertices with s(a') = 1 - s(a)", ok, || s.display(e));
    }
    if let Ok(clan) = clan_embedding(e, states) {
        let od = is_order_determining(e, states).holds();
        out.check("clan embedding is an order isomorphism iff order-determining", clan.is_iso_onto_image == od, || {
            format!("iso {} od {od}", clan.is_iso_onto_image)
        });
        if od {
            out.check("order-determining => clan axioms", clan.clan_axioms_hold && clan.is_injective, String::new);
        }
    }
    out.report = Some(report);
    let _ = is_homogeneous;
    out
}

/// Runs every property on every effect algebra with at most
/// `options.max_size` elements.
pub fn sweep(options: &SweepOptions) -> Result<SweepReport, CatalogError> {
    let all = enumerate_small_with_cap(options.max_size, options.cap, |_| true)?;
    let locals: Vec<Local> = all
        .witnesses
        .par_iter()
        .map(|e| sweep_one(e, options.budget))
        .collect();

    let mut report = SweepReport {
        algebras: all.total(),
        count_by_size: all.count_by_size.clone(),
        ..SweepReport::default()
    };
    for flag in Flag::ALL {
        report.flag_counts.insert(flag.name().to_string(), 0);
    }
    for (index, (e, local)) in all.witnesses.iter().zip(locals).enumerate() {
        for property in local.checked {
            *report.checked.entry(property.to_string()).or_default() += 1;
        }
        for (property, detail) in local.violations {
            report.violations.push(Violation {
                property,
                algebra: index,
                detail,
            });
        }
        if let Some(r) = local.report {
            for (flag, holds) in r.flags {
                if holds {
                    *report.flag_counts.get_mut(flag.name()).unwrap() += 1;
                }
            }
        }
        if report.compatible_not_strongly.is_none() {
            if let Some(w) = local.compatible_not_strongly {
                report.compatible_not_strongly = Some(finding(index, e, &w));
            }
        }
        if report.non_homogeneous.is_none() {
            if let Some(w) = local.non_homogeneous {
                report.non_homogeneous = Some(finding(index, e, &w));
            }
        }
    }
    Ok(report)
}
