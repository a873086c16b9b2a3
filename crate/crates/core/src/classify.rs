//! Structure- and element-level predicates.
//!
//! Every predicate is an exhaustive scan that stops at the first
//! counterexample and hands it back as a witness.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::algebra::{element_set, EffectAlgebra, Element, ElementSet};

/// Outcome of a predicate: holds, or fails with a counterexample.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    witness: Option<Vec<Element>>,
}

impl Check {
    pub fn pass() -> Self {
        Check { witness: None }
    }

    pub fn fail(witness: Vec<Element>) -> Self {
        Check {
            witness: Some(witness),
        }
    }

    pub fn holds(&self) -> bool {
        self.witness.is_none()
    }

    pub fn witness(&self) -> Option<&[Element]> {
        self.witness.as_deref()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("subset not closed: {0}")]
    NotClosed(String),
    #[error("algebra is not homogeneous (witness {0:?})")]
    NotHomogeneous(Vec<Element>),
    #[error("orthoalgebraic skeleton is not maximal: {0}")]
    NotMaximal(String),
}

/// `a + b` and `b − a` where they exist, over all lower sets.
fn lower_and(e: &EffectAlgebra, a: Element, b: Element) -> ElementSet {
    let mut s = e.lower_set(a).clone();
    s.intersect_with(e.lower_set(b));
    s
}

/// Riesz decomposition: every `a1 + a2 = b1 + b2` has a 2×2 refinement.
/// The witness is an unrefinable quadruple `(a1, a2, b1, b2)`.
pub fn has_rdp(e: &EffectAlgebra) -> Check {
    let mut by_sum: Vec<Vec<(Element, Element)>> = vec![Vec::new(); e.size()];
    for a1 in e.elements() {
        for a2 in e.elements() {
            if let Some(s) = e.sum(a1, a2) {
                by_sum[s.0].push((a1, a2));
            }
        }
    }
    for pairs in &by_sum {
        for (i, &(a1, a2)) in pairs.iter().enumerate() {
            for &(b1, b2) in &pairs[i..] {
                if !refines(e, a1, a2, b1, b2) {
                    return Check::fail(vec![a1, a2, b1, b2]);
                }
            }
        }
    }
    Check::pass()
}

fn refines(e: &EffectAlgebra, a1: Element, a2: Element, b1: Element, b2: Element) -> bool {
    lower_and(e, a1, b1).ones().map(Element).any(|c11| {
        let c12 = e.diff(a1, c11).expect("c11 ≤ a1");
        let c21 = e.diff(b1, c11).expect("c11 ≤ b1");
        match e.diff(a2, c21) {
            Ok(c22) => e.sum(c12, c22) == Some(b2),
            Err(_) => false,
        }
    })
}

/// Riesz interpolation. Scans `x1 ≤ x2`, then upper bounds `y1 ≤ y2` in
/// carrier order; the witness is `(x1, x2, y1, y2)`.
pub fn has_rip(e: &EffectAlgebra) -> Check {
    for x1 in e.elements() {
        for x2 in e.elements().skip(x1.0) {
            let mut above = e.upper_set(x1).clone();
            above.intersect_with(e.upper_set(x2));
            let bounds: Vec<usize> = above.ones().collect();
            for (i, &y1) in bounds.iter().enumerate() {
                for &y2 in &bounds[i..] {
                    let mut between = above.clone();
                    between.intersect_with(e.lower_set(Element(y1)));
                    between.intersect_with(e.lower_set(Element(y2)));
                    if between.is_clear() {
                        return Check::fail(vec![x1, x2, Element(y1), Element(y2)]);
                    }
                }
            }
        }
    }
    Check::pass()
}

/// No nonzero `a` with `a + a` defined.
pub fn is_orthoalgebra(e: &EffectAlgebra) -> Check {
    match e
        .elements()
        .find(|&a| a != e.zero() && e.is_summable(a, a))
    {
        Some(a) => Check::fail(vec![a]),
        None => Check::pass(),
    }
}

/// Orthoalgebra in which pairwise summable triples are summable.
pub fn is_omp(e: &EffectAlgebra) -> Check {
    let ortho = is_orthoalgebra(e);
    if !ortho.holds() {
        return ortho;
    }
    for a in e.elements() {
        for b in e.elements().skip(a.0) {
            let Some(ab) = e.sum(a, b) else { continue };
            for c in e.elements().skip(b.0) {
                if e.is_summable(a, c) && e.is_summable(b, c) && !e.is_summable(ab, c) {
                    return Check::fail(vec![a, b, c]);
                }
            }
        }
    }
    Check::pass()
}

/// Every pair has a join; the witness is a pair without one.
pub fn is_lattice(e: &EffectAlgebra) -> Check {
    for a in e.elements() {
        for b in e.elements().skip(a.0 + 1) {
            if e.join(a, b).is_none() {
                return Check::fail(vec![a, b]);
            }
        }
    }
    Check::pass()
}

pub fn is_oml(e: &EffectAlgebra) -> Check {
    let omp = is_omp(e);
    if !omp.holds() {
        return omp;
    }
    is_lattice(e)
}

/// `a ≤ b + c` and `a ≤ (b + c)'` imply `a = a1 + a2` with `a1 ≤ b`,
/// `a2 ≤ c`. The witness is `(a, b, c)`.
pub fn is_homogeneous(e: &EffectAlgebra) -> Check {
    for b in e.elements() {
        for c in e.elements() {
            let Some(s) = e.sum(b, c) else { continue };
            let candidates = lower_and(e, s, e.complement(s));
            for a in candidates.ones().map(Element) {
                let splits = lower_and(e, a, b).ones().map(Element).any(|a1| {
                    let a2 = e.diff(a, a1).expect("a1 ≤ a");
                    e.leq(a2, c)
                });
                if !splits {
                    return Check::fail(vec![a, b, c]);
                }
            }
        }
    }
    Check::pass()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Flag {
    IsLattice,
    HasRdp,
    HasRip,
    IsHomogeneous,
    IsOrthoalgebra,
    IsOmp,
    IsOml,
}

impl Flag {
    pub const ALL: [Flag; 7] = [
        Flag::IsLattice,
        Flag::HasRdp,
        Flag::HasRip,
        Flag::IsHomogeneous,
        Flag::IsOrthoalgebra,
        Flag::IsOmp,
        Flag::IsOml,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Flag::IsLattice => "is_lattice",
            Flag::HasRdp => "has_rdp",
            Flag::HasRip => "has_rip",
            Flag::IsHomogeneous => "is_homogeneous",
            Flag::IsOrthoalgebra => "is_orthoalgebra",
            Flag::IsOmp => "is_omp",
            Flag::IsOml => "is_oml",
        }
    }
}

impl fmt::Display for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// All structure flags of one algebra, with a counterexample for each
/// flag that fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassificationReport {
    pub flags: BTreeMap<Flag, bool>,
    pub witnesses: BTreeMap<Flag, Vec<Element>>,
}

impl ClassificationReport {
    pub fn get(&self, flag: Flag) -> bool {
        self.flags[&flag]
    }

    pub fn witness(&self, flag: Flag) -> Option<&[Element]> {
        self.witnesses.get(&flag).map(Vec::as_slice)
    }

    /// Implications that must hold in every report, as `(premise, conclusion)`.
    pub const IMPLICATIONS: [(Flag, Flag); 7] = [
        (Flag::HasRdp, Flag::HasRip),
        (Flag::HasRdp, Flag::IsHomogeneous),
        (Flag::IsLattice, Flag::IsHomogeneous),
        (Flag::IsOrthoalgebra, Flag::IsHomogeneous),
        (Flag::IsOml, Flag::IsOmp),
        (Flag::IsOmp, Flag::IsOrthoalgebra),
        (Flag::IsOml, Flag::IsLattice),
    ];

    /// Implications violated by this report (expected: none).
    pub fn broken_implications(&self) -> Vec<(Flag, Flag)> {
        Self::IMPLICATIONS
            .into_iter()
            .filter(|&(p, c)| self.get(p) && !self.get(c))
            .collect()
    }
}

pub fn classify(e: &EffectAlgebra) -> ClassificationReport {
    let checks = [
        (Flag::IsLattice, is_lattice(e)),
        (Flag::HasRdp, has_rdp(e)),
        (Flag::HasRip, has_rip(e)),
        (Flag::IsHomogeneous, is_homogeneous(e)),
        (Flag::IsOrthoalgebra, is_orthoalgebra(e)),
        (Flag::IsOmp, is_omp(e)),
        (Flag::IsOml, is_oml(e)),
    ];
    let mut flags = BTreeMap::new();
    let mut witnesses = BTreeMap::new();
    for (flag, check) in checks {
        flags.insert(flag, check.holds());
        if let Some(w) = check.witness() {
            witnesses.insert(flag, w.to_vec());
        }
    }
    ClassificationReport { flags, witnesses }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SubAlgebraKind {
    /// Not closed under `'` or defined sums.
    Subset,
    SubEffectAlgebra,
    SubOrthoalgebra,
    Boolean,
    Block,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubAlgebra {
    pub members: ElementSet,
    pub kind: SubAlgebraKind,
}

impl SubAlgebra {
    pub fn contains(&self, a: Element) -> bool {
        self.members.contains(a.0)
    }

    pub fn len(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_clear()
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        self.members.ones().map(Element)
    }

    pub fn is_closed(&self) -> bool {
        self.kind != SubAlgebraKind::Subset
    }
}

/// Contains 0 and 1 and is closed under `'` and every defined sum.
pub fn is_sub_effect_algebra(e: &EffectAlgebra, members: &ElementSet) -> Result<(), String> {
    e.restrict(members).map(|_| ()).map_err(|err| err.to_string())
}

/// Classifies a closed subset by its own induced structure.
pub fn closure_kind(e: &EffectAlgebra, members: &ElementSet) -> SubAlgebraKind {
    let Ok(view) = e.restrict(members) else {
        return SubAlgebraKind::Subset;
    };
    if !is_orthoalgebra(&view.algebra).holds() {
        SubAlgebraKind::SubEffectAlgebra
    } else if is_boolean(&view.algebra) {
        SubAlgebraKind::Boolean
    } else {
        SubAlgebraKind::SubOrthoalgebra
    }
}

/// Whether `e` is a Boolean algebra: an orthoalgebra whose atoms are jointly
/// summable to 1 and generate exactly `2^atoms` elements.
pub fn is_boolean(e: &EffectAlgebra) -> bool {
    if !is_orthoalgebra(e).holds() {
        return false;
    }
    let atoms: Vec<Element> = e
        .elements()
        .filter(|&a| a != e.zero() && e.lower_set(a).count_ones(..) == 2)
        .collect();
    atoms.len() < usize::BITS as usize
        && e.size() == 1 << atoms.len()
        && e.sum_family(&atoms) == Some(e.one())
}

/// The sub-effect algebra generated by `seeds`: least superset containing 0,
/// 1 and closed under `'` and defined sums.
pub fn generated_subalgebra(e: &EffectAlgebra, seeds: &[Element]) -> ElementSet {
    let mut members = e.empty_set();
    let mut queue: Vec<Element> = Vec::new();
    let add = |x: Element, members: &mut ElementSet, queue: &mut Vec<Element>| {
        if !members.put(x.0) {
            queue.push(x);
        }
    };
    add(e.zero(), &mut members, &mut queue);
    add(e.one(), &mut members, &mut queue);
    for &s in seeds {
        add(s, &mut members, &mut queue);
    }
    while let Some(x) = queue.pop() {
        add(e.complement(x), &mut members, &mut queue);
        let current: Vec<Element> = members.ones().map(Element).collect();
        for y in current {
            if let Some(s) = e.sum(x, y) {
                add(s, &mut members, &mut queue);
            }
        }
    }
    members
}

/// `a ∧ a'` exists and is 0.
pub fn is_sharp(e: &EffectAlgebra, a: Element) -> bool {
    e.meet(a, e.complement(a)) == Some(e.zero())
}

/// `x, y ≤ a` with `x + y` defined imply `x + y ≤ a`.
pub fn is_principal(e: &EffectAlgebra, a: Element) -> bool {
    let below = e.lower_set(a);
    below.ones().map(Element).all(|x| {
        below
            .ones()
            .map(Element)
            .all(|y| e.sum(x, y).is_none_or(|s| e.leq(s, a)))
    })
}

/// `a` and `a'` principal, and every `b` splits uniquely as `b1 + b2` with
/// `b1 ≤ a`, `b2 ≤ a'`.
///
/// Principality of `a'` is not implied by the rest outside homogeneous
/// algebras, and without it the central elements need not be closed under `'`.
pub fn is_central(e: &EffectAlgebra, a: Element) -> bool {
    let ac = e.complement(a);
    if !is_principal(e, a) || !is_principal(e, ac) {
        return false;
    }
    e.elements().all(|b| {
        let splits = lower_and(e, b, a)
            .ones()
            .map(Element)
            .filter(|&b1| {
                let b2 = e.diff(b, b1).expect("b1 ≤ b");
                e.leq(b2, ac)
            })
            .count();
        splits == 1
    })
}

fn sharp_set(e: &EffectAlgebra) -> ElementSet {
    element_set(e.size(), e.elements().filter(|&a| is_sharp(e, a)))
}

/// `Sh(E)`. Closure is always verified; a failure is an error only when
/// `e` is homogeneous, where closure is guaranteed. For other inputs the
/// set comes back with kind [`SubAlgebraKind::Subset`].
pub fn sharp_elements(e: &EffectAlgebra) -> Result<SubAlgebra, ClassifyError> {
    let members = sharp_set(e);
    let kind = closure_kind(e, &members);
    if kind == SubAlgebraKind::Subset && is_homogeneous(e).holds() {
        let reason = is_sub_effect_algebra(e, &members).unwrap_err();
        return Err(ClassifyError::NotClosed(reason));
    }
    Ok(SubAlgebra { members, kind })
}

/// `C(E)`, verified to be a Boolean sub-effect algebra.
pub fn central_elements(e: &EffectAlgebra) -> Result<SubAlgebra, ClassifyError> {
    let members = element_set(e.size(), e.elements().filter(|&a| is_central(e, a)));
    let view = e
        .restrict(&members)
        .map_err(|err| ClassifyError::NotClosed(err.to_string()))?;
    if !is_boolean(&view.algebra) {
        return Err(ClassifyError::NotClosed(
            "center is not a Boolean algebra".into(),
        ));
    }
    Ok(SubAlgebra {
        members,
        kind: SubAlgebraKind::Boolean,
    })
}

/// Finite form of "Sh(E) is a monotone σ-complete sub-effect algebra" for a
/// homogeneous `e`: sharp elements are closed under `'`, defined sums and
/// suprema of chains. The witness names the offending elements.
pub fn sharp_closure_check(e: &EffectAlgebra) -> Check {
    let sh = sharp_set(e);
    for a in sh.ones().map(Element) {
        if !sh.contains(e.complement(a).0) {
            return Check::fail(vec![a]);
        }
        for b in sh.ones().map(Element) {
            if let Some(s) = e.sum(a, b) {
                if !sh.contains(s.0) {
                    return Check::fail(vec![a, b]);
                }
            }
            // A two-element chain; longer finite chains reduce to this.
            if e.leq(a, b) && e.join(a, b).is_none_or(|j| !sh.contains(j.0)) {
                return Check::fail(vec![a, b]);
            }
        }
    }
    Check::pass()
}

/// `Sh(E)` of a homogeneous algebra, checked to be the largest
/// sub-orthoalgebra whose own sharp elements are sharp in `e`.
///
/// Maximality is tested against every sub-effect algebra generated by one
/// element and, for carriers up to 64 elements, by two elements.
pub fn orthoalgebraic_skeleton(e: &EffectAlgebra) -> Result<SubAlgebra, ClassifyError> {
    let homogeneous = is_homogeneous(e);
    if let Some(w) = homogeneous.witness() {
        return Err(ClassifyError::NotHomogeneous(w.to_vec()));
    }
    let sh = sharp_elements(e)?;
    let view = e
        .restrict(&sh.members)
        .map_err(|err| ClassifyError::NotClosed(err.to_string()))?;
    if let Some(w) = is_orthoalgebra(&view.algebra).witness() {
        return Err(ClassifyError::NotMaximal(format!(
            "Sh(E) is not an orthoalgebra: {} + {} is defined",
            e.label(view.to_parent(w[0])),
            e.label(view.to_parent(w[0]))
        )));
    }
    let mut seeds: Vec<Vec<Element>> = e.elements().map(|a| vec![a]).collect();
    if e.size() <= 64 {
        for a in e.elements() {
            for b in e.elements().skip(a.0 + 1) {
                seeds.push(vec![a, b]);
            }
        }
    }
    for seed in seeds {
        let sub = generated_subalgebra(e, &seed);
        if sub.is_subset(&sh.members) {
            continue;
        }
        let Ok(v) = e.restrict(&sub) else { continue };
        if !is_orthoalgebra(&v.algebra).holds() {
            continue;
        }
        let own_sharp_in_sh = v
            .algebra
            .elements()
            .filter(|&x| is_sharp(&v.algebra, x))
            .all(|x| sh.contains(v.to_parent(x)));
        if own_sharp_in_sh {
            let names: Vec<&str> = seed.iter().map(|&s| e.label(s)).collect();
            return Err(ClassifyError::NotMaximal(format!(
                "sub-orthoalgebra generated by {{{}}} escapes Sh(E)",
                names.join(", ")
            )));
        }
    }
    Ok(SubAlgebra {
        members: sh.members,
        kind: if sh.kind == SubAlgebraKind::Boolean {
            SubAlgebraKind::Boolean
        } else {
            SubAlgebraKind::SubOrthoalgebra
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{generate, GeneratorSpec};

    fn gen(text: &str) -> EffectAlgebra {
        generate(&GeneratorSpec::parse(text).unwrap()).unwrap()
    }

    #[test]
    fn boolean_is_everything() {
        let e = gen("boolean 3");
        let r = classify(&e);
        assert!(Flag::ALL.iter().all(|&f| r.get(f)), "{r:?}");
        assert!(r.witnesses.is_empty());
        assert!(is_boolean(&e));
    }

    #[test]
    fn chain_is_rdp_lattice_not_ortho() {
        let e = gen("mvchain 4");
        assert!(has_rdp(&e).holds());
        assert!(has_rip(&e).holds());
        assert!(is_lattice(&e).holds());
        assert!(is_homogeneous(&e).holds());
        assert_eq!(is_orthoalgebra(&gen("mvchain 2")).witness(), Some(&[Element(1)][..]));
    }

    #[test]
    fn horizontal_sum_of_booleans_fails_rdp() {
        let e = gen("hsum (boolean 2) (boolean 2)");
        let w = has_rdp(&e);
        let [a1, a2, b1, b2] = w.witness().unwrap() else { panic!() };
        assert_eq!(e.sum(*a1, *a2), e.sum(*b1, *b2));
        assert!(is_oml(&e).holds());
    }

    #[test]
    fn sharp_elements_of_chain_are_bounds() {
        let e = gen("mvchain 4");
        let sh = sharp_elements(&e).unwrap();
        assert_eq!(sh.elements().collect::<Vec<_>>(), vec![Element(0), Element(4)]);
        assert_eq!(sh.kind, SubAlgebraKind::Boolean);
        let sk = orthoalgebraic_skeleton(&e).unwrap();
        assert_eq!(sk.members, sh.members);
    }

    #[test]
    fn center_of_boolean_is_everything() {
        let e = gen("boolean 3");
        assert_eq!(central_elements(&e).unwrap().len(), 8);
        assert_eq!(orthoalgebraic_skeleton(&e).unwrap().len(), 8);
    }

    #[test]
    fn principal_and_central_in_product() {
        let e = gen("product (boolean 1) (mvchain 2)");
        // (1,0) splits the product; (0,1/2) is principal only if sums below stay below.
        let a = e.find("(1,0)").unwrap();
        assert!(is_central(&e, a));
        let half = e.find("(0,1/2)").unwrap();
        assert!(!is_principal(&e, half));
        let c = central_elements(&e).unwrap();
        assert_eq!(c.len(), 4);
    }

    #[test]
    fn generated_subalgebra_closes() {
        let e = gen("mvchain 4");
        let s = generated_subalgebra(&e, &[Element(2)]);
        assert_eq!(s.ones().collect::<Vec<_>>(), vec![0, 2, 4]);
        let s = generated_subalgebra(&e, &[Element(1)]);
        assert_eq!(s.count_ones(..), 5);
    }

    #[test]
    fn even_subset_rip_witness() {
        let e = gen("evenomp 8");
        assert!(is_omp(&e).holds());
        assert!(!is_oml(&e).holds());
        let rip = has_rip(&e);
        let names: Vec<&str> = rip.witness().unwrap().iter().map(|&a| e.label(a)).collect();
        assert_eq!(names, ["{1,2}", "{1,3}", "{1,2,3,4}", "{1,2,3,5}"]);
    }

    #[test]
    fn fano_is_orthoalgebra_not_omp() {
        let e = gen("fano");
        let r = classify(&e);
        assert!(r.get(Flag::IsOrthoalgebra));
        assert!(r.get(Flag::IsHomogeneous));
        assert!(!r.get(Flag::IsOmp));
        assert!(!r.get(Flag::HasRdp));
        assert!(r.broken_implications().is_empty());
        assert_eq!(sharp_elements(&e).unwrap().len(), 16);
    }
}
