//! Compatibility: decompositions, internally compatible sets, blocks,
//! maximal Boolean sub-orthoalgebras and commutants.

use std::collections::{BTreeSet, HashSet};

use thiserror::Error;

use crate::algebra::{element_set, EffectAlgebra, Element, ElementSet};
use crate::classify::{
    generated_subalgebra, has_rdp, has_rip, is_boolean, is_homogeneous, is_omp,
    is_orthoalgebra, SubAlgebra, SubAlgebraKind,
};

pub const DEFAULT_BUDGET: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CompatError {
    #[error("search budget of {budget} nodes exceeded")]
    SearchBudgetExceeded { budget: u64 },
    #[error("algebra is not homogeneous (witness {0:?})")]
    NotHomogeneous(Vec<Element>),
    #[error("algebra is not an orthoalgebra (witness {0:?})")]
    NotOrthoalgebra(Vec<Element>),
    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),
    #[error("subset not closed: {0}")]
    NotClosed(String),
    #[error("equivalence broken: {0}")]
    EquivalenceBroken(String),
}

/// `a = a1 + c`, `b = b1 + c`, with `a1 + b1 + c` defined.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub a1: Element,
    pub b1: Element,
    pub c: Element,
}

fn decompositions(
    e: &EffectAlgebra,
    a: Element,
    b: Element,
) -> impl Iterator<Item = Decomposition> + '_ {
    let mut common = e.lower_set(a).clone();
    common.intersect_with(e.lower_set(b));
    common.ones().collect::<Vec<_>>().into_iter().map(Element).filter_map(move |c| {
        let a1 = e.diff(a, c).ok()?;
        let b1 = e.diff(b, c).ok()?;
        e.sum_family(&[a1, b1, c])?;
        Some(Decomposition { a1, b1, c })
    })
}

/// Compatibility witness with the smallest `c` in carrier order.
pub fn are_compatible(e: &EffectAlgebra, a: Element, b: Element) -> Option<Decomposition> {
    decompositions(e, a, b).next()
}

/// As [`are_compatible`], additionally requiring `a1 ∧ b1 = 0`.
pub fn are_strongly_compatible(
    e: &EffectAlgebra,
    a: Element,
    b: Element,
) -> Option<Decomposition> {
    decompositions(e, a, b).find(|d| e.meet(d.a1, d.b1) == Some(e.zero()))
}

/// Subsums of a summable sequence, as a set.
fn extend_subsums(e: &EffectAlgebra, subsums: &ElementSet, x: Element) -> ElementSet {
    let mut next = subsums.clone();
    for s in subsums.ones().map(Element) {
        next.insert(e.sum(s, x).expect("subfamily of a summable family").0);
    }
    next
}

/// Depth-first search for a summable sequence drawn from `pool` whose
/// subsums cover `targets`. Sequences are explored as multisets (indices
/// non-decreasing) and pruned on repeated subsum sets.
fn refines_through(
    e: &EffectAlgebra,
    targets: &ElementSet,
    pool: &[Element],
    budget: u64,
) -> Result<bool, CompatError> {
    struct Search<'a> {
        e: &'a EffectAlgebra,
        targets: &'a ElementSet,
        pool: &'a [Element],
        seen: HashSet<ElementSet>,
        nodes: u64,
        budget: u64,
    }

    impl Search<'_> {
        fn go(&mut self, start: usize, total: Element, subsums: ElementSet) -> Result<bool, CompatError> {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(CompatError::SearchBudgetExceeded {
                    budget: self.budget,
                });
            }
            if self.targets.is_subset(&subsums) {
                return Ok(true);
            }
            if !self.seen.insert(subsums.clone()) {
                return Ok(false);
            }
            for i in start..self.pool.len() {
                let x = self.pool[i];
                let Some(t) = self.e.sum(total, x) else { continue };
                let next = extend_subsums(self.e, &subsums, x);
                if self.go(i, t, next)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
    }

    let pool: Vec<Element> = pool.iter().copied().filter(|&x| x != e.zero()).collect();
    let mut search = Search {
        e,
        targets,
        pool: &pool,
        seen: HashSet::new(),
        nodes: 0,
        budget,
    };
    search.go(0, e.zero(), element_set(e.size(), [e.zero()]))
}

/// Every finite subset of `m` is a family of subsums of one summable
/// sequence taken from `m`. For finite `m` it suffices to refine `m` itself.
pub fn is_internally_compatible(
    e: &EffectAlgebra,
    m: &ElementSet,
    budget: u64,
) -> Result<bool, CompatError> {
    let pool: Vec<Element> = m.ones().map(Element).collect();
    refines_through(e, m, &pool, budget)
}

/// As [`is_internally_compatible`] but the refining sequence may use any
/// element of `e`.
pub fn is_compatible_set(
    e: &EffectAlgebra,
    m: &ElementSet,
    budget: u64,
) -> Result<bool, CompatError> {
    let pool: Vec<Element> = e.elements().collect();
    refines_through(e, m, &pool, budget)
}

/// Every partition of unity as a multiset of nonzero elements, sorted by
/// carrier index.
pub fn partitions_of_unity(
    e: &EffectAlgebra,
    budget: u64,
) -> Result<Vec<Vec<Element>>, CompatError> {
    fn go(
        e: &EffectAlgebra,
        start: usize,
        total: Element,
        parts: &mut Vec<Element>,
        out: &mut Vec<Vec<Element>>,
        nodes: &mut u64,
        budget: u64,
    ) -> Result<(), CompatError> {
        *nodes += 1;
        if *nodes > budget {
            return Err(CompatError::SearchBudgetExceeded { budget });
        }
        if total == e.one() {
            out.push(parts.clone());
            return Ok(());
        }
        for x in (start..e.size()).map(Element) {
            if x == e.zero() {
                continue;
            }
            let Some(t) = e.sum(total, x) else { continue };
            parts.push(x);
            go(e, x.0, t, parts, out, nodes, budget)?;
            parts.pop();
        }
        Ok(())
    }

    let mut out = Vec::new();
    go(e, 0, e.zero(), &mut Vec::new(), &mut out, &mut 0, budget)?;
    Ok(out)
}

/// Subsum sets `R(c)` of every partition of unity `c` (a summable multiset
/// of nonzero elements with sum 1), deduplicated and sorted.
pub fn partition_ranges(e: &EffectAlgebra, budget: u64) -> Result<Vec<ElementSet>, CompatError> {
    fn go(
        e: &EffectAlgebra,
        start: usize,
        total: Element,
        subsums: ElementSet,
        out: &mut HashSet<ElementSet>,
        nodes: &mut u64,
        budget: u64,
    ) -> Result<(), CompatError> {
        *nodes += 1;
        if *nodes > budget {
            return Err(CompatError::SearchBudgetExceeded { budget });
        }
        if total == e.one() {
            out.insert(subsums);
            return Ok(());
        }
        for x in (start..e.size()).map(Element) {
            if x == e.zero() {
                continue;
            }
            let Some(t) = e.sum(total, x) else { continue };
            let next = extend_subsums(e, &subsums, x);
            go(e, x.0, t, next, out, nodes, budget)?;
        }
        Ok(())
    }

    let mut out = HashSet::new();
    let mut nodes = 0;
    let start = element_set(e.size(), [e.zero()]);
    go(e, 0, e.zero(), start, &mut out, &mut nodes, budget)?;
    Ok(sorted_sets(out))
}

fn sorted_sets(sets: impl IntoIterator<Item = ElementSet>) -> Vec<ElementSet> {
    let mut v: Vec<ElementSet> = sets.into_iter().collect();
    v.sort_by_cached_key(|s| s.ones().collect::<Vec<_>>());
    v
}

fn inclusion_maximal(sets: &[ElementSet]) -> Vec<ElementSet> {
    sets.iter()
        .filter(|s| !sets.iter().any(|t| t != *s && s.is_subset(t)))
        .cloned()
        .collect()
}

/// Blocks of a homogeneous algebra: the maximal internally compatible
/// subsets containing 1.
///
/// A finite internally compatible set containing 1 lies inside the subsum
/// set of a partition of unity drawn from it, and such subsum sets are
/// internally compatible, so the blocks are exactly the inclusion-maximal
/// partition ranges. Each block is checked to be a sub-effect algebra with
/// RDP, and the blocks are checked to cover the carrier.
pub fn blocks(e: &EffectAlgebra, budget: u64) -> Result<Vec<SubAlgebra>, CompatError> {
    if let Some(w) = is_homogeneous(e).witness() {
        return Err(CompatError::NotHomogeneous(w.to_vec()));
    }
    let maximal = inclusion_maximal(&partition_ranges(e, budget)?);
    let mut cover = e.empty_set();
    let mut out = Vec::with_capacity(maximal.len());
    for members in maximal {
        let view = e
            .restrict(&members)
            .map_err(|err| CompatError::NotClosed(err.to_string()))?;
        if let Some(w) = has_rdp(&view.algebra).witness() {
            let w: Vec<Element> = w.iter().map(|&x| view.to_parent(x)).collect();
            return Err(CompatError::NotClosed(format!("block without RDP, witness {w:?}")));
        }
        cover.union_with(&members);
        out.push(SubAlgebra {
            members,
            kind: SubAlgebraKind::Block,
        });
    }
    if cover != e.full_set() {
        return Err(CompatError::NotClosed("blocks do not cover the carrier".into()));
    }
    Ok(out)
}

/// Maximal sub-orthoalgebras that are Boolean in their own right.
///
/// Found by closure search independent of [`blocks`]: starting from
/// `{0, 1}`, every Boolean subalgebra is extended by one element and
/// re-closed; Boolean results are kept. Any Boolean `B ⊂ B'` is reachable
/// this way by splitting one atom of `B` at a time. Join agreement between
/// each discovered Boolean subalgebra and its maximal supersets is checked.
pub fn maximal_boolean_subortho(e: &EffectAlgebra) -> Result<Vec<SubAlgebra>, CompatError> {
    if let Some(w) = is_orthoalgebra(e).witness() {
        return Err(CompatError::NotOrthoalgebra(w.to_vec()));
    }
    let all = boolean_subalgebras(e);
    let maximal = inclusion_maximal(&all);

    let mut cover = e.empty_set();
    for m in &maximal {
        cover.union_with(m);
    }
    if cover != e.full_set() {
        return Err(CompatError::NotClosed(
            "maximal Boolean sub-orthoalgebras do not cover the carrier".into(),
        ));
    }
    for b in &all {
        let vb = e.restrict(b).expect("closed by construction");
        for m in maximal.iter().filter(|m| b.is_subset(m)) {
            let vm = e.restrict(m).expect("closed by construction");
            for x in b.ones().map(Element) {
                for y in b.ones().map(Element) {
                    let in_b = vb
                        .algebra
                        .join(vb.from_parent(x).unwrap(), vb.from_parent(y).unwrap())
                        .map(|j| vb.to_parent(j));
                    let in_m = vm
                        .algebra
                        .join(vm.from_parent(x).unwrap(), vm.from_parent(y).unwrap())
                        .map(|j| vm.to_parent(j));
                    if in_b != in_m {
                        return Err(CompatError::EquivalenceBroken(format!(
                            "join of {} and {} differs between nested Boolean subalgebras",
                            e.label(x),
                            e.label(y)
                        )));
                    }
                }
            }
        }
    }
    Ok(maximal
        .into_iter()
        .map(|members| SubAlgebra {
            members,
            kind: SubAlgebraKind::Boolean,
        })
        .collect())
}

/// Every Boolean sub-orthoalgebra, sorted.
pub fn boolean_subalgebras(e: &EffectAlgebra) -> Vec<ElementSet> {
    let base = generated_subalgebra(e, &[]);
    let mut seen: HashSet<ElementSet> = HashSet::from([base.clone()]);
    let mut found = vec![base.clone()];
    let mut stack = vec![base];
    while let Some(b) = stack.pop() {
        let seeds: Vec<Element> = b.ones().map(Element).collect();
        for x in e.elements().filter(|x| !b.contains(x.0)) {
            let mut gen_seeds = seeds.clone();
            gen_seeds.push(x);
            let c = generated_subalgebra(e, &gen_seeds);
            if seen.contains(&c) {
                continue;
            }
            seen.insert(c.clone());
            let boolean = e.restrict(&c).is_ok_and(|v| is_boolean(&v.algebra));
            if boolean {
                found.push(c.clone());
                stack.push(c);
            }
        }
    }
    sorted_sets(found)
}

/// `B(a)`: the elements strongly compatible with `a`, on an orthoalgebra
/// with RIP. Checked to be a sub-orthoalgebra that is an OMP.
pub fn commutant(e: &EffectAlgebra, a: Element) -> Result<SubAlgebra, CompatError> {
    if !is_orthoalgebra(e).holds() {
        return Err(CompatError::HypothesisFailed("orthoalgebra".into()));
    }
    if !has_rip(e).holds() {
        return Err(CompatError::HypothesisFailed("rip".into()));
    }
    let members = element_set(
        e.size(),
        e.elements().filter(|&b| are_strongly_compatible(e, a, b).is_some()),
    );
    for must in [e.zero(), e.one(), a] {
        if !members.contains(must.0) {
            return Err(CompatError::NotClosed(format!(
                "commutant misses {}",
                e.label(must)
            )));
        }
    }
    let view = e
        .restrict(&members)
        .map_err(|err| CompatError::NotClosed(err.to_string()))?;
    if !is_omp(&view.algebra).holds() {
        return Err(CompatError::NotClosed("commutant is not an OMP".into()));
    }
    Ok(SubAlgebra {
        members,
        kind: SubAlgebraKind::SubOrthoalgebra,
    })
}

/// The four compatibility clauses for one pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub strongly_compatible: bool,
    pub compatible: bool,
    pub in_observable_range: bool,
    pub in_boolean_subalgebra: bool,
    /// When `a + b` is defined: whether `a ∨ b` exists and equals it.
    pub sum_is_join: Option<bool>,
}

impl EquivalenceReport {
    pub fn agrees(&self) -> bool {
        let c = [
            self.strongly_compatible,
            self.compatible,
            self.in_observable_range,
            self.in_boolean_subalgebra,
        ];
        c.iter().all(|&x| x == c[0]) && self.sum_is_join != Some(false)
    }
}

/// Precomputed ranges and Boolean subalgebras of an RIP orthoalgebra, for
/// checking many pairs.
pub struct CompatContext<'a> {
    e: &'a EffectAlgebra,
    ranges: Vec<ElementSet>,
    booleans: Vec<ElementSet>,
}

impl<'a> CompatContext<'a> {
    pub fn new(e: &'a EffectAlgebra, budget: u64) -> Result<Self, CompatError> {
        if !is_orthoalgebra(e).holds() {
            return Err(CompatError::HypothesisFailed("orthoalgebra".into()));
        }
        if !has_rip(e).holds() {
            return Err(CompatError::HypothesisFailed("rip".into()));
        }
        let ranges = inclusion_maximal(&partition_ranges(e, budget)?);
        let booleans = inclusion_maximal(&boolean_subalgebras(e));
        Ok(CompatContext { e, ranges, booleans })
    }

    pub fn evaluate(&self, a: Element, b: Element) -> EquivalenceReport {
        let e = self.e;
        let both = |s: &ElementSet| s.contains(a.0) && s.contains(b.0);
        EquivalenceReport {
            strongly_compatible: are_strongly_compatible(e, a, b).is_some(),
            compatible: are_compatible(e, a, b).is_some(),
            in_observable_range: self.ranges.iter().any(both),
            in_boolean_subalgebra: self.booleans.iter().any(both),
            sum_is_join: e.sum(a, b).map(|s| e.join(a, b) == Some(s)),
        }
    }

    pub fn check(&self, a: Element, b: Element) -> Result<EquivalenceReport, CompatError> {
        let r = self.evaluate(a, b);
        if r.agrees() {
            Ok(r)
        } else {
            Err(CompatError::EquivalenceBroken(format!(
                "{} / {}: {r:?}",
                self.e.label(a),
                self.e.label(b)
            )))
        }
    }
}

/// Evaluates strong compatibility, compatibility, joint membership in the
/// range of an observable and in a Boolean sub-orthoalgebra, and checks
/// that all four agree.
pub fn check_compat_equivalences(
    e: &EffectAlgebra,
    a: Element,
    b: Element,
) -> Result<EquivalenceReport, CompatError> {
    CompatContext::new(e, DEFAULT_BUDGET)?.check(a, b)
}

/// First pair (in carrier order) that is compatible but not strongly
/// compatible.
pub fn compatible_not_strongly(e: &EffectAlgebra) -> Option<(Element, Element)> {
    e.elements()
        .flat_map(|a| e.elements().skip(a.0).map(move |b| (a, b)))
        .find(|&(a, b)| {
            are_compatible(e, a, b).is_some() && are_strongly_compatible(e, a, b).is_none()
        })
}

/// Members of every block, as sorted label lists.
pub fn describe(e: &EffectAlgebra, sets: &[SubAlgebra]) -> Vec<Vec<String>> {
    sets.iter()
        .map(|s| s.elements().map(|x| e.label(x).to_string()).collect())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}
