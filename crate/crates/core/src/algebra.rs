//! The finite effect-algebra kernel.
//!
//! An [`EffectAlgebra`] is a dense `n × n` partial sum table over the carrier
//! `0..n` together with the designated zero and unit. Tables are only ever
//! constructed through [`validate`], which checks the four effect-algebra
//! axioms and then caches the derived order and orthosupplement.

use std::collections::HashMap;
use std::fmt;

use fixedbitset::FixedBitSet;
use thiserror::Error;

/// Marker stored in the sum table for undefined sums.
pub const UNDEFINED: u32 = u32::MAX;

/// An element of a finite effect algebra, identified by its carrier index.
///
/// Elements carry no reference to their algebra; every operation takes the
/// algebra explicitly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Element(pub usize);

impl Element {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A subset of the carrier.
pub type ElementSet = FixedBitSet;

/// An unvalidated sum table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawTable {
    size: usize,
    zero: usize,
    one: usize,
    cells: Vec<u32>,
    labels: Option<Vec<String>>,
}

impl RawTable {
    /// Creates a table with every sum undefined.
    ///
    /// Panics if `zero` or `one` is not below `size`.
    pub fn new(size: usize, zero: usize, one: usize) -> Self {
        assert!(size > 0, "carrier must be non-empty");
        assert!(zero < size && one < size, "zero/one out of range");
        RawTable {
            size,
            zero,
            one,
            cells: vec![UNDEFINED; size * size],
            labels: None,
        }
    }

    /// A table where `x + 0 = 0 + x = x` is already filled in.
    pub fn with_zero_sums(size: usize, zero: usize, one: usize) -> Self {
        let mut t = Self::new(size, zero, one);
        for a in 0..size {
            t.set_symmetric(a, zero, a);
        }
        t
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn zero(&self) -> usize {
        self.zero
    }

    pub fn one(&self) -> usize {
        self.one
    }

    pub fn get(&self, a: usize, b: usize) -> Option<usize> {
        let v = self.cells[a * self.size + b];
        (v != UNDEFINED).then_some(v as usize)
    }

    /// Sets `a + b = c` (one direction only).
    pub fn set(&mut self, a: usize, b: usize, c: usize) {
        self.cells[a * self.size + b] = c as u32;
    }

    /// Sets `a + b = b + a = c`.
    pub fn set_symmetric(&mut self, a: usize, b: usize, c: usize) {
        self.set(a, b, c);
        self.set(b, a, c);
    }

    pub fn clear(&mut self, a: usize, b: usize) {
        self.cells[a * self.size + b] = UNDEFINED;
    }

    pub fn set_labels(&mut self, labels: Vec<String>) {
        assert_eq!(labels.len(), self.size, "one label per element");
        self.labels = Some(labels);
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub(crate) fn cells(&self) -> &[u32] {
        &self.cells
    }
}

/// Identifies the axiom or derived law a table violates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    /// A sum refers to an element outside the carrier.
    Range,
    /// `a + 0 = a` fails.
    ZeroIdentity,
    /// `0 = 1` on a carrier with more than one element.
    ZeroNeOne,
    Commutativity,
    Associativity,
    UniqueComplement,
    Positivity,
    /// `a + c = b + c` with `a != b`.
    Cancellativity,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Axiom::Range => "range",
            Axiom::ZeroIdentity => "zero-identity",
            Axiom::ZeroNeOne => "zero-ne-one",
            Axiom::Commutativity => "commutativity",
            Axiom::Associativity => "associativity",
            Axiom::UniqueComplement => "unique-complement",
            Axiom::Positivity => "positivity",
            Axiom::Cancellativity => "cancellativity",
        };
        f.write_str(name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    AxiomViolation { axiom: Axiom, witness: Vec<Element> },
    /// The derived relation `a ≤ b ⇔ ∃c: a + c = b` is not antisymmetric.
    NonPoset { a: Element, b: Element },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::AxiomViolation { axiom, witness } => {
                let w: Vec<String> = witness.iter().map(|e| e.0.to_string()).collect();
                write!(f, "{axiom} violated at ({})", w.join(", "))
            }
            Violation::NonPoset { a, b } => {
                write!(f, "order not antisymmetric: {} <= {} <= {}", a.0, b.0, a.0)
            }
        }
    }
}

/// Every violated axiom of a rejected table, one witness each.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn violates(&self, axiom: Axiom) -> bool {
        self.violations
            .iter()
            .any(|v| matches!(v, Violation::AxiomViolation { axiom: a, .. } if *a == axiom))
    }

    pub fn is_non_poset(&self) -> bool {
        self.violations
            .iter()
            .any(|v| matches!(v, Violation::NonPoset { .. }))
    }

    pub fn witness(&self, axiom: Axiom) -> Option<&[Element]> {
        self.violations.iter().find_map(|v| match v {
            Violation::AxiomViolation { axiom: a, witness } if *a == axiom => {
                Some(witness.as_slice())
            }
            _ => None,
        })
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "invalid effect algebra: {}", parts.join("; "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OrderError {
    #[error("{a} is not below {b}; difference undefined")]
    NotComparable { a: Element, b: Element },
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SubsetError {
    #[error("subset is not a sub-effect algebra: {0}")]
    NotClosed(String),
}

/// Least upper and greatest lower bound of a pair, when they exist.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub join: Option<Element>,
    pub meet: Option<Element>,
}

/// A validated finite effect algebra with its cached order data.
#[derive(Clone, Debug)]
pub struct EffectAlgebra {
    size: usize,
    zero: usize,
    one: usize,
    table: Vec<u32>,
    labels: Vec<String>,
    complement: Vec<u32>,
    /// `upper[a] = {b : a ≤ b}`
    upper: Vec<ElementSet>,
    /// `lower[b] = {a : a ≤ b}`
    lower: Vec<ElementSet>,
}

impl PartialEq for EffectAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.size == other.size
            && self.zero == other.zero
            && self.one == other.one
            && self.table == other.table
    }
}

impl Eq for EffectAlgebra {}

fn default_labels(size: usize, zero: usize, one: usize) -> Vec<String> {
    (0..size)
        .map(|i| {
            if i == zero {
                "0".to_string()
            } else if i == one {
                "1".to_string()
            } else {
                format!("e{i}")
            }
        })
        .collect()
}

/// Checks every axiom on a raw table.
///
/// On success the derived order, complement and difference data are cached in
/// the returned algebra. On failure the report lists one witness per violated
/// axiom.
pub fn validate(raw: &RawTable) -> Result<EffectAlgebra, ValidationReport> {
    let n = raw.size;
    let zero = raw.zero;
    let one = raw.one;
    let cells = raw.cells();
    let mut violations = Vec::new();
    let mut push = |axiom: Axiom, witness: &[usize]| {
        let already = violations
            .iter()
            .any(|v| matches!(v, Violation::AxiomViolation { axiom: a, .. } if *a == axiom));
        if !already {
            violations.push(Violation::AxiomViolation {
                axiom,
                witness: witness.iter().map(|&i| Element(i)).collect(),
            });
        }
    };

    if let Some(pos) = cells.iter().position(|&v| v != UNDEFINED && v as usize >= n) {
        push(Axiom::Range, &[pos / n, pos % n]);
        return Err(ValidationReport { violations });
    }
    let get = |a: usize, b: usize| -> Option<usize> {
        let v = cells[a * n + b];
        (v != UNDEFINED).then_some(v as usize)
    };

    if n > 1 && zero == one {
        push(Axiom::ZeroNeOne, &[zero]);
    }
    for a in 0..n {
        if get(a, zero) != Some(a) || get(zero, a) != Some(a) {
            push(Axiom::ZeroIdentity, &[a]);
        }
    }
    for a in 0..n {
        for b in 0..n {
            if get(a, b) != get(b, a) {
                push(Axiom::Commutativity, &[a, b]);
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            let ab = get(a, b);
            for c in 0..n {
                let left = ab.and_then(|ab| get(ab, c));
                let right = get(b, c).and_then(|bc| get(a, bc));
                if left != right {
                    push(Axiom::Associativity, &[a, b, c]);
                }
            }
        }
    }
    let mut complement = vec![UNDEFINED; n];
    for a in 0..n {
        let mut found = (0..n).filter(|&b| get(a, b) == Some(one));
        match (found.next(), found.next()) {
            (Some(b), None) => complement[a] = b as u32,
            (None, _) => push(Axiom::UniqueComplement, &[a]),
            (Some(b), Some(c)) => push(Axiom::UniqueComplement, &[a, b, c]),
        }
    }
    for a in 0..n {
        if a != zero && get(a, one).is_some() {
            push(Axiom::Positivity, &[a, one]);
        }
    }
    for c in 0..n {
        let mut seen: HashMap<usize, usize> = HashMap::new();
        for a in 0..n {
            if let Some(s) = get(a, c) {
                if let Some(&b) = seen.get(&s) {
                    push(Axiom::Cancellativity, &[b, a, c]);
                } else {
                    seen.insert(s, a);
                }
            }
        }
    }

    let mut upper = vec![FixedBitSet::with_capacity(n); n];
    let mut lower = vec![FixedBitSet::with_capacity(n); n];
    for a in 0..n {
        for c in 0..n {
            if let Some(b) = get(a, c) {
                upper[a].insert(b);
                lower[b].insert(a);
            }
        }
    }
    'outer: for a in 0..n {
        for b in upper[a].ones() {
            if b != a && upper[b].contains(a) {
                violations.push(Violation::NonPoset {
                    a: Element(a),
                    b: Element(b),
                });
                break 'outer;
            }
        }
    }

    if !violations.is_empty() {
        return Err(ValidationReport { violations });
    }
    let labels = raw
        .labels
        .clone()
        .unwrap_or_else(|| default_labels(n, zero, one));
    Ok(EffectAlgebra {
        size: n,
        zero,
        one,
        table: cells.to_vec(),
        labels,
        complement,
        upper,
        lower,
    })
}

impl EffectAlgebra {
    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn zero(&self) -> Element {
        Element(self.zero)
    }

    #[inline]
    pub fn one(&self) -> Element {
        Element(self.one)
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        (0..self.size).map(Element)
    }

    #[inline]
    pub fn sum(&self, a: Element, b: Element) -> Option<Element> {
        let v = self.table[a.0 * self.size + b.0];
        (v != UNDEFINED).then_some(Element(v as usize))
    }

    #[inline]
    pub fn is_summable(&self, a: Element, b: Element) -> bool {
        self.table[a.0 * self.size + b.0] != UNDEFINED
    }

    #[inline]
    pub fn leq(&self, a: Element, b: Element) -> bool {
        self.upper[a.0].contains(b.0)
    }

    #[inline]
    pub fn complement(&self, a: Element) -> Element {
        Element(self.complement[a.0] as usize)
    }

    /// `b − a`, the unique `c` with `a + c = b`.
    pub fn diff(&self, b: Element, a: Element) -> Result<Element, OrderError> {
        if !self.leq(a, b) {
            return Err(OrderError::NotComparable { a, b });
        }
        let c = self
            .sum(self.complement(b), a)
            .expect("a ≤ b implies b' + a is defined");
        Ok(self.complement(c))
    }

    /// `{b : a ≤ b}`
    pub fn upper_set(&self, a: Element) -> &ElementSet {
        &self.upper[a.0]
    }

    /// `{b : b ≤ a}`
    pub fn lower_set(&self, a: Element) -> &ElementSet {
        &self.lower[a.0]
    }

    /// Sum of a finite multiset, or `None` when the family is not summable.
    pub fn sum_family(&self, members: &[Element]) -> Option<Element> {
        members
            .iter()
            .try_fold(self.zero(), |acc, &m| self.sum(acc, m))
    }

    pub fn join(&self, a: Element, b: Element) -> Option<Element> {
        let mut common = self.upper[a.0].clone();
        common.intersect_with(&self.upper[b.0]);
        common
            .ones()
            .find(|&u| common.is_subset(&self.upper[u]))
            .map(Element)
    }

    pub fn meet(&self, a: Element, b: Element) -> Option<Element> {
        let mut common = self.lower[a.0].clone();
        common.intersect_with(&self.lower[b.0]);
        common
            .ones()
            .find(|&l| common.is_subset(&self.lower[l]))
            .map(Element)
    }

    pub fn joins_meets(&self, a: Element, b: Element) -> Bounds {
        Bounds {
            join: self.join(a, b),
            meet: self.meet(a, b),
        }
    }

    pub fn label(&self, a: Element) -> &str {
        &self.labels[a.0]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn find(&self, label: &str) -> Option<Element> {
        self.labels.iter().position(|l| l == label).map(Element)
    }

    pub fn empty_set(&self) -> ElementSet {
        FixedBitSet::with_capacity(self.size)
    }

    pub fn full_set(&self) -> ElementSet {
        let mut s = self.empty_set();
        s.insert_range(..);
        s
    }

    /// Copies the table back out, e.g. for relabeling or serialization.
    pub fn to_raw(&self) -> RawTable {
        RawTable {
            size: self.size,
            zero: self.zero,
            one: self.one,
            cells: self.table.clone(),
            labels: Some(self.labels.clone()),
        }
    }

    /// The induced effect algebra on a sub-effect algebra `members`.
    ///
    /// `members` must contain 0 and 1 and be closed under `'` and under every
    /// sum defined in `self`.
    pub fn restrict(&self, members: &ElementSet) -> Result<SubView, SubsetError> {
        if !members.contains(self.zero) || !members.contains(self.one) {
            return Err(SubsetError::NotClosed("missing 0 or 1".into()));
        }
        let embedding: Vec<Element> = members.ones().map(Element).collect();
        for &a in &embedding {
            if !members.contains(self.complement(a).0) {
                return Err(SubsetError::NotClosed(format!(
                    "complement of {} missing",
                    self.label(a)
                )));
            }
            for &b in &embedding {
                if let Some(s) = self.sum(a, b) {
                    if !members.contains(s.0) {
                        return Err(SubsetError::NotClosed(format!(
                            "{} + {} = {} missing",
                            self.label(a),
                            self.label(b),
                            self.label(s)
                        )));
                    }
                }
            }
        }
        let mut position = vec![usize::MAX; self.size];
        for (i, e) in embedding.iter().enumerate() {
            position[e.0] = i;
        }
        let m = embedding.len();
        let mut raw = RawTable::new(m, position[self.zero], position[self.one]);
        for (i, &a) in embedding.iter().enumerate() {
            for (j, &b) in embedding.iter().enumerate() {
                if let Some(s) = self.sum(a, b) {
                    raw.set(i, j, position[s.0]);
                }
            }
        }
        raw.set_labels(embedding.iter().map(|&e| self.label(e).to_string()).collect());
        let algebra = validate(&raw)
            .map_err(|r| SubsetError::NotClosed(format!("restriction invalid: {r}")))?;
        Ok(SubView {
            algebra,
            embedding,
            position,
        })
    }
}

/// A sub-effect algebra re-indexed as an algebra of its own.
#[derive(Clone, Debug)]
pub struct SubView {
    pub algebra: EffectAlgebra,
    /// Sub-index to parent element.
    pub embedding: Vec<Element>,
    position: Vec<usize>,
}

impl SubView {
    pub fn to_parent(&self, e: Element) -> Element {
        self.embedding[e.0]
    }

    pub fn from_parent(&self, e: Element) -> Option<Element> {
        self.position
            .get(e.0)
            .copied()
            .filter(|&p| p != usize::MAX)
            .map(Element)
    }
}

/// Builds a set from an element iterator.
pub fn element_set(size: usize, items: impl IntoIterator<Item = Element>) -> ElementSet {
    let mut s = FixedBitSet::with_capacity(size);
    for e in items {
        s.insert(e.0);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_element() -> RawTable {
        let mut t = RawTable::with_zero_sums(2, 0, 1);
        t.set_symmetric(0, 1, 1);
        t
    }

    fn chain(n: usize) -> EffectAlgebra {
        let mut t = RawTable::new(n + 1, 0, n);
        for a in 0..=n {
            for b in 0..=n - a {
                t.set(a, b, a + b);
            }
        }
        validate(&t).unwrap()
    }

    #[test]
    fn smallest_algebra_is_valid() {
        let e = validate(&two_element()).unwrap();
        assert_eq!(e.size(), 2);
        assert_eq!(e.complement(e.zero()), e.one());
        assert!(e.leq(e.zero(), e.one()));
    }

    #[test]
    fn three_chain_with_self_complement() {
        let e = chain(2);
        assert_eq!(e.complement(Element(1)), Element(1));
        assert_eq!(e.sum(Element(1), Element(1)), Some(Element(2)));
    }

    #[test]
    fn idempotent_sum_breaks_cancellativity() {
        let mut t = RawTable::with_zero_sums(3, 0, 2);
        t.set(1, 1, 1);
        let report = validate(&t).unwrap_err();
        assert!(report.violates(Axiom::Cancellativity));
        assert!(report.violates(Axiom::UniqueComplement));
    }

    #[test]
    fn asymmetric_table_is_rejected() {
        let mut t = two_element();
        t.clear(1, 0);
        let report = validate(&t).unwrap_err();
        assert!(report.violates(Axiom::Commutativity));
        assert!(report.violates(Axiom::ZeroIdentity));
    }

    #[test]
    fn positivity_violation_has_witness() {
        // 0, a, 1 with a + 1 = 1 defined.
        let mut t = RawTable::with_zero_sums(3, 0, 2);
        t.set_symmetric(1, 2, 2);
        let report = validate(&t).unwrap_err();
        assert_eq!(report.witness(Axiom::Positivity), Some(&[Element(1), Element(2)][..]));
    }

    #[test]
    fn chain_difference_matches_complement_formula() {
        let e = chain(4);
        assert_eq!(e.complement(Element(1)), Element(3));
        let d = e.diff(Element(3), Element(1)).unwrap();
        assert_eq!(d, Element(2));
        let via = e.complement(e.sum(e.complement(Element(3)), Element(1)).unwrap());
        assert_eq!(via, Element(2));
        assert_eq!(e.sum(d, Element(1)), Some(Element(3)));
        assert!(matches!(
            e.diff(Element(1), Element(3)),
            Err(OrderError::NotComparable { .. })
        ));
    }

    #[test]
    fn family_sums_in_chain() {
        let e = chain(2);
        let x = Element(1);
        assert_eq!(e.sum_family(&[x, x]), Some(e.one()));
        assert_eq!(e.sum_family(&[x, x, x]), None);
        assert_eq!(e.sum_family(&[]), Some(e.zero()));
    }

    #[test]
    fn chain_joins_are_max() {
        let e = chain(4);
        let b = e.joins_meets(Element(1), Element(3));
        assert_eq!(b.join, Some(Element(3)));
        assert_eq!(b.meet, Some(Element(1)));
    }

    #[test]
    fn restrict_requires_closure() {
        let e = chain(4);
        let half = element_set(5, [Element(0), Element(2), Element(4)]);
        let view = e.restrict(&half).unwrap();
        assert_eq!(view.algebra.size(), 3);
        assert_eq!(view.to_parent(Element(1)), Element(2));
        let broken = element_set(5, [Element(0), Element(1), Element(4)]);
        assert!(e.restrict(&broken).is_err());
    }
}
