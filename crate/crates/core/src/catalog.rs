//! Named constructions and the isomorphism-reduced enumerator of small
//! effect algebras.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::{validate, EffectAlgebra, Element, RawTable, ValidationReport, UNDEFINED};

/// Default upper bound on `enumerate_small`'s `max_size`.
pub const DEFAULT_ENUMERATION_CAP: usize = 8;

/// Points of the Fano plane are `1..=7`; these are its lines.
pub const FANO_LINES: [[usize; 3]; 7] = [
    [1, 2, 4],
    [2, 3, 5],
    [3, 4, 6],
    [4, 5, 7],
    [5, 6, 1],
    [6, 7, 2],
    [7, 1, 3],
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeneratorSpec {
    /// The Boolean algebra of subsets of an `n`-set.
    Boolean(usize),
    /// The chain `{0, 1, …, n}` with `a + b` defined iff `a + b ≤ n`.
    MvChain(usize),
    Product(Vec<GeneratorSpec>),
    /// Summands glued at 0 and 1 only.
    HorizontalSum(Vec<GeneratorSpec>),
    /// The 16-element orthoalgebra whose blocks are the lines of the Fano plane.
    Fano,
    /// Even-cardinality subsets of an `m`-set, `a + b = a ∪ b` for disjoint sets.
    EvenSubsetOmp(usize),
    Raw(RawTable),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("invalid generator: {0}")]
    InvalidSpec(String),
    #[error("generated table failed validation: {0}")]
    Validation(#[from] ValidationReport),
    #[error("enumeration size {requested} exceeds the cap {cap}")]
    CapExceeded { requested: usize, cap: usize },
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(f: &mut fmt::Formatter<'_>, head: &str, items: &[GeneratorSpec]) -> fmt::Result {
            f.write_str(head)?;
            for item in items {
                write!(f, " ({item})")?;
            }
            Ok(())
        }
        match self {
            GeneratorSpec::Boolean(n) => write!(f, "boolean {n}"),
            GeneratorSpec::MvChain(n) => write!(f, "mvchain {n}"),
            GeneratorSpec::Product(items) => list(f, "product", items),
            GeneratorSpec::HorizontalSum(items) => list(f, "hsum", items),
            GeneratorSpec::Fano => f.write_str("fano"),
            GeneratorSpec::EvenSubsetOmp(m) => write!(f, "evenomp {m}"),
            GeneratorSpec::Raw(t) => write!(f, "raw <{} elements>", t.size()),
        }
    }
}

/// The named examples used by the property suites, in generator syntax.
pub const CATALOG: [&str; 21] = [
    "boolean 1",
    "boolean 2",
    "boolean 3",
    "boolean 4",
    "mvchain 1",
    "mvchain 2",
    "mvchain 3",
    "mvchain 4",
    "mvchain 5",
    "mvchain 6",
    "mvchain 8",
    "product (boolean 1) (mvchain 2)",
    "product (mvchain 2) (mvchain 3)",
    "hsum (boolean 2) (boolean 2)",
    "hsum (boolean 2) (boolean 3)",
    "hsum (boolean 2) (mvchain 2)",
    "hsum (boolean 2) (boolean 2) (boolean 2)",
    "fano",
    "evenomp 4",
    "evenomp 6",
    "evenomp 8",
];

/// `CATALOG`, generated.
pub fn catalog_algebras() -> Vec<(String, EffectAlgebra)> {
    CATALOG
        .iter()
        .map(|text| {
            let spec = GeneratorSpec::parse(text).expect("catalog entries parse");
            (text.to_string(), generate(&spec).expect("catalog entries generate"))
        })
        .collect()
}

impl GeneratorSpec {
    /// Parses the textual generator syntax, e.g. `hsum (boolean 2) (mvchain 2)`.
    pub fn parse(text: &str) -> Result<GeneratorSpec, CatalogError> {
        let tokens = tokenize(text);
        let mut pos = 0;
        let spec = parse_spec(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(CatalogError::InvalidSpec(format!(
                "unexpected `{}` after generator",
                tokens[pos]
            )));
        }
        Ok(spec)
    }
}

fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for ch in text.chars() {
        match ch {
            '(' | ')' => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
                out.push(ch.to_string());
            }
            c if c.is_whitespace() => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn parse_spec(tokens: &[String], pos: &mut usize) -> Result<GeneratorSpec, CatalogError> {
    let head = tokens
        .get(*pos)
        .ok_or_else(|| CatalogError::InvalidSpec("empty generator".into()))?;
    *pos += 1;
    let number = |pos: &mut usize| -> Result<usize, CatalogError> {
        let tok = tokens
            .get(*pos)
            .ok_or_else(|| CatalogError::InvalidSpec(format!("`{head}` needs a size")))?;
        *pos += 1;
        tok.parse()
            .map_err(|_| CatalogError::InvalidSpec(format!("`{tok}` is not a size")))
    };
    match head.as_str() {
        "boolean" => Ok(GeneratorSpec::Boolean(number(pos)?)),
        "mvchain" => Ok(GeneratorSpec::MvChain(number(pos)?)),
        "evenomp" => Ok(GeneratorSpec::EvenSubsetOmp(number(pos)?)),
        "fano" => Ok(GeneratorSpec::Fano),
        "hsum" | "product" => {
            let mut items = Vec::new();
            while tokens.get(*pos).map(String::as_str) == Some("(") {
                *pos += 1;
                items.push(parse_spec(tokens, pos)?);
                if tokens.get(*pos).map(String::as_str) != Some(")") {
                    return Err(CatalogError::InvalidSpec("missing `)`".into()));
                }
                *pos += 1;
            }
            if items.is_empty() {
                return Err(CatalogError::InvalidSpec(format!(
                    "`{head}` needs parenthesized operands"
                )));
            }
            Ok(if head == "hsum" {
                GeneratorSpec::HorizontalSum(items)
            } else {
                GeneratorSpec::Product(items)
            })
        }
        other => Err(CatalogError::InvalidSpec(format!("unknown generator `{other}`"))),
    }
}

/// Builds and validates the algebra described by `spec`.
pub fn generate(spec: &GeneratorSpec) -> Result<EffectAlgebra, CatalogError> {
    let raw = match spec {
        GeneratorSpec::Boolean(n) => boolean_table(*n)?,
        GeneratorSpec::MvChain(n) => mv_chain_table(*n)?,
        GeneratorSpec::Product(items) => {
            if items.is_empty() {
                return Err(CatalogError::InvalidSpec("empty product".into()));
            }
            let parts = items.iter().map(generate).collect::<Result<Vec<_>, _>>()?;
            product_table(&parts)?
        }
        GeneratorSpec::HorizontalSum(items) => {
            if items.is_empty() {
                return Err(CatalogError::InvalidSpec("empty horizontal sum".into()));
            }
            let parts = items.iter().map(generate).collect::<Result<Vec<_>, _>>()?;
            horizontal_sum_table(&parts)?
        }
        GeneratorSpec::Fano => fano_table(),
        GeneratorSpec::EvenSubsetOmp(m) => even_subset_table(*m)?,
        GeneratorSpec::Raw(t) => t.clone(),
    };
    Ok(validate(&raw)?)
}

fn subset_label(members: impl Iterator<Item = usize>) -> String {
    let parts: Vec<String> = members.map(|i| i.to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

fn boolean_table(n: usize) -> Result<RawTable, CatalogError> {
    if n > 16 {
        return Err(CatalogError::InvalidSpec(format!("boolean {n} is too large")));
    }
    let size = 1usize << n;
    let top = size - 1;
    let mut t = RawTable::new(size, 0, top);
    for a in 0..size {
        for b in 0..size {
            if a & b == 0 {
                t.set(a, b, a | b);
            }
        }
    }
    let labels = (0..size)
        .map(|m| match m {
            0 => "0".to_string(),
            m if m == top => "1".to_string(),
            m => subset_label((0..n).filter(|i| m >> i & 1 == 1).map(|i| i + 1)),
        })
        .collect();
    t.set_labels(labels);
    Ok(t)
}

fn mv_chain_table(n: usize) -> Result<RawTable, CatalogError> {
    if n == 0 {
        return Err(CatalogError::InvalidSpec("mvchain needs n ≥ 1".into()));
    }
    let mut t = RawTable::new(n + 1, 0, n);
    for a in 0..=n {
        for b in 0..=n - a {
            t.set(a, b, a + b);
        }
    }
    let labels = (0..=n)
        .map(|k| match k {
            0 => "0".to_string(),
            k if k == n => "1".to_string(),
            k => format!("{k}/{n}"),
        })
        .collect();
    t.set_labels(labels);
    Ok(t)
}

fn product_table(parts: &[EffectAlgebra]) -> Result<RawTable, CatalogError> {
    let sizes: Vec<usize> = parts.iter().map(EffectAlgebra::size).collect();
    let size = sizes
        .iter()
        .try_fold(1usize, |acc, &s| acc.checked_mul(s).filter(|&v| v <= 4096))
        .ok_or_else(|| CatalogError::InvalidSpec("product is too large".into()))?;
    let encode = |coords: &[usize]| coords.iter().zip(&sizes).fold(0, |acc, (&c, &s)| acc * s + c);
    let decode = |mut idx: usize| {
        let mut coords = vec![0; sizes.len()];
        for (k, &s) in sizes.iter().enumerate().rev() {
            coords[k] = idx % s;
            idx /= s;
        }
        coords
    };
    let zero: Vec<usize> = parts.iter().map(|p| p.zero().0).collect();
    let one: Vec<usize> = parts.iter().map(|p| p.one().0).collect();
    let mut t = RawTable::new(size, encode(&zero), encode(&one));
    for a in 0..size {
        let ca = decode(a);
        'pair: for b in 0..size {
            let cb = decode(b);
            let mut sum = Vec::with_capacity(parts.len());
            for (k, p) in parts.iter().enumerate() {
                match p.sum(Element(ca[k]), Element(cb[k])) {
                    Some(s) => sum.push(s.0),
                    None => continue 'pair,
                }
            }
            t.set(a, b, encode(&sum));
        }
    }
    let labels = (0..size)
        .map(|i| {
            let c = decode(i);
            if c == zero {
                "0".to_string()
            } else if c == one {
                "1".to_string()
            } else {
                let inner: Vec<&str> = c
                    .iter()
                    .zip(parts)
                    .map(|(&x, p)| p.label(Element(x)))
                    .collect();
                format!("({})", inner.join(","))
            }
        })
        .collect();
    t.set_labels(labels);
    Ok(t)
}

fn horizontal_sum_table(parts: &[EffectAlgebra]) -> Result<RawTable, CatalogError> {
    if let Some(p) = parts.iter().find(|p| p.size() < 2) {
        return Err(CatalogError::InvalidSpec(format!(
            "horizontal summands need at least 2 elements, got {}",
            p.size()
        )));
    }
    let interior: usize = parts.iter().map(|p| p.size() - 2).sum();
    let size = interior + 2;
    let top = size - 1;
    // Map of each summand's elements into the glued carrier.
    let mut maps = Vec::with_capacity(parts.len());
    let mut next = 1;
    for p in parts {
        let mut m = vec![0; p.size()];
        for e in p.elements() {
            m[e.0] = if e == p.zero() {
                0
            } else if e == p.one() {
                top
            } else {
                next += 1;
                next - 1
            };
        }
        maps.push(m);
    }
    let mut t = RawTable::with_zero_sums(size, 0, top);
    let mut labels = vec![String::new(); size];
    labels[0] = "0".into();
    labels[top] = "1".into();
    for (k, (p, m)) in parts.iter().zip(&maps).enumerate() {
        for a in p.elements() {
            if a != p.zero() && a != p.one() {
                labels[m[a.0]] = format!("{}@{}", p.label(a), k + 1);
            }
            for b in p.elements() {
                if let Some(s) = p.sum(a, b) {
                    t.set(m[a.0], m[b.0], m[s.0]);
                }
            }
        }
    }
    t.set_labels(labels);
    Ok(t)
}

/// Carrier: 0, atoms `p1..p7` (indices 1..=7), coatoms `p1'..p7'`
/// (indices 8..=14), 1 (index 15). Two distinct atoms are summable iff they
/// lie on a common line, and then `p + q` is the coatom of the third point.
fn fano_table() -> RawTable {
    const ONE: usize = 15;
    let atom = |p: usize| p;
    let coatom = |p: usize| p + 7;
    let mut t = RawTable::with_zero_sums(16, 0, ONE);
    for p in 1..=7 {
        t.set_symmetric(atom(p), coatom(p), ONE);
    }
    for line in FANO_LINES {
        for i in 0..3 {
            let (p, q, r) = (line[i], line[(i + 1) % 3], line[(i + 2) % 3]);
            t.set_symmetric(atom(p), atom(q), coatom(r));
        }
    }
    let mut labels = vec!["0".to_string(); 16];
    for p in 1..=7 {
        labels[atom(p)] = format!("p{p}");
        labels[coatom(p)] = format!("p{p}'");
    }
    labels[ONE] = "1".into();
    t.set_labels(labels);
    t
}

/// Even subsets of `{1..m}` ordered by cardinality, then lexicographically by
/// their sorted member lists.
pub fn even_subsets(m: usize) -> Vec<u32> {
    let mut sets: Vec<u32> = (0u32..1 << m).filter(|s| s.count_ones() % 2 == 0).collect();
    let members = |s: u32| (0..m).filter(|i| s >> i & 1 == 1).collect::<Vec<_>>();
    sets.sort_by_key(|&s| (s.count_ones(), members(s)));
    sets
}

fn even_subset_table(m: usize) -> Result<RawTable, CatalogError> {
    if m < 2 || !m.is_multiple_of(2) || m > 10 {
        return Err(CatalogError::InvalidSpec(format!(
            "evenomp needs an even m in 2..=10, got {m}"
        )));
    }
    let sets = even_subsets(m);
    let size = sets.len();
    let index: BTreeMap<u32, usize> = sets.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let mut t = RawTable::new(size, 0, size - 1);
    for (a, &sa) in sets.iter().enumerate() {
        for (b, &sb) in sets.iter().enumerate() {
            if sa & sb == 0 {
                t.set(a, b, index[&(sa | sb)]);
            }
        }
    }
    let labels = sets
        .iter()
        .enumerate()
        .map(|(i, &s)| match i {
            0 => "0".to_string(),
            i if i == size - 1 => "1".to_string(),
            _ => subset_label((0..m).filter(|k| s >> k & 1 == 1).map(|k| k + 1)),
        })
        .collect();
    t.set_labels(labels);
    Ok(t)
}

/// A sum table relabeled into canonical position: zero at 0, one at `n − 1`,
/// undefined cells encoded as `n`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm {
    pub size: usize,
    pub cells: Vec<u8>,
}

impl CanonicalForm {
    pub fn to_raw(&self) -> RawTable {
        let n = self.size;
        let mut t = RawTable::new(n, 0, n - 1);
        for a in 0..n {
            for b in 0..n {
                let v = self.cells[a * n + b] as usize;
                if v != n {
                    t.set(a, b, v);
                }
            }
        }
        t
    }
}

fn element_invariant(e: &EffectAlgebra, a: Element) -> (usize, usize, usize, bool) {
    let defined = e.elements().filter(|&b| e.is_summable(a, b)).count();
    (
        e.lower_set(a).count_ones(..),
        defined,
        e.upper_set(a).count_ones(..),
        e.complement(a) == a,
    )
}

/// Lexicographically minimal relabeled table over all carrier permutations
/// that fix 0 and 1 and list interior elements in nondecreasing invariant
/// order (down-set size, row definedness, up-set size, self-complement).
///
/// The invariants are isomorphism-invariant, so two algebras are isomorphic
/// iff their canonical forms coincide. Intended for small carriers (≤ ~10).
pub fn canonical_form(e: &EffectAlgebra) -> CanonicalForm {
    let n = e.size();
    assert!(n <= 255, "canonical form is for small algebras");
    let zero = e.zero();
    let one = e.one();
    let mut interior: Vec<(_, Element)> = e
        .elements()
        .filter(|&a| a != zero && a != one)
        .map(|a| (element_invariant(e, a), a))
        .collect();
    interior.sort();
    // Slots grouped by invariant class; each slot may take any element of
    // its class.
    let classes: Vec<Vec<Element>> = {
        let mut out: Vec<Vec<Element>> = Vec::new();
        let mut last = None;
        for (inv, a) in &interior {
            if last.as_ref() != Some(inv) {
                out.push(Vec::new());
                last = Some(*inv);
            }
            out.last_mut().unwrap().push(*a);
        }
        out
    };
    let slot_class: Vec<usize> = classes
        .iter()
        .enumerate()
        .flat_map(|(k, c)| std::iter::repeat_n(k, c.len()))
        .collect();

    let mut order = Vec::with_capacity(n);
    let mut used = vec![false; n];
    let mut best: Option<Vec<u8>> = None;
    let mut scratch = vec![0u8; n * n];
    order.push(zero);
    fn recurse(
        e: &EffectAlgebra,
        classes: &[Vec<Element>],
        slot_class: &[usize],
        order: &mut Vec<Element>,
        used: &mut [bool],
        best: &mut Option<Vec<u8>>,
        scratch: &mut [u8],
    ) {
        let n = e.size();
        let slot = order.len() - 1;
        if slot == slot_class.len() {
            order.push(e.one());
            let mut position = vec![0u8; n];
            for (i, a) in order.iter().enumerate() {
                position[a.0] = i as u8;
            }
            for (i, &a) in order.iter().enumerate() {
                for (j, &b) in order.iter().enumerate() {
                    scratch[i * n + j] = e.sum(a, b).map_or(n as u8, |s| position[s.0]);
                }
            }
            if best.as_deref().is_none_or(|b| &scratch[..] < b) {
                *best = Some(scratch.to_vec());
            }
            order.pop();
            return;
        }
        for &a in &classes[slot_class[slot]] {
            if !used[a.0] {
                used[a.0] = true;
                order.push(a);
                recurse(e, classes, slot_class, order, used, best, scratch);
                order.pop();
                used[a.0] = false;
            }
        }
    }
    if n == 1 {
        return CanonicalForm {
            size: 1,
            cells: vec![0],
        };
    }
    recurse(
        e,
        &classes,
        &slot_class,
        &mut order,
        &mut used,
        &mut best,
        &mut scratch,
    );
    CanonicalForm {
        size: n,
        cells: best.expect("at least one labeling"),
    }
}

pub fn are_isomorphic(a: &EffectAlgebra, b: &EffectAlgebra) -> bool {
    a.size() == b.size() && canonical_form(a) == canonical_form(b)
}

/// One representative per isomorphism class.
#[derive(Clone, Debug)]
pub struct EnumerationResult {
    pub count_by_size: BTreeMap<usize, usize>,
    /// Sorted by size, then canonical table.
    pub witnesses: Vec<EffectAlgebra>,
    pub canonical: Vec<CanonicalForm>,
}

impl EnumerationResult {
    pub fn total(&self) -> usize {
        self.witnesses.len()
    }
}

/// Enumerates every isomorphism class of effect algebras with
/// `2 ≤ size ≤ max_size` satisfying `predicate`, using the default cap.
pub fn enumerate_small<P>(max_size: usize, predicate: P) -> Result<EnumerationResult, CatalogError>
where
    P: Fn(&EffectAlgebra) -> bool + Sync,
{
    enumerate_small_with_cap(max_size, DEFAULT_ENUMERATION_CAP, predicate)
}

pub fn enumerate_small_with_cap<P>(
    max_size: usize,
    cap: usize,
    predicate: P,
) -> Result<EnumerationResult, CatalogError>
where
    P: Fn(&EffectAlgebra) -> bool + Sync,
{
    if max_size > cap {
        return Err(CatalogError::CapExceeded {
            requested: max_size,
            cap,
        });
    }
    let mut count_by_size = BTreeMap::new();
    let mut witnesses = Vec::new();
    let mut canonical = Vec::new();
    for n in 2..=max_size {
        let forms = classes_of_size(n);
        let kept: Vec<(CanonicalForm, EffectAlgebra)> = forms
            .into_par_iter()
            .filter_map(|form| {
                let alg = validate(&form.to_raw()).expect("canonical tables are valid");
                predicate(&alg).then_some((form, alg))
            })
            .collect();
        count_by_size.insert(n, kept.len());
        for (form, alg) in kept {
            canonical.push(form);
            witnesses.push(alg);
        }
    }
    Ok(EnumerationResult {
        count_by_size,
        witnesses,
        canonical,
    })
}

/// All canonical forms of effect algebras with exactly `n ≥ 2` elements.
///
/// Interior elements are `1..=n−2`. The orthosupplement is fixed to a
/// standard involution shape (self-complementary elements first, then
/// adjacent pairs), which every isomorphism class admits. An interior sum
/// `a + b = c` with `c ≠ 1` is equivalent to the unordered triple
/// `{a, b, c'}` summing to 1, so the search chooses a set of such triples in
/// which no pair of positions repeats, then validates and canonicalizes.
fn classes_of_size(n: usize) -> BTreeSet<CanonicalForm> {
    assert!(n >= 2);
    let one = n - 1;
    let m = n - 2;
    let mut shapes = Vec::new();
    let mut fixed = m;
    loop {
        let mut comp = vec![0usize; n];
        comp[0] = one;
        comp[one] = 0;
        for a in 1..=fixed {
            comp[a] = a;
        }
        let mut a = fixed + 1;
        while a < m {
            comp[a] = a + 1;
            comp[a + 1] = a;
            a += 2;
        }
        shapes.push(comp);
        if fixed < 2 {
            break;
        }
        fixed -= 2;
    }
    shapes
        .into_par_iter()
        .flat_map_iter(|comp| classes_for_complement(n, &comp))
        .collect::<BTreeSet<_>>()
}

fn classes_for_complement(n: usize, comp: &[usize]) -> BTreeSet<CanonicalForm> {
    let one = n - 1;
    let interior: Vec<usize> = (1..one).collect();
    let pair_id = |a: usize, b: usize| a.min(b) * n + a.max(b);
    let mut candidates: Vec<([usize; 3], Vec<usize>)> = Vec::new();
    for (i, &a) in interior.iter().enumerate() {
        for (j, &b) in interior.iter().enumerate().skip(i) {
            for &d in interior.iter().skip(j) {
                let pairs = [(a, b), (a, d), (b, d)];
                if pairs.iter().any(|&(x, y)| comp[x] == y) {
                    continue;
                }
                let mut ids: Vec<usize> = pairs.iter().map(|&(x, y)| pair_id(x, y)).collect();
                ids.sort_unstable();
                ids.dedup();
                candidates.push(([a, b, d], ids));
            }
        }
    }
    let mut used = vec![false; n * n];
    let mut chosen = Vec::new();
    let mut out = BTreeSet::new();
    search_triples(n, comp, &candidates, 0, &mut used, &mut chosen, &mut out);
    out
}

fn search_triples(
    n: usize,
    comp: &[usize],
    candidates: &[([usize; 3], Vec<usize>)],
    next: usize,
    used: &mut [bool],
    chosen: &mut Vec<[usize; 3]>,
    out: &mut BTreeSet<CanonicalForm>,
) {
    if next == candidates.len() {
        if let Some(raw) = table_from_triples(n, comp, chosen) {
            if let Ok(alg) = validate(&raw) {
                out.insert(canonical_form(&alg));
            }
        }
        return;
    }
    search_triples(n, comp, candidates, next + 1, used, chosen, out);
    let (triple, ids) = &candidates[next];
    if ids.iter().all(|&p| !used[p]) {
        for &p in ids {
            used[p] = true;
        }
        chosen.push(*triple);
        if partial_associativity_ok(n, comp, chosen) {
            search_triples(n, comp, candidates, next + 1, used, chosen, out);
        }
        chosen.pop();
        for &p in ids {
            used[p] = false;
        }
    }
}

fn table_from_triples(n: usize, comp: &[usize], triples: &[[usize; 3]]) -> Option<RawTable> {
    let one = n - 1;
    let mut t = RawTable::with_zero_sums(n, 0, one);
    for a in 1..one {
        t.set_symmetric(a, comp[a], one);
    }
    t.set_symmetric(0, one, one);
    for &[a, b, d] in triples {
        for (x, y, z) in [(a, b, d), (a, d, b), (b, d, a)] {
            let v = comp[z];
            match t.get(x, y) {
                Some(old) if old != v => return None,
                _ => t.set_symmetric(x, y, v),
            }
        }
    }
    Some(t)
}

/// Rejects partial triple systems whose already-determined sums break
/// associativity; undetermined sums are not judged.
fn partial_associativity_ok(n: usize, comp: &[usize], triples: &[[usize; 3]]) -> bool {
    let Some(raw) = table_from_triples(n, comp, triples) else {
        return false;
    };
    let cells = raw.cells();
    let get = |a: usize, b: usize| {
        let v = cells[a * n + b];
        (v != UNDEFINED).then_some(v as usize)
    };
    for a in 1..n - 1 {
        for b in 1..n - 1 {
            let Some(ab) = get(a, b) else { continue };
            for c in 1..n - 1 {
                if let (Some(left), Some(bc)) = (get(ab, c), get(b, c)) {
                    if let Some(right) = get(a, bc) {
                        if left != right {
                            return false;
                        }
                    }
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_syntax_round_trips() {
        for text in [
            "boolean 3",
            "mvchain 4",
            "fano",
            "evenomp 8",
            "hsum (boolean 2) (boolean 2)",
            "product (boolean 1) (hsum (mvchain 2) (boolean 2))",
        ] {
            let spec = GeneratorSpec::parse(text).unwrap();
            assert_eq!(spec.to_string(), text);
        }
        assert!(GeneratorSpec::parse("hsum boolean 2").is_err());
        assert!(GeneratorSpec::parse("cube 3").is_err());
        assert!(GeneratorSpec::parse("boolean x").is_err());
    }

    #[test]
    fn boolean_sizes_and_labels() {
        let e = generate(&GeneratorSpec::Boolean(3)).unwrap();
        assert_eq!(e.size(), 8);
        assert_eq!(e.label(Element(0b101)), "{1,3}");
        assert!(e.leq(Element(0b001), Element(0b011)));
        assert_eq!(e.sum(Element(0b001), Element(0b011)), None);
        let trivial = generate(&GeneratorSpec::Boolean(0)).unwrap();
        assert_eq!(trivial.size(), 1);
    }

    #[test]
    fn invalid_specs() {
        assert!(generate(&GeneratorSpec::MvChain(0)).is_err());
        assert!(generate(&GeneratorSpec::EvenSubsetOmp(3)).is_err());
        assert!(generate(&GeneratorSpec::EvenSubsetOmp(0)).is_err());
        assert!(generate(&GeneratorSpec::HorizontalSum(vec![GeneratorSpec::Boolean(0)])).is_err());
    }

    #[test]
    fn horizontal_sum_glues_only_bounds() {
        let e = generate(&GeneratorSpec::HorizontalSum(vec![
            GeneratorSpec::Boolean(2),
            GeneratorSpec::Boolean(2),
        ]))
        .unwrap();
        assert_eq!(e.size(), 6);
        let a = e.find("{1}@1").unwrap();
        let b = e.find("{1}@2").unwrap();
        assert_eq!(e.sum(a, b), None);
        assert_eq!(e.meet(a, b), Some(e.zero()));
        assert_eq!(e.join(a, b), Some(e.one()));
    }

    #[test]
    fn fano_has_sixteen_elements() {
        let e = generate(&GeneratorSpec::Fano).unwrap();
        assert_eq!(e.size(), 16);
        let p1 = e.find("p1").unwrap();
        let p2 = e.find("p2").unwrap();
        let p4 = e.find("p4").unwrap();
        assert_eq!(e.sum(p1, p2), e.find("p4'"));
        assert_eq!(e.sum_family(&[p1, p2, p4]), Some(e.one()));
    }

    #[test]
    fn even_subset_order_puts_rip_witness_first() {
        let sets = even_subsets(8);
        assert_eq!(sets.len(), 128);
        assert_eq!(sets[0], 0);
        assert_eq!(sets[1], 0b11);
        assert_eq!(sets[2], 0b101);
    }

    #[test]
    fn canonical_form_identifies_relabelings() {
        let e = generate(&GeneratorSpec::HorizontalSum(vec![
            GeneratorSpec::Boolean(2),
            GeneratorSpec::MvChain(2),
        ]))
        .unwrap();
        let f = generate(&GeneratorSpec::HorizontalSum(vec![
            GeneratorSpec::MvChain(2),
            GeneratorSpec::Boolean(2),
        ]))
        .unwrap();
        assert!(are_isomorphic(&e, &f));
        let g = generate(&GeneratorSpec::MvChain(4)).unwrap();
        let h = generate(&GeneratorSpec::Boolean(2)).unwrap();
        assert!(!are_isomorphic(&g, &h));
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            enumerate_small(9, |_| true),
            Err(CatalogError::CapExceeded { requested: 9, cap: 8 })
        ));
    }
}
