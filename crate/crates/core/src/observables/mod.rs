//! Simple observables and their spectral resolutions.
//!
//! An observable with finite spectrum is a list of `(value, effect)` atoms
//! whose effects sum to 1; it evaluates a Borel set (an [`IntervalSet`]) by
//! summing the effects of the values inside it. Observables with finitely
//! many values are exactly the finitely additive ones, so one type serves
//! both.
//!
//! Spectral resolutions are jump lists read left-continuously:
//! `x_t = x((−∞, t))` is 0 for `t ≤ t1`, `c_i` for `t_i < t ≤ t_{i+1}` and
//! `1` above the last jump.

pub mod interval;
pub mod sets;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::algebra::{element_set, EffectAlgebra, Element};
use crate::classify::{
    closure_kind, has_rdp, is_boolean, is_homogeneous, is_omp, is_orthoalgebra, is_sharp,
    SubAlgebra,
};
use crate::Rational;

pub use interval::{format_rational, parse_rational, Interval, IntervalParseError, IntervalSet};
pub use sets::SetFamily;

/// Which defining condition of a spectral resolution fails.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResolutionClause {
    /// Thresholds increase strictly and values increase strictly.
    Monotone,
    /// 0 below the first jump, 1 above the last.
    Limits,
    /// Each value is the supremum of the values before it.
    LeftContinuity,
}

impl fmt::Display for ResolutionClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ResolutionClause::Monotone => "monotone",
            ResolutionClause::Limits => "limits",
            ResolutionClause::LeftContinuity => "left-continuity",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ObservableError {
    #[error("effects do not sum to 1")]
    NotSummable,
    #[error("value {} appears twice", format_rational(.0))]
    DuplicateValue(Rational),
    #[error("invalid resolution ({clause}): {detail}")]
    InvalidResolution {
        clause: ResolutionClause,
        detail: String,
    },
    #[error("unsupported map: {0}")]
    UnsupportedMap(String),
    #[error("algebra is not homogeneous (witness {0:?})")]
    NotHomogeneous(Vec<Element>),
    #[error("algebra is not an orthoalgebra (witness {0:?})")]
    NotOrthoalgebra(Vec<Element>),
    #[error("family is not a Dynkin system")]
    NotDynkin,
    #[error("equivalence broken: {0}")]
    EquivalenceBroken(String),
}

/// `x(A) = Σ { a_i : t_i ∈ A }` for finitely many atoms `(t_i, a_i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SimpleObservable {
    atoms: Vec<(Rational, Element)>,
}

impl SimpleObservable {
    /// Atoms with strictly increasing values and nonzero effects.
    pub fn atoms(&self) -> &[(Rational, Element)] {
        &self.atoms
    }

    pub fn spectrum(&self) -> Vec<Rational> {
        self.atoms.iter().map(|(t, _)| t.clone()).collect()
    }

    /// `max |t|` over the spectrum.
    pub fn norm(&self) -> Rational {
        self.atoms
            .iter()
            .map(|(t, _)| t.abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    pub fn display(&self, e: &EffectAlgebra) -> String {
        let parts: Vec<String> = self
            .atoms
            .iter()
            .map(|(t, a)| format!("{} : {}", format_rational(t), e.label(*a)))
            .collect();
        parts.join(", ")
    }
}

/// Builds an observable from `(value, effect)` pairs; zero effects are
/// dropped and the atoms sorted by value.
pub fn make_observable(
    e: &EffectAlgebra,
    pairs: impl IntoIterator<Item = (Rational, Element)>,
) -> Result<SimpleObservable, ObservableError> {
    let mut by_value: BTreeMap<Rational, Element> = BTreeMap::new();
    for (t, a) in pairs {
        if by_value.insert(t.clone(), a).is_some() {
            return Err(ObservableError::DuplicateValue(t));
        }
    }
    let atoms: Vec<(Rational, Element)> =
        by_value.into_iter().filter(|(_, a)| *a != e.zero()).collect();
    let effects: Vec<Element> = atoms.iter().map(|(_, a)| *a).collect();
    if e.sum_family(&effects) != Some(e.one()) {
        return Err(ObservableError::NotSummable);
    }
    Ok(SimpleObservable { atoms })
}

/// The question of `a`: atoms `(0, a')` and `(1, a)`.
pub fn question(e: &EffectAlgebra, a: Element) -> SimpleObservable {
    make_observable(
        e,
        [(Rational::zero(), e.complement(a)), (Rational::one(), a)],
    )
    .expect("a + a' = 1")
}

pub fn evaluate(e: &EffectAlgebra, x: &SimpleObservable, set: &IntervalSet) -> Element {
    let effects: Vec<Element> = x
        .atoms
        .iter()
        .filter(|(t, _)| set.contains(t))
        .map(|(_, a)| *a)
        .collect();
    e.sum_family(&effects)
        .expect("subfamily of a summable family")
}

/// Jumps `(t_i, c_i)` of `t ↦ x_t`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpectralResolution {
    jumps: Vec<(Rational, Element)>,
}

impl SpectralResolution {
    /// Checks thresholds and values increase strictly and the last value is 1.
    pub fn new(
        e: &EffectAlgebra,
        jumps: Vec<(Rational, Element)>,
    ) -> Result<Self, ObservableError> {
        let bad = |clause, detail: String| ObservableError::InvalidResolution { clause, detail };
        let Some((_, last)) = jumps.last() else {
            return Err(bad(ResolutionClause::Limits, "no jumps".into()));
        };
        if *last != e.one() {
            return Err(bad(
                ResolutionClause::Limits,
                format!("last value is {}, not 1", e.label(*last)),
            ));
        }
        let mut prev_t: Option<&Rational> = None;
        let mut prev_c = e.zero();
        for (t, c) in &jumps {
            if prev_t.is_some_and(|p| p >= t) {
                return Err(bad(
                    ResolutionClause::Monotone,
                    format!("threshold {} out of order", format_rational(t)),
                ));
            }
            if *c == prev_c || !e.leq(prev_c, *c) {
                return Err(bad(
                    ResolutionClause::Monotone,
                    format!(
                        "{} does not lie strictly above {}",
                        e.label(*c),
                        e.label(prev_c)
                    ),
                ));
            }
            prev_t = Some(t);
            prev_c = *c;
        }
        Ok(SpectralResolution { jumps })
    }

    pub fn jumps(&self) -> &[(Rational, Element)] {
        &self.jumps
    }

    /// `x_t` under left-continuity.
    pub fn value_at(&self, e: &EffectAlgebra, t: &Rational) -> Element {
        self.jumps
            .iter()
            .take_while(|(ti, _)| ti < t)
            .last()
            .map_or(e.zero(), |(_, c)| *c)
    }

    pub fn display(&self, e: &EffectAlgebra) -> String {
        let parts: Vec<String> = self
            .jumps
            .iter()
            .map(|(t, c)| format!("{} : {}", format_rational(t), e.label(*c)))
            .collect();
        parts.join(", ")
    }
}

/// `c_i = a_1 + … + a_i` at `t_i`.
pub fn spectral_resolution(e: &EffectAlgebra, x: &SimpleObservable) -> SpectralResolution {
    let mut total = e.zero();
    let jumps = x
        .atoms
        .iter()
        .map(|(t, a)| {
            total = e.sum(total, *a).expect("prefix of a summable family");
            (t.clone(), total)
        })
        .collect();
    SpectralResolution { jumps }
}

/// `a_i = c_i − c_{i−1}` at `t_i`. Differences along a chain are always
/// summable, so every resolution comes from an observable.
pub fn observable_from_resolution(
    e: &EffectAlgebra,
    sr: &SpectralResolution,
) -> Result<SimpleObservable, ObservableError> {
    let sr = SpectralResolution::new(e, sr.jumps.clone())?;
    let mut prev = e.zero();
    let pairs: Vec<(Rational, Element)> = sr
        .jumps
        .iter()
        .map(|(t, c)| {
            let a = e.diff(*c, prev).expect("chain is increasing");
            prev = *c;
            (t.clone(), a)
        })
        .collect();
    make_observable(e, pairs)
}

/// Checks that a resolution determines its observable.
///
/// Over the spectrum points, the sets `(−∞, t_i)` form a π-system of
/// prefixes whose values are the resolution. Dynkin operations (complement
/// and proper difference) propagate those values to the singletons, which
/// must match the observable built from `sr`; any second observable with
/// the same resolution has the same spectrum and hence the same atoms. For
/// spectra of at most 6 points the whole Dynkin closure of the prefixes is
/// also compared with the generated σ-algebra and checked for consistent
/// values.
pub fn uniqueness_check(e: &EffectAlgebra, sr: &SpectralResolution) -> bool {
    let Ok(x) = observable_from_resolution(e, sr) else {
        return false;
    };
    let k = sr.jumps.len();
    let prefix = |i: usize| -> u64 { (1u64 << i) - 1 };
    let value = |i: usize| if i == 0 { e.zero() } else { sr.jumps[i - 1].1 };

    for i in 0..k {
        // {t_{i+1}} = (−∞, t_{i+2}) ∖ (−∞, t_{i+1}) as points of the spectrum.
        let Ok(single) = e.diff(value(i + 1), value(i)) else {
            return false;
        };
        if single != x.atoms[i].1 || prefix(i + 1) & !prefix(i) != 1 << i {
            return false;
        }
    }
    if k > 6 {
        return true;
    }

    let pi = SetFamily::from_sets(k, (0..=k).map(|i| prefix(i) as u32));
    let dynkin = pi.dynkin_closure();
    if !pi.is_pi_system() || dynkin != pi.sigma_closure() {
        return false;
    }
    let mut values: BTreeMap<u32, Element> = (0..=k).map(|i| (prefix(i) as u32, value(i))).collect();
    let full = pi.full();
    let mut changed = true;
    while changed {
        changed = false;
        let known: Vec<(u32, Element)> = values.iter().map(|(&s, &v)| (s, v)).collect();
        let mut derived: Vec<(u32, Option<Element>)> = Vec::new();
        for &(s, v) in &known {
            derived.push((full & !s, Some(e.complement(v))));
            for &(t, w) in &known {
                if s & t == 0 {
                    derived.push((s | t, e.sum(v, w)));
                }
            }
        }
        for (s, v) in derived {
            let Some(v) = v else { return false };
            match values.get(&s) {
                Some(&old) if old != v => return false,
                Some(_) => {}
                None => {
                    values.insert(s, v);
                    changed = true;
                }
            }
        }
    }
    values.len() == dynkin.len()
        && (0..k).all(|i| values.get(&(1u32 << i)) == Some(&x.atoms[i].1))
}

/// Maps `ℝ → ℝ` with exact rational action.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RationalMap {
    /// Coefficients from the constant term up.
    Polynomial(Vec<Rational>),
    Affine { scale: Rational, shift: Rational },
    /// Value of the first piece containing `t`, else 0. Pieces must be disjoint.
    Step(Vec<(IntervalSet, Rational)>),
}

impl RationalMap {
    pub fn apply(&self, t: &Rational) -> Rational {
        match self {
            RationalMap::Polynomial(coeffs) => coeffs
                .iter()
                .rev()
                .fold(Rational::zero(), |acc, c| acc * t + c),
            RationalMap::Affine { scale, shift } => scale * t + shift,
            RationalMap::Step(pieces) => pieces
                .iter()
                .find(|(set, _)| set.contains(t))
                .map_or_else(Rational::zero, |(_, v)| v.clone()),
        }
    }

    fn check(&self) -> Result<(), ObservableError> {
        if let RationalMap::Step(pieces) = self {
            for (i, (a, _)) in pieces.iter().enumerate() {
                for (b, _) in &pieces[i + 1..] {
                    if !a.intersection(b).is_empty() {
                        return Err(ObservableError::UnsupportedMap(format!(
                            "step pieces {a} and {b} overlap"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// `f ∘ x: A ↦ x(f⁻¹(A))`; atoms with equal images are merged.
pub fn compose(
    e: &EffectAlgebra,
    x: &SimpleObservable,
    f: &RationalMap,
) -> Result<SimpleObservable, ObservableError> {
    f.check()?;
    let mut merged: BTreeMap<Rational, Element> = BTreeMap::new();
    for (t, a) in &x.atoms {
        let image = f.apply(t);
        let slot = merged.entry(image).or_insert(e.zero());
        *slot = e.sum(*slot, *a).expect("subfamily of a summable family");
    }
    make_observable(e, merged)
}

pub fn power(e: &EffectAlgebra, x: &SimpleObservable, n: u32) -> SimpleObservable {
    let mut coeffs = vec![Rational::zero(); n as usize + 1];
    coeffs[n as usize] = Rational::one();
    compose(e, x, &RationalMap::Polynomial(coeffs)).expect("polynomials are supported")
}

/// `σ(x) ⊆ {0, 1}`, checked against `x² = x`.
pub fn is_question(e: &EffectAlgebra, x: &SimpleObservable) -> Result<bool, ObservableError> {
    let by_spectrum = x
        .atoms
        .iter()
        .all(|(t, _)| t.is_zero() || t.is_one());
    let idempotent = power(e, x, 2) == *x;
    if by_spectrum != idempotent {
        return Err(ObservableError::EquivalenceBroken(format!(
            "spectrum in {{0,1}} is {by_spectrum} but x² = x is {idempotent}"
        )));
    }
    Ok(by_spectrum)
}

/// All values `x(A)`: the subsums of the atoms.
pub fn range(e: &EffectAlgebra, x: &SimpleObservable) -> SubAlgebra {
    let mut members = element_set(e.size(), [e.zero()]);
    for (_, a) in &x.atoms {
        let current: Vec<usize> = members.ones().collect();
        for s in current {
            members.insert(e.sum(Element(s), *a).expect("summable family").0);
        }
    }
    let kind = closure_kind(e, &members);
    SubAlgebra { members, kind }
}

/// On an orthoalgebra, the range is a sub-orthoalgebra that is an OMP with
/// RDP and Boolean in its own right.
pub fn verify_range_boolean(
    e: &EffectAlgebra,
    x: &SimpleObservable,
) -> Result<bool, ObservableError> {
    if let Some(w) = is_orthoalgebra(e).witness() {
        return Err(ObservableError::NotOrthoalgebra(w.to_vec()));
    }
    let r = range(e, x);
    let Ok(view) = e.restrict(&r.members) else {
        return Ok(false);
    };
    let b = &view.algebra;
    Ok(is_orthoalgebra(b).holds() && is_omp(b).holds() && has_rdp(b).holds() && is_boolean(b))
}

/// Whether every value of `x` is sharp, on a homogeneous algebra. Three
/// formulations are compared: the range, the resolution values, and the
/// resolution sampled at rational points around each jump.
pub fn is_sharp_observable(
    e: &EffectAlgebra,
    x: &SimpleObservable,
) -> Result<bool, ObservableError> {
    if let Some(w) = is_homogeneous(e).witness() {
        return Err(ObservableError::NotHomogeneous(w.to_vec()));
    }
    let by_range = range(e, x).elements().all(|a| is_sharp(e, a));
    let sr = spectral_resolution(e, x);
    let by_resolution = sr.jumps.iter().all(|(_, c)| is_sharp(e, *c));
    let mut samples: Vec<Rational> = Vec::new();
    let ts = x.spectrum();
    if let (Some(first), Some(last)) = (ts.first(), ts.last()) {
        samples.push(first - Rational::one());
        samples.push(last + Rational::one());
    }
    for w in ts.windows(2) {
        samples.push((&w[0] + &w[1]) / Rational::from_integer(2.into()));
    }
    samples.extend(ts.iter().cloned());
    let by_samples = samples.iter().all(|t| is_sharp(e, sr.value_at(e, t)));
    if by_range != by_resolution || by_range != by_samples {
        return Err(ObservableError::EquivalenceBroken(format!(
            "range {by_range}, resolution {by_resolution}, samples {by_samples}"
        )));
    }
    Ok(by_range)
}

/// A function on the points of a finite universe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointFunction {
    pub values: Vec<Rational>,
}

/// `f(ω) = min { t_i : ω ∈ c_i }` for a resolution `(t_i, c_i)` of sets in a
/// Dynkin system `d`, checked so that every `f⁻¹((−∞, t))` and every
/// preimage of a set of values lies in `d`.
pub fn resolution_to_function(
    d: &SetFamily,
    chain: &[(Rational, u32)],
) -> Result<PointFunction, ObservableError> {
    if !d.is_dynkin() {
        return Err(ObservableError::NotDynkin);
    }
    let bad = |clause, detail: String| ObservableError::InvalidResolution { clause, detail };
    let Some(&(_, last)) = chain.last() else {
        return Err(bad(ResolutionClause::Limits, "no jumps".into()));
    };
    if last != d.full() {
        return Err(bad(ResolutionClause::Limits, "last set is not the universe".into()));
    }
    let mut prev = 0u32;
    for (i, (t, c)) in chain.iter().enumerate() {
        if i > 0 && chain[i - 1].0 >= *t {
            return Err(bad(ResolutionClause::Monotone, "thresholds out of order".into()));
        }
        if *c == prev || prev & !c != 0 {
            return Err(bad(ResolutionClause::Monotone, "sets are not strictly increasing".into()));
        }
        if !d.contains(*c) {
            return Err(bad(
                ResolutionClause::Monotone,
                format!("{} is not in the family", sets::format_set(*c)),
            ));
        }
        prev = *c;
    }
    let values: Vec<Rational> = (0..d.universe())
        .map(|p| {
            chain
                .iter()
                .find(|(_, c)| c >> p & 1 == 1)
                .map(|(t, _)| t.clone())
                .expect("last set is the universe")
        })
        .collect();
    let preimage = |keep: &dyn Fn(&Rational) -> bool| -> u32 {
        values
            .iter()
            .enumerate()
            .filter(|(_, v)| keep(v))
            .fold(0, |m, (p, _)| m | 1 << p)
    };
    for (t, _) in chain {
        if !d.contains(preimage(&|v| v < t)) {
            return Err(ObservableError::NotDynkin);
        }
    }
    if chain.len() <= 16 {
        for pick in 0u32..1 << chain.len() {
            let set = preimage(&|v| {
                chain
                    .iter()
                    .enumerate()
                    .any(|(i, (t, _))| pick >> i & 1 == 1 && t == v)
            });
            if !d.contains(set) {
                return Err(ObservableError::NotDynkin);
            }
        }
    }
    Ok(PointFunction { values })
}

/// A random partition of unity with the given values attached in random
/// order. Needs at least as many values as the partition has parts, so
/// pass at least `size` values to be safe.
pub fn random_observable<R: Rng>(
    e: &EffectAlgebra,
    rng: &mut R,
    values: &[Rational],
) -> SimpleObservable {
    let mut effects = Vec::new();
    let mut total = e.zero();
    while total != e.one() && effects.len() < values.len() {
        let options: Vec<Element> = e
            .elements()
            .filter(|&a| a != e.zero() && e.is_summable(total, a))
            .collect();
        let a = *options.choose(rng).expect("the complement is always available");
        total = e.sum(total, a).unwrap();
        effects.push(a);
    }
    if total != e.one() {
        // Out of values: fold the remainder into the last atom.
        let last = effects.pop().unwrap();
        let rest = e.complement(total);
        effects.push(e.sum(last, rest).expect("last + rest completes the sum"));
    }
    let mut vals = values.to_vec();
    vals.shuffle(rng);
    make_observable(e, vals.into_iter().zip(effects)).expect("partition of unity")
}

/// Every observable with spectrum inside `values`.
pub fn observables_with_spectrum_in(
    e: &EffectAlgebra,
    values: &[Rational],
) -> Vec<SimpleObservable> {
    fn go(
        e: &EffectAlgebra,
        values: &[Rational],
        i: usize,
        total: Element,
        picked: &mut Vec<Element>,
        out: &mut Vec<SimpleObservable>,
    ) {
        if i == values.len() {
            if total == e.one() {
                let pairs = values.iter().cloned().zip(picked.iter().copied());
                out.push(make_observable(e, pairs).expect("sums to 1"));
            }
            return;
        }
        if i + 1 == values.len() {
            // The last effect is forced.
            let a = e.complement(total);
            picked.push(a);
            go(e, values, i + 1, e.one(), picked, out);
            picked.pop();
            return;
        }
        for a in e.elements() {
            if let Some(t) = e.sum(total, a) {
                picked.push(a);
                go(e, values, i + 1, t, picked, out);
                picked.pop();
            }
        }
    }
    let mut out = Vec::new();
    if !values.is_empty() {
        go(e, values, 0, e.zero(), &mut Vec::new(), &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{generate, GeneratorSpec};

    fn gen(text: &str) -> EffectAlgebra {
        generate(&GeneratorSpec::parse(text).unwrap()).unwrap()
    }

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn set(s: &str) -> IntervalSet {
        IntervalSet::parse(s).unwrap()
    }

    #[test]
    fn question_spectrum() {
        let e = gen("mvchain 4");
        let a = Element(1);
        let x = question(&e, a);
        assert_eq!(x.spectrum(), vec![q(0), q(1)]);
        assert_eq!(evaluate(&e, &x, &set("(-inf,1)")), e.complement(a));
        assert_eq!(evaluate(&e, &x, &IntervalSet::reals()), e.one());
        assert_eq!(evaluate(&e, &x, &IntervalSet::empty()), e.zero());
        let one = question(&e, e.one());
        assert_eq!(one.spectrum(), vec![q(1)]);
        assert!(is_question(&e, &one).unwrap());
    }

    #[test]
    fn make_observable_errors() {
        let e = gen("boolean 3");
        let atoms = [1, 2, 4].map(Element);
        let x = make_observable(&e, (0..3).map(|i| (q(i), atoms[i as usize]))).unwrap();
        assert_eq!(x.spectrum(), vec![q(0), q(1), q(2)]);
        assert_eq!(
            make_observable(&e, [(q(0), atoms[0]), (q(1), atoms[1])]),
            Err(ObservableError::NotSummable)
        );
        assert_eq!(
            make_observable(&e, [(q(0), atoms[0]), (q(0), Element(6))]),
            Err(ObservableError::DuplicateValue(q(0)))
        );
    }

    #[test]
    fn question_resolution_is_three_step() {
        let e = gen("mvchain 4");
        let a = Element(3);
        let sr = spectral_resolution(&e, &question(&e, a));
        let half = Rational::new(1.into(), 2.into());
        assert_eq!(sr.value_at(&e, &q(0)), e.zero());
        assert_eq!(sr.value_at(&e, &half), e.complement(a));
        assert_eq!(sr.value_at(&e, &q(1)), e.complement(a));
        assert_eq!(sr.value_at(&e, &q(2)), e.one());
        assert!(uniqueness_check(&e, &sr));
    }

    #[test]
    fn resolution_round_trip_and_errors() {
        let e = gen("mvchain 4");
        let sr = SpectralResolution::new(&e, vec![(q(5), e.one())]).unwrap();
        let x = observable_from_resolution(&e, &sr).unwrap();
        assert_eq!(x.atoms(), &[(q(5), e.one())]);
        assert_eq!(spectral_resolution(&e, &x), sr);
        let err = SpectralResolution::new(&e, vec![(q(1), Element(2))]).unwrap_err();
        assert!(matches!(err, ObservableError::InvalidResolution { clause: ResolutionClause::Limits, .. }));
        let err = SpectralResolution::new(&e, vec![(q(1), Element(2)), (q(0), e.one())]).unwrap_err();
        assert!(matches!(err, ObservableError::InvalidResolution { clause: ResolutionClause::Monotone, .. }));
        let err = SpectralResolution::new(&e, vec![(q(0), Element(2)), (q(1), Element(2)), (q(2), e.one())]).unwrap_err();
        assert!(matches!(err, ObservableError::InvalidResolution { clause: ResolutionClause::Monotone, .. }));
    }

    #[test]
    fn compose_merges_atoms() {
        let e = gen("boolean 2");
        let x = make_observable(&e, [(q(-1), Element(1)), (q(1), Element(2))]).unwrap();
        let sq = power(&e, &x, 2);
        assert_eq!(sq.atoms(), &[(q(1), e.one())]);
        let a = Element(1);
        let qa = question(&e, a);
        assert_eq!(power(&e, &qa, 2), qa);
        let affine = RationalMap::Affine { scale: q(2), shift: q(1) };
        let y = compose(&e, &qa, &affine).unwrap();
        assert_eq!(y.spectrum(), vec![q(1), q(3)]);
        let overlapping = RationalMap::Step(vec![(set("[0,2]"), q(1)), (set("[1,3]"), q(2))]);
        assert!(matches!(compose(&e, &qa, &overlapping), Err(ObservableError::UnsupportedMap(_))));
        let step = RationalMap::Step(vec![(set("[1,inf)"), q(7))]);
        assert_eq!(compose(&e, &qa, &step).unwrap().spectrum(), vec![q(0), q(7)]);
    }

    #[test]
    fn non_question_is_not_idempotent() {
        let e = gen("mvchain 4");
        let half = Rational::new(1.into(), 2.into());
        let x = make_observable(&e, [(q(0), Element(1)), (half, Element(2)), (q(1), Element(1))]).unwrap();
        assert!(!is_question(&e, &x).unwrap());
        assert_ne!(power(&e, &x, 2), x);
    }

    #[test]
    fn sharpness_of_observables() {
        let e = gen("mvchain 4");
        assert!(!is_sharp_observable(&e, &question(&e, Element(1))).unwrap());
        assert!(is_sharp_observable(&e, &question(&e, e.one())).unwrap());
        let f = gen("fano");
        assert!(is_sharp_observable(&f, &question(&f, Element(3))).unwrap());
    }

    #[test]
    fn ranges() {
        let e = gen("boolean 3");
        let a = Element(3);
        let r = range(&e, &question(&e, a));
        assert_eq!(r.elements().collect::<Vec<_>>(), vec![Element(0), a, Element(4), Element(7)]);
        let f = gen("fano");
        let line: Vec<Element> = ["p1", "p2", "p4"].iter().map(|l| f.find(l).unwrap()).collect();
        let x = make_observable(&f, line.iter().enumerate().map(|(i, &a)| (q(i as i64), a))).unwrap();
        assert_eq!(range(&f, &x).len(), 8);
        assert!(verify_range_boolean(&f, &x).unwrap());
        assert!(matches!(
            verify_range_boolean(&gen("mvchain 2"), &question(&gen("mvchain 2"), Element(1))),
            Err(ObservableError::NotOrthoalgebra(_))
        ));
    }

    #[test]
    fn two_point_function() {
        let d = SetFamily::from_sets(2, 0..4);
        let f = resolution_to_function(&d, &[(q(1), 0b01), (q(2), 0b11)]).unwrap();
        assert_eq!(f.values, vec![q(1), q(2)]);
        let c = resolution_to_function(&d, &[(q(3), 0b11)]).unwrap();
        assert_eq!(c.values, vec![q(3), q(3)]);
        let not_dynkin = SetFamily::from_sets(2, [0, 1, 3]);
        assert_eq!(resolution_to_function(&not_dynkin, &[(q(3), 0b11)]), Err(ObservableError::NotDynkin));
    }

    #[test]
    fn function_into_proper_dynkin_system() {
        let d = SetFamily::from_points(4, &[&[1, 2], &[2, 3]]).dynkin_closure();
        assert!(!d.is_sigma_algebra());
        let f = resolution_to_function(&d, &[(q(0), 0b0011), (q(1), 0b1111)]).unwrap();
        assert_eq!(f.values, vec![q(0), q(0), q(1), q(1)]);
        assert!(resolution_to_function(&d, &[(q(0), 0b0001), (q(1), 0b1111)]).is_err());
    }

    #[test]
    fn spectra_enumeration() {
        let e = gen("boolean 2");
        // Ordered partitions of unity into 2 labeled parts: 4 (1,0 / 0,1 / a,a' / a',a).
        assert_eq!(observables_with_spectrum_in(&e, &[q(0), q(1)]).len(), 4);
    }
}
