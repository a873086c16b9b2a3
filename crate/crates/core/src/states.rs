//! States: additive normalized `[0,1]`-valued functionals, computed exactly.
//!
//! The state space is a polytope. Its equalities (`s(1) = 1`,
//! `s(a) + s(b) = s(a + b)`) are eliminated by Gaussian elimination and the
//! remaining box constraints are handed to a double-description vertex
//! enumeration over integer rays.

use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::algebra::{EffectAlgebra, Element};
use crate::classify::{is_orthoalgebra, Check};
use crate::observables::format_rational;
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum StateError {
    #[error("state system is empty")]
    EmptyStateSystem,
    #[error("not a state: {0}")]
    InvalidState(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State {
    values: Vec<Rational>,
}

impl State {
    /// Checks range, normalization and additivity.
    pub fn new(e: &EffectAlgebra, values: Vec<Rational>) -> Result<Self, StateError> {
        if values.len() != e.size() {
            return Err(StateError::InvalidState(format!(
                "{} values for {} elements",
                values.len(),
                e.size()
            )));
        }
        if let Some(a) = e
            .elements()
            .find(|a| values[a.0].is_negative() || values[a.0] > Rational::one())
        {
            return Err(StateError::InvalidState(format!("{} is outside [0,1]", e.label(a))));
        }
        if !values[e.one().0].is_one() {
            return Err(StateError::InvalidState("s(1) is not 1".into()));
        }
        for a in e.elements() {
            for b in e.elements() {
                if let Some(c) = e.sum(a, b) {
                    if &values[a.0] + &values[b.0] != values[c.0] {
                        return Err(StateError::InvalidState(format!(
                            "s({}) + s({}) differs from s({})",
                            e.label(a),
                            e.label(b),
                            e.label(c)
                        )));
                    }
                }
            }
        }
        Ok(State { values })
    }

    pub fn value(&self, a: Element) -> &Rational {
        &self.values[a.0]
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn display(&self, e: &EffectAlgebra) -> String {
        let parts: Vec<String> = e
            .elements()
            .map(|a| format!("{}: {}", e.label(a), format_rational(self.value(a))))
            .collect();
        parts.join(", ")
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StateSystem {
    pub states: Vec<State>,
}

impl StateSystem {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StatePolytope {
    /// Affine dimension of the state space; `None` when there are no states.
    pub dimension: Option<usize>,
    pub extreme_states: StateSystem,
}

/// Solution of the equality system: `s = p + N y` for free `y`.
struct AffineSolution {
    particular: Vec<Rational>,
    /// One column per free variable, stored as rows of length `n`.
    kernel: Vec<Vec<Rational>>,
}

fn equality_rows(e: &EffectAlgebra) -> Vec<(Vec<Rational>, Rational)> {
    let n = e.size();
    let mut rows = Vec::new();
    let mut unit = vec![Rational::zero(); n];
    unit[e.one().0] = Rational::one();
    rows.push((unit, Rational::one()));
    for a in e.elements() {
        for b in e.elements().skip(a.0) {
            if let Some(c) = e.sum(a, b) {
                let mut row = vec![Rational::zero(); n];
                row[a.0] += Rational::one();
                row[b.0] += Rational::one();
                row[c.0] -= Rational::one();
                rows.push((row, Rational::zero()));
            }
        }
    }
    rows
}

/// Reduced row echelon form; returns pivot columns, or `None` if the
/// system is inconsistent.
fn rref(rows: &mut Vec<(Vec<Rational>, Rational)>, n: usize) -> Option<Vec<usize>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i].0[col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r].0[col].recip();
        for v in rows[r].0.iter_mut() {
            *v *= &inv;
        }
        rows[r].1 *= &inv;
        let (pivot_row, pivot_rhs) = rows[r].clone();
        for i in 0..rows.len() {
            if i == r || rows[i].0[col].is_zero() {
                continue;
            }
            let f = rows[i].0[col].clone();
            for (v, pv) in rows[i].0.iter_mut().zip(&pivot_row) {
                *v -= &f * pv;
            }
            rows[i].1 -= &f * &pivot_rhs;
        }
        pivots.push(col);
        r += 1;
    }
    if rows[r..].iter().any(|(_, rhs)| !rhs.is_zero()) {
        return None;
    }
    rows.truncate(r);
    Some(pivots)
}

fn solve_equalities(e: &EffectAlgebra) -> Option<AffineSolution> {
    let n = e.size();
    let mut rows = equality_rows(e);
    let pivots = rref(&mut rows, n)?;
    let mut is_pivot = vec![false; n];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let free: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
    let mut particular = vec![Rational::zero(); n];
    for (row, &p) in rows.iter().zip(&pivots) {
        particular[p] = row.1.clone();
    }
    let kernel = free
        .iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); n];
            v[f] = Rational::one();
            for (row, &p) in rows.iter().zip(&pivots) {
                v[p] = -row.0[f].clone();
            }
            v
        })
        .collect();
    Some(AffineSolution { particular, kernel })
}

fn to_integer_row(row: &[Rational]) -> Vec<BigInt> {
    let lcm = row
        .iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    primitive(row.iter().map(|q| (q * &lcm).to_integer()).collect())
}

fn primitive(v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        v
    } else {
        v.into_iter().map(|x| x / &g).collect()
    }
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Rank of a set of rational rows.
fn rank(rows: Vec<Vec<Rational>>) -> usize {
    let Some(n) = rows.first().map(Vec::len) else {
        return 0;
    };
    let mut rows: Vec<(Vec<Rational>, Rational)> =
        rows.into_iter().map(|r| (r, Rational::zero())).collect();
    rref(&mut rows, n).map_or(0, |p| p.len())
}

struct Ray {
    v: Vec<BigInt>,
    zeros: FixedBitSet,
}

/// Extreme rays of the pointed cone `{x : h·x ≥ 0 for every row h}` whose
/// rows have full column rank.
fn double_description(rows: &[Vec<BigInt>], dim: usize) -> Vec<Vec<BigInt>> {
    let m = rows.len();
    // Initial simplicial cone from the first independent rows.
    let mut basis: Vec<usize> = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let mut candidate: Vec<Vec<Rational>> = basis
            .iter()
            .map(|&j| rows[j].iter().cloned().map(Rational::from_integer).collect())
            .collect();
        candidate.push(row.iter().cloned().map(Rational::from_integer).collect());
        if rank(candidate) > basis.len() {
            basis.push(i);
            if basis.len() == dim {
                break;
            }
        }
    }
    assert_eq!(basis.len(), dim, "constraint rows must have full rank");

    // Columns of the inverse of the basis matrix are the initial rays.
    let mut aug: Vec<(Vec<Rational>, Rational)> = Vec::new();
    let mut rays: Vec<Ray> = Vec::new();
    for k in 0..dim {
        aug.clear();
        for (r, &j) in basis.iter().enumerate() {
            let row: Vec<Rational> = rows[j].iter().cloned().map(Rational::from_integer).collect();
            let rhs = if r == k { Rational::one() } else { Rational::zero() };
            aug.push((row, rhs));
        }
        rref(&mut aug, dim).expect("basis is invertible");
        let sol: Vec<Rational> = aug.iter().map(|(_, rhs)| rhs.clone()).collect();
        let mut zeros = FixedBitSet::with_capacity(m);
        for (r, &j) in basis.iter().enumerate() {
            if r != k {
                zeros.insert(j);
            }
        }
        rays.push(Ray {
            v: to_integer_row(&sol),
            zeros,
        });
    }
    let mut in_basis = vec![false; m];
    for &j in &basis {
        in_basis[j] = true;
    }

    for (i, h) in rows.iter().enumerate() {
        if in_basis[i] {
            continue;
        }
        let values: Vec<BigInt> = rays.iter().map(|r| dot(h, &r.v)).collect();
        let mut next: Vec<Ray> = Vec::new();
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        for (k, val) in values.iter().enumerate() {
            if val.is_positive() {
                pos.push(k);
            } else if val.is_negative() {
                neg.push(k);
            }
        }
        for &p in &pos {
            for &q in &neg {
                let mut common = rays[p].zeros.clone();
                common.intersect_with(&rays[q].zeros);
                if common.count_ones(..) + 2 < dim {
                    continue;
                }
                let adjacent = rays.iter().enumerate().all(|(k, r)| {
                    k == p || k == q || !common.is_subset(&r.zeros)
                });
                if !adjacent {
                    continue;
                }
                let v: Vec<BigInt> = rays[q]
                    .v
                    .iter()
                    .zip(&rays[p].v)
                    .map(|(x, y)| &values[p] * x - &values[q] * y)
                    .collect();
                common.insert(i);
                next.push(Ray {
                    v: primitive(v),
                    zeros: common,
                });
            }
        }
        for (k, mut r) in rays.into_iter().enumerate() {
            if values[k].is_zero() {
                r.zeros.insert(i);
                next.push(r);
            } else if values[k].is_positive() {
                next.push(r);
            }
        }
        rays = next;
    }
    rays.into_iter().map(|r| r.v).collect()
}

/// The state polytope: all states of `e`, by their extreme points.
pub fn state_polytope(e: &EffectAlgebra) -> StatePolytope {
    let empty = StatePolytope {
        dimension: None,
        extreme_states: StateSystem::default(),
    };
    let Some(sol) = solve_equalities(e) else {
        return empty;
    };
    let n = e.size();
    let d = sol.kernel.len();
    // Homogenized rows over (y, t): 0 ≤ p_i t + N_i y ≤ t, and t ≥ 0.
    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    for i in 0..n {
        let ni: Vec<Rational> = sol.kernel.iter().map(|col| col[i].clone()).collect();
        let mut lower = ni.clone();
        lower.push(sol.particular[i].clone());
        let mut upper: Vec<Rational> = ni.iter().map(|x| -x).collect();
        upper.push(Rational::one() - &sol.particular[i]);
        for row in [lower, upper] {
            let row = to_integer_row(&row);
            if row.iter().any(|x| !x.is_zero()) && !rows.contains(&row) {
                rows.push(row);
            }
        }
    }
    let mut t_row = vec![BigInt::zero(); d + 1];
    t_row[d] = BigInt::one();
    if !rows.contains(&t_row) {
        rows.push(t_row);
    }
    let rays = double_description(&rows, d + 1);

    let mut states: Vec<State> = rays
        .into_iter()
        .filter(|r| r[d].is_positive())
        .map(|r| {
            let t = Rational::from_integer(r[d].clone());
            let y: Vec<Rational> = r[..d]
                .iter()
                .map(|x| Rational::from_integer(x.clone()) / &t)
                .collect();
            let values = (0..n)
                .map(|i| {
                    sol.kernel
                        .iter()
                        .zip(&y)
                        .fold(sol.particular[i].clone(), |acc, (col, yk)| acc + &col[i] * yk)
                })
                .collect();
            State::new(e, values).expect("vertex satisfies the constraints")
        })
        .collect();
    states.sort();
    states.dedup();
    if states.is_empty() {
        return empty;
    }
    let base = states[0].values.clone();
    let dimension = rank(
        states[1..]
            .iter()
            .map(|s| s.values.iter().zip(&base).map(|(a, b)| a - b).collect())
            .collect(),
    );
    StatePolytope {
        dimension: Some(dimension),
        extreme_states: StateSystem { states },
    }
}

/// Whether `s` is an extreme point of the state space: the equalities plus
/// the bounds tight at `s` determine it uniquely.
pub fn is_extreme(e: &EffectAlgebra, s: &State) -> bool {
    let n = e.size();
    let mut rows: Vec<Vec<Rational>> = equality_rows(e).into_iter().map(|(r, _)| r).collect();
    for a in e.elements() {
        let v = s.value(a);
        if v.is_zero() || v.is_one() {
            let mut unit = vec![Rational::zero(); n];
            unit[a.0] = Rational::one();
            rows.push(unit);
        }
    }
    rank(rows) == n
}

/// `s(a) ≤ s(b)` for all `s` forces `a ≤ b`; the witness is a pair that is
/// ordered by every state but not by `≤`.
pub fn is_order_determining(e: &EffectAlgebra, system: &StateSystem) -> Check {
    for a in e.elements() {
        for b in e.elements() {
            if !e.leq(a, b) && system.states.iter().all(|s| s.value(a) <= s.value(b)) {
                return Check::fail(vec![a, b]);
            }
        }
    }
    Check::pass()
}

/// Every `a > 0` has a state with `s(a) = 1`; the witness is an element no
/// state sends to 1.
pub fn is_full(e: &EffectAlgebra, system: &StateSystem) -> Check {
    match e
        .elements()
        .filter(|&a| a != e.zero())
        .find(|&a| !system.states.iter().any(|s| s.value(a).is_one()))
    {
        Some(a) => Check::fail(vec![a]),
        None => Check::pass(),
    }
}

/// `ā(s) = s(a)` over a state system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClanTable {
    /// `functions[a][k]` is the value of state `k` at `a`.
    pub functions: Vec<Vec<Rational>>,
    pub is_injective: bool,
    /// `a ≤ b` iff `ā ≤ b̄` pointwise.
    pub is_iso_onto_image: bool,
    /// The image contains 1, is closed under `1 − f`, and under `f + g`
    /// whenever `f ≤ 1 − g`.
    pub clan_axioms_hold: bool,
}

pub fn clan_embedding(e: &EffectAlgebra, system: &StateSystem) -> Result<ClanTable, StateError> {
    if system.is_empty() {
        return Err(StateError::EmptyStateSystem);
    }
    let functions: Vec<Vec<Rational>> = e
        .elements()
        .map(|a| system.states.iter().map(|s| s.value(a).clone()).collect())
        .collect();
    let k = system.len();
    let pointwise_leq = |f: &[Rational], g: &[Rational]| f.iter().zip(g).all(|(x, y)| x <= y);

    let is_injective = e
        .elements()
        .all(|a| e.elements().skip(a.0 + 1).all(|b| functions[a.0] != functions[b.0]));
    let is_iso_onto_image = e.elements().all(|a| {
        e.elements()
            .all(|b| e.leq(a, b) == pointwise_leq(&functions[a.0], &functions[b.0]))
    });

    let ones = vec![Rational::one(); k];
    let image_has = |f: &[Rational]| functions.iter().any(|g| g == f);
    let mut clan_axioms_hold = image_has(&ones);
    for f in &functions {
        let comp: Vec<Rational> = f.iter().map(|x| Rational::one() - x).collect();
        clan_axioms_hold &= image_has(&comp);
        for g in &functions {
            let g_comp: Vec<Rational> = g.iter().map(|x| Rational::one() - x).collect();
            if pointwise_leq(f, &g_comp) {
                let sum: Vec<Rational> = f.iter().zip(g).map(|(x, y)| x + y).collect();
                clan_axioms_hold &= image_has(&sum);
            }
        }
    }
    Ok(ClanTable {
        functions,
        is_injective,
        is_iso_onto_image,
        clan_axioms_hold,
    })
}

/// If the extreme states are full, `e` must be an orthoalgebra. Returns
/// whether the implication holds for `e`.
pub fn check_full_implies_orthoalgebra(e: &EffectAlgebra) -> bool {
    let states = state_polytope(e).extreme_states;
    states.is_empty() || !is_full(e, &states).holds() || is_orthoalgebra(e).holds()
}

/// Parses `label: p/q` pairs separated by commas, semicolons or newlines.
/// Labels may themselves contain commas (`{1,2}: 1/2`); values may not.
pub fn parse_state(e: &EffectAlgebra, text: &str) -> Result<State, StateError> {
    let invalid = |msg: String| StateError::InvalidState(msg);
    let mut values: Vec<Option<Rational>> = vec![None; e.size()];
    let pieces: Vec<&str> = text.split(':').collect();
    if pieces.len() < 2 {
        return Err(invalid(format!("expected 'label: value' in '{}'", text.trim())));
    }
    let mut label = pieces[0].trim();
    for (i, piece) in pieces[1..].iter().enumerate() {
        let last = i + 2 == pieces.len();
        let (value, next) = if last {
            (piece.trim().trim_end_matches([',', ';']), "")
        } else {
            piece
                .trim_start()
                .split_once([',', ';', '\n'])
                .ok_or_else(|| invalid(format!("missing separator after '{}'", piece.trim())))?
        };
        let a = e
            .find(label)
            .ok_or_else(|| invalid(format!("unknown label '{label}'")))?;
        let q = crate::observables::parse_rational(value)
            .ok_or_else(|| invalid(format!("bad value '{}'", value.trim())))?;
        if values[a.0].replace(q).is_some() {
            return Err(invalid(format!("label '{label}' given twice")));
        }
        label = next.trim();
    }
    let values: Option<Vec<Rational>> = values.into_iter().collect();
    let values = values.ok_or_else(|| StateError::InvalidState("missing values".into()))?;
    State::new(e, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{generate, GeneratorSpec};

    fn gen(text: &str) -> EffectAlgebra {
        generate(&GeneratorSpec::parse(text).unwrap()).unwrap()
    }

    fn frac(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn chain_has_unique_state() {
        for n in 2..=8 {
            let e = gen(&format!("mvchain {n}"));
            let p = state_polytope(&e);
            assert_eq!(p.dimension, Some(0));
            assert_eq!(p.extreme_states.len(), 1);
            let s = &p.extreme_states.states[0];
            for k in 0..=n {
                assert_eq!(s.value(Element(k as usize)), &frac(k, n));
            }
        }
    }

    #[test]
    fn boolean_states_are_atom_indicators() {
        let e = gen("boolean 3");
        let p = state_polytope(&e);
        assert_eq!(p.dimension, Some(2));
        assert_eq!(p.extreme_states.len(), 3);
        for s in &p.extreme_states.states {
            assert!(is_extreme(&e, s));
            let ones = [1, 2, 4].iter().filter(|&&a| s.value(Element(a)).is_one()).count();
            assert_eq!(ones, 1);
        }
        assert!(is_order_determining(&e, &p.extreme_states).holds());
        assert!(is_full(&e, &p.extreme_states).holds());
        assert!(check_full_implies_orthoalgebra(&e));
    }

    #[test]
    fn chain_state_is_order_determining_not_full() {
        let e = gen("mvchain 4");
        let s = state_polytope(&e).extreme_states;
        assert!(is_order_determining(&e, &s).holds());
        assert_eq!(is_full(&e, &s).witness(), Some(&[Element(1)][..]));
        let clan = clan_embedding(&e, &s).unwrap();
        assert!(clan.is_injective && clan.is_iso_onto_image && clan.clan_axioms_hold);
        assert!(check_full_implies_orthoalgebra(&gen("mvchain 2")));
    }

    #[test]
    fn clan_of_boolean_square() {
        let e = gen("boolean 2");
        let s = state_polytope(&e).extreme_states;
        let clan = clan_embedding(&e, &s).unwrap();
        assert!(clan.is_injective && clan.is_iso_onto_image && clan.clan_axioms_hold);
        assert_eq!(clan_embedding(&e, &StateSystem::default()), Err(StateError::EmptyStateSystem));
    }

    #[test]
    fn state_validation() {
        let e = gen("mvchain 2");
        assert!(State::new(&e, vec![frac(0, 1), frac(1, 2), frac(1, 1)]).is_ok());
        assert!(State::new(&e, vec![frac(0, 1), frac(1, 3), frac(1, 1)]).is_err());
        let s = parse_state(&e, "0: 0, 1/2: 1/2, 1: 1").unwrap();
        let b = gen("evenomp 4");
        let t = state_polytope(&b).extreme_states.states[0].clone();
        assert_eq!(parse_state(&b, &t.display(&b)).unwrap(), t);
        assert!(parse_state(&e, "0: 0, 1/2: 1/2").is_err());
        assert!(parse_state(&e, "0: 0, 0: 0, 1/2: 1/2, 1: 1").is_err());
        assert_eq!(s.value(Element(1)), &frac(1, 2));
    }

    #[test]
    fn fano_states() {
        let e = gen("fano");
        let p = state_polytope(&e);
        for s in &p.extreme_states.states {
            assert!(is_extreme(&e, s));
        }
        assert!(!p.extreme_states.is_empty());
    }
}
