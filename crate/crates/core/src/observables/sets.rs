//! Families of subsets of a small finite universe: π-systems, Dynkin
//! systems and σ-algebras.
//!
//! Subsets are bitmasks over points `0..n`. A family over `n` points is a
//! bitset indexed by subset mask. Families over at most 6 points also have a
//! `u64` encoding, used by the exhaustive sweeps.

use std::fmt;

use fixedbitset::FixedBitSet;

pub const MAX_UNIVERSE: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SetFamily {
    universe: usize,
    members: FixedBitSet,
}

impl SetFamily {
    pub fn new(universe: usize) -> Self {
        assert!(universe <= MAX_UNIVERSE, "universe of {universe} points is too large");
        SetFamily {
            universe,
            members: FixedBitSet::with_capacity(1 << universe),
        }
    }

    pub fn from_sets(universe: usize, sets: impl IntoIterator<Item = u32>) -> Self {
        let mut f = SetFamily::new(universe);
        for s in sets {
            f.insert(s);
        }
        f
    }

    /// Sets given as lists of 1-based points.
    pub fn from_points(universe: usize, sets: &[&[usize]]) -> Self {
        SetFamily::from_sets(
            universe,
            sets.iter()
                .map(|s| s.iter().fold(0u32, |m, &p| m | 1 << (p - 1))),
        )
    }

    /// Decodes a `u64` family over at most 6 points.
    pub fn from_small(universe: usize, bits: u64) -> Self {
        assert!(universe <= 6);
        SetFamily::from_sets(universe, (0..1u32 << universe).filter(|&s| bits >> s & 1 == 1))
    }

    pub fn to_small(&self) -> Option<u64> {
        (self.universe <= 6).then(|| self.sets().fold(0u64, |b, s| b | 1 << s))
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn full(&self) -> u32 {
        ((1u64 << self.universe) - 1) as u32
    }

    pub fn insert(&mut self, set: u32) -> bool {
        assert!(set <= self.full(), "set {set:#b} outside the universe");
        !self.members.put(set as usize)
    }

    pub fn contains(&self, set: u32) -> bool {
        self.members.contains(set as usize)
    }

    pub fn len(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_clear()
    }

    pub fn sets(&self) -> impl Iterator<Item = u32> + '_ {
        self.members.ones().map(|s| s as u32)
    }

    pub fn is_subfamily(&self, other: &SetFamily) -> bool {
        self.universe == other.universe && self.members.is_subset(&other.members)
    }

    pub fn is_pi_system(&self) -> bool {
        let sets: Vec<u32> = self.sets().collect();
        sets.iter()
            .all(|&a| sets.iter().all(|&b| self.contains(a & b)))
    }

    /// Contains the universe, closed under complement and disjoint union.
    pub fn is_dynkin(&self) -> bool {
        let full = self.full();
        let sets: Vec<u32> = self.sets().collect();
        self.contains(full)
            && sets.iter().all(|&a| {
                self.contains(full & !a)
                    && sets
                        .iter()
                        .all(|&b| a & b != 0 || self.contains(a | b))
            })
    }

    pub fn is_sigma_algebra(&self) -> bool {
        let sets: Vec<u32> = self.sets().collect();
        self.contains(0)
            && sets.iter().all(|&a| {
                self.contains(self.full() & !a) && sets.iter().all(|&b| self.contains(a | b))
            })
    }

    /// Least Dynkin system containing the family.
    pub fn dynkin_closure(&self) -> SetFamily {
        let full = self.full();
        let mut out = SetFamily::new(self.universe);
        let mut list: Vec<u32> = Vec::new();
        let mut queue: Vec<u32> = self.sets().chain([full]).collect();
        while let Some(a) = queue.pop() {
            if !out.insert(a) {
                continue;
            }
            queue.push(full & !a);
            for &b in &list {
                if a & b == 0 {
                    queue.push(a | b);
                }
            }
            list.push(a);
        }
        out
    }

    /// Least σ-algebra containing the family: all unions of the atoms of the
    /// partition the family induces.
    pub fn sigma_closure(&self) -> SetFamily {
        let atoms = self.atoms();
        let mut out = SetFamily::new(self.universe);
        for pick in 0u64..1 << atoms.len() {
            let set = atoms
                .iter()
                .enumerate()
                .filter(|(i, _)| pick >> i & 1 == 1)
                .fold(0, |m, (_, &a)| m | a);
            out.insert(set);
        }
        out
    }

    /// Atoms of the partition of the universe generated by the family.
    pub fn atoms(&self) -> Vec<u32> {
        let full = self.full();
        let mut atoms: Vec<u32> = Vec::new();
        let mut covered = 0u32;
        for p in 0..self.universe {
            if covered >> p & 1 == 1 {
                continue;
            }
            let atom = self
                .sets()
                .fold(full, |m, s| if s >> p & 1 == 1 { m & s } else { m & !s });
            covered |= atom;
            atoms.push(atom);
        }
        atoms
    }
}

impl fmt::Display for SetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, s) in self.sets().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(&format_set(s))?;
        }
        f.write_str("}")
    }
}

/// `{1,3}` for mask `0b101`.
pub fn format_set(mask: u32) -> String {
    let points: Vec<String> = (0..32)
        .filter(|p| mask >> p & 1 == 1)
        .map(|p| (p + 1).to_string())
        .collect();
    format!("{{{}}}", points.join(","))
}

/// Dynkin closure of a `u64` family over at most 6 points.
pub fn dynkin_closure_small(universe: usize, family: u64) -> u64 {
    let full = (1u32 << universe) - 1;
    let mut out = 0u64;
    let mut list = [0u32; 64];
    let mut len = 0;
    let mut queue: Vec<u32> = Vec::with_capacity(64);
    queue.push(full);
    let mut rest = family;
    while rest != 0 {
        queue.push(rest.trailing_zeros());
        rest &= rest - 1;
    }
    while let Some(a) = queue.pop() {
        if out >> a & 1 == 1 {
            continue;
        }
        out |= 1 << a;
        queue.push(full & !a);
        for &b in &list[..len] {
            if a & b == 0 && out >> (a | b) & 1 == 0 {
                queue.push(a | b);
            }
        }
        list[len] = a;
        len += 1;
    }
    out
}

/// σ-algebra generated by a `u64` family over at most 6 points.
pub fn sigma_closure_small(universe: usize, family: u64) -> u64 {
    let full = (1u32 << universe) - 1;
    let mut atoms = [0u32; 6];
    let mut k = 0;
    let mut covered = 0u32;
    for p in 0..universe {
        if covered >> p & 1 == 1 {
            continue;
        }
        let mut atom = full;
        let mut rest = family;
        while rest != 0 {
            let s = rest.trailing_zeros();
            rest &= rest - 1;
            atom &= if s >> p & 1 == 1 { s } else { !s };
        }
        covered |= atom;
        atoms[k] = atom;
        k += 1;
    }
    let mut out = 0u64;
    for pick in 0u32..1 << k {
        let mut set = 0;
        for (i, &a) in atoms[..k].iter().enumerate() {
            if pick >> i & 1 == 1 {
                set |= a;
            }
        }
        out |= 1 << set;
    }
    out
}

/// Calls `visit` on every π-system (including the empty family) over a
/// universe of at most 5 points.
///
/// Subsets are decided in order of decreasing cardinality. A set is forced
/// once it is the intersection of two chosen sets; a skipped set can never
/// be forced later, since the intersection of sets no larger than it equals
/// it only if one of them is it. So every leaf is a π-system, each once.
pub fn for_each_pi_system(universe: usize, mut visit: impl FnMut(u64)) {
    assert!(universe <= 5, "exhaustive π-system enumeration needs at most 5 points");
    let mut order: Vec<u32> = (0..1u32 << universe).collect();
    order.sort_by_key(|s| (std::cmp::Reverse(s.count_ones()), *s));

    fn go(order: &[u32], chosen: u64, forced: u64, visit: &mut impl FnMut(u64)) {
        let Some((&s, rest)) = order.split_first() else {
            visit(chosen);
            return;
        };
        let mut with = forced;
        let mut c = chosen;
        while c != 0 {
            let t = c.trailing_zeros();
            c &= c - 1;
            with |= 1 << (s & t);
        }
        with |= 1 << s;
        go(rest, chosen | 1 << s, with, visit);
        if forced >> s & 1 == 0 {
            go(rest, chosen, forced, visit);
        }
    }

    go(&order, 0, 0, &mut visit);
}

pub fn is_pi_system_small(family: u64) -> bool {
    let mut a = family;
    while a != 0 {
        let x = a.trailing_zeros();
        a &= a - 1;
        let mut b = family;
        while b != 0 {
            let y = b.trailing_zeros();
            b &= b - 1;
            if family >> (x & y) & 1 == 0 {
                return false;
            }
        }
    }
    true
}
