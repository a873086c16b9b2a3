//! Finite unions of rational-endpoint intervals.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("cannot parse interval set at byte {offset}: {message}")]
pub struct IntervalParseError {
    pub offset: usize,
    pub message: String,
}

/// A finite endpoint with its closedness; `None` stands for ±∞.
type End = Option<(Rational, bool)>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: End,
    hi: End,
}

impl Interval {
    /// `None` as `lo` is −∞, as `hi` is +∞. Returns `None` when empty.
    pub fn new(lo: End, hi: End) -> Option<Self> {
        let iv = Interval { lo, hi };
        (!iv.is_empty()).then_some(iv)
    }

    pub fn point(t: Rational) -> Self {
        Interval {
            lo: Some((t.clone(), true)),
            hi: Some((t, true)),
        }
    }

    pub fn lower(&self) -> Option<(&Rational, bool)> {
        self.lo.as_ref().map(|(v, c)| (v, *c))
    }

    pub fn upper(&self) -> Option<(&Rational, bool)> {
        self.hi.as_ref().map(|(v, c)| (v, *c))
    }

    fn is_empty(&self) -> bool {
        match (&self.lo, &self.hi) {
            (Some((l, lc)), Some((h, hc))) => l > h || (l == h && !(*lc && *hc)),
            _ => false,
        }
    }

    pub fn contains(&self, t: &Rational) -> bool {
        let above = match &self.lo {
            None => true,
            Some((l, c)) => t > l || (*c && t == l),
        };
        let below = match &self.hi {
            None => true,
            Some((h, c)) => t < h || (*c && t == h),
        };
        above && below
    }
}

fn cmp_lower(a: &End, b: &End) -> Ordering {
    match (a, b) {
        (None, None) => Ordering::Equal,
        (None, _) => Ordering::Less,
        (_, None) => Ordering::Greater,
        // At a shared value a closed lower end starts earlier.
        (Some((x, xc)), Some((y, yc))) => x.cmp(y).then(yc.cmp(xc)),
    }
}

fn cmp_upper(a: &End, b: &End) -> Ordering {
    match (a, b) {
        (None, None) => Ordering::Equal,
        (None, _) => Ordering::Greater,
        (_, None) => Ordering::Less,
        (Some((x, xc)), Some((y, yc))) => x.cmp(y).then(xc.cmp(yc)),
    }
}

/// Whether an interval ending at `hi` overlaps or touches one starting at `lo`.
fn joins(hi: &End, lo: &End) -> bool {
    match (hi, lo) {
        (None, _) | (_, None) => true,
        (Some((h, hc)), Some((l, lc))) => l < h || (l == h && (*hc || *lc)),
    }
}

/// A Borel set at finite scale: sorted, disjoint, non-touching intervals.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct IntervalSet {
    pieces: Vec<Interval>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet { pieces: Vec::new() }
    }

    pub fn reals() -> Self {
        IntervalSet {
            pieces: vec![Interval { lo: None, hi: None }],
        }
    }

    /// `(−∞, t)`.
    pub fn below(t: Rational) -> Self {
        Self::from_intervals([Interval {
            lo: None,
            hi: Some((t, false)),
        }])
    }

    pub fn point(t: Rational) -> Self {
        Self::from_intervals([Interval::point(t)])
    }

    pub fn points(ts: impl IntoIterator<Item = Rational>) -> Self {
        Self::from_intervals(ts.into_iter().map(Interval::point))
    }

    pub fn from_intervals(items: impl IntoIterator<Item = Interval>) -> Self {
        let mut items: Vec<Interval> = items.into_iter().filter(|i| !i.is_empty()).collect();
        items.sort_by(|a, b| cmp_lower(&a.lo, &b.lo).then(cmp_upper(&a.hi, &b.hi)));
        let mut pieces: Vec<Interval> = Vec::with_capacity(items.len());
        for iv in items {
            match pieces.last_mut() {
                Some(last) if joins(&last.hi, &iv.lo) => {
                    if cmp_upper(&iv.hi, &last.hi) == Ordering::Greater {
                        last.hi = iv.hi;
                    }
                }
                _ => pieces.push(iv),
            }
        }
        IntervalSet { pieces }
    }

    pub fn pieces(&self) -> &[Interval] {
        &self.pieces
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn contains(&self, t: &Rational) -> bool {
        self.pieces.iter().any(|p| p.contains(t))
    }

    pub fn complement(&self) -> Self {
        let mut out = Vec::with_capacity(self.pieces.len() + 1);
        let mut lo: End = None;
        let mut open_start = true;
        for p in &self.pieces {
            if let Some((v, c)) = &p.lo {
                let gap = Interval {
                    lo: if open_start { None } else { lo.clone() },
                    hi: Some((v.clone(), !c)),
                };
                if !gap.is_empty() {
                    out.push(gap);
                }
            }
            match &p.hi {
                None => return IntervalSet::from_intervals(out),
                Some((v, c)) => {
                    lo = Some((v.clone(), !c));
                    open_start = false;
                }
            }
        }
        out.push(Interval {
            lo: if open_start { None } else { lo },
            hi: None,
        });
        IntervalSet::from_intervals(out)
    }

    pub fn union(&self, other: &Self) -> Self {
        IntervalSet::from_intervals(self.pieces.iter().chain(&other.pieces).cloned())
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.complement().union(&other.complement()).complement()
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.intersection(&other.complement())
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.difference(other).is_empty()
    }

    pub fn parse(text: &str) -> Result<Self, IntervalParseError> {
        Parser { text, pos: 0 }.set()
    }
}

impl FromStr for IntervalSet {
    type Err = IntervalParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        IntervalSet::parse(s)
    }
}

/// Rationals print as integers or `p/q`.
pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.to_integer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Accepts `3`, `-3/4`, `0.25`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        return (!d.is_zero()).then(|| Rational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let negative = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let n: BigInt = digits.parse().ok()?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let q = Rational::new(n, d);
        return Some(if negative { -q } else { q });
    }
    s.parse::<BigInt>().ok().map(Rational::from_integer)
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pieces.is_empty() {
            return f.write_str("empty");
        }
        for (i, p) in self.pieces.iter().enumerate() {
            if i > 0 {
                f.write_str(" U ")?;
            }
            match &p.lo {
                None => f.write_str("(-inf,")?,
                Some((v, c)) => write!(f, "{}{},", if *c { '[' } else { '(' }, format_rational(v))?,
            }
            match &p.hi {
                None => f.write_str("inf)")?,
                Some((v, c)) => write!(f, "{}{}", format_rational(v), if *c { ']' } else { ')' })?,
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, IntervalParseError> {
        Err(IntervalParseError {
            offset: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.text[self.pos..].starts_with(char::is_whitespace) {
            self.pos += self.text[self.pos..].chars().next().unwrap().len_utf8();
        }
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.text[self.pos..].starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn set(mut self) -> Result<IntervalSet, IntervalParseError> {
        self.skip_ws();
        let rest = self.text[self.pos..].trim();
        match rest {
            "empty" | "{}" => return Ok(IntervalSet::empty()),
            "R" | "reals" => return Ok(IntervalSet::reals()),
            _ => {}
        }
        let mut items = vec![self.interval()?];
        while self.eat("U") {
            items.push(self.interval()?);
        }
        self.skip_ws();
        if self.pos != self.text.len() {
            return self.err("trailing input");
        }
        Ok(IntervalSet::from_intervals(items))
    }

    fn interval(&mut self) -> Result<Interval, IntervalParseError> {
        self.skip_ws();
        if self.eat("{") {
            let t = self.number(&['}'])?;
            if !self.eat("}") {
                return self.err("expected '}'");
            }
            let t = t.ok_or_else(|| IntervalParseError {
                offset: self.pos,
                message: "a point must be finite".into(),
            })?;
            return Ok(Interval::point(t));
        }
        let lc = if self.eat("[") {
            true
        } else if self.eat("(") {
            false
        } else {
            return self.err("expected '(' or '['");
        };
        let lo = self.number(&[','])?;
        if !self.eat(",") {
            return self.err("expected ','");
        }
        let hi = self.number(&[')', ']'])?;
        let hc = if self.eat("]") {
            true
        } else if self.eat(")") {
            false
        } else {
            return self.err("expected ')' or ']'");
        };
        let lo = match lo {
            Some(v) => Some((v, lc)),
            None if lc => return self.err("-inf cannot be a closed endpoint"),
            None => None,
        };
        let hi = match hi {
            Some(v) => Some((v, hc)),
            None if hc => return self.err("inf cannot be a closed endpoint"),
            None => None,
        };
        if let (Some((l, _)), Some((h, _))) = (&lo, &hi) {
            if l > h {
                return self.err("lower endpoint exceeds upper endpoint");
            }
        }
        Ok(Interval { lo, hi })
    }

    /// A rational, or `None` for an infinite endpoint.
    fn number(&mut self, stops: &[char]) -> Result<Option<Rational>, IntervalParseError> {
        self.skip_ws();
        let start = self.pos;
        let len = self.text[start..]
            .find(|c: char| stops.contains(&c))
            .unwrap_or(self.text.len() - start);
        let token = self.text[start..start + len].trim();
        let value = match token {
            "-inf" | "+inf" | "inf" => None,
            _ => match parse_rational(token) {
                Some(q) => Some(q),
                None => return self.err(format!("bad number '{token}'")),
            },
        };
        self.pos = start + len;
        Ok(value)
    }
}
