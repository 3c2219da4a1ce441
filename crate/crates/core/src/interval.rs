//! Exact rational intervals and normalized finite unions of them.

use std::cmp::Ordering;
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

/// Parses `"3"`, `"-2.5"`, `"7/3"` exactly.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let bad = || Error::Invalid(format!("not a rational number: {text:?}"));
    if let Some((n, d)) = t.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let negative = mantissa.starts_with('-');
    let digits = mantissa.trim_start_matches(['-', '+']);
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() || !(int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())) {
        return Err(bad());
    }
    let all: String = format!("{int}{frac}");
    let mut value = Rational::from_integer(all.parse::<i64>().map_err(|_| bad())?);
    let scale = exp - frac.len() as i32;
    let ten = Rational::from_integer(10);
    for _ in 0..scale.unsigned_abs() {
        value = if scale > 0 { value * ten } else { value / ten };
    }
    Ok(if negative { -value } else { value })
}

pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Serde adapter: accepts JSON numbers, strings or `[numer, denom]`;
/// writes integers as numbers and fractions as `"n/d"` strings.
pub mod rational_serde {
    use super::*;
    use serde_json::Value;

    pub fn from_value(v: &Value) -> Result<Rational> {
        match v {
            Value::Number(n) => parse_rational(&n.to_string()),
            Value::String(s) => parse_rational(s),
            Value::Array(pair) if pair.len() == 2 => {
                let n = pair[0].as_i64();
                let d = pair[1].as_i64();
                match (n, d) {
                    (Some(n), Some(d)) if d != 0 => Ok(Rational::new(n, d)),
                    _ => Err(Error::Invalid(format!("bad rational pair {v}"))),
                }
            }
            other => Err(Error::Invalid(format!("bad rational {other}"))),
        }
    }

    pub fn to_value(r: &Rational) -> Value {
        if r.is_integer() {
            Value::from(*r.numer())
        } else {
            Value::String(format_rational(r))
        }
    }

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        to_value(r).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let v = Value::deserialize(d)?;
        from_value(&v).map_err(serde::de::Error::custom)
    }
}

/// A bounded interval with exact rational endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawInterval")]
pub struct Interval {
    #[serde(with = "rational_serde")]
    pub lo: Rational,
    #[serde(with = "rational_serde")]
    pub hi: Rational,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

#[derive(Deserialize)]
struct RawInterval {
    #[serde(with = "rational_serde")]
    lo: Rational,
    #[serde(with = "rational_serde")]
    hi: Rational,
    lo_closed: bool,
    hi_closed: bool,
}

impl TryFrom<RawInterval> for Interval {
    type Error = Error;
    fn try_from(r: RawInterval) -> Result<Self> {
        Interval::new(r.lo, r.hi, r.lo_closed, r.hi_closed)
    }
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational, lo_closed: bool, hi_closed: bool) -> Result<Self> {
        let ok = lo < hi || (lo == hi && lo_closed && hi_closed);
        if !ok {
            return Err(Error::Invalid(format!(
                "empty interval {}",
                Interval { lo, hi, lo_closed, hi_closed }
            )));
        }
        Ok(Interval { lo, hi, lo_closed, hi_closed })
    }

    pub fn closed(lo: i64, hi: i64) -> Self {
        Interval::new(lo.into(), hi.into(), true, true).expect("lo ≤ hi")
    }

    pub fn point(v: Rational) -> Self {
        Interval { lo: v, hi: v, lo_closed: true, hi_closed: true }
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, v: &Rational) -> bool {
        let above = if self.lo_closed { *v >= self.lo } else { *v > self.lo };
        let below = if self.hi_closed { *v <= self.hi } else { *v < self.hi };
        above && below
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        lower_cmp(self, other) != Ordering::Greater && upper_cmp(other, self) != Ordering::Greater
    }
}

// A closed lower bound at v sits below an open one at v.
fn lower_cmp(a: &Interval, b: &Interval) -> Ordering {
    a.lo.cmp(&b.lo).then((!a.lo_closed).cmp(&!b.lo_closed))
}

// An open upper bound at v sits below a closed one at v.
fn upper_cmp(a: &Interval, b: &Interval) -> Ordering {
    a.hi.cmp(&b.hi).then(a.hi_closed.cmp(&b.hi_closed))
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_point() && self.lo_closed && self.hi_closed {
            return write!(f, "{{{}}}", format_rational(&self.lo));
        }
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            format_rational(&self.lo),
            format_rational(&self.hi),
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

/// A finite union of intervals in canonical form: sorted, pairwise disjoint
/// and non-adjacent. Structural equality is set equality.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "Vec<Interval>", into = "Vec<Interval>")]
pub struct IntervalSet {
    parts: Vec<Interval>,
}

impl From<Vec<Interval>> for IntervalSet {
    fn from(parts: Vec<Interval>) -> Self {
        IntervalSet::from_parts(parts)
    }
}

impl From<IntervalSet> for Vec<Interval> {
    fn from(s: IntervalSet) -> Self {
        s.parts
    }
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet::default()
    }

    pub fn from_parts(mut parts: Vec<Interval>) -> Self {
        parts.sort_by(lower_cmp);
        let mut merged: Vec<Interval> = Vec::with_capacity(parts.len());
        for p in parts {
            if let Some(last) = merged.last_mut() {
                let touches = p.lo < last.hi || (p.lo == last.hi && (last.hi_closed || p.lo_closed));
                if touches {
                    if upper_cmp(&p, last) == Ordering::Greater {
                        last.hi = p.hi;
                        last.hi_closed = p.hi_closed;
                    }
                    continue;
                }
            }
            merged.push(p);
        }
        IntervalSet { parts: merged }
    }

    pub fn points(values: impl IntoIterator<Item = Rational>) -> Self {
        IntervalSet::from_parts(values.into_iter().map(Interval::point).collect())
    }

    pub fn parts(&self) -> &[Interval] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn contains(&self, v: &Rational) -> bool {
        self.parts.iter().any(|p| p.contains(v))
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        IntervalSet::from_parts(self.parts.iter().chain(&other.parts).copied().collect())
    }

    pub fn is_subset(&self, other: &IntervalSet) -> bool {
        self.parts.iter().all(|p| other.parts.iter().any(|q| q.contains_interval(p)))
    }

    /// True when every part is a single point.
    pub fn is_discrete(&self) -> bool {
        self.parts.iter().all(Interval::is_point)
    }
}

impl FromIterator<IntervalSet> for IntervalSet {
    fn from_iter<I: IntoIterator<Item = IntervalSet>>(iter: I) -> Self {
        IntervalSet::from_parts(iter.into_iter().flat_map(|s| s.parts).collect())
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return f.write_str("∅");
        }
        // Runs of points print as one set: {-6, 1}.
        let mut first = true;
        let mut i = 0;
        while i < self.parts.len() {
            if !first {
                f.write_str(" ∪ ")?;
            }
            first = false;
            if self.parts[i].is_point() {
                let mut j = i;
                while j < self.parts.len() && self.parts[j].is_point() {
                    j += 1;
                }
                let pts: Vec<String> = self.parts[i..j].iter().map(|p| format_rational(&p.lo)).collect();
                write!(f, "{{{}}}", pts.join(", "))?;
                i = j;
            } else {
                write!(f, "{}", self.parts[i])?;
                i += 1;
            }
        }
        Ok(())
    }
}
