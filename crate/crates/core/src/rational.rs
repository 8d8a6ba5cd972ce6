//! Exact bounded-denominator rationals and enumeration of the sets of
//! reduced fractions in (0, 1] with denominator at most Q.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;
use std::str::FromStr;

use num_integer::Integer;

use crate::error::{Error, Result};

/// Hard cap on Q for [`enumerate_rationals`]; the set has ~3Q²/π² elements.
pub const DEFAULT_ENUMERATION_LIMIT: u64 = 100_000;

/// A reduced fraction a/q in (0, 1]: 1 ≤ a ≤ q, gcd(a, q) = 1.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct ReducedRational {
    num: u64,
    den: u64,
}

impl ReducedRational {
    /// Reduces a/q to lowest terms. Errors if q = 0 or the reduced value
    /// falls outside (0, 1].
    pub fn reduce(a: u64, q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidDenominator);
        }
        if a == 0 || a > q {
            return Err(Error::InvalidArgument(format!(
                "{a}/{q} is not in (0, 1]"
            )));
        }
        let g = a.gcd(&q);
        Ok(ReducedRational {
            num: a / g,
            den: q / g,
        })
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// The same value as a signed exact rational.
    pub fn to_frac(self) -> Frac {
        Frac {
            num: self.num as i128,
            den: self.den as i128,
        }
    }
}

impl fmt::Display for ReducedRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl fmt::Debug for ReducedRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl PartialOrd for ReducedRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ReducedRational {
    fn cmp(&self, other: &Self) -> Ordering {
        // Cross-multiplication is exact in u128.
        let lhs = self.num as u128 * other.den as u128;
        let rhs = other.num as u128 * self.den as u128;
        lhs.cmp(&rhs)
    }
}

impl FromStr for ReducedRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, q) = s
            .split_once('/')
            .ok_or_else(|| Error::Parse(format!("expected a/q, got {s:?}")))?;
        let a: u64 = a
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("bad numerator in {s:?}: {e}")))?;
        let q: u64 = q
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("bad denominator in {s:?}: {e}")))?;
        let r = ReducedRational::reduce(a, q)?;
        if r.num != a || r.den != q {
            return Err(Error::Parse(format!("{s:?} is not in reduced form")));
        }
        Ok(r)
    }
}

/// A signed exact rational with unbounded (i128) numerator and denominator,
/// always stored reduced with den > 0. Used for sums of reduced fractions
/// and for convolution support points.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd)]
pub struct Frac {
    num: i128,
    den: i128,
}

impl Frac {
    pub const ZERO: Frac = Frac { num: 0, den: 1 };

    pub fn new(num: i128, den: i128) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidDenominator);
        }
        let (mut num, mut den) = if den < 0 { (-num, -den) } else { (num, den) };
        let g = num.unsigned_abs().gcd(&den.unsigned_abs());
        if g > 1 {
            num /= g as i128;
            den /= g as i128;
        }
        Ok(Frac { num, den })
    }

    pub fn num(&self) -> i128 {
        self.num
    }

    pub fn den(&self) -> i128 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn abs(&self) -> Frac {
        Frac {
            num: self.num.abs(),
            den: self.den,
        }
    }

    pub fn neg(&self) -> Frac {
        Frac {
            num: -self.num,
            den: self.den,
        }
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Exact addition with overflow detection.
    pub fn checked_add(&self, other: &Frac) -> Result<Frac> {
        // Reduce by gcd of denominators first to keep intermediates small.
        let g = self.den.gcd(&other.den);
        let lhs_scale = other.den / g;
        let rhs_scale = self.den / g;
        let num = self
            .num
            .checked_mul(lhs_scale)
            .and_then(|x| other.num.checked_mul(rhs_scale).and_then(|y| x.checked_add(y)))
            .ok_or(Error::Overflow)?;
        let den = self.den.checked_mul(lhs_scale).ok_or(Error::Overflow)?;
        Frac::new(num, den)
    }

    pub fn checked_sub(&self, other: &Frac) -> Result<Frac> {
        self.checked_add(&other.neg())
    }

    pub fn checked_mul(&self, other: &Frac) -> Result<Frac> {
        let g1 = self.num.unsigned_abs().gcd(&other.den.unsigned_abs()) as i128;
        let g2 = other.num.unsigned_abs().gcd(&self.den.unsigned_abs()) as i128;
        let num = (self.num / g1)
            .checked_mul(other.num / g2)
            .ok_or(Error::Overflow)?;
        let den = (self.den / g2)
            .checked_mul(other.den / g1)
            .ok_or(Error::Overflow)?;
        Frac::new(num, den)
    }

    /// Fractional part in (0, 1], i.e. the value reduced mod 1 with 0 mapped to 1.
    pub fn mod_one(&self) -> Frac {
        let mut num = self.num.rem_euclid(self.den);
        if num == 0 {
            num = self.den;
        }
        Frac::new(num, self.den).expect("den > 0")
    }
}

impl Ord for Frac {
    fn cmp(&self, other: &Self) -> Ordering {
        // Denominators positive; compare via i128 products when safe,
        // falling back to f64 only never: use wide multiply via splitting.
        match (self.num.checked_mul(other.den), other.num.checked_mul(self.den)) {
            (Some(l), Some(r)) => l.cmp(&r),
            _ => {
                // Exact comparison via subtraction in big integers.
                use num_bigint::BigInt;
                let l = BigInt::from(self.num) * BigInt::from(other.den);
                let r = BigInt::from(other.num) * BigInt::from(self.den);
                l.cmp(&r)
            }
        }
    }
}

impl fmt::Display for Frac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl fmt::Debug for Frac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl From<ReducedRational> for Frac {
    fn from(r: ReducedRational) -> Self {
        r.to_frac()
    }
}

/// Exact sum of signed rational terms. The terms carry their own signs as
/// [`Frac`] values; the result's denominator divides the lcm of the inputs'.
pub fn rational_sum(terms: &[Frac]) -> Result<Frac> {
    if terms.is_empty() {
        return Err(Error::InvalidArgument("empty term list".into()));
    }
    let mut acc = Frac::ZERO;
    for t in terms {
        acc = acc.checked_add(t)?;
    }
    Ok(acc)
}

/// A finite set of reduced fractions in (0, 1], optionally constrained by a
/// denominator cap Q and a per-denominator cap n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalSet {
    elements: Vec<ReducedRational>,
    denominator_cap: u64,
    per_den_cap: Option<u64>,
}

impl RationalSet {
    /// Builds a set from arbitrary elements: sorts, deduplicates, and sets
    /// the denominator cap to the largest denominator present (at least 1).
    pub fn from_elements(mut elements: Vec<ReducedRational>) -> Self {
        elements.sort();
        elements.dedup();
        let cap = elements.iter().map(|r| r.den).max().unwrap_or(1);
        RationalSet {
            elements,
            denominator_cap: cap,
            per_den_cap: None,
        }
    }

    /// Builds a set with explicit caps, checking both invariants.
    pub fn with_caps(
        mut elements: Vec<ReducedRational>,
        denominator_cap: u64,
        per_den_cap: Option<u64>,
    ) -> Result<Self> {
        elements.sort();
        elements.dedup();
        for r in &elements {
            if r.den > denominator_cap {
                return Err(Error::Precondition(format!(
                    "element {r} exceeds denominator cap {denominator_cap}"
                )));
            }
        }
        let set = RationalSet {
            elements,
            denominator_cap,
            per_den_cap,
        };
        if let Some(n) = per_den_cap {
            for (&q, &count) in &set.denominator_counts() {
                if count > n {
                    return Err(Error::Precondition(format!(
                        "{count} elements with denominator {q} exceed per-denominator cap {n}"
                    )));
                }
            }
        }
        Ok(set)
    }

    pub fn elements(&self) -> &[ReducedRational] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn denominator_cap(&self) -> u64 {
        self.denominator_cap
    }

    pub fn per_den_cap(&self) -> Option<u64> {
        self.per_den_cap
    }

    pub fn contains(&self, r: &ReducedRational) -> bool {
        self.elements.binary_search(r).is_ok()
    }

    /// Count of elements per denominator.
    pub fn denominator_counts(&self) -> BTreeMap<u64, u64> {
        let mut counts = BTreeMap::new();
        for r in &self.elements {
            *counts.entry(r.den).or_insert(0) += 1;
        }
        counts
    }

    /// Largest per-denominator count (0 for the empty set).
    pub fn max_per_denominator(&self) -> u64 {
        self.denominator_counts().values().copied().max().unwrap_or(0)
    }

    /// Reads the one-fraction-per-line file format ('#' starts a comment).
    pub fn read_from(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        let mut elements = Vec::new();
        for line in std::io::BufReader::new(file).lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            elements.push(line.parse()?);
        }
        Ok(RationalSet::from_elements(elements))
    }

    /// Writes the set in the same format, one reduced fraction per line.
    pub fn write_to(&self, path: &Path) -> Result<()> {
        let mut file = std::fs::File::create(path)?;
        writeln!(file, "# Q={}", self.denominator_cap)?;
        for r in &self.elements {
            writeln!(file, "{r}")?;
        }
        Ok(())
    }
}

/// Enumerates all reduced fractions in (0, 1] with denominator at most Q.
/// The result has cardinality sum of phi(q) for q <= Q.
pub fn enumerate_rationals(q_max: u64) -> Result<RationalSet> {
    enumerate_rationals_with_limit(q_max, DEFAULT_ENUMERATION_LIMIT)
}

pub fn enumerate_rationals_with_limit(q_max: u64, limit: u64) -> Result<RationalSet> {
    if q_max < 1 {
        return Err(Error::InvalidArgument("Q must be at least 1".into()));
    }
    if q_max > limit {
        return Err(Error::Resource(format!(
            "Q = {q_max} exceeds enumeration limit {limit}"
        )));
    }
    let mut elements = Vec::new();
    for q in 1..=q_max {
        for a in 1..=q {
            if a.gcd(&q) == 1 {
                elements.push(ReducedRational { num: a, den: q });
            }
        }
    }
    elements.sort();
    Ok(RationalSet {
        elements,
        denominator_cap: q_max,
        per_den_cap: None,
    })
}

/// Reduced fractions with denominator exactly q.
pub fn rationals_with_denominator(q: u64) -> Result<Vec<ReducedRational>> {
    if q < 1 {
        return Err(Error::InvalidArgument("q must be at least 1".into()));
    }
    Ok((1..=q)
        .filter(|a| a.gcd(&q) == 1)
        .map(|a| ReducedRational { num: a, den: q })
        .collect())
}
