//! Slopes on the boundary torus of the figure-eight knot complement.
//!
//! A slope `q/p` names the unoriented curve class `p·l + q·m`, where `l` is the
//! longitude and `m` the meridian. The meridian itself is the slope `∞`.
//!
//! Orientations of `l` and `m` are fixed so that the fibre of `M(0)` has slope `0`
//! and the punctured Klein bottle closes up in `M(4)`. Reversing both gives the
//! mirror convention; every statement here holds under `r ↦ -r` applied throughout.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::scalar::Integer;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SlopeError {
    #[error("(0, 0) is not a curve class")]
    ZeroClass,
    #[error("cannot parse slope from {0:?}")]
    Parse(String),
}

/// A reduced curve class `p·l + q·m` with `p ≥ 0`, `gcd(p, q) = 1` and `∞ = (0, 1)`.
///
/// Ordering is by `p`, then by `q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slope<T> {
    p: T,
    q: T,
}

impl<T: Integer> Slope<T> {
    /// Canonical representative of the class `p·l + q·m` up to sign and scale.
    pub fn reduce(p: T, q: T) -> Result<Self, SlopeError> {
        if p.is_zero() && q.is_zero() {
            return Err(SlopeError::ZeroClass);
        }
        let g = p.gcd(&q);
        let (mut p, mut q) = (p / g.clone(), q / g);
        if p.is_negative() || (p.is_zero() && q.is_negative()) {
            p = -p;
            q = -q;
        }
        Ok(Slope { p, q })
    }

    pub fn infinity() -> Self {
        Slope {
            p: T::zero(),
            q: T::one(),
        }
    }

    pub fn integer(n: T) -> Self {
        Slope { p: T::one(), q: n }
    }

    /// Coefficient of the longitude.
    pub fn p(&self) -> &T {
        &self.p
    }

    /// Coefficient of the meridian.
    pub fn q(&self) -> &T {
        &self.q
    }

    pub fn is_infinite(&self) -> bool {
        self.p.is_zero()
    }

    pub fn is_integral(&self) -> bool {
        self.p.is_one()
    }

    /// `max(p, |q|)`.
    pub fn height(&self) -> T {
        let aq = self.q.abs();
        if aq > self.p {
            aq
        } else {
            self.p.clone()
        }
    }

    /// Image under the orientation-reversing symmetry `r ↦ −r`.
    pub fn mirror(&self) -> Self {
        if self.is_infinite() {
            self.clone()
        } else {
            Slope {
                p: self.p.clone(),
                q: -self.q.clone(),
            }
        }
    }

    /// Geometric intersection number `|p₁q₂ − p₂q₁|`.
    pub fn intersection_number(&self, other: &Self) -> T {
        (self.p.clone() * other.q.clone() - other.p.clone() * self.q.clone()).abs()
    }

    /// Compares two finite slopes as rational numbers; `∞` sorts above everything.
    pub fn cmp_value(&self, other: &Self) -> Ordering {
        match (self.is_infinite(), other.is_infinite()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            (false, false) => (self.q.clone() * other.p.clone()).cmp(&(other.q.clone() * self.p.clone())),
        }
    }
}

/// Free-function form of [`Slope::reduce`].
pub fn reduce<T: Integer>(p: T, q: T) -> Result<Slope<T>, SlopeError> {
    Slope::reduce(p, q)
}

/// Free-function form of [`Slope::intersection_number`].
pub fn intersection_number<T: Integer>(s1: &Slope<T>, s2: &Slope<T>) -> T {
    s1.intersection_number(s2)
}

impl<T: Integer> fmt::Display for Slope<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "inf")
        } else if self.is_integral() {
            write!(f, "{}", self.q)
        } else {
            write!(f, "{}/{}", self.q, self.p)
        }
    }
}

impl<T: Integer> FromStr for Slope<T> {
    type Err = SlopeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let bad = || SlopeError::Parse(s.to_string());
        if t.eq_ignore_ascii_case("inf") || t == "∞" {
            return Ok(Slope::infinity());
        }
        let num = |x: &str| x.trim().parse::<T>().map_err(|_| bad());
        match t.split_once('/') {
            None => Ok(Slope::integer(num(t)?)),
            Some((q, p)) => {
                let (q, p) = (num(q)?, num(p)?);
                if p.is_zero() {
                    // "1/0" and friends are spelled "inf"; "0/0" is garbage.
                    return Err(bad());
                }
                Slope::reduce(p, q).map_err(|_| bad())
            }
        }
    }
}

impl<T: Integer> Serialize for Slope<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de, T: Integer> Deserialize<'de> for Slope<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Symbolic sets of filling slopes, as they appear in the catalog.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[serde(bound(serialize = "T: Integer + Serialize", deserialize = "T: Integer + Deserialize<'de>"))]
pub enum AdmissibleSet<T> {
    /// Every finite slope.
    AllRationals,
    Only {
        slope: Slope<T>,
    },
    /// Finite slopes `q/p` with `p > 1`.
    IntegerDenominatorAtLeast2,
    /// Finite slopes strictly above a finite bound.
    GreaterThan {
        bound: Slope<T>,
    },
    /// Slopes meeting `anchor` at least `n` times.
    IntersectionWithAtLeast {
        anchor: Slope<T>,
        n: T,
    },
    /// Slopes meeting `anchor` more than `n` times.
    IntersectionWithMoreThan {
        anchor: Slope<T>,
        n: T,
    },
}

impl<T: Integer> AdmissibleSet<T> {
    pub fn contains(&self, r: &Slope<T>) -> bool {
        match self {
            AdmissibleSet::AllRationals => !r.is_infinite(),
            AdmissibleSet::Only { slope } => slope == r,
            AdmissibleSet::IntegerDenominatorAtLeast2 => r.p > T::one(),
            AdmissibleSet::GreaterThan { bound } => !r.is_infinite() && r.cmp_value(bound) == Ordering::Greater,
            AdmissibleSet::IntersectionWithAtLeast { anchor, n } => &r.intersection_number(anchor) >= n,
            AdmissibleSet::IntersectionWithMoreThan { anchor, n } => &r.intersection_number(anchor) > n,
        }
    }

    /// A member of the set, showing it is nonempty.
    pub fn witness(&self) -> Option<Slope<T>> {
        match self {
            AdmissibleSet::AllRationals => Some(Slope::integer(T::zero())),
            AdmissibleSet::Only { slope } => Some(slope.clone()),
            AdmissibleSet::IntegerDenominatorAtLeast2 => Some(Slope {
                p: T::one() + T::one(),
                q: T::one(),
            }),
            AdmissibleSet::GreaterThan { bound } if bound.is_infinite() => None,
            AdmissibleSet::GreaterThan { bound } => Some(Slope::integer(bound.q.div_floor(&bound.p) + T::one())),
            AdmissibleSet::IntersectionWithAtLeast { anchor, n }
            | AdmissibleSet::IntersectionWithMoreThan { anchor, n } => {
                if anchor.is_infinite() {
                    // i(∞, q/p) = p
                    return Some(Slope {
                        p: n.abs() + T::one(),
                        q: T::one(),
                    });
                }
                // |p·k − q| is unbounded along the integer slopes k.
                let mut k = T::zero();
                loop {
                    let s = Slope::integer(k.clone());
                    if self.contains(&s) {
                        return Some(s);
                    }
                    k = k + T::one();
                }
            }
        }
    }
}

/// Free-function form of [`AdmissibleSet::contains`].
pub fn eval_admissible<T: Integer>(set: &AdmissibleSet<T>, r: &Slope<T>) -> bool {
    set.contains(r)
}

impl<T: Integer> fmt::Display for AdmissibleSet<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdmissibleSet::AllRationals => write!(f, "all rationals"),
            AdmissibleSet::Only { slope } => write!(f, "{{{slope}}}"),
            AdmissibleSet::IntegerDenominatorAtLeast2 => write!(f, "p > 1"),
            AdmissibleSet::GreaterThan { bound } => write!(f, "r > {bound}"),
            AdmissibleSet::IntersectionWithAtLeast { anchor, n } => {
                write!(f, "i(r, {anchor}) >= {n}")
            }
            AdmissibleSet::IntersectionWithMoreThan { anchor, n } => {
                write!(f, "i(r, {anchor}) > {n}")
            }
        }
    }
}

/// All reduced finite slopes `q/p` with `1 ≤ p ≤ h` and `|q| ≤ h`, ascending in `p` then `q`.
pub fn slopes_up_to_height(h: i64) -> Vec<Slope<i64>> {
    let mut out = Vec::new();
    for p in 1..=h {
        for q in -h..=h {
            if num_integer::gcd(p, q) == 1 {
                out.push(Slope { p, q });
            }
        }
    }
    out
}
