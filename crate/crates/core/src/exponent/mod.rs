//! Exact calculus of Lebesgue exponents and polynomial weights.
//!
//! Everything here works over reduced `i64` fractions. Infinity is a
//! first-class exponent whose reciprocal is the exact rational zero, so every
//! admissibility condition can be phrased through reciprocals without ever
//! touching floating point.

mod checker;
mod functionals;

pub use checker::{
    check_convolution, check_convolution_with, check_modulation, check_multiplication,
    check_weak_proposition, region_item_conditions, Classification, Condition, ConditionTrace,
    Flavor, RangeBound, Relation, Space, Theorem, Verdict,
};
pub use functionals::{
    conjugate, g_functional, h0, h1, h2, lemma_equivalence_holds, remark_bound, young_functional,
};

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rational number used for all exponent and weight arithmetic.
pub type Rational = Ratio<i64>;

/// Shorthand for `n / d` as a reduced rational.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

/// Parses `"a/b"` or an integer literal. Decimal notation is rejected so that
/// weights reach the checker without rounding.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::RationalParse(text.to_string());
    let parse_int = |t: &str| -> Result<i64> {
        let t = t.trim();
        let digits = t.strip_prefix(['+', '-']).unwrap_or(t);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        t.parse::<i64>().map_err(|_| bad())
    };
    match s.split_once('/') {
        Some((num, den)) => {
            let num = parse_int(num)?;
            let den = parse_int(den)?;
            if den == 0 {
                return Err(bad());
            }
            Ok(Rational::new(num, den))
        }
        None => Ok(Rational::from_integer(parse_int(s)?)),
    }
}

/// Formats a rational as `"a/b"`, or `"a"` when integral.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

/// A Lebesgue exponent in `[1, inf]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Exponent {
    Finite(Rational),
    Infinite,
}

impl Exponent {
    pub const INF: Exponent = Exponent::Infinite;

    pub fn new(value: Rational) -> Result<Self> {
        if value < Rational::one() {
            return Err(Error::InvalidExponent(format_rational(&value)));
        }
        Ok(Exponent::Finite(value))
    }

    /// Integer exponent; panics if `n < 1`.
    pub fn int(n: i64) -> Self {
        Self::new(Rational::from_integer(n)).expect("exponent must be >= 1")
    }

    /// Fractional exponent `n / d`; panics outside `[1, inf)`.
    pub fn ratio(n: i64, d: i64) -> Self {
        Self::new(Rational::new(n, d)).expect("exponent must be >= 1")
    }

    /// The exponent whose reciprocal is `x`, for `x` in `[0, 1]`.
    pub fn from_reciprocal(x: Rational) -> Result<Self> {
        if x.is_zero() {
            Ok(Exponent::Infinite)
        } else if x.is_negative() || x > Rational::one() {
            Err(Error::InvalidExponent(format!("1/({})", format_rational(&x))))
        } else {
            Ok(Exponent::Finite(x.recip()))
        }
    }

    pub fn reciprocal(&self) -> Rational {
        match self {
            Exponent::Finite(p) => p.recip(),
            Exponent::Infinite => Rational::zero(),
        }
    }

    pub fn conjugate(&self) -> Exponent {
        conjugate(*self)
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Exponent::Infinite)
    }

    /// Floating value for quadrature; `inf` maps to `f64::INFINITY`.
    pub fn to_f64(&self) -> f64 {
        match self {
            Exponent::Finite(p) => rational_to_f64(p),
            Exponent::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => f.write_str(&format_rational(p)),
            Exponent::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "Inf" | "infinity" | "∞" => Ok(Exponent::Infinite),
            other => Exponent::new(parse_rational(other)?),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Exponent of a polynomial weight `<x>^w`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Weight(pub Rational);

impl Weight {
    pub fn new(n: i64, d: i64) -> Self {
        Weight(Rational::new(n, d))
    }

    pub fn int(n: i64) -> Self {
        Weight(Rational::from_integer(n))
    }

    pub fn zero() -> Self {
        Weight(Rational::zero())
    }

    pub fn value(&self) -> Rational {
        self.0
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.0)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

impl FromStr for Weight {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_rational(s).map(Weight)
    }
}

impl Serialize for Weight {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Weight {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The full parameter set: dimension, Lebesgue exponents `p`, `q` and
/// weights `s` (frequency side) and `t` (space side), each indexed 0..3
/// with index 0 belonging to the target space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParamTuple {
    pub d: u32,
    pub p: [Exponent; 3],
    pub q: [Exponent; 3],
    pub s: [Weight; 3],
    pub t: [Weight; 3],
}

impl ParamTuple {
    /// All exponents 2, all weights 0.
    pub fn new(d: u32) -> Self {
        assert!(d >= 1, "dimension must be positive");
        let two = Exponent::int(2);
        ParamTuple {
            d,
            p: [two; 3],
            q: [two; 3],
            s: [Weight::zero(); 3],
            t: [Weight::zero(); 3],
        }
    }

    pub fn with_p(mut self, p: [Exponent; 3]) -> Self {
        self.p = p;
        self
    }

    pub fn with_q(mut self, q: [Exponent; 3]) -> Self {
        self.q = q;
        self
    }

    pub fn with_s(mut self, s: [Weight; 3]) -> Self {
        self.s = s;
        self
    }

    pub fn with_t(mut self, t: [Weight; 3]) -> Self {
        self.t = t;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::InvalidParams("dimension must be positive".into()));
        }
        Ok(())
    }

    /// Young functional of the `p` exponents.
    pub fn r_p(&self) -> Rational {
        young_functional(self.p)
    }

    /// Young functional of the `q` exponents.
    pub fn r_q(&self) -> Rational {
        young_functional(self.q)
    }

    /// Swaps the space-side and frequency-side data: `p <-> q`, `t <-> s`.
    pub fn mirrored(&self) -> Self {
        ParamTuple {
            d: self.d,
            p: self.q,
            q: self.p,
            s: self.t,
            t: self.s,
        }
    }

    /// Relabels indices by `perm`: slot `k` of the result takes the data of
    /// slot `perm[k]`. Used for the duality swaps of the trilinear form.
    pub fn permuted(&self, perm: [usize; 3]) -> Self {
        let pick = |a: [Exponent; 3]| [a[perm[0]], a[perm[1]], a[perm[2]]];
        let pickw = |a: [Weight; 3]| [a[perm[0]], a[perm[1]], a[perm[2]]];
        ParamTuple {
            d: self.d,
            p: pick(self.p),
            q: pick(self.q),
            s: pickw(self.s),
            t: pickw(self.t),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_rational_accepts_fractions_and_integers() {
        assert_eq!(parse_rational("1/6").unwrap(), rat(1, 6));
        assert_eq!(parse_rational(" -3/4 ").unwrap(), rat(-3, 4));
        assert_eq!(parse_rational("2").unwrap(), rat(2, 1));
        assert_eq!(parse_rational("4/8").unwrap(), rat(1, 2));
    }

    #[test]
    fn parse_rational_rejects_decimals_and_garbage() {
        for bad in ["0.5", "1e3", "", "1/0", "a/b", "1//2", "--1"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn exponent_parse_and_display() {
        assert_eq!("inf".parse::<Exponent>().unwrap(), Exponent::INF);
        assert_eq!("3/2".parse::<Exponent>().unwrap(), Exponent::ratio(3, 2));
        assert!("1/2".parse::<Exponent>().is_err());
        assert_eq!(Exponent::ratio(4, 3).to_string(), "4/3");
        assert_eq!(Exponent::INF.to_string(), "inf");
    }

    #[test]
    fn reciprocal_of_infinity_is_zero() {
        assert_eq!(Exponent::INF.reciprocal(), Rational::zero());
        assert_eq!(Exponent::int(4).reciprocal(), rat(1, 4));
        assert_eq!(Exponent::from_reciprocal(rat(0, 1)).unwrap(), Exponent::INF);
        assert_eq!(Exponent::from_reciprocal(rat(2, 3)).unwrap(), Exponent::ratio(3, 2));
        assert!(Exponent::from_reciprocal(rat(4, 3)).is_err());
    }

    #[test]
    fn permutation_relabels_slots() {
        let params = ParamTuple::new(1)
            .with_p([Exponent::int(1), Exponent::int(2), Exponent::INF])
            .with_t([Weight::int(0), Weight::int(1), Weight::int(-2)]);
        let swapped = params.permuted([1, 0, 2]);
        assert_eq!(swapped.p, [Exponent::int(2), Exponent::int(1), Exponent::INF]);
        assert_eq!(swapped.t, [Weight::int(1), Weight::int(0), Weight::int(-2)]);
    }
}
