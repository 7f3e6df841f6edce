//! Coefficient fields.
//!
//! Everything in the crate is generic over [`Coeff`], an exact field with a
//! textual literal form. Two implementations ship: arbitrary precision
//! rationals (the default, see [`crate::Rational`]) and `i64` ratios, which
//! are faster but panic on overflow.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Num, Signed, Zero};

pub trait Coeff:
    Clone + Debug + Display + PartialEq + Num + std::ops::Neg<Output = Self> + Signed + Send + Sync + 'static
{
    fn from_int(n: i64) -> Self;

    /// Parses `"3"`, `"-3"` or `"2/3"`.
    fn parse_literal(text: &str) -> Option<Self>;

    /// Rescales a vector so that its entries are coprime integers and the
    /// first nonzero entry is positive. Zero vectors are left alone.
    fn make_primitive(v: &mut [Self]);
}

fn parse_ratio<T>(text: &str) -> Option<Ratio<T>>
where
    T: Clone + Integer + std::str::FromStr,
{
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: T = num.parse().ok()?;
    let den: T = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Ratio::new(num, den))
}

fn primitive_ratio<T>(v: &mut [Ratio<T>])
where
    T: Clone + Integer + Signed,
{
    let Some(lead) = v.iter().find(|c| !c.is_zero()).cloned() else {
        return;
    };
    let mut den_lcm = T::one();
    for c in v.iter().filter(|c| !c.is_zero()) {
        den_lcm = den_lcm.lcm(c.denom());
    }
    let mut num_gcd = T::zero();
    for c in v.iter().filter(|c| !c.is_zero()) {
        let n = c.numer().clone() * (den_lcm.clone() / c.denom().clone());
        num_gcd = num_gcd.gcd(&n);
    }
    let mut factor = Ratio::new(den_lcm, num_gcd);
    if lead.is_negative() {
        factor = -factor;
    }
    for c in v.iter_mut() {
        *c = c.clone() * factor.clone();
    }
}

impl Coeff for Ratio<BigInt> {
    fn from_int(n: i64) -> Self {
        Ratio::from_integer(BigInt::from(n))
    }

    fn parse_literal(text: &str) -> Option<Self> {
        parse_ratio(text)
    }

    fn make_primitive(v: &mut [Self]) {
        primitive_ratio(v)
    }
}

impl Coeff for Ratio<i64> {
    fn from_int(n: i64) -> Self {
        Ratio::from_integer(n)
    }

    fn parse_literal(text: &str) -> Option<Self> {
        parse_ratio(text)
    }

    fn make_primitive(v: &mut [Self]) {
        primitive_ratio(v)
    }
}

/// `n choose k` as a coefficient.
pub(crate) fn binomial<C: Coeff>(n: u32, k: u32) -> C {
    let mut acc: i64 = 1;
    for i in 0..k as i64 {
        acc = acc * (n as i64 - i) / (i + 1);
    }
    C::from_int(acc)
}

pub(crate) fn sign<C: Coeff>(negative: bool) -> C {
    if negative {
        -C::one()
    } else {
        C::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    #[test]
    fn literals_are_stored_in_lowest_terms() {
        let r = Rational::parse_literal("4/6").unwrap();
        assert_eq!(r.to_string(), "2/3");
        let z = Rational::parse_literal("0/5").unwrap();
        assert_eq!(z.denom(), &BigInt::from(1));
        assert!(Rational::parse_literal("1/0").is_none());
        let n = Rational::parse_literal("3/-6").unwrap();
        assert_eq!(n.to_string(), "-1/2");
    }

    #[test]
    fn primitive_scaling() {
        let mut v: Vec<Rational> = ["1", "2/3", "1/3"].iter().map(|s| Rational::parse_literal(s).unwrap()).collect();
        Rational::make_primitive(&mut v);
        let s: Vec<String> = v.iter().map(|c| c.to_string()).collect();
        assert_eq!(s, ["3", "2", "1"]);

        let mut w: Vec<Ratio<i64>> = vec![Ratio::from(0), Ratio::new(-4, 1), Ratio::new(6, 1)];
        Ratio::<i64>::make_primitive(&mut w);
        assert_eq!(w, vec![Ratio::from(0), Ratio::from(2), Ratio::from(-3)]);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial::<Rational>(5, 2), Rational::from_int(10));
        assert_eq!(binomial::<Rational>(3, 0), Rational::from_int(1));
        assert_eq!(binomial::<Rational>(7, 7), Rational::from_int(1));
    }
}
