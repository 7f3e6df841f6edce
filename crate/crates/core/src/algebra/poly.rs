use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use super::monomial::Monomial;
use super::var::{Parity, Var, VarKind};
use crate::scalar::Coeff;

/// A differential superpolynomial with exact coefficients.
///
/// Stored as a map from canonical monomials to nonzero coefficients, so two
/// equal elements always have identical representations.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<C> {
    terms: BTreeMap<Monomial, C>,
}

impl<C: Coeff> Default for Poly<C> {
    fn default() -> Self {
        Poly::zero()
    }
}

impl<C: Coeff> Poly<C> {
    pub fn zero() -> Self {
        Poly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Poly::constant(C::one())
    }

    pub fn constant(c: C) -> Self {
        Poly::term(c, Monomial::one())
    }

    pub fn int(n: i64) -> Self {
        Poly::constant(C::from_int(n))
    }

    pub fn var(v: Var) -> Self {
        Poly::term(C::one(), Monomial::var(v))
    }

    pub fn term(c: C, m: Monomial) -> Self {
        let mut p = Poly::zero();
        p.add_term(m, c);
        p
    }

    /// Product of the given factors, in the given order.
    pub fn product(factors: impl IntoIterator<Item = Var>) -> Self {
        match Monomial::from_factors(factors) {
            Some((neg, m)) => Poly::term(crate::scalar::sign(neg), m),
            None => Poly::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial, C)> {
        self.terms.into_iter()
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    /// The constant term.
    pub fn constant_term(&self) -> C {
        self.coeff(&Monomial::one())
    }

    pub fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, a)| (m.clone(), a.clone() * c.clone())).collect() }
    }

    /// `self * m` with coefficient `c`.
    pub fn mul_term(&self, c: &C, m: &Monomial) -> Self {
        let mut out = Poly::zero();
        for (a, ca) in &self.terms {
            if let Some((neg, prod)) = a.mul(m) {
                let v = ca.clone() * c.clone();
                out.add_term(prod, if neg { -v } else { v });
            }
        }
        out
    }

    /// `c * m * self`.
    pub fn term_mul(&self, c: &C, m: &Monomial) -> Self {
        let mut out = Poly::zero();
        for (a, ca) in &self.terms {
            if let Some((neg, prod)) = m.mul(a) {
                let v = ca.clone() * c.clone();
                out.add_term(prod, if neg { -v } else { v });
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Poly::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Parity of the element; `None` for mixed-parity elements. Zero is even.
    pub fn parity(&self) -> Option<Parity> {
        let mut parities = self.terms.keys().map(|m| m.parity());
        let first = parities.next().unwrap_or(Parity::Even);
        parities.all(|p| p == first).then_some(first)
    }

    pub fn is_mixed_parity(&self) -> bool {
        self.parity().is_none()
    }

    /// Distinct variables occurring in the element.
    pub fn variables(&self) -> BTreeSet<Var> {
        self.terms.keys().flat_map(|m| m.vars().collect::<Vec<_>>()).collect()
    }

    pub fn contains_kind(&self, kind: VarKind) -> bool {
        self.terms.keys().any(|m| m.vars().any(|v| v.kind == kind))
    }

    /// Highest jet order of any variable of the family `name`.
    pub fn max_order_of(&self, name: &str) -> Option<u32> {
        self.terms
            .keys()
            .flat_map(|m| m.vars().filter(|v| v.name.as_str() == name).map(|v| v.order).collect::<Vec<_>>())
            .max()
    }

    pub fn max_order(&self) -> Option<u32> {
        self.terms.keys().filter_map(|m| m.max_order()).max()
    }

    /// Left partial derivative. For odd `z` the factor is anticommuted to
    /// the front before it is removed.
    pub fn pderiv(&self, z: &Var) -> Self {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            if let Some((neg, mult, rest)) = m.left_derivative(z) {
                let v = c.clone() * C::from_int(mult as i64);
                out.add_term(rest, if neg { -v } else { v });
            }
        }
        out
    }

    /// Applies the even derivation `z -> image(z)` (images placed to the
    /// left of the left derivative, which is correct for parity-preserving
    /// derivations).
    pub fn derive_with<F>(&self, mut image: F) -> Self
    where
        F: FnMut(&Var) -> Option<Poly<C>>,
    {
        let mut cache: BTreeMap<Var, Option<Poly<C>>> = BTreeMap::new();
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            for v in m.vars() {
                let img = cache.entry(v).or_insert_with(|| image(&v).filter(|p| !p.is_zero()));
                let Some(img) = img else { continue };
                let (neg, mult, rest) = m.left_derivative(&v).expect("variable occurs in monomial");
                let mut k = c.clone() * C::from_int(mult as i64);
                if neg {
                    k = -k;
                }
                for (a, ca) in img.terms() {
                    if let Some((neg2, prod)) = a.mul(&rest) {
                        let t = ca.clone() * k.clone();
                        out.add_term(prod, if neg2 { -t } else { t });
                    }
                }
            }
        }
        out
    }

    /// Replaces coefficients by `f(coefficient)`, dropping zeros.
    pub fn map_coeffs(&self, mut f: impl FnMut(&C) -> C) -> Self {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    /// Keeps the terms satisfying `keep`.
    pub fn filter_terms(&self, mut keep: impl FnMut(&Monomial) -> bool) -> Self {
        Poly { terms: self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())).collect() }
    }

    /// Substitutes a polynomial for an even variable or a same-parity
    /// polynomial for an odd one, preserving factor order.
    pub fn substitute(&self, z: &Var, value: &Poly<C>) -> Self {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut acc = Poly::one();
            for f in m.factors() {
                if f == *z {
                    acc = &acc * value;
                } else {
                    acc = acc.mul_term(&C::one(), &Monomial::var(f));
                }
            }
            out += &acc.scale(c);
        }
        out
    }

    /// The leading coefficient with respect to an order on monomials, used
    /// for normalisation. Returns `None` for zero.
    pub fn leading_by(
        &self,
        mut cmp: impl FnMut(&Monomial, &Monomial) -> std::cmp::Ordering,
    ) -> Option<(&Monomial, &C)> {
        self.terms.iter().min_by(|a, b| cmp(a.0, b.0))
    }
}

impl<C: Coeff> AddAssign<&Poly<C>> for Poly<C> {
    fn add_assign(&mut self, rhs: &Poly<C>) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl<C: Coeff> SubAssign<&Poly<C>> for Poly<C> {
    fn sub_assign(&mut self, rhs: &Poly<C>) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl<C: Coeff> Add for &Poly<C> {
    type Output = Poly<C>;
    fn add(self, rhs: &Poly<C>) -> Poly<C> {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<C: Coeff> Add for Poly<C> {
    type Output = Poly<C>;
    fn add(mut self, rhs: Poly<C>) -> Poly<C> {
        self += &rhs;
        self
    }
}

impl<C: Coeff> Sub for &Poly<C> {
    type Output = Poly<C>;
    fn sub(self, rhs: &Poly<C>) -> Poly<C> {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<C: Coeff> Sub for Poly<C> {
    type Output = Poly<C>;
    fn sub(mut self, rhs: Poly<C>) -> Poly<C> {
        self -= &rhs;
        self
    }
}

impl<C: Coeff> Neg for &Poly<C> {
    type Output = Poly<C>;
    fn neg(self) -> Poly<C> {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }
}

impl<C: Coeff> Neg for Poly<C> {
    type Output = Poly<C>;
    fn neg(self) -> Poly<C> {
        -&self
    }
}

impl<C: Coeff> Mul for &Poly<C> {
    type Output = Poly<C>;
    fn mul(self, rhs: &Poly<C>) -> Poly<C> {
        let mut out = Poly::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                if let Some((neg, m)) = a.mul(b) {
                    let c = ca.clone() * cb.clone();
                    out.add_term(m, if neg { -c } else { c });
                }
            }
        }
        out
    }
}

impl<C: Coeff> Mul for Poly<C> {
    type Output = Poly<C>;
    fn mul(self, rhs: Poly<C>) -> Poly<C> {
        &self * &rhs
    }
}

impl<C: Coeff> From<Var> for Poly<C> {
    fn from(v: Var) -> Self {
        Poly::var(v)
    }
}

impl<C: Coeff> std::iter::Sum for Poly<C> {
    fn sum<I: Iterator<Item = Poly<C>>>(iter: I) -> Self {
        let mut acc = Poly::zero();
        for p in iter {
            acc += &p;
        }
        acc
    }
}

impl<C: Coeff> std::fmt::Display for Poly<C> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&super::print::print_canonical(self, None))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    type P = Poly<Rational>;

    fn p(k: u32) -> P {
        P::var(Var::odd("p", k))
    }

    fn u(k: u32) -> P {
        P::var(Var::even("u", k))
    }

    fn q(n: i64, d: i64) -> P {
        P::constant(Rational::new(n.into(), d.into()))
    }

    #[test]
    fn grassmann_nilpotence() {
        assert!((&p(0) * &p(0)).is_zero());
    }

    #[test]
    fn transposition_sign() {
        let lhs = &p(1) * &p(0);
        let rhs = -(&p(0) * &p(1));
        assert_eq!(lhs, rhs);
        let (m, c) = lhs.terms().next().unwrap();
        assert_eq!(m.to_string(), "p[0]*p[1]");
        assert_eq!(*c, Rational::from_int(-1));
    }

    #[test]
    fn f1_times_p0() {
        let f1 = &(&p(3) + &(&q(2, 3) * &(&u(0) * &p(1)))) + &(&q(1, 3) * &(&u(1) * &p(0)));
        let w = &f1 * &p(0);
        let expected = -(&(&p(0) * &p(3)) + &(&q(2, 3) * &(&u(0) * &(&p(0) * &p(1)))));
        assert_eq!(w, expected);
    }

    #[test]
    fn pderiv_examples() {
        assert_eq!((&u(0) * &u(0)).pderiv(&Var::even("u", 0)), &P::int(2) * &u(0));
        assert_eq!((&p(0) * &p(1)).pderiv(&Var::odd("p", 1)), -p(0));
        let w = &(&p(0) * &p(3)) + &(&q(2, 3) * &(&u(0) * &(&p(0) * &p(1))));
        assert_eq!(w.pderiv(&Var::even("u", 0)), &q(2, 3) * &(&p(0) * &p(1)));
        assert!(P::int(7).pderiv(&Var::even("u", 0)).is_zero());
    }

    #[test]
    fn parity_detection() {
        assert_eq!(p(0).parity(), Some(Parity::Odd));
        assert_eq!(u(0).parity(), Some(Parity::Even));
        assert_eq!(P::zero().parity(), Some(Parity::Even));
        assert!((&u(0) + &p(0)).is_mixed_parity());
    }

    #[test]
    fn substitution_keeps_order() {
        // p1 * p0 with p1 := p2 gives p2 * p0 = -p0 p2
        let e = &p(1) * &p(0);
        let s = e.substitute(&Var::odd("p", 1), &p(2));
        assert_eq!(s, &p(2) * &p(0));
    }
}
