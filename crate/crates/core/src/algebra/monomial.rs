use std::fmt;

use super::var::{Parity, Var};

/// A product of even powers and distinct odd factors, both kept sorted by
/// `(name, order)`. The even part is written to the left of the odd part.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    even: Vec<(Var, u32)>,
    odd: Vec<Var>,
}

impl Monomial {
    pub fn one() -> Monomial {
        Monomial::default()
    }

    pub fn var(v: Var) -> Monomial {
        if v.is_odd() {
            Monomial { even: Vec::new(), odd: vec![v] }
        } else {
            Monomial { even: vec![(v, 1)], odd: Vec::new() }
        }
    }

    /// Builds a monomial from factors in the given order. Returns the sign
    /// picked up while sorting the odd factors, or `None` if an odd factor
    /// repeats.
    pub fn from_factors(factors: impl IntoIterator<Item = Var>) -> Option<(bool, Monomial)> {
        let mut m = Monomial::one();
        let mut negative = false;
        for v in factors {
            let (neg, next) = m.mul(&Monomial::var(v))?;
            negative ^= neg;
            m = next;
        }
        Some((negative, m))
    }

    pub fn is_one(&self) -> bool {
        self.even.is_empty() && self.odd.is_empty()
    }

    pub fn even_part(&self) -> &[(Var, u32)] {
        &self.even
    }

    pub fn odd_part(&self) -> &[Var] {
        &self.odd
    }

    pub fn odd_degree(&self) -> usize {
        self.odd.len()
    }

    pub fn parity(&self) -> Parity {
        Parity::from_count(self.odd.len())
    }

    pub fn degree(&self) -> u32 {
        self.even.iter().map(|(_, e)| *e).sum::<u32>() + self.odd.len() as u32
    }

    pub fn exponent(&self, v: &Var) -> u32 {
        if v.is_odd() {
            self.odd.binary_search(v).map(|_| 1).unwrap_or(0)
        } else {
            self.even.binary_search_by(|(w, _)| w.cmp(v)).map(|i| self.even[i].1).unwrap_or(0)
        }
    }

    /// All factors with multiplicity: even ones first, then odd ones.
    pub fn factors(&self) -> impl Iterator<Item = Var> + '_ {
        self.even.iter().flat_map(|(v, e)| std::iter::repeat_n(*v, *e as usize)).chain(self.odd.iter().copied())
    }

    /// Distinct variables.
    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.even.iter().map(|(v, _)| *v).chain(self.odd.iter().copied())
    }

    /// Product `self * other`. The flag is `true` when reordering the odd
    /// factors produced a minus sign; `None` means the product vanishes.
    pub fn mul(&self, other: &Monomial) -> Option<(bool, Monomial)> {
        let mut even = Vec::with_capacity(self.even.len() + other.even.len());
        let (mut i, mut j) = (0, 0);
        while i < self.even.len() && j < other.even.len() {
            let (a, ea) = self.even[i];
            let (b, eb) = other.even[j];
            match a.cmp(&b) {
                std::cmp::Ordering::Less => {
                    even.push((a, ea));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    even.push((b, eb));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    even.push((a, ea + eb));
                    i += 1;
                    j += 1;
                }
            }
        }
        even.extend_from_slice(&self.even[i..]);
        even.extend_from_slice(&other.even[j..]);

        let mut odd = Vec::with_capacity(self.odd.len() + other.odd.len());
        let mut negative = false;
        let (mut i, mut j) = (0, 0);
        while i < self.odd.len() && j < other.odd.len() {
            match self.odd[i].cmp(&other.odd[j]) {
                std::cmp::Ordering::Less => {
                    odd.push(self.odd[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    // other.odd[j] jumps over the remaining factors of self
                    if (self.odd.len() - i) % 2 == 1 {
                        negative = !negative;
                    }
                    odd.push(other.odd[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => return None,
            }
        }
        odd.extend_from_slice(&self.odd[i..]);
        odd.extend_from_slice(&other.odd[j..]);
        Some((negative, Monomial { even, odd }))
    }

    /// Left partial derivative: the factor `v` is brought to the front and
    /// removed. Returns `(negative, multiplicity, rest)`; `None` if `v` does
    /// not occur.
    pub fn left_derivative(&self, v: &Var) -> Option<(bool, u32, Monomial)> {
        if v.is_odd() {
            let pos = self.odd.binary_search(v).ok()?;
            let mut odd = self.odd.clone();
            odd.remove(pos);
            Some((pos % 2 == 1, 1, Monomial { even: self.even.clone(), odd }))
        } else {
            let pos = self.even.binary_search_by(|(w, _)| w.cmp(v)).ok()?;
            let mut even = self.even.clone();
            let e = even[pos].1;
            if e == 1 {
                even.remove(pos);
            } else {
                even[pos].1 -= 1;
            }
            Some((false, e, Monomial { even, odd: self.odd.clone() }))
        }
    }

    /// Lexicographic comparison of the factor sequences (even factors then
    /// odd ones, with multiplicity).
    pub fn cmp_factors(&self, other: &Monomial) -> std::cmp::Ordering {
        self.factors().cmp(other.factors())
    }

    pub fn max_order(&self) -> Option<u32> {
        self.vars().map(|v| v.order).max()
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        let mut first = true;
        for (v, e) in &self.even {
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        for v in &self.odd {
            if !first {
                f.write_str("*")?;
            }
            first = false;
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odd_products_pick_up_signs() {
        let p0 = Monomial::var(Var::odd("p", 0));
        let p1 = Monomial::var(Var::odd("p", 1));
        let p2 = Monomial::var(Var::odd("p", 2));
        assert!(p0.mul(&p0).is_none());
        let (neg, m) = p1.mul(&p0).unwrap();
        assert!(neg);
        assert_eq!(m.to_string(), "p[0]*p[1]");
        let (neg, m01) = p0.mul(&p1).unwrap();
        assert!(!neg);
        // (p1 p2) * p0 = p0 p1 p2 after two transpositions
        let (_, m12) = p1.mul(&p2).unwrap();
        let (neg, m) = m12.mul(&p0).unwrap();
        assert!(!neg);
        assert_eq!(m.to_string(), "p[0]*p[1]*p[2]");
        // p2 * (p0 p1): two transpositions
        let (neg, _) = p2.mul(&m01).unwrap();
        assert!(!neg);
        // p1 * (p0 p2): one transposition
        let (_, m02) = p0.mul(&p2).unwrap();
        let (neg, _) = p1.mul(&m02).unwrap();
        assert!(neg);
    }

    #[test]
    fn left_derivative_sign() {
        let (_, m) = Monomial::from_factors([Var::odd("p", 0), Var::odd("p", 1)]).unwrap();
        let (neg, mult, rest) = m.left_derivative(&Var::odd("p", 1)).unwrap();
        assert!(neg);
        assert_eq!(mult, 1);
        assert_eq!(rest.to_string(), "p[0]");
        let (_, u2) = Monomial::from_factors([Var::even("u", 0), Var::even("u", 0)]).unwrap();
        let (neg, mult, rest) = u2.left_derivative(&Var::even("u", 0)).unwrap();
        assert!(!neg);
        assert_eq!(mult, 2);
        assert_eq!(rest.to_string(), "u");
    }
}
