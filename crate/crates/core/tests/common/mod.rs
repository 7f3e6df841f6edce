#![allow(dead_code)]

use jetham_core::algebra::{Parity, Var, VarContext};
use jetham_core::Poly;
use jetham_core::Rational;
use proptest::prelude::*;

pub const EVEN: Parity = Parity::Even;
pub const ODD: Parity = Parity::Odd;

/// Variables, jet order and size limits for random polynomials.
#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub vars: &'static [(&'static str, Parity)],
    pub max_order: u32,
    pub max_degree: usize,
    pub max_terms: usize,
}

pub const UV: &[(&str, Parity)] = &[("u", EVEN), ("v", EVEN)];
pub const UVPQ: &[(&str, Parity)] = &[("u", EVEN), ("v", EVEN), ("p", ODD), ("q", ODD)];
pub const UP: &[(&str, Parity)] = &[("u", EVEN), ("p", ODD)];

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn ctx(vars: &[(&str, Parity)]) -> VarContext {
    let mut c = VarContext::new();
    for (n, p) in vars {
        if p.is_odd() {
            c.add_odd(n);
        } else {
            c.add_even(n);
        }
    }
    c
}

fn coeff() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=3).prop_filter("nonzero", |(n, _)| *n != 0).prop_map(|(n, d)| q(n, d))
}

pub fn monomial(shape: Shape) -> impl Strategy<Value = Vec<Var>> {
    prop::collection::vec((0..shape.vars.len(), 0..=shape.max_order), 0..=shape.max_degree).prop_map(move |fs| {
        fs.into_iter()
            .map(|(i, k)| {
                let (name, parity) = shape.vars[i];
                Var::jet(name, k, parity)
            })
            .collect()
    })
}

pub fn poly(shape: Shape) -> impl Strategy<Value = Poly> {
    prop::collection::vec((coeff(), monomial(shape)), 0..=shape.max_terms)
        .prop_map(|terms| terms.into_iter().map(|(c, m)| Poly::product(m).scale(&c)).sum())
}

/// A random polynomial with every term of the given parity.
pub fn homogeneous(shape: Shape, parity: Parity) -> impl Strategy<Value = Poly> {
    poly(shape).prop_map(move |f| f.filter_terms(|m| m.parity() == parity))
}

/// A random polynomial with exactly `n` odd factors per term.
pub fn with_odd_degree(shape: Shape, n: usize) -> impl Strategy<Value = Poly> {
    poly(shape).prop_map(move |f| f.filter_terms(|m| m.odd_degree() == n))
}
