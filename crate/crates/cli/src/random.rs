//! Seeded random polynomials and operators for the property checks of the
//! reproduction suite.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use jetham_core::algebra::{Parity, Var};
use jetham_core::calculus::DiffOp;
use jetham_core::{MatrixOperator, Poly, Rational};

/// Variables, jet order and size limits for random polynomials.
#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub vars: &'static [(&'static str, Parity)],
    pub max_order: u32,
    pub max_degree: usize,
    pub max_terms: usize,
}

pub const UV: &[(&str, Parity)] = &[("u", Parity::Even), ("v", Parity::Even)];
pub const UVPQ: &[(&str, Parity)] = &[("u", Parity::Even), ("v", Parity::Even), ("p", Parity::Odd), ("q", Parity::Odd)];

pub struct Gen(ChaCha8Rng);

impl Gen {
    pub fn new(seed: u64) -> Gen {
        Gen(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.0.gen_range(0..n)
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.0.gen_range(lo..=hi)
    }

    fn coeff(&mut self) -> Rational {
        let n = loop {
            let n = self.int(-6, 6);
            if n != 0 {
                break n;
            }
        };
        Rational::new(n.into(), self.int(1, 3).into())
    }

    pub fn poly(&mut self, shape: Shape) -> Poly {
        let terms = self.0.gen_range(0..=shape.max_terms);
        let mut out = Poly::zero();
        for _ in 0..terms {
            let c = self.coeff();
            let degree = self.0.gen_range(0..=shape.max_degree);
            let factors: Vec<Var> = (0..degree)
                .map(|_| {
                    let (name, parity) = shape.vars[self.below(shape.vars.len())];
                    Var::jet(name, self.0.gen_range(0..=shape.max_order), parity)
                })
                .collect();
            out += &Poly::product(factors).scale(&c);
        }
        out
    }

    /// Every term has exactly `n` odd factors.
    pub fn with_odd_degree(&mut self, shape: Shape, n: usize) -> Poly {
        self.poly(shape).filter_terms(|m| m.odd_degree() == n)
    }

    /// Every term has the same, randomly chosen, parity.
    pub fn graded(&mut self, shape: Shape) -> Poly {
        let p = if self.0.gen_bool(0.5) { Parity::Odd } else { Parity::Even };
        self.poly(shape).filter_terms(|m| m.parity() == p)
    }

    /// Nonzero, with one or two odd factors per term.
    pub fn with_antifields(&mut self, shape: Shape) -> Poly {
        loop {
            let k = self.0.gen_range(1..=2);
            let f = self.with_odd_degree(shape, k);
            if !f.is_zero() {
                return f;
            }
        }
    }

    pub fn diffop(&mut self, coeffs: Shape) -> DiffOp<Rational> {
        let n = self.0.gen_range(1..=3);
        let mut op = DiffOp::zero();
        for k in 0..n {
            op.add_local(k, &self.poly(coeffs));
        }
        op
    }

    pub fn matrix(&mut self, coeffs: Shape) -> MatrixOperator {
        let mut rows = Vec::new();
        for _ in 0..2 {
            rows.push(vec![self.diffop(coeffs), self.diffop(coeffs)]);
        }
        MatrixOperator::from_rows(rows).expect("square")
    }
}
