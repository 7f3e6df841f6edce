use std::cmp::Ordering;

use super::grading::GradingTable;
use super::monomial::Monomial;
use super::poly::Poly;
use crate::scalar::Coeff;

/// Sort key used by the printer: grade when every variable is graded,
/// total degree otherwise; ties broken by the factor sequence.
pub fn print_order(grading: Option<&GradingTable>) -> impl Fn(&Monomial, &Monomial) -> Ordering + '_ {
    move |a, b| {
        let weight = |m: &Monomial| match grading.and_then(|g| g.monomial_grade(m).ok()) {
            Some(g) => g,
            None => m.degree() as i64,
        };
        weight(a).cmp(&weight(b)).then_with(|| a.cmp_factors(b))
    }
}

pub fn sorted_terms<'a, C: Coeff>(f: &'a Poly<C>, grading: Option<&GradingTable>) -> Vec<(&'a Monomial, &'a C)> {
    let mut terms: Vec<_> = f.terms().collect();
    let graded = grading.filter(|g| terms.iter().all(|(m, _)| g.monomial_grade(m).is_ok()));
    let order = print_order(graded);
    terms.sort_by(|a, b| order(a.0, b.0));
    terms
}

/// Canonical text of `f` in the expression grammar.
pub fn print_canonical<C: Coeff>(f: &Poly<C>, grading: Option<&GradingTable>) -> String {
    let terms = sorted_terms(f, grading);
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (m, c)) in terms.into_iter().enumerate() {
        let neg = c.is_negative();
        let mag = c.abs();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if m.is_one() {
            out.push_str(&mag.to_string());
        } else if mag.is_one() {
            out.push_str(&m.to_string());
        } else {
            out.push_str(&format!("{mag}*{m}"));
        }
    }
    out
}

/// Like [`print_canonical`] but wrapped in parentheses when the text is a
/// sum, for use as a factor.
pub fn print_factor<C: Coeff>(f: &Poly<C>, grading: Option<&GradingTable>) -> String {
    let s = print_canonical(f, grading);
    if f.len() > 1 {
        format!("({s})")
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse::{parse_expr, VarContext};
    use crate::Rational;

    fn ctx() -> VarContext {
        let mut c = VarContext::new();
        c.add_even("u");
        c.add_even("v");
        c.add_odd("p");
        c
    }

    #[test]
    fn prints_f1() {
        let f = parse_expr::<Rational>("1/3*u[1]*p + p[3] + 2/3*u*p[1]", &ctx()).unwrap();
        assert_eq!(print_canonical(&f, None), "p[3] + 2/3*u*p[1] + 1/3*u[1]*p[0]");
        let g = GradingTable::new(-3).with("u", 2).with("p", 0);
        assert_eq!(print_canonical(&f, Some(&g)), "p[3] + 2/3*u*p[1] + 1/3*u[1]*p[0]");
    }

    #[test]
    fn prints_zero_and_constants() {
        assert_eq!(print_canonical(&Poly::<Rational>::zero(), None), "0");
        let f = parse_expr::<Rational>("-2/4 + u", &ctx()).unwrap();
        assert_eq!(print_canonical(&f, None), "-1/2 + u");
    }

    #[test]
    fn graded_order_of_generating_function() {
        let g = GradingTable::new(-3).with("u", 2).with("v", 1);
        let f = parse_expr::<Rational>("u*v - v[2]", &ctx()).unwrap();
        assert_eq!(print_canonical(&f, Some(&g)), "u*v - v[2]");
        let f = parse_expr::<Rational>("1/2*v^2 + u", &ctx()).unwrap();
        assert_eq!(print_canonical(&f, Some(&g)), "u + 1/2*v^2");
    }
}
