//! Text forms of polynomials and linear combinations.
//!
//! Terms are printed leading term first with explicit `*` and `^`, so a
//! printed polynomial parses back to itself. A negative leading coefficient
//! is written as `0 - …` because the expression grammar has no unary minus.

use num_traits::Signed;

use crate::poly::{Comb, Mono, Poly, Tagged, Var};
use crate::semiring::Scalar;

pub fn mono_text<V: Var>(m: &Mono<V>, name: &impl Fn(&V) -> String) -> String {
    if m.is_one() {
        return "1".to_string();
    }
    m.factors()
        .iter()
        .map(|(v, e)| if *e == 1 { name(v) } else { format!("{}^{e}", name(v)) })
        .collect::<Vec<_>>()
        .join("*")
}

/// A linear combination; keys printing as `1` are treated as the unit, and
/// the unit coefficient on it prints as the literal `1` in every semiring.
pub fn comb_text<K: Ord + Clone>(c: &Comb<K>, key: impl Fn(&K) -> String) -> String {
    let sr = c.semiring();
    let mut out = String::new();
    for (k, coeff) in c.iter().collect::<Vec<_>>().into_iter().rev() {
        let negative = sr.has_negatives() && matches!(coeff, Scalar::Fin(n) if n.is_negative());
        let magnitude = match coeff {
            Scalar::Fin(n) if negative => Scalar::Fin(n.abs()),
            other => other.clone(),
        };
        let k = key(k);
        let term = match (k.as_str(), sr.is_one(&magnitude)) {
            ("1", true) => "1".to_string(),
            ("1", false) => sr.format_scalar(&magnitude),
            (_, true) => k,
            (_, false) => format!("{}*{k}", sr.format_scalar(&magnitude)),
        };
        match (out.is_empty(), negative) {
            (true, false) => out = term,
            (true, true) => out = format!("0 - {term}"),
            (false, false) => out = format!("{out} + {term}"),
            (false, true) => out = format!("{out} - {term}"),
        }
    }
    if out.is_empty() {
        "0".to_string()
    } else {
        out
    }
}

pub fn poly_text<V: Var>(p: &Poly<V>, name: impl Fn(&V) -> String) -> String {
    comb_text(p, |m| mono_text(m, &name))
}

/// Default variable names `x, y, z, w, x4, x5, …`.
pub fn var_name(i: usize) -> String {
    match i {
        0 => "x".into(),
        1 => "y".into(),
        2 => "z".into(),
        3 => "w".into(),
        _ => format!("x{i}"),
    }
}

pub fn tagged_name<V>(t: &Tagged<V>, name: &impl Fn(&V) -> String) -> String {
    format!("{}.{}", t.tag, name(&t.var))
}

/// A monomial used as a variable of a nested polynomial.
pub fn token_name<V: Var>(m: &Mono<V>, name: &impl Fn(&V) -> String) -> String {
    format!("[{}]", mono_text(m, name))
}
