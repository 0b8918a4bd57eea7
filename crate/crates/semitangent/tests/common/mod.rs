#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use semitangent::em::StructureAlgebra;
use semitangent::poly::{Mono, Poly, Tagged};
use semitangent::semiring::{Scalar, Semiring};
use semitangent_oracles::{Dense, Ring, Table, INF};

pub fn ring(sr: Semiring) -> Ring {
    match sr {
        Semiring::Nat => Ring::Nat,
        Semiring::Int => Ring::Int,
        Semiring::Bool => Ring::Bool,
        Semiring::Tropical => Ring::Tropical,
        Semiring::Mod(m) => Ring::Mod(i128::from(m)),
    }
}

pub fn to_i128(s: &Scalar) -> i128 {
    match s {
        Scalar::Fin(n) => n.to_i128().expect("test values fit in i128"),
        Scalar::Inf => INF,
    }
}

pub fn from_i128(v: i128) -> Scalar {
    if v == INF {
        Scalar::Inf
    } else {
        Scalar::Fin(BigInt::from(v))
    }
}

pub fn to_dense(p: &Poly<usize>, sr: Semiring, nvars: usize) -> Dense {
    let mut out = Dense::zero(ring(sr), nvars);
    for (m, c) in p.iter() {
        let mut e = vec![0; nvars];
        for (v, k) in m.factors() {
            e[*v] = *k;
        }
        out.add_term(e, to_i128(c));
    }
    out
}

/// Variables `0..n` are copy 0, `n..2n` copy 1.
pub fn to_tagged(d: &Dense, sr: Semiring) -> Poly<Tagged<usize>> {
    let n = d.nvars / 2;
    Poly::from_terms(
        sr,
        d.terms.iter().map(|(e, c)| {
            let m = Mono::from_pairs(
                e.iter()
                    .enumerate()
                    .filter(|(_, k)| **k > 0)
                    .map(|(i, k)| (Tagged::new((i / n) as u8, i % n), *k)),
            );
            (m, from_i128(*c))
        }),
    )
}

pub fn from_dense(d: &Dense, sr: Semiring) -> Poly<usize> {
    Poly::from_terms(
        sr,
        d.terms.iter().map(|(e, c)| {
            (
                Mono::from_pairs(e.iter().enumerate().filter(|(_, k)| **k > 0).map(|(i, k)| (i, *k))),
                from_i128(*c),
            )
        }),
    )
}

pub fn table_of(a: &StructureAlgebra) -> Table {
    let conv = |v: &[Scalar]| v.iter().map(to_i128).collect::<Vec<_>>();
    Table {
        ring: ring(a.semiring()),
        unit: conv(a.unit()),
        table: a.table().iter().map(|row| row.iter().map(|c| conv(c)).collect()).collect(),
    }
}

pub fn algebra_of(sr: Semiring, t: &Table) -> StructureAlgebra {
    let conv = |v: &[i128]| v.iter().map(|x| from_i128(*x)).collect::<Vec<_>>();
    StructureAlgebra::new(
        sr,
        (0..t.rank()).map(|i| format!("b{i}")).collect(),
        conv(&t.unit),
        t.table.iter().map(|row| row.iter().map(|c| conv(c)).collect()).collect(),
    )
    .expect("oracle algebras are valid")
}

pub fn matrix_of(m: &[Vec<i128>]) -> Vec<Vec<Scalar>> {
    m.iter().map(|row| row.iter().map(|x| from_i128(*x)).collect()).collect()
}

/// Random dense polynomial from a term list of `(exponents, coefficient)`.
pub fn dense_from_terms(r: Ring, nvars: usize, terms: &[(Vec<u32>, i128)]) -> Dense {
    let mut d = Dense::zero(r, nvars);
    for (e, c) in terms {
        d.add_term(e.clone(), normalize(r, *c));
    }
    d
}

pub fn normalize(r: Ring, c: i128) -> i128 {
    match r {
        Ring::Nat => c.abs(),
        Ring::Int => c,
        Ring::Bool => c.rem_euclid(2),
        Ring::Tropical => c.abs(),
        Ring::Mod(m) => c.rem_euclid(m),
    }
}

pub fn semirings() -> Vec<Semiring> {
    vec![Semiring::Nat, Semiring::Int, Semiring::Bool, Semiring::Tropical, Semiring::Mod(5)]
}

pub fn group_by_var(t: &semitangent::poly::Comb<(Mono<usize>, usize)>, sr: Semiring, nvars: usize) -> Vec<Dense> {
    let mut by: BTreeMap<usize, Poly<usize>> = BTreeMap::new();
    for ((m, v), c) in t.iter() {
        by.entry(*v).or_insert_with(|| Poly::zero(sr)).add_term(m.clone(), c.clone());
    }
    (0..nvars)
        .map(|v| to_dense(&by.get(&v).cloned().unwrap_or_else(|| Poly::zero(sr)), sr, nvars))
        .collect()
}
