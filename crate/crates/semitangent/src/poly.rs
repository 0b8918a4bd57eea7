//! Sparse linear combinations and monomials over an arbitrary ordered
//! variable type. Nested algebras use monomials as variables.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Debug;

use crate::semiring::{Scalar, Semiring};

pub trait Var: Ord + Clone + Debug + Send + Sync {}
impl<T: Ord + Clone + Debug + Send + Sync> Var for T {}

/// A variable of a biproduct of copies: copy index and variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tagged<V> {
    pub tag: u8,
    pub var: V,
}

impl<V> Tagged<V> {
    pub fn new(tag: u8, var: V) -> Self {
        Tagged { tag, var }
    }
}

/// A monomial: sorted `(variable, exponent)` pairs with positive exponents.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mono<V>(Vec<(V, u32)>);

impl<V: Var> Mono<V> {
    pub fn one() -> Self {
        Mono(Vec::new())
    }

    pub fn var(v: V) -> Self {
        Mono(vec![(v, 1)])
    }

    pub fn power(v: V, e: u32) -> Self {
        if e == 0 {
            Self::one()
        } else {
            Mono(vec![(v, e)])
        }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (V, u32)>) -> Self {
        let mut acc: BTreeMap<V, u32> = BTreeMap::new();
        for (v, e) in pairs {
            *acc.entry(v).or_insert(0) += e;
        }
        Mono(acc.into_iter().filter(|(_, e)| *e > 0).collect())
    }

    pub fn factors(&self) -> &[(V, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|(_, e)| u64::from(*e)).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponent(&self, v: &V) -> u32 {
        self.0.binary_search_by(|(w, _)| w.cmp(v)).map(|i| self.0[i].1).unwrap_or(0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0.clone(), a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Mono(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        Mono(if e == 0 {
            Vec::new()
        } else {
            self.0.iter().map(|(v, k)| (v.clone(), k * e)).collect()
        })
    }

    /// The monomial with one factor of `v` removed.
    pub fn lower(&self, v: &V) -> Option<Self> {
        let i = self.0.binary_search_by(|(w, _)| w.cmp(v)).ok()?;
        let mut out = self.0.clone();
        if out[i].1 == 1 {
            out.remove(i);
        } else {
            out[i].1 -= 1;
        }
        Some(Mono(out))
    }

    /// Rename variables; the renaming may merge variables.
    pub fn rename<W: Var>(&self, f: impl Fn(&V) -> W) -> Mono<W> {
        Mono::from_pairs(self.0.iter().map(|(v, e)| (f(v), *e)))
    }
}

impl<V: Var> Ord for Mono<V> {
    /// Graded-lexicographic with `x > y > z`: higher degree is larger, and
    /// within a degree the larger exponent of the earliest variable wins.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            for (x, y) in self.0.iter().zip(&other.0) {
                match x.0.cmp(&y.0) {
                    Ordering::Equal => match x.1.cmp(&y.1) {
                        Ordering::Equal => continue,
                        o => return o,
                    },
                    o => return o.reverse(),
                }
            }
            self.0.len().cmp(&other.0.len())
        })
    }
}

impl<V: Var> PartialOrd for Mono<V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A finite linear combination of keys with nonzero coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Comb<K: Ord> {
    sr: Semiring,
    terms: BTreeMap<K, Scalar>,
}

pub type Poly<V> = Comb<Mono<V>>;

impl<K: Ord + Clone> Comb<K> {
    pub fn zero(sr: Semiring) -> Self {
        Comb {
            sr,
            terms: BTreeMap::new(),
        }
    }

    pub fn basis(sr: Semiring, k: K) -> Self {
        Self::term(sr, k, sr.one())
    }

    pub fn term(sr: Semiring, k: K, c: Scalar) -> Self {
        let mut out = Self::zero(sr);
        out.add_term(k, c);
        out
    }

    pub fn from_terms(sr: Semiring, terms: impl IntoIterator<Item = (K, Scalar)>) -> Self {
        let mut out = Self::zero(sr);
        for (k, c) in terms {
            out.add_term(k, c);
        }
        out
    }

    pub fn semiring(&self) -> Semiring {
        self.sr
    }

    pub fn add_term(&mut self, k: K, c: Scalar) {
        if self.sr.is_zero(&c) {
            return;
        }
        match self.terms.get_mut(&k) {
            Some(old) => {
                let s = self.sr.add(old, &c);
                if self.sr.is_zero(&s) {
                    self.terms.remove(&k);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(k, c);
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Self, c: &Scalar) {
        for (k, d) in &other.terms {
            self.add_term(k.clone(), self.sr.mul(c, d));
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &self.sr.one());
        out
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        Self::from_terms(self.sr, self.terms.iter().map(|(k, d)| (k.clone(), self.sr.mul(c, d))))
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

    pub fn iter(&self) -> impl Iterator<Item = (&K, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, k: &K) -> Scalar {
        self.terms.get(k).cloned().unwrap_or_else(|| self.sr.zero())
    }

    /// Linear extension of a map on keys.
    pub fn map_linear<L: Ord + Clone>(&self, mut f: impl FnMut(&K) -> Comb<L>) -> Comb<L> {
        let mut out = Comb::zero(self.sr);
        for (k, c) in &self.terms {
            out.add_scaled(&f(k), c);
        }
        out
    }

    /// Linear extension of a map sending keys to keys (or to zero).
    pub fn map_keys<L: Ord + Clone>(&self, mut f: impl FnMut(&K) -> Option<L>) -> Comb<L> {
        let mut out = Comb::zero(self.sr);
        for (k, c) in &self.terms {
            if let Some(l) = f(k) {
                out.add_term(l, c.clone());
            }
        }
        out
    }
}

/// `a ⊗ b` with pair keys.
pub fn tensor<A: Ord + Clone, B: Ord + Clone>(a: &Comb<A>, b: &Comb<B>) -> Comb<(A, B)> {
    let sr = a.semiring();
    let mut out = Comb::zero(sr);
    for (x, c) in a.iter() {
        for (y, d) in b.iter() {
            out.add_term((x.clone(), y.clone()), sr.mul(c, d));
        }
    }
    out
}

impl<V: Var> Comb<Mono<V>> {
    pub fn one(sr: Semiring) -> Self {
        Self::basis(sr, Mono::one())
    }

    pub fn constant(sr: Semiring, c: Scalar) -> Self {
        Self::term(sr, Mono::one(), c)
    }

    pub fn var(sr: Semiring, v: V) -> Self {
        Self::basis(sr, Mono::var(v))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let sr = self.sr;
        let mut out = Self::zero(sr);
        for (m, c) in &self.terms {
            for (n, d) in &other.terms {
                out.add_term(m.mul(n), sr.mul(c, d));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.sr);
        let mut base = self.clone();
        let mut k = e;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Highest total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u64> {
        self.terms.keys().map(|m| m.degree()).max()
    }
}

/// All monomials of degree at most `max_degree`: by degree, and leading
/// monomial first within a degree (`1, x, y, x^2, x*y, y^2, …`).
pub fn monomials<V: Var>(vars: &[V], max_degree: u32) -> Vec<Mono<V>> {
    let mut out = vec![Mono::one()];
    let mut layer = vec![(Mono::one(), 0usize)];
    for _ in 0..max_degree {
        let mut next = Vec::new();
        for (m, first) in &layer {
            for (k, v) in vars.iter().enumerate().skip(*first) {
                next.push((m.mul(&Mono::var(v.clone())), k));
            }
        }
        out.extend(next.iter().map(|(m, _)| m.clone()));
        layer = next;
    }
    out.sort_by(|a, b| a.degree().cmp(&b.degree()).then_with(|| b.cmp(a)));
    out
}
