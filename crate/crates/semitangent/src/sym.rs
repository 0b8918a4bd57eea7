//! The symmetric-algebra modality: polynomials as elements of `S(V)`, the
//! monad structure, the product, and the deriving and coderiving maps.
//!
//! The generic functions work over any variable type, so `S(S(V))` is just
//! `Poly<Mono<V>>` and `S(V ⊕ V)` is `Poly<Tagged<V>>`. The concrete
//! [`Polynomial`], [`NestedPolynomial`] and [`TensorElement`] types attach a
//! [`FreeModule`] alphabet to the generic data.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::module::{biproduct, FreeModule, LinearMap, ModuleError, Vector};
use crate::poly::{Comb, Mono, Poly, Tagged, Var};
use crate::semiring::{Scalar, Semiring};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymError {
    #[error("alphabet mismatch: {0}")]
    Alphabet(String),
    #[error("signature mismatch: {0}")]
    Signature(String),
    #[error("variable `{0}` belongs to neither summand")]
    Unattributable(String),
    #[error(transparent)]
    Module(#[from] ModuleError),
}

/// `η`: a vector becomes a linear polynomial.
pub fn eta<V: Var>(v: &Comb<V>) -> Poly<V> {
    v.map_keys(|x| Some(Mono::var(x.clone())))
}

/// Multiply out a monomial of monomials.
pub fn flatten<V: Var>(m: &Mono<Mono<V>>) -> Mono<V> {
    m.factors().iter().fold(Mono::one(), |acc, (inner, e)| acc.mul(&inner.pow(*e)))
}

/// `μ`: each outer variable is an inner monomial, so flattening is a
/// monomial-to-monomial map.
pub fn mu<V: Var>(p: &Poly<Mono<V>>) -> Poly<V> {
    p.map_keys(|m| Some(flatten(m)))
}

pub fn nabla<V: Var>(p: &Poly<V>, q: &Poly<V>) -> Poly<V> {
    p.mul(q)
}

pub fn unit<V: Var>(sr: Semiring) -> Poly<V> {
    Poly::one(sr)
}

/// `d(p) = Σ ∂p/∂x ⊗ x`, with `∂(x^n) = n·x^(n-1)` through the natural action.
pub fn derive<V: Var>(p: &Poly<V>) -> Comb<(Mono<V>, V)> {
    derive_with(p, |sr, e, c| sr.times(u64::from(e), c))
}

/// Derivative with a pluggable power-rule coefficient.
pub fn derive_with<V: Var>(p: &Poly<V>, coeff: impl Fn(Semiring, u32, &Scalar) -> Scalar) -> Comb<(Mono<V>, V)> {
    let sr = p.semiring();
    let mut out = Comb::zero(sr);
    for (m, c) in p.iter() {
        for (v, e) in m.factors() {
            let lowered = m.lower(v).expect("variable occurs");
            out.add_term((lowered, v.clone()), coeff(sr, *e, c));
        }
    }
    out
}

/// `d° = (1 ⊗ η)∇`: multiply the linear factor back in.
pub fn coderive<V: Var>(t: &Comb<(Mono<V>, V)>) -> Poly<V> {
    t.map_keys(|(m, v)| Some(m.mul(&Mono::var(v.clone()))))
}

/// `S(f)` for a linear map given by the images of variables.
pub fn substitute<V: Var, W: Var>(p: &Poly<V>, f: impl Fn(&V) -> Comb<W>) -> Poly<W> {
    let sr = p.semiring();
    let mut images: BTreeMap<V, Poly<W>> = BTreeMap::new();
    let mut out = Poly::zero(sr);
    for (m, c) in p.iter() {
        let mut acc = Poly::constant(sr, c.clone());
        for (v, e) in m.factors() {
            let img = images.entry(v.clone()).or_insert_with(|| eta(&f(v)));
            acc = acc.mul(&img.pow(*e));
            if acc.is_zero() {
                break;
            }
        }
        out.add_scaled(&acc, &sr.one());
    }
    out
}

/// `S(f)` for a map sending variables to variables or to zero.
pub fn sym_rename<V: Var, W: Var>(p: &Poly<V>, f: impl Fn(&V) -> Option<W>) -> Poly<W> {
    p.map_keys(|m| {
        let mut pairs = Vec::with_capacity(m.factors().len());
        for (v, e) in m.factors() {
            pairs.push((f(v)?, *e));
        }
        Some(Mono::from_pairs(pairs))
    })
}

/// An element of `S(V) ⊗ S(W)`.
pub type SplitPoly<V> = Comb<(Mono<V>, Mono<V>)>;

/// `S(V ⊕ W) → S(V) ⊗ S(W)`; fails with the tag of a variable outside both
/// copies.
pub fn seely_split_generic<V: Var>(p: &Poly<Tagged<V>>) -> Result<SplitPoly<V>, u8> {
    let mut out = Comb::zero(p.semiring());
    for (m, c) in p.iter() {
        let mut parts: [Vec<(V, u32)>; 2] = [Vec::new(), Vec::new()];
        for (v, e) in m.factors() {
            parts.get_mut(usize::from(v.tag)).ok_or(v.tag)?.push((v.var.clone(), *e));
        }
        let [a, b] = parts;
        out.add_term((Mono::from_pairs(a), Mono::from_pairs(b)), c.clone());
    }
    Ok(out)
}

/// `S(V) ⊗ S(W) → S(V ⊕ W)`.
pub fn seely_merge_generic<V: Var>(t: &Comb<(Mono<V>, Mono<V>)>) -> Poly<Tagged<V>> {
    t.map_keys(|(a, b)| {
        Some(
            a.rename(|v| Tagged::new(0, v.clone()))
                .mul(&b.rename(|v| Tagged::new(1, v.clone()))),
        )
    })
}

/// A polynomial over the basis of a free module.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    space: Arc<FreeModule>,
    poly: Poly<usize>,
}

impl Polynomial {
    pub fn new(space: &Arc<FreeModule>, poly: Poly<usize>) -> Result<Self, SymError> {
        if poly.semiring() != space.semiring() {
            return Err(SymError::Alphabet("semiring differs from the alphabet's".into()));
        }
        if poly.iter().any(|(m, _)| m.factors().iter().any(|(v, _)| *v >= space.dim())) {
            return Err(SymError::Alphabet("variable index outside the alphabet".into()));
        }
        Ok(Polynomial {
            space: space.clone(),
            poly,
        })
    }

    pub fn zero(space: &Arc<FreeModule>) -> Self {
        Polynomial {
            space: space.clone(),
            poly: Poly::zero(space.semiring()),
        }
    }

    pub fn var(space: &Arc<FreeModule>, label: &str) -> Result<Self, SymError> {
        let i = space
            .position(label)
            .ok_or_else(|| SymError::Alphabet(format!("unknown variable `{label}`")))?;
        Ok(Polynomial {
            space: space.clone(),
            poly: Poly::var(space.semiring(), i),
        })
    }

    pub fn constant(space: &Arc<FreeModule>, c: Scalar) -> Self {
        Polynomial {
            space: space.clone(),
            poly: Poly::constant(space.semiring(), c),
        }
    }

    pub fn space(&self) -> &Arc<FreeModule> {
        &self.space
    }

    pub fn poly(&self) -> &Poly<usize> {
        &self.poly
    }

    pub fn semiring(&self) -> Semiring {
        self.space.semiring()
    }

    fn check_same(&self, other: &Self) -> Result<(), SymError> {
        if self.space != other.space {
            return Err(SymError::Alphabet("polynomials over different alphabets".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, SymError> {
        self.check_same(other)?;
        Ok(Polynomial {
            space: self.space.clone(),
            poly: self.poly.add(&other.poly),
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self, SymError> {
        algebra_monoid(MonoidOp::Nabla, self, other)
    }

    pub fn pow(&self, e: u32) -> Self {
        Polynomial {
            space: self.space.clone(),
            poly: self.poly.pow(e),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        Polynomial {
            space: self.space.clone(),
            poly: self.poly.scale(c),
        }
    }
}

/// A polynomial whose variables are monomials over an inner alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NestedPolynomial {
    inner: Arc<FreeModule>,
    poly: Poly<Mono<usize>>,
}

impl NestedPolynomial {
    pub fn new(inner: &Arc<FreeModule>, poly: Poly<Mono<usize>>) -> Result<Self, SymError> {
        let bad = poly
            .iter()
            .any(|(m, _)| m.factors().iter().any(|(t, _)| t.factors().iter().any(|(v, _)| *v >= inner.dim())));
        if bad {
            return Err(SymError::Alphabet("inner variable outside the alphabet".into()));
        }
        Ok(NestedPolynomial {
            inner: inner.clone(),
            poly,
        })
    }

    pub fn inner(&self) -> &Arc<FreeModule> {
        &self.inner
    }

    pub fn poly(&self) -> &Poly<Mono<usize>> {
        &self.poly
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Factor {
    Alg(Arc<FreeModule>),
    Mod(Arc<FreeModule>),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Slot {
    Mono(Mono<usize>),
    Basis(usize),
}

/// An element of a tensor product of polynomial algebras and modules, fully
/// expanded on monomials and basis labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorElement {
    signature: Vec<Factor>,
    terms: Comb<Vec<Slot>>,
}

impl TensorElement {
    pub fn new(signature: Vec<Factor>, terms: Comb<Vec<Slot>>) -> Result<Self, SymError> {
        for (k, _) in terms.iter() {
            if k.len() != signature.len() {
                return Err(SymError::Signature("term arity differs from the signature".into()));
            }
            for (slot, factor) in k.iter().zip(&signature) {
                match (slot, factor) {
                    (Slot::Mono(m), Factor::Alg(v)) if m.factors().iter().all(|(i, _)| *i < v.dim()) => {}
                    (Slot::Basis(i), Factor::Mod(v)) if *i < v.dim() => {}
                    _ => return Err(SymError::Signature("slot does not fit its factor".into())),
                }
            }
        }
        Ok(TensorElement { signature, terms })
    }

    pub fn signature(&self) -> &[Factor] {
        &self.signature
    }

    pub fn terms(&self) -> &Comb<Vec<Slot>> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_zero()
    }
}

pub fn sym_map(f: &LinearMap, p: &Polynomial) -> Result<Polynomial, SymError> {
    if **f.domain() != *p.space {
        return Err(SymError::Alphabet("polynomial is not over the domain of the map".into()));
    }
    let sr = f.semiring();
    let poly = substitute(&p.poly, |&v| Comb::from_terms(sr, f.column(v)));
    Ok(Polynomial {
        space: f.codomain().clone(),
        poly,
    })
}

pub fn monad_unit_eta(v: &Vector) -> Polynomial {
    let sr = v.space().semiring();
    let lin = Comb::from_terms(sr, v.coords().map(|(i, c)| (i, c.clone())));
    Polynomial {
        space: v.space().clone(),
        poly: eta(&lin),
    }
}

pub fn monad_mult_mu(p: &NestedPolynomial) -> Polynomial {
    Polynomial {
        space: p.inner.clone(),
        poly: mu(&p.poly),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonoidOp {
    Nabla,
    Unit,
}

/// `Nabla` multiplies; `Unit` returns the constant 1 over the alphabet of `p`.
pub fn algebra_monoid(op: MonoidOp, p: &Polynomial, q: &Polynomial) -> Result<Polynomial, SymError> {
    match op {
        MonoidOp::Nabla => {
            p.check_same(q)?;
            Ok(Polynomial {
                space: p.space.clone(),
                poly: nabla(&p.poly, &q.poly),
            })
        }
        MonoidOp::Unit => Ok(Polynomial {
            space: p.space.clone(),
            poly: unit(p.semiring()),
        }),
    }
}

pub fn derive_polynomial(p: &Polynomial) -> TensorElement {
    let terms = derive(&p.poly).map_keys(|(m, v)| Some(vec![Slot::Mono(m.clone()), Slot::Basis(*v)]));
    TensorElement {
        signature: vec![Factor::Alg(p.space.clone()), Factor::Mod(p.space.clone())],
        terms,
    }
}

pub fn coderive_tensor(t: &TensorElement) -> Result<Polynomial, SymError> {
    let space = match t.signature.as_slice() {
        [Factor::Alg(a), Factor::Mod(b)] if a == b => a.clone(),
        _ => return Err(SymError::Signature("coderive expects S(V) ⊗ V".into())),
    };
    let pairs = t.terms.map_keys(|k| match k.as_slice() {
        [Slot::Mono(m), Slot::Basis(v)] => Some((m.clone(), *v)),
        _ => None,
    });
    Ok(Polynomial {
        space,
        poly: coderive(&pairs),
    })
}

/// Split a polynomial over `V ⊕ W` (labels `0.v`, `1.w`) into `S(V) ⊗ S(W)`.
pub fn seely_split(p: &Polynomial, v: &Arc<FreeModule>, w: &Arc<FreeModule>) -> Result<TensorElement, SymError> {
    let attribute = |i: usize| -> Result<Tagged<usize>, SymError> {
        let label = p.space.label(i);
        let found = label.split_once('.').and_then(|(tag, rest)| match tag {
            "0" => v.position(rest).map(|j| Tagged::new(0, j)),
            "1" => w.position(rest).map(|j| Tagged::new(1, j)),
            _ => None,
        });
        found.ok_or_else(|| SymError::Unattributable(label.to_string()))
    };
    let mut index = BTreeMap::new();
    for i in 0..p.space.dim() {
        index.insert(i, attribute(i)?);
    }
    let tagged = sym_rename(&p.poly, |i| index.get(i).cloned());
    let split = seely_split_generic(&tagged).expect("tags are 0 or 1");
    let terms = split.map_keys(|(a, b)| Some(vec![Slot::Mono(a.clone()), Slot::Mono(b.clone())]));
    Ok(TensorElement {
        signature: vec![Factor::Alg(v.clone()), Factor::Alg(w.clone())],
        terms,
    })
}

/// Merge `S(V) ⊗ S(W)` into a polynomial over `V ⊕ W`.
pub fn seely_merge(t: &TensorElement) -> Result<Polynomial, SymError> {
    let (v, w) = match t.signature.as_slice() {
        [Factor::Alg(v), Factor::Alg(w)] => (v.clone(), w.clone()),
        _ => return Err(SymError::Signature("merge expects S(V) ⊗ S(W)".into())),
    };
    let space = biproduct(&[&v, &w])?;
    let offset = v.dim();
    let poly = t.terms.map_keys(|k| match k.as_slice() {
        [Slot::Mono(a), Slot::Mono(b)] => Some(a.mul(&b.rename(|j| j + offset))),
        _ => None,
    });
    Ok(Polynomial { space, poly })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::module::{combine_modules, CombineOp};

    fn xy(sr: Semiring) -> Arc<FreeModule> {
        FreeModule::from_labels(sr, &["x", "y"]).unwrap()
    }

    fn m(pairs: &[(usize, u32)]) -> Mono<usize> {
        Mono::from_pairs(pairs.iter().copied())
    }

    #[test]
    fn derivative_of_constants_and_variables() {
        let sr = Semiring::Nat;
        assert!(derive(&Poly::<usize>::one(sr)).is_zero());
        let d = derive(&Poly::var(sr, 0usize));
        assert_eq!(d, Comb::basis(sr, (Mono::one(), 0)));
    }

    #[test]
    fn derivative_of_x2y() {
        let sr = Semiring::Nat;
        let p = Poly::basis(sr, m(&[(0, 2), (1, 1)]));
        let d = derive(&p);
        assert_eq!(d.coeff(&(m(&[(0, 1), (1, 1)]), 0)), Scalar::int(2));
        assert_eq!(d.coeff(&(m(&[(0, 2)]), 1)), Scalar::int(1));
        assert_eq!(d.len(), 2);
    }

    #[test]
    fn coderive_multiplies_in_the_variable() {
        let sr = Semiring::Nat;
        let t = Comb::basis(sr, (Mono::var(0usize), 0usize));
        assert_eq!(coderive(&t), Poly::basis(sr, Mono::power(0, 2)));
        let t = Comb::basis(sr, (Mono::one(), 1usize));
        assert_eq!(coderive(&t), Poly::var(sr, 1usize));
    }

    #[test]
    fn mu_flattens() {
        let sr = Semiring::Nat;
        let t = Mono::var(0usize);
        let p: Poly<Mono<usize>> = Poly::basis(sr, Mono::power(t, 2));
        assert_eq!(mu(&p), Poly::basis(sr, Mono::power(0, 2)));
        let u = m(&[(0, 2)]);
        let w = m(&[(0, 1), (1, 1)]);
        let p: Poly<Mono<usize>> = Poly::basis(sr, Mono::var(u).mul(&Mono::var(w)));
        assert_eq!(mu(&p), Poly::basis(sr, m(&[(0, 3), (1, 1)])));
        assert_eq!(mu(&Poly::<Mono<usize>>::one(sr)), Poly::one(sr));
    }

    #[test]
    fn concrete_eta() {
        let sr = Semiring::Nat;
        let v = xy(sr);
        let vec = Vector::from_labels(&v, &[("x", Scalar::int(2)), ("y", Scalar::int(3))]).unwrap();
        let p = monad_unit_eta(&vec);
        let expected = Polynomial::var(&v, "x")
            .unwrap()
            .scale(&Scalar::int(2))
            .add(&Polynomial::var(&v, "y").unwrap().scale(&Scalar::int(3)))
            .unwrap();
        assert_eq!(p, expected);
        assert_eq!(monad_unit_eta(&Vector::zero(&v)), Polynomial::zero(&v));
        assert_eq!(monad_unit_eta(&Vector::basis(&v, 0)), Polynomial::var(&v, "x").unwrap());
    }

    #[test]
    fn monoid_on_concrete_polynomials() {
        let sr = Semiring::Nat;
        let v = xy(sr);
        let x = Polynomial::var(&v, "x").unwrap();
        assert_eq!(algebra_monoid(MonoidOp::Nabla, &x, &x).unwrap(), x.pow(2));
        let one = algebra_monoid(MonoidOp::Unit, &x, &x).unwrap();
        assert_eq!(x.mul(&one).unwrap(), x);
        let other = Polynomial::var(&FreeModule::from_labels(sr, &["x"]).unwrap(), "x").unwrap();
        assert!(x.mul(&other).is_err());
    }

    #[test]
    fn zero_map_keeps_constants() {
        let sr = Semiring::Nat;
        let v = xy(sr);
        let zero = crate::module::structural_map(crate::module::StructuralKind::Zero, std::slice::from_ref(&v)).unwrap();
        let p = Polynomial::var(&v, "x")
            .unwrap()
            .pow(2)
            .add(&Polynomial::constant(&v, sr.one()))
            .unwrap();
        assert_eq!(sym_map(&zero, &p).unwrap(), Polynomial::constant(&v, sr.one()));
        let id = crate::module::structural_map(crate::module::StructuralKind::Identity, std::slice::from_ref(&v)).unwrap();
        assert_eq!(sym_map(&id, &p).unwrap(), p);
    }

    #[test]
    fn derive_and_coderive_concrete() {
        let sr = Semiring::Nat;
        let v = xy(sr);
        let x = Polynomial::var(&v, "x").unwrap();
        let d = derive_polynomial(&x.pow(2));
        assert_eq!(d.terms().len(), 1);
        let back = coderive_tensor(&d).unwrap();
        assert_eq!(back, x.pow(2).scale(&Scalar::int(2)));
        let bad = TensorElement::new(vec![Factor::Alg(v.clone()), Factor::Alg(v.clone())], Comb::zero(sr)).unwrap();
        assert!(coderive_tensor(&bad).is_err());
    }

    #[test]
    fn seely_examples() {
        let sr = Semiring::Nat;
        let v = FreeModule::from_labels(sr, &["x"]).unwrap();
        let w = FreeModule::from_labels(sr, &["y"]).unwrap();
        let vw = combine_modules(CombineOp::Biproduct, &v, &w).unwrap();
        let x = Polynomial::var(&vw, "0.x").unwrap();
        let y = Polynomial::var(&vw, "1.y").unwrap();
        let p = x.pow(2).mul(&y).unwrap();
        let s = seely_split(&p, &v, &w).unwrap();
        let expected = Comb::basis(sr, vec![Slot::Mono(Mono::power(0, 2)), Slot::Mono(Mono::var(0))]);
        assert_eq!(s.terms(), &expected);
        assert_eq!(seely_merge(&s).unwrap(), p);
        let one = seely_split(&Polynomial::constant(&vw, sr.one()), &v, &w).unwrap();
        assert_eq!(
            one.terms(),
            &Comb::basis(sr, vec![Slot::Mono(Mono::one()), Slot::Mono(Mono::one())])
        );
        let other = FreeModule::from_labels(sr, &["z"]).unwrap();
        assert!(matches!(seely_split(&p, &other, &w), Err(SymError::Unattributable(_))));
    }
}
