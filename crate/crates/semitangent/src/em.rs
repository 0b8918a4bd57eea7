//! Algebras of the symmetric-algebra monad, the distributive law `λ` and the
//! tangent structure it lifts to those algebras.
//!
//! Finite-rank algebras are given by structure constants. Their tangent
//! bundles are the Weil extensions `A[ε]`, `A[ε,ε′]` and `A[ε₁,ε₂]`; the
//! lifted structure map `ν♭` is computed from `λ` and must tabulate to the
//! same constants.
//!
//! The block layout of every Weil extension matches the biproduct layout of
//! `tangent`: `A[ε]` is `A ⊕ A`, `A[ε,ε′]` is `A ⊕ A ⊕ A` and `A[ε₁,ε₂]` is
//! `(A ⊕ A) ⊕ (A ⊕ A)` with blocks `1, ε₁, ε₂, ε₁ε₂`.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::module::{matmul, FreeModule, LinearMap, ModuleError};
use crate::poly::{monomials, tensor, Comb, Mono, Poly, Tagged, Var};
use crate::semiring::{Scalar, Semiring, SemiringError};
use crate::sym::{coderive, derive, eta, mu, substitute, sym_rename, Polynomial, SymError};
use crate::tangent::{self, bt_component, bt_functor, p_basis, TangentComponentKind};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EmError {
    #[error("malformed algebra: {0}")]
    Format(String),
    #[error("structure constants violate {0}")]
    Invariant(String),
    #[error("not an algebra morphism: {0}")]
    Morphism(String),
    #[error("operation needs a finite-rank carrier")]
    NotFiniteRank,
    #[error("variable `{0}` has no partner in the other copies")]
    Unpaired(String),
    #[error("{0}")]
    Scope(String),
    #[error("morphism does not equalize T(p) and p;p;z")]
    NotEqualizing,
    #[error("no factorization through the vertical lift")]
    NoFactorization,
    #[error("{0} factorizations through the vertical lift")]
    NonUnique(usize),
    #[error("no value assigned to `{0}`")]
    MissingAssignment(String),
    #[error("{0}")]
    Unsupported(String),
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error(transparent)]
    Sym(#[from] SymError),
    #[error(transparent)]
    Semiring(#[from] SemiringError),
}

/// `λ = S(π₀)ι₀ + d(S(π₀) ⊗ π₁)(1 ⊗ η)∇ι₁`.
pub fn lambda<V: Var>(p: &Poly<Tagged<V>>) -> (Poly<V>, Poly<V>) {
    lambda_via(p, derive)
}

/// `λ` with the deriving transformation supplied by the caller.
pub fn lambda_via<V: Var>(p: &Poly<Tagged<V>>, d: impl Fn(&Poly<Tagged<V>>) -> Comb<(Mono<Tagged<V>>, Tagged<V>)>) -> (Poly<V>, Poly<V>) {
    let first = sym_rename(p, p_basis);
    let second = coderive(&project_derivative(&d(p), 1));
    (first, second)
}

/// `(S(π₀) ⊗ π_k)` applied to a derivative over copies.
fn project_derivative<V: Var>(t: &Comb<(Mono<Tagged<V>>, Tagged<V>)>, k: u8) -> Comb<(Mono<V>, V)> {
    t.map_keys(|(m, v)| {
        if v.tag != k {
            return None;
        }
        let mut pairs = Vec::with_capacity(m.factors().len());
        for (w, e) in m.factors() {
            pairs.push((p_basis(w)?, *e));
        }
        Some((Mono::from_pairs(pairs), v.var.clone()))
    })
}

/// `λ_n`: component 0 is `S(π₀)`, component `k` is
/// `d(S(π₀) ⊗ π_k)d°` restricted to copy `k`.
pub fn lambda_n<V: Var>(p: &Poly<Tagged<V>>, n: usize) -> Vec<Poly<V>> {
    let dp = derive(p);
    let mut out = vec![sym_rename(p, p_basis)];
    for k in 1..=n {
        out.push(coderive(&project_derivative(&dp, k as u8)));
    }
    out
}

/// Read `t.label` variables of a polynomial over `copies` copies of `v`.
fn attribute_copies(p: &Polynomial, v: &FreeModule, copies: usize) -> Result<Poly<Tagged<usize>>, EmError> {
    let space = p.space();
    let mut index = BTreeMap::new();
    for i in 0..space.dim() {
        let label = space.label(i);
        let found = label.split_once('.').and_then(|(t, rest)| {
            let t: usize = t.parse().ok()?;
            (t < copies).then_some(())?;
            v.position(rest).map(|j| Tagged::new(t as u8, j))
        });
        index.insert(i, found.ok_or_else(|| EmError::Unpaired(label.to_string()))?);
    }
    Ok(sym_rename(p.poly(), |i| index.get(i).cloned()))
}

/// `λ` on a polynomial over `V ⊕ V` (labels `0.x`, `1.x`).
pub fn lambda_polynomial(p: &Polynomial, v: &Arc<FreeModule>) -> Result<(Polynomial, Polynomial), EmError> {
    let (a, b) = lambda(&attribute_copies(p, v, 2)?);
    Ok((Polynomial::new(v, a)?, Polynomial::new(v, b)?))
}

/// `λ_n` on a polynomial over `n + 1` copies of `V`.
pub fn lambda_n_polynomial(p: &Polynomial, v: &Arc<FreeModule>, n: usize) -> Result<Vec<Polynomial>, EmError> {
    if n == 0 {
        return Err(EmError::Scope("λ_n needs n ≥ 1".into()));
    }
    let parts = lambda_n(&attribute_copies(p, v, n + 1)?, n);
    parts.into_iter().map(|q| Polynomial::new(v, q).map_err(EmError::from)).collect()
}

/// A finite-rank commutative algebra given by structure constants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureAlgebra {
    semiring: Semiring,
    basis: Vec<String>,
    unit: Vec<Scalar>,
    table: Vec<Vec<Vec<Scalar>>>,
}

fn dense_add(sr: Semiring, a: &mut [Scalar], b: &[Scalar], c: &Scalar) {
    for (x, y) in a.iter_mut().zip(b) {
        *x = sr.add(x, &sr.mul(c, y));
    }
}

impl StructureAlgebra {
    /// Checks shapes, commutativity, associativity and the unit law.
    pub fn new(semiring: Semiring, basis: Vec<String>, unit: Vec<Scalar>, table: Vec<Vec<Vec<Scalar>>>) -> Result<Self, EmError> {
        let r = basis.len();
        if r == 0 {
            return Err(EmError::Format("empty basis".into()));
        }
        FreeModule::new(semiring, basis.clone()).map_err(|e| EmError::Format(e.to_string()))?;
        let shaped = unit.len() == r && table.len() == r && table.iter().all(|row| row.len() == r && row.iter().all(|v| v.len() == r));
        if !shaped {
            return Err(EmError::Format("unit or table has the wrong shape".into()));
        }
        let a = StructureAlgebra {
            semiring,
            basis,
            unit,
            table,
        };
        a.check()?;
        Ok(a)
    }

    fn check(&self) -> Result<(), EmError> {
        let r = self.rank();
        for i in 0..r {
            for j in 0..r {
                if self.table[i][j] != self.table[j][i] {
                    return Err(EmError::Invariant(format!("commutativity at ({i},{j})")));
                }
            }
        }
        for i in 0..r {
            let e = self.basis_vector(i);
            if self.mul(&self.unit, &e) != e {
                return Err(EmError::Invariant(format!("the unit law at {}", self.basis[i])));
            }
        }
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    let left = self.mul(&self.table[i][j], &self.basis_vector(k));
                    let right = self.mul(&self.basis_vector(i), &self.table[j][k]);
                    if left != right {
                        return Err(EmError::Invariant(format!("associativity at ({i},{j},{k})")));
                    }
                }
            }
        }
        Ok(())
    }

    /// The rank-one algebra `K`.
    pub fn unit_algebra(sr: Semiring) -> Self {
        Self::truncated(sr, 1)
    }

    /// `K[t]/(tⁿ)` with basis `1, t, t^2, …`.
    pub fn truncated(sr: Semiring, n: usize) -> Self {
        let basis = (0..n)
            .map(|k| match k {
                0 => "1".to_string(),
                1 => "t".to_string(),
                _ => format!("t^{k}"),
            })
            .collect();
        let mut table = vec![vec![vec![sr.zero(); n]; n]; n];
        for (i, row) in table.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                if i + j < n {
                    v[i + j] = sr.one();
                }
            }
        }
        let mut unit = vec![sr.zero(); n];
        unit[0] = sr.one();
        Self::new(sr, basis, unit, table).expect("truncated polynomial algebra")
    }

    /// `Kⁿ` with orthogonal idempotents `e0, e1, …`.
    pub fn product(sr: Semiring, n: usize) -> Self {
        let basis = (0..n).map(|k| format!("e{k}")).collect();
        let mut table = vec![vec![vec![sr.zero(); n]; n]; n];
        for (i, row) in table.iter_mut().enumerate() {
            row[i][i] = sr.one();
        }
        Self::new(sr, basis, vec![sr.one(); n], table).expect("product algebra")
    }

    pub fn semiring(&self) -> Semiring {
        self.semiring
    }

    pub fn basis(&self) -> &[String] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn unit(&self) -> &[Scalar] {
        &self.unit
    }

    pub fn table(&self) -> &[Vec<Vec<Scalar>>] {
        &self.table
    }

    pub fn module(&self) -> Arc<FreeModule> {
        FreeModule::new(self.semiring, self.basis.clone()).expect("labels checked at construction")
    }

    pub fn basis_vector(&self, i: usize) -> Vec<Scalar> {
        let mut v = vec![self.semiring.zero(); self.rank()];
        v[i] = self.semiring.one();
        v
    }

    pub fn mul(&self, a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
        let sr = self.semiring;
        let mut out = vec![sr.zero(); self.rank()];
        for (i, x) in a.iter().enumerate() {
            if sr.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if sr.is_zero(y) {
                    continue;
                }
                dense_add(sr, &mut out, &self.table[i][j], &sr.mul(x, y));
            }
        }
        out
    }

    /// The structure map `ν : S(A) → A`, evaluating variables at basis
    /// elements.
    pub fn evaluate(&self, p: &Poly<usize>) -> Vec<Scalar> {
        let sr = self.semiring;
        let mut out = vec![sr.zero(); self.rank()];
        for (m, c) in p.iter() {
            let mut acc = self.unit.clone();
            for (v, e) in m.factors() {
                for _ in 0..*e {
                    acc = self.mul(&acc, &self.basis_vector(*v));
                }
            }
            dense_add(sr, &mut out, &acc, c);
        }
        out
    }

    /// Equality of semiring, rank, unit and constants, ignoring labels.
    pub fn same_structure(&self, other: &Self) -> bool {
        self.semiring == other.semiring && self.unit == other.unit && self.table == other.table
    }

    pub fn relabel(&self, basis: Vec<String>) -> Result<Self, EmError> {
        if basis.len() != self.rank() {
            return Err(EmError::Format("relabelling changes the rank".into()));
        }
        FreeModule::new(self.semiring, basis.clone()).map_err(|e| EmError::Format(e.to_string()))?;
        Ok(StructureAlgebra { basis, ..self.clone() })
    }

    pub fn to_json(&self) -> String {
        let sr = self.semiring;
        let mut unit = Map::new();
        for (i, c) in self.unit.iter().enumerate() {
            if !sr.is_zero(c) {
                unit.insert(self.basis[i].clone(), Value::String(sr.format_scalar(c)));
            }
        }
        let mut table = Map::new();
        for i in 0..self.rank() {
            for j in i..self.rank() {
                let mut entry = Map::new();
                for (k, c) in self.table[i][j].iter().enumerate() {
                    if !sr.is_zero(c) {
                        entry.insert(k.to_string(), Value::String(sr.format_scalar(c)));
                    }
                }
                if !entry.is_empty() {
                    table.insert(format!("{i},{j}"), Value::Object(entry));
                }
            }
        }
        let doc = json!({
            "semiring": sr.to_string(),
            "basis": self.basis,
            "unit": unit,
            "table": table,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("json values serialize");
        s.push('\n');
        s
    }

    /// Parse the JSON form. Malformed documents give [`EmError::Format`];
    /// well-formed documents with bad constants give [`EmError::Invariant`].
    pub fn from_json(text: &str) -> Result<Self, EmError> {
        let fmt = |m: &str| EmError::Format(m.to_string());
        let doc: Value = serde_json::from_str(text).map_err(|e| EmError::Format(e.to_string()))?;
        let obj = doc.as_object().ok_or_else(|| fmt("top level must be an object"))?;
        for key in obj.keys() {
            if !["semiring", "basis", "unit", "table"].contains(&key.as_str()) {
                return Err(EmError::Format(format!("unknown field `{key}`")));
            }
        }
        let sr: Semiring = obj
            .get("semiring")
            .and_then(Value::as_str)
            .ok_or_else(|| fmt("missing semiring"))?
            .parse()
            .map_err(|e: SemiringError| EmError::Format(e.to_string()))?;
        let basis: Vec<String> = obj
            .get("basis")
            .and_then(Value::as_array)
            .ok_or_else(|| fmt("missing basis"))?
            .iter()
            .map(|v| v.as_str().map(str::to_string).ok_or_else(|| fmt("basis labels must be strings")))
            .collect::<Result<_, _>>()?;
        let r = basis.len();
        let module = FreeModule::new(sr, basis.clone()).map_err(|e| EmError::Format(e.to_string()))?;
        let scalar = |v: &Value| -> Result<Scalar, EmError> {
            let s = v.as_str().ok_or_else(|| fmt("scalars must be decimal strings"))?;
            sr.parse_scalar(s).map_err(|e| EmError::Format(e.to_string()))
        };
        let mut unit = vec![sr.zero(); r];
        for (label, v) in obj.get("unit").and_then(Value::as_object).ok_or_else(|| fmt("missing unit"))? {
            let i = module
                .position(label)
                .ok_or_else(|| EmError::Format(format!("unknown unit label `{label}`")))?;
            unit[i] = scalar(v)?;
        }
        let mut table = vec![vec![vec![sr.zero(); r]; r]; r];
        for (key, entry) in obj.get("table").and_then(Value::as_object).ok_or_else(|| fmt("missing table"))? {
            let bad_key = || EmError::Format(format!("bad table key `{key}`"));
            let (i, j) = key.split_once(',').ok_or_else(bad_key)?;
            let (i, j): (usize, usize) = (i.parse().map_err(|_| bad_key())?, j.parse().map_err(|_| bad_key())?);
            if i > j || j >= r {
                return Err(bad_key());
            }
            for (k, v) in entry.as_object().ok_or_else(|| fmt("table entries must be objects"))? {
                let k: usize = k.parse().map_err(|_| EmError::Format(format!("bad index `{k}`")))?;
                if k >= r {
                    return Err(EmError::Format(format!("index {k} out of range")));
                }
                let c = scalar(v)?;
                table[i][j][k] = c.clone();
                table[j][i][k] = c;
            }
        }
        Self::new(sr, basis, unit, table)
    }
}

/// An algebra for the monad: free, finite-rank, or the lift of another.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SAlgebra {
    Free(Arc<FreeModule>),
    FiniteRank(StructureAlgebra),
    Lifted(Box<SAlgebra>),
}

impl SAlgebra {
    /// `K` with structure map evaluating the generator at 1.
    pub fn initial(sr: Semiring) -> Self {
        SAlgebra::FiniteRank(StructureAlgebra::unit_algebra(sr))
    }

    pub fn semiring(&self) -> Semiring {
        match self {
            SAlgebra::Free(v) => v.semiring(),
            SAlgebra::FiniteRank(a) => a.semiring(),
            SAlgebra::Lifted(a) => a.semiring(),
        }
    }

    pub fn rank(&self) -> Option<usize> {
        match self {
            SAlgebra::Free(_) => None,
            SAlgebra::FiniteRank(a) => Some(a.rank()),
            SAlgebra::Lifted(a) => a.rank().map(|r| 2 * r),
        }
    }

    pub fn labels(&self) -> Option<Vec<String>> {
        match self {
            SAlgebra::Free(_) => None,
            SAlgebra::FiniteRank(a) => Some(a.basis().to_vec()),
            SAlgebra::Lifted(a) => {
                let inner = a.labels()?;
                Some((0..2).flat_map(|t| inner.iter().map(move |b| format!("{t}.{b}"))).collect())
            }
        }
    }

    /// `ν : S(A) → A` for finite-rank carriers.
    pub fn structure_map(&self, p: &Poly<usize>) -> Result<Vec<Scalar>, EmError> {
        match self {
            SAlgebra::Free(_) => Err(EmError::NotFiniteRank),
            SAlgebra::FiniteRank(a) => Ok(a.evaluate(p)),
            SAlgebra::Lifted(inner) => lifted_structure_map(inner, p),
        }
    }

    /// `μ`, the structure map of a free algebra.
    pub fn free_structure_map(&self, p: &Poly<Mono<usize>>) -> Result<Poly<usize>, EmError> {
        match self {
            SAlgebra::Free(_) => Ok(mu(p)),
            _ => Err(EmError::Unsupported("not a free algebra".into())),
        }
    }

    /// Unit and associativity laws of the structure map, on nested monomials
    /// with inner and outer degree bounded by `degree`.
    pub fn check_laws(&self, degree: u32) -> Result<usize, EmError> {
        let sr = self.semiring();
        let r = match self.rank() {
            Some(r) => r,
            None => return Ok(0),
        };
        let mut checked = 0;
        for i in 0..r {
            let mut e = vec![sr.zero(); r];
            e[i] = sr.one();
            if self.structure_map(&Poly::var(sr, i))? != e {
                return Err(EmError::Invariant(format!("η;ν at basis {i}")));
            }
            checked += 1;
        }
        let vars: Vec<usize> = (0..r).collect();
        let tokens = monomials(&vars, degree);
        for outer in monomials(&tokens, degree) {
            let nested: Poly<Mono<usize>> = Poly::basis(sr, outer);
            let left = self.structure_map(&mu(&nested))?;
            let right = self.structure_map(&substitute(&nested, |m| {
                let v = self.structure_map(&Poly::basis(sr, m.clone())).expect("finite rank");
                Comb::from_terms(sr, v.into_iter().enumerate())
            }))?;
            if left != right {
                return Err(EmError::Invariant("μ;ν = S(ν);ν".into()));
            }
            checked += 1;
        }
        Ok(checked)
    }
}

/// `ν♭ = S(π₀)νι₀ + d(S(π₀) ⊗ π₁)(ν ⊗ 1)∇^ν ι₁` on the carrier `A ⊕ A`.
fn lifted_structure_map(inner: &SAlgebra, p: &Poly<usize>) -> Result<Vec<Scalar>, EmError> {
    let r = inner.rank().ok_or(EmError::NotFiniteRank)?;
    let sr = inner.semiring();
    let tagged = sym_rename(p, |&i| Some(Tagged::new((i / r) as u8, i % r)));
    let mut first = inner.structure_map(&sym_rename(&tagged, p_basis))?;
    first.resize(r, sr.zero());
    let mut second = vec![sr.zero(); r];
    for ((m, v), c) in project_derivative(&derive(&tagged), 1).iter() {
        let x = inner.structure_map(&Poly::basis(sr, m.clone()))?;
        let xs = eta(&Comb::from_terms(sr, x.into_iter().enumerate()));
        let product = inner.structure_map(&xs.mul(&Poly::var(sr, *v)))?;
        dense_add(sr, &mut second, &product, c);
    }
    first.extend(second);
    Ok(first)
}

/// `ν♭` for a free algebra: `λ` followed by `μ ⊕ μ`.
pub fn free_lifted_structure_map<V: Var>(p: &Poly<Tagged<Mono<V>>>) -> (Poly<V>, Poly<V>) {
    let (a, b) = lambda(p);
    (mu(&a), mu(&b))
}

/// Structure map of the fibre power `T̄_n A`: `λ_n` followed by `ν` on each
/// component.
pub fn fibre_structure_map(a: &StructureAlgebra, n: usize, p: &Poly<usize>) -> Vec<Scalar> {
    let r = a.rank();
    let tagged = sym_rename(p, |&i| Some(Tagged::new((i / r) as u8, i % r)));
    lambda_n(&tagged, n).iter().flat_map(|q| a.evaluate(q)).collect()
}

pub fn lift_tangent(a: &SAlgebra) -> SAlgebra {
    SAlgebra::Lifted(Box::new(a.clone()))
}

/// `∇^ν = (η ⊗ η)∇ν` on basis pairs and `u^ν = uν`.
pub fn induced_monoid(a: &SAlgebra) -> Result<StructureAlgebra, EmError> {
    let r = a.rank().ok_or(EmError::NotFiniteRank)?;
    let sr = a.semiring();
    let unit = a.structure_map(&Poly::one(sr))?;
    let mut table = vec![vec![Vec::new(); r]; r];
    for (i, row) in table.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = a.structure_map(&Poly::var(sr, i).mul(&Poly::var(sr, j)))?;
        }
    }
    StructureAlgebra::new(sr, a.labels().expect("finite rank"), unit, table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeilKind {
    /// `A[ε]`
    T,
    /// `A[ε,ε′]`
    T2,
    /// `A[ε₁,ε₂]`
    Tsq,
}

impl WeilKind {
    fn directions(self) -> &'static [&'static str] {
        match self {
            WeilKind::T => &["", "eps"],
            WeilKind::T2 => &["", "eps", "eps'"],
            WeilKind::Tsq => &["", "eps1", "eps2", "eps1eps2"],
        }
    }

    /// Product of two directions, `None` when it vanishes.
    fn mul(self, a: usize, b: usize) -> Option<usize> {
        match self {
            WeilKind::T | WeilKind::T2 => match (a, b) {
                (0, x) | (x, 0) => Some(x),
                _ => None,
            },
            WeilKind::Tsq => (a & b == 0).then_some(a | b),
        }
    }
}

impl std::str::FromStr for WeilKind {
    type Err = EmError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "T" => Ok(WeilKind::T),
            "T2" => Ok(WeilKind::T2),
            "Tsq" => Ok(WeilKind::Tsq),
            _ => Err(EmError::Scope(format!("unknown Weil kind `{s}` (expected T, T2 or Tsq)"))),
        }
    }
}

fn direction_label(dir: &str, b: &str) -> String {
    match (dir, b) {
        ("", b) => b.to_string(),
        (d, "1") => d.to_string(),
        (d, b) => format!("{d}*{b}"),
    }
}

pub fn weil_extend(a: &StructureAlgebra, kind: WeilKind) -> StructureAlgebra {
    let sr = a.semiring();
    let r = a.rank();
    let dirs = kind.directions();
    let n = dirs.len() * r;
    let basis = dirs
        .iter()
        .flat_map(|d| a.basis().iter().map(move |b| direction_label(d, b)))
        .collect();
    let mut unit = vec![sr.zero(); n];
    unit[..r].clone_from_slice(a.unit());
    let mut table = vec![vec![vec![sr.zero(); n]; n]; n];
    for d1 in 0..dirs.len() {
        for d2 in 0..dirs.len() {
            let Some(d) = kind.mul(d1, d2) else { continue };
            for i in 0..r {
                for j in 0..r {
                    table[d1 * r + i][d2 * r + j][d * r..(d + 1) * r].clone_from_slice(&a.table()[i][j]);
                }
            }
        }
    }
    StructureAlgebra::new(sr, basis, unit, table).expect("Weil extensions of valid algebras are valid")
}

/// A linear map between finite-rank algebras preserving unit and product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearMorphism {
    domain: StructureAlgebra,
    codomain: StructureAlgebra,
    map: LinearMap,
}

impl LinearMorphism {
    pub fn new(domain: &StructureAlgebra, codomain: &StructureAlgebra, matrix: Vec<Vec<Scalar>>) -> Result<Self, EmError> {
        let map = LinearMap::new(&domain.module(), &codomain.module(), matrix)?;
        let f = LinearMorphism {
            domain: domain.clone(),
            codomain: codomain.clone(),
            map,
        };
        f.check()?;
        Ok(f)
    }

    fn check(&self) -> Result<(), EmError> {
        if self.apply(self.domain.unit()) != self.codomain.unit() {
            return Err(EmError::Morphism("unit not preserved".into()));
        }
        let r = self.domain.rank();
        for i in 0..r {
            for j in i..r {
                let (ei, ej) = (self.domain.basis_vector(i), self.domain.basis_vector(j));
                let left = self.apply(&self.domain.mul(&ei, &ej));
                let right = self.codomain.mul(&self.apply(&ei), &self.apply(&ej));
                if left != right {
                    return Err(EmError::Morphism(format!("product of basis {i} and {j} not preserved")));
                }
            }
        }
        Ok(())
    }

    pub fn identity(a: &StructureAlgebra) -> Self {
        let m = (0..a.rank()).map(|i| a.basis_vector(i)).collect();
        LinearMorphism::new(a, a, m).expect("identity")
    }

    pub fn domain(&self) -> &StructureAlgebra {
        &self.domain
    }

    pub fn codomain(&self) -> &StructureAlgebra {
        &self.codomain
    }

    pub fn map(&self) -> &LinearMap {
        &self.map
    }

    pub fn matrix(&self) -> &[Vec<Scalar>] {
        self.map.matrix()
    }

    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        let col: Vec<Vec<Scalar>> = v.iter().map(|c| vec![c.clone()]).collect();
        matmul(self.domain.semiring(), self.map.matrix(), &col)
            .into_iter()
            .map(|mut r| r.remove(0))
            .collect()
    }

    /// `self` then `g`.
    pub fn then(&self, g: &LinearMorphism) -> Result<LinearMorphism, EmError> {
        if !self.codomain.same_structure(&g.domain) {
            return Err(EmError::Morphism("codomain and domain differ".into()));
        }
        let m = matmul(self.domain.semiring(), g.matrix(), self.matrix());
        LinearMorphism::new(&self.domain, &g.codomain, m)
    }

    /// Commutes with the structure maps: `S(f);ν = ν;f` on monomials of
    /// degree at most `degree`.
    pub fn check_structure_law(&self, degree: u32) -> Result<usize, EmError> {
        let sr = self.domain.semiring();
        let vars: Vec<usize> = (0..self.domain.rank()).collect();
        let mut n = 0;
        for m in monomials(&vars, degree) {
            let p = Poly::basis(sr, m);
            let pushed = substitute(&p, |&i| {
                Comb::from_terms(sr, self.apply(&self.domain.basis_vector(i)).into_iter().enumerate())
            });
            if self.codomain.evaluate(&pushed) != self.apply(&self.domain.evaluate(&p)) {
                return Err(EmError::Morphism("structure maps not preserved".into()));
            }
            n += 1;
        }
        Ok(n)
    }
}

/// An algebra morphism between free algebras, given on generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Substitution {
    source: Arc<FreeModule>,
    target: Arc<FreeModule>,
    images: Vec<Poly<usize>>,
}

impl Substitution {
    pub fn new(source: &Arc<FreeModule>, target: &Arc<FreeModule>, images: Vec<Polynomial>) -> Result<Self, EmError> {
        if images.len() != source.dim() {
            return Err(EmError::Scope(format!("{} images for {} generators", images.len(), source.dim())));
        }
        if images.iter().any(|p| p.space() != target) {
            return Err(EmError::Sym(SymError::Alphabet("image over the wrong alphabet".into())));
        }
        Ok(Substitution {
            source: source.clone(),
            target: target.clone(),
            images: images.into_iter().map(|p| p.poly().clone()).collect(),
        })
    }

    pub fn identity(v: &Arc<FreeModule>) -> Self {
        let images = (0..v.dim()).map(|i| Poly::var(v.semiring(), i)).collect();
        Substitution {
            source: v.clone(),
            target: v.clone(),
            images,
        }
    }

    pub fn source(&self) -> &Arc<FreeModule> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FreeModule> {
        &self.target
    }

    pub fn images(&self) -> &[Poly<usize>] {
        &self.images
    }

    pub fn apply(&self, p: &Poly<usize>) -> Poly<usize> {
        let sr = self.source.semiring();
        let mut out = Poly::zero(sr);
        for (m, c) in p.iter() {
            let mut acc = Poly::constant(sr, c.clone());
            for (v, e) in m.factors() {
                acc = acc.mul(&self.images[*v].pow(*e));
            }
            out.add_scaled(&acc, &sr.one());
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlgebraMorphism {
    LinearBacked(LinearMorphism),
    Substitution(Substitution),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmComponent {
    P,
    Z,
    Sigma,
    L,
    C,
}

/// The lifted structural map at `A`: the biproduct component at the carrier,
/// between the Weil extensions it connects.
pub fn em_component(kind: EmComponent, a: &StructureAlgebra) -> Result<LinearMorphism, EmError> {
    let v = a.module();
    let (tk, dom, cod) = match kind {
        EmComponent::P => (TangentComponentKind::Projection, weil_extend(a, WeilKind::T), a.clone()),
        EmComponent::Z => (TangentComponentKind::Zero, a.clone(), weil_extend(a, WeilKind::T)),
        EmComponent::Sigma => (TangentComponentKind::Sum, weil_extend(a, WeilKind::T2), weil_extend(a, WeilKind::T)),
        EmComponent::L => (
            TangentComponentKind::Lift,
            weil_extend(a, WeilKind::T),
            weil_extend(a, WeilKind::Tsq),
        ),
        EmComponent::C => (
            TangentComponentKind::Flip,
            weil_extend(a, WeilKind::Tsq),
            weil_extend(a, WeilKind::Tsq),
        ),
    };
    let m = bt_component(tk, &v)?;
    LinearMorphism::new(&dom, &cod, m.matrix().to_vec())
}

/// `T̄(f) = T(f) = f ⊕ f` between dual-number extensions.
pub fn em_functor(f: &AlgebraMorphism) -> Result<AlgebraMorphism, EmError> {
    match f {
        AlgebraMorphism::LinearBacked(f) => {
            let m = bt_functor(f.map(), 1)?;
            let g = LinearMorphism::new(
                &weil_extend(f.domain(), WeilKind::T),
                &weil_extend(f.codomain(), WeilKind::T),
                m.matrix().to_vec(),
            )?;
            Ok(AlgebraMorphism::LinearBacked(g))
        }
        AlgebraMorphism::Substitution(_) => Err(EmError::Unsupported(
            "the tangent bundle of a free algebra is not free; use pushforward".into(),
        )),
    }
}

fn evaluate_at(sr: Semiring, p: &Poly<usize>, point: &[Scalar]) -> Scalar {
    let mut total = sr.zero();
    for (m, c) in p.iter() {
        let mut acc = c.clone();
        for (v, e) in m.factors() {
            for _ in 0..*e {
                acc = sr.mul(&acc, &point[*v]);
            }
        }
        total = sr.add(&total, &acc);
    }
    total
}

pub type Assignment = BTreeMap<String, Scalar>;

/// Push a point and a tangent vector of the target through a substitution:
/// values of the generators and their Jacobian-vector product.
pub fn pushforward(f: &Substitution, point: &Assignment, tangent: &Assignment) -> Result<(Assignment, Assignment), EmError> {
    let sr = f.source.semiring();
    let lookup = |a: &Assignment, label: &str| a.get(label).cloned().ok_or_else(|| EmError::MissingAssignment(label.to_string()));
    let at: Vec<Scalar> = f.target.basis().iter().map(|l| lookup(point, l)).collect::<Result<_, _>>()?;
    let dir: Vec<Scalar> = f.target.basis().iter().map(|l| lookup(tangent, l)).collect::<Result<_, _>>()?;
    let mut values = Assignment::new();
    let mut tangents = Assignment::new();
    for (i, image) in f.images.iter().enumerate() {
        let label = f.source.label(i).to_string();
        values.insert(label.clone(), evaluate_at(sr, image, &at));
        let mut t = sr.zero();
        for ((m, v), c) in derive(image).iter() {
            let term = sr.mul(c, &sr.mul(&evaluate_at(sr, &Poly::basis(sr, m.clone()), &at), &dir[*v]));
            t = sr.add(&t, &term);
        }
        tangents.insert(label, t);
    }
    Ok((values, tangents))
}

/// The dual numbers `K[ε]`, obtained by lifting the initial algebra.
pub fn infinitesimal_object(sr: Semiring) -> Result<StructureAlgebra, EmError> {
    let lifted = induced_monoid(&lift_tangent(&SAlgebra::initial(sr)))?;
    lifted.relabel(vec!["1".into(), "eps".into()])
}

/// Factor an equalizing morphism `h : B → A[ε₁,ε₂]` through the vertical
/// lift `A[ε,ε′] → A[ε₁,ε₂]` by exhaustive search over a finite carrier.
pub fn vertical_lift_factor(a: &StructureAlgebra, h: &LinearMorphism) -> Result<LinearMorphism, EmError> {
    let sr = a.semiring();
    let v = a.module();
    let tsq = weil_extend(a, WeilKind::Tsq);
    if !h.codomain().same_structure(&tsq) {
        return Err(EmError::Scope("morphism does not land in A[ε₁,ε₂]".into()));
    }
    if !equalizes(a, h.matrix())? {
        return Err(EmError::NotEqualizing);
    }
    let elements = sr
        .elements()
        .ok_or_else(|| EmError::Scope(format!("exhaustive search needs a finite semiring, not {sr}")))?;
    let lift = tangent::vertical_lift(&v)?;
    let width = 3 * a.rank();
    let columns: Vec<Result<Vec<Scalar>, EmError>> = (0..h.domain().rank())
        .into_par_iter()
        .map(|j| {
            let target: Vec<Vec<Scalar>> = h.matrix().iter().map(|row| vec![row[j].clone()]).collect();
            let mut found: Vec<Vec<Scalar>> = Vec::new();
            let mut digits = vec![0usize; width];
            loop {
                let w: Vec<Vec<Scalar>> = digits.iter().map(|&d| vec![elements[d].clone()]).collect();
                if matmul(sr, lift.matrix(), &w) == target {
                    found.push(w.into_iter().map(|mut c| c.remove(0)).collect());
                }
                if !advance(&mut digits, elements.len()) {
                    break;
                }
            }
            match found.len() {
                0 => Err(EmError::NoFactorization),
                1 => Ok(found.remove(0)),
                n => Err(EmError::NonUnique(n)),
            }
        })
        .collect();
    let columns: Vec<Vec<Scalar>> = columns.into_iter().collect::<Result<_, _>>()?;
    let matrix = (0..width).map(|i| columns.iter().map(|c| c[i].clone()).collect()).collect();
    LinearMorphism::new(h.domain(), &weil_extend(a, WeilKind::T2), matrix)
}

fn advance(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

/// Whether `h` (a matrix into `T²A`) equalizes `T(p_A)` and `p_{TA};p_A;z_A`.
pub fn equalizes(a: &StructureAlgebra, h: &[Vec<Scalar>]) -> Result<bool, EmError> {
    let sr = a.semiring();
    let v = a.module();
    let t = tangent::tangent_space(&v);
    let tp = bt_functor(&bt_component(TangentComponentKind::Projection, &v)?, 1)?;
    let p_t = bt_component(TangentComponentKind::Projection, &t)?;
    let p = bt_component(TangentComponentKind::Projection, &v)?;
    let z = bt_component(TangentComponentKind::Zero, &v)?;
    let left = matmul(sr, tp.matrix(), h);
    let right = matmul(sr, z.matrix(), &matmul(sr, p.matrix(), &matmul(sr, p_t.matrix(), h)));
    Ok(left == right)
}

/// The vertical lift at `A` as an algebra morphism `A[ε,ε′] → A[ε₁,ε₂]`.
pub fn vertical_lift_morphism(a: &StructureAlgebra) -> Result<LinearMorphism, EmError> {
    let l = tangent::vertical_lift(&a.module())?;
    LinearMorphism::new(&weil_extend(a, WeilKind::T2), &weil_extend(a, WeilKind::Tsq), l.matrix().to_vec())
}

/// `T_n A = A[ε₁,…,ε_n]` with all products of the `ε_i` zero.
pub fn fibre_power_algebra(a: &StructureAlgebra, n: usize) -> StructureAlgebra {
    match n {
        1 => weil_extend(a, WeilKind::T),
        2 => weil_extend(a, WeilKind::T2),
        _ => {
            let sr = a.semiring();
            let r = a.rank();
            let size = (n + 1) * r;
            let basis = (0..=n)
                .flat_map(|d| {
                    a.basis().iter().map(move |b| {
                        if d == 0 {
                            b.clone()
                        } else {
                            direction_label(&format!("eps{d}"), b)
                        }
                    })
                })
                .collect();
            let mut unit = vec![sr.zero(); size];
            unit[..r].clone_from_slice(a.unit());
            let mut table = vec![vec![vec![sr.zero(); size]; size]; size];
            for d1 in 0..=n {
                for d2 in 0..=n {
                    let d = match (d1, d2) {
                        (0, x) | (x, 0) => x,
                        _ => continue,
                    };
                    for i in 0..r {
                        for j in 0..r {
                            table[d1 * r + i][d2 * r + j][d * r..(d + 1) * r].clone_from_slice(&a.table()[i][j]);
                        }
                    }
                }
            }
            StructureAlgebra::new(sr, basis, unit, table).expect("fibre powers of valid algebras are valid")
        }
    }
}

/// `a ⊗ b` for dense vectors, as a convenience for tensor-shaped checks.
pub fn dense_tensor(sr: Semiring, a: &[Scalar], b: &[Scalar]) -> Comb<(usize, usize)> {
    tensor(
        &Comb::from_terms(sr, a.iter().cloned().enumerate()),
        &Comb::from_terms(sr, b.iter().cloned().enumerate()),
    )
}
