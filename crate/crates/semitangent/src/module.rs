//! Free finitely generated semimodules and the matrices between them.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::semiring::{Scalar, Semiring};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModuleError {
    #[error("semiring mismatch: {0} vs {1}")]
    SemiringMismatch(Semiring, Semiring),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("index {index} out of range for {len} summands")]
    Index { index: usize, len: usize },
    #[error("duplicate basis label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown basis label `{0}`")]
    UnknownLabel(String),
}

/// A free semimodule with an ordered basis of distinct labels.
#[derive(Clone)]
pub struct FreeModule {
    semiring: Semiring,
    basis: Vec<String>,
    index: HashMap<String, usize>,
}

impl FreeModule {
    pub fn new(semiring: Semiring, basis: Vec<String>) -> Result<Arc<Self>, ModuleError> {
        let mut index = HashMap::with_capacity(basis.len());
        for (i, b) in basis.iter().enumerate() {
            if index.insert(b.clone(), i).is_some() {
                return Err(ModuleError::DuplicateLabel(b.clone()));
            }
        }
        Ok(Arc::new(FreeModule { semiring, basis, index }))
    }

    pub fn from_labels<S: AsRef<str>>(semiring: Semiring, labels: &[S]) -> Result<Arc<Self>, ModuleError> {
        Self::new(semiring, labels.iter().map(|s| s.as_ref().to_string()).collect())
    }

    pub fn semiring(&self) -> Semiring {
        self.semiring
    }

    pub fn basis(&self) -> &[String] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.basis[i]
    }
}

impl PartialEq for FreeModule {
    fn eq(&self, other: &Self) -> bool {
        self.semiring == other.semiring && self.basis == other.basis
    }
}

impl Eq for FreeModule {}

impl fmt::Debug for FreeModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FreeModule({}, {:?})", self.semiring, self.basis)
    }
}

fn same_semiring(a: &FreeModule, b: &FreeModule) -> Result<Semiring, ModuleError> {
    if a.semiring != b.semiring {
        return Err(ModuleError::SemiringMismatch(a.semiring, b.semiring));
    }
    Ok(a.semiring)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CombineOp {
    Biproduct,
    Tensor,
}

pub fn combine_modules(op: CombineOp, v: &FreeModule, w: &FreeModule) -> Result<Arc<FreeModule>, ModuleError> {
    let sr = same_semiring(v, w)?;
    match op {
        CombineOp::Biproduct => biproduct(&[v, w]),
        CombineOp::Tensor => {
            let mut basis = Vec::with_capacity(v.dim() * w.dim());
            for a in v.basis() {
                for b in w.basis() {
                    basis.push(format!("({a},{b})"));
                }
            }
            FreeModule::new(sr, basis)
        }
    }
}

/// The n-ary biproduct with labels tagged `0.`, `1.`, ... in summand order.
pub fn biproduct(spaces: &[&FreeModule]) -> Result<Arc<FreeModule>, ModuleError> {
    let first = spaces.first().ok_or_else(|| ModuleError::Shape("empty biproduct".into()))?;
    let mut basis = Vec::new();
    for (t, s) in spaces.iter().enumerate() {
        same_semiring(first, s)?;
        basis.extend(s.basis().iter().map(|b| format!("{t}.{b}")));
    }
    FreeModule::new(first.semiring, basis)
}

/// `n` copies of `v` as a flat biproduct.
pub fn power(v: &FreeModule, n: usize) -> Arc<FreeModule> {
    let copies: Vec<&FreeModule> = std::iter::repeat_n(v, n).collect();
    biproduct(&copies).expect("copies share a semiring")
}

/// A vector in canonical sparse form.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Vector {
    space: Arc<FreeModule>,
    coords: BTreeMap<usize, Scalar>,
}

impl Vector {
    pub fn zero(space: &Arc<FreeModule>) -> Self {
        Vector {
            space: space.clone(),
            coords: BTreeMap::new(),
        }
    }

    pub fn basis(space: &Arc<FreeModule>, i: usize) -> Self {
        let mut v = Self::zero(space);
        v.set(i, space.semiring().one());
        v
    }

    pub fn from_dense(space: &Arc<FreeModule>, dense: &[Scalar]) -> Result<Self, ModuleError> {
        if dense.len() != space.dim() {
            return Err(ModuleError::Shape(format!(
                "{} coordinates for dimension {}",
                dense.len(),
                space.dim()
            )));
        }
        let mut v = Self::zero(space);
        for (i, c) in dense.iter().enumerate() {
            v.set(i, c.clone());
        }
        Ok(v)
    }

    pub fn from_labels(space: &Arc<FreeModule>, coords: &[(&str, Scalar)]) -> Result<Self, ModuleError> {
        let mut v = Self::zero(space);
        for (label, c) in coords {
            let i = space.position(label).ok_or_else(|| ModuleError::UnknownLabel(label.to_string()))?;
            let sum = space.semiring().add(&v.get(i), c);
            v.set(i, sum);
        }
        Ok(v)
    }

    fn set(&mut self, i: usize, c: Scalar) {
        if self.space.semiring().is_zero(&c) {
            self.coords.remove(&i);
        } else {
            self.coords.insert(i, c);
        }
    }

    pub fn space(&self) -> &Arc<FreeModule> {
        &self.space
    }

    pub fn get(&self, i: usize) -> Scalar {
        self.coords.get(&i).cloned().unwrap_or_else(|| self.space.semiring().zero())
    }

    pub fn coords(&self) -> impl Iterator<Item = (usize, &Scalar)> {
        self.coords.iter().map(|(i, c)| (*i, c))
    }

    pub fn labelled(&self) -> Vec<(&str, &Scalar)> {
        self.coords.iter().map(|(i, c)| (self.space.label(*i), c)).collect()
    }

    pub fn to_dense(&self) -> Vec<Scalar> {
        (0..self.space.dim()).map(|i| self.get(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }
}

/// A linear map stored as a dense codomain-by-domain matrix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinearMap {
    domain: Arc<FreeModule>,
    codomain: Arc<FreeModule>,
    matrix: Vec<Vec<Scalar>>,
}

impl LinearMap {
    pub fn new(domain: &Arc<FreeModule>, codomain: &Arc<FreeModule>, matrix: Vec<Vec<Scalar>>) -> Result<Self, ModuleError> {
        same_semiring(domain, codomain)?;
        if matrix.len() != codomain.dim() || matrix.iter().any(|r| r.len() != domain.dim()) {
            return Err(ModuleError::Shape(format!(
                "matrix does not have shape {}x{}",
                codomain.dim(),
                domain.dim()
            )));
        }
        Ok(LinearMap {
            domain: domain.clone(),
            codomain: codomain.clone(),
            matrix,
        })
    }

    /// Build a map from the images of basis vectors given as sparse columns.
    pub fn from_columns(
        domain: &Arc<FreeModule>,
        codomain: &Arc<FreeModule>,
        column: impl Fn(usize) -> Vec<(usize, Scalar)>,
    ) -> Result<Self, ModuleError> {
        let sr = same_semiring(domain, codomain)?;
        let mut matrix = vec![vec![sr.zero(); domain.dim()]; codomain.dim()];
        for j in 0..domain.dim() {
            for (i, c) in column(j) {
                let row = matrix.get_mut(i).ok_or(ModuleError::Index {
                    index: i,
                    len: codomain.dim(),
                })?;
                row[j] = sr.add(&row[j], &c);
            }
        }
        Ok(LinearMap {
            domain: domain.clone(),
            codomain: codomain.clone(),
            matrix,
        })
    }

    pub fn domain(&self) -> &Arc<FreeModule> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<FreeModule> {
        &self.codomain
    }

    pub fn matrix(&self) -> &[Vec<Scalar>] {
        &self.matrix
    }

    pub fn semiring(&self) -> Semiring {
        self.domain.semiring()
    }

    pub fn entry(&self, row: usize, col: usize) -> &Scalar {
        &self.matrix[row][col]
    }

    /// Image of the `j`-th basis vector, sparse.
    pub fn column(&self, j: usize) -> Vec<(usize, Scalar)> {
        let sr = self.semiring();
        (0..self.codomain.dim())
            .filter(|&i| !sr.is_zero(&self.matrix[i][j]))
            .map(|i| (i, self.matrix[i][j].clone()))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StructuralKind {
    Identity,
    Zero,
    Injection(usize),
    Projection(usize),
    Symmetry,
}

/// Identity and zero take one or two spaces; injections and projections take
/// the summands of a biproduct; the symmetry takes the two tensor factors.
pub fn structural_map(kind: StructuralKind, spaces: &[Arc<FreeModule>]) -> Result<LinearMap, ModuleError> {
    let need = |n: usize| {
        if spaces.len() < n {
            Err(ModuleError::Shape(format!("expected {n} spaces, got {}", spaces.len())))
        } else {
            Ok(())
        }
    };
    let one = |s: &FreeModule| s.semiring().one();
    match kind {
        StructuralKind::Identity => {
            need(1)?;
            let a = &spaces[0];
            LinearMap::from_columns(a, a, |j| vec![(j, one(a))])
        }
        StructuralKind::Zero => {
            need(1)?;
            let a = &spaces[0];
            let b = spaces.get(1).unwrap_or(a);
            LinearMap::from_columns(a, b, |_| vec![])
        }
        StructuralKind::Injection(i) | StructuralKind::Projection(i) => {
            need(1)?;
            if i >= spaces.len() {
                return Err(ModuleError::Index {
                    index: i,
                    len: spaces.len(),
                });
            }
            let refs: Vec<&FreeModule> = spaces.iter().map(|s| s.as_ref()).collect();
            let sum = biproduct(&refs)?;
            let offset: usize = spaces[..i].iter().map(|s| s.dim()).sum();
            let part = &spaces[i];
            if matches!(kind, StructuralKind::Injection(_)) {
                LinearMap::from_columns(part, &sum, |j| vec![(offset + j, one(part))])
            } else {
                LinearMap::from_columns(&sum, part, |j| {
                    if j >= offset && j < offset + part.dim() {
                        vec![(j - offset, one(part))]
                    } else {
                        vec![]
                    }
                })
            }
        }
        StructuralKind::Symmetry => {
            if spaces.len() != 2 {
                return Err(ModuleError::Shape("symmetry takes exactly two factors".into()));
            }
            let (a, b) = (&spaces[0], &spaces[1]);
            let ab = combine_modules(CombineOp::Tensor, a, b)?;
            let ba = combine_modules(CombineOp::Tensor, b, a)?;
            LinearMap::from_columns(&ab, &ba, |j| {
                let (x, y) = (j / b.dim(), j % b.dim());
                vec![(y * a.dim() + x, one(a))]
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapOp {
    /// `f` then `g`
    Compose,
    Add,
    Tensor,
    Biproduct,
}

pub fn combine_maps(op: MapOp, f: &LinearMap, g: &LinearMap) -> Result<LinearMap, ModuleError> {
    let sr = same_semiring(&f.domain, &g.domain)?;
    match op {
        MapOp::Compose => {
            if f.codomain != g.domain {
                return Err(ModuleError::Shape("codomain of f is not the domain of g".into()));
            }
            let m = matmul(sr, &g.matrix, &f.matrix);
            LinearMap::new(&f.domain, &g.codomain, m)
        }
        MapOp::Add => {
            if f.domain != g.domain || f.codomain != g.codomain {
                return Err(ModuleError::Shape("sum of maps with different types".into()));
            }
            let m = f
                .matrix
                .iter()
                .zip(&g.matrix)
                .map(|(r, s)| r.iter().zip(s).map(|(a, b)| sr.add(a, b)).collect())
                .collect();
            LinearMap::new(&f.domain, &f.codomain, m)
        }
        MapOp::Tensor => {
            let dom = combine_modules(CombineOp::Tensor, &f.domain, &g.domain)?;
            let cod = combine_modules(CombineOp::Tensor, &f.codomain, &g.codomain)?;
            let (gd, gc) = (g.domain.dim(), g.codomain.dim());
            let mut m = vec![vec![sr.zero(); dom.dim()]; cod.dim()];
            for (r, row) in m.iter_mut().enumerate() {
                for (c, e) in row.iter_mut().enumerate() {
                    *e = sr.mul(&f.matrix[r / gc][c / gd], &g.matrix[r % gc][c % gd]);
                }
            }
            LinearMap::new(&dom, &cod, m)
        }
        MapOp::Biproduct => {
            let dom = combine_modules(CombineOp::Biproduct, &f.domain, &g.domain)?;
            let cod = combine_modules(CombineOp::Biproduct, &f.codomain, &g.codomain)?;
            Ok(block_diagonal(&[f, g], dom, cod))
        }
    }
}

/// Block-diagonal assembly onto already-built domain and codomain.
pub fn block_diagonal(blocks: &[&LinearMap], domain: Arc<FreeModule>, codomain: Arc<FreeModule>) -> LinearMap {
    let sr = domain.semiring();
    let mut m = vec![vec![sr.zero(); domain.dim()]; codomain.dim()];
    let (mut r0, mut c0) = (0, 0);
    for b in blocks {
        for (i, row) in b.matrix.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                m[r0 + i][c0 + j] = e.clone();
            }
        }
        r0 += b.codomain.dim();
        c0 += b.domain.dim();
    }
    LinearMap {
        domain,
        codomain,
        matrix: m,
    }
}

/// Plain matrix product `a·b`.
pub fn matmul(sr: Semiring, a: &[Vec<Scalar>], b: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    row.iter()
                        .zip(b)
                        .fold(sr.zero(), |acc, (x, brow)| sr.add(&acc, &sr.mul(x, &brow[j])))
                })
                .collect()
        })
        .collect()
}

pub fn apply_map(f: &LinearMap, v: &Vector) -> Result<Vector, ModuleError> {
    if **v.space() != *f.domain {
        return Err(ModuleError::Shape("vector is not in the domain".into()));
    }
    let sr = f.semiring();
    let mut out = Vector::zero(&f.codomain);
    for (j, c) in v.coords() {
        for (i, e) in f.column(j) {
            let s = sr.add(&out.get(i), &sr.mul(&e, c));
            out.set(i, s);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn space(sr: Semiring, n: usize, prefix: &str) -> Arc<FreeModule> {
        FreeModule::new(sr, (0..n).map(|i| format!("{prefix}{i}")).collect()).unwrap()
    }

    fn id(a: &Arc<FreeModule>) -> LinearMap {
        structural_map(StructuralKind::Identity, std::slice::from_ref(a)).unwrap()
    }

    fn compose(f: &LinearMap, g: &LinearMap) -> LinearMap {
        combine_maps(MapOp::Compose, f, g).unwrap()
    }

    #[test]
    fn dimensions_and_labels() {
        let sr = Semiring::Nat;
        let v = space(sr, 2, "v");
        let w = space(sr, 3, "w");
        assert_eq!(combine_modules(CombineOp::Biproduct, &v, &w).unwrap().dim(), 5);
        assert_eq!(combine_modules(CombineOp::Tensor, &v, &w).unwrap().dim(), 6);
        let x = FreeModule::from_labels(sr, &["x"]).unwrap();
        let xx = combine_modules(CombineOp::Biproduct, &x, &x).unwrap();
        assert_eq!(xx.basis(), ["0.x", "1.x"]);
        let nested = combine_modules(CombineOp::Biproduct, &xx, &xx).unwrap();
        assert_eq!(nested.basis(), ["0.0.x", "0.1.x", "1.0.x", "1.1.x"]);
    }

    #[test]
    fn mismatched_semirings_rejected() {
        let v = space(Semiring::Nat, 1, "v");
        let w = space(Semiring::Bool, 1, "w");
        assert!(combine_modules(CombineOp::Tensor, &v, &w).is_err());
    }

    #[test]
    fn duplicate_labels_rejected() {
        assert!(FreeModule::from_labels(Semiring::Nat, &["a", "a"]).is_err());
    }

    #[test]
    fn injection_projection_identities() {
        for sr in [Semiring::Nat, Semiring::Bool, Semiring::Mod(5), Semiring::Tropical] {
            for da in 1..=4 {
                for db in 1..=4 {
                    let a = space(sr, da, "a");
                    let b = space(sr, db, "b");
                    let parts = [a.clone(), b.clone()];
                    let i0 = structural_map(StructuralKind::Injection(0), &parts).unwrap();
                    let i1 = structural_map(StructuralKind::Injection(1), &parts).unwrap();
                    let p0 = structural_map(StructuralKind::Projection(0), &parts).unwrap();
                    let p1 = structural_map(StructuralKind::Projection(1), &parts).unwrap();
                    assert_eq!(compose(&i0, &p0), id(&a));
                    assert_eq!(compose(&i1, &p1), id(&b));
                    let zero01 = structural_map(StructuralKind::Zero, &[a.clone(), b.clone()]).unwrap();
                    assert_eq!(compose(&i0, &p1), zero01);
                    let sum = combine_maps(MapOp::Add, &compose(&p0, &i0), &compose(&p1, &i1)).unwrap();
                    assert_eq!(sum, id(i0.codomain()));
                }
            }
        }
    }

    #[test]
    fn projection_index_checked() {
        let a = space(Semiring::Nat, 1, "a");
        assert!(structural_map(StructuralKind::Projection(2), &[a.clone(), a]).is_err());
    }

    #[test]
    fn symmetry_on_rank_one_is_identity() {
        let a = space(Semiring::Nat, 1, "a");
        let t = structural_map(StructuralKind::Symmetry, &[a.clone(), a.clone()]).unwrap();
        assert_eq!(t.matrix(), [vec![Scalar::int(1)]]);
    }

    #[test]
    fn small_sum() {
        let a = space(Semiring::Nat, 1, "a");
        let f = LinearMap::new(&a, &a, vec![vec![Scalar::int(2)]]).unwrap();
        let g = LinearMap::new(&a, &a, vec![vec![Scalar::int(3)]]).unwrap();
        assert_eq!(combine_maps(MapOp::Add, &f, &g).unwrap().matrix(), [vec![Scalar::int(5)]]);
        let z = structural_map(StructuralKind::Zero, std::slice::from_ref(&a)).unwrap();
        assert_eq!(combine_maps(MapOp::Add, &f, &z).unwrap(), f);
    }

    #[test]
    fn biproduct_of_maps_then_projection() {
        let sr = Semiring::Nat;
        let a = space(sr, 2, "a");
        let b = space(sr, 1, "b");
        let f = LinearMap::new(
            &a,
            &a,
            vec![vec![Scalar::int(1), Scalar::int(2)], vec![Scalar::int(0), Scalar::int(3)]],
        )
        .unwrap();
        let g = LinearMap::new(&b, &b, vec![vec![Scalar::int(7)]]).unwrap();
        let fg = combine_maps(MapOp::Biproduct, &f, &g).unwrap();
        let p0 = structural_map(StructuralKind::Projection(0), &[a.clone(), b.clone()]).unwrap();
        assert_eq!(compose(&fg, &p0), compose(&p0, &f));
    }

    #[test]
    fn apply_basic() {
        let sr = Semiring::Nat;
        let a = space(sr, 2, "a");
        let parts = [a.clone(), a.clone()];
        let p0 = structural_map(StructuralKind::Projection(0), &parts).unwrap();
        let v = Vector::from_dense(p0.domain(), &[1, 2, 3, 4].map(Scalar::int)).unwrap();
        assert_eq!(apply_map(&p0, &v).unwrap().to_dense(), [1, 2].map(Scalar::int));
        assert_eq!(apply_map(&id(p0.domain()), &v).unwrap(), v);
        let z = structural_map(StructuralKind::Zero, std::slice::from_ref(&a)).unwrap();
        let u = Vector::basis(&a, 1);
        assert!(apply_map(&z, &u).unwrap().is_zero());
        assert!(apply_map(&z, &v).is_err());
    }

    fn semirings() -> impl Strategy<Value = Semiring> {
        prop::sample::select(vec![
            Semiring::Nat,
            Semiring::Int,
            Semiring::Bool,
            Semiring::Tropical,
            Semiring::Mod(5),
        ])
    }

    fn matrix(sr: Semiring, rows: usize, cols: usize) -> impl Strategy<Value = Vec<Vec<Scalar>>> {
        let w = sr.window();
        prop::collection::vec(prop::collection::vec((0..w.len()).prop_map(move |i| w[i].clone()), cols), rows)
    }

    fn map_between(a: &Arc<FreeModule>, b: &Arc<FreeModule>, m: Vec<Vec<Scalar>>) -> LinearMap {
        LinearMap::new(a, b, m).unwrap()
    }

    fn dims4() -> impl Strategy<Value = (Semiring, [usize; 4])> {
        (semirings(), [1usize..=3, 1usize..=3, 1usize..=3, 1usize..=3]).prop_map(|(s, d)| (s, d))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn composition_is_bilinear(
            (sr, d, ms) in dims4().prop_flat_map(|(sr, d)| {
                (Just(sr), Just(d), (matrix(sr, d[1], d[0]), matrix(sr, d[2], d[1]), matrix(sr, d[2], d[1]), matrix(sr, d[3], d[2])))
            })
        ) {
            let s: Vec<_> = d.iter().enumerate().map(|(i, n)| space(sr, *n, &format!("s{i}_"))).collect();
            let k = map_between(&s[0], &s[1], ms.0);
            let f = map_between(&s[1], &s[2], ms.1);
            let g = map_between(&s[1], &s[2], ms.2);
            let h = map_between(&s[2], &s[3], ms.3);
            let lhs = compose(&compose(&k, &combine_maps(MapOp::Add, &f, &g).unwrap()), &h);
            let rhs = combine_maps(MapOp::Add, &compose(&compose(&k, &f), &h), &compose(&compose(&k, &g), &h)).unwrap();
            prop_assert_eq!(lhs, rhs);
            let z01 = structural_map(StructuralKind::Zero, &[s[0].clone(), s[1].clone()]).unwrap();
            let z02 = structural_map(StructuralKind::Zero, &[s[0].clone(), s[2].clone()]).unwrap();
            prop_assert_eq!(compose(&z01, &f), z02.clone());
            let z12 = structural_map(StructuralKind::Zero, &[s[1].clone(), s[2].clone()]).unwrap();
            prop_assert_eq!(compose(&k, &z12), z02);
        }

        #[test]
        fn tensor_is_functorial_and_additive(
            (sr, d, ms) in (semirings(), [1usize..=3, 1usize..=3, 1usize..=3, 1usize..=2]).prop_flat_map(|(sr, d)| {
                (Just(sr), Just(d), (matrix(sr, d[1], d[0]), matrix(sr, d[2], d[1]), matrix(sr, d[1], d[0]), matrix(sr, d[2], d[1]), matrix(sr, d[3], d[3])))
            })
        ) {
            let a = space(sr, d[0], "a");
            let b = space(sr, d[1], "b");
            let c = space(sr, d[2], "c");
            let e = space(sr, d[3], "e");
            let f = map_between(&a, &b, ms.0);
            let f2 = map_between(&b, &c, ms.1);
            let g = map_between(&a, &b, ms.2);
            let g2 = map_between(&b, &c, ms.3);
            let k = map_between(&e, &e, ms.4);
            let t = |x: &LinearMap, y: &LinearMap| combine_maps(MapOp::Tensor, x, y).unwrap();
            prop_assert_eq!(compose(&t(&f, &g), &t(&f2, &g2)), t(&compose(&f, &f2), &compose(&g, &g2)));
            let fg = combine_maps(MapOp::Add, &f, &g).unwrap();
            let lhs = t(&t(&k, &fg), &k);
            let rhs = combine_maps(MapOp::Add, &t(&t(&k, &f), &k), &t(&t(&k, &g), &k)).unwrap();
            prop_assert_eq!(lhs, rhs);
            let tau = structural_map(StructuralKind::Symmetry, &[a.clone(), b.clone()]).unwrap();
            let tau_back = structural_map(StructuralKind::Symmetry, &[b.clone(), a.clone()]).unwrap();
            prop_assert_eq!(compose(&tau, &tau_back), id(tau.domain()));
        }
    }
}
