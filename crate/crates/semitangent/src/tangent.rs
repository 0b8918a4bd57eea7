//! The tangent structure on free semimodules whose tangent functor is
//! `T(V) = V ⊕ V`.
//!
//! Each structural map is first given by its action on tagged basis
//! variables; the matrices are read off from those actions. Symbolic code
//! (the distributive law and its laws) reuses the same actions through
//! `S(−)`.

use std::sync::Arc;

use crate::module::{biproduct, block_diagonal, power, FreeModule, LinearMap, ModuleError};
use crate::poly::{Tagged, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TangentComponentKind {
    /// `p = π₀ : T V → V`
    Projection,
    /// `z = ι₀ : V → T V`
    Zero,
    /// `ℓ = ι₀ ⊕ ι₁ : T V → T² V`
    Lift,
    /// `c = 1 ⊕ τ ⊕ 1 : T² V → T² V`
    Flip,
    /// `σ = 1 ⊕ (π₀ + π₁) : T₂ V → T V`
    Sum,
    /// `ρ_i = 1 ⊕ π_i : T_n V → T V`
    Rho { n: usize, i: usize },
}

pub fn p_basis<V: Var>(v: &Tagged<V>) -> Option<V> {
    (v.tag == 0).then(|| v.var.clone())
}

pub fn z_basis<V: Var>(v: &V) -> Tagged<V> {
    Tagged::new(0, v.clone())
}

pub fn lift_basis<V: Var>(v: &Tagged<V>) -> Tagged<Tagged<V>> {
    Tagged::new(v.tag, Tagged::new(v.tag, v.var.clone()))
}

pub fn flip_basis<V: Var>(v: &Tagged<Tagged<V>>) -> Tagged<Tagged<V>> {
    Tagged::new(v.var.tag, Tagged::new(v.tag, v.var.var.clone()))
}

pub fn sum_basis<V: Var>(v: &Tagged<V>) -> Tagged<V> {
    Tagged::new(v.tag.min(1), v.var.clone())
}

pub fn rho_basis<V: Var>(i: usize, v: &Tagged<V>) -> Option<Tagged<V>> {
    match usize::from(v.tag) {
        0 => Some(v.clone()),
        t if t == i + 1 => Some(Tagged::new(1, v.var.clone())),
        _ => None,
    }
}

/// `T V = V ⊕ V`.
pub fn tangent_space(v: &FreeModule) -> Arc<FreeModule> {
    power(v, 2)
}

/// `T² V = (V ⊕ V) ⊕ (V ⊕ V)` with nested labels.
pub fn double_tangent_space(v: &FreeModule) -> Arc<FreeModule> {
    let t = tangent_space(v);
    biproduct(&[&t, &t]).expect("copies share a semiring")
}

/// `T_n V = ⊕_{i=0}^{n} V`.
pub fn fibre_power(v: &FreeModule, n: usize) -> Arc<FreeModule> {
    power(v, n + 1)
}

fn tagged_index(dim: usize, t: &Tagged<usize>) -> usize {
    usize::from(t.tag) * dim + t.var
}

fn untag(dim: usize, i: usize) -> Tagged<usize> {
    Tagged::new((i / dim) as u8, i % dim)
}

fn untag2(dim: usize, i: usize) -> Tagged<Tagged<usize>> {
    Tagged::new((i / (2 * dim)) as u8, untag(dim, i % (2 * dim)))
}

fn tagged2_index(dim: usize, t: &Tagged<Tagged<usize>>) -> usize {
    usize::from(t.tag) * 2 * dim + tagged_index(dim, &t.var)
}

pub fn bt_component(kind: TangentComponentKind, v: &Arc<FreeModule>) -> Result<LinearMap, ModuleError> {
    let n = v.dim();
    let one = v.semiring().one();
    let col = |target: Option<usize>| target.map(|i| vec![(i, one.clone())]).unwrap_or_default();
    let t = tangent_space(v);
    let tt = double_tangent_space(v);
    match kind {
        TangentComponentKind::Projection => LinearMap::from_columns(&t, v, |j| col(p_basis(&untag(n, j)))),
        TangentComponentKind::Zero => LinearMap::from_columns(v, &t, |j| col(Some(tagged_index(n, &z_basis(&j))))),
        TangentComponentKind::Lift => LinearMap::from_columns(&t, &tt, |j| col(Some(tagged2_index(n, &lift_basis(&untag(n, j)))))),
        TangentComponentKind::Flip => LinearMap::from_columns(&tt, &tt, |j| col(Some(tagged2_index(n, &flip_basis(&untag2(n, j)))))),
        TangentComponentKind::Sum => {
            let t2 = fibre_power(v, 2);
            LinearMap::from_columns(&t2, &t, |j| col(Some(tagged_index(n, &sum_basis(&untag(n, j))))))
        }
        TangentComponentKind::Rho { n: k, i } => {
            if k == 0 || i >= k {
                return Err(ModuleError::Index { index: i, len: k });
            }
            let tk = fibre_power(v, k);
            LinearMap::from_columns(&tk, &t, |j| col(rho_basis(i, &untag(n, j)).map(|x| tagged_index(n, &x))))
        }
    }
}

/// `T_n(f)`: `n + 1` diagonal copies of `f`.
pub fn bt_functor(f: &LinearMap, n: usize) -> Result<LinearMap, ModuleError> {
    if n == 0 {
        return Err(ModuleError::Shape("fibre power index must be at least 1".into()));
    }
    let blocks: Vec<&LinearMap> = std::iter::repeat_n(f, n + 1).collect();
    Ok(block_diagonal(&blocks, fibre_power(f.domain(), n), fibre_power(f.codomain(), n)))
}

/// Pair two maps into `T(TV)` that agree after `T(p)` into a map into
/// `T(T₂ V)`: each outer copy keeps the shared base block and the two
/// vertical blocks.
pub fn pair_over_tp(f: &LinearMap, g: &LinearMap, v: &Arc<FreeModule>) -> Result<LinearMap, ModuleError> {
    let n = v.dim();
    let tt = double_tangent_space(v);
    if f.domain() != g.domain() || **f.codomain() != *tt || **g.codomain() != *tt {
        return Err(ModuleError::Shape("pairing expects two maps into T²V with one domain".into()));
    }
    let t2 = fibre_power(v, 2);
    let target = biproduct(&[&t2, &t2])?;
    let sr = v.semiring();
    let mut m = vec![vec![sr.zero(); f.domain().dim()]; target.dim()];
    for u in 0..2usize {
        for i in 0..n {
            let base = tagged2_index(n, &Tagged::new(u as u8, Tagged::new(0, i)));
            let vert = tagged2_index(n, &Tagged::new(u as u8, Tagged::new(1, i)));
            if f.matrix()[base] != g.matrix()[base] {
                return Err(ModuleError::Shape("maps disagree after T(p)".into()));
            }
            let row = |t: usize| u * 3 * n + t * n + i;
            m[row(0)] = f.matrix()[base].clone();
            m[row(1)] = f.matrix()[vert].clone();
            m[row(2)] = g.matrix()[vert].clone();
        }
    }
    LinearMap::new(f.domain(), &target, m)
}

/// `⟨ρ₀ z_{TV}, ρ₁ ℓ_V⟩ T(σ_V) : T₂ V → T² V`.
pub fn vertical_lift(v: &Arc<FreeModule>) -> Result<LinearMap, ModuleError> {
    use crate::module::{combine_maps, MapOp};
    use TangentComponentKind::*;
    let t = tangent_space(v);
    let rho0 = bt_component(Rho { n: 2, i: 0 }, v)?;
    let rho1 = bt_component(Rho { n: 2, i: 1 }, v)?;
    let z_t = bt_component(Zero, &t)?;
    let first = combine_maps(MapOp::Compose, &rho0, &z_t)?;
    let second = combine_maps(MapOp::Compose, &rho1, &bt_component(Lift, v)?)?;
    let paired = pair_over_tp(&first, &second, v)?;
    let t_sigma = bt_functor(&bt_component(Sum, v)?, 1)?;
    combine_maps(MapOp::Compose, &paired, &t_sigma)
}
