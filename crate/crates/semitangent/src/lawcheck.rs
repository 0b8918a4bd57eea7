//! Exhaustive law checking on monomial bases.
//!
//! Every law is an equality of linear maps, so it is checked on each
//! enumerated basis element within the configured bounds, then on seeded
//! random linear combinations. Laws between matrices or finite-rank algebras
//! are checked on a fixed list of test spaces and algebras instead.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::em::{
    em_component, equalizes, fibre_power_algebra, fibre_structure_map, induced_monoid, lambda_via, lift_tangent, vertical_lift_factor,
    vertical_lift_morphism, weil_extend, EmComponent, EmError, LinearMorphism, SAlgebra, StructureAlgebra, WeilKind,
};
use crate::module::{combine_maps, structural_map, FreeModule, LinearMap, MapOp, StructuralKind};
use crate::poly::{monomials, tensor, Comb, Mono, Poly, Tagged, Var};
use crate::render::{comb_text, mono_text, poly_text, tagged_name, token_name, var_name};
use crate::semiring::{Scalar, Semiring};
use crate::sym::{coderive, derive, derive_with, eta, mu, nabla, seely_merge_generic, seely_split_generic, substitute, sym_rename};
use crate::tangent::{
    bt_component, bt_functor, fibre_power, flip_basis, lift_basis, p_basis, rho_basis, sum_basis, tangent_space, vertical_lift, z_basis,
    TangentComponentKind,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LawError {
    #[error("unknown law `{0}`")]
    UnknownLaw(String),
    #[error("no law matches `{0}`")]
    NoMatch(String),
    #[error("bad suite pattern: {0}")]
    Pattern(String),
    #[error("invalid generator config: {0}")]
    Config(String),
    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorConfig {
    pub semiring: Semiring,
    pub n_vars: usize,
    pub max_degree: u32,
    /// 1 disables the laws that need nested polynomials.
    pub nesting: u8,
    pub samples: usize,
    pub seed: u64,
}

impl GeneratorConfig {
    pub fn new(semiring: Semiring) -> Self {
        GeneratorConfig {
            semiring,
            n_vars: 3,
            max_degree: 4,
            nesting: 2,
            samples: 16,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), LawError> {
        if !(1..=3).contains(&self.n_vars) {
            return Err(LawError::Config(format!("n_vars must be in 1..=3, got {}", self.n_vars)));
        }
        if !(1..=6).contains(&self.max_degree) {
            return Err(LawError::Config(format!("max_degree must be in 1..=6, got {}", self.max_degree)));
        }
        if !(1..=2).contains(&self.nesting) {
            return Err(LawError::Config(format!("nesting must be 1 or 2, got {}", self.nesting)));
        }
        if self.samples > 10_000 {
            return Err(LawError::Config("at most 10000 random samples".into()));
        }
        Ok(())
    }

    fn params(&self) -> Params {
        Params {
            n_vars: self.n_vars,
            max_degree: self.max_degree,
            nesting: self.nesting,
            samples: self.samples,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    pub n_vars: usize,
    pub max_degree: u32,
    pub nesting: u8,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub input: String,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawReport {
    pub suite: String,
    pub law: String,
    pub semiring: String,
    pub params: Params,
    pub status: Status,
    pub checked: usize,
    pub counterexample: Option<Counterexample>,
}

impl LawReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn text_line(&self) -> String {
        let head = format!("{} [{}] over {}", self.law, self.suite, self.semiring);
        match (&self.status, &self.counterexample) {
            (Status::Pass, _) => format!("PASS {head}: {} cases", self.checked),
            (Status::Skipped, _) => format!("SKIP {head}"),
            (Status::Fail, Some(c)) => {
                format!(
                    "FAIL {head} after {} cases: input {}; lhs {}; rhs {}",
                    self.checked, c.input, c.lhs, c.rhs
                )
            }
            (Status::Fail, None) => format!("FAIL {head}"),
        }
    }
}

pub fn reports_json(reports: &[LawReport]) -> String {
    let mut s = serde_json::to_string_pretty(reports).expect("reports serialize");
    s.push('\n');
    s
}

/// Deliberate bugs used to confirm that the suites can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    None,
    /// `∂(xⁿ) = xⁿ⁻¹`, forgetting the factor `n`.
    DropDerivativeCoefficient,
    /// In the first Leibniz summand, differentiate the second factor.
    SwapTau,
    /// Leibniz rule with only its first summand.
    MissingLeibnizSummand,
    /// `λ` without its derivative summand.
    MissingLambdaSummand,
}

enum Outcome {
    Ran {
        checked: usize,
        counterexample: Option<Counterexample>,
    },
    Skipped,
}

impl Outcome {
    fn and(self, next: impl FnOnce() -> Outcome) -> Outcome {
        match self {
            Outcome::Ran {
                checked,
                counterexample: None,
            } => match next() {
                Outcome::Ran {
                    checked: more,
                    counterexample,
                } => Outcome::Ran {
                    checked: checked + more,
                    counterexample,
                },
                Outcome::Skipped => Outcome::Ran {
                    checked,
                    counterexample: None,
                },
            },
            other => other,
        }
    }
}

fn run_cases<I: Sync>(inputs: &[I], case: impl Fn(&I) -> Option<Counterexample> + Sync) -> Outcome {
    match inputs.par_iter().enumerate().find_map_first(|(i, x)| case(x).map(|c| (i, c))) {
        Some((i, c)) => Outcome::Ran {
            checked: i + 1,
            counterexample: Some(c),
        },
        None => Outcome::Ran {
            checked: inputs.len(),
            counterexample: None,
        },
    }
}

fn cx(input: impl Into<String>, lhs: impl Into<String>, rhs: impl Into<String>) -> Counterexample {
    Counterexample {
        input: input.into(),
        lhs: lhs.into(),
        rhs: rhs.into(),
    }
}

type Tv = Tagged<usize>;
type Tuple = Comb<(u8, Mono<usize>)>;

fn nm(v: &usize) -> String {
    var_name(*v)
}

fn tnm(v: &Tv) -> String {
    tagged_name(v, &nm)
}

fn ttnm(v: &Tagged<Tv>) -> String {
    tagged_name(v, &tnm)
}

fn show_poly(p: &Poly<usize>) -> String {
    poly_text(p, nm)
}

fn show_mv(c: &Comb<(Mono<usize>, usize)>) -> String {
    comb_text(c, |(m, x)| format!("{} ⊗ {}", mono_text(m, &nm), nm(x)))
}

fn show_mvv(c: &Comb<(Mono<usize>, usize, usize)>) -> String {
    comb_text(c, |(m, x, y)| format!("{} ⊗ {} ⊗ {}", mono_text(m, &nm), nm(x), nm(y)))
}

fn show_mm<V: Var>(c: &Comb<(Mono<V>, Mono<V>)>, name: impl Fn(&V) -> String) -> String {
    comb_text(c, |(a, b)| format!("{} ⊗ {}", mono_text(a, &name), mono_text(b, &name)))
}

fn tuple(parts: &[Poly<usize>]) -> Tuple {
    let sr = parts[0].semiring();
    let mut out = Comb::zero(sr);
    for (k, p) in parts.iter().enumerate() {
        for (m, c) in p.iter() {
            out.add_term((k as u8, m.clone()), c.clone());
        }
    }
    out
}

fn show_tuple(arity: u8) -> impl Fn(&Tuple) -> String + Sync {
    move |t| {
        let parts: Vec<String> = (0..arity)
            .map(|k| show_poly(&t.map_keys(|(j, m)| (*j == k).then(|| m.clone()))))
            .collect();
        format!("({})", parts.join(", "))
    }
}

fn show_matrix(sr: Semiring, m: &[Vec<Scalar>]) -> String {
    let rows: Vec<String> = m
        .iter()
        .map(|r| format!("[{}]", r.iter().map(|c| sr.format_scalar(c)).collect::<Vec<_>>().join(",")))
        .collect();
    format!("[{}]", rows.join(","))
}

fn show_algebra(a: &StructureAlgebra) -> String {
    let sr = a.semiring();
    let unit: Vec<String> = a.unit().iter().map(|c| sr.format_scalar(c)).collect();
    let table: Vec<String> = a
        .table()
        .iter()
        .map(|row| {
            row.iter()
                .map(|v| show_matrix(sr, std::slice::from_ref(v)))
                .collect::<Vec<_>>()
                .join("")
        })
        .collect();
    format!("unit [{}] table {}", unit.join(","), table.join(" "))
}

/// `n`-ary sum of blocks: codomain block `b` is the sum of the domain blocks
/// listed in `assign[b]`.
fn block_matrix(sr: Semiring, r: usize, from: usize, assign: &[&[usize]]) -> Vec<Vec<Scalar>> {
    let mut m = vec![vec![sr.zero(); from * r]; assign.len() * r];
    for (b, sources) in assign.iter().enumerate() {
        for &s in *sources {
            for i in 0..r {
                m[b * r + i][s * r + i] = sr.one();
            }
        }
    }
    m
}

fn test_algebras(sr: Semiring, max_rank: usize) -> Vec<(&'static str, StructureAlgebra)> {
    vec![
        ("K", StructureAlgebra::unit_algebra(sr)),
        ("K[t]/t^2", StructureAlgebra::truncated(sr, 2)),
        ("K^2", StructureAlgebra::product(sr, 2)),
        ("K[t]/t^3", StructureAlgebra::truncated(sr, 3)),
    ]
    .into_iter()
    .filter(|(_, a)| a.rank() <= max_rank)
    .collect()
}

struct Ctx {
    cfg: GeneratorConfig,
    sr: Semiring,
    mutation: Mutation,
    stream: u64,
}

impl Ctx {
    fn d<V: Var>(&self, p: &Poly<V>) -> Comb<(Mono<V>, V)> {
        match self.mutation {
            Mutation::DropDerivativeCoefficient => derive_with(p, |_, _, c| c.clone()),
            _ => derive(p),
        }
    }

    fn lambda<V: Var>(&self, p: &Poly<Tagged<V>>) -> (Poly<V>, Poly<V>) {
        let (a, b) = lambda_via(p, |q| self.d(q));
        match self.mutation {
            Mutation::MissingLambdaSummand => (a, Poly::zero(self.sr)),
            _ => (a, b),
        }
    }

    /// `λ` followed by `T(λ)` on `S(T²V)`.
    fn lambda_twice(&self, q: &Poly<Tagged<Tv>>) -> [Poly<usize>; 4] {
        let (a, b) = self.lambda(q);
        let (a0, a1) = self.lambda(&a);
        let (b0, b1) = self.lambda(&b);
        [a0, a1, b0, b1]
    }

    /// Structure map of `T̄ⁿA`, computed as `λ` followed by the structure
    /// maps of the two copies.
    fn nu_lifted(&self, a: &StructureAlgebra, levels: u32, p: &Poly<usize>) -> Vec<Scalar> {
        if levels == 0 {
            return a.evaluate(p);
        }
        let r = a.rank() << (levels - 1);
        let tagged = sym_rename(p, |&i| Some(Tagged::new((i / r) as u8, i % r)));
        let (x, y) = self.lambda(&tagged);
        let mut out = self.nu_lifted(a, levels - 1, &x);
        out.extend(self.nu_lifted(a, levels - 1, &y));
        out
    }

    fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        rng.set_stream(self.stream);
        rng
    }

    fn pool(&self) -> Vec<Scalar> {
        self.sr.elements().unwrap_or_else(|| self.sr.window())
    }

    fn random_combos<K: Ord + Clone>(&self, keys: &[K]) -> Vec<Comb<K>> {
        let mut rng = self.rng();
        let pool = self.pool();
        (0..self.cfg.samples)
            .map(|_| {
                let terms = rng.gen_range(1..=6);
                Comb::from_terms(
                    self.sr,
                    (0..terms).map(|_| {
                        (
                            keys[rng.gen_range(0..keys.len())].clone(),
                            pool[rng.gen_range(0..pool.len())].clone(),
                        )
                    }),
                )
            })
            .collect()
    }

    fn random_maps(&self, n: usize, count: usize) -> Vec<Vec<Vec<Scalar>>> {
        let mut rng = self.rng();
        let pool = self.pool();
        (0..count)
            .map(|_| {
                (0..n)
                    .map(|_| (0..n).map(|_| pool[rng.gen_range(0..pool.len())].clone()).collect())
                    .collect()
            })
            .collect()
    }

    fn vars(&self) -> Vec<usize> {
        (0..self.cfg.n_vars).collect()
    }

    fn copy_vars(&self, copies: u8) -> Vec<Tv> {
        let per = self.cfg.n_vars.min(2);
        (0..copies).flat_map(|t| (0..per).map(move |v| Tagged::new(t, v))).collect()
    }

    fn nested_bound(&self) -> u32 {
        self.cfg.max_degree.min(2)
    }

    fn monos(&self) -> Vec<Mono<usize>> {
        monomials(&self.vars(), self.cfg.max_degree)
    }

    fn basis<K: Ord + Clone>(&self, k: &K) -> Comb<K> {
        Comb::basis(self.sr, k.clone())
    }

    #[allow(clippy::too_many_arguments)]
    fn linear<K, O>(
        &self,
        keys: Vec<K>,
        random: bool,
        lhs: impl Fn(&K) -> Comb<O> + Sync,
        rhs: impl Fn(&K) -> Comb<O> + Sync,
        show_in: impl Fn(&Comb<K>) -> String + Sync,
        show_out: impl Fn(&Comb<O>) -> String + Sync,
    ) -> Outcome
    where
        K: Ord + Clone + Send + Sync,
        O: Ord + Clone + Send + Sync,
    {
        let mut inputs: Vec<Comb<K>> = keys.iter().map(|k| self.basis(k)).collect();
        if random && !keys.is_empty() {
            inputs.extend(self.random_combos(&keys));
        }
        run_cases(&inputs, |x| {
            let l = x.map_linear(&lhs);
            let r = x.map_linear(&rhs);
            (l != r).then(|| cx(show_in(x), show_out(&l), show_out(&r)))
        })
    }

    fn nested_keys<V: Var>(&self, vars: &[V]) -> Vec<Mono<Mono<V>>> {
        let b = self.nested_bound();
        monomials(&monomials(vars, b), b)
    }
}

fn bounded_pairs<V: Var>(monos: &[Mono<V>], max: u64) -> Vec<(Mono<V>, Mono<V>)> {
    let mut out = Vec::new();
    for a in monos {
        for b in monos {
            if a.degree() + b.degree() <= max {
                out.push((a.clone(), b.clone()));
            }
        }
    }
    out
}

fn show_mono_key(c: &Comb<Mono<usize>>) -> String {
    show_poly(c)
}

// Codifferential axioms.

fn cd1(ctx: &Ctx) -> Outcome {
    let sr = ctx.sr;
    ctx.linear(
        vec![()],
        false,
        |_| ctx.d(&Poly::<usize>::one(sr)),
        |_| Comb::zero(sr),
        |_| "1".into(),
        show_mv,
    )
}

fn cd2(ctx: &Ctx) -> Outcome {
    let sr = ctx.sr;
    let keys = bounded_pairs(&ctx.monos(), u64::from(ctx.cfg.max_degree));
    ctx.linear(
        keys,
        true,
        |(a, b)| ctx.d(&Poly::basis(sr, a.mul(b))),
        |(a, b)| {
            let (pa, pb) = (Poly::basis(sr, a.clone()), Poly::basis(sr, b.clone()));
            let first = match ctx.mutation {
                Mutation::SwapTau => tensor(&ctx.d(&pb), &pa),
                _ => tensor(&ctx.d(&pa), &pb),
            }
            .map_keys(|((a2, x), b2)| Some((a2.clone(), b2.clone(), *x)))
            .map_keys(|(a2, b2, x)| Some((a2.mul(b2), *x)));
            let second = match ctx.mutation {
                Mutation::MissingLeibnizSummand => Comb::zero(sr),
                _ => tensor(&pa, &ctx.d(&pb)).map_keys(|(a2, (b2, x))| Some((a2.mul(b2), *x))),
            };
            first.add(&second)
        },
        |x| show_mm(x, nm),
        show_mv,
    )
}

fn cd3(ctx: &Ctx) -> Outcome {
    let sr = ctx.sr;
    ctx.linear(
        ctx.vars(),
        false,
        |&x| ctx.d(&Poly::var(sr, x)),
        |&x| Comb::basis(sr, (Mono::one(), x)),
        |x| comb_text(x, nm),
        show_mv,
    )
}

fn cd4(ctx: &Ctx) -> Outcome {
    if ctx.cfg.nesting < 2 {
        return Outcome::Skipped;
    }
    let sr = ctx.sr;
    ctx.linear(
        ctx.nested_keys(&ctx.vars()),
        true,
        |p| ctx.d(&mu(&ctx.basis(p))),
        |p| {
            ctx.d(&ctx.basis(p)).map_linear(|(outer, m)| {
                tensor(&mu(&Poly::basis(sr, outer.clone())), &ctx.d(&Poly::basis(sr, m.clone())))
                    .map_keys(|(a, (m2, x))| Some((a.mul(m2), *x)))
            })
        },
        |x| poly_text(x, |t| token_name(t, &nm)),
        show_mv,
    )
}

fn second_derivative(ctx: &Ctx, p: &Poly<usize>) -> Comb<(Mono<usize>, usize, usize)> {
    let sr = ctx.sr;
    ctx.d(p)
        .map_linear(|(a, x)| ctx.d(&Poly::basis(sr, a.clone())).map_keys(|(a2, y)| Some((a2.clone(), *y, *x))))
}

fn cd5(ctx: &Ctx) -> Outcome {
    ctx.linear(
        ctx.monos(),
        true,
        |m| second_derivative(ctx, &ctx.basis(m)),
        |m| second_derivative(ctx, &ctx.basis(m)).map_keys(|(a, y, x)| Some((a.clone(), *x, *y))),
        show_mono_key,
        show_mvv,
    )
}

// Coderiving identities.

fn coderive_unit(ctx: &Ctx) -> Outcome {
    let sr = ctx.sr;
    ctx.linear(
        ctx.vars(),
        false,
        |&x| coderive(&Comb::basis(sr, (Mono::one(), x))),
        |&x| eta(&Comb::basis(sr, x)),
        |x| comb_text(x, nm),
        show_poly,
    )
}

fn coderive_nabla(ctx: &Ctx) -> Outcome {
    let sr = ctx.sr;
    let max = u64::from(ctx.cfg.max_degree);
    let mut keys = Vec::new();
    for (a, b) in bounded_pairs(&ctx.monos(), max.saturating_sub(1)) {
        for x in ctx.vars() {
            keys.push((a.clone(), b.clone(), x));
        }
    }
    ctx.linear(
        keys,
        true,
        |(a, b, x)| coderive(&Comb::basis(sr, (a.mul(b), *x))),
        |(a, b, x)| nabla(&Poly::basis(sr, a.clone()), &coderive(&Comb::basis(sr, (b.clone(), *x)))),
        |t| comb_text(t, |(a, b, x)| format!("{} ⊗ {} ⊗ {}", mono_text(a, &nm), mono_text(b, &nm), nm(x))),
        show_poly,
    )
}

fn coderive_d(ctx: &Ctx) -> Outcome {
    let sr = ctx.sr;
    let max = u64::from(ctx.cfg.max_degree);
    let keys: Vec<(Mono<usize>, usize)> = ctx
        .monos()
        .into_iter()
        .filter(|m| m.degree() < max)
        .flat_map(|m| ctx.vars().into_iter().map(move |x| (m.clone(), x)))
        .collect();
    ctx.linear(
        keys,
        true,
        |k| ctx.d(&coderive(&ctx.basis(k))),
        |(a, x)| {
            let swapped = ctx
                .d(&Poly::basis(sr, a.clone()))
                .map_keys(|(a2, y)| Some((a2.clone(), *y, *x)))
                .map_keys(|(a2, y, x)| Some((a2.clone(), *x, *y)));
            let through = swapped.map_keys(|(a2, x, y)| Some((a2.mul(&Mono::var(*x)), *y)));
            Comb::basis(sr, (a.clone(), *x)).add(&through)
        },
        show_mv,
        show_mv,
    )
}

// Distributive law and tangent-monad identities.

fn lambda_mu(ctx: &Ctx) -> Outcome {
    if ctx.cfg.nesting < 2 {
        return Outcome::Skipped;
    }
    let sr = ctx.sr;
    ctx.linear(
        ctx.nested_keys(&ctx.copy_vars(2)),
        true,
        |p| {
            let s_lambda: Poly<Tagged<Mono<usize>>> = substitute(&ctx.basis(p), |m| {
                let (a, b) = ctx.lambda(&Poly::basis(sr, m.clone()));
                a.map_keys(|k| Some(Tagged::new(0, k.clone())))
                    .add(&b.map_keys(|k| Some(Tagged::new(1, k.clone()))))
            });
            let (a, b) = ctx.lambda(&s_lambda);
            tuple(&[mu(&a), mu(&b)])
        },
        |p| {
            let (a, b) = ctx.lambda(&mu(&ctx.basis(p)));
            tuple(&[a, b])
        },
        |x| poly_text(x, |t| token_name(t, &tnm)),
        show_tuple(2),
    )
}

fn lambda_eta(ctx: &Ctx) -> Outcome {
    let sr = ctx.sr;
    ctx.linear(
        ctx.copy_vars(2),
        false,
        |v| {
            let (a, b) = ctx.lambda(&Poly::var(sr, v.clone()));
            tuple(&[a, b])
        },
        |v| Comb::basis(sr, (v.tag, Mono::var(v.var))),
        |x| comb_text(x, tnm),
        show_tuple(2),
    )
}

fn lambda_p(ctx: &Ctx) -> Outcome {
    ctx.linear(
        monomials(&ctx.copy_vars(2), ctx.cfg.max_degree),
        true,
        |m| ctx.lambda(&ctx.basis(m)).0,
        |m| sym_rename(&ctx.basis(m), p_basis),
        |x| poly_text(x, tnm),
        show_poly,
    )
}

fn lambda_sigma(ctx: &Ctx) -> Outcome {
    ctx.linear(
        monomials(&ctx.copy_vars(3), ctx.cfg.max_degree),
        true,
        |m| {
            let (a, b) = ctx.lambda(&sym_rename(&ctx.basis(m), |v| Some(sum_basis(v))));
            tuple(&[a, b])
        },
        |m| {
            let q = ctx.basis(m);
            let (a0, a1) = ctx.lambda(&sym_rename(&q, |v| rho_basis(0, v)));
            let (_, b1) = ctx.lambda(&sym_rename(&q, |v| rho_basis(1, v)));
            tuple(&[a0, a1.add(&b1)])
        },
        |x| poly_text(x, tnm),
        show_tuple(2),
    )
}

fn lambda_z(ctx: &Ctx) -> Outcome {
    let sr = ctx.sr;
    ctx.linear(
        ctx.monos(),
        true,
        |m| {
            let (a, b) = ctx.lambda(&sym_rename(&ctx.basis(m), |v| Some(z_basis(v))));
            tuple(&[a, b])
        },
        |m| tuple(&[ctx.basis(m), Poly::zero(sr)]),
        show_mono_key,
        show_tuple(2),
    )
}

fn lambda_ell(ctx: &Ctx) -> Outcome {
    let sr = ctx.sr;
    ctx.linear(
        monomials(&ctx.copy_vars(2), ctx.cfg.max_degree),
        true,
        |m| tuple(&ctx.lambda_twice(&sym_rename(&ctx.basis(m), |v| Some(lift_basis(v))))),
        |m| {
            let (c0, c1) = ctx.lambda(&ctx.basis(m));
            tuple(&[c0, Poly::zero(sr), Poly::zero(sr), c1])
        },
        |x| poly_text(x, tnm),
        show_tuple(4),
    )
}

fn lambda_c(ctx: &Ctx) -> Outcome {
    let per = ctx.cfg.n_vars.min(2);
    let vars: Vec<Tagged<Tv>> = (0..2u8)
        .flat_map(|o| (0..2u8).flat_map(move |i| (0..per).map(move |v| Tagged::new(o, Tagged::new(i, v)))))
        .collect();
    ctx.linear(
        monomials(&vars, ctx.cfg.max_degree),
        true,
        |m| {
            let [a0, a1, b0, b1] = ctx.lambda_twice(&ctx.basis(m));
            tuple(&[a0, b0, a1, b1])
        },
        |m| tuple(&ctx.lambda_twice(&sym_rename(&ctx.basis(m), |v| Some(flip_basis(v))))),
        |x| poly_text(x, ttnm),
        show_tuple(4),
    )
}

// Monad and monoid laws.

fn monad_left_unit(ctx: &Ctx) -> Outcome {
    let sr = ctx.sr;
    ctx.linear(
        ctx.monos(),
        true,
        |m| mu(&Poly::var(sr, m.clone())),
        |m| ctx.basis(m),
        show_mono_key,
        show_poly,
    )
}

fn monad_right_unit(ctx: &Ctx) -> Outcome {
    let sr = ctx.sr;
    ctx.linear(
        ctx.monos(),
        true,
        |m| mu(&substitute(&ctx.basis(m), |v| Comb::basis(sr, Mono::var(*v)))),
        |m| ctx.basis(m),
        show_mono_key,
        show_poly,
    )
}

fn monad_assoc(ctx: &Ctx) -> Outcome {
    if ctx.cfg.nesting < 2 {
        return Outcome::Skipped;
    }
    let sr = ctx.sr;
    let vars: Vec<usize> = (0..ctx.cfg.n_vars.min(2)).collect();
    let b = ctx.nested_bound();
    let keys = monomials(&ctx.nested_keys(&vars), b);
    ctx.linear(
        keys,
        true,
        |p| mu(&substitute(&ctx.basis(p), |m| mu(&Poly::basis(sr, m.clone())))),
        |p| mu(&mu(&ctx.basis(p))),
        |x| poly_text(x, |t| token_name(t, &|u: &Mono<usize>| token_name(u, &nm))),
        show_poly,
    )
}

fn monoid_assoc(ctx: &Ctx) -> Outcome {
    let sr = ctx.sr;
    let max = u64::from(ctx.cfg.max_degree);
    let monos = ctx.monos();
    let mut keys = Vec::new();
    for (a, b) in bounded_pairs(&monos, max) {
        for c in &monos {
            if a.degree() + b.degree() + c.degree() <= max {
                keys.push((a.clone(), b.clone(), c.clone()));
            }
        }
    }
    let p = |m: &Mono<usize>| Poly::basis(sr, m.clone());
    ctx.linear(
        keys,
        true,
        |(a, b, c)| nabla(&nabla(&p(a), &p(b)), &p(c)),
        |(a, b, c)| nabla(&p(a), &nabla(&p(b), &p(c))),
        |x| {
            comb_text(x, |(a, b, c)| {
                format!("{} ⊗ {} ⊗ {}", mono_text(a, &nm), mono_text(b, &nm), mono_text(c, &nm))
            })
        },
        show_poly,
    )
}

fn monoid_comm(ctx: &Ctx) -> Outcome {
    let sr = ctx.sr;
    let p = |m: &Mono<usize>| Poly::basis(sr, m.clone());
    ctx.linear(
        bounded_pairs(&ctx.monos(), u64::from(ctx.cfg.max_degree)),
        true,
        |(a, b)| nabla(&p(a), &p(b)),
        |(a, b)| nabla(&p(b), &p(a)),
        |x| show_mm(x, nm),
        show_poly,
    )
}

fn monoid_unit(ctx: &Ctx) -> Outcome {
    let sr = ctx.sr;
    ctx.linear(
        ctx.monos(),
        true,
        |m| nabla(&ctx.basis(m), &crate::sym::unit(sr)),
        |m| ctx.basis(m),
        show_mono_key,
        show_poly,
    )
    .and(|| {
        ctx.linear(
            ctx.monos(),
            false,
            |m| nabla(&crate::sym::unit(sr), &ctx.basis(m)),
            |m| ctx.basis(m),
            show_mono_key,
            show_poly,
        )
    })
}

fn monoid_mu_morphism(ctx: &Ctx) -> Outcome {
    if ctx.cfg.nesting < 2 {
        return Outcome::Skipped;
    }
    let sr = ctx.sr;
    let b = ctx.nested_bound();
    let tokens = monomials(&ctx.vars(), b);
    let outer = monomials(&tokens, b);
    let p = |m: &Mono<Mono<usize>>| Poly::basis(sr, m.clone());
    ctx.linear(
        bounded_pairs(&outer, u64::from(b)),
        true,
        |(x, y)| mu(&nabla(&p(x), &p(y))),
        |(x, y)| nabla(&mu(&p(x)), &mu(&p(y))),
        |x| show_mm(x, |t| token_name(t, &nm)),
        show_poly,
    )
    .and(|| {
        ctx.linear(
            vec![()],
            false,
            |_| mu(&Poly::<Mono<usize>>::one(sr)),
            |_| Poly::one(sr),
            |_| "1".into(),
            show_poly,
        )
    })
}

// Naturality against random linear maps.

const NATURALITY_MAPS: usize = 3;

fn image(sr: Semiring, f: &[Vec<Scalar>], j: usize) -> Comb<usize> {
    Comb::from_terms(sr, f.iter().enumerate().map(|(i, row)| (i, row[j].clone())))
}

fn s_of(sr: Semiring, f: &[Vec<Scalar>], p: &Poly<usize>) -> Poly<usize> {
    substitute(p, |&j| image(sr, f, j))
}

fn with_maps<K: Clone>(keys: Vec<K>) -> Vec<(usize, K)> {
    (0..NATURALITY_MAPS)
        .flat_map(|k| keys.iter().cloned().map(move |x| (k, x)))
        .collect()
}

fn natural_eta(ctx: &Ctx) -> Outcome {
    let sr = ctx.sr;
    let maps = ctx.random_maps(ctx.cfg.n_vars, NATURALITY_MAPS);
    ctx.linear(
        with_maps(ctx.vars()),
        false,
        |(k, x)| eta(&image(sr, &maps[*k], *x)),
        |(k, x)| s_of(sr, &maps[*k], &Poly::var(sr, *x)),
        |x| comb_text(x, |(k, v)| format!("f{k}: {}", nm(v))),
        show_poly,
    )
}

fn natural_mu(ctx: &Ctx) -> Outcome {
    if ctx.cfg.nesting < 2 {
        return Outcome::Skipped;
    }
    let sr = ctx.sr;
    let maps = ctx.random_maps(ctx.cfg.n_vars, NATURALITY_MAPS);
    ctx.linear(
        with_maps(ctx.nested_keys(&ctx.vars())),
        false,
        |(k, p)| s_of(sr, &maps[*k], &mu(&Poly::basis(sr, p.clone()))),
        |(k, p)| {
            mu(&substitute(&Poly::basis(sr, p.clone()), |m| {
                s_of(sr, &maps[*k], &Poly::basis(sr, m.clone()))
            }))
        },
        |x| comb_text(x, |(k, p)| format!("f{k}: {}", mono_text(p, &|t: &Mono<usize>| token_name(t, &nm)))),
        show_poly,
    )
}

fn natural_nabla(ctx: &Ctx) -> Outcome {
    let sr = ctx.sr;
    let maps = ctx.random_maps(ctx.cfg.n_vars, NATURALITY_MAPS);
    let f = |k: usize, m: &Mono<usize>| s_of(sr, &maps[k], &Poly::basis(sr, m.clone()));
    ctx.linear(
        with_maps(bounded_pairs(&ctx.monos(), u64::from(ctx.cfg.max_degree))),
        false,
        |(k, (a, b))| s_of(sr, &maps[*k], &nabla(&Poly::basis(sr, a.clone()), &Poly::basis(sr, b.clone()))),
        |(k, (a, b))| nabla(&f(*k, a), &f(*k, b)),
        |x| comb_text(x, |(k, (a, b))| format!("f{k}: {} ⊗ {}", mono_text(a, &nm), mono_text(b, &nm))),
        show_poly,
    )
}

fn natural_unit(ctx: &Ctx) -> Outcome {
    let sr = ctx.sr;
    let maps = ctx.random_maps(ctx.cfg.n_vars, NATURALITY_MAPS);
    ctx.linear(
        (0..NATURALITY_MAPS).collect(),
        false,
        |&k| s_of(sr, &maps[k], &crate::sym::unit(sr)),
        |_| crate::sym::unit(sr),
        |x| comb_text(x, |k| format!("f{k}: 1")),
        show_poly,
    )
}

fn natural_d(ctx: &Ctx) -> Outcome {
    let sr = ctx.sr;
    let maps = ctx.random_maps(ctx.cfg.n_vars, NATURALITY_MAPS);
    ctx.linear(
        with_maps(ctx.monos()),
        false,
        |(k, m)| {
            ctx.d(&Poly::basis(sr, m.clone()))
                .map_linear(|(a, x)| tensor(&s_of(sr, &maps[*k], &Poly::basis(sr, a.clone())), &image(sr, &maps[*k], *x)))
        },
        |(k, m)| ctx.d(&s_of(sr, &maps[*k], &Poly::basis(sr, m.clone()))),
        |x| comb_text(x, |(k, m)| format!("f{k}: {}", mono_text(m, &nm))),
        show_mv,
    )
}

fn natural_coderive(ctx: &Ctx) -> Outcome {
    let sr = ctx.sr;
    let maps = ctx.random_maps(ctx.cfg.n_vars, NATURALITY_MAPS);
    let keys: Vec<(Mono<usize>, usize)> = ctx
        .monos()
        .into_iter()
        .flat_map(|m| ctx.vars().into_iter().map(move |x| (m.clone(), x)))
        .collect();
    ctx.linear(
        with_maps(keys),
        false,
        |(k, (a, x))| s_of(sr, &maps[*k], &coderive(&Comb::basis(sr, (a.clone(), *x)))),
        |(k, (a, x))| {
            coderive(&tensor(
                &s_of(sr, &maps[*k], &Poly::basis(sr, a.clone())),
                &image(sr, &maps[*k], *x),
            ))
        },
        |x| comb_text(x, |(k, (a, v))| format!("f{k}: {} ⊗ {}", mono_text(a, &nm), nm(v))),
        show_poly,
    )
}

// Seely isomorphism.

fn split(p: &Poly<Tv>) -> Comb<(Mono<usize>, Mono<usize>)> {
    seely_split_generic(p).expect("two copies")
}

fn seely_roundtrip(ctx: &Ctx) -> Outcome {
    let sr = ctx.sr;
    let per: Vec<usize> = (0..ctx.cfg.n_vars.min(2)).collect();
    let halves = monomials(&per, ctx.cfg.max_degree);
    ctx.linear(
        monomials(&ctx.copy_vars(2), ctx.cfg.max_degree),
        true,
        |m| seely_merge_generic(&split(&ctx.basis(m))),
        |m| ctx.basis(m),
        |x| poly_text(x, tnm),
        |x| poly_text(x, tnm),
    )
    .and(|| {
        ctx.linear(
            bounded_pairs(&halves, u64::from(ctx.cfg.max_degree)),
            true,
            |k| split(&seely_merge_generic(&Comb::basis(sr, k.clone()))),
            |k| Comb::basis(sr, k.clone()),
            |x| show_mm(x, nm),
            |x| show_mm(x, nm),
        )
    })
}

fn seely_multiplicative(ctx: &Ctx) -> Outcome {
    let sr = ctx.sr;
    let monos = monomials(&ctx.copy_vars(2), ctx.cfg.max_degree);
    ctx.linear(
        bounded_pairs(&monos, u64::from(ctx.cfg.max_degree)),
        true,
        |(a, b)| split(&Poly::basis(sr, a.mul(b))),
        |(a, b)| {
            let (sa, sb) = (split(&Poly::basis(sr, a.clone())), split(&Poly::basis(sr, b.clone())));
            tensor(&sa, &sb).map_keys(|((a1, a2), (b1, b2))| Some((a1.mul(b1), a2.mul(b2))))
        },
        |x| show_mm(x, tnm),
        |x| show_mm(x, nm),
    )
    .and(|| {
        ctx.linear(
            vec![()],
            false,
            |_| split(&Poly::one(sr)),
            |_| Comb::basis(sr, (Mono::one(), Mono::one())),
            |_| "1".into(),
            |x| show_mm(x, nm),
        )
    })
}

// The biproduct tangent structure.

fn space(sr: Semiring, n: usize) -> Arc<FreeModule> {
    FreeModule::new(sr, (0..n).map(var_name).collect()).expect("distinct names")
}

fn then(f: &LinearMap, g: &LinearMap) -> LinearMap {
    combine_maps(MapOp::Compose, f, g).expect("composable")
}

fn blocks(v: &Arc<FreeModule>, from: usize, assign: &[&[usize]]) -> LinearMap {
    let m = block_matrix(v.semiring(), v.dim(), from, assign);
    LinearMap::new(&fibre_power(v, from - 1), &fibre_power(v, assign.len() - 1), m).expect("block shapes")
}

fn tangent_identities(v: &Arc<FreeModule>, f: &LinearMap) -> Vec<(String, LinearMap, LinearMap)> {
    use TangentComponentKind::*;
    let c = |k| bt_component(k, v).expect("structural map");
    let t = tangent_space(v);
    let ct = |k| bt_component(k, &t).expect("structural map");
    let id = |a: &Arc<FreeModule>| structural_map(StructuralKind::Identity, std::slice::from_ref(a)).expect("identity");
    let tf = bt_functor(f, 1).expect("n ≥ 1");
    let ttf = bt_functor(&tf, 1).expect("n ≥ 1");
    let t2f = bt_functor(f, 2).expect("n ≥ 1");
    let (p, z, l, flip, sigma) = (c(Projection), c(Zero), c(Lift), c(Flip), c(Sum));
    let tp = bt_functor(&p, 1).expect("n ≥ 1");
    let mut out = vec![
        ("z;p = 1".to_string(), then(&z, &p), id(v)),
        ("c;c = 1".into(), then(&flip, &flip), id(flip.domain())),
        ("l;c = l".into(), then(&l, &flip), l.clone()),
        ("l;T(p) = p;z".into(), then(&l, &tp), then(&p, &z)),
        (
            "l;l_T = l;T(l)".into(),
            then(&l, &ct(Lift)),
            then(&l, &bt_functor(&l, 1).expect("n ≥ 1")),
        ),
        ("c;T(p) = p_T".into(), then(&flip, &tp), ct(Projection)),
        ("sigma unit".into(), then(&blocks(v, 2, &[&[0], &[1], &[]]), &sigma), id(&t)),
        (
            "sigma commutative".into(),
            then(&blocks(v, 3, &[&[0], &[2], &[1]]), &sigma),
            sigma.clone(),
        ),
        (
            "sigma associative".into(),
            then(&blocks(v, 4, &[&[0], &[1, 2], &[3]]), &sigma),
            then(&blocks(v, 4, &[&[0], &[1], &[2, 3]]), &sigma),
        ),
        ("natural p".into(), then(&tf, &p), then(&p, f)),
        ("natural z".into(), then(f, &z), then(&z, &tf)),
        ("natural l".into(), then(&tf, &l), then(&l, &ttf)),
        ("natural c".into(), then(&ttf, &flip), then(&flip, &ttf)),
        ("natural sigma".into(), then(&t2f, &sigma), then(&sigma, &tf)),
    ];
    for i in 0..2 {
        let rho = c(Rho { n: 2, i });
        out.push((format!("natural rho{i}"), then(&t2f, &rho), then(&rho, &tf)));
    }
    out
}

fn tangent_biproduct(ctx: &Ctx) -> Outcome {
    let sr = ctx.sr;
    let mut cases = Vec::new();
    for n in 1..=ctx.cfg.n_vars {
        let v = space(sr, n);
        for (i, m) in ctx.random_maps(n, 2).into_iter().enumerate() {
            let f = LinearMap::new(&v, &v, m).expect("square map");
            for (name, l, r) in tangent_identities(&v, &f) {
                cases.push((format!("{name} at dim {n} with f{i}"), l, r));
            }
        }
    }
    run_cases(&cases, |(name, l, r)| {
        (l != r).then(|| cx(name.clone(), show_matrix(sr, l.matrix()), show_matrix(sr, r.matrix())))
    })
}

/// A row vector `k` with `k·m = target`, by search over `{0, 1}`.
fn left_inverse_row(sr: Semiring, m: &[Vec<Scalar>], target: &[Scalar]) -> Option<Vec<Scalar>> {
    let rows = m.len();
    (0u64..1 << rows).find_map(|bits| {
        let k: Vec<Scalar> = (0..rows).map(|i| if bits >> i & 1 == 1 { sr.one() } else { sr.zero() }).collect();
        let ok = (0..target.len()).all(|j| {
            let s = (0..rows).fold(sr.zero(), |acc, i| sr.add(&acc, &sr.mul(&k[i], &m[i][j])));
            s == target[j]
        });
        ok.then_some(k)
    })
}

fn tangent_vertical_lift(ctx: &Ctx) -> Outcome {
    use TangentComponentKind::*;
    let sr = ctx.sr;
    let mut cases: Vec<(usize, Option<usize>)> = Vec::new();
    for n in 1..=ctx.cfg.n_vars.min(2) {
        cases.push((n, None));
        cases.extend((0..3 * n).map(|i| (n, Some(i))));
    }
    run_cases(&cases, |&(n, row)| {
        let v = space(sr, n);
        let l = vertical_lift(&v).expect("vertical lift");
        match row {
            None => {
                let t = tangent_space(&v);
                let tp = bt_functor(&bt_component(Projection, &v).ok()?, 1).ok()?;
                let left = then(&l, &tp);
                let ppz = then(
                    &then(&bt_component(Projection, &t).ok()?, &bt_component(Projection, &v).ok()?),
                    &bt_component(Zero, &v).ok()?,
                );
                let right = then(&l, &ppz);
                (left != right).then(|| {
                    cx(
                        format!("equalizer at dim {n}"),
                        show_matrix(sr, left.matrix()),
                        show_matrix(sr, right.matrix()),
                    )
                })
            }
            Some(i) => {
                let mut target = vec![sr.zero(); 3 * n];
                target[i] = sr.one();
                let found = left_inverse_row(sr, l.matrix(), &target);
                found
                    .is_none()
                    .then(|| cx(format!("left inverse row {i} at dim {n}"), "none", show_matrix(sr, &[target])))
            }
        }
    })
}

// Algebras of the monad and their tangent structure.

fn em_s_algebra(ctx: &Ctx) -> Outcome {
    let sr = ctx.sr;
    let algebras = test_algebras(sr, 2);
    run_cases(&algebras, |(name, a)| {
        let lifted = lift_tangent(&SAlgebra::FiniteRank(a.clone()));
        if let Err(e) = lifted.check_laws(2) {
            return Some(cx(format!("T({name})"), e.to_string(), "S-algebra laws"));
        }
        let vars: Vec<usize> = (0..2 * a.rank()).collect();
        monomials(&vars, 3).into_iter().find_map(|m| {
            let p = Poly::basis(sr, m);
            let tabulated = lifted.structure_map(&p).ok()?;
            let via_lambda = ctx.nu_lifted(a, 1, &p);
            (tabulated != via_lambda).then(|| {
                cx(
                    format!("T({name}): {}", show_poly(&p)),
                    show_matrix(sr, &[tabulated]),
                    show_matrix(sr, &[via_lambda]),
                )
            })
        })
    })
}

fn em_lift_vs_weil(ctx: &Ctx) -> Outcome {
    let sr = ctx.sr;
    run_cases(&test_algebras(sr, 3), |(name, a)| {
        let weil = weil_extend(a, WeilKind::T);
        let lifted = match induced_monoid(&lift_tangent(&SAlgebra::FiniteRank(a.clone()))) {
            Ok(m) => m,
            Err(e) => return Some(cx(*name, e.to_string(), show_algebra(&weil))),
        };
        if !lifted.same_structure(&weil) {
            return Some(cx(*name, show_algebra(&lifted), show_algebra(&weil)));
        }
        let r = 2 * a.rank();
        for i in 0..r {
            for j in i..r {
                let p = Poly::var(sr, i).mul(&Poly::var(sr, j));
                let via_lambda = ctx.nu_lifted(a, 1, &p);
                if via_lambda != weil.table()[i][j] {
                    let input = format!("{name}: {} * {}", weil.basis()[i], weil.basis()[j]);
                    return Some(cx(
                        input,
                        show_matrix(sr, &[via_lambda]),
                        show_matrix(sr, &[weil.table()[i][j].clone()]),
                    ));
                }
            }
        }
        None
    })
}

type Nu<'a> = Box<dyn Fn(&Poly<usize>) -> Vec<Scalar> + Sync + 'a>;

fn em_lifted_morphisms(ctx: &Ctx) -> Outcome {
    use EmComponent::*;
    let sr = ctx.sr;
    let mut cases = Vec::new();
    for (name, a) in test_algebras(sr, 2) {
        for kind in [P, Z, Sigma, L, C] {
            cases.push((name, a.clone(), kind));
        }
    }
    run_cases(&cases, |(name, a, kind)| {
        let label = format!("{kind:?} at {name}");
        let f = match em_component(*kind, a) {
            Ok(f) => f,
            Err(e) => return Some(cx(label, e.to_string(), "algebra morphism")),
        };
        let level = |n: u32| -> Nu<'_> { Box::new(move |p| ctx.nu_lifted(a, n, p)) };
        let fibre: Nu<'_> = Box::new(|p| fibre_structure_map(a, 2, p));
        let (nu_dom, nu_cod) = match kind {
            P => (level(1), level(0)),
            Z => (level(0), level(1)),
            Sigma => (fibre, level(1)),
            L => (level(1), level(2)),
            C => (level(2), level(2)),
        };
        let vars: Vec<usize> = (0..f.domain().rank()).collect();
        monomials(&vars, 2).into_iter().find_map(|m| {
            let p = Poly::basis(sr, m);
            let left = f.apply(&nu_dom(&p));
            let pushed = substitute(&p, |&i| {
                Comb::from_terms(sr, f.apply(&f.domain().basis_vector(i)).into_iter().enumerate())
            });
            let right = nu_cod(&pushed);
            (left != right).then(|| {
                cx(
                    format!("{label}: {}", show_poly(&p)),
                    show_matrix(sr, &[left]),
                    show_matrix(sr, &[right]),
                )
            })
        })
    })
}

fn weil_identities(a: &StructureAlgebra) -> Result<Vec<(&'static str, LinearMorphism, LinearMorphism)>, EmError> {
    use EmComponent::*;
    let sr = a.semiring();
    let r = a.rank();
    let t = weil_extend(a, WeilKind::T);
    let t2 = weil_extend(a, WeilKind::T2);
    let t3 = fibre_power_algebra(a, 3);
    let tsq = weil_extend(a, WeilKind::Tsq);
    let c = |k| em_component(k, a);
    let (p, z, l, flip, sigma) = (c(P)?, c(Z)?, c(L)?, c(C)?, c(Sigma)?);
    let bm = |dom: &StructureAlgebra, cod: &StructureAlgebra, from, assign: &[&[usize]]| {
        LinearMorphism::new(dom, cod, block_matrix(sr, r, from, assign))
    };
    Ok(vec![
        ("z;p = 1", z.then(&p)?, LinearMorphism::identity(a)),
        ("c;c = 1", flip.then(&flip)?, LinearMorphism::identity(&tsq)),
        ("l;c = l", l.then(&flip)?, l.clone()),
        (
            "sigma unit",
            bm(&t, &t2, 2, &[&[0], &[1], &[]])?.then(&sigma)?,
            LinearMorphism::identity(&t),
        ),
        (
            "sigma commutative",
            bm(&t2, &t2, 3, &[&[0], &[2], &[1]])?.then(&sigma)?,
            sigma.clone(),
        ),
        (
            "sigma associative",
            bm(&t3, &t2, 4, &[&[0], &[1, 2], &[3]])?.then(&sigma)?,
            bm(&t3, &t2, 4, &[&[0], &[1], &[2, 3]])?.then(&sigma)?,
        ),
    ])
}

fn em_weil_axioms(ctx: &Ctx) -> Outcome {
    let sr = ctx.sr;
    let algebras = test_algebras(sr, 3);
    let mut cases = Vec::new();
    for (name, a) in &algebras {
        match weil_identities(a) {
            Ok(ids) => cases.extend(ids.into_iter().map(|(law, l, r)| (format!("{law} at {name}"), Ok((l, r))))),
            Err(e) => cases.push((name.to_string(), Err(e))),
        }
    }
    run_cases(&cases, |(label, case)| match case {
        Ok((l, r)) => (l != r).then(|| cx(label.clone(), show_matrix(sr, l.matrix()), show_matrix(sr, r.matrix()))),
        Err(e) => Some(cx(label.clone(), e.to_string(), "algebra morphism")),
    })
}

fn em_equalizer(ctx: &Ctx) -> Outcome {
    use EmComponent::*;
    let sr = ctx.sr;
    let finite = sr.elements().is_some();
    run_cases(&test_algebras(sr, 2), |(name, a)| {
        let fail = |what: &str, e: String| Some(cx(format!("{what} at {name}"), e, "factorization"));
        let lift = match vertical_lift_morphism(a) {
            Ok(l) => l,
            Err(e) => return fail("vertical lift", e.to_string()),
        };
        match equalizes(a, lift.matrix()) {
            Ok(true) => {}
            Ok(false) => return fail("vertical lift", "does not equalize".into()),
            Err(e) => return fail("vertical lift", e.to_string()),
        }
        if !finite {
            return None;
        }
        match vertical_lift_factor(a, &lift) {
            Ok(k) if k == LinearMorphism::identity(&weil_extend(a, WeilKind::T2)) => {}
            Ok(k) => return fail("vertical lift", show_matrix(sr, k.matrix())),
            Err(e) => return fail("vertical lift", e.to_string()),
        }
        let ell = match em_component(L, a) {
            Ok(l) => l,
            Err(e) => return fail("l", e.to_string()),
        };
        match vertical_lift_factor(a, &ell) {
            Ok(k) if k.then(&lift).map(|h| h == ell).unwrap_or(false) => {}
            Ok(k) => return fail("l", show_matrix(sr, k.matrix())),
            Err(e) => return fail("l", e.to_string()),
        }
        let tz = match em_component(Z, a).and_then(|z| {
            let m = bt_functor(z.map(), 1)?;
            LinearMorphism::new(&weil_extend(a, WeilKind::T), &weil_extend(a, WeilKind::Tsq), m.matrix().to_vec())
        }) {
            Ok(m) => m,
            Err(e) => return fail("T(z)", e.to_string()),
        };
        match vertical_lift_factor(a, &tz) {
            Err(EmError::NotEqualizing) => None,
            other => fail("T(z)", format!("{other:?}")),
        }
    })
}

struct Law {
    id: &'static str,
    suite: &'static str,
    run: fn(&Ctx) -> Outcome,
}

const LAWS: &[Law] = &[
    Law {
        id: "cd.1",
        suite: "codifferential",
        run: cd1,
    },
    Law {
        id: "cd.2",
        suite: "codifferential",
        run: cd2,
    },
    Law {
        id: "cd.3",
        suite: "codifferential",
        run: cd3,
    },
    Law {
        id: "cd.4",
        suite: "codifferential",
        run: cd4,
    },
    Law {
        id: "cd.5",
        suite: "codifferential",
        run: cd5,
    },
    Law {
        id: "appendix.coderive-unit",
        suite: "coderiving",
        run: coderive_unit,
    },
    Law {
        id: "appendix.coderive-nabla",
        suite: "coderiving",
        run: coderive_nabla,
    },
    Law {
        id: "appendix.coderive-d",
        suite: "coderiving",
        run: coderive_d,
    },
    Law {
        id: "appendix.lambda-mu",
        suite: "distributive-law",
        run: lambda_mu,
    },
    Law {
        id: "appendix.lambda-eta",
        suite: "distributive-law",
        run: lambda_eta,
    },
    Law {
        id: "appendix.lambda-p",
        suite: "tangent-monad",
        run: lambda_p,
    },
    Law {
        id: "appendix.lambda-sigma",
        suite: "tangent-monad",
        run: lambda_sigma,
    },
    Law {
        id: "appendix.lambda-z",
        suite: "tangent-monad",
        run: lambda_z,
    },
    Law {
        id: "appendix.lambda-ell",
        suite: "tangent-monad",
        run: lambda_ell,
    },
    Law {
        id: "appendix.lambda-c",
        suite: "tangent-monad",
        run: lambda_c,
    },
    Law {
        id: "monad.left-unit",
        suite: "monad",
        run: monad_left_unit,
    },
    Law {
        id: "monad.right-unit",
        suite: "monad",
        run: monad_right_unit,
    },
    Law {
        id: "monad.assoc",
        suite: "monad",
        run: monad_assoc,
    },
    Law {
        id: "monoid.assoc",
        suite: "monoid",
        run: monoid_assoc,
    },
    Law {
        id: "monoid.comm",
        suite: "monoid",
        run: monoid_comm,
    },
    Law {
        id: "monoid.unit",
        suite: "monoid",
        run: monoid_unit,
    },
    Law {
        id: "monoid.mu-morphism",
        suite: "monoid",
        run: monoid_mu_morphism,
    },
    Law {
        id: "natural.eta",
        suite: "naturality",
        run: natural_eta,
    },
    Law {
        id: "natural.mu",
        suite: "naturality",
        run: natural_mu,
    },
    Law {
        id: "natural.nabla",
        suite: "naturality",
        run: natural_nabla,
    },
    Law {
        id: "natural.unit",
        suite: "naturality",
        run: natural_unit,
    },
    Law {
        id: "natural.d",
        suite: "naturality",
        run: natural_d,
    },
    Law {
        id: "natural.coderive",
        suite: "naturality",
        run: natural_coderive,
    },
    Law {
        id: "seely.roundtrip",
        suite: "seely",
        run: seely_roundtrip,
    },
    Law {
        id: "seely.multiplicative",
        suite: "seely",
        run: seely_multiplicative,
    },
    Law {
        id: "tangent.biproduct",
        suite: "biproduct-tangent",
        run: tangent_biproduct,
    },
    Law {
        id: "tangent.vertical-lift",
        suite: "biproduct-tangent",
        run: tangent_vertical_lift,
    },
    Law {
        id: "em.s-algebra",
        suite: "em-tangent",
        run: em_s_algebra,
    },
    Law {
        id: "em.lift-vs-weil",
        suite: "em-tangent",
        run: em_lift_vs_weil,
    },
    Law {
        id: "em.lifted-morphisms",
        suite: "em-tangent",
        run: em_lifted_morphisms,
    },
    Law {
        id: "em.weil-axioms",
        suite: "em-tangent",
        run: em_weil_axioms,
    },
    Law {
        id: "em.equalizer",
        suite: "em-tangent",
        run: em_equalizer,
    },
];

/// Registered law ids in registry order.
pub fn law_ids() -> Vec<&'static str> {
    LAWS.iter().map(|l| l.id).collect()
}

pub fn run_suite(law: &str, config: &GeneratorConfig) -> Result<LawReport, LawError> {
    run_suite_mutated(law, config, Mutation::None)
}

pub fn run_suite_mutated(law: &str, config: &GeneratorConfig, mutation: Mutation) -> Result<LawReport, LawError> {
    config.validate()?;
    let (index, entry) = LAWS
        .iter()
        .enumerate()
        .find(|(_, l)| l.id == law)
        .ok_or_else(|| LawError::UnknownLaw(law.to_string()))?;
    let ctx = Ctx {
        cfg: config.clone(),
        sr: config.semiring,
        mutation,
        stream: index as u64,
    };
    let (status, checked, counterexample) = match (entry.run)(&ctx) {
        Outcome::Skipped => (Status::Skipped, 0, None),
        Outcome::Ran {
            checked,
            counterexample: None,
        } => (Status::Pass, checked, None),
        Outcome::Ran { checked, counterexample } => (Status::Fail, checked, counterexample),
    };
    Ok(LawReport {
        suite: entry.suite.to_string(),
        law: entry.id.to_string(),
        semiring: config.semiring.to_string(),
        params: config.params(),
        status,
        checked,
        counterexample,
    })
}

/// Run every law whose id or suite name matches a glob pattern.
pub fn run_matching(pattern: &str, config: &GeneratorConfig) -> Result<Vec<LawReport>, LawError> {
    let glob = glob::Pattern::new(pattern).map_err(|e| LawError::Pattern(e.to_string()))?;
    let selected: Vec<&Law> = LAWS.iter().filter(|l| glob.matches(l.id) || glob.matches(l.suite)).collect();
    if selected.is_empty() {
        return Err(LawError::NoMatch(pattern.to_string()));
    }
    selected.iter().map(|l| run_suite(l.id, config)).collect()
}

/// Domains whose monomial bases can be enumerated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    /// `S(V)`
    Sym,
    /// `S(V ⊕ … ⊕ V)` with the given number of copies.
    Copies(usize),
    /// `S(V) ⊗ V`
    SymTensorV,
    /// `S(V) ⊗ S(V)`, total degree bounded.
    SymTensorSym,
    /// `S(S(V))` with separate inner and outer degree bounds.
    Nested { inner: u32, outer: u32 },
}

/// Canonical basis of a domain under the config bounds, in enumeration
/// order.
pub fn enumerate_basis(config: &GeneratorConfig, shape: Shape) -> Result<Vec<String>, LawError> {
    config.validate()?;
    let vars: Vec<usize> = (0..config.n_vars).collect();
    let d = config.max_degree;
    Ok(match shape {
        Shape::Sym => monomials(&vars, d).iter().map(|m| mono_text(m, &nm)).collect(),
        Shape::Copies(k) => {
            if !(1..=4).contains(&k) {
                return Err(LawError::UnsupportedShape(format!("{k} copies")));
            }
            let tv: Vec<Tv> = (0..k as u8).flat_map(|t| vars.iter().map(move |&v| Tagged::new(t, v))).collect();
            monomials(&tv, d).iter().map(|m| mono_text(m, &tnm)).collect()
        }
        Shape::SymTensorV => monomials(&vars, d.saturating_sub(1))
            .iter()
            .flat_map(|m| vars.iter().map(move |x| format!("{} ⊗ {}", mono_text(m, &nm), nm(x))))
            .collect(),
        Shape::SymTensorSym => bounded_pairs(&monomials(&vars, d), u64::from(d))
            .iter()
            .map(|(a, b)| format!("{} ⊗ {}", mono_text(a, &nm), mono_text(b, &nm)))
            .collect(),
        Shape::Nested { inner, outer } => {
            if inner == 0 || inner > 4 || outer > 4 {
                return Err(LawError::UnsupportedShape(format!("nesting bounds {inner}/{outer}")));
            }
            monomials(&monomials(&vars, inner), outer)
                .iter()
                .map(|m| mono_text(m, &|t: &Mono<usize>| token_name(t, &nm)))
                .collect()
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(sr: Semiring) -> GeneratorConfig {
        GeneratorConfig::new(sr)
    }

    #[test]
    fn cd3_counts_variables() {
        let r = run_suite("cd.3", &cfg(Semiring::Nat)).unwrap();
        assert_eq!((r.status, r.checked), (Status::Pass, 3));
    }

    #[test]
    fn dropped_coefficient_caught_by_leibniz() {
        let r = run_suite_mutated("cd.2", &cfg(Semiring::Nat), Mutation::DropDerivativeCoefficient).unwrap();
        assert_eq!(r.status, Status::Fail);
        let c = r.counterexample.unwrap();
        assert_eq!(c.input, "x ⊗ x");
        assert_eq!((c.lhs.as_str(), c.rhs.as_str()), ("x ⊗ x", "2*x ⊗ x"));
    }

    #[test]
    fn basis_enumeration_examples() {
        let mut c = cfg(Semiring::Nat);
        c.n_vars = 1;
        c.max_degree = 2;
        assert_eq!(enumerate_basis(&c, Shape::Sym).unwrap(), ["1", "x", "x^2"]);
        assert_eq!(enumerate_basis(&c, Shape::Copies(2)).unwrap().len(), 6);
        let nested = enumerate_basis(&c, Shape::Nested { inner: 2, outer: 1 }).unwrap();
        assert_eq!(nested, ["1", "[1]", "[x]", "[x^2]"]);
        assert!(enumerate_basis(&c, Shape::Copies(9)).is_err());
    }

    #[test]
    fn nesting_one_skips_nested_laws() {
        let mut c = cfg(Semiring::Bool);
        c.nesting = 1;
        let r = run_suite("monad.assoc", &c).unwrap();
        assert_eq!((r.status, r.checked), (Status::Skipped, 0));
    }

    #[test]
    fn reports_are_deterministic() {
        let c = cfg(Semiring::Mod(5));
        let a = run_matching("natural.*", &c).unwrap();
        let b = run_matching("natural.*", &c).unwrap();
        assert_eq!(reports_json(&a), reports_json(&b));
    }

    #[test]
    fn report_json_field_order() {
        let r = run_suite("cd.1", &cfg(Semiring::Nat)).unwrap();
        let json = r.to_json();
        let keys = [
            "\"suite\"",
            "\"law\"",
            "\"semiring\"",
            "\"params\"",
            "\"status\"",
            "\"checked\"",
            "\"counterexample\"",
        ];
        let positions: Vec<usize> = keys.iter().map(|k| json.find(k).unwrap()).collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn bad_patterns_and_ids() {
        let c = cfg(Semiring::Nat);
        assert!(matches!(run_suite("cd.9", &c), Err(LawError::UnknownLaw(_))));
        assert!(matches!(run_matching("nothing*", &c), Err(LawError::NoMatch(_))));
    }
}
