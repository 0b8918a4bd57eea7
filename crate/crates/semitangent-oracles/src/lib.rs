//! Reference computations for the test suites.
//!
//! Nothing here depends on `semitangent`. Arithmetic is on `i128` values,
//! polynomials are maps from exponent vectors, and every oracle takes the
//! most direct route available (dual-number evaluation, naive substitution,
//! brute-force enumeration) rather than the compositional one.

use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleError {
    Scope(String),
    Parse(String),
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::Scope(s) => write!(f, "oracle scope exceeded: {s}"),
            OracleError::Parse(s) => write!(f, "oracle parse error: {s}"),
        }
    }
}

impl std::error::Error for OracleError {}

/// Tropical zero.
pub const INF: i128 = i128::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ring {
    Nat,
    Int,
    Bool,
    Tropical,
    Mod(i128),
}

impl Ring {
    pub fn zero(self) -> i128 {
        match self {
            Ring::Tropical => INF,
            _ => 0,
        }
    }

    pub fn one(self) -> i128 {
        match self {
            Ring::Tropical => 0,
            _ => 1,
        }
    }

    pub fn add(self, a: i128, b: i128) -> i128 {
        match self {
            Ring::Nat | Ring::Int => a + b,
            Ring::Bool => (a | b) & 1,
            Ring::Tropical => a.min(b),
            Ring::Mod(m) => (a + b).rem_euclid(m),
        }
    }

    pub fn mul(self, a: i128, b: i128) -> i128 {
        match self {
            Ring::Nat | Ring::Int => a * b,
            Ring::Bool => a & b & 1,
            Ring::Tropical if a == INF || b == INF => INF,
            Ring::Tropical => a + b,
            Ring::Mod(m) => (a * b).rem_euclid(m),
        }
    }

    /// `n·1`.
    pub fn nat(self, n: u64) -> i128 {
        (0..n).fold(self.zero(), |acc, _| self.add(acc, self.one()))
    }

    pub fn elements(self) -> Option<Vec<i128>> {
        match self {
            Ring::Bool => Some(vec![0, 1]),
            Ring::Mod(m) => Some((0..m).collect()),
            _ => None,
        }
    }
}

/// A polynomial in `nvars` variables as exponent vector → coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dense {
    pub ring: Ring,
    pub nvars: usize,
    pub terms: BTreeMap<Vec<u32>, i128>,
}

impl Dense {
    pub fn zero(ring: Ring, nvars: usize) -> Self {
        Dense {
            ring,
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ring: Ring, nvars: usize, c: i128) -> Self {
        let mut p = Self::zero(ring, nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn var(ring: Ring, nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(ring, nvars);
        p.add_term(e, ring.one());
        p
    }

    pub fn monomial(ring: Ring, exponents: Vec<u32>, c: i128) -> Self {
        let mut p = Self::zero(ring, exponents.len());
        p.add_term(exponents, c);
        p
    }

    pub fn add_term(&mut self, e: Vec<u32>, c: i128) {
        let r = self.ring;
        let v = r.add(*self.terms.get(&e).unwrap_or(&r.zero()), c);
        if v == r.zero() {
            self.terms.remove(&e);
        } else {
            self.terms.insert(e, v);
        }
    }

    pub fn add(&self, other: &Dense) -> Dense {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), *c);
        }
        out
    }

    pub fn mul(&self, other: &Dense) -> Dense {
        let mut out = Dense::zero(self.ring, self.nvars);
        for (e, c) in &self.terms {
            for (f, d) in &other.terms {
                let g = e.iter().zip(f).map(|(a, b)| a + b).collect();
                out.add_term(g, self.ring.mul(*c, *d));
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Dense {
        (0..n).fold(Dense::constant(self.ring, self.nvars, self.ring.one()), |acc, _| acc.mul(self))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

/// A dual number whose parts are polynomials.
#[derive(Debug, Clone)]
struct DualPoly(Dense, Dense);

impl DualPoly {
    fn mul(&self, o: &DualPoly) -> DualPoly {
        DualPoly(self.0.mul(&o.0), self.0.mul(&o.1).add(&self.1.mul(&o.0)))
    }
}

/// `p(x̄, εx̄) mod ε²` for `p` over `2n` variables, the first `n` being
/// `x̄` and the rest `ȳ`. Returns the constant and `ε` parts.
pub fn dual_number_lambda(p: &Dense) -> (Dense, Dense) {
    let r = p.ring;
    let n = p.nvars / 2;
    let image = |i: usize| {
        if i < n {
            DualPoly(Dense::var(r, n, i), Dense::zero(r, n))
        } else {
            DualPoly(Dense::zero(r, n), Dense::var(r, n, i - n))
        }
    };
    let mut total = DualPoly(Dense::zero(r, n), Dense::zero(r, n));
    for (e, c) in &p.terms {
        let mut acc = DualPoly(Dense::constant(r, n, *c), Dense::zero(r, n));
        for (i, k) in e.iter().enumerate() {
            for _ in 0..*k {
                acc = acc.mul(&image(i));
            }
        }
        total = DualPoly(total.0.add(&acc.0), total.1.add(&acc.1));
    }
    (total.0, total.1)
}

/// A term of a nested polynomial: coefficient and `(inner monomial, power)`
/// factors.
pub type NestedTerm = (i128, Vec<(Vec<u32>, u32)>);

/// Flatten a nested polynomial by substituting each inner monomial.
pub fn substitution_mu(ring: Ring, nvars: usize, terms: &[NestedTerm]) -> Dense {
    let mut out = Dense::zero(ring, nvars);
    for (c, factors) in terms {
        let mut acc = Dense::constant(ring, nvars, *c);
        for (inner, k) in factors {
            acc = acc.mul(&Dense::monomial(ring, inner.clone(), ring.one()).pow(*k));
        }
        out = out.add(&acc);
    }
    out
}

/// `∂p/∂x_i` for every variable, one variable at a time.
pub fn power_rule_d(p: &Dense) -> Vec<Dense> {
    let r = p.ring;
    (0..p.nvars)
        .map(|i| {
            let mut out = Dense::zero(r, p.nvars);
            for (e, c) in &p.terms {
                if e[i] == 0 {
                    continue;
                }
                let mut lowered = e.clone();
                lowered[i] -= 1;
                out.add_term(lowered, r.mul(r.nat(u64::from(e[i])), *c));
            }
            out
        })
        .collect()
}

/// Structure constants of a finite-rank algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub ring: Ring,
    pub unit: Vec<i128>,
    pub table: Vec<Vec<Vec<i128>>>,
}

impl Table {
    pub fn rank(&self) -> usize {
        self.unit.len()
    }

    pub fn mul(&self, a: &[i128], b: &[i128]) -> Vec<i128> {
        let r = self.ring;
        let mut out = vec![r.zero(); self.rank()];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                let c = r.mul(*x, *y);
                for (k, t) in self.table[i][j].iter().enumerate() {
                    out[k] = r.add(out[k], r.mul(c, *t));
                }
            }
        }
        out
    }

    fn basis(&self, i: usize) -> Vec<i128> {
        let mut v = vec![self.ring.zero(); self.rank()];
        v[i] = self.ring.one();
        v
    }

    pub fn is_valid(&self) -> bool {
        let n = self.rank();
        let b: Vec<Vec<i128>> = (0..n).map(|i| self.basis(i)).collect();
        (0..n).all(|i| self.mul(&self.unit, &b[i]) == b[i])
            && (0..n).all(|i| (0..n).all(|j| self.table[i][j] == self.table[j][i]))
            && (0..n).all(|i| {
                (0..n).all(|j| (0..n).all(|k| self.mul(&self.mul(&b[i], &b[j]), &b[k]) == self.mul(&b[i], &self.mul(&b[j], &b[k]))))
            })
    }
}

/// `A[ε]` written out from `(a + bε)(a′ + b′ε) = aa′ + (ab′ + a′b)ε`.
pub fn dual_numbers(a: &Table) -> Table {
    let r = a.ring;
    let n = a.rank();
    let mut unit = vec![r.zero(); 2 * n];
    unit[..n].copy_from_slice(&a.unit);
    let table = (0..2 * n)
        .map(|i| {
            (0..2 * n)
                .map(|j| {
                    let (x, y) = (elem(a, i), elem(a, j));
                    [a.mul(&x.0, &y.0), add_vec(r, &a.mul(&x.0, &y.1), &a.mul(&x.1, &y.0))].concat()
                })
                .collect()
        })
        .collect();
    Table { ring: r, unit, table }
}

fn elem(a: &Table, i: usize) -> (Vec<i128>, Vec<i128>) {
    let n = a.rank();
    let z = vec![a.ring.zero(); n];
    if i < n {
        (a.basis(i), z)
    } else {
        (z, a.basis(i - n))
    }
}

fn add_vec(r: Ring, a: &[i128], b: &[i128]) -> Vec<i128> {
    a.iter().zip(b).map(|(x, y)| r.add(*x, *y)).collect()
}

/// The lift-vs-Weil comparison target: the table a lifted algebra must
/// tabulate to.
pub fn lift_vs_weil(a: &Table) -> Table {
    dual_numbers(a)
}

/// `A[ε₁,ε₂]` from element arithmetic on quadruples `(a, b, c, d)` standing
/// for `a + bε₁ + cε₂ + dε₁ε₂`.
pub fn double_dual_numbers(a: &Table) -> Table {
    let r = a.ring;
    let n = a.rank();
    let part = |v: &[i128], k: usize| v[k * n..(k + 1) * n].to_vec();
    let mul = |x: &[i128], y: &[i128]| -> Vec<i128> {
        let (a0, a1, a2, a3) = (part(x, 0), part(x, 1), part(x, 2), part(x, 3));
        let (b0, b1, b2, b3) = (part(y, 0), part(y, 1), part(y, 2), part(y, 3));
        let m = |p: &[i128], q: &[i128]| a.mul(p, q);
        let s = |vs: Vec<Vec<i128>>| vs.into_iter().reduce(|acc, v| add_vec(r, &acc, &v)).expect("nonempty");
        [
            m(&a0, &b0),
            s(vec![m(&a0, &b1), m(&a1, &b0)]),
            s(vec![m(&a0, &b2), m(&a2, &b0)]),
            s(vec![m(&a0, &b3), m(&a3, &b0), m(&a1, &b2), m(&a2, &b1)]),
        ]
        .concat()
    };
    let e = |i: usize| {
        let mut v = vec![r.zero(); 4 * n];
        v[i] = r.one();
        v
    };
    let mut unit = vec![r.zero(); 4 * n];
    unit[..n].copy_from_slice(&a.unit);
    let table = (0..4 * n).map(|i| (0..4 * n).map(|j| mul(&e(i), &e(j))).collect()).collect();
    Table { ring: r, unit, table }
}

/// `A[ε,ε′]` from element arithmetic with all products of `ε`, `ε′` zero.
pub fn second_order_dual_numbers(a: &Table) -> Table {
    let r = a.ring;
    let n = a.rank();
    let mut unit = vec![r.zero(); 3 * n];
    unit[..n].copy_from_slice(&a.unit);
    let mut table = vec![vec![vec![r.zero(); 3 * n]; 3 * n]; 3 * n];
    for (i, row) in table.iter_mut().enumerate() {
        for (j, out) in row.iter_mut().enumerate() {
            let (bi, bj) = (i / n, j / n);
            let block = match (bi, bj) {
                (0, k) | (k, 0) => k,
                _ => continue,
            };
            let p = a.mul(&a.basis(i % n), &a.basis(j % n));
            out[block * n..(block + 1) * n].copy_from_slice(&p);
        }
    }
    Table { ring: r, unit, table }
}

/// Every valid algebra of the given rank over a finite ring.
pub fn enumerate_algebras(ring: Ring, rank: usize) -> Result<Vec<Table>, OracleError> {
    let elems = ring.elements().ok_or_else(|| OracleError::Scope("infinite carrier".into()))?;
    let pairs: Vec<(usize, usize)> = (0..rank).flat_map(|i| (i..rank).map(move |j| (i, j))).collect();
    let slots = rank + pairs.len() * rank;
    let mut out = Vec::new();
    for digits in odometer(elems.len(), slots) {
        let v: Vec<i128> = digits.iter().map(|&d| elems[d]).collect();
        let unit = v[..rank].to_vec();
        let mut table = vec![vec![vec![ring.zero(); rank]; rank]; rank];
        for (p, &(i, j)) in pairs.iter().enumerate() {
            let c = v[rank + p * rank..rank + (p + 1) * rank].to_vec();
            table[i][j] = c.clone();
            table[j][i] = c;
        }
        let t = Table { ring, unit, table };
        if t.is_valid() {
            out.push(t);
        }
    }
    Ok(out)
}

fn odometer(base: usize, len: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = base.checked_pow(len as u32).expect("enumeration too large");
    (0..total).map(move |mut k| {
        (0..len)
            .map(|_| {
                let d = k % base;
                k /= base;
                d
            })
            .collect()
    })
}

/// A matrix acting on column vectors: `rows × cols`.
pub type Matrix = Vec<Vec<i128>>;

pub fn apply(r: Ring, m: &Matrix, v: &[i128]) -> Vec<i128> {
    m.iter()
        .map(|row| row.iter().zip(v).fold(r.zero(), |acc, (a, b)| r.add(acc, r.mul(*a, *b))))
        .collect()
}

pub fn is_morphism(dom: &Table, cod: &Table, m: &Matrix) -> bool {
    let r = dom.ring;
    if apply(r, m, &dom.unit) != cod.unit {
        return false;
    }
    (0..dom.rank()).all(|i| {
        (0..dom.rank()).all(|j| {
            let (ei, ej) = (dom.basis(i), dom.basis(j));
            apply(r, m, &dom.mul(&ei, &ej)) == cod.mul(&apply(r, m, &ei), &apply(r, m, &ej))
        })
    })
}

/// Outcome of factoring one equalizing morphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factoring {
    pub h: Matrix,
    pub factorizations: usize,
}

/// All algebra morphisms `h : B → A[ε₁,ε₂]` whose `ε₂` block vanishes
/// (`T(p)h = z p p h`), each with the number of algebra morphisms
/// `k : B → A[ε,ε′]` such that `a + bε + cε′ ↦ a + bε₁ + cε₁ε₂` after `k`
/// gives `h`.
pub fn brute_equalizer(a: &Table, b: &Table) -> Result<Vec<Factoring>, OracleError> {
    let r = a.ring;
    let elems = r
        .elements()
        .ok_or_else(|| OracleError::Scope("brute force needs a finite carrier".into()))?;
    let n = a.rank();
    let tsq = double_dual_numbers(a);
    let t2 = second_order_dual_numbers(a);
    let lift = |v: &[i128]| -> Vec<i128> { [v[..n].to_vec(), v[n..2 * n].to_vec(), vec![r.zero(); n], v[2 * n..].to_vec()].concat() };
    let matrices = |rows: usize| -> Vec<Matrix> {
        odometer(elems.len(), rows * b.rank())
            .map(|d| {
                (0..rows)
                    .map(|i| (0..b.rank()).map(|j| elems[d[i * b.rank() + j]]).collect())
                    .collect()
            })
            .collect()
    };
    let candidates_k: Vec<Matrix> = matrices(3 * n).into_iter().filter(|k| is_morphism(b, &t2, k)).collect();
    let mut out = Vec::new();
    for h in matrices(4 * n) {
        if !is_morphism(b, &tsq, &h) {
            continue;
        }
        let equalizes = (0..b.rank()).all(|j| (2 * n..3 * n).all(|i| h[i][j] == r.zero()));
        if !equalizes {
            continue;
        }
        let factorizations = candidates_k
            .iter()
            .filter(|k| {
                (0..b.rank())
                    .all(|j| lift(&k.iter().map(|row| row[j]).collect::<Vec<_>>()) == h.iter().map(|row| row[j]).collect::<Vec<_>>())
            })
            .count();
        out.push(Factoring { h, factorizations });
    }
    Ok(out)
}

/// Expand an expression in the CLI grammar, with literals read as `n·1`
/// and `-` allowed only over the integers.
pub fn expand(ring: Ring, vars: &[&str], text: &str) -> Result<Dense, OracleError> {
    let tokens = tokenize(text)?;
    let mut pos = 0;
    let p = expr(ring, vars, &tokens, &mut pos)?;
    if pos != tokens.len() {
        return Err(OracleError::Parse(format!("trailing input at token {pos}")));
    }
    Ok(p)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(u64),
    Ident(String),
    Sym(char),
}

fn tokenize(text: &str) -> Result<Vec<Tok>, OracleError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Tok::Num(s.parse().map_err(|_| OracleError::Parse(s.clone()))?));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*^()".contains(c) {
            out.push(Tok::Sym(c));
            i += 1;
        } else {
            return Err(OracleError::Parse(format!("unexpected `{c}`")));
        }
    }
    Ok(out)
}

fn expr(ring: Ring, vars: &[&str], t: &[Tok], pos: &mut usize) -> Result<Dense, OracleError> {
    let mut acc = term(ring, vars, t, pos)?;
    while let Some(Tok::Sym(c @ ('+' | '-'))) = t.get(*pos) {
        *pos += 1;
        let rhs = term(ring, vars, t, pos)?;
        acc = if *c == '+' {
            acc.add(&rhs)
        } else {
            if ring != Ring::Int {
                return Err(OracleError::Parse("subtraction outside the integers".into()));
            }
            acc.add(&rhs.mul(&Dense::constant(ring, vars.len(), -1)))
        };
    }
    Ok(acc)
}

fn term(ring: Ring, vars: &[&str], t: &[Tok], pos: &mut usize) -> Result<Dense, OracleError> {
    let mut acc = factor(ring, vars, t, pos)?;
    while let Some(Tok::Sym('*')) = t.get(*pos) {
        *pos += 1;
        acc = acc.mul(&factor(ring, vars, t, pos)?);
    }
    Ok(acc)
}

fn factor(ring: Ring, vars: &[&str], t: &[Tok], pos: &mut usize) -> Result<Dense, OracleError> {
    let n = vars.len();
    let tok = t.get(*pos).cloned().ok_or_else(|| OracleError::Parse("unexpected end".into()))?;
    *pos += 1;
    match tok {
        Tok::Num(k) => Ok(Dense::constant(ring, n, ring.nat(k))),
        Tok::Ident(name) => {
            let i = vars
                .iter()
                .position(|v| *v == name)
                .ok_or_else(|| OracleError::Parse(format!("unknown `{name}`")))?;
            let base = Dense::var(ring, n, i);
            if let Some(Tok::Sym('^')) = t.get(*pos) {
                *pos += 1;
                match t.get(*pos) {
                    Some(Tok::Num(e)) => {
                        *pos += 1;
                        Ok(base.pow(*e as u32))
                    }
                    _ => Err(OracleError::Parse("exponent must be a literal".into())),
                }
            } else {
                Ok(base)
            }
        }
        Tok::Sym('(') => {
            let inner = expr(ring, vars, t, pos)?;
            match t.get(*pos) {
                Some(Tok::Sym(')')) => {
                    *pos += 1;
                    Ok(inner)
                }
                _ => Err(OracleError::Parse("missing `)`".into())),
            }
        }
        other => Err(OracleError::Parse(format!("unexpected {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_of_quadratic() {
        // x² + xy + y² at y = εx is x² + εx²
        let r = Ring::Nat;
        let x = Dense::var(r, 2, 0);
        let y = Dense::var(r, 2, 1);
        let p = x.mul(&x).add(&x.mul(&y)).add(&y.mul(&y));
        let (a, b) = dual_number_lambda(&p);
        let x1 = Dense::var(r, 1, 0);
        assert_eq!(a, x1.mul(&x1));
        assert_eq!(b, x1.mul(&x1));
    }

    #[test]
    fn flatten_by_substitution() {
        let out = substitution_mu(Ring::Nat, 2, &[(1, vec![(vec![2, 0], 1), (vec![1, 1], 1)])]);
        assert_eq!(out, Dense::monomial(Ring::Nat, vec![3, 1], 1));
    }

    #[test]
    fn power_rule_on_variable() {
        let d = power_rule_d(&Dense::var(Ring::Nat, 1, 0));
        assert_eq!(d[0], Dense::constant(Ring::Nat, 1, 1));
    }

    #[test]
    fn scope_errors() {
        let unit = Table {
            ring: Ring::Nat,
            unit: vec![1],
            table: vec![vec![vec![1]]],
        };
        assert!(brute_equalizer(&unit, &unit).is_err());
        assert!(enumerate_algebras(Ring::Int, 1).is_err());
    }

    #[test]
    fn boolean_rank_one_algebras() {
        // only the unit algebra: 1·1 = 1 with unit 1
        assert_eq!(enumerate_algebras(Ring::Bool, 1).unwrap().len(), 1);
    }
}
