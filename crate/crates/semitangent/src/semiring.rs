//! Exact commutative semirings.
//!
//! A [`Semiring`] is a small copyable descriptor; [`Scalar`] values carry no
//! semiring of their own and are always interpreted through a descriptor.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemiringError {
    #[error("unknown semiring kind `{0}`")]
    UnknownKind(String),
    #[error("invalid modulus: {0}")]
    Modulus(String),
    #[error("negation unavailable in semiring {0}")]
    Negation(Semiring),
    #[error("`{text}` is not an element of semiring {semiring}")]
    Scalar { text: String, semiring: Semiring },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SemiringKind {
    Naturals,
    Integers,
    IntegersMod,
    Boolean,
    Tropical,
}

/// Carrier and operations of a commutative semiring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Semiring {
    Nat,
    Int,
    Bool,
    /// min-plus over the naturals with a distinguished infinity as zero
    Tropical,
    Mod(u64),
}

/// A carrier element. `Inf` only occurs as the tropical zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scalar {
    Fin(BigInt),
    Inf,
}

impl Scalar {
    pub fn int(n: i64) -> Self {
        Scalar::Fin(BigInt::from(n))
    }

    pub fn as_bigint(&self) -> Option<&BigInt> {
        match self {
            Scalar::Fin(n) => Some(n),
            Scalar::Inf => None,
        }
    }
}

pub fn make_semiring(kind: SemiringKind, modulus: Option<u64>) -> Result<Semiring, SemiringError> {
    match (kind, modulus) {
        (SemiringKind::IntegersMod, Some(m)) if m >= 2 => Ok(Semiring::Mod(m)),
        (SemiringKind::IntegersMod, Some(m)) => Err(SemiringError::Modulus(format!("{m} < 2"))),
        (SemiringKind::IntegersMod, None) => Err(SemiringError::Modulus("missing".into())),
        (_, Some(_)) => Err(SemiringError::Modulus("only integers-mod-m takes a modulus".into())),
        (SemiringKind::Naturals, None) => Ok(Semiring::Nat),
        (SemiringKind::Integers, None) => Ok(Semiring::Int),
        (SemiringKind::Boolean, None) => Ok(Semiring::Bool),
        (SemiringKind::Tropical, None) => Ok(Semiring::Tropical),
    }
}

impl Semiring {
    pub fn kind(self) -> SemiringKind {
        match self {
            Semiring::Nat => SemiringKind::Naturals,
            Semiring::Int => SemiringKind::Integers,
            Semiring::Bool => SemiringKind::Boolean,
            Semiring::Tropical => SemiringKind::Tropical,
            Semiring::Mod(_) => SemiringKind::IntegersMod,
        }
    }

    pub fn has_negatives(self) -> bool {
        matches!(self, Semiring::Int | Semiring::Mod(_))
    }

    pub fn idempotent_addition(self) -> bool {
        matches!(self, Semiring::Bool | Semiring::Tropical)
    }

    pub fn zero(self) -> Scalar {
        match self {
            Semiring::Tropical => Scalar::Inf,
            _ => Scalar::Fin(BigInt::zero()),
        }
    }

    pub fn one(self) -> Scalar {
        match self {
            Semiring::Tropical => Scalar::Fin(BigInt::zero()),
            _ => Scalar::Fin(BigInt::one()),
        }
    }

    pub fn is_zero(self, a: &Scalar) -> bool {
        *a == self.zero()
    }

    pub fn is_one(self, a: &Scalar) -> bool {
        *a == self.one()
    }

    fn fin(self, a: &Scalar) -> &BigInt {
        match a {
            Scalar::Fin(n) => n,
            Scalar::Inf => panic!("infinite scalar outside the tropical semiring"),
        }
    }

    fn reduce(self, n: BigInt) -> Scalar {
        match self {
            Semiring::Nat | Semiring::Int | Semiring::Tropical => Scalar::Fin(n),
            Semiring::Bool => Scalar::Fin(if n.is_zero() { n } else { BigInt::one() }),
            Semiring::Mod(m) => Scalar::Fin(n.mod_floor(&BigInt::from(m))),
        }
    }

    pub fn add(self, a: &Scalar, b: &Scalar) -> Scalar {
        match self {
            Semiring::Tropical => match (a, b) {
                (Scalar::Inf, x) | (x, Scalar::Inf) => x.clone(),
                (Scalar::Fin(x), Scalar::Fin(y)) => Scalar::Fin(x.min(y).clone()),
            },
            _ => self.reduce(self.fin(a) + self.fin(b)),
        }
    }

    pub fn mul(self, a: &Scalar, b: &Scalar) -> Scalar {
        match self {
            Semiring::Tropical => match (a, b) {
                (Scalar::Inf, _) | (_, Scalar::Inf) => Scalar::Inf,
                (Scalar::Fin(x), Scalar::Fin(y)) => Scalar::Fin(x + y),
            },
            _ => self.reduce(self.fin(a) * self.fin(b)),
        }
    }

    pub fn neg(self, a: &Scalar) -> Result<Scalar, SemiringError> {
        if !self.has_negatives() {
            return Err(SemiringError::Negation(self));
        }
        Ok(self.reduce(-self.fin(a)))
    }

    /// The natural-number action `n·r`, by doubling.
    pub fn times(self, n: u64, r: &Scalar) -> Scalar {
        let mut acc = self.zero();
        let mut base = r.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.add(&base, &base);
            }
        }
        acc
    }

    /// The image of a natural-number literal, `n·1`.
    pub fn nat(self, n: &BigInt) -> Scalar {
        assert!(!n.is_negative(), "natural literal must be non-negative");
        match self {
            Semiring::Tropical => {
                if n.is_zero() {
                    Scalar::Inf
                } else {
                    self.one()
                }
            }
            _ => self.reduce(n.clone()),
        }
    }

    pub fn nat_u64(self, n: u64) -> Scalar {
        self.nat(&BigInt::from(n))
    }

    /// Embed a machine integer as a carrier value, if it is one.
    pub fn from_i64(self, n: i64) -> Result<Scalar, SemiringError> {
        self.parse_scalar(&n.to_string())
    }

    /// Parse a carrier value as written in files (`inf` is the tropical zero).
    pub fn parse_scalar(self, text: &str) -> Result<Scalar, SemiringError> {
        let bad = || SemiringError::Scalar {
            text: text.to_string(),
            semiring: self,
        };
        let t = text.trim();
        if t == "inf" {
            return if self == Semiring::Tropical { Ok(Scalar::Inf) } else { Err(bad()) };
        }
        let n: BigInt = t.parse().map_err(|_| bad())?;
        let ok = match self {
            Semiring::Int => true,
            Semiring::Nat | Semiring::Tropical => !n.is_negative(),
            Semiring::Bool => n.is_zero() || n.is_one(),
            Semiring::Mod(m) => !n.is_negative() && n < BigInt::from(m),
        };
        if ok {
            Ok(Scalar::Fin(n))
        } else {
            Err(bad())
        }
    }

    pub fn format_scalar(self, a: &Scalar) -> String {
        match a {
            Scalar::Fin(n) => n.to_string(),
            Scalar::Inf => "inf".to_string(),
        }
    }

    /// All carrier elements, for finite semirings.
    pub fn elements(self) -> Option<Vec<Scalar>> {
        match self {
            Semiring::Bool => Some(vec![Scalar::int(0), Scalar::int(1)]),
            Semiring::Mod(m) => Some((0..m).map(|k| Scalar::Fin(BigInt::from(k))).collect()),
            _ => None,
        }
    }

    pub fn carrier_size(self) -> Option<u64> {
        match self {
            Semiring::Bool => Some(2),
            Semiring::Mod(m) => Some(m),
            _ => None,
        }
    }

    /// The sampling window for random coefficients: the whole carrier when
    /// it is small, otherwise sixteen consecutive values.
    pub fn window(self) -> Vec<Scalar> {
        match self {
            Semiring::Nat => (0..16).map(Scalar::int).collect(),
            Semiring::Int => (-8..8).map(Scalar::int).collect(),
            Semiring::Bool => self.elements().unwrap(),
            Semiring::Mod(m) => (0..m.min(16)).map(|k| Scalar::Fin(BigInt::from(k))).collect(),
            Semiring::Tropical => {
                let mut w = vec![Scalar::Inf];
                w.extend((0..15).map(Scalar::int));
                w
            }
        }
    }

    /// Small machine-integer view, used for rendering decisions.
    pub fn to_i64(self, a: &Scalar) -> Option<i64> {
        a.as_bigint().and_then(|n| n.to_i64())
    }
}

impl fmt::Display for Semiring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Semiring::Nat => write!(f, "nat"),
            Semiring::Int => write!(f, "int"),
            Semiring::Bool => write!(f, "bool"),
            Semiring::Tropical => write!(f, "tropical"),
            Semiring::Mod(m) => write!(f, "mod:{m}"),
        }
    }
}

impl FromStr for Semiring {
    type Err = SemiringError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "nat" => Ok(Semiring::Nat),
            "int" => Ok(Semiring::Int),
            "bool" => Ok(Semiring::Bool),
            "tropical" => Ok(Semiring::Tropical),
            _ => match s.strip_prefix("mod:") {
                Some(m) => {
                    let m: u64 = m.parse().map_err(|_| SemiringError::Modulus(m.to_string()))?;
                    make_semiring(SemiringKind::IntegersMod, Some(m))
                }
                None => Err(SemiringError::UnknownKind(s.to_string())),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn all() -> Vec<Semiring> {
        vec![Semiring::Nat, Semiring::Int, Semiring::Bool, Semiring::Tropical, Semiring::Mod(5)]
    }

    #[test]
    fn boolean_is_idempotent() {
        let b = Semiring::Bool;
        assert_eq!(b.add(&b.one(), &b.one()), b.one());
    }

    #[test]
    fn tropical_is_min_plus() {
        let t = Semiring::Tropical;
        assert_eq!(t.add(&Scalar::int(2), &Scalar::int(3)), Scalar::int(2));
        assert_eq!(t.mul(&Scalar::int(2), &Scalar::int(3)), Scalar::int(5));
        assert_eq!(t.mul(&Scalar::Inf, &Scalar::int(3)), Scalar::Inf);
        assert_eq!(t.add(&Scalar::Inf, &Scalar::int(3)), Scalar::int(3));
    }

    #[test]
    fn modular_product() {
        let m = make_semiring(SemiringKind::IntegersMod, Some(5)).unwrap();
        assert_eq!(m.mul(&Scalar::int(3), &Scalar::int(4)), Scalar::int(2));
    }

    #[test]
    fn modulus_rules() {
        assert!(make_semiring(SemiringKind::IntegersMod, None).is_err());
        assert!(make_semiring(SemiringKind::IntegersMod, Some(1)).is_err());
        assert!(make_semiring(SemiringKind::Naturals, Some(3)).is_err());
        assert!("mod:1".parse::<Semiring>().is_err());
        assert!("reals".parse::<Semiring>().is_err());
    }

    #[test]
    fn selectors_round_trip() {
        for s in all() {
            assert_eq!(s.to_string().parse::<Semiring>().unwrap(), s);
        }
    }

    #[test]
    fn natural_action() {
        assert_eq!(Semiring::Nat.times(6, &Scalar::int(7)), Scalar::int(42));
        assert_eq!(Semiring::Bool.times(2, &Scalar::int(1)), Scalar::int(1));
        assert_eq!(Semiring::Tropical.times(5, &Scalar::int(3)), Scalar::int(3));
        assert_eq!(Semiring::Tropical.times(0, &Scalar::int(3)), Scalar::Inf);
        assert_eq!(Semiring::Mod(5).times(7, &Scalar::int(1)), Scalar::int(2));
    }

    #[test]
    fn no_overflow() {
        let n = Semiring::Nat;
        let big = n.times(u64::MAX, &n.times(u64::MAX, &n.one()));
        let expected = BigInt::from(u64::MAX) * BigInt::from(u64::MAX);
        assert_eq!(big, Scalar::Fin(expected));
    }

    #[test]
    fn negation_needs_negatives() {
        assert!(Semiring::Bool.neg(&Scalar::int(1)).is_err());
        assert_eq!(Semiring::Mod(5).neg(&Scalar::int(1)).unwrap(), Scalar::int(4));
    }

    #[test]
    fn finite_carriers_satisfy_axioms_exhaustively() {
        for s in [Semiring::Bool, Semiring::Mod(2), Semiring::Mod(5), Semiring::Mod(6)] {
            let els = s.elements().unwrap();
            for a in &els {
                assert_eq!(s.mul(a, &s.zero()), s.zero());
                assert_eq!(s.mul(a, &s.one()), *a);
                assert_eq!(s.add(a, &s.zero()), *a);
                for b in &els {
                    assert_eq!(s.add(a, b), s.add(b, a));
                    assert_eq!(s.mul(a, b), s.mul(b, a));
                    for c in &els {
                        assert_eq!(s.add(&s.add(a, b), c), s.add(a, &s.add(b, c)));
                        assert_eq!(s.mul(&s.mul(a, b), c), s.mul(a, &s.mul(b, c)));
                        assert_eq!(s.mul(a, &s.add(b, c)), s.add(&s.mul(a, b), &s.mul(a, c)));
                    }
                }
            }
        }
    }

    fn scalar_in(s: Semiring) -> impl Strategy<Value = Scalar> {
        let w = s.window();
        (0..w.len()).prop_map(move |i| w[i].clone())
    }

    fn triple() -> impl Strategy<Value = (Semiring, Scalar, Scalar, Scalar)> {
        prop::sample::select(vec![Semiring::Nat, Semiring::Int, Semiring::Tropical])
            .prop_flat_map(|s| (Just(s), scalar_in(s), scalar_in(s), scalar_in(s)))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn infinite_carriers_satisfy_axioms((s, a, b, c) in triple()) {
            prop_assert_eq!(s.add(&a, &b), s.add(&b, &a));
            prop_assert_eq!(s.mul(&a, &b), s.mul(&b, &a));
            prop_assert_eq!(s.add(&s.add(&a, &b), &c), s.add(&a, &s.add(&b, &c)));
            prop_assert_eq!(s.mul(&s.mul(&a, &b), &c), s.mul(&a, &s.mul(&b, &c)));
            prop_assert_eq!(s.mul(&a, &s.add(&b, &c)), s.add(&s.mul(&a, &b), &s.mul(&a, &c)));
            prop_assert_eq!(s.mul(&a, &s.zero()), s.zero());
            prop_assert_eq!(s.mul(&a, &s.one()), a.clone());
        }

        #[test]
        fn times_is_repeated_addition(n in 0u64..40, (s, a, _, _) in triple()) {
            let mut acc = s.zero();
            for _ in 0..n {
                acc = s.add(&acc, &a);
            }
            prop_assert_eq!(s.times(n, &a), acc);
        }
    }
}
