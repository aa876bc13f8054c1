//! The exact scalar used throughout the library: a rational or an element of
//! a cyclotomic field. Rationals embed into every cyclotomic field, so mixed
//! operands are promoted; two cyclotomic operands must share a conductor.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::cyclotomic::Cyclotomic;
use super::rational::{format_rational, parse_rational, Rational};
use crate::error::{Error, Result};

/// Operations shared by the scalar types that the exact linear algebra runs over.
pub trait Field: Clone + PartialEq + fmt::Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse; panics on zero.
    fn inv(&self) -> Self;
    fn conj(&self) -> Self;

    fn div(&self, other: &Self) -> Self {
        self.mul(&other.inv())
    }
}

impl Field for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Self {
        self.recip()
    }
    fn conj(&self) -> Self {
        self.clone()
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
}

/// Exact field element.
#[derive(Clone)]
pub enum Scalar {
    Rat(Rational),
    Cyc(Cyclotomic),
}

/// Which field a configuration lives over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Rational,
    Cyclotomic(u32),
}

impl FieldKind {
    pub fn is_complex(&self) -> bool {
        matches!(self, FieldKind::Cyclotomic(_))
    }

    pub fn conductor(&self) -> Option<u32> {
        match self {
            FieldKind::Rational => None,
            FieldKind::Cyclotomic(n) => Some(*n),
        }
    }

    /// Parses `rational` or `cyclotomic:N`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "rational" {
            return Ok(FieldKind::Rational);
        }
        if let Some(n) = s.strip_prefix("cyclotomic:") {
            let n: u32 = n
                .parse()
                .map_err(|_| Error::Parse(format!("bad conductor in {s:?}")))?;
            if n == 0 {
                return Err(Error::Parse("conductor must be positive".into()));
            }
            return Ok(FieldKind::Cyclotomic(n));
        }
        Err(Error::Parse(format!("unknown field {s:?}")))
    }

    /// Brings a scalar into this field (rationals are embedded).
    pub fn coerce(&self, s: &Scalar) -> Result<Scalar> {
        match (self, s) {
            (FieldKind::Rational, Scalar::Rat(_)) => Ok(s.clone()),
            (FieldKind::Rational, Scalar::Cyc(c)) => c
                .as_rational()
                .map(|q| Scalar::Rat(q.clone()))
                .ok_or_else(|| Error::FieldMismatch("non-rational entry in a rational configuration".into())),
            (FieldKind::Cyclotomic(n), Scalar::Rat(q)) => Ok(Scalar::Cyc(Cyclotomic::from_rational(*n, q.clone()))),
            (FieldKind::Cyclotomic(n), Scalar::Cyc(c)) => {
                if c.conductor() == *n {
                    Ok(s.clone())
                } else {
                    Err(Error::FieldMismatch(format!(
                        "conductor {} in a Q(ζ_{n}) configuration",
                        c.conductor()
                    )))
                }
            }
        }
    }
}

/// Result of the positivity test used for complex fan membership.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Positivity {
    Positive,
    Zero,
    Negative,
    NotRationalReal,
}

impl Scalar {
    pub fn rational(q: Rational) -> Self {
        Scalar::Rat(q)
    }

    pub fn from_int(v: i64) -> Self {
        Scalar::Rat(super::rational::int(v))
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Scalar::Rat(q) => Some(q),
            Scalar::Cyc(c) => c.as_rational(),
        }
    }

    pub fn conductor(&self) -> Option<u32> {
        match self {
            Scalar::Rat(_) => None,
            Scalar::Cyc(c) => Some(c.conductor()),
        }
    }

    /// Sign information for elements of the rational subfield.
    pub fn positivity(&self) -> Positivity {
        match self.as_rational() {
            None => Positivity::NotRationalReal,
            Some(q) if Zero::is_zero(q) => Positivity::Zero,
            Some(q) if q.is_positive() => Positivity::Positive,
            Some(_) => Positivity::Negative,
        }
    }

    /// Coefficients over the power basis of Q(ζ_N) (a rational maps to `[q, 0, …]`).
    pub fn coefficients(&self, field: FieldKind) -> Vec<Rational> {
        match (field, self) {
            (FieldKind::Rational, Scalar::Rat(q)) => vec![q.clone()],
            (FieldKind::Rational, Scalar::Cyc(c)) => {
                vec![c.as_rational().expect("non-rational scalar in rational field").clone()]
            }
            (FieldKind::Cyclotomic(n), s) => match field.coerce(s).expect("scalar outside field") {
                Scalar::Cyc(c) => {
                    debug_assert_eq!(c.conductor(), n);
                    c.coeffs().to_vec()
                }
                Scalar::Rat(_) => unreachable!(),
            },
        }
    }

    fn promote(a: &Cyclotomic, q: &Rational) -> Cyclotomic {
        Cyclotomic::from_rational(a.conductor(), q.clone())
    }
}

impl Field for Scalar {
    fn zero() -> Self {
        Scalar::Rat(<Rational as Zero>::zero())
    }
    fn one() -> Self {
        Scalar::Rat(<Rational as One>::one())
    }
    fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(q) => Zero::is_zero(q),
            Scalar::Cyc(c) => c.is_zero(),
        }
    }
    fn add(&self, other: &Self) -> Self {
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a + b),
            (Scalar::Cyc(a), Scalar::Cyc(b)) => Scalar::Cyc(a.add(b)),
            (Scalar::Cyc(a), Scalar::Rat(b)) => Scalar::Cyc(a.add(&Self::promote(a, b))),
            (Scalar::Rat(a), Scalar::Cyc(b)) => Scalar::Cyc(Self::promote(b, a).add(b)),
        }
    }
    fn sub(&self, other: &Self) -> Self {
        Field::add(self, &Field::neg(other))
    }
    fn mul(&self, other: &Self) -> Self {
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a * b),
            (Scalar::Cyc(a), Scalar::Cyc(b)) => Scalar::Cyc(a.mul(b)),
            (Scalar::Cyc(a), Scalar::Rat(b)) | (Scalar::Rat(b), Scalar::Cyc(a)) => Scalar::Cyc(a.scale(b)),
        }
    }
    fn neg(&self) -> Self {
        match self {
            Scalar::Rat(a) => Scalar::Rat(-a),
            Scalar::Cyc(a) => Scalar::Cyc(a.neg()),
        }
    }
    fn inv(&self) -> Self {
        match self {
            Scalar::Rat(a) => Scalar::Rat(a.recip()),
            Scalar::Cyc(a) => Scalar::Cyc(a.inv().expect("inverse of zero")),
        }
    }
    fn conj(&self) -> Self {
        match self {
            Scalar::Rat(_) => self.clone(),
            Scalar::Cyc(a) => Scalar::Cyc(a.conj()),
        }
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => a == b,
            (Scalar::Cyc(a), Scalar::Cyc(b)) => a == b,
            (Scalar::Cyc(c), Scalar::Rat(q)) | (Scalar::Rat(q), Scalar::Cyc(c)) => c.as_rational() == Some(q),
        }
    }
}

impl Eq for Scalar {}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(q) => write!(f, "{q}"),
            Scalar::Cyc(c) => write!(f, "{c:?}"),
        }
    }
}

impl From<Rational> for Scalar {
    fn from(q: Rational) -> Self {
        Scalar::Rat(q)
    }
}

impl From<Cyclotomic> for Scalar {
    fn from(c: Cyclotomic) -> Self {
        Scalar::Cyc(c)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                Field::$method(self, rhs)
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Field::$method(&self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Field::neg(self)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Field::neg(&self)
    }
}

/// Σ u_i · conj(v_i).
pub fn hermitian_dot<F: Field>(u: &[F], v: &[F]) -> Result<F> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            found: v.len(),
        });
    }
    let mut acc = F::zero();
    for (a, b) in u.iter().zip(v) {
        if a.is_zero() || b.is_zero() {
            continue;
        }
        acc = acc.add(&a.mul(&b.conj()));
    }
    Ok(acc)
}

/// Tri-state positivity report for a scalar.
pub fn is_positive_rational(s: &Scalar) -> Positivity {
    s.positivity()
}

#[derive(Serialize, Deserialize)]
struct CycRepr {
    #[serde(rename = "N")]
    n: u32,
    coeffs: Vec<String>,
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Scalar::Rat(q) => s.serialize_str(&format_rational(q)),
            Scalar::Cyc(c) => CycRepr {
                n: c.conductor(),
                coeffs: c.coeffs().iter().map(format_rational).collect(),
            }
            .serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Str(String),
            Int(i64),
            Cyc(CycRepr),
        }
        match Raw::deserialize(d)? {
            Raw::Str(s) => parse_rational(&s).map(Scalar::Rat).map_err(serde::de::Error::custom),
            Raw::Int(i) => Ok(Scalar::from_int(i)),
            Raw::Cyc(c) => {
                if c.n == 0 {
                    return Err(serde::de::Error::custom("conductor must be positive"));
                }
                let coeffs = c
                    .coeffs
                    .iter()
                    .map(|s| parse_rational(s))
                    .collect::<Result<Vec<_>>>()
                    .map_err(serde::de::Error::custom)?;
                Ok(Scalar::Cyc(Cyclotomic::new(c.n, coeffs)))
            }
        }
    }
}

impl Serialize for FieldKind {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct C {
            cyclotomic: u32,
        }
        match self {
            FieldKind::Rational => s.serialize_str("rational"),
            FieldKind::Cyclotomic(n) => C { cyclotomic: *n }.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for FieldKind {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct C {
            cyclotomic: u32,
        }
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Str(String),
            Cyc(C),
        }
        match Raw::deserialize(d)? {
            Raw::Str(s) => FieldKind::parse(&s).map_err(serde::de::Error::custom),
            Raw::Cyc(C { cyclotomic: 0 }) => Err(serde::de::Error::custom("conductor must be positive")),
            Raw::Cyc(C { cyclotomic }) => Ok(FieldKind::Cyclotomic(cyclotomic)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::{int, rat};

    fn gauss(n: u32, re: i64, im: i64) -> Scalar {
        let i = Cyclotomic::root_of_unity(n, (n / 4) as i64);
        Scalar::Cyc(Cyclotomic::from_rational(n, int(re)).add(&i.scale(&int(im))))
    }

    #[test]
    fn hermitian_dot_examples() {
        let one = Scalar::from_int(1);
        let zero = Scalar::from_int(0);
        assert_eq!(hermitian_dot(&[one.clone(), zero.clone()], &[one.clone(), zero]).unwrap(), one);
        let i = gauss(4, 0, 1);
        assert_eq!(hermitian_dot(&[i.clone()], &[i]).unwrap(), Scalar::from_int(1));
        let u = [Scalar::from_int(1), Scalar::from_int(2)];
        let v = [Scalar::from_int(3), Scalar::from_int(-1)];
        assert_eq!(hermitian_dot(&u, &v).unwrap(), Scalar::from_int(1));
        assert!(hermitian_dot(&u, &v[..1]).is_err());
    }

    #[test]
    fn positivity_examples() {
        assert_eq!(Scalar::Rat(rat(5, 3)).positivity(), Positivity::Positive);
        assert_eq!(gauss(4, 0, 1).positivity(), Positivity::NotRationalReal);
        let z2 = Scalar::Cyc(Cyclotomic::new(3, vec![int(-1), int(-1)]));
        assert_eq!(z2.positivity(), Positivity::NotRationalReal);
        assert_eq!(Scalar::Cyc(Cyclotomic::from_rational(3, int(-2))).positivity(), Positivity::Negative);
        assert_eq!(Scalar::from_int(0).positivity(), Positivity::Zero);
    }

    #[test]
    fn mixed_operands_promote() {
        let i = gauss(4, 0, 1);
        let s = &i + &Scalar::from_int(2);
        assert_eq!(s, gauss(4, 2, 1));
        assert_eq!(&i * &i, Scalar::from_int(-1));
        assert_eq!(Scalar::Cyc(Cyclotomic::from_rational(4, int(3))), Scalar::from_int(3));
    }

    #[test]
    fn json_forms() {
        let q = Scalar::Rat(rat(-3, 4));
        assert_eq!(serde_json::to_string(&q).unwrap(), "\"-3/4\"");
        let c = gauss(4, 2, 3);
        let js = serde_json::to_string(&c).unwrap();
        assert_eq!(js, r#"{"N":4,"coeffs":["2/1","3/1"]}"#);
        let back: Scalar = serde_json::from_str(&js).unwrap();
        assert_eq!(back, c);
        let f: FieldKind = serde_json::from_str(r#"{"cyclotomic":12}"#).unwrap();
        assert_eq!(f, FieldKind::Cyclotomic(12));
        assert_eq!(serde_json::to_string(&FieldKind::Rational).unwrap(), "\"rational\"");
        assert_eq!(FieldKind::parse("cyclotomic:4").unwrap(), FieldKind::Cyclotomic(4));
    }
}
