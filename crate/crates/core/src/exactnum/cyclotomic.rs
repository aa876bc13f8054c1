//! Elements of the cyclotomic field Q(ζ_N) in the power basis
//! 1, ζ, …, ζ^{φ(N)−1}, reduced modulo the N-th cyclotomic polynomial.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::matrix::ExactMatrix;
use super::rational::Rational;

/// Integer polynomial, coefficients from the constant term upward.
pub type IntPoly = Vec<BigInt>;

/// Returns Φ_N, obtained by dividing x^N − 1 by Φ_d for every proper divisor d of N.
pub fn cyclotomic_poly(n: u32) -> IntPoly {
    assert!(n >= 1, "conductor must be positive");
    static CACHE: OnceLock<Mutex<HashMap<u32, IntPoly>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&n) {
        return p.clone();
    }
    let mut num: IntPoly = vec![BigInt::zero(); n as usize + 1];
    num[0] = BigInt::from(-1);
    num[n as usize] = BigInt::one();
    for d in 1..n {
        if n.is_multiple_of(d) {
            num = div_monic(&num, &cyclotomic_poly(d));
        }
    }
    cache.lock().unwrap().insert(n, num.clone());
    num
}

/// Exact division by a monic divisor; panics if the remainder is non-zero.
fn div_monic(num: &IntPoly, den: &IntPoly) -> IntPoly {
    let dn = den.len() - 1;
    debug_assert!(den[dn].is_one());
    let mut rem = num.clone();
    if rem.len() <= dn {
        return vec![BigInt::zero()];
    }
    let mut quot = vec![BigInt::zero(); rem.len() - dn];
    for k in (0..quot.len()).rev() {
        let c = rem[k + dn].clone();
        if c.is_zero() {
            continue;
        }
        for (j, dc) in den.iter().enumerate() {
            rem[k + j] -= &c * dc;
        }
        quot[k] = c;
    }
    assert!(rem.iter().all(|c| c.is_zero()), "non-exact cyclotomic division");
    quot
}

/// Euler's totient.
pub fn totient(n: u32) -> usize {
    cyclotomic_poly(n).len() - 1
}

/// Per-conductor data: degree and reduced powers ζ^e for 0 ≤ e < N.
#[derive(Debug)]
struct Context {
    degree: usize,
    powers: Vec<Vec<Rational>>,
}

fn context(n: u32) -> Arc<Context> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Context>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(c) = cache.lock().unwrap().get(&n) {
        return c.clone();
    }
    let phi = cyclotomic_poly(n);
    let degree = phi.len() - 1;
    let mut powers = Vec::with_capacity(n as usize);
    let mut cur = vec![Rational::zero(); degree];
    cur[0] = Rational::one();
    for _ in 0..n {
        powers.push(cur.clone());
        // multiply by ζ: shift up, then reduce ζ^degree = −Σ φ_k ζ^k
        let top = cur[degree - 1].clone();
        for k in (1..degree).rev() {
            cur[k] = cur[k - 1].clone();
        }
        cur[0] = Rational::zero();
        if !top.is_zero() {
            for (k, slot) in cur.iter_mut().enumerate() {
                *slot -= &top * Rational::from_integer(phi[k].clone());
            }
        }
    }
    let ctx = Arc::new(Context { degree, powers });
    cache.lock().unwrap().insert(n, ctx.clone());
    ctx
}

/// An element of Q(ζ_N).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Cyclotomic {
    conductor: u32,
    coeffs: Vec<Rational>,
}

impl Cyclotomic {
    /// Builds an element from power-basis coefficients; longer inputs are
    /// reduced, shorter ones padded with zeros.
    pub fn new(conductor: u32, coeffs: Vec<Rational>) -> Self {
        let ctx = context(conductor);
        if coeffs.len() <= ctx.degree {
            let mut c = coeffs;
            c.resize(ctx.degree, Rational::zero());
            return Cyclotomic { conductor, coeffs: c };
        }
        let mut out = vec![Rational::zero(); ctx.degree];
        for (e, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let p = &ctx.powers[e % conductor as usize];
            for (slot, pc) in out.iter_mut().zip(p) {
                if !pc.is_zero() {
                    *slot += c * pc;
                }
            }
        }
        Cyclotomic { conductor, coeffs: out }
    }

    pub fn from_rational(conductor: u32, q: Rational) -> Self {
        Self::new(conductor, vec![q])
    }

    pub fn zero(conductor: u32) -> Self {
        Self::new(conductor, Vec::new())
    }

    pub fn one(conductor: u32) -> Self {
        Self::from_rational(conductor, Rational::one())
    }

    /// ζ_N^e for any integer exponent.
    pub fn root_of_unity(conductor: u32, exponent: i64) -> Self {
        let ctx = context(conductor);
        let e = exponent.rem_euclid(conductor as i64) as usize;
        Cyclotomic {
            conductor,
            coeffs: ctx.powers[e].clone(),
        }
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// The rational value if the element lies in Q.
    pub fn as_rational(&self) -> Option<&Rational> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    fn check(&self, other: &Self) {
        assert_eq!(
            self.conductor, other.conductor,
            "cyclotomic elements from different conductors"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Cyclotomic { conductor: self.conductor, coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check(other);
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Cyclotomic { conductor: self.conductor, coeffs }
    }

    pub fn neg(&self) -> Self {
        Cyclotomic {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }

    pub fn scale(&self, q: &Rational) -> Self {
        Cyclotomic {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|a| a * q).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check(other);
        let deg = self.coeffs.len();
        let mut prod = vec![Rational::zero(); 2 * deg - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        Self::new(self.conductor, prod)
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if let Some(q) = self.as_rational() {
            return Some(Self::from_rational(self.conductor, q.recip()));
        }
        // Solve (multiplication-by-self) · x = 1 in the power basis.
        let deg = self.coeffs.len();
        let mut m = ExactMatrix::<Rational>::zeros(deg, deg);
        for e in 0..deg {
            let col = self.mul(&Self::root_of_unity(self.conductor, e as i64));
            for (row, c) in col.coeffs.into_iter().enumerate() {
                m.set(row, e, c);
            }
        }
        let mut rhs = vec![Rational::zero(); deg];
        rhs[0] = Rational::one();
        let x = m.solve(&rhs)?;
        Some(Cyclotomic {
            conductor: self.conductor,
            coeffs: x,
        })
    }

    /// Complex conjugation ζ ↦ ζ^{N−1}.
    pub fn conj(&self) -> Self {
        let n = self.conductor as i64;
        let mut out = Self::zero(self.conductor);
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let p = Self::root_of_unity(self.conductor, (n - 1) * k as i64);
            out = out.add(&p.scale(c));
        }
        out
    }
}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cyc{}(", self.conductor)?;
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}·ζ")?,
                _ => write!(f, "{c}·ζ^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, ")")
    }
}

/// Conductor used for complex computations with r-th roots of unity: lcm(4, r).
pub fn conductor_for(r: usize) -> u32 {
    (4u32).lcm(&(r as u32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::{int, rat};

    fn poly(v: &[i64]) -> IntPoly {
        v.iter().map(|&c| BigInt::from(c)).collect()
    }

    /// Schoolbook integer polynomial product, independent of the cached division.
    fn poly_mul(a: &IntPoly, b: &IntPoly) -> IntPoly {
        let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    }

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_poly(1), poly(&[-1, 1]));
        assert_eq!(cyclotomic_poly(4), poly(&[1, 0, 1]));
        assert_eq!(cyclotomic_poly(12), poly(&[1, 0, -1, 0, 1]));
    }

    #[test]
    fn phi_12_times_divisor_polys_is_x12_minus_1() {
        // Oracle: Φ_1Φ_2Φ_3Φ_4Φ_6Φ_12 with hand-written factors.
        let factors = [
            poly(&[-1, 1]),
            poly(&[1, 1]),
            poly(&[1, 1, 1]),
            poly(&[1, 0, 1]),
            poly(&[1, -1, 1]),
            cyclotomic_poly(12),
        ];
        let mut prod = poly(&[1]);
        for f in &factors {
            prod = poly_mul(&prod, f);
        }
        let mut expected = vec![BigInt::zero(); 13];
        expected[0] = BigInt::from(-1);
        expected[12] = BigInt::one();
        assert_eq!(prod, expected);
    }

    #[test]
    fn totients() {
        for (n, phi) in [(1, 1), (2, 1), (3, 2), (4, 2), (5, 4), (6, 2), (12, 4), (20, 8)] {
            assert_eq!(totient(n), phi, "φ({n})");
        }
    }

    #[test]
    fn conj_examples() {
        let i = Cyclotomic::new(4, vec![int(0), int(1)]);
        assert_eq!(i.conj(), Cyclotomic::new(4, vec![int(0), int(-1)]));
        let z = Cyclotomic::root_of_unity(3, 1);
        assert_eq!(z.conj(), Cyclotomic::new(3, vec![int(-1), int(-1)]));
        let q = Cyclotomic::from_rational(5, rat(3, 2));
        assert_eq!(q.conj(), q);
    }

    #[test]
    fn roots_of_unity_have_order_n() {
        for n in [3u32, 4, 5, 8, 12] {
            let z = Cyclotomic::root_of_unity(n, 1);
            let mut p = Cyclotomic::one(n);
            for k in 1..=n {
                p = p.mul(&z);
                assert_eq!(p == Cyclotomic::one(n), k == n, "ζ_{n}^{k}");
            }
        }
    }

    #[test]
    fn inverse_of_one_plus_zeta() {
        let a = Cyclotomic::new(5, vec![int(1), int(1)]);
        let b = a.inv().unwrap();
        assert_eq!(a.mul(&b), Cyclotomic::one(5));
        assert!(Cyclotomic::zero(5).inv().is_none());
    }

    #[test]
    fn conductor_choice() {
        assert_eq!(conductor_for(2), 4);
        assert_eq!(conductor_for(3), 12);
        assert_eq!(conductor_for(4), 4);
        assert_eq!(conductor_for(5), 20);
    }
}
