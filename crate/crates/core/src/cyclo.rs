//! Exact arithmetic in `Z[w, 1/sqrt2]` with `w = e^{i pi/4}`.
//!
//! A [`CycloNum`] is `(a + b w + c w^2 + d w^3) / sqrt2^k`. Values are kept in
//! canonical form (minimal `k`), so structural equality is value equality and
//! the type can be hashed.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Coefficients at or above this magnitude are outside the guaranteed
/// precision of [`CycloNum::to_approx`].
const APPROX_COEFF_BOUND: u64 = 1 << 40;
const APPROX_K_BOUND: u32 = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CycloError {
    #[error("value outside the guaranteed-precision range (coefficients < 2^40, k <= 64)")]
    Overflow,
    #[error("malformed cyclotomic literal: {0}")]
    Parse(String),
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CycloNum {
    c: [BigInt; 4],
    k: u32,
}

/// Multiply two polynomials in `w` modulo `w^4 + 1`.
fn poly_mul(x: &[BigInt; 4], y: &[BigInt; 4]) -> [BigInt; 4] {
    let mut out: [BigInt; 4] = Default::default();
    for (i, xi) in x.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        for (j, yj) in y.iter().enumerate() {
            if yj.is_zero() {
                continue;
            }
            let p = xi * yj;
            let e = i + j;
            if e < 4 {
                out[e] += p;
            } else {
                out[e - 4] -= p;
            }
        }
    }
    out
}

/// `x * (w - w^3)`, i.e. `x * sqrt2`.
fn times_sqrt2(x: &[BigInt; 4]) -> [BigInt; 4] {
    let [a, b, c, d] = x;
    [b - d, a + c, b + d, c - a]
}

impl CycloNum {
    pub fn new(
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        c: impl Into<BigInt>,
        d: impl Into<BigInt>,
        k: u32,
    ) -> Self {
        Self::from_parts([a.into(), b.into(), c.into(), d.into()], k)
    }

    pub fn from_parts(c: [BigInt; 4], k: u32) -> Self {
        let mut x = CycloNum { c, k };
        x.canonicalize();
        x
    }

    pub fn from_int(n: i64) -> Self {
        Self::new(n, 0, 0, 0, 0)
    }

    pub fn coeffs(&self) -> &[BigInt; 4] {
        &self.c
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// `w^e` for any integer `e`.
    pub fn omega_pow(e: i64) -> Self {
        let e = e.rem_euclid(8) as usize;
        let mut c: [BigInt; 4] = Default::default();
        if e < 4 {
            c[e] = BigInt::one();
        } else {
            c[e - 4] = -BigInt::one();
        }
        CycloNum { c, k: 0 }
    }

    pub fn i() -> Self {
        Self::omega_pow(2)
    }

    pub fn sqrt2() -> Self {
        Self::new(0, 1, 0, -1, 0)
    }

    pub fn inv_sqrt2() -> Self {
        Self::new(1, 0, 0, 0, 1)
    }

    fn canonicalize(&mut self) {
        if self.c.iter().all(Zero::is_zero) {
            self.k = 0;
            return;
        }
        while self.k > 0 {
            // x / sqrt2^k = (x sqrt2 / 2) / sqrt2^(k-1); legal when x*sqrt2 is even.
            let [a, b, c, d] = &self.c;
            if (a - c).is_even() && (b - d).is_even() {
                let y = times_sqrt2(&self.c);
                self.c = y.map(|v| v / 2);
                self.k -= 1;
            } else {
                break;
            }
        }
    }

    /// Bring `x` to denominator `sqrt2^k` with `k >= x.k`, without canonicalising.
    fn lift(&self, k: u32) -> [BigInt; 4] {
        let diff = k - self.k;
        let two_pow = BigInt::one() << (diff / 2);
        let mut c = self.c.clone().map(|v| v * &two_pow);
        if diff % 2 == 1 {
            c = times_sqrt2(&c);
        }
        c
    }

    pub fn conj(&self) -> Self {
        let [a, b, c, d] = &self.c;
        CycloNum {
            c: [a.clone(), -d, -c, -b],
            k: self.k,
        }
    }

    /// Image under the Galois automorphism `w -> w^j` for odd `j`.
    pub fn galois(&self, j: u32) -> Self {
        assert!(j % 2 == 1, "galois exponent must be odd");
        let mut acc = CycloNum::zero();
        for (i, ci) in self.c.iter().enumerate() {
            if ci.is_zero() {
                continue;
            }
            let term = CycloNum::omega_pow((i as i64) * j as i64) * CycloNum::from_parts([ci.clone(), 0.into(), 0.into(), 0.into()], 0);
            acc = acc + term;
        }
        // sqrt2 = w - w^3 maps to w^j - w^{3j} = sign * sqrt2.
        let sign_flip = matches!(j % 8, 3 | 5);
        let mut den = CycloNum::one();
        for _ in 0..self.k {
            den = den * CycloNum::inv_sqrt2();
        }
        let out = acc * den;
        if sign_flip && self.k % 2 == 1 {
            -out
        } else {
            out
        }
    }

    /// Float value, refusing inputs whose precision is not guaranteed.
    pub fn to_approx(&self) -> Result<Complex64, CycloError> {
        let bound = BigInt::from(APPROX_COEFF_BOUND);
        if self.k > APPROX_K_BOUND || self.c.iter().any(|v| v.abs() >= bound) {
            return Err(CycloError::Overflow);
        }
        Ok(self.approx_value())
    }

    /// Float value without range checks (lossy for huge coefficients).
    pub fn approx_value(&self) -> Complex64 {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let basis = [
            Complex64::new(1.0, 0.0),
            Complex64::new(h, h),
            Complex64::new(0.0, 1.0),
            Complex64::new(-h, h),
        ];
        let mut z = Complex64::new(0.0, 0.0);
        for (ci, w) in self.c.iter().zip(basis) {
            z += w * ci.to_f64().unwrap_or(f64::NAN);
        }
        z * h.powi(self.k as i32)
    }

    /// Exact value as an element of the field `Q(w)`.
    pub fn to_field(&self) -> CycloField {
        let c = if self.k % 2 == 1 {
            times_sqrt2(&self.c)
        } else {
            self.c.clone()
        };
        let den = BigInt::one() << self.k.div_ceil(2);
        CycloField {
            c: c.map(|v| BigRational::new(v, den.clone())),
        }
    }
}

impl Zero for CycloNum {
    fn zero() -> Self {
        CycloNum {
            c: Default::default(),
            k: 0,
        }
    }
    fn is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }
}

impl One for CycloNum {
    fn one() -> Self {
        Self::from_int(1)
    }
}

impl Add for &CycloNum {
    type Output = CycloNum;
    fn add(self, rhs: &CycloNum) -> CycloNum {
        let k = self.k.max(rhs.k);
        let x = self.lift(k);
        let y = rhs.lift(k);
        let [a, b, c, d] = x;
        let [e, f, g, h] = y;
        CycloNum::from_parts([a + e, b + f, c + g, d + h], k)
    }
}

impl Add for CycloNum {
    type Output = CycloNum;
    fn add(self, rhs: CycloNum) -> CycloNum {
        &self + &rhs
    }
}

impl Neg for CycloNum {
    type Output = CycloNum;
    fn neg(self) -> CycloNum {
        CycloNum {
            c: self.c.map(|v| -v),
            k: self.k,
        }
    }
}

impl Sub for CycloNum {
    type Output = CycloNum;
    fn sub(self, rhs: CycloNum) -> CycloNum {
        &self + &(-rhs)
    }
}

impl Mul for &CycloNum {
    type Output = CycloNum;
    fn mul(self, rhs: &CycloNum) -> CycloNum {
        if self.is_zero() || rhs.is_zero() {
            return CycloNum::zero();
        }
        CycloNum::from_parts(poly_mul(&self.c, &rhs.c), self.k + rhs.k)
    }
}

impl Mul for CycloNum {
    type Output = CycloNum;
    fn mul(self, rhs: CycloNum) -> CycloNum {
        &self * &rhs
    }
}

impl fmt::Display for CycloNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = &self.c;
        write!(f, "(({a}) + ({b})w + ({c})w^2 + ({d})w^3)/sqrt2^{}", self.k)
    }
}

impl FromStr for CycloNum {
    type Err = CycloError;

    /// Parses the form produced by `Display`; whitespace is ignored.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let err = || CycloError::Parse(s.to_string());
        let mut rest = compact.as_str();
        let expect = |lit: &str, rest: &mut &str| -> Result<(), CycloError> {
            *rest = rest.strip_prefix(lit).ok_or_else(err)?;
            Ok(())
        };
        let take_int = |rest: &mut &str| -> Result<BigInt, CycloError> {
            let end = rest
                .char_indices()
                .find(|&(i, ch)| !(ch.is_ascii_digit() || (i == 0 && ch == '-')))
                .map(|(i, _)| i)
                .unwrap_or(rest.len());
            let v = rest[..end].parse::<BigInt>().map_err(|_| err())?;
            *rest = &rest[end..];
            Ok(v)
        };
        expect("((", &mut rest)?;
        let a = take_int(&mut rest)?;
        expect(")+(", &mut rest)?;
        let b = take_int(&mut rest)?;
        expect(")w+(", &mut rest)?;
        let c = take_int(&mut rest)?;
        expect(")w^2+(", &mut rest)?;
        let d = take_int(&mut rest)?;
        expect(")w^3)/sqrt2^", &mut rest)?;
        let k: u32 = rest.parse().map_err(|_| err())?;
        Ok(CycloNum::from_parts([a, b, c, d], k))
    }
}

/// Exact element of the cyclotomic field `Q(w)`, basis `1, w, w^2, w^3`.
///
/// Used where division is needed (projective canonical forms); every
/// nonzero element is invertible.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CycloField {
    c: [BigRational; 4],
}

impl CycloField {
    pub fn zero() -> Self {
        CycloField {
            c: Default::default(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }

    pub fn coeffs(&self) -> &[BigRational; 4] {
        &self.c
    }

    pub fn sub(&self, rhs: &CycloField) -> CycloField {
        CycloField {
            c: std::array::from_fn(|i| &self.c[i] - &rhs.c[i]),
        }
    }

    pub fn mul(&self, rhs: &CycloField) -> CycloField {
        let mut out: [BigRational; 4] = Default::default();
        for (i, x) in self.c.iter().enumerate() {
            for (j, y) in rhs.c.iter().enumerate() {
                let p = x * y;
                if i + j < 4 {
                    out[i + j] += p;
                } else {
                    out[i + j - 4] -= p;
                }
            }
        }
        CycloField { c: out }
    }

    fn galois(&self, j: usize) -> CycloField {
        let mut out: [BigRational; 4] = Default::default();
        for (i, x) in self.c.iter().enumerate() {
            let e = (i * j) % 8;
            if e < 4 {
                out[e] += x;
            } else {
                out[e - 4] -= x;
            }
        }
        CycloField { c: out }
    }

    /// Multiplicative inverse via the product of Galois conjugates.
    pub fn inverse(&self) -> Option<CycloField> {
        if self.is_zero() {
            return None;
        }
        let others = self.galois(3).mul(&self.galois(5)).mul(&self.galois(7));
        let norm = self.mul(&others);
        // The norm is rational: only the constant coefficient survives.
        debug_assert!(norm.c[1..].iter().all(Zero::is_zero));
        let n = norm.c[0].clone();
        Some(CycloField {
            c: others.c.map(|v| v / &n),
        })
    }

    pub fn div(&self, rhs: &CycloField) -> Option<CycloField> {
        rhs.inverse().map(|inv| self.mul(&inv))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(z: Complex64, re: f64, im: f64) -> bool {
        (z.re - re).abs() < 1e-12 && (z.im - im).abs() < 1e-12
    }

    #[test]
    fn additive_inverse_is_zero() {
        let s = CycloNum::from_int(1) + CycloNum::from_int(-1);
        assert_eq!(s, CycloNum::zero());
        assert_eq!(s.k(), 0);
    }

    #[test]
    fn omega_plus_omega_cubed() {
        let s = CycloNum::omega_pow(1) + CycloNum::omega_pow(3);
        // Minimal-k canonical form of i*sqrt2.
        assert_eq!(s, CycloNum::new(0, 1, 0, 1, 0));
        assert_eq!(CycloNum::new(0, 0, 2, 0, 1), s);
        assert!(close(s.to_approx().unwrap(), 0.0, std::f64::consts::SQRT_2));
    }

    #[test]
    fn two_over_sqrt2_is_sqrt2() {
        let h = CycloNum::new(1, 0, 0, 0, 1);
        let s = &h + &h;
        assert_eq!(s, CycloNum::new(0, 1, 0, -1, 0));
        assert!(close(s.to_approx().unwrap(), std::f64::consts::SQRT_2, 0.0));
    }

    #[test]
    fn products() {
        assert_eq!(CycloNum::i() * CycloNum::i(), CycloNum::from_int(-1));
        let half = CycloNum::inv_sqrt2() * CycloNum::inv_sqrt2();
        assert_eq!(half, CycloNum::new(1, 0, 0, 0, 2));
        assert_eq!(CycloNum::omega_pow(1) * CycloNum::omega_pow(7), CycloNum::one());
        assert_eq!(CycloNum::omega_pow(7), CycloNum::new(0, 0, 0, -1, 0));
    }

    #[test]
    fn conjugation() {
        assert_eq!(CycloNum::i().conj(), -CycloNum::i());
        let r = CycloNum::new(3, 0, 0, 0, 1);
        assert_eq!(r.conj(), r);
        assert_eq!(CycloNum::omega_pow(1).conj(), CycloNum::new(0, 0, 0, -1, 0));
    }

    #[test]
    fn approximations() {
        assert!(close(CycloNum::one().to_approx().unwrap(), 1.0, 0.0));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(close(CycloNum::omega_pow(1).to_approx().unwrap(), h, h));
        assert!(close(CycloNum::new(0, 0, 1, 0, 1).to_approx().unwrap(), 0.0, h));
        let big = CycloNum::new(BigInt::one() << 41, 0, 0, 0, 0);
        assert_eq!(big.to_approx(), Err(CycloError::Overflow));
    }

    #[test]
    fn text_round_trip() {
        let x = CycloNum::new(-3, 5, 0, 7, 3);
        let s = x.to_string();
        assert_eq!(s, "((-3) + (5)w + (0)w^2 + (7)w^3)/sqrt2^3");
        assert_eq!(s.parse::<CycloNum>().unwrap(), x);
        assert!("((1) + (2)w)/sqrt2^0".parse::<CycloNum>().is_err());
    }

    #[test]
    fn galois_fixes_rationals_and_maps_sqrt2() {
        let s = CycloNum::sqrt2();
        assert_eq!(s.galois(3), -s.clone());
        assert_eq!(s.galois(7), s);
        assert_eq!(CycloNum::inv_sqrt2().galois(5), -CycloNum::inv_sqrt2());
    }

    #[test]
    fn field_inverse() {
        let x = CycloNum::new(3, 1, 0, -2, 1).to_field();
        let inv = x.inverse().unwrap();
        let one = CycloNum::one().to_field();
        assert_eq!(x.mul(&inv), one);
        assert!(CycloField::zero().inverse().is_none());
    }
}
