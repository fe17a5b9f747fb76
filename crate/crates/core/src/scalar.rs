//! Scalar abstraction shared by the exact and floating-point backends.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{Float, FloatConst, One, Zero};

use crate::cyclo::CycloNum;
use crate::diagram::Phase;

/// Ring of matrix entries used by evaluation.
///
/// Implemented by [`CycloNum`] (exact) and by `Complex<T>` for any float `T`.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// Whether equality of values is exact.
    const EXACT: bool;

    fn conj(&self) -> Self;

    /// `e^{i pi e / 4}`.
    fn omega_pow(e: i64) -> Self;

    fn inv_sqrt2() -> Self;

    /// `e^{i phi}` for a spider phase, or `None` if the backend cannot
    /// represent it.
    fn from_phase(p: Phase) -> Option<Self>;

    /// Whether `a = z b` for some nonzero `z` (tolerance ignored when exact).
    fn proportional(a: &[Self], b: &[Self], tol: f64) -> bool;

    /// Matrix text rendering of one entry.
    fn render(&self) -> String;
}

impl Scalar for CycloNum {
    const EXACT: bool = true;

    fn conj(&self) -> Self {
        CycloNum::conj(self)
    }

    fn omega_pow(e: i64) -> Self {
        CycloNum::omega_pow(e)
    }

    fn inv_sqrt2() -> Self {
        CycloNum::inv_sqrt2()
    }

    fn from_phase(p: Phase) -> Option<Self> {
        match p {
            Phase::C4(k) => Some(CycloNum::omega_pow(2 * k as i64)),
            Phase::U1(_) => None,
        }
    }

    fn proportional(a: &[Self], b: &[Self], _tol: f64) -> bool {
        if a.len() != b.len() {
            return false;
        }
        let Some(p) = b.iter().position(|v| !v.is_zero()) else {
            return a.iter().all(Zero::is_zero);
        };
        if a[p].is_zero() {
            return false;
        }
        a.iter().zip(b).all(|(x, y)| &a[p] * y == &b[p] * x)
    }

    fn render(&self) -> String {
        self.to_string()
    }
}

impl<T> Scalar for Complex<T>
where
    T: Float + FloatConst + Debug + Send + Sync + 'static,
{
    const EXACT: bool = false;

    fn conj(&self) -> Self {
        Complex::conj(self)
    }

    fn omega_pow(e: i64) -> Self {
        let h = T::FRAC_1_SQRT_2();
        let (o, z) = (T::one(), T::zero());
        match e.rem_euclid(8) {
            0 => Complex::new(o, z),
            1 => Complex::new(h, h),
            2 => Complex::new(z, o),
            3 => Complex::new(-h, h),
            4 => Complex::new(-o, z),
            5 => Complex::new(-h, -h),
            6 => Complex::new(z, -o),
            _ => Complex::new(h, -h),
        }
    }

    fn inv_sqrt2() -> Self {
        Complex::new(T::FRAC_1_SQRT_2(), T::zero())
    }

    fn from_phase(p: Phase) -> Option<Self> {
        // Both groups go through the same angle so that C4 and its U1 image
        // evaluate bit-identically.
        let angle = T::from(p.angle())?;
        Some(Complex::from_polar(T::one(), angle))
    }

    fn proportional(a: &[Self], b: &[Self], tol: f64) -> bool {
        if a.len() != b.len() {
            return false;
        }
        let tol = T::from(tol).unwrap_or_else(T::epsilon);
        let norm = |v: &[Self]| v.iter().map(|z| z.norm()).fold(T::zero(), T::max);
        let (amax, bmax) = (norm(a), norm(b));
        match (amax <= tol, bmax <= tol) {
            (true, true) => return true,
            (true, false) | (false, true) => return false,
            _ => {}
        }
        let p = (0..b.len())
            .max_by(|&i, &j| b[i].norm().partial_cmp(&b[j].norm()).unwrap())
            .unwrap();
        if a[p].norm() <= tol * amax {
            return false;
        }
        let (za, zb) = (a[p], b[p]);
        a.iter()
            .zip(b)
            .all(|(x, y)| (*x / za - *y / zb).norm() <= tol)
    }

    fn render(&self) -> String {
        format!("{:?}{:+?}j", self.re, self.im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn float_omega_matches_exact() {
        for e in -8..16 {
            let x = <Complex64 as Scalar>::omega_pow(e);
            let y = CycloNum::omega_pow(e).to_approx().unwrap();
            assert!((x - y).norm() < 1e-15);
        }
    }

    #[test]
    fn exact_proportionality() {
        let a = vec![CycloNum::one(), CycloNum::i()];
        let w = CycloNum::omega_pow(1);
        let b: Vec<_> = a.iter().map(|x| x * &w).collect();
        assert!(CycloNum::proportional(&a, &b, 0.0));
        let c = vec![CycloNum::one(), -CycloNum::i()];
        assert!(!CycloNum::proportional(&a, &c, 0.0));
        let z = vec![CycloNum::zero(); 2];
        assert!(CycloNum::proportional(&z, &z, 0.0));
        assert!(!CycloNum::proportional(&a, &z, 0.0));
    }

    #[test]
    fn float_proportionality() {
        let a = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)];
        let z = Complex64::new(0.3, -2.0);
        let b = [a[0] * z, a[1] * z];
        assert!(Complex64::proportional(&a, &b, 1e-9));
        let c = [a[0], -a[1]];
        assert!(!Complex64::proportional(&a, &c, 1e-9));
    }
}
