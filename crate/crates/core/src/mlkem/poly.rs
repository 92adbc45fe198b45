use std::ops::{Add, Sub};

use super::params::{N, Q};

/// Element of `Z_q[X]/(X^256 + 1)` in coefficient form.
#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial {
    coeffs: [u16; N],
}

/// Element of the same ring in NTT form. Kept as a distinct type so the two
/// representations can never be mixed in arithmetic.
#[derive(Clone, PartialEq, Eq)]
pub struct NttPolynomial {
    coeffs: [u16; N],
}

impl std::fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Polynomial({:?}..)", &self.coeffs[..8])
    }
}

impl std::fmt::Debug for NttPolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "NttPolynomial({:?}..)", &self.coeffs[..8])
    }
}

#[inline]
pub(crate) fn add_mod(a: u16, b: u16) -> u16 {
    let s = a + b;
    if s >= Q {
        s - Q
    } else {
        s
    }
}

#[inline]
pub(crate) fn sub_mod(a: u16, b: u16) -> u16 {
    if a >= b {
        a - b
    } else {
        a + Q - b
    }
}

#[inline]
pub(crate) fn mul_mod(a: u16, b: u16) -> u16 {
    ((a as u32 * b as u32) % Q as u32) as u16
}

/// Centered representative of `x mod q` in `(-q/2, q/2]`.
#[inline]
pub fn centered(x: u16) -> i32 {
    let x = x as i32;
    if x > (Q as i32) / 2 {
        x - Q as i32
    } else {
        x
    }
}

/// `|a - b|` measured around the ring `Z_q`.
#[inline]
pub fn centered_distance(a: u16, b: u16) -> u16 {
    let d = a.abs_diff(b);
    d.min(Q - d)
}

macro_rules! coeff_storage {
    ($t:ty) => {
        impl $t {
            pub fn zero() -> Self {
                Self { coeffs: [0; N] }
            }

            /// Builds from arbitrary integers, reducing each mod q.
            pub fn from_coeffs(coeffs: &[i64; N]) -> Self {
                let mut out = [0u16; N];
                for (o, &c) in out.iter_mut().zip(coeffs) {
                    *o = c.rem_euclid(Q as i64) as u16;
                }
                Self { coeffs: out }
            }

            pub(crate) fn from_reduced(coeffs: [u16; N]) -> Self {
                debug_assert!(coeffs.iter().all(|&c| c < Q));
                Self { coeffs }
            }

            pub fn coeffs(&self) -> &[u16; N] {
                &self.coeffs
            }
        }

        impl Add for &$t {
            type Output = $t;

            fn add(self, rhs: Self) -> $t {
                let mut out = self.clone();
                for (a, &b) in out.coeffs.iter_mut().zip(&rhs.coeffs) {
                    *a = add_mod(*a, b);
                }
                out
            }
        }

        impl Sub for &$t {
            type Output = $t;

            fn sub(self, rhs: Self) -> $t {
                let mut out = self.clone();
                for (a, &b) in out.coeffs.iter_mut().zip(&rhs.coeffs) {
                    *a = sub_mod(*a, b);
                }
                out
            }
        }
    };
}

coeff_storage!(Polynomial);
coeff_storage!(NttPolynomial);

impl Polynomial {
    /// Schoolbook product in `Z_q[X]/(X^256 + 1)`. Quadratic; used as an
    /// independent check of the NTT path.
    pub fn schoolbook_mul(&self, rhs: &Polynomial) -> Polynomial {
        let mut acc = [0i64; N];
        for i in 0..N {
            for j in 0..N {
                let prod = self.coeffs[i] as i64 * rhs.coeffs[j] as i64;
                if i + j < N {
                    acc[i + j] += prod;
                } else {
                    acc[i + j - N] -= prod;
                }
            }
        }
        Polynomial::from_coeffs(&acc)
    }
}

impl NttPolynomial {
    /// Accumulates `self += a * b` in the NTT domain.
    pub(crate) fn mul_acc(&mut self, a: &NttPolynomial, b: &NttPolynomial) {
        let prod = super::ntt::multiply_ntts(a, b);
        for (s, &p) in self.coeffs.iter_mut().zip(&prod.coeffs) {
            *s = add_mod(*s, p);
        }
    }
}

/// Dot product of two NTT-domain vectors.
pub(crate) fn inner_product(a: &[NttPolynomial], b: &[NttPolynomial]) -> NttPolynomial {
    let mut acc = NttPolynomial::zero();
    for (x, y) in a.iter().zip(b) {
        acc.mul_acc(x, y);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centered_representatives() {
        assert_eq!(centered(0), 0);
        assert_eq!(centered(1664), 1664);
        assert_eq!(centered(1665), -1664);
        assert_eq!(centered(Q - 1), -1);
        assert_eq!(centered_distance(Q - 1, 0), 1);
        assert_eq!(centered_distance(0, 1664), 1664);
        assert_eq!(centered_distance(0, 1665), 1664);
    }

    #[test]
    fn negacyclic_wrap() {
        // X^255 * X = X^256 = -1
        let mut a = [0i64; N];
        let mut b = [0i64; N];
        a[255] = 1;
        b[1] = 1;
        let p = Polynomial::from_coeffs(&a).schoolbook_mul(&Polynomial::from_coeffs(&b));
        assert_eq!(p.coeffs()[0], Q - 1);
        assert!(p.coeffs()[1..].iter().all(|&c| c == 0));
    }
}
