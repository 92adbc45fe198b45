//! Number-theoretic transform over `Z_3329`, following FIPS 203 Algorithms
//! 9-12: seven layers of Cooley-Tukey butterflies, leaving 128 degree-one
//! residues that are multiplied pairwise modulo `X^2 - gamma_i`.

use super::params::{N, Q};
use super::poly::{add_mod, mul_mod, sub_mod, NttPolynomial, Polynomial};

/// Primitive 256-th root of unity mod q.
pub const ZETA: u16 = 17;

const fn pow_mod(base: u32, mut exp: u32) -> u16 {
    let q = Q as u32;
    let mut acc = 1u32;
    let mut b = base % q;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % q;
        }
        b = b * b % q;
        exp >>= 1;
    }
    acc as u16
}

const fn bitrev7(x: u32) -> u32 {
    let mut r = 0;
    let mut i = 0;
    while i < 7 {
        r |= ((x >> i) & 1) << (6 - i);
        i += 1;
    }
    r
}

const ZETAS: [u16; 128] = {
    let mut t = [0u16; 128];
    let mut i = 0;
    while i < 128 {
        t[i] = pow_mod(ZETA as u32, bitrev7(i as u32));
        i += 1;
    }
    t
};

const GAMMAS: [u16; 128] = {
    let mut t = [0u16; 128];
    let mut i = 0;
    while i < 128 {
        t[i] = pow_mod(ZETA as u32, 2 * bitrev7(i as u32) + 1);
        i += 1;
    }
    t
};

/// 128^{-1} mod q.
const N_INV: u16 = 3303;

pub fn ntt(p: &Polynomial) -> NttPolynomial {
    let mut f = *p.coeffs();
    let mut k = 1;
    let mut len = 128;
    while len >= 2 {
        for start in (0..N).step_by(2 * len) {
            let zeta = ZETAS[k];
            k += 1;
            for j in start..start + len {
                let t = mul_mod(zeta, f[j + len]);
                f[j + len] = sub_mod(f[j], t);
                f[j] = add_mod(f[j], t);
            }
        }
        len /= 2;
    }
    NttPolynomial::from_reduced(f)
}

pub fn intt(p: &NttPolynomial) -> Polynomial {
    let mut f = *p.coeffs();
    let mut k = 127;
    let mut len = 2;
    while len <= 128 {
        for start in (0..N).step_by(2 * len) {
            let zeta = ZETAS[k];
            k -= 1;
            for j in start..start + len {
                let t = f[j];
                f[j] = add_mod(t, f[j + len]);
                f[j + len] = mul_mod(zeta, sub_mod(f[j + len], t));
            }
        }
        len *= 2;
    }
    for c in f.iter_mut() {
        *c = mul_mod(*c, N_INV);
    }
    Polynomial::from_reduced(f)
}

pub(crate) fn multiply_ntts(a: &NttPolynomial, b: &NttPolynomial) -> NttPolynomial {
    let (a, b) = (a.coeffs(), b.coeffs());
    let mut out = [0u16; N];
    for i in 0..128 {
        let (a0, a1, b0, b1) = (a[2 * i], a[2 * i + 1], b[2 * i], b[2 * i + 1]);
        out[2 * i] = add_mod(mul_mod(a0, b0), mul_mod(mul_mod(a1, b1), GAMMAS[i]));
        out[2 * i + 1] = add_mod(mul_mod(a0, b1), mul_mod(a1, b0));
    }
    NttPolynomial::from_reduced(out)
}

/// Ring product computed through the NTT.
pub fn ntt_mul(a: &Polynomial, b: &Polynomial) -> Polynomial {
    intt(&multiply_ntts(&ntt(a), &ntt(b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_poly() -> impl Strategy<Value = Polynomial> {
        proptest::collection::vec(0i64..Q as i64, N).prop_map(|v| {
            let mut a = [0i64; N];
            a.copy_from_slice(&v);
            Polynomial::from_coeffs(&a)
        })
    }

    #[test]
    fn zeta_is_primitive_256th_root() {
        // Direct exponentiation, independent of the table builder.
        let mut acc: u64 = 1;
        for _ in 0..128 {
            acc = acc * 17 % 3329;
        }
        assert_eq!(acc, 3328);
        assert_eq!(N_INV as u32 * 128 % Q as u32, 1);
    }

    #[test]
    fn zero_maps_to_zero() {
        let z = ntt(&Polynomial::zero());
        assert!(z.coeffs().iter().all(|&c| c == 0));
    }

    #[test]
    fn known_table_entries() {
        assert_eq!(ZETAS[0], 1);
        assert_eq!(ZETAS[1], 1729);
        assert_eq!(ZETAS[2], 2580);
        assert_eq!(ZETAS[127], 2154);
        assert_eq!(GAMMAS[0], 17);
        assert_eq!(GAMMAS[1], Q - 17);
    }

    #[test]
    fn round_trip_on_random_polynomials() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let mut a = [0i64; N];
            for c in a.iter_mut() {
                *c = rng.gen_range(0..Q as i64);
            }
            let p = Polynomial::from_coeffs(&a);
            assert_eq!(intt(&ntt(&p)), p);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn ntt_product_matches_schoolbook(a in arb_poly(), b in arb_poly()) {
            prop_assert_eq!(ntt_mul(&a, &b), a.schoolbook_mul(&b));
        }
    }
}
