//! Index arithmetic modulo the local dimension.
//!
//! Every cyclic-shift and phase-exponent computation routes through these
//! helpers so the whole crate shares one convention for a ⊕ b and a ⊖ b.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::TAU;

/// a ⊕ b mod d.
pub fn add_mod(a: usize, b: usize, d: usize) -> usize {
    (a + b) % d
}

/// a ⊖ b mod d.
pub fn sub_mod(a: usize, b: usize, d: usize) -> usize {
    (a + d - b % d) % d
}

/// a · b mod d.
pub fn mul_mod(a: usize, b: usize, d: usize) -> usize {
    (a * b) % d
}

/// exp(2πi k / d), the k-th power of the principal d-th root of unity.
///
/// Periodic in `k` with period `d`; negative exponents are reduced first so
/// the result is computed from an angle in [0, 2π).
pub fn omega(d: usize, k: i64) -> Result<Complex64> {
    if d < 2 {
        return Err(Error::InvalidDimension { dim: d, min: 2 });
    }
    let k = k.rem_euclid(d as i64) as f64;
    Ok(Complex64::from_polar(1.0, TAU * k / d as f64))
}

/// Trial-division primality test; inputs here never exceed a few hundred.
pub fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= n {
        if n % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_square_root_is_minus_one() {
        let w = omega(2, 1).unwrap();
        assert!((w - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn omega_fourth_root_is_i() {
        let w = omega(4, 1).unwrap();
        assert!((w - Complex64::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn nontrivial_cube_roots_sum_to_minus_one() {
        let s = omega(3, 1).unwrap() + omega(3, 2).unwrap();
        assert!((s - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn omega_periodic_and_negative_exponents() {
        let d = 5;
        for k in -7i64..7 {
            let a = omega(d, k).unwrap();
            let b = omega(d, k + d as i64).unwrap();
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn omega_rejects_small_dimension() {
        assert!(matches!(
            omega(1, 0),
            Err(Error::InvalidDimension { dim: 1, min: 2 })
        ));
    }

    #[test]
    fn sub_mod_wraps() {
        assert_eq!(sub_mod(0, 1, 5), 4);
        assert_eq!(sub_mod(3, 3, 5), 0);
    }

    #[test]
    fn primes_up_to_13() {
        let primes: Vec<usize> = (0..14).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13]);
    }
}
