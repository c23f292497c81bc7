//! Scaled Legendre polynomials on `[0, 1]`.
//!
//! `phi_i(z) = (1/i!) d^i/dz^i (z - z^2)^i`. Expanding `(z - z^2)^i = sum_k (-1)^k C(i,k) z^(i+k)`
//! and differentiating term by term gives the monomial coefficients
//! `(-1)^k C(i,k) C(i+k,k)`, which are exact integers.

use crate::error::{Error, Result};

/// Highest supported degree; its integer coefficients still fit in `i128`.
pub const MAX_DEGREE: usize = 30;

fn binomial(n: u32, k: u32) -> i128 {
    let k = k.min(n - k);
    let mut acc: i128 = 1;
    for j in 0..k {
        acc = acc * (n - j) as i128 / (j + 1) as i128;
    }
    acc
}

/// Monomial coefficients of `phi_i`, lowest power first.
pub fn coefficients(i: usize) -> Vec<i128> {
    let i = i as u32;
    (0..=i)
        .map(|k| {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            sign * binomial(i, k) * binomial(i + k, k)
        })
        .collect()
}

/// Evaluate `phi_i` without argument checks.
///
/// Uses the Bonnet recurrence in `x = 1 - 2 zeta`, which stays accurate at high
/// degree where Horner on the alternating monomial coefficients loses digits.
#[inline]
pub(crate) fn phi_unchecked(i: usize, zeta: f64) -> f64 {
    let x = 1.0 - 2.0 * zeta;
    let (mut prev, mut cur) = (1.0, x);
    if i == 0 {
        return prev;
    }
    for n in 1..i {
        let n = n as f64;
        let next = ((2.0 * n + 1.0) * x * cur - n * prev) / (n + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `phi_i(zeta)` for `i >= 1` and `zeta` in `[0, 1]`.
pub fn basis_phi(i: usize, zeta: f64) -> Result<f64> {
    if !(1..=MAX_DEGREE).contains(&i) {
        return Err(Error::Domain(format!(
            "basis index {i} outside 1..={MAX_DEGREE}"
        )));
    }
    if !(0.0..=1.0).contains(&zeta) {
        return Err(Error::Domain(format!("zeta={zeta} outside [0, 1]")));
    }
    Ok(phi_unchecked(i, zeta))
}
