//! Closed-form modes of the engineered chain.
//!
//! `α_j(k) = 2^{(n+1)/2}/2^j · sqrt(k C(n,k) / (j C(n,j))) · P_{n−j}^{(j−k, j+k−n−1)}(0)`
//! reduces to `2^{(1−n)/2} · sqrt(C(n−1,k−1)/C(n−1,j−1)) · S_{jk}` with the
//! integer sum `S_{jk} = Σ_s (−1)^s C(n−k, n−j−s) C(k−1, s)`, evaluated here
//! exactly in 128-bit arithmetic.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest chain the exact integer evaluation supports.
pub const MAX_EXACT_N: usize = 120;

fn binomial(n: usize, k: usize) -> Option<i128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: i128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as i128)? / (i as i128 + 1);
    }
    Some(acc)
}

fn krawtchouk_sum(n: usize, j: usize, k: usize) -> Option<i128> {
    let m = n - j;
    let mut total: i128 = 0;
    for s in 0..=m {
        let term = binomial(n - k, m - s)?.checked_mul(binomial(k - 1, s)?)?;
        total = if s % 2 == 0 { total.checked_add(term)? } else { total.checked_sub(term)? };
    }
    Some(total)
}

/// Mode matrix `[α_j(k)]`, rows `j = 1..n`, columns `k = 1..n`. Column `k` is
/// the eigenvector for eigenvalue `−ω_k = ω_{n+1−k}`.
pub fn jacobi_modes(n: usize) -> Result<DMatrix<f64>> {
    if n == 0 {
        return Err(Error::InvalidDimension("n = 0".into()));
    }
    if n > MAX_EXACT_N {
        return Err(Error::Unsupported(format!(
            "closed-form modes limited to n ≤ {MAX_EXACT_N}"
        )));
    }
    let overflow = || Error::Unsupported(format!("integer overflow evaluating modes at n = {n}"));
    let scale = 2f64.powf((1.0 - n as f64) / 2.0);
    let mut out = DMatrix::zeros(n, n);
    for j in 1..=n {
        let cj = binomial(n - 1, j - 1).ok_or_else(overflow)? as f64;
        for k in 1..=n {
            let ck = binomial(n - 1, k - 1).ok_or_else(overflow)? as f64;
            let s = krawtchouk_sum(n, j, k).ok_or_else(overflow)? as f64;
            out[(j - 1, k - 1)] = scale * (ck / cj).sqrt() * s;
        }
    }
    Ok(out)
}

/// `A_jl(t) = Σ_k α_j(k) α_l(k) e^{−iω_{n+1−k} t}` with `ω_k = (2d/n)(2k − n − 1)`.
pub fn engineered_amplitude(n: usize, d: f64, j: usize, l: usize, t: f64) -> Result<Complex64> {
    for idx in [j, l] {
        if idx == 0 || idx > n {
            return Err(Error::IndexOutOfRange { index: idx, n });
        }
    }
    let modes = jacobi_modes(n)?;
    let nf = n as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 1..=n {
        let omega = 2.0 * d / nf * (2.0 * (n + 1 - k) as f64 - (nf + 1.0));
        acc += modes[(j - 1, k - 1)] * modes[(l - 1, k - 1)] * Complex64::from_polar(1.0, -omega * t);
    }
    Ok(acc)
}
