//! Majorana-operator form of the free-fermion dynamics.
//!
//! With `S_j = Π_{k<j} σ_z^k` (0-based `j`), `γ_{2j} = S_j σ_x^j` and
//! `γ_{2j+1} = S_j σ_y^j`. Evolution under a quadratic Hamiltonian is a real
//! orthogonal map `U γ_μ U† = Σ_ν R_{μν} γ_ν`, and infinite-temperature traces
//! of Majorana products are Pfaffians (Wick's theorem).

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::chain::Model;
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString, PauliSum};

use super::Propagator;

/// `phase · γ_{i_1} γ_{i_2} …` with strictly increasing indices.
#[derive(Clone, Debug, PartialEq)]
pub struct MajoranaMonomial {
    pub phase: Complex64,
    pub indices: Vec<usize>,
}

impl MajoranaMonomial {
    fn one() -> Self {
        Self { phase: Complex64::new(1.0, 0.0), indices: Vec::new() }
    }

    fn times(mut self, other: &[usize], phase: Complex64) -> Self {
        self.phase *= phase;
        self.indices.extend_from_slice(other);
        // Bubble sort: each adjacent swap of distinct Majoranas flips the sign.
        let v = &mut self.indices;
        let mut sign = 1.0;
        for end in (1..v.len()).rev() {
            for i in 0..end {
                if v[i] > v[i + 1] {
                    v.swap(i, i + 1);
                    sign = -sign;
                }
            }
        }
        let mut reduced = Vec::with_capacity(v.len());
        let mut i = 0;
        while i < v.len() {
            if i + 1 < v.len() && v[i] == v[i + 1] {
                i += 2;
            } else {
                reduced.push(v[i]);
                i += 1;
            }
        }
        self.indices = reduced;
        self.phase *= sign;
        self
    }
}

/// Jordan–Wigner image of a Pauli string.
pub fn pauli_to_majorana(s: &PauliString) -> MajoranaMonomial {
    let minus_i = Complex64::new(0.0, -1.0);
    let one = Complex64::new(1.0, 0.0);
    let mut m = MajoranaMonomial::one();
    for (j, &p) in s.letters().iter().enumerate() {
        if p == Pauli::I {
            continue;
        }
        if matches!(p, Pauli::X | Pauli::Y) {
            // S_j = Π_{k<j} (−i γ_{2k} γ_{2k+1})
            for k in 0..j {
                m = m.times(&[2 * k, 2 * k + 1], minus_i);
            }
        }
        m = match p {
            Pauli::X => m.times(&[2 * j], one),
            Pauli::Y => m.times(&[2 * j + 1], one),
            Pauli::Z => m.times(&[2 * j, 2 * j + 1], minus_i),
            Pauli::I => unreachable!(),
        };
    }
    m
}

/// Pfaffian of a real antisymmetric matrix (Parlett–Reid with pivoting).
pub fn pfaffian(mut a: DMatrix<f64>) -> f64 {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    if n == 0 {
        return 1.0;
    }
    if n % 2 == 1 {
        return 0.0;
    }
    let mut pf = 1.0;
    let mut k = 0;
    while k + 1 < n {
        let mut kp = k + 1;
        for i in k + 2..n {
            if a[(i, k)].abs() > a[(kp, k)].abs() {
                kp = i;
            }
        }
        if kp != k + 1 {
            a.swap_rows(k + 1, kp);
            a.swap_columns(k + 1, kp);
            pf = -pf;
        }
        if a[(k + 1, k)] == 0.0 {
            return 0.0;
        }
        pf *= a[(k, k + 1)];
        if k + 2 < n {
            let pivot = a[(k, k + 1)];
            let tau: Vec<f64> = (k + 2..n).map(|c| a[(k, c)] / pivot).collect();
            let col: Vec<f64> = (k + 2..n).map(|r| a[(r, k + 1)]).collect();
            for (ii, r) in (k + 2..n).enumerate() {
                for (jj, c) in (k + 2..n).enumerate() {
                    a[(r, c)] += tau[ii] * col[jj] - col[ii] * tau[jj];
                }
            }
        }
        k += 2;
    }
    pf
}

/// Orthogonal single-particle map `R(t)` of a nearest-neighbor xx or dq chain.
#[derive(Clone, Debug)]
pub struct MajoranaPropagator {
    n: usize,
    r: DMatrix<f64>,
}

impl MajoranaPropagator {
    /// Builds `R` from the hopping propagator `A(t)`. For the dq model the
    /// xx map is conjugated by the sign pattern of `Π_{odd sites} σ_x`.
    pub fn new(prop: &Propagator, model: Model) -> Result<Self> {
        let a = prop.amplitudes();
        let n = a.nrows();
        let mut r = DMatrix::zeros(2 * n, 2 * n);
        for j in 0..n {
            for l in 0..n {
                let z = a[(j, l)];
                r[(2 * j, 2 * l)] = z.re;
                r[(2 * j, 2 * l + 1)] = z.im;
                r[(2 * j + 1, 2 * l)] = -z.im;
                r[(2 * j + 1, 2 * l + 1)] = z.re;
            }
        }
        match model {
            Model::Xx => {}
            Model::Dq => {
                let d = odd_site_flip_signs(n);
                for mu in 0..2 * n {
                    for nu in 0..2 * n {
                        r[(mu, nu)] *= d[mu] * d[nu];
                    }
                }
            }
            Model::DipolarSecular => {
                return Err(Error::Unsupported(
                    "the secular dipolar model is not quadratic in fermions".into(),
                ))
            }
        }
        Ok(Self { n, r })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.r
    }

    /// `Tr[U a U† b] / 2^n` for Pauli strings `a`, `b`.
    pub fn pauli_correlation(&self, a: &PauliString, b: &PauliString) -> Result<Complex64> {
        for s in [a, b] {
            if s.n() != self.n {
                return Err(Error::DimensionMismatch { expected: self.n, found: s.n() });
            }
        }
        let ma = pauli_to_majorana(a);
        let mb = pauli_to_majorana(b);
        let total = ma.indices.len() + mb.indices.len();
        if total % 2 == 1 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        // Vectors w_i: evolved rows for a, unit vectors for b.
        let dim = 2 * self.n;
        let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(total);
        for &mu in &ma.indices {
            vectors.push(self.r.row(mu).iter().copied().collect());
        }
        for &nu in &mb.indices {
            let mut e = vec![0.0; dim];
            e[nu] = 1.0;
            vectors.push(e);
        }
        let mut g = DMatrix::zeros(total, total);
        for i in 0..total {
            for j in i + 1..total {
                let dot: f64 = vectors[i].iter().zip(&vectors[j]).map(|(x, y)| x * y).sum();
                g[(i, j)] = dot;
                g[(j, i)] = -dot;
            }
        }
        Ok(ma.phase * mb.phase * pfaffian(g))
    }

    /// `Tr[U a U† b] / 2^n` for weighted sums.
    pub fn sum_correlation(&self, a: &PauliSum, b: &PauliSum) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (sa, wa) in a.terms() {
            for (sb, wb) in b.terms() {
                acc += wa * wb * self.pauli_correlation(sa, sb)?;
            }
        }
        Ok(acc)
    }
}

/// `D_μ` with `S γ_μ S = D_μ γ_μ` for `S = Π_{odd sites} σ_x` (1-based odd
/// sites, i.e. even 0-based indices).
fn odd_site_flip_signs(n: usize) -> Vec<f64> {
    let mut d = Vec::with_capacity(2 * n);
    let mut string_sign = 1.0;
    for j in 0..n {
        let flipped = j % 2 == 0;
        d.push(string_sign);
        d.push(if flipped { -string_sign } else { string_sign });
        if flipped {
            string_sign = -string_sign;
        }
    }
    d
}
