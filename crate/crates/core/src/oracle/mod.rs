//! Exact dense `2^n`-dimensional reference.
//!
//! Basis index bits run from site 1 (most significant) to site `n` (least
//! significant); bit value 1 is the excitation `|1⟩` (`σ_z = −1`).

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chain::{ChainSpec, Model};
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString, PauliSum};

pub const BUDGET_ENV: &str = "SPINWIRE_ORACLE_MAX_N";
pub const DEFAULT_MAX_N: usize = 10;
pub const HARD_MAX_N: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleBudget {
    max_n: usize,
}

impl Default for OracleBudget {
    fn default() -> Self {
        Self { max_n: DEFAULT_MAX_N }
    }
}

impl OracleBudget {
    pub fn new(max_n: usize) -> Result<Self> {
        if !(2..=HARD_MAX_N).contains(&max_n) {
            return Err(Error::InvalidParameter(format!(
                "oracle budget {max_n} outside 2..={HARD_MAX_N}"
            )));
        }
        Ok(Self { max_n })
    }

    /// Default budget, overridden by `SPINWIRE_ORACLE_MAX_N` when set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(BUDGET_ENV) {
            Ok(v) => {
                let n = v.trim().parse::<usize>().map_err(|_| {
                    Error::InvalidParameter(format!("{BUDGET_ENV}={v:?} is not an integer"))
                })?;
                Self::new(n)
            }
            Err(_) => Ok(Self::default()),
        }
    }

    pub fn max_n(&self) -> usize {
        self.max_n
    }

    pub fn check(&self, n: usize) -> Result<()> {
        if n > self.max_n {
            return Err(Error::OverBudget { n, max_n: self.max_n });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    n: usize,
    matrix: DMatrix<Complex64>,
}

impl DenseOperator {
    pub fn new(n: usize, matrix: DMatrix<Complex64>) -> Result<Self> {
        let dim = 1usize << n;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: matrix.nrows().max(matrix.ncols()) });
        }
        Ok(Self { n, matrix })
    }

    pub fn zeros(n: usize) -> Self {
        let dim = 1 << n;
        Self { n, matrix: DMatrix::zeros(dim, dim) }
    }

    pub fn identity(n: usize) -> Self {
        let dim = 1 << n;
        Self { n, matrix: DMatrix::identity(dim, dim) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    /// Largest entry of `self − self†`.
    pub fn hermiticity_error(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `Tr[self]/2^n`.
    pub fn normalized_trace(&self) -> Complex64 {
        self.matrix.trace() / self.dim() as f64
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn check_same(&self, other: &DenseOperator) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(())
    }

    /// Adds `w·s` in place.
    pub fn add_pauli(&mut self, s: &PauliString, w: Complex64) -> Result<()> {
        if s.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: s.n() });
        }
        for_each_pauli_entry(s, |row, col, v| self.matrix[(row, col)] += w * v);
        Ok(())
    }
}

/// Calls `f(row, col, value)` for the `2^n` nonzero entries of `s`.
fn for_each_pauli_entry(s: &PauliString, mut f: impl FnMut(usize, usize, Complex64)) {
    let n = s.n();
    let mut xmask = 0usize;
    for (idx, &p) in s.letters().iter().enumerate() {
        if matches!(p, Pauli::X | Pauli::Y) {
            xmask |= 1 << (n - 1 - idx);
        }
    }
    let i = Complex64::i();
    for col in 0..1usize << n {
        let mut v = Complex64::new(1.0, 0.0);
        for (idx, &p) in s.letters().iter().enumerate() {
            let bit = col >> (n - 1 - idx) & 1;
            match p {
                Pauli::I | Pauli::X => {}
                Pauli::Y => v *= if bit == 0 { i } else { -i },
                Pauli::Z => {
                    if bit == 1 {
                        v = -v;
                    }
                }
            }
        }
        f(col ^ xmask, col, v);
    }
}

pub fn pauli_string_to_dense(s: &PauliString) -> DenseOperator {
    let mut op = DenseOperator::zeros(s.n());
    for_each_pauli_entry(s, |row, col, v| op.matrix[(row, col)] = v);
    op
}

/// Parses `letters` (one per site) and builds the dense string on `n` sites.
pub fn pauli_str_to_dense(letters: &str, n: usize) -> Result<DenseOperator> {
    let s = PauliString::parse(letters)?;
    if s.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: s.n() });
    }
    Ok(pauli_string_to_dense(&s))
}

pub fn pauli_sum_to_dense(sum: &PauliSum) -> DenseOperator {
    let mut op = DenseOperator::zeros(sum.n());
    for (s, w) in sum.terms() {
        op.add_pauli(s, Complex64::new(*w, 0.0)).expect("terms share n");
    }
    op
}

fn two_site(n: usize, j: usize, l: usize, a: Pauli, b: Pauli) -> PauliString {
    PauliString::from_sites(n, &[(j, a), (l, b)]).expect("sites in range")
}

/// Pauli-sum form of the chain Hamiltonian.
pub fn hamiltonian_terms(spec: &ChainSpec) -> PauliSum {
    let n = spec.n();
    let mut h = PauliSum::zero(n);
    for (j, l, d) in spec.pairs() {
        let (xx, yy, zz) = match spec.model() {
            Model::Xx => (d / 2.0, d / 2.0, 0.0),
            Model::Dq => (d / 2.0, -d / 2.0, 0.0),
            Model::DipolarSecular => (-d / 2.0, -d / 2.0, d),
        };
        for (p, w) in [(Pauli::X, xx), (Pauli::Y, yy), (Pauli::Z, zz)] {
            if w != 0.0 {
                h.add(two_site(n, j, l, p, p), w).expect("same n");
            }
        }
    }
    h
}

pub fn build_hamiltonian_with(spec: &ChainSpec, budget: &OracleBudget) -> Result<DenseOperator> {
    budget.check(spec.n())?;
    Ok(pauli_sum_to_dense(&hamiltonian_terms(spec)))
}

/// Dense Hamiltonian under the default (environment-overridable) budget.
pub fn build_hamiltonian(spec: &ChainSpec) -> Result<DenseOperator> {
    build_hamiltonian_with(spec, &OracleBudget::from_env()?)
}

/// `Σ_j σ_z^j`.
pub fn total_z(n: usize) -> DenseOperator {
    let mut op = DenseOperator::zeros(n);
    for j in 1..=n {
        let s = PauliString::from_sites(n, &[(j, Pauli::Z)]).expect("site in range");
        op.add_pauli(&s, Complex64::new(1.0, 0.0)).expect("same n");
    }
    op
}

/// `Σ_j (−1)^{j+1} σ_z^j`.
pub fn staggered_z(n: usize) -> DenseOperator {
    let mut op = DenseOperator::zeros(n);
    for j in 1..=n {
        let s = PauliString::from_sites(n, &[(j, Pauli::Z)]).expect("site in range");
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        op.add_pauli(&s, Complex64::new(sign, 0.0)).expect("same n");
    }
    op
}

/// `Π_{odd j} σ_x^j` as a Pauli string.
pub fn odd_site_flip(n: usize) -> PauliString {
    PauliString::new((1..=n).map(|j| if j % 2 == 1 { Pauli::X } else { Pauli::I }).collect())
}

/// Largest entry of `[a, b]`.
pub fn commutator_norm(a: &DenseOperator, b: &DenseOperator) -> Result<f64> {
    a.check_same(b)?;
    let c = &a.matrix * &b.matrix - &b.matrix * &a.matrix;
    Ok(c.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// `Tr[a·b]/2^n`.
pub fn trace_overlap(a: &DenseOperator, b: &DenseOperator) -> Result<Complex64> {
    a.check_same(b)?;
    let dim = a.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..dim {
        for k in 0..dim {
            acc += a.matrix[(i, k)] * b.matrix[(k, i)];
        }
    }
    Ok(acc / dim as f64)
}

/// Eigendecomposition `H = V diag(w) V†` of a Hermitian operator.
#[derive(Clone, Debug)]
pub struct HamiltonianEigen {
    n: usize,
    values: Vec<f64>,
    vectors: DMatrix<Complex64>,
}

impl HamiltonianEigen {
    pub fn new(h: &DenseOperator) -> Result<Self> {
        let herm = h.hermiticity_error();
        if herm > 1e-12 * h.max_abs().max(1.0) {
            return Err(Error::InvalidParameter(format!("operator not Hermitian (residual {herm:e})")));
        }
        let real = h.matrix.iter().all(|z| z.im == 0.0);
        let (values, vectors) = if real {
            let m = h.matrix.map(|z| z.re);
            let eig = SymmetricEigen::new(m);
            (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors.map(|x| Complex64::new(x, 0.0)))
        } else {
            let eig = SymmetricEigen::new(h.matrix.clone());
            (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
        };
        Ok(Self { n: h.n, values, vectors })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Eigenvalues in the solver's order (not sorted).
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sorted_values(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        v
    }

    /// `U(t) = exp(−iHt)`.
    pub fn unitary(&self, t: f64) -> DMatrix<Complex64> {
        let phased = DMatrix::from_fn(self.vectors.nrows(), self.vectors.ncols(), |i, k| {
            self.vectors[(i, k)] * Complex64::from_polar(1.0, -self.values[k] * t)
        });
        phased * self.vectors.adjoint()
    }

    /// `V† op V`.
    pub fn to_eigenbasis(&self, op: &DenseOperator) -> Result<DMatrix<Complex64>> {
        if op.dim() != self.vectors.nrows() {
            return Err(Error::DimensionMismatch { expected: self.vectors.nrows(), found: op.dim() });
        }
        Ok(self.vectors.adjoint() * &op.matrix * &self.vectors)
    }

    /// `U ρ U†`.
    pub fn evolve(&self, rho: &DenseOperator, t: f64) -> Result<DenseOperator> {
        let tilde = self.to_eigenbasis(rho)?;
        let phases: Vec<Complex64> = self.values.iter().map(|w| Complex64::from_polar(1.0, -w * t)).collect();
        let rotated = DMatrix::from_fn(tilde.nrows(), tilde.ncols(), |k, l| tilde[(k, l)] * phases[k] * phases[l].conj());
        let matrix = &self.vectors * rotated * self.vectors.adjoint();
        Ok(DenseOperator { n: self.n, matrix })
    }

    /// `Tr[U a U† b]/2^n` at every time in `times`.
    pub fn correlation_series(&self, a: &DenseOperator, b: &DenseOperator, times: &[f64]) -> Result<Vec<Complex64>> {
        let at = self.to_eigenbasis(a)?;
        let bt = self.to_eigenbasis(b)?;
        let dim = at.nrows();
        let mut out = Vec::with_capacity(times.len());
        for &t in times {
            let phases: Vec<Complex64> = self.values.iter().map(|w| Complex64::from_polar(1.0, -w * t)).collect();
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..dim {
                for l in 0..dim {
                    let x = at[(k, l)] * bt[(l, k)];
                    if x != Complex64::new(0.0, 0.0) {
                        acc += x * phases[k] * phases[l].conj();
                    }
                }
            }
            out.push(acc / dim as f64);
        }
        Ok(out)
    }
}

/// `U ρ U†` with `U = exp(−iHt)`.
pub fn evolve_deviation(h: &DenseOperator, rho: &DenseOperator, t: f64) -> Result<DenseOperator> {
    h.check_same(rho)?;
    HamiltonianEigen::new(h)?.evolve(rho, t)
}

/// Max-norm of `S H_xx S − H_dq`, `S = Π_{odd} σ_x`, for couplings drawn
/// uniformly from `[0.5, 1.5)` with the given seed.
pub fn similarity_check(n: usize, seed: u64, budget: &OracleBudget) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidDimension(format!("n = {n}, need n ≥ 2")));
    }
    budget.check(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bonds: Vec<f64> = (0..n - 1).map(|_| rng.random_range(0.5..1.5)).collect();
    let xx = ChainSpec::nearest_neighbor(Model::Xx, n, bonds)?;
    let dq = xx.with_model(Model::Dq)?;
    let hx = build_hamiltonian_with(&xx, budget)?;
    let hd = build_hamiltonian_with(&dq, budget)?;
    let s = pauli_string_to_dense(&odd_site_flip(n));
    let conj = &s.matrix * &hx.matrix * &s.matrix;
    Ok((conj - &hd.matrix).iter().map(|z| z.norm()).fold(0.0, f64::max))
}
