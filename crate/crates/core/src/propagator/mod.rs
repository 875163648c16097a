//! Single-particle spectral decomposition, transfer amplitudes and
//! polarization correlations of nearest-neighbor xx and dq chains.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::chain::{ChainSpec, Couplings, Model};
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString, PauliSum};
use crate::tridiag::symmetric_tridiagonal_eigen;

pub mod jacobi;
pub mod majorana;
pub mod many_body;

pub use jacobi::{engineered_amplitude, jacobi_modes};
pub use majorana::{pauli_to_majorana, pfaffian, MajoranaPropagator};
pub use many_body::{mixed_state_overlap, slater_amplitude, ZBasisOperator};

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralDecomposition {
    omegas: Vec<f64>,
    modes: DMatrix<f64>,
}

impl SpectralDecomposition {
    pub fn n(&self) -> usize {
        self.omegas.len()
    }

    /// Eigenvalues `ω_k`, ascending.
    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    /// Column `k` is the mode of `ω_k`.
    pub fn modes(&self) -> &DMatrix<f64> {
        &self.modes
    }

    /// `modes · diag(ω) · modesᵀ`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let scaled = DMatrix::from_fn(self.n(), self.n(), |j, k| self.modes[(j, k)] * self.omegas[k]);
        scaled * self.modes.transpose()
    }
}

/// Diagonalizes the hopping matrix `M_{j,j+1} = M_{j+1,j} = d_j`.
pub fn spectral_decompose(spec: &ChainSpec) -> Result<SpectralDecomposition> {
    let bonds = match spec.couplings() {
        Couplings::NearestNeighbor(b) => b,
        Couplings::Full(_) => {
            return Err(Error::Unsupported(
                "long-range couplings have no free-fermion form; use the oracle".into(),
            ))
        }
    };
    if spec.model() == Model::DipolarSecular {
        return Err(Error::Unsupported(
            "the secular dipolar model is interacting; use the oracle".into(),
        ));
    }
    let (omegas, modes) = symmetric_tridiagonal_eigen(&vec![0.0; spec.n()], bonds)?;
    Ok(SpectralDecomposition { omegas, modes })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Propagator {
    time: f64,
    amplitudes: DMatrix<Complex64>,
}

impl Propagator {
    pub fn from_matrix(time: f64, amplitudes: DMatrix<Complex64>) -> Result<Self> {
        if amplitudes.nrows() != amplitudes.ncols() {
            return Err(Error::DimensionMismatch { expected: amplitudes.nrows(), found: amplitudes.ncols() });
        }
        Ok(Self { time, amplitudes })
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn n(&self) -> usize {
        self.amplitudes.nrows()
    }

    pub fn amplitudes(&self) -> &DMatrix<Complex64> {
        &self.amplitudes
    }

    /// `A_jl(t)` for 1-based sites.
    pub fn amplitude(&self, j: usize, l: usize) -> Result<Complex64> {
        let n = self.n();
        for idx in [j, l] {
            if idx == 0 || idx > n {
                return Err(Error::IndexOutOfRange { index: idx, n });
            }
        }
        Ok(self.amplitudes[(j - 1, l - 1)])
    }

    /// `P_jl = |A_jl|²`.
    pub fn probability(&self, j: usize, l: usize) -> Result<f64> {
        Ok(self.amplitude(j, l)?.norm_sqr())
    }

    pub fn determinant(&self) -> Complex64 {
        self.amplitudes.determinant()
    }
}

/// `A(t) = modes · diag(e^{−iω_k t}) · modesᵀ`.
pub fn propagate(decomp: &SpectralDecomposition, t: f64) -> Propagator {
    let n = decomp.n();
    let phases: Vec<Complex64> = decomp.omegas.iter().map(|w| Complex64::from_polar(1.0, -w * t)).collect();
    let mut a = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..n {
        for l in j..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                acc += phases[k] * (decomp.modes[(j, k)] * decomp.modes[(l, k)]);
            }
            a[(j, l)] = acc;
            a[(l, j)] = acc;
        }
    }
    Propagator { time: t, amplitudes: a }
}

/// Closed form for equal couplings,
/// `A_jl = 2/(n+1) Σ_k sin(κj) sin(κl) e^{−2id cos(κ) t}`, `κ = πk/(n+1)`.
pub fn homogeneous_amplitude(n: usize, d: f64, j: usize, l: usize, t: f64) -> Result<Complex64> {
    for idx in [j, l] {
        if idx == 0 || idx > n {
            return Err(Error::IndexOutOfRange { index: idx, n });
        }
    }
    let np1 = (n + 1) as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 1..=n {
        let kappa = PI * k as f64 / np1;
        let omega = 2.0 * d * kappa.cos();
        acc += (kappa * j as f64).sin() * (kappa * l as f64).sin() * Complex64::from_polar(1.0, -omega * t);
    }
    Ok(acc * (2.0 / np1))
}

/// `(−1)^{j−l}` sign picked up by polarization transport under dq.
fn dq_sign(j: usize, l: usize) -> f64 {
    if (j + l).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `C_jl = Tr[δρ_z^j(t) δρ_z^l]/2^n` from a propagator.
pub fn correlation_from(prop: &Propagator, j: usize, l: usize, model: Model) -> Result<f64> {
    let p = prop.probability(j, l)?;
    match model {
        Model::Xx => Ok(p),
        Model::Dq => Ok(dq_sign(j, l) * p),
        Model::DipolarSecular => Err(Error::Unsupported("dipolar correlations need the oracle".into())),
    }
}

/// `C_jl(t)`: `|A_jl|²` for xx, `(−1)^{j−l}|A_jl|²` for dq.
pub fn polarization_correlation(spec: &ChainSpec, j: usize, l: usize, t: f64, model: Model) -> Result<f64> {
    let prop = propagate(&spectral_decompose(spec)?, t);
    correlation_from(&prop, j, l, model)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EndState {
    /// `σ_z¹ + σ_zⁿ`.
    ZEnds,
    /// Two-spin y-logical state on both chain ends.
    YLogical,
}

/// `(σ_y¹σ_x² + σ_x¹σ_y²)/2 + (σ_y^{n−1}σ_xⁿ + σ_x^{n−1}σ_yⁿ)/2`.
pub fn y_logical_state(n: usize) -> Result<PauliSum> {
    if n < 4 {
        return Err(Error::ChainTooShort { n, min: 4 });
    }
    let mut sum = PauliSum::zero(n);
    for (a, b) in [(1, 2), (n - 1, n)] {
        sum.add(PauliString::from_sites(n, &[(a, Pauli::Y), (b, Pauli::X)])?, 0.5)?;
        sum.add(PauliString::from_sites(n, &[(a, Pauli::X), (b, Pauli::Y)])?, 0.5)?;
    }
    Ok(sum)
}

/// `Tr[ρ(t)ρ(0)] / Tr[ρ(0)²]` for an end-localized initial state.
pub fn end_autocorrelation_from(prop: &Propagator, initial: EndState, model: Model) -> Result<f64> {
    let n = prop.n();
    match initial {
        EndState::ZEnds => {
            if n == 1 {
                return correlation_from(prop, 1, 1, model);
            }
            let mut acc = 0.0;
            for j in [1, n] {
                for l in [1, n] {
                    acc += correlation_from(prop, j, l, model)?;
                }
            }
            Ok(acc / 2.0)
        }
        EndState::YLogical => {
            let rho = y_logical_state(n)?;
            let evo = MajoranaPropagator::new(prop, model)?;
            Ok(evo.sum_correlation(&rho, &rho)?.re / rho.purity())
        }
    }
}

pub fn end_autocorrelation(spec: &ChainSpec, t: f64, initial: EndState, model: Model) -> Result<f64> {
    if initial == EndState::YLogical && spec.n() < 4 {
        return Err(Error::ChainTooShort { n: spec.n(), min: 4 });
    }
    let prop = propagate(&spectral_decompose(spec)?, t);
    end_autocorrelation_from(&prop, initial, model)
}
