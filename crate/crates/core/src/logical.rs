//! Two-spin logical-qubit encoding and its transport along the chain.
//!
//! Correlations are `Tr[U σ_αL U† σ'_αL] / 2^{n−1}`, so the identity-like
//! observable `1_L` starts at 1/2 and perfect transport of any observable
//! gives exactly 1.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::chain::Model;
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString, PauliSum};
use crate::propagator::{homogeneous_amplitude, MajoranaPropagator, Propagator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LogicalObservable {
    X,
    Y,
    Z,
    Identity,
}

impl LogicalObservable {
    pub const ALL: [LogicalObservable; 4] =
        [LogicalObservable::X, LogicalObservable::Y, LogicalObservable::Z, LogicalObservable::Identity];

    fn index(self) -> usize {
        match self {
            LogicalObservable::X => 0,
            LogicalObservable::Y => 1,
            LogicalObservable::Z => 2,
            LogicalObservable::Identity => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Homogeneous,
    Engineered,
}

/// xx encoding on an ordered pair `(a, b)`:
/// `σ_x = (XX+YY)/2`, `σ_y = (Y_a X_b − X_a Y_b)/2`, `σ_z = (Z_a − Z_b)/2`,
/// `1 = (1 − Z_a Z_b)/2`.
fn xx_pair(n: usize, a: usize, b: usize) -> Result<[PauliSum; 4]> {
    let s = |pa: Pauli, pb: Pauli| PauliString::from_sites(n, &[(a, pa), (b, pb)]);
    let x = PauliSum::from_terms(n, [(s(Pauli::X, Pauli::X)?, 0.5), (s(Pauli::Y, Pauli::Y)?, 0.5)])?;
    let y = PauliSum::from_terms(n, [(s(Pauli::Y, Pauli::X)?, 0.5), (s(Pauli::X, Pauli::Y)?, -0.5)])?;
    let z = PauliSum::from_terms(n, [(s(Pauli::Z, Pauli::I)?, 0.5), (s(Pauli::I, Pauli::Z)?, -0.5)])?;
    let one = PauliSum::from_terms(n, [(PauliString::identity(n), 0.5), (s(Pauli::Z, Pauli::Z)?, -0.5)])?;
    Ok([x, y, z, one])
}

#[derive(Clone, Debug, PartialEq)]
pub struct LogicalBasis {
    model: Model,
    n: usize,
    source: [PauliSum; 4],
    target: [PauliSum; 4],
}

impl LogicalBasis {
    /// Source observables on sites (1, 2); targets on the mirrored pair, site
    /// `n` playing the role of site 1. The dq encoding is the xx one
    /// conjugated by `σ_x` on the second spin of each pair, spanning
    /// `|00⟩, |11⟩`.
    pub fn new(model: Model, n: usize) -> Result<Self> {
        if n < 4 {
            return Err(Error::ChainTooShort { n, min: 4 });
        }
        let mut source = xx_pair(n, 1, 2)?;
        let mut target = xx_pair(n, n, n - 1)?;
        match model {
            Model::Xx => {}
            Model::Dq => {
                let fs = PauliString::from_sites(n, &[(2, Pauli::X)])?;
                let ft = PauliString::from_sites(n, &[(n - 1, Pauli::X)])?;
                source = source.map(|o| o.conjugated_by(&fs));
                target = target.map(|o| o.conjugated_by(&ft));
            }
            Model::DipolarSecular => {
                return Err(Error::Unsupported("logical encoding is defined for xx and dq".into()))
            }
        }
        Ok(Self { model, n, source, target })
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn source(&self, alpha: LogicalObservable) -> &PauliSum {
        &self.source[alpha.index()]
    }

    pub fn target(&self, alpha: LogicalObservable) -> &PauliSum {
        &self.target[alpha.index()]
    }

    /// Target observable after a π rotation about x of the final pair.
    pub fn corrected_target(&self, alpha: LogicalObservable) -> PauliSum {
        self.target(alpha).conjugated_by(&parity_correction_operator(self.n))
    }
}

pub fn logical_basis(model: Model, n: usize) -> Result<LogicalBasis> {
    LogicalBasis::new(model, n)
}

/// `σ_x^{n−1} σ_x^n`, the π-x rotation of the final pair up to a phase.
pub fn parity_correction_operator(n: usize) -> PauliString {
    PauliString::new((1..=n).map(|j| if j + 1 >= n { Pauli::X } else { Pauli::I }).collect())
}

/// Whether dq transport of the dq encoding needs the final π-x rotation.
pub fn dq_parity_correction(n: usize) -> bool {
    n.is_multiple_of(2)
}

fn check_n(n: usize) -> Result<()> {
    if n < 4 {
        return Err(Error::ChainTooShort { n, min: 4 });
    }
    Ok(())
}

/// Closed forms for equal couplings.
pub fn logical_transport_homogeneous(n: usize, d: f64, alpha: LogicalObservable, t: f64) -> Result<f64> {
    check_n(n)?;
    let a = |j: usize, l: usize| homogeneous_amplitude(n, d, j, l, t);
    match alpha {
        LogicalObservable::Identity => {
            let minor = a(1, n - 1)? * a(2, n)? - a(1, n)? * a(2, n - 1)?;
            Ok(0.5 * (1.0 + minor.norm_sqr()))
        }
        LogicalObservable::Z => {
            let p = |j, l| a(j, l).map(|z| z.norm_sqr());
            Ok(0.5 * (p(1, n)? - 2.0 * p(1, n - 1)? + p(2, n - 1)?))
        }
        LogicalObservable::X | LogicalObservable::Y => {
            let upper = alpha == LogicalObservable::X;
            let np1 = (n + 1) as f64;
            let sign = if upper || n % 2 == 1 { 1.0 } else { -1.0 };
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 1..=n {
                let kappa = PI * k as f64 / np1;
                let wk = 2.0 * d * kappa.cos();
                for h in 1..=n {
                    let eta = PI * h as f64 / np1;
                    let wh = 2.0 * d * eta.cos();
                    let bracket = (2.0 * eta).sin() * kappa.sin() + eta.sin() * (2.0 * kappa).sin();
                    let parity = if (h + k) % 2 == 0 { 1.0 } else { -1.0 };
                    let freq = if upper { wh - wk } else { wh + wk };
                    acc += parity * bracket * bracket * Complex64::from_polar(1.0, t * freq);
                }
            }
            Ok(2.0 * sign / (np1 * np1) * acc.re)
        }
    }
}

/// Closed forms for the engineered chain, `τ = 2dt/n`.
pub fn logical_transport_engineered(n: usize, d: f64, alpha: LogicalObservable, t: f64) -> Result<f64> {
    check_n(n)?;
    let tau = 2.0 * d * t / n as f64;
    let (s, c) = tau.sin_cos();
    let c2 = c * c;
    let m = (n - 1) as f64;
    let sp = |k: usize| s.powi(k as i32);
    Ok(match alpha {
        LogicalObservable::Identity => 0.5 * (1.0 + sp(4 * (n - 2))),
        LogicalObservable::X => sp(2 * (n - 2)),
        LogicalObservable::Y => sp(2 * (n - 2)) * (1.0 - 2.0 * m * c2),
        LogicalObservable::Z => {
            let bracket = m * c2 - 1.0;
            0.5 * (sp(2 * (n - 3)) * bracket * bracket + sp(2 * (n - 1)) - 2.0 * m * c2 * sp(2 * (n - 2)))
        }
    })
}

/// Propagator-built correlation of `basis` under its own model; with
/// `corrected` the target is rotated by π about x on the final pair.
pub fn logical_transport(prop: &Propagator, basis: &LogicalBasis, alpha: LogicalObservable, corrected: bool) -> Result<f64> {
    if prop.n() != basis.n() {
        return Err(Error::DimensionMismatch { expected: basis.n(), found: prop.n() });
    }
    let evo = MajoranaPropagator::new(prop, basis.model())?;
    let target = if corrected { basis.corrected_target(alpha) } else { basis.target(alpha).clone() };
    Ok(2.0 * evo.sum_correlation(basis.source(alpha), &target)?.re)
}

pub fn logical_transport_family(n: usize, d: f64, family: Family, alpha: LogicalObservable, t: f64) -> Result<f64> {
    match family {
        Family::Homogeneous => logical_transport_homogeneous(n, d, alpha, t),
        Family::Engineered => logical_transport_engineered(n, d, alpha, t),
    }
}

/// `F = (1/4) Σ_α C_αL`.
pub fn entanglement_fidelity(n: usize, d: f64, family: Family, t: f64) -> Result<f64> {
    let mut sum = 0.0;
    for alpha in LogicalObservable::ALL {
        sum += logical_transport_family(n, d, family, alpha, t)?;
    }
    Ok(sum / 4.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LogicalTransportCurve {
    pub times: Vec<f64>,
    /// Series for x, y, z and identity, in that order.
    pub values: [Vec<f64>; 4],
    pub fidelity: Vec<f64>,
}

impl LogicalTransportCurve {
    pub fn series(&self, alpha: LogicalObservable) -> &[f64] {
        &self.values[alpha.index()]
    }
}

pub fn transport_curve(n: usize, d: f64, family: Family, times: &[f64]) -> Result<LogicalTransportCurve> {
    check_n(n)?;
    let mut values: [Vec<f64>; 4] = Default::default();
    let mut fidelity = Vec::with_capacity(times.len());
    for &t in times {
        let mut sum = 0.0;
        for alpha in LogicalObservable::ALL {
            let c = logical_transport_family(n, d, family, alpha, t)?;
            values[alpha.index()].push(c);
            sum += c;
        }
        fidelity.push(sum / 4.0);
    }
    Ok(LogicalTransportCurve { times: times.to_vec(), values, fidelity })
}
