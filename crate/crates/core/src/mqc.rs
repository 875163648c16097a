//! Multiple-quantum-coherence intensities.
//!
//! The phase-cycled signal is `S(φ) = Tr[R_φ ρ(t) R_φ† Z(t)] / 2^n` with
//! `R_φ = exp(−iφ Σσ_z/2)` and `Z(t) = U Z U†`, so that coherence order `q`
//! contributes `J^q e^{−iqφ}` and `J^q = (1/M) Σ_m S(φ_m) e^{iqφ_m}`.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::chain::ChainSpec;
use crate::error::{Error, Result};
use crate::oracle::{build_hamiltonian_with, pauli_sum_to_dense, total_z, DenseOperator, HamiltonianEigen, OracleBudget};
use crate::pauli::{Pauli, PauliString, PauliSum, DeviationState};
use crate::propagator::y_logical_state;

pub const DEFAULT_PHASE_STEPS: usize = 8;
/// Entries of `ρ(t)` above this magnitude count toward the populated orders.
const ORDER_THRESHOLD: f64 = 1e-12;
/// Below this, `Σ_q J^q(0)` is treated as vanishing and purity normalizes.
const NORMALIZATION_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct MqcSpectrum {
    pub time: f64,
    /// `Re J^q` for `q = −n..=n`.
    pub intensities: BTreeMap<i32, f64>,
    /// `Im J^q`; zero for z- and y-type states, carries the x-logical signal.
    pub quadrature: BTreeMap<i32, f64>,
    /// `Σ_q J^q(0)`, or `Tr[ρ(0)²]/2^n` when that sum vanishes.
    pub normalization: f64,
}

impl MqcSpectrum {
    pub fn intensity(&self, q: i32) -> f64 {
        self.intensities.get(&q).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.intensities.values().sum()
    }

    /// Highest `|q|` whose intensity or quadrature exceeds `tol`.
    pub fn max_populated_order(&self, tol: f64) -> i32 {
        self.intensities
            .iter()
            .chain(&self.quadrature)
            .filter(|(_, v)| v.abs() > tol)
            .map(|(q, _)| q.abs())
            .max()
            .unwrap_or(0)
    }

    pub fn normalized(&self) -> MqcSpectrum {
        let k = 1.0 / self.normalization;
        MqcSpectrum {
            time: self.time,
            intensities: self.intensities.iter().map(|(&q, &v)| (q, v * k)).collect(),
            quadrature: self.quadrature.iter().map(|(&q, &v)| (q, v * k)).collect(),
            normalization: 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StateKind {
    ZEnds,
    YLogical,
    XLogical,
    FullZ,
}

impl std::str::FromStr for StateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "z_ends" | "z-ends" => Ok(StateKind::ZEnds),
            "y_logical" | "y-logical" => Ok(StateKind::YLogical),
            "x_logical" | "x-logical" => Ok(StateKind::XLogical),
            "full_z" | "full-z" => Ok(StateKind::FullZ),
            other => Err(Error::InvalidParameter(format!("unknown initial state {other:?}"))),
        }
    }
}

impl StateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StateKind::ZEnds => "z_ends",
            StateKind::YLogical => "y_logical",
            StateKind::XLogical => "x_logical",
            StateKind::FullZ => "full_z",
        }
    }
}

pub fn prepare_state(n: usize, kind: StateKind) -> Result<DeviationState> {
    let min = match kind {
        StateKind::ZEnds | StateKind::FullZ => 2,
        StateKind::YLogical | StateKind::XLogical => 4,
    };
    if n < min {
        return Err(Error::ChainTooShort { n, min });
    }
    let sum = match kind {
        StateKind::ZEnds => PauliSum::from_terms(
            n,
            [
                (PauliString::from_sites(n, &[(1, Pauli::Z)])?, 1.0),
                (PauliString::from_sites(n, &[(n, Pauli::Z)])?, 1.0),
            ],
        )?,
        StateKind::FullZ => PauliSum::from_terms(
            n,
            (1..=n).map(|j| (PauliString::from_sites(n, &[(j, Pauli::Z)]).expect("in range"), 1.0)),
        )?,
        StateKind::YLogical => y_logical_state(n)?,
        StateKind::XLogical => y_logical_state(n)?.rotated_z(FRAC_PI_4).pruned(1e-15),
    };
    DeviationState::new(sum)
}

fn check_order(order: i32) -> Result<(f64, f64)> {
    match order {
        0 => Ok((2.0, 0.0)),
        2 | -2 => Ok((1.0, FRAC_PI_2)),
        other => Err(Error::InvalidOrder(other)),
    }
}

/// `J = α/(n+1) Σ_k sin²κ cos²(2ω_k t + φ)` for `σ_z¹ + σ_zⁿ` under the
/// homogeneous nearest-neighbor dq Hamiltonian.
pub fn mqc_z_analytic(n: usize, d: f64, order: i32, t: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::ChainTooShort { n, min: 2 });
    }
    let (alpha, phi) = check_order(order)?;
    let np1 = (n + 1) as f64;
    let sum: f64 = (1..=n)
        .map(|k| {
            let kappa = PI * k as f64 / np1;
            let w = 2.0 * d * kappa.cos();
            kappa.sin().powi(2) * (2.0 * w * t + phi).cos().powi(2)
        })
        .sum();
    Ok(alpha / np1 * sum)
}

/// `J = α/(n+1) Σ_k sinκ sin2κ sin(4ω_k t + 2φ)` for the y-logical state.
pub fn mqc_ylog_analytic(n: usize, d: f64, order: i32, t: f64) -> Result<f64> {
    if n < 4 {
        return Err(Error::ChainTooShort { n, min: 4 });
    }
    let (alpha, phi) = check_order(order)?;
    let np1 = (n + 1) as f64;
    let sum: f64 = (1..=n)
        .map(|k| {
            let kappa = PI * k as f64 / np1;
            let w = 2.0 * d * kappa.cos();
            kappa.sin() * (2.0 * kappa).sin() * (4.0 * w * t + 2.0 * phi).sin()
        })
        .sum();
    Ok(alpha / np1 * sum)
}

/// The x-logical state carries no in-phase signal.
pub fn mqc_xlog_analytic(n: usize, _d: f64, order: i32, _t: f64) -> Result<f64> {
    if n < 4 {
        return Err(Error::ChainTooShort { n, min: 4 });
    }
    check_order(order)?;
    Ok(0.0)
}

/// Analytic spectrum with orders 0 and ±2 filled; already normalized.
pub fn mqc_analytic(n: usize, d: f64, kind: StateKind, t: f64) -> Result<MqcSpectrum> {
    let f: fn(usize, f64, i32, f64) -> Result<f64> = match kind {
        StateKind::ZEnds => mqc_z_analytic,
        StateKind::YLogical => mqc_ylog_analytic,
        StateKind::XLogical => mqc_xlog_analytic,
        StateKind::FullZ => {
            return Err(Error::Unsupported("no closed form for the fully polarized state".into()))
        }
    };
    let mut intensities = BTreeMap::new();
    let mut quadrature = BTreeMap::new();
    for q in -(n as i32)..=(n as i32) {
        let v = if q == 0 || q.abs() == 2 { f(n, d, q, t)? } else { 0.0 };
        intensities.insert(q, v);
        quadrature.insert(q, 0.0);
    }
    Ok(MqcSpectrum { time: t, intensities, quadrature, normalization: 1.0 })
}

/// `Σ_q J^q(0) = Tr[ρ₀ Z]/2^n`, falling back to `Tr[ρ₀²]/2^n` when it vanishes.
pub fn normalization_of(initial: &PauliSum) -> f64 {
    let z_overlap: f64 = initial
        .terms()
        .iter()
        .filter(|(s, _)| s.weight() == 1 && s.letters().contains(&Pauli::Z))
        .map(|(_, w)| w)
        .sum();
    if z_overlap.abs() > NORMALIZATION_FLOOR {
        z_overlap
    } else {
        initial.purity()
    }
}

/// Dense-oracle phase cycling for one chain, reusing its eigendecomposition.
#[derive(Clone, Debug)]
pub struct MqcOracle {
    n: usize,
    eigen: HamiltonianEigen,
    z: DenseOperator,
}

impl MqcOracle {
    pub fn new(spec: &ChainSpec, budget: &OracleBudget) -> Result<Self> {
        let h = build_hamiltonian_with(spec, budget)?;
        Ok(Self { n: spec.n(), eigen: HamiltonianEigen::new(&h)?, z: total_z(spec.n()) })
    }

    pub fn spectrum(&self, initial: &DeviationState, t: f64, phase_steps: usize) -> Result<MqcSpectrum> {
        if initial.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: initial.n() });
        }
        let n = self.n;
        let rho = self.eigen.evolve(&pauli_sum_to_dense(initial), t)?;
        let zt = self.eigen.evolve(&self.z, t)?;
        let dim = rho.dim();
        // q = (z_a − z_b)/2 = excitations(b) − excitations(a)
        let excitations: Vec<i32> = (0..dim).map(|a| (a as u32).count_ones() as i32).collect();
        let order = |a: usize, b: usize| excitations[b] - excitations[a];

        let max_order = (0..dim)
            .flat_map(|a| (0..dim).map(move |b| (a, b)))
            .filter(|&(a, b)| rho.matrix()[(a, b)].norm() > ORDER_THRESHOLD)
            .map(|(a, b)| order(a, b).unsigned_abs() as usize)
            .max()
            .unwrap_or(0);
        if phase_steps <= 2 * max_order {
            return Err(Error::Aliasing { phase_steps, max_order });
        }

        let products: DMatrix<Complex64> =
            DMatrix::from_fn(dim, dim, |a, b| rho.matrix()[(a, b)] * zt.matrix()[(b, a)]);
        let m = phase_steps as f64;
        let signal: Vec<Complex64> = (0..phase_steps)
            .map(|step| {
                let phi = 2.0 * PI * step as f64 / m;
                let mut acc = Complex64::new(0.0, 0.0);
                for a in 0..dim {
                    for b in 0..dim {
                        let p = products[(a, b)];
                        if p != Complex64::new(0.0, 0.0) {
                            acc += p * Complex64::from_polar(1.0, -phi * order(a, b) as f64);
                        }
                    }
                }
                acc / dim as f64
            })
            .collect();

        let resolvable = ((phase_steps - 1) / 2).min(n) as i32;
        let mut intensities = BTreeMap::new();
        let mut quadrature = BTreeMap::new();
        for q in -(n as i32)..=(n as i32) {
            let j = if q.abs() <= resolvable {
                signal
                    .iter()
                    .enumerate()
                    .map(|(step, s)| s * Complex64::from_polar(1.0, q as f64 * 2.0 * PI * step as f64 / m))
                    .sum::<Complex64>()
                    / m
            } else {
                Complex64::new(0.0, 0.0)
            };
            intensities.insert(q, j.re);
            quadrature.insert(q, j.im);
        }
        Ok(MqcSpectrum { time: t, intensities, quadrature, normalization: normalization_of(initial) })
    }
}

/// Phase-cycled spectrum from the dense oracle (budget from the environment).
pub fn mqc_oracle(spec: &ChainSpec, initial: &DeviationState, t: f64, phase_steps: usize) -> Result<MqcSpectrum> {
    MqcOracle::new(spec, &OracleBudget::from_env()?)?.spectrum(initial, t, phase_steps)
}
