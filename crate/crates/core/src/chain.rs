//! Chain specifications and coupling distributions.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vacuum permeability, T·m/A.
pub const MU0: f64 = 1.256_637_062_12e-6;
/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Angular factor `1 − 3cos²θ` of the secular dipolar coupling for a collinear
/// chain along the field axis (θ = 0).
pub const COLLINEAR_ANGULAR_FACTOR: f64 = -2.0;

/// Relative tolerance used to recognize the engineered coupling profile.
const PROFILE_RTOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Model {
    /// Flip-flop `(d/2)(σxσx + σyσy)`.
    #[serde(rename = "xx")]
    Xx,
    /// Double quantum `(d/2)(σxσx − σyσy)`.
    #[serde(rename = "dq")]
    Dq,
    /// Secular dipolar `d[σzσz − (σxσx + σyσy)/2]`.
    #[serde(rename = "dipolar")]
    DipolarSecular,
}

impl Model {
    pub fn as_str(self) -> &'static str {
        match self {
            Model::Xx => "xx",
            Model::Dq => "dq",
            Model::DipolarSecular => "dipolar",
        }
    }
}

impl std::fmt::Display for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "xx" => Ok(Model::Xx),
            "dq" => Ok(Model::Dq),
            "dipolar" | "dipolar-secular" => Ok(Model::DipolarSecular),
            other => Err(Error::InvalidParameter(format!("unknown model {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Couplings {
    /// Bond couplings `d_1..d_{n−1}`.
    NearestNeighbor(Vec<f64>),
    /// All pair couplings `d_{jl}`, `j < l`, upper triangle in row-major order:
    /// (1,2), (1,3), …, (1,n), (2,3), …
    Full(Vec<f64>),
}

impl Couplings {
    pub fn values(&self) -> &[f64] {
        match self {
            Couplings::NearestNeighbor(v) | Couplings::Full(v) => v,
        }
    }

    fn values_mut(&mut self) -> &mut [f64] {
        match self {
            Couplings::NearestNeighbor(v) | Couplings::Full(v) => v,
        }
    }
}

/// Offset of pair `(j, l)`, 0-based with `j < l`, in a row-major upper triangle.
fn pair_offset(n: usize, j: usize, l: usize) -> usize {
    j * (2 * n - j - 1) / 2 + (l - j - 1)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChainSpec {
    n: usize,
    model: Model,
    couplings: Couplings,
}

impl ChainSpec {
    pub fn nearest_neighbor(model: Model, n: usize, couplings: Vec<f64>) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidDimension("a chain needs at least one spin".into()));
        }
        if couplings.len() != n - 1 {
            return Err(Error::DimensionMismatch { expected: n - 1, found: couplings.len() });
        }
        check_finite(&couplings)?;
        Ok(Self { n, model, couplings: Couplings::NearestNeighbor(couplings) })
    }

    /// Long-range secular dipolar chain from the upper triangle of `d_{jl}`.
    pub fn full_dipolar(n: usize, upper: Vec<f64>) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidDimension("a chain needs at least one spin".into()));
        }
        let expected = n * (n - 1) / 2;
        if upper.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: upper.len() });
        }
        check_finite(&upper)?;
        Ok(Self { n, model: Model::DipolarSecular, couplings: Couplings::Full(upper) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn couplings(&self) -> &Couplings {
        &self.couplings
    }

    /// Bond couplings, if this is a nearest-neighbor chain.
    pub fn bonds(&self) -> Option<&[f64]> {
        match &self.couplings {
            Couplings::NearestNeighbor(v) => Some(v),
            Couplings::Full(_) => None,
        }
    }

    /// Coupling between sites `j` and `l` (1-based, `j ≠ l`).
    pub fn coupling(&self, j: usize, l: usize) -> f64 {
        let (a, b) = if j < l { (j - 1, l - 1) } else { (l - 1, j - 1) };
        if a == b {
            return 0.0;
        }
        match &self.couplings {
            Couplings::NearestNeighbor(v) => {
                if b == a + 1 {
                    v[a]
                } else {
                    0.0
                }
            }
            Couplings::Full(v) => v[pair_offset(self.n, a, b)],
        }
    }

    /// Every coupled pair `(j, l, d_jl)` with `j < l`, 1-based.
    pub fn pairs(&self) -> Vec<(usize, usize, f64)> {
        match &self.couplings {
            Couplings::NearestNeighbor(v) => {
                v.iter().enumerate().map(|(j, &d)| (j + 1, j + 2, d)).collect()
            }
            Couplings::Full(v) => {
                let mut out = Vec::with_capacity(v.len());
                for a in 0..self.n {
                    for b in a + 1..self.n {
                        out.push((a + 1, b + 1, v[pair_offset(self.n, a, b)]));
                    }
                }
                out
            }
        }
    }

    /// Same couplings under a different Hamiltonian model.
    pub fn with_model(&self, model: Model) -> Result<Self> {
        if matches!(self.couplings, Couplings::Full(_)) && model != Model::DipolarSecular {
            return Err(Error::Unsupported(format!(
                "{model} requires nearest-neighbor couplings"
            )));
        }
        Ok(Self { model, ..self.clone() })
    }

    /// JSON document `{"n": …, "model": …, "couplings": […]}` with every float
    /// written to 17 significant digits.
    pub fn to_json(&self) -> String {
        let mut s = String::new();
        write!(s, "{{\"n\":{},\"model\":\"{}\",\"couplings\":[", self.n, self.model).unwrap();
        for (i, c) in self.couplings.values().iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            write!(s, "{c:.16e}").unwrap();
        }
        s.push_str("]}");
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Raw {
            n: usize,
            model: Model,
            couplings: Vec<f64>,
        }
        let raw: Raw = serde_json::from_str(text)?;
        match raw.model {
            Model::Xx | Model::Dq => Self::nearest_neighbor(raw.model, raw.n, raw.couplings),
            Model::DipolarSecular => {
                if raw.n >= 1 && raw.couplings.len() == raw.n - 1 {
                    Self::nearest_neighbor(raw.model, raw.n, raw.couplings)
                } else {
                    Self::full_dipolar(raw.n, raw.couplings)
                }
            }
        }
    }
}

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::InvalidParameter(format!("coupling {} is not finite", i + 1))),
        None => Ok(()),
    }
}

pub fn homogeneous_couplings(n: usize, d: f64) -> Result<ChainSpec> {
    if n < 1 {
        return Err(Error::InvalidDimension(format!("n = {n}, need n ≥ 1")));
    }
    if !d.is_finite() {
        return Err(Error::InvalidParameter(format!("coupling scale {d} is not finite")));
    }
    ChainSpec::nearest_neighbor(Model::Xx, n, vec![d; n - 1])
}

/// Perfect-transfer couplings `d_j = 2d·sqrt(j(n−j))/n`, maximal coupling `d`.
pub fn engineered_couplings(n: usize, d: f64) -> Result<ChainSpec> {
    if n < 2 {
        return Err(Error::InvalidDimension(format!("n = {n}, need n ≥ 2")));
    }
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::InvalidParameter(format!("coupling scale {d} must be positive")));
    }
    ChainSpec::nearest_neighbor(Model::Xx, n, engineered_profile(n, d))
}

fn engineered_profile(n: usize, d: f64) -> Vec<f64> {
    let nf = n as f64;
    (1..n)
        .map(|j| {
            let j = j as f64;
            2.0 * d * (j * (nf - j)).sqrt() / nf
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct DipolarGeometry {
    positions: Vec<f64>,
    prefactor: f64,
}

impl DipolarGeometry {
    pub fn new(positions: Vec<f64>, prefactor: f64) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::InvalidDimension("geometry without sites".into()));
        }
        if positions.iter().any(|p| !p.is_finite()) || !prefactor.is_finite() {
            return Err(Error::InvalidParameter("geometry must be finite".into()));
        }
        for w in positions.windows(2) {
            if w[1] == w[0] {
                return Err(Error::DegenerateGeometry(format!("two sites at {}", w[0])));
            }
            if w[1] < w[0] {
                return Err(Error::InvalidParameter("positions must be increasing".into()));
            }
        }
        Ok(Self { positions, prefactor })
    }

    /// `(μ0/16π)·γ²·ħ` for gyromagnetic ratio `gamma` (rad s⁻¹ T⁻¹); couplings
    /// then come out in rad/s for positions in meters.
    pub fn si_prefactor(gamma: f64) -> f64 {
        MU0 / (16.0 * PI) * gamma * gamma * HBAR
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn prefactor(&self) -> f64 {
        self.prefactor
    }

    fn pair_coupling(&self, j: usize, l: usize) -> f64 {
        let r = (self.positions[l] - self.positions[j]).abs();
        self.prefactor * COLLINEAR_ANGULAR_FACTOR / (r * r * r)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Truncation {
    /// Keep only bonds; the resulting chain evolves under the given model.
    NearestNeighbor(Model),
    /// Keep every pair; the chain is secular dipolar.
    Full,
}

pub fn dipolar_couplings(geom: &DipolarGeometry, truncation: Truncation) -> Result<ChainSpec> {
    let n = geom.positions.len();
    match truncation {
        Truncation::NearestNeighbor(model) => {
            let bonds = (0..n.saturating_sub(1)).map(|j| geom.pair_coupling(j, j + 1)).collect();
            ChainSpec::nearest_neighbor(model, n, bonds)
        }
        Truncation::Full => {
            let mut upper = Vec::with_capacity(n * (n - 1) / 2);
            for j in 0..n {
                for l in j + 1..n {
                    upper.push(geom.pair_coupling(j, l));
                }
            }
            ChainSpec::full_dipolar(n, upper)
        }
    }
}

/// Site positions whose `1/r³` nearest-neighbor couplings follow the engineered
/// profile; the gap of bond `j` is `r_min·(n/2)^{1/3} / (j(n−j))^{1/6}`.
pub fn implant_spacings(n: usize, r_min: f64) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::InvalidDimension(format!("n = {n}, need n ≥ 2")));
    }
    if !(r_min.is_finite() && r_min > 0.0) {
        return Err(Error::InvalidParameter(format!("r_min = {r_min} must be positive")));
    }
    let nf = n as f64;
    let scale = r_min * (nf / 2.0).cbrt();
    let mut positions = Vec::with_capacity(n);
    let mut x = 0.0;
    positions.push(x);
    for j in 1..n {
        let j = j as f64;
        x += scale / (j * (nf - j)).powf(1.0 / 6.0);
        positions.push(x);
    }
    Ok(positions)
}

/// Multiplies every coupling by `1 + ε`, `ε ~ N(0, relative_sigma)`, drawn from
/// a ChaCha8 stream seeded with `seed`.
pub fn perturb_couplings(spec: &ChainSpec, relative_sigma: f64, seed: u64) -> Result<ChainSpec> {
    if !(relative_sigma.is_finite() && relative_sigma >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "relative sigma {relative_sigma} must be non-negative"
        )));
    }
    let mut out = spec.clone();
    if relative_sigma == 0.0 {
        return Ok(out);
    }
    let normal = Normal::new(0.0, relative_sigma)
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for c in out.couplings.values_mut() {
        *c *= 1.0 + normal.sample(&mut rng);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransferTiming {
    /// Mirror time `πn/(4|d|)` of the engineered chain.
    pub t_star: f64,
    /// Spin-wave group velocity in sites per unit time, `4|d|/π`.
    pub group_velocity: f64,
    /// Maximal coupling `|d|` the profile was generated with.
    pub scale: f64,
    n: usize,
}

impl TransferTiming {
    /// Normalized time `τ = 2|d|t/n`; perfect transfer happens at `τ = π/2`.
    pub fn tau(&self, t: f64) -> f64 {
        2.0 * self.scale * t / self.n as f64
    }
}

/// Scale `d` for which `spec` carries the engineered profile, if it does.
pub fn engineered_scale(spec: &ChainSpec) -> Option<f64> {
    let bonds = spec.bonds()?;
    let n = spec.n();
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let d = bonds[0] * nf / (2.0 * (nf - 1.0).sqrt());
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    let profile = engineered_profile(n, d.abs());
    let sign = d.signum();
    let fits = bonds
        .iter()
        .zip(&profile)
        .all(|(b, p)| (b - sign * p).abs() <= PROFILE_RTOL * d.abs());
    fits.then_some(d)
}

pub fn transfer_timing(spec: &ChainSpec) -> Result<TransferTiming> {
    let d = engineered_scale(spec).ok_or_else(|| {
        Error::UnsupportedFamily("couplings do not follow the engineered profile".into())
    })?;
    let scale = d.abs();
    let n = spec.n();
    Ok(TransferTiming {
        t_star: PI * n as f64 / (4.0 * scale),
        group_velocity: 4.0 * scale / PI,
        scale,
        n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn homogeneous_examples() {
        let spec = homogeneous_couplings(4, 1.0).unwrap();
        assert_eq!(spec.bonds().unwrap(), &[1.0, 1.0, 1.0]);
        assert_eq!(spec.model(), Model::Xx);
        assert!(homogeneous_couplings(1, 5.0).unwrap().bonds().unwrap().is_empty());
        let long = homogeneous_couplings(21, 1.0).unwrap();
        assert_eq!(long.bonds().unwrap().len(), 20);
        assert!(long.bonds().unwrap().iter().all(|&c| c == 1.0));
        assert!(matches!(homogeneous_couplings(0, 1.0), Err(Error::InvalidDimension(_))));
    }

    #[test]
    fn engineered_examples() {
        assert_eq!(engineered_couplings(2, 1.0).unwrap().bonds().unwrap(), &[1.0]);
        let three = engineered_couplings(3, 1.0).unwrap();
        for &c in three.bonds().unwrap() {
            assert!(close(c, 2.0 * 2f64.sqrt() / 3.0, 1e-15));
        }
        let four = engineered_couplings(4, 1.0).unwrap();
        let b = four.bonds().unwrap();
        assert!(close(b[0], 3f64.sqrt() / 2.0, 1e-15));
        assert_eq!(b[1], 1.0);
        assert!(close(b[2], 3f64.sqrt() / 2.0, 1e-15));
        assert!(matches!(engineered_couplings(1, 1.0), Err(Error::InvalidDimension(_))));
        assert!(engineered_couplings(4, -1.0).is_err());
    }

    #[test]
    fn engineered_mirror_symmetric_and_bounded() {
        for n in 2..40 {
            let spec = engineered_couplings(n, 1.7).unwrap();
            let b = spec.bonds().unwrap();
            for j in 0..b.len() {
                assert_eq!(b[j], b[b.len() - 1 - j]);
            }
            let half = (n / 2) as f64 * n.div_ceil(2) as f64;
            let expected_max = 1.7 * half.sqrt() * 2.0 / n as f64;
            let max = b.iter().cloned().fold(f64::MIN, f64::max);
            assert!(close(max, expected_max, 1e-14));
            assert!(max <= 1.7 + 1e-15);
            if n % 2 == 0 {
                assert!(close(b[n / 2 - 1], 1.7, 1e-15));
            }
        }
    }

    #[test]
    fn dipolar_equal_spacing_and_gap_doubling() {
        let geom = DipolarGeometry::new(vec![0.0, 2.0, 4.0, 6.0], 3.0).unwrap();
        let spec = dipolar_couplings(&geom, Truncation::NearestNeighbor(Model::Dq)).unwrap();
        assert_eq!(spec.model(), Model::Dq);
        for &c in spec.bonds().unwrap() {
            assert!(close(c, -2.0 * 3.0 / 8.0, 1e-15));
        }
        let stretched = DipolarGeometry::new(vec![0.0, 2.0, 6.0, 8.0], 3.0).unwrap();
        let s = dipolar_couplings(&stretched, Truncation::NearestNeighbor(Model::Xx)).unwrap();
        let b = s.bonds().unwrap();
        assert!(close(b[1] * 8.0, b[0], 1e-15));

        let full = dipolar_couplings(&geom, Truncation::Full).unwrap();
        assert_eq!(full.model(), Model::DipolarSecular);
        assert!(close(full.coupling(1, 3), -6.0 / 64.0, 1e-15));
        assert!(close(full.coupling(4, 1), -6.0 / 216.0, 1e-15));
        assert_eq!(full.pairs().len(), 6);
    }

    #[test]
    fn dipolar_rejects_duplicates() {
        assert!(matches!(
            DipolarGeometry::new(vec![0.0, 1.0, 1.0], 1.0),
            Err(Error::DegenerateGeometry(_))
        ));
    }

    #[test]
    fn implant_spacing_examples() {
        let p = implant_spacings(2, 15e-9).unwrap();
        assert_eq!(p.len(), 2);
        assert!(close(p[1] - p[0], 15e-9, 1e-24));

        for n in [5, 8, 13] {
            let p = implant_spacings(n, 1.0).unwrap();
            let gaps: Vec<f64> = p.windows(2).map(|w| w[1] - w[0]).collect();
            for j in 0..gaps.len() {
                assert!(close(gaps[j], gaps[gaps.len() - 1 - j], 1e-14));
            }
            let min = gaps.iter().cloned().fold(f64::MAX, f64::min);
            assert!(close(min, gaps[(n - 1) / 2], 0.0) || close(min, gaps[n / 2 - 1], 0.0));
        }
    }

    #[test]
    fn implanted_chain_follows_engineered_profile() {
        for n in 2..30 {
            let p = implant_spacings(n, 15e-9).unwrap();
            let geom = DipolarGeometry::new(p, 1e-20).unwrap();
            let spec = dipolar_couplings(&geom, Truncation::NearestNeighbor(Model::Dq)).unwrap();
            let b = spec.bonds().unwrap();
            let nf = n as f64;
            let ratio0 = b[0] / (nf - 1.0).sqrt();
            for (j, c) in b.iter().enumerate() {
                let j = (j + 1) as f64;
                let ratio = c / (j * (nf - j)).sqrt();
                assert!(((ratio - ratio0) / ratio0).abs() < 1e-12, "n={n} j={j}");
            }
            // Negative couplings still carry the engineered profile.
            assert!(engineered_scale(&spec).unwrap() < 0.0);
        }
    }

    #[test]
    fn perturbation_contract() {
        let spec = engineered_couplings(15, 1.0).unwrap();
        assert_eq!(perturb_couplings(&spec, 0.0, 7).unwrap(), spec);
        let a = perturb_couplings(&spec, 0.05, 42).unwrap();
        let b = perturb_couplings(&spec, 0.05, 42).unwrap();
        let bits = |s: &ChainSpec| s.bonds().unwrap().iter().map(|c| c.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
        assert_ne!(a, spec);
        assert_ne!(perturb_couplings(&spec, 0.05, 43).unwrap(), a);
        assert!(matches!(
            perturb_couplings(&spec, -0.1, 1),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn timing_examples() {
        let t4 = transfer_timing(&engineered_couplings(4, 1.0).unwrap()).unwrap();
        assert!(close(t4.t_star, PI, 1e-15));
        let t21 = transfer_timing(&engineered_couplings(21, 1.0).unwrap()).unwrap();
        assert!(close(t21.t_star, 21.0 * PI / 4.0, 1e-13));
        assert!(close(t21.tau(t21.t_star), PI / 2.0, 1e-15));
        for n in 2..30 {
            let t = transfer_timing(&engineered_couplings(n, 2.5).unwrap()).unwrap();
            assert!(close(t.t_star * t.group_velocity, n as f64, 1e-12));
            assert!(t.t_star > 0.0);
        }
        assert!(matches!(
            transfer_timing(&homogeneous_couplings(5, 1.0).unwrap()),
            Err(Error::UnsupportedFamily(_))
        ));
    }

    #[test]
    fn json_round_trip_and_schema() {
        let spec = engineered_couplings(5, 1.3).unwrap().with_model(Model::Dq).unwrap();
        let text = spec.to_json();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["n"], 5);
        assert_eq!(value["model"], "dq");
        assert_eq!(value["couplings"].as_array().unwrap().len(), 4);
        assert_eq!(ChainSpec::from_json(&text).unwrap(), spec);

        let reordered = r#"{"couplings":[1.5, -2.0], "model":"xx", "n":3}"#;
        let s = ChainSpec::from_json(reordered).unwrap();
        assert_eq!(s.bonds().unwrap(), &[1.5, -2.0]);

        let geom = DipolarGeometry::new(vec![0.0, 1.0, 2.5, 3.0], 0.7).unwrap();
        let full = dipolar_couplings(&geom, Truncation::Full).unwrap();
        assert_eq!(ChainSpec::from_json(&full.to_json()).unwrap(), full);

        assert!(ChainSpec::from_json(r#"{"n":3,"model":"xx","couplings":[1.0]}"#).is_err());
        assert!(ChainSpec::from_json(r#"{"n":3,"model":"zz","couplings":[1.0,1.0]}"#).is_err());
    }

    #[test]
    fn full_couplings_reject_xx() {
        let full = ChainSpec::full_dipolar(3, vec![1.0, 0.1, 1.0]).unwrap();
        assert!(full.with_model(Model::Xx).is_err());
    }
}
