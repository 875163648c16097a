use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use clap::Args;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use spinwire::chain::{engineered_couplings, homogeneous_couplings, transfer_timing};
use spinwire::logical::{
    dq_parity_correction, logical_basis, logical_transport, logical_transport_family, Family, LogicalObservable,
};
use spinwire::mqc::{mqc_analytic, prepare_state, MqcOracle, StateKind};
use spinwire::oracle::{
    build_hamiltonian_with, commutator_norm, pauli_string_to_dense, pauli_sum_to_dense, similarity_check,
    staggered_z, total_z, trace_overlap, DenseOperator, HamiltonianEigen, OracleBudget, HARD_MAX_N,
};
use spinwire::propagator::{
    correlation_from, end_autocorrelation_from, jacobi_modes, mixed_state_overlap, propagate, slater_amplitude,
    spectral_decompose, EndState, ZBasisOperator,
};
use spinwire::{ChainSpec, Model, Pauli, PauliString};

use crate::manifest::RunManifest;
use crate::CliError;

const SAMPLES: usize = 3;

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyArgs {
    /// Largest chain size checked against the dense oracle (at most 12).
    #[arg(long, default_value_t = 8)]
    pub max_n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// A case passes when its error is strictly below this value.
    #[arg(long, default_value_t = 1e-8)]
    pub tolerance: f64,
    /// JSON report destination; a manifest is written beside it.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Re-evaluate the failing cases recorded in a JSON report.
    #[arg(long)]
    pub replay: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    PolarizationCorrelation,
    SlaterAmplitude,
    MixedOverlap,
    EndAutocorrelation,
    LogicalClosedForm,
    LogicalTransport,
    ParityCorrection,
    MqcIntensity,
    MqcConservation,
    ConservedCharges,
    SimilarityTransform,
    Unitarity,
    SpectrumLinearity,
}

impl Check {
    const ALL: [Check; 13] = [
        Check::PolarizationCorrelation,
        Check::SlaterAmplitude,
        Check::MixedOverlap,
        Check::EndAutocorrelation,
        Check::LogicalClosedForm,
        Check::LogicalTransport,
        Check::ParityCorrection,
        Check::MqcIntensity,
        Check::MqcConservation,
        Check::ConservedCharges,
        Check::SimilarityTransform,
        Check::Unitarity,
        Check::SpectrumLinearity,
    ];

    fn name(self) -> String {
        serde_json::to_value(self).unwrap().as_str().unwrap().to_string()
    }

    fn min_n(self) -> usize {
        match self {
            Check::SlaterAmplitude | Check::LogicalClosedForm | Check::LogicalTransport | Check::ParityCorrection => 4,
            Check::MqcIntensity | Check::EndAutocorrelation => 4,
            _ => 2,
        }
    }
}

/// Everything needed to re-evaluate one check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Case {
    pub check: Check,
    pub n: usize,
    pub spec: serde_json::Value,
    pub t: f64,
    pub sites: Vec<usize>,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CaseResult {
    pub case: Case,
    pub error: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckSummary {
    pub check: Check,
    pub cases: usize,
    pub max_error: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub max_n: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub passed: bool,
    pub checks: Vec<CheckSummary>,
    pub failures: Vec<CaseResult>,
}

fn random_bonds(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n - 1).map(|_| rng.random_range(0.3..1.7)).collect()
}

fn spec_value(spec: &ChainSpec) -> serde_json::Value {
    serde_json::from_str(&spec.to_json()).expect("chain JSON parses")
}

fn random_sites(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Vec<usize> {
    let mut sites: Vec<usize> = (1..=n).collect();
    for i in 0..m {
        let j = rng.random_range(i..n);
        sites.swap(i, j);
    }
    let mut out = sites[..m].to_vec();
    out.sort();
    out
}

fn generate(max_n: usize, seed: u64) -> Vec<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Vec::new();
    for check in Check::ALL {
        for n in check.min_n()..=max_n {
            for _ in 0..SAMPLES {
                let model = if rng.random_bool(0.5) { Model::Xx } else { Model::Dq };
                let random = ChainSpec::nearest_neighbor(model, n, random_bonds(&mut rng, n)).unwrap();
                let t = rng.random_range(0.0..8.0);
                let (spec, t, sites) = match check {
                    Check::PolarizationCorrelation => {
                        (random, t, vec![rng.random_range(1..=n), rng.random_range(1..=n)])
                    }
                    Check::SlaterAmplitude => {
                        let m = rng.random_range(2..=3.min(n - 1));
                        let mut sites = random_sites(&mut rng, n, m);
                        sites.extend(random_sites(&mut rng, n, m));
                        (random.with_model(Model::Xx).unwrap(), t, sites)
                    }
                    Check::MixedOverlap => (random.with_model(Model::Xx).unwrap(), t, vec![]),
                    Check::EndAutocorrelation => (random, t, vec![rng.random_range(0..2)]),
                    Check::LogicalClosedForm => {
                        let family = rng.random_range(0..2);
                        let spec = if family == 0 { homogeneous_couplings(n, 1.0) } else { engineered_couplings(n, 1.0) };
                        (spec.unwrap(), t, vec![rng.random_range(0..4), family])
                    }
                    Check::LogicalTransport => (random, t, vec![rng.random_range(0..4), rng.random_range(0..2)]),
                    Check::ParityCorrection => {
                        let spec = engineered_couplings(n, 1.0).unwrap();
                        let t_star = transfer_timing(&spec).unwrap().t_star;
                        (spec.with_model(Model::Dq).unwrap(), t_star, vec![])
                    }
                    Check::MqcIntensity => {
                        let spec = homogeneous_couplings(n, 1.0).unwrap().with_model(Model::Dq).unwrap();
                        (spec, t, vec![rng.random_range(0..3)])
                    }
                    Check::MqcConservation => (random.with_model(Model::Dq).unwrap(), t, vec![]),
                    Check::ConservedCharges | Check::SimilarityTransform => (random.with_model(Model::Xx).unwrap(), t, vec![]),
                    Check::Unitarity => (random, rng.random_range(-20.0..20.0), vec![]),
                    Check::SpectrumLinearity => (engineered_couplings(n, 1.0).unwrap(), 0.0, vec![]),
                };
                cases.push(Case { check, n, spec: spec_value(&spec), t, sites, seed: rng.random() });
            }
        }
    }
    cases
}

fn eigen(spec: &ChainSpec) -> Result<HamiltonianEigen, CliError> {
    let budget = OracleBudget::new(spec.n().max(2))?;
    Ok(HamiltonianEigen::new(&build_hamiltonian_with(spec, &budget)?)?)
}

fn bits_of(n: usize, sites: &[usize]) -> usize {
    sites.iter().fold(0, |acc, &s| acc | 1 << (n - s))
}

fn random_operator(rng: &mut ChaCha8Rng, n: usize) -> Result<(ZBasisOperator, DenseOperator), CliError> {
    let mut op = ZBasisOperator::new(n)?;
    let mut dense = DMatrix::<Complex64>::zeros(1 << n, 1 << n);
    for _ in 0..12 {
        let m = rng.random_range(0..=n);
        let ket = bits_of(n, &random_sites(rng, n, m));
        let bra = bits_of(n, &random_sites(rng, n, m));
        let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        op.add_bits(ket as u32, bra as u32, c)?;
        dense[(ket, bra)] += c;
    }
    Ok((op, DenseOperator::new(n, dense)?))
}

fn oracle_logical(spec: &ChainSpec, alpha: LogicalObservable, t: f64, corrected: bool) -> Result<f64, CliError> {
    let basis = logical_basis(spec.model(), spec.n())?;
    let src = pauli_sum_to_dense(basis.source(alpha));
    let tgt = if corrected { basis.corrected_target(alpha) } else { basis.target(alpha).clone() };
    Ok(2.0 * eigen(spec)?.correlation_series(&src, &pauli_sum_to_dense(&tgt), &[t])?[0].re)
}

fn evaluate(case: &Case) -> Result<f64, CliError> {
    let spec = ChainSpec::from_json(&case.spec.to_string())?;
    let n = spec.n();
    let model = spec.model();
    let t = case.t;
    let prop = || -> Result<_, CliError> { Ok(propagate(&spectral_decompose(&spec)?, t)) };
    let site = |i: usize| -> Result<usize, CliError> {
        case.sites.get(i).copied().ok_or_else(|| CliError::Usage(format!("case is missing site entry {i}")))
    };
    let error = match case.check {
        Check::PolarizationCorrelation => {
            let (j, l) = (site(0)?, site(1)?);
            let z = |s| Ok::<_, CliError>(pauli_string_to_dense(&PauliString::from_sites(n, &[(s, Pauli::Z)])?));
            let exact = eigen(&spec)?.correlation_series(&z(j)?, &z(l)?, &[t])?[0];
            (correlation_from(&prop()?, j, l, model)? - exact.re).abs().max(exact.im.abs())
        }
        Check::SlaterAmplitude => {
            let m = case.sites.len() / 2;
            let (p, r) = case.sites.split_at(m);
            let exact = eigen(&spec)?.unitary(t)[(bits_of(n, r), bits_of(n, p))];
            (slater_amplitude(&prop()?, p, r)? - exact).norm()
        }
        Check::MixedOverlap => {
            let mut rng = ChaCha8Rng::seed_from_u64(case.seed);
            let (a, da) = random_operator(&mut rng, n)?;
            let (b, db) = random_operator(&mut rng, n)?;
            let evolved = eigen(&spec)?.evolve(&da, t)?;
            let exact = trace_overlap(&evolved, &db)? * (1u64 << n) as f64;
            (mixed_state_overlap(&prop()?, &a, &b)? - exact).norm()
        }
        Check::EndAutocorrelation => {
            let (kind, end) = match site(0)? {
                0 => (StateKind::ZEnds, EndState::ZEnds),
                _ => (StateKind::YLogical, EndState::YLogical),
            };
            let rho = pauli_sum_to_dense(prepare_state(n, kind)?.as_sum());
            let norm = trace_overlap(&rho, &rho)?.re;
            let exact = eigen(&spec)?.correlation_series(&rho, &rho, &[t])?[0].re / norm;
            (end_autocorrelation_from(&prop()?, end, model)? - exact).abs()
        }
        Check::LogicalClosedForm => {
            let alpha = LogicalObservable::ALL[site(0)? % 4];
            let family = if site(1)? == 0 { Family::Homogeneous } else { Family::Engineered };
            (logical_transport_family(n, 1.0, family, alpha, t)? - oracle_logical(&spec, alpha, t, false)?).abs()
        }
        Check::LogicalTransport => {
            let alpha = LogicalObservable::ALL[site(0)? % 4];
            let corrected = site(1)? == 1;
            let basis = logical_basis(model, n)?;
            (logical_transport(&prop()?, &basis, alpha, corrected)? - oracle_logical(&spec, alpha, t, corrected)?).abs()
        }
        Check::ParityCorrection => {
            let corrected = dq_parity_correction(n);
            let mut f = 0.0;
            for alpha in LogicalObservable::ALL {
                f += oracle_logical(&spec, alpha, t, corrected)? / 4.0;
            }
            (f - 1.0).abs()
        }
        Check::MqcIntensity => {
            let kind = [StateKind::ZEnds, StateKind::YLogical, StateKind::XLogical][site(0)? % 3];
            let d = spec.coupling(1, 2);
            let oracle = MqcOracle::new(&spec, &OracleBudget::new(n.max(2))?)?;
            let numeric = oracle.spectrum(&prepare_state(n, kind)?, t, 8)?.normalized();
            let analytic = mqc_analytic(n, d, kind, t)?;
            (-4..=4).map(|q| (numeric.intensity(q) - analytic.intensity(q)).abs()).fold(0.0, f64::max)
        }
        Check::MqcConservation => {
            let oracle = MqcOracle::new(&spec, &OracleBudget::new(n.max(2))?)?;
            let rho = prepare_state(n, StateKind::ZEnds)?;
            (oracle.spectrum(&rho, t, 8)?.total() - oracle.spectrum(&rho, 0.0, 8)?.total()).abs()
        }
        Check::ConservedCharges => {
            let budget = OracleBudget::new(n.max(2))?;
            let hx = build_hamiltonian_with(&spec.with_model(Model::Xx)?, &budget)?;
            let hd = build_hamiltonian_with(&spec.with_model(Model::Dq)?, &budget)?;
            commutator_norm(&hx, &total_z(n))?.max(commutator_norm(&hd, &staggered_z(n))?)
        }
        Check::SimilarityTransform => similarity_check(n, case.seed, &OracleBudget::new(n.max(2))?)?,
        Check::Unitarity => {
            let a = prop()?;
            let u = a.amplitudes() * a.amplitudes().adjoint() - DMatrix::<Complex64>::identity(n, n);
            u.iter().map(|z| z.norm()).fold(0.0, f64::max)
        }
        Check::SpectrumLinearity => {
            let decomp = spectral_decompose(&spec)?;
            let d = spec.coupling(1, 2) * n as f64 / (2.0 * ((n - 1) as f64).sqrt());
            let mut err = 0.0f64;
            for (k, w) in decomp.omegas().iter().enumerate() {
                err = err.max((w - 2.0 * d / n as f64 * (2.0 * (k + 1) as f64 - (n + 1) as f64)).abs());
            }
            let alpha = jacobi_modes(n)?;
            for k in 0..n {
                let eig = decomp.modes().column(k);
                let closed = alpha.column(n - 1 - k);
                err = err.max((eig - closed).amax().min((eig + closed).amax()));
            }
            err
        }
    };
    Ok(error)
}

fn passes(error: f64, tolerance: f64) -> bool {
    error < tolerance
}

fn run_cases(cases: Vec<Case>) -> Result<Vec<CaseResult>, CliError> {
    cases
        .into_par_iter()
        .map(|case| {
            let error = evaluate(&case)?;
            Ok(CaseResult { case, error })
        })
        .collect()
}

fn build_report(max_n: usize, seed: u64, tolerance: f64, results: Vec<CaseResult>) -> Report {
    let mut checks = Vec::new();
    for check in Check::ALL {
        let errors: Vec<f64> = results.iter().filter(|r| r.case.check == check).map(|r| r.error).collect();
        if errors.is_empty() {
            continue;
        }
        let max_error = errors.iter().copied().fold(0.0, |m: f64, e| if e.is_nan() { f64::NAN } else { m.max(e) });
        checks.push(CheckSummary {
            check,
            cases: errors.len(),
            max_error,
            passed: errors.iter().all(|&e| passes(e, tolerance)),
        });
    }
    let failures: Vec<CaseResult> = results.into_iter().filter(|r| !passes(r.error, tolerance)).collect();
    Report { max_n, seed, tolerance, passed: failures.is_empty(), checks, failures }
}

pub fn render(report: &Report) -> String {
    let mut s = String::new();
    writeln!(s, "spinwire verify: max_n={} seed={} tolerance={:e}", report.max_n, report.seed, report.tolerance).unwrap();
    for c in &report.checks {
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        writeln!(s, "{:<26} {:>4} cases  max error {:.3e}  {verdict}", c.check.name(), c.cases, c.max_error).unwrap();
    }
    for f in &report.failures {
        let inputs = serde_json::to_string(&f.case).unwrap();
        writeln!(s, "FAIL {} n={} error={:.3e} replay={inputs}", f.case.check.name(), f.case.n, f.error).unwrap();
    }
    if report.passed {
        writeln!(s, "all checks passed").unwrap();
    } else {
        writeln!(s, "{} case(s) failed", report.failures.len()).unwrap();
    }
    s
}

pub fn verify(args: &VerifyArgs) -> Result<(), CliError> {
    if !(args.tolerance >= 0.0 && args.tolerance.is_finite()) {
        return Err(CliError::Usage(format!("--tolerance {} must be a finite non-negative number", args.tolerance)));
    }
    let report = match &args.replay {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            let old: Report = serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            let cases = old.failures.into_iter().map(|r| r.case).collect();
            build_report(old.max_n, old.seed, args.tolerance, run_cases(cases)?)
        }
        None => {
            if !(2..=HARD_MAX_N).contains(&args.max_n) {
                return Err(CliError::Usage(format!("--max-n {} must lie in 2..={HARD_MAX_N}", args.max_n)));
            }
            build_report(args.max_n, args.seed, args.tolerance, run_cases(generate(args.max_n, args.seed))?)
        }
    };
    print!("{}", render(&report));
    if let Some(out) = &args.out {
        let json = serde_json::to_string_pretty(&report).expect("report serializes");
        fs::write(out, json + "\n")?;
        let params = serde_json::to_value(args).expect("arguments serialize");
        RunManifest::new("verify", params, vec![out.clone()]).write_beside(out)?;
    }
    if report.passed {
        Ok(())
    } else {
        Err(CliError::Verification(format!("{} case(s) failed", report.failures.len())))
    }
}
