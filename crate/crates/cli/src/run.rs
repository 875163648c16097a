use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::Args;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use spinwire::chain::{engineered_scale, transfer_timing};
use spinwire::logical::{
    dq_parity_correction, logical_basis, logical_transport, logical_transport_family, Family, LogicalObservable,
};
use spinwire::mqc::{mqc_analytic, prepare_state, MqcOracle, StateKind, DEFAULT_PHASE_STEPS};
use spinwire::oracle::OracleBudget;
use spinwire::output::{CsvWriter, Field};
use spinwire::propagator::{correlation_from, propagate, spectral_decompose};
use spinwire::Model;

use crate::args::{ChainArgs, EngineArg, FamilyArg, InitialArg, ModelArg, OutputArgs};
use crate::manifest::RunManifest;
use crate::CliError;

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub chain: ChainArgs,
    #[arg(long, value_enum, default_value = "xx")]
    pub model: ModelArg,
    /// Site carrying the initial polarization.
    #[arg(long, default_value_t = 1)]
    pub j: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogicalArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub chain: ChainArgs,
    #[arg(long, value_enum, default_value = "xx")]
    pub model: ModelArg,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MqcArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub chain: ChainArgs,
    #[arg(long, value_enum, default_value = "dq")]
    pub model: ModelArg,
    #[arg(long, value_enum, default_value = "z_ends")]
    pub initial: InitialArg,
    #[arg(long, value_enum, default_value = "analytic")]
    pub engine: EngineArg,
    /// Number of collective phase increments for the oracle engine.
    #[arg(long, default_value_t = DEFAULT_PHASE_STEPS)]
    pub phase_steps: usize,
    /// Oracle size limit; overrides SPINWIRE_ORACLE_MAX_N.
    #[arg(long)]
    pub max_n: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub chain: ChainArgs,
}

fn emit(command: &str, params: serde_json::Value, output: &OutputArgs, header: &[&str], rows: Vec<Vec<Field>>) -> Result<(), CliError> {
    match &output.out {
        Some(path) => {
            write_rows(BufWriter::new(File::create(path)?), header, &rows)?;
            RunManifest::new(command, params, vec![path.clone()]).write_beside(path)?;
        }
        None => write_rows(io::stdout().lock(), header, &rows)?,
    }
    Ok(())
}

fn write_rows<W: Write>(w: W, header: &[&str], rows: &[Vec<Field>]) -> io::Result<()> {
    let mut csv = CsvWriter::new(w, header)?;
    for row in rows {
        csv.row(row)?;
    }
    csv.finish()?;
    Ok(())
}

fn params<T: Serialize>(args: &T) -> serde_json::Value {
    serde_json::to_value(args).expect("arguments serialize")
}

pub fn transfer(args: &TransferArgs) -> Result<(), CliError> {
    let model = Model::from(args.model);
    let spec = args.chain.spec(model)?;
    let n = spec.n();
    if !(1..=n).contains(&args.j) {
        return Err(CliError::Usage(format!("--j {} is outside 1..={n}", args.j)));
    }
    let decomp = spectral_decompose(&spec)?;
    let scale = engineered_scale(&spec)
        .map(f64::abs)
        .unwrap_or_else(|| spec.bonds().unwrap_or(&[]).iter().fold(0.0, |m: f64, b| m.max(b.abs())));
    let times = args.output.grid.points();
    let blocks: Vec<Vec<Vec<Field>>> = times
        .par_iter()
        .map(|&t| {
            let prop = propagate(&decomp, t);
            let tau = 2.0 * scale * t / n as f64;
            (1..=n)
                .map(|l| {
                    let c = correlation_from(&prop, args.j, l, model)?;
                    Ok(vec![Field::Float(t), Field::Float(tau), Field::Int(l as i64), Field::Float(c)])
                })
                .collect::<Result<Vec<_>, CliError>>()
        })
        .collect::<Result<_, _>>()?;
    emit("transfer", params(args), &args.output, &["t", "tau", "site", "correlation"], blocks.concat())
}

pub fn logical(args: &LogicalArgs) -> Result<(), CliError> {
    let model = Model::from(args.model);
    let n = args.chain.n;
    if n < 4 {
        return Err(CliError::Usage(format!("logical transport needs n ≥ 4, got {n}")));
    }
    let closed_family = match (args.chain.family, model, args.chain.sigma == 0.0) {
        (FamilyArg::Homogeneous, Model::Xx, true) => Some(Family::Homogeneous),
        (FamilyArg::Engineered, Model::Xx, true) => Some(Family::Engineered),
        _ => None,
    };
    let spec = args.chain.spec(model)?;
    let decomp = spectral_decompose(&spec)?;
    let basis = logical_basis(model, n)?;
    let corrected = model == Model::Dq && dq_parity_correction(n);
    let times = args.output.grid.points();
    let rows: Vec<Vec<Field>> = times
        .par_iter()
        .map(|&t| {
            let prop = propagate(&decomp, t);
            let mut row = vec![Field::Float(t)];
            let mut sum = 0.0;
            for alpha in LogicalObservable::ALL {
                let c = match closed_family {
                    Some(family) => logical_transport_family(n, args.chain.d, family, alpha, t)?,
                    None => logical_transport(&prop, &basis, alpha, corrected)?,
                };
                sum += c;
                row.push(Field::Float(c));
            }
            row.push(Field::Float(sum / 4.0));
            Ok(row)
        })
        .collect::<Result<_, CliError>>()?;
    emit("logical", params(args), &args.output, &["t", "C_x", "C_y", "C_z", "C_1", "F"], rows)
}

pub fn mqc(args: &MqcArgs) -> Result<(), CliError> {
    let model = Model::from(args.model);
    let kind = StateKind::from(args.initial);
    let n = args.chain.n;
    let times = args.output.grid.points();
    let rows: Vec<Vec<Field>> = match args.engine {
        EngineArg::Analytic => {
            if args.chain.family != FamilyArg::Homogeneous || model != Model::Dq || args.chain.sigma != 0.0 {
                return Err(CliError::Usage(
                    "the analytic engine covers the homogeneous nearest-neighbor dq chain only; use --engine oracle".into(),
                ));
            }
            times
                .par_iter()
                .map(|&t| {
                    let s = mqc_analytic(n, args.chain.d, kind, t)?;
                    Ok(vec![Field::Float(t), Field::Float(s.intensity(0)), Field::Float(s.intensity(2))])
                })
                .collect::<Result<_, CliError>>()?
        }
        EngineArg::Oracle => {
            let budget = match args.max_n {
                Some(m) => OracleBudget::new(m)?,
                None => OracleBudget::from_env()?,
            };
            let spec = args.chain.spec(model)?;
            let oracle = MqcOracle::new(&spec, &budget)?;
            let rho = prepare_state(n, kind)?;
            times
                .par_iter()
                .map(|&t| {
                    let s = oracle.spectrum(&rho, t, args.phase_steps)?.normalized();
                    Ok(vec![Field::Float(t), Field::Float(s.intensity(0)), Field::Float(s.intensity(2))])
                })
                .collect::<Result<_, CliError>>()?
        }
    };
    emit("mqc", params(args), &args.output, &["t", "J0", "J2"], rows)
}

pub fn timing(args: &TimingArgs) -> Result<(), CliError> {
    let spec = args.chain.spec(Model::Xx)?;
    let timing = transfer_timing(&spec)?;
    let mut out = io::stdout().lock();
    writeln!(out, "n = {}", spec.n())?;
    writeln!(out, "d = {:e}", timing.scale)?;
    writeln!(out, "t_star = {:e}", timing.t_star)?;
    writeln!(out, "group_velocity = {:e}", timing.group_velocity)?;
    writeln!(out, "tau(t_star) = {}", timing.tau(timing.t_star))?;
    Ok(())
}

#[derive(Args, Clone, Debug)]
pub struct ReplayArgs {
    /// Manifest written by a previous run.
    pub manifest: PathBuf,
    /// Write outputs here instead of the recorded path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn replay(args: &ReplayArgs) -> Result<(), CliError> {
    let manifest = RunManifest::read(&args.manifest)?;
    let mut parameters = manifest.parameters.clone();
    if let Some(out) = &args.out {
        parameters["out"] = serde_json::to_value(out).expect("path serializes");
    }
    let bad = |e: serde_json::Error| CliError::Usage(format!("manifest parameters: {e}"));
    match manifest.command.as_str() {
        "transfer" => transfer(&serde_json::from_value(parameters).map_err(bad)?),
        "logical" => logical(&serde_json::from_value(parameters).map_err(bad)?),
        "mqc" => mqc(&serde_json::from_value(parameters).map_err(bad)?),
        "verify" => crate::verify::verify(&serde_json::from_value(parameters).map_err(bad)?),
        other => Err(CliError::Usage(format!("manifest command `{other}` cannot be replayed"))),
    }
}
