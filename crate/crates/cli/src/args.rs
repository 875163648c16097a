use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use spinwire::chain::{
    dipolar_couplings, engineered_couplings, homogeneous_couplings, implant_spacings, perturb_couplings,
    DipolarGeometry, Truncation,
};
use spinwire::mqc::StateKind;
use spinwire::output::linear_grid;
use spinwire::{ChainSpec, Model};

use crate::CliError;

/// Electron gyromagnetic ratio in rad s⁻¹ T⁻¹.
pub const GAMMA_ELECTRON: f64 = 1.760_859_630_23e11;

/// `start:end:steps`, inclusive of both ends.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Grid {
    pub start: f64,
    pub end: f64,
    pub steps: usize,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        linear_grid(self.start, self.end, self.steps)
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, end, steps] = parts[..] else {
            return Err(format!("grid `{s}` is not of the form start:end:steps"));
        };
        let float = |x: &str| match x.trim().parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(format!("grid bound `{x}` is not a finite number")),
        };
        let steps = steps.trim().parse::<usize>().map_err(|_| format!("grid steps `{steps}` is not a non-negative integer"))?;
        Ok(Grid { start: float(start)?, end: float(end)?, steps })
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.end, self.steps)
    }
}

impl TryFrom<String> for Grid {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Grid> for String {
    fn from(g: Grid) -> String {
        g.to_string()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyArg {
    Homogeneous,
    Engineered,
    Dipolar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelArg {
    Xx,
    Dq,
    Dipolar,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Model {
        match m {
            ModelArg::Xx => Model::Xx,
            ModelArg::Dq => Model::Dq,
            ModelArg::Dipolar => Model::DipolarSecular,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineArg {
    Analytic,
    Oracle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialArg {
    #[value(name = "z_ends")]
    ZEnds,
    #[value(name = "y_logical")]
    YLogical,
    #[value(name = "x_logical")]
    XLogical,
    #[value(name = "full_z")]
    FullZ,
}

impl From<InitialArg> for StateKind {
    fn from(k: InitialArg) -> StateKind {
        match k {
            InitialArg::ZEnds => StateKind::ZEnds,
            InitialArg::YLogical => StateKind::YLogical,
            InitialArg::XLogical => StateKind::XLogical,
            InitialArg::FullZ => StateKind::FullZ,
        }
    }
}

/// Chain options shared by every run command.
#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainArgs {
    /// Number of spins.
    #[arg(long)]
    pub n: usize,
    /// Coupling scale (maximal coupling for the engineered family).
    #[arg(long, default_value_t = 1.0)]
    pub d: f64,
    #[arg(long, value_enum, default_value = "engineered")]
    pub family: FamilyArg,
    /// Minimal spacing in meters for the dipolar family.
    #[arg(long, default_value_t = 15e-9)]
    pub r_min: f64,
    /// Gyromagnetic ratio in rad/(s·T) for the dipolar family.
    #[arg(long, default_value_t = GAMMA_ELECTRON)]
    pub gamma: f64,
    /// Relative Gaussian disorder applied to the couplings.
    #[arg(long, default_value_t = 0.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl ChainArgs {
    pub fn spec(&self, model: Model) -> Result<ChainSpec, CliError> {
        let base = match self.family {
            FamilyArg::Homogeneous => homogeneous_couplings(self.n, self.d)?.with_model(model)?,
            FamilyArg::Engineered => engineered_couplings(self.n, self.d)?.with_model(model)?,
            FamilyArg::Dipolar => {
                let positions = implant_spacings(self.n, self.r_min)?;
                let geom = DipolarGeometry::new(positions, DipolarGeometry::si_prefactor(self.gamma))?;
                let truncation = match model {
                    Model::DipolarSecular => Truncation::Full,
                    m => Truncation::NearestNeighbor(m),
                };
                dipolar_couplings(&geom, truncation)?
            }
        };
        if self.sigma == 0.0 {
            return Ok(base);
        }
        if base.bonds().is_none() {
            return Err(CliError::Usage("--sigma requires nearest-neighbor couplings".into()));
        }
        Ok(perturb_couplings(&base, self.sigma, self.seed)?)
    }
}

/// Options common to CSV-producing commands.
#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputArgs {
    /// Time grid `start:end:steps`.
    #[arg(long, default_value = "0:20:201")]
    pub grid: Grid,
    /// CSV destination; a manifest is written to `<out>.manifest.json`.
    /// Without it the CSV goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
