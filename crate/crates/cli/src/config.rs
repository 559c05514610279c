//! Run settings: command-line flags over an optional JSON file over defaults.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use dirac_fem_core::experiment::{
    DEFAULT_DOMAIN_END, DEFAULT_INNER_NODES, DEFAULT_INTENSITY, DEFAULT_INTERIOR_NODES,
};
use dirac_fem_core::physics::{nuclear_radius, DEFAULT_LIGHT_SPEED};
use dirac_fem_core::reference;
use dirac_fem_core::{
    Experiment, MatchTolerances, MeshConfig, MeshSpec, Method, PhysicalParams, PotentialModel,
};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::output::num;

pub const DEFAULT_LEVELS: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NucleusKind {
    Point,
    Extended,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodChoice {
    Galerkin,
    Supg,
    Both,
}

impl MethodChoice {
    pub fn methods(self) -> Vec<Method> {
        match self {
            MethodChoice::Galerkin => vec![Method::Galerkin],
            MethodChoice::Supg => vec![Method::Supg],
            MethodChoice::Both => vec![Method::Galerkin, Method::Supg],
        }
    }

    fn name(self) -> &'static str {
        match self {
            MethodChoice::Galerkin => "galerkin",
            MethodChoice::Supg => "supg",
            MethodChoice::Both => "both",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Tsv,
}

/// Light speed: a number, or `calibrate` to fit it to the reference exact values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LightSpeed {
    Value(f64),
    Calibrate,
}

impl FromStr for LightSpeed {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("calibrate") {
            return Ok(LightSpeed::Calibrate);
        }
        s.parse::<f64>()
            .map(LightSpeed::Value)
            .map_err(|_| format!("expected a number or \"calibrate\", got {s:?}"))
    }
}

impl<'de> Deserialize<'de> for LightSpeed {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Word(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(x) => Ok(LightSpeed::Value(x)),
            Raw::Word(w) => w.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// One value or a list, for node counts in a config file.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> OneOrMany<T> {
    fn into_vec(self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(v) => v,
        }
    }
}

/// Flags shared by every subcommand. Unset flags fall back to the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// JSON config file; its keys match the long flag names with `_` for `-`
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Nuclear charge
    #[arg(long)]
    pub z: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<i32>,
    /// Particle mass (atomic units)
    #[arg(long, visible_alias = "m")]
    pub mass: Option<f64>,
    /// Speed of light in atomic units, or `calibrate`
    #[arg(long)]
    pub c: Option<LightSpeed>,
    #[arg(long, value_enum)]
    pub nucleus: Option<NucleusKind>,
    /// Nuclear radius in bohr (default from the mass number)
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub mass_number: Option<f64>,
    /// Domain start
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    /// Domain end
    #[arg(long)]
    pub b: Option<f64>,
    /// Interior nodes; a comma separated list for `convergence`
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    /// Node intensity of the exponential mesh
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Interior nodes inside an extended nucleus
    #[arg(long)]
    pub inner_nodes: Option<usize>,
    #[arg(long, value_enum)]
    pub method: Option<MethodChoice>,
    /// Genuine levels to report
    #[arg(long)]
    pub levels: Option<usize>,
    /// Kappa columns of `extended`
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub kappas: Option<Vec<i32>>,
    /// Relative tolerance for matching computed to exact levels
    #[arg(long)]
    pub tol_rel: Option<f64>,
    /// Tolerance below which two candidates for one level are a conflict
    #[arg(long)]
    pub tol_coin: Option<f64>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Files to write
    #[arg(long, value_enum, value_delimiter = ',')]
    pub format: Option<Vec<Format>>,
    /// Also write the pencil matrices as row,col,value triplets into this directory
    #[arg(long)]
    pub dump_pencil: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    z: Option<u32>,
    kappa: Option<i32>,
    #[serde(alias = "m")]
    mass: Option<f64>,
    c: Option<LightSpeed>,
    nucleus: Option<NucleusKind>,
    radius: Option<f64>,
    mass_number: Option<f64>,
    a: Option<f64>,
    b: Option<f64>,
    n: Option<OneOrMany<usize>>,
    epsilon: Option<f64>,
    inner_nodes: Option<usize>,
    method: Option<MethodChoice>,
    levels: Option<usize>,
    kappas: Option<Vec<i32>>,
    tol_rel: Option<f64>,
    tol_coin: Option<f64>,
    out: Option<PathBuf>,
    format: Option<OneOrMany<Format>>,
    dump_pencil: Option<PathBuf>,
}

impl FileConfig {
    fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Which subcommand the settings are resolved for; sets some defaults.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Spectrum,
    Convergence,
    PollutionReport,
    Extended,
    CalibrateC,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Nucleus {
    Point,
    Extended { radius: f64 },
}

/// Fully resolved run settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub z: u32,
    pub kappa: i32,
    pub mass: f64,
    pub light_speed: f64,
    pub calibrated: bool,
    pub nucleus: Nucleus,
    pub a: f64,
    pub b: f64,
    pub n: Vec<usize>,
    pub epsilon: f64,
    pub inner_nodes: usize,
    pub method: MethodChoice,
    pub levels: usize,
    pub kappas: Vec<i32>,
    pub tolerances: MatchTolerances,
    pub out: PathBuf,
    pub formats: Vec<Format>,
    pub dump_pencil: Option<PathBuf>,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl Settings {
    pub fn resolve(kind: CommandKind, args: &RunArgs) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let z = args.z.or(file.z).unwrap_or(reference::CHARGE);
        let kappa = args.kappa.or(file.kappa).unwrap_or(-2);
        let mass = args.mass.or(file.mass).unwrap_or(1.0);
        let c = args
            .c
            .or(file.c)
            .unwrap_or(LightSpeed::Value(DEFAULT_LIGHT_SPEED));
        let (light_speed, calibrated) = match c {
            LightSpeed::Value(v) => (v, false),
            LightSpeed::Calibrate => {
                if z != reference::CHARGE || mass != 1.0 {
                    return Err(config_err(format!(
                        "c = \"calibrate\" fits the Z = {} unit-mass reference values; got z = {z}, mass = {mass}",
                        reference::CHARGE
                    )));
                }
                (reference::calibrated_light_speed()?.light_speed, true)
            }
        };

        let default_nucleus = if kind == CommandKind::Extended {
            NucleusKind::Extended
        } else {
            NucleusKind::Point
        };
        let nucleus_kind = args.nucleus.or(file.nucleus).unwrap_or(default_nucleus);
        if kind == CommandKind::Extended && nucleus_kind != NucleusKind::Extended {
            return Err(config_err("the extended command needs nucleus = extended"));
        }
        let mass_number = args
            .mass_number
            .or(file.mass_number)
            .unwrap_or(reference::MASS_NUMBER);
        let nucleus = match nucleus_kind {
            NucleusKind::Point => Nucleus::Point,
            NucleusKind::Extended => Nucleus::Extended {
                radius: args
                    .radius
                    .or(file.radius)
                    .unwrap_or_else(|| nuclear_radius(mass_number)),
            },
        };

        let default_n = match kind {
            CommandKind::Convergence => reference::SWEEP_NODE_COUNTS.to_vec(),
            _ => vec![DEFAULT_INTERIOR_NODES],
        };
        let n = args
            .n
            .clone()
            .or_else(|| file.n.clone().map(OneOrMany::into_vec))
            .unwrap_or(default_n);
        if n.is_empty() {
            return Err(config_err("no node count given"));
        }
        if kind != CommandKind::Convergence && n.len() != 1 {
            return Err(config_err(
                "a single node count is expected; lists are for convergence",
            ));
        }

        let default_method = match kind {
            CommandKind::Spectrum | CommandKind::PollutionReport => MethodChoice::Both,
            _ => MethodChoice::Supg,
        };
        let method = args.method.or(file.method).unwrap_or(default_method);
        if kind == CommandKind::PollutionReport && method != MethodChoice::Both {
            return Err(config_err("pollution-report always compares both methods"));
        }

        let levels = args.levels.or(file.levels).unwrap_or(DEFAULT_LEVELS);
        if levels == 0 {
            return Err(config_err("levels must be positive"));
        }
        let tolerances = MatchTolerances {
            relative: args
                .tol_rel
                .or(file.tol_rel)
                .unwrap_or(MatchTolerances::default().relative),
            coincidence: args
                .tol_coin
                .or(file.tol_coin)
                .unwrap_or(MatchTolerances::default().coincidence),
        };
        if !(tolerances.relative > 0.0 && tolerances.coincidence > 0.0) {
            return Err(config_err("matching tolerances must be positive"));
        }
        let kappas = args
            .kappas
            .clone()
            .or(file.kappas)
            .unwrap_or_else(|| reference::EXTENDED_KAPPAS.to_vec());
        if kappas.is_empty() {
            return Err(config_err("no kappa values given"));
        }
        let mut formats = args
            .format
            .clone()
            .or_else(|| file.format.map(OneOrMany::into_vec))
            .unwrap_or_else(|| vec![Format::Csv, Format::Json, Format::Tsv]);
        formats.sort();
        formats.dedup();

        let settings = Settings {
            z,
            kappa,
            mass,
            light_speed,
            calibrated,
            nucleus,
            a: args.a.or(file.a).unwrap_or(0.0),
            b: args.b.or(file.b).unwrap_or(DEFAULT_DOMAIN_END),
            n,
            epsilon: args.epsilon.or(file.epsilon).unwrap_or(DEFAULT_INTENSITY),
            inner_nodes: args
                .inner_nodes
                .or(file.inner_nodes)
                .unwrap_or(DEFAULT_INNER_NODES),
            method,
            levels,
            kappas,
            tolerances,
            out: args
                .out
                .clone()
                .or(file.out)
                .unwrap_or_else(|| PathBuf::from(".")),
            formats,
            dump_pencil: args.dump_pencil.clone().or(file.dump_pencil),
        };
        if kind != CommandKind::CalibrateC {
            // surface parameter and mesh errors before any output is written
            for k in settings.kappa_list(kind) {
                settings.experiment(k, settings.n[0])?;
            }
        }
        Ok(settings)
    }

    pub fn kappa_list(&self, kind: CommandKind) -> Vec<i32> {
        if kind == CommandKind::Extended {
            self.kappas.clone()
        } else {
            vec![self.kappa]
        }
    }

    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }

    pub fn params(&self, kappa: i32) -> Result<PhysicalParams, CliError> {
        Ok(PhysicalParams::new(
            self.mass,
            self.light_speed,
            self.z,
            kappa,
        )?)
    }

    pub fn experiment(&self, kappa: i32, n: usize) -> Result<Experiment, CliError> {
        let params = self.params(kappa)?;
        let (model, mesh) = match self.nucleus {
            Nucleus::Point => (
                PotentialModel::PointNucleus,
                MeshSpec::Exponential(MeshConfig::new(self.a, self.b, n, self.epsilon)?),
            ),
            Nucleus::Extended { radius } => (
                PotentialModel::extended(radius)?,
                MeshSpec::two_segment(self.a, radius, self.b, n, self.inner_nodes, self.epsilon)?,
            ),
        };
        Ok(Experiment {
            params,
            nucleus: model,
            mesh,
            window: Default::default(),
            tolerances: self.tolerances,
            levels: self.levels,
        })
    }

    /// Settings echoed into every JSON report. Output locations are left out
    /// so reports do not depend on where they were written.
    pub fn to_json(&self) -> Value {
        let (nucleus, radius) = match self.nucleus {
            Nucleus::Point => ("point", Value::Null),
            Nucleus::Extended { radius } => ("extended", num(radius)),
        };
        json!({
            "z": self.z,
            "kappa": self.kappa,
            "mass": num(self.mass),
            "light_speed": num(self.light_speed),
            "light_speed_source": if self.calibrated { "calibrated" } else { "fixed" },
            "nucleus": nucleus,
            "radius": radius,
            "a": num(self.a),
            "b": num(self.b),
            "n": self.n,
            "epsilon": num(self.epsilon),
            "inner_nodes": self.inner_nodes,
            "method": self.method.name(),
            "levels": self.levels,
            "tol_rel": num(self.tolerances.relative),
            "tol_coin": num(self.tolerances.coincidence),
        })
    }
}
