//! Flags, the key=value config file, and the merged run configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use homoclinic::{Branch, ParamName, SystemParams};
use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Equilibria,
    Orbit,
    Verify,
    Portrait,
    Sweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchSel {
    Lower,
    Upper,
    Both,
}

impl BranchSel {
    pub fn branches(self) -> &'static [Branch] {
        match self {
            BranchSel::Lower => &[Branch::Lower],
            BranchSel::Upper => &[Branch::Upper],
            BranchSel::Both => &Branch::BOTH,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

macro_rules! display_via_value_enum {
    ($($t:ty),*) => {$(
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.to_possible_value().expect("no skipped variants").get_name())
            }
        }
    )*};
}
display_via_value_enum!(Command, BranchSel, Format);

/// Command-line flags. Every field is optional so unset flags fall through
/// to the config file and then to the built-in defaults.
#[derive(Debug, Default, Parser)]
#[command(
    name = "homoclinic",
    version,
    about = "Equilibria, homoclinic orbits and phase-portrait data for the slow flow"
)]
pub struct Cli {
    #[arg(long = "A", allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long = "B", allow_hyphen_values = true)]
    pub b: Option<f64>,
    #[arg(long = "J", allow_hyphen_values = true)]
    pub j: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    #[arg(long = "C", allow_hyphen_values = true)]
    pub c: Option<f64>,
    #[arg(long, value_enum)]
    pub command: Option<Command>,
    #[arg(long, value_enum)]
    pub branch: Option<BranchSel>,
    #[arg(long, allow_hyphen_values = true)]
    pub t_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub grid_nx: Option<usize>,
    #[arg(long)]
    pub grid_ny: Option<usize>,
    /// Portrait: `w`, `min,max` or `a_min,a_max,b_min,b_max`. Sweep: `x_min,x_max[,y_min,y_max]`.
    #[arg(long, allow_hyphen_values = true)]
    pub bounds: Option<String>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    pub rel_tol: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub abs_tol: Option<f64>,
    /// Read `gamma` in degrees.
    #[arg(long)]
    pub degrees: bool,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Sweep axis parameter (A, B, J, gamma, C).
    #[arg(long)]
    pub sweep_x: Option<String>,
    #[arg(long)]
    pub sweep_y: Option<String>,
    /// Scales the saddle ρ* before verification (negative control).
    #[arg(long, allow_hyphen_values = true)]
    pub rho_star_scale: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub params: SystemParams,
    pub command: Command,
    pub branch: BranchSel,
    pub t_min: f64,
    pub t_max: f64,
    pub samples: usize,
    pub grid_nx: usize,
    pub grid_ny: usize,
    pub bounds: Vec<f64>,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub sweep_x: ParamName,
    pub sweep_y: Option<ParamName>,
    pub rho_star_scale: f64,
}

const KEYS: &[&str] = &[
    "A",
    "B",
    "J",
    "gamma",
    "C",
    "command",
    "branch",
    "t-min",
    "t-max",
    "samples",
    "grid-nx",
    "grid-ny",
    "bounds",
    "output",
    "format",
    "seed",
    "rel-tol",
    "abs-tol",
    "degrees",
    "sweep-x",
    "sweep-y",
    "rho-star-scale",
];

/// Parses the flat `key=value` config format. Keys mirror the long flags;
/// `_` is accepted for `-`. Blank lines and `#` comments are skipped.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::config(format!("config line {}: expected key=value, got {raw:?}", n + 1)));
        };
        let key = k.trim().trim_start_matches("--").replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::config(format!("config line {}: unknown key {key:?}", n + 1)));
        }
        out.insert(key, v.trim().to_string());
    }
    Ok(out)
}

fn load_config(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
    parse_config_text(&text)
}

fn parse_value<T: FromStr>(key: &str, v: &str) -> Result<T, CliError>
where
    T::Err: fmt::Display,
{
    v.parse().map_err(|e| CliError::config(format!("invalid value {v:?} for {key}: {e}")))
}

fn parse_enum<T: ValueEnum>(key: &str, v: &str) -> Result<T, CliError> {
    T::from_str(v, true).map_err(|e| CliError::config(format!("invalid value {v:?} for {key}: {e}")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool, CliError> {
    match v {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(CliError::config(format!("invalid boolean {v:?} for {key}"))),
    }
}

fn parse_bounds(v: &str) -> Result<Vec<f64>, CliError> {
    v.split(',').map(|s| parse_value::<f64>("bounds", s.trim())).collect()
}

fn parse_axis(key: &str, v: &str) -> Result<ParamName, CliError> {
    v.parse().map_err(|e: homoclinic::Error| CliError::config(format!("{key}: {e}")))
}

/// Merges flags over the config file over the defaults, then validates.
pub fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let file = match &cli.config {
        Some(path) => load_config(path)?,
        None => BTreeMap::new(),
    };
    let get = |key: &str| file.get(key).map(String::as_str);

    macro_rules! pick {
        ($flag:expr, $key:literal, $parse:expr) => {
            match $flag.clone() {
                Some(v) => Some(v),
                None => get($key).map(|s| $parse($key, s)).transpose()?,
            }
        };
    }

    let degrees = cli.degrees || get("degrees").map(|s| parse_bool("degrees", s)).transpose()?.unwrap_or(false);
    let d = SystemParams::default();
    let mut gamma = pick!(cli.gamma, "gamma", parse_value::<f64>).unwrap_or(d.gamma);
    if degrees && (cli.gamma.is_some() || get("gamma").is_some()) {
        gamma = gamma.to_radians();
    }
    let params = SystemParams {
        amp_a: pick!(cli.a, "A", parse_value::<f64>).unwrap_or(d.amp_a),
        amp_b: pick!(cli.b, "B", parse_value::<f64>).unwrap_or(d.amp_b),
        detuning: pick!(cli.j, "J", parse_value::<f64>).unwrap_or(d.detuning),
        gamma,
        nonlinearity: pick!(cli.c, "C", parse_value::<f64>).unwrap_or(d.nonlinearity),
    };
    params.validate().map_err(|e| CliError::config(e.to_string()))?;

    let command = pick!(cli.command, "command", parse_enum::<Command>).unwrap_or(Command::Equilibria);
    let sweep = command == Command::Sweep;
    let bounds = match (&cli.bounds, get("bounds")) {
        (Some(v), _) => parse_bounds(v)?,
        (None, Some(v)) => parse_bounds(v)?,
        (None, None) if sweep => vec![0.0, 0.5],
        (None, None) => vec![-0.8, 0.8],
    };
    let sweep_x = match (&cli.sweep_x, get("sweep-x")) {
        (Some(v), _) => parse_axis("sweep-x", v)?,
        (None, Some(v)) => parse_axis("sweep-x", v)?,
        (None, None) => ParamName::A,
    };
    let sweep_y = match (&cli.sweep_y, get("sweep-y")) {
        (Some(v), _) => Some(parse_axis("sweep-y", v)?),
        (None, Some(v)) => Some(parse_axis("sweep-y", v)?),
        (None, None) => None,
    };

    let cfg = RunConfig {
        params,
        command,
        branch: pick!(cli.branch, "branch", parse_enum::<BranchSel>).unwrap_or(BranchSel::Both),
        t_min: pick!(cli.t_min, "t-min", parse_value::<f64>).unwrap_or(-40.0),
        t_max: pick!(cli.t_max, "t-max", parse_value::<f64>).unwrap_or(40.0),
        samples: pick!(cli.samples, "samples", parse_value::<usize>).unwrap_or(2001),
        grid_nx: pick!(cli.grid_nx, "grid-nx", parse_value::<usize>).unwrap_or(if sweep { 101 } else { 200 }),
        grid_ny: pick!(cli.grid_ny, "grid-ny", parse_value::<usize>).unwrap_or(if sweep { 1 } else { 200 }),
        bounds,
        output: pick!(cli.output, "output", parse_value::<PathBuf>),
        format: pick!(cli.format, "format", parse_enum::<Format>).unwrap_or(if command == Command::Verify {
            Format::Json
        } else {
            Format::Csv
        }),
        seed: pick!(cli.seed, "seed", parse_value::<u64>).unwrap_or(42),
        rel_tol: pick!(cli.rel_tol, "rel-tol", parse_value::<f64>).unwrap_or(1e-12),
        abs_tol: pick!(cli.abs_tol, "abs-tol", parse_value::<f64>).unwrap_or(1e-14),
        sweep_x,
        sweep_y,
        rho_star_scale: pick!(cli.rho_star_scale, "rho-star-scale", parse_value::<f64>).unwrap_or(1.0),
    };
    cfg.validate()?;
    Ok(cfg)
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.samples < 2 {
            return Err(CliError::config(format!("samples must be at least 2, got {}", self.samples)));
        }
        if !(self.t_min < self.t_max) {
            return Err(CliError::config(format!("t-min must be below t-max, got [{}, {}]", self.t_min, self.t_max)));
        }
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(CliError::config("tolerances must be positive"));
        }
        if !(self.rho_star_scale > 0.0) {
            return Err(CliError::config("rho-star-scale must be positive"));
        }
        if self.bounds.iter().any(|v| !v.is_finite()) {
            return Err(CliError::config("bounds must be finite"));
        }
        match self.command {
            Command::Portrait => {
                if self.grid_nx < 2 || self.grid_ny < 2 {
                    return Err(CliError::config("grid dimensions must be at least 2"));
                }
                if ![1, 2, 4].contains(&self.bounds.len()) {
                    return Err(CliError::config("portrait bounds take 1, 2 or 4 values"));
                }
            }
            Command::Sweep => {
                let want = if self.sweep_y.is_some() { 4 } else { 2 };
                if self.bounds.len() != want {
                    return Err(CliError::config(format!("sweep bounds take {want} values")));
                }
                if self.grid_nx < 2 || (self.sweep_y.is_some() && self.grid_ny < 2) {
                    return Err(CliError::config("sweep axes need at least 2 cells"));
                }
                if self.sweep_y == Some(self.sweep_x) {
                    return Err(CliError::config("sweep axes must differ"));
                }
            }
            _ => {}
        }
        // bounds must be ordered pairwise
        let pairs: Vec<(f64, f64)> = match self.bounds.as_slice() {
            [w] => vec![(-w.abs(), w.abs())],
            b => b.chunks(2).filter(|c| c.len() == 2).map(|c| (c[0], c[1])).collect(),
        };
        if pairs.iter().any(|(lo, hi)| !(lo < hi)) {
            return Err(CliError::config(format!("bounds must be ordered, got {:?}", self.bounds)));
        }
        Ok(())
    }

    /// `(a_min, a_max, b_min, b_max)` for the portrait grid.
    pub fn portrait_bounds(&self) -> (f64, f64, f64, f64) {
        match self.bounds.as_slice() {
            [w] => (-w.abs(), w.abs(), -w.abs(), w.abs()),
            [lo, hi] => (*lo, *hi, *lo, *hi),
            [a0, a1, b0, b1, ..] => (*a0, *a1, *b0, *b1),
            _ => (-0.8, 0.8, -0.8, 0.8),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cli(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("homoclinic").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn defaults_are_reference() {
        let cfg = resolve(&cli(&[])).unwrap();
        assert_eq!(cfg.params, SystemParams::default());
        assert_eq!(cfg.command, Command::Equilibria);
        assert_eq!(cfg.samples, 2001);
    }

    #[test]
    fn negative_values_and_degrees() {
        let cfg = resolve(&cli(&["--J", "-1e-3", "--gamma", "20", "--degrees", "--bounds", "-1,1"])).unwrap();
        assert_eq!(cfg.params.detuning, -1e-3);
        assert!((cfg.params.gamma - std::f64::consts::PI / 9.0).abs() < 1e-15);
        assert_eq!(cfg.portrait_bounds(), (-1.0, 1.0, -1.0, 1.0));
    }

    #[test]
    fn config_text() {
        let m = parse_config_text("# c\nA = 0.2\nt_min=-10\n\n").unwrap();
        assert_eq!(m["A"], "0.2");
        assert_eq!(m["t-min"], "-10");
        assert!(parse_config_text("nope=1").is_err());
        assert!(parse_config_text("A").is_err());
    }

    #[test]
    fn validation_errors() {
        assert!(resolve(&cli(&["--samples", "1"])).is_err());
        assert!(resolve(&cli(&["--command", "portrait", "--grid-nx", "1"])).is_err());
        assert!(resolve(&cli(&["--command", "portrait", "--bounds", "1,-1"])).is_err());
        assert!(resolve(&cli(&["--command", "sweep", "--grid-nx", "0"])).is_err());
        assert!(resolve(&cli(&["--C", "0"])).is_err());
        assert_eq!(resolve(&cli(&["--samples", "1"])).unwrap_err().code, crate::EXIT_CONFIG);
    }
}
