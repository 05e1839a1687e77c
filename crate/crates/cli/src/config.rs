//! Run configuration: a flat TOML file merged with command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use qsd_core::discriminate::Ensemble;
use qsd_core::netsim::{ClassicalAssignment, DeviceStrategy, DEFAULT_MAX_CELLS};
use qsd_core::qcore::{
    basis_state, bell_state, left_circular, plus_minus_state, right_circular, DensityMatrix,
    PureStateParams,
};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Certify,
    Discriminate,
    Sweep,
    Demo,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    JsonLines,
}

/// Rounds per input tuple, or exact probabilities.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shots {
    Exact,
    Count(u64),
}

impl Shots {
    pub fn count(self) -> Option<u64> {
        match self {
            Shots::Exact => None,
            Shots::Count(n) => Some(n),
        }
    }
}

impl fmt::Display for Shots {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shots::Exact => write!(f, "exact"),
            Shots::Count(n) => write!(f, "{n}"),
        }
    }
}

impl Serialize for Shots {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Shots::Exact => s.serialize_str("exact"),
            Shots::Count(n) => s.serialize_u64(*n),
        }
    }
}

fn parse_shots(raw: &str) -> Result<Shots, CliError> {
    if raw == "exact" {
        return Ok(Shots::Exact);
    }
    match raw.parse::<u64>() {
        Ok(0) => Err(CliError::config("shots", "must be at least 1")),
        Ok(n) => Ok(Shots::Count(n)),
        Err(_) => Err(CliError::config(
            "shots",
            format!("expected a positive integer or \"exact\", got {raw:?}"),
        )),
    }
}

/// Device behaviour simulated behind the referee's interface.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StrategySpec {
    Honest,
    Conjugated,
    Werner { visibility: f64 },
    Classical { assignment: ClassicalAssignment },
}

impl StrategySpec {
    /// Parses `honest`, `conjugated`, `werner:p` or `classical:path`; paths are
    /// taken relative to `base`.
    fn parse(raw: &str, base: &Path) -> Result<Self, CliError> {
        let (kind, arg) = match raw.split_once(':') {
            Some((k, a)) => (k, Some(a)),
            None => (raw, None),
        };
        match (kind, arg) {
            ("honest", None) => Ok(Self::Honest),
            ("conjugated", None) => Ok(Self::Conjugated),
            ("werner", Some(p)) => {
                let visibility = p.parse::<f64>().map_err(|_| {
                    CliError::config(
                        "strategy",
                        format!("werner visibility {p:?} is not a number"),
                    )
                })?;
                if !(0.0..=1.0).contains(&visibility) {
                    return Err(CliError::config(
                        "strategy",
                        format!("werner visibility {visibility} outside [0, 1]"),
                    ));
                }
                Ok(Self::Werner { visibility })
            }
            ("classical", Some(path)) => {
                let path = base.join(path);
                let text = std::fs::read_to_string(&path).map_err(|e| {
                    CliError::config("strategy", format!("cannot read {}: {e}", path.display()))
                })?;
                let assignment: ClassicalAssignment = toml::from_str(&text).map_err(|e| {
                    CliError::config("strategy", format!("{}: {e}", path.display()))
                })?;
                assignment
                    .validate()
                    .map_err(|e| CliError::config("strategy", e.to_string()))?;
                Ok(Self::Classical { assignment })
            }
            _ => Err(CliError::config(
                "strategy",
                format!("expected honest, conjugated, werner:p or classical:path, got {raw:?}"),
            )),
        }
    }

    pub fn build(&self) -> qsd_core::Result<DeviceStrategy> {
        match self {
            Self::Honest => Ok(DeviceStrategy::honest()),
            Self::Conjugated => Ok(DeviceStrategy::conjugated()),
            Self::Werner { visibility } => DeviceStrategy::werner(*visibility),
            Self::Classical { assignment } => DeviceStrategy::classical(assignment),
        }
    }
}

/// One named single-qubit state.
fn parse_factor(token: &str) -> Result<DensityMatrix, String> {
    match token {
        "0" => Ok(basis_state(0)),
        "1" => Ok(basis_state(1)),
        "+" => Ok(plus_minus_state(1.0)),
        "-" => Ok(plus_minus_state(-1.0)),
        "R" => Ok(right_circular()),
        "L" => Ok(left_circular()),
        "phi0" | "phi1" | "phi2" | "phi3" => {
            bell_state(token.as_bytes()[3] - b'0').map_err(|e| e.to_string())
        }
        _ => {
            let (w, t) = token
                .split_once(':')
                .ok_or_else(|| format!("unknown state {token:?}"))?;
            let num = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| format!("{s:?} is not a number"))
            };
            let p = PureStateParams::new(num(w)?, num(t)?).map_err(|e| e.to_string())?;
            Ok(p.density())
        }
    }
}

/// `factor*factor*...[@prior]`, where each factor is a named state or `omega:theta`.
fn parse_member(raw: &str) -> Result<(Option<f64>, DensityMatrix), String> {
    let (body, prior) = match raw.split_once('@') {
        Some((b, p)) => {
            let q = p
                .parse::<f64>()
                .map_err(|_| format!("prior {p:?} is not a number"))?;
            (b, Some(q))
        }
        None => (raw, None),
    };
    let mut factors = body.split('*').map(|t| parse_factor(t.trim()));
    let first = factors.next().ok_or_else(|| "empty state".to_string())??;
    let state = factors.try_fold(first, |acc, f| f.map(|f| acc.kron(&f)))?;
    Ok((prior, state))
}

/// Builds the ensemble; either every member carries a prior or none does.
pub fn parse_ensemble(members: &[String]) -> Result<Ensemble, CliError> {
    let parsed = members
        .iter()
        .enumerate()
        .map(|(i, m)| parse_member(m).map_err(|e| CliError::config(format!("ensemble[{i}]"), e)))
        .collect::<Result<Vec<_>, _>>()?;
    let with_prior = parsed.iter().filter(|(q, _)| q.is_some()).count();
    if with_prior != 0 && with_prior != parsed.len() {
        return Err(CliError::config(
            "ensemble",
            "give a prior for every member or for none",
        ));
    }
    let n = parsed.first().map_or(1, |(_, s)| s.n_qubits());
    if n > DEFAULT_MAX_CELLS {
        return Err(CliError::config(
            "ensemble",
            format!("{n}-qubit states exceed the {DEFAULT_MAX_CELLS}-qubit limit"),
        ));
    }
    let ensemble = if with_prior == 0 {
        Ensemble::uniform(parsed.into_iter().map(|(_, s)| s).collect())
    } else {
        Ensemble::new(parsed.into_iter().map(|(q, s)| (q.unwrap(), s)).collect())
    };
    ensemble.map_err(|e| CliError::config("ensemble", e.to_string()))
}

/// Four states spanning both modes: `|0⟩`, `|+⟩`, and the conjugate pair `|R⟩`, `|L⟩`.
pub const DEMO_ENSEMBLE: [&str; 4] = ["0", "+", "R", "L"];

pub const DEFAULT_DISCRIMINATE_ENSEMBLE: [&str; 2] = ["0", "+"];

#[derive(Debug, Parser)]
#[command(
    name = "qsd",
    version,
    about = "Certify quantum network devices, discriminate states with them and sweep guessing probabilities"
)]
pub struct Args {
    /// Workflow to run; may instead be set as `command` in the config file.
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// Flat TOML file with one key per option; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// honest, conjugated, werner:<visibility> or classical:<file.toml>.
    #[arg(long)]
    pub strategy: Option<String>,
    /// Comma-separated members: 0 1 + - R L phi0..phi3 or omega:theta, joined by `*`
    /// for products, optionally suffixed with `@prior`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub ensemble: Option<Vec<String>>,
    /// Rounds per input tuple, or `exact`.
    #[arg(long)]
    pub shots: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Certification slack; defaults to 1e-9 for exact data and four standard errors otherwise.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Step of the prior and amplitude grids of the sweep.
    #[arg(long)]
    pub grid_step: Option<f64>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Run the trusted third-axis probe before each discrimination.
    #[arg(long)]
    pub mdi_probe: bool,
    /// Number of discrimination trials.
    #[arg(long)]
    pub trials: Option<u64>,
    /// Also write the certification counts to this CSV file.
    #[arg(long)]
    pub counts_output: Option<PathBuf>,
    /// Also write the per-prior sweep summary to this file.
    #[arg(long)]
    pub per_q_output: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    command: Option<Command>,
    strategy: Option<String>,
    ensemble: Option<Vec<String>>,
    shots: Option<toml::Value>,
    seed: Option<u64>,
    tolerance: Option<f64>,
    grid_step: Option<f64>,
    output: Option<PathBuf>,
    format: Option<Format>,
    mdi_probe: Option<bool>,
    trials: Option<u64>,
    counts_output: Option<PathBuf>,
    per_q_output: Option<PathBuf>,
}

/// Fully resolved and validated settings of one run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub strategy: StrategySpec,
    pub ensemble: Vec<String>,
    pub shots: Shots,
    pub seed: u64,
    pub tolerance: Option<f64>,
    pub grid_step: f64,
    pub format: Format,
    pub mdi_probe: bool,
    pub trials: u64,
    #[serde(skip)]
    pub output: Option<PathBuf>,
    #[serde(skip)]
    pub counts_output: Option<PathBuf>,
    #[serde(skip)]
    pub per_q_output: Option<PathBuf>,
}

impl RunConfig {
    /// Merges the optional config file with the flags and validates the result.
    pub fn resolve(args: Args) -> Result<Self, CliError> {
        let (file, base) = match &args.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    CliError::config("config", format!("cannot read {}: {e}", path.display()))
                })?;
                let file: FileConfig = toml::from_str(&text)
                    .map_err(|e| CliError::config("config", e.message().to_string()))?;
                let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
                (file, base)
            }
            None => (FileConfig::default(), PathBuf::new()),
        };
        let file_base = |p: Option<PathBuf>| p.map(|p| base.join(p));

        let command = args.command.or(file.command).ok_or_else(|| {
            CliError::config(
                "command",
                "missing; use certify, discriminate, sweep or demo",
            )
        })?;
        let strategy = match (args.strategy, file.strategy) {
            (Some(s), _) => StrategySpec::parse(&s, Path::new(""))?,
            (None, Some(s)) => StrategySpec::parse(&s, &base)?,
            (None, None) => StrategySpec::Honest,
        };
        let shots = match (args.shots, file.shots) {
            (Some(s), _) => parse_shots(&s)?,
            (None, Some(toml::Value::String(s))) => parse_shots(&s)?,
            (None, Some(toml::Value::Integer(n))) => parse_shots(&n.to_string())?,
            (None, Some(v)) => {
                return Err(CliError::config(
                    "shots",
                    format!("expected an integer or \"exact\", got {v}"),
                ))
            }
            (None, None) => Shots::Exact,
        };
        let ensemble = args.ensemble.or(file.ensemble).unwrap_or_else(|| {
            let default: &[&str] = match command {
                Command::Demo => &DEMO_ENSEMBLE,
                _ => &DEFAULT_DISCRIMINATE_ENSEMBLE,
            };
            default.iter().map(|s| s.to_string()).collect()
        });
        let config = Self {
            command,
            strategy,
            ensemble,
            shots,
            seed: args.seed.or(file.seed).unwrap_or(0),
            tolerance: args.tolerance.or(file.tolerance),
            grid_step: args.grid_step.or(file.grid_step).unwrap_or(0.01),
            format: args.format.or(file.format).unwrap_or_default(),
            mdi_probe: args.mdi_probe || file.mdi_probe.unwrap_or(false),
            trials: args.trials.or(file.trials).unwrap_or(1),
            output: args.output.or_else(|| file_base(file.output)),
            counts_output: args.counts_output.or_else(|| file_base(file.counts_output)),
            per_q_output: args.per_q_output.or_else(|| file_base(file.per_q_output)),
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), CliError> {
        if let Some(t) = self.tolerance {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(CliError::config(
                    "tolerance",
                    "must be finite and non-negative",
                ));
            }
        }
        if !(self.grid_step > 0.0 && self.grid_step <= 1.0) {
            return Err(CliError::config("grid_step", "must lie in (0, 1]"));
        }
        if self.trials == 0 {
            return Err(CliError::config("trials", "must be at least 1"));
        }
        if matches!(self.command, Command::Discriminate | Command::Demo) {
            parse_ensemble(&self.ensemble)?;
        }
        for (field, path) in [
            ("output", &self.output),
            ("counts_output", &self.counts_output),
            ("per_q_output", &self.per_q_output),
        ] {
            if let Some(dir) = path.as_ref().and_then(|p| p.parent()) {
                if !dir.as_os_str().is_empty() && !dir.is_dir() {
                    return Err(CliError::config(
                        field,
                        format!("directory {} does not exist", dir.display()),
                    ));
                }
            }
        }
        Ok(())
    }

    /// SHA-256 of the resolved settings, output paths excluded.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn args(list: &[&str]) -> Args {
        Args::parse_from(std::iter::once("qsd").chain(list.iter().copied()))
    }

    #[test]
    fn flags_resolve_with_defaults() {
        let c = RunConfig::resolve(args(&["certify"])).unwrap();
        assert_eq!(c.strategy, StrategySpec::Honest);
        assert_eq!(c.shots, Shots::Exact);
        assert_eq!((c.seed, c.trials), (0, 1));
    }

    #[test]
    fn bad_values_name_their_field() {
        let err = |a: &[&str]| match RunConfig::resolve(args(a)) {
            Err(CliError::Config { field, .. }) => field,
            other => panic!("{other:?}"),
        };
        assert_eq!(err(&["certify", "--shots", "0"]), "shots");
        assert_eq!(err(&["certify", "--strategy", "werner:2"]), "strategy");
        assert_eq!(err(&["discriminate", "--ensemble", "0,Q"]), "ensemble[1]");
        assert_eq!(err(&[]), "command");
    }

    #[test]
    fn members_parse_products_and_priors() {
        let e = parse_ensemble(&["R*0@0.25".into(), "L*1@0.75".into()]).unwrap();
        assert_eq!(e.n_qubits(), 2);
        assert_eq!(e.priors().collect::<Vec<_>>(), vec![0.25, 0.75]);
        let (_, s) = parse_member(&format!("{}:0", PI / 4.0)).unwrap();
        assert!(s.op().max_abs_diff(plus_minus_state(1.0).op()).unwrap() < 1e-12);
        assert!(parse_ensemble(&["0@0.5".into(), "1".into()]).is_err());
    }

    #[test]
    fn hash_ignores_output_path_only() {
        let a = RunConfig::resolve(args(&["sweep"])).unwrap();
        let mut b = a.clone();
        b.output = Some("x.csv".into());
        assert_eq!(a.hash(), b.hash());
        b.seed = 1;
        assert_ne!(a.hash(), b.hash());
    }
}
