//! Job configuration files.

use std::path::{Path, PathBuf};

use isogap_core::io::GeneratorSet;
use isogap_core::lsg::{Domain, Region};
use isogap_core::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    RotationGap,
    Profile,
    Verify,
    Reduce,
    Lsg,
    Oracle,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::RotationGap => "rotation-gap",
            Command::Profile => "profile",
            Command::Verify => "verify",
            Command::Reduce => "reduce",
            Command::Lsg => "lsg",
            Command::Oracle => "oracle",
        }
    }
}

/// Command-specific settings. Unset fields take per-command defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Parameters {
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub band: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_grid: Option<Vec<[f64; 3]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub small_x_grid: Option<Vec<[f64; 3]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<Region>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Domain>,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank_cutoff: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_grid: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c0: Option<f64>,
    #[serde(rename = "dirichlet_L", default, skip_serializing_if = "Option::is_none")]
    pub dirichlet_band: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dirichlet_x_grid: Option<Vec<[f64; 3]>>,
    #[serde(rename = "profile_L", default, skip_serializing_if = "Option::is_none")]
    pub profile_band: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    /// Generator-set file, relative to the config file, or `builtin:<name>`.
    pub measure: String,
    #[serde(default)]
    pub parameters: Parameters,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

/// A config with command-line overrides applied and paths resolved.
#[derive(Debug, Clone, Serialize)]
pub struct ResolvedJob {
    pub command: Command,
    pub measure: String,
    pub parameters: Parameters,
    pub seed: u64,
    #[serde(skip)]
    pub output: PathBuf,
    #[serde(skip)]
    pub generator_set: GeneratorSet,
}

impl JobConfig {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))
    }

    pub fn resolve(
        self,
        command: Command,
        config_dir: &Path,
        seed: Option<u64>,
        output: Option<PathBuf>,
    ) -> Result<ResolvedJob> {
        if let Some(c) = self.command {
            if c != command {
                return Err(Error::InvalidArgument(format!(
                    "config is for `{}` but `{}` was requested",
                    c.as_str(),
                    command.as_str()
                )));
            }
        }
        let seed = seed
            .or(self.seed)
            .ok_or_else(|| Error::InvalidArgument("a seed is required (config `seed` or --seed)".into()))?;
        let output = output
            .or(self.output.map(|p| if p.is_relative() { config_dir.join(p) } else { p }))
            .ok_or_else(|| Error::InvalidArgument("an output directory is required (config `output` or --out)".into()))?;
        let generator_set = match self.measure.strip_prefix("builtin:") {
            Some(name) => {
                let text = isogap_core::shipped::by_name(name)
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown builtin measure `{name}`")))?;
                GeneratorSet::parse(text)?
            }
            None => {
                let path = config_dir.join(&self.measure);
                if !path.is_file() {
                    return Err(Error::Io(format!("measure file {} does not exist", path.display())));
                }
                GeneratorSet::from_path(&path)?
            }
        };
        validate(&self.parameters)?;
        Ok(ResolvedJob { command, measure: self.measure, parameters: self.parameters, seed, output, generator_set })
    }
}

fn validate(p: &Parameters) -> Result<()> {
    let bad = |what: &str| Err(Error::InvalidArgument(what.to_string()));
    for (name, grid) in [("x_grid", &p.x_grid), ("dirichlet_x_grid", &p.dirichlet_x_grid)] {
        if let Some(g) = grid {
            if g.is_empty() {
                return bad(&format!("{name} is empty"));
            }
        }
    }
    if let Some(g) = &p.small_x_grid {
        let radii: Vec<f64> = g.iter().map(|x| x.iter().map(|c| c * c).sum::<f64>().sqrt()).collect();
        if g.is_empty() || radii.windows(2).any(|w| w[0] > w[1]) {
            return bad("small_x_grid must be nonempty and sorted by length");
        }
    }
    if let Some(r) = &p.r_grid {
        if r.is_empty() || r.windows(2).any(|w| w[0] >= w[1]) {
            return bad("r_grid must be nonempty and strictly increasing");
        }
    }
    if p.samples == Some(0) {
        return bad("samples must be positive");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_overrides() {
        let text = r#"{"command":"profile","measure":"builtin:two-generator","parameters":{"L":4},"seed":3,"output":"out"}"#;
        let cfg = JobConfig::parse(text).unwrap();
        assert_eq!(cfg.parameters.band, Some(4));
        let job = cfg.clone().resolve(Command::Profile, Path::new("/tmp/x"), Some(9), None).unwrap();
        assert_eq!(job.seed, 9);
        assert_eq!(job.output, PathBuf::from("/tmp/x/out"));
        assert!(cfg.resolve(Command::Lsg, Path::new("."), None, None).is_err());
    }

    #[test]
    fn rejects_unknown_fields_and_missing_seed() {
        assert!(JobConfig::parse(r#"{"measure":"m","parameters":{"Lmax":3}}"#).is_err());
        let cfg = JobConfig::parse(r#"{"measure":"builtin:screw","output":"o"}"#).unwrap();
        assert!(cfg.resolve(Command::RotationGap, Path::new("."), None, None).is_err());
    }

    #[test]
    fn grid_checks() {
        let p = Parameters { r_grid: Some(vec![0.0, 0.5, 0.5]), ..Default::default() };
        assert!(validate(&p).is_err());
        let p = Parameters { small_x_grid: Some(vec![[0.2, 0.0, 0.0], [0.1, 0.0, 0.0]]), ..Default::default() };
        assert!(validate(&p).is_err());
    }
}
