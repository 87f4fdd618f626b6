//! Scenario runner behind the `emerge` binary.
//!
//! A run parses a TOML scenario file, evaluates it completely in memory and
//! only then writes `<prefix>.csv` (plus `<prefix>_report.txt` for scenarios
//! that produce a summary). Any failure leaves the output location untouched.

pub mod check;
pub mod config;
pub mod error;
pub mod scenario;

use std::fs;
use std::path::{Path, PathBuf};

pub use config::Config;
pub use error::CliError;
use scenario::Artifact;

/// Output prefix: `--out`, else the config's `output`, else the config file
/// stem in the working directory.
pub fn output_prefix(config_path: &Path, config: &Config, out: Option<&Path>) -> PathBuf {
    if let Some(p) = out {
        return p.to_path_buf();
    }
    if let Some(p) = &config.output {
        return config::resolve(config_dir(config_path), p);
    }
    PathBuf::from(config_path.file_stem().unwrap_or_default())
}

pub fn config_dir(config_path: &Path) -> &Path {
    config_path.parent().unwrap_or(Path::new(""))
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Writes every artifact under a temporary name first and renames once all
/// writes succeeded.
pub fn write_artifacts(prefix: &Path, artifacts: &[Artifact]) -> Result<Vec<PathBuf>, CliError> {
    if let Some(dir) = prefix.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut staged = Vec::new();
    for a in artifacts {
        let target = with_suffix(prefix, a.suffix);
        let tmp = with_suffix(&target, ".partial");
        if let Err(e) = fs::write(&tmp, &a.bytes) {
            for (t, _) in &staged {
                let _ = fs::remove_file(t);
            }
            let _ = fs::remove_file(&tmp);
            return Err(e.into());
        }
        staged.push((tmp, target));
    }
    let mut written = Vec::new();
    for (tmp, target) in staged {
        fs::rename(&tmp, &target)?;
        written.push(target);
    }
    Ok(written)
}

/// Parses, runs and writes one scenario.
pub fn run_file(config_path: &Path, out: Option<&Path>) -> Result<Vec<PathBuf>, CliError> {
    let config = Config::load(config_path)?;
    let artifacts = scenario::run(&config, config_dir(config_path))?;
    write_artifacts(&output_prefix(config_path, &config, out), &artifacts)
}

/// Parses a scenario and runs its invariant suite.
pub fn check_file(config_path: &Path) -> Result<Vec<check::CheckResult>, CliError> {
    let config = Config::load(config_path)?;
    check::run_checks(&config, config_dir(config_path))
}
