//! Scenario files. Every table rejects keys it does not know.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Chooser,
    Telegraph,
    GravononModes,
    Meanfield,
    Dimensional,
    Sweep,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub scenario: Scenario,
    /// Output path prefix; `--out` overrides it.
    pub output: Option<PathBuf>,
    pub sampling: Option<Sampling>,
    pub chooser: Option<ChooserConfig>,
    pub telegraph: Option<TelegraphConfig>,
    pub gravonon: Option<GravononConfig>,
    pub meanfield: Option<MeanfieldConfig>,
    pub dimensional: Option<DimensionalConfig>,
    pub sweep: Option<SweepConfig>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sampling {
    pub t_start: Option<f64>,
    pub t_end: Option<f64>,
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Layout {
    #[default]
    Interval,
    Symmetric,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChooserConfig {
    pub v: f64,
    pub w: f64,
    pub u: f64,
    /// Band width; π|U| (so that Γ = U) when absent.
    pub delta: Option<f64>,
    pub n: usize,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default)]
    pub layout: Layout,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    Reference,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TelegraphConfig {
    pub preset: Option<Preset>,
    pub hop: Option<f64>,
    /// Site (1 or 2) whose core state holds the particle at t = 0.
    #[serde(default = "one")]
    pub initial_site: usize,
    #[serde(default)]
    pub sites: Vec<SiteConfig>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiteConfig {
    pub e_g: f64,
    #[serde(default)]
    pub e_w: f64,
    pub v_loc: f64,
    pub eps_grav: f64,
    pub v_gw: f64,
    pub band: BandConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum BandConfig {
    Levels(Vec<f64>),
    Flat(FlatBand),
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlatBand {
    pub center: f64,
    pub width: f64,
    pub levels: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GravononConfig {
    pub positions: Vec<f64>,
    pub sigma: f64,
    /// One value per site, or a single value used for every site.
    pub vgrav: Vec<f64>,
    #[serde(default = "unit")]
    pub theta: f64,
    pub m_g: f64,
    #[serde(default)]
    pub v_o: f64,
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeanfieldConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
    pub dt: f64,
    pub steps: usize,
    #[serde(default = "one")]
    pub sample_every: usize,
    #[serde(default = "unit")]
    pub m: f64,
    #[serde(default = "unit")]
    pub m_g: f64,
    #[serde(default)]
    pub g_newton: f64,
    #[serde(default = "three")]
    pub d_spatial: f64,
    #[serde(default)]
    pub source: f64,
    pub softening: Option<f64>,
    #[serde(default)]
    pub v_o: f64,
    #[serde(default)]
    pub k: f64,
    #[serde(default = "speed_of_light")]
    pub c: f64,
    /// Two-column `x,value` file sampled on the grid.
    pub h00_csv: Option<PathBuf>,
    pub psi: FieldConfig,
    pub zeta: Option<FieldConfig>,
}

fn three() -> f64 {
    3.0
}

fn speed_of_light() -> f64 {
    137.036
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum FieldConfig {
    Gaussian(GaussianField),
    Csv(CsvField),
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianField {
    pub x0: f64,
    pub sigma: f64,
    #[serde(default)]
    pub k0: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsvField {
    pub csv: PathBuf,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimensionalConfig {
    #[serde(default = "newton_g")]
    pub g: f64,
    #[serde(default = "speed_of_light")]
    pub c: f64,
    #[serde(default = "table_radii")]
    pub radii: Vec<f64>,
    /// Inputs of the mode-density comparison.
    #[serde(default = "ten_c")]
    pub energy: f64,
    #[serde(default = "surface_length")]
    pub length: f64,
    #[serde(default = "compact_radius")]
    pub compact_radius: f64,
    #[serde(default = "particle_mass")]
    pub mass: f64,
    /// Gravonon mass scale, m_g = k/c.
    #[serde(default = "ten")]
    pub k: f64,
}

fn newton_g() -> f64 {
    1e-40
}

fn table_radii() -> Vec<f64> {
    emerge_core::dimensional::TABLE_RADII.to_vec()
}

fn ten_c() -> f64 {
    10.0 * speed_of_light()
}

fn surface_length() -> f64 {
    1e7
}

fn compact_radius() -> f64 {
    1e4
}

fn particle_mass() -> f64 {
    2000.0
}

fn ten() -> f64 {
    10.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepModel {
    Chooser,
    Telegraph,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub model: SweepModel,
    pub parameter: String,
    pub values: Vec<f64>,
    #[serde(default = "default_cap")]
    pub max_points: usize,
}

fn default_cap() -> usize {
    1024
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: Config = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        config.check_sections()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// The section the scenario needs must be present and sections it
    /// would ignore must be absent.
    fn check_sections(&self) -> Result<(), CliError> {
        let present = [
            ("chooser", self.chooser.is_some()),
            ("telegraph", self.telegraph.is_some()),
            ("gravonon", self.gravonon.is_some()),
            ("meanfield", self.meanfield.is_some()),
            ("dimensional", self.dimensional.is_some()),
            ("sweep", self.sweep.is_some()),
        ];
        let required: &[&str] = match self.scenario {
            Scenario::Chooser => &["chooser"],
            Scenario::Telegraph => &["telegraph"],
            Scenario::GravononModes => &["gravonon"],
            Scenario::Meanfield => &["meanfield"],
            Scenario::Dimensional => &[],
            Scenario::Sweep => match &self.sweep {
                Some(s) if s.model == SweepModel::Chooser => &["sweep", "chooser"],
                Some(_) => &["sweep", "telegraph"],
                None => &["sweep"],
            },
        };
        let optional: &[&str] = match self.scenario {
            Scenario::Dimensional => &["dimensional"],
            _ => &[],
        };
        for (name, is_set) in present {
            if required.contains(&name) && !is_set {
                return Err(CliError::Config(format!("scenario needs a [{name}] table")));
            }
            if is_set && !required.contains(&name) && !optional.contains(&name) {
                return Err(CliError::Config(format!("[{name}] is not used by this scenario")));
            }
        }
        let samples_time = matches!(self.scenario, Scenario::Chooser | Scenario::Telegraph);
        if self.sampling.is_some() && !samples_time {
            return Err(CliError::Config("[sampling] is only used by the chooser and telegraph scenarios".into()));
        }
        Ok(())
    }
}

/// Resolves a path from the config relative to the config's directory.
pub fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_key_rejected_with_location() {
        let err = Config::parse("scenario = \"chooser\"\n[chooser]\nv = 1.0\nw = 0.1\nu = 1.0\nn = 10\nbogus = 3\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("bogus") && msg.contains("line 7"), "{msg}");
    }

    #[test]
    fn missing_section_rejected() {
        assert!(matches!(Config::parse("scenario = \"telegraph\""), Err(CliError::Config(_))));
    }

    #[test]
    fn stray_section_rejected() {
        let text = "scenario = \"dimensional\"\n[chooser]\nv = 1.0\nw = 0.1\nu = 1.0\nn = 10\n";
        assert!(Config::parse(text).is_err());
    }

    #[test]
    fn band_forms() {
        let text = r#"
            scenario = "telegraph"
            [telegraph]
            hop = 0.5
            [[telegraph.sites]]
            e_g = -0.6
            v_loc = 0.7
            eps_grav = -0.2
            v_gw = 0.5
            band = [0.0, 0.1, 0.2]
            [[telegraph.sites]]
            e_g = -0.6
            v_loc = 0.7
            eps_grav = -0.2
            v_gw = 0.5
            band = { center = 0.1, width = 0.8, levels = 5 }
        "#;
        let c = Config::parse(text).unwrap();
        let t = c.telegraph.unwrap();
        assert!(matches!(t.sites[0].band, BandConfig::Levels(ref v) if v.len() == 3));
        assert!(matches!(t.sites[1].band, BandConfig::Flat(FlatBand { levels: 5, .. })));
        assert_eq!(t.initial_site, 1);
    }

    #[test]
    fn dimensional_defaults() {
        let c = Config::parse("scenario = \"dimensional\"\n[dimensional]\n").unwrap();
        let d = c.dimensional.unwrap();
        assert_eq!(d.radii, vec![1e4, 1e3, 1e2, 10.0]);
        assert_eq!(d.g, 1e-40);
    }
}
