use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use frameflow::extension::Observable;
use frameflow::transitivity::Representation;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "FRAMEFLOW_OUTPUT_DIR";

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub workers: Option<usize>,
    #[serde(default)]
    pub simulate: SimulateConfig,
    #[serde(default)]
    pub transitivity: TransitivityConfig,
    #[serde(default)]
    pub harmonics: HarmonicsConfig,
    #[serde(default)]
    pub threshold: ThresholdConfig,
    #[serde(default)]
    pub tables: TablesConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CocycleFamily {
    Random,
    Trivial,
    Kahler,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CocycleSpec {
    pub family: CocycleFamily,
    pub m: usize,
    pub terms: usize,
    pub max_freq: i32,
    pub amplitude: f64,
}

impl Default for CocycleSpec {
    fn default() -> Self {
        CocycleSpec { family: CocycleFamily::Random, m: 3, terms: 3, max_freq: 2, amplitude: 0.7 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseChoice {
    Torus,
    Geodesic,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateConfig {
    pub base: BaseChoice,
    pub matrix: [[i64; 2]; 2],
    /// `[x, y]` on the torus, `[re, im, angle]` in the disk.
    pub start: Vec<f64>,
    pub steps: usize,
    /// Time between recorded states of the geodesic flow.
    pub dt: f64,
    /// Fold the geodesic orbit back into the octagon.
    pub fold: bool,
    pub orbit_stride: usize,
    pub renormalize_every: usize,
    pub max_dt: f64,
    pub cocycle: CocycleSpec,
    pub observables: Vec<Observable>,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        SimulateConfig {
            base: BaseChoice::Torus,
            matrix: [[2, 1], [1, 1]],
            start: vec![0.1234, 0.5678],
            steps: 100_000,
            dt: 0.05,
            fold: true,
            orbit_stride: 100,
            renormalize_every: 64,
            max_dt: 1e-2,
            cocycle: CocycleSpec::default(),
            observables: vec![Observable::Trace, Observable::Entry { row: 0, col: 0 }],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TransitivityConfig {
    pub matrix: [[i64; 2]; 2],
    pub cocycle: CocycleSpec,
    pub box_radius: i64,
    pub cut_backward: usize,
    pub cut_forward: usize,
    pub holonomy_tol: f64,
    pub depth_cap: usize,
    pub max_word_len: usize,
    pub log_radius: f64,
    pub max_words: usize,
    pub min_generators: usize,
    pub representations: Vec<Representation>,
}

impl Default for TransitivityConfig {
    fn default() -> Self {
        TransitivityConfig {
            matrix: [[2, 1], [1, 1]],
            cocycle: CocycleSpec::default(),
            box_radius: 1,
            cut_backward: 0,
            cut_forward: 0,
            holonomy_tol: 1e-12,
            depth_cap: 200,
            max_word_len: 6,
            log_radius: 0.5,
            max_words: 400_000,
            min_generators: 4,
            representations: vec![
                Representation::Standard,
                Representation::Lambda2,
                Representation::Lambda3,
                Representation::Sym2Traceless,
            ],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyTerm {
    pub coeff: f64,
    /// Variable indices with repetition, e.g. `[0, 0, 2]` for `x₀²x₂`.
    pub monomial: Vec<u16>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SectionSpec {
    /// Seeded random symmetric tensor, optionally made trace-free.
    PiStar {
        degree: usize,
        trace_free: bool,
    },
    Polynomial {
        terms: Vec<PolyTerm>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodChoice {
    Auto,
    FullBasis,
    Zonal,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HarmonicsConfig {
    pub n: usize,
    pub k_max: usize,
    /// Defaults to `2·k_max`.
    pub exactness: Option<usize>,
    pub method: MethodChoice,
    pub section: SectionSpec,
}

impl Default for HarmonicsConfig {
    fn default() -> Self {
        HarmonicsConfig {
            n: 3,
            k_max: 6,
            exactness: None,
            method: MethodChoice::Auto,
            section: SectionSpec::PiStar { degree: 3, trace_free: true },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QMode {
    Direct,
    Calibrated,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ThresholdConfig {
    pub n_min: u32,
    pub n_max: u32,
    pub target_degree: u32,
    pub mode: QMode,
    /// Direct `q(E)` per case tag (`normal`, `lambda2`, `lambda3`, `sym2`).
    pub q: BTreeMap<String, f64>,
    /// Anchor pinching per case tag for calibrated mode.
    pub anchors: BTreeMap<String, f64>,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        let anchors = [("normal", 0.277), ("lambda2", 0.497), ("lambda3", 0.497), ("sym2", 0.557)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        ThresholdConfig { n_min: 3, n_max: 150, target_degree: 3, mode: QMode::Calibrated, q: BTreeMap::new(), anchors }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TablesConfig {
    pub n_min: usize,
    pub n_max: usize,
    pub parity_max: usize,
}

impl Default for TablesConfig {
    fn default() -> Self {
        TablesConfig { n_min: 3, n_max: 150, parity_max: 10_000 }
    }
}

/// Parses the right-hand side of `--set key=value` as a TOML value, falling
/// back to a bare string.
fn parse_value(raw: &str) -> toml::Value {
    match format!("v = {raw}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| toml::Value::String(raw.into())),
        Err(_) => toml::Value::String(raw.into()),
    }
}

fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<(), CliError> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override {assignment:?} is not key=value")))?;
    let path: Vec<&str> = key.trim().split('.').collect();
    let (last, parents) = path.split_last().expect("split yields at least one piece");
    let mut cur = table;
    for p in parents {
        let entry = cur.entry(p.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| CliError::Config(format!("override path {key:?} crosses a non-table value")))?;
    }
    cur.insert(last.to_string(), parse_value(raw.trim()));
    Ok(())
}

impl ExperimentConfig {
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self, CliError> {
        let mut table = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
                text.parse::<toml::Table>().map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
            }
            None => toml::Table::new(),
        };
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        ExperimentConfig::deserialize(toml::Value::Table(table)).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn require_seed(&self, what: &str) -> Result<u64, CliError> {
        self.seed.ok_or_else(|| CliError::Config(format!("{what} needs `seed`")))
    }

    /// SHA-256 of the experiment parameters; output location and worker
    /// count do not enter.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output_dir = None;
        c.workers = None;
        let bytes = serde_json::to_vec(&c).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    /// `--out`, then `output_dir`, then the environment, then `.`.
    pub fn resolve_output_dir(&self, flag: Option<&Path>) -> PathBuf {
        flag.map(Path::to_path_buf)
            .or_else(|| self.output_dir.clone())
            .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."))
    }
}
