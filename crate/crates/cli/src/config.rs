//! Layered experiment configuration: built-in defaults, then a named
//! preset, then a flat key=value config file, then command-line flags.
//! Later layers override earlier ones field by field.

use std::path::{Path, PathBuf};

use overlay_heal_core::engine::{ScenarioMode, ScenarioSpec};
use overlay_heal_core::protocol::{ProtocolConfig, ProtocolKind};
use overlay_heal_core::topology::TopologySpec;

use crate::HarnessError;

pub const SEED_ENV_VAR: &str = "OVERLAY_HEAL_SEED";
pub const DEFAULT_SEED: u64 = 42;

/// One layer of settings; `None` means "not set at this layer".
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Settings {
    pub preset: Option<String>,
    pub topology: Option<String>,
    pub n: Option<usize>,
    pub d: Option<usize>,
    pub clusters: Option<usize>,
    pub cluster_size: Option<usize>,
    pub gamma: Option<f64>,
    pub omega: Option<f64>,
    pub acl_a: Option<f64>,
    pub acl_b: Option<f64>,
    pub pa_m: Option<usize>,
    pub protocol: Option<String>,
    pub compare: Option<String>,
    pub mode: Option<String>,
    pub steps: Option<u32>,
    pub runs: Option<u32>,
    pub seed: Option<u64>,
    pub fails_per_step: Option<u32>,
    pub threshold_degree: Option<usize>,
    pub link_reduction: Option<bool>,
    pub t_ecc: Option<f64>,
    pub r: Option<usize>,
    pub out: Option<PathBuf>,
}

impl Settings {
    /// Overlays `over` on `self`. `protocol` and `compare` are exclusive
    /// choices of the same thing, so a layer that sets either one replaces
    /// both.
    pub fn merged_with(&self, over: &Settings) -> Settings {
        let mut out = Settings {
            preset: over.preset.clone().or_else(|| self.preset.clone()),
            topology: over.topology.clone().or_else(|| self.topology.clone()),
            n: over.n.or(self.n),
            d: over.d.or(self.d),
            clusters: over.clusters.or(self.clusters),
            cluster_size: over.cluster_size.or(self.cluster_size),
            gamma: over.gamma.or(self.gamma),
            omega: over.omega.or(self.omega),
            acl_a: over.acl_a.or(self.acl_a),
            acl_b: over.acl_b.or(self.acl_b),
            pa_m: over.pa_m.or(self.pa_m),
            protocol: over.protocol.clone().or_else(|| self.protocol.clone()),
            compare: over.compare.clone().or_else(|| self.compare.clone()),
            mode: over.mode.clone().or_else(|| self.mode.clone()),
            steps: over.steps.or(self.steps),
            runs: over.runs.or(self.runs),
            seed: over.seed.or(self.seed),
            fails_per_step: over.fails_per_step.or(self.fails_per_step),
            threshold_degree: over.threshold_degree.or(self.threshold_degree),
            link_reduction: over.link_reduction.or(self.link_reduction),
            t_ecc: over.t_ecc.or(self.t_ecc),
            r: over.r.or(self.r),
            out: over.out.clone().or_else(|| self.out.clone()),
        };
        if over.protocol.is_some() || over.compare.is_some() {
            out.protocol = over.protocol.clone();
            out.compare = over.compare.clone();
        }
        out
    }
}

/// Built-in defaults (the lowest layer). The seed falls back to the
/// `OVERLAY_HEAL_SEED` environment variable when set.
pub fn defaults() -> Result<Settings, HarnessError> {
    let seed = match std::env::var(SEED_ENV_VAR) {
        Ok(raw) => raw.parse::<u64>().map_err(|_| HarnessError::InvalidValue {
            key: SEED_ENV_VAR.into(),
            message: format!("expected an unsigned integer, got `{raw}`"),
        })?,
        Err(_) => DEFAULT_SEED,
    };
    Ok(Settings {
        topology: Some("uniform".into()),
        n: Some(500),
        d: Some(4),
        clusters: Some(4),
        cluster_size: Some(125),
        gamma: Some(0.05),
        omega: Some(0.005),
        acl_a: Some(6.0),
        acl_b: Some(2.0),
        pa_m: Some(3),
        protocol: Some("p2n".into()),
        mode: Some("evolution".into()),
        steps: Some(100),
        runs: Some(20),
        seed: Some(seed),
        fails_per_step: Some(1),
        threshold_degree: Some(100),
        link_reduction: Some(false),
        t_ecc: Some(0.5),
        r: Some(1),
        out: Some(PathBuf::from("out")),
        ..Settings::default()
    })
}

pub const PRESET_NAMES: [&str; 10] = [
    "fig-uniform-evolution",
    "fig-uniform-targeted",
    "fig-uniform-failures",
    "fig-clustered-evolution",
    "fig-clustered-targeted",
    "fig-clustered-betweenness",
    "fig-clustered-failures",
    "fig-scalefree-evolution",
    "fig-scalefree-targeted",
    "fig-scalefree-failures",
];

/// Expands a preset into a settings layer. Every preset runs all three
/// protocols side by side, 20 runs, threshold 100, at desk-scale sizes.
pub fn preset_settings(name: &str) -> Result<Settings, HarnessError> {
    let mut s = Settings {
        compare: Some("none,p2n,pecc".into()),
        runs: Some(20),
        steps: Some(100),
        threshold_degree: Some(100),
        fails_per_step: Some(1),
        ..Settings::default()
    };
    let uniform = |s: &mut Settings| {
        s.topology = Some("uniform".into());
        s.n = Some(500);
        s.d = Some(4);
    };
    let clustered = |s: &mut Settings| {
        s.topology = Some("clustered".into());
        s.clusters = Some(4);
        s.cluster_size = Some(125);
        s.gamma = Some(0.05);
        s.omega = Some(0.005);
    };
    let scalefree_pa = |s: &mut Settings| {
        s.topology = Some("scale-free-pa".into());
        s.n = Some(500);
        s.pa_m = Some(3);
    };
    match name {
        "fig-uniform-evolution" => {
            uniform(&mut s);
            s.mode = Some("evolution".into());
        }
        "fig-uniform-targeted" => {
            uniform(&mut s);
            s.mode = Some("targeted-degree".into());
        }
        "fig-uniform-failures" => {
            uniform(&mut s);
            s.mode = Some("failures-only".into());
            s.steps = Some(500);
        }
        "fig-clustered-evolution" => {
            clustered(&mut s);
            s.mode = Some("evolution".into());
        }
        "fig-clustered-targeted" => {
            clustered(&mut s);
            s.mode = Some("targeted-degree".into());
        }
        "fig-clustered-betweenness" => {
            clustered(&mut s);
            s.mode = Some("targeted-betweenness".into());
        }
        "fig-clustered-failures" => {
            clustered(&mut s);
            s.mode = Some("failures-only".into());
            s.steps = Some(500);
        }
        "fig-scalefree-evolution" => {
            scalefree_pa(&mut s);
            s.mode = Some("evolution".into());
        }
        "fig-scalefree-targeted" => {
            scalefree_pa(&mut s);
            s.mode = Some("targeted-degree".into());
        }
        "fig-scalefree-failures" => {
            s.topology = Some("scale-free-acl".into());
            s.acl_a = Some(6.0);
            s.acl_b = Some(2.0);
            s.mode = Some("failures-only".into());
            s.steps = Some(636);
        }
        other => return Err(HarnessError::UnknownPreset(other.into())),
    }
    Ok(s)
}

/// Parses a flat key=value config file. Keys are spelled exactly like the
/// long command-line flags. Blank lines and `#` comments are skipped.
pub fn parse_config_file(path: &Path) -> Result<Settings, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::ConfigIo {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    parse_config_text(&text)
}

pub fn parse_config_text(text: &str) -> Result<Settings, HarnessError> {
    let mut s = Settings::default();
    for raw_line in text.lines() {
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(HarnessError::InvalidValue {
                key: line.into(),
                message: "expected key=value".into(),
            });
        };
        let key = key.trim();
        let value = value.trim();
        apply_key(&mut s, key, value)?;
    }
    Ok(s)
}

fn apply_key(s: &mut Settings, key: &str, value: &str) -> Result<(), HarnessError> {
    fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, HarnessError> {
        value.parse::<T>().map_err(|_| HarnessError::InvalidValue {
            key: key.into(),
            message: format!("cannot parse `{value}`"),
        })
    }
    match key {
        "preset" => s.preset = Some(value.into()),
        "topology" => s.topology = Some(value.into()),
        "n" => s.n = Some(parse(key, value)?),
        "d" => s.d = Some(parse(key, value)?),
        "clusters" => s.clusters = Some(parse(key, value)?),
        "cluster-size" => s.cluster_size = Some(parse(key, value)?),
        "gamma" => s.gamma = Some(parse(key, value)?),
        "omega" => s.omega = Some(parse(key, value)?),
        "acl-a" => s.acl_a = Some(parse(key, value)?),
        "acl-b" => s.acl_b = Some(parse(key, value)?),
        "pa-m" => s.pa_m = Some(parse(key, value)?),
        "protocol" => s.protocol = Some(value.into()),
        "compare" => s.compare = Some(value.into()),
        "mode" => s.mode = Some(value.into()),
        "steps" => s.steps = Some(parse(key, value)?),
        "runs" => s.runs = Some(parse(key, value)?),
        "seed" => s.seed = Some(parse(key, value)?),
        "fails-per-step" => s.fails_per_step = Some(parse(key, value)?),
        "threshold-degree" => s.threshold_degree = Some(parse(key, value)?),
        "link-reduction" => s.link_reduction = Some(parse(key, value)?),
        "t-ecc" => s.t_ecc = Some(parse(key, value)?),
        "r" => s.r = Some(parse(key, value)?),
        "out" => s.out = Some(PathBuf::from(value)),
        other => return Err(HarnessError::UnknownKey(other.into())),
    }
    Ok(())
}

/// A fully resolved experiment: what to simulate and where to write it.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub topology: TopologySpec,
    pub protocols: Vec<ProtocolKind>,
    pub protocol_template: ProtocolConfig,
    pub scenario: ScenarioSpec,
    pub out: PathBuf,
    pub preset: Option<String>,
}

impl ExperimentConfig {
    pub fn protocol_for(&self, kind: ProtocolKind) -> ProtocolConfig {
        let mut p = self.protocol_template.clone();
        p.kind = kind;
        p
    }
}

fn required<T: Clone>(field: &Option<T>, key: &str) -> Result<T, HarnessError> {
    field.clone().ok_or_else(|| HarnessError::InvalidValue {
        key: key.into(),
        message: "missing value".into(),
    })
}

fn check_probability(value: f64, key: &str) -> Result<f64, HarnessError> {
    if !(0.0..=1.0).contains(&value) || !value.is_finite() {
        return Err(HarnessError::InvalidValue {
            key: key.into(),
            message: format!("{value} is not a probability in [0, 1]"),
        });
    }
    Ok(value)
}

/// Validates the merged settings and produces the experiment to run.
pub fn finalize(s: &Settings) -> Result<ExperimentConfig, HarnessError> {
    let topology_name = required(&s.topology, "topology")?;
    let topology = match topology_name.as_str() {
        "uniform" => TopologySpec::Uniform {
            n: required(&s.n, "n")?,
            d: required(&s.d, "d")?,
        },
        "clustered" => TopologySpec::Clustered {
            clusters: required(&s.clusters, "clusters")?,
            cluster_size: required(&s.cluster_size, "cluster-size")?,
            gamma: check_probability(required(&s.gamma, "gamma")?, "gamma")?,
            omega: check_probability(required(&s.omega, "omega")?, "omega")?,
        },
        "scale-free-acl" => TopologySpec::ScaleFreeAcl {
            a: required(&s.acl_a, "acl-a")?,
            b: required(&s.acl_b, "acl-b")?,
        },
        "scale-free-pa" => TopologySpec::ScaleFreePa {
            n: required(&s.n, "n")?,
            m: required(&s.pa_m, "pa-m")?,
        },
        other => {
            return Err(HarnessError::InvalidValue {
                key: "topology".into(),
                message: format!(
                    "unknown topology `{other}` (expected uniform, clustered, \
                     scale-free-acl or scale-free-pa)"
                ),
            })
        }
    };

    let protocols: Vec<ProtocolKind> = match (&s.compare, &s.protocol) {
        (Some(list), _) => {
            let mut kinds = Vec::new();
            for part in list.split(',') {
                let part = part.trim();
                let kind = part
                    .parse::<ProtocolKind>()
                    .map_err(|e| HarnessError::InvalidValue {
                        key: "compare".into(),
                        message: e,
                    })?;
                if kinds.contains(&kind) {
                    return Err(HarnessError::InvalidValue {
                        key: "compare".into(),
                        message: format!("protocol `{kind}` listed twice"),
                    });
                }
                kinds.push(kind);
            }
            if kinds.is_empty() {
                return Err(HarnessError::InvalidValue {
                    key: "compare".into(),
                    message: "empty protocol list".into(),
                });
            }
            kinds
        }
        (None, Some(one)) => {
            vec![one
                .parse::<ProtocolKind>()
                .map_err(|e| HarnessError::InvalidValue {
                    key: "protocol".into(),
                    message: e,
                })?]
        }
        (None, None) => {
            return Err(HarnessError::InvalidValue {
                key: "protocol".into(),
                message: "missing value".into(),
            })
        }
    };

    let mode = required(&s.mode, "mode")?
        .parse::<ScenarioMode>()
        .map_err(|e| HarnessError::InvalidValue {
            key: "mode".into(),
            message: e,
        })?;
    let scenario = ScenarioSpec::new(
        mode,
        required(&s.steps, "steps")?,
        required(&s.fails_per_step, "fails-per-step")?,
        required(&s.runs, "runs")?,
        required(&s.seed, "seed")?,
    );
    scenario
        .validate()
        .map_err(|e| HarnessError::InvalidValue {
            key: "fails-per-step".into(),
            message: e.to_string(),
        })?;

    let threshold_degree = required(&s.threshold_degree, "threshold-degree")?;
    if threshold_degree == 0 {
        return Err(HarnessError::InvalidValue {
            key: "threshold-degree".into(),
            message: "must be at least 1".into(),
        });
    }
    let mut protocol_template = ProtocolConfig::new(protocols[0]);
    protocol_template.threshold_degree = threshold_degree;
    protocol_template.link_reduction = required(&s.link_reduction, "link-reduction")?;
    protocol_template.t_ecc = check_probability(required(&s.t_ecc, "t-ecc")?, "t-ecc")?;
    protocol_template.r = required(&s.r, "r")?;

    Ok(ExperimentConfig {
        topology,
        protocols,
        protocol_template,
        scenario,
        out: required(&s.out, "out")?,
        preset: s.preset.clone(),
    })
}

/// Resolves the full layer stack. `flags` is the top layer; a preset named
/// by flag wins over one named in the file.
pub fn resolve(flags: &Settings, file: Option<&Path>) -> Result<ExperimentConfig, HarnessError> {
    let mut merged = defaults()?;
    let file_settings = match file {
        Some(path) => Some(parse_config_file(path)?),
        None => None,
    };
    let preset_name = flags
        .preset
        .clone()
        .or_else(|| file_settings.as_ref().and_then(|f| f.preset.clone()));
    if let Some(name) = &preset_name {
        let mut layer = preset_settings(name)?;
        layer.preset = Some(name.clone());
        merged = merged.merged_with(&layer);
    }
    if let Some(f) = &file_settings {
        merged = merged.merged_with(f);
    }
    merged = merged.merged_with(flags);
    finalize(&merged)
}
