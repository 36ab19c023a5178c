//! Sectioned key = value run configuration: parsing, preset merging and
//! resolution into fully-typed settings.
//!
//! Numerics are never passed as command-line flags; a run is described by a
//! TOML file (or a built-in preset) and the flags only pick the command and
//! the config path. The fully-resolved configuration is echoed into the
//! output directory so every artifact records the values that produced it.

use mhfem::error::{Error, Result};
use mhfem::geometry::Rect;
use mhfem::mesh::{BoundaryMarker, Conformity, Mesh, StripBc};
use mhfem::model::{AleMap, ModelParams};
use mhfem::stepper::StepperConfig;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Environment variable that, when set, replaces the directory part of
/// `output.dir` resolution: the configured dir is joined under it.
pub const OUTPUT_ROOT_ENV: &str = "MHFEM_OUTPUT_ROOT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// Rectangular habitat inside a rectangular frame, constant shift.
    RectShift,
    /// Horizontal strip with a Robin far-field closure; validated against
    /// the 1D solver.
    StripValidation,
    /// Disk habitat inside a truncated disk, constant shift.
    DiskShift,
    /// Rectangular habitat whose height shrinks linearly in time.
    ShrinkingRect,
    /// Strip geometry with Dirichlet ends driven by a manufactured forcing.
    Manufactured,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct MeshSection {
    pub conformity: Option<String>,
    pub grading: Option<f64>,
    /// `[x0, x1, y0, y1]` of the frame (rectangle scenarios).
    pub outer: Option<[f64; 4]>,
    /// `[x0, x1, y0, y1]` of the habitat (rectangle scenarios).
    pub inner: Option<[f64; 4]>,
    pub n_inner: Option<usize>,
    pub n_outer: Option<usize>,
    /// Disk scenario.
    pub r_inner: Option<f64>,
    pub r_outer: Option<f64>,
    pub n_gamma: Option<usize>,
    /// Strip scenarios.
    pub l_habitat: Option<f64>,
    pub l_tail: Option<f64>,
    pub y0: Option<f64>,
    pub y1: Option<f64>,
    pub nx_habitat: Option<usize>,
    pub nx_tail: Option<usize>,
    pub ny: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub d0: Option<f64>,
    pub d1: Option<f64>,
    pub r: Option<f64>,
    pub a: Option<f64>,
    pub m: Option<f64>,
    pub alpha: Option<f64>,
    pub c: Option<[f64; 2]>,
    pub robin_b: Option<f64>,
    pub d2: Option<f64>,
    pub m2: Option<f64>,
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct StepperSection {
    pub tau: Option<f64>,
    pub tol_steady: Option<f64>,
    pub max_steps: Option<usize>,
    pub t0: Option<f64>,
    /// When set, the run is a transient up to this time instead of a
    /// run-to-steady.
    pub t_final: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    pub amplitude: Option<f64>,
    pub sigma: Option<f64>,
    pub center: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<String>,
    /// Steps between VTK snapshots during `run` (0 = final state only).
    pub snapshot_interval: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    pub h0: Option<f64>,
    pub tau: Option<f64>,
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ConvergeSection {
    /// Interface node counts per refinement level.
    pub levels: Option<Vec<usize>>,
}

/// Raw file shape: everything optional so presets and user files merge at
/// the key level.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub preset: Option<String>,
    pub scenario: Option<Scenario>,
    #[serde(default)]
    pub mesh: MeshSection,
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub stepper: StepperSection,
    #[serde(default)]
    pub initial: InitialSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub oracle: OracleSection,
    #[serde(default)]
    pub converge: ConvergeSection,
}

fn merge_values(base: &mut toml::Value, over: toml::Value) {
    match (base, over) {
        (toml::Value::Table(b), toml::Value::Table(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge_values(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

fn parse_toml(text: &str, origin: &str) -> Result<toml::Value> {
    text.parse::<toml::Value>()
        .map_err(|e| Error::Config(format!("{origin}: {e}")))
}

/// Loads a config from an optional preset name and an optional file path;
/// file keys override preset keys. At least one must be given.
pub fn load_config(preset: Option<&str>, path: Option<&Path>) -> Result<FileConfig> {
    let mut merged = toml::Value::Table(Default::default());
    let mut preset_name = preset.map(str::to_owned);
    let file_value = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::io(p.display().to_string(), e))?;
            let v = parse_toml(&text, &p.display().to_string())?;
            if preset_name.is_none() {
                if let Some(name) = v.get("preset").and_then(|x| x.as_str()) {
                    preset_name = Some(name.to_owned());
                }
            }
            Some(v)
        }
        None => None,
    };
    if let Some(name) = &preset_name {
        let text = crate::presets::preset_toml(name)?;
        merge_values(&mut merged, parse_toml(text, &format!("preset {name}"))?);
    } else if file_value.is_none() {
        return Err(Error::Config(
            "no configuration given: pass --config <file> and/or --preset <name>".into(),
        ));
    }
    if let Some(v) = file_value {
        merge_values(&mut merged, v);
    }
    merged
        .try_into()
        .map_err(|e| Error::Config(format!("invalid configuration: {e}")))
}

/// Fully-resolved settings: every field concrete, ready to build a run.
#[derive(Debug, Clone, Serialize)]
pub struct Resolved {
    pub scenario: Scenario,
    pub conformity_label: String,
    pub grading: f64,
    pub outer: [f64; 4],
    pub inner: [f64; 4],
    pub n_inner: usize,
    pub n_outer: usize,
    pub r_inner: f64,
    pub r_outer: f64,
    pub n_gamma: usize,
    pub l_habitat: f64,
    pub l_tail: f64,
    pub y0: f64,
    pub y1: f64,
    pub nx_habitat: usize,
    pub nx_tail: usize,
    pub ny: usize,
    #[serde(skip)]
    pub model: ModelParams,
    pub tau: f64,
    pub tol_steady: f64,
    pub max_steps: usize,
    pub t0: f64,
    pub t_final: Option<f64>,
    pub initial: Option<(f64, f64, [f64; 2])>,
    pub output_dir: PathBuf,
    pub snapshot_interval: usize,
    pub oracle_h0: f64,
    pub oracle_tau: f64,
    pub oracle_tol: f64,
    pub converge_levels: Vec<usize>,
    /// Serializable copy of `model` for the config echo (TOML tables must
    /// come after plain values).
    #[serde(rename = "model")]
    pub model_echo: ModelSection,
    #[serde(skip)]
    pub conformity: Conformity,
}

fn missing(section: &str, field: &str, scenario: Scenario) -> Error {
    Error::Config(format!(
        "missing required field `{field}` in [{section}] for scenario {scenario:?}"
    ))
}

/// Robin coefficient absorbing the exponential far field beyond the strip:
/// `b = (d₂n⁻ + c)/κ_L` with `n⁻` the negative root of `d₂n² + cn − m₂ = 0`
/// and `κ_L = (β/(1−β))√(d₂/d₀)`.
pub fn derive_robin(beta: f64, d2: f64, m2: f64, c: f64, d0: f64) -> f64 {
    let n_minus = (-c - (c * c + 4.0 * d2 * m2).sqrt()) / (2.0 * d2);
    let kappa_l = beta / (1.0 - beta) * (d2 / d0).sqrt();
    (d2 * n_minus + c) / kappa_l
}

pub fn resolve(cfg: &FileConfig) -> Result<Resolved> {
    let scenario = cfg
        .scenario
        .ok_or_else(|| Error::Config("missing top-level `scenario`".into()))?;
    let m = &cfg.model;
    let d0 = m.d0.unwrap_or(1.0);
    let c = m.c.unwrap_or([0.0, 0.0]);
    let mut robin_b = m.robin_b;
    if scenario == Scenario::StripValidation && robin_b.is_none() {
        robin_b = match (m.beta, m.d2, m.m2) {
            (Some(beta), Some(d2), Some(m2)) => Some(derive_robin(beta, d2, m2, c[0], d0)),
            _ => {
                return Err(Error::Config(
                    "scenario strip_validation requires `robin_b` in [model] \
                     (or `beta`, `d2` and `m2` to derive it)"
                        .into(),
                ))
            }
        };
    }
    let model = ModelParams {
        d0,
        d1: m.d1.unwrap_or(1.0),
        r: m.r.unwrap_or(1.0),
        a: m.a.unwrap_or(1.0),
        m: m.m.unwrap_or(1.0),
        alpha: m.alpha.ok_or_else(|| missing("model", "alpha", scenario))?,
        c,
        robin_b,
        d2: m.d2,
        m2: m.m2,
        beta: m.beta,
    };
    model.validate()?;
    let model_echo = ModelSection {
        d0: Some(model.d0),
        d1: Some(model.d1),
        r: Some(model.r),
        a: Some(model.a),
        m: Some(model.m),
        alpha: Some(model.alpha),
        c: Some(model.c),
        robin_b: model.robin_b,
        d2: model.d2,
        m2: model.m2,
        beta: model.beta,
    };

    let ms = &cfg.mesh;
    let conformity_label = ms
        .conformity
        .clone()
        .unwrap_or_else(|| "conformal".to_owned());
    let conformity = match conformity_label.as_str() {
        "conformal" => Conformity::Conformal,
        "nonconformal" => Conformity::Nonconformal,
        other => {
            return Err(Error::Config(format!(
                "mesh.conformity must be \"conformal\" or \"nonconformal\", got \"{other}\""
            )))
        }
    };
    let need_rect = matches!(scenario, Scenario::RectShift | Scenario::ShrinkingRect);
    let need_disk = scenario == Scenario::DiskShift;
    let need_strip = matches!(scenario, Scenario::StripValidation | Scenario::Manufactured);
    let resolved = Resolved {
        scenario,
        conformity_label,
        conformity,
        grading: ms.grading.unwrap_or(1.2),
        outer: if need_rect {
            ms.outer.ok_or_else(|| missing("mesh", "outer", scenario))?
        } else {
            ms.outer.unwrap_or([0.0; 4])
        },
        inner: if need_rect {
            ms.inner.ok_or_else(|| missing("mesh", "inner", scenario))?
        } else {
            ms.inner.unwrap_or([0.0; 4])
        },
        n_inner: if need_rect {
            ms.n_inner
                .ok_or_else(|| missing("mesh", "n_inner", scenario))?
        } else {
            ms.n_inner.unwrap_or(0)
        },
        n_outer: if need_rect || need_disk {
            ms.n_outer
                .ok_or_else(|| missing("mesh", "n_outer", scenario))?
        } else {
            ms.n_outer.unwrap_or(0)
        },
        r_inner: if need_disk {
            ms.r_inner
                .ok_or_else(|| missing("mesh", "r_inner", scenario))?
        } else {
            ms.r_inner.unwrap_or(0.0)
        },
        r_outer: if need_disk {
            ms.r_outer
                .ok_or_else(|| missing("mesh", "r_outer", scenario))?
        } else {
            ms.r_outer.unwrap_or(0.0)
        },
        n_gamma: if need_disk {
            ms.n_gamma
                .ok_or_else(|| missing("mesh", "n_gamma", scenario))?
        } else {
            ms.n_gamma.unwrap_or(0)
        },
        l_habitat: if need_strip {
            ms.l_habitat
                .ok_or_else(|| missing("mesh", "l_habitat", scenario))?
        } else {
            ms.l_habitat.unwrap_or(0.0)
        },
        l_tail: if need_strip {
            ms.l_tail
                .ok_or_else(|| missing("mesh", "l_tail", scenario))?
        } else {
            ms.l_tail.unwrap_or(0.0)
        },
        y0: ms.y0.unwrap_or(0.0),
        y1: ms.y1.unwrap_or(1.0),
        nx_habitat: if need_strip {
            ms.nx_habitat
                .ok_or_else(|| missing("mesh", "nx_habitat", scenario))?
        } else {
            ms.nx_habitat.unwrap_or(0)
        },
        nx_tail: if need_strip {
            ms.nx_tail
                .ok_or_else(|| missing("mesh", "nx_tail", scenario))?
        } else {
            ms.nx_tail.unwrap_or(0)
        },
        ny: if need_strip {
            ms.ny.ok_or_else(|| missing("mesh", "ny", scenario))?
        } else {
            ms.ny.unwrap_or(0)
        },
        model,
        model_echo,
        tau: cfg.stepper.tau.unwrap_or(0.1),
        tol_steady: cfg.stepper.tol_steady.unwrap_or(1e-5),
        max_steps: cfg.stepper.max_steps.unwrap_or(100_000),
        t0: cfg.stepper.t0.unwrap_or(0.0),
        t_final: cfg.stepper.t_final,
        initial: match (&cfg.initial.amplitude, &cfg.initial.sigma, &cfg.initial.center) {
            (Some(a), s, ctr) => Some((*a, s.unwrap_or(0.5), ctr.unwrap_or([0.0, 0.0]))),
            _ => None,
        },
        output_dir: resolve_output_dir(cfg.output.dir.as_deref().unwrap_or("out")),
        snapshot_interval: cfg.output.snapshot_interval.unwrap_or(0),
        oracle_h0: cfg.oracle.h0.unwrap_or(2.5e-3),
        oracle_tau: cfg.oracle.tau.unwrap_or(2.5e-2),
        oracle_tol: cfg.oracle.tol.unwrap_or(1e-7),
        converge_levels: cfg
            .converge
            .levels
            .clone()
            .unwrap_or_else(|| vec![10, 20, 40]),
    };
    Ok(resolved)
}

fn resolve_output_dir(configured: &str) -> PathBuf {
    match std::env::var_os(OUTPUT_ROOT_ENV) {
        Some(root) => Path::new(&root).join(configured),
        None => PathBuf::from(configured),
    }
}

impl Resolved {
    pub fn build_mesh(&self) -> Result<Mesh> {
        match self.scenario {
            Scenario::RectShift | Scenario::ShrinkingRect => mhfem::mesh::gen_rect_bidomain(
                Rect::new(self.outer[0], self.outer[1], self.outer[2], self.outer[3]),
                Rect::new(self.inner[0], self.inner[1], self.inner[2], self.inner[3]),
                self.n_inner,
                self.n_outer,
                self.grading,
                self.conformity,
            ),
            Scenario::DiskShift => mhfem::mesh::gen_disk_bidomain(
                self.r_inner,
                self.r_outer,
                self.n_gamma,
                self.n_outer,
                self.grading,
            ),
            Scenario::StripValidation | Scenario::Manufactured => {
                let far_end = if self.scenario == Scenario::StripValidation {
                    BoundaryMarker::OuterRobin
                } else {
                    BoundaryMarker::OuterDirichlet
                };
                mhfem::mesh::gen_strip_bidomain(
                    self.l_habitat,
                    self.l_tail,
                    self.y0,
                    self.y1,
                    self.nx_habitat,
                    self.nx_tail,
                    self.ny,
                    self.grading,
                    self.conformity,
                    StripBc {
                        ell0: far_end,
                        ell1: BoundaryMarker::OuterDirichlet,
                        horizontal: BoundaryMarker::OuterNeumann,
                    },
                )
            }
        }
    }

    pub fn ale_map(&self) -> AleMap {
        match self.scenario {
            Scenario::ShrinkingRect => AleMap::ShrinkingRect {
                c1: self.model.c[0],
                c2: self.model.c[1],
                ly: self.inner[3] - self.inner[2],
            },
            _ => AleMap::LinearShift {
                c1: self.model.c[0],
                c2: self.model.c[1],
            },
        }
    }

    pub fn stepper_config(&self) -> StepperConfig {
        StepperConfig {
            tau: self.tau,
            tol_steady: self.tol_steady,
            max_steps: self.max_steps,
            t0: self.t0,
        }
    }

    /// Writes the fully-resolved configuration next to the run artifacts.
    pub fn echo(&self) -> Result<()> {
        std::fs::create_dir_all(&self.output_dir)
            .map_err(|e| Error::io(self.output_dir.display().to_string(), e))?;
        let text = toml::to_string_pretty(self)
            .map_err(|e| Error::Config(format!("config serialization failed: {e}")))?;
        let path = self.output_dir.join("config_resolved.toml");
        std::fs::write(&path, text).map_err(|e| Error::io(path.display().to_string(), e))
    }
}
