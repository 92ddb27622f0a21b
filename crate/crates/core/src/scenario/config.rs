//! Scenario configuration files (TOML).

use crate::error::{Error, Result};
use crate::material::Material;
use crate::point::KinematicProgram;
use crate::solver::piecewise_linear;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub time: TimeConfig,
    #[serde(default)]
    pub material: Material,
    pub case: CaseConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub study: Option<StudyConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub dt: f64,
    pub t_end: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Write every n-th step (the last step is always written).
    #[serde(default = "one")]
    pub every: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { every: 1 }
    }
}

fn one() -> usize {
    1
}

fn unit() -> f64 {
    1.0
}

/// `(t, value)` knots of a piecewise-linear schedule; repeated times give jumps.
pub type Schedule = Vec<[f64; 2]>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CaseConfig {
    /// Homogeneous material-point program.
    Point { program: ProgramConfig },
    /// Unit-square membrane finite element model of a homogeneous program.
    Membrane {
        program: ProgramConfig,
        #[serde(default = "default_membrane_mesh")]
        elements: [usize; 2],
        #[serde(default = "default_degrees")]
        degrees: [usize; 2],
    },
    /// Flat strip bent into a circular arc; the material is defined here.
    PureBending {
        c: f64,
        c1: f64,
        eta_b: f64,
        kappa_end: f64,
        mu: f64,
        #[serde(rename = "K")]
        bulk: f64,
        #[serde(default = "pi")]
        length: f64,
        #[serde(default = "unit")]
        width: f64,
        elements: [usize; 2],
        #[serde(default = "default_degrees")]
        degrees: [usize; 2],
    },
    /// Cylindrical roof on rigid diaphragms under a ramped vertical load.
    ScordelisLo {
        radius: f64,
        length: f64,
        half_angle_deg: f64,
        elements: [usize; 2],
        load: f64,
        ramp: f64,
    },
}

fn default_membrane_mesh() -> [usize; 2] {
    [1, 1]
}

fn default_degrees() -> [usize; 2] {
    [2, 2]
}

fn pi() -> f64 {
    std::f64::consts::PI
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProgramConfig {
    PureShear {
        displacement: Schedule,
        #[serde(default = "unit")]
        length: f64,
    },
    PureDilatation {
        displacement: Schedule,
        #[serde(default = "unit")]
        length: f64,
    },
    CreepTraction { traction: Schedule },
    Cyclic {
        amplitude: f64,
        omega: f64,
        #[serde(default = "unit")]
        length: f64,
    },
    BalloonStretch { radius: f64, lambda_end: f64 },
    SphereStretchBend { radius: f64, lambda_end: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StudyKind {
    /// Balloon pressure error over time step sizes (point driver).
    BalloonTimeStep,
    /// Balloon pressure error over meshes of the equibiaxial membrane model.
    BalloonMesh,
    /// Spherical shell pressure error over time step sizes (point driver).
    SphereTimeStep,
    /// Strip curvature errors over time step sizes.
    PureBendingTimeStep,
    /// Strip curvature error over meshes.
    PureBendingMesh,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub kind: StudyKind,
    #[serde(default)]
    pub dt: Vec<f64>,
    #[serde(default)]
    pub meshes: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Log-spaced frequencies `[ω_min, ω_max]` with `count` samples.
    pub omega_range: [f64; 2],
    pub count: usize,
    /// Viscosities substituted into every membrane dashpot, one curve each.
    pub eta_s: Vec<f64>,
    #[serde(default = "quarter")]
    pub amplitude: f64,
    #[serde(default = "ten")]
    pub cycles: usize,
    #[serde(default = "thousand")]
    pub steps_per_cycle: usize,
}

fn quarter() -> f64 {
    0.25
}

fn ten() -> usize {
    10
}

fn thousand() -> usize {
    1000
}

impl SweepConfig {
    pub fn omegas(&self) -> Vec<f64> {
        let [a, b] = self.omega_range;
        if self.count < 2 {
            return vec![a];
        }
        let (la, lb) = (a.ln(), b.ln());
        (0..self.count).map(|i| (la + (lb - la) * i as f64 / (self.count - 1) as f64).exp()).collect()
    }
}

fn invalid(path: &str, message: impl Into<String>) -> Error {
    Error::Config { path: path.into(), message: message.into() }
}

fn check_schedule(path: &str, s: &Schedule) -> Result<()> {
    if s.is_empty() {
        return Err(invalid(path, "schedule needs at least one knot"));
    }
    if s.iter().any(|k| !k[0].is_finite() || !k[1].is_finite()) {
        return Err(invalid(path, "schedule values must be finite"));
    }
    if s.windows(2).any(|w| w[1][0] < w[0][0]) {
        return Err(invalid(path, "schedule times must be nondecreasing"));
    }
    Ok(())
}

fn positive(path: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(path, format!("must be positive, got {v}")))
    }
}

impl ProgramConfig {
    pub fn to_program(&self, t_end: f64) -> Result<KinematicProgram> {
        let sched = |s: &Schedule| piecewise_linear(s.iter().map(|k| (k[0], k[1])).collect());
        Ok(match self {
            ProgramConfig::PureShear { displacement, length } => {
                KinematicProgram::PureShear { u: sched(displacement), length: *length }
            }
            ProgramConfig::PureDilatation { displacement, length } => {
                KinematicProgram::PureDilatation { u: sched(displacement), length: *length }
            }
            ProgramConfig::CreepTraction { traction } => KinematicProgram::CreepTraction { traction: sched(traction) },
            ProgramConfig::Cyclic { amplitude, omega, length } => {
                KinematicProgram::Cyclic { amplitude: *amplitude, omega: *omega, length: *length }
            }
            ProgramConfig::BalloonStretch { radius, lambda_end } => KinematicProgram::BalloonStretch {
                lambda: KinematicProgram::exponential_stretch(t_end, *lambda_end)?,
                radius: *radius,
            },
            ProgramConfig::SphereStretchBend { radius, lambda_end } => KinematicProgram::SphereStretchBend {
                lambda: KinematicProgram::exponential_stretch(t_end, *lambda_end)?,
                radius: *radius,
            },
        })
    }

    fn validate(&self, path: &str) -> Result<()> {
        match self {
            ProgramConfig::PureShear { displacement, length } | ProgramConfig::PureDilatation { displacement, length } => {
                check_schedule(&format!("{path}.displacement"), displacement)?;
                positive(&format!("{path}.length"), *length)
            }
            ProgramConfig::CreepTraction { traction } => check_schedule(&format!("{path}.traction"), traction),
            ProgramConfig::Cyclic { amplitude, omega, length } => {
                positive(&format!("{path}.omega"), *omega)?;
                positive(&format!("{path}.length"), *length)?;
                if !(amplitude.abs() < 1.0) {
                    return Err(invalid(&format!("{path}.amplitude"), "must lie in (-1, 1)"));
                }
                Ok(())
            }
            ProgramConfig::BalloonStretch { radius, lambda_end } | ProgramConfig::SphereStretchBend { radius, lambda_end } => {
                positive(&format!("{path}.radius"), *radius)?;
                if !(*lambda_end > 1.0) {
                    return Err(invalid(&format!("{path}.lambda_end"), "must exceed 1"));
                }
                Ok(())
            }
        }
    }
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| {
            let path = e.span().map(|s| locate(text, s.start)).unwrap_or_else(|| "<root>".into());
            invalid(&path, e.message().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| invalid("<root>", e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() || self.name.contains(['/', '\\']) {
            return Err(invalid("name", "must be a non-empty file-name-safe string"));
        }
        positive("time.dt", self.time.dt)?;
        positive("time.t_end", self.time.t_end)?;
        if self.output.every == 0 {
            return Err(invalid("output.every", "must be at least 1"));
        }
        match &self.case {
            CaseConfig::Point { program } => program.validate("case.program")?,
            CaseConfig::Membrane { program, elements, degrees } => {
                program.validate("case.program")?;
                if matches!(program, ProgramConfig::SphereStretchBend { .. }) {
                    return Err(invalid("case.program.kind", "the stretch-bend program is only available for the point driver"));
                }
                if matches!(program, ProgramConfig::BalloonStretch { .. }) && self.material.has_bending() {
                    return Err(invalid("material", "the flat balloon equivalent requires a membrane-only material"));
                }
                mesh_check("case", *elements, *degrees)?;
            }
            CaseConfig::PureBending { c, c1, eta_b, kappa_end, mu, bulk, length, width, elements, degrees } => {
                for (k, v) in [("c", c), ("c1", c1), ("eta_b", eta_b), ("kappa_end", kappa_end), ("length", length), ("width", width)] {
                    positive(&format!("case.{k}"), *v)?;
                }
                if *mu < 0.0 || *bulk < 0.0 {
                    return Err(invalid("case.mu", "membrane moduli must be nonnegative"));
                }
                mesh_check("case", *elements, *degrees)?;
            }
            CaseConfig::ScordelisLo { radius, length, half_angle_deg, elements, load, ramp } => {
                positive("case.radius", *radius)?;
                positive("case.length", *length)?;
                if !(*half_angle_deg > 0.0 && *half_angle_deg < 90.0) {
                    return Err(invalid("case.half_angle_deg", "must lie in (0, 90)"));
                }
                if !load.is_finite() || *ramp < 0.0 {
                    return Err(invalid("case.load", "load must be finite and ramp nonnegative"));
                }
                mesh_check("case", *elements, [2, 2])?;
            }
        }
        if !matches!(self.case, CaseConfig::PureBending { .. }) {
            self.material.validate().map_err(|e| invalid("material", e.to_string()))?;
        }
        if let Some(s) = &self.study {
            for (i, dt) in s.dt.iter().enumerate() {
                positive(&format!("study.dt[{i}]"), *dt)?;
            }
            for (i, m) in s.meshes.iter().enumerate() {
                if m[0] == 0 || m[1] == 0 {
                    return Err(invalid(&format!("study.meshes[{i}]"), "element counts must be positive"));
                }
            }
        }
        if let Some(s) = &self.sweep {
            positive("sweep.omega_range[0]", s.omega_range[0])?;
            positive("sweep.omega_range[1]", s.omega_range[1])?;
            if s.count == 0 || s.cycles == 0 || s.steps_per_cycle == 0 {
                return Err(invalid("sweep", "count, cycles and steps_per_cycle must be positive"));
            }
            for (i, e) in s.eta_s.iter().enumerate() {
                if !(*e >= 0.0) {
                    return Err(invalid(&format!("sweep.eta_s[{i}]"), "must be nonnegative"));
                }
            }
        }
        Ok(())
    }
}

fn mesh_check(path: &str, elements: [usize; 2], degrees: [usize; 2]) -> Result<()> {
    if elements.contains(&0) {
        return Err(invalid(&format!("{path}.elements"), "element counts must be positive"));
    }
    if degrees.iter().any(|&d| !(1..=4).contains(&d)) {
        return Err(invalid(&format!("{path}.degrees"), "degrees must lie in 1..=4"));
    }
    Ok(())
}

/// Best-effort dotted path of the table key enclosing a byte offset.
fn locate(text: &str, offset: usize) -> String {
    let mut table = String::new();
    let mut key = String::new();
    let mut pos = 0;
    for line in text.lines() {
        let trimmed = line.trim();
        if pos > offset {
            break;
        }
        if trimmed.starts_with('[') {
            table = trimmed.trim_matches(|c| c == '[' || c == ']').trim().to_string();
            key.clear();
        } else if let Some((k, _)) = trimmed.split_once('=') {
            key = k.trim().to_string();
        }
        pos += line.len() + 1;
    }
    match (table.is_empty(), key.is_empty()) {
        (true, true) => "<root>".into(),
        (true, false) => key,
        (false, true) => table,
        (false, false) => format!("{table}.{key}"),
    }
}
