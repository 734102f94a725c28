//! Run configuration (JSON). Every block rejects unknown keys.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::approx::{Problem, Schedule};
use crate::closures::{DiffusionClosure, DiffusionKind, ReactionClosure};
use crate::error::{config, Result};
use crate::mesh::ChannelMesh;
use crate::mixture::{MixtureParameters, WallTemperature};
use crate::solver::{ContinuationPath, NewtonOptions, Stage, StageKind};
use crate::verification::regime::RegimeQuery;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    #[serde(rename = "Lx")]
    pub lx: f64,
    #[serde(rename = "Ly")]
    pub ly: f64,
    pub nx: usize,
    pub ny: usize,
    /// spatial dimension; the channel solver is two-dimensional
    pub d: usize,
    /// used only by `classify`
    #[serde(default)]
    pub axisymmetric: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsConfig {
    pub gamma: f64,
    pub n: usize,
    pub cv: Vec<f64>,
    pub m_exp: f64,
    pub a_exp: f64,
    pub mu0: f64,
    pub nu0: f64,
    pub kappa0: f64,
    pub d0: f64,
    #[serde(rename = "K0_rate")]
    pub k0_rate: f64,
    #[serde(rename = "M_total")]
    pub m_total: f64,
    pub f_friction: f64,
    #[serde(rename = "L_heat")]
    pub l_heat: f64,
    pub theta0: WallTemperature,
    pub force: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClosureConfig {
    pub kind: DiffusionKind,
    /// exponent of the (sum Y + eps)^(-r) damping of the diffusion matrix
    pub r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageParams {
    pub eta: f64,
    pub lambda: f64,
    pub eps: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    /// first stage of the automatic geometric path
    pub start: StageParams,
    /// last stage of the automatic geometric path
    pub end: StageParams,
    pub factor: f64,
    /// uniform mesh refinements performed before the parameters are reduced
    pub refinements: usize,
    pub beta: f64,
    /// defaults to max(2m + 2, 6)
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub b_exp: Option<f64>,
    /// explicit stage list; replaces the automatic path when non-empty
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub stages: Vec<StageParams>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub newton_tol: f64,
    pub max_iter: usize,
    pub max_backtracks: usize,
    pub max_bisections: usize,
    pub reproducible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: String,
    pub solution: String,
    pub diagnostics: String,
    pub summary: String,
    pub audit: String,
    pub diagnose: String,
    pub mms_table: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditConfig {
    /// relative tolerance of the entropy-equality audit
    pub entropy_rel_tol: f64,
    /// relative tolerance of the global energy balance
    pub energy_rel_tol: f64,
    /// relative tolerance reported with the (advisory) limit weak forms
    pub weak_rel_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnoseConfig {
    pub alpha: f64,
    pub include_delta: bool,
    /// exponents (a, b) of the kinetic functional
    pub b_exponents: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MmsConfig {
    /// elements per direction on each level
    pub levels: Vec<usize>,
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub geometry: GeometryConfig,
    pub physics: PhysicsConfig,
    pub closure: ClosureConfig,
    pub schedule: ScheduleConfig,
    pub solver: SolverConfig,
    pub output: OutputConfig,
    pub audit: AuditConfig,
    pub diagnose: DiagnoseConfig,
    pub mms: MmsConfig,
    pub sweep: SweepConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = MixtureParameters::default();
        Self {
            schema_version: SCHEMA_VERSION,
            geometry: GeometryConfig {
                lx: 1.0,
                ly: 1.0,
                nx: 8,
                ny: 8,
                d: 2,
                axisymmetric: false,
            },
            physics: PhysicsConfig {
                gamma: p.gamma,
                n: p.n(),
                cv: p.cv.clone(),
                m_exp: p.m_exp,
                a_exp: p.a_exp,
                mu0: p.mu0,
                nu0: p.nu0,
                kappa0: p.kappa0,
                d0: 1.0,
                k0_rate: 1.0,
                m_total: p.m_total,
                f_friction: p.f_friction,
                l_heat: p.l_heat,
                theta0: p.theta0,
                force: p.force,
            },
            closure: ClosureConfig {
                kind: DiffusionKind::Nondiagonal,
                r: 1.0,
            },
            schedule: ScheduleConfig {
                start: StageParams {
                    eta: 1e-3,
                    lambda: 1e-2,
                    eps: 1e-1,
                    delta: 1.0,
                },
                end: StageParams {
                    eta: 2.5e-4,
                    lambda: 2.5e-3,
                    eps: 5e-2,
                    delta: 0.5,
                },
                factor: 0.5,
                refinements: 0,
                beta: 4.0,
                b_exp: None,
                stages: Vec::new(),
            },
            solver: SolverConfig {
                newton_tol: 1e-10,
                max_iter: 50,
                max_backtracks: 30,
                max_bisections: 5,
                reproducible: false,
            },
            output: OutputConfig {
                dir: "out".into(),
                solution: "solution.csv".into(),
                diagnostics: "diagnostics.csv".into(),
                summary: "summary.json".into(),
                audit: "audit.json".into(),
                diagnose: "diagnose.json".into(),
                mms_table: "mms.csv".into(),
            },
            audit: AuditConfig {
                entropy_rel_tol: 1e-6,
                energy_rel_tol: 1e-5,
                weak_rel_tol: 1e-8,
            },
            diagnose: DiagnoseConfig {
                alpha: 0.5,
                include_delta: true,
                b_exponents: [1.0, 0.5],
            },
            mms: MmsConfig {
                levels: vec![8, 16, 32],
                amplitude: 1.0,
            },
            sweep: SweepConfig { samples: 10_000 },
        }
    }
}

impl RunConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let c: Self =
            serde_json::from_str(s).map_err(|e| config(format!("parsing configuration: {e}")))?;
        if c.schema_version != SCHEMA_VERSION {
            return Err(config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                c.schema_version
            )));
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path)
            .map_err(|e| config(format!("reading {}: {e}", path.display())))?;
        Self::from_json(&s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configuration serializes")
    }

    pub fn params(&self) -> MixtureParameters {
        let ph = &self.physics;
        MixtureParameters {
            gamma: ph.gamma,
            molar_masses: vec![1.0; ph.n],
            cv: ph.cv.clone(),
            m_exp: ph.m_exp,
            a_exp: ph.a_exp,
            mu0: ph.mu0,
            nu0: ph.nu0,
            kappa0: ph.kappa0,
            m_total: ph.m_total,
            f_friction: ph.f_friction,
            l_heat: ph.l_heat,
            theta0: ph.theta0,
            force: ph.force,
            transport_override: None,
        }
    }

    pub fn diffusion(&self) -> DiffusionClosure {
        DiffusionClosure {
            kind: self.closure.kind,
            d0: self.physics.d0,
            a_exp: self.physics.a_exp,
            user: None,
        }
    }

    pub fn reaction(&self) -> ReactionClosure {
        ReactionClosure::chain(self.physics.n, self.physics.k0_rate)
    }

    fn schedule_of(&self, s: &StageParams) -> Schedule {
        let mut out = Schedule::with_defaults(s.eta, s.lambda, s.eps, s.delta, self.physics.m_exp);
        out.beta = self.schedule.beta;
        if let Some(b) = self.schedule.b_exp {
            out.b_exp = b;
        }
        out.r = self.closure.r;
        out
    }

    /// Problem at the first stage of the path.
    pub fn problem(&self) -> Result<Problem> {
        let path = self.path()?;
        Ok(Problem::new(
            self.params(),
            self.diffusion(),
            self.reaction(),
            path.stages[0].schedule,
        ))
    }

    pub fn path(&self) -> Result<ContinuationPath> {
        let sc = &self.schedule;
        if !sc.stages.is_empty() {
            let mut stages = Vec::new();
            for (i, s) in sc.stages.iter().enumerate() {
                let kind = if i == 0 {
                    StageKind::Initial
                } else {
                    changed_kind(&sc.stages[i - 1], s)
                };
                stages.push(Stage {
                    kind,
                    schedule: self.schedule_of(s),
                    level: 0,
                });
            }
            return Ok(ContinuationPath { stages });
        }
        ContinuationPath::geometric(
            self.schedule_of(&sc.start),
            self.schedule_of(&sc.end),
            sc.refinements,
            sc.factor,
        )
    }

    pub fn mesh(&self) -> Result<ChannelMesh> {
        ChannelMesh::new(
            self.geometry.lx,
            self.geometry.ly,
            self.geometry.nx,
            self.geometry.ny,
        )
    }

    pub fn newton(&self) -> NewtonOptions {
        NewtonOptions {
            newton_tol: self.solver.newton_tol,
            max_iter: self.solver.max_iter,
            max_backtracks: self.solver.max_backtracks,
            ..Default::default()
        }
    }

    pub fn regime_query(&self) -> RegimeQuery {
        RegimeQuery {
            gamma: self.physics.gamma,
            m_exp: self.physics.m_exp,
            a_exp: self.physics.a_exp,
            axisymmetric: self.geometry.axisymmetric,
            f_friction: self.physics.f_friction,
        }
    }

    /// Every invariant that can be checked without assembling anything.
    pub fn validate(&self) -> Result<()> {
        if self.geometry.d != 2 {
            return Err(config(format!(
                "the channel solver is two-dimensional, got d = {}",
                self.geometry.d
            )));
        }
        if self.physics.n == 0 || self.physics.cv.len() != self.physics.n {
            return Err(config(format!(
                "cv must list one value per species (n = {})",
                self.physics.n
            )));
        }
        if !(self.physics.f_friction > 0.0) {
            return Err(config(format!(
                "f_friction must be positive, got {}",
                self.physics.f_friction
            )));
        }
        self.mesh()?;
        let problem = self.problem()?;
        problem.validate()?;
        self.path()?.validate(self.physics.m_exp)?;
        if !(self.solver.newton_tol > 0.0) || self.solver.max_iter == 0 {
            return Err(config(
                "newton_tol must be positive and max_iter at least 1",
            ));
        }
        Ok(())
    }
}

fn changed_kind(a: &StageParams, b: &StageParams) -> StageKind {
    if b.delta != a.delta {
        StageKind::Delta
    } else if b.eps != a.eps {
        StageKind::Eps
    } else if b.lambda != a.lambda {
        StageKind::Lambda
    } else {
        StageKind::Eta
    }
}
