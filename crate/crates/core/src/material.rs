//! Generalized Maxwell material: an elastic branch (any sum of elastic
//! models) in parallel with any number of Maxwell branches.

use crate::elastic::{energy_density, evaluate, ElasticModel, Response};
use crate::error::{Error, Result};
use crate::kinematics::Metrics;
use crate::maxwell::{update_branch, LocalMethod, MaxwellBranch, MaxwellHistory, TangentMode};
use crate::tensor::Mat2;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Material {
    #[serde(default)]
    pub elastic: Vec<ElasticModel>,
    #[serde(default)]
    pub branches: Vec<MaxwellBranch>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PointOptions {
    pub tangent: TangentMode,
    pub local: LocalMethod,
}

/// Everything produced at one material point for one trial state.
#[derive(Debug, Clone, PartialEq)]
pub struct PointEval {
    pub response: Response,
    pub histories: Vec<MaxwellHistory>,
    /// Total Cauchy stress σ^{αβ} and moment M^{αβ}.
    pub sigma: Mat2,
    pub moment: Mat2,
    /// Maxwell-branch parts of `sigma` and `moment`.
    pub sigma_visc: Mat2,
    pub moment_visc: Mat2,
    pub j: f64,
    pub local_iterations: usize,
    pub dissipation_increment: f64,
}

impl Material {
    pub fn elastic(models: Vec<ElasticModel>) -> Self {
        Material { elastic: models, branches: Vec::new() }
    }

    pub fn with_branch(mut self, b: MaxwellBranch) -> Self {
        self.branches.push(b);
        self
    }

    pub fn validate(&self) -> Result<()> {
        for m in &self.elastic {
            m.validate()?;
        }
        for b in &self.branches {
            b.validate()?;
        }
        if self.elastic.is_empty() && self.branches.is_empty() {
            return Err(Error::InvalidParameter("material has neither elastic models nor branches".into()));
        }
        Ok(())
    }

    pub fn has_bending(&self) -> bool {
        self.elastic.iter().any(|m| m.has_bending()) || self.branches.iter().any(|b| b.bending.is_some())
    }

    pub fn is_viscous(&self) -> bool {
        !self.branches.is_empty()
    }

    pub fn initial_history(&self, reference: &Metrics) -> Vec<MaxwellHistory> {
        self.branches.iter().map(|_| MaxwellHistory::initial(reference)).collect()
    }

    /// Drops branches whose dashpot has zero viscosity. Such a branch relaxes
    /// instantaneously, so it carries no stress and dissipates nothing.
    pub fn without_inviscid_branches(&self) -> Material {
        let branches = self
            .branches
            .iter()
            .filter_map(|b| {
                let mut b = *b;
                if b.eta_s == 0.0 {
                    b.membrane = None;
                }
                if b.eta_b == 0.0 {
                    b.bending = None;
                }
                (!b.is_inert()).then_some(b)
            })
            .collect();
        Material { elastic: self.elastic.clone(), branches }
    }

    /// Elastic-branch free energy per reference area.
    pub fn elastic_energy(&self, cur: &Metrics, reference: &Metrics) -> Result<f64> {
        self.elastic.iter().map(|m| energy_density(m, cur, reference)).sum()
    }
}

/// Local updates of all branches from committed histories, then the summed
/// stress, moment and tangents.
pub fn evaluate_point(
    material: &Material,
    cur: &Metrics,
    reference: &Metrics,
    hist_n: &[MaxwellHistory],
    dt: f64,
    opts: PointOptions,
) -> Result<PointEval> {
    let j = (cur.det / reference.det).sqrt();
    if !(j > 0.0 && j.is_finite()) {
        return Err(Error::ElementInversion { element: usize::MAX, j });
    }
    let mut response = Response::default();
    for m in &material.elastic {
        response += evaluate(m, cur, reference)?;
    }
    let elastic_tau = response.tau;
    let elastic_m0 = response.m0;
    let mut histories = Vec::with_capacity(material.branches.len());
    let mut local_iterations = 0;
    let mut dissipation_increment = 0.0;
    for (b, h) in material.branches.iter().zip(hist_n) {
        let up = update_branch(b, h, cur, reference, dt, opts.tangent, opts.local)?;
        response += up.response;
        local_iterations = local_iterations.max(up.report.iterations);
        dissipation_increment += up.history.dissipation - h.dissipation;
        histories.push(up.history);
    }
    Ok(PointEval {
        sigma: response.tau / j,
        moment: response.m0 / j,
        sigma_visc: (response.tau - elastic_tau) / j,
        moment_visc: (response.m0 - elastic_m0) / j,
        response,
        histories,
        j,
        local_iterations,
        dissipation_increment,
    })
}
