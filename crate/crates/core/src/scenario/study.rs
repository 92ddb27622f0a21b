//! Convergence studies against the closed-form solutions and the cyclic
//! frequency sweep.

use super::cases::{bending_curvatures, curvature_l2_error, membrane_problem, PureBendCase};
use super::config::{CaseConfig, ProgramConfig, ScenarioConfig, StudyKind};
use super::output::{ensure_dir, write_table, write_toml};
use super::run::step_count;
use crate::elastic::ElasticKind;
use crate::error::{Error, Result};
use crate::material::Material;
use crate::maxwell::SpringKind;
use crate::oracles::{
    balloon_pressure, convergence_order, pure_bend_solution, relative_error, sphere_pressure, BalloonParams, SphereParams,
};
use crate::point::{drive, frequency_sweep, SweepSettings};
use crate::solver::{QpRecord, Simulation, SolverOptions};
use crate::tensor::ddot;
use rayon::prelude::*;
use serde::Serialize;
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyPoint {
    pub dt: f64,
    pub elements: usize,
    pub errors: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyTable {
    pub name: String,
    pub kind: StudyKind,
    pub error_names: Vec<String>,
    pub points: Vec<StudyPoint>,
    /// Fitted log-log slopes per error measure (over Δt, or over the inverse
    /// element count for mesh studies).
    pub orders: Vec<f64>,
    /// `(max − min) / max` of the first error measure.
    pub variation: f64,
}

pub const DEFAULT_DT: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];

fn unsupported(cfg: &ScenarioConfig, what: &str) -> Error {
    Error::UnsupportedStudy(format!("`{}`: {what}", cfg.name))
}

/// Balloon oracle parameters read from an incompressible Neo-Hookean elastic
/// branch and one Neo-Hookean (K₁ = 0) Maxwell branch.
pub fn balloon_params(cfg: &ScenarioConfig) -> Result<BalloonParams> {
    let program = match &cfg.case {
        CaseConfig::Point { program } | CaseConfig::Membrane { program, .. } => program,
        _ => return Err(unsupported(cfg, "the balloon oracle needs a point or membrane case")),
    };
    let ProgramConfig::BalloonStretch { radius, lambda_end } = *program else {
        return Err(unsupported(cfg, "the balloon oracle needs the balloon stretch program"));
    };
    let m = &cfg.material;
    let (mu, mu1, eta_s) = match (m.elastic.as_slice(), m.branches.as_slice()) {
        ([e], [b])
            if e.kind == ElasticKind::IncompressibleNeoHookeanMembrane
                && b.bending.is_none()
                && b.membrane.is_some_and(|s| s.kind == SpringKind::NeoHookeanMembrane && s.bulk == 0.0) =>
        {
            (e.mu, b.membrane.map_or(0.0, |s| s.mu1), b.eta_s)
        }
        _ => return Err(unsupported(cfg, "no closed-form balloon pressure for this material")),
    };
    Ok(BalloonParams { radius, mu, mu1, eta_s, t_end: cfg.time.t_end, lambda_end })
}

/// Sphere oracle parameters: incompressible Neo-Hookean + Helfrich elastic
/// branch and one Neo-Hookean (K₁ = 0) + Koiter bending Maxwell branch.
pub fn sphere_params(cfg: &ScenarioConfig) -> Result<SphereParams> {
    let CaseConfig::Point { program: ProgramConfig::SphereStretchBend { radius, lambda_end } } = cfg.case else {
        return Err(unsupported(cfg, "the sphere oracle needs the point stretch-bend program"));
    };
    let m = &cfg.material;
    let membrane = m.elastic.iter().filter(|e| e.kind == ElasticKind::IncompressibleNeoHookeanMembrane);
    let helfrich = m.elastic.iter().filter(|e| e.kind == ElasticKind::HelfrichBending);
    let (mem, hel): (Vec<_>, Vec<_>) = (membrane.collect(), helfrich.collect());
    let ok = m.elastic.len() == 2 && mem.len() == 1 && hel.len() == 1 && m.branches.len() == 1;
    let b = m.branches.first();
    let spring = b.and_then(|b| b.membrane).filter(|s| s.kind == SpringKind::NeoHookeanMembrane && s.bulk == 0.0);
    match (ok, b, spring, b.and_then(|b| b.bending)) {
        (true, Some(b), Some(s), Some(bend)) => Ok(SphereParams {
            radius,
            mu: mem[0].mu,
            mu1: s.mu1,
            c1: bend.c1,
            k: hel[0].k,
            h0: hel[0].h0,
            eta_s: b.eta_s,
            eta_b: b.eta_b,
            t_end: cfg.time.t_end,
            lambda_end,
        }),
        _ => Err(unsupported(cfg, "no closed-form sphere pressure for this material")),
    }
}

fn dt_list(cfg: &ScenarioConfig) -> Vec<f64> {
    match &cfg.study {
        Some(s) if !s.dt.is_empty() => s.dt.clone(),
        _ => DEFAULT_DT.to_vec(),
    }
}

fn mesh_list(cfg: &ScenarioConfig) -> Result<Vec<[usize; 2]>> {
    match &cfg.study {
        Some(s) if !s.meshes.is_empty() => Ok(s.meshes.clone()),
        _ => Err(unsupported(cfg, "a mesh study needs `study.meshes`")),
    }
}

fn point_pressure_error(cfg: &ScenarioConfig, dt: f64, exact: f64) -> Result<f64> {
    let CaseConfig::Point { program } = &cfg.case else {
        return Err(unsupported(cfg, "time step studies of pressures use the point driver"));
    };
    let t_end = cfg.time.t_end;
    let series = drive(&program.to_program(t_end)?, &cfg.material, dt, t_end)?;
    let p = series.last().and_then(|r| r.pressure).ok_or_else(|| unsupported(cfg, "program yields no pressure"))?;
    relative_error(p, exact)
}

fn pure_bending_sim(bend: &PureBendCase, elements: [usize; 2], dt: f64) -> Result<Simulation> {
    let mut sim = Simulation::new(bend.problem_with_mesh(elements)?, SolverOptions::default())?;
    let t_end = bend.params.t_end;
    sim.run(t_end, step_count(dt, t_end), |_, _| Ok(()))?;
    Ok(sim)
}

fn balloon_mesh_error(cfg: &ScenarioConfig, elements: [usize; 2], exact: f64) -> Result<f64> {
    let CaseConfig::Membrane { program, degrees, .. } = &cfg.case else {
        return Err(unsupported(cfg, "the balloon mesh study needs a membrane case"));
    };
    let t_end = cfg.time.t_end;
    let program = program.to_program(t_end)?;
    let radius = program.radius().unwrap_or(1.0);
    let mut sim = Simulation::new(membrane_problem(cfg.material.clone(), &program, *degrees, elements)?, SolverOptions::default())?;
    sim.run(t_end, step_count(cfg.time.dt, t_end), |_, _| Ok(()))?;
    let p = sim.mean(|r: &QpRecord| ddot(&r.sigma, &r.current.a_co)) / (radius * program.drive_value(t_end));
    relative_error(p, exact)
}

/// Runs the configured convergence study. Independent runs execute in
/// parallel; results are ordered as configured.
pub fn convergence_study(cfg: &ScenarioConfig) -> Result<StudyTable> {
    cfg.validate()?;
    let kind = cfg.study.as_ref().map(|s| s.kind).ok_or_else(|| unsupported(cfg, "no `[study]` section"))?;
    let t_end = cfg.time.t_end;
    let (names, points): (Vec<&str>, Vec<StudyPoint>) = match kind {
        StudyKind::BalloonTimeStep => {
            let exact = balloon_pressure(&balloon_params(cfg)?, t_end)?.p_total;
            let pts = dt_list(cfg)
                .par_iter()
                .map(|&dt| Ok(StudyPoint { dt, elements: 0, errors: vec![point_pressure_error(cfg, dt, exact)?] }))
                .collect::<Result<_>>()?;
            (vec!["eps_p"], pts)
        }
        StudyKind::SphereTimeStep => {
            let exact = sphere_pressure(&sphere_params(cfg)?, t_end)?.p_total;
            let pts = dt_list(cfg)
                .par_iter()
                .map(|&dt| Ok(StudyPoint { dt, elements: 0, errors: vec![point_pressure_error(cfg, dt, exact)?] }))
                .collect::<Result<_>>()?;
            (vec!["eps_p"], pts)
        }
        StudyKind::BalloonMesh => {
            let exact = balloon_pressure(&balloon_params(cfg)?, t_end)?.p_total;
            let pts = mesh_list(cfg)?
                .par_iter()
                .map(|&m| {
                    let e = balloon_mesh_error(cfg, m, exact)?;
                    Ok(StudyPoint { dt: cfg.time.dt, elements: m[0] * m[1], errors: vec![e] })
                })
                .collect::<Result<_>>()?;
            (vec!["eps_p"], pts)
        }
        StudyKind::PureBendingTimeStep => {
            let bend = PureBendCase::from_config(cfg)?;
            let exact = pure_bend_solution(&bend.params, t_end)?;
            let CaseConfig::PureBending { elements, .. } = cfg.case else { unreachable!() };
            let pts = dt_list(cfg)
                .par_iter()
                .map(|&dt| {
                    let sim = pure_bending_sim(&bend, elements, dt)?;
                    let (k, k_in) = bending_curvatures(&sim);
                    let errors = vec![relative_error(k, exact.kappa)?, relative_error(k_in, exact.kappa_in)?];
                    Ok(StudyPoint { dt, elements: elements[0] * elements[1], errors })
                })
                .collect::<Result<_>>()?;
            (vec!["eps_kappa", "eps_kappa_in"], pts)
        }
        StudyKind::PureBendingMesh => {
            let bend = PureBendCase::from_config(cfg)?;
            let exact = pure_bend_solution(&bend.params, t_end)?;
            let pts = mesh_list(cfg)?
                .par_iter()
                .map(|&m| {
                    let sim = pure_bending_sim(&bend, m, cfg.time.dt)?;
                    let e = curvature_l2_error(&sim, exact.kappa)?;
                    Ok(StudyPoint { dt: cfg.time.dt, elements: m[0] * m[1], errors: vec![e] })
                })
                .collect::<Result<_>>()?;
            (vec!["eps_kappa_l2"], pts)
        }
    };
    let mesh_study = matches!(kind, StudyKind::BalloonMesh | StudyKind::PureBendingMesh);
    let h: Vec<f64> = points.iter().map(|p| if mesh_study { 1.0 / p.elements as f64 } else { p.dt }).collect();
    let orders = (0..names.len())
        .map(|i| {
            let e: Vec<f64> = points.iter().map(|p| p.errors[i]).collect();
            convergence_order(&h, &e).unwrap_or(f64::NAN)
        })
        .collect();
    let first: Vec<f64> = points.iter().map(|p| p.errors[0]).collect();
    let max = first.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = first.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(StudyTable {
        name: cfg.name.clone(),
        kind,
        error_names: names.into_iter().map(String::from).collect(),
        points,
        orders,
        variation: if max > 0.0 { (max - min) / max } else { 0.0 },
    })
}

/// Writes `<name>_convergence.csv` and `<name>_convergence.toml`.
pub fn write_study(table: &StudyTable, out: &Path) -> Result<()> {
    ensure_dir(out)?;
    let mut header = vec!["dt".to_string(), "elements".to_string()];
    header.extend(table.error_names.iter().cloned());
    let rows = table.points.iter().map(|p| {
        let mut v = vec![p.dt, p.elements as f64];
        v.extend(&p.errors);
        v
    });
    write_table(&out.join(format!("{}_convergence.csv", table.name)), &header, rows)?;
    write_toml(&out.join(format!("{}_convergence.toml", table.name)), table)
}

/// Replaces the membrane dashpot viscosity of every branch.
pub fn with_membrane_viscosity(material: &Material, eta_s: f64) -> Material {
    let mut m = material.clone();
    for b in &mut m.branches {
        b.eta_s = eta_s;
    }
    m
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub omegas: Vec<f64>,
    pub eta_s: Vec<f64>,
    /// `dissipation[i][k]`: viscosity `i`, frequency `k`.
    pub dissipation: Vec<Vec<f64>>,
}

pub fn sweep(cfg: &ScenarioConfig) -> Result<SweepTable> {
    cfg.validate()?;
    let s = cfg.sweep.as_ref().ok_or_else(|| unsupported(cfg, "no `[sweep]` section"))?;
    let omegas = s.omegas();
    let settings = SweepSettings { amplitude: s.amplitude, length: 1.0, cycles: s.cycles, steps_per_cycle: s.steps_per_cycle };
    let dissipation = s
        .eta_s
        .iter()
        .map(|&eta| {
            let d = frequency_sweep(&with_membrane_viscosity(&cfg.material, eta), &omegas, settings)?;
            Ok(d.into_iter().map(|(_, d)| d).collect())
        })
        .collect::<Result<_>>()?;
    Ok(SweepTable { omegas, eta_s: s.eta_s.clone(), dissipation })
}

/// Writes `<name>_sweep.csv` with one dissipation column per viscosity.
pub fn write_sweep(name: &str, table: &SweepTable, out: &Path) -> Result<()> {
    ensure_dir(out)?;
    let mut header = vec!["omega".to_string()];
    header.extend(table.eta_s.iter().map(|e| format!("D_eta_s={e}")));
    let rows = table.omegas.iter().enumerate().map(|(k, &w)| {
        let mut v = vec![w];
        v.extend(table.dissipation.iter().map(|d| d[k]));
        v
    });
    write_table(&out.join(format!("{name}_sweep.csv")), &header, rows)
}
