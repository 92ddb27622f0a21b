//! Scenario execution: point-driver and finite element runs producing a
//! common row layout and run diagnostics.

use super::cases::{bending_curvatures, membrane_problem, PureBendCase, ScordelisLoCase};
use super::config::{CaseConfig, ScenarioConfig};
use crate::error::{Error, Result};
use crate::kinematics::{curvature_split, split_quantities, strain_split, Metrics};
use crate::material::{Material, PointOptions};
use crate::maxwell::MaxwellHistory;
use crate::oracles::PureBendParams;
use crate::point::{drive_steps_with, KinematicProgram, PointRecord};
use crate::solver::{QpRecord, Simulation, SolverOptions, StepReport};
use crate::tensor::{ddot, Mat2, Vec3};
use serde::Serialize;

/// One output row. Finite element rows hold area means over the surface.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub t: f64,
    /// Imposed scalar: displacement, traction, stretch, moment or load.
    pub drive: f64,
    pub stretch: [f64; 2],
    pub sigma: Mat2,
    pub sigma_elastic: Mat2,
    pub moment: Mat2,
    pub j: f64,
    pub j_el: f64,
    pub j_in: f64,
    pub i1: f64,
    pub i1_el: f64,
    pub ahat: Mat2,
    pub bhat: Mat2,
    /// `a^{22} b_{22}` and `a^{22} b̂_{22}`.
    pub kappa: f64,
    pub kappa_in: f64,
    pub dissipation: f64,
    /// Equilibrium or applied pressure; NaN when the case has none.
    pub pressure: f64,
    /// Displacement of the monitor point; NaN for point-driver runs.
    pub monitor: Vec3,
}

pub const COLUMNS: [&str; 31] = [
    "t", "drive", "lambda1", "lambda2", "s11", "s12", "s22", "s11_el", "s12_el", "s22_el", "m11", "m12", "m22", "J",
    "J_el", "J_in", "I1", "I1_el", "ahat11", "ahat12", "ahat22", "bhat11", "bhat12", "bhat22", "kappa", "kappa_in", "D",
    "p", "u_x", "u_y", "u_z",
];

impl Row {
    pub fn values(&self) -> Vec<f64> {
        let m = |a: &Mat2| [a[(0, 0)], a[(0, 1)], a[(1, 1)]];
        let mut v = vec![self.t, self.drive, self.stretch[0], self.stretch[1]];
        v.extend(m(&self.sigma));
        v.extend(m(&self.sigma_elastic));
        v.extend(m(&self.moment));
        v.extend([self.j, self.j_el, self.j_in, self.i1, self.i1_el]);
        v.extend(m(&self.ahat));
        v.extend(m(&self.bhat));
        v.extend([self.kappa, self.kappa_in, self.dissipation, self.pressure, self.monitor.x, self.monitor.y, self.monitor.z]);
        v
    }
}

/// Run diagnostics, written next to the time series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub name: String,
    pub case: String,
    pub steps: usize,
    pub dt: f64,
    pub t_end: f64,
    pub max_newton_iterations: usize,
    pub max_local_iterations: usize,
    /// Largest `|J − J_el J_in|`, strain and curvature split defect over all
    /// evaluation points and steps.
    pub max_split_defect: f64,
    pub dissipation_nondecreasing: bool,
    pub final_dissipation: f64,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub rows: Vec<Row>,
    pub summary: RunSummary,
    pub reports: Vec<StepReport>,
}

fn case_name(case: &CaseConfig) -> &'static str {
    match case {
        CaseConfig::Point { .. } => "point",
        CaseConfig::Membrane { .. } => "membrane",
        CaseConfig::PureBending { .. } => "pure_bending",
        CaseConfig::ScordelisLo { .. } => "scordelis_lo",
    }
}

/// Number of equal steps covering `[0, t_end]` with steps no longer than `dt`.
pub fn step_count(dt: f64, t_end: f64) -> usize {
    ((t_end / dt) - 1e-9).ceil().max(1.0) as usize
}

fn first_history(h: &[MaxwellHistory], reference: &Metrics) -> MaxwellHistory {
    h.first().copied().unwrap_or_else(|| MaxwellHistory::initial(reference))
}

fn split_defect(cur: &Metrics, reference: &Metrics, h: &MaxwellHistory) -> Result<f64> {
    let s = split_quantities(cur, reference, &h.ahat(), &h.bhat())?;
    let dj = (s.j - s.j_el * s.j_in).abs();
    let de = strain_split(&cur.a_co, &reference.a_co, &s.ahat_co).defect();
    let dk = curvature_split(&cur.b_co, &reference.b_co, &h.bhat()).defect();
    Ok(dj.max(de).max(dk))
}

impl PureBendCase {
    pub fn from_config(cfg: &ScenarioConfig) -> Result<Self> {
        match cfg.case {
            CaseConfig::PureBending { c, c1, eta_b, kappa_end, mu, bulk, length, width, elements, degrees } => Ok(PureBendCase {
                params: PureBendParams { c, c1, eta_b, t_end: cfg.time.t_end, kappa_end, length },
                mu,
                bulk,
                width,
                degrees,
                n_el: elements[1],
            }),
            _ => Err(Error::UnsupportedStudy(format!("`{}` is not a pure bending case", cfg.name))),
        }
    }
}

impl ScordelisLoCase {
    pub fn from_config(cfg: &ScenarioConfig) -> Result<Self> {
        match cfg.case {
            CaseConfig::ScordelisLo { radius, length, half_angle_deg, elements, load, ramp } => Ok(ScordelisLoCase {
                radius,
                length,
                half_angle: half_angle_deg.to_radians(),
                n_el: elements,
                load,
                ramp,
            }),
            _ => Err(Error::UnsupportedStudy(format!("`{}` is not a Scordelis-Lo case", cfg.name))),
        }
    }
}

fn point_row(r: &PointRecord, program: &KinematicProgram) -> Row {
    let cur = program.current(r.stretch).ok();
    let kappa = cur.map_or(f64::NAN, |c| c.a_con[(1, 1)] * c.b_co[(1, 1)]);
    let kappa_in = cur.map_or(f64::NAN, |c| c.a_con[(1, 1)] * r.bhat[(1, 1)]);
    Row {
        t: r.t,
        drive: r.drive,
        stretch: r.stretch,
        sigma: r.sigma,
        sigma_elastic: r.sigma_elastic,
        moment: r.moment,
        j: r.j,
        j_el: r.j_el,
        j_in: r.j_in,
        i1: r.i1,
        i1_el: r.i1_el,
        ahat: r.ahat,
        bhat: r.bhat,
        kappa,
        kappa_in,
        dissipation: r.dissipation,
        pressure: r.pressure.unwrap_or(f64::NAN),
        monitor: Vec3::repeat(f64::NAN),
    }
}

/// Row of area means at the committed simulation state.
pub fn fe_row(sim: &Simulation, drive: f64, pressure: f64, monitor: Vec3) -> Result<Row> {
    let (mut area, mut j, mut j_el, mut j_in, mut i1, mut i1_el) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    let (mut l1, mut l2, mut kappa, mut kappa_in, mut diss) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let (mut sigma, mut sigma_el, mut moment, mut ahat, mut bhat) =
        (Mat2::zeros(), Mat2::zeros(), Mat2::zeros(), Mat2::zeros(), Mat2::zeros());
    for r in sim.records.iter().flatten() {
        let w = r.area;
        let h = first_history(&r.histories, &r.reference);
        let s = split_quantities(&r.current, &r.reference, &h.ahat(), &h.bhat())?;
        area += w;
        j += w * s.j;
        j_el += w * s.j_el;
        j_in += w * s.j_in;
        i1 += w * s.i1;
        i1_el += w * s.i1_el;
        l1 += w * (r.current.a_co[(0, 0)] / r.reference.a_co[(0, 0)]).sqrt();
        l2 += w * (r.current.a_co[(1, 1)] / r.reference.a_co[(1, 1)]).sqrt();
        kappa += w * r.current.a_con[(1, 1)] * r.current.b_co[(1, 1)];
        kappa_in += w * r.current.a_con[(1, 1)] * h.bhat()[(1, 1)];
        diss += w * r.histories.iter().map(|h| h.dissipation).sum::<f64>();
        sigma += w * r.sigma;
        sigma_el += w * (r.sigma - r.sigma_visc);
        moment += w * r.moment;
        ahat += w * h.ahat();
        bhat += w * h.bhat();
    }
    let a = 1.0 / area;
    Ok(Row {
        t: sim.t,
        drive,
        stretch: [l1 * a, l2 * a],
        sigma: sigma * a,
        sigma_elastic: sigma_el * a,
        moment: moment * a,
        j: j * a,
        j_el: j_el * a,
        j_in: j_in * a,
        i1: i1 * a,
        i1_el: i1_el * a,
        ahat: ahat * a,
        bhat: bhat * a,
        kappa: kappa * a,
        kappa_in: kappa_in * a,
        dissipation: diss * a,
        pressure,
        monitor,
    })
}

fn sim_split_defect(sim: &Simulation) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for r in sim.records.iter().flatten() {
        for h in &r.histories {
            worst = worst.max(split_defect(&r.current, &r.reference, h)?);
        }
        if r.histories.is_empty() {
            worst = worst.max(split_defect(&r.current, &r.reference, &MaxwellHistory::initial(&r.reference))?);
        }
    }
    Ok(worst)
}

fn point_split_defect(program: &KinematicProgram, r: &PointRecord) -> Result<f64> {
    let cur = program.current(r.stretch)?;
    let reference = program.reference();
    let s = split_quantities(&cur, &reference, &r.ahat, &r.bhat)?;
    let de = strain_split(&cur.a_co, &reference.a_co, &s.ahat_co).defect();
    let dk = curvature_split(&cur.b_co, &reference.b_co, &r.bhat).defect();
    Ok((r.j - r.j_el * r.j_in).abs().max(de).max(dk))
}

fn nondecreasing(rows: &[Row]) -> bool {
    rows.windows(2).all(|w| w[1].dissipation >= w[0].dissipation)
}

/// Runs a point-driver program.
pub fn run_point(name: &str, program: &KinematicProgram, material: &Material, dt: f64, t_end: f64) -> Result<RunOutput> {
    run_point_with(name, program, material, dt, t_end, PointOptions::default())
}

pub fn run_point_with(
    name: &str,
    program: &KinematicProgram,
    material: &Material,
    dt: f64,
    t_end: f64,
    opts: PointOptions,
) -> Result<RunOutput> {
    let n = step_count(dt, t_end);
    let records = drive_steps_with(program, material, t_end, n, opts)?;
    let mut defect: f64 = 0.0;
    for r in &records {
        defect = defect.max(point_split_defect(program, r)?);
    }
    let rows: Vec<Row> = records.iter().map(|r| point_row(r, program)).collect();
    let summary = RunSummary {
        name: name.into(),
        case: "point".into(),
        steps: n,
        dt: t_end / n as f64,
        t_end,
        max_newton_iterations: 0,
        max_local_iterations: records.iter().map(|r| r.local_iterations).max().unwrap_or(0),
        max_split_defect: defect,
        dissipation_nondecreasing: nondecreasing(&rows),
        final_dissipation: rows.last().map_or(0.0, |r| r.dissipation),
    };
    Ok(RunOutput { rows, summary, reports: Vec::new() })
}

/// Drives a finite element simulation for `n` equal steps, recording a row
/// after every step.
pub fn run_simulation(
    name: &str,
    case: &str,
    mut sim: Simulation,
    t_end: f64,
    n: usize,
    row: impl Fn(&Simulation) -> Result<Row>,
) -> Result<(RunOutput, Simulation)> {
    let mut rows = vec![row(&sim)?];
    let mut defect = sim_split_defect(&sim)?;
    let reports = sim.run(t_end, n, |s, _| {
        defect = defect.max(sim_split_defect(s)?);
        rows.push(row(s)?);
        Ok(())
    })?;
    let summary = RunSummary {
        name: name.into(),
        case: case.into(),
        steps: n,
        dt: t_end / n as f64,
        t_end,
        max_newton_iterations: reports.iter().map(|r| r.iterations).max().unwrap_or(0),
        max_local_iterations: reports.iter().map(|r| r.local_iterations).max().unwrap_or(0),
        max_split_defect: defect,
        dissipation_nondecreasing: nondecreasing(&rows),
        final_dissipation: rows.last().map_or(0.0, |r| r.dissipation),
    };
    Ok((RunOutput { rows, summary, reports }, sim))
}

/// Pressure `p = σ:a / r` balancing the membrane forces of the flat balloon
/// equivalent, `r = R λ`.
fn balloon_fe_pressure(sim: &Simulation, radius: f64, lambda: f64) -> f64 {
    sim.mean(|r: &QpRecord| ddot(&r.sigma, &r.current.a_co)) / (radius * lambda)
}

/// Runs a configured scenario.
pub fn run(cfg: &ScenarioConfig) -> Result<RunOutput> {
    run_with(cfg, SolverOptions::default())
}

/// Runs a configured scenario with explicit solver options; the point driver
/// uses their tangent and local-solver choices.
pub fn run_with(cfg: &ScenarioConfig, options: SolverOptions) -> Result<RunOutput> {
    cfg.validate()?;
    let popts = PointOptions { tangent: options.tangent, local: options.local };
    let (dt, t_end) = (cfg.time.dt, cfg.time.t_end);
    let n = step_count(dt, t_end);
    let case = case_name(&cfg.case);
    match &cfg.case {
        CaseConfig::Point { program } => {
            run_point_with(&cfg.name, &program.to_program(t_end)?, &cfg.material, dt, t_end, popts)
        }
        CaseConfig::Membrane { program, elements, degrees } => {
            let program = program.to_program(t_end)?;
            let problem = membrane_problem(cfg.material.clone(), &program, *degrees, *elements)?;
            let sim = Simulation::new(problem, options)?;
            let radius = program.radius();
            let row = |s: &Simulation| {
                let corner = s.surface_displacement(1.0, 1.0)?;
                let p = radius.map_or(f64::NAN, |r| balloon_fe_pressure(s, r, program.drive_value(s.t)));
                fe_row(s, program.drive_value(s.t), p, corner)
            };
            Ok(run_simulation(&cfg.name, case, sim, t_end, n, row)?.0)
        }
        CaseConfig::PureBending { .. } => {
            let bend = PureBendCase::from_config(cfg)?;
            let elements = match cfg.case {
                CaseConfig::PureBending { elements, .. } => elements,
                _ => unreachable!(),
            };
            let sim = Simulation::new(bend.problem_with_mesh(elements)?, options)?;
            let params = bend.params;
            let row = |s: &Simulation| {
                let exact = crate::oracles::pure_bend_solution(&params, s.t)?;
                let end = s.surface_displacement(0.5, 1.0)?;
                let mut r = fe_row(s, exact.moment, exact.pressure, end)?;
                let (k, k_in) = bending_curvatures(s);
                r.kappa = k;
                r.kappa_in = k_in;
                Ok(r)
            };
            Ok(run_simulation(&cfg.name, case, sim, t_end, n, row)?.0)
        }
        CaseConfig::ScordelisLo { .. } => {
            let roof = ScordelisLoCase::from_config(cfg)?;
            let sim = Simulation::new(roof.problem(cfg.material.clone())?, options)?;
            let row = |s: &Simulation| {
                let load = roof.load * if roof.ramp > 0.0 { (s.t / roof.ramp).min(1.0) } else { 1.0 };
                fe_row(s, load, f64::NAN, roof.monitor_displacement(s)?)
            };
            Ok(run_simulation(&cfg.name, case, sim, t_end, n, row)?.0)
        }
    }
}
