//! Material-point driver: imposes homogeneous metric and curvature histories
//! and integrates the constitutive and Maxwell updates without assembly.

use crate::error::{Error, Result};
use crate::kinematics::{split_quantities, Metrics};
use crate::material::{evaluate_point, Material, PointEval, PointOptions};
use crate::maxwell::{maxwell_stress_and_moment, MaxwellHistory};
use crate::solver::TimeFn;
use crate::tensor::{ddot, Mat2};
use rayon::prelude::*;
use std::f64::consts::PI;
use std::sync::Arc;

const SCALAR_TOL: f64 = 1e-12;
const SCALAR_MAX_ITER: usize = 200;

/// Homogeneous loading programs. Planar programs use a unit reference metric
/// (`A = I`); curved ones a sphere of radius `R` (`A = R² I`, `B = −R I`).
#[derive(Clone)]
pub enum KinematicProgram {
    /// `λ_y = 1 + ū(t)/L₀`, `λ_x = 1/λ_y`.
    PureShear { u: TimeFn, length: f64 },
    /// `λ_x = λ_y = 1 + ū(t)/L₀`.
    PureDilatation { u: TimeFn, length: f64 },
    /// Equibiaxial dead traction per reference length; `λ` from equilibrium.
    CreepTraction { traction: TimeFn },
    /// Pure shear with `ū(t) = amplitude L₀ sin(ω t)`.
    Cyclic { amplitude: f64, omega: f64, length: f64 },
    /// `a = λ²A`, `b = B` held at the reference curvature scale.
    BalloonStretch { lambda: TimeFn, radius: f64 },
    /// `a = λ²A`, `b = λB`.
    SphereStretchBend { lambda: TimeFn, radius: f64 },
}

impl KinematicProgram {
    /// `λ(t) = exp(t/τ)` with `τ = t_end / ln λ_end`.
    pub fn exponential_stretch(t_end: f64, lambda_end: f64) -> Result<TimeFn> {
        let tau = crate::oracles::stretch_time(t_end, lambda_end)?;
        Ok(Arc::new(move |t| (t / tau).exp()))
    }

    pub fn name(&self) -> &'static str {
        match self {
            KinematicProgram::PureShear { .. } => "pure_shear",
            KinematicProgram::PureDilatation { .. } => "pure_dilatation",
            KinematicProgram::CreepTraction { .. } => "creep_traction",
            KinematicProgram::Cyclic { .. } => "cyclic",
            KinematicProgram::BalloonStretch { .. } => "balloon_stretch",
            KinematicProgram::SphereStretchBend { .. } => "sphere_stretch_bend",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = match self {
            KinematicProgram::PureShear { length, .. } | KinematicProgram::PureDilatation { length, .. } => {
                !(*length > 0.0)
            }
            KinematicProgram::Cyclic { amplitude, omega, length } => {
                !(*length > 0.0 && *omega > 0.0 && amplitude.abs() < 1.0)
            }
            KinematicProgram::BalloonStretch { radius, .. } | KinematicProgram::SphereStretchBend { radius, .. } => {
                !(*radius > 0.0)
            }
            KinematicProgram::CreepTraction { .. } => false,
        };
        if bad {
            return Err(Error::InvalidParameter(format!("invalid {} program parameters", self.name())));
        }
        Ok(())
    }

    pub fn reference(&self) -> Metrics {
        match self {
            KinematicProgram::BalloonStretch { radius, .. } | KinematicProgram::SphereStretchBend { radius, .. } => {
                Metrics::new(Mat2::identity() * (radius * radius), -Mat2::identity() * *radius)
                    .expect("positive radius")
            }
            _ => Metrics::new(Mat2::identity(), Mat2::zeros()).expect("unit metric"),
        }
    }

    /// Imposed scalar (displacement, traction or stretch) at time `t`.
    pub fn drive_value(&self, t: f64) -> f64 {
        match self {
            KinematicProgram::PureShear { u, .. } | KinematicProgram::PureDilatation { u, .. } => u(t),
            KinematicProgram::CreepTraction { traction } => traction(t),
            KinematicProgram::Cyclic { amplitude, omega, length } => amplitude * length * (omega * t).sin(),
            KinematicProgram::BalloonStretch { lambda, .. } | KinematicProgram::SphereStretchBend { lambda, .. } => {
                lambda(t)
            }
        }
    }

    /// Principal stretches at time `t` (not defined for creep, whose stretch
    /// is an unknown).
    pub fn stretches(&self, t: f64) -> Option<[f64; 2]> {
        let v = self.drive_value(t);
        match self {
            KinematicProgram::PureShear { length, .. } | KinematicProgram::Cyclic { length, .. } => {
                let ly = 1.0 + v / length;
                Some([1.0 / ly, ly])
            }
            KinematicProgram::PureDilatation { length, .. } => {
                let l = 1.0 + v / length;
                Some([l, l])
            }
            KinematicProgram::BalloonStretch { .. } | KinematicProgram::SphereStretchBend { .. } => Some([v, v]),
            KinematicProgram::CreepTraction { .. } => None,
        }
    }

    /// Current metrics for given principal stretches.
    pub fn current(&self, stretch: [f64; 2]) -> Result<Metrics> {
        if !(stretch[0] > 0.0 && stretch[1] > 0.0) {
            return Err(Error::DegenerateMetric(stretch[0] * stretch[1]));
        }
        let reference = self.reference();
        let a = Mat2::new(stretch[0] * stretch[0], 0.0, 0.0, stretch[1] * stretch[1]) * reference.a_co[(0, 0)];
        let b = match self {
            KinematicProgram::SphereStretchBend { .. } => reference.b_co * stretch[0],
            _ => reference.b_co,
        };
        Metrics::new(a, b)
    }

    pub fn radius(&self) -> Option<f64> {
        match self {
            KinematicProgram::BalloonStretch { radius, .. } | KinematicProgram::SphereStretchBend { radius, .. } => {
                Some(*radius)
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointRecord {
    pub t: f64,
    /// Imposed displacement, traction or stretch.
    pub drive: f64,
    pub stretch: [f64; 2],
    /// Total Cauchy stress σ^{αβ}.
    pub sigma: Mat2,
    pub sigma_elastic: Mat2,
    pub sigma_branches: Vec<Mat2>,
    pub moment: Mat2,
    pub j: f64,
    /// Split quantities of the first Maxwell branch (`J_el = J`, `J_in = 1`,
    /// `I1_el = I1` without branches).
    pub j_el: f64,
    pub j_in: f64,
    pub i1: f64,
    pub i1_el: f64,
    pub ahat: Mat2,
    pub bhat: Mat2,
    /// Accumulated dissipation per reference area.
    pub dissipation: f64,
    /// Pressure equilibrating the membrane forces (curved programs).
    pub pressure: Option<f64>,
    /// Largest local evolution iteration count over the branches.
    pub local_iterations: usize,
}

/// `p = 2T/r` with `T = ½ N:a` and `N^{αβ} = σ^{αβ} + b^β_γ M^{γα}`.
pub fn equilibrium_pressure(sigma: &Mat2, moment: &Mat2, cur: &Metrics, r: f64) -> f64 {
    let b_mixed = cur.a_con * cur.b_co;
    let n = sigma + (b_mixed * moment).transpose();
    ddot(&n, &cur.a_co) / r
}

fn record(
    program: &KinematicProgram,
    material: &Material,
    t: f64,
    stretch: [f64; 2],
    cur: &Metrics,
    eval: &PointEval,
    hist: &[MaxwellHistory],
) -> Result<PointRecord> {
    let reference = program.reference();
    let sigma_branches: Vec<Mat2> = material
        .branches
        .iter()
        .zip(hist)
        .map(|(b, h)| maxwell_stress_and_moment(b, &h.ahat(), &h.bhat(), cur).0)
        .collect();
    let first = hist.first().copied().unwrap_or_else(|| MaxwellHistory::initial(&reference));
    let split = split_quantities(cur, &reference, &first.ahat(), &first.bhat())?;
    Ok(PointRecord {
        t,
        drive: program.drive_value(t),
        stretch,
        sigma: eval.sigma,
        sigma_elastic: eval.sigma - eval.sigma_visc,
        sigma_branches,
        moment: eval.moment,
        j: split.j,
        j_el: split.j_el,
        j_in: split.j_in,
        i1: split.i1,
        i1_el: split.i1_el,
        ahat: first.ahat(),
        bhat: first.bhat(),
        dissipation: hist.iter().map(|h| h.dissipation).sum(),
        pressure: program.radius().map(|r| equilibrium_pressure(&eval.sigma, &eval.moment, cur, r * stretch[0])),
        local_iterations: eval.local_iterations,
    })
}

/// Nominal equibiaxial traction (force per reference length) at stretch `λ`.
fn nominal_traction(
    material: &Material,
    program: &KinematicProgram,
    l: f64,
    hist: &[MaxwellHistory],
    dt: f64,
    opts: PointOptions,
) -> Result<(f64, PointEval)> {
    let cur = program.current([l, l])?;
    let eval = evaluate_point(material, &cur, &program.reference(), hist, dt, opts)?;
    Ok((l * eval.sigma[(0, 0)] * cur.a_co[(0, 0)], eval))
}

/// Safeguarded Newton on the scalar equilibrium `t_nom(λ) = t̄`.
fn solve_creep(
    material: &Material,
    program: &KinematicProgram,
    target: f64,
    guess: f64,
    hist: &[MaxwellHistory],
    dt: f64,
    opts: PointOptions,
) -> Result<(f64, PointEval)> {
    let f = |l: f64| nominal_traction(material, program, l, hist, dt, opts).map(|(v, e)| (v - target, e));
    let tol = SCALAR_TOL * target.abs().max(1.0);
    let mut l = guess;
    let (mut r, mut eval) = f(guess)?;
    if r.abs() <= tol {
        return Ok((l, eval));
    }
    // bracket the root by geometric expansion from the guess
    let (mut lo, mut hi) = (guess, guess);
    for expand in 0.. {
        if expand > 60 {
            return Err(Error::ScalarNonConvergence { lo, hi });
        }
        if r < 0.0 {
            lo = hi;
            hi *= 1.25;
            if f(hi)?.0 >= 0.0 {
                break;
            }
        } else {
            hi = lo;
            lo /= 1.25;
            if f(lo)?.0 <= 0.0 {
                break;
            }
        }
    }
    l = 0.5 * (lo + hi);
    (r, eval) = f(l)?;
    for _ in 0..SCALAR_MAX_ITER {
        if r.abs() <= tol || hi - lo <= 1e-15 * hi {
            return Ok((l, eval));
        }
        let h = 1e-7 * l;
        let slope = (f(l + h)?.0 - f(l - h)?.0) / (2.0 * h);
        let mut next = l - r / slope;
        if !(slope > 0.0) || !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        l = next;
        (r, eval) = f(l)?;
        if r < 0.0 {
            lo = l;
        } else {
            hi = l;
        }
    }
    if r.abs() <= tol {
        return Ok((l, eval));
    }
    Err(Error::ScalarNonConvergence { lo, hi })
}

/// Integrates the program over `[0, t_end]` with `n_steps` equal steps.
pub fn drive_steps(program: &KinematicProgram, material: &Material, t_end: f64, n_steps: usize) -> Result<Vec<PointRecord>> {
    drive_steps_with(program, material, t_end, n_steps, PointOptions::default())
}

pub fn drive_steps_with(
    program: &KinematicProgram,
    material: &Material,
    t_end: f64,
    n_steps: usize,
    opts: PointOptions,
) -> Result<Vec<PointRecord>> {
    program.validate()?;
    material.validate()?;
    if !(t_end > 0.0) || n_steps == 0 {
        return Err(Error::InvalidParameter("need t_end > 0 and at least one step".into()));
    }
    let dt = t_end / n_steps as f64;
    let reference = program.reference();
    let mut hist = material.initial_history(&reference);
    let mut lambda = 1.0;
    let mut out = Vec::with_capacity(n_steps + 1);
    let initial = evaluate_point(material, &reference, &reference, &hist, dt, opts)?;
    out.push(record(program, material, 0.0, [1.0, 1.0], &reference, &initial, &hist)?);
    for k in 1..=n_steps {
        let t = if k == n_steps { t_end } else { k as f64 * dt };
        let (stretch, eval) = match program.stretches(t) {
            Some(s) => {
                let cur = program.current(s)?;
                (s, evaluate_point(material, &cur, &reference, &hist, dt, opts))
            }
            None => {
                let target = program.drive_value(t);
                let (l, e) = solve_creep(material, program, target, lambda, &hist, dt, opts).map_err(|e| e.at_step(k))?;
                lambda = l;
                ([l, l], Ok(e))
            }
        };
        let eval = eval.map_err(|e| e.at_step(k))?;
        hist = eval.histories.clone();
        let cur = program.current(stretch)?;
        out.push(record(program, material, t, stretch, &cur, &eval, &hist)?);
    }
    Ok(out)
}

/// Integrates the program over `[0, t_end]` with step `Δt` (the last step is
/// shortened to land on `t_end` only when `t_end/Δt` is not an integer).
pub fn drive(program: &KinematicProgram, material: &Material, dt: f64, t_end: f64) -> Result<Vec<PointRecord>> {
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter("time step must be positive".into()));
    }
    let n = ((t_end / dt) - 1e-9).ceil().max(1.0) as usize;
    drive_steps(program, material, t_end, n)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSettings {
    pub amplitude: f64,
    pub length: f64,
    pub cycles: usize,
    pub steps_per_cycle: usize,
}

impl Default for SweepSettings {
    fn default() -> Self {
        SweepSettings { amplitude: 0.25, length: 1.0, cycles: 10, steps_per_cycle: 1000 }
    }
}

/// Dissipation per reference area after `cycles` pure-shear cycles at each
/// excitation frequency. Branches with a zero-viscosity dashpot relax
/// instantaneously and contribute nothing.
pub fn frequency_sweep(material: &Material, omegas: &[f64], settings: SweepSettings) -> Result<Vec<(f64, f64)>> {
    let active = material.without_inviscid_branches();
    omegas
        .par_iter()
        .map(|&omega| {
            let program = KinematicProgram::Cyclic { amplitude: settings.amplitude, omega, length: settings.length };
            let t_end = settings.cycles as f64 * 2.0 * PI / omega;
            let series = drive_steps(&program, &active, t_end, settings.cycles * settings.steps_per_cycle)?;
            Ok((omega, series.last().map_or(0.0, |r| r.dissipation)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elastic::ElasticModel;
    use crate::maxwell::{MaxwellBranch, SpringKind};
    use crate::solver::constant;

    fn shear_material() -> Material {
        Material::elastic(vec![ElasticModel::neo_hookean(0.0, 3.0)])
            .with_branch(MaxwellBranch::membrane(SpringKind::NeoHookeanMembrane, 0.0, 3.0, 1.0))
    }

    #[test]
    fn held_shear_relaxes_toward_elastic_stress() {
        let p = KinematicProgram::PureShear { u: constant(0.2), length: 1.0 };
        let rec = drive(&p, &shear_material(), 0.1, 5.0).unwrap();
        for w in rec[1..].windows(2) {
            assert!(w[1].sigma[(1, 1)] < w[0].sigma[(1, 1)]);
            assert!(w[1].sigma[(1, 1)] > w[1].sigma_elastic[(1, 1)]);
        }
    }

    #[test]
    fn creep_matches_imposed_traction() {
        let m = Material::elastic(vec![ElasticModel::neo_hookean(3.0, 3.0)])
            .with_branch(MaxwellBranch::membrane(SpringKind::NeoHookeanMembrane, 3.0, 3.0, 0.3));
        let p = KinematicProgram::CreepTraction { traction: constant(1.0) };
        let rec = drive(&p, &m, 0.1, 1.0).unwrap();
        for r in &rec[1..] {
            let l = r.stretch[0];
            assert!((l * l * l * r.sigma[(0, 0)] - 1.0).abs() < 1e-10);
        }
        assert!(rec[2].stretch[0] > rec[1].stretch[0]);
    }

    #[test]
    fn elastic_sweep_dissipates_nothing() {
        let m = Material::elastic(vec![ElasticModel::neo_hookean(0.0, 1.0)]).with_branch(MaxwellBranch {
            eta_s: 0.0,
            ..MaxwellBranch::membrane(SpringKind::NeoHookeanMembrane, 1.0, 1.0, 1.0)
        });
        let s = SweepSettings { cycles: 1, steps_per_cycle: 50, ..SweepSettings::default() };
        for (_, d) in frequency_sweep(&m, &[0.5, 2.0], s).unwrap() {
            assert_eq!(d, 0.0);
        }
    }
}
