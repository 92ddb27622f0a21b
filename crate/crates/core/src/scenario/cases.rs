//! Finite element problem builders for the benchmark cases.

use crate::elastic::ElasticModel;
use crate::error::{Error, Result};
use crate::material::Material;
use crate::maxwell::MaxwellBranch;
use crate::mesh::{PatchMesh, Side};
use crate::oracles::{pure_bend_solution, PureBendParams};
use crate::point::KinematicProgram;
use crate::solver::{constant, Dirichlet, EdgeLoadKind, EdgeLoadSpec, Loads, Problem, Simulation, TimeFn};
use crate::tensor::Vec3;
use std::sync::Arc;

/// Flat strip `[0, width] × [0, S]` bent about the x axis into a circular arc
/// by end moments, a follower pressure and a prescribed end displacement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureBendCase {
    pub params: PureBendParams,
    /// Elastic membrane (split Neo-Hookean) parameters.
    pub mu: f64,
    pub bulk: f64,
    pub width: f64,
    pub degrees: [usize; 2],
    /// Elements along the bending direction.
    pub n_el: usize,
}

impl PureBendCase {
    pub fn standard(n_el: usize) -> Self {
        PureBendCase {
            params: PureBendParams {
                c: 1.0,
                c1: 1.0,
                eta_b: 0.5,
                t_end: 1.0,
                kappa_end: 0.5,
                length: std::f64::consts::PI,
            },
            mu: 10.0,
            bulk: 5.0,
            width: 1.0,
            degrees: [2, 2],
            n_el,
        }
    }

    pub fn material(&self) -> Material {
        Material::elastic(vec![
            ElasticModel::neo_hookean_split(self.bulk, self.mu),
            ElasticModel::koiter_bending(self.params.c),
        ])
        .with_branch(MaxwellBranch::bending(self.params.c1, self.params.eta_b))
    }

    fn oracle(&self, f: impl Fn(&crate::oracles::PureBendState) -> f64 + Send + Sync + 'static) -> TimeFn {
        let p = self.params;
        Arc::new(move |t| pure_bend_solution(&p, t).map(|s| f(&s)).unwrap_or(f64::NAN))
    }

    /// One element across the width, `n_el` along the strip.
    pub fn problem(&self) -> Result<Problem> {
        self.problem_with_mesh([1, self.n_el])
    }

    /// Elements `[across, along]` the strip.
    pub fn problem_with_mesh(&self, n_el: [usize; 2]) -> Result<Problem> {
        self.params.validate()?;
        if n_el[0] == 0 || n_el[1] == 0 {
            return Err(Error::InvalidParameter("need at least one element".into()));
        }
        let mesh = PatchMesh::flat_rectangle(self.width, self.params.length, self.degrees, n_el)?;
        let start = mesh.side_controls(Side::EtaMin);
        let end = mesh.side_controls(Side::EtaMax);
        let dirichlet = vec![
            Dirichlet::fixed(start.clone(), 1),
            Dirichlet::fixed(start, 2),
            Dirichlet { controls: end.clone(), component: 1, value: self.oracle(|s| s.u_y) },
            Dirichlet::fixed(end, 2),
            Dirichlet::fixed(mesh.side_controls(Side::XiMin), 0),
        ];
        let moment = self.oracle(|s| s.moment);
        let loads = Loads {
            pressure: Some(self.oracle(|s| s.pressure)),
            edges: [Side::EtaMin, Side::EtaMax]
                .into_iter()
                .map(|side| EdgeLoadSpec { side, kind: EdgeLoadKind::Moment, value: moment.clone() })
                .collect(),
            ..Loads::default()
        };
        Ok(Problem { mesh, material: self.material(), dirichlet, loads })
    }
}

/// Area-weighted mean curvature `a^{22} b_{22}` and intermediate curvature
/// `a^{22} b̂_{22}` of the first branch, oriented so that the bent strip has
/// positive curvature.
pub fn bending_curvatures(sim: &Simulation) -> (f64, f64) {
    let kappa = sim.mean(|r| r.current.a_con[(1, 1)] * r.current.b_co[(1, 1)]);
    let kappa_in = sim.mean(|r| r.current.a_con[(1, 1)] * r.histories.first().map_or(0.0, |h| h.bhat()[(1, 1)]));
    let s = if kappa < 0.0 { -1.0 } else { 1.0 };
    (s * kappa, s * kappa_in)
}

/// Relative L2 error of the curvature magnitude `|a^{22} b_{22}|` against a
/// uniform reference value.
pub fn curvature_l2_error(sim: &Simulation, kappa: f64) -> Result<f64> {
    if kappa == 0.0 {
        return Err(Error::UndefinedError);
    }
    Ok(sim.mean(|r| ((r.current.a_con[(1, 1)] * r.current.b_co[(1, 1)]).abs() - kappa).powi(2)).sqrt() / kappa.abs())
}

/// Largest deviation of the principal surface stretches from one.
pub fn max_stretch_deviation(sim: &Simulation) -> f64 {
    sim.max(|r| {
        let l1 = (r.current.a_co[(0, 0)] / r.reference.a_co[(0, 0)]).sqrt();
        let l2 = (r.current.a_co[(1, 1)] / r.reference.a_co[(1, 1)]).sqrt();
        (l1 - 1.0).abs().max((l2 - 1.0).abs())
    })
}

/// Unit-square membrane model of a homogeneous in-plane program: symmetry
/// conditions on the left and bottom edges, out-of-plane motion suppressed,
/// and either the right/top edge displacements (kinematic programs) or an
/// equibiaxial dead traction per reference length (creep) imposed. Interior
/// control points are free; the exact solution is homogeneous.
pub fn membrane_problem(material: Material, program: &KinematicProgram, degrees: [usize; 2], n_el: [usize; 2]) -> Result<Problem> {
    program.validate()?;
    material.validate()?;
    if matches!(program, KinematicProgram::SphereStretchBend { .. }) {
        return Err(Error::InvalidParameter("the curved stretch-bend program has no flat membrane equivalent".into()));
    }
    if matches!(program, KinematicProgram::BalloonStretch { .. }) && material.has_bending() {
        return Err(Error::InvalidParameter("the flat balloon equivalent requires a membrane-only material".into()));
    }
    let mesh = PatchMesh::flat_rectangle(1.0, 1.0, degrees, n_el)?;
    let mut dirichlet = vec![
        Dirichlet::fixed(mesh.side_controls(Side::XiMin), 0),
        Dirichlet::fixed(mesh.side_controls(Side::EtaMin), 1),
        Dirichlet::fixed((0..mesh.control.len()).collect(), 2),
    ];
    let mut loads = Loads::default();
    if let KinematicProgram::CreepTraction { traction } = program {
        loads.edges = vec![
            EdgeLoadSpec { side: Side::XiMax, kind: EdgeLoadKind::Traction(Vec3::x()), value: traction.clone() },
            EdgeLoadSpec { side: Side::EtaMax, kind: EdgeLoadKind::Traction(Vec3::y()), value: traction.clone() },
        ];
    } else {
        for (d, side) in [(0, Side::XiMax), (1, Side::EtaMax)] {
            let p = program.clone();
            let value: TimeFn = Arc::new(move |t| p.stretches(t).map_or(f64::NAN, |s| s[d] - 1.0));
            dirichlet.push(Dirichlet { controls: mesh.side_controls(side), component: d, value });
        }
    }
    Ok(Problem { mesh, material, dirichlet, loads })
}

/// Cylindrical roof under a vertical dead load per reference area, supported
/// by rigid diaphragms (`u_y = u_z = 0`) on its curved ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScordelisLoCase {
    pub radius: f64,
    pub length: f64,
    pub half_angle: f64,
    pub n_el: [usize; 2],
    /// Final load per reference area (acting in −z).
    pub load: f64,
    /// Time over which the load is ramped up linearly.
    pub ramp: f64,
}

impl Default for ScordelisLoCase {
    fn default() -> Self {
        ScordelisLoCase { radius: 25.0, length: 50.0, half_angle: 40f64.to_radians(), n_el: [8, 8], load: 1.0 / 25.0, ramp: 10.0 }
    }
}

impl ScordelisLoCase {
    pub fn mesh(&self) -> Result<PatchMesh> {
        PatchMesh::cylinder_roof(self.radius, self.length, self.half_angle, self.n_el)
    }

    pub fn problem(&self, material: Material) -> Result<Problem> {
        if !(self.load.is_finite() && self.ramp >= 0.0) {
            return Err(Error::InvalidParameter("invalid roof load".into()));
        }
        let mesh = self.mesh()?;
        let mut dirichlet = Vec::new();
        for side in [Side::XiMin, Side::XiMax] {
            dirichlet.push(Dirichlet::fixed(mesh.side_controls(side), 1));
            dirichlet.push(Dirichlet::fixed(mesh.side_controls(side), 2));
        }
        // the diaphragms slide freely along the axis; one pinned axial degree of
        // freedom removes the rigid translation without any reaction force
        dirichlet.push(Dirichlet::fixed(vec![0], 0));
        let (ramp, load) = (self.ramp, self.load);
        let magnitude: TimeFn =
            if ramp > 0.0 { Arc::new(move |t| load * (t / ramp).min(1.0)) } else { constant(load) };
        let loads = Loads { body_force: Some((-Vec3::z(), magnitude)), ..Loads::default() };
        Ok(Problem { mesh, material, dirichlet, loads })
    }

    /// Parametric coordinates of the roof centre (crown at midspan).
    pub fn monitor_point(&self) -> (f64, f64) {
        (0.5, 0.5)
    }

    /// Displacement of the monitor point. The axial component is taken
    /// relative to the mean axial control-point displacement, which removes
    /// the rigid translation fixed by the single axial pin.
    pub fn monitor_displacement(&self, sim: &Simulation) -> Result<Vec3> {
        let (xi, eta) = self.monitor_point();
        let mut u = sim.surface_displacement(xi, eta)?;
        let n = sim.x.len();
        u.x -= (0..n).map(|c| sim.displacement(c).x).sum::<f64>() / n as f64;
        Ok(u)
    }
}
