//! Global assembly, Dirichlet elimination and implicit time stepping with a
//! Newton–Raphson iteration per step.

use crate::element::{build_workspaces, edge_load, evaluate_element, point_state, EdgeLoad, ElementWorkspace, SurfaceLoad};
use crate::error::{Error, Result};
use crate::kinematics::Metrics;
use crate::material::{Material, PointOptions};
use crate::maxwell::{LocalMethod, MaxwellHistory, TangentMode};
use crate::mesh::{PatchMesh, Side};
use crate::spline::nurbs_eval;
use crate::tensor::{Mat2, Vec3};
use rayon::prelude::*;
use std::sync::Arc;

pub type TimeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

pub fn constant(v: f64) -> TimeFn {
    Arc::new(move |_| v)
}

/// Piecewise-linear interpolation through `(t, value)` knots, held constant
/// outside the given range.
pub fn piecewise_linear(points: Vec<(f64, f64)>) -> TimeFn {
    Arc::new(move |t| {
        if points.is_empty() {
            return 0.0;
        }
        if t <= points[0].0 {
            return points[0].1;
        }
        for w in points.windows(2) {
            let ((t0, v0), (t1, v1)) = (w[0], w[1]);
            if t <= t1 {
                return if t1 > t0 { v0 + (v1 - v0) * (t - t0) / (t1 - t0) } else { v1 };
            }
        }
        points[points.len() - 1].1
    })
}

/// Prescribed displacement `u_i(t)` of a set of control points.
#[derive(Clone)]
pub struct Dirichlet {
    pub controls: Vec<usize>,
    pub component: usize,
    pub value: TimeFn,
}

impl Dirichlet {
    pub fn fixed(controls: Vec<usize>, component: usize) -> Self {
        Dirichlet { controls, component, value: constant(0.0) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EdgeLoadKind {
    /// Dead traction per reference length; scaled by the time function.
    Traction(Vec3),
    /// Bending moment per reference length; the time function is the moment.
    Moment,
}

#[derive(Clone)]
pub struct EdgeLoadSpec {
    pub side: Side,
    pub kind: EdgeLoadKind,
    pub value: TimeFn,
}

#[derive(Clone, Default)]
pub struct Loads {
    pub pressure: Option<TimeFn>,
    /// Dead body force direction per reference area and its magnitude in time.
    pub body_force: Option<(Vec3, TimeFn)>,
    pub tangential: Option<([f64; 2], TimeFn)>,
    pub edges: Vec<EdgeLoadSpec>,
}

impl Loads {
    fn surface(&self, t: f64) -> SurfaceLoad {
        SurfaceLoad {
            pressure: self.pressure.as_ref().map_or(0.0, |p| p(t)),
            body_force: self.body_force.as_ref().map_or(Vec3::zeros(), |(d, f)| d * f(t)),
            tangential: self.tangential.as_ref().map_or([0.0; 2], |(d, f)| [d[0] * f(t), d[1] * f(t)]),
        }
    }
}

#[derive(Clone)]
pub struct Problem {
    pub mesh: PatchMesh,
    pub material: Material,
    pub dirichlet: Vec<Dirichlet>,
    pub loads: Loads,
}

/// Iteration budget of the continuation retry.
const CONTINUATION_MAX_ITER: usize = 400;
/// Largest residual growth factor accepted for one continuation increment.
const CONTINUATION_GROWTH: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Relative residual tolerance, scaled by max(1, ‖f_ext‖).
    pub tol: f64,
    /// Fallback increment tolerance.
    pub tol_dx: f64,
    pub max_iterations: usize,
    /// Consecutive residual increases that count as divergence.
    pub divergence_window: usize,
    pub tangent: TangentMode,
    pub local: LocalMethod,
    /// Start each step from the free positions extrapolated along the last
    /// increment (kept only when it lowers the initial residual).
    pub predictor: bool,
    /// When plain Newton fails, retry the step with pseudo-transient
    /// continuation: a diagonal shift proportional to the residual norm is
    /// added to the tangent and vanishes as the residual does, so the
    /// converged state still satisfies the unmodified equations. This carries
    /// the iteration across snap-through limit points.
    pub continuation: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-9,
            tol_dx: 1e-10,
            max_iterations: 40,
            divergence_window: 5,
            tangent: TangentMode::Consistent,
            local: LocalMethod::Auto,
            predictor: true,
            continuation: true,
        }
    }
}

/// Maps (control point, coordinate) to an equation number or a prescribed value.
#[derive(Clone)]
pub struct DofMap {
    eq: Vec<Option<usize>>,
    prescribed: Vec<(usize, TimeFn)>,
    n_free: usize,
}

impl DofMap {
    pub fn new(n_controls: usize, bcs: &[Dirichlet]) -> Result<Self> {
        let mut fixed: Vec<Option<TimeFn>> = vec![None; 3 * n_controls];
        for bc in bcs {
            if bc.component > 2 {
                return Err(Error::InvalidParameter(format!("Dirichlet component {} out of range", bc.component)));
            }
            for &c in &bc.controls {
                if c >= n_controls {
                    return Err(Error::InvalidParameter(format!("Dirichlet control point {c} out of range")));
                }
                fixed[3 * c + bc.component] = Some(bc.value.clone());
            }
        }
        let mut eq = vec![None; 3 * n_controls];
        let mut prescribed = Vec::new();
        let mut n_free = 0;
        for (d, f) in fixed.into_iter().enumerate() {
            match f {
                Some(g) => prescribed.push((d, g)),
                None => {
                    eq[d] = Some(n_free);
                    n_free += 1;
                }
            }
        }
        Ok(DofMap { eq, prescribed, n_free })
    }

    pub fn n_free(&self) -> usize {
        self.n_free
    }

    pub fn equation(&self, dof: usize) -> Option<usize> {
        self.eq[dof]
    }

    pub fn is_free(&self, dof: usize) -> bool {
        self.eq[dof].is_some()
    }
}

/// Converged quantities at one quadrature point.
#[derive(Debug, Clone, PartialEq)]
pub struct QpRecord {
    pub xi: f64,
    pub eta: f64,
    pub x: Vec3,
    pub normal: Vec3,
    pub current: Metrics,
    pub reference: Metrics,
    pub sigma: Mat2,
    pub moment: Mat2,
    pub sigma_visc: Mat2,
    pub moment_visc: Mat2,
    pub j: f64,
    pub histories: Vec<MaxwellHistory>,
    /// Reference area weight of the point.
    pub area: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub step: usize,
    pub t: f64,
    pub iterations: usize,
    pub residuals: Vec<f64>,
    pub dissipation: f64,
    /// Largest local evolution iteration count at any quadrature point.
    pub local_iterations: usize,
}

pub struct Assembly {
    pub residual: Vec<f64>,
    pub f_ext_norm: f64,
    pub tangent: Vec<(usize, usize, f64)>,
    pub histories: Vec<Vec<Vec<MaxwellHistory>>>,
    pub dissipation: f64,
    pub local_iterations: usize,
}

pub struct Simulation {
    pub problem: Problem,
    pub options: SolverOptions,
    pub workspaces: Vec<ElementWorkspace>,
    pub dofs: DofMap,
    /// Current control-point positions.
    pub x: Vec<Vec3>,
    /// Committed histories `[element][quadrature point][branch]`.
    pub histories: Vec<Vec<Vec<MaxwellHistory>>>,
    pub t: f64,
    pub step: usize,
    /// Total dissipated energy.
    pub dissipation: f64,
    pub records: Vec<Vec<QpRecord>>,
    edge_elements: Vec<Vec<usize>>,
    /// Last converged increment and its step size.
    last_increment: Option<(Vec<Vec3>, f64)>,
    linear: crate::sparse::SparseSolver,
}

impl Simulation {
    pub fn new(problem: Problem, options: SolverOptions) -> Result<Self> {
        problem.material.validate()?;
        let workspaces = build_workspaces(&problem.mesh)?;
        let dofs = DofMap::new(problem.mesh.control.len(), &problem.dirichlet)?;
        let histories = workspaces
            .iter()
            .map(|ws| ws.qps.iter().map(|q| problem.material.initial_history(&q.reference)).collect())
            .collect();
        let edge_elements = problem.loads.edges.iter().map(|l| problem.mesh.side_elements(l.side)).collect();
        let x = problem.mesh.control.clone();
        let mut sim = Simulation {
            problem,
            options,
            workspaces,
            dofs,
            x,
            histories,
            t: 0.0,
            step: 0,
            dissipation: 0.0,
            records: Vec::new(),
            edge_elements,
            last_increment: None,
            linear: Default::default(),
        };
        sim.records = sim.point_records(1.0)?;
        Ok(sim)
    }

    fn point_options(&self) -> PointOptions {
        PointOptions { tangent: self.options.tangent, local: self.options.local }
    }

    /// Residual `f_int − f_ext` on the free equations, and optionally the
    /// tangent, at time `t` with step `dt` from the committed histories.
    pub fn assemble(&self, t: f64, dt: f64, with_tangent: bool) -> Result<Assembly> {
        let surface = self.problem.loads.surface(t);
        let opts = self.point_options();
        let mat = &self.problem.material;
        let results: Vec<_> = self
            .workspaces
            .par_iter()
            .zip(self.histories.par_iter())
            .map(|(ws, h)| {
                let xe: Vec<Vec3> = ws.conn.iter().map(|&c| self.x[c]).collect();
                evaluate_element(ws, &xe, mat, h, dt, &surface, opts, with_tangent)
            })
            .collect::<Result<_>>()?;
        let n = self.dofs.n_free;
        let mut residual = vec![0.0; n];
        let mut f_ext = vec![0.0; n];
        let mut tangent = Vec::new();
        let mut histories = Vec::with_capacity(results.len());
        let mut dissipation = 0.0;
        let mut local_iterations = 0;
        let scatter = |conn: &[usize],
                       fi: Option<&nalgebra::DVector<f64>>,
                       fe: &nalgebra::DVector<f64>,
                       k: Option<&nalgebra::DMatrix<f64>>,
                       residual: &mut Vec<f64>,
                       f_ext: &mut Vec<f64>,
                       tangent: &mut Vec<(usize, usize, f64)>| {
            for (a, &ca) in conn.iter().enumerate() {
                for i in 0..3 {
                    let Some(r) = self.dofs.eq[3 * ca + i] else { continue };
                    let fint = fi.map_or(0.0, |v| v[3 * a + i]);
                    residual[r] += fint - fe[3 * a + i];
                    f_ext[r] += fe[3 * a + i];
                    if let Some(k) = k {
                        for (b, &cb) in conn.iter().enumerate() {
                            for j in 0..3 {
                                if let Some(c) = self.dofs.eq[3 * cb + j] {
                                    // structural entries are kept even when zero so
                                    // that the sparsity pattern stays fixed
                                    tangent.push((r, c, k[(3 * a + i, 3 * b + j)]));
                                }
                            }
                        }
                    }
                }
            }
        };
        for (ws, res) in self.workspaces.iter().zip(results) {
            scatter(&ws.conn, Some(&res.f_int), &res.f_ext, res.stiffness.as_ref(), &mut residual, &mut f_ext, &mut tangent);
            dissipation += res.dissipation;
            local_iterations = local_iterations.max(res.local_iterations);
            histories.push(res.histories);
        }
        for (spec, elems) in self.problem.loads.edges.iter().zip(&self.edge_elements) {
            let v = (spec.value)(t);
            let load = match spec.kind {
                EdgeLoadKind::Traction(d) => EdgeLoad::Traction(d * v),
                EdgeLoadKind::Moment => EdgeLoad::Moment(v),
            };
            for &e in elems {
                let conn = &self.problem.mesh.elements[e].conn;
                let xe: Vec<Vec3> = conn.iter().map(|&c| self.x[c]).collect();
                let (fe, k) = edge_load(&self.problem.mesh, e, spec.side, &xe, load, with_tangent)?;
                scatter(conn, None, &fe, k.as_ref(), &mut residual, &mut f_ext, &mut tangent);
            }
        }
        let f_ext_norm = f_ext.iter().map(|v| v * v).sum::<f64>().sqrt();
        Ok(Assembly { residual, f_ext_norm, tangent, histories, dissipation, local_iterations })
    }

    fn apply_prescribed(&mut self, t: f64) {
        for (d, g) in &self.dofs.prescribed {
            let (c, i) = (d / 3, d % 3);
            self.x[c][i] = self.problem.mesh.control[c][i] + g(t);
        }
    }

    fn residual_norm(&self, t: f64, dt: f64) -> Option<f64> {
        let r = self.assemble(t, dt, false).ok()?;
        let n = r.residual.iter().map(|v| v * v).sum::<f64>().sqrt();
        n.is_finite().then_some(n)
    }

    fn predict(&mut self, t: f64, dt: f64, x_old: &[Vec3]) {
        let Some((inc, dt_prev)) = &self.last_increment else { return };
        let scale = dt / dt_prev;
        let base = self.x.clone();
        let mut trial = base.clone();
        for (d, eq) in self.dofs.eq.iter().enumerate() {
            if eq.is_some() {
                trial[d / 3][d % 3] = x_old[d / 3][d % 3] + scale * inc[d / 3][d % 3];
            }
        }
        let r0 = self.residual_norm(t, dt);
        self.x = trial;
        let r1 = self.residual_norm(t, dt);
        let better = match (r0, r1) {
            (Some(a), Some(b)) => b < a,
            (None, Some(_)) => true,
            _ => false,
        };
        if !better {
            self.x = base;
        }
    }

    fn update_free(&mut self, dx: &[f64]) {
        for (d, eq) in self.dofs.eq.iter().enumerate() {
            if let Some(r) = eq {
                self.x[d / 3][d % 3] += dx[*r];
            }
        }
    }

    /// Advances one implicit step of size `dt`; histories are committed only
    /// after convergence.
    pub fn step(&mut self, dt: f64) -> Result<StepReport> {
        let step = self.step + 1;
        self.advance(self.t + dt, dt).map_err(|e| e.at_step(step))
    }

    /// Advances to time `t` with step `dt`; `run` passes `t = t₀ + k Δt` so the
    /// step times do not accumulate round-off.
    fn advance(&mut self, t: f64, dt: f64) -> Result<StepReport> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("time step must be positive, got {dt}")));
        }
        let step = self.step + 1;
        let x_old = self.x.clone();
        self.apply_prescribed(t);
        if self.options.predictor {
            self.predict(t, dt, &x_old);
        }
        let start = self.x.clone();
        let mut residuals = Vec::new();
        let mut result = self.iterate(t, dt, step, &mut residuals);
        if result.is_err() && self.options.continuation {
            self.x = start;
            result = self.continuation(t, dt, step, &mut residuals);
        }
        match result {
            Ok(asm) => {
                self.last_increment = Some((self.x.iter().zip(&x_old).map(|(a, b)| a - b).collect(), dt));
                let local_iterations = asm.local_iterations;
                self.histories = asm.histories;
                self.dissipation += asm.dissipation;
                self.t = t;
                self.step = step;
                self.records = self.point_records(dt)?;
                Ok(StepReport { step, t, iterations: residuals.len() - 1, residuals, dissipation: self.dissipation, local_iterations })
            }
            Err(e) => {
                self.x = x_old;
                Err(e)
            }
        }
    }

    /// Newton iteration from the current positions, appending residual norms.
    fn iterate(&mut self, t: f64, dt: f64, step: usize, residuals: &mut Vec<f64>) -> Result<Assembly> {
        let first = residuals.len();
        let mut growth = 0;
        loop {
            // residual first: the tangent is only needed when another
            // iteration follows
            let asm = self.assemble(t, dt, false)?;
            let rn = norm(&asm.residual);
            if residuals.len() > first {
                growth = if rn > residuals[residuals.len() - 1] { growth + 1 } else { 0 };
            }
            residuals.push(rn);
            if !rn.is_finite() || growth >= self.options.divergence_window {
                return Err(Error::Divergence { step, residual: rn });
            }
            if rn <= self.options.tol * asm.f_ext_norm.max(1.0) {
                return Ok(asm);
            }
            if residuals.len() - first > self.options.max_iterations {
                return Err(Error::NewtonNonConvergence { step, iterations: residuals.len() - 1, residual: rn });
            }
            let asm = self.assemble(t, dt, true)?;
            let dx = self.solve_shifted(asm, 0.0)?;
            self.update_free(&dx);
            if norm(&dx) <= self.options.tol_dx {
                let a = self.assemble(t, dt, false)?;
                residuals.push(norm(&a.residual));
                return Ok(a);
            }
        }
    }

    /// Pseudo-transient continuation: Newton on `(K + σ I) Δx = −r`, with the
    /// shift starting at the mean absolute tangent diagonal, halved after every
    /// accepted increment and quadrupled (increment undone) when the residual
    /// blows up or cannot be evaluated. Ends as plain Newton once σ is
    /// negligible, so the converged state solves the unshifted equations.
    fn continuation(&mut self, t: f64, dt: f64, step: usize, residuals: &mut Vec<f64>) -> Result<Assembly> {
        let first = residuals.len();
        let mut current = self.assemble(t, dt, false)?;
        let mut rn = norm(&current.residual);
        residuals.push(rn);
        let mut sigma: Option<f64> = None;
        loop {
            if !rn.is_finite() {
                return Err(Error::Divergence { step, residual: rn });
            }
            if rn <= self.options.tol * current.f_ext_norm.max(1.0) {
                return Ok(current);
            }
            if residuals.len() - first > CONTINUATION_MAX_ITER {
                return Err(Error::NewtonNonConvergence { step, iterations: residuals.len() - 1, residual: rn });
            }
            let asm = self.assemble(t, dt, true)?;
            let s = *sigma.get_or_insert_with(|| mean_abs_diagonal(&asm.tangent, self.dofs.n_free));
            let base = self.x.clone();
            let trial = self.solve_shifted(asm, s).map(|dx| {
                self.update_free(&dx);
                self.assemble(t, dt, false)
            });
            match trial {
                Ok(Ok(a)) if norm(&a.residual) <= CONTINUATION_GROWTH * rn => {
                    rn = norm(&a.residual);
                    residuals.push(rn);
                    current = a;
                    sigma = Some(0.5 * s);
                }
                _ => {
                    self.x = base;
                    sigma = Some(4.0 * s);
                    residuals.push(rn);
                }
            }
        }
    }

    /// Solves `(K + σ I) Δx = −r`, adding σ to the first stored entry of every
    /// diagonal position so the sparsity pattern is unchanged.
    fn solve_shifted(&mut self, mut asm: Assembly, sigma: f64) -> Result<Vec<f64>> {
        if sigma != 0.0 {
            let mut seen = vec![false; self.dofs.n_free];
            for e in asm.tangent.iter_mut() {
                if e.0 == e.1 && !std::mem::replace(&mut seen[e.0], true) {
                    e.2 += sigma;
                }
            }
        }
        let rhs: Vec<f64> = asm.residual.iter().map(|v| -v).collect();
        self.linear.solve(self.dofs.n_free, &asm.tangent, &rhs).map_err(Error::SingularTangent)
    }

    /// Runs `n_steps` constant steps up to `t_end`, calling `observe` after
    /// every converged step.
    pub fn run(
        &mut self,
        t_end: f64,
        n_steps: usize,
        mut observe: impl FnMut(&Simulation, &StepReport) -> Result<()>,
    ) -> Result<Vec<StepReport>> {
        if n_steps == 0 || !(t_end > self.t) {
            return Err(Error::InvalidParameter("need at least one step and t_end > t".into()));
        }
        let t0 = self.t;
        let dt = (t_end - t0) / n_steps as f64;
        let mut reports = Vec::with_capacity(n_steps);
        for k in 1..=n_steps {
            let step = self.step + 1;
            let t = if k == n_steps { t_end } else { t0 + k as f64 * dt };
            let r = self.advance(t, dt).map_err(|e| e.at_step(step))?;
            observe(self, &r)?;
            reports.push(r);
        }
        Ok(reports)
    }

    /// Quadrature-point quantities at the committed state. Histories are those
    /// already committed, so no evolution happens here.
    fn point_records(&self, dt: f64) -> Result<Vec<Vec<QpRecord>>> {
        let mat = &self.problem.material;
        let elastic_only = Material { branches: Vec::new(), ..mat.clone() };
        let opts = self.point_options();
        self.workspaces
            .par_iter()
            .zip(self.histories.par_iter())
            .map(|(ws, h)| {
                let xe: Vec<Vec3> = ws.conn.iter().map(|&c| self.x[c]).collect();
                (0..ws.qps.len())
                    .map(|q| {
                        let qp = &ws.qps[q];
                        let ps = point_state(ws, q, &xe, &elastic_only, &[], dt, opts)?;
                        let mut sigma_visc = Mat2::zeros();
                        let mut moment_visc = Mat2::zeros();
                        for (b, hb) in mat.branches.iter().zip(&h[q]) {
                            let (s, m) =
                                crate::maxwell::maxwell_stress_and_moment(b, &hb.ahat(), &hb.bhat(), &ps.state.metrics);
                            sigma_visc += s;
                            moment_visc += m;
                        }
                        Ok(QpRecord {
                            xi: qp.xi,
                            eta: qp.eta,
                            x: ps.state.point.x,
                            normal: ps.state.point.n,
                            current: ps.state.metrics,
                            reference: qp.reference,
                            sigma: ps.eval.sigma + sigma_visc,
                            moment: ps.eval.moment + moment_visc,
                            sigma_visc,
                            moment_visc,
                            j: ps.eval.j,
                            histories: h[q].clone(),
                            area: qp.ref_area * qp.weight,
                        })
                    })
                    .collect()
            })
            .collect()
    }

    /// Total elastic-branch free energy at the current state.
    pub fn elastic_energy(&self) -> Result<f64> {
        let mut e = 0.0;
        for recs in &self.records {
            for r in recs {
                e += self.problem.material.elastic_energy(&r.current, &r.reference)? * r.area;
            }
        }
        Ok(e)
    }

    /// Area-weighted mean of a quadrature-point quantity.
    pub fn mean(&self, f: impl Fn(&QpRecord) -> f64) -> f64 {
        let (mut s, mut a) = (0.0, 0.0);
        for r in self.records.iter().flatten() {
            s += f(r) * r.area;
            a += r.area;
        }
        s / a
    }

    /// Largest value of a quadrature-point quantity.
    pub fn max(&self, f: impl Fn(&QpRecord) -> f64) -> f64 {
        self.records.iter().flatten().map(f).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Displacement of the surface point at parametric coordinates `(ξ, η)`.
    pub fn surface_displacement(&self, xi: f64, eta: f64) -> Result<Vec3> {
        let mesh = &self.problem.mesh;
        let e = mesh
            .locate(xi, eta)
            .ok_or_else(|| Error::InvalidParameter(format!("point ({xi}, {eta}) outside the patch")))?;
        let basis = nurbs_eval(&mesh.element_spline(e), xi, eta)?;
        Ok(mesh.elements[e].conn.iter().zip(&basis.values).map(|(&c, n)| *n * self.displacement(c)).sum())
    }

    /// Displacement of a control point.
    pub fn displacement(&self, c: usize) -> Vec3 {
        self.x[c] - self.problem.mesh.control[c]
    }
}

fn mean_abs_diagonal(entries: &[(usize, usize, f64)], n: usize) -> f64 {
    let mut d = vec![0.0; n];
    for &(r, c, v) in entries {
        if r == c {
            d[r] += v;
        }
    }
    d.iter().map(|v| v.abs()).sum::<f64>() / n.max(1) as f64
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
