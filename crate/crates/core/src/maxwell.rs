//! Maxwell branches: implicit-Euler integration of the evolution laws for the
//! intermediate metric â^{αβ} and curvature b̂_{αβ}, branch stresses and
//! moments, consistent tangents and dissipation.

use crate::elastic::Response;
use crate::error::{Error, Result};
use crate::kinematics::Metrics;
use crate::tensor::{ddot, det2, inv2, sym_from3, sym_to3, Mat2, Mat3, Mat4, Tensor4};
use serde::{Deserialize, Serialize};

/// Local Newton tolerance on ‖Δâ‖₂.
pub const LOCAL_TOL: f64 = 1e-10;
pub const LOCAL_MAX_ITER: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpringKind {
    KoiterMembrane,
    NeoHookeanMembrane,
    NeoHookeanSplitMembrane,
    IncompressibleNeoHookeanMembrane,
    ConstantSurfaceTension,
}

impl SpringKind {
    pub const ALL: [SpringKind; 5] = [
        SpringKind::NeoHookeanMembrane,
        SpringKind::KoiterMembrane,
        SpringKind::NeoHookeanSplitMembrane,
        SpringKind::IncompressibleNeoHookeanMembrane,
        SpringKind::ConstantSurfaceTension,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MembraneSpring {
    pub kind: SpringKind,
    #[serde(default, rename = "K1")]
    pub bulk: f64,
    #[serde(default)]
    pub mu1: f64,
    #[serde(default)]
    pub gamma1: f64,
}

/// Koiter bending spring.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BendingSpring {
    pub c1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaxwellBranch {
    #[serde(default)]
    pub membrane: Option<MembraneSpring>,
    #[serde(default)]
    pub bending: Option<BendingSpring>,
    #[serde(default)]
    pub eta_s: f64,
    #[serde(default)]
    pub eta_b: f64,
}

impl MaxwellBranch {
    pub fn membrane(kind: SpringKind, bulk: f64, mu1: f64, eta_s: f64) -> Self {
        MaxwellBranch {
            membrane: Some(MembraneSpring { kind, bulk, mu1, gamma1: 0.0 }),
            bending: None,
            eta_s,
            eta_b: 0.0,
        }
    }

    pub fn surface_tension(gamma1: f64, eta_s: f64) -> Self {
        MaxwellBranch {
            membrane: Some(MembraneSpring { kind: SpringKind::ConstantSurfaceTension, bulk: 0.0, mu1: 0.0, gamma1 }),
            bending: None,
            eta_s,
            eta_b: 0.0,
        }
    }

    pub fn bending(c1: f64, eta_b: f64) -> Self {
        MaxwellBranch { membrane: None, bending: Some(BendingSpring { c1 }), eta_s: 0.0, eta_b }
    }

    pub fn with_bending(mut self, c1: f64, eta_b: f64) -> Self {
        self.bending = Some(BendingSpring { c1 });
        self.eta_b = eta_b;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let nonneg = |name: &str, v: f64| {
            if v >= 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} must be finite and nonnegative, got {v}")))
            }
        };
        nonneg("eta_s", self.eta_s)?;
        nonneg("eta_b", self.eta_b)?;
        if let Some(m) = &self.membrane {
            nonneg("K1", m.bulk)?;
            nonneg("mu1", m.mu1)?;
            nonneg("gamma1", m.gamma1)?;
            if self.eta_s == 0.0 {
                return Err(Error::DegenerateViscosity("eta_s = 0 with a membrane spring".into()));
            }
        }
        if let Some(b) = &self.bending {
            nonneg("c1", b.c1)?;
            if self.eta_b == 0.0 {
                return Err(Error::DegenerateViscosity("eta_b = 0 with a bending spring".into()));
            }
        }
        Ok(())
    }

    /// A branch without any spring is inert.
    pub fn is_inert(&self) -> bool {
        self.membrane.is_none() && self.bending.is_none()
    }
}

/// Internal variables of one branch at one material point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxwellHistory {
    /// â^{11}, â^{12}, â^{22}
    pub ahat_con: [f64; 3],
    /// b̂_{11}, b̂_{12}, b̂_{22}
    pub bhat_co: [f64; 3],
    /// Accumulated dissipated energy per reference area.
    pub dissipation: f64,
}

impl MaxwellHistory {
    pub fn initial(reference: &Metrics) -> Self {
        MaxwellHistory { ahat_con: sym_to3(&reference.a_con), bhat_co: sym_to3(&reference.b_co), dissipation: 0.0 }
    }
    pub fn ahat(&self) -> Mat2 {
        sym_from3(self.ahat_con)
    }
    pub fn bhat(&self) -> Mat2 {
        sym_from3(self.bhat_co)
    }
}

/// Whether tangents include the sensitivities ∂â/∂a and ∂b̂/∂b.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TangentMode {
    #[default]
    Consistent,
    /// Deliberately defective: history sensitivities dropped.
    FrozenHistory,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LocalReport {
    pub iterations: usize,
    pub closed_form: bool,
    pub last_step: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LocalMethod {
    #[default]
    Auto,
    Newton,
}

/// Spring stress in intermediate form `σ̂ = J_el σ₁`.
pub fn spring_stress(s: &MembraneSpring, ahat: &Mat2, cur: &Metrics) -> Mat2 {
    let a = &cur.a_con;
    let j_el2 = cur.det * det2(ahat);
    let i1_el = ddot(ahat, &cur.a_co);
    match s.kind {
        SpringKind::KoiterMembrane => {
            0.5 * s.bulk * (i1_el - 2.0) * ahat + s.mu1 * (ahat * cur.a_co * ahat - ahat)
        }
        SpringKind::NeoHookeanMembrane => 0.5 * s.bulk * (j_el2 - 1.0) * a + s.mu1 * (ahat - a),
        SpringKind::NeoHookeanSplitMembrane => {
            let j_el = j_el2.sqrt();
            0.5 * s.bulk * (j_el2 - 1.0) * a + s.mu1 / (2.0 * j_el) * (2.0 * ahat - i1_el * a)
        }
        SpringKind::IncompressibleNeoHookeanMembrane => s.mu1 * (ahat - a / j_el2),
        SpringKind::ConstantSurfaceTension => s.gamma1 * ahat,
    }
}

/// Partial derivatives of `σ̂` w.r.t. â^{γδ} and a_{γδ} (both symmetrised).
pub fn spring_stress_derivatives(s: &MembraneSpring, ahat: &Mat2, cur: &Metrics) -> (Tensor4, Tensor4) {
    let a = &cur.a_con;
    let ahat_co = inv2(ahat).unwrap_or_else(Mat2::zeros);
    let j_el2 = cur.det * det2(ahat);
    let i1_el = ddot(ahat, &cur.a_co);
    let isym = Tensor4::sym_identity();
    let dinv = Tensor4::inverse_derivative(a);
    let aa = Tensor4::outer(a, a);
    match s.kind {
        SpringKind::KoiterMembrane => {
            let p = ahat * cur.a_co;
            let eye = Mat2::identity();
            let d_hat = (Tensor4::outer(ahat, &cur.a_co) + isym * (i1_el - 2.0)) * (0.5 * s.bulk)
                + (Tensor4::sym_product(&eye, &p) + Tensor4::sym_product(&p, &eye) - isym) * s.mu1;
            let d_a = Tensor4::outer(ahat, ahat) * (0.5 * s.bulk) + Tensor4::sym_product(ahat, ahat) * s.mu1;
            (d_hat, d_a)
        }
        SpringKind::NeoHookeanMembrane => {
            let d_hat = Tensor4::outer(a, &ahat_co) * (0.5 * s.bulk * j_el2) + isym * s.mu1;
            let d_a = (aa * j_el2 + dinv * (j_el2 - 1.0)) * (0.5 * s.bulk) - dinv * s.mu1;
            (d_hat, d_a)
        }
        SpringKind::NeoHookeanSplitMembrane => {
            let j_el = j_el2.sqrt();
            let dev = 2.0 * ahat - i1_el * a;
            let d_hat = Tensor4::outer(a, &ahat_co) * (0.5 * s.bulk * j_el2)
                + (Tensor4::outer(&dev, &ahat_co) * (-0.25 / j_el)
                    + (isym * 2.0 - Tensor4::outer(a, &cur.a_co)) * (0.5 / j_el))
                    * s.mu1;
            let d_a = (aa * j_el2 + dinv * (j_el2 - 1.0)) * (0.5 * s.bulk)
                + (Tensor4::outer(&dev, a) * (-0.25 / j_el)
                    - (Tensor4::outer(a, ahat) + dinv * i1_el) * (0.5 / j_el))
                    * s.mu1;
            (d_hat, d_a)
        }
        SpringKind::IncompressibleNeoHookeanMembrane => {
            let d_hat = (isym + Tensor4::outer(a, &ahat_co) * (1.0 / j_el2)) * s.mu1;
            let d_a = (aa - dinv) * (s.mu1 / j_el2);
            (d_hat, d_a)
        }
        SpringKind::ConstantSurfaceTension => (isym * s.gamma1, Tensor4::zero()),
    }
}

fn check_timestep(dt: f64) -> Result<()> {
    if dt > 0.0 && dt.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("time step must be positive, got {dt}")))
    }
}

fn spring_and_eta(branch: &MaxwellBranch) -> Result<(&MembraneSpring, f64)> {
    let s = branch.membrane.as_ref().ok_or(Error::InvalidParameter("branch has no membrane spring".into()))?;
    if !(branch.eta_s > 0.0) {
        return Err(Error::DegenerateViscosity("eta_s = 0 with a membrane spring".into()));
    }
    Ok((s, branch.eta_s))
}

/// `ĝ_s = (â_{n+1} − â_n)/Δt + σ̂(â_{n+1})/η_s`, components (11, 12, 22).
pub fn residual_surface(branch: &MaxwellBranch, ahat: &Mat2, ahat_n: &Mat2, cur: &Metrics, dt: f64) -> Result<[f64; 3]> {
    check_timestep(dt)?;
    let (s, eta) = spring_and_eta(branch)?;
    let g = (ahat - ahat_n) / dt + spring_stress(s, ahat, cur) / eta;
    Ok([g[(0, 0)], 0.5 * (g[(0, 1)] + g[(1, 0)]), g[(1, 1)]])
}

/// Full 4×4 derivative `∂ĝ^{αβ}/∂â^{γδ}` with the unsymmetrised identity for the rate term.
fn jacobian4(s: &MembraneSpring, eta: f64, ahat: &Mat2, cur: &Metrics, dt: f64) -> (Mat4, Tensor4) {
    let (d_hat, d_a) = spring_stress_derivatives(s, ahat, cur);
    (Mat4::identity() / dt + d_hat.to_mat4() / eta, d_a)
}

/// 3×3 Jacobian w.r.t. (â^{11}, â^{12}, â^{22}); the â^{12} column is the sum
/// of the â^{12} and â^{21} columns.
pub fn jacobian_surface(branch: &MaxwellBranch, ahat: &Mat2, cur: &Metrics, dt: f64) -> Result<Mat3> {
    check_timestep(dt)?;
    let (s, eta) = spring_and_eta(branch)?;
    let (j4, _) = jacobian4(s, eta, ahat, cur, dt);
    let rows = [0, 1, 3];
    Ok(Mat3::from_fn(|i, j| match j {
        0 => j4[(rows[i], 0)],
        1 => j4[(rows[i], 1)] + j4[(rows[i], 2)],
        _ => j4[(rows[i], 3)],
    }))
}

fn closed_form(s: &MembraneSpring, eta: f64, ahat_n: &Mat2, cur: &Metrics, dt: f64) -> Option<Mat2> {
    match s.kind {
        SpringKind::NeoHookeanMembrane if s.bulk == 0.0 => {
            Some((eta * ahat_n + s.mu1 * dt * cur.a_con) / (eta + s.mu1 * dt))
        }
        SpringKind::ConstantSurfaceTension => Some(eta / (eta + s.gamma1 * dt) * ahat_n),
        _ => None,
    }
}

/// Implicit-Euler update of â^{αβ}, starting from â_n.
pub fn update_intermediate_metric(
    branch: &MaxwellBranch,
    ahat_n: &Mat2,
    cur: &Metrics,
    dt: f64,
    method: LocalMethod,
) -> Result<(Mat2, LocalReport)> {
    check_timestep(dt)?;
    let (s, eta) = spring_and_eta(branch)?;
    if method == LocalMethod::Auto {
        if let Some(ahat) = closed_form(s, eta, ahat_n, cur, dt) {
            return Ok((ahat, LocalReport { iterations: 0, closed_form: true, last_step: 0.0 }));
        }
    }
    if let Ok((ahat, iterations, last_step)) = local_newton(branch, ahat_n, ahat_n, cur, dt) {
        return Ok((ahat, LocalReport { iterations, closed_form: false, last_step }));
    }
    // Far from equilibrium a nonconvex spring can send Newton to a spurious
    // root; follow the root branch from â_n by continuation in the step size.
    let (mut done, mut frac, mut total) = (0.0f64, 0.25f64, 0usize);
    let mut ahat = *ahat_n;
    let mut last = 0.0;
    while done < 1.0 {
        let next = (done + frac).min(1.0);
        match local_newton(branch, &ahat, ahat_n, cur, next * dt) {
            Ok((a, it, step)) => {
                ahat = a;
                total += it;
                last = step;
                done = next;
                frac *= 2.0;
            }
            Err(e) => {
                frac *= 0.5;
                if frac < 1e-6 {
                    return Err(e);
                }
            }
        }
    }
    Ok((ahat, LocalReport { iterations: total, closed_form: false, last_step: last }))
}

/// Newton iterations on the implicit-Euler residual from `start`; each step
/// is halved until the iterate stays positive definite.
fn local_newton(branch: &MaxwellBranch, start: &Mat2, ahat_n: &Mat2, cur: &Metrics, dt: f64) -> Result<(Mat2, usize, f64)> {
    let spd = |m: &Mat2| det2(m) > 0.0 && m[(0, 0)] > 0.0;
    let mut v = nalgebra::Vector3::from(sym_to3(start));
    for it in 1..=LOCAL_MAX_ITER {
        let ahat = sym_from3(v.into());
        let g = nalgebra::Vector3::from(residual_surface(branch, &ahat, ahat_n, cur, dt)?);
        let jac = jacobian_surface(branch, &ahat, cur, dt)?;
        let step = jac.lu().solve(&(-g)).ok_or(Error::LocalSingularity)?;
        let norm = step.norm();
        if !norm.is_finite() {
            return Err(Error::LocalSingularity);
        }
        let mut alpha = 1.0;
        while !spd(&sym_from3((v + alpha * step).into())) {
            alpha *= 0.5;
            if alpha < 1e-8 {
                return Err(Error::DegenerateIntermediateMetric(det2(&ahat)));
            }
        }
        v += alpha * step;
        if norm <= LOCAL_TOL {
            return Ok((sym_from3(v.into()), it, norm));
        }
    }
    let ahat = sym_from3(v.into());
    let g = residual_surface(branch, &ahat, ahat_n, cur, dt)?;
    Err(Error::LocalNonConvergence { iterations: LOCAL_MAX_ITER, residual: nalgebra::Vector3::from(g).norm() })
}

/// Closed-form implicit-Euler update of b̂_{αβ} for the Koiter bending spring.
pub fn update_intermediate_curvature(branch: &MaxwellBranch, bhat_n: &Mat2, b_co: &Mat2, dt: f64) -> Result<Mat2> {
    check_timestep(dt)?;
    let b = branch.bending.as_ref().ok_or(Error::InvalidParameter("branch has no bending spring".into()))?;
    if !(branch.eta_b > 0.0) {
        return Err(Error::DegenerateViscosity("eta_b = 0 with a bending spring".into()));
    }
    let eta = branch.eta_b;
    Ok((eta * bhat_n + b.c1 * dt * b_co) / (eta + b.c1 * dt))
}

/// Branch stress `σ₁` and moment `M₁` (Cauchy-type, per current area).
pub fn maxwell_stress_and_moment(branch: &MaxwellBranch, ahat: &Mat2, bhat: &Mat2, cur: &Metrics) -> (Mat2, Mat2) {
    let j_el = (cur.det * det2(ahat)).sqrt();
    let sigma = branch.membrane.as_ref().map(|s| spring_stress(s, ahat, cur) / j_el).unwrap_or_else(Mat2::zeros);
    let moment = branch
        .bending
        .as_ref()
        .map(|b| b.c1 / j_el * (ahat * (cur.b_co - bhat) * ahat))
        .unwrap_or_else(Mat2::zeros);
    (sigma, moment)
}

/// `∂â^{αβ}/∂a_{γδ}` at the converged state, from the linearised residual.
pub fn metric_sensitivity(branch: &MaxwellBranch, ahat: &Mat2, cur: &Metrics, dt: f64) -> Result<Tensor4> {
    let (s, eta) = spring_and_eta(branch)?;
    let (mut j4, d_a) = jacobian4(s, eta, ahat, cur, dt);
    // The skew subspace only carries 1/Δt, which makes the 4×4 system
    // ill-conditioned for fast dashpots; lifting it leaves symmetric solutions
    // unchanged.
    let lift = j4.abs().max();
    j4 += (Mat4::identity() - Tensor4::sym_identity().to_mat4()) * lift;
    let rhs = -d_a.to_mat4() / eta;
    let sol = j4.lu().solve(&rhs).ok_or(Error::TangentSingularity)?;
    if sol.iter().any(|x| !x.is_finite()) {
        return Err(Error::TangentSingularity);
    }
    Ok(Tensor4::from_mat4(&sol))
}

/// Kirchhoff-type branch stress `τ₁ = J σ₁ = J_in σ̂`, moment `M₀₁ = J M₁` and
/// the branch tangent blocks at the converged (â, b̂).
pub fn maxwell_tangents(
    branch: &MaxwellBranch,
    ahat: &Mat2,
    bhat: &Mat2,
    cur: &Metrics,
    reference: &Metrics,
    dt: f64,
    mode: TangentMode,
) -> Result<Response> {
    check_timestep(dt)?;
    let ahat_co = inv2(ahat).ok_or(Error::DegenerateIntermediateMetric(det2(ahat)))?;
    let j_in = (1.0 / (det2(ahat) * reference.det)).sqrt();
    let mut out = Response::default();
    let sens = match (&branch.membrane, mode) {
        (Some(_), TangentMode::Consistent) => Some(metric_sensitivity(branch, ahat, cur, dt)?),
        _ => None,
    };
    // derivative of J_in through â: (∂J_in/∂â^{μν}) (∂â^{μν}/∂a_{γδ})
    let dj_in = sens.map(|s| s.contract_left(&(-0.5 * j_in * ahat_co))).unwrap_or_else(Mat2::zeros);
    if let Some(s) = &branch.membrane {
        let sig_hat = spring_stress(s, ahat, cur);
        let (d_hat, d_a) = spring_stress_derivatives(s, ahat, cur);
        out.tau = j_in * sig_hat;
        let mut c = d_a * j_in;
        if let Some(sv) = &sens {
            c += d_hat.compose(sv) * j_in + Tensor4::outer(&sig_hat, &dj_in);
        }
        out.tangents.c = (c * 2.0).sym_minor();
    }
    if let Some(b) = &branch.bending {
        let kappa = cur.b_co - bhat;
        let akb = ahat * kappa * ahat;
        out.m0 = j_in * b.c1 * akb;
        let relax = match mode {
            TangentMode::Consistent => branch.eta_b / (branch.eta_b + b.c1 * dt),
            TangentMode::FrozenHistory => 1.0,
        };
        out.tangents.f = Tensor4::sym_product(ahat, ahat) * (j_in * b.c1 * relax);
        if let Some(sv) = &sens {
            let l = ahat * kappa;
            let eye = Mat2::identity();
            let d_akb = Tensor4::sym_product(&eye, &l) + Tensor4::sym_product(&l, &eye);
            let e = Tensor4::outer(&(b.c1 * akb), &dj_in) + d_akb.compose(sv) * (j_in * b.c1);
            out.tangents.e = (e * 2.0).sym_minor();
        }
    }
    Ok(out)
}

/// `Δ𝒟 = τ₁ : ½(â_{αβ,n+1} − â_{αβ,n}) + M₀₁ : (b̂_{n+1} − b̂_n)` per reference area.
pub fn dissipation_increment(tau1: &Mat2, m01: &Mat2, hist_n: &MaxwellHistory, ahat: &Mat2, bhat: &Mat2) -> f64 {
    let mut d = 0.0;
    if let (Some(new_co), Some(old_co)) = (inv2(ahat), inv2(&hist_n.ahat())) {
        d += 0.5 * ddot(tau1, &(new_co - old_co));
    }
    d + ddot(m01, &(bhat - hist_n.bhat()))
}

/// Everything produced by one branch at one point for a trial state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchUpdate {
    pub response: Response,
    pub sigma: Mat2,
    pub moment: Mat2,
    pub history: MaxwellHistory,
    pub report: LocalReport,
}

/// Local update from the committed history followed by stress and tangent evaluation.
pub fn update_branch(
    branch: &MaxwellBranch,
    hist_n: &MaxwellHistory,
    cur: &Metrics,
    reference: &Metrics,
    dt: f64,
    mode: TangentMode,
    method: LocalMethod,
) -> Result<BranchUpdate> {
    let (ahat, report) = match &branch.membrane {
        Some(_) => update_intermediate_metric(branch, &hist_n.ahat(), cur, dt, method)?,
        None => (hist_n.ahat(), LocalReport::default()),
    };
    let bhat = match &branch.bending {
        Some(_) => update_intermediate_curvature(branch, &hist_n.bhat(), &cur.b_co, dt)?,
        None => hist_n.bhat(),
    };
    let response = maxwell_tangents(branch, &ahat, &bhat, cur, reference, dt, mode)?;
    let (sigma, moment) = maxwell_stress_and_moment(branch, &ahat, &bhat, cur);
    let dd = dissipation_increment(&response.tau, &response.m0, hist_n, &ahat, &bhat);
    Ok(BranchUpdate {
        response,
        sigma,
        moment,
        history: MaxwellHistory { ahat_con: sym_to3(&ahat), bhat_co: sym_to3(&bhat), dissipation: hist_n.dissipation + dd },
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat(a: Mat2) -> Metrics {
        Metrics::new(a, Mat2::zeros()).unwrap()
    }

    #[test]
    fn neo_hookean_closed_form_example() {
        let br = MaxwellBranch::membrane(SpringKind::NeoHookeanMembrane, 0.0, 1.0, 1.0);
        let cur = flat(Mat2::identity() / 3.0);
        let (ahat, rep) = update_intermediate_metric(&br, &Mat2::identity(), &cur, 1.0, LocalMethod::Auto).unwrap();
        assert!(rep.closed_form);
        assert!((ahat - 2.0 * Mat2::identity()).norm() < 1e-15);
        let g = residual_surface(&br, &ahat, &Mat2::identity(), &cur, 1.0).unwrap();
        assert!(g.iter().all(|x| x.abs() < 1e-15));
    }

    #[test]
    fn surface_tension_closed_form_example() {
        let br = MaxwellBranch::surface_tension(1.0, 1.0);
        let cur = flat(Mat2::new(1.3, 0.1, 0.1, 0.8));
        let an = Mat2::new(1.0, 0.2, 0.2, 1.5);
        let (ahat, _) = update_intermediate_metric(&br, &an, &cur, 1.0, LocalMethod::Auto).unwrap();
        assert!((ahat - an / 2.0).norm() < 1e-15);
        let zero = MaxwellBranch::surface_tension(0.0, 1.0);
        let (ahat, _) = update_intermediate_metric(&zero, &an, &cur, 1.0, LocalMethod::Auto).unwrap();
        assert_eq!(ahat, an);
    }

    #[test]
    fn neo_hookean_jacobian_is_scaled_identity() {
        let br = MaxwellBranch::membrane(SpringKind::NeoHookeanMembrane, 0.0, 2.0, 0.5);
        let cur = flat(Mat2::new(1.3, 0.1, 0.1, 0.8));
        let j = jacobian_surface(&br, &Mat2::identity(), &cur, 0.1).unwrap();
        assert!((j - Mat3::identity() * (10.0 + 4.0)).norm() < 1e-12);
    }

    #[test]
    fn curvature_update_examples() {
        let br = MaxwellBranch::bending(1.0, 1.0);
        let b = Mat2::new(0.0, 0.0, 0.0, 0.8);
        let bh = update_intermediate_curvature(&br, &Mat2::zeros(), &b, 1.0).unwrap();
        assert!((bh - b / 2.0).norm() < 1e-15);
        assert_eq!(update_intermediate_curvature(&br, &b, &b, 0.3).unwrap(), b);
        let bh = update_intermediate_curvature(&br, &Mat2::zeros(), &b, 1e12).unwrap();
        assert!((bh - b).norm() < 1e-11);
    }

    #[test]
    fn zero_viscosity_is_rejected() {
        let br = MaxwellBranch::membrane(SpringKind::NeoHookeanMembrane, 0.0, 1.0, 0.0);
        assert!(matches!(br.validate(), Err(Error::DegenerateViscosity(_))));
        let cur = flat(Mat2::identity());
        assert!(update_intermediate_metric(&br, &Mat2::identity(), &cur, 0.1, LocalMethod::Auto).is_err());
    }

    #[test]
    fn neo_hookean_sensitivity_limits() {
        let cur = flat(Mat2::new(1.3, 0.1, 0.1, 0.8));
        let dinv = Tensor4::inverse_derivative(&cur.a_con);
        let fast = MaxwellBranch::membrane(SpringKind::NeoHookeanMembrane, 0.0, 1.0, 1e-9);
        let s = metric_sensitivity(&fast, &cur.a_con, &cur, 1.0).unwrap();
        assert!((s - dinv).norm() < 1e-8, "{} {}", (s - dinv).norm(), dinv.norm());
        let slow = MaxwellBranch::membrane(SpringKind::NeoHookeanMembrane, 0.0, 1.0, 1e12);
        let s = metric_sensitivity(&slow, &cur.a_con, &cur, 1.0).unwrap();
        assert!(s.norm() < 1e-11);
    }
}
