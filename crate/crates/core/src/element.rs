//! Element-level quadrature: internal and external forces, stiffness blocks,
//! edge loads and the L2 projection to control points.

use crate::error::{Error, Result};
use crate::kinematics::{metric_and_curvature, surface_point, Metrics, SurfacePointState};
use crate::material::{evaluate_point, Material, PointEval, PointOptions};
use crate::maxwell::MaxwellHistory;
use crate::mesh::{PatchMesh, Side};
use crate::spline::{nurbs_eval, BasisEval};
use crate::tensor::{skew, Mat2, Mat3, Vec3};
use nalgebra::{DMatrix, DVector};
use std::ops::AddAssign;

/// Gauss–Legendre points and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = z;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[n - 1 - i] = z;
        w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

#[derive(Debug, Clone)]
pub struct QuadPoint {
    pub xi: f64,
    pub eta: f64,
    /// Gauss weight times the parametric Jacobian of the element.
    pub weight: f64,
    pub basis: BasisEval,
    pub reference: Metrics,
    /// |A1 × A2|; the reference area element is `ref_area · weight`.
    pub ref_area: f64,
}

#[derive(Debug, Clone)]
pub struct ElementWorkspace {
    pub element: usize,
    pub conn: Vec<usize>,
    pub qps: Vec<QuadPoint>,
}

impl ElementWorkspace {
    pub fn new(mesh: &PatchMesh, e: usize) -> Result<Self> {
        let el = &mesh.elements[e];
        let spline = mesh.element_spline(e);
        let [p, q] = mesh.degrees();
        let (gx, wx) = gauss_legendre(p + 1);
        let (gy, wy) = gauss_legendre(q + 1);
        let ((x0, x1), (y0, y1)) = (el.param[0], el.param[1]);
        let controls: Vec<Vec3> = el.conn.iter().map(|&c| mesh.control[c]).collect();
        let mut qps = Vec::with_capacity(gx.len() * gy.len());
        for (j, &t) in gy.iter().enumerate() {
            for (i, &s) in gx.iter().enumerate() {
                let xi = x0 + 0.5 * (s + 1.0) * (x1 - x0);
                let eta = y0 + 0.5 * (t + 1.0) * (y1 - y0);
                let basis = nurbs_eval(&spline, xi, eta)?;
                let sp = surface_point(&basis, &controls)?;
                let st = metric_and_curvature(&sp)?;
                qps.push(QuadPoint {
                    xi,
                    eta,
                    weight: wx[i] * wy[j] * 0.25 * (x1 - x0) * (y1 - y0),
                    basis,
                    reference: st.metrics,
                    ref_area: sp.area,
                });
            }
        }
        Ok(ElementWorkspace { element: e, conn: el.conn.clone(), qps })
    }

    pub fn n_nodes(&self) -> usize {
        self.conn.len()
    }
}

pub fn build_workspaces(mesh: &PatchMesh) -> Result<Vec<ElementWorkspace>> {
    (0..mesh.elements.len()).map(|e| ElementWorkspace::new(mesh, e)).collect()
}

/// Distributed surface loads at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SurfaceLoad {
    /// Follower pressure acting along the current normal, per current area.
    pub pressure: f64,
    /// Dead body force per reference area.
    pub body_force: Vec3,
    /// Tangential body force components f^α along a_α, per reference area.
    pub tangential: [f64; 2],
}

#[derive(Debug, Clone)]
pub struct ElementResult {
    pub f_int: DVector<f64>,
    pub f_ext: DVector<f64>,
    /// `∂(f_int − f_ext)/∂x`
    pub stiffness: Option<DMatrix<f64>>,
    pub histories: Vec<Vec<MaxwellHistory>>,
    /// Dissipation increment integrated over the element.
    pub dissipation: f64,
    pub local_iterations: usize,
}

impl ElementResult {
    pub fn residual(&self) -> DVector<f64> {
        &self.f_int - &self.f_ext
    }
}

/// Current geometry and material response at a quadrature point.
pub struct PointState {
    pub state: SurfacePointState,
    pub eval: PointEval,
}

fn inversion(element: usize, e: Error) -> Error {
    match e {
        Error::ElementInversion { j, .. } => Error::ElementInversion { element, j },
        Error::DegenerateParametrization(a) => Error::ElementInversion { element, j: a },
        e => e,
    }
}

pub fn point_state(
    ws: &ElementWorkspace,
    q: usize,
    x: &[Vec3],
    material: &Material,
    hist_n: &[MaxwellHistory],
    dt: f64,
    opts: PointOptions,
) -> Result<PointState> {
    let qp = &ws.qps[q];
    let sp = surface_point(&qp.basis, x).map_err(|e| inversion(ws.element, e))?;
    let state = metric_and_curvature(&sp).map_err(|e| inversion(ws.element, e))?;
    let eval = evaluate_point(material, &state.metrics, &qp.reference, hist_n, dt, opts)
        .map_err(|e| inversion(ws.element, e))?;
    Ok(PointState { state, eval })
}

/// `N_{A;αβ} = N_{A,αβ} − Γ^γ_{αβ} N_{A,γ}`
fn covariant_second(basis: &BasisEval, st: &SurfacePointState) -> Vec<Mat2> {
    (0..basis.len())
        .map(|a| {
            Mat2::from_fn(|al, be| {
                basis.d2_ab(a, al, be)
                    - st.christoffel[0][al][be] * basis.d1[a][0]
                    - st.christoffel[1][al][be] * basis.d1[a][1]
            })
        })
        .collect()
}

fn add_block(k: &mut DMatrix<f64>, a: usize, b: usize, m: &Mat3) {
    for i in 0..3 {
        for j in 0..3 {
            k[(3 * a + i, 3 * b + j)] += m[(i, j)];
        }
    }
}

/// Internal and surface-load forces of one element, the new trial histories
/// and, optionally, the consistent stiffness.
#[allow(clippy::too_many_arguments)]
pub fn evaluate_element(
    ws: &ElementWorkspace,
    x: &[Vec3],
    material: &Material,
    hist_n: &[Vec<MaxwellHistory>],
    dt: f64,
    load: &SurfaceLoad,
    opts: PointOptions,
    with_stiffness: bool,
) -> Result<ElementResult> {
    let n = ws.n_nodes();
    let mut f_int = DVector::zeros(3 * n);
    let mut f_ext = DVector::zeros(3 * n);
    let mut k = with_stiffness.then(|| DMatrix::zeros(3 * n, 3 * n));
    let mut histories = Vec::with_capacity(ws.qps.len());
    let mut dissipation = 0.0;
    let mut local_iterations = 0;
    let bending = material.has_bending();
    for (q, qp) in ws.qps.iter().enumerate() {
        let ps = point_state(ws, q, x, material, &hist_n[q], dt, opts)?;
        let st = &ps.state;
        let r = &ps.eval.response;
        let d_a = qp.ref_area * qp.weight;
        let nb = &qp.basis;
        let a = st.point.a;
        let nrm = st.point.n;
        let nsc = if bending { covariant_second(nb, st) } else { Vec::new() };
        for i in 0..n {
            let mut f = Vec3::zeros();
            for al in 0..2 {
                for be in 0..2 {
                    f += r.tau[(al, be)] * nb.d1[i][al] * a[be];
                }
            }
            if bending {
                f += r.m0.component_mul(&nsc[i]).sum() * nrm;
            }
            f_int.fixed_rows_mut::<3>(3 * i).add_assign(&(f * d_a));
            let mut fe = nb.values[i] * load.pressure * a[0].cross(&a[1]) * qp.weight;
            fe += nb.values[i] * (load.body_force + load.tangential[0] * a[0] + load.tangential[1] * a[1]) * d_a;
            f_ext.fixed_rows_mut::<3>(3 * i).add_assign(&fe);
        }
        if let Some(k) = k.as_mut() {
            let t = &r.tangents;
            let a_dual = st.a_dual;
            let b_co = st.metrics.b_co;
            let a_con = st.metrics.a_con;
            let bm = b_co.component_mul(&r.m0).sum();
            let (s1, s2) = (skew(&a[0]), skew(&a[1]));
            for ia in 0..n {
                let na = nb.d1[ia];
                for ib in 0..n {
                    let nbd = nb.d1[ib];
                    let mut blk = Mat3::zeros();
                    // k_ττ and geometric k_τ
                    let mut g = Mat2::zeros();
                    let mut geo = 0.0;
                    for al in 0..2 {
                        for be in 0..2 {
                            geo += na[al] * r.tau[(al, be)] * nbd[be];
                            for ga in 0..2 {
                                for de in 0..2 {
                                    g[(be, ga)] += t.c.0[al][be][ga][de] * na[al] * nbd[de];
                                }
                            }
                        }
                    }
                    for be in 0..2 {
                        for ga in 0..2 {
                            blk += g[(be, ga)] * a[be] * a[ga].transpose();
                        }
                    }
                    blk += Mat3::identity() * geo;
                    if bending {
                        let (sa, sb) = (&nsc[ia], &nsc[ib]);
                        let mut v = [0.0; 2];
                        let mut w = [0.0; 2];
                        let mut mm = 0.0;
                        for al in 0..2 {
                            for be in 0..2 {
                                for ga in 0..2 {
                                    for de in 0..2 {
                                        v[be] += t.d.0[al][be][ga][de] * na[al] * sb[(ga, de)];
                                        w[ga] += t.e.0[al][be][ga][de] * sa[(al, be)] * nbd[de];
                                        mm += t.f.0[al][be][ga][de] * sa[(al, be)] * sb[(ga, de)];
                                    }
                                }
                            }
                        }
                        let av = v[0] * a[0] + v[1] * a[1];
                        let aw = w[0] * a[0] + w[1] * a[1];
                        blk += av * nrm.transpose() + nrm * aw.transpose() + mm * nrm * nrm.transpose();
                        // geometric bending blocks
                        let gnn: f64 = (0..2)
                            .flat_map(|g1| (0..2).map(move |g2| (g1, g2)))
                            .map(|(g1, g2)| a_con[(g1, g2)] * na[g1] * nbd[g2])
                            .sum();
                        blk -= bm * gnn * nrm * nrm.transpose();
                        let mb = r.m0.component_mul(sb).sum();
                        let ma = r.m0.component_mul(sa).sum();
                        let da = na[0] * a_dual[0] + na[1] * a_dual[1];
                        let db = nbd[0] * a_dual[0] + nbd[1] * a_dual[1];
                        blk -= mb * nrm * da.transpose() + ma * db * nrm.transpose();
                    }
                    blk *= d_a;
                    if load.pressure != 0.0 {
                        blk -= load.pressure * nb.values[ia] * (s1 * nbd[1] - s2 * nbd[0]) * qp.weight;
                    }
                    let tang = load.tangential[0] * nbd[0] + load.tangential[1] * nbd[1];
                    if tang != 0.0 {
                        blk -= Mat3::identity() * (nb.values[ia] * tang * d_a);
                    }
                    add_block(k, ia, ib, &blk);
                }
            }
        }
        dissipation += ps.eval.dissipation_increment * d_a;
        local_iterations = local_iterations.max(ps.eval.local_iterations);
        histories.push(ps.eval.histories);
    }
    Ok(ElementResult { f_int, f_ext, stiffness: k, histories, dissipation, local_iterations })
}

/// Internal force vector alone.
pub fn element_internal_force(
    ws: &ElementWorkspace,
    x: &[Vec3],
    material: &Material,
    hist_n: &[Vec<MaxwellHistory>],
    dt: f64,
) -> Result<DVector<f64>> {
    let opts = PointOptions::default();
    Ok(evaluate_element(ws, x, material, hist_n, dt, &SurfaceLoad::default(), opts, false)?.f_int)
}

/// Stiffness of `f_int − f_ext` for the given surface load.
pub fn element_stiffness(
    ws: &ElementWorkspace,
    x: &[Vec3],
    material: &Material,
    hist_n: &[Vec<MaxwellHistory>],
    dt: f64,
    load: &SurfaceLoad,
) -> Result<DMatrix<f64>> {
    let r = evaluate_element(ws, x, material, hist_n, dt, load, PointOptions::default(), true)?;
    Ok(r.stiffness.expect("stiffness requested"))
}

/// Follower pressure force `∫ N p n da` over one element.
pub fn follower_pressure_load(ws: &ElementWorkspace, x: &[Vec3], p: f64) -> Result<DVector<f64>> {
    let n = ws.n_nodes();
    let mut f = DVector::zeros(3 * n);
    for qp in &ws.qps {
        let sp = surface_point(&qp.basis, x).map_err(|e| inversion(ws.element, e))?;
        let an = sp.a[0].cross(&sp.a[1]);
        for i in 0..n {
            f.fixed_rows_mut::<3>(3 * i).add_assign(&(qp.basis.values[i] * p * an * qp.weight));
        }
    }
    Ok(f)
}

/// Loads distributed along a patch side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EdgeLoad {
    /// Dead traction per reference length.
    Traction(Vec3),
    /// Distributed bending moment per reference length about the edge
    /// tangent; positive values increase the curvature across the edge.
    Moment(f64),
}

/// Element-level external force (and its stiffness contribution, already
/// with the sign of `∂(−f_ext)/∂x`) of an edge load on `side`.
pub fn edge_load(
    mesh: &PatchMesh,
    e: usize,
    side: Side,
    x: &[Vec3],
    load: EdgeLoad,
    with_stiffness: bool,
) -> Result<(DVector<f64>, Option<DMatrix<f64>>)> {
    let el = &mesh.elements[e];
    let spline = mesh.element_spline(e);
    let s = side.fixed_dir();
    let t = 1 - s;
    let fixed = if side.outward_sign() > 0.0 { el.param[s].1 } else { el.param[s].0 };
    let sgn = side.outward_sign();
    let (lo, hi) = el.param[t];
    let deg = mesh.degrees()[t];
    let (gp, gw) = gauss_legendre(deg + 1);
    let reference: Vec<Vec3> = el.conn.iter().map(|&c| mesh.control[c]).collect();
    let n = el.conn.len();
    let mut f = DVector::zeros(3 * n);
    let mut k = with_stiffness.then(|| DMatrix::zeros(3 * n, 3 * n));
    for (g, w) in gp.iter().zip(&gw) {
        let u = lo + 0.5 * (g + 1.0) * (hi - lo);
        let (xi, eta) = if s == 0 { (fixed, u) } else { (u, fixed) };
        let basis = nurbs_eval(&spline, xi, eta)?;
        let tangent_ref: Vec3 = (0..n).map(|i| basis.d1[i][t] * reference[i]).sum();
        let ds = tangent_ref.norm() * w * 0.5 * (hi - lo);
        match load {
            EdgeLoad::Traction(tr) => {
                for i in 0..n {
                    f.fixed_rows_mut::<3>(3 * i).add_assign(&(basis.values[i] * tr * ds));
                }
            }
            EdgeLoad::Moment(m) => {
                let sp = surface_point(&basis, x).map_err(|e2| inversion(e, e2))?;
                let st = metric_and_curvature(&sp).map_err(|e2| inversion(e, e2))?;
                let a_con = st.metrics.a_con;
                let ass = a_con[(s, s)];
                let nu = [a_con[(s, 0)] / ass.sqrt(), a_con[(s, 1)] / ass.sqrt()];
                let nrm = sp.n;
                let fac = sgn * m * ds;
                for i in 0..n {
                    let c = basis.d1[i][0] * nu[0] + basis.d1[i][1] * nu[1];
                    f.fixed_rows_mut::<3>(3 * i).add_assign(&(fac * c * nrm));
                }
                if let Some(k) = k.as_mut() {
                    let ad = st.a_dual;
                    for ib in 0..n {
                        let nbd = basis.d1[ib];
                        let gb = [
                            a_con[(0, 0)] * nbd[0] + a_con[(0, 1)] * nbd[1],
                            a_con[(1, 0)] * nbd[0] + a_con[(1, 1)] * nbd[1],
                        ];
                        // ∂ν^γ/∂x_B
                        let dnu: [Vec3; 2] = std::array::from_fn(|ga| {
                            -(gb[ga] * ad[s] + gb[s] * ad[ga]) / ass.sqrt()
                                + a_con[(s, ga)] * ass.powf(-1.5) * gb[s] * ad[s]
                        });
                        let dn = -(nbd[0] * ad[0] + nbd[1] * ad[1]) * nrm.transpose();
                        for ia in 0..n {
                            let na = basis.d1[ia];
                            let c = na[0] * nu[0] + na[1] * nu[1];
                            let dv = na[0] * dnu[0] + na[1] * dnu[1];
                            let blk = -fac * (nrm * dv.transpose() + c * dn);
                            add_block(k, ia, ib, &blk);
                        }
                    }
                }
            }
        }
    }
    Ok((f, k))
}

/// L2 projection of a field given at the quadrature points of every element
/// (`values[e][q]`) onto the control points.
pub fn l2_project(mesh: &PatchMesh, workspaces: &[ElementWorkspace], values: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = mesh.control.len();
    let mut entries = Vec::new();
    let mut rhs = vec![0.0; n];
    for (ws, vals) in workspaces.iter().zip(values) {
        if vals.len() != ws.qps.len() {
            return Err(Error::Projection(format!("element {} expects {} values", ws.element, ws.qps.len())));
        }
        for (qp, v) in ws.qps.iter().zip(vals) {
            let da = qp.ref_area * qp.weight;
            for (i, &ci) in ws.conn.iter().enumerate() {
                rhs[ci] += qp.basis.values[i] * v * da;
                for (j, &cj) in ws.conn.iter().enumerate() {
                    entries.push((ci, cj, qp.basis.values[i] * qp.basis.values[j] * da));
                }
            }
        }
    }
    crate::sparse::SparseSolver::default().solve(n, &entries, &rhs).map_err(Error::Projection)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_rule_integrates_polynomials() {
        for n in 1..7 {
            let (x, w) = gauss_legendre(n);
            for deg in 0..2 * n {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-14, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn flat_patch_pressure_resultant() {
        let mesh = PatchMesh::flat_rectangle(2.0, 3.0, [2, 2], [2, 3]).unwrap();
        let mut total = Vec3::zeros();
        for ws in build_workspaces(&mesh).unwrap() {
            let x: Vec<Vec3> = ws.conn.iter().map(|&c| mesh.control[c]).collect();
            let f = follower_pressure_load(&ws, &x, 0.7).unwrap();
            for i in 0..ws.n_nodes() {
                total += f.fixed_rows::<3>(3 * i).into_owned();
            }
        }
        assert!((total - Vec3::new(0.0, 0.0, 0.7 * 6.0)).norm() < 1e-12);
    }
}
