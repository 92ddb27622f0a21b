//! Curvilinear surface quantities at a point: tangents, normal, metric,
//! curvature, Christoffel symbols, and the quantities of the multiplicative
//! split into elastic and inelastic parts.

use crate::error::{Error, Result};
use crate::spline::BasisEval;
use crate::tensor::{det2, ddot, inv2, Mat2, Vec3};

/// Degeneracy threshold for |a1 × a2| and metric determinants.
pub const EPS_GEO: f64 = 1e-12;

/// Tangents `a_α`, their derivatives `a_{α,β}` and the unit normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub x: Vec3,
    pub a: [Vec3; 2],
    pub a_d: [[Vec3; 2]; 2],
    pub n: Vec3,
    /// |a1 × a2|
    pub area: f64,
}

pub fn surface_point(basis: &BasisEval, controls: &[Vec3]) -> Result<SurfacePoint> {
    let mut x = Vec3::zeros();
    let mut a = [Vec3::zeros(); 2];
    let mut a_d = [[Vec3::zeros(); 2]; 2];
    for (i, c) in controls.iter().enumerate() {
        x += basis.values[i] * c;
        a[0] += basis.d1[i][0] * c;
        a[1] += basis.d1[i][1] * c;
        a_d[0][0] += basis.d2[i][0] * c;
        a_d[0][1] += basis.d2[i][1] * c;
        a_d[1][1] += basis.d2[i][2] * c;
    }
    a_d[1][0] = a_d[0][1];
    let cr = a[0].cross(&a[1]);
    let area = cr.norm();
    if !(area > EPS_GEO) {
        return Err(Error::DegenerateParametrization(area));
    }
    Ok(SurfacePoint { x, a, a_d, n: cr / area, area })
}

/// Metric and curvature components of one configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub a_co: Mat2,
    pub a_con: Mat2,
    pub b_co: Mat2,
    pub det: f64,
}

impl Metrics {
    pub fn new(a_co: Mat2, b_co: Mat2) -> Result<Self> {
        let det = det2(&a_co);
        if !(det > EPS_GEO * EPS_GEO) || a_co[(0, 0)] <= 0.0 {
            return Err(Error::DegenerateMetric(det));
        }
        let a_con = inv2(&a_co).ok_or(Error::DegenerateMetric(det))?;
        Ok(Metrics { a_co, a_con, b_co, det })
    }

    /// `H = ½ a^{αβ} b_{αβ}`
    pub fn mean_curvature(&self) -> f64 {
        0.5 * ddot(&self.a_con, &self.b_co)
    }

    /// `κ = det(a^{αγ} b_{γβ})`
    pub fn gauss_curvature(&self) -> f64 {
        det2(&(self.a_con * self.b_co))
    }

    /// `b^{αβ} = a^{αγ} b_{γδ} a^{δβ}`
    pub fn b_con(&self) -> Mat2 {
        self.a_con * self.b_co * self.a_con
    }
}

/// Full differential-geometric state at a quadrature point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePointState {
    pub point: SurfacePoint,
    pub metrics: Metrics,
    /// Dual basis `a^α = a^{αβ} a_β`.
    pub a_dual: [Vec3; 2],
    /// `Γ^γ_{αβ}` stored as `christoffel[γ][α][β]`.
    pub christoffel: [[[f64; 2]; 2]; 2],
    pub h: f64,
    pub gauss: f64,
}

impl SurfacePointState {
    pub fn a_co(&self) -> &Mat2 {
        &self.metrics.a_co
    }
    pub fn a_con(&self) -> &Mat2 {
        &self.metrics.a_con
    }
    pub fn b_co(&self) -> &Mat2 {
        &self.metrics.b_co
    }
}

pub fn metric_and_curvature(sp: &SurfacePoint) -> Result<SurfacePointState> {
    let a_co = Mat2::from_fn(|i, j| sp.a[i].dot(&sp.a[j]));
    let b_co = Mat2::from_fn(|i, j| sp.a_d[i][j].dot(&sp.n));
    let metrics = Metrics::new(a_co, b_co)?;
    let a_dual = [
        metrics.a_con[(0, 0)] * sp.a[0] + metrics.a_con[(0, 1)] * sp.a[1],
        metrics.a_con[(1, 0)] * sp.a[0] + metrics.a_con[(1, 1)] * sp.a[1],
    ];
    let mut christoffel = [[[0.0; 2]; 2]; 2];
    for (g, dual) in a_dual.iter().enumerate() {
        for al in 0..2 {
            for be in 0..2 {
                christoffel[g][al][be] = sp.a_d[al][be].dot(dual);
            }
        }
    }
    Ok(SurfacePointState {
        point: *sp,
        metrics,
        a_dual,
        christoffel,
        h: metrics.mean_curvature(),
        gauss: metrics.gauss_curvature(),
    })
}

/// `I1 = A^{αβ} a_{αβ}` and `J = √(det a / det A)`.
pub fn invariants(a_ref_con: &Mat2, a_co: &Mat2, a_ref_co: &Mat2) -> (f64, f64) {
    (ddot(a_ref_con, a_co), (det2(a_co) / det2(a_ref_co)).sqrt())
}

/// Quantities of the multiplicative split at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitState {
    pub ahat_con: Mat2,
    pub ahat_co: Mat2,
    pub bhat_co: Mat2,
    pub j: f64,
    pub j_el: f64,
    pub j_in: f64,
    pub i1: f64,
    pub i1_el: f64,
}

pub fn split_quantities(cur: &Metrics, reference: &Metrics, ahat_con: &Mat2, bhat_co: &Mat2) -> Result<SplitState> {
    let det_hat_con = det2(ahat_con);
    if !(det_hat_con > 0.0) || ahat_con[(0, 0)] <= 0.0 {
        return Err(Error::DegenerateIntermediateMetric(det_hat_con));
    }
    let ahat_co = inv2(ahat_con).ok_or(Error::DegenerateIntermediateMetric(det_hat_con))?;
    let det_hat = 1.0 / det_hat_con;
    let (i1, j) = invariants(&reference.a_con, &cur.a_co, &reference.a_co);
    Ok(SplitState {
        ahat_con: *ahat_con,
        ahat_co,
        bhat_co: *bhat_co,
        j,
        j_el: (cur.det / det_hat).sqrt(),
        j_in: (det_hat / reference.det).sqrt(),
        i1,
        i1_el: ddot(ahat_con, &cur.a_co),
    })
}

/// Total, elastic and inelastic parts of a strain-like quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdditiveSplit {
    pub total: Mat2,
    pub elastic: Mat2,
    pub inelastic: Mat2,
}

/// `ε = ½(a − A)`, `ε_el = ½(a − â)`, `ε_in = ½(â − A)` (covariant).
pub fn strain_split(a_co: &Mat2, a_ref_co: &Mat2, ahat_co: &Mat2) -> AdditiveSplit {
    AdditiveSplit {
        total: 0.5 * (a_co - a_ref_co),
        elastic: 0.5 * (a_co - ahat_co),
        inelastic: 0.5 * (ahat_co - a_ref_co),
    }
}

/// `κ = b − B`, `κ_el = b − b̂`, `κ_in = b̂ − B`.
pub fn curvature_split(b_co: &Mat2, b_ref_co: &Mat2, bhat_co: &Mat2) -> AdditiveSplit {
    AdditiveSplit { total: b_co - b_ref_co, elastic: b_co - bhat_co, inelastic: bhat_co - b_ref_co }
}

impl AdditiveSplit {
    /// Largest component of `total − elastic − inelastic`.
    pub fn defect(&self) -> f64 {
        (self.total - self.elastic - self.inelastic).abs().max()
    }
}
