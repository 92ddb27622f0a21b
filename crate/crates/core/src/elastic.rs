//! Elastic-branch constitution: membrane stresses, bending moments and their
//! tangents for each surface model.

use crate::error::{Error, Result};
use crate::kinematics::Metrics;
use crate::tensor::{ddot, Mat2, Tensor4};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElasticKind {
    KoiterMembrane,
    NeoHookeanMembrane,
    NeoHookeanSplitMembrane,
    IncompressibleNeoHookeanMembrane,
    ConstantSurfaceTension,
    KoiterBending,
    HelfrichBending,
}

impl ElasticKind {
    pub const ALL: [ElasticKind; 7] = [
        ElasticKind::KoiterMembrane,
        ElasticKind::NeoHookeanMembrane,
        ElasticKind::NeoHookeanSplitMembrane,
        ElasticKind::IncompressibleNeoHookeanMembrane,
        ElasticKind::ConstantSurfaceTension,
        ElasticKind::KoiterBending,
        ElasticKind::HelfrichBending,
    ];
}

/// One elastic contribution. Parameters not used by `kind` are ignored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElasticModel {
    pub kind: ElasticKind,
    /// Areal bulk modulus.
    #[serde(default, rename = "K")]
    pub bulk: f64,
    #[serde(default)]
    pub mu: f64,
    #[serde(default)]
    pub gamma: f64,
    /// Koiter bending modulus.
    #[serde(default)]
    pub c: f64,
    /// Helfrich bending modulus.
    #[serde(default)]
    pub k: f64,
    /// Gaussian modulus; only zero is supported.
    #[serde(default)]
    pub k_star: f64,
    #[serde(default)]
    pub h0: f64,
}

impl ElasticModel {
    pub fn new(kind: ElasticKind) -> Self {
        ElasticModel { kind, bulk: 0.0, mu: 0.0, gamma: 0.0, c: 0.0, k: 0.0, k_star: 0.0, h0: 0.0 }
    }

    pub fn koiter_membrane(bulk: f64, mu: f64) -> Self {
        ElasticModel { bulk, mu, ..Self::new(ElasticKind::KoiterMembrane) }
    }
    pub fn neo_hookean(bulk: f64, mu: f64) -> Self {
        ElasticModel { bulk, mu, ..Self::new(ElasticKind::NeoHookeanMembrane) }
    }
    pub fn neo_hookean_split(bulk: f64, mu: f64) -> Self {
        ElasticModel { bulk, mu, ..Self::new(ElasticKind::NeoHookeanSplitMembrane) }
    }
    pub fn incompressible(mu: f64) -> Self {
        ElasticModel { mu, ..Self::new(ElasticKind::IncompressibleNeoHookeanMembrane) }
    }
    pub fn surface_tension(gamma: f64) -> Self {
        ElasticModel { gamma, ..Self::new(ElasticKind::ConstantSurfaceTension) }
    }
    pub fn koiter_bending(c: f64) -> Self {
        ElasticModel { c, ..Self::new(ElasticKind::KoiterBending) }
    }
    pub fn helfrich(k: f64, h0: f64) -> Self {
        ElasticModel { k, h0, ..Self::new(ElasticKind::HelfrichBending) }
    }

    pub fn validate(&self) -> Result<()> {
        let moduli = [("K", self.bulk), ("mu", self.mu), ("gamma", self.gamma), ("c", self.c), ("k", self.k)];
        for (name, v) in moduli {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be a finite nonnegative modulus, got {v}")));
            }
        }
        if self.k_star != 0.0 {
            return Err(Error::InvalidParameter("only k_star = 0 is supported".into()));
        }
        if !self.h0.is_finite() {
            return Err(Error::InvalidParameter("h0 must be finite".into()));
        }
        Ok(())
    }

    pub fn has_bending(&self) -> bool {
        matches!(self.kind, ElasticKind::KoiterBending | ElasticKind::HelfrichBending)
    }
}

/// Fourth-order tangent arrays `c = 2∂τ/∂a`, `d = ∂τ/∂b`, `e = 2∂M₀/∂a`,
/// `f = ∂M₀/∂b` (all w.r.t. covariant components).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TangentBlocks {
    pub c: Tensor4,
    pub d: Tensor4,
    pub e: Tensor4,
    pub f: Tensor4,
}

impl std::ops::AddAssign for TangentBlocks {
    fn add_assign(&mut self, o: TangentBlocks) {
        self.c += o.c;
        self.d += o.d;
        self.e += o.e;
        self.f += o.f;
    }
}

/// Kirchhoff stress `τ = Jσ`, moment `M₀ = JM` and tangents at a point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Response {
    pub tau: Mat2,
    pub m0: Mat2,
    pub tangents: TangentBlocks,
}

impl std::ops::AddAssign for Response {
    fn add_assign(&mut self, o: Response) {
        self.tau += o.tau;
        self.m0 += o.m0;
        self.tangents += o.tangents;
    }
}

fn stretch(cur: &Metrics, reference: &Metrics) -> Result<f64> {
    let j = (cur.det / reference.det).sqrt();
    if !(j > 0.0) || !j.is_finite() {
        return Err(Error::ElementInversion { element: usize::MAX, j });
    }
    Ok(j)
}

fn koiter_c(bulk: f64, mu: f64, a_con: &Mat2) -> Tensor4 {
    Tensor4::outer(a_con, a_con) * bulk + Tensor4::sym_product(a_con, a_con) * (2.0 * mu)
}

/// Stress, moment and tangents of one elastic model.
pub fn evaluate(model: &ElasticModel, cur: &Metrics, reference: &Metrics) -> Result<Response> {
    let j = stretch(cur, reference)?;
    let a = &cur.a_con;
    let big_a = &reference.a_con;
    let dinv = Tensor4::inverse_derivative(a);
    let aa = Tensor4::outer(a, a);
    let (kb, mu) = (model.bulk, model.mu);
    let mut r = Response::default();
    match model.kind {
        ElasticKind::KoiterMembrane => {
            let c = koiter_c(kb, mu, big_a);
            r.tau = 0.5 * c.contract(&(cur.a_co - reference.a_co));
            r.tangents.c = c;
        }
        ElasticKind::NeoHookeanMembrane => {
            let j2 = j * j;
            r.tau = 0.5 * kb * (j2 - 1.0) * a + mu * (big_a - a);
            r.tangents.c = aa * (kb * j2) + dinv * (kb * (j2 - 1.0) - 2.0 * mu);
        }
        ElasticKind::NeoHookeanSplitMembrane => {
            let j2 = j * j;
            let i1 = ddot(big_a, &cur.a_co);
            r.tau = 0.5 * kb * (j2 - 1.0) * a + mu / (2.0 * j) * (2.0 * big_a - i1 * a);
            r.tangents.c = aa * (kb * j2)
                + dinv * (kb * (j2 - 1.0))
                + (Tensor4::outer(big_a, a) * -1.0 - Tensor4::outer(a, big_a) + aa * (0.5 * i1) - dinv * i1) * (mu / j);
        }
        ElasticKind::IncompressibleNeoHookeanMembrane => {
            let j2 = j * j;
            r.tau = mu * (big_a - a / j2);
            r.tangents.c = (aa - dinv) * (2.0 * mu / j2);
        }
        ElasticKind::ConstantSurfaceTension => {
            r.tau = model.gamma * j * a;
            r.tangents.c = (aa + dinv * 2.0) * (model.gamma * j);
        }
        ElasticKind::KoiterBending => {
            let f = Tensor4::sym_product(big_a, big_a) * model.c;
            r.m0 = f.contract(&(cur.b_co - reference.b_co));
            r.tangents.f = f;
        }
        ElasticKind::HelfrichBending => {
            let k = model.k;
            let h = cur.mean_curvature() - model.h0;
            let bc = cur.b_con();
            let ab = Tensor4::outer(a, &bc);
            let ba = Tensor4::outer(&bc, a);
            let db = -(Tensor4::sym_product(a, &bc) + Tensor4::sym_product(&bc, a));
            r.tau = j * (k * h * h * a - 2.0 * k * h * bc);
            r.m0 = j * k * h * a;
            r.tangents.c = (aa * (k * h * h) - (ba + ab) * (2.0 * k * h) + dinv * (2.0 * k * h * h)
                + Tensor4::outer(&bc, &bc) * (2.0 * k)
                - db * (4.0 * k * h))
                * j;
            r.tangents.d = (aa * (k * h) - ba * k + dinv * (2.0 * k * h)) * j;
            r.tangents.e = (aa * h - ab + dinv * (2.0 * h)) * (j * k);
            r.tangents.f = aa * (0.5 * j * k);
        }
    }
    Ok(r)
}

/// Cauchy membrane stress `σ^{αβ}`.
pub fn membrane_stress(model: &ElasticModel, cur: &Metrics, reference: &Metrics) -> Result<Mat2> {
    let j = stretch(cur, reference)?;
    Ok(evaluate(model, cur, reference)?.tau / j)
}

/// Bending moment `M^{αβ}`.
pub fn bending_moment(model: &ElasticModel, cur: &Metrics, reference: &Metrics) -> Result<Mat2> {
    let j = stretch(cur, reference)?;
    Ok(evaluate(model, cur, reference)?.m0 / j)
}

pub fn elastic_tangents(model: &ElasticModel, cur: &Metrics, reference: &Metrics) -> Result<TangentBlocks> {
    Ok(evaluate(model, cur, reference)?.tangents)
}

/// Strain energy per reference area.
pub fn energy_density(model: &ElasticModel, cur: &Metrics, reference: &Metrics) -> Result<f64> {
    let j = stretch(cur, reference)?;
    let i1 = ddot(&reference.a_con, &cur.a_co);
    let (kb, mu) = (model.bulk, model.mu);
    Ok(match model.kind {
        ElasticKind::KoiterMembrane => {
            let e = cur.a_co - reference.a_co;
            0.125 * ddot(&e, &koiter_c(kb, mu, &reference.a_con).contract(&e))
        }
        ElasticKind::NeoHookeanMembrane => {
            0.25 * kb * (j * j - 1.0 - 2.0 * j.ln()) + 0.5 * mu * (i1 - 2.0 - 2.0 * j.ln())
        }
        ElasticKind::NeoHookeanSplitMembrane => 0.25 * kb * (j * j - 1.0 - 2.0 * j.ln()) + 0.5 * mu * (i1 / j - 2.0),
        ElasticKind::IncompressibleNeoHookeanMembrane => 0.5 * mu * (i1 + 1.0 / (j * j) - 3.0),
        ElasticKind::ConstantSurfaceTension => model.gamma * j,
        ElasticKind::KoiterBending => {
            let k = cur.b_co - reference.b_co;
            0.5 * ddot(&k, &(Tensor4::sym_product(&reference.a_con, &reference.a_con) * model.c).contract(&k))
        }
        ElasticKind::HelfrichBending => {
            let h = cur.mean_curvature() - model.h0;
            j * model.k * h * h
        }
    })
}

/// Sum of the responses of several elastic contributions.
pub fn evaluate_all(models: &[ElasticModel], cur: &Metrics, reference: &Metrics) -> Result<Response> {
    let mut r = Response::default();
    for m in models {
        r += evaluate(m, cur, reference)?;
    }
    Ok(r)
}
