//! Closed-form reference solutions: inflated membrane balloon, pure bending
//! of a flat strip and inflated spherical shell; error metrics.

use crate::error::{Error, Result};

/// Characteristic time `τ_λ = t_end / ln λ_end` of the stretch `λ = exp(t/τ_λ)`.
pub fn stretch_time(t_end: f64, lambda_end: f64) -> Result<f64> {
    if !(t_end > 0.0 && lambda_end > 1.0) {
        return Err(Error::InvalidParameter("need t_end > 0 and lambda_end > 1".into()));
    }
    Ok(t_end / lambda_end.ln())
}

/// Evolution factor of the intermediate metric, `â^{αβ} = A^{αβ} â_ev(t)`,
/// for a Neo-Hookean spring (K₁ = 0) driven by `a^{αβ} = A^{αβ} e^{−2t/τ}`.
pub fn ahat_ev(mu1: f64, eta_s: f64, tau: f64, t: f64) -> f64 {
    let num = mu1 * tau;
    let den = num - 2.0 * eta_s;
    if den.abs() < 1e-8 * num.abs() {
        // removable pole μ₁τ = 2η_s
        let s = 2.0 * t / tau;
        return (-s).exp() * (1.0 + s);
    }
    (num * (-2.0 * t / tau).exp() - 2.0 * eta_s * (-mu1 * t / eta_s).exp()) / den
}

/// Evolution factor of the intermediate curvature, `b̂_{αβ} = B_{αβ} b̂_ev(t)`,
/// for a Koiter bending spring driven by `b_{αβ} = B_{αβ} e^{t/τ}`.
pub fn bhat_ev(c1: f64, eta_b: f64, tau: f64, t: f64) -> Result<f64> {
    let den = eta_b + c1 * tau;
    if den == 0.0 || !den.is_finite() {
        return Err(Error::InvalidParameter("eta_b + c1 tau must not vanish".into()));
    }
    Ok((c1 * tau * (t / tau).exp() + eta_b * (-c1 * t / eta_b).exp()) / den)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BalloonParams {
    pub radius: f64,
    pub mu: f64,
    pub mu1: f64,
    pub eta_s: f64,
    pub t_end: f64,
    pub lambda_end: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PressureSplit {
    pub lambda: f64,
    pub p_el: f64,
    pub p_visc: f64,
    pub p_total: f64,
    pub ahat_ev: f64,
    pub bhat_ev: f64,
}

impl BalloonParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.mu >= 0.0 && self.mu1 >= 0.0 && self.eta_s > 0.0) {
            return Err(Error::InvalidParameter("balloon parameters must be positive".into()));
        }
        stretch_time(self.t_end, self.lambda_end).map(|_| ())
    }

    pub fn tau(&self) -> f64 {
        self.t_end / self.lambda_end.ln()
    }
}

/// Elastic (incompressible Neo-Hookean) and Maxwell (Neo-Hookean, K₁ = 0)
/// inflation pressure of a spherical membrane balloon.
pub fn balloon_pressure(p: &BalloonParams, t: f64) -> Result<PressureSplit> {
    p.validate()?;
    let tau = p.tau();
    let l = (t / tau).exp();
    let aev = ahat_ev(p.mu1, p.eta_s, tau, t);
    let p_el = 2.0 * p.mu / p.radius * (1.0 / l - l.powi(-7));
    let p_visc = 2.0 * p.mu1 / p.radius * (1.0 / l - 1.0 / (l.powi(3) * aev));
    Ok(PressureSplit { lambda: l, p_el, p_visc, p_total: p_el + p_visc, ahat_ev: aev, bhat_ev: 1.0 })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureBendParams {
    pub c: f64,
    pub c1: f64,
    pub eta_b: f64,
    pub t_end: f64,
    pub kappa_end: f64,
    /// Strip length along the bending direction.
    pub length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureBendState {
    pub kappa: f64,
    pub kappa_in: f64,
    pub moment: f64,
    pub u_y: f64,
    pub pressure: f64,
}

impl PureBendParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c1 > 0.0 && self.eta_b > 0.0 && self.t_end > 0.0 && self.length > 0.0) {
            return Err(Error::InvalidParameter("pure bending parameters must be positive".into()));
        }
        Ok(())
    }

    /// `τ_b = η_b (c + c₁) / (c c₁)`
    pub fn tau_b(&self) -> f64 {
        self.eta_b * (self.c + self.c1) / (self.c * self.c1)
    }

    /// `κ^in(t) / M_v`
    fn kappa_in_per_rate(&self, t: f64) -> f64 {
        let tb = self.tau_b();
        tb / self.c * ((-t / tb).exp() + t / tb - 1.0)
    }

    /// Moment rate giving `κ(t_end) = κ_end`.
    pub fn moment_rate(&self) -> f64 {
        (self.c + self.c1) * self.kappa_end / (self.t_end + self.c1 * self.kappa_in_per_rate(self.t_end))
    }
}

pub fn pure_bend_solution(p: &PureBendParams, t: f64) -> Result<PureBendState> {
    p.validate()?;
    let mv = p.moment_rate();
    let kappa_in = mv * p.kappa_in_per_rate(t);
    let moment = mv * t;
    let kappa = (moment + p.c1 * kappa_in) / (p.c + p.c1);
    let s = p.length;
    let u_y = if kappa.abs() < 1e-12 { 0.0 } else { -(s - 2.0 / kappa * (0.5 * s * kappa).sin()) };
    let pressure = -((p.c + p.c1) * kappa.powi(3) - p.c1 * kappa * kappa * kappa_in);
    Ok(PureBendState { kappa, kappa_in, moment, u_y, pressure })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereParams {
    pub radius: f64,
    pub mu: f64,
    pub mu1: f64,
    pub c1: f64,
    pub k: f64,
    pub h0: f64,
    pub eta_s: f64,
    pub eta_b: f64,
    pub t_end: f64,
    pub lambda_end: f64,
}

impl SphereParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.eta_s > 0.0 && self.eta_b > 0.0) {
            return Err(Error::InvalidParameter("sphere parameters must be positive".into()));
        }
        stretch_time(self.t_end, self.lambda_end).map(|_| ())
    }

    pub fn tau(&self) -> f64 {
        self.t_end / self.lambda_end.ln()
    }
}

/// Inflation pressure of a spherical shell: incompressible Neo-Hookean +
/// Helfrich elastic branch, Neo-Hookean (K₁ = 0) + Koiter bending Maxwell branch.
pub fn sphere_pressure(p: &SphereParams, t: f64) -> Result<PressureSplit> {
    p.validate()?;
    let tau = p.tau();
    let l = (t / tau).exp();
    let r = p.radius;
    let aev = ahat_ev(p.mu1, p.eta_s, tau, t);
    let bev = bhat_ev(p.c1, p.eta_b, tau, t)?;
    let p_el = 2.0 / r.powi(3)
        * (p.mu * r * r * (1.0 / l - l.powi(-7)) + p.k * (p.h0 * r / (l * l) + p.h0 * p.h0 * r * r / l));
    let p_visc = 2.0 / r.powi(3)
        * (p.mu1 * r * r * (1.0 / l - 1.0 / (l.powi(3) * aev)) + p.c1 * aev * (1.0 / l - bev / (l * l)));
    Ok(PressureSplit { lambda: l, p_el, p_visc, p_total: p_el + p_visc, ahat_ev: aev, bhat_ev: bev })
}

/// `|num − ana| / |ana|`
pub fn relative_error(num: f64, ana: f64) -> Result<f64> {
    if ana == 0.0 {
        return Err(Error::UndefinedError);
    }
    Ok((num - ana).abs() / ana.abs())
}

/// Least-squares slope of `log e` over `log h`.
pub fn convergence_order(h: &[f64], e: &[f64]) -> Result<f64> {
    if h.len() != e.len() || h.len() < 2 {
        return Err(Error::InvalidParameter("need at least two (h, error) pairs".into()));
    }
    if h.iter().chain(e).any(|v| !(*v > 0.0)) {
        return Err(Error::UndefinedError);
    }
    let x: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = e.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    Ok(sxy / sxx)
}
