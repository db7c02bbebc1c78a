//! Large-`L` closed forms: the measurement probability to first order in the
//! field, the sensitivity and detection-time formulas for each probe strategy,
//! and the empirical density/T2* relation.

use std::f64::consts::PI;

use crate::bessel::{i0, i1};
use crate::constants::{cm3_to_um3, RHO_T2_PRODUCT, RHO_WINDOW_CM3};
use crate::error::{Error, Result, Warned, Warning};
use crate::field::{spin_count, Geometry};
use crate::optimize::ProbeOptima;

/// `sqrt(2) e^{1/4}`, the entangled-state prefactor of the separable and GHZ
/// baselines.
pub fn ghz_factor() -> f64 {
    2f64.sqrt() * 0.25f64.exp()
}

/// Linearization threshold on `|sum omega| t`.
pub const LINEAR_PHASE_LIMIT: f64 = 0.1;

fn bessel_pair(u: f64) -> Result<(f64, f64)> {
    let x = 0.25 * u * u;
    Ok((i0(x)?, i1(x)?))
}

/// Sensitivity prefactor `F(u)`.
pub fn big_f(u: f64) -> Result<f64> {
    if !(u > 0.0) {
        return Err(Error::Domain(format!("F(u) needs u > 0, got {u}")));
    }
    let (a, b) = bessel_pair(u)?;
    let s = a * (a + b);
    let num = 2.0 * (2.0 * s * (1.0 - (-0.5 * u * u).exp() * s / 2.0)).sqrt();
    let den = u.sqrt() * (-0.25 * u * u).exp() * (a - b).powi(2);
    Ok(num / den)
}

/// Field-free part of `p`: `e^{-u^2/2} I0 (I0 + I1) / 2`.
pub fn p_zero_field(u: f64) -> Result<f64> {
    if !(u >= 0.0) {
        return Err(Error::Domain(format!("u = {u} must be nonnegative")));
    }
    let (a, b) = bessel_pair(u)?;
    Ok((-0.5 * u * u).exp() * a * (a + b) / 2.0)
}

/// Coefficient of `sum omega` in `p`:
/// `T2 / (2 sqrt(L)) u e^{-u^2/2} (I0 - I1)^2 / 2`.
pub fn p_field_slope(u: f64, t2: f64, l: f64) -> Result<f64> {
    if !(u >= 0.0) || !(t2 > 0.0) || !(l > 0.0) {
        return Err(Error::Domain(format!("need u >= 0, T2 > 0, L > 0; got {u}, {t2}, {l}")));
    }
    let (a, b) = bessel_pair(u)?;
    Ok(t2 / (2.0 * l.sqrt()) * u * (-0.5 * u * u).exp() * 0.5 * (a - b).powi(2))
}

/// Asymptotic `p` at rescaled time `u` for `l` probes with total field `sum_omega`.
pub fn p_asymptotic_at(u: f64, t2: f64, l: f64, sum_omega: f64) -> Result<Warned<f64>> {
    let value = p_zero_field(u)? + p_field_slope(u, t2, l)? * sum_omega;
    let phase = (sum_omega * u * t2 / l.sqrt()).abs();
    let mut out = Warned::clean(value);
    if phase > LINEAR_PHASE_LIMIT {
        out.warnings.push(Warning::Linearization { phase });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Dicke,
    Separable,
    GhzBaseline,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Dicke => "dicke",
            Strategy::Separable => "separable",
            Strategy::GhzBaseline => "ghz-baseline",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategyResult {
    pub strategy: Strategy,
    pub delta_s_min: f64,
    /// Total time at which the minimal uncertainty reaches one.
    pub t_s: f64,
}

/// Inputs shared by the sensitivity formulas. Units: `g` in rad s^-1 um^3,
/// times in s, `rho_cm3` in cm^-3, geometry in um.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityParams {
    pub g: f64,
    pub s: f64,
    pub t2: f64,
    pub rho_cm3: f64,
    pub total_time: f64,
    pub geom: Geometry,
    pub u: f64,
}

impl SensitivityParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("G", self.g),
            ("T2", self.t2),
            ("rho", self.rho_cm3),
            ("T", self.total_time),
            ("u", self.u),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Domain(format!("{name} = {v} must be positive and finite")));
            }
        }
        if self.s == 0.0 || !self.s.is_finite() {
            return Err(Error::Domain(format!("s = {} must be nonzero", self.s)));
        }
        Ok(())
    }

    /// Same parameters with `T2` replaced by the density relation.
    pub fn with_material_t2(self) -> Result<Warned<Self>> {
        let t2 = t2_from_rho(self.rho_cm3)?;
        Ok(Warned {
            value: Self { t2: t2.value, ..self },
            warnings: t2.warnings,
        })
    }

    pub fn rho_um3(&self) -> f64 {
        cm3_to_um3(self.rho_cm3)
    }

    pub fn spin_count(&self) -> u64 {
        spin_count(&self.geom, self.rho_cm3)
    }

    /// `t = u T2 / sqrt(L)`.
    pub fn interaction_time(&self) -> f64 {
        self.u * self.t2 / (self.spin_count().max(1) as f64).sqrt()
    }

    /// `N ~ T / t`.
    pub fn repetitions(&self) -> f64 {
        self.total_time / self.interaction_time()
    }
}

/// `delta s = F(u) / sqrt(T T2) L^{1/4} / |sum d omega / ds|`.
pub fn delta_s_dicke(params: &SensitivityParams, sum_domega_ds: f64) -> Result<f64> {
    params.validate()?;
    let l = params.spin_count() as f64;
    Ok(big_f(params.u)? / (params.total_time * params.t2).sqrt() * l.powf(0.25)
        / sum_domega_ds.abs())
}

/// `c / (4 G pi^{3/4} sqrt(T T2)) z^{3/4} / rho^{3/4}` for a prefactor `c`.
fn dicke_scaling(params: &SensitivityParams, prefactor: f64) -> f64 {
    prefactor / (4.0 * params.g * PI.powf(0.75) * (params.total_time * params.t2).sqrt())
        * (params.geom.z_min() / params.rho_um3()).powf(0.75)
}

/// Minimal Dicke-probe uncertainty at the optimal time and column shape.
pub fn delta_s_dicke_min(params: &SensitivityParams, opt: &ProbeOptima) -> Result<StrategyResult> {
    params.validate()?;
    let c = opt.f_u_min() * opt.f_min();
    Ok(StrategyResult {
        strategy: Strategy::Dicke,
        delta_s_min: dicke_scaling(params, c),
        t_s: ts_from_dicke_prefactor(params, c),
    })
}

/// Dicke formula with `F(u_min)` replaced by `sqrt(2) e^{1/4}`.
pub fn delta_s_ghz_baseline(params: &SensitivityParams, opt: &ProbeOptima) -> Result<StrategyResult> {
    params.validate()?;
    let c = ghz_factor() * opt.f_min();
    Ok(StrategyResult {
        strategy: Strategy::GhzBaseline,
        delta_s_min: dicke_scaling(params, c),
        t_s: ts_from_dicke_prefactor(params, c),
    })
}

/// Separable probes: `sqrt(2) e^{1/4} g_min / (4 G sqrt(pi) sqrt(T T2)) z^{3/2} / sqrt(rho)`.
pub fn delta_s_sep_min(params: &SensitivityParams, opt: &ProbeOptima) -> Result<StrategyResult> {
    params.validate()?;
    let c = ghz_factor() * opt.g_min();
    let delta = c / (4.0 * params.g * PI.sqrt() * (params.total_time * params.t2).sqrt())
        * params.geom.z_min().powf(1.5)
        / params.rho_um3().sqrt();
    Ok(StrategyResult {
        strategy: Strategy::Separable,
        delta_s_min: delta,
        t_s: ts_sep(params, opt)?,
    })
}

fn ts_from_dicke_prefactor(params: &SensitivityParams, c: f64) -> f64 {
    c * c / (16.0 * params.g * params.g * PI.powf(1.5)) * params.geom.z_min().powf(1.5)
        / (params.t2 * params.rho_um3().powf(1.5))
}

/// `T_s = (F(u_min) f_min)^2 / (16 G^2 pi^{3/2}) z^{3/2} / (T2 rho^{3/2})`.
pub fn ts_dicke(params: &SensitivityParams, opt: &ProbeOptima) -> Result<f64> {
    params.validate()?;
    Ok(ts_from_dicke_prefactor(params, opt.f_u_min() * opt.f_min()))
}

/// `T_s = (sqrt(2) e^{1/4} g_min)^2 / (16 G^2 pi) z^3 / (T2 rho)`.
pub fn ts_sep(params: &SensitivityParams, opt: &ProbeOptima) -> Result<f64> {
    params.validate()?;
    let c = ghz_factor() * opt.g_min();
    Ok(c * c / (16.0 * params.g * params.g * PI) * params.geom.z_min().powi(3)
        / (params.t2 * params.rho_um3()))
}

fn window_check(rho_cm3: f64) -> Vec<Warning> {
    if rho_cm3 < RHO_WINDOW_CM3.0 || rho_cm3 > RHO_WINDOW_CM3.1 {
        vec![Warning::OutsideDensityWindow { rho_cm3 }]
    } else {
        Vec::new()
    }
}

/// Probe density implied by a dephasing time, `rho = 1.98e12 cm^-3 s / T2`.
pub fn rho_from_t2(t2: f64) -> Result<Warned<f64>> {
    if !(t2 > 0.0) {
        return Err(Error::Domain(format!("T2 = {t2} must be positive")));
    }
    let rho = RHO_T2_PRODUCT / t2;
    Ok(Warned {
        value: rho,
        warnings: window_check(rho),
    })
}

/// Dephasing time implied by a probe density.
pub fn t2_from_rho(rho_cm3: f64) -> Result<Warned<f64>> {
    if !(rho_cm3 > 0.0) {
        return Err(Error::Domain(format!("rho = {rho_cm3} must be positive")));
    }
    Ok(Warned {
        value: RHO_T2_PRODUCT / rho_cm3,
        warnings: window_check(rho_cm3),
    })
}
