//! Physical constants and the default dipolar coupling.

/// Vacuum permeability (CODATA 2018), N A^-2.
pub const MU0: f64 = 1.256_637_062_12e-6;

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Electron gyromagnetic ratio magnitude (CODATA 2018), rad s^-1 T^-1.
pub const GAMMA_ELECTRON: f64 = 1.760_859_630_23e11;

/// Cubic micrometres per cubic metre.
pub const UM3_PER_M3: f64 = 1e18;

/// Cubic micrometres per cubic centimetre: `rho[um^-3] = rho[cm^-3] * 1e-12`.
pub const UM3_PER_CM3: f64 = 1e12;

/// Dipolar constant `G = mu0 gamma_T gamma_P hbar / (16 pi)` for an electron
/// target and electron-like (NV) probes, in rad s^-1 um^3.
pub const G_ELECTRON: f64 = 0.081_745_836_714_845_87;

/// Product `rho * T2*` of the measured NV density/coherence relation, cm^-3 s.
pub const RHO_T2_PRODUCT: f64 = 1.98e12;

/// Density window (cm^-3) over which [`RHO_T2_PRODUCT`] was measured.
pub const RHO_WINDOW_CM3: (f64, f64) = (1e16, 1e19);

/// Convert a density in cm^-3 to um^-3.
pub fn cm3_to_um3(rho_cm3: f64) -> f64 {
    rho_cm3 / UM3_PER_CM3
}

pub fn dipolar_constant(gamma_target: f64, gamma_probe: f64) -> f64 {
    MU0 * gamma_target * gamma_probe * HBAR / (16.0 * std::f64::consts::PI) * UM3_PER_M3
}
