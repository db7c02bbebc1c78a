use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

use nalgebra::DMatrix;

use super::preparation::{push_rotation, transfer_sequence};
use super::{
    check_even, dicke_x_ladder, evolve, index, on_probe, probe_rotation, Collective, LadderState,
    Schedule, ScheduleRow, StageKind, StarParams, MAX_SELECTIVITY,
};
use crate::dicke::{overlap, read_state};
use crate::error::{Error, Result};
use crate::optimize::minimize_scalar;
use crate::C64;

/// Largest `L` for which fidelities are taken against the `2^L` readout state.
pub const EMBEDDED_TARGET_MAX_L: usize = 10;

/// Dispersive Hamiltonian
/// `omega_P J_z + omega_A sigma_z / 2 - chi sigma_z J_z^2`, diagonal in the ladder.
pub fn dispersive_hamiltonian(l: usize, p: &StarParams) -> Result<DMatrix<C64>> {
    check_even(l)?;
    p.check_dispersive(l)?;
    let chi = p.chi();
    let dim = 2 * (l + 1);
    let mut h = DMatrix::zeros(dim, dim);
    for a in 0..2 {
        let sz = if a == 1 { 1.0 } else { -1.0 };
        for k in 0..=l {
            let n = k as f64 - l as f64 / 2.0;
            h[(index(l, a, k), index(l, a, k))] =
                C64::new(p.omega_p * n + p.omega_a / 2.0 * sz - chi * sz * n * n, 0.0);
        }
    }
    Ok(h)
}

/// Soft-pulse generator in the frame rotating at the drive frequency
/// `omega_dp` (probe) and `omega_A` (ancilla), under the rotating-wave
/// approximation: `(omega_P - omega_dp) J_z - chi sigma_z J_z^2
/// + (lambda_dp / 2)(J_x cos phase + J_y sin phase)`.
fn soft_generator(l: usize, p: &StarParams, phase: f64) -> DMatrix<C64> {
    let c = Collective::new(l);
    let chi = p.chi();
    let dim = 2 * (l + 1);
    let mut h = DMatrix::zeros(dim, dim);
    for a in 0..2 {
        let sz = if a == 1 { 1.0 } else { -1.0 };
        for k in 0..=l {
            let n = k as f64 - l as f64 / 2.0;
            h[(index(l, a, k), index(l, a, k))] = C64::new((p.omega_p - p.omega_dp) * n - chi * sz * n * n, 0.0);
        }
    }
    let drive = &c.jplus * C64::from_polar(p.lambda_dp / 4.0, -phase)
        + &c.jminus * C64::from_polar(p.lambda_dp / 4.0, phase);
    h + on_probe(&drive)
}

/// Soft pulse without the regime checks, for parameter studies.
pub fn soft_pulse_unchecked(state: &LadderState, p: &StarParams, duration: f64, phase: f64) -> Result<LadderState> {
    if duration == 0.0 {
        return Ok(state.clone());
    }
    let l = state.num_spins();
    state.apply(&evolve(&soft_generator(l, p, phase), duration))
}

/// Selective drive of the `D_{L/2} -> D_{L/2+1}` line.
pub fn soft_pulse(state: &LadderState, p: &StarParams, duration: f64, phase: f64) -> Result<LadderState> {
    check_soft(state.num_spins(), p)?;
    soft_pulse_unchecked(state, p, duration, phase)
}

fn check_soft(l: usize, p: &StarParams) -> Result<()> {
    p.check_dispersive(l)?;
    if !(p.lambda_dp > 0.0) {
        return Err(Error::Regime("soft pulse needs lambda_dp > 0".into()));
    }
    let sel = p.selectivity();
    if sel > MAX_SELECTIVITY {
        return Err(Error::Regime(format!(
            "selectivity lambda_dp / (2 chi) = {sel:.3e} exceeds {MAX_SELECTIVITY}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SoftPulseCalibration {
    pub duration: f64,
    pub phase: f64,
    /// Overlap with `(|D_{L/2}> - i |D_{L/2+1}>)_z / sqrt 2` after the pulse.
    pub fidelity: f64,
    /// Population left outside the two target levels.
    pub leakage: f64,
}

/// Intermediate state whose collective rotation is `|0>|Read>` up to a global
/// phase. The rotation flips the sign of odd-`(L - k)` ladder components, so
/// the `+i` of the readout state appears here as `-i`.
fn soft_target(l: usize) -> Result<LadderState> {
    let mut probe = vec![C64::new(0.0, 0.0); l + 1];
    probe[l / 2] = C64::new(FRAC_1_SQRT_2, 0.0);
    probe[l / 2 + 1] = C64::new(0.0, -FRAC_1_SQRT_2);
    LadderState::with_probe(l, 0, &probe)
}

/// Tunes duration and drive phase of the soft pi/2 pulse acting on
/// `|0>|D_{L/2}>_z`, without regime checks.
pub fn calibrate_soft_pulse_unchecked(l: usize, p: &StarParams) -> Result<SoftPulseCalibration> {
    check_even(l)?;
    let k = l / 2;
    let omega = p.lambda_dp / 2.0 * (((k + 1) * (l - k)) as f64).sqrt();
    if !(omega > 0.0) {
        return Err(Error::Regime("soft pulse needs lambda_dp > 0".into()));
    }
    let bare = FRAC_PI_2 / omega;
    let start = LadderState::basis(l, 0, k)?;
    let target = soft_target(l)?;
    let mut phase = 0.0;
    let mut duration = bare;
    for _ in 0..3 {
        let infidelity = |t: f64| {
            soft_pulse_unchecked(&start, p, t, phase)
                .and_then(|s| target.fidelity(&s))
                .map(|f| 1.0 - f)
                .unwrap_or(f64::NAN)
        };
        duration = minimize_scalar(infidelity, 0.7 * bare, 1.3 * bare, 1e-10 * bare)?.x;
        let out = soft_pulse_unchecked(&start, p, duration, phase)?;
        let rel = (out.amplitude(0, k + 1) / out.amplitude(0, k)).arg();
        phase += rel + FRAC_PI_2;
    }
    let out = soft_pulse_unchecked(&start, p, duration, phase)?;
    let kept = out.amplitude(0, k).norm_sqr() + out.amplitude(0, k + 1).norm_sqr();
    Ok(SoftPulseCalibration {
        duration,
        phase,
        fidelity: target.fidelity(&out)?,
        leakage: 1.0 - kept,
    })
}

pub fn calibrate_soft_pulse(l: usize, p: &StarParams) -> Result<SoftPulseCalibration> {
    check_soft(l, p)?;
    calibrate_soft_pulse_unchecked(l, p)
}

/// `|0> (|D_{L/2}>_x + i |D_{L/2+1}>_x) / sqrt 2` on the ladder.
pub fn read_target(l: usize) -> Result<LadderState> {
    let a = dicke_x_ladder(l, l / 2)?;
    let b = dicke_x_ladder(l, l / 2 + 1)?;
    let probe: Vec<C64> = a
        .iter()
        .zip(&b)
        .map(|(x, y)| (x + C64::i() * y) * FRAC_1_SQRT_2)
        .collect();
    LadderState::with_probe(l, 0, &probe)
}

#[derive(Debug, Clone)]
pub struct Readout {
    pub unitary: DMatrix<C64>,
    /// `|<0, Read| U_Read |0, D_0>|^2`.
    pub fidelity: f64,
    /// Present when the soft pulse was simulated rather than idealized.
    pub calibration: Option<SoftPulseCalibration>,
    pub schedule: Schedule,
}

/// Exact pi/2 rotation within `{|0, D_{L/2}>, |0, D_{L/2+1}>}`.
fn ideal_soft_pulse(l: usize) -> DMatrix<C64> {
    let dim = 2 * (l + 1);
    let (a, b) = (index(l, 0, l / 2), index(l, 0, l / 2 + 1));
    let mut g = DMatrix::zeros(dim, dim);
    g[(a, b)] = C64::new(1.0, 0.0);
    g[(b, a)] = C64::new(1.0, 0.0);
    evolve(&g, FRAC_PI_4)
}

/// Composes transfers, soft pulse and collective rotation into `U_Read`.
/// `p` holds the readout (detuned) ancilla frequency; the preparation stages
/// run with the ancilla retuned to resonance.
pub fn build_u_read(l: usize, p: &StarParams, ideal: bool) -> Result<Readout> {
    check_even(l)?;
    let resonant = StarParams {
        omega_a: p.omega_p,
        omega_d: p.omega_p,
        ..*p
    };
    let (u_transfer, mut schedule) = transfer_sequence(l, &resonant, ideal)?;
    let (u_pulse, calibration, duration) = if ideal {
        (ideal_soft_pulse(l), None, 0.0)
    } else {
        let cal = calibrate_soft_pulse(l, p)?;
        (evolve(&soft_generator(l, p, cal.phase), cal.duration), Some(cal), cal.duration)
    };
    schedule.push(ScheduleRow {
        stage: schedule.len(),
        kind: StageKind::SoftPulse,
        duration_s: duration,
        frequency_rad_s: p.omega_dp,
        amplitude_rad_s: p.lambda_dp,
    });
    push_rotation(&mut schedule, p);
    let unitary = probe_rotation(l) * u_pulse * u_transfer;
    let out = LadderState::ground(l).apply(&unitary)?;
    let fidelity = if l <= EMBEDDED_TARGET_MAX_L {
        overlap(&read_state(l)?, &out.embed_probe(0)?)?.norm_sqr()
    } else {
        read_target(l)?.fidelity(&out)?
    };
    Ok(Readout {
        unitary,
        fidelity,
        calibration,
        schedule,
    })
}
