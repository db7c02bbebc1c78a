use std::f64::consts::PI;

use nalgebra::DMatrix;

use super::{
    ancilla_pi, ancilla_y, check_even, dicke_x_ladder, evolve, flip_flop, probe_rotation,
    LadderState, Schedule, ScheduleRow, StageKind, StarParams, IDEAL_HARD_RATIO,
};
use crate::error::{Error, Result};
use crate::C64;

/// Resonant time that moves the ancilla excitation `|1, k>` fully into
/// `|0, k + 1>`: half a Rabi period of the block coupling
/// `lambda sqrt((k + 1)(L - k))`.
pub fn transfer_time(k: usize, l: usize, lambda: f64) -> Result<f64> {
    if k >= l / 2 {
        return Err(Error::IndexOutOfRange { k, l });
    }
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("lambda = {lambda} must be positive")));
    }
    Ok(PI / (2.0 * lambda * (((k + 1) * (l - k)) as f64).sqrt()))
}

#[derive(Debug, Clone)]
pub struct Preparation {
    /// State after the transfers, before the collective rotation.
    pub z_state: LadderState,
    /// Final state.
    pub state: LadderState,
    /// `|<0, D_{L/2}|_z z_state>|^2`.
    pub fidelity_z: f64,
    /// `|<0, D_{L/2}|_x state>|^2`.
    pub fidelity_x: f64,
    pub schedule: Schedule,
    /// Product of all stage unitaries.
    pub unitary: DMatrix<C64>,
}

/// Ancilla pi pulse. Ideal pulses are instantaneous; otherwise a square pulse
/// of Rabi frequency `lambda_d` runs for `pi / lambda_d` with the flip-flop
/// coupling left on.
fn ancilla_pulse(l: usize, p: &StarParams, ideal: bool) -> DMatrix<C64> {
    if ideal {
        return ancilla_pi(l);
    }
    let drive = super::on_ancilla(l, &ancilla_y()) * C64::new(p.lambda_d / 2.0, 0.0);
    evolve(&(drive + flip_flop(l, p.lambda)), PI / p.lambda_d)
}

fn check_params(p: &StarParams, ideal: bool) -> Result<()> {
    if !(p.lambda > 0.0) {
        return Err(Error::Regime(format!("lambda = {} must be positive", p.lambda)));
    }
    let ratio = p.hard_ratio();
    if ideal && !(ratio >= IDEAL_HARD_RATIO) {
        return Err(Error::Regime(format!(
            "instantaneous pulses need lambda_d / lambda >= {IDEAL_HARD_RATIO}, got {ratio}"
        )));
    }
    if !ideal && !(ratio > 1.0) {
        return Err(Error::Regime(format!("hard pulses need lambda_d > lambda, got ratio {ratio}")));
    }
    if (p.omega_a - p.omega_p).abs() > 1e-12 * p.omega_p.abs().max(1.0) {
        return Err(Error::Regime("preparation runs with the ancilla on resonance".into()));
    }
    Ok(())
}

/// Transfers `L/2` ancilla excitations into the probe ladder, then rotates
/// the probe by `exp(-i pi J_y / 2)`. Evolution is in the frame rotating at
/// the common resonance frequency.
pub(crate) fn transfer_sequence(l: usize, p: &StarParams, ideal: bool) -> Result<(DMatrix<C64>, Schedule)> {
    check_even(l)?;
    check_params(p, ideal)?;
    let dim = 2 * (l + 1);
    let hop = flip_flop(l, p.lambda);
    let mut u = DMatrix::<C64>::identity(dim, dim);
    let mut schedule = Schedule::default();
    let pulse = ancilla_pulse(l, p, ideal);
    for k in 0..l / 2 {
        u = &pulse * u;
        schedule.push(ScheduleRow {
            stage: schedule.len(),
            kind: StageKind::AncillaPi,
            duration_s: if ideal { 0.0 } else { PI / p.lambda_d },
            frequency_rad_s: p.omega_d,
            amplitude_rad_s: p.lambda_d,
        });
        let t = transfer_time(k, l, p.lambda)?;
        u = evolve(&hop, t) * u;
        schedule.push(ScheduleRow {
            stage: schedule.len(),
            kind: StageKind::FlipFlop,
            duration_s: t,
            frequency_rad_s: p.omega_a,
            amplitude_rad_s: p.lambda,
        });
    }
    Ok((u, schedule))
}

pub(crate) fn push_rotation(schedule: &mut Schedule, p: &StarParams) {
    schedule.push(ScheduleRow {
        stage: schedule.len(),
        kind: StageKind::ProbeRotation,
        duration_s: 0.0,
        frequency_rad_s: p.omega_p,
        amplitude_rad_s: p.lambda_dp,
    });
}

/// Runs the preparation sequence from `|0>|D_0>_z`.
pub fn prepare_dicke(l: usize, p: &StarParams, ideal_pulses: bool) -> Result<Preparation> {
    let (u_transfer, mut schedule) = transfer_sequence(l, p, ideal_pulses)?;
    let ground = LadderState::ground(l);
    let z_state = ground.apply(&u_transfer)?;
    let rot = probe_rotation(l);
    let state = z_state.apply(&rot)?;
    push_rotation(&mut schedule, p);
    let target_z = LadderState::basis(l, 0, l / 2)?;
    let target_x = LadderState::with_probe(l, 0, &dicke_x_ladder(l, l / 2)?)?;
    Ok(Preparation {
        fidelity_z: target_z.fidelity(&z_state)?,
        fidelity_x: target_x.fidelity(&state)?,
        z_state,
        state,
        schedule,
        unitary: rot * u_transfer,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dicke::{dicke_x, overlap};

    #[test]
    fn transfer_times() {
        let lam = 1.3;
        assert!((transfer_time(0, 2, lam).unwrap() - PI / (2.0 * 2f64.sqrt() * lam)).abs() < 1e-15);
        assert!((transfer_time(1, 4, lam).unwrap() - PI / (2.0 * 6f64.sqrt() * lam)).abs() < 1e-15);
        for l in [4usize, 8, 12] {
            for k in 0..l / 2 {
                let mirror = l - 1 - k;
                let direct = PI / (2.0 * lam * (((mirror + 1) * (l - mirror)) as f64).sqrt());
                assert!((transfer_time(k, l, lam).unwrap() - direct).abs() < 1e-15);
            }
        }
        assert!(transfer_time(2, 4, lam).is_err());
    }

    #[test]
    fn ideal_preparation() {
        let p = StarParams::resonant(10.0, 1.0, 100.0);
        for l in [2usize, 4, 8, 16, 64] {
            let prep = prepare_dicke(l, &p, true).unwrap();
            assert!(prep.fidelity_z >= 1.0 - 1e-9, "L={l}: {}", prep.fidelity_z);
            assert!(prep.fidelity_x >= 1.0 - 1e-9);
            assert!((prep.state.norm() - 1.0).abs() < 1e-10);
            assert_eq!(prep.schedule.len(), l + 1);
            let count = |k: StageKind| prep.schedule.rows().iter().filter(|r| r.kind == k).count();
            assert_eq!(count(StageKind::AncillaPi), l / 2);
            assert_eq!(count(StageKind::FlipFlop), l / 2);
            assert_eq!(count(StageKind::ProbeRotation), 1);
        }
    }

    #[test]
    fn prepared_state_matches_full_basis_dicke_state() {
        let p = StarParams::resonant(10.0, 1.0, 100.0);
        for l in [2usize, 4, 6, 8, 10] {
            let prep = prepare_dicke(l, &p, true).unwrap();
            let embedded = prep.state.embed_probe(0).unwrap();
            let ov = overlap(&dicke_x(l, l / 2).unwrap(), &embedded).unwrap();
            assert!(ov.norm_sqr() >= 1.0 - 1e-9);
        }
    }

    #[test]
    fn finite_pulses_improve_with_ratio() {
        let l = 8;
        let fid = |ratio: f64| {
            prepare_dicke(l, &StarParams::resonant(10.0, 1.0, ratio), false)
                .unwrap()
                .fidelity_x
        };
        let f: Vec<f64> = [10.0, 30.0, 100.0, 300.0, 1000.0].iter().map(|&r| fid(r)).collect();
        assert!(f.windows(2).all(|w| w[0] < w[1]), "{f:?}");
        // Regression of the square-pulse model at ratio 100.
        assert!((f[2] - 0.926).abs() < 0.005, "{}", f[2]);
        assert!(f[4] >= 0.99);
    }

    #[test]
    fn regime_checks() {
        let p = StarParams::resonant(10.0, 1.0, 50.0);
        assert!(matches!(prepare_dicke(4, &p, true), Err(Error::Regime(_))));
        assert!(prepare_dicke(4, &p, false).is_ok());
        assert!(prepare_dicke(4, &StarParams::resonant(10.0, 1.0, 0.5), false).is_err());
        assert!(prepare_dicke(5, &StarParams::resonant(10.0, 1.0, 100.0), true).is_err());
        let detuned = StarParams { omega_a: 11.0, ..StarParams::resonant(10.0, 1.0, 100.0) };
        assert!(prepare_dicke(4, &detuned, true).is_err());
    }
}
