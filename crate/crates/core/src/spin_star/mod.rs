//! Ancilla qubit coupled to a probe ensemble through collective flip-flop
//! terms, simulated on the ancilla (x) symmetric Dicke ladder.
//!
//! Basis index `a * (L + 1) + k`: `a = 1` is the excited ancilla
//! (`sigma_z = +1`), `a = 0` the ground state; `k` counts up spins, so the
//! collective `J_z` eigenvalue is `n = k - L/2`.

mod preparation;
mod readout;
mod schedule;

pub use preparation::{prepare_dicke, transfer_time, Preparation};
pub use readout::{
    build_u_read, calibrate_soft_pulse, calibrate_soft_pulse_unchecked, dispersive_hamiltonian, soft_pulse, soft_pulse_unchecked,
    read_target, Readout, SoftPulseCalibration,
};
pub use schedule::{Schedule, ScheduleRow, StageKind, SCHEDULE_CSV_HEADER};

use nalgebra::DMatrix;

use crate::dicke::StateVector;
use crate::error::{Error, Result};
use crate::C64;

/// Minimum hard-pulse Rabi ratio `lambda_d / lambda` for instantaneous pulses.
pub const IDEAL_HARD_RATIO: f64 = 100.0;
/// Minimum detuning in units of `lambda sqrt(L)` for the dispersive regime.
pub const DISPERSIVE_DETUNING: f64 = 20.0;
/// Largest soft-pulse selectivity `lambda_dp / (2 chi)`.
pub const MAX_SELECTIVITY: f64 = 1.0 / 20.0;

#[derive(Debug, Clone, PartialEq)]
pub struct LadderState {
    l: usize,
    amps: Vec<C64>,
}

impl LadderState {
    pub fn new(l: usize, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != 2 * (l + 1) {
            return Err(Error::DimensionMismatch(amps.len(), 2 * (l + 1)));
        }
        Ok(Self { l, amps })
    }

    /// `|a>|D^L_k>_z`.
    pub fn basis(l: usize, a: usize, k: usize) -> Result<Self> {
        if a > 1 || k > l {
            return Err(Error::IndexOutOfRange { k, l });
        }
        let mut amps = vec![C64::new(0.0, 0.0); 2 * (l + 1)];
        amps[index(l, a, k)] = C64::new(1.0, 0.0);
        Ok(Self { l, amps })
    }

    /// `|0>|D^L_0>_z`, all spins down with the ancilla in its ground state.
    pub fn ground(l: usize) -> Self {
        Self::basis(l, 0, 0).expect("valid basis label")
    }

    /// Ancilla in `a` with probe ladder amplitudes `probe`.
    pub fn with_probe(l: usize, a: usize, probe: &[C64]) -> Result<Self> {
        if probe.len() != l + 1 {
            return Err(Error::DimensionMismatch(probe.len(), l + 1));
        }
        let mut amps = vec![C64::new(0.0, 0.0); 2 * (l + 1)];
        amps[a * (l + 1)..(a + 1) * (l + 1)].copy_from_slice(probe);
        Ok(Self { l, amps })
    }

    pub fn num_spins(&self) -> usize {
        self.l
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitude(&self, a: usize, k: usize) -> C64 {
        self.amps[index(self.l, a, k)]
    }

    /// Probe ladder amplitudes conditioned on the ancilla being in `a`.
    pub fn probe(&self, a: usize) -> &[C64] {
        &self.amps[a * (self.l + 1)..(a + 1) * (self.l + 1)]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn overlap(&self, other: &LadderState) -> Result<C64> {
        if self.l != other.l {
            return Err(Error::DimensionMismatch(self.l, other.l));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|<self|other>|^2`, insensitive to global phase.
    pub fn fidelity(&self, other: &LadderState) -> Result<f64> {
        Ok(self.overlap(other)?.norm_sqr())
    }

    pub fn apply(&self, op: &DMatrix<C64>) -> Result<LadderState> {
        if op.ncols() != self.amps.len() {
            return Err(Error::DimensionMismatch(op.ncols(), self.amps.len()));
        }
        let v = op * nalgebra::DVector::from_column_slice(&self.amps);
        Ok(Self {
            l: self.l,
            amps: v.iter().copied().collect(),
        })
    }

    /// Probe part for ancilla `a` spread over the `2^L` computational basis.
    pub fn embed_probe(&self, a: usize) -> Result<StateVector> {
        StateVector::from_symmetric(self.l, self.probe(a))
    }
}

pub(crate) fn index(l: usize, a: usize, k: usize) -> usize {
    a * (l + 1) + k
}

/// Drive and coupling parameters, all in rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StarParams {
    pub omega_a: f64,
    pub omega_p: f64,
    pub lambda: f64,
    pub lambda_d: f64,
    pub lambda_dp: f64,
    pub omega_d: f64,
    pub omega_dp: f64,
}

impl StarParams {
    /// Resonant preparation settings with an ancilla drive of ratio
    /// `lambda_d / lambda`.
    pub fn resonant(omega: f64, lambda: f64, hard_ratio: f64) -> Self {
        Self {
            omega_a: omega,
            omega_p: omega,
            lambda,
            lambda_d: hard_ratio * lambda,
            lambda_dp: 0.0,
            omega_d: omega,
            omega_dp: omega,
        }
    }

    /// Readout settings: ancilla detuned by `detuning`, soft drive on the
    /// `D_{L/2} -> D_{L/2+1}` line with selectivity `lambda_dp / (2 chi)`.
    pub fn dispersive(self, detuning: f64, selectivity: f64) -> Self {
        let omega_a = self.omega_p + detuning;
        let chi = self.lambda * self.lambda / detuning;
        Self {
            omega_a,
            omega_d: omega_a,
            lambda_dp: selectivity * 2.0 * chi,
            omega_dp: self.omega_p + chi,
            ..self
        }
    }

    pub fn hard_ratio(&self) -> f64 {
        self.lambda_d / self.lambda
    }

    /// Dispersive shift `lambda^2 / (omega_A - omega_P)`.
    pub fn chi(&self) -> f64 {
        self.lambda * self.lambda / (self.omega_a - self.omega_p)
    }

    pub fn selectivity(&self) -> f64 {
        self.lambda_dp / (2.0 * self.chi().abs())
    }

    pub fn check_dispersive(&self, l: usize) -> Result<()> {
        let need = DISPERSIVE_DETUNING * self.lambda.abs() * (l as f64).sqrt();
        if (self.omega_a - self.omega_p).abs() < need {
            return Err(Error::Regime(format!(
                "detuning {:.3e} below {DISPERSIVE_DETUNING} lambda sqrt(L) = {need:.3e}",
                (self.omega_a - self.omega_p).abs()
            )));
        }
        Ok(())
    }
}

pub(crate) fn check_even(l: usize) -> Result<()> {
    if l % 2 != 0 || l == 0 {
        return Err(Error::OddQubitCount(l));
    }
    Ok(())
}

/// Collective operators on the `(L+1)`-dimensional ladder.
pub struct Collective {
    pub jz: DMatrix<C64>,
    pub jplus: DMatrix<C64>,
    pub jminus: DMatrix<C64>,
}

impl Collective {
    pub fn new(l: usize) -> Self {
        let d = l + 1;
        let jz = DMatrix::from_fn(d, d, |i, j| {
            if i == j {
                C64::new(i as f64 - l as f64 / 2.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        // J+ |k> = sqrt((k+1)(L-k)) |k+1>
        let jplus = DMatrix::from_fn(d, d, |i, j| {
            if i == j + 1 {
                C64::new(((j + 1) as f64 * (l - j) as f64).sqrt(), 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let jminus = jplus.adjoint();
        Self { jz, jplus, jminus }
    }

    pub fn jx(&self) -> DMatrix<C64> {
        (&self.jplus + &self.jminus) * C64::new(0.5, 0.0)
    }

    pub fn jy(&self) -> DMatrix<C64> {
        (&self.jplus - &self.jminus) * C64::new(0.0, -0.5)
    }
}

/// Ancilla operators in the `(a = 0, a = 1)` ordering.
pub(crate) fn ancilla_z() -> DMatrix<C64> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![C64::new(-1.0, 0.0), C64::new(1.0, 0.0)]))
}

/// `sigma_+ = |1><0|`.
pub(crate) fn ancilla_plus() -> DMatrix<C64> {
    let mut m = DMatrix::zeros(2, 2);
    m[(1, 0)] = C64::new(1.0, 0.0);
    m
}

/// `sigma_y` with `sigma_y |0> = -i |1>` for the ground state `|0>`.
pub(crate) fn ancilla_y() -> DMatrix<C64> {
    let p = ancilla_plus();
    (&p * C64::new(0.0, -1.0)) + p.adjoint() * C64::new(0.0, 1.0)
}

pub(crate) fn on_probe(op: &DMatrix<C64>) -> DMatrix<C64> {
    DMatrix::<C64>::identity(2, 2).kronecker(op)
}

pub(crate) fn on_ancilla(l: usize, op: &DMatrix<C64>) -> DMatrix<C64> {
    op.kronecker(&DMatrix::<C64>::identity(l + 1, l + 1))
}

/// Flip-flop term `lambda (sigma_+ J_- + sigma_- J_+)`.
pub fn flip_flop(l: usize, lambda: f64) -> DMatrix<C64> {
    let c = Collective::new(l);
    let sp = ancilla_plus();
    let term = sp.kronecker(&c.jminus) + sp.adjoint().kronecker(&c.jplus);
    term * C64::new(lambda, 0.0)
}

/// Lab-frame spin-star Hamiltonian
/// `omega_P J_z + omega_A sigma_z / 2 + lambda (sigma_+ J_- + sigma_- J_+)`.
/// With `resonant` the ancilla frequency is set to `omega_P`.
pub fn star_hamiltonian(l: usize, p: &StarParams, resonant: bool) -> Result<DMatrix<C64>> {
    check_even(l)?;
    let omega_a = if resonant { p.omega_p } else { p.omega_a };
    let c = Collective::new(l);
    let h = on_probe(&c.jz) * C64::new(p.omega_p, 0.0)
        + on_ancilla(l, &ancilla_z()) * C64::new(omega_a / 2.0, 0.0)
        + flip_flop(l, p.lambda);
    Ok(h)
}

/// `exp(-i H t)` for Hermitian `H` via its eigendecomposition.
pub fn evolve(h: &DMatrix<C64>, t: f64) -> DMatrix<C64> {
    let eig = h.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let phases = nalgebra::DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&e| C64::from_polar(1.0, -e * t)),
    );
    v * DMatrix::from_diagonal(&phases) * v.adjoint()
}

/// Collective rotation `exp(-i pi J_y / 2)` acting on the probe.
pub fn probe_rotation(l: usize) -> DMatrix<C64> {
    on_probe(&evolve(&Collective::new(l).jy(), std::f64::consts::FRAC_PI_2))
}

/// Ancilla flip `exp(-i pi sigma_y / 2)`.
pub fn ancilla_pi(l: usize) -> DMatrix<C64> {
    on_ancilla(l, &evolve(&ancilla_y(), std::f64::consts::FRAC_PI_2))
}

/// Ladder amplitudes of `|D^L_k>_x` (k spins in `|+>`), from the collective
/// rotation identity `exp(-i pi J_y / 2) |D_k>_z = (-1)^{L-k} |D_k>_x`.
pub fn dicke_x_ladder(l: usize, k: usize) -> Result<Vec<C64>> {
    if k > l {
        return Err(Error::IndexOutOfRange { k, l });
    }
    let r = evolve(&Collective::new(l).jy(), std::f64::consts::FRAC_PI_2);
    let sign = if (l - k) % 2 == 0 { 1.0 } else { -1.0 };
    Ok(r.column(k).iter().map(|z| z * sign).collect())
}

#[cfg(test)]
pub(crate) fn max_antihermitian(h: &DMatrix<C64>) -> f64 {
    (h - h.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}
