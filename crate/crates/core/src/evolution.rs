//! Exact measurement probability under time-quadratic dephasing.
//!
//! The probe starts in `|D^L_{L/2}>_x`, each spin precesses in its own static
//! field `omega_n` and dephases with `exp(-(t/T2)^2)` per flipped bit. The
//! readout projects onto `(|D_{L/2}> + i |D_{L/2+1}>)_x / sqrt 2`.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::dicke::{dicke_x_with_cap, StateVector};
use crate::error::{Error, Result};
use crate::field::SpinLattice;
use crate::C64;

/// Default ceiling on `L` for [`exact_p`].
pub const DEFAULT_EXACT_CAP: usize = 13;
/// Largest `L` handled by the dense integrator.
pub const DENSE_INTEGRATOR_MAX_L: usize = 6;
/// Largest `L` for the pairwise double sum.
pub const PAIRWISE_MAX_L: usize = 8;
/// Tolerance of the step-doubling check in [`integrate_master_equation`].
pub const RICHARDSON_TOL: f64 = 1e-8;
/// Relative step for the field derivative.
pub const FD_STEP: f64 = 1e-4;
/// Derivatives below this are treated as no signal.
pub const MIN_SLOPE: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq)]
pub struct DephasingChannel {
    t2: f64,
    t: f64,
    fields: Vec<f64>,
}

impl DephasingChannel {
    pub fn new(t2: f64, t: f64, fields: Vec<f64>) -> Result<Self> {
        if !(t2 > 0.0) || !t2.is_finite() {
            return Err(Error::Domain(format!("T2 = {t2} must be positive")));
        }
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!("t = {t} must be nonnegative")));
        }
        if fields.iter().any(|w| !w.is_finite()) {
            return Err(Error::Domain("fields must be finite".into()));
        }
        Ok(Self { t2, t, fields })
    }

    /// Fields `s * omega_j / s` of a lattice.
    pub fn from_lattice(lat: &SpinLattice, s: f64, t2: f64, t: f64) -> Result<Self> {
        Self::new(t2, t, lat.fields(s))
    }

    pub fn t2(&self) -> f64 {
        self.t2
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn fields(&self) -> &[f64] {
        &self.fields
    }

    pub fn num_spins(&self) -> usize {
        self.fields.len()
    }

    /// Off-diagonal damping per differing bit, `exp(-(t/T2)^2)`.
    pub fn gamma(&self) -> f64 {
        (-(self.t / self.t2).powi(2)).exp()
    }

    /// `exp(i t/2 sum_n omega_n (-1)^{m_n})` for every bitstring.
    fn phases(&self) -> Vec<C64> {
        let l = self.fields.len();
        (0..1usize << l)
            .map(|m| C64::from_polar(1.0, self.phase_angle(m)))
            .collect()
    }

    fn phase_angle(&self, m: usize) -> f64 {
        self.t * self.energy(m)
    }

    /// Eigenvalue `sum_n omega_n (-1)^{m_n} / 2` of the precession Hamiltonian.
    fn energy(&self, m: usize) -> f64 {
        let mut acc = 0.0;
        for (n, w) in self.fields.iter().enumerate() {
            if m >> n & 1 == 0 {
                acc += w;
            } else {
                acc -= w;
            }
        }
        0.5 * acc
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilityTerms {
    pub term_dd: f64,
    pub term_d1d1: f64,
    pub term_cross: f64,
    pub p: f64,
}

/// `rho_{m m'}(t)` evolved from the pure state `init`.
pub fn rho_element(m: usize, m_prime: usize, ch: &DephasingChannel, init: &StateVector) -> Result<C64> {
    let l = ch.num_spins();
    if init.num_qubits() != l {
        return Err(Error::DimensionMismatch(init.num_qubits(), l));
    }
    let dim = 1usize << l;
    if m >= dim || m_prime >= dim {
        return Err(Error::DimensionMismatch(m.max(m_prime), dim));
    }
    let phase = C64::from_polar(1.0, ch.phase_angle(m) - ch.phase_angle(m_prime));
    let damping = ch.gamma().powi((m ^ m_prime).count_ones() as i32);
    Ok(init.amplitude(m) * init.amplitude(m_prime).conj() * phase * damping)
}

/// Applies `K = (x)_n [[1, g], [g, 1]]` in place, the matrix of
/// `g^{Hamming(m, m')}`.
fn apply_hamming_kernel(v: &mut [C64], g: f64) {
    let mut half = 1;
    while half < v.len() {
        for block in v.chunks_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y * g;
                *b = x * g + y;
            }
        }
        half *= 2;
    }
}

/// Precomputed `a_m = init_m e^{i phi_m}` for matrix elements of `rho(t)`.
struct EvolvedState {
    a: Vec<C64>,
    gamma: f64,
}

impl EvolvedState {
    fn new(ch: &DephasingChannel, init: &StateVector) -> Self {
        let a = init
            .amplitudes()
            .iter()
            .zip(ch.phases())
            .map(|(x, p)| x * p)
            .collect();
        Self { a, gamma: ch.gamma() }
    }

    /// `<x|rho|y>` through the kernel factorization, `O(L 2^L)`.
    fn element(&self, x: &StateVector, y: &StateVector) -> C64 {
        let mut c: Vec<C64> = self
            .a
            .iter()
            .zip(y.amplitudes())
            .map(|(a, y)| a.conj() * y)
            .collect();
        apply_hamming_kernel(&mut c, self.gamma);
        x.amplitudes()
            .iter()
            .zip(&self.a)
            .zip(&c)
            .map(|((x, a), kc)| x.conj() * a * kc)
            .sum()
    }

    /// `<x|rho|y>` as the explicit double sum, parallel over the row index.
    fn element_pairwise(&self, x: &StateVector, y: &StateVector) -> C64 {
        let xs = x.amplitudes();
        let ys = y.amplitudes();
        let powers: Vec<f64> = (0..=x.num_qubits() as i32).map(|h| self.gamma.powi(h)).collect();
        (0..self.a.len())
            .into_par_iter()
            .map(|m| {
                let left = xs[m].conj() * self.a[m];
                if left == C64::new(0.0, 0.0) {
                    return C64::new(0.0, 0.0);
                }
                let mut row = C64::new(0.0, 0.0);
                for mp in 0..self.a.len() {
                    row += self.a[mp].conj() * ys[mp] * powers[(m ^ mp).count_ones() as usize];
                }
                left * row
            })
            .sum()
    }
}

fn check_size(l: usize, cap: usize) -> Result<()> {
    if l % 2 != 0 {
        return Err(Error::OddQubitCount(l));
    }
    if l > cap {
        return Err(Error::Capacity {
            what: "exact probability",
            requested: l,
            cap,
        });
    }
    Ok(())
}

fn terms_from(dd: C64, d1d1: C64, cross: C64) -> ProbabilityTerms {
    let (term_dd, term_d1d1, term_cross) = (dd.re, d1d1.re, cross.im);
    ProbabilityTerms {
        term_dd,
        term_d1d1,
        term_cross,
        p: 0.5 * term_dd + 0.5 * term_d1d1 - term_cross,
    }
}

/// Readout probability `<Read|rho(t)|Read>` and its three components.
pub fn exact_p(ch: &DephasingChannel) -> Result<ProbabilityTerms> {
    exact_p_with_cap(ch, DEFAULT_EXACT_CAP)
}

pub fn exact_p_with_cap(ch: &DephasingChannel, cap: usize) -> Result<ProbabilityTerms> {
    let l = ch.num_spins();
    check_size(l, cap)?;
    let d = dicke_x_with_cap(l, l / 2, cap)?;
    let d1 = dicke_x_with_cap(l, l / 2 + 1, cap)?;
    let ev = EvolvedState::new(ch, &d);
    Ok(terms_from(ev.element(&d, &d), ev.element(&d1, &d1), ev.element(&d, &d1)))
}

/// [`exact_p`] by the explicit `4^L` double sum; limited to small `L`.
pub fn exact_p_pairwise(ch: &DephasingChannel) -> Result<ProbabilityTerms> {
    let l = ch.num_spins();
    check_size(l, PAIRWISE_MAX_L)?;
    let d = dicke_x_with_cap(l, l / 2, PAIRWISE_MAX_L)?;
    let d1 = dicke_x_with_cap(l, l / 2 + 1, PAIRWISE_MAX_L)?;
    let ev = EvolvedState::new(ch, &d);
    Ok(terms_from(
        ev.element_pairwise(&d, &d),
        ev.element_pairwise(&d1, &d1),
        ev.element_pairwise(&d, &d1),
    ))
}

/// Right-hand side `-i[rho, H] - (tau / T2^2) sum_j (rho - Z_j rho Z_j)` with
/// `H = sum_n omega_n Z_n / 2`. The commutator sign makes the closed-form
/// phase `exp(+i (E_m - E_m') t)` the exact solution.
fn generator(rho: &DMatrix<C64>, energies: &[f64], signs: &[Vec<f64>], rate: f64) -> DMatrix<C64> {
    let dim = energies.len();
    DMatrix::from_fn(dim, dim, |i, j| {
        let r = rho[(i, j)];
        let comm = r * (energies[j] - energies[i]);
        let mut deph = C64::new(0.0, 0.0);
        for s in signs {
            deph += r - r * (s[i] * s[j]);
        }
        C64::new(0.0, -1.0) * comm - deph * rate
    })
}

fn rk4(ch: &DephasingChannel, rho0: &DMatrix<C64>, steps: usize) -> DMatrix<C64> {
    let l = ch.num_spins();
    let dim = 1usize << l;
    let energies: Vec<f64> = (0..dim).map(|m| ch.energy(m)).collect();
    let signs: Vec<Vec<f64>> = (0..l)
        .map(|n| (0..dim).map(|m| if m >> n & 1 == 0 { 1.0 } else { -1.0 }).collect())
        .collect();
    let h = ch.t / steps as f64;
    let inv_t2sq = ch.t2.powi(-2);
    let mut rho = rho0.clone();
    for k in 0..steps {
        let tau = k as f64 * h;
        let f = |r: &DMatrix<C64>, tau: f64| generator(r, &energies, &signs, tau * inv_t2sq);
        let k1 = f(&rho, tau);
        let k2 = f(&(&rho + &k1 * C64::from(0.5 * h)), tau + 0.5 * h);
        let k3 = f(&(&rho + &k2 * C64::from(0.5 * h)), tau + 0.5 * h);
        let k4 = f(&(&rho + &k3 * C64::from(h)), tau + h);
        rho += (k1 + k2 * C64::from(2.0) + k3 * C64::from(2.0) + k4) * C64::from(h / 6.0);
    }
    rho
}

/// Fixed-step RK4 integration of the dephasing master equation from the
/// probe state. Fails if `steps` and `2 steps` disagree by more than
/// [`RICHARDSON_TOL`] in any element; the finer solution is returned.
pub fn integrate_master_equation(ch: &DephasingChannel, steps: usize) -> Result<DMatrix<C64>> {
    let l = ch.num_spins();
    check_size(l, DENSE_INTEGRATOR_MAX_L)?;
    if steps == 0 {
        return Err(Error::StepsTooFew { steps, diff: f64::INFINITY });
    }
    let d = dicke_x_with_cap(l, l / 2, DENSE_INTEGRATOR_MAX_L)?;
    let v = nalgebra::DVector::from_column_slice(d.amplitudes());
    let rho0 = &v * v.adjoint();
    let coarse = rk4(ch, &rho0, steps);
    let fine = rk4(ch, &rho0, 2 * steps);
    let diff = (&coarse - &fine).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if diff > RICHARDSON_TOL {
        return Err(Error::StepsTooFew { steps, diff });
    }
    Ok(fine)
}

/// `<psi|rho|psi>` for a dense density matrix.
pub fn expectation(rho: &DMatrix<C64>, psi: &StateVector) -> Result<C64> {
    if rho.nrows() != psi.amplitudes().len() {
        return Err(Error::DimensionMismatch(rho.nrows(), psi.amplitudes().len()));
    }
    let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
    Ok((v.adjoint() * rho * &v)[(0, 0)])
}

/// `dp/ds` by a central difference of relative step `step` around `s`.
pub fn dp_ds(omegas: &[f64], s: f64, t2: f64, t: f64, step: f64) -> Result<f64> {
    let h = step * s.abs().max(1.0);
    let p_at = |s: f64| -> Result<f64> {
        let fields = omegas.iter().map(|w| w * s).collect();
        Ok(exact_p(&DephasingChannel::new(t2, t, fields)?)?.p)
    };
    Ok((p_at(s + h)? - p_at(s - h)?) / (2.0 * h))
}

/// Empirical uncertainty `sqrt(p(1-p)) / (sqrt(N) |dp/ds|)` with `N = T/t`.
/// Returns infinity when the derivative vanishes.
pub fn delta_s_empirical(lat: &SpinLattice, s: f64, t2: f64, t: f64, total_time: f64) -> Result<f64> {
    if !(t > 0.0) || !(total_time >= t) {
        return Err(Error::Domain(format!(
            "need 0 < t <= T for at least one repetition, got t = {t}, T = {total_time}"
        )));
    }
    let p = exact_p(&DephasingChannel::from_lattice(lat, s, t2, t)?)?.p;
    let slope = dp_ds(lat.omegas(), s, t2, t, FD_STEP)?;
    if slope.abs() < MIN_SLOPE {
        return Ok(f64::INFINITY);
    }
    let n = total_time / t;
    Ok((p * (1.0 - p)).sqrt() / (n.sqrt() * slope.abs()))
}
