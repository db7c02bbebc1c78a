//! Dicke states on the full computational basis.
//!
//! Bitstrings use bit `i` of the index for spin `i`; a bit value of 0 is the
//! `sigma_z = +1` ("up") eigenstate. The x-basis states `|+>`, `|->` are
//! `(|0> +- |1>)/sqrt 2`.

use crate::binomial;
use crate::error::{Error, Result};
use crate::C64;

/// Default ceiling on `L` for dense `2^L` constructors.
pub const DEFAULT_DENSE_CAP: usize = 16;

/// Above this size [`zeta`] and [`xi`] switch from the explicit permutation
/// sum to the popcount formula.
pub const DIRECT_SUM_MAX_L: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn new(num_qubits: usize, amplitudes: Vec<C64>) -> Result<Self> {
        let dim = 1usize
            .checked_shl(num_qubits as u32)
            .ok_or(Error::Capacity {
                what: "state vector",
                requested: num_qubits,
                cap: 63,
            })?;
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch(amplitudes.len(), dim));
        }
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn amplitude(&self, m: usize) -> C64 {
        self.amplitudes[m]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Applies a Hadamard gate on every qubit (fast Walsh-Hadamard transform).
    pub fn hadamard_all(&self) -> StateVector {
        let mut v = self.amplitudes.clone();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut half = 1;
        while half < v.len() {
            for block in v.chunks_mut(2 * half) {
                let (lo, hi) = block.split_at_mut(half);
                for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                    let (x, y) = (*a, *b);
                    *a = (x + y) * s;
                    *b = (x - y) * s;
                }
            }
            half *= 2;
        }
        StateVector {
            num_qubits: self.num_qubits,
            amplitudes: v,
        }
    }

    /// Amplitudes `<D^L_k|_z psi>` on the symmetric subspace, indexed by the
    /// number of up spins `k`. Exact only for permutation-symmetric states.
    pub fn symmetric_components(&self) -> Vec<C64> {
        let l = self.num_qubits;
        let mut sums = vec![C64::new(0.0, 0.0); l + 1];
        for (m, a) in self.amplitudes.iter().enumerate() {
            let up = l - m.count_ones() as usize;
            sums[up] += *a;
        }
        sums.iter()
            .enumerate()
            .map(|(k, s)| *s / binomial::binom_f64(l, k).sqrt())
            .collect()
    }

    /// Inverse of [`StateVector::symmetric_components`]: spreads ladder
    /// amplitudes evenly over each popcount shell.
    pub fn from_symmetric(l: usize, components: &[C64]) -> Result<StateVector> {
        if components.len() != l + 1 {
            return Err(Error::DimensionMismatch(components.len(), l + 1));
        }
        check_cap(l, DEFAULT_DENSE_CAP)?;
        let amps = (0..1usize << l)
            .map(|m| {
                let up = l - m.count_ones() as usize;
                components[up] / binomial::binom_f64(l, up).sqrt()
            })
            .collect();
        StateVector::new(l, amps)
    }
}

fn check_cap(l: usize, cap: usize) -> Result<()> {
    if l > cap {
        return Err(Error::Capacity {
            what: "dense Dicke state",
            requested: l,
            cap,
        });
    }
    Ok(())
}

fn check_even(l: usize) -> Result<()> {
    if l % 2 != 0 {
        return Err(Error::OddQubitCount(l));
    }
    Ok(())
}

/// Signed count `sum_{|Q| = q} (-1)^{|Q & m|}` over all `q`-subsets `Q` of the
/// `l` sites, for a bitstring `m` with `w` ones (a Krawtchouk polynomial).
fn parity_weighted_count(l: usize, q: usize, w: usize) -> i128 {
    let mut acc: i128 = 0;
    for j in 0..=q.min(w) {
        if q - j > l - w {
            continue;
        }
        let term = binomial::exact(w, j).expect("w <= 64") as i128
            * binomial::exact(l - w, q - j).expect("l <= 64") as i128;
        if j % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// Like [`parity_weighted_count`] but by enumerating every `q`-subset.
fn parity_weighted_enumerated(l: usize, q: usize, m: u64) -> i128 {
    let mut acc = 0i128;
    for set in 0u64..(1u64 << l) {
        if set.count_ones() as usize == q {
            if (set & m).count_ones() % 2 == 0 {
                acc += 1;
            } else {
                acc -= 1;
            }
        }
    }
    acc
}

/// `|D^L_k>_x` with `k` spins in `|+>`, up to the default dense cap.
pub fn dicke_x(l: usize, k: usize) -> Result<StateVector> {
    dicke_x_with_cap(l, k, DEFAULT_DENSE_CAP)
}

pub fn dicke_x_with_cap(l: usize, k: usize, cap: usize) -> Result<StateVector> {
    check_even(l)?;
    if k > l {
        return Err(Error::IndexOutOfRange { k, l });
    }
    check_cap(l, cap)?;
    let scale = (2f64.powi(l as i32) * binomial::binom_f64(l, k)).sqrt().recip();
    // Each |-> factor contributes (-1)^{m_i}; the minus-sites form an (l-k)-subset.
    let shell: Vec<f64> = (0..=l)
        .map(|w| parity_weighted_count(l, l - k, w) as f64 * scale)
        .collect();
    let amps = (0..1usize << l)
        .map(|m| C64::new(shell[m.count_ones() as usize], 0.0))
        .collect();
    StateVector::new(l, amps)
}

/// `|D^L_k>_z` with `k` up spins (bit value 0).
pub fn dicke_z(l: usize, k: usize) -> Result<StateVector> {
    if k > l {
        return Err(Error::IndexOutOfRange { k, l });
    }
    check_cap(l, DEFAULT_DENSE_CAP)?;
    let a = binomial::binom_f64(l, k).sqrt().recip();
    let amps = (0..1usize << l)
        .map(|m| {
            if l - m.count_ones() as usize == k {
                C64::new(a, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
        .collect();
    StateVector::new(l, amps)
}

/// The probe state `|D^L_{L/2}>_x`.
pub fn probe_state(l: usize) -> Result<StateVector> {
    check_even(l)?;
    dicke_x(l, l / 2)
}

/// The readout state `(|D^L_{L/2}>_x + i |D^L_{L/2+1}>_x) / sqrt 2`.
pub fn read_state(l: usize) -> Result<StateVector> {
    check_even(l)?;
    let d = dicke_x(l, l / 2)?;
    let d1 = dicke_x(l, l / 2 + 1)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let amps = d
        .amplitudes
        .iter()
        .zip(d1.amplitudes.iter())
        .map(|(a, b)| (*a + C64::i() * *b) * s)
        .collect();
    StateVector::new(l, amps)
}

/// `<a|b>`, conjugating `a`.
pub fn overlap(a: &StateVector, b: &StateVector) -> Result<C64> {
    if a.num_qubits != b.num_qubits {
        return Err(Error::DimensionMismatch(a.num_qubits, b.num_qubits));
    }
    Ok(a
        .amplitudes
        .iter()
        .zip(b.amplitudes.iter())
        .map(|(x, y)| x.conj() * *y)
        .sum())
}

fn coefficient(m: u64, l: usize, minus_sites: usize, k: usize) -> Result<f64> {
    check_even(l)?;
    if l > 64 {
        return Err(Error::Capacity {
            what: "bitstring coefficient",
            requested: l,
            cap: 64,
        });
    }
    if l < 64 && m >> l != 0 {
        return Err(Error::DimensionMismatch(64 - m.leading_zeros() as usize, l));
    }
    let count = if l <= DIRECT_SUM_MAX_L {
        parity_weighted_enumerated(l, minus_sites, m)
    } else {
        parity_weighted_count(l, minus_sites, m.count_ones() as usize)
    };
    Ok(count as f64 / binomial::binom_f64(l, k).sqrt())
}

/// Coefficient `zeta(m)` with `|D^L_{L/2}>_x = 2^{-L/2} sum_m zeta(m) |m>`.
pub fn zeta(m: u64, l: usize) -> Result<f64> {
    coefficient(m, l, l / 2, l / 2)
}

/// Coefficient `xi(m)` with `|D^L_{L/2+1}>_x = 2^{-L/2} sum_m xi(m) |m>`.
///
/// The sign pattern enumerates the `L/2 - 1` sites holding `|->`.
pub fn xi(m: u64, l: usize) -> Result<f64> {
    coefficient(m, l, l / 2 - 1, l / 2 + 1)
}
