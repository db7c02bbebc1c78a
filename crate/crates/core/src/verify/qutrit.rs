use nalgebra::DMatrix;
use rand::Rng;

use crate::binomial::binom_f64;
use crate::error::{Error, Result};
use crate::C64;

/// Largest chain for the full `3^L` representation.
pub const QUTRIT_MAX_L: usize = 6;

/// Local levels of one NV centre in the bright/dark basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Qutrit {
    Bright = 0,
    Zero = 1,
    Dark = 2,
}

impl Qutrit {
    fn from_digit(d: usize) -> Self {
        match d {
            0 => Qutrit::Bright,
            1 => Qutrit::Zero,
            _ => Qutrit::Dark,
        }
    }
}

/// Amplitudes over `{B, 0, D}^L`, site `j` being base-3 digit `j` of the index.
#[derive(Debug, Clone, PartialEq)]
pub struct QutritChainState {
    l: usize,
    amps: Vec<C64>,
}

impl QutritChainState {
    pub fn zeros(l: usize) -> Result<Self> {
        if l > QUTRIT_MAX_L {
            return Err(Error::Capacity {
                what: "qutrit chain",
                requested: l,
                cap: QUTRIT_MAX_L,
            });
        }
        Ok(Self {
            l,
            amps: vec![C64::new(0.0, 0.0); 3usize.pow(l as u32)],
        })
    }

    /// Symmetric superposition of all arrangements of `L/2` bright and `L/2`
    /// dark sites.
    pub fn dicke_bright_dark(l: usize) -> Result<Self> {
        if l == 0 || l % 2 == 1 {
            return Err(Error::OddQubitCount(l));
        }
        let mut s = Self::zeros(l)?;
        let amp = C64::new(binom_f64(l, l / 2).sqrt().recip(), 0.0);
        for m in 0..s.amps.len() {
            let digits = s.digits(m);
            let dark = digits.iter().filter(|&&q| q == Qutrit::Dark).count();
            if !digits.contains(&Qutrit::Zero) && dark == l / 2 {
                s.amps[m] = amp;
            }
        }
        Ok(s)
    }

    pub fn num_sites(&self) -> usize {
        self.l
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn level(&self, m: usize, site: usize) -> Qutrit {
        Qutrit::from_digit(m / 3usize.pow(site as u32) % 3)
    }

    fn digits(&self, m: usize) -> Vec<Qutrit> {
        (0..self.l).map(|j| self.level(m, j)).collect()
    }

    fn with_level(&self, m: usize, site: usize, q: Qutrit) -> usize {
        let p = 3usize.pow(site as u32);
        m - (m / p % 3) * p + q as usize * p
    }

    pub fn inner(&self, other: &Self) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    fn distance(&self, other: &Self, scale: C64) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - scale * b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Flip-flop exchange `sum_{j != k} g1_jk (|B0><0B| + |0B><B0| + |D0><0D| + |0D><D0|)`.
    pub fn apply_h_prime(&self, g1: &PairCouplings) -> Result<Self> {
        g1.check(self.l)?;
        let mut out = Self::zeros(self.l)?;
        for (m, &a) in self.amps.iter().enumerate() {
            if a == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..self.l {
                for k in (0..self.l).filter(|&k| k != j) {
                    let (qj, qk) = (self.level(m, j), self.level(m, k));
                    let swapped = match (qj, qk) {
                        (Qutrit::Zero, Qutrit::Bright) | (Qutrit::Bright, Qutrit::Zero) => true,
                        (Qutrit::Zero, Qutrit::Dark) | (Qutrit::Dark, Qutrit::Zero) => true,
                        _ => false,
                    };
                    if swapped {
                        let target = self.with_level(self.with_level(m, j, qk), k, qj);
                        out.amps[target] += a * g1.get(j, k);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Diagonal coupling `sum_{j != k} g2_jk (|BD><BD| + |DB><DB|)`.
    pub fn apply_h_double_prime(&self, g2: &PairCouplings) -> Result<Self> {
        g2.check(self.l)?;
        let mut out = self.clone();
        for (m, a) in out.amps.iter_mut().enumerate() {
            let mut e = 0.0;
            for j in 0..self.l {
                for k in (0..self.l).filter(|&k| k != j) {
                    match (self.level(m, j), self.level(m, k)) {
                        (Qutrit::Bright, Qutrit::Dark) | (Qutrit::Dark, Qutrit::Bright) => e += g2.get(j, k),
                        _ => {}
                    }
                }
            }
            *a *= e;
        }
        Ok(out)
    }

    /// Single-site term `E sum_j (|B><B|_j - |D><D|_j)`.
    pub fn apply_site_splitting(&self, e: f64) -> Self {
        let mut out = self.clone();
        for (m, a) in out.amps.iter_mut().enumerate() {
            let w: f64 = (0..self.l)
                .map(|j| match self.level(m, j) {
                    Qutrit::Bright => 1.0,
                    Qutrit::Dark => -1.0,
                    Qutrit::Zero => 0.0,
                })
                .sum();
            *a *= e * w;
        }
        out
    }
}

/// Pair couplings `g_jk`; the diagonal is ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct PairCouplings(DMatrix<f64>);

impl PairCouplings {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch(m.nrows(), m.ncols()));
        }
        Ok(Self(m))
    }

    pub fn all_to_all(l: usize, g: f64) -> Self {
        Self(DMatrix::from_fn(l, l, |j, k| if j == k { 0.0 } else { g }))
    }

    /// Nearest neighbours on a periodic chain.
    pub fn ring(l: usize, g: f64) -> Self {
        Self(DMatrix::from_fn(l, l, |j, k| {
            if j != k && ((j + 1) % l == k || (k + 1) % l == j) {
                g
            } else {
                0.0
            }
        }))
    }

    /// Symmetric couplings drawn uniformly from `[-1, 1]`.
    pub fn random<R: Rng>(l: usize, rng: &mut R) -> Self {
        let mut m = DMatrix::zeros(l, l);
        for j in 0..l {
            for k in j + 1..l {
                let g = rng.gen_range(-1.0..1.0);
                m[(j, k)] = g;
                m[(k, j)] = g;
            }
        }
        Self(m)
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.0[(j, k)]
    }

    fn check(&self, l: usize) -> Result<()> {
        if self.0.nrows() != l {
            return Err(Error::DimensionMismatch(self.0.nrows(), l));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvarianceReport {
    /// `||H' |D>||`.
    pub h_prime_norm: f64,
    /// `<D| H'' |D>`.
    pub h_double_prime_eigenvalue: f64,
    /// `||H'' |D> - c |D>||` with `c` the expectation above.
    pub h_double_prime_residual: f64,
}

/// Applies `H'` and `H''` to the bright/dark Dicke state of `l` sites.
pub fn nv_invariance_check(l: usize, g1: &PairCouplings, g2: &PairCouplings) -> Result<InvarianceReport> {
    let d = QutritChainState::dicke_bright_dark(l)?;
    let h1 = d.apply_h_prime(g1)?;
    let h2 = d.apply_h_double_prime(g2)?;
    let c = d.inner(&h2);
    Ok(InvarianceReport {
        h_prime_norm: h1.norm(),
        h_double_prime_eigenvalue: c.re,
        h_double_prime_residual: h2.distance(&d, c),
    })
}
