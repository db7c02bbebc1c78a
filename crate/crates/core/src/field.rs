//! Dipolar field of the target spin and cylindrical probe lattices.
//!
//! Lengths are in micrometres, angular frequencies in rad/s and densities are
//! accepted in cm^-3. The target sits at the origin with its quantization axis
//! along `z`; probes fill the shell `r <= r_max`, `z_min <= z <= z_max`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constants::{cm3_to_um3, G_ELECTRON};
use crate::error::{Error, Result};

pub const LATTICE_CSV_HEADER: &str = "r_um,z_um,omega_over_s";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    r_max: f64,
    z_min: f64,
    z_max: f64,
}

impl Geometry {
    pub fn new(r_max: f64, z_min: f64, z_max: f64) -> Result<Self> {
        if !(r_max > 0.0) || !r_max.is_finite() {
            return Err(Error::InvalidGeometry(format!("r_max = {r_max} must be positive")));
        }
        if !(z_min > 0.0 && z_min < z_max) || !z_max.is_finite() {
            return Err(Error::InvalidGeometry(format!(
                "need 0 < z_min < z_max, got z_min = {z_min}, z_max = {z_max}"
            )));
        }
        Ok(Self { r_max, z_min, z_max })
    }

    /// Shell with the given standoff and shape ratios `r_max/z_min`, `z_max/z_min`.
    pub fn from_normalized(z_min: f64, r_tilde: f64, z_tilde: f64) -> Result<Self> {
        Self::new(r_tilde * z_min, z_min, z_tilde * z_min)
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn z_min(&self) -> f64 {
        self.z_min
    }

    pub fn z_max(&self) -> f64 {
        self.z_max
    }

    pub fn r_tilde(&self) -> f64 {
        self.r_max / self.z_min
    }

    pub fn z_tilde(&self) -> f64 {
        self.z_max / self.z_min
    }

    /// Volume in um^3.
    pub fn volume(&self) -> f64 {
        PI * self.r_max * self.r_max * (self.z_max - self.z_min)
    }

    pub fn contains(&self, r: f64, z: f64) -> bool {
        r >= 0.0 && r <= self.r_max && z >= self.z_min && z <= self.z_max
    }
}

/// Dipolar constant and the classical target-spin value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Couplings {
    pub g: f64,
    pub s: f64,
}

impl Couplings {
    pub fn new(g: f64, s: f64) -> Self {
        Self { g, s }
    }

    /// Electron target, spin up.
    pub fn electron() -> Self {
        Self { g: G_ELECTRON, s: 1.0 }
    }

    pub fn with_s(self, s: f64) -> Self {
        Self { s, ..self }
    }
}

impl Default for Couplings {
    fn default() -> Self {
        Self::electron()
    }
}

/// Angular part `(r^2 - 2 z^2) / (r^2 + z^2)^{5/2}`, in um^-3.
pub fn reduced_field(r: f64, z: f64) -> Result<f64> {
    let d2 = r * r + z * z;
    if d2 == 0.0 {
        return Err(Error::Singularity);
    }
    Ok((r * r - 2.0 * z * z) / (d2 * d2 * d2.sqrt()))
}

/// Secular field `omega_s(r, z) = 2 G s (r^2 - 2 z^2) / (r^2 + z^2)^{5/2}`.
pub fn omega_s(r: f64, z: f64, c: &Couplings) -> Result<f64> {
    Ok(2.0 * c.g * c.s * reduced_field(r, z)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LatticeMode {
    /// `round(rho V)` sites drawn uniformly in the shell from a seeded stream.
    UniformRandom { seed: u64 },
    /// Simple cubic grid of spacing `rho^{-1/3}` clipped to the shell.
    CubicGrid,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpinLattice {
    positions: Vec<(f64, f64)>,
    omegas: Vec<f64>,
    density_cm3: f64,
    seed: Option<u64>,
}

impl SpinLattice {
    /// Builds a lattice from cylindrical positions, deriving `omega / s`.
    pub fn from_positions(positions: Vec<(f64, f64)>, density_cm3: f64, g: f64) -> Result<Self> {
        let omegas = positions
            .iter()
            .map(|&(r, z)| omega_s(r, z, &Couplings::new(g, 1.0)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            positions,
            omegas,
            density_cm3,
            seed: None,
        })
    }

    /// Lattice with prescribed per-site `omega / s` values and dummy positions.
    /// Useful for driving the exact oracles with synthetic field patterns.
    pub fn from_omegas(omegas: Vec<f64>) -> Self {
        Self {
            positions: vec![(0.0, 0.0); omegas.len()],
            omegas,
            density_cm3: 0.0,
            seed: None,
        }
    }

    pub fn positions(&self) -> &[(f64, f64)] {
        &self.positions
    }

    /// Per-site `omega_s / s` in rad/s.
    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    /// Per-site fields for a given target-spin value.
    pub fn fields(&self, s: f64) -> Vec<f64> {
        self.omegas.iter().map(|w| w * s).collect()
    }

    pub fn count(&self) -> usize {
        self.omegas.len()
    }

    pub fn density_cm3(&self) -> f64 {
        self.density_cm3
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if let Some(seed) = self.seed {
            let _ = writeln!(out, "# seed = {seed}");
        }
        let _ = writeln!(out, "# density_cm3 = {:e}", self.density_cm3);
        out.push_str(LATTICE_CSV_HEADER);
        out.push('\n');
        for (&(r, z), w) in self.positions.iter().zip(&self.omegas) {
            let _ = writeln!(out, "{r:e},{z:e},{w:e}");
        }
        out
    }

    /// Parses the CSV produced by [`SpinLattice::to_csv`]. Lines starting with
    /// `#` are comments; the `# density_cm3` and `# seed` comments are read back.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut positions = Vec::new();
        let mut omegas = Vec::new();
        let mut density_cm3 = 0.0;
        let mut seed = None;
        let mut seen_header = false;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if let Some((k, v)) = comment.split_once('=') {
                    match k.trim() {
                        "density_cm3" => {
                            density_cm3 = v.trim().parse().map_err(|_| Error::Parse {
                                line: line_no,
                                msg: format!("bad density {:?}", v.trim()),
                            })?
                        }
                        "seed" => {
                            seed = Some(v.trim().parse().map_err(|_| Error::Parse {
                                line: line_no,
                                msg: format!("bad seed {:?}", v.trim()),
                            })?)
                        }
                        _ => {}
                    }
                }
                continue;
            }
            if !seen_header {
                if line != LATTICE_CSV_HEADER {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("expected header {LATTICE_CSV_HEADER:?}"),
                    });
                }
                seen_header = true;
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("expected 3 columns, found {}", fields.len()),
                });
            }
            let mut vals = [0.0f64; 3];
            for (slot, f) in vals.iter_mut().zip(&fields) {
                *slot = f.trim().parse().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("not a number: {:?}", f.trim()),
                })?;
                if !slot.is_finite() {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: "non-finite value".into(),
                    });
                }
            }
            if vals[0] < 0.0 {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "negative radius".into(),
                });
            }
            positions.push((vals[0], vals[1]));
            omegas.push(vals[2]);
        }
        if !seen_header {
            return Err(Error::Parse {
                line: text.lines().count(),
                msg: "missing header".into(),
            });
        }
        Ok(Self {
            positions,
            omegas,
            density_cm3,
            seed,
        })
    }
}

/// Expected probe number `rho pi r_max^2 (z_max - z_min)`, unrounded.
pub fn expected_count(geom: &Geometry, rho_cm3: f64) -> f64 {
    cm3_to_um3(rho_cm3) * geom.volume()
}

/// Rounded probe number in the shell.
pub fn spin_count(geom: &Geometry, rho_cm3: f64) -> u64 {
    expected_count(geom, rho_cm3).round() as u64
}

pub fn generate_lattice(
    geom: &Geometry,
    rho_cm3: f64,
    mode: LatticeMode,
    c: &Couplings,
) -> Result<SpinLattice> {
    generate_lattice_with_spacing(geom, rho_cm3, mode, c, None)
}

/// As [`generate_lattice`], optionally rejecting random sites closer than
/// `min_spacing` (um) to an accepted one.
pub fn generate_lattice_with_spacing(
    geom: &Geometry,
    rho_cm3: f64,
    mode: LatticeMode,
    c: &Couplings,
    min_spacing: Option<f64>,
) -> Result<SpinLattice> {
    let expected = expected_count(geom, rho_cm3);
    if !(expected >= 1.0) {
        return Err(Error::EmptyLattice(expected));
    }
    let (positions, seed) = match mode {
        LatticeMode::UniformRandom { seed } => {
            let n = expected.round() as usize;
            (uniform_sites(geom, n, seed, min_spacing)?, Some(seed))
        }
        LatticeMode::CubicGrid => (cubic_sites(geom, cm3_to_um3(rho_cm3)), None),
    };
    if positions.is_empty() {
        return Err(Error::EmptyLattice(expected));
    }
    let mut lat = SpinLattice::from_positions(positions, rho_cm3, c.g)?;
    lat.seed = seed;
    Ok(lat)
}

fn uniform_sites(
    geom: &Geometry,
    n: usize,
    seed: u64,
    min_spacing: Option<f64>,
) -> Result<Vec<(f64, f64)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let span = geom.z_max - geom.z_min;
    let sample = |rng: &mut ChaCha8Rng| {
        // Area-weighted radial inverse CDF.
        let r = geom.r_max * rng.gen::<f64>().sqrt();
        let z = geom.z_min + span * rng.gen::<f64>();
        let phi = 2.0 * PI * rng.gen::<f64>();
        (r, z, phi)
    };
    let Some(d) = min_spacing.filter(|d| *d > 0.0) else {
        return Ok((0..n)
            .map(|_| {
                let (r, z, _) = sample(&mut rng);
                (r, z)
            })
            .collect());
    };
    let mut cells: HashMap<(i64, i64, i64), Vec<[f64; 3]>> = HashMap::new();
    let key = |p: &[f64; 3]| {
        (
            (p[0] / d).floor() as i64,
            (p[1] / d).floor() as i64,
            (p[2] / d).floor() as i64,
        )
    };
    let mut out = Vec::with_capacity(n);
    let max_attempts = 1000 * n.max(1);
    let mut attempts = 0;
    while out.len() < n {
        attempts += 1;
        if attempts > max_attempts {
            return Err(Error::Regime(format!(
                "could only place {} of {n} sites with minimum spacing {d} um",
                out.len()
            )));
        }
        let (r, z, phi) = sample(&mut rng);
        let p = [r * phi.cos(), r * phi.sin(), z];
        let (cx, cy, cz) = key(&p);
        let clash = (-1..=1).any(|dx| {
            (-1..=1).any(|dy| {
                (-1..=1).any(|dz| {
                    cells.get(&(cx + dx, cy + dy, cz + dz)).is_some_and(|v| {
                        v.iter().any(|q| {
                            let (a, b, e) = (p[0] - q[0], p[1] - q[1], p[2] - q[2]);
                            a * a + b * b + e * e < d * d
                        })
                    })
                })
            })
        });
        if !clash {
            cells.entry((cx, cy, cz)).or_default().push(p);
            out.push((r, z));
        }
    }
    Ok(out)
}

fn cubic_sites(geom: &Geometry, rho_um3: f64) -> Vec<(f64, f64)> {
    let a = rho_um3.cbrt().recip();
    let n_xy = (geom.r_max / a).floor() as i64;
    let n_z = ((geom.z_max - geom.z_min) / a).floor() as i64;
    let mut out = Vec::new();
    for k in 0..n_z.max(0) {
        let z = geom.z_min + (k as f64 + 0.5) * a;
        for i in -n_xy..=n_xy {
            for j in -n_xy..=n_xy {
                let r = ((i * i + j * j) as f64).sqrt() * a;
                if geom.contains(r, z) {
                    out.push((r, z));
                }
            }
        }
    }
    out
}

/// `sum_j d omega_s(r_j, z_j) / ds = sum_j omega_j / s`, signed.
pub fn sum_domega_ds(lat: &SpinLattice) -> f64 {
    lat.omegas.iter().sum()
}

/// Continuum limit `4 pi G rho | z_max / sqrt(r_max^2 + z_max^2) - z_min / sqrt(r_max^2 + z_min^2) |`.
pub fn continuum_domega_ds(geom: &Geometry, rho_cm3: f64, c: &Couplings) -> f64 {
    let rho = cm3_to_um3(rho_cm3);
    let r2 = geom.r_max * geom.r_max;
    let top = geom.z_max / (r2 + geom.z_max * geom.z_max).sqrt();
    let bottom = geom.z_min / (r2 + geom.z_min * geom.z_min).sqrt();
    4.0 * PI * c.g * rho * (top - bottom).abs()
}

fn shape_denominator(r_tilde: f64, z_tilde: f64) -> Result<f64> {
    if !(r_tilde > 0.0) {
        return Err(Error::Domain(format!("r_tilde = {r_tilde} must be positive")));
    }
    if !(z_tilde > 1.0) {
        return Err(Error::Domain(format!("z_tilde = {z_tilde} must exceed 1")));
    }
    let r2 = r_tilde * r_tilde;
    Ok(z_tilde / (r2 + z_tilde * z_tilde).sqrt() - (r2 + 1.0).sqrt().recip())
}

/// Dicke-probe shape factor `[r^2 (z - 1)]^{1/4} / (z / sqrt(r^2 + z^2) - 1 / sqrt(r^2 + 1))`.
pub fn shape_f(r_tilde: f64, z_tilde: f64) -> Result<f64> {
    let den = shape_denominator(r_tilde, z_tilde)?;
    Ok((r_tilde * r_tilde * (z_tilde - 1.0)).powf(0.25) / den)
}

/// Separable-probe shape factor, the same ratio with a square-root prefactor.
pub fn shape_g(r_tilde: f64, z_tilde: f64) -> Result<f64> {
    let den = shape_denominator(r_tilde, z_tilde)?;
    Ok((r_tilde * r_tilde * (z_tilde - 1.0)).sqrt() / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom(r: f64, a: f64, b: f64) -> Geometry {
        Geometry::new(r, a, b).unwrap()
    }

    #[test]
    fn field_values() {
        let c = Couplings::new(0.5, 1.0);
        assert!((omega_s(1.0, 0.0, &c).unwrap() - 1.0).abs() < 1e-15);
        let z = 0.7;
        assert!(omega_s(2f64.sqrt() * z, z, &c).unwrap().abs() < 1e-15);
        assert_eq!(omega_s(0.0, 0.0, &c), Err(Error::Singularity));
        let (r, z) = (0.3, 1.1);
        let up = omega_s(r, z, &c).unwrap();
        let down = omega_s(r, z, &c.with_s(-1.0)).unwrap();
        assert_eq!(up, -down);
        assert_eq!(omega_s(-r, z, &c).unwrap(), up);
        assert!((omega_s(2.0 * r, 2.0 * z, &c).unwrap() - up / 8.0).abs() < 1e-14);
    }

    #[test]
    fn geometry_validation() {
        assert!(Geometry::new(1.0, 0.0, 1.0).is_err());
        assert!(Geometry::new(1.0, 2.0, 1.0).is_err());
        assert!(Geometry::new(0.0, 1.0, 2.0).is_err());
        let g = Geometry::from_normalized(2.0, 1.5, 3.0).unwrap();
        assert_eq!((g.r_max(), g.z_max()), (3.0, 6.0));
    }

    #[test]
    fn counts() {
        let g = geom(1.0, 1.0, 2.0);
        assert_eq!(spin_count(&g, 1e12), 3);
        let rho = 1000.0 / PI * 1e12;
        assert_eq!(spin_count(&g, rho), 1000);
        assert_eq!(spin_count(&g, 2.0 * rho), 2000);
        let lat = generate_lattice(&g, rho, LatticeMode::UniformRandom { seed: 7 }, &Couplings::electron())
            .unwrap();
        assert_eq!(lat.count(), 1000);
        assert!(lat.positions().iter().all(|&(r, z)| g.contains(r, z)));
        assert!(matches!(
            generate_lattice(&g, 1e11, LatticeMode::CubicGrid, &Couplings::electron()),
            Err(Error::EmptyLattice(_))
        ));
    }

    #[test]
    fn optimal_shape_count_constant() {
        let z_min = 0.05;
        let rho_cm3 = 1e18;
        let g = Geometry::from_normalized(z_min, 1.87, 4.30).unwrap();
        let per = expected_count(&g, rho_cm3) / (cm3_to_um3(rho_cm3) * z_min.powi(3));
        assert!((per / 35.9 - 1.0).abs() < 0.01, "{per}");
    }

    #[test]
    fn stored_omegas_follow_formula() {
        let g = geom(1.0, 0.5, 2.0);
        let c = Couplings::electron();
        let lat = generate_lattice(&g, 5e12, LatticeMode::UniformRandom { seed: 3 }, &c).unwrap();
        for (&(r, z), &w) in lat.positions().iter().zip(lat.omegas()) {
            let expect = 2.0 * c.g * (r * r - 2.0 * z * z) / (r * r + z * z).powf(2.5);
            assert!((w - expect).abs() <= 4.0 * f64::EPSILON * expect.abs());
        }
    }

    #[test]
    fn lattice_sums() {
        let c = Couplings::new(0.5, 1.0);
        let single = SpinLattice::from_positions(vec![(1.0, 0.0)], 0.0, c.g).unwrap();
        assert!((sum_domega_ds(&single) - 1.0).abs() < 1e-15);
        let cone: Vec<_> = (1..10).map(|i| (2f64.sqrt() * i as f64, i as f64)).collect();
        let lat = SpinLattice::from_positions(cone, 0.0, c.g).unwrap();
        assert!(sum_domega_ds(&lat).abs() < 1e-14);
    }

    #[test]
    fn continuum_limits() {
        let c = Couplings::new(1.0, 1.0);
        let rho = 1e12;
        let far = continuum_domega_ds(&geom(1.0, 1.0, 1e9), rho, &c);
        let lim = 4.0 * PI * (1.0 - 1.0 / 2f64.sqrt());
        assert!((far - lim).abs() < 1e-9);
        assert!(continuum_domega_ds(&geom(1e-9, 1.0, 2.0), rho, &c) < 1e-15);
    }

    /// Nested Gauss-Legendre quadrature of `2 G rho * 2 pi * int r dr dz w(r, z)`.
    #[test]
    fn continuum_matches_quadrature() {
        let (xs, ws) = gauss_legendre_64();
        let g = geom(1.0, 1.0, 2.0);
        let c = Couplings::new(1.0, 1.0);
        let map = |a: f64, b: f64, x: f64| 0.5 * (b - a) * x + 0.5 * (b + a);
        let mut total = 0.0;
        for (xz, wz) in xs.iter().zip(&ws) {
            let z = map(g.z_min(), g.z_max(), *xz);
            let mut inner = 0.0;
            for (xr, wr) in xs.iter().zip(&ws) {
                let r = map(0.0, g.r_max(), *xr);
                inner += wr * r * reduced_field(r, z).unwrap();
            }
            total += wz * inner * 0.5 * g.r_max();
        }
        total *= 0.5 * (g.z_max() - g.z_min());
        let quad = (2.0 * c.g * 1.0 * 2.0 * PI * total).abs();
        let closed = continuum_domega_ds(&g, 1e12, &c);
        assert!((quad / closed - 1.0).abs() < 1e-6, "{quad} vs {closed}");
    }

    fn gauss_legendre_64() -> (Vec<f64>, Vec<f64>) {
        let n = 64;
        let mut xs = vec![0.0; n];
        let mut ws = vec![0.0; n];
        for i in 0..n {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    let w = 2.0 / ((1.0 - x * x) * dp * dp);
                    xs[i] = x;
                    ws[i] = w;
                    break;
                }
            }
        }
        (xs, ws)
    }

    #[test]
    fn monte_carlo_mean_matches_closed_form() {
        let g = geom(1.0, 1.0, 2.0);
        let c = Couplings::new(1.0, 1.0);
        let rho = 1e6 / g.volume() * 1e12;
        let lat = generate_lattice(&g, rho, LatticeMode::UniformRandom { seed: 11 }, &c).unwrap();
        let mean = sum_domega_ds(&lat) / lat.count() as f64;
        let mc = (mean * g.volume()).abs();
        let closed = continuum_domega_ds(&g, 1e12, &c);
        assert!((mc / closed - 1.0).abs() < 0.005, "{mc} vs {closed}");
    }

    #[test]
    fn dense_random_lattice_converges() {
        // rho^{1/3} z_min = 20
        let rho_um3 = 8000.0;
        let g = Geometry::from_normalized(1.0, 1.87, 4.30).unwrap();
        let c = Couplings::electron();
        let lat = generate_lattice(&g, rho_um3 * 1e12, LatticeMode::UniformRandom { seed: 5 }, &c)
            .unwrap();
        let cont = continuum_domega_ds(&g, rho_um3 * 1e12, &c);
        assert!((sum_domega_ds(&lat).abs() / cont - 1.0).abs() < 0.01);
        let grid = generate_lattice(&g, rho_um3 * 1e12, LatticeMode::CubicGrid, &c).unwrap();
        assert!((sum_domega_ds(&grid).abs() / cont - 1.0).abs() < 0.01);
        assert!(((grid.count() as f64) / expected_count(&g, rho_um3 * 1e12) - 1.0).abs() < 0.02);
    }

    #[test]
    fn monte_carlo_error_scaling() {
        let g = geom(1.0, 1.0, 2.0);
        let c = Couplings::new(1.0, 1.0);
        let exact = continuum_domega_ds(&g, 1e12, &c) / 1.0;
        let mut pts = Vec::new();
        for n in [100.0f64, 1000.0, 10000.0] {
            let rho = n / g.volume() * 1e12;
            let seeds = 64u64;
            let ms: f64 = (0..seeds)
                .map(|s| {
                    let lat =
                        generate_lattice(&g, rho, LatticeMode::UniformRandom { seed: 1000 + s }, &c)
                            .unwrap();
                    let est = (sum_domega_ds(&lat) / lat.count() as f64 * g.volume()).abs();
                    (est - exact).powi(2)
                })
                .sum::<f64>()
                / seeds as f64;
            pts.push((n.ln(), 0.5 * ms.ln()));
        }
        let slope = (pts[2].1 - pts[0].1) / (pts[2].0 - pts[0].0);
        assert!((-0.6..=-0.4).contains(&slope), "slope {slope}");
    }

    #[test]
    fn spacing_rejection() {
        let g = geom(1.0, 1.0, 2.0);
        let rho = 50.0 / g.volume() * 1e12;
        let c = Couplings::electron();
        let lat = generate_lattice_with_spacing(
            &g,
            rho,
            LatticeMode::UniformRandom { seed: 1 },
            &c,
            Some(0.1),
        )
        .unwrap();
        assert_eq!(lat.count(), 50);
        assert!(generate_lattice_with_spacing(
            &g,
            rho * 100.0,
            LatticeMode::UniformRandom { seed: 1 },
            &c,
            Some(0.5)
        )
        .is_err());
    }

    #[test]
    fn shape_functions() {
        assert!((shape_f(1.87, 4.30).unwrap() - 4.14).abs() < 0.01);
        assert!((shape_g(0.928, 1.89).unwrap() - 5.32).abs() < 0.01);
        let base = shape_f(1.87, 4.30).unwrap();
        assert!(shape_f(1.87, 1.0 + 1e-6).unwrap() > 10.0 * base);
        assert!(shape_f(1.0, 1.0).is_err());
        assert!(shape_g(0.0, 2.0).is_err());
    }

    #[test]
    fn shape_functions_are_scale_invariant() {
        // Rebuild f from the unnormalized pieces L^{1/4} / |sum| at two standoffs.
        let c = Couplings::new(1.0, 1.0);
        let rho_cm3 = 1e15;
        for z_min in [0.3, 3.0] {
            let g = Geometry::from_normalized(z_min, 1.2, 2.5).unwrap();
            let l = expected_count(&g, rho_cm3);
            let sum = continuum_domega_ds(&g, rho_cm3, &c);
            let rho = cm3_to_um3(rho_cm3);
            let f = l.powf(0.25) / sum * 4.0 * c.g * PI.powf(0.75) * rho.powf(0.75) / z_min.powf(0.75);
            assert!((f - shape_f(1.2, 2.5).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn csv_round_trip() {
        let g = geom(1.0, 0.5, 2.0);
        let lat = generate_lattice(&g, 5e12, LatticeMode::UniformRandom { seed: 9 }, &Couplings::electron())
            .unwrap();
        let text = lat.to_csv();
        assert!(text.contains(LATTICE_CSV_HEADER));
        let back = SpinLattice::from_csv(&text).unwrap();
        assert_eq!(back, lat);
        assert!(SpinLattice::from_csv("r_um,z_um\n").is_err());
        assert!(SpinLattice::from_csv("r_um,z_um,omega_over_s\n1,2\n").is_err());
        assert!(SpinLattice::from_csv("r_um,z_um,omega_over_s\n-1,2,3\n").is_err());
        assert!(SpinLattice::from_csv("").is_err());
    }
}
