//! Acceptance criteria, one PASS/FAIL line each.

use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spindetect::analytic::{delta_s_dicke_min, delta_s_ghz_baseline, ghz_factor, p_zero_field, SensitivityParams};
use spindetect::constants::G_ELECTRON;
use spindetect::dicke::{read_state, StateVector};
use spindetect::evolution::{exact_p, expectation, integrate_master_equation, DephasingChannel};
use spindetect::field::{omega_s, spin_count, Couplings, Geometry};
use spindetect::optimize::{Optimum1D, ProbeOptima};
use spindetect::spin_star::{build_u_read, prepare_dicke, star_hamiltonian, LadderState, StarParams};
use spindetect::verify::{
    binomial_square_sum, count_balanced_pairs, count_mixed_pairs, nv_invariance_check, PairCouplings,
};
use spindetect::C64;
use spindetect_cli::{render, Command, Config, Invocation};

struct Outcome {
    pass: bool,
    detail: String,
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

fn rendered(command: Command) -> String {
    let inv = Invocation {
        command,
        file: Config::default(),
        overrides: Config::default(),
        seed: None,
        strict: false,
        out_dir: std::env::temp_dir(),
    };
    render(&inv).expect("command runs").artifacts[0].contents.clone()
}

fn rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap_or(f64::NAN)).collect())
        .collect()
}

fn optimum_reproduction() -> Outcome {
    let r = rows(&rendered(Command::Optimize));
    let (u, f_u) = (r[0][2], r[0][1]);
    let (f, fr, fz) = (r[1][1], r[1][2], r[1][3]);
    let (g, gr, gz) = (r[2][1], r[2][2], r[2][3]);
    let checks = [
        within(u, 0.357, 0.002),
        within(f_u, 3.35, 0.01),
        within(f, 4.14, 0.01),
        within(fr, 1.87, 0.02),
        within(fz, 4.30, 0.05),
        within(g, 5.32, 0.01),
        within(gr, 0.928, 0.01),
        within(gz, 1.89, 0.02),
    ];
    Outcome {
        pass: checks.iter().all(|&c| c),
        detail: format!(
            "u_min = {u:.6} (target 0.357 +/- 0.002), F = {f_u:.6}, f = {f:.6} at ({fr:.5}, {fz:.5}), \
             g = {g:.6} at ({gr:.5}, {gz:.5}); u_min^2 = {:.6}",
            u * u
        ),
    }
}

fn probe_count_constant() -> Outcome {
    let opt = ProbeOptima::get();
    let (rho_cm3, z_min) = (1e18, 0.1);
    let geom = Geometry::from_normalized(z_min, opt.f.point.0, opt.f.point.1).unwrap();
    let ratio = spin_count(&geom, rho_cm3) as f64 / (1e6 * z_min.powi(3));
    Outcome {
        pass: within(ratio, 35.9, 0.4),
        detail: format!("count / (rho z_min^3) = {ratio:.4}"),
    }
}

fn lattice_fields(l: usize, seed: u64) -> Vec<f64> {
    let opt = ProbeOptima::get();
    let geom = Geometry::from_normalized(0.3, opt.f.point.0, opt.f.point.1).unwrap();
    let c = Couplings::new(G_ELECTRON, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..l)
        .map(|_| {
            let r = geom.r_max() * rng.gen::<f64>().sqrt();
            let z = geom.z_min() + (geom.z_max() - geom.z_min()) * rng.gen::<f64>();
            omega_s(r, z, &c).unwrap()
        })
        .collect()
}

fn oracle_equivalence() -> Outcome {
    let mut worst = 0.0f64;
    for l in [2usize, 4, 6] {
        let read = read_state(l).unwrap();
        for seed in 0..5u64 {
            let fields = lattice_fields(l, 100 + seed);
            for i in 1..=5 {
                let ch = DephasingChannel::new(1.0, 0.2 * i as f64, fields.clone()).unwrap();
                let rho = integrate_master_equation(&ch, 400).unwrap();
                let direct = expectation(&rho, &read).unwrap().re;
                worst = worst.max((exact_p(&ch).unwrap().p - direct).abs());
            }
        }
    }
    Outcome {
        pass: worst <= 1e-8,
        detail: format!("max |exact_p - <Read|rho_RK4|Read>| = {worst:.3e} over 75 points"),
    }
}

fn asymptotic_convergence() -> Outcome {
    let u = 0.357;
    let limit = p_zero_field(u).unwrap();
    let gaps: Vec<f64> = [4usize, 6, 8, 10, 12]
        .iter()
        .map(|&l| {
            let ch = DephasingChannel::new(1.0, u / (l as f64).sqrt(), vec![0.0; l]).unwrap();
            (exact_p(&ch).unwrap().p - limit).abs()
        })
        .collect();
    let monotone = gaps.windows(2).all(|w| w[1] < w[0]);
    Outcome {
        pass: monotone && gaps[4] <= 2.0 / 12.0,
        detail: format!(
            "gaps L=4..12: {}",
            gaps.iter().map(|g| format!("{g:.3e}")).collect::<Vec<_>>().join(", ")
        ),
    }
}

fn combinatorial_identities() -> Outcome {
    let mut checked = 0;
    let mut ok = true;
    for l in (2..=12).step_by(2) {
        for n in 0..=l / 2 {
            ok &= count_balanced_pairs(l, n).unwrap().agrees();
            checked += 1;
            if n >= 1 {
                ok &= count_mixed_pairs(l, n).unwrap().agrees();
                checked += 1;
            }
        }
        let (lhs, rhs) = binomial_square_sum(l).unwrap();
        ok &= lhs == rhs;
    }
    Outcome {
        pass: ok,
        detail: format!("{checked} duplication counts and 6 binomial-square sums"),
    }
}

fn scaling_laws() -> Outcome {
    let v = rows(&rendered(Command::TsMap));
    let slope = |a: &[f64], b: &[f64], x: usize, y: usize| (b[y] / a[y]).ln() / (b[x] / a[x]).ln();
    let (n_rho, n_z) = (7, 5);
    let mut worst = [0.0f64; 4];
    for i in 0..n_z {
        let (a, b) = (&v[i], &v[(n_rho - 1) * n_z + i]);
        worst[0] = worst[0].max((slope(a, b, 0, 2) + 0.5).abs());
        worst[1] = worst[1].max(slope(a, b, 0, 3).abs());
    }
    for j in 0..n_rho {
        let (a, b) = (&v[j * n_z], &v[j * n_z + n_z - 1]);
        worst[2] = worst[2].max((slope(a, b, 1, 2) - 1.5).abs());
        worst[3] = worst[3].max((slope(a, b, 1, 3) - 3.0).abs());
    }
    Outcome {
        pass: worst[0] <= 1e-3 && worst[1] <= 1e-6 && worst[2] <= 1e-3 && worst[3] <= 1e-3,
        detail: format!(
            "slope deviations: dicke/rho {:.1e}, sep/rho {:.1e}, dicke/z {:.1e}, sep/z {:.1e}",
            worst[0], worst[1], worst[2], worst[3]
        ),
    }
}

fn ghz_baseline() -> Outcome {
    let opt = *ProbeOptima::get();
    let params = SensitivityParams {
        g: G_ELECTRON,
        s: 1.0,
        t2: 1e-3,
        rho_cm3: 1e17,
        total_time: 1.0,
        geom: Geometry::from_normalized(0.05, opt.f.point.0, opt.f.point.1).unwrap(),
        u: opt.u_min(),
    };
    let swapped = ProbeOptima {
        u: Optimum1D {
            value: ghz_factor(),
            ..opt.u
        },
        ..opt
    };
    let a = delta_s_ghz_baseline(&params, &opt).unwrap().delta_s_min;
    let b = delta_s_dicke_min(&params, &swapped).unwrap().delta_s_min;
    let rel = (a - b).abs() / a;
    Outcome {
        pass: rel <= 1e-12 && within(ghz_factor(), 1.82, 0.005),
        detail: format!("sqrt(2) e^(1/4) = {:.6}, formula mismatch {rel:.1e}", ghz_factor()),
    }
}

fn spin_star_spectrum() -> Outcome {
    let mut worst = 0.0f64;
    for l in [2usize, 4, 6, 8] {
        let p = StarParams::resonant(50.0, 1.3, 100.0);
        let h = star_hamiltonian(l, &p, true).unwrap();
        let mut numeric: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().copied().collect();
        numeric.sort_by(f64::total_cmp);
        let half = l as i64 / 2;
        let mut predicted = vec![-((l + 1) as f64) / 2.0 * p.omega_p, (l as f64 + 1.0) / 2.0 * p.omega_p];
        for n in (-half + 1)..=half {
            let mu = 2.0 * p.lambda * ((half * (half + 1) - n * (n - 1)) as f64).sqrt();
            for s in [1.0, -1.0] {
                predicted.push((n as f64 - 0.5) * p.omega_p + s * mu / 2.0);
            }
        }
        predicted.sort_by(f64::total_cmp);
        for (a, b) in numeric.iter().zip(&predicted) {
            worst = worst.max((a - b).abs());
        }
        worst = worst.max((numeric.len() as f64 - predicted.len() as f64).abs());
    }
    Outcome {
        pass: worst <= 1e-10,
        detail: format!("max eigenvalue residual {worst:.2e}"),
    }
}

fn embed_block(l: usize, rho: &DMatrix<C64>) -> DMatrix<C64> {
    let e = DMatrix::from_fn(1 << l, l + 1, |m, k| {
        let mut c = vec![C64::new(0.0, 0.0); l + 1];
        c[k] = C64::new(1.0, 0.0);
        StateVector::from_symmetric(l, &c).unwrap().amplitude(m)
    });
    let slot = |k: usize| {
        let b = LadderState::basis(l, 0, k).unwrap();
        b.amplitudes().iter().position(|a| a.norm() > 0.5).unwrap()
    };
    let block = DMatrix::from_fn(l + 1, l + 1, |i, j| rho[(slot(i), slot(j))]);
    &e * block * e.adjoint()
}

fn protocol_correctness() -> Outcome {
    let prep_p = StarParams::resonant(200.0, 1.0, 100.0);
    let mut prep_worst = 0.0f64;
    for l in (2..=64).step_by(2) {
        prep_worst = prep_worst.max(1.0 - prepare_dicke(l, &prep_p, true).unwrap().fidelity_x);
    }
    let mut read_worst = 0.0f64;
    for l in (2..=10).step_by(2) {
        let p = prep_p.dispersive(40.0 * (l as f64).sqrt(), 0.02);
        read_worst = read_worst.max(1.0 - build_u_read(l, &p, true).unwrap().fidelity);
    }
    let l = 6;
    let u = build_u_read(l, &prep_p.dispersive(40.0 * 6f64.sqrt(), 0.02), true).unwrap().unitary;
    let read = DVector::from_column_slice(read_state(l).unwrap().amplitudes());
    let dim = 2 * (l + 1);
    let ground = DVector::from_column_slice(LadderState::ground(l).amplitudes());
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let mut eq_worst = 0.0f64;
    for _ in 0..20 {
        let a = DMatrix::from_fn(dim, dim, |_, _| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
        let mut rho = &a * a.adjoint();
        let tr: C64 = (0..dim).map(|i| rho[(i, i)]).sum();
        rho /= tr;
        let direct = (read.adjoint() * embed_block(l, &rho) * &read)[(0, 0)];
        let via_u = (ground.adjoint() * u.adjoint() * &rho * &u * &ground)[(0, 0)];
        eq_worst = eq_worst.max((direct - via_u).norm());
    }
    Outcome {
        pass: prep_worst <= 1e-9 && read_worst <= 1e-6 && eq_worst <= 1e-9,
        detail: format!(
            "prep infidelity (L <= 64) {prep_worst:.1e}, U_Read infidelity (L <= 10) {read_worst:.1e}, \
             measurement identity {eq_worst:.1e}"
        ),
    }
}

fn interaction_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut h1 = 0.0f64;
    for _ in 0..100 {
        let g1 = PairCouplings::random(4, &mut rng);
        let g2 = PairCouplings::random(4, &mut rng);
        h1 = h1.max(nv_invariance_check(4, &g1, &g2).unwrap().h_prime_norm);
    }
    let uniform = PairCouplings::all_to_all(4, 1.0);
    let r = nv_invariance_check(4, &uniform, &uniform).unwrap();
    Outcome {
        pass: h1 <= 1e-12 && r.h_double_prime_residual <= 1e-12,
        detail: format!(
            "max ||H'|D>|| = {h1:.1e}, H'' residual {:.1e} (eigenvalue {})",
            r.h_double_prime_residual, r.h_double_prime_eigenvalue
        ),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 10] = [
        ("optimum reproduction", optimum_reproduction, Duration::from_secs(5)),
        ("probe-count constant", probe_count_constant, Duration::from_secs(5)),
        ("oracle equivalence", oracle_equivalence, Duration::from_secs(120)),
        ("asymptotic convergence", asymptotic_convergence, Duration::from_secs(600)),
        ("combinatorial identities", combinatorial_identities, Duration::from_secs(60)),
        ("scaling laws", scaling_laws, Duration::from_secs(5)),
        ("GHZ baseline", ghz_baseline, Duration::from_secs(5)),
        ("spin-star spectrum", spin_star_spectrum, Duration::from_secs(5)),
        ("protocol correctness", protocol_correctness, Duration::from_secs(60)),
        ("interaction invariance", interaction_invariance, Duration::from_secs(30)),
    ];
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = check();
        let elapsed = start.elapsed();
        let pass = out.pass && elapsed <= *budget;
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {}: {name}: {} [{:.2} s of {} s]",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
