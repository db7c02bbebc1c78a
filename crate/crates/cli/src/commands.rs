use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use spindetect::analytic::{p_asymptotic_at, t2_from_rho, ts_dicke, ts_sep, SensitivityParams};
use spindetect::constants::G_ELECTRON;
use spindetect::evolution::{exact_p, DephasingChannel};
use spindetect::field::{omega_s, reduced_field, Couplings, Geometry};
use spindetect::optimize::ProbeOptima;
use spindetect::spin_star::{build_u_read, prepare_dicke, StarParams, IDEAL_HARD_RATIO};
use spindetect::verify::{
    binomial_square_sum, closed_form_terms, count_balanced_pairs, count_mixed_pairs,
    nv_invariance_check, PairCouplings,
};
use spindetect::{Error, Warning};

use crate::{CliError, Command, Config};

pub(crate) struct Output {
    pub files: Vec<(String, String)>,
    pub failure: Option<String>,
}

impl Output {
    fn single(name: &str, body: String) -> Self {
        Self {
            files: vec![(name.to_string(), body)],
            failure: None,
        }
    }
}

pub(crate) fn defaults(cmd: Command) -> &'static [(&'static str, &'static str)] {
    match cmd {
        Command::FieldMap => &[
            ("seed", "0"),
            ("r_min", "0"),
            ("r_max", "3"),
            ("nr", "61"),
            ("z_min", "-3"),
            ("z_max", "3"),
            ("nz", "61"),
        ],
        Command::Optimize => &[("seed", "0"), ("tol", "1e-6")],
        Command::TsMap => &[
            ("seed", "0"),
            ("rho_min", "1e16"),
            ("rho_max", "1e19"),
            ("n_rho", "7"),
            ("zmin_min", "0.01"),
            ("zmin_max", "0.1"),
            ("n_z", "5"),
            ("g", "electron"),
            ("tol", "1e-6"),
        ],
        Command::OracleCompare => &[
            ("seed", "1"),
            ("l_list", "2,4,6,8,10"),
            ("u_start", "0.05"),
            ("u_stop", "1"),
            ("n_u", "20"),
            ("z_min", "1"),
            ("t2", "1e-3"),
            ("g", "electron"),
            ("s", "1"),
        ],
        Command::PulseSim => &[
            ("seed", "0"),
            ("l_list", "4,8"),
            ("hard_ratios", "10,30,100"),
            ("omega_p", "200"),
            ("lambda", "1"),
            ("detuning", "40"),
            ("selectivity", "0.02"),
        ],
        Command::Verify => &[("seed", "7"), ("l_max", "12"), ("draws", "100")],
    }
}

pub(crate) fn run(cmd: Command, cfg: &Config, strict: bool) -> Result<Output, CliError> {
    match cmd {
        Command::FieldMap => field_map(cfg),
        Command::Optimize => optimize(cfg),
        Command::TsMap => ts_map(cfg),
        Command::OracleCompare => oracle_compare(cfg),
        Command::PulseSim => pulse_sim(cfg, strict),
        Command::Verify => verify(cfg),
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Result<Vec<f64>, CliError> {
    match n {
        0 => Err(CliError::Config("grid needs at least one point".into())),
        1 => Ok(vec![a]),
        _ => Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()),
    }
}

fn logspace(a: f64, b: f64, n: usize) -> Result<Vec<f64>, CliError> {
    if !(a > 0.0 && b > 0.0) {
        return Err(CliError::Config(format!("log axis needs positive bounds, got {a}, {b}")));
    }
    Ok(linspace(a.ln(), b.ln(), n)?.into_iter().map(f64::exp).collect())
}

fn coupling_g(cfg: &Config) -> Result<f64, CliError> {
    match cfg.raw("g") {
        Some("electron") => Ok(G_ELECTRON),
        _ => cfg.get("g"),
    }
}

fn log_warnings(w: &[Warning]) {
    for w in w {
        log::warn!("{w}");
    }
}

fn field_map(cfg: &Config) -> Result<Output, CliError> {
    let rs = linspace(cfg.get("r_min")?, cfg.get("r_max")?, cfg.get("nr")?)?;
    let zs = linspace(cfg.get("z_min")?, cfg.get("z_max")?, cfg.get("nz")?)?;
    let mut rows = Vec::new();
    let mut skipped = 0usize;
    for &r in &rs {
        for &z in &zs {
            match reduced_field(r, z) {
                Ok(v) => rows.push(format!("{r},{z},{v}")),
                Err(Error::Singularity) => skipped += 1,
                Err(e) => return Err(e.into()),
            }
        }
    }
    let body = format!(
        "# skipped_cells = {skipped}\nr_um,z_um,omega_reduced\n{}\n",
        rows.join("\n")
    );
    Ok(Output::single("field_map.csv", body))
}

fn optimize(cfg: &Config) -> Result<Output, CliError> {
    let tol: f64 = cfg.get("tol")?;
    let opt = ProbeOptima::compute(tol)?;
    let body = format!(
        "target,value,x1,x2,evaluations,tolerance\n\
         F,{},{},,{},{tol}\n\
         f,{},{},{},{},{tol}\n\
         g,{},{},{},{},{tol}\n",
        opt.u.value,
        opt.u.x,
        opt.u.evaluations,
        opt.f.value,
        opt.f.point.0,
        opt.f.point.1,
        opt.f.evaluations,
        opt.g.value,
        opt.g.point.0,
        opt.g.point.1,
        opt.g.evaluations,
    );
    Ok(Output::single("optima.csv", body))
}

fn ts_map(cfg: &Config) -> Result<Output, CliError> {
    let rhos = logspace(cfg.get("rho_min")?, cfg.get("rho_max")?, cfg.get("n_rho")?)?;
    let zs = logspace(cfg.get("zmin_min")?, cfg.get("zmin_max")?, cfg.get("n_z")?)?;
    let g = coupling_g(cfg)?;
    let opt = ProbeOptima::compute(cfg.get("tol")?)?;
    let grid: Vec<(f64, f64)> = rhos.iter().flat_map(|&r| zs.iter().map(move |&z| (r, z))).collect();
    let rows = grid
        .par_iter()
        .map(|&(rho, z)| -> Result<String, CliError> {
            let t2 = t2_from_rho(rho)?;
            log_warnings(&t2.warnings);
            let params = SensitivityParams {
                g,
                s: 1.0,
                t2: t2.value,
                rho_cm3: rho,
                total_time: 1.0,
                geom: Geometry::from_normalized(z, opt.f.point.0, opt.f.point.1)?,
                u: opt.u_min(),
            };
            Ok(format!(
                "{rho:e},{z:e},{:e},{:e}",
                ts_dicke(&params, &opt)?,
                ts_sep(&params, &opt)?
            ))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let body = format!("rho_cm3,z_min_um,Ts_dicke_s,Ts_sep_s\n{}\n", rows.join("\n"));
    Ok(Output::single("ts_map.csv", body))
}

/// Fields of `l` probes placed uniformly in the optimal Dicke column.
fn random_fields(l: usize, geom: &Geometry, c: &Couplings, seed: u64) -> Result<Vec<f64>, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..l)
        .map(|_| {
            let r = geom.r_max() * rng.gen::<f64>().sqrt();
            let z = geom.z_min() + (geom.z_max() - geom.z_min()) * rng.gen::<f64>();
            omega_s(r, z, c).map_err(CliError::from)
        })
        .collect()
}

fn oracle_compare(cfg: &Config) -> Result<Output, CliError> {
    let ls: Vec<usize> = cfg.get_list("l_list")?;
    let us = linspace(cfg.get("u_start")?, cfg.get("u_stop")?, cfg.get("n_u")?)?;
    let t2: f64 = cfg.get("t2")?;
    let seed: u64 = cfg.get("seed")?;
    let c = Couplings::new(coupling_g(cfg)?, cfg.get("s")?);
    let opt = ProbeOptima::get();
    let geom = Geometry::from_normalized(cfg.get("z_min")?, opt.f.point.0, opt.f.point.1)?;
    let lattice_seed = |l: usize| seed.wrapping_add(l as u64);
    let fields = ls
        .iter()
        .map(|&l| random_fields(l, &geom, &c, lattice_seed(l)))
        .collect::<Result<Vec<_>, _>>()?;
    let grid: Vec<(usize, f64)> = (0..ls.len()).flat_map(|i| us.iter().map(move |&u| (i, u))).collect();
    let rows = grid
        .par_iter()
        .map(|&(i, u)| -> Result<String, CliError> {
            let l = ls[i];
            let sum: f64 = fields[i].iter().sum();
            let t = u * t2 / (l as f64).sqrt();
            let exact = exact_p(&DephasingChannel::new(t2, t, fields[i].clone())?)?.p;
            let asym = p_asymptotic_at(u, t2, l as f64, sum)?;
            log_warnings(&asym.warnings);
            let closed = closed_form_terms(l, t, t2, sum)?.p;
            Ok(format!(
                "{l},{u},{exact},{},{closed},{},{}",
                asym.value,
                (exact - asym.value).abs(),
                (exact - closed).abs()
            ))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let seeds: Vec<String> = ls.iter().map(|&l| format!("{l}:{}", lattice_seed(l))).collect();
    let body = format!(
        "# lattice_seeds = {}\nL,u,exact_p,p_asymptotic,closed_form_p,discrepancy_asymptotic,discrepancy_closed_form\n{}\n",
        seeds.join(" "),
        rows.join("\n")
    );
    Ok(Output::single("oracle_compare.csv", body))
}

struct PulseRow {
    l: usize,
    mode: &'static str,
    ratio: f64,
    outcome: Result<(f64, f64), String>,
}

fn pulse_sim(cfg: &Config, strict: bool) -> Result<Output, CliError> {
    let ls: Vec<usize> = cfg.get_list("l_list")?;
    let ratios: Vec<f64> = cfg.get_list("hard_ratios")?;
    let omega_p: f64 = cfg.get("omega_p")?;
    let lambda: f64 = cfg.get("lambda")?;
    let detuning: f64 = cfg.get("detuning")?;
    let selectivity: f64 = cfg.get("selectivity")?;
    let params = |l: usize, ratio: f64| {
        let prep = StarParams::resonant(omega_p, lambda, ratio);
        let read = prep.dispersive(detuning * lambda * (l as f64).sqrt(), selectivity);
        (prep, read)
    };
    let cases: Vec<(usize, bool, f64)> = ls
        .iter()
        .flat_map(|&l| {
            std::iter::once((l, true, IDEAL_HARD_RATIO)).chain(ratios.iter().map(move |&r| (l, false, r)))
        })
        .collect();
    let rows = cases
        .par_iter()
        .map(|&(l, ideal, ratio)| -> Result<PulseRow, CliError> {
            let (prep_p, read_p) = params(l, ratio);
            let outcome = prepare_dicke(l, &prep_p, ideal)
                .and_then(|prep| Ok((prep.fidelity_x, build_u_read(l, &read_p, ideal)?.fidelity)));
            let outcome = match outcome {
                Ok(v) => Ok(v),
                Err(Error::Regime(msg)) if !strict => Err(msg),
                Err(Error::Regime(msg)) => return Err(CliError::Regime(format!("L = {l}, ratio {ratio}: {msg}"))),
                Err(e) => return Err(e.into()),
            };
            Ok(PulseRow {
                l,
                mode: if ideal { "ideal" } else { "finite" },
                ratio,
                outcome,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut body = String::from("L,mode,hard_ratio,prep_fidelity,read_fidelity,status\n");
    for r in &rows {
        match &r.outcome {
            Ok((p, q)) => body.push_str(&format!("{},{},{},{p},{q},ok\n", r.l, r.mode, r.ratio)),
            Err(msg) => body.push_str(&format!("{},{},{},,,\"regime: {}\"\n", r.l, r.mode, r.ratio, msg.replace('"', "'"))),
        }
    }
    let mut files = vec![("pulse_sim.csv".to_string(), body)];
    for &l in &ls {
        let (prep_p, read_p) = params(l, IDEAL_HARD_RATIO);
        if let Ok(prep) = prepare_dicke(l, &prep_p, true) {
            files.push((format!("schedule_prep_L{l}.csv"), prep.schedule.to_csv()));
        }
        if let Ok(read) = build_u_read(l, &read_p, true) {
            files.push((format!("schedule_read_L{l}.csv"), read.schedule.to_csv()));
        }
    }
    Ok(Output { files, failure: None })
}

struct Check {
    name: &'static str,
    l: usize,
    n: Option<usize>,
    expected: String,
    observed: String,
    pass: Option<bool>,
}

fn verify(cfg: &Config) -> Result<Output, CliError> {
    let l_max: usize = cfg.get("l_max")?;
    let draws: usize = cfg.get("draws")?;
    let seed: u64 = cfg.get("seed")?;
    let mut checks = Vec::new();
    for l in (2..=l_max).step_by(2) {
        for n in 0..=l / 2 {
            let c = count_balanced_pairs(l, n)?;
            checks.push(Check {
                name: "balanced_pairs",
                l,
                n: Some(n),
                expected: c.formula_value.to_string(),
                observed: c.enumeration_value.to_string(),
                pass: Some(c.agrees()),
            });
            if n >= 1 {
                let c = count_mixed_pairs(l, n)?;
                checks.push(Check {
                    name: "mixed_pairs",
                    l,
                    n: Some(n),
                    expected: c.formula_value.to_string(),
                    observed: c.enumeration_value.to_string(),
                    pass: Some(c.agrees()),
                });
            }
        }
        let (lhs, rhs) = binomial_square_sum(l)?;
        checks.push(Check {
            name: "binomial_square_sum",
            l,
            n: None,
            expected: rhs.to_string(),
            observed: lhs.to_string(),
            pass: Some(lhs == rhs),
        });
    }
    for l in [4usize, 6, 8] {
        let u = ProbeOptima::get().u_min();
        let t = u / (l as f64).sqrt();
        let exact = exact_p(&DephasingChannel::new(1.0, t, vec![0.0; l])?)?.p;
        let closed = closed_form_terms(l, t, 1.0, 0.0)?.p;
        let gap = (exact - closed).abs();
        checks.push(Check {
            name: "closed_form_field_free",
            l,
            n: None,
            expected: format!("<= {}", 2.0 / l as f64),
            observed: gap.to_string(),
            pass: Some(gap <= 2.0 / l as f64),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..draws {
        let g1 = PairCouplings::random(4, &mut rng);
        let g2 = PairCouplings::random(4, &mut rng);
        worst = worst.max(nv_invariance_check(4, &g1, &g2)?.h_prime_norm);
    }
    checks.push(Check {
        name: "h_prime_norm_max",
        l: 4,
        n: None,
        expected: "<= 1e-12".into(),
        observed: worst.to_string(),
        pass: Some(worst <= 1e-12),
    });
    for l in [2usize, 4, 6] {
        let g = PairCouplings::all_to_all(l, 1.0);
        let r = nv_invariance_check(l, &g, &g)?;
        checks.push(Check {
            name: "h_double_prime_residual_all_to_all",
            l,
            n: None,
            expected: "<= 1e-12".into(),
            observed: r.h_double_prime_residual.to_string(),
            pass: Some(r.h_double_prime_residual <= 1e-12),
        });
        checks.push(Check {
            name: "h_double_prime_eigenvalue_all_to_all",
            l,
            n: None,
            expected: ((l * l) as f64 / 2.0).to_string(),
            observed: r.h_double_prime_eigenvalue.to_string(),
            pass: Some((r.h_double_prime_eigenvalue - (l * l) as f64 / 2.0).abs() <= 1e-12),
        });
    }
    let ring = PairCouplings::ring(4, 1.0);
    let r = nv_invariance_check(4, &ring, &ring)?;
    checks.push(Check {
        name: "h_double_prime_residual_ring",
        l: 4,
        n: None,
        expected: "reported".into(),
        observed: r.h_double_prime_residual.to_string(),
        pass: None,
    });

    let mut body = String::from("check,L,n,expected,observed,pass\n");
    for c in &checks {
        let n = c.n.map(|n| n.to_string()).unwrap_or_default();
        let pass = c.pass.map(|p| p.to_string()).unwrap_or_else(|| "n/a".into());
        body.push_str(&format!("{},{},{n},{},{},{pass}\n", c.name, c.l, c.expected, c.observed));
    }
    let failed: Vec<String> = checks
        .iter()
        .filter(|c| c.pass == Some(false))
        .map(|c| format!("{} (L = {})", c.name, c.l))
        .collect();
    Ok(Output {
        files: vec![("verify.csv".to_string(), body)],
        failure: (!failed.is_empty()).then(|| failed.join(", ")),
    })
}
