//! Derivative-free minimizers: Brent's method in one dimension and a
//! restarted Nelder-Mead simplex in two.

use std::sync::OnceLock;

use rayon::prelude::*;

use crate::analytic::big_f;
use crate::error::{Error, Result};
use crate::field::{shape_f, shape_g};

pub const DEFAULT_PARAM_TOL: f64 = 1e-6;
pub const DEFAULT_VALUE_TOL: f64 = 1e-9;

/// Multistart grid used by [`minimize_shape`].
pub const SHAPE_GRID: usize = 16;
pub const SHAPE_R_RANGE: (f64, f64) = (0.1, 20.0);
pub const SHAPE_Z_RANGE: (f64, f64) = (1.01, 50.0);

const GOLDEN: f64 = 0.381_966_011_250_105_1;
const MAX_ITER_1D: usize = 10_000;
const MAX_ITER_2D: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimum1D {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
    pub bracket: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimum2D {
    pub point: (f64, f64),
    pub value: f64,
    pub simplex_spread: f64,
    pub evaluations: usize,
}

fn checked(x: f64, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteObjective(x))
    }
}

/// Brent minimization on `[lo, hi]`: golden-section steps with parabolic
/// interpolation when it is trustworthy. Endpoints are evaluated too, so the
/// reported value never exceeds `f(lo)` or `f(hi)`.
pub fn minimize_scalar<F>(objective: F, lo: f64, hi: f64, tol: f64) -> Result<Optimum1D>
where
    F: Fn(f64) -> f64,
{
    if !(lo < hi) || !(tol > 0.0) {
        return Err(Error::Domain(format!("need lo < hi and tol > 0, got [{lo}, {hi}], tol {tol}")));
    }
    let mut evals = 0usize;
    let mut eval = |x: f64| {
        evals += 1;
        checked(x, objective(x))
    };
    let (mut a, mut b) = (lo, hi);
    let mut x = a + GOLDEN * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = eval(x)?;
    let (mut fw, mut fv) = (fx, fx);
    let (mut d, mut e) = (0.0f64, 0.0f64);
    for _ in 0..MAX_ITER_1D {
        let xm = 0.5 * (a + b);
        let tol1 = (0.25 * tol).max(f64::EPSILON * x.abs());
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let e_old = e;
            if p.abs() < (0.5 * q * e_old).abs() && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if xm >= x { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { a - x } else { b - x };
            d = GOLDEN * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else {
            x + tol1.copysign(d)
        };
        let fu = eval(u)?;
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    let mut best = Optimum1D {
        x,
        value: fx,
        evaluations: 0,
        bracket: (a, b),
    };
    for end in [lo, hi] {
        let fe = eval(end)?;
        if fe < best.value {
            best.x = end;
            best.value = fe;
        }
    }
    best.evaluations = evals;
    Ok(best)
}

/// One Nelder-Mead run from `start` with initial edge `step`.
fn nelder_mead<F>(objective: &F, start: (f64, f64), step: f64, tol: f64) -> Result<Optimum2D>
where
    F: Fn(f64, f64) -> f64,
{
    let mut evals = 0usize;
    let mut eval = |p: [f64; 2]| {
        evals += 1;
        checked(p[0], objective(p[0], p[1]))
    };
    let mut simplex = [
        [start.0, start.1],
        [start.0 + step, start.1],
        [start.0, start.1 + step],
    ];
    let mut values = [0.0; 3];
    for (v, p) in values.iter_mut().zip(&simplex) {
        *v = eval(*p)?;
    }
    let spread = |s: &[[f64; 2]; 3]| {
        (1..3)
            .map(|i| ((s[i][0] - s[0][0]).powi(2) + (s[i][1] - s[0][1]).powi(2)).sqrt())
            .fold(0.0, f64::max)
    };
    for _ in 0..MAX_ITER_2D {
        let mut order = [0usize, 1, 2];
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        simplex = order.map(|i| simplex[i]);
        values = order.map(|i| values[i]);
        let sp = spread(&simplex);
        if sp <= tol && (values[2] - values[0]).abs() <= DEFAULT_VALUE_TOL.max(tol * tol) {
            return Ok(Optimum2D {
                point: (simplex[0][0], simplex[0][1]),
                value: values[0],
                simplex_spread: sp,
                evaluations: evals,
            });
        }
        let c = [
            0.5 * (simplex[0][0] + simplex[1][0]),
            0.5 * (simplex[0][1] + simplex[1][1]),
        ];
        let along = |t: f64| {
            [
                c[0] + t * (simplex[2][0] - c[0]),
                c[1] + t * (simplex[2][1] - c[1]),
            ]
        };
        let xr = along(-1.0);
        let fr = eval(xr)?;
        if fr < values[0] {
            let xe = along(-2.0);
            let fe = eval(xe)?;
            if fe < fr {
                simplex[2] = xe;
                values[2] = fe;
            } else {
                simplex[2] = xr;
                values[2] = fr;
            }
            continue;
        }
        if fr < values[1] {
            simplex[2] = xr;
            values[2] = fr;
            continue;
        }
        let (xc, fc) = if fr < values[2] {
            let xc = along(-0.5);
            (xc, eval(xc)?)
        } else {
            let xc = along(0.5);
            (xc, eval(xc)?)
        };
        if fc < values[2].min(fr) {
            simplex[2] = xc;
            values[2] = fc;
            continue;
        }
        for i in 1..3 {
            simplex[i] = [
                simplex[0][0] + 0.5 * (simplex[i][0] - simplex[0][0]),
                simplex[0][1] + 0.5 * (simplex[i][1] - simplex[0][1]),
            ];
            values[i] = eval(simplex[i])?;
        }
    }
    Err(Error::AllRestartsDiverged(1))
}

/// Nelder-Mead from `start`, relaunched `restarts` times from the incumbent
/// with a fresh simplex to escape premature collapse.
pub fn minimize_2d<F>(objective: F, start: (f64, f64), tol: f64, restarts: usize) -> Result<Optimum2D>
where
    F: Fn(f64, f64) -> f64,
{
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tol = {tol} must be positive")));
    }
    let step = 0.1 * (1.0 + start.0.abs().max(start.1.abs()));
    let mut best: Option<Optimum2D> = None;
    let mut from = start;
    let mut evaluations = 0;
    let mut failures = 0;
    for round in 0..=restarts {
        let scale = step / (1 << round.min(20)) as f64;
        match nelder_mead(&objective, from, scale.max(10.0 * tol), tol) {
            Ok(opt) => {
                evaluations += opt.evaluations;
                if best.is_none_or(|b| opt.value <= b.value) {
                    from = opt.point;
                    best = Some(opt);
                }
            }
            Err(Error::NonFiniteObjective(_)) | Err(Error::AllRestartsDiverged(_)) => failures += 1,
            Err(e) => return Err(e),
        }
    }
    match best {
        Some(mut b) => {
            b.evaluations = evaluations;
            Ok(b)
        }
        None => Err(Error::AllRestartsDiverged(failures)),
    }
}

fn softplus(a: f64) -> f64 {
    if a > 30.0 {
        a + (-a).exp().ln_1p()
    } else {
        a.exp().ln_1p()
    }
}

fn softplus_inv(x: f64) -> f64 {
    if x > 30.0 {
        x + (-(-x).exp()).ln_1p()
    } else {
        x.exp_m1().ln()
    }
}

/// Minimizes a shape function over `r > 0`, `z > 1` with the substitution
/// `r = softplus(a)`, `z = 1 + softplus(b)` and a log-spaced multistart grid.
pub fn minimize_shape<F>(objective: F, tol: f64) -> Result<Optimum2D>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    let log_grid = |(lo, hi): (f64, f64), i: usize| {
        (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (SHAPE_GRID - 1) as f64).exp()
    };
    let seeds: Vec<(f64, f64)> = (0..SHAPE_GRID)
        .flat_map(|i| (0..SHAPE_GRID).map(move |j| (i, j)))
        .map(|(i, j)| (log_grid(SHAPE_R_RANGE, i), log_grid(SHAPE_Z_RANGE, j)))
        .collect();
    let wrapped = |a: f64, b: f64| objective(softplus(a), 1.0 + softplus(b));
    let runs: Vec<Result<Optimum2D>> = seeds
        .par_iter()
        .map(|&(r, z)| {
            minimize_2d(&wrapped, (softplus_inv(r), softplus_inv(z - 1.0)), tol, 2).map(|o| {
                Optimum2D {
                    point: (softplus(o.point.0), 1.0 + softplus(o.point.1)),
                    ..o
                }
            })
        })
        .collect();
    let mut best: Option<Optimum2D> = None;
    let mut failures = 0;
    for run in runs {
        match run {
            Ok(o) => {
                if best.is_none_or(|b| o.value < b.value) {
                    best = Some(o);
                }
            }
            Err(_) => failures += 1,
        }
    }
    best.ok_or(Error::AllRestartsDiverged(failures))
}

/// Optimal interaction time and column shapes for the two probe strategies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeOptima {
    pub u: Optimum1D,
    pub f: Optimum2D,
    pub g: Optimum2D,
}

impl ProbeOptima {
    pub fn compute(tol: f64) -> Result<Self> {
        let u = minimize_scalar(|u| big_f(u).unwrap_or(f64::NAN), 0.01, 5.0, tol)?;
        let f = minimize_shape(|r, z| shape_f(r, z).unwrap_or(f64::NAN), tol)?;
        let g = minimize_shape(|r, z| shape_g(r, z).unwrap_or(f64::NAN), tol)?;
        Ok(Self { u, f, g })
    }

    /// Optima at the default tolerance, computed once per process.
    pub fn get() -> &'static ProbeOptima {
        static CELL: OnceLock<ProbeOptima> = OnceLock::new();
        CELL.get_or_init(|| {
            ProbeOptima::compute(DEFAULT_PARAM_TOL).expect("optimization of smooth closed forms")
        })
    }

    pub fn u_min(&self) -> f64 {
        self.u.x
    }

    pub fn f_u_min(&self) -> f64 {
        self.u.value
    }

    pub fn f_min(&self) -> f64 {
        self.f.value
    }

    pub fn g_min(&self) -> f64 {
        self.g.value
    }
}
