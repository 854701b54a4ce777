//! Sum-rate maximization over power splits and the multiplexing-gain sweeps
//! over the interference exponent.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::mgain_finite;
use crate::error::{check_finite_nonneg, Error, Result};
use crate::geometry::{pareto_filter, pentagon_frontier, FrontierSample};
use crate::model::{db_to_linear, ChannelParams, Regime, Split};
use crate::schemes::{
    bc_beta_star, bc_region, bc_sum_rate_raw, cc_region_raw, dc_region_raw, ec_region_raw,
    RatePentagon, Scheme,
};
use crate::model::PowerSplit;

const INV_PHI: f64 = 0.618_033_988_749_894_9;
pub const LAMBDA_GRID_STEP: f64 = 1e-2;
pub const REFINE_TOL: f64 = 1e-6;
pub const EC_K_MAX: f64 = 100.0;
const EC_K_MIN: f64 = 1e-4;
const EC_K_GRID: usize = 400;
const FRONTIER_FACE_SAMPLES: usize = 2;

/// Golden-section search for a maximum of `f` on `[lo, hi]`, stopping once
/// the bracket is narrower than `tol`. Returns the best probed point, its
/// value and the number of evaluations.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64, usize) {
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    let mut evals = 2;
    let mut best = if f2 > f1 { (x2, f2) } else { (x1, f1) };
    while b - a > tol {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
            if f1 > best.1 {
                best = (x1, f1);
            }
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
            if f2 > best.1 {
                best = (x2, f2);
            }
        }
        evals += 1;
    }
    (best.0, best.1, evals)
}

/// Evaluates `f` on `xs`, then refines between the neighbours of the best
/// grid point. Ties keep the earliest grid point.
fn grid_then_golden<F: Fn(f64) -> f64>(f: F, xs: &[f64], tol: f64) -> (f64, f64, usize) {
    let mut best = (0usize, f64::NEG_INFINITY);
    for (i, &x) in xs.iter().enumerate() {
        let v = f(x);
        if v > best.1 {
            best = (i, v);
        }
    }
    let lo = xs[best.0.saturating_sub(1)];
    let hi = xs[(best.0 + 1).min(xs.len() - 1)];
    let (xg, vg, n) = golden_section_max(&f, lo, hi, tol);
    let evals = xs.len() + n;
    if vg > best.1 {
        (xg, vg, evals)
    } else {
        (xs[best.0], best.1, evals)
    }
}

fn unit_grid(step: f64) -> Vec<f64> {
    let n = (1.0 / step).round() as usize;
    (0..=n).map(|i| i as f64 / n as f64).collect()
}

fn ec_k_grid(count: usize) -> Vec<f64> {
    let (lo, hi) = (EC_K_MIN.ln(), EC_K_MAX.ln());
    std::iter::once(0.0)
        .chain((0..count).map(|i| (lo + (hi - lo) * i as f64 / (count - 1) as f64).exp()))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Grid,
    Golden,
    GridGolden,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptResult {
    pub best_split: Split,
    pub best_sum: f64,
    pub evaluations: usize,
    pub method: Method,
}

fn ensure_ec_bandwidth(p: &ChannelParams) -> Result<()> {
    if p.w() < 1.0 {
        return Err(Error::Precondition(format!(
            "estimate-and-cancel requires w >= 1, got w = {}",
            p.w()
        )));
    }
    Ok(())
}

/// BC sum rate at `lambda` with the best private fraction.
pub(crate) fn bc_best_over_beta(p: &ChannelParams, lambda: f64) -> (f64, f64) {
    let beta = match bc_beta_star(p, lambda) {
        Ok(b) => b.beta,
        Err(_) => 0.0,
    };
    (beta, bc_sum_rate_raw(p, lambda, beta))
}

/// Largest sum rate of `scheme` over its free split parameters.
pub fn maximize_sum(scheme: Scheme, p: &ChannelParams) -> Result<OptResult> {
    let lambdas = unit_grid(LAMBDA_GRID_STEP);
    let (best_split, best_sum, evaluations) = match scheme {
        Scheme::Bc => {
            let (l, v, n) = grid_then_golden(|l| bc_best_over_beta(p, l).1, &lambdas, REFINE_TOL);
            let beta = bc_best_over_beta(p, l).0;
            (Split::Power { lambda: l, beta }, v, n)
        }
        Scheme::Cc => {
            let (l, v, n) = grid_then_golden(|l| cc_region_raw(p, l).max_sum(), &lambdas, REFINE_TOL);
            (Split::Lambda { lambda: l }, v, n)
        }
        Scheme::Dc => {
            let (l, v, n) = grid_then_golden(|l| dc_region_raw(p, l).max_sum(), &lambdas, REFINE_TOL);
            (Split::Lambda { lambda: l }, v, n)
        }
        Scheme::Ec => {
            ensure_ec_bandwidth(p)?;
            let ks = ec_k_grid(EC_K_GRID);
            let (k, v, n) = grid_then_golden(|k| ec_region_raw(p, k).max_sum(), &ks, REFINE_TOL);
            (Split::Scale { k }, v, n)
        }
        Scheme::NoSc => {
            let z = p.with_w(0.0)?;
            let f = |b: f64| bc_sum_rate_raw(&z, 0.0, b);
            let (mut b, mut v, mut n) = grid_then_golden(f, &lambdas, REFINE_TOL);
            let star = bc_best_over_beta(&z, 0.0);
            n += 1;
            if star.1 > v {
                (b, v) = star;
            }
            if z.regime() != Regime::Weak {
                b = 0.0;
                v = f(0.0);
                n += 1;
            }
            (Split::Power { lambda: 0.0, beta: b }, v, n)
        }
    };
    Ok(OptResult {
        best_split,
        best_sum,
        evaluations,
        method: Method::GridGolden,
    })
}

/// How the side-channel exponent follows the interference exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NuPolicy {
    EqMu,
    Const(f64),
}

/// Inclusive grid `start, start + step, ..., end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuRange {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

impl MuRange {
    pub fn new(start: f64, end: f64, step: f64) -> Result<Self> {
        check_finite_nonneg("mu start", start)?;
        check_finite_nonneg("mu end", end)?;
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::Domain(format!("mu step must be positive, got {step}")));
        }
        if end < start {
            return Err(Error::Domain(format!("empty mu range {start}:{end}")));
        }
        Ok(Self { start, end, step })
    }

    pub fn values(&self) -> Vec<f64> {
        let n = ((self.end - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.start + i as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub mu: f64,
    pub scheme: Scheme,
    pub gain: f64,
    pub gain_ratio_vs_nosc: f64,
    /// Side-channel power fraction at the optimum, or the scaling factor
    /// for EC.
    pub optimal_lambda: f64,
    pub sum_rate: f64,
}

/// Multiplexing gains of every scheme along a grid of interference
/// exponents at a fixed SNR. EC rows are omitted when `w < 1`.
pub fn figure6_sweep(snr_db: f64, w: f64, nu_policy: NuPolicy, mu_range: MuRange) -> Result<Vec<SweepRow>> {
    let snr = db_to_linear(snr_db);
    check_finite_nonneg("snr", snr)?;
    check_finite_nonneg("w", w)?;
    if let NuPolicy::Const(nu) = nu_policy {
        check_finite_nonneg("nu", nu)?;
    }
    let schemes: Vec<Scheme> = Scheme::ALL
        .into_iter()
        .filter(|&s| s != Scheme::Ec || w >= 1.0)
        .collect();
    let per_mu: Vec<Result<Vec<SweepRow>>> = mu_range
        .values()
        .into_par_iter()
        .map(|mu| {
            let nu = match nu_policy {
                NuPolicy::EqMu => mu,
                NuPolicy::Const(nu) => nu,
            };
            let p = ChannelParams::from_exponents(snr, mu, nu, w)?;
            let mut rows = Vec::with_capacity(schemes.len());
            for &s in &schemes {
                let opt = maximize_sum(s, &p)?;
                rows.push(SweepRow {
                    mu,
                    scheme: s,
                    gain: mgain_finite(&p, opt.best_sum)?,
                    gain_ratio_vs_nosc: f64::NAN,
                    optimal_lambda: opt.best_split.lambda_or_k(),
                    sum_rate: opt.best_sum,
                });
            }
            let base = rows
                .iter()
                .find(|r| r.scheme == Scheme::NoSc)
                .map(|r| r.gain)
                .unwrap_or(f64::NAN);
            for r in &mut rows {
                r.gain_ratio_vs_nosc = r.gain / base;
            }
            rows.sort_by(|a, b| a.scheme.as_str().cmp(b.scheme.as_str()));
            Ok(rows)
        })
        .collect();
    let mut out = Vec::new();
    for r in per_mu {
        out.extend(r?);
    }
    Ok(out)
}

/// Optimal side-channel allocations along the interference exponent with
/// `nu = mu`.
pub fn figure7_sweep(snr_db: f64, w: f64, mu_range: MuRange) -> Result<Vec<SweepRow>> {
    figure6_sweep(snr_db, w, NuPolicy::EqMu, mu_range)
}

fn check_resolution(resolution: f64) -> Result<()> {
    if !(resolution > 0.0 && resolution <= 0.1) {
        return Err(Error::Domain(format!(
            "resolution must lie in (0, 0.1], got {resolution}"
        )));
    }
    Ok(())
}

/// Non-dominated rate pairs of `scheme` over a grid of its splits, each
/// tagged with the split that produced it.
pub fn pareto_frontier(scheme: Scheme, p: &ChannelParams, resolution: f64) -> Result<Vec<FrontierSample>> {
    check_resolution(resolution)?;
    let grid = unit_grid(resolution);
    let regions: Vec<(Split, RatePentagon)> = match scheme {
        Scheme::Bc | Scheme::NoSc => {
            let q = if scheme == Scheme::NoSc { p.with_w(0.0)? } else { *p };
            let lambdas = if scheme == Scheme::NoSc { vec![0.0] } else { grid.clone() };
            let betas = if q.regime() == Regime::Weak { grid.clone() } else { vec![0.0] };
            lambdas
                .par_iter()
                .flat_map_iter(|&lambda| {
                    let betas = &betas;
                    betas.iter().map(move |&beta| {
                        let s = PowerSplit::new(lambda, beta).expect("grid split in range");
                        (Split::from(s), bc_region(&q, s))
                    })
                })
                .collect()
        }
        Scheme::Cc => grid
            .iter()
            .map(|&lambda| (Split::Lambda { lambda }, cc_region_raw(p, lambda)))
            .collect(),
        Scheme::Dc => grid
            .iter()
            .map(|&lambda| (Split::Lambda { lambda }, dc_region_raw(p, lambda)))
            .collect(),
        Scheme::Ec => {
            ensure_ec_bandwidth(p)?;
            ec_k_grid(grid.len())
                .into_iter()
                .map(|k| (Split::Scale { k }, ec_region_raw(p, k)))
                .collect()
        }
    };
    let samples: Vec<FrontierSample> = regions
        .par_iter()
        .flat_map_iter(|&(split, pent)| {
            pentagon_frontier(&pent, FRONTIER_FACE_SAMPLES)
                .into_iter()
                .map(move |q| FrontierSample {
                    r1: q.r1,
                    r2: q.r2,
                    split: Some(split),
                })
        })
        .collect();
    Ok(pareto_filter(samples))
}
