//! Seeded randomized property suites that cross-check the closed forms
//! against brute-force oracles.
//!
//! Every draw gets its own generator derived from the master seed and the
//! draw index, so results do not depend on thread scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{
    gap_bc, gap_suite_draw, mgain_asymptotic, mgain_finite, run_gap_suite, GapSuiteConfig,
};
use crate::bounds::{genie_outer_raw, inr_star, no_interference_outer};
use crate::error::{Error, Result};
use crate::geometry::{fm_project_oracle, frontier_gap, pentagon_frontier, DEFAULT_ORACLE_STEP};
use crate::model::{db_to_linear, ChannelParams, PowerSplit, Regime, Split};
use crate::optimize::{bc_best_over_beta, golden_section_max, maximize_sum, EC_K_MAX};
use crate::schemes::{
    bc_beta_star, bc_mac_components, bc_region, bc_sum_rate_raw, cc_quantization_variance,
    cc_reconstructed_r1, cc_region_raw, dc_region_raw, ec_region_raw, RatePentagon, Scheme,
};

/// Generator for draw `index` of a suite seeded with `seed`.
pub fn draw_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub const DEFAULT_SUITES: [&str; 9] = [
    "fm-oracle",
    "beta-star",
    "cc-identity",
    "containment",
    "convergence",
    "gap-bc",
    "gap-dc",
    "gap-ec",
    "optimizer",
];

/// Suites that only run when named explicitly.
pub const EXTRA_SUITES: [&str; 2] = ["gap-bc-strong-sum", "mgain-convergence"];

pub const CONTAINMENT_SLACK: f64 = 1e-9;
pub const BETA_GRID_STEP: f64 = 1e-4;
pub const BETA_TOL: f64 = 1e-5;
pub const CC_TOL: f64 = 1e-9;
pub const OPT_GRID_STEP: f64 = 1e-4;
pub const OPT_TOL: f64 = 1e-5;
pub const SUM_RATIO_SNR: f64 = 1e9;
pub const SUM_RATIO_TOL: f64 = 0.01;
pub const INR_STAR_SNR: f64 = 1e6;
pub const MGAIN_SNR: f64 = 1e6;
pub const MGAIN_TOL: f64 = 0.05;
pub const MGAIN_MU: [f64; 4] = [0.25, 0.5, 1.0, 1.5];
pub const MGAIN_WNU: [f64; 3] = [0.25, 0.5, 1.0];
/// Amount added to the BC downlink rate in self-test mode.
pub const PERTURBATION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyConfig {
    /// Overrides the suite's default draw count.
    pub draws: Option<usize>,
    pub seed: u64,
    /// Inflate the BC region to check that the harness can fail.
    pub perturb: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FailingDraw {
    pub index: u64,
    pub params: ChannelParams,
    pub split: Option<Split>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub draws: usize,
    pub max_error: f64,
    pub threshold: f64,
    pub passed: bool,
    /// The draw with the largest error.
    pub worst: Option<FailingDraw>,
}

fn default_draws(name: &str) -> usize {
    match name {
        "fm-oracle" => 100,
        "beta-star" | "optimizer" => 200,
        "gap-bc" | "gap-bc-strong-sum" => 10_000,
        _ => 1000,
    }
}

pub fn run_suite(name: &str, cfg: &VerifyConfig) -> Result<SuiteResult> {
    let draws = cfg.draws.unwrap_or_else(|| default_draws(name));
    let seed = cfg.seed;
    match name {
        "fm-oracle" => fm_oracle(draws, seed),
        "beta-star" => beta_star(draws, seed),
        "cc-identity" => cc_identity(draws, seed),
        "containment" => containment(draws, seed, cfg.perturb),
        "convergence" => convergence(),
        "gap-bc" | "gap-dc" | "gap-ec" => gap(name, draws, seed),
        "gap-bc-strong-sum" => gap_bc_strong_sum(draws, seed),
        "optimizer" => optimizer(draws, seed),
        "mgain-convergence" => mgain_convergence(),
        other => Err(Error::Domain(format!("unknown suite {other:?}"))),
    }
}

/// Folds per-draw `(error, params, split, detail)` into a result, keeping
/// the first draw with the largest error.
fn collect(
    name: &str,
    threshold: f64,
    rows: Vec<(f64, ChannelParams, Option<Split>, String)>,
) -> SuiteResult {
    let mut max_error = 0.0f64;
    let mut worst = None;
    for (i, (err, params, split, detail)) in rows.iter().enumerate() {
        if worst.is_none() || *err > max_error || err.is_nan() {
            max_error = *err;
            worst = Some(FailingDraw {
                index: i as u64,
                params: *params,
                split: *split,
                detail: detail.clone(),
            });
        }
    }
    SuiteResult {
        name: name.to_string(),
        draws: rows.len(),
        max_error,
        threshold,
        passed: max_error <= threshold,
        worst,
    }
}

fn uniform_db<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    db_to_linear(rng.gen_range(lo..hi))
}

const W_CHOICES: [f64; 4] = [0.0, 0.5, 1.0, 2.0];

/// Weak-regime parameters and a random split.
fn weak_draw(rng: &mut ChaCha8Rng) -> Result<(ChannelParams, f64, f64)> {
    let s1 = uniform_db(rng, 0.0, 60.0);
    let s2_db = rng.gen_range(1.0..60.0);
    let inr = db_to_linear(rng.gen_range(0.0..s2_db));
    let ss = uniform_db(rng, 0.0, 60.0);
    let w = W_CHOICES[rng.gen_range(0..W_CHOICES.len())];
    let lambda = rng.gen_range(0.0..1.0);
    let beta = rng.gen_range(0.0..=1.0);
    let p = ChannelParams::new(s1, db_to_linear(s2_db), inr, ss, w)?;
    debug_assert_eq!(p.regime(), Regime::Weak);
    Ok((p, lambda, beta))
}

fn any_draw(rng: &mut ChaCha8Rng, ws: &[f64]) -> Result<ChannelParams> {
    let s1 = uniform_db(rng, 0.0, 60.0);
    let s2 = uniform_db(rng, 0.0, 60.0);
    let i = uniform_db(rng, 0.0, 60.0);
    let ss = uniform_db(rng, 0.0, 60.0);
    let w = ws[rng.gen_range(0..ws.len())];
    ChannelParams::new(s1, s2, i, ss, w)
}

fn fm_oracle(draws: usize, seed: u64) -> Result<SuiteResult> {
    let step = DEFAULT_ORACLE_STEP;
    let rows = (0..draws as u64)
        .into_par_iter()
        .map(|idx| {
            let mut rng = draw_rng(seed, idx);
            let (p, lambda, beta) = weak_draw(&mut rng)?;
            let s = PowerSplit::new(lambda, beta)?;
            let oracle = fm_project_oracle(&bc_mac_components(&p, s), step)?;
            let pent = bc_region(&p, s);
            let face = (pent.r1_corner().0 - pent.r2_corner().0).max(0.0);
            let closed = pentagon_frontier(&pent, (face / step).ceil() as usize + 2);
            let err = frontier_gap(&oracle, &closed)?.max(frontier_gap(&closed, &oracle)?);
            Ok((err, p, Some(Split::from(s)), format!("frontier distance {err:.3e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(collect("fm-oracle", 2.0 * step, rows))
}

/// Best BC sum rate over `beta` on a uniform grid, then polished by a
/// golden-section search between the grid neighbours of the best point.
pub fn beta_grid_oracle(p: &ChannelParams, lambda: f64, step: f64) -> (f64, f64) {
    let n = (1.0 / step).round() as usize;
    let f = |b: f64| bc_sum_rate_raw(p, lambda, b);
    let mut best = (0usize, f64::NEG_INFINITY);
    for i in 0..=n {
        let v = f(i as f64 / n as f64);
        if v > best.1 {
            best = (i, v);
        }
    }
    let lo = best.0.saturating_sub(1) as f64 / n as f64;
    let hi = (best.0 + 1).min(n) as f64 / n as f64;
    let (_, polished, _) = golden_section_max(f, lo, hi, 1e-13);
    (best.1, polished.max(best.1))
}

fn beta_star(draws: usize, seed: u64) -> Result<SuiteResult> {
    let rows = (0..draws as u64)
        .into_par_iter()
        .map(|idx| {
            let mut rng = draw_rng(seed, idx);
            let (p, lambda, _) = weak_draw(&mut rng)?;
            let star = bc_beta_star(&p, lambda)?;
            let v = bc_sum_rate_raw(&p, lambda, star.beta);
            let (grid, polished) = beta_grid_oracle(&p, lambda, BETA_GRID_STEP);
            let err = (v - polished).abs().max(grid - v);
            Ok((
                err,
                p,
                Some(Split::Power { lambda, beta: star.beta }),
                format!("closed form {v:.12} grid {grid:.12} polished {polished:.12}"),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(collect("beta-star", BETA_TOL, rows))
}

fn cc_identity(draws: usize, seed: u64) -> Result<SuiteResult> {
    let rows = (0..draws as u64)
        .into_par_iter()
        .map(|idx| {
            let mut rng = draw_rng(seed, idx);
            let p = any_draw(&mut rng, &[1.0])?.with_w(rng.gen_range(0.05..3.0))?;
            let lambda = rng.gen_range(0.01..1.0);
            let q = cc_quantization_variance(&p, lambda)?;
            let direct = cc_region_raw(&p, lambda).r1_max;
            let rebuilt = cc_reconstructed_r1(&p, lambda, q)?;
            let err = (direct - rebuilt).abs();
            Ok((err, p, Some(Split::Lambda { lambda }), format!("{direct:.15} vs {rebuilt:.15}")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(collect("cc-identity", CC_TOL, rows))
}

/// How far the upper-right corners of `inner` stick out of `outer`.
fn excess(inner: &RatePentagon, outer: &RatePentagon) -> f64 {
    [inner.r1_corner(), inner.r2_corner()]
        .into_iter()
        .map(|(r1, r2)| {
            (r1 - outer.r1_max)
                .max(r2 - outer.r2_max)
                .max(r1 + r2 - outer.sum_max)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn containment(draws: usize, seed: u64, perturb: bool) -> Result<SuiteResult> {
    let rows = (0..draws as u64)
        .into_par_iter()
        .map(|idx| {
            let mut rng = draw_rng(seed, idx);
            let p = any_draw(&mut rng, &W_CHOICES)?;
            let grid_lambda = rng.gen_range(0..=100) as f64 / 100.0;
            let k = rng.gen_range(0.0..3.0);
            let w_ec = [1.0, 2.0][rng.gen_range(0..2)];

            let lambda = if p.regime() == Regime::VeryStrong { 0.0 } else { grid_lambda };
            let genie = genie_outer_raw(&p, lambda);
            let rep = gap_bc(&p, lambda)?;
            let beta = match rep.split {
                Split::Power { beta, .. } => beta,
                _ => 0.0,
            };
            let mut bc = bc_region(&p, PowerSplit::new(lambda, beta)?);
            if perturb {
                bc.r1_max += PERTURBATION;
            }
            let pe = p.with_w(w_ec)?;
            let checks = [
                ("bc", excess(&bc, &genie)),
                ("cc", excess(&cc_region_raw(&p, grid_lambda), &genie_outer_raw(&p, grid_lambda))),
                ("dc", excess(&dc_region_raw(&p, grid_lambda), &genie_outer_raw(&p, grid_lambda))),
                ("ec", excess(&ec_region_raw(&pe, k), &no_interference_outer(&pe))),
            ];
            let (name, err) = checks
                .into_iter()
                .fold(("", f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
            Ok((
                err.max(0.0),
                p,
                Some(Split::Lambda { lambda: grid_lambda }),
                format!("{name} exceeds its outer bound by {err:.3e}"),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(collect("containment", CONTAINMENT_SLACK, rows))
}

/// Fixed-ratio configurations `(inr / snr, beta)` for the sum-capacity
/// ratio check, away from the regime boundaries.
pub const SUM_RATIO_CONFIGS: [(f64, f64); 3] = [(1e-2, 1.0), (1e-3, 1.0), (1e3, 0.0)];

/// Ratio of the genie sum bound to the achievable sum rate at `lambda = 0`.
pub fn high_snr_sum_ratio(snr: f64, inr_ratio: f64, beta: f64) -> Result<f64> {
    let p = ChannelParams::new(snr, snr, inr_ratio * snr, 0.0, 0.0)?;
    let upper = genie_outer_raw(&p, 0.0).sum_max;
    let lower = bc_sum_rate_raw(&p, 0.0, beta);
    Ok(upper / lower)
}

fn convergence() -> Result<SuiteResult> {
    let mut rows = Vec::new();
    for (ratio, beta) in SUM_RATIO_CONFIGS {
        let r = high_snr_sum_ratio(SUM_RATIO_SNR, ratio, beta)?;
        let p = ChannelParams::new(SUM_RATIO_SNR, SUM_RATIO_SNR, ratio * SUM_RATIO_SNR, 0.0, 0.0)?;
        rows.push((r - 1.0, p, Some(Split::Power { lambda: 0.0, beta }), format!("upper/lower {r:.6}")));
    }
    let s = INR_STAR_SNR;
    let r = inr_star(s, s)? / (s * (1.0 + s));
    rows.push((
        (r - 1.0).abs(),
        ChannelParams::new(s, s, 0.0, 0.0, 0.0)?,
        None,
        format!("inr*/(snr2(1+snr1)) {r:.6}"),
    ));
    Ok(collect("convergence", SUM_RATIO_TOL, rows))
}

fn gap(name: &str, draws: usize, seed: u64) -> Result<SuiteResult> {
    let scheme = match name {
        "gap-bc" => Scheme::Bc,
        "gap-dc" => Scheme::Dc,
        _ => Scheme::Ec,
    };
    let rep = run_gap_suite(&GapSuiteConfig {
        scheme,
        draws,
        seed,
        w: None,
        constrain_conditions: scheme != Scheme::Bc,
    })?;
    let margin = rep.worst.as_ref().map_or(0.0, |w| w.report.margin());
    let passed = rep.violations == 0 && rep.analytic_exceedances == 0 && margin < 1.0;
    Ok(SuiteResult {
        name: name.to_string(),
        draws,
        max_error: margin,
        threshold: 1.0,
        passed,
        worst: rep.worst.map(|w| FailingDraw {
            index: w.index,
            params: w.params,
            split: Some(w.report.split),
            detail: format!(
                "gap/ceiling {margin:.4}; {} violations, {} closed-form exceedances",
                rep.violations, rep.analytic_exceedances
            ),
        }),
    })
}

fn gap_bc_strong_sum(draws: usize, seed: u64) -> Result<SuiteResult> {
    let cfg = GapSuiteConfig {
        scheme: Scheme::Bc,
        draws,
        seed,
        w: None,
        constrain_conditions: false,
    };
    let rows = (0..draws as u64)
        .into_par_iter()
        .map(|idx| {
            let (p, lambda) = gap_suite_draw(&cfg, idx)?;
            let r = gap_bc(&p, lambda)?;
            let err = match (r.regime, r.d_sum, r.analytic_bound_sum) {
                (Regime::Strong, Some(d), Some(b)) => (d - b).max(0.0),
                _ => 0.0,
            };
            Ok((err, p, Some(r.split), format!("sum gap over closed form by {err:.3e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(collect("gap-bc-strong-sum", crate::analysis::ANALYTIC_SLACK, rows))
}

/// Exhaustive search of `scheme` on a uniform grid of its split.
pub fn grid_oracle_sum(scheme: Scheme, p: &ChannelParams, step: f64) -> Result<f64> {
    let n = (1.0 / step).round() as usize;
    let xs = (0..=n).map(|i| i as f64 / n as f64);
    Ok(match scheme {
        Scheme::Bc => xs.map(|l| bc_best_over_beta(p, l).1).fold(f64::NEG_INFINITY, f64::max),
        Scheme::Cc => xs.map(|l| cc_region_raw(p, l).max_sum()).fold(f64::NEG_INFINITY, f64::max),
        Scheme::Dc => xs.map(|l| dc_region_raw(p, l).max_sum()).fold(f64::NEG_INFINITY, f64::max),
        Scheme::Ec => {
            if p.w() < 1.0 {
                return Err(Error::Precondition("estimate-and-cancel requires w >= 1".into()));
            }
            xs.map(|u| ec_region_raw(p, EC_K_MAX * u * u).max_sum())
                .fold(f64::NEG_INFINITY, f64::max)
        }
        Scheme::NoSc => {
            let z = p.with_w(0.0)?;
            if z.regime() == Regime::Weak {
                xs.map(|b| bc_sum_rate_raw(&z, 0.0, b)).fold(f64::NEG_INFINITY, f64::max)
            } else {
                bc_sum_rate_raw(&z, 0.0, 0.0)
            }
        }
    })
}

fn optimizer(draws: usize, seed: u64) -> Result<SuiteResult> {
    let rows = (0..draws as u64)
        .into_par_iter()
        .map(|idx| {
            let mut rng = draw_rng(seed, idx);
            let p = any_draw(&mut rng, &W_CHOICES)?;
            let pe = p.with_w([1.0, 2.0][rng.gen_range(0..2)])?;
            let mut worst = (f64::NEG_INFINITY, Scheme::Bc, None, 0.0, 0.0);
            for s in Scheme::ALL {
                let q = if s == Scheme::Ec { pe } else { p };
                let opt = maximize_sum(s, &q)?;
                let oracle = grid_oracle_sum(s, &q, OPT_GRID_STEP)?;
                let err = oracle - opt.best_sum;
                if err > worst.0 {
                    worst = (err, s, Some(opt.best_split), opt.best_sum, oracle);
                }
            }
            let (err, s, split, got, want) = worst;
            Ok((
                err.max(0.0),
                p,
                split,
                format!("{s}: optimizer {got:.12} grid {want:.12}"),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(collect("optimizer", OPT_TOL, rows))
}

/// Finite-SNR gain and its high-SNR limit at one grid point (`w = 1`).
pub fn mgain_pair(scheme: Scheme, mu: f64, nu: f64) -> Result<(f64, f64)> {
    let p = ChannelParams::from_exponents(MGAIN_SNR, mu, nu, 1.0)?;
    let finite = mgain_finite(&p, maximize_sum(scheme, &p)?.best_sum)?;
    Ok((finite, mgain_asymptotic(scheme, mu, nu, 1.0)?))
}

fn mgain_convergence() -> Result<SuiteResult> {
    let mut rows = Vec::new();
    for mu in MGAIN_MU {
        for nu in MGAIN_WNU {
            for s in Scheme::ALL {
                let (finite, limit) = mgain_pair(s, mu, nu)?;
                rows.push((
                    (finite - limit).abs(),
                    ChannelParams::from_exponents(MGAIN_SNR, mu, nu, 1.0)?,
                    None,
                    format!("{s} mu={mu} nu={nu}: finite {finite:.4} limit {limit:.4}"),
                ));
            }
        }
    }
    Ok(collect("mgain-convergence", MGAIN_TOL, rows))
}
