//! Capacity gaps of the cancellation schemes against the outer bounds, and
//! multiplexing gains at finite and asymptotically high SNR.
//!
//! Gaps are reported per unit of total bandwidth, i.e. divided by `1 + w`.

use std::f64::consts::SQRT_2;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{genie_outer_raw, no_interference_outer};
use crate::error::{check_finite_nonneg, check_unit, Error, Result};
use crate::model::{c, db_to_linear, linear_to_db, ChannelParams, EcScale, Regime, Split};
use crate::optimize::golden_section_max;
use crate::schemes::{bc_region, dc_region_raw, ec_region, Scheme};
use crate::model::PowerSplit;
use crate::verify::draw_rng;

/// Factor in the side-channel SNR condition under which estimate-and-cancel
/// at the half-bit scaling is within half a bit: `1 + 2/(sqrt(2) - 1)`.
pub const EC_THRESHOLD_FACTOR: f64 = 3.0 + 2.0 * SQRT_2;

const DC_LAMBDA_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct GapConditions {
    /// The parameters satisfy the hypotheses of the gap guarantee.
    pub conditions_met: bool,
    /// Weak regime with `(1 - lambda)*inr < 1`: the private message takes
    /// all the power and the interference is treated as noise.
    pub treat_as_noise: bool,
    /// EC evaluated at a bandwidth ratio that is not a whole number.
    pub non_integer_w: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapReport {
    pub scheme: Scheme,
    pub regime: Regime,
    pub split: Split,
    pub d_r1: f64,
    pub d_r2: f64,
    /// `None` when the outer bound has no sum constraint.
    pub d_sum: Option<f64>,
    pub analytic_bound_r1: Option<f64>,
    pub analytic_bound_r2: Option<f64>,
    pub analytic_bound_sum: Option<f64>,
    pub threshold_r1: f64,
    pub threshold_r2: f64,
    pub threshold_sum: Option<f64>,
    pub conditions: GapConditions,
}

impl GapReport {
    /// Names of the gaps that reach their guaranteed ceiling.
    pub fn threshold_violations(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        if self.d_r1 >= self.threshold_r1 {
            v.push("r1");
        }
        if self.d_r2 >= self.threshold_r2 {
            v.push("r2");
        }
        if let (Some(d), Some(t)) = (self.d_sum, self.threshold_sum) {
            if d >= t {
                v.push("sum");
            }
        }
        v
    }

    /// Names of the gaps exceeding their closed-form bound by more than
    /// `slack`.
    pub fn analytic_exceedances(&self, slack: f64) -> Vec<&'static str> {
        let over = |d: Option<f64>, b: Option<f64>| matches!((d, b), (Some(d), Some(b)) if d > b + slack);
        let mut v = Vec::new();
        if over(Some(self.d_r1), self.analytic_bound_r1) {
            v.push("r1");
        }
        if over(Some(self.d_r2), self.analytic_bound_r2) {
            v.push("r2");
        }
        if over(self.d_sum, self.analytic_bound_sum) {
            v.push("sum");
        }
        v
    }

    /// Largest gap-to-ceiling ratio.
    pub fn margin(&self) -> f64 {
        let mut m = (self.d_r1 / self.threshold_r1).max(self.d_r2 / self.threshold_r2);
        if let (Some(d), Some(t)) = (self.d_sum, self.threshold_sum) {
            m = m.max(d / t);
        }
        m
    }
}

fn log2(x: f64) -> f64 {
    x.log2()
}

/// Gap of bin-and-cancel against the genie bound at the same `lambda`.
///
/// In the weak regime the private message is received at noise level
/// (`beta*(1-lambda)*inr = 1`) when that is possible and takes all the power
/// otherwise; in the strong regimes `beta = 0`.
pub fn gap_bc(p: &ChannelParams, lambda: f64) -> Result<GapReport> {
    check_unit("lambda", lambda)?;
    let lb = 1.0 - lambda;
    let (s1, s2, i, w) = (p.snr1(), p.snr2(), p.inr(), p.w());
    let x = lb * i;
    let norm = 1.0 + w;
    let regime = p.regime();
    let mut conditions = GapConditions {
        conditions_met: true,
        ..Default::default()
    };

    let beta = match regime {
        Regime::Weak if x >= 1.0 => 1.0 / x,
        Regime::Weak => {
            conditions.treat_as_noise = true;
            1.0
        }
        _ => 0.0,
    };
    let inner = bc_region(p, PowerSplit::new(lambda, beta)?);
    let outer = genie_outer_raw(p, lambda);

    let d_r1 = (outer.r1_max - inner.r1_max).max(0.0) / norm;
    let d_r2 = (outer.r2_max - inner.r2_max).max(0.0) / norm;
    let d_sum = if inner.sum_max.is_infinite() {
        0.0
    } else {
        (outer.sum_max - inner.sum_max).max(0.0) / norm
    };

    let side = p.side_rate(lambda);
    let (a1, a2, asum) = match regime {
        Regime::Weak if !conditions.treat_as_noise => (
            log2(1.0 + s1 / (2.0 + s1)),
            (1.0 - side + log2((1.0 + lb * s2) / (1.0 + x) * i / (i + s2))).max(0.0),
            2.0 + log2(1.0 - s2 / (i + s2 + lb * i * s2 + lb * i * i)),
        ),
        Regime::Weak => (
            log2(1.0 + s1 / (2.0 + s1)),
            0.0,
            log2((1.0 + x + lb * s2) / (1.0 + lb * s2)) + log2(1.0 + 2.0 * (x * s1).sqrt() / (1.0 + x + s1)),
        ),
        _ => (0.0, 0.0, log2(1.0 + 2.0 * (lb * s1 * i).sqrt() / (1.0 + s1 + x))),
    };

    Ok(GapReport {
        scheme: Scheme::Bc,
        regime,
        split: Split::Power { lambda, beta },
        d_r1,
        d_r2,
        d_sum: Some(d_sum),
        analytic_bound_r1: Some(a1 / norm),
        analytic_bound_r2: Some(a2 / norm),
        analytic_bound_sum: Some(asum / norm),
        threshold_r1: 1.0 / norm,
        threshold_r2: 1.0 / norm,
        threshold_sum: Some(2.0 / norm),
        conditions,
    })
}

/// Side-channel fraction maximizing the decode-and-cancel uplink rate.
pub fn dc_best_lambda(p: &ChannelParams) -> f64 {
    let f = |l: f64| dc_region_raw(p, l).r2_max;
    let (l, v, _) = golden_section_max(f, 0.0, 1.0, DC_LAMBDA_TOL);
    // the optimum can sit on an end point when one link is dead
    [(0.0, f(0.0)), (1.0, f(1.0))]
        .into_iter()
        .fold((l, v), |a, b| if b.1 > a.1 { b } else { a })
        .0
}

/// Gap of decode-and-cancel at its best `lambda` against the
/// no-interference bound.
pub fn gap_dc(p: &ChannelParams) -> GapReport {
    let lambda = dc_best_lambda(p);
    let inner = dc_region_raw(p, lambda);
    let outer = no_interference_outer(p);
    let norm = 1.0 + p.w();
    let (s2, ss) = (p.snr2(), p.snr_side());
    let analytic_r2 = (p.w() >= 1.0).then(|| c(s2 * s2 / (s2 + ss + s2 * ss)) / norm);
    GapReport {
        scheme: Scheme::Dc,
        regime: p.regime(),
        split: Split::Lambda { lambda },
        d_r1: (outer.r1_max - inner.r1_max).max(0.0) / norm,
        d_r2: (outer.r2_max - inner.r2_max).max(0.0) / norm,
        d_sum: None,
        analytic_bound_r1: Some(0.0),
        analytic_bound_r2: analytic_r2,
        analytic_bound_sum: None,
        threshold_r1: 1.0 / norm,
        threshold_r2: 1.0 / norm,
        threshold_sum: None,
        conditions: GapConditions {
            conditions_met: p.w() >= 1.0 && ss >= s2,
            ..Default::default()
        },
    }
}

/// Gap of estimate-and-cancel at `k = sqrt(2) - 1` against the
/// no-interference bound.
pub fn gap_ec(p: &ChannelParams) -> Result<GapReport> {
    let k = EcScale::half_bit();
    let inner = ec_region(p, k)?;
    let outer = no_interference_outer(p);
    let norm = 1.0 + p.w();
    let (s1, s2, i, ss) = (p.snr1(), p.snr2(), p.inr(), p.snr_side());
    let kk = k.k();
    let scale = (1.0 + kk) * (1.0 + kk);
    let g = kk * kk * ss / scale;
    let a1 = log2((1.0 + s1) * (1.0 + g + i / scale) / ((1.0 + g) * (1.0 + s1) + i / scale));
    let a2 = log2((1.0 + s2) * scale / (scale + s2));
    Ok(GapReport {
        scheme: Scheme::Ec,
        regime: p.regime(),
        split: Split::Scale { k: kk },
        d_r1: (outer.r1_max - inner.r1_max).max(0.0) / norm,
        d_r2: (outer.r2_max - inner.r2_max).max(0.0) / norm,
        d_sum: None,
        analytic_bound_r1: Some(a1 / norm),
        analytic_bound_r2: Some(a2 / norm),
        analytic_bound_sum: None,
        threshold_r1: 1.0 / norm,
        threshold_r2: 1.0 / norm,
        threshold_sum: None,
        conditions: GapConditions {
            conditions_met: ss >= EC_THRESHOLD_FACTOR * (i - 2.0),
            treat_as_noise: false,
            non_integer_w: p.w().fract() != 0.0,
        },
    })
}

/// Setup of a randomized gap search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapSuiteConfig {
    pub scheme: Scheme,
    pub draws: usize,
    pub seed: u64,
    /// Fixed bandwidth ratio; drawn per sample when `None`.
    pub w: Option<f64>,
    /// Only draw parameters satisfying the scheme's gap hypotheses.
    pub constrain_conditions: bool,
}

const DB_MAX: f64 = 60.0;
const W_CHOICES: [f64; 4] = [0.0, 0.5, 1.0, 2.0];
const W_CHOICES_WIDE: [f64; 3] = [1.0, 2.0, 3.0];

fn log_uniform_db<R: Rng>(rng: &mut R, lo_db: f64, hi_db: f64) -> f64 {
    if hi_db <= lo_db {
        return db_to_linear(lo_db);
    }
    db_to_linear(rng.gen_range(lo_db..hi_db))
}

/// Draws the parameters (and `lambda` for BC) of sample `index`.
pub fn gap_suite_draw(cfg: &GapSuiteConfig, index: u64) -> Result<(ChannelParams, f64)> {
    let mut rng = draw_rng(cfg.seed, index);
    let s1 = log_uniform_db(&mut rng, 0.0, DB_MAX);
    let s2 = log_uniform_db(&mut rng, 0.0, DB_MAX);
    let i = log_uniform_db(&mut rng, 0.0, DB_MAX);
    let mut ss = log_uniform_db(&mut rng, 0.0, DB_MAX);
    let lambda = rng.gen_range(0..=100) as f64 / 100.0;
    let pick = |rng: &mut rand_chacha::ChaCha8Rng, xs: &[f64]| xs[rng.gen_range(0..xs.len())];
    let w = match (cfg.w, cfg.scheme, cfg.constrain_conditions) {
        (Some(w), _, _) => w,
        (None, Scheme::Dc, true) => pick(&mut rng, &W_CHOICES[2..]),
        (None, Scheme::Ec, _) => pick(&mut rng, &W_CHOICES_WIDE),
        (None, _, _) => pick(&mut rng, &W_CHOICES),
    };
    if cfg.constrain_conditions {
        match cfg.scheme {
            Scheme::Dc => {
                let lo = linear_to_db(s2)?;
                ss = log_uniform_db(&mut rng, lo, DB_MAX.max(lo)).max(s2);
            }
            Scheme::Ec => {
                let thr = EC_THRESHOLD_FACTOR * (i - 2.0);
                if thr > 1.0 {
                    let lo = linear_to_db(thr)?;
                    ss = log_uniform_db(&mut rng, lo, lo + 20.0).max(thr);
                }
            }
            _ => {}
        }
    }
    Ok((ChannelParams::new(s1, s2, i, ss, w)?, lambda))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WorstDraw {
    pub index: u64,
    pub params: ChannelParams,
    pub report: GapReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapSuiteReport {
    pub scheme: Scheme,
    pub draws: usize,
    pub seed: u64,
    pub normalization: &'static str,
    pub draws_meeting_conditions: usize,
    pub max_d_r1: f64,
    pub max_d_r2: f64,
    pub max_d_sum: Option<f64>,
    /// Guaranteed ceilings in bits before dividing by `1 + w`.
    pub ceiling_r1_bits: f64,
    pub ceiling_r2_bits: f64,
    pub ceiling_sum_bits: Option<f64>,
    /// Draws meeting the hypotheses whose gap reaches its ceiling.
    pub violations: usize,
    /// Draws whose gap exceeds a closed-form bound (weak regime for BC).
    pub analytic_exceedances: usize,
    /// BC only: strong-regime draws whose sum gap exceeds the closed-form
    /// genie-term-only expression.
    pub strong_sum_expression_exceedances: usize,
    pub worst: Option<WorstDraw>,
}

pub const ANALYTIC_SLACK: f64 = 1e-9;

pub fn run_gap_suite(cfg: &GapSuiteConfig) -> Result<GapSuiteReport> {
    if cfg.scheme == Scheme::Cc || cfg.scheme == Scheme::NoSc {
        return Err(Error::Precondition(format!(
            "no gap guarantee for scheme {}",
            cfg.scheme
        )));
    }
    if let Some(w) = cfg.w {
        check_finite_nonneg("w", w)?;
        if cfg.scheme == Scheme::Ec && w < 1.0 {
            return Err(Error::Precondition(format!(
                "estimate-and-cancel requires w >= 1, got w = {w}"
            )));
        }
    }
    let reports: Vec<Result<(ChannelParams, GapReport)>> = (0..cfg.draws as u64)
        .into_par_iter()
        .map(|idx| {
            let (p, lambda) = gap_suite_draw(cfg, idx)?;
            let r = match cfg.scheme {
                Scheme::Bc => gap_bc(&p, lambda)?,
                Scheme::Dc => gap_dc(&p),
                _ => gap_ec(&p)?,
            };
            Ok((p, r))
        })
        .collect();

    let (ceil_sum, with_sum) = match cfg.scheme {
        Scheme::Bc => (Some(2.0), true),
        _ => (None, false),
    };
    let mut out = GapSuiteReport {
        scheme: cfg.scheme,
        draws: cfg.draws,
        seed: cfg.seed,
        normalization: "per-total-bandwidth",
        draws_meeting_conditions: 0,
        max_d_r1: 0.0,
        max_d_r2: 0.0,
        max_d_sum: with_sum.then_some(0.0),
        ceiling_r1_bits: 1.0,
        ceiling_r2_bits: 1.0,
        ceiling_sum_bits: ceil_sum,
        violations: 0,
        analytic_exceedances: 0,
        strong_sum_expression_exceedances: 0,
        worst: None,
    };
    let mut worst_margin = f64::NEG_INFINITY;
    for (idx, r) in reports.into_iter().enumerate() {
        let (p, rep) = r?;
        if !rep.conditions.conditions_met {
            continue;
        }
        out.draws_meeting_conditions += 1;
        out.max_d_r1 = out.max_d_r1.max(rep.d_r1);
        out.max_d_r2 = out.max_d_r2.max(rep.d_r2);
        if let (Some(m), Some(d)) = (out.max_d_sum.as_mut(), rep.d_sum) {
            *m = m.max(d);
        }
        if !rep.threshold_violations().is_empty() {
            out.violations += 1;
        }
        let exceed = rep.analytic_exceedances(ANALYTIC_SLACK);
        if cfg.scheme == Scheme::Bc && rep.regime != Regime::Weak {
            if exceed.iter().any(|&e| e != "sum") {
                out.analytic_exceedances += 1;
            }
            if exceed.contains(&"sum") {
                out.strong_sum_expression_exceedances += 1;
            }
        } else if !exceed.is_empty() {
            out.analytic_exceedances += 1;
        }
        let m = rep.margin();
        if m > worst_margin {
            worst_margin = m;
            out.worst = Some(WorstDraw {
                index: idx as u64,
                params: p,
                report: rep,
            });
        }
    }
    Ok(out)
}

/// A multiplexing gain together with the point it was evaluated at.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MGainPoint {
    pub mu: f64,
    pub nu: f64,
    pub w: f64,
    pub scheme: Scheme,
    pub gain: f64,
    /// EC evaluated at a bandwidth ratio that is not a whole number.
    pub non_integer_w: bool,
}

/// Sum rate in units of the single-user capacity at the common SNR.
pub fn mgain_finite(p: &ChannelParams, sum_rate: f64) -> Result<f64> {
    let (s1, s2) = (p.snr1(), p.snr2());
    if (s1 - s2).abs() > 1e-12 * s1.max(s2) {
        return Err(Error::Precondition(format!(
            "multiplexing gain needs snr1 = snr2, got {s1} and {s2}"
        )));
    }
    check_finite_nonneg("sum_rate", sum_rate)?;
    let single = c(s1);
    if single <= 0.0 {
        return Err(Error::Domain("multiplexing gain undefined at zero SNR".into()));
    }
    Ok(sum_rate / single)
}

/// High-SNR multiplexing gain with `inr = snr^mu` and `snr_side = snr^nu`.
pub fn mgain_asymptotic(scheme: Scheme, mu: f64, nu: f64, w: f64) -> Result<f64> {
    check_finite_nonneg("mu", mu)?;
    check_finite_nonneg("nu", nu)?;
    check_finite_nonneg("w", w)?;
    let wn = w * nu;
    Ok(match scheme {
        Scheme::NoSc => no_sc_gain(mu),
        Scheme::Bc if mu < 1.0 => (2.0 + wn - mu).min(2.0),
        Scheme::Bc => (mu + wn).min(2.0),
        Scheme::Cc if mu < 1.0 => (2.0 + wn - mu).min(2.0),
        Scheme::Cc | Scheme::Dc => (1.0 + wn).min(2.0),
        Scheme::Ec => {
            if w < 1.0 {
                return Err(Error::Precondition(format!(
                    "estimate-and-cancel requires w >= 1, got w = {w}"
                )));
            }
            if mu < nu + 1.0 {
                (2.0 + nu - mu).min(2.0)
            } else {
                1.0
            }
        }
    })
}

fn no_sc_gain(mu: f64) -> f64 {
    if mu < 1.0 {
        2.0 - mu
    } else if mu < 2.0 {
        mu
    } else {
        2.0
    }
}

pub fn mgain_point(scheme: Scheme, mu: f64, nu: f64, w: f64) -> Result<MGainPoint> {
    Ok(MGainPoint {
        mu,
        nu,
        w,
        scheme,
        gain: mgain_asymptotic(scheme, mu, nu, w)?,
        non_integer_w: scheme == Scheme::Ec && w.fract() != 0.0,
    })
}

/// Asymptotic gain of bin-and-cancel relative to no side-channel.
pub fn mgain_improvement(mu: f64, nu: f64, w: f64) -> Result<f64> {
    check_finite_nonneg("mu", mu)?;
    check_finite_nonneg("nu", nu)?;
    check_finite_nonneg("w", w)?;
    let wn = w * nu;
    Ok(if mu < 1.0 {
        (2.0 / (2.0 - mu)).min(1.0 + wn / (2.0 - mu))
    } else if mu < 2.0 {
        (2.0 / mu).min(1.0 + wn / mu)
    } else {
        1.0
    })
}
