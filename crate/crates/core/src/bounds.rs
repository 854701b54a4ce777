//! Outer bounds on the capacity region and the asymptotic sum capacity
//! without a side-channel.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_finite_nonneg, check_unit, Error, Result};
use crate::geometry::{pareto_filter, pentagon_frontier, FrontierSample};
use crate::model::{c, ChannelParams, Regime, Split};
use crate::optimize::golden_section_max;
use crate::schemes::RatePentagon;

pub const DEFAULT_ENVELOPE_RESOLUTION: f64 = 1e-3;
const ENVELOPE_REFINE_TOL: f64 = 1e-6;
const ENVELOPE_FACE_SAMPLES: usize = 8;

/// Genie-aided outer bound at one side-channel power fraction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OuterBoundPoint {
    pub lambda: f64,
    pub pentagon: RatePentagon,
}

/// Each user alone on its link.
pub fn no_interference_outer(p: &ChannelParams) -> RatePentagon {
    RatePentagon::rectangle(c(p.snr1()), c(p.snr2()))
}

pub fn genie_outer(p: &ChannelParams, lambda: f64) -> Result<OuterBoundPoint> {
    check_unit("lambda", lambda)?;
    Ok(OuterBoundPoint {
        lambda,
        pentagon: genie_outer_raw(p, lambda),
    })
}

pub(crate) fn genie_outer_raw(p: &ChannelParams, lambda: f64) -> RatePentagon {
    let lb = 1.0 - lambda;
    let (s1, s2, i) = (p.snr1(), p.snr2(), p.inr());
    let x = lb * i;
    let sum = c(lb * s2 / (1.0 + x)) + p.side_rate(lambda) + c(s1 + x + 2.0 * (lb * s1 * i).sqrt());
    RatePentagon::raw(c(s1), c(lb * s2), sum)
}

/// Upper-right frontier of the union of [`genie_outer`] over all `lambda`,
/// sampled on a grid of spacing `grid_resolution` and refined around the
/// largest sum rate.
pub fn genie_outer_envelope(p: &ChannelParams, grid_resolution: f64) -> Result<Vec<FrontierSample>> {
    if !(grid_resolution > 0.0 && grid_resolution <= 0.1) {
        return Err(Error::Domain(format!(
            "grid resolution must lie in (0, 0.1], got {grid_resolution}"
        )));
    }
    let n = (1.0 / grid_resolution).ceil() as usize;
    let mut lambdas: Vec<f64> = (0..=n).map(|i| (i as f64 / n as f64).min(1.0)).collect();

    let best = lambdas
        .iter()
        .enumerate()
        .map(|(i, &l)| (i, genie_outer_raw(p, l).max_sum()))
        .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a })
        .0;
    let lo = lambdas[best.saturating_sub(1)];
    let hi = lambdas[(best + 1).min(n)];
    let (l_star, _, _) = golden_section_max(|l| genie_outer_raw(p, l).max_sum(), lo, hi, ENVELOPE_REFINE_TOL);
    lambdas.push(l_star);

    let samples: Vec<FrontierSample> = lambdas
        .par_iter()
        .flat_map_iter(|&lambda| {
            pentagon_frontier(&genie_outer_raw(p, lambda), ENVELOPE_FACE_SAMPLES)
                .into_iter()
                .map(move |q| FrontierSample {
                    r1: q.r1,
                    r2: q.r2,
                    split: Some(Split::Lambda { lambda }),
                })
        })
        .collect();
    Ok(pareto_filter(samples))
}

/// High-SNR sum capacity of the Z-channel with no side-channel.
pub fn no_sc_asymptotic_sum(p: &ChannelParams) -> f64 {
    let (s1, s2, i) = (p.snr1(), p.snr2(), p.inr());
    match p.regime() {
        Regime::Weak => c(s2) + c(s1 / (1.0 + i)),
        Regime::Strong => c(s1 + i),
        Regime::VeryStrong => c(s1) + c(s2),
    }
}

/// Interference level at which the weak-regime sum upper bound switches
/// branch.
pub fn inr_star(snr1: f64, snr2: f64) -> Result<f64> {
    check_finite_nonneg("snr1", snr1)?;
    check_finite_nonneg("snr2", snr2)?;
    Ok(2.0 * snr1 + snr2 * (1.0 + snr1) - 2.0 * (snr1 * (snr1 + snr2 + snr1 * snr2)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{contains, frontier_gap, RatePoint};

    fn params(s1: f64, s2: f64, i: f64, ss: f64, w: f64) -> ChannelParams {
        ChannelParams::new(s1, s2, i, ss, w).unwrap()
    }

    #[test]
    fn no_interference_values() {
        let z = no_interference_outer(&params(0.0, 0.0, 3.0, 1.0, 1.0));
        assert_eq!((z.r1_max, z.r2_max), (0.0, 0.0));
        assert!(z.sum_max.is_infinite());
        let o = no_interference_outer(&params(10.0, 10.0, 3.0, 1.0, 1.0));
        assert!((o.r1_max - 11f64.log2()).abs() < 1e-15);
        assert!((o.r2_max - 11f64.log2()).abs() < 1e-15);
    }

    #[test]
    fn genie_hand_values() {
        let g = genie_outer(&params(7.0, 5.0, 0.0, 3.0, 1.0), 0.0).unwrap().pentagon;
        assert!((g.sum_max - (6f64.log2() + 8f64.log2())).abs() < 1e-12);

        let g = genie_outer(&params(10.0, 10.0, 50.0, 0.0, 0.0), 0.0).unwrap().pentagon;
        let want = (1.0f64 + 10.0 / 51.0).log2() + (61.0 + 2.0 * 500f64.sqrt()).log2();
        assert!((g.sum_max - want).abs() < 1e-12);
        assert!((g.sum_max - 6.9824).abs() < 1e-4);

        let p = params(10.0, 10.0, 50.0, 30.0, 2.0);
        let g = genie_outer(&p, 1.0).unwrap().pentagon;
        assert_eq!(g.r2_max, 0.0);
        assert!((g.sum_max - (2.0 * (1.0f64 + 15.0).log2() + 11f64.log2())).abs() < 1e-12);
        assert!(genie_outer(&p, 1.5).is_err());
    }

    #[test]
    fn envelope_without_interference_is_the_corner() {
        let p = params(10.0, 20.0, 0.0, 5.0, 1.0);
        let env = genie_outer_envelope(&p, 1e-2).unwrap();
        let o = no_interference_outer(&p);
        let best = env.iter().map(|s| s.r1 + s.r2).fold(0.0, f64::max);
        assert!((best - o.r1_max - o.r2_max).abs() < 1e-12);
        let corner = [RatePoint { r1: o.r1_max, r2: o.r2_max }];
        let pts: Vec<_> = env.iter().map(|s| s.point()).collect();
        assert!(frontier_gap(&pts, &corner).unwrap() < 1e-12);
    }

    #[test]
    fn envelope_without_side_channel_is_lambda_zero() {
        let p = params(100.0, 30.0, 20.0, 1e3, 0.0);
        let g0 = genie_outer_raw(&p, 0.0);
        let env = genie_outer_envelope(&p, 1e-2).unwrap();
        for s in &env {
            assert!(contains(&g0, s.point(), 1e-12).unwrap());
        }
        let face: Vec<_> = pentagon_frontier(&g0, ENVELOPE_FACE_SAMPLES);
        let pts: Vec<_> = env.iter().map(|s| s.point()).collect();
        assert!(frontier_gap(&pts, &face).unwrap() < 1e-12);
    }

    #[test]
    fn envelope_rejects_bad_resolution() {
        let p = params(1.0, 1.0, 1.0, 1.0, 1.0);
        assert!(genie_outer_envelope(&p, 0.0).is_err());
        assert!(genie_outer_envelope(&p, 0.2).is_err());
    }

    #[test]
    fn asymptotic_sum_branches() {
        let w = no_sc_asymptotic_sum(&params(10.0, 10.0, 5.0, 0.0, 0.0));
        assert!((w - (11f64.log2() + (1.0f64 + 10.0 / 6.0).log2())).abs() < 1e-12);
        assert!((w - 4.8744).abs() < 1e-4);
        let s = no_sc_asymptotic_sum(&params(10.0, 10.0, 50.0, 0.0, 0.0));
        assert!((s - 61f64.log2()).abs() < 1e-12);
        let v = no_sc_asymptotic_sum(&params(10.0, 10.0, 200.0, 0.0, 0.0));
        assert!((v - 2.0 * 11f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn inr_star_values() {
        assert!((inr_star(10.0, 10.0).unwrap() - (130.0 - 2.0 * 1200f64.sqrt())).abs() < 1e-12);
        assert!((inr_star(10.0, 10.0).unwrap() - 60.718).abs() < 1e-3);
        assert_eq!(inr_star(0.0, 7.5).unwrap(), 7.5);
        let r = inr_star(1e6, 1e6).unwrap() / (1e6 * (1.0 + 1e6));
        assert!((0.99..=1.01).contains(&r));
        assert!(inr_star(-1.0, 1.0).is_err());
    }
}
