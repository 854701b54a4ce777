//! Rate-region geometry: containment, sampled Pareto frontiers, frontier
//! distances, and a brute-force projection oracle for the bin-and-cancel
//! construction.
//!
//! Unions of pentagons over a continuum of splits have no finite exact form,
//! so they are carried as sampled frontiers. A frontier is a list of points
//! sorted by increasing `r1` with non-increasing `r2`; the region it stands
//! for is the down-closure of the points.

use serde::{Deserialize, Serialize};

use crate::error::{check_finite_nonneg, Error, Result};
use crate::model::Split;
use crate::schemes::{MacComponentRegions, RatePentagon};

pub const DEFAULT_ORACLE_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub r1: f64,
    pub r2: f64,
}

impl RatePoint {
    pub fn new(r1: f64, r2: f64) -> Result<Self> {
        check_finite_nonneg("r1", r1)?;
        check_finite_nonneg("r2", r2)?;
        Ok(Self { r1, r2 })
    }
}

/// A frontier point together with the split that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrontierSample {
    pub r1: f64,
    pub r2: f64,
    pub split: Option<Split>,
}

impl FrontierSample {
    pub fn point(&self) -> RatePoint {
        RatePoint {
            r1: self.r1,
            r2: self.r2,
        }
    }
}

/// True iff `pt` satisfies all three constraints of `pent` within `slack`.
pub fn contains(pent: &RatePentagon, pt: RatePoint, slack: f64) -> Result<bool> {
    check_finite_nonneg("slack", slack)?;
    Ok(pt.r1 <= pent.r1_max + slack
        && pt.r2 <= pent.r2_max + slack
        && pt.r1 + pt.r2 <= pent.sum_max + slack)
}

/// Upper-right boundary of a pentagon: its two corners plus `face_samples`
/// interior points on the sum face.
pub fn pentagon_frontier(pent: &RatePentagon, face_samples: usize) -> Vec<RatePoint> {
    let (a1, a2) = pent.r2_corner();
    let (b1, b2) = pent.r1_corner();
    let mut out = Vec::with_capacity(face_samples + 2);
    out.push(RatePoint { r1: a1, r2: a2 });
    if b1 > a1 {
        for i in 1..=face_samples {
            let t = i as f64 / (face_samples + 1) as f64;
            out.push(RatePoint {
                r1: a1 + t * (b1 - a1),
                r2: a2 + t * (b2 - a2),
            });
        }
        out.push(RatePoint { r1: b1, r2: b2 });
    }
    out
}

/// Keeps the non-dominated samples, sorted by increasing `r1`.
pub fn pareto_filter(mut samples: Vec<FrontierSample>) -> Vec<FrontierSample> {
    samples.retain(|s| s.r1.is_finite() && s.r2.is_finite());
    samples.sort_by(|a, b| b.r1.total_cmp(&a.r1).then(b.r2.total_cmp(&a.r2)));
    let mut out: Vec<FrontierSample> = Vec::with_capacity(samples.len());
    let mut best_r2 = f64::NEG_INFINITY;
    for s in samples {
        if s.r2 > best_r2 {
            best_r2 = s.r2;
            out.push(s);
        }
    }
    out.reverse();
    out
}

pub fn pareto_points(points: Vec<RatePoint>) -> Vec<RatePoint> {
    pareto_filter(
        points
            .into_iter()
            .map(|p| FrontierSample {
                r1: p.r1,
                r2: p.r2,
                split: None,
            })
            .collect(),
    )
    .into_iter()
    .map(|s| s.point())
    .collect()
}

/// Brute-force projection of the two multiple-access regions onto
/// `(R1, R2 = R20 + R22)`.
///
/// `R20` and `R22` are enumerated on a grid of spacing `grid_step`; each grid
/// pair is kept only if it is feasible for both regions, and it is paired
/// with the largest `R1` that `c2` allows at that `R20`.
pub fn fm_project_oracle(m: &MacComponentRegions, grid_step: f64) -> Result<Vec<RatePoint>> {
    if !(grid_step > 0.0 && grid_step.is_finite()) {
        return Err(Error::Domain(format!("grid_step must be positive, got {grid_step}")));
    }
    let (c1, c2) = (&m.c1, &m.c2);
    let feasible_c1 = |r20: f64, r22: f64| {
        r20 <= c1.r1_max && r22 <= c1.r2_max && r20 + r22 <= c1.sum_max
    };

    let mut points = Vec::new();
    // R22 ceiling on the grid; only shrinks as R20 grows
    let mut j: usize = 0;
    while feasible_c1(0.0, (j + 1) as f64 * grid_step) {
        j += 1;
    }
    let mut i: usize = 0;
    loop {
        let r20 = i as f64 * grid_step;
        if r20 > c2.r2_max || !feasible_c1(r20, 0.0) {
            break;
        }
        let r1 = c2.r1_max.min(c2.sum_max - r20);
        if r1 < 0.0 {
            break;
        }
        while j > 0 && !feasible_c1(r20, j as f64 * grid_step) {
            j -= 1;
        }
        points.push(RatePoint {
            r1,
            r2: r20 + j as f64 * grid_step,
        });
        i += 1;
    }
    Ok(pareto_points(points))
}

/// Smallest uniform backoff `d >= 0` such that every point of `outer`, moved
/// down by `d` in both rates, lies under the `inner` frontier.
pub fn frontier_gap(inner: &[RatePoint], outer: &[RatePoint]) -> Result<f64> {
    if inner.is_empty() || outer.is_empty() {
        return Err(Error::Domain("frontiers must be non-empty".into()));
    }
    let inner = pareto_points(inner.to_vec());
    let mut worst: f64 = 0.0;
    for p in outer {
        // along the frontier r1 grows and r2 shrinks, so the shortfall in r1
        // falls and the shortfall in r2 rises; the best partner sits at the
        // crossing
        let idx = inner.partition_point(|q| p.r1 - q.r1 > p.r2 - q.r2);
        let mut best = f64::INFINITY;
        for k in [idx.saturating_sub(1), idx.min(inner.len() - 1)] {
            let q = inner[k];
            best = best.min((p.r1 - q.r1).max(p.r2 - q.r2));
        }
        worst = worst.max(best);
    }
    Ok(worst.max(0.0))
}
