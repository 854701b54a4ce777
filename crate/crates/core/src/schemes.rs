//! Closed-form achievable regions of the four side-channel cancellation
//! schemes: bin-and-cancel (BC), compress-and-cancel (CC), decode-and-cancel
//! (DC) and estimate-and-cancel (EC).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_unit, Error, Result};
use crate::model::{c, ChannelParams, EcScale, PowerSplit, Regime};

/// `{R1 <= r1_max, R2 <= r2_max, R1 + R2 <= sum_max}` in bits/s/Hz.
///
/// `sum_max` is `f64::INFINITY` when the region has no sum constraint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePentagon {
    pub r1_max: f64,
    pub r2_max: f64,
    #[serde(with = "inf_as_null")]
    pub sum_max: f64,
}

impl RatePentagon {
    pub fn new(r1_max: f64, r2_max: f64, sum_max: f64) -> Result<Self> {
        let ok = r1_max.is_finite()
            && r2_max.is_finite()
            && r1_max >= 0.0
            && r2_max >= 0.0
            && (sum_max >= 0.0 || sum_max == f64::INFINITY)
            && !sum_max.is_nan();
        if !ok {
            return Err(Error::Domain(format!(
                "invalid pentagon ({r1_max}, {r2_max}, {sum_max})"
            )));
        }
        Ok(Self {
            r1_max,
            r2_max,
            sum_max,
        })
    }

    pub(crate) fn raw(r1_max: f64, r2_max: f64, sum_max: f64) -> Self {
        Self {
            r1_max: r1_max.max(0.0),
            r2_max: r2_max.max(0.0),
            sum_max: sum_max.max(0.0),
        }
    }

    /// Point-to-point rectangle with no sum constraint.
    pub fn rectangle(r1_max: f64, r2_max: f64) -> Self {
        Self::raw(r1_max, r2_max, f64::INFINITY)
    }

    /// Largest achievable `R1 + R2` inside the region.
    pub fn max_sum(&self) -> f64 {
        self.sum_max.min(self.r1_max + self.r2_max)
    }

    /// Corner with the largest `R1`, then the largest `R2` given that `R1`.
    pub fn r1_corner(&self) -> (f64, f64) {
        let r1 = self.r1_max.min(self.sum_max);
        (r1, self.r2_max.min(self.sum_max - r1).max(0.0))
    }

    /// Corner with the largest `R2`, then the largest `R1` given that `R2`.
    pub fn r2_corner(&self) -> (f64, f64) {
        let r2 = self.r2_max.min(self.sum_max);
        (self.r1_max.min(self.sum_max - r2).max(0.0), r2)
    }
}

pub(crate) mod inf_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_infinite() {
            s.serialize_none()
        } else {
            s.serialize_some(x)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

/// The two multiple-access regions whose combination yields the BC region:
/// `c1` over `(R20, R22)` decoded at the base station, `c2` over `(R1, R20)`
/// decoded at M2 with the help of the side-channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MacComponentRegions {
    pub c1: RatePentagon,
    pub c2: RatePentagon,
}

/// Scheme selector shared by the optimizer, sweeps and CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "bc")]
    Bc,
    #[serde(rename = "cc")]
    Cc,
    #[serde(rename = "dc")]
    Dc,
    #[serde(rename = "ec")]
    Ec,
    #[serde(rename = "no-sc")]
    NoSc,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [Scheme::Bc, Scheme::Cc, Scheme::Dc, Scheme::Ec, Scheme::NoSc];

    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::Bc => "bc",
            Scheme::Cc => "cc",
            Scheme::Dc => "dc",
            Scheme::Ec => "ec",
            Scheme::NoSc => "no-sc",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bc" => Ok(Scheme::Bc),
            "cc" => Ok(Scheme::Cc),
            "dc" => Ok(Scheme::Dc),
            "ec" => Ok(Scheme::Ec),
            "no-sc" | "nosc" => Ok(Scheme::NoSc),
            other => Err(Error::Precondition(format!("unknown scheme '{other}'"))),
        }
    }
}

/// Bin-and-cancel region for a fixed split.
///
/// In the strong regime the private fraction is forced to zero; in the very
/// strong regime the split is irrelevant and the point-to-point rectangle is
/// returned.
pub fn bc_region(p: &ChannelParams, s: PowerSplit) -> RatePentagon {
    match p.regime() {
        Regime::Weak => bc_weak_region(p, s.lambda(), s.beta()),
        Regime::Strong => {
            let lb = s.lambda_bar();
            RatePentagon::raw(
                c(p.snr1()),
                c(lb * p.snr2()),
                c(p.snr1() + lb * p.inr()) + p.side_rate(s.lambda()),
            )
        }
        Regime::VeryStrong => RatePentagon::rectangle(c(p.snr1()), c(p.snr2())),
    }
}

pub(crate) fn bc_weak_region(p: &ChannelParams, lambda: f64, beta: f64) -> RatePentagon {
    let lb = 1.0 - lambda;
    let bb = 1.0 - beta;
    let inr_p = beta * lb * p.inr();
    let side = p.side_rate(lambda);
    let r1 = c(p.snr1() / (1.0 + inr_p));
    let r2 = c(lb * p.snr2()).min(c(beta * lb * p.snr2()) + c(bb * lb * p.inr() / (1.0 + inr_p)) + side);
    let sum = c(beta * lb * p.snr2()) + c((p.snr1() + bb * lb * p.inr()) / (1.0 + inr_p)) + side;
    RatePentagon::raw(r1, r2, sum)
}

/// The multiple-access regions before eliminating the common/private rates.
pub fn bc_mac_components(p: &ChannelParams, s: PowerSplit) -> MacComponentRegions {
    let lb = s.lambda_bar();
    let (beta, bb) = (s.beta(), s.beta_bar());
    let inr_p = beta * lb * p.inr();
    let side = p.side_rate(s.lambda());
    let c1 = RatePentagon::raw(
        c(bb * lb * p.snr2()),
        c(beta * lb * p.snr2()),
        c(lb * p.snr2()),
    );
    let c2 = RatePentagon::raw(
        c(p.snr1() / (1.0 + inr_p)),
        c(bb * lb * p.inr() / (1.0 + inr_p)) + side,
        c((p.snr1() + bb * lb * p.inr()) / (1.0 + inr_p)) + side,
    );
    MacComponentRegions { c1, c2 }
}

/// Achievable BC sum rate for a split.
///
/// The common-message term carries `snr1` in its denominator; this is the
/// largest sum inside the weak-regime region and also reproduces the strong
/// and very strong regions at `beta = 0`.
pub fn bc_sum_rate(p: &ChannelParams, s: PowerSplit) -> f64 {
    bc_sum_rate_raw(p, s.lambda(), s.beta())
}

pub(crate) fn bc_sum_rate_raw(p: &ChannelParams, lambda: f64, beta: f64) -> f64 {
    let lb = 1.0 - lambda;
    let inr_p = beta * lb * p.inr();
    c(p.snr1() / (inr_p + 1.0))
        + c(lb * p.snr2()).min(
            c(beta * lb * p.snr2())
                + c((1.0 - beta) * lb * p.inr() / (p.snr1() + inr_p + 1.0))
                + p.side_rate(lambda),
        )
}

/// Private-message fraction maximizing [`bc_sum_rate`] at a given `lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaStar {
    pub beta: f64,
    /// The closed form was degenerate and a grid search was used instead.
    pub fallback: bool,
}

const BETA_FALLBACK_STEP: f64 = 1e-4;

pub fn bc_beta_star(p: &ChannelParams, lambda: f64) -> Result<BetaStar> {
    check_unit("lambda", lambda)?;
    if p.inr() >= p.snr2() {
        return Ok(BetaStar {
            beta: 0.0,
            fallback: false,
        });
    }
    let lb = 1.0 - lambda;
    let a = p.side_gain(lambda);
    let s1 = p.snr1();
    let y = lb * p.snr2();
    let x = lb * p.inr();
    let num = (1.0 + y) * (1.0 + s1) - a * (1.0 + s1 + x);
    let den = a * y * (1.0 + s1 + x) - x * (1.0 + y);
    let ratio = num / den;
    if den > 0.0 && ratio.is_finite() {
        return Ok(BetaStar {
            beta: ratio.clamp(0.0, 1.0),
            fallback: false,
        });
    }
    let n = (1.0 / BETA_FALLBACK_STEP).round() as usize;
    let mut best = (f64::NEG_INFINITY, 0.0);
    for i in 0..=n {
        let beta = i as f64 / n as f64;
        let v = bc_sum_rate_raw(p, lambda, beta);
        if v > best.0 {
            best = (v, beta);
        }
    }
    Ok(BetaStar {
        beta: best.1,
        fallback: true,
    })
}

/// Compress-and-cancel region. There is no sum constraint beyond
/// `r1_max + r2_max`.
pub fn cc_region(p: &ChannelParams, lambda: f64) -> Result<RatePentagon> {
    check_unit("lambda", lambda)?;
    Ok(cc_region_raw(p, lambda))
}

pub(crate) fn cc_region_raw(p: &ChannelParams, lambda: f64) -> RatePentagon {
    let lb = 1.0 - lambda;
    let s1 = p.snr1();
    let x = lb * p.inr();
    let g = p.side_gain_m1(lambda);
    let r1 = if g.is_infinite() {
        c(s1)
    } else {
        let num = s1 * (1.0 + s1 + (1.0 + s1 + x) * g);
        let den = (1.0 + s1 + x) * g + (1.0 + s1) * (1.0 + x);
        c(num / den)
    };
    let r2 = c(lb * p.snr2());
    RatePentagon::raw(r1, r2, r1 + r2)
}

/// Smallest quantization-noise variance (in units of the noise power) whose
/// Wyner-Ziv description of M1's main-channel signal fits the side-channel.
pub fn cc_quantization_variance(p: &ChannelParams, lambda: f64) -> Result<f64> {
    check_unit("lambda", lambda)?;
    let g = p.side_gain_m1(lambda);
    if g <= 0.0 {
        return Err(Error::NoCompression);
    }
    let x = (1.0 - lambda) * p.inr();
    let s1 = p.snr1();
    Ok(x * (1.0 + s1) / ((1.0 + s1 + x) * g))
}

/// Downlink rate when M2 decodes with the quantized interference description
/// of variance `q` (noise units) alongside its main-channel observation.
pub fn cc_reconstructed_r1(p: &ChannelParams, lambda: f64, q: f64) -> Result<f64> {
    check_unit("lambda", lambda)?;
    if !(q >= 0.0) {
        return Err(Error::Domain(format!("variance must be non-negative, got {q}")));
    }
    let x = (1.0 - lambda) * p.inr();
    let den = x * q + x + q;
    if den == 0.0 {
        // no interference power and a perfect description: nothing to cancel
        return Ok(c(p.snr1()));
    }
    if q.is_infinite() {
        return Ok(c(p.snr1() / (1.0 + x)));
    }
    Ok(c(p.snr1() * (x + q) / den))
}

/// Decode-and-cancel region.
pub fn dc_region(p: &ChannelParams, lambda: f64) -> Result<RatePentagon> {
    check_unit("lambda", lambda)?;
    Ok(dc_region_raw(p, lambda))
}

pub(crate) fn dc_region_raw(p: &ChannelParams, lambda: f64) -> RatePentagon {
    let r1 = c(p.snr1());
    let r2 = p.side_rate(lambda).min(c((1.0 - lambda) * p.snr2()));
    RatePentagon::raw(r1, r2, r1 + r2)
}

/// Estimate-and-cancel region. Needs a side-channel at least as wide as the
/// main channel; the side SNR enters without a bandwidth factor.
pub fn ec_region(p: &ChannelParams, k: EcScale) -> Result<RatePentagon> {
    if p.w() < 1.0 {
        return Err(Error::Precondition(format!(
            "estimate-and-cancel requires the side-channel bandwidth to be at least the \
             main-channel bandwidth (w >= 1), got w = {}",
            p.w()
        )));
    }
    Ok(ec_region_raw(p, k.k()))
}

pub(crate) fn ec_region_raw(p: &ChannelParams, k: f64) -> RatePentagon {
    let scale = (1.0 + k) * (1.0 + k);
    let side = k * k * p.snr_side() / scale;
    let r1 = c(p.snr1() * (1.0 + side) / (1.0 + side + p.inr() / scale));
    let r2 = c(p.snr2() / scale);
    RatePentagon::raw(r1, r2, r1 + r2)
}

/// Classic Z-channel (no side-channel), the `w = 0, lambda = 0` special case
/// of bin-and-cancel. In the weak regime `beta` defaults to the sum-rate
/// maximizer.
pub fn z_channel_region(p: &ChannelParams, beta: Option<f64>) -> Result<RatePentagon> {
    let z = p.with_w(0.0)?;
    let beta = match (z.regime(), beta) {
        (Regime::Weak, Some(b)) => b,
        (Regime::Weak, None) => bc_beta_star(&z, 0.0)?.beta,
        _ => 0.0,
    };
    Ok(bc_region(&z, PowerSplit::new(0.0, beta)?))
}
