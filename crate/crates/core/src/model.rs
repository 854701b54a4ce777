//! Channel parameterization and the capacity primitives every other module
//! builds on.
//!
//! All power ratios are linear and normalized by the noise power; rates are
//! in bits/s/Hz of main-channel bandwidth (the main bandwidth is the unit, so
//! the side-channel bandwidth is the ratio `w`).

use std::f64::consts::LN_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_finite_nonneg, check_unit, Error, Result};

/// Normalized link qualities of the three-node network plus side-channel.
///
/// `snr1` is the downlink (base station to M2), `snr2` the uplink (M1 to base
/// station), `inr` the inter-node interference seen at M2 and `snr_side` the
/// M1 to M2 side-channel, all at full M1 power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelParams {
    snr1: f64,
    snr2: f64,
    inr: f64,
    snr_side: f64,
    w: f64,
}

impl ChannelParams {
    pub fn new(snr1: f64, snr2: f64, inr: f64, snr_side: f64, w: f64) -> Result<Self> {
        check_finite_nonneg("snr1", snr1)?;
        check_finite_nonneg("snr2", snr2)?;
        check_finite_nonneg("inr", inr)?;
        check_finite_nonneg("snr_side", snr_side)?;
        check_finite_nonneg("w", w)?;
        Ok(Self {
            snr1,
            snr2,
            inr,
            snr_side,
            w,
        })
    }

    /// Symmetric high-SNR parameterization: `snr1 = snr2 = snr`,
    /// `inr = snr^mu`, `snr_side = snr^nu`.
    pub fn from_exponents(snr: f64, mu: f64, nu: f64, w: f64) -> Result<Self> {
        check_finite_nonneg("snr", snr)?;
        check_finite_nonneg("mu", mu)?;
        check_finite_nonneg("nu", nu)?;
        Self::new(snr, snr, snr.powf(mu), snr.powf(nu), w)
    }

    pub fn snr1(&self) -> f64 {
        self.snr1
    }

    pub fn snr2(&self) -> f64 {
        self.snr2
    }

    pub fn inr(&self) -> f64 {
        self.inr
    }

    pub fn snr_side(&self) -> f64 {
        self.snr_side
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn with_w(self, w: f64) -> Result<Self> {
        Self::new(self.snr1, self.snr2, self.inr, self.snr_side, w)
    }

    pub fn with_snr_side(self, snr_side: f64) -> Result<Self> {
        Self::new(self.snr1, self.snr2, self.inr, snr_side, self.w)
    }

    pub fn with_inr(self, inr: f64) -> Result<Self> {
        Self::new(self.snr1, self.snr2, inr, self.snr_side, self.w)
    }

    pub fn regime(&self) -> Regime {
        classify_regime(self)
    }

    /// Rate delivered by the side-channel when a fraction `lambda` of M1's
    /// power is spent on it.
    pub(crate) fn side_rate(&self, lambda: f64) -> f64 {
        wc(self.w, lambda * self.snr_side)
    }

    /// `(1 + lambda*snr_side/w)^w`, computed through the side rate so that
    /// `w = 0` yields exactly 1.
    pub(crate) fn side_gain(&self, lambda: f64) -> f64 {
        self.side_rate(lambda).exp2()
    }

    /// `side_gain - 1` without cancellation for small side rates.
    pub(crate) fn side_gain_m1(&self, lambda: f64) -> f64 {
        (self.side_rate(lambda) * LN_2).exp_m1()
    }
}

/// Fractions of M1's power: `lambda` on the side-channel, and `beta` of the
/// remaining main-channel power on the private message.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerSplit {
    lambda: f64,
    beta: f64,
}

impl PowerSplit {
    pub fn new(lambda: f64, beta: f64) -> Result<Self> {
        check_unit("lambda", lambda)?;
        check_unit("beta", beta)?;
        Ok(Self { lambda, beta })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn lambda_bar(&self) -> f64 {
        1.0 - self.lambda
    }

    pub fn beta_bar(&self) -> f64 {
        1.0 - self.beta
    }
}

/// Amplitude scaling of the waveform copy sent by estimate-and-cancel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EcScale {
    k: f64,
}

impl EcScale {
    pub fn new(k: f64) -> Result<Self> {
        check_finite_nonneg("k", k)?;
        Ok(Self { k })
    }

    /// The scaling used by the half-bit analysis, `sqrt(2) - 1`.
    pub fn half_bit() -> Self {
        Self {
            k: std::f64::consts::SQRT_2 - 1.0,
        }
    }

    pub fn k(&self) -> f64 {
        self.k
    }
}

/// The free parameter a scheme was evaluated at.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Split {
    /// Side-channel power fraction only (CC, DC, outer bounds).
    Lambda { lambda: f64 },
    /// Side-channel and private-message fractions (BC).
    Power { lambda: f64, beta: f64 },
    /// Waveform scaling (EC).
    Scale { k: f64 },
}

impl Split {
    /// Side-channel power fraction, or the EC scaling factor.
    pub fn lambda_or_k(&self) -> f64 {
        match *self {
            Split::Lambda { lambda } | Split::Power { lambda, .. } => lambda,
            Split::Scale { k } => k,
        }
    }
}

impl From<PowerSplit> for Split {
    fn from(s: PowerSplit) -> Self {
        Split::Power {
            lambda: s.lambda,
            beta: s.beta,
        }
    }
}

impl From<EcScale> for Split {
    fn from(k: EcScale) -> Self {
        Split::Scale { k: k.k }
    }
}

/// Interference regime of the main channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Weak,
    Strong,
    VeryStrong,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Weak => "weak",
            Regime::Strong => "strong",
            Regime::VeryStrong => "very-strong",
        })
    }
}

/// Boundary points belong to the stronger regime.
pub fn classify_regime(p: &ChannelParams) -> Regime {
    if p.inr < p.snr2 {
        Regime::Weak
    } else if p.inr < p.snr2 * (1.0 + p.snr1) {
        Regime::Strong
    } else {
        Regime::VeryStrong
    }
}

/// Gaussian capacity `log2(1 + x)`.
pub fn cap(x: f64) -> Result<f64> {
    check_finite_nonneg("x", x)?;
    Ok(c(x))
}

/// Capacity of a channel of relative bandwidth `w` carrying total SNR `x`:
/// `w * log2(1 + x / w)`, defined as 0 when `w = 0`.
pub fn side_cap(w: f64, x: f64) -> Result<f64> {
    check_finite_nonneg("w", w)?;
    check_finite_nonneg("x", x)?;
    Ok(wc(w, x))
}

pub fn db_to_linear(x_db: f64) -> f64 {
    10f64.powf(x_db / 10.0)
}

pub fn linear_to_db(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(format!(
            "linear_to_db needs a positive finite ratio, got {x}"
        )));
    }
    Ok(10.0 * x.log10())
}

// Unchecked forms used on validated inputs.

#[inline]
pub(crate) fn c(x: f64) -> f64 {
    x.ln_1p() / LN_2
}

#[inline]
pub(crate) fn wc(w: f64, x: f64) -> f64 {
    if w == 0.0 {
        0.0
    } else {
        w * c(x / w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(snr1: f64, snr2: f64, inr: f64) -> ChannelParams {
        ChannelParams::new(snr1, snr2, inr, 0.0, 0.0).unwrap()
    }

    #[test]
    fn cap_values() {
        assert_eq!(cap(0.0).unwrap(), 0.0);
        assert!((cap(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((cap(3.0).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn cap_rejects_bad_input() {
        assert!(matches!(cap(-1.0), Err(Error::Domain(_))));
        assert!(matches!(cap(f64::NAN), Err(Error::Domain(_))));
        assert!(matches!(cap(f64::INFINITY), Err(Error::Domain(_))));
    }

    #[test]
    fn side_cap_values() {
        assert_eq!(side_cap(0.0, 5.0).unwrap(), 0.0);
        assert!((side_cap(1.0, 3.0).unwrap() - 2.0).abs() < 1e-15);
        assert!((side_cap(2.0, 2.0).unwrap() - 2.0).abs() < 1e-15);
        assert!(side_cap(-1.0, 1.0).is_err());
        assert!(side_cap(1.0, -1.0).is_err());
    }

    #[test]
    fn side_cap_vanishes_with_bandwidth() {
        for x in [0.0, 1.0, 1e3, 1e6] {
            assert!(side_cap(1e-9, x).unwrap().abs() < 1e-7);
        }
    }

    #[test]
    fn regimes() {
        assert_eq!(params(10.0, 10.0, 5.0).regime(), Regime::Weak);
        assert_eq!(params(10.0, 10.0, 50.0).regime(), Regime::Strong);
        assert_eq!(params(10.0, 10.0, 120.0).regime(), Regime::VeryStrong);
    }

    #[test]
    fn regime_ties_go_to_the_stronger_side() {
        assert_eq!(params(10.0, 10.0, 10.0).regime(), Regime::Strong);
        assert_eq!(params(10.0, 10.0, 110.0).regime(), Regime::VeryStrong);
        // all-zero channel: inr = snr2 = 0
        assert_eq!(params(0.0, 0.0, 0.0).regime(), Regime::VeryStrong);
    }

    #[test]
    fn decibels() {
        assert!((db_to_linear(15.0) - 31.622_776_601_683_79).abs() < 1e-10);
        assert_eq!(db_to_linear(0.0), 1.0);
        assert!((linear_to_db(100.0).unwrap() - 20.0).abs() < 1e-12);
        assert!(linear_to_db(0.0).is_err());
        for db in [-30.0, -3.0, 0.5, 17.0, 60.0] {
            let back = linear_to_db(db_to_linear(db)).unwrap();
            assert!((back - db).abs() <= 1e-12 * db.abs().max(1.0));
        }
    }

    #[test]
    fn params_validation() {
        assert!(ChannelParams::new(-1.0, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(ChannelParams::new(1.0, 1.0, f64::NAN, 1.0, 1.0).is_err());
        assert!(ChannelParams::new(1.0, 1.0, 1.0, 1.0, 3.5).is_ok());
        assert!(PowerSplit::new(1.1, 0.0).is_err());
        assert!(PowerSplit::new(0.5, -0.1).is_err());
        assert!(EcScale::new(-0.5).is_err());
    }

    #[test]
    fn side_gain_at_zero_bandwidth_is_one() {
        let p = ChannelParams::new(1.0, 1.0, 1.0, 100.0, 0.0).unwrap();
        assert_eq!(p.side_gain(0.7), 1.0);
        assert_eq!(p.side_gain_m1(0.7), 0.0);
        let p = p.with_w(2.0).unwrap();
        // (1 + 0.5*100/2)^2 = 26^2
        assert!((p.side_gain(0.5) - 676.0).abs() < 1e-9);
    }
}
