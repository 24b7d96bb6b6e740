//! Optical receiver OMA sensitivity versus total TIA input capacitance.
//!
//! Input-referred noise current is the sum of signal shot noise, laser RIN,
//! dark-current shot noise and a TIA term. The TIA term has a capacitive
//! part, `k * C^2 * NBW^3` (channel noise of the input device reflected
//! through the input capacitance), and a flat part, `4kT / R_f * NBW`. The
//! sensitivity is the OMA at which `Q * sigma(OMA) = R * OMA`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{db_to_lin, w_to_dbm, K_B, Q_E};

/// Which noise contributions are active.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseTerms {
    pub shot: bool,
    pub rin: bool,
    pub dark: bool,
    pub tia: bool,
}

impl Default for NoiseTerms {
    fn default() -> Self {
        Self {
            shot: true,
            rin: true,
            dark: true,
            tia: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RxNoiseParams {
    pub pd_capacitance_ff: f64,
    pub pd_dark_current_na: f64,
    pub responsivity_a_per_w: f64,
    pub rin_db_per_hz: f64,
    pub bit_rate_gbps: f64,
    pub target_ber: f64,
    pub bump_capacitance_ff: f64,
    pub tia_input_capacitance_ff: f64,
    pub noise_bandwidth_factor: f64,
    /// Capacitive TIA noise coefficient, A^2 / (F^2 Hz^3).
    pub tia_noise_coefficient: f64,
    pub tia_feedback_resistance_ohm: f64,
    pub temperature_k: f64,
    pub extinction_ratio_db: f64,
    pub terms: NoiseTerms,
}

impl Default for RxNoiseParams {
    /// Monolithic PD + TIA at 32 Gb/s NRZ, BER 1e-12.
    fn default() -> Self {
        Self {
            pd_capacitance_ff: 0.08,
            pd_dark_current_na: 0.72,
            responsivity_a_per_w: 0.93,
            rin_db_per_hz: -140.0,
            bit_rate_gbps: 32.0,
            target_ber: 1e-12,
            bump_capacitance_ff: 0.0,
            tia_input_capacitance_ff: 3.12,
            noise_bandwidth_factor: 0.7,
            tia_noise_coefficient: crate::calibration::TIA_NOISE_COEFFICIENT,
            tia_feedback_resistance_ohm: 5.0e3,
            temperature_k: 300.0,
            extinction_ratio_db: 7.7,
            terms: NoiseTerms::default(),
        }
    }
}

impl RxNoiseParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.target_ber > 0.0 && self.target_ber < 0.5) {
            return Err(Error::param("target_ber", "must be in (0, 0.5)"));
        }
        if !(self.responsivity_a_per_w > 0.0) {
            return Err(Error::param("responsivity_a_per_w", "must be > 0"));
        }
        for (name, v) in [
            ("pd_capacitance_ff", self.pd_capacitance_ff),
            ("bump_capacitance_ff", self.bump_capacitance_ff),
            ("tia_input_capacitance_ff", self.tia_input_capacitance_ff),
            ("pd_dark_current_na", self.pd_dark_current_na),
            ("tia_noise_coefficient", self.tia_noise_coefficient),
        ] {
            if !(v >= 0.0) {
                return Err(Error::param(name, format!("must be >= 0 (got {v})")));
            }
        }
        for (name, v) in [
            ("bit_rate_gbps", self.bit_rate_gbps),
            ("noise_bandwidth_factor", self.noise_bandwidth_factor),
            ("tia_feedback_resistance_ohm", self.tia_feedback_resistance_ohm),
            ("temperature_k", self.temperature_k),
            ("extinction_ratio_db", self.extinction_ratio_db),
        ] {
            if !(v > 0.0) {
                return Err(Error::param(name, format!("must be > 0 (got {v})")));
            }
        }
        Ok(())
    }

    /// Total input capacitance of the configured stack-up.
    pub fn c_total_ff(&self) -> f64 {
        capacitance_stackup(self.pd_capacitance_ff, self.bump_capacitance_ff, self.tia_input_capacitance_ff)
    }

    pub fn noise_bandwidth_hz(&self) -> f64 {
        self.noise_bandwidth_factor * self.bit_rate_gbps * 1e9
    }
}

/// PD + bump + TIA input capacitance, fF.
pub fn capacitance_stackup(pd_ff: f64, bump_ff: f64, tia_ff: f64) -> f64 {
    pd_ff + bump_ff + tia_ff
}

/// Gaussian BER for a decision with signal-to-noise factor `q`.
pub fn ber_from_q(q: f64) -> f64 {
    0.5 * libm::erfc(q / std::f64::consts::SQRT_2)
}

/// Inverse of [`ber_from_q`] by bisection.
pub fn q_from_ber(ber: f64) -> Result<f64> {
    if !(ber > 0.0 && ber < 0.5) {
        return Err(Error::Domain(format!("BER must be in (0, 0.5), got {ber}")));
    }
    let (mut lo, mut hi) = (0.0_f64, 40.0_f64);
    if ber_from_q(hi) > ber {
        return Err(Error::Domain(format!("BER {ber} below representable range")));
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if ber_from_q(mid) > ber {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Noise variances in A^2, one per source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseBreakdown {
    pub shot: f64,
    pub rin: f64,
    pub dark: f64,
    pub tia_capacitive: f64,
    pub tia_flat: f64,
}

impl NoiseBreakdown {
    pub fn total(&self) -> f64 {
        self.shot + self.rin + self.dark + self.tia_capacitive + self.tia_flat
    }
}

/// Ratio of average optical power to OMA for the configured extinction ratio.
fn average_over_oma(p: &RxNoiseParams) -> f64 {
    let er = db_to_lin(p.extinction_ratio_db);
    0.5 * (er + 1.0) / (er - 1.0)
}

pub fn noise_breakdown(p: &RxNoiseParams, c_total_ff: f64, oma_w: f64) -> NoiseBreakdown {
    let nbw = p.noise_bandwidth_hz();
    let i_avg = p.responsivity_a_per_w * oma_w * average_over_oma(p);
    let c = c_total_ff * 1e-15;
    let on = |enabled: bool, v: f64| if enabled { v } else { 0.0 };
    NoiseBreakdown {
        shot: on(p.terms.shot, 2.0 * Q_E * i_avg * nbw),
        rin: on(p.terms.rin, db_to_lin(p.rin_db_per_hz) * i_avg * i_avg * nbw),
        dark: on(p.terms.dark, 2.0 * Q_E * p.pd_dark_current_na * 1e-9 * nbw),
        tia_capacitive: on(p.terms.tia, p.tia_noise_coefficient * c * c * nbw.powi(3)),
        tia_flat: on(p.terms.tia, 4.0 * K_B * p.temperature_k / p.tia_feedback_resistance_ohm * nbw),
    }
}

/// Solved operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sensitivity {
    pub oma_dbm: f64,
    pub oma_w: f64,
    pub q: f64,
    pub iterations: usize,
    pub noise: NoiseBreakdown,
}

const MAX_ITERATIONS: usize = 1000;
const STEP_TOLERANCE_DB: f64 = 1e-10;

pub fn solve_sensitivity(c_total_ff: f64, p: &RxNoiseParams) -> Result<Sensitivity> {
    p.validate()?;
    if !(c_total_ff >= p.pd_capacitance_ff) {
        return Err(Error::param(
            "c_total_ff",
            format!("must be >= pd capacitance {} fF (got {c_total_ff})", p.pd_capacitance_ff),
        ));
    }
    let q = q_from_ber(p.target_ber)?;
    let oma_for = |oma_w: f64| q * noise_breakdown(p, c_total_ff, oma_w).total().sqrt() / p.responsivity_a_per_w;

    // Start from the signal-independent noise floor; the map is increasing,
    // so the iterates climb monotonically to the fixed point.
    let mut oma = oma_for(0.0);
    if oma == 0.0 {
        return Err(Error::Domain("all noise sources disabled; sensitivity is unbounded".into()));
    }
    let mut last_step_db = f64::INFINITY;
    for i in 1..=MAX_ITERATIONS {
        let next = oma_for(oma);
        last_step_db = 10.0 * (next / oma).log10();
        oma = next;
        if !oma.is_finite() {
            break;
        }
        if last_step_db.abs() < STEP_TOLERANCE_DB {
            return Ok(Sensitivity {
                oma_dbm: w_to_dbm(oma),
                oma_w: oma,
                q,
                iterations: i,
                noise: noise_breakdown(p, c_total_ff, oma),
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: MAX_ITERATIONS,
        last_step_db,
        last_oma_dbm: w_to_dbm(oma),
    })
}

/// OMA sensitivity in dBm at total input capacitance `c_total_ff`.
pub fn oma_sensitivity(c_total_ff: f64, p: &RxNoiseParams) -> Result<f64> {
    Ok(solve_sensitivity(c_total_ff, p)?.oma_dbm)
}

/// Sensitivity of a link receiver whose input is the detector load: the
/// noise model evaluated at `c_load_ff`, the link bit rate and the link's
/// detector responsivity.
pub fn link_sensitivity_dbm(
    rx: &RxNoiseParams,
    c_load_ff: f64,
    responsivity_a_per_w: f64,
    bit_rate_gbps: f64,
) -> Result<f64> {
    let p = RxNoiseParams {
        responsivity_a_per_w,
        bit_rate_gbps,
        ..*rx
    };
    oma_sensitivity(c_load_ff.max(p.pd_capacitance_ff), &p)
}

/// Reference capacitance stack-ups.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integration {
    /// PD and TIA in one process, no bump.
    Monolithic,
    /// Direct-bond interconnect pad.
    Dbi,
    /// C4 solder bump.
    C4,
}

/// Extracted bump capacitance at 5 GHz, fF.
pub const DBI_BUMP_CAPACITANCE_FF: f64 = 7.2;
pub const C4_BUMP_CAPACITANCE_FF: f64 = 31.6;
/// TIA share of the 28 fF DBI receiver, inferred as 28 - 7.2 - 0.08.
pub const DBI_RECEIVER_TIA_CAPACITANCE_FF: f64 = 20.72;
/// TIA share of the 3.2 fF monolithic receiver.
pub const MONOLITHIC_TIA_CAPACITANCE_FF: f64 = 3.12;

impl Integration {
    pub fn c_total_ff(self, pd_ff: f64) -> f64 {
        match self {
            Self::Monolithic => capacitance_stackup(pd_ff, 0.0, MONOLITHIC_TIA_CAPACITANCE_FF),
            Self::Dbi => capacitance_stackup(pd_ff, DBI_BUMP_CAPACITANCE_FF, DBI_RECEIVER_TIA_CAPACITANCE_FF),
            Self::C4 => capacitance_stackup(pd_ff, C4_BUMP_CAPACITANCE_FF, DBI_RECEIVER_TIA_CAPACITANCE_FF),
        }
    }
}
