//! Calibrated constants and the routines that produced them.
//!
//! Three model constants have no published value: the capacitive TIA noise
//! coefficient, the minimum receiver swing of the copper link, and the fixed
//! TIA energy of the optical receiver. They are fitted once against the
//! published anchors below and frozen here. `cargo run --example calibrate`
//! re-runs the fit and prints the values so a drift can be spotted; nothing
//! refits them at run time.

use crate::elec_energy::{DspBlockCost, DspBlockKind, ElectricalLinkParams};
use crate::error::{Error, Result};
use crate::opt_link::{self, CrossoverSolver, OpticalLinkParams};
use crate::rx_model::{self, RxNoiseParams};

/// Receiver capacitance of the calibration anchor (fF).
pub const ANCHOR_C_TOTAL_FF: f64 = 3.2;
/// OMA sensitivity at the anchor capacitance, 32 Gb/s, BER 1e-12 (dBm).
pub const ANCHOR_SENSITIVITY_DBM: f64 = -24.2;
/// No-DSP crossover of the 8 Gb/s copper and optical links (mm).
pub const TARGET_PARTITION_MM: f64 = 15.1;
/// Crossover once a loss-proportional DFE is added to the copper link (mm).
pub const TARGET_PARTITION_DFE_MM: f64 = 2.5;
/// Driver activity factor held fixed during the link fit.
pub const ACTIVITY_FACTOR: f64 = 0.5;

/// A^2 / (F^2 Hz^3). Fitted by [`fit_tia_noise_coefficient`].
pub const TIA_NOISE_COEFFICIENT: f64 = 1.382_720e-15;
/// mV. Fitted by [`fit_link_constants`].
pub const MIN_RECEIVER_SWING_MV: f64 = 34.5;
/// fJ/bit. Fitted by [`fit_link_constants`].
pub const OPTICAL_TIA_ENERGY_FJ: f64 = 27.4;

fn bisect(mut lo: f64, mut hi: f64, tol: f64, mut f: impl FnMut(f64) -> Result<f64>) -> Result<f64> {
    let f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Domain(format!(
            "calibration target not bracketed by [{lo}, {hi}] ({f_lo}, {f_hi})"
        )));
    }
    let rising = f_hi > f_lo;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if (f(mid)? > 0.0) == rising {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Coefficient that puts the sensitivity at `c_total_ff` on `target_dbm`,
/// all other receiver parameters as given.
pub fn fit_tia_noise_coefficient(rx: &RxNoiseParams, c_total_ff: f64, target_dbm: f64) -> Result<f64> {
    let log_k = bisect(-22.0, -8.0, 1e-12, |lk| {
        let p = RxNoiseParams {
            tia_noise_coefficient: 10f64.powf(lk),
            ..*rx
        };
        Ok(rx_model::oma_sensitivity(c_total_ff, &p)? - target_dbm)
    })?;
    Ok(10f64.powf(log_k))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkFit {
    pub min_receiver_swing_mv: f64,
    pub optical_tia_energy_fj: f64,
}

fn fine_solver() -> CrossoverSolver {
    CrossoverSolver {
        tolerance_mm: 1e-7,
        ..CrossoverSolver::default()
    }
}

fn crossover(
    e: &ElectricalLinkParams,
    o: &OpticalLinkParams,
    sensitivity_dbm: f64,
    dsp: &[DspBlockCost],
) -> Result<f64> {
    opt_link::partition_length(e, o, sensitivity_dbm, dsp, &fine_solver())?
        .length_mm()
        .ok_or_else(|| Error::Domain("no crossover while calibrating".into()))
}

/// Fits the copper receiver swing and the optical TIA energy so the no-DSP
/// and DFE crossovers land on their targets.
///
/// For a trial TIA energy the swing is solved from the no-DSP target; the
/// outer loop then moves the TIA energy until the DFE crossover matches.
pub fn fit_link_constants(
    e: &ElectricalLinkParams,
    o: &OpticalLinkParams,
    rx: &RxNoiseParams,
    vdd_v: f64,
) -> Result<LinkFit> {
    let sensitivity =
        rx_model::link_sensitivity_dbm(rx, o.c_load_ff, o.detector_responsivity_a_per_w, e.bit_rate_gbps)?;
    let dfe = [DspBlockCost::default_for(DspBlockKind::Dfe)];
    let with_tia = |tia: f64| OpticalLinkParams {
        rx_energy_fj: opt_link::receiver_energy(o.c_load_ff, e.activity_factor, vdd_v, tia),
        ..*o
    };
    let swing_for = |tia: f64| -> Result<f64> {
        let o = with_tia(tia);
        bisect(1.0, 200.0, 1e-9, |mv| {
            let e = ElectricalLinkParams {
                min_receiver_swing_mv: mv,
                ..*e
            };
            Ok(crossover(&e, &o, sensitivity, &[])? - TARGET_PARTITION_MM)
        })
    };
    let tia = bisect(10.0, 55.0, 1e-7, |tia| {
        let e = ElectricalLinkParams {
            min_receiver_swing_mv: swing_for(tia)?,
            ..*e
        };
        Ok(crossover(&e, &with_tia(tia), sensitivity, &dfe)? - TARGET_PARTITION_DFE_MM)
    })?;
    Ok(LinkFit {
        min_receiver_swing_mv: swing_for(tia)?,
        optical_tia_energy_fj: tia,
    })
}
