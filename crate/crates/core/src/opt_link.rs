//! Optical link budget, laser back-calculation and the electrical/optical
//! partition-length solver.

use crate::elec_energy::{self, DspBlockCost, ElectricalLinkParams};
use crate::error::{Error, Result};
use crate::units::{db_to_lin, dbm_to_w, lin_to_db};

/// Off-chip-source optical link. Losses in dB, capacitances in fF,
/// energies in fJ/bit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalLinkParams {
    pub waveguide_loss_db_per_cm: f64,
    pub coupler_loss_db: f64,
    pub n_couplers: u32,
    pub modulator_loss_db: f64,
    pub detector_responsivity_a_per_w: f64,
    pub laser_wpe: f64,
    pub c_mod_ff: f64,
    pub c_load_ff: f64,
    pub mod_driver_energy_fj: f64,
    pub rx_energy_fj: f64,
    pub link_margin_db: f64,
    pub extinction_ratio_db: f64,
}

impl Default for OpticalLinkParams {
    fn default() -> Self {
        let c_load_ff = 7.0;
        Self {
            waveguide_loss_db_per_cm: 1.0,
            coupler_loss_db: 3.0,
            n_couplers: 2,
            modulator_loss_db: 1.0,
            detector_responsivity_a_per_w: 1.0,
            laser_wpe: 0.30,
            c_mod_ff: 50.0,
            c_load_ff,
            mod_driver_energy_fj: 50.0,
            rx_energy_fj: receiver_energy(c_load_ff, crate::calibration::ACTIVITY_FACTOR, 1.0, crate::calibration::OPTICAL_TIA_ENERGY_FJ),
            link_margin_db: 2.0,
            extinction_ratio_db: 7.7,
        }
    }
}

impl OpticalLinkParams {
    pub fn validate(&self) -> Result<()> {
        let nonneg = [
            ("waveguide_loss_db_per_cm", self.waveguide_loss_db_per_cm),
            ("coupler_loss_db", self.coupler_loss_db),
            ("modulator_loss_db", self.modulator_loss_db),
            ("c_mod_ff", self.c_mod_ff),
            ("c_load_ff", self.c_load_ff),
            ("mod_driver_energy_fj", self.mod_driver_energy_fj),
            ("rx_energy_fj", self.rx_energy_fj),
            ("link_margin_db", self.link_margin_db),
        ];
        for (name, v) in nonneg {
            if !(v >= 0.0) {
                return Err(Error::param(name, format!("must be >= 0 (got {v})")));
            }
        }
        if !(self.laser_wpe > 0.0 && self.laser_wpe <= 1.0) {
            return Err(Error::param("laser_wpe", "must be in (0, 1]"));
        }
        if !(self.detector_responsivity_a_per_w > 0.0) {
            return Err(Error::param("detector_responsivity_a_per_w", "must be > 0"));
        }
        if !(self.extinction_ratio_db > 0.0) {
            return Err(Error::param("extinction_ratio_db", "must be > 0 dB"));
        }
        Ok(())
    }
}

/// Optical receiver energy: switching the detector load plus a fixed TIA cost.
pub fn receiver_energy(c_load_ff: f64, activity_factor: f64, vdd_v: f64, tia_energy_fj: f64) -> f64 {
    activity_factor * c_load_ff * vdd_v * vdd_v + tia_energy_fj
}

/// Waveguide, coupler and modulator loss in dB over `length_mm`.
pub fn optical_path_loss(params: &OpticalLinkParams, length_mm: f64) -> f64 {
    params.waveguide_loss_db_per_cm * length_mm / 10.0
        + f64::from(params.n_couplers) * params.coupler_loss_db
        + params.modulator_loss_db
}

/// (ER + 1) / (ER - 1): average power per unit OMA/2 for an NRZ stream.
fn average_to_half_oma(extinction_ratio_db: f64) -> Result<f64> {
    if extinction_ratio_db == 0.0 {
        return Err(Error::InfiniteAveragePower);
    }
    if extinction_ratio_db.is_infinite() && extinction_ratio_db > 0.0 {
        return Ok(1.0);
    }
    let er = db_to_lin(extinction_ratio_db);
    Ok((er + 1.0) / (er - 1.0))
}

/// Electrical laser power (µW) needed to deliver `sensitivity_oma_dbm`
/// through `path_loss_db` with the configured margin.
///
/// Source OMA is converted to average optical power through the extinction
/// ratio, then divided by the wall-plug efficiency.
pub fn required_laser_electrical_power(
    sensitivity_oma_dbm: f64,
    path_loss_db: f64,
    params: &OpticalLinkParams,
) -> Result<f64> {
    let source_oma_dbm = sensitivity_oma_dbm + path_loss_db + params.link_margin_db;
    let p_avg_w = 0.5 * dbm_to_w(source_oma_dbm) * average_to_half_oma(params.extinction_ratio_db)?;
    Ok(p_avg_w / params.laser_wpe * 1e6)
}

/// Forward direction of [`required_laser_electrical_power`]: OMA (dBm) that
/// reaches the receiver for a given electrical laser power.
pub fn received_oma_dbm(laser_electrical_uw: f64, path_loss_db: f64, params: &OpticalLinkParams) -> Result<f64> {
    let p_avg_w = laser_electrical_uw * 1e-6 * params.laser_wpe;
    let source_oma_w = 2.0 * p_avg_w / average_to_half_oma(params.extinction_ratio_db)?;
    Ok(lin_to_db(source_oma_w * 1e3) - path_loss_db)
}

/// Laser, modulator-driver and receiver energy per bit (fJ/bit).
pub fn optical_energy_per_bit(
    params: &OpticalLinkParams,
    length_mm: f64,
    bit_rate_gbps: f64,
    sensitivity_oma_dbm: f64,
) -> Result<f64> {
    if !(bit_rate_gbps > 0.0) {
        return Err(Error::param("bit_rate_gbps", "must be > 0"));
    }
    let laser_uw =
        required_laser_electrical_power(sensitivity_oma_dbm, optical_path_loss(params, length_mm), params)?;
    // µW / (Gb/s) = fJ/bit
    Ok(laser_uw / bit_rate_gbps + params.mod_driver_energy_fj + params.rx_energy_fj)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Technology {
    Electrical,
    Optical,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PartitionLength {
    /// Smallest length where electrical energy >= optical energy.
    Crossover { length_mm: f64 },
    /// No crossover in range; `dominant` is cheaper everywhere.
    NoCrossover { dominant: Technology },
}

impl PartitionLength {
    pub fn length_mm(&self) -> Option<f64> {
        match *self {
            Self::Crossover { length_mm } => Some(length_mm),
            Self::NoCrossover { .. } => None,
        }
    }
}

/// Bracketing scan followed by bisection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossoverSolver {
    pub max_length_mm: f64,
    pub scan_step_mm: f64,
    pub tolerance_mm: f64,
}

impl Default for CrossoverSolver {
    fn default() -> Self {
        Self {
            max_length_mm: 100.0,
            scan_step_mm: 0.1,
            tolerance_mm: 0.01,
        }
    }
}

impl CrossoverSolver {
    /// Finds the first `l` in [0, max] where `excess(l) >= 0`.
    ///
    /// `excess` is electrical minus optical energy; `None` stands for an
    /// electrical link that cannot close, which counts as electrical-worse.
    pub fn solve<F>(&self, mut excess: F) -> Result<PartitionLength>
    where
        F: FnMut(f64) -> Result<Option<f64>>,
    {
        if !(self.max_length_mm > 0.0 && self.scan_step_mm > 0.0 && self.tolerance_mm > 0.0) {
            return Err(Error::param("partition solver", "lengths and steps must be > 0"));
        }
        let mut crossed = |l: f64| -> Result<bool> { Ok(excess(l)?.map_or(true, |d| d >= 0.0)) };
        if crossed(0.0)? {
            return Ok(PartitionLength::Crossover { length_mm: 0.0 });
        }
        let steps = (self.max_length_mm / self.scan_step_mm).ceil() as usize;
        let mut lo = 0.0;
        for i in 1..=steps {
            let hi = (i as f64 * self.scan_step_mm).min(self.max_length_mm);
            if crossed(hi)? {
                let mut hi = hi;
                while hi - lo > self.tolerance_mm {
                    let mid = 0.5 * (lo + hi);
                    if crossed(mid)? {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                return Ok(PartitionLength::Crossover { length_mm: 0.5 * (lo + hi) });
            }
            lo = hi;
        }
        Ok(PartitionLength::NoCrossover {
            dominant: Technology::Electrical,
        })
    }
}

/// Electrical energy including the given DSP blocks, or `None` when the
/// channel cannot close.
pub fn electrical_with_dsp(
    e: &ElectricalLinkParams,
    dsp_blocks: &[DspBlockCost],
    length_mm: f64,
) -> Result<Option<f64>> {
    match elec_energy::electrical_energy_breakdown(e, length_mm) {
        Ok(b) => Ok(Some(b.total_fj() + elec_energy::dsp_energy(dsp_blocks, b.channel_loss_db))),
        Err(Error::LinkInfeasible { .. }) => Ok(None),
        Err(err) => Err(err),
    }
}

/// Length at which the optical link first costs no more energy per bit
/// than the electrical one. Both links run at the electrical bit rate.
pub fn partition_length(
    e: &ElectricalLinkParams,
    o: &OpticalLinkParams,
    sensitivity_oma_dbm: f64,
    dsp_blocks: &[DspBlockCost],
    solver: &CrossoverSolver,
) -> Result<PartitionLength> {
    e.validate()?;
    o.validate()?;
    solver.solve(|l| {
        let opt = optical_energy_per_bit(o, l, e.bit_rate_gbps, sensitivity_oma_dbm)?;
        Ok(electrical_with_dsp(e, dsp_blocks, l)?.map(|el| el - opt))
    })
}
