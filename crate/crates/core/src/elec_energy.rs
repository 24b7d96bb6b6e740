//! Energy per bit of a copper CPW link, plus DSP block costs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tline::{self, CpwGeometry};

/// Inputs of the electrical link model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElectricalLinkParams {
    pub bit_rate_gbps: f64,
    pub vdd_v: f64,
    pub geometry: CpwGeometry,
    pub receiver_energy_fj: f64,
    pub activity_factor: f64,
    pub min_receiver_swing_mv: f64,
}

impl Default for ElectricalLinkParams {
    fn default() -> Self {
        Self {
            bit_rate_gbps: 8.0,
            vdd_v: 1.0,
            geometry: CpwGeometry::default(),
            receiver_energy_fj: 60.0,
            activity_factor: crate::calibration::ACTIVITY_FACTOR,
            min_receiver_swing_mv: crate::calibration::MIN_RECEIVER_SWING_MV,
        }
    }
}

impl ElectricalLinkParams {
    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        if !(self.bit_rate_gbps > 0.0) {
            return Err(Error::param("bit_rate_gbps", "must be > 0"));
        }
        if !(self.vdd_v > 0.0) {
            return Err(Error::param("vdd_v", "must be > 0"));
        }
        if !(self.receiver_energy_fj >= 0.0) {
            return Err(Error::param("receiver_energy_fj", "must be >= 0"));
        }
        if !(self.activity_factor > 0.0 && self.activity_factor <= 1.0) {
            return Err(Error::param("activity_factor", "must be in (0, 1]"));
        }
        if !(self.min_receiver_swing_mv > 0.0) {
            return Err(Error::param("min_receiver_swing_mv", "must be > 0"));
        }
        Ok(())
    }

    pub fn nyquist_hz(&self) -> f64 {
        self.bit_rate_gbps * 1e9 / 2.0
    }
}

/// Breakdown of one evaluation of the electrical model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElectricalEnergy {
    pub driver_fj: f64,
    pub receiver_fj: f64,
    pub launch_swing_v: f64,
    pub channel_loss_db: f64,
}

impl ElectricalEnergy {
    pub fn total_fj(&self) -> f64 {
        self.driver_fj + self.receiver_fj
    }
}

/// Channel loss at Nyquist over `length_mm`, in dB.
pub fn channel_loss_db(params: &ElectricalLinkParams, length_mm: f64) -> Result<f64> {
    let alpha = tline::cpw_attenuation(&params.geometry, params.nyquist_hz())?;
    Ok(alpha * length_mm / 10.0)
}

pub fn electrical_energy_breakdown(
    params: &ElectricalLinkParams,
    length_mm: f64,
) -> Result<ElectricalEnergy> {
    params.validate()?;
    if !(length_mm >= 0.0) {
        return Err(Error::param("length_mm", format!("must be >= 0 (got {length_mm})")));
    }
    let h = tline::vtf(&params.geometry, length_mm, params.nyquist_hz())?;
    let launch = params.min_receiver_swing_mv * 1e-3 / h;
    if launch > params.vdd_v {
        return Err(Error::LinkInfeasible {
            length_mm,
            required_swing_v: launch,
            vdd_v: params.vdd_v,
        });
    }
    let c_line = tline::line_capacitance_per_m(&params.geometry)? * length_mm * 1e-3;
    let driver_j = params.activity_factor * c_line * params.vdd_v * launch;
    Ok(ElectricalEnergy {
        driver_fj: driver_j * 1e15,
        receiver_fj: params.receiver_energy_fj,
        launch_swing_v: launch,
        channel_loss_db: -20.0 * h.log10(),
    })
}

/// Driver plus receiver energy per bit (fJ/bit) at `length_mm`.
///
/// The driver charges the line capacitance to the launch swing needed for
/// `min_receiver_swing_mv` to survive the Nyquist-frequency loss.
pub fn electrical_energy_per_bit(params: &ElectricalLinkParams, length_mm: f64) -> Result<f64> {
    Ok(electrical_energy_breakdown(params, length_mm)?.total_fj())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DspBlockKind {
    Fec,
    Ctle,
    Dfe,
    Cdr,
}

impl DspBlockKind {
    pub const ALL: [DspBlockKind; 4] = [Self::Fec, Self::Ctle, Self::Dfe, Self::Cdr];

    pub fn name(self) -> &'static str {
        match self {
            Self::Fec => "fec",
            Self::Ctle => "ctle",
            Self::Dfe => "dfe",
            Self::Cdr => "cdr",
        }
    }
}

impl std::str::FromStr for DspBlockKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::param("dsp block", format!("unknown block `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DspBlockCost {
    pub kind: DspBlockKind,
    #[serde(default)]
    pub fixed_cost_fj: f64,
    #[serde(default)]
    pub per_db_cost_fj: f64,
}

/// Literature energy costs of high-speed link blocks.
pub const DEFAULT_DSP_COSTS: [DspBlockCost; 4] = [
    DspBlockCost { kind: DspBlockKind::Fec, fixed_cost_fj: 20.0, per_db_cost_fj: 0.0 },
    DspBlockCost { kind: DspBlockKind::Dfe, fixed_cost_fj: 0.0, per_db_cost_fj: 27.0 },
    DspBlockCost { kind: DspBlockKind::Ctle, fixed_cost_fj: 50.0, per_db_cost_fj: 0.0 },
    DspBlockCost { kind: DspBlockKind::Cdr, fixed_cost_fj: 1900.0, per_db_cost_fj: 0.0 },
];

impl DspBlockCost {
    pub fn default_for(kind: DspBlockKind) -> Self {
        DEFAULT_DSP_COSTS
            .into_iter()
            .find(|b| b.kind == kind)
            .expect("every kind has a default cost")
    }

    pub fn energy_fj(&self, channel_loss_db: f64) -> f64 {
        self.fixed_cost_fj + self.per_db_cost_fj * channel_loss_db
    }
}

/// Summed DSP energy per bit for a channel with `channel_loss_db` of loss.
pub fn dsp_energy(blocks: &[DspBlockCost], channel_loss_db: f64) -> f64 {
    blocks.iter().map(|b| b.energy_fj(channel_loss_db)).sum()
}
