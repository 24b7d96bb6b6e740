//! Areal bandwidth density of 3D electrical bump arrays and TSOV/WDM optical
//! vias, and total bandwidth for area (3D) and shoreline (2.5D fiber) I/O.
//!
//! Byte convention throughout: 1 GB/s = 8 Gb/s.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absorbs representation error before flooring products that should land
/// on an integer (e.g. 400 bumps/mm^2 x 0.05).
const FLOOR_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BumpPattern {
    Square,
    Hex,
}

impl BumpPattern {
    /// Packing efficiency relative to a square lattice.
    pub fn efficiency(self) -> f64 {
        match self {
            Self::Square => 1.0,
            Self::Hex => 1.15,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Square => "square",
            Self::Hex => "hex",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpArraySpec {
    pub bump_pitch_um: f64,
    pub pattern: BumpPattern,
    pub die_edge_mm: f64,
    pub channel_datarate_gbps: f64,
    pub overhead_total: f64,
}

impl BumpArraySpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.bump_pitch_um > 0.0) {
            return Err(Error::param("bump_pitch_um", "must be > 0"));
        }
        if !(self.die_edge_mm > 0.0) {
            return Err(Error::param("die_edge_mm", "must be > 0"));
        }
        if !(self.channel_datarate_gbps >= 0.0) {
            return Err(Error::param("channel_datarate_gbps", "must be >= 0"));
        }
        if !(0.0..1.0).contains(&self.overhead_total) {
            return Err(Error::param("overhead_total", "must be in [0, 1)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpDensity {
    pub per_mm2: f64,
    /// Whole bumps per mm^2 (floor of `per_mm2`).
    pub rounded_count: u64,
}

/// Square-lattice bump density for `pitch_um`.
pub fn bump_density(pitch_um: f64) -> BumpDensity {
    let per_mm2 = (1000.0 / pitch_um).powi(2);
    BumpDensity {
        per_mm2,
        rounded_count: (per_mm2 + FLOOR_EPS).floor() as u64,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandwidthDensity {
    pub gbit_s_per_mm2: f64,
}

impl BandwidthDensity {
    pub fn gbyte_s_per_mm2(&self) -> f64 {
        self.gbit_s_per_mm2 / 8.0
    }
}

/// Channel datarate over pitch squared.
pub fn theoretical_bw_density(spec: &BumpArraySpec) -> BandwidthDensity {
    let pitch_mm = spec.bump_pitch_um * 1e-3;
    BandwidthDensity {
        gbit_s_per_mm2: spec.channel_datarate_gbps / (pitch_mm * pitch_mm),
    }
}

/// Realizable density in GB/s/mm^2: integer bump count x datarate x bump
/// efficiency x (1 - overhead).
pub fn realizable_bw_density(spec: &BumpArraySpec) -> f64 {
    let bumps = bump_density(spec.bump_pitch_um).rounded_count as f64;
    bumps * spec.channel_datarate_gbps * spec.pattern.efficiency() * (1.0 - spec.overhead_total) / 8.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PitchProfileRow {
    pub min_pitch_um: f64,
    pub max_pitch_um: f64,
    pub max_datarate_gbps: f64,
    pub overhead_total: f64,
    pub pattern: BumpPattern,
}

/// Piecewise datarate/overhead/pattern schedule over bump pitch.
///
/// Rows are half-open `[min, max)` except the last, which includes its
/// upper bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PitchProfileTable {
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub note: String,
    pub rows: Vec<PitchProfileRow>,
}

const DEFAULT_PROFILE_JSON: &str = include_str!("../data/ucie3d_profile.json");

impl Default for PitchProfileTable {
    fn default() -> Self {
        Self::from_json(DEFAULT_PROFILE_JSON).expect("shipped pitch profile is valid")
    }
}

impl PitchProfileTable {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let table: Self = serde_path_to_error::deserialize(de)
            .map_err(|e| Error::Validation(format!("pitch profile: {}: {}", e.path(), e.inner())))?;
        table.validate()?;
        Ok(table)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    /// Rows must be ordered, contiguous and non-empty.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Validation(format!("pitch profile: {msg}")));
        if self.rows.is_empty() {
            return bad("no rows".into());
        }
        for (i, r) in self.rows.iter().enumerate() {
            if !(r.min_pitch_um > 0.0 && r.max_pitch_um > r.min_pitch_um) {
                return bad(format!("rows[{i}]: need 0 < min_pitch_um < max_pitch_um"));
            }
            if !(r.max_datarate_gbps > 0.0) {
                return bad(format!("rows[{i}]: max_datarate_gbps must be > 0"));
            }
            if !(0.0..1.0).contains(&r.overhead_total) {
                return bad(format!("rows[{i}]: overhead_total must be in [0, 1)"));
            }
        }
        for (i, w) in self.rows.windows(2).enumerate() {
            if w[0].max_pitch_um != w[1].min_pitch_um {
                return bad(format!("rows[{i}] and rows[{}] are not contiguous", i + 1));
            }
        }
        Ok(())
    }

    pub fn domain_um(&self) -> (f64, f64) {
        (self.rows[0].min_pitch_um, self.rows[self.rows.len() - 1].max_pitch_um)
    }

    pub fn row_for(&self, pitch_um: f64) -> Result<&PitchProfileRow> {
        let last = self.rows.len() - 1;
        self.rows
            .iter()
            .enumerate()
            .find(|(i, r)| {
                pitch_um >= r.min_pitch_um
                    && (pitch_um < r.max_pitch_um || (*i == last && pitch_um == r.max_pitch_um))
            })
            .map(|(_, r)| r)
            .ok_or(Error::UnsupportedPitch(pitch_um))
    }

    /// Bump-array spec at `pitch_um` with datarate, overhead and pattern
    /// taken from the matching row.
    pub fn spec_for(&self, pitch_um: f64, die_edge_mm: f64) -> Result<BumpArraySpec> {
        let row = self.row_for(pitch_um)?;
        Ok(BumpArraySpec {
            bump_pitch_um: pitch_um,
            pattern: row.pattern,
            die_edge_mm,
            channel_datarate_gbps: row.max_datarate_gbps,
            overhead_total: row.overhead_total,
        })
    }
}

/// Realizable electrical density at `pitch_um` using the profile table.
pub fn realizable_bw_density_at(table: &PitchProfileTable, pitch_um: f64) -> Result<f64> {
    Ok(realizable_bw_density(&table.spec_for(pitch_um, 1.0)?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TsovWdmSpec {
    /// Fraction of bumps converted to optical vias.
    pub tsov_ratio: f64,
    pub n_wdm: u32,
    pub channel_datarate_gbps: f64,
}

impl Default for TsovWdmSpec {
    fn default() -> Self {
        Self {
            tsov_ratio: 0.02,
            n_wdm: 32,
            channel_datarate_gbps: 32.0,
        }
    }
}

impl TsovWdmSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.tsov_ratio >= 0.0 && self.tsov_ratio <= 1.0) {
            return Err(Error::param("tsov_ratio", "must be in [0, 1]"));
        }
        if self.n_wdm < 1 {
            return Err(Error::param("n_wdm", "must be >= 1"));
        }
        if !(self.channel_datarate_gbps >= 0.0) {
            return Err(Error::param("channel_datarate_gbps", "must be >= 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalDensity {
    pub tsov_per_mm2: u64,
    pub gbyte_s_per_mm2: f64,
    /// Set when no TSOV fits the ratio at this pitch.
    pub no_tsov: bool,
}

/// TSOV count (floored per mm^2) x WDM channels x channel datarate.
pub fn optical_bw_density(bump_pitch_um: f64, tsov: &TsovWdmSpec) -> OpticalDensity {
    let raw = bump_density(bump_pitch_um).per_mm2 * tsov.tsov_ratio;
    let tsov_per_mm2 = (raw + FLOOR_EPS).floor() as u64;
    OpticalDensity {
        tsov_per_mm2,
        gbyte_s_per_mm2: tsov_per_mm2 as f64 * f64::from(tsov.n_wdm) * tsov.channel_datarate_gbps / 8.0,
        no_tsov: tsov_per_mm2 == 0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThreeDModel {
    Electrical,
    Optical(TsovWdmSpec),
}

/// Density x die area, GB/s.
pub fn total_bandwidth_3d(spec: &BumpArraySpec, model: &ThreeDModel, die_edge_mm: f64) -> Result<f64> {
    spec.validate()?;
    if !(die_edge_mm > 0.0) {
        return Err(Error::param("die_edge_mm", "must be > 0"));
    }
    let density = match model {
        ThreeDModel::Electrical => realizable_bw_density(spec),
        ThreeDModel::Optical(t) => {
            t.validate()?;
            optical_bw_density(spec.bump_pitch_um, t).gbyte_s_per_mm2
        }
    };
    Ok(density * die_edge_mm * die_edge_mm)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShorelineBandwidth {
    pub fibers: u64,
    pub gbyte_s: f64,
    /// Set when the perimeter is shorter than one fiber pitch.
    pub no_fiber: bool,
}

/// Fiber-array edge I/O around the full die perimeter.
pub fn total_bandwidth_shoreline(
    die_edge_mm: f64,
    fiber_pitch_um: f64,
    n_wdm: u32,
    datarate_gbps: f64,
) -> ShorelineBandwidth {
    let perimeter_um = 4.0 * die_edge_mm * 1000.0;
    let fibers = (perimeter_um / fiber_pitch_um + FLOOR_EPS).floor() as u64;
    ShorelineBandwidth {
        fibers,
        gbyte_s: fibers as f64 * f64::from(n_wdm) * datarate_gbps / 8.0,
        no_fiber: fibers == 0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Beats,
    /// Within 1% of the baseline.
    Equal,
    Loses,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Self::Beats => "beats",
            Self::Equal => "equal",
            Self::Loses => "loses",
        }
    }

    fn compare(candidate: f64, baseline: f64) -> Self {
        if baseline > 0.0 && ((candidate - baseline) / baseline).abs() <= 0.01 {
            Self::Equal
        } else if candidate > baseline {
            Self::Beats
        } else {
            Self::Loses
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PitchMatchRow {
    pub pitch_um: f64,
    pub electrical_total_gbyte_s: f64,
    pub optical_total_gbyte_s: f64,
    pub verdict: Verdict,
}

impl PitchMatchRow {
    pub fn beats_optical(&self) -> bool {
        self.verdict == Verdict::Beats
    }
}

/// Compares realizable electrical bandwidth at each candidate pitch with a
/// fixed optical baseline on the same die.
pub fn matching_pitch_table(
    table: &PitchProfileTable,
    baseline_pitch_um: f64,
    tsov: &TsovWdmSpec,
    die_edge_mm: f64,
    candidate_pitches_um: &[f64],
) -> Result<Vec<PitchMatchRow>> {
    tsov.validate()?;
    let area = die_edge_mm * die_edge_mm;
    let optical = optical_bw_density(baseline_pitch_um, tsov).gbyte_s_per_mm2 * area;
    candidate_pitches_um
        .iter()
        .map(|&pitch_um| {
            let electrical = realizable_bw_density_at(table, pitch_um)? * area;
            Ok(PitchMatchRow {
                pitch_um,
                electrical_total_gbyte_s: electrical,
                optical_total_gbyte_s: optical,
                verdict: Verdict::compare(electrical, optical),
            })
        })
        .collect()
}

/// Pitch list of the UCIe-3D sweeps (reconstructed).
pub const STANDARD_PITCHES_UM: [f64; 11] = [1.0, 2.0, 4.0, 9.0, 16.0, 25.0, 32.0, 45.0, 55.0, 70.0, 110.0];
