//! Scenario files: strict JSON with unit-suffixed keys, resolved into the
//! model parameter structs.
//!
//! Every section is optional and falls back to the built-in defaults, but
//! any key the schema does not know is an error. Unknown keys that differ
//! from a known key only in their unit suffix get a unit-mismatch hint.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bw_density::{BumpArraySpec, BumpPattern, PitchProfileTable, TsovWdmSpec};
use crate::elec_energy::{DspBlockCost, DspBlockKind, ElectricalLinkParams, DEFAULT_DSP_COSTS};
use crate::error::{Error, Result};
use crate::opt_link::{self, CrossoverSolver, OpticalLinkParams};
use crate::rx_model::{self, RxNoiseParams};
use crate::tline::CpwGeometry;

/// Environment variable naming an alternate pitch profile table.
pub const PROFILE_ENV: &str = "EPIC_LINKBENCH_PROFILE";

pub const DEFAULT_SCENARIO_JSON: &str = include_str!("../data/default.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Metadata {
    pub name: String,
    pub version: String,
    pub description: String,
}

impl Default for Metadata {
    fn default() -> Self {
        Self {
            name: "default".into(),
            version: "1".into(),
            description: String::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemSection {
    pub bit_rate_gbps: f64,
    pub vdd_v: f64,
}

impl Default for SystemSection {
    fn default() -> Self {
        Self {
            bit_rate_gbps: 8.0,
            vdd_v: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ElectricalSection {
    pub geometry: CpwGeometry,
    pub receiver_energy_fj: f64,
    pub activity_factor: f64,
    pub min_receiver_swing_mv: f64,
}

impl Default for ElectricalSection {
    fn default() -> Self {
        let e = ElectricalLinkParams::default();
        Self {
            geometry: e.geometry,
            receiver_energy_fj: e.receiver_energy_fj,
            activity_factor: e.activity_factor,
            min_receiver_swing_mv: e.min_receiver_swing_mv,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OpticalSection {
    pub waveguide_loss_db_per_cm: f64,
    pub coupler_loss_db: f64,
    pub n_couplers: u32,
    pub modulator_loss_db: f64,
    pub detector_responsivity_a_per_w: f64,
    pub laser_wpe: f64,
    pub c_mod_ff: f64,
    pub c_load_ff: f64,
    pub mod_driver_energy_fj: f64,
    /// Fixed TIA cost; the detector-load switching energy is added on top.
    pub tia_energy_fj: f64,
    pub link_margin_db: f64,
    pub extinction_ratio_db: f64,
}

impl Default for OpticalSection {
    fn default() -> Self {
        let o = OpticalLinkParams::default();
        Self {
            waveguide_loss_db_per_cm: o.waveguide_loss_db_per_cm,
            coupler_loss_db: o.coupler_loss_db,
            n_couplers: o.n_couplers,
            modulator_loss_db: o.modulator_loss_db,
            detector_responsivity_a_per_w: o.detector_responsivity_a_per_w,
            laser_wpe: o.laser_wpe,
            c_mod_ff: o.c_mod_ff,
            c_load_ff: o.c_load_ff,
            mod_driver_energy_fj: o.mod_driver_energy_fj,
            tia_energy_fj: crate::calibration::OPTICAL_TIA_ENERGY_FJ,
            link_margin_db: o.link_margin_db,
            extinction_ratio_db: o.extinction_ratio_db,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DspSection {
    /// Blocks added to the electrical link.
    pub blocks: Vec<DspBlockKind>,
    pub costs: Vec<DspBlockCost>,
}

impl Default for DspSection {
    fn default() -> Self {
        Self {
            blocks: Vec::new(),
            costs: DEFAULT_DSP_COSTS.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BumpSection {
    pub pitch_um: f64,
    pub pattern: BumpPattern,
    pub die_edge_mm: f64,
    pub channel_datarate_gbps: f64,
    pub overhead_total: f64,
}

impl Default for BumpSection {
    fn default() -> Self {
        Self {
            pitch_um: 55.0,
            pattern: BumpPattern::Hex,
            die_edge_mm: 1.0,
            channel_datarate_gbps: 32.0,
            overhead_total: 0.39,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TsovSection {
    pub tsov_ratio: f64,
    pub n_wdm: u32,
    pub channel_datarate_gbps: f64,
}

impl Default for TsovSection {
    fn default() -> Self {
        let t = TsovWdmSpec::default();
        Self {
            tsov_ratio: t.tsov_ratio,
            n_wdm: t.n_wdm,
            channel_datarate_gbps: t.channel_datarate_gbps,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShorelineSection {
    pub fiber_pitch_um: f64,
    pub n_wdm: u32,
    pub channel_datarate_gbps: f64,
}

impl Default for ShorelineSection {
    fn default() -> Self {
        Self {
            fiber_pitch_um: 127.0,
            n_wdm: 32,
            channel_datarate_gbps: 32.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LaserBudgetSection {
    /// Receiver OMA sensitivity; computed from `rx` when absent.
    pub sensitivity_dbm: Option<f64>,
    pub path_loss_db: f64,
    pub n_channels: u32,
}

impl Default for LaserBudgetSection {
    fn default() -> Self {
        Self {
            sensitivity_dbm: None,
            path_loss_db: 13.98,
            n_channels: 32,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PartitionSection {
    pub max_length_mm: f64,
    pub scan_step_mm: f64,
    pub tolerance_mm: f64,
}

impl Default for PartitionSection {
    fn default() -> Self {
        let s = CrossoverSolver::default();
        Self {
            max_length_mm: s.max_length_mm,
            scan_step_mm: s.scan_step_mm,
            tolerance_mm: s.tolerance_mm,
        }
    }
}

/// On-disk scenario. CLI overrides are applied to this form before
/// resolution so that the scenario hash covers them.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioFile {
    pub metadata: Metadata,
    pub system: SystemSection,
    pub electrical: ElectricalSection,
    pub optical: OpticalSection,
    pub dsp: DspSection,
    pub bump: BumpSection,
    pub tsov: TsovSection,
    pub shoreline: ShorelineSection,
    pub rx: RxNoiseParams,
    pub laser_budget: LaserBudgetSection,
    pub partition: PartitionSection,
    /// Path to a pitch profile table, relative to the scenario file.
    pub pitch_profile: Option<PathBuf>,
}

const UNIT_SUFFIXES: &[&str] = &[
    "_gbyte_s_per_mm2",
    "_gbyte_s_per_mm",
    "_db_per_cm",
    "_db_per_mm",
    "_db_per_hz",
    "_db_per_m",
    "_a_per_w",
    "_s_per_m",
    "_gbyte_s",
    "_gbps",
    "_mbps",
    "_dbm",
    "_ohm",
    "_ghz",
    "_mhz",
    "_hz",
    "_um",
    "_nm",
    "_mm",
    "_cm",
    "_ff",
    "_pf",
    "_fj",
    "_pj",
    "_mv",
    "_na",
    "_ua",
    "_uw",
    "_mw",
    "_ns",
    "_ps",
    "_db",
    "_m",
    "_f",
    "_j",
    "_v",
    "_a",
    "_w",
    "_s",
    "_k",
];

fn split_unit(key: &str) -> (&str, Option<&str>) {
    UNIT_SUFFIXES
        .iter()
        .find(|s| key.len() > s.len() && key.ends_with(*s))
        .map_or((key, None), |s| (&key[..key.len() - s.len()], Some(&s[1..])))
}

/// Unit hint for an unknown key, given the keys the schema accepts there.
fn unit_hint(unknown: &str, expected: &[&str]) -> Option<String> {
    let (stem, unit) = split_unit(unknown);
    expected.iter().find_map(|k| {
        let (k_stem, k_unit) = split_unit(k);
        if k_stem != stem || k_unit.is_none() {
            return None;
        }
        Some(match unit {
            Some(u) => format!("unit mismatch: `{unknown}` is in {u}, this field is `{k}` ({})", k_unit.unwrap()),
            None => format!("missing unit suffix: use `{k}`"),
        })
    })
}

/// Pulls the field name and the accepted names out of serde's
/// "unknown field" message.
fn parse_unknown_field(msg: &str) -> Option<(&str, Vec<&str>)> {
    let rest = msg.strip_prefix("unknown field `")?;
    let (field, rest) = rest.split_once('`')?;
    let expected = rest
        .split('`')
        .skip(1)
        .step_by(2)
        .collect();
    Some((field, expected))
}

fn diagnose(origin: &str, err: serde_path_to_error::Error<serde_json::Error>) -> Error {
    let path = err.path().to_string();
    let msg = err.inner().to_string();
    let hint = parse_unknown_field(&msg).and_then(|(field, expected)| unit_hint(field, &expected));
    let at = if path == "." { "$".to_string() } else { format!("$.{path}") };
    match hint {
        Some(h) => Error::Validation(format!("{origin}: {at}: {msg}; {h}")),
        None => Error::Validation(format!("{origin}: {at}: {msg}")),
    }
}

impl ScenarioFile {
    pub fn from_json(text: &str, origin: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| diagnose(origin, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut file = Self::from_json(&text, &path.display().to_string())?;
        if let Some(p) = &file.pitch_profile {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    file.pitch_profile = Some(dir.join(p));
                }
            }
        }
        Ok(file)
    }

    /// The shipped default: reference link values with the calibrated constants.
    pub fn builtin() -> Self {
        Self::from_json(DEFAULT_SCENARIO_JSON, "default.json").expect("shipped default scenario is valid")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShorelineSpec {
    pub fiber_pitch_um: f64,
    pub n_wdm: u32,
    pub channel_datarate_gbps: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaserBudgetSpec {
    pub sensitivity_dbm: Option<f64>,
    pub path_loss_db: f64,
    pub n_channels: u32,
}

/// Resolved, validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub metadata: Metadata,
    pub electrical: ElectricalLinkParams,
    pub optical: OpticalLinkParams,
    pub dsp: Vec<DspBlockCost>,
    pub bump: BumpArraySpec,
    pub tsov: TsovWdmSpec,
    pub shoreline: ShorelineSpec,
    pub rx: RxNoiseParams,
    pub laser_budget: LaserBudgetSpec,
    pub partition: CrossoverSolver,
    pub pitch_profile: PitchProfileTable,
    /// sha256 of the canonical scenario and profile JSON.
    pub hash: String,
}

impl Scenario {
    /// Resolves `file`. The pitch profile comes from the file, else from
    /// [`PROFILE_ENV`], else the built-in table.
    pub fn resolve(file: &ScenarioFile) -> Result<Self> {
        let env_profile = std::env::var_os(PROFILE_ENV).map(PathBuf::from);
        Self::resolve_with_profile(file, env_profile.as_deref())
    }

    pub fn resolve_with_profile(file: &ScenarioFile, fallback_profile: Option<&Path>) -> Result<Self> {
        let pitch_profile = match file.pitch_profile.as_deref().or(fallback_profile) {
            Some(p) => PitchProfileTable::load(p)?,
            None => PitchProfileTable::default(),
        };
        let s = &file.system;
        let electrical = ElectricalLinkParams {
            bit_rate_gbps: s.bit_rate_gbps,
            vdd_v: s.vdd_v,
            geometry: file.electrical.geometry,
            receiver_energy_fj: file.electrical.receiver_energy_fj,
            activity_factor: file.electrical.activity_factor,
            min_receiver_swing_mv: file.electrical.min_receiver_swing_mv,
        };
        electrical.validate()?;
        let o = &file.optical;
        if !(o.tia_energy_fj >= 0.0) {
            return Err(Error::param("optical.tia_energy_fj", "must be >= 0"));
        }
        let optical = OpticalLinkParams {
            waveguide_loss_db_per_cm: o.waveguide_loss_db_per_cm,
            coupler_loss_db: o.coupler_loss_db,
            n_couplers: o.n_couplers,
            modulator_loss_db: o.modulator_loss_db,
            detector_responsivity_a_per_w: o.detector_responsivity_a_per_w,
            laser_wpe: o.laser_wpe,
            c_mod_ff: o.c_mod_ff,
            c_load_ff: o.c_load_ff,
            mod_driver_energy_fj: o.mod_driver_energy_fj,
            rx_energy_fj: opt_link::receiver_energy(o.c_load_ff, electrical.activity_factor, s.vdd_v, o.tia_energy_fj),
            link_margin_db: o.link_margin_db,
            extinction_ratio_db: o.extinction_ratio_db,
        };
        optical.validate()?;
        let dsp = file
            .dsp
            .blocks
            .iter()
            .map(|kind| {
                file.dsp
                    .costs
                    .iter()
                    .find(|c| c.kind == *kind)
                    .copied()
                    .ok_or_else(|| Error::param("dsp.blocks", format!("no cost entry for `{}`", kind.name())))
            })
            .collect::<Result<Vec<_>>>()?;
        let b = &file.bump;
        let bump = BumpArraySpec {
            bump_pitch_um: b.pitch_um,
            pattern: b.pattern,
            die_edge_mm: b.die_edge_mm,
            channel_datarate_gbps: b.channel_datarate_gbps,
            overhead_total: b.overhead_total,
        };
        bump.validate()?;
        let tsov = TsovWdmSpec {
            tsov_ratio: file.tsov.tsov_ratio,
            n_wdm: file.tsov.n_wdm,
            channel_datarate_gbps: file.tsov.channel_datarate_gbps,
        };
        tsov.validate()?;
        let sh = &file.shoreline;
        if !(sh.fiber_pitch_um > 0.0) || sh.n_wdm < 1 || !(sh.channel_datarate_gbps >= 0.0) {
            return Err(Error::param(
                "shoreline",
                "need fiber_pitch_um > 0, n_wdm >= 1, channel_datarate_gbps >= 0",
            ));
        }
        file.rx.validate()?;
        let lb = &file.laser_budget;
        if !(lb.path_loss_db >= 0.0) || lb.n_channels < 1 {
            return Err(Error::param("laser_budget", "need path_loss_db >= 0 and n_channels >= 1"));
        }
        let partition = CrossoverSolver {
            max_length_mm: file.partition.max_length_mm,
            scan_step_mm: file.partition.scan_step_mm,
            tolerance_mm: file.partition.tolerance_mm,
        };
        let mut hasher = Sha256::new();
        hasher.update(serde_json::to_vec(file).expect("scenario serializes"));
        hasher.update(serde_json::to_vec(&pitch_profile).expect("profile serializes"));
        let hash = hasher.finalize().iter().map(|b| format!("{b:02x}")).collect();
        Ok(Self {
            metadata: file.metadata.clone(),
            electrical,
            optical,
            dsp,
            bump,
            tsov,
            shoreline: ShorelineSpec {
                fiber_pitch_um: sh.fiber_pitch_um,
                n_wdm: sh.n_wdm,
                channel_datarate_gbps: sh.channel_datarate_gbps,
            },
            rx: file.rx,
            laser_budget: LaserBudgetSpec {
                sensitivity_dbm: lb.sensitivity_dbm,
                path_loss_db: lb.path_loss_db,
                n_channels: lb.n_channels,
            },
            partition,
            pitch_profile,
            hash,
        })
    }

    /// Resolved built-in default, ignoring the environment.
    pub fn builtin() -> Self {
        Self::resolve_with_profile(&ScenarioFile::builtin(), None).expect("shipped default scenario resolves")
    }

    /// OMA sensitivity of the link receiver used for the partition-length
    /// comparison (detector load, link bit rate, link responsivity).
    pub fn link_sensitivity_dbm(&self) -> Result<f64> {
        rx_model::link_sensitivity_dbm(
            &self.rx,
            self.optical.c_load_ff,
            self.optical.detector_responsivity_a_per_w,
            self.electrical.bit_rate_gbps,
        )
    }

    /// Sensitivity for the laser budget: the configured value, or the
    /// receiver model at its own stack-up.
    pub fn laser_budget_sensitivity_dbm(&self) -> Result<f64> {
        match self.laser_budget.sensitivity_dbm {
            Some(s) => Ok(s),
            None => rx_model::oma_sensitivity(self.rx.c_total_ff(), &self.rx),
        }
    }

    /// Single comment line for CSV headers and stdout reports.
    pub fn provenance(&self) -> String {
        format!(
            "# epic-linkbench {} scenario={} version={} sha256={}",
            env!("CARGO_PKG_VERSION"),
            self.metadata.name,
            self.metadata.version,
            self.hash
        )
    }
}
