//! Interconnect figure of merit:
//! (bandwidth efficiency / energy efficiency) x (link length / latency).
//!
//! Bandwidth densities are held in Gb/s units; the JSON loader accepts GB/s
//! and converts.

use std::cmp::Ordering;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TechnologyEntry {
    pub name: String,
    /// Gb/s/mm^2
    pub areal_bw_density: f64,
    /// Gb/s/mm
    pub shoreline_bw_density: f64,
    /// pJ/bit
    pub energy_efficiency: f64,
    /// mm
    pub link_length: f64,
    /// ns
    pub link_latency: f64,
    pub source_note: String,
}

impl TechnologyEntry {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("areal_bw_density", self.areal_bw_density),
            ("shoreline_bw_density", self.shoreline_bw_density),
            ("energy_efficiency", self.energy_efficiency),
            ("link_length", self.link_length),
            ("link_latency", self.link_latency),
        ];
        for (field, v) in fields {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(
                    format!("{}.{field}", self.name),
                    format!("must be finite and > 0 (got {v})"),
                ));
            }
        }
        Ok(())
    }

    /// Areal over shoreline density, 1/mm.
    pub fn bandwidth_efficiency(&self) -> f64 {
        self.areal_bw_density / self.shoreline_bw_density
    }
}

pub fn compute_fom(entry: &TechnologyEntry) -> Result<f64> {
    entry.validate()?;
    Ok(entry.bandwidth_efficiency() / entry.energy_efficiency * (entry.link_length / entry.link_latency))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedEntry {
    pub rank: usize,
    pub fom: f64,
    pub entry: TechnologyEntry,
}

/// FoM descending, ties by name ascending. An empty database yields an
/// empty table.
pub fn rank_technologies(db: &[TechnologyEntry]) -> Result<Vec<RankedEntry>> {
    let mut rows = db
        .iter()
        .map(|e| {
            Ok(RankedEntry {
                rank: 0,
                fom: compute_fom(e)?,
                entry: e.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| {
        b.fom
            .partial_cmp(&a.fom)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.entry.name.cmp(&b.entry.name))
    });
    for (i, r) in rows.iter_mut().enumerate() {
        r.rank = i + 1;
    }
    Ok(rows)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryFile {
    name: String,
    areal_bw_density_gbyte_s_per_mm2: f64,
    shoreline_bw_density_gbyte_s_per_mm: f64,
    energy_efficiency_pj_per_bit: f64,
    link_length_mm: f64,
    link_latency_ns: f64,
    #[serde(default = "estimate")]
    source_note: String,
}

fn estimate() -> String {
    "estimate".into()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DatabaseFile {
    #[serde(default)]
    #[allow(dead_code)]
    note: String,
    entries: Vec<EntryFile>,
}

pub const SAMPLE_DATABASE_JSON: &str = include_str!("../data/technologies.json");

pub fn database_from_json(text: &str) -> Result<Vec<TechnologyEntry>> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: DatabaseFile = serde_path_to_error::deserialize(de)
        .map_err(|e| Error::Validation(format!("technology database: {}: {}", e.path(), e.inner())))?;
    let db: Vec<TechnologyEntry> = file
        .entries
        .into_iter()
        .map(|e| TechnologyEntry {
            name: e.name,
            areal_bw_density: e.areal_bw_density_gbyte_s_per_mm2 * 8.0,
            shoreline_bw_density: e.shoreline_bw_density_gbyte_s_per_mm * 8.0,
            energy_efficiency: e.energy_efficiency_pj_per_bit,
            link_length: e.link_length_mm,
            link_latency: e.link_latency_ns,
            source_note: e.source_note,
        })
        .collect();
    for e in &db {
        e.validate()?;
    }
    Ok(db)
}

pub fn load_database(path: &Path) -> Result<Vec<TechnologyEntry>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    database_from_json(&text)
}

pub fn sample_database() -> Vec<TechnologyEntry> {
    database_from_json(SAMPLE_DATABASE_JSON).expect("shipped database is valid")
}
