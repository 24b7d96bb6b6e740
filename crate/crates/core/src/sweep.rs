//! Grid sweeps that compose the models into the figure tables, with
//! deterministic CSV output.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bw_density::{self, ThreeDModel};
use crate::elec_energy;
use crate::error::{Error, Result};
use crate::fom;
use crate::opt_link;
use crate::rx_model;
use crate::scenario::{Scenario, ScenarioFile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    EnergyVsLength,
    BwDensityVsPitch,
    TotalBwVsEdge,
    WdmSweep,
    PitchMatch,
    OmaVsCap,
    FomTable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum Axis {
    Range { name: String, start: f64, stop: f64, step: f64 },
    List { name: String, values: Vec<f64> },
}

impl Axis {
    pub fn name(&self) -> &str {
        match self {
            Self::Range { name, .. } | Self::List { name, .. } => name,
        }
    }

    /// Grid points in axis order. The range form includes `stop` when it
    /// lies on the grid.
    pub fn points(&self) -> Result<Vec<f64>> {
        let pts = match self {
            Self::Range { start, stop, step, .. } => {
                if !(*step > 0.0) || !start.is_finite() || !stop.is_finite() {
                    return Err(Error::Validation(format!(
                        "axis `{}`: step must be > 0 and bounds finite",
                        self.name()
                    )));
                }
                if stop < start {
                    Vec::new()
                } else {
                    let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
                    (0..n).map(|i| start + i as f64 * step).collect()
                }
            }
            Self::List { values, .. } => values.clone(),
        };
        if pts.is_empty() {
            return Err(Error::Validation(format!("axis `{}` is empty", self.name())));
        }
        Ok(pts)
    }
}

fn default_wdm_channels() -> Vec<u32> {
    vec![4, 8, 16, 32, 64]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub sweep_kind: SweepKind,
    #[serde(default)]
    pub axis: Option<Axis>,
    /// Merged over the scenario file before resolution.
    #[serde(default)]
    pub scenario_overrides: Option<serde_json::Value>,
    /// Optical series for `bw_density_vs_pitch`.
    #[serde(default = "default_wdm_channels")]
    pub wdm_channels: Vec<u32>,
    /// Technology database for `fom_table`; the sample database if absent.
    #[serde(default)]
    pub database: Option<PathBuf>,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
}

impl SweepSpec {
    pub fn new(sweep_kind: SweepKind, axis: Option<Axis>) -> Self {
        Self {
            sweep_kind,
            axis,
            scenario_overrides: None,
            wdm_channels: default_wdm_channels(),
            database: None,
            output_path: None,
        }
    }

    fn grid(&self) -> Result<Vec<f64>> {
        self.axis
            .as_ref()
            .ok_or_else(|| Error::Validation(format!("{:?} sweep needs an axis", self.sweep_kind)))?
            .points()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Self::Num(v) => Some(v),
            Self::Int(v) => Some(v as f64),
            _ => None,
        }
    }

    fn render(&self) -> String {
        match self {
            Self::Num(v) => format_sig6(*v),
            Self::Int(v) => v.to_string(),
            Self::Text(s) => s.clone(),
            Self::Empty => String::new(),
        }
    }
}

/// Six significant digits, fixed notation for magnitudes in [1e-5, 1e15),
/// trailing zeros trimmed.
pub fn format_sig6(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.into();
    }
    if v == 0.0 {
        return "0".into();
    }
    let exp = v.abs().log10().floor() as i32;
    if !(-5..15).contains(&exp) {
        return format!("{v:.5e}");
    }
    let decimals = (5 - exp).max(0) as usize;
    let s = format!("{v:.decimals$}");
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    };
    if s == "-0" { "0".into() } else { s }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Comment lines written above the header.
    pub provenance: Vec<String>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn numeric_column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let i = self.column(name)?;
        Some(self.rows.iter().map(|r| r[i].as_f64()).collect())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut out = String::new();
        for line in &self.provenance {
            out.push_str(line);
            out.push('\n');
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Validation(format!("csv buffer: {e}")))?;
        out.push_str(&String::from_utf8(bytes).expect("csv output is utf-8"));
        Ok(out)
    }

    pub fn write_csv(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_csv()?).map_err(|e| Error::io(path, e))
    }
}

type Row = Vec<Cell>;

/// Evaluates `f` on every grid point in parallel; results keep axis order.
/// A failing point becomes a row of empty cells with the message in the
/// trailing `error` column.
fn eval_grid(
    grid: &[f64],
    width: usize,
    f: impl Fn(f64) -> Result<Vec<Cell>> + Sync,
) -> Vec<Row> {
    grid.par_iter()
        .map(|&x| {
            let mut row = vec![Cell::Num(x)];
            match f(x) {
                Ok(cells) => {
                    row.extend(cells);
                    row.push(Cell::Empty);
                }
                Err(e) => {
                    row.extend(std::iter::repeat_n(Cell::Empty, width));
                    row.push(Cell::Text(e.to_string()));
                }
            }
            row
        })
        .collect()
}

fn with_axis(axis: &str, cols: &[&str]) -> Vec<String> {
    std::iter::once(axis)
        .chain(cols.iter().copied())
        .chain(std::iter::once("error"))
        .map(String::from)
        .collect()
}

fn check_wdm(v: f64) -> Result<u32> {
    if v >= 1.0 && v.fract() == 0.0 && v <= f64::from(u32::MAX) {
        Ok(v as u32)
    } else {
        Err(Error::param("n_wdm", format!("must be a positive integer (got {v})")))
    }
}

/// Runs `spec` against a resolved scenario.
pub fn run_sweep(spec: &SweepSpec, sc: &Scenario) -> Result<Table> {
    let (columns, rows) = match spec.sweep_kind {
        SweepKind::EnergyVsLength => {
            let grid = spec.grid()?;
            let sensitivity = sc.link_sensitivity_dbm()?;
            let cols = ["electrical_fj_per_bit", "optical_fj_per_bit", "channel_loss_db", "optical_wins"];
            let rows = eval_grid(&grid, cols.len(), |l| {
                let el = opt_link::electrical_with_dsp(&sc.electrical, &sc.dsp, l)?.ok_or_else(|| {
                    Error::LinkInfeasible {
                        length_mm: l,
                        required_swing_v: f64::NAN,
                        vdd_v: sc.electrical.vdd_v,
                    }
                });
                let opt = opt_link::optical_energy_per_bit(&sc.optical, l, sc.electrical.bit_rate_gbps, sensitivity)?;
                let loss = elec_energy::channel_loss_db(&sc.electrical, l)?;
                Ok(match el {
                    Ok(el) => vec![
                        Cell::Num(el),
                        Cell::Num(opt),
                        Cell::Num(loss),
                        Cell::Int(i64::from(opt <= el)),
                    ],
                    Err(_) => vec![Cell::Empty, Cell::Num(opt), Cell::Num(loss), Cell::Int(1)],
                })
            });
            (with_axis(axis_name(spec, "length_mm"), &cols), rows)
        }
        SweepKind::BwDensityVsPitch => {
            let grid = spec.grid()?;
            let mut cols: Vec<String> = [
                "pattern",
                "channel_datarate_gbps",
                "overhead_total",
                "bumps_per_mm2",
                "theoretical_gbyte_s_per_mm2",
                "realizable_gbyte_s_per_mm2",
            ]
            .map(String::from)
            .to_vec();
            cols.extend(spec.wdm_channels.iter().map(|n| format!("optical_wdm{n}_gbyte_s_per_mm2")));
            let width = cols.len();
            let rows = eval_grid(&grid, width, |p| {
                let b = sc.pitch_profile.spec_for(p, sc.bump.die_edge_mm)?;
                let mut cells = vec![
                    Cell::Text(b.pattern.name().into()),
                    Cell::Num(b.channel_datarate_gbps),
                    Cell::Num(b.overhead_total),
                    Cell::Int(bw_density::bump_density(p).rounded_count as i64),
                    Cell::Num(bw_density::theoretical_bw_density(&b).gbyte_s_per_mm2()),
                    Cell::Num(bw_density::realizable_bw_density(&b)),
                ];
                for &n in &spec.wdm_channels {
                    let t = bw_density::TsovWdmSpec { n_wdm: n, ..sc.tsov };
                    t.validate()?;
                    cells.push(Cell::Num(bw_density::optical_bw_density(p, &t).gbyte_s_per_mm2));
                }
                Ok(cells)
            });
            let mut columns = vec![axis_name(spec, "pitch_um").to_string()];
            columns.extend(cols);
            columns.push("error".into());
            (columns, rows)
        }
        SweepKind::TotalBwVsEdge => {
            let grid = spec.grid()?;
            let cols = ["electrical_3d_gbyte_s", "optical_3d_gbyte_s", "fibers", "optical_2p5d_gbyte_s"];
            let rows = eval_grid(&grid, cols.len(), |edge| {
                let e = bw_density::total_bandwidth_3d(&sc.bump, &ThreeDModel::Electrical, edge)?;
                let o = bw_density::total_bandwidth_3d(&sc.bump, &ThreeDModel::Optical(sc.tsov), edge)?;
                let s = bw_density::total_bandwidth_shoreline(
                    edge,
                    sc.shoreline.fiber_pitch_um,
                    sc.shoreline.n_wdm,
                    sc.shoreline.channel_datarate_gbps,
                );
                Ok(vec![Cell::Num(e), Cell::Num(o), Cell::Int(s.fibers as i64), Cell::Num(s.gbyte_s)])
            });
            (with_axis(axis_name(spec, "die_edge_mm"), &cols), rows)
        }
        SweepKind::WdmSweep => {
            let grid = spec.grid()?;
            let cols = ["tsov_per_mm2", "optical_3d_gbyte_s", "electrical_3d_gbyte_s"];
            let edge = sc.bump.die_edge_mm;
            let rows = eval_grid(&grid, cols.len(), |n| {
                let t = bw_density::TsovWdmSpec { n_wdm: check_wdm(n)?, ..sc.tsov };
                let d = bw_density::optical_bw_density(sc.bump.bump_pitch_um, &t);
                let o = bw_density::total_bandwidth_3d(&sc.bump, &ThreeDModel::Optical(t), edge)?;
                let e = bw_density::total_bandwidth_3d(&sc.bump, &ThreeDModel::Electrical, edge)?;
                Ok(vec![Cell::Int(d.tsov_per_mm2 as i64), Cell::Num(o), Cell::Num(e)])
            });
            (with_axis(axis_name(spec, "n_wdm"), &cols), rows)
        }
        SweepKind::PitchMatch => {
            let grid = spec.grid()?;
            let cols = ["electrical_total_gbyte_s", "optical_total_gbyte_s", "verdict"];
            let rows = eval_grid(&grid, cols.len(), |p| {
                let r = bw_density::matching_pitch_table(
                    &sc.pitch_profile,
                    sc.bump.bump_pitch_um,
                    &sc.tsov,
                    sc.bump.die_edge_mm,
                    &[p],
                )?[0];
                Ok(vec![
                    Cell::Num(r.electrical_total_gbyte_s),
                    Cell::Num(r.optical_total_gbyte_s),
                    Cell::Text(r.verdict.name().into()),
                ])
            });
            (with_axis(axis_name(spec, "pitch_um"), &cols), rows)
        }
        SweepKind::OmaVsCap => {
            let grid = spec.grid()?;
            let cols = ["oma_sensitivity_dbm", "q", "iterations"];
            let rows = eval_grid(&grid, cols.len(), |c| {
                let s = rx_model::solve_sensitivity(c, &sc.rx)?;
                Ok(vec![Cell::Num(s.oma_dbm), Cell::Num(s.q), Cell::Int(s.iterations as i64)])
            });
            (with_axis(axis_name(spec, "c_total_ff"), &cols), rows)
        }
        SweepKind::FomTable => {
            let db = match &spec.database {
                Some(p) => fom::load_database(p)?,
                None => fom::sample_database(),
            };
            let ranked = fom::rank_technologies(&db)?;
            let columns = [
                "rank",
                "name",
                "fom",
                "bandwidth_efficiency_per_mm",
                "areal_bw_density_gbps_per_mm2",
                "shoreline_bw_density_gbps_per_mm",
                "energy_efficiency_pj_per_bit",
                "link_length_mm",
                "link_latency_ns",
                "source_note",
            ]
            .map(String::from)
            .to_vec();
            let rows = ranked
                .into_iter()
                .map(|r| {
                    let e = r.entry;
                    vec![
                        Cell::Int(r.rank as i64),
                        Cell::Text(e.name.clone()),
                        Cell::Num(r.fom),
                        Cell::Num(e.bandwidth_efficiency()),
                        Cell::Num(e.areal_bw_density),
                        Cell::Num(e.shoreline_bw_density),
                        Cell::Num(e.energy_efficiency),
                        Cell::Num(e.link_length),
                        Cell::Num(e.link_latency),
                        Cell::Text(e.source_note),
                    ]
                })
                .collect();
            (columns, rows)
        }
    };
    Ok(Table {
        columns,
        rows,
        provenance: vec![sc.provenance()],
    })
}

fn axis_name<'a>(spec: &'a SweepSpec, default: &'a str) -> &'a str {
    spec.axis.as_ref().map_or(default, Axis::name)
}

fn merge(base: &mut serde_json::Value, patch: &serde_json::Value) {
    match (base, patch) {
        (serde_json::Value::Object(b), serde_json::Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k.clone(), v.clone());
                    }
                }
            }
        }
        (b, p) => *b = p.clone(),
    }
}

/// Scenario file with `overrides` merged in; unknown keys in the overrides
/// are rejected like any scenario key.
pub fn apply_overrides(file: &ScenarioFile, overrides: Option<&serde_json::Value>) -> Result<ScenarioFile> {
    let Some(patch) = overrides else {
        return Ok(file.clone());
    };
    let mut v = serde_json::to_value(file).expect("scenario serializes");
    merge(&mut v, patch);
    ScenarioFile::from_json(&v.to_string(), "scenario_overrides")
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlotStyle {
    pub x_column: String,
    pub y_columns: Vec<String>,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub reverse_x: bool,
    pub points_only: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FigureSpec {
    pub id: String,
    pub title: String,
    pub sweep: SweepSpec,
    pub plot: PlotStyle,
}

const STOCK_FIGURES: [(&str, &str); 7] = [
    ("fig1", include_str!("../data/figures/fig1.json")),
    ("fig3", include_str!("../data/figures/fig3.json")),
    ("fig4", include_str!("../data/figures/fig4.json")),
    ("fig5", include_str!("../data/figures/fig5.json")),
    ("fig6", include_str!("../data/figures/fig6.json")),
    ("fig11", include_str!("../data/figures/fig11.json")),
    ("bw-density", include_str!("../data/figures/bw-density.json")),
];

impl FigureSpec {
    pub fn stock_ids() -> impl Iterator<Item = &'static str> {
        STOCK_FIGURES.iter().map(|(id, _)| *id)
    }

    pub fn stock(id: &str) -> Result<Self> {
        let text = STOCK_FIGURES
            .iter()
            .find(|(k, _)| *k == id)
            .map(|(_, t)| *t)
            .ok_or_else(|| {
                let ids: Vec<_> = Self::stock_ids().collect();
                Error::Validation(format!("unknown figure `{id}` (available: {})", ids.join(", ")))
            })?;
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de)
            .map_err(|e| Error::Validation(format!("figure {id}: {}: {}", e.path(), e.inner())))
    }
}

/// Resolves the figure's scenario (base file plus the figure overrides) and
/// runs its sweep.
pub fn reproduce_figure(fig: &FigureSpec, base: &ScenarioFile) -> Result<Table> {
    let file = apply_overrides(base, fig.sweep.scenario_overrides.as_ref())?;
    let sc = Scenario::resolve(&file)?;
    let mut table = run_sweep(&fig.sweep, &sc)?;
    table.provenance.push(format!("# figure={} {}", fig.id, fig.title));
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn range(name: &str, start: f64, stop: f64, step: f64) -> Option<Axis> {
        Some(Axis::Range { name: name.into(), start, stop, step })
    }

    fn list(name: &str, values: &[f64]) -> Option<Axis> {
        Some(Axis::List { name: name.into(), values: values.to_vec() })
    }

    #[test]
    fn sig6_formatting() {
        assert_eq!(format_sig6(925.98), "925.98");
        assert_eq!(format_sig6(1.0 / 3.0), "0.333333");
        assert_eq!(format_sig6(123456789.0), "123456789");
        assert_eq!(format_sig6(-24.2000001), "-24.2");
        assert_eq!(format_sig6(0.0), "0");
        assert_eq!(format_sig6(-1e-9), "-1.00000e-9");
        assert_eq!(format_sig6(768.0), "768");
    }

    #[test]
    fn range_axis_includes_stop() {
        assert_eq!(range("x", 1.0, 50.0, 1.0).unwrap().points().unwrap().len(), 50);
        assert_eq!(range("x", 0.0, 1.0, 0.1).unwrap().points().unwrap().len(), 11);
        assert!(range("x", 0.0, 1.0, 0.0).unwrap().points().is_err());
        assert!(list("x", &[]).unwrap().points().is_err());
    }

    #[test]
    fn energy_sweep_crosses_near_fifteen() {
        let sc = Scenario::builtin();
        let t = run_sweep(&SweepSpec::new(SweepKind::EnergyVsLength, range("length_mm", 1.0, 50.0, 1.0)), &sc).unwrap();
        assert_eq!(t.rows.len(), 50);
        let el = t.numeric_column("electrical_fj_per_bit").unwrap();
        let op = t.numeric_column("optical_fj_per_bit").unwrap();
        assert!(el[14].unwrap() < op[14].unwrap(), "15 mm");
        assert!(el[15].unwrap() > op[15].unwrap(), "16 mm");
    }

    #[test]
    fn wdm_sweep_is_increasing() {
        let base = ScenarioFile::builtin();
        let file = apply_overrides(&base, Some(&serde_json::json!({"tsov": {"tsov_ratio": 0.05}}))).unwrap();
        let sc = Scenario::resolve_with_profile(&file, None).unwrap();
        let t = run_sweep(&SweepSpec::new(SweepKind::WdmSweep, list("n_wdm", &[4.0, 8.0, 16.0, 32.0])), &sc).unwrap();
        let o: Vec<f64> = t.numeric_column("optical_3d_gbyte_s").unwrap().into_iter().map(Option::unwrap).collect();
        assert!(o.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(o[3], 2048.0);
    }

    #[test]
    fn empty_axis_fails_before_evaluation() {
        let sc = Scenario::builtin();
        let spec = SweepSpec::new(SweepKind::OmaVsCap, list("c_total_ff", &[]));
        assert!(run_sweep(&spec, &sc).unwrap_err().is_validation());
        assert!(run_sweep(&SweepSpec::new(SweepKind::OmaVsCap, None), &sc).is_err());
    }

    #[test]
    fn point_errors_land_in_error_column() {
        let sc = Scenario::builtin();
        let spec = SweepSpec::new(SweepKind::BwDensityVsPitch, list("pitch_um", &[55.0, 500.0]));
        let t = run_sweep(&spec, &sc).unwrap();
        let err = t.column("error").unwrap();
        assert_eq!(t.rows[0][err], Cell::Empty);
        assert!(matches!(&t.rows[1][err], Cell::Text(m) if m.contains("500")));
        let realizable = t.numeric_column("realizable_gbyte_s_per_mm2").unwrap();
        assert!((realizable[0].unwrap() - 925.98).abs() < 0.01);
    }

    #[test]
    fn csv_quotes_and_is_stable() {
        let t = Table {
            columns: vec!["a".into(), "b".into()],
            rows: vec![vec![Cell::Num(1.5), Cell::Text("x, y".into())]],
            provenance: vec!["# p".into()],
        };
        assert_eq!(t.to_csv().unwrap(), "# p\na,b\n1.5,\"x, y\"\n");
    }

    #[test]
    fn stock_figures_parse() {
        for id in FigureSpec::stock_ids() {
            let f = FigureSpec::stock(id).unwrap();
            assert_eq!(f.id, id);
        }
        assert!(FigureSpec::stock("fig99").is_err());
    }

    #[test]
    fn overrides_are_strict() {
        let base = ScenarioFile::builtin();
        assert!(apply_overrides(&base, Some(&serde_json::json!({"tsov": {"ratio": 0.05}}))).is_err());
    }
}
