//! Static SVG rendering of sweep tables.
//!
//! Axes are drawn in transformed coordinates (log10 and/or negated) on a
//! plain linear chart, with tick labels mapped back to data units.

use std::path::Path;

use plotters::prelude::*;

use crate::error::{Error, Result};
use crate::sweep::{PlotStyle, Table};

const PALETTE: [RGBColor; 7] = [
    RGBColor(31, 119, 180),
    RGBColor(214, 39, 40),
    RGBColor(44, 160, 44),
    RGBColor(255, 127, 14),
    RGBColor(148, 103, 189),
    RGBColor(140, 86, 75),
    RGBColor(23, 190, 207),
];

struct AxisMap {
    log: bool,
    reverse: bool,
}

impl AxisMap {
    fn to_plot(&self, v: f64) -> Option<f64> {
        let v = if self.log {
            if v <= 0.0 {
                return None;
            }
            v.log10()
        } else {
            v
        };
        v.is_finite().then_some(if self.reverse { -v } else { v })
    }

    fn label(&self, p: f64) -> String {
        let v = if self.reverse { -p } else { p };
        let v = if self.log { 10f64.powf(v) } else { v };
        let s = crate::sweep::format_sig6(v);
        if s.len() > 8 { format!("{v:.2e}") } else { s }
    }
}

fn span(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return None;
    }
    let pad = if hi > lo { 0.05 * (hi - lo) } else { 0.5 };
    Some((lo - pad, hi + pad))
}

fn plot_err(e: impl std::fmt::Display) -> Error {
    Error::Plot(e.to_string())
}

/// Writes `table` as an SVG line (or scatter) chart of `style.y_columns`
/// against `style.x_column`. Rows with missing or non-plottable values are
/// skipped.
pub fn emit_plot(table: &Table, style: &PlotStyle, title: &str, path: &Path) -> Result<()> {
    if table.rows.is_empty() {
        return Err(Error::Plot("table is empty".into()));
    }
    let xs = table
        .numeric_column(&style.x_column)
        .ok_or_else(|| Error::Plot(format!("no column `{}`", style.x_column)))?;
    let xmap = AxisMap { log: style.log_x, reverse: style.reverse_x };
    let ymap = AxisMap { log: style.log_y, reverse: false };
    let mut series = Vec::new();
    for name in &style.y_columns {
        let ys = table
            .numeric_column(name)
            .ok_or_else(|| Error::Plot(format!("no column `{name}`")))?;
        let pts: Vec<(f64, f64)> = xs
            .iter()
            .zip(&ys)
            .filter_map(|(x, y)| Some((xmap.to_plot((*x)?)?, ymap.to_plot((*y)?)?)))
            .collect();
        series.push((name.clone(), pts));
    }
    let all = || series.iter().flat_map(|(_, p)| p.iter());
    let (x0, x1) = span(all().map(|p| p.0)).ok_or_else(|| Error::Plot("no plottable points".into()))?;
    let (y0, y1) = span(all().map(|p| p.1)).expect("x points imply y points");

    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let root = SVGBackend::new(path, (900, 600)).into_drawing_area();
    root.fill(&WHITE).map_err(plot_err)?;
    let mut chart = ChartBuilder::on(&root)
        .caption(title, ("sans-serif", 18))
        .margin(12)
        .x_label_area_size(48)
        .y_label_area_size(72)
        .build_cartesian_2d(x0..x1, y0..y1)
        .map_err(plot_err)?;
    chart
        .configure_mesh()
        .x_desc(style.x_label.as_str())
        .y_desc(style.y_label.as_str())
        .x_label_formatter(&|v| xmap.label(*v))
        .y_label_formatter(&|v| ymap.label(*v))
        .draw()
        .map_err(plot_err)?;
    for (i, (name, pts)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        if style.points_only {
            chart
                .draw_series(pts.iter().map(|&p| Circle::new(p, 4, color.filled())))
                .map_err(plot_err)?
                .label(name.as_str())
                .legend(move |(x, y)| Circle::new((x + 10, y), 4, color.filled()));
        } else {
            chart
                .draw_series(LineSeries::new(pts.iter().copied(), color.stroke_width(2)))
                .map_err(plot_err)?
                .label(name.as_str())
                .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color.stroke_width(2)));
            chart
                .draw_series(pts.iter().map(|&p| Circle::new(p, 3, color.filled())))
                .map_err(plot_err)?;
        }
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.85))
        .border_style(BLACK)
        .draw()
        .map_err(plot_err)?;
    root.present().map_err(plot_err)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::Cell;

    fn table(rows: &[(f64, f64)]) -> Table {
        Table {
            columns: vec!["x".into(), "y".into()],
            rows: rows.iter().map(|&(x, y)| vec![Cell::Num(x), Cell::Num(y)]).collect(),
            provenance: Vec::new(),
        }
    }

    fn style(log_y: bool) -> PlotStyle {
        PlotStyle {
            x_column: "x".into(),
            y_columns: vec!["y".into()],
            log_y,
            ..PlotStyle::default()
        }
    }

    #[test]
    fn single_point_plot() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("one.svg");
        emit_plot(&table(&[(1.0, 2.0)]), &style(true), "one", &path).unwrap();
        assert!(std::fs::read_to_string(&path).unwrap().starts_with("<svg"));
    }

    #[test]
    fn log_axis_skips_nonpositive() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("log.svg");
        emit_plot(&table(&[(1.0, 0.0), (2.0, 10.0), (3.0, 100.0)]), &style(true), "log", &path).unwrap();
        assert!(emit_plot(&table(&[(1.0, 0.0)]), &style(true), "none", &path).is_err());
    }

    #[test]
    fn empty_table_and_missing_column() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.svg");
        assert!(emit_plot(&table(&[]), &style(false), "e", &path).is_err());
        let bad = PlotStyle { x_column: "nope".into(), ..style(false) };
        assert!(emit_plot(&table(&[(1.0, 1.0)]), &bad, "e", &path).is_err());
    }

    #[test]
    fn reversed_axis_labels_map_back() {
        let m = AxisMap { log: true, reverse: true };
        let p = m.to_plot(100.0).unwrap();
        assert_eq!(p, -2.0);
        assert_eq!(m.label(p), "100");
    }
}
