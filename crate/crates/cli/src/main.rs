use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use linkbench::bw_density;
use linkbench::calibration;
use linkbench::elec_energy::DspBlockKind;
use linkbench::opt_link::{self, PartitionLength, Technology};
use linkbench::plot;
use linkbench::scenario::{Scenario, ScenarioFile};
use linkbench::sweep::{self, Axis, FigureSpec, PlotStyle, SweepKind, SweepSpec, Table};
use linkbench::{Error, Result};

/// Electrical vs. optical die-to-die interconnect benchmark.
#[derive(Parser, Debug)]
#[command(name = "epic-linkbench", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Svg,
    Both,
}

#[derive(Args, Debug)]
struct Common {
    /// Scenario JSON; built-in defaults when omitted.
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,
    /// Output file (sweeps) or directory (reproduce-figure). Tables go to
    /// stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Table, plot, or both.
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
    /// Alternate pitch profile table. Beats the scenario's table, which
    /// beats the EPIC_LINKBENCH_PROFILE environment variable.
    #[arg(long, global = true)]
    profile: Option<PathBuf>,

    /// Line rate in Gb/s.
    #[arg(long, global = true)]
    bit_rate: Option<f64>,
    /// Supply voltage in V.
    #[arg(long, global = true)]
    vdd: Option<f64>,
    /// Switching activity, 0 to 1.
    #[arg(long, global = true)]
    activity_factor: Option<f64>,
    /// Minimum receiver swing in mV.
    #[arg(long, global = true)]
    min_swing_mv: Option<f64>,
    /// DSP blocks on the electrical link, e.g. `--dsp fec,ctle`.
    #[arg(long, global = true, value_delimiter = ',')]
    dsp: Option<Vec<String>>,
    /// Shorthand for adding a DFE to the electrical link.
    #[arg(long, global = true)]
    dfe: bool,
    /// Fraction of bump sites given to TSOVs.
    #[arg(long, global = true)]
    tsov_ratio: Option<f64>,
    /// WDM channels per TSOV (and per fiber).
    #[arg(long, global = true)]
    wdm: Option<u32>,
    /// Bump pitch in um.
    #[arg(long, global = true)]
    pitch: Option<f64>,
    /// Die edge in mm.
    #[arg(long, global = true)]
    die_edge: Option<f64>,
}

#[derive(Args, Debug, Clone)]
struct RangeArgs {
    /// First axis value.
    #[arg(long)]
    start: Option<f64>,
    /// Last axis value (inclusive).
    #[arg(long)]
    stop: Option<f64>,
    /// Axis increment.
    #[arg(long)]
    step: Option<f64>,
}

impl RangeArgs {
    fn axis(&self, name: &str, start: f64, stop: f64, step: f64) -> Axis {
        Axis::Range {
            name: name.into(),
            start: self.start.unwrap_or(start),
            stop: self.stop.unwrap_or(stop),
            step: self.step.unwrap_or(step),
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rank a technology database by figure of merit.
    Fom {
        /// Technology JSON; the bundled sample (estimates) when omitted.
        #[arg(long)]
        database: Option<PathBuf>,
    },
    /// Electrical and optical energy per bit vs link length.
    EnergySweep(RangeArgs),
    /// Length where the optical link becomes cheaper per bit.
    PartitionLength,
    /// Bump density and 3D electrical/optical bandwidth density at one pitch.
    BwDensity {
        /// Take datarate, overhead and pattern from the pitch profile table
        /// instead of the scenario's bump section.
        #[arg(long)]
        from_profile: bool,
    },
    /// Total 3D and shoreline bandwidth vs die edge.
    BwTotal(RangeArgs),
    /// Total optical bandwidth vs WDM channel count.
    WdmSweep {
        #[arg(long, value_delimiter = ',', default_values_t = [4.0, 8.0, 16.0, 32.0])]
        values: Vec<f64>,
    },
    /// Electrical pitches compared against a fixed optical baseline.
    PitchMatch {
        #[arg(long, value_delimiter = ',', default_values_t = [1.0, 2.0, 4.0, 9.0, 16.0, 25.0, 32.0, 45.0, 55.0, 70.0, 110.0])]
        pitches: Vec<f64>,
    },
    /// Receiver OMA sensitivity vs total input capacitance.
    RxSensitivity(RangeArgs),
    /// Per-channel laser power back-calculated from the receiver sensitivity.
    LaserBudget {
        /// Receiver OMA sensitivity; from the receiver model when omitted.
        #[arg(long, allow_hyphen_values = true)]
        sensitivity_dbm: Option<f64>,
        #[arg(long)]
        path_loss_db: Option<f64>,
    },
    /// Regenerate a stock figure table (and plot).
    ReproduceFigure {
        /// fig1, fig3, fig4, fig5, fig6, fig11 or bw-density.
        id: String,
    },
}

fn load_file(common: &Common) -> Result<ScenarioFile> {
    let mut f = match &common.scenario {
        Some(p) => ScenarioFile::load(p)?,
        None => ScenarioFile::builtin(),
    };
    if let Some(p) = &common.profile {
        f.pitch_profile = Some(p.clone());
    }
    if let Some(v) = common.bit_rate {
        f.system.bit_rate_gbps = v;
    }
    if let Some(v) = common.vdd {
        f.system.vdd_v = v;
    }
    if let Some(v) = common.activity_factor {
        f.electrical.activity_factor = v;
    }
    if let Some(v) = common.min_swing_mv {
        f.electrical.min_receiver_swing_mv = v;
    }
    if let Some(list) = &common.dsp {
        f.dsp.blocks = list
            .iter()
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<DspBlockKind>())
            .collect::<Result<_>>()?;
    }
    if common.dfe && !f.dsp.blocks.contains(&DspBlockKind::Dfe) {
        f.dsp.blocks.push(DspBlockKind::Dfe);
    }
    if let Some(v) = common.tsov_ratio {
        f.tsov.tsov_ratio = v;
    }
    if let Some(v) = common.wdm {
        f.tsov.n_wdm = v;
        f.shoreline.n_wdm = v;
    }
    if let Some(v) = common.pitch {
        f.bump.pitch_um = v;
    }
    if let Some(v) = common.die_edge {
        f.bump.die_edge_mm = v;
    }
    Ok(f)
}

fn resolve(f: &ScenarioFile) -> Result<Scenario> {
    Scenario::resolve(f)
}

fn stock_style(kind: SweepKind) -> (String, PlotStyle) {
    let id = match kind {
        SweepKind::FomTable => "fig1",
        SweepKind::EnergyVsLength => "fig3",
        SweepKind::TotalBwVsEdge => "fig4",
        SweepKind::WdmSweep => "fig5",
        SweepKind::PitchMatch => "fig6",
        SweepKind::OmaVsCap => "fig11",
        SweepKind::BwDensityVsPitch => "bw-density",
    };
    let fig = FigureSpec::stock(id).expect("stock figures parse");
    (fig.title, fig.plot)
}

fn emit(table: &Table, kind: SweepKind, common: &Common) -> Result<()> {
    let (title, style) = stock_style(kind);
    match (&common.out, common.format) {
        (None, Format::Csv) => {
            print!("{}", table.to_csv()?);
            Ok(())
        }
        (None, _) => Err(Error::Validation("--format svg/both needs --out".into())),
        (Some(out), fmt) => {
            if fmt != Format::Svg {
                let csv_path = if fmt == Format::Both { out.with_extension("csv") } else { out.clone() };
                table.write_csv(&csv_path)?;
                eprintln!("wrote {}", csv_path.display());
            }
            if fmt != Format::Csv {
                let svg_path = out.with_extension("svg");
                plot::emit_plot(table, &style, &title, &svg_path)?;
                eprintln!("wrote {}", svg_path.display());
            }
            Ok(())
        }
    }
}

fn run_kind(spec: SweepSpec, common: &Common) -> Result<()> {
    let sc = resolve(&load_file(common)?)?;
    let table = sweep::run_sweep(&spec, &sc)?;
    emit(&table, spec.sweep_kind, common)
}

fn list_axis(name: &str, values: &[f64]) -> Option<Axis> {
    Some(Axis::List {
        name: name.into(),
        values: values.to_vec(),
    })
}

fn fmt_partition(p: PartitionLength) -> String {
    match p {
        PartitionLength::Crossover { length_mm } => format!("{length_mm:.1} mm"),
        PartitionLength::NoCrossover { dominant: Technology::Electrical } => "none (electrical cheaper over the whole range)".into(),
        PartitionLength::NoCrossover { dominant: Technology::Optical } => "none (optical cheaper over the whole range)".into(),
    }
}

fn partition_length(common: &Common) -> Result<()> {
    let sc = resolve(&load_file(common)?)?;
    let sensitivity = sc.link_sensitivity_dbm()?;
    let bare = opt_link::partition_length(&sc.electrical, &sc.optical, sensitivity, &[], &sc.partition)?;
    println!("{}", sc.provenance());
    println!("receiver sensitivity: {sensitivity:.2} dBm OMA");
    println!("partition length (no DSP): {}", fmt_partition(bare));
    if !sc.dsp.is_empty() {
        let names: Vec<_> = sc.dsp.iter().map(|b| b.kind.name()).collect();
        let with = opt_link::partition_length(&sc.electrical, &sc.optical, sensitivity, &sc.dsp, &sc.partition)?;
        println!("partition length (with {}): {}", names.join("+"), fmt_partition(with));
    }
    println!(
        "note: min_receiver_swing_mv ({}) and optical tia_energy_fj ({}) are calibrated so the default scenario crosses at {} mm without DSP and {} mm with DFE; these outputs guard that calibration and are not independent predictions.",
        calibration::MIN_RECEIVER_SWING_MV,
        calibration::OPTICAL_TIA_ENERGY_FJ,
        calibration::TARGET_PARTITION_MM,
        calibration::TARGET_PARTITION_DFE_MM,
    );
    Ok(())
}

fn bw_density(common: &Common, from_profile: bool) -> Result<()> {
    let sc = resolve(&load_file(common)?)?;
    let spec = if from_profile {
        sc.pitch_profile.spec_for(sc.bump.bump_pitch_um, sc.bump.die_edge_mm)?
    } else {
        sc.bump
    };
    let bumps = bw_density::bump_density(spec.bump_pitch_um);
    let optical = bw_density::optical_bw_density(spec.bump_pitch_um, &sc.tsov);
    println!("{}", sc.provenance());
    println!("pitch: {} um ({}, {} Gb/s, overhead {})", spec.bump_pitch_um, spec.pattern.name(), spec.channel_datarate_gbps, spec.overhead_total);
    println!("bump density: {:.2} bumps/mm^2 (count {})", bumps.per_mm2, bumps.rounded_count);
    println!("theoretical electrical: {} GB/s/mm^2", sweep::format_sig6(bw_density::theoretical_bw_density(&spec).gbyte_s_per_mm2()));
    println!("realizable electrical: {:.2} GB/s/mm^2", bw_density::realizable_bw_density(&spec));
    println!(
        "optical: {} GB/s/mm^2 ({} TSOV/mm^2 at ratio {}, {} WDM x {} Gb/s)",
        sweep::format_sig6(optical.gbyte_s_per_mm2),
        optical.tsov_per_mm2,
        sc.tsov.tsov_ratio,
        sc.tsov.n_wdm,
        sc.tsov.channel_datarate_gbps
    );
    if optical.no_tsov {
        eprintln!("warning: no TSOV fits ratio {} at {} um pitch", sc.tsov.tsov_ratio, spec.bump_pitch_um);
    }
    Ok(())
}

fn laser_budget(common: &Common, sensitivity: Option<f64>, path_loss: Option<f64>) -> Result<()> {
    let mut f = load_file(common)?;
    if let Some(s) = sensitivity {
        f.laser_budget.sensitivity_dbm = Some(s);
    }
    if let Some(l) = path_loss {
        f.laser_budget.path_loss_db = l;
    }
    let sc = resolve(&f)?;
    let s = sc.laser_budget_sensitivity_dbm()?;
    let lb = sc.laser_budget;
    let per_channel = opt_link::required_laser_electrical_power(s, lb.path_loss_db, &sc.optical)?;
    println!("{}", sc.provenance());
    println!("sensitivity: {s:.2} dBm OMA");
    println!(
        "path loss {} dB, margin {} dB, ER {} dB, WPE {}",
        lb.path_loss_db, sc.optical.link_margin_db, sc.optical.extinction_ratio_db, sc.optical.laser_wpe
    );
    println!("laser electrical power per channel: {per_channel:.2} uW");
    println!(
        "total for {} channels: {:.3} mW",
        lb.n_channels,
        per_channel * f64::from(lb.n_channels) * 1e-3
    );
    Ok(())
}

fn reproduce_figure(common: &Common, id: &str) -> Result<()> {
    let fig = FigureSpec::stock(id)?;
    let table = sweep::reproduce_figure(&fig, &load_file(common)?)?;
    match &common.out {
        None if common.format == Format::Csv => {
            print!("{}", table.to_csv()?);
            Ok(())
        }
        None => Err(Error::Validation("--format svg/both needs --out".into())),
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| Error::Io { path: dir.clone(), source: e })?;
            if common.format != Format::Svg {
                let p = dir.join(format!("{id}.csv"));
                table.write_csv(&p)?;
                eprintln!("wrote {}", p.display());
            }
            if common.format != Format::Csv {
                let p = dir.join(format!("{id}.svg"));
                plot::emit_plot(&table, &fig.plot, &fig.title, &p)?;
                eprintln!("wrote {}", p.display());
            }
            Ok(())
        }
    }
}

fn fom(common: &Common, database: Option<&Path>) -> Result<()> {
    let mut spec = SweepSpec::new(SweepKind::FomTable, None);
    spec.database = database.map(Path::to_path_buf);
    let sc = resolve(&load_file(common)?)?;
    let table = sweep::run_sweep(&spec, &sc)?;
    if table.rows.is_empty() {
        eprintln!("warning: technology database is empty");
    }
    emit(&table, SweepKind::FomTable, common)
}

fn dispatch(cli: &Cli) -> Result<()> {
    let c = &cli.common;
    match &cli.command {
        Command::Fom { database } => fom(c, database.as_deref()),
        Command::EnergySweep(r) => run_kind(
            SweepSpec::new(SweepKind::EnergyVsLength, Some(r.axis("length_mm", 1.0, 50.0, 1.0))),
            c,
        ),
        Command::PartitionLength => partition_length(c),
        Command::BwDensity { from_profile } => bw_density(c, *from_profile),
        Command::BwTotal(r) => {
            let axis = match (c.die_edge, r.start, r.stop) {
                (Some(edge), None, None) => list_axis("die_edge_mm", &[edge]),
                _ => Some(r.axis("die_edge_mm", 1.0, 20.0, 1.0)),
            };
            run_kind(SweepSpec::new(SweepKind::TotalBwVsEdge, axis), c)
        }
        Command::WdmSweep { values } => run_kind(SweepSpec::new(SweepKind::WdmSweep, list_axis("n_wdm", values)), c),
        Command::PitchMatch { pitches } => {
            run_kind(SweepSpec::new(SweepKind::PitchMatch, list_axis("pitch_um", pitches)), c)
        }
        Command::RxSensitivity(r) => run_kind(
            SweepSpec::new(SweepKind::OmaVsCap, Some(r.axis("c_total_ff", 1.0, 50.0, 1.0))),
            c,
        ),
        Command::LaserBudget { sensitivity_dbm, path_loss_db } => laser_budget(c, *sensitivity_dbm, *path_loss_db),
        Command::ReproduceFigure { id } => reproduce_figure(c, id),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 1 } else { 2 })
        }
    }
}
