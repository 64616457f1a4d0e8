// SPDX-License-Identifier: Apache-2.0

//! Command-line front end. Exit status is 0 on success, 1 on usage or
//! validation errors and 2 on simulation errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bist::{overhead_report, OverheadReport};
use crate::bumpmap::{build_test_map, BumpId, Color, Lattice, LatticeKind, DEFAULT_SHORT_RADIUS_FACTOR};
use crate::campaign::{rediagnose, run_campaign, to_canonical_json, CampaignConfig, CampaignReport};
use crate::defect::{
    build_faulty_circuit, classify_defect, emit_netlist, fit_severity_curve, read_samples_csv, ComponentKind,
    CurveFamily, DefectMagnitudes, ElectricalScenario, FaultMagnitude, PhysicalDefect,
};
use crate::diagnosis::{build_fault_dictionary, diagnosability, Diagnosability, Realization};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "chiplet-bist", version, about = "Chiplet interconnect BIST fault simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Emit a colored, blocked bump map.
    GenMap(GenMapArgs),
    /// Emit the 14-fault dictionary and its diagnosability.
    Dictionary(DictionaryArgs),
    /// Run a fault campaign from a JSON config.
    Simulate(SimulateArgs),
    /// Re-diagnose a stored campaign report and check it against the stored diagnosis.
    Diagnose(DiagnoseArgs),
    /// Emit an equivalent-circuit SPICE deck.
    Netlist(NetlistArgs),
    /// Fit a severity curve to `x,y` CSV samples.
    Fit(FitArgs),
    /// Classify a defect magnitude into its functional fault.
    Classify(ClassifyArgs),
}

#[derive(Debug, Args)]
struct GenMapArgs {
    /// Campaign config to take the map and block count from.
    #[arg(long, conflicts_with_all = ["kind", "rows", "cols", "pitch_um", "radius_factor", "blocks"])]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "hexagonal")]
    kind: LatticeArg,
    #[arg(long, default_value_t = 16)]
    rows: usize,
    #[arg(long, default_value_t = 16)]
    cols: usize,
    #[arg(long, default_value_t = 40.0)]
    pitch_um: f64,
    /// Short radius in units of pitch.
    #[arg(long, default_value_t = DEFAULT_SHORT_RADIUS_FACTOR)]
    radius_factor: f64,
    #[arg(long, default_value_t = 1)]
    blocks: usize,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LatticeArg {
    Hexagonal,
    Rectangular,
}

#[derive(Debug, Args)]
struct DictionaryArgs {
    /// Machine-readable output instead of the text summary.
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the sampler seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// `json` writes the full report, `csv` the per-category metrics.
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Defaults to the config's `output.report`, then stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DiagnoseArgs {
    #[arg(long)]
    report: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ComponentArg {
    CuPillar,
    RdlSegment,
}

impl From<ComponentArg> for ComponentKind {
    fn from(c: ComponentArg) -> Self {
        match c {
            ComponentArg::CuPillar => ComponentKind::CuPillar,
            ComponentArg::RdlSegment => ComponentKind::RdlSegment,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DefectArg {
    PillarCrack,
    ResistiveMisalignment,
    CapacitiveMisalignment,
    PillarBridge,
    RdlBridge,
    DamagedRdl,
}

impl From<DefectArg> for PhysicalDefect {
    fn from(d: DefectArg) -> Self {
        match d {
            DefectArg::PillarCrack => PhysicalDefect::PillarCrack,
            DefectArg::ResistiveMisalignment => PhysicalDefect::ResistiveMisalignment,
            DefectArg::CapacitiveMisalignment => PhysicalDefect::CapacitiveMisalignment,
            DefectArg::PillarBridge => PhysicalDefect::PillarBridge,
            DefectArg::RdlBridge => PhysicalDefect::RdlBridge,
            DefectArg::DamagedRdl => PhysicalDefect::DamagedRdl,
        }
    }
}

#[derive(Debug, Args)]
struct NetlistArgs {
    #[arg(long, value_enum)]
    component: ComponentArg,
    /// RDL segment length; required for `rdl-segment`.
    #[arg(long)]
    length_um: Option<f64>,
    /// Omit for the nominal circuit.
    #[arg(long, value_enum)]
    defect: Option<DefectArg>,
    /// Fault resistance in Ω.
    #[arg(long)]
    r_f: Option<f64>,
    /// Fault capacitance in F.
    #[arg(long)]
    c_f: Option<f64>,
    /// Contact resistance in Ω (resistive misalignment only).
    #[arg(long)]
    contact_ohm: Option<f64>,
    #[arg(long)]
    title: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    LogLinear,
    Exponential,
    Polynomial,
}

#[derive(Debug, Args)]
struct FitArgs {
    /// CSV file with an `x,y` header.
    #[arg(long)]
    samples: PathBuf,
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Polynomial degree (1 to 3).
    #[arg(long, default_value_t = 1)]
    degree: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ScenarioArg {
    VddOpen,
    VssOpen,
    SignalOpen,
    ShortToVdd,
    ShortToVss,
    SignalShort,
}

impl From<ScenarioArg> for ElectricalScenario {
    fn from(s: ScenarioArg) -> Self {
        match s {
            ScenarioArg::VddOpen => ElectricalScenario::VddOpen,
            ScenarioArg::VssOpen => ElectricalScenario::VssOpen,
            ScenarioArg::SignalOpen => ElectricalScenario::SignalOpen,
            ScenarioArg::ShortToVdd => ElectricalScenario::ShortToVdd,
            ScenarioArg::ShortToVss => ElectricalScenario::ShortToVss,
            ScenarioArg::SignalShort => ElectricalScenario::SignalToSignalShort,
        }
    }
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("magnitude").required(true).args(["r_ohm", "c_farad"]))]
struct ClassifyArgs {
    #[arg(long, value_enum)]
    scenario: ScenarioArg,
    /// Short resistance in Ω.
    #[arg(long)]
    r_ohm: Option<f64>,
    /// Open capacitance in F.
    #[arg(long)]
    c_farad: Option<f64>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

#[derive(Serialize)]
struct MapBump {
    id: BumpId,
    row: usize,
    col: usize,
    x_um: f64,
    y_um: f64,
    color: Color,
    block: usize,
}

#[derive(Serialize)]
struct MapDocument {
    version: u32,
    lattice: Lattice,
    short_radius_um: f64,
    bumps: Vec<MapBump>,
    edges: Vec<(BumpId, BumpId)>,
    overhead: OverheadReport,
}

fn gen_map(args: GenMapArgs, stdout: &mut dyn Write) -> Result<()> {
    let (lattice, radius_um, blocks) = match &args.config {
        Some(path) => {
            let cfg = CampaignConfig::load(path)?;
            (cfg.map.lattice()?, cfg.map.short_radius_factor * cfg.map.pitch_um, cfg.block_count)
        }
        None => {
            let kind = match args.kind {
                LatticeArg::Hexagonal => LatticeKind::Hexagonal,
                LatticeArg::Rectangular => LatticeKind::Rectangular,
            };
            let lattice = Lattice::new(kind, args.rows, args.cols, args.pitch_um)?;
            (lattice, args.radius_factor * args.pitch_um, args.blocks)
        }
    };
    let (map, graph) = build_test_map(lattice, radius_um, blocks)?;
    let bumps: Vec<MapBump> = map
        .ids()
        .map(|id| {
            let (row, col) = map.row_col(id);
            let (x_um, y_um) = map.position(id);
            MapBump {
                id,
                row,
                col,
                x_um,
                y_um,
                color: map.color(id).expect("colored"),
                block: map.block(id).expect("blocked"),
            }
        })
        .collect();
    let text = match args.format {
        Format::Json => to_canonical_json(&MapDocument {
            version: 1,
            lattice,
            short_radius_um: graph.short_radius_um(),
            bumps,
            edges: graph.edges().to_vec(),
            overhead: overhead_report(&map)?,
        })?,
        Format::Csv => {
            let mut w = csv_writer();
            for b in &bumps {
                w.serialize(b)?;
            }
            csv_finish(w)?
        }
    };
    emit(args.out.as_deref(), &text, stdout)
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn csv_finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[derive(Serialize)]
struct DictionaryDocument<'a> {
    version: u32,
    realizations: &'a [Realization],
    ambiguous_pairs: Vec<(String, String)>,
    diagnosability: Diagnosability,
    diagnosability_value: f64,
}

fn dictionary(args: DictionaryArgs, stdout: &mut dyn Write) -> Result<()> {
    let dict = build_fault_dictionary();
    let d = diagnosability(&dict);
    let pairs: Vec<(String, String)> = dict
        .ambiguous_pairs()
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
    let text = match args.format {
        Some(Format::Json) => to_canonical_json(&DictionaryDocument {
            version: 1,
            realizations: dict.realizations(),
            ambiguous_pairs: pairs,
            diagnosability: d,
            diagnosability_value: d.value(),
        })?,
        Some(Format::Csv) => {
            let mut w = csv_writer();
            w.write_record(["fault", "behavior", "word", "green", "blue", "red", "black"])?;
            for r in dict.realizations() {
                let mut rec = vec![
                    r.fault.to_string(),
                    r.behavior.map_or("", |b| b.short_name()).to_string(),
                    r.word.clone(),
                ];
                rec.extend(Color::ALL.iter().map(|&c| {
                    let resp = r.signature.get(c);
                    format!("{}{}", u8::from(resp.x), u8::from(resp.y))
                }));
                w.write_record(&rec)?;
            }
            csv_finish(w)?
        }
        None => {
            let mut s = String::new();
            writeln!(s, "{} faults, {} signatures", dict.universe_size(), dict.entries().len()).unwrap();
            for r in dict.realizations() {
                let label = match r.behavior {
                    Some(b) => format!("{} {}", r.fault, b.short_name()),
                    None => r.fault.to_string(),
                };
                writeln!(s, "  {label:<18} {} {}", r.word, r.signature).unwrap();
            }
            writeln!(s, "ambiguous pairs: {}", pairs.len()).unwrap();
            for (a, b) in &pairs {
                writeln!(s, "  {a} ~ {b}").unwrap();
            }
            writeln!(s, "D = {d}").unwrap();
            s
        }
    };
    emit(args.out.as_deref(), &text, stdout)
}

fn simulate(args: SimulateArgs, stdout: &mut dyn Write) -> Result<()> {
    let mut cfg = CampaignConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.override_seed(seed)?;
    }
    let report = run_campaign(&cfg)?;
    let text = match args.format {
        Format::Json => report.to_canonical_json()?,
        Format::Csv => report.metrics_csv()?,
    };
    let out = args
        .out
        .or_else(|| cfg.output.as_ref().and_then(|o| o.report.clone()));
    emit(out.as_deref(), &text, stdout)
}

fn diagnose_report(args: DiagnoseArgs, stdout: &mut dyn Write) -> Result<()> {
    let text = std::fs::read_to_string(&args.report)?;
    let raw: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::Validation(format!("report: {e}")))?;
    let report = CampaignReport::from_json(&text)?;
    let fresh = rediagnose(&report)?;
    let stored = raw["faults"]
        .as_array()
        .ok_or_else(|| Error::Validation("report has no `faults` array".into()))?;
    for (i, (old, new)) in stored.iter().zip(&fresh).enumerate() {
        if to_canonical_json(&old["diagnosis"])? != to_canonical_json(new)? {
            return Err(Error::Validation(format!(
                "diagnosis of fault {i} differs from the stored report"
            )));
        }
    }
    emit(args.out.as_deref(), &to_canonical_json(&fresh)?, stdout)
}

fn netlist(args: NetlistArgs, stdout: &mut dyn Write) -> Result<()> {
    let kind: ComponentKind = args.component.into();
    let defect: Option<PhysicalDefect> = args.defect.map(Into::into);
    let circuit = build_faulty_circuit(
        kind,
        defect,
        DefectMagnitudes {
            r_f: args.r_f,
            c_f: args.c_f,
            contact_ohm: args.contact_ohm,
        },
        args.length_um,
    )?;
    let title = args.title.unwrap_or_else(|| {
        let comp = match kind {
            ComponentKind::CuPillar => "cu_pillar",
            ComponentKind::RdlSegment => "rdl_segment",
        };
        match defect {
            Some(d) => format!("{comp} {}", serde_json::to_value(d).expect("unit enum")
                .as_str()
                .expect("string tag")),
            None => format!("{comp} nominal"),
        }
    });
    let mut deck = emit_netlist(&circuit, &title)?;
    if args.out.is_none() {
        deck.push('\n');
    }
    emit(args.out.as_deref(), &deck, stdout)
}

#[derive(Serialize)]
struct FitDocument {
    #[serde(flatten)]
    curve: crate::defect::SeverityCurve,
    residual_sum_of_squares: f64,
    samples: usize,
}

fn fit(args: FitArgs, stdout: &mut dyn Write) -> Result<()> {
    let samples = read_samples_csv(std::fs::File::open(&args.samples)?)?;
    let family = match args.family {
        FamilyArg::LogLinear => CurveFamily::LogLinear,
        FamilyArg::Exponential => CurveFamily::Exponential,
        FamilyArg::Polynomial => CurveFamily::Polynomial { degree: args.degree },
    };
    let curve = fit_severity_curve(&samples, family)?;
    let doc = FitDocument {
        residual_sum_of_squares: curve.residual_sum_of_squares(&samples),
        samples: samples.len(),
        curve,
    };
    emit(args.out.as_deref(), &to_canonical_json(&doc)?, stdout)
}

fn classify(args: ClassifyArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let magnitude = match (args.r_ohm, args.c_farad) {
        (Some(r), None) => FaultMagnitude::Resistance(r),
        (None, Some(c)) => FaultMagnitude::Capacitance(c),
        _ => unreachable!("clap enforces exactly one magnitude"),
    };
    let c = classify_defect(args.scenario.into(), magnitude)?;
    match args.format {
        Some(Format::Json) => stdout.write_all(to_canonical_json(&c)?.as_bytes())?,
        Some(Format::Csv) => {
            return Err(Error::Validation("classify supports text or json output".into()));
        }
        None => {
            writeln!(stdout, "{}", c.class)?;
            writeln!(stderr, "{}", c.geometry_note)?;
            if let Some(flag) = c.flag {
                writeln!(stderr, "warning: {flag:?}")?;
            }
        }
    }
    Ok(())
}

/// Runs the CLI on `argv` (including the program name) and returns the exit status.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                1
            } else {
                let _ = stdout.write_all(text.as_bytes());
                0
            };
        }
    };
    let result = match cli.command {
        Command::GenMap(a) => gen_map(a, stdout),
        Command::Dictionary(a) => dictionary(a, stdout),
        Command::Simulate(a) => simulate(a, stdout),
        Command::Diagnose(a) => diagnose_report(a, stdout),
        Command::Netlist(a) => netlist(a, stdout),
        Command::Fit(a) => fit(a, stdout),
        Command::Classify(a) => classify(a, stdout, stderr),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("chiplet-bist").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn dictionary_summary() {
        let (code, out, _) = call(&["dictionary"]);
        assert_eq!(code, 0);
        assert!(out.contains("D = 87/91 ≈ 0.95604"), "{out}");
        assert!(out.contains("ambiguous pairs: 4"));
    }

    #[test]
    fn classify_signal_short() {
        let (code, out, _) = call(&["classify", "--scenario", "signal-short", "--r-ohm", "150"]);
        assert_eq!(code, 0);
        assert_eq!(out, "WiredAnd\n");
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(call(&["bogus"]).0, 1);
        assert_eq!(call(&["classify", "--scenario", "signal-short"]).0, 1);
        assert_eq!(call(&["dictionary", "--nope"]).0, 1);
        let (code, out, _) = call(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("simulate"));
    }

    #[test]
    fn classify_needs_matching_quantity() {
        let (code, _, err) = call(&["classify", "--scenario", "vdd-open", "--r-ohm", "10"]);
        assert_eq!(code, 1);
        assert!(err.starts_with("error:"));
    }

    #[test]
    fn exit_codes_by_error_kind() {
        assert_eq!(Error::Simulation("mixed".into()).exit_code(), 2);
        assert_eq!(Error::Validation("bad".into()).exit_code(), 1);
        assert_eq!(call(&["simulate", "--config", "/nonexistent.json"]).0, 1);
    }
}
