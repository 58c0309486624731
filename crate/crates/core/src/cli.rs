//! Command-line front end: `build`, `query`, `gen` and `bench`.
//!
//! `build` writes a label directory: a copy of the timetable, the label
//! stores, and `manifest.json` describing how they were built. `query` and
//! `bench` read such a directory back.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bench::{random_queries, run_bench, BenchError};
use crate::generator::{generate, GenConfig, GenError, Shape};
use crate::index::{EaIndex, IndexStats, McBuildError, McIndex, MttStrategy};
use crate::labeling::{LabelError, LabelStats, VertexOrdering};
use crate::mtt::{shift_arrivals_for_mtt_mc, split_stops_for_mtt_ea};
use crate::query::{EaQuery, EaVariant, Engine, QueryError};
use crate::store::{
    deserialize_labels, deserialize_stop_labels, serialize_labels, serialize_stop_labels, StoreError,
};
use crate::superlabel::LocationAccess;
use crate::timetable::{StopId, Time, Timetable, TimetableError, INFINITY};
use crate::tsv::parse_timetable;

pub const TIMETABLE_FILE: &str = "timetable.tsv";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const EA_LABELS_FILE: &str = "ea_labels.ptlb";
pub const STOP_LABELS_FILE: &str = "stop_labels.ptlb";
pub const MC_LABELS_FILE: &str = "mc_labels.ptlb";

#[derive(Debug, Parser)]
#[command(name = "transit-labels", version, about = "Hub-label journey planning on transit timetables")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build label stores from a timetable.
    Build(BuildArgs),
    /// Answer one query from a label directory.
    Query(QueryArgs),
    /// Generate a synthetic timetable.
    Gen(GenArgs),
    /// Run random queries through every EA variant.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    Ea,
    Mc,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderingArg {
    Degree,
    Sampled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MttArg {
    None,
    Split,
    Shift,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Event,
    Stop,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// Timetable in TSV format.
    pub timetable: PathBuf,
    /// Output directory.
    #[arg(long, short)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "both")]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value = "degree")]
    pub ordering: OrderingArg,
    #[arg(long, value_enum, default_value = "none")]
    pub mtt: MttArg,
    /// Seed of the sampled ordering.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    /// Label directory written by `build`.
    pub dir: PathBuf,
    #[command(subcommand)]
    pub kind: QueryKind,
    #[arg(long, value_enum, default_value = "event", global = true)]
    pub engine: EngineArg,
    #[arg(long, overrides_with = "no_pruning", global = true)]
    pub pruning: bool,
    #[arg(long, global = true)]
    pub no_pruning: bool,
    #[arg(long, global = true)]
    pub hashing: bool,
    #[arg(long, global = true)]
    pub binary_search: bool,
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum QueryKind {
    /// Earliest arrival: SOURCE TARGET DEPARTURE.
    Ea { source: String, target: String, departure: Time },
    /// All tight (departure, arrival) pairs: SOURCE TARGET.
    Profile { source: String, target: String },
    /// Arrival/transfer Pareto set: SOURCE TARGET DEPARTURE.
    Mc { source: String, target: String, departure: Time },
    /// Location EA; locations are `stop:walk,...` lists.
    LocEa { source: String, target: String, departure: Time },
    /// Location profile; locations are `stop:walk,...` lists.
    LocProfile { source: String, target: String },
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub stops: usize,
    #[arg(long)]
    pub trips: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "grid")]
    pub shape: Shape,
    #[arg(long, default_value_t = 0)]
    pub footpaths: usize,
    #[arg(long, default_value_t = 0)]
    pub max_mtt: Time,
    /// Output file; standard output when absent.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Label directory written by `build`.
    pub dir: PathBuf,
    #[arg(long, default_value_t = 1000)]
    pub queries: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Timetable { path: PathBuf, source: TimetableError },
    #[error("{path}: {source}")]
    Store { path: PathBuf, source: StoreError },
    #[error(transparent)]
    Labels(#[from] LabelError),
    #[error(transparent)]
    McBuild(#[from] McBuildError),
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Bench(#[from] BenchError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("usage: {0}")]
    Usage(String),
    #[error("output: {0}")]
    Output(#[from] io::Error),
}

/// What a successful command found.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Done,
    Unreachable,
}

impl Outcome {
    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::Done => 0,
            Outcome::Unreachable => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: u16,
    pub mode: ModeArg,
    pub ordering: OrderingArg,
    pub mtt: MttArg,
    pub seed: u64,
    pub files: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ea: Option<IndexStats>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mc: Option<LabelStats>,
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_timetable(path: &Path) -> Result<Timetable, CliError> {
    let bytes = read(path)?;
    let text = String::from_utf8_lossy(&bytes);
    parse_timetable(&text).map_err(|source| CliError::Timetable {
        path: path.to_path_buf(),
        source,
    })
}

fn ordering(arg: OrderingArg, seed: u64) -> VertexOrdering {
    match arg {
        OrderingArg::Degree => VertexOrdering::Degree,
        OrderingArg::Sampled => VertexOrdering::Sampled { samples: 16, seed },
    }
}

fn mtt_strategy(arg: MttArg) -> MttStrategy {
    match arg {
        MttArg::None => MttStrategy::None,
        MttArg::Split => MttStrategy::Split,
        MttArg::Shift => MttStrategy::Shift,
    }
}

/// Runs one command, writing its answer to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Build(args) => cmd_build(&args, out),
        Command::Query(args) => cmd_query(&args, out),
        Command::Gen(args) => cmd_gen(&args, out),
        Command::Bench(args) => cmd_bench(&args, out),
    }
}

pub fn cmd_build(args: &BuildArgs, out: &mut dyn Write) -> Result<Outcome, CliError> {
    match (args.mode, args.mtt) {
        (ModeArg::Ea, MttArg::Shift) => {
            return Err(CliError::Usage("--mtt shift applies to multicriteria labels only".into()))
        }
        (ModeArg::Mc, MttArg::Split) => {
            return Err(CliError::Usage(
                "--mtt split applies to earliest-arrival labels only".into(),
            ))
        }
        _ => {}
    }
    let tt = load_timetable(&args.timetable)?;
    fs::create_dir_all(&args.out).map_err(|source| CliError::Io {
        path: args.out.clone(),
        source,
    })?;
    let order = ordering(args.ordering, args.seed);
    let strategy = mtt_strategy(args.mtt);
    let mut manifest = Manifest {
        format: 1,
        mode: args.mode,
        ordering: args.ordering,
        mtt: args.mtt,
        seed: args.seed,
        files: vec![TIMETABLE_FILE.into()],
        ea: None,
        mc: None,
    };
    write(&args.out.join(TIMETABLE_FILE), tt.to_tsv().as_bytes())?;

    if args.mode != ModeArg::Mc {
        let index = EaIndex::build_with_mtt(&tt, order, strategy)?;
        write(&args.out.join(EA_LABELS_FILE), &serialize_labels(&index.labels))?;
        write(&args.out.join(STOP_LABELS_FILE), &serialize_stop_labels(&index.stop_labels))?;
        manifest.files.push(EA_LABELS_FILE.into());
        manifest.files.push(STOP_LABELS_FILE.into());
        manifest.ea = Some(index.stats());
    }
    if args.mode != ModeArg::Ea {
        let index = McIndex::build_with_mtt(&tt, order, strategy)?;
        write(&args.out.join(MC_LABELS_FILE), &serialize_labels(&index.labels))?;
        manifest.files.push(MC_LABELS_FILE.into());
        manifest.mc = Some(index.stats());
    }
    let text = serde_json::to_string_pretty(&manifest)?;
    write(&args.out.join(MANIFEST_FILE), text.as_bytes())?;

    if args.json {
        writeln!(out, "{text}")?;
    } else {
        if let Some(s) = &manifest.ea {
            writeln!(
                out,
                "ea: {} vertices, {:.2} hubs per label, {:.1} hubs per stop, {:.1} stop-label hubs per stop",
                s.labels.vertices,
                s.labels.hubs_per_label,
                s.labels.hubs_per_stop,
                s.labels.stop_hubs_per_stop.unwrap_or(0.0)
            )?;
        }
        if let Some(s) = &manifest.mc {
            writeln!(
                out,
                "mc: {} vertices, {:.2} hubs per label, {:.1} hubs per stop",
                s.vertices, s.hubs_per_label, s.hubs_per_stop
            )?;
        }
        for f in &manifest.files {
            let len = fs::metadata(args.out.join(f)).map(|m| m.len()).unwrap_or(0);
            writeln!(out, "{f}: {len} bytes")?;
        }
    }
    Ok(Outcome::Done)
}

/// A label directory loaded back into memory.
pub struct LoadedDir {
    pub manifest: Manifest,
    pub original: Timetable,
    pub ea: Option<EaIndex>,
    pub mc: Option<McIndex>,
}

pub fn load_dir(dir: &Path) -> Result<LoadedDir, CliError> {
    let manifest: Manifest = serde_json::from_slice(&read(&dir.join(MANIFEST_FILE))?)?;
    let original = load_timetable(&dir.join(TIMETABLE_FILE))?;
    let store = |name: &str, source: StoreError| CliError::Store {
        path: dir.join(name),
        source,
    };
    let ea = if manifest.files.iter().any(|f| f == EA_LABELS_FILE) {
        let tt = match manifest.mtt {
            MttArg::Split => split_stops_for_mtt_ea(&original),
            _ => original.clone(),
        };
        let labels = deserialize_labels(&read(&dir.join(EA_LABELS_FILE))?)
            .map_err(|e| store(EA_LABELS_FILE, e))?;
        let stop_labels = deserialize_stop_labels(&read(&dir.join(STOP_LABELS_FILE))?)
            .map_err(|e| store(STOP_LABELS_FILE, e))?;
        Some(EaIndex::from_parts(tt, labels, stop_labels))
    } else {
        None
    };
    let mc = if manifest.files.iter().any(|f| f == MC_LABELS_FILE) {
        let tt = match manifest.mtt {
            MttArg::Shift => shift_arrivals_for_mtt_mc(&original).map_err(|source| CliError::Timetable {
                path: dir.join(TIMETABLE_FILE),
                source,
            })?,
            _ => original.clone(),
        };
        let labels = deserialize_labels(&read(&dir.join(MC_LABELS_FILE))?)
            .map_err(|e| store(MC_LABELS_FILE, e))?;
        Some(McIndex { timetable: tt, labels })
    } else {
        None
    };
    Ok(LoadedDir {
        manifest,
        original,
        ea,
        mc,
    })
}

fn stop_id(tt: &Timetable, name: &str) -> Result<StopId, CliError> {
    tt.stop_by_name(name)
        .ok_or_else(|| CliError::Usage(format!("unknown stop `{name}`")))
}

/// Stops of the indexed timetable standing for an original stop (several
/// after stop splitting).
fn members(index: &EaIndex, original: &Timetable, name: &str) -> Result<Vec<StopId>, CliError> {
    let p = stop_id(original, name)?;
    let ids = index.timetable.stops_derived_from(p);
    Ok(if ids.is_empty() { vec![p] } else { ids })
}

/// Parses `stop:walk,stop:walk`; a bare stop name means walk 0.
fn parse_location(index: &EaIndex, original: &Timetable, spec: &str) -> Result<LocationAccess, CliError> {
    let mut entries = Vec::new();
    for part in spec.split(',').filter(|s| !s.trim().is_empty()) {
        let (name, walk) = match part.rsplit_once(':') {
            Some((n, w)) => (
                n.trim(),
                w.trim()
                    .parse::<Time>()
                    .map_err(|_| CliError::Usage(format!("bad walking time in `{part}`")))?,
            ),
            None => (part.trim(), 0),
        };
        for p in members(index, original, name)? {
            entries.push((p, walk));
        }
    }
    if entries.is_empty() {
        return Err(QueryError::EmptyAccess.into());
    }
    Ok(LocationAccess::new(entries))
}

fn need<'a, T>(index: &'a Option<T>, what: &str) -> Result<&'a T, CliError> {
    index
        .as_ref()
        .ok_or_else(|| CliError::Usage(format!("label directory has no {what} labels")))
}

fn time_text(t: Time) -> String {
    if t == INFINITY {
        "unreachable".into()
    } else {
        t.to_string()
    }
}

pub fn cmd_query(args: &QueryArgs, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let dir = load_dir(&args.dir)?;
    let variant = EaVariant {
        engine: match args.engine {
            EngineArg::Event => Engine::EventLabels,
            EngineArg::Stop => Engine::StopLabels,
        },
        pruning: !args.no_pruning,
        hashing: args.hashing,
        binary_search: args.binary_search,
    };
    let json = args.json;
    match &args.kind {
        QueryKind::Ea {
            source,
            target,
            departure,
        }
        | QueryKind::LocEa {
            source,
            target,
            departure,
        } => {
            let index = need(&dir.ea, "earliest-arrival")?;
            let loc = matches!(args.kind, QueryKind::LocEa { .. });
            let src = parse_location(index, &dir.original, source)?;
            let dst = parse_location(index, &dir.original, target)?;
            let single = |a: &LocationAccess| a.entries.len() == 1 && a.entries[0].1 == 0;
            let answer = if !loc && single(&src) && single(&dst) {
                index.ea(EaQuery::new(src.entries[0].0, dst.entries[0].0, *departure), variant)?
            } else {
                index.loc_ea(&src, &dst, *departure)?
            };
            if json {
                writeln!(out, "{}", serde_json::to_string(&answer)?)?;
            } else {
                writeln!(out, "{}", time_text(answer.arrival))?;
            }
            Ok(if answer.is_reachable() {
                Outcome::Done
            } else {
                Outcome::Unreachable
            })
        }
        QueryKind::Profile { source, target } | QueryKind::LocProfile { source, target } => {
            let index = need(&dir.ea, "earliest-arrival")?;
            let src = parse_location(index, &dir.original, source)?;
            let dst = parse_location(index, &dir.original, target)?;
            let single = |a: &LocationAccess| a.entries.len() == 1 && a.entries[0].1 == 0;
            let loc = matches!(args.kind, QueryKind::LocProfile { .. });
            let profile = if !loc && single(&src) && single(&dst) {
                index.profile(src.entries[0].0, dst.entries[0].0, variant.engine)?
            } else {
                index.loc_profile(&src, &dst)?
            };
            if json {
                writeln!(out, "{}", serde_json::to_string(&profile)?)?;
            } else {
                for e in &profile {
                    writeln!(out, "{}\t{}", e.departure, e.arrival)?;
                }
            }
            Ok(if profile.is_empty() {
                Outcome::Unreachable
            } else {
                Outcome::Done
            })
        }
        QueryKind::Mc {
            source,
            target,
            departure,
        } => {
            let index = need(&dir.mc, "multicriteria")?;
            let q = EaQuery::new(
                stop_id(&dir.original, source)?,
                stop_id(&dir.original, target)?,
                *departure,
            );
            let answer = index.query(q)?;
            if json {
                writeln!(out, "{}", serde_json::to_string(&answer)?)?;
            } else {
                for e in &answer.entries {
                    writeln!(out, "{}\t{}", e.arrival, e.transfers)?;
                }
            }
            Ok(if answer.entries.is_empty() {
                Outcome::Unreachable
            } else {
                Outcome::Done
            })
        }
    }
}

pub fn cmd_gen(args: &GenArgs, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let cfg = GenConfig::new(args.stops, args.trips, args.seed, args.shape)
        .footpaths(args.footpaths)
        .max_mtt(args.max_mtt);
    let tt = generate(&cfg)?;
    match &args.out {
        Some(path) => write(path, tt.to_tsv().as_bytes())?,
        None => tt.write_tsv(out)?,
    }
    Ok(Outcome::Done)
}

pub fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let dir = load_dir(&args.dir)?;
    let index = need(&dir.ea, "earliest-arrival")?;
    let queries = random_queries(&index.timetable, args.queries, args.seed);
    let report = run_bench(index, &queries)?;
    if args.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
    } else {
        writeln!(out, "{report}")?;
    }
    Ok(Outcome::Done)
}
