//! `cornercase`: author, fuse, convert and inspect corner-case scenarios.
//!
//! Exit codes: 0 success, 1 I/O or parse error, 2 validation failure
//! (violations on stderr), 64 usage error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use cornercase::master::{self, AssetManifest, Master, SchemaManifest};
use cornercase::ontology::{canonical, Ontology};
use cornercase::{builder, catalog, dsl, effects, fusion, xosc};

/// Environment variable naming an asset manifest (TOML) that replaces the
/// bundled one when building scenario files.
const ASSETS_ENV: &str = "CORNERCASE_ASSETS";

#[derive(Parser)]
#[command(
    name = "cornercase",
    version,
    about = "Corner-case scenario ontologies to OpenSCENARIO 1.0"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a scenario ontology from a scenario description file.
    Build {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Convert a scenario ontology to an OpenSCENARIO file.
    Convert {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// FileHeader date, YYYY-MM-DDThh:mm:ss (default: now, UTC).
        #[arg(long)]
        date: Option<String>,
    },
    /// Fuse two or more scenario ontologies over the same town.
    Merge {
        #[arg(required = true, num_args = 2..)]
        inputs: Vec<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
        /// Also write the fusion report as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Validate a scenario ontology (.onto) or OpenSCENARIO file (.xosc).
    Validate { input: PathBuf },
    /// Print ontology statistics.
    Stats {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = StatsFormat::Text)]
        format: StatsFormat,
    },
    /// The reference corner-case catalog.
    Catalog {
        #[command(subcommand)]
        command: CatalogCommand,
    },
    /// Apply a sensor effect to a P6 pixmap.
    Effects {
        #[command(subcommand)]
        effect: Effect,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StatsFormat {
    Text,
    MachineReadable,
}

#[derive(Subcommand)]
enum CatalogCommand {
    /// List the catalog entries.
    List,
    /// Write `<id>.onto` and `<id>.xosc` (and `<id>.deadpixels` where
    /// applicable) into a directory. `all` builds every entry.
    Build {
        id: String,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        date: Option<String>,
    },
}

#[derive(Subcommand)]
enum Effect {
    /// Set the pixels listed in a mask directive to its fill value.
    Deadpixels {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        mask: PathBuf,
    },
    /// Multiply every channel by a gain and clamp.
    Overexposure {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        gain: f64,
        #[arg(long, default_value_t = 255)]
        clamp: u8,
    },
}

enum Fail {
    Usage(String),
    Io(String),
    Invalid(Vec<String>),
}

impl Fail {
    fn code(&self) -> u8 {
        match self {
            Fail::Io(_) => 1,
            Fail::Invalid(_) => 2,
            Fail::Usage(_) => 64,
        }
    }
}

type Res<T> = Result<T, Fail>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Fail::Usage(m) => eprintln!("error: {m}\n\nRun `cornercase --help` for usage."),
                Fail::Io(m) => eprintln!("error: {m}"),
                Fail::Invalid(lines) => {
                    eprintln!("validation failed:");
                    for l in lines {
                        eprintln!("  {l}");
                    }
                }
            }
            ExitCode::from(f.code())
        }
    }
}

fn run(command: Command) -> Res<()> {
    match command {
        Command::Build { input, output } => {
            let text = read_text(&input)?;
            let master = master_from_env()?;
            let handle = dsl::compile_with(&text, &master)
                .map_err(|e| Fail::Io(format!("{}:{e}", input.display())))?;
            let onto = handle.finalize().map_err(|e| invalid(&e.violations))?;
            write(&output, &canonical::serialize_bytes(&onto))
        }
        Command::Convert { input, output, date } => {
            let date = check_date(date)?;
            let onto = read_onto(&input)?;
            let xml = convert(&onto, date.as_deref())?;
            write(&output, &xml)
        }
        Command::Merge {
            inputs,
            output,
            report,
        } => {
            let ontos = inputs.iter().map(|p| read_onto(p)).collect::<Res<Vec<_>>>()?;
            let (fused, rep) = fusion::fuse(&ontos).map_err(|e| match e {
                fusion::FusionError::InputInvalid { index, violations } => Fail::Invalid(
                    violations
                        .iter()
                        .map(|v| format!("{}: {v}", inputs[index].display()))
                        .collect(),
                ),
                fusion::FusionError::OutputInvalid(violations) => invalid(&violations),
                other => Fail::Invalid(vec![other.to_string()]),
            })?;
            write(&output, &canonical::serialize_bytes(&fused))?;
            if let Some(path) = report {
                let json = serde_json::to_string_pretty(&rep).map_err(|e| Fail::Io(e.to_string()))?;
                write(&path, format!("{json}\n").as_bytes())?;
            }
            Ok(())
        }
        Command::Validate { input } => validate(&input),
        Command::Stats { input, format } => {
            let onto = read_onto(&input)?;
            let stats = onto.stats();
            match format {
                StatsFormat::Text => println!("{stats}"),
                StatsFormat::MachineReadable => {
                    println!(
                        "{}",
                        serde_json::to_string(&stats).map_err(|e| Fail::Io(e.to_string()))?
                    )
                }
            }
            Ok(())
        }
        Command::Catalog {
            command: CatalogCommand::List,
        } => {
            for e in catalog::entries() {
                let tags: Vec<String> = e
                    .corner_cases
                    .iter()
                    .map(|c| format!("{}/{}", c.layer().as_str(), c.level().as_str()))
                    .collect();
                println!("{}\t{}\t{}", e.id, e.title, tags.join(","));
            }
            Ok(())
        }
        Command::Catalog {
            command: CatalogCommand::Build { id, output, date },
        } => {
            let date = check_date(date)?;
            let ids: Vec<&'static str> = if id == "all" {
                catalog::entries().iter().map(|e| e.id).collect()
            } else {
                vec![
                    catalog::entry(&id)
                        .ok_or_else(|| Fail::Usage(format!("unknown catalog entry `{id}` (a-j or all)")))?
                        .id,
                ]
            };
            fs::create_dir_all(&output).map_err(|e| io_err(&output, e))?;
            let results: Vec<Res<()>> = std::thread::scope(|s| {
                let handles: Vec<_> = ids
                    .iter()
                    .map(|id| {
                        let (output, date) = (&output, date.as_deref());
                        s.spawn(move || catalog_build(id, output, date))
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("catalog worker panicked"))
                    .collect()
            });
            results.into_iter().collect()
        }
        Command::Effects { effect } => run_effect(effect),
    }
}

fn catalog_build(id: &str, dir: &Path, date: Option<&str>) -> Res<()> {
    let onto = catalog::build(id).map_err(|e| match e {
        catalog::CatalogError::Invalid(v) => invalid(&v.violations),
        other => Fail::Invalid(vec![format!("entry {id}: {other}")]),
    })?;
    write(
        &dir.join(format!("{id}.onto")),
        &canonical::serialize_bytes(&onto),
    )?;
    write(&dir.join(format!("{id}.xosc")), &convert(&onto, date)?)?;
    if catalog::entry(id).is_some_and(|e| e.sensor_effect) {
        write(
            &dir.join(format!("{id}.deadpixels")),
            catalog::dead_pixel_directive().as_bytes(),
        )?;
    }
    Ok(())
}

fn convert(onto: &Ontology, date: Option<&str>) -> Res<Vec<u8>> {
    let doc = xosc::lower(onto).map_err(|e| match e {
        xosc::LowerError::Invalid(v) => invalid(&v),
        other => Fail::Invalid(vec![other.to_string()]),
    })?;
    let problems = xosc::validate_xosc(&doc);
    if !problems.is_empty() {
        return Err(Fail::Invalid(problems.iter().map(|v| v.to_string()).collect()));
    }
    Ok(xosc::emit_xml(&doc, date))
}

fn validate(input: &Path) -> Res<()> {
    let bytes = fs::read(input).map_err(|e| io_err(input, e))?;
    let is_xml = input.extension().is_some_and(|e| e == "xosc" || e == "xml")
        || bytes.trim_ascii_start().starts_with(b"<");
    if is_xml {
        let text =
            String::from_utf8(bytes).map_err(|_| Fail::Io(format!("{}: not UTF-8", input.display())))?;
        let doc =
            xosc::XoscDocument::parse(&text).map_err(|e| Fail::Io(format!("{}: {e}", input.display())))?;
        let problems = xosc::validate_xosc(&doc);
        if !problems.is_empty() {
            return Err(Fail::Invalid(problems.iter().map(|v| v.to_string()).collect()));
        }
    } else {
        let onto =
            canonical::parse_bytes(&bytes).map_err(|e| Fail::Io(format!("{}: {e}", input.display())))?;
        let violations = builder::validate(&onto);
        if !violations.is_empty() {
            return Err(invalid(&violations));
        }
    }
    println!("{}: valid", input.display());
    Ok(())
}

fn run_effect(effect: Effect) -> Res<()> {
    let (input, output) = match &effect {
        Effect::Deadpixels { input, output, .. } | Effect::Overexposure { input, output, .. } => {
            (input, output)
        }
    };
    let bytes = fs::read(input).map_err(|e| io_err(input, e))?;
    let img = effects::read_ppm(&bytes).map_err(|e| Fail::Io(format!("{}: {e}", input.display())))?;
    let out = match &effect {
        Effect::Deadpixels { mask, .. } => {
            let mask = effects::PixelMask::parse_directive(&read_text(mask)?)
                .map_err(|e| Fail::Io(format!("{}: {e}", mask.display())))?;
            effects::apply_dead_pixels(&img, &mask)
        }
        Effect::Overexposure { gain, clamp, .. } => effects::apply_overexposure(&img, *gain, *clamp),
    }
    .map_err(|e| Fail::Usage(e.to_string()))?;
    write(
        output,
        &effects::write_ppm(&out).map_err(|e| Fail::Io(e.to_string()))?,
    )
}

fn read_text(path: &Path) -> Res<String> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

fn read_onto(path: &Path) -> Res<Ontology> {
    let bytes = fs::read(path).map_err(|e| io_err(path, e))?;
    canonical::parse_bytes(&bytes).map_err(|e| Fail::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> Res<()> {
    fs::write(path, bytes).map_err(|e| io_err(path, e))
}

fn io_err(path: &Path, e: std::io::Error) -> Fail {
    Fail::Io(format!("{}: {e}", path.display()))
}

fn invalid(violations: &[builder::Violation]) -> Fail {
    Fail::Invalid(violations.iter().map(|v| v.to_string()).collect())
}

fn check_date(date: Option<String>) -> Res<Option<String>> {
    if let Some(d) = &date {
        chrono::NaiveDateTime::parse_from_str(d, "%Y-%m-%dT%H:%M:%S")
            .map_err(|_| Fail::Usage(format!("--date must be YYYY-MM-DDThh:mm:ss, got `{d}`")))?;
    }
    Ok(date)
}

fn master_from_env() -> Res<Master> {
    match std::env::var_os(ASSETS_ENV) {
        None => Ok(master::bundled().clone()),
        Some(path) => {
            let path = PathBuf::from(path);
            let assets = AssetManifest::from_toml(&read_text(&path)?)
                .map_err(|e| Fail::Io(format!("{} ({ASSETS_ENV}): {e}", path.display())))?;
            master::build_master_with(SchemaManifest::bundled(), assets)
                .map_err(|e| Fail::Io(format!("{} ({ASSETS_ENV}): {e}", path.display())))
        }
    }
}
