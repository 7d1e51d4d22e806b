//! Command-line front end for the experiment harness: run a config, compare
//! several against a shared problem, verify the library's invariants, or list
//! the bundled presets.
//!
//! Exit codes: 0 success, 1 validation (bad arguments or configs), 2 solver or
//! certificate failure (including failed `verify` invariants), 3 I/O.

use ahpe::harness::{self, VerifyScope};
use ahpe::Error;
use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "ahpe",
    version,
    about = "Accelerated proximal-extragradient experiments on flat and hyperbolic space",
    after_help = "Trace files land in --out-dir if given, else $AHPE_OUTPUT_DIR, else the \
                  current directory."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one experiment config and write its trace CSV.
    Run {
        /// Path to a TOML experiment config.
        config: PathBuf,
        /// Directory for the trace file (overrides $AHPE_OUTPUT_DIR).
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Run several configs against the same problem and tabulate them.
    Compare {
        /// Config paths; all must share the manifold, objective, and start.
        #[arg(required = true, num_args = 1..)]
        configs: Vec<PathBuf>,
        /// Directory for the merged trace file (overrides $AHPE_OUTPUT_DIR).
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Run the invariant suite and report each check's worst violation.
    Verify {
        /// manifold | distortion | iprox | solver | all (default all).
        scope: Option<String>,
    },
    /// Inspect the bundled experiment presets.
    Presets {
        #[command(subcommand)]
        action: PresetsAction,
    },
}

#[derive(Subcommand)]
enum PresetsAction {
    /// List preset names and what they demonstrate.
    List,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Requested help/version is a success; anything else is a usage
            // error and maps to the validation exit code.
            let code = if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                0
            } else {
                1
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = dispatch(cli) {
        eprintln!("{e}");
        std::process::exit(match e {
            Error::Validation(_) => 1,
            Error::Certificate(_) | Error::Numeric(_) => 2,
            Error::Io(_) => 3,
        });
    }
}

fn dispatch(cli: Cli) -> ahpe::Result<()> {
    match cli.cmd {
        Cmd::Run { config, out_dir } => cmd_run(&config, out_dir.as_deref()),
        Cmd::Compare { configs, out_dir } => cmd_compare(&configs, out_dir.as_deref()),
        Cmd::Verify { scope } => cmd_verify(scope.as_deref()),
        Cmd::Presets { action: PresetsAction::List } => {
            cmd_presets_list();
            Ok(())
        }
    }
}

/// `--out-dir` beats `$AHPE_OUTPUT_DIR` beats the current directory; the
/// directory is created if missing.
fn resolve_out_dir(flag: Option<&Path>) -> ahpe::Result<PathBuf> {
    let dir = flag
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os("AHPE_OUTPUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).map_err(|e| {
        Error::Io(format!("cannot create output directory {}: {e}", dir.display()))
    })?;
    Ok(dir)
}

fn file_stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn create(path: &Path) -> ahpe::Result<BufWriter<File>> {
    let file =
        File::create(path).map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))?;
    Ok(BufWriter::new(file))
}

fn cmd_run(config: &Path, out_dir: Option<&Path>) -> ahpe::Result<()> {
    let cfg = harness::load_config(config)?;
    let outcome = harness::run_experiment(&cfg)?;

    let stem = file_stem(config);
    let filename = cfg.run.output.clone().unwrap_or_else(|| format!("{stem}-trace.csv"));
    let path = resolve_out_dir(out_dir)?.join(filename);
    harness::write_trace(&outcome.records, create(&path)?)?;

    println!("wrote {} ({} rows)", path.display(), outcome.records.len());
    println!("lambda = {:.6e}  sigma = {}", outcome.lambda, outcome.sigma);
    if let Some(last) = outcome.records.last() {
        let summary = harness::summarize(&stem, &outcome.records, cfg.run.target_gap);
        match (cfg.run.target_gap, summary.iterations_to_target) {
            (Some(t), Some(k)) => {
                println!("final gap {:.3e} at k = {} (target {:.1e} reached at k = {k})", last.f_gap, last.k, t)
            }
            (Some(t), None) => {
                println!("final gap {:.3e} at k = {} (target {:.1e} not reached)", last.f_gap, last.k, t)
            }
            (None, _) => println!("final gap {:.3e} at k = {}", last.f_gap, last.k),
        }
    }
    Ok(())
}

fn cmd_compare(configs: &[PathBuf], out_dir: Option<&Path>) -> ahpe::Result<()> {
    let mut entries = Vec::with_capacity(configs.len());
    for path in configs {
        entries.push((file_stem(path), harness::load_config(path)?));
    }
    let outcome = harness::compare(&entries)?;

    let path = resolve_out_dir(out_dir)?.join("compare.csv");
    harness::write_comparison(&outcome.runs, create(&path)?)?;

    print!("{}", outcome.report.render());
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_verify(scope: Option<&str>) -> ahpe::Result<()> {
    let scope = match scope {
        Some(s) => s.parse::<VerifyScope>()?,
        None => VerifyScope::All,
    };
    let report = harness::verify_suite(scope)?;
    print!("{}", report.render());
    let failed = report.items.iter().filter(|i| !i.pass).count();
    if failed > 0 {
        return Err(Error::Certificate(format!("{failed} invariant(s) violated")));
    }
    Ok(())
}

fn cmd_presets_list() {
    println!("bundled presets (the same files live under crates/ahpe/presets/):");
    for (name, description, _) in harness::PRESETS {
        println!("  {name:<24} {description}");
    }
}
