//! Command-line front end: `aperiodic <command> <scene.toml> [options]`.
//!
//! Exit codes: 0 success, 1 computation failure (including a failed self-check),
//! 2 usage or configuration error. Outputs are built in memory, written to temporary
//! files and renamed into place only when the whole command succeeded.

pub mod commands;
pub mod config;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use self::commands::{Artifact, Ctx, Outcome};
use self::config::{parse_scene, SceneConfig};

#[derive(Debug, Parser)]
#[command(name = "aperiodic", version, about = "Cut-and-project schemes, pure point measures and their Fourier transforms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Common {
    /// Scene file (TOML).
    pub config: PathBuf,
    /// Output directory (overrides `output.dir`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads for parallel sections.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Reserved; every pipeline is deterministic.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides `run.tol`.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Overrides `run.vh_n`.
    #[arg(long = "vh-n")]
    pub vh_n: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Materialize the scene on its region and write the patch.
    Points(Common),
    /// Density profile along the van Hove boxes (and the model-set density).
    Density(Common),
    /// Fourier–Bohr coefficients at the candidate frequencies.
    Fb(Common),
    /// Symbolic Fourier transform and its atoms in the frequency window.
    ExactFt(Common),
    /// Eberlein autocorrelation (with exact values for model combs).
    Autocorr(Common),
    /// Exact and numeric diffraction intensities side by side.
    Diffract(Common),
    /// Full classification report.
    Classify(Common),
    /// Poisson summation check for a lattice comb.
    PsfCheck(Common),
    /// Peak-count dichotomy report.
    Dichotomy(Common),
}

impl Command {
    fn parts(&self) -> (&'static str, &Common) {
        match self {
            Command::Points(c) => ("points", c),
            Command::Density(c) => ("density", c),
            Command::Fb(c) => ("fb", c),
            Command::ExactFt(c) => ("exact-ft", c),
            Command::Autocorr(c) => ("autocorr", c),
            Command::Diffract(c) => ("diffract", c),
            Command::Classify(c) => ("classify", c),
            Command::PsfCheck(c) => ("psf-check", c),
            Command::Dichotomy(c) => ("dichotomy", c),
        }
    }
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_COMPUTATION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

/// Parses `argv`, runs the command and returns the exit code; diagnostics go to stderr.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let (name, common) = cli.command.parts();
    let cfg = match load(common) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("{msg}");
            return EXIT_CONFIG;
        }
    };
    if let Some(n) = common.threads {
        // a second initialization in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let ctx = Ctx { cfg: &cfg, command: name };
    let result = match &cli.command {
        Command::Points(_) => commands::points(&ctx),
        Command::Density(_) => commands::density(&ctx),
        Command::Fb(_) => commands::fb(&ctx),
        Command::ExactFt(_) => commands::exact(&ctx),
        Command::Autocorr(_) => commands::autocorr(&ctx),
        Command::Diffract(_) => commands::diffract(&ctx),
        Command::Classify(_) => commands::classify(&ctx),
        Command::PsfCheck(_) => commands::psf_check(&ctx),
        Command::Dichotomy(_) => commands::dichotomy(&ctx),
    };
    let outcome: Outcome = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_COMPUTATION;
        }
    };
    let dir = common
        .out
        .clone()
        .or_else(|| cfg.out_dir.as_ref().map(|d| common.config.parent().unwrap_or(Path::new(".")).join(d)))
        .unwrap_or_else(|| PathBuf::from("."));
    match write_all(&dir, &cfg.stem, &outcome.artifacts) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
        }
        Err(e) => {
            eprintln!("error: cannot write outputs: {e}");
            return EXIT_COMPUTATION;
        }
    }
    if outcome.ok {
        EXIT_OK
    } else {
        eprintln!("check failed: {}", outcome.message.unwrap_or_default());
        EXIT_COMPUTATION
    }
}

fn load(common: &Common) -> Result<SceneConfig, String> {
    let src = std::fs::read_to_string(&common.config).map_err(|e| format!("cannot read {}: {e}", common.config.display()))?;
    let stem = common.config.file_stem().and_then(|s| s.to_str()).unwrap_or("scene");
    let mut cfg = parse_scene(&src, stem).map_err(|e| format!("{}: {e}", common.config.display()))?;
    if let Some(t) = common.tol {
        if !(t > 0.0) || !t.is_finite() {
            return Err(format!("--tol must be positive, got {t}"));
        }
        cfg.run.tol = t;
    }
    if let Some(n) = common.vh_n {
        if n == 0 {
            return Err("--vh-n must be positive".into());
        }
        cfg.run.vh_n = n;
        if cfg.run.n_list.last().is_some_and(|m| *m < n) || cfg.run.n_list.len() == 1 {
            cfg.run.n_list = vec![n];
        }
    }
    Ok(cfg)
}

/// Writes every artifact to a temporary file first; renames only after all writes
/// succeeded, so a failure leaves no partial outputs.
fn write_all(dir: &Path, stem: &str, artifacts: &[Artifact]) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut staged = Vec::with_capacity(artifacts.len());
    for a in artifacts {
        let target = dir.join(format!("{stem}.{}", a.suffix));
        let tmp = dir.join(format!(".{stem}.{}.tmp{}", a.suffix, std::process::id()));
        let res = std::fs::File::create(&tmp).and_then(|mut f| {
            f.write_all(&a.bytes)?;
            f.sync_all()
        });
        if let Err(e) = res {
            let _ = std::fs::remove_file(&tmp);
            for (t, _) in &staged {
                let _ = std::fs::remove_file(t);
            }
            return Err(e);
        }
        staged.push((tmp, target));
    }
    let mut out = Vec::with_capacity(staged.len());
    for (tmp, target) in staged {
        std::fs::rename(&tmp, &target)?;
        out.push(target);
    }
    Ok(out)
}
