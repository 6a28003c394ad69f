//! `percor render | bench | claims`.
//!
//! Exit codes: 0 success, 1 usage, 2 input/output, 3 a fatal claim failed.
//! Environment: `PERCOR_THREADS` (claims workers, default: available
//! cores) and `PERCOR_SEED` (scene seed, default 42).

pub mod config;
pub mod render;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::analysis::claims::{CRITERIA, ClaimsConfig, Fault, claims_suite_with, criterion_status};
use crate::analysis::compare::{Method, compare_uv_method, within_contract};
use crate::analysis::report::{ClaimRow, write_csv};
use crate::analysis::scenes::tilted_quad_scene;
use crate::error::{Error, Result};
use config::SceneConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_CLAIMS: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "percor", version, about = "Perspective-correct texturing lab")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Render a scene file to a PPM image.
    Render {
        config: PathBuf,
        /// overrides the scene's method
        #[arg(long)]
        method: Option<Method>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Texture-coordinate error and operation counts per method.
    Bench {
        /// scene file; the built-in tilted quad when omitted
        config: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        methods: Vec<Method>,
        /// CSV destination, stdout when omitted
        #[arg(long)]
        csv: Option<PathBuf>,
        /// write `<scene>_<method>_diff.ppm` against exact division here
        #[arg(long)]
        diff_images: Option<PathBuf>,
    },
    /// Run the numeric claims; exit 3 when a fatal row fails.
    Claims {
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Usage(_) => EXIT_USAGE,
        _ => EXIT_IO,
    }
}

fn env_number<T: std::str::FromStr>(name: &str) -> Result<Option<T>> {
    match std::env::var(name) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::Usage(format!("{name}={v} is not a valid number"))),
        Err(_) => Ok(None),
    }
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let out = match cli.cmd {
        Command::Render { config, method, out } => cmd_render(&config, method, &out).map(|_| EXIT_OK),
        Command::Bench {
            config,
            methods,
            csv,
            diff_images,
        } => cmd_bench(config.as_deref(), &methods, csv.as_deref(), diff_images.as_deref()).map(|_| EXIT_OK),
        Command::Claims { csv, inject_fault } => cmd_claims(csv.as_deref(), inject_fault),
    };
    match out {
        Ok(code) => code,
        Err(e) => {
            eprintln!("percor: {e}");
            exit_code(&e)
        }
    }
}

pub fn cmd_render(config: &Path, method: Option<Method>, out: &Path) -> Result<()> {
    let cfg = SceneConfig::load(config)?;
    let scene = render::build_scene(&cfg, &render::scene_id(config))?;
    let tex = render::load_texture(&cfg)?;
    let img = render::render(&cfg, &scene, &tex, method.unwrap_or(cfg.method))?;
    img.write_ppm(out)
}

pub fn cmd_bench(config: Option<&Path>, methods: &[Method], csv: Option<&Path>, diff_dir: Option<&Path>) -> Result<()> {
    let (cfg, scene) = match config {
        Some(p) => {
            let cfg = SceneConfig::load(p)?;
            let scene = render::build_scene(&cfg, &render::scene_id(p))?;
            (cfg, scene)
        }
        None => {
            let scene = tilted_quad_scene();
            let cfg = SceneConfig {
                width: scene.width,
                height: scene.height,
                ..SceneConfig::default()
            };
            (cfg, scene)
        }
    };
    let methods = if methods.is_empty() { &Method::ALL[..] } else { methods };
    let params = cfg.method_params();
    let mut rows = Vec::new();
    for &m in methods {
        let r = compare_uv_method(&scene, m, &params)?;
        rows.push(r.summary_row(within_contract(m, &r, params.du)));
    }
    emit_csv(&rows, csv)?;
    if let Some(dir) = diff_dir {
        std::fs::create_dir_all(dir)?;
        let tex = render::load_texture(&cfg)?;
        let exact = render::render(&cfg, &scene, &tex, Method::Exact)?;
        for &m in methods {
            let img = render::render(&cfg, &scene, &tex, m)?;
            render::diff_image(&img, &exact).write_ppm(&dir.join(format!("{}_{}_diff.ppm", scene.id, m)))?;
        }
    }
    Ok(())
}

fn emit_csv(rows: &[ClaimRow], csv: Option<&Path>) -> Result<()> {
    match csv {
        Some(p) => {
            let f = std::fs::File::create(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
            write_csv(rows, std::io::BufWriter::new(f))
        }
        None => write_csv(rows, std::io::stdout().lock()),
    }
}

pub fn cmd_claims(csv: Option<&Path>, inject_fault: bool) -> Result<i32> {
    let threads = match env_number::<usize>("PERCOR_THREADS")? {
        Some(0) => return Err(Error::Usage("PERCOR_THREADS must be at least 1".into())),
        Some(n) => n,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let cfg = ClaimsConfig {
        seed: env_number("PERCOR_SEED")?.unwrap_or(42),
        threads,
        fault: inject_fault.then_some(Fault::MidpointCoefficient),
    };
    let rows = claims_suite_with(&cfg);
    if let Some(p) = csv {
        emit_csv(&rows, Some(p))?;
    }
    let status = criterion_status(&rows);
    let mut so = std::io::stdout().lock();
    for (&(n, name), &(_, ok)) in CRITERIA.iter().zip(&status) {
        writeln!(so, "{} {n:>2} {name}", if ok { "PASS" } else { "FAIL" })?;
        for r in rows.iter().filter(|r| r.criterion == n && r.failed_fatally()) {
            writeln!(
                so,
                "       {} {} {}: measured {} bound {}",
                r.method, r.scene, r.claim, r.measured, r.paper_bound
            )?;
        }
    }
    let failed = status.iter().filter(|s| !s.1).count();
    writeln!(so, "{} of {} criteria pass", status.len() - failed, status.len())?;
    Ok(if failed == 0 { EXIT_OK } else { EXIT_CLAIMS })
}
