//! Command-line front end. Reads a manifold file, runs the requested
//! analysis, prints a JSON report to stdout. Exit status: 0 for success
//! (and a passing verdict where one applies), 1 for a failing verdict,
//! 2 for any error, reported as JSON on stderr.

use clap::{Parser, Subcommand};
use engel_cartan::error::Result;
use engel_cartan::manifest::ManifoldFile;
use engel_cartan::report;
use engel_cartan::Point;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "engel-cartan", version, about = "Curvature analysis of Engel CR manifolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn parse_point(s: &str) -> std::result::Result<Point, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err(format!("expected 4 comma-separated coordinates, got {}", parts.len()));
    }
    let mut p = [0.0f64; 4];
    for (slot, part) in p.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse::<f64>()
            .map_err(|e| format!("bad coordinate {part:?}: {e}"))?;
        if !slot.is_finite() {
            return Err(format!("coordinate {part:?} is not finite"));
        }
    }
    Ok(p)
}

#[derive(Subcommand)]
enum Command {
    /// Essential curvature components at each evaluation point
    Invariants {
        /// Manifold file (TOML, format = 1)
        file: PathBuf,
        /// Fiber value; overrides the file's `t`
        #[arg(long)]
        t: Option<f64>,
        /// Jet order; overrides the file's `order`
        #[arg(long)]
        order: Option<usize>,
        /// Evaluation point "x,y,u1,u2"; repeatable, overrides the file's points
        #[arg(long, value_parser = parse_point)]
        point: Vec<Point>,
        /// Also list every curvature component through this homogeneity
        #[arg(long)]
        table: Option<i32>,
    },
    /// Flatness verdict over the evaluation points; exit 0 iff flat
    Flatness {
        file: PathBuf,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long, value_parser = parse_point)]
        point: Vec<Point>,
        /// Residual below which the structure counts as flat
        #[arg(long, default_value_t = engel_cartan::cartan::FLATNESS_TOL)]
        threshold: f64,
    },
    /// Umbilicity verdict over the evaluation points; exit 0 iff umbilic
    Umbilic {
        file: PathBuf,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long, value_parser = parse_point)]
        point: Vec<Point>,
        /// Residual below which a point counts as umbilic
        #[arg(long, default_value_t = engel_cartan::cartan::FLATNESS_TOL)]
        threshold: f64,
    },
    /// Lie-algebra cohomology dimension table; needs no manifold file
    Cohomology,
    /// Self-consistency residual suite; exit 0 iff every check passes
    Check {
        file: PathBuf,
        #[arg(long)]
        order: Option<usize>,
        /// Deepest curvature homogeneity the pipeline comparison covers
        #[arg(long, default_value_t = 4)]
        max_homogeneity: i32,
    },
}

struct Loaded {
    file: ManifoldFile,
    structure: engel_cartan::EngelStructure,
}

fn load(path: &std::path::Path) -> Result<Loaded> {
    let file = ManifoldFile::load(path)?;
    let structure = file.structure()?;
    Ok(Loaded { file, structure })
}

fn effective_points(file: &ManifoldFile, flags: &[Point]) -> Vec<Point> {
    if flags.is_empty() {
        file.points()
    } else {
        flags.to_vec()
    }
}

fn emit<T: serde::Serialize>(report: &T) {
    use std::io::Write;
    let text = serde_json::to_string_pretty(report).expect("report serialization");
    let mut out = std::io::stdout().lock();
    if let Err(e) = writeln!(out, "{text}").and_then(|()| out.flush()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("{}", serde_json::json!({ "error": format!("cannot write report: {e}") }));
        std::process::exit(2);
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Invariants { file, t, order, point, table } => {
            let loaded = load(&file)?;
            let report = report::invariants_report(
                loaded.file.kind.label(),
                &loaded.structure,
                &effective_points(&loaded.file, &point),
                order.unwrap_or_else(|| loaded.file.order()),
                t.unwrap_or_else(|| loaded.file.t()),
                table,
            )?;
            emit(&report);
            Ok(0)
        }
        Command::Flatness { file, order, point, threshold } => {
            let loaded = load(&file)?;
            let report = report::flatness_report(
                loaded.file.kind.label(),
                &loaded.structure,
                &effective_points(&loaded.file, &point),
                order.unwrap_or_else(|| loaded.file.order()),
                threshold,
            )?;
            emit(&report);
            Ok(i32::from(!report.flat))
        }
        Command::Umbilic { file, order, point, threshold } => {
            let loaded = load(&file)?;
            let report = report::umbilicity_report(
                loaded.file.kind.label(),
                &loaded.structure,
                &effective_points(&loaded.file, &point),
                order.unwrap_or_else(|| loaded.file.order()),
                threshold,
            )?;
            emit(&report);
            Ok(i32::from(!report.umbilic))
        }
        Command::Cohomology => {
            emit(&report::cohomology_json());
            Ok(0)
        }
        Command::Check { file, order, max_homogeneity } => {
            let loaded = load(&file)?;
            let anchor = loaded.file.points()[0];
            let report = report::check_report(
                loaded.file.kind.label(),
                &loaded.structure,
                anchor,
                order.unwrap_or_else(|| loaded.file.order()),
                max_homogeneity,
            )?;
            emit(&report);
            Ok(i32::from(!report.pass))
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            let msg = serde_json::json!({ "error": e.to_string() });
            eprintln!("{}", serde_json::to_string_pretty(&msg).expect("error serialization"));
            2
        }
    };
    std::process::exit(code);
}
