//! Command-line front end: orbit simulation, support estimation, regime
//! certification, and the threshold table.
//!
//! Exit codes: `0` success / certified, `1` a verification check failed,
//! `2` usage or configuration error, `3` indeterminate (the weight sits
//! within tolerance of a decision boundary, or outside every certified
//! range).
//!
//! Every subcommand accepts `--json` for a machine-readable report on
//! stdout, and writes its file outputs into `--out` (default: the
//! `TENTMEM_OUT_DIR` environment variable, falling back to the current
//! directory).  Identical configuration and seed produce byte-identical
//! outputs.

use clap::{Args, Parser, Subcommand};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use tentmem::map::{Alpha, MemoryMap, Point2, RegionLabel};
use tentmem::measure::{
    run_histogram, support_floor_violations, DEFAULT_GRID, DEFAULT_ITERATIONS, DEFAULT_SKIP,
};
use tentmem::regimes::{
    case_boundaries, global_attractor_report, invariant_region_checks, period2_report,
    period3_report, RegimeReport,
};
use tentmem::sequences::{acim_certificate, Verdict};
use tentmem::thresholds::{render_table, threshold_table};
use tentmem::Error;

/// Environment variable naming the default output directory.
const OUT_DIR_ENV: &str = "TENTMEM_OUT_DIR";

const EXIT_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INDETERMINATE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "tentmem",
    version,
    about = "Simulation and expansion certificates for the tent map with memory",
    long_about = "Tools for the two-step memory recursion built on the symmetric tent map:\n\
                  orbit simulation, invariant-support estimation, regime certification\n\
                  (expansion certificates below weight 1/2, exact periodicity at 1/2 and\n\
                  3/4, trapping-region attraction in between), and the table of named\n\
                  switching thresholds."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Iterate the map from a start point and write the orbit as CSV.
    Simulate(SimulateArgs),
    /// Estimate the invariant support as an occupancy grid; write the
    /// grayscale image, the sparse CSV, and a metadata sidecar.
    Support(SupportArgs),
    /// Certify the dynamics at a weight: expansion certificate below 1/2,
    /// exact periodicity at 1/2 and 3/4, global attractor in between.
    Certify(CertifyArgs),
    /// Print every named threshold with its computed and reference values.
    Thresholds(ThresholdsArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Memory weight in [0, 1).
    #[arg(long)]
    alpha: f64,
    /// Start x (with --y0; omit both for a seed-derived start).
    #[arg(long, requires = "y0")]
    x0: Option<f64>,
    /// Start y (with --x0; omit both for a seed-derived start).
    #[arg(long, requires = "x0")]
    y0: Option<f64>,
    /// Number of recorded steps.
    #[arg(long, default_value_t = 1000)]
    n: u64,
    /// Warm-up steps discarded before recording.
    #[arg(long, default_value_t = 0)]
    skip: u64,
    /// Seed for the start point when --x0/--y0 are omitted.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory (default: $TENTMEM_OUT_DIR, then the current dir).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit a machine-readable JSON summary on stdout.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SupportArgs {
    /// Memory weight in [0, 1).
    #[arg(long)]
    alpha: f64,
    /// Start x (with --y0; omit both for a seed-derived start).
    #[arg(long, requires = "y0")]
    x0: Option<f64>,
    /// Start y (with --x0; omit both for a seed-derived start).
    #[arg(long, requires = "x0")]
    y0: Option<f64>,
    /// Recorded iterations.
    #[arg(long, default_value_t = DEFAULT_ITERATIONS)]
    n: u64,
    /// Warm-up steps discarded before recording.
    #[arg(long, default_value_t = DEFAULT_SKIP)]
    skip: u64,
    /// Cells per side of the occupancy grid.
    #[arg(long, default_value_t = DEFAULT_GRID)]
    grid: usize,
    /// Seed for the start point when --x0/--y0 are omitted.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write a binary portable graymap (support.pgm).
    #[arg(long)]
    pgm: bool,
    /// Output directory (default: $TENTMEM_OUT_DIR, then the current dir).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit a machine-readable JSON summary on stdout.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CertifyArgs {
    /// Memory weight in (0, 1).
    #[arg(long)]
    alpha: f64,
    /// Random starts sampled by the regime suites.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Seed for sampled starts.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Width of the indeterminate band around decision boundaries.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Directory to write certificate.json into (default: none written
    /// unless --out or $TENTMEM_OUT_DIR names a directory... the file is
    /// always written to the resolved output directory).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit the full JSON certificate on stdout.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ThresholdsArgs {
    /// Also write thresholds.txt / thresholds.json to the output directory.
    #[arg(long)]
    write: bool,
    /// Output directory (default: $TENTMEM_OUT_DIR, then the current dir).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit the rows as JSON on stdout.
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Support(args) => cmd_support(args),
        Command::Certify(args) => cmd_certify(args),
        Command::Thresholds(args) => cmd_thresholds(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Domain(_) | Error::InvalidIndex(_) => EXIT_USAGE,
                Error::Indeterminate { .. } => EXIT_INDETERMINATE,
                _ => EXIT_FAILED,
            })
        }
    }
}

/// Resolve the output directory: flag, then environment, then ".".
fn out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn ensure_dir(dir: &Path) -> Result<(), Error> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Error::Domain(format!("cannot create output directory {dir:?}: {e}")))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Error> {
    std::fs::write(path, bytes).map_err(|e| Error::Domain(format!("cannot write {path:?}: {e}")))
}

fn parse_alpha(a: f64) -> Result<Alpha, Error> {
    Alpha::new(a).map_err(|e| Error::Domain(format!("--alpha {a}: {e}")))
}

/// Start point: explicit flags, or a seed-derived typical point.
fn start_point(x0: Option<f64>, y0: Option<f64>, seed: u64) -> Result<Point2, Error> {
    match (x0, y0) {
        (Some(x), Some(y)) => {
            Point2::new(x, y).map_err(|e| Error::Domain(format!("start ({x}, {y}): {e}")))
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Point2::new(rng.gen(), rng.gen())
        }
    }
}

fn cmd_simulate(args: SimulateArgs) -> Result<u8, Error> {
    let alpha = parse_alpha(args.alpha)?;
    if args.n == 0 {
        return Err(Error::Domain("--n must be at least 1".into()));
    }
    let p0 = start_point(args.x0, args.y0, args.seed)?;
    let mm = MemoryMap::tent(alpha);
    let states = mm.orbit(p0, args.n as usize, args.skip as usize)?;

    let mut csv = String::from("step,x,y,region,s\n");
    let mut first_upper: Option<u64> = None;
    let mut first_a2: Option<u64> = None;
    let mut record = |step: u64, p: Point2, csv: &mut String| {
        let region = match mm.classify(p) {
            RegionLabel::A1 => 1,
            RegionLabel::A2 => 2,
        };
        if first_upper.is_none() && p.x + p.y >= 1.0 {
            first_upper = Some(step);
        }
        if first_a2.is_none() && region == 2 {
            first_a2 = Some(step);
        }
        csv.push_str(&format!("{step},{},{},{region},{}\n", p.x, p.y, mm.s(p)));
    };
    if args.skip == 0 {
        record(0, p0, &mut csv);
    }
    for (i, &p) in states.iter().enumerate() {
        record(args.skip + 1 + i as u64, p, &mut csv);
    }
    let last = *states.last().expect("n >= 1");
    let fp_dist = last.dist(Point2::new(2.0 / 3.0, 2.0 / 3.0)?);

    let dir = out_dir(args.out);
    ensure_dir(&dir)?;
    let orbit_path = dir.join("orbit.csv");
    write_file(&orbit_path, csv.as_bytes())?;

    if args.json {
        let summary = json!({
            "command": "simulate",
            "alpha": args.alpha,
            "start": [p0.x, p0.y],
            "n": args.n,
            "skip": args.skip,
            "seed": args.seed,
            "first_upper_entry": first_upper,
            "first_a2_entry": first_a2,
            "final_state": [last.x, last.y],
            "fixed_point_distance": fp_dist,
            "orbit_file": orbit_path,
        });
        println!("{}", serde_json::to_string_pretty(&summary)?);
    } else {
        println!("orbit of weight {} from ({}, {})", args.alpha, p0.x, p0.y);
        println!("  recorded steps   : {} (skipped {})", args.n, args.skip);
        match first_a2 {
            Some(k) => println!("  upper-region entry  : step {k}"),
            None => println!("  upper-region entry  : never"),
        }
        match first_upper {
            Some(k) => println!("  diagonal-triangle entry: step {k}"),
            None => println!("  diagonal-triangle entry: never"),
        }
        println!("  final state      : ({}, {})", last.x, last.y);
        println!("  distance to (2/3, 2/3): {fp_dist}");
        println!("  wrote {}", orbit_path.display());
    }
    Ok(0)
}

fn cmd_support(args: SupportArgs) -> Result<u8, Error> {
    let alpha = parse_alpha(args.alpha)?;
    if args.grid < 2 {
        return Err(Error::Domain(format!(
            "--grid must be at least 2, got {}",
            args.grid
        )));
    }
    if args.n == 0 {
        return Err(Error::Domain("--n must be at least 1".into()));
    }
    let p0 = start_point(args.x0, args.y0, args.seed)?;
    let h = run_histogram(alpha, p0, args.n, args.skip, args.grid, args.seed)?;

    let dir = out_dir(args.out);
    ensure_dir(&dir)?;
    let image_path = dir.join("support.img");
    let csv_path = dir.join("support.csv");
    let meta_path = dir.join("support.json");
    write_file(&image_path, &h.support_image_bytes())?;
    write_file(&csv_path, h.to_csv().as_bytes())?;
    write_file(
        &meta_path,
        format!("{}\n", serde_json::to_string_pretty(&h.metadata_json())?).as_bytes(),
    )?;
    let pgm_path = if args.pgm {
        let p = dir.join("support.pgm");
        write_file(&p, &h.to_pgm())?;
        Some(p)
    } else {
        None
    };

    // The occupied region stays above the blend floor for weights below 1/2.
    let floor = (args.alpha < 0.5).then(|| {
        let (violations, level) = support_floor_violations(&h);
        (violations, level)
    });

    if args.json {
        let summary = json!({
            "command": "support",
            "metadata": h.metadata_json(),
            "occupied_cells": h.occupied_count(),
            "floor_level": floor.map(|(_, level)| level),
            "floor_violations": floor.map(|(v, _)| v),
            "files": {
                "image": image_path,
                "csv": csv_path,
                "metadata": meta_path,
                "pgm": pgm_path,
            },
        });
        println!("{}", serde_json::to_string_pretty(&summary)?);
    } else {
        println!(
            "support of weight {} on a {}x{} grid ({} iterations, skip {})",
            args.alpha, args.grid, args.grid, args.n, args.skip
        );
        println!("  occupied cells: {}", h.occupied_count());
        if let Some((violations, level)) = floor {
            println!("  blend floor {level}: {violations} occupied cells below it");
        }
        println!("  wrote {}", image_path.display());
        println!("  wrote {}", csv_path.display());
        println!("  wrote {}", meta_path.display());
        if let Some(p) = &pgm_path {
            println!("  wrote {}", p.display());
        }
    }
    match floor {
        Some((violations, _)) if violations > 0 => Ok(EXIT_FAILED),
        _ => Ok(0),
    }
}

/// What certify decided to run and how it went.
struct CertifyOutcome {
    mode: &'static str,
    certified: Option<bool>,
    reason: Option<String>,
    certificate: Option<tentmem::sequences::ExistenceCertificate>,
    regime: Option<RegimeReport>,
    bands: Option<RegimeReport>,
}

fn certify_dispatch(args: &CertifyArgs) -> Result<CertifyOutcome, Error> {
    let a = args.alpha;
    let alpha = parse_alpha(a)?;
    if a <= 0.0 {
        return Err(Error::Domain(
            "certification needs a strictly positive weight".into(),
        ));
    }
    let indeterminate = |reason: String| {
        Ok(CertifyOutcome {
            mode: "indeterminate",
            certified: None,
            reason: Some(reason),
            certificate: None,
            regime: None,
            bands: None,
        })
    };

    if a == 0.5 {
        let regime = period3_report(args.samples, args.seed)?;
        return Ok(CertifyOutcome {
            mode: "period-3-triangle",
            certified: Some(regime.failures.is_empty()),
            reason: None,
            certificate: None,
            regime: Some(regime),
            bands: None,
        });
    }
    if a == 0.75 {
        let regime = period2_report(args.samples, args.seed)?;
        return Ok(CertifyOutcome {
            mode: "period-2-line",
            certified: Some(regime.failures.is_empty()),
            reason: None,
            certificate: None,
            regime: Some(regime),
            bands: None,
        });
    }
    for boundary in [0.5, 0.75] {
        if (a - boundary).abs() <= args.tol {
            return indeterminate(format!(
                "weight {a} sits within {} of the exact-regime weight {boundary}; \
                 certification is indeterminate there",
                args.tol
            ));
        }
    }
    if a > 0.75 {
        return indeterminate(format!(
            "no certificate covers weights above 3/4 (got {a}); orbits can still be simulated"
        ));
    }

    if a < 0.5 {
        let certificate = acim_certificate(alpha)?;
        let bands = invariant_region_checks(alpha)?;
        let certified = certificate.verdict == Verdict::Proven && bands.failures.is_empty();
        if certificate.verdict == Verdict::Indeterminate {
            return indeterminate(
                certificate
                    .reason
                    .clone()
                    .unwrap_or_else(|| "certificate came back indeterminate".to_string()),
            );
        }
        return Ok(CertifyOutcome {
            mode: "acim-certificate",
            certified: Some(certified),
            reason: None,
            certificate: Some(certificate),
            regime: None,
            bands: Some(bands),
        });
    }

    // 1/2 < a < 3/4: the trapping construction switches shape at interior
    // boundaries; exactly on (or within tolerance of) one, the choice of
    // construction is ambiguous and the verdict is indeterminate.
    let cb = case_boundaries()?;
    for (name, boundary) in [
        ("octagon end", cb.octagon_end),
        ("five-step end", cb.five_step_end),
        ("window-shape change", cb.quad_window_end),
        ("pentagon end", cb.pentagon_end),
        ("heptagon end", cb.heptagon_end),
    ] {
        if (a - boundary).abs() <= args.tol {
            return indeterminate(format!(
                "weight {a} sits within {} of the trapping-case boundary {boundary} ({name})",
                args.tol
            ));
        }
    }
    let regime = global_attractor_report(alpha, args.samples, args.seed)?;
    let bands = invariant_region_checks(alpha)?;
    let certified = regime.failures.is_empty() && bands.failures.is_empty();
    Ok(CertifyOutcome {
        mode: "global-attractor",
        certified: Some(certified),
        reason: None,
        certificate: None,
        regime: Some(regime),
        bands: Some(bands),
    })
}

fn cmd_certify(args: CertifyArgs) -> Result<u8, Error> {
    let outcome = certify_dispatch(&args)?;
    let payload = json!({
        "command": "certify",
        "alpha": args.alpha,
        "samples": args.samples,
        "seed": args.seed,
        "mode": outcome.mode,
        "certified": outcome.certified,
        "reason": outcome.reason,
        "certificate": outcome.certificate,
        "regime": outcome.regime,
        "bands": outcome.bands,
    });
    let rendered = format!("{}\n", serde_json::to_string_pretty(&payload)?);

    let dir = out_dir(args.out);
    ensure_dir(&dir)?;
    let cert_path = dir.join("certificate.json");
    write_file(&cert_path, rendered.as_bytes())?;

    if args.json {
        print!("{rendered}");
    } else {
        println!("certify weight {}: mode {}", args.alpha, outcome.mode);
        match outcome.certified {
            Some(true) => println!("  certified"),
            Some(false) => println!("  NOT certified"),
            None => println!(
                "  indeterminate: {}",
                outcome.reason.as_deref().unwrap_or("(no reason)")
            ),
        }
        if let Some(cert) = &outcome.certificate {
            println!(
                "  expansion certificate: verdict {:?}, {} blocks, margin {}",
                cert.verdict,
                cert.blocks.len(),
                cert.margin
            );
        }
        for (label, report) in [("regime", &outcome.regime), ("bands", &outcome.bands)] {
            if let Some(r) = report {
                let passed = r.checks.iter().filter(|c| c.pass).count();
                println!(
                    "  {label} checks ({}): {passed}/{} passed{}",
                    r.case,
                    r.checks.len(),
                    if r.failures.is_empty() {
                        String::new()
                    } else {
                        format!("; failing: {}", r.failures.join(", "))
                    }
                );
            }
        }
        println!("  wrote {}", cert_path.display());
    }
    Ok(match outcome.certified {
        Some(true) => 0,
        Some(false) => EXIT_FAILED,
        None => EXIT_INDETERMINATE,
    })
}

fn cmd_thresholds(args: ThresholdsArgs) -> Result<u8, Error> {
    let rows = threshold_table()?;
    let text = render_table(&rows);
    let rows_json = format!(
        "{}\n",
        serde_json::to_string_pretty(&json!({ "command": "thresholds", "rows": rows }))?
    );
    if args.json {
        print!("{rows_json}");
    } else {
        print!("{text}");
    }
    if args.write {
        let dir = out_dir(args.out);
        ensure_dir(&dir)?;
        let txt_path = dir.join("thresholds.txt");
        let json_path = dir.join("thresholds.json");
        write_file(&txt_path, text.as_bytes())?;
        write_file(&json_path, rows_json.as_bytes())?;
        if !args.json {
            println!("wrote {}", txt_path.display());
            println!("wrote {}", json_path.display());
        }
    }
    Ok(0)
}
