//! Command line for the cut-and-project toolkit.
//!
//! One JSON config file drives each run; outputs are CSV/JSON files under
//! `--out` plus a manifest recording the config hash, tolerances and
//! versions. Outputs are byte-identical across reruns and thread counts.
//!
//! Exit codes: 0 success, 1 property failure, 2 config error,
//! 3 insufficient data.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use config::{CandidateCfg, PatchSource, RunConfig};
use quasicomb::combs::{almost_periods, AlmostPeriodOptions, NormKind};
use quasicomb::completion::reconstruct;
use quasicomb::diffraction::{
    density_bounds, diffraction_table, dual_frequency_candidates, visible_points, BoxSequence,
    FrequencyCandidate,
};
use quasicomb::epsdual::eps_dual;
use quasicomb::geom::{BoxRegion, PointPatch};
use quasicomb::io;
use quasicomb::pointset::{meyer_test, PatchConfig, Verdict};
use quasicomb::scheme::{model_set_par, weighted_comb, WeightedComb};
use quasicomb::{Error, Real};

#[derive(Parser)]
#[command(name = "quasicomb", version, about = "cut-and-project point sets, Meyer checks and diffraction at desk scale")]
struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads (0 = library default).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for sampled translations.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override for the uniform-density tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a model set or weighted comb as CSV.
    Generate,
    /// Run the Meyer battery on a patch and emit the report as JSON.
    VerifyMeyer,
    /// Compute the eps-almost periods of a comb.
    AlmostPeriods,
    /// Rebuild the almost-period family of a comb and verify the axioms.
    Reconstruct,
    /// Compute the eps-dual character set of a patch.
    EpsDual,
    /// Compute Fourier-Bohr coefficients over candidate frequencies.
    Diffract,
    /// Estimate lower/upper densities over sampled translations.
    Density,
    /// Sieve the visible points of the square lattice.
    VisiblePoints,
}

#[derive(Serialize)]
struct Manifest {
    command: String,
    version: String,
    config_sha256: String,
    seed: u64,
    threads: usize,
    calibration: Option<f64>,
    tolerances: config::Tolerances,
    outputs: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err.downcast_ref::<Error>() {
                Some(Error::InsufficientData(_)) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Box<dyn std::error::Error + Send + Sync>> {
    let (mut cfg, raw) = match &cli.config {
        Some(path) => {
            let raw = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
            let cfg: RunConfig = serde_json::from_str(&raw)
                .map_err(|e| format!("config parse error at line {}: {e}", e.line()))?;
            (cfg, raw)
        }
        None => (RunConfig::default(), String::from("{}")),
    };
    if let Some(t) = cli.threads {
        cfg.threads = t;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(t) = cli.tol {
        cfg.tolerances.density_tol = t;
    }
    std::fs::create_dir_all(&cli.out)?;

    let body = || dispatch(&cli.command, &cfg, &cli.out, &raw);
    let code = if cfg.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| format!("thread pool: {e}"))?
            .install(body)?
    } else {
        body()?
    };
    Ok(code)
}

fn dispatch(
    cmd: &Command,
    cfg: &RunConfig,
    out: &Path,
    raw: &str,
) -> Result<ExitCode, Box<dyn std::error::Error + Send + Sync>> {
    let name = match cmd {
        Command::Generate => "generate",
        Command::VerifyMeyer => "verify-meyer",
        Command::AlmostPeriods => "almost-periods",
        Command::Reconstruct => "reconstruct",
        Command::EpsDual => "eps-dual",
        Command::Diffract => "diffract",
        Command::Density => "density",
        Command::VisiblePoints => "visible-points",
    };
    let mut outputs: Vec<String> = Vec::new();
    let mut calibration = None;
    let code = match cmd {
        Command::Generate => cmd_generate(cfg, out, &mut outputs, &mut calibration)?,
        Command::VerifyMeyer => cmd_verify_meyer(cfg, out, &mut outputs)?,
        Command::AlmostPeriods => cmd_almost_periods(cfg, out, &mut outputs)?,
        Command::Reconstruct => cmd_reconstruct(cfg, out, &mut outputs)?,
        Command::EpsDual => cmd_eps_dual(cfg, out, &mut outputs)?,
        Command::Diffract => cmd_diffract(cfg, out, &mut outputs, &mut calibration)?,
        Command::Density => cmd_density(cfg, out, &mut outputs, &mut calibration)?,
        Command::VisiblePoints => cmd_visible_points(cfg, out, &mut outputs)?,
    };
    let manifest = Manifest {
        command: name.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config_sha256: hex::encode(Sha256::digest(raw.as_bytes())),
        seed: cfg.seed,
        threads: cfg.threads,
        calibration,
        tolerances: cfg.tolerances.clone(),
        outputs: outputs.clone(),
    };
    write_text(out, "manifest.json", &to_pretty_json(&manifest)?, &mut Vec::new())?;
    Ok(code)
}

fn to_pretty_json<T: Serialize>(v: &T) -> Result<String, serde_json::Error> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn write_text(
    out: &Path,
    file: &str,
    content: &str,
    outputs: &mut Vec<String>,
) -> std::io::Result<()> {
    std::fs::write(out.join(file), content)?;
    outputs.push(file.to_string());
    Ok(())
}

/// Patch for the verification-style commands, from the configured source.
fn build_patch(cfg: &RunConfig) -> Result<PointPatch<f64>, Error> {
    let region = cfg.require_region()?;
    match &cfg.patch_source {
        PatchSource::Scheme => {
            let scheme = cfg.require_scheme()?;
            let window = cfg.require_window()?;
            model_set_par(&scheme, &window, &region, chunks(cfg))
        }
        PatchSource::Accumulating { n_max } => {
            let mut xs = Vec::new();
            for n in 1..=*n_max {
                for k in 0..n {
                    let x = n as f64 + k as f64 / (n as f64 + 1.0);
                    if region.contains(&[x]) {
                        xs.push(x);
                    }
                }
            }
            PointPatch::from_scalars(xs, region)
        }
        PatchSource::Integers => {
            let lo = region.lo[0].ceil() as i64;
            let hi = region.hi[0].floor() as i64;
            PointPatch::from_scalars((lo..=hi).map(|k| k as f64).collect(), region)
        }
        PatchSource::Crystal { step, offsets } => {
            let lo = region.lo[0] as i64;
            let hi = region.hi[0] as i64;
            let mut xs = Vec::new();
            for j in (lo / step - 2)..=(hi / step + 2) {
                for &o in offsets {
                    let x = (step * j + o) as f64;
                    if region.contains(&[x]) {
                        xs.push(x);
                    }
                }
            }
            xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            xs.dedup();
            PointPatch::from_scalars(xs, region)
        }
    }
}

fn build_comb(cfg: &RunConfig) -> Result<WeightedComb<f64>, Error> {
    let scheme = cfg.require_scheme()?;
    let region = cfg.require_region()?;
    match &cfg.function {
        Some(g) => weighted_comb(&scheme, g, &region, cfg.tolerances.zero_tol),
        None => {
            let window = cfg.require_window()?;
            let patch = model_set_par(&scheme, &window, &region, chunks(cfg))?;
            Ok(WeightedComb::indicator(&patch))
        }
    }
}

fn chunks(cfg: &RunConfig) -> usize {
    if cfg.threads > 1 {
        cfg.threads
    } else {
        1
    }
}

fn cmd_generate(
    cfg: &RunConfig,
    out: &Path,
    outputs: &mut Vec<String>,
    calibration: &mut Option<f64>,
) -> Result<ExitCode, Box<dyn std::error::Error + Send + Sync>> {
    let scheme = cfg.require_scheme()?;
    *calibration = Some(scheme.calibration);
    let region = cfg.require_region()?;
    match &cfg.function {
        Some(g) => {
            let comb = weighted_comb(&scheme, g, &region, cfg.tolerances.zero_tol)?;
            if comb.is_empty() {
                eprintln!("warning: generated comb is empty");
            }
            write_text(out, "comb.csv", &io::comb_to_csv(&comb), outputs)?;
        }
        None => {
            let window = cfg.require_window()?;
            let patch = model_set_par(&scheme, &window, &region, chunks(cfg))?;
            if patch.is_empty() {
                eprintln!("warning: generated point set is empty");
            }
            write_text(out, "points.csv", &io::patch_to_csv(&patch), outputs)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify_meyer(
    cfg: &RunConfig,
    out: &Path,
    outputs: &mut Vec<String>,
) -> Result<ExitCode, Box<dyn std::error::Error + Send + Sync>> {
    let patch = build_patch(cfg)?;
    let k_box = match &cfg.k_box {
        Some(r) => r.build()?,
        None => BoxRegion::centered_cube(patch.dim(), 5.0),
    };
    let pc = PatchConfig {
        gap_threshold: cfg.tolerances.gap_threshold,
        ..Default::default()
    };
    let report = meyer_test(&patch, &k_box, &pc)?;
    write_text(out, "meyer_report.json", &to_pretty_json(&report)?, outputs)?;
    println!("verdict                        {:?}", report.verdict);
    println!("uniformly discrete             {} (min gap {:.6})", report.uniformly_discrete, report.min_gap.as_f64());
    println!("relatively dense               {} (covering radius {:.6})", report.relatively_dense, report.covering_radius.as_f64());
    println!("finite local complexity        {} ({} clusters)", report.flc, report.cluster_count);
    println!("triple difference locally finite {}", report.triple_diff_locally_finite);
    if let Some(f) = &report.almost_lattice_witness {
        println!("almost-lattice witness |F|     {}", f.len());
    }
    if let Some(clause) = &report.failing_clause {
        println!("failing clause                 {clause:?}");
    }
    Ok(match report.verdict {
        Verdict::Pass => ExitCode::SUCCESS,
        Verdict::Fail => ExitCode::from(1),
        Verdict::IndeterminateAtBoundary => ExitCode::from(3),
    })
}

fn cmd_almost_periods(
    cfg: &RunConfig,
    out: &Path,
    outputs: &mut Vec<String>,
) -> Result<ExitCode, Box<dyn std::error::Error + Send + Sync>> {
    let comb = build_comb(cfg)?;
    let eps = cfg.require_eps()?;
    let search = cfg.search_region_or(&comb.region)?;
    let kind = match cfg.norm_kind.as_str() {
        "sup" => NormKind::Sup,
        "k_norm" => {
            let k = cfg
                .norm_box
                .as_ref()
                .ok_or_else(|| Error::Argument("k_norm needs `norm_box`".into()))?
                .build()?;
            NormKind::KNorm { k, grid_pitch: cfg.pitch }
        }
        other => return Err(Error::Argument(format!("unknown norm kind `{other}`")).into()),
    };
    let set = almost_periods(&comb, eps, kind, &search, &AlmostPeriodOptions::default())?;
    if set.trivial_warning {
        eprintln!("warning: eps at or above twice the sup norm; every shift qualifies");
    }
    write_text(out, "almost_periods.csv", &io::almost_periods_to_csv(&set), outputs)?;
    write_text(out, "almost_periods.json", &to_pretty_json(&set)?, outputs)?;
    println!("{} almost periods at eps {eps}", set.periods.len());
    Ok(ExitCode::SUCCESS)
}

fn cmd_reconstruct(
    cfg: &RunConfig,
    out: &Path,
    outputs: &mut Vec<String>,
) -> Result<ExitCode, Box<dyn std::error::Error + Send + Sync>> {
    let comb = build_comb(cfg)?;
    if cfg.eps_grid.is_empty() {
        return Err(Error::Argument("config field `eps_grid` is required".into()).into());
    }
    let search = cfg.search_region_or(&comb.region)?;
    let reference = cfg.require_scheme().ok();
    let (family, report) = reconstruct(&comb, &cfg.eps_grid, &search, reference.as_ref())?;
    for (eps, patch) in family.eps_grid.iter().zip(&family.patches) {
        let file = format!("periods_eps_{}.csv", io::fmt_float(*eps).replace(['.', 'e'], "_"));
        write_text(out, &file, &io::patch_to_csv(patch), outputs)?;
    }
    write_text(out, "reconstruction.json", &to_pretty_json(&report)?, outputs)?;
    let pass = report.axioms.all_pass();
    println!(
        "axioms: A1={} A2={} A3={} A4={} A5={} monotone={}",
        report.axioms.a1_pass,
        report.axioms.a2_pass,
        report.axioms.a3_pass,
        report.axioms.a4_pass,
        report.axioms.a5_pass,
        report.axioms.monotone_pass
    );
    Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_eps_dual(
    cfg: &RunConfig,
    out: &Path,
    outputs: &mut Vec<String>,
) -> Result<ExitCode, Box<dyn std::error::Error + Send + Sync>> {
    let patch = build_patch(cfg)?;
    let eps = cfg.require_eps()?;
    let freq = cfg.require_freq_region()?;
    let set = eps_dual(&patch, eps, &freq, cfg.pitch, cfg.refine)?;
    if set.trivial_warning {
        eprintln!("warning: eps >= 2, every character qualifies");
    }
    write_text(out, "eps_dual.csv", &io::character_set_to_csv(&set, &patch), outputs)?;
    println!("{} qualifying frequencies at eps {eps}", set.frequencies.len());
    Ok(ExitCode::SUCCESS)
}

fn cmd_diffract(
    cfg: &RunConfig,
    out: &Path,
    outputs: &mut Vec<String>,
    calibration: &mut Option<f64>,
) -> Result<ExitCode, Box<dyn std::error::Error + Send + Sync>> {
    let scheme = cfg.require_scheme()?;
    *calibration = Some(scheme.calibration);
    let comb = build_comb(cfg)?;
    let freq = cfg.require_freq_region()?;
    let cand_cfg = CandidateCfg::default();
    let mut candidates: Vec<FrequencyCandidate<f64>> = Vec::new();
    if cand_cfg.dual {
        match dual_frequency_candidates(&scheme, &freq, cand_cfg.internal_cutoff) {
            Ok(mut c) => candidates.append(&mut c),
            Err(Error::UnsupportedScheme(_)) => {
                // finite internal groups: integer frequencies are the peaks
                let lo = freq.lo[0].ceil() as i64;
                let hi = freq.hi[0].floor() as i64;
                for k in lo..=hi {
                    candidates.push(FrequencyCandidate { kappa: vec![k as f64], kappa_star: None });
                }
            }
            Err(e) => return Err(e.into()),
        }
    }
    for extra in &cand_cfg.extra {
        candidates.push(FrequencyCandidate { kappa: extra.clone(), kappa_star: None });
    }
    let predictor = cfg.function.as_ref().map(|g| (&scheme, g));
    let table = diffraction_table(
        &comb,
        &candidates,
        &comb.region.clone(),
        predictor.map(|(s, g)| (s as _, g)),
        "cli",
    )?;
    write_text(out, "diffraction.csv", &io::diffraction_to_csv(&table), outputs)?;
    write_text(out, "diffraction.dat", &io::diffraction_to_plot(&table), outputs)?;
    println!("{} frequencies evaluated", table.rows.len());
    Ok(ExitCode::SUCCESS)
}

fn cmd_density(
    cfg: &RunConfig,
    out: &Path,
    outputs: &mut Vec<String>,
    calibration: &mut Option<f64>,
) -> Result<ExitCode, Box<dyn std::error::Error + Send + Sync>> {
    let patch = build_patch(cfg)?;
    let seq = BoxSequence::centered_cubes(patch.dim(), cfg.box_base, cfg.box_count)?;
    let window_data = match (&cfg.scheme, &cfg.window) {
        (Some(s), Some(w)) => {
            let scheme = s.build()?;
            *calibration = Some(scheme.calibration);
            Some((scheme, w.clone()))
        }
        _ => None,
    };
    let report = density_bounds(
        &patch,
        &seq,
        cfg.translations,
        cfg.seed,
        cfg.tolerances.density_tol,
        window_data.as_ref().map(|(s, w)| (&s.internal, w, s.calibration)),
    )?;
    write_text(out, "density.json", &to_pretty_json(&report)?, outputs)?;
    println!(
        "density in [{:.6}, {:.6}], uniform = {}",
        report.lower, report.upper, report.uniform
    );
    let ok = match report.window_sandwich {
        Some((_, _, sandwich_ok)) => sandwich_ok,
        None => true,
    };
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_visible_points(
    cfg: &RunConfig,
    out: &Path,
    outputs: &mut Vec<String>,
) -> Result<ExitCode, Box<dyn std::error::Error + Send + Sync>> {
    let report = visible_points(cfg.visible_n, cfg.scan_bound)?;
    write_text(out, "visible_points.json", &to_pretty_json(&report)?, outputs)?;
    if cfg.visible_n <= cfg.visible_csv_limit {
        let n = cfg.visible_n;
        let gcd = |mut a: i64, mut b: i64| {
            while b != 0 {
                let t = a % b;
                a = b;
                b = t;
            }
            a.abs()
        };
        let mut vis = String::from("x0,x1\n");
        let mut invis = String::from("x0,x1\n");
        for a in -n..=n {
            for b in -n..=n {
                if a == 0 && b == 0 {
                    continue;
                }
                let row = format!("{a},{b}\n");
                if gcd(a, b) == 1 {
                    vis.push_str(&row);
                } else {
                    invis.push_str(&row);
                }
            }
        }
        write_text(out, "visible.csv", &vis, outputs)?;
        write_text(out, "invisible.csv", &invis, outputs)?;
    }
    println!(
        "visible density {:.6}; 2x2 invisible block: {:?}",
        report.visible_density, report.block2
    );
    Ok(ExitCode::SUCCESS)
}
