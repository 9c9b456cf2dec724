use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use ubp_covering::{cover, supercritical_witness, verify_droplet_growth, CoverOrder, GrowthError};
use ubp_family::{alpha_report, is_u_block, quasi_stable_set, verify_quasi_stability, AlphaError, DEFAULT_L_MAX};
use ubp_geometry::{classify, stable_set, Arc, Direction, Kind, Site, UpdateFamily};
use ubp_montecarlo::{
    draw, estimate_pc, linear_grid, percolation_probability, tau_scaling, threshold, to_csv, ConfigError,
    ExperimentConfig, PcError,
};

use crate::families::load_family;
use crate::Failure;

#[derive(Parser, Debug)]
#[command(
    name = "ubp",
    version,
    about = "Analyse and simulate two-dimensional U-bootstrap percolation"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Family JSON file, or a bundled name: twonbr, threenbr, onenbr, duarte, east.
    #[arg(long)]
    family: String,
    /// Print canonical JSON (sorted keys) instead of a table.
    #[arg(long)]
    json: bool,
    /// Also write the result to this file: CSV for simulate/pc/tau, JSON otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Window {
    #[arg(long)]
    window_w: Option<usize>,
    #[arg(long)]
    window_h: Option<usize>,
}

#[derive(Args, Debug)]
struct Experiment {
    /// Torus side length.
    #[arg(long, default_value_t = 64)]
    n: usize,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    max_steps: Option<u64>,
}

#[derive(Args, Debug)]
struct Grid {
    #[arg(long, conflicts_with = "p_grid")]
    p: Option<f64>,
    /// Evenly spaced grid `lo:hi:steps`.
    #[arg(long, value_parser = parse_grid)]
    p_grid: Option<PGrid>,
}

#[derive(Clone, Debug)]
struct PGrid(Vec<f64>);

#[derive(Subcommand, Debug)]
enum Command {
    /// Supercritical, critical or subcritical, with a witness semicircle.
    Classify(Common),
    /// Stable directions as closed rational arcs.
    StableSet(Common),
    /// Quasi-stable directions and the consecutive-pair rule check.
    Quasi(Common),
    /// The constants α₁ and α₂.
    Alpha {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = DEFAULT_L_MAX)]
        lmax: usize,
        #[command(flatten)]
        window: Window,
    },
    /// Whether a segment of length `--z-len` along `--u` is a u-block.
    Ublock {
        #[command(flatten)]
        common: Common,
        /// Direction as `x,y`.
        #[arg(long, value_parser = parse_direction, allow_hyphen_values = true)]
        u: Direction,
        #[arg(long, default_value_t = 0)]
        z_len: usize,
        #[command(flatten)]
        window: Window,
    },
    /// Covering algorithm on a site set (`--sites`) or a p-random window.
    Cover {
        #[command(flatten)]
        common: Common,
        /// JSON list of `[x,y]` sites.
        #[arg(long)]
        sites: Option<PathBuf>,
        #[arg(long, default_value_t = 0.1)]
        p: f64,
        /// Random sites are drawn from `[-radius, radius]²`.
        #[arg(long, default_value_t = 20)]
        radius: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Shuffle block selection with this seed instead of the greedy order.
        #[arg(long)]
        shuffle: Option<u64>,
    },
    /// Simulate the deterministic droplet growth steps.
    GrowthVerify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10)]
        m: i64,
        #[arg(long)]
        mu: Option<i64>,
        #[arg(long, default_value_t = DEFAULT_L_MAX)]
        lmax: usize,
    },
    /// A finite seed whose closure grows beyond `--cap`.
    Witness {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1000)]
        cap: usize,
    },
    /// Percolation probability on the torus at each p.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        exp: Experiment,
        #[command(flatten)]
        grid: Grid,
    },
    /// Bisection for the critical probability.
    Pc {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        exp: Experiment,
        #[arg(long, default_value_t = 1e-6)]
        lo: f64,
        #[arg(long, default_value_t = 0.5)]
        hi: f64,
    },
    /// Origin infection times and scaling fits.
    Tau {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        exp: Experiment,
        #[command(flatten)]
        grid: Grid,
    },
}

fn parse_grid(s: &str) -> Result<PGrid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, steps] = parts[..] else {
        return Err("expected lo:hi:steps".into());
    };
    let lo: f64 = lo.parse().map_err(|e| format!("lo: {e}"))?;
    let hi: f64 = hi.parse().map_err(|e| format!("hi: {e}"))?;
    let steps: usize = steps.parse().map_err(|e| format!("steps: {e}"))?;
    if steps == 0 || lo > hi {
        return Err("need lo ≤ hi and steps ≥ 1".into());
    }
    Ok(PGrid(linear_grid(lo, hi, steps)))
}

fn parse_direction(s: &str) -> Result<Direction, String> {
    let (x, y) = s.split_once(',').ok_or("expected x,y")?;
    let x: i64 = x.trim().parse().map_err(|e| format!("x: {e}"))?;
    let y: i64 = y.trim().parse().map_err(|e| format!("y: {e}"))?;
    Direction::new(x, y).ok_or_else(|| format!("({x},{y}) is not a primitive vector"))
}

fn canonical<T: Serialize>(v: &T) -> String {
    // `Value` objects keep keys sorted, so printing through it fixes the key order.
    serde_json::to_value(v)
        .and_then(|v| serde_json::to_string(&v))
        .expect("outputs serialise")
}

fn io(e: std::io::Error) -> Failure {
    Failure::Invalid(e.to_string())
}

fn write_file(path: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Invalid(format!("{}: {e}", p.display()))),
        None => Ok(()),
    }
}

/// JSON to stdout with `--json`, the table otherwise; JSON to `--out` if given.
fn emit(common: &Common, out: &mut dyn Write, value: &Value, table: &str) -> Result<(), Failure> {
    let text = canonical(value);
    write_file(&common.out, &format!("{text}\n"))?;
    if common.json {
        writeln!(out, "{text}").map_err(io)
    } else {
        write!(out, "{table}").map_err(io)
    }
}

fn arc_text(a: &Arc) -> String {
    if a.is_whole() {
        return "whole circle".into();
    }
    if a.is_point() {
        return format!("{{{}}}", a.start);
    }
    let l = if a.start_closed { '[' } else { '(' };
    let r = if a.end_closed { ']' } else { ')' };
    format!("{l}{}, {}{r}", a.start, a.end)
}

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_else(|| "-".into())
}

fn config(label: &str, family: UpdateFamily, e: &Experiment) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(label, family, e.n, e.trials, e.seed);
    c.workers = e.workers;
    c.max_steps = e.max_steps;
    c
}

fn label(source: &str) -> String {
    let name = std::path::Path::new(source)
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or(source);
    // Commas would break the CSV column.
    name.replace(',', "_")
}

fn grid_points(g: &Grid) -> Result<Vec<f64>, Failure> {
    match (g.p, &g.p_grid) {
        (Some(p), None) => Ok(vec![p]),
        (None, Some(v)) => Ok(v.0.clone()),
        _ => Err(Failure::Invalid("one of --p or --p-grid is required".into())),
    }
}

fn config_failure(e: ConfigError) -> Failure {
    Failure::Invalid(e.to_string())
}

fn growth_failure(e: GrowthError) -> Failure {
    match e {
        GrowthError::WrongClass { .. } | GrowthError::BadWitness | GrowthError::MuTooSmall { .. } => {
            Failure::Precondition(e.to_string())
        }
        GrowthError::NoFeasibleMu(_) | GrowthError::NoBlock { .. } | GrowthError::NoWitness(_) => {
            Failure::Budget(e.to_string())
        }
        GrowthError::Window(_) => Failure::Invalid(e.to_string()),
    }
}

fn random_sites(p: f64, radius: i64, seed: u64) -> Vec<Site> {
    let t = threshold(p);
    let side = 2 * radius + 1;
    let mut v = Vec::new();
    for y in -radius..=radius {
        for x in -radius..=radius {
            let idx = ((y + radius) * side + (x + radius)) as u64;
            if t.is_none_or(|t| draw(seed, 0, idx) < t) {
                v.push((x, y));
            }
        }
    }
    v
}

pub fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<(), Failure> {
    match cli.command {
        Command::Classify(c) => {
            let family = load_family(&c.family)?;
            let class = classify(&family);
            let table = match class.witness {
                Some(w) => format!("{}\nwitness semicircle {}\n", class.kind, arc_text(&w)),
                None => format!("{}\n", class.kind),
            };
            emit(&c, out, &json!(class), &table)
        }
        Command::StableSet(c) => {
            let family = load_family(&c.family)?;
            let stab = stable_set(&family);
            let mut table = String::new();
            if stab.is_full() {
                table.push_str("whole circle\n");
            }
            for a in stab.arcs() {
                writeln!(table, "{}", arc_text(&a)).unwrap();
            }
            emit(&c, out, &json!(stab), &table)
        }
        Command::Quasi(c) => {
            let family = load_family(&c.family)?;
            let dirs = quasi_stable_set(&family);
            let check = verify_quasi_stability(&family, &dirs);
            let mut table: String = dirs.iter().map(|d| format!("{d}\n")).collect();
            match check.failing_pair {
                None => table.push_str("every consecutive pair has a rule\n"),
                Some((u, v)) => writeln!(table, "no rule for the pair {u}, {v}").unwrap(),
            }
            emit(&c, out, &json!({ "directions": dirs, "check": check }), &table)
        }
        Command::Alpha { common, lmax, window } => {
            let family = load_family(&common.family)?;
            let report = alpha_report(&family, lmax, window.window_w, window.window_h).map_err(|e| match e {
                AlphaError::NonCritical(_) => Failure::Precondition(e.to_string()),
                _ => Failure::Invalid(e.to_string()),
            })?;
            let mut table = format!("alpha1 {}\nalpha2 {}\n", opt(report.alpha1), opt(report.alpha2));
            for (d, len) in &report.per_direction {
                writeln!(table, "  {d}: {}", opt(*len)).unwrap();
            }
            emit(&common, out, &json!(report), &table)
        }
        Command::Ublock {
            common,
            u,
            z_len,
            window,
        } => {
            let family = load_family(&common.family)?;
            let v = is_u_block(&family, u, z_len, window.window_w, window.window_h)
                .map_err(|e| Failure::Invalid(e.to_string()))?;
            let table = format!("{:?} (window {}×{})\n", v.status, v.window_w, v.window_h);
            emit(&common, out, &json!(v), &table)
        }
        Command::Cover {
            common,
            sites,
            p,
            radius,
            seed,
            shuffle,
        } => {
            let family = load_family(&common.family)?;
            let k: Vec<Site> = match sites {
                Some(path) => {
                    let text =
                        std::fs::read(&path).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?;
                    serde_json::from_slice(&text).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?
                }
                None => random_sites(p, radius, seed),
            };
            let order = shuffle.map_or(CoverOrder::Greedy, CoverOrder::Shuffled);
            let report = cover(&k, &family, order).map_err(|e| Failure::Precondition(e.to_string()))?;
            let mut table = format!(
                "{} sites, {} blocks, {} merges, {} droplets\n",
                k.len(),
                report.blocks.len(),
                report.merge_trace.len(),
                report.droplets.len()
            );
            for d in &report.droplets {
                let cs: Vec<String> = d
                    .constraints()
                    .iter()
                    .map(|c| format!("{}≤{}", c.direction, c.offset))
                    .collect();
                writeln!(table, "  {}", cs.join(" ")).unwrap();
            }
            emit(&common, out, &json!({ "sites": k, "report": report }), &table)
        }
        Command::GrowthVerify { common, m, mu, lmax } => {
            let family = load_family(&common.family)?;
            let class = classify(&family);
            let witness = match (class.kind, class.witness) {
                (Kind::Critical, Some(w)) => w,
                (kind, _) => return Err(Failure::Precondition(format!("family is {kind}, expected critical"))),
            };
            let report = verify_droplet_growth(&family, witness, m, mu, lmax).map_err(growth_failure)?;
            let mut table = format!("mu {} depth {}\n", report.frame.mu, report.frame.depth);
            for s in &report.steps {
                let verdict = if s.passed { "pass" } else { "FAIL" };
                writeln!(
                    table,
                    "  m={:<3} {} droplet sites {:<6} missing {}",
                    s.m, verdict, s.droplet_sites, s.missing
                )
                .unwrap();
            }
            emit(
                &common,
                out,
                &json!({ "all_passed": report.all_passed(), "report": report }),
                &table,
            )?;
            if report.all_passed() {
                Ok(())
            } else {
                Err(Failure::Invalid("droplet growth failed at some step".into()))
            }
        }
        Command::Witness { common, cap } => {
            let family = load_family(&common.family)?;
            let class = classify(&family);
            let witness = match (class.kind, class.witness) {
                (Kind::Supercritical, Some(w)) => w,
                (kind, _) => {
                    return Err(Failure::Precondition(format!(
                        "family is {kind}, expected supercritical"
                    )))
                }
            };
            let w = supercritical_witness(&family, witness, cap).map_err(growth_failure)?;
            let table = format!(
                "seed of {} sites ({}×{}); closure exceeds cap {}: {}; exceeds twice the cap: {}\n",
                w.seed.len(),
                w.depth + 1,
                w.width + 1,
                w.cap,
                w.exceeded_cap,
                w.exceeded_double_cap
            );
            emit(&common, out, &json!(w), &table)
        }
        Command::Simulate { common, exp, grid } => {
            let family = load_family(&common.family)?;
            let points = grid_points(&grid)?;
            let rows = percolation_probability(&config(&label(&common.family), family, &exp), &points)
                .map_err(config_failure)?;
            let csv = to_csv(&rows);
            write_file(&common.out, &csv)?;
            let text = if common.json {
                format!("{}\n", canonical(&rows))
            } else {
                csv
            };
            write!(out, "{text}").map_err(io)
        }
        Command::Pc { common, exp, lo, hi } => {
            let family = load_family(&common.family)?;
            let est = estimate_pc(&config(&label(&common.family), family, &exp), lo, hi).map_err(|e| match e {
                PcError::Config(c) => config_failure(c),
                PcError::NotBracketing { .. } => Failure::Precondition(e.to_string()),
            })?;
            write_file(&common.out, &to_csv(&est.evaluations))?;
            let text = if common.json {
                format!("{}\n", canonical(&est))
            } else {
                format!(
                    "p_c ≈ {} in [{}, {}] after {} evaluations\n",
                    est.p_hat,
                    est.interval.0,
                    est.interval.1,
                    est.evaluations.len()
                )
            };
            write!(out, "{text}").map_err(io)
        }
        Command::Tau { common, exp, grid } => {
            let family = load_family(&common.family)?;
            let points = grid_points(&grid)?;
            let cfg = config(&label(&common.family), family, &exp);
            let s = tau_scaling(&cfg, &points).map_err(config_failure)?;
            let rows: Vec<_> = s.rows.iter().map(|r| r.row.clone()).collect();
            let csv = to_csv(&rows);
            write_file(&common.out, &csv)?;
            let text = if common.json {
                format!("{}\n", canonical(&s))
            } else {
                let mut t = csv;
                for (name, fit) in [
                    ("log-log", &s.fits.log_log),
                    ("loglog-log", &s.fits.log_log_log),
                    ("log-inverse", &s.fits.log_inverse),
                ] {
                    if let Some(f) = fit {
                        writeln!(
                            t,
                            "# {name}: slope {:.4} ± {} r {:.4}",
                            f.slope,
                            opt(f.slope_stderr.map(|e| format!("{e:.4}"))),
                            f.correlation
                        )
                        .unwrap();
                    }
                }
                t
            };
            write!(out, "{text}").map_err(io)?;
            if s.aborted.is_empty() {
                Ok(())
            } else {
                Err(Failure::Budget(format!(
                    "more than 20% of trials discarded at p = {:?}",
                    s.aborted
                )))
            }
        }
    }
}
