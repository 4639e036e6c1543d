//! Command-line front end: evaluate the limit solution, classify space-time
//! points, extract instant shocks, track perestroika events, derive the
//! allowed-perestroika catalog, and compare against the finite-viscosity
//! reference solution.

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;
use shocklab::action;
use shocklab::catalog;
use shocklab::config::{parse_sections, RunConfig};
use shocklab::determinator::{classify, Verdict};
use shocklab::field::FieldExpr;
use shocklab::minima;
use shocklab::tracker;

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "shocklab", version, about = "Shocks of the unforced Burgers equation: limit solutions, singularities, perestroikas")]
struct Cli {
    /// Configuration file (flat key = value with [section] headers).
    #[arg(long, global = true)]
    config: Option<std::path::PathBuf>,

    /// Write the machine-readable JSON document here ("-" for stdout).
    #[arg(long, global = true)]
    out: Option<String>,

    /// Worker threads (0 = rayon default); SHOCKLAB_THREADS is the fallback.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Exit with status 3 on a non-generic verdict.
    #[arg(long, global = true)]
    strict: bool,

    /// Random seed recorded in the output (the pipelines are deterministic).
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct FieldArgs {
    /// Dimension (1, 2, or 3).
    #[arg(long)]
    d: usize,
    /// Initial condition over a1..ad, e.g. "a1^4/4 - a1^2/2".
    #[arg(long)]
    field: String,
}

#[derive(Subcommand)]
enum Command {
    /// Limit solution and tied minima at a space-time point.
    Evaluate {
        #[command(flatten)]
        field: FieldArgs,
        /// Eulerian point, comma-separated.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long)]
        t: f64,
    },
    /// Classification (outside / singularity / perestroika / non-generic).
    Classify {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long)]
        t: f64,
    },
    /// Instant shock geometry at a time.
    Shock {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        t: f64,
        /// Spatial window, comma-separated lows.
        #[arg(long, allow_hyphen_values = true)]
        window_lo: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        window_hi: Option<String>,
        #[arg(long)]
        resolution: Option<usize>,
        /// Output format for --out: json or csv.
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Perestroika events over a time range.
    Events {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        t_min: Option<f64>,
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        window_lo: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        window_hi: Option<String>,
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// Derived allowed-perestroika map for a dimension.
    Catalog {
        #[arg(long)]
        d: usize,
    },
    /// Finite-viscosity reference value and its gap to the limit solution.
    Hopfcole {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        nu: f64,
    },
}

fn parse_point(s: &str, d: usize) -> anyhow::Result<Vec<f64>> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .with_context(|| format!("malformed point `{s}`"))?;
    if v.len() != d {
        return Err(anyhow!("point `{s}` has {} components, expected {d}", v.len()));
    }
    Ok(v)
}

#[derive(Serialize)]
struct Document<T: Serialize> {
    schema: u32,
    tool: ToolInfo,
    seed: u64,
    config: RunConfig,
    result: T,
}

#[derive(Serialize)]
struct ToolInfo {
    name: &'static str,
    version: &'static str,
}

fn emit<T: Serialize>(cli_out: &Option<String>, doc: &Document<T>) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(doc)?;
    match cli_out.as_deref() {
        Some("-") => println!("{text}"),
        Some(path) => std::fs::write(path, text + "\n")?,
        None => {}
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(2);
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        cfg.apply(&parse_sections(&text)?)?;
    }
    let threads = cli
        .threads
        .or_else(|| {
            std::env::var("SHOCKLAB_THREADS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(cfg.threads);
    cfg.threads = threads;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .ok();
    }
    let seed = cli.seed.unwrap_or(cfg.search.seed);
    cfg.search.seed = seed;
    cfg.scan.search.seed = seed;

    let doc = |cfg: &RunConfig, result: serde_json::Value| Document {
        schema: SCHEMA_VERSION,
        tool: ToolInfo {
            name: "shocklab",
            version: env!("CARGO_PKG_VERSION"),
        },
        seed,
        config: cfg.clone(),
        result,
    };

    let mut exit = 0;
    match &cli.command {
        Command::Evaluate { field, x, t } => {
            let f = FieldExpr::parse(&field.field, field.d)?;
            let x = parse_point(x, field.d)?;
            let (value, mc) = action::limit_solution(&f, &x, *t, &cfg.search)?;
            println!("phi({:?}, {}) = {:.12}", x, t, value);
            for r in &mc.records {
                println!(
                    "  minimum at {:?}  value {:.12}  class {:?}",
                    r.location, r.value, r.class
                );
            }
            emit(
                &cli.out,
                &doc(
                    &cfg,
                    json!({"value": value, "minima": mc.summary(), "x": x, "t": t}),
                ),
            )?;
        }
        Command::Classify { field, x, t } => {
            let f = FieldExpr::parse(&field.field, field.d)?;
            let x = parse_point(x, field.d)?;
            let mc = minima::find_global_minima(&f, &x, *t, &cfg.search)?;
            let c = classify(&mc, &cfg.determinator, &cfg.search);
            match &c.verdict {
                Verdict::Outside => println!("outside the instant shock"),
                Verdict::Singularity { word } => println!("singularity {word}"),
                Verdict::Perestroika { rendered, word, .. } => {
                    println!("perestroika {rendered} (word {word})")
                }
                Verdict::NonGeneric { reason } => {
                    println!("non-generic: {reason}");
                    if cli.strict {
                        exit = 3;
                    }
                }
            }
            emit(
                &cli.out,
                &doc(
                    &cfg,
                    json!({"classification": c, "minima": mc.summary(), "x": x, "t": t}),
                ),
            )?;
        }
        Command::Shock {
            field,
            t,
            window_lo,
            window_hi,
            resolution,
            format,
        } => {
            let f = FieldExpr::parse(&field.field, field.d)?;
            let mut scan = default_scan(&cfg, field.d);
            if let Some(lo) = window_lo {
                scan.window_lo = parse_point(lo, field.d)?;
            }
            if let Some(hi) = window_hi {
                scan.window_hi = parse_point(hi, field.d)?;
            }
            if let Some(r) = resolution {
                scan.resolution = *r;
            }
            let g = tracker::instant_shock(&f, *t, &scan)?;
            let inv = g.invariants();
            println!(
                "instant shock at t = {t}: {} vertices, {} edges, {} triangles; components {}, junctions {}, endpoints {}",
                g.vertices.len(),
                g.edges.len(),
                g.triangles.len(),
                inv.components,
                inv.junctions,
                inv.endpoints
            );
            match format.as_str() {
                "csv" => {
                    if let Some(path) = cli.out.as_deref() {
                        if path == "-" {
                            println!("{}", g.to_csv());
                        } else {
                            std::fs::write(path, g.to_csv())?;
                        }
                    }
                }
                "json" => emit(
                    &cli.out,
                    &doc(&cfg, json!({"t": t, "geometry": g, "invariants": inv})),
                )?,
                other => return Err(anyhow!("unknown format `{other}`")),
            }
        }
        Command::Events {
            field,
            t_min,
            t_max,
            steps,
            window_lo,
            window_hi,
            resolution,
        } => {
            let f = FieldExpr::parse(&field.field, field.d)?;
            let mut scan = default_scan(&cfg, field.d);
            if let Some(v) = t_min {
                scan.t_min = *v;
            }
            if let Some(v) = t_max {
                scan.t_max = *v;
            }
            if let Some(v) = steps {
                scan.time_steps = *v;
            }
            if let Some(lo) = window_lo {
                scan.window_lo = parse_point(lo, field.d)?;
            }
            if let Some(hi) = window_hi {
                scan.window_hi = parse_point(hi, field.d)?;
            }
            if let Some(r) = resolution {
                scan.resolution = *r;
            }
            let events = tracker::find_perestroikas(&f, &scan, &cfg.determinator)?;
            println!("{} event(s)", events.len());
            let mut any_non_generic = false;
            for e in &events {
                let verdict = match &e.classification.verdict {
                    Verdict::Perestroika { rendered, .. } => rendered.clone(),
                    Verdict::NonGeneric { reason } => {
                        any_non_generic = true;
                        format!("non-generic ({reason})")
                    }
                    other => format!("{other:?}"),
                };
                println!(
                    "  t* = {:.8}  x* = {:?}  {}  after-clip: {}{}",
                    e.t_star,
                    e.x_star,
                    verdict,
                    e.restriction.verdict,
                    if e.resolved { "" } else { "  [unresolved cluster]" }
                );
            }
            if cli.strict && any_non_generic {
                exit = 3;
            }
            emit(&cli.out, &doc(&cfg, json!({"events": events})))?;
        }
        Command::Catalog { d } => {
            if !(1..=3).contains(d) {
                return Err(anyhow!("dimension must be 1, 2, or 3"));
            }
            let map = catalog::derive_allowed_map(*d, &cfg.catalog);
            let allowed = map
                .iter()
                .filter(|e| e.allowed == catalog::Allowed::Allowed)
                .count();
            println!("{}", catalog::render_map(&map));
            println!("{} entries, {} allowed", map.len(), allowed);
            emit(
                &cli.out,
                &doc(&cfg, json!({"d": d, "entries": map, "allowed": allowed})),
            )?;
        }
        Command::Hopfcole { field, x, t, nu } => {
            let f = FieldExpr::parse(&field.field, field.d)?;
            let x = parse_point(x, field.d)?;
            let psi = action::hopf_cole_solution(&f, &x, *t, *nu, &cfg.quadrature, &cfg.search)?;
            let (phi, _) = action::limit_solution(&f, &x, *t, &cfg.search)?;
            println!("psi_nu = {:.12}", psi);
            println!("phi    = {:.12}", phi);
            println!("gap    = {:.3e}", (psi - phi).abs());
            emit(
                &cli.out,
                &doc(
                    &cfg,
                    json!({"psi_nu": psi, "phi": phi, "gap": (psi - phi).abs(), "nu": nu}),
                ),
            )?;
        }
    }
    Ok(exit)
}

fn default_scan(cfg: &RunConfig, d: usize) -> tracker::ScanConfig {
    let mut scan = cfg.scan.clone();
    if scan.window_lo.len() != d {
        scan.window_lo = vec![-2.0; d];
        scan.window_hi = vec![2.0; d];
        scan.resolution = match d {
            1 => 129,
            2 => 65,
            _ => 25,
        };
    }
    scan.search = cfg.search.clone();
    scan
}
