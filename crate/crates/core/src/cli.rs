//! Command-line front end. Exit codes: 0 success, 2 configuration or I/O,
//! 3 regime or hypothesis, 4 tolerance failure, 5 explosion guard, 1 otherwise.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::experiments::{
    compare_to_meanfield, run_subcritical, run_supercritical, ConvergenceTable, Target,
};
use crate::io::config::{parse_config, RunConfig, RunTarget};
use crate::io::svg::{emit_svg_lines, Scale, Series};
use crate::io::table::{read_csv, real, write_convergence, write_csv, write_events, Metadata};
use crate::kernel::Regime;
use crate::meanfield::solve_volterra;
use crate::simulator::{simulate_cluster, simulate_thinning, ThinningOptions};
use crate::stable::{llt_errors, WalkOptions};
use crate::verify::{compare_runs, run_suite, Profile};

#[derive(Debug, Parser)]
#[command(
    name = "hawkes-longrange",
    version,
    about = "Long-range lattice Hawkes processes"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Run configuration (flat TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; overrides `out` in the config.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Overrides `seed` in the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for replicas (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Svg,
    Both,
}

impl Format {
    fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    fn svg(self) -> bool {
        matches!(self, Format::Svg | Format::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineChoice {
    Cluster,
    Thinning,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Kernel integral, regime, Malthusian exponent θ and m̄.
    Theta,
    /// Rows of A^n and the sup-row ℓ² masses.
    LatticePowers,
    /// Local limit errors of the lattice walk against the stable density.
    StableCheck,
    /// Mean-field first moments m_t and x_t.
    Meanfield,
    /// One event log, plus the convergence table when the config names a target.
    Simulate {
        #[arg(long, default_value_t = 0)]
        replica: u64,
        #[arg(long, value_enum, default_value_t = EngineChoice::Cluster)]
        engine: EngineChoice,
    },
    /// Canned checks of both growth laws, the solvers and the simulators.
    Verify {
        #[arg(long, value_enum, default_value_t = Profile::Quick)]
        profile: Profile,
        /// Directory of an earlier run to compare against.
        #[arg(long)]
        against: Option<PathBuf>,
    },
    /// Line chart from a CSV table.
    Plot {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "t")]
        x: String,
        #[arg(long, default_value = "estimate")]
        y: String,
        /// Column splitting rows into series.
        #[arg(long)]
        group: Option<String>,
        #[arg(long)]
        log_y: bool,
        #[arg(long)]
        title: Option<String>,
    },
}

/// Parses `args` and runs; returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.global.threads {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| Error::config(Some("threads"), None, e.to_string()))?;
    pool.install(|| dispatch(&cli))
}

struct Context {
    cfg: RunConfig,
    out: PathBuf,
    meta: Metadata,
    format: Format,
}

impl Context {
    fn load(global: &GlobalArgs) -> Result<Self> {
        let path = global.config.as_ref().ok_or_else(|| {
            Error::config(
                Some("config"),
                None,
                "--config is required for this command",
            )
        })?;
        let mut cfg = parse_config(path)?;
        if let Some(seed) = global.seed {
            cfg.seed = seed;
            cfg.defaulted.retain(|k| k != "seed");
        }
        let out = global.out.clone().unwrap_or_else(|| cfg.out.clone());
        std::fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
        let meta = Metadata::new(cfg.seed, cfg.hash()).with_echo(cfg.echo());
        Ok(Context {
            cfg,
            out,
            meta,
            format: global.format,
        })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn csv(&self, name: &str, header: &[&str], rows: Vec<Vec<String>>) -> Result<()> {
        if self.format.csv() {
            let path = self.path(name);
            write_csv(&path, &self.meta, header, rows)?;
            println!("wrote {}", path.display());
        }
        Ok(())
    }

    fn svg(&self, name: &str, series: &[Series], scale: Scale, title: &str) -> Result<()> {
        if self.format.svg() {
            let path = self.path(name);
            emit_svg_lines(series, &path, scale, title, &self.meta)?;
            println!("wrote {}", path.display());
        }
        Ok(())
    }
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Theta => theta(&Context::load(&cli.global)?),
        Command::LatticePowers => lattice_powers(&Context::load(&cli.global)?),
        Command::StableCheck => stable_check(&Context::load(&cli.global)?),
        Command::Meanfield => meanfield(&Context::load(&cli.global)?),
        Command::Simulate { replica, engine } => {
            simulate(&Context::load(&cli.global)?, *replica, *engine)
        }
        Command::Verify { profile, against } => verify(&cli.global, *profile, against.as_deref()),
        Command::Plot {
            input,
            x,
            y,
            group,
            log_y,
            title,
        } => plot(
            &cli.global,
            input,
            x,
            y,
            group.as_deref(),
            *log_y,
            title.as_deref(),
        ),
    }
}

fn theta(ctx: &Context) -> Result<()> {
    let kernel = ctx.cfg.temporal_kernel()?;
    let analysis = kernel.analyze()?;
    let bound = kernel.bound();
    let mut rows = vec![
        ("integral", real(analysis.integral)),
        ("regime", format!("{:?}", analysis.regime)),
        ("bound_c", real(bound.c)),
        ("bound_kappa", real(bound.kappa)),
    ];
    if let (Some(theta), Some(m_bar)) = (analysis.theta, analysis.m_bar) {
        rows.push(("theta", real(theta)));
        rows.push(("m_bar", real(m_bar)));
        rows.push((
            "growth_constant_per_unit_mu",
            real(1.0 / (theta * theta * m_bar)),
        ));
    }
    for (k, v) in &rows {
        println!("{k:<28} {v}");
    }
    ctx.csv(
        "theta.csv",
        &["quantity", "value"],
        rows.into_iter()
            .map(|(k, v)| vec![k.to_owned(), v])
            .collect(),
    )
}

fn lattice_powers(ctx: &Context) -> Result<()> {
    let lattice = ctx.cfg.lattice()?;
    let l = lattice.half_width() as i64;
    let mut rows = Vec::new();
    let mut series = Vec::new();
    for &n in &ctx.cfg.powers {
        let row = lattice.power_row(n)?;
        series.push(Series::new(
            format!("n = {n}"),
            row.iter()
                .enumerate()
                .map(|(k, &v)| ((k as i64 - l) as f64, v))
                .collect(),
        ));
        rows.extend(
            row.iter()
                .enumerate()
                .map(|(k, &v)| vec![n.to_string(), (k as i64 - l).to_string(), real(v)]),
        );
    }
    ctx.csv("lattice_powers.csv", &["n", "displacement", "mass"], rows)?;
    let n_max = *ctx.cfg.powers.iter().max().expect("non-empty powers");
    let eps = lattice.row_sq_sup(n_max)?;
    ctx.csv(
        "row_sq_sup.csv",
        &["n", "row_sq_sup", "eps"],
        eps.iter()
            .enumerate()
            .map(|(i, e)| vec![(i + 1).to_string(), real(*e), real(e.sqrt())])
            .collect(),
    )?;
    ctx.svg("lattice_powers.svg", &series, Scale::Linear, "rows of A^n")
}

fn stable_check(ctx: &Context) -> Result<()> {
    let alpha = ctx.cfg.alpha()?;
    if alpha == 1.0 {
        return Err(Error::config(
            Some("alpha"),
            None,
            "alpha = 1 is excluded from the stable local limit theorems",
        ));
    }
    let opts = WalkOptions {
        max_deficit: ctx.cfg.llt_max_deficit,
        ..WalkOptions::default()
    };
    let mut rows = Vec::new();
    let mut sup = Vec::new();
    let mut tv = Vec::new();
    for &n in &ctx.cfg.llt_steps {
        let m = (ctx.cfg.llt_window_factor * (n as f64).powf(1.0 / alpha)).ceil() as usize;
        let e = llt_errors(alpha, n, m, &opts)?;
        println!(
            "alpha {alpha} n {n:>5}: rescaled sup {:.4e}  tv {:.4e}  deficit {:.2e}",
            e.rescaled_sup_error, e.tv_error, e.deficit
        );
        sup.push((n as f64, e.rescaled_sup_error));
        tv.push((n as f64, e.tv_error));
        rows.push(vec![
            real(alpha),
            n.to_string(),
            real(e.sup_error),
            real(e.rescaled_sup_error),
            real(e.tv_error),
            real(e.deficit),
        ]);
    }
    ctx.csv(
        "stable_check.csv",
        &[
            "alpha",
            "n",
            "sup_error",
            "rescaled_sup_error",
            "tv_error",
            "deficit",
        ],
        rows,
    )?;
    ctx.svg(
        "stable_check.svg",
        &[
            Series::new("rescaled sup error", sup),
            Series::new("TV error", tv),
        ],
        Scale::LogY,
        "local limit errors",
    )
}

fn meanfield(ctx: &Context) -> Result<()> {
    let kernel = ctx.cfg.temporal_kernel()?;
    let lattice = ctx.cfg.lattice()?;
    let mu = ctx.cfg.mu_values()?;
    let sol = solve_volterra(&kernel, &lattice, &mu, ctx.cfg.horizon()?, ctx.cfg.step()?)?;
    let theta = match kernel.regime() {
        Regime::SuperCritical => Some(kernel.solve_theta()?),
        _ => None,
    };
    let sites = ctx.cfg.observed_sites()?;
    let l = lattice.half_width() as i64;
    let mut rows = Vec::new();
    let mut series: Vec<Series> = sites
        .iter()
        .map(|&s| Series::new(format!("site {}", s as i64 - l), Vec::new()))
        .collect();
    for k in 0..sol.grid().len {
        let t = sol.grid().time(k);
        for (slot, &site) in sites.iter().enumerate() {
            let (m, x) = (sol.m_at(k, site), sol.x_at(k, site));
            let rescaled = match theta {
                Some(th) => sol.m_discounted(k, th)[site],
                None if t > 0.0 => m / t,
                None => mu[site],
            };
            if m > 0.0 {
                series[slot].points.push((t, m));
            }
            rows.push(vec![
                real(t),
                (site as i64 - l).to_string(),
                real(m),
                real(x),
                real(rescaled),
            ]);
        }
    }
    ctx.csv("meanfield.csv", &["t", "site", "m", "x", "rescaled"], rows)?;
    let scale = if theta.is_some() {
        Scale::LogY
    } else {
        Scale::Linear
    };
    ctx.svg("meanfield.svg", &series, scale, "mean-field counts m_t")
}

fn convergence_series(table: &ConvergenceTable) -> Vec<Series> {
    let mut sites: Vec<i64> = table.rows.iter().map(|r| r.site).collect();
    sites.sort_unstable();
    sites.dedup();
    sites
        .iter()
        .map(|&s| {
            Series::new(
                format!("site {s}"),
                table
                    .rows
                    .iter()
                    .filter(|r| r.site == s)
                    .map(|r| (r.t, r.estimate))
                    .collect(),
            )
        })
        .collect()
}

fn simulate(ctx: &Context, replica: u64, engine: EngineChoice) -> Result<()> {
    let hawkes = ctx.cfg.hawkes()?;
    let log = match engine {
        EngineChoice::Cluster => simulate_cluster(&hawkes, replica)?,
        EngineChoice::Thinning => simulate_thinning(&hawkes, replica, &ThinningOptions::default())?,
    };
    println!("replica {replica}: {} events", log.total_events());
    if ctx.format.csv() {
        let mut meta = ctx.meta.clone();
        meta.echo.push(format!("replica = {replica}"));
        let path = ctx.path("events.csv");
        write_events(&log, &path, &meta)?;
        println!("wrote {}", path.display());
    }
    let Some(target) = ctx.cfg.target.and_then(RunTarget::experiment) else {
        return Ok(());
    };
    let plan = ctx.cfg.plan()?;
    let table = match target {
        Target::SubCriticalLaw => run_subcritical(&plan)?,
        Target::SuperCriticalLaw => run_supercritical(&plan)?,
        Target::MeanFieldOnly => {
            let sol = solve_volterra(
                hawkes.kernel(),
                hawkes.lattice(),
                hawkes.mu(),
                hawkes.horizon(),
                ctx.cfg.step()?,
            )?;
            compare_to_meanfield(&plan, &sol)?
        }
    };
    for r in &table.rows {
        println!(
            "t {:>8.3} site {:>5}: estimate {:.6e} theory {:.6e} stderr {:.2e}{}",
            r.t,
            r.site,
            r.estimate,
            r.theory,
            r.mc_stderr,
            if r.flagged { " *" } else { "" }
        );
    }
    if ctx.format.csv() {
        let path = ctx.path("convergence.csv");
        write_convergence(&table, &path, &ctx.meta)?;
        println!("wrote {}", path.display());
    }
    ctx.svg(
        "convergence.svg",
        &convergence_series(&table),
        Scale::Linear,
        "Monte Carlo estimates",
    )
}

fn verify(global: &GlobalArgs, profile: Profile, against: Option<&Path>) -> Result<()> {
    let seed = global.seed.unwrap_or(0);
    let out = global
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("verify"));
    let report = run_suite(profile, seed, &out)?;
    for c in &report.checks {
        println!(
            "{} {:<28} {:>14.6e}  {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.requirement
        );
    }
    if let Some(other) = against {
        let differing = compare_runs(&report, other)?;
        if !differing.is_empty() {
            return Err(Error::Tolerance(format!(
                "tables differ from {}: {}",
                other.display(),
                differing.join(", ")
            )));
        }
        println!("all tables identical to {}", other.display());
    }
    report.into_result().map(|_| ())
}

fn plot(
    global: &GlobalArgs,
    input: &Path,
    x: &str,
    y: &str,
    group: Option<&str>,
    log_y: bool,
    title: Option<&str>,
) -> Result<()> {
    let file = read_csv(input)?;
    let xs = file.reals(x)?;
    let ys = file.reals(y)?;
    let series = match group {
        None => vec![Series::new(y, xs.into_iter().zip(ys).collect())],
        Some(g) => {
            let k = file.column(g)?;
            let mut names: Vec<&str> = Vec::new();
            for row in &file.rows {
                if !names.contains(&row[k].as_str()) {
                    names.push(&row[k]);
                }
            }
            names
                .iter()
                .map(|name| {
                    let pts = file
                        .rows
                        .iter()
                        .zip(xs.iter().zip(&ys))
                        .filter(|(row, _)| row[k] == *name)
                        .map(|(_, (a, b))| (*a, *b))
                        .collect();
                    Series::new(format!("{g} {name}"), pts)
                })
                .collect()
        }
    };
    let out = global
        .out
        .clone()
        .unwrap_or_else(|| input.parent().map(Path::to_path_buf).unwrap_or_default());
    std::fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
    let stem = input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or("plot".into());
    let path = out.join(format!("{stem}.svg"));
    let scale = if log_y { Scale::LogY } else { Scale::Linear };
    emit_svg_lines(
        &series,
        &path,
        scale,
        title.unwrap_or(&stem),
        &file.metadata,
    )?;
    println!("wrote {}", path.display());
    Ok(())
}
