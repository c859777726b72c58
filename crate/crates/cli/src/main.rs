use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use jtorus::tongues::{Side, TimeDirection};
use jtorus::{IntegratorConfig64, RotationMethod};
use jtorus_cli::*;

#[derive(Parser)]
#[command(
    name = "jtorus",
    version,
    about = "Rotation numbers, tongue boundaries and slow curves of the Josephson equation"
)]
struct Cli {
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, env = "JT_THREADS", default_value_t = 0)]
    threads: usize,
    /// Relative tolerance of the integrator.
    #[arg(long, global = true, default_value_t = 1e-10)]
    rel_tol: f64,
    /// Absolute tolerance of the integrator.
    #[arg(long, global = true, default_value_t = 1e-10)]
    abs_tol: f64,
    /// Largest integrator step.
    #[arg(long, global = true, default_value_t = 0.1)]
    max_step: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rotation number at one parameter point.
    Rotnum(RotnumArgs),
    /// Rotation-number grid written as CSV.
    Sweep(SweepArgs),
    /// Tongue boundaries a(b) by continuation.
    Trace(TraceArgs),
    /// Bridges of tongues.
    Bridges(BridgesArgs),
    /// Boundary residuals against the Bessel asymptote.
    Bessel(BesselArgs),
    /// Slow curve, folds and region label.
    Slowcurve(SlowcurveArgs),
    /// Re-run the job recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Mobius,
    Direct,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    #[value(name = "0")]
    Zero,
    Pi,
    Both,
}

impl SideArg {
    fn sides(self) -> Vec<Side> {
        match self {
            SideArg::Zero => vec![Side::Zero],
            SideArg::Pi => vec![Side::Pi],
            SideArg::Both => vec![Side::Zero, Side::Pi],
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Forward,
    Backward,
    Auto,
}

#[derive(Args)]
struct MethodOpts {
    #[arg(long, value_enum, default_value = "mobius")]
    method: MethodArg,
    /// Periods iterated by the direct method.
    #[arg(long, default_value_t = jtorus::poincare::DIRECT_PERIODS)]
    periods: u32,
}

impl MethodOpts {
    fn method(&self) -> RotationMethod {
        match self.method {
            MethodArg::Mobius => RotationMethod::Mobius,
            MethodArg::Direct => RotationMethod::Direct {
                periods: self.periods,
            },
        }
    }
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct RotnumArgs {
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: f64,
    #[arg(long)]
    mu: f64,
    #[command(flatten)]
    method: MethodOpts,
    /// Print the result as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct SweepArgs {
    /// JSON sweep job; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    a_range: Option<Vec<f64>>,
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    b_range: Option<Vec<f64>>,
    #[arg(long, num_args = 2, value_names = ["NA", "NB"])]
    grid: Option<Vec<usize>>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    #[arg(long, default_value_t = jtorus::poincare::DIRECT_PERIODS)]
    periods: u32,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TraceOpts {
    /// Continuation step in b.
    #[arg(long, default_value_t = 0.01)]
    h: f64,
    #[arg(long, default_value_t = 1e-9)]
    newton_tol: f64,
    #[arg(long, default_value_t = 8)]
    max_newton_iters: u32,
    #[arg(long, default_value_t = 1e-4)]
    bisection_bracket: f64,
    #[arg(long, value_enum, default_value = "auto")]
    time_direction: DirectionArg,
}

impl TraceOpts {
    fn settings(&self) -> TraceSettings {
        TraceSettings {
            h: self.h,
            newton_tol: self.newton_tol,
            max_newton_iters: self.max_newton_iters,
            bisection_bracket: self.bisection_bracket,
            time_direction: match self.time_direction {
                DirectionArg::Forward => TimeDirection::Forward,
                DirectionArg::Backward => TimeDirection::Backward,
                DirectionArg::Auto => TimeDirection::Auto,
            },
        }
    }
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct TraceArgs {
    /// Tongue indices, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    k: Vec<i64>,
    #[arg(long, value_enum, default_value = "both")]
    side: SideArg,
    #[arg(long)]
    mu: f64,
    #[arg(long)]
    b_max: f64,
    #[command(flatten)]
    opts: TraceOpts,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct BridgesArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    k: Vec<i64>,
    #[arg(long)]
    mu: f64,
    #[arg(long)]
    b_max: f64,
    #[command(flatten)]
    opts: TraceOpts,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct BesselArgs {
    #[arg(long)]
    k: i64,
    #[arg(long)]
    mu: f64,
    /// Defaults to max(20, 5/mu).
    #[arg(long)]
    b_min: Option<f64>,
    /// Defaults to three times b_min.
    #[arg(long)]
    b_max: Option<f64>,
    #[arg(long, default_value_t = 41)]
    n_points: usize,
    #[command(flatten)]
    opts: TraceOpts,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct SlowcurveArgs {
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: f64,
    /// Samples per arc.
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReplayArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Output path; defaults to the one recorded in the manifest.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn sweep_job(args: &SweepArgs) -> Result<SweepJob, CliError> {
    let mut job = match &args.config {
        Some(path) => serde_json::from_str::<SweepJob>(&std::fs::read_to_string(path)?)?,
        None => {
            let missing = |name: &str| CliError::Usage(format!("sweep needs --{name} or --config"));
            let a = args.a_range.as_ref().ok_or_else(|| missing("a-range"))?;
            let b = args.b_range.as_ref().ok_or_else(|| missing("b-range"))?;
            let g = args.grid.as_ref().ok_or_else(|| missing("grid"))?;
            SweepJob {
                a_range: [a[0], a[1]],
                b_range: [b[0], b[1]],
                grid: [g[0], g[1]],
                mu: args.mu.ok_or_else(|| missing("mu"))?,
                method: RotationMethod::Mobius,
            }
        }
    };
    if let Some(r) = &args.a_range {
        job.a_range = [r[0], r[1]];
    }
    if let Some(r) = &args.b_range {
        job.b_range = [r[0], r[1]];
    }
    if let Some(g) = &args.grid {
        job.grid = [g[0], g[1]];
    }
    if let Some(mu) = args.mu {
        job.mu = mu;
    }
    if let Some(m) = args.method {
        job.method = MethodOpts {
            method: m,
            periods: args.periods,
        }
        .method();
    }
    Ok(job)
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let integrator = IntegratorConfig64 {
        rel_tol: cli.rel_tol,
        abs_tol: cli.abs_tol,
        max_step: cli.max_step,
        ..Default::default()
    };
    let threads = cli.threads;
    let (job, out) = match cli.command {
        Command::Replay(r) => {
            let outcome = replay(&r.manifest, r.out.as_deref(), threads)?;
            print!("{}", outcome.report);
            return Ok(());
        }
        Command::Rotnum(r) => {
            let job = Job::Rotnum(RotnumJob {
                a: r.a,
                b: r.b,
                mu: r.mu,
                method: r.method.method(),
            });
            let outcome = execute(&job, &integrator, threads)?;
            if r.json {
                println!("{}", serde_json::to_string_pretty(&outcome.summary)?);
            } else {
                print!("{}", outcome.report);
            }
            return Ok(());
        }
        Command::Sweep(s) => (Job::Sweep(sweep_job(&s)?), s.out),
        Command::Trace(t) => (
            Job::Trace(TraceJob {
                ks: t.k,
                sides: t.side.sides(),
                mu: t.mu,
                b_max: t.b_max,
                settings: t.opts.settings(),
            }),
            t.out,
        ),
        Command::Bridges(b) => (
            Job::Bridges(BridgesJob {
                ks: b.k,
                mu: b.mu,
                b_max: b.b_max,
                settings: b.opts.settings(),
            }),
            b.out,
        ),
        Command::Bessel(b) => {
            let (lo, hi) = jtorus::asymptotics::default_scan_range(b.mu);
            let b_min = b.b_min.unwrap_or(lo);
            let b_max = b
                .b_max
                .unwrap_or(if b.b_min.is_some() { 3.0 * b_min } else { hi });
            let job = BesselJob {
                k: b.k,
                mu: b.mu,
                b_range: [b_min, b_max],
                n_points: b.n_points,
                settings: b.opts.settings(),
            };
            (Job::Bessel(job), b.out)
        }
        Command::Slowcurve(s) => (
            Job::Slowcurve(SlowcurveJob {
                a: s.a,
                b: s.b,
                n_samples: s.samples,
            }),
            s.out,
        ),
    };
    let outcome = run_to_file(&job, &integrator, threads, Some(&out))?;
    print!("{}", outcome.report);
    eprintln!(
        "wrote {} and {}",
        out.display(),
        manifest_path(&out).display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
