use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use bcrbf::harness::report::{self, reference_lines, Format};
use bcrbf::harness::{run_example, run_sweep, ExampleId, Method, RunConfig, RunReport, SweepConfig, DEFAULT_EPS};
use bcrbf::numerics::Precision;
use bcrbf::{GridScheme, SolveMode};
use clap::{Parser, Subcommand, ValueEnum};

/// Boundary-condition-satisfying Gaussian kernels for linear BVPs on boxes.
#[derive(Parser)]
#[command(name = "bcrbf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one example and report its error.
    Solve {
        #[command(flatten)]
        common: Common,
        /// Shape parameter c (defaults to the example's table value).
        #[arg(long)]
        shape: Option<f64>,
    },
    /// Run over log-spaced shape parameters.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.01)]
        shape_min: f64,
        #[arg(long, default_value_t = 2.0)]
        shape_max: f64,
        #[arg(long, default_value_t = 30)]
        steps: usize,
        /// Parallel solves.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Print the example registry with the reference errors.
    List,
}

#[derive(clap::Args)]
struct Common {
    #[arg(long)]
    example: ExampleId,
    /// Grid as N, NxM or NxMxK; a single N is used on every axis.
    #[arg(long)]
    n: Option<String>,
    /// Only used by ex1.
    #[arg(long, default_value_t = DEFAULT_EPS)]
    eps: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Constrained)]
    method: MethodArg,
    /// f64, mp or mp:<digits>.
    #[arg(long, env = "BCRBF_PRECISION", default_value = "f64")]
    precision: Precision,
    /// Linear solve route of the constrained method: ps or direct.
    #[arg(long, default_value = "ps")]
    mode: SolveMode,
    /// Node placement of the constrained method: uniform, chebyshev or closed
    /// (defaults to the example's own choice).
    #[arg(long)]
    scheme: Option<GridScheme>,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Write the table here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write 0 in the seconds column so reruns are byte-identical.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Constrained,
    Kansa,
    Both,
}

impl MethodArg {
    fn methods(self) -> Vec<Method> {
        match self {
            MethodArg::Constrained => vec![Method::Constrained],
            MethodArg::Kansa => vec![Method::Kansa],
            MethodArg::Both => vec![Method::Constrained, Method::Kansa],
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Markdown,
}

impl Common {
    fn counts(&self) -> Result<Vec<usize>> {
        let dim = self.example.dim();
        let Some(text) = &self.n else {
            return Ok(self.example.default_grid());
        };
        let mut counts = report::parse_grid(text)?;
        if counts.len() == 1 {
            counts = vec![counts[0]; dim];
        }
        if counts.len() != dim {
            bail!("{} is {dim}-dimensional but --n {text} has {} counts", self.example, counts.len());
        }
        Ok(counts)
    }

    fn check(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            bail!("--eps must be positive");
        }
        if self.eps == 1.0 {
            bail!("--eps 1 makes the ex1 solution formula singular");
        }
        Ok(())
    }

    fn write(&self, mut reports: Vec<RunReport>) -> Result<ExitCode> {
        if self.no_timing {
            reports.iter_mut().for_each(|r| r.seconds = 0.0);
        }
        let format = match self.format {
            FormatArg::Csv => Format::Csv,
            FormatArg::Markdown => Format::Markdown,
        };
        let text = report::emit(&reports, format);
        match &self.out {
            Some(path) => fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?,
            None => std::io::stdout().write_all(text.as_bytes())?,
        }
        let mut failed = false;
        for r in reports.iter().filter(|r| !r.succeeded()) {
            failed = true;
            eprintln!("{} {} c={}: {}", r.example, r.method, r.shape, r.failure.as_deref().unwrap_or("failed"));
        }
        Ok(if failed { ExitCode::from(3) } else { ExitCode::SUCCESS })
    }
}

fn list() -> String {
    let mut out = String::new();
    for id in ExampleId::ALL {
        out += &format!("{id}  {}D  {}\n", id.dim(), id.description());
        out += &format!(
            "    default grid {}, shape constrained {} / kansa {}\n",
            report::grid_label(&id.default_grid()),
            id.default_shape(Method::Constrained),
            id.default_shape(Method::Kansa)
        );
        for line in reference_lines(id) {
            out += &format!("    {line}\n");
        }
    }
    out
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::List => {
            // a closed pipe (e.g. `| head`) is not an error
            let _ = std::io::stdout().write_all(list().as_bytes());
            Ok(ExitCode::SUCCESS)
        }
        Command::Solve { common, shape } => {
            common.check()?;
            let counts = common.counts()?;
            if let Some(c) = shape {
                if !(c > 0.0 && c.is_finite()) {
                    bail!("--shape must be positive");
                }
            }
            let reports = common
                .method
                .methods()
                .into_iter()
                .map(|m| {
                    let c = shape.unwrap_or_else(|| common.example.default_shape(m));
                    let cfg = RunConfig::new(common.example, m, counts.clone(), c, common.precision)
                        .eps(common.eps)
                        .mode(common.mode)
                        .scheme(common.scheme.unwrap_or(common.example.default_scheme()));
                    run_example(&cfg)
                })
                .collect();
            common.write(reports)
        }
        Command::Sweep { common, shape_min, shape_max, steps, jobs } => {
            common.check()?;
            let cfg = SweepConfig {
                example: common.example,
                methods: common.method.methods(),
                counts: common.counts()?,
                shape_min,
                shape_max,
                steps,
                precision: common.precision,
                eps: common.eps,
                mode: common.mode,
                scheme: common.scheme.unwrap_or(common.example.default_scheme()),
                jobs,
            };
            let reports = run_sweep(&cfg)?;
            common.write(reports)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
