use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use ktc_core::heuristics::bounds;
use ktc_core::pipeline::{
    reduce, reduce_global, solve_direct, solve_with_report, BaseKind, BaseSolverChoice,
    ReductionMode, ReductionResult, SolveOptions,
};
use ktc_core::{exact_ktc, lower_bound, validate, Instance, OracleLimits, Solution};

use crate::bench::{format_table, parse_suite, run_suite};
use crate::error::{CliError, CliResult};
use crate::format::{emit_instance, read_instance, read_solution, SolutionFile, SolutionMeta};
use crate::gen::{describe, generate, PointDistribution};
use crate::render::{render_svg, GridOverlay};

#[derive(Debug, Parser)]
#[command(name = "ktc", version, about = "Euclidean k-tour cover solver")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BaseArg {
    Exact,
    Heuristic,
}

impl From<BaseArg> for BaseKind {
    fn from(b: BaseArg) -> Self {
        match b {
            BaseArg::Exact => BaseKind::Exact,
            BaseArg::Heuristic => BaseKind::Heuristic,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve an instance and write a solution file.
    Solve {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0.25)]
        eps: f64,
        #[arg(long, value_enum, default_value_t = BaseArg::Heuristic)]
        base: BaseArg,
        /// Skip the reduction and run the base solver on the raw instance.
        #[arg(long)]
        direct: bool,
        /// Cap once with the full grid instead of marking rings.
        #[arg(long, conflicts_with = "direct")]
        global: bool,
    },
    /// Run the reduction and report what it produced.
    Reduce {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0.25)]
        eps: f64,
        #[arg(long)]
        global: bool,
    },
    /// Print lower and upper bounds on the optimum.
    Lb {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Solve small instances to optimality.
    Exact {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a solution file against its instance.
    Validate {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        solution: PathBuf,
    },
    /// Generate a seeded random instance.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = PointDistribution::UniformDisk)]
        dist: PointDistribution,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw an instance, optionally with a solution and the location grid.
    Render {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        solution: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        show_grid: bool,
        #[arg(long, default_value_t = 0.25)]
        eps: f64,
    },
    /// Run a TOML benchmark suite.
    Bench {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn write_out(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Writes to `path`, or to standard output without one.
fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => write_out(p, text),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io("<stdout>", e)),
    }
}

fn print_summary(cost: f64, lb: f64) {
    println!("cost {cost:?}");
    println!("lower_bound {lb:?}");
    let ratio = if lb > 0.0 { cost / lb } else { 1.0 };
    println!("ratio {ratio:?}");
}

fn cmd_solve(
    input: &Path,
    out: Option<&Path>,
    eps: f64,
    base: BaseArg,
    direct: bool,
    global: bool,
) -> CliResult<()> {
    let instance = read_instance(input)?;
    let base_kind = BaseKind::from(base);
    let (solution, meta, lb) = if direct {
        let s = solve_direct(&instance, base_kind, &OracleLimits::default())?;
        let lb = lower_bound(&instance);
        let meta = SolutionMeta {
            base: format!("direct-{}", base_name(base_kind)),
            epsilon: None,
            lower_bound: Some(lb),
            segment_bases: Vec::new(),
            provenance: None,
        };
        (s, meta, lb)
    } else {
        let options = SolveOptions {
            epsilon: eps,
            base: BaseSolverChoice {
                kind: base_kind,
                limits: OracleLimits::default(),
            },
            mode: if global {
                ReductionMode::Global
            } else {
                ReductionMode::Refined
            },
        };
        let report = solve_with_report(&instance, &options)?;
        let meta = SolutionMeta {
            base: base_name(base_kind).into(),
            epsilon: Some(eps),
            lower_bound: Some(report.lower_bound),
            segment_bases: report.segment_bases,
            provenance: Some(report.provenance),
        };
        (report.solution, meta, report.lower_bound)
    };
    if let Some(path) = out {
        write_out(path, &SolutionFile::new(&solution, meta).to_json())?;
    }
    print_summary(solution.cost, lb);
    Ok(())
}

fn base_name(kind: BaseKind) -> &'static str {
    match kind {
        BaseKind::Exact => "exact",
        BaseKind::Heuristic => "heuristic",
    }
}

fn run_reduction(instance: &Instance, eps: f64, global: bool) -> CliResult<ReductionResult> {
    Ok(if global {
        reduce_global(instance, eps)?
    } else {
        reduce(instance, eps)?
    })
}

fn cmd_reduce(input: &Path, out: Option<&Path>, eps: f64, global: bool) -> CliResult<()> {
    let instance = read_instance(input)?;
    let r = run_reduction(&instance, eps, global)?;
    let json = serde_json::to_string_pretty(&r.provenance).expect("provenance serializes") + "\n";
    match out {
        Some(p) => {
            write_out(p, &json)?;
            let p = &r.provenance;
            println!("segments {}", p.segment_count);
            println!("segment_points {}", r.segment_point_total());
            println!("stripped {}", p.stripped_points);
            println!("marked {}", p.marked_points);
            println!("capped {}", p.capped_points);
            Ok(())
        }
        None => emit(None, &json),
    }
}

fn cmd_lb(input: &Path) -> CliResult<()> {
    let instance = read_instance(input)?;
    let b = bounds(&instance);
    println!("radial {:?}", b.radial);
    println!("lower_bound {:?}", b.opt_lower);
    println!("tsp_tour {:?}", b.tsp_upper);
    println!("upper_bound {:?}", b.opt_upper);
    Ok(())
}

fn cmd_exact(input: &Path, out: Option<&Path>) -> CliResult<()> {
    let instance = read_instance(input)?;
    let s = exact_ktc(&instance, &OracleLimits::default())?;
    if let Some(p) = out {
        let meta = SolutionMeta {
            base: "exact".into(),
            epsilon: None,
            lower_bound: None,
            segment_bases: Vec::new(),
            provenance: None,
        };
        write_out(p, &SolutionFile::new(&s, meta).to_json())?;
    }
    println!("cost {:?}", s.cost);
    Ok(())
}

fn cmd_validate(input: &Path, solution: &Path) -> CliResult<()> {
    let instance = read_instance(input)?;
    let file = read_solution(solution)?;
    let s = Solution {
        tours: file.tours(),
        cost: file.cost,
    };
    let report = validate(&instance, &s);
    if report.is_feasible() {
        println!("feasible cost {:?} tours {}", s.cost, s.tours.len());
        Ok(())
    } else {
        Err(CliError::Input(format!(
            "{} does not solve {}: {report}",
            solution.display(),
            input.display()
        )))
    }
}

fn cmd_gen(n: usize, k: usize, seed: u64, dist: PointDistribution, out: Option<&Path>) -> CliResult<()> {
    let instance = generate(n, k, seed, dist)?;
    emit(out, &emit_instance(&instance, &[describe(n, k, seed, dist)]))
}

fn cmd_render(
    input: &Path,
    solution: Option<&Path>,
    out: &Path,
    show_grid: bool,
    eps: f64,
) -> CliResult<()> {
    let instance = read_instance(input)?;
    let solution = match solution {
        Some(p) => {
            let file = read_solution(p)?;
            Some(Solution::new(&instance, file.tours())?)
        }
        None => None,
    };
    let reduction = if show_grid {
        Some(reduce(&instance, eps)?)
    } else {
        None
    };
    let overlay = reduction.as_ref().and_then(|r| {
        r.grid.as_ref().map(|grid| GridOverlay {
            grid,
            layout: r.layout.as_ref(),
            partition: r.marking.as_ref().map(|m| &m.partition),
        })
    });
    write_out(out, &render_svg(&instance, solution.as_ref(), overlay.as_ref()))
}

fn cmd_bench(input: &Path, out: Option<&Path>) -> CliResult<()> {
    let text = fs::read_to_string(input).map_err(|e| CliError::io(input, e))?;
    let suite = parse_suite(&text).map_err(|e| CliError::Parse {
        path: input.to_path_buf(),
        line: e
            .span()
            .map_or(0, |s| text[..s.start].matches('\n').count() + 1),
        message: e.message().to_string(),
    })?;
    let results = run_suite(&suite);
    if let Some(p) = out {
        let json = serde_json::to_string_pretty(&results).expect("results serialize") + "\n";
        write_out(p, &json)?;
    }
    print!("{}", format_table(&results));
    Ok(())
}

pub fn run(cli: Cli) -> CliResult<()> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build_global()
            .map_err(|e| CliError::Input(format!("cannot set thread count: {e}")))?;
    }
    match cli.command {
        Command::Solve {
            input,
            out,
            eps,
            base,
            direct,
            global,
        } => cmd_solve(&input, out.as_deref(), eps, base, direct, global),
        Command::Reduce {
            input,
            out,
            eps,
            global,
        } => cmd_reduce(&input, out.as_deref(), eps, global),
        Command::Lb { input } => cmd_lb(&input),
        Command::Exact { input, out } => cmd_exact(&input, out.as_deref()),
        Command::Validate { input, solution } => cmd_validate(&input, &solution),
        Command::Gen {
            n,
            k,
            seed,
            dist,
            out,
        } => cmd_gen(n, k, seed, dist, out.as_deref()),
        Command::Render {
            input,
            solution,
            out,
            show_grid,
            eps,
        } => cmd_render(&input, solution.as_deref(), &out, show_grid, eps),
        Command::Bench { input, out } => cmd_bench(&input, out.as_deref()),
    }
}
