//! Benchmark suites: TOML in, one result per (row, seed, strategy) out.
//!
//! ```toml
//! [[rows]]
//! n = 8
//! k = 3
//! eps = 0.5
//! dist = "clustered"
//! seeds = [1, 2, 3]
//! strategies = ["exact", "heuristic", "reduced-exact"]
//! ```

use std::fmt::Write as _;
use std::time::Instant;

use ktc_core::pipeline::{
    solve, solve_direct, BaseKind, BaseSolverChoice, ReductionMode, SolveOptions,
};
use ktc_core::{exact_ktc, lower_bound, Instance, OracleLimits};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::gen::{generate, PointDistribution};

/// Instances up to this size are compared against the exact optimum.
pub const EXACT_REFERENCE_LIMIT: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Exact,
    Heuristic,
    ReducedExact,
    ReducedHeuristic,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Exact => "exact",
            Strategy::Heuristic => "heuristic",
            Strategy::ReducedExact => "reduced-exact",
            Strategy::ReducedHeuristic => "reduced-heuristic",
        }
    }
}

fn default_eps() -> f64 {
    0.25
}

fn default_dist() -> PointDistribution {
    PointDistribution::UniformDisk
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteRow {
    pub n: usize,
    pub k: usize,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "default_dist")]
    pub dist: PointDistribution,
    pub seeds: Vec<u64>,
    pub strategies: Vec<Strategy>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Suite {
    pub rows: Vec<SuiteRow>,
}

pub fn parse_suite(text: &str) -> Result<Suite, toml::de::Error> {
    toml::from_str(text)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceKind {
    Optimum,
    LowerBound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub row: usize,
    pub n: usize,
    pub k: usize,
    pub eps: f64,
    pub dist: PointDistribution,
    pub seed: u64,
    pub strategy: Strategy,
    pub cost: Option<f64>,
    pub lower_bound: f64,
    pub reference: f64,
    pub reference_kind: ReferenceKind,
    /// cost / reference.
    pub ratio: Option<f64>,
    pub wall_ms: f64,
    pub error: Option<String>,
}

fn run_strategy(instance: &Instance, strategy: Strategy, eps: f64) -> ktc_core::Result<f64> {
    let limits = OracleLimits::default();
    let reduced = |base| {
        solve(
            instance,
            &SolveOptions {
                epsilon: eps,
                base,
                mode: ReductionMode::Refined,
            },
        )
    };
    let s = match strategy {
        Strategy::Exact => solve_direct(instance, BaseKind::Exact, &limits)?,
        Strategy::Heuristic => solve_direct(instance, BaseKind::Heuristic, &limits)?,
        Strategy::ReducedExact => reduced(BaseSolverChoice::exact())?,
        Strategy::ReducedHeuristic => reduced(BaseSolverChoice::heuristic())?,
    };
    Ok(s.cost)
}

struct Case {
    row: usize,
    seed: u64,
    instance: ktc_core::Result<Instance>,
    lower_bound: f64,
    reference: f64,
    reference_kind: ReferenceKind,
}

fn prepare(row: usize, row_cfg: &SuiteRow, seed: u64) -> Case {
    let instance = generate(row_cfg.n, row_cfg.k, seed, row_cfg.dist);
    let (lower_bound, reference, reference_kind) = match &instance {
        Ok(inst) => {
            let lb = lower_bound(inst);
            let exact = (inst.len() <= EXACT_REFERENCE_LIMIT)
                .then(|| exact_ktc(inst, &OracleLimits::default()).ok())
                .flatten();
            match exact {
                Some(s) => (lb, s.cost, ReferenceKind::Optimum),
                None => (lb, lb, ReferenceKind::LowerBound),
            }
        }
        Err(_) => (0.0, 0.0, ReferenceKind::LowerBound),
    };
    Case {
        row,
        seed,
        instance,
        lower_bound,
        reference,
        reference_kind,
    }
}

/// Runs every (row, seed, strategy) in parallel; results keep suite order
/// and failures are recorded rather than aborting the suite.
pub fn run_suite(suite: &Suite) -> Vec<BenchResult> {
    let cases: Vec<(usize, u64)> = suite
        .rows
        .iter()
        .enumerate()
        .flat_map(|(r, row)| row.seeds.iter().map(move |&s| (r, s)))
        .collect();
    let prepared: Vec<Case> = cases
        .par_iter()
        .map(|&(r, seed)| prepare(r, &suite.rows[r], seed))
        .collect();

    let jobs: Vec<(&Case, Strategy)> = prepared
        .iter()
        .flat_map(|c| suite.rows[c.row].strategies.iter().map(move |&s| (c, s)))
        .collect();
    jobs.par_iter()
        .map(|&(case, strategy)| {
            let row_cfg = &suite.rows[case.row];
            let start = Instant::now();
            let outcome = match &case.instance {
                Ok(inst) => run_strategy(inst, strategy, row_cfg.eps),
                Err(e) => Err(ktc_core::KtcError::Invariant(e.to_string())),
            };
            let wall_ms = start.elapsed().as_secs_f64() * 1e3;
            let (cost, error) = match outcome {
                Ok(c) => (Some(c), None),
                Err(e) => (None, Some(e.to_string())),
            };
            let ratio = cost.map(|c| {
                if case.reference > 0.0 {
                    c / case.reference
                } else {
                    1.0
                }
            });
            BenchResult {
                row: case.row,
                n: row_cfg.n,
                k: row_cfg.k,
                eps: row_cfg.eps,
                dist: row_cfg.dist,
                seed: case.seed,
                strategy,
                cost,
                lower_bound: case.lower_bound,
                reference: case.reference,
                reference_kind: case.reference_kind,
                ratio,
                wall_ms,
                error,
            }
        })
        .collect()
}

pub fn format_table(results: &[BenchResult]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>4} {:>7} {:>4} {:>5} {:>13} {:>6} {:>18} {:>14} {:>14} {:>9} {:>10}",
        "row", "n", "k", "eps", "dist", "seed", "strategy", "cost", "lower bound", "ratio", "ms"
    );
    for r in results {
        let cost = r.cost.map_or_else(|| "-".into(), |c| format!("{c:.6}"));
        let ratio = match (r.ratio, r.reference_kind) {
            (Some(x), ReferenceKind::Optimum) => format!("{x:.4}"),
            (Some(x), ReferenceKind::LowerBound) => format!("{x:.4}*"),
            (None, _) => "-".into(),
        };
        let _ = writeln!(
            out,
            "{:>4} {:>7} {:>4} {:>5} {:>13} {:>6} {:>18} {:>14} {:>14.6} {:>9} {:>10.2}",
            r.row,
            r.n,
            r.k,
            r.eps,
            r.dist.name(),
            r.seed,
            r.strategy.name(),
            cost,
            r.lower_bound,
            ratio,
            r.wall_ms
        );
        if let Some(e) = &r.error {
            let _ = writeln!(out, "     error: {e}");
        }
    }
    let _ = writeln!(out, "ratios marked * are against the lower bound, others against the optimum");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SUITE: &str = r#"
[[rows]]
n = 7
k = 3
seeds = [1]
strategies = ["exact"]

[[rows]]
n = 9
k = 2
eps = 0.5
dist = "annulus"
seeds = [4]
strategies = ["heuristic"]

[[rows]]
n = 30
k = 3
seeds = [2]
strategies = ["reduced-exact"]
"#;

    #[test]
    fn three_rows_three_results() {
        let suite = parse_suite(SUITE).unwrap();
        let res = run_suite(&suite);
        assert_eq!(res.len(), 3);
        assert!((res[0].ratio.unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(res[0].reference_kind, ReferenceKind::Optimum);
        assert!(res[1].ratio.unwrap() <= 3.0 - 2.0 / 2.0 + 1e-9);
        // 30 points overflow the exact base: recorded, suite continues
        assert!(res[2].error.is_some());
        assert_eq!(res[2].reference_kind, ReferenceKind::LowerBound);
        assert!(format_table(&res).contains("error"));
    }

    #[test]
    fn unknown_strategy_is_rejected() {
        assert!(parse_suite("[[rows]]\nn=1\nk=1\nseeds=[1]\nstrategies=[\"magic\"]\n").is_err());
    }
}
