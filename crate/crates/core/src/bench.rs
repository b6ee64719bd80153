//! Error and timing sweeps over `N`, CSV I/O, and convergence-slope reports.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linear_system::{assemble_nystrom, assemble_rz, lu_solve};
use crate::problem::{self, VolterraProblem};
use crate::solvers::{
    discretize, solve_collocation, solve_rz, Approximant, CollocationSolution, Method,
    NystromSolution, RzSolution,
};
use crate::transforms::{MeshParameters, TransformKind};

/// Repetitions per timed phase; the median is reported.
pub const TIMING_REPETITIONS: usize = 3;

pub const DEFAULT_PROBE_POINTS: usize = 2048;

/// Tolerance factor for the node-coincidence check, scaled by `1 + max|u|`.
pub const NODE_COINCIDENCE_TOLERANCE: f64 = 1e-9;

/// One row of a sweep. `failure` is not part of the CSV format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub method: Method,
    #[serde(rename = "problem")]
    pub problem_id: String,
    #[serde(rename = "N")]
    pub truncation: usize,
    pub h: f64,
    pub max_error: f64,
    pub assemble_ms: f64,
    pub solve_ms: f64,
    pub eval_ms: f64,
    pub probe_points: usize,
    #[serde(skip)]
    pub failure: Option<String>,
}

impl ExperimentRecord {
    pub fn eval_ms_per_point(&self) -> f64 {
        self.eval_ms / self.probe_points as f64
    }
}

/// Named problems available to sweeps. Starts with the built-in benchmarks.
#[derive(Clone)]
pub struct ProblemRegistry {
    problems: HashMap<String, VolterraProblem>,
}

impl Default for ProblemRegistry {
    fn default() -> Self {
        let problems = problem::BUILTIN_PROBLEMS
            .iter()
            .map(|id| (id.to_string(), problem::builtin(id).expect("builtin")))
            .collect();
        Self { problems }
    }
}

impl ProblemRegistry {
    pub fn register(&mut self, id: impl Into<String>, problem: VolterraProblem) {
        self.problems.insert(id.into(), problem);
    }

    pub fn get(&self, id: &str) -> Result<&VolterraProblem> {
        self.problems.get(id).ok_or_else(|| {
            let mut known: Vec<_> = self.problems.keys().cloned().collect();
            known.sort();
            Error::Usage(format!(
                "unknown problem '{id}' (known: {})",
                known.join(", ")
            ))
        })
    }
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub method: Method,
    pub problem_id: String,
    pub n_list: Vec<usize>,
    pub probe_points: usize,
    pub d_override: Option<f64>,
    pub alpha_override: Option<f64>,
    /// Run the `N` values one after another so timings are not disturbed.
    pub timed: bool,
}

impl SweepConfig {
    pub fn new(method: Method, problem_id: impl Into<String>, n_list: Vec<usize>) -> Self {
        Self {
            method,
            problem_id: problem_id.into(),
            n_list,
            probe_points: DEFAULT_PROBE_POINTS,
            d_override: None,
            alpha_override: None,
            timed: false,
        }
    }
}

/// `count` equally spaced points on `[a, b]`, both endpoints included.
pub fn probe_grid(a: f64, b: f64, count: usize) -> Vec<f64> {
    let step = (b - a) / (count - 1) as f64;
    (0..count)
        .map(|i| {
            if i + 1 == count {
                b
            } else {
                a + step * i as f64
            }
        })
        .collect()
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    xs[xs.len() / 2]
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

struct Measurement {
    h: f64,
    max_error: f64,
    assemble_ms: f64,
    solve_ms: f64,
    eval_ms: f64,
}

fn measure_once(
    problem: &VolterraProblem,
    method: Method,
    truncation: usize,
    probes: &[f64],
) -> Result<Measurement> {
    let start = Instant::now();
    let (transform, grid) = discretize(problem, method.kind(), truncation)?;
    let sys = match method {
        Method::RzCollocation => assemble_rz(problem, &transform, &grid)?,
        _ => assemble_nystrom(problem, &transform, &grid)?,
    };
    let assemble_ms = elapsed_ms(start);

    let start = Instant::now();
    let coeffs = lu_solve(&sys.matrix, &sys.rhs)?;
    let approx = match method {
        Method::SeNystrom | Method::DeNystrom => Approximant::Nystrom(
            NystromSolution::from_coefficients(problem, transform, grid, coeffs)?,
        ),
        Method::SeCollocation | Method::DeCollocation => {
            let nystrom = NystromSolution::from_coefficients(problem, transform, grid, coeffs)?;
            Approximant::Collocation(CollocationSolution::from_nystrom(&nystrom))
        }
        Method::RzCollocation => {
            Approximant::Rz(RzSolution::from_coefficients(transform, grid, coeffs)?)
        }
    };
    let solve_ms = elapsed_ms(start);

    let start = Instant::now();
    let mut max_error = 0.0f64;
    for &t in probes {
        let exact = problem.exact(t).ok_or_else(|| {
            Error::Usage("problem has no exact solution to measure against".into())
        })?;
        max_error = max_error.max((approx.evaluate(t)? - exact).abs());
    }
    let eval_ms = elapsed_ms(start);

    Ok(Measurement {
        h: grid.step(),
        max_error,
        assemble_ms,
        solve_ms,
        eval_ms,
    })
}

fn measure(
    problem: &VolterraProblem,
    method: Method,
    truncation: usize,
    probes: &[f64],
) -> Result<Measurement> {
    let runs = (0..TIMING_REPETITIONS)
        .map(|_| measure_once(problem, method, truncation, probes))
        .collect::<Result<Vec<_>>>()?;
    Ok(Measurement {
        h: runs[0].h,
        max_error: runs[0].max_error,
        assemble_ms: median(runs.iter().map(|m| m.assemble_ms).collect()),
        solve_ms: median(runs.iter().map(|m| m.solve_ms).collect()),
        eval_ms: median(runs.iter().map(|m| m.eval_ms).collect()),
    })
}

/// Applies `--d` / `--alpha` overrides to the mesh parameters of the method's transform.
fn configured_problem(registry: &ProblemRegistry, config: &SweepConfig) -> Result<VolterraProblem> {
    let base = registry.get(&config.problem_id)?;
    if !base.has_exact() {
        return Err(Error::Usage(format!(
            "problem '{}' has no exact solution to measure against",
            config.problem_id
        )));
    }
    let kind = config.method.kind();
    let mesh = base.mesh(kind);
    let mesh = MeshParameters {
        d: config.d_override.unwrap_or(mesh.d),
        alpha: config.alpha_override.unwrap_or(mesh.alpha),
    };
    base.clone()
        .with_mesh(kind, mesh)
        .map_err(|e| Error::Usage(e.to_string()))
}

/// Solves for every `N` in the list and records the maximum error over the
/// probe grid together with median phase timings.
///
/// Solver failures become rows with `max_error = NaN` and `failure` set;
/// configuration problems are returned as [`Error::Usage`].
pub fn run_sweep(
    registry: &ProblemRegistry,
    config: &SweepConfig,
) -> Result<Vec<ExperimentRecord>> {
    if config.n_list.is_empty() {
        return Err(Error::Usage("N list is empty".into()));
    }
    if config.n_list.windows(2).any(|w| w[0] >= w[1]) || config.n_list[0] == 0 {
        return Err(Error::Usage(
            "N list must be positive and strictly increasing".into(),
        ));
    }
    if config.probe_points < 2 {
        return Err(Error::Usage("at least 2 probe points are required".into()));
    }
    let problem = configured_problem(registry, config)?;
    let probes = probe_grid(problem.a(), problem.b(), config.probe_points);

    let row = |&truncation: &usize| {
        let record = |m: Result<Measurement>| match m {
            Ok(m) => ExperimentRecord {
                method: config.method,
                problem_id: config.problem_id.clone(),
                truncation,
                h: m.h,
                max_error: m.max_error,
                assemble_ms: m.assemble_ms,
                solve_ms: m.solve_ms,
                eval_ms: m.eval_ms,
                probe_points: config.probe_points,
                failure: None,
            },
            Err(e) => ExperimentRecord {
                method: config.method,
                problem_id: config.problem_id.clone(),
                truncation,
                h: discretize(&problem, config.method.kind(), truncation)
                    .map_or(f64::NAN, |(_, g)| g.step()),
                max_error: f64::NAN,
                assemble_ms: 0.0,
                solve_ms: 0.0,
                eval_ms: 0.0,
                probe_points: config.probe_points,
                failure: Some(e.to_string()),
            },
        };
        record(measure(&problem, config.method, truncation, &probes))
    };

    let mut records: Vec<ExperimentRecord> = if config.timed {
        config.n_list.iter().map(row).collect()
    } else {
        config.n_list.par_iter().map(row).collect()
    };
    records.sort_by_key(|r| r.truncation);
    Ok(records)
}

/// Writes the CSV header and one line per record.
pub fn emit_csv<W: Write>(records: &[ExperimentRecord], destination: W) -> Result<()> {
    if records.is_empty() {
        return Err(Error::Usage("no records to write".into()));
    }
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(destination);
    for r in records {
        writer.serialize(r)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn parse_csv<R: Read>(source: R) -> Result<Vec<ExperimentRecord>> {
    let mut reader = csv::Reader::from_reader(source);
    reader
        .deserialize()
        .map(|r| r.map_err(|e: csv::Error| Error::Usage(format!("malformed CSV: {e}"))))
        .collect()
}

/// Abscissa against which `log(error)` is expected to be linear:
/// `√N` for SE methods and `N / log(2dN/α)` for DE methods.
pub fn convergence_abscissa(kind: TransformKind, truncation: usize, mesh: MeshParameters) -> f64 {
    let n = truncation as f64;
    match kind {
        TransformKind::Se => n.sqrt(),
        TransformKind::De => n / (2.0 * mesh.d * n / mesh.alpha).ln(),
    }
}

/// Predicted slope of `log(error)` against [`convergence_abscissa`]:
/// `-√(πdα)` (SE) or `-πd` (DE).
pub fn theoretical_slope(kind: TransformKind, mesh: MeshParameters) -> f64 {
    match kind {
        TransformKind::Se => -(PI * mesh.d * mesh.alpha).sqrt(),
        TransformKind::De => -PI * mesh.d,
    }
}

/// Ordinary least-squares slope.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (sxy, sxx) = xs.iter().zip(ys).fold((0.0, 0.0), |(sxy, sxx), (x, y)| {
        (sxy + (x - mx) * (y - my), sxx + (x - mx) * (x - mx))
    });
    sxy / sxx
}

/// Largest `|u|` of the exact solution over the default probe grid, or 1 when unknown.
fn solution_magnitude(problem: &VolterraProblem) -> f64 {
    probe_grid(problem.a(), problem.b(), DEFAULT_PROBE_POINTS)
        .into_iter()
        .filter_map(|t| problem.exact(t))
        .fold(0.0f64, |m, u| m.max(u.abs()))
        .max(f64::MIN_POSITIVE)
}

/// Rows whose error is above the floating-point floor `100 ε max|u|`.
pub fn above_noise_floor(records: &[ExperimentRecord], magnitude: f64) -> Vec<&ExperimentRecord> {
    let floor = 1e2 * f64::EPSILON * magnitude;
    records
        .iter()
        .filter(|r| r.max_error.is_finite() && r.max_error > floor)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlopeFit {
    pub method: Method,
    pub problem_id: String,
    pub fitted: f64,
    pub theoretical: f64,
    pub points: usize,
}

impl SlopeFit {
    pub fn relative_deviation(&self) -> f64 {
        (self.fitted - self.theoretical).abs() / self.theoretical.abs()
    }
}

/// Fits convergence slopes for every `(method, problem)` group spanning at least four distinct `N`.
pub fn fit_slopes(
    registry: &ProblemRegistry,
    records: &[ExperimentRecord],
) -> Result<Vec<SlopeFit>> {
    let mut groups: BTreeMap<(String, String), Vec<ExperimentRecord>> = BTreeMap::new();
    for r in records {
        groups
            .entry((r.method.as_str().to_string(), r.problem_id.clone()))
            .or_default()
            .push(r.clone());
    }
    let mut fits = Vec::new();
    for ((method, problem_id), rows) in groups {
        let distinct: BTreeSet<usize> = rows.iter().map(|r| r.truncation).collect();
        if distinct.len() < 4 {
            continue;
        }
        let method: Method = method.parse()?;
        let problem = registry.get(&problem_id)?;
        let kind = method.kind();
        let mesh = problem.mesh(kind);
        let kept = above_noise_floor(&rows, solution_magnitude(problem));
        if kept.len() < 2 {
            continue;
        }
        let xs: Vec<f64> = kept
            .iter()
            .map(|r| convergence_abscissa(kind, r.truncation, mesh))
            .collect();
        let ys: Vec<f64> = kept.iter().map(|r| r.max_error.ln()).collect();
        fits.push(SlopeFit {
            method,
            problem_id,
            fitted: least_squares_slope(&xs, &ys),
            theoretical: theoretical_slope(kind, mesh),
            points: kept.len(),
        });
    }
    if fits.is_empty() {
        return Err(Error::Usage(
            "slope report needs at least 4 distinct N for one (method, problem) pair".into(),
        ));
    }
    Ok(fits)
}

/// Human-readable slope table plus per-point evaluation cost of Nyström versus collocation.
pub fn report_slopes(registry: &ProblemRegistry, records: &[ExperimentRecord]) -> Result<String> {
    let fits = fit_slopes(registry, records)?;
    let mut out = String::new();
    writeln!(
        out,
        "{:<11} {:<8} {:>6} {:>10} {:>12} {:>10}",
        "method", "problem", "points", "fitted", "theoretical", "deviation"
    )
    .unwrap();
    for f in &fits {
        let abscissa = match f.method.kind() {
            TransformKind::Se => "sqrt(N)",
            TransformKind::De => "N/log(2dN/alpha)",
        };
        writeln!(
            out,
            "{:<11} {:<8} {:>6} {:>10.4} {:>12.4} {:>9.1}%   (log error vs {abscissa})",
            f.method.as_str(),
            f.problem_id,
            f.points,
            f.fitted,
            f.theoretical,
            100.0 * f.relative_deviation()
        )
        .unwrap();
    }

    let pairs = [
        (Method::SeNystrom, Method::SeCollocation),
        (Method::SeNystrom, Method::RzCollocation),
        (Method::DeNystrom, Method::DeCollocation),
    ];
    let lookup: HashMap<(Method, &str, usize), &ExperimentRecord> = records
        .iter()
        .filter(|r| r.failure.is_none() && r.eval_ms > 0.0)
        .map(|r| ((r.method, r.problem_id.as_str(), r.truncation), r))
        .collect();
    let mut cost_lines = Vec::new();
    for (nys, col) in pairs {
        let mut keys: Vec<_> = lookup
            .keys()
            .filter(|(m, _, _)| *m == nys)
            .map(|(_, p, n)| (*p, *n))
            .collect();
        keys.sort();
        for (problem_id, n) in keys {
            if let Some(c) = lookup.get(&(col, problem_id, n)) {
                let a = lookup[&(nys, problem_id, n)];
                cost_lines.push(format!(
                    "{:<8} N={:<4} {} {:.3e} ms/pt  vs  {} {:.3e} ms/pt  speedup {:.1}x",
                    problem_id,
                    n,
                    nys,
                    a.eval_ms_per_point(),
                    col,
                    c.eval_ms_per_point(),
                    a.eval_ms_per_point() / c.eval_ms_per_point()
                ));
            }
        }
    }
    if !cost_lines.is_empty() {
        writeln!(out, "\nevaluation cost per point:").unwrap();
        for line in cost_lines {
            writeln!(out, "{line}").unwrap();
        }
    }
    Ok(out)
}

/// Node values of SE-Sinc-collocation versus bordered collocation.
#[derive(Debug, Clone, Copy)]
pub struct NodeComparison {
    pub max_discrepancy: f64,
    pub max_abs_value: f64,
    /// Gap between the two approximants at the left endpoint.
    pub endpoint_gap: f64,
}

impl NodeComparison {
    pub fn tolerance(&self) -> f64 {
        NODE_COINCIDENCE_TOLERANCE * (1.0 + self.max_abs_value)
    }

    pub fn coincide(&self) -> bool {
        self.max_discrepancy <= self.tolerance()
    }
}

pub fn compare_collocation_nodes(
    problem: &VolterraProblem,
    truncation: usize,
) -> Result<NodeComparison> {
    let col = solve_collocation(problem, TransformKind::Se, truncation)?;
    let rz = solve_rz(problem, truncation)?;
    let h = col.grid().step();
    let mut max_discrepancy = 0.0f64;
    let mut max_abs_value = 0.0f64;
    for j in col.grid().indices() {
        let x = j as f64 * h;
        let v = col.evaluate_transformed(x)?;
        let w = rz.evaluate_transformed(x)?;
        max_discrepancy = max_discrepancy.max((v - w).abs());
        max_abs_value = max_abs_value.max(v.abs());
    }
    let a = problem.a();
    let endpoint_gap = (col.evaluate(a)? - rz.evaluate(a)?).abs();
    Ok(NodeComparison {
        max_discrepancy,
        max_abs_value,
        endpoint_gap,
    })
}
