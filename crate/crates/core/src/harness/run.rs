//! Running the registered examples: single solves, shape sweeps and the
//! exact-solution self-check.

use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::harness::examples::{ExampleId, Method};
use crate::kansa::kansa_solve;
use crate::numerics::{Mp, Precision, Real};
use crate::pseudospectral::{
    error_on_metric_grid, solve, Diagnostics, ErrorReport, GridScheme, SolveMode, SolveOptions,
};

/// Default `ε` for ex1.
pub const DEFAULT_EPS: f64 = 0.03125;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub example: ExampleId,
    pub method: Method,
    pub counts: Vec<usize>,
    pub shape: f64,
    pub precision: Precision,
    /// Only used by ex1.
    pub eps: f64,
    pub mode: SolveMode,
    pub scheme: GridScheme,
}

impl RunConfig {
    pub fn new(example: ExampleId, method: Method, counts: Vec<usize>, shape: f64, precision: Precision) -> Self {
        RunConfig {
            example,
            method,
            counts,
            shape,
            precision,
            eps: DEFAULT_EPS,
            mode: SolveMode::default(),
            scheme: example.default_scheme(),
        }
    }

    pub fn eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    pub fn mode(mut self, mode: SolveMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn scheme(mut self, scheme: GridScheme) -> Self {
        self.scheme = scheme;
        self
    }
}

/// Outcome of one run. A failed run keeps its configuration, has NaN errors
/// and carries the error message.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub example: ExampleId,
    pub method: Method,
    pub grid: Vec<usize>,
    pub shape: f64,
    pub precision_digits: u32,
    pub max_abs_err: f64,
    pub rel_err: f64,
    pub cond_a: f64,
    pub cond_al: f64,
    pub seconds: f64,
    pub failure: Option<String>,
}

impl RunReport {
    pub fn succeeded(&self) -> bool {
        self.failure.is_none()
    }

    /// The error the example's reference table reports.
    pub fn reported_error(&self) -> f64 {
        match self.example.metric() {
            crate::harness::examples::Metric::MaxAbs => self.max_abs_err,
            crate::harness::examples::Metric::Relative => self.rel_err,
        }
    }
}

pub fn run_example(cfg: &RunConfig) -> RunReport {
    let start = Instant::now();
    let outcome = match cfg.precision {
        Precision::Binary64 => run_typed::<f64>(cfg),
        Precision::Digits(_) => run_typed::<Mp>(cfg),
    };
    let seconds = start.elapsed().as_secs_f64();
    let mut report = RunReport {
        example: cfg.example,
        method: cfg.method,
        grid: cfg.counts.clone(),
        shape: cfg.shape,
        precision_digits: cfg.precision.effective_digits(),
        max_abs_err: f64::NAN,
        rel_err: f64::NAN,
        cond_a: f64::NAN,
        cond_al: f64::NAN,
        seconds,
        failure: None,
    };
    match outcome {
        Ok((err, diag)) if err.max_abs.is_finite() => {
            report.max_abs_err = err.max_abs;
            report.rel_err = err.relative;
            report.cond_a = diag.cond_a;
            report.cond_al = diag.cond_system;
        }
        Ok(_) => report.failure = Some("solution is not finite".into()),
        Err(e) => report.failure = Some(e.to_string()),
    }
    report
}

fn run_typed<T: Real>(cfg: &RunConfig) -> Result<(ErrorReport, Diagnostics)> {
    let prec = cfg.precision;
    if !(cfg.shape > 0.0 && cfg.shape.is_finite()) {
        return Err(Error::InvalidProblem(format!("shape parameter must be positive, got {}", cfg.shape)));
    }
    if cfg.counts.len() != cfg.example.dim() {
        return Err(Error::InvalidProblem(format!(
            "{} is {}-dimensional but the grid has {} counts",
            cfg.example,
            cfg.example.dim(),
            cfg.counts.len()
        )));
    }
    let eps = T::from_f64_decimal(cfg.eps, prec);
    let problem = cfg.example.problem(&eps)?;
    let shape = T::from_f64_decimal(cfg.shape, prec);
    let solution = match cfg.method {
        Method::Constrained => {
            solve(&problem, &SolveOptions::new(cfg.counts.clone(), shape).mode(cfg.mode).scheme(cfg.scheme))?
        }
        Method::Kansa => kansa_solve(&problem, &cfg.counts, &shape)?,
    };
    let exact = problem.exact.as_ref().expect("registered examples carry their exact solution");
    Ok((error_on_metric_grid(&solution, exact.as_ref(), &problem.domain), solution.diagnostics()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub example: ExampleId,
    pub methods: Vec<Method>,
    pub counts: Vec<usize>,
    pub shape_min: f64,
    pub shape_max: f64,
    pub steps: usize,
    pub precision: Precision,
    pub eps: f64,
    pub mode: SolveMode,
    pub scheme: GridScheme,
    pub jobs: usize,
}

/// `steps` logarithmically spaced values from `lo` to `hi`.
pub fn log_space(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..steps)
        .map(|i| match i {
            0 => lo,
            i if i + 1 == steps => hi,
            i => (a + (b - a) * i as f64 / (steps - 1) as f64).exp(),
        })
        .collect()
}

/// Runs every method at every shape value. Rows come back sorted by shape,
/// then method; failed runs stay in the list.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<RunReport>> {
    if !(cfg.shape_min > 0.0 && cfg.shape_min <= cfg.shape_max && cfg.shape_max.is_finite()) {
        return Err(Error::InvalidProblem(format!("bad shape range [{}, {}]", cfg.shape_min, cfg.shape_max)));
    }
    if cfg.steps == 0 || cfg.methods.is_empty() {
        return Err(Error::InvalidProblem("a sweep needs at least one step and one method".into()));
    }
    let mut methods = cfg.methods.clone();
    methods.sort();
    methods.dedup();
    let runs: Vec<RunConfig> = log_space(cfg.shape_min, cfg.shape_max, cfg.steps)
        .into_iter()
        .flat_map(|c| methods.iter().map(move |&m| (c, m)))
        .map(|(c, m)| {
            RunConfig::new(cfg.example, m, cfg.counts.clone(), c, cfg.precision)
                .eps(cfg.eps)
                .mode(cfg.mode)
                .scheme(cfg.scheme)
        })
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidProblem(format!("thread pool: {e}")))?;
    Ok(pool.install(|| runs.par_iter().map(run_example).collect()))
}

/// Worst residuals of an example's exact solution in binary64.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfCheck {
    pub pde: f64,
    pub boundary: f64,
}

impl SelfCheck {
    pub fn passes(&self, tol: f64) -> bool {
        self.pde <= tol && self.boundary <= tol
    }
}

fn halton(mut i: usize, base: usize) -> f64 {
    let (mut f, mut r) = (1.0, 0.0);
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Checks the exact solution against the PDE at 50 quasi-random interior
/// points and against every boundary condition at 10 tangential samples.
/// Residuals are scaled by `max(1, |target|)`.
pub fn self_check(id: ExampleId, eps: f64) -> Result<SelfCheck> {
    const BASES: [usize; 3] = [2, 3, 5];
    let problem = id.problem(&eps)?;
    let u = problem.exact.clone().expect("registered examples carry their exact solution");
    let dom = &problem.domain;
    let dim = dom.dim();
    let at = |i: usize| -> Vec<f64> {
        (0..dim).map(|k| dom.lo(k) + (dom.hi(k) - dom.lo(k)) * (0.05 + 0.9 * halton(i + 1, BASES[k]))).collect()
    };
    let scaled = |got: f64, want: f64| (got - want).abs() / want.abs().max(1.0);

    let mut pde = 0f64;
    for i in 0..50 {
        let p = at(i);
        pde = pde.max(scaled(problem.operator.apply(u.as_ref(), &p), problem.rhs.value(&p)));
    }
    let mut boundary = 0f64;
    for (axis, conds) in problem.conditions.iter().enumerate() {
        for (functional, data) in conds.functionals.iter().zip(&conds.data) {
            let applied = functional.along_axis(axis, u.clone());
            for i in 0..10 {
                let p = at(100 + i);
                boundary = boundary.max(scaled(applied.value(&p), data.value(&p)));
            }
        }
    }
    Ok(SelfCheck { pde, boundary })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_exact_solution_satisfies_its_problem() {
        for id in ExampleId::ALL {
            for eps in [0.5, DEFAULT_EPS, 2f64.powi(-10)] {
                let check = self_check(id, eps).unwrap();
                assert!(check.passes(1e-8), "{id} eps={eps}: {check:?}");
            }
        }
    }

    #[test]
    fn log_space_endpoints_and_order() {
        let c = log_space(0.01, 2.0, 30);
        assert_eq!(c.len(), 30);
        assert_eq!((c[0], c[29]), (0.01, 2.0));
        assert!(c.windows(2).all(|w| w[0] < w[1]));
        assert!((c[1] / c[0] - c[2] / c[1]).abs() < 1e-12);
        assert_eq!(log_space(0.3, 0.9, 1), vec![0.3]);
    }

    #[test]
    fn failed_runs_are_recorded() {
        let cfg = RunConfig::new(ExampleId::Ex4, Method::Constrained, vec![5], 0.5, Precision::Binary64);
        let r = run_example(&cfg);
        assert!(!r.succeeded());
        assert!(r.max_abs_err.is_nan());
    }

    #[test]
    fn single_step_sweep_matches_a_single_run() {
        let sweep = SweepConfig {
            example: ExampleId::Ex3,
            methods: vec![Method::Constrained],
            counts: vec![4, 3],
            shape_min: 0.7,
            shape_max: 0.7,
            steps: 1,
            precision: Precision::Binary64,
            eps: DEFAULT_EPS,
            mode: SolveMode::Pseudospectral,
            scheme: GridScheme::UniformInterior,
            jobs: 2,
        };
        let rows = run_sweep(&sweep).unwrap();
        let single =
            run_example(&RunConfig::new(ExampleId::Ex3, Method::Constrained, vec![4, 3], 0.7, Precision::Binary64));
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].max_abs_err, single.max_abs_err);
        assert_eq!(rows[0].cond_al, single.cond_al);
    }
}
