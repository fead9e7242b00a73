//! Labeled queries: timed constraints conjoined with `PF_m(D)`.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::formula::{Formula, Interpretation};
use crate::signature::Atom;
use crate::stable::StableEngine;
use crate::translate::{timestamp, Origin, TimedAtom, TimedTheory, Translation};
use crate::transition::{theory_models, Path};

pub const DEFAULT_HORIZON_CAP: usize = 20;

pub type Solution = Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepRef {
    At(usize),
    Maxstep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Maxstep {
    Fixed(usize),
    /// Try horizons `0, 1, …` up to the cap and keep the first one with a solution.
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuerySpec {
    pub label: String,
    pub maxstep: Maxstep,
    pub constraints: Vec<(StepRef, Formula<Atom>)>,
}

impl QuerySpec {
    pub fn new(label: impl Into<String>, maxstep: Maxstep) -> Self {
        QuerySpec {
            label: label.into(),
            maxstep,
            constraints: Vec::new(),
        }
    }

    pub fn with(mut self, step: StepRef, f: Formula<Atom>) -> Self {
        self.constraints.push((step, f));
        self
    }

    fn least_horizon(&self) -> usize {
        self.constraints
            .iter()
            .filter_map(|(s, _)| match s {
                StepRef::At(i) => Some(*i),
                StepRef::Maxstep => None,
            })
            .max()
            .unwrap_or(0)
    }
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Maximum number of solutions; 0 means all.
    pub limit: usize,
    pub horizon_cap: usize,
    pub engine: StableEngine,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            limit: 0,
            horizon_cap: DEFAULT_HORIZON_CAP,
            engine: StableEngine::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryOutcome {
    Found { horizon: usize, solutions: Vec<Solution> },
    /// No solution at the fixed horizon.
    Unsatisfiable { horizon: usize },
    NoSolutionUpToCap { cap: usize },
}

impl QueryOutcome {
    pub fn solutions(&self) -> &[Solution] {
        match self {
            QueryOutcome::Found { solutions, .. } => solutions,
            _ => &[],
        }
    }
}

/// `PF_m(D)` with every query constraint `i:F` added as `¬¬(i:F)`.
pub fn query_theory<T: Translation + ?Sized>(d: &T, q: &QuerySpec, m: usize) -> Result<TimedTheory> {
    let mut theory = d.translate(m)?;
    for (step, f) in &q.constraints {
        let i = match *step {
            StepRef::At(i) => i,
            StepRef::Maxstep => m,
        };
        if i > m {
            return Err(Error::StepOutOfHorizon { step: i, horizon: m });
        }
        theory.push(Formula::not(Formula::not(timestamp(f, i))), Origin::Query, m);
    }
    Ok(theory)
}

/// Orders models so that, at the greatest atom on which two models differ,
/// the model containing it comes first.
fn descending_colex(x: &Interpretation<TimedAtom>, y: &Interpretation<TimedAtom>) -> Ordering {
    let mut xs = x.atoms().iter().rev().peekable();
    let mut ys = y.atoms().iter().rev().peekable();
    loop {
        match (xs.peek(), ys.peek()) {
            (None, None) => return Ordering::Equal,
            (Some(_), None) => return Ordering::Less,
            (None, Some(_)) => return Ordering::Greater,
            (Some(a), Some(b)) => match a.cmp(b) {
                Ordering::Equal => {
                    xs.next();
                    ys.next();
                }
                Ordering::Greater => return Ordering::Less,
                Ordering::Less => return Ordering::Greater,
            },
        }
    }
}

fn solve_at<T: Translation + ?Sized>(
    d: &T,
    q: &QuerySpec,
    m: usize,
    opts: &SolveOptions,
) -> Result<Vec<Solution>> {
    let theory = query_theory(d, q, m)?;
    let mut models = theory_models(&theory, d.signature(), &opts.engine)?;
    models.sort_by(descending_colex);
    if opts.limit > 0 {
        models.truncate(opts.limit);
    }
    Ok(models
        .iter()
        .map(|x| Path::from_model(x, d.signature(), m))
        .collect())
}

pub fn solve<T: Translation + ?Sized>(d: &T, q: &QuerySpec, opts: &SolveOptions) -> Result<QueryOutcome> {
    match q.maxstep {
        Maxstep::Fixed(m) => {
            let solutions = solve_at(d, q, m, opts)?;
            Ok(if solutions.is_empty() {
                QueryOutcome::Unsatisfiable { horizon: m }
            } else {
                QueryOutcome::Found {
                    horizon: m,
                    solutions,
                }
            })
        }
        Maxstep::Unbounded => {
            for m in q.least_horizon()..=opts.horizon_cap {
                let solutions = solve_at(d, q, m, opts)?;
                if !solutions.is_empty() {
                    return Ok(QueryOutcome::Found {
                        horizon: m,
                        solutions,
                    });
                }
            }
            Ok(QueryOutcome::NoSolutionUpToCap {
                cap: opts.horizon_cap,
            })
        }
    }
}
