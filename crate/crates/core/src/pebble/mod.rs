//! Resource-constrained reversible pebbling of XAGs with incremental SAT.
//!
//! Inputs start pebbled. An AND pebble may be placed or removed while both
//! children are pebbled. An XOR pebble is placed in place of one of its two
//! pebbled children (the child's qubit is overwritten with the XOR) and
//! removed by the inverse move. At most `L` nodes are pebbled at any step.
//!
//! [`solve`] unrolls the game one step at a time on a single solver until the
//! final configuration becomes reachable, then decodes, validates and
//! simplifies the schedule. [`replay`] turns a schedule into a circuit.

mod cnf;
mod encode;
mod external;
mod replay;
mod sat;
mod schedule;

use std::ops::RangeInclusive;

use thiserror::Error;

pub use cnf::{ClauseSink, CnfFormula, DimacsError};
pub use encode::{at_most, encode, PebbleEncoding, Unroller};
pub use external::{ExternalSolver, SOLVER_ENV};
pub use replay::replay;
pub use sat::{CdclSolver, SatSolver, SolveResult, SolverStats};
pub use schedule::{derive_moves, validate, Direction, Move, PebbleSchedule, Rule, Violation};

use crate::qir::{Circuit, CircuitError};
use crate::xag::XagNetwork;

/// What the last configuration must look like.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum FinalMode {
    /// Every output root is pebbled at some step and the walk returns to the
    /// initial configuration. Outputs are copied when first pebbled.
    #[default]
    RoundTrip,
    /// Only inputs and output roots are pebbled at the end. The replay
    /// mirrors the walk after copying the outputs.
    OutputsPebbled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PebbleOptions {
    pub max_pebbles: usize,
    pub step_cap: usize,
    pub solver_seed: u64,
    /// Conflicts allowed per SAT call; `None` is unlimited.
    pub conflict_budget: Option<u64>,
    pub mode: FinalMode,
    /// After the first solution, search for schedules with fewer AND
    /// placements.
    pub minimize_and_moves: bool,
    /// How many steps beyond the shortest walk the minimization may use.
    pub extra_steps: usize,
    /// Conflicts allowed per minimization call. Running out keeps the best
    /// schedule so far.
    pub minimize_budget: Option<u64>,
}

impl PebbleOptions {
    pub fn new(max_pebbles: usize) -> Self {
        PebbleOptions {
            max_pebbles,
            step_cap: 32,
            solver_seed: 0,
            conflict_budget: Some(200_000),
            mode: FinalMode::RoundTrip,
            minimize_and_moves: true,
            extra_steps: 4,
            minimize_budget: Some(10_000),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PebbleError {
    #[error("network is not normalized")]
    NotNormalized,
    #[error("{pebbles} pebbles cannot even cover the {inputs} inputs")]
    TooFewPebbles { pebbles: usize, inputs: usize },
    #[error("the number of steps must be at least 1")]
    NoSteps,
    #[error("conflict budget exhausted at {steps} steps")]
    ResourceLimit { steps: usize },
    #[error("decoded schedule violates the game rules: {0}")]
    Invalid(Violation),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PebbleOutcome {
    Found(PebbleSchedule),
    /// No schedule with at most `max_steps` steps exists.
    Infeasible { max_steps: usize },
}

impl PebbleOutcome {
    pub fn schedule(&self) -> Option<&PebbleSchedule> {
        match self {
            PebbleOutcome::Found(s) => Some(s),
            PebbleOutcome::Infeasible { .. } => None,
        }
    }
}

/// Solves with the external solver named by `ORACLEFORGE_SOLVER` if set,
/// otherwise with the bundled one.
pub fn solve(network: &XagNetwork, options: &PebbleOptions) -> Result<PebbleOutcome, PebbleError> {
    match ExternalSolver::from_env() {
        Some(mut ext) => solve_with(network, options, &mut ext),
        None => solve_with(network, options, &mut CdclSolver::new(options.solver_seed)),
    }
}

/// Incremental bounded model checking on a caller-supplied solver, which
/// must be fresh.
pub fn solve_with<S: SatSolver>(
    network: &XagNetwork,
    options: &PebbleOptions,
    solver: &mut S,
) -> Result<PebbleOutcome, PebbleError> {
    if options.step_cap < 1 {
        return Err(PebbleError::NoSteps);
    }
    solver.set_conflict_budget(options.conflict_budget);
    let n = network.num_inputs();
    if network.outputs().iter().all(|o| o.root.index() <= n) {
        // nothing to compute; an empty step is the whole schedule
        let initial: Vec<bool> = (0..=network.num_nodes()).map(|i| i >= 1 && i <= n).collect();
        let schedule = PebbleSchedule::from_configs(network, vec![initial.clone(), initial], options.mode);
        Unroller::new(network, options.max_pebbles, options.mode)?;
        validate(&schedule, network, options.max_pebbles).map_err(PebbleError::Invalid)?;
        return Ok(PebbleOutcome::Found(schedule));
    }
    let mut unroller = Unroller::new(network, options.max_pebbles, options.mode)?.require_progress(true);
    unroller.add_frame(solver);
    let mut found = None;
    for steps in 1..=options.step_cap {
        unroller.extend(solver);
        let assumptions = step_assumptions(&unroller, solver, steps);
        match solver.solve(&assumptions) {
            SolveResult::Unsat => continue,
            SolveResult::Unknown => return Err(PebbleError::ResourceLimit { steps }),
            SolveResult::Sat => {
                found = Some((steps, decode(&unroller, solver, steps, options)?));
                break;
            }
        }
    }
    let Some((shortest, mut best)) = found else {
        return Ok(PebbleOutcome::Infeasible { max_steps: options.step_cap });
    };
    if !options.minimize_and_moves {
        return Ok(PebbleOutcome::Found(best));
    }
    solver.set_conflict_budget(options.minimize_budget);
    // every AND below an output has to be placed at least once
    let live = network.live_nodes();
    let floor = network.step_ids().filter(|(id, _)| network.is_and(*id) && live[id.index()]).count();
    let last = options.step_cap.min(shortest + options.extra_steps);
    for steps in shortest..=last {
        if best.and_placements(network) <= floor {
            break;
        }
        if steps > shortest {
            unroller.extend(solver);
        }
        let assumptions = step_assumptions(&unroller, solver, steps);
        let placements = placement_indicators(&unroller, solver, steps);
        loop {
            let current = best.and_placements(network);
            if current <= floor {
                break;
            }
            let act = solver.new_var();
            at_most(&mut Guarded { inner: solver, guard: act }, &placements, current - 1);
            let mut with_bound = assumptions.clone();
            with_bound.push(act);
            if solver.solve(&with_bound) != SolveResult::Sat {
                break;
            }
            let better = decode(&unroller, solver, steps, options)?;
            if better.and_placements(network) >= current {
                break;
            }
            best = better;
        }
    }
    Ok(PebbleOutcome::Found(best))
}

fn step_assumptions<S: SatSolver>(unroller: &Unroller<'_>, solver: &mut S, steps: usize) -> Vec<i32> {
    let mut assumptions = unroller.final_literals(steps);
    assumptions.extend(unroller.visit_clauses(solver, steps, true));
    assumptions
}

fn decode<S: SatSolver>(
    unroller: &Unroller<'_>,
    solver: &S,
    steps: usize,
    options: &PebbleOptions,
) -> Result<PebbleSchedule, PebbleError> {
    let network = unroller.network();
    let configs = unroller.configurations(steps, |v| solver.value(v).expect("model after a satisfiable call"));
    let schedule = PebbleSchedule::from_configs(network, configs, options.mode);
    validate(&schedule, network, options.max_pebbles).map_err(PebbleError::Invalid)?;
    let pruned = schedule.prune(network);
    validate(&pruned, network, options.max_pebbles).map_err(PebbleError::Invalid)?;
    Ok(pruned)
}

/// One variable per (AND node, transition), forced true when the node is
/// placed in that transition.
fn placement_indicators<S: SatSolver>(unroller: &Unroller<'_>, solver: &mut S, steps: usize) -> Vec<i32> {
    let network = unroller.network();
    let mut out = Vec::new();
    for s in 0..steps {
        for (id, _) in network.step_ids().filter(|(id, _)| network.is_and(*id)) {
            let p = solver.new_var();
            solver.add_clause(&[unroller.pebble(id, s), -unroller.pebble(id, s + 1), p]);
            out.push(p);
        }
    }
    out
}

/// Weakens every clause by `¬guard`.
struct Guarded<'s, S: ?Sized> {
    inner: &'s mut S,
    guard: i32,
}

impl<S: ClauseSink + ?Sized> ClauseSink for Guarded<'_, S> {
    fn new_var(&mut self) -> i32 {
        self.inner.new_var()
    }

    fn add_clause(&mut self, lits: &[i32]) {
        let mut c = lits.to_vec();
        c.push(-self.guard);
        self.inner.add_clause(&c);
    }
}

/// One point of a pebble-bound sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParetoPoint {
    pub max_pebbles: usize,
    pub seed: u64,
    pub outcome: PointOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PointOutcome {
    Found(ParetoResult),
    /// No schedule within the step cap.
    Infeasible,
    /// The conflict budget ran out at this many steps.
    Unknown { steps: usize },
}

impl ParetoPoint {
    pub fn result(&self) -> Option<&ParetoResult> {
        match &self.outcome {
            PointOutcome::Found(r) => Some(r),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParetoResult {
    pub steps: usize,
    pub ancillae: usize,
    pub t_count: usize,
    pub schedule: PebbleSchedule,
    pub circuit: Circuit,
}

/// Solves and replays for every bound in `pebbles` and every seed.
pub fn sweep(
    network: &XagNetwork,
    pebbles: RangeInclusive<usize>,
    seeds: &[u64],
    base: &PebbleOptions,
) -> Result<Vec<ParetoPoint>, PebbleError> {
    let mut points = Vec::new();
    for max_pebbles in pebbles {
        for &seed in seeds {
            let options = PebbleOptions { max_pebbles, solver_seed: seed, ..*base };
            let outcome = match solve(network, &options) {
                Ok(PebbleOutcome::Found(schedule)) => {
                    let (circuit, cost) = replay(&schedule, network)?;
                    PointOutcome::Found(ParetoResult {
                        steps: schedule.steps(),
                        ancillae: circuit.n_ancillae(),
                        t_count: cost.t_count,
                        schedule,
                        circuit,
                    })
                }
                Ok(PebbleOutcome::Infeasible { .. }) => PointOutcome::Infeasible,
                Err(PebbleError::ResourceLimit { steps }) => PointOutcome::Unknown { steps },
                Err(e) => return Err(e),
            };
            points.push(ParetoPoint { max_pebbles, seed, outcome });
        }
    }
    Ok(points)
}

/// Smallest bound in `range` with a schedule, skipping bounds whose search
/// runs out of budget.
pub fn min_feasible_pebbles(
    network: &XagNetwork,
    range: RangeInclusive<usize>,
    base: &PebbleOptions,
) -> Result<Option<(usize, PebbleSchedule)>, PebbleError> {
    for max_pebbles in range {
        let options = PebbleOptions { max_pebbles, ..*base };
        match solve(network, &options) {
            Ok(PebbleOutcome::Found(s)) => return Ok(Some((max_pebbles, s))),
            Ok(PebbleOutcome::Infeasible { .. }) | Err(PebbleError::ResourceLimit { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

/// Pareto CSV, one row per point. Fields after `status` are empty unless a
/// schedule was found.
pub fn pareto_csv(points: &[ParetoPoint]) -> String {
    let mut out = String::from("pebbles,seed,status,steps,ancillae,t_count\n");
    for p in points {
        let (l, seed) = (p.max_pebbles, p.seed);
        match &p.outcome {
            PointOutcome::Found(r) => out.push_str(&format!("{l},{seed},found,{},{},{}\n", r.steps, r.ancillae, r.t_count)),
            PointOutcome::Infeasible => out.push_str(&format!("{l},{seed},infeasible,,,\n")),
            PointOutcome::Unknown { .. } => out.push_str(&format!("{l},{seed},budget,,,\n")),
        }
    }
    out
}

/// Static scatter plot of the feasible `(ancillae, t_count)` points.
pub fn pareto_svg(points: &[ParetoPoint]) -> String {
    let data: Vec<(usize, usize)> = points.iter().filter_map(|p| p.result().map(|r| (r.ancillae, r.t_count))).collect();
    let (w, h, pad) = (480.0, 320.0, 48.0);
    let max_x = data.iter().map(|d| d.0).max().unwrap_or(1).max(1) as f64;
    let max_y = data.iter().map(|d| d.1).max().unwrap_or(1).max(1) as f64;
    let sx = |x: usize| pad + x as f64 / max_x * (w - 2.0 * pad);
    let sy = |y: usize| h - pad - y as f64 / max_y * (h - 2.0 * pad);
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <line x1=\"{pad}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <line x1=\"{pad}\" y1=\"{pad}\" x2=\"{pad}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <text x=\"{cx}\" y=\"{ty}\" text-anchor=\"middle\" font-size=\"12\">ancillae (max {max_x})</text>\n\
         <text x=\"12\" y=\"{cy}\" font-size=\"12\" transform=\"rotate(-90 12 {cy})\" text-anchor=\"middle\">T gates (max {max_y})</text>\n",
        b = h - pad,
        r = w - pad,
        cx = w / 2.0,
        ty = h - 12.0,
        cy = h / 2.0,
    );
    let mut seen = std::collections::BTreeSet::new();
    for &(x, y) in &data {
        if seen.insert((x, y)) {
            svg.push_str(&format!("<circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"4\" fill=\"steelblue\"><title>{x} ancillae, {y} T</title></circle>\n", sx(x), sy(y)));
        }
    }
    svg.push_str("</svg>\n");
    svg
}
