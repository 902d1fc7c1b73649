//! Equilibrium potentials, capacities and restricted resolvents along the
//! exhaustion by combinatorial balls.
//!
//! For a ball `B(o, n)` the exhaustion set `Ω_n` is its interior: the
//! vertices whose neighbors are all realized. The outer ring of the ball is
//! where the potential vanishes, so `cap(o, Ω_n)` on ℤ is `2/n`.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::ball::{ball_with_limits, Ball, BallLimits};
use crate::error::{Error, Result};
use crate::function::VertexFunction;
use crate::linsolve::{solve, solve_constrained, DirichletProblem, SolverOptions};
use crate::operator::{energy_dense, laplacian_dense, Summation};
use crate::oracle::{require_vertex, GraphOracle};
use crate::vertex::Vertex;

/// Agreement required between the energy and flux evaluations of a capacity
/// before a result is rejected as internally inconsistent.
pub const CAPACITY_AGREEMENT_LIMIT: f64 = 1e-6;

#[derive(Clone, Copy, Debug)]
pub struct PotentialOptions {
    pub solver: SolverOptions,
    pub limits: BallLimits,
    /// Worker threads for independent per-radius solves.
    pub threads: usize,
    /// Keep every equilibrium potential in a [`CapacitySequence`].
    pub keep_potentials: bool,
}

impl Default for PotentialOptions {
    fn default() -> Self {
        PotentialOptions {
            solver: SolverOptions::with_tol(1e-12),
            limits: BallLimits::default(),
            threads: 1,
            keep_potentials: false,
        }
    }
}

/// Runs `job` for every index in `0..n` on up to `threads` workers and
/// returns the results in index order.
fn run_indexed<T: Send>(n: usize, threads: usize, job: impl Fn(usize) -> Result<T> + Sync) -> Result<Vec<T>> {
    let threads = threads.clamp(1, n.max(1));
    if threads == 1 {
        return (0..n).map(job).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<T>>>> = Mutex::new((0..n).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                if k >= n {
                    break;
                }
                let out = job(k);
                slots.lock().expect("result slots")[k] = Some(out);
            });
        }
    });
    slots
        .into_inner()
        .expect("result slots")
        .into_iter()
        .map(|s| s.expect("every index ran"))
        .collect()
}

fn check_radii(radii: &[usize], min: usize) -> Result<()> {
    if radii.is_empty() {
        return Err(Error::InvalidArgument("radii must be nonempty".into()));
    }
    if radii[0] < min || radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(format!(
            "radii must be strictly increasing and at least {min}"
        )));
    }
    Ok(())
}

/// Equilibrium potential of `o` relative to the interior of a ball.
#[derive(Clone, Debug)]
pub struct EquilibriumPotential {
    pub radius: usize,
    pub potential: VertexFunction,
    /// Q̃(e_n), the returned capacity.
    pub capacity: f64,
    /// (L̃e_n)(o)·m(o), the same quantity through Green's formula.
    pub flux_capacity: f64,
    /// min over Ω_n of L̃e_n.
    pub min_laplacian: f64,
    pub ball_size: usize,
    pub iterations: usize,
}

impl EquilibriumPotential {
    pub fn relative_disagreement(&self) -> f64 {
        relative_gap(self.capacity, self.flux_capacity, 0.0)
    }
}

fn relative_gap(a: f64, b: f64, floor: f64) -> f64 {
    let scale = a.abs().max(b.abs()).max(floor);
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

pub fn equilibrium_potential(
    oracle: &dyn GraphOracle,
    o: &Vertex,
    radius: usize,
    opts: &PotentialOptions,
) -> Result<EquilibriumPotential> {
    if radius < 1 {
        return Err(Error::InvalidArgument("equilibrium potentials need radius >= 1".into()));
    }
    let b = ball_with_limits(oracle, o, radius, opts.limits)?;
    equilibrium_potential_on_ball(&b, opts)
}

/// Solves for e_n on an already materialized ball: pinned to 1 at the origin,
/// harmonic (killing included) on the rest of the interior, 0 elsewhere.
pub fn equilibrium_potential_on_ball(b: &Ball, opts: &PotentialOptions) -> Result<EquilibriumPotential> {
    let g = &b.realization;
    let oi = b.origin_index();
    let domain: Vec<Vertex> = b.interior();
    let pinned = BTreeMap::from([(b.origin.clone(), 1.0)]);
    let res = solve_constrained(g, &domain, &pinned, 0.0, &opts.solver)?;
    if !res.converged {
        return Err(Error::NotConverged {
            iterations: res.iterations,
            residual: res.residual_norm,
        });
    }
    let e = res.solution.to_dense(g)?;
    // e is exact at o and off the interior, so its energy is off by a term
    // quadratic in the solver error; evaluate it without adding roundoff
    let capacity = energy_dense(g, &e, Summation::DoubleDouble).total;
    let lap = laplacian_dense(g, &e);
    let flux_capacity = lap[oi] * g.measure(oi);
    let min_laplacian = (0..g.len())
        .filter(|&i| b.is_interior(i) || i == oi)
        .map(|i| lap[i])
        .fold(f64::INFINITY, f64::min);

    // capacities far below the largest possible one, deg(o) + c(o), are
    // compared on that absolute scale: both evaluations are then roundoff
    let floor = CAPACITY_AGREEMENT_LIMIT * (g.degree(oi) + g.killing(oi));
    let gap = relative_gap(capacity, flux_capacity, floor);
    if gap > CAPACITY_AGREEMENT_LIMIT {
        return Err(Error::Inconsistent(format!(
            "capacity by energy {capacity} and by flux {flux_capacity} differ (relative {gap:e}) at radius {}",
            b.radius
        )));
    }
    Ok(EquilibriumPotential {
        radius: b.radius,
        potential: res.solution,
        capacity,
        flux_capacity,
        min_laplacian,
        ball_size: g.len(),
        iterations: res.iterations,
    })
}

/// How a monotone sequence ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stabilization {
    /// Last two values agree and the limit is clearly positive.
    Positive,
    /// Values fell below the tolerance.
    Zero,
    None,
}

impl Stabilization {
    pub fn is_stabilized(self) -> bool {
        self != Stabilization::None
    }
}

/// Relative-change test on the last two values of a sequence.
pub fn stabilization(values: &[f64], tol: f64) -> Stabilization {
    let Some(&last) = values.last() else {
        return Stabilization::None;
    };
    if last < tol {
        return Stabilization::Zero;
    }
    if values.len() >= 2 {
        let prev = values[values.len() - 2];
        if (last - prev).abs() < tol * last.abs().max(1.0) && last > 10.0 * tol {
            return Stabilization::Positive;
        }
    }
    Stabilization::None
}

#[derive(Clone, Debug)]
pub struct CapacitySequence {
    pub origin: Vertex,
    pub radii: Vec<usize>,
    pub values: Vec<f64>,
    pub flux_values: Vec<f64>,
    pub min_laplacians: Vec<f64>,
    pub potentials: Option<Vec<VertexFunction>>,
    pub limit_estimate: f64,
    pub stabilization: Stabilization,
}

impl CapacitySequence {
    pub fn stabilized(&self) -> bool {
        self.stabilization.is_stabilized()
    }
}

pub fn capacity_sequence(
    oracle: &dyn GraphOracle,
    o: &Vertex,
    radii: &[usize],
    tol: f64,
    opts: &PotentialOptions,
) -> Result<CapacitySequence> {
    check_radii(radii, 1)?;
    require_vertex(oracle, o)?;
    let runs = run_indexed(radii.len(), opts.threads, |k| {
        equilibrium_potential(oracle, o, radii[k], opts)
    })?;
    let values: Vec<f64> = runs.iter().map(|r| r.capacity).collect();
    Ok(CapacitySequence {
        origin: o.clone(),
        radii: radii.to_vec(),
        flux_values: runs.iter().map(|r| r.flux_capacity).collect(),
        min_laplacians: runs.iter().map(|r| r.min_laplacian).collect(),
        limit_estimate: *values.last().expect("radii nonempty"),
        stabilization: stabilization(&values, tol),
        potentials: opts
            .keep_potentials
            .then(|| runs.into_iter().map(|r| r.potential).collect()),
        values,
    })
}

/// Per-radius restricted resolvents `(L_{G_n} + α)^{-1} f`.
#[derive(Clone, Debug)]
pub struct ResolventTrace {
    pub alpha: f64,
    pub radii: Vec<usize>,
    pub probes: Vec<Vertex>,
    /// `values[k][p]` is the solution on ball `radii[k]` at `probes[p]`.
    pub values: Vec<Vec<f64>>,
    /// Solution on the largest ball.
    pub solution: VertexFunction,
}

fn resolvent_on_ball(b: &Ball, alpha: f64, f: &VertexFunction, opts: &PotentialOptions) -> Result<VertexFunction> {
    let g = &b.realization;
    let p = DirichletProblem::on_whole_graph(g, alpha, f.clone())?;
    let res = solve(&p, &opts.solver)?;
    if !res.converged {
        return Err(Error::NotConverged {
            iterations: res.iterations,
            residual: res.residual_norm,
        });
    }
    Ok(res.solution)
}

/// Slack allowed when checking monotonicity of solver outputs.
fn monotone_slack(opts: &PotentialOptions, scale: f64) -> f64 {
    2.0 * opts.solver.tol * scale.max(1.0)
}

pub fn resolvent_limit(
    oracle: &dyn GraphOracle,
    o: &Vertex,
    alpha: f64,
    f: &VertexFunction,
    radii: &[usize],
    probes: &[Vertex],
    opts: &PotentialOptions,
) -> Result<ResolventTrace> {
    check_radii(radii, 0)?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!("alpha must be positive, got {alpha}")));
    }
    if f.iter().any(|(_, x)| !(x >= 0.0 && x.is_finite())) {
        return Err(Error::InvalidArgument(
            "resolvent data must be nonnegative and finite".into(),
        ));
    }
    let first = ball_with_limits(oracle, o, radii[0], opts.limits)?;
    for v in f.support().chain(probes) {
        if !first.realization.contains(v) {
            return Err(Error::InvalidArgument(format!(
                "vertex {v} lies outside the smallest ball"
            )));
        }
    }
    let solutions = run_indexed(radii.len(), opts.threads, |k| {
        let b = if k == 0 {
            first.clone()
        } else {
            ball_with_limits(oracle, o, radii[k], opts.limits)?
        };
        resolvent_on_ball(&b, alpha, f, opts)
    })?;

    let slack = monotone_slack(opts, f.sup_norm() / alpha);
    for w in solutions.windows(2) {
        for (v, x) in w[0].iter() {
            let y = w[1].get(v);
            if x > y + slack {
                return Err(Error::Inconsistent(format!(
                    "resolvent decreased at {v} along the exhaustion ({x} > {y})"
                )));
            }
        }
    }
    let values = solutions
        .iter()
        .map(|s| probes.iter().map(|p| s.get(p)).collect())
        .collect();
    Ok(ResolventTrace {
        alpha,
        radii: radii.to_vec(),
        probes: probes.to_vec(),
        values,
        solution: solutions.into_iter().last().expect("radii nonempty"),
    })
}

#[derive(Clone, Debug)]
pub struct DeficiencySequence {
    pub alpha: f64,
    pub radii: Vec<usize>,
    pub probe_vertices: Vec<Vertex>,
    /// `deficiencies[k][p]` = 1 − α·(L_{G_n} + α)^{-1} 1 at probe `p`, n = radii[k].
    pub deficiencies: Vec<Vec<f64>>,
    pub stabilization: Stabilization,
}

impl DeficiencySequence {
    pub fn stabilized(&self) -> bool {
        self.stabilization.is_stabilized()
    }

    /// The trace at the first probe.
    pub fn primary(&self) -> Vec<f64> {
        self.deficiencies.iter().map(|row| row[0]).collect()
    }
}

pub fn deficiency_sequence(
    oracle: &dyn GraphOracle,
    o: &Vertex,
    alpha: f64,
    radii: &[usize],
    probes: &[Vertex],
    tol: f64,
    opts: &PotentialOptions,
) -> Result<DeficiencySequence> {
    check_radii(radii, 0)?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!("alpha must be positive, got {alpha}")));
    }
    require_vertex(oracle, o)?;
    let probes: Vec<Vertex> = if probes.is_empty() {
        vec![o.clone()]
    } else {
        probes.to_vec()
    };
    let rows = run_indexed(radii.len(), opts.threads, |k| {
        let b = ball_with_limits(oracle, o, radii[k], opts.limits)?;
        if k == 0 {
            if let Some(p) = probes.iter().find(|p| !b.realization.contains(p)) {
                return Err(Error::InvalidArgument(format!(
                    "probe {p} lies outside the smallest ball"
                )));
            }
        }
        let one = VertexFunction::constant(&b.realization, 1.0);
        let u = resolvent_on_ball(&b, alpha, &one, opts)?;
        Ok(probes.iter().map(|p| 1.0 - alpha * u.get(p)).collect::<Vec<f64>>())
    })?;

    let slack = monotone_slack(opts, 1.0);
    for (k, w) in rows.windows(2).enumerate() {
        for (p, (a, b)) in w[0].iter().zip(&w[1]).enumerate() {
            if *b > a + slack {
                return Err(Error::Inconsistent(format!(
                    "deficiency at {} increased from radius {} to {}",
                    probes[p],
                    radii[k],
                    radii[k + 1]
                )));
            }
        }
    }
    let trace: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    Ok(DeficiencySequence {
        alpha,
        radii: radii.to_vec(),
        probe_vertices: probes,
        stabilization: stabilization(&trace, tol),
        deficiencies: rows,
    })
}
