//! Three-valued verdicts for recurrence and stochastic completeness, plus the
//! Green-formula and uniqueness-witness checks on finite realizations.

use std::fmt;

use crate::ball::ball_with_limits;
use crate::error::{Error, Result};
use crate::function::VertexFunction;
use crate::graph::{is_connected, WeightedGraph};
use crate::operator::{formal_laplacian, Summation};
use crate::oracle::GraphOracle;
use crate::potential::{
    capacity_sequence, deficiency_sequence, CapacitySequence, DeficiencySequence, PotentialOptions,
};
use crate::vertex::Vertex;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Question {
    Recurrence,
    StochasticCompleteness,
}

impl fmt::Display for Question {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Question::Recurrence => "recurrence",
            Question::StochasticCompleteness => "sc",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Positive,
    Negative,
    Undetermined,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Positive => "positive",
            Verdict::Negative => "negative",
            Verdict::Undetermined => "undetermined",
        })
    }
}

#[derive(Clone, Debug)]
pub enum Evidence {
    Capacity(CapacitySequence),
    Deficiency(DeficiencySequence),
}

impl Evidence {
    pub fn radii(&self) -> &[usize] {
        match self {
            Evidence::Capacity(c) => &c.radii,
            Evidence::Deficiency(d) => &d.radii,
        }
    }

    /// The decisive trace: capacities, or deficiencies at the first probe.
    pub fn values(&self) -> Vec<f64> {
        match self {
            Evidence::Capacity(c) => c.values.clone(),
            Evidence::Deficiency(d) => d.primary(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Thresholds {
    /// A positive verdict needs the final value below this, up to
    /// `monotone_slack`.
    pub tol: f64,
    /// A negative verdict needs a stabilized final value above this (10·tol).
    pub negative_floor: f64,
    /// Slack for monotonicity, from the solver tolerance.
    pub monotone_slack: f64,
}

impl Thresholds {
    fn new(tol: f64, opts: &PotentialOptions) -> Self {
        Thresholds {
            tol,
            negative_floor: 10.0 * tol,
            monotone_slack: 2.0 * opts.solver.tol,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ClassificationReport {
    pub question: Question,
    pub verdict: Verdict,
    pub evidence: Evidence,
    pub thresholds: Thresholds,
    pub connected: bool,
    pub notes: Vec<String>,
}

fn non_increasing(values: &[f64], slack: f64) -> bool {
    values.windows(2).all(|w| w[1] <= w[0] + slack * w[0].abs().max(1.0))
}

fn verdict_for(values: &[f64], stabilized: bool, th: &Thresholds) -> Verdict {
    let last = *values.last().expect("nonempty evidence");
    // values are only known to solver precision, so a value equal to tol up
    // to that precision is not above it
    if last < th.tol + th.monotone_slack && non_increasing(values, th.monotone_slack) {
        Verdict::Positive
    } else if stabilized && last > th.negative_floor {
        Verdict::Negative
    } else {
        Verdict::Undetermined
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")))
    }
}

fn connectivity(oracle: &dyn GraphOracle, o: &Vertex, radius: usize, opts: &PotentialOptions) -> Result<bool> {
    match oracle.meta().connected {
        Some(c) => Ok(c),
        None => Ok(is_connected(
            &ball_with_limits(oracle, o, radius, opts.limits)?.realization,
        )),
    }
}

fn heuristic_note() -> String {
    "limits are estimated from the last two radii; a finite exhaustion cannot prove a limit".to_string()
}

/// Recurrence via capacities: recurrent iff cap(o) = 0 on a connected graph.
pub fn classify_recurrence(
    oracle: &dyn GraphOracle,
    o: &Vertex,
    radii: &[usize],
    tol: f64,
    opts: &PotentialOptions,
) -> Result<ClassificationReport> {
    check_tol(tol)?;
    let seq = capacity_sequence(oracle, o, radii, tol, opts)?;
    let connected = connectivity(oracle, o, *radii.last().expect("radii checked"), opts)?;
    let thresholds = Thresholds::new(tol, opts);
    let mut notes = vec![heuristic_note()];
    let verdict = if connected {
        verdict_for(&seq.values, seq.stabilized(), &thresholds)
    } else {
        notes.push("graph is not connected, so the form is not irreducible; no recurrence verdict".into());
        Verdict::Undetermined
    };
    Ok(ClassificationReport {
        question: Question::Recurrence,
        verdict,
        evidence: Evidence::Capacity(seq),
        thresholds,
        connected,
        notes,
    })
}

/// Stochastic completeness via the deficiency 1 − α(L_{G_n} + α)^{-1}1 at `o`.
pub fn classify_stochastic_completeness(
    oracle: &dyn GraphOracle,
    o: &Vertex,
    alpha: f64,
    radii: &[usize],
    tol: f64,
    opts: &PotentialOptions,
) -> Result<ClassificationReport> {
    check_tol(tol)?;
    let seq = deficiency_sequence(oracle, o, alpha, radii, &[], tol, opts)?;
    let connected = connectivity(oracle, o, *radii.last().expect("radii checked"), opts)?;
    let thresholds = Thresholds::new(tol, opts);
    let verdict = verdict_for(&seq.primary(), seq.stabilized(), &thresholds);
    let mut notes = vec![heuristic_note()];
    if oracle.meta().condition_a != Some(true) {
        notes
            .push("condition (A) not certified for this family; l1-based boundary criteria are only sufficient".into());
    }
    Ok(ClassificationReport {
        question: Question::StochasticCompleteness,
        verdict,
        evidence: Evidence::Deficiency(seq),
        thresholds,
        connected,
        notes,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GreenMode {
    Recurrence,
    StochasticCompleteness,
}

#[derive(Clone, Debug)]
pub struct GreenReport {
    pub mode: GreenMode,
    /// Σ_x (L̃u)(x) m(x) over the realization.
    pub boundary_sum: f64,
    /// Σ_x |u(x)| m(x).
    pub l1_u: f64,
    /// Σ_x |L̃u(x)| m(x).
    pub l1_laplacian: f64,
    pub sup_u: f64,
    /// Per-vertex (L̃u)(x) m(x), canonical order.
    pub contributions: Vec<(Vertex, f64)>,
    /// Every support vertex of `u` has all its neighbors realized.
    pub interior_supported: bool,
    pub notes: Vec<String>,
}

/// Evaluates the boundary term Σ L̃u·m and the ℓ¹ quantities the recurrence
/// and stochastic-completeness criteria are stated for.
pub fn check_green_criterion(
    g: &WeightedGraph,
    u: &VertexFunction,
    mode: GreenMode,
    condition_a: Option<bool>,
) -> Result<GreenReport> {
    let lu = formal_laplacian(g, u)?;
    let mut contributions = Vec::with_capacity(g.len());
    let mut sum = crate::operator::Acc::new(Summation::Naive);
    let mut l1_u = 0.0;
    let mut l1_lap = 0.0;
    for i in 0..g.len() {
        let x = g.vertex(i);
        let c = lu.get(x) * g.measure(i);
        sum.add(c);
        l1_u += u.get(x).abs() * g.measure(i);
        l1_lap += c.abs();
        contributions.push((x.clone(), c));
    }
    let interior_supported = u.support().all(|x| g.index_of(x).is_some_and(|i| g.is_closed(i)));
    let mut notes = Vec::new();
    if !interior_supported {
        notes.push("u touches vertices with unrealized neighbors: the sum is a truncation of the global term".into());
    }
    if mode == GreenMode::StochasticCompleteness && condition_a != Some(true) {
        notes.push("condition (A) not certified: vanishing over l1 functions is sufficient, not necessary".into());
    }
    Ok(GreenReport {
        mode,
        boundary_sum: sum.value(),
        l1_u,
        l1_laplacian: l1_lap,
        sup_u: u.sup_norm(),
        contributions,
        interior_supported,
        notes,
    })
}

/// Tolerance for the sign test on L̃u.
pub const WITNESS_SIGN_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct WitnessReport {
    pub u: VertexFunction,
    /// Named checks in fixed order.
    pub checks: Vec<(&'static str, bool)>,
    pub boundary_sum_value: f64,
    pub notes: Vec<String>,
}

impl WitnessReport {
    pub fn check(&self, name: &str) -> Option<bool> {
        self.checks.iter().find(|(n, _)| *n == name).map(|&(_, b)| b)
    }

    /// True iff every condition holds on the realization. This can refute a
    /// witness but never certify one for an infinite graph.
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|&(_, b)| b)
    }
}

/// Evaluates the conditions u ≥ 0, L̃u ≤ 0, L̃u ≠ 0 together with the
/// integrability requirements on the finite realization.
pub fn check_uniqueness_witness(g: &WeightedGraph, u: &VertexFunction) -> Result<WitnessReport> {
    let lu = formal_laplacian(g, u)?;
    let mut l1 = 0.0;
    let mut l2_lap = 0.0;
    let mut nonnegative = true;
    let mut nonpositive = true;
    let mut nontrivial = false;
    let mut sum = 0.0;
    for i in 0..g.len() {
        let x = g.vertex(i);
        let (ux, lx, m) = (u.get(x), lu.get(x), g.measure(i));
        nonnegative &= ux >= 0.0;
        nonpositive &= lx <= WITNESS_SIGN_TOL;
        nontrivial |= lx.abs() > WITNESS_SIGN_TOL;
        l1 += ux.abs() * m;
        l2_lap += lx * lx * m;
        sum += lx * m;
    }
    let checks = vec![
        ("nonnegative", nonnegative),
        ("L1_finite_on_carrier", l1.is_finite()),
        ("Linf_bounded", u.sup_norm().is_finite()),
        ("laplacian_nonpositive", nonpositive),
        ("laplacian_nontrivial", nontrivial),
        ("l2_laplacian_finite_on_carrier", l2_lap.is_finite()),
    ];
    Ok(WitnessReport {
        u: u.clone(),
        checks,
        boundary_sum_value: sum,
        notes: vec!["a finite realization can refute a witness but never certify one on an infinite graph".into()],
    })
}
