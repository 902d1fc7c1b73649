//! Potential theory on weighted graphs.
//!
//! A graph `(b, c)` with vertex measure `m` is accessed through a
//! [`GraphOracle`]; every computation runs on finite [`Ball`] realizations
//! of it. On top of the formal Laplacian and energy form ([`operator`]) the
//! crate solves restricted Dirichlet problems ([`linsolve`]), computes
//! equilibrium potentials, capacities and resolvent deficiencies along
//! exhaustions ([`potential`]) and turns those sequences into three-valued
//! verdicts on recurrence and stochastic completeness ([`classify`]).

pub mod ball;
pub mod classify;
pub mod error;
pub mod families;
pub mod function;
pub mod graph;
pub mod io;
pub mod linsolve;
pub mod operator;
pub mod oracle;
pub mod potential;
pub mod vertex;

pub use ball::{ball, ball_with_limits, Ball, BallLimits};
pub use classify::{
    check_green_criterion, check_uniqueness_witness, classify_recurrence, classify_stochastic_completeness,
    ClassificationReport, Evidence, GreenMode, GreenReport, Question, Verdict, WitnessReport,
};
pub use error::{Error, Result};
pub use families::generate;
pub use function::VertexFunction;
pub use graph::{is_connected, validate, Rule, Violation, WeightedGraph};
pub use linsolve::{assemble, solve, solve_constrained, DirichletProblem, SolveResult, SolverOptions};
pub use operator::{
    boundary_sum, clamp, energy, energy_bilinear, formal_laplacian, green_defect, local_energy_density, EnergyReport,
};
pub use oracle::{FiniteOracle, GraphOracle, OracleMeta};
pub use potential::{
    capacity_sequence, deficiency_sequence, equilibrium_potential, resolvent_limit, CapacitySequence,
    DeficiencySequence, EquilibriumPotential, PotentialOptions, ResolventTrace,
};
pub use vertex::Vertex;
