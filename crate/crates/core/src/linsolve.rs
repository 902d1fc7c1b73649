//! Restricted Dirichlet systems `(L_G + α) u = f` and grounded harmonic
//! extensions, solved by Jacobi-preconditioned conjugate gradients.
//!
//! The operator `L_G + α` is self-adjoint in ℓ²(G, m) but not in the plain
//! dot product. Assembly applies the similarity transform `w = m^{1/2} u`, so
//! CG runs on the symmetric matrix `S = M^{-1/2} (D + C + αM − B) M^{-1/2}`
//! with right-hand side `m^{1/2} f`. The Euclidean residual of the transformed
//! system is exactly the m-weighted residual of the original one.

use std::collections::{BTreeMap, VecDeque};

use crate::error::{Error, Result};
use crate::function::VertexFunction;
use crate::graph::WeightedGraph;
use crate::vertex::Vertex;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    /// Relative residual tolerance.
    pub tol: f64,
    /// Iteration cap; `None` means 20 × the number of unknowns.
    pub max_iter: Option<usize>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-10,
            max_iter: None,
        }
    }
}

impl SolverOptions {
    pub fn with_tol(tol: f64) -> Self {
        SolverOptions { tol, ..Self::default() }
    }

    fn check(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "solver tolerance must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iter == Some(0) {
            return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

/// `(L_G + α) u = f` with `u ≡ 0` off `G`.
#[derive(Clone, Debug)]
pub struct DirichletProblem<'g> {
    graph: &'g WeightedGraph,
    domain: Vec<usize>,
    alpha: f64,
    rhs: VertexFunction,
}

impl<'g> DirichletProblem<'g> {
    /// `rhs` values outside the domain are ignored (the problem sees `f·1_G`).
    pub fn new<'a>(
        graph: &'g WeightedGraph,
        domain: impl IntoIterator<Item = &'a Vertex>,
        alpha: f64,
        rhs: VertexFunction,
    ) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidArgument(format!("alpha must be positive, got {alpha}")));
        }
        let mut idx = domain
            .into_iter()
            .map(|v| graph.require(v))
            .collect::<Result<Vec<_>>>()?;
        idx.sort_unstable();
        idx.dedup();
        if idx.is_empty() {
            return Err(Error::InvalidArgument("domain must be nonempty".into()));
        }
        for v in rhs.support() {
            if !graph.contains(v) {
                return Err(Error::SupportEscapes(v.clone()));
            }
        }
        Ok(DirichletProblem {
            graph,
            domain: idx,
            alpha,
            rhs,
        })
    }

    /// The problem on every vertex of `graph`.
    pub fn on_whole_graph(graph: &'g WeightedGraph, alpha: f64, rhs: VertexFunction) -> Result<Self> {
        Self::new(graph, graph.vertices(), alpha, rhs)
    }

    pub fn graph(&self) -> &WeightedGraph {
        self.graph
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn domain(&self) -> impl Iterator<Item = &Vertex> {
        self.domain.iter().map(|&i| self.graph.vertex(i))
    }
}

/// The symmetrized sparse system in canonical row order.
#[derive(Clone, Debug)]
pub struct SymmetricSystem {
    /// Graph index of each unknown.
    pub rows: Vec<usize>,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    diag: Vec<f64>,
    rhs: Vec<f64>,
    sqrt_m: Vec<f64>,
}

impl SymmetricSystem {
    fn build(g: &WeightedGraph, rows: Vec<usize>, alpha: f64, f: &[f64]) -> Result<Self> {
        let mut pos = vec![usize::MAX; g.len()];
        for (k, &i) in rows.iter().enumerate() {
            pos[i] = k;
        }
        let sqrt_m: Vec<f64> = rows.iter().map(|&i| g.measure(i).sqrt()).collect();
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut diag = Vec::with_capacity(rows.len());
        row_ptr.push(0);
        for (k, &i) in rows.iter().enumerate() {
            let d = (g.degree(i) + g.killing(i)) / g.measure(i) + alpha;
            diag.push(d);
            for &(j, w) in g.neighbors(i) {
                let kj = pos[j];
                if kj != usize::MAX {
                    cols.push(kj);
                    vals.push(-w / (sqrt_m[k] * sqrt_m[kj]));
                }
            }
            row_ptr.push(cols.len());
        }
        let rhs: Vec<f64> = f.iter().zip(&sqrt_m).map(|(x, s)| x * s).collect();
        if diag.iter().chain(&vals).chain(&rhs).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("system assembly"));
        }
        Ok(SymmetricSystem {
            rows,
            row_ptr,
            cols,
            vals,
            diag,
            rhs,
            sqrt_m,
        })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    /// Transformed right-hand side `m^{1/2} f`.
    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    /// Off-diagonal entries `(col, value)` of row `k`.
    pub fn row(&self, k: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.row_ptr[k]..self.row_ptr[k + 1]).map(move |p| (self.cols[p], self.vals[p]))
    }

    /// y = |S| |x|, the magnitude of each row's terms.
    fn abs_apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.len())
            .map(|k| self.diag[k] * x[k].abs() + self.row(k).map(|(j, v)| v.abs() * x[j].abs()).sum::<f64>())
            .collect()
    }

    /// y = S x.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for k in 0..self.len() {
            let mut s = self.diag[k] * x[k];
            for p in self.row_ptr[k]..self.row_ptr[k + 1] {
                s += self.vals[p] * x[self.cols[p]];
            }
            y[k] = s;
        }
    }

    /// Dense copy of S, row-major. Intended for small systems.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        let mut out = vec![vec![0.0; n]; n];
        for (k, row) in out.iter_mut().enumerate() {
            row[k] = self.diag[k];
            for (j, v) in self.row(k) {
                row[j] += v;
            }
        }
        out
    }

    fn unscale(&self, w: &[f64]) -> Vec<f64> {
        w.iter().zip(&self.sqrt_m).map(|(x, s)| x / s).collect()
    }
}

/// Assembles the m-symmetrized system for `p`.
pub fn assemble(p: &DirichletProblem<'_>) -> Result<SymmetricSystem> {
    let f: Vec<f64> = p.domain.iter().map(|&i| p.rhs.get(p.graph.vertex(i))).collect();
    SymmetricSystem::build(p.graph, p.domain.clone(), p.alpha, &f)
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub solution: VertexFunction,
    pub iterations: usize,
    /// m-weighted 2-norm of the residual, recomputed from the final iterate.
    pub residual_norm: f64,
    pub converged: bool,
}

struct CgOutcome {
    w: Vec<f64>,
    iterations: usize,
    residual: f64,
    converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn true_residual(sys: &SymmetricSystem, w: &[f64], r: &mut [f64]) -> f64 {
    sys.apply(w, r);
    for (ri, bi) in r.iter_mut().zip(&sys.rhs) {
        *ri = bi - *ri;
    }
    norm(r)
}

/// Stopping rule. The m-weighted 2-norm bound is the contract. On top of it
/// every component of `(L + α)u − f` must be below `tol·max(1, ‖f‖_∞)` or,
/// where roundoff in the row itself is larger than that, below `tol` times the
/// row's own magnitude `(|L| + α)|u| + |f|` (componentwise backward error).
/// For α > 0 the resolvent is an ℓ^∞ contraction, so this keeps light vertices
/// accurate when the measure spans many orders of magnitude.
struct Stop {
    tol: f64,
    norm_bound: f64,
    point_bound: f64,
}

impl Stop {
    fn new(sys: &SymmetricSystem, tol: f64) -> Self {
        let f_sup = sys
            .rhs
            .iter()
            .zip(&sys.sqrt_m)
            .fold(0.0f64, |a, (b, s)| a.max((b / s).abs()));
        Stop {
            tol,
            norm_bound: tol * norm(&sys.rhs).max(1.0),
            point_bound: tol * f_sup.max(1.0),
        }
    }

    fn met(&self, sys: &SymmetricSystem, res: f64, r: &[f64], w: &[f64]) -> bool {
        if res > self.norm_bound {
            return false;
        }
        let mut row_scale: Option<Vec<f64>> = None;
        for k in 0..r.len() {
            // sqrt_m scaling takes the transformed residual back to u-space
            if r[k].abs() <= self.point_bound * sys.sqrt_m[k] {
                continue;
            }
            let scale = row_scale.get_or_insert_with(|| sys.abs_apply(w));
            if r[k].abs() > self.tol * (scale[k] + sys.rhs[k].abs()) {
                return false;
            }
        }
        true
    }
}

fn pcg(sys: &SymmetricSystem, opts: &SolverOptions) -> Result<CgOutcome> {
    let n = sys.len();
    let stop = Stop::new(sys, opts.tol);
    let max_iter = opts.max_iter.unwrap_or(20 * n.max(1));
    let mut w = vec![0.0; n];
    let mut r = sys.rhs.clone();
    let mut res = norm(&r);
    if stop.met(sys, res, &r, &w) {
        return Ok(CgOutcome {
            w,
            iterations: 0,
            residual: res,
            converged: true,
        });
    }
    let inv_diag: Vec<f64> = sys.diag.iter().map(|d| 1.0 / d).collect();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(a, b)| a * b).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut q = vec![0.0; n];
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        sys.apply(&p, &mut q);
        let pq = dot(&p, &q);
        if !pq.is_finite() || !rz.is_finite() {
            return Err(Error::NonFinite("conjugate gradient iteration"));
        }
        if pq <= 0.0 {
            break;
        }
        let step = rz / pq;
        for k in 0..n {
            w[k] += step * p[k];
            r[k] -= step * q[k];
        }
        res = norm(&r);
        if !res.is_finite() {
            return Err(Error::NonFinite("conjugate gradient residual"));
        }
        if stop.met(sys, res, &r, &w) {
            // the recursive residual drifts; only the recomputed one counts,
            // and it replaces the recursive one if the iteration goes on
            res = true_residual(sys, &w, &mut r);
            if stop.met(sys, res, &r, &w) {
                return Ok(CgOutcome {
                    w,
                    iterations,
                    residual: res,
                    converged: true,
                });
            }
        }
        for k in 0..n {
            z[k] = r[k] * inv_diag[k];
        }
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
        rz = rz_next;
    }
    let residual = true_residual(sys, &w, &mut r);
    let converged = stop.met(sys, residual, &r, &w);
    Ok(CgOutcome {
        w,
        iterations,
        residual,
        converged,
    })
}

/// Solves `(L_G + α) u = f`. Non-convergence is reported through
/// [`SolveResult::converged`]; NaN or infinity is an error.
pub fn solve(p: &DirichletProblem<'_>, opts: &SolverOptions) -> Result<SolveResult> {
    opts.check()?;
    let sys = assemble(p)?;
    let out = pcg(&sys, opts)?;
    let u = sys.unscale(&out.w);
    let solution = sys
        .rows
        .iter()
        .zip(u)
        .map(|(&i, x)| (p.graph.vertex(i).clone(), x))
        .collect();
    Ok(SolveResult {
        solution,
        iterations: out.iterations,
        residual_norm: out.residual,
        converged: out.converged,
    })
}

/// Harmonic extension with Dirichlet data: solves
/// `(L̃u)(x)·m(x) + α·m(x)·u(x) = 0` for `x ∈ domain ∖ pinned`, with `u`
/// equal to `pinned` on the pinned set and 0 elsewhere. The returned function
/// is supported on the pinned set and the unknowns.
///
/// `α = 0` is accepted only when every connected component of the unknowns
/// is grounded: it touches a pinned vertex, a vertex outside the domain, the
/// unrealized exterior, or carries killing.
pub fn solve_constrained<'a>(
    g: &WeightedGraph,
    domain: impl IntoIterator<Item = &'a Vertex>,
    pinned: &BTreeMap<Vertex, f64>,
    alpha: f64,
    opts: &SolverOptions,
) -> Result<SolveResult> {
    opts.check()?;
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "alpha must be nonnegative, got {alpha}"
        )));
    }
    let mut pin_value = vec![None; g.len()];
    for (v, &x) in pinned {
        if !x.is_finite() {
            return Err(Error::NonFinite("pinned values"));
        }
        pin_value[g.require(v)?] = Some(x);
    }
    let mut unknowns = Vec::new();
    for v in domain {
        let i = g.require(v)?;
        if pin_value[i].is_none() {
            unknowns.push(i);
        }
    }
    unknowns.sort_unstable();
    unknowns.dedup();

    let mut solution: VertexFunction = pinned.iter().map(|(v, &x)| (v.clone(), x)).collect();
    if unknowns.is_empty() {
        return Ok(SolveResult {
            solution,
            iterations: 0,
            residual_norm: 0.0,
            converged: true,
        });
    }
    if alpha == 0.0 {
        check_grounded(g, &unknowns)?;
    }

    let f: Vec<f64> = unknowns
        .iter()
        .map(|&i| {
            let flux: f64 = g
                .neighbors(i)
                .iter()
                .filter_map(|&(j, w)| pin_value[j].map(|p| w * p))
                .sum();
            flux / g.measure(i)
        })
        .collect();
    let sys = SymmetricSystem::build(g, unknowns, alpha, &f)?;
    let out = pcg(&sys, opts)?;
    for (&i, x) in sys.rows.iter().zip(sys.unscale(&out.w)) {
        solution.set(g.vertex(i).clone(), x);
    }
    Ok(SolveResult {
        solution,
        iterations: out.iterations,
        residual_norm: out.residual,
        converged: out.converged,
    })
}

fn check_grounded(g: &WeightedGraph, unknowns: &[usize]) -> Result<()> {
    let mut in_set = vec![false; g.len()];
    for &i in unknowns {
        in_set[i] = true;
    }
    let mut seen = vec![false; g.len()];
    for &start in unknowns {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut size = 0;
        let mut grounded = false;
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            size += 1;
            grounded |= g.killing(x) > 0.0 || !g.is_closed(x);
            for &(y, w) in g.neighbors(x) {
                if w <= 0.0 {
                    continue;
                }
                if !in_set[y] {
                    grounded = true;
                } else if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        if !grounded {
            return Err(Error::Singular {
                vertex: g.vertex(start).clone(),
                size,
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::ball;
    use crate::families::generate;

    fn v(s: &str) -> Vertex {
        s.parse().unwrap()
    }

    fn p3() -> WeightedGraph {
        let mut b = WeightedGraph::builder();
        b.edge(v("a"), v("b"), 1.0).edge(v("b"), v("c"), 1.0);
        b.build()
    }

    #[test]
    fn assemble_isolated_vertex() {
        let mut b = WeightedGraph::builder();
        b.vertex(v("x"), 1.0, 0.0);
        let g = b.build();
        let p = DirichletProblem::on_whole_graph(&g, 2.5, VertexFunction::indicator(v("x"))).unwrap();
        let sys = assemble(&p).unwrap();
        assert_eq!(sys.to_dense(), vec![vec![2.5]]);
    }

    #[test]
    fn assemble_p3() {
        let g = p3();
        let p = DirichletProblem::on_whole_graph(&g, 1.0, VertexFunction::new()).unwrap();
        let dense = assemble(&p).unwrap().to_dense();
        assert_eq!(
            dense,
            vec![vec![2.0, -1.0, 0.0], vec![-1.0, 3.0, -1.0], vec![0.0, -1.0, 2.0]]
        );
    }

    #[test]
    fn assemble_center_only() {
        let g = p3();
        let p = DirichletProblem::new(&g, [&v("b")], 0.5, VertexFunction::new()).unwrap();
        assert_eq!(assemble(&p).unwrap().to_dense(), vec![vec![2.5]]);
    }

    #[test]
    fn problem_invariants() {
        let g = p3();
        assert!(DirichletProblem::on_whole_graph(&g, 0.0, VertexFunction::new()).is_err());
        assert!(DirichletProblem::new(&g, [], 1.0, VertexFunction::new()).is_err());
        assert!(DirichletProblem::new(&g, [&v("q")], 1.0, VertexFunction::new()).is_err());
    }

    #[test]
    fn scalar_solve() {
        let mut b = WeightedGraph::builder();
        b.vertex(v("x"), 1.0, 0.0);
        let g = b.build();
        let f: VertexFunction = [(v("x"), 6.0)].into_iter().collect();
        let p = DirichletProblem::on_whole_graph(&g, 2.0, f).unwrap();
        let r = solve(&p, &SolverOptions::default()).unwrap();
        assert!(r.converged);
        assert_eq!(r.solution.get(&v("x")), 3.0);
    }

    #[test]
    fn constants_are_resolvent_fixed_points_on_closed_graphs() {
        let g = p3();
        let p = DirichletProblem::on_whole_graph(&g, 1.0, VertexFunction::constant(&g, 1.0)).unwrap();
        let r = solve(&p, &SolverOptions::default()).unwrap();
        for (_, x) in r.solution.iter() {
            assert!((x - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn non_convergence_is_reported() {
        let z = generate("lattice:1").unwrap();
        let b = ball(z.as_ref(), &Vertex::Int(0), 30).unwrap();
        let g = &b.realization;
        let p = DirichletProblem::on_whole_graph(g, 1e-3, VertexFunction::indicator(Vertex::Int(0))).unwrap();
        let r = solve(
            &p,
            &SolverOptions {
                tol: 1e-12,
                max_iter: Some(2),
            },
        )
        .unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 2);
        assert!(r.residual_norm > 0.0);
    }

    #[test]
    fn bad_options() {
        let g = p3();
        let p = DirichletProblem::on_whole_graph(&g, 1.0, VertexFunction::new()).unwrap();
        assert!(solve(
            &p,
            &SolverOptions {
                tol: 0.0,
                max_iter: None
            }
        )
        .is_err());
        assert!(solve(
            &p,
            &SolverOptions {
                tol: 1e-8,
                max_iter: Some(0)
            }
        )
        .is_err());
    }

    #[test]
    fn constrained_z_ball_is_affine() {
        let z = generate("lattice:1").unwrap();
        let n = 6;
        let b = ball(z.as_ref(), &Vertex::Int(0), n).unwrap();
        let domain = b.interior();
        let pinned = BTreeMap::from([(Vertex::Int(0), 1.0)]);
        let r = solve_constrained(&b.realization, &domain, &pinned, 0.0, &SolverOptions::with_tol(1e-14)).unwrap();
        assert!(r.converged);
        for k in -(n as i64)..=n as i64 {
            let expect = 1.0 - k.abs() as f64 / n as f64;
            assert!((r.solution.get(&Vertex::Int(k)) - expect).abs() < 1e-13, "k={k}");
        }
    }

    #[test]
    fn constrained_without_unknowns() {
        let g = p3();
        let pinned = BTreeMap::from([(v("b"), 1.0)]);
        let r = solve_constrained(&g, [], &pinned, 0.0, &SolverOptions::default()).unwrap();
        assert_eq!(r.solution, VertexFunction::indicator(v("b")));
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn ungrounded_zero_alpha_is_singular() {
        let mut b = WeightedGraph::builder();
        b.edge(v("a"), v("b"), 1.0).edge(v("c"), v("d"), 1.0);
        let g = b.build();
        let pinned = BTreeMap::from([(v("a"), 1.0)]);
        let domain = [v("b"), v("c"), v("d")];
        let err = solve_constrained(&g, &domain, &pinned, 0.0, &SolverOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Singular { ref vertex, size: 2 } if *vertex == v("c")));
        // positive alpha makes the same system regular
        assert!(
            solve_constrained(&g, &domain, &pinned, 0.5, &SolverOptions::default())
                .unwrap()
                .converged
        );
    }

    #[test]
    fn killing_grounds_a_component() {
        let mut b = WeightedGraph::builder();
        b.vertex(v("c"), 1.0, 0.5)
            .edge(v("c"), v("d"), 1.0)
            .vertex(v("a"), 1.0, 0.0);
        let g = b.build();
        let pinned = BTreeMap::from([(v("a"), 1.0)]);
        let r = solve_constrained(&g, &[v("c"), v("d")], &pinned, 0.0, &SolverOptions::default()).unwrap();
        assert!(r.converged);
        assert_eq!(r.solution.get(&v("c")), 0.0);
        assert_eq!(r.solution.get(&v("d")), 0.0);
    }
}
