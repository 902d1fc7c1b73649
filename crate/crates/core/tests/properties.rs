mod common;

use common::{random_function, random_graph, random_interior_function, rng};
use dirichlet_graph::operator::{energy_with, Summation};
use dirichlet_graph::{
    clamp, energy, energy_bilinear, formal_laplacian, green_defect, solve, DirichletProblem, SolverOptions,
    VertexFunction,
};
use proptest::prelude::*;

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 200,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn green_identity_for_interior_test_functions(seed in any::<u64>(), n in 1usize..50, open in any::<bool>()) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, n, open);
        let u = random_function(&mut r, &g);
        let v = random_interior_function(&mut r, &g);
        let q = energy_bilinear(&g, &u, &v).unwrap();
        let d = green_defect(&g, &u, &v).unwrap();
        prop_assert!(d.abs() <= 1e-10 * (1.0 + q.abs()), "defect {d} for Q {q}");
    }

    #[test]
    fn laplacian_is_symmetric_on_interior_functions(seed in any::<u64>(), n in 1usize..50) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, n, true);
        let u = random_interior_function(&mut r, &g);
        let v = random_interior_function(&mut r, &g);
        let lu = formal_laplacian(&g, &u).unwrap();
        let lv = formal_laplacian(&g, &v).unwrap();
        let a = m_inner_fn(&g, &lu, &v);
        let b = m_inner_fn(&g, &u, &lv);
        let q = energy_bilinear(&g, &u, &v).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * (1.0 + q.abs()));
    }

    #[test]
    fn energy_form_is_symmetric_and_positive(seed in any::<u64>(), n in 1usize..50, open in any::<bool>()) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, n, open);
        let u = random_function(&mut r, &g);
        let v = random_function(&mut r, &g);
        prop_assert_eq!(energy_bilinear(&g, &u, &v).unwrap(), energy_bilinear(&g, &v, &u).unwrap());
        let e = energy(&g, &u).unwrap();
        prop_assert!(e.jump_part >= 0.0 && e.killing_part >= 0.0);
        let diag = energy_bilinear(&g, &u, &u).unwrap();
        prop_assert!((e.total - diag).abs() <= 1e-12 * (1.0 + diag));
        let compensated = energy_with(&g, &u, Summation::Compensated).unwrap().total;
        prop_assert!((e.total - compensated).abs() <= 1e-12 * (1.0 + compensated));
    }

    #[test]
    fn normal_contraction_lowers_energy(seed in any::<u64>(), n in 1usize..50, open in any::<bool>()) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, n, open);
        let u = random_function(&mut r, &g);
        let cu = clamp(&u, 0.0, 0.5).unwrap();
        let before = energy(&g, &u).unwrap().total;
        let after = energy(&g, &cu).unwrap().total;
        prop_assert!(after <= before * (1.0 + 1e-12) + 1e-15);
    }

    #[test]
    fn resolvent_is_markovian(seed in any::<u64>(), n in 1usize..40, alpha in 0.01f64..10.0) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, n, true);
        let f: VertexFunction = random_function(&mut r, &g).map(f64::abs);
        let opts = SolverOptions::default();
        let p = DirichletProblem::on_whole_graph(&g, alpha, f.clone()).unwrap();
        let res = solve(&p, &opts).unwrap();
        prop_assert!(res.converged);
        let slack = 2.0 * opts.tol * f.sup_norm().max(1.0);
        for (_, x) in res.solution.iter() {
            prop_assert!(alpha * x >= -slack);
            prop_assert!(alpha * x <= f.sup_norm() + slack);
        }
    }

    #[test]
    fn solver_is_self_adjoint(seed in any::<u64>(), n in 1usize..40, alpha in 0.01f64..10.0) {
        // <G f, h>_m = <f, G h>_m for the restricted resolvent G
        let mut r = rng(seed);
        let g = random_graph(&mut r, n, true);
        let f = random_function(&mut r, &g);
        let h = random_function(&mut r, &g);
        let opts = SolverOptions::with_tol(1e-13);
        let gf = solve(&DirichletProblem::on_whole_graph(&g, alpha, f.clone()).unwrap(), &opts).unwrap().solution;
        let gh = solve(&DirichletProblem::on_whole_graph(&g, alpha, h.clone()).unwrap(), &opts).unwrap().solution;
        let a = m_inner_fn(&g, &gf, &h);
        let b = m_inner_fn(&g, &f, &gh);
        let scale = m_inner_fn(&g, &gf.map(f64::abs), &h.map(f64::abs)).max(1.0);
        prop_assert!((a - b).abs() <= 1e-9 * scale, "{a} vs {b}");
    }
}

fn m_inner_fn(g: &dirichlet_graph::WeightedGraph, a: &VertexFunction, b: &VertexFunction) -> f64 {
    (0..g.len())
        .map(|i| a.get(g.vertex(i)) * b.get(g.vertex(i)) * g.measure(i))
        .sum()
}
