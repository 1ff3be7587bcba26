//! End-to-end runs of the registered examples through the public API.

use bcrbf::harness::{run_example, ExampleId, Method, RunConfig};
use bcrbf::numerics::{Mp, Precision, Real};
use bcrbf::problem::ProblemSpec;
use bcrbf::{kansa_solve, solve, Solution, SolveOptions};

fn mp(d: u32) -> Precision {
    Precision::Digits(d)
}

fn run(id: ExampleId, method: Method, counts: &[usize], c: f64, digits: u32, eps: f64) -> f64 {
    let r = run_example(&RunConfig::new(id, method, counts.to_vec(), c, mp(digits)).eps(eps));
    assert!(r.succeeded(), "{id} {method} {counts:?}: {:?}", r.failure);
    r.max_abs_err
}

/// Worst `|L u_N − d|` over `samples` points on every boundary functional.
fn bc_residual<T: Real>(problem: &ProblemSpec<T>, u: &Solution<T>, samples: usize) -> f64 {
    let d = &problem.domain;
    let mut worst = 0f64;
    for (axis, conds) in problem.conditions.iter().enumerate() {
        for (l, data) in conds.functionals.iter().zip(&conds.data) {
            for i in 0..samples {
                let p: Vec<T> = (0..d.dim())
                    .map(|k| {
                        let t = T::from_ratio(2 * i as i64 + 1, 2 * samples as i64, d.precision());
                        d.lo(k).clone() + &((d.hi(k).clone() - d.lo(k)) * &t)
                    })
                    .collect();
                let applied = l.apply(&|o: usize, s: &T| {
                    let mut q = p.clone();
                    q[axis] = s.clone();
                    let mut orders = vec![0; p.len()];
                    orders[axis] = o;
                    u.partial_at(&q, &orders).unwrap()
                });
                worst = worst.max((applied - &data.value(&p)).abs().to_f64());
            }
        }
    }
    worst
}

#[test]
fn ex4_five_by_five_matches_the_table() {
    // reference: 8.12108e-9 (constrained), 1.56591e-4 (collocation)
    let ours = run(ExampleId::Ex4, Method::Constrained, &[5, 5], 0.01, 100, 0.0);
    let kansa = run(ExampleId::Ex4, Method::Kansa, &[5, 5], 0.01, 100, 0.0);
    assert!(ours > 8.12108e-10 && ours < 8.12108e-8, "{ours:e}");
    assert!(kansa > 1.56591e-5 && kansa < 1.56591e-3, "{kansa:e}");
}

#[test]
fn ex1_half_eps_is_within_the_stated_window() {
    let e = run(ExampleId::Ex1, Method::Constrained, &[32], 0.18, 150, 0.5);
    assert!((1e-21..=1e-15).contains(&e), "{e:e}");
}

#[test]
fn ex4_twenty_by_twenty_reaches_the_deep_table_entry() {
    // D=150 is below log10 cond(A) ≈ 235 for this grid, so the run uses 250 digits
    let e = run(ExampleId::Ex4, Method::Constrained, &[20, 20], 0.01, 250, 0.0);
    assert!(e <= 1e-25, "{e:e}");
}

#[test]
fn kansa_ex7_four_cubed_is_near_the_table() {
    // reference 3.8223e-5
    let e = run(ExampleId::Ex7, Method::Kansa, &[4, 4, 4], 0.01, 100, 0.0);
    assert!(e > 3.8223e-6 && e < 3.8223e-4, "{e:e}");
}

#[test]
fn constrained_solution_satisfies_every_condition_exactly() {
    let d = 40;
    for id in [ExampleId::Ex2, ExampleId::Ex5, ExampleId::Ex6] {
        let problem = id.problem(&Mp::from_ratio(1, 32, mp(d))).unwrap();
        let counts = match id {
            ExampleId::Ex6 => vec![4, 6],
            _ => vec![5, 5],
        };
        // the residual is roundoff times max |λ|, which stays below 1e4 at c = 2
        let u = solve(&problem, &SolveOptions::new(counts, Mp::from_ratio(2, 1, mp(d)))).unwrap();
        let r = bc_residual(&problem, &u, 20);
        assert!(r <= 10f64.powi(10 - d as i32), "{id}: {r:e}");
    }
}

#[test]
fn collocation_violates_conditions_between_nodes() {
    let p = mp(100);
    let problem = ExampleId::Ex4.problem(&Mp::zero_at(p)).unwrap();
    let c = Mp::from_f64_decimal(0.01, p);
    let ours = solve(&problem, &SolveOptions::new(vec![5, 5], c.clone())).unwrap();
    let kansa = kansa_solve(&problem, &[5, 5], &c).unwrap();
    // four samples per edge land halfway between the collocation nodes 0, 1/4, ..., 1
    let (a, b) = (bc_residual(&problem, &ours, 4), bc_residual(&problem, &kansa, 4));
    assert!(b > 10.0 * a && b > 1e-12, "constrained {a:e}, kansa {b:e}");
}

#[test]
fn linear_target_is_reproduced() {
    use bcrbf::functionals::BoundaryFunctional;
    use bcrbf::problem::{AxisConditions, BoxDomain, OperatorSpec};
    let d = BoxDomain::new(vec![(0.0, 1.0)]).unwrap();
    let conds = AxisConditions::from_rhs(vec![
        BoundaryFunctional::dirichlet(0.0),
        BoundaryFunctional::dirichlet(1.0).with_rhs(1.0),
    ])
    .unwrap();
    let zero = bcrbf::field::zero_field(Precision::Binary64);
    let problem = ProblemSpec::new(d, OperatorSpec::laplacian(1, 1.0), vec![conds], zero).unwrap();
    for n in [1, 3, 5] {
        let u = solve(&problem, &SolveOptions::new(vec![n], 1.0)).unwrap();
        assert!((u.evaluate(&[0.5]) - 0.5).abs() < 1e-14);
    }
}
