use dqmat::dualquat::dq_norm;
use dqmat::oracle::oracle_check;
use dqmat::quat::Quaternion;
use dqmat::random::{gaussian_dq, SeedTree};
use dqmat::selftest::{constructed_instance, scaled_residual};
use dqmat::solvers::{check_sylvester, solve_sylvester, FreeParams, SolverConfig};
use dqmat::{DualQuatMatrix, Error, QuatMatrix};

fn cfg() -> SolverConfig {
    SolverConfig::default()
}

#[test]
fn identity_coefficients_always_solvable() {
    let c = gaussian_dq(&mut SeedTree::new(1).rng("c"), 3, 3);
    let id = DualQuatMatrix::identity(3);
    let sol = solve_sylvester(&id, &id, &c, cfg()).unwrap();
    assert!(sol.report.cond2_holds && sol.report.cond3_holds);
    let (x, y) = sol.instantiate(&FreeParams::Random(4)).unwrap();
    assert!(scaled_residual(&id, &id, &c, &x, &y) <= 1e-12);
}

#[test]
fn zero_coefficients_need_zero_rhs() {
    let z = DualQuatMatrix::zeros(2, 2);
    let c = DualQuatMatrix::from_std(QuatMatrix::filled(2, 2, Quaternion::new(1.0, 0.0, 0.0, 0.0)));
    let rep = check_sylvester(&z, &z, &c, cfg()).unwrap();
    assert!(!rep.cond2_holds && !rep.cond3_holds);
    assert!(!rep.cond3[0].holds);
    assert!(matches!(solve_sylvester(&z, &z, &c, cfg()), Err(Error::Unsolvable(_))));
    assert!(check_sylvester(&z, &z, &z, cfg()).unwrap().solvable());
}

#[test]
fn only_the_infinitesimal_part_inconsistent() {
    // A = [1; 0], B = 0: C0 = [q; 0] is reachable, C1 = [0; 1] is not
    let one = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    let col = |top: Quaternion, bottom: Quaternion| QuatMatrix::from_vec(2, 1, vec![top, bottom]).unwrap();
    let a = DualQuatMatrix::from_std(col(one, Quaternion::default()));
    let b = DualQuatMatrix::zeros(1, 1);
    let c = DualQuatMatrix::new(
        col(Quaternion::new(0.5, 1.0, 0.0, -2.0), Quaternion::default()),
        col(Quaternion::default(), one),
    )
    .unwrap();
    let rep = check_sylvester(&a, &b, &c, cfg()).unwrap();
    assert!(!oracle_check(&a, &b, &c).unwrap().consistent);
    assert!(!rep.cond2_holds);
    assert!(rep.cond3[0].holds && !rep.cond3[1].holds);
}

#[test]
fn fixed_sizes_with_oracle() {
    let tree = SeedTree::new(21);
    let mut rng = tree.rng("fixed");
    let a = gaussian_dq(&mut rng, 5, 4);
    let b = gaussian_dq(&mut rng, 3, 4);
    let c = &(&a * &gaussian_dq(&mut rng, 4, 4)) - &(&gaussian_dq(&mut rng, 5, 3) * &b);
    let sol = solve_sylvester(&a, &b, &c, cfg()).unwrap();
    assert!(oracle_check(&a, &b, &c).unwrap().consistent);
    for draw in 0..10 {
        let (x, y) = sol
            .instantiate(&FreeParams::Random(tree.indexed("draw", draw).seed()))
            .unwrap();
        assert!(scaled_residual(&a, &b, &c, &x, &y) <= 1e-8);
    }
}

#[test]
fn free_parameters_move_the_solution() {
    let inst = constructed_instance(&SeedTree::new(30), 5);
    let sol = solve_sylvester(&inst.a, &inst.b, &inst.c, cfg()).unwrap();
    let (x1, y1) = sol.instantiate(&FreeParams::Random(1)).unwrap();
    let (x2, y2) = sol.instantiate(&FreeParams::Random(2)).unwrap();
    assert!(dq_norm(&(&x1 - &x2)) + dq_norm(&(&y1 - &y2)) > 1e-6);
    assert_eq!(sol.instantiate(&FreeParams::Random(1)).unwrap(), (x1, y1));
}

#[test]
fn conformability_is_checked() {
    let mut rng = SeedTree::new(2).rng("dims");
    let a = gaussian_dq(&mut rng, 3, 2);
    let b = gaussian_dq(&mut rng, 2, 2);
    let c = gaussian_dq(&mut rng, 2, 2);
    assert!(matches!(
        check_sylvester(&a, &b, &c, cfg()),
        Err(Error::DimensionMismatch { .. })
    ));
}
