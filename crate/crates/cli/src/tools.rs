use dqmat::handeye::{
    gen_handeye_instance, handeye_residual, random_udq, solve_handeye_pair, Pose, UnitDualQuaternion,
};
use dqmat::random::SeedTree;
use dqmat::selftest::{run_selftest, SelftestOptions};
use dqmat::{Error, Result};

use crate::outcome::Outcome;
use crate::{HandeyeArgs, SelftestArgs};

/// Noiseless pairs must satisfy `a x = y b` to this accuracy.
const HANDEYE_TOL: f64 = 1e-8;

fn pose(p: &Pose) -> String {
    let [ax, ay, az] = p.axis;
    let [tx, ty, tz] = p.translation;
    format!(
        "axis ({ax:+.6}, {ay:+.6}, {az:+.6}) angle {:.6} t ({tx:+.6}, {ty:+.6}, {tz:+.6})",
        p.angle
    )
}

fn show(label: &str, q: &UnitDualQuaternion) {
    println!("  {label}: {}", pose(&q.to_pose()));
}

pub fn cmd_handeye(args: &HandeyeArgs) -> Result<Outcome> {
    if !(args.noise >= 0.0 && args.noise.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "--noise must be non-negative, got {}",
            args.noise
        )));
    }
    let tree = SeedTree::new(args.seed);
    let mut rng = tree.rng("ground-truth");
    let (x, y) = (random_udq(&mut rng), random_udq(&mut rng));
    println!("ground truth");
    show("x", &x);
    show("y", &y);
    let pairs = gen_handeye_instance(&x, &y, args.pairs, args.noise, tree.child("pairs").seed());
    let mut worst = 0.0f64;
    for (i, (a, b)) in pairs.iter().enumerate() {
        let sol = solve_handeye_pair(a.as_matrix(), b.as_matrix(), tree.indexed("solve", i as u64).seed())?;
        let truth = handeye_residual(a, b, &x, &y);
        worst = worst.max(sol.residual);
        println!("pair {i}: residual {:.3e} (ground truth {truth:.3e})", sol.residual);
        show("x", &sol.x);
        show("y", &sol.y);
    }
    println!("worst residual {worst:.3e}");
    Ok(Outcome::verdict(worst <= HANDEYE_TOL))
}

pub fn cmd_selftest(args: &SelftestArgs) -> Result<Outcome> {
    let report = run_selftest(&SelftestOptions {
        trials: args.trials,
        seed: args.seed,
        force_failure: args.force_fail,
    });
    for s in &report.suites {
        println!("{s}");
    }
    Ok(if report.passed() {
        println!("all suites passed");
        Outcome::Ok
    } else if report.numerical_failure() {
        Outcome::Numerical
    } else {
        Outcome::Mismatch
    })
}
