use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;

use dqmat::dualquat::{dq_norm, read_dqm, write_dqm};
use dqmat::quat::{read_qm, write_qm};
use dqmat::random::SeedTree;
use dqmat::selftest::{sweep_instance, three_way};
use dqmat::solvers::{
    ax_eq_yb_family, check_sylvester, solve_axb_eq_c, solve_dq_ax_eq_b, solve_sylvester, solve_yb_eq_c, FreeParams,
    SolverConfig,
};
use dqmat::{DualQuatMatrix, Error, Result};

use crate::outcome::{write_report, Outcome};
use crate::{CheckArgs, Equation, Free, SolveArgs};

fn config(tol: f64) -> Result<SolverConfig> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidArgument(format!("--tol must be positive, got {tol}")));
    }
    Ok(SolverConfig {
        tol,
        ..SolverConfig::default()
    })
}

fn expect_inputs(args: &SolveArgs, names: &[&str]) -> Result<()> {
    if args.inputs.len() != names.len() {
        return Err(Error::InvalidArgument(format!(
            "this equation takes {} inputs ({}), got {}",
            names.len(),
            names.join(" "),
            args.inputs.len()
        )));
    }
    Ok(())
}

fn dq(paths: &[PathBuf], i: usize) -> Result<DualQuatMatrix> {
    read_dqm(&paths[i])
}

/// Writes `name` into the output directory and says so.
fn emit_dq(dir: &Path, name: &str, m: &DualQuatMatrix) -> Result<()> {
    let p = dir.join(name);
    write_dqm(&p, m)?;
    println!("wrote {} ({}x{})", p.display(), m.rows(), m.cols());
    Ok(())
}

fn scaled(residual: f64, rhs: f64) -> f64 {
    residual / (1.0 + rhs)
}

pub fn cmd_solve(args: &SolveArgs) -> Result<Outcome> {
    let cfg = config(args.flags.tol)?;
    let free = match args.free {
        Free::Zero => FreeParams::Zero,
        Free::Random => FreeParams::Random(args.seed),
    };
    fs::create_dir_all(&args.out)?;
    let (name, result) = match args.equation {
        Equation::Axb => ("AXB = C", solve_axb(args, cfg, &free)),
        Equation::AxB => ("AX = B", solve_ax_b(args, cfg, &free)),
        Equation::YbC => ("YB = C", solve_yb_c(args, cfg, &free)),
        Equation::AxYb => ("AX = YB", solve_ax_yb(args, cfg, &free)),
        Equation::Axmyb => ("AX - YB = C", solve_axmyb(args, cfg, &free)),
    };
    match result {
        Ok((residual, report)) => {
            println!("residual {residual:.3e}");
            write_report(
                args.flags.report.as_deref(),
                &json!({ "equation": name, "solvable": true, "residual": residual, "report": report }),
            )?;
            Ok(Outcome::Ok)
        }
        Err(Error::Unsolvable(u)) => {
            println!("{u}");
            write_report(
                args.flags.report.as_deref(),
                &json!({ "equation": name, "solvable": false, "failed": u.to_string() }),
            )?;
            Ok(Outcome::Mismatch)
        }
        Err(e) => Err(e),
    }
}

type Solved = Result<(f64, serde_json::Value)>;

fn solve_axb(args: &SolveArgs, cfg: SolverConfig, free: &FreeParams) -> Solved {
    expect_inputs(args, &["A.qm", "B.qm", "C.qm"])?;
    let (a, b, c) = (
        read_qm(&args.inputs[0])?,
        read_qm(&args.inputs[1])?,
        read_qm(&args.inputs[2])?,
    );
    let (x, report) = solve_axb_eq_c(&a, &b, &c, free, cfg)?;
    println!("{report}");
    let p = args.out.join("X.qm");
    write_qm(&p, &x)?;
    println!("wrote {} ({}x{})", p.display(), x.rows(), x.cols());
    let r = (&(&a * &x) * &b - &c).frobenius_norm();
    Ok((scaled(r, c.frobenius_norm()), json!(report)))
}

fn solve_ax_b(args: &SolveArgs, cfg: SolverConfig, free: &FreeParams) -> Solved {
    expect_inputs(args, &["A.dqm", "B.dqm"])?;
    let (a, b) = (dq(&args.inputs, 0)?, dq(&args.inputs, 1)?);
    let (x, report) = solve_dq_ax_eq_b(&a, &b, free, cfg)?;
    println!("{report}");
    emit_dq(&args.out, "X.dqm", &x)?;
    let r = dq_norm(&(&(&a * &x) - &b));
    Ok((scaled(r, dq_norm(&b)), json!(report)))
}

fn solve_yb_c(args: &SolveArgs, cfg: SolverConfig, free: &FreeParams) -> Solved {
    expect_inputs(args, &["B.dqm", "C.dqm"])?;
    let (b, c) = (dq(&args.inputs, 0)?, dq(&args.inputs, 1)?);
    let (y, report) = solve_yb_eq_c(&b, &c, free, cfg)?;
    println!("{report}");
    emit_dq(&args.out, "Y.dqm", &y)?;
    let r = dq_norm(&(&(&y * &b) - &c));
    Ok((scaled(r, dq_norm(&c)), json!(report)))
}

fn solve_ax_yb(args: &SolveArgs, cfg: SolverConfig, free: &FreeParams) -> Solved {
    expect_inputs(args, &["A.dqm", "B.dqm"])?;
    let (a, b) = (dq(&args.inputs, 0)?, dq(&args.inputs, 1)?);
    let family = ax_eq_yb_family(&a, &b, cfg)?;
    let (x, y) = family.instantiate(free)?;
    emit_dq(&args.out, "X.dqm", &x)?;
    emit_dq(&args.out, "Y.dqm", &y)?;
    Ok((family.residual(&x, &y), json!(family.report)))
}

fn solve_axmyb(args: &SolveArgs, cfg: SolverConfig, free: &FreeParams) -> Solved {
    expect_inputs(args, &["A.dqm", "B.dqm", "C.dqm"])?;
    let (a, b, c) = (dq(&args.inputs, 0)?, dq(&args.inputs, 1)?, dq(&args.inputs, 2)?);
    let report = check_sylvester(&a, &b, &c, cfg)?;
    println!("{report}");
    if !report.solvable() {
        return Err(Error::Unsolvable(report.to_unsolvable()));
    }
    let sol = solve_sylvester(&a, &b, &c, cfg)?;
    let (x, y) = sol.instantiate(free)?;
    emit_dq(&args.out, "X.dqm", &x)?;
    emit_dq(&args.out, "Y.dqm", &y)?;
    Ok((scaled(sol.residual(&x, &y), dq_norm(&c)), json!(report)))
}

pub fn cmd_check(args: &CheckArgs) -> Result<Outcome> {
    let cfg = config(args.flags.tol)?;
    if let Some(n) = args.random {
        return check_random(n, args.seed, cfg, args.flags.report.as_deref());
    }
    if args.inputs.len() != 3 {
        return Err(Error::InvalidArgument(format!(
            "check takes A.dqm B.dqm C.dqm or --random N, got {} files",
            args.inputs.len()
        )));
    }
    let (a, b, c) = (dq(&args.inputs, 0)?, dq(&args.inputs, 1)?, dq(&args.inputs, 2)?);
    let report = check_sylvester(&a, &b, &c, cfg)?;
    println!("{report}");
    write_report(args.flags.report.as_deref(), &json!(report))?;
    Ok(Outcome::verdict(report.solvable()))
}

/// Projector form, rank form and oracle on random instances.
fn check_random(n: usize, seed: u64, cfg: SolverConfig, report: Option<&Path>) -> Result<Outcome> {
    let tree = SeedTree::new(seed);
    let (mut agree, mut dead, mut disagree) = (0usize, 0usize, Vec::new());
    for i in 0..n {
        let inst = sweep_instance(&tree.indexed("check", i as u64));
        let t = three_way(&inst.a, &inst.b, &inst.c, cfg)?;
        if t.dead_zone {
            dead += 1;
        } else if t.agree() {
            agree += 1;
        } else {
            disagree.push(i);
            println!(
                "instance {i}: projector {} rank {} oracle {}",
                t.report.cond2_holds, t.report.cond3_holds, t.oracle.consistent
            );
        }
    }
    println!(
        "{agree} agree, {} disagree, {dead} in dead zone (of {n})",
        disagree.len()
    );
    write_report(
        report,
        &json!({ "instances": n, "seed": seed, "agree": agree, "dead_zone": dead, "disagree": disagree }),
    )?;
    Ok(Outcome::verdict(disagree.is_empty()))
}
