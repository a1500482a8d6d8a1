//! Acceptance suite. Runs every criterion, prints one verdict line each and
//! exits nonzero if any failed.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::Rng;

use dqmat::dualquat::{dq_norm, read_dqm, write_dqm};
use dqmat::handeye::{gen_handeye_instance, random_udq, solve_handeye_pair};
use dqmat::imagecipher::{
    decode_pair, decrypt, encode_pair, encrypt, keygen, read_ppm, ssim, write_ppm, CipherBook, ColorImage,
};
use dqmat::oracle::{fit_in_family, oracle_check};
use dqmat::quat::{pinv, rank};
use dqmat::random::{gaussian_dq, gaussian_qmatrix, grid_dq, grid_qmatrix, DetRng, SeedTree};
use dqmat::selftest::{
    constructed_instance, deficient_grid, penrose_matrix, penrose_residuals, rank_identity_blocks, scaled_residual,
    sweep_instance, three_way, SweepKind,
};
use dqmat::solvers::{
    check_rank_identity, check_sylvester, solve_ax_eq_yb, solve_dq_ax_eq_b, solve_sylvester, solve_yb_eq_c, FreeParams,
    SolverConfig,
};
use dqmat::{DualQuatMatrix, Error, QuatMatrix};

const SEED: u64 = 20240611;

struct Verdict {
    pass: bool,
    summary: String,
}

type Criterion = fn() -> Result<Verdict, Error>;

fn verdict(pass: bool, summary: String) -> Verdict {
    Verdict { pass, summary }
}

fn tree(criterion: &str) -> SeedTree {
    SeedTree::new(SEED).child(criterion)
}

/// Two 64x64 images with gradients, edges and texture.
fn test_images() -> (ColorImage, ColorImage) {
    let mut rng = tree("images").rng("noise");
    let bike = ColorImage::from_fn(64, 64, |r, c| {
        let ring = ((r as f64 - 30.0).hypot(c as f64 - 34.0) as usize / 6) % 2;
        [
            (4 * c) as u8,
            (3 * r + 20 * ring) as u8,
            if (r / 8 + c / 8) % 2 == 0 { 200 } else { 40 },
        ]
    });
    let texture = ColorImage::from_fn(64, 64, |r, c| {
        [
            rng.random(),
            ((r * c) % 256) as u8,
            (255 - 4 * r.min(63)) as u8 ^ (c as u8),
        ]
    });
    (bike, texture)
}

struct Pipeline {
    plain: (ColorImage, ColorImage),
    decoded: (ColorImage, ColorImage),
    x: DualQuatMatrix,
    x_back: DualQuatMatrix,
    elapsed: Duration,
}

/// keygen, encrypt, decrypt through files, as the command line does it.
fn cipher_pipeline() -> Result<Pipeline, Error> {
    let dir = tempfile::tempdir()?;
    let d = dir.path();
    let (i0, i1) = test_images();
    write_ppm(d.join("i0.ppm"), &i0)?;
    write_ppm(d.join("i1.ppm"), &i1)?;

    let start = Instant::now();
    let (p0, p1) = (read_ppm(d.join("i0.ppm"))?, read_ppm(d.join("i1.ppm"))?);
    let (book, key) = keygen(p0.height(), p0.width(), SEED)?;
    book.save(d.join("book"))?;
    write_dqm(d.join("key.dqm"), &key)?;

    let book = CipherBook::load(d.join("book"))?;
    let key = read_dqm(d.join("key.dqm"))?;
    let x = encode_pair(&p0, &p1)?;
    write_dqm(d.join("C.dqm"), &encrypt(&x, &book, &key)?)?;

    let dec = decrypt(&read_dqm(d.join("C.dqm"))?, &book, &key)?;
    let (o0, o1) = decode_pair(&dec.x);
    write_ppm(d.join("o0.ppm"), &o0)?;
    write_ppm(d.join("o1.ppm"), &o1)?;
    let decoded = (read_ppm(d.join("o0.ppm"))?, read_ppm(d.join("o1.ppm"))?);
    let elapsed = start.elapsed();
    Ok(Pipeline {
        plain: (p0, p1),
        decoded,
        x,
        x_back: dec.x,
        elapsed,
    })
}

fn criterion_1() -> Result<Verdict, Error> {
    let p = cipher_pipeline()?;
    let s0 = ssim(&p.plain.0, &p.decoded.0)?;
    let s1 = ssim(&p.plain.1, &p.decoded.1)?;
    let secs = p.elapsed.as_secs_f64();
    Ok(verdict(
        s0 >= 0.99 && s1 >= 0.99 && secs <= 10.0,
        format!("SSIM {s0:.6} / {s1:.6} on 64x64, pipeline {secs:.2} s"),
    ))
}

fn criterion_2() -> Result<Verdict, Error> {
    let p = cipher_pipeline()?;
    let e0 = p.plain.0.max_abs_diff(&p.decoded.0)?;
    let e1 = p.plain.1.max_abs_diff(&p.decoded.1)?;
    let rel = dq_norm(&(&p.x_back - &p.x)) / dq_norm(&p.x);
    Ok(verdict(
        e0.max(e1) <= 1 && rel <= 1e-9,
        format!("max channel error {}, float relative error {rel:.2e}", e0.max(e1)),
    ))
}

fn criterion_3() -> Result<Verdict, Error> {
    let t = tree("constructed");
    let cfg = SolverConfig::default();
    let start = Instant::now();
    let (mut worst, mut unsolvable, mut deficient) = (0.0f64, 0usize, 0usize);
    for i in 0..100u64 {
        let inst = constructed_instance(&t.indexed("instance", i), 6);
        let (a0, b0) = (inst.a.std(), inst.b.std());
        if rank(a0)? < a0.rows().min(a0.cols()) && rank(b0)? < b0.rows().min(b0.cols()) {
            deficient += 1;
        }
        if !check_sylvester(&inst.a, &inst.b, &inst.c, cfg)?.solvable() {
            unsolvable += 1;
            continue;
        }
        let sol = solve_sylvester(&inst.a, &inst.b, &inst.c, cfg)?;
        for draw in 0..10u64 {
            let (x, y) = sol.instantiate(&FreeParams::Random(t.indexed("draw", 10 * i + draw).seed()))?;
            worst = worst.max(scaled_residual(&inst.a, &inst.b, &inst.c, &x, &y));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Ok(verdict(
        unsolvable == 0 && worst <= 1e-8 && secs <= 60.0 && deficient == 100,
        format!(
            "100 instances ({deficient} with deficient A0 and B0), {unsolvable} reported unsolvable, \
             worst scaled residual {worst:.2e} over 1000 draws, {secs:.2} s"
        ),
    ))
}

fn criterion_4() -> Result<Verdict, Error> {
    let t = tree("sweep");
    let (mut agree, mut dead, mut disagree) = (0usize, Vec::new(), Vec::new());
    let (mut consistent, mut inconsistent) = (0usize, 0usize);
    for i in 0..200u64 {
        let inst = sweep_instance(&t.indexed("instance", i));
        let tw = three_way(&inst.a, &inst.b, &inst.c, SolverConfig::default())?;
        if tw.oracle.consistent {
            consistent += 1;
        } else {
            inconsistent += 1;
        }
        if tw.dead_zone {
            dead.push((i, inst.kind));
        } else if tw.agree() {
            agree += 1;
        } else {
            disagree.push(i);
        }
    }
    for (i, kind) in &dead {
        println!("    dead zone: instance {i} ({})", kind_name(*kind));
    }
    for i in &disagree {
        println!("    disagreement: instance {i}");
    }
    Ok(verdict(
        disagree.is_empty() && dead.len() <= 10 && consistent > 0 && inconsistent > 0,
        format!(
            "{agree} agree, {} disagree, {} dead zone of 200 ({consistent} consistent, {inconsistent} inconsistent)",
            disagree.len(),
            dead.len()
        ),
    ))
}

fn kind_name(k: SweepKind) -> &'static str {
    match k {
        SweepKind::Consistent => "consistent",
        SweepKind::RandomRhs => "random C",
        SweepKind::RandomInfinitesimal => "random infinitesimal part",
    }
}

fn criterion_5() -> Result<Verdict, Error> {
    let t = tree("rank identity");
    let mut mismatches = String::new();
    for i in 0..50u64 {
        let [a, m, n, f, k] = rank_identity_blocks(&t.indexed("instance", i));
        let (lhs, rhs) = check_rank_identity(&a, &m, &n, &f, &k)?;
        if lhs != rhs {
            write!(mismatches, " #{i}: {lhs} vs {rhs}").unwrap();
        }
    }
    Ok(verdict(
        mismatches.is_empty(),
        format!(
            "50 block instances, rank mismatches:{}",
            if mismatches.is_empty() { " none" } else { &mismatches }
        ),
    ))
}

fn criterion_6() -> Result<Verdict, Error> {
    let t = tree("penrose");
    let (mut worst, mut back, mut largest, mut deficient) = (0.0f64, 0.0f64, (0, 0), 0usize);
    for i in 0..100u64 {
        let a = penrose_matrix(&t.indexed("instance", i));
        let g = pinv(&a)?;
        let scale = 1.0 + a.frobenius_norm();
        worst = worst.max(penrose_residuals(&a, &g).into_iter().fold(0.0, f64::max) / scale);
        back = back.max((pinv(&g)? - &a).frobenius_norm() / scale);
        if a.rows() * a.cols() > largest.0 * largest.1 {
            largest = a.shape();
        }
        if rank(&a)? < a.rows().min(a.cols()) {
            deficient += 1;
        }
    }
    Ok(verdict(
        worst <= 1e-10 && back <= 1e-9 && deficient > 0 && deficient < 100,
        format!(
            "100 matrices up to {}x{} ({deficient} deficient), worst Penrose residual {worst:.2e}, pinv(pinv) {back:.2e}",
            largest.0, largest.1
        ),
    ))
}

/// Gaussian dual matrix whose standard part has rank `min(rows, cols) - deficit`.
fn deficient_gaussian(rng: &mut DetRng, rows: usize, cols: usize, deficit: usize) -> DualQuatMatrix {
    let r = rows.min(cols).saturating_sub(deficit);
    let std = if r == 0 {
        QuatMatrix::zeros(rows, cols)
    } else {
        &gaussian_qmatrix(rng, rows, r) * &gaussian_qmatrix(rng, r, cols)
    };
    DualQuatMatrix::new(std, gaussian_qmatrix(rng, rows, cols)).expect("shape")
}

fn criterion_7() -> Result<Verdict, Error> {
    let t = tree("special cases");
    let cfg = SolverConfig::default();
    let (mut left, mut right, mut homog) = (0.0f64, 0.0f64, 0.0f64);
    let mut unsolvable = 0usize;
    let mut zero = 0usize;
    for i in 0..50u64 {
        let mut rng = t.indexed("instance", i).rng("data");
        let mut dim = || rng.random_range(1..=5usize);
        let (n, k, p) = (dim(), dim(), dim());
        let deficit = rng.random_range(0..=1);
        let free = FreeParams::Random(t.indexed("free", i).seed());

        let a = deficient_gaussian(&mut rng, n, k, deficit);
        let b = &a * &gaussian_dq(&mut rng, k, p);
        match solve_dq_ax_eq_b(&a, &b, &free, cfg) {
            Ok((x, _)) => left = left.max(dq_norm(&(&(&a * &x) - &b))),
            Err(Error::Unsolvable(_)) => unsolvable += 1,
            Err(e) => return Err(e),
        }

        let bm = deficient_gaussian(&mut rng, k, p, deficit);
        let c = &gaussian_dq(&mut rng, n, k) * &bm;
        match solve_yb_eq_c(&bm, &c, &free, cfg) {
            Ok((y, _)) => right = right.max(dq_norm(&(&(&y * &bm) - &c))),
            Err(Error::Unsolvable(_)) => unsolvable += 1,
            Err(e) => return Err(e),
        }

        let (a2, b2) = (gaussian_dq(&mut rng, n, k), gaussian_dq(&mut rng, p, n.max(1)));
        match solve_ax_eq_yb(&a2, &b2, &free, cfg) {
            Ok((x, y)) => {
                homog = homog.max(dq_norm(&(&(&a2 * &x) - &(&y * &b2))));
                if dq_norm(&x) == 0.0 && dq_norm(&y) == 0.0 {
                    zero += 1;
                }
            }
            Err(Error::Unsolvable(_)) => unsolvable += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(verdict(
        left <= 1e-9 && right <= 1e-9 && homog <= 1e-9 && unsolvable == 0 && zero == 0,
        format!(
            "AX = B {left:.2e}, YB = C {right:.2e}, AX = YB {homog:.2e} (50 each), \
             {unsolvable} unsolvable verdicts, {zero} trivial solutions"
        ),
    ))
}

fn criterion_8() -> Result<Verdict, Error> {
    let t = tree("hand-eye");
    let mut rng = t.rng("truth");
    let (x, y) = (random_udq(&mut rng), random_udq(&mut rng));
    let worst = |noise: f64, label: &str| -> Result<f64, Error> {
        let pairs = gen_handeye_instance(&x, &y, 20, noise, t.child(label).seed());
        let mut w = 0.0f64;
        for (i, (a, b)) in pairs.iter().enumerate() {
            let s = solve_handeye_pair(a.as_matrix(), b.as_matrix(), t.indexed(label, i as u64).seed())?;
            w = w.max(s.residual);
        }
        Ok(w)
    };
    let clean = worst(0.0, "noiseless")?;
    let noisy = worst(1e-3, "noisy")?;
    Ok(verdict(
        clean <= 1e-8 && noisy <= 1e-2,
        format!("20 pairs, worst residual {clean:.2e} noiseless, {noisy:.2e} at noise 1e-3"),
    ))
}

/// Consistent instance with every dimension in `1..=2`.
fn small_instance(tree: &SeedTree) -> (DualQuatMatrix, DualQuatMatrix, DualQuatMatrix) {
    let mut rng = tree.rng("small");
    let mut dim = || rng.random_range(1..=2usize);
    let (n, k, l, m) = (dim(), dim(), dim(), dim());
    let (da, db) = (rng.random_range(0..=1), rng.random_range(0..=1));
    let a = DualQuatMatrix::new(deficient_grid(&mut rng, n, k, da), grid_qmatrix(&mut rng, n, k)).expect("shape");
    let b = DualQuatMatrix::new(deficient_grid(&mut rng, l, m, db), grid_qmatrix(&mut rng, l, m)).expect("shape");
    let c = &(&a * &grid_dq(&mut rng, k, m)) - &(&grid_dq(&mut rng, n, l) * &b);
    (a, b, c)
}

fn criterion_9() -> Result<Verdict, Error> {
    let t = tree("coverage");
    let (mut worst, mut missing) = (0.0f64, 0usize);
    for i in 0..20u64 {
        let (a, b, c) = small_instance(&t.indexed("instance", i));
        let Some((x, y)) = oracle_check(&a, &b, &c)?.solution else {
            missing += 1;
            continue;
        };
        let sol = solve_sylvester(&a, &b, &c, SolverConfig::default())?;
        worst = worst.max(fit_in_family(&sol, &x, &y)?.residual);
    }
    Ok(verdict(
        missing == 0 && worst <= 1e-8,
        format!(
            "20 instances with dims <= 2, worst reconstruction residual {worst:.2e}, {missing} without oracle solution"
        ),
    ))
}

fn main() {
    let criteria: [(&str, Criterion); 9] = [
        ("SSIM after decryption", criterion_1),
        ("decryption exactness", criterion_2),
        ("Sylvester solver correctness", criterion_3),
        ("three-way equivalence sweep", criterion_4),
        ("block rank identity", criterion_5),
        ("Penrose suite", criterion_6),
        ("special-case solvers", criterion_7),
        ("hand-eye demo", criterion_8),
        ("oracle solutions inside the family", criterion_9),
    ];
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let (pass, summary) = match run() {
            Ok(v) => (v.pass, v.summary),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {}: {} {name}: {summary}",
            n + 1,
            if pass { "PASS" } else { "FAIL" }
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
