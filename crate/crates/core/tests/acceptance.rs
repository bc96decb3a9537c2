//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any criterion fails.

use std::time::{Duration, Instant};

use compmat::classify::{
    classify_full, diag_commutation_residual, multiplicative_certificate, transpose_diag_residual,
    try_into_composition, Clause, Tolerance,
};
use compmat::oracle::{
    count_classes, enumerate_binary, random_injection, random_injection_with, theorem1_sweep,
    theorem2_sweep, SweepConfig,
};
use compmat::recover::{multiplicativity_score, project_injective, project_rowwise};
use compmat::{
    hadamard, injection_to_matrix, matrix_to_injection, BinaryMatrix, CompositionMatrix,
    DenseRealMatrix, RealVector,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn first_example() -> DenseRealMatrix {
    BinaryMatrix::from_rows(&[[1, 0, 0, 0], [1, 0, 0, 0], [0, 0, 0, 0]])
        .unwrap()
        .to_dense()
}

fn second_example() -> DenseRealMatrix {
    BinaryMatrix::from_rows(&[[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 0]])
        .unwrap()
        .to_dense()
}

fn ac1_worked_examples() -> Outcome {
    let r = classify_full(&first_example(), Tolerance::exact());
    ensure!(
        r.is_row_permutation_like && !r.is_column_permutation_like && !r.is_composition_matrix,
        "first example misclassified: {r:?}"
    );
    let r = classify_full(&second_example(), Tolerance::exact());
    ensure!(
        r.is_row_permutation_like && r.is_column_permutation_like && !r.is_composition_matrix,
        "second example misclassified: {r:?}"
    );
    ensure!(
        r.witnesses
            .iter()
            .any(|w| w.clause == Clause::ZeroRow && w.indices == vec![3]),
        "second example lacks a zero-row witness for row 3: {:?}",
        r.witnesses
    );
    Ok("both example matrices classified as expected".into())
}

fn sweep_both_grids(sweep: fn(&SweepConfig) -> compmat::Result<compmat::SweepVerdict>) -> Outcome {
    let binary = SweepConfig::binary(12, 12).with_max_cells(12);
    let real = SweepConfig::new(4, 4).with_max_cells(4);
    let mut total = 0;
    for cfg in [binary, real] {
        let v = sweep(&cfg).map_err(|e| e.to_string())?;
        ensure!(v.passed(), "counterexample: {:?}", v.counterexample);
        total += v.matrices_checked;
    }
    Ok(format!("{total} matrices, no counterexample"))
}

fn ac2_row_sweep() -> Outcome {
    sweep_both_grids(theorem1_sweep)
}

fn ac3_column_sweep() -> Outcome {
    sweep_both_grids(theorem2_sweep)
}

fn ac4_composition_definition() -> Outcome {
    let mut checked = 0;
    let mut accepted = 0;
    for m in 1..=3 {
        for n in 1..=4 {
            for b in enumerate_binary(m, n).map_err(|e| e.to_string())? {
                let a = b.to_dense();
                let sums_one = a.row_sums().iter().all(|&s| s == 1.0);
                let expected = m <= n
                    && multiplicative_certificate(&a, Tolerance::exact()).holds()
                    && multiplicative_certificate(&a.transpose(), Tolerance::exact()).holds()
                    && sums_one;
                let got = try_into_composition(&b).is_ok();
                ensure!(
                    got == expected,
                    "{m}x{n} {:?}: try_into={got}, definition={expected}",
                    a
                );
                let flag = classify_full(&a, Tolerance::exact()).is_composition_matrix;
                ensure!(flag == got, "{m}x{n} {:?}: classify_full disagrees", a);
                checked += 1;
                accepted += got as u32;
            }
        }
    }
    Ok(format!(
        "{checked} binary matrices, {accepted} composition matrices"
    ))
}

fn falling(n: u64, k: u64) -> u64 {
    (0..k).map(|i| n - i).product()
}

fn ac5_counting() -> Outcome {
    let mut shapes = 0;
    for m in 1..=12usize {
        for n in 1..=12usize {
            if m * n > 12 {
                continue;
            }
            let c = count_classes(m, n).map_err(|e| e.to_string())?;
            let row = (n as u64 + 1).pow(m as u32);
            let col = (m as u64 + 1).pow(n as u32);
            let comp = if m <= n {
                falling(n as u64, m as u64)
            } else {
                0
            };
            ensure!(
                (
                    c.n_row_permutation_like,
                    c.n_column_permutation_like,
                    c.n_composition
                ) == (row, col, comp),
                "({m},{n}): enumerated {:?}, closed forms {row}/{col}/{comp}",
                c
            );
            shapes += 1;
        }
    }
    let c = count_classes(2, 3).map_err(|e| e.to_string())?;
    ensure!(
        (
            c.n_row_permutation_like,
            c.n_column_permutation_like,
            c.n_composition
        ) == (16, 27, 6),
        "(2,3) counts {c:?}"
    );
    Ok(format!("{shapes} shapes match (n+1)^m, (m+1)^n, n!/(n-m)!"))
}

fn random_vec(rng: &mut ChaCha8Rng, len: usize) -> RealVector {
    RealVector::new((0..len).map(|_| rng.gen_range(-100.0..100.0)).collect()).unwrap()
}

fn ac6_randomized_composition() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    for trial in 0..10_000 {
        let m = rng.gen_range(1..=50);
        let n = rng.gen_range(m..=100);
        let pi = random_injection_with(m, n, &mut rng).map_err(|e| e.to_string())?;
        let p = injection_to_matrix(&pi);
        ensure!(
            matrix_to_injection(&p) == pi,
            "trial {trial}: round trip failed"
        );
        let dense = p.to_dense();
        for _ in 0..10 {
            let (f, g) = (random_vec(&mut rng, n), random_vec(&mut rng, n));
            let lhs = p.apply_pullback(&hadamard(&f, &g).unwrap()).unwrap();
            let rhs = hadamard(
                &p.apply_pullback(&f).unwrap(),
                &p.apply_pullback(&g).unwrap(),
            )
            .unwrap();
            ensure!(lhs == rhs, "trial {trial}: P(f.g) != (Pf).(Pg)");

            let (fm, gm) = (random_vec(&mut rng, m), random_vec(&mut rng, m));
            let lhs = p.apply_pushforward(&hadamard(&fm, &gm).unwrap()).unwrap();
            let rhs = hadamard(
                &p.apply_pushforward(&fm).unwrap(),
                &p.apply_pushforward(&gm).unwrap(),
            )
            .unwrap();
            ensure!(lhs == rhs, "trial {trial}: P^T(f.g) != (P^Tf).(P^Tg)");

            let r = diag_commutation_residual(&dense, f.as_slice()).unwrap();
            ensure!(
                r == 0.0,
                "trial {trial}: P diag(f) - diag(Pf) P residual {r}"
            );
            let r = transpose_diag_residual(&dense, fm.as_slice()).unwrap();
            ensure!(
                r == 0.0,
                "trial {trial}: diag(f) P - P diag(P^T f) residual {r}"
            );
        }
    }
    Ok("10000 injections x 10 probes, all residuals exactly 0".into())
}

/// Exhaustive maximum of `sum_i c[i, pi(i)]` over all injections, summed in
/// row order.
fn brute_force_best(c: &DenseRealMatrix) -> f64 {
    fn go(c: &DenseRealMatrix, row: usize, used: &mut [bool], acc: f64, best: &mut f64) {
        if row == c.rows() {
            *best = best.max(acc);
            return;
        }
        for j in 0..c.cols() {
            if !used[j] {
                used[j] = true;
                go(c, row + 1, used, acc + c.get(row, j), best);
                used[j] = false;
            }
        }
    }
    let mut best = f64::NEG_INFINITY;
    go(c, 0, &mut vec![false; c.cols()], 0.0, &mut best);
    best
}

fn ac7_recovery() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
    for trial in 0..1000 {
        let m = rng.gen_range(1..=6);
        let n = rng.gen_range(m..=6);
        let data = (0..m * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let c = DenseRealMatrix::new(m, n, data).unwrap();
        let got = project_injective(&c).map_err(|e| e.to_string())?.score;
        let want = brute_force_best(&c);
        ensure!(
            got == want,
            "trial {trial}: injective score {got} vs brute force {want}"
        );
    }
    for trial in 0..1000u64 {
        let m = 1 + (trial as usize % 12);
        let n = m + (trial as usize / 12) % 9;
        let p = injection_to_matrix(&random_injection(m, n, trial).unwrap());
        let a = p.to_dense();
        let rw = project_rowwise(&a).map_err(|e| e.to_string())?;
        let inj = project_injective(&a).map_err(|e| e.to_string())?;
        ensure!(
            rw.matrix == p && inj.matrix == p,
            "trial {trial}: fixed point lost"
        );
        let s = multiplicativity_score(&a, 8, trial).map_err(|e| e.to_string())?;
        ensure!(s == 0.0, "trial {trial}: score {s} on a composition matrix");
    }
    let two = DenseRealMatrix::from_rows(&[[2.0]]).unwrap();
    let pair = DenseRealMatrix::from_rows(&[[1.0, 1.0]]).unwrap();
    for (name, c) in [("[[2]]", two), ("[[1,1]]", pair)] {
        let s = multiplicativity_score(&c, 64, 0).map_err(|e| e.to_string())?;
        ensure!(s.is_finite() && s > 0.0, "score on {name} is {s}");
    }
    Ok("1000 optimal assignments, 1000 fixed points, scores as expected".into())
}

fn median_pullback_time(p: &CompositionMatrix, f: &[f64], runs: usize) -> Duration {
    let mut times: Vec<Duration> = (0..runs)
        .map(|_| {
            let start = Instant::now();
            let out = p.pullback_slice(std::hint::black_box(f)).unwrap();
            let elapsed = start.elapsed();
            std::hint::black_box(out);
            elapsed
        })
        .collect();
    times.sort();
    times[runs / 2]
}

fn ac8_linear_time() -> Outcome {
    let timings: Vec<Duration> = [1_000_000usize, 2_000_000]
        .iter()
        .map(|&n| {
            let p = injection_to_matrix(&random_injection(n, n, n as u64).unwrap());
            let f: Vec<f64> = (0..n).map(|i| i as f64).collect();
            median_pullback_time(&p, &f, 3);
            median_pullback_time(&p, &f, 20)
        })
        .collect();
    let ratio = timings[1].as_secs_f64() / (2.0 * timings[0].as_secs_f64());
    ensure!(
        (1.0 / 2.5..=2.5).contains(&ratio),
        "t(2e6) = {:?}, t(1e6) = {:?}: ratio to linear {ratio:.3}",
        timings[1],
        timings[0]
    );
    Ok(format!(
        "t(1e6) = {:?}, t(2e6) = {:?}, t(2e6) / (2 t(1e6)) = {ratio:.3}",
        timings[0], timings[1]
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("AC1 worked examples", ac1_worked_examples),
        ("AC2 row characterisation sweep", ac2_row_sweep),
        ("AC3 column characterisation sweep", ac3_column_sweep),
        (
            "AC4 composition characterisation",
            ac4_composition_definition,
        ),
        ("AC5 class counts", ac5_counting),
        (
            "AC6 randomized composition identities",
            ac6_randomized_composition,
        ),
        ("AC7 recovery", ac7_recovery),
        ("AC8 linear-time pullback", ac8_linear_time),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!("[PASS] {name} ({elapsed:.2?}): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {name} ({elapsed:.2?}): {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
