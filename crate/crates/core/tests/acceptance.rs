//! Acceptance checks with pinned tolerances; one PASS/FAIL line per criterion.
//!
//! Select criteria by number (`cargo test --test acceptance -- 3 8`); all run by default.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use specproj::banded::{synth_banded, BandedSymmetric, SpectrumSpec};
use specproj::dense::{norm2, singular_values, sym_norm2, SpectralOracle};
use specproj::fastqr::{assemble_q, reduce_banded, reduce_tridiag};
use specproj::hodlr::PartitionTree;
use specproj::qdwh::{dense_qdwh, error_metrics, hqdwh, HqdwhOptions, QrMode};
use specproj::theory::{simplified_upper_bound, verify_decay, zolotarev};

struct Outcome {
    pass: bool,
    detail: String,
    /// A failure outside the cases documented as unattainable.
    unexpected: bool,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Outcome { pass, detail, unexpected: !pass }
    }
}

fn synthetic(n: usize, b: usize, gap: f64, seed: u64) -> BandedSymmetric {
    synth_banded(&SpectrumSpec::uniform_two_sided(n, gap).unwrap(), b, Some(seed)).unwrap()
}

fn random_banded(n: usize, b: usize, scale: f64, rng: &mut ChaCha8Rng) -> BandedSymmetric {
    let bands = (0..=b).map(|d| (0..n - d).map(|_| scale * rng.random_range(-1.0..1.0)).collect()).collect();
    BandedSymmetric::new(n, b, bands).unwrap()
}

fn first_issue(bad: &[String]) -> String {
    match bad.first() {
        Some(b) => format!("; first: {b}"),
        None => String::new(),
    }
}

fn sci(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.2e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn numerical_rank(m: &DMatrix<f64>, tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    singular_values(m).iter().filter(|&&s| s > tol).count()
}

fn max_offdiag_rank(tree: &PartitionTree, m: &DMatrix<f64>, tol: f64) -> usize {
    tree.off_diagonal_blocks()
        .iter()
        .map(|b| numerical_rank(&m.view((b.row_start, b.col_start), (b.rows, b.cols)).into_owned(), tol))
        .max()
        .unwrap_or(0)
}

fn rotation_counts() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut bad = Vec::new();
    for n in 2..=64 {
        let (g, _) = reduce_tridiag(&random_banded(n, 1, 1.0, &mut rng)).unwrap();
        if g.len() != 3 * n - 2 {
            bad.push(format!("tridiagonal n={n}: {}", g.len()));
        }
        for b in 1..=8.min(n - 1) {
            let (g, _) = reduce_banded(&random_banded(n, b, 1.0, &mut rng));
            if g.len() != (2 * b + 1) * n - b * b - b {
                bad.push(format!("n={n} b={b}: {}", g.len()));
            }
        }
    }
    Outcome::new(bad.is_empty(), format!("{} count mismatches{}", bad.len(), first_issue(&bad)))
}

fn structured_qr() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut worst_fact, mut worst_orth, mut worst_asm) = (0.0_f64, 0.0_f64, 0.0_f64);
    for _ in 0..50 {
        let n = rng.random_range(2..=128);
        let b = rng.random_range(1..=8.min(n - 1));
        let c = 10f64.powf(rng.random_range(0.0..4.0));
        let ca = random_banded(n, b, c, &mut rng);
        let (g, r) = if b == 1 { reduce_tridiag(&ca).unwrap() } else { reduce_banded(&ca) };
        let q = g.accumulate_dense();
        let mut stacked = DMatrix::zeros(2 * n, n);
        stacked.view_mut((0, 0), (n, n)).copy_from(&ca.to_dense());
        stacked.view_mut((n, 0), (n, n)).fill_with_identity();
        let mut rr = DMatrix::zeros(2 * n, n);
        rr.view_mut((0, 0), (n, n)).copy_from(&r.to_dense());
        let scale = 1f64.max(sym_norm2(&ca.to_dense()));
        worst_fact = worst_fact.max(norm2(&(&q * rr - stacked)) / scale);
        worst_orth = worst_orth.max(norm2(&(q.transpose() * &q - DMatrix::identity(2 * n, 2 * n))));
        let tree = PartitionTree::new(n, rng.random_range(2..=16)).unwrap();
        let (q1, q2) = assemble_q(&g, &tree, b).unwrap();
        worst_asm = worst_asm
            .max((q1.to_dense() - q.view((0, 0), (n, n))).amax())
            .max((q2.to_dense() - q.view((n, 0), (n, n))).amax());
    }
    Outcome::new(
        worst_fact <= 1e-12 && worst_orth <= 1e-12 && worst_asm <= 1e-13,
        format!("|QR - [cA; I]| / max(1, |cA|) = {worst_fact:.2e}, |Q^T Q - I| = {worst_orth:.2e}, assembly {worst_asm:.2e}"),
    )
}

#[allow(clippy::needless_range_loop)]
fn rank_theorems() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut bad = Vec::new();
    let mut cases = 0;
    let mut highest = [0usize; 5];
    for b in 1..=4 {
        for n in b + 1..=128 {
            let ca = random_banded(n, b, 1.0, &mut rng);
            let tree = PartitionTree::new(n, 8).unwrap();
            let (g, _) = if b == 1 { reduce_tridiag(&ca).unwrap() } else { reduce_banded(&ca) };
            let (q1, q2) = assemble_q(&g, &tree, b).unwrap();
            let (d1, d2) = (q1.to_dense(), q2.to_dense());
            let prod = &d1 * d2.transpose();
            for (name, m) in [("Q1", &d1), ("Q2", &d2), ("Q1Q2^T", &prod)] {
                let r = max_offdiag_rank(&tree, m, 1e-12);
                highest[b] = highest[b].max(r);
                if r > 2 * b {
                    bad.push(format!("{name} n={n} b={b} rank {r}"));
                }
            }
            cases += 1;
        }
    }
    Outcome::new(
        bad.is_empty(),
        format!("{cases} instances, highest rank per b = {:?}, {} violations{}", &highest[1..], bad.len(), first_issue(&bad)),
    )
}

fn qdwh_convergence() -> Outcome {
    let mut worst = 0;
    let mut bad = Vec::new();
    for n in [64, 256, 512] {
        for b in [1, 4] {
            for gap in [1e-1, 1e-5, 1e-10, 1e-15] {
                for mode in [QrMode::OneQr, QrMode::MultiQr] {
                    let a = synthetic(n, b, gap, 4).to_dense();
                    let it = dense_qdwh(&a, 1e-15, mode).unwrap().iterations;
                    worst = worst.max(it);
                    if it > 6 {
                        bad.push(format!("n={n} b={b} gap={gap:e} {mode:?}: {it}"));
                    }
                }
            }
        }
    }
    Outcome::new(bad.is_empty(), format!("max iterations {worst}{}", first_issue(&bad)))
}

fn table_reproduction() -> Outcome {
    let n = 2000;
    let mut pass = true;
    let mut detail = format!("n={n}:");
    for (gap, sp_tol) in [(1e-1, 1e-12), (1e-5, 1e-9), (1e-10, 1e-4)] {
        let a = synthetic(n, 1, gap, 5).to_dense();
        let r = dense_qdwh(&a, 1e-15, QrMode::OneQr).unwrap();
        let m = error_metrics(&r.u, &SpectralOracle::new(&a)).unwrap();
        pass &= m.e_trace <= 1e-13 && m.e_id <= 1e-12 && m.e_sp <= sp_tol;
        detail += &format!(" gap {gap:e}: e_trace {:.1e} e_id {:.1e} e_sp {:.1e};", m.e_trace, m.e_id, m.e_sp);
    }
    Outcome::new(pass, detail)
}

fn hodlr_vs_dense() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut du, mut idem, mut tr) = (0.0_f64, 0.0_f64, 0.0_f64);
    for i in 0..20 {
        let n = rng.random_range(64..=256);
        let b = rng.random_range(1..=4);
        let gap = 10f64.powf(-rng.random_range(1.0..4.0));
        let n_min = [16, 32, 64][i % 3];
        let a = synthetic(n, b, gap, i as u64);
        let r = hqdwh(&a, &HqdwhOptions { n_min, eps: 1e-12, delta: 1e-15 }).unwrap();
        let d = dense_qdwh(&a.to_dense(), 1e-15, QrMode::OneQr).unwrap();
        let p = r.p.to_dense();
        du = du.max(norm2(&(r.u.to_dense() - d.u)));
        idem = idem.max(norm2(&(&p * &p - &p)));
        tr = tr.max((p.trace() - (n / 2) as f64).abs());
    }
    Outcome::new(
        du <= 1e-8 && idem <= 1e-8 && tr <= 1e-6,
        format!("|U - U_dense| = {du:.2e}, |P^2 - P| = {idem:.2e}, |trace P - nu| = {tr:.2e}"),
    )
}

fn eps_trend() -> Outcome {
    let a = synthetic(512, 1, 1e-4, 7);
    let oracle = SpectralOracle::new(&a.to_dense());
    let eps_list = [1e-12, 1e-10, 1e-8, 1e-6];
    let e: Vec<f64> = eps_list
        .iter()
        .map(|&eps| {
            let r = hqdwh(&a, &HqdwhOptions { n_min: 64, eps, delta: 1e-15 }).unwrap();
            error_metrics(&r.u.to_dense(), &oracle).unwrap().e_id
        })
        .collect();
    let monotone = e.windows(2).all(|w| w[1] >= w[0]);
    let ratio = e[3] / e[1];
    Outcome::new(monotone && ratio >= 10.0, format!("e_id = {}, e_id(1e-6)/e_id(1e-10) = {ratio:.1e}", sci(&e)))
}

fn zolotarev_bounds() -> Outcome {
    let mut failures = Vec::new();
    let mut unexpected = false;
    for m in 1..=6 {
        for range in [10.0, 100.0, 1e4] {
            let z = zolotarev(m, range).unwrap();
            let e = z.measured_sup_error();
            let simplified = simplified_upper_bound(m, 1.0 / range);
            if !(z.lower <= e && e <= z.upper && e <= simplified) {
                failures.push(format!("(m={m}, R={range:e}): lower {:.4} > measured {e:.6}", z.lower));
                // 4 rho / (rho + 1) > 1 here while no best error can exceed 1.
                unexpected |= !(m == 1 && range == 1e4);
            }
        }
    }
    let detail = if failures.is_empty() {
        "18/18 cases bracketed".to_string()
    } else {
        format!("{}/18 cases bracketed; {}", 18 - failures.len(), failures.join("; "))
    };
    Outcome { pass: failures.is_empty(), detail, unexpected }
}

fn singular_value_decay() -> Outcome {
    let mut worst = 0.0_f64;
    let mut bad = Vec::new();
    let tree = PartitionTree::new(256, 16).unwrap();
    for b in [1, 2] {
        for gap in [1e-1, 1e-2, 1e-4] {
            let p = SpectralOracle::new(&synthetic(256, b, gap, 9).to_dense()).negative_projector();
            let r = verify_decay(&p, b, gap, &tree).unwrap();
            worst = worst.max(r.worst_ratio);
            if !r.passed() {
                bad.push(format!("b={b} gap={gap:e}"));
            }
        }
    }
    Outcome::new(bad.is_empty(), format!("worst sigma/bound = {worst:.2e}{}", first_issue(&bad)))
}

fn rank_plateau() -> Outcome {
    let a = synthetic(4096, 1, 1e-4, 10);
    let r = hqdwh(&a, &HqdwhOptions::for_bandwidth(1)).unwrap();
    let rank = r.p.diagnostics().max_offdiag_rank;
    Outcome::new(rank <= 45, format!("n=4096 max off-diagonal rank {rank}, {} iterations", r.iterations))
}

fn scaling() -> Outcome {
    let sizes = [4096, 8192, 16384, 32768];
    let inputs: Vec<_> = sizes.iter().map(|&n| synthetic(n, 1, 1e-6, 11)).collect();
    let mut times = vec![f64::INFINITY; sizes.len()];
    let mut mems = vec![0.0; sizes.len()];
    // Interleaved rounds, fastest run per size: a slow spell on a shared host
    // then hits every size instead of skewing one ratio.
    for _round in 0..3 {
        for (i, a) in inputs.iter().enumerate() {
            let start = Instant::now();
            let r = hqdwh(a, &HqdwhOptions::for_bandwidth(1)).unwrap();
            times[i] = times[i].min(start.elapsed().as_secs_f64());
            mems[i] = r.p.diagnostics().memory_bytes as f64;
        }
    }
    let tr: Vec<f64> = times.windows(2).map(|w| w[1] / w[0]).collect();
    let mr: Vec<f64> = mems.windows(2).map(|w| w[1] / w[0]).collect();
    let pass = tr.iter().all(|&r| r <= 3.0) && mr.iter().all(|&r| r <= 2.6);
    Outcome::new(pass, format!("time s {times:.2?}, time ratios {tr:.2?}, memory ratios {mr:.2?}"))
}

type Criterion = (usize, &'static str, Duration, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        (1, "rotation counts", Duration::from_secs(1), rotation_counts),
        (2, "structured QR correctness", Duration::from_secs(30), structured_qr),
        (3, "off-diagonal rank bounds", Duration::from_secs(60), rank_theorems),
        (4, "dense QDWH iteration count", Duration::from_secs(60), qdwh_convergence),
        (5, "dense QDWH accuracy, n = 2000", Duration::from_secs(600), table_reproduction),
        (6, "hQDWH against dense QDWH", Duration::from_secs(300), hodlr_vs_dense),
        (7, "accuracy versus truncation", Duration::from_secs(300), eps_trend),
        (8, "Zolotarev error bounds", Duration::from_secs(30), zolotarev_bounds),
        (9, "singular value decay", Duration::from_secs(120), singular_value_decay),
        (10, "rank plateau", Duration::from_secs(300), rank_plateau),
        (11, "time and memory scaling", Duration::from_secs(1200), scaling),
    ];
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut unexpected = 0;
    for (id, name, budget, check) in criteria {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let mut out = check();
        let elapsed = start.elapsed();
        if elapsed > budget {
            out.pass = false;
            out.unexpected = true;
            out.detail += &format!(" [over budget {budget:?}]");
        }
        let tag = if out.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {id:>2} {name} ({:.1} s): {}", elapsed.as_secs_f64(), out.detail);
        if out.unexpected {
            unexpected += 1;
        }
    }
    if unexpected > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
