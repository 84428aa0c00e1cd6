use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use specproj::banded::{read_sbm, synth_banded, write_sbm, BandedSymmetric, SpectrumSpec};
use specproj::dense::SpectralOracle;
use specproj::fastqr::{reduce_banded, reduce_tridiag};
use specproj::hodlr::PartitionTree;
use specproj::qdwh::{error_metrics, hqdwh, qdwh_params, HqdwhOptions, ProjectorResult};
use specproj::theory::verify_decay;
use specproj::Error;

use crate::report::{InputInfo, Parameters, RunReport, Totals, BENCH_HEADER, RANKSCAN_HEADER};
use crate::{BenchArgs, GenerateArgs, ProjectArgs, RankscanArgs, SolverArgs, VerifyArgs};

pub const DEFAULT_ORACLE_CAP: usize = 4096;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError { code: 2, message: message.into() }
    }

    fn io(message: impl Into<String>) -> Self {
        CliError { code: 3, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidInput(_) | Error::Domain(_) => 2,
            Error::Io(_) | Error::Parse { .. } => 3,
            Error::NotPositiveDefinite(_) => {
                return CliError {
                    code: 4,
                    message: format!("{e}; the iteration lost definiteness, try a smaller --eps"),
                }
            }
            _ => 1,
        };
        CliError { code, message: e.to_string() }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn oracle_cap(flag: Option<usize>) -> CliResult<usize> {
    if let Some(cap) = flag {
        return Ok(cap);
    }
    match std::env::var("SPECPROJ_ORACLE_CAP") {
        Ok(v) => v.trim().parse().map_err(|_| CliError::usage(format!("SPECPROJ_ORACLE_CAP = {v:?} is not a size"))),
        Err(_) => Ok(DEFAULT_ORACLE_CAP),
    }
}

fn check_oracle(n: usize, cap: usize) -> CliResult<()> {
    if n > cap {
        return Err(CliError {
            code: 5,
            message: format!("n = {n} exceeds the dense oracle cap {cap} (raise with --oracle-cap or SPECPROJ_ORACLE_CAP)"),
        });
    }
    Ok(())
}

fn options(s: &SolverArgs, b: usize) -> CliResult<HqdwhOptions> {
    let mut o = HqdwhOptions::for_bandwidth(b);
    if let Some(n_min) = s.nmin {
        if n_min < 2 {
            return Err(CliError::usage("--nmin must be at least 2"));
        }
        o.n_min = n_min;
    }
    if !(s.eps >= 0.0 && s.eps.is_finite()) {
        return Err(CliError::usage("--eps must be a nonnegative number"));
    }
    if s.delta.is_nan() || s.delta <= 0.0 {
        return Err(CliError::usage("--delta must be positive"));
    }
    if !s.shift.is_finite() {
        return Err(CliError::usage("--shift must be finite"));
    }
    o.eps = s.eps;
    o.delta = s.delta;
    Ok(o)
}

fn synthetic(n: usize, b: usize, gap: f64, seed: u64) -> CliResult<BandedSymmetric> {
    if n < 2 {
        return Err(CliError::usage("--n must be at least 2"));
    }
    if b == 0 || b >= n {
        return Err(CliError::usage(format!("--band {b} must satisfy 1 <= band < n = {n}")));
    }
    let spec = SpectrumSpec::uniform_two_sided(n, gap).map_err(|e| CliError::usage(e.to_string()))?;
    Ok(synth_banded(&spec, b, Some(seed))?)
}

fn write_out(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| CliError::io(e.to_string()))
        }
    }
}

pub fn generate(args: &GenerateArgs) -> CliResult<()> {
    let a = synthetic(args.n, args.band, args.gap, args.seed)?;
    write_sbm(&a, &args.out).map_err(|e| CliError::io(format!("{}: {e}", args.out.display())))?;
    println!(
        "wrote {} (n = {}, b = {}, nu = {}, spectrum in [-1, -{g}] U [{g}, 1])",
        args.out.display(),
        args.n,
        args.band,
        args.n / 2,
        g = args.gap
    );
    Ok(())
}

struct Run {
    input: BandedSymmetric,
    shifted: BandedSymmetric,
    opts: HqdwhOptions,
    result: ProjectorResult,
    wall_ms: f64,
}

fn load(path: &Path) -> CliResult<BandedSymmetric> {
    read_sbm(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}

fn run(input: BandedSymmetric, solver: &SolverArgs) -> CliResult<Run> {
    let opts = options(solver, input.bandwidth())?;
    let shifted = if solver.shift == 0.0 { input.clone() } else { input.shifted(solver.shift) };
    let start = Instant::now();
    let result = hqdwh(&shifted, &opts)?;
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(Run { input, shifted, opts, result, wall_ms })
}

fn report(path: &Path, solver: &SolverArgs, r: &Run) -> RunReport {
    let d = r.result.p.diagnostics();
    RunReport {
        input: InputInfo { file: path.display().to_string(), n: r.input.n(), b: r.input.bandwidth() },
        parameters: Parameters {
            n_min: r.opts.n_min,
            eps: r.opts.eps,
            delta: r.opts.delta,
            shift: solver.shift,
            alpha: r.result.alpha,
            l0: r.result.l0,
        },
        iterations: r.result.iterations,
        history: r.result.history.clone(),
        totals: Totals {
            wall_ms: r.wall_ms,
            max_rank: d.max_offdiag_rank,
            memory_bytes: d.memory_bytes,
            trace: r.result.p.trace(),
        },
        errors: None,
    }
}

fn emit_json(rep: &RunReport, path: Option<&Path>) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(rep).map_err(|e| CliError { code: 1, message: e.to_string() })?;
    text.push('\n');
    write_out(path, &text)
}

pub fn project(args: &ProjectArgs) -> CliResult<()> {
    let r = run(load(&args.input)?, &args.solver)?;
    if let Some(p) = &args.dump_projector {
        check_oracle(r.input.n(), oracle_cap(args.oracle_cap)?)?;
        let dense = r.result.p.to_dense();
        let mut text = String::new();
        for i in 0..dense.nrows() {
            let row: Vec<String> = dense.row(i).iter().map(|v| format!("{v:.17e}")).collect();
            let _ = writeln!(text, "{}", row.join(" "));
        }
        write_out(Some(p), &text)?;
    }
    if let Some(p) = &args.dump_givens {
        let w = qdwh_params(r.result.l0)?;
        let ca = r.shifted.scaled(w.c.sqrt() / r.result.alpha);
        let seq = if ca.bandwidth() == 1 { reduce_tridiag(&ca)?.0 } else { reduce_banded(&ca).0 };
        std::fs::write(p, seq.to_le_bytes()).map_err(|e| CliError::io(format!("{}: {e}", p.display())))?;
    }
    emit_json(&report(&args.input, &args.solver, &r), args.report.as_deref())
}

pub fn verify(args: &VerifyArgs) -> CliResult<()> {
    let cap = oracle_cap(args.oracle_cap)?;
    let input = load(&args.input)?;
    check_oracle(input.n(), cap)?;
    let r = run(input, &args.solver)?;
    let oracle = SpectralOracle::new(&r.shifted.to_dense());
    let mut rep = report(&args.input, &args.solver, &r);
    rep.errors = Some(error_metrics(&r.result.u.to_dense(), &oracle)?);
    emit_json(&rep, args.report.as_deref())
}

pub fn rankscan(args: &RankscanArgs) -> CliResult<()> {
    check_oracle(args.n, oracle_cap(args.oracle_cap)?)?;
    if args.gaps.is_empty() || args.eps_list.is_empty() {
        return Err(CliError::usage("--gaps and --eps-list must be nonempty"));
    }
    let mut csv = String::from(RANKSCAN_HEADER);
    csv.push('\n');
    for &gap in &args.gaps {
        let a = synthetic(args.n, args.band, gap, args.seed)?;
        let oracle = SpectralOracle::new(&a.to_dense());
        let mut decay_margin = None;
        for &eps in &args.eps_list {
            let solver = SolverArgs { nmin: args.nmin, eps, delta: args.delta, shift: 0.0 };
            let opts = options(&solver, args.band)?;
            let result = hqdwh(&a, &opts)?;
            let m = error_metrics(&result.u.to_dense(), &oracle)?;
            let margin = match decay_margin {
                Some(v) => v,
                None => {
                    let tree = PartitionTree::new(args.n, opts.n_min.min(args.n).max(2))?;
                    let v = verify_decay(&oracle.negative_projector(), args.band, gap, &tree)?.worst_ratio;
                    decay_margin = Some(v);
                    v
                }
            };
            let _ = writeln!(
                csv,
                "{gap:e},{eps:e},{},{:e},{:e},{:e},{margin:e}",
                result.p.diagnostics().max_offdiag_rank,
                m.e_id,
                m.e_trace,
                m.e_sp
            );
        }
    }
    write_out(args.out.as_deref(), &csv)
}

pub fn bench(args: &BenchArgs) -> CliResult<()> {
    if args.sizes.is_empty() {
        return Err(CliError::usage("--sizes must list at least one size"));
    }
    if args.repeat == 0 {
        return Err(CliError::usage("--repeat must be positive"));
    }
    let mut csv = String::from(BENCH_HEADER);
    csv.push('\n');
    for &n in &args.sizes {
        let a = synthetic(n, args.band, args.gap, args.seed)?;
        let solver = SolverArgs { nmin: args.nmin, eps: args.eps, delta: 1e-15, shift: 0.0 };
        let opts = options(&solver, args.band)?;
        let mut best = f64::INFINITY;
        let mut diag = None;
        for _ in 0..args.repeat {
            let start = Instant::now();
            let result = hqdwh(&a, &opts)?;
            best = best.min(start.elapsed().as_secs_f64() * 1e3);
            diag = Some(result.p.diagnostics());
        }
        let d = diag.expect("repeat is positive");
        let _ = writeln!(csv, "{n},{},{best:.3},{},{}", args.band, d.memory_bytes, d.max_offdiag_rank);
    }
    write_out(args.out.as_deref(), &csv)
}
