//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use iterfilt::dense::{
    build_alif_matrix, build_rif_dense, spectral_diagnostics, symmetric_eigenvalues, DenseSifter,
};
use iterfilt::engine::{
    convergence_trace, decompose, AnalyticLengths, ExtremaLengths, LengthProvider, Method, MethodConfig,
    TableLengths, NOISE_ROUND_FACTOR,
};
use iterfilt::fast::{fif_sift, FifSifter};
use iterfilt::filter::{circulant_row, make_filter, spectral_symbol, FilterKind};
use iterfilt::resample::{compute_resampling, length_from_freq, resample, LengthFunction};
use iterfilt::sift::{sift_trace, Sifter};
use iterfilt::signal::relative_error;
use iterfilt::synthetic::{add_noise, gen_example};
use iterfilt::{Signal, StoppingConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Kernel and ξ grid searched for the first example.
const KERNELS: [FilterKind; 2] = [FilterKind::Triangular, FilterKind::DoubleConvolvedCosine];
const XI_SWEEP: [f64; 3] = [1.5, 2.0, 2.5];

/// 90th percentile + 20% over seeds 0..10 (see `examples/calibrate_noise.rs`).
const NOISE_THRESHOLD_FAST: f64 = 0.1399;
const NOISE_THRESHOLD_SLOW: f64 = 0.2068;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_signal(r: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| r.random_range(-1.0..1.0)).collect()
}

fn frif_config(filter: FilterKind, xi: f64) -> MethodConfig {
    let mut cfg = MethodConfig::new(Method::Frif);
    cfg.filter = filter;
    cfg.xi = xi;
    cfg
}

struct ExampleRun {
    filter: FilterKind,
    xi: f64,
    errors: Vec<f64>,
    trend_error: f64,
    wall: f64,
}

fn run_example(id: u32, n: usize, cfg: &MethodConfig) -> ExampleRun {
    let ex = gen_example(id, n).unwrap();
    let truths = ex.truths_in_imf_order();
    let mut lengths = AnalyticLengths::new(ex.curves_in_imf_order());
    let t0 = Instant::now();
    let res = decompose(&ex.signal, cfg, &mut lengths).unwrap();
    let wall = t0.elapsed().as_secs_f64();
    let errors = truths[..truths.len() - 1]
        .iter()
        .enumerate()
        .map(|(k, t)| res.imfs.get(k).map_or(f64::INFINITY, |imf| relative_error(imf, t).unwrap()))
        .collect();
    ExampleRun {
        filter: cfg.filter,
        xi: cfg.xi,
        errors,
        trend_error: relative_error(&res.residual, truths[truths.len() - 1]).unwrap(),
        wall,
    }
}

/// Best `(kernel, ξ)` on the first example by the larger of the two IMF errors.
fn calibrated_example1() -> ExampleRun {
    KERNELS
        .iter()
        .flat_map(|&f| XI_SWEEP.iter().map(move |&xi| frif_config(f, xi)))
        .map(|cfg| run_example(1, 10_000, &cfg))
        .min_by(|a, b| {
            let ka = a.errors.iter().copied().fold(0.0, f64::max);
            let kb = b.errors.iter().copied().fold(0.0, f64::max);
            ka.total_cmp(&kb)
        })
        .unwrap()
}

fn fmt_errors(e: &[f64]) -> String {
    e.iter().map(|v| format!("{v:.6}")).collect::<Vec<_>>().join(", ")
}

fn criterion_1() -> Outcome {
    let t0 = Instant::now();
    let mut worst: f64 = 0.0;
    let mut r = rng(1);
    for n in [64, 256, 1024] {
        for _ in 0..3 {
            let ell_value = r.random_range(0.02..0.2);
            let kind = KERNELS[r.random_range(0..2)];
            let k = make_filter(kind);
            let ell = LengthFunction::constant(n, ell_value).unwrap();
            let row = circulant_row(&k, n, 1.0 / ell_value).unwrap();
            let op = build_alif_matrix(&k, &ell, n).unwrap();
            let g = random_signal(&mut r, n);
            let mut fast = FifSifter::new(&g, &row).unwrap();
            let mut dense = DenseSifter::alif(&op, &g).unwrap();
            for _ in 0..50 {
                fast.advance();
                dense.advance();
                let d = dense.iterate();
                worst = worst.max(relative_error(&fast.iterate(), &d).unwrap());
            }
        }
    }
    let wall = t0.elapsed().as_secs_f64();
    Outcome::new(
        worst <= 1e-10 && wall < 10.0,
        format!("max per-iterate relative gap {worst:.2e} (≤ 1e-10), {wall:.2} s (< 10 s)"),
    )
}

fn criterion_2(best: &ExampleRun) -> Outcome {
    let e = &best.errors;
    let pass = e.len() == 2 && e[0] <= 0.02 && e[1] <= 0.02 && best.trend_error <= 1e-3 && best.wall < 5.0;
    Outcome::new(
        pass,
        format!(
            "best of sweep: {} ξ={} errors [{}] (≤ 0.02), trend {:.6} (≤ 1e-3), {:.3} s (< 5 s)",
            best.filter,
            best.xi,
            fmt_errors(e),
            best.trend_error,
            best.wall
        ),
    )
}

fn criterion_3(cal: &ExampleRun) -> Outcome {
    let run = run_example(2, 8000, &frif_config(cal.filter, cal.xi));
    let e = &run.errors;
    Outcome::new(
        e.len() == 2 && e[0] <= 0.02 && e[1] <= 0.02 && run.wall < 5.0,
        format!(
            "{} ξ={}: errors [{}] (≤ 0.02), {:.3} s (< 5 s)",
            run.filter,
            run.xi,
            fmt_errors(e),
            run.wall
        ),
    )
}

fn criterion_4(cal: &ExampleRun) -> Outcome {
    let n = 2000;
    let ex = gen_example(1, n).unwrap();
    let truths = ex.truths_in_imf_order();
    let curves = ex.curves_in_imf_order();
    let (ell, _) = length_from_freq(&curves[0], cal.xi).unwrap();
    let mut err2 = Vec::new();
    let mut traces = Vec::new();
    for method in [Method::Alif, Method::Salif] {
        let mut cfg = frif_config(cal.filter, cal.xi);
        cfg.method = method;
        let res = decompose(&ex.signal, &cfg, &mut AnalyticLengths::new(curves.clone())).unwrap();
        err2.push(res.imfs.get(1).map_or(f64::INFINITY, |imf| relative_error(imf, truths[1]).unwrap()));
        traces.push(convergence_trace(&ex.signal, &cfg, &ell, truths[0], 500).unwrap());
    }
    let max_rise = |t: &[f64]| t.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    let alif_rise = max_rise(&traces[0]);
    let salif_rise = max_rise(&traces[1]);
    Outcome::new(
        err2[1] < err2[0] && alif_rise > 1e-6 && salif_rise <= 1e-6,
        format!(
            "err₂ SALIF {:.4} < ALIF {:.4}; largest one-step rise ALIF {alif_rise:.2e} (> 1e-6), SALIF {salif_rise:.2e} (≤ 1e-6)",
            err2[1], err2[0]
        ),
    )
}

fn criterion_5() -> Outcome {
    let mut r = rng(5);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..20 {
        let n = r.random_range(32..=512);
        let kind = KERNELS[r.random_range(0..2)];
        let pieces = r.random_range(1..6);
        let levels: Vec<f64> = (0..pieces).map(|_| r.random_range(0.01..0.3)).collect();
        let ell = LengthFunction::new((0..n).map(|i| levels[i * pieces / n]).collect()).unwrap();
        let op = build_alif_matrix(&make_filter(kind), &ell, n).unwrap();
        let g = random_signal(&mut r, n);
        let mut s = DenseSifter::salif(&op, &g).unwrap();
        let mut prev = s.norm();
        sift_trace(&mut s, 100, |_, it| {
            let cur = it.iter().map(|v| v * v).sum::<f64>().sqrt();
            worst = worst.max((cur - prev) / prev);
            prev = cur;
        });
    }
    Outcome::new(
        worst <= 1e-12,
        format!("largest relative norm increase {worst:.2e} (≤ 1e-12) over 20 pairs × 100 steps"),
    )
}

fn criterion_6() -> Outcome {
    let mut sym_lo = f64::INFINITY;
    let mut sym_hi = f64::NEG_INFINITY;
    for kind in KERNELS {
        let k = make_filter(kind);
        for n in [16, 64, 256, 1024] {
            for m in [3.0, 5.7, 10.0] {
                for v in spectral_symbol(&circulant_row(&k, n, m).unwrap()).unwrap() {
                    sym_lo = sym_lo.min(v);
                    sym_hi = sym_hi.max(v);
                }
            }
        }
    }
    let n = 512;
    let ell = LengthFunction::new(
        (0..n)
            .map(|i| 0.05 + 0.04 * (2.0 * std::f64::consts::PI * 3.0 * i as f64 / n as f64).sin())
            .collect(),
    )
    .unwrap();
    let op = build_alif_matrix(&make_filter(FilterKind::Triangular), &ell, n).unwrap();
    let ktk_min = symmetric_eigenvalues(&op.matrix.tr_mul(&op.matrix))[0];

    let n = 256;
    let ex = gen_example(1, n).unwrap();
    let (ell, _) = length_from_freq(&ex.curves_in_imf_order()[1], 2.0).unwrap();
    let rif = build_rif_dense(&make_filter(FilterKind::Triangular), &ell, n).unwrap();
    let ev = symmetric_eigenvalues(&rif.symmetrized());
    let report = spectral_diagnostics(&rif.scaled).unwrap();
    let max_im = report.eigenvalues.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    let pass = sym_lo >= -1e-10
        && sym_hi <= 1.0
        && ktk_min >= -1e-10
        && ev[0] >= -1e-8
        && ev[n - 1] <= 1.0 + 1e-10
        && max_im <= 1e-8;
    Outcome::new(
        pass,
        format!(
            "symbols in [{sym_lo:.2e}, {sym_hi:.12}]; λmin(KᵀK) {ktk_min:.2e}; scaled RIF spectrum [{:.2e}, {:.12}], max |Im| {max_im:.1e}",
            ev[0],
            ev[n - 1]
        ),
    )
}

fn zero_crossings(h: &[f64]) -> Vec<f64> {
    h.windows(2)
        .enumerate()
        .filter(|(_, w)| (w[0] < 0.0) != (w[1] < 0.0))
        .map(|(i, w)| i as f64 + w[0] / (w[0] - w[1]))
        .collect()
}

fn criterion_7(cal: &ExampleRun) -> Outcome {
    let n = 10_000;
    let ex = gen_example(1, n).unwrap();
    let top = ex.imf_order()[0];
    let a1 = &ex.inst_freq[top];
    let (ell, _) = length_from_freq(a1, cal.xi).unwrap();
    let map = compute_resampling(&ell).unwrap();
    let h = resample(&ex.components[top], &map).unwrap();
    let zc = zero_crossings(&h);
    let gaps: Vec<f64> = zc.windows(2).map(|w| w[1] - w[0]).collect();
    let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
    let sd = (gaps.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / gaps.len() as f64).sqrt();
    let cv = sd / mean;
    // Two crossings per cycle over the unit-length sample grid.
    let freq = n as f64 / (2.0 * mean);
    let a_max = a1.iter().copied().fold(0.0, f64::max);
    Outcome::new(
        cv < 0.05 && freq <= a_max,
        format!("zero-crossing CV {:.3}% (< 5%), mean frequency {freq:.2} ≤ max a₁ {a_max:.2}", 100.0 * cv),
    )
}

fn criterion_8(cal: &ExampleRun) -> Outcome {
    let n = 256;
    let stop = StoppingConfig::default();
    let mut r = rng(8);
    let mut worst: f64 = 0.0;
    for kind in KERNELS {
        let k = make_filter(kind);
        for l in [0.03, 0.08, 0.15] {
            let g = random_signal(&mut r, n);
            let ell = LengthFunction::constant(n, l).unwrap();
            let fif = fif_sift(&g, &circulant_row(&k, n, 1.0 / l).unwrap(), &stop).unwrap().imf;
            let alif = iterfilt::dense::alif_sift(&build_alif_matrix(&k, &ell, n).unwrap(), &g, &stop)
                .unwrap()
                .imf;
            let rif = iterfilt::dense::rif_dense_sift(&build_rif_dense(&k, &ell, n).unwrap(), &g, &stop)
                .unwrap()
                .imf;
            for other in [&alif, &rif] {
                let gap = fif.iter().zip(other).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                worst = worst.max(gap);
            }
        }
    }
    let n = 2000;
    let ex = gen_example(1, n).unwrap();
    let curves = ex.curves_in_imf_order();
    let mut first = Vec::new();
    for method in [Method::Alif, Method::Frif] {
        let mut cfg = frif_config(cal.filter, cal.xi);
        cfg.method = method;
        cfg.max_imfs = 1;
        let res = decompose(&ex.signal, &cfg, &mut AnalyticLengths::new(curves.clone())).unwrap();
        first.push(res.imfs[0].clone());
    }
    let differ = relative_error(&first[0], &first[1]).unwrap();
    Outcome::new(
        worst <= 1e-8 && differ > 1e-3,
        format!("constant ℓ max gap {worst:.2e} (≤ 1e-8); varying ℓ ALIF vs FRIF {differ:.4} (> 1e-3)"),
    )
}

fn criterion_9(cal: &ExampleRun) -> Outcome {
    let ex = gen_example(2, 8000).unwrap();
    let truths = ex.truths_in_imf_order();
    let cfg = frif_config(cal.filter, cal.xi);
    let mut worst = (0.0_f64, 0.0_f64);
    for seed in 10..20 {
        let noisy = add_noise(&ex.signal, 8.6, seed).unwrap();
        let mut lengths = AnalyticLengths::new(ex.curves_in_imf_order()).with_noise_round(NOISE_ROUND_FACTOR);
        let res = decompose(&noisy, &cfg, &mut lengths).unwrap();
        let fast = res.imfs.get(1).map_or(f64::INFINITY, |s| relative_error(s, truths[0]).unwrap());
        let slow = res.imfs.get(2).map_or(f64::INFINITY, |s| relative_error(s, truths[1]).unwrap());
        worst = (worst.0.max(fast), worst.1.max(slow));
    }
    let noisy = add_noise(&ex.signal, 1.3, 10).unwrap();
    let mut lengths = AnalyticLengths::new(ex.curves_in_imf_order()).with_noise_round(NOISE_ROUND_FACTOR);
    let res = decompose(&noisy, &cfg, &mut lengths).unwrap();
    let recon = relative_error(&res.reconstruct(), &noisy).unwrap();
    Outcome::new(
        worst.0 <= NOISE_THRESHOLD_FAST && worst.1 <= NOISE_THRESHOLD_SLOW && res.imfs.len() >= 3 && recon <= 1e-12,
        format!(
            "8.6 dB worst errors {:.4} (≤ {NOISE_THRESHOLD_FAST}), {:.4} (≤ {NOISE_THRESHOLD_SLOW}); 1.3 dB: {} IMFs (≥ 3), reconstruction {recon:.1e}",
            worst.0,
            worst.1,
            res.imfs.len()
        ),
    )
}

fn criterion_10() -> Outcome {
    let mut corpus: Vec<(String, Signal, Option<Vec<Vec<f64>>>)> = Vec::new();
    for (id, n) in [(1, 2000), (2, 2000), (1, 10_000), (2, 8000)] {
        let ex = gen_example(id, n).unwrap();
        corpus.push((format!("example {id} n={n}"), ex.signal.clone(), Some(ex.curves_in_imf_order())));
        let noisy = add_noise(&ex.signal, 1.3, 3).unwrap();
        corpus.push((format!("noisy example {id} n={n}"), noisy, Some(ex.curves_in_imf_order())));
    }
    let mut r = rng(10);
    for n in [64, 300, 1024] {
        corpus.push((format!("random n={n}"), Signal::new(random_signal(&mut r, n)).unwrap(), None));
    }
    let mut worst: f64 = 0.0;
    let mut runs = 0;
    for (name, s, curves) in &corpus {
        for method in Method::ALL {
            if method.is_dense() && s.len() > 2048 {
                continue;
            }
            let mut cfg = MethodConfig::new(method);
            // Extrema-driven dense runs at n = 2000 cost minutes; small signals cover that path.
            let mut providers: Vec<Box<dyn LengthProvider>> = Vec::new();
            if method.is_dense() && s.len() > 1024 {
                cfg.max_imfs = 3;
            } else {
                providers.push(Box::new(ExtremaLengths));
            }
            if let Some(c) = curves {
                providers.push(Box::new(AnalyticLengths::new(c.clone())));
            }
            providers.push(Box::new(TableLengths::new(vec![
                LengthFunction::constant(s.len(), 0.1).unwrap(),
            ])));
            for p in providers.iter_mut() {
                let res = decompose(s, &cfg, p.as_mut()).unwrap_or_else(|e| panic!("{name} {method}: {e}"));
                worst = worst.max(relative_error(&res.reconstruct(), s).unwrap());
                runs += 1;
            }
        }
    }
    Outcome::new(
        worst <= 1e-12,
        format!("{runs} decompositions, worst relative reconstruction error {worst:.2e} (≤ 1e-12)"),
    )
}

fn criterion_11() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_iterfilt");
    let dir = tempfile::tempdir().unwrap();
    let gen = dir.path().join("gen");
    let status = Command::new(bin)
        .args(["generate", "2", "--n", "4000", "--snr", "8.6", "--seed", "7", "--out"])
        .arg(&gen)
        .status()
        .unwrap();
    if !status.success() {
        return Outcome::new(false, format!("generate exited with {status}"));
    }
    let mut outs = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let status = Command::new(bin)
            .args(["decompose", "--method", "frif", "--length", "extrema", "--input"])
            .arg(gen.join("signal.csv"))
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        if !status.success() {
            return Outcome::new(false, format!("decompose exited with {status}"));
        }
        outs.push(out);
    }
    let mut identical = true;
    let mut files = 0;
    for entry in std::fs::read_dir(&outs[0]).unwrap() {
        let name = entry.unwrap().file_name();
        let a = std::fs::read(outs[0].join(&name)).unwrap();
        let b = std::fs::read(outs[1].join(&name)).unwrap_or_default();
        identical &= a == b;
        files += 1;
    }
    let parse = |text: &str| -> Vec<Vec<f64>> {
        text.lines()
            .skip(1)
            .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
            .collect()
    };
    let signal = parse(&std::fs::read_to_string(gen.join("signal.csv")).unwrap());
    let imfs = parse(&std::fs::read_to_string(outs[0].join("imfs.csv")).unwrap());
    let worst = signal
        .iter()
        .zip(&imfs)
        .map(|(s, row)| (row.iter().sum::<f64>() - s[0]).abs())
        .fold(0.0, f64::max);
    let rows_match = signal.len() == imfs.len() && signal.len() == 4000;
    Outcome::new(
        identical && files >= 3 && rows_match && worst <= 1e-10,
        format!("{files} output files byte-identical: {identical}; round-trip max deviation {worst:.1e} (≤ 1e-10)"),
    )
}

fn main() -> ExitCode {
    let t0 = Instant::now();
    let cal = calibrated_example1();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("1 FFT/dense equivalence", Box::new(criterion_1)),
        ("2 example 1 reproduction", Box::new(|| criterion_2(&cal))),
        ("3 example 2 reproduction", Box::new(|| criterion_3(&cal))),
        ("4 ALIF/SALIF ordering", Box::new(|| criterion_4(&cal))),
        ("5 SALIF contraction", Box::new(criterion_5)),
        ("6 spectral certificates", Box::new(criterion_6)),
        ("7 resampling anti-aliasing", Box::new(|| criterion_7(&cal))),
        ("8 constant-length coincidence", Box::new(|| criterion_8(&cal))),
        ("9 noise robustness", Box::new(|| criterion_9(&cal))),
        ("10 reconstruction identity", Box::new(criterion_10)),
        ("11 CLI determinism", Box::new(criterion_11)),
    ];
    let mut failed = 0;
    for (name, run) in &criteria {
        let t = Instant::now();
        let out = run();
        println!(
            "[{}] criterion {name}: {} [{:.1} s]",
            if out.pass { "PASS" } else { "FAIL" },
            out.detail,
            t.elapsed().as_secs_f64()
        );
        failed += usize::from(!out.pass);
    }
    println!(
        "{} of {} criteria passed ({:.1} s)",
        criteria.len() - failed,
        criteria.len(),
        t0.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
