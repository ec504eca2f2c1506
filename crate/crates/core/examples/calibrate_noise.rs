//! One-off calibration of the noise-recovery thresholds used by the
//! acceptance suite: decompose the noisy two-chirp example over ten seeds
//! and report the 90th percentile of each component error plus 20%.

use iterfilt::engine::{decompose, AnalyticLengths, Method, MethodConfig, NOISE_ROUND_FACTOR};
use iterfilt::filter::FilterKind;
use iterfilt::signal::relative_error;
use iterfilt::synthetic::{add_noise, gen_example};

const SNR_DB: f64 = 8.6;
const SEEDS: u64 = 10;

fn percentile90(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let rank = (0.9 * v.len() as f64).ceil() as usize;
    v[rank - 1]
}

fn main() {
    let ex = gen_example(2, 8000).expect("example");
    let truths = ex.truths_in_imf_order();
    let mut cfg = MethodConfig::new(Method::Frif);
    cfg.filter = FilterKind::DoubleConvolvedCosine;
    cfg.xi = 1.5;
    let (mut hi, mut lo) = (Vec::new(), Vec::new());
    for seed in 0..SEEDS {
        let noisy = add_noise(&ex.signal, SNR_DB, seed).expect("noise");
        let mut lengths = AnalyticLengths::new(ex.curves_in_imf_order()).with_noise_round(NOISE_ROUND_FACTOR);
        let res = decompose(&noisy, &cfg, &mut lengths).expect("decompose");
        let e_hi = relative_error(&res.imfs[1], truths[0]).expect("error");
        let e_lo = relative_error(&res.imfs[2], truths[1]).expect("error");
        println!("seed {seed}: fast component {e_hi:.6}, slow component {e_lo:.6}");
        hi.push(e_hi);
        lo.push(e_lo);
    }
    println!("threshold fast = {:.4}", 1.2 * percentile90(hi));
    println!("threshold slow = {:.4}", 1.2 * percentile90(lo));
}
