//! Monte-Carlo fault injection with independent location failures.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::count::Enumeration;
use super::propagate::{FaultEvent, Frame};

/// SplitMix64 finaliser over (seed, index); decorrelates per-trial streams.
pub fn mix(seed: u64, i: u64) -> u64 {
    let mut z = seed ^ i.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Wilson score interval at normal quantile `z`.
pub fn wilson(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let ph = k as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let centre = (ph + z2 / (2.0 * nf)) / denom;
    let half = z * (ph * (1.0 - ph) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McResult {
    pub p: f64,
    pub trials: u64,
    pub failures: u64,
    pub estimate: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
}

fn trial(en: &Enumeration, p: f64, rng: &mut ChaCha8Rng) -> bool {
    if p <= 0.0 {
        return false;
    }
    let t = &en.tables[rng.gen_range(0..en.tables.len())];
    let n = t.alphabets.len();
    let ln1p = (1.0 - p).ln();
    let mut picked: Vec<(usize, usize)> = Vec::new();
    let mut i: i64 = -1;
    loop {
        let u: f64 = rng.gen::<f64>();
        let skip = if p >= 1.0 { 0.0 } else { (u.ln() / ln1p).floor() };
        i += 1 + skip.min(n as f64) as i64;
        if i >= n as i64 {
            break;
        }
        let loc = i as usize;
        let k = t.alphabets[loc].len();
        if k > 0 {
            picked.push((loc, rng.gen_range(0..k)));
        }
    }
    let frames: Vec<Frame> = match picked.len() {
        0 => return false,
        1 => t.singles[picked[0].0][picked[0].1].frames.clone(),
        2 => t.pair(picked[0].0, picked[0].1, picked[1].0, picked[1].1),
        _ => {
            let compatible = (0..picked.len()).all(|a| {
                (a + 1..picked.len()).all(|b| {
                    t.engine.traces_compatible(&t.singles[picked[a].0][picked[a].1].trace, &t.singles[picked[b].0][picked[b].1].trace)
                })
            });
            if compatible {
                let mut acc = vec![Frame::ID];
                for &(l, f) in &picked {
                    let s = &t.singles[l][f].frames;
                    acc = acc.iter().flat_map(|a| s.iter().map(move |b| *a ^ *b)).collect();
                    acc.sort_unstable();
                    acc.dedup();
                }
                acc
            } else {
                let evs: Vec<FaultEvent> = picked.iter().map(|&(l, f)| FaultEvent { location: l, frame: t.alphabets[l][f] }).collect();
                t.engine.run(Frame::ID, &evs)
            }
        }
    };
    frames.iter().any(|f| en.judge.fails(f))
}

/// Failure rate of the enumerated gadget at physical rate `p`. Each trial
/// draws its own stream from (seed, trial index), so the result does not
/// depend on how trials are split across threads.
pub fn monte_carlo(en: &Enumeration, p: f64, trials: u64, seed: u64) -> McResult {
    let failures: u64 = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, i));
            u64::from(trial(en, p, &mut rng))
        })
        .sum();
    let (lo, hi) = wilson(failures, trials, 1.96);
    McResult { p, trials, failures, estimate: failures as f64 / trials.max(1) as f64, wilson_low: lo, wilson_high: hi }
}

/// Least-squares slope of log(rate) against log(p), skipping zero rates.
pub fn fit_exponent(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|(_, r)| *r > 0.0).map(|(p, r)| (p.ln(), r.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::{build_circuit, GadgetKind, GadgetSpec};

    #[test]
    fn wilson_brackets_estimate() {
        let (lo, hi) = wilson(10, 1000, 1.96);
        assert!(lo < 0.01 && 0.01 < hi);
        assert_eq!(wilson(0, 100, 1.96).0, 0.0);
    }

    #[test]
    fn slope_of_a_square_law() {
        let pts: Vec<(f64, f64)> = [1e-4, 1e-3, 1e-2].iter().map(|&p| (p, 3.0 * p * p)).collect();
        assert!((fit_exponent(&pts).unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn zero_rate_never_fails_and_seed_is_reproducible() {
        let g = build_circuit(GadgetSpec::new(GadgetKind::MX)).unwrap();
        let en = Enumeration::new(&g, true);
        assert_eq!(monte_carlo(&en, 0.0, 1000, 1).failures, 0);
        let a = monte_carlo(&en, 0.05, 20000, 7);
        let b = monte_carlo(&en, 0.05, 20000, 7);
        assert_eq!(a, b);
        assert!(a.failures > 0);
    }
}
