//! Block-fading Monte Carlo driver.
//!
//! Trials are grouped into coherence blocks of `block_length` transmissions.
//! Within a block the legitimate-side gains stay fixed (so candidate ranking
//! is fixed too) while the relay pick and the eavesdropper-side gains are
//! redrawn per transmission. Block `b` owns ChaCha stream `b` under the
//! master seed, and every aggregate is an integer sum, so results do not
//! depend on how blocks are scheduled across workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::ParamError;
use crate::model::{sample_channel_state, SystemParams};
use crate::protocol::run_trial;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    /// Total two-hop transmissions.
    pub trials: u64,
    /// Consecutive transmissions sharing one legitimate-channel draw.
    pub block_length: u64,
    pub seed: u64,
    /// Worker threads. Never affects results.
    pub workers: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            trials: 100_000,
            block_length: 1,
            seed: 0,
            workers: 1,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), ParamError> {
        if self.trials == 0 {
            return Err(ParamError::new("trials", "must be at least 1"));
        }
        if self.block_length == 0 {
            return Err(ParamError::new("block_length", "must be at least 1"));
        }
        if self.workers == 0 || self.workers > 1024 {
            return Err(ParamError::new("workers", "must lie in 1..=1024"));
        }
        Ok(())
    }

    pub fn blocks(&self) -> u64 {
        self.trials.div_ceil(self.block_length)
    }
}

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub trials: u64,
    pub transmission_outages: u64,
    pub secrecy_outages: u64,
    pub p_out_t_hat: f64,
    pub p_out_s_hat: f64,
    /// 95% Wilson interval for `p_out_t_hat`.
    pub ci_t: Interval,
    /// 95% Wilson interval for `p_out_s_hat`.
    pub ci_s: Interval,
    /// Times each relay carried the message.
    pub selection_counts: Vec<u64>,
    pub jain_index: f64,
    pub mean_jam1: f64,
    pub mean_jam2: f64,
    /// Eavesdropper decodings summed over eavesdroppers and both hops.
    pub eaves_hop_successes: u64,
    /// `2 * m * trials`.
    pub eaves_hop_observations: u64,
}

#[derive(Debug, Clone)]
struct Tally {
    transmission_outages: u64,
    secrecy_outages: u64,
    selection_counts: Vec<u64>,
    jam1: u64,
    jam2: u64,
    eaves_successes: u64,
}

impl Tally {
    fn new(n: usize) -> Self {
        Tally {
            transmission_outages: 0,
            secrecy_outages: 0,
            selection_counts: vec![0; n],
            jam1: 0,
            jam2: 0,
            eaves_successes: 0,
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.transmission_outages += other.transmission_outages;
        self.secrecy_outages += other.secrecy_outages;
        for (a, b) in self.selection_counts.iter_mut().zip(other.selection_counts) {
            *a += b;
        }
        self.jam1 += other.jam1;
        self.jam2 += other.jam2;
        self.eaves_successes += other.eaves_successes;
        self
    }
}

/// SplitMix64 finalizer over `(master, index)`; used to give sweep points
/// independent, individually reproducible seeds.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn block_stream(base: &ChaCha8Rng, block: u64) -> ChaCha8Rng {
    let mut rng = base.clone();
    rng.set_stream(block);
    rng.set_word_pos(0);
    rng
}

fn run_block(
    params: &SystemParams,
    cfg: &SimConfig,
    base: &ChaCha8Rng,
    block: u64,
    mut tally: Tally,
) -> Tally {
    let mut rng = block_stream(base, block);
    let first = block * cfg.block_length;
    let len = cfg.block_length.min(cfg.trials - first);
    let mut ch = sample_channel_state(params, &mut rng);
    for t in 0..len {
        if t > 0 {
            ch.resample_eavesdroppers(&mut rng);
        }
        let out = run_trial(params, &ch, &mut rng).expect("channel state sized from params");
        tally.transmission_outages += out.transmission_outage() as u64;
        tally.secrecy_outages += out.secrecy_outage() as u64;
        tally.selection_counts[out.selected] += 1;
        tally.jam1 += out.jam1_size as u64;
        tally.jam2 += out.jam2_size as u64;
        tally.eaves_successes += out
            .eaves_hop1
            .iter()
            .chain(&out.eaves_hop2)
            .filter(|&&e| e)
            .count() as u64;
    }
    tally
}

/// Estimates both outage probabilities and the relay load balance.
///
/// The result is a pure function of `(params, cfg)` with `cfg.workers`
/// excluded.
pub fn run_simulation(params: &SystemParams, cfg: &SimConfig) -> Result<SimResult, ParamError> {
    params.validate()?;
    cfg.validate()?;
    let base = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = params.n;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| ParamError::new("workers", e.to_string()))?;
    let tally = pool.install(|| {
        (0..cfg.blocks())
            .into_par_iter()
            .fold(
                || Tally::new(n),
                |acc, block| run_block(params, cfg, &base, block, acc),
            )
            .reduce(|| Tally::new(n), Tally::merge)
    });

    let trials = cfg.trials;
    let counts_f: Vec<f64> = tally.selection_counts.iter().map(|&c| c as f64).collect();
    Ok(SimResult {
        trials,
        transmission_outages: tally.transmission_outages,
        secrecy_outages: tally.secrecy_outages,
        p_out_t_hat: tally.transmission_outages as f64 / trials as f64,
        p_out_s_hat: tally.secrecy_outages as f64 / trials as f64,
        ci_t: wilson_interval(tally.transmission_outages, trials, 0.95)?,
        ci_s: wilson_interval(tally.secrecy_outages, trials, 0.95)?,
        jain_index: jain_fairness(&counts_f)?,
        selection_counts: tally.selection_counts,
        mean_jam1: tally.jam1 as f64 / trials as f64,
        mean_jam2: tally.jam2 as f64 / trials as f64,
        eaves_hop_successes: tally.eaves_successes,
        eaves_hop_observations: 2 * params.m as u64 * trials,
    })
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(
    successes: u64,
    trials: u64,
    confidence: f64,
) -> Result<Interval, ParamError> {
    if trials == 0 {
        return Err(ParamError::new("trials", "must be at least 1"));
    }
    if successes > trials {
        return Err(ParamError::new("successes", "cannot exceed trials"));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(ParamError::new(
            "confidence",
            "must lie strictly between 0 and 1",
        ));
    }
    let z = Normal::standard().inverse_cdf(1.0 - (1.0 - confidence) / 2.0);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if successes == 0 {
        0.0
    } else {
        (center - half).max(0.0)
    };
    let hi = if successes == trials {
        1.0
    } else {
        (center + half).min(1.0)
    };
    Ok(Interval { lo, hi })
}

/// Jain's index `(sum x)^2 / (n * sum x^2)`.
pub fn jain_fairness(counts: &[f64]) -> Result<f64, ParamError> {
    if counts.iter().any(|&x| !x.is_finite() || x < 0.0) {
        return Err(ParamError::new(
            "counts",
            "entries must be finite and non-negative",
        ));
    }
    let sum: f64 = counts.iter().sum();
    if sum <= 0.0 {
        return Err(ParamError::new(
            "counts",
            "need at least one positive entry",
        ));
    }
    let sq: f64 = counts.iter().map(|x| x * x).sum();
    Ok(sum * sum / (counts.len() as f64 * sq))
}
