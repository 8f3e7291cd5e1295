//! System parameters, fading draws and the SINR used by every trial.
//!
//! All squared channel gains are unit-mean exponential (Rayleigh fading with
//! identical path loss between every pair of nodes). Receiver noise enters
//! the SINR as the constant `N0 / 2`; it is never sampled.

use rand::Rng;

use crate::error::ParamError;

/// Scalars describing one network and protocol configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Number of relays.
    pub n: usize,
    /// Number of eavesdroppers.
    pub m: usize,
    /// Candidate relay set size, `1 <= k <= n`.
    pub k: usize,
    /// Jammer selection threshold on squared gains.
    pub tau: f64,
    /// SINR a legitimate receiver needs to decode.
    pub gamma_r: f64,
    /// SINR an eavesdropper needs to decode.
    pub gamma_e: f64,
    /// Common transmit power.
    pub es: f64,
    /// Noise parameter; the SINR denominator carries `n0 / 2`.
    pub n0: f64,
    /// Target upper bound on the transmission outage probability.
    pub epsilon_t: f64,
    /// Target upper bound on the secrecy outage probability.
    pub epsilon_s: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        SystemParams {
            n: 5,
            m: 1,
            k: 1,
            tau: 0.0,
            gamma_r: 1.0,
            gamma_e: 1.0,
            es: 1.0,
            n0: 0.2,
            epsilon_t: 0.1,
            epsilon_s: 0.1,
        }
    }
}

impl SystemParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        if self.n == 0 {
            return Err(ParamError::new("n", "must be at least 1"));
        }
        if self.k == 0 || self.k > self.n {
            return Err(ParamError::new(
                "k",
                format!("must satisfy 1 <= k <= n (k={}, n={})", self.k, self.n),
            ));
        }
        if !self.tau.is_finite() || self.tau < 0.0 {
            return Err(ParamError::new("tau", "must be finite and non-negative"));
        }
        positive("gamma_r", self.gamma_r)?;
        positive("gamma_e", self.gamma_e)?;
        positive("es", self.es)?;
        positive("n0", self.n0)?;
        open_unit("epsilon_t", self.epsilon_t)?;
        open_unit("epsilon_s", self.epsilon_s)?;
        Ok(())
    }
}

fn positive(field: &'static str, x: f64) -> Result<(), ParamError> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(ParamError::new(field, "must be finite and positive"))
    }
}

fn open_unit(field: &'static str, x: f64) -> Result<(), ParamError> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(ParamError::new(field, "must lie strictly between 0 and 1"))
    }
}

/// Dense row-major matrix of squared gains.
#[derive(Debug, Clone, PartialEq)]
pub struct GainMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl GainMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        GainMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        debug_assert!(row < self.rows && col < self.cols);
        self.data[row * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.rows && col < self.cols);
        self.data[row * self.cols + col] = value;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// One realization of every squared gain a two-hop trial needs.
///
/// Relay indices are zero-based. The legitimate-side gains (`g_sr`, `g_rd`,
/// `g_rr`) serve both hops; the eavesdropper-side matrices are drawn
/// independently for each hop.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelState {
    /// Source to relay `j`.
    pub g_sr: Vec<f64>,
    /// Relay `j` to destination.
    pub g_rd: Vec<f64>,
    /// Relay to relay, symmetric with zero diagonal (`n x n`).
    pub g_rr: GainMatrix,
    /// Source to eavesdropper `e` (hop 1 signal).
    pub g_se: Vec<f64>,
    /// Relay `j` to eavesdropper `e` during hop 1 (`n x m`).
    pub g_re_h1: GainMatrix,
    /// Relay `j` to eavesdropper `e` during hop 2 (`n x m`).
    pub g_re_h2: GainMatrix,
}

impl ChannelState {
    pub fn relays(&self) -> usize {
        self.g_sr.len()
    }

    pub fn eavesdroppers(&self) -> usize {
        self.g_se.len()
    }

    /// Draws the legitimate-side gains in place.
    ///
    /// Consumes exactly `2n + n(n-1)/2` variates, in the order `g_sr`,
    /// `g_rd`, then the strict upper triangle of `g_rr` row by row.
    pub fn resample_legitimate<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let n = self.relays();
        for g in self.g_sr.iter_mut() {
            *g = sample_exponential(rng);
        }
        for g in self.g_rd.iter_mut() {
            *g = sample_exponential(rng);
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let g = sample_exponential(rng);
                self.g_rr.set(i, j, g);
                self.g_rr.set(j, i, g);
            }
        }
    }

    /// Draws the eavesdropper-side gains in place.
    ///
    /// Consumes exactly `m + 2nm` variates: `g_se`, then `g_re_h1`, then
    /// `g_re_h2`, each row-major.
    pub fn resample_eavesdroppers<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        for g in self.g_se.iter_mut() {
            *g = sample_exponential(rng);
        }
        for g in self.g_re_h1.data.iter_mut() {
            *g = sample_exponential(rng);
        }
        for g in self.g_re_h2.data.iter_mut() {
            *g = sample_exponential(rng);
        }
    }

    fn zeroed(n: usize, m: usize) -> Self {
        ChannelState {
            g_sr: vec![0.0; n],
            g_rd: vec![0.0; n],
            g_rr: GainMatrix::zeros(n, n),
            g_se: vec![0.0; m],
            g_re_h1: GainMatrix::zeros(n, m),
            g_re_h2: GainMatrix::zeros(n, m),
        }
    }
}

/// Maps a uniform `u` in `(0, 1]` to a unit-mean exponential variate.
#[inline]
pub fn exponential_from_uniform(u: f64) -> f64 {
    -u.ln()
}

/// Unit-mean exponential variate by inversion.
#[inline]
pub fn sample_exponential<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // random::<f64>() lies in [0, 1); flipping it excludes u = 0.
    let u = 1.0 - rng.random::<f64>();
    exponential_from_uniform(u)
}

/// Draws a full, independent channel realization for `params`.
pub fn sample_channel_state<R: Rng + ?Sized>(params: &SystemParams, rng: &mut R) -> ChannelState {
    let mut ch = ChannelState::zeroed(params.n, params.m);
    ch.resample_legitimate(rng);
    ch.resample_eavesdroppers(rng);
    ch
}

/// `es * signal / (es * sum(jam) + n0 / 2)`.
#[inline]
pub fn sinr<I>(signal_gain: f64, jam_gains: I, es: f64, n0: f64) -> f64
where
    I: IntoIterator<Item = f64>,
{
    let interference: f64 = jam_gains.into_iter().map(|g| es * g).sum();
    es * signal_gain / (interference + n0 / 2.0)
}
