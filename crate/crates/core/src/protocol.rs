//! One two-hop transmission: candidate ranking, random relay pick,
//! threshold-based jammer sets and per-receiver decoding outcomes.

use rand::Rng;

use crate::error::ParamError;
use crate::model::{sinr, ChannelState, GainMatrix, SystemParams};

/// Everything observed during one two-hop transmission.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    /// Message relay (zero-based).
    pub selected: usize,
    /// Candidate relays, strongest bottleneck gain first.
    pub candidates: Vec<usize>,
    /// The selected relay decoded the source.
    pub hop1_ok: bool,
    /// The destination decoded the relay.
    pub hop2_ok: bool,
    /// Per eavesdropper: decoded the source during hop 1.
    pub eaves_hop1: Vec<bool>,
    /// Per eavesdropper: decoded the relay during hop 2.
    pub eaves_hop2: Vec<bool>,
    pub jam1_size: usize,
    pub jam2_size: usize,
}

impl TrialOutcome {
    pub fn transmission_outage(&self) -> bool {
        !(self.hop1_ok && self.hop2_ok)
    }

    pub fn secrecy_outage(&self) -> bool {
        self.eaves_hop1.iter().chain(&self.eaves_hop2).any(|&e| e)
    }
}

/// The `k` relays with the largest `min(g_sr[j], g_rd[j])`, best first.
///
/// Equal keys are ordered by index so the result is deterministic.
pub fn candidate_set(g_sr: &[f64], g_rd: &[f64], k: usize) -> Result<Vec<usize>, ParamError> {
    if g_sr.len() != g_rd.len() {
        return Err(ParamError::new(
            "n",
            format!(
                "gain vectors differ in length ({} vs {})",
                g_sr.len(),
                g_rd.len()
            ),
        ));
    }
    if k == 0 || k > g_sr.len() {
        return Err(ParamError::new(
            "k",
            format!("must satisfy 1 <= k <= n (k={}, n={})", k, g_sr.len()),
        ));
    }
    let mut order: Vec<usize> = (0..g_sr.len()).collect();
    let key = |j: usize| g_sr[j].min(g_rd[j]);
    order.sort_by(|&a, &b| key(b).total_cmp(&key(a)).then(a.cmp(&b)));
    order.truncate(k);
    Ok(order)
}

/// Uniform pick from a non-empty candidate set.
///
/// # Panics
///
/// Panics if `candidates` is empty; a validated `k >= 1` never produces one.
pub fn select_relay<R: Rng + ?Sized>(candidates: &[usize], rng: &mut R) -> usize {
    assert!(!candidates.is_empty(), "candidate relay set is empty");
    candidates[rng.random_range(0..candidates.len())]
}

/// Relays other than `j_star` whose gain towards `j_star` is below `tau`.
pub fn jammer_set_hop1(g_rr: &GainMatrix, j_star: usize, tau: f64) -> Vec<usize> {
    (0..g_rr.rows())
        .filter(|&j| j != j_star && g_rr.get(j, j_star) < tau)
        .collect()
}

/// Relays other than `j_star` whose gain towards the destination is below `tau`.
pub fn jammer_set_hop2(g_rd: &[f64], j_star: usize, tau: f64) -> Vec<usize> {
    (0..g_rd.len())
        .filter(|&j| j != j_star && g_rd[j] < tau)
        .collect()
}

fn check_dimensions(params: &SystemParams, ch: &ChannelState) -> Result<(), ParamError> {
    let (n, m) = (params.n, params.m);
    let ok = ch.g_sr.len() == n
        && ch.g_rd.len() == n
        && ch.g_rr.rows() == n
        && ch.g_rr.cols() == n
        && ch.g_se.len() == m
        && (ch.g_re_h1.rows(), ch.g_re_h1.cols()) == (n, m)
        && (ch.g_re_h2.rows(), ch.g_re_h2.cols()) == (n, m);
    if ok {
        Ok(())
    } else {
        Err(ParamError::new(
            "n",
            format!("channel state is not dimensioned for n={n}, m={m}"),
        ))
    }
}

/// Runs both hops on `ch` and classifies every receiver.
///
/// Hop 2 is evaluated even when hop 1 fails. The only randomness consumed
/// from `rng` is the relay pick.
pub fn run_trial<R: Rng + ?Sized>(
    params: &SystemParams,
    ch: &ChannelState,
    rng: &mut R,
) -> Result<TrialOutcome, ParamError> {
    check_dimensions(params, ch)?;
    let candidates = candidate_set(&ch.g_sr, &ch.g_rd, params.k)?;
    let j_star = select_relay(&candidates, rng);
    let (es, n0) = (params.es, params.n0);

    let jam1 = jammer_set_hop1(&ch.g_rr, j_star, params.tau);
    let hop1_ok = sinr(
        ch.g_sr[j_star],
        jam1.iter().map(|&j| ch.g_rr.get(j, j_star)),
        es,
        n0,
    ) >= params.gamma_r;
    let eaves_hop1 = (0..params.m)
        .map(|e| {
            sinr(
                ch.g_se[e],
                jam1.iter().map(|&j| ch.g_re_h1.get(j, e)),
                es,
                n0,
            ) >= params.gamma_e
        })
        .collect();

    let jam2 = jammer_set_hop2(&ch.g_rd, j_star, params.tau);
    let hop2_ok = sinr(ch.g_rd[j_star], jam2.iter().map(|&j| ch.g_rd[j]), es, n0) >= params.gamma_r;
    let eaves_hop2 = (0..params.m)
        .map(|e| {
            sinr(
                ch.g_re_h2.get(j_star, e),
                jam2.iter().map(|&j| ch.g_re_h2.get(j, e)),
                es,
                n0,
            ) >= params.gamma_e
        })
        .collect();

    Ok(TrialOutcome {
        selected: j_star,
        candidates,
        hop1_ok,
        hop2_ok,
        eaves_hop1,
        eaves_hop2,
        jam1_size: jam1.len(),
        jam2_size: jam2.len(),
    })
}
