//! Closed-form outage bounds and design limits.
//!
//! Several of these formulas only make sense on part of the parameter
//! space (for instance the reliability factor `B` must lie in `(0, 1)` for
//! the jamming threshold ceiling to exist). Evaluations outside that range
//! return [`Inapplicable`] instead of NaN or infinity.
//!
//! Every logarithm is natural.

use statrs::function::gamma::ln_gamma;
use thiserror::Error;

use crate::error::ParamError;
use crate::model::SystemParams;

/// Why a closed-form design limit does not exist at the given parameters.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum Inapplicable {
    /// `B = [C(k, k/2)(1 + k sqrt(1 - eps_t))]^(1/k) - 1` fell outside `(0, 1)`.
    #[error("bound-inapplicable: reliability factor B = {b} outside (0, 1)")]
    ReliabilityFactor { b: f64 },
    /// The secrecy target cannot be met by any finite threshold.
    #[error("secrecy-unattainable: threshold argument A = {a} is not positive")]
    SecrecyUnattainable { a: f64 },
    /// With a single relay nobody can jam.
    #[error("no-jammers: at least two relays are required")]
    NoJammers,
}

impl Inapplicable {
    /// Short machine-readable token for CSV diagnostics.
    pub fn token(&self) -> &'static str {
        match self {
            Inapplicable::ReliabilityFactor { .. } => "bound-inapplicable",
            Inapplicable::SecrecyUnattainable { .. } => "secrecy-unattainable",
            Inapplicable::NoJammers => "no-jammers",
        }
    }
}

pub type Bound<T> = Result<T, Inapplicable>;

/// Aggregate reliability factor `exp(-2 gamma_r (n-1)(1-e^-tau) tau)`.
pub fn psi(n: usize, tau: f64, gamma_r: f64) -> f64 {
    let jammers = (n.saturating_sub(1)) as f64 * -(-tau).exp_m1();
    (-2.0 * gamma_r * jammers * tau).exp()
}

/// `ln C(n, i)`. Exact integer arithmetic for `n <= 60`, log-gamma above.
pub fn ln_binomial(n: u64, i: u64) -> f64 {
    debug_assert!(i <= n);
    let i = i.min(n - i);
    if n <= 60 {
        let mut c: u64 = 1;
        for t in 0..i {
            // C(n, t+1) = C(n, t) (n - t) / (t + 1) stays integral and < 2^63.
            c = c * (n - t) / (t + 1);
        }
        (c as f64).ln()
    } else {
        ln_gamma(n as f64 + 1.0) - ln_gamma(i as f64 + 1.0) - ln_gamma((n - i) as f64 + 1.0)
    }
}

// i * ln(x) with 0 * ln(0) = 0.
fn xlogy(i: u64, ln_x: f64) -> f64 {
    if i == 0 {
        0.0
    } else {
        i as f64 * ln_x
    }
}

/// Mean over `j = 1..=k` of `P(Bin(n, 1 - psi) >= n - j + 1)`.
fn binomial_tail_average(n: usize, k: usize, psi: f64) -> f64 {
    let n64 = n as u64;
    let ln_q = (-psi).ln_1p(); // ln(1 - psi)
    let ln_p = psi.ln();
    let pmf =
        |i: u64| -> f64 { (ln_binomial(n64, i) + xlogy(i, ln_q) + xlogy(n64 - i, ln_p)).exp() };
    let mut tail = 0.0;
    let mut acc = 0.0;
    for j in 1..=k as u64 {
        tail += pmf(n64 - j + 1);
        acc += tail;
    }
    (acc / k as f64).clamp(0.0, 1.0)
}

/// Transmission outage bound `2X - X^2` at a given `psi`.
pub fn transmission_outage_bound_from_psi(n: usize, k: usize, psi: f64) -> Result<f64, ParamError> {
    if k == 0 || k > n {
        return Err(ParamError::new(
            "k",
            format!("must satisfy 1 <= k <= n (k={k}, n={n})"),
        ));
    }
    if !(0.0..=1.0).contains(&psi) {
        return Err(ParamError::new("psi", "must lie in [0, 1]"));
    }
    let x = binomial_tail_average(n, k, psi);
    Ok((2.0 * x - x * x).clamp(0.0, 1.0))
}

/// Upper bound on the transmission outage probability.
pub fn transmission_outage_bound(
    n: usize,
    k: usize,
    tau: f64,
    gamma_r: f64,
) -> Result<f64, ParamError> {
    transmission_outage_bound_from_psi(n, k, psi(n, tau, gamma_r))
}

/// A probability bound that may carry no information.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecrecyBound {
    pub value: f64,
    /// Set when `Y = m (1+gamma_e)^-(n-1)(1-e^-tau)` exceeds 1: the
    /// quadratic form then decreases in `Y`, so the bound is replaced by 1.
    pub vacuous: bool,
}

/// Upper bound on the secrecy outage probability.
///
/// `m` is real so fractional eavesdropper counts can probe the formula.
pub fn secrecy_outage_bound(n: usize, m: f64, tau: f64, gamma_e: f64) -> SecrecyBound {
    let jammers = (n.saturating_sub(1)) as f64 * -(-tau).exp_m1();
    let y = m * (-jammers * gamma_e.ln_1p()).exp();
    if y > 1.0 {
        SecrecyBound {
            value: 1.0,
            vacuous: true,
        }
    } else {
        SecrecyBound {
            value: (2.0 * y - y * y).clamp(0.0, 1.0),
            vacuous: false,
        }
    }
}

/// `B = [C(k, floor(k/2)) (1 + k sqrt(1 - eps_t))]^(1/k) - 1`.
pub fn reliability_factor(k: usize, epsilon_t: f64) -> f64 {
    let k64 = k as u64;
    let ln_inner = ln_binomial(k64, k64 / 2) + (k as f64 * (1.0 - epsilon_t).sqrt()).ln_1p();
    (ln_inner / k as f64).exp_m1()
}

// 1 - sqrt(1 - eps) without cancellation.
fn one_minus_sqrt_complement(eps: f64) -> f64 {
    eps / (1.0 + (1.0 - eps).sqrt())
}

/// Largest jamming threshold compatible with the reliability target.
pub fn tau_upper(n: usize, k: usize, gamma_r: f64, epsilon_t: f64) -> Bound<f64> {
    if n < 2 {
        return Err(Inapplicable::NoJammers);
    }
    let b = reliability_factor(k, epsilon_t);
    if !(b > 0.0 && b < 1.0) {
        return Err(Inapplicable::ReliabilityFactor { b });
    }
    Ok((-b.ln() / (2.0 * gamma_r * (n - 1) as f64)).sqrt())
}

/// Smallest jamming threshold compatible with the secrecy target.
///
/// `m` is real for the same reason as in [`secrecy_outage_bound`]. Returns
/// 0 when the target holds without any jamming.
pub fn tau_lower(n: usize, m: f64, gamma_e: f64, epsilon_s: f64) -> Bound<f64> {
    let budget = one_minus_sqrt_complement(epsilon_s);
    if m <= budget {
        return Ok(0.0);
    }
    if n < 2 {
        return Err(Inapplicable::SecrecyUnattainable {
            a: f64::NEG_INFINITY,
        });
    }
    let a = 1.0 + (budget / m).ln() / ((n - 1) as f64 * gamma_e.ln_1p());
    if a <= 0.0 {
        return Err(Inapplicable::SecrecyUnattainable { a });
    }
    Ok((-a.ln()).max(0.0))
}

/// Tolerable eavesdropper count before flooring.
pub fn max_eavesdroppers_real(
    n: usize,
    k: usize,
    gamma_r: f64,
    gamma_e: f64,
    epsilon_t: f64,
    epsilon_s: f64,
) -> Bound<f64> {
    let b = reliability_factor(k, epsilon_t);
    if !(b > 0.0 && b < 1.0) {
        return Err(Inapplicable::ReliabilityFactor { b });
    }
    let exponent = (-((n.saturating_sub(1)) as f64) * b.ln() / (2.0 * gamma_r)).sqrt();
    Ok(one_minus_sqrt_complement(epsilon_s) * (exponent * gamma_e.ln_1p()).exp())
}

/// Largest integer number of eavesdroppers the network tolerates.
/// Saturates at `u64::MAX`.
pub fn max_eavesdroppers(
    n: usize,
    k: usize,
    gamma_r: f64,
    gamma_e: f64,
    epsilon_t: f64,
    epsilon_s: f64,
) -> Bound<u64> {
    max_eavesdroppers_real(n, k, gamma_r, gamma_e, epsilon_t, epsilon_s).map(|x| x.floor() as u64)
}

/// All closed-form quantities at one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport {
    pub psi: f64,
    pub p_out_t_bound: f64,
    pub p_out_s_bound: SecrecyBound,
    pub tau_max: Bound<f64>,
    pub tau_min: Bound<f64>,
    pub m_max: Bound<u64>,
    /// Both thresholds exist and `tau_min <= tau_max`.
    pub feasible: bool,
    /// The configured `tau` lies in `[tau_min, tau_max]`.
    pub tau_in_window: bool,
}

impl BoundsReport {
    /// `field:token` pairs for every undefined or vacuous entry.
    pub fn diagnostics(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.p_out_s_bound.vacuous {
            out.push("p_out_s_bound:vacuous".to_string());
        }
        if let Err(e) = self.tau_min {
            out.push(format!("tau_min:{}", e.token()));
        }
        if let Err(e) = self.tau_max {
            out.push(format!("tau_max:{}", e.token()));
        }
        if let Err(e) = self.m_max {
            out.push(format!("m_max:{}", e.token()));
        }
        out
    }
}

/// Evaluates every bound and the threshold window at `params`.
pub fn feasibility(params: &SystemParams) -> Result<BoundsReport, ParamError> {
    params.validate()?;
    let p = params;
    let tau_max = tau_upper(p.n, p.k, p.gamma_r, p.epsilon_t);
    let tau_min = if p.m == 0 {
        Ok(0.0)
    } else {
        tau_lower(p.n, p.m as f64, p.gamma_e, p.epsilon_s)
    };
    let feasible = match (tau_min, tau_max) {
        (Ok(lo), Ok(hi)) => lo <= hi,
        _ => false,
    };
    let tau_in_window = match (tau_min, tau_max) {
        (Ok(lo), Ok(hi)) => lo <= p.tau && p.tau <= hi,
        _ => false,
    };
    Ok(BoundsReport {
        psi: psi(p.n, p.tau, p.gamma_r),
        p_out_t_bound: transmission_outage_bound(p.n, p.k, p.tau, p.gamma_r)?,
        p_out_s_bound: secrecy_outage_bound(p.n, p.m as f64, p.tau, p.gamma_e),
        tau_max,
        tau_min,
        m_max: max_eavesdroppers(p.n, p.k, p.gamma_r, p.gamma_e, p.epsilon_t, p.epsilon_s),
        feasible,
        tau_in_window,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn psi_trivial_cases() {
        assert_eq!(psi(7, 0.0, 3.0), 1.0);
        assert_eq!(psi(1, 4.2, 3.0), 1.0);
    }

    #[test]
    fn ln_binomial_matches_both_paths() {
        assert_eq!(ln_binomial(5, 0), 0.0);
        assert!((ln_binomial(10, 3) - 120f64.ln()).abs() < 1e-14);
        assert!((ln_binomial(60, 30) - 118264581564861424f64.ln()).abs() < 1e-13);
        // log-gamma path close to the exact boundary
        let exact = ln_binomial(60, 20) + (61.0f64 / 41.0).ln();
        assert!(rel(ln_binomial(61, 20), exact) < 1e-13);
    }

    #[test]
    fn transmission_bound_trivial_cases() {
        assert_eq!(transmission_outage_bound(6, 3, 0.0, 1.0).unwrap(), 0.0);
        assert_eq!(transmission_outage_bound(1, 1, 2.0, 1.0).unwrap(), 0.0);
        assert_eq!(
            transmission_outage_bound_from_psi(2, 1, 0.5).unwrap(),
            0.4375
        );
        assert!(transmission_outage_bound(3, 4, 0.5, 1.0).is_err());
    }

    #[test]
    fn secrecy_bound_cases() {
        assert_eq!(secrecy_outage_bound(9, 0.0, 0.3, 1.0).value, 0.0);
        let at_zero = secrecy_outage_bound(9, 1.0, 0.0, 1.0);
        assert_eq!(at_zero.value, 1.0);
        assert!(!at_zero.vacuous);
        assert!(secrecy_outage_bound(9, 2.0, 0.0, 1.0).vacuous);
        assert!((secrecy_outage_bound(2, 1.0, 50.0, 1.0).value - 0.75).abs() < 1e-15);
    }

    #[test]
    fn tau_upper_cases() {
        let closed = (-(0.9f64).sqrt().ln() / 8.0).sqrt();
        assert!(rel(tau_upper(5, 1, 1.0, 0.1).unwrap(), closed) < 1e-12);
        assert!(tau_upper(5, 1, 1.0, 1e-12).unwrap() < 1e-5);
        assert!(matches!(
            tau_upper(5, 2, 1.0, 0.5),
            Err(Inapplicable::ReliabilityFactor { b }) if (b - 1.197368).abs() < 1e-6
        ));
        assert_eq!(tau_upper(1, 1, 1.0, 0.1), Err(Inapplicable::NoJammers));
    }

    #[test]
    fn tau_lower_cases() {
        assert!((tau_lower(10, 1.0, 1.0, 0.1).unwrap() - 0.646354).abs() < 1e-6);
        assert!(matches!(
            tau_lower(5, 1.0, 1.0, 0.1),
            Err(Inapplicable::SecrecyUnattainable { .. })
        ));
        assert_eq!(tau_lower(5, 0.05, 1.0, 0.1).unwrap(), 0.0);
    }

    #[test]
    fn max_eavesdropper_cases() {
        assert_eq!(max_eavesdroppers(5, 1, 1.0, 1.0, 0.1, 0.1).unwrap(), 0);
        assert_eq!(max_eavesdroppers(1000, 1, 1.0, 1.0, 0.1, 0.1).unwrap(), 1);
        assert_eq!(max_eavesdroppers(1000, 1, 1.0, 1.0, 0.1, 1e-12).unwrap(), 0);
        assert!(max_eavesdroppers(10, 2, 1.0, 1.0, 0.5, 0.1).is_err());
    }

    #[test]
    fn m_max_parity_counterexample() {
        // B(2) ~ 0.9153 > B(3) ~ 0.8903 at eps_t = 0.826, so k = 3 tolerates
        // more eavesdroppers than k = 2.
        assert!(reliability_factor(2, 0.826) > reliability_factor(3, 0.826));
        let m2 = max_eavesdroppers_real(145, 2, 0.1, 1.78, 0.826, 0.6).unwrap();
        let m3 = max_eavesdroppers_real(145, 3, 0.1, 1.78, 0.826, 0.6).unwrap();
        assert!(m3 > m2);
    }

    #[test]
    fn feasibility_examples() {
        let p = SystemParams {
            n: 10,
            m: 1,
            k: 1,
            tau: 0.3,
            ..SystemParams::default()
        };
        let r = feasibility(&p).unwrap();
        assert!((r.tau_max.unwrap() - 0.054099).abs() < 1e-6);
        assert!((r.tau_min.unwrap() - 0.646354).abs() < 1e-6);
        assert!(!r.feasible);
        assert!(!r.tau_in_window);

        let quiet = feasibility(&SystemParams { m: 0, ..p }).unwrap();
        assert_eq!(quiet.tau_min, Ok(0.0));
        assert!(quiet.feasible);

        let loose = feasibility(&SystemParams {
            epsilon_t: 0.999,
            ..p
        })
        .unwrap();
        assert!(loose.tau_max.unwrap() > r.tau_max.unwrap());

        let bad = feasibility(&SystemParams {
            k: 2,
            epsilon_t: 0.5,
            ..p
        })
        .unwrap();
        assert!(bad
            .diagnostics()
            .iter()
            .any(|d| d == "tau_max:bound-inapplicable"));
        assert!(!bad.feasible);
    }

    #[test]
    fn large_random_selection_evaluates() {
        for n in [100usize, 1_000, 10_000] {
            let v = transmission_outage_bound(n, n, 0.01, 1.0).unwrap();
            assert!(v.is_finite() && (0.0..=1.0).contains(&v));
        }
    }

    proptest! {
        #[test]
        fn psi_decreasing_in_tau(n in 2usize..200, tau in 0.001f64..5.0, dt in 0.001f64..1.0, g in 0.01f64..5.0) {
            let a = psi(n, tau, g);
            let b = psi(n, tau + dt, g);
            // Exact value is positive; large exponents underflow to 0.
            prop_assert!((0.0..=1.0).contains(&a));
            prop_assert!(b <= a);
            if a > 1e-300 {
                prop_assert!(b < a);
            }
        }

        #[test]
        fn transmission_bound_grows_with_k(n in 2usize..120, p in 0.01f64..0.99) {
            let mut prev = 0.0;
            for k in 1..=n {
                let v = transmission_outage_bound_from_psi(n, k, p).unwrap();
                prop_assert!(v + 1e-12 >= prev, "k={} v={} prev={}", k, v, prev);
                prev = v;
            }
        }

        #[test]
        fn m_max_monotone(n in 2usize..500, et in 0.5f64..0.9999, es in 0.001f64..0.999, gr in 0.1f64..3.0, ge in 0.1f64..3.0) {
            // C(k, floor(k/2)) grows faster from odd k to even k than from
            // even to odd, so B (and hence m_max) is only monotone within a
            // parity class; see `m_max_parity_counterexample`.
            for start in [1usize, 2] {
                let mut prev = f64::INFINITY;
                for k in (start..=n.min(12)).step_by(2) {
                    if let Ok(m) = max_eavesdroppers_real(n, k, gr, ge, et, es) {
                        prop_assert!(m <= prev * (1.0 + 1e-12), "k={} m={} prev={}", k, m, prev);
                        prev = m;
                    }
                }
            }
            if let Ok(m1) = max_eavesdroppers_real(n, 1, gr, ge, et, es) {
                for k in 2..=n.min(12) {
                    if let Ok(m) = max_eavesdroppers_real(n, k, gr, ge, et, es) {
                        prop_assert!(m <= m1 * (1.0 + 1e-12));
                    }
                }
            }
            if let (Ok(a), Ok(b)) = (
                max_eavesdroppers_real(n, 1, gr, ge, et, es),
                max_eavesdroppers_real(n + 7, 1, gr, ge, et, es),
            ) {
                prop_assert!(b >= a);
            }
        }

        #[test]
        fn secrecy_bound_tight_at_tau_min(n in 2usize..400, k in 1usize..3, et in 0.01f64..0.999, es in 0.001f64..0.999, gr in 0.1f64..3.0, ge in 0.1f64..3.0) {
            prop_assume!(k <= n);
            if let Ok(m_max) = max_eavesdroppers(n, k, gr, ge, et, es) {
                if (1..1_000_000).contains(&m_max) {
                    if let Ok(tau) = tau_lower(n, m_max as f64, ge, es) {
                        let b = secrecy_outage_bound(n, m_max as f64, tau, ge);
                        prop_assert!(b.value <= es + 1e-9, "bound {} eps {}", b.value, es);
                    }
                }
            }
        }

        #[test]
        fn k1_reduction_matches_closed_form(n in 2usize..10_000, et in 0.01f64..0.99, gr in 0.01f64..10.0) {
            let general = tau_upper(n, 1, gr, et).unwrap();
            let closed = (-(1.0 - et).sqrt().ln() / (2.0 * gr * (n - 1) as f64)).sqrt();
            prop_assert!(rel(general, closed) < 1e-12, "{} vs {}", general, closed);
        }
    }
}
