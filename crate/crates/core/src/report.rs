//! CSV rows and console summaries.

use std::fmt::Write as _;

use crate::bounds::{Bound, BoundsReport};
use crate::model::SystemParams;
use crate::montecarlo::{SimConfig, SimResult};

/// Column order of every CSV this crate writes.
pub const HEADER: [&str; 30] = [
    "n",
    "m",
    "k",
    "tau",
    "gamma_r",
    "gamma_e",
    "es",
    "n0",
    "epsilon_t",
    "epsilon_s",
    "trials",
    "block_length",
    "seed",
    "p_out_t_hat",
    "p_out_t_lo",
    "p_out_t_hi",
    "p_out_s_hat",
    "p_out_s_lo",
    "p_out_s_hi",
    "jain_index",
    "mean_jam1",
    "mean_jam2",
    "psi",
    "p_out_t_bound",
    "p_out_s_bound",
    "tau_min",
    "tau_max",
    "m_max",
    "feasible",
    "diagnostics",
];

/// Formats `x` with 9 significant digits, `%.9g` style.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_fraction(mantissa), sign, exp.abs())
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt<T: ToString>(b: &Bound<T>) -> String {
    b.as_ref().map(|v| v.to_string()).unwrap_or_default()
}

fn opt_f(b: &Bound<f64>) -> String {
    b.as_ref().map(|&v| fmt_sig(v)).unwrap_or_default()
}

/// Flags estimates whose whole 95% interval lies above the closed-form bound.
pub fn exceedance_flags(sim: &SimResult, bounds: &BoundsReport) -> Vec<String> {
    let mut flags = Vec::new();
    if sim.ci_t.lo > bounds.p_out_t_bound {
        flags.push("p_out_t_hat:exceeds-bound".to_string());
    }
    if !bounds.p_out_s_bound.vacuous && sim.ci_s.lo > bounds.p_out_s_bound.value {
        flags.push("p_out_s_hat:exceeds-bound".to_string());
    }
    flags
}

/// One CSV record. Simulation columns are empty when `sim` is `None`.
pub fn csv_record(
    params: &SystemParams,
    sim: Option<(&SimConfig, &SimResult)>,
    bounds: &BoundsReport,
) -> Vec<String> {
    let p = params;
    let mut row = vec![
        p.n.to_string(),
        p.m.to_string(),
        p.k.to_string(),
        fmt_sig(p.tau),
        fmt_sig(p.gamma_r),
        fmt_sig(p.gamma_e),
        fmt_sig(p.es),
        fmt_sig(p.n0),
        fmt_sig(p.epsilon_t),
        fmt_sig(p.epsilon_s),
    ];
    let mut diagnostics = bounds.diagnostics();
    match sim {
        Some((cfg, r)) => {
            row.extend([
                cfg.trials.to_string(),
                cfg.block_length.to_string(),
                cfg.seed.to_string(),
                fmt_sig(r.p_out_t_hat),
                fmt_sig(r.ci_t.lo),
                fmt_sig(r.ci_t.hi),
                fmt_sig(r.p_out_s_hat),
                fmt_sig(r.ci_s.lo),
                fmt_sig(r.ci_s.hi),
                fmt_sig(r.jain_index),
                fmt_sig(r.mean_jam1),
                fmt_sig(r.mean_jam2),
            ]);
            diagnostics.extend(exceedance_flags(r, bounds));
        }
        None => row.extend(std::iter::repeat_n(String::new(), 12)),
    }
    row.extend([
        fmt_sig(bounds.psi),
        fmt_sig(bounds.p_out_t_bound),
        fmt_sig(bounds.p_out_s_bound.value),
        opt_f(&bounds.tau_min),
        opt_f(&bounds.tau_max),
        opt(&bounds.m_max),
        bounds.feasible.to_string(),
        diagnostics.join(";"),
    ]);
    debug_assert_eq!(row.len(), HEADER.len());
    row
}

fn describe(b: &Bound<f64>) -> String {
    match b {
        Ok(v) => fmt_sig(*v),
        Err(e) => format!("undefined ({e})"),
    }
}

/// Multi-line human-readable summary.
pub fn summary(params: &SystemParams, sim: Option<&SimResult>, bounds: &BoundsReport) -> String {
    let p = params;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "n={} m={} k={} tau={} gamma_r={} gamma_e={}",
        p.n,
        p.m,
        p.k,
        fmt_sig(p.tau),
        fmt_sig(p.gamma_r),
        fmt_sig(p.gamma_e)
    );
    if let Some(r) = sim {
        let _ = writeln!(
            s,
            "P_out(T) ~ {} [{}, {}]   bound {}",
            fmt_sig(r.p_out_t_hat),
            fmt_sig(r.ci_t.lo),
            fmt_sig(r.ci_t.hi),
            fmt_sig(bounds.p_out_t_bound)
        );
        let _ = writeln!(
            s,
            "P_out(S) ~ {} [{}, {}]   bound {}{}",
            fmt_sig(r.p_out_s_hat),
            fmt_sig(r.ci_s.lo),
            fmt_sig(r.ci_s.hi),
            fmt_sig(bounds.p_out_s_bound.value),
            if bounds.p_out_s_bound.vacuous {
                " (vacuous)"
            } else {
                ""
            }
        );
        let _ = writeln!(
            s,
            "relay load: jain={} counts={:?}; mean jammers hop1={} hop2={}",
            fmt_sig(r.jain_index),
            r.selection_counts,
            fmt_sig(r.mean_jam1),
            fmt_sig(r.mean_jam2)
        );
    } else {
        let _ = writeln!(
            s,
            "psi={} P_out(T) bound {}  P_out(S) bound {}",
            fmt_sig(bounds.psi),
            fmt_sig(bounds.p_out_t_bound),
            fmt_sig(bounds.p_out_s_bound.value)
        );
    }
    let _ = writeln!(
        s,
        "tau window [{}, {}]  m_max {}",
        describe(&bounds.tau_min),
        describe(&bounds.tau_max),
        match bounds.m_max {
            Ok(m) => m.to_string(),
            Err(e) => format!("undefined ({e})"),
        }
    );
    let verdict = if bounds.feasible {
        if bounds.tau_in_window {
            "feasible; configured tau inside the window"
        } else {
            "feasible; configured tau outside the window"
        }
    } else {
        "infeasible"
    };
    let _ = writeln!(s, "verdict: {verdict}");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::feasibility;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(1.0), "1");
        assert_eq!(fmt_sig(0.5), "0.5");
        assert_eq!(fmt_sig(0.181269247), "0.181269247");
        assert_eq!(fmt_sig(0.1812692469220183), "0.181269247");
        assert_eq!(fmt_sig(123456789.4), "123456789");
        assert_eq!(fmt_sig(1234567894.0), "1.23456789e+09");
        assert_eq!(fmt_sig(0.00001234), "1.234e-05");
        assert_eq!(fmt_sig(0.0001234), "0.0001234");
        assert_eq!(fmt_sig(-2.5), "-2.5");
        assert_eq!(fmt_sig(9.9999999999), "10");
        assert_eq!(fmt_sig(4.279656986348941e-13), "4.27965699e-13");
    }

    #[test]
    fn bounds_only_record_leaves_sim_columns_empty() {
        let p = SystemParams {
            n: 10,
            m: 1,
            k: 2,
            epsilon_t: 0.5,
            ..SystemParams::default()
        };
        let b = feasibility(&p).unwrap();
        let row = csv_record(&p, None, &b);
        assert_eq!(row.len(), HEADER.len());
        assert!(row[10..22].iter().all(String::is_empty));
        assert_eq!(row[26], "");
        assert_eq!(row[28], "false");
        assert!(row[29].contains("tau_max:bound-inapplicable"));
    }
}
