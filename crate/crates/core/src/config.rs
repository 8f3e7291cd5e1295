//! Flat `key=value` run configuration and sweep descriptors.
//!
//! Both parsers accept untrusted text and are fuzzed; they never panic and
//! bound the amount of memory a sweep can request.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use thiserror::Error;

use crate::model::SystemParams;
use crate::montecarlo::SimConfig;

/// Hard cap on points produced by one sweep descriptor.
pub const MAX_SWEEP_POINTS: usize = 10_000;

/// Every key accepted in a config file, in canonical order.
pub const KEYS: &[&str] = &[
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
    "workers",
    "out",
    "svg",
    "sweep",
];

const REQUIRED: &[&str] = &["n", "m", "k", "tau"];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("line {line}: duplicate key \"{key}\"")]
    Duplicate { line: usize, key: String },
    #[error("unknown key \"{key}\"")]
    UnknownKey { key: String },
    #[error("{field}: missing required value")]
    Missing { field: String },
    #[error("{field}: {reason}")]
    Invalid { field: String, reason: String },
}

impl ConfigError {
    fn invalid(field: &str, reason: impl Into<String>) -> Self {
        ConfigError::Invalid {
            field: field.to_string(),
            reason: reason.into(),
        }
    }

    /// The configuration field the error refers to, when there is one.
    pub fn field(&self) -> Option<&str> {
        match self {
            ConfigError::Duplicate { key, .. } | ConfigError::UnknownKey { key } => Some(key),
            ConfigError::Missing { field } | ConfigError::Invalid { field, .. } => Some(field),
            ConfigError::Syntax { .. } => None,
        }
    }
}

/// Raw key/value pairs, keys unique.
pub type ConfigPairs = BTreeMap<String, String>;

/// Parses config text: one `key=value` per line, `#` starts a comment,
/// blank lines ignored, whitespace around keys and values trimmed.
pub fn parse_config_text(text: &str) -> Result<ConfigPairs, ConfigError> {
    let mut pairs = ConfigPairs::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line,
            reason: format!("expected key=value, got \"{content}\""),
        })?;
        let key = key.trim();
        if key.is_empty() {
            return Err(ConfigError::Syntax {
                line,
                reason: "empty key".into(),
            });
        }
        if !KEYS.contains(&key) {
            return Err(ConfigError::UnknownKey { key: key.into() });
        }
        if pairs
            .insert(key.to_string(), value.trim().to_string())
            .is_some()
        {
            return Err(ConfigError::Duplicate {
                line,
                key: key.into(),
            });
        }
    }
    Ok(pairs)
}

/// Which parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    K,
    Tau,
    N,
    M,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::K => "k",
            SweepParam::Tau => "tau",
            SweepParam::N => "n",
            SweepParam::M => "m",
        }
    }

    fn is_integer(self) -> bool {
        !matches!(self, SweepParam::Tau)
    }

    pub fn value_of(self, params: &SystemParams) -> f64 {
        match self {
            SweepParam::K => params.k as f64,
            SweepParam::Tau => params.tau,
            SweepParam::N => params.n as f64,
            SweepParam::M => params.m as f64,
        }
    }

    pub fn apply(self, params: &mut SystemParams, value: f64) {
        match self {
            SweepParam::K => params.k = value as usize,
            SweepParam::Tau => params.tau = value,
            SweepParam::N => params.n = value as usize,
            SweepParam::M => params.m = value as usize,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

fn sweep_number(field: &str, text: &str) -> Result<f64, ConfigError> {
    let v: f64 = text
        .trim()
        .parse()
        .map_err(|_| ConfigError::invalid(field, format!("\"{text}\" is not a number")))?;
    if !v.is_finite() {
        return Err(ConfigError::invalid(field, "values must be finite"));
    }
    Ok(v)
}

/// Parses `PARAM:START:STOP:STEP` or `PARAM:V1,V2,...`.
pub fn parse_sweep(text: &str) -> Result<SweepSpec, ConfigError> {
    let parts: Vec<&str> = text.trim().split(':').collect();
    let param = match parts[0].trim() {
        "k" => SweepParam::K,
        "tau" => SweepParam::Tau,
        "n" => SweepParam::N,
        "m" => SweepParam::M,
        other => {
            return Err(ConfigError::invalid(
                "sweep",
                format!("unknown parameter \"{other}\" (expected k, tau, n or m)"),
            ))
        }
    };
    let values = match parts.len() {
        2 => {
            let items: Vec<&str> = parts[1].split(',').collect();
            if items.len() > MAX_SWEEP_POINTS {
                return Err(ConfigError::invalid("sweep", "too many points"));
            }
            items
                .into_iter()
                .map(|s| sweep_number("sweep", s))
                .collect::<Result<Vec<_>, _>>()?
        }
        4 => {
            let start = sweep_number("sweep", parts[1])?;
            let stop = sweep_number("sweep", parts[2])?;
            let step = sweep_number("sweep", parts[3])?;
            if step <= 0.0 {
                return Err(ConfigError::invalid("sweep", "step must be positive"));
            }
            if stop < start {
                return Err(ConfigError::invalid("sweep", "stop must not precede start"));
            }
            // Tolerate round-off in the last point.
            let count = ((stop - start) / step + 1e-9).floor();
            if count.is_nan() || count >= MAX_SWEEP_POINTS as f64 {
                return Err(ConfigError::invalid("sweep", "too many points"));
            }
            (0..=count as usize)
                .map(|i| start + i as f64 * step)
                .collect()
        }
        _ => {
            return Err(ConfigError::invalid(
                "sweep",
                "expected PARAM:START:STOP:STEP or PARAM:V1,V2,...",
            ))
        }
    };
    if values.is_empty() {
        return Err(ConfigError::invalid("sweep", "no points"));
    }
    for &v in &values {
        if v < 0.0 {
            return Err(ConfigError::invalid(
                param.name(),
                "sweep values must be non-negative",
            ));
        }
        if param.is_integer() && (v.fract() != 0.0 || v > u32::MAX as f64) {
            return Err(ConfigError::invalid(
                param.name(),
                format!("sweep value {v} is not a non-negative integer"),
            ));
        }
    }
    Ok(SweepSpec { param, values })
}

/// Parses one or more sweep descriptors separated by `;`.
pub fn parse_sweeps(text: &str) -> Result<Vec<SweepSpec>, ConfigError> {
    text.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(parse_sweep)
        .collect()
}

/// Fully resolved configuration for one CLI invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: SystemParams,
    pub sim: SimConfig,
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub sweeps: Vec<SweepSpec>,
}

fn parse_field<T: std::str::FromStr>(
    pairs: &ConfigPairs,
    key: &str,
) -> Result<Option<T>, ConfigError> {
    match pairs.get(key) {
        None => Ok(None),
        Some(v) => v
            .parse()
            .map(Some)
            .map_err(|_| ConfigError::invalid(key, format!("cannot parse \"{v}\""))),
    }
}

impl RunConfig {
    /// Merges file pairs with overrides (overrides win) and validates.
    pub fn resolve(file: &ConfigPairs, overrides: &ConfigPairs) -> Result<RunConfig, ConfigError> {
        let mut pairs = file.clone();
        for (k, v) in overrides {
            if !KEYS.contains(&k.as_str()) {
                return Err(ConfigError::UnknownKey { key: k.clone() });
            }
            pairs.insert(k.clone(), v.clone());
        }
        for key in REQUIRED {
            if !pairs.contains_key(*key) {
                return Err(ConfigError::Missing {
                    field: key.to_string(),
                });
            }
        }
        let d = SystemParams::default();
        let params = SystemParams {
            n: parse_field(&pairs, "n")?.unwrap_or(d.n),
            m: parse_field(&pairs, "m")?.unwrap_or(d.m),
            k: parse_field(&pairs, "k")?.unwrap_or(d.k),
            tau: parse_field(&pairs, "tau")?.unwrap_or(d.tau),
            gamma_r: parse_field(&pairs, "gamma_r")?.unwrap_or(d.gamma_r),
            gamma_e: parse_field(&pairs, "gamma_e")?.unwrap_or(d.gamma_e),
            es: parse_field(&pairs, "es")?.unwrap_or(d.es),
            n0: parse_field(&pairs, "n0")?.unwrap_or(d.n0),
            epsilon_t: parse_field(&pairs, "epsilon_t")?.unwrap_or(d.epsilon_t),
            epsilon_s: parse_field(&pairs, "epsilon_s")?.unwrap_or(d.epsilon_s),
        };
        let ds = SimConfig::default();
        let sim = SimConfig {
            trials: parse_field(&pairs, "trials")?.unwrap_or(ds.trials),
            block_length: parse_field(&pairs, "block_length")?.unwrap_or(ds.block_length),
            seed: parse_field(&pairs, "seed")?.unwrap_or(ds.seed),
            workers: parse_field(&pairs, "workers")?.unwrap_or_else(default_workers),
        };
        let path = |key: &str| pairs.get(key).filter(|v| !v.is_empty()).map(PathBuf::from);
        let sweeps = match pairs.get("sweep") {
            Some(s) => parse_sweeps(s)?,
            None => Vec::new(),
        };
        let cfg = RunConfig {
            params,
            sim,
            out: path("out"),
            svg: path("svg"),
            sweeps,
        };
        cfg.params
            .validate()
            .map_err(|e| ConfigError::invalid(e.field, e.reason))?;
        cfg.sim
            .validate()
            .map_err(|e| ConfigError::invalid(e.field, e.reason))?;
        cfg.sweep_points()?;
        Ok(cfg)
    }

    /// Parameter points of the cartesian product of all sweeps, first
    /// sweep varying slowest. Without sweeps, the single base point.
    pub fn sweep_points(&self) -> Result<Vec<SystemParams>, ConfigError> {
        let mut points = vec![self.params];
        for sweep in &self.sweeps {
            if points.len().saturating_mul(sweep.values.len()) > MAX_SWEEP_POINTS {
                return Err(ConfigError::invalid("sweep", "too many points"));
            }
            points = points
                .iter()
                .flat_map(|p| {
                    sweep.values.iter().map(move |&v| {
                        let mut q = *p;
                        sweep.param.apply(&mut q, v);
                        q
                    })
                })
                .collect();
        }
        for p in &points {
            p.validate().map_err(|e| {
                ConfigError::invalid(
                    e.field,
                    format!(
                        "at sweep point n={}, m={}, k={}, tau={}: {}",
                        p.n, p.m, p.k, p.tau, e.reason
                    ),
                )
            })?;
        }
        Ok(points)
    }

    /// Canonical `key=value` text; parses back to the same configuration.
    pub fn to_config_text(&self) -> String {
        let p = &self.params;
        let s = &self.sim;
        let mut out = String::new();
        let _ = writeln!(out, "n={}", p.n);
        let _ = writeln!(out, "m={}", p.m);
        let _ = writeln!(out, "k={}", p.k);
        let _ = writeln!(out, "tau={:?}", p.tau);
        let _ = writeln!(out, "gamma_r={:?}", p.gamma_r);
        let _ = writeln!(out, "gamma_e={:?}", p.gamma_e);
        let _ = writeln!(out, "es={:?}", p.es);
        let _ = writeln!(out, "n0={:?}", p.n0);
        let _ = writeln!(out, "epsilon_t={:?}", p.epsilon_t);
        let _ = writeln!(out, "epsilon_s={:?}", p.epsilon_s);
        let _ = writeln!(out, "trials={}", s.trials);
        let _ = writeln!(out, "block_length={}", s.block_length);
        let _ = writeln!(out, "seed={}", s.seed);
        let _ = writeln!(out, "workers={}", s.workers);
        if let Some(o) = &self.out {
            let _ = writeln!(out, "out={}", o.display());
        }
        if let Some(o) = &self.svg {
            let _ = writeln!(out, "svg={}", o.display());
        }
        if !self.sweeps.is_empty() {
            let specs: Vec<String> = self
                .sweeps
                .iter()
                .map(|s| {
                    let vals: Vec<String> = s.values.iter().map(|v| format!("{v:?}")).collect();
                    format!("{}:{}", s.param.name(), vals.join(","))
                })
                .collect();
            let _ = writeln!(out, "sweep={}", specs.join(";"));
        }
        out
    }
}

fn default_workers() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn minimal() -> ConfigPairs {
        parse_config_text("n=5\nm=2\nk=2\ntau=0.3\n").unwrap()
    }

    #[test]
    fn parses_comments_and_whitespace() {
        let pairs = parse_config_text("# header\n\n n = 5 # relays\nm=2\n  k=2\ntau=0.3").unwrap();
        assert_eq!(pairs["n"], "5");
        assert_eq!(pairs["k"], "2");
        assert_eq!(pairs.len(), 4);
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        assert_eq!(
            parse_config_text("n=5\nbogus\n"),
            Err(ConfigError::Syntax {
                line: 2,
                reason: "expected key=value, got \"bogus\"".into()
            })
        );
        assert!(matches!(
            parse_config_text("=3"),
            Err(ConfigError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            parse_config_text("n=1\nn=2"),
            Err(ConfigError::Duplicate { line: 2, .. })
        ));
        assert!(matches!(
            parse_config_text("colour=red"),
            Err(ConfigError::UnknownKey { .. })
        ));
    }

    #[test]
    fn resolve_applies_defaults_and_overrides() {
        let mut over = ConfigPairs::new();
        over.insert("seed".into(), "42".into());
        over.insert("tau".into(), "0.7".into());
        let cfg = RunConfig::resolve(&minimal(), &over).unwrap();
        assert_eq!(cfg.params.n, 5);
        assert_eq!(cfg.params.tau, 0.7);
        assert_eq!(cfg.params.gamma_r, 1.0);
        assert_eq!(cfg.sim.seed, 42);
        assert!(cfg.out.is_none());
    }

    #[test]
    fn resolve_names_the_bad_field() {
        let mut over = ConfigPairs::new();
        over.insert("k".into(), "6".into());
        let err = RunConfig::resolve(&minimal(), &over).unwrap_err();
        assert_eq!(err.field(), Some("k"));

        let mut file = minimal();
        file.remove("tau");
        let err = RunConfig::resolve(&file, &ConfigPairs::new()).unwrap_err();
        assert_eq!(
            err,
            ConfigError::Missing {
                field: "tau".into()
            }
        );

        let mut file = minimal();
        file.insert("trials".into(), "lots".into());
        assert_eq!(
            RunConfig::resolve(&file, &ConfigPairs::new())
                .unwrap_err()
                .field(),
            Some("trials")
        );
    }

    #[test]
    fn sweep_forms() {
        let r = parse_sweep("k:1:5:1").unwrap();
        assert_eq!(r.param, SweepParam::K);
        assert_eq!(r.values, vec![1.0, 2.0, 3.0, 4.0, 5.0]);
        let t = parse_sweep("tau:0:1:0.1").unwrap();
        assert_eq!(t.values.len(), 11);
        assert_eq!(parse_sweep("tau:0").unwrap().values, vec![0.0]);
        assert_eq!(parse_sweep("m:0,2,7").unwrap().values, vec![0.0, 2.0, 7.0]);
        assert!(parse_sweep("k:1.5").is_err());
        assert!(parse_sweep("q:1:2:1").is_err());
        assert!(parse_sweep("tau:0:1:0").is_err());
        assert!(parse_sweep("tau:1:0:0.1").is_err());
        assert!(parse_sweep("tau:0:1e300:1e-300").is_err());
        assert!(parse_sweep("tau:0:1").is_err());
        assert!(parse_sweep("tau:nan").is_err());
    }

    #[test]
    fn sweep_points_checked_against_invariants() {
        let mut file = minimal();
        file.insert("sweep".into(), "k:1:6:1".into());
        let err = RunConfig::resolve(&file, &ConfigPairs::new()).unwrap_err();
        assert_eq!(err.field(), Some("k"));

        file.insert("sweep".into(), "k:1,2;tau:0,0.5,1".into());
        let cfg = RunConfig::resolve(&file, &ConfigPairs::new()).unwrap();
        let pts = cfg.sweep_points().unwrap();
        assert_eq!(pts.len(), 6);
        assert_eq!((pts[0].k, pts[0].tau), (1, 0.0));
        assert_eq!((pts[5].k, pts[5].tau), (2, 1.0));
    }

    #[test]
    fn printed_config_round_trips() {
        let mut file = minimal();
        file.insert("sweep".into(), "tau:0:0.3:0.1;k:1,2".into());
        file.insert("out".into(), "run.csv".into());
        let cfg = RunConfig::resolve(&file, &ConfigPairs::new()).unwrap();
        let again = RunConfig::resolve(
            &parse_config_text(&cfg.to_config_text()).unwrap(),
            &ConfigPairs::new(),
        )
        .unwrap();
        assert_eq!(cfg, again);
    }

    proptest! {
        #[test]
        fn parsers_never_panic(text in "\\PC{0,200}") {
            let _ = parse_config_text(&text);
            let _ = parse_sweeps(&text);
        }

        #[test]
        fn parsers_never_panic_on_structured_noise(
            lines in proptest::collection::vec("(n|m|k|tau|sweep|seed|trials|workers)=[-0-9.:;,e ]{0,20}", 0..8)
        ) {
            let text = lines.join("\n");
            if let Ok(pairs) = parse_config_text(&text) {
                let _ = RunConfig::resolve(&pairs, &ConfigPairs::new());
            }
        }
    }
}
