//! Tunable constants and the flat `key = value` config format.

use crate::model::Rational;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("bad value for `{key}`: {value:?}")]
    BadValue { key: String, value: String },
}

/// Every tunable constant of the online algorithms. Defaults are the
/// proof-derived values; overrides replace the derived numbers outright.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgoConfig {
    /// Loose/tight threshold used by the stream splitter and by EDF sizing.
    pub alpha: Rational,
    /// β for the MediumFit concurrency ceiling.
    pub agreeable_beta: Rational,
    pub laminar_alpha: Option<Rational>,
    pub laminar_m_prime_override: Option<usize>,
    pub laminar_m_prime_multiplier: Rational,
    pub general_alpha: Option<Rational>,
    pub general_delta: Rational,
    pub general_q_override: Option<usize>,
    pub general_tau_override: Option<usize>,
    pub general_g_override: Option<usize>,
    /// Exact EDF/LLF machine count, bypassing `⌈m/(1−α)²⌉`.
    pub edf_machines_override: Option<usize>,
    pub double_rho: Option<usize>,
}

impl Default for AlgoConfig {
    fn default() -> Self {
        Self {
            alpha: Rational::new(1, 2),
            agreeable_beta: Rational::new(1, 4),
            laminar_alpha: None,
            laminar_m_prime_override: None,
            laminar_m_prime_multiplier: Rational::from_integer(1),
            general_alpha: None,
            general_delta: Rational::new(1, 4),
            general_q_override: None,
            general_tau_override: None,
            general_g_override: None,
            edf_machines_override: None,
            double_rho: None,
        }
    }
}

pub const KEYS: &[&str] = &[
    "alpha",
    "agreeable.beta",
    "laminar.alpha",
    "laminar.m_prime_override",
    "laminar.m_prime_multiplier",
    "general.alpha",
    "general.delta",
    "general.q_override",
    "general.tau_override",
    "general.g_override",
    "edf.machines_override",
    "double.rho",
];

/// Parses `a/b` or an integer.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let (n, d): (i64, i64) = (n.trim().parse().ok()?, d.trim().parse().ok()?);
            (d != 0).then(|| Rational::new(n, d))
        }
        None => s.parse().ok().map(Rational::from_integer),
    }
}

/// Splits config text into `(line, key, value)` triples, dropping comments
/// and blank lines.
pub fn parse_pairs(src: &str) -> Result<Vec<(usize, String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (i, raw) in src.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
        let k = k.trim();
        if k.is_empty() {
            return Err(ConfigError::Syntax { line: i + 1 });
        }
        out.push((i + 1, k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

impl AlgoConfig {
    pub fn laminar_alpha(&self) -> Rational {
        self.laminar_alpha.unwrap_or(self.alpha)
    }

    pub fn general_alpha(&self) -> Rational {
        self.general_alpha.unwrap_or(self.alpha)
    }

    /// Applies one key. Returns `Ok(false)` for keys this struct does not own.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<bool, ConfigError> {
        let bad = || ConfigError::BadValue { key: key.to_string(), value: value.to_string() };
        let rat = || parse_rational(value).ok_or_else(bad);
        let count = || -> Result<Option<usize>, ConfigError> {
            match value {
                "" | "none" | "auto" => Ok(None),
                v => v.parse().map(Some).map_err(|_| bad()),
            }
        };
        match key {
            "alpha" => self.alpha = rat()?,
            "agreeable.beta" => self.agreeable_beta = rat()?,
            "laminar.alpha" => self.laminar_alpha = Some(rat()?),
            "laminar.m_prime_override" => self.laminar_m_prime_override = count()?,
            "laminar.m_prime_multiplier" => self.laminar_m_prime_multiplier = rat()?,
            "general.alpha" => self.general_alpha = Some(rat()?),
            "general.delta" => self.general_delta = rat()?,
            "general.q_override" => self.general_q_override = count()?,
            "general.tau_override" => self.general_tau_override = count()?,
            "general.g_override" => self.general_g_override = count()?,
            "edf.machines_override" => self.edf_machines_override = count()?,
            "double.rho" => self.double_rho = count()?,
            _ => return Ok(false),
        }
        Ok(true)
    }

    pub fn parse(src: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        for (_, k, v) in parse_pairs(src)? {
            if !cfg.apply(&k, &v)? {
                return Err(ConfigError::UnknownKey(k));
            }
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_comments() {
        let cfg = AlgoConfig::parse("# sweep\nalpha = 1/3\ngeneral.delta=1/5 # tail\nlaminar.m_prime_override = 12\n").unwrap();
        assert_eq!(cfg.alpha, Rational::new(1, 3));
        assert_eq!(cfg.general_delta, Rational::new(1, 5));
        assert_eq!(cfg.laminar_m_prime_override, Some(12));
        assert_eq!(cfg.laminar_alpha(), Rational::new(1, 3));
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        assert_eq!(AlgoConfig::parse("nope = 1"), Err(ConfigError::UnknownKey("nope".into())));
        assert_eq!(AlgoConfig::parse("alpha"), Err(ConfigError::Syntax { line: 1 }));
        assert!(matches!(AlgoConfig::parse("alpha = x/2"), Err(ConfigError::BadValue { .. })));
        assert!(matches!(AlgoConfig::parse("alpha = 1/0"), Err(ConfigError::BadValue { .. })));
    }

    #[test]
    fn every_documented_key_is_accepted() {
        for key in KEYS {
            let mut cfg = AlgoConfig::default();
            assert!(cfg.apply(key, "1").unwrap(), "{key}");
        }
    }
}
