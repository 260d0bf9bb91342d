//! Algorithm names and the policy factory shared by the CLI and the harness.

use std::fmt;
use std::str::FromStr;

use crate::agreeable::{agreeable_machine_bound, MediumFit};
use crate::config::AlgoConfig;
use crate::edf::{edf_machines_for_loose, PriorityPolicy};
use crate::engine::{DoublePolicy, OnlinePolicy, PolicyError, SplitPolicy};
use crate::general::GeneralPolicy;
use crate::laminar::LaminarPolicy;
use crate::model::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Base {
    Edf,
    Llf,
    MediumFit,
    Laminar,
    General,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algo {
    /// Semi-online: given the optimum up front.
    Semi(Base),
    /// Fully online through doubling.
    Double(Base),
}

impl Base {
    pub fn as_str(self) -> &'static str {
        match self {
            Base::Edf => "edf",
            Base::Llf => "llf",
            Base::MediumFit => "mediumfit",
            Base::Laminar => "laminar",
            Base::General => "general",
        }
    }
}

impl FromStr for Base {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "edf" => Ok(Base::Edf),
            "llf" => Ok(Base::Llf),
            "mediumfit" => Ok(Base::MediumFit),
            "laminar" => Ok(Base::Laminar),
            "general" => Ok(Base::General),
            _ => Err(format!("unknown algorithm `{s}` (edf, llf, mediumfit, laminar, general, double:<algo>)")),
        }
    }
}

impl FromStr for Algo {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.strip_prefix("double:") {
            Some(inner) => inner.parse().map(Algo::Double),
            None => s.parse().map(Algo::Semi),
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algo::Semi(b) => f.write_str(b.as_str()),
            Algo::Double(b) => write!(f, "double:{}", b.as_str()),
        }
    }
}

fn loose_edf(m: usize, cfg: &AlgoConfig) -> Result<PriorityPolicy, PolicyError> {
    let machines = match cfg.edf_machines_override {
        Some(n) => n,
        None => edf_machines_for_loose(m, cfg.alpha)?,
    };
    Ok(PriorityPolicy::edf(machines))
}

/// The semi-online policy for optimum `m`. Tight-job algorithms run behind a
/// splitter that sends α-loose jobs to EDF.
pub fn build_base(base: Base, m: usize, cfg: &AlgoConfig) -> Result<Box<dyn OnlinePolicy>, PolicyError> {
    let alpha = cfg.alpha;
    Ok(match base {
        Base::Edf => Box::new(loose_edf(m, cfg)?),
        Base::Llf => {
            let machines = match cfg.edf_machines_override {
                Some(n) => n,
                None => edf_machines_for_loose(m, alpha)?,
            };
            Box::new(PriorityPolicy::llf(machines))
        }
        Base::MediumFit => Box::new(SplitPolicy::new(alpha, loose_edf(m, cfg)?, MediumFit::new())?),
        Base::Laminar => {
            let m_prime = LaminarPolicy::machines_for(m, cfg)?;
            Box::new(SplitPolicy::new(alpha, loose_edf(m, cfg)?, LaminarPolicy::new(m_prime))?)
        }
        Base::General => Box::new(SplitPolicy::new(alpha, loose_edf(m, cfg)?, GeneralPolicy::from_config(m, cfg)?)?),
    })
}

/// Machines per unit of optimum that `base` is certified to stay within,
/// when that ratio is a constant.
pub fn default_rho(base: Base, cfg: &AlgoConfig) -> Option<usize> {
    let edf = edf_machines_for_loose(1, cfg.alpha).ok()?;
    match base {
        Base::Edf | Base::Llf => Some(edf),
        Base::MediumFit => Some(edf + agreeable_machine_bound(1, cfg.alpha, cfg.agreeable_beta).ok()?),
        Base::Laminar | Base::General => None,
    }
}

/// A policy for `algo`. `m` is the known optimum for semi-online runs and is
/// ignored by doubling runs.
pub fn build_policy(algo: Algo, m: usize, cfg: &AlgoConfig) -> Result<Box<dyn OnlinePolicy>, PolicyError> {
    match algo {
        Algo::Semi(base) => build_base(base, m, cfg),
        Algo::Double(base) => {
            let rho = cfg.double_rho.or_else(|| default_rho(base, cfg)).ok_or_else(|| {
                PolicyError::Param(format!("{} has no constant machine ratio; set double.rho", base.as_str()))
            })?;
            let cfg = cfg.clone();
            Ok(Box::new(DoublePolicy::new(rho, Box::new(move |m| build_base(base, m, &cfg)))))
        }
    }
}

/// `⌈m/(1−α)²⌉` at the config's α, or the override.
pub fn edf_machines(m: usize, cfg: &AlgoConfig) -> Result<usize, PolicyError> {
    match cfg.edf_machines_override {
        Some(n) => Ok(n),
        None => edf_machines_for_loose(m, cfg.alpha),
    }
}

pub fn alpha_of(algo: Algo, cfg: &AlgoConfig) -> Rational {
    match algo {
        Algo::Semi(Base::Laminar) | Algo::Double(Base::Laminar) => cfg.laminar_alpha(),
        Algo::Semi(Base::General) | Algo::Double(Base::General) => cfg.general_alpha(),
        _ => cfg.alpha,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in ["edf", "llf", "mediumfit", "laminar", "general", "double:edf", "double:laminar"] {
            let a: Algo = s.parse().unwrap();
            assert_eq!(a.to_string(), s);
        }
        assert!("double:double:edf".parse::<Algo>().is_err());
        assert!("fifo".parse::<Algo>().is_err());
    }

    #[test]
    fn rho_defaults() {
        let cfg = AlgoConfig::default();
        assert_eq!(default_rho(Base::Edf, &cfg), Some(4));
        assert_eq!(default_rho(Base::MediumFit, &cfg), Some(68));
        assert_eq!(default_rho(Base::Laminar, &cfg), None);
        assert!(build_policy(Algo::Double(Base::Laminar), 1, &cfg).is_err());
        let cfg = AlgoConfig { double_rho: Some(100), ..AlgoConfig::default() };
        assert!(build_policy(Algo::Double(Base::Laminar), 1, &cfg).is_ok());
    }

    #[test]
    fn semi_online_machine_counts() {
        let cfg = AlgoConfig::default();
        assert_eq!(build_policy(Algo::Semi(Base::Edf), 3, &cfg).unwrap().machines_opened(), 12);
        assert_eq!(build_policy(Algo::Semi(Base::Laminar), 1, &cfg).unwrap().machines_opened(), 4 + 32);
    }
}
