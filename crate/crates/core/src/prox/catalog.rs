//! Name-keyed registry of the shipped [`ProxFn`] and [`SmoothFn`]
//! implementations, used to assemble problems from configuration.

use std::sync::Arc;

use ndarray::ArrayD;

use super::{
    HalfSquaredDistance, L1Ball, L1Norm, LinfNorm, Logistic, MagnitudeBall, NuclearNorm, ProxFn,
    PsdNuclearNorm, SmoothFn, SquaredDistance, ZeroProx,
};
use crate::{Error, Result};

type ProxFactory = fn(f64) -> Result<Arc<dyn ProxFn>>;
type SmoothFactory = fn(ArrayD<f64>) -> Result<Arc<dyn SmoothFn>>;

pub struct ProxEntry {
    pub name: &'static str,
    pub summary: &'static str,
    build: ProxFactory,
}

pub struct SmoothEntry {
    pub name: &'static str,
    pub summary: &'static str,
    build: SmoothFactory,
}

static PROX: &[ProxEntry] = &[
    ProxEntry {
        name: "zero",
        summary: "g = 0 (weight ignored)",
        build: |_| Ok(Arc::new(ZeroProx)),
    },
    ProxEntry {
        name: "l1",
        summary: "weight * ||x||_1",
        build: |w| Ok(Arc::new(L1Norm::new(w)?)),
    },
    ProxEntry {
        name: "l1-ball",
        summary: "indicator of ||x||_1 <= weight",
        build: |w| Ok(Arc::new(L1Ball::new(w)?)),
    },
    ProxEntry {
        name: "linf",
        summary: "weight * ||x||_inf",
        build: |w| Ok(Arc::new(LinfNorm::new(w)?)),
    },
    ProxEntry {
        name: "nuclear",
        summary: "weight * nuclear norm (matrix points)",
        build: |w| Ok(Arc::new(NuclearNorm::new(w)?)),
    },
    ProxEntry {
        name: "psd-nuclear",
        summary: "weight * nuclear norm on the PSD cone (square matrix points)",
        build: |w| Ok(Arc::new(PsdNuclearNorm::new(w)?)),
    },
    ProxEntry {
        name: "magnitude-ball",
        summary: "per-pixel component norm <= weight (fields with a component axis)",
        build: |w| Ok(Arc::new(MagnitudeBall::new(w)?)),
    },
];

static SMOOTH: &[SmoothEntry] = &[
    SmoothEntry {
        name: "least-squares",
        summary: "0.5 * ||z - b||^2",
        build: |b| Ok(Arc::new(HalfSquaredDistance::new(b))),
    },
    SmoothEntry {
        name: "squared-distance",
        summary: "||z - b||^2",
        build: |b| Ok(Arc::new(SquaredDistance::new(b))),
    },
    SmoothEntry {
        name: "logistic",
        summary: "sum log(exp(z_i) + 1) - b_i z_i, b binary",
        build: |b| Ok(Arc::new(Logistic::new(b)?)),
    },
];

pub fn prox_entries() -> &'static [ProxEntry] {
    PROX
}

pub fn smooth_entries() -> &'static [SmoothEntry] {
    SMOOTH
}

pub fn prox_names() -> Vec<&'static str> {
    PROX.iter().map(|e| e.name).collect()
}

pub fn smooth_names() -> Vec<&'static str> {
    SMOOTH.iter().map(|e| e.name).collect()
}

pub fn prox_by_name(name: &str, weight: f64) -> Result<Arc<dyn ProxFn>> {
    let entry = PROX.iter().find(|e| e.name == name).ok_or_else(|| {
        Error::Configuration(format!(
            "unknown prox {name:?}; choose one of {}",
            prox_names().join(", ")
        ))
    })?;
    (entry.build)(weight)
}

pub fn smooth_by_name(name: &str, data: ArrayD<f64>) -> Result<Arc<dyn SmoothFn>> {
    let entry = SMOOTH.iter().find(|e| e.name == name).ok_or_else(|| {
        Error::Configuration(format!(
            "unknown smooth term {name:?}; choose one of {}",
            smooth_names().join(", ")
        ))
    })?;
    (entry.build)(data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_registered_name_resolves() {
        for name in prox_names() {
            assert_eq!(prox_by_name(name, 0.5).unwrap().name(), name);
        }
        for name in smooth_names() {
            let f = smooth_by_name(name, ArrayD::zeros(vec![3])).unwrap();
            assert_eq!(f.name(), name);
        }
    }

    #[test]
    fn unknown_names_list_the_choices() {
        let err = prox_by_name("group-lasso", 1.0).unwrap_err().to_string();
        assert!(err.contains("l1-ball"), "{err}");
        assert!(smooth_by_name("huber", ArrayD::zeros(vec![1])).is_err());
    }
}
