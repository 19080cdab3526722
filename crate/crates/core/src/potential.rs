//! Single-site interaction potentials and the effective diagonal potential.

use std::fmt;
use std::sync::Arc;

use crate::registry::Registry;

/// Interaction part of the on-site potential, a function of the quadrature `q`.
pub trait Interaction: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;
    fn value(&self, q: f64) -> f64;
}

/// `(lambda / 4!) q^4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Phi4 {
    pub coupling: f64,
}

impl Interaction for Phi4 {
    fn name(&self) -> &'static str {
        "phi4"
    }

    fn value(&self, q: f64) -> f64 {
        self.coupling / 24.0 * q.powi(4)
    }
}

/// Tilted double-well benchmark `-(1 + eps/4)/2 q^3 + q^4/8`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicQuartic {
    pub epsilon: f64,
}

impl Interaction for CubicQuartic {
    fn name(&self) -> &'static str {
        "cubic-quartic"
    }

    fn value(&self, q: f64) -> f64 {
        -(1.0 + self.epsilon / 4.0) / 2.0 * q.powi(3) + q.powi(4) / 8.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Free;

impl Interaction for Free {
    fn name(&self) -> &'static str {
        "free"
    }

    fn value(&self, _q: f64) -> f64 {
        0.0
    }
}

/// Parameters shared by every registered interaction; each one reads what it needs.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct InteractionParams {
    pub coupling: f64,
    pub epsilon: f64,
}

pub type InteractionCtor = fn(&InteractionParams) -> Arc<dyn Interaction>;

pub fn interactions() -> Registry<InteractionCtor> {
    Registry::<InteractionCtor>::new("interaction")
        .register("phi4", |p| Arc::new(Phi4 { coupling: p.coupling }))
        .register("cubic-quartic", |p| Arc::new(CubicQuartic { epsilon: p.epsilon }))
        .register("free", |_| Arc::new(Free))
}

/// Diagonal potential seen by one site within a Trotter step: the interaction
/// plus the `q^2 / a^2` remnant of the gradient term.
#[derive(Debug, Clone)]
pub struct EffectivePotential {
    inv_spacing_sqr: f64,
    interaction: Arc<dyn Interaction>,
}

impl EffectivePotential {
    pub fn new(spacing: f64, interaction: Arc<dyn Interaction>) -> Self {
        Self {
            inv_spacing_sqr: 1.0 / (spacing * spacing),
            interaction,
        }
    }

    pub fn value(&self, q: f64) -> f64 {
        q * q * self.inv_spacing_sqr + self.interaction.value(q)
    }

    pub fn interaction(&self) -> &Arc<dyn Interaction> {
        &self.interaction
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_builds_each_family() {
        let reg = interactions();
        let p = InteractionParams { coupling: 0.2, epsilon: 0.1 };
        assert_eq!(reg.names(), vec!["phi4", "cubic-quartic", "free"]);
        for name in reg.names() {
            assert_eq!(reg.get(name).unwrap()(&p).name(), name);
        }
        assert!(reg.get("sextic").is_err());
    }

    #[test]
    fn values() {
        assert!((Phi4 { coupling: 0.2 }.value(2.0) - 0.2 / 24.0 * 16.0).abs() < 1e-15);
        let cq = CubicQuartic { epsilon: 0.1 };
        assert!((cq.value(2.0) - (-1.025 / 2.0 * 8.0 + 2.0)).abs() < 1e-14);
        assert_eq!(Free.value(3.0), 0.0);
        let eff = EffectivePotential::new(0.5, Arc::new(Phi4 { coupling: 0.0 }));
        assert!((eff.value(1.5) - 9.0).abs() < 1e-14);
    }
}
