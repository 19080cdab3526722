use std::f64::consts::PI;

/// Normal-mode frequencies and momenta of the free periodic chain.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionTable {
    /// `sqrt(omega^2 + 4 sin^2(pi a / N) / a^2)` for mode index `0..N`.
    pub omegas: Vec<f64>,
    /// `2 pi alpha / (a N)`, unsigned.
    pub momenta: Vec<f64>,
}

pub fn dispersion(n_sites: usize, spacing: f64, omega: f64) -> DispersionTable {
    let n = n_sites as f64;
    let omegas = (0..n_sites)
        .map(|alpha| {
            let s = (PI * alpha as f64 / n).sin();
            (omega * omega + 4.0 * s * s / (spacing * spacing)).sqrt()
        })
        .collect();
    let momenta = (0..n_sites).map(|alpha| 2.0 * PI * alpha as f64 / (spacing * n)).collect();
    DispersionTable { omegas, momenta }
}

/// Momentum of mode `alpha` folded into `(-pi/a, pi/a]`.
pub fn signed_momentum(alpha: usize, n_sites: usize, spacing: f64) -> f64 {
    let a = alpha % n_sites;
    let signed = if 2 * a > n_sites { a as f64 - n_sites as f64 } else { a as f64 };
    2.0 * PI * signed / (spacing * n_sites as f64)
}
