use crate::error::{invalid, Result};

/// Uniform discretization of one qumode's quadrature axis.
///
/// Points are `q_j = j * spacing - extent / 2` for `j in 0..m_points`, so the
/// grid starts at `-extent/2` and stops one spacing short of `+extent/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    extent: f64,
    spacing: f64,
    points: Vec<f64>,
}

impl QuadratureGrid {
    pub fn new(m_points: usize, extent: f64) -> Result<Self> {
        if m_points < 2 {
            return Err(invalid(format!("grid needs at least 2 points, got {m_points}")));
        }
        if !(extent.is_finite() && extent > 0.0) {
            return Err(invalid(format!("grid extent must be positive, got {extent}")));
        }
        let spacing = extent / m_points as f64;
        let half = extent / 2.0;
        let points = (0..m_points).map(|j| j as f64 * spacing - half).collect();
        Ok(Self {
            extent,
            spacing,
            points,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Angular wavenumbers conjugate to the grid in FFT order; the Nyquist
    /// bin carries `-pi / spacing`.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let m = self.len();
        let scale = 2.0 * std::f64::consts::PI / (m as f64 * self.spacing);
        (0..m)
            .map(|i| {
                let signed = if i < m.div_ceil(2) { i as isize } else { i as isize - m as isize };
                signed as f64 * scale
            })
            .collect()
    }

    /// Quadrature-rule integral `spacing * sum(values)`.
    pub fn integrate(&self, values: impl IntoIterator<Item = f64>) -> f64 {
        self.spacing * values.into_iter().sum::<f64>()
    }

    pub fn same_as(&self, other: &QuadratureGrid) -> bool {
        self.len() == other.len() && self.extent == other.extent
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_resolution() {
        let g = QuadratureGrid::new(200, 20.0).unwrap();
        assert!((g.spacing() - 0.1).abs() < 1e-15);
        assert_eq!(g.points()[0], -10.0);
        assert!((g.points()[199] - 9.9).abs() < 1e-12);
    }

    #[test]
    fn two_points() {
        let g = QuadratureGrid::new(2, 2.0).unwrap();
        assert_eq!(g.points(), &[-1.0, 0.0]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(QuadratureGrid::new(1, 1.0).is_err());
        assert!(QuadratureGrid::new(10, 0.0).is_err());
        assert!(QuadratureGrid::new(10, -3.0).is_err());
        assert!(QuadratureGrid::new(10, f64::NAN).is_err());
    }

    #[test]
    fn uniform_and_increasing() {
        let g = QuadratureGrid::new(137, 13.7).unwrap();
        for w in g.points().windows(2) {
            assert!(w[1] > w[0]);
            assert!((w[1] - w[0] - g.spacing()).abs() < 1e-13);
        }
        assert!((g.points()[136] - (13.7 / 2.0 - g.spacing())).abs() < 1e-12);
    }

    #[test]
    fn wavenumbers_fft_order() {
        let g = QuadratureGrid::new(4, 4.0).unwrap();
        let k = g.wavenumbers();
        let unit = 2.0 * std::f64::consts::PI / 4.0;
        assert_eq!(k, vec![0.0, unit, -2.0 * unit, -unit]);
    }
}
