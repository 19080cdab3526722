use std::f64::consts::{FRAC_PI_4, PI};

const SERIES_LIMIT: f64 = 12.0;

/// Bessel function of the first kind, order zero.
///
/// Power series up to `|x| = 12`, Hankel asymptotic expansion beyond.
pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    if x <= SERIES_LIMIT {
        series(x)
    } else {
        asymptotic(x)
    }
}

fn series(x: f64) -> f64 {
    let y = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        term *= y / (kf * kf);
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) && kf > x {
            break;
        }
    }
    sum
}

fn asymptotic(x: f64) -> f64 {
    // a_k = prod_{j=1..k} (2j-1)^2 / (k! 8^k)
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        a *= (2.0 * kf - 1.0).powi(2) / (8.0 * kf * x);
        if a > last {
            break;
        }
        last = a;
        // even k feed P with alternating sign, odd k feed Q
        match k % 4 {
            1 => q -= a,
            2 => p -= a,
            3 => q += a,
            _ => p += a,
        }
    }
    let phase = x - FRAC_PI_4;
    (2.0 / (PI * x)).sqrt() * (p * phase.cos() - q * phase.sin())
}

/// Free retarded propagator in one space dimension,
/// `1/2 Theta(t) Theta(t^2 - x^2) J0(m sqrt(t^2 - x^2))`.
pub fn retarded_propagator(mass: f64, x: f64, t: f64) -> f64 {
    let tau2 = t * t - x * x;
    if t <= 0.0 || tau2 < 0.0 {
        0.0
    } else {
        0.5 * bessel_j0(mass * tau2.sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        let table = [
            (0.0, 1.0),
            (1.0, 0.765_197_686_557_966_6),
            (2.404_825_557_695_773, 0.0),
            (5.0, -0.177_596_771_314_338_3),
            (10.0, -0.245_935_764_451_348_3),
            (15.0, -0.014_224_472_826_780_773),
            (20.0, 0.167_024_664_340_583_1),
            (50.0, 0.055_812_327_669_251_82),
        ];
        for (x, want) in table {
            assert!((bessel_j0(x) - want).abs() < 1e-10, "J0({x}) = {} vs {want}", bessel_j0(x));
        }
    }

    #[test]
    fn branches_agree_at_the_switch() {
        for x in [12.0, 12.5, 13.0] {
            assert!((series(x) - asymptotic(x)).abs() < 1e-10, "{x}");
        }
    }

    #[test]
    fn even() {
        assert_eq!(bessel_j0(-3.3), bessel_j0(3.3));
    }

    #[test]
    fn propagator_light_cone() {
        assert_eq!(retarded_propagator(1.0, 2.0, 1.5), 0.0);
        assert_eq!(retarded_propagator(1.0, 0.0, -1.0), 0.0);
        assert!((retarded_propagator(1.0, 0.0, 1e-9) - 0.5).abs() < 1e-12);
        assert!((retarded_propagator(1.0, 0.0, 1.0) - 0.382_598_843_278_983_3).abs() < 1e-10);
    }
}
