use super::harmonics::AirGapCoefficients;
use super::MU0;
use crate::error::{Result, SimError};
use std::f64::consts::PI;

fn check_in_gap(c: &AirGapCoefficients, r: f64) -> Result<()> {
    let tol = 1e-12 * c.r2;
    if !(r >= c.r1 - tol && r <= c.r2 + tol) {
        return Err(SimError::OutOfDomain {
            x: r,
            lo: c.r1,
            hi: c.r2,
        });
    }
    Ok(())
}

/// Flux density `(B_r, B_φ)` of the gap series at `(r, φ)`: `B_r = (1/r) ∂_φ A`, `B_φ = -∂_r A`.
pub fn bfield_at(coeffs: &AirGapCoefficients, r: f64, theta: f64) -> Result<(f64, f64)> {
    check_in_gap(coeffs, r)?;
    let ln_rho = (r / coeffs.reference_radius).ln();
    let mut br = 0.0;
    let mut bphi = -coeffs.alpha0_prime;
    for m in &coeffs.modes {
        let k = m.k as f64;
        let up = (k * ln_rho).exp();
        let down = (-k * ln_rho).exp();
        let (s, c) = (k * theta).sin_cos();
        let a_sum = m.alpha * up + m.alpha_prime * down;
        let b_sum = m.beta * up + m.beta_prime * down;
        let a_diff = m.alpha * up - m.alpha_prime * down;
        let b_diff = m.beta * up - m.beta_prime * down;
        br += k * (b_sum * c - a_sum * s);
        bphi -= k * (a_diff * c + b_diff * s);
    }
    Ok((br / r, bphi / r))
}

/// `T = (2πL/μ0) Σ_k k² (α_k' β_k - α_k β_k')`.
pub fn torque_closed_form(coeffs: &AirGapCoefficients, length: f64) -> f64 {
    let s: f64 = coeffs
        .modes
        .iter()
        .map(|m| {
            let k = m.k as f64;
            k * k * (m.alpha_prime * m.beta - m.alpha * m.beta_prime)
        })
        .sum();
    2.0 * PI * length / MU0 * s
}

/// Maxwell-stress torque `(r² L/μ0) ∫ B_r B_φ dφ` by the trapezoid rule with `n_quad` points.
pub fn torque_maxwell_numeric(coeffs: &AirGapCoefficients, r: f64, length: f64, n_quad: usize) -> Result<f64> {
    let k_max = coeffs.modes.iter().map(|m| m.k).max().unwrap_or(0);
    let needed = 4 * k_max.max(1);
    if n_quad < needed {
        return Err(SimError::invalid(format!(
            "torque quadrature needs at least {needed} points, got {n_quad}"
        )));
    }
    check_in_gap(coeffs, r)?;
    let h = 2.0 * PI / n_quad as f64;
    let mut s = 0.0;
    for i in 0..n_quad {
        let (br, bphi) = bfield_at(coeffs, r, i as f64 * h)?;
        s += br * bphi;
    }
    Ok(r * r * length / MU0 * s * h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::airgap::HarmonicSet;

    fn coeffs(h: &HarmonicSet) -> AirGapCoefficients {
        AirGapCoefficients::zeros(h, 0.5, 2.0)
    }

    #[test]
    fn logarithmic_term() {
        let h = HarmonicSet::full(2);
        let mut c = coeffs(&h);
        c.alpha0_prime = 1.0;
        for &(r, t) in &[(0.5, 0.0), (1.0, 2.0), (1.7, -0.3)] {
            let (br, bp) = bfield_at(&c, r, t).unwrap();
            assert_eq!(br, 0.0);
            assert!((bp + 1.0 / r).abs() < 1e-15);
        }
    }

    #[test]
    fn linear_term() {
        let h = HarmonicSet::full(2);
        let mut c = coeffs(&h);
        c.mode_mut(1).unwrap().alpha = 1.0;
        for &(r, t) in &[(0.5, 0.3), (1.0, 2.0), (2.0, -1.3)] {
            let (br, bp) = bfield_at(&c, r, t).unwrap();
            assert!((br + t.sin()).abs() < 1e-14);
            assert!((bp + t.cos()).abs() < 1e-14);
        }
    }

    #[test]
    fn outside_gap_rejected() {
        let c = coeffs(&HarmonicSet::full(1));
        assert!(bfield_at(&c, 0.4, 0.0).is_err());
        assert!(bfield_at(&c, 2.1, 0.0).is_err());
        assert!(torque_maxwell_numeric(&c, 3.0, 1.0, 8).is_err());
    }

    #[test]
    fn closed_form_unit_case() {
        let mut c = coeffs(&HarmonicSet::full(1));
        let m = c.mode_mut(1).unwrap();
        m.alpha_prime = 1.0;
        m.beta = 1.0;
        let t = torque_closed_form(&c, 1.0);
        assert!((t - 2.0 * PI / MU0).abs() < 1e-6);
        assert!((t - 5.0e6).abs() < 0.01e6);
        assert_eq!(torque_closed_form(&coeffs(&HarmonicSet::full(3)), 1.0), 0.0);
    }

    #[test]
    fn pure_cosine_has_no_torque() {
        let mut c = coeffs(&HarmonicSet::new(false, vec![3]).unwrap());
        let m = c.mode_mut(3).unwrap();
        m.alpha = 0.4;
        m.alpha_prime = -1.2;
        assert_eq!(torque_closed_form(&c, 1.0), 0.0);
        assert!(torque_maxwell_numeric(&c, 1.0, 1.0, 12).unwrap().abs() < 1e-6);
    }

    #[test]
    fn quadrature_bound() {
        let c = coeffs(&HarmonicSet::new(false, vec![3, 5]).unwrap());
        assert!(torque_maxwell_numeric(&c, 1.0, 1.0, 19).is_err());
        assert!(torque_maxwell_numeric(&c, 1.0, 1.0, 20).is_ok());
    }
}
