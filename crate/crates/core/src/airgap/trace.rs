use super::harmonics::HarmonicSet;
use crate::error::{Result, SimError};
use crate::linalg::DenseMatrix;
use crate::spline::{gauss_rule, SplineSpace1D, MAX_GAUSS_POINTS};
use rayon::prelude::*;
use std::f64::consts::PI;

fn check_interface_space(space: &SplineSpace1D) -> Result<()> {
    let (a, b) = space.domain();
    if !space.is_periodic() || a != 0.0 || (b - 2.0 * PI).abs() > 1e-14 {
        return Err(SimError::invalid(
            "interface space must be periodic with period 2π",
        ));
    }
    Ok(())
}

/// Gauss points per element used for trace integrals up to mode `k_max`.
pub fn trace_quadrature_points(space: &SplineSpace1D, k_max: usize) -> usize {
    let (a, b) = space.domain();
    let h = (b - a) / space.n_elements() as f64;
    let n = space.degree() + 1 + (k_max as f64 * h).ceil() as usize + 4;
    n.min(MAX_GAUSS_POINTS)
}

/// Raw trace integrals: `∫ N_j dθ` (zero mode), then `∫ cos k(θ+δ) N_j dθ` and
/// `∫ sin k(θ+δ) N_j dθ` per mode. Rows follow [`HarmonicSet::trace_row_offset`].
pub fn trace_integrals(space: &SplineSpace1D, harmonics: &HarmonicSet, delta: f64) -> Result<DenseMatrix> {
    check_interface_space(space)?;
    let p = space.degree();
    let rule = gauss_rule(trace_quadrature_points(space, harmonics.max_mode()))?;
    // (angle, weight, basis values, first global index) per quadrature point
    let mut samples: Vec<(f64, f64, Vec<f64>, usize)> = Vec::new();
    let mut vals = vec![0.0; p + 1];
    let mut ders = vec![0.0; p + 1];
    for e in 0..space.n_elements() {
        let (a, b) = space.element_bounds(e);
        for (x, w) in rule.mapped(a, b) {
            space.eval_on_element(e, x, &mut vals, &mut ders);
            samples.push((x, w, vals.clone(), e));
        }
    }
    let n = space.dimension();
    let rows: Vec<Vec<f64>> = {
        let mut kinds: Vec<(usize, bool)> = Vec::new();
        if harmonics.include_zero_mode() {
            kinds.push((0, false));
        }
        for &k in harmonics.modes() {
            kinds.push((k, false));
            kinds.push((k, true));
        }
        kinds
            .par_iter()
            .map(|&(k, sine)| {
                let mut row = vec![0.0; n];
                for (x, w, v, e) in &samples {
                    let arg = k as f64 * (x + delta);
                    let f = if k == 0 {
                        1.0
                    } else if sine {
                        arg.sin()
                    } else {
                        arg.cos()
                    };
                    for (a, va) in v.iter().enumerate() {
                        row[space.global_index(*e, a)] += w * f * va;
                    }
                }
                row
            })
            .collect()
    };
    Ok(DenseMatrix::from_rows(&rows))
}

/// Per-row Fourier prefactors: `1/(2π)` for the zero mode and `1/π` for `k >= 1`.
pub(crate) fn fourier_prefactors(harmonics: &HarmonicSet) -> Vec<f64> {
    let mut f = Vec::with_capacity(harmonics.n_trace_rows());
    if harmonics.include_zero_mode() {
        f.push(0.5 / PI);
    }
    f.extend(std::iter::repeat_n(1.0 / PI, 2 * harmonics.modes().len()));
    f
}

/// Rows mapping interface coefficients to the angular Fourier coefficients of the trace.
///
/// `radius` only identifies the interface; coefficients are taken with respect to the angle, so
/// a constant trace has zero-mode coefficient equal to that constant.
pub fn fourier_trace_rows(space: &SplineSpace1D, radius: f64, harmonics: &HarmonicSet) -> Result<DenseMatrix> {
    if !(radius > 0.0) {
        return Err(SimError::invalid(format!("interface radius must be positive, got {radius}")));
    }
    let mut t = trace_integrals(space, harmonics, 0.0)?;
    for (i, f) in fourier_prefactors(harmonics).into_iter().enumerate() {
        t.row_mut(i).iter_mut().for_each(|x| *x *= f);
    }
    Ok(t)
}

/// Applies the rotation of angle `kδ` to every cos/sin pair of rows (in place).
pub(crate) fn rotate_rows(m: &mut DenseMatrix, harmonics: &HarmonicSet, delta: f64) {
    for (i, &k) in harmonics.modes().iter().enumerate() {
        let o = harmonics.trace_row_offset(i);
        let (s, c) = (k as f64 * delta).sin_cos();
        let n = m.ncols();
        for j in 0..n {
            let (x, y) = (m.get(o, j), m.get(o + 1, j));
            m.set(o, j, c * x - s * y);
            m.set(o + 1, j, s * x + c * y);
        }
    }
}

/// Rotates Fourier data given in trace-row order (zero entry first if present, then cos/sin
/// pairs): each pair is multiplied by the rotation matrix of angle `kδ`.
pub fn rotate_fourier(values: &[f64], delta: f64, harmonics: &HarmonicSet) -> Result<Vec<f64>> {
    if values.len() != harmonics.n_trace_rows() {
        return Err(SimError::invalid(format!(
            "expected {} Fourier values, got {}",
            harmonics.n_trace_rows(),
            values.len()
        )));
    }
    let mut m = DenseMatrix::from_fn(values.len(), 1, |i, _| values[i]);
    rotate_rows(&mut m, harmonics, delta);
    Ok((0..values.len()).map(|i| m.get(i, 0)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spline::KnotVector;

    fn space(p: usize, n: usize) -> SplineSpace1D {
        SplineSpace1D::new(KnotVector::periodic_uniform(p, n, 0.0, 2.0 * PI).unwrap())
    }

    #[test]
    fn constant_trace() {
        let s = space(2, 96);
        let h = HarmonicSet::full(7);
        let rows = fourier_trace_rows(&s, 0.0443, &h).unwrap();
        let ones = vec![1.0; s.dimension()];
        let v = rows.mul_vec(&ones);
        assert!((v[0] - 1.0).abs() < 1e-14);
        assert!(v[1..].iter().all(|x| x.abs() < 1e-14));
    }

    #[test]
    fn rejects_open_space() {
        let s = SplineSpace1D::new(KnotVector::open_uniform(2, 8, 0.0, 2.0 * PI).unwrap());
        assert!(fourier_trace_rows(&s, 1.0, &HarmonicSet::full(1)).is_err());
    }

    #[test]
    fn rows_are_circulant() {
        let s = space(3, 24);
        let h = HarmonicSet::new(false, vec![4]).unwrap();
        let rows = fourier_trace_rows(&s, 1.0, &h).unwrap();
        // shifting by one element multiplies the mode-4 row pair by a rotation of 4h; with
        // 24 elements and k = 4 a shift of 6 elements is a full period
        for j in 0..24 {
            assert!((rows.get(0, j) - rows.get(0, (j + 6) % 24)).abs() < 1e-15);
            assert!((rows.get(1, j) - rows.get(1, (j + 6) % 24)).abs() < 1e-15);
        }
    }

    #[test]
    fn quarter_turn() {
        let h = HarmonicSet::new(false, vec![1]).unwrap();
        let r = rotate_fourier(&[1.0, 0.0], PI / 2.0, &h).unwrap();
        assert!(r[0].abs() < 1e-15 && (r[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn identity_rotations() {
        let h = HarmonicSet::new(true, vec![3]).unwrap();
        let v = [0.7, 1.5, -2.5];
        assert_eq!(rotate_fourier(&v, 0.0, &h).unwrap(), v.to_vec());
        let r = rotate_fourier(&v, 2.0 * PI / 3.0, &h).unwrap();
        for (a, b) in r.iter().zip(&v) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn shifted_integrals_match_rotated_rows() {
        let s = space(2, 30);
        let h = HarmonicSet::full(9);
        let delta = 0.4321;
        let direct = trace_integrals(&s, &h, delta).unwrap();
        let mut rotated = trace_integrals(&s, &h, 0.0).unwrap();
        rotate_rows(&mut rotated, &h, delta);
        assert!(direct.sub(&rotated).max_abs() < 1e-14);
    }
}
