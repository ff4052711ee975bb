use crate::error::{Result, SimError};
use serde::{Deserialize, Serialize};

/// Angular harmonics kept in the truncated gap series.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HarmonicSet {
    include_zero_mode: bool,
    modes: Vec<usize>,
}

impl HarmonicSet {
    pub fn new(include_zero_mode: bool, modes: Vec<usize>) -> Result<Self> {
        if modes.first() == Some(&0) {
            return Err(SimError::invalid(
                "mode 0 is controlled by include_zero_mode, not the mode list",
            ));
        }
        if modes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(SimError::invalid("modes must be strictly increasing"));
        }
        if !include_zero_mode && modes.is_empty() {
            return Err(SimError::invalid("harmonic set is empty"));
        }
        Ok(Self {
            include_zero_mode,
            modes,
        })
    }

    /// Like [`HarmonicSet::new`] but rejects more than `truncation` nonzero modes.
    pub fn with_truncation(include_zero_mode: bool, modes: Vec<usize>, truncation: usize) -> Result<Self> {
        if modes.len() > truncation {
            return Err(SimError::invalid(format!(
                "{} modes exceed the truncation {truncation}",
                modes.len()
            )));
        }
        Self::new(include_zero_mode, modes)
    }

    /// Zero mode plus `1..=k_max`.
    pub fn full(k_max: usize) -> Self {
        Self {
            include_zero_mode: true,
            modes: (1..=k_max).collect(),
        }
    }

    /// The first `count` odd multiples of `p`: `p, 3p, 5p, ...` (no zero mode).
    pub fn odd_multiples(p: usize, count: usize) -> Result<Self> {
        if p == 0 {
            return Err(SimError::invalid("pole pair count must be positive"));
        }
        Self::new(false, (0..count).map(|j| p * (2 * j + 1)).collect())
    }

    pub fn include_zero_mode(&self) -> bool {
        self.include_zero_mode
    }

    pub fn modes(&self) -> &[usize] {
        &self.modes
    }

    pub fn max_mode(&self) -> usize {
        self.modes.last().copied().unwrap_or(0)
    }

    fn zero_len(&self) -> usize {
        if self.include_zero_mode {
            2
        } else {
            0
        }
    }

    /// Number of gap coefficients, `2 + 4·|modes|` with the zero mode and `4·|modes|` without.
    pub fn n_coefficients(&self) -> usize {
        self.zero_len() + 4 * self.modes.len()
    }

    /// Number of Fourier trace rows for one interface (zero row, then cos/sin per mode).
    pub fn n_trace_rows(&self) -> usize {
        self.zero_len() / 2 + 2 * self.modes.len()
    }

    /// Offset of the four coefficients of the `i`-th listed mode.
    pub fn mode_offset(&self, i: usize) -> usize {
        self.zero_len() + 4 * i
    }

    /// Offset of the cos/sin trace rows of the `i`-th listed mode.
    pub fn trace_row_offset(&self, i: usize) -> usize {
        self.zero_len() / 2 + 2 * i
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeCoefficients {
    pub k: usize,
    pub alpha: f64,
    pub alpha_prime: f64,
    pub beta: f64,
    pub beta_prime: f64,
}

/// Coefficients of the gap series for the gap `r1 <= r <= r2`, written relative to
/// `reference_radius`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AirGapCoefficients {
    pub r1: f64,
    pub r2: f64,
    pub reference_radius: f64,
    pub include_zero_mode: bool,
    pub alpha0: f64,
    pub alpha0_prime: f64,
    pub modes: Vec<ModeCoefficients>,
}

impl AirGapCoefficients {
    /// All-zero physical coefficients (reference radius 1).
    pub fn zeros(harmonics: &HarmonicSet, r1: f64, r2: f64) -> Self {
        Self {
            r1,
            r2,
            reference_radius: 1.0,
            include_zero_mode: harmonics.include_zero_mode,
            alpha0: 0.0,
            alpha0_prime: 0.0,
            modes: harmonics
                .modes
                .iter()
                .map(|&k| ModeCoefficients {
                    k,
                    alpha: 0.0,
                    alpha_prime: 0.0,
                    beta: 0.0,
                    beta_prime: 0.0,
                })
                .collect(),
        }
    }

    /// Reads coefficients in the gap-unknown ordering `(α0, α0')`, then `(α_k, α_k', β_k, β_k')`.
    pub fn from_slice(
        harmonics: &HarmonicSet,
        values: &[f64],
        r1: f64,
        r2: f64,
        reference_radius: f64,
    ) -> Result<Self> {
        if values.len() != harmonics.n_coefficients() {
            return Err(SimError::invalid(format!(
                "expected {} gap coefficients, got {}",
                harmonics.n_coefficients(),
                values.len()
            )));
        }
        let mut c = Self::zeros(harmonics, r1, r2);
        c.reference_radius = reference_radius;
        if harmonics.include_zero_mode {
            c.alpha0 = values[0];
            c.alpha0_prime = values[1];
        }
        for (i, m) in c.modes.iter_mut().enumerate() {
            let o = harmonics.mode_offset(i);
            m.alpha = values[o];
            m.alpha_prime = values[o + 1];
            m.beta = values[o + 2];
            m.beta_prime = values[o + 3];
        }
        Ok(c)
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.len());
        if self.include_zero_mode {
            v.push(self.alpha0);
            v.push(self.alpha0_prime);
        }
        for m in &self.modes {
            v.extend_from_slice(&[m.alpha, m.alpha_prime, m.beta, m.beta_prime]);
        }
        v
    }

    pub fn len(&self) -> usize {
        let zero = if self.include_zero_mode { 2 } else { 0 };
        zero + 4 * self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn mode(&self, k: usize) -> Option<&ModeCoefficients> {
        self.modes.iter().find(|m| m.k == k)
    }

    pub fn mode_mut(&mut self, k: usize) -> Option<&mut ModeCoefficients> {
        self.modes.iter_mut().find(|m| m.k == k)
    }

    /// The same field written relative to another reference radius.
    pub fn with_reference_radius(&self, reference_radius: f64) -> Self {
        let ln_c = (reference_radius / self.reference_radius).ln();
        let mut out = self.clone();
        out.reference_radius = reference_radius;
        out.alpha0 = self.alpha0 + self.alpha0_prime * ln_c;
        for m in &mut out.modes {
            let up = (m.k as f64 * ln_c).exp();
            let down = (-(m.k as f64) * ln_c).exp();
            m.alpha *= up;
            m.beta *= up;
            m.alpha_prime *= down;
            m.beta_prime *= down;
        }
        out
    }

    /// Physical coefficients (reference radius 1).
    pub fn physical(&self) -> Self {
        self.with_reference_radius(1.0)
    }

    /// Vector potential `A_z(r, φ)` of the series.
    pub fn potential(&self, r: f64, phi: f64) -> f64 {
        let ln_rho = (r / self.reference_radius).ln();
        let mut a = self.alpha0 + self.alpha0_prime * ln_rho;
        for m in &self.modes {
            let k = m.k as f64;
            let up = (k * ln_rho).exp();
            let down = (-k * ln_rho).exp();
            let (s, c) = (k * phi).sin_cos();
            a += (m.alpha * up + m.alpha_prime * down) * c + (m.beta * up + m.beta_prime * down) * s;
        }
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odd_multiples_of_three_give_140_unknowns() {
        let h = HarmonicSet::odd_multiples(3, 35).unwrap();
        assert_eq!(h.modes()[0], 3);
        assert_eq!(h.modes()[1], 9);
        assert_eq!(h.max_mode(), 207);
        assert_eq!(h.n_coefficients(), 140);
        assert_eq!(h.n_trace_rows(), 70);
    }

    #[test]
    fn zero_mode_adds_two() {
        let h = HarmonicSet::full(12);
        assert_eq!(h.n_coefficients(), 2 + 48);
        assert_eq!(h.mode_offset(0), 2);
        assert_eq!(h.trace_row_offset(0), 1);
    }

    #[test]
    fn rejects_bad_mode_lists() {
        assert!(HarmonicSet::new(false, vec![3, 3]).is_err());
        assert!(HarmonicSet::new(false, vec![5, 3]).is_err());
        assert!(HarmonicSet::new(true, vec![0, 1]).is_err());
        assert!(HarmonicSet::new(false, vec![]).is_err());
        assert!(HarmonicSet::with_truncation(false, vec![1, 2, 3], 2).is_err());
    }

    #[test]
    fn vector_roundtrip() {
        let h = HarmonicSet::new(true, vec![2, 5]).unwrap();
        let v: Vec<f64> = (0..h.n_coefficients()).map(|i| i as f64 + 0.5).collect();
        let c = AirGapCoefficients::from_slice(&h, &v, 1.0, 2.0, 1.0).unwrap();
        assert_eq!(c.to_vec(), v);
        assert_eq!(c.mode(5).unwrap().beta_prime, 9.5);
        assert!(AirGapCoefficients::from_slice(&h, &v[1..], 1.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn reference_radius_change_keeps_the_field() {
        let h = HarmonicSet::new(true, vec![1, 4]).unwrap();
        let v = [0.3, -0.7, 1.1, 0.2, -0.4, 0.9, 0.05, 0.6, -1.3, 0.8];
        let c = AirGapCoefficients::from_slice(&h, &v, 0.9, 1.3, 0.9).unwrap();
        let p = c.physical();
        for &(r, phi) in &[(0.9, 0.1), (1.1, 2.0), (1.3, -1.0)] {
            let (a, b) = (c.potential(r, phi), p.potential(r, phi));
            assert!((a - b).abs() < 1e-13 * a.abs().max(1.0));
        }
    }
}
