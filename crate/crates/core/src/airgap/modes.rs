use super::harmonics::{AirGapCoefficients, HarmonicSet};
use crate::error::{Result, SimError};
use crate::linalg::DenseMatrix;

/// The 2×2 system tying mode `k` of the gap series to the interface Fourier coefficients.
///
/// Unscaled rows are `(R_i^k, R_i^-k)` (`(1, ln R_i)` for `k = 0`); the scaled form uses
/// `R1 = 1` and `R̃ = R2/R1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSystem {
    pub k: usize,
    pub matrix: [[f64; 2]; 2],
    pub scaled: bool,
    pub r1: f64,
    pub r2: f64,
}

pub fn mode_system(k: usize, r1: f64, r2: f64, scaled: bool) -> Result<ModeSystem> {
    if !(r1 > 0.0 && r2.is_finite()) {
        return Err(SimError::invalid(format!("gap radii must be positive, got {r1}, {r2}")));
    }
    if r1 >= r2 {
        return Err(SimError::invalid(format!("gap needs R1 < R2, got {r1} >= {r2}")));
    }
    let matrix = if scaled {
        let rt = r2 / r1;
        if k == 0 {
            [[1.0, 0.0], [1.0, rt.ln()]]
        } else {
            let kf = k as f64;
            [[1.0, 1.0], [(kf * rt.ln()).exp(), (-kf * rt.ln()).exp()]]
        }
    } else if k == 0 {
        [[1.0, r1.ln()], [1.0, r2.ln()]]
    } else {
        let kf = k as f64;
        [
            [(kf * r1.ln()).exp(), (-kf * r1.ln()).exp()],
            [(kf * r2.ln()).exp(), (-kf * r2.ln()).exp()],
        ]
    };
    Ok(ModeSystem {
        k,
        matrix,
        scaled,
        r1,
        r2,
    })
}

/// `(sign, ln|x|)` of a signed number; zero maps to sign 0.
type SignedLog = (f64, f64);

fn signed_log(x: f64) -> SignedLog {
    if x == 0.0 {
        (0.0, f64::NEG_INFINITY)
    } else {
        (x.signum(), x.abs().ln())
    }
}

/// `ln|e^x ± e^y|` where `same_sign` selects `+`.
fn log_combine(x: f64, y: f64, same_sign: bool) -> f64 {
    let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    if same_sign {
        hi + (lo - hi).exp().ln_1p()
    } else if hi == lo {
        f64::NEG_INFINITY
    } else {
        hi + (-(lo - hi).exp_m1()).ln()
    }
}

impl ModeSystem {
    pub fn determinant(&self) -> f64 {
        let m = &self.matrix;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    /// Solves the system by Gaussian elimination with row pivoting.
    pub fn solve(&self, rhs: [f64; 2]) -> Result<[f64; 2]> {
        let m = self.matrix;
        let (p, q) = if m[0][0].abs() >= m[1][0].abs() { (0, 1) } else { (1, 0) };
        let pivot = m[p][0];
        if pivot == 0.0 {
            return Err(SimError::Singular(format!("mode system k = {}", self.k)));
        }
        let l = m[q][0] / pivot;
        let u11 = m[q][1] - l * m[p][1];
        let scale = m[0][0].abs().max(m[0][1].abs()).max(m[1][0].abs()).max(m[1][1].abs());
        if u11 == 0.0 || !(u11.abs() > scale * f64::EPSILON * 1e-3) {
            return Err(SimError::Singular(format!("mode system k = {}", self.k)));
        }
        let y1 = rhs[q] - l * rhs[p];
        let x1 = y1 / u11;
        let x0 = (rhs[p] - m[p][1] * x1) / pivot;
        if !(x0.is_finite() && x1.is_finite()) {
            return Err(SimError::Singular(format!("mode system k = {}", self.k)));
        }
        Ok([x0, x1])
    }

    /// Entries as `(sign, ln|x|)`, evaluated analytically so that huge powers do not overflow.
    fn log_entries(&self) -> [[SignedLog; 2]; 2] {
        let k = self.k as f64;
        if self.k == 0 {
            return [
                [signed_log(self.matrix[0][0]), signed_log(self.matrix[0][1])],
                [signed_log(self.matrix[1][0]), signed_log(self.matrix[1][1])],
            ];
        }
        let (l1, l2) = if self.scaled {
            (0.0, (self.r2 / self.r1).ln())
        } else {
            (self.r1.ln(), self.r2.ln())
        };
        [
            [(1.0, k * l1), (1.0, -k * l1)],
            [(1.0, k * l2), (1.0, -k * l2)],
        ]
    }

    /// Natural logarithm of the spectral condition number, from the exact 2×2 singular values.
    pub fn log_condition_number(&self) -> f64 {
        let e = self.log_entries();
        let mut log_f = f64::NEG_INFINITY;
        for row in &e {
            for &(s, l) in row {
                if s != 0.0 {
                    log_f = log_combine(log_f, 2.0 * l, true);
                }
            }
        }
        let (sa, la) = e[0][0];
        let (sb, lb) = e[0][1];
        let (sc, lc) = e[1][0];
        let (sd, ld) = e[1][1];
        let t1 = (sa * sd, la + ld);
        let t2 = (-(sb * sc), lb + lc);
        let log_det = match (t1.0 == 0.0, t2.0 == 0.0) {
            (true, true) => f64::NEG_INFINITY,
            (true, false) => t2.1,
            (false, true) => t1.1,
            (false, false) => log_combine(t1.1, t2.1, t1.0 == t2.0),
        };
        if log_det == f64::NEG_INFINITY {
            return f64::INFINITY;
        }
        // σ_max² = F/2 (1 + sqrt(1 - 4 det²/F²)), κ = σ_max²/|det|
        let q = (2.0 * (log_det - log_f)).exp() * 4.0;
        log_f - std::f64::consts::LN_2 + (1.0 + (1.0 - q).max(0.0).sqrt()).ln() - log_det
    }

    /// Spectral condition number κ₂; `inf` when it exceeds the floating-point range.
    pub fn condition_number(&self) -> f64 {
        self.log_condition_number().exp()
    }
}

/// Block-diagonal mode systems for a harmonic set (the `K_F` block).
///
/// Row order: zero mode `(v01, v02)`, then per mode `(v_k1, v_k2)` for cosine followed by sine.
/// Unknown order: `(α0, α0')`, then per mode `(α_k, α_k', β_k, β_k')`.
#[derive(Debug, Clone, PartialEq)]
pub struct GapSystem {
    pub harmonics: HarmonicSet,
    pub r1: f64,
    pub r2: f64,
    pub scaled: bool,
    pub zero: Option<ModeSystem>,
    pub modes: Vec<ModeSystem>,
}

impl GapSystem {
    pub fn new(harmonics: &HarmonicSet, r1: f64, r2: f64, scaled: bool) -> Result<Self> {
        let zero = if harmonics.include_zero_mode() {
            Some(mode_system(0, r1, r2, scaled)?)
        } else {
            None
        };
        let modes = harmonics
            .modes()
            .iter()
            .map(|&k| mode_system(k, r1, r2, scaled))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            harmonics: harmonics.clone(),
            r1,
            r2,
            scaled,
            zero,
            modes,
        })
    }

    /// Radius the unknowns are written relative to: `R1` for scaled systems, 1 otherwise.
    pub fn reference_radius(&self) -> f64 {
        if self.scaled {
            self.r1
        } else {
            1.0
        }
    }

    pub fn dim(&self) -> usize {
        self.harmonics.n_coefficients()
    }

    pub fn matrix(&self) -> DenseMatrix {
        let mut kf = DenseMatrix::zeros(self.dim(), self.dim());
        let mut put = |o: usize, m: &[[f64; 2]; 2]| {
            for a in 0..2 {
                for b in 0..2 {
                    kf.set(o + a, o + b, m[a][b]);
                }
            }
        };
        if let Some(z) = &self.zero {
            put(0, &z.matrix);
        }
        for (i, ms) in self.modes.iter().enumerate() {
            let o = self.harmonics.mode_offset(i);
            put(o, &ms.matrix);
            put(o + 2, &ms.matrix);
        }
        kf
    }

    /// Solves `K_F x = rhs` block by block; `x` is in this system's own scaling.
    pub fn solve_raw(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        if rhs.len() != self.dim() {
            return Err(SimError::invalid(format!(
                "mode rhs has length {}, expected {}",
                rhs.len(),
                self.dim()
            )));
        }
        let mut x = vec![0.0; rhs.len()];
        if let Some(z) = &self.zero {
            let s = z.solve([rhs[0], rhs[1]])?;
            x[..2].copy_from_slice(&s);
        }
        for (i, ms) in self.modes.iter().enumerate() {
            let o = self.harmonics.mode_offset(i);
            for off in [o, o + 2] {
                let s = ms.solve([rhs[off], rhs[off + 1]])?;
                x[off..off + 2].copy_from_slice(&s);
            }
        }
        Ok(x)
    }

    /// Gap coefficients for the given Fourier data, written in this system's scaling.
    pub fn solve_coefficients(&self, rhs: &[f64]) -> Result<AirGapCoefficients> {
        let x = self.solve_raw(rhs)?;
        AirGapCoefficients::from_slice(&self.harmonics, &x, self.r1, self.r2, self.reference_radius())
    }
}

/// Solves all mode systems and returns physical coefficients (reference radius 1).
pub fn solve_mode_systems(kf: &GapSystem, fourier_rhs: &[f64]) -> Result<AirGapCoefficients> {
    Ok(kf.solve_coefficients(fourier_rhs)?.physical())
}
