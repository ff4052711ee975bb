use crate::error::{Result, SimError};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Direction of a permanent magnet's remanent flux density, in the patch frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum Orientation {
    /// `sign · e_r`
    Radial { sign: f64 },
    /// Fixed direction `(cos γ, sin γ)`.
    Parallel { angle: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Source {
    None,
    /// Constant current density `J_z` (A/m²).
    Current { density: f64 },
    /// Winding of phase `phase` (1, 2 or 3) with sign ±1, driven by the field's three-phase supply.
    Phase { phase: u8, sign: f64 },
    /// Remanent flux density of magnitude `b_rem` (T).
    Remanence { b_rem: f64, orientation: Orientation },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Material {
    /// Conductivity (S/m).
    pub sigma: f64,
    /// Reluctivity (m/H).
    pub nu: f64,
    #[serde(default = "no_source")]
    pub source: Source,
}

fn no_source() -> Source {
    Source::None
}

impl Material {
    pub fn new(sigma: f64, nu: f64) -> Self {
        Self {
            sigma,
            nu,
            source: Source::None,
        }
    }

    pub fn with_source(mut self, source: Source) -> Self {
        self.source = source;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return Err(SimError::invalid(format!("reluctivity must be positive, got {}", self.nu)));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(SimError::invalid(format!(
                "conductivity must be nonnegative, got {}",
                self.sigma
            )));
        }
        if let Source::Phase { phase, sign } = self.source {
            if !(1..=3).contains(&phase) {
                return Err(SimError::invalid(format!("invalid phase index {phase}")));
            }
            if sign.abs() != 1.0 {
                return Err(SimError::invalid("winding sign must be +1 or -1"));
            }
        }
        Ok(())
    }
}

/// Balanced three-phase supply `J0 sin(ωt + 2πk/3)`, `k = 1, 2, 3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThreePhase {
    pub j0: f64,
    pub omega: f64,
}

impl ThreePhase {
    pub fn current(&self, t: f64, phase: u8) -> Result<f64> {
        if !(1..=3).contains(&phase) {
            return Err(SimError::invalid(format!("invalid phase index {phase}")));
        }
        Ok(self.j0 * (self.omega * t + 2.0 * PI * phase as f64 / 3.0).sin())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sector {
    /// Start angle (rad); the sector ends where the next one starts.
    pub start: f64,
    pub material: Material,
}

/// Radial band `[r_inner, r_outer]` split into angular sectors that tile one full turn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadialBand {
    pub r_inner: f64,
    pub r_outer: f64,
    pub sectors: Vec<Sector>,
}

/// Piecewise-constant materials on an annulus: radial bands × angular sectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialField {
    pub bands: Vec<RadialBand>,
    #[serde(default)]
    pub supply: Option<ThreePhase>,
}

impl MaterialField {
    pub fn uniform(r_inner: f64, r_outer: f64, material: Material) -> Result<Self> {
        Self::new(
            vec![RadialBand {
                r_inner,
                r_outer,
                sectors: vec![Sector { start: 0.0, material }],
            }],
            None,
        )
    }

    pub fn new(bands: Vec<RadialBand>, supply: Option<ThreePhase>) -> Result<Self> {
        if bands.is_empty() {
            return Err(SimError::invalid("material field has no bands"));
        }
        for (i, b) in bands.iter().enumerate() {
            if !(b.r_outer > b.r_inner) {
                return Err(SimError::invalid(format!("band {i} has empty radial extent")));
            }
            if i > 0 && (b.r_inner - bands[i - 1].r_outer).abs() > 1e-12 * b.r_outer {
                return Err(SimError::invalid(format!("band {i} does not start where band {} ends", i - 1)));
            }
            if b.sectors.is_empty() {
                return Err(SimError::invalid(format!("band {i} has no sectors")));
            }
            let s0 = b.sectors[0].start;
            for (j, s) in b.sectors.iter().enumerate() {
                s.material.validate()?;
                if j > 0 && !(s.start > b.sectors[j - 1].start) {
                    return Err(SimError::invalid(format!("band {i}: sector starts must increase")));
                }
                if !(s.start < s0 + 2.0 * PI) {
                    return Err(SimError::invalid(format!("band {i}: sectors exceed one turn")));
                }
            }
        }
        let uses_phase = bands
            .iter()
            .flat_map(|b| &b.sectors)
            .any(|s| matches!(s.material.source, Source::Phase { .. }));
        if uses_phase && supply.is_none() {
            return Err(SimError::invalid("phase windings present but no three-phase supply"));
        }
        Ok(Self { bands, supply })
    }

    pub fn r_inner(&self) -> f64 {
        self.bands[0].r_inner
    }

    pub fn r_outer(&self) -> f64 {
        self.bands[self.bands.len() - 1].r_outer
    }

    /// Material at polar point `(r, θ)` of the patch frame.
    pub fn at(&self, r: f64, theta: f64) -> &Material {
        let bi = self
            .bands
            .partition_point(|b| b.r_outer <= r)
            .min(self.bands.len() - 1);
        let band = &self.bands[bi];
        let s0 = band.sectors[0].start;
        let t = s0 + (theta - s0).rem_euclid(2.0 * PI);
        let si = band.sectors.partition_point(|s| s.start <= t).max(1) - 1;
        &band.sectors[si].material
    }

    /// Radii of all band boundaries, for aligning radial knot lines.
    pub fn band_radii(&self) -> Vec<f64> {
        let mut r = vec![self.r_inner()];
        r.extend(self.bands.iter().map(|b| b.r_outer));
        r
    }

    pub fn has_conductivity(&self) -> bool {
        self.bands.iter().flat_map(|b| &b.sectors).any(|s| s.material.sigma > 0.0)
    }
}
