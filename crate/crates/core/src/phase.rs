//! Position-dependent phase profiles `phi(n)`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Result, WalkError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PhaseProfile {
    /// `phi(n) = phi0`; the ordinary coined walk.
    Constant { phi0: f64 },
    /// `phi(n) = n * 2 pi q / p` with `gcd(q, p) = 1`.
    Harmonic { q: u32, p: u32 },
    /// `phi(n) = n * phi` for an arbitrary (typically incommensurate) slope.
    IrrationalHarmonic { phi: f64 },
    /// One phase per site.
    Table { phases: Vec<f64> },
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Signed position of site `n` on an `N`-cycle, in `[-N/2, N/2)`.
pub fn signed_position(n: usize, cycle: usize) -> i64 {
    let half = (cycle / 2) as i64;
    (n as i64 + half).rem_euclid(cycle as i64) - half
}

impl PhaseProfile {
    pub fn harmonic(q: u32, p: u32) -> Result<Self> {
        let profile = Self::Harmonic { q, p };
        profile.validate_kind()?;
        Ok(profile)
    }

    pub fn constant(phi0: f64) -> Self {
        Self::Constant { phi0 }
    }

    pub fn irrational(phi: f64) -> Self {
        Self::IrrationalHarmonic { phi }
    }

    fn validate_kind(&self) -> Result<()> {
        match self {
            Self::Harmonic { q, p } => {
                if *p < 1 {
                    return Err(WalkError::Config("harmonic profile needs p >= 1".into()));
                }
                if q >= p {
                    return Err(WalkError::Config(format!(
                        "harmonic profile needs 0 <= q < p, got q = {q}, p = {p}"
                    )));
                }
                if gcd(*q as u64, *p as u64) != 1 {
                    return Err(WalkError::Config(format!(
                        "harmonic profile needs coprime q and p, got q = {q}, p = {p}"
                    )));
                }
                Ok(())
            }
            Self::Constant { phi0 } if !phi0.is_finite() => {
                Err(WalkError::Config("constant phase must be finite".into()))
            }
            Self::IrrationalHarmonic { phi } if !phi.is_finite() => {
                Err(WalkError::Config("phase slope must be finite".into()))
            }
            Self::Table { phases } if phases.iter().any(|x| !x.is_finite()) => {
                Err(WalkError::Config("phase table contains non-finite entries".into()))
            }
            _ => Ok(()),
        }
    }

    /// Checks the profile against a cycle of length `cycle`.
    pub fn validate(&self, cycle: usize) -> Result<()> {
        self.validate_kind()?;
        match self {
            Self::Harmonic { p, .. } if cycle % (*p as usize) != 0 => Err(WalkError::Config(
                format!("cycle length {cycle} is not a multiple of p = {p}"),
            )),
            Self::Table { phases } if phases.len() != cycle => Err(WalkError::Dimension {
                expected: cycle,
                got: phases.len(),
            }),
            _ => Ok(()),
        }
    }

    /// Phase per unit step, when the profile is linear in `n`.
    pub fn slope(&self) -> Option<f64> {
        match self {
            Self::Constant { .. } => Some(0.0),
            Self::Harmonic { q, p } => Some(TAU * *q as f64 / *p as f64),
            Self::IrrationalHarmonic { phi } => Some(*phi),
            Self::Table { .. } => None,
        }
    }

    /// `phi(n)` for every site of the cycle.
    ///
    /// Linear profiles are evaluated at the signed position of the site so the
    /// cycle reproduces the line in the window around site 0. Harmonic phases
    /// are reduced exactly modulo 2 pi.
    pub fn phases(&self, cycle: usize) -> Vec<f64> {
        match self {
            Self::Constant { phi0 } => vec![*phi0; cycle],
            Self::Harmonic { q, p } => {
                let (q, p) = (*q as u64, *p as u64);
                (0..cycle as u64)
                    .map(|n| TAU * ((q * (n % p)) % p) as f64 / p as f64)
                    .collect()
            }
            Self::IrrationalHarmonic { phi } => (0..cycle)
                .map(|n| signed_position(n, cycle) as f64 * phi)
                .collect(),
            Self::Table { phases } => phases.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_validation() {
        assert!(PhaseProfile::harmonic(1, 9).is_ok());
        assert!(PhaseProfile::harmonic(0, 1).is_ok());
        assert!(PhaseProfile::harmonic(2, 4).is_err());
        assert!(PhaseProfile::harmonic(9, 9).is_err());
        assert!(PhaseProfile::harmonic(0, 0).is_err());
        let h = PhaseProfile::harmonic(1, 5).unwrap();
        assert!(h.validate(20).is_ok());
        assert!(h.validate(21).is_err());
    }

    #[test]
    fn table_length_checked() {
        let t = PhaseProfile::Table { phases: vec![0.0; 4] };
        assert!(t.validate(4).is_ok());
        assert!(matches!(t.validate(5), Err(WalkError::Dimension { .. })));
    }

    #[test]
    fn signed_positions_wrap() {
        assert_eq!(signed_position(0, 10), 0);
        assert_eq!(signed_position(4, 10), 4);
        assert_eq!(signed_position(5, 10), -5);
        assert_eq!(signed_position(9, 10), -1);
        assert_eq!(signed_position(3, 7), 3);
        assert_eq!(signed_position(4, 7), -3);
    }

    #[test]
    fn harmonic_phases_are_periodic() {
        let ph = PhaseProfile::harmonic(2, 5).unwrap().phases(20);
        for n in 0..15 {
            assert_eq!(ph[n], ph[n + 5]);
        }
        assert!((ph[1] - TAU * 2.0 / 5.0).abs() < 1e-15);
        // n = 3: 6 mod 5 = 1
        assert!((ph[3] - TAU / 5.0).abs() < 1e-15);
    }

    #[test]
    fn irrational_phase_is_continuous_across_origin() {
        let ph = PhaseProfile::irrational(0.5).phases(11);
        assert_eq!(ph[0], 0.0);
        assert!((ph[10] + 0.5).abs() < 1e-15);
        assert!((ph[1] - 0.5).abs() < 1e-15);
    }
}
