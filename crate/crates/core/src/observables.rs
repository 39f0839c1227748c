use serde::{Deserialize, Serialize};

use crate::error::{Result, WalkError};
use crate::phase::signed_position;
use crate::walk::WalkState;

/// `P(t) = |<Psi(t)|Psi(0)>|^2`.
pub fn return_probability(state: &WalkState, initial: &WalkState) -> Result<f64> {
    if state.amplitudes().len() != initial.amplitudes().len() {
        return Err(WalkError::Dimension {
            expected: initial.amplitudes().len(),
            got: state.amplitudes().len(),
        });
    }
    let overlap: num_complex::Complex64 = state
        .amplitudes()
        .iter()
        .zip(initial.amplitudes())
        .map(|(a, b)| a.conj() * b)
        .sum();
    Ok(overlap.norm_sqr().min(1.0))
}

/// Site occupation probabilities at time `t`, with displacements measured
/// from `origin` and unwrapped into `[-N/2, N/2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositionDistribution {
    pub t: usize,
    pub origin: usize,
    pub probabilities: Vec<f64>,
}

impl PositionDistribution {
    pub fn cycle(&self) -> usize {
        self.probabilities.len()
    }

    pub fn displacement(&self, n: usize) -> i64 {
        let cycle = self.cycle();
        signed_position((n + cycle - self.origin % cycle) % cycle, cycle)
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.probabilities
            .iter()
            .enumerate()
            .map(|(n, p)| p * self.displacement(n) as f64)
            .sum()
    }

    /// Probability at signed displacement `x` from the origin.
    pub fn at_displacement(&self, x: i64) -> f64 {
        let cycle = self.cycle() as i64;
        let n = (self.origin as i64 + x).rem_euclid(cycle) as usize;
        self.probabilities[n]
    }
}

pub fn position_distribution(state: &WalkState, origin: usize) -> PositionDistribution {
    let cycle = state.cycle();
    let amps = state.amplitudes();
    let probabilities = (0..cycle)
        .map(|n| amps[n].norm_sqr() + amps[cycle + n].norm_sqr())
        .collect();
    PositionDistribution {
        t: state.t(),
        origin,
        probabilities,
    }
}

/// Standard deviation of the unwrapped displacement. Fails once `2t >= N`,
/// where the two ends of the spreading packet meet on the cycle.
pub fn sigma(dist: &PositionDistribution) -> Result<f64> {
    let cycle = dist.cycle();
    if 2 * dist.t >= cycle {
        return Err(WalkError::Wraparound {
            t: dist.t,
            half: cycle / 2,
            n: cycle,
        });
    }
    let mean = dist.mean();
    let var: f64 = dist
        .probabilities
        .iter()
        .enumerate()
        .map(|(n, p)| {
            let dx = dist.displacement(n) as f64 - mean;
            p * dx * dx
        })
        .sum();
    Ok(var.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coin::{CoinSpec, CoinVariant};
    use crate::phase::PhaseProfile;
    use crate::walk::{evolve, InitialState, Observers, WalkConfig};
    use num_complex::Complex64;

    #[test]
    fn self_overlap_and_orthogonality() {
        let cfg = WalkConfig::new(
            6,
            CoinSpec::new(0.3, CoinVariant::Standard).unwrap(),
            PhaseProfile::constant(0.0),
        )
        .unwrap();
        let s = cfg.initial_state();
        assert_eq!(return_probability(&s, &s).unwrap(), 1.0);
        let mut amps = vec![Complex64::new(0.0, 0.0); 12];
        amps[3] = Complex64::new(0.0, 1.0);
        let other = WalkState::from_amplitudes(0, amps).unwrap();
        assert_eq!(return_probability(&other, &s).unwrap(), 0.0);
        let small = WalkState::from_amplitudes(0, vec![Complex64::new(0.5, 0.0); 4]).unwrap();
        assert!(return_probability(&small, &s).is_err());
    }

    #[test]
    fn localized_state_has_zero_width() {
        let cfg = WalkConfig::with_initial(
            10,
            CoinSpec::new(0.5, CoinVariant::Standard).unwrap(),
            PhaseProfile::constant(0.0),
            InitialState::symmetric(7),
        )
        .unwrap();
        let dist = position_distribution(&cfg.initial_state(), 7);
        assert_eq!(sigma(&dist).unwrap(), 0.0);
        assert_eq!(dist.mean(), 0.0);
    }

    #[test]
    fn ballistic_limit_spreads_at_unit_speed() {
        let cfg = WalkConfig::with_initial(
            64,
            CoinSpec::new(1.0, CoinVariant::Standard).unwrap(),
            PhaseProfile::harmonic(1, 4).unwrap(),
            InitialState::symmetric(0),
        )
        .unwrap();
        let obs = evolve(&cfg, 30, &Observers::default().sigma(1).distribution(10)).unwrap();
        for (t, s) in obs.sigma.iter() {
            assert!((s - t).abs() < 1e-12, "t={t} sigma={s}");
        }
        let (_, d30) = &obs.distributions[3];
        assert!((d30.at_displacement(30) - 0.5).abs() < 1e-12);
        assert!((d30.at_displacement(-30) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn sigma_refuses_wrapped_distribution() {
        let dist = PositionDistribution {
            t: 5,
            origin: 0,
            probabilities: vec![0.1; 10],
        };
        assert!(sigma(&dist).is_err());
    }

    #[test]
    fn displacement_relative_to_origin() {
        let dist = PositionDistribution {
            t: 0,
            origin: 8,
            probabilities: vec![0.0; 10],
        };
        assert_eq!(dist.displacement(8), 0);
        assert_eq!(dist.displacement(9), 1);
        assert_eq!(dist.displacement(0), 2);
        assert_eq!(dist.displacement(7), -1);
        assert_eq!(dist.displacement(3), -5);
    }
}
