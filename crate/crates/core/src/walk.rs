//! State-vector evolution of the generalized coined walk on an `N`-cycle.
//!
//! One step applies `U = (sum_c |c><c| (x) S_c)(C (x) I)` where
//! `S_c |n> = exp(i phi(n)) |n + (-1)^c>` with addition modulo `N`.
//! Amplitudes are stored coin-major: index `c * N + n`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coin::{CoinMatrix, CoinSpec};
use crate::error::{Result, WalkError};
use crate::observables::{position_distribution, return_probability, sigma, PositionDistribution};
use crate::phase::PhaseProfile;
use crate::series::TimeSeries;

const NORM_TOLERANCE: f64 = 1e-12;

/// Initial condition `|Psi(0)>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum InitialState {
    /// Walker on a single site with the given coin amplitudes.
    Localized { site: usize, coin: [Complex64; 2] },
    /// Arbitrary `2N` amplitudes; `reference_site` anchors displacement.
    Custom {
        reference_site: usize,
        amplitudes: Vec<Complex64>,
    },
}

impl Default for InitialState {
    /// Site 0, coin state `|0>`.
    fn default() -> Self {
        Self::Localized {
            site: 0,
            coin: [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        }
    }
}

impl InitialState {
    pub fn localized(site: usize, c0: Complex64, c1: Complex64) -> Self {
        Self::Localized {
            site,
            coin: [c0, c1],
        }
    }

    /// `(1, i) / sqrt 2` on `site`.
    pub fn symmetric(site: usize) -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::localized(site, Complex64::new(h, 0.0), Complex64::new(0.0, h))
    }

    pub fn reference_site(&self) -> usize {
        match self {
            Self::Localized { site, .. } => *site,
            Self::Custom { reference_site, .. } => *reference_site,
        }
    }

    pub fn is_localized(&self) -> bool {
        matches!(self, Self::Localized { .. })
    }

    fn amplitudes(&self, cycle: usize) -> Result<Vec<Complex64>> {
        let amps = match self {
            Self::Localized { site, coin } => {
                if *site >= cycle {
                    return Err(WalkError::Config(format!(
                        "initial site {site} outside the {cycle}-cycle"
                    )));
                }
                let mut v = vec![Complex64::new(0.0, 0.0); 2 * cycle];
                v[*site] = coin[0];
                v[cycle + *site] = coin[1];
                v
            }
            Self::Custom {
                reference_site,
                amplitudes,
            } => {
                if amplitudes.len() != 2 * cycle {
                    return Err(WalkError::Dimension {
                        expected: 2 * cycle,
                        got: amplitudes.len(),
                    });
                }
                if *reference_site >= cycle {
                    return Err(WalkError::Config(format!(
                        "reference site {reference_site} outside the {cycle}-cycle"
                    )));
                }
                amplitudes.clone()
            }
        };
        let norm = norm_sqr(&amps);
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(WalkError::NotNormalized {
                norm,
                tolerance: NORM_TOLERANCE,
            });
        }
        Ok(amps)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkConfig {
    cycle: usize,
    coin: CoinSpec,
    phase: PhaseProfile,
    initial: InitialState,
}

impl WalkConfig {
    pub fn new(cycle: usize, coin: CoinSpec, phase: PhaseProfile) -> Result<Self> {
        Self::with_initial(cycle, coin, phase, InitialState::default())
    }

    pub fn with_initial(
        cycle: usize,
        coin: CoinSpec,
        phase: PhaseProfile,
        initial: InitialState,
    ) -> Result<Self> {
        if cycle < 2 {
            return Err(WalkError::Config(format!(
                "cycle length must be at least 2, got {cycle}"
            )));
        }
        phase.validate(cycle)?;
        initial.amplitudes(cycle)?;
        Ok(Self {
            cycle,
            coin,
            phase,
            initial,
        })
    }

    pub fn cycle(&self) -> usize {
        self.cycle
    }

    pub fn coin(&self) -> &CoinSpec {
        &self.coin
    }

    pub fn phase(&self) -> &PhaseProfile {
        &self.phase
    }

    pub fn initial(&self) -> &InitialState {
        &self.initial
    }

    pub fn initial_state(&self) -> WalkState {
        WalkState {
            t: 0,
            cycle: self.cycle,
            amplitudes: self
                .initial
                .amplitudes(self.cycle)
                .expect("validated at construction"),
        }
    }

    pub fn operator(&self) -> WalkOperator {
        WalkOperator::new(self)
    }
}

/// Smallest multiple of `p` that is at least `2 t_max + 4`, so that a walk
/// of `t_max` steps never wraps around the cycle.
pub fn auto_cycle_length(p: usize, t_max: usize) -> usize {
    let p = p.max(1);
    p * (2 * t_max + 4).div_ceil(p)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkState {
    t: usize,
    cycle: usize,
    amplitudes: Vec<Complex64>,
}

impl WalkState {
    /// Wraps raw coin-major amplitudes.
    pub fn from_amplitudes(t: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() < 4 || amplitudes.len() % 2 != 0 {
            return Err(WalkError::Dimension {
                expected: 2 * (amplitudes.len() / 2).max(2),
                got: amplitudes.len(),
            });
        }
        Ok(Self {
            t,
            cycle: amplitudes.len() / 2,
            amplitudes,
        })
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn cycle(&self) -> usize {
        self.cycle
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, c: usize, n: usize) -> Complex64 {
        self.amplitudes[c * self.cycle + n]
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amplitudes)
    }
}

fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// `U_phi` prepared for repeated application; nothing is materialized
/// beyond the coin and the per-site phase factors.
#[derive(Debug, Clone)]
pub struct WalkOperator {
    cycle: usize,
    coin: CoinMatrix,
    phase_factors: Vec<Complex64>,
}

impl WalkOperator {
    pub fn new(config: &WalkConfig) -> Self {
        let phase_factors = config
            .phase
            .phases(config.cycle)
            .into_iter()
            .map(|phi| Complex64::from_polar(1.0, phi))
            .collect();
        Self {
            cycle: config.cycle,
            coin: config.coin.matrix(),
            phase_factors,
        }
    }

    pub fn cycle(&self) -> usize {
        self.cycle
    }

    /// Writes `U * input` into `output`. Both are coin-major of length `2N`.
    pub fn apply_into(&self, input: &[Complex64], output: &mut [Complex64]) {
        let n_sites = self.cycle;
        let (in0, in1) = input.split_at(n_sites);
        let (out0, out1) = output.split_at_mut(n_sites);
        let c = &self.coin;
        for n in 0..n_sites {
            let (a0, a1) = (in0[n], in1[n]);
            let ph = self.phase_factors[n];
            let right = if n + 1 == n_sites { 0 } else { n + 1 };
            let left = if n == 0 { n_sites - 1 } else { n - 1 };
            out0[right] = ph * (c[0][0] * a0 + c[0][1] * a1);
            out1[left] = ph * (c[1][0] * a0 + c[1][1] * a1);
        }
    }

    pub fn apply(&self, state: &WalkState) -> Result<WalkState> {
        if state.cycle != self.cycle {
            return Err(WalkError::Dimension {
                expected: 2 * self.cycle,
                got: state.amplitudes.len(),
            });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); 2 * self.cycle];
        self.apply_into(&state.amplitudes, &mut out);
        Ok(WalkState {
            t: state.t + 1,
            cycle: self.cycle,
            amplitudes: out,
        })
    }

    /// Advances `state` in place by `steps`, reusing one scratch buffer.
    pub fn advance(&self, state: &mut WalkState, steps: usize) -> Result<()> {
        if state.cycle != self.cycle {
            return Err(WalkError::Dimension {
                expected: 2 * self.cycle,
                got: state.amplitudes.len(),
            });
        }
        let mut scratch = vec![Complex64::new(0.0, 0.0); 2 * self.cycle];
        for _ in 0..steps {
            self.apply_into(&state.amplitudes, &mut scratch);
            std::mem::swap(&mut state.amplitudes, &mut scratch);
            state.t += 1;
        }
        Ok(())
    }
}

/// One application of `U_phi`.
pub fn step(state: &WalkState, config: &WalkConfig) -> Result<WalkState> {
    config.operator().apply(state)
}

/// Which observables to record and how often (every `k` steps, `t = 0`
/// included).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Observers {
    pub return_probability: Option<usize>,
    pub sigma: Option<usize>,
    pub norm: Option<usize>,
    pub distribution: Option<usize>,
    pub keep_states: Option<usize>,
    /// Refuse to run past `N/2`, where the cycle stops mimicking the line.
    pub line_semantics: bool,
}

impl Observers {
    pub fn return_probability(mut self, every: usize) -> Self {
        self.return_probability = Some(every.max(1));
        self
    }

    pub fn sigma(mut self, every: usize) -> Self {
        self.sigma = Some(every.max(1));
        self
    }

    pub fn norm(mut self, every: usize) -> Self {
        self.norm = Some(every.max(1));
        self
    }

    pub fn distribution(mut self, every: usize) -> Self {
        self.distribution = Some(every.max(1));
        self
    }

    pub fn states(mut self, every: usize) -> Self {
        self.keep_states = Some(every.max(1));
        self
    }

    pub fn line_semantics(mut self) -> Self {
        self.line_semantics = true;
        self
    }
}

#[derive(Debug, Clone, Default)]
pub struct Observations {
    pub return_probability: TimeSeries,
    pub sigma: TimeSeries,
    pub norm: TimeSeries,
    pub distributions: Vec<(usize, PositionDistribution)>,
    pub states: Vec<WalkState>,
    pub final_state: Option<WalkState>,
}

fn due(cadence: Option<usize>, t: usize) -> bool {
    cadence.is_some_and(|k| t % k == 0)
}

/// Runs `t_max` steps from the configured initial state.
pub fn evolve(config: &WalkConfig, t_max: usize, observers: &Observers) -> Result<Observations> {
    let cycle = config.cycle;
    if (observers.line_semantics || observers.sigma.is_some()) && 2 * t_max >= cycle {
        return Err(WalkError::Wraparound {
            t: t_max,
            half: cycle / 2,
            n: cycle,
        });
    }
    let op = config.operator();
    let initial = config.initial_state();
    let origin = config.initial.reference_site();
    let mut state = initial.clone();
    let mut scratch = vec![Complex64::new(0.0, 0.0); 2 * cycle];
    let mut obs = Observations::default();

    for t in 0..=t_max {
        if t > 0 {
            op.apply_into(&state.amplitudes, &mut scratch);
            std::mem::swap(&mut state.amplitudes, &mut scratch);
            state.t = t;
        }
        let tf = t as f64;
        if due(observers.return_probability, t) {
            obs.return_probability
                .push(tf, return_probability(&state, &initial)?);
        }
        if due(observers.norm, t) {
            obs.norm.push(tf, state.norm_sqr());
        }
        let want_sigma = due(observers.sigma, t);
        let want_dist = due(observers.distribution, t);
        if want_sigma || want_dist {
            let dist = position_distribution(&state, origin);
            if want_sigma {
                obs.sigma.push(tf, sigma(&dist)?);
            }
            if want_dist {
                obs.distributions.push((t, dist));
            }
        }
        if due(observers.keep_states, t) {
            obs.states.push(state.clone());
        }
    }
    obs.final_state = Some(state);
    Ok(obs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coin::CoinVariant;

    fn harmonic(big_d: f64, q: u32, p: u32, cycle: usize) -> WalkConfig {
        WalkConfig::new(
            cycle,
            CoinSpec::from_probability(big_d, CoinVariant::Standard).unwrap(),
            PhaseProfile::harmonic(q, p).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn auto_cycle_is_multiple_of_p_and_wide_enough() {
        assert_eq!(auto_cycle_length(10, 300), 610);
        assert_eq!(auto_cycle_length(5, 2000), 4005);
        assert_eq!(auto_cycle_length(1, 500), 1004);
        for p in 1..20 {
            let n = auto_cycle_length(p, 37);
            assert_eq!(n % p, 0);
            assert!(n >= 78 && n < 78 + p);
        }
    }

    #[test]
    fn config_rejects_bad_inputs() {
        let coin = CoinSpec::new(0.5, CoinVariant::Standard).unwrap();
        assert!(WalkConfig::new(1, coin, PhaseProfile::constant(0.0)).is_err());
        assert!(WalkConfig::new(21, coin, PhaseProfile::harmonic(1, 4).unwrap()).is_err());
        let unnormalized = InitialState::localized(
            0,
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
        );
        assert!(matches!(
            WalkConfig::with_initial(8, coin, PhaseProfile::constant(0.0), unnormalized),
            Err(WalkError::NotNormalized { .. })
        ));
        let off_cycle = InitialState::symmetric(8);
        assert!(WalkConfig::with_initial(8, coin, PhaseProfile::constant(0.0), off_cycle).is_err());
    }

    #[test]
    fn zero_steps_is_identity() {
        let cfg = harmonic(0.5, 1, 3, 12);
        let obs = evolve(&cfg, 0, &Observers::default().return_probability(1)).unwrap();
        assert_eq!(obs.final_state.unwrap(), cfg.initial_state());
        assert_eq!(obs.return_probability.len(), 1);
        assert_eq!(obs.return_probability.values[0], 1.0);
    }

    #[test]
    fn adiabatic_two_step_return() {
        let cfg = harmonic(0.0, 0, 1, 8);
        let s0 = cfg.initial_state();
        let s2 = step(&step(&s0, &cfg).unwrap(), &cfg).unwrap();
        assert_eq!(s2.t(), 2);
        assert!((return_probability(&s2, &s0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn step_rejects_mismatched_state() {
        let cfg = harmonic(0.5, 1, 2, 8);
        let other = harmonic(0.5, 1, 2, 10).initial_state();
        assert!(matches!(step(&other, &cfg), Err(WalkError::Dimension { .. })));
    }

    #[test]
    fn line_semantics_refuses_wraparound() {
        let cfg = harmonic(0.5, 1, 2, 20);
        assert!(evolve(&cfg, 9, &Observers::default().line_semantics()).is_ok());
        assert!(matches!(
            evolve(&cfg, 10, &Observers::default().line_semantics()),
            Err(WalkError::Wraparound { .. })
        ));
        assert!(evolve(&cfg, 10, &Observers::default().sigma(1)).is_err());
        assert!(evolve(&cfg, 40, &Observers::default().return_probability(1)).is_ok());
    }

    #[test]
    fn single_step_moves_each_coin_component() {
        let coin = CoinSpec::new(1.0, CoinVariant::Standard).unwrap();
        let cfg = WalkConfig::with_initial(
            6,
            coin,
            PhaseProfile::constant(0.25),
            InitialState::localized(0, Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)),
        )
        .unwrap();
        let s1 = step(&cfg.initial_state(), &cfg).unwrap();
        let ph = Complex64::from_polar(1.0, 0.25);
        // C = diag(1, -1): coin 0 hops to n = 1, coin 1 to n = 5 with a sign flip.
        assert!((s1.amplitude(0, 1) - ph * 0.6).norm() < 1e-15);
        assert!((s1.amplitude(1, 5) - ph * Complex64::new(0.0, -0.8)).norm() < 1e-15);
        assert!((s1.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cadence_selects_times() {
        let cfg = harmonic(0.5, 1, 3, 30);
        let obs = evolve(&cfg, 10, &Observers::default().norm(3).states(5)).unwrap();
        assert_eq!(obs.norm.times, vec![0.0, 3.0, 6.0, 9.0]);
        assert_eq!(obs.states.iter().map(|s| s.t()).collect::<Vec<_>>(), vec![0, 5, 10]);
    }
}
