//! Continuum limit of the walk: the coupled-mode equations
//! `d a_n / dt = i n phi a_n + (i d / 2)(a_{n-1} + a_{n+1})`
//! and their Bloch-oscillation solution `P(t) = J0((d T~ / pi) sin(pi t / T~))^2`,
//! with `T~ = 2 pi / phi`.
//!
//! The two coin components obey the same equation independently, so the
//! continuum model carries a single amplitude per site.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analytics::{find_recurrences, sigma_max, RecurrenceEvent, DEFAULT_PERFECT_THRESHOLD};
use crate::bessel::bessel_j0;
use crate::coin::{CoinSpec, CoinVariant};
use crate::error::{Result, WalkError};
use crate::phase::{signed_position, PhaseProfile};
use crate::series::TimeSeries;
use crate::walk::{auto_cycle_length, evolve, Observers, WalkConfig, WalkState};

/// Leakage allowed at the truncation edge, as `|a_{+-n_max}|^2`.
pub const LEAKAGE_LIMIT: f64 = 1e-8;
/// Largest `|sum |a_n|^2 - 1|` tolerated during integration.
pub const NORM_DRIFT_LIMIT: f64 = 1e-8;
/// Largest change of `P(t_max)` tolerated when `dt` is halved.
pub const STEP_DOUBLING_LIMIT: f64 = 1e-8;

/// `T~ = 2 pi / phi`; infinite for `phi = 0`.
pub fn continuum_period(phi: f64) -> f64 {
    if phi == 0.0 {
        f64::INFINITY
    } else {
        TAU / phi.abs()
    }
}

/// `J0((d T~ / pi) sin(pi t / T~))^2`, reducing to `J0(d t)^2` as `T~ -> inf`.
pub fn closed_form_bloch(d: f64, t_tilde: f64, t: f64) -> f64 {
    let x = if t_tilde.is_infinite() {
        d * t
    } else {
        d * t_tilde / PI * (PI * t / t_tilde).sin()
    };
    bessel_j0(x).powi(2)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecursionReport {
    /// Residual of the recursion with `phi(n) = n phi` phases as usually
    /// written, per coin component; `None` when the profile is not linear.
    pub printed: Option<[f64; 2]>,
    /// Residual of
    /// `a_c(n,t+1) = e^{i(phi(m)+phi(n))} a_c(n,t-1) + i d e^{i phi(m)} (a_c(n-1,t) + a_c(n+1,t))`,
    /// `m = n - (-1)^c`, which holds for every profile.
    pub general: f64,
}

/// Substitutes consecutive walk states into the second-order recursion
/// satisfied by symmetric-coin walks.
pub fn check_recursive_equation(trajectory: &[WalkState], config: &WalkConfig) -> Result<RecursionReport> {
    if config.coin().variant() != CoinVariant::Symmetric {
        return Err(WalkError::Unsupported(
            "the second-order recursion holds for the symmetric coin only".into(),
        ));
    }
    if trajectory.len() < 3 {
        return Err(WalkError::Config(
            "need at least three consecutive time slices".into(),
        ));
    }
    let cycle = config.cycle();
    for (i, s) in trajectory.iter().enumerate() {
        if s.cycle() != cycle {
            return Err(WalkError::Dimension {
                expected: 2 * cycle,
                got: s.amplitudes().len(),
            });
        }
        if i > 0 && s.t() != trajectory[i - 1].t() + 1 {
            return Err(WalkError::Config("time slices must be consecutive".into()));
        }
    }
    let d = config.coin().d();
    let id = Complex64::new(0.0, d);
    let phases = config.phase().phases(cycle);
    let slope = match config.phase() {
        PhaseProfile::Harmonic { .. } | PhaseProfile::IrrationalHarmonic { .. } => {
            config.phase().slope()
        }
        PhaseProfile::Constant { phi0 } if *phi0 == 0.0 => Some(0.0),
        _ => None,
    };

    let mut printed = [0.0f64; 2];
    let mut general = 0.0f64;
    for w in trajectory.windows(3) {
        let (prev, cur, next) = (&w[0], &w[1], &w[2]);
        for c in 0..2 {
            for n in 0..cycle {
                let left = (n + cycle - 1) % cycle;
                let right = (n + 1) % cycle;
                let hop = cur.amplitude(c, left) + cur.amplitude(c, right);
                let m = if c == 0 { left } else { right };
                let rhs = Complex64::from_polar(1.0, phases[m] + phases[n]) * prev.amplitude(c, n)
                    + id * Complex64::from_polar(1.0, phases[m]) * hop;
                general = general.max((next.amplitude(c, n) - rhs).norm());

                if let Some(phi) = slope {
                    let x = signed_position(n, cycle) as f64;
                    let lhs = next.amplitude(c, n) - prev.amplitude(c, n);
                    let rhs = (Complex64::from_polar(1.0, (2.0 * x - 1.0) * phi) - 1.0)
                        * prev.amplitude(c, n)
                        + id * Complex64::from_polar(1.0, (x - 1.0) * phi) * hop;
                    printed[c] = printed[c].max((lhs - rhs).norm());
                }
            }
        }
    }
    Ok(RecursionReport {
        printed: slope.map(|_| printed),
        general,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoupledModeParams {
    pub phi: f64,
    pub d: f64,
    pub t_max: f64,
    /// Defaults to `min(0.01, T~ / 1000)`.
    pub dt: Option<f64>,
    /// Defaults to `ceil(d T~) + 20`; required when `phi = 0`.
    pub n_max: Option<usize>,
    /// Record `P` every this many integration steps.
    pub record_every: usize,
}

impl CoupledModeParams {
    pub fn new(phi: f64, d: f64, t_max: f64) -> Self {
        Self {
            phi,
            d,
            t_max,
            dt: None,
            n_max: None,
            record_every: 1,
        }
    }

    pub fn t_tilde(&self) -> f64 {
        continuum_period(self.phi)
    }

    pub fn resolved_dt(&self) -> f64 {
        self.dt.unwrap_or_else(|| (self.t_tilde() / 1000.0).min(0.01))
    }

    pub fn resolved_n_max(&self) -> Result<usize> {
        match self.n_max {
            Some(n) => Ok(n),
            None if self.phi == 0.0 => Err(WalkError::Config(
                "n_max must be given explicitly when phi = 0".into(),
            )),
            None => Ok((self.d * self.t_tilde()).ceil() as usize + 20),
        }
    }

    /// Bloch excursion scale: `d T~ / pi`, or `d t_max` without a field.
    fn excursion(&self) -> f64 {
        let bloch = self.d * self.t_tilde() / PI;
        bloch.min(self.d * self.t_max)
    }
}

/// Truncated lattice of modes `n in [-n_max, n_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeLattice {
    pub n_max: usize,
    pub amplitudes: Vec<Complex64>,
    pub phi: f64,
    pub d: f64,
    pub t: f64,
}

impl ModeLattice {
    /// All weight on `n = 0`.
    pub fn localized(n_max: usize, phi: f64, d: f64) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 2 * n_max + 1];
        amplitudes[n_max] = Complex64::new(1.0, 0.0);
        Self {
            n_max,
            amplitudes,
            phi,
            d,
            t: 0.0,
        }
    }

    pub fn mode(&self, n: i64) -> Complex64 {
        self.amplitudes[(n + self.n_max as i64) as usize]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn edge_weight(&self) -> f64 {
        self.amplitudes[0]
            .norm_sqr()
            .max(self.amplitudes[2 * self.n_max].norm_sqr())
    }

    fn derivative(&self, a: &[Complex64], out: &mut [Complex64]) {
        let len = a.len();
        let hop = Complex64::new(0.0, 0.5 * self.d);
        for i in 0..len {
            let n = i as f64 - self.n_max as f64;
            let left = if i > 0 { a[i - 1] } else { Complex64::new(0.0, 0.0) };
            let right = if i + 1 < len { a[i + 1] } else { Complex64::new(0.0, 0.0) };
            out[i] = Complex64::new(0.0, n * self.phi) * a[i] + hop * (left + right);
        }
    }

    /// One classical fourth-order Runge-Kutta step.
    pub fn rk4_step(&mut self, dt: f64) {
        let len = self.amplitudes.len();
        let zero = Complex64::new(0.0, 0.0);
        let mut k1 = vec![zero; len];
        let mut k2 = vec![zero; len];
        let mut k3 = vec![zero; len];
        let mut k4 = vec![zero; len];
        let mut tmp = vec![zero; len];
        let a = &self.amplitudes;
        self.derivative(a, &mut k1);
        for i in 0..len {
            tmp[i] = a[i] + 0.5 * dt * k1[i];
        }
        self.derivative(&tmp, &mut k2);
        for i in 0..len {
            tmp[i] = a[i] + 0.5 * dt * k2[i];
        }
        self.derivative(&tmp, &mut k3);
        for i in 0..len {
            tmp[i] = a[i] + dt * k3[i];
        }
        self.derivative(&tmp, &mut k4);
        for i in 0..len {
            self.amplitudes[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        self.t += dt;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoupledModeRun {
    /// `P(t) = |a_0(t)|^2`.
    pub series: TimeSeries,
    pub dt: f64,
    pub n_max: usize,
    pub max_norm_drift: f64,
    pub max_edge_weight: f64,
    pub step_doubling_delta: f64,
}

struct RawRun {
    series: TimeSeries,
    max_norm_drift: f64,
    max_edge_weight: f64,
}

fn run_lattice(params: &CoupledModeParams, dt: f64, n_max: usize, record_every: usize) -> RawRun {
    let steps = (params.t_max / dt).round() as usize;
    let mut lattice = ModeLattice::localized(n_max, params.phi, params.d);
    let mut series = TimeSeries::with_capacity(steps / record_every + 1);
    let mut max_norm_drift = 0.0f64;
    let mut max_edge_weight = 0.0f64;
    series.push(0.0, 1.0);
    for i in 1..=steps {
        lattice.rk4_step(dt);
        max_edge_weight = max_edge_weight.max(lattice.edge_weight());
        if i % record_every == 0 || i == steps {
            max_norm_drift = max_norm_drift.max((lattice.norm_sqr() - 1.0).abs());
            series.push(i as f64 * dt, lattice.mode(0).norm_sqr());
        }
    }
    RawRun {
        series,
        max_norm_drift,
        max_edge_weight,
    }
}

/// Integrates the coupled-mode equations from a mode localized at `n = 0`.
///
/// `t_max` is rounded to a whole number of steps. Fails if the norm drifts
/// by more than [`NORM_DRIFT_LIMIT`], if the truncation edge picks up more
/// than [`LEAKAGE_LIMIT`], or if halving `dt` moves `P(t_max)` by more than
/// [`STEP_DOUBLING_LIMIT`].
pub fn integrate_coupled_modes(params: &CoupledModeParams) -> Result<CoupledModeRun> {
    if !(params.d >= 0.0 && params.d <= 1.0) {
        return Err(WalkError::Domain {
            name: "d",
            value: params.d,
            reason: "coupling amplitude must lie in [0, 1]",
        });
    }
    if !(params.t_max >= 0.0) || !params.phi.is_finite() {
        return Err(WalkError::Config("t_max must be >= 0 and phi finite".into()));
    }
    let dt = params.resolved_dt();
    if !(dt > 0.0) {
        return Err(WalkError::Domain {
            name: "dt",
            value: dt,
            reason: "time step must be positive",
        });
    }
    let n_max = params.resolved_n_max()?;
    let every = params.record_every.max(1);

    let run = run_lattice(params, dt, n_max, every);
    if !(run.max_norm_drift <= NORM_DRIFT_LIMIT) {
        return Err(WalkError::NormDrift {
            drift: run.max_norm_drift,
            limit: NORM_DRIFT_LIMIT,
        });
    }
    if run.max_edge_weight > LEAKAGE_LIMIT {
        let x = params.excursion();
        let required = ((x + 6.0 * x.cbrt()).ceil() as usize + 10).max(n_max + 1);
        return Err(WalkError::Leakage {
            leakage: run.max_edge_weight,
            required,
        });
    }
    let fine = run_lattice(params, 0.5 * dt, n_max, 2 * every);
    let last = |s: &TimeSeries| *s.values.last().expect("series starts with t = 0");
    let delta = (last(&run.series) - last(&fine.series)).abs();
    if delta > STEP_DOUBLING_LIMIT {
        return Err(WalkError::StepDoubling {
            delta,
            limit: STEP_DOUBLING_LIMIT,
        });
    }
    Ok(CoupledModeRun {
        series: run.series,
        dt,
        n_max,
        max_norm_drift: run.max_norm_drift,
        max_edge_weight: run.max_edge_weight,
        step_doubling_delta: delta,
    })
}

/// Smallest `p` such that `phase` is `Harmonic { p, .. }`, or 1.
fn cell_of(phase: &PhaseProfile) -> usize {
    match phase {
        PhaseProfile::Harmonic { p, .. } => *p as usize,
        _ => 1,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub t: usize,
    pub discrete: f64,
    pub continuum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub t_tilde: f64,
    pub rows: Vec<ComparisonRow>,
    /// Discrete maxima near each continuum recurrence `k T~`.
    pub events: Vec<RecurrenceEvent>,
    /// `max |P_discrete - P_continuum|` over even `t`.
    pub max_deviation: f64,
    /// Same, restricted to `t <= 3 T~`.
    pub max_deviation_three_periods: f64,
}

/// Runs a symmetric-coin walk on `phase` with `D = big_d` and pairs its
/// return probability at even `t` with the Bloch closed form.
pub fn discrete_vs_continuum(big_d: f64, phase: &PhaseProfile, t_max: usize) -> Result<ComparisonReport> {
    let slope = phase.slope().ok_or_else(|| {
        WalkError::Unsupported("continuum comparison needs a linear phase profile".into())
    })?;
    let coin = CoinSpec::from_probability(big_d, CoinVariant::Symmetric)?;
    let cycle = auto_cycle_length(cell_of(phase), t_max);
    let config = WalkConfig::new(cycle, coin, phase.clone())?;
    let obs = evolve(&config, t_max, &Observers::default().return_probability(1))?;
    let t_tilde = continuum_period(slope);
    let d = coin.d();

    let mut rows = Vec::new();
    let mut max_deviation = 0.0f64;
    let mut max_early = 0.0f64;
    for (t, p) in obs.return_probability.iter() {
        let ti = t as usize;
        if ti % 2 != 0 {
            continue;
        }
        let c = closed_form_bloch(d, t_tilde, t);
        let dev = (p - c).abs();
        max_deviation = max_deviation.max(dev);
        if t <= 3.0 * t_tilde {
            max_early = max_early.max(dev);
        }
        rows.push(ComparisonRow {
            t: ti,
            discrete: p,
            continuum: c,
        });
    }
    let events = if t_tilde.is_finite() {
        find_recurrences(&obs.return_probability, t_tilde, DEFAULT_PERFECT_THRESHOLD).events
    } else {
        Vec::new()
    };
    Ok(ComparisonReport {
        t_tilde,
        rows,
        events,
        max_deviation,
        max_deviation_three_periods: max_early,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizationReport {
    pub sigma: TimeSeries,
    pub max_sigma: f64,
    /// Running maximum of `sigma` over the first half of the run.
    pub max_sigma_first_half: f64,
    pub sigma_max_formula: f64,
}

/// Spread of a standard-coin walk with `phi(n) = n phi` from the default
/// initial state.
pub fn localization(big_d: f64, phi: f64, t_max: usize) -> Result<LocalizationReport> {
    let coin = CoinSpec::from_probability(big_d, CoinVariant::Standard)?;
    let cycle = auto_cycle_length(1, t_max);
    let config = WalkConfig::new(cycle, coin, PhaseProfile::irrational(phi))?;
    let obs = evolve(&config, t_max, &Observers::default().sigma(1))?;
    let sigma = obs.sigma;
    let max_sigma = sigma.max_value().unwrap_or(0.0);
    let max_sigma_first_half = sigma
        .window(0.0, (t_max / 2) as f64)
        .max_value()
        .unwrap_or(0.0);
    Ok(LocalizationReport {
        sigma,
        max_sigma,
        max_sigma_first_half,
        sigma_max_formula: sigma_max(big_d, continuum_period(phi))?,
    })
}
