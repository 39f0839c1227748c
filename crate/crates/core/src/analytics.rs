//! Closed-form predictions for recurrences, decay times and spreading, and
//! detection of recurrences in simulated return-probability series.

use serde::{Deserialize, Serialize};

use crate::bessel::{bessel_j0, J0_FIRST_ZERO};
use crate::error::{Result, WalkError};
use crate::series::TimeSeries;
use crate::spectral::period;

/// Prefactor of the decay time, `J0_FIRST_ZERO / 2` rounded as usually quoted.
pub const TAU_PREFACTOR: f64 = 1.2;

fn check_probability(big_d: f64) -> Result<()> {
    if big_d.is_finite() && (0.0..=1.0).contains(&big_d) {
        Ok(())
    } else {
        Err(WalkError::Domain {
            name: "D",
            value: big_d,
            reason: "transition probability must lie in [0, 1]",
        })
    }
}

/// `D_eff = D^(T/2)`.
pub fn effective_probability(big_d: f64, p: u32) -> Result<f64> {
    check_probability(big_d)?;
    Ok(big_d.powi((period(p)? / 2) as i32))
}

/// `P(T) = (1 - D_eff)^2`.
pub fn predict_pt(big_d: f64, p: u32) -> Result<f64> {
    let d_eff = effective_probability(big_d, p)?;
    Ok((1.0 - d_eff).powi(2))
}

/// `P(kT) = J0(2 k sqrt(D_eff))^2`.
pub fn predict_pkt(big_d: f64, p: u32, k: u32) -> Result<f64> {
    let d_eff = effective_probability(big_d, p)?;
    Ok(bessel_j0(2.0 * k as f64 * d_eff.sqrt()).powi(2))
}

/// Decay time of the recurrences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayTime {
    Steps(f64),
    /// `D = 0`: recurrences are perfect forever.
    Never,
}

impl DecayTime {
    pub fn steps(&self) -> Option<f64> {
        match self {
            Self::Steps(t) => Some(*t),
            Self::Never => None,
        }
    }
}

fn decay(big_d: f64, p: u32, prefactor: f64) -> Result<DecayTime> {
    let d_eff = effective_probability(big_d, p)?;
    if d_eff == 0.0 {
        return Ok(DecayTime::Never);
    }
    Ok(DecayTime::Steps(prefactor * period(p)? as f64 / d_eff.sqrt()))
}

/// `tau = 1.2 T / sqrt(D_eff)`.
pub fn tau(big_d: f64, p: u32) -> Result<DecayTime> {
    decay(big_d, p, TAU_PREFACTOR)
}

/// Decay time with the exact `J0` root in place of the rounded `1.2`.
pub fn tau_exact(big_d: f64, p: u32) -> Result<DecayTime> {
    decay(big_d, p, J0_FIRST_ZERO / 2.0)
}

/// `sqrt(1 - sqrt(1 - D))`, the spreading speed of a walk with diagonal
/// coin weight `D`.
pub fn ballistic_slope(big_d: f64) -> f64 {
    (1.0 - (1.0 - big_d).max(0.0).sqrt()).max(0.0).sqrt()
}

/// Late-time spread `sigma = t sqrt(1 - sqrt(1 - D_eff))`.
pub fn predict_sigma(big_d: f64, p: u32, t: f64) -> Result<f64> {
    Ok(t * ballistic_slope(effective_probability(big_d, p)?))
}

/// Localization length for an incommensurate phase slope,
/// `(T~ / 2) sqrt(1 - sqrt(1 - D))`.
pub fn sigma_max(big_d: f64, t_tilde: f64) -> Result<f64> {
    check_probability(big_d)?;
    if !(t_tilde > 0.0) {
        return Err(WalkError::Domain {
            name: "T~",
            value: t_tilde,
            reason: "continuum period must be positive",
        });
    }
    Ok(0.5 * t_tilde * ballistic_slope(big_d))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictionSet {
    pub big_d: f64,
    pub p: u32,
    pub q: u32,
    pub period: u32,
    pub big_d_eff: f64,
    pub p_t: f64,
    pub tau: DecayTime,
}

impl PredictionSet {
    pub fn new(big_d: f64, p: u32, q: u32) -> Result<Self> {
        Ok(Self {
            big_d,
            p,
            q,
            period: period(p)?,
            big_d_eff: effective_probability(big_d, p)?,
            p_t: predict_pt(big_d, p)?,
            tau: tau(big_d, p)?,
        })
    }

    pub fn p_kt(&self, k: u32) -> f64 {
        bessel_j0(2.0 * k as f64 * self.big_d_eff.sqrt()).powi(2)
    }

    pub fn sigma_at(&self, t: f64) -> f64 {
        t * ballistic_slope(self.big_d_eff)
    }

    pub fn sigma_max(&self, t_tilde: f64) -> Result<f64> {
        sigma_max(self.big_d, t_tilde)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecurrenceKind {
    Perfect,
    Imperfect,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceEvent {
    pub k: u32,
    pub t: usize,
    pub probability: f64,
    pub kind: RecurrenceKind,
    /// The continuum recurrence time `k T~` this event shadows.
    pub predicted_t: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceScan {
    pub events: Vec<RecurrenceEvent>,
    pub diagnostics: Vec<String>,
}

pub const DEFAULT_PERFECT_THRESHOLD: f64 = 0.99;

/// For every `k >= 1` with `k T~` inside the series, the largest `P(t)` over
/// even `t` within `k T~ +- T~/4`.
pub fn find_recurrences(series: &TimeSeries, t_tilde: f64, threshold: f64) -> RecurrenceScan {
    let mut scan = RecurrenceScan::default();
    if !(t_tilde > 0.0) || series.is_empty() {
        scan.diagnostics.push("empty series or non-positive period".into());
        return scan;
    }
    let t_end = series.times.iter().copied().fold(f64::MIN, f64::max);
    let half_width = t_tilde / 4.0;
    let mut k = 1u32;
    while k as f64 * t_tilde <= t_end {
        let centre = k as f64 * t_tilde;
        let best = series
            .iter()
            .filter(|&(t, _)| {
                t.fract() == 0.0 && (t as u64) % 2 == 0 && (t - centre).abs() <= half_width
            })
            .fold(None, |acc: Option<(f64, f64)>, (t, v)| match acc {
                Some((_, bv)) if bv >= v => acc,
                _ => Some((t, v)),
            });
        match best {
            Some((t, v)) => scan.events.push(RecurrenceEvent {
                k,
                t: t as usize,
                probability: v,
                kind: if v >= threshold {
                    RecurrenceKind::Perfect
                } else {
                    RecurrenceKind::Imperfect
                },
                predicted_t: centre,
            }),
            None => scan
                .diagnostics
                .push(format!("k = {k}: no even sample within {centre} +- {half_width}")),
        }
        k += 1;
    }
    scan
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recurrence_limits() {
        assert_eq!(predict_pt(0.0, 9).unwrap(), 1.0);
        assert_eq!(predict_pt(1.0, 9).unwrap(), 0.0);
        assert!((predict_pt(0.5, 9).unwrap() - (1.0 - 0.5f64.powi(9)).powi(2)).abs() < 1e-15);
        // D = 0.3, p = 5: T = 10
        assert!((predict_pt(0.3, 5).unwrap() - (1.0 - 0.3f64.powi(5)).powi(2)).abs() < 1e-15);
        assert!(predict_pt(1.2, 3).is_err());
    }

    #[test]
    fn pt_strictly_decreasing_in_d() {
        // strict wherever D_eff is resolvable next to 1 in double precision
        for p in [1, 2, 5, 9, 10] {
            let mut prev = predict_pt(0.0, p).unwrap();
            for i in 1..100 {
                let big_d = i as f64 / 100.0;
                let cur = predict_pt(big_d, p).unwrap();
                if effective_probability(big_d, p).unwrap() > 1e-12 {
                    assert!(cur < prev, "p={p} D={big_d}");
                } else {
                    assert!(cur <= prev);
                }
                prev = cur;
            }
        }
    }

    #[test]
    fn multiple_recurrence_zero_near_k7() {
        assert_eq!(predict_pkt(0.5, 10, 0).unwrap(), 1.0);
        let k_root = J0_FIRST_ZERO / (2.0 * 0.03125f64.sqrt());
        assert_eq!(k_root.round(), 7.0);
        let vals: Vec<f64> = (0..=30).map(|k| predict_pkt(0.5, 10, k).unwrap()).collect();
        let first_min = (1..30).find(|&k| vals[k] < vals[k - 1] && vals[k] < vals[k + 1]);
        assert_eq!(first_min, Some(7));
        assert!(vals.iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn first_bessel_term_tracks_exact_recurrence() {
        for p in [4, 5, 8, 9] {
            for i in 1..=19 {
                let big_d = i as f64 / 20.0;
                if effective_probability(big_d, p).unwrap() <= 0.1 {
                    let gap = predict_pkt(big_d, p, 1).unwrap() - predict_pt(big_d, p).unwrap();
                    assert!(gap >= -0.02, "p={p} D={big_d} gap={gap}");
                }
            }
        }
    }

    #[test]
    fn decay_times() {
        let t = |p| tau(0.5, p).unwrap().steps().unwrap();
        assert!((t(10) - 67.88).abs() < 0.01);
        assert!((t(20) - 768.0).abs() < 1e-9);
        assert!((t(16) - 307.2).abs() < 1e-9);
        assert!((t(15) - 6516.7).abs() < 0.05);
        assert_eq!(tau(0.0, 4).unwrap(), DecayTime::Never);
        let exact = tau_exact(0.5, 10).unwrap().steps().unwrap();
        assert!((exact / t(10) - J0_FIRST_ZERO / 2.4).abs() < 1e-12);
    }

    #[test]
    fn decay_time_scaling_same_parity() {
        for (big_d, p) in [(0.5, 10), (0.7, 5), (0.3, 3)] {
            let ratio = tau(big_d, p).unwrap().steps().unwrap()
                / tau(big_d, p + 2).unwrap().steps().unwrap();
            let de = |p| effective_probability(big_d, p).unwrap().sqrt();
            let expect = de(p + 2) / de(p) * period(p).unwrap() as f64 / period(p + 2).unwrap() as f64;
            assert!((ratio - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn sigma_predictions() {
        assert_eq!(predict_sigma(1.0, 7, 13.0).unwrap(), 13.0);
        assert_eq!(predict_sigma(0.0, 7, 13.0).unwrap(), 0.0);
        let slope = predict_sigma(0.5, 5, 1.0).unwrap();
        assert!((slope - (1.0 - (1.0 - 2f64.powi(-5)).sqrt()).sqrt()).abs() < 1e-15);
        // parity jump: p = 4 has D_eff = D^2, p = 5 has D^5
        let even = predict_sigma(0.5, 4, 1.0).unwrap();
        let odd = predict_sigma(0.5, 5, 1.0).unwrap();
        assert_eq!(even, ballistic_slope(0.25));
        assert_eq!(odd, ballistic_slope(0.5f64.powi(5)));
        assert!(even / odd > 2.9);
    }

    #[test]
    fn localization_length() {
        let s = sigma_max(0.5, 4.0 * std::f64::consts::PI).unwrap();
        assert!((s - 3.40).abs() < 0.005);
        assert_eq!(sigma_max(0.0, 7.0).unwrap(), 0.0);
        assert_eq!(sigma_max(1.0, 7.0).unwrap(), 3.5);
        assert!(sigma_max(0.5, 0.0).is_err());
    }

    #[test]
    fn prediction_set_invariants() {
        let ps = PredictionSet::new(0.5, 10, 1).unwrap();
        assert_eq!(ps.period, 10);
        assert_eq!(ps.p_kt(0), 1.0);
        assert!((0.0..=1.0).contains(&ps.p_t));
        assert!(ps.tau.steps().unwrap() > 0.0);
    }

    #[test]
    fn recurrence_windows() {
        let series: TimeSeries = (0..=40)
            .map(|t| (t as f64, if t % 10 == 0 { 1.0 } else if t % 2 == 0 { 0.3 } else { 0.0 }))
            .collect();
        let scan = find_recurrences(&series, 10.0, DEFAULT_PERFECT_THRESHOLD);
        assert_eq!(scan.events.len(), 4);
        assert!(scan.events.iter().all(|e| e.kind == RecurrenceKind::Perfect && e.t % 10 == 0));

        // Non-integer period: maxima land on a neighbouring even step.
        let t_tilde = 4.0 * std::f64::consts::PI;
        let series: TimeSeries = (0..=40)
            .map(|t| {
                let x = (std::f64::consts::PI * t as f64 / t_tilde).sin();
                (t as f64, if t % 2 == 0 { 1.0 - x * x } else { 0.0 })
            })
            .collect();
        let scan = find_recurrences(&series, t_tilde, DEFAULT_PERFECT_THRESHOLD);
        let ts: Vec<usize> = scan.events.iter().map(|e| e.t).collect();
        assert_eq!(ts, vec![12, 26, 38]);
        let kinds: Vec<RecurrenceKind> = scan.events.iter().map(|e| e.kind).collect();
        // cos^2(3) and cos^2(6.5) fall short of 0.99, cos^2(9.5) does not
        assert_eq!(
            kinds,
            vec![RecurrenceKind::Imperfect, RecurrenceKind::Imperfect, RecurrenceKind::Perfect]
        );
    }

    #[test]
    fn empty_windows_reported() {
        let series: TimeSeries = (0..=20).map(|t| ((2 * t + 1) as f64, 0.5)).collect();
        let scan = find_recurrences(&series, 10.0, 0.99);
        assert!(scan.events.is_empty());
        assert_eq!(scan.diagnostics.len(), 4);
    }
}
