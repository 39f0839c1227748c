//! Quasi-energy spectrum of `U_phi` for the harmonic profile `phi(n) = 2 pi q n / p`.
//!
//! Three routes are provided:
//!
//! * the closed form `r_jus = w_p^s z_ju` (odd `p`), with
//!   `z_ju = ((-1)^u sqrt(1 - l_j^2) - i l_j)^(1/p)` and
//!   `l_j = d_eff sin(pi T j / N)`;
//! * a numeric spectrum obtained by Fourier transforming over the `N / p`
//!   unit cells, which splits `U_phi` into `N / p` blocks of size `2p`;
//! * trace moments `Tr(U^k)`, computed by evolving basis vectors, which need
//!   no eigensolver at all.
//!
//! For even `p` the closed form `w_p^s (2 i l_j z_ju - 1)` does not lie on the
//! unit circle. Taking the `p`-th root of the whole bracket instead,
//! `w_p^s (2 i l_j w_ju - 1)^(1/p)` with `w_ju = z_ju^p`, reproduces the
//! numeric spectrum. Both even forms are exposed through [`EvenForm`].

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coin::{CoinSpec, CoinVariant};
use crate::error::{Result, WalkError};
use crate::phase::PhaseProfile;
use crate::walk::{WalkConfig, WalkOperator};

/// Unit-modulus tolerance for accepting a closed-form eigenvalue.
pub const UNIT_MODULUS_TOLERANCE: f64 = 1e-9;
/// Trace-moment tolerance for accepting a spectrum.
pub const TRACE_TOLERANCE: f64 = 1e-8;

/// Recurrence period: `p` for even `p`, `2p` for odd `p`.
pub fn period(p: u32) -> Result<u32> {
    if p < 1 {
        return Err(WalkError::Domain {
            name: "p",
            value: p as f64,
            reason: "period denominator must be at least 1",
        });
    }
    Ok(if p % 2 == 0 { p } else { 2 * p })
}

/// `(d_eff, D_eff) = (d^(T/2), d^T)`.
pub fn effective(d: f64, p: u32) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&d) {
        return Err(WalkError::Domain {
            name: "d",
            value: d,
            reason: "diabatic amplitude must lie in [0, 1]",
        });
    }
    let half = (period(p)? / 2) as i32;
    let d_eff = d.powi(half);
    Ok((d_eff, d_eff * d_eff))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralParams {
    pub cycle: usize,
    pub p: u32,
    pub q: u32,
    pub d: f64,
}

impl SpectralParams {
    pub fn new(cycle: usize, p: u32, q: u32, d: f64) -> Result<Self> {
        PhaseProfile::harmonic(q, p)?.validate(cycle)?;
        if cycle < 2 {
            return Err(WalkError::Config(format!(
                "cycle length must be at least 2, got {cycle}"
            )));
        }
        effective(d, p)?;
        Ok(Self { cycle, p, q, d })
    }

    pub fn from_config(config: &WalkConfig) -> Result<Self> {
        match config.phase() {
            PhaseProfile::Harmonic { q, p } => {
                Self::new(config.cycle(), *p, *q, config.coin().d())
            }
            other => Err(WalkError::Unsupported(format!(
                "spectral analysis needs a harmonic phase profile, got {other:?}"
            ))),
        }
    }

    pub fn period(&self) -> u32 {
        period(self.p).expect("validated")
    }

    pub fn d_eff(&self) -> f64 {
        effective(self.d, self.p).expect("validated").0
    }

    pub fn big_d_eff(&self) -> f64 {
        effective(self.d, self.p).expect("validated").1
    }

    pub fn cells(&self) -> usize {
        self.cycle / self.p as usize
    }

    /// `l_j = d_eff sin(pi T j / N)`.
    pub fn lambda(&self, j: usize) -> f64 {
        self.d_eff() * (PI * self.period() as f64 * j as f64 / self.cycle as f64).sin()
    }

    /// Walk with the standard coin and this profile, localized default start.
    pub fn walk_config(&self) -> WalkConfig {
        WalkConfig::new(
            self.cycle,
            CoinSpec::new(self.d, CoinVariant::Standard).expect("validated"),
            PhaseProfile::Harmonic {
                q: self.q,
                p: self.p,
            },
        )
        .expect("validated")
    }
}

/// Closed-form branch used for even `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvenForm {
    /// `w_p^s (2 i l_j z_ju - 1)`.
    AsPrinted,
    /// `w_p^s (2 i l_j z_ju^p - 1)^(1/p)`.
    RootOfBracket,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumSource {
    ClosedForm,
    ClosedFormCorrected,
    Numeric,
}

impl SpectrumSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::ClosedForm => "closed_form",
            Self::ClosedFormCorrected => "closed_form_corrected",
            Self::Numeric => "numeric",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    /// Closed form: `j` of `l_j`. Numeric: Bloch block index.
    pub j: usize,
    pub u: Option<u8>,
    pub s: Option<u32>,
    pub eigenvalue: Complex64,
    /// `Arg(r)` in `(-pi, pi]`.
    pub quasi_energy: f64,
    pub unit_modulus: bool,
}

impl SpectrumEntry {
    fn new(j: usize, u: Option<u8>, s: Option<u32>, eigenvalue: Complex64) -> Self {
        Self {
            j,
            u,
            s,
            eigenvalue,
            quasi_energy: quasi_energy(eigenvalue),
            unit_modulus: (eigenvalue.norm() - 1.0).abs() <= UNIT_MODULUS_TOLERANCE,
        }
    }
}

/// `Arg(r)` mapped into `(-pi, pi]`.
pub fn quasi_energy(r: Complex64) -> f64 {
    let e = r.arg();
    if e <= -PI {
        e + TAU
    } else {
        e
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub source: SpectrumSource,
    pub entries: Vec<SpectrumEntry>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.entries.iter().map(|e| e.eigenvalue).collect()
    }

    pub fn quasi_energies(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.quasi_energy).collect()
    }

    pub fn all_unit_modulus(&self) -> bool {
        self.entries.iter().all(|e| e.unit_modulus)
    }

    /// Largest `| |r| - 1 |`.
    pub fn max_modulus_defect(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| (e.eigenvalue.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// `sum r^k`.
    pub fn power_sum(&self, k: u32) -> Complex64 {
        self.entries
            .iter()
            .map(|e| e.eigenvalue.powu(k))
            .sum()
    }
}

fn principal_root(w: Complex64, p: u32) -> Complex64 {
    Complex64::from_polar(w.norm().powf(1.0 / p as f64), w.arg() / p as f64)
}

/// `w_ju = (-1)^u sqrt(1 - l^2) - i l`.
fn bracket(lambda: f64, u: u8) -> Complex64 {
    let sign = if u == 0 { 1.0 } else { -1.0 };
    Complex64::new(sign * (1.0 - lambda * lambda).max(0.0).sqrt(), -lambda)
}

/// `zeta_ju = r_jus^T`: `w_ju^2` for odd `p`, `-w_ju^2` for even `p`.
pub fn zeta(params: &SpectralParams, j: usize, u: u8) -> Complex64 {
    let w = bracket(params.lambda(j), u);
    if params.p % 2 == 0 {
        -(w * w)
    } else {
        w * w
    }
}

/// Closed-form spectrum, with the even-`p` form exactly as printed.
pub fn closed_form_spectrum(params: &SpectralParams) -> Spectrum {
    closed_form_spectrum_with(params, EvenForm::AsPrinted)
}

pub fn closed_form_spectrum_with(params: &SpectralParams, even: EvenForm) -> Spectrum {
    let p = params.p;
    let odd = p % 2 == 1;
    let omega = Complex64::from_polar(1.0, TAU / p as f64);
    let mut entries = Vec::with_capacity(2 * params.cycle);
    for j in 0..params.cells() {
        let lambda = params.lambda(j);
        for u in 0..2u8 {
            let w = bracket(lambda, u);
            let base = if odd {
                principal_root(w, p)
            } else {
                match even {
                    EvenForm::AsPrinted => {
                        Complex64::new(0.0, 2.0 * lambda) * principal_root(w, p) - 1.0
                    }
                    EvenForm::RootOfBracket => {
                        principal_root(Complex64::new(0.0, 2.0 * lambda) * w - 1.0, p)
                    }
                }
            };
            for s in 0..p {
                entries.push(SpectrumEntry::new(j, Some(u), Some(s), omega.powu(s) * base));
            }
        }
    }
    let source = if odd || even == EvenForm::AsPrinted {
        SpectrumSource::ClosedForm
    } else {
        SpectrumSource::ClosedFormCorrected
    };
    Spectrum { source, entries }
}

/// The `2p x 2p` Bloch block of `U_phi` at cell momentum `2 pi j / (N/p)`.
///
/// Basis order inside the block is coin-major, `c * p + r` for sublattice
/// offset `r` in `[0, p)`.
pub fn bloch_block(params: &SpectralParams, j: usize) -> DMatrix<Complex64> {
    let p = params.p as usize;
    let kappa = TAU * j as f64 / params.cells() as f64;
    let coin = CoinSpec::new(params.d, CoinVariant::Standard)
        .expect("validated")
        .matrix();
    let phases = PhaseProfile::Harmonic {
        q: params.q,
        p: params.p,
    }
    .phases(p);
    let mut block = DMatrix::from_element(2 * p, 2 * p, Complex64::new(0.0, 0.0));
    for c_src in 0..2 {
        for r_src in 0..p {
            let ph = Complex64::from_polar(1.0, phases[r_src]);
            for c in 0..2 {
                let target = r_src as i64 + if c == 0 { 1 } else { -1 };
                let (r, cell_shift) = if target == p as i64 {
                    (0, 1.0)
                } else if target < 0 {
                    (p - 1, -1.0)
                } else {
                    (target as usize, 0.0)
                };
                let bloch = Complex64::from_polar(1.0, -kappa * cell_shift);
                block[(c * p + r, c_src * p + r_src)] += coin[c][c_src] * ph * bloch;
            }
        }
    }
    block
}

/// Spectrum by block diagonalization over translations by `p` sites.
pub fn numeric_spectrum(params: &SpectralParams) -> Result<Spectrum> {
    let mut entries = Vec::with_capacity(2 * params.cycle);
    for j in 0..params.cells() {
        let block = bloch_block(params, j);
        let eig = nalgebra::linalg::Schur::try_new(block, f64::EPSILON, 100_000)
            .and_then(|s| s.eigenvalues())
            .ok_or(WalkError::Eigensolver { block: j })?;
        entries.extend(eig.iter().map(|&r| SpectrumEntry::new(j, None, None, r)));
    }
    Ok(Spectrum {
        source: SpectrumSource::Numeric,
        entries,
    })
}

/// Numeric spectrum for a walk configuration; only harmonic profiles are
/// translation invariant.
pub fn numeric_spectrum_for(config: &WalkConfig) -> Result<Spectrum> {
    numeric_spectrum(&SpectralParams::from_config(config)?)
}

/// Largest distance between two spectra compared as sorted multisets.
/// Quasi-energies within `1e-9` of `-pi` are folded to `+pi` before sorting
/// so that eigenvalues at `-1` pair up regardless of rounding.
pub fn multiset_distance(a: &Spectrum, b: &Spectrum) -> Result<f64> {
    if a.len() != b.len() {
        return Err(WalkError::Dimension {
            expected: a.len(),
            got: b.len(),
        });
    }
    let sorted = |s: &Spectrum| {
        let mut v: Vec<(f64, Complex64)> = s
            .entries
            .iter()
            .map(|e| {
                let mut qe = e.eigenvalue.arg();
                if qe <= -PI + 1e-9 {
                    qe += TAU;
                }
                (qe, e.eigenvalue)
            })
            .collect();
        v.sort_by(|x, y| x.0.total_cmp(&y.0));
        v
    };
    Ok(sorted(a)
        .iter()
        .zip(sorted(b).iter())
        .map(|(x, y)| (x.1 - y.1).norm())
        .fold(0.0, f64::max))
}

/// `Tr(U^k)` for `k = 1..=k_max`, by evolving every basis vector.
pub fn traces(config: &WalkConfig, k_max: u32) -> Vec<Complex64> {
    let op = WalkOperator::new(config);
    let dim = 2 * config.cycle();
    let mut tr = vec![Complex64::new(0.0, 0.0); k_max as usize];
    let mut v = vec![Complex64::new(0.0, 0.0); dim];
    let mut scratch = v.clone();
    for i in 0..dim {
        v.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        v[i] = Complex64::new(1.0, 0.0);
        for slot in tr.iter_mut() {
            op.apply_into(&v, &mut scratch);
            std::mem::swap(&mut v, &mut scratch);
            *slot += v[i];
        }
    }
    tr
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceReport {
    /// `|Tr(U^k) - sum r^k|` for `k = 1..=k_max`.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
}

pub fn trace_moments(params: &SpectralParams, spectrum: &Spectrum, k_max: u32) -> TraceReport {
    let tr = traces(&params.walk_config(), k_max);
    let residuals: Vec<f64> = tr
        .iter()
        .enumerate()
        .map(|(i, t)| (t - spectrum.power_sum(i as u32 + 1)).norm())
        .collect();
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    TraceReport {
        residuals,
        max_residual,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumValidation {
    pub max_modulus_defect: f64,
    pub trace: TraceReport,
    pub accepted: bool,
}

/// Validates a closed-form spectrum: unit modulus and trace moments up to `4p`.
pub fn validate_closed_form(params: &SpectralParams, spectrum: &Spectrum) -> SpectrumValidation {
    let trace = trace_moments(params, spectrum, 4 * params.p);
    let accepted = spectrum.all_unit_modulus() && trace.max_residual <= TRACE_TOLERANCE;
    SpectrumValidation {
        max_modulus_defect: spectrum.max_modulus_defect(),
        trace,
        accepted,
    }
}

/// The spectrum downstream code should use: the printed closed form when it
/// validates, the numeric spectrum otherwise.
pub fn authoritative_spectrum(params: &SpectralParams) -> Result<(Spectrum, SpectrumValidation)> {
    let closed = closed_form_spectrum(params);
    let validation = validate_closed_form(params, &closed);
    if validation.accepted {
        Ok((closed, validation))
    } else {
        Ok((numeric_spectrum(params)?, validation))
    }
}

/// Number of quasi-energy bands: `2p` for odd `p`, `p` for even `p`.
pub fn expected_band_count(p: u32) -> usize {
    if p % 2 == 0 {
        p as usize
    } else {
        2 * p as usize
    }
}

/// Linear band-width estimate `(2 pi / 2p) d_eff`.
pub fn heuristic_band_width(p: u32, d_eff: f64) -> f64 {
    PI / p as f64 * d_eff
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandSummary {
    pub index: usize,
    /// Lower edge in `(-pi, pi]`.
    pub min: f64,
    /// Upper edge, `min + width`; may exceed `pi` for a band straddling `-1`.
    pub max: f64,
    pub width: f64,
    pub members: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandAnalysis {
    pub bands: Vec<BandSummary>,
    pub expected: usize,
    pub diagnostic: Option<String>,
}

/// Clusters quasi-energies on the circle into bands. A gap wider than five
/// times the median neighbour gap (and at least `1e-9`) separates bands.
pub fn band_summary(quasi_energies: &[f64], p: u32) -> BandAnalysis {
    let expected = expected_band_count(p);
    let mut e: Vec<f64> = quasi_energies.to_vec();
    e.sort_by(f64::total_cmp);
    let n = e.len();
    if n == 0 {
        return BandAnalysis {
            bands: Vec::new(),
            expected,
            diagnostic: Some("empty spectrum".into()),
        };
    }
    let gaps: Vec<f64> = (0..n)
        .map(|i| {
            if i + 1 < n {
                e[i + 1] - e[i]
            } else {
                e[0] + TAU - e[n - 1]
            }
        })
        .collect();
    let mut sorted_gaps = gaps.clone();
    sorted_gaps.sort_by(f64::total_cmp);
    let median = if n % 2 == 1 {
        sorted_gaps[n / 2]
    } else {
        0.5 * (sorted_gaps[n / 2 - 1] + sorted_gaps[n / 2])
    };
    let threshold = (5.0 * median).max(1e-9);
    // gap i sits between e[i] and e[i + 1]
    let cuts: Vec<usize> = (0..n).filter(|&i| gaps[i] > threshold).collect();

    let mut bands = Vec::new();
    if cuts.is_empty() {
        bands.push(BandSummary {
            index: 0,
            min: -PI,
            max: PI,
            width: TAU,
            members: n,
        });
    } else {
        for (b, w) in cuts.iter().enumerate() {
            let start = (cuts[(b + cuts.len() - 1) % cuts.len()] + 1) % n;
            let end = *w;
            let members = (end + n - start) % n + 1;
            let mut width = e[end] - e[start];
            if width < 0.0 {
                width += TAU;
            }
            bands.push(BandSummary {
                index: 0,
                min: e[start],
                max: e[start] + width,
                width,
                members,
            });
        }
        bands.sort_by(|x, y| x.min.total_cmp(&y.min));
        for (i, band) in bands.iter_mut().enumerate() {
            band.index = i;
        }
    }
    let diagnostic = if bands.len() != expected {
        Some(format!(
            "found {} bands, expected {expected}; clustering is ambiguous when bands nearly touch",
            bands.len()
        ))
    } else {
        None
    };
    BandAnalysis {
        bands,
        expected,
        diagnostic,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(cycle: usize, p: u32, q: u32, d: f64) -> SpectralParams {
        SpectralParams::new(cycle, p, q, d).unwrap()
    }

    #[test]
    fn periods_and_effective_values() {
        assert_eq!(period(10).unwrap(), 10);
        assert_eq!(period(15).unwrap(), 30);
        assert_eq!(period(1).unwrap(), 2);
        assert!(period(0).is_err());
        let d = 0.5f64.sqrt();
        let (_, big) = effective(d, 10).unwrap();
        assert!((big - 0.03125).abs() < 1e-15);
        let (_, big) = effective(d, 15).unwrap();
        assert!((big - 2f64.powi(-15)).abs() < 1e-18);
        assert_eq!(effective(1.0, 7).unwrap(), (1.0, 1.0));
        assert!(effective(1.1, 3).is_err());
    }

    #[test]
    fn params_validate_cycle() {
        assert!(SpectralParams::new(21, 3, 1, 0.3).is_ok());
        assert!(SpectralParams::new(20, 3, 1, 0.3).is_err());
        assert!(SpectralParams::new(21, 3, 3, 0.3).is_err());
    }

    #[test]
    fn adiabatic_closed_form_is_roots_of_unity() {
        let prm = params(21, 3, 1, 0.0);
        let s = closed_form_spectrum(&prm);
        assert_eq!(s.len(), 42);
        for e in &s.entries {
            assert!((e.eigenvalue.powu(6) - 1.0).norm() < 1e-14);
            let k = e.quasi_energy / (TAU / 6.0);
            assert!((k - k.round()).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_form_sums_to_zero() {
        for (cycle, p, q, d) in [(21, 3, 1, 0.3), (25, 5, 1, 0.9), (14, 7, 1, 1.0), (9, 1, 0, 0.5)] {
            let s = closed_form_spectrum(&params(cycle, p, q, d));
            assert!(s.power_sum(1).norm() < 1e-12);
        }
    }

    #[test]
    fn hadamard_momentum_blocks() {
        // p = 1: each block is diag(e^{-ik}, e^{ik}) H; solve its quadratic directly.
        let n = 12;
        let prm = params(n, 1, 0, 0.5f64.sqrt());
        let numeric = numeric_spectrum(&prm).unwrap();
        let mut oracle = Vec::new();
        for j in 0..n {
            let k = TAU * j as f64 / n as f64;
            let h = std::f64::consts::FRAC_1_SQRT_2;
            let tr = Complex64::new(0.0, -2.0 * h * k.sin());
            // det = -1
            let disc = (tr * tr + 4.0).sqrt();
            oracle.push(SpectrumEntry::new(j, None, None, (tr + disc) / 2.0));
            oracle.push(SpectrumEntry::new(j, None, None, (tr - disc) / 2.0));
        }
        let oracle = Spectrum {
            source: SpectrumSource::Numeric,
            entries: oracle,
        };
        assert!(multiset_distance(&numeric, &oracle).unwrap() < 1e-12);
        // sin E = -sin(k)/sqrt 2 for one branch, pi - E for the other.
        let mut sines: Vec<f64> = numeric.quasi_energies().iter().map(|e| e.sin()).collect();
        let mut expect: Vec<f64> = (0..n)
            .flat_map(|j| {
                let s = -(TAU * j as f64 / n as f64).sin() / 2f64.sqrt();
                [s, s]
            })
            .collect();
        sines.sort_by(f64::total_cmp);
        expect.sort_by(f64::total_cmp);
        for (a, b) in sines.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn odd_closed_form_matches_numeric() {
        for (cycle, p, q, d) in [(21, 3, 1, 0.3), (21, 3, 2, 0.7), (25, 5, 2, 1.0), (35, 7, 3, 0.0)] {
            let prm = params(cycle, p, q, d);
            let cf = closed_form_spectrum(&prm);
            assert!(cf.all_unit_modulus());
            let num = numeric_spectrum(&prm).unwrap();
            assert!(multiset_distance(&cf, &num).unwrap() < 1e-8);
        }
    }

    #[test]
    fn printed_even_form_fails_and_corrected_form_holds() {
        let prm = params(24, 4, 1, 0.5);
        let printed = closed_form_spectrum(&prm);
        assert!(!printed.all_unit_modulus());
        let v = validate_closed_form(&prm, &printed);
        assert!(!v.accepted);
        let corrected = closed_form_spectrum_with(&prm, EvenForm::RootOfBracket);
        assert_eq!(corrected.source, SpectrumSource::ClosedFormCorrected);
        assert!(corrected.all_unit_modulus());
        let num = numeric_spectrum(&prm).unwrap();
        assert!(multiset_distance(&corrected, &num).unwrap() < 1e-8);
        let (auth, _) = authoritative_spectrum(&prm).unwrap();
        assert_eq!(auth.source, SpectrumSource::Numeric);
    }

    #[test]
    fn zeta_is_period_power() {
        for (cycle, p) in [(21, 3), (24, 4), (30, 5), (24, 6)] {
            let prm = params(cycle, p, 1, 0.8);
            let s = closed_form_spectrum_with(&prm, EvenForm::RootOfBracket);
            let t = prm.period();
            for e in &s.entries {
                let z = zeta(&prm, e.j, e.u.unwrap());
                assert!((e.eigenvalue.powu(t) - z).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn odd_traces_vanish() {
        let prm = params(12, 3, 1, 0.6);
        let tr = traces(&prm.walk_config(), 7);
        for k in [1, 3, 5, 7] {
            assert!(tr[k - 1].norm() < 1e-14);
        }
    }

    #[test]
    fn trace_moments_accept_odd_closed_form() {
        let prm = params(15, 5, 2, 0.8);
        let rep = trace_moments(&prm, &closed_form_spectrum(&prm), 20);
        assert!(rep.max_residual < 1e-8, "{:?}", rep.residuals);
    }

    #[test]
    fn band_count_odd_and_even() {
        let odd = params(21, 3, 1, 0.1f64.powf(1.0 / 3.0));
        let bands = band_summary(&closed_form_spectrum(&odd).quasi_energies(), 3);
        assert_eq!(bands.bands.len(), 6);
        assert!(bands.diagnostic.is_none());
        assert!(bands.bands.iter().all(|b| b.members == 7));

        let even = params(24, 4, 1, 0.3);
        let bands = band_summary(&numeric_spectrum(&even).unwrap().quasi_energies(), 4);
        assert_eq!(bands.bands.len(), 4);
    }

    #[test]
    fn adiabatic_bands_have_zero_width() {
        let prm = params(21, 3, 1, 0.0);
        let bands = band_summary(&closed_form_spectrum(&prm).quasi_energies(), 3);
        assert_eq!(bands.bands.len(), 6);
        for b in &bands.bands {
            assert!(b.width < 1e-12);
        }
    }

    #[test]
    fn odd_band_width_follows_arcsine_of_sampled_lambda() {
        // Band (u = 0, s = 0) spans arg(z_j0) = -asin(l_j)/p over the sampled l_j.
        let p = 3;
        let d_eff: f64 = 0.1;
        let prm = params(21, p, 1, d_eff.powf(1.0 / 3.0));
        let lam_max = (0..7)
            .map(|j| (d_eff * (PI * 6.0 * j as f64 / 21.0).sin()).asin())
            .fold(f64::MIN, f64::max);
        let lam_min = (0..7)
            .map(|j| (d_eff * (PI * 6.0 * j as f64 / 21.0).sin()).asin())
            .fold(f64::MAX, f64::min);
        let oracle = (lam_max - lam_min) / p as f64;
        let bands = band_summary(&closed_form_spectrum(&prm).quasi_energies(), p);
        for b in &bands.bands {
            assert!((b.width - oracle).abs() < 1e-12, "{} vs {oracle}", b.width);
        }
        let ratio = oracle / heuristic_band_width(p, d_eff);
        assert!((ratio - 0.6216).abs() < 1e-3, "ratio {ratio}");
    }
}
