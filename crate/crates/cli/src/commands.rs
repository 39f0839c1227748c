//! One function per subcommand, each returning a [`Report`].

use gcqw_core::analytics::{
    ballistic_slope, effective_probability, find_recurrences, predict_pkt, predict_pt,
    predict_sigma, sigma_max, tau, DEFAULT_PERFECT_THRESHOLD,
};
use gcqw_core::bloch::{closed_form_bloch, continuum_period, integrate_coupled_modes, CoupledModeParams};
use gcqw_core::phase::signed_position;
use gcqw_core::spectral::{
    closed_form_spectrum, closed_form_spectrum_with, multiset_distance, numeric_spectrum, period,
    validate_closed_form, EvenForm, SpectralParams, Spectrum, UNIT_MODULUS_TOLERANCE,
};
use gcqw_core::{
    auto_cycle_length, evolve, CoinSpec, CoinVariant, InitialState, Observers, PhaseProfile,
    WalkConfig, WalkState,
};
use rayon::prelude::*;
use serde_json::json;

use crate::args::{
    BlochCompareArgs, CoinArg, EvolveArgs, InitialArg, LocalizationArgs, MultiRecurrenceArgs,
    RecurrenceSweepArgs, SigmaDynamicsArgs, SourceArg, SpectrumArgs, WalkArgs,
};
use crate::error::{CliError, ErrorKind};
use crate::report::{Cell, Report};

/// Largest working set a single walk may allocate.
pub const MEMORY_BUDGET_BYTES: usize = 1 << 30;
/// Bytes per site: state and scratch buffers, two coin components each,
/// plus one probability per site for the distribution.
const BYTES_PER_SITE: usize = 2 * 2 * 16 + 8;
/// Allowed `| |psi|^2 - 1 |` at the end of a run.
pub const NORM_GATE: f64 = 1e-10;

pub fn max_cycle() -> usize {
    MEMORY_BUDGET_BYTES / BYTES_PER_SITE
}

/// Largest `t_max` whose automatic cycle length fits the budget.
pub fn suggested_t_max(cell: usize) -> usize {
    let cells = max_cycle() / cell;
    (cells * cell).saturating_sub(4) / 2
}

fn resolve_cycle(requested: Option<usize>, cell: usize, t_max: usize) -> Result<usize, CliError> {
    let cycle = requested.unwrap_or_else(|| auto_cycle_length(cell, t_max));
    if cycle > max_cycle() {
        let suggestion = suggested_t_max(cell);
        return Err(CliError::new(
            ErrorKind::Budget,
            "memory_budget",
            format!(
                "N = {cycle} exceeds the {} MiB budget (at most {} sites); try --t-max {suggestion}",
                MEMORY_BUDGET_BYTES >> 20,
                max_cycle()
            ),
        )
        .with_detail(json!({
            "N": cycle,
            "max_N": max_cycle(),
            "suggested_t_max": suggestion,
        })));
    }
    Ok(cycle)
}

fn initial_state(initial: Option<&InitialArg>) -> InitialState {
    initial.map_or_else(InitialState::default, InitialArg::state)
}

fn describe_initial(initial: Option<&InitialArg>) -> String {
    initial.map_or_else(|| "0:1,0,0,0".to_string(), InitialArg::describe)
}

fn coin_name(c: CoinArg) -> &'static str {
    match c {
        CoinArg::Standard => "standard",
        CoinArg::Symmetric => "symmetric",
    }
}

fn norm_gate(state: &WalkState) -> Result<(), CliError> {
    let drift = (state.norm_sqr() - 1.0).abs();
    if drift > NORM_GATE {
        return Err(CliError::new(
            ErrorKind::Validation,
            "norm_drift",
            format!("norm drifted by {drift:e} at t = {}", state.t()),
        )
        .with_detail(json!({ "drift": drift, "limit": NORM_GATE, "t": state.t() })));
    }
    Ok(())
}

fn walk_args_params(report: &mut Report, walk: &WalkArgs, cycle: usize) {
    report
        .param("N", cycle)
        .param("coin", coin_name(walk.coin))
        .param("initial", describe_initial(walk.initial.as_ref()));
}

fn config(
    cycle: usize,
    big_d: f64,
    variant: CoinVariant,
    phase: PhaseProfile,
    initial: Option<&InitialArg>,
) -> Result<WalkConfig, CliError> {
    let coin = CoinSpec::from_probability(big_d, variant)?;
    Ok(WalkConfig::with_initial(cycle, coin, phase, initial_state(initial))?)
}

/// Index of the first interior local minimum.
pub fn first_local_minimum(values: &[f64]) -> Option<usize> {
    (1..values.len().saturating_sub(1)).find(|&k| values[k] < values[k - 1] && values[k] <= values[k + 1])
}

pub fn recurrence_sweep(a: &RecurrenceSweepArgs) -> Result<Report, CliError> {
    let t = period(a.p)? as usize;
    let phase = PhaseProfile::harmonic(a.q, a.p)?;
    let cycle = resolve_cycle(a.walk.n, a.p as usize, t)?;
    let grid = a.big_d.sorted();
    let rows: Vec<(f64, f64, f64)> = grid
        .par_iter()
        .map(|&big_d| {
            let cfg = config(cycle, big_d, a.walk.coin.into(), phase.clone(), a.walk.initial.as_ref())?;
            let obs = evolve(&cfg, t, &Observers::default().return_probability(t))?;
            norm_gate(obs.final_state.as_ref().expect("final state"))?;
            let sim = *obs.return_probability.values.last().expect("P(T) recorded");
            Ok((big_d, sim, predict_pt(big_d, a.p)?))
        })
        .collect::<Result<_, CliError>>()?;

    let mut report = Report::new("recurrence-sweep", &["D", "P_T_simulated", "P_T_formula"]);
    report.param("p", a.p).param("q", a.q).param("T", t);
    walk_args_params(&mut report, &a.walk, cycle);
    report.param("D", format!("{:?}", grid));
    let max_err = rows.iter().map(|r| (r.1 - r.2).abs()).fold(0.0, f64::max);
    report.summary("max_abs_error", max_err);
    for (d, sim, formula) in rows {
        report.push(vec![d.into(), sim.into(), formula.into()]);
    }
    Ok(report)
}

pub fn multi_recurrence(a: &MultiRecurrenceArgs) -> Result<Report, CliError> {
    let t = period(a.p)? as usize;
    let t_max = t * a.k_max as usize;
    let phase = PhaseProfile::harmonic(a.q, a.p)?;
    let cycle = resolve_cycle(a.walk.n, a.p as usize, t_max)?;
    let cfg = config(cycle, a.big_d, a.walk.coin.into(), phase, a.walk.initial.as_ref())?;
    let obs = evolve(&cfg, t_max, &Observers::default().return_probability(t))?;
    norm_gate(obs.final_state.as_ref().expect("final state"))?;
    let sim = obs.return_probability.values;
    let formula: Vec<f64> = (0..=a.k_max)
        .map(|k| predict_pkt(a.big_d, a.p, k))
        .collect::<Result<_, _>>()?;

    let mut report = Report::new("multi-recurrence", &["k", "P_kT_simulated", "P_kT_formula"]);
    report
        .param("p", a.p)
        .param("q", a.q)
        .param("D", a.big_d)
        .param("T", t)
        .param("k_max", a.k_max);
    walk_args_params(&mut report, &a.walk, cycle);
    let max_err = sim.iter().zip(&formula).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    report
        .summary("max_abs_error", max_err)
        .summary("first_minimum_simulated", first_local_minimum(&sim))
        .summary("first_minimum_formula", first_local_minimum(&formula));
    for (k, (s, f)) in sim.iter().zip(&formula).enumerate() {
        report.push(vec![k.into(), (*s).into(), (*f).into()]);
    }
    Ok(report)
}

pub fn sigma_dynamics(a: &SigmaDynamicsArgs) -> Result<Report, CliError> {
    let phase = PhaseProfile::harmonic(a.q, a.p)?;
    let cycle = resolve_cycle(a.walk.n, a.p as usize, a.t_max)?;
    let cfg = config(cycle, a.big_d, a.walk.coin.into(), phase, a.walk.initial.as_ref())?;
    let mut observers = Observers::default().sigma(a.every);
    if a.with_return {
        observers = observers.return_probability(a.every);
    }
    let obs = evolve(&cfg, a.t_max, &observers)?;
    norm_gate(obs.final_state.as_ref().expect("final state"))?;

    let mut columns = vec!["t", "sigma_simulated", "sigma_ballistic_formula"];
    if a.with_return {
        columns.push("P_simulated");
    }
    let mut report = Report::new("sigma-dynamics", &columns);
    report
        .param("p", a.p)
        .param("q", a.q)
        .param("D", a.big_d)
        .param("t_max", a.t_max)
        .param("every", a.every);
    walk_args_params(&mut report, &a.walk, cycle);

    let late: Vec<f64> = obs
        .sigma
        .iter()
        .filter(|&(t, _)| t > 0.0 && 4.0 * t >= 3.0 * a.t_max as f64)
        .map(|(t, s)| s / t)
        .collect();
    let late_slope = if late.is_empty() {
        None
    } else {
        Some(late.iter().sum::<f64>() / late.len() as f64)
    };
    let big_d_eff = effective_probability(a.big_d, a.p)?;
    report
        .summary("tau", tau(a.big_d, a.p)?.steps())
        .summary("ballistic_slope", ballistic_slope(big_d_eff))
        .summary("late_slope", late_slope);
    for (i, (t, s)) in obs.sigma.iter().enumerate() {
        let mut row = vec![Cell::from(t as usize), s.into(), predict_sigma(a.big_d, a.p, t)?.into()];
        if a.with_return {
            row.push(obs.return_probability.values[i].into());
        }
        report.push(row);
    }
    Ok(report)
}

fn spectrum_rows(report: &mut Report, d: f64, big_d_eff: f64, spectrum: &Spectrum) {
    let mut entries: Vec<_> = spectrum.entries.iter().collect();
    entries.sort_by(|x, y| {
        x.quasi_energy
            .total_cmp(&y.quasi_energy)
            .then(x.j.cmp(&y.j))
            .then(x.u.cmp(&y.u))
            .then(x.s.cmp(&y.s))
    });
    for e in entries {
        report.push(vec![
            d.into(),
            big_d_eff.into(),
            e.j.into(),
            e.u.map(u32::from).into(),
            e.s.into(),
            e.quasi_energy.into(),
            e.eigenvalue.norm().into(),
            spectrum.source.as_str().into(),
        ]);
    }
}

struct SpectrumPoint {
    d: f64,
    big_d_eff: f64,
    spectra: Vec<Spectrum>,
    closed_accepted: bool,
    closed_defect: f64,
    closed_trace: f64,
    distance: Option<f64>,
}

fn unit_modulus_gate(spectrum: &Spectrum, d: f64) -> Result<(), CliError> {
    let defect = spectrum.max_modulus_defect();
    if defect > UNIT_MODULUS_TOLERANCE {
        return Err(CliError::new(
            ErrorKind::Validation,
            "unit_modulus",
            format!("{} spectrum at d = {d} leaves the unit circle by {defect:e}", spectrum.source.as_str()),
        )
        .with_detail(json!({ "d": d, "max_modulus_defect": defect, "source": spectrum.source.as_str() })));
    }
    Ok(())
}

fn spectrum_point(a: &SpectrumArgs, d: f64) -> Result<SpectrumPoint, CliError> {
    let params = SpectralParams::new(a.n, a.p, a.q, d)?;
    let closed = match a.source {
        SourceArg::ClosedFormCorrected => closed_form_spectrum_with(&params, EvenForm::RootOfBracket),
        _ => closed_form_spectrum(&params),
    };
    let validation = validate_closed_form(&params, &closed);
    let mut point = SpectrumPoint {
        d,
        big_d_eff: params.big_d_eff(),
        spectra: Vec::new(),
        closed_accepted: validation.accepted,
        closed_defect: validation.max_modulus_defect,
        closed_trace: validation.trace.max_residual,
        distance: None,
    };
    let reject = || {
        CliError::new(
            ErrorKind::Validation,
            "closed_form_rejected",
            format!("closed form failed validation at d = {d}"),
        )
        .with_detail(json!({
            "d": d,
            "max_modulus_defect": validation.max_modulus_defect,
            "max_trace_residual": validation.trace.max_residual,
        }))
    };
    match a.source {
        SourceArg::ClosedForm | SourceArg::ClosedFormCorrected => {
            if !validation.accepted {
                return Err(reject());
            }
            point.spectra.push(closed);
        }
        SourceArg::Numeric => {
            let numeric = numeric_spectrum(&params)?;
            unit_modulus_gate(&numeric, d)?;
            point.spectra.push(numeric);
        }
        SourceArg::Auto => {
            if validation.accepted {
                point.spectra.push(closed);
            } else {
                let numeric = numeric_spectrum(&params)?;
                unit_modulus_gate(&numeric, d)?;
                point.spectra.push(numeric);
            }
        }
        SourceArg::Both => {
            let numeric = numeric_spectrum(&params)?;
            unit_modulus_gate(&numeric, d)?;
            point.distance = Some(multiset_distance(&closed, &numeric)?);
            point.spectra.push(closed);
            point.spectra.push(numeric);
        }
    }
    Ok(point)
}

pub fn spectrum(a: &SpectrumArgs) -> Result<Report, CliError> {
    let grid: Vec<f64> = match &a.big_d {
        Some(g) => g
            .sorted()
            .into_iter()
            .map(|big_d| {
                if (0.0..=1.0).contains(&big_d) {
                    Ok(big_d.sqrt())
                } else {
                    Err(CliError::parameter(format!("D = {big_d} is outside [0, 1]")))
                }
            })
            .collect::<Result<_, _>>()?,
        None => a.d.sorted(),
    };
    let points: Vec<SpectrumPoint> = grid
        .par_iter()
        .map(|&d| spectrum_point(a, d))
        .collect::<Result<_, _>>()?;

    let mut report = Report::new(
        "spectrum",
        &["d", "D_eff", "j", "u", "s", "quasi_energy", "modulus", "source"],
    );
    let source = match a.source {
        SourceArg::Auto => "auto",
        SourceArg::ClosedForm => "closed_form",
        SourceArg::ClosedFormCorrected => "closed_form_corrected",
        SourceArg::Numeric => "numeric",
        SourceArg::Both => "both",
    };
    report
        .param("p", a.p)
        .param("q", a.q)
        .param("N", a.n)
        .param("T", period(a.p)?)
        .param("d", format!("{:?}", grid))
        .param("source", source);
    let rejected: Vec<f64> = points.iter().filter(|p| !p.closed_accepted).map(|p| p.d).collect();
    report
        .summary("closed_form_rejected_at_d", rejected)
        .summary(
            "closed_form_max_modulus_defect",
            points.iter().map(|p| p.closed_defect).fold(0.0, f64::max),
        )
        .summary(
            "closed_form_max_trace_residual",
            points.iter().map(|p| p.closed_trace).fold(0.0, f64::max),
        );
    if a.source == SourceArg::Both {
        report.summary(
            "max_multiset_distance",
            points.iter().filter_map(|p| p.distance).fold(0.0, f64::max),
        );
    }
    for point in &points {
        for s in &point.spectra {
            spectrum_rows(&mut report, point.d, point.big_d_eff, s);
        }
    }
    Ok(report)
}

pub fn bloch_compare(a: &BlochCompareArgs) -> Result<Report, CliError> {
    let (phase, cell) = match a.phi {
        Some(phi) => (PhaseProfile::irrational(phi), 1),
        None => (PhaseProfile::harmonic(a.q, a.p)?, a.p as usize),
    };
    let slope = phase.slope().expect("linear profile");
    let cycle = resolve_cycle(a.n, cell, a.t_max)?;
    let cfg = config(cycle, a.big_d, a.coin.into(), phase, a.initial.as_ref())?;
    let d = cfg.coin().d();
    let t_tilde = continuum_period(slope);

    let obs = evolve(&cfg, a.t_max, &Observers::default().return_probability(1))?;
    norm_gate(obs.final_state.as_ref().expect("final state"))?;

    // land on integer times exactly
    let mut ode = CoupledModeParams::new(slope, d, a.t_max as f64);
    let per_unit = (1.0 / ode.resolved_dt()).ceil() as usize;
    ode.dt = Some(1.0 / per_unit as f64);
    ode.record_every = per_unit;
    if slope == 0.0 {
        ode.n_max = Some((d * a.t_max as f64).ceil() as usize + 20);
    }
    let run = integrate_coupled_modes(&ode)?;

    let mut report = Report::new("bloch-compare", &["t", "P_discrete", "P_ode", "P_closed_form"]);
    report
        .param("D", a.big_d)
        .param("d", d)
        .param("phi", slope)
        .param("T_tilde", t_tilde)
        .param("t_max", a.t_max)
        .param("N", cycle)
        .param("coin", coin_name(a.coin))
        .param("initial", describe_initial(a.initial.as_ref()));
    if a.phi.is_none() {
        report.param("p", a.p).param("q", a.q);
    }

    let mut dev_discrete = 0.0f64;
    let mut dev_ode = 0.0f64;
    for (t, p_disc) in obs.return_probability.iter() {
        let ti = t as usize;
        if ti % 2 != 0 {
            continue;
        }
        let p_ode = run.series.values[ti];
        let p_closed = closed_form_bloch(d, t_tilde, t);
        dev_discrete = dev_discrete.max((p_disc - p_closed).abs());
        dev_ode = dev_ode.max((p_ode - p_closed).abs());
        report.push(vec![ti.into(), p_disc.into(), p_ode.into(), p_closed.into()]);
    }
    let events = if t_tilde.is_finite() {
        find_recurrences(&obs.return_probability, t_tilde, DEFAULT_PERFECT_THRESHOLD).events
    } else {
        Vec::new()
    };
    report
        .summary("max_dev_discrete_closed_form", dev_discrete)
        .summary("max_dev_ode_closed_form", dev_ode)
        .summary("ode_dt", run.dt)
        .summary("ode_n_max", run.n_max)
        .summary("ode_norm_drift", run.max_norm_drift)
        .summary("ode_step_doubling_delta", run.step_doubling_delta)
        .summary("recurrences", serde_json::to_value(&events).expect("events serialize"));
    Ok(report)
}

pub fn localization(a: &LocalizationArgs) -> Result<Report, CliError> {
    let cycle = resolve_cycle(a.walk.n, 1, a.t_max)?;
    let cfg = config(
        cycle,
        a.big_d,
        a.walk.coin.into(),
        PhaseProfile::irrational(a.phi),
        a.walk.initial.as_ref(),
    )?;
    let obs = evolve(&cfg, a.t_max, &Observers::default().sigma(1))?;
    norm_gate(obs.final_state.as_ref().expect("final state"))?;
    let t_tilde = continuum_period(a.phi);
    let max_sigma = obs.sigma.max_value().unwrap_or(0.0);
    let first_half = obs
        .sigma
        .window(0.0, (a.t_max / 2) as f64)
        .max_value()
        .unwrap_or(0.0);

    let mut report = Report::new("localization", &["t", "sigma"]);
    report
        .param("D", a.big_d)
        .param("phi", a.phi)
        .param("T_tilde", t_tilde)
        .param("t_max", a.t_max);
    walk_args_params(&mut report, &a.walk, cycle);
    let drift = if first_half > 0.0 {
        Some(max_sigma / first_half - 1.0)
    } else {
        None
    };
    report
        .summary("max_sigma", max_sigma)
        .summary("sigma_max_formula", sigma_max(a.big_d, t_tilde)?)
        .summary("max_sigma_first_half", first_half)
        .summary("running_max_drift", drift);
    for (t, s) in obs.sigma.iter() {
        report.push(vec![(t as usize).into(), s.into()]);
    }
    Ok(report)
}

pub fn evolve_dump(a: &EvolveArgs) -> Result<Report, CliError> {
    let big_d = match (a.big_d, a.d) {
        (Some(x), _) => x,
        (None, Some(d)) => d * d,
        (None, None) => 0.5,
    };
    let (phase, cell) = match a.phi {
        Some(phi) => (PhaseProfile::irrational(phi), 1),
        None => (PhaseProfile::harmonic(a.q, a.p)?, a.p as usize),
    };
    let cycle = resolve_cycle(a.walk.n, cell, a.t_max)?;
    let cfg = config(cycle, big_d, a.walk.coin.into(), phase, a.walk.initial.as_ref())?;
    let origin = cfg.initial().reference_site();
    let op = cfg.operator();
    let every = a.every.max(1);

    let mut report = Report::new("evolve", &["t", "n", "x", "c", "re", "im"]);
    report.param("D", big_d);
    match a.phi {
        Some(phi) => report.param("phi", phi),
        None => report.param("p", a.p).param("q", a.q),
    };
    report.param("t_max", a.t_max).param("every", every);
    walk_args_params(&mut report, &a.walk, cycle);

    let mut state = cfg.initial_state();
    for t in 0..=a.t_max {
        if t > 0 {
            op.advance(&mut state, 1)?;
        }
        if t % every == 0 || t == a.t_max {
            for n in 0..cycle {
                let x = signed_position((n + cycle - origin) % cycle, cycle);
                for c in 0..2 {
                    let amp = state.amplitude(c, n);
                    report.push(vec![t.into(), n.into(), x.into(), c.into(), amp.re.into(), amp.im.into()]);
                }
            }
        }
    }
    norm_gate(&state)?;
    report.summary("final_norm", state.norm_sqr());
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn local_minimum() {
        assert_eq!(first_local_minimum(&[1.0, 0.5, 0.2, 0.3, 0.1]), Some(2));
        assert_eq!(first_local_minimum(&[1.0, 2.0, 3.0]), None);
        assert_eq!(first_local_minimum(&[]), None);
    }

    #[test]
    fn budget_suggestion_fits() {
        for cell in [1, 15, 16] {
            let t = suggested_t_max(cell);
            assert!(auto_cycle_length(cell, t) <= max_cycle());
            assert!(auto_cycle_length(cell, t + cell) > max_cycle());
        }
    }

    #[test]
    fn over_budget_is_reported() {
        let err = resolve_cycle(None, 16, 1 << 40).unwrap_err();
        assert_eq!(err.kind, ErrorKind::Budget);
        assert!(err.detail["suggested_t_max"].as_u64().unwrap() > 0);
    }
}
