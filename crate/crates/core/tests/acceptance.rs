//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p ionlink --test acceptance`.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use ionlink::dynamics::{
    analytic_channel_output, apply_flight_channel, default_step, default_time_grid, evolve_unitary,
    integrate_master_equation, lindblad_superoperator, run_protocol, validate_field_states, ChannelSpec,
    CoherenceDecay, RunMode, ValidationThresholds,
};
use ionlink::linalg::{kron, ComplexMatrix, Propagator};
use ionlink::metrics::{
    concurrence, fef_bruteforce_oracle, fully_entangled_fraction, max_flight_time, teleportation_fidelity,
};
use ionlink::model::{EffectiveParams, FieldStateSpec, FullModelParams};
use ionlink::space::{SpaceLayout, StateVector, FLYING, GROUND};
use ionlink::states::{state_after_cavity_a, two_ion_closed_form};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{linspace, random_density, random_hermitian, random_pure_density, random_unitary};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

/// Runs one criterion and prints its line. `limit` is the runtime bound, if
/// the criterion has one.
fn run(id: &str, name: &str, limit: Option<u64>, check: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = check();
    let elapsed = start.elapsed();
    let in_time = limit.is_none_or(|l| elapsed <= Duration::from_secs(l));
    let passed = out.passed && in_time;
    let budget = match limit {
        Some(l) if in_time => format!(" (limit {l} s)"),
        Some(l) => format!(" (limit {l} s, exceeded)"),
        None => String::new(),
    };
    println!(
        "{} criterion {id} {name}: {}; runtime {:.3} s{budget}",
        if passed { "PASS" } else { "FAIL" },
        out.detail,
        elapsed.as_secs_f64(),
    );
    passed
}

/// Fidelity to the Bell state and the flying atom ending in its ground state.
fn ideal_protocol() -> Outcome {
    let r = run_protocol(&EffectiveParams::canonical(1e-4), &ChannelSpec::noiseless(), RunMode::Ideal).unwrap();
    let fidelity = r.fidelity_to_bell();
    let ground = StateVector::basis(r.flying_marginal.layout().clone(), &[GROUND]).unwrap().to_density();
    let marginal_error = r.flying_marginal.max_abs_diff(&ground);
    outcome(
        fidelity >= 1.0 - 1e-10 && marginal_error <= 1e-10,
        format!("1 - fidelity = {:.2e} (<= 1e-10), flying marginal error = {marginal_error:.2e} (<= 1e-10)", 1.0 - fidelity),
    )
}

fn channel_grid() -> Vec<ChannelSpec> {
    let mut specs = Vec::new();
    for &g in &[0.0, 50.0, 100.0, 200.0, 400.0] {
        for &gp in &[0.0, 25.0, 50.0, 100.0, 200.0] {
            for &t in &[0.0, 1e-3, 2.5e-3, 5e-3, 1e-2] {
                specs.push(ChannelSpec::new(g, gp, t));
            }
        }
    }
    specs
}

/// RK4 solution of the flight master equation against the closed-form channel.
fn channel_agreement() -> Outcome {
    let layout = SpaceLayout::protocol();
    let rho0 = state_after_cavity_a().to_density();
    let mut worst: f64 = 0.0;
    for spec in channel_grid() {
        let generator = lindblad_superoperator(&spec, FLYING, &layout).unwrap();
        let t = spec.t_flight;
        let numeric = integrate_master_equation(&rho0, &generator, t, default_step(t)).unwrap();
        let analytic = analytic_channel_output(&spec).unwrap();
        worst = worst.max(numeric.max_abs_diff(&analytic));
    }
    outcome(
        worst <= 1e-7,
        format!("125 points, max elementwise |RK4 - closed form| = {worst:.2e} (<= 1e-7)"),
    )
}

/// The noisy pipeline (RK4 flight, default coherence decay `gamma/2 + gamma_p`)
/// against the printed two-ion family whose coherence decays at
/// `gamma + gamma_p`. The two differ whenever `gamma t_f > 0`; see README.
fn pipeline_agreement() -> Outcome {
    let eff = EffectiveParams::canonical(1e-4);
    let mut worst_printed: f64 = 0.0;
    let mut worst_exact: f64 = 0.0;
    for spec in channel_grid() {
        let r = run_protocol(&eff, &spec, RunMode::NumericNoisy).unwrap();
        let printed = two_ion_closed_form(&spec.with_coherence(CoherenceDecay::FullRate));
        worst_printed = worst_printed.max(r.final_two_ion_state.max_abs_diff(&printed));
        worst_exact = worst_exact.max(r.final_two_ion_state.max_abs_diff(&two_ion_closed_form(&spec)));
    }
    outcome(
        worst_printed <= 1e-7,
        format!(
            "125 points, max elementwise |pipeline - full-rate family| = {worst_printed:.2e} (<= 1e-7); \
             against the trace-preserving solution of the same equation {worst_exact:.2e}"
        ),
    )
}

/// Spectral metrics on the full-rate X-state family against closed forms.
fn metrics_closed_forms() -> Outcome {
    let (mut c_err, mut f_err, mut oracle_err): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut teleport_exact = true;
    let mut seed = 0;
    for &g in &linspace(0.0, 400.0, 10) {
        for &gp in &linspace(0.0, 200.0, 10) {
            for &t in &linspace(0.0, 1e-2, 10) {
                let spec = ChannelSpec::new(g, gp, t).with_coherence(CoherenceDecay::FullRate);
                let rho = two_ion_closed_form(&spec);
                let c = concurrence(&rho).unwrap();
                let f = fully_entangled_fraction(&rho).unwrap();
                let expected_c = (-(g + gp) * t).exp();
                let expected_f = (1.0 + (-g * t).exp() + 2.0 * (-(g + gp) * t).exp()) / 4.0;
                c_err = c_err.max((c - expected_c).abs());
                f_err = f_err.max((f - expected_f).abs());
                seed += 1;
                let oracle = fef_bruteforce_oracle(&rho, 1000, seed).unwrap();
                oracle_err = oracle_err.max((oracle - f).abs());
                teleport_exact &= teleportation_fidelity(f).unwrap() == (2.0 * f + 1.0) / 3.0;
            }
        }
    }
    outcome(
        c_err <= 1e-9 && f_err <= 1e-9 && oracle_err <= 1e-4 && teleport_exact,
        format!(
            "1000 points, concurrence error {c_err:.2e} (<= 1e-9), FEF error {f_err:.2e} (<= 1e-9), \
             |oracle - spectral| {oracle_err:.2e} (<= 1e-4), teleportation fidelity exact: {teleport_exact}"
        ),
    )
}

fn bounds() -> Outcome {
    let ln3 = 3f64.ln();
    let ln2 = 2f64.ln();
    let mut worst: f64 = 0.0;
    for &g in &[1.0, 37.0, 200.0, 1e4] {
        worst = worst.max((max_flight_time(g, 0.0, None).unwrap().t_max * g / ln3 - 1.0).abs());
        worst = worst.max((max_flight_time(g, g, None).unwrap().t_max * g / ln2 - 1.0).abs());
    }
    let b = max_flight_time(200.0, 0.0, Some(300.0)).unwrap();
    let ms = b.t_max * 1e3;
    let metres = b.distance_max.unwrap();
    let rounded_ok = (ms * 1e3).round() == 5493.0 && (metres * 1e3).round() == 1648.0;
    outcome(
        worst <= 1e-10 && rounded_ok,
        format!(
            "max relative error against ln3/gamma and ln2/gamma {worst:.2e} (<= 1e-10); \
             gamma = 200/s gives t_max = {ms:.3} ms and {metres:.3} m at 300 m/s (expected 5.493 ms, 1.648 m)"
        ),
    )
}

fn effective_model_validation() -> Outcome {
    let p = FullModelParams::matched(2.0 * std::f64::consts::PI * 1e4, 20.0, 0.05, 10.0);
    let n = p.n_field_max;
    let fields = [
        FieldStateSpec::fock(0, n),
        FieldStateSpec::fock(1, n),
        FieldStateSpec::fock(2, n),
        FieldStateSpec::thermal(0.5, n),
    ];
    let report = validate_field_states(&p, &fields, &default_time_grid(&p), ValidationThresholds::default()).unwrap();
    let fmt = |x: Option<f64>| x.map_or("undefined".to_string(), |v| format!("{v:.2e}"));
    outcome(
        report.passed(),
        format!(
            "dims {}x{}, max frequency deviation {} (<= 0.05), spread {} (<= 0.05), \
             vibrational leakage {:.2e} (<= 1e-3), min peak transfer {:.4} (>= 0.95)",
            n + 1,
            p.n_vib_max + 1,
            fmt(report.max_deviation),
            fmt(report.frequency_spread),
            report.max_vib_leakage,
            report.min_peak_transfer,
        ),
    )
}

fn invariant_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut failures = Vec::new();
    let protocol = SpaceLayout::protocol();
    let pair = SpaceLayout::ion_pair();

    // trace, Hermiticity and positivity under unitary evolution and the channel
    let mut state_ok = true;
    for k in 0..30 {
        let rho = random_density(protocol.clone(), &mut rng);
        let h = random_hermitian(8, &mut rng);
        state_ok &= evolve_unitary(&rho, &h, 0.3 * k as f64).and_then(|r| r.validate()).is_ok();
        let spec = ChannelSpec::new(50.0 * (k % 5) as f64, 20.0 * (k % 3) as f64, 1e-3 * k as f64);
        state_ok &= apply_flight_channel(&rho, &spec, FLYING).and_then(|r| r.validate()).is_ok();
        let gen = lindblad_superoperator(&spec, FLYING, &protocol).unwrap();
        let t = spec.t_flight;
        state_ok &= integrate_master_equation(&rho, &gen, t, default_step(t)).and_then(|r| r.validate()).is_ok();
    }
    if !state_ok {
        failures.push("state preservation");
    }

    // metrics invariant under local unitaries
    let mut local_err: f64 = 0.0;
    for k in 0..40 {
        let rho = if k % 2 == 0 {
            random_density(pair.clone(), &mut rng)
        } else {
            random_pure_density(pair.clone(), &mut rng)
        };
        let u = kron(&random_unitary(2, &mut rng), &random_unitary(2, &mut rng));
        let moved = rho.conjugate_by(&u).unwrap();
        local_err = local_err.max((concurrence(&rho).unwrap() - concurrence(&moved).unwrap()).abs());
        local_err = local_err.max(
            (fully_entangled_fraction(&rho).unwrap() - fully_entangled_fraction(&moved).unwrap()).abs(),
        );
    }
    if local_err > 1e-8 {
        failures.push("local-unitary invariance");
    }

    // pure dephasing leaves populations alone
    let mut dephasing_err: f64 = 0.0;
    for k in 0..10 {
        let rho = random_density(protocol.clone(), &mut rng);
        let spec = ChannelSpec::new(0.0, 100.0 * (k + 1) as f64, 5e-3);
        let gen = lindblad_superoperator(&spec, FLYING, &protocol).unwrap();
        let out = integrate_master_equation(&rho, &gen, spec.t_flight, default_step(spec.t_flight)).unwrap();
        for i in 0..8 {
            dephasing_err = dephasing_err.max((out.matrix()[(i, i)] - rho.matrix()[(i, i)]).norm());
        }
    }
    if dephasing_err > 1e-10 {
        failures.push("pure-dephasing populations");
    }

    // exp(-iHs) exp(-iHt) = exp(-iH(s+t)), unitary
    let mut group_err: f64 = 0.0;
    for _ in 0..20 {
        let prop = Propagator::new(&random_hermitian(6, &mut rng)).unwrap();
        let (s, t) = (1.3, -0.4);
        group_err = group_err.max((&prop.at(s) * &prop.at(t)).max_abs_diff(&prop.at(s + t)));
        let u = prop.at(s);
        group_err = group_err.max((&u * &u.dagger()).max_abs_diff(&ComplexMatrix::identity(6)));
    }
    if group_err > 1e-10 {
        failures.push("unitary group property");
    }

    outcome(
        failures.is_empty(),
        format!(
            "state preservation ok: {state_ok}, local-unitary metric drift {local_err:.2e} (<= 1e-8), \
             dephasing population drift {dephasing_err:.2e} (<= 1e-10), group property error {group_err:.2e} (<= 1e-10)"
        ),
    )
}

fn main() -> ExitCode {
    let results = [
        run("1", "ideal protocol", Some(1), ideal_protocol),
        run("2a", "master equation vs closed-form channel", Some(30), channel_agreement),
        run("2b", "noisy pipeline vs full-rate two-ion family", Some(30), pipeline_agreement),
        run("3", "metric closed forms", None, metrics_closed_forms),
        run("4", "flight-time bound", Some(1), bounds),
        run("5", "effective-model validation", Some(120), effective_model_validation),
        run("6", "invariant suites", None, invariant_suites),
    ];
    let failed = results.iter().filter(|&&ok| !ok).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
