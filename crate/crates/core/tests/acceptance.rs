//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits nonzero if any criterion fails.

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use qmeasure::analysis::{
    extract_phase, run_pipeline, significance, synthesize_traces, theoretical_measure,
    transmittance, BootstrapConfig, NoiseModel, PipelineConfig, Scenario, SigmaConvention, Summary,
};
use qmeasure::optics::{Polarization, SplitterSpec, PATH_A, PATH_C, PATH_L, PATH_U, PORT_PM};
use qmeasure::{
    build_dsi_filter, is_serial, BeamsplitterParams, DsiParams, Event, History, HistorySpace,
    HopperModel, ModeState, StepRole,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EXACT: f64 = 1e-12;
const FILTER_TOL: f64 = 1e-9;
const ORACLE_CASES: usize = 1000;
const UNITARITY_CASES: usize = 1000;
const FILTER_CASES: usize = 100;
const IDEAL_RUNTIME: Duration = Duration::from_millis(1);
const PIPELINE_RUNTIME: Duration = Duration::from_secs(60);
const PLAUSIBLE_MEDIAN: (f64, f64) = (1.17, 1.22);
const FIXTURE_TOL: f64 = 0.005;
const QUOTED_ETA: f64 = 0.9356;
const ETA_ROUNDING: f64 = 1e-4;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn ev(items: &[&str]) -> Event {
    Event::parse(items).unwrap()
}

fn random_model(rng: &mut ChaCha8Rng, lossless: bool) -> HopperModel {
    let n = rng.gen_range(1..=4);
    let steps = (0..n)
        .map(|_| {
            let phi = if lossless {
                if rng.gen() {
                    FRAC_PI_2
                } else {
                    -FRAC_PI_2
                }
            } else {
                rng.gen_range(-PI..PI)
            };
            BeamsplitterParams::from_transmission(rng.gen_range(0.0..=1.0), phi).unwrap()
        })
        .collect();
    let roles = (0..n)
        .map(|_| {
            if rng.gen() {
                StepRole::ReflectKeeps
            } else {
                StepRole::ReflectSwitches
            }
        })
        .collect();
    HopperModel::new(steps)
        .unwrap()
        .with_role_table(roles)
        .unwrap()
}

fn ideal_measure() -> Outcome {
    let e = ev(&["00", "01", "11"]);
    let start = Instant::now();
    let mu = HopperModel::ideal().measure(&e).unwrap();
    let elapsed = start.elapsed();
    check(
        (mu - 1.25).abs() <= EXACT && elapsed < IDEAL_RUNTIME,
        format!("mu = {mu}, {elapsed:?}"),
    )
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..ORACLE_CASES {
        let m = random_model(&mut rng, false);
        let space = m.history_space().unwrap();
        let members: Vec<History> = space
            .histories()
            .iter()
            .filter(|_| rng.gen())
            .copied()
            .collect();
        let e = Event::new(members).unwrap();
        worst = worst.max((m.measure(&e).unwrap() - m.measure_oracle(&e).unwrap()).abs());
    }
    check(
        worst <= EXACT,
        format!("{ORACLE_CASES} cases, max deviation {worst:e}"),
    )
}

fn unitarity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..UNITARITY_CASES {
        let m = random_model(&mut rng, true);
        let omega = m.history_space().unwrap().full_event();
        worst = worst.max((m.measure(&omega).unwrap() - 1.0).abs());
    }
    check(
        worst <= EXACT,
        format!("{UNITARITY_CASES} cases, max |mu(Omega) - 1| {worst:e}"),
    )
}

fn filter_consistency() -> Outcome {
    let pm = |p: &DsiParams| build_dsi_filter(p).unwrap().port_powers(&[]).unwrap()[PORT_PM];
    let ideal = pm(&DsiParams::ideal());
    let e = ev(&["00", "01", "11"]);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for _ in 0..FILTER_CASES {
        let t_frac: f64 = rng.gen_range(0.05..0.95);
        let phi = rng.gen_range(-PI..PI);
        let eta = rng.gen_range(0.5..=1.0);
        let params = DsiParams {
            bs1: SplitterSpec::with_ratio(t_frac, phi, eta),
            ..DsiParams::ideal()
        };
        let step = BeamsplitterParams::from_transmission(t_frac.sqrt(), phi).unwrap();
        let model = HopperModel::new(vec![step, step])
            .unwrap()
            .with_role_table(vec![StepRole::ReflectSwitches; 2])
            .unwrap();
        let from_filter = 2.0 * pm(&params) / (eta * eta);
        worst = worst.max((from_filter - model.measure(&e).unwrap()).abs());
    }
    check(
        (ideal - 0.625).abs() <= EXACT && worst <= FILTER_TOL,
        format!("P_E/P_I = {ideal}, {FILTER_CASES} cases, max deviation {worst:e}"),
    )
}

fn state_checkpoints() -> Outcome {
    use Polarization::{H, V};
    let c = Complex64::new;
    let s = FRAC_1_SQRT_2;
    let mut worst = 0.0f64;
    for phase_g in [0.0, 0.9, -2.4] {
        let circuit = build_dsi_filter(&DsiParams::ideal().with_phase(phase_g)).unwrap();
        let g = Complex64::from_polar(1.0, phase_g);

        let mut psi1 = ModeState::new();
        psi1.set(PATH_A, H, c(s, 0.0));
        psi1.set(PATH_C, H, c(0.0, s));
        worst = worst.max(
            circuit
                .state_after("bs1_pass1", &[])
                .unwrap()
                .max_abs_diff(&psi1),
        );

        let mut psi2 = ModeState::new();
        psi2.set(PATH_A, H, g * s);
        psi2.set(PATH_C, V, c(0.0, s));
        worst = worst.max(
            circuit
                .state_before("bs1_pass2", &[])
                .unwrap()
                .max_abs_diff(&psi2),
        );

        let mut psi3 = ModeState::new();
        psi3.set(PATH_U, H, g * 0.5);
        psi3.set(PATH_U, V, c(-0.5, 0.0));
        psi3.set(PATH_L, H, g * c(0.0, 0.5));
        psi3.set(PATH_L, V, c(0.0, 0.5));
        worst = worst.max(
            circuit
                .state_after("bs1_pass2", &[])
                .unwrap()
                .max_abs_diff(&psi3),
        );
    }
    check(
        worst <= EXACT,
        format!("max componentwise deviation {worst:e}"),
    )
}

fn phase_formula() -> Outcome {
    let (i1, i2): (f64, f64) = (0.31, 0.17);
    let amp = 2.0 * (i1 * i2).sqrt();
    let limits = [
        extract_phase(i1 + i2 + amp, i1, i2).unwrap(),
        extract_phase(i1 + i2, i1, i2).unwrap(),
        extract_phase(i1 + i2 - amp, i1, i2).unwrap(),
    ];
    let limits_ok = limits == [Some(0.0), Some(FRAC_PI_2), Some(PI)];
    let mut worst = 0.0f64;
    for k in 0..64 {
        let phi = k as f64 * PI / 63.0;
        let got = extract_phase(i1 + i2 + amp * phi.cos(), i1, i2).unwrap();
        worst = worst.max(got.map_or(f64::INFINITY, |g| (g - phi).abs()));
    }
    check(
        limits_ok && worst <= EXACT,
        format!("limits {limits:?}, 64-point sweep max deviation {worst:e}"),
    )
}

fn pipeline_round_trip() -> Outcome {
    let start = Instant::now();
    let cfg = PipelineConfig {
        bootstrap: BootstrapConfig::new(100.0, 10_000, 7),
        theory_draws: 500,
        ..PipelineConfig::default()
    };
    let mut details = Vec::new();
    let mut ok = true;
    for (seed, mu_star) in [1.00, 1.18, 1.25].into_iter().enumerate() {
        let scenario = Scenario {
            mu_star,
            noise_rel: 0.01,
            drift_rel: 0.02,
            ..Scenario::default()
        };
        let traces = synthesize_traces(&scenario, seed as u64).unwrap();
        let out = run_pipeline(&traces, &cfg).unwrap();
        let inside = out.measure.band_contains(mu_star);
        ok &= inside;
        let r = &out.report;
        details.push(format!(
            "{mu_star}: {:.4} +{:.4} -{:.4}",
            r.median, r.sigma_plus, r.sigma_minus
        ));
    }
    let elapsed = start.elapsed();
    check(
        ok && elapsed < PIPELINE_RUNTIME,
        format!("{}; {elapsed:.1?}", details.join(", ")),
    )
}

fn product_events(n: usize) -> BTreeSet<Vec<History>> {
    let space = HistorySpace::new(n).unwrap();
    let mut out = BTreeSet::new();
    out.insert(Vec::new());
    // Each step's factor is one of the nonempty subsets {0}, {1}, {0, 1}.
    for choice in 0..3usize.pow(n as u32) {
        let factors: Vec<u8> = (0..n)
            .map(|k| (choice / 3usize.pow(k as u32) % 3) as u8 + 1)
            .collect();
        let members: Vec<History> = space
            .histories()
            .iter()
            .filter(|h| (0..n).all(|k| factors[k] >> h.site(k) & 1 == 1))
            .copied()
            .collect();
        out.insert(members);
    }
    out
}

fn serial_classifier() -> Outcome {
    let mut mismatches = 0;
    let mut counts = Vec::new();
    for n in [2, 3] {
        let space = HistorySpace::new(n).unwrap();
        let products = product_events(n);
        let mut count = 0;
        for e in space.all_events() {
            count += 1;
            if is_serial(&e, &space).unwrap() != products.contains(e.members()) {
                mismatches += 1;
            }
        }
        counts.push(count);
    }
    check(
        mismatches == 0 && counts == [16, 256],
        format!("events checked {counts:?}, mismatches {mismatches}"),
    )
}

fn published_value_plausibility() -> Outcome {
    // Glass-plate phase scatter of a few tenths of a radian.
    let phases: Vec<f64> = (0..200).map(|k| 0.3 * k as f64 / 199.0).collect();
    let theory = theoretical_measure(&NoiseModel::bench(), &phases, 4000, 9).unwrap();
    let median = theory.median();
    let in_range = (PLAUSIBLE_MEDIAN.0..=PLAUSIBLE_MEDIAN.1).contains(&median);

    // Report-format fixtures with the spread back-derived from the quoted ratios.
    let fixture = |median, sigma, reference| {
        let summary = Summary {
            median,
            sigma_plus: sigma,
            sigma_minus: sigma,
            std_dev: sigma,
            n_samples: 1,
        };
        significance(&summary, reference, SigmaConvention::SampleStd).unwrap()
    };
    let vs_bound = fixture(1.172, 0.01291, 1.0);
    let vs_theory = fixture(1.172, 0.01923, 1.182);
    let eta = transmittance(1.0, 0.4921, 0.4434).unwrap();
    check(
        in_range
            && (vs_bound - 13.32).abs() < FIXTURE_TOL
            && (vs_theory - 0.52).abs() < FIXTURE_TOL
            && (eta - QUOTED_ETA).abs() <= ETA_ROUNDING,
        format!(
            "theory median {median:.4} (+{:.4} -{:.4}), fixtures {vs_bound:.3} / {vs_theory:.3} sigma, eta_s {eta:.4}",
            theory.sigma_plus(),
            theory.sigma_minus()
        ),
    )
}

fn sum_rule_violation() -> Outcome {
    let model = HopperModel::ideal();
    let space = model.history_space().unwrap();
    let e = ev(&["00", "01", "11"]);
    let total = model.measure(&e).unwrap() + model.measure(&e.complement(&space).unwrap()).unwrap();
    check(
        (total - 1.5).abs() <= EXACT,
        format!("mu(E) + mu(E^c) = {total}"),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("ideal measure", ideal_measure),
        ("oracle equivalence", oracle_equivalence),
        ("unitarity", unitarity),
        ("filter/measure consistency", filter_consistency),
        ("state checkpoints", state_checkpoints),
        ("phase formula", phase_formula),
        ("pipeline round trip", pipeline_round_trip),
        ("serial classifier", serial_classifier),
        ("published-value plausibility", published_value_plausibility),
        ("sum-rule violation", sum_rule_violation),
    ];
    let mut failed = Vec::new();
    for (k, (name, run)) in criteria.iter().enumerate() {
        let outcome =
            catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".to_string()));
        let (status, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!("criterion {:>2} {status} {name}: {detail}", k + 1);
        if outcome.is_err() {
            failed.push(k + 1);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
