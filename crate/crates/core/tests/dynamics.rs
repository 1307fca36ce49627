use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use chiral_pulse::analytic::{imperfect_step1_state, prepared_state, step1_closed_form, step2_closed_form_pumped};
use chiral_pulse::protocol::gaussian_two_step;
use chiral_pulse::{
    propagate, Chirality, ChiralitySignMap, Method, PropagationConfig, Protocol, PulseEnvelope, PulseSchedule,
    QuantumState, Transition,
};

fn reference_protocols() -> Vec<(&'static str, Protocol)> {
    vec![
        ("perfect", Protocol::standard()),
        ("duration", Protocol::standard().with_schedule(gaussian_two_step(1.0, 1.1, FRAC_PI_2).unwrap())),
        ("all", Protocol::standard().with_schedule(gaussian_two_step(1.1, 1.1, 11.0 * PI / 20.0).unwrap())),
    ]
}

#[test]
fn methods_agree_on_reference_scenarios() {
    for (name, proto) in reference_protocols() {
        let exp = proto.final_populations().unwrap();
        let rk4 = Protocol {
            propagation: PropagationConfig { method: Method::FourthOrderFixedStep, ..proto.propagation },
            ..proto.clone()
        }
        .final_populations()
        .unwrap();
        let diff = exp.max_abs_diff(&rk4);
        assert!(diff <= 1e-6, "{name}: {diff:e}");
    }
}

#[test]
fn rk4_preserves_norm_at_fine_steps() {
    for (name, proto) in reference_protocols() {
        let cfg = PropagationConfig { method: Method::FourthOrderFixedStep, ..proto.propagation };
        let proto = Protocol { propagation: cfg, ..proto };
        let (l, r) = proto.run().unwrap();
        for s in l.samples.iter().chain(&r.samples) {
            let drift = (s.populations.iter().sum::<f64>() - 1.0).abs();
            assert!(drift <= 1e-7, "{name} t={}: {drift:e}", s.t);
        }
    }
}

#[test]
fn left_stays_dark_through_step2() {
    let (l, r) = Protocol::standard().run().unwrap();
    // Past the step-1 pulse the left populations are frozen at ½, ½, 0.
    for s in l.samples.iter().filter(|s| s.t >= 6.0) {
        assert!((s.populations[0] - 0.5).abs() < 1e-3 && s.populations[2] < 1e-3, "{s:?}");
    }
    assert!(l.final_state.fidelity_amplitude(&prepared_state()) > 1.0 - 1e-6);
    assert!(r.final_state.fidelity_amplitude(&step2_closed_form_pumped(FRAC_PI_2)) > 1.0 - 1e-6);
    // Midway through step 2 the right molecule follows the closed form.
    let mid = r.samples.iter().find(|s| (s.t - 9.0).abs() < 1e-9).unwrap();
    let half = step2_closed_form_pumped(FRAC_PI_4);
    assert!((mid.populations[2] - half.populations()[2]).abs() < 1e-3, "{mid:?}");
}

#[test]
fn step1_matches_closed_form_over_time() {
    let p12 = *Protocol::standard().schedule.get(Transition::T12).unwrap();
    let schedule = PulseSchedule::new(vec![p12]).unwrap();
    let cfg = PropagationConfig { t_end: 6.0, record_stride: 250, ..PropagationConfig::standard() };
    let ev = propagate(&QuantumState::ground(), &schedule, &ChiralitySignMap::RIGHT, &cfg).unwrap();
    for s in &ev.samples {
        // Partial area of the Gaussian over [t_start, t].
        let area = p12.amplitude * PI.sqrt() / 2.0 * (libm::erf(s.t - p12.center) - libm::erf(cfg.t_start - p12.center));
        let expected = step1_closed_form(area).populations();
        assert!((s.populations[0] - expected[0]).abs() < 1e-6, "t={}", s.t);
    }
}

#[test]
fn imperfect_step1_matches_integration() {
    let delta = 0.1 * FRAC_PI_4;
    let p12 = PulseEnvelope::gaussian(Transition::T12, PI.sqrt() / 4.0, 3.0, 1.1, 0.0).unwrap();
    let schedule = PulseSchedule::new(vec![p12]).unwrap();
    let cfg = PropagationConfig { t_end: 6.0, ..PropagationConfig::standard() };
    for (chirality, signs) in [(Chirality::Left, ChiralitySignMap::LEFT), (Chirality::Right, ChiralitySignMap::RIGHT)] {
        let num = propagate(&QuantumState::ground(), &schedule, &signs, &cfg).unwrap().final_state;
        let closed = imperfect_step1_state(delta, chirality);
        for k in 1..=3 {
            assert!((num.amplitude(k) - closed.amplitude(k)).norm() < 1e-3);
        }
    }
}

#[test]
fn empty_schedule_is_identity() {
    let ev = propagate(&prepared_state(), &PulseSchedule::empty(), &ChiralitySignMap::LEFT, &PropagationConfig::standard())
        .unwrap();
    assert_eq!(ev.final_state, prepared_state());
}
