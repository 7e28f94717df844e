mod common;

use common::frame;
use gcu_core::fixtures::{candidates, uniform};
use gcu_core::io::boe_to_json;
use gcu_core::stream::{csv_header, parse_stream};
use gcu_core::{
    compare_rules, load_stream, random_boe, run_from, run_stream, unsupported_proposition_report,
    AlphaStrategy, BetaStrategy, DegenerateEventPolicy, Error, Frame, MassFunction, PipelineState,
    PriorSpec, Proposition, StreamRecord, UpdateConfig, UpdateRule,
};
use proptest::prelude::*;

fn records(f: &Frame, len: usize, seed: u64) -> Vec<StreamRecord> {
    (0..len as u64)
        .map(|k| StreamRecord::new(k, random_boe(f, 4, seed.wrapping_add(k))))
        .collect()
}

fn config(rule: UpdateRule, alpha: AlphaStrategy) -> UpdateConfig {
    UpdateConfig {
        rule,
        alpha,
        beta: BetaStrategy::Receptive,
        policy: DegenerateEventPolicy::SkipAndRenormalize,
    }
}

fn certain(f: &Frame, p: Proposition) -> MassFunction {
    MassFunction::new(f.clone(), [(p, 1.0)]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn runs_are_deterministic(n in 1usize..=6, len in 0usize..12, seed in any::<u64>(), cue in any::<bool>()) {
        let f = frame(n);
        let rs = records(&f, len, seed);
        let rule = if cue { UpdateRule::Cue } else { UpdateRule::Gcu };
        let cfg = config(rule, AlphaStrategy::ProportionalInertia);
        let a = run_stream(&PriorSpec::Dirichlet(0.2), &f, &rs, &cfg).unwrap();
        let b = run_stream(&PriorSpec::Dirichlet(0.2), &f, &rs, &cfg).unwrap();
        prop_assert_eq!(a.to_csv().unwrap(), b.to_csv().unwrap());
        prop_assert_eq!(a.to_json(), b.to_json());
        prop_assert_eq!(a.samples.len(), len + 1);
        for s in &a.samples {
            prop_assert!(s.plausibility.iter().chain(&s.belief).all(|v| v.is_sign_positive()));
            prop_assert!((s.pignistic.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            prop_assert!((0.0..=1.0).contains(&s.ignorance));
            let masses = s.masses.as_ref().unwrap();
            let m = MassFunction::new(f.clone(), masses.iter().copied()).unwrap();
            prop_assert!(m.is_compatible(&s.pignistic).unwrap());
        }
    }

    #[test]
    fn resuming_matches_a_full_run(n in 1usize..=6, len in 1usize..12, cut in any::<usize>(), seed in any::<u64>()) {
        let f = frame(n);
        let rs = records(&f, len, seed);
        let cut = cut % (len + 1);
        let cfg = config(UpdateRule::Gcu, AlphaStrategy::ProportionalInertia);
        let full = run_stream(&PriorSpec::Uniform, &f, &rs, &cfg).unwrap();
        let head = run_stream(&PriorSpec::Uniform, &f, &rs[..cut], &cfg).unwrap();
        let saved = PipelineState::from_json(&head.final_state.to_json()).unwrap();
        prop_assert_eq!(&saved, &head.final_state);
        let tail = run_from(saved, &rs, &cfg).unwrap();
        prop_assert_eq!(&tail.final_state, &full.final_state);
        // The resumed log starts at the saved state without its step metadata.
        prop_assert_eq!(&tail.samples[0].masses, &full.samples[cut].masses);
        prop_assert_eq!(&tail.samples[1..], &full.samples[cut + 1..]);
        prop_assert_eq!(tail.samples[0].k, cut as u64);
    }

    #[test]
    fn vacuous_tail_freezes_the_trajectory(n in 1usize..=6, len in 1usize..8, tail in 1usize..8, seed in any::<u64>()) {
        let f = frame(n);
        let mut rs = records(&f, len, seed);
        for k in len..len + tail {
            rs.push(StreamRecord::new(k as u64, MassFunction::vacuous(&f)));
        }
        let cfg = config(UpdateRule::Gcu, AlphaStrategy::ProportionalInertia);
        let log = run_stream(&PriorSpec::Dirichlet(0.5), &f, &rs, &cfg).unwrap();
        let last = &log.samples[len];
        for s in &log.samples[len + 1..] {
            prop_assert_eq!(&s.masses, &last.masses);
            prop_assert_eq!(&s.pignistic, &last.pignistic);
        }
    }

    #[test]
    fn vacuous_prior_stays_vacuous(n in 1usize..=6, len in 0usize..10, seed in any::<u64>()) {
        let f = frame(n);
        let rs = records(&f, len, seed);
        let log = run_stream(&PriorSpec::Vacuous, &f, &rs, &config(UpdateRule::Gcu, AlphaStrategy::ZeroInertia)).unwrap();
        for s in &log.samples {
            prop_assert_eq!(s.ignorance, 1.0);
            prop_assert_eq!(s.core_size, 1);
        }
    }

    #[test]
    fn vacuous_records_keep_the_prior(n in 1usize..=6, len in 0usize..10, seed in any::<u64>(), alpha in 0.0f64..=1.0) {
        let f = frame(n);
        let prior = random_boe(&f, 6, seed);
        let rs: Vec<StreamRecord> = (0..len as u64).map(|k| StreamRecord::new(k, MassFunction::vacuous(&f))).collect();
        let log = run_stream(&PriorSpec::Explicit(prior.clone()), &f, &rs, &config(UpdateRule::Gcu, AlphaStrategy::Fixed(alpha))).unwrap();
        prop_assert_eq!(log.final_boe(), &prior);
    }
}

#[test]
fn uniform_prior_single_record() {
    let f = candidates(5);
    let a = f.parse_proposition("c3,c4,c5").unwrap();
    let rs = [StreamRecord::new(0, certain(&f, a))];
    let log = run_stream(&PriorSpec::Uniform, &f, &rs, &UpdateConfig::default()).unwrap();
    let expected = [0.0, 0.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0];
    for (x, y) in log.samples[1].pignistic.iter().zip(expected) {
        assert!((x - y).abs() < 1e-15);
    }
    assert_eq!(log.samples[1].k, 1);
}

#[test]
fn comparing_identical_configs() {
    let f = frame(4);
    let rs = records(&f, 6, 3);
    let cfg = config(UpdateRule::Gcu, AlphaStrategy::Fixed(0.3));
    let report = compare_rules(&PriorSpec::Dirichlet(0.3), &f, &rs, &[cfg.clone(), cfg]).unwrap();
    assert!(report.max_divergence.iter().all(|&d| d == 0.0));
    assert_eq!(report.pairs[0].final_mass_diff, 0.0);
    assert!(compare_rules(&PriorSpec::Uniform, &f, &rs, &[UpdateConfig::default()]).is_err());
}

#[test]
fn comparing_gcu_and_cue() {
    let f = Frame::new(["a", "b", "c"]).unwrap();
    let incoming = MassFunction::new(
        f.clone(),
        [
            (f.parse_proposition("a,b").unwrap(), 0.5),
            (f.parse_proposition("c").unwrap(), 0.5),
        ],
    )
    .unwrap();
    let rs = [StreamRecord::new(0, incoming)];
    let configs = [
        config(UpdateRule::Gcu, AlphaStrategy::ZeroInertia),
        config(UpdateRule::Cue, AlphaStrategy::ZeroInertia),
    ];
    let report = compare_rules(&PriorSpec::Uniform, &f, &rs, &configs).unwrap();
    assert_eq!(report.max_divergence[0], 0.0);
    // GCU gives BetP (1/4, 1/4, 1/2); CUE keeps ab whole, which splits to the same pignistic.
    assert!(report.max_divergence[1] < 1e-12);
    assert!((report.pairs[0].final_mass_diff - 0.5).abs() < 1e-12);
    assert_eq!(report.pairs[0].per_step_mass[0], Some(0.0));
    assert!((report.pairs[0].per_step_mass[1].unwrap() - 0.5).abs() < 1e-12);
    let json: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
    assert_eq!(json["configs"][1]["rule"], "cue");
}

#[test]
fn comparing_gcu_and_cue_pignistic_gap() {
    let f = Frame::new(["a", "b", "c"]).unwrap();
    let prior = MassFunction::new(
        f.clone(),
        [
            (Proposition::singleton(0), 0.6),
            (Proposition::singleton(1), 0.2),
            (Proposition::singleton(2), 0.2),
        ],
    )
    .unwrap();
    let incoming = MassFunction::new(
        f.clone(),
        [
            (f.parse_proposition("a,b").unwrap(), 0.5),
            (f.parse_proposition("c").unwrap(), 0.5),
        ],
    )
    .unwrap();
    let rs = [StreamRecord::new(0, incoming)];
    let configs = [
        config(UpdateRule::Gcu, AlphaStrategy::ZeroInertia),
        config(UpdateRule::Cue, AlphaStrategy::ZeroInertia),
    ];
    let report = compare_rules(&PriorSpec::Explicit(prior), &f, &rs, &configs).unwrap();
    // GCU: a gets 0.5 * 0.75; CUE: a gets 0.5 * 0.5 from splitting ab.
    assert!((report.max_divergence[1] - 0.125).abs() < 1e-12);
}

#[test]
fn comparing_gcu_and_bayes_baseline() {
    let f = candidates(5);
    let events = ["c2,c3,c4,c5", "c3,c4,c5", "c1,c3,c5", "c3,c5"];
    let rs: Vec<StreamRecord> = events
        .iter()
        .enumerate()
        .map(|(k, e)| StreamRecord::new(k as u64, certain(&f, f.parse_proposition(e).unwrap())))
        .collect();
    let configs = [
        config(UpdateRule::Gcu, AlphaStrategy::ZeroInertia),
        config(UpdateRule::BayesBaseline, AlphaStrategy::ZeroInertia),
    ];
    let report = compare_rules(&PriorSpec::Uniform, &f, &rs, &configs).unwrap();
    assert!(report.max_divergence.iter().all(|&d| d <= 1e-12));
    let last = &report.logs[0].samples[4].pignistic;
    assert!((last[2] - 0.5).abs() < 1e-15 && (last[4] - 0.5).abs() < 1e-15);
}

#[test]
fn disjoint_propositions_decay_under_repeated_event() {
    let f = candidates(4);
    let prior = uniform(4);
    let a = f.parse_proposition("c1,c2").unwrap();
    let rs: Vec<StreamRecord> = (0..6)
        .map(|k| StreamRecord::new(k, certain(&f, a)))
        .collect();
    let cfg = config(UpdateRule::Gcu, AlphaStrategy::Fixed(0.5));
    let log = run_stream(&PriorSpec::Explicit(prior), &f, &rs, &cfg).unwrap();
    let trends = unsupported_proposition_report(&log, &rs);
    for t in &trends {
        assert_eq!(t.masses.len(), 6);
        if !t.proposition.intersects(a) {
            assert!(t.non_increasing && t.decay_candidate);
            assert!(t.supported.iter().all(|&s| !s));
            let last = t.masses.last().unwrap().unwrap();
            assert!((last - 0.25 * 0.5f64.powi(6)).abs() < 1e-15);
        } else {
            assert!(t.supported.iter().all(|&s| s));
        }
    }
}

#[test]
fn vacuous_stream_trends_are_constant() {
    let f = frame(3);
    let prior = random_boe(&f, 5, 8);
    let rs: Vec<StreamRecord> = (0..4)
        .map(|k| StreamRecord::new(k, MassFunction::vacuous(&f)))
        .collect();
    let log = run_stream(
        &PriorSpec::Explicit(prior),
        &f,
        &rs,
        &UpdateConfig::default(),
    )
    .unwrap();
    for t in unsupported_proposition_report(&log, &rs) {
        assert!(t.masses.iter().all(|m| m.unwrap() == t.initial_mass));
    }
    let one = &rs[..1];
    let log = run_stream(&PriorSpec::Uniform, &f, one, &UpdateConfig::default()).unwrap();
    assert!(unsupported_proposition_report(&log, one)
        .iter()
        .all(|t| t.masses.len() == 1));
}

#[test]
fn csv_layout() {
    let f = Frame::new(["x", "y"]).unwrap();
    assert_eq!(
        csv_header(&f),
        [
            "k",
            "ignorance",
            "core_size",
            "skipped",
            "betp_x",
            "betp_y",
            "bl_x",
            "pl_x",
            "bl_y",
            "pl_y"
        ]
    );
    let log = run_stream(&PriorSpec::Uniform, &f, &[], &UpdateConfig::default()).unwrap();
    assert_eq!(log.to_csv().unwrap(), "k,ignorance,core_size,skipped,betp_x,betp_y,bl_x,pl_x,bl_y,pl_y\n0,0,2,0,0.5,0.5,0.5,0.5,0.5,0.5\n");
}

fn line(k: u64, m: &MassFunction) -> String {
    format!("{{\"k\": {k}, \"boe\": {}}}", boe_to_json(m))
}

#[test]
fn stream_files() {
    let dir = tempfile::tempdir().unwrap();
    let f = frame(3);
    let m = random_boe(&f, 3, 1);
    let path = dir.path().join("s.jsonl");

    std::fs::write(&path, "").unwrap();
    assert!(load_stream(&path).unwrap().is_empty());

    std::fs::write(&path, format!("{}\n\n{}\n", line(0, &m), line(1, &m))).unwrap();
    assert_eq!(load_stream(&path).unwrap().len(), 2);

    std::fs::write(&path, format!("{}\n{}\n", line(0, &m), line(0, &m))).unwrap();
    assert!(matches!(
        load_stream(&path),
        Err(Error::NonMonotoneIndex { line: 2, .. })
    ));

    let other = random_boe(&frame(4), 3, 1);
    std::fs::write(&path, format!("{}\n{}\n", line(0, &m), line(1, &other))).unwrap();
    match load_stream(&path) {
        Err(Error::FrameMismatch(msg)) => assert!(msg.contains("line 2")),
        other => panic!("expected a frame mismatch, got {other:?}"),
    }

    assert!(matches!(
        parse_stream("{\"k\": 0}\n", None),
        Err(Error::Parse { line: 1, .. })
    ));
    let bad_mass =
        "{\"k\": 0, \"boe\": {\"frame\": [\"a\"], \"focal\": [{\"set\": [\"a\"], \"mass\": 0.5}]}}";
    assert!(matches!(
        parse_stream(bad_mass, None),
        Err(Error::Parse { line: 1, .. })
    ));

    std::fs::write(
        dir.path().join("w.json"),
        r#"[{"set": ["t0", "t1", "t2"], "weight": 0.5}]"#,
    )
    .unwrap();
    let vac = MassFunction::vacuous(&f);
    let with_overrides = format!(
        "{{\"k\": 4, \"boe\": {}, \"alpha\": \"fixed:0.5\", \"beta\": \"explicit:w.json\"}}\n",
        boe_to_json(&vac)
    );
    std::fs::write(&path, with_overrides).unwrap();
    let rs = load_stream(&path).unwrap();
    assert_eq!(rs[0].alpha, Some(AlphaStrategy::Fixed(0.5)));
    assert!(matches!(rs[0].beta, Some(BetaStrategy::Explicit(_))));
}

#[test]
fn step_errors_name_the_step() {
    let f = frame(3);
    let rs = [
        StreamRecord::new(0, MassFunction::vacuous(&f)),
        StreamRecord::new(1, certain(&f, Proposition::singleton(0))),
    ];
    let cfg = UpdateConfig {
        policy: DegenerateEventPolicy::Error,
        ..UpdateConfig::default()
    };
    let err = run_stream(&PriorSpec::Vacuous, &f, &rs, &cfg).unwrap_err();
    assert!(matches!(err, Error::AtStep { k: 1, .. }));
    assert!(matches!(err.root(), Error::ZeroBeliefEvent { .. }));

    let mismatched = [StreamRecord::new(0, MassFunction::vacuous(&frame(2)))];
    let err = run_stream(&PriorSpec::Vacuous, &f, &mismatched, &cfg).unwrap_err();
    assert!(matches!(err, Error::AtStep { k: 0, .. }));
}
