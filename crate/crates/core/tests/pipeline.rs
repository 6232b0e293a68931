mod common;

use common::*;
use gfcsd::io::{UNEVEN_CENTERS, UNEVEN_SIGMA};
use gfcsd::report::read_memberships_csv;
use gfcsd::{
    fcm_xie_sweep, gen_gaussian_mixture, gfc_fit, gfc_sd, gfc_sd_from, load_csv, read_report,
    write_report, DataMatrix, EngineConfig, Error, FitReport, GfcSdConfig, MembershipMatrix,
    MergePolicy, MixtureGroup, MixtureSpec,
};

fn uneven(seed: u64) -> DataMatrix {
    gen_gaussian_mixture(&MixtureSpec::uneven_four_groups(UNEVEN_SIGMA, seed))
        .unwrap()
        .data
}

fn blobs(centers: &[[f64; 2]], per: usize, sigma: f64, seed: u64) -> DataMatrix {
    let groups = centers
        .iter()
        .map(|c| MixtureGroup {
            center: c.to_vec(),
            sigma,
            count: per,
        })
        .collect();
    gen_gaussian_mixture(&MixtureSpec { groups, seed })
        .unwrap()
        .data
}

#[test]
fn uneven_groups_are_recovered() {
    let x = uneven(1);
    let res = gfc_sd(&x, &GfcSdConfig::default(), 2).unwrap();
    assert_eq!(res.clusters(), 4);
    for c in &UNEVEN_CENTERS {
        let nearest = res
            .model
            .prototypes
            .iter()
            .map(|v| euclid(v, c))
            .fold(f64::INFINITY, f64::min);
        assert!(nearest < 0.1, "no prototype near {c:?}");
    }
}

#[test]
fn trace_invariants() {
    let x = uneven(3);
    let cfg = GfcSdConfig::default();
    let res = gfc_sd(&x, &cfg, 4).unwrap();
    let its = &res.trace.iterations;
    assert_eq!(its[0].c, cfg.c_max);
    for w in its.windows(2) {
        assert_eq!(w[1].c, w[0].c - w[0].events.len());
        assert!(w[1].c < w[0].c);
    }
    assert!(its.last().unwrap().events.is_empty());
    let fr = res.similarity.as_ref().unwrap();
    let tau = its.last().unwrap().threshold.unwrap();
    assert!(fr.max_off_diagonal() <= tau);
    assert!(its
        .iter()
        .all(|e| e.db_fr.unwrap() > 0.0 && e.ranks.len() == e.c));
    assert!(res.trace.db_fr_minimizing_c().is_some());
    for e in its.iter().flat_map(|e| &e.events) {
        assert!(e.fr_value > e.threshold_used && e.threshold_used >= cfg.policy.tau1);
    }
}

#[test]
fn runs_are_deterministic() {
    let x = uneven(5);
    let cfg = GfcSdConfig::default();
    let a = FitReport::new(&x, &gfc_sd(&x, &cfg, 9).unwrap(), &cfg, 9).unwrap();
    let b = FitReport::new(&x, &gfc_sd(&x, &cfg, 9).unwrap(), &cfg, 9).unwrap();
    let ja = serde_json::to_string(&a.without_timing()).unwrap();
    let jb = serde_json::to_string(&b.without_timing()).unwrap();
    assert_eq!(ja, jb);
}

#[test]
fn single_blob_collapses_to_one_cluster() {
    let x = blobs(&[[0.0, 0.0]], 200, 0.1, 8);
    let cfg = GfcSdConfig {
        c_max: 5,
        ..GfcSdConfig::default()
    };
    let res = gfc_sd(&x, &cfg, 1).unwrap();
    assert_eq!(res.clusters(), 1);
    assert!(res.similarity.is_none());
    let first = &res.trace.iterations[0];
    assert!(!first.events.is_empty());
    assert!(first.events.iter().all(|e| e.fr_value > e.threshold_used));
}

#[test]
fn no_mergeable_pairs_is_a_single_fit() {
    let x = blobs(&[[0.0, 0.0], [10.0, 0.0], [0.0, 10.0]], 40, 0.2, 2);
    let cfg = GfcSdConfig {
        c_max: 3,
        ..GfcSdConfig::default()
    };
    let u0 = MembershipMatrix::random(3, x.rows(), &mut rng(6)).unwrap();
    let res = gfc_sd_from(&x, u0.clone(), &cfg).unwrap();
    assert_eq!(res.trace.iterations.len(), 1);
    let fit = gfc_fit(&x, &u0, &cfg.engine).unwrap();
    assert_eq!(res.memberships, fit.memberships);
    assert_eq!(res.model.prototypes, fit.prototypes);
}

#[test]
fn iris_finds_three_groups() {
    let ds = load_csv(IRIS, true, Some(4)).unwrap();
    assert_eq!((ds.data.rows(), ds.data.cols()), (150, 4));
    let labels = ds.labels.as_ref().unwrap();
    for class in 0..3 {
        assert_eq!(labels.iter().filter(|&&l| l == class).count(), 50);
    }
    let res = gfc_sd(&ds.data, &GfcSdConfig::default(), 0).unwrap();
    assert_eq!(res.clusters(), 3);
    assert!(
        (3..=12).contains(&res.trace.iterations.len()),
        "{:?}",
        res.trace.c_sequence()
    );
}

#[test]
fn invalid_configs_and_limits() {
    let x = uneven(1);
    let bad = GfcSdConfig {
        c_max: x.rows(),
        ..GfcSdConfig::default()
    };
    assert!(matches!(
        gfc_sd(&x, &bad, 0),
        Err(Error::InvalidParameter(_))
    ));
    let bad = GfcSdConfig {
        c_max: 1,
        ..GfcSdConfig::default()
    };
    assert!(gfc_sd(&x, &bad, 0).is_err());
    let short = GfcSdConfig {
        policy: MergePolicy {
            max_outer_iters: 1,
            ..MergePolicy::default()
        },
        ..GfcSdConfig::default()
    };
    match gfc_sd(&x, &short, 0) {
        Err(Error::OuterIterationLimit(trace)) => assert_eq!(trace.iterations.len(), 1),
        other => panic!("expected the outer limit, got {other:?}"),
    }
    let bad_engine = GfcSdConfig {
        engine: EngineConfig {
            p: 3.0,
            ..EngineConfig::default()
        },
        ..GfcSdConfig::default()
    };
    assert!(matches!(
        gfc_sd(&x, &bad_engine, 0),
        Err(Error::Epoch { epoch: 0, .. })
    ));
}

#[test]
fn sweep_examples() {
    let x = blobs(&[[0.0, 0.0], [10.0, 10.0]], 30, 0.3, 4);
    let sweep = fcm_xie_sweep(&x, 2, 5, &EngineConfig::default(), 1, 1).unwrap();
    assert_eq!(sweep.best_c, 2);
    assert_eq!(
        sweep.curve.iter().map(|p| p.c).collect::<Vec<_>>(),
        vec![2, 3, 4, 5]
    );
    let single = fcm_xie_sweep(&x, 3, 3, &EngineConfig::default(), 1, 1).unwrap();
    assert_eq!((single.best_c, single.curve.len()), (3, 1));
    assert!(fcm_xie_sweep(&x, 1, 3, &EngineConfig::default(), 1, 1).is_err());
    assert!(fcm_xie_sweep(&x, 4, 3, &EngineConfig::default(), 1, 1).is_err());
    assert!(fcm_xie_sweep(&x, 2, 60, &EngineConfig::default(), 1, 1).is_err());
    let a = fcm_xie_sweep(&x, 2, 4, &EngineConfig::default(), 7, 2).unwrap();
    assert_eq!(
        a,
        fcm_xie_sweep(&x, 2, 4, &EngineConfig::default(), 7, 2).unwrap()
    );
}

#[test]
fn report_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let x = uneven(1);
    let cfg = GfcSdConfig::default();
    let res = gfc_sd(&x, &cfg, 2).unwrap();
    let mut report = FitReport::new(&x, &res, &cfg, 2).unwrap();
    let path = dir.path().join("run.json");
    write_report(&mut report, &res.memberships, &path).unwrap();
    assert_eq!(report.memberships_path, "run.memberships.csv");
    let back = read_report(&path).unwrap();
    assert_eq!(back, report);
    assert_eq!(back.final_c, 4);
    assert_eq!(back.prototypes.len(), 4);
    let u = read_memberships_csv(dir.path().join(&back.memberships_path)).unwrap();
    assert_eq!(u, res.memberships);
    let text = std::fs::read_to_string(&path).unwrap();
    let json: serde_json::Value = serde_json::from_str(&text).unwrap();
    for key in [
        "config",
        "seed",
        "final_c",
        "prototypes",
        "memberships_path",
        "trace",
        "indices",
    ] {
        assert!(json.get(key).is_some(), "missing {key}");
    }
    let cs: Vec<u64> = json["trace"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["c"].as_u64().unwrap())
        .collect();
    assert!(cs.windows(2).all(|w| w[1] <= w[0]));
}
