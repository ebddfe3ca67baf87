use editwalk_core::process::{
    empirical_distribution, intersection_weights, moran_weights, rng_for, run, simple_edit_weights, simulate_chains,
    IntersectionMode,
};
use editwalk_core::spectral::{build_chain, intersection_stationary, stationary_closed_form, Restrict, DEFAULT_STATE_CAP};
use editwalk_core::HostGraph;

/// Observed one-step frequencies against the transition matrix. The 4σ band
/// is 3σ family-wise over the ~30 nonzero entries.
#[test]
fn transition_counts_match_matrix() {
    let host = HostGraph::complete(3);
    let p = [0.2, 0.5, 0.7];
    let dist = simple_edit_weights(&host, &p).unwrap();
    let chain = build_chain(&dist, Restrict::All, DEFAULT_STATE_CAP).unwrap();

    let mut counts = [[0u64; 8]; 8];
    let mut prev = host.empty_set().mask() as usize;
    let mut rng = rng_for(7, 0);
    run(&dist, &host.empty_set(), 1_000_000, &mut rng, |t, s| {
        if t > 0 {
            let next = s.mask() as usize;
            counts[prev][next] += 1;
            prev = next;
        }
    })
    .unwrap();

    for (i, row) in counts.iter().enumerate() {
        let visits: u64 = row.iter().sum();
        assert!(visits > 10_000, "state {i} visited {visits} times");
        for (j, &c) in row.iter().enumerate() {
            let expect = chain.entry(i, j);
            let freq = c as f64 / visits as f64;
            let sigma = (expect * (1.0 - expect) / visits as f64).sqrt();
            assert!((freq - expect).abs() <= 4.0 * sigma + 1e-12, "P({i},{j}) = {expect}, observed {freq}");
        }
    }
}

#[test]
fn long_run_histogram_is_product_form() {
    let host = HostGraph::path(4).unwrap();
    let p = [0.3, 0.6, 0.85];
    let dist = simple_edit_weights(&host, &p).unwrap();
    let pi = stationary_closed_form(&p).unwrap();
    let hist = empirical_distribution(&dist, &host.empty_set(), 100, 200_000, 6, &mut rng_for(11, 0)).unwrap();
    for (h, q) in hist.iter().zip(&pi) {
        let sigma = (q * (1.0 - q) / 200_000.0).sqrt();
        assert!((h - q).abs() < 4.0 * sigma, "{h} vs {q}");
    }
}

#[test]
fn lazy_intersection_histogram() {
    let mu = vec![0.1, 0.3, 0.4, 0.2];
    let (host, dist) = intersection_weights(2, 3, mu.clone(), IntersectionMode::Lazy, DEFAULT_STATE_CAP).unwrap();
    let law = intersection_stationary(dist.intersection_model().unwrap()).unwrap();
    let hist = empirical_distribution(&dist, &host.empty_set(), 50, 100_000, 8, &mut rng_for(3, 0)).unwrap();
    for (h, q) in hist.iter().zip(&law) {
        let sigma = (q * (1.0 - q) / 100_000.0).sqrt();
        assert!((h - q).abs() < 4.0 * sigma + 1e-9, "{h} vs {q}");
    }
}

#[test]
fn moran_trajectories_stay_acyclic() {
    let host = HostGraph::complete(5);
    let dist = moran_weights::<f64>(&host).unwrap();
    let full = host.full_set();
    let chains = simulate_chains(&dist, &full, 2_000, 99, 4, 1).unwrap();
    for traj in chains {
        // the full graph has cycles; once every vertex has been resampled the
        // state is a forest for good
        let mut settled = false;
        for (t, s) in &traj.snapshots {
            if *t >= 500 {
                settled = true;
            }
            if settled {
                assert!(host.is_forest(s), "cycle at step {t}");
            }
        }
    }
}

#[test]
fn chains_are_reproducible_and_distinct() {
    let host = HostGraph::cycle(6).unwrap();
    let dist = simple_edit_weights(&host, &[0.4; 6]).unwrap();
    let a = simulate_chains(&dist, &host.empty_set(), 500, 5, 3, 10).unwrap();
    let b = simulate_chains(&dist, &host.empty_set(), 500, 5, 3, 10).unwrap();
    assert_eq!(a, b);
    assert_ne!(a[0].snapshots, a[1].snapshots);
}
