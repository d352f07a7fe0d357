use std::collections::HashSet;
use std::sync::OnceLock;

use cvqkd::model::ChannelParams;
use cvqkd::recon::*;
use cvqkd::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn rate_tenth_code() -> &'static ParityCheckMatrix {
    static CODE: OnceLock<ParityCheckMatrix> = OnceLock::new();
    CODE.get_or_init(|| peg_construct(&published_ensemble(0.1).unwrap(), 10_000, 11).unwrap())
}

fn reference_channel() -> ChannelParams {
    ChannelParams::new(0.1, 0.005, 0.606, 0.041).unwrap()
}

fn mean_var(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    (m, v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0))
}

#[test]
fn simulated_correlation_matches_linear_gaussian_model() {
    let p = ChannelParams::new(0.1, 0.0, 1.0, 0.0).unwrap();
    let n = 1_000_000;
    let b = simulate_block(&p, 4.0, n, 2024).unwrap();
    let (mx, vx) = mean_var(&b.alice);
    let (my, vy) = mean_var(&b.bob);
    let cov = b.alice.iter().zip(&b.bob).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / (n as f64 - 1.0);
    let rho = cov / (vx * vy).sqrt();
    let expected = (0.4f64 / 1.4).sqrt();
    assert!((rho - expected).abs() < 3e-3, "rho = {rho}, expected {expected}");

    // Sample variance of a Gaussian has standard error σ²·√(2/(n−1)).
    let se = |var: f64| var * (2.0 / (n as f64 - 1.0)).sqrt();
    assert!((vx - 4.0).abs() < 3.0 * se(4.0), "Var(x) = {vx}");
    let var_y = 0.1 * 4.0 + p.sigma_z_sq();
    assert!((vy - var_y).abs() < 3.0 * se(var_y), "Var(y) = {vy}");
}

#[test]
fn vanishing_modulation_gives_vanishing_alice_variance() {
    let b = simulate_block(&reference_channel(), 1e-12, 100_000, 3).unwrap();
    assert!(mean_var(&b.alice).1 < 1e-10);
}

#[test]
fn noiseless_limit_recovers_every_bit() {
    let p = ChannelParams::new(1.0, 0.0, 1.0, 0.0).unwrap();
    let b = simulate_block(&p, 1e10, 8 * 1000, 5).unwrap();
    let r = multidim_reconcile(&b, 8, 6).unwrap();
    for (l, &bit) in r.llr.iter().zip(&r.bob_bits) {
        assert_eq!((*l < 0.0) as u8, bit);
    }
}

/// Capacity of a binary-input AWGN channel at `snr`, by trapezoidal
/// integration over the LLR density `N(2·snr, 4·snr)`.
fn biawgn_capacity(snr: f64) -> f64 {
    let mean = 2.0 * snr;
    let sd = (4.0 * snr).sqrt();
    let steps = 20_000;
    let (lo, hi) = (-12.0, 12.0);
    let h = (hi - lo) / steps as f64;
    let mut acc = 0.0;
    for k in 0..=steps {
        let z = lo + k as f64 * h;
        let w = if k == 0 || k == steps { 0.5 } else { 1.0 };
        let l = mean + sd * z;
        let density = (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
        acc += w * density * (1.0 + (-l).exp()).log2();
    }
    1.0 - acc * h
}

#[test]
fn reconciled_llrs_carry_biawgn_capacity() {
    let snr = 0.1639;
    let p = ChannelParams::new(1.0, 0.0, 1.0, 0.0).unwrap();
    let b = simulate_block(&p, snr, 8 * 100_000, 77).unwrap();
    let r = multidim_reconcile(&b, 8, 78).unwrap();
    let empirical = 1.0
        - r.llr
            .iter()
            .zip(&r.bob_bits)
            .map(|(l, &bit)| {
                let signed = if bit == 0 { *l } else { -*l };
                (1.0 + (-signed).exp()).log2()
            })
            .sum::<f64>()
            / r.llr.len() as f64;
    let predicted = biawgn_capacity(snr);
    assert!(
        (empirical - predicted).abs() <= 0.05 * predicted,
        "empirical {empirical}, predicted {predicted}"
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rotation_preserves_norm(
        x in prop::collection::vec(-5.0f64..5.0, 8),
        y in prop::collection::vec(-5.0f64..5.0, 8),
        signs in prop::collection::vec(any::<bool>(), 8),
    ) {
        let ny = algebra::norm(&y);
        prop_assume!(ny > 1e-3);
        let y_unit: Vec<f64> = y.iter().map(|v| v / ny).collect();
        let u: Vec<f64> = signs.iter().map(|&s| if s { -1.0 } else { 1.0 } / 8f64.sqrt()).collect();
        let m = rotation_for(&y_unit, &u);
        let mx = apply_rotation(&m, &x);
        prop_assert!((algebra::norm(&mx) - algebra::norm(&x)).abs() < 1e-12);
        let back = apply_rotation(&m, &y_unit);
        for (a, b) in back.iter().zip(&u) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn simulation_is_deterministic(seed in any::<u64>()) {
        let p = reference_channel();
        prop_assert_eq!(simulate_block(&p, 2.8, 64, seed).unwrap(), simulate_block(&p, 2.8, 64, seed).unwrap());
    }
}

fn has_four_cycle(h: &ParityCheckMatrix) -> bool {
    let mut pairs = HashSet::new();
    for row in h.rows() {
        for (i, &a) in row.iter().enumerate() {
            for &b in &row[i + 1..] {
                if !pairs.insert((a, b)) {
                    return true;
                }
            }
        }
    }
    false
}

#[test]
fn peg_regular_code_is_four_cycle_free() {
    let d = DegreeDistribution::parse("v = r1 x1^3; u = 0.5 x1^6").unwrap();
    let h = peg_construct(&d, 1024, 9).unwrap();
    assert_eq!(h.n_checks(), 512);
    assert!(h.column_weights().iter().all(|&w| w == 3));
    assert!(h.row_weights().iter().all(|&w| w == 6));
    assert!((h.code_rate() - 0.5).abs() < 1e-12);
    assert!(!has_four_cycle(&h));
    // The oracle itself must see a planted cycle.
    let planted = ParityCheckMatrix::new("c4", 4, vec![vec![0, 1, 2], vec![0, 1, 3]]).unwrap();
    assert!(has_four_cycle(&planted));
}

#[test]
fn peg_histogram_follows_published_ensemble() {
    let d = published_ensemble(0.1).unwrap();
    let h = rate_tenth_code();
    assert!((h.code_rate() - 0.1).abs() < 1e-3);
    let weights = h.column_weights();
    for class in &d.variable_spec {
        let want = class.fraction * h.n_vars() as f64;
        let got = weights.iter().filter(|&&w| w == class.total_degree() as usize).count() as f64;
        assert!((got - want).abs() <= 1.0, "degree {}: {got} vs {want}", class.total_degree());
    }
    let want_edges: f64 = d
        .variable_spec
        .iter()
        .map(|c| c.fraction * c.total_degree() as f64)
        .sum::<f64>()
        * h.n_vars() as f64;
    assert!((h.n_edges() as f64 - want_edges).abs() <= d.variable_spec.len() as f64 * 40.0);
}

#[test]
fn peg_is_seed_deterministic() {
    let d = published_ensemble(0.15).unwrap();
    let a = peg_construct(&d, 2000, 4).unwrap();
    let b = peg_construct(&d, 2000, 4).unwrap();
    let c = peg_construct(&d, 2000, 5).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.rows(), c.rows());
}

#[test]
fn peg_rejects_degree_above_check_count() {
    let d = published_ensemble(0.05).unwrap();
    assert!(matches!(peg_construct(&d, 10, 1), Err(Error::InfeasibleDistribution(_))));
}

#[test]
fn alist_round_trip_of_constructed_code() {
    let d = DegreeDistribution::regular(3, 6).unwrap();
    let h = peg_construct(&d, 1024, 2).unwrap();
    let text = h.to_alist();
    let back = ParityCheckMatrix::from_alist(&text, h.code_id.clone(), "mem").unwrap();
    assert_eq!(back, h);
    assert_eq!(back.to_alist(), text);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("regular.alist");
    std::fs::write(&path, &text).unwrap();
    let loaded = ParityCheckMatrix::load_alist(&path).unwrap();
    assert_eq!(loaded.code_id, "regular");
    assert_eq!(loaded.rows(), h.rows());
}

#[test]
fn bp_noiseless_coset_decodes_immediately() {
    let h = rate_tenth_code();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let bits: Vec<u8> = (0..h.n_vars()).map(|_| rng.random::<bool>() as u8).collect();
    let llr: Vec<f64> = bits.iter().map(|&b| if b == 0 { 20.0 } else { -20.0 }).collect();
    let out = bp_decode_syndrome(h, &llr, &h.syndrome(&bits), DEFAULT_MAX_ITER);
    assert!(out.converged && out.iterations <= 1);
    assert_eq!(out.bits, bits);

    let zero = vec![20.0; h.n_vars()];
    let out = bp_decode(h, &zero, DEFAULT_MAX_ITER);
    assert!(out.converged && out.iterations <= 1);
    assert!(h.syndrome(&out.bits).iter().all(|&s| s == 0));
}

#[test]
fn bp_without_information_does_not_converge() {
    let h = rate_tenth_code();
    let out = bp_decode(h, &vec![0.0; h.n_vars()], DEFAULT_MAX_ITER);
    assert!(!out.converged);
    assert_eq!(out.iterations, DEFAULT_MAX_ITER);
}

#[test]
fn bp_on_biawgn_above_threshold() {
    // The ensemble threshold is a noise standard deviation; operate at a
    // noise level comfortably below it.
    let d = published_ensemble(0.1).unwrap();
    let sigma = 0.8 * d.threshold.unwrap();
    let h = rate_tenth_code();
    let decoder = BpDecoder::new(h);
    let mut failures = 0;
    for frame in 0..100u64 {
        let mut rng = frame_rng(99, frame);
        let bits: Vec<u8> = (0..h.n_vars()).map(|_| rng.random::<bool>() as u8).collect();
        let llr: Vec<f64> = bits
            .iter()
            .map(|&b| {
                let y = if b == 0 { 1.0 } else { -1.0 } + sigma * rng.sample::<f64, _>(StandardNormal);
                2.0 * y / (sigma * sigma)
            })
            .collect();
        let syndrome = h.syndrome(&bits);
        let out = decoder.decode(&llr, &syndrome, DEFAULT_MAX_ITER);
        if out.converged {
            assert_eq!(h.syndrome(&out.bits), syndrome);
        } else {
            failures += 1;
        }
    }
    assert!(failures < 5, "{failures} failures out of 100");
}

#[test]
fn measure_fer_saturates_far_from_waterfall() {
    let h = rate_tenth_code();
    let p = reference_channel();
    assert_eq!(measure_fer(h, &p, 1.0, 50, 1).unwrap().fer, 1.0);
    assert_eq!(measure_fer(h, &p, 6.0, 50, 2).unwrap().fer, 0.0);
}

#[test]
fn measure_fer_is_independent_of_parallelism() {
    let d = published_ensemble(0.1).unwrap();
    let h = peg_construct(&d, 2000, 3).unwrap();
    let p = reference_channel();
    let serial = MeasureOptions { parallel: false, ..MeasureOptions::default() };
    let a = measure_fer_with(&h, &p, 3.0, 24, 5, &serial).unwrap();
    let b = measure_fer_with(&h, &p, 3.0, 24, 5, &MeasureOptions::default()).unwrap();
    assert_eq!(a, b);
    assert!(measure_fer(&h, &p, 3.0, 0, 5).is_err());
}

#[test]
fn measure_fer_trend_is_non_increasing() {
    let h = rate_tenth_code();
    let p = reference_channel();
    let grid = [2.5, 2.75, 3.0, 3.5];
    let (est, _) = measure_fer_curve(h, &p, &grid, 200, 40, &MeasureOptions::default()).unwrap();
    for w in est.windows(2) {
        assert!(
            w[1].fer <= w[0].fer || w[1].ci_low <= w[0].ci_high,
            "FER rises from {:?} to {:?}",
            w[0],
            w[1]
        );
    }
    assert!(est[0].fer > est[3].fer);
}
