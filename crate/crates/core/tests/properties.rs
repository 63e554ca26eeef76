use cohdist_core::channels::{bistochastic_pair, circulant_family, qubit_classify, QubitAction};
use cohdist_core::json::ChannelJson;
use cohdist_core::linalg;
use cohdist_core::quantum::{ket_classical_version, DensityMatrix};
use cohdist_core::random::{bistochastic, random_channel, random_density, simplex, simplex_capped, task_rng};
use cohdist_core::states::{construct_fourier_set, construct_pair, lift_coarse_grained, CoarseGraining};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pair_is_orthogonal_with_exact_classical_version(seed in any::<u64>(), d in 2usize..=12) {
        let p = simplex_capped(&mut task_rng(seed, 0), d, 0.5);
        let states = construct_pair(&p).unwrap().states(&p).unwrap();
        prop_assert!(linalg::inner(&states[0], &states[1]).norm() < 1e-10);
        for s in &states {
            for (x, y) in ket_classical_version(s).iter().zip(p.as_slice()) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn coarse_grained_pair_lifts(seed in any::<u64>(), d in 5usize..=8) {
        let mut rng = task_rng(seed, 1);
        // merge entries 0 and 1 of a vector whose merged maximum stays at most 1/2
        let p = simplex_capped(&mut rng, d, 0.25);
        let target: Vec<usize> = (0..d).map(|k| k.saturating_sub(1)).collect();
        let g = CoarseGraining::new(d - 1, target).unwrap();
        let q = g.apply(&p).unwrap();
        let phases = construct_pair(&q).unwrap();
        let lifted = lift_coarse_grained(&p, &g, &phases).unwrap();
        prop_assert!(linalg::inner(&lifted[0], &lifted[1]).norm() < 1e-10);
    }

    #[test]
    fn circulant_choi_states_orthogonal(seed in any::<u64>(), d in 2usize..=6) {
        let fam = circulant_family(&simplex(&mut task_rng(seed, 2), d)).unwrap();
        let m = fam.members();
        for a in 0..m.len() {
            for b in (a + 1)..m.len() {
                prop_assert!(linalg::frobenius(&(m[a].jamiolkowski() * m[b].jamiolkowski())) < 1e-12);
            }
        }
    }

    #[test]
    fn bistochastic_pair_always_verifies(seed in any::<u64>(), d in 2usize..=5) {
        let t = bistochastic(&mut task_rng(seed, 3), d);
        let pair = bistochastic_pair(&t).unwrap();
        prop_assert!(pair.family.verify(1e-10).unwrap().verdict);
        prop_assert!(pair.family.shared_action().max_abs_diff(&t) < 1e-12);
    }

    #[test]
    fn classical_action_commutes_with_decoherence(seed in any::<u64>(), d in 2usize..=4, rank in 1usize..=4) {
        let mut rng = task_rng(seed, 4);
        let ch = random_channel(&mut rng, d, rank);
        let rho = DensityMatrix::new(random_density(&mut rng, d, d)).unwrap();
        let p = cohdist_core::quantum::classical_version(&rho);
        let via_quantum = cohdist_core::quantum::classical_version(&ch.apply(&DensityMatrix::diagonal(&p)).unwrap());
        let t = ch.classical_action();
        for k in 0..d {
            let direct: f64 = (0..d).map(|l| t.matrix()[(k, l)] * p[l]).sum();
            prop_assert!((direct - via_quantum[k]).abs() < 1e-12);
        }
        prop_assert!(ch.decohere().decohere().classical_action().max_abs_diff(&t) < 1e-12);
    }

    #[test]
    fn channel_json_roundtrip(seed in any::<u64>(), d in 1usize..=4, rank in 1usize..=3) {
        let ch = random_channel(&mut task_rng(seed, 5), d, rank);
        let text = serde_json::to_string(&ChannelJson::from_channel(&ch)).unwrap();
        let back: ChannelJson = serde_json::from_str(&text).unwrap();
        let ch2 = back.to_channel().unwrap();
        prop_assert!(linalg::frobenius(&(ch.jamiolkowski() - ch2.jamiolkowski())) < 1e-15);
    }

    #[test]
    fn qubit_classification_symmetries(i in 0u32..=200, j in 0u32..=200) {
        let (a, b) = (i as f64 / 200.0, j as f64 / 200.0);
        let c = qubit_classify(&QubitAction::new(a, b).unwrap());
        let swapped = qubit_classify(&QubitAction::new(b, a).unwrap());
        let mirrored = qubit_classify(&QubitAction::new(1.0 - a, 1.0 - b).unwrap());
        prop_assert_eq!((c.m_restricted, c.m_full), (swapped.m_restricted, swapped.m_full));
        prop_assert_eq!((c.m_restricted, c.m_full), (mirrored.m_restricted, mirrored.m_full));
        prop_assert!(c.m_restricted <= c.m_full);
    }
}

#[test]
fn fourier_set_sizes() {
    for d in 1..=9 {
        let f = construct_fourier_set(d);
        assert_eq!(f.len(), d);
        assert!(linalg::gram_defect(&f) < 1e-12);
    }
}
