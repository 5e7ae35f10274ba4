mod common;

use proptest::prelude::*;

use common::{mp_moment_quadrature, probe_trace_norm};
use scrambler_core::asymptotics::{asym_p_opt_kappa, hyp2f1, mth_moment};
use scrambler_core::fidelity::{
    p_chi, p_hack_formula, p_me, p_pg, post_recovery_state, HackingStrategy, ProbeOperator,
};
use scrambler_core::optimizer::{optimize_probe, OptimizerConfig};
use scrambler_core::random::{ginibre, haar_unitary, random_probe, SeedSpec};
use scrambler_core::rounds::degrade_probe;
use scrambler_core::tensor::{
    kron, max_entangled_vector, nuclear_norm, partial_trace_first, partial_trace_second, polar_unitary, rotate_pi_half,
    svd, unrotate_pi_half, vdot, ComplexMatrix, ScramblerDims,
};

fn dims_strategy() -> impl Strategy<Value = ScramblerDims> {
    (1usize..=4, 1usize..=4, 1usize..=16).prop_filter_map("d_K must divide d_A·d_B", |(a, b, k)| {
        ((a * b) % k == 0).then(|| ScramblerDims::new(a, b, k, a * b / k).unwrap())
    })
}

fn matrix(rows: usize, cols: usize, seed: u64) -> ComplexMatrix {
    ginibre(rows, cols, &mut SeedSpec::new(seed, 0).rng())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rotation_is_an_invertible_isometry_of_entries(dims in dims_strategy(), seed in any::<u64>()) {
        let u = matrix(dims.total(), dims.total(), seed);
        let uo = rotate_pi_half(&u, &dims).unwrap();
        prop_assert_eq!(uo.shape(), (dims.rotated_rows(), dims.rotated_cols()));
        prop_assert!((uo.frobenius_norm() - u.frobenius_norm()).abs() < 1e-12 * u.frobenius_norm());
        prop_assert!(unrotate_pi_half(&uo, &dims).unwrap().distance(&u) == 0.0);
    }

    #[test]
    fn svd_reconstructs(rows in 1usize..8, cols in 1usize..8, seed in any::<u64>()) {
        let m = matrix(rows, cols, seed);
        let f = svd(&m).unwrap();
        prop_assert!(f.reconstruct().distance(&m) < 1e-12 * (1.0 + m.frobenius_norm()));
        prop_assert!(f.singulars.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn polar_unitary_attains_the_trace_norm(n in 1usize..8, seed in any::<u64>()) {
        let m = matrix(n, n, seed);
        let w = polar_unitary(&m).unwrap();
        prop_assert!(w.unitarity_defect() < 1e-12);
        let t = (&w * &m).trace();
        let nn = nuclear_norm(&m).unwrap();
        prop_assert!((t.re - nn).abs() < 1e-10 * (1.0 + nn) && t.im.abs() < 1e-10 * (1.0 + nn));
    }

    #[test]
    fn partial_traces_match_the_product_rule(p in 1usize..4, q in 1usize..4, seed in any::<u64>()) {
        let a = matrix(p, p, seed);
        let b = matrix(q, q, seed ^ 1);
        let ab = kron(&a, &b).unwrap();
        let first = partial_trace_first(&ab, p, q).unwrap();
        let second = partial_trace_second(&ab, p, q).unwrap();
        prop_assert!(first.distance(&b.scale(a.trace())) < 1e-12 * (1.0 + ab.frobenius_norm()));
        prop_assert!(second.distance(&a.scale(b.trace())) < 1e-12 * (1.0 + ab.frobenius_norm()));
    }

    #[test]
    fn fidelities_are_ordered_and_bounded(dims in dims_strategy(), seed in any::<u64>()) {
        let u = haar_unitary(dims.total(), SeedSpec::new(seed, 0)).unwrap();
        let me = p_me(&u, &dims).unwrap();
        let (pg, _) = p_pg(&u, &dims).unwrap();
        let opt = optimize_probe(&u, &dims, &OptimizerConfig::default(), None).unwrap().p_opt;
        let lower = 1.0 / (dims.d_a * dims.d_a * dims.d_k) as f64;
        prop_assert!(me <= pg + 1e-9 && pg <= opt + 1e-9 && opt <= 1.0 + 1e-9);
        prop_assert!(me >= lower - 1e-12);
    }

    #[test]
    fn any_strategy_is_dominated_by_its_probe_optimum(dims in dims_strategy(), seed in any::<u64>()) {
        let u = haar_unitary(dims.total(), SeedSpec::new(seed, 0)).unwrap();
        let probe = random_probe(dims.d_b, SeedSpec::new(seed, 1)).unwrap();
        let r = haar_unitary(dims.recovery_dim(), SeedSpec::new(seed, 2)).unwrap();
        let strat = HackingStrategy::new(r, probe.clone()).unwrap();
        let (best, _) = p_chi(&u, &dims, &probe).unwrap();
        prop_assert!(p_hack_formula(&u, &dims, &strat).unwrap() <= best + 1e-12);
        let uo = rotate_pi_half(&u, &dims).unwrap();
        let direct = probe_trace_norm(&uo, dims.d_l, probe.chi()).powi(2) / dims.fidelity_norm();
        prop_assert!((best - direct).abs() < 1e-10);
    }

    #[test]
    fn trade_off_holds_for_random_strategies(dims in dims_strategy(), seed in any::<u64>()) {
        let u = haar_unitary(dims.total(), SeedSpec::new(seed, 0)).unwrap();
        let strat = HackingStrategy::new(
            haar_unitary(dims.recovery_dim(), SeedSpec::new(seed, 1)).unwrap(),
            random_probe(dims.d_b, SeedSpec::new(seed, 2)).unwrap(),
        ).unwrap();
        let t = post_recovery_state(&u, &dims, &strat).unwrap().trade_off();
        prop_assert!(t.slack() >= -1e-9);
        prop_assert!(t.p_joint <= t.f_ext.min(t.f_post) + 1e-12);
    }

    #[test]
    fn hyp2f1_agrees_with_quadrature(lambda in 0.05f64..1.0, m in prop::sample::select(vec![0.5, 1.5, 2.0, 3.0])) {
        let q = mp_moment_quadrature(m, lambda);
        prop_assert!((mth_moment(m, lambda).unwrap() - q).abs() < 1e-9);
    }

    #[test]
    fn hyp2f1_is_symmetric_in_a_and_b(a in -2.0f64..2.0, b in -2.0f64..2.0, z in 0.0f64..0.9) {
        let x = hyp2f1(a, b, 2.5, z).unwrap();
        let y = hyp2f1(b, a, 2.5, z).unwrap();
        prop_assert!((x - y).abs() < 1e-12 * (1.0 + x.abs()));
    }

    #[test]
    fn asymptote_grows_with_kappa(k in 0.1f64..20.0, dk in 0.01f64..2.0, n in 1usize..64) {
        let lo = asym_p_opt_kappa(k, n, n).unwrap().p_opt_mean;
        let hi = asym_p_opt_kappa(k + dk, n, n).unwrap().p_opt_mean;
        prop_assert!(lo <= hi + 1e-12);
        prop_assert!(lo > 0.0 && hi <= 1.0 + 1e-12);
    }

    #[test]
    fn degraded_probe_hits_the_target(d in 2usize..6, f in 0.01f64..=1.0, seed in any::<u64>()) {
        let me = max_entangled_vector(d, d);
        let v = degrade_probe(&me, f, SeedSpec::new(seed, 0)).unwrap();
        prop_assert!((vdot(&me, &v).norm_sqr() - f).abs() < 1e-10);
        let probe = ProbeOperator::from_state_vector(&v, d).unwrap();
        prop_assert!((probe.max_entangled_fidelity() - f).abs() < 1e-10);
    }
}

#[test]
fn asymptote_is_continuous_at_kappa_one() {
    for n in [1, 4, 64] {
        let left = asym_p_opt_kappa(1.0 - 1e-9, n, n).unwrap().p_opt_mean;
        let at = asym_p_opt_kappa(1.0, n, n).unwrap().p_opt_mean;
        assert!((left - at).abs() < 1e-6, "n={n}: {left} vs {at}");
    }
}
