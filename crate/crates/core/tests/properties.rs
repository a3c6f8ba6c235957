use duplexnet_core::analytic::{laplace_interference_user_3d, laplace_li_2node, laplace_li_3u, outage};
use duplexnet_core::composite::{composite_outage, CompositeMix, CompositeNetwork, Link};
use duplexnet_core::model::{antenna_gains, thinning_table};
use duplexnet_core::montecarlo::{outage_indicator, SeedPolicy, SimSettings};
use duplexnet_core::specfun::hyp_f;
use duplexnet_core::{AntennaSystem, NetworkConfig, NodeKind, Scenario};
use proptest::prelude::*;

fn scenario() -> impl Strategy<Value = Scenario> {
    prop_oneof![
        Just(Scenario::TwoNodeDown),
        Just(Scenario::ThreeNodeDown),
        Just(Scenario::TwoNodeUp),
        Just(Scenario::ThreeNodeUp),
    ]
}

proptest! {
    #[test]
    fn thinning_densities_sum_to_lambda(mi in 1u32..=16, mj in 1u32..=16, gi in 0.0..=1.0, gj in 0.0..=1.0, lambda in 1e-4..1.0) {
        let t = thinning_table(mi, gi, mj, gj, lambda).unwrap();
        prop_assert!((t.total_density() - lambda).abs() <= 1e-12 * lambda.max(1.0));
        prop_assert!(t.iter().all(|e| e.density >= 0.0 && e.power_gain >= 0.0));
    }

    #[test]
    fn main_gain_grows_with_sector_count(m in 1u32..64, gamma in 0.0..0.999) {
        let (g1, _) = antenna_gains(m, gamma).unwrap();
        let (g2, _) = antenna_gains(m + 1, gamma).unwrap();
        prop_assert!(g2 >= g1);
    }

    #[test]
    fn isotropic_side_lobes_flatten_gains(m in 1u32..64) {
        let (g, h) = antenna_gains(m, 1.0).unwrap();
        prop_assert!((g - 1.0).abs() < 1e-15 && (h - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hyp_f_matches_arctan_at_alpha_four(y in 1e-6..50.0_f64) {
        let want = y.sqrt().atan() / y.sqrt();
        prop_assert!((hyp_f(4.0, y).unwrap() - want).abs() <= 1e-10 * want);
    }

    #[test]
    fn laplace_factors_are_non_increasing(s in 0.0..1e3, ds in 0.0..1e3, m in 1u32..=8, sigma_db in -40.0..0.0) {
        let cfg = NetworkConfig::default().with_sigma_l2_db(sigma_db);
        let ant = AntennaSystem::symmetric(m, 0.2);
        let factors: [&dyn Fn(f64) -> f64; 3] = [
            &|s| laplace_li_2node(s, &cfg, &ant, NodeKind::Bs),
            &|s| laplace_li_3u(s, &cfg, &ant),
            &|s| laplace_interference_user_3d(s, &cfg, &ant),
        ];
        for f in factors {
            let (a, b) = (f(s), f(s + ds));
            prop_assert!(a > 0.0 && a <= 1.0);
            prop_assert!(b <= a);
        }
    }

    #[test]
    fn indicators_do_not_depend_on_evaluation_order(sc in scenario(), m in 1u32..=8, seed in any::<u64>()) {
        let cfg = NetworkConfig::default().with_alphas(4.0, if sc.is_uplink() { 3.0 } else { 4.0 });
        let ant = AntennaSystem::symmetric(m, 0.2);
        let settings = SimSettings::default();
        let seeds = SeedPolicy::new(seed);
        let fwd: Vec<bool> = (0..20).map(|i| outage_indicator(sc, &cfg, &ant, &settings, &seeds, i)).collect();
        let rev: Vec<bool> = (0..20).rev().map(|i| outage_indicator(sc, &cfg, &ant, &settings, &seeds, i)).collect();
        prop_assert!(fwd.iter().eq(rev.iter().rev()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn outage_is_non_decreasing_in_rate(sc in scenario(), m in prop_oneof![Just(1u32), Just(4), Just(8)], r in 0.1..3.0, dr in 0.05..1.0) {
        let a2 = if sc.is_uplink() { 3.0 } else { 4.0 };
        let cfg = NetworkConfig::default().with_alphas(4.0, a2).with_sigma_l2_db(-30.0);
        let ant = AntennaSystem::symmetric(m, 0.2);
        let lo = outage(sc, &cfg.with_rate(r), &ant).unwrap().value;
        let hi = outage(sc, &cfg.with_rate(r + dr), &ant).unwrap().value;
        prop_assert!(hi >= lo - 1e-9, "{sc}: {lo} > {hi}");
    }

    #[test]
    fn composite_outage_is_a_convex_combination(p in 0.0..=1.0, pu in 0.0..=1.0, sigma_db in -40.0..0.0) {
        let base = NetworkConfig::default().with_sigma_l2_db(sigma_db);
        let net = CompositeNetwork::standard(base, AntennaSystem::symmetric(8, 0.2)).unwrap();
        let mix = CompositeMix::new(p, pu).unwrap();
        for link in [Link::Downlink, Link::Uplink] {
            let o = composite_outage(&net, link, &mix).unwrap();
            prop_assert!(o.mixed >= o.two_node.min(o.three_node) - 1e-12);
            prop_assert!(o.mixed <= o.two_node.max(o.three_node) + 1e-12);
        }
    }
}
