use fdside::analysis::{mgain_asymptotic, mgain_improvement, run_gap_suite, GapSuiteConfig};
use fdside::bounds::{genie_outer, no_interference_outer};
use fdside::geometry::{contains, fm_project_oracle, pareto_points, RatePoint};
use fdside::schemes::{bc_beta_star, bc_mac_components, bc_region, bc_sum_rate, cc_region, dc_region, ec_region};
use fdside::{cap, db_to_linear, linear_to_db, side_cap, ChannelParams, EcScale, PowerSplit, Scheme};
use proptest::prelude::*;

fn db() -> impl Strategy<Value = f64> {
    0.0..60.0f64
}

fn params() -> impl Strategy<Value = ChannelParams> {
    (db(), db(), db(), db(), prop::sample::select(vec![0.0, 0.5, 1.0, 2.0])).prop_map(|(a, b, c, d, w)| {
        ChannelParams::new(db_to_linear(a), db_to_linear(b), db_to_linear(c), db_to_linear(d), w).unwrap()
    })
}

fn weak_params() -> impl Strategy<Value = ChannelParams> {
    (db(), 1.0..60.0f64, 0.0..1.0f64, db(), prop::sample::select(vec![0.0, 1.0, 2.0])).prop_map(|(a, b, frac, d, w)| {
        let snr2 = db_to_linear(b);
        ChannelParams::new(db_to_linear(a), snr2, snr2 * frac, db_to_linear(d), w).unwrap()
    })
}

const SLACK: f64 = 1e-9;

fn corners_inside(inner: &fdside::RatePentagon, outer: &fdside::RatePentagon) -> bool {
    let (a1, a2) = inner.r1_corner();
    let (b1, b2) = inner.r2_corner();
    contains(outer, RatePoint::new(a1, a2).unwrap(), SLACK).unwrap()
        && contains(outer, RatePoint::new(b1, b2).unwrap(), SLACK).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn cap_is_monotone(x in 0.0..1e6f64, dx in 0.0..1e3f64) {
        prop_assert!(cap(x + dx).unwrap() >= cap(x).unwrap());
    }

    #[test]
    fn side_cap_is_monotone_in_both_arguments(w in 0.0..4.0f64, dw in 0.0..1.0f64, x in 0.0..1e6f64, dx in 0.0..1e3f64) {
        let base = side_cap(w, x).unwrap();
        prop_assert!(side_cap(w + dw, x).unwrap() >= base);
        prop_assert!(side_cap(w, x + dx).unwrap() >= base);
    }

    #[test]
    fn db_round_trip(x in -100.0..100.0f64) {
        prop_assert!((linear_to_db(db_to_linear(x)).unwrap() - x).abs() < 1e-9);
    }

    #[test]
    fn schemes_stay_inside_no_interference_bound(p in params(), lambda in 0.0..=1.0f64, beta in 0.0..=1.0f64) {
        let outer = no_interference_outer(&p);
        prop_assert!(corners_inside(&bc_region(&p, PowerSplit::new(lambda, beta).unwrap()), &outer));
        prop_assert!(corners_inside(&cc_region(&p, lambda).unwrap(), &outer));
        prop_assert!(corners_inside(&dc_region(&p, lambda).unwrap(), &outer));
        if p.w() >= 1.0 {
            prop_assert!(corners_inside(&ec_region(&p, EcScale::new(lambda * 10.0).unwrap()).unwrap(), &outer));
        }
    }

    #[test]
    fn genie_sum_grows_with_downlink_and_side_channel(p in params(), lambda in 0.0..=1.0f64, f in 1.0..10.0f64) {
        let base = genie_outer(&p, lambda).unwrap().pentagon.max_sum();
        let more_snr1 = ChannelParams::new(p.snr1() * f, p.snr2(), p.inr(), p.snr_side(), p.w()).unwrap();
        let more_side = p.with_snr_side(p.snr_side() * f).unwrap();
        prop_assert!(genie_outer(&more_snr1, lambda).unwrap().pentagon.max_sum() >= base - SLACK);
        prop_assert!(genie_outer(&more_side, lambda).unwrap().pentagon.max_sum() >= base - SLACK);
    }

    #[test]
    fn beta_star_beats_any_other_beta(p in params(), lambda in 0.0..=1.0f64, beta in 0.0..=1.0f64) {
        let star = bc_beta_star(&p, lambda).unwrap().beta;
        let best = bc_sum_rate(&p, PowerSplit::new(lambda, star).unwrap());
        let other = bc_sum_rate(&p, PowerSplit::new(lambda, beta).unwrap());
        prop_assert!(best >= other - 1e-9, "beta*={star} gives {best}, beta={beta} gives {other}");
    }

    #[test]
    fn asymptotic_gains_are_bounded(mu in 0.0..3.0f64, nu in 0.0..3.0f64, w in 1.0..3.0f64) {
        for s in Scheme::ALL {
            let g = mgain_asymptotic(s, mu, nu, w).unwrap();
            prop_assert!((0.0..=2.0).contains(&g), "{s} {g}");
        }
    }

    #[test]
    fn improvement_is_ratio_of_gains(mu in 0.0..3.0f64, wnu in 0.0..3.0f64) {
        let w = 1.0;
        let ratio = mgain_improvement(mu, wnu, w).unwrap();
        let bc = mgain_asymptotic(Scheme::Bc, mu, wnu, w).unwrap();
        let nosc = mgain_asymptotic(Scheme::NoSc, mu, wnu, w).unwrap();
        prop_assert!((ratio - bc / nosc).abs() < 1e-12);
    }

    #[test]
    fn cc_matches_bc_or_dc_asymptotically(mu in 0.0..3.0f64, nu in 0.0..3.0f64) {
        let cc = mgain_asymptotic(Scheme::Cc, mu, nu, 1.0).unwrap();
        let other = if mu < 1.0 { Scheme::Bc } else { Scheme::Dc };
        prop_assert!((cc - mgain_asymptotic(other, mu, nu, 1.0).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn pareto_points_are_a_staircase(pts in prop::collection::vec((0.0..10.0f64, 0.0..10.0f64), 1..40)) {
        let front = pareto_points(pts.iter().map(|&(a, b)| RatePoint::new(a, b).unwrap()).collect());
        for pair in front.windows(2) {
            prop_assert!(pair[0].r1 < pair[1].r1 && pair[0].r2 > pair[1].r2);
        }
        for &(a, b) in &pts {
            prop_assert!(front.iter().any(|q| q.r1 >= a && q.r2 >= b));
        }
    }

    #[test]
    fn containment_is_monotone_in_slack(p in params(), r1 in 0.0..20.0f64, r2 in 0.0..20.0f64, s in 0.0..1.0f64) {
        let pent = no_interference_outer(&p);
        let pt = RatePoint::new(r1, r2).unwrap();
        if contains(&pent, pt, s).unwrap() {
            prop_assert!(contains(&pent, pt, s + 0.5).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fm_oracle_converges_when_step_halves(p in weak_params(), lambda in 0.0..=1.0f64, beta in 0.0..=1.0f64) {
        let m = bc_mac_components(&p, PowerSplit::new(lambda, beta).unwrap());
        let exact = bc_region(&p, PowerSplit::new(lambda, beta).unwrap());
        for step in [4e-3, 2e-3] {
            let front = fm_project_oracle(&m, step).unwrap();
            let best_sum = front.iter().map(|q| q.r1 + q.r2).fold(0.0, f64::max);
            let best_r1 = front.iter().map(|q| q.r1).fold(0.0, f64::max);
            prop_assert!((best_sum - exact.max_sum()).abs() <= 2.0 * step, "step {step}: {best_sum} vs {}", exact.max_sum());
            prop_assert!((best_r1 - exact.r1_max).abs() <= 2.0 * step);
        }
    }
}

#[test]
fn gap_suite_is_deterministic_per_seed() {
    for scheme in [Scheme::Bc, Scheme::Dc, Scheme::Ec] {
        let cfg = GapSuiteConfig { scheme, draws: 40, seed: 99, w: None, constrain_conditions: false };
        assert_eq!(run_gap_suite(&cfg).unwrap(), run_gap_suite(&cfg).unwrap());
        let other = run_gap_suite(&GapSuiteConfig { seed: 100, ..cfg }).unwrap();
        assert_eq!(other.draws, 40);
    }
}
