//! Model-wide properties over random tiles and configurations.

use gnnflow::analysis::{run_sweep, saturation_point, HardwareConfig, Param, SweepSpec};
use gnnflow::oracle::check_breakdown;
use gnnflow::{engn, hygcn, Decimal, EngnConfig, HygcnConfig, TileParams};
use proptest::prelude::*;

fn tile() -> impl Strategy<Value = TileParams> {
    (0u64..=3000, 0u64..=30_000, 0u64..=128, 0u64..=64).prop_flat_map(|(k, p, n, t)| {
        (0..=k).prop_map(move |l| TileParams {
            vertices: k,
            high_degree_vertices: l,
            edges: p,
            in_features: n,
            out_features: t,
        })
    })
}

fn sigma() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![1u64, 2, 4, 8, 16, 32])
}

fn hygcn_cfg() -> impl Strategy<Value = HygcnConfig> {
    (sigma(), 1u64..=20_000, 1u64..=128, 1u64..=8192, 0u64..=1000).prop_map(|(s, b, ma, mc, g)| {
        let mut c = HygcnConfig::default();
        c.common.precision_bits = s;
        c.common.bandwidth = b;
        c.aggregation_pes = ma;
        c.combination_pes = mc;
        c.systolic_reuse = Decimal::from_f64(g as f64 / 1000.0).unwrap();
        c
    })
}

fn engn_cfg() -> impl Strategy<Value = EngnConfig> {
    (sigma(), 1u64..=20_000, 1u64..=256, prop::option::of(1u64..=20_000)).prop_map(|(s, b, m, bstar)| {
        let mut c = EngnConfig::with_array(m, m);
        c.common.precision_bits = s;
        c.common.bandwidth = b;
        c.cache_bandwidth = bstar;
        c
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn breakdowns_pass_the_oracle(t in tile(), e in engn_cfg(), h in hygcn_cfg()) {
        let be = engn::evaluate(&t, &e).unwrap();
        let bh = hygcn::evaluate(&t, &h).unwrap();
        prop_assert!(check_breakdown(&be).is_empty());
        prop_assert!(check_breakdown(&bh).is_empty());
        prop_assert!(be.totals_consistent() && bh.totals_consistent());
        for l in be.levels.iter().chain(&bh.levels) {
            prop_assert!(l.identity_holds());
            prop_assert!(l.payload_bits <= l.data_movement_bits);
        }
    }

    #[test]
    fn hygcn_iterations_fall_then_saturate(t in tile(), h in hygcn_cfg()) {
        let values: Vec<u64> = (0..=16).map(|e| 1u64 << e).collect();
        let s = run_sweep(&SweepSpec::integers(Param::B, &values), &t, &HardwareConfig::Hygcn(h)).unwrap();
        let iters: Vec<u128> = s.totals().map(|x| x.2).collect();
        prop_assert!(iters.windows(2).all(|w| w[1] <= w[0]));
        prop_assert!(saturation_point(&s).is_ok());
    }

    #[test]
    fn hygcn_totals_saturate_beyond_every_bound(t in tile(), h in hygcn_cfg()) {
        // Past the largest quantity B is min'd against, B no longer matters.
        let s = h.common.precision_bits;
        let ps = h.effective_sliding_edges(&t);
        let big = [
            t.vertices * s, h.aggregation_pes * s, ps * s, t.in_features * t.out_features * s,
            h.combination_pes * s, t.vertices * t.in_features * s, ps * t.in_features * s,
            h.combination_pes, t.vertices * t.out_features * s,
        ].into_iter().max().unwrap().max(1);
        let at = |b: u64| {
            let mut c = h;
            c.common.bandwidth = b;
            hygcn::evaluate(&t, &c).unwrap().total_iterations
        };
        prop_assert_eq!(at(big), at(big * 2 + 1));
    }

    #[test]
    fn hygcn_dm_non_decreasing(t in tile(), h in hygcn_cfg(), which in 0usize..5) {
        let base = hygcn::evaluate(&t, &h).unwrap().total_dm_bits;
        let (mut t2, mut h2) = (t, h);
        match which {
            0 => t2.vertices += 1,
            1 => { t2.edges += 1; h2.sliding_edges = Some(h.effective_sliding_edges(&t) + 1); }
            2 => t2.in_features += 1,
            3 => t2.out_features += 1,
            _ => h2.common.precision_bits *= 2,
        }
        prop_assert!(hygcn::evaluate(&t2, &h2).unwrap().total_dm_bits >= base);
    }

    #[test]
    fn only_loadweights_depends_on_gamma(t in tile(), h in hygcn_cfg(), g in 0u64..=1000) {
        let mut h2 = h;
        h2.systolic_reuse = Decimal::from_f64(g as f64 / 1000.0).unwrap();
        let (a, b) = (hygcn::evaluate(&t, &h).unwrap(), hygcn::evaluate(&t, &h2).unwrap());
        for (x, y) in a.levels.iter().zip(&b.levels) {
            if x.label != hygcn::LOADWEIGHTS {
                prop_assert_eq!(x, y);
            }
        }
        let lw = |c: &HygcnConfig| hygcn::loadweights(&t, c).unwrap().data_movement_bits;
        if h2.systolic_reuse >= h.systolic_reuse {
            prop_assert!(lw(&h2) <= lw(&h));
        }
    }

    #[test]
    fn only_two_levels_depend_on_ma(t in tile(), h in hygcn_cfg(), ma in 1u64..=128) {
        let mut h2 = h;
        h2.aggregation_pes = ma;
        let (a, b) = (hygcn::evaluate(&t, &h).unwrap(), hygcn::evaluate(&t, &h2).unwrap());
        for (x, y) in a.levels.iter().zip(&b.levels) {
            if x.label != hygcn::LOADVERTL2 && x.label != hygcn::AGGREGATE {
                prop_assert_eq!(x, y);
            }
        }
    }

    #[test]
    fn engn_iterations_non_increasing_in_b(t in tile(), e in engn_cfg(), b in 1u64..=20_000) {
        let mut e2 = e;
        e2.common.bandwidth = b;
        let (lo, hi) = if b >= e.common.bandwidth { (e, e2) } else { (e2, e) };
        prop_assert!(
            engn::evaluate(&t, &hi).unwrap().total_iterations <= engn::evaluate(&t, &lo).unwrap().total_iterations
        );
    }

    #[test]
    fn combine_and_interphase_bounds(t in tile(), h in hygcn_cfg()) {
        let s = u128::from(h.common.precision_bits);
        let (k, n, tt) = (u128::from(t.vertices), u128::from(t.in_features), u128::from(t.out_features));
        let b = hygcn::evaluate(&t, &h).unwrap();
        prop_assert_eq!(b.level(hygcn::COMBINE).unwrap().data_movement_bits, k * n * s + n * tt * s);
        prop_assert!(b.level(hygcn::WRITEINTERPHASE).unwrap().data_movement_bits >= k * n * s);
    }
}

#[test]
fn hygcn_growth_in_tile_size_is_near_linear() {
    let spec = SweepSpec::integers(Param::K, &[250, 500, 1000, 2000, 4000])
        .with_links(gnnflow::analysis::Link::default_tile_links());
    let s = run_sweep(
        &spec,
        &TileParams::default(),
        &HardwareConfig::Hygcn(HygcnConfig::default()),
    )
    .unwrap();
    let totals: Vec<u128> = s.totals().map(|t| t.1).collect();
    for w in totals.windows(2) {
        let g = w[1] as f64 / w[0] as f64;
        assert!((1.9..=2.1).contains(&g), "{totals:?}");
    }
}

#[test]
fn hygcn_total_is_nearly_independent_of_ma() {
    let tile = TileParams::default();
    let totals: Vec<u128> = [16, 32, 64]
        .iter()
        .map(|&ma| {
            let c = HygcnConfig {
                aggregation_pes: ma,
                ..HygcnConfig::default()
            };
            hygcn::evaluate(&tile, &c).unwrap().total_dm_bits
        })
        .collect();
    let (lo, hi) = (totals.iter().min().unwrap(), totals.iter().max().unwrap());
    assert!(((hi - lo) as f64 / *lo as f64) < 0.05, "{totals:?}");
}
