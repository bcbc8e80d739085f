mod common;

use fxbell::correlation::{all_correlations, correlate, pooled_correlate};
use fxbell::fine::{
    check_three3, construct_trivariate, feasibility_oracle, interval_width_terms, k123_interval,
    moments_from_trivariate, point, K123Choice, MomentSet, Trivariate,
};
use fxbell::ingest::{
    forward_diff_signs, parse_rate_table_with_width, segment, CurrencyId, RateTable, SignMatrix, ZeroPolicy,
};
use fxbell::synth::{gen_biased, gen_random, singlet_experiment, synthetic_counts, SyntheticConfig};
use proptest::prelude::*;

fn ids(n: usize) -> Vec<CurrencyId> {
    (0..n).map(|i| CurrencyId::new(i, format!("C{i}"))).collect()
}

fn sign_rows(cols: usize) -> impl Strategy<Value = Vec<Vec<i8>>> {
    prop::collection::vec(prop::collection::vec(prop::bool::ANY.prop_map(|b| if b { 1 } else { -1 }), cols), 3..60)
}

fn trivariate() -> impl Strategy<Value = Trivariate> {
    prop::array::uniform8(0.0..1.0f64).prop_filter_map("nonzero mass", |w| {
        let total: f64 = w.iter().sum();
        (total > 1e-6).then(|| Trivariate::new(w.map(|v| v / total)).unwrap())
    })
}

proptest! {
    #[test]
    fn csv_round_trip_is_bit_exact(
        rates in prop::collection::vec(prop::collection::vec(1e-6..1e6f64, 3), 2..20)
    ) {
        let dates = (0..rates.len()).map(|i| format!("d{i}")).collect();
        let table = RateTable::new(ids(3), dates, rates.concat()).unwrap();
        let back = parse_rate_table_with_width(table.to_csv().as_bytes(), 3).unwrap();
        prop_assert_eq!(back, table);
    }

    #[test]
    fn signs_are_unit_for_every_policy(
        rates in prop::collection::vec(prop::collection::vec(prop::sample::select(vec![1.0, 1.5, 2.0]), 2), 2..30)
    ) {
        let table = RateTable::new(ids(2), (0..rates.len()).map(|i| i.to_string()).collect(), rates.concat()).unwrap();
        for policy in [ZeroPolicy::Plus, ZeroPolicy::Minus, ZeroPolicy::DropRow] {
            let s = forward_diff_signs(&table, policy).unwrap();
            prop_assert!(s.as_slice().iter().all(|v| *v == 1 || *v == -1));
            if policy != ZeroPolicy::DropRow {
                prop_assert_eq!(s.rows(), table.rows() - 1);
            }
        }
    }

    #[test]
    fn segments_concatenate_to_prefix(rows in sign_rows(3), parts in 1usize..5) {
        prop_assume!(rows.len() >= parts);
        let m = SignMatrix::from_rows(ids(3), rows.clone()).unwrap();
        let d = segment(&m, parts).unwrap();
        prop_assert!(d.dropped < parts);
        prop_assert_eq!(d.n * parts + d.dropped, rows.len());
        let joined = d.concatenated();
        prop_assert_eq!(joined.as_slice(), &rows[..d.n * parts].concat()[..]);
    }

    #[test]
    fn correlation_invariants(rows in sign_rows(4)) {
        let m = SignMatrix::from_rows(ids(4), rows).unwrap();
        let d = segment(&m, 3).unwrap();
        let set = all_correlations(&d).unwrap();
        prop_assert_eq!(set.records.len(), 3 * 6);
        for r in &set.records {
            prop_assert!(r.value.abs() <= 1.0);
            // N·C is a sum of N terms ±1, so it shares the parity of N
            prop_assert_eq!((r.sum - r.n as i64).rem_euclid(2), 0);
            let s = match r.segment { fxbell::correlation::SegmentLabel::Segment(s) => s, _ => unreachable!() };
            prop_assert_eq!(correlate(&d, s, r.b.index, r.a.index).unwrap().value, r.value);
        }
        let pooled = pooled_correlate(&d.concatenated(), 0, 3).unwrap();
        let mean = (1..=3).map(|s| correlate(&d, s, 0, 3).unwrap().value).sum::<f64>() / 3.0;
        prop_assert!((pooled.value - mean).abs() < 1e-12);
    }

    #[test]
    fn trivariate_moments_satisfy_inequalities(f in trivariate()) {
        let m = moments_from_trivariate(&f);
        prop_assert!(check_three3(&m).all_satisfied());
        let iv = k123_interval(&m);
        prop_assert!(iv.feasible);
        prop_assert!(iv.lhs >= -1.0 - 1e-12 && iv.rhs <= 1.0 + 1e-12);
        let k123 = m.k123.unwrap();
        prop_assert!(iv.lhs - 1e-12 <= k123 && k123 <= iv.rhs + 1e-12);
        prop_assert!(interval_width_terms(&m).iter().all(|t| *t >= -1e-12));
    }

    #[test]
    fn midpoint_construction_reproduces_moments(f in trivariate()) {
        let m = moments_from_trivariate(&f);
        let g = construct_trivariate(&m, K123Choice::Midpoint).unwrap();
        let back = moments_from_trivariate(&g);
        for (x, y) in back.lower_order().iter().zip(m.lower_order()) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
        prop_assert!(feasibility_oracle(&m));
    }

    #[test]
    fn interval_matches_pointwise_bounds(m in prop::array::uniform6(-1.0..=1.0f64)) {
        // each f(x) ≥ 0 bounds K123 from one side, depending on x1·x2·x3
        let ms = MomentSet::from_lower_order(m);
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for i in 0..8 {
            let (a, b, c) = point(i);
            let (a, b, c) = (f64::from(a), f64::from(b), f64::from(c));
            let rest = 1.0 + m[0] * a + m[1] * b + m[2] * c + m[3] * a * b + m[4] * a * c + m[5] * b * c;
            if a * b * c > 0.0 { lo = lo.max(-rest) } else { hi = hi.min(rest) }
        }
        let iv = k123_interval(&ms);
        prop_assert!((iv.lhs - lo).abs() < 1e-12, "{} vs {}", iv.lhs, lo);
        prop_assert!((iv.rhs - hi).abs() < 1e-12, "{} vs {}", iv.rhs, hi);
    }
}

#[test]
fn boundary_moment_vectors() {
    // trivariates supported on a face or an edge of the cube saturate inequalities
    let supports: [&[usize]; 5] = [&[0], &[0, 7], &[1, 6], &[0, 3, 5, 6], &[2, 4]];
    let mut pushed_out = 0;
    for s in supports {
        let mut f = [0.0; 8];
        for &i in s {
            f[i] = 1.0 / s.len() as f64;
        }
        let m = moments_from_trivariate(&Trivariate::new(f).unwrap());
        assert!(check_three3(&m).all_satisfied());
        assert!(feasibility_oracle(&m));
        assert!(construct_trivariate(&m, K123Choice::Lower).is_ok());
        assert!(construct_trivariate(&m, K123Choice::Upper).is_ok());

        // nudging a saturated Boole-Bell bound past the boundary breaks both
        let mut out = m;
        out.k23 -= 1e-3;
        out.k12 = (m.k12 + 1e-3).min(1.0);
        if !check_three3(&out).all_satisfied() {
            pushed_out += 1;
            assert!(!feasibility_oracle(&out));
            assert!(!k123_interval(&out).feasible);
        }
    }
    assert!(pushed_out > 0);
}

#[test]
fn biased_frequencies_within_four_sigma() {
    let n = 50_000;
    let cfg = SyntheticConfig::new(n, 31, [0.6, -0.3, 0.0]).unwrap();
    let counts = synthetic_counts(&gen_biased(&cfg).unwrap()).unwrap();
    for (k, c) in cfg.c.iter().enumerate() {
        for (p, (a, b)) in fxbell::triple_lp::OUTCOMES.iter().enumerate() {
            let prob = (1.0 - c * f64::from(a * b)) / 4.0;
            let sigma = (n as f64 * prob * (1.0 - prob)).sqrt();
            let dev = (counts.counts[k][p] as f64 - n as f64 * prob).abs();
            assert!(dev <= 4.0 * sigma, "segment {} outcome {p}: deviation {dev} > 4σ = {}", k + 1, 4.0 * sigma);
        }
    }
}

#[test]
fn unbiased_generator_matches_uniform_generator() {
    let cfg = SyntheticConfig::new(1000, 8, [0.0; 3]).unwrap();
    assert_eq!(gen_biased(&cfg).unwrap(), gen_random(1000, 8).unwrap());
}

#[test]
fn singlet_sweep_saturates() {
    for c1 in [0.2, 0.5, 0.9] {
        let cfg = SyntheticConfig::new(1000, 77, [c1, -c1, 0.0]).unwrap();
        let r = singlet_experiment(&cfg).unwrap();
        assert!(r.gap >= -1e-9, "c1 = {c1}: bound {} < |C1 - C2| = {}", r.bound, r.abs_diff);
        if r.abs_diff + r.correlations[2] - 1.0 > 0.0 {
            assert!(r.saturated, "c1 = {c1}: gap {}", r.gap);
        }
    }
}
