use super::*;
use crate::info::{conditional_mutual_information, entropy, joint_entropy, mutual_information};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Fixture {
    raw: Vec<Vec<f64>>,
    coded: CodedMatrix,
    target: Vec<u32>,
}

impl Fixture {
    fn from_codes(cols: Vec<Vec<u32>>, target: Vec<u32>) -> Self {
        let raw = cols.iter().map(|c| c.iter().map(|&v| f64::from(v)).collect()).collect();
        Self {
            raw,
            coded: CodedMatrix::from_codes(cols),
            target,
        }
    }

    fn random(seed: u64, n: usize, m: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cols = (0..m)
            .map(|_| {
                let card = rng.random_range(2..5);
                (0..n).map(|_| rng.random_range(0..card)).collect()
            })
            .collect();
        let mut target: Vec<u32> = (0..n).map(|_| rng.random_range(0..2)).collect();
        target[0] = 0;
        target[1] = 1;
        Self::from_codes(cols, target)
    }

    fn ctx(&self) -> SpfpContext<'_> {
        SpfpContext::new(&self.raw, &self.coded, &self.target, RelevanceCorrelation::ClassCode)
    }
}

fn view_set(views: &[&[usize]], n_features: usize) -> ViewSet {
    let views = views
        .iter()
        .map(|f| View {
            feature_ids: f.to_vec(),
            scores: vec![0.0; f.len()],
            h_s: 0.0,
            h_sy: 0.0,
            termination: Termination::CriteriaMet,
            steps: Vec::new(),
            elapsed: 0.0,
        })
        .collect();
    ViewSet {
        views,
        n_features,
        min_features: 1,
        h_f: 0.0,
        h_fy: 0.0,
        union: Vec::new(),
        intersection: Vec::new(),
        removed_log: Vec::new(),
    }
}

#[test]
fn score_with_empty_selection_is_relevance() {
    // f0 = target copy: |R| = 1, I(f0;Y) = 1 bit.
    let f = Fixture::from_codes(vec![vec![0, 1, 0, 1], vec![0, 0, 1, 1]], vec![0, 1, 0, 1]);
    let ctx = f.ctx();
    assert!((score_candidate(&ctx, 0, &[]).unwrap() - 2.0).abs() < 1e-12);
    assert!(score_candidate(&ctx, 1, &[]).unwrap().abs() < 1e-12);
    assert!(matches!(score_candidate(&ctx, 9, &[]), Err(SpfpError::FeatureOutOfRange(9))));
}

#[test]
fn score_sums_relevance_terms() {
    // |R| = 0.5 by construction below and I(f;Y) evaluated independently.
    let x = vec![0u32, 1, 2, 3, 0, 1, 2, 3];
    let y = vec![0u32, 0, 1, 1, 1, 1, 0, 1];
    let f = Fixture::from_codes(vec![x.clone()], y.clone());
    let ctx = f.ctx();
    let xf: Vec<f64> = x.iter().map(|&v| f64::from(v)).collect();
    let yf: Vec<f64> = y.iter().map(|&v| f64::from(v)).collect();
    let r = crate::info::pearson_abs(&xf, &yf).unwrap();
    let i = mutual_information(&x, &y).unwrap();
    assert!((score_candidate(&ctx, 0, &[]).unwrap() - (r + i)).abs() < 1e-12);
}

#[test]
fn duplicate_of_selected_feature() {
    let x = vec![0u32, 1, 2, 0, 1, 2];
    let h = entropy(&x).unwrap();

    // Constant target: I(s;c|Y) = I(s;c) = H(c), so redundancy and
    // complementarity cancel and J = 0.
    let f = Fixture::from_codes(vec![x.clone(), x.clone()], vec![0; 6]);
    let ctx = f.ctx();
    let cmi = conditional_mutual_information(&x, &x, &f.target).unwrap();
    assert!((cmi - h).abs() < 1e-12);
    assert!(score_candidate(&ctx, 1, &[0]).unwrap().abs() < 1e-12);

    // Target equal to the feature: |R| = 1, I(c;Y) = H, I(s;c) = H and
    // I(s;c|Y) = 0, so the redundancy is charged in full: J = 1 + H - H.
    let f = Fixture::from_codes(vec![x.clone(), x.clone()], x.clone());
    let ctx = f.ctx();
    assert!((score_candidate(&ctx, 1, &[0]).unwrap() - 1.0).abs() < 1e-12);
    assert!((score_candidate(&ctx, 1, &[]).unwrap() - (1.0 + h)).abs() < 1e-12);
}

#[test]
fn independent_constant_feature_scores_zero() {
    let f = Fixture::from_codes(vec![vec![0, 1, 0, 1], vec![2, 2, 2, 2]], vec![0, 0, 1, 1]);
    let ctx = f.ctx();
    assert_eq!(score_candidate(&ctx, 1, &[]).unwrap(), 0.0);
    assert_eq!(score_candidate(&ctx, 1, &[0]).unwrap(), 0.0);
}

#[test]
fn criteria_examples() {
    let f = Fixture::random(1, 40, 4);
    let ctx = f.ctx();
    let all: Vec<&[u32]> = (0..4).map(|j| f.coded.column(j)).collect();
    let h_s = joint_entropy(&all).unwrap();
    let mut with_y = all.clone();
    with_y.push(&f.target);
    let h_sy = joint_entropy(&with_y).unwrap();
    assert!(criteria_met(4, h_s, h_sy, ctx.h_f(), ctx.h_fy(), 2, 1e-9).all());

    let h_y = entropy(&f.target).unwrap();
    let empty = criteria_met(0, 0.0, h_y, ctx.h_f(), ctx.h_fy(), 2, 1e-9);
    assert_eq!(
        empty,
        Criteria {
            size: false,
            entropy: false,
            joint_entropy: false
        }
    );

    let dup = Fixture::from_codes(vec![vec![0, 1, 2, 1, 0], vec![0, 1, 2, 1, 0]], vec![0, 1, 1, 0, 0]);
    let dctx = dup.ctx();
    let h1 = entropy(dup.coded.column(0)).unwrap();
    let h1y = joint_entropy(&[dup.coded.column(0), &dup.target]).unwrap();
    assert!(criteria_met(1, h1, h1y, dctx.h_f(), dctx.h_fy(), 1, 1e-9).all());
}

#[test]
fn target_copy_wins_in_one_step() {
    let f = Fixture::from_codes(vec![vec![3, 3, 3, 3, 3, 3], vec![0, 1, 1, 0, 1, 0]], vec![0, 1, 1, 0, 1, 0]);
    let ctx = f.ctx();
    let v = build_view(&ctx, &[0, 1], 1, 1e-9);
    assert_eq!(v.feature_ids, vec![1]);
    assert_eq!(v.termination, Termination::CriteriaMet);
    assert_eq!(v.steps.len(), 1);
}

#[test]
fn restricted_pool_exhausts() {
    // f0 and f1 jointly identify every row; f1 alone cannot reach H(F).
    let f = Fixture::from_codes(
        vec![vec![0, 0, 1, 1], vec![0, 1, 0, 1], vec![0, 0, 0, 1]],
        vec![0, 1, 0, 1],
    );
    let ctx = f.ctx();
    let v = build_view(&ctx, &[1, 2], 1, 1e-9);
    assert_eq!(v.termination, Termination::PoolExhausted);
    let mut ids = v.feature_ids.clone();
    ids.sort_unstable();
    assert_eq!(ids, vec![1, 2]);
}

#[test]
fn entropies_never_decrease_within_a_view() {
    for seed in 0..10 {
        let f = Fixture::random(seed, 48, 7);
        let ctx = f.ctx();
        let v = build_view(&ctx, &(0..7).collect::<Vec<_>>(), 3, 1e-9);
        for w in v.steps.windows(2) {
            assert!(w[1].h_s >= w[0].h_s - 1e-12);
            assert!(w[1].h_sy >= w[0].h_sy - 1e-12);
        }
        assert!(v.h_s <= ctx.h_f() + 1e-9);
        assert!(v.h_sy <= ctx.h_fy() + 1e-9);
        let mut ids = v.feature_ids.clone();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), v.feature_ids.len());
    }
}

#[test]
fn ties_go_to_lowest_index() {
    assert_eq!(argmax_lowest_index(&[1.0, 2.0, 2.0]).0, 1);
    assert_eq!(argmax_lowest_index(&[1.0, 2.0, 2.0 - 1e-15]).0, 1);
    assert_eq!(argmax_lowest_index(&[1.0, 2.0 - 1e-15, 2.0]).0, 1);
    assert_eq!(argmax_lowest_index(&[3.0, 2.0, 4.0]).0, 2);
}

fn dataset_from(f: &Fixture) -> Dataset {
    Dataset::new(
        f.raw.clone(),
        (0..f.raw.len()).map(|j| format!("f{j}")).collect(),
        f.target.clone(),
        vec!["a".into(), "b".into()],
    )
    .unwrap()
}

#[test]
fn full_removal_gives_disjoint_views() {
    let f = Fixture::random(5, 60, 12);
    let ctx = f.ctx();
    let config = SpfpConfig {
        n_views: 20,
        min_features: MinFeatures::Count(2),
        remove_fraction: 1.0,
        ..Default::default()
    };
    let err = partition_with_context(&ctx, &config).unwrap_err();
    let SpfpError::FeatureSpaceExhausted { built, requested } = err else {
        panic!("expected exhaustion");
    };
    assert_eq!(requested, 20);
    assert!(!built.views.is_empty());
    for (a, va) in built.views.iter().enumerate() {
        for vb in &built.views[a + 1..] {
            assert!(va.feature_ids.iter().all(|f| !vb.feature_ids.contains(f)));
        }
    }
    assert_eq!(built.union.len(), 12);
}

#[test]
fn zero_removal_repeats_the_same_view() {
    let f = Fixture::random(6, 50, 8);
    let ctx = f.ctx();
    let config = SpfpConfig {
        n_views: 3,
        min_features: MinFeatures::Count(2),
        remove_fraction: 0.0,
        ..Default::default()
    };
    let vs = partition_with_context(&ctx, &config).unwrap();
    assert!(vs.views.iter().all(|v| v.feature_ids == vs.views[0].feature_ids));
    assert!(vs.removed_log.iter().all(Vec::is_empty));
    assert_eq!(vs.intersection, {
        let mut s = vs.views[0].feature_ids.clone();
        s.sort_unstable();
        s
    });
}

#[test]
fn removal_accounting_and_determinism() {
    let f = Fixture::random(9, 64, 10);
    let d = dataset_from(&f);
    let config = SpfpConfig {
        n_views: 4,
        min_features: MinFeatures::Count(3),
        remove_fraction: 0.6,
        seed: 11,
        bins: 4,
        ..Default::default()
    };
    let a = partition(&d, &config).unwrap();
    let b = partition(&d, &config).unwrap();
    assert_eq!(a, b);
    let mut space = 10usize;
    for (v, removed) in a.views.iter().zip(&a.removed_log) {
        let expected = (0.6 * v.feature_ids.len() as f64).round() as usize;
        assert_eq!(removed.len(), expected.min(v.feature_ids.len()));
        assert!(removed.iter().all(|r| v.feature_ids.contains(r)));
        space -= removed.len();
    }
    let all_removed: usize = a.removed_log.iter().map(Vec::len).sum();
    assert_eq!(space, 10 - all_removed);
}

#[test]
fn min_features_larger_than_feature_count() {
    let f = Fixture::random(2, 20, 3);
    let ctx = f.ctx();
    let config = SpfpConfig {
        min_features: MinFeatures::Count(4),
        ..Default::default()
    };
    assert!(matches!(
        partition_with_context(&ctx, &config),
        Err(SpfpError::MinFeaturesTooLarge { min: 4, available: 3 })
    ));
}

#[test]
fn stats_of_identical_views() {
    let s = view_stats(&view_set(&[&[0, 1, 2], &[2, 1, 0]], 10), 10);
    assert_eq!(s.union_size, 3);
    assert_eq!(s.intersection_size, 3);
    assert_eq!(s.pairwise(), vec![3]);
}

#[test]
fn stats_of_disjoint_views() {
    let s = view_stats(&view_set(&[&[0, 1, 2], &[3, 4, 5, 6]], 10), 10);
    assert_eq!(s.union_size, 7);
    assert_eq!(s.intersection_size, 0);
    assert_eq!(s.ratios, vec![0.3, 0.4]);
    assert!((s.union_ratio - 0.7).abs() < 1e-12);
}

#[test]
fn stats_of_chained_views() {
    let s = view_stats(&view_set(&[&[1, 2], &[2, 3], &[3, 4]], 5), 5);
    assert_eq!(s.union_size, 4);
    assert_eq!(s.intersection_size, 0);
    assert_eq!(s.pairwise(), vec![1, 0, 1]);
    assert_eq!(s.overlap[1][1], 2);
}

#[test]
fn self_cmi_is_conditional_entropy() {
    let f = Fixture::random(4, 40, 4);
    let vs = view_set(&[&[0, 1], &[0, 1]], 4);
    let r = conditional_independence_report(&vs, &f.coded, &f.target, 1e-9).unwrap();
    let h_ay = joint_entropy(&[f.coded.column(0), f.coded.column(1), &f.target]).unwrap();
    let h_y = entropy(&f.target).unwrap();
    assert!((r.pairs[0].cmi - (h_ay - h_y)).abs() < 1e-12);
}

#[test]
fn target_determined_features_are_conditionally_independent() {
    let y = vec![0u32, 1, 2, 0, 1, 2, 0, 1];
    let f = Fixture::from_codes(
        vec![y.iter().map(|v| v * 2).collect(), y.iter().map(|v| (v + 1) % 3).collect(), y.clone()],
        y.clone(),
    );
    let vs = view_set(&[&[0], &[1], &[2]], 3);
    let r = conditional_independence_report(&vs, &f.coded, &f.target, 1e-9).unwrap();
    assert!(r.pairs.iter().all(|p| p.cmi.abs() < 1e-12));
    assert!(r.h_f_le_h_y);
    assert!(!r.independence_violated);
}

#[test]
fn independence_report_needs_two_views() {
    let f = Fixture::random(4, 10, 2);
    let vs = view_set(&[&[0]], 2);
    assert!(matches!(
        conditional_independence_report(&vs, &f.coded, &f.target, 1e-9),
        Err(SpfpError::TooFewViews(1))
    ));
}
