use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{Dataset, DatasetError};
use crate::rng;

/// Train/test split settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub test_fraction: f64,
    pub seed: u64,
    pub stratified: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            test_fraction: 0.33,
            seed: 0,
            stratified: true,
        }
    }
}

/// Row indices of the train and test sides, each sorted ascending.
///
/// With stratification, each class contributes a test count within one row
/// of `test_fraction * class_size` (largest-remainder rounding so the total
/// matches `round(test_fraction * n)` where possible) while keeping at least
/// one row of every class on each side.
pub fn split_indices(
    target: &[u32],
    class_names: &[String],
    spec: &SplitSpec,
) -> Result<(Vec<usize>, Vec<usize>), DatasetError> {
    split_indices_on(target, class_names, spec, rng::SPLIT)
}

/// [`split_indices`] drawing from an explicit random stream.
pub(crate) fn split_indices_on(
    target: &[u32],
    class_names: &[String],
    spec: &SplitSpec,
    stream: u64,
) -> Result<(Vec<usize>, Vec<usize>), DatasetError> {
    let n = target.len();
    if !(spec.test_fraction > 0.0 && spec.test_fraction < 1.0) {
        return Err(DatasetError::InvalidSplit(format!(
            "test fraction {} outside (0, 1)",
            spec.test_fraction
        )));
    }
    if n < 2 {
        return Err(DatasetError::InvalidSplit("need at least 2 rows".into()));
    }
    let mut rng = rng::substream(spec.seed, stream);

    let groups: Vec<Vec<usize>> = if spec.stratified {
        let mut g = vec![Vec::new(); class_names.len()];
        for (i, &y) in target.iter().enumerate() {
            g[y as usize].push(i);
        }
        g.retain(|v| !v.is_empty());
        g
    } else {
        vec![(0..n).collect()]
    };

    let quotas: Vec<f64> = groups
        .iter()
        .map(|g| spec.test_fraction * g.len() as f64)
        .collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let target_total = (spec.test_fraction * n as f64).round() as usize;
    let mut order: Vec<usize> = (0..groups.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - quotas[a].floor();
        let rb = quotas[b] - quotas[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    let mut assigned: usize = counts.iter().sum();
    for &k in &order {
        if assigned >= target_total {
            break;
        }
        if quotas[k] > quotas[k].floor() {
            counts[k] += 1;
            assigned += 1;
        }
    }
    for (k, g) in groups.iter().enumerate() {
        if g.len() < 2 {
            return Err(DatasetError::ClassTooSmall {
                class: class_names[target[g[0]] as usize].clone(),
                size: g.len(),
            });
        }
        counts[k] = counts[k].clamp(1, g.len() - 1);
    }

    let mut train = Vec::with_capacity(n);
    let mut test = Vec::with_capacity(target_total);
    for (mut g, count) in groups.into_iter().zip(counts) {
        g.shuffle(&mut rng);
        test.extend_from_slice(&g[..count]);
        train.extend_from_slice(&g[count..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Deterministic train/test split of a dataset.
pub fn split(d: &Dataset, spec: &SplitSpec) -> Result<(Dataset, Dataset), DatasetError> {
    let (train, test) = split_indices(&d.target, &d.class_names, spec)?;
    Ok((d.select_rows(&train), d.select_rows(&test)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn labels(sizes: &[usize]) -> Vec<u32> {
        sizes
            .iter()
            .enumerate()
            .flat_map(|(k, &s)| std::iter::repeat(k as u32).take(s))
            .collect()
    }

    fn names(k: usize) -> Vec<String> {
        (0..k).map(|i| format!("c{i}")).collect()
    }

    fn spec(f: f64, seed: u64) -> SplitSpec {
        SplitSpec {
            test_fraction: f,
            seed,
            stratified: true,
        }
    }

    #[test]
    fn hundred_balanced_rows() {
        let y = labels(&[50, 50]);
        let (train, test) = split_indices(&y, &names(2), &spec(0.33, 1)).unwrap();
        assert_eq!(test.len(), 33);
        assert_eq!(train.len(), 67);
        for k in 0..2 {
            let c = test.iter().filter(|&&i| y[i] == k).count();
            assert!(c == 16 || c == 17, "{c}");
        }
    }

    #[test]
    fn same_seed_same_rows() {
        let y = labels(&[30, 20, 25]);
        let a = split_indices(&y, &names(3), &spec(0.33, 42)).unwrap();
        let b = split_indices(&y, &names(3), &spec(0.33, 42)).unwrap();
        assert_eq!(a, b);
        let c = split_indices(&y, &names(3), &spec(0.33, 43)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn six_rows_three_classes() {
        // Every admissible stratified assignment of 3 classes of 2 rows puts
        // exactly one row of each class on each side.
        let y = labels(&[2, 2, 2]);
        for seed in 0..20 {
            let (train, test) = split_indices(&y, &names(3), &spec(0.33, seed)).unwrap();
            for k in 0..3u32 {
                assert_eq!(test.iter().filter(|&&i| y[i] == k).count(), 1);
                assert_eq!(train.iter().filter(|&&i| y[i] == k).count(), 1);
            }
        }
    }

    #[test]
    fn singleton_class_is_rejected() {
        let y = labels(&[5, 1]);
        assert!(matches!(
            split_indices(&y, &names(2), &spec(0.3, 0)),
            Err(DatasetError::ClassTooSmall { size: 1, .. })
        ));
    }

    #[test]
    fn bad_fraction_is_rejected() {
        let y = labels(&[5, 5]);
        assert!(split_indices(&y, &names(2), &spec(1.0, 0)).is_err());
        assert!(split_indices(&y, &names(2), &spec(0.0, 0)).is_err());
    }

    #[test]
    fn unstratified_split_sizes() {
        let y = labels(&[7, 3]);
        let s = SplitSpec {
            test_fraction: 0.25,
            seed: 3,
            stratified: false,
        };
        let (train, test) = split_indices(&y, &names(2), &s).unwrap();
        assert_eq!(test.len(), 3);
        assert_eq!(train.len(), 7);
    }

    proptest! {
        #[test]
        fn stratified_partition_properties(
            sizes in prop::collection::vec(2usize..40, 2..5),
            f in 0.05f64..0.95,
            seed in any::<u64>(),
        ) {
            let y = labels(&sizes);
            let (train, test) = split_indices(&y, &names(sizes.len()), &spec(f, seed)).unwrap();
            let mut all: Vec<usize> = train.iter().chain(&test).copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..y.len()).collect::<Vec<_>>());
            for (k, &size) in sizes.iter().enumerate() {
                let c = test.iter().filter(|&&i| y[i] == k as u32).count();
                prop_assert!(c >= 1 && c < size);
                let unclamped = (f * size as f64 - c as f64).abs() < 1.0;
                // Clamping to keep both sides non-empty is the only way to
                // move further than one row from the proportional quota.
                prop_assert!(unclamped || c == 1 || c == size - 1);
            }
        }
    }
}
