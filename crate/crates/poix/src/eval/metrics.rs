//! Ranking metrics over per-user recommendation lists: nDCG (accuracy),
//! expected popularity complement (novelty), and item exposure (deviation
//! of recommendation frequency from test frequency).

use std::collections::BTreeMap;

use crate::data::InteractionMatrix;

use super::{RecLists, TestItems};

/// nDCG@k with binary relevance, averaged over evaluable users.
///
/// A user is evaluable with a non-empty test set and a non-empty
/// recommendation list; per user, DCG = Σ 1/log₂(rank+1) over hits in the
/// top k, IDCG assumes min(|test|, k) hits on top. Returns `None` when no
/// user is evaluable.
pub fn ndcg_at_k(recs: &RecLists, test: &TestItems, k: usize) -> Option<f64> {
    let mut total = 0.0;
    let mut users = 0usize;
    for (user, items) in test {
        if items.is_empty() {
            continue;
        }
        let Some(list) = recs.get(user).filter(|l| !l.is_empty()) else {
            continue;
        };
        let mut dcg = 0.0;
        for (n, venue) in list.iter().take(k).enumerate() {
            if items.contains(venue) {
                dcg += 1.0 / ((n + 2) as f64).log2();
            }
        }
        let ideal: f64 = (0..items.len().min(k))
            .map(|n| 1.0 / ((n + 2) as f64).log2())
            .sum();
        total += dcg / ideal;
        users += 1;
    }
    (users > 0).then(|| total / users as f64)
}

/// EPC@k: mean over recommended items of 1 − p(seen|i), where p(seen|i) is
/// the fraction of training users who visited i. Each user's list is
/// weighted 1/|list@k|; users with empty lists are skipped.
pub fn epc_at_k(recs: &RecLists, train: &InteractionMatrix, k: usize) -> Option<f64> {
    let n_users = train.n_users() as f64;
    let mut total = 0.0;
    let mut users = 0usize;
    for list in recs.values() {
        if list.is_empty() {
            continue;
        }
        let top = &list[..list.len().min(k)];
        let sum: f64 = top
            .iter()
            .map(|venue| {
                let p = train
                    .item_index(venue)
                    .map_or(0.0, |i| train.users_of(i).len() as f64 / n_users);
                1.0 - p
            })
            .sum();
        total += sum / top.len() as f64;
        users += 1;
    }
    (users > 0).then(|| total / users as f64)
}

/// Item exposure@k: Σ over items of |U_test(i)/U_test − Rec@k(i)/U_test|,
/// where U_test counts users with non-empty test sets, U_test(i) those whose
/// test set contains i, and Rec@k(i) how many top-k lists contain i.
/// Lower is better; 0 means recommendations mirror test frequencies exactly.
pub fn item_exposure_at_k(recs: &RecLists, test: &TestItems, k: usize) -> Option<f64> {
    let mut test_count: BTreeMap<&str, u64> = BTreeMap::new();
    let mut u_test = 0u64;
    for items in test.values() {
        if items.is_empty() {
            continue;
        }
        u_test += 1;
        for venue in items {
            *test_count.entry(venue).or_insert(0) += 1;
        }
    }
    if u_test == 0 {
        return None;
    }
    let mut rec_count: BTreeMap<&str, u64> = BTreeMap::new();
    for (user, list) in recs {
        // Only lists of test users participate (dumps contain exactly those).
        if !test.get(user).is_some_and(|t| !t.is_empty()) {
            continue;
        }
        for venue in list.iter().take(k) {
            *rec_count.entry(venue).or_insert(0) += 1;
        }
    }
    let mut venues: Vec<&str> = test_count.keys().chain(rec_count.keys()).copied().collect();
    venues.sort_unstable();
    venues.dedup();
    let total: f64 = venues
        .iter()
        .map(|v| {
            let t = *test_count.get(v).unwrap_or(&0) as f64;
            let r = *rec_count.get(v).unwrap_or(&0) as f64;
            (t - r).abs() / u_test as f64
        })
        .sum();
    Some(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::collections::BTreeSet;

    fn lists(entries: &[(&str, &[&str])]) -> RecLists {
        entries
            .iter()
            .map(|(u, vs)| ((*u).to_owned(), vs.iter().map(|v| (*v).to_owned()).collect()))
            .collect()
    }

    fn tests_of(entries: &[(&str, &[&str])]) -> TestItems {
        entries
            .iter()
            .map(|(u, vs)| {
                (
                    (*u).to_owned(),
                    vs.iter().map(|v| (*v).to_owned()).collect::<BTreeSet<_>>(),
                )
            })
            .collect()
    }

    #[test]
    fn ndcg_single_relevant_at_rank_one() {
        let recs = lists(&[("u1", &["a", "b", "c"])]);
        let test = tests_of(&[("u1", &["a"])]);
        assert_abs_diff_eq!(ndcg_at_k(&recs, &test, 5).unwrap(), 1.0);
    }

    #[test]
    fn ndcg_single_relevant_at_rank_two() {
        let recs = lists(&[("u1", &["b", "a", "c"])]);
        let test = tests_of(&[("u1", &["a"])]);
        let got = ndcg_at_k(&recs, &test, 5).unwrap();
        assert_abs_diff_eq!(got, 1.0 / 3f64.log2(), epsilon = 1e-12);
        assert_abs_diff_eq!(got, 0.6309, epsilon = 1e-4);
    }

    #[test]
    fn ndcg_miss_is_zero_and_users_average() {
        let recs = lists(&[("u1", &["x", "y"]), ("u2", &["a"])]);
        let test = tests_of(&[("u1", &["a"]), ("u2", &["a"])]);
        assert_abs_diff_eq!(ndcg_at_k(&recs, &test, 2).unwrap(), 0.5);
    }

    #[test]
    fn ndcg_idcg_truncates_at_k() {
        // 3 test items but k=2: perfect top-2 gives nDCG 1.
        let recs = lists(&[("u1", &["a", "b", "x"])]);
        let test = tests_of(&[("u1", &["a", "b", "c"])]);
        assert_abs_diff_eq!(ndcg_at_k(&recs, &test, 2).unwrap(), 1.0);
    }

    #[test]
    fn ndcg_empty_cases() {
        let recs = lists(&[("u1", &[])]);
        let test = tests_of(&[("u1", &["a"])]);
        assert_eq!(ndcg_at_k(&recs, &test, 5), None);
        let test_empty = tests_of(&[("u1", &[])]);
        let recs2 = lists(&[("u1", &["a"])]);
        assert_eq!(ndcg_at_k(&recs2, &test_empty, 5), None);
    }

    fn train_matrix(events: &[(&'static str, &'static str, i64)]) -> InteractionMatrix {
        InteractionMatrix::from_events(events.iter().copied())
    }

    #[test]
    fn epc_boundary_values() {
        // 2 train users; "fresh" has no visitors, "worn" has both.
        let m = train_matrix(&[("u1", "worn", 0), ("u2", "worn", 1), ("u1", "other", 2)]);
        let novel = lists(&[("u1", &["fresh"])]);
        assert_abs_diff_eq!(epc_at_k(&novel, &m, 1).unwrap(), 1.0);
        let popular = lists(&[("u1", &["worn"])]);
        assert_abs_diff_eq!(epc_at_k(&popular, &m, 1).unwrap(), 0.0);
    }

    #[test]
    fn epc_two_item_mixture() {
        // p(worn)=1 (2/2 visitors), p(half)=0.5 → EPC@2 = (0 + 0.5)/2 = 0.25.
        let m = train_matrix(&[
            ("u1", "worn", 0),
            ("u2", "worn", 1),
            ("u1", "half", 2),
        ]);
        let recs = lists(&[("u9", &["worn", "half"])]);
        assert_abs_diff_eq!(epc_at_k(&recs, &m, 2).unwrap(), 0.25, epsilon = 1e-12);
    }

    #[test]
    fn exposure_matching_multiset_is_zero() {
        let recs = lists(&[("u1", &["a"]), ("u2", &["b"])]);
        let test = tests_of(&[("u1", &["a"]), ("u2", &["b"])]);
        assert_abs_diff_eq!(item_exposure_at_k(&recs, &test, 1).unwrap(), 0.0);
    }

    #[test]
    fn exposure_concentration_fixture() {
        // Test {u1:A, u2:B}, both recommended [A]: |1/2−2/2| + |1/2−0| = 1.
        let recs = lists(&[("u1", &["A"]), ("u2", &["A"])]);
        let test = tests_of(&[("u1", &["A"]), ("u2", &["B"])]);
        assert_abs_diff_eq!(item_exposure_at_k(&recs, &test, 1).unwrap(), 1.0);
    }

    #[test]
    fn exposure_invariant_to_order_within_topk() {
        let test = tests_of(&[("u1", &["a", "b"]), ("u2", &["c"])]);
        let a = lists(&[("u1", &["a", "c"]), ("u2", &["b", "a"])]);
        let b = lists(&[("u1", &["c", "a"]), ("u2", &["a", "b"])]);
        assert_abs_diff_eq!(
            item_exposure_at_k(&a, &test, 2).unwrap(),
            item_exposure_at_k(&b, &test, 2).unwrap()
        );
    }

    #[test]
    fn exposure_requires_test_users() {
        let recs = lists(&[("u1", &["a"])]);
        let test = tests_of(&[("u1", &[])]);
        assert_eq!(item_exposure_at_k(&recs, &test, 1), None);
    }
}
