//! Per-user temporal train/test split.

use crate::data::InteractionMatrix;

use super::TestSet;

/// Splits each user's unique venues by first-visit time: the oldest
/// ⌊0.8·n⌋ (minimum 1) go to train, the rest to test. Repeat visits follow
/// their venue, so the training matrix keeps the full raw stream of its
/// train venues. Users with nothing left over simply have no test entry.
pub fn temporal_split(matrix: &InteractionMatrix) -> (InteractionMatrix, TestSet) {
    let mut train_events: Vec<(&str, &str, i64)> = Vec::new();
    let mut test = TestSet::new();

    for u in 0..matrix.n_users() {
        // First-visit order: raw events are sorted by (ts, item), so the
        // first occurrence of each item enumerates venues by first-visit
        // time with index order breaking timestamp ties.
        let mut first_visits: Vec<(u32, i64)> = Vec::new();
        let mut seen = vec![false; matrix.n_items()];
        for e in matrix.raw_of(u) {
            if !seen[e.item as usize] {
                seen[e.item as usize] = true;
                first_visits.push((e.item, e.ts));
            }
        }
        let n = first_visits.len();
        let n_train = (4 * n / 5).max(1); // ⌊0.8·n⌋ without float rounding
        let train_items: Vec<bool> = {
            let mut mask = vec![false; matrix.n_items()];
            for &(item, _) in &first_visits[..n_train] {
                mask[item as usize] = true;
            }
            mask
        };
        for e in matrix.raw_of(u) {
            if train_items[e.item as usize] {
                train_events.push((matrix.user_id(u), matrix.item_id(e.item as usize), e.ts));
            }
        }
        if n_train < n {
            let held_out: Vec<(String, i64)> = first_visits[n_train..]
                .iter()
                .map(|&(item, ts)| (matrix.item_id(item as usize).to_owned(), ts))
                .collect();
            test.insert(matrix.user_id(u).to_owned(), held_out);
        }
    }

    (InteractionMatrix::from_events(train_events), test)
}
