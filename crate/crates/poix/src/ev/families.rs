//! Structural features and the per-user feature families (popularity bias,
//! long-tail share, activity span).

use crate::data::InteractionMatrix;

/// (SpaceSize, Shape, Density, Cp_u, Cp_i) of a matrix:
/// |U|·|I|, |U|/|I|, |C|/(|U|·|I|), |C|/|U|, |C|/|I| — with |C| counted as
/// unique visits (nonzero cells).
pub fn structure_evs(matrix: &InteractionMatrix) -> (f64, f64, f64, f64, f64) {
    let users = matrix.n_users() as f64;
    let items = matrix.n_items() as f64;
    let c = matrix.unique_count() as f64;
    let space = users * items;
    (space, users / items, c / space, c / users, c / items)
}

/// Per-item popularity φ(i) = distinct visitors / |U|.
pub fn item_popularity(matrix: &InteractionMatrix) -> Vec<f64> {
    let users = matrix.n_users() as f64;
    (0..matrix.n_items())
        .map(|i| matrix.users_of(i).len() as f64 / users)
        .collect()
}

/// Per-user mean popularity of the user's unique visited items.
pub fn popularity_bias_per_user(matrix: &InteractionMatrix) -> Vec<f64> {
    let phi = item_popularity(matrix);
    (0..matrix.n_users())
        .map(|u| {
            let items = matrix.items_of(u);
            items.iter().map(|&i| phi[i as usize]).sum::<f64>() / items.len() as f64
        })
        .collect()
}

/// Item indices of the long tail Γ: items are ranked by distinct visitors
/// (descending, ties by ascending id); the short head is the smallest prefix
/// holding at least 80% of all unique visits, and Γ is everything after it.
pub fn long_tail_items(matrix: &InteractionMatrix) -> Vec<bool> {
    let mut ranked: Vec<usize> = (0..matrix.n_items()).collect();
    // Item index order is id order, so the tie-break is the index itself.
    ranked.sort_by_key(|&i| (std::cmp::Reverse(matrix.users_of(i).len()), i));
    let total: u64 = matrix.unique_count();
    let mut in_tail = vec![true; matrix.n_items()];
    let mut cum: u64 = 0;
    for &i in &ranked {
        if 5 * cum >= 4 * total {
            break; // short head already reached 80%
        }
        cum += matrix.users_of(i).len() as u64;
        in_tail[i] = false;
    }
    in_tail
}

/// Per-user fraction of visited items that lie in the long tail.
pub fn long_tail_per_user(matrix: &InteractionMatrix) -> Vec<f64> {
    let in_tail = long_tail_items(matrix);
    (0..matrix.n_users())
        .map(|u| {
            let items = matrix.items_of(u);
            let tail = items.iter().filter(|&&i| in_tail[i as usize]).count();
            tail as f64 / items.len() as f64
        })
        .collect()
}

/// Per-user activity span in fractional days: last minus first raw
/// check-in, repeats included.
pub fn duration_days_per_user(matrix: &InteractionMatrix) -> Vec<f64> {
    (0..matrix.n_users())
        .map(|u| {
            let raw = matrix.raw_of(u);
            let first = raw.first().map_or(0, |e| e.ts);
            let last = raw.last().map_or(0, |e| e.ts);
            (last - first) as f64 / 86_400.0
        })
        .collect()
}
