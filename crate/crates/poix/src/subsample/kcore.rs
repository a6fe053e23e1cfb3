//! Maximal k-core of the bipartite user–venue graph.

use crate::data::InteractionMatrix;

/// Iteratively deletes users and venues with fewer than `k` unique
/// interactions until none remain, and returns the induced submatrix — the
/// standard maximal k-core (possibly empty).
pub fn enforce_k_core(matrix: &InteractionMatrix, k: u32) -> InteractionMatrix {
    let k = k as usize;
    let mut user_deg: Vec<usize> = (0..matrix.n_users()).map(|u| matrix.items_of(u).len()).collect();
    let mut item_deg: Vec<usize> = (0..matrix.n_items()).map(|i| matrix.users_of(i).len()).collect();
    let mut keep_user = vec![true; matrix.n_users()];
    let mut keep_item = vec![true; matrix.n_items()];

    // Peeling with an explicit worklist; each removal decrements the
    // neighbours' degrees and enqueues any that fall below k.
    let mut pending_users: Vec<usize> =
        (0..user_deg.len()).filter(|&u| user_deg[u] < k).collect();
    let mut pending_items: Vec<usize> =
        (0..item_deg.len()).filter(|&i| item_deg[i] < k).collect();

    while !pending_users.is_empty() || !pending_items.is_empty() {
        while let Some(u) = pending_users.pop() {
            if !keep_user[u] {
                continue;
            }
            keep_user[u] = false;
            for &i in matrix.items_of(u) {
                let i = i as usize;
                if keep_item[i] {
                    item_deg[i] -= 1;
                    if item_deg[i] < k {
                        pending_items.push(i);
                    }
                }
            }
        }
        while let Some(i) = pending_items.pop() {
            if !keep_item[i] {
                continue;
            }
            keep_item[i] = false;
            for &u in matrix.users_of(i) {
                let u = u as usize;
                if keep_user[u] {
                    user_deg[u] -= 1;
                    if user_deg[u] < k {
                        pending_users.push(u);
                    }
                }
            }
        }
    }

    matrix.filter(&keep_user, &keep_item)
}
