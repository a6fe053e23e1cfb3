//! Binary user×venue interaction matrix plus the raw check-in stream.

use std::collections::HashMap;

use super::CheckIn;

/// One raw visit in a user's chronological stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RawEvent {
    pub item: u32,
    pub ts: i64,
}

/// Sparse binary visit matrix (cell = 1 iff the user visited the venue at
/// least once) together with every raw check-in, repeats included.
///
/// Users and items are stored sorted by id, so ascending index order equals
/// ascending lexicographic id order — the deterministic tie-break used by
/// ranking code relies on this.
#[derive(Debug, Clone, Default)]
pub struct InteractionMatrix {
    users: Vec<String>,
    items: Vec<String>,
    user_lookup: HashMap<String, u32>,
    item_lookup: HashMap<String, u32>,
    /// Per user: sorted unique item indices.
    user_items: Vec<Vec<u32>>,
    /// Per item: sorted unique user indices.
    item_users: Vec<Vec<u32>>,
    /// Per user: raw events sorted by (ts, item).
    raw: Vec<Vec<RawEvent>>,
}

impl InteractionMatrix {
    /// Builds from `(user_id, venue_id, ts)` events (repeats allowed).
    pub fn from_events<'a, I>(events: I) -> Self
    where
        I: IntoIterator<Item = (&'a str, &'a str, i64)>,
        I::IntoIter: Clone,
    {
        let events = events.into_iter();
        let mut users: Vec<&str> = Vec::new();
        let mut items: Vec<&str> = Vec::new();
        for (u, i, _) in events.clone() {
            users.push(u);
            items.push(i);
        }
        users.sort_unstable();
        users.dedup();
        items.sort_unstable();
        items.dedup();

        let user_lookup: HashMap<String, u32> = users
            .iter()
            .enumerate()
            .map(|(idx, u)| ((*u).to_owned(), idx as u32))
            .collect();
        let item_lookup: HashMap<String, u32> = items
            .iter()
            .enumerate()
            .map(|(idx, i)| ((*i).to_owned(), idx as u32))
            .collect();

        let mut raw = vec![Vec::new(); users.len()];
        for (u, i, ts) in events {
            let ui = user_lookup[u] as usize;
            let ii = item_lookup[i];
            raw[ui].push(RawEvent { item: ii, ts });
        }
        let mut user_items = vec![Vec::new(); users.len()];
        let mut item_users = vec![Vec::new(); items.len()];
        for (ui, events) in raw.iter_mut().enumerate() {
            events.sort_unstable_by_key(|e| (e.ts, e.item));
            let mut unique: Vec<u32> = events.iter().map(|e| e.item).collect();
            unique.sort_unstable();
            unique.dedup();
            for &ii in &unique {
                item_users[ii as usize].push(ui as u32);
            }
            user_items[ui] = unique;
        }

        InteractionMatrix {
            users: users.into_iter().map(str::to_owned).collect(),
            items: items.into_iter().map(str::to_owned).collect(),
            user_lookup,
            item_lookup,
            user_items,
            item_users,
            raw,
        }
    }

    pub fn from_checkins<'a, I: IntoIterator<Item = &'a CheckIn>>(checkins: I) -> Self
    where
        I::IntoIter: Clone,
    {
        Self::from_events(
            checkins
                .into_iter()
                .map(|c| (c.user_id.as_str(), c.venue_id.as_str(), c.ts)),
        )
    }

    pub fn n_users(&self) -> usize {
        self.users.len()
    }

    pub fn n_items(&self) -> usize {
        self.items.len()
    }

    pub fn users(&self) -> &[String] {
        &self.users
    }

    pub fn items(&self) -> &[String] {
        &self.items
    }

    pub fn user_id(&self, u: usize) -> &str {
        &self.users[u]
    }

    pub fn item_id(&self, i: usize) -> &str {
        &self.items[i]
    }

    pub fn user_index(&self, id: &str) -> Option<usize> {
        self.user_lookup.get(id).map(|&u| u as usize)
    }

    pub fn item_index(&self, id: &str) -> Option<usize> {
        self.item_lookup.get(id).map(|&i| i as usize)
    }

    /// Sorted unique items visited by user `u`.
    pub fn items_of(&self, u: usize) -> &[u32] {
        &self.user_items[u]
    }

    /// Sorted unique visitors of item `i`.
    pub fn users_of(&self, i: usize) -> &[u32] {
        &self.item_users[i]
    }

    /// Chronological raw events of user `u`, repeats included.
    pub fn raw_of(&self, u: usize) -> &[RawEvent] {
        &self.raw[u]
    }

    /// 1-cell test: has `u` ever visited `i`?
    pub fn has(&self, u: usize, i: u32) -> bool {
        self.user_items[u].binary_search(&i).is_ok()
    }

    /// |C|: number of nonzero cells (unique user–venue visits).
    pub fn unique_count(&self) -> u64 {
        self.user_items.iter().map(|v| v.len() as u64).sum()
    }

    /// Total raw check-in count, repeats included.
    pub fn raw_count(&self) -> u64 {
        self.raw.iter().map(|v| v.len() as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.users.is_empty() || self.items.is_empty()
    }

    /// Induced submatrix on the given users/items (given as keep-masks).
    /// Raw events survive only if both endpoints survive.
    pub fn filter(&self, keep_user: &[bool], keep_item: &[bool]) -> InteractionMatrix {
        let mut events: Vec<(&str, &str, i64)> = Vec::new();
        for (u, raw) in self.raw.iter().enumerate() {
            if !keep_user[u] {
                continue;
            }
            for e in raw {
                if keep_item[e.item as usize] {
                    events.push((self.user_id(u), self.item_id(e.item as usize), e.ts));
                }
            }
        }
        InteractionMatrix::from_events(events)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn repeats_collapse_to_one_cell() {
        let m = InteractionMatrix::from_events([("u1", "v1", 10), ("u1", "v1", 20), ("u1", "v1", 5)]);
        assert_eq!(m.n_users(), 1);
        assert_eq!(m.n_items(), 1);
        assert_eq!(m.unique_count(), 1);
        assert_eq!(m.raw_count(), 3);
        assert_eq!(m.raw_of(0)[0].ts, 5);
        assert_eq!(m.raw_of(0)[2].ts, 20);
    }

    #[test]
    fn ids_sorted_and_indexed() {
        let m = InteractionMatrix::from_events([("b", "y", 1), ("a", "x", 2), ("a", "y", 3)]);
        assert_eq!(m.users(), &["a", "b"]);
        assert_eq!(m.items(), &["x", "y"]);
        assert_eq!(m.user_index("a"), Some(0));
        assert_eq!(m.item_index("y"), Some(1));
        assert!(m.has(0, 0) && m.has(0, 1) && m.has(1, 1));
        assert!(!m.has(1, 0));
        assert_eq!(m.users_of(1), &[0, 1]);
    }

    #[test]
    fn cells_match_brute_force_scan() {
        // Pseudo-random 20×30 stream; cell(u,i)=1 ⇔ the stream contains (u,i).
        let mut events = Vec::new();
        let mut state = 0x12345678u64;
        for n in 0..400 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let u = (state >> 33) % 20;
            let i = (state >> 13) % 30;
            events.push((format!("u{u:02}"), format!("v{i:02}"), n as i64));
        }
        let pairs: HashSet<(String, String)> = events
            .iter()
            .map(|(u, i, _)| (u.clone(), i.clone()))
            .collect();
        let m = InteractionMatrix::from_events(
            events.iter().map(|(u, i, t)| (u.as_str(), i.as_str(), *t)),
        );
        assert_eq!(m.unique_count() as usize, pairs.len());
        for u in 0..m.n_users() {
            for i in 0..m.n_items() {
                let expected =
                    pairs.contains(&(m.user_id(u).to_owned(), m.item_id(i).to_owned()));
                assert_eq!(m.has(u, i as u32), expected);
            }
        }
        assert!(m.unique_count() <= m.raw_count());
    }

    #[test]
    fn filter_keeps_induced_submatrix() {
        let m = InteractionMatrix::from_events([
            ("a", "x", 1),
            ("a", "y", 2),
            ("b", "x", 3),
            ("b", "z", 4),
        ]);
        // Drop user "b" and item "y".
        let keep_u = vec![true, false];
        let keep_i = vec![true, false, true];
        let f = m.filter(&keep_u, &keep_i);
        assert_eq!(f.users(), &["a"]);
        assert_eq!(f.items(), &["x"]);
        assert_eq!(f.unique_count(), 1);
    }
}
