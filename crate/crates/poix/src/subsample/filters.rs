//! Stream-level filters: user origin, season, drop-top-popular venues.

use std::collections::{HashMap, HashSet};

use chrono::{Datelike, TimeZone, Utc};

use crate::data::{CheckIn, Origin, UserHomeLabel};

use super::Season;

/// Keeps check-ins of users whose origin class matches `origin`.
/// `All` is the identity; users without a label (or labeled Unknown) are
/// excluded by every other value.
pub fn filter_origin<'a>(
    checkins: &[&'a CheckIn],
    labels: &HashMap<String, UserHomeLabel>,
    origin: Origin,
) -> Vec<&'a CheckIn> {
    if origin == Origin::All {
        return checkins.to_vec();
    }
    checkins
        .iter()
        .copied()
        .filter(|c| {
            labels
                .get(&c.user_id)
                .is_some_and(|l| l.class.matches(origin))
        })
        .collect()
}

/// Keeps check-ins whose UTC month falls in `season`.
pub fn filter_season<'a>(checkins: &[&'a CheckIn], season: Season) -> Vec<&'a CheckIn> {
    if season == Season::All {
        return checkins.to_vec();
    }
    checkins
        .iter()
        .copied()
        .filter(|c| {
            Utc.timestamp_opt(c.ts, 0)
                .single()
                .is_some_and(|t| season.contains_month(t.month()))
        })
        .collect()
}

/// Removes the ⌈pct·|venues|⌉ most popular venues (popularity = distinct
/// visitors) and all their check-ins. Count ties are broken by ascending
/// venue_id, so the lexicographically smallest of equally popular venues is
/// dropped first.
pub fn drop_top_venues<'a>(checkins: &[&'a CheckIn], pct: f64) -> Vec<&'a CheckIn> {
    let mut visitors: HashMap<&str, HashSet<&str>> = HashMap::new();
    for c in checkins {
        visitors
            .entry(c.venue_id.as_str())
            .or_default()
            .insert(c.user_id.as_str());
    }
    let n_venues = visitors.len();
    if n_venues == 0 {
        return Vec::new();
    }
    let n_drop = ((pct * n_venues as f64).ceil() as usize).min(n_venues);

    let mut ranked: Vec<(&str, usize)> = visitors
        .iter()
        .map(|(venue, users)| (*venue, users.len()))
        .collect();
    ranked.sort_unstable_by(|(id_a, n_a), (id_b, n_b)| n_b.cmp(n_a).then(id_a.cmp(id_b)));
    let dropped: HashSet<&str> = ranked[..n_drop].iter().map(|(id, _)| *id).collect();

    checkins
        .iter()
        .copied()
        .filter(|c| !dropped.contains(c.venue_id.as_str()))
        .collect()
}
