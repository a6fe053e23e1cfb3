//! Check-in data model: parsing, cleaning, home-city detection and the
//! user×venue interaction matrix.

mod matrix;
mod parse;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

pub use matrix::{InteractionMatrix, RawEvent};
pub use parse::{
    parse_canonical_csv, parse_tist2015, write_canonical_csv, TistWarnings, CANONICAL_HEADER,
};

/// One timestamped visit of a user at a venue.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckIn {
    pub user_id: String,
    pub venue_id: String,
    /// UTC epoch seconds.
    pub ts: i64,
    pub lat: f64,
    pub lon: f64,
    pub category: String,
    /// Venue's city label; may carry a country suffix after the last comma
    /// (`"New York, US"`). Empty = unlabeled.
    pub city: String,
}

/// User-origin classes used by the subsample filters. `All` disables the
/// filter; the other three partition users by home city relative to the
/// configured target city and country.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Origin {
    All,
    #[serde(rename = "NYC")]
    Nyc,
    #[serde(rename = "US")]
    Us,
    Other,
}

impl Origin {
    pub fn as_str(&self) -> &'static str {
        match self {
            Origin::All => "All",
            Origin::Nyc => "NYC",
            Origin::Us => "US",
            Origin::Other => "Other",
        }
    }
}

impl std::str::FromStr for Origin {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "All" | "ALL" => Ok(Origin::All),
            "NYC" => Ok(Origin::Nyc),
            "US" => Ok(Origin::Us),
            "Other" | "OTHER" => Ok(Origin::Other),
            other => Err(format!("unknown origin {other:?}")),
        }
    }
}

/// Home-city classification of one user.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OriginClass {
    #[serde(rename = "NYC")]
    Nyc,
    #[serde(rename = "US")]
    Us,
    Other,
    /// No labeled check-ins; excluded from origin-filtered subsamples.
    Unknown,
}

impl OriginClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            OriginClass::Nyc => "NYC",
            OriginClass::Us => "US",
            OriginClass::Other => "Other",
            OriginClass::Unknown => "Unknown",
        }
    }

    pub fn matches(&self, origin: Origin) -> bool {
        match origin {
            Origin::All => true,
            Origin::Nyc => *self == OriginClass::Nyc,
            Origin::Us => *self == OriginClass::Us,
            Origin::Other => *self == OriginClass::Other,
        }
    }
}

impl std::str::FromStr for OriginClass {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "NYC" => Ok(OriginClass::Nyc),
            "US" => Ok(OriginClass::Us),
            "Other" => Ok(OriginClass::Other),
            "Unknown" => Ok(OriginClass::Unknown),
            other => Err(format!("unknown origin class {other:?}")),
        }
    }
}

/// Plurality home city of one user plus its origin class.
#[derive(Debug, Clone, PartialEq)]
pub struct UserHomeLabel {
    pub user_id: String,
    /// None when the user has no labeled check-ins.
    pub home_city: Option<String>,
    pub class: OriginClass,
}

/// Per-venue metadata, first occurrence wins.
#[derive(Debug, Clone, PartialEq)]
pub struct VenueInfo {
    pub lat: f64,
    pub lon: f64,
    pub category: String,
    pub city: String,
}

/// venue_id → coordinates, category, city.
#[derive(Debug, Clone, Default)]
pub struct VenueCatalog {
    map: HashMap<String, VenueInfo>,
}

impl VenueCatalog {
    pub fn from_checkins<'a, I: IntoIterator<Item = &'a CheckIn>>(checkins: I) -> Self {
        let mut map = HashMap::new();
        for c in checkins {
            map.entry(c.venue_id.clone()).or_insert_with(|| VenueInfo {
                lat: c.lat,
                lon: c.lon,
                category: c.category.clone(),
                city: c.city.clone(),
            });
        }
        VenueCatalog { map }
    }

    /// Builds a catalog from explicit rows, e.g. a venue table read back
    /// from disk. Later duplicates of a venue id are ignored.
    pub fn from_rows<I: IntoIterator<Item = (String, VenueInfo)>>(rows: I) -> Self {
        let mut map = HashMap::new();
        for (id, info) in rows {
            map.entry(id).or_insert(info);
        }
        VenueCatalog { map }
    }

    pub fn get(&self, venue_id: &str) -> Option<&VenueInfo> {
        self.map.get(venue_id)
    }

    pub fn coords(&self, venue_id: &str) -> Option<(f64, f64)> {
        self.map.get(venue_id).map(|v| (v.lat, v.lon))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Removes visits at residence-category venues and exact duplicate rows
/// (same user, venue and timestamp), then sorts chronologically per user.
///
/// Idempotent: applying it twice gives the same rows as applying it once.
pub fn preprocess(mut checkins: Vec<CheckIn>, residence_categories: &[String]) -> Vec<CheckIn> {
    checkins.retain(|c| !residence_categories.iter().any(|r| r == &c.category));
    checkins.sort_by(|a, b| {
        (&a.user_id, a.ts, &a.venue_id).cmp(&(&b.user_id, b.ts, &b.venue_id))
    });
    checkins.dedup_by(|a, b| a.user_id == b.user_id && a.venue_id == b.venue_id && a.ts == b.ts);
    checkins
}

/// Splits a city label into (city, country) candidates. Labels may carry a
/// country suffix after the last comma; a bare label doubles as both.
fn split_city_label(label: &str) -> (&str, &str) {
    match label.rsplit_once(',') {
        Some((city, country)) => (city.trim(), country.trim()),
        None => (label.trim(), label.trim()),
    }
}

fn classify(home_city: &str, target_city: &str, target_country: &str) -> OriginClass {
    let (city, country) = split_city_label(home_city);
    if city == target_city {
        OriginClass::Nyc
    } else if country == target_country {
        OriginClass::Us
    } else {
        OriginClass::Other
    }
}

/// Home city of `user_id` by plurality over the user's labeled check-ins;
/// count ties go to the city checked into earliest (then lexicographically,
/// for fully deterministic behaviour on equal timestamps).
pub fn detect_home(
    global_checkins: &[CheckIn],
    user_id: &str,
    target_city: &str,
    target_country: &str,
) -> UserHomeLabel {
    // (count, earliest ts) per city.
    let mut per_city: HashMap<&str, (u64, i64)> = HashMap::new();
    for c in global_checkins.iter().filter(|c| c.user_id == user_id) {
        if c.city.is_empty() {
            continue;
        }
        let e = per_city.entry(c.city.as_str()).or_insert((0, c.ts));
        e.0 += 1;
        e.1 = e.1.min(c.ts);
    }
    let best = per_city
        .into_iter()
        .min_by(|(city_a, (n_a, t_a)), (city_b, (n_b, t_b))| {
            // Highest count first, then earliest check-in, then name.
            n_b.cmp(n_a).then(t_a.cmp(t_b)).then(city_a.cmp(city_b))
        })
        .map(|(city, _)| city.to_owned());
    match best {
        Some(home) => {
            let class = classify(&home, target_city, target_country);
            UserHomeLabel {
                user_id: user_id.to_owned(),
                home_city: Some(home),
                class,
            }
        }
        None => UserHomeLabel {
            user_id: user_id.to_owned(),
            home_city: None,
            class: OriginClass::Unknown,
        },
    }
}

/// [`detect_home`] for every user in one pass over the stream.
pub fn detect_homes(
    global_checkins: &[CheckIn],
    target_city: &str,
    target_country: &str,
) -> HashMap<String, UserHomeLabel> {
    let mut per_user: HashMap<&str, HashMap<&str, (u64, i64)>> = HashMap::new();
    let mut seen: Vec<&str> = Vec::new();
    for c in global_checkins {
        let cities = per_user.entry(c.user_id.as_str()).or_insert_with(|| {
            seen.push(c.user_id.as_str());
            HashMap::new()
        });
        if c.city.is_empty() {
            continue;
        }
        let e = cities.entry(c.city.as_str()).or_insert((0, c.ts));
        e.0 += 1;
        e.1 = e.1.min(c.ts);
    }
    let mut out = HashMap::with_capacity(per_user.len());
    for user in seen {
        let cities = &per_user[user];
        let best = cities
            .iter()
            .min_by(|(city_a, (n_a, t_a)), (city_b, (n_b, t_b))| {
                n_b.cmp(n_a).then(t_a.cmp(t_b)).then(city_a.cmp(city_b))
            })
            .map(|(city, _)| (*city).to_owned());
        let label = match best {
            Some(home) => {
                let class = classify(&home, target_city, target_country);
                UserHomeLabel {
                    user_id: user.to_owned(),
                    home_city: Some(home),
                    class,
                }
            }
            None => UserHomeLabel {
                user_id: user.to_owned(),
                home_city: None,
                class: OriginClass::Unknown,
            },
        };
        out.insert(user.to_owned(), label);
    }
    out
}
