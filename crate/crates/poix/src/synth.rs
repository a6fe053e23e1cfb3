//! Deterministic synthetic check-in city.
//!
//! Generates a canonical-format data set with the structure the pipeline
//! cares about: venues in spatial clusters inside the configured bbox,
//! power-law venue popularity, per-user activity windows and seasonal
//! preferences, a visitor population whose plurality home city lies outside
//! the bbox, a sprinkle of residence-category venues, and occasional exact
//! duplicate rows. Everything derives from one seed, so output files are
//! reproducible byte for byte.

use rand::Rng;

use crate::config::{default_bbox, BBox};
use crate::data::CheckIn;
use crate::error::Error;
use crate::seeds;
use crate::subsample::Season;
use crate::Result;

/// Knobs of the generator. `checkins` counts in-city rows; visitors get a
/// small extra home-city trace on top (outside the bbox) so plurality home
/// detection classifies them away from the target city.
#[derive(Debug, Clone)]
pub struct SynthParams {
    pub users: usize,
    pub venues: usize,
    pub checkins: usize,
    pub clusters: usize,
    /// Venue popularity weight ∝ rank^(−skew); 0 = approximately uniform.
    pub popularity_skew: f64,
    /// Probability that a visit is forced into its user's preferred season.
    pub seasonality: f64,
    /// Fraction of users whose home city is not the target city.
    pub visitor_fraction: f64,
    pub bbox: BBox,
    /// UTC epoch of the earliest possible check-in.
    pub start: i64,
    pub span_days: u32,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            users: 500,
            venues: 300,
            checkins: 20_000,
            clusters: 6,
            popularity_skew: 1.0,
            seasonality: 0.6,
            visitor_fraction: 0.25,
            bbox: default_bbox(),
            // 2012-04-01T00:00:00Z; 18 months covers both season halves.
            start: 1333238400,
            span_days: 540,
        }
    }
}

const CATEGORIES: [&str; 6] = ["Cafe", "Park", "Museum", "Bar", "Gym", "Theater"];
/// Every 50th venue is a residence, which preprocessing must strip.
const RESIDENCE_EVERY: usize = 50;
/// Foreign home cities for the visitor population (label, lat, lon).
const FOREIGN: [(&str, f64, f64); 4] = [
    ("Boston, US", 42.3601, -71.0589),
    ("Chicago, US", 41.8781, -87.6298),
    ("London, GB", 51.5074, -0.1278),
    ("Tokyo, JP", 35.6762, 139.6503),
];
/// Every Nth generated row is duplicated exactly (same timestamp), so the
/// duplicate-removal path always has work to do.
const DUPLICATE_EVERY: usize = 509;

struct Venue {
    id: String,
    lat: f64,
    lon: f64,
    category: String,
    /// Popularity weight for sampling.
    weight: f64,
}

/// Index sampled from cumulative weights (`cum` inclusive prefix sums).
fn pick(cum: &[f64], rng: &mut impl Rng) -> usize {
    let total = *cum.last().expect("non-empty weight table");
    let x = rng.gen::<f64>() * total;
    cum.partition_point(|&c| c <= x).min(cum.len() - 1)
}

fn cumulative(weights: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut acc = 0.0;
    weights
        .map(|w| {
            acc += w;
            acc
        })
        .collect()
}

fn month_of(ts: i64) -> u32 {
    use chrono::{Datelike, TimeZone, Utc};
    Utc.timestamp_opt(ts, 0).single().map(|t| t.month()).unwrap_or(1)
}

/// Generates the full check-in stream for one synthetic city.
pub fn generate(params: &SynthParams, seed: u64) -> Result<Vec<CheckIn>> {
    if params.users == 0 || params.venues == 0 || params.checkins == 0 {
        return Err(Error::Config(
            "synthetic city needs nonzero users, venues and check-ins".into(),
        ));
    }
    if params.clusters == 0 {
        return Err(Error::Config("cluster count must be positive".into()));
    }
    if params.clusters > params.venues {
        return Err(Error::Config(format!(
            "{} clusters cannot be filled by {} venues",
            params.clusters, params.venues
        )));
    }
    if !(params.bbox.max_lat > params.bbox.min_lat && params.bbox.max_lon > params.bbox.min_lon) {
        return Err(Error::Config("degenerate bounding box".into()));
    }

    let city_label = "New York, US".to_string();
    let span_s = i64::from(params.span_days) * 86_400;

    // --- Venues: clustered coordinates, shuffled popularity ranks. ---
    let mut vrng = seeds::rng(seed, "synth/venues");
    let b = &params.bbox;
    let (lat_span, lon_span) = (b.max_lat - b.min_lat, b.max_lon - b.min_lon);
    let centers: Vec<(f64, f64)> = (0..params.clusters)
        .map(|_| {
            (
                b.min_lat + lat_span * (0.1 + 0.8 * vrng.gen::<f64>()),
                b.min_lon + lon_span * (0.1 + 0.8 * vrng.gen::<f64>()),
            )
        })
        .collect();
    // Random permutation of popularity ranks, so venue id ≁ popularity.
    let mut ranks: Vec<usize> = (0..params.venues).collect();
    for i in (1..ranks.len()).rev() {
        ranks.swap(i, vrng.gen_range(0..=i));
    }
    let gauss = |rng: &mut rand_chacha::ChaCha8Rng| {
        let u1: f64 = rng.gen::<f64>().max(1e-12);
        let u2: f64 = rng.gen();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    };
    let venues: Vec<Venue> = (0..params.venues)
        .map(|v| {
            let (clat, clon) = centers[v % params.clusters];
            let lat = (clat + 0.008 * gauss(&mut vrng)).clamp(b.min_lat, b.max_lat);
            let lon = (clon + 0.008 * gauss(&mut vrng)).clamp(b.min_lon, b.max_lon);
            let category = if (v + 1) % RESIDENCE_EVERY == 0 {
                "Residences".to_string()
            } else {
                CATEGORIES[v % CATEGORIES.len()].to_string()
            };
            Venue {
                id: format!("v{v:05}"),
                lat,
                lon,
                category,
                weight: ((ranks[v] + 1) as f64).powf(-params.popularity_skew),
            }
        })
        .collect();
    let global_cum = cumulative(venues.iter().map(|v| v.weight));
    // Per-cluster-pair venue pools: a user samples from two clusters.
    let pool_of = |a: usize, b: usize| -> Vec<usize> {
        (0..params.venues)
            .filter(|v| v % params.clusters == a || v % params.clusters == b)
            .collect()
    };

    // --- Users: activity weight, window, season and cluster tastes. ---
    let mut urng = seeds::rng(seed, "synth/users");
    let mut user_ranks: Vec<usize> = (0..params.users).collect();
    for i in (1..user_ranks.len()).rev() {
        user_ranks.swap(i, urng.gen_range(0..=i));
    }
    struct User {
        id: String,
        window: (i64, i64),
        season: Season,
        pool: Vec<usize>,
        pool_cum: Vec<f64>,
        foreign: Option<usize>,
    }
    let visitor_cadence = (params.users as f64 * params.visitor_fraction).round() as usize;
    let mut foreign_ordinal = 0usize;
    let users: Vec<User> = (0..params.users)
        .map(|u| {
            let t0 = params.start + (urng.gen::<f64>() * 0.4 * span_s as f64) as i64;
            let len = ((0.25 + 0.35 * urng.gen::<f64>()) * span_s as f64) as i64;
            let season = if u % 2 == 0 { Season::Summer } else { Season::Winter };
            let a = u % params.clusters;
            let c2 = if params.clusters > 1 { (u / params.clusters + 1 + a) % params.clusters } else { a };
            let pool = pool_of(a, c2);
            let pool_cum = cumulative(pool.iter().map(|&v| venues[v].weight));
            // Evenly spreads exactly `visitor_cadence` visitors over the ids.
            let is_visitor =
                (u * visitor_cadence) / params.users != ((u + 1) * visitor_cadence) / params.users;
            let foreign = if is_visitor {
                let f = foreign_ordinal % FOREIGN.len();
                foreign_ordinal += 1;
                Some(f)
            } else {
                None
            };
            User {
                id: format!("u{u:05}"),
                window: (t0, (t0 + len).min(params.start + span_s)),
                season,
                pool,
                pool_cum,
                foreign,
            }
        })
        .collect();
    let user_cum = cumulative(
        user_ranks
            .iter()
            .map(|&r| ((r + 1) as f64).powf(-0.7)),
    );

    // --- Visits. ---
    let mut rng = seeds::rng(seed, "synth/visits");
    let mut rows: Vec<CheckIn> = Vec::with_capacity(params.checkins + params.users);
    let mut city_count = vec![0usize; params.users];
    for _ in 0..params.checkins {
        let u = pick(&user_cum, &mut rng);
        let user = &users[u];
        let v = if rng.gen::<f64>() < 0.7 {
            user.pool[pick(&user.pool_cum, &mut rng)]
        } else {
            pick(&global_cum, &mut rng)
        };
        let (t0, t1) = user.window;
        let mut ts = t0 + (rng.gen::<f64>() * (t1 - t0).max(1) as f64) as i64;
        if rng.gen::<f64>() < params.seasonality {
            for _ in 0..50 {
                if user.season.contains_month(month_of(ts)) {
                    break;
                }
                ts = t0 + (rng.gen::<f64>() * (t1 - t0).max(1) as f64) as i64;
            }
        }
        let venue = &venues[v];
        rows.push(CheckIn {
            user_id: user.id.clone(),
            venue_id: venue.id.clone(),
            ts,
            lat: venue.lat,
            lon: venue.lon,
            category: venue.category.clone(),
            city: city_label.clone(),
        });
        city_count[u] += 1;
    }

    // --- Foreign home traces: one row more than the user's city rows, so
    // plurality detection lands on the home city. ---
    for (u, user) in users.iter().enumerate() {
        let Some(f) = user.foreign else { continue };
        let (label, lat, lon) = FOREIGN[f];
        let n = city_count[u] + 1;
        for i in 0..n {
            rows.push(CheckIn {
                user_id: user.id.clone(),
                venue_id: format!("vhome{f:02}"),
                ts: user.window.0 + (i as i64) * 3_600,
                lat,
                lon,
                category: "Hotel".to_string(),
                city: label.to_string(),
            });
        }
    }

    // --- Exact duplicates, then a stable global order. ---
    let dups: Vec<CheckIn> = rows
        .iter()
        .skip(DUPLICATE_EVERY - 1)
        .step_by(DUPLICATE_EVERY)
        .cloned()
        .collect();
    rows.extend(dups);
    rows.sort_by(|a, b| {
        (a.ts, &a.user_id, &a.venue_id).cmp(&(b.ts, &b.user_id, &b.venue_id))
    });
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{detect_homes, InteractionMatrix, OriginClass};
    use crate::ev::gini;

    fn small() -> SynthParams {
        SynthParams {
            users: 120,
            venues: 80,
            checkins: 4_000,
            clusters: 4,
            ..SynthParams::default()
        }
    }

    fn city_matrix(rows: &[CheckIn], bbox: &BBox) -> InteractionMatrix {
        let city: Vec<&CheckIn> = rows
            .iter()
            .filter(|c| bbox.contains(c.lat, c.lon))
            .collect();
        InteractionMatrix::from_checkins(city.into_iter())
    }

    #[test]
    fn deterministic_and_byte_identical() {
        let params = small();
        let a = generate(&params, 7).unwrap();
        let b = generate(&params, 7).unwrap();
        assert_eq!(a, b);
        let c = generate(&params, 8).unwrap();
        assert_ne!(a, c, "different seed must change the stream");

        let dir = tempfile::tempdir().unwrap();
        let p1 = dir.path().join("a.csv");
        let p2 = dir.path().join("b.csv");
        crate::data::write_canonical_csv(&p1, &a).unwrap();
        crate::data::write_canonical_csv(&p2, &b).unwrap();
        assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
    }

    #[test]
    fn infeasible_params_rejected() {
        let mut p = small();
        p.clusters = p.venues + 1;
        assert!(matches!(generate(&p, 1), Err(Error::Config(_))));
        let mut p = small();
        p.users = 0;
        assert!(matches!(generate(&p, 1), Err(Error::Config(_))));
        let mut p = small();
        p.clusters = 0;
        assert!(matches!(generate(&p, 1), Err(Error::Config(_))));
    }

    #[test]
    fn roundtrips_through_canonical_csv() {
        let params = small();
        let rows = generate(&params, 3).unwrap();
        assert!(rows.len() >= params.checkins);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("city.csv");
        crate::data::write_canonical_csv(&path, &rows).unwrap();
        let parsed = crate::data::parse_canonical_csv(&path).unwrap();
        assert_eq!(parsed, rows);
    }

    #[test]
    fn population_structure_is_present() {
        let params = small();
        let rows = generate(&params, 11).unwrap();

        // All four origin classes except Unknown appear.
        let homes = detect_homes(&rows, "New York", "US");
        let mut seen = std::collections::BTreeSet::new();
        for label in homes.values() {
            seen.insert(label.class.as_str());
        }
        assert!(seen.contains("NYC"));
        assert!(seen.contains("US"));
        assert!(seen.contains("Other"));
        assert!(!seen.contains("Unknown"));

        // Both season halves are populated.
        let summer = rows
            .iter()
            .filter(|c| Season::Summer.contains_month(month_of(c.ts)))
            .count();
        assert!(summer > 0 && summer < rows.len());

        // Residence-category rows exist for preprocessing to strip.
        assert!(rows.iter().any(|c| c.category == "Residences"));

        // Exact duplicates exist.
        let mut sorted: Vec<(&str, &str, i64)> = rows
            .iter()
            .map(|c| (c.user_id.as_str(), c.venue_id.as_str(), c.ts))
            .collect();
        sorted.sort();
        let before = sorted.len();
        sorted.dedup();
        assert!(sorted.len() < before, "no duplicate rows generated");

        // Raw repeats beyond exact duplicates (same user+venue, new time).
        let matrix = city_matrix(&rows, &params.bbox);
        assert!(matrix.raw_count() > matrix.unique_count());
    }

    #[test]
    fn zero_skew_yields_near_uniform_popularity() {
        let mut params = SynthParams {
            users: 400,
            venues: 250,
            checkins: 16_000,
            ..SynthParams::default()
        };
        params.popularity_skew = 0.0;
        let rows = generate(&params, 5).unwrap();
        let matrix = city_matrix(&rows, &params.bbox);
        let counts: Vec<f64> = (0..matrix.n_items())
            .map(|i| matrix.users_of(i).len() as f64)
            .collect();
        let g0 = gini(&counts);
        assert!(g0 < 0.15, "Gini at zero skew = {g0}");

        params.popularity_skew = 1.5;
        let rows = generate(&params, 5).unwrap();
        let matrix = city_matrix(&rows, &params.bbox);
        let counts: Vec<f64> = (0..matrix.n_items())
            .map(|i| matrix.users_of(i).len() as f64)
            .collect();
        let g1 = gini(&counts);
        assert!(g1 > g0 + 0.1, "skewed Gini {g1} ≯ uniform {g0}");
    }

    #[test]
    fn visitor_fraction_controls_origin_mix() {
        let mut params = small();
        params.visitor_fraction = 0.0;
        let rows = generate(&params, 2).unwrap();
        let homes = detect_homes(&rows, "New York", "US");
        assert!(homes.values().all(|l| l.class == OriginClass::Nyc));

        params.visitor_fraction = 0.5;
        let rows = generate(&params, 2).unwrap();
        let homes = detect_homes(&rows, "New York", "US");
        let visitors = homes
            .values()
            .filter(|l| l.class != OriginClass::Nyc)
            .count();
        let share = visitors as f64 / homes.len() as f64;
        assert!(
            (share - 0.5).abs() < 0.08,
            "visitor share {share} far from 0.5"
        );
    }
}
