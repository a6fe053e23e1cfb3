//! Readers and writers for the two supported input layouts.
//!
//! The canonical layout is a headered CSV that every pipeline stage consumes
//! and produces; the tab-separated global-scale Foursquare dump is adapted
//! into it at ingest time.

use std::path::Path;

use chrono::{DateTime, SecondsFormat, TimeZone, Utc};

use crate::config::DataConfig;
use crate::error::Error;
use crate::Result;

use super::CheckIn;

/// Header required on canonical check-in CSVs.
pub const CANONICAL_HEADER: [&str; 7] = [
    "user_id", "venue_id", "timestamp", "lat", "lon", "category", "city",
];

fn check_coords(path: &Path, line: u64, lat: f64, lon: f64) -> Result<()> {
    if !(-90.0..=90.0).contains(&lat) || !(-180.0..=180.0).contains(&lon) {
        return Err(Error::CoordinateRange {
            path: path.to_owned(),
            line,
            lat,
            lon,
        });
    }
    Ok(())
}

/// Reads a canonical CSV; row order is preserved.
pub fn parse_canonical_csv(path: &Path) -> Result<Vec<CheckIn>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Error::parse(path, 1, e.to_string()))?;

    let headers = rdr
        .headers()
        .map_err(|e| Error::parse(path, 1, e.to_string()))?;
    if headers.iter().collect::<Vec<_>>() != CANONICAL_HEADER {
        return Err(Error::parse(
            path,
            1,
            format!("expected header {:?}", CANONICAL_HEADER.join(",")),
        ));
    }

    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            Error::parse(path, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 7 {
            return Err(Error::parse(path, line, format!("expected 7 fields, got {}", record.len())));
        }
        let field = |i: usize| record.get(i).unwrap_or("");
        let ts = parse_iso_utc(field(2))
            .ok_or_else(|| Error::parse(path, line, format!("bad timestamp {:?}", field(2))))?;
        let lat: f64 = field(3)
            .parse()
            .map_err(|_| Error::parse(path, line, format!("bad lat {:?}", field(3))))?;
        let lon: f64 = field(4)
            .parse()
            .map_err(|_| Error::parse(path, line, format!("bad lon {:?}", field(4))))?;
        check_coords(path, line, lat, lon)?;
        out.push(CheckIn {
            user_id: field(0).to_owned(),
            venue_id: field(1).to_owned(),
            ts,
            lat,
            lon,
            category: field(5).to_owned(),
            city: field(6).to_owned(),
        });
    }
    Ok(out)
}

/// Writes `checkins` as a canonical CSV (creates parent dirs).
pub fn write_canonical_csv(path: &Path, checkins: &[CheckIn]) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::parse(path, 0, e.to_string()))?;
    w.write_record(CANONICAL_HEADER)
        .map_err(|e| Error::parse(path, 0, e.to_string()))?;
    for c in checkins {
        w.write_record([
            c.user_id.as_str(),
            c.venue_id.as_str(),
            &format_iso_utc(c.ts),
            &c.lat.to_string(),
            &c.lon.to_string(),
            c.category.as_str(),
            c.city.as_str(),
        ])
        .map_err(|e| Error::parse(path, 0, e.to_string()))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// `2012-07-04T10:30:00Z` (or an explicit offset) → UTC epoch seconds.
pub fn parse_iso_utc(s: &str) -> Option<i64> {
    DateTime::parse_from_rfc3339(s).ok().map(|t| t.timestamp())
}

/// UTC epoch seconds → `2012-07-04T10:30:00Z`.
pub fn format_iso_utc(ts: i64) -> String {
    Utc.timestamp_opt(ts, 0)
        .single()
        .map(|t| t.to_rfc3339_opts(SecondsFormat::Secs, true))
        .unwrap_or_else(|| format!("invalid({ts})"))
}

/// Per-file counters for rows skipped while adapting the Foursquare dump.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TistWarnings {
    /// Check-ins referencing a venue absent from the POI file.
    pub missing_venue: u64,
    /// Check-ins with an unparseable time string.
    pub bad_time: u64,
}

/// Adapts the global-scale Foursquare TSV pair into canonical check-ins.
///
/// POI rows: `venue_id  lat  lon  category  country_code`. Check-in rows:
/// `user_id  venue_id  time  tz_offset_minutes`, where `time` looks like
/// `Tue Apr 03 18:00:06 +0000 2012` and already carries its offset, so it
/// converts directly to UTC.
///
/// City labels are synthesized: venues inside the configured bbox get
/// `"<target_city>, <target_country>"`, everything else its bare country
/// code — enough for plurality home detection to separate residents,
/// domestic and international visitors. With `city_filter` set, output is
/// restricted to bbox venues and labeled with that city name instead.
pub fn parse_tist2015(
    checkins_path: &Path,
    pois_path: &Path,
    cfg: &DataConfig,
    city_filter: Option<&str>,
) -> Result<(Vec<CheckIn>, TistWarnings)> {
    use std::collections::HashMap;
    use std::io::BufRead;

    struct Poi {
        lat: f64,
        lon: f64,
        category: String,
        country: String,
        in_bbox: bool,
    }

    let mut pois: HashMap<String, Poi> = HashMap::new();
    let f = std::fs::File::open(pois_path).map_err(|e| Error::io(pois_path, e))?;
    for (idx, line) in std::io::BufReader::new(f).lines().enumerate() {
        let line = line.map_err(|e| Error::io(pois_path, e))?;
        if line.is_empty() {
            continue;
        }
        let n = idx as u64 + 1;
        let mut it = line.split('\t');
        let (Some(venue), Some(lat), Some(lon)) = (it.next(), it.next(), it.next()) else {
            return Err(Error::parse(pois_path, n, "expected ≥3 tab-separated fields"));
        };
        let category = it.next().unwrap_or("").to_owned();
        let country = it.next().unwrap_or("").to_owned();
        let lat: f64 = lat
            .parse()
            .map_err(|_| Error::parse(pois_path, n, format!("bad lat {lat:?}")))?;
        let lon: f64 = lon
            .parse()
            .map_err(|_| Error::parse(pois_path, n, format!("bad lon {lon:?}")))?;
        check_coords(pois_path, n, lat, lon)?;
        let in_bbox = cfg.bbox.contains(lat, lon);
        pois.insert(
            venue.to_owned(),
            Poi { lat, lon, category, country, in_bbox },
        );
    }

    let target_label = format!("{}, {}", cfg.target_city, cfg.target_country);
    let mut warnings = TistWarnings::default();
    let mut out = Vec::new();
    let f = std::fs::File::open(checkins_path).map_err(|e| Error::io(checkins_path, e))?;
    for line in std::io::BufReader::new(f).lines() {
        let line = line.map_err(|e| Error::io(checkins_path, e))?;
        if line.is_empty() {
            continue;
        }
        let mut it = line.split('\t');
        let (Some(user), Some(venue), Some(time)) = (it.next(), it.next(), it.next()) else {
            warnings.bad_time += 1;
            continue;
        };
        let Some(poi) = pois.get(venue) else {
            warnings.missing_venue += 1;
            continue;
        };
        let Ok(ts) = DateTime::parse_from_str(time, "%a %b %d %H:%M:%S %z %Y") else {
            warnings.bad_time += 1;
            continue;
        };
        let city = match city_filter {
            Some(city) => {
                if !poi.in_bbox {
                    continue;
                }
                format!("{}, {}", city, cfg.target_country)
            }
            None => {
                if poi.in_bbox {
                    target_label.clone()
                } else {
                    poi.country.clone()
                }
            }
        };
        out.push(CheckIn {
            user_id: user.to_owned(),
            venue_id: venue.to_owned(),
            ts: ts.timestamp(),
            lat: poi.lat,
            lon: poi.lon,
            category: poi.category.clone(),
            city,
        });
    }
    Ok((out, warnings))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(path: &Path, content: &str) {
        std::fs::write(path, content).unwrap();
    }

    #[test]
    fn canonical_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.csv");
        let rows = vec![CheckIn {
            user_id: "u1".into(),
            venue_id: "v1".into(),
            ts: 1341397800,
            lat: 40.7,
            lon: -74.0,
            category: "Park".into(),
            city: "New York, US".into(),
        }];
        write_canonical_csv(&path, &rows).unwrap();
        let back = parse_canonical_csv(&path).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn single_row_and_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.csv");
        write(
            &path,
            "user_id,venue_id,timestamp,lat,lon,category,city\n\
             u1,v1,2012-07-04T10:30:00Z,40.7,-74.0,Park,\"New York, US\"\n",
        );
        let rows = parse_canonical_csv(&path).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].ts, 1341397800);

        write(&path, "user_id,venue_id,timestamp,lat,lon,category,city\n");
        assert!(parse_canonical_csv(&path).unwrap().is_empty());
    }

    #[test]
    fn out_of_range_coordinate_errors_with_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.csv");
        write(
            &path,
            "user_id,venue_id,timestamp,lat,lon,category,city\n\
             u1,v1,2012-07-04T10:30:00Z,40.7,-74.0,Park,NYC\n\
             u1,v2,2012-07-04T10:30:00Z,95.0,-74.0,Park,NYC\n",
        );
        match parse_canonical_csv(&path) {
            Err(Error::CoordinateRange { line, lat, .. }) => {
                assert_eq!(line, 3);
                assert_eq!(lat, 95.0);
            }
            other => panic!("expected coordinate error, got {other:?}"),
        }
    }

    #[test]
    fn wrong_header_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.csv");
        write(&path, "user,venue,when\n");
        assert!(parse_canonical_csv(&path).is_err());
    }

    #[test]
    fn tist_join_and_warnings() {
        let dir = tempfile::tempdir().unwrap();
        let pois = dir.path().join("pois.tsv");
        let checkins = dir.path().join("checkins.tsv");
        write(
            &pois,
            "v1\t40.70\t-74.00\tPark\tUS\nv2\t51.50\t-0.12\tPub\tGB\n",
        );
        write(
            &checkins,
            "u1\tv1\tTue Apr 03 18:00:06 +0000 2012\t-240\n\
             u1\tv2\tWed Apr 04 09:00:00 +0000 2012\t60\n\
             u2\tvX\tWed Apr 04 09:00:00 +0000 2012\t60\n\
             u2\tv1\tnot a time\t0\n",
        );
        let cfg = DataConfig::default();
        let (rows, warn) = parse_tist2015(&checkins, &pois, &cfg, None).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(warn.missing_venue, 1);
        assert_eq!(warn.bad_time, 1);
        // In-bbox venue gets the target label, the London venue its country.
        assert_eq!(rows[0].city, "New York, US");
        assert_eq!(rows[1].city, "GB");
        // 2012-04-03T18:00:06Z; the trailing offset column is ignored.
        assert_eq!(rows[0].ts, 1333476006);
    }

    #[test]
    fn tist_city_filter_restricts_to_bbox() {
        let dir = tempfile::tempdir().unwrap();
        let pois = dir.path().join("pois.tsv");
        let checkins = dir.path().join("checkins.tsv");
        write(
            &pois,
            "v1\t40.70\t-74.00\tPark\tUS\nv2\t51.50\t-0.12\tPub\tGB\n",
        );
        write(
            &checkins,
            "u1\tv1\tTue Apr 03 18:00:06 +0000 2012\t-240\n\
             u1\tv2\tWed Apr 04 09:00:00 +0000 2012\t60\n",
        );
        let cfg = DataConfig::default();
        let (rows, _) = parse_tist2015(&checkins, &pois, &cfg, Some("New York")).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].venue_id, "v1");
    }
}
