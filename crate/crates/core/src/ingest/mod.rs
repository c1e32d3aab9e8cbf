//! Event data acquisition: open-data listings, cached event fetches and
//! conversion to action tables.

mod action;
mod convert;
mod source;

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub(crate) use action::segments;
pub use action::{
    read_actions_csv, write_actions_csv, Action, ActionType, MatchTable, ACTIONS_CSV_HEADER, PITCH_LENGTH, PITCH_WIDTH,
};
pub use convert::{classify, rescale, to_actions, Conversion, RawEvent};
pub use source::{DataSource, Locator, DATA_SOURCE_ENV, DEFAULT_BASE_URL};

use crate::error::{Error, Result};
use crate::par;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchDescriptor {
    pub match_id: u64,
    pub competition_id: u64,
    pub season_id: u64,
    pub season: String,
    pub home_team_id: u64,
    pub home_team: String,
    pub away_team_id: u64,
    pub away_team: String,
}

fn parse_json(record: &str, bytes: &[u8]) -> Result<Value> {
    serde_json::from_slice(bytes).map_err(|e| Error::Parse {
        record: record.to_string(),
        message: e.to_string(),
    })
}

fn field<'a>(v: &'a Value, path: &[&str], record: &str) -> Result<&'a Value> {
    let mut cur = v;
    for key in path {
        cur = cur.get(key).ok_or_else(|| Error::Parse {
            record: record.to_string(),
            message: format!("missing field {}", path.join(".")),
        })?;
    }
    Ok(cur)
}

fn as_u64(v: &Value, path: &[&str], record: &str) -> Result<u64> {
    field(v, path, record)?.as_u64().ok_or_else(|| Error::Parse {
        record: record.to_string(),
        message: format!("{} is not an unsigned integer", path.join(".")),
    })
}

fn as_str<'a>(v: &'a Value, path: &[&str], record: &str) -> Result<&'a str> {
    field(v, path, record)?.as_str().ok_or_else(|| Error::Parse {
        record: record.to_string(),
        message: format!("{} is not a string", path.join(".")),
    })
}

/// All matches of `competition_name` in the requested seasons, ordered by id.
pub fn list_matches(competition_name: &str, seasons: &[String], source: &DataSource) -> Result<Vec<MatchDescriptor>> {
    if seasons.is_empty() {
        return Ok(Vec::new());
    }
    let competitions = parse_json("competitions.json", &source.get("competitions.json")?)?;
    let entries = competitions.as_array().ok_or_else(|| Error::Parse {
        record: "competitions.json".into(),
        message: "expected a JSON array".into(),
    })?;

    let mut found_competition = false;
    let mut out = Vec::new();
    for season in seasons {
        let mut found_season = false;
        for (i, entry) in entries.iter().enumerate() {
            let record = format!("competitions.json[{i}]");
            if as_str(entry, &["competition_name"], &record)? != competition_name {
                continue;
            }
            found_competition = true;
            if as_str(entry, &["season_name"], &record)? != season {
                continue;
            }
            found_season = true;
            let cid = as_u64(entry, &["competition_id"], &record)?;
            let sid = as_u64(entry, &["season_id"], &record)?;
            let rel = format!("matches/{cid}/{sid}.json");
            let matches = parse_json(&rel, &source.get(&rel)?)?;
            let rows = matches.as_array().ok_or_else(|| Error::Parse {
                record: rel.clone(),
                message: "expected a JSON array".into(),
            })?;
            for (j, m) in rows.iter().enumerate() {
                let record = format!("{rel}[{j}]");
                out.push(MatchDescriptor {
                    match_id: as_u64(m, &["match_id"], &record)?,
                    competition_id: cid,
                    season_id: sid,
                    season: season.clone(),
                    home_team_id: as_u64(m, &["home_team", "home_team_id"], &record)?,
                    home_team: as_str(m, &["home_team", "home_team_name"], &record)?.to_string(),
                    away_team_id: as_u64(m, &["away_team", "away_team_id"], &record)?,
                    away_team: as_str(m, &["away_team", "away_team_name"], &record)?.to_string(),
                });
            }
        }
        if !found_competition {
            return Err(Error::NotFound(format!("competition {competition_name:?}")));
        }
        if !found_season {
            return Err(Error::NotFound(format!(
                "season {season:?} of competition {competition_name:?}"
            )));
        }
    }
    out.sort_by_key(|m| m.match_id);
    out.dedup_by_key(|m| m.match_id);
    Ok(out)
}

/// Parses one match's raw event payload, ordered by period then event index.
pub fn parse_events(match_id: u64, bytes: &[u8]) -> Result<Vec<RawEvent>> {
    let file = format!("events/{match_id}.json");
    let payload = parse_json(&file, bytes)?;
    let rows = payload.as_array().ok_or_else(|| Error::Parse {
        record: file.clone(),
        message: "expected a JSON array".into(),
    })?;
    let mut events = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let record = match row.get("id").and_then(Value::as_str) {
            Some(id) => format!("{file}[{i}] (id {id})"),
            None => format!("{file}[{i}]"),
        };
        let obj = row.as_object().ok_or_else(|| Error::Parse {
            record: record.clone(),
            message: "event is not an object".into(),
        })?;
        let location = match obj.get("location") {
            None | Some(Value::Null) => None,
            Some(Value::Array(xy)) if xy.len() >= 2 => match (xy[0].as_f64(), xy[1].as_f64()) {
                (Some(x), Some(y)) if x.is_finite() && y.is_finite() => Some((x, y)),
                _ => {
                    return Err(Error::Parse {
                        record,
                        message: "non-numeric location".into(),
                    })
                }
            },
            Some(_) => {
                return Err(Error::Parse {
                    record,
                    message: "malformed location".into(),
                })
            }
        };
        let mut qualifiers = obj.clone();
        for key in ["id", "index", "period", "timestamp", "type", "team", "location"] {
            qualifiers.remove(key);
        }
        events.push(RawEvent {
            match_id,
            index: as_u64(row, &["index"], &record)?,
            event_type: as_str(row, &["type", "name"], &record)?.to_string(),
            team_id: as_u64(row, &["team", "id"], &record)?,
            location,
            period: as_u64(row, &["period"], &record)? as u32,
            timestamp: as_str(row, &["timestamp"], &record)?.to_string(),
            qualifiers,
        });
    }
    events.sort_by_key(|e| (e.period, e.index));
    Ok(events)
}

fn write_atomically(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

/// Events of one match; the raw payload is cached verbatim under
/// `cache_dir/events/<match_id>.json` and served from there afterwards.
pub fn fetch_events(match_id: u64, source: &DataSource, cache_dir: &Path) -> Result<Vec<RawEvent>> {
    let cached = cache_dir.join("events").join(format!("{match_id}.json"));
    if cached.is_file() {
        let bytes = std::fs::read(&cached).map_err(|e| Error::io(&cached, e))?;
        return parse_events(match_id, &bytes);
    }
    let bytes = source.get(&format!("events/{match_id}.json"))?;
    let events = parse_events(match_id, &bytes)?;
    write_atomically(&cached, &bytes)?;
    Ok(events)
}

#[derive(Debug, Clone, Default)]
pub struct IngestReport {
    pub matches: Vec<MatchTable>,
    pub dropped_missing_location: usize,
}

impl IngestReport {
    pub fn action_count(&self) -> usize {
        self.matches.iter().map(|m| m.actions.len()).sum()
    }
}

/// Fetches (concurrently across matches) and converts every listed match.
pub fn ingest(descriptors: &[MatchDescriptor], source: &DataSource, cache_dir: &Path) -> Result<IngestReport> {
    let converted = par::map(descriptors, |d| -> Result<(MatchTable, usize)> {
        let events = fetch_events(d.match_id, source, cache_dir)?;
        let conv = to_actions(&events, d.home_team_id);
        Ok((
            MatchTable {
                match_id: d.match_id,
                season: d.season.clone(),
                home_team: d.home_team.clone(),
                away_team: d.away_team.clone(),
                period_starts: conv.period_starts,
                actions: conv.actions,
            },
            conv.dropped_missing_location,
        ))
    });
    let mut report = IngestReport::default();
    for item in converted {
        let (table, dropped) = item?;
        report.dropped_missing_location += dropped;
        report.matches.push(table);
    }
    Ok(report)
}

/// Writes `actions.csv` and `matches.json` (metadata incl. period starts).
pub fn save_tables(dir: &Path, tables: &[MatchTable]) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let csv_path = dir.join("actions.csv");
    let mut buf = Vec::new();
    let all: Vec<Action> = tables.iter().flat_map(|t| t.actions.iter().cloned()).collect();
    write_actions_csv(&mut buf, &all).map_err(|e| Error::io(&csv_path, e))?;
    write_atomically(&csv_path, &buf)?;
    let meta = serde_json::to_vec_pretty(tables).expect("match metadata serializes");
    write_atomically(&dir.join("matches.json"), &meta)
}

/// Inverse of [`save_tables`].
pub fn load_tables(dir: &Path) -> Result<Vec<MatchTable>> {
    let meta_path = dir.join("matches.json");
    let meta = std::fs::read(&meta_path).map_err(|e| Error::io(&meta_path, e))?;
    let mut tables: Vec<MatchTable> = serde_json::from_slice(&meta).map_err(|e| Error::Parse {
        record: meta_path.display().to_string(),
        message: e.to_string(),
    })?;
    let csv_path = dir.join("actions.csv");
    let file = std::fs::File::open(&csv_path).map_err(|e| Error::io(&csv_path, e))?;
    let actions = read_actions_csv(std::io::BufReader::new(file))?;
    let mut by_match: std::collections::HashMap<u64, Vec<Action>> = Default::default();
    for a in actions {
        by_match.entry(a.match_id).or_default().push(a);
    }
    for t in &mut tables {
        let mut actions = by_match.remove(&t.match_id).unwrap_or_default();
        actions.sort_by_key(|a| a.index);
        if actions.iter().enumerate().any(|(i, a)| a.index != i) {
            return Err(Error::Validation(format!(
                "match {} action indices are not consecutive from 0",
                t.match_id
            )));
        }
        t.actions = actions;
    }
    Ok(tables)
}
