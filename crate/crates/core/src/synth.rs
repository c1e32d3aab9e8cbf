//! Seeded generator of open-data-format event files.
//!
//! Writes `competitions.json`, `matches/{cid}/{sid}.json` and
//! `events/{match_id}.json` under a root directory, so the regular ingest
//! path can read it as a local data source. Possessions carry a persistent
//! plan (target flank, direct or patient build-up) and every team has its
//! own tendencies, so the next action depends on more than the last one.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ingest::MatchDescriptor;

const LEN: f64 = 120.0;
const WID: f64 = 80.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthOptions {
    pub competition_id: u64,
    pub competition_name: String,
    /// `(season_id, season_name)` pairs.
    pub seasons: Vec<(u64, String)>,
    pub matches_per_season: usize,
    pub teams: usize,
    /// Approximate on-ball actions per period.
    pub actions_per_period: usize,
    pub seed: u64,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions {
            competition_id: 37,
            competition_name: "FA Women's Super League".into(),
            seasons: vec![
                (4, "2018/2019".into()),
                (42, "2019/2020".into()),
                (90, "2020/2021".into()),
            ],
            matches_per_season: 10,
            teams: 8,
            actions_per_period: 600,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct TeamStyle {
    flank: f64,
    directness: f64,
    carry: f64,
}

fn team_style(seed: u64, team: u64) -> TeamStyle {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    rng.set_stream(team);
    TeamStyle {
        flank: [14.0, 40.0, 66.0][rng.gen_range(0..3)],
        directness: rng.gen_range(0.1..0.6),
        carry: rng.gen_range(0.3..0.8),
    }
}

fn team_name(id: u64) -> String {
    format!("Synthetic {id} FC")
}

fn write_json(path: &Path, value: &Value) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let text = serde_json::to_string(value).expect("json value serializes");
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Writes the whole data set and returns the descriptors in id order.
pub fn write_open_data(root: &Path, opts: &SynthOptions) -> Result<Vec<MatchDescriptor>> {
    if opts.teams < 2 || opts.actions_per_period == 0 {
        return Err(Error::Config(
            "synthetic data needs at least 2 teams and 1 action per period".into(),
        ));
    }
    let mut competitions = Vec::new();
    let mut descriptors = Vec::new();
    let mut next_id = 100_001u64;
    for (s, (season_id, season_name)) in opts.seasons.iter().enumerate() {
        competitions.push(json!({
            "competition_id": opts.competition_id,
            "season_id": season_id,
            "competition_name": opts.competition_name,
            "season_name": season_name,
        }));
        let mut listing = Vec::new();
        for m in 0..opts.matches_per_season {
            let n = opts.teams as u64;
            let home = 1 + (m as u64 + s as u64) % n;
            let away = 1 + (m as u64 / n + 1 + home) % n;
            let away = if away == home { 1 + home % n } else { away };
            let d = MatchDescriptor {
                match_id: next_id,
                competition_id: opts.competition_id,
                season_id: *season_id,
                season: season_name.clone(),
                home_team_id: home,
                home_team: team_name(home),
                away_team_id: away,
                away_team: team_name(away),
            };
            next_id += 1;
            listing.push(json!({
                "match_id": d.match_id,
                "home_team": {"home_team_id": home, "home_team_name": d.home_team},
                "away_team": {"away_team_id": away, "away_team_name": d.away_team},
            }));
            let events = match_events(&d, opts);
            write_json(
                &root.join("events").join(format!("{}.json", d.match_id)),
                &Value::Array(events),
            )?;
            descriptors.push(d);
        }
        write_json(
            &root
                .join("matches")
                .join(opts.competition_id.to_string())
                .join(format!("{season_id}.json")),
            &Value::Array(listing),
        )?;
    }
    write_json(&root.join("competitions.json"), &Value::Array(competitions))?;
    Ok(descriptors)
}

struct Emitter<'a> {
    d: &'a MatchDescriptor,
    events: Vec<Value>,
    period: u32,
    clock_ms: u64,
    actions: usize,
}

impl Emitter<'_> {
    fn team(&self, home: bool) -> (u64, String) {
        if home {
            (self.d.home_team_id, self.d.home_team.clone())
        } else {
            (self.d.away_team_id, self.d.away_team.clone())
        }
    }

    fn push(&mut self, kind: &str, home: bool, loc: Option<(f64, f64)>, extra: Option<(&str, Value)>, on_ball: bool) {
        let index = self.events.len() as u64 + 1;
        let (tid, tname) = self.team(home);
        let ms = self.clock_ms;
        let mut ev = json!({
            "id": format!("synth-{}-{index}", self.d.match_id),
            "index": index,
            "period": self.period,
            "timestamp": format!("00:{:02}:{:02}.{:03}", ms / 60_000, (ms / 1000) % 60, ms % 1000),
            "type": {"name": kind},
            "team": {"id": tid, "name": tname},
        });
        if let Some((x, y)) = loc {
            ev["location"] = json!([(x * 10.0).round() / 10.0, (y * 10.0).round() / 10.0]);
        }
        if let Some((k, v)) = extra {
            ev[k] = v;
        }
        self.events.push(ev);
        self.clock_ms += 1500;
        if on_ball {
            self.actions += 1;
        }
    }

    fn action(&mut self, kind: &str, home: bool, loc: (f64, f64)) {
        self.push(kind, home, Some(clamp(loc)), None, true);
    }

    fn pass(&mut self, home: bool, loc: (f64, f64), kind: Option<&str>, cross: bool) {
        let mut p = serde_json::Map::new();
        if let Some(k) = kind {
            p.insert("type".into(), json!({"name": k}));
        }
        if cross {
            p.insert("cross".into(), json!(true));
        }
        self.push("Pass", home, Some(clamp(loc)), Some(("pass", Value::Object(p))), true);
    }
}

fn clamp((x, y): (f64, f64)) -> (f64, f64) {
    (x.clamp(0.0, LEN), y.clamp(0.0, WID))
}

fn mirror((x, y): (f64, f64)) -> (f64, f64) {
    (LEN - x, WID - y)
}

/// Raw events of one match, deterministic in (seed, match id).
pub fn match_events(d: &MatchDescriptor, opts: &SynthOptions) -> Vec<Value> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(d.match_id);
    let styles = [
        team_style(opts.seed, d.away_team_id),
        team_style(opts.seed, d.home_team_id),
    ];
    let mut em = Emitter {
        d,
        events: Vec::new(),
        period: 1,
        clock_ms: 0,
        actions: 0,
    };
    em.push("Starting XI", true, None, None, false);
    em.push("Starting XI", false, None, None, false);
    for period in 1..=2u32 {
        em.period = period;
        em.clock_ms = 0;
        em.actions = 0;
        em.push("Half Start", true, None, None, false);
        let kickoff_home = period == 1;
        em.pass(kickoff_home, (60.0, 40.0), Some("Kick Off"), false);
        let mut home = kickoff_home;
        let mut ball = (rng.gen_range(40.0..55.0), rng.gen_range(25.0..55.0));
        em.action("Ball Receipt*", home, ball);
        while em.actions < opts.actions_per_period {
            let (next_home, next_ball) = possession(&mut em, &mut rng, &styles, home, ball);
            home = next_home;
            ball = next_ball;
        }
        em.push("Half End", true, None, None, false);
    }
    em.events
}

/// Plays one possession for `home` starting with the ball at `ball` (in the
/// attacking team's frame). Returns who has the ball next and where.
fn possession(
    em: &mut Emitter<'_>,
    rng: &mut ChaCha8Rng,
    styles: &[TeamStyle; 2],
    home: bool,
    mut ball: (f64, f64),
) -> (bool, (f64, f64)) {
    let style = styles[home as usize];
    let flank = if rng.gen_bool(0.6) {
        style.flank
    } else {
        [14.0, 40.0, 66.0][rng.gen_range(0..3)]
    };
    let direct = rng.gen_bool(style.directness);
    for _ in 0..40 {
        let (x, y) = ball;
        if rng.gen_bool(0.03) {
            em.push("Pressure", !home, Some(mirror(ball)), None, false);
        }
        if x > 100.0 && (y - 40.0).abs() < 18.0 && rng.gen_bool(0.45) {
            em.action("Shot", home, ball);
            let keeper = (rng.gen_range(2.0..7.0), rng.gen_range(34.0..46.0));
            em.action("Goal Keeper", !home, keeper);
            return (!home, keeper);
        }
        if x > 88.0 && !(24.0..=56.0).contains(&y) && rng.gen_bool(0.5) {
            em.pass(home, ball, None, true);
            let target = (rng.gen_range(106.0..114.0), rng.gen_range(30.0..50.0));
            if rng.gen_bool(0.35) {
                em.action("Ball Receipt*", home, target);
                ball = target;
                continue;
            }
            let def = mirror(target);
            em.action("Clearance", !home, def);
            if rng.gen_bool(0.3) {
                let corner = (120.0, if y < 40.0 { 0.1 } else { 79.9 });
                em.pass(home, corner, Some("Corner"), false);
                ball = (rng.gen_range(104.0..114.0), rng.gen_range(30.0..50.0));
                em.action("Ball Receipt*", home, ball);
                continue;
            }
            let loose = (rng.gen_range(50.0..75.0), rng.gen_range(10.0..70.0));
            let winner = rng.gen_bool(0.5);
            let at = if winner == home { loose } else { mirror(loose) };
            em.action("Ball Recovery", winner, at);
            if winner == home {
                ball = at;
                continue;
            }
            return (winner, at);
        }
        let r: f64 = rng.gen();
        if r < 0.05 {
            em.action("Dribble", home, ball);
            if rng.gen_bool(0.55) {
                ball = clamp((x + rng.gen_range(3.0..9.0), y + rng.gen_range(-4.0..4.0)));
                em.action("Carry", home, ball);
                continue;
            }
            let at = mirror(ball);
            em.push(
                "Duel",
                !home,
                Some(at),
                Some(("duel", json!({"type": {"name": "Tackle"}}))),
                true,
            );
            return (!home, at);
        }
        if r < 0.08 {
            em.action("Miscontrol", home, ball);
            let at = mirror(ball);
            em.action("Ball Recovery", !home, at);
            return (!home, at);
        }
        if r < 0.1 {
            em.action("Foul Committed", !home, mirror(ball));
            em.pass(home, ball, Some("Free Kick"), false);
        } else {
            em.pass(home, ball, None, false);
        }
        let dx = if direct {
            rng.gen_range(12.0..35.0)
        } else {
            rng.gen_range(-6.0..14.0)
        };
        let ny = y + (flank - y) * 0.5 + rng.gen_range(-9.0..9.0);
        let nx = (x + dx).clamp(1.0, 119.0);
        if !(0.0..=WID).contains(&ny) {
            let at = mirror((nx, ny.clamp(0.0, WID)));
            em.pass(!home, at, Some("Throw-in"), false);
            let recv = clamp((at.0 + rng.gen_range(-3.0..8.0), at.1 + (40.0 - at.1) * 0.3));
            em.action("Ball Receipt*", !home, recv);
            return (!home, recv);
        }
        let success = 0.9 - 0.004 * (nx - 60.0).max(0.0) - if direct { 0.15 } else { 0.0 };
        if !rng.gen_bool(success.clamp(0.05, 0.99)) {
            let at = mirror((nx, ny));
            em.action("Interception", !home, at);
            if at.0 < 20.0 && rng.gen_bool(0.5) {
                em.action("Clearance", !home, at);
                let loose = (rng.gen_range(45.0..70.0), rng.gen_range(10.0..70.0));
                let winner = rng.gen_bool(0.5);
                let p = if winner == home { mirror(loose) } else { loose };
                em.action("Ball Recovery", winner, p);
                return (winner, p);
            }
            return (!home, at);
        }
        ball = (nx, ny);
        em.action("Ball Receipt*", home, ball);
        if rng.gen_bool(if direct { style.carry * 0.5 } else { style.carry }) {
            let to = clamp((
                nx + rng.gen_range(2.0..11.0),
                ny + (flank - ny) * 0.3 + rng.gen_range(-3.0..3.0),
            ));
            em.action("Carry", home, ball);
            ball = to;
        }
    }
    // long spell: possession fizzles out
    let at = mirror(ball);
    em.action("Ball Recovery", !home, at);
    (!home, at)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{list_matches, parse_events, to_actions, DataSource};

    fn small() -> SynthOptions {
        SynthOptions {
            seasons: vec![(4, "2018/2019".into())],
            matches_per_season: 3,
            actions_per_period: 80,
            ..SynthOptions::default()
        }
    }

    #[test]
    fn round_trips_through_ingest() {
        let dir = tempfile::tempdir().unwrap();
        let opts = small();
        let written = write_open_data(dir.path(), &opts).unwrap();
        let source = DataSource::local(dir.path());
        let listed = list_matches(&opts.competition_name, &["2018/2019".into()], &source).unwrap();
        assert_eq!(listed, written);
        for d in &listed {
            assert_ne!(d.home_team_id, d.away_team_id);
            let bytes = std::fs::read(dir.path().join(format!("events/{}.json", d.match_id))).unwrap();
            let events = parse_events(d.match_id, &bytes).unwrap();
            let conv = to_actions(&events, d.home_team_id);
            assert!(conv.actions.len() >= 160);
            assert_eq!(conv.period_starts.len(), 2);
            assert!(conv.actions.iter().all(|a| a.validate().is_ok()));
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let opts = small();
        let d = MatchDescriptor {
            match_id: 5,
            competition_id: 37,
            season_id: 4,
            season: "s".into(),
            home_team_id: 1,
            home_team: team_name(1),
            away_team_id: 2,
            away_team: team_name(2),
        };
        assert_eq!(match_events(&d, &opts), match_events(&d, &opts));
        let other = SynthOptions {
            seed: 8,
            ..opts.clone()
        };
        assert_ne!(match_events(&d, &opts), match_events(&d, &other));
    }
}
