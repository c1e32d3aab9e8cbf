use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const PITCH_LENGTH: f64 = 105.0;
pub const PITCH_WIDTH: f64 = 68.0;

/// Simplified SPADL action vocabulary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionType {
    Pass,
    Cross,
    ThrowIn,
    Freekick,
    Corner,
    TakeOn,
    Dribble,
    Shot,
    Interception,
    Clearance,
    Tackle,
    Foul,
    KeeperAction,
    Receival,
    BadTouch,
    Recovery,
}

impl ActionType {
    pub const ALL: [ActionType; 16] = [
        ActionType::Pass,
        ActionType::Cross,
        ActionType::ThrowIn,
        ActionType::Freekick,
        ActionType::Corner,
        ActionType::TakeOn,
        ActionType::Dribble,
        ActionType::Shot,
        ActionType::Interception,
        ActionType::Clearance,
        ActionType::Tackle,
        ActionType::Foul,
        ActionType::KeeperAction,
        ActionType::Receival,
        ActionType::BadTouch,
        ActionType::Recovery,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ActionType::Pass => "pass",
            ActionType::Cross => "cross",
            ActionType::ThrowIn => "throw_in",
            ActionType::Freekick => "freekick",
            ActionType::Corner => "corner",
            ActionType::TakeOn => "take_on",
            ActionType::Dribble => "dribble",
            ActionType::Shot => "shot",
            ActionType::Interception => "interception",
            ActionType::Clearance => "clearance",
            ActionType::Tackle => "tackle",
            ActionType::Foul => "foul",
            ActionType::KeeperAction => "keeper_action",
            ActionType::Receival => "receival",
            ActionType::BadTouch => "bad_touch",
            ActionType::Recovery => "recovery",
        }
    }
}

impl fmt::Display for ActionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ActionType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ActionType::ALL
            .iter()
            .copied()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Lookup(format!("unknown action type {s:?}")))
    }
}

/// One on-ball event in yards, expressed in the acting team's attacking frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Action {
    pub match_id: u64,
    pub index: usize,
    pub is_home: bool,
    pub action_type: ActionType,
    pub x: f64,
    pub y: f64,
}

impl Action {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=PITCH_LENGTH).contains(&self.x) || !(0.0..=PITCH_WIDTH).contains(&self.y) {
            return Err(Error::Range(format!(
                "action {}#{} at ({}, {}) is off the pitch",
                self.match_id, self.index, self.x, self.y
            )));
        }
        Ok(())
    }
}

/// Match metadata plus its ordered actions.
///
/// `period_starts` holds the action index at which each period begins; it is
/// what keeps windows and transition counts from spanning half-time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchTable {
    pub match_id: u64,
    pub season: String,
    pub home_team: String,
    pub away_team: String,
    #[serde(default)]
    pub period_starts: Vec<usize>,
    #[serde(skip)]
    pub actions: Vec<Action>,
}

impl MatchTable {
    /// Splits the action list at period boundaries.
    pub fn periods(&self) -> Vec<&[Action]> {
        segments(&self.actions, &self.period_starts)
    }
}

pub(crate) fn segments<'a, T>(items: &'a [T], starts: &[usize]) -> Vec<&'a [T]> {
    let mut cuts: Vec<usize> = starts.iter().copied().filter(|&s| s > 0 && s < items.len()).collect();
    cuts.sort_unstable();
    cuts.dedup();
    let mut out = Vec::with_capacity(cuts.len() + 1);
    let mut from = 0;
    for c in cuts {
        out.push(&items[from..c]);
        from = c;
    }
    if from < items.len() {
        out.push(&items[from..]);
    }
    out
}

pub const ACTIONS_CSV_HEADER: &str = "match_id,index,is_home,action_type,x,y";

pub fn write_actions_csv<W: Write>(mut w: W, actions: &[Action]) -> std::io::Result<()> {
    writeln!(w, "{ACTIONS_CSV_HEADER}")?;
    for a in actions {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            a.match_id, a.index, a.is_home, a.action_type, a.x, a.y
        )?;
    }
    Ok(())
}

pub fn read_actions_csv<R: BufRead>(r: R) -> Result<Vec<Action>> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .transpose()
        .map_err(|e| Error::io("<actions csv>", e))?
        .unwrap_or_default();
    if header.trim_end() != ACTIONS_CSV_HEADER {
        return Err(Error::Parse {
            record: "actions csv header".into(),
            message: format!("expected {ACTIONS_CSV_HEADER:?}, found {header:?}"),
        });
    }
    let mut out = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::io("<actions csv>", e))?;
        if line.is_empty() {
            continue;
        }
        let record = format!("actions csv line {}", lineno + 2);
        let bad = |message: String| Error::Parse {
            record: record.clone(),
            message,
        };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(bad(format!("expected 6 fields, found {}", fields.len())));
        }
        let action = Action {
            match_id: fields[0].parse().map_err(|e| bad(format!("match_id: {e}")))?,
            index: fields[1].parse().map_err(|e| bad(format!("index: {e}")))?,
            is_home: fields[2].parse().map_err(|e| bad(format!("is_home: {e}")))?,
            action_type: fields[3].parse().map_err(|e: Error| bad(e.to_string()))?,
            x: fields[4].parse().map_err(|e| bad(format!("x: {e}")))?,
            y: fields[5].parse().map_err(|e| bad(format!("y: {e}")))?,
        };
        action.validate().map_err(|e| bad(e.to_string()))?;
        out.push(action);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn action_type_names_round_trip() {
        for t in ActionType::ALL {
            assert_eq!(t.name().parse::<ActionType>().unwrap(), t);
        }
        assert!("header".parse::<ActionType>().is_err());
    }

    #[test]
    fn csv_round_trip_keeps_header() {
        let actions = vec![
            Action {
                match_id: 7,
                index: 0,
                is_home: true,
                action_type: ActionType::ThrowIn,
                x: 52.5,
                y: 0.0,
            },
            Action {
                match_id: 7,
                index: 1,
                is_home: false,
                action_type: ActionType::Receival,
                x: 105.0,
                y: 68.0,
            },
        ];
        let mut buf = Vec::new();
        write_actions_csv(&mut buf, &actions).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("match_id,index,is_home,action_type,x,y\n"));
        assert!(!text.contains('\r'));
        assert_eq!(read_actions_csv(&buf[..]).unwrap(), actions);
    }

    #[test]
    fn csv_rejects_off_pitch_rows() {
        let text = format!("{ACTIONS_CSV_HEADER}\n1,0,true,pass,106,3\n");
        let err = read_actions_csv(text.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn segments_split_at_period_starts() {
        let xs = [1, 2, 3, 4, 5];
        assert_eq!(segments(&xs, &[0, 3]), vec![&xs[..3], &xs[3..]]);
        assert_eq!(segments(&xs, &[]), vec![&xs[..]]);
        assert!(segments::<i32>(&[], &[0]).is_empty());
    }
}
