//! Provider events to simplified SPADL actions.
//!
//! | provider event                         | action          |
//! |----------------------------------------|-----------------|
//! | Pass, `pass.type` Throw-in             | `throw_in`      |
//! | Pass, `pass.type` Corner               | `corner`        |
//! | Pass, `pass.type` Free Kick            | `freekick`      |
//! | Pass, `pass.cross` true                | `cross`         |
//! | Pass, otherwise                        | `pass`          |
//! | Carry                                  | `dribble`       |
//! | Dribble                                | `take_on`       |
//! | Shot                                   | `shot`          |
//! | Interception                           | `interception`  |
//! | Clearance                              | `clearance`     |
//! | Duel, `duel.type` Tackle               | `tackle`        |
//! | Foul Committed                         | `foul`          |
//! | Goal Keeper                            | `keeper_action` |
//! | Ball Receipt                           | `receival`      |
//! | Miscontrol                             | `bad_touch`     |
//! | Ball Recovery                          | `recovery`      |
//!
//! Everything else (lineups, half start/end, substitutions, pressures,
//! non-tackle duels, ...) produces no action.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::action::{Action, ActionType, PITCH_LENGTH, PITCH_WIDTH};

/// Provider pitch extent.
pub const PROVIDER_LENGTH: f64 = 120.0;
pub const PROVIDER_WIDTH: f64 = 80.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawEvent {
    pub match_id: u64,
    pub index: u64,
    pub event_type: String,
    pub team_id: u64,
    pub location: Option<(f64, f64)>,
    pub period: u32,
    pub timestamp: String,
    /// Remaining provider keys (`pass`, `duel`, ...).
    pub qualifiers: Map<String, Value>,
}

impl RawEvent {
    fn qualifier_name(&self, section: &str, field: &str) -> Option<&str> {
        self.qualifiers.get(section)?.get(field)?.get("name")?.as_str()
    }

    fn qualifier_flag(&self, section: &str, field: &str) -> bool {
        self.qualifiers
            .get(section)
            .and_then(|s| s.get(field))
            .and_then(Value::as_bool)
            .unwrap_or(false)
    }
}

/// Action type for an event, or `None` when the event is not an on-ball action.
pub fn classify(event: &RawEvent) -> Option<ActionType> {
    let t = match event.event_type.as_str() {
        "Pass" => match event.qualifier_name("pass", "type") {
            Some("Throw-in") => ActionType::ThrowIn,
            Some("Corner") => ActionType::Corner,
            Some("Free Kick") => ActionType::Freekick,
            _ if event.qualifier_flag("pass", "cross") => ActionType::Cross,
            _ => ActionType::Pass,
        },
        "Carry" => ActionType::Dribble,
        "Dribble" => ActionType::TakeOn,
        "Shot" => ActionType::Shot,
        "Interception" => ActionType::Interception,
        "Clearance" => ActionType::Clearance,
        "Duel" => match event.qualifier_name("duel", "type") {
            Some("Tackle") => ActionType::Tackle,
            _ => return None,
        },
        "Foul Committed" => ActionType::Foul,
        "Goal Keeper" => ActionType::KeeperAction,
        "Ball Receipt*" | "Ball Receipt" => ActionType::Receival,
        "Miscontrol" => ActionType::BadTouch,
        "Ball Recovery" => ActionType::Recovery,
        _ => return None,
    };
    Some(t)
}

/// Provider coordinates to yards.
///
/// The provider already reports every event in the acting team's attacking
/// frame (left to right), so orientation is the identity here; only the
/// 120×80 grid is rescaled to 105×68.
pub fn rescale(x: f64, y: f64) -> (f64, f64) {
    let x = (x.clamp(0.0, PROVIDER_LENGTH) * PITCH_LENGTH / PROVIDER_LENGTH).min(PITCH_LENGTH);
    let y = (y.clamp(0.0, PROVIDER_WIDTH) * PITCH_WIDTH / PROVIDER_WIDTH).min(PITCH_WIDTH);
    (x, y)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Conversion {
    pub actions: Vec<Action>,
    /// Index of the first action of each period.
    pub period_starts: Vec<usize>,
    /// Mappable events dropped for lacking a location.
    pub dropped_missing_location: usize,
}

/// Converts events (ordered by period, then time) of one match.
pub fn to_actions(events: &[RawEvent], home_team_id: u64) -> Conversion {
    let mut out = Conversion::default();
    let mut current_period = None;
    for event in events {
        let Some(action_type) = classify(event) else {
            continue;
        };
        let Some((px, py)) = event.location else {
            out.dropped_missing_location += 1;
            log::debug!(
                "match {} event #{}: {} without location dropped",
                event.match_id,
                event.index,
                event.event_type
            );
            continue;
        };
        if current_period != Some(event.period) {
            current_period = Some(event.period);
            out.period_starts.push(out.actions.len());
        }
        let (x, y) = rescale(px, py);
        out.actions.push(Action {
            match_id: event.match_id,
            index: out.actions.len(),
            is_home: event.team_id == home_team_id,
            action_type,
            x,
            y,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn event(kind: &str, team: u64, loc: Option<(f64, f64)>, quals: Value) -> RawEvent {
        RawEvent {
            match_id: 1,
            index: 0,
            event_type: kind.into(),
            team_id: team,
            location: loc,
            period: 1,
            timestamp: "00:00:00.000".into(),
            qualifiers: quals.as_object().cloned().unwrap_or_default(),
        }
    }

    #[test]
    fn midpoint_and_corners_rescale_exactly() {
        assert_eq!(rescale(60.0, 40.0), (52.5, 34.0));
        assert_eq!(rescale(120.0, 80.0), (105.0, 68.0));
        assert_eq!(rescale(0.0, 0.0), (0.0, 0.0));
        assert_eq!(rescale(0.0, 80.0), (0.0, 68.0));
        assert_eq!(rescale(120.0, 0.0), (105.0, 0.0));
    }

    #[test]
    fn pass_qualifiers_pick_the_set_piece() {
        let e = |q| event("Pass", 1, Some((1.0, 1.0)), q);
        assert_eq!(
            classify(&e(json!({"pass": {"type": {"name": "Throw-in"}}}))),
            Some(ActionType::ThrowIn)
        );
        assert_eq!(
            classify(&e(json!({"pass": {"type": {"name": "Corner"}, "cross": true}}))),
            Some(ActionType::Corner)
        );
        assert_eq!(
            classify(&e(json!({"pass": {"type": {"name": "Free Kick"}}}))),
            Some(ActionType::Freekick)
        );
        assert_eq!(classify(&e(json!({"pass": {"cross": true}}))), Some(ActionType::Cross));
        assert_eq!(
            classify(&e(json!({"pass": {"type": {"name": "Goal Kick"}}}))),
            Some(ActionType::Pass)
        );
    }

    #[test]
    fn only_tackle_duels_count() {
        let tackle = event(
            "Duel",
            1,
            Some((1.0, 1.0)),
            json!({"duel": {"type": {"name": "Tackle"}}}),
        );
        let aerial = event(
            "Duel",
            1,
            Some((1.0, 1.0)),
            json!({"duel": {"type": {"name": "Aerial Lost"}}}),
        );
        assert_eq!(classify(&tackle), Some(ActionType::Tackle));
        assert_eq!(classify(&aerial), None);
    }

    #[test]
    fn non_actions_and_missing_locations_are_dropped() {
        let events = vec![
            event("Starting XI", 1, None, json!({})),
            event("Half Start", 1, None, json!({})),
            event("Pass", 1, None, json!({})),
            event("Substitution", 2, Some((3.0, 3.0)), json!({})),
            event("Shot", 2, Some((108.0, 40.0)), json!({})),
        ];
        let conv = to_actions(&events, 1);
        assert_eq!(conv.actions.len(), 1);
        assert_eq!(conv.dropped_missing_location, 1);
        assert_eq!(conv.actions[0].action_type, ActionType::Shot);
        assert!(!conv.actions[0].is_home);
        assert_eq!(conv.actions[0].index, 0);
    }

    #[test]
    fn period_changes_are_recorded() {
        let mut a = event("Pass", 1, Some((1.0, 1.0)), json!({}));
        let mut b = a.clone();
        b.period = 2;
        let c = b.clone();
        a.period = 1;
        let conv = to_actions(&[a, b, c], 1);
        assert_eq!(conv.period_starts, vec![0, 1]);
    }
}
