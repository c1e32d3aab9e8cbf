use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Colors and sizes shared by all drawings. Unset JSON fields keep defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Style {
    /// Pixels per yard.
    pub scale: f64,
    pub margin: f64,
    pub pitch_color: String,
    pub line_color: String,
    pub home_color: String,
    pub away_color: String,
    pub highlight_color: String,
    pub arrow_color: String,
    pub marker_radius: f64,
    pub font_size: f64,
    pub font_family: String,
    pub chart_width: f64,
    pub chart_height: f64,
    pub series_color: String,
}

impl Default for Style {
    fn default() -> Self {
        Style {
            scale: 6.0,
            margin: 20.0,
            pitch_color: "#f4f8f1".into(),
            line_color: "#555555".into(),
            home_color: "#1f77b4".into(),
            away_color: "#d62728".into(),
            highlight_color: "#ff9f1c".into(),
            arrow_color: "#333333".into(),
            marker_radius: 9.0,
            font_size: 10.0,
            font_family: "sans-serif".into(),
            chart_width: 420.0,
            chart_height: 300.0,
            series_color: "#2c7fb8".into(),
        }
    }
}

impl Style {
    pub fn from_json(text: &str) -> Result<Self> {
        let s: Style = serde_json::from_str(text).map_err(|e| Error::Parse {
            record: "style".into(),
            message: e.to_string(),
        })?;
        if !(s.scale > 0.0 && s.chart_width > 0.0 && s.chart_height > 0.0) {
            return Err(Error::Config("style sizes must be positive".into()));
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_json_keeps_defaults() {
        let s = Style::from_json(r##"{"home_color": "#000000"}"##).unwrap();
        assert_eq!(s.home_color, "#000000");
        assert_eq!(s.scale, Style::default().scale);
        assert!(Style::from_json(r#"{"scale": 0}"#).is_err());
        assert!(Style::from_json("[").is_err());
    }
}
