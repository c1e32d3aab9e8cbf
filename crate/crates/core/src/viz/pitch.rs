use std::fmt::Write as _;

use super::{escape, num, Style};
use crate::error::{Error, Result};
use crate::ingest::{Action, PITCH_LENGTH, PITCH_WIDTH};
use crate::tokenizer::Token;

const PENALTY_DEPTH: f64 = 16.5;
const PENALTY_WIDTH: f64 = 40.32;
const CENTER_RADIUS: f64 = 9.15;
const CAPTION_HEIGHT: f64 = 24.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SceneAction {
    pub x: f64,
    pub y: f64,
    pub is_home: bool,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PitchScene {
    pub actions: Vec<SceneAction>,
    pub highlight_last: bool,
}

impl PitchScene {
    pub fn from_actions(actions: &[Action]) -> Self {
        PitchScene {
            actions: actions
                .iter()
                .map(|a| SceneAction {
                    x: a.x,
                    y: a.y,
                    is_home: a.is_home,
                    label: a.action_type.to_string(),
                })
                .collect(),
            highlight_last: false,
        }
    }

    /// Tokens are drawn at their bin centers.
    pub fn from_tokens(tokens: &[Token]) -> Self {
        PitchScene {
            actions: tokens
                .iter()
                .map(|t| {
                    let (x, y) = t.bin.center();
                    SceneAction {
                        x,
                        y,
                        is_home: t.is_home,
                        label: t.action_type.to_string(),
                    }
                })
                .collect(),
            highlight_last: false,
        }
    }

    pub fn highlighted(mut self) -> Self {
        self.highlight_last = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (i, a) in self.actions.iter().enumerate() {
            if !(0.0..=PITCH_LENGTH).contains(&a.x) || !(0.0..=PITCH_WIDTH).contains(&a.y) {
                return Err(Error::Validation(format!(
                    "scene action {} at ({}, {}) is off the pitch",
                    i + 1,
                    a.x,
                    a.y
                )));
            }
        }
        Ok(())
    }
}

fn panel_size(style: &Style) -> (f64, f64) {
    (
        PITCH_LENGTH * style.scale + 2.0 * style.margin,
        PITCH_WIDTH * style.scale + 2.0 * style.margin,
    )
}

fn header(out: &mut String, w: f64, h: f64, style: &Style) {
    let _ = write!(
        out,
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\" \
         font-family=\"{font}\" font-size=\"{fs}\">\n\
         <defs><marker id=\"arrowhead\" markerWidth=\"8\" markerHeight=\"8\" refX=\"7\" refY=\"4\" orient=\"auto\">\
         <path d=\"M0,0 L8,4 L0,8 z\" fill=\"{ac}\"/></marker></defs>\n",
        w = num(w),
        h = num(h),
        font = escape(&style.font_family),
        fs = num(style.font_size),
        ac = escape(&style.arrow_color),
    );
}

/// Pitch lines and actions for one panel, in panel-local coordinates.
fn pitch_body(scene: &PitchScene, style: &Style) -> String {
    let s = style.scale;
    let m = style.margin;
    let px = |x: f64| m + x * s;
    // pitch y grows upward
    let py = |y: f64| m + (PITCH_WIDTH - y) * s;
    let line = escape(&style.line_color);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<rect class=\"pitch\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\" stroke=\"{line}\" stroke-width=\"1.5\"/>",
        num(px(0.0)),
        num(py(PITCH_WIDTH)),
        num(PITCH_LENGTH * s),
        num(PITCH_WIDTH * s),
        escape(&style.pitch_color),
    );
    let _ = writeln!(
        out,
        "<line class=\"pitch\" x1=\"{x}\" y1=\"{}\" x2=\"{x}\" y2=\"{}\" stroke=\"{line}\"/>",
        num(py(PITCH_WIDTH)),
        num(py(0.0)),
        x = num(px(PITCH_LENGTH / 2.0)),
    );
    let _ = writeln!(
        out,
        "<circle class=\"pitch\" cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"none\" stroke=\"{line}\"/>",
        num(px(PITCH_LENGTH / 2.0)),
        num(py(PITCH_WIDTH / 2.0)),
        num(CENTER_RADIUS * s),
    );
    let top = (PITCH_WIDTH + PENALTY_WIDTH) / 2.0;
    for x0 in [0.0, PITCH_LENGTH - PENALTY_DEPTH] {
        let _ = writeln!(
            out,
            "<rect class=\"pitch\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"{line}\"/>",
            num(px(x0)),
            num(py(top)),
            num(PENALTY_DEPTH * s),
            num(PENALTY_WIDTH * s),
        );
    }
    let acts = &scene.actions;
    for pair in acts.windows(2) {
        let _ = writeln!(
            out,
            "<line class=\"arrow\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"1.2\" marker-end=\"url(#arrowhead)\"/>",
            num(px(pair[0].x)),
            num(py(pair[0].y)),
            num(px(pair[1].x)),
            num(py(pair[1].y)),
            escape(&style.arrow_color),
        );
    }
    for (i, a) in acts.iter().enumerate() {
        let last = scene.highlight_last && i + 1 == acts.len();
        let color = if a.is_home {
            &style.home_color
        } else {
            &style.away_color
        };
        let (cx, cy) = (px(a.x), py(a.y));
        let (class, r, stroke, sw) = if last {
            (
                "marker highlight",
                style.marker_radius * 1.4,
                style.highlight_color.as_str(),
                3.0,
            )
        } else {
            ("marker", style.marker_radius, "#ffffff", 1.0)
        };
        let _ = writeln!(
            out,
            "<circle class=\"{class}\" cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{}\" stroke=\"{}\" stroke-width=\"{}\"/>",
            num(cx),
            num(cy),
            num(r),
            escape(color),
            escape(stroke),
            num(sw),
        );
        let _ = writeln!(
            out,
            "<text class=\"number\" x=\"{}\" y=\"{}\" text-anchor=\"middle\" fill=\"#ffffff\">{}</text>",
            num(cx),
            num(cy + style.font_size * 0.35),
            i + 1,
        );
        let _ = writeln!(
            out,
            "<text class=\"label\" x=\"{}\" y=\"{}\" fill=\"#222222\">{}</text>",
            num(cx + r + 2.0),
            num(cy - r),
            escape(&a.label),
        );
    }
    out
}

pub fn render_pitch(scene: &PitchScene, style: &Style) -> Result<String> {
    scene.validate()?;
    let (w, h) = panel_size(style);
    let mut out = String::new();
    header(&mut out, w, h, style);
    out.push_str(&pitch_body(scene, style));
    out.push_str("</svg>\n");
    Ok(out)
}

/// Ground truth followed by one panel per named prediction, left to right.
/// Every scene must agree with the ground truth on its first `context_len`
/// actions.
pub fn render_comparison(
    ground_truth: &PitchScene,
    predictions: &[(String, PitchScene)],
    context_len: usize,
    style: &Style,
) -> Result<String> {
    let mut panels: Vec<(&str, &PitchScene)> = vec![("Ground truth", ground_truth)];
    panels.extend(predictions.iter().map(|(n, s)| (n.as_str(), s)));
    for (name, scene) in &panels {
        scene.validate()?;
        if scene.actions.len() < context_len
            || ground_truth.actions.len() < context_len
            || scene.actions[..context_len] != ground_truth.actions[..context_len]
        {
            return Err(Error::Validation(format!(
                "panel {name:?} does not share the first {context_len} actions with the ground truth"
            )));
        }
    }
    let (pw, ph) = panel_size(style);
    let w = pw * panels.len() as f64;
    let h = ph + CAPTION_HEIGHT;
    let mut out = String::new();
    header(&mut out, w, h, style);
    for (i, (name, scene)) in panels.iter().enumerate() {
        let _ = writeln!(
            out,
            "<g class=\"panel\" transform=\"translate({},0)\">",
            num(pw * i as f64)
        );
        let _ = writeln!(
            out,
            "<text class=\"caption\" x=\"{}\" y=\"{}\" text-anchor=\"middle\">({}) {}</text>",
            num(pw / 2.0),
            num(ph + CAPTION_HEIGHT * 0.6),
            (b'a' + (i % 26) as u8) as char,
            escape(name),
        );
        out.push_str(&pitch_body(scene, style));
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    Ok(out)
}
