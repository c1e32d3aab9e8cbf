use std::fmt::Write as _;

use super::{escape, num, Style};
use crate::error::{Error, Result};
use crate::train_eval::{Axis, ScalingRecord};

const PAD_LEFT: f64 = 56.0;
const PAD_RIGHT: f64 = 16.0;
const PAD_TOP: f64 = 28.0;
const PAD_BOTTOM: f64 = 40.0;

fn log_x(axis: Axis) -> bool {
    matches!(axis, Axis::DatasetSize | Axis::Parameters)
}

fn title(axis: Axis) -> &'static str {
    match axis {
        Axis::DatasetSize => "Training windows",
        Axis::ContextSize => "Context size",
        Axis::Parameters => "Parameters",
    }
}

/// Maps `v` from `[lo, hi]` onto `[a, b]`; a degenerate range lands mid-way.
fn scale(v: f64, lo: f64, hi: f64, a: f64, b: f64) -> f64 {
    if hi - lo < 1e-12 {
        (a + b) / 2.0
    } else {
        a + (v - lo) / (hi - lo) * (b - a)
    }
}

fn chart(axis: Axis, points: &[(f64, f64)], style: &Style) -> String {
    let (w, h) = (style.chart_width, style.chart_height);
    let tx = |v: f64| {
        if log_x(axis) {
            v.max(f64::MIN_POSITIVE).log10()
        } else {
            v
        }
    };
    let xs: Vec<f64> = points.iter().map(|p| tx(p.0)).collect();
    let (x_lo, x_hi) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, u), &x| (l.min(x), u.max(x)));
    let (mut y_lo, mut y_hi) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, u), p| (l.min(p.1), u.max(p.1)));
    let pad = ((y_hi - y_lo) * 0.1).max(0.005);
    y_lo = (y_lo - pad).max(0.0);
    y_hi = (y_hi + pad).min(1.0);
    let (left, right) = (PAD_LEFT, w - PAD_RIGHT);
    let (top, bottom) = (PAD_TOP, h - PAD_BOTTOM);
    let px = |x: f64| scale(x, x_lo, x_hi, left + 10.0, right - 10.0);
    let py = |y: f64| scale(y, y_lo, y_hi, bottom, top);

    let mut out = String::new();
    let _ = write!(
        out,
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\" \
         font-family=\"{}\" font-size=\"{}\">\n",
        escape(&style.font_family),
        num(style.font_size),
        w = num(w),
        h = num(h),
    );
    let _ = writeln!(
        out,
        "<text class=\"title\" x=\"{}\" y=\"16\" text-anchor=\"middle\">Validation accuracy vs {}</text>",
        num(w / 2.0),
        escape(&title(axis).to_lowercase()),
    );
    let _ = writeln!(
        out,
        "<path class=\"axes\" d=\"M{l},{t} L{l},{b} L{r},{b}\" fill=\"none\" stroke=\"{}\"/>",
        escape(&style.line_color),
        l = num(left),
        t = num(top),
        b = num(bottom),
        r = num(right),
    );
    for y in [y_lo, y_hi] {
        let _ = writeln!(
            out,
            "<text class=\"tick\" x=\"{}\" y=\"{}\" text-anchor=\"end\">{:.3}</text>",
            num(left - 4.0),
            num(py(y) + 3.0),
            y
        );
    }
    let _ = writeln!(
        out,
        "<text class=\"xlabel\" x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}{}</text>",
        num((left + right) / 2.0),
        num(h - 8.0),
        title(axis),
        if log_x(axis) { " (log scale)" } else { "" },
    );
    let verts: Vec<String> = points
        .iter()
        .zip(&xs)
        .map(|(p, &x)| format!("{},{}", num(px(x)), num(py(p.1))))
        .collect();
    let _ = writeln!(
        out,
        "<polyline class=\"series\" points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>",
        verts.join(" "),
        escape(&style.series_color),
    );
    for (p, &x) in points.iter().zip(&xs) {
        let _ = writeln!(
            out,
            "<circle class=\"point\" cx=\"{}\" cy=\"{}\" r=\"3.5\" fill=\"{}\" data-value=\"{}\" data-accuracy=\"{}\"/>",
            num(px(x)),
            num(py(p.1)),
            escape(&style.series_color),
            p.0,
            p.1,
        );
        let _ = writeln!(
            out,
            "<text class=\"tick\" x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>",
            num(px(x)),
            num(bottom + 14.0),
            p.0,
        );
    }
    out.push_str("</svg>\n");
    out
}

/// One chart per axis present, in axis order. Points are sorted by value;
/// skipped records are left out.
pub fn plot_scaling(records: &[ScalingRecord], style: &Style) -> Result<Vec<(Axis, String)>> {
    let usable: Vec<&ScalingRecord> = records
        .iter()
        .filter(|r| r.skipped.is_none() && r.val_accuracy.is_finite())
        .collect();
    if usable.is_empty() {
        return Err(Error::Validation("no scaling records to plot".into()));
    }
    let mut charts = Vec::new();
    for axis in [Axis::DatasetSize, Axis::ContextSize, Axis::Parameters] {
        let mut pts: Vec<(f64, f64)> = usable
            .iter()
            .filter(|r| r.axis == axis)
            .map(|r| (r.value, r.val_accuracy))
            .collect();
        if pts.is_empty() {
            continue;
        }
        pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        charts.push((axis, chart(axis, &pts, style)));
    }
    Ok(charts)
}
