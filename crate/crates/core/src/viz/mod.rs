//! File artifacts: embedding tables, pitch drawings and scaling charts.

mod charts;
mod embeddings;
mod pitch;
mod style;

pub use charts::plot_scaling;
pub use embeddings::{
    embedding_csv_header, embedding_table, export_embeddings, pca, write_embeddings_csv, EmbeddingRow, EmbeddingTable,
    Pca, Projection,
};
pub use pitch::{render_comparison, render_pitch, PitchScene, SceneAction};
pub use style::Style;

/// Escapes text for use in XML content or attribute values.
pub(crate) fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

/// Fixed-precision number formatting keeps output byte-stable.
pub(crate) fn num(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}
