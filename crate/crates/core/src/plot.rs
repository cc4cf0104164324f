//! Minimal SVG writer for ROC panels.
//!
//! Output depends only on the inputs: fixed number formatting, no
//! timestamps, no random ids.

use std::fmt::Write;

/// One labelled curve of `(x, y)` points in the unit square.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// A square plot of several curves sharing unit axes.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub title: String,
    pub series: Vec<Series>,
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
const SIDE: f64 = 240.0;
const MARGIN: f64 = 40.0;
const CELL: f64 = SIDE + 2.0 * MARGIN;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Renders panels left to right, each with axes, a chance diagonal and a
/// legend.
pub fn roc_svg(panels: &[Panel], x_label: &str, y_label: &str) -> String {
    let width = CELL * panels.len().max(1) as f64;
    let height = CELL + 20.0 * panels.iter().map(|p| p.series.len()).max().unwrap_or(0) as f64;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="11">"#
    );
    for (i, panel) in panels.iter().enumerate() {
        let ox = i as f64 * CELL + MARGIN;
        let oy = MARGIN;
        let px = |x: f64| ox + x * SIDE;
        let py = |y: f64| oy + (1.0 - y) * SIDE;
        let _ = writeln!(s, r#"<g>"#);
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="13">{}</text>"#,
            px(0.5),
            oy - 12.0,
            escape(&panel.title)
        );
        let _ = writeln!(
            s,
            r##"<rect x="{ox:.2}" y="{oy:.2}" width="{SIDE:.2}" height="{SIDE:.2}" fill="none" stroke="#000"/>"##
        );
        let _ = writeln!(
            s,
            r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#999" stroke-dasharray="4 3"/>"##,
            px(0.0),
            py(0.0),
            px(1.0),
            py(1.0)
        );
        for t in 0..=4 {
            let v = t as f64 / 4.0;
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{v:.2}</text>"#,
                px(v),
                py(0.0) + 14.0
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{v:.2}</text>"#,
                px(0.0) - 4.0,
                py(v) + 4.0
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            px(0.5),
            py(0.0) + 30.0,
            escape(x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" transform="rotate(-90 {:.2} {:.2})">{}</text>"#,
            ox - 28.0,
            py(0.5),
            ox - 28.0,
            py(0.5),
            escape(y_label)
        );
        for (j, series) in panel.series.iter().enumerate() {
            let color = PALETTE[j % PALETTE.len()];
            let pts: Vec<String> = series
                .points
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
                .collect();
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
                pts.join(" ")
            );
            let ly = oy + SIDE + 44.0 + 16.0 * j as f64;
            let _ = writeln!(
                s,
                r#"<line x1="{ox:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="2"/>"#,
                ly - 4.0,
                ox + 16.0,
                ly - 4.0
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{ly:.2}">{}</text>"#,
                ox + 20.0,
                escape(&series.label)
            );
        }
        let _ = writeln!(s, "</g>");
    }
    s.push_str("</svg>\n");
    s
}
