//! Standalone SVG scatter plots of an orbit in signed coordinates.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::orbit::OrbitRecord;

const PANEL: f64 = 300.0;
const MARGIN: f64 = 40.0;
const RADIUS: f64 = 2.0;

/// `(x label, y label, x index, y index)` for each panel.
const PANELS: [(&str, &str, usize, usize); 3] = [
    ("b12", "b23", 0, 1),
    ("b23", "b13", 1, 2),
    ("b12", "b13", 0, 2),
];

/// Half-width of every axis: the largest coordinate plus 5%.
pub fn axis_extent(records: &[OrbitRecord]) -> f64 {
    let m = records.iter().map(|r| r.norm).fold(0.0, f64::max);
    if m > 0.0 {
        m * 1.05
    } else {
        1.0
    }
}

/// Pixel rectangle `(x, y, width, height)` of the plotting area of panel `n`.
pub fn panel_box(n: usize) -> (f64, f64, f64, f64) {
    (MARGIN + n as f64 * (PANEL + MARGIN), MARGIN, PANEL, PANEL)
}

pub fn render_svg(records: &[OrbitRecord]) -> Result<String> {
    if records.is_empty() {
        return Err(Error::InvalidArgument("cannot plot an empty orbit".into()));
    }
    let extent = axis_extent(records);
    let width = 3.0 * PANEL + 4.0 * MARGIN;
    let height = PANEL + 2.0 * MARGIN;
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);

    for (n, (xl, yl, xi, yi)) in PANELS.iter().enumerate() {
        let (x0, y0, w, h) = panel_box(n);
        let to_px = |v: f64| (v + extent) / (2.0 * extent);
        let _ = writeln!(s, r#"<g class="panel" id="panel-{xl}-{yl}">"#);
        let _ = writeln!(
            s,
            r#"<rect class="axes" x="{x0}" y="{y0}" width="{w}" height="{h}" fill="none" stroke="black"/>"#
        );
        let (cx, cy) = (x0 + w / 2.0, y0 + h / 2.0);
        let _ = writeln!(
            s,
            r##"<line x1="{x0}" y1="{cy}" x2="{}" y2="{cy}" stroke="#bbb"/><line x1="{cx}" y1="{y0}" x2="{cx}" y2="{}" stroke="#bbb"/>"##,
            x0 + w,
            y0 + h
        );
        let _ = writeln!(
            s,
            r#"<text x="{cx}" y="{}" text-anchor="middle" font-size="12">{xl}</text>"#,
            y0 + h + 16.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{cy}" text-anchor="middle" font-size="12" transform="rotate(-90 {} {cy})">{yl}</text>"#,
            x0 - 12.0,
            x0 - 12.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="10">±{extent:.4}</text>"#,
            x0 + 2.0,
            y0 - 4.0
        );
        for r in records {
            let w3 = r.triple.weights();
            let px = x0 + to_px(w3[*xi]) * w;
            let py = y0 + (1.0 - to_px(w3[*yi])) * h;
            let _ = writeln!(
                s,
                r#"<circle class="marker" cx="{px:.3}" cy="{py:.3}" r="{RADIUS}" fill="steelblue" fill-opacity="0.7"/>"#
            );
        }
        let _ = writeln!(s, "</g>");
    }
    let _ = writeln!(s, "</svg>");
    Ok(s)
}

pub fn render_svg_scatter(records: &[OrbitRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let svg = render_svg(records)?;
    fs::write(path, svg).map_err(|e| Error::io(path, e))
}
