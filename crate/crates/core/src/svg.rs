//! Static SVG figures: node scatter in the (u, v) plane and the
//! cluster-colored adjacency matrix.

use std::fmt::Write as _;

use crate::graph::NodeId;

const PALETTE: [&str; 12] = [
    "#e41a1c", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00", "#a65628", "#f781bf", "#999999",
    "#66c2a5", "#fc8d62", "#8da0cb", "#e78ac3",
];

pub fn color(index: usize) -> &'static str {
    PALETTE[index % PALETTE.len()]
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

#[derive(Debug, Clone)]
pub struct ScatterPoint {
    pub x: f64,
    pub y: f64,
    pub group: usize,
    pub label: Option<String>,
}

/// Scatter plot with axes through the origin.
pub fn scatter(points: &[ScatterPoint], title: &str, x_label: &str, y_label: &str) -> String {
    const SIZE: f64 = 480.0;
    const PAD: f64 = 48.0;
    let extent = points
        .iter()
        .flat_map(|p| [p.x.abs(), p.y.abs()])
        .filter(|v| v.is_finite())
        .fold(0.0, f64::max)
        .max(1e-12)
        * 1.1;
    let plot = SIZE - 2.0 * PAD;
    let sx = |x: f64| PAD + (x + extent) / (2.0 * extent) * plot;
    let sy = |y: f64| SIZE - PAD - (y + extent) / (2.0 * extent) * plot;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, SIZE / 2.0, escape(title));
    let _ = writeln!(
        out,
        r##"<line x1="{PAD}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#888"/>"##,
        sy(0.0),
        SIZE - PAD,
        sy(0.0)
    );
    let _ = writeln!(
        out,
        r##"<line x1="{:.2}" y1="{PAD}" x2="{:.2}" y2="{:.2}" stroke="#888"/>"##,
        sx(0.0),
        sx(0.0),
        SIZE - PAD
    );
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, SIZE / 2.0, SIZE - 12.0, escape(x_label));
    let _ = writeln!(
        out,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        SIZE / 2.0,
        SIZE / 2.0,
        escape(y_label)
    );
    for p in points.iter().filter(|p| p.x.is_finite() && p.y.is_finite()) {
        let _ = write!(
            out,
            r#"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="{}" fill-opacity="0.8">"#,
            sx(p.x),
            sy(p.y),
            color(p.group)
        );
        if let Some(label) = &p.label {
            let _ = write!(out, "<title>{}</title>", escape(label));
        }
        out.push_str("</circle>\n");
    }
    out.push_str("</svg>\n");
    out
}

/// Adjacency matrix with rows and columns permuted by `order`; each edge is a
/// cell colored by its cluster.
pub fn adjacency(order: &[NodeId], edges: &[(NodeId, NodeId, usize)], title: &str) -> String {
    let n = order.len().max(1);
    let cell = (600.0 / n as f64).clamp(1.0, 12.0);
    let pad = 40.0;
    let side = cell * n as f64 + 2.0 * pad;
    let mut position = vec![0usize; order.iter().copied().max().map_or(0, |m| m + 1)];
    for (p, &v) in order.iter().enumerate() {
        position[v] = p;
    }

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{side:.0}" height="{side:.0}" viewBox="0 0 {side:.2} {side:.2}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">{}</text>"#, side / 2.0, escape(title));
    let _ = writeln!(
        out,
        r##"<rect x="{pad}" y="{pad}" width="{:.2}" height="{:.2}" fill="none" stroke="#ccc"/>"##,
        cell * n as f64,
        cell * n as f64
    );
    for &(s, t, c) in edges {
        let _ = writeln!(
            out,
            r#"<rect x="{:.2}" y="{:.2}" width="{cell:.2}" height="{cell:.2}" fill="{}"/>"#,
            pad + position[t] as f64 * cell,
            pad + position[s] as f64 * cell,
            color(c)
        );
    }
    out.push_str("</svg>\n");
    out
}
