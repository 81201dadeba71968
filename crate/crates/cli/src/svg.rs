//! Flat heatmap of `gap = upper - lower` over the (a, s) grid.

use std::fmt::Write as _;

use exproj::ratmath::to_f64;
use exproj::Rational;

/// Index 0 marks zero gap; 1..=11 bucket positive gaps by fraction of the maximum.
pub const PALETTE: [&str; 12] = [
    "#1a9850", "#fff5eb", "#fee6ce", "#fdd0a2", "#fdae6b", "#fd8d3c", "#f16913", "#e6550d", "#d94801", "#a63603",
    "#8c2d04", "#7f2704",
];

pub struct Cell {
    pub a: Rational,
    pub s: Rational,
    pub gap: Rational,
}

fn bucket(gap: f64, max_gap: f64) -> usize {
    if gap <= 0.0 || max_gap <= 0.0 {
        0
    } else {
        1 + ((gap / max_gap) * 10.0).floor().min(10.0) as usize
    }
}

/// One square per grid point of side `1/grid`, `a` to the right and `s` up.
pub fn heatmap(cells: &[Cell], a_max: f64, s_max: f64, grid: i64, title: &str) -> String {
    let scale = 600.0 / a_max.max(s_max);
    let (w, h) = (a_max * scale, s_max * scale);
    let side = scale / grid as f64;
    let max_gap = cells.iter().map(|c| to_f64(&c.gap)).fold(0.0, f64::max);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}" viewBox="-40 -30 {:.0} {:.0}">"#,
        w + 80.0,
        h + 70.0,
        w + 80.0,
        h + 70.0
    );
    let _ = writeln!(out, r#"<title>{title}</title>"#);
    let _ = writeln!(out, r##"<rect x="0" y="0" width="{w:.1}" height="{h:.1}" fill="#f7f7f7" stroke="#444"/>"##);
    for c in cells {
        let x = to_f64(&c.a) * scale - side / 2.0;
        let y = h - to_f64(&c.s) * scale - side / 2.0;
        let color = PALETTE[bucket(to_f64(&c.gap), max_gap)];
        let _ = writeln!(
            out,
            r#"<rect x="{x:.2}" y="{y:.2}" width="{side:.2}" height="{side:.2}" fill="{color}"><title>a={} s={} gap={}</title></rect>"#,
            c.a, c.s, c.gap
        );
    }
    let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" font-size="14">a</text>"#, w / 2.0, h + 25.0);
    let _ = writeln!(out, r#"<text x="-30" y="{:.1}" font-size="14">s</text>"#, h / 2.0);
    let _ = writeln!(out, r#"<text x="0" y="-10" font-size="14">{title} (max gap {max_gap:.4})</text>"#);
    out.push_str("</svg>\n");
    out
}
