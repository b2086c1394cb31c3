//! Plot data: two-column TSV files and a minimal self-contained SVG line chart.

use std::fmt::Write as _;

use super::{fmt_float, ExperimentRecord};

/// `log h \t log value` for the records at time `t` (all records when `t` is `None`).
pub fn rate_tsv(records: &[ExperimentRecord], t: Option<f64>) -> String {
    let mut out = String::from("log_h\tlog_error\n");
    for r in records.iter().filter(|r| t.is_none() || r.t == t) {
        if r.value > 0.0 {
            let _ = writeln!(out, "{}\t{}", fmt_float(r.h.ln()), fmt_float(r.value.ln()));
        }
    }
    out
}

const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// A line chart of named `(x, y)` series, with axis ranges fitted to the data.
pub fn svg_line_chart(title: &str, x_label: &str, y_label: &str, series: &[(String, Vec<(f64, f64)>)]) -> String {
    let (w, hgt, pad) = (640.0, 420.0, 60.0);
    let pts = series.iter().flat_map(|(_, s)| s.iter()).filter(|(x, y)| x.is_finite() && y.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 == x0 {
        x1 = x0 + 1.0;
    }
    if y1 == y0 {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| pad + (x - x0) / (x1 - x0) * (w - 2.0 * pad);
    let sy = |y: f64| hgt - pad - (y - y0) / (y1 - y0) * (hgt - 2.0 * pad);

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{hgt}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#, w / 2.0, escape(title));
    let _ = writeln!(
        svg,
        r#"<path d="M{pad},{pad} V{} H{}" fill="none" stroke="black"/>"#,
        hgt - pad,
        w - pad
    );
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, w / 2.0, hgt - 15.0, escape(x_label));
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">{}</text>"#,
        hgt / 2.0,
        hgt / 2.0,
        escape(y_label)
    );
    for (v, anchor_x, anchor_y) in [(x0, sx(x0), hgt - pad + 16.0), (x1, sx(x1), hgt - pad + 16.0)] {
        let _ = writeln!(svg, r#"<text x="{anchor_x}" y="{anchor_y}" text-anchor="middle">{v:.3}</text>"#);
    }
    for v in [y0, y1] {
        let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="end">{v:.3}</text>"#, pad - 6.0, sy(v) + 4.0);
    }
    for (i, (name, s)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let path: Vec<String> = s
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(svg, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#, path.join(" "));
        for p in &path {
            let (cx, cy) = p.split_once(',').unwrap();
            let _ = writeln!(svg, r#"<circle cx="{cx}" cy="{cy}" r="3" fill="{color}"/>"#);
        }
        let ly = pad + 16.0 * i as f64;
        let _ = writeln!(svg, r#"<text x="{}" y="{ly}" fill="{color}">{}</text>"#, w - pad - 120.0, escape(name));
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tsv_has_log_columns() {
        let recs = vec![
            ExperimentRecord::new("c", 1.0, 1.0).with_t(0.5),
            ExperimentRecord::new("c", 0.5, 0.25).with_t(0.5),
            ExperimentRecord::new("c", 0.5, 0.25).with_t(1.0),
        ];
        let tsv = rate_tsv(&recs, Some(0.5));
        let lines: Vec<&str> = tsv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[1], "0.0\t0.0");
        let cols: Vec<f64> = lines[2].split('\t').map(|c| c.parse().unwrap()).collect();
        assert!((cols[1] / cols[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn svg_is_well_formed_enough() {
        let svg = svg_line_chart("rate <t=1>", "log h", "log e", &[("t=1".into(), vec![(0.0, 0.0), (1.0, 2.0)])]);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("&lt;t=1&gt;") && svg.contains("<polyline"));
        assert!(svg_line_chart("empty", "x", "y", &[]).contains("</svg>"));
    }
}
