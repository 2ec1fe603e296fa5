//! Static SVG line charts of two count series.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 320.0;
const MARGIN: f64 = 40.0;

fn polyline(values: &[u64], max: f64, color: &str) -> String {
    let n = values.len().max(2) - 1;
    let points: Vec<String> = values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let x = MARGIN + (WIDTH - 2.0 * MARGIN) * i as f64 / n as f64;
            let y = HEIGHT - MARGIN - (HEIGHT - 2.0 * MARGIN) * (*v as f64 / max);
            format!("{x:.1},{y:.1}")
        })
        .collect();
    format!(
        "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"2\" points=\"{}\"/>\n",
        points.join(" ")
    )
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

pub fn line_chart(title: &str, label_a: &str, a: &[u64], label_b: &str, b: &[u64]) -> String {
    let max = a.iter().chain(b).copied().max().unwrap_or(0).max(1) as f64;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(svg, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    let _ = writeln!(
        svg,
        "<text x=\"{MARGIN}\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">{}</text>",
        escape(title)
    );
    let bottom = HEIGHT - MARGIN;
    let _ = writeln!(
        svg,
        "<line x1=\"{MARGIN}\" y1=\"{bottom}\" x2=\"{}\" y2=\"{bottom}\" stroke=\"black\"/>",
        WIDTH - MARGIN
    );
    let _ = writeln!(
        svg,
        "<line x1=\"{MARGIN}\" y1=\"{MARGIN}\" x2=\"{MARGIN}\" y2=\"{bottom}\" stroke=\"black\"/>"
    );
    let _ = writeln!(
        svg,
        "<text x=\"4\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\">{}</text>",
        MARGIN + 4.0,
        max as u64
    );
    svg.push_str(&polyline(a, max, "#1f77b4"));
    svg.push_str(&polyline(b, max, "#d62728"));
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#1f77b4\">{}</text>",
        WIDTH - 220.0,
        escape(label_a)
    );
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#d62728\">{}</text>",
        WIDTH - 110.0,
        escape(label_b)
    );
    svg.push_str("</svg>\n");
    svg
}
