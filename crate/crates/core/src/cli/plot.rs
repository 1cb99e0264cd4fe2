//! Semilog BER chart as a standalone SVG.
//!
//! One polyline per (channel, modulation, coding) series through its nonzero
//! BER points. Points with no errors are left off the line and drawn as open
//! triangles at `1/bits`, the smallest BER the run could have resolved.

use std::fmt::Write as _;
use std::str::FromStr;

use super::csv::Row;

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 600.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 600.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 540.0;
const LOWEST_DECADE: i32 = -7;
const PALETTE: [&str; 9] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf", "#7f7f7f",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum XAxis {
    #[default]
    Snr,
    Ebn0,
}

impl XAxis {
    fn value(self, r: &Row) -> f64 {
        match self {
            XAxis::Snr => r.snr_db,
            XAxis::Ebn0 => r.ebn0_db,
        }
    }

    fn label(self) -> &'static str {
        match self {
            XAxis::Snr => "SNR (dB)",
            XAxis::Ebn0 => "Eb/N0 (dB)",
        }
    }
}

impl FromStr for XAxis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "snr" => Ok(XAxis::Snr),
            "ebn0" => Ok(XAxis::Ebn0),
            _ => Err(format!("unknown x axis {s:?}; expected snr or ebn0")),
        }
    }
}

struct Series<'a> {
    label: String,
    rows: Vec<&'a Row>,
}

fn group(rows: &[Row]) -> Vec<Series<'_>> {
    let mut out: Vec<Series> = Vec::new();
    for r in rows {
        let label = format!(
            "{} {} {}",
            r.channel,
            r.modulation,
            if r.coding { "coded" } else { "uncoded" }
        );
        match out.iter_mut().find(|s| s.label == label) {
            Some(s) => s.rows.push(r),
            None => out.push(Series { label, rows: vec![r] }),
        }
    }
    out
}

/// Tick spacing of 1, 2 or 5 times a power of ten giving at most ~10 ticks.
fn tick_step(span: f64) -> f64 {
    let raw = span / 10.0;
    let base = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|m| m * base)
        .find(|&s| s >= raw)
        .unwrap_or(10.0 * base)
}

fn plotted_ber(r: &Row) -> f64 {
    if r.errors == 0 {
        1.0 / r.bits as f64
    } else {
        r.ber
    }
}

pub fn render_svg(rows: &[Row], axis: XAxis) -> String {
    let series = group(rows);

    let (mut x_min, mut x_max) = rows
        .iter()
        .map(|r| axis.value(r))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
    if !x_min.is_finite() {
        (x_min, x_max) = (0.0, 30.0);
    }
    if x_max - x_min < 1e-9 {
        (x_min, x_max) = (x_min - 1.0, x_max + 1.0);
    }
    let lowest = rows
        .iter()
        .map(plotted_ber)
        .filter(|&b| b > 0.0)
        .fold(1.0f64, f64::min);
    let bottom_decade = (lowest.log10().floor() as i32).min(LOWEST_DECADE);

    let sx = |x: f64| LEFT + (x - x_min) / (x_max - x_min) * (RIGHT - LEFT);
    let sy = |b: f64| {
        let t = b.log10().clamp(bottom_decade as f64, 0.0) / bottom_decade as f64;
        TOP + t * (BOTTOM - TOP)
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);

    let _ = writeln!(svg, r##"<g class="grid" stroke="#dddddd">"##);
    for d in bottom_decade..=0 {
        let y = sy(10f64.powi(d));
        let _ = writeln!(svg, r#"<line x1="{LEFT}" y1="{y:.2}" x2="{RIGHT}" y2="{y:.2}"/>"#);
    }
    let step = tick_step(x_max - x_min);
    let first = (x_min / step).ceil() as i64;
    let last = (x_max / step + 1e-9).floor() as i64;
    for i in first..=last {
        let x = sx(i as f64 * step);
        let _ = writeln!(svg, r#"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{BOTTOM}"/>"#);
    }
    let _ = writeln!(svg, "</g>");

    let _ = writeln!(
        svg,
        r#"<rect class="frame" x="{LEFT}" y="{TOP}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        RIGHT - LEFT,
        BOTTOM - TOP
    );

    let _ = writeln!(svg, r#"<g class="y-ticks" text-anchor="end">"#);
    for d in bottom_decade..=0 {
        let y = sy(10f64.powi(d));
        let _ = writeln!(svg, r#"<text x="{}" y="{:.2}">1e{d}</text>"#, LEFT - 6.0, y + 4.0);
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(svg, r#"<g class="x-ticks" text-anchor="middle">"#);
    for i in first..=last {
        let v = i as f64 * step;
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{}">{v}</text>"#, sx(v), BOTTOM + 18.0);
    }
    let _ = writeln!(svg, "</g>");

    let _ = writeln!(
        svg,
        r#"<text class="x-label" x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (LEFT + RIGHT) / 2.0,
        BOTTOM + 42.0,
        axis.label()
    );
    let _ = writeln!(
        svg,
        r#"<text class="y-label" x="20" y="{0}" text-anchor="middle" transform="rotate(-90 20 {0})">BER</text>"#,
        (TOP + BOTTOM) / 2.0
    );

    for (i, s) in series.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let mut pts: Vec<(f64, &Row)> = s.rows.iter().map(|r| (axis.value(r), *r)).collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let _ = writeln!(svg, r#"<g class="series" stroke="{colour}" fill="none">"#);
        let line: Vec<String> = pts
            .iter()
            .filter(|(_, r)| r.errors > 0)
            .map(|(x, r)| format!("{:.2},{:.2}", sx(*x), sy(r.ber)))
            .collect();
        if !line.is_empty() {
            let _ = writeln!(svg, r#"<polyline points="{}" stroke-width="1.5"/>"#, line.join(" "));
        }
        for (x, r) in &pts {
            let (px, py) = (sx(*x), sy(plotted_ber(r)));
            if r.errors > 0 {
                let _ = writeln!(svg, r#"<circle class="point" cx="{px:.2}" cy="{py:.2}" r="2.5"/>"#);
            } else {
                let _ = writeln!(
                    svg,
                    r#"<path class="floor" d="M{:.2},{:.2} L{:.2},{:.2} L{px:.2},{:.2} Z"/>"#,
                    px - 4.0,
                    py - 4.0,
                    px + 4.0,
                    py - 4.0,
                    py + 4.0
                );
            }
        }
        let _ = writeln!(svg, "</g>");
    }

    let _ = writeln!(svg, r#"<g class="legend">"#);
    let lx = RIGHT + 16.0;
    for (i, s) in series.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let y = TOP + 12.0 + 18.0 * i as f64;
        let _ = writeln!(
            svg,
            r#"<g class="legend-entry"><line x1="{lx}" y1="{y}" x2="{}" y2="{y}" stroke="{colour}" stroke-width="2"/><text x="{}" y="{}">{}</text></g>"#,
            lx + 20.0,
            lx + 26.0,
            y + 4.0,
            s.label
        );
    }
    let note_y = TOP + 12.0 + 18.0 * series.len() as f64 + 8.0;
    let _ = writeln!(
        svg,
        r#"<text class="legend-note" x="{lx}" y="{note_y}" font-size="10">open triangle: no errors, drawn at 1/bits</text>"#
    );
    let _ = writeln!(svg, "</g>");
    svg.push_str("</svg>\n");
    svg
}
