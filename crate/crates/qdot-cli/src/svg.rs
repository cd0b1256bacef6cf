//! Plot-ready SVG emission: axes plus polylines, no plotting framework.
//! Coordinates are formatted with fixed precision so output is byte-stable.

use std::fmt::Write;

pub struct Series<'a> {
    pub points: &'a [(f64, f64)],
    pub color: &'a str,
    pub label: &'a str,
}

const W: f64 = 800.0;
const H: f64 = 500.0;
const ML: f64 = 70.0; // margins
const MR: f64 = 20.0;
const MT: f64 = 30.0;
const MB: f64 = 50.0;

/// Cartesian line chart with 5 ticks per axis.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for s in series {
        for &(x, y) in s.points {
            x_min = x_min.min(x);
            x_max = x_max.max(x);
            y_min = y_min.min(y);
            y_max = y_max.max(y);
        }
    }
    if !x_min.is_finite() {
        x_min = 0.0;
        x_max = 1.0;
        y_min = 0.0;
        y_max = 1.0;
    }
    if x_max == x_min {
        x_max = x_min + 1.0;
    }
    if y_max == y_min {
        y_max = y_min + 1.0;
    }
    let px = |x: f64| ML + (x - x_min) / (x_max - x_min) * (W - ML - MR);
    let py = |y: f64| H - MB - (y - y_min) / (y_max - y_min) * (H - MT - MB);

    let mut out = svg_open();
    let _ = write!(
        out,
        "<text x=\"{:.1}\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
        W / 2.0,
        escape(title)
    );
    axes(&mut out, x_min, x_max, y_min, y_max, x_label, y_label, &px, &py);
    for s in series {
        if s.points.is_empty() {
            continue;
        }
        let mut d = String::new();
        for (i, &(x, y)) in s.points.iter().enumerate() {
            let _ = write!(d, "{}{:.2},{:.2}", if i == 0 { "M" } else { " L" }, px(x), py(y));
        }
        let _ = write!(
            out,
            "<path d=\"{d}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.2\"/>\n",
            s.color
        );
    }
    legend(&mut out, series);
    out.push_str("</svg>\n");
    out
}

/// Polar chart: intensity vs angle, drawn as r(φ) around the canvas center.
pub fn polar_chart(title: &str, series: &[Series]) -> String {
    let r_max = series
        .iter()
        .flat_map(|s| s.points.iter())
        .fold(0.0f64, |acc, &(_, r)| acc.max(r));
    let r_max = if r_max > 0.0 { r_max } else { 1.0 };
    let cx = W / 2.0;
    let cy = (H + MT) / 2.0;
    let r_px = (H - MT - MB) / 2.0;

    let mut out = svg_open();
    let _ = write!(
        out,
        "<text x=\"{:.1}\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
        W / 2.0,
        escape(title)
    );
    for frac in [0.25, 0.5, 0.75, 1.0] {
        let _ = write!(
            out,
            "<circle cx=\"{cx:.1}\" cy=\"{cy:.1}\" r=\"{:.2}\" fill=\"none\" stroke=\"#ddd\"/>\n",
            r_px * frac
        );
    }
    for k in 0..12 {
        let a = (k as f64 * 30.0).to_radians();
        let _ = write!(
            out,
            "<line x1=\"{cx:.1}\" y1=\"{cy:.1}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#eee\"/>\n",
            cx + r_px * a.cos(),
            cy - r_px * a.sin()
        );
    }
    for s in series {
        if s.points.is_empty() {
            continue;
        }
        let mut d = String::new();
        for (i, &(angle_deg, r)) in s.points.iter().enumerate() {
            let a = angle_deg.to_radians();
            let rr = r / r_max * r_px;
            let _ = write!(
                d,
                "{}{:.2},{:.2}",
                if i == 0 { "M" } else { " L" },
                cx + rr * a.cos(),
                cy - rr * a.sin()
            );
        }
        let _ = write!(
            out,
            "<path d=\"{d}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.2\"/>\n",
            s.color
        );
    }
    legend(&mut out, series);
    out.push_str("</svg>\n");
    out
}

fn svg_open() -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\" font-family=\"sans-serif\">\n"
    )
}

#[allow(clippy::too_many_arguments)]
fn axes(
    out: &mut String,
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
    x_label: &str,
    y_label: &str,
    px: &dyn Fn(f64) -> f64,
    py: &dyn Fn(f64) -> f64,
) {
    let _ = write!(
        out,
        "<line x1=\"{ML}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
        H - MB,
        W - MR,
        H - MB
    );
    let _ = write!(
        out,
        "<line x1=\"{ML}\" y1=\"{MT}\" x2=\"{ML}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
        H - MB
    );
    for k in 0..=5 {
        let xv = x_min + (x_max - x_min) * k as f64 / 5.0;
        let yv = y_min + (y_max - y_min) * k as f64 / 5.0;
        let _ = write!(
            out,
            "<line x1=\"{0:.2}\" y1=\"{1:.1}\" x2=\"{0:.2}\" y2=\"{2:.1}\" stroke=\"black\"/>\n",
            px(xv),
            H - MB,
            H - MB + 5.0
        );
        let _ = write!(
            out,
            "<text x=\"{:.2}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"11\">{}</text>\n",
            px(xv),
            H - MB + 18.0,
            format_tick(xv)
        );
        let _ = write!(
            out,
            "<line x1=\"{x1:.1}\" y1=\"{y:.2}\" x2=\"{ML}\" y2=\"{y:.2}\" stroke=\"black\"/>\n",
            x1 = ML - 5.0,
            y = py(yv)
        );
        let _ = write!(
            out,
            "<text x=\"{:.1}\" y=\"{:.2}\" text-anchor=\"end\" font-size=\"11\">{}</text>\n",
            ML - 8.0,
            py(yv) + 4.0,
            format_tick(yv)
        );
    }
    let _ = write!(
        out,
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"12\">{}</text>\n",
        (ML + W - MR) / 2.0,
        H - 10.0,
        escape(x_label)
    );
    let _ = write!(
        out,
        "<text x=\"16\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 {:.1})\">{}</text>\n",
        (MT + H - MB) / 2.0,
        (MT + H - MB) / 2.0,
        escape(y_label)
    );
}

fn legend(out: &mut String, series: &[Series]) {
    for (i, s) in series.iter().enumerate() {
        if s.label.is_empty() {
            continue;
        }
        let y = MT + 14.0 * i as f64 + 10.0;
        let _ = write!(
            out,
            "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"10\" height=\"3\" fill=\"{}\"/>\n",
            W - MR - 150.0,
            y - 4.0,
            s.color
        );
        let _ = write!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\">{}</text>\n",
            W - MR - 135.0,
            y,
            escape(s.label)
        );
    }
}

fn format_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    if a >= 1e5 || a < 1e-3 {
        format!("{v:.2e}")
    } else if a >= 100.0 {
        format!("{v:.1}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
