//! Minimal static SVG rendering for heatmaps, line plots and bar charts.

use std::fmt::Write as _;

use crate::bundle::{Series, Table};

const W: f64 = 640.0;
const H: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 130.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn tick(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 {
        "0".into()
    } else if (1e-3..1e4).contains(&a) {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.2e}")
    }
}

/// Viridis sampled at five stops, linearly interpolated.
fn colour(x: f64) -> String {
    const STOPS: [(f64, f64, f64); 5] = [
        (68.0, 1.0, 84.0),
        (59.0, 82.0, 139.0),
        (33.0, 145.0, 140.0),
        (94.0, 201.0, 98.0),
        (253.0, 231.0, 37.0),
    ];
    let x = if x.is_finite() { x.clamp(0.0, 1.0) } else { 0.0 };
    let f = x * 4.0;
    let k = (f.floor() as usize).min(3);
    let t = f - k as f64;
    let (a, b) = (STOPS[k], STOPS[k + 1]);
    let c = |p: f64, q: f64| (p + (q - p) * t).round() as u8;
    format!("#{:02x}{:02x}{:02x}", c(a.0, b.0), c(a.1, b.1), c(a.2, b.2))
}

fn range(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in vals.filter(|v| v.is_finite()) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-300 {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 1e-6 };
        return (lo - pad, hi + pad);
    }
    (lo, hi)
}

fn header(s: &mut String, title: &str) {
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="28" text-anchor="middle" font-size="15">{}</text>"#,
        W / 2.0,
        esc(title)
    );
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x0) / (self.x1 - self.x0) * (W - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        H - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (H - TOP - BOTTOM)
    }

    fn axes(&self, s: &mut String, xlabel: &str, ylabel: &str, xticks: bool) {
        let (l, r, t, b) = (LEFT, W - RIGHT, TOP, H - BOTTOM);
        let _ = writeln!(
            s,
            r#"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            r - l,
            b - t
        );
        for k in 0..=4 {
            let f = k as f64 / 4.0;
            if xticks {
                let xv = self.x0 + f * (self.x1 - self.x0);
                let x = self.px(xv);
                let _ = writeln!(s, r#"<line x1="{x:.2}" y1="{b}" x2="{x:.2}" y2="{}" stroke="black"/>"#, b + 5.0);
                let _ = writeln!(
                    s,
                    r#"<text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#,
                    b + 19.0,
                    tick(xv)
                );
            }
            let yv = self.y0 + f * (self.y1 - self.y0);
            let y = self.py(yv);
            let _ = writeln!(s, r#"<line x1="{}" y1="{y:.2}" x2="{l}" y2="{y:.2}" stroke="black"/>"#, l - 5.0);
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
                l - 8.0,
                y + 4.0,
                tick(yv)
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            (l + r) / 2.0,
            H - 15.0,
            esc(xlabel)
        );
        let _ = writeln!(
            s,
            r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>"#,
            (t + b) / 2.0,
            esc(ylabel)
        );
    }
}

/// Cell-centred heatmap with a colour bar.
pub fn heatmap(t: &Table) -> String {
    let mut s = String::new();
    header(&mut s, &t.title);
    let edges = |a: &[f64]| -> (f64, f64, f64) {
        let d = if a.len() > 1 { (a[a.len() - 1] - a[0]) / (a.len() - 1) as f64 } else { 1.0 };
        let d = if d > 0.0 { d } else { 1.0 };
        (a.first().copied().unwrap_or(0.0) - d / 2.0, a.last().copied().unwrap_or(0.0) + d / 2.0, d)
    };
    let (x0, x1, dx) = edges(&t.axis1);
    let (y0, y1, dy) = edges(&t.axis2);
    let fr = Frame { x0, x1, y0, y1 };
    let (lo, hi) = range(t.values.iter().flatten().copied());
    for (i, row) in t.values.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let (xa, xb) = (fr.px(t.axis1[i] - dx / 2.0), fr.px(t.axis1[i] + dx / 2.0));
            let (ya, yb) = (fr.py(t.axis2[j] + dy / 2.0), fr.py(t.axis2[j] - dy / 2.0));
            let _ = writeln!(
                s,
                r#"<rect x="{xa:.2}" y="{ya:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                xb - xa + 0.3,
                yb - ya + 0.3,
                colour((v - lo) / (hi - lo))
            );
        }
    }
    fr.axes(&mut s, &t.axis1_label, &t.axis2_label, true);
    let bx = W - RIGHT + 25.0;
    let n = 50;
    let hgt = (H - TOP - BOTTOM) / n as f64;
    for k in 0..n {
        let y = H - BOTTOM - (k + 1) as f64 * hgt;
        let _ = writeln!(
            s,
            r#"<rect x="{bx}" y="{y:.2}" width="18" height="{:.2}" fill="{}"/>"#,
            hgt + 0.3,
            colour((k as f64 + 0.5) / n as f64)
        );
    }
    for (f, v) in [(0.0, lo), (0.5, 0.5 * (lo + hi)), (1.0, hi)] {
        let y = H - BOTTOM - f * (H - TOP - BOTTOM);
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}">{}</text>"#, bx + 24.0, y + 4.0, tick(v));
    }
    s.push_str("</svg>\n");
    s
}

pub fn lines(title: &str, xlabel: &str, ylabel: &str, series: &[Series]) -> String {
    let mut s = String::new();
    header(&mut s, title);
    let (x0, x1) = range(series.iter().flat_map(|r| r.points.iter().map(|p| p.0)));
    let (y0, y1) = range(series.iter().flat_map(|r| r.points.iter().map(|p| p.1)));
    let pad = 0.05 * (y1 - y0);
    let fr = Frame {
        x0,
        x1,
        y0: y0 - pad,
        y1: y1 + pad,
    };
    fr.axes(&mut s, xlabel, ylabel, true);
    for (k, ser) in series.iter().enumerate() {
        let c = PALETTE[k % PALETTE.len()];
        let pts: Vec<String> = ser
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", fr.px(x), fr.py(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{c}" stroke-width="2"/>"#,
            pts.join(" ")
        );
        for &(x, y) in &ser.points {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{c}"/>"#,
                fr.px(x),
                fr.py(y)
            );
        }
        legend(&mut s, k, c, &ser.label);
    }
    s.push_str("</svg>\n");
    s
}

fn legend(s: &mut String, k: usize, c: &str, label: &str) {
    let y = TOP + 10.0 + 20.0 * k as f64;
    let x = W - RIGHT + 12.0;
    let _ = writeln!(s, r#"<rect x="{x}" y="{}" width="12" height="12" fill="{c}"/>"#, y - 10.0);
    let _ = writeln!(s, r#"<text x="{}" y="{y}">{}</text>"#, x + 18.0, esc(label));
}

/// Grouped bars; series values are read from the point ordinates in category order.
pub fn bars(title: &str, ylabel: &str, categories: &[String], series: &[Series]) -> String {
    let mut s = String::new();
    header(&mut s, title);
    let (_, hi) = range(series.iter().flat_map(|r| r.points.iter().map(|p| p.1)).chain([0.0]));
    let fr = Frame {
        x0: 0.0,
        x1: categories.len().max(1) as f64,
        y0: 0.0,
        y1: hi * 1.1,
    };
    fr.axes(&mut s, "", ylabel, false);
    let ns = series.len().max(1) as f64;
    let width = 0.8 / ns;
    for (k, ser) in series.iter().enumerate() {
        let c = PALETTE[k % PALETTE.len()];
        for (i, &(_, v)) in ser.points.iter().enumerate() {
            let xa = fr.px(i as f64 + 0.1 + k as f64 * width);
            let xb = fr.px(i as f64 + 0.1 + (k + 1) as f64 * width);
            let (ya, yb) = (fr.py(v), fr.py(0.0));
            let _ = writeln!(
                s,
                r#"<rect x="{xa:.2}" y="{ya:.2}" width="{:.2}" height="{:.2}" fill="{c}"/>"#,
                xb - xa - 1.0,
                (yb - ya).max(0.0)
            );
        }
        legend(&mut s, k, c, &ser.label);
    }
    for (i, cat) in categories.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#,
            fr.px(i as f64 + 0.5),
            H - BOTTOM + 19.0,
            esc(cat)
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colour_endpoints() {
        assert_eq!(colour(0.0), "#440154");
        assert_eq!(colour(1.0), "#fde725");
        assert_eq!(colour(f64::NAN), "#440154");
    }

    #[test]
    fn ticks_are_compact() {
        assert_eq!(tick(0.0), "0");
        assert_eq!(tick(0.25), "0.25");
        assert_eq!(tick(2.0), "2");
        assert_eq!(tick(1.5e-5), "1.50e-5");
    }

    #[test]
    fn text_is_escaped() {
        let svg = lines("a<b & c", "x", "y", &[]);
        assert!(svg.contains("a&lt;b &amp; c"));
        assert!(svg.ends_with("</svg>\n"));
    }
}
