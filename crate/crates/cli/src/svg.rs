//! Standalone SVG line chart of a voltage trace, time in μs and voltage in kV.

use std::fmt::Write as _;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 48.0;
const BOTTOM: f64 = 56.0;

/// Step from the 1-2-5 sequence giving at most `max_ticks` intervals.
fn tick_step(span: f64, max_ticks: usize) -> f64 {
    if !(span > 0.0 && span.is_finite()) {
        return 1.0;
    }
    let raw = span / max_ticks as f64;
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag)
}

fn ticks(lo: f64, hi: f64, max_ticks: usize) -> Vec<f64> {
    let step = tick_step(hi - lo, max_ticks);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step + 1e-9).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn trim(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

/// Renders `voltage[i]` (V) against `times[i]` (s). An empty series gives
/// the axes and title only.
pub fn voltage_chart(times: &[f64], voltage: &[f64], title: &str) -> String {
    let n = times.len().min(voltage.len());
    let t_us: Vec<f64> = times[..n].iter().map(|t| t * 1e6).collect();
    let v_kv: Vec<f64> = voltage[..n].iter().map(|v| v * 1e-3).collect();

    let (mut x0, mut x1) = t_us
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), t| (a.min(*t), b.max(*t)));
    let (mut y0, mut y1) = v_kv
        .iter()
        .fold((0.0_f64, 0.0_f64), |(a, b), v| (a.min(*v), b.max(*v)));
    if x1.partial_cmp(&x0) != Some(std::cmp::Ordering::Greater) {
        x0 = 0.0;
        x1 = if n > 0 { t_us[0].max(0.0) + 1.0 } else { 1.0 };
    }
    if y1.partial_cmp(&y0) != Some(std::cmp::Ordering::Greater) {
        y0 = -1.0;
        y1 = 1.0;
    }
    let pad = 0.05 * (y1 - y0);
    let (y0, y1) = (y0 - pad, y1 + pad);

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |t: f64| LEFT + (t - x0) / (x1 - x0) * plot_w;
    let py = |v: f64| TOP + (y1 - v) / (y1 - y0) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="28" text-anchor="middle" font-size="16">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );

    let _ = writeln!(s, r#"<g stroke="black" stroke-width="1" fill="none">"#);
    let _ = writeln!(s, r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}"/>"#);
    for t in ticks(x0, x1, 10) {
        let x = trim(px(t));
        let _ = writeln!(s, r#"<line x1="{x}" y1="{}" x2="{x}" y2="{}"/>"#, TOP + plot_h, TOP + plot_h + 5.0);
    }
    for v in ticks(y0, y1, 8) {
        let y = trim(py(v));
        let _ = writeln!(s, r#"<line x1="{}" y1="{y}" x2="{LEFT}" y2="{y}"/>"#, LEFT - 5.0);
    }
    let _ = writeln!(s, "</g>");

    let _ = writeln!(s, r#"<g fill="black">"#);
    for t in ticks(x0, x1, 10) {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            trim(px(t)),
            TOP + plot_h + 20.0,
            trim(t)
        );
    }
    for v in ticks(y0, y1, 8) {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
            LEFT - 8.0,
            trim(py(v) + 4.0),
            trim(v)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">time (μs)</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 16.0
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{}" text-anchor="middle" transform="rotate(-90 20 {})">voltage (kV)</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );
    let _ = writeln!(s, "</g>");

    if n > 0 {
        let mut points = String::with_capacity(24 * n);
        for (i, (t, v)) in t_us.iter().zip(&v_kv).enumerate() {
            if i > 0 {
                points.push(' ');
            }
            let _ = write!(points, "{},{}", trim(px(*t)), trim(py(*v)));
        }
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="steelblue" stroke-width="1.5" points="{points}"/>"#
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point_pairs(svg: &str) -> Vec<(f64, f64)> {
        let start = svg.find("points=\"").unwrap() + 8;
        let end = start + svg[start..].find('"').unwrap();
        svg[start..end]
            .split(' ')
            .map(|p| {
                let (x, y) = p.split_once(',').unwrap();
                (x.parse().unwrap(), y.parse().unwrap())
            })
            .collect()
    }

    #[test]
    fn empty_series_has_axes_only() {
        let svg = voltage_chart(&[], &[], "empty");
        assert!(!svg.contains("<polyline"));
        assert!(svg.contains("time (μs)") && svg.contains("voltage (kV)"));
    }

    #[test]
    fn ramp_maps_monotonically() {
        let t: Vec<f64> = (0..200).map(|i| i as f64 * 1e-7).collect();
        let v: Vec<f64> = (0..200).map(|i| i as f64 * 50.0).collect();
        let pts = point_pairs(&voltage_chart(&t, &v, "ramp"));
        assert_eq!(pts.len(), 200);
        assert!(pts.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 < w[0].1));
    }

    #[test]
    fn ticks_are_round() {
        assert_eq!(tick_step(50.0, 10), 5.0);
        assert_eq!(tick_step(0.37, 8), 0.05);
        assert_eq!(ticks(0.0, 50.0, 10), vec![0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0, 45.0, 50.0]);
    }

    #[test]
    fn title_is_escaped() {
        assert!(voltage_chart(&[], &[], "a<b & c").contains("a&lt;b &amp; c"));
    }
}
