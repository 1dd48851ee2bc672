//! Deterministic line charts.

use std::fmt::Write as _;
use std::path::Path;

use super::table::Metadata;
use crate::error::{Error, Result};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scale {
    #[default]
    Linear,
    LogY,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(name: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Series {
            name: name.into(),
            points,
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Ticks at 1, 2 or 5 × 10^k covering [lo, hi].
fn linear_ticks(lo: f64, hi: f64) -> (Vec<f64>, usize) {
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    ((first..=last).map(|k| k as f64 * step).collect(), decimals)
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        (lo, hi)
    } else {
        let pad = if lo == 0.0 { 1.0 } else { 0.5 * lo.abs() };
        (lo - pad, hi + pad)
    }
}

pub fn render_svg(series: &[Series], scale: Scale, title: &str, meta: &Metadata) -> Result<String> {
    if series.is_empty() || series.iter().any(|s| s.points.is_empty()) {
        return Err(Error::Data(
            "every plot needs at least one non-empty series".into(),
        ));
    }
    let non_finite: Vec<&str> = series
        .iter()
        .filter(|s| {
            s.points
                .iter()
                .any(|(x, y)| !x.is_finite() || !y.is_finite())
        })
        .map(|s| s.name.as_str())
        .collect();
    if !non_finite.is_empty() {
        return Err(Error::Data(format!(
            "non-finite values in series {non_finite:?}"
        )));
    }
    if scale == Scale::LogY {
        let non_positive: Vec<&str> = series
            .iter()
            .filter(|s| s.points.iter().any(|&(_, y)| y <= 0.0))
            .map(|s| s.name.as_str())
            .collect();
        if !non_positive.is_empty() {
            return Err(Error::Data(format!(
                "log scale needs positive values; offending series {non_positive:?}"
            )));
        }
    }
    let ty = |y: f64| if scale == Scale::LogY { y.log10() } else { y };
    let all = series.iter().flat_map(|s| s.points.iter());
    let (mut x_lo, mut x_hi, mut y_lo, mut y_hi) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for &(x, y) in all {
        x_lo = x_lo.min(x);
        x_hi = x_hi.max(x);
        y_lo = y_lo.min(ty(y));
        y_hi = y_hi.max(ty(y));
    }
    let (x_lo, x_hi) = padded(x_lo, x_hi);
    let (y_lo, y_hi) = match scale {
        Scale::LogY => padded(y_lo.floor(), y_hi.ceil()),
        Scale::Linear => padded(y_lo, y_hi),
    };
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let py = |v: f64| TOP + plot_h - (v - y_lo) / (y_hi - y_lo) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, "<!-- {} -->", escape(&meta.first_line()));
    let _ = writeln!(
        s,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + plot_w / 2.0,
        escape(title)
    );
    let (bottom, right) = (TOP + plot_h, LEFT + plot_w);
    let _ = writeln!(
        s,
        r#"<line x1="{LEFT}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{bottom}" stroke="black"/>"#
    );

    let (xticks, xdec) = linear_ticks(x_lo, x_hi);
    for x in xticks {
        let p = px(x);
        let _ = writeln!(
            s,
            r#"<line x1="{p:.2}" y1="{bottom}" x2="{p:.2}" y2="{:.1}" stroke="black"/>"#,
            bottom + 5.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{p:.2}" y="{:.1}" text-anchor="middle">{x:.xdec$}</text>"#,
            bottom + 20.0
        );
    }
    let yticks: Vec<(f64, String)> = match scale {
        Scale::LogY => {
            let stride = ((y_hi - y_lo) / 8.0).ceil().max(1.0) as i64;
            (y_lo as i64..=y_hi as i64)
                .filter(|k| (k - y_lo as i64) % stride == 0)
                .map(|k| (k as f64, format!("1e{k}")))
                .collect()
        }
        Scale::Linear => {
            let (t, dec) = linear_ticks(y_lo, y_hi);
            t.into_iter().map(|y| (y, format!("{y:.dec$}"))).collect()
        }
    };
    for (v, label) in yticks {
        let p = py(v);
        let _ = writeln!(
            s,
            r#"<line x1="{:.1}" y1="{p:.2}" x2="{LEFT}" y2="{p:.2}" stroke="black"/>"#,
            LEFT - 5.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.2}" text-anchor="end">{label}</text>"#,
            LEFT - 8.0,
            p + 4.0
        );
    }

    for (k, ser) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let pts: Vec<String> = ser
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(ty(y))))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            pts.join(" ")
        );
        let ly = TOP + 10.0 + 18.0 * k as f64;
        let lx = right + 15.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/>"#,
            lx + 20.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}">{}</text>"#,
            lx + 26.0,
            ly + 4.0,
            escape(&ser.name)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_svg_lines(
    series: &[Series],
    path: &Path,
    scale: Scale,
    title: &str,
    meta: &Metadata,
) -> Result<()> {
    let text = render_svg(series, scale, title, meta)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta() -> Metadata {
        Metadata::new(1, "abcdef0123456789")
    }

    #[test]
    fn one_series_one_polyline() {
        let svg = render_svg(
            &[Series::new("a", vec![(0.0, 1.0), (1.0, 2.0)])],
            Scale::Linear,
            "t",
            &meta(),
        )
        .unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(svg.contains("config-hash=abcdef0123456789"));
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn log_scale_rejects_zero() {
        let err = render_svg(
            &[Series::new("growth", vec![(0.0, 0.0), (1.0, 2.0)])],
            Scale::LogY,
            "t",
            &meta(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Data(ref m) if m.contains("growth")));
    }

    #[test]
    fn nan_names_series() {
        let series = [
            Series::new("fine", vec![(0.0, 1.0)]),
            Series::new("broken", vec![(0.0, f64::NAN)]),
        ];
        match render_svg(&series, Scale::Linear, "t", &meta()) {
            Err(Error::Data(m)) => assert!(m.contains("broken") && !m.contains("fine")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn deterministic() {
        let series = [
            Series::new(
                "x",
                (0..50)
                    .map(|i| (i as f64 * 0.3, (i as f64 * 0.2).exp()))
                    .collect(),
            ),
            Series::new("y<z>", vec![(1.0, 3.0), (2.0, 5.0)]),
        ];
        let a = render_svg(&series, Scale::LogY, "growth", &meta()).unwrap();
        let b = render_svg(&series, Scale::LogY, "growth", &meta()).unwrap();
        assert_eq!(a, b);
        assert!(a.contains("y&lt;z&gt;"));
    }

    #[test]
    fn ticks_cover_range() {
        let (t, dec) = linear_ticks(0.0, 200.0);
        assert_eq!(t, vec![0.0, 50.0, 100.0, 150.0, 200.0]);
        assert_eq!(dec, 0);
        let (t, dec) = linear_ticks(0.13, 0.61);
        assert!(t.len() >= 4 && dec == 1);
    }
}
