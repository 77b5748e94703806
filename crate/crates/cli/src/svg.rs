//! Hand-written SVG plots. Every data point gets exactly one marker element;
//! legend swatches use `<rect>` so they never count as markers.

use std::fmt::Write as _;

use pivotsweep::{MatchPair, Point2};

const SIZE: f64 = 600.0;
const PAD: f64 = 50.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Maps data coordinates into the plotting square, y pointing up.
struct Frame {
    min: Point2,
    scale_x: f64,
    scale_y: f64,
}

impl Frame {
    fn fit(min: Point2, max: Point2, equal_aspect: bool) -> Self {
        let span = |a: f64, b: f64| if b > a { b - a } else { 1.0 };
        let inner = SIZE - 2.0 * PAD;
        let mut sx = inner / span(min.x, max.x);
        let mut sy = inner / span(min.y, max.y);
        if equal_aspect {
            sx = sx.min(sy);
            sy = sx;
        }
        Self {
            min,
            scale_x: sx,
            scale_y: sy,
        }
    }

    fn map(&self, p: Point2) -> (f64, f64) {
        (
            PAD + (p.x - self.min.x) * self.scale_x,
            SIZE - PAD - (p.y - self.min.y) * self.scale_y,
        )
    }
}

fn open(out: &mut String, title: &str) {
    writeln!(
        out,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">
<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>
<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="16">{}</text>"#,
        SIZE / 2.0,
        escape(title)
    )
    .unwrap();
}

fn legend(out: &mut String, entries: &[(&str, &str)]) {
    for (k, (color, name)) in entries.iter().enumerate() {
        let y = 40.0 + 18.0 * k as f64;
        writeln!(
            out,
            r#"<rect class="legend" x="{}" y="{}" width="10" height="10" fill="{color}"/><text x="{}" y="{}" font-family="sans-serif" font-size="12">{}</text>"#,
            SIZE - 150.0,
            y,
            SIZE - 135.0,
            y + 9.0,
            escape(name)
        )
        .unwrap();
    }
}

fn bounds(points: impl Iterator<Item = Point2>) -> (Point2, Point2) {
    points.fold(
        (
            Point2::new(f64::INFINITY, f64::INFINITY),
            Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        ),
        |(lo, hi), p| {
            (
                Point2::new(lo.x.min(p.x), lo.y.min(p.y)),
                Point2::new(hi.x.max(p.x), hi.y.max(p.y)),
            )
        },
    )
}

/// `x` and the moved `y` on common axes. Matched `y` points are drawn in
/// their own class and joined to their partners.
pub fn overlay(x: &[Point2], y_moved: &[Point2], pairs: &[MatchPair]) -> String {
    let (lo, hi) = bounds(x.iter().chain(y_moved).copied());
    let frame = Frame::fit(lo, hi, true);
    let mut matched = vec![false; y_moved.len()];
    for m in pairs {
        matched[m.j] = true;
    }

    let mut out = String::new();
    open(&mut out, "registration overlay");
    for m in pairs {
        let (x1, y1) = frame.map(x[m.i]);
        let (x2, y2) = frame.map(y_moved[m.j]);
        writeln!(
            out,
            r##"<line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="#d62728" stroke-width="1"/>"##
        )
        .unwrap();
    }
    for &p in x {
        let (cx, cy) = frame.map(p);
        writeln!(
            out,
            r##"<circle class="cloud-x" cx="{cx:.3}" cy="{cy:.3}" r="4" fill="none" stroke="#1f77b4"/>"##
        )
        .unwrap();
    }
    for (j, &p) in y_moved.iter().enumerate() {
        let (cx, cy) = frame.map(p);
        let (class, color) = if matched[j] {
            ("matched", "#d62728")
        } else {
            ("cloud-y", "#7f7f7f")
        };
        writeln!(
            out,
            r#"<circle class="{class}" cx="{cx:.3}" cy="{cy:.3}" r="2.5" fill="{color}"/>"#
        )
        .unwrap();
    }
    legend(
        &mut out,
        &[
            ("#1f77b4", "X"),
            ("#7f7f7f", "moved Y, unmatched"),
            ("#d62728", "moved Y, matched"),
        ],
    );
    out.push_str("</svg>\n");
    out
}

fn axes(out: &mut String, x_label: &str, y_label: &str) {
    let (lo, hi) = (PAD, SIZE - PAD);
    writeln!(
        out,
        r#"<path d="M {lo} {lo} L {lo} {hi} L {hi} {hi}" fill="none" stroke="black"/>
<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12">{}</text>
<text x="14" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12" transform="rotate(-90 14 {})">{}</text>"#,
        SIZE / 2.0,
        SIZE - 14.0,
        escape(x_label),
        SIZE / 2.0,
        SIZE / 2.0,
        escape(y_label)
    )
    .unwrap();
}

fn tick(out: &mut String, (x, y): (f64, f64), label: &str, vertical_axis: bool) {
    let (tx, ty, anchor) = if vertical_axis {
        (x - 6.0, y + 4.0, "end")
    } else {
        (x, y + 16.0, "middle")
    };
    writeln!(
        out,
        r#"<text x="{tx:.3}" y="{ty:.3}" text-anchor="{anchor}" font-family="sans-serif" font-size="10">{}</text>"#,
        escape(label)
    )
    .unwrap();
}

/// Success rate against the number of common points, one marker per `k`.
pub fn rate_chart(k_values: &[usize], rates: &[f64]) -> String {
    let k_max = k_values.iter().copied().max().unwrap_or(1) as f64;
    let frame = Frame::fit(Point2::new(0.0, 0.0), Point2::new(k_max.max(1.0), 1.0), false);
    let mut out = String::new();
    open(&mut out, "successful registrations");
    axes(&mut out, "common points k", "success rate");
    for r in [0.0, 0.5, 1.0] {
        tick(&mut out, frame.map(Point2::new(0.0, r)), &format!("{r}"), true);
    }
    let pts: Vec<(f64, f64)> = k_values
        .iter()
        .zip(rates)
        .map(|(&k, &r)| frame.map(Point2::new(k as f64, r)))
        .collect();
    if !pts.is_empty() {
        let path: Vec<String> = pts.iter().map(|(a, b)| format!("{a:.3},{b:.3}")).collect();
        writeln!(
            out,
            r##"<polyline points="{}" fill="none" stroke="#1f77b4"/>"##,
            path.join(" ")
        )
        .unwrap();
    }
    for (&k, &(cx, cy)) in k_values.iter().zip(&pts) {
        tick(&mut out, (cx, SIZE - PAD), &k.to_string(), false);
        writeln!(
            out,
            r##"<circle class="rate" cx="{cx:.3}" cy="{cy:.3}" r="4" fill="#1f77b4"/>"##
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}

/// Histogram of angle errors, one bar per bin.
pub fn histogram(values: &[f64], bins: usize, x_label: &str) -> String {
    let bins = bins.max(1);
    let hi = values.iter().copied().fold(0.0, f64::max);
    let width = if hi > 0.0 { hi / bins as f64 } else { 1.0 };
    let mut counts = vec![0usize; bins];
    for &v in values {
        counts[((v / width) as usize).min(bins - 1)] += 1;
    }
    let top = counts.iter().copied().max().unwrap_or(0).max(1) as f64;
    let frame = Frame::fit(
        Point2::new(0.0, 0.0),
        Point2::new(width * bins as f64, top),
        false,
    );
    let mut out = String::new();
    open(&mut out, "angle error distribution");
    axes(&mut out, x_label, "trials");
    tick(&mut out, frame.map(Point2::new(0.0, top)), &format!("{top}"), true);
    for (b, &c) in counts.iter().enumerate() {
        let (x0, y0) = frame.map(Point2::new(b as f64 * width, c as f64));
        let (x1, y1) = frame.map(Point2::new((b + 1) as f64 * width, 0.0));
        writeln!(
            out,
            r##"<rect class="bar" x="{x0:.3}" y="{y0:.3}" width="{:.3}" height="{:.3}" fill="#1f77b4" stroke="white"/>"##,
            x1 - x0,
            y1 - y0
        )
        .unwrap();
    }
    tick(&mut out, (PAD, SIZE - PAD), "0", false);
    tick(
        &mut out,
        (SIZE - PAD, SIZE - PAD),
        &format!("{:.3}", width * bins as f64),
        false,
    );
    out.push_str("</svg>\n");
    out
}
