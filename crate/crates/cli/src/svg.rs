//! Minimal SVG figures: a colored grid with optional contour and markers, and
//! labeled line plots. All coordinates are printed with two decimals.

use std::fmt::Write;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

const VIRIDIS: [(f64, f64, f64); 5] = [
    (68.0, 1.0, 84.0),
    (59.0, 82.0, 139.0),
    (33.0, 145.0, 140.0),
    (94.0, 201.0, 98.0),
    (253.0, 231.0, 37.0),
];

const LINE_COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

fn color(t: f64) -> String {
    let t = if t.is_finite() {
        t.clamp(0.0, 1.0)
    } else {
        0.0
    };
    let x = t * (VIRIDIS.len() - 1) as f64;
    let i = (x.floor() as usize).min(VIRIDIS.len() - 2);
    let f = x - i as f64;
    let (a, b) = (VIRIDIS[i], VIRIDIS[i + 1]);
    let mix = |p: f64, q: f64| (p + (q - p) * f).round() as u8;
    format!(
        "#{:02x}{:02x}{:02x}",
        mix(a.0, b.0),
        mix(a.1, b.1),
        mix(a.2, b.2)
    )
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn new(x: (f64, f64), y: (f64, f64)) -> Self {
        let widen = |(a, b): (f64, f64)| if a < b { (a, b) } else { (a - 0.5, b + 0.5) };
        Self {
            x: widen(x),
            y: widen(y),
        }
    }

    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - TOP - BOTTOM)
    }

    fn axes(&self, out: &mut String, title: &str, x_label: &str, y_label: &str) {
        let (x0, x1) = (LEFT, WIDTH - RIGHT);
        let (y0, y1) = (HEIGHT - BOTTOM, TOP);
        let _ = writeln!(
            out,
            r#"<rect x="{x0:.2}" y="{y1:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
            x1 - x0,
            y0 - y1
        );
        for k in 0..=4 {
            let f = k as f64 / 4.0;
            let xv = self.x.0 + f * (self.x.1 - self.x.0);
            let px = self.px(xv);
            let _ = writeln!(
                out,
                r#"<line x1="{px:.2}" y1="{y0:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle" font-size="12">{}</text>"#,
                y0 + 5.0,
                y0 + 20.0,
                tick_label(xv)
            );
            let yv = self.y.0 + f * (self.y.1 - self.y.0);
            let py = self.py(yv);
            let _ = writeln!(
                out,
                r#"<line x1="{:.2}" y1="{py:.2}" x2="{x0:.2}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end" font-size="12">{}</text>"#,
                x0 - 5.0,
                x0 - 8.0,
                py + 4.0,
                tick_label(yv)
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="15">{}</text>"#,
            (x0 + x1) / 2.0,
            TOP - 15.0,
            escape(title)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="13">{}</text>"#,
            (x0 + x1) / 2.0,
            HEIGHT - 15.0,
            escape(x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="20" y="{:.2}" text-anchor="middle" font-size="13" transform="rotate(-90 20 {:.2})">{}</text>"#,
            (y0 + y1) / 2.0,
            (y0 + y1) / 2.0,
            escape(y_label)
        );
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn header() -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    )
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        })
}

/// Values over a rectilinear grid, `values[iy * xs.len() + ix]`.
pub struct Field<'a> {
    pub xs: &'a [f64],
    pub ys: &'a [f64],
    pub values: &'a [f64],
}

/// Segments of the `level` iso-line of `field` by marching squares, in data
/// coordinates.
pub fn contour(field: &Field, level: f64) -> Vec<[(f64, f64); 2]> {
    let nx = field.xs.len();
    let at = |ix: usize, iy: usize| field.values[iy * nx + ix] - level;
    let mut segments = Vec::new();
    for iy in 0..field.ys.len().saturating_sub(1) {
        for ix in 0..nx.saturating_sub(1) {
            // corners counter-clockwise from bottom-left
            let corners = [(ix, iy), (ix + 1, iy), (ix + 1, iy + 1), (ix, iy + 1)];
            let mut crossings = Vec::with_capacity(4);
            for k in 0..4 {
                let (a, b) = (corners[k], corners[(k + 1) % 4]);
                let (va, vb) = (at(a.0, a.1), at(b.0, b.1));
                if (va < 0.0) != (vb < 0.0) {
                    let f = va / (va - vb);
                    let x = field.xs[a.0] + f * (field.xs[b.0] - field.xs[a.0]);
                    let y = field.ys[a.1] + f * (field.ys[b.1] - field.ys[a.1]);
                    crossings.push((x, y));
                }
            }
            for pair in crossings.chunks_exact(2) {
                segments.push([pair[0], pair[1]]);
            }
        }
    }
    segments
}

pub struct Heatmap<'a> {
    pub field: Field<'a>,
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub color_label: &'a str,
    /// Iso-line of a second field on the same grid.
    pub contour: Option<(Field<'a>, f64, &'a str)>,
    pub markers: &'a [(f64, f64)],
}

pub fn heatmap(map: &Heatmap) -> String {
    let f = &map.field;
    let frame = Frame::new(range(f.xs.iter().copied()), range(f.ys.iter().copied()));
    let (lo, hi) = range(f.values.iter().copied());
    let span = if hi > lo { hi - lo } else { 1.0 };
    let mut out = header();

    let half = |v: &[f64], i: usize| -> (f64, f64) {
        let left = if i > 0 {
            0.5 * (v[i] - v[i - 1])
        } else if v.len() > 1 {
            0.5 * (v[1] - v[0])
        } else {
            0.5
        };
        let right = if i + 1 < v.len() {
            0.5 * (v[i + 1] - v[i])
        } else {
            left
        };
        (v[i] - left, v[i] + right)
    };
    for (iy, _) in f.ys.iter().enumerate() {
        let (ya, yb) = half(f.ys, iy);
        let (ya, yb) = (ya.max(frame.y.0), yb.min(frame.y.1));
        for (ix, _) in f.xs.iter().enumerate() {
            let (xa, xb) = half(f.xs, ix);
            let (xa, xb) = (xa.max(frame.x.0), xb.min(frame.x.1));
            let v = f.values[iy * f.xs.len() + ix];
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                frame.px(xa),
                frame.py(yb),
                frame.px(xb) - frame.px(xa),
                frame.py(ya) - frame.py(yb),
                color((v - lo) / span)
            );
        }
    }
    if let Some((field, level, label)) = &map.contour {
        let mut path = String::new();
        for [a, b] in contour(field, *level) {
            let _ = write!(
                path,
                "M{:.2} {:.2}L{:.2} {:.2}",
                frame.px(a.0),
                frame.py(a.1),
                frame.px(b.0),
                frame.py(b.1)
            );
        }
        if !path.is_empty() {
            let _ = writeln!(
                out,
                r#"<path d="{path}" stroke="white" stroke-width="2" fill="none"/>"#
            );
        }
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="white" stroke-width="2"/><rect x="{:.2}" y="{:.2}" width="16" height="6" fill="none" stroke="black" stroke-width="0.5"/><text x="{:.2}" y="{:.2}" font-size="11">{}</text>"#,
            WIDTH - RIGHT + 20.0,
            HEIGHT - BOTTOM - 5.0,
            WIDTH - RIGHT + 36.0,
            HEIGHT - BOTTOM - 5.0,
            WIDTH - RIGHT + 20.0,
            HEIGHT - BOTTOM - 8.0,
            WIDTH - RIGHT + 40.0,
            HEIGHT - BOTTOM - 1.0,
            escape(label)
        );
    }
    for &(x, y) in map.markers {
        let _ = writeln!(
            out,
            r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="red" stroke="black" stroke-width="0.5"/>"#,
            frame.px(x),
            frame.py(y)
        );
    }
    frame.axes(&mut out, map.title, map.x_label, map.y_label);

    // color bar
    let bx = WIDTH - RIGHT + 20.0;
    let (top, bottom) = (TOP, HEIGHT - BOTTOM - 30.0);
    let steps = 50;
    for k in 0..steps {
        let t0 = k as f64 / steps as f64;
        let y = bottom - (t0 + 1.0 / steps as f64) * (bottom - top);
        let _ = writeln!(
            out,
            r#"<rect x="{bx:.2}" y="{y:.2}" width="16" height="{:.2}" fill="{}"/>"#,
            (bottom - top) / steps as f64 + 0.5,
            color(t0 + 0.5 / steps as f64)
        );
    }
    for (t, v) in [(0.0, lo), (0.5, 0.5 * (lo + hi)), (1.0, hi)] {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="11">{}</text>"#,
            bx + 22.0,
            bottom - t * (bottom - top) + 4.0,
            tick_label(v)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{bx:.2}" y="{:.2}" font-size="12">{}</text>"#,
        top - 8.0,
        escape(map.color_label)
    );
    out.push_str("</svg>\n");
    out
}

pub struct Series<'a> {
    pub label: String,
    pub xs: &'a [f64],
    pub ys: &'a [f64],
}

pub fn line_plot(series: &[Series], title: &str, x_label: &str, y_label: &str) -> String {
    let frame = Frame::new(
        range(series.iter().flat_map(|s| s.xs.iter().copied())),
        range(series.iter().flat_map(|s| s.ys.iter().copied())),
    );
    let mut out = header();
    frame.axes(&mut out, title, x_label, y_label);
    for (k, s) in series.iter().enumerate() {
        let stroke = LINE_COLORS[k % LINE_COLORS.len()];
        let points: Vec<String> =
            s.xs.iter()
                .zip(s.ys)
                .filter(|(_, y)| y.is_finite())
                .map(|(&x, &y)| format!("{:.2},{:.2}", frame.px(x), frame.py(y)))
                .collect();
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="2"/>"#,
            points.join(" ")
        );
        let ly = TOP + 10.0 + 20.0 * k as f64;
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{stroke}" stroke-width="2"/><text x="{:.2}" y="{:.2}" font-size="12" class="legend">{}</text>"#,
            WIDTH - RIGHT + 15.0,
            WIDTH - RIGHT + 40.0,
            WIDTH - RIGHT + 45.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    out.push_str("</svg>\n");
    out
}
