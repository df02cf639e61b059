//! Self-contained SVG heatmaps.
//!
//! The output depends only on the input data; no timestamps or random ids
//! are embedded, so identical grids render to identical bytes.

use std::fmt::Write as _;

/// Viridis anchor colours, evenly spaced on `[0, 1]`.
const VIRIDIS: [[u8; 3]; 9] = [
    [68, 1, 84],
    [71, 44, 122],
    [59, 81, 139],
    [44, 113, 142],
    [33, 144, 141],
    [39, 173, 129],
    [92, 200, 99],
    [170, 220, 50],
    [253, 231, 37],
];

/// Colour for `v` normalised into `[0, 1]` (values outside are clamped).
pub fn colormap(v: f64) -> [u8; 3] {
    let v = if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) };
    let pos = v * (VIRIDIS.len() - 1) as f64;
    let i = (pos.floor() as usize).min(VIRIDIS.len() - 2);
    let frac = pos - i as f64;
    let mut rgb = [0u8; 3];
    for (c, out) in rgb.iter_mut().enumerate() {
        let a = VIRIDIS[i][c] as f64;
        let b = VIRIDIS[i + 1][c] as f64;
        *out = (a + (b - a) * frac).round() as u8;
    }
    rgb
}

pub fn hex(rgb: [u8; 3]) -> String {
    format!("#{:02x}{:02x}{:02x}", rgb[0], rgb[1], rgb[2])
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapStyle {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub plot_width: f64,
    pub plot_height: f64,
}

impl Default for HeatmapStyle {
    fn default() -> Self {
        Self {
            title: String::new(),
            x_label: "x".into(),
            y_label: "y".into(),
            plot_width: 600.0,
            plot_height: 400.0,
        }
    }
}

const MARGIN_LEFT: f64 = 70.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 55.0;
const COLORBAR_GAP: f64 = 20.0;
const COLORBAR_WIDTH: f64 = 18.0;
const COLORBAR_STEPS: usize = 64;
const MARGIN_RIGHT: f64 = 90.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders `values[i][j]` at `(x_axis[i], y_axis[j])`; `x` runs left to right
/// and `y` bottom to top. Each sample is one cell, colour scaled between the
/// data minimum and maximum.
pub fn render_svg(x_axis: &[f64], y_axis: &[f64], values: &[Vec<f64>], style: &HeatmapStyle) -> String {
    let nx = x_axis.len();
    let ny = y_axis.len();
    let (lo, hi) = values
        .iter()
        .flatten()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let span = if hi > lo { hi - lo } else { 1.0 };
    let norm = |v: f64| (v - lo) / span;

    let w = style.plot_width;
    let h = style.plot_height;
    let total_w = MARGIN_LEFT + w + COLORBAR_GAP + COLORBAR_WIDTH + MARGIN_RIGHT;
    let total_h = MARGIN_TOP + h + MARGIN_BOTTOM;
    let cw = w / nx.max(1) as f64;
    let ch = h / ny.max(1) as f64;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total_w:.0}" height="{total_h:.0}" viewBox="0 0 {total_w:.0} {total_h:.0}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    if !style.title.is_empty() {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
            MARGIN_LEFT + w / 2.0,
            escape(&style.title)
        );
    }
    let _ = writeln!(s, r#"<g id="cells" shape-rendering="crispEdges">"#);
    for (i, row) in values.iter().enumerate().take(nx) {
        for (j, &v) in row.iter().enumerate().take(ny) {
            let x = MARGIN_LEFT + i as f64 * cw;
            let y = MARGIN_TOP + h - (j + 1) as f64 * ch;
            let _ = writeln!(
                s,
                r#"<rect x="{x:.3}" y="{y:.3}" width="{:.3}" height="{:.3}" fill="{}"/>"#,
                cw,
                ch,
                hex(colormap(norm(v)))
            );
        }
    }
    let _ = writeln!(s, "</g>");

    // frame and ticks
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{w}" height="{h}" fill="none" stroke="black"/>"#
    );
    let ticks = 5;
    if nx > 0 && ny > 0 {
        let (x0, x1) = (x_axis[0], x_axis[nx - 1]);
        let (y0, y1) = (y_axis[0], y_axis[ny - 1]);
        for k in 0..=ticks {
            let f = k as f64 / ticks as f64;
            let px = MARGIN_LEFT + cw / 2.0 + f * (w - cw);
            let py = MARGIN_TOP + h - ch / 2.0 - f * (h - ch);
            let _ = writeln!(
                s,
                r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{:.3}</text>"#,
                MARGIN_TOP + h,
                MARGIN_TOP + h + 5.0,
                MARGIN_TOP + h + 18.0,
                x0 + f * (x1 - x0)
            );
            let _ = writeln!(
                s,
                r#"<line x1="{:.2}" y1="{py:.2}" x2="{MARGIN_LEFT}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{:.3}</text>"#,
                MARGIN_LEFT - 5.0,
                MARGIN_LEFT - 8.0,
                py + 4.0,
                y0 + f * (y1 - y0)
            );
        }
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        MARGIN_LEFT + w / 2.0,
        MARGIN_TOP + h + 40.0,
        escape(&style.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        MARGIN_TOP + h / 2.0,
        MARGIN_TOP + h / 2.0,
        escape(&style.y_label)
    );

    let bx = MARGIN_LEFT + w + COLORBAR_GAP;
    let step_h = h / COLORBAR_STEPS as f64;
    let _ = writeln!(s, r#"<g id="colorbar" shape-rendering="crispEdges">"#);
    for k in 0..COLORBAR_STEPS {
        let f = (k as f64 + 0.5) / COLORBAR_STEPS as f64;
        let y = MARGIN_TOP + h - (k + 1) as f64 * step_h;
        let _ = writeln!(
            s,
            r#"<rect x="{bx:.2}" y="{y:.3}" width="{COLORBAR_WIDTH}" height="{step_h:.3}" fill="{}"/>"#,
            hex(colormap(f))
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(
        s,
        r#"<rect x="{bx:.2}" y="{MARGIN_TOP}" width="{COLORBAR_WIDTH}" height="{h}" fill="none" stroke="black"/>"#
    );
    for (f, v) in [(0.0, lo), (0.5, lo + 0.5 * (hi - lo)), (1.0, hi)] {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}">{:.4}</text>"#,
            bx + COLORBAR_WIDTH + 6.0,
            MARGIN_TOP + h - f * h + 4.0,
            v
        );
    }
    let _ = writeln!(s, "</svg>");
    s
}
