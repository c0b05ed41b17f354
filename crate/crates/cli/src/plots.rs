//! Static SVG line charts, rendered by hand.
//!
//! One chart per series: data polyline with point markers, an optional
//! dashed fitted line, and tick labels. Log-log series are drawn in
//! log10 coordinates (nonpositive values are dropped rather than
//! clamped). All coordinates are formatted to fixed precision, so the
//! output is deterministic.

use crate::experiments::Series;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn of(points: &[(f64, f64)]) -> Frame {
        let mut x_min = f64::INFINITY;
        let mut x_max = f64::NEG_INFINITY;
        let mut y_min = f64::INFINITY;
        let mut y_max = f64::NEG_INFINITY;
        for &(x, y) in points {
            x_min = x_min.min(x);
            x_max = x_max.max(x);
            y_min = y_min.min(y);
            y_max = y_max.max(y);
        }
        // Pad degenerate spans so single points still render.
        if !(x_max > x_min) {
            x_min -= 1.0;
            x_max += 1.0;
        }
        if !(y_max > y_min) {
            y_min -= 1.0;
            y_max += 1.0;
        }
        let pad_x = 0.05 * (x_max - x_min);
        let pad_y = 0.05 * (y_max - y_min);
        Frame {
            x_min: x_min - pad_x,
            x_max: x_max + pad_x,
            y_min: y_min - pad_y,
            y_max: y_max + pad_y,
        }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN_LEFT + (x - self.x_min) / (self.x_max - self.x_min) * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN_BOTTOM
            - (y - self.y_min) / (self.y_max - self.y_min) * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }
}

fn transformed(series: &Series) -> Vec<(f64, f64)> {
    series
        .x
        .iter()
        .zip(&series.y)
        .filter_map(|(&x, &y)| {
            if series.loglog {
                if x > 0.0 && y > 0.0 {
                    Some((x.log10(), y.log10()))
                } else {
                    None
                }
            } else {
                (x.is_finite() && y.is_finite()).then_some((x, y))
            }
        })
        .collect()
}

/// Render one series as a standalone SVG document.
pub fn line_chart(series: &Series) -> String {
    let points = transformed(series);
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"24\" font-size=\"16\" text-anchor=\"middle\">{}</text>\n",
        WIDTH / 2.0,
        escape(&series.name)
    ));

    if points.is_empty() {
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"13\" text-anchor=\"middle\">no plottable points</text>\n",
            WIDTH / 2.0,
            HEIGHT / 2.0
        ));
        svg.push_str("</svg>\n");
        return svg;
    }

    let frame = Frame::of(&points);
    let x0 = MARGIN_LEFT;
    let x1 = WIDTH - MARGIN_RIGHT;
    let y0 = HEIGHT - MARGIN_BOTTOM;
    let y1 = MARGIN_TOP;

    // Axes.
    svg.push_str(&format!(
        "<line x1=\"{x0:.1}\" y1=\"{y0:.1}\" x2=\"{x1:.1}\" y2=\"{y0:.1}\" stroke=\"black\"/>\n"
    ));
    svg.push_str(&format!(
        "<line x1=\"{x0:.1}\" y1=\"{y0:.1}\" x2=\"{x0:.1}\" y2=\"{y1:.1}\" stroke=\"black\"/>\n"
    ));

    // Ticks and labels.
    for k in 0..=4 {
        let t = k as f64 / 4.0;
        let vx = frame.x_min + t * (frame.x_max - frame.x_min);
        let px = frame.px(vx);
        svg.push_str(&format!(
            "<line x1=\"{px:.2}\" y1=\"{y0:.1}\" x2=\"{px:.2}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
            y0 + 5.0
        ));
        svg.push_str(&format!(
            "<text x=\"{px:.2}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"middle\">{vx:.3}</text>\n",
            y0 + 18.0
        ));
        let vy = frame.y_min + t * (frame.y_max - frame.y_min);
        let py = frame.py(vy);
        svg.push_str(&format!(
            "<line x1=\"{:.1}\" y1=\"{py:.2}\" x2=\"{x0:.1}\" y2=\"{py:.2}\" stroke=\"black\"/>\n",
            x0 - 5.0
        ));
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"end\">{vy:.3}</text>\n",
            x0 - 8.0,
            py + 4.0
        ));
    }

    // Axis labels; log-log charts are drawn in log10 coordinates.
    let suffix = if series.loglog { " (log10)" } else { "" };
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\" text-anchor=\"middle\">{}{}</text>\n",
        (x0 + x1) / 2.0,
        HEIGHT - 12.0,
        escape(&series.xlabel),
        suffix
    ));
    svg.push_str(&format!(
        "<text x=\"16\" y=\"{:.1}\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.1})\">{}{}</text>\n",
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(&series.ylabel),
        suffix
    ));

    // Fitted line, drawn under the data. The stored fit is in natural
    // coordinates (y = exp(intercept) * x^slope for log-log series),
    // so evaluate and re-transform rather than assuming a base.
    if let (Some(slope), Some(intercept), true) = (series.slope, series.intercept, series.loglog) {
        let gx0 = frame.x_min + 0.02 * (frame.x_max - frame.x_min);
        let gx1 = frame.x_max - 0.02 * (frame.x_max - frame.x_min);
        let gy = |gx: f64| (intercept + slope * gx * std::f64::consts::LN_10) / std::f64::consts::LN_10;
        svg.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#888888\" stroke-dasharray=\"6 4\"/>\n",
            frame.px(gx0),
            frame.py(gy(gx0)),
            frame.px(gx1),
            frame.py(gy(gx1))
        ));
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\" fill=\"#555555\">fit slope {slope:.4}</text>\n",
            x0 + 10.0,
            y1 + 14.0
        ));
    }

    // Data polyline and markers.
    let mut path = String::new();
    for &(x, y) in &points {
        path.push_str(&format!("{:.2},{:.2} ", frame.px(x), frame.py(y)));
    }
    svg.push_str(&format!(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.5\"/>\n",
        path.trim_end()
    ));
    for &(x, y) in &points {
        svg.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"#1f4e9c\"/>\n",
            frame.px(x),
            frame.py(y)
        ));
    }

    svg.push_str("</svg>\n");
    svg
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(loglog: bool) -> Series {
        Series {
            name: "decay".into(),
            xlabel: "distance".into(),
            ylabel: "measure".into(),
            loglog,
            x: vec![0.25, 0.5, 1.0],
            y: vec![0.1, 0.21, 0.4],
            slope: Some(1.0),
            intercept: Some((0.4f64).ln()),
        }
    }

    #[test]
    fn chart_contains_polyline_markers_and_fit() {
        let svg = line_chart(&series(true));
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("<polyline"));
        assert_eq!(svg.matches("<circle").count(), 3);
        assert!(svg.contains("stroke-dasharray"));
        assert!(svg.contains("fit slope 1.0000"));
        assert!(svg.contains("(log10)"));
        assert!(!svg.contains("NaN"));
        assert!(!svg.contains("inf"));
    }

    #[test]
    fn loglog_drops_nonpositive_points_instead_of_clamping() {
        let mut s = series(true);
        s.x = vec![0.0, 0.5, 1.0];
        s.y = vec![0.1, -0.2, 0.4];
        let svg = line_chart(&s);
        // Only the final point survives log transforms.
        assert_eq!(svg.matches("<circle").count(), 1);
        assert!(!svg.contains("NaN"));
    }

    #[test]
    fn charts_are_byte_stable() {
        let a = line_chart(&series(false));
        let b = line_chart(&series(false));
        assert_eq!(a, b);
    }

    #[test]
    fn empty_series_renders_a_placeholder() {
        let mut s = series(true);
        s.x = vec![0.0];
        s.y = vec![-1.0];
        let svg = line_chart(&s);
        assert!(svg.contains("no plottable points"));
    }
}
