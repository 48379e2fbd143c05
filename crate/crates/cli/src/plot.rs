//! Minimal static SVG rendering: line plots and heatmaps for sweep results.

use std::fmt::Write as _;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 55.0;

const SERIES_COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if !(0.01..1000.0).contains(&a) {
        format!("{v:.1e}")
    } else if (v - v.round()).abs() < 1e-9 {
        format!("{}", v.round() as i64)
    } else {
        format!("{v:.3}")
            .trim_end_matches('0')
            .trim_end_matches('.')
            .to_string()
    }
}

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        MARGIN_L + (v - self.x_min) / (self.x_max - self.x_min) * (WIDTH - MARGIN_L - MARGIN_R)
    }

    fn y(&self, v: f64) -> f64 {
        HEIGHT
            - MARGIN_B
            - (v - self.y_min) / (self.y_max - self.y_min) * (HEIGHT - MARGIN_T - MARGIN_B)
    }
}

fn svg_header(out: &mut String, title: &str) {
    let _ = write!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">\n\
         <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n\
         <text x=\"{:.1}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
        WIDTH / 2.0,
        escape(title)
    );
}

fn axes(out: &mut String, frame: &Frame, x_label: &str, y_label: &str, x_log2: bool) {
    let x0 = MARGIN_L;
    let x1 = WIDTH - MARGIN_R;
    let y0 = HEIGHT - MARGIN_B;
    let y1 = MARGIN_T;
    let _ = write!(
        out,
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>\n\
         <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"black\"/>\n"
    );
    for i in 0..=5 {
        let fx = frame.x_min + (frame.x_max - frame.x_min) * i as f64 / 5.0;
        let px = frame.x(fx);
        let label = if x_log2 {
            fmt_tick(fx.exp2())
        } else {
            fmt_tick(fx)
        };
        let _ = write!(
            out,
            "<line x1=\"{px:.1}\" y1=\"{y0}\" x2=\"{px:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n\
             <text x=\"{px:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{label}</text>\n",
            y0 + 5.0,
            y0 + 20.0
        );
        let fy = frame.y_min + (frame.y_max - frame.y_min) * i as f64 / 5.0;
        let py = frame.y(fy);
        let _ = write!(
            out,
            "<line x1=\"{:.1}\" y1=\"{py:.1}\" x2=\"{x0}\" y2=\"{py:.1}\" stroke=\"black\"/>\n\
             <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{}</text>\n",
            x0 - 5.0,
            x0 - 8.0,
            py + 4.0,
            fmt_tick(fy)
        );
    }
    let _ = write!(
        out,
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>\n\
         <text x=\"18\" y=\"{:.1}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.1})\">{}</text>\n",
        (MARGIN_L + WIDTH - MARGIN_R) / 2.0,
        HEIGHT - 14.0,
        escape(x_label),
        (MARGIN_T + HEIGHT - MARGIN_B) / 2.0,
        (MARGIN_T + HEIGHT - MARGIN_B) / 2.0,
        escape(y_label)
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// A line plot with one or more named series. With `x_log2`, the x values are
/// plotted on a base-2 logarithmic axis (ticks show the original values).
/// `marker` draws a labeled point (same coordinate convention as the data).
pub fn line_plot(
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[(String, Vec<(f64, f64)>)],
    x_log2: bool,
    marker: Option<(f64, f64, String)>,
) -> String {
    let tx = |x: f64| if x_log2 { x.log2() } else { x };
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for (_, data) in series {
        pts.extend(data.iter().map(|&(x, y)| (tx(x), y)));
    }
    if let Some((mx, my, _)) = &marker {
        pts.push((tx(*mx), *my));
    }
    let finite: Vec<(f64, f64)> = pts
        .into_iter()
        .filter(|p| p.0.is_finite() && p.1.is_finite())
        .collect();
    let (mut x_min, mut x_max) = finite
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.0), hi.max(p.0))
        });
    let (mut y_min, mut y_max) = finite
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.1), hi.max(p.1))
        });
    if !x_min.is_finite() {
        (x_min, x_max) = (0.0, 1.0);
    }
    if !y_min.is_finite() {
        (y_min, y_max) = (0.0, 1.0);
    }
    if x_min == x_max {
        x_max = x_min + 1.0;
    }
    if y_min == y_max {
        y_max = y_min + 1.0;
    }
    let pad = (y_max - y_min) * 0.08;
    let frame = Frame {
        x_min,
        x_max,
        y_min: y_min - pad,
        y_max: y_max + pad,
    };

    let mut out = String::new();
    svg_header(&mut out, title);
    axes(&mut out, &frame, x_label, y_label, x_log2);
    for (idx, (name, data)) in series.iter().enumerate() {
        let color = SERIES_COLORS[idx % SERIES_COLORS.len()];
        let path: Vec<String> = data
            .iter()
            .filter(|p| p.1.is_finite())
            .map(|&(x, y)| format!("{:.1},{:.1}", frame.x(tx(x)), frame.y(y)))
            .collect();
        if path.len() > 1 {
            let _ = writeln!(
                out,
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.8\"/>",
                path.join(" ")
            );
        }
        for &(x, y) in data.iter().filter(|p| p.1.is_finite()) {
            let _ = writeln!(
                out,
                "<circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"3\" fill=\"{color}\"/>",
                frame.x(tx(x)),
                frame.y(y)
            );
        }
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" fill=\"{color}\">{}</text>",
            WIDTH - MARGIN_R - 150.0,
            MARGIN_T + 16.0 * (idx as f64 + 1.0),
            escape(name)
        );
    }
    if let Some((mx, my, label)) = marker {
        let _ = write!(
            out,
            "<circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"6\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\"/>\n\
             <text x=\"{:.1}\" y=\"{:.1}\" fill=\"#d62728\">{}</text>\n",
            frame.x(tx(mx)),
            frame.y(my),
            frame.x(tx(mx)) + 9.0,
            frame.y(my) - 9.0,
            escape(&label)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// A heatmap over a rectangular grid with an optional boundary polyline
/// (e.g. a phase-transition front). `values[i][j]` maps to `(xs[j], ys[i])`.
pub fn heatmap(
    title: &str,
    x_label: &str,
    y_label: &str,
    xs: &[f64],
    ys: &[f64],
    values: &[Vec<f64>],
    boundary: &[(f64, f64)],
) -> String {
    let finite: Vec<f64> = values
        .iter()
        .flatten()
        .copied()
        .filter(|v| v.is_finite())
        .collect();
    let v_min = finite.iter().cloned().fold(f64::INFINITY, f64::min);
    let v_max = finite.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = if v_max > v_min { v_max - v_min } else { 1.0 };

    let frame = Frame {
        x_min: xs.first().copied().unwrap_or(0.0),
        x_max: xs.last().copied().unwrap_or(1.0),
        y_min: ys.first().copied().unwrap_or(0.0),
        y_max: ys.last().copied().unwrap_or(1.0),
    };
    let cell_w = (WIDTH - MARGIN_L - MARGIN_R) / xs.len().max(1) as f64;
    let cell_h = (HEIGHT - MARGIN_T - MARGIN_B) / ys.len().max(1) as f64;

    let mut out = String::new();
    svg_header(&mut out, title);
    for (i, row) in values.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let color = if v.is_finite() {
                // Blue (low) to red (high).
                let t = ((v - v_min) / span).clamp(0.0, 1.0);
                let r = (40.0 + 215.0 * t) as u8;
                let b = (215.0 - 175.0 * t + 40.0) as u8;
                let g = (60.0 + 80.0 * (1.0 - (2.0 * t - 1.0).abs())) as u8;
                format!("rgb({r},{g},{b})")
            } else {
                "#cccccc".to_string()
            };
            let px = MARGIN_L + j as f64 * cell_w;
            let py = HEIGHT - MARGIN_B - (i as f64 + 1.0) * cell_h;
            let _ = writeln!(
                out,
                "<rect x=\"{px:.1}\" y=\"{py:.1}\" width=\"{cell_w:.1}\" height=\"{cell_h:.1}\" fill=\"{color}\"/>"
            );
        }
    }
    axes(&mut out, &frame, x_label, y_label, false);
    if boundary.len() > 1 {
        let path: Vec<String> = boundary
            .iter()
            .map(|&(x, y)| format!("{:.1},{:.1}", frame.x(x), frame.y(y)))
            .collect();
        let _ = writeln!(
            out,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"2.5\" stroke-dasharray=\"6 3\"/>",
            path.join(" ")
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{:.1}\" y=\"{:.1}\">scale: {} (blue) to {} (red)</text>",
        MARGIN_L,
        MARGIN_T - 6.0,
        fmt_tick(v_min),
        fmt_tick(v_max)
    );
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_plot_contains_series_and_marker() {
        let svg = line_plot(
            "demo",
            "rho scale factor",
            "iterations",
            &[(
                "solver".into(),
                vec![(0.125, 30.0), (1.0, 10.0), (8.0, 25.0)],
            )],
            true,
            Some((1.0, 10.0, "optimum".into())),
        );
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("polyline"));
        assert!(svg.contains("rho scale factor"));
        assert!(svg.contains("optimum"));
    }

    #[test]
    fn heatmap_renders_grid_and_boundary() {
        let svg = heatmap(
            "phase",
            "m/n",
            "k/n",
            &[0.1, 0.2, 0.3],
            &[0.1, 0.2],
            &[vec![-30.0, -25.0, -10.0], vec![-5.0, -2.0, f64::NAN]],
            &[(0.1, 0.1), (0.2, 0.2)],
        );
        assert!(svg.contains("rect"));
        assert!(svg.contains("stroke-dasharray"));
    }
}
