//! Minimal deterministic SVG line plots: axes, ticks, polylines, vertical
//! markers, and a legend.

/// One polyline.
#[derive(Debug, Clone)]
pub struct CurveSpec {
    pub label: String,
    pub color: &'static str,
    pub points: Vec<(f64, f64)>,
}

/// Vertical marker line.
#[derive(Debug, Clone)]
pub struct VLine {
    pub x: f64,
    pub label: String,
}

#[derive(Debug, Clone)]
pub struct PlotSpec {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub curves: Vec<CurveSpec>,
    pub vlines: Vec<VLine>,
}

pub const BLUE: &str = "#1f77b4";
pub const ORANGE: &str = "#ff7f0e";
pub const GREEN: &str = "#2ca02c";
pub const RED: &str = "#d62728";

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 55.0;

pub fn render(spec: &PlotSpec) -> String {
    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for curve in &spec.curves {
        for &(x, y) in &curve.points {
            x_min = x_min.min(x);
            x_max = x_max.max(x);
            y_min = y_min.min(y);
            y_max = y_max.max(y);
        }
    }
    for vline in &spec.vlines {
        x_min = x_min.min(vline.x);
        x_max = x_max.max(vline.x);
    }
    if !x_min.is_finite() || !x_max.is_finite() {
        x_min = 0.0;
        x_max = 1.0;
    }
    if !y_min.is_finite() || !y_max.is_finite() {
        y_min = 0.0;
        y_max = 1.0;
    }
    if x_max - x_min < 1e-12 {
        x_max = x_min + 1.0;
    }
    if y_max - y_min < 1e-12 {
        y_max = y_min + 1.0;
    }
    // Pad the value axis a little.
    let pad = 0.05 * (y_max - y_min);
    y_min -= pad;
    y_max += pad;

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = move |x: f64| MARGIN_LEFT + (x - x_min) / (x_max - x_min) * plot_w;
    let sy = move |y: f64| MARGIN_TOP + (y_max - y) / (y_max - y_min) * plot_h;

    let mut out = String::with_capacity(16 * 1024);
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" \
         font-family=\"sans-serif\" font-size=\"13\">\n"
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    out.push_str(&format!(
        "<text x=\"{:.1}\" y=\"22\" text-anchor=\"middle\" font-size=\"16\">{}</text>\n",
        WIDTH / 2.0,
        escape(&spec.title)
    ));

    // Axes.
    out.push_str(&format!(
        "<line x1=\"{l:.1}\" y1=\"{b:.1}\" x2=\"{r:.1}\" y2=\"{b:.1}\" stroke=\"black\"/>\n\
         <line x1=\"{l:.1}\" y1=\"{t:.1}\" x2=\"{l:.1}\" y2=\"{b:.1}\" stroke=\"black\"/>\n",
        l = MARGIN_LEFT,
        r = WIDTH - MARGIN_RIGHT,
        t = MARGIN_TOP,
        b = HEIGHT - MARGIN_BOTTOM,
    ));

    for i in 0..=5 {
        let fx = x_min + (x_max - x_min) * i as f64 / 5.0;
        let px = sx(fx);
        out.push_str(&format!(
            "<line x1=\"{px:.1}\" y1=\"{b:.1}\" x2=\"{px:.1}\" y2=\"{b2:.1}\" stroke=\"black\"/>\n\
             <text x=\"{px:.1}\" y=\"{ty:.1}\" text-anchor=\"middle\">{}</text>\n",
            tick_label(fx),
            b = HEIGHT - MARGIN_BOTTOM,
            b2 = HEIGHT - MARGIN_BOTTOM + 5.0,
            ty = HEIGHT - MARGIN_BOTTOM + 20.0,
        ));
        let fy = y_min + (y_max - y_min) * i as f64 / 5.0;
        let py = sy(fy);
        out.push_str(&format!(
            "<line x1=\"{l2:.1}\" y1=\"{py:.1}\" x2=\"{l:.1}\" y2=\"{py:.1}\" stroke=\"black\"/>\n\
             <text x=\"{tx:.1}\" y=\"{py2:.1}\" text-anchor=\"end\">{}</text>\n",
            tick_label(fy),
            l = MARGIN_LEFT,
            l2 = MARGIN_LEFT - 5.0,
            tx = MARGIN_LEFT - 8.0,
            py2 = py + 4.0,
        ));
    }
    out.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>\n",
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 12.0,
        escape(&spec.x_label)
    ));
    out.push_str(&format!(
        "<text x=\"18\" y=\"{:.1}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {0:.1})\">{1}</text>\n",
        MARGIN_TOP + plot_h / 2.0,
        escape(&spec.y_label)
    ));

    // Vertical markers.
    for vline in &spec.vlines {
        let px = sx(vline.x);
        out.push_str(&format!(
            "<line x1=\"{px:.1}\" y1=\"{t:.1}\" x2=\"{px:.1}\" y2=\"{b:.1}\" \
             stroke=\"gray\" stroke-dasharray=\"5,4\"/>\n\
             <text x=\"{px:.1}\" y=\"{ty:.1}\" text-anchor=\"middle\" fill=\"gray\">{}</text>\n",
            escape(&vline.label),
            t = MARGIN_TOP,
            b = HEIGHT - MARGIN_BOTTOM,
            ty = MARGIN_TOP - 6.0,
        ));
    }

    // Curves.
    for curve in &spec.curves {
        let mut path = String::with_capacity(12 * curve.points.len());
        for (i, &(x, y)) in curve.points.iter().enumerate() {
            if i > 0 {
                path.push(' ');
            }
            path.push_str(&format!("{:.2},{:.2}", sx(x), sy(y)));
        }
        out.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"2\" points=\"{path}\"/>\n",
            curve.color
        ));
    }

    // Legend.
    for (i, curve) in spec.curves.iter().enumerate() {
        let y = MARGIN_TOP + 16.0 + 18.0 * i as f64;
        let x = WIDTH - MARGIN_RIGHT - 190.0;
        out.push_str(&format!(
            "<line x1=\"{x:.1}\" y1=\"{y:.1}\" x2=\"{x2:.1}\" y2=\"{y:.1}\" \
             stroke=\"{}\" stroke-width=\"2\"/>\n\
             <text x=\"{tx:.1}\" y=\"{ty:.1}\">{}</text>\n",
            curve.color,
            escape(&curve.label),
            x2 = x + 26.0,
            tx = x + 32.0,
            ty = y + 4.0,
        ));
    }

    out.push_str("</svg>\n");
    out
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let magnitude = v.abs();
    if !(0.001..1000.0).contains(&magnitude) {
        format!("{v:.2e}")
    } else if magnitude >= 10.0 {
        format!("{v:.1}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_curves_and_markers() {
        let spec = PlotSpec {
            title: "probe".into(),
            x_label: "tariff [$]".into(),
            y_label: "acceptance".into(),
            curves: vec![
                CurveSpec {
                    label: "one".into(),
                    color: BLUE,
                    points: vec![(0.0, 0.9), (10.0, 0.5), (20.0, 0.2)],
                },
                CurveSpec {
                    label: "two".into(),
                    color: ORANGE,
                    points: vec![(0.0, 0.8), (10.0, 0.45), (20.0, 0.15)],
                },
            ],
            vlines: vec![
                VLine {
                    x: 11.0,
                    label: "low".into(),
                },
                VLine {
                    x: 20.0,
                    label: "high".into(),
                },
            ],
        };
        let svg = render(&spec);
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert_eq!(svg.matches("stroke-dasharray").count(), 2);
        assert!(svg.contains("tariff [$]"));
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        // Deterministic output.
        assert_eq!(svg, render(&spec));
    }

    #[test]
    fn degenerate_ranges_do_not_produce_nans() {
        let spec = PlotSpec {
            title: "flat".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            curves: vec![CurveSpec {
                label: "flat".into(),
                color: GREEN,
                points: vec![(1.0, 2.0), (1.0, 2.0)],
            }],
            vlines: vec![],
        };
        let svg = render(&spec);
        assert!(!svg.contains("NaN"));
    }
}
