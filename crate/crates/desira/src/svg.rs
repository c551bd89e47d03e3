//! Minimal standalone SVG plots: polyline curves, dashed markers, bars.
//!
//! Just enough to render desirability curves and run diagnostics as
//! static figures without a plotting dependency.

use std::io::{self, Write};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 36.0;
const MARGIN_BOTTOM: f64 = 52.0;

fn fmt_tick(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn sx(&self, x: f64) -> f64 {
        MARGIN_LEFT
            + (x - self.x_min) / (self.x_max - self.x_min) * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn sy(&self, y: f64) -> f64 {
        HEIGHT
            - MARGIN_BOTTOM
            - (y - self.y_min) / (self.y_max - self.y_min) * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }
}

fn open_svg(w: &mut impl Write, title: &str) -> io::Result<()> {
    writeln!(
        w,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    )?;
    writeln!(
        w,
        "  <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>"
    )?;
    if !title.is_empty() {
        writeln!(
            w,
            "  <text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" \
             font-size=\"15\">{}</text>",
            WIDTH / 2.0,
            escape(title)
        )?;
    }
    Ok(())
}

fn axes(
    w: &mut impl Write,
    frame: &Frame,
    x_label: &str,
    y_label: &str,
    x_ticks: &[f64],
    y_ticks: &[f64],
) -> io::Result<()> {
    let x0 = MARGIN_LEFT;
    let x1 = WIDTH - MARGIN_RIGHT;
    let y0 = HEIGHT - MARGIN_BOTTOM;
    let y1 = MARGIN_TOP;
    writeln!(
        w,
        "  <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>"
    )?;
    writeln!(
        w,
        "  <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"black\"/>"
    )?;
    for &t in x_ticks {
        let sx = frame.sx(t);
        writeln!(
            w,
            "  <line x1=\"{sx}\" y1=\"{y0}\" x2=\"{sx}\" y2=\"{}\" stroke=\"black\"/>",
            y0 + 5.0
        )?;
        writeln!(
            w,
            "  <text x=\"{sx}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
             font-size=\"11\">{}</text>",
            y0 + 18.0,
            fmt_tick(t)
        )?;
    }
    for &t in y_ticks {
        let sy = frame.sy(t);
        writeln!(
            w,
            "  <line x1=\"{}\" y1=\"{sy}\" x2=\"{x0}\" y2=\"{sy}\" stroke=\"black\"/>",
            x0 - 5.0
        )?;
        writeln!(
            w,
            "  <text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-family=\"sans-serif\" \
             font-size=\"11\">{}</text>",
            x0 - 8.0,
            sy + 4.0,
            fmt_tick(t)
        )?;
    }
    writeln!(
        w,
        "  <text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"13\">{}</text>",
        (x0 + x1) / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    )?;
    writeln!(
        w,
        "  <text x=\"16\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"13\" transform=\"rotate(-90 16 {})\">{}</text>",
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(y_label)
    )?;
    Ok(())
}

fn ticks(min: f64, max: f64, count: usize) -> Vec<f64> {
    (0..=count)
        .map(|i| min + (max - min) * i as f64 / count as f64)
        .collect()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// A line plot of one or more series with optional dashed horizontal
/// markers (desirability curves mark the non-informative value that way).
#[derive(Debug, Clone)]
pub struct CurvePlot {
    title: String,
    x_label: String,
    y_label: String,
    series: Vec<(Vec<(f64, f64)>, &'static str)>,
    dashed_hlines: Vec<f64>,
    markers: Vec<(f64, f64)>,
}

impl CurvePlot {
    pub fn new(x_label: impl Into<String>, y_label: impl Into<String>) -> Self {
        CurvePlot {
            title: String::new(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            series: Vec::new(),
            dashed_hlines: Vec::new(),
            markers: Vec::new(),
        }
    }

    pub fn with_title(mut self, title: impl Into<String>) -> Self {
        self.title = title.into();
        self
    }

    pub fn line(mut self, points: Vec<(f64, f64)>) -> Self {
        self.series.push((points, "steelblue"));
        self
    }

    pub fn line_colored(mut self, points: Vec<(f64, f64)>, color: &'static str) -> Self {
        self.series.push((points, color));
        self
    }

    /// Dashed horizontal marker across the full x range.
    pub fn dashed_hline(mut self, y: f64) -> Self {
        self.dashed_hlines.push(y);
        self
    }

    /// A circular point marker.
    pub fn marker(mut self, x: f64, y: f64) -> Self {
        self.markers.push((x, y));
        self
    }

    pub fn render(&self, w: &mut impl Write) -> io::Result<()> {
        let pts = self
            .series
            .iter()
            .flat_map(|(s, _)| s.iter())
            .chain(self.markers.iter());
        let mut x_min = f64::INFINITY;
        let mut x_max = f64::NEG_INFINITY;
        let mut y_min = f64::INFINITY;
        let mut y_max = f64::NEG_INFINITY;
        for &(x, y) in pts {
            x_min = x_min.min(x);
            x_max = x_max.max(x);
            y_min = y_min.min(y);
            y_max = y_max.max(y);
        }
        for &y in &self.dashed_hlines {
            y_min = y_min.min(y);
            y_max = y_max.max(y);
        }
        if !(x_min.is_finite() && y_min.is_finite()) {
            return Err(io::Error::other("nothing to plot"));
        }
        if x_min == x_max {
            x_min -= 0.5;
            x_max += 0.5;
        }
        if y_min == y_max {
            y_min -= 0.5;
            y_max += 0.5;
        }
        let pad = 0.04 * (y_max - y_min);
        let frame = Frame {
            x_min,
            x_max,
            y_min: y_min - pad,
            y_max: y_max + pad,
        };

        open_svg(w, &self.title)?;
        axes(
            w,
            &frame,
            &self.x_label,
            &self.y_label,
            &ticks(x_min, x_max, 5),
            &ticks(frame.y_min, frame.y_max, 5),
        )?;
        for &y in &self.dashed_hlines {
            let sy = frame.sy(y);
            writeln!(
                w,
                "  <line x1=\"{}\" y1=\"{sy}\" x2=\"{}\" y2=\"{sy}\" stroke=\"gray\" \
                 stroke-dasharray=\"6 4\"/>",
                frame.sx(frame.x_min),
                frame.sx(frame.x_max)
            )?;
        }
        for (points, color) in &self.series {
            let path: Vec<String> = points
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", frame.sx(x), frame.sy(y)))
                .collect();
            writeln!(
                w,
                "  <polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
                path.join(" ")
            )?;
        }
        for &(x, y) in &self.markers {
            writeln!(
                w,
                "  <circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"crimson\"/>",
                frame.sx(x),
                frame.sy(y)
            )?;
        }
        writeln!(w, "</svg>")
    }
}

/// A bar plot over labelled categories.
#[derive(Debug, Clone)]
pub struct BarPlot {
    title: String,
    y_label: String,
    bars: Vec<(String, f64)>,
}

impl BarPlot {
    pub fn new(y_label: impl Into<String>) -> Self {
        BarPlot {
            title: String::new(),
            y_label: y_label.into(),
            bars: Vec::new(),
        }
    }

    pub fn with_title(mut self, title: impl Into<String>) -> Self {
        self.title = title.into();
        self
    }

    pub fn bar(mut self, label: impl Into<String>, value: f64) -> Self {
        self.bars.push((label.into(), value));
        self
    }

    pub fn render(&self, w: &mut impl Write) -> io::Result<()> {
        if self.bars.is_empty() {
            return Err(io::Error::other("nothing to plot"));
        }
        let y_max = self.bars.iter().map(|(_, v)| *v).fold(0.0f64, f64::max);
        let frame = Frame {
            x_min: 0.0,
            x_max: self.bars.len() as f64,
            y_min: 0.0,
            y_max: if y_max > 0.0 { y_max * 1.05 } else { 1.0 },
        };
        open_svg(w, &self.title)?;
        axes(
            w,
            &frame,
            "",
            &self.y_label,
            &[],
            &ticks(0.0, frame.y_max, 5),
        )?;
        let slot = (WIDTH - MARGIN_LEFT - MARGIN_RIGHT) / self.bars.len() as f64;
        for (i, (label, value)) in self.bars.iter().enumerate() {
            let cx = MARGIN_LEFT + slot * (i as f64 + 0.5);
            let x = cx - slot * 0.3;
            let top = frame.sy(*value);
            let bottom = frame.sy(0.0);
            writeln!(
                w,
                "  <rect x=\"{x:.2}\" y=\"{top:.2}\" width=\"{:.2}\" height=\"{:.2}\" \
                 fill=\"steelblue\"/>",
                slot * 0.6,
                bottom - top
            )?;
            writeln!(
                w,
                "  <text x=\"{cx:.2}\" y=\"{}\" text-anchor=\"middle\" \
                 font-family=\"sans-serif\" font-size=\"12\">{}</text>",
                HEIGHT - MARGIN_BOTTOM + 18.0,
                escape(label)
            )?;
        }
        writeln!(w, "</svg>")
    }
}
