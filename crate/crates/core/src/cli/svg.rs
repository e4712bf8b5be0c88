//! Minimal self-contained SVG writer. Coordinates are printed with a fixed
//! number of decimals so output is byte-stable.

use std::fmt::Write;

pub struct Svg {
    width: f64,
    height: f64,
    body: String,
}

/// Plot area inside an SVG, mapping data coordinates to pixels.
#[derive(Debug, Clone, Copy)]
pub struct Frame {
    pub left: f64,
    pub top: f64,
    pub width: f64,
    pub height: f64,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
}

impl Frame {
    pub fn px(&self, x: f64) -> f64 {
        let (lo, hi) = self.x_range;
        self.left + (x - lo) / (hi - lo) * self.width
    }

    pub fn py(&self, y: f64) -> f64 {
        let (lo, hi) = self.y_range;
        self.top + self.height - (y - lo) / (hi - lo) * self.height
    }
}

pub fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

impl Svg {
    pub fn new(width: f64, height: f64) -> Self {
        Self {
            width,
            height,
            body: String::new(),
        }
    }

    pub fn title(&mut self, text: &str) {
        let _ = writeln!(self.body, "<title>{}</title>", escape(text));
    }

    pub fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str, stroke: Option<&str>) {
        let stroke = stroke
            .map(|s| format!(" stroke=\"{s}\""))
            .unwrap_or_default();
        let _ = writeln!(self.body, "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{w:.2}\" height=\"{h:.2}\" fill=\"{fill}\"{stroke}/>");
    }

    pub fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str) {
        let _ = writeln!(self.body, "<line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" stroke=\"{stroke}\"/>");
    }

    pub fn polyline(&mut self, points: &[(f64, f64)], stroke: &str) {
        if points.is_empty() {
            return;
        }
        let coords: Vec<String> = points
            .iter()
            .map(|(x, y)| format!("{x:.2},{y:.2}"))
            .collect();
        let _ = writeln!(
            self.body,
            "<polyline fill=\"none\" stroke=\"{stroke}\" points=\"{}\"/>",
            coords.join(" ")
        );
    }

    pub fn circle(&mut self, x: f64, y: f64, r: f64, fill: &str) {
        let _ = writeln!(
            self.body,
            "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"{r:.2}\" fill=\"{fill}\"/>"
        );
    }

    pub fn text(&mut self, x: f64, y: f64, size: f64, anchor: &str, text: &str) {
        let _ = writeln!(
            self.body,
            "<text x=\"{x:.2}\" y=\"{y:.2}\" font-size=\"{size:.0}\" font-family=\"sans-serif\" text-anchor=\"{anchor}\">{}</text>",
            escape(text)
        );
    }

    /// Box with tick labels at both ends of each axis.
    pub fn axes(&mut self, f: &Frame, x_label: &str, y_label: &str) {
        self.rect(f.left, f.top, f.width, f.height, "none", Some("#444"));
        let bottom = f.top + f.height;
        self.text(f.left, bottom + 14.0, 10.0, "middle", &tick(f.x_range.0));
        self.text(
            f.left + f.width,
            bottom + 14.0,
            10.0,
            "middle",
            &tick(f.x_range.1),
        );
        self.text(f.left - 4.0, bottom, 10.0, "end", &tick(f.y_range.0));
        self.text(f.left - 4.0, f.top + 4.0, 10.0, "end", &tick(f.y_range.1));
        self.text(
            f.left + f.width / 2.0,
            bottom + 28.0,
            12.0,
            "middle",
            x_label,
        );
        self.text(
            f.left - 30.0,
            f.top + f.height / 2.0,
            12.0,
            "middle",
            y_label,
        );
    }

    pub fn finish(self) -> String {
        format!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0}\" height=\"{:.0}\" viewBox=\"0 0 {:.0} {:.0}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.width, self.height, self.width, self.height, self.body
        )
    }
}

fn tick(v: f64) -> String {
    if v == 0.0 || (1e-3..1e4).contains(&v.abs()) {
        format!("{}", (v * 1000.0).round() / 1000.0)
    } else {
        format!("{v:.0e}")
    }
}

/// Sequential colour ramp from pale yellow (`t = 0`) to dark blue (`t = 1`).
pub fn ramp(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let lerp = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
    format!(
        "#{:02x}{:02x}{:02x}",
        lerp(255.0, 8.0),
        lerp(247.0, 48.0),
        lerp(188.0, 107.0)
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn document_is_self_contained_and_stable() {
        let build = || {
            let mut s = Svg::new(100.0, 50.0);
            s.title("a < b & c");
            let f = Frame {
                left: 10.0,
                top: 5.0,
                width: 80.0,
                height: 40.0,
                x_range: (0.0, 1.0),
                y_range: (0.0, 2.0),
            };
            s.axes(&f, "x", "y");
            s.polyline(&[(f.px(0.0), f.py(0.0)), (f.px(1.0), f.py(2.0))], "black");
            s.finish()
        };
        let doc = build();
        assert_eq!(doc, build());
        assert!(doc.contains("<title>a &lt; b &amp; c</title>"));
        assert!(doc.contains("points=\"10.00,45.00 90.00,5.00\""));
        assert!(!doc.contains("href"));
    }

    #[test]
    fn ramp_endpoints() {
        assert_eq!(ramp(0.0), "#fff7bc");
        assert_eq!(ramp(1.0), "#08306b");
        assert_eq!(ramp(7.0), ramp(1.0));
    }
}
