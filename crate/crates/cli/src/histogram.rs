//! Equal-width histogram with a self-contained SVG renderer (no external
//! assets or plotting runtime).

use serde::Serialize;

/// Binned counts over strictly increasing edges; Σ counts = total.
#[derive(Debug, Clone, Serialize)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub total: u64,
}

impl Histogram {
    /// Bins `values` into `bins` equal-width cells spanning the data range
    /// (a degenerate range is widened by ±0.5 so every value lands inside).
    pub fn from_values(values: &[f64], bins: usize) -> Option<Self> {
        if values.is_empty() || bins == 0 {
            return None;
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in values {
            if !v.is_finite() {
                return None;
            }
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if lo == hi {
            lo -= 0.5;
            hi += 0.5;
        }
        let width = (hi - lo) / bins as f64;
        let bin_edges: Vec<f64> = (0..=bins).map(|i| lo + width * i as f64).collect();
        let mut counts = vec![0u64; bins];
        for &v in values {
            let mut b = ((v - lo) / width) as usize;
            if b >= bins {
                b = bins - 1; // right edge is inclusive
            }
            counts[b] += 1;
        }
        Some(Histogram {
            bin_edges,
            counts,
            total: values.len() as u64,
        })
    }

    /// Renders a standalone SVG bar chart.
    pub fn to_svg(&self, title: &str) -> String {
        let (w, h) = (640.0f64, 400.0f64);
        let (ml, mr, mt, mb) = (55.0f64, 15.0f64, 35.0f64, 45.0f64);
        let (pw, ph) = (w - ml - mr, h - mt - mb);
        let max_count = self.counts.iter().copied().max().unwrap_or(1).max(1) as f64;
        let n = self.counts.len();
        let mut s = String::new();
        s.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" \
             viewBox=\"0 0 {w} {h}\">\n<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n\
             <text x=\"{:.1}\" y=\"22\" text-anchor=\"middle\" font-family=\"monospace\" \
             font-size=\"14\">{}</text>\n",
            w / 2.0,
            xml_escape(title)
        ));
        for (i, &c) in self.counts.iter().enumerate() {
            let bh = ph * c as f64 / max_count;
            let x = ml + pw * i as f64 / n as f64;
            let bw = pw / n as f64;
            s.push_str(&format!(
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" \
                 fill=\"#4878a8\" stroke=\"white\" stroke-width=\"0.5\"/>\n",
                x,
                mt + ph - bh,
                bw,
                bh
            ));
        }
        // Axes and extreme tick labels.
        s.push_str(&format!(
            "<line x1=\"{ml}\" y1=\"{0}\" x2=\"{1}\" y2=\"{0}\" stroke=\"black\"/>\n\
             <line x1=\"{ml}\" y1=\"{mt}\" x2=\"{ml}\" y2=\"{0}\" stroke=\"black\"/>\n",
            mt + ph,
            ml + pw
        ));
        s.push_str(&format!(
            "<text x=\"{ml}\" y=\"{0}\" text-anchor=\"middle\" font-family=\"monospace\" \
             font-size=\"11\">{1:.3}</text>\n\
             <text x=\"{2:.1}\" y=\"{0}\" text-anchor=\"middle\" font-family=\"monospace\" \
             font-size=\"11\">{3:.3}</text>\n\
             <text x=\"{4:.1}\" y=\"{5:.1}\" text-anchor=\"end\" font-family=\"monospace\" \
             font-size=\"11\">{6}</text>\n</svg>\n",
            mt + ph + 18.0,
            self.bin_edges[0],
            ml + pw,
            self.bin_edges[n],
            ml - 6.0,
            mt + 10.0,
            max_count as u64
        ));
        s
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
