//! Minimal SVG bar charts for rank histograms: successful passes in blue,
//! unsuccessful in orange, side by side per bin.

use std::fmt::Write as _;

use super::report::SplitHistogram;
use super::HISTOGRAM_BINS;

const BLUE: &str = "#1f77b4";
const ORANGE: &str = "#ff7f0e";

pub fn render_histograms(h: &SplitHistogram) -> String {
    let (w, ht) = (420.0, 260.0);
    let (left, bottom, top) = (40.0, 30.0, 30.0);
    let plot_h = ht - bottom - top;
    let slot = (w - left - 10.0) / HISTOGRAM_BINS as f64;
    let max = h
        .successful
        .bins
        .iter()
        .chain(&h.unsuccessful.bins)
        .copied()
        .max()
        .unwrap_or(0)
        .max(1) as f64;
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{ht}" viewBox="0 0 {w} {ht}" font-family="sans-serif" font-size="11">"#
    )
    .unwrap();
    writeln!(
        s,
        r#"<text x="{}" y="18" text-anchor="middle">{} / {} (n = {} succ, {} nsucc)</text>"#,
        w / 2.0,
        h.split_class,
        h.mode,
        h.successful.total(),
        h.unsuccessful.total()
    )
    .unwrap();
    let base = ht - bottom;
    writeln!(s, r#"<line x1="{left}" y1="{base}" x2="{}" y2="{base}" stroke="black"/>"#, w - 10.0).unwrap();
    for bin in 0..HISTOGRAM_BINS {
        let x0 = left + bin as f64 * slot;
        for (k, (count, color)) in [(h.successful.bins[bin], BLUE), (h.unsuccessful.bins[bin], ORANGE)]
            .into_iter()
            .enumerate()
        {
            let bh = plot_h * count as f64 / max;
            let bw = slot * 0.4;
            let x = x0 + slot * 0.1 + k as f64 * bw;
            writeln!(
                s,
                r#"<rect x="{x:.2}" y="{:.2}" width="{bw:.2}" height="{bh:.2}" fill="{color}"><title>{count}</title></rect>"#,
                base - bh
            )
            .unwrap();
        }
        writeln!(
            s,
            r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#,
            x0 + slot / 2.0,
            base + 14.0,
            bin + 1
        )
        .unwrap();
    }
    writeln!(s, r#"<text x="12" y="{}" transform="rotate(-90 12 {})">count</text>"#, top + plot_h / 2.0, top + plot_h / 2.0).unwrap();
    s.push_str("</svg>\n");
    s
}
