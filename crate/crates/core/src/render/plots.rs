use super::svg::{Scale, Svg};
use crate::align::{mean_origin_distance, select_baseline, TrajectorySet};
use crate::lsirm::PositionMatrix;
use crate::wordselect::TopicHistogram;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

fn extent(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    })
}

/// Mean origin distance of each level's positions as a line chart, with the
/// baseline level circled. Levels run from high (left) to low (right).
pub fn render_distance_plot(matrices: &[PositionMatrix]) -> String {
    let (w, h, m) = (640.0, 400.0, 56.0);
    let mut svg = Svg::new(w, h);
    let mut pts: Vec<(u32, f64)> = matrices
        .iter()
        .map(|a| (a.level, mean_origin_distance(a)))
        .collect();
    pts.sort_by(|a, b| b.0.cmp(&a.0));
    if pts.is_empty() {
        svg.text(w / 2.0, h / 2.0, "no position matrices", r##"text-anchor="middle""##);
        return svg.finish();
    }
    let (lmin, lmax) = extent(pts.iter().map(|p| p.0 as f64));
    let (dmin, dmax) = extent(pts.iter().map(|p| p.1));
    let pad = 0.05 * (dmax - dmin).max(1e-9);
    let sx = Scale::new(lmax, lmin, m, w - m / 2.0);
    let sy = Scale::new(dmin - pad, dmax + pad, h - m, m / 2.0);

    svg.line(m, h - m, w - m / 2.0, h - m, r##"stroke="black""##);
    svg.line(m, h - m, m, m / 2.0, r##"stroke="black""##);
    for &(level, _) in &pts {
        let x = sx.map(level as f64);
        svg.line(x, h - m, x, h - m + 4.0, r##"stroke="black""##);
        svg.text(x, h - m + 16.0, &format!("{level}"), r##"text-anchor="middle" font-size="9""##);
    }
    for k in 0..=4 {
        let v = dmin - pad + (dmax - dmin + 2.0 * pad) * k as f64 / 4.0;
        let y = sy.map(v);
        svg.line(m - 4.0, y, m, y, r##"stroke="black""##);
        svg.text(m - 6.0, y + 3.0, &format!("{v:.3}"), r##"text-anchor="end" font-size="9""##);
    }
    svg.text(w / 2.0, h - 12.0, "word percentile level (%)", r##"text-anchor="middle""##);
    svg.text(
        14.0,
        h / 2.0,
        "mean distance from origin",
        &format!(r##"text-anchor="middle" transform="rotate(-90 14 {})""##, h / 2.0),
    );

    let line: Vec<(f64, f64)> = pts
        .iter()
        .map(|&(l, d)| (sx.map(l as f64), sy.map(d)))
        .collect();
    svg.polyline(&line, r##"class="distance" fill="none" stroke="#1f77b4" stroke-width="1.5""##);
    for &(x, y) in &line {
        svg.circle(x, y, 2.5, r##"class="level" fill="#1f77b4""##);
    }
    if let Some(base) = select_baseline(matrices) {
        let &(l, d) = pts.iter().find(|p| p.0 == base).expect("baseline is one of the levels");
        let (x, y) = (sx.map(l as f64), sy.map(d));
        svg.circle(x, y, 7.0, &format!(r##"class="baseline" data-level="{base}" fill="none" stroke="#d62728" stroke-width="2""##));
        svg.text(x, y - 11.0, &format!("baseline {base}%"), r##"text-anchor="middle" fill="#d62728""##);
    }
    svg.finish()
}

/// One arrowed polyline per topic through its rotated coordinates, from the
/// highest level to the lowest, labelled at the final point. Only the first
/// two coordinates are drawn.
pub fn render_trajectory_plot(set: &TrajectorySet, labels: &[String]) -> String {
    let (w, h, m) = (720.0, 720.0, 40.0);
    let mut svg = Svg::new(w, h);
    let coords = set
        .trajectories
        .iter()
        .flat_map(|t| t.points.iter().map(|(_, xy)| (xy[0], xy.get(1).copied().unwrap_or(0.0))));
    let (xmin, xmax) = extent(coords.clone().map(|p| p.0).chain([0.0]));
    let (ymin, ymax) = extent(coords.map(|p| p.1).chain([0.0]));
    // equal aspect ratio so distances read correctly
    let span = (xmax - xmin).max(ymax - ymin).max(1e-9) * 1.1;
    let (cx, cy) = ((xmin + xmax) / 2.0, (ymin + ymax) / 2.0);
    let sx = Scale::new(cx - span / 2.0, cx + span / 2.0, m, w - m);
    let sy = Scale::new(cy - span / 2.0, cy + span / 2.0, h - m, m);

    svg.raw(
        r##"<defs><marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="6" markerHeight="6" orient="auto-start-reverse"><path d="M 0 0 L 10 5 L 0 10 z" fill="context-stroke"/></marker></defs>"##,
    );
    let (ox, oy) = (sx.map(0.0), sy.map(0.0));
    svg.line(m, oy, w - m, oy, r##"class="axis" stroke="#888" stroke-dasharray="4 3""##);
    svg.line(ox, m, ox, h - m, r##"class="axis" stroke="#888" stroke-dasharray="4 3""##);

    for (k, t) in set.trajectories.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let pts: Vec<(f64, f64)> = t
            .points
            .iter()
            .map(|(_, xy)| (sx.map(xy[0]), sy.map(xy.get(1).copied().unwrap_or(0.0))))
            .collect();
        svg.polyline(
            &pts,
            &format!(
                r##"class="trajectory" data-topic="{}" fill="none" stroke="{color}" stroke-width="1.3" marker-mid="url(#arrow)" marker-end="url(#arrow)""##,
                t.topic + 1
            ),
        );
        if let Some(&(x, y)) = pts.last() {
            let label = labels
                .get(t.topic)
                .filter(|l| !l.is_empty())
                .cloned()
                .unwrap_or_else(|| (t.topic + 1).to_string());
            svg.text(x + 4.0, y - 4.0, &label, &format!(r##"fill="{color}""##));
        }
    }
    svg.finish()
}

/// Small-multiple bar charts of per-topic ln-probability histograms, with the
/// cutoff drawn as a vertical line.
pub fn render_histograms(hists: &[TopicHistogram], cutoff: f64) -> String {
    let cols = 5usize;
    let rows = hists.len().div_ceil(cols).max(1);
    let (cw, ch) = (180.0, 130.0);
    let mut svg = Svg::new(cw * cols as f64, ch * rows as f64);
    let (lo, hi) = extent(hists.iter().flat_map(|h| h.edges.iter().copied()).chain([cutoff]));
    for (k, hist) in hists.iter().enumerate() {
        let (ox, oy) = ((k % cols) as f64 * cw, (k / cols) as f64 * ch);
        let sx = Scale::new(lo, hi, ox + 10.0, ox + cw - 10.0);
        let top = hist.counts.iter().copied().max().unwrap_or(0).max(1) as f64;
        let sy = Scale::new(0.0, top, oy + ch - 20.0, oy + 22.0);
        svg.text(
            ox + cw / 2.0,
            oy + 14.0,
            &format!("topic {} ({} above cutoff)", hist.topic + 1, hist.above_cutoff),
            r##"text-anchor="middle" font-size="10""##,
        );
        for (b, &c) in hist.counts.iter().enumerate() {
            let (x0, x1) = (sx.map(hist.edges[b]), sx.map(hist.edges[b + 1]));
            let y = sy.map(c as f64);
            svg.rect(x0, y, (x1 - x0).max(0.5), oy + ch - 20.0 - y, r##"class="bin" fill="#1f77b4""##);
        }
        let xc = sx.map(cutoff);
        svg.line(xc, oy + 22.0, xc, oy + ch - 20.0, r##"stroke="#d62728" stroke-dasharray="3 2""##);
        svg.line(ox + 10.0, oy + ch - 20.0, ox + cw - 10.0, oy + ch - 20.0, r##"stroke="black""##);
    }
    svg.finish()
}
