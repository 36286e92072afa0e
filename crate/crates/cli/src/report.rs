//! Static SVG figures drawn from the persisted CSV artifacts only.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{PipelineError, Result};
use crate::pipeline::{CORRELATIONS_FILE, OPTIMA_FILE, SUMMARY_FILE, TOP_PARAMS_FILE};
use crate::store::{parse_f64, read_table, slug, write_file};

pub const FIGURES_DIR: &str = "figures";
pub const FIGURES: [&str; 4] = ["biomass_scatter.svg", "regret_curves.svg", "correlations.svg", "decision_maps.svg"];

const JITTER_SEED: u64 = 0x5EED;
const PALETTE: [&str; 10] =
    ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"];

fn colour(i: usize) -> &'static str {
    PALETTE[i % PALETTE.len()]
}

/// Writes every figure into `out/figures` and returns their paths.
pub fn emit_report(out: &Path) -> Result<Vec<PathBuf>> {
    let figures = [biomass_scatter(out)?, regret_curves(out)?, correlation_heatmap(out)?, decision_map_matrix(out)?];
    let mut written = Vec::new();
    for (name, svg) in FIGURES.iter().zip(figures) {
        let path = out.join(FIGURES_DIR).join(name);
        write_file(&path, svg.finish().as_bytes())?;
        written.push(path);
    }
    Ok(written)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Minimal SVG writer; coordinates are rounded to two decimals so the output
/// does not depend on float printing details.
struct Svg {
    body: String,
    width: f64,
    height: f64,
}

impl Svg {
    fn new(width: f64, height: f64) -> Self {
        Self { body: String::new(), width, height }
    }

    fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str) {
        let _ = writeln!(self.body, r#"<rect x="{x:.2}" y="{y:.2}" width="{w:.2}" height="{h:.2}" fill="{fill}"/>"#);
    }

    fn outline(&mut self, x: f64, y: f64, w: f64, h: f64) {
        let _ = writeln!(self.body, r#"<rect x="{x:.2}" y="{y:.2}" width="{w:.2}" height="{h:.2}" fill="none" stroke="black"/>"#);
    }

    fn circle(&mut self, x: f64, y: f64, r: f64, fill: &str) {
        let _ = writeln!(self.body, r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r:.2}" fill="{fill}" fill-opacity="0.6"/>"#);
    }

    fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64) {
        let _ = writeln!(self.body, r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="black"/>"#);
    }

    fn polyline(&mut self, points: &[(f64, f64)], stroke: &str) {
        let pts: Vec<String> = points.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        let _ = writeln!(self.body, r#"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="1.5"/>"#, pts.join(" "));
    }

    fn text(&mut self, x: f64, y: f64, size: f64, anchor: &str, s: &str) {
        let _ = writeln!(
            self.body,
            r#"<text x="{x:.2}" y="{y:.2}" font-size="{size:.0}" text-anchor="{anchor}" font-family="sans-serif">{}</text>"#,
            escape(s)
        );
    }

    fn vertical_text(&mut self, x: f64, y: f64, size: f64, s: &str) {
        let _ = writeln!(
            self.body,
            r#"<text x="{x:.2}" y="{y:.2}" font-size="{size:.0}" text-anchor="end" font-family="sans-serif" transform="rotate(-90 {x:.2} {y:.2})">{}</text>"#,
            escape(s)
        );
    }

    fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.0} {h:.0}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.body,
            w = self.width,
            h = self.height
        )
    }
}

/// Linear map from `[lo, hi]` onto `[a, b]`, collapsing to the midpoint for an empty range.
fn scale(lo: f64, hi: f64, a: f64, b: f64) -> impl Fn(f64) -> f64 {
    move |v| if hi > lo { a + (v - lo) / (hi - lo) * (b - a) } else { (a + b) / 2.0 }
}

fn finite_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
    if lo.is_finite() {
        (lo, hi)
    } else {
        (0.0, 1.0)
    }
}

/// Optimal output of each group across scenarios, one jittered column per group.
fn biomass_scatter(out: &Path) -> Result<Svg> {
    let path = out.join(OPTIMA_FILE);
    let (header, rows) = read_table(&path)?;
    let groups: Vec<String> = header.iter().skip(5).cloned().collect();
    let mut points = Vec::new();
    for row in rows.iter().filter(|r| r.get(1).map(String::as_str) == Some("optimal")) {
        for (g, cell) in row.iter().skip(5).enumerate() {
            points.push((g, parse_f64(&path, cell)?));
        }
    }
    let (w, h, left, bottom) = (120.0 + 90.0 * groups.len().max(1) as f64, 420.0, 70.0, 340.0);
    let mut svg = Svg::new(w, h);
    svg.text(w / 2.0, 24.0, 14.0, "middle", "Biomass use per output group across scenarios");
    let (_, hi) = finite_range(points.iter().map(|p| p.1));
    let y = scale(0.0, hi.max(1e-9), bottom, 40.0);
    svg.line(left, bottom, w - 20.0, bottom);
    svg.line(left, bottom, left, 40.0);
    for t in 0..=4 {
        let v = hi * t as f64 / 4.0;
        svg.text(left - 6.0, y(v) + 4.0, 10.0, "end", &format!("{v:.1}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(JITTER_SEED);
    for &(g, v) in &points {
        let x = left + 45.0 + 90.0 * g as f64 + rng.random_range(-25.0..25.0);
        svg.circle(x, y(v), 2.5, colour(g));
    }
    for (g, name) in groups.iter().enumerate() {
        svg.text(left + 45.0 + 90.0 * g as f64, bottom + 18.0, 10.0, "middle", name);
    }
    Ok(svg)
}

fn strategy_order(out: &Path) -> Result<Vec<(String, usize)>> {
    let path = out.join(SUMMARY_FILE);
    let (_, rows) = read_table(&path)?;
    rows.iter()
        .map(|r| {
            let n = r.get(1).and_then(|c| c.parse().ok()).ok_or_else(|| PipelineError::corrupt(&path, "scenario count"))?;
            Ok((r[0].clone(), n))
        })
        .collect()
}

/// Cumulative share of scenarios against regret, one line per strategy.
fn regret_curves(out: &Path) -> Result<Svg> {
    let mut curves = Vec::new();
    for (name, n) in strategy_order(out)? {
        if n == 0 {
            continue;
        }
        let path = out.join("curves").join(format!("{}.csv", slug(&name)));
        let (_, rows) = read_table(&path)?;
        let pts = rows
            .iter()
            .map(|r| Ok((parse_f64(&path, &r[0])?, parse_f64(&path, &r[1])?)))
            .collect::<Result<Vec<(f64, f64)>>>()?;
        curves.push((name, pts));
    }
    let (w, h, left, right, top, bottom) = (640.0, 420.0, 70.0, 470.0, 40.0, 360.0);
    let mut svg = Svg::new(w, h);
    svg.text(w / 2.0, 24.0, 14.0, "middle", "Cumulative regret curves");
    let (_, hi) = finite_range(curves.iter().flat_map(|c| c.1.iter().map(|p| p.0)));
    let x = scale(0.0, hi.max(1e-9), left, right);
    let y = scale(0.0, 100.0, bottom, top);
    svg.line(left, bottom, right, bottom);
    svg.line(left, bottom, left, top);
    for t in 0..=4 {
        let v = hi * t as f64 / 4.0;
        svg.text(x(v), bottom + 16.0, 10.0, "middle", &format!("{v:.0}"));
        let p = 25.0 * t as f64;
        svg.text(left - 6.0, y(p) + 4.0, 10.0, "end", &format!("{p:.0}%"));
    }
    svg.text((left + right) / 2.0, bottom + 34.0, 11.0, "middle", "regret");
    for (i, (name, pts)) in curves.iter().enumerate() {
        // Steps start at zero regret and the share of scenarios with no regret.
        let mut line = vec![(x(0.0), y(0.0))];
        for &(r, p) in pts {
            let prev = line.last().map_or(y(0.0), |q| q.1);
            line.push((x(r), prev));
            line.push((x(r), y(p)));
        }
        svg.polyline(&line, colour(i));
        let ly = top + 16.0 * i as f64;
        svg.rect(right + 15.0, ly - 8.0, 10.0, 10.0, colour(i));
        svg.text(right + 30.0, ly + 1.0, 10.0, "start", name);
    }
    Ok(svg)
}

/// Diverging colour for a correlation in [-1, 1]; grey when undefined.
fn corr_colour(c: Option<f64>) -> String {
    let Some(c) = c else { return "#dddddd".into() };
    let t = c.clamp(-1.0, 1.0).abs();
    let fade = (255.0 * (1.0 - t)).round() as u8;
    if c >= 0.0 {
        format!("#ff{fade:02x}{fade:02x}")
    } else {
        format!("#{fade:02x}{fade:02x}ff")
    }
}

fn correlation_heatmap(out: &Path) -> Result<Svg> {
    let path = out.join(CORRELATIONS_FILE);
    let (header, rows) = read_table(&path)?;
    let params: Vec<String> = header.into_iter().skip(1).collect();
    let cell = 22.0;
    let (left, top) = (150.0, 230.0);
    let w = left + cell * params.len() as f64 + 40.0;
    let h = top + cell * rows.len() as f64 + 40.0;
    let mut svg = Svg::new(w.max(320.0), h);
    svg.text(w.max(320.0) / 2.0, 20.0, 14.0, "middle", "Correlation of regret with parameters");
    for (p, name) in params.iter().enumerate() {
        svg.vertical_text(left + cell * (p as f64 + 0.6), top - 6.0, 9.0, name);
    }
    for (s, row) in rows.iter().enumerate() {
        let y = top + cell * s as f64;
        svg.text(left - 6.0, y + cell * 0.65, 10.0, "end", &row[0]);
        for (p, c) in row.iter().skip(1).enumerate() {
            let v = if c == "undefined" { None } else { Some(parse_f64(&path, c)?) };
            svg.rect(left + cell * p as f64, y, cell, cell, &corr_colour(v));
            if let Some(v) = v {
                svg.text(left + cell * (p as f64 + 0.5), y + cell * 0.65, 7.0, "middle", &format!("{v:.2}"));
            }
        }
    }
    Ok(svg)
}

/// Upper triangle of decision maps over the most influential parameter pairs.
fn decision_map_matrix(out: &Path) -> Result<Svg> {
    let top_path = out.join(TOP_PARAMS_FILE);
    let (_, top_rows) = read_table(&top_path)?;
    let top: Vec<String> = top_rows.iter().map(|r| r[1].clone()).collect();
    let strategies: Vec<String> = strategy_order(out)?.into_iter().map(|s| s.0).collect();
    let panel = 150.0;
    let m = top.len().max(2) - 1;
    let (left, topm) = (40.0, 50.0);
    let w = left + panel * m as f64 + 180.0;
    let h = topm + panel * m as f64 + 40.0;
    let mut svg = Svg::new(w, h);
    svg.text(w / 2.0, 24.0, 14.0, "middle", "Least-regret strategy by parameter pair");
    if top.len() < 2 {
        svg.text(w / 2.0, h / 2.0, 12.0, "middle", "fewer than two parameters ranked");
    }
    for a in 0..top.len() {
        for b in a + 1..top.len() {
            let path = out.join("decision_maps").join(format!("{}_{}.csv", slug(&top[a]), slug(&top[b])));
            let (_, rows) = read_table(&path)?;
            let n = rows.iter().filter_map(|r| r[0].parse::<usize>().ok()).max().map_or(1, |v| v + 1);
            let (px, py) = (left + panel * (b - 1) as f64, topm + panel * a as f64);
            let size = (panel - 20.0) / n as f64;
            for r in &rows {
                let (bi, bj): (usize, usize) = match (r[0].parse(), r[1].parse()) {
                    (Ok(i), Ok(j)) => (i, j),
                    _ => return Err(PipelineError::corrupt(&path, "bin index")),
                };
                let fill = strategies.iter().position(|s| *s == r[7]).map_or("#ffffff", colour);
                // Parameter j runs along x, parameter i upwards.
                svg.rect(px + size * bj as f64, py + size * (n - 1 - bi) as f64, size, size, fill);
            }
            svg.outline(px, py, size * n as f64, size * n as f64);
            svg.text(px + (panel - 20.0) / 2.0, py + panel - 8.0, 8.0, "middle", &top[b]);
            svg.vertical_text(px - 4.0, py, 8.0, &top[a]);
        }
    }
    let lx = w - 170.0;
    for (i, s) in strategies.iter().enumerate() {
        let ly = topm + 16.0 * i as f64;
        svg.rect(lx, ly - 8.0, 10.0, 10.0, colour(i));
        svg.text(lx + 15.0, ly + 1.0, 10.0, "start", s);
    }
    Ok(svg)
}
