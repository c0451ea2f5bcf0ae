//! SVG figures of sweep results: one file per `k`, with a row per `ρ` and
//! two groups of columns (error rate, then power), one column per `u`.

use crate::error::{Error, Result};
use crate::metrics::MetricsRecord;
use crate::procedures::Method;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

const PANEL_W: f64 = 200.0;
const PANEL_H: f64 = 150.0;
const GAP_X: f64 = 50.0;
const GAP_Y: f64 = 45.0;
const LEFT: f64 = 70.0;
const TOP: f64 = 90.0;
const COLORS: [&str; 7] = [
    "#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d",
];

fn distinct(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn distinct_usize(values: impl Iterator<Item = usize>) -> Vec<usize> {
    let mut v: Vec<usize> = values.collect();
    v.sort_unstable();
    v.dedup();
    v
}

struct Panel {
    x0: f64,
    y0: f64,
    xmin: f64,
    xmax: f64,
    ymax: f64,
}

impl Panel {
    fn px(&self, x: f64) -> f64 {
        let span = self.xmax - self.xmin;
        let frac = if span > 0.0 {
            (x - self.xmin) / span
        } else {
            0.5
        };
        self.x0 + frac * PANEL_W
    }

    fn py(&self, y: f64) -> f64 {
        self.y0 + PANEL_H - (y / self.ymax).clamp(0.0, 1.0) * PANEL_H
    }

    fn frame(&self, svg: &mut String, title: &str) {
        let _ = writeln!(
            svg,
            r##"<rect x="{:.1}" y="{:.1}" width="{PANEL_W}" height="{PANEL_H}" fill="none" stroke="#444"/>"##,
            self.x0, self.y0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="12">{title}</text>"#,
            self.x0 + PANEL_W / 2.0,
            self.y0 - 6.0
        );
        for i in 0..=4 {
            let y = self.ymax * i as f64 / 4.0;
            let _ = writeln!(
                svg,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="end" font-size="9">{}</text>"#,
                self.x0 - 4.0,
                self.py(y) + 3.0,
                trim(y)
            );
        }
        for x in [self.xmin, self.xmax] {
            let _ = writeln!(
                svg,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="9">{}</text>"#,
                self.px(x),
                self.y0 + PANEL_H + 12.0,
                trim(x)
            );
        }
    }

    fn series(&self, svg: &mut String, points: &[(f64, f64)], color: &str) {
        if points.is_empty() {
            return;
        }
        let path: Vec<String> = points
            .iter()
            .map(|&(x, y)| format!("{:.1},{:.1}", self.px(x), self.py(y)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            path.join(" ")
        );
        for &(x, y) in points {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.1}" cy="{:.1}" r="2.2" fill="{color}"/>"#,
                self.px(x),
                self.py(y)
            );
        }
    }

    fn reference(&self, svg: &mut String, y: f64) {
        let _ = writeln!(
            svg,
            r##"<line x1="{:.1}" y1="{py:.1}" x2="{:.1}" y2="{py:.1}" stroke="#000" stroke-dasharray="4,3"/>"##,
            self.x0,
            self.x0 + PANEL_W,
            py = self.py(y)
        );
    }
}

fn trim(x: f64) -> String {
    let s = format!("{x:.3}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Renders the figure for one `k`. Error panels show the k-FWER estimate
/// with a dashed line at each `α` present.
pub fn render_svg(records: &[MetricsRecord], k: usize) -> Result<String> {
    let recs: Vec<&MetricsRecord> = records.iter().filter(|r| r.setting.k == k).collect();
    if recs.is_empty() {
        return Err(Error::Domain(format!("no records with k = {k}")));
    }
    let rhos = distinct(recs.iter().map(|r| r.setting.rho));
    let us = distinct_usize(recs.iter().map(|r| r.setting.u));
    let alphas = distinct(recs.iter().map(|r| r.setting.alpha));
    let pis = distinct(recs.iter().map(|r| r.setting.pi1));
    let mut methods: Vec<Method> = Vec::new();
    for r in &recs {
        if !methods.contains(&r.method) {
            methods.push(r.method);
        }
    }
    let err_max = recs
        .iter()
        .map(|r| r.kfwer)
        .chain(alphas.iter().map(|a| 2.0 * a))
        .fold(0.0, f64::max)
        .min(1.0);
    let err_max = if err_max > 0.0 { err_max * 1.1 } else { 0.1 };
    let (xmin, xmax) = (pis[0], pis[pis.len() - 1]);

    let cols = 2 * us.len();
    let width = LEFT + cols as f64 * (PANEL_W + GAP_X) + 20.0;
    let height = TOP + rhos.len() as f64 * (PANEL_H + GAP_Y) + 30.0;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" font-family="sans-serif">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{LEFT}" y="22" font-size="15">k = {k}: k-FWER (left) and TPR (right) against pi1</text>"#
    );
    for (j, m) in methods.iter().enumerate() {
        let x = LEFT + j as f64 * 150.0;
        let color = COLORS[j % COLORS.len()];
        let _ = writeln!(
            svg,
            r#"<line x1="{x}" y1="45" x2="{}" y2="45" stroke="{color}" stroke-width="2"/>"#,
            x + 20.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="49" font-size="11">{m}</text>"#,
            x + 25.0
        );
    }

    for (ri, &rho) in rhos.iter().enumerate() {
        let y0 = TOP + ri as f64 * (PANEL_H + GAP_Y);
        let _ = writeln!(
            svg,
            r#"<text x="14" y="{:.1}" font-size="12" transform="rotate(-90 14 {:.1})" text-anchor="middle">rho = {}</text>"#,
            y0 + PANEL_H / 2.0,
            y0 + PANEL_H / 2.0,
            trim(rho)
        );
        for (ci, &u) in us.iter().enumerate() {
            for (group, ymax) in [(0usize, err_max), (1, 1.0)] {
                let col = group * us.len() + ci;
                let panel = Panel {
                    x0: LEFT + col as f64 * (PANEL_W + GAP_X),
                    y0,
                    xmin,
                    xmax,
                    ymax,
                };
                let title = if group == 0 {
                    format!("k-FWER, u = {u}")
                } else {
                    format!("TPR, u = {u}")
                };
                panel.frame(&mut svg, &title);
                if group == 0 {
                    for &a in &alphas {
                        panel.reference(&mut svg, a);
                    }
                }
                for (j, m) in methods.iter().enumerate() {
                    let mut pts: Vec<(f64, f64)> = recs
                        .iter()
                        .filter(|r| r.method == *m && r.setting.u == u && r.setting.rho == rho)
                        .map(|r| (r.setting.pi1, if group == 0 { r.kfwer } else { r.tpr }))
                        .collect();
                    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
                    panel.series(&mut svg, &pts, COLORS[j % COLORS.len()]);
                }
            }
        }
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Writes `metrics_k{k}.svg` for every `k` in `records` and returns the paths.
pub fn plot_metrics(records: &[MetricsRecord], out_dir: &Path) -> Result<Vec<PathBuf>> {
    if records.is_empty() {
        return Err(Error::Domain("no metrics to plot".into()));
    }
    std::fs::create_dir_all(out_dir)?;
    let mut paths = Vec::new();
    for k in distinct_usize(records.iter().map(|r| r.setting.k)) {
        let path = out_dir.join(format!("metrics_k{k}.svg"));
        std::fs::write(&path, render_svg(records, k)?)?;
        paths.push(path);
    }
    Ok(paths)
}
