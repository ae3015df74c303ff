//! CSV, JSON and SVG writers. Every artifact carries the run configuration
//! and the crate version, and is written through a temp file + rename.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use anyhow::Context;
use serde::Serialize;

use crate::config::RunConfig;

pub fn version_string() -> String {
    format!("roundclique {}", roundclique::VERSION)
}

/// Writes `bytes` to a temp file beside `path`, then renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let name = path.file_name().with_context(|| format!("{} is not a file path", path.display()))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let res = (|| {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if res.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    res.with_context(|| format!("cannot write {}", path.display()))
}

/// A CSV table behind `# config:` / `# version:` comment lines.
pub struct Csv {
    buf: String,
    width: usize,
}

impl Csv {
    pub fn new(config: &RunConfig, header: &[&str]) -> Self {
        let mut buf = String::new();
        writeln!(buf, "# config: {}", config.to_json()).unwrap();
        writeln!(buf, "# version: {}", version_string()).unwrap();
        buf.push_str(&header.join(","));
        buf.push('\n');
        Csv { buf, width: header.len() }
    }

    pub fn row(&mut self, fields: &[String]) {
        assert_eq!(fields.len(), self.width, "row width");
        for (i, f) in fields.iter().enumerate() {
            if i > 0 {
                self.buf.push(',');
            }
            if f.contains([',', '"', '\n']) {
                self.buf.push('"');
                self.buf.push_str(&f.replace('"', "\"\""));
                self.buf.push('"');
            } else {
                self.buf.push_str(f);
            }
        }
        self.buf.push('\n');
    }

    pub fn into_string(self) -> String {
        self.buf
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    version: String,
    config: &'a RunConfig,
    result: &'a T,
}

pub fn json_report<T: Serialize>(config: &RunConfig, result: &T) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(&Envelope { version: version_string(), config, result })?;
    s.push('\n');
    Ok(s)
}

pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn nice_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = (hi - lo).max(1e-12);
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + 1e-9 * step {
        out.push((t / step).round() * step);
        t += step;
    }
    out
}

/// Line chart with δ on the x axis and α on the y axis. Single-point series
/// are drawn as dots.
pub fn svg_chart(config: &RunConfig, title: &str, series: &[Series]) -> String {
    let (w, h) = (760.0, 500.0);
    let (ml, mr, mt, mb) = (70.0, 180.0, 40.0, 60.0);
    let pts = series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (1.0, 2.0, 1.0, 2.0);
    }
    if x1 - x0 < 1e-9 {
        x1 = x0 + 1.0;
    }
    let pad = ((y1 - y0) * 0.05).max(1e-3);
    y0 -= pad;
    y1 += pad;
    let px = |x: f64| ml + (x - x0) / (x1 - x0) * (w - ml - mr);
    let py = |y: f64| h - mb - (y - y0) / (y1 - y0) * (h - mt - mb);

    let mut s = String::new();
    writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    // JSON cannot contain "--" outside strings; guard anyway for comments
    writeln!(s, "<!-- config: {} -->", config.to_json().replace("--", "- -")).unwrap();
    writeln!(s, "<!-- version: {} -->", version_string()).unwrap();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#).unwrap();
    writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#).unwrap();
    writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#, (ml + w - mr) / 2.0, escape(title)).unwrap();
    let (bottom, right) = (h - mb, w - mr);
    writeln!(s, r#"<line x1="{ml}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="black"/>"#).unwrap();
    writeln!(s, r#"<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{bottom}" stroke="black"/>"#).unwrap();
    for t in nice_ticks(x0, x1) {
        let x = px(t);
        writeln!(s, r#"<line x1="{x:.2}" y1="{bottom}" x2="{x:.2}" y2="{}" stroke="black"/>"#, bottom + 5.0).unwrap();
        writeln!(s, r#"<text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#, bottom + 20.0, fmt_tick(t)).unwrap();
    }
    for t in nice_ticks(y0, y1) {
        let y = py(t);
        writeln!(s, r##"<line x1="{ml}" y1="{y:.2}" x2="{right}" y2="{y:.2}" stroke="#e0e0e0"/>"##).unwrap();
        writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, ml - 8.0, y + 4.0, fmt_tick(t)).unwrap();
    }
    writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">δ</text>"#, (ml + w - mr) / 2.0, h - 18.0).unwrap();
    writeln!(s, r#"<text x="20" y="{}" text-anchor="middle" font-size="14">α</text>"#, (mt + h - mb) / 2.0).unwrap();
    for (i, ser) in series.iter().enumerate() {
        let c = PALETTE[i % PALETTE.len()];
        if ser.points.len() == 1 {
            let (x, y) = ser.points[0];
            writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="{c}"/>"#, px(x), py(y)).unwrap();
        } else if !ser.points.is_empty() {
            let path: Vec<String> = ser.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
            writeln!(s, r#"<polyline fill="none" stroke="{c}" stroke-width="1.5" points="{}"/>"#, path.join(" ")).unwrap();
        }
        let ly = mt + 10.0 + 18.0 * i as f64;
        writeln!(s, r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{c}" stroke-width="3"/>"#, right + 12.0, right + 32.0).unwrap();
        writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, right + 38.0, ly + 4.0, escape(&ser.name)).unwrap();
    }
    s.push_str("</svg>\n");
    s
}

fn fmt_tick(t: f64) -> String {
    let s = format!("{t:.3}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> RunConfig {
        RunConfig { command: "bounds", threads: None, args: serde_json::json!({"grid": "1:2:0.5"}) }
    }

    #[test]
    fn empty_csv_is_header_only() {
        let c = Csv::new(&cfg(), &["delta", "kind", "alpha"]).into_string();
        let lines: Vec<&str> = c.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("# config: {"));
        assert_eq!(lines[2], "delta,kind,alpha");
    }

    #[test]
    fn csv_quotes_fields() {
        let mut c = Csv::new(&cfg(), &["a", "b"]);
        c.row(&["x,y".into(), "say \"hi\"".into()]);
        assert!(c.into_string().ends_with("\"x,y\",\"say \"\"hi\"\"\"\n"));
    }

    #[test]
    fn svg_is_deterministic_and_labelled() {
        let s = [Series { name: "a<b".into(), points: vec![(1.0, 1.5), (1.5, 1.75)] }, Series { name: "dot".into(), points: vec![(1.0, 1.2)] }];
        let a = svg_chart(&cfg(), "t", &s);
        assert_eq!(a, svg_chart(&cfg(), "t", &s));
        assert!(a.contains(">δ</text>") && a.contains(">α</text>") && a.contains("a&lt;b"));
        assert!(a.contains("<polyline") && a.contains("<circle"));
        assert!(svg_chart(&cfg(), "empty", &[]).ends_with("</svg>\n"));
    }

    #[test]
    fn atomic_write_replaces() {
        let d = tempfile::tempdir().unwrap();
        let p = d.path().join("sub").join("f.csv");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }

    #[test]
    fn ticks_cover_range() {
        let t = nice_ticks(1.0, 2.0);
        assert_eq!(t.first(), Some(&1.0));
        assert_eq!(t.last(), Some(&2.0));
    }
}
