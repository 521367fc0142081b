//! Output sinks: CSV files with deterministic row order, the flat key-value
//! manifest, and minimal self-contained SVG line plots.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

/// Tracks files created during a run so a failed run leaves nothing behind.
pub struct RunDir {
    root: PathBuf,
    created_root: bool,
    files: Vec<PathBuf>,
    committed: bool,
}

impl RunDir {
    pub fn create(root: &Path) -> Result<Self, String> {
        let created_root = !root.exists();
        fs::create_dir_all(root).map_err(|e| format!("cannot create {}: {e}", root.display()))?;
        Ok(RunDir { root: root.to_path_buf(), created_root, files: Vec::new(), committed: false })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<PathBuf, String> {
        let path = self.root.join(name);
        fs::write(&path, contents).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
        self.files.push(path.clone());
        Ok(path)
    }

    /// Keep the outputs.
    pub fn commit(mut self) {
        self.committed = true;
    }
}

impl Drop for RunDir {
    fn drop(&mut self) {
        if self.committed {
            return;
        }
        for f in &self.files {
            let _ = fs::remove_file(f);
        }
        if self.created_root {
            let _ = fs::remove_dir(&self.root);
        }
    }
}

/// CSV assembly with a fixed header and `Display`-formatted cells (shortest
/// round-trip float formatting keeps reruns byte-identical).
pub struct Csv {
    buf: String,
    columns: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut buf = String::new();
        buf.push_str(&header.join(","));
        buf.push('\n');
        Csv { buf, columns: header.len() }
    }

    pub fn row(&mut self, cells: &[String]) {
        assert_eq!(cells.len(), self.columns, "csv row width");
        self.buf.push_str(&cells.join(","));
        self.buf.push('\n');
    }

    pub fn finish(self) -> String {
        self.buf
    }
}

pub fn fmt_f(x: f64) -> String {
    format!("{x}")
}

/// Flat `key=value` manifest.
pub fn manifest(entries: &[(&str, String)]) -> String {
    let mut out = String::new();
    for (k, v) in entries {
        let _ = writeln!(out, "{k}={v}");
    }
    out
}

pub fn parse_manifest(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

/// One plotted series.
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Minimal SVG line plot; `log_y` plots log10 of positive ordinates.
pub fn svg_line_plot(title: &str, series: &[Series], log_y: bool) -> String {
    const W: f64 = 760.0;
    const H: f64 = 480.0;
    const ML: f64 = 70.0;
    const MR: f64 = 20.0;
    const MT: f64 = 40.0;
    const MB: f64 = 50.0;
    let palette = ["#1b6ca8", "#c0392b", "#1e8449", "#8e44ad", "#b7950b", "#34495e"];

    let tf = |y: f64| if log_y { y.max(1e-300).log10() } else { y };
    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for s in series {
        for &(x, y) in &s.points {
            if log_y && y <= 0.0 {
                continue;
            }
            x_min = x_min.min(x);
            x_max = x_max.max(x);
            y_min = y_min.min(tf(y));
            y_max = y_max.max(tf(y));
        }
    }
    if !(x_min < x_max) {
        x_max = x_min + 1.0;
    }
    if !(y_min < y_max) {
        y_max = y_min + 1.0;
    }
    let sx = |x: f64| ML + (x - x_min) / (x_max - x_min) * (W - ML - MR);
    let sy = |y: f64| H - MB - (tf(y) - y_min) / (y_max - y_min) * (H - MT - MB);

    let mut svg = String::new();
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" \
         viewBox=\"0 0 {W} {H}\">\n<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n"
    );
    let _ = write!(
        svg,
        "<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" \
         text-anchor=\"middle\">{title}</text>\n",
        W / 2.0
    );
    // Axes.
    let _ = write!(
        svg,
        "<line x1=\"{ML}\" y1=\"{MT}\" x2=\"{ML}\" y2=\"{}\" stroke=\"black\"/>\n\
         <line x1=\"{ML}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        H - MB,
        H - MB,
        W - MR,
        H - MB
    );
    // Tick labels at the extremes.
    let ylab = |v: f64| if log_y { format!("1e{v:.1}") } else { format!("{v:.3}") };
    let _ = write!(
        svg,
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" \
         text-anchor=\"end\">{}</text>\n",
        ML - 6.0,
        H - MB + 4.0,
        ylab(y_min)
    );
    let _ = write!(
        svg,
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" \
         text-anchor=\"end\">{}</text>\n",
        ML - 6.0,
        MT + 4.0,
        ylab(y_max)
    );
    let _ = write!(
        svg,
        "<text x=\"{ML}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">{x_min:.3}</text>\n\
         <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" \
         text-anchor=\"end\">{x_max:.3}</text>\n",
        H - MB + 18.0,
        W - MR,
        H - MB + 18.0
    );

    for (i, s) in series.iter().enumerate() {
        let color = palette[i % palette.len()];
        let mut d = String::new();
        let mut pen_up = true;
        for &(x, y) in &s.points {
            if log_y && y <= 0.0 {
                pen_up = true;
                continue;
            }
            let _ = write!(d, "{}{:.2},{:.2} ", if pen_up { "M" } else { "L" }, sx(x), sy(y));
            pen_up = false;
        }
        let _ = write!(
            svg,
            "<path d=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.6\"/>\n",
            d.trim_end()
        );
        let _ = write!(
            svg,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" \
             fill=\"{color}\">{}</text>\n",
            W - MR - 180.0,
            MT + 16.0 * (i + 1) as f64,
            s.label
        );
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_shape_and_determinism() {
        let mut c = Csv::new(&["a", "b"]);
        c.row(&[fmt_f(1.0), fmt_f(0.30000000000000004)]);
        let text = c.finish();
        assert_eq!(text, "a,b\n1,0.30000000000000004\n");
    }

    #[test]
    fn manifest_round_trip() {
        let m = manifest(&[("k", "v".into()), ("n", "2".into())]);
        let parsed = parse_manifest(&m);
        assert_eq!(parsed[0], ("k".to_string(), "v".to_string()));
        assert_eq!(parsed[1].1, "2");
    }

    #[test]
    fn svg_contains_series() {
        let s = svg_line_plot(
            "demo",
            &[Series { label: "curve".into(), points: vec![(0.0, 1.0), (1.0, 0.1)] }],
            true,
        );
        assert!(s.contains("<svg") && s.contains("curve") && s.contains("</svg>"));
    }
}
