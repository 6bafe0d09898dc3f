use std::fmt::Write as _;

use crate::grid::TrendReport;

/// A small CSV table; numbers are written with Rust's shortest round-trip
/// formatting so files are byte-stable across runs.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// One row per trend parameter; overflowed values are left empty.
    pub fn from_trends(trends: &[(String, &TrendReport)]) -> Self {
        let mut header = vec!["param".to_string()];
        header.extend(trends.iter().map(|(n, _)| n.clone()));
        let mut t = Table { header, rows: Vec::new() };
        if let Some((_, first)) = trends.first() {
            for (i, x) in first.params.iter().enumerate() {
                let mut row = vec![num(*x)];
                for (_, tr) in trends {
                    row.push(tr.values.get(i).copied().flatten().map(num).unwrap_or_default());
                }
                t.push(row);
            }
        }
        t
    }
}

pub fn num(x: f64) -> String {
    format!("{x}")
}

#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn from_trend(name: impl Into<String>, t: &TrendReport) -> Self {
        let points = t.params.iter().zip(&t.values).filter_map(|(x, v)| v.map(|v| (*x, v))).collect();
        Series { name: name.into(), points }
    }
}

#[derive(Debug, Clone)]
pub struct Plot {
    pub file: String,
    pub title: String,
    pub x_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub series: Vec<Series>,
}

const W: f64 = 640.0;
const H: f64 = 400.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

impl Plot {
    pub fn to_svg(&self) -> String {
        let tx = |x: f64| if self.log_x { x.max(f64::MIN_POSITIVE).log10() } else { x };
        let ty = |y: f64| if self.log_y { y.max(f64::MIN_POSITIVE).log10() } else { y };
        let pts: Vec<(f64, f64)> = self
            .series
            .iter()
            .flat_map(|s| s.points.iter().map(|&(x, y)| (tx(x), ty(y))))
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .collect();
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in &pts {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if pts.is_empty() {
            (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
        }
        if x1 <= x0 {
            x1 = x0 + 1.0;
        }
        if y1 <= y0 {
            y0 -= 0.5;
            y1 += 0.5;
        }
        let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
        let py = |y: f64| H - MARGIN - (y - y0) / (y1 - y0) * (H - 2.0 * MARGIN);

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
            W / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            s,
            r#"<path d="M{m},{t} L{m},{b} L{r},{b}" stroke="black" fill="none"/>"#,
            m = MARGIN,
            t = MARGIN,
            b = H - MARGIN,
            r = W - MARGIN
        );
        let label = |v: f64, log: bool| if log { format!("1e{v:.1}") } else { format!("{v:.4}") };
        let _ = writeln!(
            s,
            r#"<text x="{MARGIN}" y="{}" text-anchor="middle">{}</text>"#,
            H - MARGIN + 16.0,
            label(x0, self.log_x)
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            W - MARGIN,
            H - MARGIN + 16.0,
            label(x1, self.log_x)
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
            MARGIN - 4.0,
            H - MARGIN,
            label(y0, self.log_y)
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
            MARGIN - 4.0,
            MARGIN + 4.0,
            label(y1, self.log_y)
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            W / 2.0,
            H - 15.0,
            escape(&self.x_label)
        );
        for (i, series) in self.series.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            let path: Vec<String> = series
                .points
                .iter()
                .map(|&(x, y)| (tx(x), ty(y)))
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .map(|(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
                .collect();
            if !path.is_empty() {
                let _ = writeln!(
                    s,
                    r#"<polyline points="{}" stroke="{color}" stroke-width="1.5" fill="none"/>"#,
                    path.join(" ")
                );
            }
            let ly = MARGIN + 16.0 * i as f64;
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{ly}" fill="{color}">{}</text>"#,
                W - MARGIN - 150.0,
                escape(&series.name)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn svg_is_well_formed_enough() {
        let p = Plot {
            file: "t.svg".into(),
            title: "a < b".into(),
            x_label: "R".into(),
            log_x: true,
            log_y: false,
            series: vec![Series { name: "s".into(), points: vec![(1.0, 2.0), (10.0, 3.0)] }],
        };
        let svg = p.to_svg();
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert!(svg.contains("a &lt; b"));
        assert!(svg.contains("<polyline"));
    }

    #[test]
    fn csv_table() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![num(1.5), num(2.0)]);
        assert_eq!(t.to_csv(), "a,b\n1.5,2\n");
    }
}
