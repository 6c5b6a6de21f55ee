//! Static SVG charts of the CSV reports.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{GameError, Result};
use crate::report::{self, Table};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum PlotKind {
    /// Per-system means with ±1 sd whiskers, from a difference CSV.
    Lines,
    /// Grouped bars, from a rank CSV.
    Ranks,
    /// Grouped bars per bin, from a histogram CSV.
    Hist,
}

impl std::str::FromStr for PlotKind {
    type Err = GameError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lines" => Ok(PlotKind::Lines),
            "ranks" => Ok(PlotKind::Ranks),
            "hist" => Ok(PlotKind::Hist),
            other => Err(GameError::Input(format!("unknown plot kind '{other}'"))),
        }
    }
}

/// What was drawn.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlotSummary {
    pub series: Vec<String>,
    /// x positions (systems, rank positions or bins).
    pub positions: usize,
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

fn color(k: usize) -> &'static str {
    PALETTE[k % PALETTE.len()]
}

struct Canvas {
    body: String,
    y_max: f64,
}

impl Canvas {
    fn new(y_max: f64) -> Self {
        let y_max = if y_max > 0.0 { y_max * 1.05 } else { 1.0 };
        Canvas {
            body: String::new(),
            y_max,
        }
    }

    fn plot_width(&self) -> f64 {
        WIDTH - LEFT - RIGHT
    }

    fn y(&self, value: f64) -> f64 {
        TOP + (HEIGHT - TOP - BOTTOM) * (1.0 - value.max(0.0) / self.y_max)
    }

    fn push(&mut self, element: String) {
        self.body.push_str("  ");
        self.body.push_str(&element);
        self.body.push('\n');
    }

    fn axes(&mut self, title: &str, x_labels: &[(f64, String)]) {
        let base = HEIGHT - BOTTOM;
        self.push(format!(
            r#"<line x1="{LEFT:.2}" y1="{base:.2}" x2="{:.2}" y2="{base:.2}" stroke="black"/>"#,
            WIDTH - RIGHT
        ));
        self.push(format!(r#"<line x1="{LEFT:.2}" y1="{TOP:.2}" x2="{LEFT:.2}" y2="{base:.2}" stroke="black"/>"#));
        for k in 0..=4 {
            let v = self.y_max * k as f64 / 4.0;
            let y = self.y(v);
            self.push(format!(
                r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="end">{}</text>"#,
                LEFT - 4.0,
                y + 3.0,
                report::format_float((v * 1000.0).round() / 1000.0)
            ));
        }
        for (x, label) in x_labels {
            self.push(format!(
                r#"<text x="{x:.2}" y="{:.2}" font-size="9" text-anchor="end" transform="rotate(-60 {x:.2} {:.2})">{}</text>"#,
                base + 12.0,
                base + 12.0,
                escape(label)
            ));
        }
        self.push(format!(
            r#"<text x="{:.2}" y="18" font-size="13" text-anchor="middle">{}</text>"#,
            LEFT + self.plot_width() / 2.0,
            escape(title)
        ));
    }

    fn legend(&mut self, series: &[String]) {
        for (k, name) in series.iter().enumerate() {
            let y = TOP + 16.0 * k as f64;
            let x = WIDTH - RIGHT + 12.0;
            self.push(format!(r#"<rect x="{x:.2}" y="{y:.2}" width="10" height="10" fill="{}"/>"#, color(k)));
            self.push(format!(
                r#"<text x="{:.2}" y="{:.2}" font-size="11">{}</text>"#,
                x + 14.0,
                y + 9.0,
                escape(name)
            ));
        }
    }

    fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.body
        )
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn lines(table: &Table) -> Result<(String, PlotSummary)> {
    let systems = &table.rows;
    let sys_col = table.column("system")?;
    let labels: Vec<String> = table
        .columns
        .iter()
        .filter_map(|c| c.strip_prefix("mean_").map(str::to_string))
        .collect();
    if labels.is_empty() {
        return Err(GameError::Input("missing column 'mean_*'".into()));
    }
    let mut series = Vec::new();
    for label in &labels {
        let means = table.floats(&format!("mean_{label}"))?;
        let sds = table.floats(&format!("sd_{label}"))?;
        series.push((means, sds));
    }
    let y_max = series
        .iter()
        .flat_map(|(m, s)| m.iter().zip(s).map(|(a, b)| a + b))
        .fold(0.0, f64::max);
    let mut canvas = Canvas::new(y_max);
    let step = canvas.plot_width() / systems.len() as f64;
    let x = |i: usize| LEFT + step * (i as f64 + 0.5);
    let x_labels: Vec<(f64, String)> = systems
        .iter()
        .enumerate()
        .map(|(i, r)| (x(i), r[sys_col].clone()))
        .collect();
    canvas.axes("Mean l1 distance per set system", &x_labels);
    for (k, (means, sds)) in series.iter().enumerate() {
        let c = color(k);
        let mut path = String::new();
        for (i, m) in means.iter().enumerate() {
            let _ = write!(path, "{}{:.2},{:.2}", if i == 0 { "M" } else { " L" }, x(i), canvas.y(*m));
        }
        canvas.push(format!(r#"<path d="{path}" fill="none" stroke="{c}" stroke-width="1.5"/>"#));
        for (i, (m, s)) in means.iter().zip(sds).enumerate() {
            canvas.push(format!(
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{c}" stroke-opacity="0.5"/>"#,
                x(i),
                canvas.y(m - s),
                x(i),
                canvas.y(m + s)
            ));
            canvas.push(format!(r#"<circle cx="{:.2}" cy="{:.2}" r="2" fill="{c}"/>"#, x(i), canvas.y(*m)));
        }
    }
    canvas.legend(&labels);
    Ok((
        canvas.finish(),
        PlotSummary {
            series: labels,
            positions: systems.len(),
        },
    ))
}

/// Grouped bars: `groups[g][s]` is the height of series `s` at position `g`.
fn bars(title: &str, group_labels: Vec<String>, series: Vec<String>, groups: Vec<Vec<f64>>) -> (String, PlotSummary) {
    let y_max = groups.iter().flatten().copied().fold(0.0, f64::max);
    let mut canvas = Canvas::new(y_max);
    let step = canvas.plot_width() / groups.len() as f64;
    let bar = step * 0.8 / series.len() as f64;
    let x_labels: Vec<(f64, String)> = group_labels
        .into_iter()
        .enumerate()
        .map(|(g, l)| (LEFT + step * (g as f64 + 0.5), l))
        .collect();
    canvas.axes(title, &x_labels);
    for (g, heights) in groups.iter().enumerate() {
        for (s, h) in heights.iter().enumerate() {
            let x = LEFT + step * g as f64 + step * 0.1 + bar * s as f64;
            let y = canvas.y(*h);
            canvas.push(format!(
                r#"<rect x="{x:.2}" y="{y:.2}" width="{bar:.2}" height="{:.2}" fill="{}"/>"#,
                HEIGHT - BOTTOM - y,
                color(s)
            ));
        }
    }
    canvas.legend(&series);
    let positions = groups.len();
    (canvas.finish(), PlotSummary { series, positions })
}

fn ranks(table: &Table) -> Result<(String, PlotSummary)> {
    let name = table.column("series")?;
    let positions = ["smallest", "second", "largest"];
    let columns: Vec<Vec<f64>> = positions.iter().map(|p| table.floats(p)).collect::<Result<_>>()?;
    let series: Vec<String> = table.rows.iter().map(|r| r[name].clone()).collect();
    let groups = (0..positions.len())
        .map(|p| (0..series.len()).map(|s| columns[p][s]).collect())
        .collect();
    Ok(bars(
        "Rank frequencies",
        positions.iter().map(|p| p.to_string()).collect(),
        series,
        groups,
    ))
}

fn hist(table: &Table) -> Result<(String, PlotSummary)> {
    let starts = table.floats("bin_start")?;
    let ends = table.floats("bin_end")?;
    let series: Vec<String> = table.columns.iter().filter(|c| !c.starts_with("bin_")).cloned().collect();
    if series.is_empty() {
        return Err(GameError::Input("histogram CSV has no count columns".into()));
    }
    let counts: Vec<Vec<f64>> = series.iter().map(|s| table.floats(s)).collect::<Result<_>>()?;
    let groups = (0..starts.len())
        .map(|b| counts.iter().map(|c| c[b]).collect())
        .collect();
    let labels = starts
        .iter()
        .zip(&ends)
        .map(|(a, b)| format!("[{}, {})", report::format_float(*a), report::format_float(*b)))
        .collect();
    Ok(bars("Histogram of mean l1 distances", labels, series, groups))
}

/// Renders `table` as SVG text.
pub fn render(table: &Table, kind: PlotKind) -> Result<(String, PlotSummary)> {
    if table.rows.is_empty() {
        return Err(GameError::Input("CSV has no data rows".into()));
    }
    match kind {
        PlotKind::Lines => lines(table),
        PlotKind::Ranks => ranks(table),
        PlotKind::Hist => hist(table),
    }
}

/// Reads `csv`, renders it and writes `svg`. Nothing is written on error.
pub fn emit_plot(csv: impl AsRef<Path>, kind: PlotKind, svg: impl AsRef<Path>) -> Result<PlotSummary> {
    let table = Table::read(csv)?;
    let (text, summary) = render(&table, kind)?;
    report::write_text(svg, &text)?;
    Ok(summary)
}
