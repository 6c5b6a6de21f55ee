//! CSV reports for census, experiments and axiom audits.

use std::fs;
use std::path::Path;

use crate::axioms::AxiomReport;
use crate::error::{GameError, Result};
use crate::experiments::{CensusRow, DifferenceReport, Histogram, RankFrequency};

/// Provenance written as `#` comment lines at the top of every output file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Header {
    pub tool: String,
    pub version: String,
    pub command_line: String,
    pub seed: Option<u64>,
}

impl Header {
    pub fn new(command_line: impl Into<String>, seed: Option<u64>) -> Self {
        Header {
            tool: "udvalue".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command_line: command_line.into(),
            seed,
        }
    }

    pub fn lines(&self) -> Vec<String> {
        vec![
            format!("{} {}", self.tool, self.version),
            format!("command: {}", self.command_line),
            match self.seed {
                Some(s) => format!("seed: {s}"),
                None => "seed: none".into(),
            },
        ]
    }

    fn write(&self, out: &mut String) {
        for line in self.lines() {
            out.push_str("# ");
            out.push_str(&line);
            out.push('\n');
        }
    }
}

/// `x` with 12 significant digits, in the style of C's `%.12g`.
pub fn format_float(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exponent) = sci.split_once('e').expect("exponent present");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    if !(-4..DIGITS).contains(&exponent) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exponent < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exponent.abs())
    } else {
        let decimals = (DIGITS - 1 - exponent).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn push_row(out: &mut String, fields: &[String]) {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    writer.write_record(fields).expect("in-memory write");
    let bytes = writer.into_inner().expect("in-memory flush");
    out.push_str(std::str::from_utf8(&bytes).expect("utf-8 fields"));
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

pub const CENSUS_COLUMNS: [&str; 8] = [
    "n",
    "total",
    "ic_count",
    "ic_prop",
    "unique_nonic_count",
    "unique_nonic_prop",
    "samples",
    "seed",
];

pub fn census_csv(rows: &[CensusRow], header: &Header) -> String {
    let mut out = String::new();
    header.write(&mut out);
    push_row(&mut out, &strings(&CENSUS_COLUMNS));
    for r in rows {
        push_row(
            &mut out,
            &[
                r.n.to_string(),
                r.total.to_string(),
                r.ic_count.to_string(),
                format_float(r.ic_prop()),
                r.unique_nonic_count.to_string(),
                format_float(r.unique_nonic_prop()),
                r.samples.map_or(String::new(), |s| s.to_string()),
                r.seed.map_or(String::new(), |s| s.to_string()),
            ],
        );
    }
    out
}

/// Column names of a difference report: `system`, then `mean_X,sd_X` per series.
pub fn difference_columns(report: &DifferenceReport) -> Vec<String> {
    let mut cols = vec!["system".to_string()];
    for label in report.labels() {
        cols.push(format!("mean_{label}"));
        cols.push(format!("sd_{label}"));
    }
    cols
}

pub fn difference_csv(report: &DifferenceReport, header: &Header) -> String {
    let mut out = String::new();
    header.write(&mut out);
    out.push_str(&format!("# games per system: {}\n", report.rows.first().map_or(0, |r| r.games)));
    for (system, err) in &report.skipped {
        out.push_str(&format!("# skipped {}: {}\n", system.mask(), err.code()));
    }
    push_row(&mut out, &difference_columns(report));
    for row in &report.rows {
        let mut fields = vec![row.system.mask().to_string()];
        for s in &row.series {
            fields.push(format_float(s.mean));
            fields.push(format_float(s.sd));
        }
        push_row(&mut out, &fields);
    }
    out
}

pub const RANK_COLUMNS: [&str; 4] = ["series", "smallest", "second", "largest"];

pub fn rank_csv(ranks: &RankFrequency, header: &Header) -> String {
    let mut out = String::new();
    header.write(&mut out);
    out.push_str(&format!("# systems: {}, with ties: {}\n", ranks.systems, ranks.tied_systems));
    push_row(&mut out, &strings(&RANK_COLUMNS));
    for (label, counts) in ranks.labels.iter().zip(&ranks.counts) {
        let mut fields = vec![label.to_string()];
        fields.extend(counts.iter().map(|c| c.to_string()));
        push_row(&mut out, &fields);
    }
    out
}

pub fn histogram_csv(hist: &Histogram, header: &Header) -> String {
    let mut out = String::new();
    header.write(&mut out);
    out.push_str(&format!("# clipped to edge bins: {}\n", hist.clipped));
    let mut cols = strings(&["bin_start", "bin_end"]);
    cols.extend(hist.labels.iter().map(|l| l.to_string()));
    push_row(&mut out, &cols);
    for b in 0..hist.bins() {
        let mut fields = vec![format_float(hist.bin_start(b)), format_float(hist.bin_start(b + 1))];
        fields.extend(hist.counts.iter().map(|c| c[b].to_string()));
        push_row(&mut out, &fields);
    }
    out
}

pub const AUDIT_COLUMNS: [&str; 5] = ["axiom", "kind", "status", "witness", "gap"];

/// One line per report; `source` names the audited game (usually its path).
pub fn audit_csv(reports: &[AxiomReport], source: &str, header: &Header) -> String {
    let mut out = String::new();
    header.write(&mut out);
    push_row(&mut out, &strings(&AUDIT_COLUMNS));
    for r in reports {
        let (witness, gap) = match (&r.witness, &r.reason) {
            (_, Some(reason)) => (format!("{source}; {reason}"), String::new()),
            (Some(w), None) => {
                let masks: Vec<String> = w.coalitions.iter().map(|c| c.mask().to_string()).collect();
                (
                    format!(
                        "{source}; {}; masks [{}]; {} vs {}",
                        w.description,
                        masks.join(" "),
                        w.left,
                        w.right
                    ),
                    format_float(w.gap),
                )
            }
            (None, None) => (format!("{source}; nothing to compare"), String::new()),
        };
        push_row(
            &mut out,
            &[r.axiom.to_string(), r.kind.to_string(), r.status.to_string(), witness, gap],
        );
    }
    out
}

/// A parsed CSV file with its comment lines removed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn parse(text: &str) -> Result<Table> {
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .flexible(false)
            .from_reader(text.as_bytes());
        let columns: Vec<String> = reader
            .headers()
            .map_err(|e| GameError::Input(format!("bad CSV header: {e}")))?
            .iter()
            .map(str::to_string)
            .collect();
        if columns.is_empty() || columns.iter().all(String::is_empty) {
            return Err(GameError::Input("CSV has no header row".into()));
        }
        let rows = reader
            .records()
            .map(|r| {
                r.map(|rec| rec.iter().map(str::to_string).collect())
                    .map_err(|e| GameError::Input(format!("bad CSV row: {e}")))
            })
            .collect::<Result<Vec<Vec<String>>>>()?;
        Ok(Table { columns, rows })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Table> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|e| GameError::Input(format!("cannot read {}: {e}", path.display())))?;
        Table::parse(&text)
    }

    pub fn column(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| GameError::Input(format!("missing column '{name}'")))
    }

    /// Column `name` parsed as floats.
    pub fn floats(&self, name: &str) -> Result<Vec<f64>> {
        let k = self.column(name)?;
        self.rows
            .iter()
            .map(|r| {
                r[k].parse::<f64>()
                    .map_err(|_| GameError::Input(format!("column '{name}' holds non-numeric '{}'", r[k])))
            })
            .collect()
    }
}

pub fn write_text(path: impl AsRef<Path>, text: &str) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, text).map_err(|e| GameError::Input(format!("cannot write {}: {e}", path.display())))
}
