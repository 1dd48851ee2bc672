//! CSV tables with a comment preamble:
//!
//! ```text
//! # hawkes-longrange v0.1.0 seed=7 config-hash=3f2a…
//! # alpha = 1.5
//! t,site,mean,…
//! ```
//!
//! Reals are written with 17 significant digits so they parse back bit-exactly.

use std::path::Path;

use crate::error::{Error, Result};
use crate::experiments::{ConvergenceTable, TableRow};
use crate::simulator::EventLog;

const TOOL: &str = "hawkes-longrange";
const NOTE_PREFIX: &str = "note.";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Metadata {
    pub version: String,
    pub seed: u64,
    pub config_hash: String,
    /// Free-form `key = value` lines following the first line.
    pub echo: Vec<String>,
}

impl Metadata {
    pub fn new(seed: u64, config_hash: impl Into<String>) -> Self {
        Metadata {
            version: env!("CARGO_PKG_VERSION").to_owned(),
            seed,
            config_hash: config_hash.into(),
            echo: Vec::new(),
        }
    }

    pub fn with_echo(mut self, lines: Vec<String>) -> Self {
        self.echo = lines;
        self
    }

    pub fn first_line(&self) -> String {
        format!(
            "{TOOL} v{} seed={} config-hash={}",
            self.version, self.seed, self.config_hash
        )
    }

    fn preamble(&self) -> String {
        let mut s = format!("# {}\n", self.first_line());
        for line in &self.echo {
            s.push_str("# ");
            s.push_str(line);
            s.push('\n');
        }
        s
    }

    fn parse(lines: &[&str]) -> Result<Self> {
        let first = lines
            .first()
            .ok_or_else(|| Error::Data("missing metadata line".into()))?;
        let bad = || Error::Data(format!("malformed metadata line {first:?}"));
        let rest = first.strip_prefix(TOOL).ok_or_else(bad)?.trim();
        let mut parts = rest.split_whitespace();
        let version = parts
            .next()
            .and_then(|v| v.strip_prefix('v'))
            .ok_or_else(bad)?;
        let seed = parts
            .next()
            .and_then(|v| v.strip_prefix("seed="))
            .and_then(|v| v.parse().ok())
            .ok_or_else(bad)?;
        let hash = parts
            .next()
            .and_then(|v| v.strip_prefix("config-hash="))
            .ok_or_else(bad)?;
        Ok(Metadata {
            version: version.to_owned(),
            seed,
            config_hash: hash.to_owned(),
            echo: lines[1..].iter().map(|s| s.to_string()).collect(),
        })
    }
}

/// Round-trip decimal form of a real.
pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

/// A parsed CSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvFile {
    pub metadata: Metadata,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvFile {
    pub fn column(&self, name: &str) -> Result<usize> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Data(format!("no column {name:?} in {:?}", self.header)))
    }

    pub fn reals(&self, name: &str) -> Result<Vec<f64>> {
        let k = self.column(name)?;
        self.rows
            .iter()
            .map(|r| {
                r[k].parse()
                    .map_err(|e| Error::Data(format!("column {name}: {:?}: {e}", r[k])))
            })
            .collect()
    }
}

pub fn render_csv<I>(meta: &Metadata, header: &[&str], rows: I) -> Result<String>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let data = |e: csv::Error| Error::Data(format!("csv encoding: {e}"));
    w.write_record(header).map_err(data)?;
    for row in rows {
        w.write_record(&row).map_err(data)?;
    }
    let body = w
        .into_inner()
        .map_err(|e| Error::Data(format!("csv encoding: {e}")))?;
    let mut out = meta.preamble();
    out.push_str(&String::from_utf8(body).expect("csv output is UTF-8"));
    Ok(out)
}

pub fn write_csv<I>(path: &Path, meta: &Metadata, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let text = render_csv(meta, header, rows)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn parse_csv(text: &str) -> Result<CsvFile> {
    let mut comments = Vec::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        match line.strip_prefix('#') {
            Some(c) => {
                comments.push(c.trim());
                offset += line.len();
            }
            None => break,
        }
    }
    let metadata = Metadata::parse(&comments)?;
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(&text.as_bytes()[offset..]);
    let data = |e: csv::Error| Error::Data(format!("csv decoding: {e}"));
    let header = r
        .headers()
        .map_err(data)?
        .iter()
        .map(str::to_owned)
        .collect();
    let rows = r
        .records()
        .map(|rec| {
            rec.map(|r| r.iter().map(str::to_owned).collect())
                .map_err(data)
        })
        .collect::<Result<_>>()?;
    Ok(CsvFile {
        metadata,
        header,
        rows,
    })
}

pub fn read_csv(path: &Path) -> Result<CsvFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_csv(&text)
}

pub const CONVERGENCE_HEADER: [&str; 8] = [
    "t",
    "site",
    "mean",
    "estimate",
    "theory",
    "abs_err",
    "mc_stderr",
    "flagged",
];

pub fn render_convergence(table: &ConvergenceTable, meta: &Metadata) -> Result<String> {
    let mut meta = meta.clone();
    meta.echo.extend(
        table
            .notes
            .iter()
            .map(|(k, v)| format!("{NOTE_PREFIX}{k} = {v}")),
    );
    let rows = table.rows.iter().map(|r| {
        vec![
            real(r.t),
            r.site.to_string(),
            real(r.mean),
            real(r.estimate),
            real(r.theory),
            real(r.abs_err),
            real(r.mc_stderr),
            r.flagged.to_string(),
        ]
    });
    render_csv(&meta, &CONVERGENCE_HEADER, rows)
}

pub fn write_convergence(table: &ConvergenceTable, path: &Path, meta: &Metadata) -> Result<()> {
    let text = render_convergence(table, meta)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Inverse of [`render_convergence`]: note lines go back into the table.
pub fn parse_convergence(text: &str) -> Result<(Metadata, ConvergenceTable)> {
    let mut file = parse_csv(text)?;
    if file.header != CONVERGENCE_HEADER {
        return Err(Error::Data(format!(
            "not a convergence table: header {:?}",
            file.header
        )));
    }
    let mut notes = Vec::new();
    file.metadata.echo.retain(|line| {
        match line
            .strip_prefix(NOTE_PREFIX)
            .and_then(|l| l.split_once(" = "))
        {
            Some((k, v)) => {
                notes.push((k.to_owned(), v.to_owned()));
                false
            }
            None => true,
        }
    });
    let f = |s: &str| {
        s.parse::<f64>()
            .map_err(|e| Error::Data(format!("{s:?}: {e}")))
    };
    let rows = file
        .rows
        .iter()
        .map(|r| {
            Ok(TableRow {
                t: f(&r[0])?,
                site: r[1]
                    .parse()
                    .map_err(|e| Error::Data(format!("{:?}: {e}", r[1])))?,
                mean: f(&r[2])?,
                estimate: f(&r[3])?,
                theory: f(&r[4])?,
                abs_err: f(&r[5])?,
                mc_stderr: f(&r[6])?,
                flagged: r[7]
                    .parse()
                    .map_err(|e| Error::Data(format!("{:?}: {e}", r[7])))?,
            })
        })
        .collect::<Result<_>>()?;
    Ok((file.metadata, ConvergenceTable { rows, notes }))
}

pub fn read_convergence(path: &Path) -> Result<(Metadata, ConvergenceTable)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_convergence(&text)
}

/// Event log rows (site label, time), sorted by site then time.
pub fn render_events(log: &EventLog, meta: &Metadata) -> Result<String> {
    let l = (log.sites() / 2) as i64;
    let rows = log
        .rows()
        .map(|(site, t)| vec![(site as i64 - l).to_string(), real(t)]);
    render_csv(meta, &["site", "time"], rows)
}

pub fn write_events(log: &EventLog, path: &Path, meta: &Metadata) -> Result<()> {
    let text = render_events(log, meta)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Reads an event log back for a window of `2L + 1` sites.
pub fn read_events(path: &Path, horizon: f64, half_width: usize) -> Result<(Metadata, EventLog)> {
    let file = read_csv(path)?;
    let (s, t) = (file.column("site")?, file.column("time")?);
    let mut events = vec![Vec::new(); 2 * half_width + 1];
    for row in &file.rows {
        let label: i64 = row[s]
            .parse()
            .map_err(|e| Error::Data(format!("{:?}: {e}", row[s])))?;
        let time: f64 = row[t]
            .parse()
            .map_err(|e| Error::Data(format!("{:?}: {e}", row[t])))?;
        let index = label + half_width as i64;
        if !(0..events.len() as i64).contains(&index) {
            return Err(Error::Data(format!(
                "site {label} outside the window ±{half_width}"
            )));
        }
        events[index as usize].push(time);
    }
    Ok((file.metadata, EventLog::new(horizon, events)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta() -> Metadata {
        Metadata::new(7, "00ff00ff00ff00ff").with_echo(vec!["alpha = 1.5".into()])
    }

    #[test]
    fn empty_table_is_preamble_and_header() {
        let text = render_convergence(&ConvergenceTable::default(), &meta()).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(
            lines[0],
            format!(
                "# hawkes-longrange v{} seed=7 config-hash=00ff00ff00ff00ff",
                env!("CARGO_PKG_VERSION")
            )
        );
        assert_eq!(lines[2], CONVERGENCE_HEADER.join(","));
    }

    #[test]
    fn convergence_round_trip_is_exact() {
        let table = ConvergenceTable {
            rows: vec![
                TableRow {
                    t: 0.1,
                    site: -3,
                    mean: 1.0 / 3.0,
                    estimate: std::f64::consts::PI,
                    theory: 2.0,
                    abs_err: 5e-324,
                    mc_stderr: 1.234_567_890_123_456_7e-200,
                    flagged: true,
                },
                TableRow {
                    t: 200.0,
                    site: 64,
                    mean: f64::MAX,
                    estimate: 0.0,
                    theory: -0.0,
                    abs_err: 1e300,
                    mc_stderr: 0.0,
                    flagged: false,
                },
            ],
            notes: vec![("theta".into(), "1".into())],
        };
        let text = render_convergence(&table, &meta()).unwrap();
        let (m, back) = parse_convergence(&text).unwrap();
        assert_eq!(m, meta());
        assert_eq!(back, table);
        for (a, b) in back.rows.iter().zip(&table.rows) {
            assert_eq!(a.mean.to_bits(), b.mean.to_bits());
            assert_eq!(a.theory.to_bits(), b.theory.to_bits());
        }
    }

    #[test]
    fn events_round_trip() {
        let log = EventLog::new(2.0, vec![vec![0.25], vec![], vec![1.0 / 3.0, 1.5]]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("events.csv");
        write_events(&log, &path, &meta()).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("\n-1,2.5000000000000000e-1\n"));
        let (_, back) = read_events(&path, 2.0, 1).unwrap();
        assert_eq!(back, log);
    }

    #[test]
    fn io_errors_carry_path() {
        let err = read_csv(Path::new("/nonexistent/table.csv")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/table.csv"));
    }
}
