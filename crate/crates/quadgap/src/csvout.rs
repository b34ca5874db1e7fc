//! CSV tables preceded by `#` lines carrying the run configuration.

use std::io::Write;

use quadgap_core::growth::GrowthRow;

/// Writes `# key: value` lines for every top-level config field, then the table.
pub fn write_table<W: Write>(
    mut out: W,
    config: &serde_json::Value,
    header: &[&str],
    rows: &[Vec<String>],
) -> anyhow::Result<()> {
    if let Some(map) = config.as_object() {
        for (k, v) in map {
            writeln!(out, "# {k}: {v}")?;
        }
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Undefined values become empty cells.
pub fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub const GROWTH_HEADER: [&str; 4] = ["x", "achieved", "comparator", "ratio"];

pub fn growth_rows(rows: &[GrowthRow]) -> Vec<Vec<String>> {
    rows.iter()
        .map(|r| vec![r.x.to_string(), r.achieved.to_string(), opt(r.comparator), opt(r.ratio)])
        .collect()
}

/// Reads back a table written by [`write_table`], skipping the comment lines.
pub fn read_table(text: &str) -> anyhow::Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let header = r.headers()?.iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.map(|r| r.iter().map(String::from).collect())).collect::<Result<_, _>>()?;
    Ok((header, rows))
}
