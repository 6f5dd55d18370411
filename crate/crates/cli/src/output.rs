//! CSV output with a `#`-prefixed metadata header.

use std::io::Write;

use dotspin::TimeSeries;

use crate::error::CliError;

/// Writes `# key = value` lines (sorted by key) followed by the CSV table.
pub fn write_csv<W: Write>(series: &TimeSeries, mut out: W) -> Result<(), CliError> {
    let mut header = String::new();
    for (k, v) in series.metadata() {
        header.push_str(&format!("# {k} = {v}\n"));
    }
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(series.columns())?;
    for row in series.rows() {
        writer.write_record(row.iter().map(|v| v.to_string()))?;
    }
    let body = writer.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
    out.write_all(header.as_bytes()).and_then(|_| out.write_all(&body)).map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_precedes_table() {
        let mut ts = TimeSeries::new(["t", "x"]).unwrap();
        ts.set_meta("b", 2);
        ts.set_meta("a", "one");
        ts.push(vec![0.0, 0.5]).unwrap();
        ts.push(vec![1.0, -1e-20]).unwrap();
        let mut buf = Vec::new();
        write_csv(&ts, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "# a = one\n# b = 2\nt,x\n0,0.5\n1,-0.00000000000000000001\n");
    }
}
