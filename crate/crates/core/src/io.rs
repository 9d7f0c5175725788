//! CSV tables and number formatting shared by the readers and the CLI.

use crate::error::{Error, Result};

/// Numeric table with `#` comment lines kept aside.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Comment lines with the leading `#` and whitespace removed.
    pub comments: Vec<String>,
}

impl Table {
    pub fn expect_header(&self, cols: &[&str]) -> Result<()> {
        if self.header.len() != cols.len() || self.header.iter().zip(cols).any(|(h, c)| h != c) {
            return Err(Error::Parse(format!(
                "expected columns [{}], found [{}]",
                cols.join(","),
                self.header.join(",")
            )));
        }
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

fn comments_of(text: &str) -> Vec<String> {
    text.lines()
        .filter_map(|l| l.trim_start().strip_prefix('#'))
        .map(|c| c.trim().to_string())
        .collect()
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}

/// Read a header row followed by numeric rows.
pub fn read_table(text: &str) -> Result<Table> {
    let mut rdr = reader(text);
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::Parse(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(Error::Parse("missing header row".into()));
    }
    let mut rows = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        let row = rec
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .ok()
                    .filter(|v| !v.is_nan())
                    .ok_or_else(|| Error::Parse(format!("row {}: not a number: {f:?}", k + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(Table {
        header,
        rows,
        comments: comments_of(text),
    })
}

/// Read a header row followed by string records.
pub fn read_records(text: &str) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut rdr = reader(text);
    let header = rdr
        .headers()
        .map_err(|e| Error::Parse(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let rows = rdr
        .records()
        .map(|r| {
            r.map(|rec| rec.iter().map(str::to_string).collect())
                .map_err(|e| Error::Parse(e.to_string()))
        })
        .collect::<Result<_>>()?;
    Ok((header, rows))
}

/// Render a table as CSV with [`fmt_num`] cells.
pub fn write_table(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        let cells: Vec<String> = r.iter().map(|v| fmt_num(*v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Round to 12 significant digits, then print the shortest decimal that
/// reads back to that value.
pub fn fmt_num(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() {
            "NaN".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let rounded: f64 = format!("{v:.11e}").parse().expect("formatted float parses");
    let s = format!("{rounded}");
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

/// `v` rounded to 12 significant digits.
pub fn round12(v: f64) -> f64 {
    if v.is_finite() {
        format!("{v:.11e}").parse().expect("formatted float parses")
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(0.1 + 0.2), "0.3");
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(1177.2), "1177.2");
        assert_eq!(fmt_num(123_456_789.123_456_79), "123456789.123");
        assert_eq!(fmt_num(f64::NAN), "NaN");
    }

    #[test]
    fn format_round_trips_within_twelve_digits() {
        for v in [std::f64::consts::PI, 1e-9 / 3.0, 6.02214076e23, -2.5e-300] {
            let back: f64 = fmt_num(v).parse().unwrap();
            assert!(((back - v) / v).abs() < 1e-11);
        }
    }

    #[test]
    fn table_with_comments() {
        let t = read_table("# provenance: bench\n# second\na,b\n1,2\n 3 , 4.5\n").unwrap();
        assert_eq!(t.header, vec!["a", "b"]);
        assert_eq!(t.rows, vec![vec![1.0, 2.0], vec![3.0, 4.5]]);
        assert_eq!(t.comments, vec!["provenance: bench", "second"]);
        assert_eq!(t.column("b").unwrap(), vec![2.0, 4.5]);
        assert!(t.expect_header(&["a", "c"]).is_err());
    }

    #[test]
    fn malformed_tables() {
        assert!(read_table("a,b\n1,x\n").is_err());
        assert!(read_table("a,b\n1,2,3\n").is_err());
        assert!(read_table("a,b\n1,NaN\n").is_err());
        assert_eq!(
            read_table("a,b\n1,-inf\n").unwrap().rows[0][1],
            f64::NEG_INFINITY
        );
        assert!(read_table("").is_err());
    }

    #[test]
    fn write_then_read() {
        let rows = vec![vec![0.1, 2.0 / 3.0], vec![-1e-7, 12.0]];
        let t = read_table(&write_table(&["x", "y"], &rows)).unwrap();
        for (a, b) in rows.iter().flatten().zip(t.rows.iter().flatten()) {
            assert!((a - b).abs() <= 1e-11 * a.abs());
        }
    }
}
