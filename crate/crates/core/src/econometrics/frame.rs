use std::path::Path;

use crate::corpus::Quarter;
use crate::error::{Error, Result};

/// One named series; missing observations are NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub values: Vec<f64>,
    /// Treated as I(1) (detrended, differenced and re-accumulated) by the
    /// block bootstrap.
    pub integrated: bool,
}

/// Named columns over consecutive quarters.
#[derive(Debug, Clone, PartialEq)]
pub struct TsFrame {
    pub index: Vec<Quarter>,
    pub columns: Vec<Column>,
}

impl TsFrame {
    pub fn new(index: Vec<Quarter>) -> Result<Self> {
        if index.windows(2).any(|w| w[1].ordinal() != w[0].ordinal() + 1) {
            return Err(Error::InvalidInput("frame index must be consecutive quarters".into()));
        }
        Ok(Self { index, columns: Vec::new() })
    }

    /// `len` consecutive quarters starting at `start`.
    pub fn with_length(start: Quarter, len: usize) -> Self {
        let mut index = Vec::with_capacity(len);
        let mut q = start;
        for _ in 0..len {
            index.push(q);
            q = q.next();
        }
        Self { index, columns: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn push(&mut self, name: impl Into<String>, values: Vec<f64>, integrated: bool) -> Result<()> {
        let name = name.into();
        if values.len() != self.len() {
            return Err(Error::InvalidInput(format!(
                "column `{name}` has {} values, frame has {} rows",
                values.len(),
                self.len()
            )));
        }
        if self.position(&name).is_some() {
            return Err(Error::InvalidInput(format!("duplicate column `{name}`")));
        }
        self.columns.push(Column { name, values, integrated });
        Ok(())
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn column(&self, name: &str) -> Result<&[f64]> {
        self.position(name)
            .map(|i| self.columns[i].values.as_slice())
            .ok_or_else(|| Error::InvalidInput(format!("no column named `{name}`")))
    }

    pub fn names(&self) -> Vec<&str> {
        self.columns.iter().map(|c| c.name.as_str()).collect()
    }

    /// Copies the named columns of `other` onto this frame's index, matching
    /// by quarter; quarters absent from `other` become missing.
    pub fn merge(&mut self, other: &TsFrame, names: &[&str]) -> Result<()> {
        let offset = |q: Quarter| -> Option<usize> {
            let first = other.index.first()?;
            let i = q.ordinal() - first.ordinal();
            (0..other.len() as i64).contains(&i).then_some(i as usize)
        };
        let rows: Vec<Option<usize>> = self.index.iter().map(|&q| offset(q)).collect();
        for name in names {
            let i = other
                .position(name)
                .ok_or_else(|| Error::InvalidInput(format!("no column named `{name}`")))?;
            let src = &other.columns[i];
            let values = rows.iter().map(|r| r.map_or(f64::NAN, |t| src.values[t])).collect();
            self.push(src.name.clone(), values, src.integrated)?;
        }
        Ok(())
    }

    /// Sets the integration flag of the named columns and clears all others.
    pub fn set_integrated(&mut self, names: &[String]) -> Result<()> {
        for n in names {
            if self.position(n).is_none() {
                return Err(Error::InvalidInput(format!("no column named `{n}`")));
            }
        }
        for c in &mut self.columns {
            c.integrated = names.contains(&c.name);
        }
        Ok(())
    }

    /// Header `quarter,<names…>`; empty fields are missing.
    pub fn from_csv_str(text: &str, context: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let header = reader.headers().map_err(|e| Error::parse(context, e))?.clone();
        if header.get(0) != Some("quarter") {
            return Err(Error::parse(context, "first column must be `quarter`"));
        }
        let names: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        let mut index = Vec::new();
        let mut cols: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
        for (row, rec) in reader.records().enumerate() {
            let ctx = || format!("{context}: row {}", row + 2);
            let rec = rec.map_err(|e| Error::parse(ctx(), e))?;
            if rec.len() != names.len() + 1 {
                return Err(Error::parse(ctx(), format!("expected {} fields", names.len() + 1)));
            }
            index.push(rec[0].parse::<Quarter>().map_err(|e| Error::parse(ctx(), e))?);
            for (c, field) in cols.iter_mut().zip(rec.iter().skip(1)) {
                c.push(if field.is_empty() {
                    f64::NAN
                } else {
                    field.parse().map_err(|e| Error::parse(ctx(), format!("`{field}`: {e}")))?
                });
            }
        }
        let mut frame = Self::new(index).map_err(|e| Error::parse(context, e))?;
        for (name, values) in names.into_iter().zip(cols) {
            frame.push(name, values, false)?;
        }
        Ok(frame)
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_str(&text, &path.display().to_string())
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("quarter");
        for c in &self.columns {
            out.push(',');
            out.push_str(&c.name);
        }
        out.push('\n');
        for (t, q) in self.index.iter().enumerate() {
            out.push_str(&q.to_string());
            for c in &self.columns {
                out.push(',');
                out.push_str(&format_value(c.values[t]));
            }
            out.push('\n');
        }
        out
    }
}

/// Shortest round-trip representation; missing values become empty.
pub fn format_value(x: f64) -> String {
    if x.is_finite() {
        format!("{x}")
    } else {
        String::new()
    }
}

/// `out[t] = x[t − j]`; negative `j` leads the series. Positions without a
/// source observation are NaN.
pub fn shift(x: &[f64], j: isize) -> Vec<f64> {
    let n = x.len() as isize;
    (0..n)
        .map(|t| {
            let s = t - j;
            if (0..n).contains(&s) {
                x[s as usize]
            } else {
                f64::NAN
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_with_missing() {
        let text = "quarter,a,b\n1990Q4,1.5,\n1991Q1,-2,3\n";
        let f = TsFrame::from_csv_str(text, "t").unwrap();
        assert_eq!(f.len(), 2);
        assert!(f.column("b").unwrap()[0].is_nan());
        assert_eq!(f.to_csv_string(), text);
    }

    #[test]
    fn merge_aligns_by_quarter() {
        let mut a = TsFrame::from_csv_str("quarter,x\n1990Q3,1\n1990Q4,2\n1991Q1,3\n", "a").unwrap();
        let b = TsFrame::from_csv_str("quarter,y\n1990Q4,20\n1991Q1,30\n1991Q2,40\n", "b").unwrap();
        a.merge(&b, &["y"]).unwrap();
        let y = a.column("y").unwrap();
        assert!(y[0].is_nan());
        assert_eq!(&y[1..], &[20.0, 30.0]);
        assert!(a.merge(&b, &["z"]).is_err());
    }

    #[test]
    fn gaps_and_bad_headers_rejected() {
        assert!(TsFrame::from_csv_str("quarter,a\n1990Q1,1\n1990Q3,2\n", "t").is_err());
        assert!(TsFrame::from_csv_str("date,a\n1990Q1,1\n", "t").is_err());
        assert!(TsFrame::from_csv_str("quarter,a\n1990Q1,x\n", "t").is_err());
    }

    #[test]
    fn shifting() {
        let x = [1.0, 2.0, 3.0];
        let lag = shift(&x, 1);
        assert!(lag[0].is_nan());
        assert_eq!(&lag[1..], &[1.0, 2.0]);
        let lead = shift(&x, -2);
        assert_eq!(lead[0], 3.0);
        assert!(lead[1].is_nan() && lead[2].is_nan());
    }

    #[test]
    fn columns_must_match_length() {
        let mut f = TsFrame::with_length(Quarter { year: 2000, q: 3 }, 3);
        assert_eq!(f.index[2], Quarter { year: 2001, q: 1 });
        assert!(f.push("x", vec![1.0; 2], false).is_err());
        f.push("x", vec![1.0; 3], true).unwrap();
        assert!(f.push("x", vec![1.0; 3], true).is_err());
        f.set_integrated(&[]).unwrap();
        assert!(!f.columns[0].integrated);
    }
}
