use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Observable values on a time grid: raw and mitigated estimates with
/// uncertainties, and an optional exact reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub raw: Vec<f64>,
    pub raw_sigma: Vec<f64>,
    pub mitigated: Vec<f64>,
    pub mitigated_sigma: Vec<f64>,
    pub exact: Option<Vec<f64>>,
}

impl TimeSeries {
    pub fn validate(&self) -> Result<()> {
        let m = self.times.len();
        let lens = [
            self.raw.len(),
            self.raw_sigma.len(),
            self.mitigated.len(),
            self.mitigated_sigma.len(),
        ];
        if lens.iter().any(|&l| l != m) || self.exact.as_ref().is_some_and(|e| e.len() != m) {
            return Err(Error::arg("time series columns differ in length"));
        }
        if self.times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::arg("times must be strictly increasing"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    fn l2(values: &[f64], exact: &[f64]) -> f64 {
        values
            .iter()
            .zip(exact)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// L2 distance of the raw column to the exact one.
    pub fn raw_distance(&self) -> Option<f64> {
        self.exact.as_ref().map(|e| Self::l2(&self.raw, e))
    }

    pub fn mitigated_distance(&self) -> Option<f64> {
        self.exact.as_ref().map(|e| Self::l2(&self.mitigated, e))
    }

    /// CSV with columns `t, raw, raw_sigma, mitigated, mitigated_sigma,
    /// exact`; `comments` are written first as `# ` lines.
    pub fn write_csv<W: Write>(&self, out: W, comments: &[String]) -> Result<()> {
        self.validate()?;
        let mut out = out;
        for c in comments {
            writeln!(out, "# {c}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        let err = |e: csv::Error| Error::Format(e.to_string());
        w.write_record([
            "t",
            "raw",
            "raw_sigma",
            "mitigated",
            "mitigated_sigma",
            "exact",
        ])
        .map_err(err)?;
        for i in 0..self.len() {
            let exact = self
                .exact
                .as_ref()
                .map(|e| format!("{:.12}", e[i]))
                .unwrap_or_default();
            w.write_record([
                format!("{:.6}", self.times[i]),
                format!("{:.12}", self.raw[i]),
                format!("{:.12}", self.raw_sigma[i]),
                format!("{:.12}", self.mitigated[i]),
                format!("{:.12}", self.mitigated_sigma[i]),
                exact,
            ])
            .map_err(err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(input);
        let mut ts = TimeSeries {
            times: vec![],
            raw: vec![],
            raw_sigma: vec![],
            mitigated: vec![],
            mitigated_sigma: vec![],
            exact: Some(vec![]),
        };
        let mut any_missing = false;
        for (i, row) in rdr.records().enumerate() {
            let row = row.map_err(|e| Error::Format(e.to_string()))?;
            let field = |k: usize| -> Result<f64> {
                row.get(k)
                    .ok_or_else(|| Error::parse(i + 2, "missing column"))?
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(i + 2, format!("bad number in column {k}")))
            };
            ts.times.push(field(0)?);
            ts.raw.push(field(1)?);
            ts.raw_sigma.push(field(2)?);
            ts.mitigated.push(field(3)?);
            ts.mitigated_sigma.push(field(4)?);
            match row.get(5).map(str::trim) {
                Some(s) if !s.is_empty() => {
                    let v = s
                        .parse()
                        .map_err(|_| Error::parse(i + 2, "bad exact value"))?;
                    ts.exact.as_mut().expect("present").push(v);
                }
                _ => any_missing = true,
            }
        }
        if any_missing {
            ts.exact = None;
        }
        ts.validate()?;
        Ok(ts)
    }
}
