use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Covariate rows plus one output column.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    covariate_names: Vec<String>,
    output_name: String,
    x: Vec<Vec<f64>>,
    y: Vec<f64>,
}

impl Dataset {
    pub fn new(
        covariate_names: Vec<String>,
        output_name: impl Into<String>,
        x: Vec<Vec<f64>>,
        y: Vec<f64>,
    ) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::Specification("dataset has no rows".into()));
        }
        if x.len() != y.len() {
            return Err(Error::Specification(format!(
                "{} covariate rows but {} outputs",
                x.len(),
                y.len()
            )));
        }
        let p = covariate_names.len();
        for (i, row) in x.iter().enumerate() {
            if row.len() != p {
                return Err(Error::Specification(format!(
                    "row {i} has {} covariates, header declares {p}",
                    row.len()
                )));
            }
        }
        if x.iter().flatten().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::Specification(
                "dataset contains missing or non-finite values".into(),
            ));
        }
        Ok(Self {
            covariate_names,
            output_name: output_name.into(),
            x,
            y,
        })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn covariate_names(&self) -> &[String] {
        &self.covariate_names
    }

    pub fn output_name(&self) -> &str {
        &self.output_name
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.covariate_names.iter().position(|c| c == name)
    }

    /// Resolves covariate names to column indices.
    pub fn column_indices(&self, names: &[String]) -> Result<Vec<usize>> {
        names
            .iter()
            .map(|n| {
                self.column_index(n).ok_or_else(|| {
                    Error::Specification(format!(
                        "dataset has no covariate `{n}` (columns: {})",
                        self.covariate_names.join(", ")
                    ))
                })
            })
            .collect()
    }

    /// Same data with rows reordered by `order`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        Self {
            covariate_names: self.covariate_names.clone(),
            output_name: self.output_name.clone(),
            x: order.iter().map(|&i| self.x[i].clone()).collect(),
            y: order.iter().map(|&i| self.y[i]).collect(),
        }
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        if header.len() < 2 {
            return Err(Error::Specification(
                "dataset needs at least one covariate and one output column".into(),
            ));
        }
        let (output, covariates) = header.split_last().expect("len >= 2");
        let mut x = Vec::new();
        let mut y = Vec::new();
        for (i, record) in rdr.records().enumerate() {
            let record = record?;
            let values = record
                .iter()
                .map(|f| {
                    f.parse::<f64>().map_err(|_| Error::Parse {
                        line: i + 2,
                        message: format!("`{f}` is not a number"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let (last, rest) = values.split_last().ok_or_else(|| Error::Parse {
                line: i + 2,
                message: "empty record".into(),
            })?;
            y.push(*last);
            x.push(rest.to_vec());
        }
        Dataset::new(covariates.to_vec(), output.clone(), x, y)
    }

    /// Writes shortest round-trip decimal representations, so reading the
    /// file back gives bit-identical values.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        let mut header = self.covariate_names.clone();
        header.push(self.output_name.clone());
        wtr.write_record(&header)?;
        for (row, y) in self.x.iter().zip(&self.y) {
            let record: Vec<String> = row
                .iter()
                .chain(std::iter::once(y))
                .map(|v| format!("{v:?}"))
                .collect();
            wtr.write_record(&record)?;
        }
        wtr.flush().map_err(|e| Error::io("<dataset>", e))?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Dataset::read_csv(file)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(file)
    }
}
