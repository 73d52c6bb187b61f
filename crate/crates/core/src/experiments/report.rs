//! Comparison and posterior tables as CSV and Markdown.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use super::compare::{ComparisonRow, PosteriorRow};
use crate::error::{Error, Result};
use crate::sampler::Method;

pub const COMPARISON_CSV: &str = "comparison.csv";
pub const COMPARISON_MD: &str = "comparison.md";
pub const POSTERIOR_CSV: &str = "posterior.csv";
pub const POSTERIOR_MD: &str = "posterior.md";

const COMPARISON_HEADER: [&str; 8] = [
    "model",
    "method",
    "prior",
    "sigma",
    "log_z",
    "log_z_err",
    "n_calls",
    "converged",
];

/// Long-format comparison table; a header is written even with no rows.
pub fn write_comparison_csv<W: Write>(rows: &[ComparisonRow], writer: W) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(writer);
    wtr.write_record(COMPARISON_HEADER)?;
    for row in rows {
        wtr.serialize(row)?;
    }
    wtr.flush().map_err(|e| Error::io("<comparison>", e))
}

pub fn read_comparison_csv<R: Read>(reader: R) -> Result<Vec<ComparisonRow>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.iter().ne(COMPARISON_HEADER) {
        return Err(Error::Parse {
            line: 1,
            message: format!(
                "unexpected comparison header `{}`",
                header.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    Ok(rdr.deserialize().collect::<std::result::Result<_, _>>()?)
}

fn methods_present<'a>(methods: impl Iterator<Item = &'a Method>) -> Vec<Method> {
    let seen: Vec<Method> = methods.copied().collect();
    Method::ALL
        .into_iter()
        .filter(|m| seen.contains(m))
        .collect()
}

fn evidence_cell(row: &ComparisonRow) -> String {
    let mark = if row.converged {
        ""
    } else {
        " (not converged)"
    };
    format!("{:.3} ± {:.3}{mark}", row.log_z, row.log_z_err)
}

fn comparison_table(rows: &[&ComparisonRow], out: &mut String) {
    let methods = methods_present(rows.iter().map(|r| &r.method));
    let mut groups: Vec<(&str, &str)> = Vec::new();
    for r in rows {
        if !groups.contains(&(r.model.as_str(), r.prior.as_str())) {
            groups.push((&r.model, &r.prior));
        }
    }
    out.push_str("| Model | Prior |");
    for m in &methods {
        let _ = write!(out, " logZ ({m}) | Fcalls ({m}) |");
    }
    out.push_str("\n|---|---|");
    out.push_str(&"---|---|".repeat(methods.len()));
    out.push('\n');
    for (model, prior) in groups {
        let _ = write!(out, "| {model} | {prior} |");
        for m in &methods {
            match rows
                .iter()
                .find(|r| r.model == model && r.prior == prior && r.method == *m)
            {
                Some(r) => {
                    let _ = write!(out, " {} | {} |", evidence_cell(r), r.n_calls);
                }
                None => out.push_str(" - | - |"),
            }
        }
        out.push('\n');
    }
}

/// Wide Markdown layout: one line per (model, prior), a logZ and an Fcalls
/// column per method, one table per σ treatment.
pub fn comparison_markdown(rows: &[ComparisonRow]) -> String {
    let mut sigmas: Vec<&str> = Vec::new();
    for r in rows {
        if !sigmas.contains(&r.sigma.as_str()) {
            sigmas.push(&r.sigma);
        }
    }
    let mut out = String::new();
    if sigmas.len() <= 1 {
        let all: Vec<&ComparisonRow> = rows.iter().collect();
        comparison_table(&all, &mut out);
        return out;
    }
    for (i, s) in sigmas.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "### sigma = {s}\n");
        let subset: Vec<&ComparisonRow> = rows.iter().filter(|r| r.sigma == *s).collect();
        comparison_table(&subset, &mut out);
    }
    out
}

fn max_params(rows: &[PosteriorRow]) -> usize {
    rows.iter().map(|r| r.mean.len()).max().unwrap_or(0)
}

/// One line per (model, method) with `thetaJ_mean`, `thetaJ_std` columns.
pub fn write_posterior_csv<W: Write>(rows: &[PosteriorRow], writer: W) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new()
        .flexible(false)
        .from_writer(writer);
    let k = max_params(rows);
    let mut header: Vec<String> = ["model", "method", "prior", "sigma"]
        .map(String::from)
        .to_vec();
    for j in 0..k {
        header.push(format!("theta{j}_mean"));
        header.push(format!("theta{j}_std"));
    }
    wtr.write_record(&header)?;
    for r in rows {
        let mut rec = vec![
            r.model.clone(),
            r.method.to_string(),
            r.prior.clone(),
            r.sigma.clone(),
        ];
        for j in 0..k {
            match (r.mean.get(j), r.std.get(j)) {
                (Some(m), Some(s)) => {
                    rec.push(format!("{m:?}"));
                    rec.push(format!("{s:?}"));
                }
                _ => rec.extend([String::new(), String::new()]),
            }
        }
        wtr.write_record(&rec)?;
    }
    wtr.flush().map_err(|e| Error::io("<posterior>", e))
}

/// Markdown posterior table: `mean (std)` per parameter, `-` where a model
/// has fewer parameters.
pub fn posterior_markdown(rows: &[PosteriorRow]) -> String {
    let k = max_params(rows);
    let mut out = String::from("| Model | Method | Prior | Sigma |");
    for j in 0..k {
        let _ = write!(out, " theta{j} |");
    }
    out.push_str("\n|---|---|---|---|");
    out.push_str(&"---|".repeat(k));
    out.push('\n');
    for r in rows {
        let _ = write!(
            out,
            "| {} | {} | {} | {} |",
            r.model, r.method, r.prior, r.sigma
        );
        for j in 0..k {
            match (r.mean.get(j), r.std.get(j)) {
                (Some(m), Some(s)) => {
                    let _ = write!(out, " {m:.2} ({s:.2}) |");
                }
                _ => out.push_str(" - |"),
            }
        }
        out.push('\n');
    }
    out
}

/// Writes the four report files into `dir`, creating it if needed.
pub fn emit_report(
    rows: &[ComparisonRow],
    posteriors: &[PosteriorRow],
    dir: impl AsRef<Path>,
) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let create = |name: &str| {
        let path = dir.join(name);
        std::fs::File::create(&path)
            .map(|f| (f, path.clone()))
            .map_err(|e| Error::io(&path, e))
    };
    let write_text = |name: &str, text: String| {
        let path = dir.join(name);
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        Ok::<_, Error>(path)
    };

    let (f, comparison_csv) = create(COMPARISON_CSV)?;
    write_comparison_csv(rows, f)?;
    let (f, posterior_csv) = create(POSTERIOR_CSV)?;
    write_posterior_csv(posteriors, f)?;
    Ok(vec![
        comparison_csv,
        write_text(COMPARISON_MD, comparison_markdown(rows))?,
        posterior_csv,
        write_text(POSTERIOR_MD, posterior_markdown(posteriors))?,
    ])
}
