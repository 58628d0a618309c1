//! Tab-separated dataset files.
//!
//! One file per split (`train.tsv`, `validation.tsv`, `test.tsv`). The first
//! line is a header `subject_id class x0 x1 ...`; every following line is one
//! sample. Floats use the shortest representation that parses back to the
//! same bits.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{SourceSample, SplitDataset, NUM_CLASSES};
use crate::error::{Error, Result};

pub fn samples_to_tsv(samples: &[SourceSample]) -> String {
    let dimension = samples.first().map_or(0, |s| s.features.len());
    let mut out = String::from("subject_id\tclass");
    for i in 0..dimension {
        let _ = write!(out, "\tx{i}");
    }
    out.push('\n');
    for s in samples {
        let _ = write!(out, "{}\t{}", s.subject_id, s.class);
        for x in &s.features {
            let _ = write!(out, "\t{x:?}");
        }
        out.push('\n');
    }
    out
}

pub fn samples_from_tsv(text: &str) -> Result<Vec<SourceSample>> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing header"))?;
    let columns: Vec<&str> = header.split('\t').collect();
    if columns.len() < 2 || columns[0] != "subject_id" || columns[1] != "class" {
        return Err(Error::parse(
            1,
            "header must start with `subject_id\\tclass`",
        ));
    }
    let dimension = columns.len() - 2;
    let mut samples = Vec::new();
    for (n, line) in lines {
        let line_no = n + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != dimension + 2 {
            return Err(Error::parse(
                line_no,
                format!("expected {} fields, found {}", dimension + 2, fields.len()),
            ));
        }
        let subject_id = fields[0]
            .parse::<u64>()
            .map_err(|e| Error::parse(line_no, format!("subject_id: {e}")))?;
        let class = fields[1]
            .parse::<u8>()
            .ok()
            .filter(|&c| (c as usize) < NUM_CLASSES)
            .ok_or_else(|| Error::parse(line_no, format!("invalid class `{}`", fields[1])))?;
        let features = fields[2..]
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|e| Error::parse(line_no, format!("feature `{f}`: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        samples.push(SourceSample {
            features,
            class,
            subject_id,
        });
    }
    Ok(samples)
}

pub fn write_dataset(dir: &Path, dataset: &SplitDataset) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for (name, samples) in dataset.splits() {
        let path = dir.join(format!("{name}.tsv"));
        fs::write(&path, samples_to_tsv(samples)).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

pub fn read_dataset(dir: &Path) -> Result<SplitDataset> {
    let read = |name: &str| -> Result<Vec<SourceSample>> {
        let path = dir.join(format!("{name}.tsv"));
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        samples_from_tsv(&text)
    };
    Ok(SplitDataset {
        train: read("train")?,
        validation: read("validation")?,
        test: read("test")?,
    })
}
