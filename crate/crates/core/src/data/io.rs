//! Line-oriented dataset files.
//!
//! ```text
//! gdp-synth v1
//! n_features 3
//! n_samples 2
//! grid 1 3
//! trainL 0 1 0.5 1.25 -3
//! trainU 7 ? 0.1 0.2 0.3
//! ```
//! `n_samples` and `grid` are optional. Split tags are `trainL`, `trainU`, `val`
//! and `test`. A `trainU` row may carry a numeric label, which is loaded as
//! hidden ground truth rather than as a training label.

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::{DatasetSplits, Sample};
use crate::error::{Error, Result};

const MAGIC: &str = "gdp-synth v1";

pub fn write_dataset<W: Write>(splits: &DatasetSplits, mut out: W) -> Result<()> {
    writeln!(out, "{}", MAGIC)?;
    writeln!(out, "n_features {}", splits.n_features())?;
    writeln!(out, "n_samples {}", splits.len())?;
    if let Some((h, w)) = splits.grid_dims() {
        writeln!(out, "grid {} {}", h, w)?;
    }
    let mut row = |tag: &str, s: &Sample, label: Option<usize>| -> Result<()> {
        write!(out, "{} {} ", tag, s.id)?;
        match label {
            Some(l) => write!(out, "{}", l)?,
            None => write!(out, "?")?,
        }
        for v in &s.features {
            write!(out, " {:.16e}", v)?;
        }
        writeln!(out)?;
        Ok(())
    };
    for s in splits.labeled_train() {
        row("trainL", s, s.label)?;
    }
    for (s, hidden) in splits.unlabeled_train().iter().zip(splits.hidden_labels()) {
        row("trainU", s, *hidden)?;
    }
    for s in splits.validation() {
        row("val", s, s.label)?;
    }
    for s in splits.test() {
        row("test", s, s.label)?;
    }
    Ok(())
}

fn header_value<'a>(line: &'a str, key: &str, line_no: usize) -> Result<Vec<&'a str>> {
    let mut tokens = line.split_whitespace();
    if tokens.next() != Some(key) {
        return Err(Error::parse(line_no, format!("expected `{} ...`", key)));
    }
    Ok(tokens.collect())
}

fn parse_usize(token: &str, line_no: usize, what: &str) -> Result<usize> {
    token
        .parse()
        .map_err(|_| Error::parse(line_no, format!("bad {} `{}`", what, token)))
}

pub fn read_dataset<R: Read>(input: R) -> Result<DatasetSplits> {
    let lines: Vec<String> = BufReader::new(input).lines().collect::<std::io::Result<_>>()?;
    let mut it = lines
        .iter()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
        .peekable();

    match it.next() {
        Some((_, l)) if l == MAGIC => {}
        Some((n, _)) => return Err(Error::parse(n, format!("expected `{}`", MAGIC))),
        None => return Err(Error::parse(1, "empty dataset file")),
    }
    let (n, l) = it
        .next()
        .ok_or_else(|| Error::parse(2, "missing `n_features`"))?;
    let v = header_value(l, "n_features", n)?;
    if v.len() != 1 {
        return Err(Error::parse(n, "expected `n_features <n>`"));
    }
    let n_features = parse_usize(v[0], n, "feature count")?;

    let mut n_samples = None;
    let mut grid = None;
    while let Some(&(n, l)) = it.peek() {
        if l.starts_with("n_samples") {
            let v = header_value(l, "n_samples", n)?;
            if v.len() != 1 {
                return Err(Error::parse(n, "expected `n_samples <n>`"));
            }
            n_samples = Some(parse_usize(v[0], n, "sample count")?);
        } else if l.starts_with("grid") {
            let v = header_value(l, "grid", n)?;
            if v.len() != 2 {
                return Err(Error::parse(n, "expected `grid <h> <w>`"));
            }
            let (h, w) = (parse_usize(v[0], n, "grid height")?, parse_usize(v[1], n, "grid width")?);
            if h == 0 || w == 0 || h * w > n_features {
                return Err(Error::parse(n, format!("grid {}x{} does not fit {} features", h, w, n_features)));
            }
            grid = Some((h, w));
        } else {
            break;
        }
        it.next();
    }

    let (mut labeled, mut unlabeled, mut val, mut test) = (vec![], vec![], vec![], vec![]);
    let mut count = 0;
    for (n, l) in it {
        let mut tokens = l.split_whitespace();
        let tag = tokens.next().unwrap_or_default();
        let id: u64 = tokens
            .next()
            .ok_or_else(|| Error::parse(n, "missing sample id"))?
            .parse()
            .map_err(|_| Error::parse(n, "bad sample id"))?;
        let label = match tokens.next() {
            Some("?") => None,
            Some(t) => Some(parse_usize(t, n, "label")?),
            None => return Err(Error::parse(n, "missing label field")),
        };
        let features = tokens
            .map(|t| match t.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(Error::parse(n, format!("bad feature value `{}`", t))),
            })
            .collect::<Result<Vec<_>>>()?;
        if features.len() != n_features {
            return Err(Error::parse(
                n,
                format!("expected {} features, found {}", n_features, features.len()),
            ));
        }
        let sample = Sample {
            id,
            features,
            label,
            grid_dims: grid,
        };
        let needs_label = |s: Sample| -> Result<Sample> {
            if s.label.is_none() {
                Err(Error::parse(n, format!("`{}` rows must be labeled", tag)))
            } else {
                Ok(s)
            }
        };
        match tag {
            "trainL" => labeled.push(needs_label(sample)?),
            "trainU" => unlabeled.push(sample),
            "val" => val.push(needs_label(sample)?),
            "test" => test.push(needs_label(sample)?),
            other => return Err(Error::parse(n, format!("unknown split tag `{}`", other))),
        }
        count += 1;
    }
    if let Some(expected) = n_samples {
        if expected != count {
            return Err(Error::parse(
                lines.len(),
                format!("header declares {} samples, found {}", expected, count),
            ));
        }
    }
    DatasetSplits::new(labeled, unlabeled, val, test)
}

pub fn save_dataset(splits: &DatasetSplits, path: impl AsRef<Path>) -> Result<()> {
    let mut buf = Vec::new();
    write_dataset(splits, &mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<DatasetSplits> {
    read_dataset(fs::File::open(path)?)
}
