//! Plain-text model checkpoints.
//!
//! ```text
//! mlp 4 8 2
//! <w0[0,0]>
//! ...
//! ```
//! Parameters follow in layer order, weights row-major then bias, one value per
//! line with 17 significant digits so that reading back is bit-exact.

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::{Matrix, MlpModel};
use crate::error::{Error, Result};

pub fn write_checkpoint<W: Write>(model: &MlpModel, mut out: W) -> Result<()> {
    let dims: Vec<String> = model.layer_dims().iter().map(|d| d.to_string()).collect();
    writeln!(out, "mlp {}", dims.join(" "))?;
    for s in model.param_slices() {
        for v in s {
            writeln!(out, "{:.16e}", v)?;
        }
    }
    Ok(())
}

pub fn read_checkpoint<R: Read>(input: R) -> Result<MlpModel> {
    let mut lines = BufReader::new(input).lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::parse(1, "empty checkpoint"))??;
    let mut tokens = header.split_whitespace();
    if tokens.next() != Some("mlp") {
        return Err(Error::parse(1, "expected header `mlp <d0> <d1> ...`"));
    }
    let dims = tokens
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| Error::parse(1, format!("bad layer dimension `{}`", t)))
        })
        .collect::<Result<Vec<_>>>()?;
    if dims.len() < 2 || dims.contains(&0) {
        return Err(Error::parse(1, format!("invalid layer dimensions {:?}", dims)));
    }

    let mut line_no = 1;
    let mut next_value = || -> Result<f64> {
        let line = lines.next().ok_or_else(|| {
            Error::parse(line_no + 1, "unexpected end of checkpoint")
        })??;
        line_no += 1;
        let v = line
            .trim()
            .parse::<f64>()
            .map_err(|_| Error::parse(line_no, format!("bad value `{}`", line.trim())))?;
        if !v.is_finite() {
            return Err(Error::parse(line_no, "non-finite parameter"));
        }
        Ok(v)
    };

    let mut weights = Vec::new();
    let mut biases = Vec::new();
    for w in dims.windows(2) {
        let (fan_in, fan_out) = (w[0], w[1]);
        let data = (0..fan_in * fan_out)
            .map(|_| next_value())
            .collect::<Result<Vec<_>>>()?;
        weights.push(Matrix::new(fan_in, fan_out, data)?);
        biases.push((0..fan_out).map(|_| next_value()).collect::<Result<Vec<_>>>()?);
    }
    if let Some(extra) = lines.find(|l| l.as_ref().map_or(true, |s| !s.trim().is_empty())) {
        extra?;
        return Err(Error::parse(line_no + 1, "trailing data after parameters"));
    }
    MlpModel::from_parts(weights, biases)
}

pub fn save_checkpoint(model: &MlpModel, path: impl AsRef<Path>) -> Result<()> {
    let mut buf = Vec::new();
    write_checkpoint(model, &mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}

pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<MlpModel> {
    read_checkpoint(fs::File::open(path)?)
}
