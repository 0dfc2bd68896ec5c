//! Word2vec text format.
//!
//! ```text
//! <vocab size> <dim>
//! <word> <f1> ... <fdim>
//! ```
//!
//! Space-separated, `\n`-terminated, UTF-8 words. Values are written in scientific notation
//! with nine significant digits.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::matrix::Matrix;
use super::model::EmbeddingModel;
use super::vocab::Vocabulary;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub fn write_model<T: Real, W: Write>(model: &EmbeddingModel<T>, mut out: W) -> Result<()> {
    writeln!(out, "{} {}", model.len(), model.dim())?;
    for (i, word) in model.vocab().words().iter().enumerate() {
        out.write_all(word.as_bytes())?;
        for x in model.vector_at(i) {
            write!(out, " {:.8e}", x.as_f64())?;
        }
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn save_model<T: Real>(model: &EmbeddingModel<T>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_model(model, BufWriter::new(file)).map_err(|e| match e {
        Error::RawIo(io) => Error::io(path, io),
        other => other,
    })
}

fn format_err(line: usize, message: impl Into<String>) -> Error {
    Error::Format {
        line,
        message: message.into(),
    }
}

/// Reads a model line by line; memory holds only the parsed vectors.
pub fn read_model<T: Real, R: BufRead>(input: R) -> Result<EmbeddingModel<T>> {
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| format_err(1, "empty model file"))??;
    let mut fields = header.split_whitespace();
    let parse_count = |s: Option<&str>, what: &str| -> Result<usize> {
        s.and_then(|v| v.parse().ok())
            .ok_or_else(|| format_err(1, format!("header must be \"<vocab> <dim>\", bad {what}")))
    };
    let rows = parse_count(fields.next(), "vocabulary size")?;
    let dim = parse_count(fields.next(), "dimension")?;
    if fields.next().is_some() {
        return Err(format_err(1, "header has more than two fields"));
    }
    if dim == 0 {
        return Err(format_err(1, "dimension must be positive"));
    }

    let mut words = Vec::with_capacity(rows.min(1 << 20));
    let mut data = Vec::with_capacity(rows.min(1 << 20) * dim);
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        if words.len() == rows {
            return Err(format_err(lineno, format!("more rows than the {rows} declared")));
        }
        let mut parts = line.split(' ').filter(|p| !p.is_empty());
        let word = parts.next().expect("non-blank line has a field");
        let before = data.len();
        for part in parts {
            let v: T = part
                .parse()
                .map_err(|_| format_err(lineno, format!("bad number {part:?}")))?;
            data.push(v);
        }
        let got = data.len() - before;
        if got != dim {
            return Err(format_err(lineno, format!("expected {dim} values, found {got}")));
        }
        words.push(word.to_string());
    }
    if words.len() != rows {
        return Err(format_err(
            words.len() + 2,
            format!("header declares {rows} rows, found {}", words.len()),
        ));
    }
    let vocab = Vocabulary::from_words(words)?;
    EmbeddingModel::new(vocab, Matrix::from_vec(rows, dim, data))
}

pub fn load_model<T: Real>(path: impl AsRef<Path>) -> Result<EmbeddingModel<T>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_model(BufReader::new(file))
}
