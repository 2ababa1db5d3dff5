//! Reading and writing dense `f64` tensors in the NumPy `.npy` v1.0 format.
//!
//! Only little-endian `<f8`, C-order arrays with at least one dimension are
//! supported.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::tensor::DenseTensor;

const MAGIC: &[u8; 6] = b"\x93NUMPY";

pub fn read_npy(path: impl AsRef<Path>) -> Result<DenseTensor> {
    let mut r = BufReader::new(File::open(path)?);
    read_npy_from(&mut r)
}

pub fn write_npy(x: &DenseTensor, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_npy_to(x, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn read_npy_from<R: Read>(r: &mut R) -> Result<DenseTensor> {
    let mut preamble = [0u8; 10];
    r.read_exact(&mut preamble)
        .map_err(|_| Error::Npy("file shorter than the npy preamble".into()))?;
    if &preamble[..6] != MAGIC {
        return Err(Error::Npy("bad magic string".into()));
    }
    if preamble[6..8] != [1, 0] {
        return Err(Error::Npy(format!(
            "unsupported format version {}.{}",
            preamble[6], preamble[7]
        )));
    }
    let header_len = u16::from_le_bytes([preamble[8], preamble[9]]) as usize;
    let mut header = vec![0u8; header_len];
    r.read_exact(&mut header)
        .map_err(|_| Error::Npy("truncated header".into()))?;
    let header =
        std::str::from_utf8(&header).map_err(|_| Error::Npy("header is not ASCII".into()))?;
    let shape = parse_header(header)?;
    if shape.is_empty() {
        return Err(Error::InvalidShape("0-dimensional arrays are not tensors".into()));
    }
    if shape.contains(&0) {
        return Err(Error::InvalidShape(format!("empty array of shape {shape:?}")));
    }

    let n: usize = shape
        .iter()
        .try_fold(1usize, |a, &d| a.checked_mul(d))
        .ok_or_else(|| Error::InvalidShape(format!("{shape:?} overflows")))?;
    let mut bytes = vec![0u8; n * 8];
    r.read_exact(&mut bytes)
        .map_err(|_| Error::Npy(format!("expected {n} f64 values, data is truncated")))?;
    let data = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    DenseTensor::new(shape, data)
}

pub fn write_npy_to<W: Write>(x: &DenseTensor, w: &mut W) -> Result<()> {
    let shape = match x.shape() {
        [d] => format!("({d},)"),
        s => format!(
            "({})",
            s.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(", ")
        ),
    };
    let mut header = format!("{{'descr': '<f8', 'fortran_order': False, 'shape': {shape}, }}");
    // magic + version + length field + header + '\n' padded to 64 bytes
    let unpadded = 10 + header.len() + 1;
    let pad = (64 - unpadded % 64) % 64;
    header.extend(std::iter::repeat_n(' ', pad));
    header.push('\n');
    let len = u16::try_from(header.len()).map_err(|_| Error::Npy("header too long".into()))?;

    w.write_all(MAGIC)?;
    w.write_all(&[1, 0])?;
    w.write_all(&len.to_le_bytes())?;
    w.write_all(header.as_bytes())?;
    for v in x.data() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

/// Parses the Python dict literal and returns the shape.
fn parse_header(header: &str) -> Result<Vec<usize>> {
    let body = header.trim();
    let body = body
        .strip_prefix('{')
        .and_then(|b| b.trim_end().strip_suffix('}'))
        .ok_or_else(|| Error::Npy(format!("header is not a dict: {header:?}")))?;

    let descr = dict_value(body, "descr")?;
    let descr = descr.trim().trim_matches(|c| c == '\'' || c == '"');
    if descr != "<f8" {
        return Err(Error::Npy(format!("unsupported dtype {descr:?}, expected '<f8'")));
    }

    match dict_value(body, "fortran_order")?.trim() {
        "False" => {}
        "True" => return Err(Error::Npy("Fortran-order arrays are not supported".into())),
        other => return Err(Error::Npy(format!("bad fortran_order value {other:?}"))),
    }

    let shape = dict_value(body, "shape")?.trim();
    let inner = shape
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| Error::Npy(format!("bad shape tuple {shape:?}")))?;
    inner
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<usize>()
                .map_err(|_| Error::Npy(format!("bad shape entry {s:?}")))
        })
        .collect()
}

/// Raw text of the value for `key` in a flat dict body. Tuples are kept intact.
fn dict_value<'a>(body: &'a str, key: &str) -> Result<&'a str> {
    let missing = || Error::Npy(format!("header is missing key {key:?}"));
    let pos = ["'", "\""]
        .iter()
        .find_map(|q| body.find(&format!("{q}{key}{q}")))
        .ok_or_else(missing)?;
    let rest = &body[pos + key.len() + 2..];
    let rest = rest.trim_start().strip_prefix(':').ok_or_else(missing)?;
    let mut depth = 0usize;
    for (i, ch) in rest.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => return Ok(&rest[..i]),
            _ => {}
        }
    }
    Ok(rest)
}
