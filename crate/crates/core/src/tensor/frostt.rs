//! FROSTT `.tns` text format.
//!
//! One nonzero per line: N one-based integer coordinates followed by the
//! value. Blank lines and lines starting with `#` are skipped.

use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::{Shape, SparseTensor, MAX_EXTENT};

#[derive(Debug, Clone)]
pub struct ParseOptions {
    /// Sum values of repeated index tuples instead of rejecting the file.
    pub merge_duplicates: bool,
    /// Explicit extents; otherwise each extent is the largest index seen.
    pub dims: Option<Vec<usize>>,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions { merge_duplicates: true, dims: None }
    }
}

impl ParseOptions {
    pub fn strict() -> Self {
        ParseOptions { merge_duplicates: false, dims: None }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseStats {
    pub data_lines: usize,
    pub skipped_lines: usize,
    /// Lines folded into an earlier element with the same coordinates.
    pub duplicates_merged: usize,
}

pub fn parse_frostt<T: Scalar, R: BufRead>(
    reader: R,
    opts: &ParseOptions,
) -> Result<(SparseTensor<T>, ParseStats)> {
    let mut stats = ParseStats::default();
    let mut order: Option<usize> = None;
    let mut indices: Vec<u32> = Vec::new();
    let mut values: Vec<T> = Vec::new();
    let mut seen: HashMap<Box<[u32]>, usize> = HashMap::new();
    let mut max_index: Vec<usize> = Vec::new();
    let mut coords: Vec<u32> = Vec::new();

    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            stats.skipped_lines += 1;
            continue;
        }
        stats.data_lines += 1;

        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        let n = match order {
            Some(n) => n,
            None => {
                if tokens.len() < 2 {
                    return Err(parse_err(lineno, "expected at least one index and a value"));
                }
                let n = tokens.len() - 1;
                order = Some(n);
                max_index = vec![0; n];
                n
            }
        };
        if tokens.len() != n + 1 {
            return Err(parse_err(
                lineno,
                format!("expected {} tokens, found {}", n + 1, tokens.len()),
            ));
        }

        coords.clear();
        for (mode, token) in tokens[..n].iter().enumerate() {
            let index: u64 = token
                .parse()
                .map_err(|_| parse_err(lineno, format!("mode {mode}: `{token}` is not an index")))?;
            if index < 1 {
                return Err(parse_err(lineno, format!("mode {mode}: indices are 1-based, found 0")));
            }
            if index > MAX_EXTENT as u64 {
                return Err(parse_err(lineno, format!("mode {mode}: index {index} exceeds 32 bits")));
            }
            max_index[mode] = max_index[mode].max(index as usize);
            coords.push((index - 1) as u32);
        }

        let token = tokens[n];
        let value: T = token
            .parse()
            .map_err(|_| parse_err(lineno, format!("`{token}` is not a number")))?;
        if !value.is_finite() {
            return Err(parse_err(lineno, format!("non-finite value `{token}`")));
        }

        match seen.entry(coords.clone().into_boxed_slice()) {
            Entry::Occupied(slot) => {
                if !opts.merge_duplicates {
                    return Err(Error::DuplicateTuple {
                        line: lineno,
                        indices: coords.iter().map(|&c| c as u64 + 1).collect(),
                    });
                }
                let at = *slot.get();
                values[at] = values[at] + value;
                stats.duplicates_merged += 1;
            }
            Entry::Vacant(slot) => {
                slot.insert(values.len());
                indices.extend_from_slice(&coords);
                values.push(value);
            }
        }
    }

    if values.is_empty() {
        return Err(Error::EmptyInput);
    }

    let dims = match &opts.dims {
        Some(dims) => {
            if dims.len() != max_index.len() {
                return Err(Error::ShapeMismatch(format!(
                    "explicit shape has {} modes, file has {}",
                    dims.len(),
                    max_index.len()
                )));
            }
            if let Some((mode, (&d, &m))) = dims.iter().zip(&max_index).enumerate().find(|(_, (&d, &m))| m > d) {
                return Err(Error::ShapeMismatch(format!(
                    "mode {mode}: index {m} exceeds explicit extent {d}"
                )));
            }
            dims.clone()
        }
        None => max_index,
    };

    let tensor = SparseTensor::new(Shape::new(dims)?, indices, values)?;
    Ok((tensor, stats))
}

pub fn parse_frostt_str<T: Scalar>(text: &str, opts: &ParseOptions) -> Result<SparseTensor<T>> {
    parse_frostt(text.as_bytes(), opts).map(|(t, _)| t)
}

/// Writes one line per element. Values use the shortest decimal form that
/// parses back to the same bits.
pub fn write_frostt<T: Scalar, W: Write>(tensor: &SparseTensor<T>, mut out: W) -> Result<()> {
    let mut line = String::new();
    for (coords, value) in tensor.iter() {
        line.clear();
        for &c in coords {
            line.push_str(&(c as u64 + 1).to_string());
            line.push(' ');
        }
        line.push_str(&value.to_string());
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_frostt_string<T: Scalar>(tensor: &SparseTensor<T>) -> String {
    let mut buf = Vec::new();
    write_frostt(tensor, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("FROSTT output is ASCII")
}

fn parse_err(line: usize, reason: impl Into<String>) -> Error {
    Error::Parse { line, reason: reason.into() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_based_to_zero_based() {
        let t: SparseTensor<f32> = parse_frostt_str("1 1 1 2.0\n2 2 2 3.0\n", &ParseOptions::default()).unwrap();
        assert_eq!(t.shape().dims(), &[2, 2, 2]);
        assert_eq!(t.nnz(), 2);
        assert_eq!(t.coords(0), &[0, 0, 0]);
        assert_eq!(t.value(0), 2.0);
        assert_eq!(t.coords(1), &[1, 1, 1]);
        assert_eq!(t.value(1), 3.0);
    }

    #[test]
    fn duplicates_merge_by_sum() {
        let (t, stats) =
            parse_frostt::<f64, _>("1 1 1 2.0\n1 1 1 3.0\n".as_bytes(), &ParseOptions::default()).unwrap();
        assert_eq!(t.nnz(), 1);
        assert_eq!(t.value(0), 5.0);
        assert_eq!(stats.duplicates_merged, 1);
    }

    #[test]
    fn duplicates_rejected_in_strict_mode() {
        let err = parse_frostt_str::<f64>("1 1 1 2.0\n1 1 1 3.0\n", &ParseOptions::strict()).unwrap_err();
        assert!(matches!(err, Error::DuplicateTuple { line: 2, .. }));
    }

    #[test]
    fn malformed_inputs() {
        let opts = ParseOptions::default();
        let cases = [
            ("1 1 1 2.0\n1 1 2.0\n", 2),
            ("1 x 1 2.0\n", 1),
            ("1 1 1 abc\n", 1),
            ("1 0 1 2.0\n", 1),
            ("3.0\n", 1),
            ("1 1 1 nan\n", 1),
        ];
        for (text, line) in cases {
            match parse_frostt_str::<f32>(text, &opts) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: expected parse error, got {other:?}"),
            }
        }
    }

    #[test]
    fn empty_input_rejected() {
        let opts = ParseOptions::default();
        assert!(matches!(parse_frostt_str::<f32>("", &opts), Err(Error::EmptyInput)));
        assert!(matches!(parse_frostt_str::<f32>("# only a comment\n\n", &opts), Err(Error::EmptyInput)));
    }

    #[test]
    fn comments_blank_lines_and_scientific_values() {
        let text = "# header\n\n  1 2 3 1e-3\n\t2 1 1   -2.5E2  \n";
        let (t, stats) = parse_frostt::<f64, _>(text.as_bytes(), &ParseOptions::default()).unwrap();
        assert_eq!(t.shape().dims(), &[2, 2, 3]);
        assert_eq!(t.value(0), 1e-3);
        assert_eq!(t.value(1), -250.0);
        assert_eq!(stats.skipped_lines, 2);
        assert_eq!(stats.data_lines, 2);
    }

    #[test]
    fn explicit_dims_override() {
        let opts = ParseOptions { merge_duplicates: true, dims: Some(vec![4, 4, 4]) };
        let t: SparseTensor<f32> = parse_frostt_str("1 1 1 1\n", &opts).unwrap();
        assert_eq!(t.shape().dims(), &[4, 4, 4]);

        let too_small = ParseOptions { merge_duplicates: true, dims: Some(vec![1, 1, 1]) };
        assert!(matches!(parse_frostt_str::<f32>("2 1 1 1\n", &too_small), Err(Error::ShapeMismatch(_))));
        let wrong_order = ParseOptions { merge_duplicates: true, dims: Some(vec![2, 2]) };
        assert!(matches!(parse_frostt_str::<f32>("1 1 1 1\n", &wrong_order), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn writer_format() {
        let t = SparseTensor::<f32>::from_elements(Shape::new(vec![1, 1, 1]).unwrap(), [([0, 0, 0], 2.0)]).unwrap();
        assert_eq!(write_frostt_string(&t), "1 1 1 2\n");
    }

    #[test]
    fn empty_tensor_writes_empty_body_that_does_not_parse() {
        let t = SparseTensor::<f32>::new(Shape::new(vec![2, 2, 2]).unwrap(), vec![], vec![]).unwrap();
        let text = write_frostt_string(&t);
        assert!(text.is_empty());
        assert!(matches!(parse_frostt_str::<f32>(&text, &ParseOptions::strict()), Err(Error::EmptyInput)));
    }

    #[test]
    fn awkward_values_round_trip_bit_exact() {
        let vals = [0.1f32, 1.0 / 3.0, f32::MIN_POSITIVE, f32::MAX, -0.0, 16_777_217.0, 1e-42];
        let t = SparseTensor::<f32>::from_elements(
            Shape::new(vec![vals.len()]).unwrap(),
            vals.iter().enumerate().map(|(i, &v)| ([i as u32], v)),
        )
        .unwrap();
        let back: SparseTensor<f32> = parse_frostt_str(&write_frostt_string(&t), &ParseOptions::strict()).unwrap();
        for (a, b) in t.values().iter().zip(back.values()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
