//! The `CMAT v1` text format.
//!
//! ```text
//! CMAT v1 2 2
//! 0,0 1,0
//! -1,0 0,0
//! ```
//!
//! One header line, then one line per row holding `re,im` tokens separated by
//! whitespace. Numbers are written in shortest round-trip form, so a write
//! followed by a read reproduces every entry bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::matcore::{ComplexMatrix, C64};

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn number(token: &str, line: usize, column: usize) -> Result<f64> {
    let v: f64 = token
        .parse()
        .map_err(|_| parse_err(line, column, format!("invalid number {token:?}")))?;
    if !v.is_finite() {
        return Err(parse_err(line, column, format!("non-finite number {token:?}")));
    }
    Ok(v)
}

/// Tokens of a line with their one-based starting columns.
fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    line.split_ascii_whitespace()
        .map(move |t| (t.as_ptr() as usize - line.as_ptr() as usize + 1, t))
}

pub fn parse_cmat(text: &str) -> Result<ComplexMatrix> {
    let mut lines = text.split('\n').enumerate().map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)));
    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, 1, "empty input"))?;
    let head: Vec<(usize, &str)> = tokens(header).collect();
    match head.as_slice() {
        [(_, "CMAT"), (_, "v1"), (rc, rows), (cc, cols)] => {
            let rows: usize = rows
                .parse()
                .map_err(|_| parse_err(1, *rc, format!("invalid row count {rows:?}")))?;
            let cols: usize = cols
                .parse()
                .map_err(|_| parse_err(1, *cc, format!("invalid column count {cols:?}")))?;
            if rows == 0 || cols == 0 {
                return Err(parse_err(1, *rc, "matrix dimensions must be positive"));
            }
            parse_body(lines, rows, cols)
        }
        [(_, "CMAT"), (vc, version), ..] if *version != "v1" => Err(parse_err(
            1,
            *vc,
            format!("unsupported version {version:?}"),
        )),
        _ => Err(parse_err(1, 1, "expected header `CMAT v1 <rows> <cols>`")),
    }
}

fn parse_body<'a>(
    mut lines: impl Iterator<Item = (usize, &'a str)>,
    rows: usize,
    cols: usize,
) -> Result<ComplexMatrix> {
    let mut m = ComplexMatrix::zeros(rows, cols);
    for r in 0..rows {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| parse_err(r + 2, 1, format!("expected {rows} rows, found {r}")))?;
        let mut count = 0;
        for (col, tok) in tokens(line) {
            if count == cols {
                return Err(parse_err(ln, col, format!("more than {cols} entries")));
            }
            let (re, im) = tok
                .split_once(',')
                .ok_or_else(|| parse_err(ln, col, format!("expected `re,im`, found {tok:?}")))?;
            m[(r, count)] = C64::new(number(re, ln, col)?, number(im, ln, col + re.len() + 1)?);
            count += 1;
        }
        if count < cols {
            return Err(parse_err(ln, line.len() + 1, format!("expected {cols} entries, found {count}")));
        }
    }
    for (ln, line) in lines {
        if let Some((col, _)) = tokens(line).next() {
            return Err(parse_err(ln, col, "trailing content after the last row"));
        }
    }
    Ok(m)
}

pub fn format_cmat(m: &ComplexMatrix) -> String {
    let mut out = format!("CMAT v1 {} {}\n", m.nrows(), m.ncols());
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            if c > 0 {
                out.push(' ');
            }
            let z = m[(r, c)];
            write!(out, "{:?},{:?}", z.re, z.im).expect("writing to a String cannot fail");
        }
        out.push('\n');
    }
    out
}

pub fn read_cmat(path: impl AsRef<Path>) -> Result<ComplexMatrix> {
    parse_cmat(&fs::read_to_string(path)?)
}

pub fn write_cmat(path: impl AsRef<Path>, m: &ComplexMatrix) -> Result<()> {
    fs::write(path, format_cmat(m))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::c64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn parses_example() {
        let m = parse_cmat("CMAT v1 2 2\n0,0 1,0\n-1,0 0,0\n").unwrap();
        assert_eq!(m[(0, 1)], c64(1.0, 0.0));
        assert_eq!(m[(1, 0)], c64(-1.0, 0.0));
        assert_eq!(m[(0, 0)], c64(0.0, 0.0));
    }

    #[test]
    fn round_trip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = ComplexMatrix::from_fn(7, 5, |_, _| {
            c64(rng.random::<f64>() * 1e3 - 500.0, rng.random::<f64>() * 1e-7)
        });
        let back = parse_cmat(&format_cmat(&m)).unwrap();
        for (a, b) in m.iter().zip(back.iter()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
        let tiny = ComplexMatrix::from_element(1, 1, c64(5e-324, -0.0));
        let back = parse_cmat(&format_cmat(&tiny)).unwrap();
        assert_eq!(back[(0, 0)].re.to_bits(), 5e-324f64.to_bits());
        assert_eq!(back[(0, 0)].im.to_bits(), (-0.0f64).to_bits());
    }

    #[test]
    fn rejects_other_versions() {
        let err = parse_cmat("CMAT v2 1 1\n0,0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, column: 6, .. }), "{err}");
    }

    #[test]
    fn reports_positions() {
        match parse_cmat("CMAT v1 1 2\n1,0 x,2\n").unwrap_err() {
            Error::Parse { line, column, .. } => assert_eq!((line, column), (2, 5)),
            e => panic!("{e}"),
        }
        match parse_cmat("CMAT v1 1 2\n1,0 2,zz\n").unwrap_err() {
            Error::Parse { line, column, .. } => assert_eq!((line, column), (2, 7)),
            e => panic!("{e}"),
        }
        assert!(parse_cmat("CMAT v1 2 1\n1,0\n").is_err());
        assert!(parse_cmat("CMAT v1 1 1\n1,0 2,0\n").is_err());
        assert!(parse_cmat("CMAT v1 1 1\n1,0\n3,0\n").is_err());
        assert!(parse_cmat("CMAT v1 1 1\ninf,0\n").is_err());
        assert!(parse_cmat("").is_err());
    }
}
