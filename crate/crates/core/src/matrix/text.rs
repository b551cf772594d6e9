//! Plain-text matrix format.
//!
//! ```text
//! rows cols [d]
//! <rows lines over 0/1/*>
//! <rows row labels>     only when d is given
//! <cols column labels>  only when d is given
//! ```

use std::fmt;
use std::str::FromStr;

use super::{BitMatrix, Labels, PartialMatrix};
use crate::bits::BitString;
use crate::error::{Error, ParseError};

pub(super) fn parse_cells(
    line: &str,
    line_no: usize,
    width: usize,
    allow_star: bool,
) -> Result<Vec<Option<bool>>, ParseError> {
    let mut out = Vec::with_capacity(width);
    for (column, ch) in line.chars().enumerate() {
        out.push(match ch {
            '0' => Some(false),
            '1' => Some(true),
            '*' if allow_star => None,
            found => {
                return Err(ParseError::BadCharacter {
                    line: line_no,
                    column,
                    found,
                })
            }
        });
    }
    if out.len() != width {
        return Err(ParseError::WrongWidth {
            line: line_no,
            expected: width,
            found: out.len(),
        });
    }
    Ok(out)
}

struct Parsed {
    rows: usize,
    cols: usize,
    cells: Vec<Option<bool>>,
    labels: Option<Labels>,
}

fn parse(text: &str, allow_star: bool) -> Result<Parsed, Error> {
    let text = text.strip_suffix('\n').unwrap_or(text);
    let mut lines = text
        .split('\n')
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)));
    let (hline, header) = lines.next().ok_or(ParseError::Truncated { expected: 1 })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let bad_header = |reason: &str| ParseError::BadHeader {
        line: hline,
        reason: reason.to_string(),
    };
    if !(2..=3).contains(&fields.len()) {
        return Err(bad_header("expected `rows cols [d]`").into());
    }
    let num = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| bad_header(&format!("not a count: {s:?}")))
    };
    let rows = num(fields[0])?;
    let cols = num(fields[1])?;
    let dim = fields.get(2).map(|s| num(s)).transpose()?;

    let mut take = |expected: usize| lines.next().ok_or(ParseError::Truncated { expected });
    let mut cells = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        let (no, line) = take(rows - i)?;
        cells.extend(parse_cells(line, no, cols, allow_star)?);
    }
    let labels = match dim {
        None => None,
        Some(d) => {
            let mut read = |count: usize, pending: usize| -> Result<Vec<BitString>, ParseError> {
                (0..count)
                    .map(|i| {
                        let (no, line) = take(pending - i)?;
                        let bits = parse_cells(line, no, d, false)?;
                        Ok(BitString::from_bits(bits.into_iter().map(|b| b == Some(true))))
                    })
                    .collect()
            };
            let row_labels = read(rows, rows + cols)?;
            let col_labels = read(cols, cols)?;
            Some(Labels::new(d, row_labels, col_labels)?)
        }
    };
    for (no, line) in lines {
        if !line.trim().is_empty() {
            return Err(ParseError::TrailingContent { line: no }.into());
        }
    }
    Ok(Parsed {
        rows,
        cols,
        cells,
        labels,
    })
}

fn write(
    f: &mut fmt::Formatter<'_>,
    rows: usize,
    cols: usize,
    labels: Option<&Labels>,
    cell: impl Fn(usize, usize) -> char,
) -> fmt::Result {
    match labels {
        Some(l) => writeln!(f, "{rows} {cols} {}", l.dim())?,
        None => writeln!(f, "{rows} {cols}")?,
    }
    let mut line = String::with_capacity(cols);
    for r in 0..rows {
        line.clear();
        line.extend((0..cols).map(|c| cell(r, c)));
        writeln!(f, "{line}")?;
    }
    if let Some(l) = labels {
        for s in l.rows().iter().chain(l.cols()) {
            writeln!(f, "{s}")?;
        }
    }
    Ok(())
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write(f, self.rows(), self.cols(), self.labels(), |r, c| {
            if self.get(r, c) {
                '1'
            } else {
                '0'
            }
        })
    }
}

impl fmt::Display for PartialMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write(f, self.rows(), self.cols(), self.labels(), |r, c| {
            match self.get(r, c) {
                Some(true) => '1',
                Some(false) => '0',
                None => '*',
            }
        })
    }
}

impl FromStr for PartialMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let p = parse(s, true)?;
        let mut m = PartialMatrix::from_fn(p.rows, p.cols, |r, c| p.cells[r * p.cols + c]);
        m.labels = p.labels;
        Ok(m)
    }
}

impl FromStr for BitMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let p = parse(s, false)?;
        let mut m = BitMatrix::from_fn(p.rows, p.cols, |r, c| p.cells[r * p.cols + c] == Some(true));
        m.labels = p.labels;
        Ok(m)
    }
}
