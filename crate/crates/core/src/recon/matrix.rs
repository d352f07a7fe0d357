//! Sparse parity-check matrices and the alist text format.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityCheckMatrix {
    pub code_id: String,
    n_vars: usize,
    /// Sorted variable indices per check.
    rows: Vec<Vec<u32>>,
    /// Sorted check indices per variable.
    cols: Vec<Vec<u32>>,
}

impl ParityCheckMatrix {
    pub fn new(code_id: impl Into<String>, n_vars: usize, mut rows: Vec<Vec<u32>>) -> Result<Self> {
        if n_vars == 0 || rows.is_empty() {
            return Err(Error::invalid("matrix", "needs at least one row and one column"));
        }
        if rows.len() >= n_vars {
            return Err(Error::invalid(
                "matrix",
                format!("{} checks for {n_vars} variables leaves no positive rate", rows.len()),
            ));
        }
        let mut cols = vec![Vec::new(); n_vars];
        for (r, row) in rows.iter_mut().enumerate() {
            row.sort_unstable();
            if row.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::invalid("matrix", format!("row {r} has a duplicate entry")));
            }
            for &v in row.iter() {
                let col = cols
                    .get_mut(v as usize)
                    .ok_or_else(|| Error::invalid("matrix", format!("row {r}: column {v} out of range")))?;
                col.push(r as u32);
            }
        }
        if let Some(c) = cols.iter().position(|c| c.is_empty()) {
            return Err(Error::invalid("matrix", format!("column {c} is empty")));
        }
        Ok(Self {
            code_id: code_id.into(),
            n_vars,
            rows,
            cols,
        })
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_checks(&self) -> usize {
        self.rows.len()
    }

    pub fn code_rate(&self) -> f64 {
        1.0 - self.n_checks() as f64 / self.n_vars as f64
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn cols(&self) -> &[Vec<u32>] {
        &self.cols
    }

    pub fn n_edges(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn column_weights(&self) -> Vec<usize> {
        self.cols.iter().map(Vec::len).collect()
    }

    pub fn row_weights(&self) -> Vec<usize> {
        self.rows.iter().map(Vec::len).collect()
    }

    /// `H·bits` over GF(2).
    pub fn syndrome(&self, bits: &[u8]) -> Vec<u8> {
        self.rows
            .iter()
            .map(|row| row.iter().fold(0u8, |acc, &v| acc ^ (bits[v as usize] & 1)))
            .collect()
    }

    /// MacKay's alist layout: sizes, maximum weights, the weight lists, then
    /// 1-based column and row lists padded with zeros.
    pub fn to_alist(&self) -> String {
        let col_w = self.column_weights();
        let row_w = self.row_weights();
        let max_col = col_w.iter().copied().max().unwrap_or(0);
        let max_row = row_w.iter().copied().max().unwrap_or(0);
        let mut out = String::new();
        let join = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
        let _ = writeln!(out, "{} {}", self.n_vars, self.n_checks());
        let _ = writeln!(out, "{max_col} {max_row}");
        let _ = writeln!(out, "{}", join(&col_w));
        let _ = writeln!(out, "{}", join(&row_w));
        for (lists, width) in [(&self.cols, max_col), (&self.rows, max_row)] {
            for list in lists.iter() {
                let mut entries: Vec<usize> = list.iter().map(|&i| i as usize + 1).collect();
                entries.resize(width, 0);
                let _ = writeln!(out, "{}", join(&entries));
            }
        }
        out
    }

    pub fn from_alist(text: &str, code_id: impl Into<String>, source_name: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let mut next_line = |what: &str| {
            lines
                .next()
                .ok_or_else(|| Error::parse(source_name, 0, format!("unexpected end of file reading {what}")))
        };
        let numbers = |(line, text): (usize, &str)| -> Result<Vec<usize>> {
            text.split_whitespace()
                .map(|tok| {
                    tok.parse::<usize>()
                        .map_err(|_| Error::parse(source_name, line, format!("`{tok}` is not a non-negative integer")))
                })
                .collect()
        };
        let expect = |(line, nums): (usize, Vec<usize>), len: usize, what: &str| -> Result<Vec<usize>> {
            if nums.len() != len {
                return Err(Error::parse(
                    source_name,
                    line,
                    format!("expected {len} values for {what}, found {}", nums.len()),
                ));
            }
            Ok(nums)
        };

        let l = next_line("sizes")?;
        let sizes = expect((l.0, numbers(l)?), 2, "sizes")?;
        let (n, m) = (sizes[0], sizes[1]);
        let l = next_line("maximum weights")?;
        let _max = expect((l.0, numbers(l)?), 2, "maximum weights")?;
        let l = next_line("column weights")?;
        let col_w = expect((l.0, numbers(l)?), n, "column weights")?;
        let l = next_line("row weights")?;
        let row_w = expect((l.0, numbers(l)?), m, "row weights")?;

        let mut read_lists = |count: usize, weights: &[usize], bound: usize, what: &str| -> Result<Vec<(usize, Vec<u32>)>> {
            let mut lists = Vec::with_capacity(count);
            for (k, &w) in weights.iter().enumerate().take(count) {
                let l = next_line(what)?;
                let line = l.0;
                let entries: Vec<u32> = numbers(l)?
                    .into_iter()
                    .filter(|&e| e != 0)
                    .map(|e| {
                        if e > bound {
                            Err(Error::parse(source_name, line, format!("index {e} exceeds {bound}")))
                        } else {
                            Ok(e as u32 - 1)
                        }
                    })
                    .collect::<Result<_>>()?;
                if entries.len() != w {
                    return Err(Error::parse(
                        source_name,
                        line,
                        format!("{what} {} lists {} entries but its weight is {w}", k + 1, entries.len()),
                    ));
                }
                lists.push((line, entries));
            }
            Ok(lists)
        };
        let cols = read_lists(n, &col_w, m, "column")?;
        let rows: Vec<Vec<u32>> = read_lists(m, &row_w, n, "row")?.into_iter().map(|(_, r)| r).collect();

        let h = Self::new(code_id, n, rows).map_err(|e| Error::parse(source_name, 0, e.to_string()))?;
        for (v, (line, list)) in cols.into_iter().enumerate() {
            let mut list = list;
            list.sort_unstable();
            if list != h.cols[v] {
                return Err(Error::parse(
                    source_name,
                    line,
                    format!("column {} disagrees with the row lists", v + 1),
                ));
            }
        }
        Ok(h)
    }

    pub fn load_alist(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let code_id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "alist".into());
        Self::from_alist(&text, code_id, &path.display().to_string())
    }
}
