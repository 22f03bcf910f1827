//! GF(2) matrices, triorthogonality checks, code parameters, and the searches
//! behind the small-code nonexistence result.

mod certificate;
mod dlemma;
mod search;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use certificate::{SearchCertificate, SearchResult};
pub use dlemma::{reference_d, verify_d_lemma, DCondition, D_LEMMA_MAX_WIDTH};
pub use search::{complete_14_qubit_code, search_triorthogonal, SEARCH_MAX_COLS, SEARCH_MAX_ROWS};

/// Column limit of the packed representation.
pub const MAX_COLS: usize = 64;
/// Row limit of [`max_span_weight`].
pub const MAX_SPAN_ROWS: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TriorthoError {
    #[error("matrix has {0} columns; at most {MAX_COLS} are supported")]
    TooWide(usize),
    #[error("row {row} has {got} entries, expected {expected}")]
    RaggedRow { row: usize, expected: usize, got: usize },
    #[error("line {line}: unexpected character {ch:?}")]
    BadChar { line: usize, ch: char },
    #[error("more than one blank separator line")]
    ExtraSeparator,
    #[error("matrix has no rows")]
    Empty,
    #[error("rows are linearly dependent (rank {rank} < {rows})")]
    DependentRows { rank: usize, rows: usize },
    #[error("span enumeration limited to {MAX_SPAN_ROWS} rows, got {0}")]
    TooManyRows(usize),
    #[error("{0}")]
    Bounds(String),
}

/// Binary matrix with rows packed into `u64` words; bit `j` of a row is column `j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GF2Matrix {
    ncols: usize,
    rows: Vec<u64>,
}

impl GF2Matrix {
    pub fn new(ncols: usize, rows: Vec<u64>) -> Result<Self, TriorthoError> {
        if ncols > MAX_COLS {
            return Err(TriorthoError::TooWide(ncols));
        }
        let mask = col_mask(ncols);
        for (row, &r) in rows.iter().enumerate() {
            if r & !mask != 0 {
                return Err(TriorthoError::RaggedRow { row, expected: ncols, got: 64 - r.leading_zeros() as usize });
            }
        }
        Ok(GF2Matrix { ncols, rows })
    }

    /// Builds a matrix from `'0'/'1'` strings, one per row.
    pub fn from_strings<S: AsRef<str>>(rows: &[S]) -> Result<Self, TriorthoError> {
        let ncols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut packed = Vec::with_capacity(rows.len());
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != ncols {
                return Err(TriorthoError::RaggedRow { row: i, expected: ncols, got: r.len() });
            }
            packed.push(parse_row(r, i + 1)?);
        }
        Self::new(ncols, packed)
    }

    /// Builds a matrix from column values; bit `i` of a column is row `i`.
    pub fn from_columns(m: usize, columns: &[u64]) -> Result<Self, TriorthoError> {
        let mut rows = vec![0u64; m];
        for (j, &c) in columns.iter().enumerate() {
            for (i, row) in rows.iter_mut().enumerate() {
                if c >> i & 1 == 1 {
                    *row |= 1 << j;
                }
            }
        }
        Self::new(columns.len(), rows)
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.rows[row] >> col & 1 == 1
    }

    pub fn row_weight(&self, row: usize) -> u32 {
        self.rows[row].count_ones()
    }

    /// Column `j` as a row-bit vector (bit `i` is row `i`).
    pub fn column(&self, col: usize) -> u64 {
        self.rows.iter().enumerate().filter(|(_, r)| *r >> col & 1 == 1).map(|(i, _)| 1u64 << i).sum()
    }

    pub fn columns(&self) -> Vec<u64> {
        (0..self.ncols).map(|j| self.column(j)).collect()
    }

    /// Applies `perm`: new column `j` is old column `perm[j]`.
    pub fn permute_columns(&self, perm: &[usize]) -> Self {
        let cols = self.columns();
        let permuted: Vec<u64> = perm.iter().map(|&p| cols[p]).collect();
        Self::from_columns(self.num_rows(), &permuted).expect("same width")
    }

    pub fn rank(&self) -> usize {
        rank_of(self.rows.clone())
    }

    pub fn has_independent_rows(&self) -> bool {
        self.rank() == self.rows.len()
    }

    /// Every pair of rows overlaps on an even number of columns.
    pub fn is_biorthogonal(&self) -> bool {
        let r = &self.rows;
        (0..r.len()).all(|a| (a + 1..r.len()).all(|b| (r[a] & r[b]).count_ones().is_multiple_of(2)))
    }

    /// Biorthogonal, and every triple of rows overlaps on an even number of columns.
    pub fn is_triorthogonal(&self) -> bool {
        let r = &self.rows;
        self.is_biorthogonal()
            && (0..r.len()).all(|a| {
                (a + 1..r.len()).all(|b| {
                    let ab = r[a] & r[b];
                    (b + 1..r.len()).all(|c| (ab & r[c]).count_ones().is_multiple_of(2))
                })
            })
    }

    /// Odd-weight rows (`G1`) and even-weight rows (`G0`), each in original order.
    pub fn split_by_parity(&self) -> (Vec<u64>, Vec<u64>) {
        self.rows.iter().partition(|r| r.count_ones() % 2 == 1)
    }

    /// `'0'/'1'` rows separated by newlines.
    pub fn to_text(&self) -> String {
        self.row_strings().join("\n") + "\n"
    }

    pub fn row_strings(&self) -> Vec<String> {
        self.rows.iter().map(|&r| (0..self.ncols).map(|j| if r >> j & 1 == 1 { '1' } else { '0' }).collect()).collect()
    }

    /// Equality up to a permutation of rows and of columns. Intended for small
    /// row counts (all row orders are tried).
    pub fn equivalent_up_to_permutations(&self, other: &GF2Matrix) -> bool {
        if self.num_rows() != other.num_rows() || self.ncols != other.ncols {
            return false;
        }
        let mut target = other.columns();
        target.sort_unstable();
        let m = self.num_rows();
        let mut perm: Vec<usize> = (0..m).collect();
        loop {
            let mut cols: Vec<u64> = self
                .columns()
                .iter()
                .map(|&c| perm.iter().enumerate().filter(|(_, &p)| c >> p & 1 == 1).map(|(i, _)| 1u64 << i).sum())
                .collect();
            cols.sort_unstable();
            if cols == target {
                return true;
            }
            if !next_permutation(&mut perm) {
                return false;
            }
        }
    }
}

impl fmt::Display for GF2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.row_strings().join("\n"))
    }
}

impl Serialize for GF2Matrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.row_strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for GF2Matrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<String>::deserialize(d)?;
        GF2Matrix::from_strings(&rows).map_err(serde::de::Error::custom)
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else { return false };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("exists");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

fn col_mask(ncols: usize) -> u64 {
    if ncols == 64 {
        u64::MAX
    } else {
        (1u64 << ncols) - 1
    }
}

fn parse_row(s: &str, line: usize) -> Result<u64, TriorthoError> {
    let mut r = 0u64;
    for (j, ch) in s.chars().enumerate() {
        match ch {
            '0' => {}
            '1' => r |= 1 << j,
            _ => return Err(TriorthoError::BadChar { line, ch }),
        }
    }
    Ok(r)
}

/// Rank over GF(2) by elimination on the given vectors.
pub(crate) fn rank_of(mut v: Vec<u64>) -> usize {
    let mut rank = 0;
    for i in 0..v.len() {
        if v[i] == 0 {
            continue;
        }
        let pivot = v[i] & v[i].wrapping_neg();
        for j in i + 1..v.len() {
            if v[j] & pivot != 0 {
                v[j] ^= v[i];
            }
        }
        rank += 1;
    }
    rank
}

/// Contents of a matrix file: the matrix and, if a blank line was present, the
/// number of rows above it (the declared `G1`).
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixFile {
    pub matrix: GF2Matrix,
    pub declared_g1_rows: Option<usize>,
}

/// Parses the ASCII matrix format: one `'0'/'1'` row per line, optionally one
/// blank line between `G1` and `G0`. Leading and trailing blank lines are ignored.
pub fn parse_matrix_file(text: &str) -> Result<MatrixFile, TriorthoError> {
    let lines: Vec<&str> = text.lines().map(str::trim).collect();
    let first = lines.iter().position(|l| !l.is_empty()).ok_or(TriorthoError::Empty)?;
    let last = lines.iter().rposition(|l| !l.is_empty()).expect("non-empty");
    let mut rows = Vec::new();
    let mut split = None;
    let mut ncols = None;
    for (i, line) in lines.iter().enumerate().take(last + 1).skip(first) {
        if line.is_empty() {
            if split.is_some() {
                return Err(TriorthoError::ExtraSeparator);
            }
            split = Some(rows.len());
            continue;
        }
        let w = *ncols.get_or_insert(line.chars().count());
        if w > MAX_COLS {
            return Err(TriorthoError::TooWide(w));
        }
        if line.chars().count() != w {
            return Err(TriorthoError::RaggedRow { row: rows.len(), expected: w, got: line.chars().count() });
        }
        rows.push(parse_row(line, i + 1)?);
    }
    Ok(MatrixFile { matrix: GF2Matrix::new(ncols.unwrap_or(0), rows)?, declared_g1_rows: split })
}

/// `[[n, k, d]]` data read off a triorthogonal matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeParams {
    pub n: usize,
    /// Number of odd-weight rows.
    pub k: usize,
    /// Every column meets some even-weight row.
    pub distance_at_least_2: bool,
}

pub fn code_params(g: &GF2Matrix) -> Result<CodeParams, TriorthoError> {
    let rank = g.rank();
    if rank < g.num_rows() {
        return Err(TriorthoError::DependentRows { rank, rows: g.num_rows() });
    }
    let (g1, g0) = g.split_by_parity();
    let support = g0.iter().fold(0u64, |acc, r| acc | r);
    Ok(CodeParams { n: g.num_cols(), k: g1.len(), distance_at_least_2: support == col_mask(g.num_cols()) })
}

/// Largest Hamming weight in the row span of `g0` (0 for no rows).
pub fn max_span_weight(g0: &[u64]) -> Result<u32, TriorthoError> {
    if g0.len() > MAX_SPAN_ROWS {
        return Err(TriorthoError::TooManyRows(g0.len()));
    }
    // Gray-code walk: one row toggled per step
    let mut acc = 0u64;
    let mut best = 0;
    for i in 1u64..1 << g0.len() {
        acc ^= g0[i.trailing_zeros() as usize];
        best = best.max(acc.count_ones());
    }
    Ok(best)
}
