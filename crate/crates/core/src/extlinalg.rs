//! External vectors and matrices: representative extraction, reducedness and
//! limitedness predicates, external determinants and minors, matrix-point
//! application and inclusion checking.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::extnum::{ntx_sum, EpsScalar, ExternalScalar, Neutrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinAlgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("determinant size {0} exceeds configured bound {1}")]
    DetBoundExceeded(usize, usize),
}

/// Default cap on determinant size; the signed-product expansion is
/// factorial in n.
pub const DEFAULT_DET_BOUND: usize = 8;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExternalVector {
    entries: Vec<ExternalScalar>,
}

impl ExternalVector {
    pub fn new(entries: Vec<ExternalScalar>) -> Self {
        ExternalVector { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[ExternalScalar] {
        &self.entries
    }

    pub fn entry(&self, i: usize) -> &ExternalScalar {
        &self.entries[i]
    }

    pub fn representative(&self) -> Vec<EpsScalar> {
        self.entries.iter().map(|e| e.rep().clone()).collect()
    }

    pub fn neutrices(&self) -> Vec<Neutrix> {
        self.entries.iter().map(|e| e.neutrix()).collect()
    }
}

impl fmt::Display for ExternalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExternalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<ExternalScalar>, // row-major
}

impl ExternalMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<ExternalScalar>) -> Self {
        assert_eq!(entries.len(), rows * cols, "non-rectangular entry list");
        ExternalMatrix { rows, cols, entries }
    }

    pub fn from_rows(rows: Vec<Vec<ExternalScalar>>) -> Self {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == n), "ragged rows");
        ExternalMatrix::new(m, n, rows.into_iter().flatten().collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, i: usize, j: usize) -> &ExternalScalar {
        &self.entries[i * self.cols + j]
    }

    pub fn set_entry(&mut self, i: usize, j: usize, v: ExternalScalar) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[ExternalScalar] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    /// Entrywise canonical representative.
    pub fn representative(&self) -> Vec<Vec<EpsScalar>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|e| e.rep().clone()).collect())
            .collect()
    }

    pub fn neutrix_grid(&self) -> Vec<Vec<Neutrix>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|e| e.neutrix()).collect())
            .collect()
    }

    /// Entrywise set inclusion.
    pub fn subset_of(&self, other: &ExternalMatrix) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(a, b)| a.subset_of(b))
    }
}

/// Compares |a| and |b|: representatives first, then neutrices by inclusion
/// (the wider neutrix counts as larger when the representatives tie).
pub fn abs_cmp(a: &ExternalScalar, b: &ExternalScalar) -> Ordering {
    a.rep()
        .abs()
        .compare(&b.rep().abs())
        .then_with(|| a.neutrix().cmp(&b.neutrix()))
}

/// Summary magnitudes of a matrix used by reducedness and rank-condition
/// checks.
#[derive(Clone, Debug)]
pub struct MatrixStats {
    pub max_abs_entry: ExternalScalar,
    pub max_neutrix: Neutrix,
    pub row_max_neutrix: Vec<Neutrix>,
}

impl MatrixStats {
    pub fn of(m: &ExternalMatrix) -> Self {
        assert!(m.rows() > 0 && m.cols() > 0, "empty matrix");
        let mut max_abs = m.entry(0, 0).abs();
        let mut max_ntx = Neutrix::Zero;
        let mut row_max = Vec::with_capacity(m.rows());
        for i in 0..m.rows() {
            let mut rn = Neutrix::Zero;
            for j in 0..m.cols() {
                let e = m.entry(i, j);
                if abs_cmp(e, &max_abs) == Ordering::Greater {
                    max_abs = e.abs();
                }
                rn = ntx_sum(rn, e.neutrix());
            }
            max_ntx = ntx_sum(max_ntx, rn);
            row_max.push(rn);
        }
        MatrixStats {
            max_abs_entry: max_abs,
            max_neutrix: max_ntx,
            row_max_neutrix: row_max,
        }
    }
}

/// Largest entry neutrix of column j over the given row range.
pub fn col_max_neutrix(m: &ExternalMatrix, j: usize, rows: std::ops::Range<usize>) -> Neutrix {
    rows.fold(Neutrix::Zero, |acc, i| ntx_sum(acc, m.entry(i, j).neutrix()))
}

/// Reduced: the top-left entry is 1 + (neutrix inside the infinitesimals)
/// and no entry exceeds it in absolute value.
pub fn is_reduced(m: &ExternalMatrix) -> bool {
    if m.rows() == 0 || m.cols() == 0 {
        return false;
    }
    let a11 = m.entry(0, 0);
    if !a11.rep().is_one() || !a11.neutrix().subset_of(&Neutrix::oslash()) {
        return false;
    }
    let one = EpsScalar::one();
    m.entries
        .iter()
        .all(|e| e.rep().abs() <= one && abs_cmp(e, a11) != Ordering::Greater)
}

/// Limited: every element of every entry is limited in magnitude.
pub fn is_limited(m: &ExternalMatrix) -> bool {
    m.entries.iter().all(|e| {
        e.neutrix().subset_of(&Neutrix::pound())
            && match e.rep().valuation() {
                None => true,
                Some(v) => v >= 0,
            }
    })
}

#[allow(clippy::too_many_arguments)]
fn det_recurse(
    m: &ExternalMatrix,
    rows: &[usize],
    cols: &[usize],
    used: &mut Vec<bool>,
    depth: usize,
    acc: &ExternalScalar,
    sign_flips: usize,
    total: &mut ExternalScalar,
) {
    if depth == rows.len() {
        let term = if sign_flips % 2 == 1 { acc.neg() } else { acc.clone() };
        *total = total.add(&term);
        return;
    }
    // track inversions incrementally for the permutation sign
    for (cj, &col) in cols.iter().enumerate() {
        if used[cj] {
            continue;
        }
        let inversions: usize = (cj + 1..cols.len()).filter(|&k| used[k]).count();
        used[cj] = true;
        let next = acc.mul(m.entry(rows[depth], col));
        det_recurse(m, rows, cols, used, depth + 1, &next, sign_flips + inversions, total);
        used[cj] = false;
    }
}

/// Determinant of a square selection via the signed-product expansion,
/// evaluated with external arithmetic.
pub fn ext_minor_bounded(
    m: &ExternalMatrix,
    rows: &[usize],
    cols: &[usize],
    bound: usize,
) -> Result<ExternalScalar, LinAlgError> {
    if rows.len() != cols.len() {
        return Err(LinAlgError::DimensionMismatch(format!(
            "minor selection {}x{}",
            rows.len(),
            cols.len()
        )));
    }
    if rows.len() > bound {
        return Err(LinAlgError::DetBoundExceeded(rows.len(), bound));
    }
    if rows.is_empty() {
        return Ok(ExternalScalar::exact(EpsScalar::one()));
    }
    let mut total = ExternalScalar::zero();
    let mut used = vec![false; cols.len()];
    det_recurse(
        m,
        rows,
        cols,
        &mut used,
        0,
        &ExternalScalar::exact(EpsScalar::one()),
        0,
        &mut total,
    );
    Ok(total)
}

pub fn ext_minor(
    m: &ExternalMatrix,
    rows: &[usize],
    cols: &[usize],
) -> Result<ExternalScalar, LinAlgError> {
    ext_minor_bounded(m, rows, cols, DEFAULT_DET_BOUND)
}

pub fn ext_det_bounded(m: &ExternalMatrix, bound: usize) -> Result<ExternalScalar, LinAlgError> {
    if m.rows() != m.cols() {
        return Err(LinAlgError::DimensionMismatch(format!(
            "determinant of {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let idx: Vec<usize> = (0..m.rows()).collect();
    ext_minor_bounded(m, &idx, &idx, bound)
}

pub fn ext_det(m: &ExternalMatrix) -> Result<ExternalScalar, LinAlgError> {
    ext_det_bounded(m, DEFAULT_DET_BOUND)
}

pub fn is_nonsingular(m: &ExternalMatrix) -> Result<bool, LinAlgError> {
    Ok(ext_det(m)?.is_zeroless())
}

/// Applies the matrix to a single point; each coordinate is one scalar so
/// the row sums are exact.
pub fn mat_apply(m: &ExternalMatrix, x: &[EpsScalar]) -> Result<ExternalVector, LinAlgError> {
    if x.len() != m.cols() {
        return Err(LinAlgError::DimensionMismatch(format!(
            "matrix has {} columns, point has {} coordinates",
            m.cols(),
            x.len()
        )));
    }
    let mut out = Vec::with_capacity(m.rows());
    for i in 0..m.rows() {
        let mut acc = ExternalScalar::zero();
        for (j, xj) in x.iter().enumerate() {
            acc = acc.add(&m.entry(i, j).scale(xj));
        }
        out.push(acc);
    }
    Ok(ExternalVector::new(out))
}

/// True when Mx lands inside B row by row.
pub fn inclusion_check(
    m: &ExternalMatrix,
    x: &[EpsScalar],
    b: &ExternalVector,
) -> Result<bool, LinAlgError> {
    if b.len() != m.rows() {
        return Err(LinAlgError::DimensionMismatch(format!(
            "matrix has {} rows, right-hand side has {}",
            m.rows(),
            b.len()
        )));
    }
    let lhs = mat_apply(m, x)?;
    Ok(lhs
        .entries()
        .iter()
        .zip(b.entries())
        .all(|(g, beta)| g.subset_of(beta)))
}
