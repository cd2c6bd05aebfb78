//! Solution pipeline for flexible systems: feasibility space, constraint
//! rows, integrated system, increasing row-echelon elimination with column
//! permutation, consistency, the closed-form parametric solution, and
//! solution-set algebra (membership, canonicalization, equivalence).

use std::fmt;

use thiserror::Error;

use crate::extlinalg::{ExternalMatrix, ExternalVector};
use crate::extnum::{
    ntx_div, ntx_min, ntx_scale, EpsScalar, ExternalScalar, Neutrix, NeutrixKind,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("right-hand side neutrix may not be the full line")]
    FullLineRhs,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("system is inconsistent")]
    InconsistentSystem,
}

// ---------------------------------------------------------------------------
// Exact linear algebra over the scalar field
// ---------------------------------------------------------------------------

pub(crate) fn vec_zero(n: usize) -> Vec<EpsScalar> {
    vec![EpsScalar::zero(); n]
}

pub(crate) fn vec_sub_scaled(v: &mut [EpsScalar], c: &EpsScalar, w: &[EpsScalar]) {
    if c.is_zero() {
        return;
    }
    for (a, b) in v.iter_mut().zip(w) {
        *a = a.sub(&b.mul(c));
    }
}

pub(crate) fn vec_scale(v: &[EpsScalar], c: &EpsScalar) -> Vec<EpsScalar> {
    v.iter().map(|a| a.mul(c)).collect()
}

pub(crate) fn vec_sub(v: &[EpsScalar], w: &[EpsScalar]) -> Vec<EpsScalar> {
    v.iter().zip(w).map(|(a, b)| a.sub(b)).collect()
}

/// Solves `sum_j t_j cols[j] = rhs` exactly. Returns None when rhs is
/// outside the column span; the coefficients are unique when the columns are
/// independent.
pub(crate) fn solve_in_span(cols: &[Vec<EpsScalar>], rhs: &[EpsScalar]) -> Option<Vec<EpsScalar>> {
    let n = rhs.len();
    let g = cols.len();
    // augmented rows: n equations, g unknowns
    let mut a: Vec<Vec<EpsScalar>> = (0..n)
        .map(|i| {
            let mut row: Vec<EpsScalar> = cols.iter().map(|c| c[i].clone()).collect();
            row.push(rhs[i].clone());
            row
        })
        .collect();
    let mut pivot_rows: Vec<(usize, usize)> = Vec::new(); // (row, col)
    let mut row = 0;
    for col in 0..g {
        let p = (row..n).find(|&i| !a[i][col].is_zero());
        let Some(p) = p else { continue };
        a.swap(row, p);
        let inv = a[row][col].recip().unwrap();
        a[row] = a[row].iter().map(|x| x.mul(&inv)).collect();
        for i in 0..n {
            if i != row && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                let pivot_row = a[row].clone();
                vec_sub_scaled(&mut a[i], &f, &pivot_row);
            }
        }
        pivot_rows.push((row, col));
        row += 1;
    }
    // rows beyond the pivots must have zero rhs
    for r in a.iter().skip(row) {
        if !r[g].is_zero() {
            return None;
        }
    }
    let mut t = vec_zero(g);
    for &(r, c) in &pivot_rows {
        t[c] = a[r][g].clone();
    }
    Some(t)
}

/// Reduced row-echelon basis of the span of the given vectors; pivots are 1
/// with zeros above and below, rows ordered by pivot column.
pub(crate) fn rref_basis(vectors: &[Vec<EpsScalar>], n: usize) -> Vec<Vec<EpsScalar>> {
    let mut rows: Vec<Vec<EpsScalar>> = vectors.to_vec();
    let mut out: Vec<Vec<EpsScalar>> = Vec::new();
    for col in 0..n {
        let p = rows
            .iter()
            .position(|r| !r[col].is_zero() && r[..col].iter().all(EpsScalar::is_zero));
        let Some(p) = p else { continue };
        let mut pivot = rows.swap_remove(p);
        let inv = pivot[col].recip().unwrap();
        pivot = pivot.iter().map(|x| x.mul(&inv)).collect();
        for r in rows.iter_mut() {
            let f = r[col].clone();
            vec_sub_scaled(r, &f, &pivot);
        }
        for r in out.iter_mut() {
            let f = r[col].clone();
            vec_sub_scaled(r, &f, &pivot);
        }
        out.push(pivot);
    }
    out
}

pub(crate) fn rank_of(vectors: &[Vec<EpsScalar>], n: usize) -> usize {
    rref_basis(vectors, n).len()
}

// ---------------------------------------------------------------------------
// FlexibleSystem
// ---------------------------------------------------------------------------

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FlexibleSystem {
    a: ExternalMatrix,
    b: ExternalVector,
}

impl FlexibleSystem {
    pub fn new(a: ExternalMatrix, b: ExternalVector) -> Result<Self, SolverError> {
        if a.rows() != b.len() {
            return Err(SolverError::DimensionMismatch(format!(
                "{} coefficient rows vs {} right-hand entries",
                a.rows(),
                b.len()
            )));
        }
        if b.entries().iter().any(|e| e.neutrix() == Neutrix::FullLine) {
            return Err(SolverError::FullLineRhs);
        }
        Ok(FlexibleSystem { a, b })
    }

    pub fn coefficients(&self) -> &ExternalMatrix {
        &self.a
    }

    pub fn rhs(&self) -> &ExternalVector {
        &self.b
    }

    pub fn rows(&self) -> usize {
        self.a.rows()
    }

    pub fn unknowns(&self) -> usize {
        self.a.cols()
    }
}

/// Componentwise feasibility constraints F_j = min_i B_i : A_ij.
pub fn feasibility_space(s: &FlexibleSystem) -> Vec<Neutrix> {
    (0..s.unknowns())
        .map(|j| {
            (0..s.rows())
                .map(|i| ntx_div(s.b.entry(i).neutrix(), s.a.entry(i, j).neutrix()))
                .fold(Neutrix::FullLine, ntx_min)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// IntegratedSystem
// ---------------------------------------------------------------------------

/// Representative system with the 0-1 constraint rows appended: rows
/// `0..m` are the representative matrix, rows `m..m+k` encode the feasibility
/// constraints that are proper subsets of the full line.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntegratedSystem {
    p: Vec<Vec<EpsScalar>>,
    rhs: Vec<ExternalScalar>,
    base_rows: usize,
    constrained_cols: Vec<usize>,
    feasibility: Vec<Neutrix>,
}

impl IntegratedSystem {
    pub fn coefficient_rows(&self) -> &[Vec<EpsScalar>] {
        &self.p
    }

    pub fn rhs(&self) -> &[ExternalScalar] {
        &self.rhs
    }

    pub fn rows(&self) -> usize {
        self.p.len()
    }

    pub fn unknowns(&self) -> usize {
        self.p.first().map_or(0, Vec::len)
    }

    pub fn base_rows(&self) -> usize {
        self.base_rows
    }

    pub fn constraint_dim(&self) -> usize {
        self.constrained_cols.len()
    }

    pub fn constrained_cols(&self) -> &[usize] {
        &self.constrained_cols
    }

    pub fn feasibility(&self) -> &[Neutrix] {
        &self.feasibility
    }
}

/// Builds the integrated system from an explicit representative matrix; the
/// entries must be members of the corresponding coefficients.
pub fn integrate_with(s: &FlexibleSystem, p: Vec<Vec<EpsScalar>>) -> IntegratedSystem {
    let n = s.unknowns();
    let f = feasibility_space(s);
    let mut rows = p;
    let mut rhs: Vec<ExternalScalar> = s.b.entries().to_vec();
    let mut constrained = Vec::new();
    for (j, fj) in f.iter().enumerate() {
        if *fj != Neutrix::FullLine {
            let mut row = vec_zero(n);
            row[j] = EpsScalar::one();
            rows.push(row);
            rhs.push(ExternalScalar::neutricial(*fj));
            constrained.push(j);
        }
    }
    IntegratedSystem {
        p: rows,
        rhs,
        base_rows: s.rows(),
        constrained_cols: constrained,
        feasibility: f,
    }
}

pub fn integrate(s: &FlexibleSystem) -> IntegratedSystem {
    integrate_with(s, s.a.representative())
}

// ---------------------------------------------------------------------------
// EchelonSystem
// ---------------------------------------------------------------------------

/// Row-echelon system `Q y in C` with unit pivots on the diagonal of the
/// first r rows, nondecreasing right-hand neutrices over the pivot rows, and
/// the column permutation `cols` mapping echelon column j to the original
/// variable cols[j] (y_j = x_{cols[j]}).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EchelonSystem {
    q: Vec<Vec<EpsScalar>>,
    c: Vec<ExternalScalar>,
    cols: Vec<usize>,
    r: usize,
}

impl EchelonSystem {
    pub fn matrix(&self) -> &[Vec<EpsScalar>] {
        &self.q
    }

    pub fn rhs(&self) -> &[ExternalScalar] {
        &self.c
    }

    /// cols[j] is the original variable index placed at echelon column j.
    pub fn permutation(&self) -> &[usize] {
        &self.cols
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    pub fn rows(&self) -> usize {
        self.q.len()
    }

    pub fn unknowns(&self) -> usize {
        self.cols.len()
    }

    /// Maps a point of original variables to echelon variables.
    pub fn permute_point(&self, x: &[EpsScalar]) -> Vec<EpsScalar> {
        self.cols.iter().map(|&j| x[j].clone()).collect()
    }

    /// Maps a point of echelon variables back to original variables.
    pub fn unpermute_point(&self, y: &[EpsScalar]) -> Vec<EpsScalar> {
        let mut x = vec_zero(y.len());
        for (j, &orig) in self.cols.iter().enumerate() {
            x[orig] = y[j].clone();
        }
        x
    }
}

fn row_is_zero(row: &[EpsScalar]) -> bool {
    row.iter().all(EpsScalar::is_zero)
}

/// Position of the entry of maximal absolute value in row[from..], lowest
/// column on ties.
fn max_abs_col(row: &[EpsScalar], from: usize) -> Option<usize> {
    let mut best: Option<usize> = None;
    for j in from..row.len() {
        if row[j].is_zero() {
            continue;
        }
        match best {
            None => best = Some(j),
            Some(b) => {
                if row[j].abs() > row[b].abs() {
                    best = Some(j);
                }
            }
        }
    }
    best
}

/// Gaussian elimination into increasing row-echelon form. Each stage scales
/// every remaining nonzero row by its largest entry, then promotes a row
/// whose right-hand neutrix is inclusion-minimal (preferring neutricial
/// right-hand sides on ties, then the lowest row index), pivots on a unit
/// entry and eliminates below it.
#[allow(clippy::needless_range_loop)]
pub fn to_increasing_echelon(i: &IntegratedSystem) -> EchelonSystem {
    let n = i.unknowns();
    let q_rows = i.rows();
    let mut q: Vec<Vec<EpsScalar>> = i.p.clone();
    let mut c: Vec<ExternalScalar> = i.rhs.clone();
    let mut cols: Vec<usize> = (0..n).collect();
    let mut s = 0usize;

    while s < q_rows && s < n {
        // (a) stable-partition: all-zero coefficient rows of the active block
        // sink to the bottom
        let mut live: Vec<usize> = Vec::new();
        let mut dead: Vec<usize> = Vec::new();
        for idx in s..q_rows {
            if row_is_zero(&q[idx][s..]) {
                dead.push(idx);
            } else {
                live.push(idx);
            }
        }
        if live.is_empty() {
            break;
        }
        let order: Vec<usize> = live.iter().chain(dead.iter()).copied().collect();
        let mut new_q: Vec<Vec<EpsScalar>> = Vec::with_capacity(q_rows - s);
        let mut new_c: Vec<ExternalScalar> = Vec::with_capacity(q_rows - s);
        for &idx in &order {
            new_q.push(q[idx].clone());
            new_c.push(c[idx].clone());
        }
        for (off, (row, rhs)) in new_q.into_iter().zip(new_c).enumerate() {
            q[s + off] = row;
            c[s + off] = rhs;
        }
        let live_count = live.len();

        // (b) scale each active nonzero row by its maximal entry
        for idx in s..s + live_count {
            let j = max_abs_col(&q[idx], s).unwrap();
            let scaler = q[idx][j].clone();
            if !scaler.is_one() {
                let inv = scaler.recip().unwrap();
                q[idx] = q[idx].iter().map(|x| x.mul(&inv)).collect();
                c[idx] = c[idx].scale(&inv);
            }
        }

        // (c) row with inclusion-minimal rhs neutrix; prefer neutricial rhs,
        // then lowest index
        let mut pick = s;
        for idx in s + 1..s + live_count {
            let (na, nb) = (c[idx].neutrix(), c[pick].neutrix());
            let better = na < nb
                || (na == nb && c[idx].is_neutricial() && !c[pick].is_neutricial());
            if better {
                pick = idx;
            }
        }
        q.swap(s, pick);
        c.swap(s, pick);

        // (d) unit pivot of maximal absolute value, lowest column; sign
        // normalized to +1; its column swapped into position s
        let j = max_abs_col(&q[s], s).unwrap();
        if q[s][j].sign() < 0 {
            q[s] = q[s].iter().map(EpsScalar::neg).collect();
            c[s] = c[s].neg();
        }
        if j != s {
            for row in q.iter_mut() {
                row.swap(s, j);
            }
            cols.swap(s, j);
        }

        // (e) eliminate below the pivot
        for idx in s + 1..q_rows {
            let f = q[idx][s].clone();
            if f.is_zero() {
                continue;
            }
            let pivot_row = q[s].clone();
            vec_sub_scaled(&mut q[idx], &f, &pivot_row);
            q[idx][s] = EpsScalar::zero();
            c[idx] = c[idx].sub(&c[s].scale(&f));
        }
        s += 1;
    }

    EchelonSystem { q, c, cols, r: s }
}

// ---------------------------------------------------------------------------
// Consistency and closed-form solution
// ---------------------------------------------------------------------------

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Consistency {
    Consistent,
    /// 0-based echelon row indices whose right-hand side is zeroless.
    Inconsistent(Vec<usize>),
}

pub fn consistency_check(e: &EchelonSystem) -> Consistency {
    let offenders: Vec<usize> = (e.r..e.rows())
        .filter(|&i| !e.c[i].is_neutricial())
        .collect();
    if offenders.is_empty() {
        Consistency::Consistent
    } else {
        Consistency::Inconsistent(offenders)
    }
}

/// One generator of the modular part: the module N * direction.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ModularGen {
    pub neutrix: Neutrix,
    pub direction: Vec<EpsScalar>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Status {
    Consistent,
    Inconsistent,
}

/// Solution set in generator form: support + sum of modular modules + linear
/// span, over the permutation-free original variables.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SolutionSet {
    pub status: Status,
    pub support: Vec<EpsScalar>,
    pub modular_gens: Vec<ModularGen>,
    pub linear_gens: Vec<Vec<EpsScalar>>,
    pub rank: usize,
    /// 0-based echelon rows with zeroless right-hand sides (inconsistent
    /// case only).
    pub offending_rows: Vec<usize>,
}

impl SolutionSet {
    pub fn inconsistent(n: usize, rank: usize, offending_rows: Vec<usize>) -> Self {
        SolutionSet {
            status: Status::Inconsistent,
            support: vec_zero(n),
            modular_gens: Vec::new(),
            linear_gens: Vec::new(),
            rank,
            offending_rows,
        }
    }

    pub fn is_consistent(&self) -> bool {
        self.status == Status::Consistent
    }

    pub fn unknowns(&self) -> usize {
        self.support.len()
    }

    fn all_directions(&self) -> Vec<Vec<EpsScalar>> {
        self.modular_gens
            .iter()
            .map(|g| g.direction.clone())
            .chain(self.linear_gens.iter().cloned())
            .collect()
    }
}

/// Inverse of the top-left r x r block of the echelon matrix, which is upper
/// triangular with unit diagonal; computed by back-substitution.
#[allow(clippy::needless_range_loop)]
fn principal_inverse(e: &EchelonSystem) -> Vec<Vec<EpsScalar>> {
    let r = e.r;
    // columns x of Q^(r) x = e_i, solved bottom-up
    let mut inv = vec![vec_zero(r); r];
    for i in 0..r {
        let mut x = vec_zero(r);
        for row in (0..r).rev() {
            let mut v = if row == i {
                EpsScalar::one()
            } else {
                EpsScalar::zero()
            };
            for col in row + 1..r {
                v = v.sub(&e.q[row][col].mul(&x[col]));
            }
            x[row] = v;
        }
        for row in 0..r {
            inv[row][i] = x[row].clone();
        }
    }
    inv
}

pub fn solve_closed_form(e: &EchelonSystem) -> Result<SolutionSet, SolverError> {
    if let Consistency::Inconsistent(_) = consistency_check(e) {
        return Err(SolverError::InconsistentSystem);
    }
    let n = e.unknowns();
    let r = e.r;
    let inv = principal_inverse(e);
    let apply_inv = |v: &[EpsScalar]| -> Vec<EpsScalar> {
        (0..r)
            .map(|i| {
                let mut acc = EpsScalar::zero();
                for (j, vj) in v.iter().enumerate() {
                    acc = acc.add(&inv[i][j].mul(vj));
                }
                acc
            })
            .collect()
    };

    let c_head: Vec<EpsScalar> = (0..r).map(|i| e.c[i].rep().clone()).collect();
    let mut y_support = apply_inv(&c_head);
    y_support.resize(n, EpsScalar::zero());
    let support = e.unpermute_point(&y_support);

    let mut modular_gens = Vec::new();
    for i in 0..r {
        let ntx = e.c[i].neutrix();
        if ntx == Neutrix::Zero {
            continue;
        }
        let mut ei = vec_zero(r);
        ei[i] = EpsScalar::one();
        let mut y_dir = apply_inv(&ei);
        y_dir.resize(n, EpsScalar::zero());
        modular_gens.push(ModularGen {
            neutrix: ntx,
            direction: e.unpermute_point(&y_dir),
        });
    }

    let mut linear_gens = Vec::new();
    for k in r..n {
        let col: Vec<EpsScalar> = (0..r).map(|i| e.q[i][k].clone()).collect();
        let mut y_dir: Vec<EpsScalar> = apply_inv(&col).iter().map(EpsScalar::neg).collect();
        y_dir.resize(n, EpsScalar::zero());
        y_dir[k] = EpsScalar::one();
        linear_gens.push(e.unpermute_point(&y_dir));
    }

    Ok(SolutionSet {
        status: Status::Consistent,
        support,
        modular_gens,
        linear_gens,
        rank: r,
        offending_rows: Vec::new(),
    })
}

/// All intermediate stages of one solve, kept for reporting.
pub struct Pipeline {
    pub integrated: IntegratedSystem,
    pub echelon: EchelonSystem,
    pub solution: SolutionSet,
}

/// Full pipeline with an explicit representative matrix.
pub fn run_pipeline_with(s: &FlexibleSystem, p: Vec<Vec<EpsScalar>>) -> Pipeline {
    let integrated = integrate_with(s, p);
    let echelon = to_increasing_echelon(&integrated);
    let solution = match consistency_check(&echelon) {
        Consistency::Consistent => solve_closed_form(&echelon).unwrap(),
        Consistency::Inconsistent(rows) => {
            SolutionSet::inconsistent(s.unknowns(), echelon.rank(), rows)
        }
    };
    Pipeline {
        integrated,
        echelon,
        solution,
    }
}

pub fn run_pipeline(s: &FlexibleSystem) -> Pipeline {
    run_pipeline_with(s, s.a.representative())
}

pub fn solve_with(s: &FlexibleSystem, p: Vec<Vec<EpsScalar>>) -> SolutionSet {
    run_pipeline_with(s, p).solution
}

pub fn solve(s: &FlexibleSystem) -> SolutionSet {
    solve_with(s, s.a.representative())
}

// ---------------------------------------------------------------------------
// Solution-set algebra
// ---------------------------------------------------------------------------

/// Decides whether a point belongs to the solution set by decomposing it in
/// the generator basis and checking the modular coefficients against their
/// neutrices.
pub fn solution_membership(z: &SolutionSet, x: &[EpsScalar]) -> bool {
    if !z.is_consistent() {
        return false;
    }
    let diff = vec_sub(x, &z.support);
    let dirs = z.all_directions();
    if dirs.is_empty() {
        return diff.iter().all(EpsScalar::is_zero);
    }
    let Some(t) = solve_in_span(&dirs, &diff) else {
        return false;
    };
    z.modular_gens
        .iter()
        .enumerate()
        .all(|(i, g)| g.neutrix.contains(&t[i]))
}

/// Truncation of a coefficient modulo a neutrix: the part of its Laurent
/// expansion outside the neutrix.
fn reduce_mod_neutrix(t: &EpsScalar, n: Neutrix) -> EpsScalar {
    match n {
        Neutrix::Zero => t.clone(),
        Neutrix::FullLine => EpsScalar::zero(),
        Neutrix::Scaled(m, kind) => {
            let cutoff = match kind {
                NeutrixKind::Oslash => m,
                NeutrixKind::Pound => m - 1,
            };
            t.laurent_truncate(cutoff)
        }
    }
}

/// Pivot of a direction: the first coordinate of minimal valuation.
fn direction_pivot(v: &[EpsScalar]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (j, x) in v.iter().enumerate() {
        let Some(val) = x.valuation() else { continue };
        match best {
            None => best = Some(j),
            Some(b) => {
                if val < v[b].valuation().unwrap() {
                    best = Some(j);
                }
            }
        }
    }
    best
}

fn lex_cmp(a: &[EpsScalar], b: &[EpsScalar]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.compare(y);
        if o != std::cmp::Ordering::Equal {
            return o;
        }
    }
    std::cmp::Ordering::Equal
}

fn canonical_pass(z: &SolutionSet) -> SolutionSet {
    let n = z.unknowns();
    // 1. linear span in reduced row-echelon form
    let linear = rref_basis(&z.linear_gens, n);
    let lin_pivots: Vec<usize> = linear
        .iter()
        .map(|r| r.iter().position(|x| !x.is_zero()).unwrap())
        .collect();

    // 2. modular directions reduced modulo the linear span, then normalized
    // so the pivot coordinate is 1 (folding the scaling into the neutrix)
    let mut gens: Vec<ModularGen> = Vec::new();
    for g in &z.modular_gens {
        let mut v = g.direction.clone();
        for (row, &p) in linear.iter().zip(&lin_pivots) {
            let f = v[p].clone();
            vec_sub_scaled(&mut v, &f, row);
        }
        let mut ntx = g.neutrix;
        if let Some(p) = direction_pivot(&v) {
            let t = v[p].clone();
            ntx = ntx_scale(&t, ntx);
            let inv = t.recip().unwrap();
            v = vec_scale(&v, &inv);
            if ntx != Neutrix::Zero {
                gens.push(ModularGen {
                    neutrix: ntx,
                    direction: v,
                });
            }
        }
    }

    // 3. sort by decreasing neutrix, then pivot column, then direction
    gens.sort_by(|a, b| {
        b.neutrix
            .cmp(&a.neutrix)
            .then_with(|| direction_pivot(&a.direction).cmp(&direction_pivot(&b.direction)))
            .then_with(|| lex_cmp(&a.direction, &b.direction))
    });

    // 4. clear pivot coordinates across generators; the admissible
    // multipliers against a module with neutrix N_o form the quotient
    // N_o : N_g, so the part of the coefficient inside that quotient is
    // subtracted
    let mut out: Vec<ModularGen> = Vec::new();
    for mut g in gens {
        for o in &out {
            let p = direction_pivot(&o.direction).unwrap();
            let f = g.direction[p].clone();
            if f.is_zero() {
                continue;
            }
            let adm = ntx_div(o.neutrix, g.neutrix);
            let c = f.sub(&reduce_mod_neutrix(&f, adm));
            if !c.is_zero() {
                vec_sub_scaled(&mut g.direction, &c, &o.direction);
            }
        }
        if let Some(p) = direction_pivot(&g.direction) {
            let t = g.direction[p].clone();
            g.neutrix = ntx_scale(&t, g.neutrix);
            let inv = t.recip().unwrap();
            g.direction = vec_scale(&g.direction, &inv);
            if g.neutrix != Neutrix::Zero {
                out.push(g);
            }
        }
    }
    // clearing may also apply backwards (a later, smaller module absorbing a
    // coordinate of an earlier one) when the multiple is small enough
    let snapshot = out.clone();
    for (i, g) in out.iter_mut().enumerate() {
        for (j, o) in snapshot.iter().enumerate() {
            if i == j {
                continue;
            }
            let p = direction_pivot(&o.direction).unwrap();
            if direction_pivot(&g.direction) == Some(p) {
                continue;
            }
            let f = g.direction[p].clone();
            if f.is_zero() {
                continue;
            }
            let adm = ntx_div(o.neutrix, g.neutrix);
            let c = f.sub(&reduce_mod_neutrix(&f, adm));
            if !c.is_zero() {
                vec_sub_scaled(&mut g.direction, &c, &o.direction);
            }
        }
    }

    // 5. support reduced modulo the generators and the linear span
    let mut support = z.support.clone();
    for (row, &p) in linear.iter().zip(&lin_pivots) {
        let f = support[p].clone();
        vec_sub_scaled(&mut support, &f, row);
    }
    for g in &out {
        let p = direction_pivot(&g.direction).unwrap();
        let t = support[p].clone();
        let inside = t.sub(&reduce_mod_neutrix(&t, g.neutrix));
        vec_sub_scaled(&mut support, &inside, &g.direction);
    }

    SolutionSet {
        status: Status::Consistent,
        support,
        modular_gens: out,
        linear_gens: linear,
        rank: z.rank,
        offending_rows: Vec::new(),
    }
}

/// Normal form of a solution set: deterministic generator basis denoting the
/// same point set. Iterates a reduction pass to a fixed point.
pub fn canonicalize_solution(z: &SolutionSet) -> SolutionSet {
    if !z.is_consistent() {
        return z.clone();
    }
    let mut cur = canonical_pass(z);
    for _ in 0..32 {
        let next = canonical_pass(&cur);
        if next == cur {
            return cur;
        }
        cur = next;
    }
    debug_assert!(false, "canonicalization did not converge");
    cur
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Equivalence {
    Equal,
    /// The named side is a strict subset of the other.
    ProperSubset(Side),
    Incomparable,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Side {
    First,
    Second,
}

/// Set inclusion z1 within z2: the support must belong to z2 and every
/// generator module of z1 must embed into z2's generator frame.
fn solution_subset(z1: &SolutionSet, z2: &SolutionSet) -> bool {
    if !solution_membership(z2, &z1.support) {
        return false;
    }
    let dirs2 = z2.all_directions();
    let m2 = z2.modular_gens.len();
    // each generator of z1, with linear modules treated as full-line
    let gens1 = z1
        .modular_gens
        .iter()
        .map(|g| (g.neutrix, g.direction.clone()))
        .chain(
            z1.linear_gens
                .iter()
                .map(|v| (Neutrix::FullLine, v.clone())),
        );
    for (ntx, v) in gens1 {
        if dirs2.is_empty() {
            if v.iter().all(EpsScalar::is_zero) {
                continue;
            }
            return false;
        }
        let Some(t) = solve_in_span(&dirs2, &v) else {
            return false;
        };
        for (i, ti) in t.iter().take(m2).enumerate() {
            if !ntx_scale(ti, ntx).subset_of(&z2.modular_gens[i].neutrix) {
                return false;
            }
        }
    }
    true
}

pub fn solution_equiv(z1: &SolutionSet, z2: &SolutionSet) -> Result<Equivalence, SolverError> {
    if z1.unknowns() != z2.unknowns() {
        return Err(SolverError::DimensionMismatch(format!(
            "{} vs {} unknowns",
            z1.unknowns(),
            z2.unknowns()
        )));
    }
    match (z1.is_consistent(), z2.is_consistent()) {
        (false, false) => return Ok(Equivalence::Equal),
        (false, true) => return Ok(Equivalence::ProperSubset(Side::First)),
        (true, false) => return Ok(Equivalence::ProperSubset(Side::Second)),
        (true, true) => {}
    }
    let sub12 = solution_subset(z1, z2);
    let sub21 = solution_subset(z2, z1);
    Ok(match (sub12, sub21) {
        (true, true) => Equivalence::Equal,
        (true, false) => Equivalence::ProperSubset(Side::First),
        (false, true) => Equivalence::ProperSubset(Side::Second),
        (false, false) => Equivalence::Incomparable,
    })
}

/// Canonical basis of the linear part.
pub fn linear_part(z: &SolutionSet) -> Vec<Vec<EpsScalar>> {
    rref_basis(&z.linear_gens, z.unknowns())
}

/// Number of modular generators in the canonical form.
pub fn modular_dimension(z: &SolutionSet) -> usize {
    canonicalize_solution(z).modular_gens.len()
}

impl fmt::Display for Equivalence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Equivalence::Equal => write!(f, "Equal"),
            Equivalence::ProperSubset(Side::First) => {
                write!(f, "ProperSubset(first \u{2282} second)")
            }
            Equivalence::ProperSubset(Side::Second) => {
                write!(f, "ProperSubset(second \u{2282} first)")
            }
            Equivalence::Incomparable => write!(f, "Incomparable"),
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::First => write!(f, "first"),
            Side::Second => write!(f, "second"),
        }
    }
}
