//! Essential-part and feasibility criteria, and robustness matrices: the
//! inclusion-maximal neutrix perturbation of a real non-singular reduced
//! system that leaves its solution set unchanged.

use thiserror::Error;

use crate::extlinalg::{
    col_max_neutrix, ext_minor_bounded, is_limited, is_reduced, ExternalMatrix,
    ExternalVector, LinAlgError, DEFAULT_DET_BOUND,
};
use crate::extnum::{
    is_absorber, ntx_div, ntx_min, ntx_scale, ntx_sum, EpsScalar, ExternalScalar, Neutrix,
};
use crate::solver::{solution_equiv, solve, Equivalence, FlexibleSystem, SolverError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RobustnessError {
    #[error("rank parameter out of range")]
    BadRank,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("determinant is an absorber of the right-hand neutrix")]
    AbsorberDeterminant,
    #[error("matrix is not reduced")]
    NotReduced,
    #[error("matrix is singular")]
    Singular,
    #[error("hypothesis failed: {0}")]
    PreconditionFailed(String),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// Classical determinant over the scalar field by exact elimination.
pub(crate) fn det_eps(m: &[Vec<EpsScalar>]) -> EpsScalar {
    let n = m.len();
    let mut a: Vec<Vec<EpsScalar>> = m.to_vec();
    let mut det = EpsScalar::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&i| !a[i][col].is_zero()) else {
            return EpsScalar::zero();
        };
        if p != col {
            a.swap(col, p);
            det = det.neg();
        }
        let pivot = a[col][col].clone();
        det = det.mul(&pivot);
        let inv = pivot.recip().unwrap();
        for i in col + 1..n {
            let f = a[i][col].mul(&inv);
            if f.is_zero() {
                continue;
            }
            let prow = a[col].clone();
            crate::solver::vec_sub_scaled(&mut a[i], &f, &prow);
        }
    }
    det
}

// ---------------------------------------------------------------------------
// Essential parts
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EssentialVerdict {
    Essential,
    Inconclusive,
}

/// Report on whether the first r rows form an essential subsystem. The five
/// condition flags mirror the criterion's hypotheses; the existential
/// representative-rank condition is only checked with the canonical
/// representative, so a failure yields Inconclusive rather than a negative.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EssentialReport {
    pub r: usize,
    pub conditions: [bool; 5],
    pub verdict: EssentialVerdict,
}

pub fn essential_part_check(
    s: &FlexibleSystem,
    r: usize,
) -> Result<EssentialReport, RobustnessError> {
    let m = s.rows();
    let n = s.unknowns();
    if r < 1 || r >= m {
        return Err(RobustnessError::BadRank);
    }
    if r > n {
        return Err(RobustnessError::BadRank);
    }
    let a = s.coefficients();
    let b = s.rhs();

    // 1. top-left r x r block non-singular
    let sel: Vec<usize> = (0..r).collect();
    let head_det = ext_minor_bounded(a, &sel, &sel, DEFAULT_DET_BOUND)?;
    let c1 = head_det.is_zeroless();

    // 2. the canonical representative system has rank r
    let mut aug: Vec<Vec<EpsScalar>> = a.representative();
    for (row, beta) in aug.iter_mut().zip(b.entries()) {
        row.push(beta.rep().clone());
    }
    let c2 = crate::solver::rank_of(&aug, n + 1) == r;

    // right-hand neutrix magnitudes
    let b_head_max = (0..r).fold(Neutrix::Zero, |acc, i| ntx_sum(acc, b.entry(i).neutrix()));
    let b_tail_min = (r..m)
        .map(|i| b.entry(i).neutrix())
        .fold(Neutrix::FullLine, ntx_min);

    // 3. head determinant not an absorber of the head neutrix
    let c3 = c1 && !head_det.is_absorber_of(b_head_max).unwrap_or(true);

    // 4. head neutrix inside every tail neutrix
    let c4 = b_head_max.subset_of(&b_tail_min);

    // 5. per column, tail coefficient neutrices inside head ones
    let c5 = (0..n).all(|j| {
        col_max_neutrix(a, j, r..m).subset_of(&col_max_neutrix(a, j, 0..r))
    });

    let conditions = [c1, c2, c3, c4, c5];
    let all = is_limited(a) && conditions.iter().all(|&c| c);
    Ok(EssentialReport {
        r,
        conditions,
        verdict: if all {
            EssentialVerdict::Essential
        } else {
            EssentialVerdict::Inconclusive
        },
    })
}

/// All k-element subsets of 0..n in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = Vec::with_capacity(k);
    fn rec(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(n, k, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(n, k, 0, &mut cur, &mut out);
    out
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Feasibility {
    Feasible,
    Inconclusive,
}

/// Criterion for the constraint rows being negligible: the system is then
/// equivalent to its canonical representative system.
pub fn is_feasible_system(s: &FlexibleSystem) -> Result<Feasibility, RobustnessError> {
    is_feasible_system_with(s, DEFAULT_DET_BOUND)
}

/// Same criterion with an explicit bound on the minor order.
pub fn is_feasible_system_with(
    s: &FlexibleSystem,
    det_bound: usize,
) -> Result<Feasibility, RobustnessError> {
    let m = s.rows();
    let n = s.unknowns();
    if m > n {
        return Err(RobustnessError::DimensionMismatch(format!(
            "{m} rows exceed {n} unknowns"
        )));
    }
    let a = s.coefficients();
    if !is_limited(a) {
        return Ok(Feasibility::Inconclusive);
    }

    // maximal order-m minor in absolute value
    let rows: Vec<usize> = (0..m).collect();
    let mut max_minor: Option<ExternalScalar> = None;
    for cols in combinations(n, m) {
        let minor = ext_minor_bounded(a, &rows, &cols, det_bound)?;
        let cand = minor.abs();
        max_minor = Some(match max_minor {
            None => cand,
            Some(cur) => {
                if crate::extlinalg::abs_cmp(&cand, &cur) == std::cmp::Ordering::Greater {
                    cand
                } else {
                    cur
                }
            }
        });
    }
    let m_bar = max_minor.unwrap();
    if !m_bar.is_zeroless() {
        return Ok(Feasibility::Inconclusive);
    }

    let b_max = s
        .rhs()
        .entries()
        .iter()
        .fold(Neutrix::Zero, |acc, e| ntx_sum(acc, e.neutrix()));
    let f_min = crate::solver::feasibility_space(s)
        .into_iter()
        .fold(Neutrix::FullLine, ntx_min);

    let c1 = b_max.subset_of(&f_min);
    let c2 = !m_bar.is_absorber_of(b_max).unwrap_or(true);
    Ok(if c1 && c2 {
        Feasibility::Feasible
    } else {
        Feasibility::Inconclusive
    })
}

// ---------------------------------------------------------------------------
// Robustness matrices
// ---------------------------------------------------------------------------

/// Record of the hypothesis checks behind a robustness matrix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RobustnessPreconditions {
    pub det_not_absorber: bool,
    /// B_i : max_j E_ij contains the overall right-hand neutrix, per row.
    pub row_quotients_ok: Vec<bool>,
    pub det_plus_e_zeroless: bool,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RobustnessReport {
    pub e: Vec<Vec<Neutrix>>,
    pub r: ExternalMatrix,
    pub preconditions: RobustnessPreconditions,
    pub verified_equivalent: bool,
}

fn column_substitute(p: &[Vec<EpsScalar>], j: usize, b: &[EpsScalar]) -> Vec<Vec<EpsScalar>> {
    let mut m = p.to_vec();
    for (row, bi) in m.iter_mut().zip(b) {
        row[j] = bi.clone();
    }
    m
}

fn exact_matrix(p: &[Vec<EpsScalar>]) -> ExternalMatrix {
    ExternalMatrix::from_rows(
        p.iter()
            .map(|row| row.iter().map(|x| ExternalScalar::exact(x.clone())).collect())
            .collect(),
    )
}

fn build_report(
    p: &[Vec<EpsScalar>],
    b: &ExternalVector,
    e: Vec<Vec<Neutrix>>,
    d: &EpsScalar,
) -> Result<RobustnessReport, RobustnessError> {
    let n = p.len();
    let b_max = b
        .entries()
        .iter()
        .fold(Neutrix::Zero, |acc, x| ntx_sum(acc, x.neutrix()));
    let e_max = e
        .iter()
        .flatten()
        .fold(Neutrix::Zero, |acc, &x| ntx_sum(acc, x));
    let row_quotients_ok: Vec<bool> = (0..n)
        .map(|i| {
            let e_i = e[i].iter().fold(Neutrix::Zero, |acc, &x| ntx_sum(acc, x));
            b_max.subset_of(&ntx_div(b.entry(i).neutrix(), e_i))
        })
        .collect();
    let det_plus_e_zeroless = ExternalScalar::new(d.clone(), e_max).is_zeroless();
    if let Some(i) = row_quotients_ok.iter().position(|ok| !ok) {
        return Err(RobustnessError::PreconditionFailed(format!(
            "right-hand neutrix quotient too small in row {}",
            i + 1
        )));
    }
    if !det_plus_e_zeroless {
        return Err(RobustnessError::PreconditionFailed(
            "determinant blurred by the perturbation".to_string(),
        ));
    }

    let r_mat = ExternalMatrix::from_rows(
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| ExternalScalar::new(p[i][j].clone(), e[i][j]))
                    .collect()
            })
            .collect(),
    );
    let base = FlexibleSystem::new(exact_matrix(p), b.clone())?;
    let perturbed = FlexibleSystem::new(r_mat.clone(), b.clone())?;
    let verified_equivalent =
        solution_equiv(&solve(&base), &solve(&perturbed))? == Equivalence::Equal;
    Ok(RobustnessReport {
        e,
        r: r_mat,
        preconditions: RobustnessPreconditions {
            det_not_absorber: true,
            row_quotients_ok,
            det_plus_e_zeroless,
        },
        verified_equivalent,
    })
}

fn robustness_common(
    p: &[Vec<EpsScalar>],
    b: &ExternalVector,
) -> Result<(EpsScalar, Vec<EpsScalar>), RobustnessError> {
    let n = p.len();
    if p.iter().any(|r| r.len() != n) || b.len() != n {
        return Err(RobustnessError::DimensionMismatch(format!(
            "expected square system of size {n}"
        )));
    }
    if b.entries().iter().any(|x| x.neutrix() == Neutrix::FullLine) {
        return Err(RobustnessError::Solver(SolverError::FullLineRhs));
    }
    let d = det_eps(p);
    if d.is_zero() {
        return Err(RobustnessError::Singular);
    }
    let b_max = b
        .entries()
        .iter()
        .fold(Neutrix::Zero, |acc, x| ntx_sum(acc, x.neutrix()));
    if is_absorber(&d, b_max) {
        return Err(RobustnessError::AbsorberDeterminant);
    }
    if !is_reduced(&exact_matrix(p)) {
        return Err(RobustnessError::NotReduced);
    }
    let rep = b.representative();
    Ok((d, rep))
}

/// Robustness matrix of a real reduced non-singular system with external
/// right-hand side: entry perturbations B_i d / d_j when strictly
/// infinitesimal, the infinitesimal neutrix otherwise.
pub fn robustness_matrix(
    p: &[Vec<EpsScalar>],
    b: &ExternalVector,
) -> Result<RobustnessReport, RobustnessError> {
    let (d, rep) = robustness_common(p, b)?;
    let n = p.len();
    let mut e = vec![vec![Neutrix::oslash(); n]; n];
    for j in 0..n {
        let dj = det_eps(&column_substitute(p, j, &rep));
        if dj.is_zero() {
            continue;
        }
        let ratio = d.div(&dj).unwrap();
        for (i, row) in e.iter_mut().enumerate() {
            let cand = ntx_scale(&ratio, b.entry(i).neutrix());
            if cand.strict_subset_of(&Neutrix::oslash()) {
                row[j] = cand;
            }
        }
    }
    build_report(p, b, e, &d)
}

/// Uniform-neutrix variant: columns get E_i = min(infinitesimals, B d/d_i).
pub fn robustness_matrix_uniform(
    p: &[Vec<EpsScalar>],
    b: &[EpsScalar],
    big_b: Neutrix,
) -> Result<RobustnessReport, RobustnessError> {
    let n = p.len();
    let bv = ExternalVector::new(
        b.iter()
            .map(|x| ExternalScalar::new(x.clone(), big_b))
            .collect(),
    );
    let (d, rep) = robustness_common(p, &bv)?;
    let mut e = vec![vec![Neutrix::Zero; n]; n];
    for j in 0..n {
        let dj = det_eps(&column_substitute(p, j, &rep));
        let col = if dj.is_zero() {
            Neutrix::oslash()
        } else {
            ntx_min(
                Neutrix::oslash(),
                ntx_scale(&d.div(&dj).unwrap(), big_b),
            )
        };
        for row in e.iter_mut() {
            row[j] = col;
        }
    }
    build_report(p, &bv, e, &d)
}

/// True when adding the neutrix grid to the coefficients leaves the solution
/// set unchanged.
pub fn is_strict_perturbation(
    p: &[Vec<EpsScalar>],
    qn: &[Vec<Neutrix>],
    b: &ExternalVector,
) -> Result<bool, RobustnessError> {
    let m = p.len();
    let n = p.first().map_or(0, Vec::len);
    if qn.len() != m || qn.iter().any(|r| r.len() != n) || b.len() != m {
        return Err(RobustnessError::DimensionMismatch(
            "perturbation grid does not match the system".to_string(),
        ));
    }
    let base = FlexibleSystem::new(exact_matrix(p), b.clone())?;
    let perturbed_mat = ExternalMatrix::from_rows(
        (0..m)
            .map(|i| {
                (0..n)
                    .map(|j| ExternalScalar::new(p[i][j].clone(), qn[i][j]))
                    .collect()
            })
            .collect(),
    );
    let perturbed = FlexibleSystem::new(perturbed_mat, b.clone())?;
    Ok(solution_equiv(&solve(&base), &solve(&perturbed))? == Equivalence::Equal)
}
