//! Deterministic text and JSON output. All JSON objects keep a fixed field
//! order and scalars render as Laurent strings with exact coefficients
//! (lowest order first), so output is byte-stable across runs.

use serde_json::{json, Value};

use crate::extnum::{format_rat, EpsScalar, ExternalScalar, Neutrix};
use crate::robustness::{EssentialReport, Feasibility, RobustnessReport};
use crate::solver::{FlexibleSystem, Pipeline, SolutionSet, Status};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Mode {
    Text,
    Json,
}

/// Scalar as JSON: a Laurent string, or explicit coefficient lists in exact
/// mode.
pub fn scalar_json(f: &EpsScalar, exact: bool) -> Value {
    if !exact {
        return Value::String(f.to_string());
    }
    let coeffs = |p: &crate::poly::Poly| -> Value {
        Value::Array(
            p.coeffs()
                .iter()
                .map(|c| Value::String(format_rat(c)))
                .collect(),
        )
    };
    json!({
        "shift": f.shift(),
        "num": coeffs(f.numerator()),
        "den": coeffs(f.denominator()),
    })
}

fn vector_json(v: &[EpsScalar], exact: bool) -> Value {
    Value::Array(v.iter().map(|f| scalar_json(f, exact)).collect())
}

pub fn format_vector(v: &[EpsScalar]) -> String {
    let parts: Vec<String> = v.iter().map(|f| f.to_string()).collect();
    format!("({})", parts.join(","))
}

/// 1-based row numbers for user-facing output.
fn one_based(rows: &[usize]) -> Vec<usize> {
    rows.iter().map(|r| r + 1).collect()
}

pub fn solution_json(z: &SolutionSet, permutation: &[usize], exact: bool) -> Value {
    let status = match z.status {
        Status::Consistent => "consistent",
        Status::Inconsistent => "inconsistent",
    };
    json!({
        "status": status,
        "rank": z.rank,
        "support": vector_json(&z.support, exact),
        "modular": z.modular_gens.iter().map(|g| json!({
            "neutrix": g.neutrix.to_string(),
            "direction": vector_json(&g.direction, exact),
        })).collect::<Vec<_>>(),
        "linear": z.linear_gens.iter().map(|d| vector_json(d, exact)).collect::<Vec<_>>(),
        "permutation": one_based(permutation),
        "offending_rows": one_based(&z.offending_rows),
    })
}

fn solution_text(z: &SolutionSet) -> String {
    if z.status == Status::Inconsistent {
        let rows: Vec<String> = one_based(&z.offending_rows)
            .iter()
            .map(usize::to_string)
            .collect();
        return format!("INCONSISTENT (rows: {})", rows.join(", "));
    }
    let mut parts = vec![format_vector(&z.support)];
    for g in &z.modular_gens {
        parts.push(format!("{}*{}", g.neutrix, format_vector(&g.direction)));
    }
    for d in &z.linear_gens {
        parts.push(format!("R*{}", format_vector(d)));
    }
    parts.join(" + ")
}

pub fn format_solution_full(
    z: &SolutionSet,
    permutation: &[usize],
    mode: Mode,
    exact: bool,
) -> String {
    match mode {
        Mode::Text => solution_text(z),
        Mode::Json => solution_json(z, permutation, exact).to_string(),
    }
}

/// Identity-permutation convenience form.
pub fn format_solution(z: &SolutionSet, mode: Mode) -> String {
    let perm: Vec<usize> = (0..z.unknowns()).collect();
    format_solution_full(z, &perm, mode, false)
}

/// System back to source form; reparsing yields an identical system.
pub fn format_system(s: &FlexibleSystem) -> String {
    let mut out = String::new();
    for i in 0..s.rows() {
        let mut line = String::new();
        for j in 0..s.unknowns() {
            if j > 0 {
                line.push_str(" + ");
            }
            line.push_str(&format!("({}) x{}", s.coefficients().entry(i, j), j + 1));
        }
        line.push_str(&format!(" in {}", s.rhs().entry(i)));
        out.push_str(&line);
        out.push('\n');
    }
    out
}

fn matrix_text(rows: &[Vec<EpsScalar>]) -> String {
    rows.iter()
        .map(|r| format!("  {}", format_vector(r)))
        .collect::<Vec<_>>()
        .join("\n")
}

fn scalar_matrix_json(rows: &[Vec<EpsScalar>], exact: bool) -> Value {
    Value::Array(rows.iter().map(|r| vector_json(r, exact)).collect())
}

fn ext_list_json(xs: &[ExternalScalar]) -> Value {
    Value::Array(
        xs.iter()
            .map(|x| Value::String(x.to_string()))
            .collect(),
    )
}

pub fn format_echelon(p: &Pipeline, mode: Mode, exact: bool) -> String {
    match mode {
        Mode::Text => {
            let mut out = String::new();
            out.push_str("integrated system:\n");
            out.push_str(&matrix_text(p.integrated.coefficient_rows()));
            out.push('\n');
            let rhs: Vec<String> = p.integrated.rhs().iter().map(|x| x.to_string()).collect();
            out.push_str(&format!("  in ({})\n", rhs.join(",")));
            out.push_str("echelon system:\n");
            out.push_str(&matrix_text(p.echelon.matrix()));
            out.push('\n');
            let rhs: Vec<String> = p.echelon.rhs().iter().map(|x| x.to_string()).collect();
            out.push_str(&format!("  in ({})\n", rhs.join(",")));
            let perm: Vec<String> = one_based(p.echelon.permutation())
                .iter()
                .map(usize::to_string)
                .collect();
            out.push_str(&format!("permutation: ({})\n", perm.join(",")));
            out.push_str(&format!("rank: {}\n", p.echelon.rank()));
            out
        }
        Mode::Json => json!({
            "integrated": {
                "matrix": scalar_matrix_json(p.integrated.coefficient_rows(), exact),
                "rhs": ext_list_json(p.integrated.rhs()),
            },
            "echelon": {
                "matrix": scalar_matrix_json(p.echelon.matrix(), exact),
                "rhs": ext_list_json(p.echelon.rhs()),
            },
            "permutation": one_based(p.echelon.permutation()),
            "rank": p.echelon.rank(),
        })
        .to_string(),
    }
}

pub fn format_feasibility(
    f: &[Neutrix],
    constrained_cols: &[usize],
    verdict: Option<&Feasibility>,
    mode: Mode,
) -> String {
    let verdict_text = verdict.map(|v| match v {
        Feasibility::Feasible => "feasible",
        Feasibility::Inconclusive => "inconclusive",
    });
    match mode {
        Mode::Text => {
            let parts: Vec<String> = f.iter().map(Neutrix::to_string).collect();
            let mut out = format!("feasibility space: ({})\n", parts.join(","));
            out.push_str("constraint rows:\n");
            let n = f.len();
            for &j in constrained_cols {
                let mut row = vec!["0".to_string(); n];
                row[j] = "1".to_string();
                out.push_str(&format!("  ({}) in {}\n", row.join(","), f[j]));
            }
            if let Some(v) = verdict_text {
                out.push_str(&format!("verdict: {v}\n"));
            }
            out
        }
        Mode::Json => {
            let mut obj = json!({
                "feasibility": f.iter().map(Neutrix::to_string).collect::<Vec<_>>(),
                "constrained_columns": one_based(constrained_cols),
            });
            if let Some(v) = verdict_text {
                obj.as_object_mut()
                    .unwrap()
                    .insert("verdict".to_string(), Value::String(v.to_string()));
            }
            obj.to_string()
        }
    }
}

fn neutrix_grid_json(e: &[Vec<Neutrix>]) -> Value {
    Value::Array(
        e.iter()
            .map(|row| {
                Value::Array(
                    row.iter()
                        .map(|n| Value::String(n.to_string()))
                        .collect(),
                )
            })
            .collect(),
    )
}

pub fn format_robustness(r: &RobustnessReport, mode: Mode) -> String {
    match mode {
        Mode::Text => {
            let mut out = String::new();
            out.push_str("robustness matrix:\n");
            for row in &r.e {
                let parts: Vec<String> = row.iter().map(Neutrix::to_string).collect();
                out.push_str(&format!("  ({})\n", parts.join(",")));
            }
            out.push_str("perturbed system:\n");
            for i in 0..r.r.rows() {
                let parts: Vec<String> =
                    (0..r.r.cols()).map(|j| r.r.entry(i, j).to_string()).collect();
                out.push_str(&format!("  ({})\n", parts.join(",")));
            }
            out.push_str(&format!(
                "determinant not absorbed: {}\n",
                r.preconditions.det_not_absorber
            ));
            out.push_str(&format!(
                "row quotients admissible: {}\n",
                r.preconditions
                    .row_quotients_ok
                    .iter()
                    .map(|b| b.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            ));
            out.push_str(&format!(
                "perturbed determinant zeroless: {}\n",
                r.preconditions.det_plus_e_zeroless
            ));
            out.push_str(&format!("solution preserved: {}\n", r.verified_equivalent));
            out
        }
        Mode::Json => json!({
            "matrix": neutrix_grid_json(&r.e),
            "perturbed": (0..r.r.rows()).map(|i| {
                (0..r.r.cols()).map(|j| r.r.entry(i, j).to_string()).collect::<Vec<_>>()
            }).collect::<Vec<_>>(),
            "preconditions": {
                "det_not_absorber": r.preconditions.det_not_absorber,
                "row_quotients_ok": r.preconditions.row_quotients_ok,
                "det_plus_e_zeroless": r.preconditions.det_plus_e_zeroless,
            },
            "verified_equivalent": r.verified_equivalent,
        })
        .to_string(),
    }
}

pub fn format_essential(r: &EssentialReport, mode: Mode) -> String {
    match mode {
        Mode::Text => format!(
            "rank: {}\nconditions: {}\nverdict: {:?}\n",
            r.r,
            r.conditions
                .iter()
                .map(|b| b.to_string())
                .collect::<Vec<_>>()
                .join(","),
            r.verdict
        ),
        Mode::Json => json!({
            "rank": r.r,
            "conditions": r.conditions.to_vec(),
            "verdict": format!("{:?}", r.verdict),
        })
        .to_string(),
    }
}
