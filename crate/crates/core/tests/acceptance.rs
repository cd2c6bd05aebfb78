//! End-to-end acceptance checks. Each test prints one pass line; failures
//! carry the criterion number in the test name.

use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use flexsolve::extlinalg::{ExternalMatrix, ExternalVector};
use flexsolve::extnum::{
    ntx_div, ntx_mul, ntx_scale, ntx_sum, EpsScalar, ExternalScalar, Neutrix, NeutrixKind,
};
use flexsolve::parse::parse_system;
use flexsolve::render::{format_system, solution_json, Mode};
use flexsolve::robustness::{is_strict_perturbation, robustness_matrix, robustness_matrix_uniform,
    RobustnessError};
use flexsolve::solver::{
    canonicalize_solution, run_pipeline, solution_equiv, solution_membership, solve, solve_with,
    Equivalence, FlexibleSystem, ModularGen, Side, SolutionSet, Status,
};
use flexsolve::{rat, Rat};

const EXAMPLE_ONE: &str = "\
(-1+eps*o) x1 + x2 + (-0.2+eps^2*L) x3 in 2+eps*L
(1+eps^2*L) x1 - x2 + (0.1+eps^2*o) x3 in 1+eps*o
(1+o) x1 - x2 + (0.15+eps*o) x3 in -0.5+o
";

const EXAMPLE_TWO: &str = "\
(-1+eps*o) x1 + (1+o) x2 + (-0.2+eps*L) x3 in 2+eps*L
(1+eps*L) x1 + (-1+eps*L) x2 + (0.1+o) x3 in 1+eps*o
(1+o) x1 + (-1+o) x2 + (0.15+eps*o) x3 in -0.5+o
";

fn es(n: i64, d: i64) -> EpsScalar {
    EpsScalar::from_rat(rat(n, d))
}

fn mono(n: i64, d: i64, k: i64) -> EpsScalar {
    EpsScalar::monomial(rat(n, d), k)
}

fn sys(text: &str) -> FlexibleSystem {
    parse_system(text).unwrap()
}

fn vecs(xs: &[i64]) -> Vec<EpsScalar> {
    xs.iter().map(|&x| es(x, 1)).collect()
}

/// Rank of a family of scalar vectors by plain elimination.
fn rank_of(vectors: &[Vec<EpsScalar>]) -> usize {
    let mut rows: Vec<Vec<EpsScalar>> = vectors.to_vec();
    let n = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..n {
        let Some(p) = (rank..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = rows[rank][col].recip().unwrap();
        let pivot: Vec<EpsScalar> = rows[rank].iter().map(|x| x.mul(&inv)).collect();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && !row[col].is_zero() {
                let f = row[col].clone();
                for (a, b) in row.iter_mut().zip(&pivot) {
                    *a = a.sub(&b.mul(&f));
                }
            }
        }
        rows[rank] = pivot;
        rank += 1;
    }
    rank
}

/// Does the exact point satisfy every row of the integrated representative
/// system?
fn satisfies_integrated(p: &[Vec<EpsScalar>], rhs: &[ExternalScalar], x: &[EpsScalar]) -> bool {
    p.iter().zip(rhs).all(|(row, beta)| {
        let mut acc = EpsScalar::zero();
        for (a, xi) in row.iter().zip(x) {
            acc = acc.add(&a.mul(xi));
        }
        beta.contains(&acc)
    })
}

// ---------------------------------------------------------------------------
// Criterion 1: the three-row worked example, exact echelon and solution
// ---------------------------------------------------------------------------

#[test]
fn criterion_1_worked_example() {
    let start = Instant::now();
    let p = run_pipeline(&sys(EXAMPLE_ONE));

    assert_eq!(p.echelon.rank(), 3);
    assert_eq!(p.echelon.permutation(), &[0, 2, 1]);
    let q = p.echelon.matrix();
    assert_eq!(q.len(), 5);
    assert_eq!(q[0], vec![es(1, 1), es(1, 10), es(-1, 1)]);
    assert_eq!(q[1], vec![es(0, 1), es(1, 1), es(0, 1)]);
    assert_eq!(q[2], vec![es(0, 1), es(0, 1), es(1, 1)]);
    assert_eq!(q[3], vec![es(0, 1); 3]);
    assert_eq!(q[4], vec![es(0, 1); 3]);
    let ntx: Vec<Neutrix> = p.echelon.rhs().iter().map(|x| x.neutrix()).collect();
    assert_eq!(
        ntx,
        vec![
            Neutrix::scaled_oslash(1),
            Neutrix::scaled_pound(1),
            Neutrix::pound(),
            Neutrix::oslash(),
            Neutrix::scaled_pound(-1),
        ]
    );

    let z = &p.solution;
    assert_eq!(z.status, Status::Consistent);
    assert_eq!(z.rank, 3);
    assert_eq!(z.support, vecs(&[4, 0, -30]));
    assert_eq!(
        z.modular_gens,
        vec![
            ModularGen {
                neutrix: Neutrix::scaled_oslash(1),
                direction: vecs(&[1, 0, 0]),
            },
            ModularGen {
                neutrix: Neutrix::scaled_pound(1),
                direction: vec![mono(-1, 10, 0), es(0, 1), es(1, 1)],
            },
            ModularGen {
                neutrix: Neutrix::pound(),
                direction: vecs(&[1, 1, 0]),
            },
        ]
    );
    assert!(z.linear_gens.is_empty());

    assert!(start.elapsed().as_secs_f64() < 1.0);
    println!("criterion 1 (worked example, exact echelon and solution): pass");
}

// ---------------------------------------------------------------------------
// Criterion 2: the inconsistency example
// ---------------------------------------------------------------------------

#[test]
fn criterion_2_inconsistency() {
    let start = Instant::now();
    let p = run_pipeline(&sys(EXAMPLE_TWO));
    assert_eq!(p.solution.status, Status::Inconsistent);
    assert_eq!(p.solution.rank, 3);
    assert_eq!(p.solution.offending_rows.len(), 3);

    // tail components match the published values up to the appreciable row
    // scaling performed during reduction
    let expected = [
        ExternalScalar::new(es(3, 1), Neutrix::scaled_pound(1)),
        ExternalScalar::new(es(3, 2), Neutrix::oslash()),
        ExternalScalar::new(es(-1, 1), Neutrix::oslash()),
    ];
    let mut tail: Vec<ExternalScalar> = p
        .solution
        .offending_rows
        .iter()
        .map(|&i| p.echelon.rhs()[i].clone())
        .collect();
    for e in &expected {
        let pos = tail.iter().position(|t| {
            let c = t.rep().div(e.rep()).unwrap();
            c.valuation() == Some(0) && &e.scale(&c) == t
        });
        let pos = pos.unwrap_or_else(|| panic!("no tail component matches {e}"));
        tail.remove(pos);
        assert!(e.is_zeroless());
    }
    assert!(tail.is_empty());

    assert!(start.elapsed().as_secs_f64() < 1.0);
    println!("criterion 2 (inconsistency example, three zeroless tail rows): pass");
}

// ---------------------------------------------------------------------------
// Criterion 3: robustness fixtures
// ---------------------------------------------------------------------------

fn p_sym() -> Vec<Vec<EpsScalar>> {
    vec![vec![es(1, 1), es(1, 1)], vec![es(1, 1), es(-1, 1)]]
}

fn ext(n: i64, d: i64, ntx: Neutrix) -> ExternalScalar {
    ExternalScalar::new(es(n, d), ntx)
}

#[test]
fn criterion_3_robustness_fixtures() {
    let o = Neutrix::oslash();

    // (a) appreciable right-hand side: every entry tolerates oslash
    let start = Instant::now();
    let b_a = ExternalVector::new(vec![ext(3, 1, o), ext(1, 1, o)]);
    let rep_a = robustness_matrix(&p_sym(), &b_a).unwrap();
    assert_eq!(rep_a.e, vec![vec![o, o], vec![o, o]]);
    assert!(rep_a.verified_equivalent);
    assert!(start.elapsed().as_secs_f64() < 1.0);

    // (b) unlimited right side with mixed neutrices
    let start = Instant::now();
    let omega = EpsScalar::omega();
    let b_b = ExternalVector::new(vec![
        ExternalScalar::new(omega.add(&es(2, 1)), Neutrix::scaled_pound(1)),
        ExternalScalar::new(omega.clone(), o),
    ]);
    let rep_b = robustness_matrix(&p_sym(), &b_b).unwrap();
    assert_eq!(
        rep_b.e,
        vec![
            vec![Neutrix::scaled_pound(2), Neutrix::scaled_pound(1)],
            vec![Neutrix::scaled_oslash(1), o],
        ]
    );
    // perturbed matrix entries as published
    assert_eq!(rep_b.r.entry(0, 0), &ext(1, 1, Neutrix::scaled_pound(2)));
    assert_eq!(rep_b.r.entry(0, 1), &ext(1, 1, Neutrix::scaled_pound(1)));
    assert_eq!(rep_b.r.entry(1, 0), &ext(1, 1, Neutrix::scaled_oslash(1)));
    assert_eq!(rep_b.r.entry(1, 1), &ext(-1, 1, o));
    assert!(rep_b.verified_equivalent);
    assert!(start.elapsed().as_secs_f64() < 1.0);

    // (c) uniform variant of the same system
    let start = Instant::now();
    let rep_c = robustness_matrix_uniform(&p_sym(), &[omega.add(&es(2, 1)), omega], o).unwrap();
    assert_eq!(
        rep_c.e,
        vec![
            vec![Neutrix::scaled_oslash(1), o],
            vec![Neutrix::scaled_oslash(1), o],
        ]
    );
    assert_eq!(rep_c.r.entry(0, 0), &ext(1, 1, Neutrix::scaled_oslash(1)));
    assert_eq!(rep_c.r.entry(0, 1), &ext(1, 1, o));
    assert_eq!(rep_c.r.entry(1, 0), &ext(1, 1, Neutrix::scaled_oslash(1)));
    assert_eq!(rep_c.r.entry(1, 1), &ext(-1, 1, o));
    assert!(rep_c.verified_equivalent);
    assert!(start.elapsed().as_secs_f64() < 1.0);

    println!("criterion 3 (robustness fixtures a, b, c with verified equivalence): pass");
}

// ---------------------------------------------------------------------------
// Criterion 4: absorber counterexample
// ---------------------------------------------------------------------------

#[test]
fn criterion_4_absorber_counterexample() {
    let p = vec![
        vec![es(1, 1), es(1, 1)],
        vec![es(1, 1), es(1, 1).add(&EpsScalar::eps())],
    ];
    let o = Neutrix::oslash();
    let b = ExternalVector::new(vec![ext(1, 1, o), ext(1, 1, o)]);
    assert_eq!(
        robustness_matrix(&p, &b),
        Err(RobustnessError::AbsorberDeterminant)
    );

    let original = sys("x1 + x2 in 1+o\nx1 + (1+eps) x2 in 1+o\n");
    let z_orig = solve(&original);
    let expected_orig = SolutionSet {
        status: Status::Consistent,
        support: vecs(&[1, 0]),
        modular_gens: vec![
            ModularGen {
                neutrix: o,
                direction: vecs(&[1, 0]),
            },
            ModularGen {
                neutrix: Neutrix::scaled_oslash(-1),
                direction: vecs(&[-1, 1]),
            },
        ],
        linear_gens: vec![],
        rank: 2,
        offending_rows: vec![],
    };
    assert_eq!(
        canonicalize_solution(&z_orig),
        canonicalize_solution(&expected_orig)
    );
    assert_eq!(
        solution_equiv(&z_orig, &expected_orig).unwrap(),
        Equivalence::Equal
    );

    let perturbed = sys("(1+o) x1 + (1+o) x2 in 1+o\n(1+o) x1 + (1+o) x2 in 1+o\n");
    let z_pert = solve(&perturbed);
    let expected_pert = SolutionSet {
        status: Status::Consistent,
        support: vecs(&[1, 0]),
        modular_gens: vec![
            ModularGen {
                neutrix: o,
                direction: vecs(&[1, 0]),
            },
            ModularGen {
                neutrix: Neutrix::pound(),
                direction: vecs(&[-1, 1]),
            },
        ],
        linear_gens: vec![],
        rank: 1,
        offending_rows: vec![],
    };
    assert_eq!(
        solution_equiv(&z_pert, &expected_pert).unwrap(),
        Equivalence::Equal
    );
    assert_eq!(
        canonicalize_solution(&z_pert).modular_gens,
        canonicalize_solution(&expected_pert).modular_gens
    );

    assert_eq!(
        solution_equiv(&z_pert, &z_orig).unwrap(),
        Equivalence::ProperSubset(Side::First)
    );
    println!("criterion 4 (absorber counterexample, strict shrink of the solution set): pass");
}

// ---------------------------------------------------------------------------
// Random generation shared by criteria 5 and 8
// ---------------------------------------------------------------------------

fn rand_rat(rng: &mut ChaCha8Rng) -> Rat {
    rat(rng.gen_range(-10..=10), rng.gen_range(1..=10))
}

fn rand_scalar(rng: &mut ChaCha8Rng) -> EpsScalar {
    let mut f = EpsScalar::zero();
    for _ in 0..rng.gen_range(1..=2) {
        f = f.add(&EpsScalar::monomial(rand_rat(rng), rng.gen_range(-2..=2)));
    }
    f
}

fn rand_neutrix(rng: &mut ChaCha8Rng, allow_full: bool) -> Neutrix {
    match rng.gen_range(0..10) {
        0..=4 => Neutrix::Zero,
        5 | 6 => Neutrix::scaled_oslash(rng.gen_range(-2..=2)),
        7 | 8 => Neutrix::scaled_pound(rng.gen_range(-2..=2)),
        _ if allow_full => Neutrix::FullLine,
        _ => Neutrix::scaled_oslash(rng.gen_range(-2..=2)),
    }
}

fn rand_system(rng: &mut ChaCha8Rng) -> FlexibleSystem {
    let m = rng.gen_range(1..=4);
    let n = rng.gen_range(1..=4);
    let rows: Vec<Vec<ExternalScalar>> = (0..m)
        .map(|_| {
            (0..n)
                .map(|_| ExternalScalar::new(rand_scalar(rng), rand_neutrix(rng, true)))
                .collect()
        })
        .collect();
    let rhs: Vec<ExternalScalar> = (0..m)
        .map(|_| ExternalScalar::new(rand_scalar(rng), rand_neutrix(rng, false)))
        .collect();
    FlexibleSystem::new(ExternalMatrix::from_rows(rows), ExternalVector::new(rhs)).unwrap()
}

/// Some element of the neutrix, away from zero when possible.
fn neutrix_element(rng: &mut ChaCha8Rng, n: Neutrix) -> EpsScalar {
    match n {
        Neutrix::Zero => EpsScalar::zero(),
        Neutrix::Scaled(m, NeutrixKind::Oslash) => EpsScalar::monomial(rand_rat(rng), m + 1),
        Neutrix::Scaled(m, NeutrixKind::Pound) => EpsScalar::monomial(rand_rat(rng), m),
        Neutrix::FullLine => rand_scalar(rng),
    }
}

/// An element just outside the neutrix (none exists for the full line).
fn outside_element(n: Neutrix) -> Option<EpsScalar> {
    match n {
        Neutrix::Zero => Some(EpsScalar::eps()),
        Neutrix::Scaled(m, NeutrixKind::Oslash) => Some(EpsScalar::monomial(rat(1, 1), m)),
        Neutrix::Scaled(m, NeutrixKind::Pound) => Some(EpsScalar::monomial(rat(1, 1), m - 1)),
        Neutrix::FullLine => None,
    }
}

// ---------------------------------------------------------------------------
// Criterion 5: solver property suite
// ---------------------------------------------------------------------------

#[test]
fn criterion_5_solver_properties() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    let mut consistent = 0usize;
    for case in 0..1000 {
        let s = rand_system(&mut rng);
        let p = run_pipeline(&s);
        let z = &p.solution;
        let n = s.unknowns();

        // probe equivalence: solution membership must agree with the
        // integrated representative system on exact points
        let rows = p.integrated.coefficient_rows();
        let rhs = p.integrated.rhs();
        if z.is_consistent() {
            consistent += 1;
            // points generated from the solution set itself
            for _ in 0..3 {
                let mut x = z.support.clone();
                for g in &z.modular_gens {
                    let c = neutrix_element(&mut rng, g.neutrix);
                    for (xi, di) in x.iter_mut().zip(&g.direction) {
                        *xi = xi.add(&c.mul(di));
                    }
                }
                for d in &z.linear_gens {
                    let c = rand_scalar(&mut rng);
                    for (xi, di) in x.iter_mut().zip(d) {
                        *xi = xi.add(&c.mul(di));
                    }
                }
                assert!(solution_membership(z, &x), "case {case}: generated point rejected");
                assert!(
                    satisfies_integrated(rows, rhs, &x),
                    "case {case}: generated point violates the integrated system"
                );
            }
            // a point pushed outside some modular neutrix
            if let Some(g) = z.modular_gens.first() {
                if let Some(c) = outside_element(g.neutrix) {
                    let mut x = z.support.clone();
                    for (xi, di) in x.iter_mut().zip(&g.direction) {
                        *xi = xi.add(&c.mul(di));
                    }
                    assert_eq!(
                        solution_membership(z, &x),
                        satisfies_integrated(rows, rhs, &x),
                        "case {case}: membership disagrees on a boundary point"
                    );
                }
            }
        }
        // random probes must agree in both directions
        for _ in 0..2 {
            let x: Vec<EpsScalar> = (0..n).map(|_| rand_scalar(&mut rng)).collect();
            let direct = satisfies_integrated(rows, rhs, &x);
            if z.is_consistent() {
                assert_eq!(
                    solution_membership(z, &x),
                    direct,
                    "case {case}: membership disagrees on a random point"
                );
            } else {
                assert!(!direct, "case {case}: inconsistent system has a solution");
            }
        }

        if !z.is_consistent() {
            continue;
        }

        // dimension bookkeeping
        assert_eq!(z.linear_gens.len(), n - z.rank, "case {case}: linear dim");
        let nonzero_c = p.echelon.rhs()[..z.rank]
            .iter()
            .filter(|x| x.neutrix() != Neutrix::Zero)
            .count();
        assert_eq!(z.modular_gens.len(), nonzero_c, "case {case}: modular dim");

        // generator independence
        let dirs: Vec<Vec<EpsScalar>> = z
            .modular_gens
            .iter()
            .map(|g| g.direction.clone())
            .chain(z.linear_gens.iter().cloned())
            .collect();
        assert_eq!(rank_of(&dirs), dirs.len(), "case {case}: dependent generators");

        // rank invariance under an admissible representative perturbation
        let mut rep = s.coefficients().representative();
        for (i, row) in rep.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                let delta = neutrix_element(&mut rng, s.coefficients().entry(i, j).neutrix());
                *entry = entry.add(&delta);
            }
        }
        let z2 = solve_with(&s, rep);
        assert_eq!(z2.rank, z.rank, "case {case}: rank changed with representative");
        assert_eq!(
            solution_equiv(&z2, z).unwrap(),
            Equivalence::Equal,
            "case {case}: solution changed with representative"
        );

        // canonicalization is idempotent
        let c1 = canonicalize_solution(z);
        let c2 = canonicalize_solution(&c1);
        assert_eq!(c1, c2, "case {case}: canonical form not a fixed point");
    }
    assert!(consistent > 100, "suite too degenerate: {consistent} consistent systems");
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 60.0, "property suite took {elapsed:.1} s");
    println!(
        "criterion 5 (1000-system property suite, {consistent} consistent, {elapsed:.1} s): pass"
    );
}

// ---------------------------------------------------------------------------
// Criterion 6: scalar and neutrix law suite
// ---------------------------------------------------------------------------

/// Least valuation a field element inside the neutrix can have.
fn min_val(n: Neutrix) -> Option<i64> {
    match n {
        Neutrix::Zero => None,
        Neutrix::Scaled(m, NeutrixKind::Oslash) => Some(m + 1),
        Neutrix::Scaled(m, NeutrixKind::Pound) => Some(m),
        Neutrix::FullLine => Some(i64::MIN / 2),
    }
}

/// Next larger class that admits strictly more field elements.
fn enlarge(n: Neutrix) -> Neutrix {
    match n {
        Neutrix::Zero => Neutrix::scaled_oslash(2),
        Neutrix::Scaled(m, NeutrixKind::Oslash) => Neutrix::scaled_pound(m),
        Neutrix::Scaled(m, NeutrixKind::Pound) => Neutrix::scaled_pound(m - 1),
        Neutrix::FullLine => Neutrix::FullLine,
    }
}

#[test]
fn criterion_6_scalar_laws() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    for case in 0..1000 {
        let a = rand_scalar(&mut rng);
        let b = rand_scalar(&mut rng);
        let c = rand_scalar(&mut rng);

        // field laws in the scalar field
        assert_eq!(a.add(&b), b.add(&a));
        assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        assert_eq!(a.mul(&b), b.mul(&a));
        assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        assert_eq!(a.sub(&a), EpsScalar::zero());
        if !a.is_zero() {
            assert_eq!(a.mul(&a.recip().unwrap()), EpsScalar::one());
        }

        // external arithmetic: subdistributivity and real-factor
        // distributivity
        let alpha = ExternalScalar::new(a.clone(), rand_neutrix(&mut rng, false));
        let beta = ExternalScalar::new(b.clone(), rand_neutrix(&mut rng, false));
        let gamma = ExternalScalar::new(c.clone(), rand_neutrix(&mut rng, false));
        let lhs = alpha.mul(&beta.add(&gamma));
        let rhs = alpha.mul(&beta).add(&alpha.mul(&gamma));
        assert!(lhs.subset_of(&rhs), "case {case}: subdistributivity");
        assert_eq!(
            beta.add(&gamma).scale(&a),
            beta.scale(&a).add(&gamma.scale(&a)),
            "case {case}: real-factor distributivity"
        );

        // relative imprecision of a zeroless number is infinitesimal
        if alpha.is_zeroless() {
            let r = alpha.relative_imprecision().unwrap();
            assert!(r.subset_of(&Neutrix::oslash()), "case {case}: R(alpha)");
        }

        // neutrix operations against probe oracles
        let na = rand_neutrix(&mut rng, true);
        let nb = rand_neutrix(&mut rng, true);

        // closure and monotonicity of the class
        let sum = ntx_sum(na, nb);
        assert!(na.subset_of(&sum) && nb.subset_of(&sum));
        assert!(sum == na || sum == nb, "case {case}: sum is the larger argument");

        let prod = ntx_mul(na, nb);
        for _ in 0..3 {
            let f = neutrix_element(&mut rng, na);
            let g = neutrix_element(&mut rng, nb);
            assert!(prod.contains(&f.mul(&g)), "case {case}: product probe escaped");
        }
        // independent order oracle for bounded classes
        if let (Neutrix::Scaled(p, ka), Neutrix::Scaled(q, kb)) = (na, nb) {
            let expect_kind = match (ka, kb) {
                (NeutrixKind::Pound, NeutrixKind::Pound) => NeutrixKind::Pound,
                _ => NeutrixKind::Oslash,
            };
            assert_eq!(prod, Neutrix::Scaled(p + q, expect_kind), "case {case}: ntx_mul");
        }

        // scaling: exact valuation shift, witnessed by probes
        if !a.is_zero() {
            let scaled = ntx_scale(&a, na);
            for _ in 0..3 {
                let f = neutrix_element(&mut rng, na);
                assert!(scaled.contains(&a.mul(&f)), "case {case}: scale probe escaped");
            }
            match (min_val(na), min_val(scaled)) {
                (Some(v), Some(w)) if na != Neutrix::FullLine => {
                    assert_eq!(w, v + a.valuation().unwrap(), "case {case}: scale valuation");
                }
                (None, None) => {}
                (Some(_), Some(_)) => {} // full line stays the full line
                other => panic!("case {case}: scale changed the class shape: {other:?}"),
            }
        }

        // division is the maximal admissible multiplier class
        let quot = ntx_div(na, nb);
        assert!(ntx_mul(nb, quot).subset_of(&na), "case {case}: quotient too large");
        let bigger = enlarge(quot);
        if bigger != quot && nb != Neutrix::Zero {
            assert!(
                !ntx_mul(nb, bigger).subset_of(&na),
                "case {case}: quotient {quot:?} of {na:?}:{nb:?} not maximal"
            );
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 10.0, "law suite took {elapsed:.1} s");
    println!("criterion 6 (1000-case scalar and neutrix law suite, {elapsed:.1} s): pass");
}

// ---------------------------------------------------------------------------
// Criterion 7: robustness matrices are maximal entry by entry
// ---------------------------------------------------------------------------

#[test]
fn criterion_7_robustness_maximality() {
    let start = Instant::now();
    let o = Neutrix::oslash();
    let omega = EpsScalar::omega();

    type Fixture = (Vec<Vec<EpsScalar>>, ExternalVector, Vec<Vec<Neutrix>>);
    let fixtures: Vec<Fixture> = vec![
        {
            let b = ExternalVector::new(vec![ext(3, 1, o), ext(1, 1, o)]);
            let e = robustness_matrix(&p_sym(), &b).unwrap().e;
            (p_sym(), b, e)
        },
        {
            let b = ExternalVector::new(vec![
                ExternalScalar::new(omega.add(&es(2, 1)), Neutrix::scaled_pound(1)),
                ExternalScalar::new(omega.clone(), o),
            ]);
            let e = robustness_matrix(&p_sym(), &b).unwrap().e;
            (p_sym(), b, e)
        },
        {
            let b = ExternalVector::new(vec![
                ExternalScalar::new(omega.add(&es(2, 1)), o),
                ExternalScalar::new(omega.clone(), o),
            ]);
            let e = robustness_matrix_uniform(&p_sym(), &[omega.add(&es(2, 1)), omega.clone()], o)
                .unwrap()
                .e;
            (p_sym(), b, e)
        },
    ];

    for (fx, (p, b, e)) in fixtures.iter().enumerate() {
        // the computed grid itself is a strict perturbation
        assert!(is_strict_perturbation(p, e, b).unwrap(), "fixture {fx}: base grid");
        for i in 0..e.len() {
            for j in 0..e[i].len() {
                let mut grid = e.clone();
                grid[i][j] = match grid[i][j] {
                    Neutrix::Scaled(m, k) => Neutrix::Scaled(m - 1, k),
                    other => panic!("fixture {fx}: unexpected entry {other:?}"),
                };
                let still_limited = grid[i][j].strict_subset_of(&Neutrix::pound());
                if still_limited {
                    assert!(
                        !is_strict_perturbation(p, &grid, b).unwrap(),
                        "fixture {fx}: enlarging entry ({i},{j}) kept equivalence"
                    );
                }
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 5.0, "maximality probes took {elapsed:.1} s");
    println!("criterion 7 (entrywise maximality of robustness matrices, {elapsed:.1} s): pass");
}

// ---------------------------------------------------------------------------
// Criterion 8: parser round trip and golden JSON
// ---------------------------------------------------------------------------

#[test]
fn criterion_8_round_trip_and_goldens() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
    for case in 0..500 {
        let s = rand_system(&mut rng);
        let text = format_system(&s);
        let back = parse_system(&text).unwrap_or_else(|e| {
            panic!("case {case}: reparse failed: {e}\n{text}");
        });
        assert_eq!(back, s, "case {case}: round trip changed the system\n{text}");
    }

    let golden_dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("golden");
    let bless = std::env::var_os("BLESS").is_some();
    let check = |name: &str, actual: String| {
        let path = golden_dir.join(name);
        if bless {
            std::fs::create_dir_all(&golden_dir).unwrap();
            std::fs::write(&path, actual + "\n").unwrap();
            return;
        }
        let want = std::fs::read_to_string(&path)
            .unwrap_or_else(|e| panic!("missing golden file {}: {e}", path.display()));
        assert_eq!(actual.trim_end(), want.trim_end(), "golden mismatch for {name}");
    };

    let p1 = run_pipeline(&sys(EXAMPLE_ONE));
    check(
        "worked_example.json",
        solution_json(&p1.solution, p1.echelon.permutation(), false).to_string(),
    );
    check(
        "worked_example_exact.json",
        solution_json(&p1.solution, p1.echelon.permutation(), true).to_string(),
    );
    let p2 = run_pipeline(&sys(EXAMPLE_TWO));
    check(
        "inconsistent_example.json",
        solution_json(&p2.solution, p2.echelon.permutation(), false).to_string(),
    );

    let o = Neutrix::oslash();
    let b_a = ExternalVector::new(vec![ext(3, 1, o), ext(1, 1, o)]);
    let rep_a = robustness_matrix(&p_sym(), &b_a).unwrap();
    check(
        "robustness_appreciable.json",
        flexsolve::render::format_robustness(&rep_a, Mode::Json),
    );
    let omega = EpsScalar::omega();
    let b_b = ExternalVector::new(vec![
        ExternalScalar::new(omega.add(&es(2, 1)), Neutrix::scaled_pound(1)),
        ExternalScalar::new(omega.clone(), o),
    ]);
    let rep_b = robustness_matrix(&p_sym(), &b_b).unwrap();
    check(
        "robustness_unlimited.json",
        flexsolve::render::format_robustness(&rep_b, Mode::Json),
    );
    let rep_c = robustness_matrix_uniform(&p_sym(), &[omega.add(&es(2, 1)), omega], o).unwrap();
    check(
        "robustness_uniform.json",
        flexsolve::render::format_robustness(&rep_c, Mode::Json),
    );

    println!("criterion 8 (500-system parse round trip, byte-stable golden JSON): pass");
}
