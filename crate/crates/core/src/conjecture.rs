//! The six equivalent formulations of the second-neighborhood conjecture,
//! one checker each, and the per-digraph cross-check harness.
//!
//! | id | statement for a digraph `D` with matrix `S = S_D` |
//! |----|---------------------------------------------------|
//! | C1 | some `v` has `d+(v) <= d++(v)` |
//! | C2 | `S 1` is not `> 0` |
//! | C3 | no weight vector `w` has `S w > 0` |
//! | C4 | some nonzero weight vector `w` has `S w <= 0` |
//! | C5 | some `v` with a positive component has `S v <= 0` |
//! | C6 | `S^{-1} >= 0` does not hold |
//!
//! Matrix-level checkers (`*_matrix`) accept arbitrary square matrices so the
//! harness can be driven with synthetic inputs no digraph produces.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed};
use serde_json::{json, Value};
use thiserror::Error;

use crate::digraph::{Arc, Digraph};
use crate::farkas::{assemble_weight_system, solve_standard, strict_cone_feasibility};
use crate::farkas::{FeasibilityOutcome, StandardSystem, StrictOutcome};
use crate::linalg::{second_neighborhood_matrix, Inversion, RatMatrix, RatVector, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConjectureError {
    #[error("checkers require at least one vertex")]
    EmptyDigraph,
    #[error("digraph is not a counterexample to {0}")]
    NotACounterexample(ConjectureId),
    #[error("unknown conjecture `{0}`")]
    UnknownConjecture(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConjectureId {
    C1,
    C2,
    C3,
    C4,
    C5,
    C6,
}

impl ConjectureId {
    pub const ALL: [ConjectureId; 6] = [
        ConjectureId::C1,
        ConjectureId::C2,
        ConjectureId::C3,
        ConjectureId::C4,
        ConjectureId::C5,
        ConjectureId::C6,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ConjectureId::C1 => "c1",
            ConjectureId::C2 => "c2",
            ConjectureId::C3 => "c3",
            ConjectureId::C4 => "c4",
            ConjectureId::C5 => "c5",
            ConjectureId::C6 => "c6",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for ConjectureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ConjectureId {
    type Err = ConjectureError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ConjectureId::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| ConjectureError::UnknownConjecture(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Satisfied,
    Fails,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Satisfied => "Satisfied",
            Status::Fails => "Fails",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Evidence {
    /// C1 satisfied at `vertex`.
    Vertex {
        vertex: usize,
        dplus: usize,
        dplusplus: usize,
    },
    /// C1 failure: `(d+, d++)` per vertex.
    DegreeTable(Vec<(usize, usize)>),
    /// C2: the vector `S 1`.
    RowSums(RatVector),
    /// `x >= 0` with `M x >= 1`: C3 failure (`M = S`, `x = w`) or C4
    /// failure (`M = S^T`, `x = p`).
    StrictWitness(RatVector),
    /// C3 satisfied: `q >= 0`, `q != 0`, `S^T q <= 0`.
    DualObstruction(RatVector),
    /// C4 satisfied: `w >= 0`, `1^T w = 1`, `S w <= 0`.
    WeightWitness(RatVector),
    /// C5 satisfied: `v` has a positive component and `S v <= 0`.
    ScoreWitness(RatVector),
    /// C6 satisfied vacuously: `S u = 0`, `u != 0`.
    NullVector(RatVector),
    /// C6 satisfied: `S^{-1}` has a negative entry at `(row, col)` (0-based).
    NegativeInverseEntry {
        row: usize,
        col: usize,
        inverse: RatMatrix,
    },
    /// C5/C6 failure: `S^{-1} >= 0`.
    NonnegativeInverse(RatMatrix),
}

impl Evidence {
    pub fn kind(&self) -> &'static str {
        match self {
            Evidence::Vertex { .. } => "vertex",
            Evidence::DegreeTable(_) => "degree_table",
            Evidence::RowSums(_) => "row_sums",
            Evidence::StrictWitness(_) => "strict_witness",
            Evidence::DualObstruction(_) => "dual_obstruction",
            Evidence::WeightWitness(_) => "weight_witness",
            Evidence::ScoreWitness(_) => "score_witness",
            Evidence::NullVector(_) => "null_vector",
            Evidence::NegativeInverseEntry { .. } => "negative_inverse_entry",
            Evidence::NonnegativeInverse(_) => "nonnegative_inverse",
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Evidence::Vertex { vertex, .. } => json!(vertex),
            Evidence::DegreeTable(t) => json!(t.iter().map(|&(a, b)| [a, b]).collect::<Vec<_>>()),
            Evidence::RowSums(v)
            | Evidence::StrictWitness(v)
            | Evidence::DualObstruction(v)
            | Evidence::WeightWitness(v)
            | Evidence::ScoreWitness(v)
            | Evidence::NullVector(v) => json!(v.to_strings()),
            Evidence::NegativeInverseEntry { row, col, inverse } => json!({
                "row": row + 1,
                "col": col + 1,
                "inverse": inverse.to_string_rows(),
            }),
            Evidence::NonnegativeInverse(m) => json!(m.to_string_rows()),
        }
    }

    /// Short human-readable form, e.g. `w = [1, 0]`.
    pub fn describe(&self) -> String {
        match self {
            Evidence::Vertex {
                vertex,
                dplus,
                dplusplus,
            } => format!("v = {vertex} (d+ = {dplus}, d++ = {dplusplus})"),
            Evidence::DegreeTable(t) => format!("degree table {t:?}"),
            Evidence::RowSums(v) => format!("S1 = {v}"),
            Evidence::StrictWitness(v) => format!("strict witness {v}"),
            Evidence::DualObstruction(v) => format!("q = {v}"),
            Evidence::WeightWitness(v) => format!("w = {v}"),
            Evidence::ScoreWitness(v) => format!("v = {v}"),
            Evidence::NullVector(v) => format!("null vector {v}"),
            Evidence::NegativeInverseEntry { row, col, .. } => {
                format!("inverse entry ({}, {}) < 0", row + 1, col + 1)
            }
            Evidence::NonnegativeInverse(_) => "nonnegative inverse".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub conjecture: ConjectureId,
    pub status: Status,
    pub evidence: Evidence,
}

impl Verdict {
    pub fn new(conjecture: ConjectureId, status: Status, evidence: Evidence) -> Self {
        Verdict {
            conjecture,
            status,
            evidence,
        }
    }

    pub fn is_satisfied(&self) -> bool {
        self.status == Status::Satisfied
    }

    /// Re-checks the evidence against `d` and its matrix `s` by direct
    /// arithmetic only.
    pub fn verify(&self, d: &Digraph, s: &RatMatrix) -> bool {
        match self.conjecture {
            ConjectureId::C1 => verify_c1(self, d),
            _ => self.verify_matrix(s).unwrap_or(false),
        }
    }

    /// Matrix-only verification; `None` for C1, which needs the digraph.
    pub fn verify_matrix(&self, s: &RatMatrix) -> Option<bool> {
        use ConjectureId as C;
        use Evidence as E;
        use Status::*;
        let n = s.rows();
        let mv = |m: &RatMatrix, v: &RatVector| m.mat_vec(v).ok();
        let ok = match (self.conjecture, self.status, &self.evidence) {
            (C::C1, _, _) => return None,
            (C::C2, st, E::RowSums(sums)) => {
                mv(s, &RatVector::ones(n)).as_ref() == Some(sums)
                    && (st == Satisfied) == sums.iter().any(|x| !x.is_positive())
            }
            (C::C3, Fails, E::StrictWitness(w)) => {
                w.is_nonnegative() && mv(s, w).is_some_and(|sw| sw.is_positive())
            }
            (C::C3, Satisfied, E::DualObstruction(q)) => {
                q.is_nonnegative()
                    && !q.is_zero()
                    && mv(&s.transpose(), q).is_some_and(|v| v.is_nonpositive())
            }
            (C::C4, Satisfied, E::WeightWitness(w)) => {
                w.is_nonnegative()
                    && w.sum().is_one()
                    && mv(s, w).is_some_and(|v| v.is_nonpositive())
            }
            (C::C4, Fails, E::StrictWitness(p)) => {
                p.is_nonnegative() && mv(&s.transpose(), p).is_some_and(|v| v.is_positive())
            }
            (C::C5, Satisfied, E::ScoreWitness(v)) => {
                v.has_positive_component() && mv(s, v).is_some_and(|sv| sv.is_nonpositive())
            }
            (C::C5 | C::C6, Fails, E::NonnegativeInverse(inv)) => {
                inv.is_nonnegative() && s.mat_mul(inv).is_ok_and(|p| p.is_identity())
            }
            (C::C6, Satisfied, E::NullVector(u)) => {
                !u.is_zero() && mv(s, u).is_some_and(|su| su.is_zero())
            }
            (C::C6, Satisfied, E::NegativeInverseEntry { row, col, inverse }) => {
                inverse.get(*row, *col).is_some_and(|x| x.is_negative())
                    && s.mat_mul(inverse).is_ok_and(|p| p.is_identity())
            }
            _ => false,
        };
        Some(ok)
    }

    /// One JSON-lines record.
    pub fn to_json(&self, instance: &str, violations: &[String]) -> Value {
        json!({
            "instance": instance,
            "conjecture": self.conjecture.as_str(),
            "status": self.status.as_str(),
            "evidence_kind": self.evidence.kind(),
            "evidence": self.evidence.to_json(),
            "violations": violations,
        })
    }
}

fn verify_c1(v: &Verdict, d: &Digraph) -> bool {
    let table = d.out_degree_table();
    match (v.status, &v.evidence) {
        (
            Status::Satisfied,
            Evidence::Vertex {
                vertex,
                dplus,
                dplusplus,
            },
        ) => {
            (1..=d.vertex_count()).contains(vertex)
                && table[vertex - 1] == (*dplus, *dplusplus)
                && dplus <= dplusplus
        }
        (Status::Fails, Evidence::DegreeTable(t)) => *t == table && t.iter().all(|(a, b)| a > b),
        _ => false,
    }
}

fn nonempty(d: &Digraph) -> Result<(), ConjectureError> {
    if d.vertex_count() == 0 {
        Err(ConjectureError::EmptyDigraph)
    } else {
        Ok(())
    }
}

fn nonempty_matrix(s: &RatMatrix) -> Result<(), ConjectureError> {
    if s.rows() == 0 || !s.is_square() {
        Err(ConjectureError::EmptyDigraph)
    } else {
        Ok(())
    }
}

pub fn check_c1(d: &Digraph) -> Result<Verdict, ConjectureError> {
    nonempty(d)?;
    let table = d.out_degree_table();
    Ok(match table.iter().position(|(a, b)| a <= b) {
        Some(i) => Verdict::new(
            ConjectureId::C1,
            Status::Satisfied,
            Evidence::Vertex {
                vertex: i + 1,
                dplus: table[i].0,
                dplusplus: table[i].1,
            },
        ),
        None => Verdict::new(
            ConjectureId::C1,
            Status::Fails,
            Evidence::DegreeTable(table),
        ),
    })
}

pub fn check_c2_matrix(s: &RatMatrix) -> Result<Verdict, ConjectureError> {
    nonempty_matrix(s)?;
    let sums = s.mat_vec(&RatVector::ones(s.cols())).expect("square");
    let status = if sums.iter().any(|x| !x.is_positive()) {
        Status::Satisfied
    } else {
        Status::Fails
    };
    Ok(Verdict::new(
        ConjectureId::C2,
        status,
        Evidence::RowSums(sums),
    ))
}

pub fn check_c3_matrix(s: &RatMatrix) -> Result<Verdict, ConjectureError> {
    nonempty_matrix(s)?;
    // w >= 0 with S w >= 1  <=>  p >= 0 with (S^T)^T p >= 1
    let out = strict_cone_feasibility(&s.transpose()).expect("square");
    Ok(match out {
        StrictOutcome::Witness(w) => {
            Verdict::new(ConjectureId::C3, Status::Fails, Evidence::StrictWitness(w))
        }
        StrictOutcome::Obstruction(q) => Verdict::new(
            ConjectureId::C3,
            Status::Satisfied,
            Evidence::DualObstruction(q),
        ),
    })
}

pub fn check_c4_matrix(s: &RatMatrix) -> Result<Verdict, ConjectureError> {
    nonempty_matrix(s)?;
    let n = s.rows();
    let sys = assemble_weight_system(s).expect("square");
    Ok(match solve_standard(&sys) {
        FeasibilityOutcome::Solution(x) => {
            let w: RatVector = x.iter().take(n).cloned().collect();
            Verdict::new(
                ConjectureId::C4,
                Status::Satisfied,
                Evidence::WeightWitness(w),
            )
        }
        FeasibilityOutcome::Certificate(y) => {
            // (S^T p + r 1 >= 0, p >= 0, r < 0); rescale so S^T p >= 1
            let r = -y[n].clone();
            debug_assert!(r.is_positive());
            let p: RatVector = y.iter().take(n).map(|x| x / &r).collect();
            Verdict::new(ConjectureId::C4, Status::Fails, Evidence::StrictWitness(p))
        }
    })
}

fn c5_from_inversion(inv: &Inversion) -> Verdict {
    let v = match inv {
        Inversion::Singular { null_vector } => {
            if null_vector.has_positive_component() {
                null_vector.clone()
            } else {
                null_vector.neg()
            }
        }
        Inversion::Inverse(m) => match m.first_negative_entry() {
            // S (-col_j) = -e_j <= 0 and the i-th component is positive
            Some((_, j)) => m.col(j).neg(),
            None => {
                return Verdict::new(
                    ConjectureId::C5,
                    Status::Fails,
                    Evidence::NonnegativeInverse(m.clone()),
                )
            }
        },
    };
    Verdict::new(
        ConjectureId::C5,
        Status::Satisfied,
        Evidence::ScoreWitness(v),
    )
}

fn c6_from_inversion(inv: &Inversion) -> Verdict {
    match inv {
        Inversion::Singular { null_vector } => Verdict::new(
            ConjectureId::C6,
            Status::Satisfied,
            Evidence::NullVector(null_vector.clone()),
        ),
        Inversion::Inverse(m) => match m.first_negative_entry() {
            Some((row, col)) => Verdict::new(
                ConjectureId::C6,
                Status::Satisfied,
                Evidence::NegativeInverseEntry {
                    row,
                    col,
                    inverse: m.clone(),
                },
            ),
            None => Verdict::new(
                ConjectureId::C6,
                Status::Fails,
                Evidence::NonnegativeInverse(m.clone()),
            ),
        },
    }
}

pub fn check_c5_matrix(s: &RatMatrix) -> Result<Verdict, ConjectureError> {
    nonempty_matrix(s)?;
    Ok(c5_from_inversion(&s.invert().expect("square")))
}

pub fn check_c6_matrix(s: &RatMatrix) -> Result<Verdict, ConjectureError> {
    nonempty_matrix(s)?;
    Ok(c6_from_inversion(&s.invert().expect("square")))
}

/// C5 decided by linear programming instead of inversion: for each `k`,
/// look for a free `v` with `v_k = 1` and `S v + z = 0`, `z >= 0`.
pub fn check_c5_matrix_lp(s: &RatMatrix) -> Result<Verdict, ConjectureError> {
    nonempty_matrix(s)?;
    let n = s.rows();
    for k in 0..n {
        // columns: v (n, free), z (n); rows: S v + z = 0, v_k = 1
        let mut m = RatMatrix::zeros(n + 1, 2 * n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = s[(i, j)].clone();
            }
            m[(i, n + i)] = Rational::one();
        }
        m[(n, k)] = Rational::one();
        let sys = StandardSystem::new(m, RatVector::basis(n + 1, n)).expect("dims");
        let free: Vec<usize> = (0..n).collect();
        let split = sys.split_free_columns(&free);
        if let FeasibilityOutcome::Solution(x) = solve_standard(&split) {
            let v: RatVector = (0..n).map(|j| &x[j] - &x[2 * n + j]).collect();
            return Ok(Verdict::new(
                ConjectureId::C5,
                Status::Satisfied,
                Evidence::ScoreWitness(v),
            ));
        }
    }
    let inverse = match s.invert().expect("square") {
        Inversion::Inverse(m) => m,
        Inversion::Singular { .. } => unreachable!("a null vector would satisfy some pinned LP"),
    };
    Ok(Verdict::new(
        ConjectureId::C5,
        Status::Fails,
        Evidence::NonnegativeInverse(inverse),
    ))
}

pub fn check_c2(d: &Digraph) -> Result<Verdict, ConjectureError> {
    nonempty(d)?;
    check_c2_matrix(&second_neighborhood_matrix(d))
}

pub fn check_c3(d: &Digraph) -> Result<Verdict, ConjectureError> {
    nonempty(d)?;
    check_c3_matrix(&second_neighborhood_matrix(d))
}

pub fn check_c4(d: &Digraph) -> Result<Verdict, ConjectureError> {
    nonempty(d)?;
    check_c4_matrix(&second_neighborhood_matrix(d))
}

pub fn check_c5(d: &Digraph) -> Result<Verdict, ConjectureError> {
    nonempty(d)?;
    check_c5_matrix(&second_neighborhood_matrix(d))
}

pub fn check_c6(d: &Digraph) -> Result<Verdict, ConjectureError> {
    nonempty(d)?;
    check_c6_matrix(&second_neighborhood_matrix(d))
}

pub fn check(c: ConjectureId, d: &Digraph) -> Result<Verdict, ConjectureError> {
    match c {
        ConjectureId::C1 => check_c1(d),
        ConjectureId::C2 => check_c2(d),
        ConjectureId::C3 => check_c3(d),
        ConjectureId::C4 => check_c4(d),
        ConjectureId::C5 => check_c5(d),
        ConjectureId::C6 => check_c6(d),
    }
}

/// All six verdicts, C1 from `d` and C2..C6 from `s`, sharing one inversion.
fn check_all_with(d: &Digraph, s: &RatMatrix) -> Result<Vec<Verdict>, ConjectureError> {
    nonempty(d)?;
    nonempty_matrix(s)?;
    let inv = s.invert().expect("square");
    Ok(vec![
        check_c1(d)?,
        check_c2_matrix(s)?,
        check_c3_matrix(s)?,
        check_c4_matrix(s)?,
        c5_from_inversion(&inv),
        c6_from_inversion(&inv),
    ])
}

pub fn check_all(d: &Digraph) -> Result<Vec<Verdict>, ConjectureError> {
    check_all_with(d, &second_neighborhood_matrix(d))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationCheck {
    pub name: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossCheckReport {
    pub instance: String,
    /// Verdicts for `D`, in `ConjectureId` order.
    pub verdicts: Vec<Verdict>,
    /// Verdicts for the reversal of `D`.
    pub reverse_verdicts: Vec<Verdict>,
    pub relations: Vec<RelationCheck>,
    pub violations: Vec<String>,
    /// `d-(v) - d--(v)` per vertex.
    pub degree_gaps: Vec<i64>,
}

impl CrossCheckReport {
    pub fn verdict(&self, c: ConjectureId) -> &Verdict {
        &self.verdicts[c.index()]
    }

    pub fn reverse_verdict(&self, c: ConjectureId) -> &Verdict {
        &self.reverse_verdicts[c.index()]
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// Per-verdict records for `D` followed by a `cross-check` summary.
    pub fn to_json_lines(&self) -> Vec<Value> {
        let mut lines: Vec<Value> = self
            .verdicts
            .iter()
            .map(|v| {
                let tag = v.conjecture.as_str();
                let mine: Vec<String> = self
                    .violations
                    .iter()
                    .filter(|x| x.contains(tag))
                    .cloned()
                    .collect();
                v.to_json(&self.instance, &mine)
            })
            .collect();
        let relations: serde_json::Map<String, Value> = self
            .relations
            .iter()
            .map(|r| (r.name.clone(), Value::Bool(r.passed)))
            .collect();
        lines.push(json!({
            "instance": self.instance,
            "conjecture": "cross-check",
            "status": if self.passed() { "pass" } else { "fail" },
            "evidence_kind": "relations",
            "evidence": relations,
            "violations": self.violations,
        }));
        lines
    }
}

fn fails(v: &Verdict) -> bool {
    v.status == Status::Fails
}

/// Runs every checker on `D` and its reversal and checks the per-digraph
/// consequences of the equivalence theorems.
pub fn consistency_check(d: &Digraph) -> Result<CrossCheckReport, ConjectureError> {
    let rev = d.reverse();
    let s = second_neighborhood_matrix(d);
    let s_rev = second_neighborhood_matrix(&rev);
    consistency_check_with_matrices(d, &s, &s_rev)
}

/// [`consistency_check`] with caller-supplied matrices for `D` and its
/// reversal, so detector sensitivity can be tested on matrices that did not
/// come from `d`.
pub fn consistency_check_with_matrices(
    d: &Digraph,
    s: &RatMatrix,
    s_rev: &RatMatrix,
) -> Result<CrossCheckReport, ConjectureError> {
    let rev = d.reverse();
    let fwd = check_all_with(d, s)?;
    let bwd = check_all_with(&rev, s_rev)?;
    let get = |vs: &[Verdict], c: ConjectureId| vs[c.index()].clone();
    use ConjectureId::*;

    let mut relations = Vec::new();
    let mut push = |name: &str, passed: bool| {
        relations.push(RelationCheck {
            name: name.to_string(),
            passed,
        })
    };

    for (tag, vs) in [("", &fwd), ("_reverse", &bwd)] {
        push(
            &format!("c1_eq_c2{tag}"),
            get(vs, C1).status == get(vs, C2).status,
        );
        push(
            &format!("c5_eq_c6{tag}"),
            get(vs, C5).status == get(vs, C6).status,
        );
        push(
            &format!("c5_fail_implies_c4_fail{tag}"),
            !fails(&get(vs, C5)) || fails(&get(vs, C4)),
        );
    }

    // D fails C4 <=> rev(D) fails C3, with the evidence carried across by
    // transposition: a C4 dual p for D is a C3 strict witness for rev(D),
    // and a C3 obstruction q for rev(D) is a C4 weight for D.
    for (tag, (a, a_s, b, b_s)) in [
        ("c4_fail_iff_reverse_c3_fail", (&fwd, s, &bwd, s_rev)),
        ("reverse_c4_fail_iff_c3_fail", (&bwd, s_rev, &fwd, s)),
    ] {
        let c4 = get(a, C4);
        let c3 = get(b, C3);
        let same = fails(&c4) == fails(&c3);
        let translated = match (&c4.evidence, &c3.evidence) {
            (Evidence::StrictWitness(p), _) => b_s
                .mat_vec(p)
                .is_ok_and(|v| v.is_positive() && p.is_nonnegative()),
            (_, Evidence::DualObstruction(q)) => a_s
                .mat_vec(q)
                .is_ok_and(|v| v.is_nonpositive() && q.is_nonnegative() && !q.is_zero()),
            _ => false,
        };
        push(tag, same && translated);
    }

    push(
        "c2_fail_implies_reverse_c4_fail",
        !fails(&get(&fwd, C2)) || fails(&get(&bwd, C4)),
    );
    push(
        "reverse_c2_fail_implies_c4_fail",
        !fails(&get(&bwd, C2)) || fails(&get(&fwd, C4)),
    );

    for v in &fwd {
        push(&format!("verified_{}", v.conjecture), v.verify(d, s));
    }
    for v in &bwd {
        push(
            &format!("verified_{}_reverse", v.conjecture),
            v.verify(&rev, s_rev),
        );
    }

    let violations = relations
        .iter()
        .filter(|r| !r.passed)
        .map(|r| r.name.clone())
        .collect();
    let degree_gaps = d
        .vertices()
        .map(|v| d.degree_gap(v).expect("vertex in range"))
        .collect();
    Ok(CrossCheckReport {
        instance: instance_label(d),
        verdicts: fwd,
        reverse_verdicts: bwd,
        relations,
        violations,
        degree_gaps,
    })
}

/// Compact identifier: `n:tail>head,tail>head,...`.
pub fn instance_label(d: &Digraph) -> String {
    let arcs: Vec<String> = d.arcs().map(|a| format!("{}>{}", a.tail, a.head)).collect();
    format!("{}:{}", d.vertex_count(), arcs.join(","))
}

/// Arc-deletion-local minimality using an arbitrary status oracle.
///
/// `Err(NotACounterexample)` unless `checker(d)` fails; otherwise true iff
/// every single-arc deletion satisfies.
pub fn minimality_local_with<F>(
    d: &Digraph,
    c: ConjectureId,
    checker: F,
) -> Result<bool, ConjectureError>
where
    F: Fn(&Digraph) -> Status,
{
    if checker(d) != Status::Fails {
        return Err(ConjectureError::NotACounterexample(c));
    }
    Ok(d.arcs().all(|a: Arc| {
        let smaller = d.delete_arc(a).expect("arc taken from d");
        checker(&smaller) == Status::Satisfied
    }))
}

/// Every single-arc deletion of a counterexample satisfies `c`. This is a
/// necessary condition for having the fewest arcs among counterexamples.
pub fn minimality_local(d: &Digraph, c: ConjectureId) -> Result<bool, ConjectureError> {
    minimality_local_with(d, c, |g| real_status(c, g))
}

/// Every single-vertex deletion of a counterexample satisfies `c`.
pub fn vertex_minimality_local_with<F>(
    d: &Digraph,
    c: ConjectureId,
    checker: F,
) -> Result<bool, ConjectureError>
where
    F: Fn(&Digraph) -> Status,
{
    if checker(d) != Status::Fails {
        return Err(ConjectureError::NotACounterexample(c));
    }
    Ok(d.vertices().all(|v| {
        let (smaller, _) = d.delete_vertex(v).expect("vertex in range");
        smaller.vertex_count() == 0 || checker(&smaller) == Status::Satisfied
    }))
}

pub fn vertex_minimality_local(d: &Digraph, c: ConjectureId) -> Result<bool, ConjectureError> {
    vertex_minimality_local_with(d, c, |g| real_status(c, g))
}

fn real_status(c: ConjectureId, d: &Digraph) -> Status {
    if d.vertex_count() == 0 {
        return Status::Satisfied;
    }
    check(c, d).expect("nonempty").status
}

/// Diagnostics a minimal counterexample would exhibit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalityDiagnostics {
    pub degree_gaps: Vec<i64>,
    /// All gaps in `{1, 2}`.
    pub gaps_in_one_two: bool,
    pub strongly_connected: bool,
    pub min_in_degree: Option<usize>,
    /// For a vertex of largest in-degree (lowest index), the vertices at
    /// in-distance exactly three.
    pub in_distance_three: Vec<usize>,
}

pub fn minimality_diagnostics(d: &Digraph) -> MinimalityDiagnostics {
    let degree_gaps: Vec<i64> = d
        .vertices()
        .map(|v| d.degree_gap(v).expect("vertex in range"))
        .collect();
    let top = d
        .vertices()
        .max_by_key(|&v| (d.in_degree(v).expect("in range"), std::cmp::Reverse(v)));
    MinimalityDiagnostics {
        gaps_in_one_two: degree_gaps.iter().all(|g| (1..=2).contains(g)),
        degree_gaps,
        strongly_connected: d.is_strongly_connected(),
        min_in_degree: d.min_in_degree(),
        in_distance_three: top
            .map(|y| d.vertices_at_in_distance(y, 3).expect("in range"))
            .unwrap_or_default(),
    }
}

/// Minimum out-degree needed before a digraph is worth checking as a
/// minimal counterexample to C1.
pub const MIN_OUT_DEGREE_BOUND: usize = 7;

/// True iff `d` could still be a minimal counterexample under the degree
/// bound, i.e. every vertex has out-degree at least seven.
pub fn kl_prune(d: &Digraph) -> bool {
    d.min_out_degree()
        .is_some_and(|m| m >= MIN_OUT_DEGREE_BOUND)
}

/// Sum over the row of `S` weighted by `u`, used for blow-up identities.
pub fn weighted_row_sums(s: &RatMatrix, u: &[u64]) -> RatVector {
    let uv: RatVector = u
        .iter()
        .map(|&x| Rational::from_integer(x.into()))
        .collect();
    s.mat_vec(&uv).expect("dimension matches")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{int, rat};

    fn c3() -> Digraph {
        Digraph::new(3, [(1, 2), (2, 3), (3, 1)]).unwrap()
    }
    fn p2() -> Digraph {
        Digraph::new(2, [(1, 2)]).unwrap()
    }

    fn vertex_of(v: &Verdict) -> usize {
        match v.evidence {
            Evidence::Vertex { vertex, .. } => vertex,
            _ => panic!("{v:?}"),
        }
    }

    #[test]
    fn c1_examples() {
        let v = check_c1(&c3()).unwrap();
        assert!(v.is_satisfied());
        assert_eq!(vertex_of(&v), 1);
        let tt = Digraph::new(3, [(1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(vertex_of(&check_c1(&tt).unwrap()), 3);
        assert_eq!(vertex_of(&check_c1(&Digraph::empty(2)).unwrap()), 1);
        assert_eq!(
            check_c1(&Digraph::empty(0)),
            Err(ConjectureError::EmptyDigraph)
        );
    }

    #[test]
    fn c2_examples() {
        let v = check_c2(&c3()).unwrap();
        assert_eq!(v.evidence, Evidence::RowSums(RatVector::zeros(3)));
        assert!(v.is_satisfied());
        let v = check_c2(&p2()).unwrap();
        assert_eq!(v.evidence, Evidence::RowSums(RatVector::from_ints(&[1, 0])));
        let star = Digraph::new(3, [(1, 2), (1, 3)]).unwrap();
        assert!(check_c2(&star).unwrap().is_satisfied());
    }

    #[test]
    fn c3_examples() {
        for d in [c3(), p2(), Digraph::new(3, [(1, 2), (2, 3)]).unwrap()] {
            let v = check_c3(&d).unwrap();
            assert!(v.is_satisfied(), "{d:?}");
            assert!(v.verify(&d, &second_neighborhood_matrix(&d)));
        }
    }

    #[test]
    fn c4_examples() {
        let third = rat(1, 3);
        assert_eq!(
            check_c4(&c3()).unwrap().evidence,
            Evidence::WeightWitness(RatVector::new(vec![third.clone(), third.clone(), third]))
        );
        assert_eq!(
            check_c4(&p2()).unwrap().evidence,
            Evidence::WeightWitness(RatVector::from_ints(&[1, 0]))
        );
        assert_eq!(
            check_c4(&Digraph::empty(1)).unwrap().evidence,
            Evidence::WeightWitness(RatVector::from_ints(&[1]))
        );
    }

    #[test]
    fn c4_fails_on_synthetic_matrix() {
        // S = I: S w <= 0 forces w = 0
        let s = RatMatrix::identity(2);
        let v = check_c4_matrix(&s).unwrap();
        assert_eq!(v.status, Status::Fails);
        assert_eq!(v.verify_matrix(&s), Some(true));
        match &v.evidence {
            Evidence::StrictWitness(p) => {
                assert!(s
                    .transpose()
                    .mat_vec(p)
                    .unwrap()
                    .all_ge(&RatVector::ones(2)))
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn c5_c6_examples() {
        assert_eq!(
            check_c5(&c3()).unwrap().evidence,
            Evidence::ScoreWitness(RatVector::from_ints(&[1, 1, 1]))
        );
        assert_eq!(
            check_c5(&p2()).unwrap().evidence,
            Evidence::ScoreWitness(RatVector::from_ints(&[1, 0]))
        );
        assert!(check_c6(&c3()).unwrap().is_satisfied());
        assert!(matches!(
            check_c6(&p2()).unwrap().evidence,
            Evidence::NullVector(_)
        ));
    }

    #[test]
    fn c5_negative_entry_route() {
        let s = RatMatrix::from_int_rows(&[&[1, 1], &[0, 1]]).unwrap();
        // inverse [[1,-1],[0,1]]
        let v = check_c5_matrix(&s).unwrap();
        assert_eq!(
            v.evidence,
            Evidence::ScoreWitness(RatVector::new(vec![int(1), int(-1)]))
        );
        assert_eq!(v.verify_matrix(&s), Some(true));
        let v6 = check_c6_matrix(&s).unwrap();
        assert!(matches!(
            v6.evidence,
            Evidence::NegativeInverseEntry { row: 0, col: 1, .. }
        ));
        assert_eq!(v6.verify_matrix(&s), Some(true));

        let id = RatMatrix::identity(2);
        assert_eq!(check_c5_matrix(&id).unwrap().status, Status::Fails);
        assert_eq!(check_c6_matrix(&id).unwrap().status, Status::Fails);
        assert_eq!(check_c5_matrix_lp(&id).unwrap().status, Status::Fails);
        assert!(check_c5_matrix_lp(&s).unwrap().verify_matrix(&s).unwrap());
    }

    #[test]
    fn verify_rejects_tampered_evidence() {
        let s = second_neighborhood_matrix(&c3());
        let bad = Verdict::new(
            ConjectureId::C4,
            Status::Satisfied,
            Evidence::WeightWitness(RatVector::from_ints(&[1, 0, 0])),
        );
        assert_eq!(bad.verify_matrix(&s), Some(false));
        let mismatched = Verdict::new(
            ConjectureId::C5,
            Status::Satisfied,
            Evidence::NullVector(RatVector::from_ints(&[1, 1, 1])),
        );
        assert_eq!(mismatched.verify_matrix(&s), Some(false));
        let c1 = Verdict::new(
            ConjectureId::C1,
            Status::Satisfied,
            Evidence::Vertex {
                vertex: 1,
                dplus: 0,
                dplusplus: 0,
            },
        );
        assert!(!c1.verify(&c3(), &s));
    }

    #[test]
    fn three_cycle_cross_check() {
        let r = consistency_check(&c3()).unwrap();
        assert!(r.passed(), "{:?}", r.violations);
        assert!(r.verdicts.iter().all(Verdict::is_satisfied));
        assert_eq!(r.degree_gaps, vec![0, 0, 0]);
    }

    #[test]
    fn injected_matrix_is_detected() {
        // C1 computed from the 3-cycle, C2 from S = I, whose row sums are > 0
        let d = c3();
        let r =
            consistency_check_with_matrices(&d, &RatMatrix::identity(3), &RatMatrix::identity(3))
                .unwrap();
        assert!(
            r.violations.contains(&"c1_eq_c2".to_string()),
            "{:?}",
            r.violations
        );
    }

    #[test]
    fn json_record_shape() {
        let v = check_c4(&p2()).unwrap();
        let j = v.to_json("p2", &[]);
        assert_eq!(j["evidence"], json!(["1", "0"]));
        assert_eq!(j["evidence_kind"], "weight_witness");
        assert_eq!(j["status"], "Satisfied");
        assert_eq!(j["conjecture"], "c4");
    }

    #[test]
    fn minimality_harness() {
        assert_eq!(
            minimality_local(&p2(), ConjectureId::C1),
            Err(ConjectureError::NotACounterexample(ConjectureId::C1))
        );
        let marked = c3();
        let only_marked = |g: &Digraph| {
            if *g == marked {
                Status::Fails
            } else {
                Status::Satisfied
            }
        };
        assert_eq!(
            minimality_local_with(&marked, ConjectureId::C1, only_marked),
            Ok(true)
        );
        assert_eq!(
            vertex_minimality_local_with(&marked, ConjectureId::C1, only_marked),
            Ok(true)
        );
        // one deletion also "fails"
        let path = Digraph::new(3, [(1, 2), (2, 3)]).unwrap();
        let two_marked = |g: &Digraph| {
            if *g == marked || *g == path {
                Status::Fails
            } else {
                Status::Satisfied
            }
        };
        assert_eq!(
            minimality_local_with(&marked, ConjectureId::C1, two_marked),
            Ok(false)
        );
    }

    #[test]
    fn diagnostics_fields() {
        let d = Digraph::new(4, [(1, 2), (2, 3), (3, 4), (4, 1)]).unwrap();
        let diag = minimality_diagnostics(&d);
        assert!(diag.strongly_connected);
        assert_eq!(diag.min_in_degree, Some(1));
        assert_eq!(diag.degree_gaps, vec![0; 4]);
        assert!(!diag.gaps_in_one_two);
        // vertex 1: in-distance 3 from 2
        assert_eq!(diag.in_distance_three, vec![2]);
    }

    #[test]
    fn kl_prune_examples() {
        assert!(!kl_prune(&Digraph::empty(0)));
        assert!(!kl_prune(&Digraph::empty(5)));
        assert!(!kl_prune(&c3()));
        // rotational tournament on 15 vertices: i -> i+1..=i+7 mod 15
        let arcs = (0..15usize).flat_map(|i| (1..=7).map(move |k| (i + 1, (i + k) % 15 + 1)));
        let t = Digraph::new(15, arcs).unwrap();
        assert!(t.is_tournament());
        assert!(kl_prune(&t));
    }

    #[test]
    fn conjecture_ids() {
        assert_eq!("C4".parse::<ConjectureId>(), Ok(ConjectureId::C4));
        assert!("c7".parse::<ConjectureId>().is_err());
        assert!(ConjectureId::C1 < ConjectureId::C6);
    }
}
