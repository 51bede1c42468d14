//! DIMACS CNF encodings of "some `r`-coloring of `[1, N]` has no
//! monochromatic `k`-term progression", and decoding of SAT-competition
//! solver output back into colorings or UNSAT attestations.
//!
//! With two colors, variable `i` is true when point `i` has color 2, and
//! each progression contributes one clause forbidding all-true and one
//! forbidding all-false. With `r >= 3` colors, variable `(i-1)r + c` means
//! point `i` has color `c`; every point gets an at-least-one clause and
//! pairwise at-most-one clauses, and every (progression, color) pair a
//! negative clause.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::certificate::UnsatAttestation;
use crate::error::{Error, Result};
use crate::search::{count_aps, verify, Coloring};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cnf {
    pub num_vars: u64,
    pub clauses: Vec<Vec<i64>>,
    pub comments: Vec<String>,
}

impl Cnf {
    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    /// Whether `assignment[v - 1]` for each variable `v` satisfies every
    /// clause.
    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        assert_eq!(assignment.len() as u64, self.num_vars);
        self.clauses.iter().all(|clause| {
            clause
                .iter()
                .any(|&lit| assignment[(lit.unsigned_abs() - 1) as usize] == (lit > 0))
        })
    }

    pub fn to_dimacs(&self) -> String {
        self.to_string()
    }

    pub fn parse_dimacs(text: &str) -> Result<Cnf> {
        let mut comments = Vec::new();
        let mut header: Option<(u64, usize)> = None;
        let mut clauses = Vec::new();
        let mut current: Vec<i64> = Vec::new();
        let mut last_line = 0;
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            last_line = line_no;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('c') {
                if rest.is_empty() || rest.starts_with(' ') {
                    if header.is_none() {
                        comments.push(rest.trim().to_string());
                    }
                    continue;
                }
            }
            if line.starts_with('p') {
                if header.is_some() {
                    return Err(parse_err(line_no, "duplicate problem line"));
                }
                let fields: Vec<&str> = line.split_whitespace().collect();
                let parsed = match fields.as_slice() {
                    ["p", "cnf", v, c] => v.parse::<u64>().ok().zip(c.parse::<usize>().ok()),
                    _ => None,
                };
                header = Some(parsed.ok_or_else(|| parse_err(line_no, "expected `p cnf <vars> <clauses>`"))?);
                continue;
            }
            let (num_vars, _) = header.ok_or_else(|| parse_err(line_no, "clause before problem line"))?;
            for token in line.split_whitespace() {
                let lit: i64 = token
                    .parse()
                    .map_err(|_| parse_err(line_no, &format!("bad literal {token:?}")))?;
                if lit == 0 {
                    clauses.push(std::mem::take(&mut current));
                } else if lit.unsigned_abs() > num_vars {
                    return Err(parse_err(line_no, &format!("literal {lit} exceeds {num_vars} variables")));
                } else {
                    current.push(lit);
                }
            }
        }
        let (num_vars, num_clauses) = header.ok_or_else(|| parse_err(last_line.max(1), "missing problem line"))?;
        if !current.is_empty() {
            return Err(parse_err(last_line, "last clause is not terminated by 0"));
        }
        if clauses.len() != num_clauses {
            return Err(parse_err(
                last_line.max(1),
                &format!("header declares {num_clauses} clauses, found {}", clauses.len()),
            ));
        }
        Ok(Cnf {
            num_vars,
            clauses,
            comments,
        })
    }
}

impl fmt::Display for Cnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut buf = String::with_capacity(self.clauses.len() * 16);
        for c in &self.comments {
            let _ = writeln!(buf, "c {c}");
        }
        let _ = writeln!(buf, "p cnf {} {}", self.num_vars, self.clauses.len());
        for clause in &self.clauses {
            for lit in clause {
                let _ = write!(buf, "{lit} ");
            }
            buf.push_str("0\n");
        }
        f.write_str(&buf)
    }
}

fn parse_err(line: usize, message: &str) -> Error {
    Error::Parse {
        line,
        message: message.to_string(),
    }
}

/// The `(r, k, N)` an encoding was generated for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceMeta {
    pub r: u8,
    pub k: u64,
    pub n_points: u64,
}

impl InstanceMeta {
    pub fn num_vars(&self) -> u64 {
        if self.r == 2 {
            self.n_points
        } else {
            self.n_points * self.r as u64
        }
    }

    fn check(&self) -> Result<()> {
        if self.r < 2 {
            return Err(Error::InvalidArgument(format!("need at least 2 colors, got {}", self.r)));
        }
        if self.k < 3 {
            return Err(Error::ProgressionTooShort(self.k, 3));
        }
        if self.n_points < self.k {
            return Err(Error::InvalidArgument(format!(
                "need at least k = {} points, got {}",
                self.k, self.n_points
            )));
        }
        Ok(())
    }
}

fn var(r: u8, point: u64, color: u8) -> i64 {
    ((point - 1) * r as u64 + color as u64) as i64
}

pub fn cnf_export(r: u8, k: u64, n_points: u64) -> Result<Cnf> {
    let meta = InstanceMeta { r, k, n_points };
    meta.check()?;
    let aps = count_aps(n_points, k)? as usize;
    let ru = r as u64;
    let mut clauses = Vec::with_capacity(if r == 2 {
        2 * aps
    } else {
        n_points as usize * (1 + (ru * (ru - 1) / 2) as usize) + aps * r as usize
    });
    if r > 2 {
        for i in 1..=n_points {
            clauses.push((1..=r).map(|c| var(r, i, c)).collect());
        }
        for i in 1..=n_points {
            for c in 1..=r {
                for c2 in c + 1..=r {
                    clauses.push(vec![-var(r, i, c), -var(r, i, c2)]);
                }
            }
        }
    }
    for d in 1..=(n_points - 1) / (k - 1) {
        for a in 1..=n_points - (k - 1) * d {
            let terms = (0..k).map(|j| a + j * d);
            if r == 2 {
                clauses.push(terms.clone().map(|p| p as i64).collect());
                clauses.push(terms.map(|p| -(p as i64)).collect());
            } else {
                for c in 1..=r {
                    clauses.push(terms.clone().map(|p| -var(r, p, c)).collect());
                }
            }
        }
    }
    Ok(Cnf {
        num_vars: meta.num_vars(),
        clauses,
        comments: vec![format!("van der Waerden r={r} k={k} n={n_points}")],
    })
}

/// The variable assignment a coloring corresponds to under `cnf_export`.
pub fn encode_coloring(coloring: &Coloring) -> Vec<bool> {
    let r = coloring.num_colors();
    if r == 2 {
        coloring.colors().iter().map(|&c| c == 2).collect()
    } else {
        coloring
            .colors()
            .iter()
            .flat_map(|&c| (1..=r).map(move |x| x == c))
            .collect()
    }
}

/// Decodes a full assignment; for `r >= 3` every point must have exactly
/// one true color variable.
pub fn decode_assignment(meta: InstanceMeta, assignment: &[bool]) -> Result<Coloring> {
    if assignment.len() as u64 != meta.num_vars() {
        return Err(Error::InvalidModel(format!(
            "expected {} variables, got {}",
            meta.num_vars(),
            assignment.len()
        )));
    }
    let colors = if meta.r == 2 {
        assignment.iter().map(|&b| if b { 2 } else { 1 }).collect()
    } else {
        let r = meta.r as usize;
        assignment
            .chunks(r)
            .enumerate()
            .map(|(i, chunk)| {
                let mut on = chunk.iter().enumerate().filter(|(_, &b)| b).map(|(c, _)| c as u8 + 1);
                match (on.next(), on.next()) {
                    (Some(c), None) => Ok(c),
                    (None, _) => Err(Error::InvalidModel(format!("point {} has no color", i + 1))),
                    (Some(_), Some(_)) => Err(Error::InvalidModel(format!(
                        "point {} has more than one color",
                        i + 1
                    ))),
                }
            })
            .collect::<Result<Vec<_>>>()?
    };
    Coloring::new(colors, meta.r)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatResult {
    Satisfiable(Coloring),
    Unsatisfiable(UnsatAttestation),
}

/// Solver id used when the output carries no comment line.
pub const UNSPECIFIED_SOLVER: &str = "unspecified";

/// Reads SAT-competition output (`s` status line, `v` value lines, `c`
/// comments) for an instance produced by [`cnf_export`].
///
/// Models are decoded and re-verified; one containing a monochromatic
/// progression is rejected. An UNSAT answer becomes an attestation whose
/// solver id is the first comment line, if any.
pub fn ingest_sat_result(meta: InstanceMeta, solver_output: &str) -> Result<SatResult> {
    meta.check()?;
    let malformed = |msg: String| Error::MalformedSolverOutput(msg);
    let num_vars = meta.num_vars();
    let mut status: Option<bool> = None;
    let mut solver_id: Option<String> = None;
    let mut values: Vec<Option<bool>> = vec![None; num_vars as usize];
    let mut saw_values = false;
    let mut terminated = false;

    for (i, raw) in solver_output.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let (tag, rest) = line.split_at(1);
        if !rest.is_empty() && !rest.starts_with(char::is_whitespace) {
            return Err(malformed(format!("line {line_no}: unrecognized line {line:?}")));
        }
        let rest = rest.trim();
        match tag {
            "c" => {
                if solver_id.is_none() && !rest.is_empty() {
                    solver_id = Some(rest.to_string());
                }
            }
            "s" => {
                if status.is_some() {
                    return Err(malformed(format!("line {line_no}: second status line")));
                }
                status = Some(match rest {
                    "SATISFIABLE" => true,
                    "UNSATISFIABLE" => false,
                    other => {
                        return Err(malformed(format!("line {line_no}: status {other:?} is not a verdict")))
                    }
                });
            }
            "v" => {
                if terminated {
                    return Err(malformed(format!("line {line_no}: values after the terminating 0")));
                }
                saw_values = true;
                for token in rest.split_whitespace() {
                    let lit: i64 = token
                        .parse()
                        .map_err(|_| malformed(format!("line {line_no}: bad literal {token:?}")))?;
                    if lit == 0 {
                        terminated = true;
                        continue;
                    }
                    if terminated {
                        return Err(malformed(format!("line {line_no}: values after the terminating 0")));
                    }
                    let v = lit.unsigned_abs();
                    if v > num_vars {
                        return Err(malformed(format!(
                            "line {line_no}: literal {lit} exceeds {num_vars} variables"
                        )));
                    }
                    let slot = &mut values[(v - 1) as usize];
                    match *slot {
                        Some(prev) if prev != (lit > 0) => {
                            return Err(malformed(format!("line {line_no}: variable {v} assigned both ways")))
                        }
                        _ => *slot = Some(lit > 0),
                    }
                }
            }
            _ => return Err(malformed(format!("line {line_no}: unrecognized line {line:?}"))),
        }
    }

    match status {
        None => Err(malformed("no status line".into())),
        Some(false) => {
            if saw_values {
                return Err(malformed("value lines in an UNSATISFIABLE answer".into()));
            }
            Ok(SatResult::Unsatisfiable(UnsatAttestation {
                r: meta.r,
                k: meta.k,
                n_points: meta.n_points,
                solver_id: solver_id.unwrap_or_else(|| UNSPECIFIED_SOLVER.to_string()),
            }))
        }
        Some(true) => {
            if !terminated {
                return Err(malformed("value lines are not terminated by 0 (truncated model?)".into()));
            }
            let assignment = values
                .iter()
                .enumerate()
                .map(|(i, v)| v.ok_or_else(|| malformed(format!("variable {} is unassigned", i + 1))))
                .collect::<Result<Vec<_>>>()?;
            let coloring = decode_assignment(meta, &assignment)?;
            match verify(&coloring, meta.k)? {
                Some(ap) => Err(Error::ModelRejected(ap)),
                None => Ok(SatResult::Satisfiable(coloring)),
            }
        }
    }
}

/// SAT-competition style output for a coloring, as a solver would print it.
pub fn render_model(coloring: &Coloring) -> String {
    let mut out = String::from("s SATISFIABLE\n");
    let lits: Vec<String> = encode_coloring(coloring)
        .iter()
        .enumerate()
        .map(|(i, &b)| if b { format!("{}", i + 1) } else { format!("-{}", i + 1) })
        .collect();
    for chunk in lits.chunks(20) {
        let _ = writeln!(out, "v {}", chunk.join(" "));
    }
    out.push_str("v 0\n");
    out
}
