use std::collections::BTreeSet;
use std::fmt;

use super::ReductionError;

/// A 3-CNF formula over variables `1..=num_vars`. Literals are signed,
/// 1-based variable indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<[i32; 3]>,
}

pub const SAT_BRUTEFORCE_CAP: usize = 20;

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<[i32; 3]>) -> Result<Self, ReductionError> {
        for (j, clause) in clauses.iter().enumerate() {
            for &lit in clause {
                if lit == 0 || lit.unsigned_abs() as usize > num_vars {
                    return Err(ReductionError::BadLiteral {
                        clause: j + 1,
                        literal: lit,
                    });
                }
            }
        }
        Ok(CnfFormula { num_vars, clauses })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[[i32; 3]] {
        &self.clauses
    }

    /// 1-based indices of the clauses that contain `literal`.
    pub fn occurrences(&self, literal: i32) -> BTreeSet<usize> {
        self.clauses
            .iter()
            .enumerate()
            .filter(|(_, c)| c.contains(&literal))
            .map(|(j, _)| j + 1)
            .collect()
    }

    /// `assignment[i]` is the value of variable `i + 1`.
    pub fn evaluate(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| {
            c.iter().any(|&lit| {
                let v = assignment[lit.unsigned_abs() as usize - 1];
                if lit > 0 {
                    v
                } else {
                    !v
                }
            })
        })
    }

    /// Parses DIMACS CNF with exactly three literals per clause.
    pub fn parse_dimacs(text: &str) -> Result<Self, ReductionError> {
        let mut header: Option<(usize, usize)> = None;
        let mut clauses = Vec::new();
        let mut pending: Vec<i32> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line_no = lineno + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            let syntax = |message: String| ReductionError::Syntax {
                line: line_no,
                message,
            };
            if line.starts_with('p') {
                let fields: Vec<&str> = line.split_whitespace().collect();
                match fields.as_slice() {
                    ["p", "cnf", vars, count] if header.is_none() => {
                        let vars = vars
                            .parse()
                            .map_err(|_| syntax("bad variable count".into()))?;
                        let count = count
                            .parse()
                            .map_err(|_| syntax("bad clause count".into()))?;
                        header = Some((vars, count));
                    }
                    _ => {
                        return Err(syntax(
                            "expected a single `p cnf <vars> <clauses>` header".into(),
                        ))
                    }
                }
                continue;
            }
            if header.is_none() {
                return Err(syntax("clause before `p cnf` header".into()));
            }
            for tok in line.split_whitespace() {
                let lit: i32 = tok
                    .parse()
                    .map_err(|_| syntax(format!("bad literal `{tok}`")))?;
                if lit == 0 {
                    let clause: [i32; 3] = pending.as_slice().try_into().map_err(|_| {
                        syntax(format!("clause has {} literals, expected 3", pending.len()))
                    })?;
                    clauses.push(clause);
                    pending.clear();
                } else {
                    pending.push(lit);
                }
            }
        }
        let Some((num_vars, count)) = header else {
            return Err(ReductionError::Syntax {
                line: 0,
                message: "missing `p cnf` header".into(),
            });
        };
        if !pending.is_empty() {
            return Err(ReductionError::Syntax {
                line: text.lines().count(),
                message: "last clause is not terminated by 0".into(),
            });
        }
        if clauses.len() != count {
            return Err(ReductionError::Syntax {
                line: 0,
                message: format!("header announces {count} clauses, found {}", clauses.len()),
            });
        }
        CnfFormula::new(num_vars, clauses)
    }
}

impl fmt::Display for CnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "p cnf {} {}", self.num_vars, self.clauses.len())?;
        for [a, b, c] in &self.clauses {
            writeln!(f, "{a} {b} {c} 0")?;
        }
        Ok(())
    }
}

/// Tries all `2^k` assignments.
pub fn sat_bruteforce(f: &CnfFormula) -> Result<bool, ReductionError> {
    let k = f.num_vars();
    if k > SAT_BRUTEFORCE_CAP {
        return Err(ReductionError::TooLarge {
            size: k,
            cap: SAT_BRUTEFORCE_CAP,
        });
    }
    let mut assignment = vec![false; k];
    for mask in 0u32..(1u32 << k) {
        for (i, slot) in assignment.iter_mut().enumerate() {
            *slot = mask & (1 << i) != 0;
        }
        if f.evaluate(&assignment) {
            return Ok(true);
        }
    }
    Ok(false)
}
