//! Finite value-constraint systems over predetermined outcome assignments,
//! with exhaustive satisfiability checking and parity-obstruction detection.

use std::collections::BTreeSet;

use crate::constructions::ContradictionCertificate;
use crate::error::{Error, Result};
use crate::scenario::{cartesian, pm_value};

/// Cap on the exhaustive search space.
pub const ASSIGNMENT_CAP: u64 = 1 << 24;

#[derive(Clone, Debug, PartialEq)]
pub struct VcsVariable {
    pub name: String,
    pub alphabet: Vec<String>,
}

/// A constraint as an allowed-tuple relation over a subset of variables.
#[derive(Clone, Debug, PartialEq)]
pub struct VcsConstraint {
    pub description: String,
    pub vars: Vec<usize>,
    pub allowed: BTreeSet<Vec<usize>>,
}

/// Functional constraints on predetermined finite-alphabet outcome assignments.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValueConstraintSystem {
    pub variables: Vec<VcsVariable>,
    pub constraints: Vec<VcsConstraint>,
}

#[derive(Clone, Debug)]
pub enum AssignmentResult {
    /// A satisfying assignment, re-verified against every constraint.
    Satisfiable(Vec<usize>),
    Unsat(ContradictionCertificate),
}

impl ValueConstraintSystem {
    pub fn add_variable(&mut self, name: impl Into<String>, alphabet: Vec<String>) -> usize {
        self.variables.push(VcsVariable { name: name.into(), alphabet });
        self.variables.len() - 1
    }

    /// A ±1 variable.
    pub fn add_pm_variable(&mut self, name: impl Into<String>) -> usize {
        self.add_variable(name, vec!["+1".into(), "-1".into()])
    }

    pub fn add_constraint(&mut self, description: impl Into<String>, vars: Vec<usize>, allowed: BTreeSet<Vec<usize>>) -> Result<()> {
        for &v in &vars {
            if v >= self.variables.len() {
                return Err(Error::Index(format!("constraint references unknown variable {v}")));
            }
        }
        for tuple in &allowed {
            if tuple.len() != vars.len() {
                return Err(Error::Validation("allowed tuple arity mismatch".into()));
            }
        }
        self.constraints.push(VcsConstraint { description: description.into(), vars, allowed });
        Ok(())
    }

    /// Product of the named ±1 variables fixed to `sign`.
    pub fn add_parity_constraint(&mut self, vars: Vec<usize>, sign: i8) -> Result<()> {
        let names: Vec<String> = vars.iter().map(|&v| self.variables[v].name.clone()).collect();
        let description = format!("{} = {}", names.join("·"), if sign > 0 { "+1" } else { "-1" });
        let mut allowed = BTreeSet::new();
        let dims: Vec<usize> = vars
            .iter()
            .map(|&v| {
                self.pm_alphabet(v)
                    .map(|_| 2usize)
                    .ok_or_else(|| Error::Validation(format!(
                        "parity constraint over non-±1 variable {}",
                        self.variables[v].name
                    )))
            })
            .collect::<Result<_>>()?;
        for tuple in cartesian(&dims) {
            let product: i32 = vars
                .iter()
                .zip(&tuple)
                .map(|(&v, &o)| self.pm_alphabet(v).unwrap()[o] as i32)
                .product();
            if product == sign as i32 {
                allowed.insert(tuple);
            }
        }
        self.add_constraint(description, vars, allowed)
    }

    /// Bijection link between two variables: b = f(a), as outcome indices.
    pub fn add_link_constraint(&mut self, a: usize, b: usize, f: &[usize]) -> Result<()> {
        if f.len() != self.variables[a].alphabet.len() {
            return Err(Error::Validation("link map arity mismatch".into()));
        }
        let description = format!("{} = f({})", self.variables[b].name, self.variables[a].name);
        let allowed: BTreeSet<Vec<usize>> = f.iter().enumerate().map(|(i, &fi)| vec![i, fi]).collect();
        self.add_constraint(description, vec![a, b], allowed)
    }

    fn pm_alphabet(&self, var: usize) -> Option<Vec<i8>> {
        let alph = &self.variables[var].alphabet;
        let vals: Vec<i8> = alph.iter().filter_map(|o| pm_value(o)).collect();
        if vals.len() == 2 && vals[0] != vals[1] {
            Some(vals)
        } else {
            None
        }
    }

    pub fn satisfies(&self, assignment: &[usize]) -> bool {
        self.constraints.iter().all(|c| {
            let tuple: Vec<usize> = c.vars.iter().map(|&v| assignment[v]).collect();
            c.allowed.contains(&tuple)
        })
    }

    pub fn total_assignments(&self) -> u64 {
        self.variables
            .iter()
            .fold(1u64, |acc, v| acc.saturating_mul(v.alphabet.len() as u64))
    }

    /// Detect a parity obstruction: a subset of parity-representable
    /// constraints whose GF(2) combination is contradictory.
    pub fn find_parity_obstruction(&self) -> Option<Vec<usize>> {
        if self.variables.len() > 64 {
            return None;
        }
        // Collect parity-shaped constraints as (var bitmask, parity bit).
        let mut rows: Vec<(u64, bool, BTreeSet<usize>)> = Vec::new();
        'outer: for (idx, c) in self.constraints.iter().enumerate() {
            let mut mask = 0u64;
            for &v in &c.vars {
                if self.pm_alphabet(v).is_none() {
                    continue 'outer;
                }
                mask ^= 1 << v;
            }
            // The constraint is parity-shaped iff its allowed set equals the
            // set of tuples with a fixed product sign.
            let dims: Vec<usize> = vec![2; c.vars.len()];
            for sign in [1i32, -1] {
                let expected: BTreeSet<Vec<usize>> = cartesian(&dims)
                    .into_iter()
                    .filter(|tuple| {
                        let product: i32 = c
                            .vars
                            .iter()
                            .zip(tuple)
                            .map(|(&v, &o)| self.pm_alphabet(v).unwrap()[o] as i32)
                            .product();
                        product == sign
                    })
                    .collect();
                if c.allowed == expected {
                    // Bit convention: outcome "−1" is bit 1. Product = −1 means
                    // odd number of −1s.
                    let parity = sign < 0;
                    rows.push((mask, parity, BTreeSet::from([idx])));
                    continue 'outer;
                }
            }
        }
        // GF(2) elimination.
        let mut reduced: Vec<(u64, bool, BTreeSet<usize>)> = Vec::new();
        for (mut mask, mut parity, mut members) in rows {
            for (rm, rp, rmembers) in &reduced {
                let pivot = rm & rm.wrapping_neg();
                if mask & pivot != 0 {
                    mask ^= rm;
                    parity ^= rp;
                    members = members.symmetric_difference(rmembers).cloned().collect();
                }
            }
            if mask == 0 {
                if parity {
                    return Some(members.into_iter().collect());
                }
            } else {
                reduced.push((mask, parity, members));
            }
        }
        None
    }
}

/// Exhaustive satisfiability check. The satisfying assignment is re-verified;
/// the UNSAT certificate records the exhausted assignment count and any parity
/// obstruction detected.
pub fn check_value_assignment(sys: &ValueConstraintSystem) -> Result<AssignmentResult> {
    let total = sys.total_assignments();
    if total > ASSIGNMENT_CAP {
        return Err(Error::Resource(format!(
            "{total} assignments exceed the cap {ASSIGNMENT_CAP}"
        )));
    }
    let dims: Vec<usize> = sys.variables.iter().map(|v| v.alphabet.len()).collect();
    let mut checked = 0u64;
    for assignment in cartesian(&dims) {
        checked += 1;
        if sys.satisfies(&assignment) {
            assert!(sys.satisfies(&assignment));
            return Ok(AssignmentResult::Satisfiable(assignment));
        }
    }
    Ok(AssignmentResult::Unsat(ContradictionCertificate {
        constraints: sys.constraints.iter().map(|c| c.description.clone()).collect(),
        assignments_checked: checked,
        parity_obstruction: sys.find_parity_obstruction(),
    }))
}
