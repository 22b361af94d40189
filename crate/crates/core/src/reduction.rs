//! Instance factories from 1-in-k satisfiability of positive clauses.
//!
//! Two constructions map a clause set `S` over variables `Σ` to a group
//! constraint that is satisfiable iff some interpretation `I ⊆ Σ` meets
//! every clause in exactly one variable:
//!
//! * [`reduce_1in_k`] acts on the disjoint union of the function spaces
//!   `F_p^C`, one block per clause, and yields a k-constraint.
//! * [`reduce_2cstr`] acts on `Σ × F_p ⊎ S × F_p` and yields a
//!   2-constraint, for clauses of size exactly p.
//!
//! Point layout. A function `w: C -> F_p` with clause variables
//! `α_0 < .. < α_{k-1}` (in `Σ` order) has rank `Σ w(α_i) p^(k-1-i)`; clause
//! `j` occupies points `j p^k .. (j+1) p^k`. In the second construction
//! `(α_i, x)` is point `i p + x` and `(C_j, y)` is point `|Σ| p + j p + y`.

use std::collections::HashMap;

use thiserror::Error;

use crate::constraint::{AtomicConstraint, ConstraintError, GcInstance};
use crate::perm::{is_elementary_abelian, is_prime, Permutation};

/// Largest alphabet [`one_in_k_brute`] accepts.
pub const MAX_BRUTE_VARS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("variable {0:?} repeated")]
    DuplicateVariable(String),
    #[error("clause {index} has {got} variables, expected {expected}")]
    ClauseSize {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("alphabet of {0} variables is too large for exhaustive search")]
    AlphabetTooLarge(usize),
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error(transparent)]
    Constraint(#[from] ConstraintError),
}

/// Positive clauses of a common size `k` over an ordered alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseSet {
    vars: Vec<String>,
    clauses: Vec<Vec<usize>>,
}

impl ClauseSet {
    /// Clauses are given by variable names; each is stored sorted in
    /// alphabet order. Duplicate clauses are kept.
    pub fn new<S: AsRef<str>>(
        vars: Vec<String>,
        clauses: &[Vec<S>],
    ) -> Result<Self, ReductionError> {
        let mut index = HashMap::new();
        for (i, v) in vars.iter().enumerate() {
            if index.insert(v.clone(), i).is_some() {
                return Err(ReductionError::DuplicateVariable(v.clone()));
            }
        }
        let mut out = Vec::with_capacity(clauses.len());
        for clause in clauses {
            let mut c = Vec::with_capacity(clause.len());
            for name in clause {
                let name = name.as_ref();
                let &i = index
                    .get(name)
                    .ok_or_else(|| ReductionError::UnknownVariable(name.to_string()))?;
                if c.contains(&i) {
                    return Err(ReductionError::DuplicateVariable(name.to_string()));
                }
                c.push(i);
            }
            c.sort_unstable();
            out.push(c);
        }
        ClauseSet::from_indices(vars, out)
    }

    /// Clauses given as variable indices.
    pub fn from_indices(
        vars: Vec<String>,
        mut clauses: Vec<Vec<usize>>,
    ) -> Result<Self, ReductionError> {
        let k = clauses.first().map_or(0, Vec::len);
        for (index, c) in clauses.iter_mut().enumerate() {
            c.sort_unstable();
            if let Some(&bad) = c.iter().find(|&&v| v >= vars.len()) {
                return Err(ReductionError::UnknownVariable(format!("#{bad}")));
            }
            if c.windows(2).any(|w| w[0] == w[1]) {
                return Err(ReductionError::DuplicateVariable(format!(
                    "in clause {}",
                    index + 1
                )));
            }
            if c.len() != k {
                return Err(ReductionError::ClauseSize {
                    index: index + 1,
                    expected: k,
                    got: c.len(),
                });
            }
        }
        Ok(ClauseSet { vars, clauses })
    }

    /// Parses the clause file format: `vars <name>...` then one clause per
    /// line. Blank lines and lines starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self, ReductionError> {
        let mut vars: Option<Vec<String>> = None;
        let mut clauses: Vec<Vec<&str>> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut tokens = line.split_whitespace();
            if vars.is_none() {
                if tokens.next() != Some("vars") {
                    return Err(ReductionError::Parse {
                        line: i + 1,
                        msg: "expected 'vars' header".into(),
                    });
                }
                vars = Some(tokens.map(str::to_string).collect());
            } else {
                clauses.push(tokens.collect());
            }
        }
        let vars = vars.ok_or(ReductionError::Parse {
            line: 0,
            msg: "missing 'vars' header".into(),
        })?;
        ClauseSet::new(vars, &clauses)
    }

    pub fn render(&self) -> String {
        let mut s = format!("vars {}\n", self.vars.join(" "));
        for c in &self.clauses {
            let names: Vec<&str> = c.iter().map(|&i| self.vars[i].as_str()).collect();
            s.push_str(&names.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn clauses(&self) -> &[Vec<usize>] {
        &self.clauses
    }

    /// Common clause size (0 when there are no clauses).
    pub fn k(&self) -> usize {
        self.clauses.first().map_or(0, Vec::len)
    }

    /// Whether `interp` (variable indices) meets every clause exactly once.
    pub fn one_satisfied_by(&self, interp: &[usize]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().filter(|v| interp.contains(v)).count() == 1)
    }
}

/// Exhaustive search for an interpretation meeting every clause in exactly
/// one variable. Interpretations are tried as bitmasks in increasing order.
pub fn one_in_k_brute(s: &ClauseSet) -> Result<Option<Vec<usize>>, ReductionError> {
    let nv = s.vars.len();
    if nv > MAX_BRUTE_VARS {
        return Err(ReductionError::AlphabetTooLarge(nv));
    }
    let masks: Vec<u32> = s
        .clauses
        .iter()
        .map(|c| c.iter().fold(0u32, |m, &v| m | 1 << v))
        .collect();
    Ok((0u32..1 << nv)
        .find(|&i| masks.iter().all(|&m| (m & i).count_ones() == 1))
        .map(|i| (0..nv).filter(|&v| i >> v & 1 == 1).collect()))
}

fn check_prime(p: u32) -> Result<(), ReductionError> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(ReductionError::NotPrime(p))
    }
}

/// Shift of the rank of `w ∈ F_p^C` by `u|_C`, digit by digit.
fn shift_rank(rank: usize, clause: &[usize], u: &[u32], p: usize) -> usize {
    let k = clause.len();
    let mut rest = rank;
    let mut out = 0;
    let mut weight = 1;
    for i in (0..k).rev() {
        let digit = (rest % p + u[clause[i]] as usize) % p;
        rest /= p;
        out += digit * weight;
        weight *= p;
    }
    out
}

/// The morphism `f(u)` of the first construction: `w -> w + u|_C`.
pub fn morphism_1in_k(s: &ClauseSet, p: u32, u: &[u32]) -> Permutation {
    let block = (p as usize).pow(s.k() as u32);
    let mut images = Vec::with_capacity(block * s.clauses.len());
    for (j, clause) in s.clauses.iter().enumerate() {
        for r in 0..block {
            images.push(j * block + shift_rank(r, clause, u, p as usize));
        }
    }
    Permutation::from_images(images).expect("translation of each clause block")
}

/// Point index of the function `w` (values in clause order) in clause `j`.
pub fn point_1in_k(s: &ClauseSet, p: u32, j: usize, w: &[u32]) -> usize {
    let block = (p as usize).pow(s.k() as u32);
    j * block
        + w.iter()
            .fold(0usize, |acc, &x| acc * p as usize + x as usize)
}

fn indicator(len: usize, alpha: usize) -> Vec<u32> {
    let mut u = vec![0; len];
    u[alpha] = 1;
    u
}

/// First construction: generators `f(δ_α)` for `α ∈ Σ`, constraint
/// `C_S(w) = { w + δ_α|_C : α ∈ C }`.
pub fn reduce_1in_k(s: &ClauseSet, p: u32) -> Result<GcInstance, ReductionError> {
    check_prime(p)?;
    let nv = s.vars.len();
    let gens: Vec<Permutation> = (0..nv)
        .map(|a| morphism_1in_k(s, p, &indicator(nv, a)))
        .collect();
    debug_assert!(is_elementary_abelian(&gens, p).unwrap_or(false));
    let k = s.k();
    let block = (p as usize).pow(k as u32);
    let n = block * s.clauses.len();
    let pw = p as usize;
    let mut atoms = Vec::with_capacity(n);
    for j in 0..s.clauses.len() {
        for r in 0..block {
            let set = (0..k).map(|i| {
                // Add 1 to digit i (most significant first).
                let weight = pw.pow((k - 1 - i) as u32);
                let digit = r / weight % pw;
                let bumped = r - digit * weight + ((digit + 1) % pw) * weight;
                j * block + bumped
            });
            atoms.push(AtomicConstraint::new(j * block + r, set));
        }
    }
    Ok(GcInstance::normalize(p, n, gens, &atoms)?)
}

/// Reads `u|_C` off a witness of the first construction and returns
/// `{α : u(α) = 1}`. Variables in no clause are left out.
pub fn decode_1in_k(s: &ClauseSet, p: u32, g: &Permutation) -> Vec<usize> {
    let block = (p as usize).pow(s.k() as u32);
    let mut u = vec![0u32; s.vars.len()];
    for (j, clause) in s.clauses.iter().enumerate() {
        let mut r = g.apply(j * block) - j * block;
        for &v in clause.iter().rev() {
            u[v] = (r % p as usize) as u32;
            r /= p as usize;
        }
    }
    (0..u.len()).filter(|&v| u[v] == 1).collect()
}

/// Point index of `(α_i, x)` in the second construction.
pub fn var_point_2cstr(p: u32, alpha: usize, x: u32) -> usize {
    alpha * p as usize + x as usize
}

/// Point index of `(C_j, y)` in the second construction.
pub fn clause_point_2cstr(s: &ClauseSet, p: u32, j: usize, y: u32) -> usize {
    (s.vars.len() + j) * p as usize + y as usize
}

/// The morphism `f'(u)`: `(α, x) -> (α, x + u(α))`,
/// `(C, y) -> (C, y + Σ_{β∈C} u(β))`.
pub fn morphism_2cstr(s: &ClauseSet, p: u32, u: &[u32]) -> Permutation {
    let pw = p as usize;
    let mut images = Vec::with_capacity(pw * (s.vars.len() + s.clauses.len()));
    for (alpha, &ua) in u.iter().enumerate().take(s.vars.len()) {
        for x in 0..pw {
            images.push(alpha * pw + (x + ua as usize) % pw);
        }
    }
    for (j, clause) in s.clauses.iter().enumerate() {
        let shift: usize = clause.iter().map(|&b| u[b] as usize).sum();
        for y in 0..pw {
            images.push((s.vars.len() + j) * pw + (y + shift) % pw);
        }
    }
    Permutation::from_images(images).expect("translation of each block")
}

/// Second construction without the clause-size check. Equivalence with
/// 1-in-k satisfiability needs every clause to have at most p variables.
pub fn construct_2cstr(s: &ClauseSet, p: u32) -> Result<GcInstance, ReductionError> {
    check_prime(p)?;
    let nv = s.vars.len();
    let pw = p as usize;
    let gens: Vec<Permutation> = (0..nv)
        .map(|a| morphism_2cstr(s, p, &indicator(nv, a)))
        .collect();
    debug_assert!(is_elementary_abelian(&gens, p).unwrap_or(false));
    let n = pw * (nv + s.clauses.len());
    let mut atoms = Vec::with_capacity(n);
    for alpha in 0..nv {
        for x in 0..pw {
            let here = alpha * pw + x;
            atoms.push(AtomicConstraint::new(
                here,
                [here, alpha * pw + (x + 1) % pw],
            ));
        }
    }
    for j in 0..s.clauses.len() {
        for y in 0..pw {
            let base = (nv + j) * pw;
            atoms.push(AtomicConstraint::new(base + y, [base + (y + 1) % pw]));
        }
    }
    Ok(GcInstance::normalize(p, n, gens, &atoms)?)
}

/// Second construction, for positive p-clauses.
pub fn reduce_2cstr(s: &ClauseSet, p: u32) -> Result<GcInstance, ReductionError> {
    if let Some(index) = s.clauses.iter().position(|c| c.len() != p as usize) {
        return Err(ReductionError::ClauseSize {
            index: index + 1,
            expected: p as usize,
            got: s.clauses[index].len(),
        });
    }
    construct_2cstr(s, p)
}

/// `{α : u(α) = 1}` for a witness `f'(u)` of the second construction.
pub fn decode_2cstr(s: &ClauseSet, p: u32, g: &Permutation) -> Vec<usize> {
    (0..s.vars.len())
        .filter(|&a| g.apply(var_point_2cstr(p, a, 0)) == var_point_2cstr(p, a, 1))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::{Solver, DEFAULT_CAP};

    fn greek() -> ClauseSet {
        ClauseSet::new(
            vec!["alpha".into(), "beta".into(), "gamma".into()],
            &[vec!["alpha", "beta", "gamma"]],
        )
        .unwrap()
    }

    #[test]
    fn brute_examples() {
        let empty = ClauseSet::new::<&str>(vec!["a".into()], &[]).unwrap();
        assert_eq!(one_in_k_brute(&empty).unwrap(), Some(vec![]));
        assert_eq!(one_in_k_brute(&greek()).unwrap(), Some(vec![0]));
        // {a,b}, {b,c}, {a,c}: any single variable meets one clause twice or misses one.
        let tri = ClauseSet::new(
            vec!["a".into(), "b".into(), "c".into()],
            &[vec!["a", "b"], vec!["b", "c"], vec!["a", "c"]],
        )
        .unwrap();
        assert_eq!(one_in_k_brute(&tri).unwrap(), None);
        let big = ClauseSet::new::<&str>((0..21).map(|i| format!("v{i}")).collect(), &[]).unwrap();
        assert_eq!(
            one_in_k_brute(&big),
            Err(ReductionError::AlphabetTooLarge(21))
        );
    }

    #[test]
    fn first_construction_worked_example() {
        let s = greek();
        let inst = reduce_1in_k(&s, 2).unwrap();
        assert_eq!(inst.degree(), 8);
        assert_eq!(inst.gens().len(), 3);
        // g_3 is the function (α, β, γ) = (0, 1, 1).
        let f_g3 = morphism_1in_k(&s, 2, &[0, 1, 1]);
        let expected = Permutation::from_cycles(8, &[&[1, 4], &[2, 3], &[5, 8], &[6, 7]]).unwrap();
        assert_eq!(f_g3, expected);
        assert_eq!(inst.allowed(3), &[1, 2, 7]);
        assert_eq!(inst.k(), 3);
        assert!(is_elementary_abelian(inst.gens(), 2).unwrap());
    }

    #[test]
    fn first_construction_empty() {
        let s = ClauseSet::new::<&str>(vec!["a".into()], &[]).unwrap();
        let inst = reduce_1in_k(&s, 3).unwrap();
        assert_eq!(inst.degree(), 0);
        assert!(Solver::new(inst)
            .unwrap()
            .solve_enumerate(DEFAULT_CAP)
            .unwrap()
            .is_sat());
    }

    #[test]
    fn second_construction_worked_example() {
        let s = greek();
        let inst = construct_2cstr(&s, 2).unwrap();
        assert_eq!(inst.degree(), 8);
        let c0 = clause_point_2cstr(&s, 2, 0, 0);
        let c1 = clause_point_2cstr(&s, 2, 0, 1);
        let b0 = var_point_2cstr(2, 1, 0);
        let b1 = var_point_2cstr(2, 1, 1);
        let expected =
            Permutation::from_cycles(8, &[&[b0 + 1, b1 + 1], &[c0 + 1, c1 + 1]]).unwrap();
        assert_eq!(morphism_2cstr(&s, 2, &[0, 1, 0]), expected);
        assert_eq!(morphism_2cstr(&s, 2, &[0, 1, 1]).apply(c0), c0);
        assert_eq!(inst.allowed(c0), &[c1]);
        assert_eq!(inst.allowed(var_point_2cstr(2, 0, 1)), &[0, 1]);
        assert!(inst.k() <= 2);
        assert!(matches!(
            reduce_2cstr(&s, 2),
            Err(ReductionError::ClauseSize { .. })
        ));
        assert!(reduce_2cstr(&s, 3).is_ok());
    }

    #[test]
    fn morphism_property() {
        let s = ClauseSet::new(
            vec!["a".into(), "b".into(), "c".into(), "d".into()],
            &[
                vec!["a", "b", "c"],
                vec!["b", "c", "d"],
                vec!["a", "c", "d"],
            ],
        )
        .unwrap();
        for p in [2u32, 3] {
            let all: Vec<Vec<u32>> = (0..p.pow(4))
                .map(|m| (0..4).map(|i| m / p.pow(i) % p).collect())
                .collect();
            for u in all.iter().step_by(3) {
                for v in all.iter().step_by(5) {
                    let sum: Vec<u32> = u.iter().zip(v).map(|(a, b)| (a + b) % p).collect();
                    assert_eq!(
                        morphism_1in_k(&s, p, u)
                            .compose(&morphism_1in_k(&s, p, v))
                            .unwrap(),
                        morphism_1in_k(&s, p, &sum)
                    );
                    assert_eq!(
                        morphism_2cstr(&s, p, u)
                            .compose(&morphism_2cstr(&s, p, v))
                            .unwrap(),
                        morphism_2cstr(&s, p, &sum)
                    );
                }
            }
        }
    }

    #[test]
    fn witnesses_decode_to_interpretations() {
        let s = ClauseSet::new(
            vec!["a".into(), "b".into(), "c".into(), "d".into(), "e".into()],
            &[vec!["a", "b", "c"], vec!["c", "d", "e"]],
        )
        .unwrap();
        for p in [2u32, 3] {
            let solver = Solver::new(reduce_1in_k(&s, p).unwrap()).unwrap();
            let g = solver
                .solve_enumerate(DEFAULT_CAP)
                .unwrap()
                .witness()
                .unwrap()
                .clone();
            assert!(s.one_satisfied_by(&decode_1in_k(&s, p, &g)));
        }
        let solver = Solver::new(reduce_2cstr(&s, 3).unwrap()).unwrap();
        let g = solver
            .solve_enumerate(DEFAULT_CAP)
            .unwrap()
            .witness()
            .unwrap()
            .clone();
        assert!(s.one_satisfied_by(&decode_2cstr(&s, 3, &g)));
    }

    #[test]
    fn clause_file_round_trip() {
        let text = "vars a b c d\n# comment\na b c\n\nb c d\n";
        let s = ClauseSet::parse(text).unwrap();
        assert_eq!(s.clauses(), &[vec![0, 1, 2], vec![1, 2, 3]]);
        assert_eq!(ClauseSet::parse(&s.render()).unwrap(), s);
        assert!(matches!(
            ClauseSet::parse("a b\n"),
            Err(ReductionError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            ClauseSet::parse("vars a b\na c\n"),
            Err(ReductionError::UnknownVariable(_))
        ));
        assert!(matches!(
            ClauseSet::parse("vars a b c\na b\na b c\n"),
            Err(ReductionError::ClauseSize { .. })
        ));
        assert!(matches!(
            ClauseSet::parse("vars a b\na a\n"),
            Err(ReductionError::DuplicateVariable(_))
        ));
    }
}
