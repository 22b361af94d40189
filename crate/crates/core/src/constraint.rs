//! Group constraints: find `g ∈ <g_1..g_m>` with `a^g ∈ C(a)` for every
//! point `a`.
//!
//! The linear pipeline computes, for every orbit `O`, the set `V_O` of
//! vectors of `G|_O` compatible with the constraint on all of `O`. When each
//! `V_O` is an affine subspace the whole problem is a linear system over
//! F_p in the coordinates of the frame; otherwise the solver reports
//! `NotLinear` or falls back to an explicit (capped) enumeration.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::fpalg::{CoordVector, EchelonBasis, FpError};
use crate::frame::{Frame, FrameError, VarietyMatrix};
use crate::perm::{orbit_partition, PermError, Permutation};

/// Default bound on the number of candidates an exhaustive fallback may visit.
pub const DEFAULT_CAP: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstraintError {
    #[error("point {point} out of range 1..={n}")]
    PointOutOfRange { point: usize, n: usize },
    #[error(transparent)]
    Perm(#[from] PermError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Fp(#[from] FpError),
    #[error("search space of {needed} candidates exceeds the cap of {cap}")]
    CapExceeded { needed: u128, cap: u64 },
    #[error("instance has degree {instance}, frame has degree {frame}")]
    Mismatch { instance: usize, frame: usize },
}

/// An atomic constraint `point^σ ∈ set`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AtomicConstraint {
    pub point: usize,
    pub set: Vec<usize>,
}

impl AtomicConstraint {
    pub fn new(point: usize, set: impl IntoIterator<Item = usize>) -> Self {
        AtomicConstraint {
            point,
            set: set.into_iter().collect(),
        }
    }
}

/// A normalized instance: every point carries `C(a) ⊆ a^G`, sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GcInstance {
    p: u32,
    n: usize,
    gens: Vec<Permutation>,
    cmap: Vec<Vec<usize>>,
}

impl GcInstance {
    /// Intersects conjuncts on the same point, intersects every `C(a)` with
    /// the orbit `a^G` and fills unconstrained points with their orbit.
    pub fn normalize(
        p: u32,
        n: usize,
        gens: Vec<Permutation>,
        raw: &[AtomicConstraint],
    ) -> Result<GcInstance, ConstraintError> {
        if let Some(g) = gens.iter().find(|g| g.degree() != n) {
            return Err(PermError::SizeMismatch(n, g.degree()).into());
        }
        let orbits = orbit_partition(n, &gens);
        let mut cmap: Vec<Vec<usize>> = (0..n).map(|a| orbits.block_of(a).to_vec()).collect();
        for atom in raw {
            if atom.point >= n {
                return Err(ConstraintError::PointOutOfRange {
                    point: atom.point + 1,
                    n,
                });
            }
            let mut allowed = vec![false; n];
            for &b in &atom.set {
                if b >= n {
                    return Err(ConstraintError::PointOutOfRange { point: b + 1, n });
                }
                allowed[b] = true;
            }
            cmap[atom.point].retain(|&b| allowed[b]);
        }
        Ok(GcInstance { p, n, gens, cmap })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn gens(&self) -> &[Permutation] {
        &self.gens
    }

    /// `C(a)`, sorted.
    pub fn allowed(&self, a: usize) -> &[usize] {
        &self.cmap[a]
    }

    #[inline]
    pub fn allows(&self, a: usize, b: usize) -> bool {
        self.cmap[a].binary_search(&b).is_ok()
    }

    /// `max_a |C(a)|`.
    pub fn k(&self) -> usize {
        self.cmap.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// One atom per point, reproducing this instance under `normalize`.
    pub fn to_atoms(&self) -> Vec<AtomicConstraint> {
        self.cmap
            .iter()
            .enumerate()
            .map(|(a, set)| AtomicConstraint::new(a, set.iter().copied()))
            .collect()
    }

    /// Atoms for the points whose set is smaller than their orbit.
    pub fn constrained_atoms(&self) -> Vec<AtomicConstraint> {
        let orbits = orbit_partition(self.n, &self.gens);
        self.to_atoms()
            .into_iter()
            .filter(|atom| atom.set.len() < orbits.block_of(atom.point).len())
            .collect()
    }

    /// First point `a` with `a^g ∉ C(a)`.
    pub fn first_violation(&self, g: &Permutation) -> Option<usize> {
        (0..self.n).find(|&a| !self.allows(a, g.apply(a)))
    }
}

/// Which exhaustive search to run when the constraint is not linear.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Fallback {
    #[default]
    Product,
    Enumerate,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Linear,
    Product,
    Enumerate,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Linear => "linear",
            Method::Product => "product",
            Method::Enumerate => "enumerate",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UnsatReason {
    /// `V_O` is empty for the orbit with this index.
    EmptyOrbitSet { orbit: usize },
    /// The linear system has a `0 = c` row.
    Inconsistent,
    /// An exhaustive search found nothing.
    Exhausted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    Solution {
        witness: Permutation,
        method: Method,
    },
    Unsat {
        reason: UnsatReason,
        method: Method,
    },
    /// `|V_O|` is not `p^dim<E_O>` for this orbit. `dim` is `None` when
    /// `|V_O|` is not a power of p.
    NotLinear {
        orbit: usize,
        size: usize,
        dim: Option<usize>,
    },
}

impl SolveOutcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveOutcome::Solution { .. })
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, SolveOutcome::Unsat { .. })
    }

    pub fn witness(&self) -> Option<&Permutation> {
        match self {
            SolveOutcome::Solution { witness, .. } => Some(witness),
            _ => None,
        }
    }
}

/// Per-orbit part of a linear constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitLinear {
    pub vo: Vec<CoordVector>,
    pub w: CoordVector,
    pub e_basis: Vec<CoordVector>,
}

/// `Σ V_O = w + E`, with coordinates in the global frame basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearizedConstraint {
    pub orbits: Vec<OrbitLinear>,
    pub w: CoordVector,
    pub e_basis: Vec<CoordVector>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Linearization {
    Linear(LinearizedConstraint),
    Empty {
        orbit: usize,
    },
    NotLinear {
        orbit: usize,
        size: usize,
        dim: Option<usize>,
    },
}

/// Outcome of checking a candidate solution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verification {
    Satisfied,
    /// `point^g ∉ C(point)`.
    Violated {
        point: usize,
    },
    /// `g ∈ F` but not in `G`.
    NotInGroup,
    /// `g` is not even in the super-space, so not in `G`.
    NotInSuperSpace,
    Degree {
        expected: usize,
        got: usize,
    },
}

impl Verification {
    pub fn is_satisfied(&self) -> bool {
        matches!(self, Verification::Satisfied)
    }
}

impl fmt::Display for Verification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verification::Satisfied => write!(f, "satisfied"),
            Verification::Violated { point } => {
                write!(f, "constraint on point {} violated", point + 1)
            }
            Verification::NotInGroup => write!(f, "not in group"),
            Verification::NotInSuperSpace => write!(f, "not in group (outside the super-space)"),
            Verification::Degree { expected, got } => {
                write!(f, "witness has {got} points, expected {expected}")
            }
        }
    }
}

/// `V_O` for orbit `orbit`: translations `c - a_O` for `c ∈ C(a_O)` that
/// send every `b ∈ O` into `C(b)`. Sorted lexicographically.
pub fn compute_vo(fr: &Frame, inst: &GcInstance, orbit: usize) -> Vec<CoordVector> {
    let of = fr.orbit(orbit);
    let a = of.origin();
    let full = of.len();
    let mut out: Vec<CoordVector> = inst
        .allowed(a)
        .iter()
        .map(|&c| {
            fr.coords_of_diff(a, c)
                .expect("C(a) lies in the orbit of a")
        })
        .filter(|x| {
            of.points()
                .iter()
                .all(|&b| inst.allowed(b).len() == full || inst.allows(b, fr.translate(b, x)))
        })
        .collect();
    out.sort();
    out
}

pub fn compute_all_vo(fr: &Frame, inst: &GcInstance) -> Vec<Vec<CoordVector>> {
    (0..fr.orbits().len())
        .map(|o| compute_vo(fr, inst, o))
        .collect()
}

fn exact_log(size: usize, p: usize) -> Option<usize> {
    let mut d = 0;
    let mut q = 1usize;
    while q < size {
        q = q.checked_mul(p)?;
        d += 1;
    }
    (q == size).then_some(d)
}

/// Decides whether every `V_O` is an affine subspace and, if so, returns
/// `w` and a basis of `E`.
pub fn linearize(fr: &Frame, vos: &[Vec<CoordVector>]) -> Linearization {
    let field = fr.field();
    if let Some(orbit) = vos.iter().position(Vec::is_empty) {
        return Linearization::Empty { orbit };
    }
    let d = fr.dim();
    let mut w = vec![0; d];
    let mut e_basis = Vec::new();
    let mut orbits = Vec::with_capacity(vos.len());
    for (index, vo) in vos.iter().enumerate() {
        let of = fr.orbit(index);
        let wo = vo.iter().min().expect("nonempty").clone();
        let log = exact_log(vo.len(), field.modulus() as usize);
        let mut echelon = EchelonBasis::new(field, of.dim());
        let mut local = Vec::new();
        if log.is_some() {
            for v in vo {
                let e = field.sub_vec(v, &wo);
                if echelon.insert(&e) {
                    local.push(e);
                }
            }
        }
        match log {
            Some(l) if l == local.len() => {}
            _ => {
                return Linearization::NotLinear {
                    orbit: index,
                    size: vo.len(),
                    dim: log.map(|_| local.len()),
                }
            }
        }
        w[of.offset()..of.offset() + of.dim()].copy_from_slice(&wo);
        for e in &local {
            let mut g = vec![0; d];
            g[of.offset()..of.offset() + of.dim()].copy_from_slice(e);
            e_basis.push(g);
        }
        orbits.push(OrbitLinear {
            vo: vo.clone(),
            w: wo,
            e_basis: local,
        });
    }
    Linearization::Linear(LinearizedConstraint { orbits, w, e_basis })
}

/// Solves `M_G x = 0, M_E x = M_E w` and returns `Σ x_i f_i`.
pub fn solve_linear(
    fr: &Frame,
    m_g: &VarietyMatrix,
    lin: &LinearizedConstraint,
) -> Result<SolveOutcome, SolveError> {
    let d = fr.dim();
    let m_e = fr.variety_matrix(&lin.e_basis)?;
    let system = m_g.matrix.vstack(&m_e.matrix)?;
    let mut rhs = vec![0; d];
    rhs.extend(m_e.apply(&lin.w)?);
    Ok(match system.solve(&rhs)? {
        None => SolveOutcome::Unsat {
            reason: UnsatReason::Inconsistent,
            method: Method::Linear,
        },
        Some(x) => SolveOutcome::Solution {
            witness: fr.perm_of_coords(&x)?,
            method: Method::Linear,
        },
    })
}

/// Checks `g ∈ G` (via `M_G [g] = 0`), then `a^g ∈ C(a)` for all `a`.
pub fn verify(fr: &Frame, m_g: &VarietyMatrix, inst: &GcInstance, g: &Permutation) -> Verification {
    if g.degree() != inst.degree() {
        return Verification::Degree {
            expected: inst.degree(),
            got: g.degree(),
        };
    }
    match fr.coords_of_perm(g) {
        Err(_) => return Verification::NotInSuperSpace,
        Ok(x) => {
            if !m_g.contains(&x).unwrap_or(false) {
                return Verification::NotInGroup;
            }
        }
    }
    match inst.first_violation(g) {
        Some(point) => Verification::Violated { point },
        None => Verification::Satisfied,
    }
}

fn checked_power(base: u128, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base);
    }
    acc
}

/// Enumerates `G` as F_p-combinations of `group_basis` in lexicographic
/// coordinate order and returns the first element satisfying the
/// constraint.
pub fn solve_enumerate(
    fr: &Frame,
    inst: &GcInstance,
    group_basis: &[CoordVector],
    cap: u64,
) -> Result<SolveOutcome, SolveError> {
    if inst.degree() != fr.degree() {
        return Err(SolveError::Mismatch {
            instance: inst.degree(),
            frame: fr.degree(),
        });
    }
    let p = fr.p();
    let needed = checked_power(p as u128, group_basis.len());
    if needed > cap as u128 {
        return Err(SolveError::CapExceeded { needed, cap });
    }
    let field = fr.field();
    let n = fr.degree();
    let m = group_basis.len();
    let mut digits = vec![0u32; m];
    let mut u = vec![0u32; fr.dim()];
    let offsets: Vec<usize> = (0..n)
        .map(|a| fr.orbit(fr.orbit_index(a)).offset())
        .collect();
    loop {
        if (0..n).all(|a| inst.allows(a, fr.translate(a, &u[offsets[a]..]))) {
            return Ok(SolveOutcome::Solution {
                witness: fr.perm_of_coords(&u)?,
                method: Method::Enumerate,
            });
        }
        // Odometer step: adding b_i a p-th time wraps digit i back to zero.
        let mut i = m;
        loop {
            if i == 0 {
                return Ok(SolveOutcome::Unsat {
                    reason: UnsatReason::Exhausted,
                    method: Method::Enumerate,
                });
            }
            i -= 1;
            field.axpy(&mut u, 1, &group_basis[i]);
            digits[i] += 1;
            if digits[i] < p {
                break;
            }
            digits[i] = 0;
        }
    }
}

/// Enumerates `Π_O V_O` (one vector per orbit) and returns the first
/// combination lying in `G`.
pub fn solve_product(
    fr: &Frame,
    vos: &[Vec<CoordVector>],
    m_g: &VarietyMatrix,
    cap: u64,
) -> Result<SolveOutcome, SolveError> {
    if let Some(orbit) = vos.iter().position(Vec::is_empty) {
        return Ok(SolveOutcome::Unsat {
            reason: UnsatReason::EmptyOrbitSet { orbit },
            method: Method::Product,
        });
    }
    let needed = vos
        .iter()
        .fold(1u128, |acc, v| acc.saturating_mul(v.len() as u128));
    if needed > cap as u128 {
        return Err(SolveError::CapExceeded { needed, cap });
    }
    let field = fr.field();
    let d = fr.dim();
    let embed = |orbit: usize, v: &[u32]| {
        let of = fr.orbit(orbit);
        let mut x = vec![0; d];
        x[of.offset()..of.offset() + of.dim()].copy_from_slice(v);
        x
    };
    // M_G applied to each candidate, so a combination is tested by summing.
    let images: Vec<Vec<CoordVector>> = vos
        .iter()
        .enumerate()
        .map(|(o, vo)| {
            vo.iter()
                .map(|v| m_g.apply(&embed(o, v)))
                .collect::<Result<_, _>>()
        })
        .collect::<Result<_, _>>()?;
    let q = vos.len();
    let mut choice = vec![0usize; q];
    let mut sum = vec![0u32; d];
    for img in &images {
        field.axpy(&mut sum, 1, &img[0]);
    }
    loop {
        if sum.iter().all(|&x| x == 0) {
            let mut x = vec![0; d];
            for (o, &c) in choice.iter().enumerate() {
                field.axpy(&mut x, 1, &embed(o, &vos[o][c]));
            }
            return Ok(SolveOutcome::Solution {
                witness: fr.perm_of_coords(&x)?,
                method: Method::Product,
            });
        }
        let mut o = q;
        loop {
            if o == 0 {
                return Ok(SolveOutcome::Unsat {
                    reason: UnsatReason::Exhausted,
                    method: Method::Product,
                });
            }
            o -= 1;
            let minus_one = field.neg(1);
            field.axpy(&mut sum, minus_one, &images[o][choice[o]]);
            choice[o] += 1;
            if choice[o] == vos[o].len() {
                choice[o] = 0;
                field.axpy(&mut sum, 1, &images[o][0]);
                continue;
            }
            field.axpy(&mut sum, 1, &images[o][choice[o]]);
            break;
        }
    }
}

/// An instance together with its frame and the variety matrix of `G`.
#[derive(Debug, Clone)]
pub struct Solver {
    inst: GcInstance,
    frame: Frame,
    group_basis: Vec<CoordVector>,
    m_g: VarietyMatrix,
}

impl Solver {
    /// Builds the frame and `M_G`. Fails if the generators do not generate
    /// an elementary Abelian p-group.
    pub fn new(inst: GcInstance) -> Result<Solver, SolveError> {
        let frame = Frame::build(inst.degree(), inst.gens(), inst.p())?;
        let group_basis = frame.subspace_basis(inst.gens())?;
        let m_g = frame.variety_matrix(&group_basis)?;
        Ok(Solver {
            inst,
            frame,
            group_basis,
            m_g,
        })
    }

    pub fn instance(&self) -> &GcInstance {
        &self.inst
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn group_basis(&self) -> &[CoordVector] {
        &self.group_basis
    }

    pub fn group_dim(&self) -> usize {
        self.group_basis.len()
    }

    pub fn group_matrix(&self) -> &VarietyMatrix {
        &self.m_g
    }

    pub fn vo_sets(&self) -> Vec<Vec<CoordVector>> {
        compute_all_vo(&self.frame, &self.inst)
    }

    pub fn linearize(&self) -> Linearization {
        linearize(&self.frame, &self.vo_sets())
    }

    pub fn verify(&self, g: &Permutation) -> Verification {
        verify(&self.frame, &self.m_g, &self.inst, g)
    }

    pub fn solve_enumerate(&self, cap: u64) -> Result<SolveOutcome, SolveError> {
        solve_enumerate(&self.frame, &self.inst, &self.group_basis, cap)
    }

    pub fn solve_product(&self, cap: u64) -> Result<SolveOutcome, SolveError> {
        solve_product(&self.frame, &self.vo_sets(), &self.m_g, cap)
    }

    /// Linear pipeline only; never falls back.
    pub fn solve_linear(&self) -> Result<SolveOutcome, SolveError> {
        self.solve(Fallback::None, 0)
    }

    /// Linear pipeline, then `fallback` if some `V_O` is not affine.
    pub fn solve(&self, fallback: Fallback, cap: u64) -> Result<SolveOutcome, SolveError> {
        let vos = self.vo_sets();
        match linearize(&self.frame, &vos) {
            Linearization::Empty { orbit } => Ok(SolveOutcome::Unsat {
                reason: UnsatReason::EmptyOrbitSet { orbit },
                method: Method::Linear,
            }),
            Linearization::Linear(lin) => solve_linear(&self.frame, &self.m_g, &lin),
            Linearization::NotLinear { orbit, size, dim } => match fallback {
                Fallback::None => Ok(SolveOutcome::NotLinear { orbit, size, dim }),
                Fallback::Product => solve_product(&self.frame, &vos, &self.m_g, cap),
                Fallback::Enumerate => self.solve_enumerate(cap),
            },
        }
    }
}

/// Translates "some `g ∈ G` makes `^gM` lexicographically smaller than `M`"
/// into one instance per disjunct. Disjunct `i` asks `x_j^g` to keep the
/// value of `x_j` for `j < i` and `x_i^g` to have a strictly smaller value.
/// Variables are the points, ordered by index.
pub fn mmc_to_gc<T: Ord>(
    model: &[T],
    p: u32,
    gens: &[Permutation],
) -> Result<Vec<GcInstance>, ConstraintError> {
    let n = model.len();
    (0..n)
        .map(|i| {
            let mut atoms: Vec<AtomicConstraint> = (0..i)
                .map(|j| AtomicConstraint::new(j, (0..n).filter(|&a| model[a] == model[j])))
                .collect();
            atoms.push(AtomicConstraint::new(
                i,
                (0..n).filter(|&a| model[a] < model[i]),
            ));
            GcInstance::normalize(p, n, gens.to_vec(), &atoms)
        })
        .collect()
}

/// All points reachable from `a` under `<gens>`, as a set.
pub fn orbit_of(gens: &[Permutation], a: usize) -> BTreeSet<usize> {
    let mut seen = BTreeSet::from([a]);
    let mut stack = vec![a];
    while let Some(b) = stack.pop() {
        for g in gens {
            let c = g.apply(b);
            if seen.insert(c) {
                stack.push(c);
            }
        }
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::tests::example_gens;

    fn example(raw: &[AtomicConstraint]) -> GcInstance {
        GcInstance::normalize(2, 8, example_gens(), raw).unwrap()
    }

    /// All elements of `<gens>` by closure under composition.
    fn group_elements(n: usize, gens: &[Permutation]) -> Vec<Permutation> {
        let mut seen = std::collections::BTreeSet::from([Permutation::identity(n)]);
        let mut stack = vec![Permutation::identity(n)];
        while let Some(u) = stack.pop() {
            for g in gens {
                let v = u.compose(g).unwrap();
                if seen.insert(v.clone()) {
                    stack.push(v);
                }
            }
        }
        seen.into_iter().collect()
    }

    #[test]
    fn normalize_examples() {
        let gens = vec![Permutation::from_cycles(6, &[&[1, 2, 3, 4, 5, 6]])
            .unwrap()
            .pow(2)];
        // Orbits {1,3,5} and {2,4,6}; work 0-based.
        let inst = GcInstance::normalize(
            3,
            6,
            gens.clone(),
            &[
                AtomicConstraint::new(0, [1, 3]),
                AtomicConstraint::new(0, [3, 4]),
            ],
        )
        .unwrap();
        // {2,4} ∩ {4,5} = {4} (0-based 3), which is outside the orbit {0,2,4}.
        assert!(inst.allowed(0).is_empty());
        let inst = GcInstance::normalize(
            3,
            6,
            gens.clone(),
            &[
                AtomicConstraint::new(0, [2, 4]),
                AtomicConstraint::new(0, [4, 5]),
            ],
        )
        .unwrap();
        assert_eq!(inst.allowed(0), &[4]);
        let free = GcInstance::normalize(3, 6, gens.clone(), &[]).unwrap();
        assert_eq!(free.allowed(1), &[1, 3, 5]);
        assert_eq!(free.first_violation(&Permutation::identity(6)), None);
        assert!(matches!(
            GcInstance::normalize(3, 6, gens, &[AtomicConstraint::new(6, [0])]),
            Err(ConstraintError::PointOutOfRange { point: 7, n: 6 })
        ));
    }

    #[test]
    fn normalize_is_idempotent() {
        let inst = example(&[
            AtomicConstraint::new(0, [2, 5]),
            AtomicConstraint::new(4, [1, 2, 3]),
        ]);
        let again = GcInstance::normalize(2, 8, example_gens(), &inst.to_atoms()).unwrap();
        assert_eq!(again, inst);
        assert_eq!(inst.k(), 8);
        assert_eq!(inst.constrained_atoms().len(), 2);
    }

    #[test]
    fn vo_examples() {
        let inst = example(&[]);
        let fr = Frame::build(8, inst.gens(), 2).unwrap();
        assert_eq!(compute_vo(&fr, &inst, 0).len(), 8);

        let inst = example(&[AtomicConstraint::new(0, [2])]);
        assert_eq!(compute_vo(&fr, &inst, 0), vec![vec![1, 0, 0]]);

        let t = Permutation::from_cycles(2, &[&[1, 2]]).unwrap();
        let inst = GcInstance::normalize(
            2,
            2,
            vec![t],
            &[AtomicConstraint::new(0, [1]), AtomicConstraint::new(1, [0])],
        )
        .unwrap();
        let fr = Frame::build(2, inst.gens(), 2).unwrap();
        assert_eq!(compute_vo(&fr, &inst, 0), vec![vec![1]]);
    }

    #[test]
    fn vo_lemma_on_example() {
        // u satisfies C pointwise iff its coordinates are in V_O.
        let inst = example(&[
            AtomicConstraint::new(0, [2, 1]),
            AtomicConstraint::new(3, [1, 0]),
            AtomicConstraint::new(6, [4, 7, 5]),
        ]);
        let fr = Frame::build(8, inst.gens(), 2).unwrap();
        let vo = compute_vo(&fr, &inst, 0);
        for u in group_elements(8, inst.gens()) {
            let x = fr.coords_of_perm(&u).unwrap();
            assert_eq!(inst.first_violation(&u).is_none(), vo.contains(&x));
        }
    }

    #[test]
    fn linearize_examples() {
        let f2 = |n: usize, gens: Vec<Permutation>| Frame::build(n, &gens, 2).unwrap();
        let a = Permutation::from_cycles(4, &[&[1, 2], &[3, 4]]).unwrap();
        let b = Permutation::from_cycles(4, &[&[1, 3], &[2, 4]]).unwrap();
        let fr = f2(4, vec![a, b]);
        match linearize(&fr, &[vec![vec![0, 0], vec![0, 1], vec![1, 0]]]) {
            Linearization::NotLinear {
                orbit: 0,
                size: 3,
                dim: None,
            } => {}
            other => panic!("{other:?}"),
        }
        match linearize(&fr, &[vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]]) {
            Linearization::Linear(lin) => assert_eq!(lin.e_basis.len(), 2),
            other => panic!("{other:?}"),
        }
        assert_eq!(linearize(&fr, &[vec![]]), Linearization::Empty { orbit: 0 });
        // p = 2 and |V_O| ≤ 2 is always linear.
        for vo in [
            vec![vec![1, 1]],
            vec![vec![0, 1], vec![1, 0]],
            vec![vec![0, 0], vec![1, 1]],
        ] {
            assert!(matches!(linearize(&fr, &[vo]), Linearization::Linear(_)));
        }
    }

    #[test]
    fn linearize_rank_failure_over_f3() {
        let a = Permutation::from_cycles(9, &[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]).unwrap();
        let b = Permutation::from_cycles(9, &[&[1, 4, 7], &[2, 5, 8], &[3, 6, 9]]).unwrap();
        let fr = Frame::build(9, &[a, b], 3).unwrap();
        // Three points, not collinear: |V_O| = 3 = 3^1 but the rank is 2.
        match linearize(&fr, &[vec![vec![0, 0], vec![0, 1], vec![1, 0]]]) {
            Linearization::NotLinear {
                size: 3,
                dim: Some(2),
                ..
            } => {}
            other => panic!("{other:?}"),
        }
        // A line is linear.
        assert!(matches!(
            linearize(&fr, &[vec![vec![0, 1], vec![1, 1], vec![2, 1]]]),
            Linearization::Linear(_)
        ));
    }

    #[test]
    fn solve_examples() {
        let solver = Solver::new(example(&[])).unwrap();
        let out = solver.solve_linear().unwrap();
        assert!(solver.verify(out.witness().unwrap()).is_satisfied());

        let solver = Solver::new(example(&[AtomicConstraint::new(0, [2])])).unwrap();
        let g3 = example_gens()[2].clone();
        // Enumeration oracle: g3 is the only element mapping 1 to 3.
        let hits: Vec<_> = group_elements(8, solver.instance().gens())
            .into_iter()
            .filter(|u| u.apply(0) == 2)
            .collect();
        assert_eq!(hits, vec![g3.clone()]);
        assert_eq!(
            solver.solve_linear().unwrap(),
            SolveOutcome::Solution {
                witness: g3.clone(),
                method: Method::Linear
            }
        );
        assert_eq!(
            solver.solve_enumerate(DEFAULT_CAP).unwrap().witness(),
            Some(&g3)
        );
        assert_eq!(
            solver.solve_product(DEFAULT_CAP).unwrap().witness(),
            Some(&g3)
        );
    }

    #[test]
    fn verify_examples() {
        let solver = Solver::new(example(&[AtomicConstraint::new(0, [2])])).unwrap();
        let g = example_gens();
        assert!(solver.verify(&g[2]).is_satisfied());
        assert_eq!(solver.verify(&g[0]), Verification::Violated { point: 0 });
        let free = Solver::new(example(&[])).unwrap();
        assert!(free.verify(&Permutation::identity(8)).is_satisfied());
        assert_eq!(
            free.verify(&Permutation::identity(3)),
            Verification::Degree {
                expected: 8,
                got: 3
            }
        );

        // G = <(1 2)(3 4)>: (1 2) is in F but not in G.
        let t = Permutation::from_cycles(4, &[&[1, 2], &[3, 4]]).unwrap();
        let s = Solver::new(GcInstance::normalize(2, 4, vec![t], &[]).unwrap()).unwrap();
        assert_eq!(
            s.verify(&Permutation::from_cycles(4, &[&[1, 2]]).unwrap()),
            Verification::NotInGroup
        );
        assert_eq!(
            s.verify(&Permutation::from_cycles(4, &[&[1, 3], &[2, 4]]).unwrap()),
            Verification::NotInSuperSpace
        );
    }

    #[test]
    fn unsat_paths() {
        let solver = Solver::new(example(&[AtomicConstraint::new(0, [])])).unwrap();
        assert!(matches!(
            solver.solve_linear().unwrap(),
            SolveOutcome::Unsat {
                reason: UnsatReason::EmptyOrbitSet { orbit: 0 },
                ..
            }
        ));
        assert!(solver.solve_enumerate(DEFAULT_CAP).unwrap().is_unsat());
        assert!(solver.solve_product(DEFAULT_CAP).unwrap().is_unsat());

        // Two orbits moved together: asking one to move and the other to stay
        // is inconsistent with G.
        let t = Permutation::from_cycles(4, &[&[1, 2], &[3, 4]]).unwrap();
        let inst = GcInstance::normalize(
            2,
            4,
            vec![t],
            &[AtomicConstraint::new(0, [1]), AtomicConstraint::new(2, [2])],
        )
        .unwrap();
        let solver = Solver::new(inst).unwrap();
        assert_eq!(
            solver.solve_linear().unwrap(),
            SolveOutcome::Unsat {
                reason: UnsatReason::Inconsistent,
                method: Method::Linear
            }
        );
        assert!(solver.solve_enumerate(DEFAULT_CAP).unwrap().is_unsat());
        assert!(solver.solve_product(DEFAULT_CAP).unwrap().is_unsat());
    }

    #[test]
    fn caps_are_explicit() {
        let solver = Solver::new(example(&[])).unwrap();
        assert_eq!(
            solver.solve_enumerate(4),
            Err(SolveError::CapExceeded { needed: 8, cap: 4 })
        );
        assert!(matches!(
            solver.solve_product(4),
            Err(SolveError::CapExceeded { .. })
        ));
        assert!(solver.solve_enumerate(8).unwrap().is_sat());
        // Enumeration returns the identity first on an unconstrained instance.
        assert!(solver
            .solve_enumerate(8)
            .unwrap()
            .witness()
            .unwrap()
            .is_identity());
    }

    #[test]
    fn fallback_policy() {
        let a = Permutation::from_cycles(4, &[&[1, 2], &[3, 4]]).unwrap();
        let b = Permutation::from_cycles(4, &[&[1, 3], &[2, 4]]).unwrap();
        let inst = GcInstance::normalize(2, 4, vec![a, b], &[AtomicConstraint::new(0, [1, 2, 0])])
            .unwrap();
        let solver = Solver::new(inst).unwrap();
        assert!(matches!(
            solver.solve(Fallback::None, DEFAULT_CAP).unwrap(),
            SolveOutcome::NotLinear { size: 3, .. }
        ));
        let out = solver.solve(Fallback::Product, DEFAULT_CAP).unwrap();
        assert_eq!(out.witness().map(Permutation::is_identity), Some(true));
        assert!(solver
            .solve(Fallback::Enumerate, DEFAULT_CAP)
            .unwrap()
            .is_sat());
    }

    #[test]
    fn mmc_examples() {
        let swap = Permutation::from_cycles(3, &[&[1, 2, 3]]).unwrap();
        let gens = vec![swap];
        // All-equal model: every strictly-smaller set is empty.
        let all = mmc_to_gc(&[true, true, true], 3, &gens).unwrap();
        assert_eq!(all.len(), 3);
        for (i, inst) in all.iter().enumerate() {
            assert!(inst.allowed(i).is_empty());
            let s = Solver::new(inst.clone()).unwrap();
            assert!(s.solve_enumerate(DEFAULT_CAP).unwrap().is_unsat());
        }
        // Three variables: disjunct i fixes values on 0..i and decreases at i.
        let model = [true, false, true];
        let d = mmc_to_gc(&model, 3, &gens).unwrap();
        assert_eq!(d[0].allowed(0), &[1]);
        assert_eq!(d[1].allowed(0), &[0, 2]);
        assert!(d[1].allowed(1).is_empty());
        assert_eq!(d[2].allowed(0), &[0, 2]);
        assert_eq!(d[2].allowed(1), &[1]);
        assert_eq!(d[2].allowed(2), &[1]);

        // M(x)=1, M(y)=0, G = <(x y)>: the swap satisfies the first disjunct.
        let t = Permutation::from_cycles(2, &[&[1, 2]]).unwrap();
        let d = mmc_to_gc(&[true, false], 2, std::slice::from_ref(&t)).unwrap();
        assert_eq!(d[0].allowed(0), &[1]);
        let s = Solver::new(d[0].clone()).unwrap();
        assert_eq!(s.solve_linear().unwrap().witness(), Some(&t));
    }

    #[test]
    fn orbit_of_matches_partition() {
        let g = example_gens();
        assert_eq!(orbit_of(&g[..1], 0), BTreeSet::from([0, 1]));
        assert_eq!(orbit_of(&g, 3).len(), 8);
    }
}
