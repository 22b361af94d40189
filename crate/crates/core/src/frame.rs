//! Coordinates for the super-space `F`, the direct sum of the transitive
//! constituents `G|_O` of an elementary Abelian p-group `G`.
//!
//! Each orbit `O` is an affine space over `G|_O`: a point `b` is identified
//! with the unique vector `b - a_O` taking the origin `a_O = min(O)` to `b`.
//! A basis `f_O` of `G|_O` is extracted from the generator restrictions by
//! keeping a restriction only when it moves the origin out of the orbit of
//! the vectors kept so far. Coordinates of every point are then tabulated
//! once, so coordinates of any `u ∈ F` are read off from the image of each
//! origin.

use thiserror::Error;

use crate::fpalg::{CoordVector, EchelonBasis, FpError, FpMatrix, PrimeField};
use crate::perm::{
    elementary_abelian_violation, orbit_partition, AbelianViolation, OrbitPartition, PermError,
    Permutation,
};
use petgraph::unionfind::UnionFind;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrameError {
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Fp(#[from] FpError),
    #[error("generators do not generate an elementary Abelian {p}-group: {violation}")]
    NotElementaryAbelian { p: u32, violation: AbelianViolation },
    #[error("orbit of point {min_point} has size {size}, not a power of {p}")]
    OrbitSize {
        min_point: usize,
        size: usize,
        p: u32,
    },
    #[error("generator {index} has degree {degree}, expected {n}")]
    Degree {
        index: usize,
        degree: usize,
        n: usize,
    },
    #[error("permutation is not in the super-space (orbit of point {min_point})")]
    NotInSuperSpace { min_point: usize },
    #[error("points {0} and {1} lie in different orbits")]
    DifferentOrbits(usize, usize),
    #[error("expected a vector of length {expected}, got {got}")]
    Length { expected: usize, got: usize },
    #[error("subspace basis is linearly dependent")]
    DependentBasis,
    #[error("orbit of point {min_point} is not acted on regularly")]
    NotRegular { min_point: usize },
}

/// One orbit with its origin, basis and coordinate table.
#[derive(Debug, Clone)]
pub struct OrbitFrame {
    points: Vec<usize>,
    origin: usize,
    dim: usize,
    offset: usize,
    basis: Vec<Permutation>,
    /// Lexicographic rank of a coordinate tuple -> point.
    point_at: Vec<usize>,
}

impl OrbitFrame {
    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn origin(&self) -> usize {
        self.origin
    }

    /// `d_O`, with `p^d_O = |O|`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Position of this orbit's coordinates in the global vector.
    pub fn offset(&self) -> usize {
        self.offset
    }

    /// `f_O`, as permutations of the whole domain fixing the complement of `O`.
    pub fn basis(&self) -> &[Permutation] {
        &self.basis
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// The super-space frame: orbits, per-orbit bases and coordinate tables.
#[derive(Debug, Clone)]
pub struct Frame {
    field: PrimeField,
    n: usize,
    partition: OrbitPartition,
    orbits: Vec<OrbitFrame>,
    rank_of: Vec<usize>,
    dim: usize,
}

/// A matrix `M_H` with `M_H [u] = M_H [v]` iff `u ∈ v + H`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarietyMatrix {
    pub matrix: FpMatrix,
    pub dim_sub: usize,
}

impl VarietyMatrix {
    pub fn apply(&self, x: &[u32]) -> Result<CoordVector, FpError> {
        self.matrix.mul_vec(x)
    }

    /// Whether `x` lies in the subspace `H`.
    pub fn contains(&self, x: &[u32]) -> Result<bool, FpError> {
        Ok(self.apply(x)?.iter().all(|&v| v == 0))
    }

    /// Whether `u ∈ v + H`.
    pub fn same_coset(&self, u: &[u32], v: &[u32]) -> Result<bool, FpError> {
        Ok(self.apply(u)? == self.apply(v)?)
    }
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

/// `g|_O` extended by the identity off `O`.
pub fn restrict(g: &Permutation, orbit: &[usize]) -> Permutation {
    let mut images: Vec<usize> = (0..g.degree()).collect();
    for &c in orbit {
        images[c] = g.apply(c);
    }
    Permutation::from_images(images).expect("restriction of a permutation to an invariant set")
}

impl Frame {
    /// Builds the frame of `<gens>` acting on `{0..n-1}`.
    pub fn build(n: usize, gens: &[Permutation], p: u32) -> Result<Frame, FrameError> {
        let field = PrimeField::new(p)?;
        if let Some(index) = gens.iter().position(|g| g.degree() != n) {
            return Err(FrameError::Degree {
                index,
                degree: gens[index].degree(),
                n,
            });
        }
        if let Some(violation) = elementary_abelian_violation(gens, p)? {
            return Err(FrameError::NotElementaryAbelian { p, violation });
        }
        let partition = orbit_partition(n, gens);
        let mut local = vec![0usize; n];
        for block in partition.blocks() {
            for (i, &a) in block.iter().enumerate() {
                local[a] = i;
            }
        }

        let mut orbits = Vec::with_capacity(partition.num_blocks());
        let mut rank_of = vec![usize::MAX; n];
        let mut offset = 0;
        for block in partition.blocks() {
            let origin = block[0];
            let dim = exact_log(block.len(), p as usize).ok_or(FrameError::OrbitSize {
                min_point: origin,
                size: block.len(),
                p,
            })?;

            // Basis extraction: `uf` holds the orbit partition of O under the
            // vectors kept so far.
            let mut uf = UnionFind::<usize>::new(block.len());
            let mut kept: Vec<Permutation> = Vec::with_capacity(dim);
            for g in gens {
                if kept.len() == dim {
                    break;
                }
                if uf.equiv(local[origin], local[g.apply(origin)]) {
                    continue;
                }
                for &c in block {
                    uf.union(local[c], local[g.apply(c)]);
                }
                kept.push(restrict(g, block));
            }
            if kept.len() != dim {
                return Err(FrameError::NotRegular { min_point: origin });
            }
            // Each kept vector is prepended, so the basis is in reverse order.
            kept.reverse();

            // Coordinate table by lexicographic enumeration: the tuple of rank
            // r is reached from the tuple with its last nonzero digit
            // decremented, by one more application of that basis vector.
            let size = block.len();
            let mut point_at = vec![usize::MAX; size];
            point_at[0] = origin;
            for r in 1..size {
                let mut weight = 1;
                let mut j = dim - 1;
                while (r / weight) % p as usize == 0 {
                    weight *= p as usize;
                    j -= 1;
                }
                point_at[r] = kept[j].apply(point_at[r - weight]);
            }
            for (r, &b) in point_at.iter().enumerate() {
                if partition.block_index(b) != partition.block_index(origin)
                    || rank_of[b] != usize::MAX
                {
                    return Err(FrameError::NotRegular { min_point: origin });
                }
                rank_of[b] = r;
            }

            orbits.push(OrbitFrame {
                points: block.clone(),
                origin,
                dim,
                offset,
                basis: kept,
                point_at,
            });
            offset += dim;
        }

        Ok(Frame {
            field,
            n,
            partition,
            orbits,
            rank_of,
            dim: offset,
        })
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn p(&self) -> u32 {
        self.field.modulus()
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    /// `d = Σ d_O`, the dimension of `F`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn partition(&self) -> &OrbitPartition {
        &self.partition
    }

    pub fn orbits(&self) -> &[OrbitFrame] {
        &self.orbits
    }

    pub fn orbit(&self, index: usize) -> &OrbitFrame {
        &self.orbits[index]
    }

    /// Index of the orbit containing `a`.
    pub fn orbit_index(&self, a: usize) -> usize {
        self.partition.block_index(a)
    }

    /// The global basis `f`: concatenation of the `f_O` in orbit order.
    pub fn basis(&self) -> impl Iterator<Item = &Permutation> {
        self.orbits.iter().flat_map(|o| o.basis.iter())
    }

    fn digits_into(&self, mut rank: usize, out: &mut [u32]) {
        let p = self.p() as usize;
        for x in out.iter_mut().rev() {
            *x = (rank % p) as u32;
            rank /= p;
        }
    }

    /// Coordinates of `b - a_O` in `f_O`, where `O` is the orbit of `b`.
    pub fn point_coords(&self, b: usize) -> CoordVector {
        let orbit = &self.orbits[self.orbit_index(b)];
        let mut x = vec![0; orbit.dim];
        self.digits_into(self.rank_of[b], &mut x);
        x
    }

    /// The point `a_O + Σ x_i f_O[i]` of orbit `orbit`.
    pub fn point_of_coords(&self, orbit: usize, x: &[u32]) -> usize {
        let p = self.p() as usize;
        let rank = x.iter().fold(0usize, |acc, &v| acc * p + (v as usize % p));
        self.orbits[orbit].point_at[rank]
    }

    /// External sum `a + u` where `u ∈ G|_O` is given by its coordinates
    /// in `f_O`.
    #[inline]
    pub fn translate(&self, a: usize, x: &[u32]) -> usize {
        let orbit = &self.orbits[self.orbit_index(a)];
        let p = self.p() as usize;
        let mut rank = self.rank_of[a];
        let mut out = 0;
        let mut weight = 1;
        for &xi in x[..orbit.dim].iter().rev() {
            let digit = (rank % p + xi as usize) % p;
            rank /= p;
            out += digit * weight;
            weight *= p;
        }
        orbit.point_at[out]
    }

    /// Coordinates `[u]_f` of `u ∈ F`.
    pub fn coords_of_perm(&self, u: &Permutation) -> Result<CoordVector, FrameError> {
        if u.degree() != self.n {
            return Err(FrameError::Length {
                expected: self.n,
                got: u.degree(),
            });
        }
        let mut x = vec![0; self.dim];
        for (index, orbit) in self.orbits.iter().enumerate() {
            let b = u.apply(orbit.origin);
            if self.orbit_index(b) != index {
                return Err(FrameError::NotInSuperSpace {
                    min_point: orbit.origin,
                });
            }
            let xo = &mut x[orbit.offset..orbit.offset + orbit.dim];
            self.digits_into(self.rank_of[b], xo);
            let xo = &x[orbit.offset..orbit.offset + orbit.dim];
            if orbit
                .points
                .iter()
                .any(|&c| u.apply(c) != self.translate(c, xo))
            {
                return Err(FrameError::NotInSuperSpace {
                    min_point: orbit.origin,
                });
            }
        }
        Ok(x)
    }

    /// Coordinates of `b - a` in `f_O`, where `a, b ∈ O`.
    pub fn coords_of_diff(&self, a: usize, b: usize) -> Result<CoordVector, FrameError> {
        if self.orbit_index(a) != self.orbit_index(b) {
            return Err(FrameError::DifferentOrbits(a, b));
        }
        Ok(self
            .field
            .sub_vec(&self.point_coords(b), &self.point_coords(a)))
    }

    /// The permutation `Σ x_i f_i`.
    pub fn perm_of_coords(&self, x: &[u32]) -> Result<Permutation, FrameError> {
        if x.len() != self.dim {
            return Err(FrameError::Length {
                expected: self.dim,
                got: x.len(),
            });
        }
        let mut images: Vec<usize> = (0..self.n).collect();
        for orbit in &self.orbits {
            let xo = &x[orbit.offset..orbit.offset + orbit.dim];
            if xo.iter().all(|&v| v % self.p() == 0) {
                continue;
            }
            for &c in &orbit.points {
                images[c] = self.translate(c, xo);
            }
        }
        Ok(Permutation::from_images(images)?)
    }

    /// Extracts a basis of `<vecs>` from the given vectors, in order.
    pub fn subspace_basis(&self, vecs: &[Permutation]) -> Result<Vec<CoordVector>, FrameError> {
        let mut echelon = EchelonBasis::new(&self.field, self.dim);
        let mut basis = Vec::new();
        for u in vecs {
            let x = self.coords_of_perm(u)?;
            if echelon.insert(&x) {
                basis.push(x);
            }
        }
        Ok(basis)
    }

    /// Builds `M_H = D P^-1` where the columns of `P` are `sub_basis`
    /// completed to a basis of `F` by vectors of `f`, and `D` keeps the
    /// last `d - d'` coordinates.
    pub fn variety_matrix(&self, sub_basis: &[CoordVector]) -> Result<VarietyMatrix, FrameError> {
        let d = self.dim;
        let mut echelon = EchelonBasis::new(&self.field, d);
        for h in sub_basis {
            if h.len() != d {
                return Err(FrameError::Length {
                    expected: d,
                    got: h.len(),
                });
            }
            if !echelon.insert(h) {
                return Err(FrameError::DependentBasis);
            }
        }
        let mut columns: Vec<CoordVector> = sub_basis.to_vec();
        for j in 0..d {
            if columns.len() == d {
                break;
            }
            let mut e = vec![0; d];
            e[j] = 1;
            if echelon.insert(&e) {
                columns.push(e);
            }
        }
        let change = FpMatrix::from_columns(&self.field, d, &columns)?;
        let mut matrix = change.invert()?;
        for r in 0..sub_basis.len() {
            for c in 0..d {
                matrix.set(r, c, 0);
            }
        }
        Ok(VarietyMatrix {
            matrix,
            dim_sub: sub_basis.len(),
        })
    }
}
