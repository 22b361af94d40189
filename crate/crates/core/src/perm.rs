//! Permutations of `{0, .., n-1}` and the lattice of orbit partitions.
//!
//! Points are 0-based inside the library. The text forms (`g 2 1 4 3`
//! image lists and cycle notation) are 1-based, matching the instance file
//! format.

use std::fmt;

use petgraph::unionfind::UnionFind;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("domain size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("not a bijection: image {image} of point {point} is out of range or repeated")]
    NotBijection { point: usize, image: usize },
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("malformed permutation text: {0}")]
    Parse(String),
}

/// A permutation given by its image array: `images[a]` is `a^g`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    /// Builds a permutation from 0-based images, checking bijectivity.
    pub fn from_images(images: Vec<usize>) -> Result<Self, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for (point, &image) in images.iter().enumerate() {
            if image >= n || seen[image] {
                return Err(PermError::NotBijection { point, image });
            }
            seen[image] = true;
        }
        Ok(Permutation { images })
    }

    /// Builds a permutation of `{0..n-1}` from 1-based cycles, e.g.
    /// `from_cycles(6, &[&[1, 2], &[3, 4, 5]])` is `(1 2)(3 4 5)`.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self, PermError> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut touched = vec![false; n];
        for cycle in cycles {
            for (i, &a) in cycle.iter().enumerate() {
                let b = cycle[(i + 1) % cycle.len()];
                if a == 0 || a > n || b == 0 || b > n || touched[a - 1] {
                    return Err(PermError::NotBijection { point: a, image: b });
                }
                touched[a - 1] = true;
                images[a - 1] = b - 1;
            }
        }
        Permutation::from_images(images)
    }

    /// Parses the canonical text form `g <n 1-based images>`.
    pub fn parse_text(line: &str) -> Result<Self, PermError> {
        let mut tokens = line.split_whitespace();
        if tokens.next() != Some("g") {
            return Err(PermError::Parse(format!(
                "expected leading 'g' in {line:?}"
            )));
        }
        let images = tokens
            .map(|t| match t.parse::<usize>() {
                Ok(v) if v >= 1 => Ok(v - 1),
                _ => Err(PermError::Parse(format!("bad point {t:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Permutation::from_images(images)
    }

    /// Canonical text form `g <n 1-based images>`.
    pub fn to_text(&self) -> String {
        let mut s = String::from("g");
        for &b in &self.images {
            s.push(' ');
            s.push_str(&(b + 1).to_string());
        }
        s
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, a: usize) -> usize {
        self.images[a]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn into_images(self) -> Vec<usize> {
        self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(a, &b)| a == b)
    }

    /// `u.compose(v)` maps `a` to `(a^u)^v`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation, PermError> {
        if self.degree() != other.degree() {
            return Err(PermError::SizeMismatch(self.degree(), other.degree()));
        }
        Ok(Permutation {
            images: self.images.iter().map(|&b| other.images[b]).collect(),
        })
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.degree()];
        for (a, &b) in self.images.iter().enumerate() {
            images[b] = a;
        }
        Permutation { images }
    }

    /// `self` composed with itself `e` times.
    pub fn pow(&self, e: u64) -> Permutation {
        let mut result = Permutation::identity(self.degree());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.compose(&base).expect("same degree");
            }
            base = base.compose(&base).expect("same degree");
            e >>= 1;
        }
        result
    }

    /// Nontrivial and trivial cycles, each starting at its smallest point,
    /// listed by ascending smallest point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut a = start;
            while !seen[a] {
                seen[a] = true;
                cycle.push(a);
                a = self.images[a];
            }
            out.push(cycle);
        }
        out
    }

    /// Order of the permutation: the lcm of its cycle lengths.
    pub fn order(&self) -> u64 {
        self.cycles()
            .iter()
            .map(|c| c.len() as u64)
            .fold(1, |acc, len| acc / gcd(acc, len) * len)
    }

    pub fn commutes_with(&self, other: &Permutation) -> bool {
        self.degree() == other.degree()
            && self
                .images
                .iter()
                .enumerate()
                .all(|(a, &b)| other.images[b] == self.images[other.images[a]])
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Cycle notation with 1-based points; the identity prints as `()`.
impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut any = false;
        for cycle in self.cycles().into_iter().filter(|c| c.len() > 1) {
            any = true;
            write!(f, "(")?;
            for (i, a) in cycle.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", a + 1)?;
            }
            write!(f, ")")?;
        }
        if !any {
            write!(f, "()")?;
        }
        Ok(())
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut q = 2u32;
    while (q as u64) * (q as u64) <= p as u64 {
        if p.is_multiple_of(q) {
            return false;
        }
        q += 1;
    }
    true
}

/// A partition of `{0..n-1}` into blocks, kept in canonical form: points
/// sorted inside each block, blocks ordered by their minimum.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OrbitPartition {
    blocks: Vec<Vec<usize>>,
    block_of: Vec<usize>,
}

impl OrbitPartition {
    /// The partition into singletons.
    pub fn bottom(n: usize) -> Self {
        OrbitPartition {
            blocks: (0..n).map(|a| vec![a]).collect(),
            block_of: (0..n).collect(),
        }
    }

    /// The one-block partition.
    pub fn top(n: usize) -> Self {
        if n == 0 {
            return OrbitPartition::bottom(0);
        }
        OrbitPartition {
            blocks: vec![(0..n).collect()],
            block_of: vec![0; n],
        }
    }

    /// Builds a canonical partition from arbitrary (disjoint, covering) blocks.
    pub fn from_blocks(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self, PermError> {
        let mut uf = UnionFind::new(n);
        let mut seen = vec![false; n];
        for block in &blocks {
            for &a in block {
                if a >= n || seen[a] {
                    return Err(PermError::NotBijection { point: a, image: a });
                }
                seen[a] = true;
                uf.union(block[0], a);
            }
        }
        if let Some(a) = seen.iter().position(|s| !s) {
            return Err(PermError::NotBijection { point: a, image: a });
        }
        Ok(Self::from_union_find(&uf, n))
    }

    fn from_union_find(uf: &UnionFind<usize>, n: usize) -> Self {
        // Points are scanned in ascending order, so blocks come out ordered by
        // their minimum and sorted internally.
        let mut root_block = vec![usize::MAX; n];
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let block_of: Vec<usize> = (0..n)
            .map(|a| {
                let r = uf.find(a);
                if root_block[r] == usize::MAX {
                    root_block[r] = blocks.len();
                    blocks.push(Vec::new());
                }
                blocks[root_block[r]].push(a);
                root_block[r]
            })
            .collect();
        OrbitPartition { blocks, block_of }
    }

    /// Cycle partition of a single permutation.
    pub fn of_permutation(g: &Permutation) -> Self {
        orbit_partition(g.degree(), std::slice::from_ref(g))
    }

    pub fn degree(&self) -> usize {
        self.block_of.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Index of the block containing `a`.
    #[inline]
    pub fn block_index(&self, a: usize) -> usize {
        self.block_of[a]
    }

    /// The block containing `a` (the orbit `a^G`).
    pub fn block_of(&self, a: usize) -> &[usize] {
        &self.blocks[self.block_of[a]]
    }

    pub fn same_block(&self, a: usize, b: usize) -> bool {
        self.block_of[a] == self.block_of[b]
    }

    /// Least upper bound: the finest partition coarser than both.
    pub fn join(&self, other: &OrbitPartition) -> Result<OrbitPartition, PermError> {
        let n = self.degree();
        if other.degree() != n {
            return Err(PermError::SizeMismatch(n, other.degree()));
        }
        let mut uf = UnionFind::new(n);
        for part in [self, other] {
            for block in &part.blocks {
                for &a in &block[1..] {
                    uf.union(block[0], a);
                }
            }
        }
        Ok(Self::from_union_find(&uf, n))
    }
}

/// Orbits of `<gens>` on `{0..n-1}`: the join of the cycle partitions of
/// the generators. An empty generator list gives the singleton partition.
pub fn orbit_partition(n: usize, gens: &[Permutation]) -> OrbitPartition {
    let mut uf = UnionFind::new(n);
    for g in gens {
        assert_eq!(g.degree(), n, "generator degree must match domain size");
        for (a, &b) in g.images.iter().enumerate() {
            uf.union(a, b);
        }
    }
    OrbitPartition::from_union_find(&uf, n)
}

/// Why a generating set does not generate an elementary Abelian p-group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AbelianViolation {
    /// Generator `index` is not the identity and its order is not `p`.
    Order { index: usize, order: u64 },
    /// Generators `i` and `j` do not commute.
    NotCommuting { i: usize, j: usize },
    /// Generator `index` does not act on the common domain.
    Degree { index: usize, degree: usize },
}

impl fmt::Display for AbelianViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AbelianViolation::Order { index, order } => {
                write!(f, "generator {} has order {order}", index + 1)
            }
            AbelianViolation::NotCommuting { i, j } => {
                write!(f, "generators {} and {} do not commute", i + 1, j + 1)
            }
            AbelianViolation::Degree { index, degree } => {
                write!(f, "generator {} has degree {degree}", index + 1)
            }
        }
    }
}

/// Returns the first reason why `<gens>` is not elementary Abelian of
/// exponent `p`, or `None` if it is.
pub fn elementary_abelian_violation(
    gens: &[Permutation],
    p: u32,
) -> Result<Option<AbelianViolation>, PermError> {
    if !is_prime(p) {
        return Err(PermError::NotPrime(p));
    }
    if let Some(first) = gens.first() {
        let n = first.degree();
        if let Some(index) = gens.iter().position(|g| g.degree() != n) {
            return Ok(Some(AbelianViolation::Degree {
                index,
                degree: gens[index].degree(),
            }));
        }
    }
    for (index, g) in gens.iter().enumerate() {
        let order = g.order();
        if order != 1 && order != p as u64 {
            return Ok(Some(AbelianViolation::Order { index, order }));
        }
    }
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            if !gens[i].commutes_with(&gens[j]) {
                return Ok(Some(AbelianViolation::NotCommuting { i, j }));
            }
        }
    }
    Ok(None)
}

pub fn is_elementary_abelian(gens: &[Permutation], p: u32) -> Result<bool, PermError> {
    Ok(elementary_abelian_violation(gens, p)?.is_none())
}
