#![allow(dead_code)]

use std::collections::HashSet;

use gcsolve::constraint::GcInstance;
use gcsolve::genbench::{gen_instance, GenConfig};
use gcsolve::perm::Permutation;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

pub fn rng(seed: u64) -> SplitMix64 {
    SplitMix64::seed_from_u64(seed)
}

pub fn random_perm(rng: &mut SplitMix64, n: usize) -> Permutation {
    let mut images: Vec<usize> = (0..n).collect();
    images.shuffle(rng);
    Permutation::from_images(images).unwrap()
}

/// Elements of the elementary Abelian p-group generated by `gens`, built by
/// adjoining one generator at a time: if `g ∉ S` then `<S, g> = ∪_j S g^j`.
pub fn group_elements(n: usize, gens: &[Permutation], p: u32) -> Vec<Permutation> {
    let mut elems = vec![Permutation::identity(n)];
    let mut seen: HashSet<Vec<usize>> = HashSet::from([Permutation::identity(n).into_images()]);
    for g in gens {
        if seen.contains(g.images()) {
            continue;
        }
        let base = elems.clone();
        let mut power = g.clone();
        for _ in 1..p {
            for s in &base {
                let e = s.compose(&power).unwrap();
                if seen.insert(e.images().to_vec()) {
                    elems.push(e);
                }
            }
            power = power.compose(g).unwrap();
        }
    }
    elems
}

/// Orbits by breadth-first search over the generators, blocks sorted by
/// their least point.
pub fn bfs_orbits(n: usize, gens: &[Permutation]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; n];
    let mut blocks = Vec::new();
    for a in 0..n {
        if seen[a] {
            continue;
        }
        seen[a] = true;
        let mut block = vec![a];
        let mut i = 0;
        while i < block.len() {
            let b = block[i];
            for g in gens {
                let c = g.apply(b);
                if !seen[c] {
                    seen[c] = true;
                    block.push(c);
                }
            }
            i += 1;
        }
        block.sort_unstable();
        blocks.push(block);
    }
    blocks
}

pub fn satisfies(inst: &GcInstance, g: &Permutation) -> bool {
    (0..inst.degree()).all(|a| inst.allowed(a).contains(&g.apply(a)))
}

/// Exhaustive satisfiability over the explicit group.
pub fn brute_sat(inst: &GcInstance) -> bool {
    group_elements(inst.degree(), inst.gens(), inst.p())
        .iter()
        .any(|g| satisfies(inst, g))
}

/// Random orbit dimensions: `q ∈ 1..=max_q`, `d_i ∈ 1..=max_d`, with
/// `Σ d_i ≤ max_total`.
pub fn random_dims(
    rng: &mut SplitMix64,
    max_q: usize,
    max_d: usize,
    max_total: usize,
) -> Vec<usize> {
    loop {
        let q = rng.random_range(1..=max_q);
        let dims: Vec<usize> = (0..q).map(|_| rng.random_range(1..=max_d)).collect();
        if dims.iter().sum::<usize>() <= max_total {
            return dims;
        }
    }
}

pub fn random_instance(
    rng: &mut SplitMix64,
    p: u32,
    dims: Vec<usize>,
    k: usize,
    max_dim_g: Option<usize>,
) -> (GcInstance, Option<Permutation>) {
    let cfg = GenConfig {
        p,
        dims,
        k,
        max_dim_g,
        sat_bias: 0.5,
        seed: rng.random(),
        ..GenConfig::default()
    };
    let g = gen_instance(&cfg).unwrap();
    (g.instance, g.witness)
}

/// Span of `basis` over F_p, as a set of vectors.
pub fn span(basis: &[Vec<u32>], dim: usize, p: u32) -> HashSet<Vec<u32>> {
    let mut out = HashSet::from([vec![0; dim]]);
    for b in basis {
        let current: Vec<Vec<u32>> = out.iter().cloned().collect();
        for v in current {
            let mut w = v;
            for _ in 1..p {
                for (x, y) in w.iter_mut().zip(b) {
                    *x = (*x + y) % p;
                }
                out.insert(w.clone());
            }
        }
    }
    out
}

/// Every vector of `F_p^dim`, in lexicographic order.
pub fn all_vectors(dim: usize, p: u32) -> Vec<Vec<u32>> {
    let total = (p as usize).pow(dim as u32);
    (0..total)
        .map(|mut r| {
            let mut v = vec![0; dim];
            for x in v.iter_mut().rev() {
                *x = (r % p as usize) as u32;
                r /= p as usize;
            }
            v
        })
        .collect()
}

/// A random set of `k`-clauses over at most `max_vars` variables. When
/// `planted`, every clause meets a hidden interpretation exactly once.
pub fn random_clause_set(
    rng: &mut SplitMix64,
    max_vars: usize,
    k: usize,
    max_clauses: usize,
    planted: bool,
) -> gcsolve::reduction::ClauseSet {
    let nv = rng.random_range(k + 1..=max_vars.max(k + 1));
    let vars: Vec<String> = (0..nv).map(|i| format!("x{i}")).collect();
    let hidden: Vec<bool> = loop {
        let h: Vec<bool> = (0..nv).map(|_| rng.random_bool(0.4)).collect();
        let on = h.iter().filter(|&&x| x).count();
        if on >= 1 && nv - on >= k - 1 {
            break h;
        }
    };
    let mut clauses = Vec::new();
    let m = rng.random_range(1..=max_clauses);
    while clauses.len() < m {
        let c = rand::seq::index::sample(rng, nv, k).into_vec();
        if !planted || c.iter().filter(|&&v| hidden[v]).count() == 1 {
            clauses.push(c);
        }
    }
    gcsolve::reduction::ClauseSet::from_indices(vars, clauses).unwrap()
}
