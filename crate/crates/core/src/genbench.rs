//! Seeded random instances and the timing harness comparing the linear
//! pipeline with exhaustive enumeration of the group.
//!
//! Randomness comes from `SplitMix64` (via `rand_xoshiro`). Sample `i` of
//! sweep cell `c` under master seed `s` uses the seed produced by the first
//! output of `SplitMix64::seed_from_u64(s + (c << 32 | i))`, so cells and
//! samples can be generated independently and in any order.
//!
//! Instance recipe, for orbit dimensions `d_1..d_q` and a target `dim G = t`:
//!
//! 1. Orbit `i` is `F_p^{d_i}` acted on by translations; `n = Σ p^{d_i}`.
//! 2. A random `(Σ d_i) × t` matrix is drawn, each orbit's block of rows
//!    resampled until it has rank `d_i` and the whole matrix until it has
//!    rank `t`. Its columns are the generators: each column is a sum over
//!    orbits of a random translation of that orbit.
//! 3. `extra_gens` further random combinations of the columns are appended
//!    and the points are relabelled by a random permutation.
//! 4. With probability `sat_bias` a uniform element `g ∈ G` is planted.
//!    Every `C(a)` is a uniform subset of `a^G` of size `min(k, |a^G|)`,
//!    containing `a^g` when planted.

use std::fmt::Write as _;
use std::time::Instant;

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use thiserror::Error;

use crate::constraint::{
    AtomicConstraint, ConstraintError, Fallback, GcInstance, SolveError, SolveOutcome, Solver,
};
use crate::fpalg::{FpMatrix, PrimeField};
use crate::perm::{is_prime, Permutation};

/// Default largest orbit dimension at desk scale.
pub const DEFAULT_MAX_ORBIT_DIM: usize = 10;
/// Default largest number of orbits when dimensions are drawn at random.
pub const DEFAULT_MAX_ORBITS: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("invalid orbit dimensions: {0}")]
    Dims(String),
    #[error("target dim G = {target} outside [{lo}, {hi}]")]
    DimG { target: usize, lo: usize, hi: usize },
    #[error("invalid setting: {0}")]
    Setting(String),
    #[error(transparent)]
    Constraint(#[from] ConstraintError),
}

/// Parameters of one random instance.
#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    pub p: u32,
    /// Orbit dimensions `d_1..d_q`.
    pub dims: Vec<usize>,
    /// Exact `dim G`, overriding `max_dim_g`; when `None` it is drawn
    /// uniformly from `[max d_i, min(Σ d_i, max_dim_g)]`.
    pub dim_g: Option<usize>,
    pub max_dim_g: Option<usize>,
    pub k: usize,
    pub sat_bias: f64,
    pub seed: u64,
    pub max_orbit_dim: usize,
    pub extra_gens: usize,
    pub shuffle_points: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            p: 2,
            dims: vec![1],
            dim_g: None,
            max_dim_g: None,
            k: 2,
            sat_bias: 0.5,
            seed: 0,
            max_orbit_dim: DEFAULT_MAX_ORBIT_DIM,
            extra_gens: 1,
            shuffle_points: true,
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<(), GenError> {
        if !is_prime(self.p) {
            return Err(GenError::NotPrime(self.p));
        }
        if self.dims.is_empty() {
            return Err(GenError::Dims("no orbits".into()));
        }
        if let Some(&d) = self
            .dims
            .iter()
            .find(|&&d| d == 0 || d > self.max_orbit_dim)
        {
            return Err(GenError::Dims(format!(
                "{d} not in 1..={}",
                self.max_orbit_dim
            )));
        }
        if !(0.0..=1.0).contains(&self.sat_bias) {
            return Err(GenError::Setting(format!(
                "sat_bias {} not in [0, 1]",
                self.sat_bias
            )));
        }
        if let Some(t) = self.dim_g {
            let lo = self.dims.iter().copied().max().unwrap_or(0);
            let hi = self.dims.iter().sum::<usize>();
            if t < lo || t > hi {
                return Err(GenError::DimG { target: t, lo, hi });
            }
        }
        Ok(())
    }

    fn dim_g_range(&self) -> (usize, usize) {
        let lo = self.dims.iter().copied().max().unwrap_or(0);
        let hi = self.dims.iter().sum::<usize>();
        (lo, self.max_dim_g.map_or(hi, |m| hi.min(m).max(lo)))
    }

    pub fn degree(&self) -> usize {
        self.dims
            .iter()
            .map(|&d| (self.p as usize).pow(d as u32))
            .sum()
    }
}

/// A generated instance with its planted solution, if any.
#[derive(Debug, Clone)]
pub struct Generated {
    pub instance: GcInstance,
    pub witness: Option<Permutation>,
    pub dim_g: usize,
}

fn random_matrix(rng: &mut SplitMix64, field: &PrimeField, rows: usize, cols: usize) -> FpMatrix {
    let data: Vec<Vec<u32>> = (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| rng.random_range(0..field.modulus()))
                .collect()
        })
        .collect();
    FpMatrix::from_rows(field, cols, &data).expect("consistent shape")
}

/// Translation by `shift` on every orbit, as a permutation of the
/// unshuffled layout.
fn translation(p: usize, dims: &[usize], offsets: &[usize], n: usize, shift: &[u32]) -> Vec<usize> {
    let mut images = vec![0; n];
    let mut coord = 0;
    for (i, &d) in dims.iter().enumerate() {
        let size = p.pow(d as u32);
        let s = &shift[coord..coord + d];
        for r in 0..size {
            let mut rest = r;
            let mut out = 0;
            let mut weight = 1;
            for j in (0..d).rev() {
                out += ((rest % p + s[j] as usize) % p) * weight;
                rest /= p;
                weight *= p;
            }
            images[offsets[i] + r] = offsets[i] + out;
        }
        coord += d;
    }
    images
}

pub fn gen_instance(cfg: &GenConfig) -> Result<Generated, GenError> {
    cfg.validate()?;
    let mut rng = SplitMix64::seed_from_u64(cfg.seed);
    let field = PrimeField::new(cfg.p).map_err(|_| GenError::NotPrime(cfg.p))?;
    let p = cfg.p as usize;
    let dims = &cfg.dims;
    let total: usize = dims.iter().sum();
    let (lo, hi) = cfg.dim_g_range();
    let t = cfg.dim_g.unwrap_or_else(|| rng.random_range(lo..=hi));

    let mut offsets = Vec::with_capacity(dims.len());
    let mut n = 0;
    for &d in dims {
        offsets.push(n);
        n += p.pow(d as u32);
    }

    // Columns of `basis` span G inside ⊕ F_p^{d_i}; each orbit projection
    // must be onto so the orbits are exactly the blocks.
    let basis = loop {
        let mut rows: Vec<Vec<u32>> = Vec::with_capacity(total);
        for &d in dims {
            let block = loop {
                let b = random_matrix(&mut rng, &field, d, t);
                if b.rank() == d {
                    break b;
                }
            };
            rows.extend(block.to_rows());
        }
        let m = FpMatrix::from_rows(&field, t, &rows).expect("consistent shape");
        if m.rank() == t {
            break m.transpose().to_rows();
        }
    };

    let mut shifts = basis.clone();
    for _ in 0..cfg.extra_gens {
        let mut v = vec![0; total];
        for b in &basis {
            field.axpy(&mut v, rng.random_range(0..cfg.p), b);
        }
        shifts.push(v);
    }

    let relabel: Vec<usize> = {
        let mut r: Vec<usize> = (0..n).collect();
        if cfg.shuffle_points {
            r.shuffle(&mut rng);
        }
        r
    };
    let to_perm = |images: Vec<usize>| {
        let mut out = vec![0; n];
        for (a, b) in images.into_iter().enumerate() {
            out[relabel[a]] = relabel[b];
        }
        Permutation::from_images(out).expect("conjugate of a permutation")
    };
    let gens: Vec<Permutation> = shifts
        .iter()
        .map(|s| to_perm(translation(p, dims, &offsets, n, s)))
        .collect();

    let planted = rng.random_bool(cfg.sat_bias);
    let witness = planted.then(|| {
        let mut v = vec![0; total];
        for b in &basis {
            field.axpy(&mut v, rng.random_range(0..cfg.p), b);
        }
        to_perm(translation(p, dims, &offsets, n, &v))
    });

    let mut atoms = Vec::with_capacity(n);
    for (i, &d) in dims.iter().enumerate() {
        let size = p.pow(d as u32);
        let take = cfg.k.min(size);
        for r in 0..size {
            let a = relabel[offsets[i] + r];
            let set: Vec<usize> = match &witness {
                Some(g) => {
                    let image = g.apply(a);
                    let image_local = (0..size)
                        .find(|&s| relabel[offsets[i] + s] == image)
                        .expect("image stays in the orbit");
                    let mut chosen = vec![image_local];
                    if take > 0 {
                        for s in sample(&mut rng, size - 1, take - 1) {
                            chosen.push(if s >= image_local { s + 1 } else { s });
                        }
                    }
                    chosen
                }
                None => sample(&mut rng, size, take).into_vec(),
            };
            atoms.push(AtomicConstraint::new(
                a,
                set.into_iter().map(|s| relabel[offsets[i] + s]),
            ));
        }
    }
    let instance = GcInstance::normalize(cfg.p, n, gens, &atoms)?;
    Ok(Generated {
        instance,
        witness,
        dim_g: t,
    })
}

/// Seed of sample `index` in sweep cell `cell`.
pub fn sample_seed(seed: u64, cell: usize, index: usize) -> u64 {
    SplitMix64::seed_from_u64(seed.wrapping_add(((cell as u64) << 32) | index as u64)).next_u64()
}

/// Draws orbit dimensions with `max d_i ≤ dim_g ≤ Σ d_i`: `q` uniform in
/// `1..=max_orbits`, each `d_i` uniform in `1..=max_orbit_dim`, rejecting
/// until the bound holds.
pub fn draw_dims_for_dim_g(
    rng: &mut SplitMix64,
    dim_g: usize,
    max_orbits: usize,
    max_orbit_dim: usize,
) -> Vec<usize> {
    assert!(
        dim_g >= 1 && dim_g <= max_orbits * max_orbit_dim,
        "dim G unreachable"
    );
    loop {
        let q = rng.random_range(1..=max_orbits);
        let dims: Vec<usize> = (0..q)
            .map(|_| rng.random_range(1..=max_orbit_dim))
            .collect();
        if dims.iter().copied().max().unwrap_or(0) <= dim_g && dims.iter().sum::<usize>() >= dim_g {
            return dims;
        }
    }
}

/// Draws orbit dimensions with `Σ p^{d_i} = p^exponent`.
pub fn draw_dims_for_degree(
    rng: &mut SplitMix64,
    p: u32,
    exponent: usize,
    max_orbit_dim: usize,
) -> Vec<usize> {
    let p = p as usize;
    let mut remaining = p.pow(exponent as u32);
    let mut dims = Vec::new();
    while remaining > 0 {
        let mut top = 0;
        while top < max_orbit_dim && p.pow(top as u32 + 1) <= remaining {
            top += 1;
        }
        let d = rng.random_range(1..=top.max(1));
        dims.push(d);
        remaining -= p.pow(d as u32);
    }
    dims
}

/// What a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sweep {
    /// Parameter is `dim G`.
    DimG,
    /// Parameter is `log_p n`.
    Degree,
}

/// Settings of a benchmark sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchSettings {
    pub sweep: Sweep,
    pub values: Vec<usize>,
    pub samples: usize,
    pub p: u32,
    pub k: usize,
    pub sat_bias: f64,
    pub seed: u64,
    pub max_orbits: usize,
    pub max_orbit_dim: usize,
    /// Largest `dim G` for the degree sweep.
    pub max_dim_g: Option<usize>,
    /// Largest group the oracle may enumerate.
    pub oracle_cap: u64,
}

impl Default for BenchSettings {
    fn default() -> Self {
        BenchSettings {
            sweep: Sweep::DimG,
            values: (5..=14).collect(),
            samples: 50,
            p: 2,
            k: 2,
            sat_bias: 0.5,
            seed: 1,
            max_orbits: DEFAULT_MAX_ORBITS,
            max_orbit_dim: DEFAULT_MAX_ORBIT_DIM,
            max_dim_g: None,
            oracle_cap: 1 << 20,
        }
    }
}

fn parse_values(v: &str) -> Result<Vec<usize>, GenError> {
    let bad = || GenError::Setting(format!("bad value list {v:?}"));
    if let Some((a, b)) = v.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b
            .trim_start_matches('=')
            .trim()
            .parse()
            .map_err(|_| bad())?;
        return Ok((a..=b).collect());
    }
    v.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse().map_err(|_| bad()))
        .collect()
}

impl BenchSettings {
    /// Applies one `key=value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), GenError> {
        let bad = || GenError::Setting(format!("bad value {value:?} for {key}"));
        let value = value.trim();
        match key.trim() {
            "sweep" => {
                self.sweep = match value {
                    "dimg" | "dim_g" => Sweep::DimG,
                    "n" | "degree" => Sweep::Degree,
                    _ => return Err(bad()),
                }
            }
            "values" => self.values = parse_values(value)?,
            "samples" => self.samples = value.parse().map_err(|_| bad())?,
            "p" => self.p = value.parse().map_err(|_| bad())?,
            "k" => self.k = value.parse().map_err(|_| bad())?,
            "sat_bias" => self.sat_bias = value.parse().map_err(|_| bad())?,
            "seed" => self.seed = value.parse().map_err(|_| bad())?,
            "max_orbits" => self.max_orbits = value.parse().map_err(|_| bad())?,
            "max_orbit_dim" => self.max_orbit_dim = value.parse().map_err(|_| bad())?,
            "max_dim_g" => self.max_dim_g = Some(value.parse().map_err(|_| bad())?),
            "cap" | "oracle_cap" => self.oracle_cap = value.parse().map_err(|_| bad())?,
            other => return Err(GenError::Setting(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Parses a plain `key=value` file; `#` starts a comment.
    pub fn from_kv(text: &str) -> Result<Self, GenError> {
        let mut s = BenchSettings::default();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| GenError::Setting(format!("expected key=value, got {line:?}")))?;
            s.set(k, v)?;
        }
        Ok(s)
    }

    /// The configurations of every sample, grouped by sweep value.
    pub fn plan(&self) -> Result<Vec<(usize, Vec<GenConfig>)>, GenError> {
        if !is_prime(self.p) {
            return Err(GenError::NotPrime(self.p));
        }
        let mut values = self.values.clone();
        values.sort_unstable();
        values.dedup();
        let mut cells = Vec::with_capacity(values.len());
        for (cell, &value) in values.iter().enumerate() {
            if self.sweep == Sweep::DimG
                && (value == 0 || value > self.max_orbits * self.max_orbit_dim)
            {
                return Err(GenError::DimG {
                    target: value,
                    lo: 1,
                    hi: self.max_orbits * self.max_orbit_dim,
                });
            }
            let configs = (0..self.samples)
                .map(|i| {
                    let seed = sample_seed(self.seed, cell, i);
                    let mut rng = SplitMix64::seed_from_u64(seed);
                    let (dims, dim_g) = match self.sweep {
                        Sweep::DimG => (
                            draw_dims_for_dim_g(
                                &mut rng,
                                value,
                                self.max_orbits,
                                self.max_orbit_dim,
                            ),
                            Some(value),
                        ),
                        Sweep::Degree => (
                            draw_dims_for_degree(&mut rng, self.p, value, self.max_orbit_dim),
                            None,
                        ),
                    };
                    GenConfig {
                        p: self.p,
                        dims,
                        dim_g,
                        max_dim_g: self.max_dim_g,
                        k: self.k,
                        sat_bias: self.sat_bias,
                        seed: rng.next_u64(),
                        max_orbit_dim: self.max_orbit_dim,
                        ..GenConfig::default()
                    }
                })
                .collect();
            cells.push((value, configs));
        }
        Ok(cells)
    }
}

/// Mean and standard deviation as a percentage of the mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stat {
    pub mean: f64,
    pub sd_pct: f64,
}

impl Stat {
    pub fn of(xs: &[f64]) -> Stat {
        let n = xs.len() as f64;
        if xs.is_empty() {
            return Stat {
                mean: 0.0,
                sd_pct: 0.0,
            };
        }
        let sum: f64 = xs.iter().sum();
        let sum_sq: f64 = xs.iter().map(|x| x * x).sum();
        let mean = sum / n;
        let var = if xs.len() > 1 {
            ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        let sd_pct = if mean != 0.0 {
            var.sqrt() / mean * 100.0
        } else {
            0.0
        };
        Stat { mean, sd_pct }
    }
}

/// One line of the benchmark table.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub param: usize,
    pub samples: usize,
    pub n: Stat,
    pub dim_g: Stat,
    pub d: Stat,
    /// Linear pipeline, milliseconds.
    pub t_linear: Stat,
    /// Enumeration oracle, milliseconds; `None` when the cell exceeds the cap.
    pub t_oracle: Option<Stat>,
    /// Samples where the two methods disagreed on satisfiability.
    pub disagreements: usize,
    pub sat: usize,
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// Per-sample measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub n: usize,
    pub dim_g: usize,
    pub d: usize,
    pub t_linear_ms: f64,
    pub t_oracle_ms: Option<f64>,
    pub linear: SolveOutcome,
    pub oracle: Option<SolveOutcome>,
}

/// Times the linear pipeline (frame, `M_G`, `V_O`, linear solve) and, when
/// `p^{dim G} ≤ cap`, the enumeration of `G` over the same frame.
pub fn measure(inst: GcInstance, cap: u64) -> Result<Measurement, SolveError> {
    let n = inst.degree();
    let start = Instant::now();
    let solver = Solver::new(inst)?;
    let linear = solver.solve(Fallback::None, 0)?;
    let t_linear_ms = start.elapsed().as_secs_f64() * 1e3;
    let dim_g = solver.group_dim();
    let within = (solver.frame().p() as u128)
        .checked_pow(dim_g as u32)
        .is_some_and(|s| s <= cap as u128);
    let (oracle, t_oracle_ms) = if within {
        let start = Instant::now();
        let out = solver.solve_enumerate(cap)?;
        (Some(out), Some(start.elapsed().as_secs_f64() * 1e3))
    } else {
        (None, None)
    };
    Ok(Measurement {
        n,
        dim_g,
        d: solver.frame().dim(),
        t_linear_ms,
        t_oracle_ms,
        linear,
        oracle,
    })
}

pub fn bench_run(settings: &BenchSettings) -> Result<Vec<BenchRow>, BenchError> {
    let mut rows = Vec::new();
    for (param, configs) in settings.plan()? {
        let mut ms = Vec::with_capacity(configs.len());
        for cfg in &configs {
            let generated = gen_instance(cfg)?;
            ms.push(measure(generated.instance, settings.oracle_cap)?);
        }
        let col = |f: &dyn Fn(&Measurement) -> f64| Stat::of(&ms.iter().map(f).collect::<Vec<_>>());
        let oracle_times: Option<Vec<f64>> = ms.iter().map(|m| m.t_oracle_ms).collect();
        rows.push(BenchRow {
            param,
            samples: ms.len(),
            n: col(&|m| m.n as f64),
            dim_g: col(&|m| m.dim_g as f64),
            d: col(&|m| m.d as f64),
            t_linear: col(&|m| m.t_linear_ms),
            t_oracle: oracle_times.filter(|v| !v.is_empty()).map(|v| Stat::of(&v)),
            disagreements: ms
                .iter()
                .filter(|m| {
                    m.oracle
                        .as_ref()
                        .is_some_and(|o| o.is_sat() != m.linear.is_sat())
                })
                .count(),
            sat: ms.iter().filter(|m| m.linear.is_sat()).count(),
        });
    }
    rows.sort_by_key(|r| r.param);
    Ok(rows)
}

pub const CSV_HEADER: &str =
    "param,n_mean,n_sd_pct,dimG_mean,dimG_sd_pct,d_mean,d_sd_pct,t1_mean,t1_sd_pct,t2_mean,t2_sd_pct,samples";

/// Renders rows as CSV; capped oracle cells are written as `-`.
pub fn render_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let (t2m, t2s) = match r.t_oracle {
            Some(s) => (format!("{:.4}", s.mean), format!("{:.0}", s.sd_pct)),
            None => ("-".to_string(), "-".to_string()),
        };
        writeln!(
            out,
            "{},{:.1},{:.0},{:.2},{:.0},{:.2},{:.0},{:.4},{:.0},{},{},{}",
            r.param,
            r.n.mean,
            r.n.sd_pct,
            r.dim_g.mean,
            r.dim_g.sd_pct,
            r.d.mean,
            r.d.sd_pct,
            r.t_linear.mean,
            r.t_linear.sd_pct,
            t2m,
            t2s,
            r.samples
        )
        .expect("writing to a String");
    }
    out
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::DEFAULT_CAP;
    use crate::perm::is_elementary_abelian;

    #[test]
    fn smallest_case() {
        for seed in 0..20 {
            let cfg = GenConfig {
                dims: vec![1],
                seed,
                ..GenConfig::default()
            };
            let g = gen_instance(&cfg).unwrap();
            assert_eq!(g.instance.degree(), 2);
            assert_eq!(g.dim_g, 1);
            let t = Permutation::from_cycles(2, &[&[1, 2]]).unwrap();
            assert!(g.instance.gens().iter().all(|h| h.is_identity() || *h == t));
        }
    }

    #[test]
    fn planted_witness_verifies() {
        for seed in 0..30 {
            let cfg = GenConfig {
                dims: vec![3, 2, 4],
                sat_bias: 1.0,
                seed,
                ..GenConfig::default()
            };
            let g = gen_instance(&cfg).unwrap();
            let s = Solver::new(g.instance.clone()).unwrap();
            assert!(s.verify(g.witness.as_ref().unwrap()).is_satisfied());
            assert!(s.solve_linear().unwrap().is_sat());
            assert!(s.solve_enumerate(DEFAULT_CAP).unwrap().is_sat());
        }
    }

    #[test]
    fn deterministic() {
        let cfg = GenConfig {
            p: 3,
            dims: vec![2, 1, 2],
            seed: 7,
            ..GenConfig::default()
        };
        let a = gen_instance(&cfg).unwrap();
        let b = gen_instance(&cfg).unwrap();
        assert_eq!(a.instance, b.instance);
        assert_eq!(a.witness, b.witness);
    }

    #[test]
    fn structure_of_generated_groups() {
        for seed in 0..40 {
            let cfg = GenConfig {
                p: if seed % 2 == 0 { 2 } else { 3 },
                dims: vec![1 + seed as usize % 3, 2, 1],
                seed,
                ..GenConfig::default()
            };
            let g = gen_instance(&cfg).unwrap();
            assert!(is_elementary_abelian(g.instance.gens(), cfg.p).unwrap());
            let s = Solver::new(g.instance).unwrap();
            let (lo, hi) = cfg.dim_g_range();
            assert!(lo <= s.group_dim() && s.group_dim() <= hi);
            assert_eq!(s.group_dim(), g.dim_g);
            let mut orbit_dims: Vec<usize> = s.frame().orbits().iter().map(|o| o.dim()).collect();
            let mut want = cfg.dims.clone();
            orbit_dims.sort();
            want.sort();
            assert_eq!(orbit_dims, want);
        }
    }

    #[test]
    fn rejects_bad_configs() {
        let bad = |cfg: GenConfig| gen_instance(&cfg).is_err();
        assert!(bad(GenConfig {
            dims: vec![],
            ..GenConfig::default()
        }));
        assert!(bad(GenConfig {
            dims: vec![0],
            ..GenConfig::default()
        }));
        assert!(bad(GenConfig {
            dims: vec![11],
            ..GenConfig::default()
        }));
        assert!(bad(GenConfig {
            p: 4,
            ..GenConfig::default()
        }));
        assert!(bad(GenConfig {
            dims: vec![2, 2],
            dim_g: Some(5),
            ..GenConfig::default()
        }));
        assert!(bad(GenConfig {
            dims: vec![3, 2],
            dim_g: Some(2),
            ..GenConfig::default()
        }));
    }

    #[test]
    fn stats() {
        let s = Stat::of(&[2.0, 4.0, 6.0]);
        assert!((s.mean - 4.0).abs() < 1e-12);
        assert!((s.sd_pct - 50.0).abs() < 1e-9);
        assert_eq!(Stat::of(&[3.0]).sd_pct, 0.0);
        assert!((fit_slope(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn empty_plan_gives_header_only() {
        let settings = BenchSettings {
            values: vec![],
            ..BenchSettings::default()
        };
        let rows = bench_run(&settings).unwrap();
        assert_eq!(render_csv(&rows), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn capped_cells_render_dash() {
        let settings = BenchSettings {
            values: vec![3, 12],
            samples: 2,
            oracle_cap: 1 << 10,
            ..BenchSettings::default()
        };
        let rows = bench_run(&settings).unwrap();
        assert!(rows[0].t_oracle.is_some());
        assert!(rows[1].t_oracle.is_none());
        let csv = render_csv(&rows);
        let last = csv.lines().last().unwrap();
        assert!(last.split(',').nth(9) == Some("-"), "{last}");
        assert!(rows.iter().all(|r| r.disagreements == 0));
    }

    #[test]
    fn kv_settings() {
        let s = BenchSettings::from_kv("sweep = n\nvalues = 3..6 # comment\nsamples=4\ncap=1024\n")
            .unwrap();
        assert_eq!(s.sweep, Sweep::Degree);
        assert_eq!(s.values, vec![3, 4, 5, 6]);
        assert_eq!(s.samples, 4);
        assert_eq!(s.oracle_cap, 1024);
        assert!(BenchSettings::from_kv("bogus=1").is_err());
        assert_eq!(parse_values("5,7, 9").unwrap(), vec![5, 7, 9]);
    }

    #[test]
    fn degree_sweep_hits_exact_n() {
        let mut rng = SplitMix64::seed_from_u64(3);
        for e in 1..=12 {
            let dims = draw_dims_for_degree(&mut rng, 2, e, 10);
            assert_eq!(dims.iter().map(|&d| 1usize << d).sum::<usize>(), 1 << e);
        }
    }
}
