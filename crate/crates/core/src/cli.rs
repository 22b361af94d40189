//! Command-line front end: instance files and the `gcsolve` subcommands.
//!
//! Exit codes: 0 SAT (or success), 1 UNSAT, 2 undecided because the
//! constraint is not linear, 64 input error, 74 output error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::constraint::{
    AtomicConstraint, ConstraintError, Fallback, GcInstance, SolveError, SolveOutcome, Solver,
    UnsatReason, Verification, DEFAULT_CAP,
};
use crate::genbench::{self, BenchSettings, GenConfig, Sweep};
use crate::perm::{is_prime, Permutation};
use crate::reduction::{reduce_1in_k, reduce_2cstr, ClauseSet};

pub const EXIT_SAT: i32 = 0;
pub const EXIT_UNSAT: i32 = 1;
pub const EXIT_NOT_LINEAR: i32 = 2;
pub const EXIT_INPUT: i32 = 64;
pub const EXIT_OUTPUT: i32 = 74;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

/// Contents of an instance file. Points are stored 0-based; the file is
/// 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceFile {
    pub p: u32,
    pub n: usize,
    pub gens: Vec<Permutation>,
    pub constraints: Vec<AtomicConstraint>,
}

fn parse_point(tok: &str, n: usize, line: usize) -> Result<usize, ParseError> {
    match tok.parse::<usize>() {
        Ok(v) if (1..=n).contains(&v) => Ok(v - 1),
        _ => Err(ParseError {
            line,
            msg: format!("bad point {tok:?} (expected 1..={n})"),
        }),
    }
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let err = |line: usize, msg: String| ParseError { line, msg };
        let mut seen_magic = false;
        let (mut p, mut n, mut m) = (None, None, None);
        let mut gens = Vec::new();
        let mut constraints = Vec::new();
        let mut last = 0;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            last = line;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, rest) = body.split_once(char::is_whitespace).unwrap_or((body, ""));
            let rest = rest.trim();
            if !seen_magic {
                if key != "gc" || rest != "1" {
                    return Err(err(line, "expected header 'gc 1'".into()));
                }
                seen_magic = true;
                continue;
            }
            let header_value = |name: &str| -> Result<usize, ParseError> {
                rest.parse()
                    .map_err(|_| err(line, format!("bad value {rest:?} for '{name}'")))
            };
            match key {
                "p" | "n" | "m" if !gens.is_empty() || !constraints.is_empty() => {
                    return Err(err(line, format!("'{key}' after body lines")));
                }
                "p" => {
                    let v = header_value("p")?;
                    if v > u32::MAX as usize || !is_prime(v as u32) {
                        return Err(err(line, format!("p = {v} is not prime")));
                    }
                    p = Some(v as u32);
                }
                "n" => n = Some(header_value("n")?),
                "m" => m = Some(header_value("m")?),
                "g" => {
                    let n = n.ok_or_else(|| err(line, "'g' before 'n'".into()))?;
                    let g = Permutation::parse_text(body).map_err(|e| err(line, e.to_string()))?;
                    if g.degree() != n {
                        return Err(err(
                            line,
                            format!("generator has {} images, expected {n}", g.degree()),
                        ));
                    }
                    gens.push(g);
                }
                "c" => {
                    let n = n.ok_or_else(|| err(line, "'c' before 'n'".into()))?;
                    let (lhs, rhs) = rest
                        .split_once(':')
                        .ok_or_else(|| err(line, "expected 'c <point> : <points...>'".into()))?;
                    let point = parse_point(lhs.trim(), n, line)?;
                    let set = rhs
                        .split_whitespace()
                        .map(|t| parse_point(t, n, line))
                        .collect::<Result<Vec<_>, _>>()?;
                    constraints.push(AtomicConstraint::new(point, set));
                }
                other => return Err(err(line, format!("unknown line type {other:?}"))),
            }
        }
        if !seen_magic {
            return Err(err(last.max(1), "missing header 'gc 1'".into()));
        }
        let missing = |name: &str| err(last, format!("missing '{name}' line"));
        let p = p.ok_or_else(|| missing("p"))?;
        let n = n.ok_or_else(|| missing("n"))?;
        let m = m.ok_or_else(|| missing("m"))?;
        if gens.len() != m {
            return Err(err(
                last,
                format!("expected {m} generators, found {}", gens.len()),
            ));
        }
        Ok(InstanceFile {
            p,
            n,
            gens,
            constraints,
        })
    }

    pub fn render(&self) -> String {
        let mut s = format!("gc 1\np {}\nn {}\nm {}\n", self.p, self.n, self.gens.len());
        for g in &self.gens {
            s.push_str(&g.to_text());
            s.push('\n');
        }
        for c in &self.constraints {
            write!(s, "c {} :", c.point + 1).expect("writing to a String");
            for b in &c.set {
                write!(s, " {}", b + 1).expect("writing to a String");
            }
            s.push('\n');
        }
        s
    }

    /// File form of a normalized instance; only points whose set is
    /// smaller than their orbit get a `c` line.
    pub fn from_instance(inst: &GcInstance) -> Self {
        InstanceFile {
            p: inst.p(),
            n: inst.degree(),
            gens: inst.gens().to_vec(),
            constraints: inst.constrained_atoms(),
        }
    }

    pub fn to_instance(&self) -> Result<GcInstance, ConstraintError> {
        GcInstance::normalize(self.p, self.n, self.gens.clone(), &self.constraints)
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "gcsolve",
    version,
    about = "Group constraints over elementary Abelian p-groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FallbackArg {
    Product,
    Enumerate,
    None,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReduceMode {
    K3,
    #[value(name = "2cstr")]
    TwoCstr,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SweepArg {
    Dimg,
    N,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide an instance and print a witness.
    Solve {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "product")]
        fallback: FallbackArg,
        /// Largest number of candidates a fallback may visit.
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
        #[arg(long)]
        json: bool,
    },
    /// Check a candidate given as 1-based images (optionally led by `g`).
    Check {
        file: PathBuf,
        #[arg(long, conflicts_with = "images")]
        witness: Option<PathBuf>,
        images: Vec<String>,
    },
    /// Generate a random instance.
    Gen {
        #[arg(long, default_value_t = 2)]
        p: u32,
        /// Orbit dimensions, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        #[arg(long)]
        dim_g: Option<usize>,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 0.5)]
        sat_bias: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = genbench::DEFAULT_MAX_ORBIT_DIM)]
        max_orbit_dim: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Where to write the planted witness, if one was planted.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Reduce a clause file to an instance.
    Reduce {
        file: PathBuf,
        #[arg(long, value_enum)]
        mode: ReduceMode,
        #[arg(long)]
        p: u32,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run a timing sweep and print CSV.
    Bench {
        /// `key=value` settings file; flags override it.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum)]
        sweep: Option<SweepArg>,
        /// `a..b` or a comma list.
        #[arg(long)]
        values: Option<String>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        p: Option<u32>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        cap: Option<u64>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

struct Failure {
    code: i32,
    msg: String,
}

impl Failure {
    fn input(msg: impl std::fmt::Display) -> Self {
        Failure {
            code: EXIT_INPUT,
            msg: msg.to_string(),
        }
    }

    fn output(msg: impl std::fmt::Display) -> Self {
        Failure {
            code: EXIT_OUTPUT,
            msg: msg.to_string(),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn emit(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<(), Failure> {
    match path {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::output(format!("{}: {e}", path.display()))),
        None => out.write_all(text.as_bytes()).map_err(Failure::output),
    }
}

fn load_instance(path: &Path) -> Result<GcInstance, Failure> {
    let file = InstanceFile::parse(&read(path)?)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    file.to_instance().map_err(Failure::input)
}

fn build_solver(inst: GcInstance) -> Result<Solver, Failure> {
    Solver::new(inst).map_err(Failure::input)
}

fn images_json(g: &Permutation) -> Value {
    Value::from(g.images().iter().map(|b| b + 1).collect::<Vec<_>>())
}

fn render_report(fields: &Map<String, Value>, as_json: bool) -> String {
    if as_json {
        return format!("{}\n", Value::Object(fields.clone()));
    }
    let mut s = String::new();
    for (key, value) in fields {
        match (key.as_str(), value) {
            ("status", Value::String(v)) => writeln!(s, "{v}"),
            ("witness", Value::Array(xs)) => {
                let imgs: Vec<String> = xs.iter().map(Value::to_string).collect();
                writeln!(s, "witness g {}", imgs.join(" "))
            }
            (_, Value::String(v)) => writeln!(s, "{key} {v}"),
            (_, v) => writeln!(s, "{key} {v}"),
        }
        .expect("writing to a String");
    }
    s
}

fn cmd_solve(
    file: &Path,
    fallback: FallbackArg,
    cap: u64,
    as_json: bool,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let inst = load_instance(file)?;
    let start = Instant::now();
    let solver = build_solver(inst)?;
    let t_frame = start.elapsed().as_secs_f64() * 1e3;
    let fallback = match fallback {
        FallbackArg::Product => Fallback::Product,
        FallbackArg::Enumerate => Fallback::Enumerate,
        FallbackArg::None => Fallback::None,
    };
    let start = Instant::now();
    let result = solver.solve(fallback, cap);
    let t_solve = start.elapsed().as_secs_f64() * 1e3;

    let mut f = Map::new();
    let origin = |orbit: usize| solver.frame().orbit(orbit).origin() + 1;
    let code = match result {
        Ok(SolveOutcome::Solution { witness, method }) => {
            f.insert("status".into(), "SAT".into());
            f.insert("method".into(), method.to_string().into());
            f.insert("witness".into(), images_json(&witness));
            EXIT_SAT
        }
        Ok(SolveOutcome::Unsat { reason, method }) => {
            f.insert("status".into(), "UNSAT".into());
            f.insert("method".into(), method.to_string().into());
            let reason = match reason {
                UnsatReason::EmptyOrbitSet { orbit } => {
                    f.insert("orbit".into(), origin(orbit).into());
                    "empty_orbit_set"
                }
                UnsatReason::Inconsistent => "inconsistent",
                UnsatReason::Exhausted => "exhausted",
            };
            f.insert("reason".into(), reason.into());
            EXIT_UNSAT
        }
        Ok(SolveOutcome::NotLinear { orbit, size, dim }) => {
            f.insert("status".into(), "NOTLINEAR".into());
            f.insert("orbit".into(), origin(orbit).into());
            f.insert("vo_size".into(), size.into());
            f.insert("e_dim".into(), dim.map_or(Value::Null, Value::from));
            EXIT_NOT_LINEAR
        }
        Err(SolveError::CapExceeded { needed, cap }) => {
            f.insert("status".into(), "NOTLINEAR".into());
            f.insert("reason".into(), "cap_exceeded".into());
            f.insert("needed".into(), needed.to_string().into());
            f.insert("cap".into(), cap.into());
            EXIT_NOT_LINEAR
        }
        Err(e) => return Err(Failure::input(e)),
    };
    f.insert("time_frame_ms".into(), json!((t_frame * 1e3).round() / 1e3));
    f.insert("time_solve_ms".into(), json!((t_solve * 1e3).round() / 1e3));
    f.insert("dim_g".into(), solver.group_dim().into());
    f.insert("dim_f".into(), solver.frame().dim().into());
    emit(None, &render_report(&f, as_json), out)?;
    Ok(code)
}

fn parse_witness(tokens: &[String]) -> Result<Permutation, Failure> {
    let line = tokens.join(" ");
    let line = line.trim();
    let text = if line.starts_with('g') {
        line.to_string()
    } else {
        format!("g {line}")
    };
    Permutation::parse_text(&text).map_err(|e| Failure::input(format!("witness: {e}")))
}

fn cmd_check(
    file: &Path,
    witness: Option<&Path>,
    images: &[String],
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let inst = load_instance(file)?;
    let tokens: Vec<String> = match witness {
        Some(path) => read(path)?
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .take(1)
            .map(str::to_string)
            .collect(),
        None => images.to_vec(),
    };
    if tokens.is_empty() {
        return Err(Failure::input("no witness given"));
    }
    let g = parse_witness(&tokens)?;
    if g.degree() != inst.degree() {
        return Err(Failure::input(format!(
            "witness has {} images, instance has {} points",
            g.degree(),
            inst.degree()
        )));
    }
    let solver = build_solver(inst)?;
    let v = solver.verify(&g);
    let msg = match &v {
        Verification::Violated { point } => format!("violated at point {}", point + 1),
        other => other.to_string(),
    };
    emit(None, &format!("{msg}\n"), out)?;
    Ok(if v.is_satisfied() { 0 } else { 1 })
}

fn cmd_reduce(
    file: &Path,
    mode: ReduceMode,
    p: u32,
    output: Option<&Path>,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let s = ClauseSet::parse(&read(file)?)
        .map_err(|e| Failure::input(format!("{}: {e}", file.display())))?;
    let inst = match mode {
        ReduceMode::K3 => reduce_1in_k(&s, p),
        ReduceMode::TwoCstr => reduce_2cstr(&s, p),
    }
    .map_err(Failure::input)?;
    emit(output, &InstanceFile::from_instance(&inst).render(), out)?;
    Ok(0)
}

fn run_command(cmd: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match cmd {
        Command::Solve {
            file,
            fallback,
            cap,
            json,
        } => cmd_solve(&file, fallback, cap, json, out),
        Command::Check {
            file,
            witness,
            images,
        } => cmd_check(&file, witness.as_deref(), &images, out),
        Command::Gen {
            p,
            dims,
            dim_g,
            k,
            sat_bias,
            seed,
            max_orbit_dim,
            output,
            witness,
        } => {
            let cfg = GenConfig {
                p,
                dims,
                dim_g,
                k,
                sat_bias,
                seed,
                max_orbit_dim,
                ..GenConfig::default()
            };
            let generated = genbench::gen_instance(&cfg).map_err(Failure::input)?;
            emit(
                output.as_deref(),
                &InstanceFile::from_instance(&generated.instance).render(),
                out,
            )?;
            if let (Some(path), Some(g)) = (witness, &generated.witness) {
                emit(Some(&path), &format!("{}\n", g.to_text()), out)?;
            }
            Ok(0)
        }
        Command::Reduce {
            file,
            mode,
            p,
            output,
        } => cmd_reduce(&file, mode, p, output.as_deref(), out),
        Command::Bench {
            config,
            sweep,
            values,
            samples,
            p,
            k,
            seed,
            cap,
            output,
        } => {
            let mut settings = match config {
                Some(path) => BenchSettings::from_kv(&read(&path)?).map_err(Failure::input)?,
                None => BenchSettings::default(),
            };
            if let Some(s) = sweep {
                settings.sweep = match s {
                    SweepArg::Dimg => Sweep::DimG,
                    SweepArg::N => Sweep::Degree,
                };
            }
            let overrides = [
                ("values", values),
                ("samples", samples.map(|v| v.to_string())),
                ("p", p.map(|v| v.to_string())),
                ("k", k.map(|v| v.to_string())),
                ("seed", seed.map(|v| v.to_string())),
                ("cap", cap.map(|v| v.to_string())),
            ];
            for (key, value) in overrides {
                if let Some(v) = value {
                    settings.set(key, &v).map_err(Failure::input)?;
                }
            }
            let rows = genbench::bench_run(&settings).map_err(Failure::input)?;
            emit(output.as_deref(), &genbench::render_csv(&rows), out)?;
            Ok(0)
        }
    }
}

/// Runs `gcsolve` with `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match run_command(cli.command, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.msg);
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = "gc 1\np 2\nn 8\nm 3\n\
        g 2 1 4 3 6 5 8 7\n\
        g 3 4 1 2 7 8 5 6\n\
        g 2 1 4 3 5 6 7 8\n";

    #[test]
    fn parse_render_round_trip() {
        let text = format!("{EXAMPLE}c 1 : 3\nc 5 : 5 6\nc 2 :\n");
        let f = InstanceFile::parse(&text).unwrap();
        assert_eq!(f.n, 8);
        assert_eq!(f.gens.len(), 3);
        assert_eq!(f.constraints[0], AtomicConstraint::new(0, [2]));
        assert!(f.constraints[2].set.is_empty());
        assert_eq!(f.render(), text);
        assert_eq!(InstanceFile::parse(&f.render()).unwrap(), f);
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = format!("# instance\n\n{EXAMPLE}c 1 : 3  # only 3\n");
        assert_eq!(InstanceFile::parse(&text).unwrap().constraints.len(), 1);
    }

    #[test]
    fn parse_errors_carry_lines() {
        let cases = [
            ("p 2\n", 1),
            ("gc 1\np 4\n", 2),
            ("gc 1\np 2\nn 2\nm 1\ng 1\n", 5),
            ("gc 1\np 2\nn 2\nm 1\ng 2 1\nc 3 : 1\n", 6),
            ("gc 1\np 2\nn 2\nm 1\ng 2 1\nc 1 3\n", 6),
            ("gc 1\np 2\nn 2\nm 2\ng 2 1\n", 5),
            ("gc 1\np 2\nn 2\nm 1\ng 2 1\nx\n", 6),
            ("gc 1\np 2\nm 1\ng 2 1\n", 4),
        ];
        for (text, line) in cases {
            let e = InstanceFile::parse(text).unwrap_err();
            assert_eq!(e.line, line, "{text:?}: {e}");
        }
    }

    #[test]
    fn from_instance_only_writes_proper_constraints() {
        let f = InstanceFile::parse(&format!("{EXAMPLE}c 1 : 3 1 5\n")).unwrap();
        let inst = f.to_instance().unwrap();
        let back = InstanceFile::from_instance(&inst);
        assert_eq!(back.constraints, vec![AtomicConstraint::new(0, [0, 2])]);
        assert_eq!(back.to_instance().unwrap(), inst);
    }

    #[test]
    fn report_keys_match_between_modes() {
        let mut f = Map::new();
        f.insert("status".into(), "SAT".into());
        f.insert("witness".into(), json!([2, 1]));
        f.insert("method".into(), "linear".into());
        let text = render_report(&f, false);
        let parsed: Value = serde_json::from_str(&render_report(&f, true)).unwrap();
        assert_eq!(parsed.as_object().unwrap().len(), text.lines().count());
        assert!(text.contains("witness g 2 1"));
    }
}
