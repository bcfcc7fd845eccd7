//! `tower-lab`: classification, lattices, scans, enumerations, special
//! memberships and house estimates for the towers `x_{n+1} = sqrt(nu + x_n)`.
//!
//! Every command prints a JSON report tagged `"schema": "tower-lab/1"`.
//! Exit status: 0 on success, 2 when a precondition fails (bad flags, pair
//! not in Omega at the requested depth, precision cap), 1 on internal errors.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use serde_json::{json, Value};

use towerlab::exact::Rat;
use towerlab::galois::GaloisError;
use towerlab::jr::{self, JrError};
use towerlab::lattice::{self, LatticeError};
use towerlab::omega;
use towerlab::special::{self, SpecialError};
use towerlab::tower::{Pair, Precision, TowerCtx, TowerError, DEFAULT_DIGITS, MAX_DIGITS};

const SCHEMA: &str = "tower-lab/1";
const MAX_DEPTH: usize = 12;

#[derive(Parser, Debug)]
#[command(
    name = "tower-lab",
    version,
    about = "Explore iterated quadratic towers x_{n+1} = sqrt(nu + x_n)"
)]
struct Cli {
    /// Decimal digits for certified real values.
    #[arg(long, global = true, env = "TOWERLAB_PRECISION", default_value_t = DEFAULT_DIGITS)]
    precision: u32,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug, Clone)]
struct PairArgs {
    /// nu (at least 2)
    nu: BigInt,
    /// x0 (nonnegative)
    x0: BigInt,
}

#[derive(clap::Args, Debug, Clone, Copy)]
struct DepthArg {
    /// Verification depth (at most 12).
    #[arg(long, default_value_t = 6)]
    depth: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Omega membership, increasing/decreasing label and thinness.
    Classify {
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        depth: DepthArg,
    },
    /// Subfield lattice as JSON, optionally as Graphviz DOT.
    Lattice {
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        depth: DepthArg,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// The f_n, elliptic-curve and Klein scans.
    Scan {
        #[command(subcommand)]
        kind: ScanKind,
    },
    /// Enumerate Omega^1 or the Sigma1/Sigma2 families.
    Enumerate {
        #[command(subcommand)]
        kind: EnumKind,
    },
    /// Is sqrt2 in K?
    Sqrt2 {
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        depth: DepthArg,
    },
    /// Is x^{2,0}_2 in K? (parameters (b, d) of the set X)
    Xset {
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        depth: DepthArg,
    },
    /// Classify moduli m for 2cos(2pi/m).
    Fermat {
        #[arg(required = true)]
        m: Vec<u64>,
    },
    /// Minimal polynomials of 2cos(2pi/m) against the (2,0) and (2,1) towers.
    Cyclo {
        #[arg(long, default_value_t = 4)]
        max_n: usize,
    },
    /// Houses, JR upper estimate and an optional O_t census.
    Jr {
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        depth: DepthArg,
        /// Write the house trajectory as CSV (n,house,gap).
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Threshold t (a rational such as 6 or 11/2) for the census.
        #[arg(long)]
        census_t: Option<Rat>,
        #[arg(long, default_value_t = 2)]
        census_level: usize,
        #[arg(long, default_value_t = 5)]
        census_bound: i64,
    },
    /// Map the generators of one tower into another.
    Embed {
        source_nu: BigInt,
        source_x0: BigInt,
        target_nu: BigInt,
        target_x0: BigInt,
        /// Source levels to map.
        #[arg(long, default_value_t = 3)]
        source_depth: usize,
        #[command(flatten)]
        depth: DepthArg,
    },
}

#[derive(Subcommand, Debug)]
enum ScanKind {
    /// f_n = (u_{n-1} - x0)(u_n - x0) and whether it is a square.
    Fn {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = omega::DEFAULT_FN_COUNT)]
        count: usize,
    },
    /// Integers |X| <= bound with (X - x0)(X^2 - nu - x0) a square.
    Ec {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = omega::DEFAULT_EC_BOUND)]
        bound: u64,
    },
    /// Galois types of K_{n+2}/K_n for n = 0..=max_n.
    Klein {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = 3)]
        max_n: usize,
    },
}

#[derive(Subcommand, Debug)]
enum EnumKind {
    Omega1 {
        #[arg(long)]
        max_nu: u64,
        #[command(flatten)]
        depth: DepthArg,
    },
    Sigma {
        #[arg(long)]
        max_nu: u64,
        #[command(flatten)]
        depth: DepthArg,
    },
}

enum Failure {
    Precondition(String),
    Internal(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Internal(e)
    }
}

fn tower_failure(e: TowerError) -> Failure {
    match e {
        TowerError::InvalidPair { .. }
        | TowerError::NotTotallyReal { .. }
        | TowerError::PrecisionExhausted { .. }
        | TowerError::LevelOutOfRange { .. } => Failure::Precondition(e.to_string()),
        e => Failure::Internal(e.into()),
    }
}

impl From<TowerError> for Failure {
    fn from(e: TowerError) -> Self {
        tower_failure(e)
    }
}

impl From<LatticeError> for Failure {
    fn from(e: LatticeError) -> Self {
        match e {
            LatticeError::Tower(t) => tower_failure(t),
            LatticeError::Certification { .. } => Failure::Internal(e.into()),
            e => Failure::Precondition(e.to_string()),
        }
    }
}

impl From<SpecialError> for Failure {
    fn from(e: SpecialError) -> Self {
        match e {
            SpecialError::Tower(t) => tower_failure(t),
            e => Failure::Precondition(e.to_string()),
        }
    }
}

impl From<JrError> for Failure {
    fn from(e: JrError) -> Self {
        match e {
            JrError::Tower(t) => tower_failure(t),
            e => Failure::Precondition(e.to_string()),
        }
    }
}

impl From<GaloisError> for Failure {
    fn from(e: GaloisError) -> Self {
        match e {
            GaloisError::Tower(t) => tower_failure(t),
            e => Failure::Precondition(e.to_string()),
        }
    }
}

fn pair(p: &PairArgs) -> Result<Pair, Failure> {
    Ok(Pair::from_big(p.nu.clone(), p.x0.clone())?)
}

fn depth(d: DepthArg) -> Result<usize, Failure> {
    if d.depth == 0 || d.depth > MAX_DEPTH {
        return Err(Failure::Precondition(format!(
            "depth {} is out of range: use 1..={MAX_DEPTH} (degree at most 2^{MAX_DEPTH})",
            d.depth
        )));
    }
    Ok(d.depth)
}

fn to_value<T: serde::Serialize>(v: &T) -> Result<Value, Failure> {
    Ok(serde_json::to_value(v).context("serializing report")?)
}

fn write_file(path: &PathBuf, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(Failure::Internal)
}

fn run(cli: &Cli) -> Result<Value, Failure> {
    let precision = Precision::new(cli.precision).map_err(|_| {
        Failure::Precondition(format!(
            "precision {} is out of range: use 1..={MAX_DIGITS} digits",
            cli.precision
        ))
    })?;
    let (name, body) = match &cli.command {
        Command::Classify { pair: p, depth: d } => {
            let (p, d) = (pair(p)?, depth(*d)?);
            let class = omega::classify_pair_with(&p, d, precision)?;
            let thin = omega::is_thin(&p);
            let mut body = json!({
                "pair": to_value(&p)?,
                "depth": d,
                "class": class.name(),
                "class_detail": to_value(&class)?,
                "increase_criterion": to_value(&omega::increase_sufficient(&p))?,
                "u0_minus_x0": thin.u0_minus_x0.to_string(),
            });
            if class.in_omega() {
                body["thin"] = json!(thin.thin);
                body["a"] = to_value(&thin.a.map(|a| a.to_string()))?;
            }
            ("classify", body)
        }
        Command::Lattice {
            pair: p,
            depth: d,
            dot,
        } => {
            let (p, d) = (pair(p)?, depth(*d)?);
            let graph = lattice::build_lattice(&p, d)?;
            let quads = lattice::quadratic_subfields(&p, d.max(2))?;
            if let Some(path) = dot {
                write_file(path, &lattice::to_dot(&graph))?;
            }
            let mut body = json!({
                "pair": to_value(&p)?,
                "depth": d,
                "lattice": to_value(&graph)?,
                "quadratic_subfields": to_value(&quads)?,
            });
            if p == Pair::new(2, 1).unwrap() && (2..lattice::MAX_21_DEPTH).contains(&d) {
                body["verification"] = to_value(&lattice::verify_21_lattice(d)?)?;
            }
            ("lattice", body)
        }
        Command::Scan { kind } => match kind {
            ScanKind::Fn { pair: p, count } => {
                let p = pair(p)?;
                let scan = omega::fn_scan(&p, (*count).max(1));
                (
                    "scan fn",
                    json!({ "pair": to_value(&p)?, "count": count, "entries": to_value(&scan)? }),
                )
            }
            ScanKind::Ec { pair: p, bound } => {
                let p = pair(p)?;
                let scan = omega::ec_point_scan(&p, (*bound).max(1));
                (
                    "scan ec",
                    json!({ "pair": to_value(&p)?, "scan": to_value(&scan)? }),
                )
            }
            ScanKind::Klein { pair: p, max_n } => {
                let p = pair(p)?;
                let top = max_n + 2;
                if top > MAX_DEPTH {
                    return Err(Failure::Precondition(format!(
                        "max-n {max_n} needs depth {top} > {MAX_DEPTH}"
                    )));
                }
                let ctx = TowerCtx::new(p.clone(), top);
                let scan = omega::klein_witness_scan(&ctx, *max_n)?;
                (
                    "scan klein",
                    json!({ "pair": to_value(&p)?, "max_n": max_n, "steps": to_value(&scan)? }),
                )
            }
        },
        Command::Enumerate { kind } => match kind {
            EnumKind::Omega1 { max_nu, depth: d } => {
                let d = depth(*d)?;
                let recs = omega::enumerate_omega1(*max_nu, d)?;
                (
                    "enumerate omega1",
                    json!({ "max_nu": max_nu, "depth": d, "count": recs.len(), "records": to_value(&recs)? }),
                )
            }
            EnumKind::Sigma { max_nu, depth: d } => {
                let d = depth(*d)?;
                let e = omega::enumerate_sigma12(*max_nu, d)?;
                (
                    "enumerate sigma",
                    json!({ "max_nu": max_nu, "depth": d, "result": to_value(&e)? }),
                )
            }
        },
        Command::Sqrt2 { pair: p, depth: d } => {
            let (p, d) = (pair(p)?, depth(*d)?);
            let r = special::sqrt2_in_k(&p, d)?;
            ("sqrt2", to_value(&r)?)
        }
        Command::Xset { pair: p, depth: d } => {
            let (p, d) = (pair(p)?, depth(*d)?);
            let w = special::x2_20_in_k(&p, d)?;
            (
                "xset",
                json!({ "pair": to_value(&p)?, "in_x": w.is_some(), "witness": to_value(&w)? }),
            )
        }
        Command::Fermat { m } => {
            let r = special::fermat_report(m)?;
            ("fermat", to_value(&r)?)
        }
        Command::Cyclo { max_n } => {
            if *max_n == 0 || *max_n + 1 > MAX_DEPTH {
                return Err(Failure::Precondition(format!(
                    "max-n must be in 1..={}",
                    MAX_DEPTH - 1
                )));
            }
            (
                "cyclo",
                to_value(&special::verify_cyclotomic_towers(*max_n)?)?,
            )
        }
        Command::Jr {
            pair: p,
            depth: d,
            csv,
            census_t,
            census_level,
            census_bound,
        } => {
            let (p, d) = (pair(p)?, depth(*d)?);
            let traj = jr::house_trajectory(&p, d, precision)?;
            if let Some(path) = csv {
                write_file(path, &traj.to_csv(precision.digits))?;
            }
            let estimate = if traj.increasing {
                json!({ "skipped": JrError::Increasing(p.clone()).to_string() })
            } else {
                to_value(&jr::jr_upper_estimate(&p, d, precision)?)?
            };
            let mut body = json!({
                "pair": to_value(&p)?,
                "depth": d,
                "trajectory": to_value(&traj)?,
                "estimate": estimate,
            });
            if let Some(t) = census_t {
                if *census_level > MAX_DEPTH {
                    return Err(Failure::Precondition(format!(
                        "census level must be at most {MAX_DEPTH}"
                    )));
                }
                let c = jr::ot_census(&p, t, *census_level, census_bound.abs(), precision)?;
                body["census"] = to_value(&c)?;
            }
            ("jr", body)
        }
        Command::Embed {
            source_nu,
            source_x0,
            target_nu,
            target_x0,
            source_depth,
            depth: d,
        } => {
            let source = Pair::from_big(source_nu.clone(), source_x0.clone())?;
            let target = Pair::from_big(target_nu.clone(), target_x0.clone())?;
            let d = depth(*d)?;
            let m = depth(DepthArg {
                depth: *source_depth,
            })?;
            (
                "embed",
                to_value(&lattice::embed_chain(&source, &target, m, d)?)?,
            )
        }
    };
    let mut out = json!({ "schema": SCHEMA, "command": name });
    if let (Value::Object(o), Value::Object(b)) = (&mut out, body) {
        o.extend(b);
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(v) => {
            let text = serde_json::to_string_pretty(&v).expect("JSON values serialize") + "\n";
            match &cli.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, text) {
                        eprintln!("error: writing {}: {e}", path.display());
                        return ExitCode::from(1);
                    }
                }
                None => print!("{text}"),
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Precondition(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(e)) => {
            eprintln!("internal error: {e:#}");
            ExitCode::from(1)
        }
    }
}
