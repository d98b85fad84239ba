use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::{json, Value};

use kummer_pf::algebra::rational::{format_rational, parse_rational};
use kummer_pf::algebra::BigRational;
use kummer_pf::geometry::{lambda_to_pqr, pqrb_to_t, singular_divisor_membership, singular_divisor_membership_complex};
use kummer_pf::gkz::{reduce_to_pqr, reference_kernel_vectors, SubstitutionTable};
use kummer_pf::operator::{annihilation_check, build_canonical_system, gkz_operators};
use kummer_pf::pfaffian::{
    check_integrability, compare_fixture, derive_pfaffian, singular_factor_analysis, Basis, PfaffianFixture,
    PfaffianSystem,
};
use kummer_pf::report::{verify_all, VerifyConfig, DEFAULT_SEED};
use kummer_pf::series::{period_coefficient, period_series, residue_oracle};
use kummer_pf::transport::{monodromy, transport, CMatrix, CompiledOmega, Path, Segment, TransportConfig, DEFAULT_CLEARANCE};

#[derive(Parser)]
#[command(name = "kummer-pf", version, about = "Periods and Picard-Fuchs system of the Kummer family K(p, q, r)")]
struct Cli {
    /// Emit compact JSON instead of indented output.
    #[arg(long, global = true)]
    json: bool,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads; 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Period series coefficients.
    Series {
        #[arg(long, default_value_t = 6)]
        cap: u32,
        /// Single coefficient `l,m,n`.
        #[arg(long, value_parser = parse_index)]
        index: Option<[u32; 3]>,
        /// Compare every coefficient with the residue oracle.
        #[arg(long)]
        oracle: bool,
    },
    /// Apply the five operators to the truncated period series.
    Annihilate {
        #[arg(long, default_value_t = 12)]
        cap: u32,
    },
    /// Reduce the reference GKZ box operators to (p, q, r).
    Gkz {
        #[arg(long)]
        derive: bool,
    },
    #[command(subcommand)]
    Pfaffian(PfaffianCommand),
    #[command(subcommand)]
    Params(ParamsCommand),
    /// Transport a fundamental matrix along a path.
    Transport(TransportArgs),
    /// Run every check and emit a report; exits nonzero iff a hard check fails.
    VerifyAll(VerifyArgs),
}

#[derive(Subcommand)]
enum PfaffianCommand {
    Derive {
        #[arg(long, default_value = "p2")]
        basis: Basis,
        /// Derive from the GKZ operators alone.
        #[arg(long)]
        gkz_only: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact integrability of a stored system.
    Check { file: PathBuf },
    /// Compare a stored system with reference matrices (bundled when omitted).
    Compare { file: PathBuf, reference: Option<PathBuf> },
    /// Irreducible factors of the denominators.
    Singular { file: PathBuf },
}

#[derive(Subcommand)]
enum ParamsCommand {
    /// `(λ1, λ2, λ3) -> (p, q, r)`.
    Lambda { l1: String, l2: String, l3: String },
    /// `(p, q, r, b) -> (t4, t6, t10, t12)`.
    Tmap { p: String, q: String, r: String, b: String },
    /// Membership of a point in each singular divisor.
    Divisors {
        p: String,
        q: String,
        r: String,
        /// Relative threshold for complex points.
        #[arg(long, default_value_t = 1e-12)]
        floor: f64,
    },
}

#[derive(Args)]
struct TransportArgs {
    #[arg(long)]
    path: PathBuf,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long)]
    monodromy: bool,
    /// Stored system; the rank-5 system is derived when omitted.
    #[arg(long)]
    system: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_CLEARANCE)]
    clearance: f64,
}

#[derive(Args)]
struct VerifyArgs {
    /// Annihilation cap.
    #[arg(long, default_value_t = 12)]
    cap: u32,
    #[arg(long, default_value_t = 8)]
    oracle_degree: u32,
    #[arg(long, default_value_t = 100)]
    identity_samples: usize,
    /// Leave out the extra second-order operator.
    #[arg(long)]
    without_extra_operator: bool,
    #[arg(long)]
    skip_transport: bool,
    /// Also write the report to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_index(s: &str) -> Result<[u32; 3], String> {
    let v: Vec<u32> = s
        .split(',')
        .map(|t| t.trim().parse::<u32>().map_err(|e| format!("`{t}`: {e}")))
        .collect::<Result<_, _>>()?;
    v.try_into().map_err(|_| "expected three comma-separated integers".to_string())
}

fn rational(s: &str) -> Result<BigRational, String> {
    parse_rational(s).map_err(|e| format!("`{s}`: {e}"))
}

fn read(path: &PathBuf) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_system(path: &PathBuf) -> Result<PfaffianSystem, String> {
    PfaffianSystem::from_json_str(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

/// Paths are accepted either as a bare segment list or as a full object.
#[derive(Deserialize)]
#[serde(untagged)]
enum PathFile {
    Segments(Vec<Segment>),
    Full(Path),
}

struct Outcome {
    value: Value,
    success: bool,
}

impl From<Value> for Outcome {
    fn from(value: Value) -> Self {
        Self { value, success: true }
    }
}

fn run(cli: &Cli) -> Result<Outcome, String> {
    Ok(match &cli.command {
        Command::Series { cap, index, oracle } => series(*cap, *index, *oracle),
        Command::Annihilate { cap } => {
            let u = period_series(*cap);
            let checks: Vec<Value> = build_canonical_system()
                .operators
                .iter()
                .enumerate()
                .map(|(i, op)| {
                    let c = annihilation_check(op, &u);
                    json!({"operator": i + 1, "checked_through": c.checked_through, "vanishes": c.vanishes})
                })
                .collect();
            let success = checks.iter().all(|c| c["vanishes"] == json!(true));
            Outcome {
                value: json!({"cap": cap, "operators": checks}),
                success,
            }
        }
        Command::Gkz { derive: _ } => {
            let table = SubstitutionTable::kummer();
            let mut all = true;
            let ops: Vec<Value> = reference_kernel_vectors()
                .iter()
                .zip(gkz_operators())
                .map(|(b, expected)| match reduce_to_pqr(b, &table) {
                    Ok(op) => {
                        let eq = op == expected;
                        all &= eq;
                        json!({"kernel_vector": b, "operator": op.to_pretty_string(), "matches_canonical": eq})
                    }
                    Err(e) => {
                        all = false;
                        json!({"kernel_vector": b, "error": e.to_string()})
                    }
                })
                .collect();
            Outcome {
                value: json!({"operators": ops, "all_match": all}),
                success: all,
            }
        }
        Command::Pfaffian(cmd) => pfaffian(cmd)?,
        Command::Params(cmd) => params(cmd)?,
        Command::Transport(args) => transport_cmd(args)?,
        Command::VerifyAll(args) => {
            let cfg = VerifyConfig {
                oracle_max_degree: args.oracle_degree,
                annihilation_cap: args.cap,
                identity_samples: args.identity_samples,
                seed: cli.seed,
                include_extra_operator: !args.without_extra_operator,
                run_transport: !args.skip_transport,
                ..VerifyConfig::default()
            };
            let report = verify_all(&cfg);
            if !cli.json {
                for c in &report.checks {
                    let status = if c.passed { "PASS" } else { "FAIL" };
                    eprintln!("{status} {:<30} {:>8.2}s", c.name, c.seconds);
                }
            }
            let value = serde_json::to_value(&report).map_err(|e| e.to_string())?;
            if let Some(out) = &args.out {
                let text = serde_json::to_string_pretty(&value).map_err(|e| e.to_string())?;
                fs::write(out, text).map_err(|e| format!("{}: {e}", out.display()))?;
            }
            Outcome {
                success: report.all_hard_passed,
                value,
            }
        }
    })
}

fn series(cap: u32, index: Option<[u32; 3]>, oracle: bool) -> Outcome {
    let entry = |e: [u32; 3], c: &BigRational| {
        let mut v = json!({"index": e, "value": format_rational(c)});
        if oracle {
            v["oracle_agrees"] = json!(residue_oracle(e) == *c);
        }
        v
    };
    let entries: Vec<Value> = match index {
        Some(e) => vec![entry(e, &period_coefficient(e))],
        None => period_series(cap).terms().iter().map(|(e, c)| entry(*e, c)).collect(),
    };
    let success = !oracle || entries.iter().all(|v| v["oracle_agrees"] == json!(true));
    Outcome {
        value: Value::Array(entries),
        success,
    }
}

fn pfaffian(cmd: &PfaffianCommand) -> Result<Outcome, String> {
    Ok(match cmd {
        PfaffianCommand::Derive { basis, gkz_only, out } => {
            let ops = if *gkz_only {
                gkz_operators()
            } else {
                build_canonical_system().operators
            };
            let sys = derive_pfaffian(&ops, &basis.monomials()).map_err(|e| e.to_string())?;
            if let Some(out) = out {
                fs::write(out, sys.to_json_string()).map_err(|e| format!("{}: {e}", out.display()))?;
                json!({"basis": sys.basis_names(), "written": out}).into()
            } else {
                sys.to_json().into()
            }
        }
        PfaffianCommand::Check { file } => {
            let rep = check_integrability(&load_system(file)?);
            Outcome {
                success: rep.holds(),
                value: json!({"integrable": rep.holds(), "report": rep}),
            }
        }
        PfaffianCommand::Compare { file, reference } => {
            let fixture = match reference {
                Some(path) => PfaffianFixture::from_json_str(&read(path)?).map_err(|e| e.to_string())?,
                None => PfaffianFixture::bundled(),
            };
            let diff = compare_fixture(&load_system(file)?, &fixture).map_err(|e| e.to_string())?;
            Outcome {
                success: diff.rows_1_to_4_match(),
                value: serde_json::to_value(&diff).map_err(|e| e.to_string())?,
            }
        }
        PfaffianCommand::Singular { file } => {
            let rep = singular_factor_analysis(&load_system(file)?);
            serde_json::to_value(&rep).map_err(|e| e.to_string())?.into()
        }
    })
}

fn complex(s: &str) -> Result<Complex64, String> {
    s.parse::<Complex64>().map_err(|e| format!("`{s}`: {e}"))
}

fn params(cmd: &ParamsCommand) -> Result<Outcome, String> {
    let fmt = |v: &[BigRational]| v.iter().map(format_rational).collect::<Vec<_>>();
    Ok(match cmd {
        ParamsCommand::Lambda { l1, l2, l3 } => {
            let l = [rational(l1)?, rational(l2)?, rational(l3)?];
            let pqr = lambda_to_pqr(&l).map_err(|e| e.to_string())?;
            let [p, q, r] = fmt(&pqr).try_into().expect("three values");
            json!({"p": p, "q": q, "r": r}).into()
        }
        ParamsCommand::Tmap { p, q, r, b } => {
            let w = [rational(p)?, rational(q)?, rational(r)?, rational(b)?];
            let [t4, t6, t10, t12] = fmt(&pqrb_to_t(&w)).try_into().expect("four values");
            json!({"t4": t4, "t6": t6, "t10": t10, "t12": t12}).into()
        }
        ParamsCommand::Divisors { p, q, r, floor } => {
            let exact: Result<Vec<BigRational>, String> = [p, q, r].iter().map(|s| rational(s)).collect();
            let rows = match exact {
                Ok(v) => singular_divisor_membership(&v.try_into().expect("three values")),
                Err(_) => {
                    let z = [complex(p)?, complex(q)?, complex(r)?];
                    singular_divisor_membership_complex(&z, *floor)
                }
            };
            serde_json::to_value(&rows).map_err(|e| e.to_string())?.into()
        }
    })
}

fn transport_cmd(args: &TransportArgs) -> Result<Outcome, String> {
    let path = match serde_json::from_str::<PathFile>(&read(&args.path)?).map_err(|e| e.to_string())? {
        PathFile::Segments(s) => Path::new(s),
        PathFile::Full(p) => p,
    };
    let sys = match &args.system {
        Some(file) => load_system(file)?,
        None => derive_pfaffian(&build_canonical_system().operators, &Basis::P2.monomials()).map_err(|e| e.to_string())?,
    };
    let omega = CompiledOmega::new(&sys);
    let cfg = TransportConfig {
        tol: args.tol,
        clearance: args.clearance,
    };
    let value = if args.monodromy {
        serde_json::to_value(monodromy(&omega, &path, &cfg).map_err(|e| e.to_string())?)
    } else {
        let n = sys.rank();
        serde_json::to_value(transport(&omega, &path, CMatrix::identity(n, n), &cfg).map_err(|e| e.to_string())?)
    };
    Ok(value.map_err(|e| e.to_string())?.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(&cli) {
        Ok(out) => {
            let text = if cli.json {
                serde_json::to_string(&out.value)
            } else {
                serde_json::to_string_pretty(&out.value)
            };
            println!("{}", text.expect("serializable"));
            if out.success {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
