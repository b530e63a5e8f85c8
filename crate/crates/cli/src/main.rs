use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde_json::json;
use ss_zeta::crypto::{crypto_exponent, embedding_field_bits, large_prime_factors, verify_exponent};
use ss_zeta::curve::CurveModel;
use ss_zeta::families::{
    representatives, twist_catalogue, verify_appendix, FamilyKind, FamilyTag, RowStatus, PARAM_BUDGET,
};
use ss_zeta::ff::FieldCtx;
use ss_zeta::poly::parse_coeff;
use ss_zeta::scan::{scan, CurveReport, ModelClass};
use ss_zeta::zeta::{is_supersingular, weil_polynomial, WeilCoeffs, ZetaOptions, DEFAULT_BUDGET};
use ss_zeta::Error;

#[derive(Parser, Debug)]
#[command(name = "ss-zeta", version, about = "Zeta functions and twists of supersingular genus-2 curves")]
struct Cli {
    /// Characteristic of the base field.
    #[arg(long, global = true)]
    p: Option<u64>,
    /// Degree of the base field over GF(p).
    #[arg(long, global = true, default_value_t = 1)]
    n: usize,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Point-counting budget (field elements visited); SS_ZETA_BUDGET overrides the default.
    #[arg(long, global = true)]
    budget: Option<u128>,
    /// Seed for the randomized order test.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Supersingularity test.
    SsTest {
        #[arg(long)]
        curve: String,
    },
    /// Weil polynomial by table lookup plus disambiguation.
    Zeta {
        #[arg(long)]
        curve: String,
        /// Resolve ambiguity by counting instead of the order test.
        #[arg(long)]
        count_only: bool,
    },
    /// Cryptographic exponent, from a curve or from (r, s).
    CryptoExp {
        #[arg(long, conflicts_with_all = ["r", "s"])]
        curve: Option<String>,
        #[arg(long, allow_hyphen_values = true, requires = "s")]
        r: Option<i128>,
        #[arg(long, allow_hyphen_values = true, requires = "r")]
        s: Option<i128>,
    },
    /// Twist catalogue of a family member.
    Twists {
        #[arg(long)]
        family: String,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        b: Option<String>,
    },
    /// Verify every instantiable twist-table row.
    VerifyAppendix {
        #[arg(long, value_delimiter = ',', default_value = "3,5,7,11,13,17,19,23")]
        p_list: Vec<u64>,
        #[arg(long, default_value_t = 1_000_000)]
        max_q: u128,
    },
    /// Zeta reports for every supersingular model in a class.
    Scan {
        #[arg(long, default_value = "deg5")]
        class: String,
    },
}

/// Failure with its exit code.
struct Fail {
    code: u8,
    msg: String,
}

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        let code = match e {
            Error::Parse(_) | Error::UnknownFamily(_) | Error::NotPrime(_) | Error::SizeExceeded(_) => 1,
            _ => 2,
        };
        Fail { code, msg: format!("{}: {e}", e.name()) }
    }
}

fn usage(msg: impl Into<String>) -> Fail {
    Fail { code: 1, msg: msg.into() }
}

fn budget(cli: &Cli) -> Result<u128, Fail> {
    if let Some(b) = cli.budget {
        return Ok(b);
    }
    match std::env::var("SS_ZETA_BUDGET") {
        Ok(v) => v.trim().parse().map_err(|_| usage(format!("invalid SS_ZETA_BUDGET {v:?}"))),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn field(cli: &Cli) -> Result<Arc<FieldCtx>, Fail> {
    let p = cli.p.ok_or_else(|| usage("--p is required"))?;
    Ok(FieldCtx::new(p, cli.n)?)
}

fn print_json(v: &impl serde::Serialize) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn zeta_text(r: &CurveReport) -> String {
    let mut out = format!(
        "curve   {}\nweil    {}\n(r, s)  ({}, {})\n|J(k)|  {}\nmethod  {}",
        r.curve, r.weil, r.r, r.s, r.j_order, r.method
    );
    if let Some(sh) = &r.shape {
        out.push_str(&format!("\nshape   {sh}"));
    }
    if let Some(rk) = r.rk2 {
        out.push_str(&format!("\nrk2     {rk}"));
    }
    out
}

fn run(cli: &Cli) -> Result<(), Fail> {
    let opts = ZetaOptions { budget: budget(cli)?, seed: cli.seed, ..ZetaOptions::default() };
    match &cli.cmd {
        Command::SsTest { curve } => {
            let k = field(cli)?;
            let c = CurveModel::parse(&k, curve)?;
            let ss = is_supersingular(&c);
            if cli.json {
                print_json(&json!({ "curve": c.to_string(), "supersingular": ss }));
            } else {
                println!("{}", if ss { "supersingular" } else { "not supersingular" });
            }
            if !ss {
                return Err(Error::NotSupersingular.into());
            }
        }
        Command::Zeta { curve, count_only } => {
            let k = field(cli)?;
            let c = CurveModel::parse(&k, curve)?;
            let z = weil_polynomial(&c, &ZetaOptions { count_only: *count_only, ..opts })?;
            let rep = CurveReport::new(&c, &z);
            if cli.json {
                print_json(&rep);
            } else {
                println!("{}", zeta_text(&rep));
            }
        }
        Command::CryptoExp { curve, r, s } => {
            let k = field(cli)?;
            let w = match (curve, r, s) {
                (Some(c), _, _) => weil_polynomial(&CurveModel::parse(&k, c)?, &opts)?.weil,
                (None, Some(r), Some(s)) => WeilCoeffs::new(*r, *s, k.q()),
                _ => return Err(usage("give --curve or both --r and --s")),
            };
            let c = crypto_exponent(&w, k.p())?;
            let bits = embedding_field_bits(&w, k.p())?;
            let rep = verify_exponent(&w, k.p(), c)?;
            let primes: Vec<String> = large_prime_factors(&w).iter().map(|l| l.to_string()).collect();
            if cli.json {
                print_json(&json!({
                    "r": w.r,
                    "s": w.s,
                    "q": w.q,
                    "c_A": c,
                    "embedding_field_bits": bits,
                    "large_primes": primes,
                    "verified": rep.verified,
                }));
            } else {
                println!("c_A = {c}");
                println!("embedding field bits  {bits}");
                println!("large primes          {}", if primes.is_empty() { "-".into() } else { primes.join(", ") });
                println!("verified              {}", rep.verified);
            }
        }
        Command::Twists { family, a, b } => {
            let k = field(cli)?;
            let kind = FamilyKind::parse(family)?;
            let coeff = |v: &Option<String>| v.as_deref().map(|s| parse_coeff(&k, s)).transpose();
            let (a, b) = (coeff(a)?, coeff(b)?);
            let tag = match (kind, a, b) {
                (FamilyKind::D8, Some(a), _) => FamilyTag::D8 { a },
                (FamilyKind::D12, Some(a), _) => FamilyTag::D12 { a },
                (FamilyKind::Biquadratic, Some(a), Some(b)) => FamilyTag::Biquadratic { a, b },
                _ => match FamilyTag::rigid(kind) {
                    Some(t) => t,
                    None => representatives(kind, &k, PARAM_BUDGET).into_iter().next().ok_or_else(|| {
                        Fail::from(Error::NoParameterFound(format!("supersingular member of {kind}")))
                    })?,
                },
            };
            let cat = twist_catalogue(tag, &k, opts.budget)?;
            if cli.json {
                print_json(&cat);
            } else {
                println!("{} over GF({}^{}), table {}, {} twists", cat.member, cat.p, cat.n, cat.table, cat.entries.len());
                println!("{:<6} {:<4} {:>12} {:>5} {:>4}  model", "row", "sd", "(r, s)", "aut", "cls");
                for e in &cat.entries {
                    let row = format!("{}.{}{}", e.table, e.row, if e.twisted { "'" } else { "" });
                    println!(
                        "{:<6} {:<4} {:>12} {:>5} {:>4}  {}",
                        row,
                        if e.self_dual { "yes" } else { "no" },
                        e.oracle.to_string(),
                        e.aut,
                        e.class,
                        e.model
                    );
                }
                println!("pass: {}", cat.pass);
                for err in &cat.errors {
                    println!("  {err}");
                }
            }
            if !cat.pass {
                return Err(Error::VerificationFailed("catalogue check failed".into()).into());
            }
        }
        Command::VerifyAppendix { p_list, max_q } => {
            let reps = verify_appendix(p_list, *max_q, opts.budget)?;
            let failed = reps.iter().filter(|r| r.status != RowStatus::NoParameter && !r.pass).count();
            if cli.json {
                print_json(&reps);
            } else {
                for r in &reps {
                    let status = match r.status {
                        RowStatus::Verified if r.pass => "ok",
                        RowStatus::Verified => "FAIL",
                        RowStatus::NoParameter => "no-param",
                        RowStatus::Error => "ERROR",
                    };
                    println!(
                        "T{:<2} R{} p={:<2} n={} {:<8} {:<24} {}",
                        r.table, r.row, r.p, r.n, status, r.member, r.label
                    );
                }
                println!("{} rows, {} failed", reps.len(), failed);
            }
            if failed > 0 {
                return Err(Error::VerificationFailed(format!("{failed} rows failed")).into());
            }
        }
        Command::Scan { class } => {
            let k = field(cli)?;
            let class: ModelClass = class.parse()?;
            let reps = scan(&k, class, &opts)?;
            if cli.json {
                print_json(&reps);
            } else {
                for r in &reps {
                    println!("{:>14}  {:<16} {}", format!("({}, {})", r.r, r.s), r.method, r.curve);
                }
                println!("{} supersingular curves", reps.len());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
