//! Batch command-line front end. Every subcommand prints JSON (or CSV where
//! tabular) on stdout and is deterministic for fixed inputs; validation
//! problems exit with code 2, internal invariant violations with code 3.

use arakelov::fiber::{self, ComponentId, FiberError, FiberParams};
use arakelov::heights::{self, ErrMode, HeightsError, Ledger};
use arakelov::modsym::{self, ModsymError};
use arakelov::rat;
use arakelov::theta::{self, PeriodMatrix, ThetaError};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Parser)]
#[command(
    name = "arakelov",
    version,
    about = "Exact special-fiber intersection theory, height bounds and winding quotients for X0(p)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct LedgerOpt {
    /// Constant-ledger file; falls back to $ARAKELOV_LEDGER, then to the
    /// built-in defaults
    #[arg(long)]
    ledger: Option<PathBuf>,
}

#[derive(Args)]
struct PlaceArgs {
    /// Prime p (> 17)
    #[arg(long)]
    p: u64,
    /// Ramification index of the place above p
    #[arg(long, default_value_t = 1)]
    e: u32,
    /// Residual degree of the place
    #[arg(long, default_value_t = 1)]
    f: u32,
    #[command(flatten)]
    ledger: LedgerOpt,
}

#[derive(Subcommand)]
enum Command {
    /// Describe the special fiber: branches, widths, genus
    Fiber(PlaceArgs),
    /// Intersection matrix on the component basis (units of log #k(v))
    Matrix(PlaceArgs),
    /// Vertical divisor making target − ∞ orthogonal to every component
    Phi {
        #[command(flatten)]
        place: PlaceArgs,
        /// `zero`, `inf`, or interior `branch,position`
        #[arg(long)]
        target: String,
    },
    /// Vertical part of the relative dualizing sheaf, (g−1)·Φ_{C0}
    Omega(PlaceArgs),
    /// Antisymmetrized cuspidal divisor class
    Cusp(PlaceArgs),
    /// Assemble the quadratic-point j-height bound b(p) with full trace
    Bound {
        /// Prime p (> 71)
        #[arg(long)]
        p: u64,
        #[arg(long, value_enum, default_value_t = ErrModeArg::P3)]
        err_mode: ErrModeArg,
        #[command(flatten)]
        ledger: LedgerOpt,
    },
    /// Arithmetic Bézout bound for a proper intersection V ∩ W
    Bezout {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        dv: u32,
        #[arg(long)]
        dw: u32,
        /// Degree of V as `num/den` or an integer
        #[arg(long)]
        deg_v: String,
        #[arg(long)]
        deg_w: String,
        /// Height of V as `num/den` or an integer
        #[arg(long)]
        h_v: String,
        #[arg(long)]
        h_w: String,
        #[arg(long, value_enum, default_value_t = ErrModeArg::P3)]
        err_mode: ErrModeArg,
        #[command(flatten)]
        ledger: LedgerOpt,
    },
    /// Winding-quotient report for one prime
    Winding {
        #[arg(long)]
        p: u64,
        #[command(flatten)]
        ledger: LedgerOpt,
    },
    /// Winding survey over a prime range
    BrumerScan {
        #[arg(long)]
        from: u64,
        #[arg(long)]
        to: u64,
        /// Output format
        #[arg(long, visible_alias = "out", value_enum, default_value_t = FormatArg::Json)]
        format: FormatArg,
        /// Worker threads; rows are emitted in p-order either way
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        ledger: LedgerOpt,
    },
    /// Evaluate the Riemann theta function and its analytic norm
    Theta {
        #[arg(long, default_value_t = 1)]
        genus: usize,
        /// τ entries `re,im` separated by `;` (genus 2: t11;t12;t22)
        #[arg(long)]
        tau: String,
        /// z entries `re,im` separated by `;`
        #[arg(long)]
        z: String,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Integer lattice shift m (entries separated by `;`)
        #[arg(long)]
        shift_m: Option<String>,
        /// Integer lattice shift n (entries separated by `;`)
        #[arg(long)]
        shift_n: Option<String>,
        #[command(flatten)]
        ledger: LedgerOpt,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ErrModeArg {
    P3,
    Autissier,
}

impl From<ErrModeArg> for ErrMode {
    fn from(m: ErrModeArg) -> ErrMode {
        match m {
            ErrModeArg::P3 => ErrMode::P3,
            ErrModeArg::Autissier => ErrMode::Autissier,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

enum CliError {
    Usage(String),
    Internal(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Internal(m) => m,
        }
    }
}

impl From<FiberError> for CliError {
    fn from(e: FiberError) -> Self {
        match e {
            FiberError::NonIntegralMass(_) => CliError::Internal(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<HeightsError> for CliError {
    fn from(e: HeightsError) -> Self {
        match e {
            HeightsError::Fiber(FiberError::NonIntegralMass(_)) => {
                CliError::Internal(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<ModsymError> for CliError {
    fn from(e: ModsymError) -> Self {
        match e {
            ModsymError::Internal(_) => CliError::Internal(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<ThetaError> for CliError {
    fn from(e: ThetaError) -> Self {
        CliError::Usage(e.to_string())
    }
}

/// Resolve the ledger: explicit flag, then $ARAKELOV_LEDGER, then built-in
/// defaults. When defaults are used by a ledger-consuming command, list the
/// placeholder constants on stderr.
fn load_ledger(opt: &LedgerOpt, consumed: bool) -> Result<Ledger, CliError> {
    let path = opt
        .ledger
        .clone()
        .or_else(|| std::env::var_os("ARAKELOV_LEDGER").map(PathBuf::from));
    match path {
        Some(p) => Ledger::from_path(&p).map_err(CliError::from),
        None => {
            let ledger = Ledger::default();
            if consumed {
                eprintln!(
                    "ledger: using built-in defaults; placeholder constants: {}",
                    ledger.placeholders().join(", ")
                );
            }
            Ok(ledger)
        }
    }
}

fn build_fiber(args: &PlaceArgs) -> Result<fiber::SpecialFiber, CliError> {
    let params = FiberParams::new(args.p, args.e, args.f)?;
    Ok(fiber::build_special_fiber(params)?)
}

fn parse_target(s: &str) -> Result<ComponentId, CliError> {
    match s {
        "zero" => Ok(ComponentId::Zero),
        "inf" => Ok(ComponentId::Infinity),
        other => {
            let (n, m) = other.split_once(',').ok_or_else(|| {
                CliError::Usage(format!(
                    "target must be `zero`, `inf` or `branch,position`, got {other:?}"
                ))
            })?;
            let branch = n
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("invalid branch index {n:?}")))?;
            let m = m
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("invalid position {m:?}")))?;
            Ok(ComponentId::Interior { branch, m })
        }
    }
}

fn parse_rational(s: &str) -> Result<rat::Q, CliError> {
    rat::parse_q(s).map_err(CliError::Usage)
}

fn parse_complex_list(s: &str, expect: usize, what: &str) -> Result<Vec<Complex64>, CliError> {
    let parts: Vec<&str> = s.split(';').collect();
    if parts.len() != expect {
        return Err(CliError::Usage(format!(
            "{what}: expected {expect} entries separated by `;`, got {}",
            parts.len()
        )));
    }
    parts
        .iter()
        .map(|p| {
            let (re, im) = p.split_once(',').ok_or_else(|| {
                CliError::Usage(format!("{what}: entries must be `re,im`, got {p:?}"))
            })?;
            let re: f64 = re
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("{what}: bad real part {re:?}")))?;
            let im: f64 = im
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("{what}: bad imaginary part {im:?}")))?;
            Ok(Complex64::new(re, im))
        })
        .collect()
}

fn parse_int_list(s: &str, expect: usize, what: &str) -> Result<Vec<i64>, CliError> {
    let parts: Vec<&str> = s.split(';').collect();
    if parts.len() != expect {
        return Err(CliError::Usage(format!(
            "{what}: expected {expect} integers separated by `;`"
        )));
    }
    parts
        .iter()
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("{what}: bad integer {p:?}")))
        })
        .collect()
}

fn complex_json(z: Complex64) -> serde_json::Value {
    serde_json::json!({ "re": z.re, "im": z.im })
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn run_command(cmd: &Command) -> Result<(), CliError> {
    match cmd {
        Command::Fiber(args) => {
            let _ = load_ledger(&args.ledger, false)?;
            let f = build_fiber(args)?;
            let branches: Vec<serde_json::Value> = f
                .branches
                .iter()
                .map(|b| {
                    serde_json::json!({
                        "index": b.index,
                        "width": b.width,
                        "interior_length": b.interior_len,
                    })
                })
                .collect();
            print_json(&serde_json::json!({
                "p": f.params.p,
                "e": f.params.e,
                "f": f.params.f,
                "branches": branches,
                "s": f.s,
                "genus": f.genus,
                "eichler_mass": rat::format_q(&rat::Q::new(
                    (f.params.p - 1).into(),
                    12.into()
                )),
                "components": f.component_count(),
            }));
        }
        Command::Matrix(args) => {
            let _ = load_ledger(&args.ledger, false)?;
            let f = build_fiber(args)?;
            print_json(&fiber::intersection_matrix(&f).json_value(&f));
        }
        Command::Phi { place, target } => {
            let _ = load_ledger(&place.ledger, false)?;
            let f = build_fiber(place)?;
            let t = parse_target(target)?;
            let div = fiber::solve_vertical_divisor(&f, t)?;
            let check = fiber::closed_form_phi(&f, t)?;
            if div != check {
                return Err(CliError::Internal(
                    "solver and closed form disagree".into(),
                ));
            }
            let mut v = div.json_value(&f);
            v["kind"] = "vertical".into();
            v["target"] = t.json_value();
            print_json(&v);
        }
        Command::Omega(args) => {
            let _ = load_ledger(&args.ledger, false)?;
            let f = build_fiber(args)?;
            let mut v = fiber::phi_omega(&f).json_value(&f);
            v["kind"] = "dualizing".into();
            print_json(&v);
        }
        Command::Cusp(args) => {
            let _ = load_ledger(&args.ledger, false)?;
            let f = build_fiber(args)?;
            let mut v = fiber::cuspidal_divisor_class(&f).json_value(&f);
            v["kind"] = "cuspidal".into();
            print_json(&v);
        }
        Command::Bound { p, err_mode, ledger } => {
            let ledger = load_ledger(ledger, true)?;
            let trace = heights::assemble_b(*p, &ledger, (*err_mode).into())?;
            let v = serde_json::to_value(&trace).expect("serializable");
            print_json(&v);
        }
        Command::Bezout {
            p,
            dv,
            dw,
            deg_v,
            deg_w,
            h_v,
            h_w,
            err_mode,
            ledger,
        } => {
            let ledger = load_ledger(ledger, true)?;
            let deg_v = parse_rational(deg_v)?;
            let deg_w = parse_rational(deg_w)?;
            let h_v = parse_rational(h_v)?;
            let h_w = parse_rational(h_w)?;
            let (main, error) = heights::bezout_parts(
                *p,
                *dv,
                *dw,
                &deg_v,
                &deg_w,
                &h_v,
                &h_w,
                &ledger,
                (*err_mode).into(),
            )?;
            let total = &main + &error;
            print_json(&serde_json::json!({
                "p": p,
                "dv": dv,
                "dw": dw,
                "err_mode": ErrMode::from(*err_mode).to_string(),
                "main": rat::format_q(&main),
                "error": rat::format_q(&error),
                "bound": rat::format_q(&total),
                "bound_f64": rat::q_to_f64(&total),
            }));
        }
        Command::Winding { p, ledger } => {
            let _ = load_ledger(ledger, false)?;
            if *p <= 17 {
                return Err(CliError::Usage(format!(
                    "winding reports are computed for primes > 17, got {p}"
                )));
            }
            let report = modsym::winding_report(*p)?;
            print_json(&serde_json::to_value(&report).expect("serializable"));
        }
        Command::BrumerScan {
            from,
            to,
            format,
            jobs,
            ledger,
        } => {
            let _ = load_ledger(ledger, false)?;
            if *from <= 17 {
                return Err(CliError::Usage(format!(
                    "scan range must start above 17, got {from}"
                )));
            }
            if from > to {
                return Err(CliError::Usage(format!("empty range {from}..{to}")));
            }
            let reports = modsym::brumer_scan_parallel(*from, *to, *jobs)?;
            match format {
                FormatArg::Csv => print!("{}", modsym::reports_to_csv(&reports)),
                FormatArg::Json => {
                    print_json(&serde_json::to_value(&reports).expect("serializable"))
                }
            }
        }
        Command::Theta {
            genus,
            tau,
            z,
            tol,
            shift_m,
            shift_n,
            ledger,
        } => {
            let _ = load_ledger(ledger, false)?;
            let g = *genus;
            let tau_entries = match g {
                1 => parse_complex_list(tau, 1, "tau")?,
                2 => {
                    let t = parse_complex_list(tau, 3, "tau")?;
                    vec![t[0], t[1], t[1], t[2]]
                }
                other => {
                    return Err(CliError::Usage(format!(
                        "genus must be 1 or 2, got {other}"
                    )))
                }
            };
            let pm = PeriodMatrix::new(g, &tau_entries)?;
            let zv = parse_complex_list(z, g, "z")?;
            let value = theta::theta_eval(&pm, &zv, *tol)?;
            let mut out = serde_json::json!({
                "genus": g,
                "value": complex_json(value.value),
                "norm_an": value.norm_an,
                "truncation_radius": value.truncation_radius,
                "error_estimate": value.error_estimate,
            });
            if shift_m.is_some() || shift_n.is_some() {
                let m = match shift_m {
                    Some(s) => parse_int_list(s, g, "shift-m")?,
                    None => vec![0; g],
                };
                let n = match shift_n {
                    Some(s) => parse_int_list(s, g, "shift-n")?,
                    None => vec![0; g],
                };
                let residual = theta::norm_invariance_check(&pm, &zv, &m, &n, *tol)?;
                out["shift_residual"] = residual.into();
            }
            print_json(&out);
        }
    }
    Ok(())
}

pub fn run() -> i32 {
    let cli = Cli::parse();
    match run_command(&cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.code()
        }
    }
}
