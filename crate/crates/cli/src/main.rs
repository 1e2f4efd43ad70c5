use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_rational::BigRational;
use num_traits::FromPrimitive;

use finfree::analytic::saddle;
use finfree::convolution::boxplus;
use finfree::experiments::{
    boxplus_converge, boxplus_rows_to_csv, converge, fmt_f64, parse_grid, parse_n_list,
};
use finfree::io::{read_poly, to_json_string, LoadedPoly, PolyJson};
use finfree::transforms::{finite_R, finite_cumulants_logseries, finite_cumulants_mobius, MOBIUS_CAP};
use finfree::{Error, ReferenceMeasure, Scalar};

/// Largest degree accepted by the rational backend.
const EXACT_DEGREE_GUARD: usize = 200;

#[derive(Parser)]
#[command(name = "finfree", version, about = "Finite free convolution and R-transform toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Finite free additive convolution of two polynomials, written as JSON.
    Convolve {
        p: PathBuf,
        q: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Rational arithmetic throughout.
        #[arg(long)]
        exact: bool,
    },
    /// Finite free cumulants kappa_1..kappa_max_n as CSV.
    Cumulants {
        poly: PathBuf,
        #[arg(long)]
        max_n: Option<usize>,
        /// Cross-check against the set-partition expansion (n <= 12).
        #[arg(long)]
        check: bool,
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Finite R-transform on a grid of s, with the Voiculescu R-transform of
    /// the root distribution when roots are known.
    Rtransform {
        poly: PathBuf,
        #[arg(long, default_value = "0.05:0.5:10")]
        s_grid: String,
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certify the Laplace-mass, kernel and R-sandwich inequalities at one s.
    Bounds {
        poly: PathBuf,
        #[arg(long)]
        s: f64,
        #[arg(long, default_value_t = 64)]
        grid_points: usize,
    },
    /// Rate of R^(N) - R^(∞) along the quantile discretization of a measure.
    Converge {
        #[arg(long)]
        measure: String,
        #[arg(long, default_value = "8,16,32,64,128")]
        n_list: String,
        #[arg(long)]
        s: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Append a runtime_ms column (output is then not reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// Convergence of discretized convolutions to the free convolution.
    BoxplusConverge {
        #[arg(long)]
        mu: String,
        #[arg(long)]
        nu: String,
        #[arg(long, default_value = "16,32,64,128")]
        n_list: String,
        #[arg(long)]
        s_grid: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        timing: bool,
    },
}

/// Exit status for a library error: 2 input, 3 degree mismatch, 4 everything else.
fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Parse(_) | Error::EmptyRoots | Error::DegreeZero | Error::LeadingCoefficient(_) => 2,
        Error::InvalidMeasure(_) => 2,
        Error::DegreeMismatch { .. } => 3,
        _ => 4,
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::Unsupported(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn guard_exact(p: &LoadedPoly) -> Result<(), Error> {
    let n = p.exact.degree();
    if n > EXACT_DEGREE_GUARD {
        return Err(Error::Unsupported(format!(
            "degree {n} exceeds the exact-backend limit {EXACT_DEGREE_GUARD}"
        )));
    }
    Ok(())
}

fn convolve(p: &Path, q: &Path, out: Option<&Path>, exact: bool) -> Result<u8, Error> {
    let (p, q) = (read_poly(p)?, read_poly(q)?);
    let json = if exact {
        guard_exact(&p)?;
        PolyJson::from_exact(&boxplus(&p.exact, &q.exact)?)
    } else {
        PolyJson::from_float(&boxplus(&p.to_float(), &q.to_float())?)
    };
    emit(out, &to_json_string(&json))?;
    Ok(0)
}

fn cumulants(
    path: &Path,
    max_n: Option<usize>,
    check: bool,
    exact: bool,
    out: Option<&Path>,
) -> Result<u8, Error> {
    let p = read_poly(path)?;
    let n = p.exact.degree();
    let max_n = max_n.unwrap_or(n);
    if max_n == 0 || max_n > n {
        return Err(Error::Unsupported(format!(
            "max-n must lie in 1..={n} for a degree-{n} polynomial"
        )));
    }
    let check_upto = max_n.min(MOBIUS_CAP);
    let mut csv = String::from("n,kappa\n");
    let mut agree = true;
    if exact {
        guard_exact(&p)?;
        let kappa = finite_cumulants_logseries(&p.exact);
        for (i, k) in kappa.kappa().iter().take(max_n).enumerate() {
            csv.push_str(&format!("{},{}\n", i + 1, k));
        }
        if check {
            let mobius = finite_cumulants_mobius(&p.exact, check_upto)?;
            agree = mobius.kappa()[..check_upto] == kappa.kappa()[..check_upto];
        }
    } else {
        let fp = p.to_float();
        let kappa = finite_cumulants_logseries(&fp);
        for (i, k) in kappa.kappa().iter().take(max_n).enumerate() {
            csv.push_str(&format!("{},{}\n", i + 1, fmt_f64(*k)));
        }
        if check {
            let mobius = finite_cumulants_mobius(&fp, check_upto)?;
            agree = mobius
                .kappa()
                .iter()
                .zip(kappa.kappa())
                .take(check_upto)
                .all(|(a, b)| (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0));
        }
    }
    emit(out, &csv)?;
    if !agree {
        eprintln!("cumulant check failed: partition expansion disagrees with the log-series route");
        return Ok(1);
    }
    if check {
        eprintln!("cumulant check passed for n <= {check_upto}");
    }
    Ok(0)
}

fn rtransform(path: &Path, grid: &str, exact: bool, out: Option<&Path>) -> Result<u8, Error> {
    let p = read_poly(path)?;
    let grid = parse_grid(grid)?;
    let fp = p.to_float();
    let mut csv = String::from("s,r_finite,r_limit\n");
    for &s in &grid {
        let r = if exact {
            guard_exact(&p)?;
            let sq = BigRational::from_f64(s)
                .ok_or_else(|| Error::Parse(format!("s = {s} is not finite")))?;
            finite_R(&p.exact, &sq)?.to_f64_lossy()
        } else {
            finite_R(&fp, &s)?
        };
        let limit = if p.has_roots {
            saddle(&fp, s).map(|ctx| ctx.voiculescu_r()).unwrap_or(f64::NAN)
        } else {
            f64::NAN
        };
        csv.push_str(&format!("{},{},{}\n", fmt_f64(s), fmt_f64(r), fmt_f64(limit)));
    }
    emit(out, &csv)?;
    Ok(0)
}

fn bounds(path: &Path, s: f64, grid_points: usize) -> Result<u8, Error> {
    let p = read_poly(path)?;
    if !p.has_roots {
        return Err(Error::MissingRoots);
    }
    let ctx = saddle(&p.to_float(), s)?;
    println!(
        "N = {}, s = {}, alpha = {}, x_s = {}, sigma2 = {}",
        ctx.degree(),
        fmt_f64(s),
        fmt_f64(ctx.alpha()),
        fmt_f64(ctx.x_s()),
        fmt_f64(ctx.sigma2())
    );
    let grid = ctx.default_grid(grid_points.max(2));
    let certs = [
        ctx.certify_laplace_mass()?,
        ctx.certify_kernel_inequalities(&grid)?,
        ctx.certify_r_sandwich()?,
    ];
    for c in &certs {
        println!(
            "{:<20} {} lower={} value={} upper={} slack={}",
            c.name,
            if c.holds { "HOLDS " } else { "FAILS " },
            fmt_f64(c.lower),
            fmt_f64(c.value),
            fmt_f64(c.upper),
            fmt_f64(c.slack)
        );
    }
    Ok(if certs.iter().all(|c| c.holds) { 0 } else { 1 })
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Convolve { p, q, out, exact } => convolve(&p, &q, out.as_deref(), exact),
        Command::Cumulants {
            poly,
            max_n,
            check,
            exact,
            out,
        } => cumulants(&poly, max_n, check, exact, out.as_deref()),
        Command::Rtransform {
            poly,
            s_grid,
            exact,
            out,
        } => rtransform(&poly, &s_grid, exact, out.as_deref()),
        Command::Bounds {
            poly,
            s,
            grid_points,
        } => bounds(&poly, s, grid_points),
        Command::Converge {
            measure,
            n_list,
            s,
            out,
            timing,
        } => {
            let mu: ReferenceMeasure = measure.parse()?;
            let report = converge(&mu, &parse_n_list(&n_list)?, s)?;
            emit(out.as_deref(), &report.to_csv(timing))?;
            match report.slope {
                Some(slope) => eprintln!("log-log slope of |delta| (upper half of N): {slope:.4}"),
                None => eprintln!("log-log slope of |delta|: not enough points"),
            }
            let outside = report.rows.iter().filter(|r| !r.within_bounds()).count();
            if outside > 0 {
                eprintln!("{outside} row(s) fall outside the certified envelope");
                return Ok(1);
            }
            Ok(0)
        }
        Command::BoxplusConverge {
            mu,
            nu,
            n_list,
            s_grid,
            out,
            timing,
        } => {
            let (mu, nu): (ReferenceMeasure, ReferenceMeasure) = (mu.parse()?, nu.parse()?);
            let rows = boxplus_converge(&mu, &nu, &parse_n_list(&n_list)?, &parse_grid(&s_grid)?)?;
            emit(out.as_deref(), &boxplus_rows_to_csv(&rows, timing))?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
