use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use fmm_core::bench::{report_tables, run_bench, summarize, write_csv, write_summary_csv, BenchConfig, Dist, GenParams};
use fmm_core::coeff::parse_coeff;
use fmm_core::growth::{growth_report, kappa_mm, lower_bound_const, BoundNorm, BoundParams};
use fmm_core::hm::{catalog, read_hm, to_hm_string, to_hm_string_f64, write_hm, HMRep};
use fmm_core::isotropy::{apply, param_isotropy, param_isotropy_exact, search_rotations, RotationObjective};
use fmm_core::matrix::{MatrixF, MatrixQ};
use fmm_core::orbit::{dyadic_approx_rep, minimize_gamma_orbit, DEFAULT_STARTS, DEFAULT_TOL};
use fmm_core::recursion::{rec_multiply, RecursionConfig};
use fmm_core::slp::{compile_bilinear, cse_optimize, from_matrix_naive, kernel_decompose, sparsify_cob, transpose_slp, Strategy};

/// Fast 2x2-block matrix multiplication laboratory.
#[derive(Parser)]
#[command(name = "fmm", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Isotropy orbit operations.
    Orbit {
        #[command(subcommand)]
        op: OrbitCmd,
    },
    /// Search orthogonal isotropies that sparsify a formula.
    SparsifyRot {
        /// HM file or catalog name.
        formula: String,
        #[arg(long, value_enum, default_value = "canonical")]
        objective: RotObjective,
        #[arg(long, default_value_t = 8)]
        sweeps: usize,
        #[arg(long, default_value_t = 96)]
        steps: usize,
    },
    /// Growth factors, Q0 and norms of a formula.
    Gamma {
        /// HM file or catalog name.
        formula: String,
    },
    /// Forward-error coefficient of an ell-level recursion.
    Bound {
        formula: String,
        #[arg(long, default_value_t = 1)]
        k0: usize,
        #[arg(long)]
        ell: u32,
        #[arg(long, value_enum, default_value = "inf")]
        norm: NormArg,
    },
    /// Minimize the growth factor over the reduced isotropy orbit.
    OptimizeOrbit {
        #[arg(long, default_value_t = DEFAULT_STARTS)]
        starts: usize,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Dyadic rational approximation of the optimal orbit point.
    Approx {
        #[arg(long)]
        order: u32,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Straight-line program generation for a linear map.
    Slp {
        #[arg(value_enum)]
        mode: SlpMode,
        /// Coefficient matrix (optional `rows cols` header), or an HM file for `compile`.
        input: String,
        /// Strategy for `compile`.
        #[arg(long, default_value = "kernel+transpose")]
        strategy: String,
    },
    /// Alternative-basis sparsification: writes the basis change and the sparse core.
    Sparsify {
        formula: String,
        #[arg(short, long, num_args = 2, value_names = ["COB", "SPARSE"], required = true)]
        output: Vec<PathBuf>,
    },
    /// Multiply two matrix files.
    Multiply {
        #[arg(long)]
        alg: String,
        /// Use the alternative basis with the sparse core.
        #[arg(long)]
        sparse: bool,
        #[arg(long, default_value_t = 1)]
        cutoff: usize,
        a: PathBuf,
        b: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Accuracy experiment; writes one CSV row per trial and a medians file.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "conventional,strassen,winograd,powers,powrot,asopt,sparse-asopt")]
        algs: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "normal")]
        dists: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "32,64,128,256")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 11)]
        seeds: u64,
        #[arg(long, default_value_t = 1)]
        cutoff: usize,
        #[arg(long, default_value_t = 1e12)]
        cond: f64,
        #[arg(long, default_value_t = 0)]
        master_seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Recompute the printed growth-factor tables.
    Tables,
}

#[derive(Subcommand)]
enum OrbitCmd {
    /// Apply the isotropy with parameters (rho, xi); exact when both parse as coefficients.
    Apply {
        #[arg(long, allow_hyphen_values = true)]
        rho: String,
        #[arg(long, allow_hyphen_values = true)]
        xi: String,
        formula: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum RotObjective {
    Nnz,
    Canonical,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormArg {
    Inf,
    #[value(name = "2")]
    Two,
}

#[derive(Clone, Copy, ValueEnum)]
enum SlpMode {
    Naive,
    Optimize,
    Kernel,
    Transpose,
    Compile,
}

fn load_rep(arg: &str) -> Result<HMRep> {
    if Path::new(arg).exists() {
        return read_hm(arg).with_context(|| format!("reading {arg}"));
    }
    catalog(arg).with_context(|| format!("`{arg}` is neither a file nor a catalog name"))
}

/// A coefficient matrix, with an optional `rows cols` header line.
fn load_matrix_q(path: &str) -> Result<MatrixQ> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
    let lines: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).collect();
    let header = lines.first().and_then(|l| {
        let t: Vec<&str> = l.split_whitespace().collect();
        match t.as_slice() {
            [r, c] => Some((r.parse::<usize>().ok()?, c.parse::<usize>().ok()?)),
            _ => None,
        }
    });
    let body = match header {
        Some((r, c)) if lines.len() == r + 1 && lines[1..].iter().all(|l| l.split_whitespace().count() == c) => lines[1..].join("\n"),
        _ => lines.join("\n"),
    };
    Ok(MatrixQ::parse(&body)?)
}

fn load_matrix_f(path: &Path) -> Result<MatrixF> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(MatrixF::parse_text(&text)?)
}

fn print_growth(rep: &HMRep) {
    let g = growth_report(rep);
    println!("gamma_2,1      {:.6}", g.gamma21);
    println!("gamma_1,1,inf  {:.6}", g.gamma_11inf);
    println!("gamma_2,1,inf  {:.6}", g.gamma_21inf);
    println!("gamma_0,1,inf  {:.6}", g.gamma_01inf);
    println!("Q0             {}", g.q0);
    println!("norm_2,3       {:.6}", g.norm23);
    println!("frobenius      {:.6}", g.frobenius_product);
    if rep.rank() == 7 {
        println!("lower bound    {:.6}", lower_bound_const());
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Orbit { op: OrbitCmd::Apply { rho, xi, formula, output } } => {
            let rep = load_rep(&formula)?;
            let text = match (parse_coeff(&rho), parse_coeff(&xi)) {
                (Ok(r), Ok(x)) => {
                    let out = apply(&param_isotropy_exact(&r, &x)?, &rep)?;
                    eprintln!("gamma_2,1 = {:.6}", growth_report(&out).gamma21);
                    to_hm_string(&out)
                }
                _ => {
                    let (r, x): (f64, f64) = (rho.parse().context("rho")?, xi.parse().context("xi")?);
                    let out = apply(&param_isotropy(r, x)?, &rep.to_f64())?;
                    eprintln!("gamma_2,1 = {:.6}", fmm_core::growth::gamma21(&out));
                    to_hm_string_f64(&out)
                }
            };
            match output {
                Some(p) => fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?,
                None => print!("{text}"),
            }
        }
        Cmd::SparsifyRot { formula, objective, sweeps, steps } => {
            let rep = load_rep(&formula)?.to_f64();
            let obj = match objective {
                RotObjective::Nnz => RotationObjective::Nnz,
                RotObjective::Canonical => RotationObjective::CanonicalVectors,
            };
            let found = search_rotations(&rep, obj, sweeps, steps);
            println!("# angles {:?} objective {}", found.angles, found.objective);
            print!("{}", to_hm_string_f64(&found.rep));
        }
        Cmd::Gamma { formula } => print_growth(&load_rep(&formula)?),
        Cmd::Bound { formula, k0, ell, norm } => {
            let rep = load_rep(&formula)?;
            let norm = match norm {
                NormArg::Inf => BoundNorm::Inf,
                NormArg::Two => BoundNorm::Two,
            };
            let k = kappa_mm(&rep, &BoundParams { k0, ell, ..Default::default() }, norm)?;
            println!("kappa {} (gamma {:.6}, Q0 {})", k.value, k.gamma, k.q0);
            if k.gamma_below_dim {
                println!("warning: gamma is below the inner dimension");
            }
        }
        Cmd::OptimizeOrbit { starts, tol } => {
            let p = minimize_gamma_orbit(starts, tol)?;
            println!("rho {:.10} xi {:.10} gamma_2,1 {:.10}", p.rho, p.xi, p.gamma);
        }
        Cmd::Approx { order, output } => {
            let rep = dyadic_approx_rep(order)?;
            write_hm(&rep, &output).with_context(|| format!("writing {}", output.display()))?;
            println!("gamma_2,1 {:.6}", growth_report(&rep).gamma21);
        }
        Cmd::Slp { mode, input, strategy } => {
            let prog = match mode {
                SlpMode::Compile => compile_bilinear(&load_rep(&input)?, strategy.parse()?)?,
                SlpMode::Naive => from_matrix_naive(&load_matrix_q(&input)?),
                SlpMode::Optimize => cse_optimize(&load_matrix_q(&input)?),
                SlpMode::Kernel => kernel_decompose(&load_matrix_q(&input)?),
                SlpMode::Transpose => transpose_slp(&cse_optimize(&load_matrix_q(&input)?))?,
            };
            println!("{prog}");
        }
        Cmd::Sparsify { formula, output } => {
            let rep = load_rep(&formula)?;
            let out = sparsify_cob(&rep)?;
            fs::write(&output[0], out.cob.to_text()).with_context(|| format!("writing {}", output[0].display()))?;
            write_hm(&out.sparse, &output[1]).with_context(|| format!("writing {}", output[1].display()))?;
            let adds = compile_bilinear(&out.sparse, Strategy::Naive)?.count().adds;
            println!("core additions {adds}, gamma_2,1 {:.6}, basis nnz {}", growth_report(&out.sparse).gamma21, out.cob.nnz());
        }
        Cmd::Multiply { alg, sparse, cutoff, a, b, output } => {
            let (ma, mb) = (load_matrix_f(&a)?, load_matrix_f(&b)?);
            let mut cfg = RecursionConfig::new(&alg).with_cutoff(cutoff);
            if sparse {
                cfg = cfg.alternative();
            }
            let c = rec_multiply(&ma, &mb, &cfg)?;
            fs::write(&output, c.to_text()).with_context(|| format!("writing {}", output.display()))?;
        }
        Cmd::Bench { algs, dists, sizes, seeds, cutoff, cond, master_seed, output } => {
            let dists = dists.iter().map(|d| d.parse::<Dist>()).collect::<Result<Vec<_>, _>>()?;
            if seeds == 0 {
                bail!("at least one seed is required");
            }
            let cfg = BenchConfig { algs, dists, sizes, seeds, cutoff, gen: GenParams { cond }, master_seed };
            let records = run_bench(&cfg)?;
            write_csv(&records, fs::File::create(&output).with_context(|| format!("creating {}", output.display()))?)?;
            let summary = summarize(&records);
            let stem = output.file_stem().and_then(|s| s.to_str()).unwrap_or("bench");
            let medians = output.with_file_name(format!("{stem}_medians.csv"));
            write_summary_csv(&summary, fs::File::create(&medians).with_context(|| format!("creating {}", medians.display()))?)?;
            write_summary_csv(&summary, std::io::stdout())?;
            let bad: usize = summary.iter().map(|s| s.violations).sum();
            if bad > 0 {
                eprintln!("{bad} trials exceeded their bound");
            }
        }
        Cmd::Tables => print!("{}", report_tables()?),
    }
    Ok(())
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
