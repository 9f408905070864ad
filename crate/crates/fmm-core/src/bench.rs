//! Accuracy experiments: input generators, error measurement, CSV records and the
//! growth-factor tables.

use std::fmt::{self, Write as _};
use std::io::Write;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::growth::{frobenius_product, gamma21, gamma_01inf, gamma_q1inf, kappa_mm, norm23, q0, BoundNorm, BoundParams};
use crate::hm::{catalog, HMRep};
use crate::matrix::MatrixF;
use crate::recursion::{padded_size, reference_multiply, BlockProgram, Recursive, SparseAsopt};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dist {
    Normal,
    Uniform,
    Randsvd,
}

impl Dist {
    fn tag(self) -> u64 {
        match self {
            Dist::Normal => 1,
            Dist::Uniform => 2,
            Dist::Randsvd => 3,
        }
    }
}

impl fmt::Display for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dist::Normal => "normal",
            Dist::Uniform => "uniform",
            Dist::Randsvd => "randsvd",
        })
    }
}

impl FromStr for Dist {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "normal" => Ok(Dist::Normal),
            "uniform" => Ok(Dist::Uniform),
            "randsvd" => Ok(Dist::Randsvd),
            other => Err(Error::UnknownName(other.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenParams {
    /// Condition number of `randsvd` matrices.
    pub cond: f64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams { cond: 1e12 }
    }
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Per-trial stream seed; every algorithm of a trial sees the same inputs.
pub fn stream_seed(master: u64, dist: Dist, n: usize, seed_index: u64) -> u64 {
    [dist.tag(), n as u64, seed_index].into_iter().fold(splitmix(master), |h, v| splitmix(h ^ v))
}

fn haar(n: usize, rng: &mut ChaCha20Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

fn draw(dist: Dist, n: usize, rng: &mut ChaCha20Rng, params: &GenParams) -> Result<MatrixF> {
    let data = match dist {
        Dist::Normal => (0..n * n).map(|_| rng.sample(StandardNormal)).collect(),
        Dist::Uniform => (0..n * n).map(|_| rng.random_range(-1.0..=1.0)).collect(),
        Dist::Randsvd => {
            let (u, v) = (haar(n, rng), haar(n, rng));
            let sigma = |i: usize| if n == 1 { 1.0 } else { params.cond.powf(-(i as f64) / (n - 1) as f64) };
            let d = DMatrix::from_fn(n, n, |i, j| if i == j { sigma(i) } else { 0.0 });
            let m = u * d * v.transpose();
            (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| m[(i, j)]).collect()
        }
    };
    Ok(MatrixF { rows: n, cols: n, data })
}

fn check_gen(n: usize, params: &GenParams) -> Result<()> {
    if n == 0 {
        return Err(Error::Invalid("size must be positive".into()));
    }
    if !(params.cond >= 1.0 && params.cond.is_finite()) {
        return Err(Error::Invalid(format!("condition number {} must be finite and at least 1", params.cond)));
    }
    Ok(())
}

/// One `n×n` matrix: Gaussian, uniform on `[−1, 1]`, or `Q₁·diag(σ)·Q₂ᵀ` with Haar factors
/// and `σᵢ = cond^{−i/(n−1)}`.
pub fn generate(dist: Dist, n: usize, seed: u64, params: &GenParams) -> Result<MatrixF> {
    check_gen(n, params)?;
    draw(dist, n, &mut ChaCha20Rng::seed_from_u64(seed), params)
}

/// The operand pair of one trial, drawn from one stream.
pub fn generate_pair(dist: Dist, n: usize, seed: u64, params: &GenParams) -> Result<(MatrixF, MatrixF)> {
    check_gen(n, params)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    Ok((draw(dist, n, &mut rng, params)?, draw(dist, n, &mut rng, params)?))
}

/// A multiplication method under test.
#[derive(Clone, Debug)]
pub enum Method {
    Conventional,
    Direct { rep: HMRep, run: Recursive },
    Sparse(SparseAsopt),
}

impl Method {
    /// `conventional`, `sparse-asopt`, or a catalog formula name.
    pub fn named(name: &str, cutoff: usize) -> Result<Method> {
        Ok(match name {
            "conventional" => Method::Conventional,
            "sparse-asopt" => Method::Sparse(SparseAsopt::new(cutoff)?),
            other => Method::Direct { rep: catalog(other)?, run: Recursive::new(BlockProgram::named(other)?, cutoff)? },
        })
    }

    pub fn multiply(&self, a: &MatrixF, b: &MatrixF) -> Result<MatrixF> {
        match self {
            Method::Conventional => crate::recursion::conventional_multiply(a, b),
            Method::Direct { run, .. } => run.multiply(a, b),
            Method::Sparse(s) => s.multiply(a, b),
        }
    }

    /// `κ` of the max-norm bound, or `None` where no bound is implemented.
    pub fn kappa(&self, n: usize, cutoff: usize) -> Result<Option<f64>> {
        match self {
            Method::Conventional => Ok(Some((n * n) as f64)),
            Method::Sparse(_) => Ok(None),
            Method::Direct { rep, .. } => {
                if n <= cutoff {
                    return Ok(Some((n * n) as f64));
                }
                let (_, ell) = padded_size(n, cutoff);
                let params = BoundParams { k0: cutoff, ell, ..Default::default() };
                Ok(Some(kappa_mm(rep, &params, BoundNorm::Inf)?.value))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRecord {
    pub alg: String,
    pub dist: Dist,
    pub n: usize,
    pub seed: u64,
    pub cutoff: usize,
    pub err_max: f64,
    /// `κ·max|A|·max|B|·ε`; absent for the alternative-basis method.
    pub bound: Option<f64>,
}

impl BenchRecord {
    pub fn violates_bound(&self) -> bool {
        self.bound.is_some_and(|b| self.err_max > b)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub algs: Vec<String>,
    pub dists: Vec<Dist>,
    pub sizes: Vec<usize>,
    pub seeds: u64,
    pub cutoff: usize,
    pub gen: GenParams,
    pub master_seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            algs: ["conventional", "strassen", "winograd", "powers", "powrot", "asopt", "sparse-asopt"].map(String::from).to_vec(),
            dists: vec![Dist::Normal],
            sizes: vec![32, 64, 128, 256],
            seeds: 11,
            cutoff: 1,
            gen: GenParams::default(),
            master_seed: 0,
        }
    }
}

pub const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;

pub fn max_norm_diff(a: &MatrixF, b: &MatrixF) -> f64 {
    a.data.iter().zip(&b.data).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

/// Every (dist, n, seed, alg) combination, in that nesting order.
pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<BenchRecord>> {
    if cfg.sizes.contains(&0) {
        return Err(Error::Invalid("sizes must be positive".into()));
    }
    let methods = cfg.algs.iter().map(|a| Ok((a.clone(), Method::named(a, cfg.cutoff)?))).collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for &dist in &cfg.dists {
        for &n in &cfg.sizes {
            let kappas = methods.iter().map(|(_, m)| m.kappa(n, cfg.cutoff)).collect::<Result<Vec<_>>>()?;
            for seed in 0..cfg.seeds {
                let (a, b) = generate_pair(dist, n, stream_seed(cfg.master_seed, dist, n, seed), &cfg.gen)?;
                let exact = reference_multiply(&a, &b)?;
                let scale = a.max_abs() * b.max_abs() * UNIT_ROUNDOFF;
                for ((alg, m), kappa) in methods.iter().zip(&kappas) {
                    let c = m.multiply(&a, &b)?;
                    out.push(BenchRecord {
                        alg: alg.clone(),
                        dist,
                        n,
                        seed,
                        cutoff: cfg.cutoff,
                        err_max: max_norm_diff(&c, &exact),
                        bound: kappa.map(|k| k * scale),
                    });
                }
            }
        }
    }
    Ok(out)
}

pub fn write_csv<W: Write>(records: &[BenchRecord], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    let io = |e: csv::Error| Error::Io(e.to_string());
    wr.write_record(["alg", "dist", "n", "seed", "cutoff", "err_max", "bound"]).map_err(io)?;
    for r in records {
        let bound = r.bound.map(|b| format!("{b:e}")).unwrap_or_default();
        wr.write_record([r.alg.clone(), r.dist.to_string(), r.n.to_string(), r.seed.to_string(), r.cutoff.to_string(), format!("{:e}", r.err_max), bound])
            .map_err(io)?;
    }
    wr.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub alg: String,
    pub dist: Dist,
    pub n: usize,
    pub trials: usize,
    pub median_err: f64,
    pub max_err: f64,
    pub violations: usize,
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.is_empty() {
        f64::NAN
    } else if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

/// Medians per (alg, dist, n), in first-appearance order.
pub fn summarize(records: &[BenchRecord]) -> Vec<Summary> {
    let mut keys: Vec<(String, Dist, usize)> = Vec::new();
    for r in records {
        let k = (r.alg.clone(), r.dist, r.n);
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    keys.into_iter()
        .map(|(alg, dist, n)| {
            let group: Vec<&BenchRecord> = records.iter().filter(|r| r.alg == alg && r.dist == dist && r.n == n).collect();
            let errs: Vec<f64> = group.iter().map(|r| r.err_max).collect();
            Summary {
                trials: group.len(),
                median_err: median(&errs),
                max_err: errs.iter().cloned().fold(0.0, f64::max),
                violations: group.iter().filter(|r| r.violates_bound()).count(),
                alg,
                dist,
                n,
            }
        })
        .collect()
}

pub fn write_summary_csv<W: Write>(summary: &[Summary], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    let io = |e: csv::Error| Error::Io(e.to_string());
    wr.write_record(["alg", "dist", "n", "trials", "median_err", "max_err", "violations"]).map_err(io)?;
    for s in summary {
        wr.write_record([
            s.alg.clone(),
            s.dist.to_string(),
            s.n.to_string(),
            s.trials.to_string(),
            format!("{:e}", s.median_err),
            format!("{:e}", s.max_err),
            s.violations.to_string(),
        ])
        .map_err(io)?;
    }
    wr.flush()?;
    Ok(())
}

/// One reproduced table cell.
#[derive(Clone, Debug, PartialEq)]
pub struct TableCell {
    pub alg: &'static str,
    pub quantity: &'static str,
    pub computed: f64,
    pub printed: f64,
    pub tol: f64,
}

impl TableCell {
    pub fn pass(&self) -> bool {
        (self.computed - self.printed).abs() <= self.tol
    }
}

/// Every growth-factor, `Q₀` and norm cell with a printed value.
pub fn table_cells() -> Result<Vec<TableCell>> {
    let (s2, s3, s5) = (2f64.sqrt(), 3f64.sqrt(), 5f64.sqrt());
    type Quantity = (&'static str, fn(&HMRep) -> f64);
    let g21: Quantity = ("gamma_2,1", |r| gamma21(r));
    let g11: Quantity = ("gamma_1,1,inf", |r| gamma_q1inf(r, 1).unwrap_or(f64::NAN));
    let g21i: Quantity = ("gamma_2,1,inf", |r| gamma_q1inf(r, 2).unwrap_or(f64::NAN));
    let g01: Quantity = ("gamma_0,1,inf", |r| gamma_01inf(r));
    let q: Quantity = ("Q0", |r| q0(r) as f64);
    let n23: Quantity = ("norm_2,3", |r| norm23(r));
    let fro: Quantity = ("frobenius", |r| frobenius_product(r));
    let powers_n23 = 125.0 / 32.0 + 4.0 / s2 + 25.0 / (2.0 * s5);
    let rows: Vec<(&'static str, Quantity, f64, f64)> = vec![
        ("winograd", g21, 7.0 + 8.0 / s2 + 9.0 / s3, 1e-3),
        ("strassen", g21, 12.0 + 4.0 / s2, 1e-3),
        ("powers", g21, 75.0 / 8.0 + 4.0 / s2, 1e-3),
        ("powrot", g21, 75.0 / 8.0 + 4.0 / s2, 1e-3),
        ("asopt", g21, 16.0 / s3 + 4.0 / s2, 1e-3),
        ("conventional", g21, 8.0, 1e-3),
        ("approx0695", g21, 12.0695, 5e-4),
        ("approx0661", g21, 12.0661, 5e-4),
        ("winograd", n23, 11.0 + 8.0 / s2 + 9.0 / s3, 1e-3),
        ("strassen", n23, 2.0 + 20.0 / s2, 1e-3),
        ("powers", n23, powers_n23, 1e-3),
        ("powrot", n23, powers_n23, 1e-3),
        ("asopt", n23, 16.0 / s3 + 4.0 / s2, 1e-3),
        ("conventional", n23, 8.0, 1e-3),
        ("winograd", fro, 14f64.powf(1.5), 1e-3),
        ("strassen", fro, 12f64.powf(1.5), 1e-3),
        ("powers", fro, (162.0f64 / 16.0).powf(1.5), 1e-3),
        ("powrot", fro, 10f64.sqrt() * (162.0f64 / 16.0).sqrt() * 810.0 / (80.0 * 10f64.sqrt()), 1e-3),
        ("asopt", fro, 10f64.powf(1.5), 1e-3),
        ("conventional", fro, 8f64.powf(1.5), 1e-3),
        ("winograd", g11, 18.0, 1e-2),
        ("strassen", g11, 12.0, 1e-2),
        ("powers", g11, 13.0, 1e-2),
        ("asopt", g11, 17.48, 1e-2),
        ("winograd", g01, 18.0, 1e-2),
        ("strassen", g01, 12.0, 1e-2),
        ("powers", g01, 40.0, 1e-2),
        ("asopt", g01, 98.54, 1e-2),
        ("winograd", g21i, 8.0, 1e-2),
        ("strassen", g21i, 6.83, 1e-2),
        ("powers", g21i, 6.05, 1e-2),
        ("asopt", g21i, 5.97, 1e-2),
        ("winograd", q, 10.0, 0.0),
        ("strassen", q, 8.0, 0.0),
        ("powers", q, 12.0, 0.0),
        ("asopt", q, 15.0, 0.0),
    ];
    rows.into_iter()
        .map(|(alg, (quantity, f), printed, tol)| Ok(TableCell { alg, quantity, computed: f(&catalog(alg)?), printed, tol }))
        .collect()
}

/// The table cells as aligned text with PASS/FAIL marks.
pub fn report_tables() -> Result<String> {
    let mut s = String::new();
    writeln!(s, "{:<14}{:<16}{:>14}{:>14}{:>10}  status", "alg", "quantity", "computed", "printed", "tol").unwrap();
    for c in table_cells()? {
        let status = if c.pass() { "PASS" } else { "FAIL" };
        writeln!(s, "{:<14}{:<16}{:>14.6}{:>14.6}{:>10.0e}  {status}", c.alg, c.quantity, c.computed, c.printed, c.tol).unwrap();
    }
    Ok(s)
}
