//! Growth factors, Hamming weights, error coefficients and Hölder bounds.

use crate::coeff::Coefficient;
use crate::error::{Error, Result};
use crate::hm::{HMRep, HMRepF};
use crate::matrix::{Matrix, MatrixQ};

/// Per-row statistics of one component (`L`, `R` or `Pt`).
#[derive(Clone, Debug)]
pub struct ComponentStats {
    pub norm1: Vec<f64>,
    pub norm2: Vec<f64>,
    pub nnz: Vec<usize>,
    /// `|entry|` for every entry, row-major.
    pub abs: Matrix<f64>,
    pub max_abs: f64,
    /// Exact-squared Frobenius norm when available, else a float sum.
    pub frob: f64,
}

/// Row statistics of a whole formula.
#[derive(Clone, Debug)]
pub struct RowStats {
    pub l: ComponentStats,
    pub r: ComponentStats,
    pub p: ComponentStats,
}

impl RowStats {
    pub fn rank(&self) -> usize {
        self.l.norm2.len()
    }
}

fn exact_component(m: &MatrixQ) -> ComponentStats {
    let mut norm1 = Vec::with_capacity(m.rows);
    let mut norm2 = Vec::with_capacity(m.rows);
    let mut nnz = Vec::with_capacity(m.rows);
    let mut total = Coefficient::zero();
    for i in 0..m.rows {
        let row = m.row(i);
        let s1 = row.iter().fold(Coefficient::zero(), |acc, c| acc + c.abs());
        let s2 = row.iter().fold(Coefficient::zero(), |acc, c| acc + c.square());
        norm1.push(s1.to_f64());
        norm2.push(s2.to_f64().sqrt());
        nnz.push(row.iter().filter(|c| !c.is_zero()).count());
        total = total + s2;
    }
    let max_abs = m.data.iter().map(|c| c.abs()).max().unwrap_or_default().to_f64();
    ComponentStats { norm1, norm2, nnz, abs: m.map(|c| c.abs().to_f64()), max_abs, frob: total.to_f64().sqrt() }
}

fn float_component(m: &Matrix<f64>, zero_tol: f64) -> ComponentStats {
    let mut norm1 = Vec::new();
    let mut norm2 = Vec::new();
    let mut nnz = Vec::new();
    for i in 0..m.rows {
        let row = m.row(i);
        norm1.push(row.iter().map(|x| x.abs()).sum());
        norm2.push(row.iter().map(|x| x * x).sum::<f64>().sqrt());
        nnz.push(row.iter().filter(|x| x.abs() > zero_tol).count());
    }
    let frob = m.data.iter().map(|x| x * x).sum::<f64>().sqrt();
    ComponentStats { norm1, norm2, nnz, abs: m.map(|x| x.abs()), max_abs: m.max_abs(), frob }
}

/// Formulas whose row statistics the growth routines can read.
pub trait GrowthSource {
    fn stats(&self) -> RowStats;
}

impl GrowthSource for HMRep {
    fn stats(&self) -> RowStats {
        RowStats { l: exact_component(&self.l), r: exact_component(&self.r), p: exact_component(&self.pt) }
    }
}

impl GrowthSource for HMRepF {
    fn stats(&self) -> RowStats {
        let t = 1e-12;
        RowStats { l: float_component(&self.l, t), r: float_component(&self.r, t), p: float_component(&self.pt, t) }
    }
}

impl GrowthSource for RowStats {
    fn stats(&self) -> RowStats {
        self.clone()
    }
}

/// `Σᵢ ‖Lᵢ‖₂‖Rᵢ‖₂‖Pᵢ‖₂`.
pub fn gamma21(rep: &impl GrowthSource) -> f64 {
    let s = rep.stats();
    (0..s.rank()).map(|i| s.l.norm2[i] * s.r.norm2[i] * s.p.norm2[i]).sum()
}

/// `maxₖ Σᵢ ‖Lᵢ‖_q‖Rᵢ‖_q|p_{ik}|` for `q ∈ {1, 2}`.
pub fn gamma_q1inf(rep: &impl GrowthSource, q: u32) -> Result<f64> {
    let s = rep.stats();
    let (nl, nr) = match q {
        1 => (&s.l.norm1, &s.r.norm1),
        2 => (&s.l.norm2, &s.r.norm2),
        _ => return Err(Error::Invalid(format!("q must be 1 or 2, got {q}"))),
    };
    Ok((0..s.p.abs.cols)
        .map(|k| (0..s.rank()).map(|i| nl[i] * nr[i] * s.p.abs.get(i, k)).sum::<f64>())
        .fold(0.0, f64::max))
}

/// `(maxₖ Σᵢ ‖Lᵢ‖₀‖Rᵢ‖₀·[p_{ik} ≠ 0]) · maxabs(L)·maxabs(R)·maxabs(P)`.
pub fn gamma_01inf(rep: &impl GrowthSource) -> f64 {
    let s = rep.stats();
    let weight = (0..s.p.abs.cols)
        .map(|k| {
            (0..s.rank())
                .filter(|&i| *s.p.abs.get(i, k) != 0.0)
                .map(|i| (s.l.nnz[i] * s.r.nnz[i]) as f64)
                .sum::<f64>()
        })
        .fold(0.0, f64::max);
    weight * s.l.max_abs * s.r.max_abs * s.p.max_abs
}

/// `maxⱼ (‖(Pᵀ)ⱼ‖₀ + maxᵢ (‖Lᵢ‖₀+‖Rᵢ‖₀)·[p_{ij} ≠ 0])`.
pub fn q0(rep: &impl GrowthSource) -> usize {
    let s = rep.stats();
    (0..s.p.abs.cols)
        .map(|j| {
            let contributing: Vec<usize> = (0..s.rank()).filter(|&i| *s.p.abs.get(i, j) != 0.0).collect();
            let inner = contributing.iter().map(|&i| s.l.nnz[i] + s.r.nnz[i]).max().unwrap_or(0);
            contributing.len() + inner
        })
        .max()
        .unwrap_or(0)
}

/// `∏_M (Σᵢ ‖Mᵢ‖₂³)^{1/3}`.
pub fn norm23(rep: &impl GrowthSource) -> f64 {
    let s = rep.stats();
    [&s.l, &s.r, &s.p].iter().map(|c| c.norm2.iter().map(|x| x.powi(3)).sum::<f64>().cbrt()).product()
}

/// `‖L‖_F·‖R‖_F·‖P‖_F`.
pub fn frobenius_product(rep: &impl GrowthSource) -> f64 {
    let s = rep.stats();
    s.l.frob * s.r.frob * s.p.frob
}

/// `ln((Σᵢ vᵢᵖ)^{1/p}) = (ln r + A)/p`; returns `(ln r, A)` with `A` free of cancellation.
fn outer_norm_log_parts(v: &[f64], p: f64) -> (f64, f64) {
    let r = v.len() as f64;
    let mean = v.iter().map(|x| (p * x.ln()).exp_m1()).sum::<f64>() / r;
    (r.ln(), mean.ln_1p())
}

fn outer_norm_log(v: &[f64], p: f64) -> f64 {
    let (lr, a) = outer_norm_log_parts(v, p);
    (lr + a) / p
}

/// `max{ r^{1+3z}‖H‖_{2,−1/z} ; ‖L‖_{2,−1/y}‖R‖_{2,−1/z}‖P‖_{2,1/(1+y+z)} }`, in log space.
pub fn holder_lower(rep: &impl GrowthSource, y: f64, z: f64) -> Result<f64> {
    if !(y > 0.0 && z > 0.0) {
        return Err(Error::Invalid("y and z must be positive".into()));
    }
    let s = rep.stats();
    if [&s.l, &s.r, &s.p].iter().any(|c| c.norm2.iter().any(|&x| x == 0.0)) {
        return Err(Error::Degenerate("zero row in a negative-exponent norm".into()));
    }
    let pz = -1.0 / z;
    let (lr, _) = outer_norm_log_parts(&s.l.norm2, pz);
    let tail: f64 = [&s.l, &s.r, &s.p].iter().map(|c| outer_norm_log_parts(&c.norm2, pz).1).sum();
    // (1+3z)·ln r + Σ (ln r + A)/(−1/z) collapses to ln r − z·ΣA
    let first = (lr - z * tail).exp();
    let second = (outer_norm_log(&s.l.norm2, -1.0 / y)
        + outer_norm_log(&s.r.norm2, pz)
        + outer_norm_log(&s.p.norm2, 1.0 / (1.0 + y + z)))
    .exp();
    Ok(first.max(second))
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthReport {
    pub gamma21: f64,
    pub gamma_11inf: f64,
    pub gamma_21inf: f64,
    pub gamma_01inf: f64,
    pub q0: usize,
    pub norm23: f64,
    pub frobenius_product: f64,
}

pub fn growth_report(rep: &impl GrowthSource) -> GrowthReport {
    let s = rep.stats();
    GrowthReport {
        gamma21: gamma21(&s),
        gamma_11inf: gamma_q1inf(&s, 1).unwrap(),
        gamma_21inf: gamma_q1inf(&s, 2).unwrap(),
        gamma_01inf: gamma_01inf(&s),
        q0: q0(&s),
        norm23: norm23(&s),
        frobenius_product: frobenius_product(&s),
    }
}

/// `ζ(z) = (2^{−1/(2z)} + 6·3^{1/(2z)}·2^{−1/z})^{−z}`.
pub fn zeta(z: f64) -> f64 {
    (-z * zeta_log_base(z)).exp()
}

/// `ln(2^{−1/(2z)} + 6·3^{1/(2z)}·2^{−1/z})`, evaluated without cancellation.
fn zeta_log_base(z: f64) -> f64 {
    let (l2, l3) = (2f64.ln(), 3f64.ln());
    let excess = (-l2 / (2.0 * z)).exp_m1() + 6.0 * (l3 / (2.0 * z) - l2 / z).exp_m1();
    7f64.ln() + (excess / 7.0).ln_1p()
}

/// `7^{1+3z}·ζ(z)³`, computed in log space.
pub fn seven_rank_bound(z: f64) -> f64 {
    let log7 = 7f64.ln();
    let excess = zeta_log_base(z) - log7;
    (log7 - 3.0 * z * excess).exp()
}

/// `(28/9)·2^{11/14}·3^{5/7}`.
pub fn lower_bound_const() -> f64 {
    28.0 / 9.0 * 2f64.powf(11.0 / 14.0) * 3f64.powf(5.0 / 7.0)
}

/// Which γ enters the matrix-multiplication error coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BoundNorm {
    /// `γ_{1,1,∞}`, max-norm bound.
    #[default]
    Inf,
    /// `γ_{2,1,∞}`.
    Two,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundParams {
    pub k0: usize,
    pub ell: u32,
    pub g0: usize,
    pub gamma0: f64,
    pub eps: f64,
}

impl Default for BoundParams {
    fn default() -> Self {
        BoundParams { k0: 1, ell: 0, g0: 1, gamma0: 1.0, eps: f64::EPSILON / 2.0 }
    }
}

impl BoundParams {
    pub fn validate(&self) -> Result<()> {
        if self.k0 == 0 || self.g0 == 0 || !(self.eps > 0.0) {
            return Err(Error::Invalid("k0, g0 must be ≥ 1 and eps > 0".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Kappa {
    pub value: f64,
    pub gamma: f64,
    pub q0: usize,
    /// Set when `γ < k`, outside the regime the coefficient is meant for.
    pub gamma_below_dim: bool,
}

/// Closed form `γ^ℓ(k₀² + Q₀k₀γ/(γ−k)) − Q₀Kγ/(γ−k)` with `K = k₀kˡ`.
pub fn kappa_mm_closed(gamma: f64, q0: usize, k: usize, k0: usize, ell: u32) -> Result<f64> {
    let kf = k as f64;
    if gamma == kf {
        return Err(Error::Degenerate(format!("γ equals the inner dimension {k}")));
    }
    let q = q0 as f64;
    let k0f = k0 as f64;
    let big_k = k0f * kf.powi(ell as i32);
    let frac = gamma / (gamma - kf);
    Ok(gamma.powi(ell as i32) * (k0f * k0f + q * k0f * frac) - q * big_k * frac)
}

/// Closed form `γ^ℓ·γ₀·(1 + (1+ℓ)Q₀)`.
pub fn kappa_op_closed(gamma: f64, q0: usize, gamma0: f64, ell: u32) -> f64 {
    gamma.powi(ell as i32) * gamma0 * (1.0 + (1.0 + ell as f64) * q0 as f64)
}

fn bound_gamma(rep: &impl GrowthSource, norm: BoundNorm) -> f64 {
    match norm {
        BoundNorm::Inf => gamma_q1inf(rep, 1).unwrap(),
        BoundNorm::Two => gamma_q1inf(rep, 2).unwrap(),
    }
}

/// Forward-error coefficient of an `ℓ`-level recursion of a matrix product formula.
pub fn kappa_mm(rep: &HMRep, params: &BoundParams, norm: BoundNorm) -> Result<Kappa> {
    params.validate()?;
    let s = rep.stats();
    let gamma = bound_gamma(&s, norm);
    let q = q0(&s);
    let value = kappa_mm_closed(gamma, q, rep.k, params.k0, params.ell)?;
    Ok(Kappa { value, gamma, q0: q, gamma_below_dim: gamma < rep.k as f64 })
}

/// Forward-error coefficient of an `ℓ`-level recursion of a general bilinear operator.
pub fn kappa_op(rep: &HMRep, params: &BoundParams, norm: BoundNorm) -> Result<Kappa> {
    params.validate()?;
    if rep.k <= 1 {
        return Err(Error::Invalid("operator dimension must exceed 1".into()));
    }
    let s = rep.stats();
    let gamma = bound_gamma(&s, norm);
    let q = q0(&s);
    Ok(Kappa { value: kappa_op_closed(gamma, q, params.gamma0, params.ell), gamma, q0: q, gamma_below_dim: false })
}
