//! Growth-factor minimization along the `(ρ, ξ)` orbit of Strassen's formula,
//! the Frobenius objective, and dyadic rational approximations of the optimum.

use nalgebra::{Matrix4, SymmetricEigen, Vector4};

use crate::coeff::{Coefficient, Rational};
use crate::error::{Error, Result};
use crate::growth::gamma21;
use crate::hm::{catalog, HMRep};
use crate::isotropy::{apply, param_isotropy_exact};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrbitPoint {
    pub rho: f64,
    pub xi: f64,
    pub gamma: f64,
}

/// `2√2 + 3·((1+x)²+r)((x−1)²+r)/(r√r)` with `r = 4/ρ⁴`, `x = 2ξ+1`.
pub fn gamma_on_orbit(rho: f64, xi: f64) -> Result<f64> {
    if rho <= 0.0 {
        return Err(Error::Invalid(format!("rho must be positive, got {rho}")));
    }
    let r = 4.0 / rho.powi(4);
    let x = 2.0 * xi + 1.0;
    let area = ((1.0 + x).powi(2) + r) * ((x - 1.0).powi(2) + r) / (r * r.sqrt());
    Ok(2.0 * 2f64.sqrt() + 3.0 * area)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

/// Nelder–Mead simplex search, stopped when the simplex diameter drops below `tol`.
pub fn nelder_mead(f: impl Fn(&[f64]) -> f64, start: &[f64], step: f64, tol: f64, max_iter: usize) -> Minimum {
    let n = start.len();
    let mut simplex: Vec<Vec<f64>> = vec![start.to_vec()];
    for i in 0..n {
        let mut p = start.to_vec();
        p[i] += step;
        simplex.push(p);
    }
    let mut vals: Vec<f64> = simplex.iter().map(|p| f(p)).collect();
    let mut iterations = 0;
    while iterations < max_iter {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();
        let diameter = simplex[1..]
            .iter()
            .map(|p| p.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if diameter < tol {
            break;
        }
        iterations += 1;
        let centroid: Vec<f64> = (0..n).map(|j| simplex[..n].iter().map(|p| p[j]).sum::<f64>() / n as f64).collect();
        let along = |t: f64| -> Vec<f64> { (0..n).map(|j| centroid[j] + t * (simplex[n][j] - centroid[j])).collect() };
        let xr = along(-1.0);
        let fr = f(&xr);
        if fr < vals[0] {
            let xe = along(-2.0);
            let fe = f(&xe);
            if fe < fr {
                (simplex[n], vals[n]) = (xe, fe);
            } else {
                (simplex[n], vals[n]) = (xr, fr);
            }
        } else if fr < vals[n - 1] {
            (simplex[n], vals[n]) = (xr, fr);
        } else {
            let (xc, fc) = if fr < vals[n] {
                let p = along(-0.5);
                let v = f(&p);
                (p, v)
            } else {
                let p = along(0.5);
                let v = f(&p);
                (p, v)
            };
            if fc < vals[n].min(fr) {
                (simplex[n], vals[n]) = (xc, fc);
            } else {
                let best = simplex[0].clone();
                for i in 1..=n {
                    simplex[i] = simplex[i].iter().zip(&best).map(|(a, b)| b + 0.5 * (a - b)).collect();
                    vals[i] = f(&simplex[i]);
                }
            }
        }
    }
    let best = (0..=n).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    Minimum { x: simplex[best].clone(), value: vals[best], iterations }
}

/// `k`-th point of the 2-D Halton sequence with bases 2 and 3.
fn halton(mut k: usize, base: usize) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while k > 0 {
        f /= base as f64;
        r += f * (k % base) as f64;
        k /= base;
    }
    r
}

fn starting_points(starts: usize, lo: &[f64], hi: &[f64]) -> Vec<Vec<f64>> {
    const BASES: [usize; 4] = [2, 3, 5, 7];
    (1..=starts)
        .map(|k| (0..lo.len()).map(|d| lo[d] + (hi[d] - lo[d]) * halton(k, BASES[d])).collect())
        .collect()
}

fn best_of(runs: impl Iterator<Item = Minimum>) -> Minimum {
    runs.min_by(|a, b| a.value.total_cmp(&b.value).then_with(|| a.x.partial_cmp(&b.x).unwrap_or(std::cmp::Ordering::Equal)))
        .expect("at least one start")
}

/// Multi-start Nelder–Mead on [`gamma_on_orbit`] over `(ρ, ξ) ∈ [0.5, 2] × [−1.5, 0.5]`.
pub fn minimize_gamma_orbit(starts: usize, tol: f64) -> Result<OrbitPoint> {
    if starts == 0 {
        return Err(Error::Invalid("at least one start is required".into()));
    }
    let f = |p: &[f64]| gamma_on_orbit(p[0], p[1]).unwrap_or(f64::INFINITY);
    let runs = starting_points(starts, &[0.5, -1.5], &[2.0, 0.5]).into_iter().map(|s| nelder_mead(f, &s, 0.1, tol, 20_000));
    let m = best_of(runs);
    Ok(OrbitPoint { rho: m.x[0], xi: m.x[1], gamma: m.value })
}

pub const DEFAULT_STARTS: usize = 8;
pub const DEFAULT_TOL: f64 = 1e-12;

fn check_rs(r: f64, s: f64) -> Result<()> {
    if r == 0.0 || s == 0.0 {
        Err(Error::Invalid("r and s must be nonzero".into()))
    } else {
        Ok(())
    }
}

/// Residuals `gₖ` with `f = Σ gₖ²`, and their partial derivatives in `(r, x, s, y)` order.
fn frobenius_terms(r: f64, x: f64, s: f64, y: f64) -> [(f64, [f64; 4]); 14] {
    let t3 = 3f64.sqrt();
    let q = 1.0 / (r * s);
    let (qr, qs) = (-q / r, -q / s);
    [
        (2.0 * r * s, [2.0 * s, 0.0, 2.0 * r, 0.0]),
        (t3 * r * y, [t3 * y, 0.0, 0.0, t3 * r]),
        (t3 * s * x, [0.0, t3 * s, t3 * x, 0.0]),
        (x * y, [0.0, y, 0.0, x]),
        (r / s, [1.0 / s, 0.0, -r / (s * s), 0.0]),
        (s / r, [-s / (r * r), 0.0, 1.0 / r, 0.0]),
        (q, [qr, 0.0, qs, 0.0]),
        (x / s + q, [qr, 1.0 / s, -x / (s * s) + qs, 0.0]),
        (y / r - q, [-y / (r * r) - qr, 0.0, -qs, 1.0 / r]),
        (x / s - x * y, [0.0, 1.0 / s - y, -x / (s * s), -x]),
        (y / r + x * y, [-y / (r * r), y, 0.0, 1.0 / r + x]),
        (x * y + q, [qr, y, qs, x]),
        (s / r + x * s, [-s / (r * r), s, 1.0 / r + x, 0.0]),
        (r / s - r * y, [1.0 / s - y, 0.0, -r / (s * s), -r]),
    ]
}

/// Squared Frobenius norm of Strassen's `L` after a pair of upper-triangular isotropies.
pub fn frobenius_objective(r: f64, x: f64, s: f64, y: f64) -> Result<f64> {
    check_rs(r, s)?;
    Ok(frobenius_terms(r, x, s, y).iter().map(|(g, _)| g * g).sum())
}

/// Analytic gradient of [`frobenius_objective`] in `(r, x, s, y)` order.
pub fn frobenius_gradient(r: f64, x: f64, s: f64, y: f64) -> Result<[f64; 4]> {
    check_rs(r, s)?;
    let mut g = [0.0; 4];
    for (v, d) in frobenius_terms(r, x, s, y) {
        for k in 0..4 {
            g[k] += 2.0 * v * d[k];
        }
    }
    Ok(g)
}

/// Hessian by central differences of the analytic gradient.
pub fn frobenius_hessian(p: [f64; 4], h: f64) -> Result<Matrix4<f64>> {
    let mut m = Matrix4::zeros();
    for j in 0..4 {
        let (mut a, mut b) = (p, p);
        a[j] += h;
        b[j] -= h;
        let ga = frobenius_gradient(a[0], a[1], a[2], a[3])?;
        let gb = frobenius_gradient(b[0], b[1], b[2], b[3])?;
        for i in 0..4 {
            m[(i, j)] = (ga[i] - gb[i]) / (2.0 * h);
        }
    }
    Ok((m + m.transpose()) * 0.5)
}

pub fn hessian_eigenvalues(p: [f64; 4]) -> Result<[f64; 4]> {
    let e = SymmetricEigen::new(frobenius_hessian(p, 1e-5)?).eigenvalues;
    let mut v = [e[0], e[1], e[2], e[3]];
    v.sort_by(f64::total_cmp);
    Ok(v)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrobeniusMinimum {
    /// `(r, x, s, y)`.
    pub point: [f64; 4],
    pub value: f64,
}

/// Multi-start Nelder–Mead over `(ln r, x, ln s, y)`, polished by Newton steps.
pub fn minimize_frobenius(starts: usize, tol: f64) -> Result<FrobeniusMinimum> {
    if starts == 0 {
        return Err(Error::Invalid("at least one start is required".into()));
    }
    let f = |p: &[f64]| frobenius_objective(p[0].exp(), p[1], p[2].exp(), p[3]).unwrap_or(f64::INFINITY);
    let lo = [-1.0, -1.5, -1.0, -1.5];
    let hi = [1.0, 1.5, 1.0, 1.5];
    let runs = starting_points(starts, &lo, &hi).into_iter().map(|s| nelder_mead(f, &s, 0.25, tol, 50_000));
    let m = best_of(runs);
    let mut p = [m.x[0].exp(), m.x[1], m.x[2].exp(), m.x[3]];
    for _ in 0..8 {
        let g = frobenius_gradient(p[0], p[1], p[2], p[3])?;
        let Some(step) = frobenius_hessian(p, 1e-5)?.lu().solve(&Vector4::from(g)) else { break };
        let cand = [p[0] - step[0], p[1] - step[1], p[2] - step[2], p[3] - step[3]];
        if cand[0] <= 0.0 || cand[2] <= 0.0 || frobenius_objective(cand[0], cand[1], cand[2], cand[3])? > frobenius_objective(p[0], p[1], p[2], p[3])? {
            break;
        }
        p = cand;
    }
    Ok(FrobeniusMinimum { point: p, value: frobenius_objective(p[0], p[1], p[2], p[3])? })
}

/// `ρ* = ⁴√(4/3)`.
pub fn optimal_rho() -> f64 {
    (4.0f64 / 3.0).powf(0.25)
}

fn dyadic(num: i64, order: u32) -> Coefficient {
    Coefficient::rational(Rational::new(num.into(), (1i64 << order).into()))
}

/// Pick the dyadic `ρ` of denominator at most `2^order` with the smallest orbit growth
/// factor (with `ξ = −1/2` exact), and apply the exact isotropy to Strassen's formula.
pub fn dyadic_approx_rep(order: u32) -> Result<HMRep> {
    if order == 0 || order > 40 {
        return Err(Error::Invalid(format!("order must be in 1..=40, got {order}")));
    }
    let target = optimal_rho();
    let mut best: Option<(f64, i64, u32)> = None;
    for j in 0..=order {
        let scaled = target * (1u64 << j) as f64;
        for num in [scaled.floor() as i64, scaled.ceil() as i64] {
            if num <= 0 {
                continue;
            }
            let g = gamma_on_orbit(num as f64 / (1u64 << j) as f64, -0.5)?;
            if best.map_or(true, |(bg, _, _)| g < bg) {
                best = Some((g, num, j));
            }
        }
    }
    let (_, num, j) = best.expect("at least one positive candidate");
    let g = param_isotropy_exact(&dyadic(num, j), &Coefficient::frac(-1, 2))?;
    Ok(apply(&g, &catalog("strassen")?)?.with_name(&format!("dyadic{order}")))
}

/// Growth factor of the rep returned by [`dyadic_approx_rep`].
pub fn dyadic_gamma(order: u32) -> Result<f64> {
    Ok(gamma21(&dyadic_approx_rep(order)?))
}
