//! Isotropies `(U × V × W)` of the 2×2 matrix-multiplication tensor acting on HM formulas.

use crate::coeff::{Coefficient, Scalar};
use crate::error::{Error, Result};
use crate::hm::{Hm, HMRepF};
use crate::matrix::Matrix;

/// 2×2 matrix stored row-major.
pub type Mat2<T> = [T; 4];

/// A triple of invertible 2×2 matrices with their determinants.
#[derive(Clone, Debug, PartialEq)]
pub struct Isotropy<T> {
    pub u: Mat2<T>,
    pub v: Mat2<T>,
    pub w: Mat2<T>,
    /// `(det U, det V, det W)`.
    pub dets: [T; 3],
}

fn one<T: Scalar>() -> T {
    T::from_coeff(&Coefficient::one())
}

fn mul2<T: Scalar>(a: &Mat2<T>, b: &Mat2<T>) -> Mat2<T> {
    [
        a[0].times(&b[0]).plus(&a[1].times(&b[2])),
        a[0].times(&b[1]).plus(&a[1].times(&b[3])),
        a[2].times(&b[0]).plus(&a[3].times(&b[2])),
        a[2].times(&b[1]).plus(&a[3].times(&b[3])),
    ]
}

fn transpose2<T: Clone>(a: &Mat2<T>) -> Mat2<T> {
    [a[0].clone(), a[2].clone(), a[1].clone(), a[3].clone()]
}

fn det2<T: Scalar>(a: &Mat2<T>) -> T {
    a[0].times(&a[3]).minus(&a[1].times(&a[2]))
}

fn inv2<T: Scalar>(a: &Mat2<T>) -> Result<Mat2<T>> {
    let d = det2(a).recip().ok_or(Error::Singular)?;
    Ok([a[3].times(&d), a[1].negate().times(&d), a[2].negate().times(&d), a[0].times(&d)])
}

impl<T: Scalar> Isotropy<T> {
    pub fn new(u: Mat2<T>, v: Mat2<T>, w: Mat2<T>) -> Result<Self> {
        let dets = [det2(&u), det2(&v), det2(&w)];
        if dets.iter().any(|d| d.recip().is_none()) {
            return Err(Error::Singular);
        }
        Ok(Isotropy { u, v, w, dets })
    }

    pub fn identity() -> Self {
        let id = [one(), T::zero(), T::zero(), one()];
        Isotropy { u: id.clone(), v: id.clone(), w: id, dets: [one(), one(), one()] }
    }

    /// `(U × U × U)`.
    pub fn diagonal(u: Mat2<T>) -> Result<Self> {
        Self::new(u.clone(), u.clone(), u)
    }

    pub fn inverse(&self) -> Result<Self> {
        Self::new(inv2(&self.u)?, inv2(&self.v)?, inv2(&self.w)?)
    }
}

impl Isotropy<Coefficient> {
    /// All three determinants are `±1`.
    pub fn is_psl(&self) -> bool {
        self.dets.iter().all(|d| d.is_unit())
    }

    pub fn to_f64(&self) -> Isotropy<f64> {
        let f = |m: &Mat2<Coefficient>| [m[0].to_f64(), m[1].to_f64(), m[2].to_f64(), m[3].to_f64()];
        Isotropy { u: f(&self.u), v: f(&self.v), w: f(&self.w), dets: [0, 1, 2].map(|i| self.dets[i].to_f64()) }
    }
}

/// `(U₁U₂, V₁V₂, W₁W₂)`.
pub fn compose<T: Scalar>(g1: &Isotropy<T>, g2: &Isotropy<T>) -> Isotropy<T> {
    Isotropy {
        u: mul2(&g1.u, &g2.u),
        v: mul2(&g1.v, &g2.v),
        w: mul2(&g1.w, &g2.w),
        dets: [0, 1, 2].map(|i| g1.dets[i].times(&g2.dets[i])),
    }
}

fn sandwich_rows<T: Scalar>(m: &Matrix<T>, left: &Mat2<T>, right: &Mat2<T>) -> Matrix<T> {
    let mut out = m.clone();
    for i in 0..m.rows {
        let row = m.row(i);
        let x = [row[0].clone(), row[1].clone(), row[2].clone(), row[3].clone()];
        let y = mul2(&mul2(left, &x), right);
        out.row_mut(i).clone_from_slice(&y);
    }
    out
}

/// `⟨L·(Vᵀ⊗U⁻¹), R·(Wᵀ⊗V⁻¹), (U⊗W⁻ᵀ)·P⟩`, computed blockwise: each `L` row `Λ`
/// becomes `U⁻ᵀΛVᵀ`, each `R` row `M` becomes `V⁻ᵀMWᵀ`, each `Pt` row `Γ` becomes `UΓW⁻¹`.
pub fn apply<T: Scalar>(g: &Isotropy<T>, rep: &Hm<T>) -> Result<Hm<T>> {
    if (rep.m, rep.k, rep.n) != (2, 2, 2) {
        return Err(Error::Shape(format!("isotropies act on 2x2x2 formulas, got ({},{},{})", rep.m, rep.k, rep.n)));
    }
    rep.check_shape()?;
    let (ui, vi, wi) = (inv2(&g.u)?, inv2(&g.v)?, inv2(&g.w)?);
    Ok(Hm {
        m: 2,
        k: 2,
        n: 2,
        l: sandwich_rows(&rep.l, &transpose2(&ui), &transpose2(&g.v)),
        r: sandwich_rows(&rep.r, &transpose2(&vi), &transpose2(&g.w)),
        pt: sandwich_rows(&rep.pt, &g.u, &wi),
        name: None,
    })
}

fn check_rho(rho: f64) -> Result<()> {
    if rho > 0.0 {
        Ok(())
    } else {
        Err(Error::Invalid(format!("rho must be positive, got {rho}")))
    }
}

/// `(U×U×U)` with `U = [[ρ, ρξ], [0, 1/ρ]]`.
pub fn param_isotropy(rho: f64, xi: f64) -> Result<Isotropy<f64>> {
    check_rho(rho)?;
    Isotropy::diagonal([rho, rho * xi, 0.0, 1.0 / rho])
}

/// Exact counterpart of [`param_isotropy`]; `det U = 1` exactly.
pub fn param_isotropy_exact(rho: &Coefficient, xi: &Coefficient) -> Result<Isotropy<Coefficient>> {
    if rho.signum() <= 0 {
        return Err(Error::Invalid(format!("rho must be positive, got {rho}")));
    }
    Isotropy::diagonal([rho.clone(), rho * xi, Coefficient::zero(), rho.inv()?])
}

pub fn rotation(theta: f64) -> Mat2<f64> {
    let (s, c) = theta.sin_cos();
    [c, -s, s, c]
}

pub fn rotation_isotropy(angles: [f64; 3]) -> Isotropy<f64> {
    Isotropy::new(rotation(angles[0]), rotation(angles[1]), rotation(angles[2])).expect("rotations are invertible")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RotationObjective {
    /// Total number of nonzero coefficients.
    Nnz,
    /// Rows with a single nonzero entry; the weakest component counts first.
    CanonicalVectors,
}

#[derive(Clone, Debug)]
pub struct RotationSearch {
    pub rep: HMRepF,
    pub angles: [f64; 3],
    pub objective: f64,
}

const ZERO_TOL: f64 = 1e-9;

fn single_entry_rows(m: &Matrix<f64>) -> usize {
    (0..m.rows).filter(|&i| m.row(i).iter().filter(|x| x.abs() > ZERO_TOL).count() == 1).count()
}

/// Lower is better.
pub fn rotation_score(rep: &HMRepF, objective: RotationObjective) -> f64 {
    let parts = [&rep.l, &rep.r, &rep.pt];
    match objective {
        RotationObjective::Nnz => parts.iter().map(|m| m.data.iter().filter(|x| x.abs() > ZERO_TOL).count()).sum::<usize>() as f64,
        RotationObjective::CanonicalVectors => {
            let counts: Vec<usize> = parts.iter().map(|m| single_entry_rows(m)).collect();
            let min = *counts.iter().min().unwrap();
            -((min * 1000 + counts.iter().sum::<usize>()) as f64)
        }
    }
}

/// Coordinate descent over rotation angles on a grid of `steps` points per angle,
/// then golden-section refinement of each angle; `budget` bounds the number of sweeps.
pub fn search_rotations(rep: &HMRepF, objective: RotationObjective, budget: usize, steps: usize) -> RotationSearch {
    let score = |a: [f64; 3]| -> (f64, HMRepF) {
        let out = apply(&rotation_isotropy(a), rep).expect("2x2x2 formula");
        (rotation_score(&out, objective), out)
    };
    let mut best_angles = [0.0; 3];
    let mut best_score = rotation_score(rep, objective);
    let mut best_rep = rep.clone();
    let steps = steps.max(1);
    let period = std::f64::consts::PI;
    for _ in 0..budget {
        let mut improved = false;
        for axis in 0..3 {
            for s in 0..steps {
                let mut a = best_angles;
                a[axis] = period * s as f64 / steps as f64;
                let (v, out) = score(a);
                if v < best_score {
                    (best_score, best_angles, best_rep, improved) = (v, a, out, true);
                }
            }
            let h = period / steps as f64;
            let (mut lo, mut hi) = (best_angles[axis] - h, best_angles[axis] + h);
            let g = 0.5 * (5f64.sqrt() - 1.0);
            for _ in 0..60 {
                let m1 = hi - g * (hi - lo);
                let m2 = lo + g * (hi - lo);
                let mut a1 = best_angles;
                a1[axis] = m1;
                let mut a2 = best_angles;
                a2[axis] = m2;
                let (v1, o1) = score(a1);
                let (v2, o2) = score(a2);
                for (v, a, o) in [(v1, a1, o1), (v2, a2, o2)] {
                    if v < best_score {
                        (best_score, best_angles, best_rep, improved) = (v, a, o, true);
                    }
                }
                if v1 <= v2 {
                    hi = m2;
                } else {
                    lo = m1;
                }
            }
        }
        if !improved {
            break;
        }
    }
    best_rep.name = rep.name.clone();
    RotationSearch { rep: best_rep, angles: best_angles, objective: best_score }
}
