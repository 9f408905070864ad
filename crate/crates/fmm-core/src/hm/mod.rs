//! Bilinear formulas in HM form: three coefficient matrices with one row per product.

mod catalog;
mod io;

pub use catalog::{alternative_basis, catalog, catalog_names, conventional, CobTriple};
pub use io::{parse_hm, read_hm, to_hm_string, to_hm_string_f64, write_hm};

use crate::coeff::{Coefficient, Scalar};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// `⟨L, R, Pt⟩` for an `(m,k,n)` product of rank `r = L.rows`.
///
/// Row `q` of `pt` lists the contribution of product `q` to `vec(C)`, row-major.
#[derive(Clone, PartialEq, Debug)]
pub struct Hm<T> {
    pub m: usize,
    pub k: usize,
    pub n: usize,
    pub l: Matrix<T>,
    pub r: Matrix<T>,
    pub pt: Matrix<T>,
    pub name: Option<String>,
}

pub type HMRep = Hm<Coefficient>;
pub type HMRepF = Hm<f64>;

/// Index of a Brent equation: `((i,j),(j',l),(i',l'))`.
pub type BrentIndex = ((usize, usize), (usize, usize), (usize, usize));

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub valid: bool,
    pub first_failure: Option<BrentIndex>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NaiveCounts {
    pub mul_div: usize,
    pub add_sub: usize,
}

impl<T: Scalar> Hm<T> {
    pub fn new(m: usize, k: usize, n: usize, l: Matrix<T>, r: Matrix<T>, pt: Matrix<T>) -> Result<Self> {
        let rep = Hm { m, k, n, l, r, pt, name: None };
        rep.check_shape()?;
        Ok(rep)
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = Some(name.to_string());
        self
    }

    pub fn rank(&self) -> usize {
        self.l.rows
    }

    pub fn check_shape(&self) -> Result<()> {
        let r = self.l.rows;
        let ok = self.l.cols == self.m * self.k
            && self.r.cols == self.k * self.n
            && self.pt.cols == self.m * self.n
            && self.r.rows == r
            && self.pt.rows == r;
        if ok {
            Ok(())
        } else {
            Err(Error::Shape(format!(
                "L {}x{}, R {}x{}, Pt {}x{} inconsistent with (m,k,n)=({},{},{})",
                self.l.rows, self.l.cols, self.r.rows, self.r.cols, self.pt.rows, self.pt.cols, self.m, self.k, self.n
            )))
        }
    }

    /// `matr(Ptᵀ·((L·vec A) ⊙ (R·vec B)))`.
    pub fn eval(&self, a: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>> {
        if a.rows != self.m || a.cols != self.k || b.rows != self.k || b.cols != self.n {
            return Err(Error::Shape(format!(
                "inputs {}x{} and {}x{} for a ({},{},{}) formula",
                a.rows, a.cols, b.rows, b.cols, self.m, self.k, self.n
            )));
        }
        let la = self.l.matvec(&a.data);
        let rb = self.r.matvec(&b.data);
        let mut c = vec![T::zero(); self.m * self.n];
        for q in 0..self.rank() {
            let p = la[q].times(&rb[q]);
            for (idx, cv) in c.iter_mut().enumerate() {
                *cv = cv.plus(&self.pt.get(q, idx).times(&p));
            }
        }
        Matrix::from_vec(self.m, self.n, c)
    }

    fn brent_sum(&self, ia: usize, ib: usize, ic: usize) -> T {
        (0..self.rank()).fold(T::zero(), |acc, q| {
            acc.plus(&self.l.get(q, ia).times(self.r.get(q, ib)).times(self.pt.get(q, ic)))
        })
    }

    fn brent_indices(&self) -> impl Iterator<Item = (BrentIndex, bool)> + '_ {
        let (m, k, n) = (self.m, self.k, self.n);
        (0..m * k).flat_map(move |ia| {
            (0..k * n).flat_map(move |ib| {
                (0..m * n).map(move |ic| {
                    let (i, j) = (ia / k, ia % k);
                    let (j2, l) = (ib / n, ib % n);
                    let (i2, l2) = (ic / n, ic % n);
                    (((i, j), (j2, l), (i2, l2)), j == j2 && i == i2 && l == l2)
                })
            })
        })
    }
}

impl HMRep {
    /// Exact check of the Brent equations.
    pub fn validate_brent(&self) -> Result<ValidationReport> {
        self.check_shape()?;
        for (idx, expect) in self.brent_indices() {
            let ((i, j), (j2, l), (i2, l2)) = idx;
            let s = self.brent_sum(i * self.k + j, j2 * self.n + l, i2 * self.n + l2);
            let want = if expect { Coefficient::one() } else { Coefficient::zero() };
            if s != want {
                return Ok(ValidationReport { valid: false, first_failure: Some(idx) });
            }
        }
        Ok(ValidationReport { valid: true, first_failure: None })
    }

    /// Brute-force check: `eval` against the conventional product on all pairs of
    /// canonical basis matrices.
    pub fn validate_by_basis(&self) -> Result<bool> {
        for ea in 0..self.m * self.k {
            for eb in 0..self.k * self.n {
                let a = unit_matrix(self.m, self.k, ea);
                let b = unit_matrix(self.k, self.n, eb);
                if self.eval(&a, &b)? != a.matmul(&b)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn to_f64(&self) -> HMRepF {
        Hm {
            m: self.m,
            k: self.k,
            n: self.n,
            l: self.l.to_f64(),
            r: self.r.to_f64(),
            pt: self.pt.to_f64(),
            name: self.name.clone(),
        }
    }

    /// Upper bounds on the operation count read off the coefficients.
    pub fn naive_op_counts(&self) -> NaiveCounts {
        let r = self.rank();
        let mul_div = [&self.l, &self.r, &self.pt]
            .iter()
            .map(|m| m.data.iter().filter(|c| !c.is_zero() && !c.is_unit()).count())
            .sum();
        let out: usize = (0..self.pt.cols).map(|j| self.pt.col_nnz(j).saturating_sub(1)).sum();
        let add_sub = self.l.nnz().saturating_sub(r) + self.r.nnz().saturating_sub(r) + out;
        NaiveCounts { mul_div, add_sub }
    }
}

impl HMRepF {
    /// Largest absolute residual over all Brent equations.
    pub fn brent_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for (((i, j), (j2, l), (i2, l2)), expect) in self.brent_indices() {
            let s = self.brent_sum(i * self.k + j, j2 * self.n + l, i2 * self.n + l2);
            let want = if expect { 1.0 } else { 0.0 };
            worst = worst.max((s - want).abs());
        }
        worst
    }
}

pub fn validate_brent(rep: &HMRep) -> Result<ValidationReport> {
    rep.validate_brent()
}

pub fn eval_bilinear<T: Scalar>(rep: &Hm<T>, a: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>> {
    rep.eval(a, b)
}

pub fn naive_op_counts(rep: &HMRep) -> NaiveCounts {
    rep.naive_op_counts()
}

fn unit_matrix(rows: usize, cols: usize, idx: usize) -> Matrix<Coefficient> {
    let mut m = Matrix::zeros(rows, cols);
    m.data[idx] = Coefficient::one();
    m
}
