//! Recursive basis changes pairing the sparse core with asopt, and the multiply built on them.

use super::{check_square, pad, padded_size, read_quadrant, unpad, write_quadrant, BlockProgram, RecursionConfig, Recursive};
use crate::coeff::Coefficient;
use crate::error::{Error, Result};
use crate::hm::catalog;
use crate::matrix::MatrixF;
use crate::slp::{compile_bilinear, Strategy};

struct Constants {
    inv_s3: f64,
    two_over_s3: f64,
    s3_half: f64,
}

fn constants() -> Constants {
    Constants {
        inv_s3: Coefficient::s3(1, 3).to_f64(),
        two_over_s3: Coefficient::s3(2, 3).to_f64(),
        s3_half: Coefficient::s3(1, 2).to_f64(),
    }
}

type Combine = fn(&Constants, [f64; 4]) -> [f64; 4];

fn left_step(k: &Constants, [m1, m2, m3, m4]: [f64; 4]) -> [f64; 4] {
    let t1 = k.inv_s3 * m4;
    let t2 = m3 - m2;
    let t3 = m1 + m4;
    [k.two_over_s3 * m4, m2 + t1, m3 - t1, 0.5 * t2 - k.s3_half * t3]
}

fn right_step(k: &Constants, [m1, m2, m3, m4]: [f64; 4]) -> [f64; 4] {
    let t1 = k.inv_s3 * m2;
    let t2 = m1 + m4;
    let t3 = m2 - m3;
    [k.two_over_s3 * m2, m1 - t1, t1 - m4, k.s3_half * t3 - 0.5 * t2]
}

fn product_step(k: &Constants, [m1, m2, m3, m4]: [f64; 4]) -> [f64; 4] {
    let t1 = 0.5 * m4;
    let t2 = m2 - m3;
    let t3 = k.s3_half * m4;
    [t3 + k.inv_s3 * t2 - m1 * k.two_over_s3, -m2 - t1, t1 - m3, t3]
}

/// Transforms the quadrants recursively, then combines them entrywise.
fn apply(data: &[f64], h: usize, ell: u32, k: &Constants, f: Combine) -> Vec<f64> {
    if ell == 0 {
        return data.to_vec();
    }
    let q = h / 2;
    let blk = q * q;
    let mut quads = vec![0.0; blk];
    let m: Vec<Vec<f64>> = (0..4)
        .map(|i| {
            read_quadrant(data, h, i, &mut quads);
            apply(&quads, q, ell - 1, k, f)
        })
        .collect();
    let mut out: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; blk]);
    for e in 0..blk {
        let r = f(k, [m[0][e], m[1][e], m[2][e], m[3][e]]);
        for (o, v) in out.iter_mut().zip(r) {
            o[e] = v;
        }
    }
    let mut res = vec![0.0; h * h];
    for (i, o) in out.iter().enumerate() {
        write_quadrant(&mut res, h, i, o);
    }
    res
}

fn transform(a: &MatrixF, ell: u32, f: Combine) -> Result<MatrixF> {
    let n = a.rows;
    if a.cols != n || n == 0 {
        return Err(Error::Shape(format!("basis change needs a square matrix, got {}x{}", a.rows, a.cols)));
    }
    if ell >= usize::BITS || n % (1usize << ell) != 0 {
        return Err(Error::Shape(format!("dimension {n} is not a multiple of 2^{ell}")));
    }
    Ok(MatrixF { rows: n, cols: n, data: apply(&a.data, n, ell, &constants(), f) })
}

/// Left basis change of `ℓ` levels.
pub fn lcob(a: &MatrixF, ell: u32) -> Result<MatrixF> {
    transform(a, ell, left_step)
}

/// Right basis change of `ℓ` levels.
pub fn rcob(b: &MatrixF, ell: u32) -> Result<MatrixF> {
    transform(b, ell, right_step)
}

/// Product basis change of `ℓ` levels, mapping the core's output back.
pub fn cobp(c: &MatrixF, ell: u32) -> Result<MatrixF> {
    transform(c, ell, product_step)
}

/// The 12-addition program of the sparse core.
pub fn sparse_core_program() -> Result<BlockProgram> {
    BlockProgram::from_slp(&compile_bilinear(&catalog("schwartz_sparse")?, Strategy::Naive)?)
}

/// `A·B` through the alternative basis: left and right basis changes, `ℓ` levels of the
/// sparse core, product basis change. Only asopt has a basis change here.
pub fn sparse_multiply(a: &MatrixF, b: &MatrixF, cfg: &RecursionConfig) -> Result<MatrixF> {
    if !matches!(cfg.algorithm.as_str(), "asopt" | "sparse-asopt") {
        return Err(Error::Invalid(format!("no alternative basis for `{}`", cfg.algorithm)));
    }
    SparseAsopt::new(cfg.cutoff)?.multiply(a, b)
}

/// The alternative-basis pipeline with its core program prepared once.
#[derive(Clone, Debug)]
pub struct SparseAsopt {
    core: Recursive,
    cutoff: usize,
}

impl SparseAsopt {
    pub fn new(cutoff: usize) -> Result<Self> {
        Ok(SparseAsopt { core: Recursive::new(sparse_core_program()?, cutoff)?, cutoff })
    }

    pub fn multiply(&self, a: &MatrixF, b: &MatrixF) -> Result<MatrixF> {
        let n = check_square(a, b)?;
        let (size, ell) = padded_size(n, self.cutoff);
        let wrap = |m: &MatrixF| MatrixF { rows: size, cols: size, data: pad(m, size) };
        let ab = lcob(&wrap(a), ell)?;
        let bb = rcob(&wrap(b), ell)?;
        let cb = if ell == 0 {
            super::conventional_multiply(&ab, &bb)?.data
        } else {
            self.core.run(&ab.data, &bb.data, size)
        };
        let c = cobp(&MatrixF { rows: size, cols: size, data: cb }, ell)?;
        Ok(unpad(&c.data, size, n))
    }
}
