//! Floating-point recursive multiplication driven by 2×2 bilinear programs.
//!
//! Block linear combinations run in the program's instruction order; constants are
//! rounded to binary64 once, when the program is built.

mod basis;
mod dense;

pub use basis::{cobp, lcob, rcob, sparse_core_program, sparse_multiply, SparseAsopt};
pub use dense::{conventional_multiply, reference_multiply, reference_multiply_dd};

use crate::error::{Error, Result};
use crate::hm::{catalog, HMRep};
use crate::matrix::MatrixF;
use crate::slp::{catalog_slp, compile_bilinear, Op, Slp, Strategy};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BasisMode {
    #[default]
    Direct,
    /// Basis change, sparse core, basis change back.
    Alternative,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecursionConfig {
    /// Base-case dimension; blocks of this size use the conventional product.
    pub cutoff: usize,
    pub algorithm: String,
    pub basis_mode: BasisMode,
}

impl RecursionConfig {
    pub fn new(algorithm: &str) -> Self {
        RecursionConfig { cutoff: 1, algorithm: algorithm.to_string(), basis_mode: BasisMode::Direct }
    }

    pub fn with_cutoff(mut self, cutoff: usize) -> Self {
        self.cutoff = cutoff;
        self
    }

    pub fn alternative(mut self) -> Self {
        self.basis_mode = BasisMode::Alternative;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Step {
    Add(usize, usize),
    Sub(usize, usize),
    Scale(f64, usize),
    Neg(usize),
    Mul(usize, usize),
}

/// A bilinear 2×2 program with binary64 constants: slots `0..4` are the quadrants of the
/// left operand, `4..8` those of the right one (row-major), outputs the four quadrants
/// of the product.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockProgram {
    steps: Vec<Step>,
    outputs: [Option<usize>; 4],
}

impl BlockProgram {
    pub fn from_slp(prog: &Slp) -> Result<Self> {
        prog.validate()?;
        if prog.left != Some(4) || prog.inputs.len() != 8 || prog.outputs.len() != 4 {
            return Err(Error::Shape("block programs need 4 + 4 inputs and 4 outputs".into()));
        }
        let steps = prog
            .ops
            .iter()
            .map(|op| match op {
                Op::Add(a, b) => Step::Add(*a, *b),
                Op::Sub(a, b) => Step::Sub(*a, *b),
                Op::Scale(c, a) => Step::Scale(c.to_f64(), *a),
                Op::Neg(a) => Step::Neg(*a),
                Op::Mul(a, b) => Step::Mul(*a, *b),
            })
            .collect();
        let o = &prog.outputs;
        Ok(BlockProgram { steps, outputs: [o[0], o[1], o[2], o[3]] })
    }

    /// Compiles a 2×2×2 formula with the kernel and transposition optimizers.
    pub fn from_hm(rep: &HMRep) -> Result<Self> {
        if (rep.m, rep.k, rep.n) != (2, 2, 2) {
            return Err(Error::Shape("recursion needs a 2x2x2 formula".into()));
        }
        Self::from_slp(&compile_bilinear(rep, Strategy::KernelTranspose)?)
    }

    /// The hand-written program when the catalog has one, else the compiled formula.
    pub fn named(name: &str) -> Result<Self> {
        match name {
            "schwartzopt" | "schwartz_sparse" => {
                Err(Error::Invalid(format!("`{name}` is a sparse core, not a product formula; use the alternative basis")))
            }
            "strassen" => Self::from_slp(&compile_bilinear(&catalog("strassen")?, Strategy::Naive)?),
            "asopt" | "powers" | "powrot" | "winograd" => Self::from_slp(&catalog_slp(name)?),
            other => Self::from_hm(&catalog(other)?),
        }
    }

    pub fn n_slots(&self) -> usize {
        8 + self.steps.len()
    }

    pub fn products(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s, Step::Mul(..))).count()
    }
}

/// Smallest `cutoff·2^ℓ ≥ n`, as `(padded size, ℓ)`.
pub fn padded_size(n: usize, cutoff: usize) -> (usize, u32) {
    let mut size = cutoff;
    let mut ell = 0;
    while size < n {
        size *= 2;
        ell += 1;
    }
    (size, ell)
}

fn check_square(a: &MatrixF, b: &MatrixF) -> Result<usize> {
    let n = a.rows;
    if n == 0 || a.cols != n || b.rows != n || b.cols != n {
        return Err(Error::Shape(format!("need equal nonempty square operands, got {}x{} and {}x{}", a.rows, a.cols, b.rows, b.cols)));
    }
    Ok(n)
}

pub(crate) fn pad(a: &MatrixF, size: usize) -> Vec<f64> {
    let mut out = vec![0.0; size * size];
    for i in 0..a.rows {
        out[i * size..i * size + a.cols].copy_from_slice(a.row(i));
    }
    out
}

pub(crate) fn unpad(data: &[f64], size: usize, n: usize) -> MatrixF {
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        out.extend_from_slice(&data[i * size..i * size + n]);
    }
    MatrixF { rows: n, cols: n, data: out }
}

/// Quadrant `q` (row-major order) of the `h×h` matrix `src` into `dst`.
pub(crate) fn read_quadrant(src: &[f64], h: usize, q: usize, dst: &mut [f64]) {
    let half = h / 2;
    let (r0, c0) = ((q / 2) * half, (q % 2) * half);
    for i in 0..half {
        dst[i * half..(i + 1) * half].copy_from_slice(&src[(r0 + i) * h + c0..(r0 + i) * h + c0 + half]);
    }
}

pub(crate) fn write_quadrant(dst: &mut [f64], h: usize, q: usize, src: &[f64]) {
    let half = h / 2;
    let (r0, c0) = ((q / 2) * half, (q % 2) * half);
    for i in 0..half {
        dst[(r0 + i) * h + c0..(r0 + i) * h + c0 + half].copy_from_slice(&src[i * half..(i + 1) * half]);
    }
}

/// A program bound to a cutoff, with scratch space reused across calls.
#[derive(Clone, Debug)]
pub struct Recursive {
    prog: BlockProgram,
    cutoff: usize,
}

impl Recursive {
    pub fn new(prog: BlockProgram, cutoff: usize) -> Result<Self> {
        if cutoff == 0 {
            return Err(Error::Invalid("cutoff must be at least 1".into()));
        }
        Ok(Recursive { prog, cutoff })
    }

    /// Product of `size×size` row-major buffers, `size = cutoff·2^ℓ`.
    pub(crate) fn run(&self, a: &[f64], b: &[f64], size: usize) -> Vec<f64> {
        let mut arenas = Vec::new();
        let mut h = size;
        while h > self.cutoff {
            h /= 2;
            arenas.push(vec![0.0; self.prog.n_slots() * h * h]);
        }
        let mut c = vec![0.0; size * size];
        let mut scalars = vec![0.0; self.prog.n_slots()];
        recurse(&self.prog, a, b, size, self.cutoff, &mut c, &mut arenas, &mut scalars);
        c
    }

    pub fn multiply(&self, a: &MatrixF, b: &MatrixF) -> Result<MatrixF> {
        let n = check_square(a, b)?;
        if n <= self.cutoff {
            return conventional_multiply(a, b);
        }
        let (size, _) = padded_size(n, self.cutoff);
        let c = self.run(&pad(a, size), &pad(b, size), size);
        Ok(unpad(&c, size, n))
    }
}

#[allow(clippy::too_many_arguments)]
fn recurse(p: &BlockProgram, a: &[f64], b: &[f64], h: usize, cutoff: usize, c: &mut [f64], arenas: &mut [Vec<f64>], scalars: &mut [f64]) {
    if h <= cutoff {
        dense::conventional_into(a, b, c, h);
        return;
    }
    if h == 2 && cutoff == 1 {
        scalar_step(p, a, b, c, scalars);
        return;
    }
    let q = h / 2;
    let blk = q * q;
    let (cur, rest) = arenas.split_first_mut().expect("one arena per level");
    for k in 0..4 {
        read_quadrant(a, h, k, &mut cur[k * blk..(k + 1) * blk]);
        read_quadrant(b, h, k, &mut cur[(4 + k) * blk..(5 + k) * blk]);
    }
    for (i, step) in p.steps.iter().enumerate() {
        let (lo, hi) = cur.split_at_mut((8 + i) * blk);
        let out = &mut hi[..blk];
        let s = |x: usize| &lo[x * blk..(x + 1) * blk];
        match *step {
            Step::Add(x, y) => out.iter_mut().zip(s(x).iter().zip(s(y))).for_each(|(o, (u, v))| *o = u + v),
            Step::Sub(x, y) => out.iter_mut().zip(s(x).iter().zip(s(y))).for_each(|(o, (u, v))| *o = u - v),
            Step::Scale(k, x) => out.iter_mut().zip(s(x)).for_each(|(o, u)| *o = k * u),
            Step::Neg(x) => out.iter_mut().zip(s(x)).for_each(|(o, u)| *o = -u),
            Step::Mul(x, y) => recurse(p, s(x), s(y), q, cutoff, out, rest, scalars),
        }
    }
    for (k, o) in p.outputs.iter().enumerate() {
        match o {
            Some(slot) => write_quadrant(c, h, k, &cur[slot * blk..(slot + 1) * blk]),
            None => write_quadrant(c, h, k, &vec![0.0; blk]),
        }
    }
}

/// The last level with unit cutoff: the program on scalars.
fn scalar_step(p: &BlockProgram, a: &[f64], b: &[f64], c: &mut [f64], v: &mut [f64]) {
    v[..4].copy_from_slice(&a[..4]);
    v[4..8].copy_from_slice(&b[..4]);
    for (i, step) in p.steps.iter().enumerate() {
        v[8 + i] = match *step {
            Step::Add(x, y) => v[x] + v[y],
            Step::Sub(x, y) => v[x] - v[y],
            Step::Scale(k, x) => k * v[x],
            Step::Neg(x) => -v[x],
            Step::Mul(x, y) => v[x] * v[y],
        };
    }
    for (k, o) in p.outputs.iter().enumerate() {
        c[k] = o.map_or(0.0, |s| v[s]);
    }
}

/// `A·B` by the configured recursion; `conventional` is the triple loop.
pub fn rec_multiply(a: &MatrixF, b: &MatrixF, cfg: &RecursionConfig) -> Result<MatrixF> {
    if cfg.cutoff == 0 {
        return Err(Error::Invalid("cutoff must be at least 1".into()));
    }
    match (cfg.basis_mode, cfg.algorithm.as_str()) {
        (BasisMode::Alternative, _) => sparse_multiply(a, b, cfg),
        (BasisMode::Direct, "conventional") => {
            check_square(a, b)?;
            conventional_multiply(a, b)
        }
        (BasisMode::Direct, name) => Recursive::new(BlockProgram::named(name)?, cfg.cutoff)?.multiply(a, b),
    }
}
