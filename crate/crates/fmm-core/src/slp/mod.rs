//! Straight-line programs: a tiny SSA IR for linear and bilinear maps.

mod build;
mod catalog;
mod optimize;
mod sparsify;
mod text;

pub use catalog::{catalog_slp, slp_names};
pub use optimize::{compile_bilinear, cse_optimize, from_matrix_naive, kernel_decompose, transpose_slp, Strategy};
pub use sparsify::{sparse_cores, sparsify_cob, CoreCandidate, Sparsified};
pub use text::parse_slp;

use std::fmt;

use crate::coeff::{Coefficient, Scalar};
use crate::error::{Error, Result};
use crate::hm::HMRep;
use crate::matrix::{Matrix, MatrixQ};

/// One instruction; its destination is the next free slot.
#[derive(Clone, Debug, PartialEq)]
pub enum Op {
    Add(usize, usize),
    Sub(usize, usize),
    Scale(Coefficient, usize),
    Neg(usize),
    Mul(usize, usize),
}

impl Op {
    fn args(&self) -> [Option<usize>; 2] {
        match *self {
            Op::Add(a, b) | Op::Sub(a, b) | Op::Mul(a, b) => [Some(a), Some(b)],
            Op::Scale(_, a) | Op::Neg(a) => [Some(a), None],
        }
    }
}

/// Slots `0..inputs.len()` hold the inputs; instruction `i` writes slot `inputs.len() + i`.
/// An output of `None` is identically zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Slp {
    pub inputs: Vec<String>,
    /// For bilinear programs, the first `left` inputs are the left operand.
    pub left: Option<usize>,
    pub ops: Vec<Op>,
    pub outputs: Vec<Option<usize>>,
    pub output_names: Vec<String>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCount {
    /// Additions and subtractions.
    pub adds: usize,
    /// Multiplications by constants (including the halvings).
    pub scales: usize,
    pub halvings: usize,
    pub muls: usize,
    pub negs: usize,
}

impl OpCount {
    /// `(adds, scales, negs)`, the order used to rank programs.
    pub fn key(&self) -> (usize, usize, usize) {
        (self.adds, self.scales, self.negs)
    }
}

fn default_names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{}", i + 1)).collect()
}

impl Slp {
    pub fn linear(n_inputs: usize, ops: Vec<Op>, outputs: Vec<Option<usize>>) -> Slp {
        let m = outputs.len();
        Slp { inputs: default_names("x", n_inputs), left: None, ops, outputs, output_names: default_names("y", m) }
    }

    pub fn n_slots(&self) -> usize {
        self.inputs.len() + self.ops.len()
    }

    pub fn is_linear(&self) -> bool {
        !self.ops.iter().any(|o| matches!(o, Op::Mul(..)))
    }

    /// SSA structure, and for bilinear programs that every product pairs a left-only
    /// slot with a right-only slot.
    pub fn validate(&self) -> Result<()> {
        let n = self.inputs.len();
        // side[s]: bit 0 = depends on left inputs, bit 1 = on right inputs, bit 2 = product
        let mut side: Vec<u8> = (0..n).map(|i| if self.left.is_some_and(|k| i >= k) { 2 } else { 1 }).collect();
        for (i, op) in self.ops.iter().enumerate() {
            let dst = n + i;
            for a in op.args().into_iter().flatten() {
                if a >= dst {
                    return Err(Error::Unbound(a));
                }
            }
            let s = match *op {
                Op::Mul(a, b) => {
                    if self.left.is_some() && (side[a] != 1 || side[b] != 2) {
                        return Err(Error::Invalid(format!("product at slot {dst} does not pair left with right")));
                    }
                    4
                }
                Op::Add(a, b) | Op::Sub(a, b) => side[a] | side[b],
                Op::Scale(_, a) | Op::Neg(a) => side[a],
            };
            side.push(s);
        }
        for o in self.outputs.iter().flatten() {
            if *o >= self.n_slots() {
                return Err(Error::Unbound(*o));
            }
        }
        Ok(())
    }

    pub fn eval<T: Scalar>(&self, inputs: &[T]) -> Result<Vec<T>> {
        if inputs.len() != self.inputs.len() {
            return Err(Error::Shape(format!("{} inputs bound, program has {}", inputs.len(), self.inputs.len())));
        }
        let mut v: Vec<T> = inputs.to_vec();
        v.reserve(self.ops.len());
        for op in &self.ops {
            let get = |s: usize| v.get(s).cloned().ok_or(Error::Unbound(s));
            let x = match op {
                Op::Add(a, b) => get(*a)?.plus(&get(*b)?),
                Op::Sub(a, b) => get(*a)?.minus(&get(*b)?),
                Op::Scale(c, a) => T::from_coeff(c).times(&get(*a)?),
                Op::Neg(a) => get(*a)?.negate(),
                Op::Mul(a, b) => get(*a)?.times(&get(*b)?),
            };
            v.push(x);
        }
        self.outputs
            .iter()
            .map(|o| match o {
                Some(s) => v.get(*s).cloned().ok_or(Error::Unbound(*s)),
                None => Ok(T::zero()),
            })
            .collect()
    }

    pub fn count(&self) -> OpCount {
        let half = Coefficient::frac(1, 2);
        let mut c = OpCount::default();
        for op in &self.ops {
            match op {
                Op::Add(..) | Op::Sub(..) => c.adds += 1,
                Op::Scale(k, _) => {
                    c.scales += 1;
                    if k.abs() == half {
                        c.halvings += 1;
                    }
                }
                Op::Neg(_) => c.negs += 1,
                Op::Mul(..) => c.muls += 1,
            }
        }
        c
    }

    /// Matrix of a linear program, read off the canonical basis.
    pub fn linear_matrix(&self) -> Result<MatrixQ> {
        if !self.is_linear() {
            return Err(Error::Invalid("program contains products".into()));
        }
        let n = self.inputs.len();
        let mut m = MatrixQ::zeros(self.outputs.len(), n);
        for j in 0..n {
            let mut e = vec![Coefficient::zero(); n];
            e[j] = Coefficient::one();
            for (i, y) in self.eval(&e)?.into_iter().enumerate() {
                m.set(i, j, y);
            }
        }
        Ok(m)
    }

    /// HM formula of a bilinear program with `m×k` left and `k×n` right inputs, read off
    /// the canonical basis; requires one output per entry of the `m×n` product.
    pub fn equals_hm(&self, rep: &HMRep) -> Result<bool> {
        let (la, lb) = (rep.m * rep.k, rep.k * rep.n);
        if self.left != Some(la) || self.inputs.len() != la + lb || self.outputs.len() != rep.m * rep.n {
            return Err(Error::Shape("program and formula dimensions differ".into()));
        }
        for ea in 0..la {
            for eb in 0..lb {
                let mut x = vec![Coefficient::zero(); la + lb];
                x[ea] = Coefficient::one();
                x[la + eb] = Coefficient::one();
                let got = self.eval(&x)?;
                let a = Matrix::from_vec(rep.m, rep.k, x[..la].to_vec())?;
                let b = Matrix::from_vec(rep.k, rep.n, x[la..].to_vec())?;
                if got != rep.eval(&a, &b)?.data {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    fn slot_name(&self, s: usize) -> String {
        if s < self.inputs.len() {
            self.inputs[s].clone()
        } else {
            format!("t{}", s - self.inputs.len() + 1)
        }
    }
}

/// One instruction per line; inputs keep their names, temporaries are `t1, t2, …`.
impl fmt::Display for Slp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# inputs: {}", self.inputs.join(" "))?;
        for (i, op) in self.ops.iter().enumerate() {
            let dst = self.slot_name(self.inputs.len() + i);
            let n = |s: &usize| self.slot_name(*s);
            match op {
                Op::Add(a, b) => writeln!(f, "{dst} = {} + {}", n(a), n(b))?,
                Op::Sub(a, b) => writeln!(f, "{dst} = {} - {}", n(a), n(b))?,
                Op::Scale(c, a) => writeln!(f, "{dst} = [{c}] {}", n(a))?,
                Op::Neg(a) => writeln!(f, "{dst} = - {}", n(a))?,
                Op::Mul(a, b) => writeln!(f, "{dst} = {} * {}", n(a), n(b))?,
            }
        }
        for (name, o) in self.output_names.iter().zip(&self.outputs) {
            match o {
                Some(s) => writeln!(f, "{name} := {}", self.slot_name(*s))?,
                None => writeln!(f, "{name} := 0")?,
            }
        }
        let c = self.count();
        write!(f, "# {} adds, {} scales, {} muls, {} negs", c.adds, c.scales, c.muls, c.negs)
    }
}

/// Evaluates `prog` (exact or binary64).
pub fn eval_slp<T: Scalar>(prog: &Slp, bindings: &[T]) -> Result<Vec<T>> {
    prog.eval(bindings)
}

pub fn count_ops(prog: &Slp) -> OpCount {
    prog.count()
}
