//! Linear-operator code generation: naive, cancellation-free CSE, kernel split,
//! transposition, and bilinear assembly.

use std::collections::BTreeMap;

use super::build::Builder;
use super::{Op, Slp};
use crate::coeff::Coefficient;
use crate::error::{Error, Result};
use crate::hm::HMRep;
use crate::matrix::MatrixQ;

type Row = Vec<(usize, Coefficient)>;

fn rows_of(m: &MatrixQ) -> Vec<Row> {
    (0..m.rows)
        .map(|i| m.row(i).iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(j, c)| (j, c.clone())).collect())
        .collect()
}

fn finish(b: Builder, outputs: Vec<Option<usize>>) -> Slp {
    Slp::linear(b.n_inputs, b.ops, outputs)
}

/// Row-by-row evaluation: `nnz − #nonzero rows` additions.
pub fn from_matrix_naive(m: &MatrixQ) -> Slp {
    let mut b = Builder::new(m.cols);
    let outs = rows_of(m).iter().map(|r| b.sum(r)).collect();
    finish(b, outs)
}

/// Picks the pair pattern `(j, k, c_k/c_j)` shared by the most rows.
fn best_pair(rows: &[Row]) -> Option<(usize, usize, Coefficient)> {
    // pattern -> (count, first row)
    let mut seen: BTreeMap<(usize, usize, Coefficient), (usize, usize)> = BTreeMap::new();
    for (i, row) in rows.iter().enumerate() {
        for a in 0..row.len() {
            for bb in a + 1..row.len() {
                let (j, cj) = &row[a];
                let (k, ck) = &row[bb];
                let ratio = ck.checked_div(cj).expect("nonzero entries");
                let e = seen.entry((*j, *k, ratio)).or_insert((0, i));
                e.0 += 1;
            }
        }
    }
    seen.into_iter()
        .filter(|(_, (count, _))| *count >= 2)
        .min_by(|(ka, (ca, ra)), (kb, (cb, rb))| {
            cb.cmp(ca).then(ra.cmp(rb)).then((ka.0, ka.1).cmp(&(kb.0, kb.1)))
        })
        .map(|(k, _)| k)
}

fn entry(row: &Row, col: usize) -> Option<&Coefficient> {
    row.iter().find(|(j, _)| *j == col).map(|(_, c)| c)
}

/// Cancellation-free common-subexpression elimination.
pub fn cse_optimize(m: &MatrixQ) -> Slp {
    let mut b = Builder::new(m.cols);
    let mut rows = rows_of(m);
    // column index -> slot; original columns are the inputs
    let mut col_slot: Vec<usize> = (0..m.cols).collect();

    while let Some((j, k, ratio)) = best_pair(&rows) {
        let t = b.sum(&[(col_slot[j], Coefficient::one()), (col_slot[k], ratio.clone())]).expect("two nonzero terms");
        let new_col = col_slot.len();
        col_slot.push(t);
        for row in rows.iter_mut() {
            let (Some(cj), Some(ck)) = (entry(row, j).cloned(), entry(row, k).cloned()) else { continue };
            if ck != &cj * &ratio {
                continue;
            }
            row.retain(|(c, _)| *c != j && *c != k);
            row.push((new_col, cj));
        }
    }

    // equal multipliers (up to sign) shared down a column
    let n_cols = col_slot.len();
    for col in 0..n_cols {
        let mut by_value: BTreeMap<Coefficient, Vec<usize>> = BTreeMap::new();
        for (i, row) in rows.iter().enumerate() {
            if let Some(c) = entry(row, col) {
                if !c.is_unit() {
                    by_value.entry(c.abs()).or_default().push(i);
                }
            }
        }
        for (v, idx) in by_value {
            if idx.len() < 2 {
                continue;
            }
            let u = b.push(Op::Scale(v.clone(), col_slot[col]));
            let new_col = col_slot.len();
            col_slot.push(u);
            for i in idx {
                let row = &mut rows[i];
                let pos = row.iter().position(|(c, _)| *c == col).unwrap();
                let sign = if row[pos].1.signum() < 0 { -Coefficient::one() } else { Coefficient::one() };
                row[pos] = (new_col, sign);
            }
        }
    }

    // equal multipliers (up to sign) within a row
    for row in rows.iter_mut() {
        let mut by_value: BTreeMap<Coefficient, Vec<usize>> = BTreeMap::new();
        for (p, (_, c)) in row.iter().enumerate() {
            if !c.is_unit() {
                by_value.entry(c.abs()).or_default().push(p);
            }
        }
        let mut replaced: Vec<usize> = Vec::new();
        let mut extra: Row = Vec::new();
        for (v, pos) in by_value {
            if pos.len() < 2 {
                continue;
            }
            let terms: Row = pos.iter().map(|&p| (col_slot[row[p].0], row[p].1.checked_div(&v).unwrap())).collect();
            let (s, neg) = b.signed_sum(&terms).expect("nonzero terms");
            let new_col = col_slot.len();
            col_slot.push(s);
            extra.push((new_col, if neg { -v } else { v }));
            replaced.extend(pos);
        }
        if !replaced.is_empty() {
            let mut kept: Row = row.iter().enumerate().filter(|(p, _)| !replaced.contains(p)).map(|(_, e)| e.clone()).collect();
            kept.extend(extra);
            *row = kept;
        }
    }

    let outs = rows
        .iter()
        .map(|r| {
            let terms: Row = r.iter().map(|(c, v)| (col_slot[*c], v.clone())).collect();
            b.sum(&terms)
        })
        .collect();
    finish(b, outs)
}

/// Runs `second` on the outputs of `first`; the combined outputs are `first`'s rows
/// at `idx_first` and `second`'s at `idx_second`.
fn chain(first: &Slp, second: &Slp, idx_first: &[usize], idx_second: &[usize], rows: usize) -> Result<Slp> {
    let mut b = Builder::new(first.inputs.len());
    let map: Vec<usize> = (0..first.inputs.len()).collect();
    let outs1 = b.splice(&first.ops, &map, &first.outputs);
    let feed: Vec<usize> = outs1.iter().map(|o| o.ok_or(Error::Degenerate("zero independent row".into()))).collect::<Result<_>>()?;
    let outs2 = b.splice(&second.ops, &feed, &second.outputs);
    let mut outs = vec![None; rows];
    for (o, &i) in outs1.iter().zip(idx_first) {
        outs[i] = *o;
    }
    for (o, &i) in outs2.iter().zip(idx_second) {
        outs[i] = *o;
    }
    Ok(finish(b, outs))
}

fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < r - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, r, &mut Vec::new(), &mut out);
    out
}

/// Binomial coefficient, saturating.
fn choose(n: usize, r: usize) -> usize {
    (0..r).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

const EXHAUSTIVE_LIMIT: usize = 500;

fn greedy_independent(m: &MatrixQ) -> Vec<usize> {
    let mut order: Vec<usize> = (0..m.rows).collect();
    order.sort_by_key(|&i| (m.row_nnz(i), i));
    let mut chosen: Vec<usize> = Vec::new();
    for i in order {
        let mut trial = chosen.clone();
        trial.push(i);
        if m.select_rows(&trial).rank() == trial.len() {
            chosen = trial;
        }
    }
    chosen.sort();
    chosen
}

/// Computes a basis of independent rows, then the dependent rows as combinations of
/// those outputs. All row subsets are scored when feasible, otherwise sparsest rows
/// are taken greedily; the plain CSE program is kept when it is cheaper.
pub fn kernel_decompose(m: &MatrixQ) -> Slp {
    let direct = cse_optimize(m);
    let nonzero: Vec<usize> = (0..m.rows).filter(|&i| m.row_nnz(i) > 0).collect();
    let r = m.rank();
    if r == 0 || r >= nonzero.len() {
        return direct;
    }
    let sub = m.select_rows(&nonzero);
    let candidates: Vec<Vec<usize>> = if choose(nonzero.len(), r) <= EXHAUSTIVE_LIMIT {
        combinations(nonzero.len(), r).into_iter().filter(|c| sub.select_rows(c).rank() == r).collect()
    } else {
        vec![greedy_independent(&sub)]
    };
    let mut best = direct;
    for cand in candidates {
        let indep = sub.select_rows(&cand);
        let dep_idx: Vec<usize> = (0..nonzero.len()).filter(|i| !cand.contains(i)).collect();
        let dep = sub.select_rows(&dep_idx);
        // dep = K · indep
        let Ok(k) = indep.solve_left(&dep) else { continue };
        let first = cse_optimize(&indep);
        let second = cse_optimize(&k);
        let to_orig = |v: &[usize]| v.iter().map(|&i| nonzero[i]).collect::<Vec<_>>();
        let Ok(prog) = chain(&first, &second, &to_orig(&cand), &to_orig(&dep_idx), m.rows) else { continue };
        if prog.count().key() < best.count().key() {
            best = prog;
        }
    }
    best
}

type Acc = Option<(usize, bool)>;

fn accumulate(b: &mut Builder, acc: &mut Acc, slot: usize, neg: bool) {
    *acc = Some(match acc.take() {
        None => (slot, neg),
        Some((s, sn)) => {
            if sn == neg {
                (b.push(Op::Add(s, slot)), sn)
            } else {
                (b.push(Op::Sub(s, slot)), sn)
            }
        }
    });
}

/// Tellegen transposition: walks the program backwards propagating adjoints.
pub fn transpose_slp(prog: &Slp) -> Result<Slp> {
    if !prog.is_linear() {
        return Err(Error::Invalid("only linear programs can be transposed".into()));
    }
    prog.validate()?;
    let n_out = prog.outputs.len();
    let mut b = Builder::new(n_out);
    let mut adj: Vec<Acc> = vec![None; prog.n_slots()];
    for (i, o) in prog.outputs.iter().enumerate() {
        if let Some(s) = o {
            accumulate(&mut b, &mut adj[*s], i, false);
        }
    }
    let n = prog.inputs.len();
    for (idx, op) in prog.ops.iter().enumerate().rev() {
        let Some((g, gn)) = adj[n + idx] else { continue };
        match op {
            Op::Add(x, y) => {
                accumulate(&mut b, &mut adj[*x], g, gn);
                accumulate(&mut b, &mut adj[*y], g, gn);
            }
            Op::Sub(x, y) => {
                accumulate(&mut b, &mut adj[*x], g, gn);
                accumulate(&mut b, &mut adj[*y], g, !gn);
            }
            Op::Scale(c, x) => {
                let s = b.magnitude(g, c);
                accumulate(&mut b, &mut adj[*x], s, gn ^ (c.signum() < 0));
            }
            Op::Neg(x) => accumulate(&mut b, &mut adj[*x], g, !gn),
            Op::Mul(..) => unreachable!(),
        }
    }
    let outs = (0..n)
        .map(|j| adj[j].map(|(s, neg)| if neg { b.push(Op::Neg(s)) } else { s }))
        .collect();
    let mut t = finish(b, outs);
    t.inputs = prog.output_names.clone();
    t.output_names = prog.inputs.clone();
    Ok(t)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Naive,
    Cse,
    KernelTranspose,
}

impl std::str::FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(Strategy::Naive),
            "cse" => Ok(Strategy::Cse),
            "kernel" | "kernel+transpose" => Ok(Strategy::KernelTranspose),
            other => Err(Error::UnknownName(other.to_string())),
        }
    }
}

fn cheapest(progs: Vec<Slp>) -> Slp {
    progs.into_iter().min_by_key(|p| p.count().key()).expect("at least one program")
}

/// Bilinear program: two linear input programs, `r` products, one output program for `Pᵀ`.
pub fn compile_bilinear(rep: &HMRep, strategy: Strategy) -> Result<Slp> {
    rep.check_shape()?;
    let ptt = rep.pt.transpose();
    let (lp, rp, op) = match strategy {
        Strategy::Naive => (from_matrix_naive(&rep.l), from_matrix_naive(&rep.r), from_matrix_naive(&ptt)),
        Strategy::Cse => (cse_optimize(&rep.l), cse_optimize(&rep.r), cse_optimize(&ptt)),
        Strategy::KernelTranspose => {
            let out = cheapest(vec![cse_optimize(&ptt), kernel_decompose(&ptt), transpose_slp(&kernel_decompose(&rep.pt))?]);
            (kernel_decompose(&rep.l), kernel_decompose(&rep.r), out)
        }
    };
    let (la, lb) = (rep.l.cols, rep.r.cols);
    let mut b = Builder::new(la + lb);
    let lo = b.splice(&lp.ops, &(0..la).collect::<Vec<_>>(), &lp.outputs);
    let ro = b.splice(&rp.ops, &(la..la + lb).collect::<Vec<_>>(), &rp.outputs);
    let mut products = Vec::with_capacity(rep.rank());
    for q in 0..rep.rank() {
        let (Some(x), Some(y)) = (lo[q], ro[q]) else {
            return Err(Error::Degenerate(format!("product {q} has a zero factor")));
        };
        products.push(b.push(Op::Mul(x, y)));
    }
    let outs = b.splice(&op.ops, &products, &op.outputs);
    let names = |p: &str, r: usize, c: usize| -> Vec<String> {
        (0..r).flat_map(|i| (0..c).map(move |j| format!("{p}{}{}", i + 1, j + 1))).collect()
    };
    let mut inputs = names("a", rep.m, rep.k);
    inputs.extend(names("b", rep.k, rep.n));
    let prog = Slp { inputs, left: Some(la), ops: b.ops, outputs: outs, output_names: names("c", rep.m, rep.n) };
    prog.validate()?;
    Ok(prog)
}
