//! Alternative-basis sparsification: `rep = ⟨S_L·C_L, S_R·C_R, S_P·C_P⟩` with a sparse core `S`.

use crate::coeff::Coefficient;
use crate::error::{Error, Result};
use crate::growth::gamma21;
use crate::hm::{CobTriple, HMRep};
use crate::matrix::MatrixQ;

#[derive(Clone, Debug)]
pub struct Sparsified {
    pub cob: CobTriple,
    pub sparse: HMRep,
}

/// One admissible core with its ranking data.
#[derive(Clone, Debug)]
pub struct CoreCandidate {
    pub sparse: HMRep,
    pub cob: CobTriple,
    /// Additions of the naive program for the core.
    pub adds: usize,
    pub gamma: f64,
    pub cob_nnz: usize,
}

/// Sparse bases of one component's column space, each as a `rows × rank` matrix.
#[derive(Clone, Debug)]
struct Basis {
    s: MatrixQ,
    c: MatrixQ,
}

fn is_signed_unit(c: &Coefficient) -> bool {
    c.is_zero() || c.is_unit()
}

fn normalize(v: Vec<Coefficient>) -> Vec<Coefficient> {
    let Some(lead) = v.iter().find(|c| !c.is_zero()).cloned() else { return v };
    v.iter().map(|c| c.checked_div(&lead).unwrap()).collect()
}

/// Minimal-support vectors of the column space of `m`.
fn circuits(m: &MatrixQ) -> Vec<Vec<Coefficient>> {
    let r = m.rank();
    let mut found: Vec<Vec<Coefficient>> = Vec::new();
    let rows: Vec<usize> = (0..m.rows).collect();
    for z in subsets(&rows, r - 1) {
        let mz = m.select_rows(&z);
        if mz.rank() != r - 1 {
            continue;
        }
        let null = mz.nullspace();
        if null.len() != m.cols - (r - 1) {
            continue;
        }
        // restrict to the column space: combinations of null vectors mapped through m
        for v in null {
            let w = normalize(m.matvec(&v));
            if w.iter().any(|c| !c.is_zero()) && !found.contains(&w) {
                found.push(w);
            }
        }
    }
    found.sort_by_key(|w| w.iter().filter(|c| !c.is_zero()).count());
    found
}

fn subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if items.len() < k {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        for mut rest in subsets(&items[i + 1..], k - 1) {
            rest.insert(0, x);
            out.push(rest);
        }
    }
    out
}

fn columns_to_matrix(cols: &[&Vec<Coefficient>], rows: usize) -> MatrixQ {
    let mut s = MatrixQ::zeros(rows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        for i in 0..rows {
            s.set(i, j, c[i].clone());
        }
    }
    s
}

/// `C` with `S·C = M`, from any independent rows of `S`.
fn solve_cob(s: &MatrixQ, m: &MatrixQ) -> Option<MatrixQ> {
    let (_, pivots) = s.transpose().rref();
    let idx: Vec<usize> = pivots;
    if idx.len() != s.cols {
        return None;
    }
    let si = s.select_rows(&idx);
    let c = si.inverse().ok()?.matmul(&m.select_rows(&idx)).ok()?;
    (s.matmul(&c).ok()? == *m).then_some(c)
}

/// Orders and signs the basis so that `C` is as close to the identity as possible.
fn canonical(s: MatrixQ, c: MatrixQ) -> Basis {
    let k = s.cols;
    let mut order: Vec<usize> = (0..k).collect();
    let lead = |i: usize| c.row(i).iter().position(|x| !x.is_zero()).unwrap_or(usize::MAX);
    order.sort_by_key(|&i| (lead(i), i));
    let mut s2 = MatrixQ::zeros(s.rows, k);
    let mut c2 = MatrixQ::zeros(k, c.cols);
    for (new, &old) in order.iter().enumerate() {
        let flip = c.row(old).iter().find(|x| !x.is_zero()).is_some_and(|x| x.signum() < 0);
        for i in 0..s.rows {
            let v = s.get(i, old).clone();
            s2.set(i, new, if flip { -v } else { v });
        }
        for j in 0..c.cols {
            let v = c.get(old, j).clone();
            c2.set(new, j, if flip { -v } else { v });
        }
    }
    Basis { s: s2, c: c2 }
}

/// All minimum-nnz bases made of `{0, ±1}` circuits, or the densest-free fallback of
/// minimum-nnz circuits with arbitrary entries when no signed-unit basis exists.
fn sparse_bases(m: &MatrixQ) -> Vec<Basis> {
    let r = m.rank();
    let all = circuits(m);
    let units: Vec<&Vec<Coefficient>> = all.iter().filter(|w| w.iter().all(is_signed_unit)).collect();
    let pool: Vec<&Vec<Coefficient>> = if units.len() >= r { units } else { all.iter().collect() };
    let mut best: Vec<Basis> = Vec::new();
    let mut best_nnz = usize::MAX;
    for pick in subsets(&(0..pool.len()).collect::<Vec<_>>(), r) {
        let cols: Vec<&Vec<Coefficient>> = pick.iter().map(|&i| pool[i]).collect();
        let s = columns_to_matrix(&cols, m.rows);
        if s.rank() != r {
            continue;
        }
        let nnz = s.nnz();
        if nnz > best_nnz {
            continue;
        }
        let Some(c) = solve_cob(&s, m) else { continue };
        if nnz < best_nnz {
            best.clear();
            best_nnz = nnz;
        }
        best.push(canonical(s, c));
    }
    best
}

fn core_adds(rep: &HMRep) -> usize {
    rep.naive_op_counts().add_sub
}

/// Every combination of minimum-nnz per-component bases, ranked by additions, growth
/// factor of the core, basis-change density, then lexicographically.
pub fn sparse_cores(rep: &HMRep) -> Result<Vec<CoreCandidate>> {
    if (rep.m, rep.k, rep.n) != (2, 2, 2) {
        return Err(Error::Shape("sparsification handles 2x2x2 formulas".into()));
    }
    let (bl, br, bp) = (sparse_bases(&rep.l), sparse_bases(&rep.r), sparse_bases(&rep.pt));
    let mut out = Vec::new();
    for l in &bl {
        for r in &br {
            for p in &bp {
                let sparse = HMRep::new(2, 2, 2, l.s.clone(), r.s.clone(), p.s.clone())?;
                if sparse.l.cols != 4 || sparse.r.cols != 4 || sparse.pt.cols != 4 {
                    continue;
                }
                let cob = CobTriple { left: l.c.clone(), right: r.c.clone(), product: p.c.clone() };
                out.push(CoreCandidate { adds: core_adds(&sparse), gamma: gamma21(&sparse), cob_nnz: cob.nnz(), sparse, cob });
            }
        }
    }
    out.sort_by(|a, b| {
        a.adds
            .cmp(&b.adds)
            .then(a.gamma.total_cmp(&b.gamma))
            .then(a.cob_nnz.cmp(&b.cob_nnz))
            .then_with(|| key(a).cmp(&key(b)))
    });
    Ok(out)
}

fn key(c: &CoreCandidate) -> Vec<Coefficient> {
    [&c.sparse.l, &c.sparse.r, &c.sparse.pt].iter().flat_map(|m| m.data.iter().cloned()).collect()
}

/// Best-ranked sparse core; the identity basis when nothing beats the input.
pub fn sparsify_cob(rep: &HMRep) -> Result<Sparsified> {
    let identity = Sparsified { cob: CobTriple::identity(4), sparse: rep.clone() };
    let Some(best) = sparse_cores(rep)?.into_iter().next() else { return Ok(identity) };
    let input_key = (core_adds(rep), gamma21(rep));
    if (best.adds, best.gamma) >= input_key && rep.l.data.iter().chain(&rep.r.data).chain(&rep.pt.data).all(is_signed_unit) {
        return Ok(identity);
    }
    let mut sparse = best.sparse;
    sparse.name = rep.name.as_ref().map(|n| format!("{n}_sparse"));
    Ok(Sparsified { cob: best.cob, sparse })
}

