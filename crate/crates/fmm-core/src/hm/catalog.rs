//! Exact transcriptions of the 2×2×2 formulas shipped with the crate.

use super::{parse_hm, HMRep};
use crate::coeff::Coefficient;
use crate::error::{Error, Result};
use crate::matrix::{Matrix, MatrixQ};

const STRASSEN: &str = include_str!("../../data/strassen.hm");
const WINOGRAD: &str = include_str!("../../data/winograd.hm");
const POWERS: &str = include_str!("../../data/powers.hm");
const POWROT: &str = include_str!("../../data/powrot.hm");
const ASOPT: &str = include_str!("../../data/asopt.hm");
const APPROX0695: &str = include_str!("../../data/approx0695.hm");
const APPROX0661: &str = include_str!("../../data/approx0661.hm");
const SCHWARTZ_SPARSE: &str = include_str!("../../data/schwartz_sparse.hm");
const SCHWARTZOPT: &str = include_str!("../../data/schwartzopt.hm");
const COB_ALTERNATIVE: &str = include_str!("../../data/cob_alternative.txt");

/// Names accepted by [`catalog`].
pub fn catalog_names() -> &'static [&'static str] {
    &[
        "strassen",
        "winograd",
        "powers",
        "powrot",
        "asopt",
        "schwartz_sparse",
        "schwartzopt",
        "approx0695",
        "approx0661",
        "conventional",
    ]
}

/// Looks up a formula by name.
///
/// `schwartz_sparse` and `schwartzopt` are alternative-basis cores, not matrix
/// products on their own; `cob_alternative` is served by [`alternative_basis`].
pub fn catalog(name: &str) -> Result<HMRep> {
    let text = match name {
        "strassen" => STRASSEN,
        "winograd" => WINOGRAD,
        "powers" => POWERS,
        "powrot" => POWROT,
        "asopt" => ASOPT,
        "approx0695" => APPROX0695,
        "approx0661" => APPROX0661,
        "schwartz_sparse" => SCHWARTZ_SPARSE,
        "schwartzopt" => SCHWARTZOPT,
        "conventional" => return Ok(conventional(2, 2, 2)),
        "cob_alternative" => {
            return Err(Error::Invalid("`cob_alternative` is a basis triple; use alternative_basis()".into()))
        }
        other => return Err(Error::UnknownName(other.to_string())),
    };
    Ok(parse_hm(text).expect("embedded catalog entry parses").with_name(name))
}

/// The rank-`mkn` schoolbook decomposition, products ordered by `(i, j, l)`.
pub fn conventional(m: usize, k: usize, n: usize) -> HMRep {
    let r = m * k * n;
    let mut l = MatrixQ::zeros(r, m * k);
    let mut rr = MatrixQ::zeros(r, k * n);
    let mut pt = MatrixQ::zeros(r, m * n);
    let mut q = 0;
    for i in 0..m {
        for j in 0..k {
            for c in 0..n {
                l.set(q, i * k + j, Coefficient::one());
                rr.set(q, j * n + c, Coefficient::one());
                pt.set(q, i * n + c, Coefficient::one());
                q += 1;
            }
        }
    }
    HMRep { m, k, n, l, r: rr, pt, name: Some("conventional".into()) }
}

/// A change of basis `(C_L, C_R, C_P)` turning a core `⟨S_L, S_R, S_P⟩` into
/// `⟨S_L·C_L, S_R·C_R, S_P·C_P⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct CobTriple {
    pub left: MatrixQ,
    pub right: MatrixQ,
    pub product: MatrixQ,
}

impl CobTriple {
    pub fn identity(size: usize) -> Self {
        CobTriple { left: Matrix::identity(size), right: Matrix::identity(size), product: Matrix::identity(size) }
    }

    /// The formula obtained by composing `core` with this basis change.
    pub fn compose(&self, core: &HMRep) -> Result<HMRep> {
        HMRep::new(
            core.m,
            core.k,
            core.n,
            core.l.matmul(&self.left)?,
            core.r.matmul(&self.right)?,
            core.pt.matmul(&self.product)?,
        )
    }

    pub fn nnz(&self) -> usize {
        self.left.nnz() + self.right.nnz() + self.product.nnz()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut parts: Vec<(String, Vec<&str>)> = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            if matches!(line, "L" | "R" | "P") {
                parts.push((line.to_string(), Vec::new()));
            } else if let Some(last) = parts.last_mut() {
                last.1.push(line);
            } else {
                return Err(Error::Parse { line: 0, msg: "matrix rows before a section tag".into() });
            }
        }
        let get = |tag: &str| -> Result<MatrixQ> {
            let (_, rows) = parts
                .iter()
                .find(|(t, _)| t == tag)
                .ok_or_else(|| Error::Parse { line: 0, msg: format!("missing `{tag}` section") })?;
            MatrixQ::parse(&rows.join("\n"))
        };
        Ok(CobTriple { left: get("L")?, right: get("R")?, product: get("P")? })
    }

    pub fn to_text(&self) -> String {
        format!("L\n{}R\n{}P\n{}", self.left, self.right, self.product)
    }
}

/// The three 4×4 basis-change matrices pairing `schwartz_sparse` with `asopt`.
pub fn alternative_basis() -> CobTriple {
    CobTriple::parse(COB_ALTERNATIVE).expect("embedded basis parses")
}
