use std::fmt::Write as _;
use std::path::Path;

use super::{HMRep, HMRepF};
use crate::coeff::parse_coeff;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn header_field(tok: &str, key: &str, line: usize) -> Result<usize> {
    let v = tok
        .strip_prefix(key)
        .and_then(|t| t.strip_prefix('='))
        .ok_or_else(|| perr(line, format!("expected `{key}=<int>`, found `{tok}`")))?;
    let v: usize = v.parse().map_err(|_| perr(line, format!("bad integer in `{tok}`")))?;
    if v == 0 {
        return Err(perr(line, format!("`{key}` must be positive")));
    }
    Ok(v)
}

/// Parses the HM text format.
pub fn parse_hm(text: &str) -> Result<HMRep> {
    let name = text
        .lines()
        .map(str::trim)
        .take_while(|l| l.is_empty() || l.starts_with('#'))
        .find_map(|l| l.strip_prefix("# name:").map(|n| n.trim().to_string()));
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hl, header) = lines.next().ok_or_else(|| perr(1, "missing HM header"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 5 || toks[0] != "HM" {
        return Err(perr(hl, "header must read `HM r=<int> m=<int> k=<int> n=<int>`"));
    }
    let r = header_field(toks[1], "r", hl)?;
    let m = header_field(toks[2], "m", hl)?;
    let k = header_field(toks[3], "k", hl)?;
    let n = header_field(toks[4], "n", hl)?;

    let mut blocks = Vec::new();
    for (label, width) in [("L", m * k), ("R", k * n), ("Pt", m * n)] {
        let (ln, tag) = lines.next().ok_or_else(|| perr(0, format!("missing `{label}` section")))?;
        if tag != label {
            return Err(perr(ln, format!("expected `{label}`, found `{tag}`")));
        }
        let mut data = Vec::with_capacity(r * width);
        for row in 0..r {
            let (ln, line) = lines
                .next()
                .ok_or_else(|| perr(0, format!("`{label}` has {row} rows, header says r={r}")))?;
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != width {
                return Err(perr(ln, format!("`{label}` row {} has {} entries, expected {width}", row + 1, toks.len())));
            }
            for t in toks {
                data.push(parse_coeff(t).map_err(|e| perr(ln, e.to_string()))?);
            }
        }
        blocks.push(Matrix { rows: r, cols: width, data });
    }
    if let Some((ln, extra)) = lines.next() {
        return Err(perr(ln, format!("unexpected content `{extra}`")));
    }
    let pt = blocks.pop().unwrap();
    let rr = blocks.pop().unwrap();
    let l = blocks.pop().unwrap();
    let mut rep = HMRep::new(m, k, n, l, rr, pt)?;
    rep.name = name;
    Ok(rep)
}

pub fn to_hm_string(rep: &HMRep) -> String {
    let mut s = String::new();
    if let Some(name) = &rep.name {
        let _ = writeln!(s, "# name: {name}");
    }
    let _ = writeln!(s, "HM r={} m={} k={} n={}", rep.rank(), rep.m, rep.k, rep.n);
    for (label, mat) in [("L", &rep.l), ("R", &rep.r), ("Pt", &rep.pt)] {
        let _ = writeln!(s, "{label}");
        s.push_str(&mat.to_string());
    }
    s
}

pub fn read_hm(path: impl AsRef<Path>) -> Result<HMRep> {
    parse_hm(&std::fs::read_to_string(path)?)
}

pub fn write_hm(rep: &HMRep, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_hm_string(rep))?;
    Ok(())
}

/// Same layout as [`to_hm_string`] with decimal entries.
pub fn to_hm_string_f64(rep: &HMRepF) -> String {
    let mut s = String::new();
    if let Some(name) = &rep.name {
        let _ = writeln!(s, "# name: {name}");
    }
    let _ = writeln!(s, "HM r={} m={} k={} n={}", rep.l.rows, rep.m, rep.k, rep.n);
    for (label, mat) in [("L", &rep.l), ("R", &rep.r), ("Pt", &rep.pt)] {
        let _ = writeln!(s, "{label}");
        for i in 0..mat.rows {
            let toks: Vec<String> = mat.row(i).iter().map(|x| if x.abs() < 1e-14 { "0".to_string() } else { x.to_string() }).collect();
            let _ = writeln!(s, "{}", toks.join(" "));
        }
    }
    s
}
