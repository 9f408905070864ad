//! Dense row-major matrices, exact (`MatrixQ`) and binary64 (`MatrixF`).

use std::fmt;
use std::str::FromStr;

use crate::coeff::{parse_coeff, Coefficient, Scalar};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Debug)]
pub struct Matrix<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

pub type MatrixQ = Matrix<Coefficient>;
pub type MatrixF = Matrix<f64>;

impl<T: Clone> Matrix<T> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!("{} entries for a {}x{} matrix", data.len(), rows, cols)));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn filled(rows: usize, cols: usize, v: T) -> Self {
        Matrix { rows, cols, data: vec![v; rows * cols] }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Ok(Matrix { rows: rows.len(), cols, data: rows.concat() })
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        let c = self.cols;
        &mut self.data[i * c..(i + 1) * c]
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix { rows: self.cols, cols: self.rows, data }
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let data = idx.iter().flat_map(|&i| self.row(i).to_vec()).collect();
        Matrix { rows: idx.len(), cols: self.cols, data }
    }

    pub fn map<U, F: Fn(&T) -> U>(&self, f: F) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    /// Left-upper `r×c` block.
    pub fn block(&self, i0: usize, j0: usize, r: usize, c: usize) -> Self {
        let mut data = Vec::with_capacity(r * c);
        for i in i0..i0 + r {
            data.extend_from_slice(&self.row(i)[j0..j0 + c]);
        }
        Matrix { rows: r, cols: c, data }
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix::filled(rows, cols, T::zero())
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, T::from_coeff(&Coefficient::one()));
        }
        m
    }

    pub fn matmul(&self, o: &Self) -> Result<Self> {
        if self.cols != o.rows {
            return Err(Error::Shape(format!("{}x{} times {}x{}", self.rows, self.cols, o.rows, o.cols)));
        }
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                for j in 0..o.cols {
                    let v = out.get(i, j).plus(&a.times(o.get(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).fold(T::zero(), |acc, (a, b)| acc.plus(&a.times(b))))
            .collect()
    }

    pub fn sub(&self, o: &Self) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a.minus(b)).collect() }
    }

    /// Kronecker product.
    pub fn kron(&self, o: &Self) -> Self {
        let mut out = Self::zeros(self.rows * o.rows, self.cols * o.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                for k in 0..o.rows {
                    for l in 0..o.cols {
                        out.set(i * o.rows + k, j * o.cols + l, self.get(i, j).times(o.get(k, l)));
                    }
                }
            }
        }
        out
    }
}

impl MatrixQ {
    pub fn to_f64(&self) -> MatrixF {
        self.map(|c| c.to_f64())
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().filter(|c| !c.is_zero()).count()
    }

    pub fn row_nnz(&self, i: usize) -> usize {
        self.row(i).iter().filter(|c| !c.is_zero()).count()
    }

    pub fn col_nnz(&self, j: usize) -> usize {
        (0..self.rows).filter(|&i| !self.get(i, j).is_zero()).count()
    }

    pub fn from_ints(rows: usize, cols: usize, v: &[i64]) -> Self {
        Matrix { rows, cols, data: v.iter().map(|&x| Coefficient::int(x)).collect() }
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (MatrixQ, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else { continue };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = m.get(r, c).inv().expect("nonzero pivot");
            for j in 0..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in 0..m.cols {
                    let v = m.get(i, j) - &(&f * m.get(r, j));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn inverse(&self) -> Result<MatrixQ> {
        if self.rows != self.cols {
            return Err(Error::Shape("inverse of non-square matrix".into()));
        }
        let n = self.rows;
        let mut aug = MatrixQ::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, Coefficient::one());
        }
        let (r, piv) = aug.rref();
        if piv.len() < n || piv[n - 1] >= n {
            return Err(Error::Singular);
        }
        Ok(r.block(0, n, n, n))
    }

    pub fn det(&self) -> Result<Coefficient> {
        if self.rows != self.cols {
            return Err(Error::Shape("determinant of non-square matrix".into()));
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Coefficient::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m.get(i, c).is_zero()) else { return Ok(Coefficient::zero()) };
            if p != c {
                for j in 0..n {
                    m.data.swap(p * n + j, c * n + j);
                }
                det = -det;
            }
            let piv = m.get(c, c).clone();
            det = &det * &piv;
            let inv = piv.inv()?;
            for i in c + 1..n {
                let f = m.get(i, c) * &inv;
                if f.is_zero() {
                    continue;
                }
                for j in c..n {
                    let v = m.get(i, j) - &(&f * m.get(c, j));
                    m.set(i, j, v);
                }
            }
        }
        Ok(det)
    }

    /// Solves `X·self = rhs` for `X` (rows of `rhs` must lie in the row space).
    pub fn solve_left(&self, rhs: &MatrixQ) -> Result<MatrixQ> {
        // X·M = R  ⇔  Mᵀ·Xᵀ = Rᵀ
        let mt = self.transpose();
        let rt = rhs.transpose();
        let n = mt.cols;
        let mut aug = MatrixQ::zeros(mt.rows, n + rt.cols);
        for i in 0..mt.rows {
            for j in 0..n {
                aug.set(i, j, mt.get(i, j).clone());
            }
            for j in 0..rt.cols {
                aug.set(i, n + j, rt.get(i, j).clone());
            }
        }
        let (r, piv) = aug.rref();
        if piv.iter().any(|&p| p >= n) {
            return Err(Error::Singular);
        }
        let mut xt = MatrixQ::zeros(n, rt.cols);
        for (row, &p) in piv.iter().enumerate() {
            for j in 0..rt.cols {
                xt.set(p, j, r.get(row, n + j).clone());
            }
        }
        Ok(xt.transpose())
    }

    /// Basis of the right null space, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<Coefficient>> {
        let (r, piv) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !piv.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Coefficient::zero(); self.cols];
                v[f] = Coefficient::one();
                for (row, &p) in piv.iter().enumerate() {
                    v[p] = -r.get(row, f);
                }
                v
            })
            .collect()
    }

    /// Parses a whitespace-separated coefficient matrix, one row per line.
    pub fn parse(text: &str) -> Result<MatrixQ> {
        let mut rows = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row = line
                .split_whitespace()
                .map(|t| parse_coeff(t).map_err(|e| Error::Parse { line: ln + 1, msg: e.to_string() }))
                .collect::<Result<Vec<_>>>()?;
            if let Some(first) = rows.first() {
                let first: &Vec<Coefficient> = first;
                if first.len() != row.len() {
                    return Err(Error::Parse {
                        line: ln + 1,
                        msg: format!("expected {} entries, found {}", first.len(), row.len()),
                    });
                }
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::Parse { line: 0, msg: "empty matrix".into() });
        }
        MatrixQ::from_rows(&rows)
    }
}

impl FromStr for MatrixQ {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        MatrixQ::parse(s)
    }
}

impl fmt::Display for MatrixQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let toks: Vec<String> = self.row(i).iter().map(|c| c.to_string()).collect();
            writeln!(f, "{}", toks.join(" "))?;
        }
        Ok(())
    }
}

impl MatrixF {
    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    /// Reads the `rows cols` header followed by row-major decimal entries.
    pub fn parse_text(text: &str) -> Result<MatrixF> {
        let mut toks = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim_start().starts_with('#'))
            .flat_map(|(ln, l)| l.split_whitespace().map(move |t| (ln + 1, t)));
        let mut dim = || -> Result<usize> {
            let (ln, t) = toks.next().ok_or(Error::Parse { line: 1, msg: "missing header".into() })?;
            t.parse().map_err(|_| Error::Parse { line: ln, msg: format!("bad dimension `{t}`") })
        };
        let rows = dim()?;
        let cols = dim()?;
        let mut data = Vec::with_capacity(rows * cols);
        for (ln, t) in toks {
            data.push(t.parse::<f64>().map_err(|_| Error::Parse { line: ln, msg: format!("bad number `{t}`") })?);
        }
        if data.len() != rows * cols {
            return Err(Error::Parse { line: 0, msg: format!("expected {} entries, found {}", rows * cols, data.len()) });
        }
        Ok(MatrixF { rows, cols, data })
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.rows, self.cols);
        for i in 0..self.rows {
            let toks: Vec<String> = self.row(i).iter().map(|x| format!("{x:e}")).collect();
            s.push_str(&toks.join(" "));
            s.push('\n');
        }
        s
    }
}
