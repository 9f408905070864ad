use crate::error::{Error, Result};
use crate::matrix::MatrixF;

/// `c = a·b` for `h×h` row-major buffers, i-k-j order.
pub(crate) fn conventional_into(a: &[f64], b: &[f64], c: &mut [f64], h: usize) {
    c[..h * h].fill(0.0);
    for i in 0..h {
        let ci = &mut c[i * h..(i + 1) * h];
        for k in 0..h {
            let aik = a[i * h + k];
            let bk = &b[k * h..(k + 1) * h];
            for (x, y) in ci.iter_mut().zip(bk) {
                *x += aik * y;
            }
        }
    }
}

fn conformant(a: &MatrixF, b: &MatrixF) -> Result<()> {
    if a.cols != b.rows {
        return Err(Error::Shape(format!("{}x{} times {}x{}", a.rows, a.cols, b.rows, b.cols)));
    }
    Ok(())
}

/// Triple loop in binary64, i-k-j order.
pub fn conventional_multiply(a: &MatrixF, b: &MatrixF) -> Result<MatrixF> {
    conformant(a, b)?;
    let (m, k, n) = (a.rows, a.cols, b.cols);
    let mut c = vec![0.0; m * n];
    for i in 0..m {
        let ci = &mut c[i * n..(i + 1) * n];
        for l in 0..k {
            let ail = a.data[i * k + l];
            for (x, y) in ci.iter_mut().zip(&b.data[l * n..(l + 1) * n]) {
                *x += ail * y;
            }
        }
    }
    Ok(MatrixF { rows: m, cols: n, data: c })
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Dot products accumulated in double-double (error-free sums and products): the
/// rounded value and its tail, so `hi + lo` carries about 106 bits.
pub fn reference_multiply_dd(a: &MatrixF, b: &MatrixF) -> Result<(MatrixF, MatrixF)> {
    conformant(a, b)?;
    let (m, n) = (a.rows, b.cols);
    let bt = b.transpose();
    let mut his = Vec::with_capacity(m * n);
    let mut los = Vec::with_capacity(m * n);
    for i in 0..m {
        let ai = a.row(i);
        for j in 0..n {
            let (mut hi, mut lo) = (0.0f64, 0.0f64);
            for (x, y) in ai.iter().zip(bt.row(j)) {
                let (p, pe) = two_prod(*x, *y);
                let (s, se) = two_sum(hi, p);
                hi = s;
                lo += pe + se;
            }
            let (s, e) = two_sum(hi, lo);
            his.push(s);
            los.push(e);
        }
    }
    Ok((MatrixF { rows: m, cols: n, data: his }, MatrixF { rows: m, cols: n, data: los }))
}

/// Compensated product rounded to binary64; the ground truth for error measurement.
pub fn reference_multiply(a: &MatrixF, b: &MatrixF) -> Result<MatrixF> {
    Ok(reference_multiply_dd(a, b)?.0)
}
