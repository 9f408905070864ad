use super::{parse_slp, Slp};
use crate::error::{Error, Result};

const ASOPT: &str = "
t1 = [1/3*s3] a22
t2 = a21 + t1
s1 = [1/3*s3] b21
s2 = s1 - b11
t3 = a12 + t2
l1 = [1/2*s3] a11 + [1/2] t3
s3 = s2 + b22
r1 = [2] s1
l2 = a12 - t1
l3 = t2
r2 = s2
r3 = s1 - b22
l4 = [2] t1
l5 = l2 - l1
r4 = [1/2] s3 - [1/2*s3] b12
r5 = r3 + r4
l6 = l5 + l4
l7 = l5 + l3
r6 = r1 - r5
r7 = r5 - r2
p1 = l1 * r1
p2 = l2 * r2
p3 = l3 * r3
p4 = l4 * r4
p5 = l5 * r5
p6 = l6 * r6
p7 = l7 * r7
w2 = p5 + p1 + p6
w1 = p7 + p6
w3 = w2 - p2
w5 = [1/2](p4 + w2)
c12 = p1 - p3 - w5
c21 = w3 - w5
c22 = [1*s3] w5
c11 = [1/3*s3](w3 - c12 - [2] w1)
";

// `t3 = a12 - r1`: printed with `+`, which does not realize the formula.
const POWERS: &str = "
r1 = [1/2] a22
t2 = a21 - r1
u1 = [1/2] b12
s1 = b11 + u1
t3 = a12 - r1
t0 = t2 - t3
s2 = u1 - b22
u2 = s1 - b22
t4 = a21 + r1
r2 = t2 - a12
s4 = b22 + u1
s0 = s1 - s4
t5 = a11 + [1/2] r2
t1 = t5 - t0
s3 = [1/2] u2 - b21
s5 = s0 - s2
p1 = t0 * s0
p2 = t1 * s1
p3 = t2 * s2
p4 = t3 * s3
p5 = t4 * s4
p6 = t5 * s5
p7 = (t4 - t0) * (s0 - s3)
c22 = p5 + p3
v1 = p1 - p6 - p3
v2 = p7 + p6
v3 = p4 + v1
v4 = [1/2] c22
c12 = p2 + v1 + v4
c21 = v2 + v3 + v4
c11 = [1/2](c12 + v2 - v3)
";

const POWROT: &str = "
u1 = [1/2] a12 + a22
t1 = [10/9] u1
t2 = [8/9] a11 - [2/3] a12
t4 = [10/9] a12
t3 = [8/9] a21 + [4/9](a11 + u1)
t0 = t2 - t3
t5 = t1 + t0
t6 = t4 + t0
v1 = [1/2] b12
s1 = v1 - b22
s2 = v1 - b11
s3 = [5/4] b12
s4 = [2/5] b22 - [4/5] b21 + [3/5] s2
s0 = s1 + s4
s5 = s0 - s2
s6 = s3 - s0
p0 = t0 * s0
p1 = t1 * s1
p2 = t2 * s2
p3 = t3 * s3
p4 = t4 * s4
p5 = t5 * s5
p6 = t6 * s6
w1 = p6 + p0 + p4
w2 = p5 + p6
w3 = p3 + w1
w4 = p2 + p4
w5 = p1 + w1
w6 = [9/20] w3
c11 = w6 - [9/8] w4
c12 = [9/10] w3
c21 = [27/40] w5 - [9/8] w2 + [1/2] c11
c22 = w6 - [9/10] w5
";

const SCHWARTZOPT: &str = "
s1 = a11 + a12
s2 = a11 + a22
s3 = a11 - a21
t1 = b12 + b22
t2 = b11 + b12
t3 = b12 + b21
p1 = a11 * b12
p2 = s1 * b21
p3 = a21 * t1
p4 = a12 * t2
p5 = s2 * b22
p6 = a22 * t3
p7 = s3 * b11
c11 = p7 - p6
c12 = p2 + p3
c21 = p4 - p5
c22 = p1 + p2 + p5 + p6
";

const WINOGRAD: &str = "
s1 = a21 + a22
s2 = s1 - a11
s3 = a11 - a21
s4 = a12 - s2
t1 = b12 - b11
t2 = b22 - t1
t3 = b22 - b12
t4 = t2 - b21
p1 = a11 * b11
p2 = a12 * b21
p3 = s4 * b22
p4 = a22 * t4
p5 = s1 * t1
p6 = s2 * t2
p7 = s3 * t3
c11 = p1 + p2
u2 = p1 + p6
u3 = u2 + p7
u4 = u2 + p5
c12 = u4 + p3
c21 = u3 - p4
c22 = u3 + p5
";

const STRASSEN: &str = "
p1 = (a11 + a22) * (b11 + b22)
p2 = (a21 + a22) * b11
p3 = a11 * (b12 - b22)
p4 = a22 * (b21 - b11)
p5 = (a11 + a12) * b22
p6 = (a21 - a11) * (b11 + b12)
p7 = (a12 - a22) * (b21 + b22)
c11 = p1 + p4 - p5 + p7
c12 = p3 + p5
c21 = p2 + p4
c22 = p1 - p2 + p3 + p6
";

const ROW_MAJOR: [&str; 8] = ["a11", "a12", "a21", "a22", "b11", "b12", "b21", "b22"];
/// The `a_ij`, `b_ij` labels of this table name the transposed entries.
const TRANSPOSED: [&str; 8] = ["a11", "a21", "a12", "a22", "b11", "b21", "b12", "b22"];
const OUT: [&str; 4] = ["c11", "c12", "c21", "c22"];

pub fn slp_names() -> &'static [&'static str] {
    &["asopt", "powers", "powrot", "schwartzopt", "winograd", "strassen"]
}

/// Hand-written programs; each realizes the catalog formula of the same name.
pub fn catalog_slp(name: &str) -> Result<Slp> {
    let (text, inputs) = match name {
        "asopt" => (ASOPT, &TRANSPOSED),
        "powers" => (POWERS, &ROW_MAJOR),
        "powrot" => (POWROT, &ROW_MAJOR),
        "schwartzopt" => (SCHWARTZOPT, &ROW_MAJOR),
        "winograd" => (WINOGRAD, &ROW_MAJOR),
        "strassen" => (STRASSEN, &ROW_MAJOR),
        other => return Err(Error::UnknownName(other.to_string())),
    };
    parse_slp(text, inputs, Some(4), &OUT)
}
