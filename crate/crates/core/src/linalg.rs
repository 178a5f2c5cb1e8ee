//! Small dense complex linear algebra.

use num_complex::Complex64;

pub type Mat2 = [[Complex64; 2]; 2];
pub type Mat4 = [[Complex64; 4]; 4];
pub type Vec4 = [Complex64; 4];

pub fn det2(m: &Mat2) -> Complex64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Adjugate-over-determinant inverse; `None` when `|det| <= guard`.
pub fn inv2(m: &Mat2, guard: f64) -> Option<Mat2> {
    let det = det2(m);
    if !(det.norm() > guard) {
        return None;
    }
    let r = 1.0 / det;
    Some([[m[1][1] * r, -m[0][1] * r], [-m[1][0] * r, m[0][0] * r]])
}

pub fn mul2(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn transpose2(m: &Mat2) -> Mat2 {
    [[m[0][0], m[1][0]], [m[0][1], m[1][1]]]
}

/// Row-major reshape of (AA, AB, BA, BB) into a 2x2 matrix (layer-1 row index).
pub fn reshape(v: &Vec4) -> Mat2 {
    [[v[0], v[1]], [v[2], v[3]]]
}

pub fn flatten(m: &Mat2) -> Vec4 {
    [m[0][0], m[0][1], m[1][0], m[1][1]]
}

/// `a (x) b` in the same basis order as [`reshape`].
pub fn kron2(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut out = [[Complex64::new(0.0, 0.0); 4]; 4];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[2 * i + k][2 * j + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn norm4(v: &Vec4) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Gaussian elimination with partial pivoting. Reference path for the
/// Kronecker-structured solver.
pub fn solve_dense4(a: &Mat4, b: &Vec4) -> Option<Vec4> {
    let mut m = *a;
    let mut x = *b;
    for col in 0..4 {
        let pivot = (col..4)
            .max_by(|&i, &j| m[i][col].norm().total_cmp(&m[j][col].norm()))
            .unwrap();
        if m[pivot][col].norm() == 0.0 {
            return None;
        }
        m.swap(col, pivot);
        x.swap(col, pivot);
        for row in col + 1..4 {
            let factor = m[row][col] / m[col][col];
            for k in col..4 {
                let sub = factor * m[col][k];
                m[row][k] -= sub;
            }
            let sub = factor * x[col];
            x[row] -= sub;
        }
    }
    for col in (0..4).rev() {
        let mut acc = x[col];
        for k in col + 1..4 {
            acc -= m[col][k] * x[k];
        }
        x[col] = acc / m[col][col];
    }
    Some(x)
}
