//! Cyclic Jacobi diagonalization for small dense symmetric matrices.

pub type Mat4 = [[f64; 4]; 4];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenPairs {
    /// Ascending.
    pub values: [f64; 4],
    /// `vectors[k]` belongs to `values[k]`; first significant component positive.
    pub vectors: [[f64; 4]; 4],
}

const MAX_SWEEPS: usize = 64;

fn off_norm2(a: &Mat4) -> f64 {
    let mut s = 0.0;
    for (i, row) in a.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            if i != j {
                s += x * x;
            }
        }
    }
    s
}

pub fn frobenius(a: &Mat4) -> f64 {
    a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
}

/// Eigenpairs of a symmetric 4×4 matrix. Only the upper triangle is trusted;
/// the input is symmetrized first.
pub fn jacobi_eigen(h: &Mat4) -> EigenPairs {
    let mut a = *h;
    for i in 0..4 {
        for j in i + 1..4 {
            let m = 0.5 * (a[i][j] + a[j][i]);
            a[i][j] = m;
            a[j][i] = m;
        }
    }
    let mut v = [[0.0; 4]; 4];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let scale = frobenius(&a);
    let target = (1e-15 * scale).powi(2);
    for _ in 0..MAX_SWEEPS {
        if off_norm2(&a) <= target {
            break;
        }
        for p in 0..3 {
            for q in p + 1..4 {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..4 {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..4 {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut order = [0usize, 1, 2, 3];
    let diag = [a[0][0], a[1][1], a[2][2], a[3][3]];
    // Stable sort keeps ties in input order; ties then differ only by the
    // sign convention applied below.
    order.sort_by(|&x, &y| diag[x].total_cmp(&diag[y]));
    let mut values = [0.0; 4];
    let mut vectors = [[0.0; 4]; 4];
    for (slot, &k) in order.iter().enumerate() {
        values[slot] = diag[k];
        let mut vec = [v[0][k], v[1][k], v[2][k], v[3][k]];
        let first = vec.iter().copied().find(|x| x.abs() > 1e-12).unwrap_or(1.0);
        if first < 0.0 {
            for x in vec.iter_mut() {
                *x = -*x;
            }
        }
        vectors[slot] = vec;
    }
    EigenPairs { values, vectors }
}

pub fn mat_vec(h: &Mat4, x: &[f64; 4]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (o, row) in out.iter_mut().zip(h.iter()) {
        *o = row.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
    }
    out
}

/// max_k ‖H v_k − E_k v_k‖.
pub fn max_residual(h: &Mat4, pairs: &EigenPairs) -> f64 {
    pairs
        .values
        .iter()
        .zip(pairs.vectors.iter())
        .map(|(e, v)| {
            let hv = mat_vec(h, v);
            hv.iter()
                .zip(v.iter())
                .map(|(a, b)| (a - e * b).powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max)
}
