//! Dense linear algebra for the 5x5 matrices of the model and the small
//! complex matrices of the spectral analysis.
//!
//! Everything here is written for matrices of dimension at most eight, so
//! plain O(n^3) routines are used throughout. The rank and clustering
//! tolerances are named constants because the weak-hyperbolicity verdicts
//! depend on them.

mod eigen;
mod roots;

pub use eigen::{char_poly_complex, eigenvalues, eigenvector, CMatrix};
pub use roots::{real_poly_roots, spectral_radius};

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

/// Pivot magnitudes below `RANK_TOLERANCE_FACTOR * max_abs(m)` count as zero
/// when ranks and nullspaces are computed.
pub const RANK_TOLERANCE_FACTOR: f64 = 1e-9;

/// Eigenvalues within `CLUSTER_TOLERANCE_FACTOR * (1 + norm)` of each other
/// are grouped into one algebraic cluster before multiplicities are compared.
pub const CLUSTER_TOLERANCE_FACTOR: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is singular at the configured rank tolerance")]
    Singular,
    #[error("eigenvalue iteration did not converge within {iterations} iterations")]
    NonConvergence { iterations: usize },
    #[error("non-finite matrix entry")]
    NonFinite,
}

/// Dense real 5x5 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Matrix5 {
    pub m: [[f64; 5]; 5],
}

impl Matrix5 {
    pub const fn new(m: [[f64; 5]; 5]) -> Self {
        Self { m }
    }

    pub fn zeros() -> Self {
        Self { m: [[0.0; 5]; 5] }
    }

    pub fn identity() -> Self {
        let mut m = [[0.0; 5]; 5];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        Self { m }
    }

    pub fn from_diagonal(d: [f64; 5]) -> Self {
        let mut m = [[0.0; 5]; 5];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = d[i];
        }
        Self { m }
    }

    pub fn transpose(&self) -> Self {
        let mut out = [[0.0; 5]; 5];
        for i in 0..5 {
            for j in 0..5 {
                out[j][i] = self.m[i][j];
            }
        }
        Self { m: out }
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        let mut out = [[0.0; 5]; 5];
        for i in 0..5 {
            for k in 0..5 {
                let a = self.m[i][k];
                if a != 0.0 {
                    for j in 0..5 {
                        out[i][j] += a * rhs.m[k][j];
                    }
                }
            }
        }
        Self { m: out }
    }

    pub fn mul_vec(&self, v: &[f64; 5]) -> [f64; 5] {
        let mut out = [0.0; 5];
        for i in 0..5 {
            let mut s = 0.0;
            for j in 0..5 {
                s += self.m[i][j] * v[j];
            }
            out[i] = s;
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.m;
        for i in 0..5 {
            for j in 0..5 {
                out[i][j] += rhs.m[i][j];
            }
        }
        Self { m: out }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let mut out = self.m;
        for i in 0..5 {
            for j in 0..5 {
                out[i][j] -= rhs.m[i][j];
            }
        }
        Self { m: out }
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.m;
        for row in out.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        Self { m: out }
    }

    /// `self - shift * I`.
    pub fn shifted(&self, shift: f64) -> Self {
        let mut out = self.m;
        for (i, row) in out.iter_mut().enumerate() {
            row[i] -= shift;
        }
        Self { m: out }
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        self.m
            .iter()
            .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.m
            .iter()
            .flatten()
            .map(|v| v.abs())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|v| v.is_finite())
    }

    /// Simultaneous row/column permutation: `out[i][j] = m[perm[i]][perm[j]]`.
    pub fn permute(&self, perm: &[usize; 5]) -> Self {
        let mut out = [[0.0; 5]; 5];
        for i in 0..5 {
            for j in 0..5 {
                out[i][j] = self.m[perm[i]][perm[j]];
            }
        }
        Self { m: out }
    }
}

/// Characteristic polynomial by the Faddeev-LeVerrier recursion.
///
/// Coefficients are returned leading-first: `[1, c4, c3, c2, c1, c0]` for
/// `l^5 + c4 l^4 + c3 l^3 + c2 l^2 + c1 l + c0`.
pub fn char_poly(a: &Matrix5) -> [f64; 6] {
    let mut coeffs = [0.0; 6];
    coeffs[0] = 1.0;
    let mut mk = *a;
    for k in 1..=5 {
        let trace: f64 = (0..5).map(|i| mk.m[i][i]).sum();
        let ck = -trace / k as f64;
        coeffs[k] = ck;
        if k < 5 {
            let mut shifted = mk;
            for (i, row) in shifted.m.iter_mut().enumerate() {
                row[i] += ck;
            }
            mk = a.matmul(&shifted);
        }
    }
    coeffs
}

/// Evaluate a leading-first polynomial at a complex point.
pub fn eval_poly(coeffs: &[f64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in coeffs {
        acc = acc * z + c;
    }
    acc
}

struct Echelon {
    u: [[f64; 5]; 5],
    col_perm: [usize; 5],
    rank: usize,
}

/// Gaussian elimination with full pivoting; `tol` is the absolute pivot
/// threshold below which entries count as zero.
fn echelon(a: &Matrix5, tol: f64) -> Echelon {
    let mut u = a.m;
    let mut col_perm = [0usize, 1, 2, 3, 4];
    let mut rank = 5;
    for k in 0..5 {
        let mut best = (k, k, 0.0f64);
        for i in k..5 {
            for j in k..5 {
                let v = u[i][j].abs();
                if v > best.2 {
                    best = (i, j, v);
                }
            }
        }
        if best.2 <= tol {
            rank = k;
            break;
        }
        u.swap(k, best.0);
        if best.1 != k {
            for row in u.iter_mut() {
                row.swap(k, best.1);
            }
            col_perm.swap(k, best.1);
        }
        for i in (k + 1)..5 {
            let factor = u[i][k] / u[k][k];
            u[i][k] = 0.0;
            for j in (k + 1)..5 {
                u[i][j] -= factor * u[k][j];
            }
        }
    }
    Echelon { u, col_perm, rank }
}

/// Numerical rank with absolute pivot tolerance `tol`.
pub fn rank(a: &Matrix5, tol: f64) -> usize {
    echelon(a, tol).rank
}

/// Orthonormal basis of the nullspace at absolute pivot tolerance `tol`.
pub fn nullspace(a: &Matrix5, tol: f64) -> Vec<[f64; 5]> {
    let e = echelon(a, tol);
    let mut basis = Vec::new();
    for free in e.rank..5 {
        let mut x = [0.0; 5];
        x[free] = 1.0;
        for i in (0..e.rank).rev() {
            let mut s = 0.0;
            for j in (i + 1)..5 {
                s += e.u[i][j] * x[j];
            }
            x[i] = -s / e.u[i][i];
        }
        let mut v = [0.0; 5];
        for (pos, &orig) in e.col_perm.iter().enumerate() {
            v[orig] = x[pos];
        }
        basis.push(v);
    }
    // modified Gram-Schmidt
    let mut ortho: Vec<[f64; 5]> = Vec::with_capacity(basis.len());
    for mut v in basis {
        for q in &ortho {
            let dot: f64 = v.iter().zip(q.iter()).map(|(a, b)| a * b).sum();
            for i in 0..5 {
                v[i] -= dot * q[i];
            }
        }
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            for x in v.iter_mut() {
                *x /= norm;
            }
            ortho.push(v);
        }
    }
    ortho
}

/// Matrix inverse by Gauss-Jordan elimination with partial pivoting.
pub fn inverse(a: &Matrix5) -> Result<Matrix5, LinalgError> {
    if !a.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let tol = RANK_TOLERANCE_FACTOR * a.max_abs().max(1e-300);
    let mut aug = [[0.0f64; 10]; 5];
    for i in 0..5 {
        aug[i][..5].copy_from_slice(&a.m[i]);
        aug[i][5 + i] = 1.0;
    }
    for k in 0..5 {
        let (pivot_row, pivot_val) = (k..5)
            .map(|i| (i, aug[i][k].abs()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if pivot_val <= tol {
            return Err(LinalgError::Singular);
        }
        aug.swap(k, pivot_row);
        let inv_pivot = 1.0 / aug[k][k];
        for j in 0..10 {
            aug[k][j] *= inv_pivot;
        }
        for i in 0..5 {
            if i != k {
                let factor = aug[i][k];
                if factor != 0.0 {
                    for j in 0..10 {
                        aug[i][j] -= factor * aug[k][j];
                    }
                }
            }
        }
    }
    let mut out = [[0.0; 5]; 5];
    for i in 0..5 {
        out[i].copy_from_slice(&aug[i][5..]);
    }
    Ok(Matrix5::new(out))
}

/// Solve `a x = b` by LU with partial pivoting.
pub fn lu_solve(a: &Matrix5, b: &[f64; 5]) -> Result<[f64; 5], LinalgError> {
    let mut lu = a.m;
    let mut x = *b;
    for k in 0..5 {
        let (pivot_row, pivot_val) = (k..5)
            .map(|i| (i, lu[i][k].abs()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if pivot_val == 0.0 || !pivot_val.is_finite() {
            return Err(LinalgError::Singular);
        }
        lu.swap(k, pivot_row);
        x.swap(k, pivot_row);
        for i in (k + 1)..5 {
            let factor = lu[i][k] / lu[k][k];
            lu[i][k] = factor;
            for j in (k + 1)..5 {
                lu[i][j] -= factor * lu[k][j];
            }
            x[i] -= factor * x[k];
        }
    }
    for i in (0..5).rev() {
        let mut s = x[i];
        for j in (i + 1)..5 {
            s -= lu[i][j] * x[j];
        }
        x[i] = s / lu[i][i];
    }
    Ok(x)
}

/// Eigenvalues of the symmetrized part of `a`, sorted ascending, by cyclic
/// Jacobi rotations.
pub fn symmetric_eigs(a: &Matrix5) -> [f64; 5] {
    let mut s = [[0.0f64; 5]; 5];
    for i in 0..5 {
        for j in 0..5 {
            s[i][j] = 0.5 * (a.m[i][j] + a.m[j][i]);
        }
    }
    let scale = a.max_abs().max(1e-300);
    for _sweep in 0..64 {
        let mut off = 0.0f64;
        for i in 0..5 {
            for j in (i + 1)..5 {
                off = off.max(s[i][j].abs());
            }
        }
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..5 {
            for q in (p + 1)..5 {
                if s[p][q].abs() <= 1e-18 * scale {
                    continue;
                }
                let theta = (s[q][q] - s[p][p]) / (2.0 * s[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..5 {
                    let skp = s[k][p];
                    let skq = s[k][q];
                    s[k][p] = c * skp - sn * skq;
                    s[k][q] = sn * skp + c * skq;
                }
                for k in 0..5 {
                    let spk = s[p][k];
                    let sqk = s[q][k];
                    s[p][k] = c * spk - sn * sqk;
                    s[q][k] = sn * spk + c * sqk;
                }
            }
        }
    }
    let mut eigs = [s[0][0], s[1][1], s[2][2], s[3][3], s[4][4]];
    eigs.sort_by(f64::total_cmp);
    eigs
}

/// Central-difference Jacobian of a 5-vector function with a relative step.
pub fn fd_jacobian<E, F>(f: F, w: &[f64; 5], rel_step: f64) -> Result<Matrix5, E>
where
    F: Fn(&[f64; 5]) -> Result<[f64; 5], E>,
{
    let mut jac = [[0.0; 5]; 5];
    for j in 0..5 {
        let mut h = rel_step * w[j].abs().max(1.0);
        // make the step exactly representable
        let tmp = w[j] + h;
        h = tmp - w[j];
        let mut wp = *w;
        let mut wm = *w;
        wp[j] = w[j] + h;
        wm[j] = w[j] - h;
        let fp = f(&wp)?;
        let fm = f(&wm)?;
        for i in 0..5 {
            jac[i][j] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    Ok(Matrix5::new(jac))
}
