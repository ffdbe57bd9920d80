//! Complex dense eigenvalue solver for matrices of dimension at most eight.
//!
//! The solver reduces to upper Hessenberg form with Householder reflections
//! and then runs an explicitly shifted QR iteration (Wilkinson shift) with
//! Givens rotations. Working in complex arithmetic keeps a single code path
//! for real transport matrices and the complex matrices of the normal-mode
//! analysis, and avoids 2x2 real Schur blocks.

use super::{LinalgError, Matrix5};
use num_complex::Complex64;

pub const MAX_DIM: usize = 8;

/// Dense complex n x n matrix, n <= 8, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    a: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1 && n <= MAX_DIM, "dimension {n} out of range");
        Self {
            n,
            a: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_real(r: &Matrix5) -> Self {
        Self::from_fn(5, |i, j| Complex64::new(r.m[i][j], 0.0))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.a[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.a[i * self.n + j]
    }
}

fn hessenberg(h: &mut CMatrix) {
    let n = h.n;
    for k in 0..n.saturating_sub(2) {
        let norm_x: f64 = ((k + 1)..n).map(|i| h[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm_x == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() > 0.0 {
            x0 / x0.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let alpha = -phase * norm_x;
        // v = x - alpha e1, normalized
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        for i in (k + 1)..n {
            v[i] = h[(i, k)];
        }
        v[k + 1] -= alpha;
        let vnorm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // H <- (I - 2 v v*) H
        for j in 0..n {
            let dot: Complex64 = ((k + 1)..n).map(|i| v[i].conj() * h[(i, j)]).sum();
            for i in (k + 1)..n {
                let delta = 2.0 * v[i] * dot;
                let val = h[(i, j)] - delta;
                h[(i, j)] = val;
            }
        }
        // H <- H (I - 2 v v*)
        for i in 0..n {
            let dot: Complex64 = ((k + 1)..n).map(|j| h[(i, j)] * v[j]).sum();
            for j in (k + 1)..n {
                let val = h[(i, j)] - 2.0 * dot * v[j].conj();
                h[(i, j)] = val;
            }
        }
        for i in (k + 2)..n {
            h[(i, k)] = Complex64::new(0.0, 0.0);
        }
        h[(k + 1, k)] = alpha;
    }
}

/// Eigenvalues of the trailing 2x2 block `[[a, b], [c, d]]`.
fn eig2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let half_tr = 0.5 * (a + d);
    let half_diff = 0.5 * (a - d);
    let disc = (half_diff * half_diff + b * c).sqrt();
    (half_tr + disc, half_tr - disc)
}

/// Complex Givens rotation `G = [[c, s], [-conj(s), c]]` (c real) with
/// `G [a; b] = [r; 0]`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let na = a.norm();
    let nb = b.norm();
    if nb == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    let t = (na * na + nb * nb).sqrt();
    if na == 0.0 {
        return (0.0, b.conj() / nb);
    }
    let c = na / t;
    let s = (a / na) * b.conj() / t;
    (c, s)
}

/// All eigenvalues of `m`.
///
/// `tol` is the requested relative backward-error bound; the iteration always
/// runs to machine-precision deflation, so any `tol >= 1e-13` is attainable.
/// An explicit error is returned if the QR iteration fails to deflate within
/// its iteration cap.
pub fn eigenvalues(m: &CMatrix, tol: f64) -> Result<Vec<Complex64>, LinalgError> {
    assert!(tol > 0.0, "tolerance must be positive");
    if !m.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let n = m.n;
    let mut h = m.clone();
    hessenberg(&mut h);
    let norm = h.norm_inf().max(1e-300);

    let mut eigs = vec![Complex64::new(0.0, 0.0); n];
    let mut hi = n - 1;
    let mut iter_since_deflation = 0usize;
    let mut total_iter = 0usize;
    let cap = 60 * n;

    let negligible = |h: &CMatrix, i: usize| -> bool {
        let scale = h[(i - 1, i - 1)].norm() + h[(i, i)].norm();
        let thresh = if scale > 0.0 {
            f64::EPSILON * scale
        } else {
            f64::EPSILON * norm
        };
        h[(i, i - 1)].norm() <= thresh
    };

    loop {
        // deflate trailing 1x1 blocks
        while hi > 0 && negligible(&h, hi) {
            h[(hi, hi - 1)] = Complex64::new(0.0, 0.0);
            eigs[hi] = h[(hi, hi)];
            hi -= 1;
            iter_since_deflation = 0;
        }
        if hi == 0 {
            eigs[0] = h[(0, 0)];
            break;
        }
        // active block [lo..=hi]
        let mut lo = hi;
        while lo > 0 && !negligible(&h, lo) {
            lo -= 1;
        }
        if hi - lo == 1 {
            let (l1, l2) = eig2(h[(lo, lo)], h[(lo, hi)], h[(hi, lo)], h[(hi, hi)]);
            eigs[hi] = l1;
            eigs[lo] = l2;
            if lo == 0 {
                break;
            }
            h[(lo, lo - 1)] = Complex64::new(0.0, 0.0);
            // mark the block as deflated by zeroing its coupling
            h[(hi, hi - 1)] = Complex64::new(0.0, 0.0);
            h[(lo, lo)] = l2;
            h[(hi, hi)] = l1;
            hi = lo - 1;
            iter_since_deflation = 0;
            continue;
        }

        total_iter += 1;
        iter_since_deflation += 1;
        if total_iter > cap {
            return Err(LinalgError::NonConvergence { iterations: cap });
        }

        let shift = if iter_since_deflation % 12 == 0 {
            // exceptional shift to break symmetry-induced stalls
            h[(hi, hi)] + Complex64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            let (l1, l2) = eig2(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            );
            let target = h[(hi, hi)];
            if (l1 - target).norm() <= (l2 - target).norm() {
                l1
            } else {
                l2
            }
        };

        // explicit shifted QR sweep on the active block
        for i in lo..=hi {
            h[(i, i)] -= shift;
        }
        let mut rotations = Vec::with_capacity(hi - lo);
        for i in lo..hi {
            let (c, s) = givens(h[(i, i)], h[(i + 1, i)]);
            rotations.push((i, c, s));
            for j in i..n {
                let hi_j = h[(i, j)];
                let hi1_j = h[(i + 1, j)];
                h[(i, j)] = c * hi_j + s * hi1_j;
                h[(i + 1, j)] = -s.conj() * hi_j + c * hi1_j;
            }
            h[(i + 1, i)] = Complex64::new(0.0, 0.0);
        }
        for &(i, c, s) in &rotations {
            let upper = (i + 2).min(hi + 1);
            for r in lo..upper.max(i + 2).min(n) {
                let h_ri = h[(r, i)];
                let h_ri1 = h[(r, i + 1)];
                h[(r, i)] = c * h_ri + s.conj() * h_ri1;
                h[(r, i + 1)] = -s * h_ri + c * h_ri1;
            }
        }
        for i in lo..=hi {
            h[(i, i)] += shift;
        }
    }
    Ok(eigs)
}

/// One eigenvector for a computed eigenvalue, by inverse iteration.
pub fn eigenvector(m: &CMatrix, lambda: Complex64) -> Result<Vec<Complex64>, LinalgError> {
    let n = m.n;
    let norm = m.norm_inf().max(1.0);
    // small shift regularization keeps the solve well-posed when lambda is
    // (numerically) an exact eigenvalue
    let shift = lambda + Complex64::new(1e-12 * norm, 1e-13 * norm);
    let shifted = CMatrix::from_fn(n, |i, j| {
        if i == j {
            m[(i, j)] - shift
        } else {
            m[(i, j)]
        }
    });
    let mut v: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(1.0 + 0.31 * i as f64, 0.17 * i as f64))
        .collect();
    normalize(&mut v);
    for _ in 0..4 {
        let mut w = solve_complex(&shifted, &v)?;
        normalize(&mut w);
        v = w;
    }
    Ok(v)
}

fn normalize(v: &mut [Complex64]) {
    let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        for z in v.iter_mut() {
            *z /= norm;
        }
    }
}

fn solve_complex(a: &CMatrix, b: &[Complex64]) -> Result<Vec<Complex64>, LinalgError> {
    let n = a.n;
    let mut lu = a.clone();
    let mut x = b.to_vec();
    for k in 0..n {
        let (pivot_row, pivot_val) = (k..n)
            .map(|i| (i, lu[(i, k)].norm()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if pivot_val == 0.0 {
            return Err(LinalgError::Singular);
        }
        if pivot_row != k {
            for j in 0..n {
                let tmp = lu[(k, j)];
                lu[(k, j)] = lu[(pivot_row, j)];
                lu[(pivot_row, j)] = tmp;
            }
            x.swap(k, pivot_row);
        }
        for i in (k + 1)..n {
            let factor = lu[(i, k)] / lu[(k, k)];
            lu[(i, k)] = factor;
            for j in (k + 1)..n {
                let sub = factor * lu[(k, j)];
                let val = lu[(i, j)] - sub;
                lu[(i, j)] = val;
            }
            let xk = x[k];
            x[i] -= factor * xk;
        }
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        for j in (i + 1)..n {
            s -= lu[(i, j)] * x[j];
        }
        x[i] = s / lu[(i, i)];
    }
    Ok(x)
}

/// Characteristic polynomial of a complex matrix (Faddeev-LeVerrier),
/// leading coefficient first.
pub fn char_poly_complex(m: &CMatrix) -> Vec<Complex64> {
    let n = m.n;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
    coeffs[0] = Complex64::new(1.0, 0.0);
    let mut mk = m.clone();
    for k in 1..=n {
        let trace: Complex64 = (0..n).map(|i| mk[(i, i)]).sum();
        let ck = -trace / k as f64;
        coeffs[k] = ck;
        if k < n {
            let mut shifted = mk.clone();
            for i in 0..n {
                shifted[(i, i)] += ck;
            }
            mk = CMatrix::from_fn(n, |i, j| (0..n).map(|l| m[(i, l)] * shifted[(l, j)]).sum());
        }
    }
    coeffs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted_by_re_im(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn identity_eigenvalues_are_ones() {
        let m = CMatrix::from_real(&Matrix5::identity());
        let eigs = eigenvalues(&m, 1e-10).unwrap();
        for z in eigs {
            assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn diagonal_matrix_returns_diagonal() {
        let d = [2.0, -1.0, 0.5, 3.0, -4.0];
        let m = CMatrix::from_real(&Matrix5::from_diagonal(d));
        let eigs = sorted_by_re_im(eigenvalues(&m, 1e-10).unwrap());
        let mut expected: Vec<f64> = d.to_vec();
        expected.sort_by(f64::total_cmp);
        for (z, e) in eigs.iter().zip(expected.iter()) {
            assert!((z.re - e).abs() < 1e-12 && z.im.abs() < 1e-12);
        }
    }

    #[test]
    fn known_complex_pair() {
        // [[0, -1], [1, 0]] embedded: eigenvalues +-i
        let mut a = Matrix5::from_diagonal([7.0, 7.0, 7.0, 0.0, 0.0]);
        a.m[3][3] = 0.0;
        a.m[3][4] = -1.0;
        a.m[4][3] = 1.0;
        a.m[4][4] = 0.0;
        let eigs = eigenvalues(&CMatrix::from_real(&a), 1e-10).unwrap();
        let n_i = eigs
            .iter()
            .filter(|z| (*z - Complex64::new(0.0, 1.0)).norm() < 1e-10)
            .count();
        let n_mi = eigs
            .iter()
            .filter(|z| (*z - Complex64::new(0.0, -1.0)).norm() < 1e-10)
            .count();
        assert_eq!((n_i, n_mi), (1, 1), "eigenvalues: {eigs:?}");
    }

    #[test]
    fn eigen_pairs_have_small_backward_error() {
        // pseudo-random complex matrix with entries in [-1, 1]
        let mut seed = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        for _ in 0..10 {
            let m = CMatrix::from_fn(5, |_, _| Complex64::new(next(), next()));
            let norm = m.norm_inf();
            let eigs = eigenvalues(&m, 1e-10).unwrap();
            assert_eq!(eigs.len(), 5);
            for &lambda in &eigs {
                let v = eigenvector(&m, lambda).unwrap();
                let mv = m.mul_vec(&v);
                let resid: f64 = mv
                    .iter()
                    .zip(v.iter())
                    .map(|(a, b)| (a - lambda * b).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                assert!(
                    resid <= 10.0 * 1e-10 * norm,
                    "residual {resid:.3e} too large for lambda {lambda}"
                );
            }
            // characteristic polynomial must vanish at each eigenvalue
            let cp = char_poly_complex(&m);
            for &lambda in &eigs {
                let mut acc = Complex64::new(0.0, 0.0);
                for &c in &cp {
                    acc = acc * lambda + c;
                }
                assert!(
                    acc.norm() <= 1e-10 * norm.powi(5).max(1.0),
                    "char poly residual {:.3e}",
                    acc.norm()
                );
            }
        }
    }

    #[test]
    fn defective_jordan_block_eigenvalues_cluster_at_zero() {
        // 2-Jordan block at 0 plus distinct entries: eigenvalues should come
        // back within a sqrt(eps)-sized cluster of zero.
        let mut a = Matrix5::zeros();
        a.m[0][1] = 1.0;
        a.m[2][2] = 2.0;
        a.m[3][3] = -3.0;
        a.m[4][4] = 5.0;
        let eigs = eigenvalues(&CMatrix::from_real(&a), 1e-10).unwrap();
        let near_zero = eigs.iter().filter(|z| z.norm() < 1e-6).count();
        assert_eq!(near_zero, 2, "eigenvalues: {eigs:?}");
    }
}
