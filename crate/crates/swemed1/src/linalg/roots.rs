//! Polynomial root finding for spectral-radius estimates.
//!
//! The transport matrix is 5x5, so its spectral radius is obtained from the
//! characteristic polynomial: exact trailing zero coefficients are deflated
//! (zero eigenvalues), degrees one and two are solved in closed form, and the
//! rest goes through a Durand-Kerner iteration. The solver loop feeds the
//! previous step's roots back in as warm starts, which cuts the iteration
//! count to a handful per cell.

use super::{char_poly, eval_poly, Matrix5};
use num_complex::Complex64;

const MAX_ITER: usize = 80;

/// Roots of a real polynomial given leading-first coefficients.
///
/// `warm` optionally supplies initial guesses (extra entries are ignored,
/// missing ones are filled from a standard circle).
pub fn real_poly_roots(coeffs: &[f64], warm: Option<&[Complex64]>) -> Vec<Complex64> {
    assert!(!coeffs.is_empty() && coeffs[0] != 0.0, "leading coefficient must be nonzero");
    let degree = coeffs.len() - 1;
    let monic: Vec<f64> = coeffs.iter().map(|c| c / coeffs[0]).collect();

    // deflate exact zero roots
    let mut tail_zeros = 0;
    while tail_zeros < degree && monic[degree - tail_zeros] == 0.0 {
        tail_zeros += 1;
    }
    let d = degree - tail_zeros;
    let mut roots = vec![Complex64::new(0.0, 0.0); tail_zeros];
    let reduced = &monic[..=d];

    match d {
        0 => {}
        1 => roots.push(Complex64::new(-reduced[1], 0.0)),
        2 => {
            let b = Complex64::new(reduced[1], 0.0);
            let c = Complex64::new(reduced[2], 0.0);
            let disc = (b * b - 4.0 * c).sqrt();
            roots.push((-b + disc) / 2.0);
            roots.push((-b - disc) / 2.0);
        }
        _ => {
            roots.extend(durand_kerner(reduced, warm));
        }
    }
    roots
}

fn durand_kerner(monic: &[f64], warm: Option<&[Complex64]>) -> Vec<Complex64> {
    let d = monic.len() - 1;
    // Cauchy bound on the root moduli
    let bound = 1.0 + monic[1..].iter().map(|c| c.abs()).fold(0.0, f64::max);
    let scale = bound.max(1e-30);
    // scale roots to O(1): q(w) = p(scale * w) / scale^d
    let scaled: Vec<f64> = monic
        .iter()
        .enumerate()
        .map(|(k, c)| c / scale.powi(k as i32))
        .collect();

    let mut z: Vec<Complex64> = Vec::with_capacity(d);
    if let Some(w) = warm {
        let mut candidates: Vec<Complex64> = w.iter().map(|r| r / scale).collect();
        candidates.sort_by(|a, b| b.norm_sqr().total_cmp(&a.norm_sqr()));
        for c in candidates.into_iter().take(d) {
            z.push(c);
        }
    }
    while z.len() < d {
        let k = z.len();
        let angle = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / d as f64;
        z.push(Complex64::from_polar(0.9, angle));
    }
    // ensure distinct starting points
    for i in 0..d {
        for j in 0..i {
            if (z[i] - z[j]).norm() < 1e-9 {
                z[i] += Complex64::new(1e-6 * (i + 1) as f64, 2e-6 * (j + 1) as f64);
            }
        }
    }

    for _ in 0..MAX_ITER {
        let mut max_update = 0.0f64;
        for i in 0..d {
            let p = eval_poly(&scaled, z[i]);
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..d {
                if j != i {
                    denom *= z[i] - z[j];
                }
            }
            if denom.norm() < 1e-280 {
                z[i] += Complex64::new(1e-8, 1e-8);
                max_update = f64::MAX;
                continue;
            }
            let delta = p / denom;
            z[i] -= delta;
            max_update = max_update.max(delta.norm());
        }
        if max_update <= 5e-15 {
            break;
        }
    }
    z.iter().map(|w| w * scale).collect()
}

/// Spectral radius of a real 5x5 matrix via its characteristic polynomial.
///
/// Returns the radius together with the full root set, which callers can
/// feed back in as the warm start for a nearby matrix.
pub fn spectral_radius(a: &Matrix5, warm: Option<&[Complex64]>) -> (f64, [Complex64; 5]) {
    let coeffs = char_poly(a);
    let roots = real_poly_roots(&coeffs, warm);
    let mut out = [Complex64::new(0.0, 0.0); 5];
    for (slot, r) in out.iter_mut().zip(roots.iter()) {
        *slot = *r;
    }
    let radius = roots.iter().map(|z| z.norm()).fold(0.0, f64::max);
    (radius, out)
}
