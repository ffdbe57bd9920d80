//! Source terms: entrainment/deposition exchange, bottom friction, moment
//! relaxation, and the fast/slow split, together with the analytic Jacobian
//! used by the implicit source integrator.

use crate::closures::{exchange_rates, ClosureBundle};
use crate::linalg::Matrix5;
use crate::params::Parameters;
use crate::state::State;
use crate::ModelError;

/// Which part of the source is evaluated.
///
/// `Full` applies quadratic bottom friction `eps |u_b| u_b`. `Fast` applies
/// the linear law `mu u_b` (with `mu = eps |u_b|` when no constant is
/// configured, so that `Fast + Slow` reproduces `Full` at `delta = 1`), and
/// carries friction, moment relaxation, and entrainment. `Slow` carries
/// deposition only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceMode {
    Full,
    Fast,
    Slow,
}

/// Source vector `S(W)`.
///
/// In `Full` mode the exchange rows satisfy
/// `row1 = row4 / (1 - psi) = -row5` exactly.
pub fn source_vector(
    s: &State,
    p: &Parameters,
    cb: &ClosureBundle,
    mode: SourceMode,
) -> Result<[f64; 5], ModelError> {
    s.validate(p)?;
    let q = s.primitive();
    let u_b = q.u_b();
    let ex = exchange_rates(&q, p, cb);
    let relax = 4.0 * p.nu / q.h * q.alpha_1;

    let out = match mode {
        SourceMode::Full => {
            let friction = p.epsilon * u_b.abs() * u_b;
            let f = ex.f_b;
            [
                f,
                -friction + f * u_b,
                -3.0 * (friction + relax) + 2.0 * f * q.alpha_1,
                (ex.e - ex.d),
                -f,
            ]
        }
        SourceMode::Fast => {
            let friction = p.mu_eff(u_b) * u_b;
            let f = ex.e / p.one_minus_psi();
            [
                f,
                -friction + f * u_b,
                -3.0 * (friction + relax) + 2.0 * f * q.alpha_1,
                ex.e,
                -f,
            ]
        }
        SourceMode::Slow => {
            let g = ex.d / p.one_minus_psi();
            [-g, -g * u_b, -2.0 * g * q.alpha_1, -ex.d, g]
        }
    };
    Ok(out)
}

/// Analytic Jacobian `dS/dW` of [`source_vector`], valid at any admissible
/// state. The quadratic friction and the quintic entrainment law are both C^1
/// at `u_b = 0`, so the derivative is continuous there.
pub fn source_jacobian(
    s: &State,
    p: &Parameters,
    cb: &ClosureBundle,
    mode: SourceMode,
) -> Result<Matrix5, ModelError> {
    s.validate(p)?;
    let q = s.primitive();
    let h = q.h;
    let inv_h = 1.0 / h;
    let u_b = q.u_b();
    let alpha = q.alpha_1;
    let one_m_psi = p.one_minus_psi();
    let ex = exchange_rates(&q, p, cb);

    // dE/du_b: E = omega_0 (1-psi) E_s with E_s = a z^5/(1 + b z^5), z = k|u_b|
    let de_du = {
        let k = cb.z_prefactor();
        let z = k * u_b.abs();
        let z4 = z * z * z * z;
        let den = 1.0 + 4.3e-7 * z4 * z;
        let des_dz = 5.0 * 1.3e-7 * z4 / (den * den);
        // des_dz vanishes at z = 0, so the sign convention there is moot
        cb.omega_0 * one_m_psi * des_dz * k * u_b.signum()
    };

    // partials of u_b and alpha_1 with respect to (h, hu_m, h*alpha_1)
    let dub = [-u_b * inv_h, inv_h, inv_h, 0.0];
    let dalpha = [-alpha * inv_h, 0.0, inv_h, 0.0];

    // deposition D = omega_0 s_b (h c_m)/h
    let dd = [-ex.d * inv_h, 0.0, 0.0, cb.omega_0 * cb.s_b * inv_h];

    let mut jac = [[0.0; 5]; 5];
    match mode {
        SourceMode::Full | SourceMode::Fast => {
            let (fric_grad_coeff, f, df): (f64, f64, [f64; 4]) = match mode {
                SourceMode::Full => {
                    // d(eps |u| u)/du = 2 eps |u|
                    let dfr = 2.0 * p.epsilon * u_b.abs();
                    let mut df = [0.0; 4];
                    for i in 0..4 {
                        df[i] = (de_du * dub[i] - dd[i]) / one_m_psi;
                    }
                    (dfr, ex.f_b, df)
                }
                SourceMode::Fast => {
                    let dfr = match p.mu {
                        Some(mu) => mu,
                        None => 2.0 * p.epsilon * u_b.abs(),
                    };
                    let mut df = [0.0; 4];
                    for i in 0..4 {
                        df[i] = de_du * dub[i] / one_m_psi;
                    }
                    (dfr, ex.e / one_m_psi, df)
                }
                SourceMode::Slow => unreachable!(),
            };
            let relax = 12.0 * p.nu * alpha * inv_h;
            for i in 0..4 {
                // row 1: F
                jac[0][i] = df[i];
                // row 2: -fric + F u_b
                jac[1][i] = -fric_grad_coeff * dub[i] + u_b * df[i] + f * dub[i];
                // row 3: -3 fric - 12 nu alpha/h + 2 F alpha
                jac[2][i] = -3.0 * fric_grad_coeff * dub[i] + 2.0 * (alpha * df[i] + f * dalpha[i]);
                // row 4: (1 - psi) F
                jac[3][i] = one_m_psi * df[i];
                // row 5: -F
                jac[4][i] = -df[i];
            }
            // moment relaxation -12 nu (h alpha)/h^2
            jac[2][0] += 2.0 * relax * inv_h; // +24 nu m / h^3
            jac[2][2] += -12.0 * p.nu * inv_h * inv_h;
        }
        SourceMode::Slow => {
            let g = ex.d / one_m_psi;
            let dg = [
                dd[0] / one_m_psi,
                dd[1] / one_m_psi,
                dd[2] / one_m_psi,
                dd[3] / one_m_psi,
            ];
            for i in 0..4 {
                jac[0][i] = -dg[i];
                jac[1][i] = -u_b * dg[i] - g * dub[i];
                jac[2][i] = -2.0 * (alpha * dg[i] + g * dalpha[i]);
                jac[3][i] = -one_m_psi * dg[i];
                jac[4][i] = dg[i];
            }
        }
    }
    Ok(Matrix5::new(jac))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::fd_jacobian;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const SETTLED_EXCHANGE_RATE: f64 = 8.540387004652843; // omega_0 * S_b, frozen

    fn norm(v: &[f64; 5]) -> f64 {
        v.iter().map(|x| x.abs()).fold(0.0, f64::max)
    }

    #[test]
    fn settled_rest_states_are_equilibria() {
        let p = Parameters::default();
        let cb = ClosureBundle::new(&p);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let h = rng.gen_range(0.1..5.0);
            let h_b = rng.gen_range(-1.0..1.0);
            let s = State::new(h, 0.0, 0.0, 0.0, h_b);
            let sv = source_vector(&s, &p, &cb, SourceMode::Full).unwrap();
            assert_eq!(norm(&sv), 0.0, "source must vanish exactly at rest");
        }
    }

    #[test]
    fn suspended_rest_is_fast_equilibrium_only() {
        let p = Parameters::default();
        let cb = ClosureBundle::new(&p);
        let s = State::new(1.0, 0.0, 0.0, 0.01, 0.0);
        let fast = source_vector(&s, &p, &cb, SourceMode::Fast).unwrap();
        assert_eq!(norm(&fast), 0.0);
        let slow = source_vector(&s, &p, &cb, SourceMode::Slow).unwrap();
        assert_abs_diff_eq!(slow[3], -SETTLED_EXCHANGE_RATE * 0.01, epsilon = 1e-14);
        assert!(norm(&slow) > 0.0);
        let full = source_vector(&s, &p, &cb, SourceMode::Full).unwrap();
        assert!(norm(&full) > 0.0, "deposition keeps the full source active");
    }

    #[test]
    fn fast_plus_slow_matches_full_with_linearized_friction() {
        let p = Parameters::default(); // mu: None -> mu_eff = eps |u_b|
        assert!(p.mu.is_none());
        let cb = ClosureBundle::new(&p);
        // ranges keep |S| = O(10) so the absolute tolerance is meaningful
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let h = rng.gen_range(1.0..4.0);
            let u = rng.gen_range(-0.15..0.15);
            let a = rng.gen_range(-0.15..0.15);
            let c = rng.gen_range(0.0..0.3);
            let hb = rng.gen_range(-1.0..1.0);
            let s = State::new(h, h * u, h * a, h * c, hb);
            let full = source_vector(&s, &p, &cb, SourceMode::Full).unwrap();
            let fast = source_vector(&s, &p, &cb, SourceMode::Fast).unwrap();
            let slow = source_vector(&s, &p, &cb, SourceMode::Slow).unwrap();
            for i in 0..5 {
                assert_abs_diff_eq!(fast[i] + slow[i], full[i], epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn full_mode_row_identities_are_exact() {
        let p = Parameters::default();
        let cb = ClosureBundle::new(&p);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let h = rng.gen_range(0.1..5.0);
            let s = State::new(
                h,
                h * rng.gen_range(-1.0..1.0),
                h * rng.gen_range(-1.0..1.0),
                h * rng.gen_range(0.0..0.9),
                rng.gen_range(-1.0..1.0),
            );
            let sv = source_vector(&s, &p, &cb, SourceMode::Full).unwrap();
            assert_eq!(sv[0], sv[3] / (1.0 - p.psi));
            assert_eq!(sv[0], -sv[4]);
        }
    }

    #[test]
    fn rejects_dry_states() {
        let p = Parameters::default();
        let cb = ClosureBundle::new(&p);
        let s = State::new(1e-12, 0.0, 0.0, 0.0, 0.0);
        assert!(source_vector(&s, &p, &cb, SourceMode::Full).is_err());
    }

    #[test]
    fn analytic_jacobian_matches_finite_differences() {
        let mut p = Parameters::default();
        p.mu = Some(2.5); // keep the fast mode differentiable through u_b = 0
        let cb = ClosureBundle::new(&p);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for mode in [SourceMode::Full, SourceMode::Fast, SourceMode::Slow] {
            for _ in 0..20 {
                let h = rng.gen_range(0.3..3.0);
                let s = State::new(
                    h,
                    h * rng.gen_range(-0.6..0.6),
                    h * rng.gen_range(-0.6..0.6),
                    h * rng.gen_range(0.0..0.3),
                    rng.gen_range(-0.5..0.5),
                );
                let analytic = source_jacobian(&s, &p, &cb, mode).unwrap();
                let fd = fd_jacobian(
                    |w| source_vector(&State(*w), &p, &cb, mode),
                    &s.0,
                    1e-6,
                )
                .unwrap();
                let scale = analytic.max_abs().max(1.0);
                for i in 0..5 {
                    for j in 0..5 {
                        assert!(
                            (analytic.m[i][j] - fd.m[i][j]).abs() <= 1e-6 * scale,
                            "mode {mode:?} entry ({i},{j}): analytic {} fd {}",
                            analytic.m[i][j],
                            fd.m[i][j]
                        );
                    }
                }
            }
        }
    }
}
