//! Quasilinear transport matrix `A(W)` and the bedload flux derivatives that
//! populate its bed-evolution row.

use crate::closures::{bedload_discharge, mixture_density, shields_parameter, ClosureBundle};
use crate::linalg::Matrix5;
use crate::params::Parameters;
use crate::state::{Primitive, State};
use crate::ModelError;

/// Derivatives `(delta_h, delta_q, delta_c)` of `Q_b/(1-psi)` with respect to
/// `h`, `h u_m` (identically `h alpha_1`), and `h c_m`.
///
/// Below the critical Shields number all three vanish; at `theta > theta_c`
/// they follow the closed forms of the Meyer-Peter-Muller closure. The
/// positive part `(theta - theta_c)_+^{1/2}` is clamped to zero at the
/// threshold without smoothing.
pub fn delta_coefficients(q: &Primitive, p: &Parameters, cb: &ClosureBundle) -> (f64, f64, f64) {
    let u_b = q.u_b();
    let rho = mixture_density(q.c_m, p);
    let theta = shields_parameter(u_b, rho, p);
    let excess = theta - p.theta_c;
    if excess <= 0.0 || u_b == 0.0 {
        return (0.0, 0.0, 0.0);
    }
    let drho = p.rho_s - p.rho_w;
    let delta_q = 24.0 * cb.q / p.one_minus_psi() * u_b.signum() * rho * p.epsilon
        / (p.g * drho * p.d_s)
        * excess.sqrt()
        * u_b
        / q.h;
    let delta_h = -u_b * (1.0 + q.c_m * drho / (2.0 * rho)) * delta_q;
    let delta_c = u_b * drho / (2.0 * rho) * delta_q;
    (delta_h, delta_q, delta_c)
}

/// Bedload flux `Q_b / (1 - psi)` entering the bed-evolution row.
pub fn exner_flux(q: &Primitive, p: &Parameters, cb: &ClosureBundle) -> f64 {
    let rho = mixture_density(q.c_m, p);
    bedload_discharge(q.u_b(), rho, p, cb) / p.one_minus_psi()
}

/// Transport matrix `A(W)` with respect to the conservative variables.
pub fn transport_matrix(
    s: &State,
    p: &Parameters,
    cb: &ClosureBundle,
) -> Result<Matrix5, ModelError> {
    s.validate(p)?;
    let q = s.primitive();
    let rho = mixture_density(q.c_m, p);
    let drho = p.rho_s - p.rho_w;
    let gh = p.g * q.h;
    // baroclinic coupling coefficient g h (rho_s - rho_w) / (2 rho)
    let beta = gh * drho / (2.0 * rho);
    let (delta_h, delta_q, delta_c) = delta_coefficients(&q, p, cb);

    let m = [
        [0.0, 1.0, 0.0, 0.0, 0.0],
        [
            gh - q.u_m * q.u_m - q.alpha_1 * q.alpha_1 / 3.0 - q.c_m * beta,
            2.0 * q.u_m,
            2.0 * q.alpha_1 / 3.0,
            beta,
            gh,
        ],
        [
            -2.0 * q.alpha_1 * q.u_m - q.c_m * beta,
            2.0 * q.alpha_1,
            q.u_m,
            beta,
            0.0,
        ],
        [-q.c_m * q.u_m, q.c_m, 0.0, q.u_m, 0.0],
        [delta_h, delta_q, delta_q, delta_c, 0.0],
    ];
    Ok(Matrix5::new(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::char_poly;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rest_state(h: f64, h_b: f64) -> State {
        State::new(h, 0.0, 0.0, 0.0, h_b)
    }

    #[test]
    fn mass_row_is_unit_momentum() {
        let p = Parameters::default();
        let cb = ClosureBundle::new(&p);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let h = rng.gen_range(0.1..5.0);
            let s = State::new(
                h,
                h * rng.gen_range(-1.0..1.0),
                h * rng.gen_range(-1.0..1.0),
                h * rng.gen_range(0.0..0.5),
                rng.gen_range(-1.0..1.0),
            );
            let a = transport_matrix(&s, &p, &cb).unwrap();
            assert_eq!(a.m[0], [0.0, 1.0, 0.0, 0.0, 0.0]);
        }
    }

    #[test]
    fn rest_matrix_matches_reduced_form() {
        let p = Parameters::default();
        let cb = ClosureBundle::new(&p);
        let h = 1.3;
        let a = transport_matrix(&rest_state(h, 0.2), &p, &cb).unwrap();
        let gh = p.g * h;
        let b = gh * (p.rho_s - p.rho_w) / (2.0 * p.rho_w);
        let expected = [
            [0.0, 1.0, 0.0, 0.0, 0.0],
            [gh, 0.0, 0.0, b, gh],
            [0.0, 0.0, 0.0, b, 0.0],
            [0.0, 0.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0, 0.0],
        ];
        for i in 0..5 {
            for j in 0..5 {
                assert_abs_diff_eq!(a.m[i][j], expected[i][j], epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn suspended_rest_matrix_matches_reduced_form() {
        let p = Parameters::default();
        let cb = ClosureBundle::new(&p);
        let (h, c_m) = (1.0, 0.01);
        let s = State::new(h, 0.0, 0.0, h * c_m, 0.0);
        let a = transport_matrix(&s, &p, &cb).unwrap();
        let gh = p.g * h;
        let rho = mixture_density(c_m, &p);
        let beta = gh * (p.rho_s - p.rho_w) / (2.0 * rho);
        // frozen independent evaluation of beta at these values
        assert_abs_diff_eq!(beta, 7.961878996556813, epsilon = 1e-12);
        let expected = [
            [0.0, 1.0, 0.0, 0.0, 0.0],
            [gh - c_m * beta, 0.0, 0.0, beta, gh],
            [-c_m * beta, 0.0, 0.0, beta, 0.0],
            [0.0, c_m, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0, 0.0],
        ];
        for i in 0..5 {
            for j in 0..5 {
                assert_abs_diff_eq!(a.m[i][j], expected[i][j], epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn rest_characteristic_polynomial_factors() {
        let p = Parameters::default();
        let cb = ClosureBundle::new(&p);
        for h in [0.5, 1.0, 2.7] {
            let a = transport_matrix(&rest_state(h, 0.0), &p, &cb).unwrap();
            let cp = char_poly(&a);
            let expected = [1.0, 0.0, -p.g * h, 0.0, 0.0, 0.0];
            for (c, e) in cp.iter().zip(expected.iter()) {
                assert_abs_diff_eq!(c, e, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn delta_row_vanishes_below_critical_shear() {
        let p = Parameters::default();
        let cb = ClosureBundle::new(&p);
        // tiny velocity keeps theta below theta_c
        let h = 1.0;
        let u = 1e-4;
        let s = State::new(h, h * u, 0.0, 0.0, 0.0);
        let a = transport_matrix(&s, &p, &cb).unwrap();
        assert_eq!(a.m[4], [0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn delta_coefficients_match_finite_differences_of_the_flux() {
        let p = Parameters::default();
        let cb = ClosureBundle::new(&p);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let h = rng.gen_range(0.5..2.0);
            let u = rng.gen_range(0.05..0.8) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let a1 = rng.gen_range(-0.05..0.05);
            let c = rng.gen_range(0.0..0.05);
            let s = State::new(h, h * u, h * a1, h * c, 0.0);
            let q = s.primitive();
            let theta = shields_parameter(q.u_b(), mixture_density(q.c_m, &p), &p);
            if theta <= p.theta_c + 0.01 {
                continue;
            }
            let (dh, dq, dc) = delta_coefficients(&q, &p, &cb);
            let flux = |w: &[f64; 5]| -> Result<[f64; 5], ModelError> {
                let st = State(*w);
                st.validate(&p)?;
                let f = exner_flux(&st.primitive(), &p, &cb);
                Ok([f, 0.0, 0.0, 0.0, 0.0])
            };
            let jac = crate::linalg::fd_jacobian(flux, &s.0, 1e-7).unwrap();
            let scale = dq.abs().max(1.0);
            assert_abs_diff_eq!(jac.m[0][0], dh, epsilon = 1e-5 * scale);
            assert_abs_diff_eq!(jac.m[0][1], dq, epsilon = 1e-5 * scale);
            assert_abs_diff_eq!(jac.m[0][2], dq, epsilon = 1e-5 * scale);
            assert_abs_diff_eq!(jac.m[0][3], dc, epsilon = 1e-5 * scale);
        }
    }
}
