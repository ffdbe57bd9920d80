//! Empirical closures: mixture density, Shields stress, Meyer-Peter-Muller
//! bedload capacity, settling velocity, entrainment and deposition, the
//! reconstructed velocity profile, and the constants generated by the linear
//! basis polynomial.

use crate::params::Parameters;
use crate::state::Primitive;

/// Derived closure constants that depend only on [`Parameters`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosureBundle {
    /// Settling velocity [m/s].
    pub omega_0: f64,
    /// Particle Reynolds number [-].
    pub r_p: f64,
    /// Entrainment exponents; `(1, 0.6)` when `r_p > 2.36`, else `(0.586, 1.23)`.
    pub gamma_1: f64,
    pub gamma_2: f64,
    /// Near-bed concentration factor [-].
    pub s_b: f64,
    /// Characteristic discharge `sqrt((rho_s/rho_w - 1) g d_s^3)`.
    pub q: f64,
    /// Precomputed prefactor so that `Z = z_coeff * |u_b|`.
    z_coeff: f64,
}

impl ClosureBundle {
    pub fn new(p: &Parameters) -> Self {
        let omega_0 = settling_velocity(p);
        let r_p = (p.rho_s - p.rho_w).mul_add(p.g * p.d_s, 0.0).sqrt() * p.d_s / p.nu_w;
        let (gamma_1, gamma_2) = if r_p > 2.36 { (1.0, 0.6) } else { (0.586, 1.23) };
        let s_b = 0.4 * (p.d_s / p.d_sg).powf(1.64) + 1.64;
        let q = ((p.rho_s / p.rho_w - 1.0) * p.g * p.d_s.powi(3)).sqrt();
        let z_coeff = gamma_1 * p.c_d.sqrt() * r_p.powf(gamma_2) / omega_0;
        Self {
            omega_0,
            r_p,
            gamma_1,
            gamma_2,
            s_b,
            q,
            z_coeff,
        }
    }

    /// Prefactor of the entrainment argument, `Z = z_prefactor * |u_b|`.
    pub fn z_prefactor(&self) -> f64 {
        self.z_coeff
    }
}

/// Depth-averaged mixture density `rho = rho_w + c_m (rho_s - rho_w)`.
pub fn mixture_density(c_m: f64, p: &Parameters) -> f64 {
    p.rho_w + c_m * (p.rho_s - p.rho_w)
}

/// Shields parameter `theta = rho eps u_b^2 / (g (rho_s - rho_w) d_s)`.
pub fn shields_parameter(u_b: f64, rho: f64, p: &Parameters) -> f64 {
    rho * p.epsilon * u_b * u_b / (p.g * (p.rho_s - p.rho_w) * p.d_s)
}

/// Meyer-Peter-Muller capacity `Phi = 8 (theta - theta_c)_+^{3/2}`.
pub fn mpm_capacity(theta: f64, p: &Parameters) -> f64 {
    let excess = theta - p.theta_c;
    if excess <= 0.0 {
        0.0
    } else {
        8.0 * excess * excess.sqrt()
    }
}

/// Bedload discharge `Q_b = sgn(u_b) Q Phi(theta)`, with `sgn(0) := 0`.
pub fn bedload_discharge(u_b: f64, rho: f64, p: &Parameters, cb: &ClosureBundle) -> f64 {
    if u_b == 0.0 {
        return 0.0;
    }
    let theta = shields_parameter(u_b, rho, p);
    u_b.signum() * cb.q * mpm_capacity(theta, p)
}

/// Settling velocity
/// `omega_0 = sqrt((13.95 nu_w/d_s)^2 + 1.09 rho_w (rho_s/rho_w - 1) g d_s) - 13.95 nu_w/d_s`.
pub fn settling_velocity(p: &Parameters) -> f64 {
    let a = 13.95 * p.nu_w / p.d_s;
    (a * a + 1.09 * p.rho_w * (p.rho_s / p.rho_w - 1.0) * p.g * p.d_s).sqrt() - a
}

/// Entrainment coefficient `E_s = 1.3e-7 Z^5 / (1 + 4.3e-7 Z^5)` with
/// `Z = gamma_1 sqrt(c_D) |u_b| R_p^{gamma_2} / omega_0`.
pub fn entrainment_coefficient(u_b: f64, cb: &ClosureBundle) -> f64 {
    let z = cb.z_coeff * u_b.abs();
    let z5 = z * z * z * z * z;
    1.3e-7 * z5 / (1.0 + 4.3e-7 * z5)
}

/// Entrainment, deposition, and net bed exchange rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExchangeRates {
    /// Entrainment rate `E = omega_0 (1 - psi) E_s`.
    pub e: f64,
    /// Deposition rate `D = omega_0 S_b c_m`.
    pub d: f64,
    /// Net bed exchange `F_b = (E - D) / (1 - psi)`.
    pub f_b: f64,
}

pub fn exchange_rates(q: &Primitive, p: &Parameters, cb: &ClosureBundle) -> ExchangeRates {
    let e = cb.omega_0 * p.one_minus_psi() * entrainment_coefficient(q.u_b(), cb);
    let d = cb.omega_0 * cb.s_b * q.c_m;
    ExchangeRates {
        e,
        d,
        f_b: (e - d) / p.one_minus_psi(),
    }
}

/// Reconstructed velocity profile `u(zeta) = u_m + alpha_1 (1 - 2 zeta)`.
pub fn velocity_profile(u_m: f64, alpha_1: f64, zeta: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&zeta));
    u_m + alpha_1 * (1.0 - 2.0 * zeta)
}

/// Constants generated by the scaled linear basis polynomial
/// `phi_1(zeta) = 1 - 2 zeta`, evaluated by Gauss quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegendreConstants {
    /// `3 int phi^3`
    pub a111: f64,
    /// `3 int phi' (int_0^z phi) phi`
    pub b111: f64,
    /// `int (phi')^2`
    pub c11: f64,
    /// `3 int phi phi'`
    pub g11: f64,
    /// `3 int z phi phi'`
    pub h11: f64,
    /// `int z phi`
    pub k1: f64,
}

// 8-point Gauss-Legendre nodes and weights on [-1, 1]; exact for the
// polynomial integrands here.
const GAUSS8: [(f64, f64); 8] = [
    (-0.9602898564975363, 0.10122853629037626),
    (-0.7966664774136267, 0.22238103445337447),
    (-0.5255324099163290, 0.31370664587788729),
    (-0.1834346424956498, 0.36268378337836198),
    (0.1834346424956498, 0.36268378337836198),
    (0.5255324099163290, 0.31370664587788729),
    (0.7966664774136267, 0.22238103445337447),
    (0.9602898564975363, 0.10122853629037626),
];

fn gauss8(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    half * GAUSS8
        .iter()
        .map(|&(x, w)| w * f(mid + half * x))
        .sum::<f64>()
}

pub fn legendre_constants() -> LegendreConstants {
    let phi = |z: f64| 1.0 - 2.0 * z;
    let dphi = |_z: f64| -2.0;
    let phi_cumulative = |z: f64| gauss8(phi, 0.0, z);
    LegendreConstants {
        a111: 3.0 * gauss8(|z| phi(z).powi(3), 0.0, 1.0),
        b111: 3.0 * gauss8(|z| dphi(z) * phi_cumulative(z) * phi(z), 0.0, 1.0),
        c11: gauss8(|z| dphi(z) * dphi(z), 0.0, 1.0),
        g11: 3.0 * gauss8(|z| phi(z) * dphi(z), 0.0, 1.0),
        h11: 3.0 * gauss8(|z| z * phi(z) * dphi(z), 0.0, 1.0),
        k1: gauss8(|z| z * phi(z), 0.0, 1.0),
    }
}
