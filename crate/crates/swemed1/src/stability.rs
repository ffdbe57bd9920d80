//! Equilibrium classification and structural stability analysis.
//!
//! The analyses here answer, mechanically, the questions the model poses
//! around its water-at-rest equilibria: does the source Jacobian have the
//! required invertible-block structure (condition I), is the transport matrix
//! symmetrizable (condition II), is the dissipation compatible with the
//! transport (condition III), and do the normal modes `S_W - i xi A` stay in
//! the closed left half plane?

use crate::closures::{mixture_density, ClosureBundle};
use crate::linalg::{
    char_poly, eigenvalues, nullspace, rank, symmetric_eigs, CMatrix, LinalgError, Matrix5,
    CLUSTER_TOLERANCE_FACTOR, RANK_TOLERANCE_FACTOR,
};
use crate::params::Parameters;
use crate::source::{source_jacobian, source_vector, SourceMode};
use crate::state::State;
use crate::transport::transport_matrix;
use crate::ModelError;
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

/// Velocity components below this magnitude count as zero for manifold
/// membership.
pub const MANIFOLD_VELOCITY_TOL: f64 = 1e-12;
/// Concentration below this magnitude counts as fully settled.
pub const MANIFOLD_CONCENTRATION_TOL: f64 = 1e-12;
/// Default residual tolerance for equilibrium classification and the
/// spectral verdicts.
pub const DEFAULT_SPECTRUM_TOL: f64 = 1e-9;
/// Entries of conjugated/reordered Jacobians below this fraction of the
/// matrix magnitude count as structural zeros (loose enough to also accept
/// finite-difference Jacobians).
pub const BLOCK_ZERO_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StabilityError {
    #[error("state is not on the required equilibrium manifold: {0}")]
    OffManifold(String),
    #[error("analysis supports the full and fast source modes only")]
    UnsupportedMode,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Complex number in a serialization-friendly shape.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexValue {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

// ---------------------------------------------------------------------------
// equilibrium classification
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EquilibriumKind {
    /// `u_m = alpha_1 = c_m = 0`: equilibrium of the full source.
    FullySettledRest,
    /// `u_m = alpha_1 = 0`, `c_m > 0`: equilibrium of the fast source only.
    SuspendedRestFast,
    NotEquilibrium,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquilibriumClass {
    pub kind: EquilibriumKind,
    /// Max-norm of the full source at the state.
    pub full_residual: f64,
    /// Max-norm of the fast source at the state.
    pub fast_residual: f64,
}

fn inf_norm(v: &[f64; 5]) -> f64 {
    v.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

pub fn classify_equilibrium(
    s: &State,
    p: &Parameters,
    tol: f64,
) -> Result<EquilibriumClass, StabilityError> {
    let cb = ClosureBundle::new(p);
    let full = source_vector(s, p, &cb, SourceMode::Full)?;
    let fast = source_vector(s, p, &cb, SourceMode::Fast)?;
    let full_residual = inf_norm(&full);
    let fast_residual = inf_norm(&fast);
    let q = s.primitive();
    let at_rest =
        q.u_m.abs() <= MANIFOLD_VELOCITY_TOL && q.alpha_1.abs() <= MANIFOLD_VELOCITY_TOL;
    let kind = if at_rest && q.c_m.abs() <= MANIFOLD_CONCENTRATION_TOL && full_residual <= tol {
        EquilibriumKind::FullySettledRest
    } else if at_rest && q.c_m > MANIFOLD_CONCENTRATION_TOL && fast_residual <= tol {
        EquilibriumKind::SuspendedRestFast
    } else {
        EquilibriumKind::NotEquilibrium
    };
    Ok(EquilibriumClass {
        kind,
        full_residual,
        fast_residual,
    })
}

// ---------------------------------------------------------------------------
// variable ordering
// ---------------------------------------------------------------------------

/// Permutation between the conservative ordering
/// `W = (h, h u_m, h alpha_1, h c_m, h_b)` and a reordered set `Y`,
/// with `y[i] = w[perm[i]]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VariableOrdering {
    perm: [usize; 5],
}

impl VariableOrdering {
    pub fn new(perm: [usize; 5]) -> Result<Self, StabilityError> {
        let mut seen = [false; 5];
        for &i in &perm {
            if i >= 5 || seen[i] {
                return Err(StabilityError::OffManifold(
                    "ordering must be a bijection on 5 indices".into(),
                ));
            }
            seen[i] = true;
        }
        Ok(Self { perm })
    }

    pub fn identity() -> Self {
        Self {
            perm: [0, 1, 2, 3, 4],
        }
    }

    /// Ordering `Y = (h, h c_m, h_b, h u_m, h alpha_1)` used on the
    /// suspended-rest manifold.
    pub fn fast() -> Self {
        Self {
            perm: [0, 3, 4, 1, 2],
        }
    }

    pub fn apply(&self, w: &[f64; 5]) -> [f64; 5] {
        let mut y = [0.0; 5];
        for (i, &src) in self.perm.iter().enumerate() {
            y[i] = w[src];
        }
        y
    }

    pub fn inverse(&self) -> Self {
        let mut inv = [0usize; 5];
        for (i, &src) in self.perm.iter().enumerate() {
            inv[src] = i;
        }
        Self { perm: inv }
    }

    /// Conjugate a matrix into the reordered variables.
    pub fn permute_matrix(&self, m: &Matrix5) -> Matrix5 {
        m.permute(&self.perm)
    }
}

// ---------------------------------------------------------------------------
// source Jacobians on the manifolds
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JacobianMethod {
    /// Closed form, only valid on the respective manifold.
    Analytic,
    /// Central differences of the source vector; valid anywhere.
    FiniteDifference,
}

fn require_rest_velocities(s: &State) -> Result<(), StabilityError> {
    let q = s.primitive();
    if q.u_m.abs() > MANIFOLD_VELOCITY_TOL || q.alpha_1.abs() > MANIFOLD_VELOCITY_TOL {
        return Err(StabilityError::OffManifold(format!(
            "u_m = {:.3e}, alpha_1 = {:.3e} exceed the manifold tolerance",
            q.u_m, q.alpha_1
        )));
    }
    Ok(())
}

/// Source Jacobian at an equilibrium manifold.
///
/// `Full`/`Analytic` requires the fully-settled rest manifold and returns its
/// closed form. `Fast`/`Analytic` requires `u_m = alpha_1 = 0` and returns
/// the constant-`mu` block form (the form does not depend on `c_m`).
pub fn manifold_source_jacobian(
    s: &State,
    p: &Parameters,
    mode: SourceMode,
    method: JacobianMethod,
) -> Result<Matrix5, StabilityError> {
    if mode == SourceMode::Slow {
        return Err(StabilityError::UnsupportedMode);
    }
    let cb = ClosureBundle::new(p);
    match method {
        JacobianMethod::FiniteDifference => {
            s.validate(p)?;
            let jac = crate::linalg::fd_jacobian(
                |w| source_vector(&State(*w), p, &cb, mode),
                &s.0,
                1e-6,
            )?;
            Ok(jac)
        }
        JacobianMethod::Analytic => {
            s.validate(p)?;
            require_rest_velocities(s)?;
            let q = s.primitive();
            let h = q.h;
            let mut m = [[0.0; 5]; 5];
            match mode {
                SourceMode::Full => {
                    if q.c_m.abs() > MANIFOLD_CONCENTRATION_TOL {
                        return Err(StabilityError::OffManifold(format!(
                            "c_m = {:.3e} is not fully settled",
                            q.c_m
                        )));
                    }
                    let x = cb.omega_0 * cb.s_b / h;
                    m[0][3] = -x / p.one_minus_psi();
                    m[2][2] = -12.0 * p.nu / (h * h);
                    m[3][3] = -x;
                    m[4][3] = x / p.one_minus_psi();
                }
                SourceMode::Fast => {
                    let mu = p.mu_for_analysis();
                    m[1][1] = -mu / h;
                    m[1][2] = -mu / h;
                    m[2][1] = -3.0 * mu / h;
                    m[2][2] = -(3.0 * mu / h + 12.0 * p.nu / (h * h));
                }
                SourceMode::Slow => unreachable!(),
            }
            Ok(Matrix5::new(m))
        }
    }
}

// ---------------------------------------------------------------------------
// condition I: block structure of the source Jacobian
// ---------------------------------------------------------------------------

/// Source-adapted change of variables used at the fully-settled rest
/// manifold: `Y = P W` with
/// `Y = (h - h c_m/(1-psi), h u_m, h_b + h c_m/(1-psi), h alpha_1, h c_m)`.
pub fn p_matrix(psi: f64) -> Matrix5 {
    let r = 1.0 / (1.0 - psi);
    Matrix5::new([
        [1.0, 0.0, 0.0, -r, 0.0],
        [0.0, 1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, r, 1.0],
        [0.0, 0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0, 0.0],
    ])
}

pub fn p_matrix_inverse(psi: f64) -> Matrix5 {
    let r = 1.0 / (1.0 - psi);
    Matrix5::new([
        [1.0, 0.0, 0.0, 0.0, r],
        [0.0, 1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, 1.0, 0.0, -r],
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionOne {
    pub holds: bool,
    /// Trailing 2x2 block of the conjugated (or reordered) Jacobian.
    pub block: [[f64; 2]; 2],
    pub block_determinant: f64,
    /// Largest entry outside the trailing block; a structural zero.
    pub off_block_residual: f64,
    /// Structure-free cross-check: the Jacobian rank must equal the block size.
    pub jacobian_rank: usize,
    pub rank_consistent: bool,
}

/// Block condition on the source Jacobian.
///
/// At the fully-settled rest manifold the Jacobian is conjugated with the
/// explicit source-adapted transformation; at the suspended-rest manifold the
/// fast-ordering permutation is applied instead. The condition holds when
/// everything outside the trailing 2x2 block vanishes and that block is
/// invertible.
pub fn yong_condition_i(
    s_w: &Matrix5,
    manifold: EquilibriumKind,
    p: &Parameters,
) -> Result<ConditionOne, StabilityError> {
    let conjugated = match manifold {
        EquilibriumKind::FullySettledRest => {
            let pm = p_matrix(p.psi);
            let pinv = p_matrix_inverse(p.psi);
            pm.matmul(s_w).matmul(&pinv)
        }
        EquilibriumKind::SuspendedRestFast => VariableOrdering::fast().permute_matrix(s_w),
        EquilibriumKind::NotEquilibrium => {
            return Err(StabilityError::OffManifold(
                "block condition is defined on the equilibrium manifolds".into(),
            ))
        }
    };
    let scale = s_w.max_abs().max(1e-300);
    let mut off = 0.0f64;
    for i in 0..5 {
        for j in 0..5 {
            if i >= 3 && j >= 3 {
                continue;
            }
            off = off.max(conjugated.m[i][j].abs());
        }
    }
    let block = [
        [conjugated.m[3][3], conjugated.m[3][4]],
        [conjugated.m[4][3], conjugated.m[4][4]],
    ];
    let det = block[0][0] * block[1][1] - block[0][1] * block[1][0];
    let jacobian_rank = rank(s_w, RANK_TOLERANCE_FACTOR * scale);
    let rank_consistent = jacobian_rank == 2;
    let holds =
        off <= BLOCK_ZERO_TOL * scale && det.abs() > (RANK_TOLERANCE_FACTOR * scale).powi(2);
    Ok(ConditionOne {
        holds,
        block,
        block_determinant: det,
        off_block_residual: off,
        jacobian_rank,
        rank_consistent,
    })
}

// ---------------------------------------------------------------------------
// condition II: transport symmetrization / hyperbolicity class
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HyperbolicityClass {
    StrictlyHyperbolic,
    Hyperbolic,
    WeaklyHyperbolic,
    NonHyperbolic,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DefectWitness {
    pub eigenvalue: ComplexValue,
    pub algebraic_multiplicity: usize,
    pub geometric_multiplicity: usize,
    /// Orthonormal eigenvector basis for the deficient eigenvalue.
    pub eigenvectors: Vec<[f64; 5]>,
    /// Vector completing a Jordan chain: it satisfies
    /// `(A - lambda I)^2 w = 0` while `(A - lambda I) w != 0`.
    pub generalized_eigenvector: Option<[f64; 5]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionTwo {
    pub holds: bool,
    pub class: HyperbolicityClass,
    pub eigenvalues: Vec<ComplexValue>,
    /// Symmetrizer `A_0 = L^T L` built from left eigenvectors, when the
    /// matrix is diagonalizable with real spectrum.
    pub symmetrizer: Option<Matrix5>,
    pub symmetrizer_min_eigenvalue: Option<f64>,
    /// `max |A_0 A - A^T A_0|` for the returned symmetrizer.
    pub commutation_residual: Option<f64>,
    pub witness: Option<DefectWitness>,
}

fn cluster_real_eigenvalues(res: &mut [f64], gap: f64) -> Vec<(f64, usize)> {
    res.sort_by(f64::total_cmp);
    let mut clusters: Vec<(f64, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..=res.len() {
        if i == res.len() || res[i] - res[i - 1] > gap {
            let members = &res[start..i];
            let mean = members.iter().sum::<f64>() / members.len() as f64;
            clusters.push((mean, members.len()));
            start = i;
        }
    }
    clusters
}

/// Transport symmetrization condition.
///
/// Classifies the eigenstructure of `a`: complex eigenvalues give
/// `NonHyperbolic`; a complete real eigenbasis gives `StrictlyHyperbolic` or
/// `Hyperbolic` and a candidate symmetrizer; a defective real spectrum gives
/// `WeaklyHyperbolic` together with a constructive witness. The condition
/// holds only in the diagonalizable cases with a valid symmetrizer.
pub fn yong_condition_ii(a: &Matrix5, tol: f64) -> Result<ConditionTwo, LinalgError> {
    let scale = 1.0 + a.norm_inf();
    let eigs = eigenvalues(&CMatrix::from_real(a), 1e-12)?;
    let mut sorted: Vec<Complex64> = eigs;
    sorted.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    let eig_report: Vec<ComplexValue> = sorted.iter().map(|&z| z.into()).collect();

    // backward-stable solvers can split a defective real eigenvalue into a
    // conjugate pair of size ~sqrt(eps * scale); the imaginary-part threshold
    // must sit above that splitting
    let imag_tol = tol.max(CLUSTER_TOLERANCE_FACTOR) * scale;
    if let Some(bad) = sorted.iter().find(|z| z.im.abs() > imag_tol) {
        return Ok(ConditionTwo {
            holds: false,
            class: HyperbolicityClass::NonHyperbolic,
            eigenvalues: eig_report,
            symmetrizer: None,
            symmetrizer_min_eigenvalue: None,
            commutation_residual: None,
            witness: Some(DefectWitness {
                eigenvalue: (*bad).into(),
                algebraic_multiplicity: 1,
                geometric_multiplicity: 1,
                eigenvectors: Vec::new(),
                generalized_eigenvector: None,
            }),
        });
    }

    let mut reals: Vec<f64> = sorted.iter().map(|z| z.re).collect();
    let clusters = cluster_real_eigenvalues(&mut reals, CLUSTER_TOLERANCE_FACTOR * scale);

    // cluster means are trace-accurate even for defective eigenvalues, so the
    // rank computations can keep the configured (much tighter) tolerance
    let rank_tol = RANK_TOLERANCE_FACTOR * a.max_abs().max(1.0);
    let mut defect: Option<(f64, usize, usize)> = None;
    for &(center, count) in &clusters {
        let shifted = a.shifted(center);
        let geom = 5 - rank(&shifted, rank_tol);
        if geom < count {
            let is_worse = defect.map_or(true, |(_, c, g)| count - geom > c - g);
            if is_worse {
                defect = Some((center, count, geom));
            }
        }
    }

    if let Some((center, algebraic, geom)) = defect {
        let shifted = a.shifted(center);
        let eigenvectors = nullspace(&shifted, rank_tol);
        let squared = shifted.matmul(&shifted);
        let ns2 = nullspace(&squared, RANK_TOLERANCE_FACTOR * squared.max_abs().max(1.0));
        let generalized = ns2
            .iter()
            .map(|w| {
                let img = shifted.mul_vec(w);
                let res: f64 = img.iter().map(|x| x * x).sum::<f64>().sqrt();
                (res, *w)
            })
            .max_by(|x, y| x.0.total_cmp(&y.0))
            .filter(|(res, _)| *res > 1e-6 * scale)
            .map(|(_, w)| w);
        return Ok(ConditionTwo {
            holds: false,
            class: HyperbolicityClass::WeaklyHyperbolic,
            eigenvalues: eig_report,
            symmetrizer: None,
            symmetrizer_min_eigenvalue: None,
            commutation_residual: None,
            witness: Some(DefectWitness {
                eigenvalue: ComplexValue {
                    re: center,
                    im: 0.0,
                },
                algebraic_multiplicity: algebraic,
                geometric_multiplicity: geom,
                eigenvectors,
                generalized_eigenvector: generalized,
            }),
        });
    }

    // diagonalizable with real spectrum: build A_0 = L^T L from left
    // eigenvectors (identity weights; the verdict is weight-independent)
    let at = a.transpose();
    let mut rows: Vec<[f64; 5]> = Vec::with_capacity(5);
    for &(center, _count) in &clusters {
        let left = nullspace(&at.shifted(center), rank_tol);
        rows.extend(left);
    }
    if rows.len() != 5 {
        // rank estimates disagreed with the eigenvalue clustering; report the
        // state as weakly hyperbolic rather than fabricating a symmetrizer
        return Ok(ConditionTwo {
            holds: false,
            class: HyperbolicityClass::WeaklyHyperbolic,
            eigenvalues: eig_report,
            symmetrizer: None,
            symmetrizer_min_eigenvalue: None,
            commutation_residual: None,
            witness: None,
        });
    }
    let mut l = [[0.0; 5]; 5];
    for (i, row) in rows.iter().enumerate() {
        l[i] = *row;
    }
    let l = Matrix5::new(l);
    let a0 = l.transpose().matmul(&l);
    let min_eig = symmetric_eigs(&a0)[0];
    let comm = {
        let lhs = a0.matmul(a);
        let rhs = at.matmul(&a0);
        lhs.sub(&rhs).max_abs()
    };
    let spd_ok = min_eig > 1e-10 * a0.norm_inf().max(1e-300);
    let comm_ok = comm <= 1e-8 * scale * (1.0 + a0.norm_inf());
    let strictly = clusters.iter().all(|&(_, count)| count == 1);
    Ok(ConditionTwo {
        holds: spd_ok && comm_ok,
        class: if strictly {
            HyperbolicityClass::StrictlyHyperbolic
        } else {
            HyperbolicityClass::Hyperbolic
        },
        eigenvalues: eig_report,
        symmetrizer: Some(a0),
        symmetrizer_min_eigenvalue: Some(min_eig),
        commutation_residual: Some(comm),
        witness: None,
    })
}

// ---------------------------------------------------------------------------
// condition III: dissipation compatibility
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ConditionThree {
    Holds { largest_eigenvalue: f64 },
    Fails { largest_eigenvalue: f64 },
    NotApplicable,
}

/// Dissipation compatibility: with a symmetrizer `a0` from condition II,
/// forms `M = A0 S_W + S_W^T A0 + P^T diag(0, I_r) P` and requires its
/// largest eigenvalue to be non-positive (within `tol`). Without a
/// symmetrizer the condition is not applicable.
pub fn yong_condition_iii(
    a0: Option<&Matrix5>,
    s_w: &Matrix5,
    p_mat: &Matrix5,
    r: usize,
    tol: f64,
) -> ConditionThree {
    let Some(a0) = a0 else {
        return ConditionThree::NotApplicable;
    };
    assert!(r <= 5, "block size out of range");
    let mut d = Matrix5::zeros();
    for i in (5 - r)..5 {
        d.m[i][i] = 1.0;
    }
    let m = a0
        .matmul(s_w)
        .add(&s_w.transpose().matmul(a0))
        .add(&p_mat.transpose().matmul(&d).matmul(p_mat));
    let largest = symmetric_eigs(&m)[4];
    if largest <= tol {
        ConditionThree::Holds {
            largest_eigenvalue: largest,
        }
    } else {
        ConditionThree::Fails {
            largest_eigenvalue: largest,
        }
    }
}

// ---------------------------------------------------------------------------
// spectral scan
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanPoint {
    pub xi: f64,
    pub eigenvalues: Vec<ComplexValue>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralScan {
    pub points: Vec<ScanPoint>,
    pub max_real_part: f64,
}

/// Normal-mode matrix `S_W - i xi A`.
pub fn normal_mode_matrix(s_w: &Matrix5, a: &Matrix5, xi: f64) -> CMatrix {
    CMatrix::from_fn(5, |i, j| Complex64::new(s_w.m[i][j], -xi * a.m[i][j]))
}

/// Eigenvalues of `S_W - i xi A` for each requested wavenumber.
///
/// On the fully-settled rest manifold the analytic source Jacobian is used
/// (enabling closed-form comparison); elsewhere the general analytic Jacobian
/// applies.
pub fn spectral_scan(
    s: &State,
    p: &Parameters,
    xi_values: &[f64],
) -> Result<SpectralScan, StabilityError> {
    let cb = ClosureBundle::new(p);
    let a = transport_matrix(s, p, &cb)?;
    let q = s.primitive();
    let on_rest = q.u_m.abs() <= MANIFOLD_VELOCITY_TOL
        && q.alpha_1.abs() <= MANIFOLD_VELOCITY_TOL
        && q.c_m.abs() <= MANIFOLD_CONCENTRATION_TOL;
    let s_w = if on_rest {
        manifold_source_jacobian(s, p, SourceMode::Full, JacobianMethod::Analytic)?
    } else {
        source_jacobian(s, p, &cb, SourceMode::Full)?
    };
    let mut points = Vec::with_capacity(xi_values.len());
    let mut max_real = f64::NEG_INFINITY;
    for &xi in xi_values {
        let m = normal_mode_matrix(&s_w, &a, xi);
        let mut eigs = eigenvalues(&m, 1e-12)?;
        eigs.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
        for z in &eigs {
            max_real = max_real.max(z.re);
        }
        points.push(ScanPoint {
            xi,
            eigenvalues: eigs.into_iter().map(|z| z.into()).collect(),
        });
    }
    let max_real_part = if points.is_empty() { 0.0 } else { max_real };
    Ok(SpectralScan {
        points,
        max_real_part,
    })
}

/// Closed-form spectrum `{0, -omega_0 S_b/h, -12 nu/h^2, +-i sqrt(g h) xi}`
/// of the normal-mode matrix at a fully-settled rest state.
pub fn rest_spectrum_closed_form(h: f64, xi: f64, p: &Parameters) -> [Complex64; 5] {
    let cb = ClosureBundle::new(p);
    let wave = (p.g * h).sqrt() * xi;
    [
        Complex64::new(0.0, 0.0),
        Complex64::new(-cb.omega_0 * cb.s_b / h, 0.0),
        Complex64::new(-12.0 * p.nu / (h * h), 0.0),
        Complex64::new(0.0, wave),
        Complex64::new(0.0, -wave),
    ]
}

/// Smallest max-distance pairing between two equally sized spectra.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len();
    assert!(n <= 8, "multiset comparison supports up to 8 values");
    fn go(
        a: &[Complex64],
        b: &[Complex64],
        used: &mut [bool],
        i: usize,
        current: f64,
        best: &mut f64,
    ) {
        if current >= *best {
            return;
        }
        if i == a.len() {
            *best = current;
            return;
        }
        for j in 0..b.len() {
            if !used[j] {
                used[j] = true;
                go(a, b, used, i + 1, current.max((a[i] - b[j]).norm()), best);
                used[j] = false;
            }
        }
    }
    let mut used = vec![false; n];
    let mut best = f64::INFINITY;
    go(a, b, &mut used, 0, 0.0, &mut best);
    best
}

// ---------------------------------------------------------------------------
// reports
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureCheck {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub state: [f64; 5],
    pub equilibrium: EquilibriumClass,
    pub condition_i: Option<ConditionOne>,
    pub condition_ii: ConditionTwo,
    pub condition_iii: ConditionThree,
    pub spectral_scan: Option<SpectralScan>,
    pub structure_checks: Vec<StructureCheck>,
    pub notes: Vec<String>,
}

/// Combined analysis at a suspended-rest state: reduced transport structure,
/// characteristic polynomial, kernel dimension and span, block condition for
/// the fast source, and the symmetrization verdict.
pub fn fast_manifold_report(s: &State, p: &Parameters) -> Result<StabilityReport, StabilityError> {
    let cb = ClosureBundle::new(p);
    s.validate(p)?;
    require_rest_velocities(s)?;
    let q = s.primitive();
    if q.c_m <= MANIFOLD_CONCENTRATION_TOL {
        return Err(StabilityError::OffManifold(format!(
            "c_m = {:.3e} must be positive on the suspended-rest manifold",
            q.c_m
        )));
    }

    let ordering = VariableOrdering::fast();
    let a = transport_matrix(s, p, &cb)?;
    let a_y = ordering.permute_matrix(&a);
    let gh = p.g * q.h;
    let rho = mixture_density(q.c_m, p);
    let beta = gh * (p.rho_s - p.rho_w) / (2.0 * rho);
    let c = q.c_m;

    let mut checks = Vec::new();
    let expected = Matrix5::new([
        [0.0, 0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, c, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0],
        [gh - c * beta, beta, gh, 0.0, 0.0],
        [-c * beta, beta, 0.0, 0.0, 0.0],
    ]);
    let structure_residual = a_y.sub(&expected).max_abs();
    checks.push(StructureCheck {
        name: "reordered transport matches the reduced suspended-rest form".into(),
        passed: structure_residual <= 1e-10 * (1.0 + expected.max_abs()),
        residual: structure_residual,
    });

    let cp = char_poly(&a_y);
    let cp_expected = [1.0, 0.0, -gh, 0.0, 0.0, 0.0];
    let cp_residual = cp
        .iter()
        .zip(cp_expected.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    checks.push(StructureCheck {
        name: "characteristic polynomial reduces to the cubic-degenerate form".into(),
        passed: cp_residual <= 1e-10 * (1.0 + gh),
        residual: cp_residual,
    });

    let kernel = nullspace(&a_y, RANK_TOLERANCE_FACTOR * a_y.max_abs());
    let expected_kernel = [[1.0, 0.0, -1.0, 0.0, 0.0], [0.0, 0.0, 0.0, 0.0, 1.0]];
    let mut span_residual = if kernel.len() == 2 { 0.0f64 } else { f64::INFINITY };
    if kernel.len() == 2 {
        for target in expected_kernel {
            let norm: f64 = target.iter().map(|x| x * x).sum::<f64>().sqrt();
            let mut residual: Vec<f64> = target.iter().map(|x| x / norm).collect();
            for basis in &kernel {
                let dot: f64 = residual.iter().zip(basis.iter()).map(|(a, b)| a * b).sum();
                for (r, qv) in residual.iter_mut().zip(basis.iter()) {
                    *r -= dot * qv;
                }
            }
            let rem: f64 = residual.iter().map(|x| x * x).sum::<f64>().sqrt();
            span_residual = span_residual.max(rem);
        }
    }
    checks.push(StructureCheck {
        name: "transport kernel is two-dimensional with the expected span".into(),
        passed: kernel.len() == 2 && span_residual <= 1e-8,
        residual: span_residual,
    });

    let s_w_fast = manifold_source_jacobian(s, p, SourceMode::Fast, JacobianMethod::Analytic)?;
    let condition_i = yong_condition_i(&s_w_fast, EquilibriumKind::SuspendedRestFast, p)?;
    let condition_ii = yong_condition_ii(&a_y, DEFAULT_SPECTRUM_TOL)?;
    let condition_iii = ConditionThree::NotApplicable;

    let equilibrium = classify_equilibrium(s, p, DEFAULT_SPECTRUM_TOL)?;
    let mut notes = vec![
        "fast-source block condition refers to the constant-mu linear friction law".to_string(),
    ];
    if !condition_ii.holds {
        notes.push(
            "transport symmetrization fails at the suspended-rest manifold; \
             dissipation compatibility is not applicable"
                .to_string(),
        );
    }
    Ok(StabilityReport {
        state: s.0,
        equilibrium,
        condition_i: Some(condition_i),
        condition_ii,
        condition_iii,
        spectral_scan: None,
        structure_checks: checks,
        notes,
    })
}

/// Full stability report at an arbitrary admissible state.
pub fn stability_report(
    s: &State,
    p: &Parameters,
    xi_values: &[f64],
) -> Result<StabilityReport, StabilityError> {
    let cb = ClosureBundle::new(p);
    let equilibrium = classify_equilibrium(s, p, DEFAULT_SPECTRUM_TOL)?;
    match equilibrium.kind {
        EquilibriumKind::FullySettledRest => {
            let a = transport_matrix(s, p, &cb)?;
            let s_w = manifold_source_jacobian(s, p, SourceMode::Full, JacobianMethod::Analytic)?;
            let condition_i = yong_condition_i(&s_w, EquilibriumKind::FullySettledRest, p)?;
            let condition_ii = yong_condition_ii(&a, DEFAULT_SPECTRUM_TOL)?;
            let condition_iii = yong_condition_iii(
                condition_ii.symmetrizer.as_ref(),
                &s_w,
                &p_matrix(p.psi),
                2,
                1e-10,
            );
            let scan = if xi_values.is_empty() {
                None
            } else {
                Some(spectral_scan(s, p, xi_values)?)
            };
            let mut checks = Vec::new();
            if let Some(scan) = &scan {
                let h = s.h();
                let mut worst = 0.0f64;
                for point in &scan.points {
                    let computed: Vec<Complex64> = point
                        .eigenvalues
                        .iter()
                        .map(|z| Complex64::new(z.re, z.im))
                        .collect();
                    let expected = rest_spectrum_closed_form(h, point.xi, p);
                    worst = worst.max(multiset_distance(&computed, &expected));
                }
                checks.push(StructureCheck {
                    name: "normal-mode spectrum matches the closed-form set".into(),
                    passed: worst <= 1e-8,
                    residual: worst,
                });
            }
            let mut notes = Vec::new();
            if !condition_ii.holds {
                notes.push(
                    "transport matrix is only weakly hyperbolic at the fully-settled rest \
                     manifold; no positive definite symmetrizer exists and dissipation \
                     compatibility is not applicable"
                        .to_string(),
                );
            }
            Ok(StabilityReport {
                state: s.0,
                equilibrium,
                condition_i: Some(condition_i),
                condition_ii,
                condition_iii,
                spectral_scan: scan,
                structure_checks: checks,
                notes,
            })
        }
        EquilibriumKind::SuspendedRestFast => {
            let mut report = fast_manifold_report(s, p)?;
            if !xi_values.is_empty() {
                report.spectral_scan = Some(spectral_scan(s, p, xi_values)?);
            }
            Ok(report)
        }
        EquilibriumKind::NotEquilibrium => {
            let a = transport_matrix(s, p, &cb)?;
            let condition_ii = yong_condition_ii(&a, DEFAULT_SPECTRUM_TOL)?;
            let scan = if xi_values.is_empty() {
                None
            } else {
                Some(spectral_scan(s, p, xi_values)?)
            };
            Ok(StabilityReport {
                state: s.0,
                equilibrium,
                condition_i: None,
                condition_ii,
                condition_iii: ConditionThree::NotApplicable,
                spectral_scan: scan,
                structure_checks: Vec::new(),
                notes: vec![
                    "state is not an equilibrium; only the transport eigenstructure is reported"
                        .to_string(),
                ],
            })
        }
    }
}
